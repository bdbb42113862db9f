//! Command tree and dispatch.
//!
//! Three subcommands: `analyze` computes one uniformity measure for one
//! sequence (or a `--sweep` over prefix sizes), `verify` runs self-checks
//! whose expected outcome is known a priori, and `points` prints the
//! sequence itself as exact rationals.
//!
//! Every run validates all arguments before any computation starts, so an
//! invalid request never burns time first. Output is JSON (one object,
//! sorted keys, all effective defaults printed so the record is
//! self-describing) except for `--sweep`, which emits CSV with the fixed
//! header `measure,N,value`, and `points`, which emits plain text.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use equilens_core::digits::{enumerate_partitions, AdditionSpec};
use equilens_core::discrepancy::{
    choose_resolution, discrepancy_spectral_test, discrete_discrepancy, discrete_star_discrepancy,
    epsilon_bounds, exact_extreme_discrepancy_small, exact_star_discrepancy_1d, DiscrepancyOptions,
    DiscreteDiscrepancy, Resolution, WitnessKind,
};
use equilens_core::error::{Error, Result};
use equilens_core::lattice::{
    babenko_zaremba, p_alpha, sigma_merit, sloan_kachoyan_check, SearchOptions,
};
use equilens_core::measures::{diaphony, spectral_test, SpectralOptions};
use equilens_core::padic::{HybridSystemConfig, SystemComponent};
use equilens_core::weights::{CoordFactor, EuclideanWeight, ProductWeight, Weight};

use crate::exec::ThreadExecutor;
use crate::seqlang::{parse_seq, ResolvedSeq};

/// Uniformity measures for point sequences on the torus.
#[derive(Debug, Parser)]
#[command(name = "equilens", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a uniformity measure for a sequence.
    Analyze(AnalyzeArgs),
    /// Run a self-check with a known expected outcome.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Print the first N points as exact rationals, one point per line.
    Points(PointsArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Sequence spec: halton:2,3 | kron:golden,sqrt:2,0.25 | glp:1,13@21
    /// | file:PATH | hybrid:(SPEC)+(SPEC).
    #[arg(long)]
    pub seq: String,

    /// Number of points to analyze; defaults to the sequence's intrinsic
    /// length (glp modulus, file size) when it has one.
    #[arg(long = "N")]
    pub n: Option<u64>,

    /// Which measure to compute.
    #[arg(long, value_enum)]
    pub measure: Measure,

    /// Comma-separated prefix sizes: compute the measure at each and emit
    /// CSV (`measure,N,value`) instead of JSON.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<u64>>,

    /// Function system: `auto` (Walsh in the matching base for Halton
    /// coordinates, trigonometric otherwise) or a per-coordinate list of
    /// walsh:B, badic:B, trig.
    #[arg(long, default_value = "auto")]
    pub system: String,

    /// Index weight: `auto` (digit-length on digital coordinates,
    /// 1/max(1,|k|) on trigonometric ones), r-reciprocal, digit-length,
    /// or euclidean.
    #[arg(long, default_value = "auto")]
    pub weight: String,

    /// Exponent for diaphony (any real > 1) and p-alpha (2, 4, or 6).
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,

    /// Relative truncation tolerance for diaphony.
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,

    /// Grid base per coordinate for discrete measures; a single value
    /// applies to every coordinate. Defaults to base 2.
    #[arg(long, value_delimiter = ',')]
    pub base: Option<Vec<u64>>,

    /// Grid exponent g_i per coordinate for discrete measures; a single
    /// value applies to every coordinate.
    #[arg(long, value_delimiter = ',')]
    pub resolution: Option<Vec<u32>>,

    /// Use anchored boxes [0, v) instead of general boxes.
    #[arg(long)]
    pub star: bool,

    /// Target accuracy for discrepancy-spectral: chooses the coarsest
    /// resolution whose sandwich width stays below epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Cap on the shell radius of index scans.
    #[arg(long)]
    pub max_shell: Option<u64>,

    /// Cap on the number of index vectors scanned.
    #[arg(long)]
    pub max_indices: Option<u64>,

    /// Cap on the number of grid boxes scanned by discrete discrepancies.
    #[arg(long)]
    pub max_boxes: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    /// Weighted spectral test: sup of weighted Weyl-sum moduli.
    Spectral,
    /// L^alpha diaphony.
    Diaphony,
    /// Exact discrete discrepancy on a b-adic grid.
    DiscreteDiscrepancy,
    /// Exact star discrepancy (dimension 1 only).
    Star,
    /// Exact extreme discrepancy (s <= 3, N <= 64).
    ExtremeOracle,
    /// Lattice figure sigma(a, N) = 1/min ||k||_2 over the dual.
    SigmaLattice,
    /// Lattice figure P_alpha by the closed node sum.
    PAlpha,
    /// Babenko-Zaremba index 1/min r(k) over the dual.
    BzIndex,
    /// Discrepancy as a spectral test: grid branch + off-grid tail scan.
    DiscrepancySpectral,
}

impl Measure {
    fn name(self) -> &'static str {
        match self {
            Measure::Spectral => "spectral",
            Measure::Diaphony => "diaphony",
            Measure::DiscreteDiscrepancy => "discrete-discrepancy",
            Measure::Star => "star",
            Measure::ExtremeOracle => "extreme-oracle",
            Measure::SigmaLattice => "sigma-lattice",
            Measure::PAlpha => "p-alpha",
            Measure::BzIndex => "bz-index",
            Measure::DiscrepancySpectral => "discrepancy-spectral",
        }
    }

    fn needs_lattice(self) -> bool {
        matches!(
            self,
            Measure::SigmaLattice | Measure::PAlpha | Measure::BzIndex
        )
    }
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Check the abelian-group axioms for blockwise digit addition, for
    /// every partition of m, and that the element-order multisets tell
    /// the partitions apart.
    Digits {
        #[arg(long)]
        base: u64,
        /// Number of digits per vector.
        #[arg(long)]
        m: u32,
        /// Check every pair/triple when the group has at most this many
        /// elements; sample otherwise.
        #[arg(long, default_value_t = 4096)]
        exhaustive_limit: u64,
        /// Sampled triples when the group is too large to exhaust.
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Check that the lattice-rule exponential sums are exactly the dual
    /// indicator over the index box [-B, B]^s.
    SloanKachoyan {
        /// A glp: sequence spec naming the rule.
        #[arg(long)]
        seq: String,
        /// Half-width B of the index box.
        #[arg(long, default_value_t = 16)]
        box_bound: u64,
        /// Largest acceptable |sum - indicator|.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Check discrete <= exact <= discrete + epsilon, with the exact
    /// value from the small-case oracle (star: s = 1; extreme: s <= 3,
    /// N <= 64).
    Sandwich {
        #[arg(long)]
        seq: String,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        base: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<u32>>,
        #[arg(long)]
        star: bool,
    },
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    /// Sequence spec (same mini-language as analyze).
    #[arg(long)]
    pub seq: String,
    /// Number of points; defaults to the intrinsic length when finite.
    #[arg(long = "N")]
    pub n: Option<u64>,
}

/// What a successful run produced: text for stdout plus whether a
/// verification passed (always true for analyze/points).
pub struct RunOutput {
    pub text: String,
    pub passed: bool,
}

/// Executes a parsed command line.
pub fn run(cli: Cli) -> Result<RunOutput> {
    let exec = ThreadExecutor::from_env();
    match cli.command {
        Command::Analyze(args) => run_analyze(&args, &exec),
        Command::Verify { check } => run_verify(&check, &exec),
        Command::Points(args) => run_points(&args),
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

/// Everything an analyze run needs, resolved and validated up front.
struct AnalyzePlan {
    seq: ResolvedSeq,
    counts: Vec<u64>,
    sweep: bool,
    /// System and weight, resolved for the measures that use them.
    system: Option<HybridSystemConfig>,
    weight: Option<AnyWeight>,
    weight_name: String,
    /// Grid resolution for the discrete measures.
    grid: Option<Resolution>,
    spectral_opts: SpectralOptions,
    disc_opts: DiscrepancyOptions,
}

fn run_analyze(args: &AnalyzeArgs, exec: &ThreadExecutor) -> Result<RunOutput> {
    let plan = plan_analyze(args)?;
    if plan.sweep {
        let mut csv = String::from("measure,N,value\n");
        for &count in &plan.counts {
            let (value, _) = measure_once(args, &plan, count, exec)?;
            csv.push_str(&format!("{},{count},{value}\n", args.measure.name()));
        }
        Ok(RunOutput {
            text: csv,
            passed: true,
        })
    } else {
        let count = plan.counts[0];
        let (_, record) = measure_once(args, &plan, count, exec)?;
        Ok(RunOutput {
            text: render_json(record),
            passed: true,
        })
    }
}

fn plan_analyze(args: &AnalyzeArgs) -> Result<AnalyzePlan> {
    let seq = parse_seq(&args.seq)?;
    let dim = seq.dim();
    let measure = args.measure;

    if measure.needs_lattice() {
        if seq.lattice.is_none() {
            return Err(Error::argument(format!(
                "{} acts on a lattice rule; --seq must be glp:a1,...,as@N",
                measure.name()
            )));
        }
        if args.sweep.is_some() {
            return Err(Error::argument(format!(
                "{} is a figure of the rule itself, not of a prefix; \
                 --sweep does not apply",
                measure.name()
            )));
        }
    }

    // Point counts: the sweep list, or the single requested / intrinsic N.
    let counts = match (&args.sweep, args.n, seq.len()) {
        (Some(list), _, _) => {
            if list.is_empty() {
                return Err(Error::argument("--sweep needs at least one count"));
            }
            list.clone()
        }
        (None, Some(n), _) => vec![n],
        (None, None, Some(len)) => vec![len],
        (None, None, None) => {
            return Err(Error::argument(
                "this sequence has no intrinsic length; pass --N",
            ))
        }
    };
    for &c in &counts {
        if c == 0 {
            return Err(Error::argument("point counts must be >= 1"));
        }
        if let Some(len) = seq.len() {
            if c > len {
                return Err(Error::argument(format!(
                    "N = {c} exceeds the sequence's {len} points"
                )));
            }
        }
    }

    // Alpha validity, before any points are generated.
    match measure {
        Measure::Diaphony => {
            if args.alpha.is_nan() || args.alpha <= 1.0 {
                return Err(Error::argument("diaphony needs alpha > 1"));
            }
            if args.rel_tol.is_nan() || args.rel_tol <= 0.0 {
                return Err(Error::argument("--rel-tol must be > 0"));
            }
        }
        Measure::PAlpha
            if (args.alpha.fract() != 0.0 || !matches!(args.alpha as u32, 2 | 4 | 6)) =>
        {
            return Err(Error::argument("p-alpha needs --alpha 2, 4, or 6"));
        }
        _ => {}
    }

    // Dimension gates for the oracles.
    if measure == Measure::Star && dim != 1 {
        return Err(Error::argument(
            "the star measure is the exact 1-d oracle; use discrete-discrepancy \
             --star or discrepancy-spectral --star in higher dimensions",
        ));
    }

    // System + weight, for the measures that consume them.
    let (system, weight, weight_name) = match measure {
        Measure::Spectral | Measure::Diaphony => {
            let system = resolve_system(&args.system, &seq)?;
            let (weight, name) = resolve_weight(&args.weight, &system)?;
            (Some(system), Some(weight), name)
        }
        _ => {
            if args.system != "auto" {
                return Err(Error::argument(format!(
                    "--system applies to spectral and diaphony, not {}",
                    measure.name()
                )));
            }
            if args.weight != "auto" {
                return Err(Error::argument(format!(
                    "--weight applies to spectral and diaphony, not {}",
                    measure.name()
                )));
            }
            (None, None, String::new())
        }
    };

    // Grid resolution for the discrete measures.
    let grid = match measure {
        Measure::DiscreteDiscrepancy => Some(explicit_resolution(args, dim)?),
        Measure::DiscrepancySpectral => Some(match args.epsilon {
            Some(eps) => {
                if args.resolution.is_some() {
                    return Err(Error::argument(
                        "--epsilon chooses the resolution; drop --resolution",
                    ));
                }
                choose_resolution(eps, &broadcast(args.base.as_deref(), &[2], dim, "--base")?)?
            }
            None => explicit_resolution(args, dim)?,
        }),
        _ => {
            if args.base.is_some() || args.resolution.is_some() || args.epsilon.is_some() {
                return Err(Error::argument(format!(
                    "--base/--resolution/--epsilon apply to the discrete \
                     measures, not {}",
                    measure.name()
                )));
            }
            None
        }
    };
    if args.star
        && !matches!(
            measure,
            Measure::DiscreteDiscrepancy | Measure::DiscrepancySpectral
        )
    {
        return Err(Error::argument(format!(
            "--star applies to discrete-discrepancy and discrepancy-spectral, \
             not {}",
            measure.name()
        )));
    }

    let mut spectral_opts = SpectralOptions::default();
    if let Some(k) = args.max_shell {
        spectral_opts.max_shell = k;
    }
    if let Some(k) = args.max_indices {
        spectral_opts.max_indices = k;
    }
    let mut disc_opts = DiscrepancyOptions::default();
    if let Some(k) = args.max_boxes {
        disc_opts.max_boxes = k;
    }

    Ok(AnalyzePlan {
        seq,
        counts,
        sweep: args.sweep.is_some(),
        system,
        weight,
        weight_name,
        grid,
        spectral_opts,
        disc_opts,
    })
}

/// Resolution from --base / --resolution, broadcasting single values.
fn explicit_resolution(args: &AnalyzeArgs, dim: usize) -> Result<Resolution> {
    let Some(res) = args.resolution.as_deref() else {
        return Err(Error::argument(format!(
            "{} needs --resolution g (per coordinate or a single value)",
            args.measure.name()
        )));
    };
    let bases = broadcast(args.base.as_deref(), &[2], dim, "--base")?;
    let exponents = broadcast(Some(res), &[], dim, "--resolution")?;
    Resolution::new(bases, exponents)
}

fn broadcast<T: Copy>(
    given: Option<&[T]>,
    default: &[T],
    dim: usize,
    what: &str,
) -> Result<Vec<T>> {
    let src = given.unwrap_or(default);
    match src.len() {
        1 => Ok(vec![src[0]; dim]),
        n if n == dim => Ok(src.to_vec()),
        n => Err(Error::argument(format!(
            "{what} lists {n} values for a {dim}-dimensional sequence \
             (give one value or one per coordinate)"
        ))),
    }
}

/// Computes the measure for one prefix size and returns (value, record).
fn measure_once(
    args: &AnalyzeArgs,
    plan: &AnalyzePlan,
    count: u64,
    exec: &ThreadExecutor,
) -> Result<(f64, Value)> {
    let seq = &plan.seq;
    let mut record = json!({
        "schema": "1",
        "measure": args.measure.name(),
        "seq": seq.describe(),
        "N": count,
    });
    let obj = record.as_object_mut().expect("literal object");

    match args.measure {
        Measure::Spectral => {
            let pts = seq.points(count)?;
            let system = plan.system.as_ref().expect("planned");
            let weight = plan.weight.as_ref().expect("planned");
            let r = match weight {
                AnyWeight::Product(w) => {
                    spectral_test(&pts, pts.len(), system, w, &plan.spectral_opts, exec)?
                }
                AnyWeight::Euclidean(w) => {
                    spectral_test(&pts, pts.len(), system, w, &plan.spectral_opts, exec)?
                }
            };
            obj.insert("system".into(), json!(system_name(system)));
            obj.insert("weight".into(), json!(plan.weight_name));
            obj.insert("norm".into(), json!("max"));
            obj.insert("value".into(), json!(r.value));
            obj.insert("argmax".into(), json!(r.argmax));
            obj.insert("shell_bound".into(), json!(r.shell_bound));
            obj.insert("normalizer".into(), json!(r.normalizer));
            obj.insert("indices_scanned".into(), json!(r.indices_scanned));
            Ok((r.value, record))
        }
        Measure::Diaphony => {
            let pts = seq.points(count)?;
            let system = plan.system.as_ref().expect("planned");
            let weight = plan.weight.as_ref().expect("planned");
            let r = match weight {
                AnyWeight::Product(w) => diaphony(
                    &pts,
                    pts.len(),
                    system,
                    w,
                    args.alpha,
                    args.rel_tol,
                    &plan.spectral_opts,
                    exec,
                )?,
                AnyWeight::Euclidean(w) => diaphony(
                    &pts,
                    pts.len(),
                    system,
                    w,
                    args.alpha,
                    args.rel_tol,
                    &plan.spectral_opts,
                    exec,
                )?,
            };
            obj.insert("system".into(), json!(system_name(system)));
            obj.insert("weight".into(), json!(plan.weight_name));
            obj.insert("alpha".into(), json!(r.alpha));
            obj.insert("rel_tol".into(), json!(args.rel_tol));
            obj.insert("value".into(), json!(r.value));
            obj.insert("truncation".into(), json!(r.truncation));
            obj.insert("tail_error_bound".into(), json!(r.tail_error_bound));
            obj.insert("denominator".into(), json!(r.denominator));
            Ok((r.value, record))
        }
        Measure::DiscreteDiscrepancy => {
            let pts = seq.points(count)?;
            let res = plan.grid.as_ref().expect("planned");
            let r = if args.star {
                discrete_star_discrepancy(&pts, pts.len(), res, &plan.disc_opts)?
            } else {
                discrete_discrepancy(&pts, pts.len(), res, &plan.disc_opts)?
            };
            insert_grid_request(obj, res, args.star);
            insert_discrete(obj, &r);
            Ok((r.value, record))
        }
        Measure::Star => {
            let pts = seq.points(count)?;
            let r = exact_star_discrepancy_1d(&pts, pts.len())?;
            obj.insert("value".into(), json!(r.value));
            obj.insert("exact".into(), json!(r.exact.to_string()));
            Ok((r.value, record))
        }
        Measure::ExtremeOracle => {
            let pts = seq.points(count)?;
            let r = exact_extreme_discrepancy_small(&pts, pts.len(), &plan.disc_opts)?;
            obj.insert("value".into(), json!(r.value));
            obj.insert("exact".into(), json!(r.exact.to_string()));
            obj.insert("witness_lower".into(), json!(rationals(&r.witness_lower)));
            obj.insert("witness_upper".into(), json!(rationals(&r.witness_upper)));
            obj.insert(
                "witness_kind".into(),
                json!(match r.witness_kind {
                    WitnessKind::ClosedOverfill => "closed-overfill",
                    WitnessKind::OpenUnderfill => "open-underfill",
                }),
            );
            Ok((r.value, record))
        }
        Measure::SigmaLattice => {
            let rule = seq.lattice.as_ref().expect("planned");
            let r = sigma_merit(rule, &SearchOptions::default())?;
            obj.insert("value".into(), json!(r.sigma));
            obj.insert("min_norm_sq".into(), json!(r.min_norm_sq.to_string()));
            obj.insert("argmin".into(), json!(r.argmin));
            Ok((r.sigma, record))
        }
        Measure::PAlpha => {
            let rule = seq.lattice.as_ref().expect("planned");
            let value = p_alpha(rule, args.alpha as u32)?;
            obj.insert("alpha".into(), json!(args.alpha));
            obj.insert("value".into(), json!(value));
            Ok((value, record))
        }
        Measure::BzIndex => {
            let rule = seq.lattice.as_ref().expect("planned");
            let r = babenko_zaremba(rule, &SearchOptions::default())?;
            obj.insert("value".into(), json!(r.kappa));
            obj.insert("r_min".into(), json!(r.r_min.to_string()));
            obj.insert("argmin".into(), json!(r.argmin));
            Ok((r.kappa, record))
        }
        Measure::DiscrepancySpectral => {
            let pts = seq.points(count)?;
            let res = plan.grid.as_ref().expect("planned");
            let r = discrepancy_spectral_test(&pts, pts.len(), res, args.star, &plan.disc_opts)?;
            insert_grid_request(obj, res, args.star);
            if let Some(eps) = args.epsilon {
                obj.insert("epsilon".into(), json!(eps));
            }
            obj.insert("value".into(), json!(r.value));
            obj.insert("grid_value".into(), json!(r.grid.value));
            obj.insert("grid_numerator".into(), json!(r.grid.numerator.to_string()));
            obj.insert(
                "grid_denominator".into(),
                json!(r.grid.denominator.to_string()),
            );
            obj.insert("tail_attained".into(), json!(r.tail_attained));
            obj.insert("tail_cap".into(), json!(r.tail_cap));
            obj.insert("tail_shell".into(), json!(r.tail_shell));
            Ok((r.value, record))
        }
    }
}

fn insert_grid_request(obj: &mut serde_json::Map<String, Value>, res: &Resolution, star: bool) {
    obj.insert("base".into(), json!(res.bases()));
    obj.insert("resolution".into(), json!(res.exponents()));
    obj.insert("star".into(), json!(star));
}

fn insert_discrete(obj: &mut serde_json::Map<String, Value>, r: &DiscreteDiscrepancy) {
    obj.insert("value".into(), json!(r.value));
    obj.insert("numerator".into(), json!(r.numerator.to_string()));
    obj.insert("denominator".into(), json!(r.denominator.to_string()));
    obj.insert("witness_lower".into(), json!(r.witness_lower));
    obj.insert("witness_upper".into(), json!(r.witness_upper));
    obj.insert("cell_counts".into(), json!(r.cell_counts));
    obj.insert("boxes_scanned".into(), json!(r.boxes_scanned));
}

fn rationals(rs: &[BigRational]) -> Vec<String> {
    rs.iter().map(|r| r.to_string()).collect()
}

// ---------------------------------------------------------------------------
// System and weight resolution.
// ---------------------------------------------------------------------------

/// A weight chosen at run time. Product and Euclidean weights are separate
/// types in the library, so the dispatch happens once here.
enum AnyWeight {
    Product(ProductWeight),
    Euclidean(EuclideanWeight),
}

fn resolve_system(spec: &str, seq: &ResolvedSeq) -> Result<HybridSystemConfig> {
    if spec == "auto" {
        return HybridSystemConfig::per_coordinate(&seq.natural_system);
    }
    let comps: Vec<SystemComponent> = spec
        .split(',')
        .map(parse_component)
        .collect::<Result<Vec<_>>>()?;
    let comps = broadcast(Some(comps.as_slice()), &[], seq.dim(), "--system")?;
    HybridSystemConfig::per_coordinate(&comps)
}

fn parse_component(token: &str) -> Result<SystemComponent> {
    let token = token.trim();
    if token == "trig" {
        return Ok(SystemComponent::Trig);
    }
    let parse_base = |b: &str| -> Result<u64> {
        b.trim().parse().map_err(|_| {
            Error::argument(format!("cannot parse base in system component `{token}`"))
        })
    };
    if let Some(b) = token.strip_prefix("walsh:") {
        return Ok(SystemComponent::Walsh {
            base: parse_base(b)?,
        });
    }
    if let Some(b) = token.strip_prefix("badic:") {
        return Ok(SystemComponent::Badic {
            base: parse_base(b)?,
        });
    }
    Err(Error::argument(format!(
        "unknown system component `{token}` (expected walsh:B, badic:B, or trig)"
    )))
}

fn system_name(system: &HybridSystemConfig) -> String {
    let parts: Vec<String> = system
        .components()
        .iter()
        .map(|c| match c {
            SystemComponent::Walsh { base } => format!("walsh:{base}"),
            SystemComponent::Badic { base } => format!("badic:{base}"),
            SystemComponent::Trig => String::from("trig"),
        })
        .collect();
    parts.join(",")
}

/// Resolves the --weight flag against the chosen system. Returns the
/// weight and the name printed in output records.
fn resolve_weight(spec: &str, system: &HybridSystemConfig) -> Result<(AnyWeight, String)> {
    let sig = system.signature();
    match spec {
        "auto" => {
            let factors: Vec<CoordFactor> = system
                .components()
                .iter()
                .map(|c| match c {
                    SystemComponent::Walsh { base } | SystemComponent::Badic { base } => {
                        CoordFactor::DigitLength { base: *base }
                    }
                    SystemComponent::Trig => CoordFactor::Reciprocal,
                })
                .collect();
            let weight = ProductWeight::new(factors, sig)?;
            let name = weight_name(&weight);
            Ok((AnyWeight::Product(weight), name))
        }
        "r-reciprocal" => {
            let weight = ProductWeight::zaremba(sig)?;
            Ok((AnyWeight::Product(weight), String::from("r-reciprocal")))
        }
        "digit-length" => {
            let bases: Vec<u64> = system
                .components()
                .iter()
                .enumerate()
                .map(|(i, c)| match c {
                    SystemComponent::Walsh { base } | SystemComponent::Badic { base } => Ok(*base),
                    SystemComponent::Trig => Err(Error::capability(format!(
                        "digit-length weight needs a digital (walsh/badic) \
                         component in every coordinate; coordinate {i} is trig"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            let weight = ProductWeight::digit_length(&bases, sig)?;
            let name = weight_name(&weight);
            Ok((AnyWeight::Product(weight), name))
        }
        "euclidean" => Ok((
            AnyWeight::Euclidean(EuclideanWeight),
            String::from("euclidean"),
        )),
        other => Err(Error::argument(format!(
            "unknown weight `{other}` \
             (expected auto, r-reciprocal, digit-length, or euclidean)"
        ))),
    }
}

/// Canonical display name: the uniform products get their flag names, a
/// genuine mixture falls back to the per-coordinate factor list.
fn weight_name(weight: &ProductWeight) -> String {
    let factors = weight.factors();
    if factors.iter().all(|f| matches!(f, CoordFactor::Reciprocal)) {
        return String::from("r-reciprocal");
    }
    if factors
        .iter()
        .all(|f| matches!(f, CoordFactor::DigitLength { .. }))
    {
        let bases: Vec<String> = factors
            .iter()
            .map(|f| match f {
                CoordFactor::DigitLength { base } => base.to_string(),
                CoordFactor::Reciprocal => unreachable!(),
            })
            .collect();
        return format!("digit-length@{}", bases.join(","));
    }
    format!("mixed:{}", weight.describe())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(check: &VerifyCommand, exec: &ThreadExecutor) -> Result<RunOutput> {
    match check {
        VerifyCommand::Digits {
            base,
            m,
            exhaustive_limit,
            samples,
            seed,
        } => verify_digits(*base, *m, *exhaustive_limit, *samples, *seed),
        VerifyCommand::SloanKachoyan {
            seq,
            box_bound,
            tol,
        } => verify_sloan_kachoyan(seq, *box_bound, *tol, exec),
        VerifyCommand::Sandwich {
            seq,
            n,
            base,
            resolution,
            star,
        } => verify_sandwich(seq, *n, base.as_deref(), resolution.as_deref(), *star),
    }
}

fn verify_digits(
    base: u64,
    m: u32,
    exhaustive_limit: u64,
    samples: u64,
    seed: u64,
) -> Result<RunOutput> {
    use equilens_core::digits::verify_group_axioms;

    if m == 0 {
        return Err(Error::argument("--m must be >= 1"));
    }
    // Keep the order-multiset enumeration exhaustible.
    const MULTISET_LIMIT: u64 = 1 << 20;
    let partitions = enumerate_partitions(m);
    let mut rows = Vec::with_capacity(partitions.len());
    let mut multisets = Vec::with_capacity(partitions.len());
    let mut all_passed = true;
    for partition in &partitions {
        let spec = AdditionSpec::new(base, partition.clone())?;
        let order = spec.group_order()?;
        if order > MULTISET_LIMIT as u128 {
            return Err(Error::resource(
                format!("group order {order} exceeds the enumeration budget"),
                None,
            ));
        }
        let report = verify_group_axioms(&spec, exhaustive_limit, samples, seed)?;
        let multiset = spec.order_multiset(MULTISET_LIMIT)?;
        all_passed &= report.passed();
        rows.push(json!({
            "partition": partition.parts(),
            "group_order": order.to_string(),
            "exhaustive": report.exhaustive,
            "triples_checked": report.triples_checked,
            "passed": report.passed(),
            "order_multiset": multiset
                .iter()
                .map(|(ord, count)| (ord.to_string(), json!(count)))
                .collect::<serde_json::Map<String, Value>>(),
        }));
        multisets.push(multiset);
    }
    let mut distinct = true;
    for i in 0..multisets.len() {
        for j in (i + 1)..multisets.len() {
            if multisets[i] == multisets[j] {
                distinct = false;
            }
        }
    }
    let passed = all_passed && distinct;
    let record = json!({
        "schema": "1",
        "verify": "digits",
        "base": base,
        "m": m,
        "partitions": rows,
        "order_multisets_distinct": distinct,
        "passed": passed,
    });
    Ok(RunOutput {
        text: render_json(record),
        passed,
    })
}

fn verify_sloan_kachoyan(
    seq: &str,
    box_bound: u64,
    tol: f64,
    exec: &ThreadExecutor,
) -> Result<RunOutput> {
    let seq = parse_seq(seq)?;
    let Some(rule) = seq.lattice.as_ref() else {
        return Err(Error::argument(
            "sloan-kachoyan verifies a lattice rule; --seq must be glp:a1,...,as@N",
        ));
    };
    let report = sloan_kachoyan_check(rule, box_bound, exec)?;
    let passed = report.max_error <= tol;
    let record = json!({
        "schema": "1",
        "verify": "sloan-kachoyan",
        "seq": seq.describe(),
        "box_bound": box_bound,
        "tol": tol,
        "max_error": report.max_error,
        "worst_k": report.worst_k,
        "checked": report.checked,
        "duals": report.duals,
        "passed": passed,
    });
    Ok(RunOutput {
        text: render_json(record),
        passed,
    })
}

fn verify_sandwich(
    seq: &str,
    n: Option<u64>,
    base: Option<&[u64]>,
    resolution: Option<&[u32]>,
    star: bool,
) -> Result<RunOutput> {
    let seq = parse_seq(seq)?;
    let dim = seq.dim();
    let count = match (n, seq.len()) {
        (Some(n), _) => n,
        (None, Some(len)) => len,
        (None, None) => {
            return Err(Error::argument(
                "this sequence has no intrinsic length; pass --N",
            ))
        }
    };
    let Some(resolution) = resolution else {
        return Err(Error::argument("verify sandwich needs --resolution"));
    };
    let res = Resolution::new(
        broadcast(base, &[2], dim, "--base")?,
        broadcast(Some(resolution), &[], dim, "--resolution")?,
    )?;
    if star && dim != 1 {
        return Err(Error::argument(
            "the star oracle exists in dimension 1 only",
        ));
    }
    if !star && (dim > 3 || count > 64) {
        return Err(Error::argument(
            "the extreme oracle is gated to s <= 3 and N <= 64",
        ));
    }

    let pts = seq.points(count)?;
    let opts = DiscrepancyOptions::default();
    let (discrete, oracle_exact, oracle_value) = if star {
        let d = discrete_star_discrepancy(&pts, pts.len(), &res, &opts)?;
        let o = exact_star_discrepancy_1d(&pts, pts.len())?;
        (d, o.exact, o.value)
    } else {
        let d = discrete_discrepancy(&pts, pts.len(), &res, &opts)?;
        let o = exact_extreme_discrepancy_small(&pts, pts.len(), &opts)?;
        (d, o.exact, o.value)
    };
    let eps = epsilon_bounds(&res)?;
    let eps_exact = if star {
        eps.star_exact.clone()
    } else {
        eps.extreme_exact.clone()
    };
    let lower_ok = discrete.exact() <= oracle_exact;
    let upper_ok = oracle_exact <= discrete.exact() + eps_exact.clone();
    let passed = lower_ok && upper_ok;
    let record = json!({
        "schema": "1",
        "verify": "sandwich",
        "seq": seq.describe(),
        "N": count,
        "base": res.bases(),
        "resolution": res.exponents(),
        "star": star,
        "discrete": discrete.value,
        "discrete_exact": discrete.exact().to_string(),
        "oracle": oracle_value,
        "oracle_exact": oracle_exact.to_string(),
        "epsilon": if star { eps.star } else { eps.extreme },
        "epsilon_exact": eps_exact.to_string(),
        "lower_ok": lower_ok,
        "upper_ok": upper_ok,
        "passed": passed,
    });
    Ok(RunOutput {
        text: render_json(record),
        passed,
    })
}

// ---------------------------------------------------------------------------
// points
// ---------------------------------------------------------------------------

fn run_points(args: &PointsArgs) -> Result<RunOutput> {
    let seq = parse_seq(&args.seq)?;
    let count = match (args.n, seq.len()) {
        (Some(n), _) => n,
        (None, Some(len)) => len,
        (None, None) => {
            return Err(Error::argument(
                "this sequence has no intrinsic length; pass --N",
            ))
        }
    };
    let pts = seq.points(count)?;
    let mut text = String::new();
    for p in &pts {
        let coords: Vec<String> = p
            .coords()
            .iter()
            .map(|c| c.to_rational().to_string())
            .collect();
        text.push_str(&coords.join(" "));
        text.push('\n');
    }
    Ok(RunOutput { text, passed: true })
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

/// Pretty JSON with sorted keys (the map type is ordered), so identical
/// requests render byte-identical records.
fn render_json(record: Value) -> String {
    let mut text = serde_json::to_string_pretty(&record).expect("JSON rendering cannot fail");
    text.push('\n');
    text
}

/// Maps an error to its process exit code: invalid or unsupported
/// requests exit 2, exceeded search budgets exit 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Argument(_) | Error::Capability(_) => 2,
        Error::ResourceLimit { .. } => 3,
    }
}
