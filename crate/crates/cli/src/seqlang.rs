//! Mini-language for naming point sequences on the command line.
//!
//! A sequence spec is one of
//!
//! ```text
//! halton:2,3,5               Halton points in the listed bases
//! kron:golden,sqrt:2,0.25    Kronecker rotation by the listed alphas
//! glp:1,13@21                rank-1 lattice nodes {n*(1,13)/21}
//! file:PATH                  points loaded from a text file
//! hybrid:(SPEC)+(SPEC)+...   coordinate-wise concatenation
//! ```
//!
//! Kronecker alphas are `golden` (the inverse golden ratio), `sqrt:m`
//! (the fractional part of `sqrt(m)`), or a decimal literal. Parsing also
//! derives the *natural* function system for the sequence — Walsh in the
//! matching base for Halton coordinates, trigonometric for everything
//! else — which `analyze` uses when no system is given explicitly.

use equilens_core::error::{Error, Result};
use equilens_core::lattice::LatticeRule;
use equilens_core::padic::SystemComponent;
use equilens_core::points::Point;
use equilens_core::sequences::{AlphaSpec, Sequence};

use crate::pointfile;

/// Where the points of a resolved spec come from.
pub enum SeqSource {
    /// A generator that can produce any requested prefix.
    Generated(Sequence),
    /// A finite list loaded from a file.
    File { path: String, points: Vec<Point> },
}

/// A parsed sequence spec, ready to produce points.
pub struct ResolvedSeq {
    pub source: SeqSource,
    /// One component per coordinate: the function system this sequence is
    /// naturally analyzed under.
    pub natural_system: Vec<SystemComponent>,
    /// Set when the whole spec is a single `glp:` rule, for the measures
    /// that act on the rule itself rather than on its points.
    pub lattice: Option<LatticeRule>,
    spec: String,
}

impl ResolvedSeq {
    /// Number of coordinates per point.
    pub fn dim(&self) -> usize {
        match &self.source {
            SeqSource::Generated(seq) => seq.dim(),
            SeqSource::File { points, .. } => points[0].dim(),
        }
    }

    /// Intrinsic length, when the source is finite: the modulus for `glp:`,
    /// the point count for `file:`, the shortest finite part for hybrids.
    #[allow(clippy::len_without_is_empty)] // Option-valued: no emptiness notion
    pub fn len(&self) -> Option<u64> {
        match &self.source {
            SeqSource::Generated(seq) => seq.len(),
            SeqSource::File { points, .. } => Some(points.len() as u64),
        }
    }

    /// The first `count` points.
    pub fn points(&self, count: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Err(Error::argument("point count must be >= 1"));
        }
        match &self.source {
            SeqSource::Generated(seq) => seq.points(count),
            SeqSource::File { path, points } => {
                if count > points.len() as u64 {
                    return Err(Error::argument(format!(
                        "requested {count} points but `{path}` holds only {}",
                        points.len()
                    )));
                }
                Ok(points[..count as usize].to_vec())
            }
        }
    }

    /// The spec string as given (normalized only by trimming).
    pub fn describe(&self) -> &str {
        &self.spec
    }
}

/// Parses a sequence spec, loading `file:` sources from disk.
pub fn parse_seq(spec: &str) -> Result<ResolvedSeq> {
    let spec = spec.trim();
    let part = parse_part(spec, true)?;
    Ok(ResolvedSeq {
        source: part.source,
        natural_system: part.natural_system,
        lattice: part.lattice,
        spec: spec.to_string(),
    })
}

struct ParsedPart {
    source: SeqSource,
    natural_system: Vec<SystemComponent>,
    lattice: Option<LatticeRule>,
}

impl ParsedPart {
    fn plain(source: SeqSource, natural_system: Vec<SystemComponent>) -> Self {
        ParsedPart {
            source,
            natural_system,
            lattice: None,
        }
    }
}

fn parse_part(spec: &str, allow_compound: bool) -> Result<ParsedPart> {
    let Some((kind, body)) = spec.split_once(':') else {
        return Err(Error::argument(format!(
            "sequence spec `{spec}` has no `kind:` prefix \
             (expected halton:, kron:, glp:, file:, or hybrid:)"
        )));
    };
    match kind {
        "halton" => {
            let bases = parse_u64_list(body, "halton base")?;
            let natural = bases
                .iter()
                .map(|&b| SystemComponent::Walsh { base: b })
                .collect();
            Ok(ParsedPart::plain(
                SeqSource::Generated(Sequence::halton(bases)?),
                natural,
            ))
        }
        "kron" => {
            let alphas: Vec<AlphaSpec> = body
                .split(',')
                .map(parse_alpha)
                .collect::<Result<Vec<_>>>()?;
            let natural = vec![SystemComponent::Trig; alphas.len()];
            Ok(ParsedPart::plain(
                SeqSource::Generated(Sequence::kronecker(alphas)?),
                natural,
            ))
        }
        "glp" => {
            let Some((gen, modulus)) = body.split_once('@') else {
                return Err(Error::argument(format!(
                    "glp spec `{spec}` needs the form glp:a1,...,as@N"
                )));
            };
            let a = parse_u64_list(gen, "lattice generator entry")?;
            let n: u64 = modulus.trim().parse().map_err(|_| {
                Error::argument(format!("cannot parse lattice modulus `{modulus}`"))
            })?;
            let natural = vec![SystemComponent::Trig; a.len()];
            let rule = LatticeRule::new(n, a)?;
            Ok(ParsedPart {
                source: SeqSource::Generated(Sequence::glp(rule.clone())),
                natural_system: natural,
                lattice: Some(rule),
            })
        }
        "file" => {
            let path = body.trim();
            if path.is_empty() {
                return Err(Error::argument("file spec needs a path: file:PATH"));
            }
            let points = pointfile::load_points(path)?;
            let natural = vec![SystemComponent::Trig; points[0].dim()];
            Ok(ParsedPart::plain(
                SeqSource::File {
                    path: path.to_string(),
                    points,
                },
                natural,
            ))
        }
        "hybrid" => {
            if !allow_compound {
                return Err(Error::argument(
                    "hybrid: parts cannot themselves be hybrid:",
                ));
            }
            let groups = split_groups(body)?;
            let mut parts = Vec::with_capacity(groups.len());
            let mut natural = Vec::new();
            for group in &groups {
                let mut part = parse_part(group, false)?;
                match part.source {
                    SeqSource::Generated(seq) => parts.push(seq),
                    SeqSource::File { .. } => {
                        return Err(Error::argument(
                            "file: sources cannot appear inside hybrid: \
                             (only generators compose)",
                        ));
                    }
                }
                natural.append(&mut part.natural_system);
            }
            Ok(ParsedPart::plain(
                SeqSource::Generated(Sequence::hybrid(parts)?),
                natural,
            ))
        }
        other => Err(Error::argument(format!(
            "unknown sequence kind `{other}:` \
             (expected halton:, kron:, glp:, file:, or hybrid:)"
        ))),
    }
}

/// Splits `(A)+(B)+(C)` into `["A", "B", "C"]`, honoring nesting depth.
fn split_groups(body: &str) -> Result<Vec<String>> {
    let malformed =
        || Error::argument(format!("hybrid spec `{body}` needs the form (SPEC)+(SPEC)"));
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    let mut chars = body.trim().chars().peekable();
    loop {
        match chars.next() {
            Some('(') => {
                if depth > 0 {
                    current.push('(');
                }
                depth += 1;
            }
            Some(')') => {
                if depth == 0 {
                    return Err(malformed());
                }
                depth -= 1;
                if depth == 0 {
                    groups.push(current.trim().to_string());
                    current = String::new();
                    match chars.next() {
                        Some('+') => {
                            if chars.peek() != Some(&'(') {
                                return Err(malformed());
                            }
                        }
                        None => break,
                        Some(_) => return Err(malformed()),
                    }
                } else {
                    current.push(')');
                }
            }
            Some(c) if depth > 0 => current.push(c),
            Some(_) => return Err(malformed()),
            None => {
                if depth != 0 {
                    return Err(malformed());
                }
                break;
            }
        }
    }
    if groups.len() < 2 || groups.iter().any(String::is_empty) {
        return Err(malformed());
    }
    Ok(groups)
}

fn parse_u64_list(body: &str, what: &str) -> Result<Vec<u64>> {
    body.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| Error::argument(format!("cannot parse {what} `{tok}`")))
        })
        .collect()
}

fn parse_alpha(token: &str) -> Result<AlphaSpec> {
    let token = token.trim();
    if token == "golden" {
        return Ok(AlphaSpec::Golden);
    }
    if let Some(m) = token.strip_prefix("sqrt:") {
        let m: u64 = m.trim().parse().map_err(|_| {
            Error::argument(format!("cannot parse sqrt argument in alpha `{token}`"))
        })?;
        return Ok(AlphaSpec::Sqrt(m));
    }
    let v: f64 = token.parse().map_err(|_| {
        Error::argument(format!(
            "cannot parse alpha `{token}` \
             (expected golden, sqrt:m, or a decimal literal)"
        ))
    })?;
    Ok(AlphaSpec::Literal(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_spec_round_trip() {
        let seq = parse_seq("halton:2,3").unwrap();
        assert_eq!(seq.dim(), 2);
        assert_eq!(seq.len(), None);
        assert_eq!(
            seq.natural_system,
            vec![
                SystemComponent::Walsh { base: 2 },
                SystemComponent::Walsh { base: 3 }
            ]
        );
        let pts = seq.points(4).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].coord(0).to_f64(), 0.5);
    }

    #[test]
    fn glp_spec_has_intrinsic_length_and_exposes_its_rule() {
        let seq = parse_seq("glp:1,13@21").unwrap();
        assert_eq!(seq.len(), Some(21));
        assert_eq!(seq.natural_system, vec![SystemComponent::Trig; 2]);
        let rule = seq.lattice.as_ref().unwrap();
        assert_eq!(rule.modulus(), 21);
        assert_eq!(rule.generator(), &[1, 13]);
        // ... but only top-level rules are exposed.
        let hybrid = parse_seq("hybrid:(glp:1@5)+(kron:golden)").unwrap();
        assert!(hybrid.lattice.is_none());
    }

    #[test]
    fn kron_alpha_forms() {
        assert_eq!(parse_alpha("golden").unwrap(), AlphaSpec::Golden);
        assert_eq!(parse_alpha(" sqrt:2 ").unwrap(), AlphaSpec::Sqrt(2));
        assert_eq!(parse_alpha("0.25").unwrap(), AlphaSpec::Literal(0.25));
        assert!(parse_alpha("1/3").is_err());
        let seq = parse_seq("kron:golden,sqrt:2").unwrap();
        assert_eq!(seq.dim(), 2);
    }

    #[test]
    fn hybrid_spec_concatenates_coordinates() {
        let seq = parse_seq("hybrid:(halton:2)+(kron:golden)").unwrap();
        assert_eq!(seq.dim(), 2);
        assert_eq!(
            seq.natural_system,
            vec![SystemComponent::Walsh { base: 2 }, SystemComponent::Trig]
        );
    }

    #[test]
    fn malformed_specs_are_argument_errors() {
        for bad in [
            "halton",
            "powers:2",
            "glp:1,2",
            "glp:1,2@x",
            "hybrid:(halton:2)",
            "hybrid:(halton:2)+kron:golden",
            "hybrid:(halton:2)+(hybrid:(kron:golden)+(kron:golden))",
            "kron:sqrt:",
        ] {
            match parse_seq(bad) {
                Err(Error::Argument(_)) => {}
                Ok(_) => panic!("spec `{bad}` parsed but should be an argument error"),
                Err(other) => panic!("spec `{bad}` gave the wrong error kind: {other}"),
            }
        }
    }
}
