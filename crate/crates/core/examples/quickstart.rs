//! The quick-start example from the workspace README.

use equilens_core::error::Result;
use equilens_core::exec::Sequential;
use equilens_core::measures::{spectral_test, SpectralOptions};
use equilens_core::padic::HybridSystemConfig;
use equilens_core::sequences::Sequence;
use equilens_core::weights::ProductWeight;

fn main() -> Result<()> {
    let seq = Sequence::halton(vec![2, 3])?;
    let pts = seq.points(256)?;
    let system = HybridSystemConfig::blocks(&[2], &[3], 0)?; // Walsh(2) x b-adic(3)
    let weight = ProductWeight::digit_length(&[2, 3], system.signature())?;
    let r = spectral_test(
        &pts,
        pts.len(),
        &system,
        &weight,
        &SpectralOptions::default(),
        &Sequential,
    )?;
    println!("sigma_N = {} at k = {:?}", r.value, r.argmax);
    Ok(())
}
