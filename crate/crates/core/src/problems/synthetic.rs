use super::libsvm::{LabeledData, Sample};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Two Gaussian classes `N(+-separation * mu, I)` in `d` dimensions, with
/// `mu = (1, ..., 1) / sqrt(d)`. Labels alternate `+1, -1, ...`, so the
/// classes differ in size by at most one.
pub fn generate_synthetic_classification(
    d: usize,
    n: usize,
    separation: f64,
    stream: &mut RandomStream,
) -> Result<LabeledData> {
    if d == 0 || n == 0 {
        return Err(Error::invalid("dimension and sample count must be positive"));
    }
    if !separation.is_finite() {
        return Err(Error::invalid("separation must be finite"));
    }
    let mu = 1.0 / (d as f64).sqrt();
    let samples = (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { 1.0 } else { -1.0 };
            let values = (0..d)
                .map(|_| label * separation * mu + stream.standard_normal())
                .collect();
            Sample {
                label,
                indices: (0..d).collect(),
                values,
            }
        })
        .collect();
    Ok(LabeledData { dim: d, samples })
}

/// Unit direction separating the synthetic classes.
pub fn synthetic_direction(d: usize) -> crate::Vector {
    crate::Vector::from_element(d, 1.0 / (d as f64).sqrt())
}
