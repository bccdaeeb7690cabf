//! Single-row operators. All arithmetic is done in f64 and narrowed to f32.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{AugmentPlan, Method};
use crate::error::{Error, Result};

fn check_dims(xs: &[&[f32]]) -> Result<()> {
    let d = xs[0].len();
    if xs.iter().any(|x| x.len() != d) {
        let dims: Vec<usize> = xs.iter().map(|x| x.len()).collect();
        return Err(Error::Shape(format!("operand dimensions differ: {dims:?}")));
    }
    Ok(())
}

/// Midpoint of two same-class examples.
pub fn interpolate_pair(xi: &[f32], xj: &[f32]) -> Result<Vec<f32>> {
    check_dims(&[xi, xj])?;
    Ok(xi
        .iter()
        .zip(xj)
        .map(|(&a, &b)| (0.5 * (a as f64 + b as f64)) as f32)
        .collect())
}

/// Extrapolation along the line through two same-class examples.
///
/// The default form is `lambda * (xi - xj) + xi`, which moves away from `xj`
/// past `xi`. `literal_form` selects `lambda * (xi + xj) - xi` instead.
pub fn within_extrapolate_pair(
    xi: &[f32],
    xj: &[f32],
    lambda: f64,
    literal_form: bool,
) -> Result<Vec<f32>> {
    check_dims(&[xi, xj])?;
    Ok(xi
        .iter()
        .zip(xj)
        .map(|(&a, &b)| {
            let (a, b) = (a as f64, b as f64);
            let v = if literal_form {
                lambda * (a + b) - a
            } else {
                lambda * (a - b) + a
            };
            v as f32
        })
        .collect())
}

/// `(xi - xj) + xk`.
pub fn linear_delta(xi: &[f32], xj: &[f32], xk: &[f32]) -> Result<Vec<f32>> {
    check_dims(&[xi, xj, xk])?;
    Ok(xi
        .iter()
        .zip(xj)
        .zip(xk)
        .map(|((&a, &b), &c)| ((a as f64 - b as f64) + c as f64) as f32)
        .collect())
}

/// Adds i.i.d. per-element noise: uniform on `plan.uniform_bounds` or Gaussian
/// with `plan.gaussian_params`.
pub fn noise_augment<R: Rng + ?Sized>(
    x: &[f32],
    plan: &AugmentPlan,
    rng: &mut R,
) -> Result<Vec<f32>> {
    match plan.method {
        Method::UniformNoise => {
            let (a, b) = plan.uniform_bounds;
            Ok(x.iter()
                .map(|&v| {
                    let u: f64 = rng.random();
                    (v as f64 + a + (b - a) * u) as f32
                })
                .collect())
        }
        Method::GaussianNoise => {
            let (mu, sigma) = plan.gaussian_params;
            let normal = Normal::new(mu, sigma)
                .map_err(|e| Error::Plan(format!("gaussian parameters: {e}")))?;
            Ok(x.iter()
                .map(|&v| (v as f64 + normal.sample(rng)) as f32)
                .collect())
        }
        m => Err(Error::Plan(format!("{m} is not a noise method"))),
    }
}
