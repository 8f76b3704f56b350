//! Fixed-point driver shared by the linear and nonlinear solvers.

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::scalar::Real;

/// Iterates `g ← (1 − λ) g + λ F(g)` until the L² step drops below
/// `threshold(g)`.
pub(crate) struct Picard<T: Real> {
    pub g: ComplexField<T>,
    pub iterations: usize,
    pub steps: Vec<f64>,
}

pub(crate) fn iterate<T: Real>(
    g0: ComplexField<T>,
    max_iterations: usize,
    damping: f64,
    threshold: impl Fn(&ComplexField<T>) -> f64,
    mut update: impl FnMut(&ComplexField<T>) -> Result<ComplexField<T>>,
) -> Result<Picard<T>> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidArgument(format!("damping must lie in (0, 1], got {damping}")));
    }
    let lambda = T::lit(damping);
    let mut g = g0;
    let mut steps = Vec::new();
    for it in 1..=max_iterations {
        let f = update(&g)?;
        let next = if damping == 1.0 { f } else { g.zip_with(&f, |a, b| a + (b - a) * lambda)? };
        let step = next.l2_distance(&g)?.to_f64_lossy();
        g = next;
        steps.push(step);
        if !step.is_finite() || step > 1e8 * steps[0].max(1.0) {
            return Err(non_contraction(it, &steps));
        }
        if step < threshold(&g) {
            return Ok(Picard { g, iterations: it, steps });
        }
    }
    Err(non_contraction(max_iterations, &steps))
}

fn non_contraction(iterations: usize, steps: &[f64]) -> Error {
    let last = steps.last().copied().unwrap_or(f64::NAN);
    let previous = if steps.len() >= 2 { steps[steps.len() - 2] } else { f64::NAN };
    Error::NonContraction { iterations, previous, last }
}

/// Geometric mean of successive step ratios, skipping the first step (it
/// measures the distance from the initial guess) and steps already at the
/// round-off floor.
pub(crate) fn contraction_factor(steps: &[f64]) -> f64 {
    let floor = steps.first().copied().unwrap_or(0.0) * 1e-11;
    let usable: Vec<f64> = steps.iter().skip(1).copied().take_while(|&s| s > floor).collect();
    match usable.len() {
        0 | 1 => {
            if steps.len() >= 2 && steps[0] > 0.0 {
                steps[1] / steps[0]
            } else {
                0.0
            }
        }
        n => (usable[n - 1] / usable[0]).powf(1.0 / (n - 1) as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_of_geometric_sequence() {
        let steps: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        assert!((contraction_factor(&steps) - 0.5).abs() < 1e-12);
        assert_eq!(contraction_factor(&[1.0]), 0.0);
    }
}
