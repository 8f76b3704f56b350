//! One-dimensional quadrature and polynomial interpolation helpers, all in `f64`.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|t| half * t).collect())
}

/// Barycentric weights for distinct nodes in `[0, 1]`, normalized to unit max modulus.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut logs = vec![0.0; n];
    let mut signs = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = 4.0 * (nodes[i] - nodes[j]);
                logs[i] -= d.abs().ln();
                if d < 0.0 {
                    signs[i] = -signs[i];
                }
            }
        }
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().zip(&signs).map(|(l, s)| s * (l - top).exp()).collect()
}

/// Values of every Lagrange basis polynomial at `x`, written into `out`.
pub fn lagrange_row(nodes: &[f64], bary: &[f64], x: f64, out: &mut [f64]) {
    if let Some(hit) = nodes.iter().position(|&t| t == x) {
        out.iter_mut().for_each(|o| *o = 0.0);
        out[hit] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for ((o, &t), &w) in out.iter_mut().zip(nodes).zip(bary) {
        *o = w / (x - t);
        denom += *o;
    }
    out.iter_mut().for_each(|o| *o /= denom);
}

/// Row-major first-derivative matrix of the interpolant through `nodes`.
pub fn differentiation_matrix(nodes: &[f64], bary: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_high_degree_polynomials() {
        let (x, w) = gauss_legendre(20);
        for deg in 0..40 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn large_rules_have_unit_weight_sum() {
        for n in [64, 129, 256] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn differentiation_is_exact_on_polynomials() {
        let (x, _) = gauss_legendre_on(12, 0.0, 1.0);
        let mut nodes = x;
        nodes.push(1.0);
        let bary = barycentric_weights(&nodes);
        let d = differentiation_matrix(&nodes, &bary);
        let n = nodes.len();
        let f: Vec<f64> = nodes.iter().map(|t| t.powi(7) - 3.0 * t * t).collect();
        for i in 0..n {
            let got: f64 = (0..n).map(|j| d[i * n + j] * f[j]).sum();
            let want = 7.0 * nodes[i].powi(6) - 6.0 * nodes[i];
            assert!((got - want).abs() < 1e-11);
        }
        let mut row = vec![0.0; n];
        lagrange_row(&nodes, &bary, 0.3, &mut row);
        let interp: f64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((interp - (0.3f64.powi(7) - 0.27)).abs() < 1e-13);
    }
}
