use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Gauss-Kronrod 7/15 on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod integration to an absolute tolerance, bisecting
/// the interval with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_evals: usize,
) -> Result<(f64, f64)> {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    let mut evals = 15;
    loop {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol {
            return Ok((total, err));
        }
        if evals + 30 > max_evals {
            return Err(Error::QuadratureTolerance {
                tol: abs_tol,
                achieved: err,
            });
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
        evals += 30;
    }
}

/// `(1/pi) int_0^inf s^{-1/2} k^2 / (s + k^2) ds`, which equals `|k|`.
///
/// The range is split at `s = k^2`. On `[0, k^2]` the substitution `s = u^2`
/// removes the endpoint singularity; on the tail `s = k^2 / v^2` maps it to
/// `(0, 1]`. Both pieces are smooth and bounded.
pub fn sqrt_lemma_eval(k: f64, tol: f64) -> Result<f64> {
    if k < 0.0 || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be a nonnegative number"
        )));
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    let k2 = k * k;
    // each piece is k * pi / 2; split the budget evenly
    let abs_tol = 0.25 * tol * k * std::f64::consts::PI;
    let (head, _) = integrate(|u| 2.0 * k2 / (u * u + k2), 0.0, k, abs_tol, 20_000)?;
    let (tail, _) = integrate(|v| 2.0 * k / (1.0 + v * v), 0.0, 1.0, abs_tol, 20_000)?;
    Ok((head + tail) / std::f64::consts::PI)
}

/// Closed-form `min_p ((p + s)^2 / 4 + |p - s| / 2)`.
pub fn continuum_edge(s: f64) -> f64 {
    if s.abs() <= 0.5 {
        s * s
    } else {
        s.abs() - 0.25
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        let (v, _) = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, 1e-13, 1000).unwrap();
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x: f64| x.abs().sqrt().recip(), -1.0, 1.0, 1e-14, 200);
        assert!(matches!(r, Err(Error::QuadratureTolerance { .. })));
    }

    #[test]
    fn edge_branches() {
        assert_eq!(continuum_edge(0.25), 0.0625);
        assert_eq!(continuum_edge(2.0), 1.75);
        assert_eq!(continuum_edge(0.5), 0.25);
        assert_eq!(continuum_edge(-2.0), 1.75);
    }
}
