use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::lattice::{
    apply_multiplier_field, DiscreteHamiltonian, GridSpec, HamiltonianSpec, WaveFunction,
};

const COEFF_FLOOR: f64 = 1e-13;
const MAX_TERMS: usize = 1 << 20;

/// Smoothed indicator of `[lo, hi]`: an erf-edged box whose edges sit half
/// a window width outside the window, with edge scale `width / sharpness`.
pub fn filter_response(e: f64, lo: f64, hi: f64, sharpness: f64) -> f64 {
    let w = hi - lo;
    let sigma = w / sharpness;
    0.5 * (libm::erf((e - lo + 0.5 * w) / sigma) - libm::erf((e - hi - 0.5 * w) / sigma))
}

/// Chebyshev expansion of [`filter_response`] for one sampled operator.
#[derive(Debug, Clone)]
pub struct SpectralFilter {
    op: DiscreteHamiltonian,
    pub window: (f64, f64),
    pub sharpness: f64,
    /// Padded spectral interval the expansion lives on.
    pub bounds: (f64, f64),
    pub coefficients: Vec<f64>,
    /// Exact momentum-space response when the operator has no potential.
    diagonal: Option<Vec<f64>>,
}

/// A filtered state with the filter's own diagnostics.
#[derive(Debug, Clone)]
pub struct FilteredState {
    pub state: WaveFunction,
    /// `||f(H)^2 psi - f(H) psi|| / ||psi||`, when requested.
    pub idempotence_defect: Option<f64>,
}

impl SpectralFilter {
    pub fn new(
        h: &HamiltonianSpec,
        grid: &GridSpec,
        window: (f64, f64),
        sharpness: f64,
    ) -> Result<Self> {
        Self::from_operator(h.discretize(grid)?, window, sharpness)
    }

    pub fn from_operator(
        op: DiscreteHamiltonian,
        window: (f64, f64),
        sharpness: f64,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidWindow(format!("({lo}, {hi}) is empty")));
        }
        if !(sharpness > 0.0) {
            return Err(Error::InvalidParameter(format!("sharpness {sharpness}")));
        }
        let (smin, smax) = op.spectral_bounds();
        let pad = 0.01 * (smax - smin).max(1e-12);
        let bounds = (smin - pad, smax + pad);
        if lo <= bounds.0 || hi >= bounds.1 {
            return Err(Error::InvalidWindow(format!(
                "({lo}, {hi}) is not inside the operator range ({:.6}, {:.6})",
                bounds.0, bounds.1
            )));
        }
        let coefficients =
            chebyshev_coefficients(|e| filter_response(e, lo, hi, sharpness), bounds);
        let diagonal = op.potential.iter().all(|v| *v == 0.0).then(|| {
            op.kinetic
                .iter()
                .map(|&k| filter_response(k, lo, hi, sharpness))
                .collect()
        });
        Ok(Self {
            op,
            window,
            sharpness,
            bounds,
            coefficients,
            diagonal,
        })
    }

    pub fn operator(&self) -> &DiscreteHamiltonian {
        &self.op
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn response(&self, e: f64) -> f64 {
        filter_response(e, self.window.0, self.window.1, self.sharpness)
    }

    /// `f(H) psi` by the three-term Chebyshev recurrence, or as a Fourier
    /// multiplier when `H` is a pure kinetic operator.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.op.grid.ensure_same(psi.grid())?;
        if let Some(d) = &self.diagonal {
            return Ok(apply_multiplier_field(psi, d));
        }
        let (a, b) = self.bounds;
        let e = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let scaled = |v: &WaveFunction| -> Result<WaveFunction> {
            let mut hv = self.op.apply(v)?;
            hv.add_scaled(Complex64::new(-c, 0.0), v);
            Ok(hv.scaled(1.0 / e))
        };
        let coef = &self.coefficients;
        let mut out = psi.clone().scaled(0.5 * coef[0]);
        if coef.len() == 1 {
            return Ok(out);
        }
        let mut prev = psi.clone();
        let mut cur = scaled(psi)?;
        out.add_scaled(Complex64::new(coef[1], 0.0), &cur);
        for &ck in &coef[2..] {
            let mut next = scaled(&cur)?.scaled(2.0);
            next.add_scaled(Complex64::new(-1.0, 0.0), &prev);
            out.add_scaled(Complex64::new(ck, 0.0), &next);
            prev = cur;
            cur = next;
        }
        Ok(out)
    }

    /// Apply and optionally measure the idempotence defect (one extra application).
    pub fn filter(&self, psi: &WaveFunction, check_idempotence: bool) -> Result<FilteredState> {
        let state = self.apply(psi)?;
        let idempotence_defect = if check_idempotence {
            let twice = self.apply(&state)?;
            Some(twice.sub(&state).norm() / psi.norm())
        } else {
            None
        };
        Ok(FilteredState {
            state,
            idempotence_defect,
        })
    }
}

/// Chebyshev coefficients `c_k` of `f` on `[a, b]` with `f ~ c_0/2 + sum c_k T_k`,
/// from a DCT-II of `f` at the Chebyshev nodes, truncated below `1e-13`.
pub(crate) fn chebyshev_coefficients<F: Fn(f64) -> f64>(f: F, (a, b): (f64, f64)) -> Vec<f64> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut k = 64;
    loop {
        let c = dct_coefficients(&f, k, half, mid);
        let tail = c[k - k / 8..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if tail < COEFF_FLOOR || k >= MAX_TERMS {
            let last = c.iter().rposition(|x| x.abs() >= COEFF_FLOOR).unwrap_or(0);
            return c[..=last].to_vec();
        }
        k *= 2;
    }
}

fn dct_coefficients<F: Fn(f64) -> f64>(f: &F, k: usize, half: f64, mid: f64) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * k];
    for j in 0..k {
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / k as f64;
        let v = f(mid + half * theta.cos());
        buf[j] = Complex64::new(v, 0.0);
        buf[2 * k - 1 - j] = Complex64::new(v, 0.0);
    }
    FftPlanner::new().plan_fft_forward(2 * k).process(&mut buf);
    (0..k)
        .map(|n| {
            let phase =
                Complex64::from_polar(1.0, -std::f64::consts::PI * n as f64 / (2.0 * k as f64));
            (phase * buf[n]).re / k as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_series_reproduces_the_response() {
        let (a, b) = (-3.0, 20.0);
        let c = chebyshev_coefficients(|e| filter_response(e, 0.9, 1.1, 6.0), (a, b));
        for &e in &[-2.0, 0.5, 0.8, 0.95, 1.0, 1.15, 1.4, 10.0] {
            let t: f64 = (2.0 * e - a - b) / (b - a);
            let s: f64 = c
                .iter()
                .enumerate()
                .map(|(k, ck)| {
                    if k == 0 {
                        0.5 * ck
                    } else {
                        ck * (k as f64 * t.acos()).cos()
                    }
                })
                .sum();
            assert!((s - filter_response(e, 0.9, 1.1, 6.0)).abs() < 1e-11, "{e}");
        }
    }
}
