use crate::error::{Error, Result};

/// Samples of a radial profile on a uniform mesh, interpolated with
/// Catmull-Rom cubics and taken as zero outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl TabulatedProfile {
    fn sample(&self, i: isize) -> f64 {
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Value and first two derivatives at `u`.
    fn eval(&self, u: f64) -> (f64, f64, f64) {
        let s = (u - self.start) / self.step;
        let i = s.floor() as isize;
        if i < -1 || i >= self.values.len() as isize {
            return (0.0, 0.0, 0.0);
        }
        let t = s - i as f64;
        let (p0, p1, p2, p3) = (
            self.sample(i - 1),
            self.sample(i),
            self.sample(i + 1),
            self.sample(i + 2),
        );
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = -0.5 * p0 + 0.5 * p2;
        let d = p1;
        let v = ((a * t + b) * t + c) * t + d;
        let dv = (3.0 * a * t + 2.0 * b) * t + c;
        let ddv = 6.0 * a * t + 2.0 * b;
        (v, dv / self.step, ddv / (self.step * self.step))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFamily {
    Zero,
    /// `-V0 sech^2((u - c) / w)`
    PoschlTeller,
    /// `-V0 exp(-((u - c) / w)^2)`
    GaussianWell,
    /// Interpolated table in `u - c`; `strength` only scales the decay check.
    Tabulated(TabulatedProfile),
}

/// A one-dimensional pair potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub strength: f64,
    pub width: f64,
    pub center: f64,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self {
            family: PotentialFamily::Zero,
            strength: 0.0,
            width: 1.0,
            center: 0.0,
        }
    }

    pub fn poschl_teller(strength: f64, width: f64) -> Self {
        Self {
            family: PotentialFamily::PoschlTeller,
            strength,
            width,
            center: 0.0,
        }
    }

    pub fn gaussian_well(strength: f64, width: f64) -> Self {
        Self {
            family: PotentialFamily::GaussianWell,
            strength,
            width,
            center: 0.0,
        }
    }

    pub fn tabulated(profile: TabulatedProfile) -> Self {
        let strength = profile.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            family: PotentialFamily::Tabulated(profile),
            strength,
            width: 1.0,
            center: 0.0,
        }
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.family, PotentialFamily::Zero) || self.strength == 0.0
    }

    /// `(V, V', V'')` at `u`.
    pub fn derivatives(&self, u: f64) -> (f64, f64, f64) {
        let v0 = self.strength;
        let w = self.width;
        let t = (u - self.center) / w;
        match &self.family {
            PotentialFamily::Zero => (0.0, 0.0, 0.0),
            PotentialFamily::PoschlTeller => {
                if t.abs() > 350.0 {
                    return (0.0, 0.0, 0.0);
                }
                let sech = 1.0 / t.cosh();
                let s2 = sech * sech;
                let th = t.tanh();
                (
                    -v0 * s2,
                    2.0 * v0 * s2 * th / w,
                    2.0 * v0 / (w * w) * s2 * (s2 - 2.0 * th * th),
                )
            }
            PotentialFamily::GaussianWell => {
                let e = (-t * t).exp();
                (
                    -v0 * e,
                    2.0 * v0 * t * e / w,
                    2.0 * v0 / (w * w) * (1.0 - 2.0 * t * t) * e,
                )
            }
            PotentialFamily::Tabulated(p) => p.eval(u - self.center),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.derivatives(u).0
    }

    pub fn gradient(&self, u: f64) -> f64 {
        self.derivatives(u).1
    }

    /// `u V'(u)`, the dilation derivative.
    pub fn virial(&self, u: f64) -> f64 {
        u * self.gradient(u)
    }

    /// `u d/du (u V'(u)) = u V' + u^2 V''`.
    pub fn second_virial(&self, u: f64) -> f64 {
        let (_, d1, d2) = self.derivatives(u);
        u * d1 + u * u * d2
    }

    /// Reject parameters that are not finite, and profiles that have not
    /// decayed below `1e-10 * V0` on the shell `|u| in [0.95 L, L]`.
    pub fn check_decay(&self, half_extent: f64) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        if !(self.strength.is_finite() && self.width > 0.0 && self.center.is_finite()) {
            return Err(Error::InvalidPotential(format!("{self:?}")));
        }
        let limit = 1e-10 * self.strength.abs();
        for i in 0..=32 {
            let u = half_extent * (0.95 + 0.05 * i as f64 / 32.0);
            for v in [self.value(u), self.value(-u)] {
                if v.abs() >= limit {
                    return Err(Error::InvalidPotential(format!(
                        "|V({u:.3})| = {:e} is not below {limit:e} at the grid boundary",
                        v.abs()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, u: f64) -> f64 {
        let h = 1e-5;
        (f(u + h) - f(u - h)) / (2.0 * h)
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let fams = [
            PotentialSpec::poschl_teller(2.0, 1.3).with_center(0.4),
            PotentialSpec::gaussian_well(1.5, 0.7),
        ];
        for p in &fams {
            for &u in &[-2.0, -0.3, 0.0, 0.9, 1.7] {
                let (_, d1, d2) = p.derivatives(u);
                assert!((d1 - fd(|x| p.value(x), u)).abs() < 1e-8);
                assert!((d2 - fd(|x| p.gradient(x), u)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn tabulated_interpolates_nodes() {
        let values: Vec<f64> = (0..41)
            .map(|i| {
                let u = -4.0 + 0.2 * i as f64;
                -(-u * u).exp()
            })
            .collect();
        let p = PotentialSpec::tabulated(TabulatedProfile {
            start: -4.0,
            step: 0.2,
            values: values.clone(),
        });
        assert!((p.value(-4.0 + 0.2 * 17.0) - values[17]).abs() < 1e-14);
        assert!((p.value(0.1) + (-0.01f64).exp()).abs() < 2e-3);
        assert!((p.gradient(0.5) - fd(|x| p.value(x), 0.5)).abs() < 1e-6);
        assert_eq!(p.value(10.0), 0.0);
    }

    #[test]
    fn decay_is_enforced_on_the_boundary_shell() {
        assert!(PotentialSpec::poschl_teller(2.0, 1.0)
            .check_decay(16.0)
            .is_ok());
        assert!(PotentialSpec::poschl_teller(2.0, 1.0)
            .check_decay(8.0)
            .is_err());
        assert!(PotentialSpec::gaussian_well(2.0, 1.0)
            .check_decay(6.0)
            .is_ok());
        assert!(PotentialSpec::zero().check_decay(1.0).is_ok());
    }
}
