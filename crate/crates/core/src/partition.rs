//! Smooth configuration-space partition of unity `sum_a j_a^2 = 1`
//! subordinate to the channel regions.
//!
//! On the unit circle of `X = (x, y)` four open sets are covered by
//! polynomial-smoothed bumps `chi_a`:
//!
//! | cluster | set |
//! |---|---|
//! | `(x)(y0)` | `|y| < 1/20, |x| > 1/10` |
//! | `(y)(x0)` | `|x| < 1/20, |y| > 1/10` |
//! | `(xy)(0)` | `|x| > 1/30, |y| > 1/30, |x - y| < 1/10` |
//! | `(x)(y)(0)` | `|x| > 1/30, |y| > 1/30, |x - y| > 1/20` |
//!
//! The bumps are extended with degree-0 homogeneity, multiplied by a radial
//! cutoff `chi1` that vanishes inside radius 0.9 and is 1 outside radius 1,
//! and completed by `j_(xy0) = chi0 = 1 - chi1` before normalizing.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lattice::{ClusterId, CoordTag, GridSpec, ThreeBodyModel, WaveFunction};
use crate::par;

/// Order in which the members are stored.
pub const MEMBERS: [ClusterId; 5] = [
    ClusterId::Bound,
    ClusterId::PhotonFree,
    ClusterId::ElectronFree,
    ClusterId::Pair,
    ClusterId::Free,
];

/// Support constants `C0..C11`.
pub const SUPPORT_CONSTANTS: [f64; 12] = [
    1.0 / 10.0,
    1.0 / 20.0,
    1.0 / 20.0,
    1.0 / 10.0,
    1.0 / 20.0,
    1.0 / 20.0,
    1.0 / 30.0,
    1.0 / 30.0,
    1.0 / 10.0,
    1.0 / 30.0,
    1.0 / 30.0,
    1.0 / 20.0,
];

pub const DEFAULT_SMOOTHING: f64 = 0.005;
/// Smallest gap between the constants defining the sets.
pub const MAX_SMOOTHING: f64 = 1.0 / 60.0;
const INNER_RADIUS: f64 = 0.9;
const OUTER_RADIUS: f64 = 1.0;

/// `-20t^7 + 70t^6 - 84t^5 + 35t^4` clamped to `[0, 1]`.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    }
}

/// 1 below `c - w`, 0 from `c` on.
fn below(u: f64, c: f64, w: f64) -> f64 {
    1.0 - smoothstep((u - (c - w)) / w)
}

/// 0 up to `c`, 1 from `c + w` on.
fn above(u: f64, c: f64, w: f64) -> f64 {
    smoothstep((u - c) / w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSet {
    pub smoothing: f64,
    pub constants: [f64; 12],
    pub inner_radius: f64,
}

impl PartitionSet {
    /// Bumps `chi_a` at a point of the unit circle, in [`MEMBERS`] order
    /// (the `(xy0)` entry is unused).
    fn bumps(&self, x: f64, y: f64) -> [f64; 5] {
        let w = self.smoothing;
        let (ax, ay, ad) = (x.abs(), y.abs(), (x - y).abs());
        [
            0.0,
            below(ax, 1.0 / 20.0, w) * above(ay, 1.0 / 10.0, w),
            below(ay, 1.0 / 20.0, w) * above(ax, 1.0 / 10.0, w),
            above(ax, 1.0 / 30.0, w) * above(ay, 1.0 / 30.0, w) * below(ad, 1.0 / 10.0, w),
            above(ax, 1.0 / 30.0, w) * above(ay, 1.0 / 30.0, w) * above(ad, 1.0 / 20.0, w),
        ]
    }

    /// `(j_(xy0), j_(y)(x0), j_(x)(y0), j_(xy)(0), j_(x)(y)(0))` at `X`.
    pub fn values(&self, x: f64, y: f64) -> [f64; 5] {
        let r = x.hypot(y);
        let chi1 = smoothstep((r - self.inner_radius) / (OUTER_RADIUS - self.inner_radius));
        let mut t = if r > 0.0 {
            self.bumps(x / r, y / r)
        } else {
            [0.0; 5]
        };
        for v in t.iter_mut().skip(1) {
            *v *= chi1;
        }
        t[0] = 1.0 - chi1;
        let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        t.map(|v| v / norm)
    }

    pub fn value(&self, a: ClusterId, x: f64, y: f64) -> f64 {
        let i = MEMBERS.iter().position(|&m| m == a).unwrap();
        self.values(x, y)[i]
    }

    /// Does `j_a` vanish wherever its support inequalities fail?
    fn support_ok(&self, a: ClusterId, x: f64, y: f64, value: f64) -> bool {
        if value == 0.0 {
            return true;
        }
        let c = &self.constants;
        let r = x.hypot(y);
        let (ax, ay, ad) = (x.abs(), y.abs(), (x - y).abs());
        match a {
            ClusterId::Bound => r < OUTER_RADIUS,
            ClusterId::ElectronFree => ax > c[0] * r && ay < c[1] * r && ad > c[2] * r,
            ClusterId::PhotonFree => ay > c[3] * r && ax < c[4] * r && ad > c[5] * r,
            ClusterId::Pair => ax > c[6] * r && ay > c[7] * r && ad < c[8] * r,
            ClusterId::Free => ax > c[9] * r && ay > c[10] * r && ad > c[11] * r,
        }
    }
}

/// Build the partition; fails if the smoothed bumps leave a direction uncovered.
pub fn build_partition(smoothing: f64) -> Result<PartitionSet> {
    if !(smoothing > 0.0 && smoothing < MAX_SMOOTHING) {
        return Err(Error::InvalidParameter(format!(
            "smoothing width {smoothing} must lie in (0, 1/60)"
        )));
    }
    let p = PartitionSet {
        smoothing,
        constants: SUPPORT_CONSTANTS,
        inner_radius: INNER_RADIUS,
    };
    const DIRECTIONS: usize = 200_000;
    for i in 0..DIRECTIONS {
        let th = std::f64::consts::TAU * i as f64 / DIRECTIONS as f64;
        let (y, x) = th.sin_cos();
        if p.bumps(x, y).iter().all(|&b| b <= 0.0) {
            return Err(Error::CoverFailure { x, y });
        }
    }
    Ok(p)
}

/// Members sampled on a 2-particle grid, in [`MEMBERS`] order.
#[derive(Debug, Clone)]
pub struct PartitionFields {
    pub grid: GridSpec,
    pub fields: Vec<Vec<f64>>,
}

impl PartitionFields {
    pub fn sample(p: &PartitionSet, grid: &GridSpec) -> Result<Self> {
        grid.ensure_particles(2)?;
        let rows = par::map_range(grid.len(), |i| {
            let [x, y] = grid.site(i);
            p.values(x, y)
        });
        let fields = (0..MEMBERS.len())
            .map(|m| rows.iter().map(|r| r[m]).collect())
            .collect();
        Ok(Self {
            grid: *grid,
            fields,
        })
    }

    pub fn field(&self, a: ClusterId) -> &[f64] {
        &self.fields[MEMBERS.iter().position(|&m| m == a).unwrap()]
    }

    pub fn field_mut(&mut self, a: ClusterId) -> &mut Vec<f64> {
        &mut self.fields[MEMBERS.iter().position(|&m| m == a).unwrap()]
    }

    /// One member as a real-valued wavefunction (for the binary dump).
    pub fn as_wavefunction(&self, a: ClusterId) -> WaveFunction {
        let amps = self
            .field(a)
            .iter()
            .map(|&v| num_complex::Complex64::new(v, 0.0))
            .collect();
        WaveFunction::new(self.grid, amps).expect("field has one value per site")
    }
}

#[derive(Debug, Clone, Default)]
pub struct PartitionReport {
    pub sites: usize,
    /// `max |sum j_a^2 - 1|` over grid nodes.
    pub max_sum_defect: f64,
    pub range_violations: usize,
    pub support_violations: usize,
    /// `max |j_a(lambda X) - j_a(X)|` for `|X| >= 1`, `lambda` in `{2, 3.5, 10}`.
    pub homogeneity_defect: f64,
    /// Per member: `(R, R * max_{|X| = R} |grad j_a|)`.
    pub gradient_scaling: Vec<(ClusterId, Vec<(f64, f64)>)>,
    /// Per two-cluster member: `(R, max over rays of |I_a j_a|)`.
    pub ray_decay: Vec<(ClusterId, Vec<(f64, f64)>)>,
    pub violations: Vec<String>,
}

impl PartitionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV `metric,cluster,parameter,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "metric,cluster,parameter,value")?;
        writeln!(w, "sites,all,,{}", self.sites)?;
        writeln!(w, "max_sum_defect,all,,{:?}", self.max_sum_defect)?;
        writeln!(w, "range_violations,all,,{}", self.range_violations)?;
        writeln!(w, "support_violations,all,,{}", self.support_violations)?;
        writeln!(w, "homogeneity_defect,all,,{:?}", self.homogeneity_defect)?;
        for (a, rows) in &self.gradient_scaling {
            for (r, v) in rows {
                writeln!(w, "gradient_times_radius,{},{r:?},{v:?}", a.label())?;
            }
        }
        for (a, rows) in &self.ray_decay {
            for (r, v) in rows {
                writeln!(w, "ray_decay,{},{r:?},{v:?}", a.label())?;
            }
        }
        writeln!(w, "violations,all,,{}", self.violations.len())?;
        Ok(())
    }
}

const SUM_TOLERANCE: f64 = 1e-12;

/// Check sampled members against the partition's exact properties.
pub fn verify_fields(
    p: &PartitionSet,
    fields: &PartitionFields,
    model: &ThreeBodyModel,
) -> PartitionReport {
    let grid = fields.grid;
    let mut rep = PartitionReport {
        sites: grid.len(),
        ..Default::default()
    };
    for i in 0..grid.len() {
        let [x, y] = grid.site(i);
        let mut sum = 0.0;
        for (m, &a) in MEMBERS.iter().enumerate() {
            let v = fields.fields[m][i];
            sum += v * v;
            if !(0.0..=1.0).contains(&v) {
                rep.range_violations += 1;
            }
            if !p.support_ok(a, x, y, v) {
                rep.support_violations += 1;
            }
        }
        rep.max_sum_defect = rep.max_sum_defect.max((sum - 1.0).abs());
    }
    if rep.max_sum_defect > SUM_TOLERANCE {
        rep.violations
            .push(format!("sum of squares off by {:e}", rep.max_sum_defect));
    }
    if rep.range_violations > 0 {
        rep.violations
            .push(format!("{} values outside [0, 1]", rep.range_violations));
    }
    if rep.support_violations > 0 {
        rep.violations
            .push(format!("{} support violations", rep.support_violations));
    }

    const RAYS: usize = 32;
    let ray = |k: usize| {
        let th = std::f64::consts::TAU * (k as f64 + 0.37) / RAYS as f64;
        let (s, c) = th.sin_cos();
        (c, s)
    };
    for k in 0..256 {
        let th = std::f64::consts::TAU * (k as f64 + 0.5) / 256.0;
        let (s, c) = th.sin_cos();
        for r in [1.0, 1.7, 4.0] {
            let base = p.values(r * c, r * s);
            for lam in [2.0, 3.5, 10.0] {
                let scaled = p.values(lam * r * c, lam * r * s);
                for (u, v) in base.iter().zip(&scaled) {
                    rep.homogeneity_defect = rep.homogeneity_defect.max((u - v).abs());
                }
            }
        }
    }
    if rep.homogeneity_defect > SUM_TOLERANCE {
        rep.violations
            .push(format!("homogeneity defect {:e}", rep.homogeneity_defect));
    }

    let radii = [2.0, 4.0, 8.0, 16.0];
    for (m, &a) in MEMBERS.iter().enumerate() {
        let mut rows = Vec::new();
        for &r in &radii {
            let h = 1e-6 * r;
            let mut worst = 0.0f64;
            for k in 0..4096 {
                let th = std::f64::consts::TAU * (k as f64 + 0.5) / 4096.0;
                let (s, c) = th.sin_cos();
                let (x, y) = (r * c, r * s);
                let gx = (p.values(x + h, y)[m] - p.values(x - h, y)[m]) / (2.0 * h);
                let gy = (p.values(x, y + h)[m] - p.values(x, y - h)[m]) / (2.0 * h);
                worst = worst.max(gx.hypot(gy));
            }
            rows.push((r, r * worst));
        }
        let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| {
            (l.min(r.1), h.max(r.1))
        });
        if hi > 0.0 && hi > 1.05 * lo {
            rep.violations.push(format!(
                "{a}: R |grad j| not constant ({lo:.4e} .. {hi:.4e})"
            ));
        }
        rep.gradient_scaling.push((a, rows));
    }

    for &a in &ClusterId::TWO_CLUSTER {
        let inter = model.inter(a);
        let m = MEMBERS.iter().position(|&b| b == a).unwrap();
        let mut rows = Vec::new();
        for r in [25.0, 50.0, 100.0, 200.0, 400.0] {
            let mut worst = 0.0f64;
            for k in 0..RAYS {
                let (c, s) = ray(k);
                let (x, y) = (r * c, r * s);
                let i_a: f64 = inter
                    .iter()
                    .map(|(v, tag)| {
                        let u = match tag {
                            CoordTag::X | CoordTag::Internal => x,
                            CoordTag::Y => y,
                            CoordTag::XMinusY => x - y,
                        };
                        v.value(u)
                    })
                    .sum();
                worst = worst.max((i_a * p.values(x, y)[m]).abs());
            }
            rows.push((r, worst));
        }
        if rows.last().unwrap().1 > 1e-8 {
            rep.violations
                .push(format!("{a}: I_a j_a does not decay along rays"));
        }
        rep.ray_decay.push((a, rows));
    }
    rep
}

/// Sample the partition on `grid` and verify it.
pub fn verify_partition(
    p: &PartitionSet,
    grid: &GridSpec,
    model: &ThreeBodyModel,
) -> Result<(PartitionFields, PartitionReport)> {
    let fields = PartitionFields::sample(p, grid)?;
    let report = verify_fields(p, &fields, model);
    Ok((fields, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_monotone_and_flat_at_ends() {
        let mut last = 0.0;
        for i in 0..=100 {
            let v = smoothstep(i as f64 / 100.0);
            assert!(v >= last);
            last = v;
        }
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert!(smoothstep(1e-3) < 1e-10 && 1.0 - smoothstep(1.0 - 1e-3) < 1e-10);
    }

    #[test]
    fn deep_channel_points() {
        let p = build_partition(DEFAULT_SMOOTHING).unwrap();
        assert_eq!(p.value(ClusterId::ElectronFree, 50.0, 0.0), 1.0);
        assert_eq!(p.value(ClusterId::PhotonFree, 0.0, -7.0), 1.0);
        assert_eq!(p.value(ClusterId::Pair, 5.0, 5.0), 1.0);
        assert_eq!(p.value(ClusterId::Bound, 0.1, 0.2), 1.0);
    }

    #[test]
    fn smoothing_must_fit_inside_the_margins() {
        assert!(build_partition(0.05).is_err());
        assert!(build_partition(0.0).is_err());
    }
}
