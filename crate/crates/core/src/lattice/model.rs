use super::{ClusterId, CoordTag, DispersionSymbol, HamiltonianSpec, PotentialSpec};
use crate::error::Result;

/// Electron at `x` (kinetic `p^2`), photon at `y` (kinetic `|k|`), fixed
/// center at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeBodyModel {
    /// Electron-center potential, `V12(x)`.
    pub v12: PotentialSpec,
    /// Photon-center potential, `V13(y)`.
    pub v13: PotentialSpec,
    /// Electron-photon potential, `V23(x - y)`.
    pub v23: PotentialSpec,
}

impl Default for ThreeBodyModel {
    fn default() -> Self {
        Self {
            v12: PotentialSpec::poschl_teller(2.0, 1.0),
            v13: PotentialSpec::zero(),
            v23: PotentialSpec::poschl_teller(2.0, 1.0),
        }
    }
}

impl ThreeBodyModel {
    pub fn free() -> Self {
        Self {
            v12: PotentialSpec::zero(),
            v13: PotentialSpec::zero(),
            v23: PotentialSpec::zero(),
        }
    }

    /// `H0 = p^2 + |k|`.
    pub fn free_hamiltonian(&self) -> HamiltonianSpec {
        HamiltonianSpec::new(DispersionSymbol::free_two_particle())
    }

    /// `H = H0 + V12(x) + V13(y) + V23(x - y)`.
    pub fn full_hamiltonian(&self) -> HamiltonianSpec {
        self.free_hamiltonian()
            .with_potential(self.v12.clone(), CoordTag::X)
            .with_potential(self.v13.clone(), CoordTag::Y)
            .with_potential(self.v23.clone(), CoordTag::XMinusY)
    }

    /// Intra-cluster potentials `I^a` with their tags.
    pub fn intra(&self, a: ClusterId) -> Vec<(PotentialSpec, CoordTag)> {
        let all = [
            (self.v12.clone(), CoordTag::X),
            (self.v13.clone(), CoordTag::Y),
            (self.v23.clone(), CoordTag::XMinusY),
        ];
        let keep: &[usize] = match a {
            ClusterId::Bound => &[0, 1, 2],
            ClusterId::PhotonFree => &[0],
            ClusterId::ElectronFree => &[1],
            ClusterId::Pair => &[2],
            ClusterId::Free => &[],
        };
        keep.iter()
            .map(|&i| all[i].clone())
            .filter(|(v, _)| !v.is_zero())
            .collect()
    }

    /// Inter-cluster potentials `I_a = H - H_a`.
    pub fn inter(&self, a: ClusterId) -> Vec<(PotentialSpec, CoordTag)> {
        let intra = self.intra(a);
        self.full_hamiltonian()
            .potentials
            .into_iter()
            .filter(|p| !intra.contains(p))
            .collect()
    }

    /// Truncated Hamiltonian `H_a = H0 + I^a` on the 2-particle grid.
    pub fn truncated(&self, a: ClusterId) -> HamiltonianSpec {
        let mut h = self.free_hamiltonian();
        h.potentials = self.intra(a);
        h
    }

    /// The potential acting inside a two-cluster subsystem.
    pub fn subsystem_potential(&self, a: ClusterId) -> Result<&PotentialSpec> {
        a.ensure_two_cluster()?;
        Ok(match a {
            ClusterId::PhotonFree => &self.v12,
            ClusterId::ElectronFree => &self.v13,
            _ => &self.v23,
        })
    }

    /// Fibered Hamiltonian `H_a(s)` on a 1-particle grid whose coordinate is
    /// the internal coordinate `x^a`.
    ///
    /// For `(xy)(0)` the grid momentum `q` is canonical to `x - y`, so the
    /// chart momentum `p - k` equals `2q`.
    pub fn reduced(&self, a: ClusterId, s: f64) -> Result<HamiltonianSpec> {
        let v = self.subsystem_potential(a)?.clone();
        let symbol = match a {
            ClusterId::PhotonFree => DispersionSymbol::Sum(vec![
                DispersionSymbol::quadratic(1.0, 0),
                DispersionSymbol::Constant(s.abs()),
            ]),
            ClusterId::ElectronFree => DispersionSymbol::Sum(vec![
                DispersionSymbol::Constant(s * s),
                DispersionSymbol::absolute(1.0, 0),
            ]),
            _ => DispersionSymbol::Sum(vec![
                DispersionSymbol::ShiftedQuadratic {
                    coef: 0.25,
                    scale: 2.0,
                    shift: s,
                    axis: 0,
                },
                DispersionSymbol::ShiftedAbsolute {
                    coef: 0.5,
                    scale: 2.0,
                    shift: s,
                    axis: 0,
                },
            ]),
        };
        Ok(HamiltonianSpec::new(symbol).with_potential(v, CoordTag::Internal))
    }

    /// Subsystem Hamiltonian `h_a = H_a(0)`.
    pub fn subsystem(&self, a: ClusterId) -> Result<HamiltonianSpec> {
        self.reduced(a, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intra_and_inter_partition_the_potentials() {
        let m = ThreeBodyModel {
            v13: PotentialSpec::gaussian_well(1.0, 1.0),
            ..ThreeBodyModel::default()
        };
        for a in ClusterId::ALL {
            assert_eq!(m.intra(a).len() + m.inter(a).len(), 3, "{a}");
        }
        assert_eq!(m.truncated(ClusterId::Free).potentials.len(), 0);
        assert!(m.reduced(ClusterId::Free, 0.0).is_err());
    }

    #[test]
    fn reduced_pair_symbol_at_zero_shift() {
        let m = ThreeBodyModel::default();
        let h = m.subsystem(ClusterId::Pair).unwrap();
        // (1/4)(2q)^2 + (1/2)|2q| = q^2 + |q|
        assert!((h.symbol.eval([0.7, 0.0]) - (0.49 + 0.7)).abs() < 1e-15);
        let h = m.reduced(ClusterId::ElectronFree, 0.3).unwrap();
        assert!((h.symbol.eval([0.0, 0.0]) - 0.09).abs() < 1e-15);
    }
}
