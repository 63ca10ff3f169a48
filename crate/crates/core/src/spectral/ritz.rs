use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{DiscreteHamiltonian, WaveFunction};
use crate::par;

/// Modified Gram-Schmidt (two passes), dropping vectors that collapse below
/// `drop` relative to their incoming norm.
pub(crate) fn orthonormalize(
    vs: Vec<WaveFunction>,
    against: &[WaveFunction],
    drop: f64,
) -> Vec<WaveFunction> {
    let mut out: Vec<WaveFunction> = Vec::with_capacity(vs.len());
    for mut v in vs {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            v.project_out(against);
            v.project_out(&out);
        }
        let n = v.norm();
        if n > drop * n0 {
            out.push(v.scaled(1.0 / n));
        }
    }
    out
}

/// Ritz pairs of `op` on the span of an orthonormal `basis`, ascending.
pub(crate) struct Ritz {
    pub values: Vec<f64>,
    pub vectors: Vec<WaveFunction>,
    pub applied: Vec<WaveFunction>,
}

pub(crate) fn rayleigh_ritz(op: &DiscreteHamiltonian, basis: &[WaveFunction]) -> Result<Ritz> {
    let hb: Vec<WaveFunction> = par::try_map_range(basis.len(), |i| op.apply(&basis[i]))?;
    let m = basis.len();
    let mut mat = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let z = basis[i].inner(&hb[j]);
            let w = basis[j].inner(&hb[i]).conj();
            let v = 0.5 * (z + w);
            mat[(i, j)] = v;
            mat[(j, i)] = v.conj();
        }
    }
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let combine = |src: &[WaveFunction], k: usize| {
        let mut acc = WaveFunction::zeros(*src[0].grid());
        for (i, v) in src.iter().enumerate() {
            acc.add_scaled(eig.eigenvectors[(i, k)], v);
        }
        acc
    };
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order.iter().map(|&k| combine(basis, k)).collect();
    let applied = order.iter().map(|&k| combine(&hb, k)).collect();
    Ok(Ritz {
        values,
        vectors,
        applied,
    })
}
