use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Hermitian matrix `G[i][j] = K(z_i, z_j)` together with its points and kernel.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub points: Vec<Complex64>,
    pub entries: DMatrix<Complex64>,
    pub spec: KernelSpec,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|d| d.re).sum()
    }

    /// Same points in a different order: `perm[k]` is the old index of new row `k`.
    pub fn permuted(&self, perm: &[usize]) -> GramMatrix {
        let n = self.len();
        GramMatrix {
            points: perm.iter().map(|&k| self.points[k]).collect(),
            entries: DMatrix::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]),
            spec: self.spec,
        }
    }
}

/// Assembles the Gram matrix from the upper triangle and mirrors it, so the
/// result is exactly Hermitian with a real diagonal.
pub fn gram(spec: &KernelSpec, points: &[Complex64]) -> Result<GramMatrix> {
    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            spec.eval(points[i], points[j])
                .map_err(|e| Error::GramEntry { row: i, col: j, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;

    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        if i == j {
            entries[(i, i)] = Complex64::new(v.re, 0.0);
        } else {
            entries[(i, j)] = v;
            entries[(j, i)] = v.conj();
        }
    }
    Ok(GramMatrix { points: points.to_vec(), entries, spec: *spec })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub passes: bool,
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Passes iff `λ_min ≥ -rel_tol · |trace|`.
pub fn psd_check(g: &GramMatrix, rel_tol: f64) -> PsdReport {
    let min_eigenvalue = min_eigenvalue(&g.entries);
    let trace = g.trace();
    PsdReport { min_eigenvalue, trace, passes: min_eigenvalue >= -rel_tol * trace.abs() }
}
