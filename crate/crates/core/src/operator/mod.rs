//! Finite sections of Toeplitz, Hankel and rank-one operators, FFT application,
//! singular values, and the identity verifier.

mod identity;
mod long;
mod window;

use nalgebra::DMatrix;

pub use identity::{
    adjudicate, dilation_dense, identity_residual, identity_suite, Adjudication, DenseResidual, IdentityId,
    IdentityInputs, ResidualReport,
};
pub use long::{hankel_apply, toeplitz_apply, Kind, LongOperator};
pub use window::{Provenance, WindowedOperator, SPILL_TOL};

use crate::error::Result;
use crate::symbol::{CoeffVector, Symbol};
use crate::C64;

/// Singular values in nonincreasing order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values of the `N × N` Hankel section of `f`, nonincreasing.
pub fn hankel_svd(f: &Symbol, n: usize) -> Result<Vec<f64>> {
    Ok(WindowedOperator::hankel(f, n.max(1))?.singular_values())
}

/// Operator norm of `Σ_t l_t ⊗ r_t`.
///
/// With `L = [l_t]` and `R = [r_t]` the operator is `L R^H`; thin QR of both sides
/// reduces it to the small core `R_L R_R^H` without forming Gram matrices.
pub fn finite_rank_norm(lefts: &[CoeffVector], rights: &[CoeffVector]) -> f64 {
    assert_eq!(lefts.len(), rights.len());
    if lefts.is_empty() {
        return 0.0;
    }
    let stack = |vs: &[CoeffVector]| {
        let n = vs.iter().map(CoeffVector::len).max().unwrap_or(0).max(1);
        DMatrix::from_fn(n, vs.len(), |i, t| vs[t].entries.get(i).copied().unwrap_or_default())
    };
    let (l, r) = (stack(lefts), stack(rights));
    let rl = l.qr().r();
    let rr = r.qr().r();
    spectral_norm(&(rl * rr.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Laurent;

    #[test]
    fn finite_rank_norm_matches_dense() {
        let v = |seed: f64, n: usize| {
            CoeffVector::exact(
                (0..n).map(|i| C64::new((seed * (i + 1) as f64).sin(), (seed + i as f64).cos())).collect(),
            )
        };
        let lefts = vec![v(0.3, 12), v(1.7, 12), v(2.2, 12)];
        let rights = vec![v(0.9, 12), v(0.4, 12), v(3.1, 12)];
        let mut dense = DMatrix::zeros(12, 12);
        for (l, r) in lefts.iter().zip(&rights) {
            dense += WindowedOperator::rank_one(l, r, 12).matrix;
        }
        assert!((finite_rank_norm(&lefts, &rights) - spectral_norm(&dense)).abs() < 1e-12);
        // More terms than dimensions.
        let many: Vec<_> = (0..20).map(|s| v(s as f64 * 0.37 + 0.1, 5)).collect();
        let mut dense = DMatrix::zeros(5, 5);
        for (l, r) in many.iter().zip(many.iter().rev()) {
            dense += WindowedOperator::rank_one(l, r, 5).matrix;
        }
        let rev: Vec<_> = many.iter().rev().cloned().collect();
        assert!((finite_rank_norm(&many, &rev) - spectral_norm(&dense)).abs() < 1e-11);
    }

    #[test]
    fn hankel_svd_of_zbar_and_analytic() {
        let s = hankel_svd(&Symbol::zbar(), 8).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1..].iter().all(|x| x.abs() < 1e-15));
        let a = Symbol::polynomial(Laurent::new(0, vec![C64::new(1.0, 0.0); 4]));
        assert!(hankel_svd(&a, 8).unwrap().iter().all(|x| *x == 0.0));
    }
}
