use nalgebra::DMatrix;
use serde::Serialize;

use super::long::{Kind, LongOperator};
use crate::error::{Error, Result};
use crate::symbol::{CoeffVector, Side, Symbol};
use crate::C64;

/// ℓ¹ tail below which a non-polynomial symbol counts as polynomial for spill purposes.
pub const SPILL_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Identity,
    Toeplitz,
    Hankel,
    RankOne,
    Adjoint,
    Composition,
    Combination,
    Definition,
}

/// `N × N` finite section of an operator on H² (degrees `0..N` in and out).
#[derive(Debug, Clone)]
pub struct WindowedOperator {
    pub matrix: DMatrix<C64>,
    /// Degree of the generating symbol (effective degree for non-polynomial symbols):
    /// the block is exact on inputs supported at degrees `≤ N - 1 - spill_degree`.
    /// `None` when no finite degree certifies it (arc indicators).
    pub spill_degree: Option<usize>,
    /// How far the operator can push the top degree of its input upward; the quantity
    /// that actually shrinks certified windows of compositions.
    pub raise: Option<usize>,
    /// `raise` of the adjoint.
    pub adjoint_raise: Option<usize>,
    pub provenance: Provenance,
    source: Option<(Kind, Symbol)>,
}

fn extent(f: &Symbol, side: Side) -> Option<usize> {
    f.effective_extent(side, SPILL_TOL).map(|d| d as usize)
}

impl WindowedOperator {
    pub fn size(&self) -> usize {
        self.matrix.ncols()
    }

    /// `entry(m, k) = ĉ(m - k)`.
    pub fn toeplitz(f: &Symbol, n: usize) -> Result<Self> {
        f.require_certifiable()?;
        assert!(n >= 1);
        let c = f.coeff_range(-(n as i64 - 1), 2 * n - 1);
        let matrix = DMatrix::from_fn(n, n, |m, k| c[m + n - 1 - k]);
        let (pos, neg) = (extent(f, Side::Pos), extent(f, Side::Neg));
        Ok(Self {
            matrix,
            spill_degree: pos.zip(neg).map(|(p, q)| p.max(q)),
            raise: pos,
            adjoint_raise: neg,
            provenance: Provenance::Toeplitz,
            source: Some((Kind::Toeplitz, f.clone())),
        })
    }

    /// `entry(m, k) = ĉ(-m - k - 1)`.
    pub fn hankel(f: &Symbol, n: usize) -> Result<Self> {
        f.require_certifiable()?;
        assert!(n >= 1);
        let c = f.coeff_range(-(2 * n as i64 - 1), 2 * n - 1);
        // c[j] is the coefficient at degree j - (2n - 1); we need degree -(m + k + 1).
        let matrix = DMatrix::from_fn(n, n, |m, k| c[2 * n - 2 - m - k]);
        let neg = extent(f, Side::Neg);
        let spill = match f.as_polynomial() {
            Some(p) => Some(p.degree() as usize),
            None => neg.zip(extent(f, Side::Pos)).map(|(a, b)| a.max(b)),
        };
        Ok(Self {
            matrix,
            spill_degree: spill,
            raise: neg,
            adjoint_raise: neg,
            provenance: Provenance::Hankel,
            source: Some((Kind::Hankel, f.clone())),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(DMatrix::identity(n, n), Provenance::Identity, Some(0), Some(0))
    }

    /// `(x ⊗ y) h = ⟨h, y⟩ x` restricted to the window.
    pub fn rank_one(x: &CoeffVector, y: &CoeffVector, n: usize) -> Self {
        let (x, y) = (x.window(n), y.window(n));
        let matrix = DMatrix::from_fn(n, n, |m, k| x.entries[m] * y.entries[k].conj());
        // Inside a composition the range is not degree-local, so it never certifies a shift.
        Self::from_matrix(matrix, Provenance::RankOne, None, None)
    }

    pub fn from_matrix(
        matrix: DMatrix<C64>,
        provenance: Provenance,
        raise: Option<usize>,
        adjoint_raise: Option<usize>,
    ) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "windows are square");
        Self { matrix, spill_degree: raise, raise, adjoint_raise, provenance, source: None }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            spill_degree: self.spill_degree,
            raise: self.adjoint_raise,
            adjoint_raise: self.raise,
            provenance: Provenance::Adjoint,
            source: None,
        }
    }

    /// Product `self · other` of the two finite sections.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::IncompatibleWindows { expected: self.size(), found: other.size() });
        }
        let add = |a: Option<usize>, b: Option<usize>| a.zip(b).map(|(a, b)| a + b);
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            spill_degree: add(self.spill_degree, other.spill_degree),
            raise: add(self.raise, other.raise),
            adjoint_raise: add(self.adjoint_raise, other.adjoint_raise),
            provenance: Provenance::Composition,
            source: None,
        })
    }

    /// `Σ s_i A_i` of same-size blocks.
    pub fn combine(terms: &[(C64, &WindowedOperator)]) -> Result<Self> {
        let n = terms.first().map(|t| t.1.size()).ok_or_else(|| Error::Invalid("empty combination".into()))?;
        let mut matrix = DMatrix::zeros(n, n);
        let mut raise = Some(0);
        let mut adj = Some(0);
        for (s, a) in terms {
            if a.size() != n {
                return Err(Error::IncompatibleWindows { expected: n, found: a.size() });
            }
            matrix += &a.matrix * *s;
            raise = raise.zip(a.raise).map(|(x, y)| x.max(y));
            adj = adj.zip(a.adjoint_raise).map(|(x, y)| x.max(y));
        }
        Ok(Self::from_matrix(matrix, Provenance::Combination, raise, adj))
    }

    pub fn apply_dense(&self, v: &CoeffVector) -> Result<CoeffVector> {
        if v.len() != self.size() {
            return Err(Error::IncompatibleWindows { expected: self.size(), found: v.len() });
        }
        let x = nalgebra::DVector::from_column_slice(&v.entries);
        let y = &self.matrix * x;
        // Any bound on the operator norm will do; the symbol's sup norm is free, Frobenius is cheap.
        let tail = if v.tail_bound > 0.0 {
            let norm = self.source.as_ref().map_or_else(|| self.matrix.norm(), |(_, f)| f.sup_norm_bound());
            norm * v.tail_bound
        } else {
            0.0
        };
        Ok(CoeffVector::new(y.iter().copied().collect(), tail))
    }

    /// Matrix-vector product through a circulant embedding for Toeplitz and Hankel
    /// blocks, dense otherwise. The output tail bound accounts for the input tail and
    /// for the rows the window cuts off.
    pub fn fast_apply(&self, v: &CoeffVector) -> Result<CoeffVector> {
        if v.len() != self.size() {
            return Err(Error::IncompatibleWindows { expected: self.size(), found: v.len() });
        }
        match &self.source {
            Some((kind, f)) => Ok(LongOperator::new(*kind, f, self.size(), self.size())?.apply(v)),
            None => self.apply_dense(v),
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        super::singular_values(&self.matrix)
    }

    pub fn op_norm(&self) -> f64 {
        super::spectral_norm(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{kernel_vector, DiskPoint, Laurent};

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn basic_blocks() {
        let t = WindowedOperator::toeplitz(&Symbol::constant(one()), 5).unwrap();
        assert_eq!(t.matrix, DMatrix::identity(5, 5));
        let s = WindowedOperator::toeplitz(&Symbol::z(), 4).unwrap();
        for m in 0..4 {
            for k in 0..4 {
                assert_eq!(s.matrix[(m, k)], if m == k + 1 { one() } else { C64::new(0.0, 0.0) });
            }
        }
        let h = WindowedOperator::hankel(&Symbol::zbar(), 4).unwrap();
        assert_eq!(h.matrix[(0, 0)], one());
        assert_eq!(h.matrix.iter().filter(|c| c.norm() > 0.0).count(), 1);
        let a = WindowedOperator::hankel(&Symbol::mobius(DiskPoint::new(C64::new(0.3, 0.4)).unwrap()), 16).unwrap();
        assert!(a.matrix.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn spill_degree_of_polynomials() {
        let p = Symbol::polynomial(Laurent::new(-3, vec![one(); 6]));
        assert_eq!(WindowedOperator::toeplitz(&p, 16).unwrap().spill_degree, Some(3));
        assert_eq!(WindowedOperator::hankel(&p, 16).unwrap().spill_degree, Some(3));
        assert_eq!(WindowedOperator::toeplitz(&p, 16).unwrap().raise, Some(2));
        assert_eq!(WindowedOperator::hankel(&Symbol::arc(0.0, 1.0).unwrap(), 16).unwrap().spill_degree, None);
    }

    #[test]
    fn fast_apply_hankel_zbar_kernel() {
        let k = kernel_vector(DiskPoint::new(C64::new(0.8, 0.0)).unwrap(), 1e-16).window(256);
        let h = WindowedOperator::hankel(&Symbol::zbar(), 256).unwrap();
        let out = h.fast_apply(&k).unwrap();
        assert!((out.entries[0] - C64::new(0.6, 0.0)).norm() < 1e-15);
        assert!(out.entries[1..].iter().all(|c| c.norm() < 1e-15));
        assert!(h.fast_apply(&CoeffVector::exact(vec![one(); 3])).is_err());
    }

    #[test]
    fn rank_one_norm_is_product_of_norms() {
        let x = CoeffVector::exact(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.5)]);
        let y = CoeffVector::exact(vec![C64::new(0.5, 0.0), C64::new(2.0, 1.0), C64::new(-1.0, 0.0)]);
        let r = WindowedOperator::rank_one(&x, &y, 3);
        assert!((r.op_norm() - x.norm() * y.norm()).abs() < 1e-12);
        // Applying to y/‖y‖² returns x.
        let yn = y.scale(C64::new(1.0 / y.norm().powi(2), 0.0));
        let out = r.apply_dense(&yn).unwrap();
        for (a, b) in out.entries.iter().zip(&x.entries) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
