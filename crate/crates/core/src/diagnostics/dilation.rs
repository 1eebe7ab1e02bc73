//! `‖K*K - T*_φ K*K T_φ‖` for `K = Σ H_{f_i} T_{g_i}` in closed form.
//!
//! With `x_i = H_{f_i} k_z`, `y_i = H*_{g_i} k_{z̄}` one has `K T_φ = T_{φ̃} K - Σ x_i ⊗ y_i`,
//! and `T*_{φ̃} T_{φ̃} = 1 - k_{z̄} ⊗ k_{z̄}`. Expanding `(K T_φ)*(K T_φ)` gives
//!
//! ```text
//! K*K - T*_φ K*K T_φ = a⊗a + Σ_i (b_i⊗y_i + y_i⊗b_i) - Σ_{ij} ⟨x_j, x_i⟩ y_i⊗y_j
//! ```
//!
//! with `a = K* k_{z̄}` and `b_i = K* T_{φ*} x_i`, a finite-rank operator whose norm is
//! computed from the vectors alone. Dense block products are only needed as a check.

use serde::{Deserialize, Serialize};

use super::{Measured, RadialNet};
use crate::error::{Error, Result};
use crate::operator::{finite_rank_norm, LongOperator};
use crate::symbol::{kernel_vector, CoeffVector, DiskPoint, Symbol};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationPoint {
    pub z: DiskPoint,
    pub radius: f64,
    pub angle: f64,
    /// `‖K*K - T*_φ K*K T_φ‖`
    pub residual: Measured,
    /// `‖K - T_{φ̃} K T_{φ̄}‖`
    pub first_form: Measured,
}

const MARGIN: usize = 64;

struct Ops {
    len: usize,
    kz: CoeffVector,
    kzb: CoeffVector,
}

impl Ops {
    fn new(z: DiskPoint, eps: f64, out_factor: usize) -> Self {
        let kz = kernel_vector(z, eps);
        let kzb = kernel_vector(z.conj(), eps);
        // The margin keeps polynomial supports whole even when the kernel is very short.
        Self { len: out_factor.max(1) * kz.len() + MARGIN, kz, kzb }
    }

    fn hankel(&self, f: &Symbol, v: &CoeffVector) -> Result<CoeffVector> {
        if f.is_analytic() {
            return Ok(CoeffVector::exact(vec![C64::new(0.0, 0.0); self.len]));
        }
        Ok(LongOperator::hankel(f, v.len().max(1), self.len)?.apply(v))
    }

    fn toeplitz(&self, f: &Symbol, v: &CoeffVector) -> Result<CoeffVector> {
        Ok(LongOperator::toeplitz(f, v.len().max(1), self.len.max(v.len()))?.apply(v).window(self.len))
    }

    /// `K* v = Σ T_{ḡ_i} H_{f_i*} v`
    fn k_adjoint(&self, pairs: &[(Symbol, Symbol)], v: &CoeffVector) -> Result<CoeffVector> {
        let mut acc = CoeffVector::exact(vec![C64::new(0.0, 0.0); self.len]);
        for (f, g) in pairs {
            let h = self.hankel(&f.star(), v)?;
            acc = acc.add(&self.toeplitz(&g.conj(), &h)?);
        }
        Ok(acc)
    }

    /// `K v = Σ H_{f_i} T_{g_i} v`
    fn k_apply(&self, pairs: &[(Symbol, Symbol)], v: &CoeffVector) -> Result<CoeffVector> {
        let mut acc = CoeffVector::exact(vec![C64::new(0.0, 0.0); self.len]);
        for (f, g) in pairs {
            acc = acc.add(&self.hankel(f, &self.toeplitz(g, v)?)?);
        }
        Ok(acc)
    }
}

fn check(pairs: &[(Symbol, Symbol)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::Invalid("K needs at least one (f, g) pair".into()));
    }
    for (f, g) in pairs {
        f.require_certifiable()?;
        g.require_certifiable()?;
    }
    Ok(())
}

/// Norm of `Σ l_t ⊗ r_t` with an error bar from the vector tails.
fn rank_sum(lefts: Vec<CoeffVector>, rights: Vec<CoeffVector>) -> Measured {
    let err: f64 = lefts
        .iter()
        .zip(&rights)
        .map(|(l, r)| l.norm() * r.tail_bound + l.tail_bound * r.norm() + l.tail_bound * r.tail_bound)
        .sum();
    Measured { value: finite_rank_norm(&lefts, &rights), error_bar: err }
}

/// `‖K*K - T*_{φ_z} K*K T_{φ_z}‖` for `K = Σ H_{f_i} T_{g_i}`.
pub fn dilation_residual(pairs: &[(Symbol, Symbol)], z: DiskPoint, eps: f64, out_factor: usize) -> Result<Measured> {
    check(pairs)?;
    let ops = Ops::new(z, eps, out_factor);
    let phi_star = Symbol::mobius(z).star();
    let xs = pairs.iter().map(|(f, _)| ops.hankel(f, &ops.kz)).collect::<Result<Vec<_>>>()?;
    let ys = pairs.iter().map(|(_, g)| ops.hankel(&g.star(), &ops.kzb)).collect::<Result<Vec<_>>>()?;
    let a = ops.k_adjoint(pairs, &ops.kzb)?;
    let bs = xs.iter().map(|x| ops.k_adjoint(pairs, &ops.toeplitz(&phi_star, x)?)).collect::<Result<Vec<_>>>()?;
    let mut lefts = vec![a.clone()];
    let mut rights = vec![a];
    for (b, y) in bs.iter().zip(&ys) {
        lefts.push(b.clone());
        rights.push(y.clone());
        lefts.push(y.clone());
        rights.push(b.clone());
    }
    // -Σ_ij ⟨x_j, x_i⟩ y_i ⊗ y_j, folded into one left vector per j.
    for (j, yj) in ys.iter().enumerate() {
        let mut w = CoeffVector::exact(vec![C64::new(0.0, 0.0); ops.len]);
        for (i, yi) in ys.iter().enumerate() {
            w = w.add(&yi.scale(-xs[j].inner(&xs[i])));
        }
        lefts.push(w);
        rights.push(yj.clone());
    }
    Ok(rank_sum(lefts, rights))
}

/// `‖K - T_{φ̃} K T_{φ̄}‖ = ‖(K k_z) ⊗ k_z - Σ x_i ⊗ (T_φ y_i)‖`.
pub fn dilation_first_form(pairs: &[(Symbol, Symbol)], z: DiskPoint, eps: f64, out_factor: usize) -> Result<Measured> {
    check(pairs)?;
    let ops = Ops::new(z, eps, out_factor);
    let phi = Symbol::mobius(z);
    let mut lefts = vec![ops.k_apply(pairs, &ops.kz)?];
    let mut rights = vec![ops.kz.window(ops.len)];
    for (f, g) in pairs {
        lefts.push(ops.hankel(f, &ops.kz)?.scale(C64::new(-1.0, 0.0)));
        rights.push(ops.toeplitz(&phi, &ops.hankel(&g.star(), &ops.kzb)?)?);
    }
    Ok(rank_sum(lefts, rights))
}

/// Both dilation norms along one ray of the net.
pub fn dilation_sweep(pairs: &[(Symbol, Symbol)], angle: f64, net: &RadialNet) -> Result<Vec<DilationPoint>> {
    net.validate()?;
    net.radii
        .iter()
        .map(|&r| {
            let z = DiskPoint::polar(r, angle)?;
            Ok(DilationPoint {
                z,
                radius: r,
                angle,
                residual: dilation_residual(pairs, z, net.kernel_eps, net.out_factor)?,
                first_form: dilation_first_form(pairs, z, net.kernel_eps, net.out_factor)?,
            })
        })
        .collect()
}
