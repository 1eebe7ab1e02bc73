use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_trend, Measured, RadialNet, Thresholds, TrendFit, DEFAULT_OUT_FACTOR};
use crate::error::Result;
use crate::operator::LongOperator;
use crate::symbol::{kernel_vector, CoeffVector, DiskPoint, Symbol};
use crate::C64;

/// A localized quantity evaluated at `z` with the normalized kernel `k_z`.
#[derive(Debug, Clone)]
pub enum Quantity {
    /// `‖H_f k_z‖`
    Hankel { tag: String, f: Symbol },
    /// `‖H*_f k_{z̄}‖`, computed as `‖H_{f*} k_{z̄}‖`
    HankelAdjoint { tag: String, f: Symbol },
    /// `‖H_f T_g k_z‖`
    HankelToeplitz { tag: String, f: Symbol, g: Symbol },
    /// `‖H_f k_z‖ · ‖H_g k_z‖`
    Product { tag: String, f: Symbol, g: Symbol },
    /// `t_z = ⟨H_{f1} k_z, H_{f2} k_z⟩ / ‖H_{f1} k_z‖²`; its modulus is recorded under the
    /// tag and the complex value in [`PointDiagnostic::t`].
    Ratio { tag: String, f1: Symbol, f2: Symbol },
}

impl Quantity {
    pub fn hankel(tag: &str, f: &Symbol) -> Self {
        Quantity::Hankel { tag: tag.into(), f: f.clone() }
    }

    pub fn tag(&self) -> &str {
        match self {
            Quantity::Hankel { tag, .. }
            | Quantity::HankelAdjoint { tag, .. }
            | Quantity::HankelToeplitz { tag, .. }
            | Quantity::Product { tag, .. }
            | Quantity::Ratio { tag, .. } => tag,
        }
    }

    fn symbols(&self) -> Vec<&Symbol> {
        match self {
            Quantity::Hankel { f, .. } | Quantity::HankelAdjoint { f, .. } => vec![f],
            Quantity::HankelToeplitz { f, g, .. } | Quantity::Product { f, g, .. } => vec![f, g],
            Quantity::Ratio { f1, f2, .. } => vec![f1, f2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnostic {
    pub z: DiskPoint,
    pub radius: f64,
    pub angle: f64,
    pub quantities: BTreeMap<String, Measured>,
    /// `t_z` when a ratio quantity was requested and `‖H_{f1} k_z‖` is nonzero.
    pub t: Option<C64>,
}

/// One angle of a sweep: points in radius order plus a trend fit per tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub angle: f64,
    pub points: Vec<PointDiagnostic>,
    pub fits: BTreeMap<String, TrendFit>,
}

impl SweepCurve {
    pub fn values(&self, tag: &str) -> Vec<f64> {
        self.points.iter().map(|p| p.quantities[tag].value).collect()
    }

    pub fn fit(&self, tag: &str) -> &TrendFit {
        &self.fits[tag]
    }
}

/// Operators prepared for one kernel length; their kernels do not depend on the angle.
enum Prepared {
    Zero,
    Hankel(LongOperator),
    HankelToeplitz(LongOperator, LongOperator),
    Pair(Option<LongOperator>, Option<LongOperator>),
}

fn hankel_op(f: &Symbol, n: usize, m: usize) -> Result<Option<LongOperator>> {
    f.require_certifiable()?;
    if f.is_analytic() {
        return Ok(None);
    }
    Ok(Some(LongOperator::hankel(f, n, m)?))
}

fn prepare(q: &Quantity, n: usize, m: usize) -> Result<Prepared> {
    Ok(match q {
        Quantity::Hankel { f, .. } => hankel_op(f, n, m)?.map_or(Prepared::Zero, Prepared::Hankel),
        Quantity::HankelAdjoint { f, .. } => hankel_op(&f.star(), n, m)?.map_or(Prepared::Zero, Prepared::Hankel),
        Quantity::HankelToeplitz { f, g, .. } => {
            g.require_certifiable()?;
            match hankel_op(f, m, m)? {
                None => Prepared::Zero,
                Some(_) if g.is_zero() => Prepared::Zero,
                Some(h) => Prepared::HankelToeplitz(LongOperator::toeplitz(g, n, m)?, h),
            }
        }
        Quantity::Product { f, g, .. } | Quantity::Ratio { f1: f, f2: g, .. } => {
            Prepared::Pair(hankel_op(f, n, m)?, hankel_op(g, n, m)?)
        }
    })
}

fn measured(v: &CoeffVector) -> Measured {
    Measured { value: v.norm(), error_bar: v.tail_bound }
}

fn apply_opt(op: &Option<LongOperator>, k: &CoeffVector) -> CoeffVector {
    op.as_ref().map_or_else(|| CoeffVector::exact(Vec::new()), |h| h.apply(k))
}

fn evaluate(q: &Quantity, p: &Prepared, kz: &CoeffVector, kzb: &CoeffVector) -> (Measured, Option<C64>) {
    match (q, p) {
        (_, Prepared::Zero) => (Measured::exact(0.0), None),
        (Quantity::HankelAdjoint { .. }, Prepared::Hankel(h)) => (measured(&h.apply(kzb)), None),
        (_, Prepared::Hankel(h)) => (measured(&h.apply(kz)), None),
        (_, Prepared::HankelToeplitz(t, h)) => (measured(&h.apply(&t.apply(kz))), None),
        (Quantity::Product { .. }, Prepared::Pair(a, b)) => {
            let (x, y) = (apply_opt(a, kz), apply_opt(b, kz));
            (measured(&x).times(&measured(&y)), None)
        }
        (_, Prepared::Pair(a, b)) => ratio(&apply_opt(a, kz), &apply_opt(b, kz)),
    }
}

/// `t = ⟨x1, x2⟩ / ‖x1‖²` with a first-order perturbation bound from the tails.
fn ratio(x1: &CoeffVector, x2: &CoeffVector) -> (Measured, Option<C64>) {
    let n1 = x1.norm();
    if n1 == 0.0 {
        return (Measured { value: 0.0, error_bar: f64::INFINITY }, None);
    }
    let num = x1.inner(x2);
    let t = num / (n1 * n1);
    let (e1, e2) = (x1.tail_bound, x2.tail_bound);
    let num_err = e1 * x2.norm() + e2 * n1 + e1 * e2;
    let err = if n1 > e1 {
        let lo = (n1 - e1).powi(2);
        num_err / lo + num.norm() * (2.0 * n1 * e1 + e1 * e1) / (n1 * n1 * lo)
    } else {
        f64::INFINITY
    };
    (Measured { value: t.norm(), error_bar: err }, Some(t))
}

/// `‖H_f k_z‖` with kernel tolerance `eps` and its certified error bar.
pub fn hankel_kernel_norm(f: &Symbol, z: DiskPoint, eps: f64) -> Result<Measured> {
    f.require_certifiable()?;
    let k = kernel_vector(z, eps);
    if f.is_analytic() {
        return Ok(Measured::exact(0.0));
    }
    let h = LongOperator::hankel(f, k.len(), DEFAULT_OUT_FACTOR * k.len())?;
    Ok(measured(&h.apply(&k)))
}

/// Evaluates every quantity at every point of the net and fits a trend per angle and tag.
pub fn radial_sweep(quantities: &[Quantity], net: &RadialNet, thresholds: &Thresholds) -> Result<Vec<SweepCurve>> {
    net.validate()?;
    thresholds.validate()?;
    for q in quantities {
        for s in q.symbols() {
            s.require_certifiable()?;
        }
    }
    let angles = &net.boundary_angles;
    // rows[j][a] = point at radius j, angle a
    let mut rows: Vec<Vec<PointDiagnostic>> = Vec::with_capacity(net.radii.len());
    for &r in &net.radii {
        let n = kernel_vector(DiskPoint::polar(r, 0.0)?, net.kernel_eps).len();
        let m = net.out_factor * n;
        let prepared = quantities.iter().map(|q| prepare(q, n, m)).collect::<Result<Vec<_>>>()?;
        let row = angles
            .par_iter()
            .map(|&theta| -> Result<PointDiagnostic> {
                let z = DiskPoint::polar(r, theta)?;
                let kz = kernel_vector(z, net.kernel_eps);
                let kzb = kernel_vector(z.conj(), net.kernel_eps);
                let mut map = BTreeMap::new();
                let mut t = None;
                for (q, p) in quantities.iter().zip(&prepared) {
                    let (v, tz) = evaluate(q, p, &kz, &kzb);
                    if tz.is_some() {
                        t = tz;
                    }
                    map.insert(q.tag().to_string(), v);
                }
                Ok(PointDiagnostic { z, radius: r, angle: theta, quantities: map, t })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let mut curves = Vec::with_capacity(angles.len());
    for (a, &theta) in angles.iter().enumerate() {
        let points: Vec<PointDiagnostic> = rows.iter().map(|row| row[a].clone()).collect();
        let mut fits = BTreeMap::new();
        for q in quantities {
            if matches!(q, Quantity::Ratio { .. }) {
                continue;
            }
            let vals: Vec<f64> = points.iter().map(|p| p.quantities[q.tag()].value).collect();
            fits.insert(q.tag().to_string(), fit_trend(&net.radii, &vals, thresholds));
        }
        curves.push(SweepCurve { angle: theta, points, fits });
    }
    Ok(curves)
}
