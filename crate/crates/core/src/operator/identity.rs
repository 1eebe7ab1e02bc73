//! Machine-precision verifier for the Toeplitz/Hankel operator identities.
//!
//! Every identity is written as `Σ s_t · term_t = 0` where a term is a chain of
//! Toeplitz/Hankel factors, a rank-one operator, or the identity. Finite sections of
//! a chain only agree with the section of the true product on inputs whose image
//! never leaves the window, so each chain comes with a certified column count.

use nalgebra::DMatrix;
use serde::Serialize;

use super::long::{hankel_apply, toeplitz_apply};
use super::{spectral_norm, window::SPILL_TOL, WindowedOperator};
use crate::error::{Error, Result};
use crate::symbol::{
    flip_u, kernel_vector, multiply, riesz_project, CoeffVector, DiskPoint, Laurent, Side, Symbol, TwoSided,
};
use crate::C64;

/// Kernel truncation used for the rank-one terms.
const KERNEL_EPS: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IdentityId {
    /// `T_{fg} = T_f T_g + H_{f̃} H_g`
    P1,
    /// `H_{fg} = H_f T_g + T_{f̃} H_g`
    P2,
    /// `H_f T_g = T_{f̃} H_g` for analytic `g`
    P3a,
    /// `H_f T_g = T_{g̃} H_f` for analytic `g`
    P3b,
    /// `T_φ T_{φ̄} = 1 - k_z ⊗ k_z`
    I1,
    /// `T*_{φ̃} T_{φ̃} = 1 - k_{z̄} ⊗ k_{z̄}`
    I2,
    /// `H_{φ̄} = -k_{z̄} ⊗ k_z`
    I3,
    /// `H*_f = H_{f*}`
    #[serde(rename = "ADJ")]
    Adj,
    /// `H_f = U ℋ_f`, checked column by column from the definition
    #[serde(rename = "UREL")]
    Urel,
    /// `T_{φ̃} K T_{φ̄} = K - (K k_z) ⊗ k_z + (H_f k_z) ⊗ (T_φ H*_f k_{z̄})`, `K = H_f T_g`
    ML2a,
    /// Same with `H*_g` in the last factor
    ML2b,
    /// `K T_φ = T_{φ̃} K - (H_f k_z) ⊗ (H*_g k_{z̄})`
    ML3,
}

impl IdentityId {
    pub const ALL: [IdentityId; 12] = [
        IdentityId::P1,
        IdentityId::P2,
        IdentityId::P3a,
        IdentityId::P3b,
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::Adj,
        IdentityId::Urel,
        IdentityId::ML2a,
        IdentityId::ML2b,
        IdentityId::ML3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::P1 => "P1",
            IdentityId::P2 => "P2",
            IdentityId::P3a => "P3a",
            IdentityId::P3b => "P3b",
            IdentityId::I1 => "I1",
            IdentityId::I2 => "I2",
            IdentityId::I3 => "I3",
            IdentityId::Adj => "ADJ",
            IdentityId::Urel => "UREL",
            IdentityId::ML2a => "ML2a",
            IdentityId::ML2b => "ML2b",
            IdentityId::ML3 => "ML3",
        }
    }

    pub fn parse(name: &str) -> Option<IdentityId> {
        Self::ALL.into_iter().find(|id| id.name().eq_ignore_ascii_case(name))
    }

    pub fn formula(&self) -> &'static str {
        match self {
            IdentityId::P1 => "T_{fg} = T_f T_g + H_{f~} H_g",
            IdentityId::P2 => "H_{fg} = H_f T_g + T_{f~} H_g",
            IdentityId::P3a => "H_f T_g = T_{f~} H_g (g analytic)",
            IdentityId::P3b => "H_f T_g = T_{g~} H_f (g analytic)",
            IdentityId::I1 => "T_phi T_{conj phi} = 1 - k_z (x) k_z",
            IdentityId::I2 => "T*_{phi~} T_{phi~} = 1 - k_{zbar} (x) k_{zbar}",
            IdentityId::I3 => "H_{conj phi} = -k_{zbar} (x) k_z",
            IdentityId::Adj => "H*_f = H_{f*}",
            IdentityId::Urel => "H_f = U (I - P) M_f",
            IdentityId::ML2a => "T_{phi~} K T_{conj phi} = K - (K k_z) (x) k_z + (H_f k_z) (x) (T_phi H*_f k_{zbar})",
            IdentityId::ML2b => "T_{phi~} K T_{conj phi} = K - (K k_z) (x) k_z + (H_f k_z) (x) (T_phi H*_g k_{zbar})",
            IdentityId::ML3 => "K T_phi = T_{phi~} K - (H_f k_z) (x) (H*_g k_{zbar})",
        }
    }

    /// Pairs of competing readings.
    pub fn rival(&self) -> Option<IdentityId> {
        match self {
            IdentityId::P3a => Some(IdentityId::P3b),
            IdentityId::P3b => Some(IdentityId::P3a),
            IdentityId::ML2a => Some(IdentityId::ML2b),
            IdentityId::ML2b => Some(IdentityId::ML2a),
            _ => None,
        }
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Symbols and point an identity is instantiated with. `K = H_f T_g`, `φ = φ_z`.
#[derive(Debug, Clone)]
pub struct IdentityInputs {
    pub f: Symbol,
    pub g: Symbol,
    pub z: DiskPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub id: IdentityId,
    pub window: usize,
    /// Columns `0..certified_columns` on which the comparison is exact.
    pub certified_columns: usize,
    /// Operator norm of `LHS - RHS` on the certified columns.
    pub residual: f64,
    /// False when some factor has no finite effective degree (the whole window is used).
    pub certified: bool,
    /// Largest operator norm among the individual terms, for scale.
    pub reference_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adjudication {
    pub winner: Option<IdentityId>,
    pub residuals: [(IdentityId, f64); 2],
}

/// Winner of two competing readings: one at most `1e-10`, the other at least `1e-2`.
pub fn adjudicate(a: &ResidualReport, b: &ResidualReport) -> Adjudication {
    let winner = match (a.residual <= 1e-10, b.residual <= 1e-10) {
        (true, false) if b.residual >= 1e-2 => Some(a.id),
        (false, true) if a.residual >= 1e-2 => Some(b.id),
        _ => None,
    };
    Adjudication { winner, residuals: [(a.id, a.residual), (b.id, b.residual)] }
}

#[derive(Clone)]
enum Factor {
    T(Symbol),
    H(Symbol),
    /// Adjoint of `T_f`.
    TAdj(Symbol),
}

enum Term {
    Chain(C64, Vec<Factor>),
    RankOne(C64, CoeffVector, CoeffVector),
    Identity(C64),
}

fn extent(f: &Symbol, side: Side) -> Option<usize> {
    f.effective_extent(side, SPILL_TOL).map(|d| d as usize)
}

/// Largest `c` such that a chain applied to inputs at degrees `< c` keeps every
/// intermediate result inside `0..n`. Toeplitz factors raise the top degree by their
/// positive extent (adjoints by the negative one); a Hankel factor sends anything to
/// degrees below its negative extent.
fn chain_columns(factors: &[Factor], n: usize) -> Option<usize> {
    let fits = |c: usize| -> Option<bool> {
        let mut top = c as i64 - 1;
        for f in factors[1..].iter().rev() {
            top = match f {
                Factor::T(s) => top + extent(s, Side::Pos)? as i64,
                Factor::TAdj(s) => top + extent(s, Side::Neg)? as i64,
                Factor::H(s) => extent(s, Side::Neg)? as i64 - 1,
            };
            if top > n as i64 - 1 {
                return Some(false);
            }
        }
        Some(true)
    };
    let mut c = n;
    while c > 0 {
        if fits(c)? {
            return Some(c);
        }
        c -= 1;
    }
    Some(0)
}

fn block(f: &Factor, n: usize) -> Result<DMatrix<C64>> {
    Ok(match f {
        Factor::T(s) => WindowedOperator::toeplitz(s, n)?.matrix,
        Factor::H(s) => WindowedOperator::hankel(s, n)?.matrix,
        Factor::TAdj(s) => WindowedOperator::toeplitz(s, n)?.matrix.adjoint(),
    })
}

fn evaluate(id: IdentityId, terms: Vec<Term>, n: usize) -> Result<ResidualReport> {
    let d = evaluate_terms(id.name(), terms, n)?;
    Ok(ResidualReport {
        id,
        window: n,
        certified_columns: d.certified_columns,
        residual: d.residual,
        certified: d.certified,
        reference_norm: d.reference_norm,
    })
}

/// Norm of a sum of block terms on its certified columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseResidual {
    pub window: usize,
    pub certified_columns: usize,
    pub residual: f64,
    pub certified: bool,
    pub reference_norm: f64,
}

fn evaluate_terms(what: &str, terms: Vec<Term>, n: usize) -> Result<DenseResidual> {
    let mut cols = n;
    let mut certified = true;
    for t in &terms {
        if let Term::Chain(_, fs) = t {
            match chain_columns(fs, n) {
                Some(c) => cols = cols.min(c),
                None => certified = false,
            }
        }
    }
    if cols == 0 {
        let needed = terms
            .iter()
            .filter_map(|t| match t {
                Term::Chain(_, fs) => Some(needed_window(fs)),
                _ => None,
            })
            .max()
            .unwrap_or(n + 1);
        return Err(Error::WindowTooSmall { what: what.into(), window: n, needed });
    }
    let mut total = DMatrix::<C64>::zeros(n, cols);
    let mut reference: f64 = 0.0;
    for t in terms {
        let (s, m) = match t {
            Term::Chain(s, fs) => {
                let mut m = block(&fs[0], n)?;
                for f in &fs[1..] {
                    m *= block(f, n)?;
                }
                (s, m.columns(0, cols).into_owned())
            }
            Term::RankOne(s, x, y) => (s, WindowedOperator::rank_one(&x, &y, n).matrix.columns(0, cols).into_owned()),
            Term::Identity(s) => (s, DMatrix::identity(n, n).columns(0, cols).into_owned()),
        };
        reference = reference.max(s.norm() * spectral_norm(&m));
        total += m * s;
    }
    Ok(DenseResidual {
        window: n,
        certified_columns: cols,
        residual: spectral_norm(&total),
        certified,
        reference_norm: reference,
    })
}

/// Smallest window with at least one certified column, for error messages.
fn needed_window(fs: &[Factor]) -> usize {
    let mut n = 1;
    while n < 1 << 20 {
        match chain_columns(fs, n) {
            Some(c) if c > 0 => return n,
            None => return n,
            _ => n *= 2,
        }
    }
    n
}

fn analytic_g(g: &Symbol) -> Result<Symbol> {
    if g.is_analytic() {
        return Ok(g.clone());
    }
    g.analytic_polynomial_part()
        .ok_or_else(|| Error::Invalid("the analytic-g identities need an analytic or polynomial g".into()))
}

const ONE: C64 = C64::new(1.0, 0.0);
const MINUS: C64 = C64::new(-1.0, 0.0);

/// Residual of one identity on an `n × n` window.
pub fn identity_residual(id: IdentityId, inputs: &IdentityInputs, n: usize) -> Result<ResidualReport> {
    if n == 0 {
        return Err(Error::WindowTooSmall { what: id.name().into(), window: 0, needed: 1 });
    }
    let IdentityInputs { f, g, z } = inputs;
    let phi = || Symbol::mobius(*z);
    let kz = || kernel_vector(*z, KERNEL_EPS);
    let kzb = || kernel_vector(z.conj(), KERNEL_EPS);
    use Factor::*;
    let terms = match id {
        IdentityId::P1 => vec![
            Term::Chain(ONE, vec![T(multiply(f, g)?)]),
            Term::Chain(MINUS, vec![T(f.clone()), T(g.clone())]),
            Term::Chain(MINUS, vec![H(f.tilde()), H(g.clone())]),
        ],
        IdentityId::P2 => vec![
            Term::Chain(ONE, vec![H(multiply(f, g)?)]),
            Term::Chain(MINUS, vec![H(f.clone()), T(g.clone())]),
            Term::Chain(MINUS, vec![T(f.tilde()), H(g.clone())]),
        ],
        IdentityId::P3a => {
            let g = analytic_g(g)?;
            vec![Term::Chain(ONE, vec![H(f.clone()), T(g.clone())]), Term::Chain(MINUS, vec![T(f.tilde()), H(g)])]
        }
        IdentityId::P3b => {
            let g = analytic_g(g)?;
            vec![
                Term::Chain(ONE, vec![H(f.clone()), T(g.clone())]),
                Term::Chain(MINUS, vec![T(g.tilde()), H(f.clone())]),
            ]
        }
        IdentityId::I1 => {
            let k = kz();
            vec![
                Term::Chain(ONE, vec![T(phi()), T(phi().conj())]),
                Term::Identity(MINUS),
                Term::RankOne(ONE, k.clone(), k),
            ]
        }
        IdentityId::I2 => {
            let k = kzb();
            let pt = phi().tilde();
            vec![
                Term::Chain(ONE, vec![TAdj(pt.clone()), T(pt)]),
                Term::Identity(MINUS),
                Term::RankOne(ONE, k.clone(), k),
            ]
        }
        IdentityId::I3 => vec![Term::Chain(ONE, vec![H(phi().conj())]), Term::RankOne(ONE, kzb(), kz())],
        IdentityId::Adj => {
            let lhs = WindowedOperator::hankel(f, n)?.adjoint().matrix;
            let rhs = WindowedOperator::hankel(&f.star(), n)?.matrix;
            let reference = spectral_norm(&rhs);
            return Ok(ResidualReport {
                id,
                window: n,
                certified_columns: n,
                residual: spectral_norm(&(lhs - rhs)),
                certified: true,
                reference_norm: reference,
            });
        }
        IdentityId::Urel => return flip_relation(f, n),
        IdentityId::ML2a | IdentityId::ML2b | IdentityId::ML3 => return dilation_identity(id, f, g, *z, n),
    };
    evaluate(id, terms, n)
}

/// `H_f` from its definition: column `k` is `P_N U (I - P)(f e_k)`.
fn flip_relation(f: &Symbol, n: usize) -> Result<ResidualReport> {
    f.require_certifiable()?;
    let h = WindowedOperator::hankel(f, n)?.matrix;
    let mut def = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        // Degrees -n..-1 of f·e_k; the ones below -n never reach the window after the flip.
        let neg = Laurent::new(-(n as i64), f.coeff_range(-((n + k) as i64), n));
        let col = riesz_project(&flip_u(&TwoSided::exact(neg)), n);
        for (m, c) in col.entries.iter().enumerate() {
            def[(m, k)] = *c;
        }
    }
    Ok(ResidualReport {
        id: IdentityId::Urel,
        window: n,
        certified_columns: n,
        residual: spectral_norm(&(&h - &def)),
        certified: true,
        reference_norm: spectral_norm(&h),
    })
}

fn dilation_identity(id: IdentityId, f: &Symbol, g: &Symbol, z: DiskPoint, n: usize) -> Result<ResidualReport> {
    use Factor::*;
    let phi = Symbol::mobius(z);
    let kz = kernel_vector(z, KERNEL_EPS);
    let kzb = kernel_vector(z.conj(), KERNEL_EPS);
    let long = n.max(kz.len());
    let hf_kz = hankel_apply(f, &kz, long)?;
    let terms = match id {
        IdentityId::ML3 => {
            let hg_kzb = hankel_apply(&g.star(), &kzb, long)?;
            vec![
                Term::Chain(ONE, vec![H(f.clone()), T(g.clone()), T(phi.clone())]),
                Term::Chain(MINUS, vec![T(phi.tilde()), H(f.clone()), T(g.clone())]),
                Term::RankOne(ONE, hf_kz, hg_kzb),
            ]
        }
        _ => {
            let h = if id == IdentityId::ML2a { f } else { g };
            let inner = hankel_apply(&h.star(), &kzb, long)?;
            let right = toeplitz_apply(&phi, &inner, inner.len())?;
            let tg_kz = toeplitz_apply(g, &kz, long)?;
            let k_kz = hankel_apply(f, &tg_kz, long)?;
            vec![
                Term::Chain(ONE, vec![T(phi.tilde()), H(f.clone()), T(g.clone()), T(phi.conj())]),
                Term::Chain(MINUS, vec![H(f.clone()), T(g.clone())]),
                Term::RankOne(ONE, k_kz, kz.clone()),
                Term::RankOne(MINUS, hf_kz, right),
            ]
        }
    };
    evaluate(id, terms, n)
}

/// `K*K - T*_φ K*K T_φ` for `K = Σ H_{f_i} T_{g_i}` from products of finite sections.
pub fn dilation_dense(pairs: &[(Symbol, Symbol)], z: DiskPoint, n: usize) -> Result<DenseResidual> {
    use Factor::*;
    let phi = Symbol::mobius(z);
    let mut terms = Vec::new();
    for (fi, gi) in pairs {
        for (fj, gj) in pairs {
            let core = vec![TAdj(gi.clone()), H(fi.star()), H(fj.clone()), T(gj.clone())];
            terms.push(Term::Chain(ONE, core.clone()));
            let mut outer = vec![TAdj(phi.clone())];
            outer.extend(core);
            outer.push(T(phi.clone()));
            terms.push(Term::Chain(MINUS, outer));
        }
    }
    evaluate_terms("dilation", terms, n)
}

/// All identities on one instance, plus the adjudication of the two rival pairs.
pub fn identity_suite(inputs: &IdentityInputs, n: usize) -> Result<(Vec<ResidualReport>, Vec<Adjudication>)> {
    let reports = IdentityId::ALL.iter().map(|id| identity_residual(*id, inputs, n)).collect::<Result<Vec<_>>>()?;
    let get = |id| reports.iter().find(|r| r.id == id).expect("all ids evaluated");
    let adj = vec![
        adjudicate(get(IdentityId::P3a), get(IdentityId::P3b)),
        adjudicate(get(IdentityId::ML2a), get(IdentityId::ML2b)),
    ];
    Ok((reports, adj))
}
