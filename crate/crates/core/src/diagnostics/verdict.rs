use serde::{Deserialize, Serialize};

use super::sweep::{radial_sweep, Quantity, SweepCurve};
use super::{RadialNet, Thresholds, Trend};
use crate::error::{Error, Result};
use crate::operator::hankel_svd;
use crate::symbol::{linear_combine, multiply, Symbol};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictOutcome {
    Compact,
    Noncompact,
    Inconclusive,
}

/// What happened at one probed angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "case", rename_all = "snake_case")]
pub enum CaseLabel {
    /// The first numbered condition that held.
    Case(u8),
    /// Every condition failed decisively (some required quantity plateaued).
    Neither,
    /// No condition held, but not every failure was decisive.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleCase {
    pub angle: f64,
    pub label: CaseLabel,
    /// Every numbered condition that held.
    pub held: Vec<u8>,
    /// Limit estimate of `t_z` (sum-of-products verdicts only).
    pub t: Option<C64>,
    /// `c = -conj(t)` when condition (5) was tested.
    pub c: Option<C64>,
    pub t_unstable: bool,
}

impl AngleCase {
    fn new(angle: f64, held: Vec<u8>, decisive: bool) -> Self {
        let label = match held.first() {
            Some(k) => CaseLabel::Case(*k),
            None if decisive => CaseLabel::Neither,
            None => CaseLabel::Undetermined,
        };
        Self { angle, label, held, t: None, c: None, t_unstable: false }
    }
}

/// Singular-value evidence at one section size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEvidence {
    pub n: usize,
    /// `(k, σ_k)` for every probe `k ≤ n`, 1-based.
    pub probes: Vec<(usize, f64)>,
    /// Number of singular values above `tau_compact`.
    pub count_above: usize,
    pub sigma_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: VerdictOutcome,
    pub per_angle_case: Vec<AngleCase>,
    pub evidence: Vec<SweepCurve>,
    /// Hartman verdicts only.
    pub sizes: Vec<SizeEvidence>,
    pub thresholds: Thresholds,
    /// Set when a zero symbol short-circuited the computation.
    pub trivial: bool,
    pub notes: Vec<String>,
}

impl Verdict {
    fn trivial(thresholds: &Thresholds, why: &str) -> Self {
        Self {
            outcome: VerdictOutcome::Compact,
            per_angle_case: Vec::new(),
            evidence: Vec::new(),
            sizes: Vec::new(),
            thresholds: thresholds.clone(),
            trivial: true,
            notes: vec![why.to_string()],
        }
    }

    pub fn case_at(&self, angle: f64) -> Option<&AngleCase> {
        self.per_angle_case.iter().find(|c| (c.angle - super::normalize_angle(angle)).abs() < 1e-12)
    }

    pub fn curve_at(&self, angle: f64) -> Option<&SweepCurve> {
        self.evidence.iter().find(|c| (c.angle - super::normalize_angle(angle)).abs() < 1e-12)
    }
}

/// Compact iff every angle landed in a case; noncompact if some angle failed decisively.
fn assemble(cases: &[AngleCase]) -> VerdictOutcome {
    if cases.iter().all(|c| matches!(c.label, CaseLabel::Case(_))) {
        VerdictOutcome::Compact
    } else if cases.iter().any(|c| c.label == CaseLabel::Neither) {
        VerdictOutcome::Noncompact
    } else {
        VerdictOutcome::Inconclusive
    }
}

/// Singular-value verdict for `H_f` from sections of increasing size.
///
/// Compact: `σ_{k0}` at the largest size is at most `tau_compact` (`k0` the smallest
/// probe) and the number of singular values above `tau_compact` does not grow.
/// Noncompact: some probe `σ_k` is stable within `stability` across the two largest
/// sizes and at least `tau_noncompact`, or the count above `tau_compact` grows strictly
/// with every size while `σ_{k0}` stays above `tau_compact`.
pub fn hartman_verdict(f: &Symbol, sizes: &[usize], thresholds: &Thresholds) -> Result<Verdict> {
    thresholds.validate()?;
    if sizes.is_empty() || !sizes.windows(2).all(|w| w[0] < w[1]) || sizes[0] < 2 {
        return Err(Error::Invalid("sizes must be increasing and at least 2".into()));
    }
    f.require_certifiable()?;
    if f.is_zero() {
        return Ok(Verdict::trivial(thresholds, "zero symbol"));
    }
    let t = thresholds;
    let mut evidence = Vec::new();
    for &n in sizes {
        let s = hankel_svd(f, n)?;
        let probes = t.probes.iter().filter(|k| **k <= n).map(|&k| (k, s[k - 1])).collect();
        let count_above = s.iter().filter(|x| **x > t.tau_compact).count();
        evidence.push(SizeEvidence { n, probes, count_above, sigma_max: s[0] });
    }
    let k0 = *t.probes.iter().min().expect("validated");
    let last = evidence.last().expect("nonempty");
    let sigma_k0 = |e: &SizeEvidence| e.probes.iter().find(|p| p.0 == k0).map_or(0.0, |p| p.1);
    let counts_flat = evidence.windows(2).all(|w| w[1].count_above <= w[0].count_above);
    let counts_growing = evidence.len() >= 2 && evidence.windows(2).all(|w| w[1].count_above > w[0].count_above);
    let stable_probe = evidence.len() >= 2 && {
        let (a, b) = (&evidence[evidence.len() - 2], last);
        a.probes.iter().any(|&(k, sa)| {
            b.probes.iter().any(|&(kb, sb)| {
                kb == k && sa >= t.tau_noncompact && sb >= t.tau_noncompact && (sb - sa).abs() <= t.stability * sa
            })
        })
    };
    let mut notes = Vec::new();
    let outcome = if sigma_k0(last) <= t.tau_compact && counts_flat {
        VerdictOutcome::Compact
    } else if stable_probe {
        notes.push("a probed singular value stabilized above tau_noncompact".into());
        VerdictOutcome::Noncompact
    } else if counts_growing && sigma_k0(last) > t.tau_compact {
        notes.push("the number of singular values above tau_compact grows with the section size".into());
        VerdictOutcome::Noncompact
    } else {
        VerdictOutcome::Inconclusive
    };
    Ok(Verdict {
        outcome,
        per_angle_case: Vec::new(),
        evidence: Vec::new(),
        sizes: evidence,
        thresholds: t.clone(),
        trivial: false,
        notes,
    })
}

fn vanishing(c: &SweepCurve, tag: &str) -> bool {
    c.fit(tag).trend == Trend::Vanishing
}

fn plateau(c: &SweepCurve, tag: &str) -> bool {
    c.fit(tag).trend == Trend::Plateau
}

/// Product `‖H_{f̄} k_z‖·‖H_g k_z‖` along the net: it tends to zero at every angle
/// exactly when `H_{f̃} H_g`-type products are compact.
pub fn zheng_pair_verdict(f: &Symbol, g: &Symbol, net: &RadialNet, thresholds: &Thresholds) -> Result<Verdict> {
    if f.is_zero() || g.is_zero() {
        f.require_certifiable()?;
        g.require_certifiable()?;
        return Ok(Verdict::trivial(thresholds, "zero symbol"));
    }
    let fbar = f.conj();
    let q = [
        Quantity::Product { tag: "product".into(), f: fbar.clone(), g: g.clone() },
        Quantity::hankel("Hfbar_kz", &fbar),
        Quantity::hankel("Hg_kz", g),
    ];
    let curves = radial_sweep(&q, net, thresholds)?;
    let cases: Vec<AngleCase> = curves
        .iter()
        .map(|c| {
            let ok = vanishing(c, "product") || vanishing(c, "Hfbar_kz") || vanishing(c, "Hg_kz");
            AngleCase::new(c.angle, if ok { vec![1] } else { vec![] }, plateau(c, "product"))
        })
        .collect();
    Ok(Verdict {
        outcome: assemble(&cases),
        per_angle_case: cases,
        evidence: curves,
        sizes: Vec::new(),
        thresholds: thresholds.clone(),
        trivial: false,
        notes: Vec::new(),
    })
}

/// Compactness of `H_f T_g` angle by angle: case 1 when `‖H_f k_z‖ → 0`, case 2 when
/// `‖H_g k_z‖ → 0` and `‖H_{fg} k_z‖ → 0`.
pub fn product_verdict(f: &Symbol, g: &Symbol, net: &RadialNet, thresholds: &Thresholds) -> Result<Verdict> {
    f.require_certifiable()?;
    g.require_certifiable()?;
    if f.is_zero() || g.is_zero() {
        return Ok(Verdict::trivial(thresholds, "zero symbol"));
    }
    let fg = multiply(f, g)?;
    let q = [
        Quantity::hankel("Hf_kz", f),
        Quantity::hankel("Hg_kz", g),
        Quantity::hankel("Hfg_kz", &fg),
        Quantity::HankelToeplitz { tag: "HfTg_kz".into(), f: f.clone(), g: g.clone() },
        Quantity::HankelAdjoint { tag: "Hstar".into(), f: f.clone() },
    ];
    let curves = radial_sweep(&q, net, thresholds)?;
    let cases: Vec<AngleCase> = curves
        .iter()
        .map(|c| {
            let mut held = Vec::new();
            if vanishing(c, "Hf_kz") {
                held.push(1);
            }
            if vanishing(c, "Hg_kz") && vanishing(c, "Hfg_kz") {
                held.push(2);
            }
            let decisive = plateau(c, "Hf_kz") && (plateau(c, "Hg_kz") || plateau(c, "Hfg_kz"));
            AngleCase::new(c.angle, held, decisive)
        })
        .collect();
    Ok(Verdict {
        outcome: assemble(&cases),
        per_angle_case: cases,
        evidence: curves,
        sizes: Vec::new(),
        thresholds: thresholds.clone(),
        trivial: false,
        notes: Vec::new(),
    })
}

const ONE: C64 = C64::new(1.0, 0.0);

/// Compactness of `H_{f1} T_{g1} + H_{f2} T_{g2}` angle by angle through the five
/// conditions; condition (5) uses `c = -conj(t)` with `t` the limit of `t_z`.
pub fn sum_product_verdict(
    f1: &Symbol,
    g1: &Symbol,
    f2: &Symbol,
    g2: &Symbol,
    net: &RadialNet,
    thresholds: &Thresholds,
) -> Result<Verdict> {
    for s in [f1, g1, f2, g2] {
        s.require_certifiable()?;
    }
    if (f1.is_zero() || g1.is_zero()) && (f2.is_zero() || g2.is_zero()) {
        return Ok(Verdict::trivial(thresholds, "both products have a zero factor"));
    }
    let f1g1 = multiply(f1, g1)?;
    let f2g2 = multiply(f2, g2)?;
    let q = [
        Quantity::hankel("Hf1_kz", f1),
        Quantity::hankel("Hf2_kz", f2),
        Quantity::hankel("Hg1_kz", g1),
        Quantity::hankel("Hg2_kz", g2),
        Quantity::hankel("Hf1g1_kz", &f1g1),
        Quantity::hankel("Hf2g2_kz", &f2g2),
        Quantity::Ratio { tag: "tz".into(), f1: f1.clone(), f2: f2.clone() },
    ];
    let curves = radial_sweep(&q, net, thresholds)?;
    let mut cases = Vec::with_capacity(curves.len());
    let mut notes = Vec::new();
    for c in &curves {
        let v = |tag: &str| vanishing(c, tag);
        let p = |tag: &str| plateau(c, tag);
        let mut held = Vec::new();
        if v("Hf1_kz") && v("Hf2_kz") {
            held.push(1);
        }
        if v("Hf1_kz") && v("Hg2_kz") && v("Hf2g2_kz") {
            held.push(2);
        }
        if v("Hg1_kz") && v("Hf1g1_kz") && v("Hf2_kz") {
            held.push(3);
        }
        if v("Hg1_kz") && v("Hg2_kz") && v("Hf1g1_kz") && v("Hf2g2_kz") {
            held.push(4);
        }
        let decisive_1to4 = (p("Hf1_kz") || p("Hf2_kz"))
            && (p("Hf1_kz") || p("Hg2_kz") || p("Hf2g2_kz"))
            && (p("Hg1_kz") || p("Hf1g1_kz") || p("Hf2_kz"))
            && (p("Hg1_kz") || p("Hg2_kz") || p("Hf1g1_kz") || p("Hf2g2_kz"));
        if !held.is_empty() {
            cases.push(AngleCase::new(c.angle, held, false));
            continue;
        }
        // Condition (5) needs ‖H_{f1} k_z‖ bounded below along the net.
        let delta = c.fit("Hf1_kz").minimum;
        let ts: Vec<C64> = c.points.iter().rev().take(3).filter_map(|pt| pt.t).collect();
        if v("Hf1_kz") || delta <= thresholds.floor || ts.len() < 3 {
            cases.push(AngleCase::new(c.angle, held, false));
            continue;
        }
        let mean = ts.iter().sum::<C64>() / ts.len() as f64;
        let spread = ts.iter().map(|t| (t - mean).norm()).fold(0.0, f64::max);
        let unstable = spread > thresholds.t_variation * mean.norm();
        let mut t = mean;
        if t.norm() > 1.0 / delta {
            t *= (1.0 / delta) / t.norm();
        }
        let mut case = AngleCase::new(c.angle, Vec::new(), false);
        case.t = Some(t);
        case.t_unstable = unstable;
        if t.norm() <= thresholds.t_zero {
            // t = 0 sends the argument back to conditions (1)-(4).
            case.label = if decisive_1to4 { CaseLabel::Neither } else { CaseLabel::Undetermined };
            cases.push(case);
            continue;
        }
        let cc = -t.conj();
        case.c = Some(cc);
        let a = linear_combine(&[(cc, f1), (ONE, f2)])?;
        let b = linear_combine(&[(ONE, g1), (-cc, g2)])?;
        let ab = multiply(f1, &b)?;
        let mut single = net.clone();
        single.boundary_angles = vec![c.angle];
        let q5 =
            [Quantity::hankel("H_cf1+f2", &a), Quantity::hankel("H_g1-cg2", &b), Quantity::hankel("H_f1(g1-cg2)", &ab)];
        let c5 = radial_sweep(&q5, &single, thresholds)?.remove(0);
        let tags = ["H_cf1+f2", "H_g1-cg2", "H_f1(g1-cg2)"];
        if tags.iter().all(|tag| vanishing(&c5, tag)) {
            case.held.push(5);
            case.label = CaseLabel::Case(5);
        } else {
            let decisive = decisive_1to4 && !unstable && tags.iter().any(|tag| plateau(&c5, tag));
            case.label = if decisive { CaseLabel::Neither } else { CaseLabel::Undetermined };
        }
        if unstable {
            notes.push(format!("t_z estimate unstable at angle {:.6}", c.angle));
        }
        cases.push(case);
    }
    Ok(Verdict {
        outcome: assemble(&cases),
        per_angle_case: cases,
        evidence: curves,
        sizes: Vec::new(),
        thresholds: thresholds.clone(),
        trivial: false,
        notes,
    })
}
