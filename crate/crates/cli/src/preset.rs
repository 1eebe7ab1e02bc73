//! The `paper-suite` preset: every identity check plus the curated compact and
//! noncompact families, run from a single config line.

use std::collections::BTreeMap;

use hardylab::VerdictOutcome::{Compact, Noncompact};

use crate::config::{DilationTask, HartmanTask, IdentitiesTask, NetConfig, PairTask, SumProductTask, TaskConfig};

/// Symbols the preset defines. User configs may not redefine these names.
pub fn paper_suite_symbols() -> BTreeMap<String, String> {
    [
        ("decay2", "decay(2)"),
        ("half_circle", "arc(0, pi)"),
        ("poly", "zbar^3 + 2*zbar - i*z"),
        ("arc_east", "arc(-0.5, 0.5)"),
        ("arc_west", "arc(pi - 0.5, pi + 0.5)"),
        ("arc_unit", "arc(0, 1)"),
        ("arc_unit_neg", "-arc(0, 1)"),
        ("arc_unit_double", "2*arc(0, 1)"),
        ("one", "1"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn hartman(id: &str, symbol: &str, sizes: &[usize], expect: hardylab::VerdictOutcome) -> TaskConfig {
    TaskConfig::Hartman(HartmanTask {
        id: id.into(),
        symbol: symbol.into(),
        sizes: sizes.to_vec(),
        expect: Some(expect),
        thresholds: None,
    })
}

fn pair(id: &str, f: &str, g: &str, expect: hardylab::VerdictOutcome) -> PairTask {
    PairTask {
        id: id.into(),
        f: f.into(),
        g: g.into(),
        net: NetConfig::default(),
        expect: Some(expect),
        thresholds: None,
    }
}

fn sum_product(id: &str, f2: &str, expect: hardylab::VerdictOutcome) -> TaskConfig {
    TaskConfig::SumProduct(SumProductTask {
        id: id.into(),
        f1: "arc_unit".into(),
        g1: "one".into(),
        f2: f2.into(),
        g2: "one".into(),
        net: NetConfig::default(),
        expect: Some(expect),
        thresholds: None,
    })
}

fn dilation(id: &str, f: &str, g: &str, decreasing: Option<f64>, at_least: Option<f64>) -> TaskConfig {
    TaskConfig::Dilation(DilationTask {
        id: id.into(),
        pairs: vec![[f.into(), g.into()]],
        angles: vec![0.5],
        from: 4,
        to: 10,
        kernel_eps: hardylab::diagnostics::DEFAULT_KERNEL_EPS,
        out_factor: hardylab::diagnostics::DEFAULT_OUT_FACTOR,
        decreasing,
        at_least,
    })
}

pub fn paper_suite_tasks() -> Vec<TaskConfig> {
    vec![
        TaskConfig::Identities(IdentitiesTask::new("identities")),
        hartman("hartman-decay", "decay2", &[256, 512], Compact),
        hartman("hartman-poly", "poly", &[256, 512], Compact),
        hartman("hartman-half-circle", "half_circle", &[256, 512, 1024], Noncompact),
        TaskConfig::Zheng(pair("zheng-disjoint-arcs", "arc_east", "arc_west", Compact)),
        TaskConfig::Zheng(pair("zheng-same-arc", "arc_east", "arc_east", Noncompact)),
        TaskConfig::Product(pair("product-pair-a", "arc_east", "arc_west", Compact)),
        TaskConfig::Product(pair("product-pair-b", "arc_east", "one", Noncompact)),
        sum_product("sum-product-cancel", "arc_unit_neg", Compact),
        sum_product("sum-product-double", "arc_unit_double", Noncompact),
        dilation("dilation-poly", "poly", "arc_west", Some(1.5), None),
        dilation("dilation-pair-a", "arc_east", "arc_west", None, None),
        dilation("dilation-pair-b", "arc_east", "one", None, Some(1e-2)),
    ]
}
