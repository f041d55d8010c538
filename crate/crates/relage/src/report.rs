//! JSON reports and CSV curves.

use std::collections::BTreeMap;
use std::io::Write;

use relage_core::monotone::{GridInfo, Witness};
use relage_core::orders::{CheckConfig, ConditionEntry};
use relage_core::{ConditionReport, MonotonicityVerdict, OrderVerdict, Spacing};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessJson {
    pub a: f64,
    pub b: f64,
    pub fa: f64,
    pub fb: f64,
}

impl From<Witness> for WitnessJson {
    fn from(w: Witness) -> Self {
        Self { a: w.a, b: w.b, fa: w.fa, fb: w.fb }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridJson {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: &'static str,
    pub refined_points: usize,
}

fn spacing_name(s: Spacing) -> &'static str {
    match s {
        Spacing::Linear => "linear",
        Spacing::Geometric => "geometric",
    }
}

impl From<GridInfo> for GridJson {
    fn from(g: GridInfo) -> Self {
        Self { lo: g.lo, hi: g.hi, points: g.points, spacing: spacing_name(g.spacing), refined_points: g.refined_points }
    }
}

/// One checked statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionJson {
    pub name: String,
    pub statement: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_changes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridJson>,
}

impl ConditionJson {
    pub fn plain(name: impl Into<String>, statement: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            holds,
            class: None,
            order: None,
            note: None,
            min_value: None,
            max_value: None,
            max_violation: None,
            sign_changes: None,
            grid: None,
        }
    }

    pub fn with_verdict(mut self, v: &MonotonicityVerdict) -> Self {
        self.class = Some(v.class.as_str());
        self.min_value = Some(v.min_value);
        self.max_value = Some(v.max_value);
        self.max_violation = Some(v.max_violation);
        self.sign_changes = Some(v.sign_changes);
        self.grid = Some(v.grid.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn from_entry(prefix: &str, e: &ConditionEntry) -> Self {
        let mut c = Self::plain(prefixed(prefix, &e.name), e.statement.clone(), e.holds);
        if let Some(v) = &e.verdict {
            c = c.with_verdict(v);
        }
        c.order = e.order.map(|o| o.as_str());
        c.note = e.note.clone();
        c
    }
}

fn prefixed(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}: {name}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPairJson {
    pub condition: String,
    pub rising: WitnessJson,
    pub falling: WitnessJson,
}

/// An expectation checked by a reproduction case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>) -> Self {
        let (expected, observed) = (expected.into(), observed.into());
        Self { name: name.into(), pass: expected == observed, expected, observed }
    }

    pub fn check(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), expected: expected.into(), observed: observed.into(), pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TolerancesJson {
    pub tol: f64,
    pub abs_floor: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfigJson {
    pub grid: usize,
    pub refine_factor: usize,
    pub q_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub command: Vec<String>,
    pub input_digests: BTreeMap<String, String>,
    pub conditions: Vec<ConditionJson>,
    pub witnesses: Vec<WitnessPairJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
    pub grid: GridConfigJson,
    pub tolerances: TolerancesJson,
    pub seed: u64,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(check: impl Into<String>, cfg: &CheckConfig, seed: u64) -> Self {
        Self {
            check: check.into(),
            verdict: String::new(),
            conclusion: None,
            case: None,
            command: Vec::new(),
            input_digests: BTreeMap::new(),
            conditions: Vec::new(),
            witnesses: Vec::new(),
            assertions: Vec::new(),
            grid: GridConfigJson {
                grid: cfg.monotone.grid_points,
                refine_factor: relage_core::monotone::REFINE_FACTOR,
                q_points: cfg.q_points,
                x_range: cfg.x_range.map(|(a, b)| [a, b]),
            },
            tolerances: TolerancesJson { tol: cfg.monotone.tol, abs_floor: cfg.monotone.abs_floor, eps: cfg.eps },
            seed,
            notes: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn push_entry(&mut self, prefix: &str, e: &ConditionEntry) {
        self.conditions.push(ConditionJson::from_entry(prefix, e));
        if let Some((rising, falling)) = e.witnesses() {
            self.witnesses.push(WitnessPairJson {
                condition: prefixed(prefix, &e.name),
                rising: rising.into(),
                falling: falling.into(),
            });
        }
    }

    /// Adds every entry of `r` and its notes.
    pub fn push_condition_report(&mut self, prefix: &str, r: &ConditionReport) {
        for e in &r.entries {
            self.push_entry(prefix, e);
        }
        for n in &r.notes {
            self.notes.push(prefixed(prefix, n));
        }
    }

    pub fn push_order_verdict(&mut self, name: &str, v: &OrderVerdict) {
        let statement = format!("{} monotone ({})", v.order.ratio_label(), v.order);
        let mut c = ConditionJson::plain(name, statement, v.holds_forward).with_verdict(&v.detail);
        c.order = Some(v.order.as_str());
        c.note = Some(format!("holds_forward={}, holds_reverse={}", v.holds_forward, v.holds_reverse));
        self.conditions.push(c);
        if let Some((rising, falling)) = v.detail.witnesses() {
            self.witnesses.push(WitnessPairJson { condition: name.into(), rising: rising.into(), falling: falling.into() });
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// One row of the distortion curve CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub p: f64,
    pub h: f64,
    pub h_prime: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

pub fn write_curve_csv<W: Write>(out: W, rows: &[CurveRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
