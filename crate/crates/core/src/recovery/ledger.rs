use serde::{Deserialize, Serialize};

use crate::tolerance::ToleranceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value <= bound`
    Le,
    /// `value >= bound`
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// A certified constant.
    Bound,
    /// An intermediate estimate of a construction.
    Step,
    /// A structural identity that holds up to rounding.
    Soundness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub kind: EntryKind,
    pub pass: bool,
    /// Passes with no numeric slack at all.
    pub pass_strict: bool,
    pub slack_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoEntry {
    pub name: String,
    pub value: f64,
}

/// Every certified quantity of one pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub entries: Vec<LedgerEntry>,
    pub info: Vec<InfoEntry>,
    #[serde(skip)]
    slack: Option<f64>,
}

impl BoundLedger {
    pub fn new(tol: &ToleranceProfile) -> Self {
        Self {
            slack: Some(tol.ledger_slack),
            ..Self::default()
        }
    }

    fn push(&mut self, name: &str, value: f64, bound: f64, relation: Relation, kind: EntryKind, slack: f64) {
        let (pass, pass_strict) = match relation {
            Relation::Le => (value <= bound + slack, value <= bound),
            Relation::Ge => (value >= bound - slack, value >= bound),
        };
        self.entries.push(LedgerEntry {
            name: name.to_string(),
            value,
            bound,
            relation,
            kind,
            pass: pass && value.is_finite(),
            pass_strict: pass_strict && value.is_finite(),
            slack_used: slack,
        });
    }

    fn rel_slack(&self, bound: f64) -> f64 {
        self.slack.unwrap_or(1e-7) * (1.0 + bound.abs())
    }

    /// Certified constant, `value <= bound` up to relative slack.
    pub fn bound(&mut self, name: &str, value: f64, bound: f64) {
        let s = self.rel_slack(bound);
        self.push(name, value, bound, Relation::Le, EntryKind::Bound, s);
    }

    /// Certified constant, `value >= bound` up to relative slack.
    pub fn lower_bound(&mut self, name: &str, value: f64, bound: f64) {
        let s = self.rel_slack(bound);
        self.push(name, value, bound, Relation::Ge, EntryKind::Bound, s);
    }

    pub fn step(&mut self, name: &str, value: f64, bound: f64) {
        let s = self.rel_slack(bound);
        self.push(name, value, bound, Relation::Le, EntryKind::Step, s);
    }

    pub fn lower_step(&mut self, name: &str, value: f64, bound: f64) {
        let s = self.rel_slack(bound);
        self.push(name, value, bound, Relation::Ge, EntryKind::Step, s);
    }

    /// Structural identity checked against an absolute threshold.
    pub fn sound(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, threshold, Relation::Le, EntryKind::Soundness, 0.0);
    }

    pub fn info(&mut self, name: &str, value: f64) {
        self.info.push(InfoEntry {
            name: name.to_string(),
            value,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn info_value(&self, name: &str) -> Option<f64> {
        self.info.iter().find(|e| e.name == name).map(|e| e.value)
    }

    /// Appends `other` with every name prefixed by `prefix.`.
    pub fn absorb(&mut self, prefix: &str, other: BoundLedger) {
        for mut e in other.entries {
            e.name = format!("{prefix}.{}", e.name);
            self.entries.push(e);
        }
        for mut i in other.info {
            i.name = format!("{prefix}.{}", i.name);
            self.info.push(i);
        }
    }
}
