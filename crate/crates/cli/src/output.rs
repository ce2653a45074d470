use dwork_core::report::{Modulus, Witness};
use dwork_core::suites::{Check, SuiteParams};
use serde::Serialize;

/// The JSON document written for one run. Field order is the serialised
/// key order.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub suite: &'a str,
    pub config: &'a SuiteParams,
    pub checks: Vec<CheckEntry<'a>>,
    pub summary: Summary,
}

#[derive(Debug, Serialize)]
pub struct CheckEntry<'a> {
    pub id: &'a str,
    pub paper_ref: &'a str,
    pub description: &'a str,
    pub modulus: Option<Modulus>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<&'a Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_valuation: Option<u32>,
}

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl<'a> Report<'a> {
    pub fn new(suite: &'a str, config: &'a SuiteParams, checks: &'a [Check]) -> Self {
        let entries: Vec<CheckEntry<'a>> = checks
            .iter()
            .map(|c| CheckEntry {
                id: &c.id,
                paper_ref: c.paper_ref,
                description: &c.report.description,
                modulus: c.report.modulus,
                pass: c.report.pass,
                witness: c.report.witness.as_ref(),
                observed_valuation: c.report.observed_valuation,
            })
            .collect();
        let passed = entries.iter().filter(|c| c.pass).count();
        let summary = Summary { total: entries.len(), passed, failed: entries.len() - passed };
        Report { suite, config, checks: entries, summary }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}
