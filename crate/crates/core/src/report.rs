use serde::{Deserialize, Serialize};

/// The modulus `p^s` a congruence was checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus {
    pub p: u64,
    pub s: u32,
}

/// First offending monomial of a failed check, with the offending residue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub monomial: String,
    pub residue: String,
}

/// Verdict of a single identity or congruence check.
///
/// `modulus` is `None` for exact integer identities. A passing report never
/// carries a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub description: String,
    pub modulus: Option<Modulus>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_valuation: Option<u32>,
}

impl CongruenceReport {
    pub fn pass(description: impl Into<String>, modulus: Option<Modulus>) -> Self {
        CongruenceReport {
            description: description.into(),
            modulus,
            pass: true,
            witness: None,
            observed_valuation: None,
        }
    }

    pub fn fail(description: impl Into<String>, modulus: Option<Modulus>, witness: Witness) -> Self {
        CongruenceReport {
            description: description.into(),
            modulus,
            pass: false,
            witness: Some(witness),
            observed_valuation: None,
        }
    }

    /// Builds a report from an optional witness: no witness means pass.
    pub fn from_witness(
        description: impl Into<String>,
        modulus: Option<Modulus>,
        witness: Option<Witness>,
    ) -> Self {
        match witness {
            None => Self::pass(description, modulus),
            Some(w) => Self::fail(description, modulus, w),
        }
    }

    pub fn with_valuation(mut self, v: Option<u32>) -> Self {
        self.observed_valuation = v;
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Combines several reports into one verdict: pass iff all pass; the
    /// first failure's witness is kept.
    pub fn all(description: impl Into<String>, modulus: Option<Modulus>, parts: &[CongruenceReport]) -> Self {
        let first_fail = parts.iter().find(|r| !r.pass);
        let valuation = parts.iter().filter_map(|r| r.observed_valuation).min();
        let mut out = match first_fail {
            None => Self::pass(description, modulus),
            Some(r) => {
                let mut w = r.witness.clone().unwrap_or(Witness {
                    monomial: String::new(),
                    residue: String::new(),
                });
                if !r.description.is_empty() {
                    w.monomial = format!("{} [{}]", w.monomial, r.description);
                }
                Self::fail(description, modulus, w)
            }
        };
        out.observed_valuation = valuation;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_has_no_witness() {
        let r = CongruenceReport::pass("x", Some(Modulus { p: 3, s: 1 }));
        assert!(r.pass && r.witness.is_none());
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"description":"x","modulus":{"p":3,"s":1},"pass":true}"#);
    }

    #[test]
    fn combined_verdict() {
        let ok = CongruenceReport::pass("a", None);
        let bad = CongruenceReport::fail(
            "b",
            None,
            Witness { monomial: "t1".into(), residue: "3".into() },
        );
        assert!(CongruenceReport::all("both", None, &[ok.clone(), ok.clone()]).pass);
        let c = CongruenceReport::all("both", None, &[ok, bad]);
        assert!(!c.pass);
        assert_eq!(c.witness.unwrap().residue, "3");
    }
}
