use serde::Serialize;

/// Outcome of a bounded search for `t` in a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Membership {
    /// A bounded orbit was found; `word` leads from the start to a repeating configuration.
    In { word: Vec<String>, cycle_start: usize },
    /// Every branch leaves the hull within `depth` steps.
    Out { depth: usize },
    Unknown { explored: usize },
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In { .. })
    }

    pub fn is_out(&self) -> bool {
        matches!(self, Membership::Out { .. })
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Membership::Unknown { .. })
    }
}
