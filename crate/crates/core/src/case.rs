//! Query cases, documents, and attribution results.

use serde::{Deserialize, Serialize};

/// Relevance label attached to a retrieved document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocLabel {
    Relevant,
    HardNegative,
    SoftNegative,
    #[default]
    Unlabeled,
}

/// One retrieved document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub label: DocLabel,
}

/// Interaction structure a generated case was built around. `None` marks
/// ordinary cases with no planted document pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioTag {
    #[default]
    None,
    Redundancy,
    Complementarity,
    Synergy,
}

impl ScenarioTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioTag::None => "none",
            ScenarioTag::Redundancy => "redundancy",
            ScenarioTag::Complementarity => "complementarity",
            ScenarioTag::Synergy => "synergy",
        }
    }
}

/// One query with its retrieved documents. On disk this is a JSONL object
/// with fields `id`, `query`, `documents`, and optional `target_response`,
/// `scenario`, `positive_pair`; any fields this version does not know are
/// kept in `extra` and written back verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryCase {
    #[serde(rename = "id")]
    pub case_id: String,
    pub query: String,
    pub documents: Vec<Document>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_response: Option<String>,
    #[serde(rename = "scenario", default, skip_serializing_if = "is_no_scenario")]
    pub scenario_tag: ScenarioTag,
    /// Indices of the planted positive documents `(A, B)`; which of the two
    /// positions is listed first records the presentation order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_pair: Option<(usize, usize)>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

fn is_no_scenario(tag: &ScenarioTag) -> bool {
    *tag == ScenarioTag::None
}

impl QueryCase {
    /// Number of documents, i.e. the player count of the case's game.
    pub fn n(&self) -> usize {
        self.documents.len()
    }
}

/// Per-document attribution scores for one case, plus the bookkeeping
/// needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionVector {
    pub case_id: String,
    pub method: String,
    /// One score per document, in document order.
    pub scores: Vec<f64>,
    /// Evaluation allowance the run was given; absent for exhaustive
    /// methods that ignore budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Distinct coalition evaluations this run requested.
    pub oracle_calls: u64,
    pub seed: u64,
    /// Set when the run could not gather enough evidence for every
    /// document (budget cut sampling short, degenerate design, ...).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub low_confidence: bool,
}

/// One cached utility evaluation. Serialized as a JSONL record whose
/// `coalition_bits` is the mask's integer value in decimal, kept as a
/// string so the file format never depends on JSON number width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRecord {
    pub case_id: String,
    pub model_id: String,
    #[serde(with = "bits_as_string")]
    pub coalition_bits: u32,
    pub value: f64,
    pub token_count: u32,
}

mod bits_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &u32, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&bits.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<u32, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
