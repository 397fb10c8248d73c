//! Prompt assembly for remote scoring.
//!
//! The prompt for a coalition keeps only the member documents, in their
//! original order and with their original ordinals, so "[Document 3]"
//! always names the same document no matter which subset is shown. The
//! output is byte-deterministic: the same (case, coalition, template)
//! always yields the identical string, which is what makes cached
//! utilities reusable across runs.

use super::OracleError;
use crate::case::QueryCase;
use crate::game::CoalitionMask;
use std::fmt::Write;

pub const DEFAULT_TEMPLATE: &str = "default";

const KNOWN_TEMPLATES: [&str; 1] = [DEFAULT_TEMPLATE];

const HEADER: &str =
    "Answer the question using only the numbered context documents. \
     If the documents do not contain the answer, say so.\n\n";

/// Render the scoring prompt for one coalition.
pub fn build_prompt(
    case: &QueryCase,
    coalition: CoalitionMask,
    template_id: &str,
) -> Result<String, OracleError> {
    if template_id != DEFAULT_TEMPLATE {
        return Err(OracleError::Config(format!(
            "unknown prompt template '{template_id}'; known templates: {}",
            KNOWN_TEMPLATES.join(", ")
        )));
    }
    if coalition.n() != case.n() {
        return Err(OracleError::Config(format!(
            "coalition over {} players rendered against a {}-document case",
            coalition.n(),
            case.n()
        )));
    }
    let mut out = String::from(HEADER);
    for idx in coalition.members() {
        let doc = &case.documents[idx];
        // Ordinals come from the document's position in the full case,
        // not its position within the coalition.
        write!(out, "[Document {}]\n{}\n\n", idx + 1, doc.text).expect("string write");
    }
    write!(out, "Question: {}\nAnswer:", case.query).expect("string write");
    Ok(out)
}
