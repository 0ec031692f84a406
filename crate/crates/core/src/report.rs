//! Serialization of verification results.
//!
//! The report document is pretty-printed JSON whose keys follow the field
//! order of [`VerificationReport`] and [`SuiteSummary`]. The table export
//! has one row per `(trial, n)` comparison:
//!
//! ```text
//! identity_id,trial,n,rel_error,pass
//! S2,0,0,1.2e-77,true
//! ```
//!
//! An empty `rel_error` marks a trial whose evaluation raised an error.

use std::fmt::Write as _;

use crate::verifier::{SuiteSummary, VerificationReport};

pub fn report_json(r: &VerificationReport) -> String {
    serde_json::to_string_pretty(r).expect("reports are serializable")
}

pub fn summary_json(s: &SuiteSummary) -> String {
    serde_json::to_string_pretty(s).expect("reports are serializable")
}

pub const TABLE_HEADER: &str = "identity_id,trial,n,rel_error,pass";

/// Table rows for `reports`, header included.
pub fn table<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in reports {
        for t in &r.trials {
            let err = t.rel_error.map(|e| format!("{e:e}")).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", r.identity_id, t.trial, t.n, err, t.pass).expect("writing to a string");
        }
    }
    out
}
