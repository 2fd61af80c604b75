//! JSON-ready invariant reports and the distinguishing battery.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{colorings, enumerate_biracks, enumerate_involutory_quandles, iq_colorings, FiniteBirack, InvolutoryQuandle};
use crate::alexander::{elementary_ideal_gcd, generalized_alexander, relation_matrix};
use crate::code::{CodeKind, GaussCode};
use crate::quaternion::quaternion_invariants;
use crate::statesum::{f_polynomial, state_sum_report};
use crate::surface::stats;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest crossing counts accepted per computation.
pub const STATE_SUM_CAP: usize = 24;
pub const DETERMINANT_CAP: usize = 16;
pub const MINOR_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Components,
    F,
    Bracket,
    Genus,
    Galex,
    AlexIdeal,
    Quat,
    Iq,
    Colorings,
}

impl Invariant {
    pub const ALL: [Invariant; 9] = [
        Invariant::Components,
        Invariant::F,
        Invariant::Bracket,
        Invariant::Genus,
        Invariant::Galex,
        Invariant::AlexIdeal,
        Invariant::Quat,
        Invariant::Iq,
        Invariant::Colorings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::Components => "components",
            Invariant::F => "f",
            Invariant::Bracket => "bracket",
            Invariant::Genus => "genus",
            Invariant::Galex => "galex",
            Invariant::AlexIdeal => "alex_ideal",
            Invariant::Quat => "quat",
            Invariant::Iq => "iq",
            Invariant::Colorings => "colorings",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("{what} is capped at {cap} crossings, the code has {n}")]
    ResourceCap { what: &'static str, n: usize, cap: usize },
    #[error("invariants need a classical code, got a {0:?} code")]
    NotClassical(CodeKind),
    #[error("{0}")]
    Computation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub version: String,
    pub input: String,
    pub code: String,
    pub invariants: BTreeMap<String, Value>,
}

fn cap(code: &GaussCode, what: &'static str, cap: usize) -> Result<(), ReportError> {
    let n = code.chord_count();
    if n > cap {
        return Err(ReportError::ResourceCap { what, n, cap });
    }
    Ok(())
}

/// All involutory quandles of order at most 4, in enumeration order.
pub fn small_involutory_quandles() -> &'static [InvolutoryQuandle] {
    static Q: OnceLock<Vec<InvolutoryQuandle>> = OnceLock::new();
    Q.get_or_init(|| (1..=4).flat_map(enumerate_involutory_quandles).collect())
}

/// All biquandles of order at most 3, in enumeration order.
pub fn small_biquandles() -> &'static [FiniteBirack] {
    static B: OnceLock<Vec<FiniteBirack>> = OnceLock::new();
    B.get_or_init(|| (1..=3).flat_map(|m| enumerate_biracks(m, |b| b.is_biquandle)).collect())
}

pub fn compute(code: &GaussCode, inv: Invariant) -> Result<Value, ReportError> {
    if code.kind() != CodeKind::Classical {
        return Err(ReportError::NotClassical(code.kind()));
    }
    Ok(match inv {
        Invariant::Components => json!(code.component_count()),
        Invariant::F => {
            cap(code, "the state sum", STATE_SUM_CAP)?;
            json!(f_polynomial(code).to_text(["A"]))
        }
        Invariant::Bracket => {
            cap(code, "the state sum", STATE_SUM_CAP)?;
            let r = state_sum_report(code);
            json!({
                "bracket": r.bracket.to_text(["A"]),
                "writhe": r.writhe,
                "sA": r.s_a,
                "sB": r.s_b,
                "atom_genus": r.atom_genus.to_string(),
                "orientable": r.orientable,
                "span": r.span,
                "bound": r.bound,
            })
        }
        Invariant::Genus => {
            let s = stats(code).map_err(|e| ReportError::Computation(e.to_string()))?;
            json!({ "n": s.n, "g": s.g, "components": s.components })
        }
        Invariant::Galex => {
            cap(code, "the Alexander determinant", DETERMINANT_CAP)?;
            json!(generalized_alexander(code).to_text(["s", "t"]))
        }
        Invariant::AlexIdeal => {
            cap(code, "the Alexander minors", MINOR_CAP)?;
            let text = match relation_matrix(code) {
                Ok(m) if m.is_square() => elementary_ideal_gcd(&m, 1).to_text(["s", "t"]),
                _ => "1".to_string(),
            };
            json!(text)
        }
        Invariant::Quat => {
            cap(code, "the quaternionic minors", MINOR_CAP)?;
            let q = quaternion_invariants(code).map_err(|e| ReportError::Computation(e.to_string()))?;
            json!({ "study_det": q.study_det_text(), "codim1_gcd": q.codim1_gcd_text() })
        }
        Invariant::Iq => json!(small_involutory_quandles().iter().map(|q| iq_colorings(code, q)).collect::<Vec<_>>()),
        Invariant::Colorings => json!(small_biquandles().iter().map(|b| colorings(code, b)).collect::<Vec<_>>()),
    })
}

pub fn report(input: &str, code: &GaussCode, which: &[Invariant]) -> Result<InvariantReport, ReportError> {
    let mut invariants = BTreeMap::new();
    for &inv in which {
        invariants.insert(inv.name().to_string(), compute(code, inv)?);
    }
    Ok(InvariantReport { version: REPORT_VERSION.to_string(), input: input.to_string(), code: code.to_string(), invariants })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Distinct { invariant: String, left: Value, right: Value },
    Inconclusive,
}

/// Invariants compared by [`distinguish`], in order. Only quantities that
/// are unchanged by every move appear here, so the quaternionic codimension-1
/// gcd is left out.
pub const BATTERY: [&str; 7] = ["components", "f", "galex", "alex_ideal", "quat_det", "iq", "colorings"];

fn battery_value(code: &GaussCode, name: &str) -> Result<Value, ReportError> {
    match name {
        "components" => compute(code, Invariant::Components),
        "f" => compute(code, Invariant::F),
        "galex" => compute(code, Invariant::Galex),
        "alex_ideal" => compute(code, Invariant::AlexIdeal),
        "quat_det" => Ok(compute(code, Invariant::Quat)?["study_det"].clone()),
        "iq" => compute(code, Invariant::Iq),
        "colorings" => compute(code, Invariant::Colorings),
        _ => unreachable!("battery names are fixed"),
    }
}

/// Runs the battery and stops at the first disagreement. Never claims the
/// two codes are equivalent.
pub fn distinguish(a: &GaussCode, b: &GaussCode) -> Result<Verdict, ReportError> {
    for name in BATTERY {
        let (left, right) = (battery_value(a, name)?, battery_value(b, name)?);
        if left != right {
            return Ok(Verdict::Distinct { invariant: name.to_string(), left, right });
        }
    }
    Ok(Verdict::Inconclusive)
}
