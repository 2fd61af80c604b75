//! The shipped example catalog and named finite algebras.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteBirack};
use crate::code::{parse_gauss, CodeError, GaussCode};
use crate::planar::{PlanarDiagram, PlanarError};

const CATALOG: &str = include_str!("../data/catalog.txt");
const FILES: &[(&str, &str)] = &[("flatH.pd", include_str!("../data/flatH.pd"))];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum CatalogDiagram {
    Gauss(GaussCode),
    Planar(PlanarDiagram),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub diagram: CatalogDiagram,
    pub note: String,
    pub expect: BTreeMap<String, String>,
}

impl CatalogEntry {
    pub fn code(&self) -> Option<&GaussCode> {
        match &self.diagram {
            CatalogDiagram::Gauss(c) => Some(c),
            CatalogDiagram::Planar(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("catalog line {0}: {1}")]
    Syntax(usize, String),
    #[error("catalog line {0}: {1}")]
    Code(usize, CodeError),
    #[error("catalog line {0}: {1}")]
    Planar(usize, PlanarError),
    #[error("duplicate catalog name {0:?}")]
    Duplicate(String),
    #[error("unknown catalog name {0:?}")]
    Unknown(String),
    #[error("{0}")]
    Input(CodeError),
    #[error("{0} is a planar diagram, not a Gauss code")]
    NotGauss(String),
}

/// Parses catalog text; `@file` references are looked up with `file`.
pub fn parse_catalog(text: &str, file: impl Fn(&str) -> Option<String>) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out: Vec<CatalogEntry> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| CatalogError::Syntax(lineno, "missing ':'".into()))?;
        let name = name.trim().to_string();
        let mut fields = rest.split(';').map(str::trim);
        let code = fields.next().unwrap_or("");
        let note = fields.next().unwrap_or("").to_string();
        let mut expect = BTreeMap::new();
        for kv in fields.next().unwrap_or("").split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| CatalogError::Syntax(lineno, format!("bad expectation {kv:?}")))?;
            expect.insert(k.to_string(), v.to_string());
        }
        let diagram = if let Some(path) = code.strip_prefix('@') {
            let body = file(path).ok_or_else(|| CatalogError::Syntax(lineno, format!("missing file {path}")))?;
            CatalogDiagram::Planar(PlanarDiagram::parse(&body).map_err(|e| CatalogError::Planar(lineno, e))?)
        } else {
            CatalogDiagram::Gauss(parse_gauss(code).map_err(|e| CatalogError::Code(lineno, e))?)
        };
        if out.iter().any(|e| e.name == name) {
            return Err(CatalogError::Duplicate(name));
        }
        out.push(CatalogEntry { name, diagram, note, expect });
    }
    Ok(out)
}

pub fn catalog() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        let file = |p: &str| FILES.iter().find(|(n, _)| *n == p).map(|(_, b)| b.to_string());
        parse_catalog(CATALOG, file).expect("shipped catalog parses")
    })
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    catalog().iter().find(|e| e.name == name).ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

/// A catalog name or a literal Gauss code.
pub fn resolve_code(input: &str) -> Result<GaussCode, CatalogError> {
    if let Ok(e) = lookup(input) {
        return e.code().cloned().ok_or_else(|| CatalogError::NotGauss(input.to_string()));
    }
    let looks_like_code = input.is_empty() || input.starts_with(['O', 'U', 'F', 'C', '|']);
    if !looks_like_code {
        return Err(CatalogError::Unknown(input.to_string()));
    }
    parse_gauss(input).map_err(CatalogError::Input)
}

/// Named algebras: `T<m>` trivial, `R<m>` dihedral quandle, or table text.
pub fn named_birack(name: &str) -> Result<FiniteBirack, AlgebraError> {
    let order = |s: &str| s.parse::<usize>().ok().filter(|&m| m >= 1);
    if let Some(m) = name.strip_prefix('T').and_then(order) {
        return Ok(FiniteBirack::trivial(m));
    }
    if let Some(m) = name.strip_prefix('R').and_then(order) {
        return Ok(FiniteBirack::dihedral(m));
    }
    FiniteBirack::parse_table_text(name)
}
