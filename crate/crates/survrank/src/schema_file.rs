//! TOML schema documents.
//!
//! ```toml
//! [[covariate]]
//! name = "size"
//! kind = "continuous"
//! range = [0.1, 5.0]   # optional, generator only
//!
//! [[covariate]]
//! name = "LVI"
//! kind = "binary"
//! prevalence = 0.25    # optional, generator only
//!
//! [[group]]
//! name = "HTT"
//! members = ["HTT1_NST", "HTT2_ILC"]
//! prevalences = [0.6, 0.1]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use survrank_core::data::{Covariate, CovariateKind, CovariateSchema, OneHotGroup};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    #[serde(rename = "covariate", default)]
    covariates: Vec<CovariateEntry>,
    #[serde(rename = "group", default, skip_serializing_if = "Vec::is_empty")]
    groups: Vec<GroupEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovariateEntry {
    name: String,
    kind: CovariateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    integer: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prevalence: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupEntry {
    name: String,
    members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prevalences: Option<Vec<f64>>,
}

pub fn parse_schema(text: &str) -> CliResult<CovariateSchema> {
    let doc: SchemaDoc = toml::from_str(text).map_err(|e| CliError::validation(format!("schema: {e}")))?;
    if doc.covariates.is_empty() {
        return Err(CliError::validation("schema lists no covariates"));
    }
    let covariates: Vec<Covariate> = doc
        .covariates
        .into_iter()
        .map(|c| Covariate {
            name: c.name,
            kind: c.kind,
            range: c.range.map(|[lo, hi]| (lo, hi)),
            integer: c.integer,
            prevalence: c.prevalence,
        })
        .collect();
    let mut groups = Vec::with_capacity(doc.groups.len());
    for g in doc.groups {
        let members = g
            .members
            .iter()
            .map(|m| {
                covariates
                    .iter()
                    .position(|c| &c.name == m)
                    .ok_or_else(|| CliError::validation(format!("group `{}` names unknown covariate `{m}`", g.name)))
            })
            .collect::<CliResult<Vec<usize>>>()?;
        groups.push(OneHotGroup { name: g.name, members, prevalences: g.prevalences });
    }
    Ok(CovariateSchema::new(covariates, groups)?)
}

pub fn load_schema(path: &Path) -> CliResult<CovariateSchema> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    parse_schema(&text)
}

pub fn render_schema(schema: &CovariateSchema) -> String {
    let names: Vec<&str> = schema.names().collect();
    let doc = SchemaDoc {
        covariates: schema
            .covariates()
            .iter()
            .map(|c| CovariateEntry {
                name: c.name.clone(),
                kind: c.kind,
                range: c.range.map(|(lo, hi)| [lo, hi]),
                integer: c.integer,
                prevalence: c.prevalence,
            })
            .collect(),
        groups: schema
            .groups()
            .iter()
            .map(|g| GroupEntry {
                name: g.name.clone(),
                members: g.members.iter().map(|&m| names[m].to_string()).collect(),
                prevalences: g.prevalences.clone(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("schema documents always serialize")
}

/// Schema for a CSV without a schema file: columns holding only 0/1 become indicators,
/// everything else is continuous.
pub fn infer_schema(names: &[String], columns: &[Vec<f64>]) -> CliResult<CovariateSchema> {
    let covariates = names
        .iter()
        .zip(columns)
        .map(|(name, values)| {
            if values.iter().all(|&v| v == 0.0 || v == 1.0) {
                Covariate { name: name.clone(), kind: CovariateKind::Binary, range: None, integer: false, prevalence: None }
            } else {
                Covariate { name: name.clone(), kind: CovariateKind::Continuous, range: None, integer: false, prevalence: None }
            }
        })
        .collect();
    Ok(CovariateSchema::new(covariates, Vec::new())?)
}
