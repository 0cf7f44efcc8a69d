//! Cohort CSV files: a header row with `id`, `time`, `event` and one column per covariate.

use std::io::Read;
use std::path::Path;

use survrank_core::data::{Cohort, CovariateSchema, SubjectRecord};

use crate::error::{CliError, CliResult};
use crate::schema_file::infer_schema;

const REQUIRED: [&str; 3] = ["id", "time", "event"];

fn record_error(row: usize, message: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("row {row}: {message}"))
}

fn parse_event(row: usize, field: &str) -> CliResult<bool> {
    match field {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(record_error(row, format!("event must be 0 or 1, got `{other}`"))),
    }
}

fn parse_number(row: usize, column: &str, field: &str) -> CliResult<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| record_error(row, format!("`{column}` is not a number: `{field}`")))?;
    if !v.is_finite() {
        return Err(record_error(row, format!("`{column}` is not finite")));
    }
    Ok(v)
}

/// Reads a cohort. Without a schema every non-reserved column becomes a covariate, with the
/// kind inferred from its values. Row numbers in errors count data rows from 1.
pub fn parse_cohort<R: Read>(reader: R, schema: Option<&CovariateSchema>) -> CliResult<Cohort> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = csv
        .headers()
        .map_err(|e| CliError::validation(format!("header: {e}")))?
        .iter()
        .map(String::from)
        .collect();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let reserved: Vec<usize> = REQUIRED
        .iter()
        .map(|name| position(name).ok_or_else(|| CliError::validation(format!("missing required column `{name}`"))))
        .collect::<CliResult<_>>()?;
    let mut seen = std::collections::BTreeSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(CliError::validation(format!("duplicate column `{h}`")));
        }
    }

    let covariate_names: Vec<String> = match schema {
        Some(s) => s.names().map(String::from).collect(),
        None => headers.iter().filter(|h| !REQUIRED.contains(&h.as_str())).cloned().collect(),
    };
    let columns: Vec<usize> = covariate_names
        .iter()
        .map(|name| position(name).ok_or_else(|| CliError::validation(format!("missing covariate column `{name}`"))))
        .collect::<CliResult<_>>()?;
    if let Some(extra) = headers
        .iter()
        .find(|h| !REQUIRED.contains(&h.as_str()) && !covariate_names.contains(h))
    {
        return Err(CliError::validation(format!("column `{extra}` is not in the schema")));
    }

    let mut records = Vec::new();
    for (k, row) in csv.records().enumerate() {
        let row_no = k + 1;
        let row = row.map_err(|e| record_error(row_no, e))?;
        if let Some(blank) = headers.iter().zip(row.iter()).find(|(_, f)| f.is_empty()) {
            return Err(record_error(row_no, format!("blank value in `{}`", blank.0)));
        }
        let x_raw = covariate_names
            .iter()
            .zip(&columns)
            .map(|(name, &c)| parse_number(row_no, name, &row[c]))
            .collect::<CliResult<Vec<f64>>>()?;
        records.push(SubjectRecord {
            id: row[reserved[0]].to_string(),
            time: parse_number(row_no, "time", &row[reserved[1]])?,
            event: parse_event(row_no, &row[reserved[2]])?,
            x_raw,
        });
    }
    if records.is_empty() {
        return Err(CliError::validation("cohort has no rows"));
    }
    let schema = match schema {
        Some(s) => s.clone(),
        None => {
            let by_column: Vec<Vec<f64>> =
                (0..covariate_names.len()).map(|k| records.iter().map(|r| r.x_raw[k]).collect()).collect();
            infer_schema(&covariate_names, &by_column)?
        }
    };
    Ok(Cohort::new(schema, records)?)
}

pub fn read_cohort(path: &Path, schema: Option<&CovariateSchema>) -> CliResult<Cohort> {
    let file = std::fs::File::open(path).map_err(|e| CliError::read(path, e))?;
    parse_cohort(file, schema).map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn render_cohort(cohort: &Cohort) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "time".to_string(), "event".to_string()];
    header.extend(cohort.schema().names().map(String::from));
    w.write_record(&header).expect("in-memory write");
    for r in cohort.records() {
        let mut row = vec![r.id.clone(), r.time.to_string(), if r.event { "1" } else { "0" }.to_string()];
        row.extend(r.x_raw.iter().map(|v| v.to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Bare outcomes for the `km` and `logrank` utilities: `time`, `event` and optionally a
/// label column. Other columns are ignored.
pub struct Outcomes {
    pub times: Vec<f64>,
    pub events: Vec<bool>,
    pub labels: Option<Vec<String>>,
}

pub fn read_outcomes(path: &Path, label_column: Option<&str>) -> CliResult<Outcomes> {
    let file = std::fs::File::open(path).map_err(|e| CliError::read(path, e))?;
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = csv.headers().map_err(|e| CliError::read(path, e))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::validation(format!("{}: missing column `{name}`", path.display())))
    };
    let (t, e) = (find("time")?, find("event")?);
    let label = label_column.map(find).transpose()?;
    let mut out = Outcomes { times: Vec::new(), events: Vec::new(), labels: label.map(|_| Vec::new()) };
    for (k, row) in csv.records().enumerate() {
        let row_no = k + 1;
        let row = row.map_err(|err| record_error(row_no, err))?;
        let time = parse_number(row_no, "time", &row[t])?;
        if time < 0.0 {
            return Err(record_error(row_no, "time must be >= 0"));
        }
        out.times.push(time);
        out.events.push(parse_event(row_no, &row[e])?);
        if let (Some(c), Some(labels)) = (label, out.labels.as_mut()) {
            if row[c].is_empty() {
                return Err(record_error(row_no, format!("blank value in `{}`", &headers[c])));
            }
            labels.push(row[c].to_string());
        }
    }
    if out.times.is_empty() {
        return Err(CliError::validation(format!("{}: no rows", path.display())));
    }
    Ok(out)
}
