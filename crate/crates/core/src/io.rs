//! Canonical wide CSV: one row per subject.
//!
//! ```text
//! subject_id,arm,x_<label_1>,...,x_<label_K+1>,d_<label_1>,...,d_<label_K+1>
//! ```
//!
//! `arm` is `1` (treatment) or `0` (control); `d_*` are `0`/`1`. Labels are
//! listed in severity order with death last; `K` is inferred from the header.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{validate_subject, Arm, ArmDataset, StateSpace, SubjectRecord};
use crate::error::{Error, Result};

/// Both arms of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    pub treated: ArmDataset,
    pub control: ArmDataset,
}

fn parse_header(headers: &csv::StringRecord) -> Result<StateSpace> {
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 4 || cols[0] != "subject_id" || cols[1] != "arm" {
        return Err(Error::HeaderMismatch(
            "expected subject_id,arm followed by x_* and d_* columns".into(),
        ));
    }
    let rest = &cols[2..];
    if !rest.len().is_multiple_of(2) {
        return Err(Error::HeaderMismatch("unequal number of x_* and d_* columns".into()));
    }
    let m = rest.len() / 2;
    let mut labels = Vec::with_capacity(m);
    for k in 0..m {
        let x = rest[k]
            .strip_prefix("x_")
            .ok_or_else(|| Error::HeaderMismatch(format!("column {:?} should start with x_", rest[k])))?;
        let d = rest[m + k]
            .strip_prefix("d_")
            .ok_or_else(|| Error::HeaderMismatch(format!("column {:?} should start with d_", rest[m + k])))?;
        if x != d {
            return Err(Error::HeaderMismatch(format!("x_{x} is paired with d_{d}")));
        }
        labels.push(x.to_string());
    }
    StateSpace::new(labels).map_err(|e| Error::HeaderMismatch(e.to_string()))
}

pub fn read_csv<R: Read>(reader: R) -> Result<TrialData> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let space = parse_header(rdr.headers()?)?;
    let m = space.n_transitions();
    let mut treated = Vec::new();
    let mut control = Vec::new();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, msg: e.to_string() }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |msg: String| Error::Parse { line, msg };
        if row.len() != 2 + 2 * m {
            return Err(parse_err(format!("expected {} fields, found {}", 2 + 2 * m, row.len())));
        }
        let id = row[0].to_string();
        if id.is_empty() {
            return Err(parse_err("empty subject_id".into()));
        }
        if !seen.insert(id.clone()) {
            return Err(parse_err(format!("duplicate subject_id {id:?}")));
        }
        let arm = row[1]
            .parse::<u8>()
            .ok()
            .and_then(Arm::from_code)
            .ok_or_else(|| parse_err(format!("arm must be 0 or 1, got {:?}", &row[1])))?;
        let times = (0..m)
            .map(|k| {
                row[2 + k]
                    .parse::<f64>()
                    .map_err(|_| parse_err(format!("bad time {:?}", &row[2 + k])))
            })
            .collect::<Result<Vec<_>>>()?;
        let events = (0..m)
            .map(|k| match &row[2 + m + k] {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(parse_err(format!("event indicator must be 0 or 1, got {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let record = SubjectRecord::new(id, arm, times, events);
        validate_subject(&record, &space).map_err(|rule| Error::RowValidation {
            line,
            subject_id: record.subject_id.clone(),
            rule,
        })?;
        match arm {
            Arm::Treatment => treated.push(record),
            Arm::Control => control.push(record),
        }
    }
    Ok(TrialData {
        treated: ArmDataset::new(Arm::Treatment, space.clone(), treated)?,
        control: ArmDataset::new(Arm::Control, space, control)?,
    })
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<TrialData> {
    read_csv(std::fs::File::open(path)?)
}

pub fn write_csv<W: Write>(writer: W, treated: &ArmDataset, control: &ArmDataset) -> Result<()> {
    if treated.state_space() != control.state_space() {
        return Err(Error::StateSpaceMismatch);
    }
    let labels = treated.state_space().labels();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject_id".to_string(), "arm".to_string()];
    header.extend(labels.iter().map(|l| format!("x_{l}")));
    header.extend(labels.iter().map(|l| format!("d_{l}")));
    w.write_record(&header)?;
    for s in treated.subjects().iter().chain(control.subjects()) {
        let mut row = vec![s.subject_id.clone(), s.arm.code().to_string()];
        row.extend(s.times.iter().map(|t| t.to_string()));
        row.extend(s.events.iter().map(|&d| if d { "1" } else { "0" }.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, treated: &ArmDataset, control: &ArmDataset) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), treated, control)
}
