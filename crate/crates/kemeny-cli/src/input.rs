//! Data loading: the embedded sleep study or a headed CSV file.
//!
//! Cells hold decimal numbers with a '.' separator. Inf and -Inf pass
//! through to the extended-real rank estimators; NaN and every other
//! non-numeric cell is a data error.

use std::path::Path;

use kemeny::data::{SLEEP_EXTRA, SLEEP_GROUP};
use kemeny::Sample;

use crate::args::DataArgs;
use crate::error::CliError;

/// A resolved pair of margins plus provenance for the output envelope.
pub struct PairedData {
    pub source: String,
    pub x_name: String,
    pub y_name: String,
    pub x: Sample,
    pub y: Sample,
}

struct Table {
    source: String,
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

fn embedded(name: &str) -> Result<Table, CliError> {
    match name {
        "sleep" => Ok(Table {
            source: "sleep".into(),
            headers: vec!["extra".into(), "group".into()],
            columns: vec![SLEEP_EXTRA.to_vec(), SLEEP_GROUP.to_vec()],
        }),
        other => Err(CliError::Usage(format!(
            "unknown embedded dataset '{other}' (available: sleep)"
        ))),
    }
}

fn parse_csv(path: &Path) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|err| CliError::Data(format!("cannot read {}: {err}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(CliError::Data(format!(
            "{} has no header row",
            path.display()
        )));
    }

    let mut columns = vec![Vec::new(); headers.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?;
        for (i, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!(
                    "column '{}' row {}: '{}' is not a number",
                    headers[i],
                    row + 1,
                    cell
                ))
            })?;
            columns[i].push(value);
        }
    }
    if columns[0].is_empty() {
        return Err(CliError::Data(format!(
            "{} has a header but no data rows",
            path.display()
        )));
    }
    Ok(Table {
        source: path.display().to_string(),
        headers,
        columns,
    })
}

fn table_for(args: &DataArgs) -> Result<Table, CliError> {
    match &args.data {
        Some(name) => embedded(name),
        None => parse_csv(
            args.input
                .as_deref()
                .expect("clap enforces --data or --input"),
        ),
    }
}

fn column(
    table: &Table,
    requested: Option<&str>,
    default_index: usize,
    role: &str,
) -> Result<(String, Vec<f64>), CliError> {
    match requested {
        Some(name) => {
            let index = table
                .headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "no column named '{name}' in {} (available: {})",
                        table.source,
                        table.headers.join(", ")
                    ))
                })?;
            Ok((table.headers[index].clone(), table.columns[index].clone()))
        }
        None => {
            if table.headers.len() <= default_index {
                return Err(CliError::Data(format!(
                    "{} has {} column(s); pass --{role} to pick the {role} margin",
                    table.source,
                    table.headers.len()
                )));
            }
            Ok((
                table.headers[default_index].clone(),
                table.columns[default_index].clone(),
            ))
        }
    }
}

fn sample_from(name: &str, values: Vec<f64>) -> Result<Sample, CliError> {
    Sample::new(values).map_err(|err| CliError::Data(format!("column '{name}': {err}")))
}

/// Both margins: `--x` and `--y`, defaulting to the first two columns.
pub fn load_pair(args: &DataArgs) -> Result<PairedData, CliError> {
    let table = table_for(args)?;
    let (x_name, xs) = column(&table, args.x.as_deref(), 0, "x")?;
    let (y_name, ys) = column(&table, args.y.as_deref(), 1, "y")?;
    let x = sample_from(&x_name, xs)?;
    let y = sample_from(&y_name, ys)?;
    Ok(PairedData {
        source: table.source,
        x_name,
        y_name,
        x,
        y,
    })
}

/// One margin plus a reference ordering: the `--y` column when given,
/// otherwise the identity ordering 1..n.
pub fn load_one_sample(args: &DataArgs) -> Result<PairedData, CliError> {
    let table = table_for(args)?;
    let (x_name, xs) = column(&table, args.x.as_deref(), 0, "x")?;
    let x = sample_from(&x_name, xs)?;
    let (y_name, y) = match args.y.as_deref() {
        Some(name) => {
            let (y_name, ys) = column(&table, Some(name), 1, "y")?;
            let y = sample_from(&y_name, ys)?;
            (y_name, y)
        }
        None => {
            let identity = Sample::new((1..=x.len()).map(|i| i as f64).collect())
                .map_err(|err| CliError::Data(err.to_string()))?;
            ("identity".to_string(), identity)
        }
    };
    Ok(PairedData {
        source: table.source,
        x_name,
        y_name,
        x,
        y,
    })
}
