//! JSON input and output for matrix sets and orbit closures, and atomic file
//! writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use jsrkit_core::cocycle::PeriodicWord;
use jsrkit_core::symbolic::{OrbitClosure, Rational};
use jsrkit_core::{Complex64, ComplexMatrix, MatrixSet};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    d: usize,
    matrices: Vec<MatrixEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixEntry {
    label: String,
    rows: Vec<Vec<[Value; 2]>>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A JSON number, or a string spelling one (so that NaN and infinities can
/// be written down and rejected by value).
fn entry_value(v: &Value, label: &str, i: usize, j: usize) -> Result<f64, CliError> {
    let x = match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::Value(format!("matrix {label}: entry ({i}, {j}) is not representable")))?,
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Schema(format!("matrix {label}: entry ({i}, {j}) is not a number: {s:?}")))?,
        other => {
            return Err(CliError::Schema(format!(
                "matrix {label}: entry ({i}, {j}) must be a number, got {other}"
            )))
        }
    };
    if !x.is_finite() {
        return Err(CliError::Value(format!("matrix {label}: entry ({i}, {j}) is {x}")));
    }
    Ok(x)
}

pub fn parse_matrix_set(text: &str) -> Result<MatrixSet, CliError> {
    let file: MatrixFile = parse_json(text)?;
    if file.d == 0 {
        return Err(CliError::Schema("d must be at least 1".into()));
    }
    if file.matrices.is_empty() {
        return Err(CliError::Schema("matrices must be nonempty".into()));
    }
    let mut mats = Vec::with_capacity(file.matrices.len());
    let mut labels = Vec::with_capacity(file.matrices.len());
    for m in &file.matrices {
        if m.rows.len() != file.d {
            return Err(CliError::Schema(format!(
                "matrix {}: {} rows, expected {}",
                m.label,
                m.rows.len(),
                file.d
            )));
        }
        let mut data = Vec::with_capacity(file.d * file.d);
        for (i, row) in m.rows.iter().enumerate() {
            if row.len() != file.d {
                return Err(CliError::Schema(format!(
                    "matrix {}: row {i} has {} entries, expected {}",
                    m.label,
                    row.len(),
                    file.d
                )));
            }
            for (j, [re, im]) in row.iter().enumerate() {
                data.push(Complex64::new(
                    entry_value(re, &m.label, i, j)?,
                    entry_value(im, &m.label, i, j)?,
                ));
            }
        }
        mats.push(ComplexMatrix::new(file.d, file.d, data).map_err(CliError::Core)?);
        labels.push(m.label.clone());
    }
    MatrixSet::with_labels(mats, labels).map_err(CliError::Core)
}

pub fn load_matrix_set(path: &Path) -> Result<MatrixSet, CliError> {
    parse_matrix_set(&read(path)?)
}

/// JSON text that [`parse_matrix_set`] reads back bit for bit.
pub fn emit_matrix_set(set: &MatrixSet) -> String {
    let d = set.dim();
    let matrices: Vec<Value> = set
        .matrices()
        .iter()
        .zip(set.labels())
        .map(|(m, label)| {
            let rows: Vec<Value> = (0..d)
                .map(|i| (0..d).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())
                .collect();
            json!({ "label": label, "rows": rows })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "d": d, "matrices": matrices }))
        .expect("finite numbers always serialize");
    text.push('\n');
    text
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum OrbitFile {
    Periodic {
        #[serde(default = "two")]
        alphabet: usize,
        orbits: Vec<Vec<usize>>,
    },
    Sturmian {
        convergents: Vec<String>,
    },
}

fn two() -> usize {
    2
}

pub fn parse_convergents(items: &[String]) -> Result<Vec<Rational>, CliError> {
    items
        .iter()
        .map(|s| s.parse::<Rational>().map_err(|e| CliError::Schema(e.to_string())))
        .collect()
}

/// Orbit closure files: `{"kind": "sturmian", "convergents": ["1/2", ...]}`
/// or `{"kind": "periodic", "alphabet": 2, "orbits": [[0, 1], ...]}`.
pub fn parse_orbit_closure(text: &str) -> Result<OrbitClosure, CliError> {
    match parse_json::<OrbitFile>(text)? {
        OrbitFile::Periodic { alphabet, orbits } => {
            let words = orbits
                .into_iter()
                .map(|c| PeriodicWord::new(c).map_err(|e| CliError::Schema(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            OrbitClosure::periodic(words, alphabet).map_err(|e| CliError::Schema(e.to_string()))
        }
        OrbitFile::Sturmian { convergents } => OrbitClosure::sturmian(parse_convergents(&convergents)?)
            .map_err(|e| CliError::Schema(e.to_string())),
    }
}

pub fn load_orbit_closure(path: &Path) -> Result<OrbitClosure, CliError> {
    parse_orbit_closure(&read(path)?)
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so `path` holds either nothing new or the whole output.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    fill(tmp.as_file_mut()).map_err(io_err)?;
    tmp.as_file_mut().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
