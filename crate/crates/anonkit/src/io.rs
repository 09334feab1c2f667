//! File formats: JSON schemas, CSV datasets, prediction columns, model and
//! anonymizer-tree documents.
//!
//! CSV files have a header row naming every schema feature and the label in
//! any order, plus an optional `row_id` column. Cells are trimmed. Rows with
//! an empty or `?` cell are skipped and counted. Without a `row_id` column
//! kept rows are numbered from 0.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anonkit_core::anonymizer::AnonymizerTree;
use anonkit_core::learners::TrainedModel;
use anonkit_core::tabular::{Dataset, FeatureKind, Record, Schema, Value};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const ROW_ID: &str = "row_id";
pub const PREDICTION: &str = "prediction";
pub const MODEL_FORMAT_VERSION: u32 = 1;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

pub fn load_schema(path: &Path) -> Result<Schema> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    let schema: Schema = serde_json::from_str(&text)?;
    schema.validate()?;
    Ok(schema)
}

pub fn save_schema(path: &Path, schema: &Schema) -> Result<()> {
    write_json(path, schema)
}

/// A parsed CSV and the number of rows skipped for missing values.
#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub data: Dataset,
    pub skipped_rows: usize,
}

pub fn load_csv(path: &Path, schema: &Schema) -> Result<LoadedCsv> {
    read_csv(open(path)?, schema)
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<LoadedCsv> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let feature_cols = schema
        .features
        .iter()
        .map(|f| find(&f.name).ok_or_else(|| Error::Format(format!("missing column `{}`", f.name))))
        .collect::<Result<Vec<usize>>>()?;
    let label_col = find(&schema.label)
        .ok_or_else(|| Error::Format(format!("missing label column `{}`", schema.label)))?;
    let id_col = find(ROW_ID);
    if let Some(extra) = headers
        .iter()
        .find(|h| *h != ROW_ID && *h != schema.label && schema.feature_index(h).is_none())
    {
        return Err(Error::Format(format!("unknown column `{extra}`")));
    }

    let mut records = Vec::new();
    let mut skipped_rows = 0;
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        // Header is line 1.
        let line = line + 2;
        let mut cols = feature_cols.iter().copied().chain([label_col]);
        if cols.any(|c| is_missing(row.get(c).unwrap_or(""))) {
            skipped_rows += 1;
            continue;
        }
        let mut values = Vec::with_capacity(feature_cols.len());
        for (f, &c) in schema.features.iter().zip(&feature_cols) {
            let cell = &row[c];
            let v = match f.kind {
                FeatureKind::Numeric => Value::Numeric(cell.parse::<f64>().map_err(|_| {
                    Error::Format(format!("line {line}, column `{}`: `{cell}` is not a number", f.name))
                })?),
                FeatureKind::Categorical => Value::Category(f.category_index(cell).ok_or_else(|| {
                    Error::Format(format!(
                        "line {line}, column `{}`: unknown category `{cell}`",
                        f.name
                    ))
                })?),
            };
            values.push(v);
        }
        let cell = &row[label_col];
        let label = schema.class_index(cell).ok_or_else(|| {
            Error::Format(format!(
                "line {line}, column `{}`: unknown class `{cell}`",
                schema.label
            ))
        })?;
        let id = match id_col {
            Some(c) => row[c]
                .parse::<u64>()
                .map_err(|_| Error::Format(format!("line {line}: bad row_id `{}`", &row[c])))?,
            None => records.len() as u64,
        };
        records.push(Record { id, values, label });
    }
    Ok(LoadedCsv {
        data: Dataset::new(schema.clone(), records)?,
        skipped_rows,
    })
}

pub fn write_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let schema = data.schema();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![ROW_ID];
    header.extend(schema.features.iter().map(|f| f.name.as_str()));
    header.push(&schema.label);
    w.write_record(&header)?;
    let mut cells: Vec<String> = Vec::with_capacity(header.len());
    for r in data.records() {
        cells.clear();
        cells.push(r.id.to_string());
        for (f, v) in schema.features.iter().zip(&r.values) {
            cells.push(match *v {
                Value::Numeric(x) => x.to_string(),
                Value::Category(c) => f.categories[c as usize].clone(),
            });
        }
        cells.push(schema.label_classes[r.label as usize].clone());
        w.write_record(&cells)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_csv(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = create(path)?;
    write_csv(&mut out, data)?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// CSV text of `data`, as [`write_csv`] would produce it.
pub fn csv_string(data: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, data)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// Reads a one-column `prediction` file holding class names or indices.
pub fn load_predictions(path: &Path, schema: &Schema) -> Result<Vec<u32>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == PREDICTION)
        .ok_or_else(|| Error::Format(format!("{}: missing `{PREDICTION}` column", path.display())))?;
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let cell = row.get(col).unwrap_or("");
        let class = schema
            .class_index(cell)
            .or_else(|| cell.parse::<u32>().ok().filter(|&c| (c as usize) < schema.n_classes()))
            .ok_or_else(|| {
                Error::Format(format!(
                    "{} line {}: unknown class `{cell}`",
                    path.display(),
                    line + 2
                ))
            })?;
        out.push(class);
    }
    Ok(out)
}

pub fn save_predictions(path: &Path, schema: &Schema, predictions: &[u32]) -> Result<()> {
    let mut out = create(path)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record([PREDICTION])?;
    for &p in predictions {
        w.write_record([&schema.label_classes[p as usize]])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    drop(w);
    out.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    model: TrainedModel,
}

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<()> {
    write_json(
        path,
        &ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            model: model.clone(),
        },
    )
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    let doc: ModelDocument = serde_json::from_str(&text)?;
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{}: unsupported model format version {}",
            path.display(),
            doc.format_version
        )));
    }
    Ok(doc.model)
}

pub fn save_tree(path: &Path, tree: &AnonymizerTree) -> Result<()> {
    write_json(path, tree)
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// One compact JSON document per line.
pub fn write_json_lines<T: Serialize>(path: &Path, values: &[T]) -> Result<()> {
    let mut out = create(path)?;
    for v in values {
        serde_json::to_writer(&mut out, v)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}
