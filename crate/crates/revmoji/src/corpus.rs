//! Dataset ingestion, validation, subset construction, and persistence.
//!
//! Comment datasets load from CSV (RFC 4180) or JSONL into a unified
//! schema: `id,text,useful,sentiment,source` plus an optional `provenance`
//! column written by augmentation. A manifest summarizing size, class
//! balance, and emoji presence is computed at load and written as a JSON
//! sidecar next to saved datasets.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::{normalize_comment, CodecTables};
use crate::error::{Error, Result};

/// One code review comment with its labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub id: String,
    pub text: String,
    /// 1 = useful, 0 = not useful.
    pub useful: u8,
    /// Optional sentiment annotation: -1, 0, or 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<i8>,
    /// Originating dataset tag.
    pub source: String,
    /// Augmentation provenance: a rule id, `original`, or `none`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// Summary written alongside a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub size: usize,
    /// Comments whose normalized text carries at least one emoji token.
    pub emoji_comment_count: usize,
    pub useful_count: usize,
    pub not_useful_count: usize,
    /// Rows with empty text, kept but flagged.
    pub empty_text_count: usize,
}

/// An immutable, validated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<CommentRecord>,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Jsonl,
}

impl DatasetFormat {
    /// Infer from the file extension; `.jsonl`/`.json` mean JSONL,
    /// everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => DatasetFormat::Jsonl,
            _ => DatasetFormat::Csv,
        }
    }
}

impl Dataset {
    /// Assemble and validate a dataset from records. Duplicate ids are
    /// rejected; the manifest is computed with the codec tables.
    pub fn from_records(
        name: &str,
        records: Vec<CommentRecord>,
        tables: &CodecTables,
    ) -> Result<Self> {
        let mut seen: HashSet<&str> = HashSet::with_capacity(records.len());
        for (row, rec) in records.iter().enumerate() {
            if !seen.insert(&rec.id) {
                return Err(Error::DuplicateId {
                    id: rec.id.clone(),
                    row: row + 1,
                });
            }
        }
        let manifest = build_manifest(name, &records, tables);
        Ok(Dataset { records, manifest })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.manifest.name
    }
}

fn build_manifest(name: &str, records: &[CommentRecord], tables: &CodecTables) -> Manifest {
    let mut emoji_comment_count = 0usize;
    let mut useful_count = 0usize;
    let mut empty_text_count = 0usize;
    for rec in records {
        if normalize_comment(&rec.text, tables).has_emoji() {
            emoji_comment_count += 1;
        }
        if rec.useful == 1 {
            useful_count += 1;
        }
        if rec.text.is_empty() {
            empty_text_count += 1;
        }
    }
    Manifest {
        name: name.to_string(),
        size: records.len(),
        emoji_comment_count,
        useful_count,
        not_useful_count: records.len() - useful_count,
        empty_text_count,
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}

/// Load and validate a dataset. Row order is preserved; the dataset name
/// is the file stem and doubles as the default `source` tag.
pub fn load_dataset(path: &Path, format: DatasetFormat, tables: &CodecTables) -> Result<Dataset> {
    let name = dataset_name(path);
    let records = match format {
        DatasetFormat::Csv => read_csv_records(path, &name)?,
        DatasetFormat::Jsonl => read_jsonl_records(path, &name)?,
    };
    Dataset::from_records(&name, records, tables)
}

fn parse_useful(raw: &str, path: &Path, row: usize) -> Result<u8> {
    match raw.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::parse(
            path,
            row,
            format!("useful label must be 0 or 1, got `{other}`"),
        )),
    }
}

fn parse_sentiment(raw: &str, path: &Path, row: usize) -> Result<Option<i8>> {
    match raw.trim() {
        "" => Ok(None),
        "-1" => Ok(Some(-1)),
        "0" => Ok(Some(0)),
        "1" => Ok(Some(1)),
        other => Err(Error::parse(
            path,
            row,
            format!("sentiment must be -1, 0, or 1, got `{other}`"),
        )),
    }
}

fn read_csv_records(path: &Path, default_source: &str) -> Result<Vec<CommentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = col("id").ok_or_else(|| Error::parse(path, 1, "missing `id` column"))?;
    let text_col = col("text").ok_or_else(|| Error::parse(path, 1, "missing `text` column"))?;
    let useful_col =
        col("useful").ok_or_else(|| Error::parse(path, 1, "missing `useful` column"))?;
    let sentiment_col = col("sentiment");
    let source_col = col("source");
    let provenance_col = col("provenance");

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 2; // 1-based, after the header
        let row = row.map_err(|e| Error::parse(path, row_no, e.to_string()))?;
        let get = |c: usize| row.get(c).unwrap_or("");
        let useful = parse_useful(
            row.get(useful_col)
                .ok_or_else(|| Error::parse(path, row_no, "missing useful label"))?,
            path,
            row_no,
        )?;
        let sentiment = match sentiment_col {
            Some(c) => parse_sentiment(get(c), path, row_no)?,
            None => None,
        };
        let source = source_col
            .map(|c| get(c).trim())
            .filter(|s| !s.is_empty())
            .unwrap_or(default_source)
            .to_string();
        let provenance = provenance_col
            .map(|c| get(c).to_string())
            .filter(|s| !s.is_empty());
        records.push(CommentRecord {
            id: get(id_col).to_string(),
            text: get(text_col).to_string(),
            useful,
            sentiment,
            source,
            provenance,
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
struct JsonlRow {
    id: String,
    text: String,
    useful: serde_json::Value,
    #[serde(default)]
    sentiment: Option<i8>,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    provenance: Option<String>,
}

fn read_jsonl_records(path: &Path, default_source: &str) -> Result<Vec<CommentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let row_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonlRow = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, row_no, e.to_string()))?;
        let useful = match &row.useful {
            serde_json::Value::Number(n) if n.as_u64() == Some(0) => 0,
            serde_json::Value::Number(n) if n.as_u64() == Some(1) => 1,
            other => {
                return Err(Error::parse(
                    path,
                    row_no,
                    format!("useful label must be 0 or 1, got `{other}`"),
                ))
            }
        };
        if let Some(s) = row.sentiment {
            if !(-1..=1).contains(&s) {
                return Err(Error::parse(
                    path,
                    row_no,
                    format!("sentiment must be -1, 0, or 1, got `{s}`"),
                ));
            }
        }
        records.push(CommentRecord {
            id: row.id,
            text: row.text,
            useful,
            sentiment: row.sentiment,
            source: row
                .source
                .filter(|s| !s.is_empty())
                .unwrap_or_else(|| default_source.to_string()),
            provenance: row.provenance.filter(|s| !s.is_empty()),
        });
    }
    Ok(records)
}

/// Union, in input order, of all records whose normalized comment carries
/// at least one emoji token. Source tags are preserved.
pub fn filter_emoji_only(datasets: &[Dataset], tables: &CodecTables) -> Result<Dataset> {
    let mut records = Vec::new();
    for ds in datasets {
        for rec in &ds.records {
            if normalize_comment(&rec.text, tables).has_emoji() {
                records.push(rec.clone());
            }
        }
    }
    // ids may collide across sources; qualify only when they do
    let mut seen: HashSet<String> = HashSet::new();
    for rec in &mut records {
        if !seen.insert(rec.id.clone()) {
            let qualified = format!("{}:{}", rec.source, rec.id);
            rec.id = qualified;
            seen.insert(rec.id.clone());
        }
    }
    Dataset::from_records("d_all", records, tables)
}

/// Write a dataset plus its `<stem>.manifest.json` sidecar. Loading the
/// result reproduces the records field for field.
pub fn write_dataset(dataset: &Dataset, path: &Path, format: DatasetFormat) -> Result<()> {
    let has_provenance = dataset.records.iter().any(|r| r.provenance.is_some());
    match format {
        DatasetFormat::Csv => {
            let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = csv::Writer::from_writer(file);
            let mut header = vec!["id", "text", "useful", "sentiment", "source"];
            if has_provenance {
                header.push("provenance");
            }
            w.write_record(&header)
                .map_err(|e| Error::parse(path, 1, e.to_string()))?;
            for rec in &dataset.records {
                let sentiment = rec.sentiment.map(|s| s.to_string()).unwrap_or_default();
                let mut row = vec![
                    rec.id.clone(),
                    rec.text.clone(),
                    rec.useful.to_string(),
                    sentiment,
                    rec.source.clone(),
                ];
                if has_provenance {
                    row.push(rec.provenance.clone().unwrap_or_default());
                }
                w.write_record(&row)
                    .map_err(|e| Error::parse(path, 1, e.to_string()))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        DatasetFormat::Jsonl => {
            let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            for rec in &dataset.records {
                let line =
                    serde_json::to_string(rec).map_err(|e| Error::parse(path, 0, e.to_string()))?;
                writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
            }
        }
    }
    let sidecar = path.with_extension("manifest.json");
    let manifest = serde_json::to_string_pretty(&dataset.manifest)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    std::fs::write(&sidecar, manifest).map_err(|e| Error::io(&sidecar, e))?;
    Ok(())
}
