//! Persistence and export: JSONL record streams, run manifests with
//! content hashes, CSV/Markdown table export with round-trip import, and
//! the query filter over stored records.

use crate::linalg::Rat;
use crate::period::PeriodSequence;
use crate::poly::{rat_from_string, rat_to_string};
use crate::search::{Bucket, ClassificationRecord, ZeroLocusRecord};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("malformed filter: {0}")]
    MalformedFilter(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Writes one JSON document per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), StoreError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        file.write_all(line.as_bytes())?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

/// Reads a JSONL file produced by [`write_jsonl`].
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| StoreError::MalformedRecord {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Run manifest: parameters, input hashes, and the content hash of the
/// produced data file. Reruns with equal parameters must reproduce the
/// same `output_sha256`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub stage: String,
    pub parameters: serde_json::Value,
    pub input_sha256: Option<String>,
    pub output_sha256: String,
    /// Content hash of a secondary output, when the stage has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_sha256: Option<String>,
    pub record_count: usize,
    pub started_at_epoch_s: u64,
    pub finished_at_epoch_s: u64,
}

impl Manifest {
    /// Whether a stored manifest matches the stage and parameters and its
    /// recorded output hash matches the file on disk.
    pub fn is_valid_for(
        &self,
        stage: &str,
        parameters: &serde_json::Value,
        output: &Path,
        hash: impl Fn(&Path) -> Option<String>,
    ) -> bool {
        self.stage == stage
            && &self.parameters == parameters
            && hash(output).as_deref() == Some(self.output_sha256.as_str())
    }
}

/// One exported table row: bucket id, the first eight regularized period
/// coefficients, the representative model, and the classical invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub bucket: u64,
    pub alpha: Vec<String>,
    pub quiver_id: u64,
    pub bundle: String,
    pub degree: i64,
    pub euler: i64,
    pub chi_k: i64,
    pub chi_2k: i64,
    pub members: usize,
}

/// Flattens buckets into presentation rows (first eight coefficients).
pub fn table_rows(buckets: &[Bucket]) -> Vec<TableRow> {
    buckets
        .iter()
        .map(|b| {
            let mut alpha = b.alpha.to_strings();
            alpha.truncate(8);
            TableRow {
                bucket: b.id,
                alpha,
                quiver_id: b.representative.0,
                bundle: serde_json::to_string(&b.representative.1).expect("bundle serializes"),
                degree: b.degree,
                euler: b.euler,
                chi_k: b.chi_k,
                chi_2k: b.chi_2k,
                members: b.members,
            }
        })
        .collect()
}

/// Writes the bucket table as CSV. Empty input produces a header-only
/// file.
pub fn export_csv(path: &Path, rows: &[TableRow]) -> Result<(), StoreError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "bucket", "alpha_0", "alpha_1", "alpha_2", "alpha_3", "alpha_4", "alpha_5", "alpha_6",
        "alpha_7", "quiver_id", "bundle", "degree", "euler", "chi_k", "chi_2k", "members",
    ])?;
    for r in rows {
        let mut alpha = r.alpha.clone();
        alpha.resize(8, "0".to_string());
        let mut record = vec![r.bucket.to_string()];
        record.extend(alpha);
        record.push(r.quiver_id.to_string());
        record.push(r.bundle.clone());
        record.push(r.degree.to_string());
        record.push(r.euler.to_string());
        record.push(r.chi_k.to_string());
        record.push(r.chi_2k.to_string());
        record.push(r.members.to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV produced by [`export_csv`] back into rows.
pub fn import_csv(path: &Path) -> Result<Vec<TableRow>, StoreError> {
    let file = std::fs::File::open(path)?;
    import_csv_reader(file)
}

/// As [`import_csv`], from any reader.
pub fn import_csv_reader(reader: impl std::io::Read) -> Result<Vec<TableRow>, StoreError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (idx, record) in r.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<&str, StoreError> {
            record.get(k).ok_or_else(|| StoreError::MalformedRecord {
                line: idx + 2,
                message: format!("missing column {k}"),
            })
        };
        let parse_i64 = |k: usize| -> Result<i64, StoreError> {
            field(k)?.parse().map_err(|_| StoreError::MalformedRecord {
                line: idx + 2,
                message: format!("bad integer in column {k}"),
            })
        };
        let alpha: Vec<String> = (1..=8)
            .map(|k| field(k).map(str::to_string))
            .collect::<Result<_, _>>()?;
        for a in &alpha {
            if rat_from_string(a).is_none() {
                return Err(StoreError::MalformedRecord {
                    line: idx + 2,
                    message: format!("bad rational {a:?}"),
                });
            }
        }
        out.push(TableRow {
            bucket: parse_i64(0)? as u64,
            alpha,
            quiver_id: parse_i64(9)? as u64,
            bundle: field(10)?.to_string(),
            degree: parse_i64(11)?,
            euler: parse_i64(12)?,
            chi_k: parse_i64(13)?,
            chi_2k: parse_i64(14)?,
            members: parse_i64(15)? as usize,
        });
    }
    Ok(out)
}

/// Writes the bucket table as a Markdown table.
pub fn export_markdown(path: &Path, rows: &[TableRow]) -> Result<(), StoreError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "| bucket | alpha_0..alpha_7 | quiver | bundle | degree | euler | chi(-K) | chi(-2K) | members |"
    )?;
    writeln!(f, "|---|---|---|---|---|---|---|---|---|")?;
    for r in rows {
        writeln!(
            f,
            "| {} | {} | {} | `{}` | {} | {} | {} | {} | {} |",
            r.bucket,
            r.alpha.join(", "),
            r.quiver_id,
            r.bundle,
            r.degree,
            r.euler,
            r.chi_k,
            r.chi_2k,
            r.members
        )?;
    }
    f.flush()?;
    Ok(())
}

/// Filter over stored zero locus records. All present conditions must
/// hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryFilter {
    pub dimension: Option<i64>,
    pub picard_rank: Option<usize>,
    pub degree_min: Option<i64>,
    pub degree_max: Option<i64>,
    pub alpha_prefix: Option<Vec<Rat>>,
}

impl QueryFilter {
    /// Parses the `alpha_prefix` clause from a comma-separated list of
    /// exact rationals.
    pub fn parse_alpha_prefix(s: &str) -> Result<Vec<Rat>, StoreError> {
        s.split(',')
            .map(|p| {
                rat_from_string(p).ok_or_else(|| {
                    StoreError::MalformedFilter(format!("bad rational {:?} in alpha prefix", p))
                })
            })
            .collect()
    }

    /// Applies the filter; dimension and rank come from the classification
    /// record the zero locus points at.
    pub fn matches(&self, record: &ZeroLocusRecord, quiver: &ClassificationRecord) -> bool {
        if let Some(d) = self.dimension {
            // The zero locus dimension is 4 in fourfold mode, but the query
            // dimension refers to the ambient classification record.
            if quiver.dimension != d {
                return false;
            }
        }
        if let Some(r) = self.picard_rank {
            if quiver.picard_rank != r {
                return false;
            }
        }
        if let Some(lo) = self.degree_min {
            if record.degree < lo {
                return false;
            }
        }
        if let Some(hi) = self.degree_max {
            if record.degree > hi {
                return false;
            }
        }
        if let Some(prefix) = &self.alpha_prefix {
            if record.alpha.alpha.len() < prefix.len() {
                return false;
            }
            if record.alpha.alpha[..prefix.len()] != prefix[..] {
                return false;
            }
        }
        true
    }
}

/// Streams the records matching a filter, in stable id order.
pub fn query<'a>(
    records: &'a [ZeroLocusRecord],
    index: &'a [ClassificationRecord],
    filter: &QueryFilter,
) -> Vec<&'a ZeroLocusRecord> {
    let by_id: std::collections::HashMap<u64, &ClassificationRecord> =
        index.iter().map(|r| (r.id, r)).collect();
    let mut out: Vec<&ZeroLocusRecord> = records
        .iter()
        .filter(|r| {
            by_id
                .get(&r.quiver_id)
                .is_some_and(|q| filter.matches(r, q))
        })
        .collect();
    out.sort_by_key(|r| (r.quiver_id, r.bucket));
    out
}

/// Serializes a period sequence for storage.
pub fn alpha_strings(p: &PeriodSequence) -> Vec<String> {
    p.alpha.iter().map(rat_to_string).collect()
}
