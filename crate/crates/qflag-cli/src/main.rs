//! Command-line interface for the quiver flag variety toolkit.
//!
//! Subcommands mirror the library: validation and normal forms, nef cone
//! data, zero locus invariants, quantum periods, the classification and
//! bundle search pipeline, table export, and record queries. All inputs
//! and outputs are JSON; `-` reads from standard input. Exit code 0 means
//! success, 1 a domain error, 2 a usage error.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qflag::cohomology::zero_locus_invariants;
use qflag::cones;
use qflag::period;
use qflag::quiver::Quiver;
use qflag::schur::BundleSpec;
use qflag::search::{self, ClassificationRecord, ZeroLocusRecord};
use qflag::store::{self, Manifest, QueryFilter};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable controlling the worker pool size.
const WORKERS_ENV: &str = "QFLAG_WORKERS";

#[derive(Parser)]
#[command(
    name = "qflag",
    version,
    about = "Quiver flag varieties: classification, invariants, and quantum periods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a quiver and print its derived data.
    Validate {
        /// Path to the quiver JSON ({"adjacency": [[..]], "dim_vector": [..]}), or `-`.
        #[arg(long)]
        quiver: String,
    },
    /// Print the presentation normal form of a quiver.
    NormalForm {
        #[arg(long)]
        quiver: String,
    },
    /// Print the nef cone inequalities and extreme rays.
    Nef {
        #[arg(long)]
        quiver: String,
    },
    /// Degree, Euler number, and Euler characteristics of a zero locus.
    Invariants {
        #[arg(long)]
        quiver: String,
        /// Bundle JSON ({"summands": [[[..]]]}); omitted means the empty bundle.
        #[arg(long)]
        bundle: Option<String>,
    },
    /// Regularized quantum period coefficients.
    Period {
        #[arg(long)]
        quiver: String,
        #[arg(long)]
        bundle: Option<String>,
        /// Highest coefficient index to compute.
        #[arg(long, default_value_t = 14)]
        order: u32,
        /// Recompute with an independent specialization and compare.
        #[arg(long, default_value_t = false)]
        cross_check: bool,
    },
    /// Classify Fano quiver flag varieties up to a dimension bound.
    Classify {
        #[arg(long)]
        max_dim: i64,
        /// Output JSONL path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bundle search and invariants for one classified variety.
    Search {
        /// Id within the classification database.
        #[arg(long)]
        quiver_id: u64,
        /// Classification JSONL produced by `classify`.
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 14)]
        order: u32,
    },
    /// Full pipeline: classify, search, invariants, periods, buckets.
    Pipeline {
        #[arg(long)]
        max_dim: i64,
        #[arg(long, default_value_t = 14)]
        order: u32,
        /// Output directory for data files and manifests.
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the bucket table as CSV or Markdown.
    Export {
        /// Buckets JSONL (from the pipeline output directory).
        #[arg(long)]
        buckets: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter zero locus records.
    Query {
        /// Zero loci JSONL.
        #[arg(long)]
        db: PathBuf,
        /// Classification JSONL (for dimension and rank lookups).
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        dim: Option<i64>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        degree_min: Option<i64>,
        #[arg(long)]
        degree_max: Option<i64>,
        /// Comma-separated exact rationals, e.g. `1,0,0,0,48`.
        #[arg(long)]
        alpha_prefix: Option<String>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Csv,
    Md,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn read_input(spec: &str) -> Result<String> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))
    }
}

fn parse_quiver(spec: &str) -> Result<(Quiver, Vec<usize>)> {
    let text = read_input(spec)?;
    let raw: serde_json::Value = serde_json::from_str(&text).context("parsing quiver JSON")?;
    let adjacency: Vec<Vec<i64>> = serde_json::from_value(
        raw.get("adjacency")
            .cloned()
            .ok_or_else(|| anyhow!("missing \"adjacency\""))?,
    )
    .context("parsing adjacency")?;
    let dim_vector: Vec<i64> = serde_json::from_value(
        raw.get("dim_vector")
            .cloned()
            .ok_or_else(|| anyhow!("missing \"dim_vector\""))?,
    )
    .context("parsing dim_vector")?;
    let (q, perm) = Quiver::new(adjacency, dim_vector)?;
    Ok((q, perm))
}

fn parse_bundle(spec: &Option<String>, q: &Quiver) -> Result<BundleSpec> {
    let Some(spec) = spec else {
        return Ok(BundleSpec::empty());
    };
    let text = read_input(spec)?;
    let bundle: BundleSpec = serde_json::from_str(&text).context("parsing bundle JSON")?;
    bundle.validate(q)?;
    Ok(bundle)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { quiver } => {
            let (q, perm) = parse_quiver(&quiver)?;
            let data = q.variety_data();
            print_json(&json!({
                "quiver": q,
                "permutation": perm,
                "data": data,
                "fano": cones::is_fano(&q),
            }));
        }
        Command::NormalForm { quiver } => {
            let (q, _) = parse_quiver(&quiver)?;
            let (nf, perm) = q.normal_form();
            print_json(&json!({
                "adjacency": nf.adjacency_rows(),
                "dim_vector": nf.dim_vector,
                "permutation": perm,
            }));
        }
        Command::Nef { quiver } => {
            let (q, _) = parse_quiver(&quiver)?;
            let cone = cones::nef_cone(&q);
            let rays = cones::cone_rays(&cone)?;
            print_json(&json!({
                "inequalities": cone.inequalities,
                "rays": rays.rays,
                "anticanonical": q.anticanonical(),
                "fano": cones::is_fano(&q),
            }));
        }
        Command::Invariants { quiver, bundle } => {
            let (q, _) = parse_quiver(&quiver)?;
            let e = parse_bundle(&bundle, &q)?;
            let inv = zero_locus_invariants(&q, &e, None)?;
            print_json(&json!({
                "dimension": q.dimension() - e.rank(&q)?,
                "degree": inv.degree,
                "euler": inv.euler,
                "chi_o": inv.chi_o,
                "chi_k": inv.chi_k,
                "chi_2k": inv.chi_2k,
            }));
        }
        Command::Period {
            quiver,
            bundle,
            order,
            cross_check,
        } => {
            let (q, _) = parse_quiver(&quiver)?;
            let e = parse_bundle(&bundle, &q)?;
            let seq = if cross_check {
                period::cross_check_specialization(&q, &e, order)?
            } else {
                period::period_sequence(&q, &e, order)?
            };
            print_json(&json!({ "alpha": seq.to_strings() }));
        }
        Command::Classify { max_dim, out } => {
            let records = search::classify_fano(max_dim);
            store::write_jsonl(&out, &records)?;
            let counts = search::count_by_dim_rank(&records);
            for ((d, r), c) in &counts {
                eprintln!("dimension {d} rank {r}: {c}");
            }
            eprintln!("total: {} -> {}", records.len(), out.display());
        }
        Command::Search {
            quiver_id,
            db,
            out,
            order,
        } => {
            let index: Vec<ClassificationRecord> = store::read_jsonl(&db)?;
            let record = index
                .iter()
                .find(|r| r.id == quiver_id)
                .ok_or_else(|| anyhow!("no record with id {quiver_id}"))?;
            let results = search_one(record, order)?;
            store::write_jsonl(&out, &results)?;
            eprintln!("{} zero loci -> {}", results.len(), out.display());
        }
        Command::Pipeline { max_dim, order, out } => {
            run_pipeline(max_dim, order, &out)?;
        }
        Command::Export {
            buckets,
            format,
            out,
        } => {
            let buckets: Vec<search::Bucket> = store::read_jsonl(&buckets)?;
            let rows = store::table_rows(&buckets);
            match format {
                ExportFormat::Csv => store::export_csv(&out, &rows)?,
                ExportFormat::Md => store::export_markdown(&out, &rows)?,
            }
            eprintln!("{} rows -> {}", rows.len(), out.display());
        }
        Command::Query {
            db,
            index,
            dim,
            rank,
            degree_min,
            degree_max,
            alpha_prefix,
        } => {
            let records: Vec<ZeroLocusRecord> = store::read_jsonl(&db)?;
            let index: Vec<ClassificationRecord> = store::read_jsonl(&index)?;
            let filter = QueryFilter {
                dimension: dim,
                picard_rank: rank,
                degree_min,
                degree_max,
                alpha_prefix: match alpha_prefix {
                    None => None,
                    Some(s) => Some(QueryFilter::parse_alpha_prefix(&s)?),
                },
            };
            for r in store::query(&records, &index, &filter) {
                println!("{}", serde_json::to_string(r)?);
            }
        }
    }
    Ok(())
}

/// Bundle search plus invariants and periods for one classified quiver.
fn search_one(record: &ClassificationRecord, order: u32) -> Result<Vec<ZeroLocusRecord>> {
    let q = record.quiver();
    if q.dimension() < 4 {
        return Ok(Vec::new());
    }
    let bundles = search::search_bundles(&q);
    let mut out = Vec::new();
    for e in bundles {
        if search::is_known_empty(&q, &e) {
            continue;
        }
        if let Some(rec) = evaluate_zero_locus(record.id, &q, &e, order)? {
            out.push(rec);
        }
    }
    out.sort_by(|a, b| a.bundle.cmp(&b.bundle));
    Ok(out)
}

/// Invariants and period for one (quiver, bundle) pair; returns records
/// only for loci that pass the connectedness screen.
fn evaluate_zero_locus(
    quiver_id: u64,
    q: &Quiver,
    e: &BundleSpec,
    order: u32,
) -> Result<Option<ZeroLocusRecord>> {
    let (simple_q, simple_e) = search::simplify_model(q, e);
    let inv = zero_locus_invariants(&simple_q, &simple_e, Some(4))?;
    if inv.chi_o != 1 {
        return Ok(None);
    }
    let alpha = period::period_sequence(&simple_q, &simple_e, order)?;
    let (_, canonical) = e.normal_form(q);
    Ok(Some(ZeroLocusRecord {
        quiver_id,
        bundle: canonical,
        degree: inv.degree,
        euler: inv.euler,
        chi_o: inv.chi_o,
        chi_k: inv.chi_k,
        chi_2k: inv.chi_2k,
        alpha,
        bucket: None,
    }))
}

fn sha256_file(path: &Path) -> Option<String> {
    let bytes = std::fs::read(path).ok()?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Some(hex::encode(hasher.finalize()))
}

fn epoch_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn read_manifest(path: &Path) -> Option<Manifest> {
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}

/// The full pipeline with per-stage manifests. A stage whose manifest
/// matches its parameters and whose output file still hashes correctly is
/// skipped, so interrupted runs resume where they stopped.
fn run_pipeline(max_dim: i64, order: u32, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let classification_path = out_dir.join("classification.jsonl");
    let classification_manifest = out_dir.join("classification.manifest.json");
    let zero_loci_path = out_dir.join("zero_loci.jsonl");
    let zero_loci_manifest = out_dir.join("zero_loci.manifest.json");
    let buckets_path = out_dir.join("buckets.jsonl");
    let screened_path = out_dir.join("zero_loci_screened.jsonl");
    let buckets_manifest = out_dir.join("buckets.manifest.json");

    // Stage 1: classification.
    let params = json!({"max_dim": max_dim});
    let manifest_ok = read_manifest(&classification_manifest)
        .map(|m| m.is_valid_for("classify", &params, &classification_path, sha256_file))
        .unwrap_or(false);
    if manifest_ok {
        eprintln!("classification: up to date, skipping");
    } else {
        let started = epoch_seconds();
        let records = search::classify_fano(max_dim);
        store::write_jsonl(&classification_path, &records)?;
        write_manifest(
            &classification_manifest,
            &Manifest {
                tool_version: TOOL_VERSION.into(),
                stage: "classify".into(),
                parameters: params.clone(),
                input_sha256: None,
                output_sha256: sha256_file(&classification_path).unwrap(),
                aux_sha256: None,
                record_count: records.len(),
                started_at_epoch_s: started,
                finished_at_epoch_s: epoch_seconds(),
            },
        )?;
        eprintln!("classification: {} records", records.len());
    }

    // Stage 2: bundle search, invariants, periods.
    let records: Vec<ClassificationRecord> = store::read_jsonl(&classification_path)?;
    let input_hash = sha256_file(&classification_path);
    let params = json!({"max_dim": max_dim, "order": order});
    let manifest_ok = read_manifest(&zero_loci_manifest)
        .map(|m| {
            m.is_valid_for("search", &params, &zero_loci_path, sha256_file)
                && m.input_sha256 == input_hash
        })
        .unwrap_or(false);
    if manifest_ok {
        eprintln!("zero loci: up to date, skipping");
    } else {
        let started = epoch_seconds();
        let fourfold_ambient: Vec<&ClassificationRecord> =
            records.iter().filter(|r| r.dimension >= 4).collect();
        let results = parallel_search(&fourfold_ambient, order)?;
        store::write_jsonl(&zero_loci_path, &results)?;
        write_manifest(
            &zero_loci_manifest,
            &Manifest {
                tool_version: TOOL_VERSION.into(),
                stage: "search".into(),
                parameters: params.clone(),
                input_sha256: input_hash.clone(),
                output_sha256: sha256_file(&zero_loci_path).unwrap(),
                aux_sha256: None,
                record_count: results.len(),
                started_at_epoch_s: started,
                finished_at_epoch_s: epoch_seconds(),
            },
        )?;
        eprintln!("zero loci: {} records", results.len());
    }

    // Stage 3: screen and bucket.
    let zero_loci: Vec<ZeroLocusRecord> = store::read_jsonl(&zero_loci_path)?;
    let input_hash = sha256_file(&zero_loci_path);
    let params = json!({"max_dim": max_dim, "order": order});
    let manifest_ok = read_manifest(&buckets_manifest)
        .map(|m| {
            m.is_valid_for("bucket", &params, &buckets_path, sha256_file)
                && m.input_sha256 == input_hash
                && m.aux_sha256 == sha256_file(&screened_path)
        })
        .unwrap_or(false);
    if manifest_ok {
        eprintln!("buckets: up to date, skipping");
    } else {
        let started = epoch_seconds();
        let (screened, buckets, collisions) = search::screen_and_bucket(zero_loci);
        for c in &collisions {
            eprintln!("warning: {c}");
        }
        store::write_jsonl(&screened_path, &screened)?;
        store::write_jsonl(&buckets_path, &buckets)?;
        write_manifest(
            &buckets_manifest,
            &Manifest {
                tool_version: TOOL_VERSION.into(),
                stage: "bucket".into(),
                parameters: params,
                input_sha256: input_hash,
                output_sha256: sha256_file(&buckets_path).unwrap(),
                aux_sha256: sha256_file(&screened_path),
                record_count: buckets.len(),
                started_at_epoch_s: started,
                finished_at_epoch_s: epoch_seconds(),
            },
        )?;
        eprintln!("buckets: {}", buckets.len());
    }
    Ok(())
}

/// Evaluates the bundle search over a worker pool; results are merged and
/// sorted deterministically.
fn parallel_search(
    records: &[&ClassificationRecord],
    order: u32,
) -> Result<Vec<ZeroLocusRecord>> {
    let workers = worker_count().min(records.len().max(1));
    let queue: Mutex<VecDeque<&ClassificationRecord>> =
        Mutex::new(records.iter().copied().collect());
    let (tx, rx) = mpsc::channel::<Result<Vec<ZeroLocusRecord>>>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let record = { queue.lock().unwrap().pop_front() };
                let Some(record) = record else { break };
                let result = search_one(record, order);
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut out = Vec::new();
    for batch in rx {
        out.extend(batch?);
    }
    out.sort_by(|a, b| (a.quiver_id, &a.bundle).cmp(&(b.quiver_id, &b.bundle)));
    Ok(out)
}
