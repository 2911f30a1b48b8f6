//! Command-line front end: catalog listing, classification runs, polynomial
//! expansion, heuristic host search and certificate verification.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use forcinglab::catalog::{catalog, catalog_names};
use forcinglab::certify::{
    classify_five_vertex, classify_six_vertex, verify, Certificate, Classification,
};
use forcinglab::hsearch::{certify_search_result, local_search, SearchConfig};
use forcinglab::rational::{format_rat, pow2_neg, rat};
use forcinglab::sympoly::{d_star_poly, find_exceeding, matrix_by_name};
use forcinglab::tournament::Tournament;

#[derive(Parser)]
#[command(
    name = "forcinglab",
    version,
    about = "Exact classification of small tournaments via quasirandomness-forcing disqualification certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print named tournaments and their structural properties.
    Catalog {
        /// Catalog name such as S_7, H_6^9 or T_4; lists everything if omitted.
        name: Option<String>,
    },
    /// Classify all non-transitive tournaments on n vertices and emit
    /// certificates.
    Classify {
        /// Vertex count to classify (5 or 6).
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Table format printed to stdout.
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        out: OutFormat,
        /// Directory receiving table, certificate batch and run manifest.
        #[arg(long)]
        cert_dir: Option<PathBuf>,
    },
    /// Expand d*(pattern, matrix) as an exact polynomial and search the
    /// domain grid for a threshold exceedance.
    Poly {
        /// Pattern: a catalog name or an upper-triangle code.
        pattern: String,
        /// Parametrized matrix name: A_x, B_x or C_x.
        matrix: String,
        /// Number of grid steps over [-1/2, 1/2].
        #[arg(long, default_value_t = 10_000)]
        grid_step: usize,
        /// Optional CSV dump of (x, value) pairs over the grid.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Hill-climbing search for hosts maximizing copies of the pattern.
    Search {
        /// Pattern: a catalog name or an upper-triangle code.
        pattern: String,
        /// Host size (must exceed the pattern size; at most 15).
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Sideways-move budget per restart.
        #[arg(long, default_value_t = 200)]
        plateau: usize,
        /// Directory receiving the search certificate and run manifest.
        #[arg(long)]
        cert_dir: Option<PathBuf>,
    },
    /// Re-check a JSON-lines certificate batch from scratch.
    Verify { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    arguments: Vec<String>,
    seed: Option<u64>,
    tool_version: String,
    timestamp_unix: u64,
    outputs: Vec<OutputRecord>,
}

#[derive(Serialize)]
struct OutputRecord {
    path: String,
    sha256: String,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
        }
    }

    fn record(&mut self, dir: &Path, name: &str, contents: &str) -> anyhow_free::Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| format!("write {}: {e}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256: format!("{:x}", hasher.finalize()),
        });
        Ok(path)
    }

    fn finish(&self, dir: &Path) -> anyhow_free::Result<()> {
        let path = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, body).map_err(|e| format!("write {}: {e}", path.display()))?;
        Ok(())
    }
}

/// Tiny result alias; failures are plain strings surfaced on stderr.
mod anyhow_free {
    pub type Result<T> = std::result::Result<T, String>;
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog { name } => cmd_catalog(name.as_deref()),
        Command::Classify { n, out, cert_dir } => cmd_classify(n, out, cert_dir.as_deref()),
        Command::Poly {
            pattern,
            matrix,
            grid_step,
            dump,
        } => cmd_poly(&pattern, &matrix, grid_step, dump.as_deref()),
        Command::Search {
            pattern,
            size,
            seed,
            restarts,
            plateau,
            cert_dir,
        } => cmd_search(&pattern, size, seed, restarts, plateau, cert_dir.as_deref()),
        Command::Verify { path } => cmd_verify(&path),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

/// FORCINGLAB_THREADS bounds the worker pool; unset means the rayon default.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("FORCINGLAB_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// Resolves a pattern argument: catalog name first, then code string.
fn resolve_pattern(text: &str) -> anyhow_free::Result<Tournament> {
    if let Ok(t) = catalog(text) {
        return Ok(t);
    }
    Tournament::parse_code(text)
        .map_err(|e| format!("{text:?} is neither a catalog name nor a valid code ({e})"))
}

fn property_line(t: &Tournament) -> String {
    let aut = if t.vertex_count() <= 10 {
        t.automorphism_count().to_string()
    } else {
        "-".to_string()
    };
    format!(
        "k={} transitive={} strongly_connected={} twins={} aut={}",
        t.vertex_count(),
        t.is_transitive(),
        t.is_strongly_connected(),
        t.has_twins(),
        aut
    )
}

fn cmd_catalog(name: Option<&str>) -> anyhow_free::Result<ExitCode> {
    match name {
        Some(name) => {
            let t = catalog(name).map_err(|e| e.to_string())?;
            println!("{name}: [{}]", t.format_code());
            println!("  {}", property_line(&t));
        }
        None => {
            for name in catalog_names() {
                let t = catalog(&name).expect("catalog names resolve");
                println!("{name:8} [{}]", t.format_code());
                println!("         {}", property_line(&t));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(
    n: usize,
    out: OutFormat,
    cert_dir: Option<&Path>,
) -> anyhow_free::Result<ExitCode> {
    let classification: Classification = match n {
        5 => classify_five_vertex(),
        6 => classify_six_vertex(),
        other => return Err(format!("classification supports n = 5 or 6, got {other}")),
    }
    .map_err(|e| e.to_string())?;
    match out {
        OutFormat::Csv => print!("{}", classification.to_csv()),
        OutFormat::Json => println!("{}", classification.to_json()),
    }
    let [a, b, c, d, e] = classification.flag_counts();
    eprintln!(
        "classified {} rows: A={a} B={b} C={c} D={d} E={e}; {} certificates",
        classification.rows.len(),
        classification.certificates.len()
    );
    if let Some(dir) = cert_dir {
        fs::create_dir_all(dir).map_err(|e| format!("create {}: {e}", dir.display()))?;
        let mut manifest = RunManifest::new("classify", None);
        manifest.record(dir, "table.csv", &classification.to_csv())?;
        manifest.record(dir, "table.json", &classification.to_json())?;
        manifest.record(dir, "certificates.jsonl", &classification.certificates_jsonl())?;
        manifest.finish(dir)?;
        eprintln!("outputs written to {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_poly(
    pattern: &str,
    matrix: &str,
    grid_step: usize,
    dump: Option<&Path>,
) -> anyhow_free::Result<ExitCode> {
    let t = resolve_pattern(pattern)?;
    let m = matrix_by_name(matrix).map_err(|e| e.to_string())?;
    let poly = d_star_poly(&t, &m).map_err(|e| e.to_string())?;
    println!("d*({pattern}, {matrix}) = {poly}");
    let k = t.vertex_count() as u32;
    let threshold = pow2_neg(k * (k - 1) / 2);
    let lo = rat(-1, 2);
    let hi = rat(1, 2);
    match find_exceeding(&poly, &threshold, &lo, &hi, grid_step) {
        Some(x) => println!(
            "exceeds {} at x = {} (value {})",
            format_rat(&threshold),
            format_rat(&x),
            format_rat(&poly.eval(&x))
        ),
        None => println!(
            "no grid point in [-1/2, 1/2] exceeds {} ({} steps)",
            format_rat(&threshold),
            grid_step
        ),
    }
    if let Some(path) = dump {
        let mut csv = String::from("x,value\n");
        for i in 0..=grid_step {
            let x = &lo + (&hi - &lo) * rat(i as i64, grid_step as i64);
            csv.push_str(&format!("{},{}\n", format_rat(&x), format_rat(&poly.eval(&x))));
        }
        fs::write(path, csv).map_err(|e| format!("write {}: {e}", path.display()))?;
        eprintln!("grid dump written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(
    pattern: &str,
    size: usize,
    seed: u64,
    restarts: usize,
    plateau: usize,
    cert_dir: Option<&Path>,
) -> anyhow_free::Result<ExitCode> {
    let t = resolve_pattern(pattern)?;
    let cfg = SearchConfig {
        pattern: t,
        host_size: size,
        restarts,
        max_plateau_steps: plateau,
        seed,
        audit_every: Some(100),
    };
    let result = local_search(&cfg).map_err(|e| e.to_string())?;
    println!("best host: [{}]", result.best_host.format_code());
    println!("copies: {}", result.best_count);
    for stats in &result.restarts {
        eprintln!(
            "restart {} ({}): {} -> {} ({} improving, {} sideways)",
            stats.restart,
            if stats.warm_start { "warm" } else { "random" },
            stats.initial_count,
            stats.best_count,
            stats.improving_steps,
            stats.sideways_steps
        );
    }
    let certificate = match certify_search_result(&cfg.pattern, &result.best_host) {
        Ok(cert) => {
            println!(
                "certificate: copies {} meet threshold {}",
                cert.dstar.as_deref().unwrap_or("?"),
                cert.threshold.as_deref().unwrap_or("?")
            );
            Some(cert)
        }
        Err(e) => {
            println!("no certificate: {e}");
            None
        }
    };
    if let Some(dir) = cert_dir {
        fs::create_dir_all(dir).map_err(|e| format!("create {}: {e}", dir.display()))?;
        let mut manifest = RunManifest::new("search", Some(seed));
        let mut body = String::new();
        if let Some(cert) = &certificate {
            body.push_str(&serde_json::to_string(cert).expect("certificate serializes"));
            body.push('\n');
        }
        manifest.record(dir, "search-certificates.jsonl", &body)?;
        manifest.record(
            dir,
            "search-result.json",
            &serde_json::to_string_pretty(&serde_json::json!({
                "pattern": cfg.pattern.format_code(),
                "host": result.best_host.format_code(),
                "copies": result.best_count,
                "seed": seed,
                "restarts": restarts,
            }))
            .expect("result serializes"),
        )?;
        manifest.finish(dir)?;
        eprintln!("outputs written to {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(path: &Path) -> anyhow_free::Result<ExitCode> {
    let file = fs::File::open(path).map_err(|e| format!("open {}: {e}", path.display()))?;
    let reader = BufReader::new(file);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut parse_errors = 0usize;
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| format!("read {}: {e}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Certificate>(&line) {
            Ok(cert) => {
                let report = verify(&cert);
                println!(
                    "line {}: {} [{} {}]",
                    no + 1,
                    report,
                    cert.reason.as_str(),
                    cert.tournament
                );
                if report.accepted {
                    accepted += 1;
                } else {
                    rejected += 1;
                }
            }
            Err(e) => {
                println!("line {}: PARSE ERROR: {e}", no + 1);
                parse_errors += 1;
            }
        }
    }
    if accepted + rejected + parse_errors == 0 {
        eprintln!("warning: no certificates found in {}", path.display());
    }
    println!("verified: {accepted} accepted, {rejected} rejected, {parse_errors} parse errors");
    if rejected + parse_errors > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
