//! `tsys-lab`: run exact lattice-system solvers and verification suites from
//! the command line.  All output is canonical UTF-8 JSON; re-running a
//! command on the same inputs produces byte-identical files.  Exit codes:
//! 0 all checks pass, 1 a check failed, 2 bad configuration or I/O.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tsys_core::cluster::{Belt, SquareBelt};
use tsys_core::determinant::{
    columns_from_tsolution, s_image, verify_matches_solution, verify_minor_relations,
};
use tsys_core::dynkin::{self, FiniteType};
use tsys_core::laurent::{Poly, Ring};
use tsys_core::report::Report;
use tsys_core::tsys::{self, Point, SystemKind, TSolution};
use tsys_core::twisted;

use tsys_lab::config::{parse_config, ConfigError, RunSpec};
use tsys_lab::suites;

#[derive(Parser)]
#[command(name = "tsys-lab", about = "exact T-system solvers and verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// JSON run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for multi-suite runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Lattice type, e.g. "B2" or "A3~2" (overrides the config).
    #[arg(long = "type")]
    ty: Option<String>,
    /// Truncation level (overrides the config).
    #[arg(long)]
    level: Option<i64>,
    /// Evolution window "lo:hi" in grid units (overrides the config).
    #[arg(long)]
    window: Option<String>,
    /// Boundary family (overrides the config).
    #[arg(long)]
    boundary: Option<String>,
    /// Initial-data preset (overrides the config).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite, or verify the relations of a config.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name ("criterion-01".."criterion-15", shortcuts, or "all").
        #[arg(long)]
        suite: Option<String>,
    },
    /// Solve a system on a window and dump the solution.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// Walk a bipartite mutation belt and dump the seeds.
    Mutate {
        #[command(flatten)]
        common: Common,
        /// Quiver name: a finite type like "A3", or "A2xA2".
        #[arg(long)]
        quiver: String,
        /// Number of half-steps to walk.
        #[arg(long)]
        belt: usize,
    },
    /// Build the periodic column matrix of a solution and verify its minors.
    Det {
        #[command(flatten)]
        common: Common,
        /// Solution file written by `evolve` or `export`.
        #[arg(long = "from-solution")]
        from_solution: Option<PathBuf>,
    },
    /// Solve and store the solution in the cache (TSYS_CACHE_DIR).
    Export {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum CmdError {
    Config(String),
    CheckFailure,
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { common, suite } => cmd_verify(&common, suite.as_deref()),
        Command::Evolve { common } => cmd_evolve(&common),
        Command::Mutate {
            common,
            quiver,
            belt,
        } => cmd_mutate(&common, &quiver, belt),
        Command::Det {
            common,
            from_solution,
        } => cmd_det(&common, from_solution.as_deref()),
        Command::Export { common } => cmd_export(&common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::CheckFailure) => ExitCode::from(1),
        Err(CmdError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// The effective config: file contents (if any) with flag overrides applied.
fn effective_config(common: &Common) -> Result<Value, CmdError> {
    let mut v = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CmdError::Config(e.to_string()))?
        }
        None => json!({}),
    };
    if !v.is_object() {
        return Err(ConfigError::NotAnObject.into());
    }
    let obj = v.as_object_mut().unwrap();
    if let Some(t) = &common.ty {
        obj.insert("type".into(), json!(t));
    }
    if let Some(l) = common.level {
        obj.insert("level".into(), json!(l));
    }
    if let Some(w) = &common.window {
        obj.insert("window".into(), json!(w));
    }
    if let Some(b) = &common.boundary {
        obj.insert("boundary".into(), json!(b));
    }
    if let Some(p) = &common.preset {
        obj.insert("preset".into(), json!(p));
    }
    Ok(v)
}

fn emit(common: &Common, doc: &Value) -> Result<(), CmdError> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| CmdError::Config(e.to_string()))?;
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn finish(common: &Common, report: &Report) -> Result<(), CmdError> {
    eprintln!("{report}");
    emit(common, &report.to_json())?;
    if report.passed() {
        Ok(())
    } else {
        Err(CmdError::CheckFailure)
    }
}

fn cmd_verify(common: &Common, suite: Option<&str>) -> Result<(), CmdError> {
    // The suite name may come from the flag or from the config file.
    let cfg = effective_config(common)?;
    let suite = suite
        .map(str::to_owned)
        .or_else(|| cfg.get("suite").and_then(Value::as_str).map(str::to_owned));
    match suite.as_deref() {
        Some("all") => {
            let names: Vec<&'static str> = suites::suite_names()
                .into_iter()
                .filter(|n| n.starts_with("criterion-"))
                .collect();
            let reports = run_parallel(&names, common.jobs.max(1));
            let mut merged = Report::new("all acceptance suites");
            for r in reports {
                merged.merge(r);
            }
            finish(common, &merged)
        }
        Some(name) => {
            let report = suites::run(name)
                .ok_or_else(|| CmdError::Config(format!("unknown suite {name:?}")))?;
            finish(common, &report)
        }
        None => {
            // No suite: solve the configured system and verify its relations.
            let report = match parse_config(&cfg)? {
                RunSpec::Untwisted { spec, preset } => {
                    let ring = Ring::new();
                    let init = tsys::preset_init(&spec, &ring, preset);
                    let sol = tsys::solve(&spec, &ring, init)
                        .map_err(|e| CmdError::Config(e.to_string()))?;
                    tsys::verify_relations(&sol, "configured system")
                }
                RunSpec::Twisted(spec) => {
                    let ring = Ring::new();
                    let init = twisted::preset_init(&spec, &ring);
                    let sol = twisted::twisted_solve(&spec, &ring, init)
                        .map_err(|e| CmdError::Config(e.to_string()))?;
                    twisted::verify_relations(&sol, "configured system")
                }
            };
            finish(common, &report)
        }
    }
}

fn run_parallel(names: &[&'static str], jobs: usize) -> Vec<Report> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<Report>>> = Mutex::new(vec![None; names.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(names.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= names.len() {
                    break;
                }
                let report = suites::run(names[i]).expect("registered suite");
                out.lock().unwrap()[i] = Some(report);
            });
        }
    });
    out.into_inner().unwrap().into_iter().flatten().collect()
}

/// Solves the configured system and packages it with its config echo.
fn solve_doc(cfg: &Value) -> Result<Value, CmdError> {
    let values = match parse_config(cfg)? {
        RunSpec::Untwisted { spec, preset } => {
            let ring = Ring::new();
            let init = tsys::preset_init(&spec, &ring, preset);
            tsys::solve(&spec, &ring, init)
                .map_err(|e| CmdError::Config(e.to_string()))?
                .export_json()
        }
        RunSpec::Twisted(spec) => {
            let ring = Ring::new();
            let init = twisted::preset_init(&spec, &ring);
            twisted::twisted_solve(&spec, &ring, init)
                .map_err(|e| CmdError::Config(e.to_string()))?
                .export_json()
        }
    };
    Ok(json!({"schema": 1, "config": cfg, "values": values}))
}

fn cache_path(cfg: &Value) -> Option<PathBuf> {
    let dir = std::env::var_os("TSYS_CACHE_DIR")?;
    // FNV-1a over the canonical config string names the cache entry.
    let key = serde_json::to_string(cfg).ok()?;
    let mut h: u64 = 0xcbf29ce484222325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    Some(PathBuf::from(dir).join(format!("sol-{h:016x}.json")))
}

fn cached_doc(cfg: &Value) -> Option<Value> {
    let path = cache_path(cfg)?;
    let text = std::fs::read_to_string(path).ok()?;
    let doc: Value = serde_json::from_str(&text).ok()?;
    (doc.get("config") == Some(cfg)).then_some(doc)
}

fn cmd_evolve(common: &Common) -> Result<(), CmdError> {
    let cfg = effective_config(common)?;
    let doc = match cached_doc(&cfg) {
        Some(doc) => doc,
        None => solve_doc(&cfg)?,
    };
    emit(common, &doc)
}

fn cmd_export(common: &Common) -> Result<(), CmdError> {
    let cfg = effective_config(common)?;
    let doc = match cached_doc(&cfg) {
        Some(doc) => doc,
        None => solve_doc(&cfg)?,
    };
    if let Some(path) = cache_path(&cfg) {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&doc).map_err(|e| CmdError::Config(e.to_string()))?
                + "\n",
        )?;
        eprintln!("cached at {}", path.display());
    }
    emit(common, &doc)
}

fn cmd_mutate(common: &Common, quiver: &str, steps: usize) -> Result<(), CmdError> {
    let bad = |msg: String| CmdError::Config(msg);
    let ring = Ring::new();
    let seeds_json = if let Some((left, right)) = quiver.split_once('x') {
        let dl = dynkin::data_for(FiniteType::parse(left).map_err(|e| bad(e.to_string()))?);
        let dr = dynkin::data_for(FiniteType::parse(right).map_err(|e| bad(e.to_string()))?);
        let r2 = ring.clone();
        let belt = SquareBelt::new(&ring, &dl, &dr, steps, move |a, b| {
            Poly::var(&r2, r2.var(&format!("x{}.{}", a + 1, b + 1)))
        })
        .map_err(|e| bad(e.to_string()))?;
        belt.seeds
            .iter()
            .map(|s| Value::Array(s.cluster.iter().map(Poly::to_json).collect()))
            .collect::<Vec<_>>()
    } else {
        let d = dynkin::data_for(FiniteType::parse(quiver).map_err(|e| bad(e.to_string()))?);
        let r2 = ring.clone();
        let belt = Belt::new(&ring, &d, steps, move |v| {
            Poly::var(&r2, r2.var(&format!("x{}", v + 1)))
        })
        .map_err(|e| bad(e.to_string()))?;
        belt.seeds
            .iter()
            .map(|s| Value::Array(s.cluster.iter().map(Poly::to_json).collect()))
            .collect::<Vec<_>>()
    };
    emit(
        common,
        &json!({"schema": 1, "quiver": quiver, "steps": steps, "seeds": seeds_json}),
    )
}

/// Rebuilds a solution from a file written by `evolve`/`export`.
fn load_solution(path: &std::path::Path) -> Result<TSolution, CmdError> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CmdError::Config(e.to_string()))?;
    let cfg = doc
        .get("config")
        .ok_or_else(|| CmdError::Config("solution file has no config echo".into()))?;
    let RunSpec::Untwisted { spec, .. } = parse_config(cfg)? else {
        return Err(CmdError::Config(
            "determinant route needs an untwisted solution".into(),
        ));
    };
    let values_json = doc
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| CmdError::Config("solution file has no values".into()))?;
    let ring = Ring::new();
    // Sign generators must be interned as involutive before any value that
    // mentions them is parsed.
    for v in values_json.values() {
        for name in v.get("vars").and_then(Value::as_array).into_iter().flatten() {
            if let Some(name) = name.as_str() {
                if name.starts_with('s') && name[1..].chars().all(|c| c.is_ascii_digit()) {
                    ring.sign_var(name);
                }
            }
        }
    }
    let mut values = HashMap::new();
    for (key, v) in values_json {
        let p = parse_point(key)
            .ok_or_else(|| CmdError::Config(format!("bad point key {key:?}")))?;
        let poly = Poly::from_json(&ring, v)
            .ok_or_else(|| CmdError::Config(format!("bad value at {key}")))?;
        values.insert(p, poly);
    }
    Ok(TSolution::from_values(spec, ring, values))
}

/// Parses a point key of the form "a{a}.m{m}.u{n}".
fn parse_point(key: &str) -> Option<Point> {
    let mut it = key.split('.');
    let a = it.next()?.strip_prefix('a')?.parse().ok()?;
    let m = it.next()?.strip_prefix('m')?.parse().ok()?;
    let n = it.next()?.strip_prefix('u')?.parse().ok()?;
    it.next().is_none().then(|| Point::new(a, m, n))
}

fn cmd_det(common: &Common, from_solution: Option<&std::path::Path>) -> Result<(), CmdError> {
    let sol = match from_solution {
        Some(path) => load_solution(path)?,
        None => {
            let cfg = effective_config(common)?;
            match parse_config(&cfg)? {
                RunSpec::Untwisted { spec, preset } => {
                    let ring = Ring::new();
                    let init = tsys::preset_init(&spec, &ring, preset);
                    tsys::solve(&spec, &ring, init)
                        .map_err(|e| CmdError::Config(e.to_string()))?
                }
                RunSpec::Twisted(_) => {
                    return Err(CmdError::Config(
                        "determinant route needs an untwisted system".into(),
                    ))
                }
            }
        }
    };
    // A quasi-unit C solution first passes through its symmetric image of
    // doubled height; spiral and quasi-symmetric solutions go in directly.
    let s;
    let source: &TSolution = match sol.spec.kind {
        SystemKind::QuasiUnitC { .. } => {
            s = s_image(&sol, sol.spec.window).map_err(|e| CmdError::Config(e.to_string()))?;
            &s
        }
        _ => &sol,
    };
    let mat = columns_from_tsolution(source).map_err(|e| CmdError::Config(e.to_string()))?;
    let mut report = verify_minor_relations(&mat, "column matrix");
    report.merge(verify_matches_solution(&mat, source, "column matrix"));
    eprintln!("{report}");
    let base_json: Vec<Value> = (0..mat.route.period())
        .map(|j| Value::Array(mat.column(j as i64).iter().map(Poly::to_json).collect()))
        .collect();
    emit(
        common,
        &json!({"schema": 1, "matrix": base_json, "report": report.to_json()}),
    )?;
    if report.passed() {
        Ok(())
    } else {
        Err(CmdError::CheckFailure)
    }
}
