use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use traceforge::engine::{Engine, EngineConfig};
use traceforge::glcat::{abs_monomials, abs_monomials_bideg, multiplicity, Partition};
use traceforge::hwv::{basis_json, hwv_basis_capped};
use traceforge::nullspace::{modp::PRIMES, StreamMode};
use traceforge::relfinder::{
    check_published, check_trace, leading_analysis, new_relations, orbit, published, relation_space,
    write_certificates, PublishedStatus, SourceKind,
};
use traceforge::reproduce::reference_tables;
use traceforge::syntax::{parse_phi, parse_trace, strip_comments};

#[derive(Parser)]
#[command(name = "traceforge", version, about = "Trace identities of two generic traceless 4x4 matrices")]
struct Cli {
    #[arg(long, global = true, env = "TRACEFORGE_CACHE_DIR", default_value = "./.tracecache")]
    cache_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "TRACEFORGE_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, env = "TRACEFORGE_DEGREE_CAP", default_value_t = 14)]
    degree_cap: u32,
    #[arg(long, global = true, env = "TRACEFORGE_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Primes used first by modular elimination.
    #[arg(long, global = true, env = "TRACEFORGE_MOD_PRIMES", default_value_t = 2)]
    mod_primes: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Modular,
}

#[derive(Subcommand)]
enum Cmd {
    /// The twelve generator modules.
    Catalog,
    /// Multiplicity and monomial counts at λ.
    Mult {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
    },
    /// Highest weight vector basis at λ.
    Hwv {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
        #[arg(long)]
        blocked: bool,
    },
    /// Relation space at λ; certificates go under the cache directory.
    Relations {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
        #[arg(long, value_enum, default_value_t = Mode::Modular)]
        mode: Mode,
    },
    /// Exact check of a relation file. Bundled file names are accepted too.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, conflicts_with = "trace")]
        phi: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Leading monomials of the relations of a degree.
    Leading {
        #[arg(long)]
        degree: u32,
    },
    /// Old and new relations of a degree.
    New {
        #[arg(long)]
        degree: u32,
    },
    /// Recompute the published tables item by item.
    Reproduce {
        #[arg(long, required = true)]
        paper_tables: bool,
        /// Include degrees 13 and 14.
        #[arg(long)]
        extended: bool,
    },
}

fn parse_lambda(s: &str) -> Result<Partition, String> {
    let (a, b) = s.split_once(',').ok_or("expected P,Q")?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Partition::new(a, b).map_err(|e| e.to_string())
}

/// What a subcommand produced and whether everything in it checked out.
struct Outcome {
    ok: bool,
    json: Value,
    text: String,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { ok: true, json, text }
    }
}

fn engine(cli: &Cli, mode: Option<Mode>, blocked: Option<bool>) -> Result<Engine> {
    let mode = match mode {
        Some(Mode::Exact) => StreamMode::Exact,
        _ => StreamMode::Modular { primes: cli.mod_primes.max(2), budget: PRIMES.len().max(cli.mod_primes) },
    };
    let cfg = EngineConfig { degree_cap: cli.degree_cap, mode, blocked, cache_dir: Some(cli.cache_dir.clone()) };
    Ok(Engine::new(cfg)?)
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Catalog => {
            let cat = traceforge::glcat::catalog();
            let mut text = String::new();
            for m in cat.modules() {
                for j in 0..m.dim() {
                    text.push_str(&format!("u{},{}  {}\n", m.index, j, m.basis_grammar(j)));
                }
            }
            Ok(Outcome::ok(cat.to_json(), text))
        }
        Cmd::Mult { lambda } => {
            let m = multiplicity(*lambda);
            let p = abs_monomials(*lambda).len();
            let q = lambda.raised().map_or(0, |(a, b)| abs_monomials_bideg(a, b).len());
            Ok(Outcome::ok(json!({"m": m, "P": p, "Q": q}), format!("{lambda}: m={m} P={p} Q={q}")))
        }
        Cmd::Hwv { lambda, blocked } => {
            let b = hwv_basis_capped(*lambda, *blocked, cli.degree_cap)?;
            let text = format!("{lambda}: {} vectors, P={} Q={} rank={}", b.vectors.len(), b.p, b.q, b.rank);
            Ok(Outcome::ok(basis_json(&b), text))
        }
        Cmd::Relations { lambda, mode } => {
            let e = engine(cli, Some(*mode), None)?;
            let space = relation_space(&e, *lambda)?;
            let paths = write_certificates(&e, &space)?;
            let orbit_len = orbit(&space).len();
            let json = json!({
                "lambda": [lambda.l1, lambda.l2],
                "hwv": space.hwv.vectors.len(),
                "r": space.r,
                "orbit": orbit_len,
                "digests": space.digests,
                "certificates": paths,
                "stats": e.stats(),
            });
            let mut text = format!("{lambda}: r={} from {} hwv, orbit {orbit_len}\n", space.r, space.hwv.vectors.len());
            for p in &paths {
                text.push_str(&format!("  {}\n", p.display()));
            }
            Ok(Outcome::ok(json, text))
        }
        Cmd::Verify { file, phi, trace } => verify(cli, file, *phi, *trace),
        Cmd::Leading { degree } => {
            let e = engine(cli, None, None)?;
            let rep = leading_analysis(&e, *degree)?;
            let list: Vec<String> = rep.leading.iter().map(ToString::to_string).collect();
            let json = json!({
                "degree": degree, "leading": list, "vectors": rep.vectors.len(),
                "degenerate": rep.degenerate, "dependent": rep.dependent,
            });
            Ok(Outcome::ok(json, format!("degree {degree}: {}", list.join(", "))))
        }
        Cmd::New { degree } => {
            let e = engine(cli, None, None)?;
            let rep = new_relations(&e, *degree)?;
            let text = rep
                .entries
                .iter()
                .map(|x| format!("{}: r={} old={} new={}", x.lambda, x.r, x.old, x.new))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::ok(serde_json::to_value(&rep)?, text))
        }
        Cmd::Reproduce { extended, .. } => {
            let e = engine(cli, None, None)?;
            let items = reference_tables(&e, *extended)?;
            let ok = items.iter().all(|i| i.passed || i.informational);
            let mut text = String::new();
            for i in &items {
                let verdict = match (i.passed, i.informational) {
                    (true, _) => "PASS",
                    (false, true) => "INFO",
                    (false, false) => "FAIL",
                };
                text.push_str(&format!("{verdict} [{}] {} ({:.2}s)\n", i.id, i.title, i.seconds));
            }
            let stats = e.stats();
            text.push_str(&format!(
                "word evaluations {}, image evaluations {}, system evaluations {}",
                stats.word_evals, stats.image_evals, stats.system_evals
            ));
            Ok(Outcome { ok, json: json!({"passed": ok, "items": items, "stats": stats}), text })
        }
    }
}

fn read_source(file: &Path) -> Result<(String, Option<SourceKind>)> {
    match std::fs::read_to_string(file) {
        Ok(s) => Ok((s, None)),
        Err(err) => {
            let name = file.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            match published(name) {
                Some(p) if file.parent().map_or(true, |d| d.as_os_str().is_empty()) => {
                    Ok((p.source.to_string(), Some(p.kind)))
                }
                _ => Err(err).with_context(|| format!("reading {}", file.display())),
            }
        }
    }
}

fn verify(cli: &Cli, file: &Path, phi: bool, trace: bool) -> Result<Outcome> {
    let (src, bundled) = read_source(file)?;
    let kind = match (phi, trace, bundled) {
        (true, _, _) => SourceKind::Phi,
        (_, true, _) => SourceKind::Trace,
        (_, _, Some(k)) => k,
        _ if file.extension().is_some_and(|x| x == "phi") => SourceKind::Phi,
        _ => SourceKind::Trace,
    };
    let src = strip_comments(&src);
    let e = engine(cli, None, None)?;
    match kind {
        SourceKind::Trace => {
            let c = check_trace(&e, &parse_trace(&src)?)?;
            let text = format!(
                "bidegree {}: {}",
                c.bidegree,
                if c.evaluation.zero { "zero".to_string() } else { format!("{} residual terms", c.evaluation.terms) }
            );
            Ok(Outcome { ok: c.evaluation.zero, json: serde_json::to_value(&c)?, text })
        }
        SourceKind::Phi => {
            let p = parse_phi(&src)?;
            let (a, b) = p.bidegree().ok_or_else(|| anyhow!("candidate is zero or not bihomogeneous"))?;
            if a < b {
                bail!("bidegree ({a},{b}) is not a partition");
            }
            let lambda = Partition::new(a.into(), b.into())?;
            let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let c = check_published(&e, &name, &p, lambda)?;
            let text = format!(
                "{lambda}: membership {}, evaluation {}, status {:?}",
                c.membership,
                if c.evaluation.zero { "zero".to_string() } else { format!("{} residual terms", c.evaluation.terms) },
                c.status
            );
            Ok(Outcome { ok: c.status == PublishedStatus::Verified, json: serde_json::to_value(&c)?, text })
        }
    }
}

/// `--format json` on a command line that failed to parse.
fn wants_json() -> bool {
    let args: Vec<String> = std::env::args().collect();
    args.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
        || args.iter().any(|a| a == "--format=json")
        || std::env::var("TRACEFORGE_FORMAT").is_ok_and(|v| v == "json")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(err) if err.use_stderr() && wants_json() => {
            println!("{}", json!({"error": err.to_string().trim_end()}));
            return ExitCode::from(2);
        }
        Err(err) => err.exit(),
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json values serialize")),
                Format::Text => println!("{}", out.text.trim_end()),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            match cli.format {
                Format::Json => println!("{}", json!({"error": format!("{err:#}")})),
                Format::Text => eprintln!("error: {err:#}"),
            }
            ExitCode::from(2)
        }
    }
}
