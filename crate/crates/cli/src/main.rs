//! `crystal-lab`: generation, checking, group-law, torsion and slope
//! operations over JSON documents.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails
//! (the report is still printed), 2 for malformed input or usage.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crystal_core::crystal::{
    check_horizontality, check_pairing_compat, make_standard_crystal, newton_slopes, standard_pair,
    CheckFailure, CheckReport, StandardKind,
};
use crystal_core::extension_group::{
    assemble_crystal, baer_sum, from_alpha, int_scale, p_torsion_check, random_alpha,
    random_extension, trivialize, BaerMode, ExtensionContext, TorsionOutcome, TraceStep,
};
use crystal_core::json::{self, ContextDoc, SCHEMA};
use crystal_core::moduli::{group_law_check, multiply_by_p_injectivity_probe};
use crystal_core::{Error, FCrystalPresentation, PrecisionContext};

#[derive(Parser)]
#[command(name = "crystal-lab", version, about = "F-crystal extension calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Sub1,
    Super1,
    Slope1,
    Pair,
    /// Extension from a random integral witness.
    Split,
    /// Random geometric extension, log-type when `M >= p^2` allows it.
    Extension,
    /// The split extension with zero data.
    Zero,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Horizontality,
    Pairing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fast,
    Pp,
    Pop,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a standard crystal or an extension.
    Gen {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long = "N", default_value_t = 8)]
        precision: u32,
        #[arg(long = "M", default_value_t = 32)]
        truncation: usize,
        #[arg(long)]
        kind: GenKind,
        /// Rank of the slope-1 crystal (defaults to h).
        #[arg(long)]
        rho: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a crystal checker on a crystal, extension or point file.
    Check { relation: CheckKind, file: String },
    /// Baer sum of two extensions.
    BaerSum {
        e1: String,
        e2: String,
        #[arg(long, value_enum, default_value = "fast")]
        mode: Mode,
    },
    /// Solve for a splitting of an extension.
    Trivialize { file: String },
    /// Certify that E is trivial from a witness for p E.
    Ptorsion { extension: String, witness: String },
    /// Newton slopes of a constant crystal.
    Slopes { file: String },
    /// Integer multiple of an extension class.
    Scale {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        by: i64,
    },
    /// Group axioms and tangent additivity on random points.
    Grouplaw {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N", default_value_t = 8)]
        precision: u32,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Injectivity of multiplication by p on random points.
    Probe {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N", default_value_t = 8)]
        precision: u32,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// A printed report and whether every check in it passed.
struct Outcome {
    report: String,
    passed: bool,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { report, passed: true }
    }
}

fn read(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn header(kind: &str, ctx: PrecisionContext) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(kind));
    m.insert("context".into(), json!(ContextDoc::from_context(ctx)));
    m
}

fn render(m: Map<String, Value>) -> String {
    serde_json::to_string_pretty(&Value::Object(m)).expect("reports serialize")
}

fn load_extension(path: &str) -> Result<crystal_core::ExtensionData, Error> {
    json::parse_extension(&json::from_str(&read(path)?)?)
}

/// Crystal, extension or point document, as a presentation.
fn load_crystal_like(path: &str) -> Result<FCrystalPresentation, Error> {
    let text = read(path)?;
    match json::document_kind(&text)?.as_str() {
        "crystal" => json::parse_crystal(&json::from_str(&text)?),
        "extension" => Ok(assemble_crystal(&json::parse_extension(&json::from_str(&text)?)?)),
        "point" => Ok(json::parse_point(&json::from_str(&text)?)?.assemble()),
        other => Err(Error::Parse(format!("cannot read a crystal from a {other:?} document"))),
    }
}

fn failure_json(f: &CheckFailure) -> Value {
    match f {
        CheckFailure::Residual { relation, residual } => {
            let (i, j, s) = residual
                .entries()
                .find(|(_, _, s)| !s.is_zero())
                .expect("reported residuals are nonzero");
            json!({
                "relation": relation.name(),
                "entry": [i, j],
                "residual": json::series_doc(s),
            })
        }
        CheckFailure::NotPerfect { det_mod_p } => json!({
            "relation": "perfectness",
            "det_mod_p": det_mod_p.to_string(),
        }),
    }
}

fn trace_json(trace: &[TraceStep]) -> Value {
    trace
        .iter()
        .map(|s| {
            json!({
                "stage": s.stage,
                "relation": s.relation,
                "statement": s.statement,
                "holds": s.holds,
            })
        })
        .collect()
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Gen {
            p,
            h,
            precision,
            truncation,
            kind,
            rho,
            seed,
        } => {
            let ctx = PrecisionContext::new(p, precision, truncation)?;
            let ectx = ExtensionContext::new(ctx, h)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let text = match kind {
                GenKind::Sub1 => json::to_string(&json::crystal_doc(&make_standard_crystal(ctx, h, StandardKind::Sub1)?)),
                GenKind::Super1 => json::to_string(&json::crystal_doc(&make_standard_crystal(ctx, h, StandardKind::Super1)?)),
                GenKind::Slope1 => {
                    let rho = rho.unwrap_or(h);
                    json::to_string(&json::crystal_doc(&make_standard_crystal(ctx, h, StandardKind::Slope1 { rho })?))
                }
                GenKind::Pair => json::to_string(&json::crystal_doc(&standard_pair(ctx, h)?)),
                GenKind::Split => {
                    let w = random_alpha(ctx, h, truncation, &mut rng);
                    json::to_string(&json::extension_doc(&from_alpha(&w, &ectx)?.with_geometric(true)?))
                }
                GenKind::Extension => json::to_string(&json::extension_doc(&random_extension(&ectx, &mut rng))),
                GenKind::Zero => json::to_string(&json::extension_doc(&ectx.zero())),
            };
            Ok(Outcome::ok(text))
        }
        Command::Check { relation, file } => {
            let c = load_crystal_like(&file)?;
            let (name, report): (&str, CheckReport) = match relation {
                CheckKind::Horizontality => ("horizontality", check_horizontality(&c)),
                CheckKind::Pairing => ("pairing", check_pairing_compat(&c)),
            };
            let mut m = header("check", c.context());
            m.insert("check".into(), json!(name));
            m.insert("passed".into(), json!(report.passed()));
            m.insert("failures".into(), report.failures.iter().map(failure_json).collect());
            Ok(Outcome {
                report: render(m),
                passed: report.passed(),
            })
        }
        Command::BaerSum { e1, e2, mode } => {
            let mode = match mode {
                Mode::Fast => BaerMode::Fast,
                Mode::Pp => BaerMode::PullbackPushout,
                Mode::Pop => BaerMode::PushoutPullback,
            };
            let sum = baer_sum(&load_extension(&e1)?, &load_extension(&e2)?, mode)?;
            Ok(Outcome::ok(json::to_string(&json::extension_doc(&sum))))
        }
        Command::Trivialize { file } => {
            let e = load_extension(&file)?;
            match trivialize(&e) {
                Ok(w) => Ok(Outcome::ok(json::to_string(&json::witness_doc(&w)))),
                Err(u) => {
                    let mut m = header("untrivializable", e.context());
                    m.insert("h".into(), json!(e.height()));
                    m.insert("reason".into(), json!(u.to_string()));
                    Ok(Outcome {
                        report: render(m),
                        passed: false,
                    })
                }
            }
        }
        Command::Ptorsion { extension, witness } => {
            let e = load_extension(&extension)?;
            let w = json::parse_witness(&json::from_str(&read(&witness)?)?)?;
            let mut m = header("ptorsion", e.context());
            m.insert("h".into(), json!(e.height()));
            let passed = match p_torsion_check(&e, &w) {
                Ok(TorsionOutcome::Certified { beta, trace, precision }) => {
                    m.insert("outcome".into(), json!("certified"));
                    m.insert("precision".into(), json!(precision));
                    m.insert("beta".into(), json!(json::matrix_doc(beta.alpha())));
                    m.insert("trace".into(), trace_json(&trace));
                    true
                }
                Ok(TorsionOutcome::Refuted { step, trace }) => {
                    m.insert("outcome".into(), json!("refuted"));
                    m.insert("reason".into(), json!(step.statement));
                    m.insert("trace".into(), trace_json(&trace));
                    false
                }
                Ok(TorsionOutcome::Inconclusive { reason, trace }) => {
                    m.insert("outcome".into(), json!("inconclusive"));
                    m.insert("reason".into(), json!(reason));
                    m.insert("trace".into(), trace_json(&trace));
                    false
                }
                Err(Error::WitnessInvalid(reason)) => {
                    m.insert("outcome".into(), json!("witness-invalid"));
                    m.insert("reason".into(), json!(reason));
                    false
                }
                Err(other) => return Err(other),
            };
            Ok(Outcome {
                report: render(m),
                passed,
            })
        }
        Command::Slopes { file } => {
            let c = load_crystal_like(&file)?;
            let s = newton_slopes(&c)?;
            Ok(Outcome::ok(json::to_string_pretty(&json::slopes_doc(c.context(), &s))))
        }
        Command::Scale { file, by } => {
            let e = load_extension(&file)?;
            Ok(Outcome::ok(json::to_string(&json::extension_doc(&int_scale(&e, by as i128)))))
        }
        Command::Grouplaw {
            p,
            h,
            n,
            precision,
            samples,
            seed,
        } => {
            if n == 0 {
                return Err(Error::InvalidPoint("base degree must be at least 1".into()));
            }
            let ectx = ExtensionContext::new(PrecisionContext::new(p, precision, n - 1)?, h)?;
            let r = group_law_check(&ectx, n, samples, seed)?;
            let mut m = header("grouplaw", ectx.context());
            m.insert("h".into(), json!(h));
            m.insert("n".into(), json!(n));
            m.insert("seed".into(), json!(seed));
            m.insert("samples".into(), json!(samples));
            m.insert("tangent_dimension".into(), json!(h - 1));
            let axioms: Vec<Value> = r
                .axioms
                .iter()
                .map(|a| json!({"name": a.name, "checked": a.checked, "failed": a.failed}))
                .collect();
            m.insert("axioms".into(), json!(axioms));
            m.insert("passed".into(), json!(r.passed()));
            m.insert(
                "first_failure".into(),
                r.first_failure
                    .map_or(Value::Null, |(sample, axiom)| json!({"sample": sample, "axiom": axiom})),
            );
            Ok(Outcome {
                report: render(m),
                passed: r.passed(),
            })
        }
        Command::Probe {
            p,
            h,
            n,
            precision,
            samples,
            seed,
        } => {
            if n == 0 {
                return Err(Error::InvalidPoint("base degree must be at least 1".into()));
            }
            let ectx = ExtensionContext::new(PrecisionContext::new(p, precision, n - 1)?, h)?;
            let r = multiply_by_p_injectivity_probe(&ectx, n, samples, seed)?;
            Ok(Outcome {
                report: json::to_string_pretty(&json::probe_doc(&ectx, n, &r)),
                passed: r.counterexamples.is_empty(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout().lock(), "{}", out.report);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("crystal-lab: {e}");
            ExitCode::from(2)
        }
    }
}
