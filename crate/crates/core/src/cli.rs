//! Command-line surface. Every command prints one JSON object with a fixed key
//! order: `command`, `fragment`, `content_hash`, `verdict`, then `report`.
//!
//! Exit codes: 0 all verdicts positive, 1 a negative verdict, 2 usage or parse
//! error, 3 a search or enumeration budget was exhausted.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagram::{self, Term};
use crate::error::Error;
use crate::fragments::{self, Fragment};
use crate::harness::{self, DEFAULT_CAP};
use crate::models;
use crate::rewrite::{self, Budget};
use crate::scalars;
use crate::semantics;
use crate::transfer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcprop", version, about = "Equational reasoning over quantum circuit fragments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Checks every axiom of a fragment exactly.
    Soundness { fragment: String },
    /// Runs separating interpretations for one axiom or all of them.
    Independence {
        fragment: String,
        #[arg(long)]
        axiom: Option<String>,
        #[arg(long)]
        truncate: Option<usize>,
        /// A custom interpretation, e.g. "?H", "#{S}_[4]", "argdet2", "S->SX".
        #[arg(long)]
        interp: Option<String>,
    },
    /// Runs the whole minimality table of a fragment.
    Minimality { fragment: String },
    /// Prints the canonical form of a diagram.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        fragment: Option<String>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Prints the exact unitary of a diagram.
    Eval {
        file: PathBuf,
        #[arg(long)]
        fragment: Option<String>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Searches for a derivation between two diagrams.
    Equal {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        fragment: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        states: usize,
    },
    /// Replays every derivation in a file.
    CheckDerivation { file: PathBuf },
    /// Enumerates the group generated on n wires.
    Closure {
        fragment: String,
        #[arg(long)]
        wires: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Connects all semantically equal short words by search.
    Evidence {
        fragment: String,
        #[arg(long)]
        wires: usize,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Visible scalar group and hidden-phase scan.
    Scalars {
        fragment: String,
        #[arg(long, default_value_t = 1)]
        wires: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Builds and checks a scalar refinement.
    Refine { file: PathBuf },
    /// Runs the transfer checks of a case file.
    Transfer {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Also search for the decoded source relations.
        #[arg(long)]
        relations: bool,
    },
}

/// Exit code and JSON text of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn envelope(command: &str, f: Option<&Fragment>, verdict: &str, report: impl Serialize) -> Value {
    json!({
        "command": command,
        "fragment": f.map(|f| f.name.clone()),
        "content_hash": f.map(|f| f.content_hash.clone()),
        "verdict": verdict,
        "report": serde_json::to_value(report).expect("reports serialize"),
    })
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::UnknownFragment(_)
        | Error::UnknownGenerator(_)
        | Error::WidthMismatch(_)
        | Error::ShortcutMismatch(_)
        | Error::UnknownConstant(_)
        | Error::DimensionMismatch(_) => EXIT_USAGE,
        Error::CapExceeded(_) => EXIT_BUDGET,
        _ => EXIT_NEGATIVE,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Loads a fragment by name or path without the soundness gate.
fn load_unchecked(spec: &str) -> Result<Fragment, Error> {
    if fragments::builtin_source(spec).is_some() {
        return fragments::load_fragment(spec);
    }
    fragments::parse_fragment_unchecked(&read(Path::new(spec))?)
}

/// A fragment whose generators are every gate of the built-in signature.
fn master_fragment(dim: usize) -> Result<Fragment, Error> {
    let sem = semantics::semantics_for_dim(dim)?;
    let gens: Vec<&str> = sem.names().collect();
    let src = format!("(fragment master{dim} dim {dim})\n(generators {})\n", gens.join(" "));
    fragments::parse_fragment_unchecked(&src)
}

fn fragment_or_master(f: &Option<String>, dim: usize) -> Result<Fragment, Error> {
    match f {
        Some(s) => fragments::load_fragment_or_file(s),
        None => master_fragment(dim),
    }
}

fn read_term(path: &Path) -> Result<Term, Error> {
    diagram::parse_term(&read(path)?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "positive"
    } else {
        "negative"
    }
}

fn dispatch(cmd: Cmd) -> Result<(i32, Value), Error> {
    Ok(match cmd {
        Cmd::Soundness { fragment } => {
            let f = load_unchecked(&fragment)?;
            let r = f.soundness_check();
            let ok = r.all_sound;
            (code(ok), envelope("soundness", Some(&f), verdict(ok), r))
        }
        Cmd::Independence {
            fragment,
            axiom,
            truncate,
            interp,
        } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            if let Some(spec) = interp {
                let axiom = axiom.ok_or_else(|| Error::Invalid("--interp needs --axiom".into()))?;
                let k = match truncate {
                    Some(k) => k,
                    None => f.axiom(&axiom).ok_or_else(|| Error::UnknownRule(axiom.clone()))?.width,
                };
                let i = models::parse_interp(&spec, &f)?;
                let r = models::independence_check(&f, &axiom, &i, k)?;
                let ok = r.witness;
                return Ok((code(ok), envelope("independence", Some(&f), verdict(ok), r)));
            }
            let mut suite = models::minimality_suite(&f)?;
            if let Some(a) = &axiom {
                if f.axiom(a).is_none() {
                    return Err(Error::UnknownRule(a.clone()));
                }
                suite.rows.retain(|r| &r.axiom == a);
            }
            if let Some(k) = truncate {
                let mut rows = Vec::new();
                for r in suite.rows {
                    match &r.evaluated {
                        Some(e) => {
                            let i = models::parse_interp(e, &f)?;
                            let c = models::independence_check(&f, &r.axiom, &i, k)?;
                            rows.push(models::SuiteRow {
                                truncation: k,
                                equalized: c.equalized,
                                separated: c.separated,
                                witness: c.witness,
                                ..r
                            });
                        }
                        None => rows.push(models::SuiteRow { truncation: k, ..r }),
                    }
                }
                suite.rows = rows;
            }
            let ok = suite.failed_axioms().is_empty();
            (code(ok), envelope("independence", Some(&f), verdict(ok), suite))
        }
        Cmd::Minimality { fragment } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            let suite = models::minimality_suite(&f)?;
            let failed = suite.failed_axioms();
            let ok = failed.is_empty();
            let report = json!({
                "witnessed": suite.witnessed_axioms(),
                "failed": failed,
                "rows": suite.rows,
            });
            (code(ok), envelope("minimality", Some(&f), verdict(ok), report))
        }
        Cmd::Normalize { file, fragment, dim } => {
            let f = fragment_or_master(&fragment, dim)?;
            let c = f.canonical(&read_term(&file)?)?;
            let report = json!({
                "term": c.to_term().to_string(),
                "canonical": c,
            });
            (EXIT_OK, envelope("normalize", Some(&f), "positive", report))
        }
        Cmd::Eval { file, fragment, dim } => {
            let f = fragment_or_master(&fragment, dim)?;
            let c = f.canonical(&read_term(&file)?)?;
            let m = f.eval(&c)?;
            let report = json!({
                "dim": m.dim(),
                "matrix": m
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_strings()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "text": semantics::print_matrix(&m),
            });
            (EXIT_OK, envelope("eval", Some(&f), "positive", report))
        }
        Cmd::Equal {
            a,
            b,
            fragment,
            depth,
            states,
        } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            let (ta, tb) = (read_term(&a)?, read_term(&b)?);
            let semantically_equal = f.eval_term(&ta)? == f.eval_term(&tb)?;
            let budget = Budget {
                max_depth: depth,
                max_states: states,
                ..Budget::default()
            };
            let found = rewrite::search_equal(&ta, &tb, &f, budget)?;
            let (c, v) = match (&found, semantically_equal) {
                (Some(_), _) => (EXIT_OK, "positive"),
                (None, false) => (EXIT_NEGATIVE, "negative"),
                (None, true) => (EXIT_BUDGET, "exhausted"),
            };
            let report = json!({
                "semantically_equal": semantically_equal,
                "budget": budget,
                "found": found.is_some(),
                "steps": found.as_ref().map(|s| s.steps.clone()),
                "script": found.as_ref().map(|s| s.to_text()),
            });
            (c, envelope("equal", Some(&f), v, report))
        }
        Cmd::CheckDerivation { file } => {
            let src = read(&file)?;
            let scripts = rewrite::parse_scripts(&src)?;
            let results = rewrite::check_corpus(&src)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for (s, r) in scripts.iter().zip(results) {
                match r {
                    Ok(rep) => rows.push(json!({"name": s.name, "ok": true, "steps": rep.steps, "error": null})),
                    Err(e) => {
                        ok = false;
                        rows.push(json!({"name": s.name, "ok": false, "steps": s.steps.len(), "error": e.to_string()}));
                    }
                }
            }
            let f = match scripts.first() {
                Some(s) => Some(fragments::load_fragment_or_file(&s.fragment)?),
                None => None,
            };
            (code(ok), envelope("check-derivation", f.as_ref(), verdict(ok), json!({ "derivations": rows })))
        }
        Cmd::Closure { fragment, wires, cap } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            let r = harness::group_closure(&f, wires, cap)?;
            let ok = r.cross_check;
            (code(ok), envelope("closure", Some(&f), verdict(ok), r))
        }
        Cmd::Evidence {
            fragment,
            wires,
            len,
            depth,
        } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            let budget = Budget {
                max_depth: depth,
                ..Budget::default()
            };
            let r = harness::completeness_evidence(&f, wires, len, budget)?;
            let ok = r.failures.is_empty();
            let c = if ok { EXIT_OK } else { EXIT_BUDGET };
            (c, envelope("evidence", Some(&f), if ok { "positive" } else { "exhausted" }, r))
        }
        Cmd::Scalars { fragment, wires, depth } => {
            let f = fragments::load_fragment_or_file(&fragment)?;
            let info = scalars::visible_scalars(&f)?;
            let hidden = scalars::hidden_phases(&f, wires, depth)?;
            let ok = hidden.is_empty();
            let report = json!({
                "visible": info,
                "hidden_phase_scan": {
                    "wires": wires,
                    "depth": depth,
                    "hidden": hidden.iter().map(|x| x.to_strings()).collect::<Vec<_>>(),
                },
            });
            (code(ok), envelope("scalars", Some(&f), verdict(ok), report))
        }
        Cmd::Refine { file } => {
            let spec = scalars::parse_refine(&read(&file)?)?;
            let base = fragments::load_fragment_or_file(&spec.fragment)?;
            let r = scalars::refine_from_spec(&spec, &base)?;
            (EXIT_OK, envelope("refine", Some(&r.fragment), "positive", &r))
        }
        Cmd::Transfer { file, depth, relations } => {
            let src = read(&file)?;
            let case = transfer::parse_transfer(&src, file.parent())?;
            let budget = Budget {
                max_depth: depth,
                ..Budget::default()
            };
            let encdec = transfer::check_encdec(&case)?;
            let decenc = transfer::check_decenc(&case, budget)?;
            let decrel = if relations {
                Some(transfer::check_decrelations(&case, budget)?)
            } else {
                None
            };
            let searches_ok = decenc.all_found && decrel.as_ref().is_none_or(|r| r.all_found);
            let (c, v) = if !encdec.all_equal {
                (EXIT_NEGATIVE, "negative")
            } else if !searches_ok {
                (EXIT_BUDGET, "exhausted")
            } else {
                (EXIT_OK, "positive")
            };
            let report = json!({
                "case": case.name,
                "source": case.source.name,
                "source_hash": case.source.content_hash,
                "encdec": encdec,
                "decenc": decenc,
                "decrelations": decrel,
            });
            (c, envelope("transfer", Some(&case.target), v, report))
        }
    })
}

fn code(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome {
                code,
                stdout: e.to_string(),
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok((code, v)) => Outcome {
            code,
            stdout: serde_json::to_string_pretty(&v).expect("json"),
        },
        Err(e) => {
            let v = json!({ "error": e.to_string() });
            Outcome {
                code: exit_for(&e),
                stdout: serde_json::to_string_pretty(&v).expect("json"),
            }
        }
    }
}
