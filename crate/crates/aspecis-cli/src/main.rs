//! `aspecis`: validate, match, weave and explain model compositions.
//!
//! Exit codes: 0 success, 1 validation or usage problem, 2 unresolved
//! weaving conflict, 3 I/O or parse failure. Diagnostics go to standard
//! error; data output (match lists, reports) goes to standard output;
//! woven models are written only to `--out` files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use aspecis_core::awm::{builtin_metamodels, link_kind, open_weaving, ModelRoleSet};
use aspecis_core::diag::{Code, Diagnostic, Error};
use aspecis_core::km3::parse_km3;
use aspecis_core::model::{
    canonical_serialize, check_conformance, parse_model, resolve_id, ModelInstance,
};
use aspecis_core::pointcut::{match_pointcut, parse_pattern};
use aspecis_core::weaver::{collect_applications, weave, ResolveMode};

#[derive(Parser)]
#[command(name = "aspecis", version, about = "Aspect-oriented model weaving over JSON models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file against a metamodel file.
    Validate {
        /// Model-JSON file to check.
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        /// Metamodel (.km3) file to check against.
        #[arg(short = 'M', long = "metamodel")]
        metamodel: PathBuf,
        /// Diagnostics format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List join points of a core model matching a pointcut.
    Match {
        /// Core Model-JSON file.
        #[arg(long)]
        core: PathBuf,
        /// Pointcut type: call or execution.
        #[arg(long = "type")]
        type_pointcut: String,
        /// Pattern over class and operation names, e.g. 'Student.New*'.
        #[arg(long)]
        pattern: String,
    },
    /// Weave an aspect model into a core model and write the result.
    Weave {
        /// Core Model-JSON file.
        #[arg(long)]
        core: PathBuf,
        /// Aspect Model-JSON file.
        #[arg(long)]
        aspect: PathBuf,
        /// Weaving Model-JSON file.
        #[arg(long)]
        weaving: PathBuf,
        /// Output file for the woven model (canonical form).
        #[arg(long)]
        out: PathBuf,
        /// Conflict handling: fail on any conflict, or keep the advice of
        /// the strictly highest-priority aspect.
        #[arg(long, value_enum, default_value_t = Resolve::Fail)]
        resolve: Resolve,
    },
    /// Report links, resolved ends, matches and applications of a weaving.
    Explain {
        /// Core Model-JSON file.
        #[arg(long)]
        core: PathBuf,
        /// Aspect Model-JSON file.
        #[arg(long)]
        aspect: PathBuf,
        /// Weaving Model-JSON file.
        #[arg(long)]
        weaving: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Resolve {
    Fail,
    Priority,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successful outcomes; anything else
            // is a usage problem.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let status = match cli.command {
        Command::Validate { model, metamodel, format } => cmd_validate(&model, &metamodel, format),
        Command::Match { core, type_pointcut, pattern } => cmd_match(&core, &type_pointcut, &pattern),
        Command::Weave { core, aspect, weaving, out, resolve } => {
            cmd_weave(&core, &aspect, &weaving, &out, resolve)
        }
        Command::Explain { core, aspect, weaving } => cmd_explain(&core, &aspect, &weaving),
    };
    ExitCode::from(status)
}

/// Exit status for a diagnostic code: I/O and parse failures are 3,
/// unresolved conflicts are 2, everything else is a validation failure (1).
fn exit_for(code: Code) -> u8 {
    match code {
        Code::Io | Code::Json | Code::Schema | Code::DupId | Code::Parse => 3,
        Code::Conflict => 2,
        _ => 1,
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::new(Code::Io, path.display().to_string(), format!("cannot read file: {}", e))
    })
}

fn load_model(path: &Path) -> Result<ModelInstance, Error> {
    parse_model(&read_file(path)?)
}

fn report(diags: &[Diagnostic], format: Format) {
    match format {
        Format::Text => {
            for d in diags {
                eprintln!("{}", d);
            }
        }
        Format::Json => {
            let array: Vec<serde_json::Value> = diags
                .iter()
                .map(|d| {
                    serde_json::json!({
                        "code": d.code.as_str(),
                        "path": d.path,
                        "message": d.message,
                    })
                })
                .collect();
            eprintln!("{}", serde_json::Value::Array(array));
        }
    }
}

fn fail(err: Error, format: Format) -> u8 {
    report(std::slice::from_ref(err.diagnostic()), format);
    exit_for(err.code())
}

fn cmd_validate(model_path: &Path, metamodel_path: &Path, format: Format) -> u8 {
    let mm = match read_file(metamodel_path).and_then(|s| parse_km3(&s)) {
        Ok(mm) => mm,
        Err(e) => return fail(e, format),
    };
    let model = match load_model(model_path) {
        Ok(m) => m,
        Err(e) => return fail(e, format),
    };
    let diags = check_conformance(&model, &mm);
    if diags.is_empty() {
        0
    } else {
        report(&diags, format);
        1
    }
}

fn cmd_match(core_path: &Path, type_pointcut: &str, pattern_text: &str) -> u8 {
    let run = || -> Result<Vec<String>, Error> {
        let core = load_model(core_path)?;
        let mms = builtin_metamodels();
        let pattern = parse_pattern(pattern_text)?;
        let jps = match_pointcut(&core, &mms.core, type_pointcut, &pattern)?;
        Ok(jps.into_iter().map(|jp| jp.operation_id).collect())
    };
    match run() {
        Ok(ids) => {
            for id in ids {
                println!("{}", id);
            }
            0
        }
        Err(e) => fail(e, Format::Text),
    }
}

fn load_roles(core: &Path, aspect: &Path, weaving: &Path) -> Result<ModelRoleSet, Error> {
    Ok(ModelRoleSet {
        core: load_model(core)?,
        aspect: load_model(aspect)?,
        weaving: load_model(weaving)?,
    })
}

fn cmd_weave(core: &Path, aspect: &Path, weaving: &Path, out: &Path, resolve: Resolve) -> u8 {
    let mode = match resolve {
        Resolve::Fail => ResolveMode::Fail,
        Resolve::Priority => ResolveMode::Priority,
    };
    let run = || -> Result<String, Error> {
        let rs = load_roles(core, aspect, weaving)?;
        let woven = weave(&rs, mode)?;
        Ok(canonical_serialize(woven.model()))
    };
    match run() {
        Ok(bytes) => {
            if let Err(e) = fs::write(out, bytes) {
                return fail(
                    Error::new(
                        Code::Io,
                        out.display().to_string(),
                        format!("cannot write file: {}", e),
                    ),
                    Format::Text,
                );
            }
            0
        }
        Err(e) => fail(e, Format::Text),
    }
}

fn cmd_explain(core: &Path, aspect: &Path, weaving: &Path) -> u8 {
    let run = || -> Result<String, Error> {
        let rs = load_roles(core, aspect, weaving)?;
        let mms = builtin_metamodels();
        let view = open_weaving(&rs)?;
        let apps = collect_applications(&rs, &view)?;

        let mut out = String::new();
        out.push_str(&format!(
            "weaving {}: core {}, aspect {}\n",
            rs.weaving.name(),
            view.core_ref.model_name,
            view.aspect_ref.model_name
        ));
        out.push_str(&format!(
            "{} {}\n",
            view.links.len(),
            if view.links.len() == 1 { "link" } else { "links" }
        ));
        for lk in &view.links {
            let (core_kind, aspect_kind) = link_kind(lk, &rs)?;
            out.push_str(&format!("link {} ({})\n", lk.name, lk.link_id));
            out.push_str(&format!("  endCore   {} ({})\n", lk.end_core, core_kind));
            out.push_str(&format!("  endAspect {} ({})\n", lk.end_aspect, aspect_kind));

            let advice = resolve_id(&rs.aspect, &mms.aspect, &lk.end_aspect)?;
            let pointcut = advice
                .slots
                .get("pointcut")
                .map(|v| v.ref_ids())
                .unwrap_or_default()
                .first()
                .and_then(|id| rs.aspect.element(id))
                .cloned();
            if let Some(pc) = pointcut {
                let type_pointcut = pc.str_slot("typePointcut").unwrap_or("");
                let pattern_text = pc.str_slot("pattern").unwrap_or("");
                out.push_str(&format!("  pointcut  {} {}\n", type_pointcut, pattern_text));
                let pattern = parse_pattern(pattern_text)?;
                let jps = match_pointcut(&rs.core, &mms.core, type_pointcut, &pattern)?;
                out.push_str("  matched join points:\n");
                for jp in jps {
                    out.push_str(&format!("    {}\n", jp.operation_id));
                }
            }
        }
        out.push_str(&format!(
            "{} {}\n",
            apps.len(),
            if apps.len() == 1 { "application" } else { "applications" }
        ));
        for app in &apps {
            out.push_str(&format!(
                "  [{}] {} at {} priority {} order {}\n",
                app.kind, app.advice_id, app.join_point.operation_id, app.priority, app.order_index
            ));
        }
        Ok(out)
    };
    match run() {
        Ok(text) => {
            print!("{}", text);
            0
        }
        Err(e) => fail(e, Format::Text),
    }
}
