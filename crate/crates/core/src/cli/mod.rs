//! Command-line front end: `eval`, `check` and `basis`.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on usage,
//! parse or evaluation errors.

pub mod expr;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::axioms::{check_condition, check_hopf, Domain, Report, Verdict};
use crate::error::{HopfError, Result};
use crate::hopf::DEFAULT_BUDGET;
use crate::instances::make_rule;
use crate::rule::{Condition, Rule};

pub use expr::{evaluate, parse_expression, EvalOptions, Expr, Value};

/// Environment variable naming a `key = value` config file.
pub const CONFIG_ENV: &str = "HOPF_FORGE_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "hopf-forge", version, about = "Hopf algebras from combinatorial composition/decomposition rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expression and print the normalized result.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Expression, e.g. `delta(w"ab") * S(w"a")`.
        expression: String,
    },
    /// Check rule conditions and Hopf algebra laws on all objects up to a size bound.
    Check {
        #[command(flatten)]
        common: Common,
        /// `all`, `hopf`, or a comma-separated list such as `C2,D4,hopf`.
        #[arg(long)]
        conditions: Option<String>,
    },
    /// List every object up to a size bound.
    Basis {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// free, symmetric, shuffle, polynomial, graph or forest.
    #[arg(long)]
    pub instance: Option<String>,
    /// Letters for the word instances, e.g. `ab` or `x<y`.
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Largest object size to enumerate.
    #[arg(long)]
    pub bound: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tuple budget for the alternating-sum antipode and D5 searches.
    #[arg(long)]
    pub budget: Option<u64>,
}

/// Settings read from the config file; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub instance: Option<String>,
    pub alphabet: Option<String>,
    pub bound: Option<usize>,
    pub format: Option<Format>,
    pub budget: Option<u64>,
    pub conditions: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> std::result::Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

struct Settings {
    rule: Rule,
    bound: usize,
    format: Format,
    budget: u64,
}

/// Size bound used when neither a flag nor the config sets one.
pub fn default_bound(instance: &str) -> usize {
    match instance {
        "graph" => 4,
        "forest" => 5,
        _ => 4,
    }
}

fn settings(common: &Common, config: &Config) -> Result<Settings> {
    let instance = common
        .instance
        .clone()
        .or_else(|| config.instance.clone())
        .ok_or_else(|| HopfError::InvalidRule("no instance given (use --instance)".into()))?;
    let alphabet = common.alphabet.clone().or_else(|| config.alphabet.clone());
    let rule = make_rule(&instance, alphabet.as_deref())?;
    Ok(Settings {
        rule,
        bound: common.bound.or(config.bound).unwrap_or_else(|| default_bound(&instance)),
        format: common.format.or(config.format).unwrap_or(Format::Text),
        budget: common.budget.or(config.budget).unwrap_or(DEFAULT_BUDGET),
    })
}

/// What `check` should run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckItem {
    Condition(Condition),
    Hopf,
}

pub fn parse_conditions(spec: &str) -> Result<Vec<CheckItem>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.to_ascii_lowercase().as_str() {
            "all" => out.extend(Condition::ALL.map(CheckItem::Condition)),
            "hopf" => out.push(CheckItem::Hopf),
            _ => out.push(CheckItem::Condition(part.parse()?)),
        }
    }
    if out.is_empty() {
        return Err(HopfError::InvalidRule("no conditions selected".into()));
    }
    Ok(out)
}

/// A report counts as a verification failure when it concerns a declared
/// condition (or the Hopf laws) and does not hold.
fn is_failure(r: &Report) -> bool {
    r.declared && r.verdict != Verdict::Holds
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = match std::env::var_os(CONFIG_ENV) {
        Some(path) => match Config::load(Path::new(&path)) {
            Ok(c) => c,
            Err(msg) => {
                let _ = writeln!(err, "error: {msg}");
                return 2;
            }
        },
        None => Config::default(),
    };
    match dispatch(cli.command, &config, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, config: &Config, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| HopfError::InvalidRule(format!("cannot write output: {e}"));
    match command {
        Command::Eval { common, expression } => {
            let s = settings(&common, config)?;
            let value = evaluate(&expression, &s.rule, EvalOptions { budget: s.budget })?;
            match s.format {
                Format::Text => writeln!(out, "{}", value.display(&s.rule)).map_err(io)?,
                Format::Json => writeln!(out, "{}", value.to_json()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Check { common, conditions } => {
            let s = settings(&common, config)?;
            let spec = conditions.or_else(|| config.conditions.clone()).unwrap_or_else(|| "all".into());
            let items = parse_conditions(&spec)?;
            let dom = Domain::new(&s.rule, s.bound)?.with_budget(s.budget);
            let mut reports = Vec::new();
            for item in items {
                reports.push(match item {
                    CheckItem::Condition(c) => check_condition(&s.rule, c, &dom)?,
                    CheckItem::Hopf => check_hopf(&s.rule, &dom)?,
                });
            }
            match s.format {
                Format::Text => {
                    for r in &reports {
                        write!(out, "{}", r.to_text()).map_err(io)?;
                    }
                }
                Format::Json => {
                    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
                    writeln!(out, "{json}").map_err(io)?;
                }
            }
            Ok(if reports.iter().any(is_failure) { 1 } else { 0 })
        }
        Command::Basis { common } => {
            let s = settings(&common, config)?;
            let objects = crate::instances::enumerate_basis(&s.rule, s.bound)?;
            match s.format {
                Format::Text => {
                    for k in &objects {
                        writeln!(out, "{}", s.rule.format_object(k)).map_err(io)?;
                    }
                }
                Format::Json => {
                    let items = objects
                        .iter()
                        .map(|k| {
                            Ok(BTreeMap::from([
                                ("key", serde_json::Value::from(k.as_str())),
                                ("literal", s.rule.format_object(k).into()),
                                ("size", s.rule.size(k)?.into()),
                            ]))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    writeln!(out, "{}", serde_json::to_string_pretty(&items).expect("basis serializes")).map_err(io)?;
                }
            }
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["hopf-forge"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_examples() {
        let (code, out, _) = call(&["eval", "--instance", "shuffle", "w\"a\" * w\"b\""]);
        assert_eq!((code, out.trim()), (0, "w\"ab\" + w\"ba\""));
        let (code, out, _) = call(&["eval", "--instance", "polynomial", "delta(w\"xx\")"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "void (x) w\"xx\" + 2 w\"x\" (x) w\"x\" + w\"xx\" (x) void");
    }

    #[test]
    fn eval_json() {
        let (code, out, _) = call(&["eval", "--instance", "free", "--format", "json", "2/3 w\"b\" - w\"a\""]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["type"], "element");
        assert_eq!(v["terms"][0]["key"], "a");
        assert_eq!(v["terms"][0]["coeff"], "-1");
        assert_eq!(v["terms"][1]["coeff"], "2/3");
    }

    #[test]
    fn forest_check_reports_d4_failure() {
        let (code, out, _) = call(&["check", "--instance", "forest", "--bound", "4", "--conditions", "all"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("forest D4: fails"));
        assert!(out.contains("forest CD1: holds"));
        assert_eq!(out.matches(": holds").count(), 10);
        let (code, out, _) = call(&[
            "check", "--instance", "forest", "--bound", "3", "--conditions", "D4", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[0]["verdict"], "fails");
        assert!(v[0]["counterexample"]["lhs"].is_string());
    }

    #[test]
    fn hopf_check() {
        let (code, out, _) = call(&["check", "--instance", "polynomial", "--bound", "6", "--conditions", "hopf"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("polynomial hopf: holds"));
    }

    #[test]
    fn usage_and_parse_errors_exit_2() {
        assert_eq!(call(&["eval", "--instance", "free", "w\"a\" +"]).0, 2);
        assert_eq!(call(&["eval", "--instance", "lie", "w\"a\""]).0, 2);
        assert_eq!(call(&["eval", "w\"a\""]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["check", "--instance", "free", "--conditions", "C9"]).0, 2);
        let (_, _, err) = call(&["eval", "--instance", "free", "w\"a\" + )"]);
        assert!(err.contains("1:8"), "{err}");
    }

    #[test]
    fn basis_listing() {
        let (code, out, _) = call(&["basis", "--instance", "forest", "--bound", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().collect::<Vec<_>>(), vec!["void", "t()", "t(t())", "f[t(),t()]"]);
        let (_, out, _) = call(&["basis", "--instance", "graph", "--bound", "2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 10);
    }

    #[test]
    fn condition_lists() {
        assert_eq!(parse_conditions("all").unwrap().len(), 11);
        assert_eq!(
            parse_conditions("c2, hopf").unwrap(),
            vec![CheckItem::Condition(Condition::C2), CheckItem::Hopf]
        );
        assert!(parse_conditions("").is_err());
    }

    #[test]
    fn config_file_parses() {
        let c: Config = toml::from_str("instance = \"shuffle\"\nalphabet = \"xy\"\nbound = 3\n").unwrap();
        assert_eq!(c.instance.as_deref(), Some("shuffle"));
        assert_eq!(c.bound, Some(3));
        assert!(toml::from_str::<Config>("colour = 1").is_err());
    }
}
