//! Command implementations for the `frcode` binary. Kept in a library so the
//! integration tests can drive commands without spawning processes.

pub mod args;
mod scenario;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use frcode::bounds::BoundReport;
use frcode::constructions::{self, fixtures, GraphSpec};
use frcode::hierarchy::{self, FileSizeHierarchy, SearchConfig};
use frcode::{validate_fr, Error, FrParams, IncidenceStructure};
use serde_json::{json, Value};

use args::{Cli, Command, Family, Format, Options};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: Error,
    },
    /// Bad arguments, non-regular input, or a failed check.
    #[error("{0}")]
    Invalid(String),
}

impl Failure {
    pub fn core(context: impl std::fmt::Display, source: Error) -> Self {
        Failure::Core {
            context: context.to_string(),
            source,
        }
    }

    /// Prefixes more context, keeping the exit code.
    pub fn within(self, at: &str) -> Self {
        match self {
            Failure::Core { context, source } => Failure::Core {
                context: format!("{at}: {context}"),
                source,
            },
            Failure::Invalid(m) => Failure::Invalid(format!("{at}: {m}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core { source, .. } => match source {
                Error::BudgetExceeded { .. } | Error::EnumerationCap { .. } => EXIT_BUDGET,
                Error::Format { .. } | Error::Record { .. } | Error::Io { .. } => EXIT_IO,
                _ => EXIT_VALIDATION,
            },
            Failure::Invalid(_) => EXIT_VALIDATION,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs one parsed command line. Results go to `out`, warnings to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let opts = &cli.opts;
    match &cli.command {
        Command::Analyze { input } => analyze(input, opts, out, err),
        Command::Dual { input } => {
            let input = load_input(input, None, opts, err)?;
            emit_structure(&input.structure.dual(), opts, out)
        }
        Command::Hierarchy { input } => hierarchy_cmd(input, opts, out, err),
        Command::Bounds { input, params } => bounds_cmd(input.as_deref(), params.as_deref(), opts, out, err),
        Command::VerifyDuality { input } => verify_duality(input, opts, out, err),
        Command::Construct { family } => construct(family, opts, out),
        Command::Simulate { script } => scenario::run_script(script, opts, out, err),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(|e| {
        Failure::core(
            "output",
            Error::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            },
        )
    })
}

fn write_json(out: &mut dyn Write, value: &Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_out(out, &text)
}

fn search_config(opts: &Options) -> SearchConfig {
    SearchConfig {
        budget: opts.budget,
        workers: opts.workers.max(1),
    }
}

pub(crate) struct Input {
    pub label: String,
    pub structure: IncidenceStructure,
}

/// Resolves a fixture name or a database path. Fixture names win unless the
/// argument starts with `./`; relative paths are taken against `base`.
pub(crate) fn load_input(spec: &str, base: Option<&Path>, opts: &Options, err: &mut dyn Write) -> Result<Input, Failure> {
    if !spec.starts_with("./") {
        if let Some(structure) = fixtures::by_name(spec) {
            return Ok(Input {
                label: spec.to_string(),
                structure,
            });
        }
    }
    let path = match base {
        Some(dir) if Path::new(spec).is_relative() => dir.join(spec),
        _ => PathBuf::from(spec),
    };
    let shown = path.display().to_string();
    let db = constructions::load_database(&path, opts.lenient).map_err(|e| Failure::core(&shown, e))?;
    for skipped in &db.skipped {
        let _ = writeln!(err, "warning: {shown}: skipped {skipped}");
    }
    let mut records = db.records;
    let index = match (&opts.record, records.len()) {
        (_, 0) => {
            return Err(Failure::core(
                &shown,
                Error::Format {
                    line: 1,
                    message: "no usable records".into(),
                },
            ))
        }
        (None, 1) => 0,
        (None, _) => {
            let labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
            return Err(Failure::Invalid(format!(
                "{shown} holds {} records; pick one with --record ({})",
                records.len(),
                labels.join(", ")
            )));
        }
        (Some(want), _) => records
            .iter()
            .position(|r| &r.label == want)
            .ok_or_else(|| Failure::Invalid(format!("{shown}: no record labelled `{want}`")))?,
    };
    let record = records.swap_remove(index);
    Ok(Input {
        label: record.label,
        structure: record.structure,
    })
}

fn k_range(opts: &Options, n: usize) -> Result<RangeInclusive<usize>, Failure> {
    match opts.k {
        None => Ok(1..=n),
        Some(r) if r.hi <= n => Ok(r.lo..=r.hi),
        Some(r) => Err(Failure::Invalid(format!(
            "k = {} exceeds the number of blocks ({n})",
            r.hi
        ))),
    }
}

fn matrix_rows(s: &IncidenceStructure) -> Vec<String> {
    s.to_text().lines().skip(1).map(str::to_string).collect()
}

fn structure_json(s: &IncidenceStructure) -> Value {
    json!({
        "blocks": s.num_blocks(),
        "points": s.num_points(),
        "params": validate_fr(s).ok().map(|c| c.params()),
        "rows": matrix_rows(s),
    })
}

fn emit_structure(s: &IncidenceStructure, opts: &Options, out: &mut dyn Write) -> Outcome {
    match opts.format {
        Format::Table => write_out(out, &s.to_text()),
        Format::Structured => write_json(out, &structure_json(s)),
    }
}

fn hierarchy_rows(h: &FileSizeHierarchy, ks: RangeInclusive<usize>) -> Value {
    let n = h.n_vals();
    ks.map(|k| json!({ "k": k, "m": h.supported(k), "n": n[k] }))
        .collect()
}

fn pareto_lines(points: &[hierarchy::ParetoPoint]) -> String {
    points
        .iter()
        .map(|p| {
            let flag = if p.boundary { " boundary" } else { "" };
            format!("pareto {} {}{flag}\n", p.k0, p.l0)
        })
        .collect()
}

fn hierarchy_cmd(spec: &str, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let input = load_input(spec, None, opts, err)?;
    let s = &input.structure;
    let ks = k_range(opts, s.num_blocks())?;
    let cfg = search_config(opts);
    let h = hierarchy::full_hierarchy(s, &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let dual = hierarchy::full_hierarchy(&s.dual(), &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let pareto = hierarchy::pareto_from_n(&h.n_vals(), &dual.n_vals());
    match opts.format {
        Format::Table => write_out(out, &format!("{}{}", h.to_table(ks), pareto_lines(&pareto))),
        Format::Structured => write_json(
            out,
            &json!({
                "input": input.label,
                "blocks": s.num_blocks(),
                "points": s.num_points(),
                "hierarchy": hierarchy_rows(&h, ks),
                "pareto": pareto,
            }),
        ),
    }
}

fn parse_params(text: &str) -> Result<FrParams, Failure> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Invalid(format!("--params `{text}`: expected n,alpha,v,rho")))?;
    let [n, alpha, v, rho] = parts[..] else {
        return Err(Failure::Invalid(format!("--params `{text}`: expected four values")));
    };
    FrParams::new(n, alpha, v, rho).map_err(|e| Failure::core("--params", e))
}

/// The exact hierarchy for a bound report, honouring `--exact`/`--no-exact`.
/// Without either flag, running out of budget drops the column with a warning.
fn exact_column(input: &Input, opts: &Options, err: &mut dyn Write) -> Result<Option<FileSizeHierarchy>, Failure> {
    if opts.no_exact {
        return Ok(None);
    }
    match hierarchy::full_hierarchy(&input.structure, &search_config(opts)) {
        Ok(h) => Ok(Some(h)),
        Err(e @ Error::BudgetExceeded { .. }) if !opts.exact => {
            let _ = writeln!(err, "warning: {}: exact column omitted: {e}", input.label);
            Ok(None)
        }
        Err(e) => Err(Failure::core(&input.label, e)),
    }
}

fn restrict_rows(report: &mut BoundReport, ks: &RangeInclusive<usize>) {
    report.rows.retain(|r| ks.contains(&r.k));
}

fn check_violations(report: &BoundReport, label: &str) -> Outcome {
    let bad = report.violations();
    if bad.is_empty() {
        return Ok(());
    }
    Err(Failure::Invalid(format!(
        "{label}: exact value exceeds a bound at k = {bad:?}"
    )))
}

fn bounds_cmd(
    spec: Option<&str>,
    params: Option<&str>,
    opts: &Options,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (label, params, exact) = match (spec, params) {
        (Some(spec), None) => {
            let input = load_input(spec, None, opts, err)?;
            let code = validate_fr(&input.structure).map_err(|e| Failure::core(&input.label, e.into()))?;
            let exact = exact_column(&input, opts, err)?;
            (input.label, code.params(), exact)
        }
        (None, Some(text)) => {
            if opts.exact {
                return Err(Failure::Invalid("--exact needs an input code, not --params".into()));
            }
            (format!("params {text}"), parse_params(text)?, None)
        }
        _ => return Err(Failure::Invalid("bounds needs an input or --params".into())),
    };
    let ks = k_range(opts, params.n)?;
    let report = BoundReport::new(params, exact.as_ref()).map_err(|e| Failure::core(&label, e))?;
    match opts.format {
        Format::Table => write_out(out, &report.to_table(ks))?,
        Format::Structured => {
            let mut shown = report.clone();
            restrict_rows(&mut shown, &ks);
            write_json(out, &json!({ "input": label, "report": shown }))?;
        }
    }
    check_violations(&report, &label)
}

fn analyze(spec: &str, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let input = load_input(spec, None, opts, err)?;
    let s = &input.structure;
    let ks = k_range(opts, s.num_blocks())?;
    let cfg = search_config(opts);
    let code = validate_fr(s);
    let h = hierarchy::full_hierarchy(s, &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let dual = hierarchy::full_hierarchy(&s.dual(), &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let pareto = hierarchy::pareto_from_n(&h.n_vals(), &dual.n_vals());
    let report = match &code {
        Ok(c) => Some(BoundReport::new(c.params(), Some(&h)).map_err(|e| Failure::core(&input.label, e))?),
        Err(_) => None,
    };

    match opts.format {
        Format::Table => {
            let mut text = format!(
                "input: {}\nsize: {} blocks x {} points\n",
                input.label,
                s.num_blocks(),
                s.num_points()
            );
            match &code {
                Ok(c) => text.push_str(&format!("fr code: {}\n", c.params())),
                Err(e) => text.push_str(&format!("fr code: no ({e})\n")),
            }
            text.push_str(&format!("simple: {}\n\n", if s.is_simple() { "yes" } else { "no" }));
            text.push_str(&h.to_table(ks.clone()));
            text.push_str(&pareto_lines(&pareto));
            if let Some(r) = &report {
                text.push('\n');
                text.push_str(&r.to_table(ks.clone()));
            }
            write_out(out, &text)?;
        }
        Format::Structured => {
            let shown = report.clone().map(|mut r| {
                restrict_rows(&mut r, &ks);
                r
            });
            write_json(
                out,
                &json!({
                    "input": input.label,
                    "blocks": s.num_blocks(),
                    "points": s.num_points(),
                    "params": code.as_ref().ok().map(|c| c.params()),
                    "not_regular": code.as_ref().err(),
                    "simple": s.is_simple(),
                    "hierarchy": hierarchy_rows(&h, ks.clone()),
                    "pareto": pareto,
                    "bounds": shown,
                }),
            )?;
        }
    }
    match &report {
        Some(r) => check_violations(r, &input.label),
        None => Ok(()),
    }
}

fn verify_duality(spec: &str, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let input = load_input(spec, None, opts, err)?;
    let s = &input.structure;
    let ks = k_range(opts, s.num_blocks())?;
    let cfg = search_config(opts);
    let direct = hierarchy::full_hierarchy(s, &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let via_dual = hierarchy::hierarchy_via_dual(s, &cfg).map_err(|e| Failure::core(&input.label, e))?;
    let failed: Vec<usize> = ks.clone().filter(|&k| direct.supported(k) != via_dual.supported(k)).collect();
    match opts.format {
        Format::Table => {
            let mut text = String::new();
            for k in ks.clone() {
                let (a, b) = (direct.supported(k), via_dual.supported(k));
                let verdict = if a == b { "PASS" } else { "FAIL" };
                text.push_str(&format!("k={k}  direct={a}  via_dual={b}  {verdict}\n"));
            }
            write_out(out, &text)?;
        }
        Format::Structured => {
            let rows: Vec<Value> = ks
                .clone()
                .map(|k| {
                    json!({
                        "k": k,
                        "direct": direct.supported(k),
                        "via_dual": via_dual.supported(k),
                        "pass": direct.supported(k) == via_dual.supported(k),
                    })
                })
                .collect();
            write_json(out, &json!({ "input": input.label, "rows": rows, "pass": failed.is_empty() }))?;
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{}: duality check failed at k = {failed:?}", input.label)))
    }
}

fn construct(family: &Family, opts: &Options, out: &mut dyn Write) -> Outcome {
    let structure = match family {
        Family::Complete { t } => constructions::complete_graph_code(*t)
            .map_err(|e| Failure::core(format!("complete {t}"), e))?
            .into_structure(),
        Family::Graph { path } => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::core(
                    &shown,
                    Error::Io {
                        path: shown.clone(),
                        message: e.to_string(),
                    },
                )
            })?;
            let graph = GraphSpec::parse(&text).map_err(|e| Failure::core(&shown, e))?;
            constructions::from_regular_graph(&graph)
                .map_err(|e| Failure::core(&shown, e))?
                .into_structure()
        }
        Family::Fixture { name } => fixtures::by_name(name).ok_or_else(|| {
            Failure::Invalid(format!(
                "unknown fixture `{name}` (known: {})",
                fixtures::NAMES.join(", ")
            ))
        })?,
    };
    emit_structure(&structure, opts, out)
}
