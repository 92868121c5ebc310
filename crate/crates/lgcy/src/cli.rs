//! Command-line front end: load a model document, run a pipeline stage, and
//! emit a deterministic text or structured report.
//!
//! Exit codes: 0 on success, 1 on a mathematical mismatch (a correspondence
//! check failing), 2 on an input error (parse or validation failure), so
//! batch harnesses can triage.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{frac_str, Rational};
use crate::model::{self, ModelData, QsStatus, ValidationReport};
use crate::statespace::{classify_states, hodge_report, BigradedTable, Pipeline};
use crate::symmetry::Side;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    #[value(name = "json-like")]
    JsonLike,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum SideArg {
    Cy,
    Lg,
    All,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Cy => Side::Cy,
            SideArg::Lg => Side::Lg,
            SideArg::All => Side::All,
        }
    }
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Input model document (JSON).
    pub input: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Working prime override.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Verification prime override.
    #[arg(long)]
    pub verify_prime: Option<u64>,
    /// Weighted-degree bound for the quasi-smoothness search.
    #[arg(long)]
    pub qs_bound: Option<u64>,
    /// Worker threads (defaults to the available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Recompute every modular rank over exact rationals as well.
    #[arg(long)]
    pub exact_ranks: bool,
}

/// One verb per invocation.
#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Check the model document against the standing hypotheses.
    Validate(CommonArgs),
    /// List the sectors with their fixed data and ages.
    Sectors {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = SideArg::All)]
        side: SideArg,
    },
    /// Assemble the Chen-Ruan table of [X_W/G].
    Cy(CommonArgs),
    /// Assemble the hybrid LG state space table.
    Lg(CommonArgs),
    /// Assemble the absolute bundle tables of both sides.
    Bundles {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
    /// Dump the dot diagrams and the pairing certificate.
    Pair(CommonArgs),
    /// Run the full correspondence verification.
    Verify(CommonArgs),
    /// Euler characteristics, totals, and symmetry verdicts.
    Report(CommonArgs),
}

#[derive(Parser, Debug)]
#[command(name = "lgcy", version, about = "Orbifold Hodge numbers of weighted Calabi-Yau complete intersections and their hybrid Landau-Ginzburg state spaces")]
pub struct Command {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_)
        | Error::Document { .. }
        | Error::PolySyntax { .. }
        | Error::UnknownVariable { .. }
        | Error::NonRationalCoefficient { .. }
        | Error::BadGenerator { .. }
        | Error::InvalidModel(_)
        | Error::BadPrime { .. }
        | Error::GroupClosureExceeded { .. }
        | Error::InadmissibleMilnorData(_) => 2,
        Error::PrimeCollision { .. } | Error::Internal(_) => 1,
    }
}

impl Verb {
    fn common(&self) -> &CommonArgs {
        match self {
            Verb::Validate(c) | Verb::Cy(c) | Verb::Lg(c) | Verb::Pair(c) | Verb::Verify(c) | Verb::Report(c) => c,
            Verb::Sectors { common, .. } | Verb::Bundles { common, .. } => common,
        }
    }
}

fn load_model(common: &CommonArgs) -> Result<ModelData> {
    let text = std::fs::read_to_string(&common.input)?;
    let mut m = model::parse_input(&text)?;
    if let Some(p) = common.prime {
        m.options.prime = p;
    }
    if let Some(p) = common.verify_prime {
        m.options.verify_prime = p;
    }
    if let Some(b) = common.qs_bound {
        m.options.qs_bound = Some(b);
    }
    m.options.exact_ranks = common.exact_ranks;
    Ok(m)
}

/// Run one command; the caller prints `stdout` and exits with `code`.
pub fn run(cmd: &Command) -> Result<RunOutput> {
    let jobs = cmd.verb.common().jobs;
    match jobs {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cmd))
        }
        None => dispatch(cmd),
    }
}

fn dispatch(cmd: &Command) -> Result<RunOutput> {
    let common = cmd.verb.common();
    let m = load_model(common)?;
    let report = model::validate_full(&m)?;
    if let Verb::Validate(_) = cmd.verb {
        let code = if report.fully_verified() { 0 } else { 2 };
        return Ok(RunOutput { code, stdout: render_validation(&m, &report, common.format) });
    }
    if !report.fully_verified() {
        let mut out = render_validation(&m, &report, common.format);
        if common.format == Format::Text {
            out.push_str("refusing to run: the model did not validate\n");
        }
        return Ok(RunOutput { code: 2, stdout: out });
    }
    let pipe = Pipeline::build(&m)?;
    match &cmd.verb {
        Verb::Sectors { side, .. } => Ok(render_sectors(&pipe, (*side).into(), common.format)),
        Verb::Cy(_) => {
            let table = pipe.assemble_cy();
            Ok(render_table_cmd("cy", &table, common.format))
        }
        Verb::Lg(_) => {
            let table = classify_states(pipe.assemble_lg());
            Ok(render_table_cmd("lg", &table, common.format))
        }
        Verb::Bundles { side, .. } => Ok(render_bundles(&pipe, side.map(Into::into), common.format)),
        Verb::Pair(_) => render_pair(&pipe, common.format),
        Verb::Verify(_) => render_verify(&pipe, common.format),
        Verb::Report(_) => Ok(render_report(&pipe, common.format)),
        Verb::Validate(_) => unreachable!("handled above"),
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn rational_json(q: &Rational) -> Value {
    Value::String(frac_str(q))
}

fn table_json(table: &BigradedTable) -> Value {
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|((p, q), m)| {
            json!({"p": frac_str(p), "q": frac_str(q), "multiplicity": m})
        })
        .collect();
    let classes: Vec<Value> = table
        .provenance
        .iter()
        .map(|c| {
            let mut obj = serde_json::Map::new();
            obj.insert("sector".into(), json!(format!("{}", c.sector)));
            obj.insert("kind".into(), serde_json::to_value(c.kind).unwrap());
            obj.insert("index".into(), json!(c.index));
            obj.insert("p".into(), rational_json(&c.p));
            obj.insert("q".into(), rational_json(&c.q));
            obj.insert("multiplicity".into(), json!(c.multiplicity));
            if let Some(nw) = c.narrowness {
                obj.insert("narrowness".into(), serde_json::to_value(nw).unwrap());
            }
            Value::Object(obj)
        })
        .collect();
    json!({"entries": entries, "total": table.total(), "classes": classes})
}

fn table_text(out: &mut String, table: &BigradedTable) {
    for ((p, q), m) in &table.entries {
        out.push_str(&format!("  h^{{{p},{q}}} = {m}\n"));
    }
    out.push_str(&format!("  total dimension {}\n", table.total()));
}

fn render_validation(m: &ModelData, report: &ValidationReport, format: Format) -> String {
    match format {
        Format::JsonLike => {
            let qs: Value = match &report.quasi_smooth {
                Some(list) => Value::Array(
                    list.iter()
                        .enumerate()
                        .map(|(j, s)| {
                            let mut v = serde_json::to_value(s).unwrap();
                            v.as_object_mut()
                                .unwrap()
                                .insert("variable".into(), json!(format!("x{}", j + 1)));
                            v
                        })
                        .collect(),
                ),
                None => Value::Null,
            };
            let doc = json!({
                "command": "validate",
                "n": m.n,
                "r": m.r,
                "checks": serde_json::to_value(&report.checks).unwrap(),
                "quasi_smooth": qs,
                "valid": report.fully_verified(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "model: n={} r={} weights={:?} degrees={:?}\n",
                m.n, m.r, m.weights, m.degrees
            ));
            for c in &report.checks {
                out.push_str(&format!("check {}: {:?} ({})\n", c.name, c.status, c.detail));
            }
            if let Some(qs) = &report.quasi_smooth {
                for (j, s) in qs.iter().enumerate() {
                    match s {
                        QsStatus::Verified { power, degree } => out.push_str(&format!(
                            "quasi-smooth x{}: verified (x{}^{} in the singular ideal at degree {})\n",
                            j + 1,
                            j + 1,
                            power,
                            degree
                        )),
                        QsStatus::Unverified { bound } => out.push_str(&format!(
                            "quasi-smooth x{}: unverified at bound {}\n",
                            j + 1,
                            bound
                        )),
                    }
                }
            }
            out.push_str(&format!(
                "result: {}\n",
                if report.fully_verified() { "valid" } else { "INVALID" }
            ));
            out
        }
    }
}

fn render_sectors(pipe: &Pipeline, side: Side, format: Format) -> RunOutput {
    let sectors: Vec<_> = pipe.sectors.iter().filter(|s| s.matches(side)).collect();
    let stdout = match format {
        Format::JsonLike => {
            let list: Vec<Value> = sectors
                .iter()
                .map(|s| {
                    json!({
                        "component": s.component,
                        "t": frac_str(s.t.as_rational()),
                        "n_fixed": s.n_fix(),
                        "r_fixed": s.r_fix(),
                        "a_tot": frac_str(&s.a_tot),
                        "a_x": frac_str(&s.a_x),
                        "theta": s.theta.iter().map(|p| frac_str(p.as_rational())).collect::<Vec<_>>(),
                        "pi": s.pi.iter().map(|p| frac_str(p.as_rational())).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({
                "command": "sectors",
                "components": pipe.comps.order(),
                "sectors": list,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "components: {}, sectors: {}\n",
                pipe.comps.order(),
                sectors.len()
            ));
            for s in &sectors {
                out.push_str(&format!(
                    "g{} t={}  n_fixed={} r_fixed={}  a_tot={} a_X={}\n",
                    s.component,
                    s.t,
                    s.n_fix(),
                    s.r_fix(),
                    s.a_tot,
                    s.a_x
                ));
            }
            out
        }
    };
    RunOutput { code: 0, stdout }
}

fn render_table_cmd(name: &str, table: &BigradedTable, format: Format) -> RunOutput {
    let stdout = match format {
        Format::JsonLike => {
            let doc = json!({"command": name, "table": table_json(table)});
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let mut out = format!("{name} table:\n");
            table_text(&mut out, table);
            out
        }
    };
    RunOutput { code: 0, stdout }
}

fn render_bundles(pipe: &Pipeline, side: Option<Side>, format: Format) -> RunOutput {
    let cy = pipe.assemble_bundle(Side::Cy);
    let lg = pipe.assemble_bundle(Side::Lg);
    let equal = cy.same_entries(&lg);
    let (code, show_cy, show_lg) = match side {
        Some(Side::Cy) => (0, true, false),
        Some(Side::Lg) => (0, false, true),
        _ => (if equal { 0 } else { 1 }, true, true),
    };
    let stdout = match format {
        Format::JsonLike => {
            let mut doc = serde_json::Map::new();
            doc.insert("command".into(), json!("bundles"));
            if show_cy {
                doc.insert("cy".into(), table_json(&cy));
            }
            if show_lg {
                doc.insert("lg".into(), table_json(&lg));
            }
            if show_cy && show_lg {
                doc.insert("equal".into(), json!(equal));
            }
            format!("{}\n", serde_json::to_string_pretty(&Value::Object(doc)).unwrap())
        }
        Format::Text => {
            let mut out = String::new();
            if show_cy {
                out.push_str("bundle table (cy):\n");
                table_text(&mut out, &cy);
            }
            if show_lg {
                out.push_str("bundle table (lg):\n");
                table_text(&mut out, &lg);
            }
            if show_cy && show_lg {
                out.push_str(&format!("equal: {equal}\n"));
            }
            out
        }
    };
    RunOutput { code, stdout }
}

fn render_pair(pipe: &Pipeline, format: Format) -> Result<RunOutput> {
    let diagrams = pipe.diagrams();
    let stdout = match format {
        Format::JsonLike => {
            let mut list = Vec::new();
            for diag in &diagrams {
                let cert = crate::dots::pair_dots(diag)?;
                let dots: Vec<Value> = diag
                    .dots
                    .iter()
                    .map(|d| {
                        json!({
                            "color": serde_json::to_value(d.color).unwrap(),
                            "t": frac_str(d.t.as_rational()),
                            "source": d.source + 1,
                            "f": d.f.unwrap(),
                            "degree": frac_str(&crate::dots::dot_degree(diag, d)),
                        })
                    })
                    .collect();
                let pairs: Vec<Value> = cert
                    .pairs
                    .iter()
                    .map(|p| {
                        json!({
                            "black": {"j": p.black.0 + 1, "t": frac_str(p.black.1.as_rational())},
                            "white": {"i": p.white.0 + 1, "t": frac_str(p.white.1.as_rational())},
                            "f": p.f,
                            "degree": frac_str(&p.degree),
                        })
                    })
                    .collect();
                list.push(json!({
                    "component": diag.component,
                    "sum_a": frac_str(&diag.sum_a),
                    "dots": dots,
                    "pairs": pairs,
                }));
            }
            let doc = json!({"command": "pair", "diagrams": list});
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let mut out = String::new();
            for diag in &diagrams {
                let cert = crate::dots::pair_dots(diag)?;
                out.push_str(&format!("component g{} (sum a = {})\n", diag.component, diag.sum_a));
                for d in &diag.dots {
                    let color = match d.color {
                        crate::dots::Color::Black => "black",
                        crate::dots::Color::White => "white",
                    };
                    let source = match d.color {
                        crate::dots::Color::Black => format!("w{}", d.source + 1),
                        crate::dots::Color::White => format!("d{}", d.source + 1),
                    };
                    out.push_str(&format!(
                        "  {color} t={} {source} f={} degree={}\n",
                        d.t,
                        d.f.unwrap(),
                        crate::dots::dot_degree(diag, d)
                    ));
                }
                for p in &cert.pairs {
                    out.push_str(&format!(
                        "  pair f={}: black w{}@{} <-> white d{}@{} degree={}\n",
                        p.f,
                        p.black.0 + 1,
                        p.black.1,
                        p.white.0 + 1,
                        p.white.1,
                        p.degree
                    ));
                }
            }
            out
        }
    };
    Ok(RunOutput { code: 0, stdout })
}

fn render_verify(pipe: &Pipeline, format: Format) -> Result<RunOutput> {
    let report = pipe.verify_correspondence()?;
    let code = if report.pass() { 0 } else { 1 };
    let stdout = match format {
        Format::JsonLike => {
            let verdict = |c: &crate::statespace::Check| {
                json!({"pass": c.pass, "failures": c.failures})
            };
            let certificate: Vec<Value> = report
                .certificates
                .iter()
                .flat_map(|cert| {
                    cert.pairs.iter().map(move |p| {
                        json!({
                            "component": cert.component,
                            "black": {"j": p.black.0 + 1, "t": frac_str(p.black.1.as_rational())},
                            "white": {"i": p.white.0 + 1, "t": frac_str(p.white.1.as_rational())},
                            "f": p.f,
                            "degree": frac_str(&p.degree),
                        })
                    })
                })
                .collect();
            let doc = json!({
                "command": "verify",
                "verdicts": {
                    "primitive_blocks_shared": verdict(&report.primitive_blocks_shared),
                    "bundle_certificate": verdict(&report.bundle_certificate),
                    "tables_equal": verdict(&report.tables_equal),
                },
                "cy": table_json(&report.cy),
                "lg": table_json(&report.lg),
                "certificate": certificate,
                "pass": report.pass(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let mut out = String::new();
            let verdict = |name: &str, c: &crate::statespace::Check, out: &mut String| {
                out.push_str(&format!("check {}: {}\n", name, if c.pass { "pass" } else { "FAIL" }));
                for f in &c.failures {
                    out.push_str(&format!("  counterexample: {f}\n"));
                }
            };
            verdict("primitive blocks shared", &report.primitive_blocks_shared, &mut out);
            verdict("bundle certificate", &report.bundle_certificate, &mut out);
            verdict("tables equal", &report.tables_equal, &mut out);
            out.push_str("cy table:\n");
            table_text(&mut out, &report.cy);
            out.push_str("lg table:\n");
            table_text(&mut out, &report.lg);
            for cert in &report.certificates {
                for p in &cert.pairs {
                    out.push_str(&format!(
                        "certificate g{}: black w{}@{} <-> white d{}@{} f={} degree={}\n",
                        cert.component,
                        p.black.0 + 1,
                        p.black.1,
                        p.white.0 + 1,
                        p.white.1,
                        p.f,
                        p.degree
                    ));
                }
            }
            out.push_str(&format!("result: {}\n", if report.pass() { "PASS" } else { "FAIL" }));
            out
        }
    };
    Ok(RunOutput { code, stdout })
}

fn render_report(pipe: &Pipeline, format: Format) -> RunOutput {
    let d = pipe.model.n as i64 - pipe.model.r as i64 - 1;
    let cy = pipe.assemble_cy();
    let lg = pipe.assemble_lg();
    let sum_cy = hodge_report(&cy, d);
    let sum_lg = hodge_report(&lg, d);
    let stdout = match format {
        Format::JsonLike => {
            let enc = |s: &crate::statespace::HodgeSummary| {
                json!({
                    "euler": s.euler.to_string(),
                    "total": s.total,
                    "integer_total": s.integer_total,
                    "fractional_total": s.fractional_total,
                    "pq_symmetric": s.pq_symmetric,
                    "serre_symmetric": s.serre_symmetric,
                })
            };
            let doc = json!({
                "command": "report",
                "dimension": d,
                "cy": enc(&sum_cy),
                "lg": enc(&sum_lg),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
        Format::Text => {
            let enc = |name: &str, s: &crate::statespace::HodgeSummary| {
                format!(
                    "{name}: euler {} total {} (integer {}, fractional {}) pq-symmetric {} serre-symmetric {}\n",
                    s.euler, s.total, s.integer_total, s.fractional_total, s.pq_symmetric, s.serre_symmetric
                )
            };
            format!("dimension: {d}\n{}{}", enc("cy", &sum_cy), enc("lg", &sum_lg))
        }
    };
    RunOutput { code: 0, stdout }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn write_doc(dir: &std::path::Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    fn run_args(args: &[&str]) -> RunOutput {
        let cmd = Command::try_parse_from(args).unwrap();
        run(&cmd).unwrap()
    }

    #[test]
    fn verify_quintic_exits_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "quintic.json",
            r#"{"weights":[1,1,1,1,1],"degrees":[5],
                "polynomials":["x1^5+x2^5+x3^5+x4^5+x5^5"]}"#,
        );
        let out = run_args(&["lgcy", "verify", path.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert!(out.stdout.contains("result: PASS"));
        assert!(out.stdout.contains("h^{2,1} = 101"));
    }

    #[test]
    fn validate_bad_model_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "bad.json",
            r#"{"weights":[1,1],"degrees":[3],"polynomials":["x1^3+x2^3"]}"#,
        );
        let out = run_args(&["lgcy", "validate", path.to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stdout.contains("calabi_yau_balance"));
        assert!(out.stdout.contains("sum w = 2, sum d = 3"));
    }

    #[test]
    fn pair_fig1_text_matches_figure() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "fig1.json",
            r#"{"weights":[1,2,3],"degrees":[2,4],
                "polynomials":["x1^2+x2","x1^4+x2^2+x3*x1"]}"#,
        );
        let out = run_args(&["lgcy", "pair", path.to_str().unwrap(), "--format", "text"]);
        assert_eq!(out.code, 0);
        let f_labels: Vec<&str> = out
            .stdout
            .lines()
            .filter(|l| l.trim_start().starts_with("black") || l.trim_start().starts_with("white"))
            .collect();
        let expect = [
            "black t=0 w1 f=0",
            "black t=0 w2 f=1",
            "black t=0 w3 f=2",
            "white t=1/4 d2 f=2",
            "black t=1/3 w3 f=2",
            "white t=1/2 d1 f=2",
            "white t=1/2 d2 f=1",
            "black t=1/2 w2 f=1",
            "black t=2/3 w3 f=2",
            "white t=3/4 d2 f=2",
            "white t=0 d1 f=1",
            "white t=0 d2 f=0",
        ];
        assert_eq!(f_labels.len(), expect.len());
        for (line, want) in f_labels.iter().zip(expect) {
            assert!(line.trim_start().starts_with(want), "line {line:?} does not start with {want:?}");
        }
    }

    #[test]
    fn deterministic_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "fig1.json",
            r#"{"weights":[1,2,3],"degrees":[2,4],
                "polynomials":["x1^2+x2","x1^4+x2^2+x3*x1"]}"#,
        );
        for verb in ["sectors", "cy", "lg", "bundles", "pair", "verify", "report"] {
            let a = run_args(&["lgcy", verb, path.to_str().unwrap(), "--format", "json-like"]);
            let b = run_args(&["lgcy", verb, path.to_str().unwrap(), "--format", "json-like"]);
            assert_eq!(a.stdout, b.stdout, "verb {verb}");
        }
    }

    #[test]
    fn text_and_json_agree_numerically() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "quintic.json",
            r#"{"weights":[1,1,1,1,1],"degrees":[5],
                "polynomials":["x1^5+x2^5+x3^5+x4^5+x5^5"]}"#,
        );
        let text = run_args(&["lgcy", "cy", path.to_str().unwrap()]);
        let js = run_args(&["lgcy", "cy", path.to_str().unwrap(), "--format", "json-like"]);
        let doc: Value = serde_json::from_str(&js.stdout).unwrap();
        assert_eq!(doc["table"]["total"], json!(208));
        assert!(text.stdout.contains("total dimension 208"));
        let entry = doc["table"]["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["p"] == json!("2/1") && e["q"] == json!("1/1"))
            .unwrap();
        assert_eq!(entry["multiplicity"], json!(101));
    }

    #[test]
    fn degenerate_model_refused() {
        let dir = tempfile::tempdir().unwrap();
        // fails the structural checks outright
        let path = write_doc(
            dir.path(),
            "degenerate.json",
            r#"{"weights":[1,1],"degrees":[4],"polynomials":["x1^2*x2^2"]}"#,
        );
        let out = run_args(&["lgcy", "verify", path.to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stdout.contains("INVALID"));

        // structurally fine but singular along the x3-axis: refused by the
        // quasi-smoothness search
        let path = write_doc(
            dir.path(),
            "axis.json",
            r#"{"weights":[1,1,2],"degrees":[4],"polynomials":["x1^4+x2^4+x1^2*x3"]}"#,
        );
        let out = run_args(&["lgcy", "verify", path.to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stdout.contains("quasi-smooth x3: unverified"));
    }

    #[test]
    fn sectors_side_filter() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_doc(
            dir.path(),
            "quintic.json",
            r#"{"weights":[1,1,1,1,1],"degrees":[5],
                "polynomials":["x1^5+x2^5+x3^5+x4^5+x5^5"]}"#,
        );
        let lg = run_args(&["lgcy", "sectors", path.to_str().unwrap(), "--side", "lg"]);
        assert!(lg.stdout.contains("sectors: 5"));
        let cy = run_args(&["lgcy", "sectors", path.to_str().unwrap(), "--side", "cy"]);
        assert!(cy.stdout.contains("sectors: 1"));
    }

    #[test]
    fn missing_file_is_input_error() {
        let cmd = Command::try_parse_from(["lgcy", "verify", "/nonexistent/model.json"]).unwrap();
        let err = run(&cmd).unwrap_err();
        assert_eq!(exit_code_for(&err), 2);
    }
}
