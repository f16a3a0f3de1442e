//! Rendering of reports as JSON, CSV or text.

use bounds_core::geometry::MatchOutcome;
use bounds_core::trace::{Trace, TraceEntry};
use bounds_core::Magnitude;
use serde_json::{json, Value};

use crate::args::{Format, Verbosity};
use crate::run::{Monotone, Record, Report};
use crate::Failure;

/// Exact values in full, towers as nested powers of ten.
pub fn magnitude_text(m: &Magnitude) -> String {
    match m.as_exact() {
        Some(n) => n.to_string(),
        None => m.render(),
    }
}

fn visible(trace: &Trace, verbosity: Verbosity) -> Vec<&TraceEntry> {
    match verbosity {
        Verbosity::Full => trace.entries.iter().collect(),
        Verbosity::Summary => trace.entries.iter().filter(|e| !e.name.contains('.')).collect(),
        Verbosity::None => Vec::new(),
    }
}

pub fn render(report: &Report, config: &Value, format: Format, verbosity: Verbosity) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(json_report(report, config, verbosity).to_string()),
        Format::Csv => csv_report(report, config, verbosity),
        Format::Text => Ok(text_report(report, config, verbosity)),
    }
}

fn record_json(r: &Record, verbosity: Verbosity) -> serde_json::Map<String, Value> {
    let constants: serde_json::Map<String, Value> =
        r.constants.iter().map(|(k, v)| (k.clone(), Value::String(magnitude_text(v)))).collect();
    let (checks, notes) = if verbosity == Verbosity::None {
        (json!([]), json!([]))
    } else {
        (json!(r.trace.checks), json!(r.trace.notes))
    };
    let mut out = serde_json::Map::new();
    out.insert("params".into(), json!(r.params));
    out.insert("constants".into(), Value::Object(constants));
    out.insert("trace".into(), json!(visible(&r.trace, verbosity)));
    out.insert("checks".into(), checks);
    out.insert("notes".into(), notes);
    out.insert("diagnostics".into(), json!(r.diagnostics));
    out.insert("result".into(), json!(r.result));
    out.insert("result_text".into(), Value::String(magnitude_text(&r.result)));
    out
}

fn json_report(report: &Report, config: &Value, verbosity: Verbosity) -> Value {
    match report {
        Report::Bounds { records, monotone: None, .. } if records.len() == 1 => {
            let mut out = serde_json::Map::new();
            out.insert("config".into(), config.clone());
            out.extend(record_json(&records[0], verbosity));
            Value::Object(out)
        }
        Report::Bounds { records, monotone, .. } => {
            let records: Vec<Value> = records.iter().map(|r| Value::Object(record_json(r, verbosity))).collect();
            json!({ "config": config, "records": records, "monotone": monotone })
        }
        Report::Suites { reports, elapsed_ms } => {
            let suites: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let mut v = json!(r);
                    v["ok"] = json!(r.ok());
                    v
                })
                .collect();
            json!({
                "config": config,
                "suites": suites,
                "result": { "all_pass": report.exit_code() == 0, "elapsed_ms": elapsed_ms },
            })
        }
        Report::Matching { curves, outcome } => {
            json!({ "config": config, "curves": curves, "result": outcome_json(outcome) })
        }
    }
}

fn outcome_json(outcome: &MatchOutcome) -> Value {
    match outcome {
        MatchOutcome::Match => json!({ "outcome": "match" }),
        MatchOutcome::Distinguished(nu) => json!({ "outcome": "distinguished", "nu": nu }),
    }
}

fn outcome_text(outcome: &MatchOutcome) -> String {
    match outcome {
        MatchOutcome::Match => "Match under every projection".into(),
        MatchOutcome::Distinguished(nu) => format!("Distinguished at ν={nu}"),
    }
}

/// `kind, value, height, lo, hi` columns for a magnitude.
fn magnitude_columns(m: &Magnitude) -> [String; 5] {
    let v = json!(m);
    let field = |k: &str| v.get(k).map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string)).unwrap_or_default();
    match m.as_exact() {
        Some(n) => ["exact".into(), n.to_string(), "0".into(), String::new(), String::new()],
        None => ["tower".into(), String::new(), field("height"), field("lo"), field("hi")],
    }
}

fn csv_report(report: &Report, config: &Value, verbosity: Verbosity) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let seed = config["seed"].to_string();
    let io = |e: csv::Error| Failure::Property(format!("writing csv: {e}"));
    match report {
        Report::Bounds { records, .. } => {
            w.write_record(["seed", "g", "q", "s", "name", "citation", "kind", "value", "height", "lo", "hi"]).map_err(io)?;
            for r in records {
                let p = [r.params.g.to_string(), r.params.q.to_string(), r.params.s.to_string()];
                let final_row = [("result", "", &r.result)];
                let rows = visible(&r.trace, verbosity)
                    .into_iter()
                    .map(|e| (e.name.as_str(), e.citation.as_str(), &e.magnitude))
                    .chain(final_row);
                for (name, citation, m) in rows {
                    let mut row = vec![seed.clone()];
                    row.extend(p.iter().cloned());
                    row.extend([name.to_string(), citation.to_string()]);
                    row.extend(magnitude_columns(m));
                    w.write_record(&row).map_err(io)?;
                }
            }
        }
        Report::Suites { reports, .. } => {
            w.write_record(["suite", "seed", "trials", "passed", "required_rate", "ok", "elapsed_ms"]).map_err(io)?;
            for r in reports {
                w.write_record([
                    r.suite.clone(),
                    r.seed.to_string(),
                    r.trials.to_string(),
                    r.passed.to_string(),
                    r.required_rate.to_string(),
                    r.ok().to_string(),
                    r.elapsed_ms.to_string(),
                ])
                .map_err(io)?;
            }
        }
        Report::Matching { curves, outcome } => {
            w.write_record(["seed", "curve_a", "curve_b", "outcome", "nu"]).map_err(io)?;
            let (kind, nu) = match outcome {
                MatchOutcome::Match => ("match", String::new()),
                MatchOutcome::Distinguished(nu) => ("distinguished", nu.to_string()),
            };
            w.write_record([seed, curves[0].clone(), curves[1].clone(), kind.into(), nu]).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Property(format!("writing csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Property(format!("writing csv: {e}")))
}

fn text_record(out: &mut String, command: &str, r: &Record, verbosity: Verbosity) {
    let p = &r.params;
    out.push_str(&format!("{command} at (g, q, s) = ({}, {}, {})\n", p.g, p.q, p.s));
    for e in visible(&r.trace, verbosity) {
        out.push_str(&format!("  {} = {}    [{}]\n", e.name, e.magnitude.render(), e.citation));
    }
    if verbosity != Verbosity::None {
        for c in &r.trace.checks {
            let status = if c.holds { "holds" } else { "FAILS" };
            out.push_str(&format!("  check {}: {status} ({})\n", c.name, c.detail));
        }
        for n in &r.trace.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
    }
    for d in &r.diagnostics {
        out.push_str(&format!("  diagnostic: {d}\n"));
    }
    out.push_str(&format!("  result = {}\n", r.result.render()));
}

fn text_monotone(out: &mut String, m: &Monotone) {
    out.push_str("monotone comparison\n");
    for s in &m.steps {
        out.push_str(&format!("  {:?} -> {:?}: {:?}\n", s.from, s.to, s.order));
    }
    let verdict = if m.nondecreasing { "yes" } else { "not certified" };
    out.push_str(&format!("  nondecreasing along every axis: {verdict}\n"));
}

fn text_report(report: &Report, config: &Value, verbosity: Verbosity) -> String {
    let mut out = format!("seed {}\n", config["seed"]);
    match report {
        Report::Bounds { command, records, monotone } => {
            for r in records {
                text_record(&mut out, command, r, verbosity);
            }
            if let Some(m) = monotone {
                text_monotone(&mut out, m);
            }
        }
        Report::Suites { reports, elapsed_ms } => {
            for r in reports {
                let status = if r.ok() { "pass" } else { "FAIL" };
                out.push_str(&format!(
                    "{:<16} {:>4}/{:<4} {status}  (required rate {}, {} ms)\n",
                    r.suite, r.passed, r.trials, r.required_rate, r.elapsed_ms
                ));
                for e in &r.exceptions {
                    out.push_str(&format!("    exception: {e}\n"));
                }
            }
            out.push_str(&format!("total {elapsed_ms} ms\n"));
        }
        Report::Matching { curves, outcome } => {
            out.push_str(&format!("{} vs {}: {}\n", curves[0], curves[1], outcome_text(outcome)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_columns_carry_height_and_endpoints() {
        let m = Magnitude::tower_str(2, "3.5", "3.6").unwrap();
        let cols = magnitude_columns(&m);
        assert_eq!(cols[0], "tower");
        assert_eq!(cols[2], "2");
        assert!(cols[3].starts_with("3.5"));
        assert!(cols[4].starts_with("3.6"));
        assert_eq!(magnitude_columns(&Magnitude::from_u64(7))[1], "7");
    }
}
