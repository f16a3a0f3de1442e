//! Command execution. Every command produces a `Report`; rendering lives in
//! `output`.

use std::collections::BTreeMap;
use std::time::Instant;

use bounds_core::constants::{self, DerivedConstants, FamilyParams};
use bounds_core::geometry::curve::named_curve;
use bounds_core::geometry::suites::{default_trials, matching_projections, run_suite, SuiteOptions, SuiteReport, SUITES};
use bounds_core::geometry::{match_via_projections, MatchOutcome};
use bounds_core::parshin::{self, cite};
use bounds_core::trace::Trace;
use bounds_core::{Comparison, Context, Magnitude};
use num_bigint::BigUint;
use serde::Serialize;

use crate::args::{BoundArgs, GeomArgs};
use crate::Failure;

/// One evaluated grid point.
#[derive(Clone, Debug)]
pub struct Record {
    pub params: FamilyParams,
    pub constants: BTreeMap<String, Magnitude>,
    pub trace: Trace,
    pub diagnostics: Vec<String>,
    pub result: Magnitude,
}

/// Order of the results at two grid points one unit step apart.
#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub from: [u64; 3],
    pub to: [u64; 3],
    pub order: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct Monotone {
    pub steps: Vec<Step>,
    /// Every step is certified `Less` or `Equal`.
    pub nondecreasing: bool,
}

#[derive(Clone, Debug)]
pub enum Report {
    Bounds { command: &'static str, records: Vec<Record>, monotone: Option<Monotone> },
    Suites { reports: Vec<SuiteReport>, elapsed_ms: u128 },
    Matching { curves: [String; 2], outcome: MatchOutcome },
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::Suites { reports, .. } if !reports.iter().all(SuiteReport::ok) => 1,
            _ => 0,
        }
    }
}

pub fn bounds(ctx: &Context, command: &'static str, args: &BoundArgs) -> Result<Report, Failure> {
    let grid = args.grid()?;
    let injections = args.injections()?;
    let points = grid.points();
    let mut records = Vec::with_capacity(points.len());
    for &(g, q, s) in &points {
        let params = FamilyParams::new(g, q, s);
        let record = match (command, &injections) {
            ("shafarevich", None) => shafarevich(ctx, params)?,
            ("shafarevich", Some(inj)) => shafarevich_toy(ctx, params, inj)?,
            (_, None) => mordell(ctx, params)?,
            (_, Some(inj)) => mordell_toy(ctx, params, inj)?,
        };
        records.push(record);
    }
    let monotone = (!grid.is_single()).then(|| monotone(ctx, &points, &records));
    Ok(Report::Bounds { command, records, monotone })
}

fn shafarevich(ctx: &Context, params: FamilyParams) -> Result<Record, Failure> {
    let report = constants::evaluate(ctx, &params)?;
    Ok(from_derived(params, report.constants, report.bound))
}

fn from_derived(params: FamilyParams, c: DerivedConstants, result: Magnitude) -> Record {
    let mut map = BTreeMap::new();
    for (name, value) in [("m", &c.m), ("d", &c.d), ("l", &c.l), ("M", &c.big_m), ("delta0", &c.delta0), ("N", &c.big_n), ("gqs", &c.gqs)] {
        map.insert(name.to_string(), value.clone());
    }
    for (name, value) in [("Q", &c.big_q), ("D", &c.big_d), ("A", &c.big_a)] {
        if let Some(v) = value {
            map.insert(name.to_string(), v.clone());
        }
    }
    Record { params, constants: map, trace: c.trace, diagnostics: Vec::new(), result }
}

fn parse_magnitude(key: &str, value: &str) -> Result<Magnitude, Failure> {
    value
        .parse::<BigUint>()
        .map(Magnitude::Exact)
        .map_err(|_| Failure::Invalid(format!("injected {key} must be a nonnegative integer (got `{value}`)")))
}

fn shafarevich_toy(ctx: &Context, params: FamilyParams, inj: &[(String, String)]) -> Result<Record, Failure> {
    let mut c = DerivedConstants::toy(params.clone());
    for (key, value) in inj {
        let v = parse_magnitude(key, value)?;
        match key.as_str() {
            "m" => c.m = v,
            "d" => c.d = v,
            "l" => c.l = v,
            "M" => c.big_m = v,
            "delta0" => c.delta0 = v,
            "N" => c.big_n = v,
            "gqs" => c.gqs = v,
            other => {
                return Err(Failure::Invalid(format!(
                    "cannot inject `{other}` here; expected m, d, l, M, delta0, N or gqs"
                )))
            }
        }
    }
    constants::compute_q(ctx, &mut c)?;
    constants::compute_d(ctx, &mut c, None)?;
    constants::compute_a(ctx, &mut c)?;
    let bound = constants::shafarevich_from_constants(ctx, &mut c)?;
    Ok(from_derived(params, c, bound))
}

fn mordell(ctx: &Context, params: FamilyParams) -> Result<Record, Failure> {
    let r = parshin::mordell_bound(ctx, &params.g, &params.q, &params.s)?;
    let k = r.constants;
    let mut map = BTreeMap::new();
    for (name, value) in [
        ("g_prime", k.g_prime),
        ("theta_bound", k.theta_bound),
        ("c_gqs", k.c_gqs),
        ("cover_sum", k.cover_sum),
        ("s_of_gprime", k.s_of_gprime),
        ("P", r.inner.bound),
        ("inner_g", Magnitude::Exact(r.inner_params.g)),
        ("inner_q", Magnitude::Exact(r.inner_params.q)),
        ("inner_s", Magnitude::Exact(r.inner_params.s)),
    ] {
        map.insert(name.to_string(), value);
    }
    let diagnostics = r.diagnostics.iter().map(|d| format!("{d:?}")).collect();
    Ok(Record { params, constants: map, trace: r.trace, diagnostics, result: r.bound })
}

fn mordell_toy(ctx: &Context, params: FamilyParams, inj: &[(String, String)]) -> Result<Record, Failure> {
    let mut given = BTreeMap::new();
    for (key, value) in inj {
        if !["S", "P", "cover_sum", "g_prime"].contains(&key.as_str()) {
            return Err(Failure::Invalid(format!("cannot inject `{key}` here; expected S, P, cover_sum or g_prime")));
        }
        given.insert(key.as_str(), parse_magnitude(key, value)?);
    }
    let take = |key: &str| {
        given.get(key).cloned().ok_or_else(|| Failure::Invalid(format!("toy mode needs S, P and cover_sum; missing {key}")))
    };
    let (s_gp, inner, cover_sum) = (take("S")?, take("P")?, take("cover_sum")?);
    let gp = match given.get("g_prime") {
        Some(v) => v.clone(),
        None => parshin::g_prime(ctx, &params.g)?,
    };
    let mut trace = Trace::default();
    trace.note("toy mode: factors injected by hand");
    trace.record("g'", cite::G_PRIME, &gp);
    trace.record("S(g')", cite::S_G_PRIME, &s_gp);
    trace.record("P(g', C, Theta*s)", cite::INNER, &inner);
    trace.record("cover sum bound", cite::COVER_SUM, &cover_sum);
    let bound = parshin::mordell_from_factors(ctx, &s_gp, &inner, &gp, &cover_sum)?;
    trace.record("bound", cite::BOUND, &bound);
    let mut map = BTreeMap::new();
    for (name, value) in [("g_prime", gp), ("s_of_gprime", s_gp), ("P", inner), ("cover_sum", cover_sum)] {
        map.insert(name.to_string(), value);
    }
    Ok(Record { params, constants: map, trace, diagnostics: Vec::new(), result: bound })
}

fn monotone(ctx: &Context, points: &[(u64, u64, u64)], records: &[Record]) -> Monotone {
    let key = |p: &(u64, u64, u64)| [p.0, p.1, p.2];
    let mut steps = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            let (ka, kb) = (key(a), key(b));
            let diff: Vec<usize> = (0..3).filter(|&t| ka[t] != kb[t]).collect();
            if diff.len() == 1 && kb[diff[0]] == ka[diff[0]] + 1 {
                steps.push(Step { from: ka, to: kb, order: ctx.compare(&records[i].result, &records[j].result) });
            }
        }
    }
    let nondecreasing = steps.iter().all(|s| matches!(s.order, Comparison::Less | Comparison::Equal));
    Monotone { steps, nondecreasing }
}

pub fn geom_verify(seed: u64, args: &GeomArgs) -> Result<Report, Failure> {
    if let Some(text) = &args.curves {
        return matching(text);
    }
    let suites: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else {
        args.suite
            .split(',')
            .map(|name| {
                let name = name.trim();
                SUITES.iter().copied().find(|s| *s == name).ok_or_else(|| {
                    Failure::Invalid(format!("unknown suite `{name}`; expected all or one of {}", SUITES.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?
    };
    if args.trials == Some(0) {
        return Err(Failure::Invalid("--trials must be positive".into()));
    }
    if let Some(d) = args.degree {
        if !(1..=6).contains(&d) {
            return Err(Failure::Invalid(format!("--degree must be between 1 and 6 (got {d})")));
        }
    }
    let opts = SuiteOptions { degree: args.degree };
    let start = Instant::now();
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&name| {
                let opts = &opts;
                let trials = args.trials.unwrap_or_else(|| default_trials(name));
                scope.spawn(move || run_suite(name, seed, trials, opts))
            })
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });
    let mut reports = Vec::with_capacity(results.len());
    for (name, result) in suites.iter().zip(results) {
        match result {
            Ok(r) => reports.push(r?),
            Err(_) => return Err(Failure::Property(format!("suite {name} aborted"))),
        }
    }
    Ok(Report::Suites { reports, elapsed_ms: start.elapsed().as_millis() })
}

fn matching(text: &str) -> Result<Report, Failure> {
    let names: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    let [a, b] = names.as_slice() else {
        return Err(Failure::Invalid(format!("--curves takes two names separated by a comma (got `{text}`)")));
    };
    let lookup = |name: &str| {
        named_curve(name).ok_or_else(|| {
            Failure::Invalid(format!("unknown curve `{name}`; expected twisted-cubic, line or conic"))
        })
    };
    let (c1, c2) = (lookup(a)?, lookup(b)?);
    if c1.dim() != c2.dim() {
        return Err(Failure::Invalid(format!("{a} and {b} lie in projective spaces of different dimension")));
    }
    let pis = matching_projections(c1.dim())?;
    let outcome = match_via_projections(&c1, &c2, &pis, 1)?;
    Ok(Report::Matching { curves: [a.clone(), b.clone()], outcome })
}
