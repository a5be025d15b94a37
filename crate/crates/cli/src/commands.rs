//! Subcommand implementations. Grid points run in parallel and are merged
//! in index order, so output does not depend on the thread count.

use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use horocycle::arith::{self, weil_bound};
use horocycle::closed_approx::{audit, ClosedApproxParams, partition_intervals, reassemble, sarnak_ubis_params_with_cap};
use horocycle::diophantine::{majorant_b, majorant_bg_report};
use horocycle::group::{compose, GroupElement, Mat2};
use horocycle::lattice::y_g;
use horocycle::orbit::{closed_lift_average, general_orbit_average, AverageRequest, GeneralRequest, Method};
use horocycle::testfn::TestFunctionSpec;

use crate::config::{parse_list, parse_pair, parse_range};
use crate::output::{Cell, Format, Table};
use crate::{CliError, MethodArg, Outcome};

fn cfg<T>(r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(CliError::Config)
}

fn load_spec(path: &Option<PathBuf>) -> Result<TestFunctionSpec, CliError> {
    match path {
        None => Ok(TestFunctionSpec::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            Ok(TestFunctionSpec::from_kv(&text)?)
        }
    }
}

pub fn parse_matrix(s: &str) -> Result<GroupElement, CliError> {
    let v = cfg(parse_list(s))?;
    if v.len() != 4 {
        return Err(CliError::Config(format!("matrix needs four entries a,b,c,d, got {s:?}")));
    }
    let m = Mat2::new(v[0], v[1], v[2], v[3]);
    if (m.det() - 1.0).abs() > 1e-9 {
        return Err(CliError::Config(format!("matrix determinant is {} instead of 1", m.det())));
    }
    Ok(GroupElement::from_matrix(m))
}

fn ok(text: String) -> Outcome {
    Outcome { text, failure: None }
}

pub fn majorant(xi: &str, l: f64, ygrid: &str, base: f64, fmt: Format) -> Result<Outcome, CliError> {
    let xi = cfg(parse_pair(xi))?;
    let ks = cfg(parse_range(ygrid))?;
    if !(l >= 1.0) || !(base > 1.0) {
        return Err(CliError::Config("need L ≥ 1 and base > 1".into()));
    }
    let rows: Vec<Vec<Cell>> = ks
        .par_iter()
        .map(|&k| {
            let y = base.powi(-k);
            let b = majorant_b(xi, l, y);
            // b_{ξ,L}(y) = b_g(L/y) with g = (1, ξ)a(y)
            let g = compose(&GroupElement::translation(xi), &GroupElement::from_matrix(Mat2::a(y)));
            let (bg, _) = majorant_bg_report(&g, l / y);
            vec![
                Cell::from(y),
                Cell::from(b.value),
                Cell::from(b.value + y.powf(0.25)),
                Cell::from(b.witness_q),
                Cell::from(y_g(&g, l / y)),
                Cell::from(bg),
            ]
        })
        .collect();
    let mut t = Table::new("horocycle-majorant", 1, &["y", "b", "b_tilde", "witness_q", "y_g", "b_g"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(ok(t.render(fmt)))
}

pub struct AverageArgs {
    pub xi: String,
    pub alpha: f64,
    pub beta: f64,
    pub ygrid: String,
    pub base: f64,
    pub spec: Option<PathBuf>,
    pub tol: f64,
    pub eps: f64,
    pub method: MethodArg,
    pub delta: f64,
}

pub const AVERAGE_HEADER: [&str; 9] = ["y", "re_avg", "im_avg", "re_ref", "im_ref", "disc", "majorant", "ratio", "quad_err"];

fn report_cells(x: f64, r: &horocycle::orbit::DiscrepancyReport) -> Vec<Cell> {
    vec![
        Cell::from(x),
        Cell::from(r.average.re),
        Cell::from(r.average.im),
        Cell::from(r.reference.re),
        Cell::from(r.reference.im),
        Cell::from(r.discrepancy),
        Cell::from(r.majorant),
        Cell::from(r.ratio),
        Cell::from(r.quad_error_estimate),
    ]
}

fn failed_cells(x: f64, n: usize) -> Vec<Cell> {
    let mut v = vec![Cell::from(x)];
    v.extend((1..n).map(|_| Cell::from(f64::NAN)));
    v
}

pub fn average(a: AverageArgs, fmt: Format) -> Result<Outcome, CliError> {
    let xi = cfg(parse_pair(&a.xi))?;
    let ks = cfg(parse_range(&a.ygrid))?;
    let spec = load_spec(&a.spec)?;
    let method = match a.method {
        MethodArg::Direct => Method::Direct,
        MethodArg::Coset => Method::CosetSum,
        MethodArg::Mollified => Method::Mollified { delta: a.delta },
    };
    if !(a.base > 1.0) {
        return Err(CliError::Config("base must exceed 1".into()));
    }
    let reqs: Vec<AverageRequest> = ks
        .iter()
        .map(|&k| {
            let mut r = AverageRequest::new(spec, xi, a.alpha, a.beta, a.base.powi(-k)).with_method(method).with_tol(a.tol);
            r.eps = a.eps;
            r
        })
        .collect();
    for r in &reqs {
        r.validate()?;
    }
    let results: Vec<_> = reqs.par_iter().map(closed_lift_average).collect();
    let mut t = Table::new("horocycle-average", 1, &AVERAGE_HEADER);
    let mut failure = None;
    for (req, res) in reqs.iter().zip(results) {
        match res {
            Ok(r) => t.push(report_cells(req.y, &r)),
            Err(e) => {
                t.push(failed_cells(req.y, AVERAGE_HEADER.len()));
                failure.get_or_insert(CliError::from(e));
            }
        }
    }
    Ok(Outcome { text: t.render(fmt), failure })
}

pub fn orbit(xi: &str, matrix: &str, ts: &str, spec: Option<PathBuf>, tol: f64, eps: f64, fmt: Format) -> Result<Outcome, CliError> {
    let xi = cfg(parse_pair(xi))?;
    let m = parse_matrix(matrix)?;
    let ts = cfg(parse_list(ts))?;
    let spec = load_spec(&spec)?;
    let g = compose(&GroupElement::translation(xi), &m);
    let results: Vec<_> = ts
        .par_iter()
        .map(|&t| general_orbit_average(&GeneralRequest { spec, g, t, tol, eps }))
        .collect();
    let mut header = AVERAGE_HEADER;
    header[0] = "T";
    let mut table = Table::new("horocycle-orbit", 1, &header);
    let mut failure = None;
    for (&t, res) in ts.iter().zip(results) {
        match res {
            Ok(r) => table.push(report_cells(t, &r)),
            Err(horocycle::Error::InvalidInput(msg)) => return Err(CliError::Config(msg)),
            Err(e) => {
                table.push(failed_cells(t, header.len()));
                failure.get_or_insert(CliError::from(e));
            }
        }
    }
    Ok(Outcome { text: table.render(fmt), failure })
}

pub fn kloosterman(c: u64, n: i64, m: i64, fmt: Format) -> Result<Outcome, CliError> {
    if c == 0 {
        return Err(CliError::Config("c must be positive".into()));
    }
    let s = arith::kloosterman(n, m, c);
    let bound = weil_bound(n, m, c);
    let mut t = Table::new("horocycle-kloosterman", 1, &["n", "m", "c", "value", "bound", "ok"]);
    t.push(vec![
        Cell::from(n),
        Cell::from(m),
        Cell::from(c),
        Cell::from(s.re),
        Cell::from(bound),
        Cell::from(if s.norm() <= bound + 1e-6 { "true" } else { "false" }),
    ]);
    Ok(ok(t.render(fmt)))
}

fn seeded_matrix(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        let c: f64 = rng.gen_range(-2.0..2.0);
        if c.abs() < 0.1 || a.abs() < 0.5 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= 2.0 {
            return Mat2::new(a, b, c, d);
        }
    }
}

/// Draws seeded matrices until the closed approximation has `y < 1e−2`,
/// so that the default plan has intervals besides `I₀`.
fn default_plan_matrix(t: f64, cap: f64, seed: u64) -> Result<(GroupElement, ClosedApproxParams), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..1000 {
        let m = GroupElement::from_matrix(seeded_matrix(&mut rng));
        let p = sarnak_ubis_params_with_cap(&m, t, cap)?;
        if p.y < 1e-2 {
            return Ok((m, p));
        }
        last = Some((m, p));
    }
    Ok(last.expect("at least one draw"))
}

#[allow(clippy::too_many_arguments)]
pub fn partition(
    xi: &str,
    matrix: Option<&str>,
    t: &str,
    cap: f64,
    with_reassembly: bool,
    spec: Option<PathBuf>,
    tol: f64,
    seed: u64,
    fmt: Format,
) -> Result<Outcome, CliError> {
    let xi = cfg(parse_pair(xi))?;
    let t: f64 = t.trim().parse().map_err(|_| CliError::Config(format!("bad T {t:?}")))?;
    let (m, params) = match matrix {
        Some(s) => {
            let m = parse_matrix(s)?;
            let p = sarnak_ubis_params_with_cap(&m, t, cap)?;
            (m, p)
        }
        None => default_plan_matrix(t, cap, seed)?,
    };
    let spec = load_spec(&spec)?;
    if params.exact_closed {
        return Err(CliError::Config("M has zero lower-left entry; the orbit is already closed".into()));
    }
    let plan = partition_intervals(xi, &m, t, &params)?;
    let report = audit(&plan, cap);
    let re = if with_reassembly { Some(reassemble(&spec, &plan, &m, tol)?) } else { None };
    let mut failure = None;
    if !report.passes() || re.as_ref().is_some_and(|r| !r.passes()) {
        failure = Some(CliError::Suite(format!("partition audit failed: {}", serde_json::to_string(&report).unwrap_or_default())));
    }
    let text = match fmt {
        Format::Json => {
            let v = json!({ "schema": "horocycle-partition", "version": 1, "matrix": m.m, "plan": plan, "audit": report, "reassembly": re });
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut table = Table::new(
                "horocycle-partition",
                1,
                &["t_lo", "t_hi", "rho_min", "rho_max", "tau", "n_j", "y_star", "forward"],
            );
            for iv in &plan.intervals {
                table.push(vec![
                    Cell::from(iv.t_lo),
                    Cell::from(iv.t_hi),
                    Cell::from(iv.rho_min),
                    Cell::from(iv.rho_max),
                    Cell::from(iv.tau),
                    Cell::from(iv.n_j),
                    Cell::from(iv.y_star),
                    Cell::from(if iv.forward { "true" } else { "false" }),
                ]);
            }
            eprintln!("audit: {}", serde_json::to_string(&report).unwrap_or_default());
            table.render(fmt)
        }
    };
    Ok(Outcome { text, failure })
}

/// `T = 10^{1 + j/per_decade}` up to `tmax`.
pub fn decay_grid(tmax: f64, per_decade: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let t = 10f64.powf(1.0 + j as f64 / per_decade as f64);
        if t > tmax * (1.0 + 1e-12) {
            break;
        }
        out.push(t);
        j += 1;
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn generic_decay(
    matrix: &str,
    alpha: f64,
    c: f64,
    samples: usize,
    tmax: f64,
    per_decade: usize,
    seed: u64,
    fmt: Format,
) -> Result<Outcome, CliError> {
    let m = parse_matrix(matrix)?;
    if samples == 0 || per_decade == 0 || !(tmax >= 10.0) {
        return Err(CliError::Config("need samples ≥ 1, per_decade ≥ 1 and tmax ≥ 10".into()));
    }
    let grid = decay_grid(tmax, per_decade);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xis: Vec<[f64; 2]> = (0..samples).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let rows: Vec<(f64, bool)> = xis
        .par_iter()
        .map(|&xi| {
            let g = compose(&GroupElement::translation(xi), &m);
            let worst = grid.iter().map(|&t| majorant_bg_report(&g, t).0 * t.powf(alpha)).fold(0.0, f64::max);
            (worst, worst <= c)
        })
        .collect();
    let mut t = Table::new("horocycle-generic-decay", 1, &["sample", "xi1", "xi2", "max_scaled", "pass"]);
    for (i, (xi, (w, p))) in xis.iter().zip(&rows).enumerate() {
        t.push(vec![
            Cell::from(i as i64),
            Cell::from(xi[0]),
            Cell::from(xi[1]),
            Cell::from(*w),
            Cell::from(if *p { "true" } else { "false" }),
        ]);
    }
    let frac = rows.iter().filter(|r| r.1).count() as f64 / samples as f64;
    let regime = if alpha < 0.5 { "asserted range" } else { "report only" };
    eprintln!("pass fraction {frac} over {samples} samples, alpha {alpha} ({regime})");
    Ok(ok(t.render(fmt)))
}
