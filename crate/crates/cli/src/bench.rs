use std::time::Instant;

use serde::Serialize;

use iterfrac::error::Error;
use iterfrac::iterate::{iterate, Method};
use iterfrac::scalar::{is_unit, Exponent, Mode, Scalar};
use iterfrac::series::{check_order, Series};
use iterfrac::triangle::{max_rel_dev, CoeffTriangle};

use crate::validate::fixture;
use crate::{json, render, Failure, Outcome};

#[derive(Serialize)]
struct Timing {
    method: &'static str,
    ms: f64,
}

#[derive(Serialize)]
struct Cell {
    series: &'static str,
    order: usize,
    s: String,
    mode: &'static str,
    max_discrepancy: f64,
    timings: Vec<Timing>,
}

fn series(name: &str, order: usize) -> Series {
    let mut c = fixture("mixed", order).into_coeffs();
    if name == "unitary" {
        c[1] = Scalar::one(Mode::Exact);
    }
    Series::new(c).expect("bench series")
}

fn cell(name: &'static str, order: usize, s: &Exponent, tol: f64, bits: u32) -> Result<Cell, Failure> {
    let mut f = series(name, order);
    let fractional = s.as_int().is_none();
    if fractional && !is_unit(&f.q()) || matches!(s, Exponent::Num(_)) {
        f = f.to_mode(Mode::Numeric(bits))?;
    }
    let mut runs: Vec<(Method, f64, CoeffTriangle)> = Vec::new();
    for m in Method::ALL.into_iter().filter(|m| m.applicable(&f.q(), s)) {
        let start = Instant::now();
        match iterate(&f, s, order, m) {
            Ok(t) => runs.push((m, start.elapsed().as_secs_f64() * 1e3, t)),
            Err(Error::ExtractedPole(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let reference = &runs.first().expect("matrix or a fractional method applies").2;
    let mut worst = 0.0f64;
    for (m, _, t) in &runs {
        let d = max_rel_dev(t, reference)?;
        let limit = if f.mode().is_exact() { 0.0 } else { tol };
        if d > limit {
            return Err(Failure::Check(
                "Disagreement".into(),
                format!("{m} deviates by {d:e} on {name}, N = {order}, s = {s}"),
            ));
        }
        worst = worst.max(d);
    }
    Ok(Cell {
        series: name,
        order,
        s: s.to_string(),
        mode: if f.mode().is_exact() { "exact" } else { "numeric" },
        max_discrepancy: worst,
        timings: runs.into_iter().map(|(m, ms, _)| Timing { method: m.name(), ms }).collect(),
    })
}

/// Runs cells one at a time so that timings do not compete for cores.
pub fn run(max_order: usize, exponents: &[String], tol: f64, bits: u32, table: bool) -> Outcome {
    check_order(max_order)?;
    let exps = exponents
        .iter()
        .map(|t| Exponent::parse(t, bits))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cells = Vec::new();
    for name in ["unitary", "mixed"] {
        for order in (4..=max_order.max(4)).step_by(2) {
            for s in &exps {
                cells.push(cell(name, order, s, tol, bits)?);
            }
        }
    }
    if !table {
        return Ok(json(&cells));
    }
    let mut rows = vec![vec![
        "series".to_string(),
        "N".into(),
        "s".into(),
        "method".into(),
        "ms".into(),
    ]];
    for c in &cells {
        for t in &c.timings {
            rows.push(vec![
                c.series.to_string(),
                c.order.to_string(),
                c.s.clone(),
                t.method.to_string(),
                format!("{:.3}", t.ms),
            ]);
        }
    }
    Ok(render::columns(&rows))
}
