use rayon::prelude::*;
use serde::Serialize;

use iterfrac::error::Error;
use iterfrac::iterate::{
    generator_exp, iterate, phi_minus_one_powers, q_pochhammer_tables, Method,
};
use iterfrac::itlog::{itlog, ItlogForm};
use iterfrac::oracle::{oracle_compose_iterate, oracle_functional_root, oracle_moebius, verify_partition_lemma};
use iterfrac::qcalc::{alt_sum_direct, alt_sum_identity, hockey_stick, hockey_stick_direct, QContext};
use iterfrac::scalar::{is_unit, Exponent, Mode, Scalar};
use iterfrac::series::Series;
use iterfrac::triangle::{max_rel_dev, phi_triangle, triangle_product, CoeffTriangle};

use crate::{json, render, Failure, Outcome};

type CheckFn = Box<dyn Fn() -> Result<String, String> + Send + Sync>;

#[derive(Serialize)]
struct CheckOut {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct ValidateOut {
    order: usize,
    tol: f64,
    passed: usize,
    failed: usize,
    checks: Vec<CheckOut>,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn fixture(name: &str, order: usize) -> Series {
    let mode = Mode::Exact;
    match name {
        "mixed" => {
            let tail = [(-1, 1), (1, 2), (3, 1), (-2, 3), (1, 1), (1, 3), (-5, 4)];
            let mut c = vec![Scalar::zero(mode), Scalar::from_i64(mode, 2)];
            c.extend((2..=order).map(|n| {
                let (p, q) = tail[(n - 2) % tail.len()];
                Scalar::ratio(p, q)
            }));
            Series::new(c).expect("fixture")
        }
        preset => Series::preset(preset, order, mode).expect("fixture"),
    }
}

const FIXTURES: [&str; 6] = ["geometric", "quad", "expm1", "moebius(2)", "moebius(1/3)", "mixed"];

fn integer_agreement(name: &'static str, s: i64, order: usize) -> CheckFn {
    Box::new(move || {
        let f = fixture(name, order);
        let e = Exponent::Int(s);
        let want = iterate(&f, &e, order, Method::Matrix).map_err(err)?;
        let mut used = 0;
        for m in Method::ALL {
            if !m.applicable(&f.q(), &e) {
                continue;
            }
            match iterate(&f, &e, order, m) {
                Ok(t) if t == want => used += 1,
                Ok(_) => return Err(format!("{m} differs from matrix")),
                Err(Error::ExtractedPole(_)) => {}
                Err(e) => return Err(format!("{m}: {e}")),
            }
        }
        Ok(format!("{used} methods identical"))
    })
}

fn fractional_agreement(name: &'static str, order: usize, bits: u32, tol: f64) -> CheckFn {
    Box::new(move || {
        let mut f = fixture(name, order);
        let s = Exponent::ratio(1, 2);
        if !is_unit(&f.q()) {
            f = f.to_mode(Mode::Numeric(bits)).map_err(err)?;
        }
        let want = iterate(&f, &s, order, Method::Auto).map_err(err)?;
        let mut worst = 0.0f64;
        let mut used = 0;
        for m in Method::ALL.into_iter().filter(|m| m.applicable(&f.q(), &s)) {
            let t = iterate(&f, &s, order, m).map_err(|e| format!("{m}: {e}"))?;
            let d = max_rel_dev(&t, &want).map_err(err)?;
            let limit = if f.mode().is_exact() { 0.0 } else { tol };
            if d > limit {
                return Err(format!("{m} deviates by {d:e}"));
            }
            worst = worst.max(d);
            used += 1;
        }
        Ok(format!("{used} methods agree, max deviation {worst:.2e}"))
    })
}

fn compose_oracle(name: &'static str, order: usize) -> CheckFn {
    Box::new(move || {
        let f = fixture(name, order);
        for s in 0..=3u32 {
            let t = iterate(&f, &Exponent::Int(s as i64), order, Method::Matrix).map_err(err)?;
            let g = oracle_compose_iterate(&f, s, order).map_err(err)?;
            if t.to_series() != g {
                return Err(format!("s = {s} differs from repeated composition"));
            }
        }
        Ok("s = 0..3 match repeated composition".into())
    })
}

fn checks(order: usize, tol: f64, bits: u32) -> Vec<(String, CheckFn)> {
    let mut out: Vec<(String, CheckFn)> = Vec::new();
    for name in FIXTURES {
        for s in 0..=3 {
            out.push((format!("integer/{name}/s={s}"), integer_agreement(name, s, order)));
        }
        out.push((format!("fractional/{name}/s=1/2"), fractional_agreement(name, order, bits, tol)));
        out.push((format!("oracle/compose/{name}"), compose_oracle(name, order)));
    }

    out.push((
        "oracle/half-root".into(),
        Box::new(move || {
            let f = fixture("quad", order);
            let t = iterate(&f, &Exponent::ratio(1, 2), order, Method::Schroder).map_err(err)?;
            let g = oracle_functional_root(&f, 2, order).map_err(err)?;
            if t.to_series() == g {
                Ok("schroder matches the functional square root".into())
            } else {
                Err("schroder differs from the functional square root".into())
            }
        }),
    ));
    out.push((
        "oracle/moebius".into(),
        Box::new(move || {
            let f = Series::preset("moebius(4)", order, Mode::Numeric(bits)).map_err(err)?;
            let s = Exponent::ratio(1, 2);
            let want = oracle_moebius(&f.q(), &s, order).map_err(err)?;
            let mut worst = 0.0f64;
            for m in [Method::QSchroder, Method::Tambs, Method::Lavoie, Method::QExtracted] {
                let got = iterate(&f, &s, order, m).map_err(err)?.to_series();
                for n in 1..=order {
                    worst = worst.max(Scalar::rel_dev(&got.coeff(n), &want.coeff(n)));
                }
            }
            if worst <= tol {
                Ok(format!("max deviation {worst:.2e}"))
            } else {
                Err(format!("deviation {worst:e}"))
            }
        }),
    ));
    out.push((
        "group-law".into(),
        Box::new(move || {
            let mode = Mode::Numeric(bits);
            let mut f = fixture("mixed", order).to_mode(mode).map_err(err)?.into_coeffs();
            f[1] = Scalar::parse("0.7+0.1i", mode).map_err(err)?;
            let f = Series::new(f).map_err(err)?;
            let s = Exponent::parse("0.3", bits).map_err(err)?;
            let t = Exponent::parse("0.7", bits).map_err(err)?;
            let a = iterate(&f, &s, order, Method::Auto).map_err(err)?;
            let b = iterate(&f, &t, order, Method::Auto).map_err(err)?;
            let phi = phi_triangle(&f, order).map_err(err)?;
            let d = max_rel_dev(&triangle_product(&a, &b).map_err(err)?, &phi).map_err(err)?;
            if d <= tol {
                Ok(format!("phi^0.3 phi^0.7 = phi within {d:.2e}"))
            } else {
                Err(format!("deviation {d:e}"))
            }
        }),
    ));
    out.push((
        "lemma/truncation".into(),
        Box::new(move || {
            let mut count = 0;
            for name in FIXTURES {
                let f = fixture(name, order);
                let phi = phi_triangle(&f, order).map_err(err)?;
                let ctx = QContext::new(f.q()).map_err(err)?;
                let mut tables = vec![q_pochhammer_tables(&phi, &ctx)];
                if is_unit(&f.q()) {
                    tables.push(phi_minus_one_powers(&phi, false));
                }
                for table in &tables {
                    count += vanishing(table, name)?;
                }
            }
            Ok(format!("{count} entries vanish"))
        }),
    ));
    out.push((
        "lemma/partition".into(),
        Box::new(|| {
            for s in 1..=4 {
                for m in 0..=4 {
                    if !verify_partition_lemma(s, 1, 1 + m) {
                        return Err(format!("s = {s}, n - k = {m}"));
                    }
                }
            }
            Ok("bijective for s <= 4, n - k <= 4".into())
        }),
    ));
    out.push((
        "itlog/forms".into(),
        Box::new(move || {
            for q in [Scalar::from_i64(Mode::Exact, 2), Scalar::ratio(1, 3)] {
                let mut c = fixture("mixed", order).into_coeffs();
                c[1] = q.clone();
                let f = Series::new(c).map_err(err)?;
                let a = itlog(&f, order, ItlogForm::Pochhammer).map_err(err)?;
                let b = itlog(&f, order, ItlogForm::Discrete).map_err(err)?;
                if a != b {
                    return Err(format!("forms differ at q = {q}"));
                }
            }
            Ok("pochhammer and discrete forms agree".into())
        }),
    ));
    out.push((
        "itlog/geometric".into(),
        Box::new(move || {
            let f = fixture("geometric", order);
            let c = itlog(&f, order, ItlogForm::Classical).map_err(err)?.ordinary().map_err(err)?;
            let square = c.iter().enumerate().all(|(i, v)| *v == Scalar::from_i64(Mode::Exact, i64::from(i == 1)));
            if square {
                Ok("itlog(x/(1-x)) = x^2".into())
            } else {
                Err("itlog(x/(1-x)) != x^2".into())
            }
        }),
    ));
    out.push((
        "generator".into(),
        Box::new(move || {
            let mut worst = 0.0f64;
            for name in ["geometric", "moebius(4)"] {
                let f = Series::preset(name, order, Mode::Numeric(bits)).map_err(err)?;
                for s in [Exponent::Int(2), Exponent::ratio(1, 2)] {
                    let g = generator_exp(&f, &s, order).map_err(err)?;
                    let t = iterate(&f, &s, order, Method::Auto).map_err(err)?;
                    worst = worst.max(max_rel_dev(&g, &t).map_err(err)?);
                }
            }
            if worst <= tol {
                Ok(format!("exp of the generator matches, max deviation {worst:.2e}"))
            } else {
                Err(format!("deviation {worst:e}"))
            }
        }),
    ));
    out.push((
        "q-identities".into(),
        Box::new(|| {
            let mut count = 0;
            for q in [Scalar::ratio(2, 3), Scalar::ratio(-5, 2)] {
                let ctx = QContext::new(q).map_err(err)?;
                for a in -6..=6i64 {
                    for b in 0..=6 {
                        let e = Exponent::Int(a);
                        if alt_sum_direct(&e, b, &ctx).map_err(err)? != alt_sum_identity(&e, b, &ctx).map_err(err)? {
                            return Err(format!("alternating sum a = {a}, b = {b}"));
                        }
                        count += 1;
                    }
                }
                for n in 2..=7 {
                    for l in 1..n {
                        if hockey_stick_direct(n, l, &ctx).map_err(err)? != hockey_stick(n, l, &ctx).map_err(err)? {
                            return Err(format!("hockey stick n = {n}, l = {l}"));
                        }
                        count += 1;
                    }
                }
            }
            Ok(format!("{count} identities hold"))
        }),
    ));
    out
}

fn vanishing(table: &[CoeffTriangle], name: &str) -> Result<usize, String> {
    let mut count = 0;
    for (p, t) in table.iter().enumerate() {
        for n in 0..=t.size() {
            for k in 0..=n {
                if p > n - k {
                    if !t.entry(n, k).is_zero() {
                        return Err(format!("{name}: [{n} {k}] nonzero at p = {p}"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

pub fn run(order: usize, tol: f64, bits: u32, table: bool) -> Outcome {
    if order < 2 {
        return Err(Failure::Domain(Error::BadRange(format!("validate needs order >= 2, got {order}"))));
    }
    iterfrac::series::check_order(order)?;
    let mut results: Vec<CheckOut> = checks(order, tol, bits)
        .into_par_iter()
        .map(|(name, check)| {
            let (pass, detail) = match check() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOut { name, pass, detail }
        })
        .collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    let failed = results.iter().filter(|c| !c.pass).count();
    let out = ValidateOut { order, tol, passed: results.len() - failed, failed, checks: results };
    let text = if table {
        let mut rows = vec![vec!["check".to_string(), "result".into(), "detail".into()]];
        for c in &out.checks {
            rows.push(vec![c.name.clone(), if c.pass { "PASS" } else { "FAIL" }.into(), c.detail.clone()]);
        }
        format!("{}\n{} passed, {} failed", render::columns(&rows), out.passed, out.failed)
    } else {
        json(&out)
    };
    if failed == 0 {
        Ok(text)
    } else {
        println!("{text}");
        Err(Failure::Check("ValidationFailed".into(), format!("{failed} checks failed")))
    }
}
