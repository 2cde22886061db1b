//! q-analogs: q-integers, q-factorials, q-binomials with an arbitrary upper
//! argument, Gauss's expansion of `(x, y)_q^n`, the q-derivative, and two
//! summation identities.
//!
//! At `q = 1` every function reduces to its classical counterpart through
//! `[s]_1 = s`; no separate code path is taken.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{is_unit, q_number, scalar_pow, Exponent, Mode, Scalar, UNIT_BAND};
use crate::series::Series;

/// `q` together with memoized integer powers and q-integers.
#[derive(Debug)]
pub struct QContext {
    q: Scalar,
    unit: bool,
    powers: RefCell<HashMap<i64, Scalar>>,
    integers: RefCell<HashMap<i64, Scalar>>,
}

impl QContext {
    pub fn new(q: Scalar) -> Result<QContext> {
        if q.is_zero() {
            return Err(Error::ZeroBase);
        }
        let unit = is_unit(&q);
        Ok(QContext {
            q,
            unit,
            powers: RefCell::new(HashMap::new()),
            integers: RefCell::new(HashMap::new()),
        })
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn mode(&self) -> Mode {
        self.q.mode()
    }

    /// Whether `q` is one (or numerically indistinguishable from it).
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self.mode())
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self.mode())
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar::from_i64(self.mode(), v)
    }

    /// `q^e` for an integer `e`.
    pub fn pow_i(&self, e: i64) -> Scalar {
        if let Some(v) = self.powers.borrow().get(&e) {
            return v.clone();
        }
        let v = scalar_pow(&self.q, &Exponent::Int(e)).expect("integer power of nonzero q");
        self.powers.borrow_mut().insert(e, v.clone());
        v
    }

    /// `q^s`, principal branch.
    pub fn pow(&self, s: &Exponent) -> Result<Scalar> {
        match s.as_int() {
            Some(e) => Ok(self.pow_i(e)),
            None => scalar_pow(&self.q, s),
        }
    }

    /// `[n]_q` for an integer `n`.
    pub fn q_int(&self, n: i64) -> Scalar {
        if let Some(v) = self.integers.borrow().get(&n) {
            return v.clone();
        }
        let v = if self.unit && !self.q.is_one() {
            q_number(&Exponent::Int(n), &self.q).expect("integer q-number")
        } else if self.q.is_one() {
            self.int(n)
        } else {
            (self.pow_i(n) - self.one()) / (&self.q - &self.one())
        };
        self.integers.borrow_mut().insert(n, v.clone());
        v
    }

    /// `[s]_q`.
    pub fn q_num(&self, s: &Exponent) -> Result<Scalar> {
        match s.as_int() {
            Some(n) => Ok(self.q_int(n)),
            None => q_number(s, &self.q),
        }
    }

    /// Fails with `QDegenerate(p)` when `[p]_q` vanishes for some `1 <= p <= n`.
    pub fn check_nondegenerate(&self, n: usize) -> Result<()> {
        for p in 1..=n as i64 {
            if vanishes(&self.q_int(p)) {
                return Err(Error::QDegenerate(p));
            }
        }
        Ok(())
    }
}

fn vanishes(v: &Scalar) -> bool {
    match v {
        Scalar::Exact(_) => v.is_zero(),
        Scalar::Numeric(_) => v.abs_f64() < UNIT_BAND,
    }
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: usize, ctx: &QContext) -> Result<Scalar> {
    ctx.check_nondegenerate(n)?;
    let mut acc = ctx.one();
    for p in 2..=n as i64 {
        acc *= &ctx.q_int(p);
    }
    Ok(acc)
}

/// `[s]_q [s-1]_q ... [s-p+1]_q / [p]_q!`.
pub fn q_binomial(s: &Exponent, p: usize, ctx: &QContext) -> Result<Scalar> {
    let den = q_factorial(p, ctx)?;
    let mut num = ctx.one();
    for l in 0..p as i64 {
        let f = ctx.q_num(&s.offset(-l))?;
        if f.is_zero() {
            return Ok(ctx.zero());
        }
        num *= &f;
    }
    Ok(num / den)
}

/// `q^{C(m, 2)}`, defined through `m (m - 1) / 2` for any integer `m`.
pub fn q_pow_choose2(m: i64, ctx: &QContext) -> Scalar {
    ctx.pow_i(m * (m - 1) / 2)
}

/// Coefficients of `y^l x^{n-l}` in `(x, y)_q^n = prod_{i<n} (x + q^i y)`,
/// for `l = 0..=n`, by multiplying out the product.
pub fn gauss_expand(n: usize, ctx: &QContext) -> Vec<Scalar> {
    let mut poly = vec![ctx.one()];
    for i in 0..n {
        let qi = ctx.pow_i(i as i64);
        let mut next = vec![ctx.zero(); poly.len() + 1];
        for (l, c) in poly.iter().enumerate() {
            next[l] += c;
            next[l + 1] += &(c * &qi);
        }
        poly = next;
    }
    poly
}

/// `D_q f`, mapping `c_n x^n` to `[n]_q c_n x^{n-1}`. The result keeps the
/// truncation order of `f`, with a zero top coefficient.
pub fn q_derivative(f: &Series, ctx: &QContext) -> Result<Series> {
    if !f.mode().compatible(ctx.mode()) {
        return Err(Error::ModeMismatch);
    }
    let n = f.order();
    let mut out: Vec<Scalar> = (1..=n).map(|m| ctx.q_int(m as i64) * f.coeff(m)).collect();
    out.push(ctx.zero());
    Series::new(out)
}

/// Closed form `qbinom(b - a, b) q^{ba}` of
/// `sum_{p=0}^{b} qbinom(a, p) q^{C(p, 2)} (-1)^p`.
pub fn alt_sum_identity(a: &Exponent, b: usize, ctx: &QContext) -> Result<Scalar> {
    let top = a.negated().offset(b as i64);
    let binom = q_binomial(&top, b, ctx)?;
    Ok(binom * ctx.pow(&a.scaled(b as i64))?)
}

/// The left-hand sum of [`alt_sum_identity`], term by term.
pub fn alt_sum_direct(a: &Exponent, b: usize, ctx: &QContext) -> Result<Scalar> {
    let mut acc = ctx.zero();
    for p in 0..=b {
        let term = q_binomial(a, p, ctx)? * q_pow_choose2(p as i64, ctx);
        if p % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    Ok(acc)
}

fn check_hockey(n: usize, l: usize) -> Result<()> {
    if l < 1 || l + 1 > n {
        return Err(Error::BadRange(format!("hockey stick needs 1 <= l <= n-1, got l = {l}, n = {n}")));
    }
    Ok(())
}

/// Closed form `qbinom(n-1, l) q^{-l(n-1)}` of
/// `sum_{p=l}^{n-1} qbinom(p-1, l-1) q^{-lp}`.
pub fn hockey_stick(n: usize, l: usize, ctx: &QContext) -> Result<Scalar> {
    check_hockey(n, l)?;
    let binom = q_binomial(&Exponent::Int(n as i64 - 1), l, ctx)?;
    Ok(binom * ctx.pow_i(-((l * (n - 1)) as i64)))
}

/// The left-hand sum of [`hockey_stick`], term by term.
pub fn hockey_stick_direct(n: usize, l: usize, ctx: &QContext) -> Result<Scalar> {
    check_hockey(n, l)?;
    let mut acc = ctx.zero();
    for p in l..n {
        let binom = q_binomial(&Exponent::Int(p as i64 - 1), l - 1, ctx)?;
        acc += &(binom * ctx.pow_i(-((l * p) as i64)));
    }
    Ok(acc)
}
