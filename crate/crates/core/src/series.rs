//! Truncated formal power series.
//!
//! A [`Series`] stores ordinary coefficients `c_0..c_N`; the exponential
//! coefficients `a_n = n! c_n` are derived on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial_u, ensure_same_mode, factorial, Mode, Scalar, DEFAULT_REL_TOL};

pub const DEFAULT_ORDER: usize = 16;
/// Partition sums downstream grow super-polynomially; orders are capped.
pub const MAX_ORDER: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<Scalar>,
}

pub fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderTooLarge(order))
    } else {
        Ok(())
    }
}

impl Series {
    /// Builds a series from ordinary coefficients `c_0..c_N`.
    pub fn new(coeffs: Vec<Scalar>) -> Result<Series> {
        if coeffs.is_empty() {
            return Err(Error::BadRange("series needs at least one coefficient".into()));
        }
        check_order(coeffs.len() - 1)?;
        ensure_same_mode(&coeffs)?;
        Ok(Series { coeffs })
    }

    /// Builds a series from exponential coefficients `a_0..a_N`.
    pub fn from_exponential(a: Vec<Scalar>) -> Result<Series> {
        Series::new(exp_ord_convert(&a, Direction::ExpToOrd))
    }

    pub fn zero(mode: Mode, order: usize) -> Series {
        Series { coeffs: vec![Scalar::zero(mode); order + 1] }
    }

    /// The series `x`.
    pub fn identity(mode: Mode, order: usize) -> Series {
        let mut s = Series::zero(mode, order.max(1));
        s.coeffs[1] = Scalar::one(mode);
        s.truncate(order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mode(&self) -> Mode {
        self.coeffs[0].mode()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// `c_n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Scalar {
        self.coeffs.get(n).cloned().unwrap_or_else(|| Scalar::zero(self.mode()))
    }

    /// `q = f'(0) = c_1`.
    pub fn q(&self) -> Scalar {
        self.coeff(1)
    }

    pub fn is_invertible(&self) -> bool {
        self.order() >= 1 && self.coeffs[0].is_zero() && !self.coeffs[1].is_zero()
    }

    pub fn ensure_invertible(&self) -> Result<()> {
        if self.is_invertible() {
            Ok(())
        } else {
            Err(Error::NotInvertible)
        }
    }

    pub fn exponential_coeffs(&self) -> Vec<Scalar> {
        exp_ord_convert(&self.coeffs, Direction::OrdToExp)
    }

    pub fn truncate(&self, order: usize) -> Series {
        let mode = self.mode();
        let coeffs = (0..=order)
            .map(|n| self.coeffs.get(n).cloned().unwrap_or_else(|| Scalar::zero(mode)))
            .collect();
        Series { coeffs }
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Series> {
        let coeffs = self.coeffs.iter().map(|c| c.to_mode(mode)).collect::<Result<_>>()?;
        Ok(Series { coeffs })
    }

    pub fn add(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series { coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series { coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn scale(&self, k: &Scalar) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Cauchy product truncated at `order`.
    pub fn mul_trunc(&self, other: &Series, order: usize) -> Series {
        let mode = self.mode();
        let mut out = vec![Scalar::zero(mode); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Series { coeffs: out }
    }

    /// `self^k` truncated at `order`.
    pub fn pow_trunc(&self, k: u32, order: usize) -> Series {
        let mut acc = Series::zero(self.mode(), order);
        acc.coeffs[0] = Scalar::one(self.mode());
        for _ in 0..k {
            acc = acc.mul_trunc(self, order);
        }
        acc
    }

    /// Evaluates the truncated series as a polynomial.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.mode());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Named presets: `moebius(q)` for `qx/(1-x)`, `geometric` for
    /// `x/(1-x)`, `linear(q)` for `qx`, `quad` for `x+x^2`, and `expm1` for
    /// `e^x - 1`.
    pub fn preset(text: &str, order: usize, mode: Mode) -> Result<Series> {
        check_order(order)?;
        let text = text.trim();
        let (name, arg) = match text.split_once('(') {
            Some((name, rest)) => {
                let arg = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("preset {text:?}")))?;
                (name.trim(), Some(Scalar::parse(arg, mode)?))
            }
            None => (text, None),
        };
        let one = Scalar::one(mode);
        let mut coeffs = vec![Scalar::zero(mode); order + 1];
        match (name, arg) {
            ("moebius", Some(q)) => {
                for c in coeffs.iter_mut().skip(1) {
                    *c = q.clone();
                }
            }
            ("geometric", None) => {
                for c in coeffs.iter_mut().skip(1) {
                    *c = one.clone();
                }
            }
            ("linear", Some(q)) => {
                if order >= 1 {
                    coeffs[1] = q;
                }
            }
            ("quad", None) => {
                for c in coeffs.iter_mut().skip(1).take(2) {
                    *c = one.clone();
                }
            }
            ("expm1", None) => {
                for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
                    *c = Scalar::from_rational(mode, rug::Rational::from((1, factorial(n as u32))));
                }
            }
            _ => return Err(Error::Parse(format!("preset {text:?}"))),
        }
        Series::new(coeffs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    OrdToExp,
    ExpToOrd,
}

/// `a_n = n! q_n` or `q_n = a_n / n!`, indexed from `n = 0`.
pub fn exp_ord_convert(coeffs: &[Scalar], direction: Direction) -> Vec<Scalar> {
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let f = Scalar::from_integer(c.mode(), factorial(n as u32));
            match direction {
                Direction::OrdToExp => c * &f,
                Direction::ExpToOrd => c / &f,
            }
        })
        .collect()
}

fn check_pair(f: &Series, g: &Series, order: usize) -> Result<()> {
    ensure_same_mode([&f.coeffs[0], &g.coeffs[0]])?;
    if order > f.order().min(g.order()) {
        return Err(Error::BadRange(format!(
            "order {order} exceeds truncation {}",
            f.order().min(g.order())
        )));
    }
    Ok(())
}

/// `f(g(x))` through `order`; requires `g(0) = 0`.
pub fn compose(f: &Series, g: &Series, order: usize) -> Result<Series> {
    check_pair(f, g, order)?;
    if !g.coeffs[0].is_zero() {
        return Err(Error::ConstantTermNonzero);
    }
    let g = g.truncate(order);
    let mut acc = Series::zero(f.mode(), order);
    for n in (0..=order).rev() {
        acc = acc.mul_trunc(&g, order);
        acc.coeffs[0] += &f.coeffs[n];
    }
    Ok(acc)
}

/// Compositional inverse through `order`, solved one coefficient at a time:
/// the unknown `g_n` enters `[x^n] f(g(x))` as `q g_n`.
pub fn comp_inverse(f: &Series, order: usize) -> Result<Series> {
    f.ensure_invertible()?;
    if order > f.order() {
        return Err(Error::BadRange(format!("order {order} exceeds truncation {}", f.order())));
    }
    let mode = f.mode();
    let q = f.q();
    let mut g = Series::zero(mode, order);
    if order == 0 {
        return Ok(g);
    }
    g.coeffs[1] = q.inv()?;
    for n in 2..=order {
        let partial = compose(&f.truncate(n), &g.truncate(n), n)?;
        g.coeffs[n] = -(&partial.coeffs[n] / &q);
    }
    Ok(g)
}

/// `g(x) = f(x + a) - a` for a fixed point `a` of `f`, so that
/// `f^n(x) = g^n(x - a) + a`.
pub fn shift_fixed_point(f: &Series, a: &Scalar, order: usize) -> Result<Series> {
    ensure_same_mode([&f.coeffs[0], a])?;
    if order > f.order() {
        return Err(Error::BadRange(format!("order {order} exceeds truncation {}", f.order())));
    }
    let mode = f.mode();
    let fixed = f.eval(a);
    if !Scalar::approx_eq(&fixed, a, DEFAULT_REL_TOL) && !(&fixed - a).is_zero() {
        return Err(Error::NotFixedPoint);
    }
    // Taylor shift: d_m = sum_{n >= m} C(n, m) a^(n-m) c_n
    let n_max = f.order();
    let powers: Vec<Scalar> = (0..=n_max).map(|e| a.pow_u(e as u32)).collect();
    let mut d: Vec<Scalar> = (0..=n_max)
        .map(|m| {
            let mut acc = Scalar::zero(mode);
            for n in m..=n_max {
                let b = Scalar::from_integer(mode, binomial_u(n as u32, m as u32));
                acc += &(b * &powers[n - m] * &f.coeffs[n]);
            }
            acc
        })
        .collect();
    d[0] = Scalar::zero(mode);
    if n_max == 0 || d[1].is_zero() || d[1].abs_f64() < f64::MIN_POSITIVE {
        return Err(Error::DerivativeZero);
    }
    d.truncate(order + 1);
    Series::new(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    Ordinary,
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Numeric,
}

/// JSON document form of a series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub kind: CoeffKind,
    pub values: Vec<Scalar>,
    pub mode: ModeName,
}

impl SeriesDoc {
    /// Reads the document into a series, converting values into `mode`'s
    /// field (`bits` applies to numeric documents).
    pub fn to_series(&self, bits: u32) -> Result<Series> {
        let mode = match self.mode {
            ModeName::Exact => Mode::Exact,
            ModeName::Numeric => Mode::Numeric(bits),
        };
        let values = self.values.iter().map(|v| v.to_mode(mode)).collect::<Result<Vec<_>>>()?;
        match self.kind {
            CoeffKind::Ordinary => Series::new(values),
            CoeffKind::Exponential => Series::from_exponential(values),
        }
    }

    pub fn from_series(series: &Series, kind: CoeffKind) -> SeriesDoc {
        let values = match kind {
            CoeffKind::Ordinary => series.coeffs.clone(),
            CoeffKind::Exponential => series.exponential_coeffs(),
        };
        let mode = if series.mode().is_exact() { ModeName::Exact } else { ModeName::Numeric };
        SeriesDoc { kind, values, mode }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: &[i64]) -> Series {
        Series::new(v.iter().map(|&x| Scalar::from_i64(Mode::Exact, x)).collect()).unwrap()
    }

    #[test]
    fn compose_geometric_doubles() {
        let f = Series::preset("geometric", 6, Mode::Exact).unwrap();
        let g = compose(&f, &f, 6).unwrap();
        assert_eq!(g, ex(&[0, 1, 2, 4, 8, 16, 32]));
    }

    #[test]
    fn compose_with_identity() {
        let f = ex(&[0, 2, -1, 3, 5]);
        let x = Series::identity(Mode::Exact, 4);
        assert_eq!(compose(&f, &x, 4).unwrap(), f);
        assert_eq!(compose(&x, &f, 4).unwrap(), f);
    }

    #[test]
    fn compose_quad_with_itself() {
        let f = ex(&[0, 1, 1, 0, 0]);
        assert_eq!(compose(&f, &f, 4).unwrap(), ex(&[0, 1, 2, 2, 1]));
    }

    #[test]
    fn compose_rejects_constant_term() {
        let f = ex(&[0, 1, 1]);
        let g = ex(&[1, 1, 0]);
        assert_eq!(compose(&f, &g, 2), Err(Error::ConstantTermNonzero));
    }

    #[test]
    fn inverse_of_geometric_alternates() {
        let f = Series::preset("geometric", 7, Mode::Exact).unwrap();
        let g = comp_inverse(&f, 7).unwrap();
        assert_eq!(g, ex(&[0, 1, -1, 1, -1, 1, -1, 1]));
        assert_eq!(compose(&f, &g, 7).unwrap(), Series::identity(Mode::Exact, 7));
    }

    #[test]
    fn inverse_linear_and_identity() {
        let f = Series::preset("linear(3)", 4, Mode::Exact).unwrap();
        let g = comp_inverse(&f, 4).unwrap();
        assert_eq!(g.coeff(1), Scalar::ratio(1, 3));
        assert!(g.coeffs()[2..].iter().all(Scalar::is_zero));
        let x = Series::identity(Mode::Exact, 5);
        assert_eq!(comp_inverse(&x, 5).unwrap(), x);
        assert_eq!(comp_inverse(&ex(&[0, 0, 1]), 2), Err(Error::NotInvertible));
        assert_eq!(comp_inverse(&ex(&[1, 1, 1]), 2), Err(Error::NotInvertible));
    }

    #[test]
    fn shift_square_to_fixed_point_one() {
        let f = ex(&[0, 0, 1]);
        let g = shift_fixed_point(&f, &Scalar::from_i64(Mode::Exact, 1), 2).unwrap();
        assert_eq!(g, ex(&[0, 2, 1]));
    }

    #[test]
    fn shift_zero_is_identity() {
        let f = ex(&[0, 3, -2, 1]);
        let g = shift_fixed_point(&f, &Scalar::zero(Mode::Exact), 3).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn shift_errors() {
        let f = ex(&[0, 2, -1]);
        let one = Scalar::from_i64(Mode::Exact, 1);
        assert_eq!(shift_fixed_point(&f, &one, 2), Err(Error::DerivativeZero));
        let two = Scalar::from_i64(Mode::Exact, 2);
        assert_eq!(shift_fixed_point(&f, &two, 2), Err(Error::NotFixedPoint));
    }

    #[test]
    fn shift_round_trip() {
        // 3x - 2x^2 fixes 0 and 1 with nonzero slope at both.
        let f = ex(&[0, 3, -2]);
        let a = Scalar::from_i64(Mode::Exact, 1);
        let g = shift_fixed_point(&f, &a, 2).unwrap();
        assert_eq!(g, ex(&[0, -1, -2]));
        assert_eq!(shift_fixed_point(&g, &-&a, 2).unwrap(), f);
    }

    #[test]
    fn exponential_conversion() {
        let ord: Vec<Scalar> = [1, 1, 1].iter().map(|&v| Scalar::from_i64(Mode::Exact, v)).collect();
        let exp = exp_ord_convert(&ord, Direction::OrdToExp);
        assert_eq!(exp, [1, 1, 2].map(|v| Scalar::from_i64(Mode::Exact, v)));
        assert_eq!(exp_ord_convert(&exp, Direction::ExpToOrd), ord);
        let zeros = vec![Scalar::zero(Mode::Exact); 3];
        assert_eq!(exp_ord_convert(&zeros, Direction::OrdToExp), zeros);
    }

    #[test]
    fn presets_and_cap() {
        let m = Series::preset("moebius(4)", 3, Mode::Exact).unwrap();
        assert_eq!(m, ex(&[0, 4, 4, 4]));
        assert_eq!(Series::preset("quad", 3, Mode::Exact).unwrap(), ex(&[0, 1, 1, 0]));
        assert!(Series::preset("nope", 3, Mode::Exact).is_err());
        assert_eq!(Series::preset("quad", 41, Mode::Exact), Err(Error::OrderTooLarge(41)));
    }

    #[test]
    fn json_document() {
        let doc: SeriesDoc = serde_json::from_str(
            r#"{"kind": "exponential", "values": ["0", "1", "2", "6"], "mode": "exact"}"#,
        )
        .unwrap();
        let s = doc.to_series(128).unwrap();
        assert_eq!(s, ex(&[0, 1, 1, 1]));
        let text = serde_json::to_string(&SeriesDoc::from_series(&s, CoeffKind::Ordinary)).unwrap();
        assert_eq!(text, r#"{"kind":"ordinary","values":["0","1","1","1"],"mode":"exact"}"#);
    }
}
