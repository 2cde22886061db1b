//! The iterative logarithm `itlog(f) = d/ds f^s` at `s = 0`.
//!
//! Coefficients are exponential: `itlog(f)(x) = sum_n e_n x^n / n!`. When
//! `q != 1` every `e_n` carries the common factor `log q`, which is kept
//! apart from the rational body so that exact inputs give exact bodies.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::iterate::{
    discrete_powers, iterate, phi_minus_one_powers, q_pochhammer_tables, Method,
};
use crate::qcalc::{q_binomial, q_pow_choose2, QContext};
use crate::scalar::{binomial_u, factorial, is_unit, Exponent, Mode, Scalar};
use crate::series::{check_order, Series};
use crate::triangle::phi_triangle;

/// Which expansion computes the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItlogForm {
    /// Sum over q-Pochhammer coefficients `[n 1]_{(phi, -q)_q^p}`.
    Pochhammer,
    /// Sum over discrete iterates `[n 1]_{phi^p}`.
    Discrete,
    /// The `q = 1` expansion over `[n 1]_{(phi - 1)^p}`.
    Classical,
}

impl ItlogForm {
    pub const ALL: [ItlogForm; 3] = [ItlogForm::Pochhammer, ItlogForm::Discrete, ItlogForm::Classical];

    pub fn name(self) -> &'static str {
        match self {
            ItlogForm::Pochhammer => "pochhammer",
            ItlogForm::Discrete => "discrete",
            ItlogForm::Classical => "classical",
        }
    }
}

impl fmt::Display for ItlogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ItlogForm {
    type Err = Error;

    fn from_str(text: &str) -> Result<ItlogForm> {
        let t = text.trim().to_ascii_lowercase();
        ItlogForm::ALL
            .into_iter()
            .find(|f| f.name() == t)
            .ok_or_else(|| Error::Parse(format!("itlog form {text:?}")))
    }
}

/// Common factor of all coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    One,
    /// `log q` for the contained `q`.
    LogQ(Scalar),
}

impl Multiplier {
    /// The factor as a number; fails for `log q` with exact rational `q != 1`.
    pub fn value(&self, mode: Mode) -> Result<Scalar> {
        match self {
            Multiplier::One => Ok(Scalar::one(mode)),
            Multiplier::LogQ(q) => match q {
                Scalar::Numeric(_) => q.ln(),
                Scalar::Exact(_) => Err(Error::ExactInfeasible(format!("log({q})"))),
            },
        }
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplier::One => f.write_str("1"),
            Multiplier::LogQ(q) => write!(f, "log({q})"),
        }
    }
}

impl Serialize for Multiplier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `e_n = multiplier * body[n - 1]` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItlogResult {
    pub multiplier: Multiplier,
    pub body: Vec<Scalar>,
}

impl ItlogResult {
    pub fn mode(&self) -> Mode {
        self.body.first().map_or(Mode::Exact, Scalar::mode)
    }

    /// Exponential coefficients `e_1..e_N` with the multiplier applied.
    pub fn coefficients(&self) -> Result<Vec<Scalar>> {
        let m = self.multiplier.value(self.mode())?;
        Ok(self.body.iter().map(|b| b * &m).collect())
    }

    /// Ordinary coefficients `e_n / n!` with the multiplier applied.
    pub fn ordinary(&self) -> Result<Vec<Scalar>> {
        let mode = self.mode();
        Ok(self
            .coefficients()?
            .into_iter()
            .enumerate()
            .map(|(i, e)| e / Scalar::from_integer(mode, factorial(i as u32 + 1)))
            .collect())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.body.iter().position(|b| !b.is_zero()).map(|i| i + 1)
    }
}

fn sign(mode: Mode, p: usize) -> Scalar {
    if p % 2 == 1 {
        Scalar::one(mode)
    } else {
        -Scalar::one(mode)
    }
}

/// Exponential coefficients of `itlog(f)` through `order`.
///
/// For `q = 1` (or numerically within the unit band) the Pochhammer and
/// Discrete forms reduce to their classical limits; Classical requires
/// that regime.
pub fn itlog(f: &Series, order: usize, form: ItlogForm) -> Result<ItlogResult> {
    f.ensure_invertible()?;
    check_order(order)?;
    if order > f.order() {
        return Err(Error::BadRange(format!("order {order} beyond the series order {}", f.order())));
    }
    let mode = f.mode();
    let q = f.q();
    let phi = phi_triangle(f, order)?;
    let int = |v: u64| Scalar::from_i64(mode, v as i64);

    if is_unit(&q) {
        let mut body = vec![Scalar::zero(mode); order];
        if order >= 1 && !q.is_one() {
            body[0] = q.ln()?;
        }
        match form {
            ItlogForm::Classical | ItlogForm::Pochhammer => {
                let tables = phi_minus_one_powers(&phi, false);
                for n in 2..=order {
                    let mut acc = Scalar::zero(mode);
                    for p in 1..n {
                        acc += &(sign(mode, p) * tables[p].entry(n, 1) / int(p as u64));
                    }
                    body[n - 1] = acc;
                }
            }
            ItlogForm::Discrete => {
                let powers = discrete_powers(&phi, order)?;
                for n in 2..=order {
                    let mut acc = Scalar::zero(mode);
                    for p in 1..n {
                        let c = Scalar::from_integer(mode, binomial_u(n as u32 - 1, p as u32));
                        acc += &(sign(mode, p) * c * powers[p].entry(n, 1) / int(p as u64));
                    }
                    body[n - 1] = acc;
                }
            }
        }
        return Ok(ItlogResult { multiplier: Multiplier::One, body });
    }

    if form == ItlogForm::Classical {
        return Err(Error::UnitaryRequired);
    }
    let ctx = QContext::new(q.clone())?;
    ctx.check_nondegenerate(order)?;
    let scale = (&q - &ctx.one()).inv()?;
    let mut body = vec![Scalar::zero(mode); order];
    if order >= 1 {
        body[0] = ctx.one();
    }
    match form {
        ItlogForm::Pochhammer => {
            let tables = q_pochhammer_tables(&phi, &ctx);
            for n in 2..=order {
                let mut acc = ctx.zero();
                for p in 1..n {
                    let w = sign(mode, p) * q_pow_choose2(p as i64 + 1, &ctx).inv()?
                        / ctx.q_int(p as i64);
                    acc += &(w * tables[p].entry(n, 1));
                }
                body[n - 1] = acc * &scale;
            }
        }
        ItlogForm::Discrete => {
            let powers = discrete_powers(&phi, order)?;
            for n in 2..=order {
                let mut acc = ctx.zero();
                for p in 1..n {
                    let e = (p * (p + 1) / 2) as i64 - (p * n) as i64;
                    let w = sign(mode, p)
                        * q_binomial(&Exponent::Int(n as i64 - 1), p, &ctx)?
                        * ctx.pow_i(e)
                        / ctx.q_int(p as i64);
                    acc += &(w * powers[p].entry(n, 1));
                }
                body[n - 1] = acc * &scale;
            }
        }
        ItlogForm::Classical => unreachable!("rejected above"),
    }
    Ok(ItlogResult { multiplier: Multiplier::LogQ(q), body })
}

/// The form used when none is requested: Classical for `q = 1`, Discrete
/// otherwise.
pub fn default_form(q: &Scalar) -> ItlogForm {
    if is_unit(q) {
        ItlogForm::Classical
    } else {
        ItlogForm::Discrete
    }
}

/// `max_n |e_n - ([n 1]_{phi^h} - [n 1]_{phi^0}) / h|` for `n <= order`,
/// which shrinks linearly with `h`.
pub fn itlog_fd_check(f: &Series, h: &Scalar, order: usize) -> Result<f64> {
    let Scalar::Numeric(hc) = h else {
        return Err(Error::NumericRequired);
    };
    if f.mode().is_exact() {
        return Err(Error::NumericRequired);
    }
    let e = itlog(f, order, default_form(&f.q()))?.coefficients()?;
    let fh = iterate(f, &Exponent::Num(hc.clone()), order, Method::Auto)?;
    let mut worst = 0.0f64;
    for n in 1..=order {
        let mut diff = fh.get(n, 1);
        if n == 1 {
            diff -= &Scalar::one(f.mode());
        }
        let quotient = diff / h;
        worst = worst.max((&e[n - 1] - &quotient).abs_f64());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    #[test]
    fn geometric_gives_square() {
        let geo = Series::preset("geometric", 10, Mode::Exact).unwrap();
        for form in ItlogForm::ALL {
            let r = itlog(&geo, 10, form).unwrap();
            assert_eq!(r.multiplier, Multiplier::One);
            let ord = r.ordinary().unwrap();
            assert_eq!(ord[1], ex(1), "{form}");
            assert!(ord.iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()), "{form}");
            assert_eq!(r.valuation(), Some(2));
        }
    }

    #[test]
    fn linear_gives_log() {
        let f = Series::preset("linear(3)", 6, Mode::Exact).unwrap();
        let r = itlog(&f, 6, ItlogForm::Pochhammer).unwrap();
        assert_eq!(r.multiplier, Multiplier::LogQ(ex(3)));
        assert_eq!(r.body, vec![ex(1), ex(0), ex(0), ex(0), ex(0), ex(0)]);
        assert!(matches!(r.coefficients(), Err(Error::ExactInfeasible(_))));
        assert_eq!(itlog(&f, 6, ItlogForm::Classical), Err(Error::UnitaryRequired));
    }

    #[test]
    fn moebius_second_coefficient() {
        let q = Scalar::ratio(5, 2);
        let f = Series::preset("moebius(5/2)", 6, Mode::Exact).unwrap();
        let a = itlog(&f, 6, ItlogForm::Pochhammer).unwrap();
        let b = itlog(&f, 6, ItlogForm::Discrete).unwrap();
        assert_eq!(a, b);
        // x log q + x^2 log q / (q - 1): e_2 = 2 log q / (q - 1)
        assert_eq!(a.body[1], ex(2) / (q - ex(1)));
    }

    #[test]
    fn forms_agree() {
        for q in [ex(2), Scalar::ratio(1, 3), ex(-2)] {
            let f = Series::new(vec![ex(0), q, ex(1), Scalar::ratio(-1, 2), ex(3), ex(0), ex(-2), ex(1)])
                .unwrap();
            assert_eq!(
                itlog(&f, 7, ItlogForm::Pochhammer).unwrap(),
                itlog(&f, 7, ItlogForm::Discrete).unwrap()
            );
        }
    }

    #[test]
    fn finite_difference() {
        let mode = Mode::Numeric(128);
        let geo = Series::preset("geometric", 6, mode).unwrap();
        let h = Scalar::complex(128, 1e-6, 0.0);
        assert!(itlog_fd_check(&geo, &h, 6).unwrap() < 1e-5);
        let lin = Series::preset("linear(2)", 3, mode).unwrap();
        let d = itlog_fd_check(&lin, &h, 3).unwrap();
        assert!(d > 0.0 && d < 1e-6);
    }
}
