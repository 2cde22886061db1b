//! Coefficient triangles `[n k]_{phi^s}` of iterates `f^s`, by each of the
//! discrete and fractional formulas, plus method dispatch.
//!
//! Every method returns the full triangle for `0 <= k <= n <= N`. Column `1`
//! holds the exponential coefficients of `f^s`.

mod discrete;
mod qforms;
mod umbral;
mod unitary;

use std::fmt;
use std::str::FromStr;

pub use discrete::{iterate_bpp, iterate_bpp_polys, iterate_discrete_matrix, iterate_monkam};
pub use qforms::{iterate_qschroder, iterate_tambs, TambsVariant};
pub use umbral::{
    basic_sequence, delta_operator_apply, generator_exp, generator_matrix, umbral_apply,
};
pub use unitary::{iterate_jabotinsky, iterate_schroder, JabotinskyVariant};

use crate::error::{Error, Result};
use crate::qcalc::QContext;
use crate::scalar::{is_unit, Exponent, Mode, Scalar, UNIT_BAND};
use crate::series::{check_order, comp_inverse, Series};
use crate::triangle::{chain_layers, phi_triangle, triangle_product, CoeffTriangle};

/// Which formula computes the triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Matrix,
    Monkam,
    Bpp,
    Schroder,
    Jabotinsky,
    JabotinskyAlternating,
    Extracted,
    QSchroder,
    Tambs,
    Lavoie,
    QExtracted,
    /// Matrix for integer `s`, Jabotinsky for fractional `s` with `q = 1`,
    /// Tambs otherwise.
    Auto,
}

impl Method {
    /// Every concrete method, in a fixed order.
    pub const ALL: [Method; 11] = [
        Method::Matrix,
        Method::Monkam,
        Method::Bpp,
        Method::Schroder,
        Method::Jabotinsky,
        Method::JabotinskyAlternating,
        Method::Extracted,
        Method::QSchroder,
        Method::Tambs,
        Method::Lavoie,
        Method::QExtracted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Matrix => "matrix",
            Method::Monkam => "monkam",
            Method::Bpp => "bpp",
            Method::Schroder => "schroder",
            Method::Jabotinsky => "jabotinsky",
            Method::JabotinskyAlternating => "jabotinsky-alt",
            Method::Extracted => "extracted",
            Method::QSchroder => "qschroder",
            Method::Tambs => "tambs",
            Method::Lavoie => "lavoie",
            Method::QExtracted => "qextracted",
            Method::Auto => "auto",
        }
    }

    /// Whether the method needs a nonnegative integer exponent.
    pub fn integer_only(self) -> bool {
        matches!(self, Method::Matrix | Method::Monkam | Method::Bpp)
    }

    /// Whether the method needs `f'(0) = 1`.
    pub fn unitary_only(self) -> bool {
        matches!(
            self,
            Method::Schroder | Method::Jabotinsky | Method::JabotinskyAlternating | Method::Extracted
        )
    }

    /// Whether the inputs meet the method's preconditions on `q` and `s`.
    /// Poles of the extracted forms are not predicted here.
    pub fn applicable(self, q: &Scalar, s: &Exponent) -> bool {
        if self.integer_only() && !s.as_int().is_some_and(|v| v >= 0) {
            return false;
        }
        !(self.unitary_only() && !is_unit(q))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(text: &str) -> Result<Method> {
        let t = text.trim().to_ascii_lowercase();
        Method::ALL
            .iter()
            .chain(std::iter::once(&Method::Auto))
            .find(|m| m.name() == t)
            .copied()
            .ok_or_else(|| Error::Parse(format!("method {text:?}")))
    }
}

/// A complete iteration query.
#[derive(Clone, Debug)]
pub struct IterateRequest {
    pub f: Series,
    pub s: Exponent,
    pub order: usize,
    pub method: Method,
}

impl IterateRequest {
    pub fn run(&self) -> Result<CoeffTriangle> {
        iterate(&self.f, &self.s, self.order, self.method)
    }
}

/// Triangle of `phi^s` up to row `order` by the chosen method.
pub fn iterate(f: &Series, s: &Exponent, order: usize, method: Method) -> Result<CoeffTriangle> {
    let int_s = || -> Result<i64> { s.as_int().ok_or(Error::IntegerExponentRequired) };
    match method {
        Method::Matrix => iterate_discrete_matrix(f, int_s()?, order),
        Method::Monkam => iterate_monkam(f, int_s()?, order),
        Method::Bpp => iterate_bpp(f, int_s()?, order),
        Method::Schroder => iterate_schroder(f, s, order),
        Method::Jabotinsky => iterate_jabotinsky(f, s, order, JabotinskyVariant::Standard),
        Method::JabotinskyAlternating => {
            iterate_jabotinsky(f, s, order, JabotinskyVariant::Alternating)
        }
        Method::Extracted => iterate_jabotinsky(f, s, order, JabotinskyVariant::Extracted),
        Method::QSchroder => iterate_qschroder(f, s, order),
        Method::Tambs => iterate_tambs(f, s, order, TambsVariant::Standard),
        Method::Lavoie => iterate_tambs(f, s, order, TambsVariant::Lavoie),
        Method::QExtracted => iterate_tambs(f, s, order, TambsVariant::QExtracted),
        Method::Auto => iterate_auto(f, s, order),
    }
}

fn iterate_auto(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    match s.as_int() {
        Some(v) if v >= 0 => iterate_discrete_matrix(f, v, order),
        Some(v) => {
            check_inputs(f, order)?;
            let g = comp_inverse(f, order)?;
            iterate_discrete_matrix(&g, -v, order)
        }
        None if is_unit(&f.q()) => iterate_jabotinsky(f, s, order, JabotinskyVariant::Standard),
        None => iterate_tambs(f, s, order, TambsVariant::Standard),
    }
}

/// The method [`Method::Auto`] picks for these inputs.
pub fn auto_method(q: &Scalar, s: &Exponent) -> Method {
    match s.as_int() {
        Some(_) => Method::Matrix,
        None if is_unit(q) => Method::Jabotinsky,
        None => Method::Tambs,
    }
}

pub(crate) fn check_inputs(f: &Series, order: usize) -> Result<()> {
    f.ensure_invertible()?;
    check_order(order)?;
    if order > f.order() {
        return Err(Error::BadRange(format!(
            "order {order} beyond the series order {}",
            f.order()
        )));
    }
    Ok(())
}

pub(crate) fn nonnegative(s: i64) -> Result<usize> {
    usize::try_from(s).map_err(|_| Error::NegativeExponent(s))
}

pub(crate) fn ensure_unitary(f: &Series) -> Result<()> {
    if is_unit(&f.q()) {
        Ok(())
    } else {
        Err(Error::UnitaryRequired)
    }
}

/// Whether a denominator is zero, or numerically below the unit band.
pub(crate) fn vanishes(v: &Scalar) -> bool {
    match v {
        Scalar::Exact(_) => v.is_zero(),
        Scalar::Numeric(_) => v.abs_f64() < UNIT_BAND,
    }
}

/// `[I, phi, phi^2, ..., phi^max_p]` by repeated triangle products.
pub fn discrete_powers(phi: &CoeffTriangle, max_p: usize) -> Result<Vec<CoeffTriangle>> {
    let mut out = vec![CoeffTriangle::identity(phi.size(), phi.mode())];
    for p in 1..=max_p {
        let next = triangle_product(&out[p - 1], phi)?;
        out.push(next);
    }
    Ok(out)
}

/// Table whose entry `[n k]` in layer `p` is `sum over chains
/// k = j_0 .. j_p = n of prod factor(i, k, j_i, j_{i+1})`, for
/// `p = 0..=size`.
fn chain_table<F>(size: usize, mode: Mode, strict: bool, factor: F) -> Vec<CoeffTriangle>
where
    F: Fn(usize, usize, usize, usize) -> Scalar,
{
    let mut out = vec![CoeffTriangle::zero(size, mode); size + 1];
    for k in 0..=size {
        let layers = chain_layers(k, size, size, strict, mode, |i, j, jn| factor(i, k, j, jn));
        for (p, layer) in layers.iter().enumerate() {
            for n in k..=size {
                if !layer[n].is_zero() {
                    out[p].set(n, k, layer[n].clone());
                }
            }
        }
    }
    out
}

/// Triangles of `(phi - 1)^p` for `p = 0..=size`. With `strict` the sum runs
/// over strictly increasing chains only, which is exact when `q = 1`; the
/// weak form keeps the diagonal factors `[j j] - 1 = q^j - 1`.
pub fn phi_minus_one_powers(phi: &CoeffTriangle, strict: bool) -> Vec<CoeffTriangle> {
    let size = phi.size();
    let mode = phi.mode();
    chain_table(size, mode, strict, |_, _, j, jn| {
        let v = phi.get(jn, j);
        if j == jn {
            v - Scalar::one(mode)
        } else {
            v
        }
    })
}

/// Tables of the q-Pochhammer coefficients `[n k]_{(phi, -q^k)_q^p}` for
/// `p = 0..=size`, where `(phi, -c)_q^p = prod_{i<p} (phi - q^i c)`. Each
/// chain step `i` contributes `[j' j]_phi - q^{i+k} delta_{j' j}`.
pub fn q_pochhammer_tables(phi: &CoeffTriangle, ctx: &QContext) -> Vec<CoeffTriangle> {
    chain_table(phi.size(), phi.mode(), false, |i, k, j, jn| {
        let v = phi.get(jn, j);
        if j == jn {
            v - ctx.pow_i((i + k) as i64)
        } else {
            v
        }
    })
}

/// Ordinary coefficients `c_1..c_N` of `f^s`, read off column 1.
pub fn iterate_series(f: &Series, s: &Exponent, order: usize, method: Method) -> Result<Series> {
    Ok(iterate(f, s, order, method)?.to_series())
}

/// Runs `body` on `f` lifted to a working precision with guard bits for the
/// cancellation in the alternating sums, then rounds back.
pub(crate) fn guarded<F>(f: &Series, order: usize, body: F) -> Result<CoeffTriangle>
where
    F: FnOnce(&Series) -> Result<CoeffTriangle>,
{
    let Mode::Numeric(bits) = f.mode() else {
        return body(f);
    };
    let log2 = |v: f64| if v > 0.0 { v.log2().abs().ceil() as u32 } else { 0 };
    let big = f.coeffs().iter().map(Scalar::abs_f64).fold(1.0, f64::max);
    let n = order as u32;
    let extra = 64 + n * n * (1 + log2(f.q().abs_f64())) + n * log2(big);
    let work = f.to_mode(Mode::Numeric(bits + extra))?;
    body(&work)?.to_mode(Mode::Numeric(bits))
}

pub(crate) fn prepared(f: &Series, order: usize) -> Result<CoeffTriangle> {
    check_inputs(f, order)?;
    phi_triangle(f, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL.iter().chain(std::iter::once(&Method::Auto)) {
            assert_eq!(m.name().parse::<Method>().unwrap(), *m);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn applicability() {
        let one = Scalar::one(Mode::Exact);
        let two = Scalar::from_i64(Mode::Exact, 2);
        let half = Exponent::ratio(1, 2);
        assert!(Method::Schroder.applicable(&one, &half));
        assert!(!Method::Schroder.applicable(&two, &half));
        assert!(!Method::Matrix.applicable(&one, &half));
        assert!(!Method::Matrix.applicable(&one, &Exponent::Int(-1)));
        assert!(Method::Tambs.applicable(&two, &half));
        assert_eq!(auto_method(&two, &half), Method::Tambs);
        assert_eq!(auto_method(&one, &half), Method::Jabotinsky);
    }
}
