//! Field elements in two modes, iteration exponents, and the q-power and
//! q-number primitives.
//!
//! A [`Scalar`] is either an exact rational or a complex number with a fixed
//! binary precision. The two modes never mix: arithmetic operators panic on a
//! mode mismatch, and every public entry point that accepts several scalars
//! checks them up front with [`ensure_same_mode`] so that callers see
//! [`Error::ModeMismatch`] instead.
//!
//! Numeric powers and logarithms use the principal branch.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default mantissa width of numeric scalars.
pub const DEFAULT_BITS: u32 = 128;

/// Default relative tolerance for numeric comparisons at [`DEFAULT_BITS`].
pub const DEFAULT_REL_TOL: f64 = 1e-25;

/// Numeric `q` with `|q - 1|` below this is treated as the unitary regime.
pub const UNIT_BAND: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    /// Complex floating point with the given mantissa bits.
    Numeric(u32),
}

impl Mode {
    pub fn numeric() -> Mode {
        Mode::Numeric(DEFAULT_BITS)
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }

    /// Same kind of field; numeric precisions may differ.
    pub fn compatible(self, other: Mode) -> bool {
        self.is_exact() == other.is_exact()
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Numeric(_) => f.write_str("numeric"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Numeric(Complex),
}

pub fn ensure_same_mode<'a, I>(items: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Scalar>,
{
    let mut seen: Option<Mode> = None;
    for s in items {
        match seen {
            None => seen = Some(s.mode()),
            Some(m) if !m.compatible(s.mode()) => return Err(Error::ModeMismatch),
            _ => {}
        }
    }
    Ok(())
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

pub fn binomial_u(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_i64(mode, 0)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_i64(mode, 1)
    }

    pub fn from_i64(mode: Mode, v: i64) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::from(v)),
            Mode::Numeric(bits) => Scalar::Numeric(Complex::with_val(bits, v)),
        }
    }

    pub fn from_integer(mode: Mode, v: Integer) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::from(v)),
            Mode::Numeric(bits) => Scalar::Numeric(Complex::with_val(bits, &v)),
        }
    }

    pub fn from_rational(mode: Mode, v: Rational) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(v),
            Mode::Numeric(bits) => Scalar::Numeric(Complex::with_val(bits, &v)),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Exact(Rational::from((num, den)))
    }

    pub fn complex(bits: u32, re: f64, im: f64) -> Scalar {
        Scalar::Numeric(Complex::with_val(bits, (re, im)))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Numeric(c) => Mode::Numeric(c.prec().0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.cmp0().is_eq(),
            Scalar::Numeric(c) => c.real().is_zero() && c.imag().is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => *r == 1,
            Scalar::Numeric(c) => *c.real() == 1 && c.imag().is_zero(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Numeric(_) => None,
        }
    }

    /// Converts into `mode`. Numeric values never convert to exact.
    pub fn to_mode(&self, mode: Mode) -> Result<Scalar> {
        match (self, mode) {
            (Scalar::Exact(r), m) => Ok(Scalar::from_rational(m, r.clone())),
            (Scalar::Numeric(c), Mode::Numeric(bits)) => {
                Ok(Scalar::Numeric(Complex::with_val(bits, c)))
            }
            (Scalar::Numeric(_), Mode::Exact) => Err(Error::ExactInfeasible(self.to_string())),
        }
    }

    pub fn to_complex(&self, bits: u32) -> Complex {
        match self {
            Scalar::Exact(r) => Complex::with_val(bits, r),
            Scalar::Numeric(c) => Complex::with_val(bits, c),
        }
    }

    /// Modulus as a float (exact values are rounded to 128 bits).
    pub fn abs_float(&self) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(DEFAULT_BITS, r).abs(),
            Scalar::Numeric(c) => Float::with_val(c.prec().0, c.abs_ref()),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs_float().to_f64()
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone().recip()),
            Scalar::Numeric(c) => Scalar::Numeric(c.clone().recip()),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        ensure_same_mode([self, rhs])?;
        Ok(self * &rhs.inv()?)
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        ensure_same_mode([self, rhs])?;
        Ok(self + rhs)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        ensure_same_mode([self, rhs])?;
        Ok(self * rhs)
    }

    /// Nonnegative integer power; `0^0 = 1`.
    pub fn pow_u(&self, e: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Rational::from(r.pow(e))),
            Scalar::Numeric(c) => {
                Scalar::Numeric(Complex::with_val(c.prec().0, c.pow(e)))
            }
        }
    }

    /// Principal logarithm; numeric only.
    pub fn ln(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(_) => Err(Error::ExactInfeasible(format!("log({self})"))),
            Scalar::Numeric(c) => {
                if self.is_zero() {
                    return Err(Error::ZeroBase);
                }
                Ok(Scalar::Numeric(c.clone().ln()))
            }
        }
    }

    pub fn exp(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(r) if r.cmp0().is_eq() => Ok(Scalar::one(Mode::Exact)),
            Scalar::Exact(_) => Err(Error::ExactInfeasible(format!("exp({self})"))),
            Scalar::Numeric(c) => Ok(Scalar::Numeric(c.clone().exp())),
        }
    }

    /// `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn rel_dev(a: &Scalar, b: &Scalar) -> f64 {
        let scale = {
            let (x, y) = (a.abs_float(), b.abs_float());
            if x > y {
                x
            } else {
                y
            }
        };
        if scale.is_zero() {
            return 0.0;
        }
        let diff = match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => {
                Float::with_val(DEFAULT_BITS, &Rational::from(x - y)).abs()
            }
            _ => {
                let bits = a.mode_bits().max(b.mode_bits());
                let d = Complex::with_val(bits, a.to_complex(bits) - b.to_complex(bits));
                Float::with_val(bits, d.abs_ref())
            }
        };
        Float::with_val(DEFAULT_BITS, diff / scale).to_f64()
    }

    pub fn approx_eq(a: &Scalar, b: &Scalar, rel_tol: f64) -> bool {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
            _ => Scalar::rel_dev(a, b) <= rel_tol,
        }
    }

    fn mode_bits(&self) -> u32 {
        match self {
            Scalar::Exact(_) => DEFAULT_BITS,
            Scalar::Numeric(c) => c.prec().0,
        }
    }

    /// Parses `p`, `p/q`, decimals (`-0.25`, `1e-3`) and, in numeric mode,
    /// complex literals such as `0.7+0.1i`, `2i` or `-i`.
    pub fn parse(text: &str, mode: Mode) -> Result<Scalar> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse(format!("scalar {text:?}")));
        }
        if let Some(r) = parse_real_rational(&t) {
            return Ok(Scalar::from_rational(mode, r));
        }
        let bits = match mode {
            Mode::Exact => {
                return Err(Error::Parse(format!("exact scalar {text:?}")));
            }
            Mode::Numeric(bits) => bits,
        };
        let (re, im) = split_complex(&t).ok_or_else(|| Error::Parse(format!("scalar {text:?}")))?;
        let re = parse_float(re, bits)?;
        let im = parse_float(im, bits)?;
        Ok(Scalar::Numeric(Complex::with_val(bits, (re, im))))
    }
}

fn parse_float(s: &str, bits: u32) -> Result<Float> {
    if let Some(r) = parse_real_rational(s) {
        return Ok(Float::with_val(bits, &r));
    }
    Float::parse(s)
        .map(|p| Float::with_val(bits, p))
        .map_err(|_| Error::Parse(format!("number {s:?}")))
}

/// Integer, fraction, or finite decimal (optionally with exponent) as an
/// exact rational.
pub(crate) fn parse_real_rational(s: &str) -> Option<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: Integer = n.parse().ok()?;
        let d: Integer = d.parse().ok()?;
        if d.cmp0().is_eq() {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: Integer = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from(10);
    let mut r = Rational::from(all) * ten.pow(scale);
    if neg {
        r = -r;
    }
    Some(r)
}

fn split_complex(t: &str) -> Option<(&str, &str)> {
    let Some(body) = t.strip_suffix('i') else {
        return Some((t, "0"));
    };
    let bytes = body.as_bytes();
    let mut cut = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            cut = Some(i);
            break;
        }
    }
    let (re, im) = match cut {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Some((re, im))
}

fn float_text(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}

impl Scalar {
    /// Real and imaginary parts as decimal strings (numeric only).
    pub fn parts_text(&self) -> Option<(String, String)> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Numeric(c) => Some((float_text(c.real()), float_text(c.imag()))),
        }
    }

    /// Short human-readable rendering with `digits` significant digits.
    pub fn display_short(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(r) => r.to_string(),
            Scalar::Numeric(c) => {
                let re = c.real().to_f64();
                let im = c.imag().to_f64();
                if im == 0.0 {
                    format!("{re:.digits$e}")
                } else {
                    format!("{re:.digits$e}{im:+.digits$e}i")
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Numeric(c) => {
                let re = float_text(c.real());
                if c.imag().is_zero() {
                    f.write_str(&re)
                } else {
                    let im = float_text(c.imag());
                    if im.starts_with('-') {
                        write!(f, "{re}{im}i")
                    } else {
                        write!(f, "{re}+{im}i")
                    }
                }
            }
        }
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct NumericRepr {
    re: String,
    im: String,
    bits: u32,
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Numeric(NumericRepr),
}

/// Exact scalars serialize as `"p/q"` strings, numeric ones as
/// `{"re": .., "im": .., "bits": ..}`.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Numeric(c) => {
                let (re, im) = self.parts_text().expect("numeric");
                NumericRepr { re, im, bits: c.prec().0 }.serialize(serializer)
            }
        }
    }
}

/// Strings parse as exact when they denote a rational, otherwise as a
/// numeric literal at [`DEFAULT_BITS`].
impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Text(t) => Scalar::parse(&t, Mode::Exact)
                .or_else(|_| Scalar::parse(&t, Mode::numeric()))
                .map_err(D::Error::custom),
            ScalarRepr::Numeric(n) => {
                let re = parse_float(&n.re, n.bits).map_err(D::Error::custom)?;
                let im = parse_float(&n.im, n.bits).map_err(D::Error::custom)?;
                Ok(Scalar::Numeric(Complex::with_val(n.bits, (re, im))))
            }
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $op:tt) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a $op b)),
                    (Scalar::Numeric(a), Scalar::Numeric(b)) => {
                        let bits = a.prec().0.max(b.prec().0);
                        Scalar::Numeric(Complex::with_val(bits, a $op b))
                    }
                    _ => panic!("scalar mode mismatch"),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
        impl<'a> $assign_trait<&'a Scalar> for Scalar {
            fn $assign_method(&mut self, rhs: &'a Scalar) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $assign_trait<Scalar> for Scalar {
            fn $assign_method(&mut self, rhs: Scalar) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

scalar_binop!(Add, add, AddAssign, add_assign, +);
scalar_binop!(Sub, sub, SubAssign, sub_assign, -);
scalar_binop!(Mul, mul, MulAssign, mul_assign, *);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a / b)),
            (Scalar::Numeric(a), Scalar::Numeric(b)) => {
                let bits = a.prec().0.max(b.prec().0);
                Scalar::Numeric(Complex::with_val(bits, a / b))
            }
            _ => panic!("scalar mode mismatch"),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        &self / rhs
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Numeric(a) => Scalar::Numeric(-a),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Option<Scalar> {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Option<Scalar> {
        iter.fold(None, |acc, x| match acc {
            None => Some(x.clone()),
            Some(a) => Some(a + x),
        })
    }
}

/// Iteration exponent `s`.
#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Int(i64),
    /// Non-integral exact rational (integral values normalize to `Int`).
    Rat(Rational),
    Num(Complex),
}

impl Exponent {
    pub fn from_rational(r: Rational) -> Exponent {
        if *r.denom() == 1 {
            if let Some(v) = r.numer().to_i64() {
                return Exponent::Int(v);
            }
        }
        Exponent::Rat(r)
    }

    pub fn ratio(num: i64, den: i64) -> Exponent {
        Exponent::from_rational(Rational::from((num, den)))
    }

    pub fn numeric(bits: u32, re: f64, im: f64) -> Exponent {
        Exponent::Num(Complex::with_val(bits, (re, im)))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Exponent::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Exponent::Num(_))
    }

    /// `self + delta`.
    pub fn offset(&self, delta: i64) -> Exponent {
        match self {
            Exponent::Int(v) => Exponent::Int(v + delta),
            Exponent::Rat(r) => Exponent::from_rational(Rational::from(r + delta)),
            Exponent::Num(z) => Exponent::Num(Complex::with_val(z.prec().0, z + delta)),
        }
    }

    pub fn negated(&self) -> Exponent {
        match self {
            Exponent::Int(v) => Exponent::Int(-v),
            Exponent::Rat(r) => Exponent::Rat(Rational::from(-r)),
            Exponent::Num(z) => Exponent::Num(Complex::with_val(z.prec().0, -z)),
        }
    }

    pub fn scaled(&self, factor: i64) -> Exponent {
        match self {
            Exponent::Int(v) => Exponent::Int(v * factor),
            Exponent::Rat(r) => Exponent::from_rational(Rational::from(r * factor)),
            Exponent::Num(z) => Exponent::Num(Complex::with_val(z.prec().0, z * factor)),
        }
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Int(a), b) | (b, Exponent::Int(a)) => b.offset(*a),
            (Exponent::Rat(a), Exponent::Rat(b)) => Exponent::from_rational(Rational::from(a + b)),
            (a, b) => {
                let bits = a.bits().max(b.bits());
                Exponent::Num(Complex::with_val(bits, a.to_complex(bits) + b.to_complex(bits)))
            }
        }
    }

    fn bits(&self) -> u32 {
        match self {
            Exponent::Num(z) => z.prec().0,
            _ => DEFAULT_BITS,
        }
    }

    pub fn to_complex(&self, bits: u32) -> Complex {
        match self {
            Exponent::Int(v) => Complex::with_val(bits, *v),
            Exponent::Rat(r) => Complex::with_val(bits, r),
            Exponent::Num(z) => Complex::with_val(bits, z),
        }
    }

    /// The exponent as a field element of `mode`.
    pub fn to_scalar(&self, mode: Mode) -> Result<Scalar> {
        match (self, mode) {
            (Exponent::Int(v), m) => Ok(Scalar::from_i64(m, *v)),
            (Exponent::Rat(r), m) => Ok(Scalar::from_rational(m, r.clone())),
            (Exponent::Num(z), Mode::Numeric(bits)) => Ok(Scalar::Numeric(Complex::with_val(bits, z))),
            (Exponent::Num(_), Mode::Exact) => Err(Error::ExactInfeasible(format!("exponent {self}"))),
        }
    }

    /// Accepts `3`, `-2`, `1/2`, `0.3`, `0.3+0i`, `0.5-0.25i`. Finite
    /// decimals and complex literals become numeric exponents.
    pub fn parse(text: &str, bits: u32) -> Result<Exponent> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let plain = !t.contains(['.', 'e', 'E', 'i']);
        if plain {
            if let Some(r) = parse_real_rational(&t) {
                return Ok(Exponent::from_rational(r));
            }
        }
        match Scalar::parse(&t, Mode::Numeric(bits)) {
            Ok(Scalar::Numeric(c)) => Ok(Exponent::Num(c)),
            _ => Err(Error::Parse(format!("exponent {text:?}"))),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Int(v) => write!(f, "{v}"),
            Exponent::Rat(r) => write!(f, "{r}"),
            Exponent::Num(z) => write!(f, "{}", Scalar::Numeric(z.clone())),
        }
    }
}

/// Whether `q^s` has an exact rational value under this crate's rules:
/// integer `s`, or `q = 1`.
pub fn exact_power_feasible(q: &Scalar, s: &Exponent) -> bool {
    match q {
        Scalar::Numeric(_) => true,
        Scalar::Exact(_) => s.as_int().is_some() || q.is_one(),
    }
}

/// `q^s`, principal branch `exp(s log q)` for non-integer `s`.
pub fn scalar_pow(q: &Scalar, s: &Exponent) -> Result<Scalar> {
    if q.is_zero() {
        return Err(Error::ZeroBase);
    }
    match q {
        Scalar::Exact(r) => match s {
            Exponent::Int(e) => {
                let e = i32::try_from(*e).map_err(|_| Error::BadRange(format!("exponent {e}")))?;
                Ok(Scalar::Exact(Rational::from(r.pow(e))))
            }
            _ if q.is_one() => Ok(Scalar::one(Mode::Exact)),
            _ => Err(Error::ExactInfeasible(format!("({q})^({s})"))),
        },
        Scalar::Numeric(c) => {
            let bits = c.prec().0;
            match s {
                Exponent::Int(e) => {
                    let e = i32::try_from(*e).map_err(|_| Error::BadRange(format!("exponent {e}")))?;
                    Ok(Scalar::Numeric(Complex::with_val(bits, c.pow(e))))
                }
                _ => {
                    let log = Complex::with_val(bits, c.ln_ref());
                    let z = s.to_complex(bits) * log;
                    Ok(Scalar::Numeric(z.exp()))
                }
            }
        }
    }
}

/// Generalized binomial coefficient `top (top-1) ... (top-p+1) / p!`.
pub fn binomial(top: &Scalar, p: u32) -> Scalar {
    let mode = top.mode();
    let mut acc = Scalar::one(mode);
    for l in 0..p {
        acc *= &(top - &Scalar::from_i64(mode, l as i64));
    }
    acc / Scalar::from_integer(mode, factorial(p))
}

fn near_unit(q: &Scalar) -> bool {
    match q {
        Scalar::Exact(_) => false,
        Scalar::Numeric(_) => {
            let d = q - &Scalar::one(q.mode());
            d.abs_f64() < UNIT_BAND
        }
    }
}

/// Whether `q` sits in the unitary regime: exactly one, or numerically
/// within [`UNIT_BAND`] of one.
pub fn is_unit(q: &Scalar) -> bool {
    q.is_one() || near_unit(q)
}

/// The q-number `[s]_q = (q^s - 1)/(q - 1)`, equal to `s` at `q = 1`.
pub fn q_number(s: &Exponent, q: &Scalar) -> Result<Scalar> {
    let mode = q.mode();
    if q.is_one() {
        return s.to_scalar(mode);
    }
    if near_unit(q) {
        // ((1+e)^s - 1)/e = sum_{m>=1} C(s, m) e^(m-1)
        let eps = q - &Scalar::one(mode);
        let top = s.to_scalar(mode)?;
        let mut acc = Scalar::zero(mode);
        let mut eps_pow = Scalar::one(mode);
        for m in 1..=4u32 {
            acc += &(binomial(&top, m) * &eps_pow);
            eps_pow *= &eps;
        }
        return Ok(acc);
    }
    let qs = scalar_pow(q, s)?;
    let one = Scalar::one(mode);
    Ok((qs - &one) / (q - &one))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, n)
    }

    #[test]
    fn integer_power() {
        assert_eq!(scalar_pow(&ex(2), &Exponent::Int(3)).unwrap(), ex(8));
        assert_eq!(scalar_pow(&ex(2), &Exponent::Int(-2)).unwrap(), Scalar::ratio(1, 4));
        assert_eq!(scalar_pow(&Scalar::ratio(2, 3), &Exponent::Int(0)).unwrap(), ex(1));
    }

    #[test]
    fn principal_square_root() {
        let four = Scalar::from_i64(Mode::numeric(), 4);
        let r = scalar_pow(&four, &Exponent::ratio(1, 2)).unwrap();
        assert!(Scalar::approx_eq(&r, &Scalar::from_i64(Mode::numeric(), 2), 1e-35));
        let minus_one = Scalar::from_i64(Mode::numeric(), -1);
        let i = scalar_pow(&minus_one, &Exponent::ratio(1, 2)).unwrap();
        assert!(Scalar::approx_eq(&i, &Scalar::complex(128, 0.0, 1.0), 1e-35));
    }

    #[test]
    fn power_errors() {
        assert_eq!(scalar_pow(&ex(0), &Exponent::Int(2)), Err(Error::ZeroBase));
        assert!(matches!(
            scalar_pow(&ex(2), &Exponent::ratio(1, 2)),
            Err(Error::ExactInfeasible(_))
        ));
        assert_eq!(scalar_pow(&ex(1), &Exponent::ratio(1, 2)).unwrap(), ex(1));
    }

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(&Exponent::Int(3), &ex(2)).unwrap(), ex(7));
        assert_eq!(q_number(&Exponent::Int(0), &Scalar::ratio(5, 7)).unwrap(), ex(0));
        assert_eq!(q_number(&Exponent::ratio(3, 4), &ex(1)).unwrap(), Scalar::ratio(3, 4));
        let four = Scalar::from_i64(Mode::numeric(), 4);
        let h = q_number(&Exponent::ratio(1, 2), &four).unwrap();
        let third = Scalar::from_rational(Mode::numeric(), Rational::from((1, 3)));
        assert!(Scalar::approx_eq(&h, &third, 1e-35));
    }

    #[test]
    fn q_number_geometric_identity() {
        for q in [Scalar::ratio(-3, 2), ex(2), Scalar::ratio(1, 3), ex(-1)] {
            for n in 0..8 {
                let lhs = q_number(&Exponent::Int(n), &q).unwrap() * (&q - &ex(1));
                let rhs = q.pow_u(n as u32) - ex(1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn q_number_near_unit_is_continuous() {
        let mode = Mode::numeric();
        let q = Scalar::parse("1.00000000000000000000000000000000001", mode).unwrap();
        let v = q_number(&Exponent::ratio(1, 2), &q).unwrap();
        assert!(Scalar::approx_eq(&v, &Scalar::parse("0.5", mode).unwrap(), 1e-30));
    }

    #[test]
    fn numeric_power_adds_exponents() {
        let q = Scalar::complex(128, 0.7, 0.1);
        let s = Exponent::numeric(128, 0.3, 0.0);
        let t = Exponent::numeric(128, 0.7, 0.2);
        let lhs = scalar_pow(&q, &s.add(&t)).unwrap();
        let rhs = scalar_pow(&q, &s).unwrap() * scalar_pow(&q, &t).unwrap();
        assert!(Scalar::approx_eq(&lhs, &rhs, DEFAULT_REL_TOL));
    }

    #[test]
    fn parsing() {
        assert_eq!(Scalar::parse("-3/6", Mode::Exact).unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::parse("0.25", Mode::Exact).unwrap(), Scalar::ratio(1, 4));
        assert_eq!(Scalar::parse("1e-2", Mode::Exact).unwrap(), Scalar::ratio(1, 100));
        assert!(Scalar::parse("1+i", Mode::Exact).is_err());
        let z = Scalar::parse("0.7+0.1i", Mode::numeric()).unwrap();
        assert!(Scalar::approx_eq(&z, &Scalar::complex(128, 0.7, 0.1), 1e-15));
        let w = Scalar::parse("-2.5e-1-3i", Mode::numeric()).unwrap();
        assert!(Scalar::approx_eq(&w, &Scalar::complex(128, -0.25, -3.0), 1e-30));
        assert_eq!(Exponent::parse("4/2", 128).unwrap(), Exponent::Int(2));
        assert_eq!(Exponent::parse("-2", 128).unwrap(), Exponent::Int(-2));
        assert_eq!(Exponent::parse("1/2", 128).unwrap(), Exponent::ratio(1, 2));
        assert!(Exponent::parse("0.3+0i", 128).unwrap().is_numeric());
    }

    #[test]
    fn mode_mismatch_rejected() {
        let a = ex(1);
        let b = Scalar::one(Mode::numeric());
        assert_eq!(a.checked_add(&b), Err(Error::ModeMismatch));
        assert_eq!(ensure_same_mode([&a, &b]), Err(Error::ModeMismatch));
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn operator_mismatch_panics() {
        let _ = ex(1) + Scalar::one(Mode::numeric());
    }

    #[test]
    fn json_forms() {
        let e = serde_json::to_string(&Scalar::ratio(-3, 6)).unwrap();
        assert_eq!(e, "\"-1/2\"");
        let z = Scalar::complex(64, 1.5, -2.0);
        let j = serde_json::to_value(&z).unwrap();
        assert_eq!(j["bits"], 64);
        let back: Scalar = serde_json::from_value(j).unwrap();
        assert_eq!(back, z);
        let q: Scalar = serde_json::from_str("\"7/3\"").unwrap();
        assert_eq!(q, Scalar::ratio(7, 3));
    }

    #[test]
    fn display_round_trips() {
        let z = Scalar::complex(128, 0.5, -0.25);
        let back = Scalar::parse(&z.to_string(), Mode::numeric()).unwrap();
        assert_eq!(back, z);
        assert_eq!(Scalar::ratio(6, -4).to_string(), "-3/2");
    }
}
