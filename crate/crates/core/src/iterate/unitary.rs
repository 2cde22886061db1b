use crate::error::{Error, Result};
use crate::scalar::{binomial, Exponent, Scalar};
use crate::series::Series;
use crate::triangle::CoeffTriangle;

use super::{discrete_powers, ensure_unitary, guarded, phi_minus_one_powers, prepared, vanishes};

/// Schröder's formula for `q = 1`:
/// `[n k]_{phi^s} = sum_{p <= n-k} C(s, p) [n k]_{(phi - 1)^p}`, the inner
/// coefficient summed over strictly increasing chains.
pub fn iterate_schroder(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    guarded(f, order, |f| schroder_raw(f, s, order))
}

fn schroder_raw(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    let phi = prepared(f, order)?;
    ensure_unitary(f)?;
    let mode = phi.mode();
    let sv = s.to_scalar(mode)?;
    let tables = phi_minus_one_powers(&phi, true);
    let binoms: Vec<Scalar> = (0..=order).map(|p| binomial(&sv, p as u32)).collect();
    let mut out = CoeffTriangle::zero(order, mode);
    for n in 0..=order {
        for k in 0..=n {
            let mut acc = Scalar::zero(mode);
            for p in 0..=n - k {
                let c = tables[p].entry(n, k);
                if !c.is_zero() {
                    acc += &(&binoms[p] * c);
                }
            }
            out.set(n, k, acc);
        }
    }
    Ok(out)
}

/// Rearrangements of Jabotinsky's formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JabotinskyVariant {
    /// `sum_p [n k]_{phi^p} C(s, p) C(n-k-s, n-k-p)`
    Standard,
    /// `sum_p [n k]_{phi^p} C(s, p) C(s-1-p, n-k-p) (-1)^{n-k-p}`
    Alternating,
    /// `C(s, m) sum_p [n k]_{phi^p} C(m, p) (s-m)/(s-p) (-1)^{m-p}` with
    /// `m = n - k`; undefined when `s` is an integer below `m`.
    Extracted,
}

/// Jabotinsky's formula for `q = 1`, expressing `phi^s` through the discrete
/// powers `phi^0, ..., phi^{n-k}`.
pub fn iterate_jabotinsky(
    f: &Series,
    s: &Exponent,
    order: usize,
    variant: JabotinskyVariant,
) -> Result<CoeffTriangle> {
    guarded(f, order, |f| jabotinsky_raw(f, s, order, variant))
}

fn jabotinsky_raw(
    f: &Series,
    s: &Exponent,
    order: usize,
    variant: JabotinskyVariant,
) -> Result<CoeffTriangle> {
    let phi = prepared(f, order)?;
    ensure_unitary(f)?;
    let mode = phi.mode();
    let sv = s.to_scalar(mode)?;
    let powers = discrete_powers(&phi, order)?;
    let int = |v: usize| Scalar::from_i64(mode, v as i64);
    let sign = |e: usize| if e.is_multiple_of(2) { Scalar::one(mode) } else { -Scalar::one(mode) };
    let binoms_s: Vec<Scalar> = (0..=order).map(|p| binomial(&sv, p as u32)).collect();

    let mut out = CoeffTriangle::identity(order, mode);
    for k in 1..=order {
        for n in k..=order {
            let m = n - k;
            let mut acc = Scalar::zero(mode);
            for p in 0..=m {
                let c = powers[p].entry(n, k);
                let w = match variant {
                    JabotinskyVariant::Standard => {
                        let top = int(m) - &sv;
                        &binoms_s[p] * binomial(&top, (m - p) as u32)
                    }
                    JabotinskyVariant::Alternating => {
                        let top = &sv - int(1 + p);
                        &binoms_s[p] * binomial(&top, (m - p) as u32) * sign(m - p)
                    }
                    JabotinskyVariant::Extracted => {
                        let ratio = if p == m {
                            Scalar::one(mode)
                        } else {
                            let den = &sv - int(p);
                            if vanishes(&den) {
                                return Err(Error::ExtractedPole(p));
                            }
                            (&sv - int(m)) / den
                        };
                        binomial(&int(m), p as u32) * ratio * sign(m - p)
                    }
                };
                if !c.is_zero() {
                    acc += &(w * c);
                }
            }
            if variant == JabotinskyVariant::Extracted {
                acc *= &binoms_s[m];
            }
            out.set(n, k, acc);
        }
    }
    Ok(out)
}
