use crate::error::{Error, Result};
use crate::qcalc::{q_binomial, QContext};
use crate::scalar::{Exponent, Scalar};
use crate::series::Series;
use crate::triangle::CoeffTriangle;

use super::{discrete_powers, guarded, prepared, q_pochhammer_tables, vanishes};

fn choose2(m: i64) -> i64 {
    m * (m - 1) / 2
}

fn sign(ctx: &QContext, e: usize) -> Scalar {
    if e.is_multiple_of(2) {
        ctx.one()
    } else {
        -ctx.one()
    }
}

/// The q-analog of Schröder's formula, valid for any `q`:
/// `[n k]_{phi^s} = sum_{p <= n-k} qbinom(s, p) q^{k(s-p)} [n k]_{(phi, -q^k)_q^p}`.
pub fn iterate_qschroder(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    guarded(f, order, |f| qschroder_raw(f, s, order))
}

fn qschroder_raw(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    let phi = prepared(f, order)?;
    let ctx = QContext::new(f.q())?;
    ctx.check_nondegenerate(order)?;
    let tables = q_pochhammer_tables(&phi, &ctx);
    let qbinoms: Vec<Scalar> =
        (0..=order).map(|p| q_binomial(s, p, &ctx)).collect::<Result<_>>()?;
    let mut out = CoeffTriangle::identity(order, phi.mode());
    for k in 1..=order {
        let qks = ctx.pow(&s.scaled(k as i64))?;
        for n in k..=order {
            let mut acc = ctx.zero();
            for p in 0..=n - k {
                let c = tables[p].entry(n, k);
                if !c.is_zero() {
                    let w = &qbinoms[p] * &qks * ctx.pow_i(-((k * p) as i64));
                    acc += &(w * c);
                }
            }
            out.set(n, k, acc);
        }
    }
    Ok(out)
}

/// Rearrangements of Tambs' formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TambsVariant {
    /// `sum_p [n k]_{phi^p} qbinom(s, p) qbinom(n-k-s, n-k-p) q^{(n-p)(s-p)}`
    Standard,
    /// `sum_p [n k]_{phi^p} qbinom(s, p) qbinom(s-p-1, n-k-p)
    /// q^{k(s-p) + C(n-k-p+1, 2)} (-1)^{n-k-p}`
    Lavoie,
    /// `qbinom(s, m) sum_p [n k]_{phi^p} qbinom(m, p) ([s]-[m])/([s]-[p])
    /// q^{k(s-p) + C(m-p, 2)} (-1)^{m-p}` with `m = n - k`
    QExtracted,
}

/// Tambs' formula: `phi^s` through the discrete powers
/// `phi^0, ..., phi^{n-k}`, for any `q`.
pub fn iterate_tambs(
    f: &Series,
    s: &Exponent,
    order: usize,
    variant: TambsVariant,
) -> Result<CoeffTriangle> {
    guarded(f, order, |f| tambs_raw(f, s, order, variant))
}

fn tambs_raw(
    f: &Series,
    s: &Exponent,
    order: usize,
    variant: TambsVariant,
) -> Result<CoeffTriangle> {
    let phi = prepared(f, order)?;
    let ctx = QContext::new(f.q())?;
    ctx.check_nondegenerate(order)?;
    let powers = discrete_powers(&phi, order)?;
    let qbinoms: Vec<Scalar> =
        (0..=order).map(|p| q_binomial(s, p, &ctx)).collect::<Result<_>>()?;
    let s_num = ctx.q_num(s)?;

    let mut out = CoeffTriangle::identity(order, phi.mode());
    for k in 1..=order {
        let qks = ctx.pow(&s.scaled(k as i64))?;
        for n in k..=order {
            let m = n - k;
            let mut acc = ctx.zero();
            for p in 0..=m {
                let c = powers[p].entry(n, k);
                let w = match variant {
                    TambsVariant::Standard => {
                        let top = s.negated().offset(m as i64);
                        let e = s.scaled((n - p) as i64).offset(-(((n - p) * p) as i64));
                        &qbinoms[p] * q_binomial(&top, m - p, &ctx)? * ctx.pow(&e)?
                    }
                    TambsVariant::Lavoie => {
                        let top = s.offset(-(p as i64) - 1);
                        let e = -((k * p) as i64) + choose2((m - p + 1) as i64);
                        &qbinoms[p]
                            * q_binomial(&top, m - p, &ctx)?
                            * &qks
                            * ctx.pow_i(e)
                            * sign(&ctx, m - p)
                    }
                    TambsVariant::QExtracted => {
                        let ratio = if p == m {
                            ctx.one()
                        } else {
                            let den = &s_num - ctx.q_int(p as i64);
                            if vanishes(&den) {
                                return Err(Error::ExtractedPole(p));
                            }
                            (&s_num - ctx.q_int(m as i64)) / den
                        };
                        let e = -((k * p) as i64) + choose2((m - p) as i64);
                        q_binomial(&Exponent::Int(m as i64), p, &ctx)?
                            * ratio
                            * &qks
                            * ctx.pow_i(e)
                            * sign(&ctx, m - p)
                    }
                };
                if !c.is_zero() {
                    acc += &(w * c);
                }
            }
            if variant == TambsVariant::QExtracted {
                acc *= &qbinoms[m];
            }
            out.set(n, k, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::{iterate_discrete_matrix, iterate_jabotinsky, JabotinskyVariant};
    use crate::oracle::oracle_moebius;
    use crate::scalar::Mode;
    use crate::triangle::max_rel_dev;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    fn sample(q: Scalar) -> Series {
        Series::new(vec![
            ex(0),
            q,
            ex(1),
            Scalar::ratio(-3, 2),
            ex(2),
            Scalar::ratio(1, 5),
            ex(-1),
            ex(0),
        ])
        .unwrap()
    }

    const VARIANTS: [TambsVariant; 3] =
        [TambsVariant::Standard, TambsVariant::Lavoie, TambsVariant::QExtracted];

    #[test]
    fn integer_exponents_match_matrix() {
        for q in [ex(2), Scalar::ratio(1, 3), ex(-3), ex(1)] {
            let f = sample(q);
            for s in 0..4 {
                let want = iterate_discrete_matrix(&f, s, 7).unwrap();
                let e = Exponent::Int(s);
                assert_eq!(iterate_qschroder(&f, &e, 7).unwrap(), want, "s={s}");
                for v in &VARIANTS[..2] {
                    assert_eq!(iterate_tambs(&f, &e, 7, *v).unwrap(), want, "s={s} {v:?}");
                }
            }
        }
    }

    #[test]
    fn extracted_away_from_poles() {
        let f = sample(ex(2));
        let e = Exponent::Int(-2);
        let want = iterate_tambs(&f, &e, 7, TambsVariant::Standard).unwrap();
        assert_eq!(iterate_tambs(&f, &e, 7, TambsVariant::QExtracted).unwrap(), want);
        assert_eq!(
            iterate_tambs(&f, &Exponent::Int(1), 7, TambsVariant::QExtracted),
            Err(Error::ExtractedPole(1))
        );
    }

    #[test]
    fn unit_q_matches_jabotinsky() {
        let f = sample(ex(1));
        let s = Exponent::ratio(2, 5);
        let want = iterate_jabotinsky(&f, &s, 7, JabotinskyVariant::Standard).unwrap();
        assert_eq!(iterate_qschroder(&f, &s, 7).unwrap(), want);
        for v in VARIANTS {
            assert_eq!(iterate_tambs(&f, &s, 7, v).unwrap(), want, "{v:?}");
        }
    }

    #[test]
    fn moebius_half_iterate() {
        let mode = Mode::Numeric(128);
        let f = Series::preset("moebius(4)", 10, mode).unwrap();
        let s = Exponent::ratio(1, 2);
        let want = oracle_moebius(&Scalar::complex(128, 4.0, 0.0), &s, 10).unwrap();
        let t = iterate_qschroder(&f, &s, 10).unwrap();
        for (n, c) in t.to_series().coeffs().iter().enumerate() {
            assert!(Scalar::rel_dev(c, &want.coeff(n)) < 1e-28, "n={n}");
        }
        for v in VARIANTS {
            let u = iterate_tambs(&f, &s, 10, v).unwrap();
            assert!(max_rel_dev(&t, &u).unwrap() < 1e-28, "{v:?}");
        }
    }

    #[test]
    fn second_coefficient_law() {
        let mode = Mode::Numeric(128);
        let f = sample(ex(3)).to_mode(mode).unwrap();
        let s = Exponent::numeric(128, 0.3, 0.2);
        let ctx = QContext::new(f.q()).unwrap();
        let want = f.exponential_coeffs()[2].clone()
            * ctx.pow(&s.offset(-1)).unwrap()
            * ctx.q_num(&s).unwrap();
        let t = iterate_qschroder(&f, &s, 4).unwrap();
        assert!(Scalar::rel_dev(t.entry(2, 1), &want) < 1e-30);
        assert!(Scalar::rel_dev(t.entry(1, 1), &ctx.pow(&s).unwrap()) < 1e-30);
    }

    #[test]
    fn fractional_exact_needs_unit_q() {
        let f = sample(ex(2));
        assert!(matches!(
            iterate_qschroder(&f, &Exponent::ratio(1, 2), 4),
            Err(Error::ExactInfeasible(_))
        ));
        let g = sample(ex(-1));
        assert_eq!(iterate_tambs(&g, &Exponent::Int(1), 4, TambsVariant::Standard), Err(Error::QDegenerate(2)));
    }
}
