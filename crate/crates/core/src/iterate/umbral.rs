use crate::error::{Error, Result};
use crate::itlog::{default_form, itlog};
use crate::scalar::{factorial, Exponent, Mode, Scalar};
use crate::series::{comp_inverse, Series};
use crate::triangle::CoeffTriangle;

use super::{iterate, prepared, Method};

/// Coefficients of `phi^s x^n = sum_k [n k]_{phi^s} x^k`, using the method
/// [`Method::Auto`] picks.
pub fn umbral_apply(f: &Series, s: &Exponent, n: usize) -> Result<Vec<Scalar>> {
    Ok(iterate(f, s, n, Method::Auto)?.row(n).to_vec())
}

/// The basic polynomials `phi_n(x) = phi x^n` for `n = 0..=order`.
pub fn basic_sequence(f: &Series, order: usize) -> Result<Vec<Vec<Scalar>>> {
    Ok(prepared(f, order)?.rows().to_vec())
}

/// Applies the delta operator `Q = f^{-1}(D) = sum_m g_m D^m` to the
/// polynomial `sum_j poly[j] x^j`, returning a list of the same length.
pub fn delta_operator_apply(f: &Series, poly: &[Scalar]) -> Result<Vec<Scalar>> {
    let deg = poly.len().saturating_sub(1);
    let mode = f.mode();
    let mut out = vec![Scalar::zero(mode); poly.len()];
    if deg == 0 {
        return Ok(out);
    }
    let g = comp_inverse(f, deg)?;
    for (j, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // D^m x^j = j!/(j-m)! x^{j-m}
        for m in 1..=j {
            let falling = Scalar::from_integer(mode, factorial(j as u32) / factorial((j - m) as u32));
            out[j - m] += &(c * &g.coeff(m) * falling);
        }
    }
    Ok(out)
}

fn numeric_bits(f: &Series) -> Result<u32> {
    match f.mode() {
        Mode::Numeric(bits) => Ok(bits),
        Mode::Exact => Err(Error::NumericRequired),
    }
}

/// Matrix of the operator `x itlog(f)(D)` on `x^0..x^order`: with
/// `itlog(f) = sum_m c_m x^m`, row `n` holds `c_m n!/(n-m)!` in column
/// `n - m + 1`.
pub fn generator_matrix(f: &Series, order: usize) -> Result<CoeffTriangle> {
    numeric_bits(f)?;
    let mode = f.mode();
    let c = itlog(f, order, default_form(&f.q()))?.ordinary()?;
    let mut g = CoeffTriangle::zero(order, mode);
    for n in 1..=order {
        for m in 1..=n {
            let falling = Scalar::from_integer(mode, factorial(n as u32) / factorial((n - m) as u32));
            g.set(n, n - m + 1, &c[m - 1] * falling);
        }
    }
    Ok(g)
}

type Dense = Vec<Vec<Scalar>>;

fn dense_identity(size: usize, mode: Mode) -> Dense {
    (0..=size)
        .map(|n| (0..=size).map(|k| Scalar::from_i64(mode, i64::from(n == k))).collect())
        .collect()
}

/// Product of lower-triangular matrices.
fn dense_mul(a: &Dense, b: &Dense, mode: Mode) -> Dense {
    let size = a.len() - 1;
    let mut out = vec![vec![Scalar::zero(mode); size + 1]; size + 1];
    for n in 0..=size {
        for j in 0..=n {
            if a[n][j].is_zero() {
                continue;
            }
            for k in 0..=j {
                if !b[j][k].is_zero() {
                    out[n][k] += &(&a[n][j] * &b[j][k]);
                }
            }
        }
    }
    out
}

fn max_abs(a: &Dense) -> f64 {
    a.iter().flatten().map(Scalar::abs_f64).fold(0.0, f64::max)
}

/// `phi^s = exp(s x itlog(f)(D))`, by scaling and squaring with a Taylor
/// series on the triangular generator matrix. Runs at 64 bits above the
/// precision of `f`.
pub fn generator_exp(f: &Series, s: &Exponent, order: usize) -> Result<CoeffTriangle> {
    let bits = numeric_bits(f)?;
    let work = Mode::Numeric(bits + 64);
    let fw = f.to_mode(work)?;
    let g = generator_matrix(&fw, order)?;
    let sv = s.to_scalar(work)?;

    let mut a: Dense = g.rows().iter().map(|r| {
        let mut row: Vec<Scalar> = r.iter().map(|v| v * &sv).collect();
        row.resize(order + 1, Scalar::zero(work));
        row
    }).collect();
    let norm = a
        .iter()
        .map(|r| r.iter().map(Scalar::abs_f64).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = Scalar::from_integer(work, rug::Integer::from(1) << squarings).inv()?;
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v *= &scale;
        }
    }

    let tiny = 2f64.powi(-((bits + 64) as i32));
    let mut sum = dense_identity(order, work);
    let mut term = dense_identity(order, work);
    for j in 1..=400u32 {
        term = dense_mul(&term, &a, work);
        let inv_j = Scalar::from_i64(work, j as i64).inv()?;
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= &inv_j;
            }
        }
        for (srow, trow) in sum.iter_mut().zip(&term) {
            for (x, y) in srow.iter_mut().zip(trow) {
                *x += y;
            }
        }
        let t = max_abs(&term);
        if t == 0.0 || t < tiny * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = dense_mul(&sum, &sum, work);
    }

    let out_mode = Mode::Numeric(bits);
    let rows = sum
        .into_iter()
        .enumerate()
        .map(|(n, r)| r.into_iter().take(n + 1).map(|v| v.to_mode(out_mode)).collect())
        .collect::<Result<Vec<Vec<Scalar>>>>()?;
    CoeffTriangle::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::iterate_discrete_matrix;
    use crate::triangle::{max_rel_dev, phi_triangle};

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    #[test]
    fn apply_identity_and_stirling() {
        let id = Series::identity(Mode::Exact, 4);
        assert_eq!(umbral_apply(&id, &Exponent::ratio(1, 3), 4).unwrap(), vec![ex(0), ex(0), ex(0), ex(0), ex(1)]);
        let e = Series::preset("expm1", 3, Mode::Exact).unwrap();
        assert_eq!(umbral_apply(&e, &Exponent::Int(1), 3).unwrap(), vec![ex(0), ex(1), ex(3), ex(1)]);
    }

    #[test]
    fn basic_sequence_conditions() {
        let f = Series::new(vec![ex(0), ex(2), ex(-1), Scalar::ratio(1, 2), ex(3), ex(1), ex(0), ex(-2), ex(1)])
            .unwrap();
        let seq = basic_sequence(&f, 8).unwrap();
        assert_eq!(seq[0], vec![ex(1)]);
        for (n, p) in seq.iter().enumerate() {
            assert_eq!(p.len(), n + 1);
            assert!(!p[n].is_zero());
            assert_eq!(p[0], ex(i64::from(n == 0)));
        }
        for n in 0..8 {
            let q = delta_operator_apply(&f, &seq[n + 1]).unwrap();
            let want: Vec<Scalar> = seq[n].iter().map(|c| c * &ex(n as i64 + 1)).collect();
            assert_eq!(&q[..=n], &want[..]);
            assert!(q[n + 1].is_zero());
        }
        let id = Series::identity(Mode::Exact, 3);
        assert_eq!(basic_sequence(&id, 3).unwrap()[3], vec![ex(0), ex(0), ex(0), ex(1)]);
    }

    #[test]
    fn generator_diagonal_and_zero() {
        let mode = Mode::Numeric(128);
        let f = Series::preset("linear(3)", 5, mode).unwrap();
        let s = Exponent::ratio(1, 2);
        let t = generator_exp(&f, &s, 5).unwrap();
        for n in 0..=5 {
            let want = Scalar::complex(128, 3f64.sqrt().powi(n as i32), 0.0);
            assert!(Scalar::rel_dev(t.entry(n, n), &want) < 1e-15);
        }
        let z = generator_exp(&f, &Exponent::Int(0), 5).unwrap();
        assert!(max_rel_dev(&z, &CoeffTriangle::identity(5, mode)).unwrap() == 0.0);
        assert_eq!(generator_exp(&f.to_mode(Mode::Exact).unwrap_or(Series::identity(Mode::Exact, 5)), &s, 5), Err(Error::NumericRequired));
    }

    #[test]
    fn generator_matches_matrix() {
        let mode = Mode::Numeric(128);
        let geo = Series::preset("geometric", 6, mode).unwrap();
        let t = generator_exp(&geo, &Exponent::Int(2), 6).unwrap();
        let want = iterate_discrete_matrix(&geo, 2, 6).unwrap();
        assert!(max_rel_dev(&t, &want).unwrap() < 1e-20);
        let one = generator_exp(&geo, &Exponent::Int(1), 6).unwrap();
        assert!(max_rel_dev(&one, &phi_triangle(&geo, 6).unwrap()).unwrap() < 1e-20);
    }
}
