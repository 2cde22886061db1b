//! Coefficient triangles `[n k]_U` of linear operators on polynomials, with
//! `U x^n = sum_k [n k]_U x^k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ensure_same_mode, factorial, Mode, Scalar};
use crate::series::{check_order, Series};

/// Lower-triangular table of entries `[n k]` for `0 <= k <= n <= size`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffTriangle {
    rows: Vec<Vec<Scalar>>,
}

impl CoeffTriangle {
    pub fn zero(size: usize, mode: Mode) -> CoeffTriangle {
        let rows = (0..=size).map(|n| vec![Scalar::zero(mode); n + 1]).collect();
        CoeffTriangle { rows }
    }

    /// `[n k] = delta_{n-k}`.
    pub fn identity(size: usize, mode: Mode) -> CoeffTriangle {
        let mut t = CoeffTriangle::zero(size, mode);
        for n in 0..=size {
            t.rows[n][n] = Scalar::one(mode);
        }
        t
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<CoeffTriangle> {
        if rows.is_empty() {
            return Err(Error::BadRange("empty triangle".into()));
        }
        for (n, row) in rows.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::BadRange(format!("row {n} has {} entries", row.len())));
            }
        }
        ensure_same_mode(rows.iter().flatten())?;
        Ok(CoeffTriangle { rows })
    }

    /// Largest row index `N`.
    pub fn size(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn mode(&self) -> Mode {
        self.rows[0][0].mode()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &[Scalar] {
        &self.rows[n]
    }

    /// `[n k]`, zero above the diagonal.
    pub fn get(&self, n: usize, k: usize) -> Scalar {
        if k > n {
            Scalar::zero(self.mode())
        } else {
            self.rows[n][k].clone()
        }
    }

    pub fn entry(&self, n: usize, k: usize) -> &Scalar {
        &self.rows[n][k]
    }

    pub fn set(&mut self, n: usize, k: usize, v: Scalar) {
        self.rows[n][k] = v;
    }

    /// Rows `0..=size` only.
    pub fn truncate(&self, size: usize) -> CoeffTriangle {
        CoeffTriangle { rows: self.rows[..=size.min(self.size())].to_vec() }
    }

    pub fn to_mode(&self, mode: Mode) -> Result<CoeffTriangle> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_mode(mode)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffTriangle { rows })
    }

    /// Column `[n 1]` for `n = 1..=size`: the exponential coefficients of the
    /// series whose umbral operator this is.
    pub fn exponential_row(&self) -> Vec<Scalar> {
        (1..=self.size()).map(|n| self.rows[n][1].clone()).collect()
    }

    /// `[n 1] / n!` for `n = 1..=size`.
    pub fn ordinary_row(&self) -> Vec<Scalar> {
        let mode = self.mode();
        (1..=self.size())
            .map(|n| &self.rows[n][1] / &Scalar::from_integer(mode, factorial(n as u32)))
            .collect()
    }

    /// The series `sum_n [n 1]/n! x^n` read off the first column.
    pub fn to_series(&self) -> Series {
        let mut c = vec![Scalar::zero(self.mode())];
        c.extend(self.ordinary_row());
        Series::new(c).expect("triangle column forms a series")
    }

    /// Image of the polynomial `sum_n p[n] x^n`, as coefficients of
    /// `x^0..x^{deg p}`.
    pub fn apply(&self, poly: &[Scalar]) -> Result<Vec<Scalar>> {
        if poly.len() > self.rows.len() {
            return Err(Error::BadRange(format!(
                "polynomial of degree {} on a triangle of size {}",
                poly.len() - 1,
                self.size()
            )));
        }
        ensure_same_mode(poly.iter().chain(std::iter::once(&self.rows[0][0])))?;
        let mut out = vec![Scalar::zero(self.mode()); poly.len()];
        for (n, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for k in 0..=n {
                out[k] += &(c * &self.rows[n][k]);
            }
        }
        Ok(out)
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..=self.size()).map(|n| self.rows[n][n].clone()).collect()
    }
}

/// Triangle of the umbral operator of `f` up to row `size`:
/// `[n k] = (n!/k!) [x^n] f(x)^k`, which is `B_{n,k}(a_1, a_2, ...)`.
pub fn phi_triangle(f: &Series, size: usize) -> Result<CoeffTriangle> {
    f.ensure_invertible()?;
    check_order(size)?;
    if size > f.order() {
        return Err(Error::BadRange(format!(
            "triangle size {size} beyond the series order {}",
            f.order()
        )));
    }
    let mode = f.mode();
    let mut t = CoeffTriangle::zero(size, mode);
    t.rows[0][0] = Scalar::one(mode);
    let f = f.truncate(size);
    let mut power = Series::new(vec![Scalar::one(mode)]).expect("constant series");
    let fact: Vec<Scalar> = (0..=size)
        .map(|n| Scalar::from_integer(mode, factorial(n as u32)))
        .collect();
    for k in 1..=size {
        power = power.mul_trunc(&f, size);
        for n in k..=size {
            let c = power.coeff(n);
            if !c.is_zero() {
                t.rows[n][k] = c * &fact[n] / &fact[k];
            }
        }
    }
    Ok(t)
}

fn check_pair(u: &CoeffTriangle, v: &CoeffTriangle) -> Result<()> {
    if u.size() != v.size() {
        return Err(Error::SizeMismatch(u.size(), v.size()));
    }
    if !u.mode().compatible(v.mode()) {
        return Err(Error::ModeMismatch);
    }
    Ok(())
}

/// Triangle of the operator product `UV` (apply `V` first):
/// `[n k]_{UV} = sum_{j=k}^{n} [j k]_U [n j]_V`.
pub fn triangle_product(u: &CoeffTriangle, v: &CoeffTriangle) -> Result<CoeffTriangle> {
    check_pair(u, v)?;
    let size = u.size();
    let mut out = CoeffTriangle::zero(size, u.mode());
    for n in 0..=size {
        for j in 0..=n {
            let vj = &v.rows[n][j];
            if vj.is_zero() {
                continue;
            }
            for k in 0..=j {
                let uk = &u.rows[j][k];
                if !uk.is_zero() {
                    out.rows[n][k] += &(uk * vj);
                }
            }
        }
    }
    Ok(out)
}

/// `sum_i c_i T_i`, entrywise.
pub fn linear_combination(terms: &[(Scalar, &CoeffTriangle)]) -> Result<CoeffTriangle> {
    let (_, first) = terms.first().ok_or_else(|| Error::BadRange("empty combination".into()))?;
    let mut out = CoeffTriangle::zero(first.size(), first.mode());
    for (c, t) in terms {
        check_pair(first, t)?;
        if !c.mode().compatible(first.mode()) {
            return Err(Error::ModeMismatch);
        }
        for n in 0..=first.size() {
            for k in 0..=n {
                out.rows[n][k] += &(c * &t.rows[n][k]);
            }
        }
    }
    Ok(out)
}

/// `max |a - b| / max(|a|, |b|)` over all entries.
pub fn max_rel_dev(a: &CoeffTriangle, b: &CoeffTriangle) -> Result<f64> {
    check_pair(a, b)?;
    let mut worst = 0.0f64;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max(Scalar::rel_dev(x, y));
        }
    }
    Ok(worst)
}

/// Sums over index chains `start = j_0 <= j_1 <= ... <= j_p` (strictly
/// increasing when `strict`) with `j_p <= max`, of
/// `factor(0, j_0, j_1) factor(1, j_1, j_2) ... factor(p-1, j_{p-1}, j_p)`.
///
/// Returns `layers[p][n]` for `p = 0..=steps` and `n = 0..=max`, the sum over
/// chains of length `p` ending at `n`. Zero partial sums and zero factors
/// are skipped.
pub fn chain_layers<F>(
    start: usize,
    max: usize,
    steps: usize,
    strict: bool,
    mode: Mode,
    factor: F,
) -> Vec<Vec<Scalar>>
where
    F: Fn(usize, usize, usize) -> Scalar,
{
    let mut layers = Vec::with_capacity(steps + 1);
    let mut cur = vec![Scalar::zero(mode); max + 1];
    if start <= max {
        cur[start] = Scalar::one(mode);
    }
    layers.push(cur);
    for i in 0..steps {
        let prev = &layers[i];
        let mut next = vec![Scalar::zero(mode); max + 1];
        for j in start..=max {
            if prev[j].is_zero() {
                continue;
            }
            let first = if strict { j + 1 } else { j };
            for jn in first..=max {
                let w = factor(i, j, jn);
                if !w.is_zero() {
                    next[jn] += &(&prev[j] * &w);
                }
            }
        }
        layers.push(next);
    }
    layers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::compose;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    fn series(c: &[i64]) -> Series {
        Series::new(c.iter().map(|&v| ex(v)).collect()).unwrap()
    }

    #[test]
    fn identity_series_gives_identity() {
        let t = phi_triangle(&Series::identity(Mode::Exact, 6), 6).unwrap();
        assert_eq!(t, CoeffTriangle::identity(6, Mode::Exact));
    }

    #[test]
    fn linear_series_gives_diagonal() {
        let t = phi_triangle(&series(&[0, 3, 0, 0, 0]), 4).unwrap();
        for n in 0..=4 {
            for k in 0..=n {
                let want = if n == k { ex(3i64.pow(n as u32)) } else { ex(0) };
                assert_eq!(*t.entry(n, k), want);
            }
        }
    }

    #[test]
    fn stirling_numbers() {
        let t = phi_triangle(&Series::preset("expm1", 6, Mode::Exact).unwrap(), 6).unwrap();
        assert_eq!(*t.entry(3, 2), ex(3));
        assert_eq!(*t.entry(5, 3), ex(25));
        assert_eq!(t.row(3), &[ex(0), ex(1), ex(3), ex(1)]);
    }

    #[test]
    fn entries_are_bell_polynomials() {
        use crate::bell::partial_bell_exp;
        let f = Series::new(vec![
            ex(0),
            Scalar::ratio(2, 3),
            ex(-1),
            Scalar::ratio(5, 4),
            ex(2),
            Scalar::ratio(-1, 7),
            ex(3),
        ])
        .unwrap();
        let t = phi_triangle(&f, 6).unwrap();
        let a = f.exponential_coeffs();
        for n in 1..=6 {
            for k in 1..=n {
                assert_eq!(*t.entry(n, k), partial_bell_exp(n, k, &a[1..]).unwrap());
            }
        }
        assert_eq!(t.exponential_row(), a[1..].to_vec());
    }

    #[test]
    fn product_follows_composition() {
        let f = series(&[0, 2, -1, 3, 0, 1, 2]);
        let g = series(&[0, -1, 1, 1, -2, 0, 1]);
        let tf = phi_triangle(&f, 6).unwrap();
        let tg = phi_triangle(&g, 6).unwrap();
        let fg = phi_triangle(&compose(&f, &g, 6).unwrap(), 6).unwrap();
        assert_eq!(triangle_product(&tf, &tg).unwrap(), fg);
        let id = CoeffTriangle::identity(6, Mode::Exact);
        assert_eq!(triangle_product(&tf, &id).unwrap(), tf);
        assert_eq!(triangle_product(&id, &tf).unwrap(), tf);
        let p = triangle_product(&tf, &tg).unwrap();
        assert_eq!(*p.entry(1, 1), tf.entry(1, 1) * tg.entry(1, 1));
        let small = CoeffTriangle::identity(3, Mode::Exact);
        assert_eq!(triangle_product(&tf, &small), Err(Error::SizeMismatch(6, 3)));
    }

    #[test]
    fn combinations_are_entrywise() {
        let tf = phi_triangle(&series(&[0, 2, -1, 3, 1]), 4).unwrap();
        let tg = phi_triangle(&series(&[0, 1, 1, 0, -2]), 4).unwrap();
        let a = Scalar::ratio(3, 5);
        let b = ex(-2);
        let c = linear_combination(&[(a.clone(), &tf), (b.clone(), &tg)]).unwrap();
        for n in 0..=4 {
            for k in 0..=n {
                assert_eq!(*c.entry(n, k), &a * tf.entry(n, k) + &b * tg.entry(n, k));
            }
        }
    }

    #[test]
    fn apply_to_polynomial() {
        let t = phi_triangle(&Series::preset("expm1", 4, Mode::Exact).unwrap(), 4).unwrap();
        let image = t.apply(&[ex(0), ex(0), ex(0), ex(1)]).unwrap();
        assert_eq!(image, vec![ex(0), ex(1), ex(3), ex(1)]);
    }

    #[test]
    fn chains_count() {
        // 1 <= j1 <= 3 gives three weak chains
        let layers = chain_layers(1, 3, 2, false, Mode::Exact, |_, _, _| ex(1));
        assert_eq!(layers[2][3], ex(3));
        let strict = chain_layers(0, 4, 2, true, Mode::Exact, |_, _, _| ex(1));
        assert_eq!(strict[2][4], ex(3));
        assert_eq!(strict[0][0], ex(1));
    }

    #[test]
    fn serializes_rows() {
        let t = CoeffTriangle::identity(1, Mode::Exact);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"rows":[["1"],["0","1"]]}"#);
    }
}
