//! Partial Bell polynomials, integer partitions in multi-index form, complete
//! homogeneous symmetric polynomials, and Bell partition polynomials (BPPs).
//!
//! A multi-index `l = (l_1, l_2, ...)` records a partition with `l_p` parts of
//! size `p`. Its two linear forms are the part count `|l| = sum l_p` and the
//! weight `<l> = sum p l_p`. `P(n, m)` is the set of multi-indices of weight
//! `m` using parts no larger than `n`, and an `n`-BPP is a polynomial in
//! `x_1, x_2, ...` whose monomials `prod x_p^{l_p}` all have `l` in
//! `P(n, n)`.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};
use crate::scalar::{ensure_same_mode, factorial, Mode, Scalar};

/// Finitely supported vector of part multiplicities, stored without
/// trailing zeros so that derived ordering is lexicographic on
/// `(l_1, l_2, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut entries: Vec<u32>) -> MultiIndex {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MultiIndex(entries)
    }

    pub fn zero() -> MultiIndex {
        MultiIndex(Vec::new())
    }

    /// Multiplicities `l_1, l_2, ...` up to the last nonzero one.
    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `l_p` for `p >= 1`.
    pub fn get(&self, p: usize) -> u32 {
        assert!(p >= 1, "multi-index positions start at 1");
        self.0.get(p - 1).copied().unwrap_or(0)
    }

    /// `|l|`
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `<l>`
    pub fn weight(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, &l)| (i as u32 + 1) * l).sum()
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        let len = self.0.len().max(other.0.len());
        let v = (0..len)
            .map(|i| self.0.get(i).unwrap_or(&0) + other.0.get(i).unwrap_or(&0))
            .collect();
        MultiIndex::new(v)
    }

    /// `other <= self` componentwise.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        other.0.len() <= self.0.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    pub fn minus(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert!(self.dominates(other));
        let v = (0..self.0.len())
            .map(|i| self.0[i] - other.0.get(i).unwrap_or(&0))
            .collect();
        MultiIndex::new(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// `top! / (parts_1! ... parts_r! (top - sum parts)!)`, zero when the parts
/// exceed `top`.
pub fn multinomial(top: u32, parts: &[u32]) -> Integer {
    let used: u32 = parts.iter().sum();
    if used > top {
        return Integer::new();
    }
    let mut acc = factorial(top);
    for &p in parts.iter().chain(std::iter::once(&(top - used))) {
        if p > 1 {
            acc /= factorial(p);
        }
    }
    acc
}

/// Counts of partitions of `m` using parts in `min_part..=max_part`, memoized.
struct PartitionCounts {
    max_part: usize,
    table: Vec<Vec<u64>>,
}

impl PartitionCounts {
    fn new(max_part: usize, m: usize) -> PartitionCounts {
        // table[p][r]: partitions of r with parts in p..=max_part
        let mut table = vec![vec![0u64; m + 1]; max_part + 2];
        table[max_part + 1][0] = 1;
        for p in (1..=max_part).rev() {
            for r in 0..=m {
                let mut total = table[p + 1][r];
                if r >= p {
                    total += table[p][r - p];
                }
                table[p][r] = total;
            }
        }
        PartitionCounts { max_part, table }
    }

    fn count(&self, min_part: usize, r: usize) -> u64 {
        if min_part > self.max_part {
            u64::from(r == 0)
        } else {
            self.table[min_part][r]
        }
    }
}

/// `|P(n, m)|`.
pub fn partition_count(n: usize, m: usize) -> u64 {
    PartitionCounts::new(n, m).count(1, m)
}

/// All `l` with `1 l_1 + ... + n l_n = m` and `l_p = 0` for `p > n`, in
/// ascending lexicographic order of `(l_1, l_2, ...)`.
pub fn enumerate_partitions(n: usize, m: usize) -> Vec<MultiIndex> {
    let counts = PartitionCounts::new(n, m);
    let mut out = Vec::with_capacity(counts.count(1, m) as usize);
    let mut current = vec![0u32; n];
    fill_partitions(1, m, &counts, &mut current, &mut out);
    out
}

fn fill_partitions(
    part: usize,
    remaining: usize,
    counts: &PartitionCounts,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if part > counts.max_part {
        if remaining == 0 {
            out.push(MultiIndex::new(current.clone()));
        }
        return;
    }
    let mut mult = 0;
    while mult * part <= remaining {
        if counts.count(part + 1, remaining - mult * part) > 0 {
            current[part - 1] = mult as u32;
            fill_partitions(part + 1, remaining - mult * part, counts, current, out);
        }
        mult += 1;
    }
    current[part - 1] = 0;
}

/// Partitions of `n` into exactly `k` parts.
fn partitions_with_parts(n: usize, k: usize) -> impl Iterator<Item = MultiIndex> {
    enumerate_partitions(n + 1 - k, n)
        .into_iter()
        .filter(move |l| l.size() as usize == k)
}

fn check_bell_args(n: usize, k: usize, len: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::BadRange(format!("Bell index k = {k} with n = {n}")));
    }
    if len < n - k + 1 {
        return Err(Error::BadRange(format!("need {} arguments, got {len}", n - k + 1)));
    }
    Ok(())
}

fn monomial(vars: &[Scalar], l: &MultiIndex) -> Scalar {
    let mut acc = Scalar::one(vars[0].mode());
    for (i, &e) in l.entries().iter().enumerate() {
        if e > 0 {
            acc *= &vars[i].pow_u(e);
        }
    }
    acc
}

/// Exponential partial Bell polynomial `B_{n,k}(a_1, ..., a_{n-k+1})`;
/// `a[p - 1]` holds `a_p`.
pub fn partial_bell_exp(n: usize, k: usize, a: &[Scalar]) -> Result<Scalar> {
    check_bell_args(n, k, a.len())?;
    ensure_same_mode(a)?;
    let mode = a[0].mode();
    let mut acc = Scalar::zero(mode);
    for l in partitions_with_parts(n, k) {
        // n! / prod (p!)^{l_p} l_p! counts set partitions of this shape
        let mut den = Integer::from(1);
        for (i, &e) in l.entries().iter().enumerate() {
            den *= factorial(i as u32 + 1).pow(e);
            den *= factorial(e);
        }
        let c = factorial(n as u32) / den;
        acc += &(Scalar::from_integer(mode, c) * monomial(a, &l));
    }
    Ok(acc)
}

/// Ordinary partial Bell polynomial `B^_{n,k}(q_1, ..., q_{n-k+1})`, the
/// coefficient of `x^n` in `f(x)^k`.
pub fn partial_bell_ord(n: usize, k: usize, qc: &[Scalar]) -> Result<Scalar> {
    check_bell_args(n, k, qc.len())?;
    ensure_same_mode(qc)?;
    let mode = qc[0].mode();
    let mut acc = Scalar::zero(mode);
    for l in partitions_with_parts(n, k) {
        let c = multinomial(k as u32, l.entries());
        acc += &(Scalar::from_integer(mode, c) * monomial(qc, &l));
    }
    Ok(acc)
}

/// `h_k(x_1, ..., x_n)` by the recurrence
/// `h_k(x_1..x_n) = h_k(x_1..x_{n-1}) + x_n h_{k-1}(x_1..x_n)`.
/// With no variables this is `1` for `k = 0` and `0` otherwise (exact).
pub fn homogeneous_sym(k: usize, xs: &[Scalar]) -> Scalar {
    let mode = xs.first().map_or(Mode::Exact, Scalar::mode);
    // row[d] = h_d over the variables processed so far
    let mut row = vec![Scalar::zero(mode); k + 1];
    row[0] = Scalar::one(mode);
    for x in xs {
        for d in 1..=k {
            let add = x * &row[d - 1];
            row[d] += &add;
        }
    }
    row.swap_remove(k)
}

/// `h_k` as the sum over weakly increasing index sequences
/// `1 <= i_1 <= ... <= i_k <= n` of `x_{i_1} ... x_{i_k}`.
pub fn homogeneous_sym_multisets(k: usize, xs: &[Scalar]) -> Scalar {
    fn walk(start: usize, left: usize, xs: &[Scalar], prod: &Scalar, acc: &mut Scalar) {
        if left == 0 {
            *acc += prod;
            return;
        }
        for i in start..xs.len() {
            walk(i, left - 1, xs, &(prod * &xs[i]), acc);
        }
    }
    let mode = xs.first().map_or(Mode::Exact, Scalar::mode);
    let mut acc = Scalar::zero(mode);
    walk(0, k, xs, &Scalar::one(mode), &mut acc);
    acc
}

/// `h_k` as the sum over exponent vectors `l_1 + ... + l_n = k` of
/// `x_1^{l_1} ... x_n^{l_n}`.
pub fn homogeneous_sym_compositions(k: usize, xs: &[Scalar]) -> Scalar {
    fn walk(i: usize, left: usize, xs: &[Scalar], prod: &Scalar, acc: &mut Scalar) {
        if i + 1 == xs.len() {
            *acc += &(prod * &xs[i].pow_u(left as u32));
            return;
        }
        for e in 0..=left {
            walk(i + 1, left - e, xs, &(prod * &xs[i].pow_u(e as u32)), acc);
        }
    }
    let mode = xs.first().map_or(Mode::Exact, Scalar::mode);
    if xs.is_empty() {
        return Scalar::from_i64(mode, i64::from(k == 0));
    }
    let mut acc = Scalar::zero(mode);
    walk(0, k, xs, &Scalar::one(mode), &mut acc);
    acc
}

/// An `n`-Bell partition polynomial: coefficients keyed by multi-indices of
/// weight `n`. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Bpp {
    degree: usize,
    mode: Mode,
    coeffs: BTreeMap<MultiIndex, Scalar>,
}

impl Bpp {
    pub fn zero(degree: usize, mode: Mode) -> Bpp {
        Bpp { degree, mode, coeffs: BTreeMap::new() }
    }

    /// The 0-BPP with constant value `c`.
    pub fn constant(c: Scalar) -> Bpp {
        let mut p = Bpp::zero(0, c.mode());
        if !c.is_zero() {
            p.coeffs.insert(MultiIndex::zero(), c);
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Adds `c` to the coefficient of `l`.
    pub fn add_term(&mut self, l: MultiIndex, c: Scalar) -> Result<()> {
        if l.weight() as usize != self.degree {
            return Err(Error::BadRange(format!(
                "multi-index {l} has weight {} in a {}-BPP",
                l.weight(),
                self.degree
            )));
        }
        if !c.mode().compatible(self.mode) {
            return Err(Error::ModeMismatch);
        }
        let entry = self.coeffs.entry(l);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn coeff(&self, l: &MultiIndex) -> Scalar {
        self.coeffs.get(l).cloned().unwrap_or_else(|| Scalar::zero(self.mode))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Bpp) -> Result<Bpp> {
        if self.degree != other.degree {
            return Err(Error::BadRange(format!(
                "adding a {}-BPP to a {}-BPP",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_term(l.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Bpp {
        let mut out = Bpp::zero(self.degree, self.mode);
        for (l, c) in &self.coeffs {
            let v = c * k;
            if !v.is_zero() {
                out.coeffs.insert(l.clone(), v);
            }
        }
        out
    }

    /// Evaluates at `x_p = xs[p - 1]`.
    pub fn evaluate(&self, xs: &[Scalar]) -> Result<Scalar> {
        if xs.len() < self.degree {
            return Err(Error::BadRange(format!(
                "{}-BPP needs {} variables, got {}",
                self.degree,
                self.degree,
                xs.len()
            )));
        }
        ensure_same_mode(xs)?;
        let mut acc = Scalar::zero(self.mode);
        for (l, c) in &self.coeffs {
            let mut term = c.clone();
            for (i, &e) in l.entries().iter().enumerate() {
                if e > 0 {
                    term *= &xs[i].pow_u(e);
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// The ordinary complete Bell polynomial
    /// `B^_n = sum_{l in P(n)} multinomial(|l|; l) prod x_p^{l_p}`.
    pub fn complete_bell_ord(n: usize, mode: Mode) -> Bpp {
        let mut p = Bpp::zero(n, mode);
        for l in enumerate_partitions(n, n) {
            let c = multinomial(l.size(), l.entries());
            p.coeffs.insert(l, Scalar::from_integer(mode, c));
        }
        p
    }
}

/// Multivariate Cauchy product: the `(n+m)`-BPP with coefficient
/// `L -> sum_{l + lambda = L} A(l) C(lambda)`.
pub fn bpp_product(p: &Bpp, q: &Bpp) -> Result<Bpp> {
    if !p.mode.compatible(q.mode) {
        return Err(Error::ModeMismatch);
    }
    let mut out = Bpp::zero(p.degree + q.degree, p.mode);
    for (l, a) in &p.coeffs {
        for (lam, c) in &q.coeffs {
            out.add_term(l.plus(lam), a * c)?;
        }
    }
    Ok(out)
}

/// `B^_{n,k}(x_0, x_1, ..., x_{n-k})` rewritten as an `(n-k)`-BPP in
/// `x_1, ..., x_{n-k}`: coefficient `lambda -> multinomial(k; lambda, k - |lambda|)
/// x0^{k - |lambda|}`, with `x0` folded in.
pub fn partial_bell_as_bpp(n: usize, k: usize, x0: &Scalar) -> Result<Bpp> {
    if k < 1 || k > n {
        return Err(Error::BadRange(format!("Bell index k = {k} with n = {n}")));
    }
    let mode = x0.mode();
    let mut out = Bpp::zero(n - k, mode);
    for lam in enumerate_partitions(n - k, n - k) {
        let size = lam.size();
        if size > k as u32 {
            // multinomial vanishes: no such monomial in f^k
            continue;
        }
        let c = multinomial(k as u32, lam.entries());
        let v = Scalar::from_integer(mode, c) * x0.pow_u(k as u32 - size);
        out.add_term(lam, v)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Series;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    fn exs(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| ex(x)).collect()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    /// Every vector in `[0, m]^n` with the right weight, by brute force.
    fn brute_partitions(n: usize, m: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let total = (m + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let v: Vec<u32> = (0..n)
                .map(|_| {
                    let d = c % (m + 1);
                    c /= m + 1;
                    d as u32
                })
                .collect();
            let l = MultiIndex::new(v);
            if l.weight() as usize == m {
                out.push(l);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn partitions_match_brute_force() {
        for n in 0..=5 {
            for m in 0..=6 {
                assert_eq!(enumerate_partitions(n, m), brute_partitions(n, m), "P({n},{m})");
                assert_eq!(partition_count(n, m) as usize, brute_partitions(n, m).len());
            }
        }
    }

    #[test]
    fn small_partition_sets() {
        assert_eq!(enumerate_partitions(2, 2), vec![mi(&[0, 1]), mi(&[2, 0])]);
        assert_eq!(enumerate_partitions(4, 0), vec![MultiIndex::zero()]);
        assert_eq!(enumerate_partitions(1, 3), vec![mi(&[3])]);
        assert_eq!(partition_count(40, 40), 37338);
    }

    #[test]
    fn linear_forms() {
        let l = mi(&[2, 0, 1]);
        assert_eq!(l.size(), 3);
        assert_eq!(l.weight(), 5);
        assert_eq!(l.get(3), 1);
        assert_eq!(l.get(7), 0);
    }

    #[test]
    fn exponential_bell_values() {
        assert_eq!(partial_bell_exp(3, 2, &exs(&[1, 1])).unwrap(), ex(3));
        assert_eq!(partial_bell_exp(3, 3, &exs(&[2])).unwrap(), ex(8));
        assert_eq!(partial_bell_exp(4, 1, &exs(&[9, 9, 9, 5])).unwrap(), ex(5));
        assert!(matches!(partial_bell_exp(2, 3, &exs(&[1])), Err(Error::BadRange(_))));
        assert!(matches!(partial_bell_exp(2, 0, &exs(&[1, 1, 1])), Err(Error::BadRange(_))));
    }

    #[test]
    fn ordinary_bell_values() {
        assert_eq!(partial_bell_ord(3, 2, &exs(&[1, 1])).unwrap(), ex(2));
        assert_eq!(partial_bell_ord(4, 4, &exs(&[3])).unwrap(), ex(81));
        // B_{3,2} with a = (1, 2) against (3!/2!) B^_{3,2} with q = (1, 1)
        let b = partial_bell_exp(3, 2, &exs(&[1, 2])).unwrap();
        let bh = partial_bell_ord(3, 2, &exs(&[1, 1])).unwrap();
        assert_eq!(b, ex(6));
        assert_eq!(b, ex(3) * bh);
    }

    #[test]
    fn ordinary_bell_is_power_coefficient() {
        let q = vec![Scalar::ratio(2, 3), ex(-1), Scalar::ratio(5, 2), ex(3), Scalar::ratio(-7, 4)];
        let mut c = vec![ex(0)];
        c.extend(q.iter().cloned());
        c.extend((0..5).map(|_| ex(0)));
        let f = Series::new(c).unwrap();
        for k in 1..=6 {
            let fk = f.pow_trunc(k as u32, 10);
            for n in k..=10 {
                let args: Vec<Scalar> =
                    (1..=n - k + 1).map(|p| f.coeff(p)).collect();
                assert_eq!(partial_bell_ord(n, k, &args).unwrap(), fk.coeff(n), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn homogeneous_forms() {
        assert_eq!(homogeneous_sym(2, &exs(&[1, 2])), ex(7));
        assert_eq!(homogeneous_sym(0, &exs(&[4, 5])), ex(1));
        assert_eq!(homogeneous_sym(3, &exs(&[1, 1, 1])), ex(10));
        assert_eq!(homogeneous_sym(0, &[]), ex(1));
        assert_eq!(homogeneous_sym(2, &[]), ex(0));
        let xs = vec![Scalar::ratio(1, 2), ex(-3), Scalar::ratio(4, 3)];
        for k in 0..6 {
            let h = homogeneous_sym(k, &xs);
            assert_eq!(h, homogeneous_sym_multisets(k, &xs));
            assert_eq!(h, homogeneous_sym_compositions(k, &xs));
        }
    }

    #[test]
    fn complete_bell_products() {
        let one = Bpp::constant(ex(1));
        let b1 = Bpp::complete_bell_ord(1, Mode::Exact);
        let b2 = Bpp::complete_bell_ord(2, Mode::Exact);
        assert_eq!(bpp_product(&one, &b2).unwrap(), b2);
        let sq = bpp_product(&b1, &b1).unwrap();
        assert_eq!(sq.coeff(&mi(&[2])), ex(1));
        assert_eq!(sq.coeff(&mi(&[0, 1])), ex(0));
        assert_eq!(sq.len(), 1);
        let p = bpp_product(&b1, &b2).unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.coeff(&mi(&[3])), ex(1));
        assert_eq!(p.coeff(&mi(&[1, 1])), ex(1));
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn bell_as_bpp() {
        let q1 = Scalar::ratio(3, 2);
        let diag = partial_bell_as_bpp(4, 4, &q1).unwrap();
        assert_eq!(diag.degree(), 0);
        assert_eq!(diag.coeff(&MultiIndex::zero()), q1.pow_u(4));

        let b32 = partial_bell_as_bpp(3, 2, &q1).unwrap();
        assert_eq!(b32.coeff(&mi(&[1])), ex(2) * &q1);

        let b42 = partial_bell_as_bpp(4, 2, &q1).unwrap();
        assert_eq!(b42.coeff(&mi(&[0, 1])), ex(2) * &q1);
        assert_eq!(b42.coeff(&mi(&[2])), ex(1));
        let rest = exs(&[5, -2]);
        let mut all = vec![q1.clone()];
        all.extend(rest.iter().cloned());
        assert_eq!(b42.evaluate(&rest).unwrap(), partial_bell_ord(4, 2, &all).unwrap());
        assert!(partial_bell_as_bpp(2, 3, &q1).is_err());
    }

    #[test]
    fn bpp_rejects_wrong_weight() {
        let mut p = Bpp::zero(3, Mode::Exact);
        assert!(p.add_term(mi(&[1]), ex(1)).is_err());
        p.add_term(mi(&[1, 1]), ex(2)).unwrap();
        p.add_term(mi(&[1, 1]), ex(-2)).unwrap();
        assert!(p.is_empty());
    }
}
