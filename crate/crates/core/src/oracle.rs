//! Brute-force references for the iteration formulas. Nothing here depends
//! on the triangle formulas being checked.

use std::collections::BTreeSet;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::scalar::{q_number, scalar_pow, Exponent, Scalar};
use crate::series::{check_order, compose, Series};

/// `f` composed with itself `s` times, truncated at `order`.
pub fn oracle_compose_iterate(f: &Series, s: u32, order: usize) -> Result<Series> {
    check_order(order)?;
    if f.order() < order {
        return Err(Error::BadRange(format!("order {order} beyond the series order {}", f.order())));
    }
    let mut acc = Series::identity(f.mode(), order);
    for _ in 0..s {
        acc = compose(f, &acc, order)?;
    }
    Ok(acc)
}

/// Exact `m`-th root of a positive rational, when both parts are perfect
/// powers.
fn exact_root(q: &Rational, m: u32) -> Option<Rational> {
    if *q <= 0 {
        return None;
    }
    let (num, den) = q.clone().into_numer_denom();
    let rn = num.clone().root(m);
    let rd = den.clone().root(m);
    if Integer::from((&rn).pow(m)) == num && Integer::from((&rd).pow(m)) == den {
        Some(Rational::from((rn, rd)))
    } else {
        None
    }
}

/// The series `g` with `g'(0)` the principal `m`-th root of `q = f'(0)` and
/// `g` composed `m` times equal to `f` through `order`, solved one
/// coefficient at a time.
pub fn oracle_functional_root(f: &Series, m: u32, order: usize) -> Result<Series> {
    if m < 2 {
        return Err(Error::BadRange(format!("root index {m}")));
    }
    f.ensure_invertible()?;
    check_order(order)?;
    if f.order() < order {
        return Err(Error::BadRange(format!("order {order} beyond the series order {}", f.order())));
    }
    let mode = f.mode();
    let q = f.q();
    let r = match &q {
        Scalar::Exact(v) => Scalar::Exact(
            exact_root(v, m).ok_or_else(|| Error::ExactInfeasible(format!("({q})^(1/{m})")))?,
        ),
        Scalar::Numeric(_) => scalar_pow(&q, &Exponent::ratio(1, m as i64))?,
    };
    let mut g = vec![Scalar::zero(mode); order + 1];
    if order >= 1 {
        g[1] = r.clone();
    }
    for n in 2..=order {
        // g_n enters [x^n] of the m-fold composite with weight
        // sum_i r^{m-1-i} r^{i n}
        let mut weight = Scalar::zero(mode);
        for i in 0..m {
            weight += &r.pow_u(m - 1 - i + i * n as u32);
        }
        let trial = Series::new(g[..=n].to_vec())?;
        let mut h = trial.clone();
        for _ in 1..m {
            h = compose(&trial, &h, n)?;
        }
        let residual = f.coeff(n) - h.coeff(n);
        g[n] = residual.checked_div(&weight)?;
    }
    Series::new(g)
}

/// Ordinary coefficients of the `s`-th iterate of `q x / (1 - x)`, which is
/// `q^s x / (1 - [s]_q x)`.
pub fn oracle_moebius(q: &Scalar, s: &Exponent, order: usize) -> Result<Series> {
    check_order(order)?;
    let qs = scalar_pow(q, s)?;
    let ratio = q_number(s, q)?;
    let mut c = vec![Scalar::zero(q.mode())];
    let mut term = qs;
    for _ in 1..=order {
        c.push(term.clone());
        term *= &ratio;
    }
    Series::new(c)
}

fn weak_chains(k: usize, n: usize, s: usize) -> Vec<Vec<usize>> {
    fn walk(cur: &mut Vec<usize>, left: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        let last = *cur.last().expect("chain starts with k");
        if left == 0 {
            if last == n {
                out.push(cur.clone());
            }
            return;
        }
        for j in last..=n {
            cur.push(j);
            walk(cur, left - 1, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(&mut vec![k], s, n, &mut out);
    out
}

fn strict_chains(k: usize, n: usize, p: usize) -> Vec<Vec<usize>> {
    weak_chains(k, n, p)
        .into_iter()
        .filter(|c| c.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

/// Nondecreasing sequences of length `len` with entries in `0..=top`.
fn multisets(len: usize, top: usize) -> Vec<Vec<usize>> {
    fn walk(cur: &mut Vec<usize>, len: usize, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let from = cur.last().copied().unwrap_or(0);
        for i in from..=top {
            cur.push(i);
            walk(cur, len, top, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(&mut Vec::new(), len, top, &mut out);
    out
}

/// Sizes of the pieces `S_0, ..., S_s` built from strict chains and repeat
/// multisets, together with the number of weak chains they must cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCheck {
    pub weak_chains: usize,
    pub piece_sizes: Vec<usize>,
    pub bijective: bool,
}

/// Checks that the weak chains `k = j_0 <= ... <= j_s = n` are in bijection
/// with pairs (strict chain `k = J_0 < ... < J_p = n`, multiset
/// `0 <= i_1 <= ... <= i_{s-p} <= p`), the chain being the sorted tuple
/// `(J_0, ..., J_p, J_{i_1}, ..., J_{i_{s-p}})`.
pub fn partition_lemma_check(s: usize, k: usize, n: usize) -> PartitionCheck {
    let target: BTreeSet<Vec<usize>> = if k <= n {
        weak_chains(k, n, s).into_iter().collect()
    } else {
        BTreeSet::new()
    };
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::with_capacity(s + 1);
    let mut injective = true;
    for p in 0..=s {
        let mut count = 0;
        if k <= n {
            for big_j in strict_chains(k, n, p) {
                for rep in multisets(s - p, p) {
                    let mut j: Vec<usize> = big_j.clone();
                    j.extend(rep.iter().map(|&i| big_j[i]));
                    j.sort_unstable();
                    injective &= seen.insert(j);
                    count += 1;
                }
            }
        }
        sizes.push(count);
    }
    PartitionCheck {
        weak_chains: target.len(),
        piece_sizes: sizes,
        bijective: injective && seen == target,
    }
}

/// Whether [`partition_lemma_check`] finds a bijection.
pub fn verify_partition_lemma(s: usize, k: usize, n: usize) -> bool {
    partition_lemma_check(s, k, n).bijective
}
