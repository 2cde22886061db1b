use std::collections::BTreeMap;

use crate::bell::{enumerate_partitions, homogeneous_sym, multinomial, Bpp, MultiIndex};
use crate::error::Result;
use crate::qcalc::QContext;
use crate::scalar::{factorial, Scalar};
use crate::series::Series;
use crate::triangle::{chain_layers, CoeffTriangle};

use super::{nonnegative, prepared};

/// Matrix formula: `[n k]_{phi^s}` as the sum over weakly increasing chains
/// `k = j_0 <= ... <= j_s = n` of `prod [j_{i+1} j_i]_phi`.
pub fn iterate_discrete_matrix(f: &Series, s: i64, order: usize) -> Result<CoeffTriangle> {
    let s = nonnegative(s)?;
    let phi = prepared(f, order)?;
    let mode = phi.mode();
    let mut out = CoeffTriangle::zero(order, mode);
    for k in 0..=order {
        let layers = chain_layers(k, order, s, false, mode, |_, j, jn| phi.get(jn, j));
        let last = &layers[s];
        for n in k..=order {
            out.set(n, k, last[n].clone());
        }
    }
    Ok(out)
}

/// Monkam's formula: a sum over strictly increasing chains
/// `k = J_0 < ... < J_p = n` with `p <= min(s, n - k)`, each weighted by
/// `h_{s-p}(q^{J_0}, ..., q^{J_p})`.
pub fn iterate_monkam(f: &Series, s: i64, order: usize) -> Result<CoeffTriangle> {
    let s = nonnegative(s)?;
    let phi = prepared(f, order)?;
    let mode = phi.mode();
    let qpow: Vec<Scalar> = phi.diagonal();
    let mut out = CoeffTriangle::zero(order, mode);

    struct Walk<'a> {
        phi: &'a CoeffTriangle,
        qpow: &'a [Scalar],
        s: usize,
        n: usize,
        chain: Vec<usize>,
        acc: Scalar,
    }

    impl Walk<'_> {
        fn go(&mut self, prod: Scalar) {
            let last = *self.chain.last().expect("chain is never empty");
            let p = self.chain.len() - 1;
            if last == self.n {
                let xs: Vec<Scalar> = self.chain.iter().map(|&j| self.qpow[j].clone()).collect();
                self.acc += &(homogeneous_sym(self.s - p, &xs) * prod);
                return;
            }
            if p == self.s {
                return;
            }
            for jn in last + 1..=self.n {
                let w = self.phi.entry(jn, last);
                if w.is_zero() {
                    continue;
                }
                self.chain.push(jn);
                self.go(&prod * w);
                self.chain.pop();
            }
        }
    }

    for n in 0..=order {
        for k in 0..=n {
            let mut walk = Walk {
                phi: &phi,
                qpow: &qpow,
                s,
                n,
                chain: vec![k],
                acc: Scalar::zero(mode),
            };
            walk.go(Scalar::one(mode));
            out.set(n, k, walk.acc);
        }
    }
    Ok(out)
}

/// The polynomials `P_m` for `m = 0..=max_m` with
/// `[k+m k]_{phi^s} = ((k+m)!/k!) P_m(q_2, ..., q_{m+1})`: each is an
/// `m`-BPP whose coefficient on `L` is
/// `C(L) = sum_{l_1 + ... + l_s = L} q^{sum_t (s-t)<l_t> + sk - |L|}
/// prod_i multinomial(k + sum_{t<i} <l_t>; l_i, k + sum_{t<i} <l_t> - |l_i|)`.
/// Variable `x_p` of the BPP stands for `q_{p+1}`.
pub fn iterate_bpp_polys(s: usize, k: usize, max_m: usize, ctx: &QContext) -> Result<Vec<Bpp>> {
    let parts_by_weight: Vec<Vec<MultiIndex>> =
        (0..=max_m).map(|w| enumerate_partitions(w, w)).collect();
    // partial sums over l_1..l_t keyed by l_1 + ... + l_t
    let mut states: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
    states.insert(MultiIndex::zero(), ctx.one());
    for t in 1..=s {
        let mut next: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (acc_l, val) in &states {
            let used = acc_l.weight() as usize;
            let top = (k + used) as u32;
            for parts in &parts_by_weight[..=max_m - used] {
                for l in parts {
                    let size = l.size();
                    if size > top {
                        continue;
                    }
                    let e = ((s - t) * l.weight() as usize + k) as i64 - size as i64;
                    let c = Scalar::from_integer(ctx.mode(), multinomial(top, l.entries()))
                        * ctx.pow_i(e);
                    let term = val * &c;
                    let key = acc_l.plus(l);
                    match next.get_mut(&key) {
                        Some(v) => *v += &term,
                        None => {
                            next.insert(key, term);
                        }
                    }
                }
            }
        }
        states = next;
    }
    let mut polys: Vec<Bpp> = (0..=max_m).map(|m| Bpp::zero(m, ctx.mode())).collect();
    for (l, val) in states {
        polys[l.weight() as usize].add_term(l, val)?;
    }
    Ok(polys)
}

/// Bell-partition-polynomial formula:
/// `[n k]_{phi^s} = (n!/k!) sum_{L in P(n-k)} C(L) prod_p q_{p+1}^{L_p}`.
pub fn iterate_bpp(f: &Series, s: i64, order: usize) -> Result<CoeffTriangle> {
    let s = nonnegative(s)?;
    super::check_inputs(f, order)?;
    let mode = f.mode();
    let ctx = QContext::new(f.q())?;
    let vars: Vec<Scalar> = (2..=order + 1).map(|p| f.coeff(p)).collect();
    let fact: Vec<Scalar> = (0..=order)
        .map(|n| Scalar::from_integer(mode, factorial(n as u32)))
        .collect();
    let mut out = CoeffTriangle::zero(order, mode);
    out.set(0, 0, Scalar::one(mode));
    for k in 1..=order {
        let polys = iterate_bpp_polys(s, k, order - k, &ctx)?;
        for (m, poly) in polys.iter().enumerate() {
            let v = poly.evaluate(&vars[..m])?;
            if !v.is_zero() {
                out.set(k + m, k, v * &fact[k + m] / &fact[k]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::oracle::oracle_compose_iterate;
    use crate::scalar::Mode;
    use crate::triangle::phi_triangle;

    fn ex(v: i64) -> Scalar {
        Scalar::from_i64(Mode::Exact, v)
    }

    fn sample() -> Series {
        Series::new(vec![
            ex(0),
            Scalar::ratio(3, 2),
            ex(-1),
            Scalar::ratio(2, 3),
            ex(2),
            Scalar::ratio(-5, 4),
            ex(1),
            ex(0),
        ])
        .unwrap()
    }

    #[test]
    fn matrix_edge_cases() {
        let f = sample();
        assert_eq!(iterate_discrete_matrix(&f, 0, 7).unwrap(), CoeffTriangle::identity(7, Mode::Exact));
        assert_eq!(iterate_discrete_matrix(&f, 1, 7).unwrap(), phi_triangle(&f, 7).unwrap());
        assert_eq!(iterate_discrete_matrix(&f, -1, 7), Err(Error::NegativeExponent(-1)));
        let geo = Series::preset("geometric", 5, Mode::Exact).unwrap();
        assert_eq!(*iterate_discrete_matrix(&geo, 3, 5).unwrap().entry(3, 1), ex(54));
    }

    #[test]
    fn matrix_matches_composition() {
        let f = sample();
        for s in 0..4u32 {
            let t = iterate_discrete_matrix(&f, s as i64, 7).unwrap();
            let fs = oracle_compose_iterate(&f, s, 7).unwrap();
            assert_eq!(t, phi_triangle(&fs, 7).unwrap(), "s={s}");
        }
    }

    #[test]
    fn monkam_matches_matrix() {
        let f = sample();
        for s in 0..4 {
            assert_eq!(
                iterate_monkam(&f, s, 7).unwrap(),
                iterate_discrete_matrix(&f, s, 7).unwrap(),
                "s={s}"
            );
        }
        let g = Series::new(vec![ex(0), ex(2), ex(1), ex(0)]).unwrap();
        assert_eq!(*iterate_monkam(&g, 2, 3).unwrap().entry(2, 1), ex(12));
    }

    #[test]
    fn bpp_matches_matrix() {
        let f = sample();
        for s in 0..5 {
            assert_eq!(
                iterate_bpp(&f, s, 7).unwrap(),
                iterate_discrete_matrix(&f, s, 7).unwrap(),
                "s={s}"
            );
        }
        let quad = Series::preset("quad", 4, Mode::Exact).unwrap();
        assert_eq!(*iterate_bpp(&quad, 2, 4).unwrap().entry(3, 1), ex(12));
    }

    #[test]
    fn bpp_single_step_is_bell() {
        use crate::bell::partial_bell_as_bpp;
        let q = Scalar::ratio(-2, 3);
        let ctx = QContext::new(q.clone()).unwrap();
        for k in 1..=4 {
            let polys = iterate_bpp_polys(1, k, 4, &ctx).unwrap();
            for (m, p) in polys.iter().enumerate() {
                assert_eq!(*p, partial_bell_as_bpp(k + m, k, &q).unwrap(), "k={k} m={m}");
            }
        }
    }
}
