//! Root data for sl(m|n) and osp(2|2n) with their distinguished simple systems.
//!
//! Type A weights live on (ε₁,…,ε_m, δ₁,…,δ_n); type C weights on (ε, δ₁,…,δ_n).

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalars::{fmt_rational, int, rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum RootType {
    /// sl(m|n)
    A,
    /// osp(2|2n)
    C,
}

/// A weight as exact coordinates over the ε/δ basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Weight {
    #[serde(with = "crate::scalars::rational_vec")]
    pub eps: Vec<Rational>,
    #[serde(with = "crate::scalars::rational_vec")]
    pub delta: Vec<Rational>,
}

impl Weight {
    pub fn zero(n_eps: usize, n_delta: usize) -> Self {
        Weight { eps: vec![Rational::zero(); n_eps], delta: vec![Rational::zero(); n_delta] }
    }

    pub fn from_coords(coords: &[Rational], n_eps: usize) -> Self {
        Weight { eps: coords[..n_eps].to_vec(), delta: coords[n_eps..].to_vec() }
    }

    pub fn from_ints(coords: &[i64], n_eps: usize) -> Self {
        let c: Vec<Rational> = coords.iter().map(|&x| int(x)).collect();
        Weight::from_coords(&c, n_eps)
    }

    pub fn coords(&self) -> Vec<Rational> {
        self.eps.iter().chain(&self.delta).cloned().collect()
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight {
            eps: self.eps.iter().zip(&o.eps).map(|(a, b)| a + b).collect(),
            delta: self.delta.iter().zip(&o.delta).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, f: &Rational) -> Weight {
        Weight { eps: self.eps.iter().map(|a| a * f).collect(), delta: self.delta.iter().map(|a| a * f).collect() }
    }
}

impl fmt::Display for Weight {
    /// e.g. `e1 - d2`, `1/2*e1 + 3*d1`; type C uses a single `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single_eps = self.eps.len() == 1;
        let mut terms: Vec<(Rational, String)> = Vec::new();
        for (i, v) in self.eps.iter().enumerate() {
            let name = if single_eps { "e".to_string() } else { format!("e{}", i + 1) };
            terms.push((v.clone(), name));
        }
        for (i, v) in self.delta.iter().enumerate() {
            terms.push((v.clone(), format!("d{}", i + 1)));
        }
        let mut first = true;
        for (v, name) in terms.into_iter().filter(|(v, _)| !v.is_zero()) {
            let neg = v < Rational::zero();
            let mag = if neg { -v } else { v };
            let body = if mag.is_one() { name } else { format!("{}*{}", fmt_rational(&mag), name) };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A root: integer ε/δ coordinates, parity, and its expansion in simple roots.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Root {
    pub coords: Vec<i64>,
    pub odd: bool,
    pub simple_coeffs: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.simple_coeffs.iter().sum()
    }

    pub fn negated(&self) -> Root {
        Root {
            coords: self.coords.iter().map(|x| -x).collect(),
            odd: self.odd,
            simple_coeffs: self.simple_coeffs.iter().map(|x| -x).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootSystem {
    pub root_type: RootType,
    pub m: usize,
    pub n: usize,
    pub positive_even: Vec<Root>,
    pub positive_odd: Vec<Root>,
    /// α₁, α₂, … in Dynkin order.
    pub simple: Vec<Root>,
    /// (ε_i,ε_i) and (δ_μ,δ_μ); the form is diagonal in these coordinates.
    #[serde(with = "crate::scalars::rational_vec")]
    pub metric_signs: Vec<Rational>,
}

impl RootSystem {
    /// Number of ε-type coordinates.
    pub fn n_eps(&self) -> usize {
        match self.root_type {
            RootType::A => self.m,
            RootType::C => 1,
        }
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    pub fn positive(&self) -> impl Iterator<Item = &Root> {
        self.positive_even.iter().chain(&self.positive_odd)
    }

    pub fn weight_of(&self, root: &Root) -> Weight {
        Weight::from_ints(&root.coords, self.n_eps())
    }

    /// The highest root (largest height).
    pub fn highest_root(&self) -> &Root {
        self.positive().max_by_key(|r| r.height()).expect("nonempty root system")
    }

    /// Positive root with the given ε/δ coordinates.
    pub fn find(&self, coords: &[i64]) -> Option<&Root> {
        self.positive().find(|r| r.coords == coords)
    }

    /// Whether `coords` is a root (positive or negative).
    pub fn is_root(&self, coords: &[i64]) -> bool {
        let neg: Vec<i64> = coords.iter().map(|x| -x).collect();
        self.find(coords).is_some() || self.find(&neg).is_some()
    }

    /// Expands integer coordinates in the simple roots (exact rational solve).
    pub fn simple_coefficients(&self, coords: &[i64]) -> Option<Vec<Rational>> {
        simple_coefficients(&self.simple, coords)
    }
}

fn simple_coefficients(simple: &[Root], coords: &[i64]) -> Option<Vec<Rational>> {
    // Least-squares free: the simple roots are independent, so solve the
    // normal system S·Sᵀ c = S·v exactly.
    let k = simple.len();
    let d = coords.len();
    let mut gram = Mat::<Rational>::zeros(k, k);
    let mut rhs = vec![Rational::zero(); k];
    for i in 0..k {
        for j in 0..k {
            let s: i64 = (0..d).map(|t| simple[i].coords[t] * simple[j].coords[t]).sum();
            gram.set(i, j, int(s));
        }
        rhs[i] = int((0..d).map(|t| simple[i].coords[t] * coords[t]).sum());
    }
    let c = gram.solve(&rhs)?;
    // Reject vectors outside the span.
    for t in 0..d {
        let back = (0..k).fold(Rational::zero(), |acc, i| acc + &c[i] * int(simple[i].coords[t]));
        if back != int(coords[t]) {
            return None;
        }
    }
    Some(c)
}

fn finish(
    root_type: RootType,
    m: usize,
    n: usize,
    simple_coords: Vec<(Vec<i64>, bool)>,
    pos: Vec<(Vec<i64>, bool)>,
    metric_signs: Vec<Rational>,
) -> RootSystem {
    let simple_stub: Vec<Root> =
        simple_coords.iter().map(|(c, odd)| Root { coords: c.clone(), odd: *odd, simple_coeffs: vec![] }).collect();
    let with_coeffs = |(c, odd): (Vec<i64>, bool)| {
        let sc = simple_coefficients(&simple_stub, &c).expect("root lies in the root lattice");
        let sc: Vec<i64> = sc
            .iter()
            .map(|x| {
                assert!(x.is_integer(), "non-integral simple coefficient");
                i64::try_from(x.to_integer()).expect("small coefficient")
            })
            .collect();
        Root { coords: c, odd, simple_coeffs: sc }
    };
    let simple: Vec<Root> = simple_coords.into_iter().map(with_coeffs).collect();
    let mut positive_even = Vec::new();
    let mut positive_odd = Vec::new();
    for r in pos.into_iter().map(with_coeffs) {
        if r.odd {
            positive_odd.push(r);
        } else {
            positive_even.push(r);
        }
    }
    let order = |a: &Root, b: &Root| a.height().cmp(&b.height()).then_with(|| b.simple_coeffs.cmp(&a.simple_coeffs));
    positive_even.sort_by(order);
    positive_odd.sort_by(order);
    RootSystem { root_type, m, n, positive_even, positive_odd, simple, metric_signs }
}

/// Root system of sl(m|n) (distinguished simple system).
pub fn root_system_a(m: usize, n: usize) -> Result<RootSystem> {
    if m + n < 2 {
        return Err(Error::UnsupportedAlgebra(format!("sl({m}|{n}) needs m+n >= 2")));
    }
    let d = m + n;
    let unit = |i: usize| {
        let mut v = vec![0i64; d];
        v[i] = 1;
        v
    };
    let diff = |i: usize, j: usize| {
        let mut v = unit(i);
        v[j] -= 1;
        v
    };
    let odd = |i: usize, j: usize| (i < m) != (j < m);
    let simple = (0..d - 1).map(|i| (diff(i, i + 1), odd(i, i + 1))).collect();
    let mut pos = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            pos.push((diff(i, j), odd(i, j)));
        }
    }
    let mut metric = vec![int(-1); m];
    metric.extend(vec![int(1); n]);
    Ok(finish(RootType::A, m, n, simple, pos, metric))
}

/// Root system of osp(2|2n) (distinguished simple system ε−δ₁, δ_j−δ_{j+1}, 2δ_n).
pub fn root_system_c(n: usize) -> Result<RootSystem> {
    if n < 1 {
        return Err(Error::UnsupportedAlgebra("osp(2|2n) needs n >= 1".into()));
    }
    let d = 1 + n;
    let v = |pairs: &[(usize, i64)]| {
        let mut x = vec![0i64; d];
        for &(i, c) in pairs {
            x[i] += c;
        }
        x
    };
    let delta = |j: usize| 1 + j;
    let mut simple = vec![(v(&[(0, 1), (delta(0), -1)]), true)];
    for j in 0..n - 1 {
        simple.push((v(&[(delta(j), 1), (delta(j + 1), -1)]), false));
    }
    simple.push((v(&[(delta(n - 1), 2)]), false));
    let mut pos = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pos.push((v(&[(delta(i), 1), (delta(j), -1)]), false));
            pos.push((v(&[(delta(i), 1), (delta(j), 1)]), false));
        }
        pos.push((v(&[(delta(i), 2)]), false));
    }
    for j in 0..n {
        pos.push((v(&[(0, 1), (delta(j), -1)]), true));
        pos.push((v(&[(0, 1), (delta(j), 1)]), true));
    }
    let mut metric = vec![rat(-1, 2)];
    metric.extend(vec![rat(1, 2); n]);
    Ok(finish(RootType::C, 2, n, simple, pos, metric))
}

/// Bilinear extension of the diagonal form on ε/δ coordinates.
pub fn weight_inner(rs: &RootSystem, l: &Weight, mu: &Weight) -> Rational {
    let a = l.coords();
    let b = mu.coords();
    assert_eq!(a.len(), rs.metric_signs.len(), "weight over another root system");
    assert_eq!(b.len(), rs.metric_signs.len(), "weight over another root system");
    rs.metric_signs.iter().zip(a.iter().zip(&b)).fold(Rational::zero(), |acc, (s, (x, y))| acc + s * x * y)
}

/// Positive roots supported on the given simple-root indices (0-based).
pub fn subsystem_roots<'a>(rs: &'a RootSystem, simple_subset: &'a [usize]) -> impl Iterator<Item = &'a Root> + 'a {
    rs.positive()
        .filter(move |r| r.simple_coeffs.iter().enumerate().all(|(i, c)| *c == 0 || simple_subset.contains(&i)))
}

/// ρ = ρ₀̄ − ρ₁̄ over the positive roots generated by `simple_subset`
/// (0-based simple indices); `None` means the whole system.
pub fn weyl_vector(rs: &RootSystem, simple_subset: Option<&[usize]>) -> Weight {
    let all: Vec<usize> = (0..rs.rank()).collect();
    let subset = simple_subset.unwrap_or(&all);
    let d = rs.metric_signs.len();
    let mut acc = vec![Rational::zero(); d];
    for r in subsystem_roots(rs, subset) {
        let sign = if r.odd { -1 } else { 1 };
        for (t, c) in r.coords.iter().enumerate() {
            acc[t] += int(sign * c);
        }
    }
    let half = rat(1, 2);
    let acc: Vec<Rational> = acc.into_iter().map(|x| x * &half).collect();
    Weight::from_coords(&acc, rs.n_eps())
}

/// −(Λ + 2ρ_k, Λ) with ρ_k the Weyl vector of the subsystem on `k_simple`.
pub fn casimir_closed(rs: &RootSystem, k_simple: &[usize], lambda: &Weight) -> Rational {
    let rho = weyl_vector(rs, Some(k_simple));
    let shifted = lambda.add(&rho.scale(&int(2)));
    -weight_inner(rs, &shifted, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_a(m: usize, n: usize, pairs: &[(usize, i64)]) -> Weight {
        let mut c = vec![0i64; m + n];
        for &(i, v) in pairs {
            c[i] += v;
        }
        Weight::from_ints(&c, m)
    }

    #[test]
    fn sl32_roots_match_listing() {
        let rs = root_system_a(3, 2).unwrap();
        assert_eq!(rs.positive_even.len(), 4);
        assert_eq!(rs.positive_odd.len(), 6);
        assert_eq!(rs.simple.len(), 4);
        assert_eq!(rs.simple.iter().filter(|r| r.odd).count(), 1);
        assert!(rs.simple[2].odd);
        let hr = rs.highest_root();
        assert_eq!(hr.simple_coeffs, vec![1, 1, 1, 1]);
        assert_eq!(hr.coords, vec![1, 0, 0, 0, -1]);
    }

    #[test]
    fn sl21_simple_system() {
        let rs = root_system_a(2, 1).unwrap();
        assert_eq!(rs.simple[0].coords, vec![1, -1, 0]);
        assert_eq!(rs.simple[1].coords, vec![0, 1, -1]);
        assert!(!rs.simple[0].odd && rs.simple[1].odd);
    }

    #[test]
    fn osp24_roots() {
        let rs = root_system_c(2).unwrap();
        let odd: Vec<Vec<i64>> = rs.positive_odd.iter().map(|r| r.coords.clone()).collect();
        for c in [[1, -1, 0], [1, 1, 0], [1, 0, -1], [1, 0, 1]] {
            assert!(odd.contains(&c.to_vec()));
        }
        assert_eq!(odd.len(), 4);
        assert_eq!(rs.positive_even.len(), 4);
        assert_eq!(rs.highest_root().simple_coeffs, vec![1, 2, 1]);
        let rs3 = root_system_c(3).unwrap();
        assert_eq!(rs3.highest_root().simple_coeffs, vec![1, 2, 2, 1]);
    }

    #[test]
    fn inner_product_examples() {
        let rs = root_system_a(3, 2).unwrap();
        let odd = w_a(3, 2, &[(0, 1), (4, -1)]);
        assert_eq!(weight_inner(&rs, &odd, &odd), int(0));
        let c = root_system_c(2).unwrap();
        let iso = Weight::from_ints(&[1, 1, 0], 1);
        assert_eq!(weight_inner(&c, &iso, &iso), int(0));
        let long = Weight::from_ints(&[0, 2, 0], 1);
        assert_eq!(weight_inner(&c, &long, &long), int(2));
    }

    #[test]
    fn full_weyl_vectors() {
        for (m, n) in [(3, 2), (2, 3), (4, 1), (1, 1), (2, 2)] {
            let rs = root_system_a(m, n).unwrap();
            let rho = weyl_vector(&rs, None);
            let two_rho = rho.scale(&int(2));
            for i in 0..m {
                let expect = m as i64 - n as i64 - 2 * (i as i64 + 1) + 1;
                assert_eq!(two_rho.eps[i], int(expect), "sl({m}|{n}) eps{}", i + 1);
            }
            for mu in 0..n {
                let expect = m as i64 + n as i64 - 2 * (mu as i64 + 1) + 1;
                assert_eq!(two_rho.delta[mu], int(expect), "sl({m}|{n}) delta{}", mu + 1);
            }
        }
        for n in 1..=4 {
            let rs = root_system_c(n).unwrap();
            let rho = weyl_vector(&rs, None);
            assert_eq!(rho.eps[0], int(-(n as i64)));
            for j in 0..n {
                assert_eq!(rho.delta[j], int((n - j) as i64));
            }
        }
        let rs = root_system_a(2, 2).unwrap();
        assert_eq!(weyl_vector(&rs, Some(&[])), Weight::zero(2, 2));
    }

    #[test]
    fn rho_pairs_half_length_with_simple_roots() {
        for (t, m, n) in [(RootType::A, 3, 2), (RootType::A, 2, 4), (RootType::C, 2, 3), (RootType::C, 2, 4)] {
            let rs = match t {
                RootType::A => root_system_a(m, n).unwrap(),
                RootType::C => root_system_c(n).unwrap(),
            };
            let rho = weyl_vector(&rs, None);
            for s in &rs.simple {
                let a = rs.weight_of(s);
                let aa = weight_inner(&rs, &a, &a);
                if !aa.is_zero() {
                    assert_eq!(weight_inner(&rs, &rho, &a), aa * rat(1, 2));
                }
            }
        }
    }

    #[test]
    fn closed_casimirs() {
        // One circled node: Λ = ε₁ − δ_n gives m − n.
        for (m, n, p) in [(3, 2, 2), (4, 1, 1), (2, 3, 4), (3, 3, 3)] {
            let rs = root_system_a(m, n).unwrap();
            let k: Vec<usize> = (0..rs.rank()).filter(|&i| i != p - 1).collect();
            let lam = w_a(m, n, &[(0, 1), (m + n - 1, -1)]);
            assert_eq!(casimir_closed(&rs, &k, &lam), int(m as i64 - n as i64));
        }
        // Two nodes, case p < q <= m: the (1,1) block gives m − n + p − q.
        let (m, n, p, q) = (5, 2, 1, 3);
        let rs = root_system_a(m, n).unwrap();
        let k: Vec<usize> = (0..rs.rank()).filter(|&i| i != p - 1 && i != q - 1).collect();
        let lam = w_a(m, n, &[(0, 1), (m + n - 1, -1)]);
        assert_eq!(casimir_closed(&rs, &k, &lam), int(m as i64 - n as i64 + p as i64 - q as i64));
        // osp: Λ₁ = ε + δ_p gives −(2n − p + 1)/2.
        for (n, p) in [(2, 2), (3, 2), (4, 3)] {
            let rs = root_system_c(n).unwrap();
            let k: Vec<usize> = (0..rs.rank()).filter(|&i| i != p - 1).collect();
            let mut c = vec![0i64; n + 1];
            c[0] = 1;
            c[p] = 1;
            let lam = Weight::from_ints(&c, 1);
            assert_eq!(casimir_closed(&rs, &k, &lam), rat(-(2 * n as i64 - p as i64 + 1), 2));
        }
    }

    #[test]
    fn root_counts_and_nonnegative_expansions() {
        for m in 0..=8usize {
            for n in 0..=8usize {
                if m + n < 2 || m + n > 8 {
                    continue;
                }
                let rs = root_system_a(m, n).unwrap();
                assert_eq!(rs.positive_even.len(), m * m.saturating_sub(1) / 2 + n * n.saturating_sub(1) / 2);
                assert_eq!(rs.positive_odd.len(), m * n);
                for r in rs.positive() {
                    assert!(r.simple_coeffs.iter().all(|&c| c >= 0));
                }
                assert!(rs.highest_root().simple_coeffs.iter().all(|&c| c == 1));
            }
        }
    }
}
