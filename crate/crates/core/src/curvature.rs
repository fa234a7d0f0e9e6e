//! Curvature of invariant graded Riemannian metrics.
//!
//! Two engines. [`Geometry`] works at the base point of G/K from Lie
//! algebra data only: the U map, the connection of Killing fields, the
//! fifteen-term Riemann formula and the Ricci formula with the Killing form.
//! [`GroupGeometry`] handles left-invariant metrics on a Lie supergroup by
//! the Koszul formula, composing connections of left-invariant fields.
//!
//! Every vector is a [`SparseVec`] over the global real basis of g. A metric
//! basis of m need not be normalised: block-scaled forms (⟨X,X⟩ = ±x, odd
//! pairs ⟨X_a,X_b⟩ = x) are handled through exact right duals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag::{FlagInvariants, IsotropyDecomposition};
use crate::linalg::{sparse_inverse, SparseVec};
use crate::scalars::{int, parse_rational, rat, Rational};
use crate::superalgebra::RealAlgebra;

/// One metric coefficient per block: ⟨·,·⟩ = x_i·Q on m_i.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiagonalMetric {
    #[serde(with = "crate::scalars::rational_vec")]
    pub x: Vec<Rational>,
}

impl DiagonalMetric {
    pub fn new(x: Vec<Rational>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Parse("metric needs at least one coefficient".into()));
        }
        if x.iter().any(|v| v.is_zero()) {
            return Err(Error::DegenerateForm("metric coefficients must be nonzero".into()));
        }
        Ok(DiagonalMetric { x })
    }

    pub fn from_ints(x: &[i64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| int(v)).collect())
    }

    /// Positive in the sense that every x_i > 0.
    pub fn is_positive(&self) -> bool {
        self.x.iter().all(|v| v > &Rational::zero())
    }

    pub fn is_uniform(&self) -> bool {
        self.x.windows(2).all(|w| w[0] == w[1])
    }
}

/// Parses "1,1,1" or "1/2, -3".
pub fn parse_metric(s: &str) -> Result<DiagonalMetric> {
    if s.len() > 4096 {
        return Err(Error::Parse("metric string too long".into()));
    }
    let x = s.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
    DiagonalMetric::new(x)
}

/// A left-invariant metric given by its rational Gram matrix on the real basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupMetric {
    #[serde(with = "rational_matrix")]
    pub gram: Vec<Vec<Rational>>,
}

impl GroupMetric {
    /// Checks shape, supersymmetry against `odd`, evenness and invertibility.
    pub fn new(gram: Vec<Vec<Rational>>, odd: &[bool]) -> Result<Self> {
        let n = odd.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("gram must be {n}x{n}")));
        }
        for a in 0..n {
            for b in 0..n {
                let g = &gram[a][b];
                if odd[a] != odd[b] {
                    if !g.is_zero() {
                        return Err(Error::Invariant("metric pairs even with odd".into()));
                    }
                } else if odd[a] {
                    if *g != -gram[b][a].clone() {
                        return Err(Error::Invariant("metric is not skew on the odd part".into()));
                    }
                } else if *g != gram[b][a] {
                    return Err(Error::Invariant("metric is not symmetric on the even part".into()));
                }
            }
        }
        let m = GroupMetric { gram };
        dual_basis(&m.rows())?;
        Ok(m)
    }

    /// The SL(1|1) family [[x₁,0,0],[0,0,x₂],[0,−x₂,0]].
    pub fn sl11(x1: Rational, x2: Rational) -> Result<Self> {
        let z = Rational::zero;
        Self::new(vec![vec![x1, z(), z()], vec![z(), z(), x2.clone()], vec![z(), -x2, z()]], &[false, true, true])
    }

    pub fn rows(&self) -> Vec<SparseVec> {
        self.gram.iter().map(|r| SparseVec::from_pairs(r.iter().cloned().enumerate())).collect()
    }
}

mod rational_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(crate::scalars::fmt_rational).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        rows.into_iter().map(|r| r.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()).collect()
    }
}

/// Right duals: ⟨v_i, v̄_j⟩ = δ_ij, with v̄_j = Σ_l (η⁻¹)_{lj} v_l.
/// `gram` holds the rows of η in local indices; the result is in the same indices.
pub fn dual_basis(gram: &[SparseVec]) -> Result<Vec<SparseVec>> {
    let inv = sparse_inverse(gram).ok_or_else(|| Error::DegenerateForm("Gram matrix is singular".into()))?;
    let mut duals = vec![SparseVec::new(); gram.len()];
    for (l, row) in inv.iter().enumerate() {
        for (j, v) in row.iter() {
            duals[j].add_at(l, v);
        }
    }
    Ok(duals)
}

fn sign(odd: bool) -> Rational {
    if odd {
        int(-1)
    } else {
        int(1)
    }
}

/// The tangent space m ⊂ g with an ad_k-invariant metric, at the base point.
pub struct Geometry<'a> {
    real: &'a RealAlgebra,
    in_m: Vec<bool>,
    /// m basis (global indices).
    m: Vec<usize>,
    /// Metric rows over global indices; empty outside m.
    gram: Vec<SparseVec>,
    /// Right duals of `m`, over global indices.
    duals: Vec<SparseVec>,
    /// U(e_a, e_b) for a, b in m, keyed by local indices.
    u_table: Vec<Vec<SparseVec>>,
    local: BTreeMap<usize, usize>,
    naturally_reductive: bool,
}

impl<'a> Geometry<'a> {
    /// A metric on the span of the `in_m` basis vectors, given as global rows.
    /// `naturally_reductive` enables the shortcut cross-check; callers set it
    /// only when the metric is a multiple of an ad-invariant form.
    pub fn with_gram(
        real: &'a RealAlgebra,
        in_m: Vec<bool>,
        gram: Vec<SparseVec>,
        naturally_reductive: bool,
    ) -> Result<Self> {
        if in_m.len() != real.dim() || gram.len() != real.dim() {
            return Err(Error::DimensionMismatch("mask and gram must cover g".into()));
        }
        let m: Vec<usize> = (0..real.dim()).filter(|&a| in_m[a]).collect();
        let local: BTreeMap<usize, usize> = m.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let rows: Vec<SparseVec> = m.iter().map(|&a| gram[a].reindex(|b| local.get(&b).copied())).collect();
        for (i, &a) in m.iter().enumerate() {
            if rows[i].len() != gram[a].len() {
                return Err(Error::Invariant("metric row leaves m".into()));
            }
            for b in gram[a].support() {
                if real.odd[a] != real.odd[b] {
                    return Err(Error::Invariant("metric is not even".into()));
                }
            }
        }
        let local_duals = dual_basis(&rows)?;
        let duals = local_duals.iter().map(|d| d.reindex(|l| Some(m[l]))).collect();
        let mut g = Geometry { real, in_m, m, gram, duals, u_table: Vec::new(), local, naturally_reductive };
        g.u_table = g.build_u_table();
        Ok(g)
    }

    /// x_i·Q on m_i.
    pub fn homogeneous(dec: &IsotropyDecomposition<'a>, metric: &DiagonalMetric) -> Result<Self> {
        if metric.x.len() != dec.s() {
            return Err(Error::DimensionMismatch(format!(
                "metric has {} coefficients but the space has {} blocks",
                metric.x.len(),
                dec.s()
            )));
        }
        let real: &'a RealAlgebra = &dec.ctx.real;
        let mut gram = vec![SparseVec::new(); real.dim()];
        let mut in_m = vec![false; real.dim()];
        for (i, blk) in dec.blocks.iter().enumerate() {
            for &a in &blk.basis {
                in_m[a] = true;
                gram[a] = real.gram_row(a).scaled(&metric.x[i]);
            }
        }
        Self::with_gram(real, in_m, gram, metric.is_uniform())
    }

    pub fn real(&self) -> &RealAlgebra {
        self.real
    }

    pub fn basis(&self) -> &[usize] {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Right dual of the local basis vector j.
    pub fn dual(&self, j: usize) -> &SparseVec {
        &self.duals[j]
    }

    pub fn inner(&self, u: &SparseVec, v: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (a, x) in u.iter() {
            for (b, g) in self.gram[a].iter() {
                let y = v.get(b);
                if !y.is_zero() {
                    acc += x * g * y;
                }
            }
        }
        acc
    }

    pub fn is_odd(&self, v: &SparseVec) -> bool {
        v.support().next().is_some_and(|a| self.real.odd[a])
    }

    pub fn bracket(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        self.real.bracket(u, v)
    }

    pub fn bracket_m(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        self.project_m(&self.real.bracket(u, v))
    }

    pub fn project_m(&self, v: &SparseVec) -> SparseVec {
        v.restrict(|a| self.in_m[a])
    }

    pub fn project_k(&self, v: &SparseVec) -> SparseVec {
        v.restrict(|a| !self.in_m[a])
    }

    fn u_basis_pair(&self, a: usize, b: usize) -> SparseVec {
        let (ea, eb) = (SparseVec::unit(a), SparseVec::unit(b));
        let s = sign(self.real.odd[a] && self.real.odd[b]);
        let mut out = SparseVec::new();
        for (j, &c) in self.m.iter().enumerate() {
            let dj = &self.duals[j];
            let t1 = self.inner(&ea, &self.bracket_m(&eb, dj));
            let t2 = self.inner(&eb, &self.bracket_m(&ea, dj));
            let coef = -t1 - &s * t2;
            if !coef.is_zero() {
                out.add_at(c, &coef);
            }
        }
        out
    }

    fn build_u_table(&self) -> Vec<Vec<SparseVec>> {
        self.m.par_iter().map(|&a| self.m.iter().map(|&b| self.u_basis_pair(a, b)).collect()).collect()
    }

    /// ⟨U(X,Y), Z⟩ = −⟨X,[Y,Z]_m⟩ − (−1)^{[X][Y]}⟨Y,[X,Z]_m⟩, extended bilinearly.
    pub fn u_map(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, xa) in x.iter() {
            let Some(&i) = self.local.get(&a) else { continue };
            for (b, yb) in y.iter() {
                let Some(&j) = self.local.get(&b) else { continue };
                out.axpy(&(xa * yb), &self.u_table[i][j]);
            }
        }
        out
    }

    /// (∇_{X†} Y†) at the base point: ½(−[X,Y]_m + U(X,Y)).
    pub fn nabla_at_base(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let v = self.u_map(x, y).minus(&self.bracket_m(x, y));
        v.scaled(&rat(1, 2))
    }

    /// ⟨R(X_i,X_j)X_k, X_l⟩ for homogeneous m-vectors, by the fifteen-term formula.
    pub fn riemann(&self, xi: &SparseVec, xj: &SparseVec, xk: &SparseVec, xl: &SparseVec) -> Rational {
        let (pi, pj, pk, pl) = (self.is_odd(xi), self.is_odd(xj), self.is_odd(xk), self.is_odd(xl));
        let s_i_jk = sign(pi && (pj ^ pk));
        let s_jk = sign(pj && pk);
        let s_ij = sign(pi && pj);
        let s_kl = sign(pk && pl);
        let s_ij_kl = sign((pi && pj) ^ (pk && pl));
        let bm = |u: &SparseVec, v: &SparseVec| self.bracket_m(u, v);
        let ip = |u: &SparseVec, v: &SparseVec| self.inner(u, v);

        let ij = bm(xi, xj);
        let kl = bm(xk, xl);
        let jk = bm(xj, xk);
        let il = bm(xi, xl);
        let ik = bm(xi, xk);
        let jl = bm(xj, xl);
        let kl_g = self.bracket(xk, xl);

        let mut acc = int(-2) * ip(&ij, &kl);
        acc += &s_i_jk * ip(&jk, &il);
        acc -= &s_jk * ip(&ik, &jl);
        acc -= ip(xi, &bm(&jk, xl));
        acc += ip(&bm(xi, &jk), xl);
        acc += &s_ij * ip(xj, &bm(&ik, xl));
        acc += &s_jk * ip(&bm(&ik, xj), xl);
        acc += &s_i_jk * ip(xj, &bm(xk, &il));
        acc += &s_ij_kl * ip(&bm(xj, &il), xk);
        acc -= &s_jk * ip(xi, &bm(xk, &jl));
        acc -= &s_kl * ip(&bm(xi, &jl), xk);
        acc += int(2) * ip(xi, &bm(xj, &kl_g));
        acc -= int(2) * &s_ij * ip(xj, &bm(xi, &kl_g));
        acc += &s_i_jk * ip(&self.u_map(xj, xk), &self.u_map(xi, xl));
        acc -= &s_jk * ip(&self.u_map(xi, xk), &self.u_map(xj, xl));
        acc * rat(1, 4)
    }

    /// The four-term formula valid for naturally reductive metrics.
    pub fn riemann_naturally_reductive(
        &self,
        xi: &SparseVec,
        xj: &SparseVec,
        xk: &SparseVec,
        xl: &SparseVec,
    ) -> Rational {
        let (pj, pk, pl) = (self.is_odd(xj), self.is_odd(xk), self.is_odd(xl));
        let kl_g = self.bracket(xk, xl);
        let kl_m = self.project_m(&kl_g);
        let kl_k = self.project_k(&kl_g);
        let mut acc = int(2) * self.inner(xi, &self.bracket_m(xj, &kl_m));
        acc += int(4) * self.inner(xi, &self.bracket_m(xj, &kl_k));
        // signs of these two terms follow from reducing the fifteen-term formula
        // with U = 0; the opposite choice fails already for even sectional curvature
        acc -= sign(pj && pk) * self.inner(xi, &self.bracket_m(xk, &self.bracket_m(xj, xl)));
        acc += sign((pj ^ pk) && pl) * self.inner(xi, &self.bracket_m(xl, &self.bracket_m(xj, xk)));
        acc * rat(1, 4)
    }

    /// Riemann component on local basis indices; recomputed by the
    /// naturally reductive formula when that applies.
    pub fn riemann_component(&self, i: usize, j: usize, k: usize, l: usize) -> Result<Rational> {
        let e = |t: usize| SparseVec::unit(self.m[t]);
        let (xi, xj, xk, xl) = (e(i), e(j), e(k), e(l));
        let r = self.riemann(&xi, &xj, &xk, &xl);
        if self.naturally_reductive {
            let alt = self.riemann_naturally_reductive(&xi, &xj, &xk, &xl);
            if alt != r {
                return Err(Error::RouteDisagreement(format!(
                    "R({i},{j},{k},{l}): fifteen-term {r} vs naturally reductive {alt}"
                )));
            }
        }
        Ok(r)
    }

    /// Ric(X, Z) = Σ_j (−1)^{[j]+[j][Z]} ⟨R(X, X_j)Z, X̄_j⟩, bilinear in X and Z.
    pub fn ricci_definition(&self, x: &SparseVec, z: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (a, xa) in x.iter() {
            for (c, zc) in z.iter() {
                let ea = SparseVec::unit(a);
                let ec = SparseVec::unit(c);
                let pc = self.real.odd[c];
                let mut t = Rational::zero();
                for (j, &b) in self.m.iter().enumerate() {
                    let pj = self.real.odd[b];
                    let r = self.riemann(&ea, &SparseVec::unit(b), &ec, &self.duals[j]);
                    if !r.is_zero() {
                        t += sign(pj ^ (pj && pc)) * r;
                    }
                }
                acc += xa * zc * t;
            }
        }
        acc
    }

    /// Ric(X_i, X̄_i) = −½B(X_i,X̄_i) + ½Σ_j⟨[X_i,X̄_j]_m,[X_j,X̄_i]_m⟩
    ///               − ¼Σ_{j,k}⟨X_i,[X̄_j,X̄_k]_m⟩⟨[X_k,X_j]_m,X̄_i⟩.
    pub fn ricci_general(&self, i: usize) -> Rational {
        let xi = SparseVec::unit(self.m[i]);
        let di = &self.duals[i];
        let mut acc = -(self.real.killing(&xi, di) * rat(1, 2));
        let mut two = Rational::zero();
        for (j, &b) in self.m.iter().enumerate() {
            let xj = SparseVec::unit(b);
            two += self.inner(&self.bracket_m(&xi, &self.duals[j]), &self.bracket_m(&xj, di));
        }
        acc += two * rat(1, 2);
        let mut three = Rational::zero();
        for (j, &b) in self.m.iter().enumerate() {
            for (k, &c) in self.m.iter().enumerate() {
                let first = self.inner(&xi, &self.bracket_m(&self.duals[j], &self.duals[k]));
                if first.is_zero() {
                    continue;
                }
                let second = self.inner(&self.bracket_m(&SparseVec::unit(c), &SparseVec::unit(b)), di);
                three += first * second;
            }
        }
        acc - three * rat(1, 4)
    }

    /// −½B(X_i,X̄_i) + ¼Σ_j⟨[X_i,X̄_j]_m,[X_j,X̄_i]_m⟩, naturally reductive only.
    pub fn ricci_naturally_reductive(&self, i: usize) -> Rational {
        let xi = SparseVec::unit(self.m[i]);
        let di = &self.duals[i];
        let mut acc = -(self.real.killing(&xi, di) * rat(1, 2));
        for (j, &b) in self.m.iter().enumerate() {
            let xj = SparseVec::unit(b);
            acc += self.inner(&self.bracket_m(&xi, &self.duals[j]), &self.bracket_m(&xj, di)) * rat(1, 4);
        }
        acc
    }

    /// S = Σ (−1)^{[X_i]} Ric(X_i, X̄_i) given the diagonal values in local order.
    pub fn scalar_supertrace(&self, ric_diag: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, &a) in self.m.iter().enumerate() {
            acc += sign(self.real.odd[a]) * &ric_diag[i];
        }
        acc
    }

    /// S = −½Σ B(X̄_i, X_i) + ¼Σ_{i,j}⟨[X̄_i,X̄_j]_m, [X_j,X_i]_m⟩.
    pub fn scalar_closed(&self) -> Rational {
        let mut kill = Rational::zero();
        let mut quad = Rational::zero();
        for (i, &a) in self.m.iter().enumerate() {
            let xi = SparseVec::unit(a);
            kill += self.real.killing(&self.duals[i], &xi);
            for (j, &b) in self.m.iter().enumerate() {
                let top = self.bracket_m(&self.duals[i], &self.duals[j]);
                if top.is_zero() {
                    continue;
                }
                quad += self.inner(&top, &self.bracket_m(&SparseVec::unit(b), &xi));
            }
        }
        -(kill * rat(1, 2)) + quad * rat(1, 4)
    }

    /// Σ_j f(X̄_j, X_j) and Σ_j (−1)^{[X_j]} f(X_j, X̄_j) for f(u,v) = [u,v]_m.
    pub fn dual_bracket_sums(&self) -> (SparseVec, SparseVec) {
        let mut left = SparseVec::new();
        let mut right = SparseVec::new();
        for (j, &b) in self.m.iter().enumerate() {
            let xj = SparseVec::unit(b);
            left = left.plus(&self.bracket_m(&self.duals[j], &xj));
            right.axpy(&sign(self.real.odd[b]), &self.bracket_m(&xj, &self.duals[j]));
        }
        (left, right)
    }

    /// Σ_j ⟨[Y, X̄_j]_m, X_j⟩ for Y in k.
    pub fn trace_ad(&self, y: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (j, &b) in self.m.iter().enumerate() {
            acc += self.inner(&self.bracket_m(y, &self.duals[j]), &SparseVec::unit(b));
        }
        acc
    }

    /// Σ_i U(X̄_i, X_i).
    pub fn u_trace(&self) -> SparseVec {
        let mut acc = SparseVec::new();
        for (i, &a) in self.m.iter().enumerate() {
            acc = acc.plus(&self.u_map(&self.duals[i], &SparseVec::unit(a)));
        }
        acc
    }
}

/// Which independent computation produced a Ricci value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Definition,
    Thmric,
    Coefficients,
    Group,
}

impl Route {
    pub const DIAGONAL: [Route; 3] = [Route::Definition, Route::Thmric, Route::Coefficients];
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Route::Definition => "definition",
            Route::Thmric => "thmric",
            Route::Coefficients => "coefficients",
            Route::Group => "group",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definition" => Ok(Route::Definition),
            "thmric" => Ok(Route::Thmric),
            "coefficients" => Ok(Route::Coefficients),
            "group" => Ok(Route::Group),
            other => Err(Error::Parse(format!("unknown route {other:?}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RicciReport {
    #[serde(with = "crate::scalars::rational_vec")]
    pub metric: Vec<Rational>,
    /// Ric = r_i·Q on m_i; empty for the group route.
    #[serde(with = "crate::scalars::rational_vec")]
    pub r: Vec<Rational>,
    /// Full Ricci Gram matrix on the real basis (group route only).
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_matrix")]
    pub ricci_gram: Option<Vec<Vec<Rational>>>,
    #[serde(with = "crate::scalars::rational_str")]
    pub scalar: Rational,
    pub routes_agreed: Vec<Route>,
}

mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<Vec<Vec<Rational>>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match m {
            Some(m) => {
                let rows: Vec<Vec<String>> =
                    m.iter().map(|r| r.iter().map(crate::scalars::fmt_rational).collect()).collect();
                Some(rows).serialize(s)
            }
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Vec<Rational>>>, D::Error> {
        use serde::de::Error as _;
        let rows: Option<Vec<Vec<String>>> = Option::deserialize(d)?;
        rows.map(|rows| {
            rows.into_iter().map(|r| r.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()).collect()
        })
        .transpose()
    }
}

fn block_value(values: &[Rational], members: &[usize], what: &str, block: usize) -> Result<Rational> {
    let first = values[members[0]].clone();
    if members.iter().any(|&l| values[l] != first) {
        return Err(Error::RouteDisagreement(format!("{what}: Ricci not constant on block {}", block + 1)));
    }
    Ok(first)
}

/// Per-block Ricci coefficients of a diagonal metric by the requested routes.
/// Any two routes that differ, or a scalar curvature mismatch, is an error.
pub fn ricci(
    dec: &IsotropyDecomposition<'_>,
    inv: &FlagInvariants,
    metric: &DiagonalMetric,
    routes: &[Route],
) -> Result<RicciReport> {
    if routes.is_empty() {
        return Err(Error::Parse("no Ricci route requested".into()));
    }
    if routes.contains(&Route::Group) {
        return Err(Error::UnsupportedDiagram("the group route needs a group metric".into()));
    }
    let geo = Geometry::homogeneous(dec, metric)?;
    let local_members: Vec<Vec<usize>> =
        dec.blocks.iter().map(|b| b.basis.iter().map(|a| geo.local[a]).collect()).collect();
    let mut results: Vec<(Route, Vec<Rational>)> = Vec::new();
    let mut scalars: Vec<(String, Rational)> = Vec::new();
    let mut routes = routes.to_vec();
    routes.sort();
    routes.dedup();
    for &route in &routes {
        let r = match route {
            Route::Definition | Route::Thmric => {
                let diag: Vec<Rational> = (0..geo.dim())
                    .into_par_iter()
                    .map(|i| match route {
                        Route::Definition => geo.ricci_definition(&SparseVec::unit(geo.m[i]), &geo.duals[i]),
                        _ => geo.ricci_general(i),
                    })
                    .collect();
                if geo.naturally_reductive && route == Route::Thmric {
                    for (i, v) in diag.iter().enumerate() {
                        if *v != geo.ricci_naturally_reductive(i) {
                            return Err(Error::RouteDisagreement(format!(
                                "naturally reductive Ricci differs at basis vector {i}"
                            )));
                        }
                    }
                }
                scalars.push((format!("{route} supertrace"), geo.scalar_supertrace(&diag)));
                let mut r = Vec::new();
                for (bi, members) in local_members.iter().enumerate() {
                    // Ric(X, X̄) = r/x
                    r.push(block_value(&diag, members, &route.to_string(), bi)? * &metric.x[bi]);
                }
                r
            }
            Route::Coefficients => crate::einstein::ricci_coefficients(inv, metric)?,
            Route::Group => unreachable!("rejected above"),
        };
        results.push((route, r));
    }
    let (first_route, r) = results[0].clone();
    for (route, other) in &results[1..] {
        if *other != r {
            return Err(Error::RouteDisagreement(format!(
                "{first_route} gives {:?} but {route} gives {:?}",
                r.iter().map(crate::scalars::fmt_rational).collect::<Vec<_>>(),
                other.iter().map(crate::scalars::fmt_rational).collect::<Vec<_>>()
            )));
        }
    }
    let d = inv.d();
    let mut s_blocks = Rational::zero();
    for i in 0..r.len() {
        s_blocks += &d[i] * &r[i] / &metric.x[i];
    }
    scalars.push(("Σ d_i r_i/x_i".into(), s_blocks.clone()));
    scalars.push(("closed supertrace".into(), geo.scalar_closed()));
    scalars.push(("invariants".into(), crate::einstein::scalar_curvature(inv, metric)));
    for (what, s) in &scalars {
        if *s != s_blocks {
            return Err(Error::RouteDisagreement(format!("scalar curvature: {what} gives {s}, expected {s_blocks}")));
        }
    }
    Ok(RicciReport { metric: metric.x.clone(), r, ricci_gram: None, scalar: s_blocks, routes_agreed: routes })
}

/// Left-invariant metric on a Lie supergroup, Koszul route.
pub struct GroupGeometry<'a> {
    real: &'a RealAlgebra,
    gram: Vec<SparseVec>,
    duals: Vec<SparseVec>,
    /// ∇_{e_a} e_b
    nabla_table: Vec<Vec<SparseVec>>,
}

impl<'a> GroupGeometry<'a> {
    pub fn new(real: &'a RealAlgebra, metric: &GroupMetric) -> Result<Self> {
        if metric.gram.len() != real.dim() {
            return Err(Error::DimensionMismatch(format!("gram must be {0}x{0}", real.dim())));
        }
        let gram = metric.rows();
        let duals = dual_basis(&gram)?;
        let mut g = GroupGeometry { real, gram, duals, nabla_table: Vec::new() };
        let n = real.dim();
        g.nabla_table =
            (0..n).map(|a| (0..n).map(|b| g.koszul(&SparseVec::unit(a), &SparseVec::unit(b))).collect()).collect();
        Ok(g)
    }

    pub fn inner(&self, u: &SparseVec, v: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (a, x) in u.iter() {
            for (b, g) in self.gram[a].iter() {
                let y = v.get(b);
                if !y.is_zero() {
                    acc += x * g * y;
                }
            }
        }
        acc
    }

    fn is_odd(&self, v: &SparseVec) -> bool {
        v.support().next().is_some_and(|a| self.real.odd[a])
    }

    pub fn dual(&self, j: usize) -> &SparseVec {
        &self.duals[j]
    }

    /// 2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨X,[Y,Z]⟩ − (−1)^{[X][Y]}⟨Y,[X,Z]⟩, solved against duals.
    fn koszul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let s = sign(self.is_odd(x) && self.is_odd(y));
        let xy = self.real.bracket(x, y);
        let mut out = SparseVec::new();
        for (j, dj) in self.duals.iter().enumerate() {
            let v = self.inner(&xy, dj)
                - self.inner(x, &self.real.bracket(y, dj))
                - &s * self.inner(y, &self.real.bracket(x, dj));
            if !v.is_zero() {
                out.add_at(j, &(v * rat(1, 2)));
            }
        }
        out
    }

    /// ∇_X Y for left-invariant fields, bilinear.
    pub fn levi_civita(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, xa) in x.iter() {
            for (b, yb) in y.iter() {
                out.axpy(&(xa * yb), &self.nabla_table[a][b]);
            }
        }
        out
    }

    /// R(X,Y)Z = ∇_{[X,Y]}Z − ∇_X∇_Y Z + (−1)^{[X][Y]}∇_Y∇_X Z.
    pub fn curvature(&self, x: &SparseVec, y: &SparseVec, z: &SparseVec) -> SparseVec {
        let s = sign(self.is_odd(x) && self.is_odd(y));
        let a = self.levi_civita(&self.real.bracket(x, y), z);
        let b = self.levi_civita(x, &self.levi_civita(y, z));
        let c = self.levi_civita(y, &self.levi_civita(x, z));
        let mut out = a.minus(&b);
        out.axpy(&s, &c);
        out
    }

    pub fn riemann(&self, xi: &SparseVec, xj: &SparseVec, xk: &SparseVec, xl: &SparseVec) -> Rational {
        self.inner(&self.curvature(xi, xj, xk), xl)
    }

    /// Full Ricci Gram matrix Ric(e_i, e_k).
    pub fn ricci_gram(&self) -> Vec<Vec<Rational>> {
        let n = self.real.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let mut acc = Rational::zero();
                        for j in 0..n {
                            let pj = self.real.odd[j];
                            let pk = self.real.odd[k];
                            let r = self.riemann(
                                &SparseVec::unit(i),
                                &SparseVec::unit(j),
                                &SparseVec::unit(k),
                                &self.duals[j],
                            );
                            acc += sign(pj ^ (pj && pk)) * r;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

/// Group-route report: full Ricci Gram and S = Σ(−1)^{[i]} Ric(X_i, X̄_i).
pub fn ricci_group(real: &RealAlgebra, metric: &GroupMetric) -> Result<RicciReport> {
    let geo = GroupGeometry::new(real, metric)?;
    let ric = geo.ricci_gram();
    let mut scalar = Rational::zero();
    for i in 0..real.dim() {
        let mut v = Rational::zero();
        for (k, c) in geo.duals[i].iter() {
            v += c * &ric[i][k];
        }
        scalar += sign(real.odd[i]) * v;
    }
    Ok(RicciReport {
        metric: Vec::new(),
        r: Vec::new(),
        ricci_gram: Some(ric),
        scalar,
        routes_agreed: vec![Route::Group],
    })
}

/// If Ric = c·g, returns c.
pub fn einstein_constant(ricci_gram: &[Vec<Rational>], gram: &[Vec<Rational>]) -> Option<Rational> {
    let mut c: Option<Rational> = None;
    for (rr, gr) in ricci_gram.iter().zip(gram) {
        for (r, g) in rr.iter().zip(gr) {
            if g.is_zero() {
                if !r.is_zero() {
                    return None;
                }
                continue;
            }
            let v = r / g;
            match &c {
                None => c = Some(v),
                Some(x) if *x != v => return None,
                _ => {}
            }
        }
    }
    c.or_else(|| Some(Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{CircledDiagram, FlagContext};

    #[test]
    fn dual_basis_examples() {
        // SL(1|1): (X₁/x₁, X₃/x₂, −X₂/x₂)
        let (x1, x2) = (int(3), rat(2, 5));
        let g = GroupMetric::sl11(x1.clone(), x2.clone()).unwrap();
        let d = dual_basis(&g.rows()).unwrap();
        assert_eq!(d[0], SparseVec::unit(0).scaled(&(int(1) / &x1)));
        assert_eq!(d[1], SparseVec::unit(2).scaled(&(int(1) / &x2)));
        assert_eq!(d[2], SparseVec::unit(1).scaled(&(int(-1) / &x2)));
        // normalised odd pair
        let pair = vec![SparseVec::from_pairs([(1, int(1))]), SparseVec::from_pairs([(0, int(-1))])];
        let d = dual_basis(&pair).unwrap();
        assert_eq!(d[0], SparseVec::unit(1));
        assert_eq!(d[1], SparseVec::unit(0).scaled(&int(-1)));
        assert!(dual_basis(&[SparseVec::new()]).is_err());
    }

    #[test]
    fn parse_metric_rejects_zero_and_junk() {
        assert_eq!(parse_metric("1, 1/2,-3").unwrap().x, vec![int(1), rat(1, 2), int(-3)]);
        assert!(parse_metric("1,0").is_err());
        assert!(parse_metric("").is_err());
        assert!(parse_metric("1,,2").is_err());
    }

    #[test]
    fn sl11_connection_table() {
        let real = RealAlgebra::sl11();
        let (x1, x2) = (int(3), int(7));
        let g = GroupGeometry::new(&real, &GroupMetric::sl11(x1.clone(), x2.clone()).unwrap()).unwrap();
        let e = SparseVec::unit;
        assert_eq!(g.levi_civita(&e(1), &e(2)), e(0).scaled(&rat(1, 2)));
        assert_eq!(g.levi_civita(&e(0), &e(1)), e(1).scaled(&-(&x1 / (int(2) * &x2))));
        assert_eq!(g.levi_civita(&e(0), &e(2)), e(2).scaled(&(&x1 / (int(2) * &x2))));
        assert!(g.levi_civita(&e(1), &e(1)).is_zero());
        assert_eq!(g.riemann(&e(1), &e(2), &e(2), &e(1)), -(&x1 / int(4)));
        let rep = ricci_group(&real, &GroupMetric::sl11(x1.clone(), x2.clone()).unwrap()).unwrap();
        let gram = GroupMetric::sl11(x1.clone(), x2.clone()).unwrap().gram;
        assert_eq!(einstein_constant(rep.ricci_gram.as_ref().unwrap(), &gram), Some(&x1 / (int(2) * &x2 * &x2)));
    }

    #[test]
    fn sl11_u_map_as_coset_with_trivial_k() {
        let real = RealAlgebra::sl11();
        let (x1, x2) = (int(3), int(7));
        let gm = GroupMetric::sl11(x1.clone(), x2.clone()).unwrap();
        let geo = Geometry::with_gram(&real, vec![true; 3], gm.rows(), false).unwrap();
        let e = SparseVec::unit;
        assert_eq!(geo.u_map(&e(0), &e(1)), e(1).scaled(&-(&x1 / &x2)));
        assert_eq!(geo.u_map(&e(1), &e(0)), geo.u_map(&e(0), &e(1)));
        // both engines agree on every component
        let grp = GroupGeometry::new(&real, &gm).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let (a, b, c, d) = (e(i), e(j), e(k), e(l));
                        assert_eq!(geo.riemann(&a, &b, &c, &d), grp.riemann(&a, &b, &c, &d), "({i},{j},{k},{l})");
                    }
                }
            }
        }
    }

    #[test]
    fn su41_uniform_metric_all_routes() {
        let d = CircledDiagram::su(4, 1, &[1, 2]).unwrap();
        let ctx = FlagContext::for_diagram(&d).unwrap();
        let dec = ctx.decompose(&d).unwrap();
        let inv = dec.invariants().unwrap();
        let metric = DiagonalMetric::from_ints(&[1, 1, 1]).unwrap();
        let rep = ricci(&dec, &inv, &metric, &Route::DIAGONAL).unwrap();
        assert_eq!(rep.r, vec![rat(5, 2); 3]);
        assert_eq!(rep.scalar, int(15));
        let geo = Geometry::homogeneous(&dec, &metric).unwrap();
        assert!(geo.u_trace().is_zero());
        for (i, j, k, l) in [(0, 1, 2, 3), (1, 4, 4, 1), (2, 5, 7, 9), (0, 0, 3, 3)] {
            geo.riemann_component(i, j, k, l).unwrap();
        }
    }

    #[test]
    fn osp24_nonuniform_metric_routes_agree() {
        let d = CircledDiagram::osp(2, 2).unwrap();
        let ctx = FlagContext::for_diagram(&d).unwrap();
        let dec = ctx.decompose(&d).unwrap();
        let inv = dec.invariants().unwrap();
        let metric = DiagonalMetric::from_ints(&[1, 2]).unwrap();
        let rep = ricci(&dec, &inv, &metric, &Route::DIAGONAL).unwrap();
        assert_eq!(rep.r, vec![rat(-3, 2), int(-3)]);
    }
}
