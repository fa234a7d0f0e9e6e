//! Executable invariant and oracle suites.
//!
//! Each check runs over a parameter grid bounded by `max_size` and records
//! how many instances it examined and the first failure, if any.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{einstein_constant, ricci, ricci_group, DiagonalMetric, Geometry, GroupMetric, Route};
use crate::einstein::{
    classify_osp, classify_su_in, dual_parameters, duality_check, positive_table, residual, ricci_closed_form,
    scalar_closed_form, Positivity, SolutionKind,
};
use crate::error::{Error, Result};
use crate::flag::{
    closed_casimirs, closed_forms, counted_superdimensions, CircledDiagram, DiagramFamily, FlagContext,
    IsotropyDecomposition, StructureTable,
};
use crate::linalg::{Mat, SparseVec};
use crate::scalars::{fmt_rational, int, rat, Rational};
use crate::superalgebra::RealAlgebra;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Tables,
    Einstein,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "tables" => Ok(Suite::Tables),
            "einstein" => Ok(Suite::Einstein),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Identities => "identities",
            Suite::Tables => "tables",
            Suite::Einstein => "einstein",
            Suite::All => "all",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of instances examined.
    pub cases: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub max_size: usize,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Outcome of one instance: `Err` carries a description of the failure.
type Outcome = std::result::Result<(), String>;

fn check<T: Sync>(name: &str, items: &[T], f: impl Fn(&T) -> Outcome + Sync) -> Check {
    let outcomes: Vec<Outcome> = items.par_iter().map(&f).collect();
    let failure = outcomes.into_iter().find_map(|o| o.err());
    Check { name: name.to_string(), passed: failure.is_none(), cases: items.len(), failure }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lift<T>(r: Result<T>, ctx: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{ctx}: {e}"))
}

/// Nonzero rational with small numerator and denominator.
pub fn random_nonzero(rng: &mut StdRng) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-9i64..=9);
    }
    rat(n, rng.gen_range(1i64..=5))
}

fn random_metric(rng: &mut StdRng, s: usize) -> DiagonalMetric {
    DiagonalMetric::new((0..s).map(|_| random_nonzero(rng)).collect()).expect("nonzero entries")
}

/// Every su pair (m, n) with m + n in 4..=max_sum, excluding m = n < 3.
fn su_pairs(max_sum: usize, max_each: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 1..=max_each {
        for n in 1..=max_each {
            if m + n >= 4 && m + n <= max_sum && !(m == n && m < 3) {
                out.push((m, n));
            }
        }
    }
    out
}

/// All one- and two-node diagrams of su(m|n).
fn su_diagrams(m: usize, n: usize) -> Vec<CircledDiagram> {
    let r = m + n - 1;
    let mut out = Vec::new();
    for p in 1..=r {
        out.push(CircledDiagram::su(m, n, &[p]).expect("valid node"));
        for q in p + 1..=r {
            out.push(CircledDiagram::su(m, n, &[p, q]).expect("valid nodes"));
        }
    }
    out
}

fn osp_diagrams(max_n: usize) -> Vec<CircledDiagram> {
    (2..=max_n).flat_map(|n| (2..=n).map(move |p| CircledDiagram::osp(n, p).expect("valid node"))).collect()
}

/// Runs `f` on every decomposition, building one algebra per (family, m, n).
fn per_diagram(diagrams: &[CircledDiagram], f: impl Fn(&IsotropyDecomposition<'_>) -> Outcome + Sync) -> Vec<Outcome> {
    let mut groups: Vec<(DiagramFamily, usize, usize, Vec<&CircledDiagram>)> = Vec::new();
    for d in diagrams {
        match groups.iter_mut().find(|g| (g.0, g.1, g.2) == (d.family, d.m, d.n)) {
            Some(g) => g.3.push(d),
            None => groups.push((d.family, d.m, d.n, vec![d])),
        }
    }
    groups
        .par_iter()
        .flat_map(|(family, m, n, ds)| {
            let ctx = match FlagContext::new(*family, *m, *n) {
                Ok(c) => c,
                Err(e) => return vec![Err(format!("{family}({m}|{n}): {e}"))],
            };
            ds.par_iter()
                .map(|d| {
                    let dec = lift(ctx.decompose(d), &d.to_string())?;
                    f(&dec).map_err(|e| format!("{d}: {e}"))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn diagram_check(
    name: &str,
    diagrams: &[CircledDiagram],
    f: impl Fn(&IsotropyDecomposition<'_>) -> Outcome + Sync,
) -> Check {
    let outcomes = per_diagram(diagrams, f);
    let failure = outcomes.into_iter().find_map(|o| o.err());
    Check { name: name.to_string(), passed: failure.is_none(), cases: diagrams.len(), failure }
}

fn show(v: &[Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
}

// ---- identities ----

fn real_algebras(max_size: usize) -> Vec<(String, RealAlgebra, Rational)> {
    let mut specs: Vec<(DiagramFamily, usize, usize)> =
        su_pairs(max_size.min(5), max_size).into_iter().map(|(m, n)| (DiagramFamily::Su, m, n)).collect();
    for n in 2..=(max_size / 2).clamp(2, 3) {
        specs.push((DiagramFamily::Osp, 2, n));
    }
    specs
        .par_iter()
        .filter_map(|&(family, m, n)| {
            let ctx = FlagContext::new(family, m, n).ok()?;
            // B = −bQ
            let b = match family {
                DiagramFamily::Su => int(2 * (m as i64 - n as i64)),
                DiagramFamily::Osp => int(-2 * n as i64),
            };
            let name = match family {
                DiagramFamily::Su => format!("su({m}|{n})"),
                DiagramFamily::Osp => format!("osp(2|{})", 2 * n),
            };
            Some((name, ctx.real, b))
        })
        .collect()
}

fn super_jacobi(real: &RealAlgebra) -> Outcome {
    let d = real.dim();
    for a in 0..d {
        for b in 0..d {
            let ab = real.bracket_basis(a, b);
            let s = if real.odd[a] && real.odd[b] { int(-1) } else { int(1) };
            for c in 0..d {
                let lhs = real.bracket(&SparseVec::unit(a), real.bracket_basis(b, c));
                let rhs = real
                    .bracket(ab, &SparseVec::unit(c))
                    .plus(&real.bracket(&SparseVec::unit(b), real.bracket_basis(a, c)).scaled(&s));
                ensure(lhs == rhs, || {
                    format!("Jacobi fails on ({}, {}, {})", real.labels[a], real.labels[b], real.labels[c])
                })?;
            }
        }
    }
    Ok(())
}

fn q_invariance(real: &RealAlgebra) -> Outcome {
    let d = real.dim();
    for a in 0..d {
        for b in 0..d {
            let ab = real.bracket_basis(a, b);
            for c in 0..d {
                let lhs = real.q(ab, &SparseVec::unit(c));
                let rhs = real.q(&SparseVec::unit(a), real.bracket_basis(b, c));
                ensure(lhs == rhs, || {
                    format!("Q([a,b],c) != Q(a,[b,c]) on ({}, {}, {})", real.labels[a], real.labels[b], real.labels[c])
                })?;
            }
        }
    }
    Ok(())
}

fn killing_closed(real: &RealAlgebra, b: &Rational) -> Outcome {
    let d = real.dim();
    for a in 0..d {
        for c in a..d {
            let (u, v) = (SparseVec::unit(a), SparseVec::unit(c));
            let k = real.killing(&u, &v);
            let expect = -(b * real.q(&u, &v));
            ensure(k == expect, || format!("B({}, {}) = {k}, expected {expect}", real.labels[a], real.labels[c]))?;
        }
    }
    Ok(())
}

fn sign(odd: bool) -> Rational {
    if odd {
        int(-1)
    } else {
        int(1)
    }
}

/// Dual-basis symmetry Σ f(X̄_j, X_j) for f = ⟨·,·⟩ and f = [·,·]_m; the bracket sum vanishes.
fn dual_symmetry(geo: &Geometry<'_>) -> Outcome {
    let mut left = Rational::zero();
    let mut right = Rational::zero();
    for (j, &b) in geo.basis().iter().enumerate() {
        let xj = SparseVec::unit(b);
        left += geo.inner(geo.dual(j), &xj);
        right += sign(geo.real().odd[b]) * geo.inner(&xj, geo.dual(j));
    }
    ensure(left == right, || format!("Σ⟨X̄_j,X_j⟩ = {left} but Σ(−1)^[j]⟨X_j,X̄_j⟩ = {right}"))?;
    let (l, r) = geo.dual_bracket_sums();
    ensure(l.is_zero() && r.is_zero(), || "Σ[X̄_j,X_j]_m is not zero".into())
}

fn isotropy_trace(geo: &Geometry<'_>, k: &[usize]) -> Outcome {
    for &y in k {
        if geo.real().odd[y] {
            continue;
        }
        let t = geo.trace_ad(&SparseVec::unit(y));
        ensure(t.is_zero(), || format!("Σ⟨[Y,X̄_j]_m,X_j⟩ = {t} for Y = {}", geo.real().labels[y]))?;
    }
    Ok(())
}

fn u_trace_vanishes(geo: &Geometry<'_>) -> Outcome {
    ensure(geo.u_trace().is_zero(), || "Σ U(X̄_i, X_i) ≠ 0".into())?;
    let mut alt = SparseVec::new();
    for (i, &a) in geo.basis().iter().enumerate() {
        alt.axpy(&sign(geo.real().odd[a]), &geo.u_map(&SparseVec::unit(a), geo.dual(i)));
    }
    ensure(alt.is_zero(), || "Σ (−1)^[i] U(X_i, X̄_i) ≠ 0".into())
}

fn u_pairing_vanishes(geo: &Geometry<'_>) -> Outcome {
    let mut trace_terms = Vec::new();
    for (j, &b) in geo.basis().iter().enumerate() {
        trace_terms.push(geo.u_map(geo.dual(j), &SparseVec::unit(b)));
    }
    for (i, &a) in geo.basis().iter().enumerate() {
        let u = geo.u_map(&SparseVec::unit(a), geo.dual(i));
        let s: Rational = trace_terms.iter().map(|t| geo.inner(&u, t)).sum();
        ensure(s.is_zero(), || format!("Σ_j ⟨U(X_i,X̄_i),U(X̄_j,X_j)⟩ = {s} at i = {i}"))?;
    }
    Ok(())
}

/// [ijk] by the triple-sum formula on arbitrary bases of the blocks.
pub fn structure_constants_in_basis(
    dec: &IsotropyDecomposition<'_>,
    bases: &[Vec<SparseVec>],
) -> Result<StructureTable> {
    let real = dec.real();
    let s = dec.s();
    let mut duals = Vec::with_capacity(s);
    for basis in bases {
        let gram = Mat::from_rows(basis.iter().map(|u| basis.iter().map(|v| real.q(u, v)).collect()).collect());
        let inv = gram.inverse().ok_or_else(|| Error::DegenerateForm("block basis is Q-degenerate".into()))?;
        let n = basis.len();
        duals.push(
            (0..n)
                .map(|j| {
                    let mut acc = SparseVec::new();
                    for (l, v) in basis.iter().enumerate() {
                        acc.axpy(inv.get(l, j), v);
                    }
                    acc
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut t = StructureTable::zeros(s);
    for i in 0..s {
        for j in 0..s {
            for k in 0..s {
                let mut acc = Rational::zero();
                for (alpha, va) in bases[i].iter().enumerate() {
                    for (beta, vb) in bases[j].iter().enumerate() {
                        let x = dec.project_block(&real.bracket(va, vb), k);
                        if x.is_zero() {
                            continue;
                        }
                        let y = dec.project_block(&real.bracket(&duals[j][beta], &duals[i][alpha]), k);
                        if y.is_zero() {
                            continue;
                        }
                        for (gamma, vc) in bases[k].iter().enumerate() {
                            let q1 = real.q(vc, &x);
                            if !q1.is_zero() {
                                acc += q1 * real.q(&y, &duals[k][gamma]);
                            }
                        }
                    }
                }
                t.set(i, j, k, -acc);
            }
        }
    }
    Ok(t)
}

/// Replaces each block basis by a random unitriangular change within each parity.
fn scrambled_bases(dec: &IsotropyDecomposition<'_>, rng: &mut StdRng) -> Vec<Vec<SparseVec>> {
    let real = dec.real();
    dec.blocks
        .iter()
        .map(|blk| {
            blk.basis
                .iter()
                .enumerate()
                .map(|(pos, &a)| {
                    let mut v = SparseVec::unit(a);
                    for &b in &blk.basis[pos + 1..] {
                        if real.odd[b] == real.odd[a] && rng.gen_bool(0.5) {
                            v.add_at(b, &random_nonzero(rng));
                        }
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn identities(max_size: usize) -> Vec<Check> {
    let algebras = real_algebras(max_size);
    let mut checks = vec![
        check("super-Jacobi identity", &algebras, |(name, real, _)| {
            super_jacobi(real).map_err(|e| format!("{name}: {e}"))
        }),
        check("ad-invariance of Q", &algebras, |(name, real, _)| {
            q_invariance(real).map_err(|e| format!("{name}: {e}"))
        }),
        check("Killing form B = −bQ closed form", &algebras, |(name, real, b)| {
            killing_closed(real, b).map_err(|e| format!("{name}: {e}"))
        }),
    ];
    let mut diagrams: Vec<CircledDiagram> = Vec::new();
    for (m, n) in su_pairs(max_size.min(5), max_size) {
        diagrams.extend(su_diagrams(m, n));
    }
    diagrams.extend(osp_diagrams((max_size / 2).clamp(2, 3)));
    let with_geo = |f: fn(&Geometry<'_>, &IsotropyDecomposition<'_>) -> Outcome| {
        move |dec: &IsotropyDecomposition<'_>| {
            let mut rng = StdRng::seed_from_u64(dec.diagram.circled.iter().fold(17, |h, &c| h * 31 + c as u64));
            let metric = random_metric(&mut rng, dec.s());
            let geo = lift(Geometry::homogeneous(dec, &metric), "geometry")?;
            f(&geo, dec)
        }
    };
    checks.push(diagram_check("dual-basis symmetry and Σ[X̄_j,X_j]_m = 0", &diagrams, with_geo(|g, _| dual_symmetry(g))));
    checks.push(diagram_check("Σ⟨[Y,X̄_j]_m,X_j⟩ = 0 for even Y in k", &diagrams, with_geo(|g, d| isotropy_trace(g, &d.k))));
    checks.push(diagram_check("Σ U(X̄_i,X_i) = 0", &diagrams, with_geo(|g, _| u_trace_vanishes(g))));
    checks.push(diagram_check("Σ_j ⟨U(X_i,X̄_i),U(X̄_j,X_j)⟩ = 0", &diagrams, with_geo(|g, _| u_pairing_vanishes(g))));
    checks.push(diagram_check("[ijk] independent of the block bases", &diagrams, |dec| {
        let mut rng = StdRng::seed_from_u64(dec.diagram.circled.iter().fold(5, |h, &c| h * 37 + c as u64));
        let reference = dec.structure_constants();
        let bases = scrambled_bases(dec, &mut rng);
        let other = lift(structure_constants_in_basis(dec, &bases), "basis change")?;
        ensure(other == reference, || "[ijk] changed under a change of block bases".into())
    }));
    let tuples = [(4, 1, 1, 2), (3, 2, 1, 3), (3, 2, 2, 4), (2, 3, 1, 4), (4, 2, 2, 4)];
    checks.push(check("duality map on solution sets", &tuples, |&(m, n, p, q)| {
        let ok = lift(duality_check(m, n, p, q), "duality")?;
        let (m2, n2, p2, q2) = dual_parameters(m, n, p, q);
        ensure(dual_parameters(m2, n2, p2, q2) == (m, n, p, q), || "duality map is not an involution".into())?;
        ensure(ok, || format!("({m},{n},{p},{q}) does not map onto ({m2},{n2},{p2},{q2})"))
    }));
    checks
}

// ---- tables ----

fn tables(max_size: usize) -> Vec<Check> {
    let mut su = Vec::new();
    for (m, n) in su_pairs(2 * max_size, max_size) {
        su.extend(su_diagrams(m, n));
    }
    let osp = osp_diagrams(max_size.max(2));
    let mut checks = vec![
        diagram_check("su Casimir operator = highest-weight closed form", &su, |dec| {
            let closed = closed_casimirs(&dec.diagram);
            for i in 0..dec.s() {
                let c = lift(dec.casimir_operator(i), "Casimir")?;
                ensure(c == closed[i], || format!("block {}: operator {c}, closed form {}", i + 1, closed[i]))?;
                ensure(c == dec.casimir_closed(i), || format!("block {}: root-data route differs", i + 1))?;
            }
            Ok(())
        }),
        diagram_check("osp Casimir operator = closed form", &osp, |dec| {
            let closed = closed_casimirs(&dec.diagram);
            for i in 0..dec.s() {
                let c = lift(dec.casimir_operator(i), "Casimir")?;
                ensure(c == closed[i], || format!("block {}: operator {c}, closed form {}", i + 1, closed[i]))?;
            }
            Ok(())
        }),
    ];
    let mut small = Vec::new();
    for (m, n) in su_pairs(max_size.min(6), max_size) {
        small.extend(su_diagrams(m, n));
    }
    small.extend(osp_diagrams(max_size.clamp(2, 4)));
    checks.push(diagram_check("[ijk]: supertrace route = triple sum = closed form, sum rule", &small, |dec| {
        let a = dec.structure_constants();
        let b = dec.structure_constants_triple();
        ensure(a == b, || "supertrace and triple-sum routes differ".into())?;
        let cf = closed_forms(&dec.diagram);
        ensure(a == cf.ijk, || format!("computed {:?} vs closed {:?}", a.nonzero_sorted(), cf.ijk.nonzero_sorted()))?;
        let inv = lift(dec.invariants(), "invariants")?;
        if dec.s() == 1 && dec.diagram.family == DiagramFamily::Su {
            ensure(a.get(0, 0, 0).is_zero(), || "[111] ≠ 0".into())?;
        }
        for (i, blk) in inv.blocks.iter().enumerate() {
            let lhs = a.row_sum(i);
            let rhs = &blk.d * (&blk.b - int(2) * &blk.c);
            ensure(lhs == rhs, || format!("block {}: Σ[ijk] = {lhs}, d(b−2c) = {rhs}", i + 1))?;
        }
        Ok(())
    }));
    checks.push(diagram_check("block superdimensions and b match closed forms", &small, |dec| {
        let cf = closed_forms(&dec.diagram);
        let counted = counted_superdimensions(&dec.diagram);
        for (i, blk) in dec.blocks.iter().enumerate() {
            ensure(int(blk.d()) == cf.d[i], || format!("block {}: sdim {} vs closed {}", i + 1, blk.d(), cf.d[i]))?;
            ensure(blk.d() == counted[i], || format!("block {}: sdim {} vs counted {}", i + 1, blk.d(), counted[i]))?;
            let b = lift(dec.killing_ratio(i), "Killing ratio")?;
            ensure(b == cf.b, || format!("block {}: b = {b} vs closed {}", i + 1, cf.b))?;
        }
        Ok(())
    }));
    checks
}

// ---- einstein ----

fn sl11_einstein() -> Outcome {
    let real = RealAlgebra::sl11();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let (x1, x2) = (random_nonzero(&mut rng), random_nonzero(&mut rng));
        let metric = lift(GroupMetric::sl11(x1.clone(), x2.clone()), "metric")?;
        let rep = lift(ricci_group(&real, &metric), "group Ricci")?;
        let gram = rep.ricci_gram.as_ref().ok_or("group route returned no Gram matrix")?;
        let c = einstein_constant(gram, &metric.gram);
        let expect = &x1 / (int(2) * &x2 * &x2);
        ensure(c.as_ref() == Some(&expect), || {
            format!("x = ({x1}, {x2}): Einstein constant {c:?}, expected {expect}")
        })?;
    }
    Ok(())
}

fn ricci_routes(dec: &IsotropyDecomposition<'_>) -> Outcome {
    let inv = lift(dec.invariants(), "invariants")?;
    let mut rng =
        StdRng::seed_from_u64(dec.diagram.circled.iter().fold(3, |h, &c| h * 41 + c as u64) + dec.diagram.m as u64);
    for _ in 0..2 {
        let metric = random_metric(&mut rng, dec.s());
        let rep = lift(ricci(dec, &inv, &metric, &Route::DIAGONAL), "routes")?;
        let closed = ricci_closed_form(&dec.diagram, &metric.x);
        ensure(rep.r == closed, || {
            format!("metric ({}): r = ({}) vs closed ({})", show(&metric.x), show(&rep.r), show(&closed))
        })?;
        if dec.s() > 1 {
            let s = scalar_closed_form(&dec.diagram, &metric.x);
            ensure(rep.scalar == s, || format!("scalar {} vs closed {s}", rep.scalar))?;
        }
    }
    Ok(())
}

fn classification_grid(max_each: usize) -> Vec<Check> {
    let pairs = su_pairs(2 * max_each, max_each);
    let results: Vec<(usize, Vec<Outcome>)> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let ctx = match FlagContext::new(DiagramFamily::Su, m, n) {
                Ok(c) => c,
                Err(e) => return (0, vec![Err(e.to_string())]),
            };
            let r = m + n - 1;
            let mut params: Vec<(usize, Option<usize>)> = (1..=r).map(|p| (p, None)).collect();
            for p in 1..=r {
                for q in p + 1..=r {
                    params.push((p, Some(q)));
                }
            }
            let out = params
                .par_iter()
                .map(|&(p, q)| {
                    let tag = format!("({m},{n},{p},{q:?})");
                    let rep = lift(classify_su_in(&ctx, p, q), &tag)?;
                    for s in &rep.solutions {
                        ensure(s.residual_certified, || format!("{tag}: {} not certified", s.render()))?;
                    }
                    if m == n && q.is_some_and(|q| p + q == 2 * m) {
                        ensure(rep.solutions.is_empty(), || format!("{tag}: expected no solutions"))?;
                    }
                    if let Some(q) = q {
                        let mut got: Vec<(String, Positivity)> = Vec::new();
                        for s in rep.solutions.iter().filter(|s| s.positivity != Positivity::NeverPos) {
                            for l in s.labels.iter().filter(|l| l.starts_with('C') || l.starts_with('F')) {
                                got.push((l.clone(), s.positivity));
                            }
                        }
                        got.sort_by(|a, b| a.0.cmp(&b.0));
                        let expect = positive_table(m, n, p, q);
                        ensure(got == expect, || format!("{tag}: positive sets {got:?}, table {expect:?}"))?;
                        let cf = closed_forms(&rep.parameters.diagram().map_err(|e| e.to_string())?);
                        let c = &cf.c;
                        if c.iter().all(|v| !v.is_zero()) {
                            // S4 constant 1 + Π(b−2c_i)/(4c₁c₂c₃)
                            let expect = int(1)
                                + c.iter().map(|ci| &cf.b - int(2) * ci).fold(Rational::one(), |a, v| a * v)
                                    / (int(4) * &c[0] * &c[1] * &c[2]);
                            let inv = lift(
                                ctx.decompose(&rep.parameters.diagram().map_err(|e| e.to_string())?)
                                    .and_then(|d| d.invariants_light()),
                                &tag,
                            )?;
                            let res = lift(residual(&inv, c, &expect), &tag)?;
                            ensure(res.iter().all(|v| v.is_zero()), || format!("{tag}: S4 constant {expect} fails"))?;
                        }
                    }
                    Ok(())
                })
                .collect::<Vec<_>>();
            (params.len(), out)
        })
        .collect();
    let cases = results.iter().map(|r| r.0).sum();
    let failure = results.into_iter().flat_map(|r| r.1).find_map(|o| o.err());
    vec![Check {
        name: "su classification: closed forms = solver = count-table branch; positivity table".into(),
        passed: failure.is_none(),
        cases,
        failure,
    }]
}

fn einstein(max_size: usize) -> Vec<Check> {
    let mut checks =
        vec![check("SL(1|1) left-invariant metrics are Einstein with c = x₁/(2x₂²)", &[()], |_| sl11_einstein())];
    let mut diagrams = Vec::new();
    for (m, n) in su_pairs(max_size.min(5), max_size) {
        diagrams.extend(su_diagrams(m, n));
    }
    diagrams.extend(osp_diagrams(max_size.clamp(2, 3)));
    checks.push(diagram_check(
        "Ricci: definition = general formula = coefficients = closed form",
        &diagrams,
        ricci_routes,
    ));
    checks.extend(classification_grid(max_size.min(5)));
    let osp: Vec<(usize, usize)> = (2..=max_size.max(2)).flat_map(|n| (2..=n).map(move |p| (n, p))).collect();
    checks.push(check("osp classification: two certified rays with negative constant", &osp, |&(n, p)| {
        let rep = lift(classify_osp(n, p), "osp")?;
        ensure(rep.count == 2, || format!("({n},{p}): {} solutions", rep.count))?;
        for s in &rep.solutions {
            ensure(s.residual_certified, || format!("({n},{p}): {} not certified", s.render()))?;
            // the normalised ray is the positive member when one exists
            ensure(s.x.iter().all(|v| *v > Rational::zero()), || format!("({n},{p}): {} is not positive", s.render()))?;
            let c_pos = s.c.clone();
            ensure(c_pos < Rational::zero(), || format!("({n},{p}): {} has non-negative constant", s.render()))?;
        }
        Ok(())
    }));
    checks.push(check("Ricci-flat families", &[()], |_| ricci_flat_families()));
    checks
}

fn ricci_flat_families() -> Outcome {
    let d = CircledDiagram::su(4, 2, &[2, 4]).map_err(|e| e.to_string())?;
    let ctx = lift(FlagContext::for_diagram(&d), "su(4|2)")?;
    let inv = lift(ctx.decompose(&d).and_then(|x| x.invariants()), "su(4|2)")?;
    let mut rng = StdRng::seed_from_u64(42);
    let mut tested = 0;
    while tested < 10 {
        let (x1, x2) = (random_nonzero(&mut rng), random_nonzero(&mut rng));
        let x3 = &x1 + &x2;
        if x3.is_zero() {
            continue;
        }
        let r = lift(residual(&inv, &[x1, x2, x3], &Rational::zero()), "residual")?;
        ensure(r.iter().all(|v| v.is_zero()), || format!("family member has r = ({})", show(&r)))?;
        tested += 1;
    }
    let sols = lift(crate::einstein::solve_diagonal(&inv), "solve")?;
    ensure(sols.iter().filter(|s| s.kind == SolutionKind::Family).count() == 1, || {
        "su(4|2){2,4} should carry exactly one family".into()
    })?;
    for n in 3..=4 {
        let d = CircledDiagram::su(n, n, &[n]).map_err(|e| e.to_string())?;
        let ctx = lift(FlagContext::for_diagram(&d), "su(n|n)")?;
        let inv = lift(ctx.decompose(&d).and_then(|x| x.invariants()), "su(n|n)")?;
        for _ in 0..5 {
            let x = random_nonzero(&mut rng);
            let r = lift(residual(&inv, std::slice::from_ref(&x), &Rational::zero()), "residual")?;
            ensure(r[0].is_zero(), || format!("su({n}|{n}) one node: r₁ = {} at x₁ = {x}", r[0]))?;
        }
    }
    Ok(())
}

/// Runs a suite; `max_size` bounds m, n (and m + n for the expensive checks).
pub fn run(suite: Suite, max_size: usize) -> VerifyReport {
    let max_size = max_size.max(2);
    let mut checks = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        checks.extend(identities(max_size));
    }
    if matches!(suite, Suite::Tables | Suite::All) {
        checks.extend(tables(max_size));
    }
    if matches!(suite, Suite::Einstein | Suite::All) {
        checks.extend(einstein(max_size));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    VerifyReport { suite, max_size, checks, passed, failed }
}
