//! Einstein metrics r_i = c·x_i among diagonal metrics.
//!
//! Closed-form candidates are never trusted on their own: every ray and
//! family is accepted only after exact substitution into the Ricci
//! coefficients of the actual decomposition.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curvature::DiagonalMetric;
use crate::error::{Error, Result};
use crate::flag::{analyze, closed_forms, CaseTag, CircledDiagram, DiagramFamily, FlagContext, FlagInvariants};
use crate::scalars::{fmt_rational, int, rat, Rational};

/// Ricci coefficients from the block invariants: the d_i ≠ 0 formula, or
/// the selected-pair formula when d_i = 0.
pub fn ricci_coefficients(inv: &FlagInvariants, metric: &DiagonalMetric) -> Result<Vec<Rational>> {
    let s = inv.s();
    if metric.x.len() != s {
        return Err(Error::DimensionMismatch(format!("metric has {} coefficients, expected {s}", metric.x.len())));
    }
    let x = &metric.x;
    let mut r = Vec::with_capacity(s);
    for i in 0..s {
        let blk = &inv.blocks[i];
        let half_b = &blk.b * rat(1, 2);
        if !blk.d.is_zero() {
            let mut acc = Rational::zero();
            for j in 0..s {
                for k in 0..s {
                    let t = inv.ijk.get(i, j, k);
                    if t.is_zero() {
                        continue;
                    }
                    let shape = &x[i] * &x[i] / (&x[j] * &x[k]) - int(2) * &x[j] / &x[k];
                    acc += t * shape;
                }
            }
            r.push(half_b + acc / (int(4) * &blk.d));
        } else {
            let (j, k) = inv.selected[i].ok_or(Error::NoSelectedPair(i + 1))?;
            let shape = &x[i] * &x[i] / (&x[j] * &x[k]) - &x[j] / &x[k] - &x[k] / &x[j];
            r.push(half_b + (&blk.b - int(2) * &blk.c) * rat(1, 4) * shape);
        }
    }
    Ok(r)
}

/// S = ½Σ b_i d_i/x_i − ¼Σ [ijk] x_k/(x_i x_j).
pub fn scalar_curvature(inv: &FlagInvariants, metric: &DiagonalMetric) -> Rational {
    let x = &metric.x;
    let s = inv.s();
    let mut acc = Rational::zero();
    for i in 0..s {
        acc += &inv.blocks[i].b * &inv.blocks[i].d / &x[i] * rat(1, 2);
        for j in 0..s {
            for k in 0..s {
                let t = inv.ijk.get(i, j, k);
                if !t.is_zero() {
                    acc -= t * &x[k] / (&x[i] * &x[j]) * rat(1, 4);
                }
            }
        }
    }
    acc
}

/// Closed-form Ricci coefficients: r_i = c₁ for one node; for three blocks
/// r_i = b/2 + (b−2c_i)x_i(2x_i²−x²)/(4x₁x₂x₃); for osp
/// r_i = b/2 + (b−2c_i)x_i(2x_i²−x²)/(4x₁²x₂) with x² = 2x₁²+x₂².
pub fn ricci_closed_form(d: &CircledDiagram, x: &[Rational]) -> Vec<Rational> {
    let cf = closed_forms(d);
    let b = &cf.b;
    let half_b = b * rat(1, 2);
    match (d.family, cf.c.len()) {
        (DiagramFamily::Su, 1) => vec![cf.c[0].clone()],
        (DiagramFamily::Su, _) => {
            let x2: Rational = x.iter().map(|v| v * v).sum();
            let den = int(4) * &x[0] * &x[1] * &x[2];
            (0..3).map(|i| &half_b + (b - int(2) * &cf.c[i]) * &x[i] * (int(2) * &x[i] * &x[i] - &x2) / &den).collect()
        }
        (DiagramFamily::Osp, _) => {
            let x2 = int(2) * &x[0] * &x[0] + &x[1] * &x[1];
            let den = int(4) * &x[0] * &x[0] * &x[1];
            (0..2).map(|i| &half_b + (b - int(2) * &cf.c[i]) * &x[i] * (int(2) * &x[i] * &x[i] - &x2) / &den).collect()
        }
    }
}

/// Closed-form scalar curvature for three blocks and for osp.
pub fn scalar_closed_form(d: &CircledDiagram, x: &[Rational]) -> Rational {
    let cf = closed_forms(d);
    let half_b = &cf.b * rat(1, 2);
    match (d.family, cf.c.len()) {
        (DiagramFamily::Su, 1) => &cf.c[0] * &cf.d[0] / &x[0],
        (DiagramFamily::Su, _) => {
            let x2: Rational = x.iter().map(|v| v * v).sum();
            let sum: Rational = (0..3).map(|i| &cf.d[i] / &x[i]).sum();
            half_b * sum - cf.ijk.get(0, 1, 2) * x2 / (int(2) * &x[0] * &x[1] * &x[2])
        }
        (DiagramFamily::Osp, _) => {
            let x2 = int(2) * &x[0] * &x[0] + &x[1] * &x[1];
            half_b * (&cf.d[0] / &x[0] + &cf.d[1] / &x[1]) - cf.ijk.get(0, 0, 1) * x2 / (int(4) * &x[0] * &x[0] * &x[1])
        }
    }
}

/// r_i − c·x_i for every block.
pub fn residual(inv: &FlagInvariants, x: &[Rational], c: &Rational) -> Result<Vec<Rational>> {
    let r = ricci_coefficients(inv, &DiagonalMetric::new(x.to_vec())?)?;
    Ok(r.iter().zip(x).map(|(ri, xi)| ri - c * xi).collect())
}

fn is_einstein(inv: &FlagInvariants, x: &[Rational]) -> Result<Option<Rational>> {
    let r = ricci_coefficients(inv, &DiagonalMetric::new(x.to_vec())?)?;
    let c = &r[0] / &x[0];
    Ok(r.iter().zip(x).all(|(ri, xi)| *ri == &c * xi).then_some(c))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    /// λ·x is positive for λ > 0.
    PosWithLambdaPos,
    /// λ·x is positive for λ < 0.
    PosWithLambdaNeg,
    NeverPos,
}

impl Positivity {
    pub fn of(x: &[Rational]) -> Self {
        if x.iter().all(|v| v.is_positive()) {
            Positivity::PosWithLambdaPos
        } else if x.iter().all(|v| v.is_negative()) {
            Positivity::PosWithLambdaNeg
        } else {
            Positivity::NeverPos
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Ray,
    Family,
}

/// A linear family x = Σ t_g·generator_g of Ricci-flat metrics, all x_i ≠ 0.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Family {
    pub params: Vec<String>,
    pub generators: Vec<Vec<i64>>,
    /// Normal vector of the hyperplane, first nonzero entry positive; absent
    /// when every metric is in the family.
    pub constraint: Option<Vec<i64>>,
}

impl Family {
    fn plane(s: usize, k: usize) -> Family {
        // x_k = Σ_{i≠k} x_i over the other two coordinates
        let others: Vec<usize> = (0..s).filter(|&i| i != k).collect();
        let generators = others
            .iter()
            .map(|&i| {
                let mut g = vec![0i64; s];
                g[i] = 1;
                g[k] = 1;
                g
            })
            .collect();
        let mut normal = vec![1i64; s];
        normal[k] = -1;
        if normal[0] < 0 {
            normal.iter_mut().for_each(|v| *v = -*v);
        }
        Family { params: others.iter().map(|i| format!("x{}", i + 1)).collect(), generators, constraint: Some(normal) }
    }

    fn everything(s: usize) -> Family {
        Family {
            params: (1..=s).map(|i| format!("x{i}")).collect(),
            generators: (0..s)
                .map(|i| {
                    let mut g = vec![0i64; s];
                    g[i] = 1;
                    g
                })
                .collect(),
            constraint: None,
        }
    }

    pub fn member(&self, t: &[Rational]) -> Vec<Rational> {
        let s = self.generators[0].len();
        (0..s).map(|i| self.generators.iter().zip(t).map(|(g, tv)| int(g[i]) * tv).sum()).collect()
    }

    fn coordinate(&self, i: usize) -> String {
        let mut out = String::new();
        for (g, name) in self.generators.iter().zip(&self.params) {
            let c = g[i];
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if out.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            out.push_str(&format!("{sign}{mag}{name}"));
        }
        out
    }

    /// "{(x1, x2, x1+x2), c = 0; x1 x2 ≠ 0, x1+x2 ≠ 0}"
    pub fn render(&self) -> String {
        let s = self.generators[0].len();
        let coords: Vec<String> = (0..s).map(|i| self.coordinate(i)).collect();
        let singles: Vec<&String> = coords.iter().filter(|c| self.params.contains(c)).collect();
        let mut conds = Vec::new();
        if !singles.is_empty() {
            conds.push(format!("{} ≠ 0", singles.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ")));
        }
        for c in &coords {
            if !self.params.contains(c) {
                conds.push(format!("{c} ≠ 0"));
            }
        }
        format!("{{({}), c = 0; {}}}", coords.join(", "), conds.join(", "))
    }

    /// Parameter values used to certify the family; none makes a coordinate vanish.
    fn samples(&self) -> Vec<Vec<Rational>> {
        const PTS: [[i64; 3]; 8] =
            [[1, 2, 3], [2, 3, 7], [3, -5, 2], [-7, 2, 11], [5, 11, -3], [13, -4, 5], [17, 19, 23], [-23, 29, 31]];
        let k = self.params.len();
        PTS.iter()
            .map(|p| p[..k].iter().map(|&v| int(v)).collect::<Vec<_>>())
            .filter(|t| self.member(t).iter().all(|v| !v.is_zero()))
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EinsteinSolution {
    pub kind: SolutionKind,
    /// Names of every closed-form candidate that produced this solution.
    pub labels: Vec<String>,
    /// Normalised ray: integer entries, gcd 1, first nonzero positive.
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::scalars::rational_vec")]
    pub x: Vec<Rational>,
    /// The representative the positivity tag refers to.
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::scalars::rational_vec")]
    pub representative: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Einstein constant of `x` (of any member, for families).
    #[serde(with = "crate::scalars::rational_str")]
    pub c: Rational,
    pub positivity: Positivity,
    pub ricci_flat: bool,
    pub residual_certified: bool,
}

impl EinsteinSolution {
    /// Ray with representative `rep` and constant `c_rep`.
    pub fn ray(label: &str, rep: Vec<Rational>, c_rep: Rational) -> Self {
        let (x, c) = normalize_ray(&rep, &c_rep);
        EinsteinSolution {
            kind: SolutionKind::Ray,
            labels: vec![label.to_string()],
            positivity: Positivity::of(&rep),
            ricci_flat: c.is_zero(),
            x,
            representative: rep,
            family: None,
            c,
            residual_certified: false,
        }
    }

    pub fn family(label: &str, fam: Family) -> Self {
        // a family has a positive member iff some generator combination is positive;
        // for the shapes used here the all-ones parameter point decides it
        let ones = vec![int(1); fam.params.len()];
        let positivity = Positivity::of(&fam.member(&ones));
        EinsteinSolution {
            kind: SolutionKind::Family,
            labels: vec![label.to_string()],
            x: Vec::new(),
            representative: Vec::new(),
            family: Some(fam),
            c: Rational::zero(),
            positivity,
            ricci_flat: true,
            residual_certified: false,
        }
    }

    /// Identity used for deduplication and set comparison.
    pub fn key(&self) -> String {
        match &self.family {
            Some(f) => format!("F{:?}", f.constraint),
            None => format!("R{}", self.x.iter().map(fmt_rational).collect::<Vec<_>>().join(":")),
        }
    }

    /// "[4 : 2 : 2 | c = 1]" or the family constraint text.
    pub fn render(&self) -> String {
        match &self.family {
            Some(f) => f.render(),
            None => format!(
                "[{} | c = {}]",
                self.x.iter().map(fmt_rational).collect::<Vec<_>>().join(" : "),
                fmt_rational(&self.c)
            ),
        }
    }

    /// Exact substitution: the ray itself, λ-rescalings, or family samples.
    pub fn certify(&mut self, inv: &FlagInvariants) -> Result<bool> {
        let ok = match &self.family {
            None => {
                let mut ok = residual(inv, &self.x, &self.c)?.iter().all(|v| v.is_zero());
                for lam in [rat(-3, 2), rat(5, 7)] {
                    let x: Vec<Rational> = self.x.iter().map(|v| v * &lam).collect();
                    ok &= residual(inv, &x, &(&self.c / &lam))?.iter().all(|v| v.is_zero());
                }
                ok
            }
            Some(f) => {
                let samples = f.samples();
                let mut ok = samples.len() >= 3;
                for t in samples {
                    ok &= residual(inv, &f.member(&t), &Rational::zero())?.iter().all(|v| v.is_zero());
                }
                ok
            }
        };
        self.residual_certified = ok;
        Ok(ok)
    }
}

/// Integer entries, gcd 1, first nonzero entry positive; c rescaled so that
/// (x, c) stays on the same ray {(λg, c/λ)}.
pub fn normalize_ray(x: &[Rational], c: &Rational) -> (Vec<Rational>, Rational) {
    let mut l = BigInt::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let ints: Vec<BigInt> = x.iter().map(|v| (v * Rational::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return (x.to_vec(), c.clone());
    }
    let first_neg = ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    if first_neg {
        g = -g;
    }
    // x = μ·x' with μ = g/l
    let mu = Rational::new(g.clone(), l);
    let xs = ints.into_iter().map(|v| Rational::from_integer(v / &g)).collect();
    (xs, c * mu)
}

fn merge(into: &mut Vec<EinsteinSolution>, sol: EinsteinSolution) {
    let key = sol.key();
    if let Some(existing) = into.iter_mut().find(|s| s.key() == key) {
        for l in sol.labels {
            if !existing.labels.contains(&l) {
                existing.labels.push(l);
            }
        }
    } else {
        into.push(sol);
    }
}

/// Dense univariate polynomial, lowest degree first.
#[derive(Clone, PartialEq, Debug)]
struct Poly(Vec<Rational>);

impl Poly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// Lagrange interpolation through the given points.
    fn interpolate(pts: &[(Rational, Rational)]) -> Poly {
        let n = pts.len();
        let mut out = vec![Rational::zero(); n];
        for (i, (xi, yi)) in pts.iter().enumerate() {
            let mut basis = vec![Rational::one()];
            let mut den = Rational::one();
            for (j, (xj, _)) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![Rational::zero(); basis.len() + 1];
                for (k, b) in basis.iter().enumerate() {
                    next[k + 1] += b;
                    next[k] -= b * xj;
                }
                basis = next;
                den *= xi - xj;
            }
            let f = yi / den;
            for (k, b) in basis.iter().enumerate() {
                out[k] += b * &f;
            }
        }
        Poly(out).trim()
    }

    fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect()).trim()
    }

    fn rem(&self, d: &Poly) -> Poly {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        while r.len() >= d.0.len() && !r.is_empty() {
            let f = r.last().expect("nonempty") / &dl;
            let shift = r.len() - d.0.len();
            for (k, c) in d.0.iter().enumerate() {
                r[shift + k] -= c * &f;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Poly(r).trim()
    }

    fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Number of distinct real roots, by a Sturm sequence of the square-free part.
    fn distinct_real_roots(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let g = self.gcd(&self.derivative());
        let sq = if g.degree() == 0 { self.clone() } else { self.div_exact(&g) };
        let mut seq = vec![sq.clone(), sq.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Poly(r.0.iter().map(|c| -c).collect()));
        }
        let sign_changes = |signs: Vec<i32>| {
            let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let lead = |p: &Poly| if p.0.last().expect("nonzero").is_positive() { 1 } else { -1 };
        let at_pos: Vec<i32> = seq.iter().map(lead).collect();
        let at_neg: Vec<i32> = seq.iter().map(|p| if p.degree() % 2 == 0 { lead(p) } else { -lead(p) }).collect();
        sign_changes(at_neg) - sign_changes(at_pos)
    }

    fn div_exact(&self, d: &Poly) -> Poly {
        let mut r = self.0.clone();
        let dl = d.0.last().expect("nonzero divisor").clone();
        let mut q = vec![Rational::zero(); r.len() + 1 - d.0.len()];
        while r.len() >= d.0.len() && !r.is_empty() {
            let f = r.last().expect("nonempty") / &dl;
            let shift = r.len() - d.0.len();
            for (k, c) in d.0.iter().enumerate() {
                r[shift + k] -= c * &f;
            }
            q[shift] = f;
            r.pop();
        }
        Poly(q).trim()
    }
}

/// For two blocks: the exact number of Einstein rays, counted as distinct
/// real roots t ≠ 0 of t²(t·r₁(1,t) − r₂(1,t)). `None` means every metric is Einstein.
fn two_block_root_count(inv: &FlagInvariants) -> Result<Option<usize>> {
    let f = |t: &Rational| -> Result<Rational> {
        let r = ricci_coefficients(inv, &DiagonalMetric::new(vec![int(1), t.clone()])?)?;
        Ok(t * t * (t * &r[0] - &r[1]))
    };
    let pts: Vec<(Rational, Rational)> = (1..=10)
        .map(|k| {
            let t = rat(k, 3) * if k % 2 == 0 { int(-1) } else { int(1) };
            f(&t).map(|v| (t, v))
        })
        .collect::<Result<_>>()?;
    let p = Poly::interpolate(&pts);
    for t in [rat(17, 5), rat(-29, 7), rat(41, 11)] {
        if p.eval(&t) != f(&t)? {
            return Err(Error::Invariant("Einstein polynomial exceeds its degree bound".into()));
        }
    }
    if p.is_zero() {
        return Ok(None);
    }
    let mut q = p;
    while q.0.first().is_some_and(|c| c.is_zero()) {
        q.0.remove(0);
    }
    Ok(Some(q.distinct_real_roots()))
}

/// Candidate generation plus exact residual filtering.
pub fn solve_diagonal(inv: &FlagInvariants) -> Result<Vec<EinsteinSolution>> {
    let s = inv.s();
    let c = inv.c();
    let mut cands: Vec<EinsteinSolution> = Vec::new();
    match s {
        1 => {
            let x = vec![int(1)];
            let k = ricci_coefficients(inv, &DiagonalMetric::new(x.clone())?)?[0].clone();
            if k.is_zero() {
                cands.push(EinsteinSolution::family("F", Family::everything(1)));
            } else {
                cands.push(EinsteinSolution::ray("S", x, k));
            }
        }
        2 => {
            let reps = [("S1", vec![int(1), int(2)]), ("S2", c.clone())];
            for (label, rep) in reps {
                if rep.iter().any(|v| v.is_zero()) {
                    continue;
                }
                if let Some(k) = is_einstein(inv, &rep)? {
                    cands.push(EinsteinSolution::ray(label, rep, k));
                }
            }
        }
        3 => {
            let reps = [
                ("S1", vec![&c[1] + &c[2], c[1].clone(), c[2].clone()]),
                ("S2", vec![c[0].clone(), &c[0] + &c[2], c[2].clone()]),
                ("S3", vec![c[0].clone(), c[1].clone(), &c[0] + &c[1]]),
                ("S4", c.clone()),
            ];
            for (label, rep) in reps {
                if rep.iter().any(|v| v.is_zero()) {
                    continue;
                }
                if let Some(k) = is_einstein(inv, &rep)? {
                    cands.push(EinsteinSolution::ray(label, rep, k));
                }
            }
            for k in 0..3 {
                cands.push(EinsteinSolution::family(&format!("P{}", k + 1), Family::plane(3, k)));
            }
            cands.push(EinsteinSolution::family("P0", Family::everything(3)));
        }
        _ => return Err(Error::UnsupportedBlockPattern(format!("{s} blocks"))),
    }
    let mut out: Vec<EinsteinSolution> = Vec::new();
    for mut cand in cands {
        if cand.certify(inv)? {
            merge(&mut out, cand);
        }
    }
    // a full family swallows the planes and Ricci-flat rays inside it
    if out.iter().any(|s| s.family.as_ref().is_some_and(|f| f.constraint.is_none())) {
        out.retain(|s| s.family.as_ref().is_some_and(|f| f.constraint.is_none()) || !s.ricci_flat);
    }
    let planes: Vec<Vec<i64>> =
        out.iter().filter_map(|s| s.family.as_ref().and_then(|f| f.constraint.clone())).collect();
    out.retain(|s| {
        s.family.is_some()
            || !s.ricci_flat
            || !planes.iter().any(|n| n.iter().zip(&s.x).map(|(a, b)| int(*a) * b).sum::<Rational>().is_zero())
    });
    if s == 2 {
        let expected = two_block_root_count(inv)?;
        let rays = out.iter().filter(|s| s.kind == SolutionKind::Ray).count();
        if expected != Some(rays) {
            return Err(Error::ReconciliationFailure(format!(
                "two-block Einstein polynomial has {expected:?} real roots but {rays} rays were found"
            )));
        }
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Parameters {
    pub family: DiagramFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub n: usize,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

impl Parameters {
    pub fn diagram(&self) -> Result<CircledDiagram> {
        match self.family {
            DiagramFamily::Su => {
                let m = self.m.ok_or_else(|| Error::OutOfRange("su needs m".into()))?;
                let mut c = vec![self.p];
                c.extend(self.q);
                CircledDiagram::su(m, self.n, &c)
            }
            DiagramFamily::Osp => CircledDiagram::osp(self.n, self.p),
        }
    }
}

impl fmt::Display for Parameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.family, self.m, self.q) {
            (DiagramFamily::Osp, _, _) => write!(f, "osp(2|{}) p={}", 2 * self.n, self.p),
            (_, Some(m), Some(q)) => write!(f, "su({m}|{}) p={} q={q}", self.n, self.p),
            (_, Some(m), None) => write!(f, "su({m}|{}) p={}", self.n, self.p),
            _ => write!(f, "su(?|{})", self.n),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub parameters: Parameters,
    pub case: CaseTag,
    pub solutions: Vec<EinsteinSolution>,
    pub count: usize,
    pub corollary_branch: String,
}

impl ClassificationReport {
    pub fn rays(&self) -> impl Iterator<Item = &EinsteinSolution> {
        self.solutions.iter().filter(|s| s.kind == SolutionKind::Ray)
    }

    pub fn families(&self) -> impl Iterator<Item = &EinsteinSolution> {
        self.solutions.iter().filter(|s| s.kind == SolutionKind::Family)
    }
}

/// The closed-form solution sets C_{k,l} and F_k of the SU classification.
/// Empty brackets (a zero coordinate) are dropped.
pub fn su_closed_solutions(m: usize, n: usize, p: usize, q: usize) -> Vec<EinsteinSolution> {
    let (m, n, p, q) = (m as i64, n as i64, p as i64, q as i64);
    let r = |v: [i64; 3]| v.iter().map(|&a| int(a)).collect::<Vec<_>>();
    let d = CircledDiagram::su(m as usize, n as usize, &[p as usize, q as usize]).expect("validated by caller");
    let case = d.case_tag().su_case().expect("two nodes");
    let (reps, c4): ([[i64; 3]; 4], Option<Rational>) = match case {
        1 => {
            let den = q * (m - n - p) * (m - n + p - q);
            (
                [
                    [m - n + p, m - n + p - q, q],
                    [m - n - p, m - n - p + q, q],
                    [m - n - p, m - n + p - q, 2 * (m - n) - q],
                    [m - n - p, m - n + p - q, q],
                ],
                (den != 0).then(|| int(1) + rat(2 * p * (q - p) * (m - n - q), den)),
            )
        }
        2 => {
            let den = (m - n - p) * (m + n - p - q) * (2 * m - q);
            (
                [
                    [m - n + p, -m - n + p + q, 2 * m - q],
                    [m - n - p, 3 * m - n - p - q, 2 * m - q],
                    [m - n - p, -m - n + p + q, -2 * n + q],
                    [m - n - p, -m - n + p + q, 2 * m - q],
                ],
                (den != 0).then(|| int(1) + rat(2 * p * (m + n - q) * (2 * m - p - q), den)),
            )
        }
        _ => {
            let den = (m + n - p) * (m - n - p + q) * (2 * m - q);
            (
                [
                    [3 * m - n - p, m - n - p + q, 2 * m - q],
                    [-m - n + p, m - n + p - q, 2 * m - q],
                    [-m - n + p, m - n - p + q, -2 * n + q],
                    [-m - n + p, m - n - p + q, 2 * m - q],
                ],
                (den != 0).then(|| int(1) + rat(2 * (p - q) * (m + n - q) * (2 * m - p), den)),
            )
        }
    };
    let mut out = Vec::new();
    for (l, rep) in reps.iter().enumerate() {
        if rep.contains(&0) {
            continue;
        }
        let c = if l == 3 { c4.clone().expect("nonzero coordinates give a nonzero denominator") } else { int(1) };
        merge(&mut out, EinsteinSolution::ray(&format!("C{},{}", case, l + 1), r(*rep), c));
    }
    let fam = |k: usize, u: i64, v: i64| (u == p && v == q).then_some(k);
    let fams = match case {
        1 => vec![fam(3, m - n, 2 * (m - n))],
        2 => vec![fam(1, n - m, 2 * m), fam(3, m - n, 2 * n)],
        _ => vec![fam(1, 3 * m - n, 2 * m)],
    };
    for k in fams.into_iter().flatten() {
        // F₁: x₁ = x₂+x₃; F₃: x₃ = x₁+x₂
        merge(&mut out, EinsteinSolution::family(&format!("F{k}"), Family::plane(3, k - 1)));
    }
    out
}

/// A branch of the SU solution-count table: the condition text and the
/// solution sets it lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CorollaryBranch {
    pub text: String,
    pub labels: Vec<String>,
}

/// The branch of the SU count table that applies. More specific branches
/// (more equalities) are tried first. Two branches missing from the table
/// are marked "(supplementary)". `None` when no branch applies.
pub fn corollary_branch(m: usize, n: usize, p: usize, q: usize) -> Option<CorollaryBranch> {
    let (m, n, p, q) = (m as i64, n as i64, p as i64, q as i64);
    let d = CircledDiagram::su(m as usize, n as usize, &[p as usize, q as usize]).ok()?;
    let case = d.case_tag().su_case()?;
    let lab = |k: i64, ls: &[i64]| ls.iter().map(|l| format!("C{k},{l}")).collect::<Vec<_>>();
    let mut branches: Vec<(bool, String, Vec<String>)> = Vec::new();
    let (mn, nm) = (m - n, n - m);
    match (case, m.cmp(&n)) {
        (1, std::cmp::Ordering::Greater) => {
            let fam = p == mn && q == 2 * mn;
            let extra = if fam { vec!["F3".to_string()] } else { vec![] };
            branches.push((fam, "p=m−n & q=2(m−n): family only".into(), extra.clone()));
            branches.push((p == mn && q - p != mn, "p=m−n & q−p≠m−n".into(), lab(1, &[1])));
            branches.push((p != mn && q - p == mn, "p≠m−n & q−p=m−n".into(), lab(1, &[2])));
            branches.push((
                p != mn && q - p != mn && q == 2 * mn,
                "p≠m−n & q−p≠m−n & q=2(m−n)".into(),
                lab(1, &[1, 2, 4]),
            ));
            branches.push((
                p != mn && q - p != mn && q != 2 * mn,
                "p≠m−n & q−p≠m−n & q≠2(m−n)".into(),
                lab(1, &[1, 2, 3, 4]),
            ));
        }
        (1, std::cmp::Ordering::Equal) => branches.push((true, "m=n".into(), lab(1, &[1, 2, 3, 4]))),
        (1, std::cmp::Ordering::Less) => {
            branches.push((p == nm && q - p == nm, "p=n−m & q−p=n−m (supplementary)".into(), lab(1, &[3, 4])));
            branches.push((p != nm && q - p == nm, "p≠n−m & q−p=n−m".into(), lab(1, &[1, 3, 4])));
            branches.push((p == nm && q - p != nm, "p=n−m & q−p≠n−m".into(), lab(1, &[2, 3, 4])));
            branches.push((p != nm && q - p != nm, "p≠n−m & q−p≠n−m".into(), lab(1, &[1, 2, 3, 4])));
        }
        (2, std::cmp::Ordering::Greater) => {
            let fam = if p == mn && q == 2 * n { vec!["F3".to_string()] } else { vec![] };
            let with = |mut v: Vec<String>| {
                v.extend(fam.clone());
                v
            };
            branches.push((p == 3 * mn && q == 2 * n, "p=3(m−n) & q=2n".into(), with(lab(2, &[1, 4]))));
            branches.push((p == mn && q != 2 * n, "p=m−n & q≠2n".into(), with(lab(2, &[1]))));
            branches.push((
                p != mn && p + q == m + n && q != 2 * n,
                "p≠m−n & p+q=m+n & q≠2n".into(),
                with(lab(2, &[2])),
            ));
            branches.push((
                p != mn && p != 3 * mn && q == 2 * n,
                "p≠m−n & p≠3(m−n) & q=2n".into(),
                with(lab(2, &[1, 2, 4])),
            ));
            branches.push((
                p != mn && p + q == 3 * m - n && q != 2 * n,
                "p≠m−n & p+q=3m−n & q≠2n".into(),
                with(lab(2, &[1, 3, 4])),
            ));
            branches.push((
                p != mn && p + q != 3 * m - n && q != 2 * n,
                "p≠m−n & p+q≠3m−n & q≠2n".into(),
                with(lab(2, &[1, 2, 3, 4])),
            ));
            branches.push((p == mn && q == 2 * n, "p=m−n & q=2n: family only".into(), fam.clone()));
        }
        (2, std::cmp::Ordering::Equal) => {
            branches.push((p + q == 2 * m, "m=n & p+q=2m: no solutions".into(), vec![]));
            branches.push((p + q != 2 * m, "m=n & p+q≠2m".into(), lab(2, &[1, 2, 3, 4])));
        }
        (2, std::cmp::Ordering::Less) => {
            let fam = if p == nm && q == 2 * m { vec!["F1".to_string()] } else { vec![] };
            let with = |mut v: Vec<String>| {
                v.extend(fam.clone());
                v
            };
            branches.push((p == nm && q == 4 * m - 2 * n, "p=n−m & q=4m−2n".into(), with(lab(2, &[3, 4]))));
            branches.push((
                p != nm && p + q == m + n && q != 2 * m,
                "p≠n−m & p+q=m+n & q≠2m".into(),
                with(lab(2, &[2])),
            ));
            branches.push((p != nm && q == 2 * m, "p≠n−m & q=2m".into(), with(lab(2, &[3]))));
            branches.push((
                p != nm && p + q == 3 * m - n && q != 2 * m,
                "p≠n−m & p+q=3m−n & q≠2m".into(),
                with(lab(2, &[1, 3, 4])),
            ));
            branches.push((
                p == nm && q != 4 * m - 2 * n && q != 2 * m,
                "p=n−m & q≠4m−2n & q≠2m".into(),
                with(lab(2, &[2, 3, 4])),
            ));
            branches.push((
                p != nm && p + q != 3 * m - n && q != 2 * m,
                "p≠n−m & p+q≠3m−n & q≠2m".into(),
                with(lab(2, &[1, 2, 3, 4])),
            ));
            branches.push((p == nm && q == 2 * m, "p=n−m & q=2m: family only".into(), fam.clone()));
        }
        (3, std::cmp::Ordering::Greater) => {
            branches.push((q - p == mn && q == 2 * n, "q−p=m−n & q=2n (supplementary)".into(), lab(3, &[1, 4])));
            branches.push((q - p != mn && q == 2 * n, "q−p≠m−n & q=2n".into(), lab(3, &[1, 2, 4])));
            branches.push((q - p == mn && q != 2 * n, "q−p=m−n & q≠2n".into(), lab(3, &[1, 3, 4])));
            branches.push((q - p != mn && q != 2 * n, "q−p≠m−n & q≠2n".into(), lab(3, &[1, 2, 3, 4])));
        }
        (3, std::cmp::Ordering::Equal) => branches.push((true, "m=n".into(), lab(3, &[1, 2, 3, 4]))),
        (3, std::cmp::Ordering::Less) => {
            let fam = if p == 3 * m - n && q == 2 * m { vec!["F1".to_string()] } else { vec![] };
            let with = |mut v: Vec<String>| {
                v.extend(fam.clone());
                v
            };
            branches.push((q - p == nm && q != 2 * m, "q−p=n−m & q≠2m".into(), with(lab(3, &[2]))));
            branches.push((q - p != nm && q == 2 * m, "q−p≠n−m & q=2m".into(), with(lab(3, &[3]))));
            branches.push((
                p == 3 * m - n && q - p != nm && q != 2 * m,
                "p=3m−n & q−p≠n−m & q≠2m".into(),
                with(lab(3, &[2, 3, 4])),
            ));
            branches.push((
                p != 3 * m - n && q - p != nm && q != 2 * m,
                "p≠3m−n & q−p≠n−m & q≠2m".into(),
                with(lab(3, &[1, 2, 3, 4])),
            ));
            branches.push((p == 3 * m - n && q == 2 * m, "p=3m−n & q=2m: family only".into(), fam.clone()));
        }
        _ => {}
    }
    branches.into_iter().find(|(cond, _, _)| *cond).map(|(_, text, labels)| CorollaryBranch { text, labels })
}

fn keyed(sols: &[EinsteinSolution]) -> BTreeMap<String, (Rational, bool)> {
    sols.iter().map(|s| (s.key(), (s.c.clone(), s.family.is_some()))).collect()
}

/// Classification on an already-built algebra.
pub fn classify_su_in(ctx: &FlagContext, p: usize, q: Option<usize>) -> Result<ClassificationReport> {
    let (m, n) = (ctx.m, ctx.n);
    if ctx.family != DiagramFamily::Su {
        return Err(Error::OutOfRange("context is not su".into()));
    }
    if m + n < 4 || (m == n && n < 3) {
        return Err(Error::OutOfRange(format!("su({m}|{n}) needs m+n >= 4, and n >= 3 when m = n")));
    }
    let mut circ = vec![p];
    circ.extend(q);
    let d = CircledDiagram::su(m, n, &circ).map_err(|e| Error::OutOfRange(e.to_string()))?;
    let inv = ctx.decompose(&d)?.invariants_light()?;
    let mut solved = solve_diagonal(&inv)?;
    let params = Parameters { family: DiagramFamily::Su, m: Some(m), n, p, q };
    let Some(q) = q else {
        // one node: r₁ = c₁ = m−n for every x₁
        let expected = if m == n {
            EinsteinSolution::family("F", Family::everything(1))
        } else {
            EinsteinSolution::ray("S", vec![int(1)], int(m as i64 - n as i64))
        };
        if keyed(&solved) != keyed(std::slice::from_ref(&expected)) {
            return Err(Error::ReconciliationFailure(format!("{params}: one-node solution differs")));
        }
        let branch = if m == n { "one node, m=n: Ricci-flat family" } else { "one node, m≠n: one ray" };
        for s in solved.iter_mut() {
            s.labels = vec![if m == n { "F".into() } else { "C".into() }];
        }
        return Ok(ClassificationReport {
            parameters: params,
            case: CaseTag::AOne,
            count: solved.len(),
            solutions: solved,
            corollary_branch: branch.into(),
        });
    };
    let closed = su_closed_solutions(m, n, p, q);
    if keyed(&closed) != keyed(&solved) {
        let show = |v: &[EinsteinSolution]| v.iter().map(|s| s.render()).collect::<Vec<_>>().join(", ");
        return Err(Error::ReconciliationFailure(format!(
            "{params}: closed forms give {} but the solver finds {}",
            show(&closed),
            show(&solved)
        )));
    }
    // keep the solver's certified values, adopt the closed-form labels and representatives
    let mut out = Vec::new();
    for mut c in closed {
        let s = solved.iter().find(|s| s.key() == c.key()).expect("reconciled above");
        for l in &s.labels {
            c.labels.push(l.clone());
        }
        c.residual_certified = s.residual_certified;
        out.push(c);
    }
    let branch = match corollary_branch(m, n, p, q) {
        Some(b) => {
            let listed: Vec<&EinsteinSolution> =
                out.iter().filter(|s| s.labels.iter().any(|l| b.labels.contains(l))).collect();
            let every_label_found =
                b.labels.iter().all(|l| out.iter().any(|s| s.labels.contains(l)) || su_label_is_empty(m, n, p, q, l));
            if listed.len() != out.len() || !every_label_found {
                return Err(Error::ReconciliationFailure(format!(
                    "{params}: branch \"{}\" lists {:?} but the solutions are {:?}",
                    b.text,
                    b.labels,
                    out.iter().map(|s| s.labels.clone()).collect::<Vec<_>>()
                )));
            }
            let mut text = b.text;
            for s in &out {
                let cs: Vec<&str> = s.labels.iter().filter(|l| b.labels.contains(l)).map(|l| l.as_str()).collect();
                if cs.len() > 1 {
                    text.push_str(&format!("; {} coincide", cs.join(" = ")));
                }
            }
            text
        }
        None => "no listed branch".into(),
    };
    Ok(ClassificationReport {
        parameters: params,
        case: d.case_tag(),
        count: out.len(),
        solutions: out,
        corollary_branch: branch,
    })
}

fn su_label_is_empty(m: usize, n: usize, p: usize, q: usize, label: &str) -> bool {
    !su_closed_solutions(m, n, p, q).iter().any(|s| s.labels.iter().any(|l| l == label))
}

pub fn classify_su(m: usize, n: usize, p: usize, q: Option<usize>) -> Result<ClassificationReport> {
    if m + n < 4 || (m == n && n < 3) {
        return Err(Error::OutOfRange(format!("su({m}|{n}) needs m+n >= 4, and n >= 3 when m = n")));
    }
    let ctx = FlagContext::new(DiagramFamily::Su, m, n)?;
    classify_su_in(&ctx, p, q)
}

/// Rays (1, 2) with c = c₁ and (c₁, c₂) with c = 1 + (2c₁−c₂)c₂/(4c₁²).
pub fn osp_closed_solutions(n: usize, p: usize) -> Vec<EinsteinSolution> {
    let d = CircledDiagram::osp(n, p).expect("validated by caller");
    let c = crate::flag::closed_casimirs(&d);
    let c2 = int(1) + (int(2) * &c[0] - &c[1]) * &c[1] / (int(4) * &c[0] * &c[0]);
    vec![EinsteinSolution::ray("S1", vec![int(1), int(2)], c[0].clone()), EinsteinSolution::ray("S2", c.clone(), c2)]
}

/// The second ray in the form [2n+1−p : 2(p−1) | −½ − (p−1)(n+1−p)/(2n+1−p)²].
pub fn osp_closed_ray(n: usize, p: usize) -> (Vec<Rational>, Rational) {
    let (n, p) = (n as i64, p as i64);
    let x = vec![int(2 * n + 1 - p), int(2 * (p - 1))];
    let c = rat(-1, 2) - rat((p - 1) * (n + 1 - p), (2 * n + 1 - p) * (2 * n + 1 - p));
    normalize_ray(&x, &c)
}

pub fn classify_osp(n: usize, p: usize) -> Result<ClassificationReport> {
    let d = CircledDiagram::osp(n, p).map_err(|e| Error::OutOfRange(e.to_string()))?;
    let ctx = FlagContext::for_diagram(&d)?;
    let inv = ctx.decompose(&d)?.invariants_light()?;
    let solved = solve_diagonal(&inv)?;
    let closed = osp_closed_solutions(n, p);
    let params = Parameters { family: DiagramFamily::Osp, m: None, n, p, q: None };
    if keyed(&closed) != keyed(&solved) {
        return Err(Error::ReconciliationFailure(format!("{params}: closed forms and solver differ")));
    }
    let (tx, tc) = osp_closed_ray(n, p);
    if closed[1].x != tx || closed[1].c != tc {
        return Err(Error::ReconciliationFailure(format!("{params}: closed form of the second ray differs")));
    }
    let mut out = closed;
    for s in out.iter_mut() {
        s.residual_certified = solved.iter().any(|t| t.key() == s.key() && t.residual_certified);
    }
    Ok(ClassificationReport {
        parameters: params,
        case: CaseTag::C,
        count: out.len(),
        solutions: out,
        corollary_branch: "two rays".into(),
    })
}

/// Recomputes positivity tags from the representatives.
pub fn positivity_filter(mut report: ClassificationReport) -> ClassificationReport {
    for s in report.solutions.iter_mut() {
        s.positivity = match &s.family {
            None => Positivity::of(&s.representative),
            Some(f) => Positivity::of(&f.member(&vec![int(1); f.params.len()])),
        };
    }
    report
}

/// Positive solution sets expected from the SU positivity table: labels
/// with the sign of λ, plus positive families.
pub fn positive_table(m: usize, n: usize, p: usize, q: usize) -> Vec<(String, Positivity)> {
    let (m, n, p, q) = (m as i64, n as i64, p as i64, q as i64);
    let Ok(d) = CircledDiagram::su(m as usize, n as usize, &[p as usize, q as usize]) else {
        return Vec::new();
    };
    let (mn, nm, a) = (m - n, n - m, m + n - q);
    let mut out: Vec<(String, Positivity)> = Vec::new();
    let mut add = |k: i64, ls: &[i64], pos: Positivity| {
        for l in ls {
            out.push((format!("C{k},{l}"), pos));
        }
    };
    use Positivity::{PosWithLambdaNeg as Neg, PosWithLambdaPos as Pos};
    match d.case_tag().su_case() {
        Some(1) => {
            if p.max(q - p) < mn {
                add(1, &[1, 2, 3, 4], Pos);
            }
            if q - p < mn && mn <= p {
                add(1, &[1], Pos);
            }
            if p < mn && mn <= q - p {
                add(1, &[2], Pos);
            }
            if mn < p.min(q - p) {
                add(1, &[3], Neg);
            }
            if p == mn && q == 2 * mn {
                out.push(("F3".into(), Pos));
            }
        }
        Some(2) => {
            if nm < a && a < p && p < mn {
                add(2, &[1, 2, 3, 4], Pos);
            }
            if mn < p && p < a && a < nm {
                add(2, &[1, 2, 3, 4], Neg);
            }
            if mn <= p && nm < a && a < p {
                add(2, &[1], Pos);
            }
            if p <= a && p < mn {
                add(2, &[2], Pos);
            }
            if a <= p && a < nm {
                add(2, &[2], Neg);
            }
            if nm <= a && mn < p && p < a {
                add(2, &[3], Neg);
            }
            if p == nm && q == 2 * m {
                out.push(("F1".into(), Pos));
            }
            if p == mn && q == 2 * n {
                out.push(("F3".into(), Pos));
            }
        }
        _ => {
            if a.max(q - p) < nm {
                add(3, &[1, 2, 3, 4], Neg);
            }
            if nm < a.min(q - p) {
                add(3, &[1], Pos);
            }
            if a < nm && nm <= q - p {
                add(3, &[2], Neg);
            }
            if q - p < nm && nm <= a {
                add(3, &[3], Neg);
            }
            if p == 3 * m - n && q == 2 * m {
                out.push(("F1".into(), Pos));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup();
    out
}

/// The dual parameters (n, m, m+n−q, m+n−p) and x ↦ (−x₃, −x₂, −x₁).
pub fn dual_parameters(m: usize, n: usize, p: usize, q: usize) -> (usize, usize, usize, usize) {
    (n, m, m + n - q, m + n - p)
}

fn dual_solution(s: &EinsteinSolution) -> EinsteinSolution {
    match &s.family {
        None => {
            let rep: Vec<Rational> = s.representative.iter().rev().map(|v| -v.clone()).collect();
            let mut out = EinsteinSolution::ray("dual", rep, s.c.clone() * rat(1, 1));
            // c is attached to the representative, which maps with c unchanged
            let (x, c) = normalize_ray(&out.representative, &representative_c(s));
            out.x = x;
            out.c = c;
            out
        }
        Some(f) => {
            let generators = f.generators.iter().map(|g| g.iter().rev().map(|v| -v).collect()).collect();
            let constraint = f.constraint.as_ref().map(|nv| {
                let mut v: Vec<i64> = nv.iter().rev().copied().collect();
                if v.iter().find(|a| **a != 0).is_some_and(|a| *a < 0) {
                    v.iter_mut().for_each(|a| *a = -*a);
                }
                v
            });
            let mut out = EinsteinSolution::family("dual", Family { params: f.params.clone(), generators, constraint });
            out.family.as_mut().expect("family").params = f.params.clone();
            out
        }
    }
}

/// Einstein constant of the stored representative.
fn representative_c(s: &EinsteinSolution) -> Rational {
    // x = rep / μ and c_x = c_rep·μ, so c_rep = c_x·(x₀/rep₀)
    &s.c * &s.x[0] / &s.representative[0]
}

/// Checks that the SU solution set of (m,n,p,q) maps onto that of the dual parameters.
pub fn duality_check(m: usize, n: usize, p: usize, q: usize) -> Result<bool> {
    let here = classify_su(m, n, p, Some(q))?;
    let (m2, n2, p2, q2) = dual_parameters(m, n, p, q);
    let there = classify_su(m2, n2, p2, Some(q2))?;
    let mapped: Vec<EinsteinSolution> = here.solutions.iter().map(dual_solution).collect();
    Ok(keyed(&mapped) == keyed(&there.solutions))
}

/// Classification against a fresh decomposition, for callers that already
/// hold the invariants.
pub fn classify_from_invariants(inv: &FlagInvariants) -> Result<Vec<EinsteinSolution>> {
    solve_diagonal(inv)
}

/// Convenience: decompose, compute invariants and solve.
pub fn solve_diagram(d: &CircledDiagram) -> Result<Vec<EinsteinSolution>> {
    solve_diagonal(&analyze(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let (x, c) = normalize_ray(&[rat(-3, 2), int(-1)], &rat(11, 9));
        assert_eq!(x, vec![int(3), int(2)]);
        assert_eq!(c, rat(-11, 18));
        let (x, c) = normalize_ray(&[int(4), int(2), int(2)], &int(1));
        assert_eq!(x, vec![int(2), int(1), int(1)]);
        assert_eq!(c, int(2));
    }

    #[test]
    fn sturm_counts() {
        // (t−1)(t+2)(t²+1)
        let p = Poly(vec![int(-2), int(1), int(-1), int(1), int(1)]);
        assert_eq!(p.distinct_real_roots(), 2);
        // (t−1)²
        assert_eq!(Poly(vec![int(1), int(-2), int(1)]).distinct_real_roots(), 1);
        let pts: Vec<(Rational, Rational)> = (0..6).map(|k| (int(k), p.eval(&int(k)))).collect();
        assert_eq!(Poly::interpolate(&pts), p);
    }

    #[test]
    fn su41_golden() {
        let rep = classify_su(4, 1, 1, Some(2)).unwrap();
        let rendered: Vec<String> = rep.solutions.iter().map(|s| s.render()).collect();
        assert_eq!(
            rendered,
            vec!["[2 : 1 : 1 | c = 2]", "[1 : 2 : 1 | c = 2]", "[1 : 1 : 2 | c = 2]", "[1 : 1 : 1 | c = 5/2]"]
        );
        assert!(rep.solutions.iter().all(|s| s.residual_certified && s.positivity == Positivity::PosWithLambdaPos));
        assert_eq!(rep.corollary_branch, "p≠m−n & q−p≠m−n & q≠2(m−n)");
    }

    #[test]
    fn osp_golden() {
        let rep = classify_osp(2, 2).unwrap();
        let r: Vec<String> = rep.solutions.iter().map(|s| s.render()).collect();
        assert_eq!(r, vec!["[1 : 2 | c = -3/2]", "[3 : 2 | c = -11/18]"]);
        let rep = classify_osp(3, 2).unwrap();
        let r: Vec<String> = rep.solutions.iter().map(|s| s.render()).collect();
        assert_eq!(r, vec!["[1 : 2 | c = -5/2]", "[5 : 2 | c = -29/50]"]);
    }

    #[test]
    fn family_rendering() {
        let f = Family::plane(3, 2);
        assert_eq!(f.render(), "{(x1, x2, x1+x2), c = 0; x1 x2 ≠ 0, x1+x2 ≠ 0}");
        assert_eq!(Family::plane(3, 0).render(), "{(x2+x3, x2, x3), c = 0; x2 x3 ≠ 0, x2+x3 ≠ 0}");
        assert_eq!(Family::everything(1).render(), "{(x1), c = 0; x1 ≠ 0}");
    }
}
