//! Flag supermanifolds from circled Dynkin diagrams: the split g = k ⊕ m,
//! the irreducible blocks m_i, and their invariants (b_i, c_i, d_i, [ijk]).
//!
//! Blocks are fibres of the positive roots of Δ_M under the map
//! α ↦ (coefficients of α at the circled simple roots). Every block is a
//! union of A_α/B_α pairs of the compact real basis, so projections onto k,
//! m and m_i are coordinate restrictions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::roots::{casimir_closed, RootSystem, Weight};
use crate::scalars::{int, rat, Rational};
use crate::superalgebra::{build_algebra, graded_bracket, AlgebraModel, Family, RealAlgebra, RealKind};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramFamily {
    Su,
    Osp,
}

impl fmt::Display for DiagramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramFamily::Su => write!(f, "su"),
            DiagramFamily::Osp => write!(f, "osp"),
        }
    }
}

impl std::str::FromStr for DiagramFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "su" | "sl" => Ok(DiagramFamily::Su),
            "osp" => Ok(DiagramFamily::Osp),
            other => Err(Error::UnsupportedDiagram(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "A-one")]
    AOne,
    #[serde(rename = "A-case1")]
    ACase1,
    #[serde(rename = "A-case2")]
    ACase2,
    #[serde(rename = "A-case3")]
    ACase3,
    #[serde(rename = "C")]
    C,
}

impl CaseTag {
    /// 1, 2 or 3 for the two-node su cases.
    pub fn su_case(self) -> Option<u8> {
        match self {
            CaseTag::ACase1 => Some(1),
            CaseTag::ACase2 => Some(2),
            CaseTag::ACase3 => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::AOne => "A-one",
            CaseTag::ACase1 => "A-case1",
            CaseTag::ACase2 => "A-case2",
            CaseTag::ACase3 => "A-case3",
            CaseTag::C => "C",
        };
        write!(f, "{s}")
    }
}

/// A Dynkin diagram of sl(m|n) or osp(2|2n) with circled nodes (1-based).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct CircledDiagram {
    pub family: DiagramFamily,
    pub m: usize,
    pub n: usize,
    pub circled: Vec<usize>,
}

/// Parses "1,2" into node indices; rejects empty items, zero and duplicates.
pub fn parse_circle(s: &str) -> Result<Vec<usize>> {
    if s.len() > 256 {
        return Err(Error::Parse("circle list too long".into()));
    }
    let mut out = Vec::new();
    for item in s.split(',') {
        let t = item.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad node index {t:?}")));
        }
        let v: usize = t.parse().map_err(|_| Error::Parse(format!("bad node index {t:?}")))?;
        if v == 0 {
            return Err(Error::Parse("node indices start at 1".into()));
        }
        out.push(v);
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != out.len() {
        return Err(Error::Parse("repeated node index".into()));
    }
    Ok(sorted)
}

impl CircledDiagram {
    /// su(m|n) with one or two circled nodes among 1..m+n−1.
    pub fn su(m: usize, n: usize, circled: &[usize]) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::UnsupportedDiagram(format!("su({m}|{n}) needs m, n >= 1")));
        }
        if m == n && m < 3 {
            return Err(Error::UnsupportedDiagram(format!("su({m}|{n}) with m = n needs m >= 3")));
        }
        let mut c = circled.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.is_empty() || c.len() > 2 || c.len() != circled.len() {
            return Err(Error::UnsupportedDiagram(format!(
                "expected one or two distinct circled nodes, got {circled:?}"
            )));
        }
        if c[0] == 0 || *c.last().expect("non-empty") > m + n - 1 {
            return Err(Error::UnsupportedDiagram(format!("nodes must lie in 1..={}", m + n - 1)));
        }
        Ok(CircledDiagram { family: DiagramFamily::Su, m, n, circled: c })
    }

    /// osp(2|2n) with the node p circled, 2 ≤ p ≤ n.
    pub fn osp(n: usize, p: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDiagram(format!("osp(2|2*{n}) needs n >= 2")));
        }
        if p < 2 || p > n {
            return Err(Error::UnsupportedDiagram(format!("osp circled node must satisfy 2 <= p <= n, got {p}")));
        }
        Ok(CircledDiagram { family: DiagramFamily::Osp, m: 2, n, circled: vec![p] })
    }

    pub fn new(family: DiagramFamily, m: usize, n: usize, circled: &[usize]) -> Result<Self> {
        match family {
            DiagramFamily::Su => Self::su(m, n, circled),
            DiagramFamily::Osp => {
                if circled.len() != 1 {
                    return Err(Error::UnsupportedDiagram("osp diagrams take exactly one circled node".into()));
                }
                Self::osp(n, circled[0])
            }
        }
    }

    pub fn p(&self) -> usize {
        self.circled[0]
    }

    pub fn q(&self) -> Option<usize> {
        self.circled.get(1).copied()
    }

    pub fn case_tag(&self) -> CaseTag {
        match (self.family, self.q()) {
            (DiagramFamily::Osp, _) => CaseTag::C,
            (DiagramFamily::Su, None) => CaseTag::AOne,
            (DiagramFamily::Su, Some(q)) => {
                let (p, m) = (self.p(), self.m);
                if q <= m {
                    CaseTag::ACase1
                } else if p < m {
                    CaseTag::ACase2
                } else {
                    CaseTag::ACase3
                }
            }
        }
    }

    /// Expected block labels in block order: (m_{0,1}, m_{1,1}, m_{1,0}) for
    /// two su nodes, coefficient 1 then 2 for osp.
    pub fn block_labels(&self) -> Vec<Vec<i64>> {
        match (self.family, self.circled.len()) {
            (DiagramFamily::Su, 1) => vec![vec![1]],
            (DiagramFamily::Su, _) => vec![vec![0, 1], vec![1, 1], vec![1, 0]],
            (DiagramFamily::Osp, _) => vec![vec![1], vec![2]],
        }
    }
}

impl fmt::Display for CircledDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.circled.iter().map(|c| c.to_string()).collect();
        match self.family {
            DiagramFamily::Su => write!(f, "su({}|{}) circled {{{}}}", self.m, self.n, nodes.join(",")),
            DiagramFamily::Osp => write!(f, "osp(2|{}) circled {{{}}}", 2 * self.n, nodes.join(",")),
        }
    }
}

/// The compact real form of one algebra, shared by every diagram on it.
pub struct FlagContext {
    pub family: DiagramFamily,
    pub m: usize,
    pub n: usize,
    pub model: AlgebraModel,
    pub real: RealAlgebra,
}

impl FlagContext {
    pub fn new(family: DiagramFamily, m: usize, n: usize) -> Result<Self> {
        let model = match family {
            DiagramFamily::Su => build_algebra(Family::Sl, m, n)?,
            DiagramFamily::Osp => build_algebra(Family::Osp, 2, n)?,
        };
        let real = RealAlgebra::compact(&model)?;
        Ok(FlagContext { family, m, n, model, real })
    }

    pub fn for_diagram(d: &CircledDiagram) -> Result<Self> {
        Self::new(d.family, d.m, d.n)
    }

    pub fn roots(&self) -> &RootSystem {
        self.model.roots.as_ref().expect("flag algebras carry root data")
    }

    pub fn decompose(&self, diagram: &CircledDiagram) -> Result<IsotropyDecomposition<'_>> {
        IsotropyDecomposition::new(self, diagram.clone())
    }
}

#[derive(Clone, Debug)]
pub struct MBlock {
    pub index: usize,
    /// Coefficients of the block's positive roots at the circled nodes.
    pub label: Vec<i64>,
    /// Real basis indices.
    pub basis: Vec<usize>,
    pub dim_even: usize,
    pub dim_odd: usize,
    /// Right Q-duals of `basis`, as vectors over the global real basis.
    pub duals: Vec<SparseVec>,
    /// ε/δ coordinates of the highest root of the block under k.
    pub highest_root: Vec<i64>,
}

impl MBlock {
    pub fn d(&self) -> i64 {
        self.dim_even as i64 - self.dim_odd as i64
    }
}

/// Where a block bracket lands.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Target {
    K,
    Block(usize),
}

/// For every ordered pair of blocks, the summands their bracket reaches.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct BracketPattern {
    pub s: usize,
    pub targets: BTreeMap<(usize, usize), BTreeSet<Target>>,
}

impl BracketPattern {
    pub fn reaches(&self, i: usize, j: usize, t: Target) -> bool {
        self.targets.get(&(i, j)).is_some_and(|s| s.contains(&t))
    }

    /// [m_i, m_j] ⊆ the listed summands.
    pub fn contained_in(&self, i: usize, j: usize, allowed: &[Target]) -> bool {
        self.targets.get(&(i, j)).is_none_or(|s| s.iter().all(|t| allowed.contains(t)))
    }

    /// The unique (j ≤ k) carrying all of [m_i, m_u]_{m_v}, u ≤ v.
    pub fn selected_pair(&self, i: usize) -> Option<(usize, usize)> {
        let mut live = Vec::new();
        for u in 0..self.s {
            for v in u..self.s {
                if self.reaches(i, u, Target::Block(v)) {
                    live.push((u, v));
                }
            }
        }
        match live.len() {
            1 => Some(live[0]),
            0 if self.s == 1 => Some((0, 0)),
            _ => None,
        }
    }
}

/// Symmetric s×s×s table of structure constants [ijk] (0-based indices).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureTable {
    pub s: usize,
    values: Vec<Rational>,
}

impl StructureTable {
    pub fn zeros(s: usize) -> Self {
        StructureTable { s, values: vec![Rational::zero(); s * s * s] }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.values[(i * self.s + j) * self.s + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        let s = self.s;
        self.values[(i * s + j) * s + k] = v;
    }

    fn add(&mut self, i: usize, j: usize, k: usize, v: &Rational) {
        let s = self.s;
        self.values[(i * s + j) * s + k] += v;
    }

    /// Sets [ijk] and all its permutations.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.set(a, b, c, v.clone());
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let s = self.s;
        (0..s).all(|i| {
            (0..s).all(|j| {
                (0..s).all(|k| {
                    let v = self.get(i, j, k);
                    v == self.get(j, i, k) && v == self.get(i, k, j)
                })
            })
        })
    }

    /// Σ_{j,k} [ijk]
    pub fn row_sum(&self, i: usize) -> Rational {
        let mut acc = Rational::zero();
        for j in 0..self.s {
            for k in 0..self.s {
                acc += self.get(i, j, k);
            }
        }
        acc
    }

    /// Nonzero entries with i ≤ j ≤ k, 1-based.
    pub fn nonzero_sorted(&self) -> Vec<((usize, usize, usize), Rational)> {
        let mut out = Vec::new();
        for i in 0..self.s {
            for j in i..self.s {
                for k in j..self.s {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push(((i + 1, j + 1, k + 1), v.clone()));
                    }
                }
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct StructureEntry {
    ijk: [usize; 3],
    #[serde(with = "crate::scalars::rational_str")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct StructureRepr {
    s: usize,
    nonzero: Vec<StructureEntry>,
}

impl Serialize for StructureTable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StructureRepr {
            s: self.s,
            nonzero: self
                .nonzero_sorted()
                .into_iter()
                .map(|((i, j, k), value)| StructureEntry { ijk: [i, j, k], value })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StructureTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StructureRepr::deserialize(de)?;
        if r.s > 64 {
            return Err(D::Error::custom("structure table too large"));
        }
        let mut t = StructureTable::zeros(r.s);
        for e in r.nonzero {
            let [i, j, k] = e.ijk;
            if i == 0 || j == 0 || k == 0 || i > r.s || j > r.s || k > r.s {
                return Err(D::Error::custom("structure index out of range"));
            }
            t.set_symmetric(i - 1, j - 1, k - 1, e.value);
        }
        Ok(t)
    }
}

/// The split g = k ⊕ m₁ ⊕ … ⊕ m_s for one circled diagram.
pub struct IsotropyDecomposition<'a> {
    pub ctx: &'a FlagContext,
    pub diagram: CircledDiagram,
    pub case_tag: CaseTag,
    /// Real basis indices spanning k.
    pub k: Vec<usize>,
    pub blocks: Vec<MBlock>,
    /// Block of each real basis index; `None` for k.
    pub block_of: Vec<Option<usize>>,
    k_duals: Vec<SparseVec>,
}

impl<'a> IsotropyDecomposition<'a> {
    fn new(ctx: &'a FlagContext, diagram: CircledDiagram) -> Result<Self> {
        if (diagram.family, diagram.m, diagram.n) != (ctx.family, ctx.m, ctx.n) {
            return Err(Error::UnsupportedDiagram(format!("{diagram} does not live on this algebra")));
        }
        let rs = ctx.roots();
        let circled0: Vec<usize> = diagram.circled.iter().map(|c| c - 1).collect();
        if circled0.iter().any(|&c| c >= rs.rank()) {
            return Err(Error::UnsupportedDiagram(format!("{diagram}: node out of range")));
        }
        let labels = diagram.block_labels();
        let real = &ctx.real;
        let mut k = Vec::new();
        let mut block_of = vec![None; real.dim()];
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
        let mut fibre_roots: Vec<Vec<Vec<i64>>> = vec![Vec::new(); labels.len()];
        for a in 0..real.dim() {
            match (&real.kinds[a], &real.roots[a]) {
                (RealKind::Cartan, _) | (_, None) => k.push(a),
                (_, Some(root)) => {
                    let label: Vec<i64> = circled0.iter().map(|&c| root.simple_coeffs[c]).collect();
                    if label.iter().all(|&c| c == 0) {
                        k.push(a);
                        continue;
                    }
                    let Some(idx) = labels.iter().position(|l| *l == label) else {
                        return Err(Error::UnsupportedDiagram(format!("{diagram}: unexpected block label {label:?}")));
                    };
                    block_of[a] = Some(idx);
                    members[idx].push(a);
                    if real.kinds[a] == RealKind::A {
                        fibre_roots[idx].push(root.coords.clone());
                    }
                }
            }
        }
        let k_simple: Vec<usize> = (0..rs.rank()).filter(|i| !circled0.contains(i)).collect();
        let mut blocks = Vec::new();
        for (idx, basis) in members.into_iter().enumerate() {
            if basis.is_empty() {
                return Err(Error::UnsupportedDiagram(format!("{diagram}: block {:?} is empty", labels[idx])));
            }
            let dim_odd = basis.iter().filter(|&&a| real.odd[a]).count();
            let duals = real.q_duals(&basis)?;
            let highest_root = highest_in_fibre(rs, &fibre_roots[idx], &k_simple).ok_or_else(|| {
                Error::UnsupportedDiagram(format!("{diagram}: block {:?} has no unique highest weight", labels[idx]))
            })?;
            blocks.push(MBlock {
                index: idx,
                label: labels[idx].clone(),
                dim_even: basis.len() - dim_odd,
                dim_odd,
                basis,
                duals,
                highest_root,
            });
        }
        let k_duals = real.q_duals(&k)?;
        let dec = IsotropyDecomposition { ctx, case_tag: diagram.case_tag(), diagram, k, blocks, block_of, k_duals };
        dec.check_orthogonality()?;
        Ok(dec)
    }

    pub fn real(&self) -> &RealAlgebra {
        &self.ctx.real
    }

    pub fn s(&self) -> usize {
        self.blocks.len()
    }

    /// Indices of m in block order.
    pub fn m_indices(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|b| b.basis.iter().copied()).collect()
    }

    pub fn k_duals(&self) -> &[SparseVec] {
        &self.k_duals
    }

    pub fn project_m(&self, v: &SparseVec) -> SparseVec {
        v.restrict(|a| self.block_of[a].is_some())
    }

    pub fn project_k(&self, v: &SparseVec) -> SparseVec {
        v.restrict(|a| self.block_of[a].is_none())
    }

    pub fn project_block(&self, v: &SparseVec, i: usize) -> SparseVec {
        v.restrict(|a| self.block_of[a] == Some(i))
    }

    /// Q(k, m_i) = 0 and Q(m_i, m_j) = 0 for i ≠ j.
    pub fn check_orthogonality(&self) -> Result<()> {
        let real = self.real();
        for a in 0..real.dim() {
            for b in real.gram_row(a).support() {
                if self.block_of[a] != self.block_of[b] {
                    return Err(Error::Invariant(format!(
                        "Q({}, {}) != 0 across summands",
                        real.labels[a], real.labels[b]
                    )));
                }
            }
        }
        Ok(())
    }

    /// C(v) = −Σ (−1)^{[z]} [z, [z̄, v]] over the k basis.
    pub fn casimir_apply(&self, v: &SparseVec) -> SparseVec {
        let real = self.real();
        let mut out = SparseVec::new();
        for (l, &z) in self.k.iter().enumerate() {
            let inner = real.bracket(&self.k_duals[l], v);
            if inner.is_zero() {
                continue;
            }
            let outer = real.ad_basis(z, &inner);
            let sign = if real.odd[z] { int(1) } else { int(-1) };
            out.axpy(&sign, &outer);
        }
        out
    }

    /// Operator-route Casimir eigenvalue of block i, checked on every basis vector.
    pub fn casimir_operator(&self, i: usize) -> Result<Rational> {
        let block = &self.blocks[i];
        let mut value: Option<Rational> = None;
        for &a in &block.basis {
            let e = SparseVec::unit(a);
            let ce = self.casimir_apply(&e);
            let c = ce.get(a);
            if ce != e.scaled(&c) {
                return Err(Error::CasimirNotScalar {
                    block: i + 1,
                    detail: format!("C({}) is not a multiple of itself", self.real().labels[a]),
                });
            }
            match &value {
                None => value = Some(c),
                Some(v) if *v != c => {
                    return Err(Error::CasimirNotScalar {
                        block: i + 1,
                        detail: format!("eigenvalues {} and {} differ", v, c),
                    })
                }
                _ => {}
            }
        }
        value.ok_or(Error::CasimirNotScalar { block: i + 1, detail: "empty block".into() })
    }

    pub fn k_simple(&self) -> Vec<usize> {
        let rank = self.ctx.roots().rank();
        (0..rank).filter(|i| !self.diagram.circled.contains(&(i + 1))).collect()
    }

    pub fn highest_weight(&self, i: usize) -> Weight {
        let rs = self.ctx.roots();
        Weight::from_ints(&self.blocks[i].highest_root, rs.n_eps())
    }

    /// −(Λ_i + 2ρ_k, Λ_i)
    pub fn casimir_closed(&self, i: usize) -> Rational {
        casimir_closed(self.ctx.roots(), &self.k_simple(), &self.highest_weight(i))
    }

    /// Checks that the root vector of the highest weight is killed by the
    /// raising operators of k, inside the complex matrix model.
    pub fn highest_weight_certified(&self, i: usize) -> Result<bool> {
        let model = &self.ctx.model;
        let rs = self.ctx.roots();
        let hw = model
            .root_vector(&self.blocks[i].highest_root)
            .ok_or_else(|| Error::Invariant("highest weight is not a root".into()))?;
        for s in self.k_simple() {
            let raise = model.root_vector(&rs.simple[s].coords).expect("simple root vector");
            if !graded_bracket(raise, hw)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Killing form entry B(e_a, e_b) from structure constants.
    pub fn killing_basis(&self, a: usize, b: usize) -> Rational {
        let real = self.real();
        let mut acc = Rational::zero();
        for c in 0..real.dim() {
            let mut t = Rational::zero();
            for (d, v) in real.bracket_basis(b, c).iter() {
                let w = real.bracket_basis(a, d).get(c);
                if !w.is_zero() {
                    t += v * w;
                }
            }
            if real.odd[c] {
                acc -= t;
            } else {
                acc += t;
            }
        }
        acc
    }

    /// b_i with B|m_i = −b_i Q|m_i, checked on every same-parity basis pair.
    pub fn killing_ratio(&self, i: usize) -> Result<Rational> {
        let real = self.real();
        let basis = &self.blocks[i].basis;
        let mut ratio: Option<Rational> = None;
        for &a in basis {
            for (b, q) in real.gram_row(a).iter() {
                let r = -self.killing_basis(a, b) / q;
                match &ratio {
                    None => ratio = Some(r),
                    Some(x) if *x != r => return Err(Error::Invariant(format!("B/Q not constant on block {}", i + 1))),
                    _ => {}
                }
            }
        }
        let b = ratio.ok_or_else(|| Error::DegenerateForm(format!("Q vanishes on block {}", i + 1)))?;
        for &a in basis {
            for &c in basis {
                if real.odd[a] != real.odd[c] {
                    continue;
                }
                if self.killing_basis(a, c) != -(&b * real.q_basis(a, c)) {
                    return Err(Error::Invariant(format!("B != -bQ on ({}, {})", real.labels[a], real.labels[c])));
                }
            }
        }
        Ok(b)
    }

    /// b from a single Q-nonzero pair of block i, without the full check.
    pub fn killing_ratio_sampled(&self, i: usize) -> Result<Rational> {
        let real = self.real();
        for &a in &self.blocks[i].basis {
            if let Some((b, q)) = real.gram_row(a).iter().next() {
                return Ok(-self.killing_basis(a, b) / q);
            }
        }
        Err(Error::DegenerateForm(format!("Q vanishes on block {}", i + 1)))
    }

    /// Which summands each block bracket reaches.
    pub fn bracket_pattern(&self) -> BracketPattern {
        let real = self.real();
        let mut pat = BracketPattern { s: self.s(), targets: BTreeMap::new() };
        for (i, bi) in self.blocks.iter().enumerate() {
            for (j, bj) in self.blocks.iter().enumerate() {
                let entry = pat.targets.entry((i, j)).or_default();
                for &a in &bi.basis {
                    for &b in &bj.basis {
                        for c in real.bracket_basis(a, b).support() {
                            entry.insert(match self.block_of[c] {
                                None => Target::K,
                                Some(v) => Target::Block(v),
                            });
                        }
                    }
                }
            }
        }
        pat
    }

    /// [ijk] = −Σ_α (−1)^{[e_α]} Str_{m_j}(ad_{m_j}(e_α) ad_{m_k}(ē_α)).
    pub fn structure_constants(&self) -> StructureTable {
        let real = self.real();
        let s = self.s();
        let mut t = StructureTable::zeros(s);
        for (i, bi) in self.blocks.iter().enumerate() {
            for (alpha, &a) in bi.basis.iter().enumerate() {
                let sign_a = if real.odd[a] { -1 } else { 1 };
                let dual = &bi.duals[alpha];
                for (j, bj) in self.blocks.iter().enumerate() {
                    for &b in &bj.basis {
                        let sign_b = if real.odd[b] { -1 } else { 1 };
                        let w = real.bracket(dual, &SparseVec::unit(b));
                        if w.is_zero() {
                            continue;
                        }
                        for k in 0..s {
                            let wk = self.project_block(&w, k);
                            if wk.is_zero() {
                                continue;
                            }
                            let coef = real.ad_basis(a, &wk).get(b);
                            if !coef.is_zero() {
                                t.add(i, j, k, &(coef * int(-(sign_a * sign_b))));
                            }
                        }
                    }
                }
            }
        }
        t
    }

    /// [ijk] = −Σ Q(e_γ, [e_α, e_β]_{m_k}) Q([ē_β, ē_α]_{m_k}, ē_γ) by direct triple sum.
    pub fn structure_constants_triple(&self) -> StructureTable {
        let real = self.real();
        let s = self.s();
        let mut t = StructureTable::zeros(s);
        for (i, bi) in self.blocks.iter().enumerate() {
            for (alpha, &a) in bi.basis.iter().enumerate() {
                for (j, bj) in self.blocks.iter().enumerate() {
                    for (beta, &b) in bj.basis.iter().enumerate() {
                        let x = real.bracket_basis(a, b);
                        let y = real.bracket(&bj.duals[beta], &bi.duals[alpha]);
                        if x.is_zero() || y.is_zero() {
                            continue;
                        }
                        for (k, bk) in self.blocks.iter().enumerate() {
                            let xk = self.project_block(x, k);
                            let yk = self.project_block(&y, k);
                            if xk.is_zero() || yk.is_zero() {
                                continue;
                            }
                            let mut acc = Rational::zero();
                            for (gamma, &c) in bk.basis.iter().enumerate() {
                                let q1 = real.q(&SparseVec::unit(c), &xk);
                                if q1.is_zero() {
                                    continue;
                                }
                                acc += q1 * real.q(&yk, &bk.duals[gamma]);
                            }
                            t.add(i, j, k, &-acc);
                        }
                    }
                }
            }
        }
        t
    }

    /// Computes every block invariant and cross-checks the two Casimir
    /// routes, the sum rule and the symmetry of [ijk].
    pub fn invariants(&self) -> Result<FlagInvariants> {
        self.invariants_with(true)
    }

    /// As `invariants`, but b is read off one pair per block instead of
    /// checking B = −bQ on every pair. Used on large parameter grids.
    pub fn invariants_light(&self) -> Result<FlagInvariants> {
        self.invariants_with(false)
    }

    fn invariants_with(&self, full_killing: bool) -> Result<FlagInvariants> {
        let rs = self.ctx.roots();
        let mut blocks = Vec::new();
        for i in 0..self.s() {
            let c = self.casimir_operator(i)?;
            let closed = self.casimir_closed(i);
            if c != closed {
                return Err(Error::CasimirNotScalar {
                    block: i + 1,
                    detail: format!("operator route {} but highest-weight route {}", c, closed),
                });
            }
            let b = if full_killing { self.killing_ratio(i)? } else { self.killing_ratio_sampled(i)? };
            let blk = &self.blocks[i];
            blocks.push(BlockInvariants {
                label: blk.label.clone(),
                d: int(blk.d()),
                b,
                c,
                dim_even: blk.dim_even,
                dim_odd: blk.dim_odd,
                highest_weight: Weight::from_ints(&blk.highest_root, rs.n_eps()),
            });
        }
        let ijk = self.structure_constants();
        if !ijk.is_symmetric() {
            return Err(Error::Invariant("[ijk] is not symmetric".into()));
        }
        for (i, blk) in blocks.iter().enumerate() {
            let lhs = ijk.row_sum(i);
            let rhs = &blk.d * (&blk.b - int(2) * &blk.c);
            if lhs != rhs {
                return Err(Error::SumRuleViolation {
                    block: i + 1,
                    detail: format!("sum {} vs d(b-2c) = {}", lhs, rhs),
                });
            }
        }
        let pattern = self.bracket_pattern();
        let selected = (0..self.s()).map(|i| pattern.selected_pair(i)).collect();
        Ok(FlagInvariants { diagram: self.diagram.clone(), case_tag: self.case_tag, blocks, ijk, selected })
    }
}

/// The unique root of a fibre that no uncircled simple root can raise.
fn highest_in_fibre(rs: &RootSystem, fibre: &[Vec<i64>], k_simple: &[usize]) -> Option<Vec<i64>> {
    let tops: Vec<&Vec<i64>> = fibre
        .iter()
        .filter(|r| {
            k_simple.iter().all(|&s| {
                let raised: Vec<i64> = r.iter().zip(&rs.simple[s].coords).map(|(a, b)| a + b).collect();
                !fibre.contains(&raised)
            })
        })
        .collect();
    match tops.as_slice() {
        [one] => Some((*one).clone()),
        _ => None,
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BlockInvariants {
    pub label: Vec<i64>,
    #[serde(with = "crate::scalars::rational_str")]
    pub d: Rational,
    #[serde(with = "crate::scalars::rational_str")]
    pub b: Rational,
    #[serde(with = "crate::scalars::rational_str")]
    pub c: Rational,
    pub dim_even: usize,
    pub dim_odd: usize,
    pub highest_weight: Weight,
}

/// Everything the Einstein solver needs about one diagram.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlagInvariants {
    pub diagram: CircledDiagram,
    pub case_tag: CaseTag,
    pub blocks: Vec<BlockInvariants>,
    pub ijk: StructureTable,
    /// 0-based i-selected pairs.
    pub selected: Vec<Option<(usize, usize)>>,
}

impl FlagInvariants {
    pub fn s(&self) -> usize {
        self.blocks.len()
    }

    pub fn b(&self) -> Vec<Rational> {
        self.blocks.iter().map(|b| b.b.clone()).collect()
    }

    pub fn c(&self) -> Vec<Rational> {
        self.blocks.iter().map(|b| b.c.clone()).collect()
    }

    pub fn d(&self) -> Vec<Rational> {
        self.blocks.iter().map(|b| b.d.clone()).collect()
    }
}

/// Decomposes and computes invariants in one call.
pub fn analyze(diagram: &CircledDiagram) -> Result<FlagInvariants> {
    let ctx = FlagContext::for_diagram(diagram)?;
    let dec = ctx.decompose(diagram)?;
    dec.invariants()
}

/// Closed-form values of b, c_i, d_i, [ijk] and highest weights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedForms {
    pub b: Rational,
    pub c: Vec<Rational>,
    pub d: Vec<Rational>,
    pub ijk: StructureTable,
    pub highest_weights: Vec<Weight>,
}

fn unit_weight(n_eps: usize, n_delta: usize, idx: usize, v: i64) -> Vec<i64> {
    let mut w = vec![0i64; n_eps + n_delta];
    w[idx] += v;
    w
}

/// Casimirs per block from the table for two-node su cases, (m−n) for one
/// node, and (−n+(p−1)/2, −(p−1)) for osp.
pub fn closed_casimirs(d: &CircledDiagram) -> Vec<Rational> {
    let (m, n, p) = (d.m as i64, d.n as i64, d.p() as i64);
    match (d.case_tag(), d.q().map(|q| q as i64)) {
        (CaseTag::AOne, _) => vec![int(m - n)],
        (CaseTag::ACase1, Some(q)) => vec![int(m - n - p), int(m - n + p - q), int(q)],
        (CaseTag::ACase2, Some(q)) => vec![int(m - n - p), int(-m - n + p + q), int(2 * m - q)],
        (CaseTag::ACase3, Some(q)) => vec![int(-m - n + p), int(m - n - p + q), int(2 * m - q)],
        (CaseTag::C, _) => vec![int(-n) + rat(p - 1, 2), int(-(p - 1))],
        _ => unreachable!("two-node cases carry q"),
    }
}

pub fn closed_forms(d: &CircledDiagram) -> ClosedForms {
    let (m, n, p) = (d.m as i64, d.n as i64, d.p() as i64);
    let c = closed_casimirs(d);
    let two = int(2);
    match d.family {
        DiagramFamily::Su => {
            let b = int(2 * (m - n));
            let (mu, nu) = (d.m, d.n);
            let eps = |i: usize| i - 1;
            let del = |j: usize| mu + j - 1;
            let hw = |a: usize, bb: usize| {
                let mut w = unit_weight(mu, nu, a, 1);
                w[bb] -= 1;
                Weight::from_ints(&w, mu)
            };
            match d.q() {
                None => {
                    let d1 = if p <= m { 2 * p * (m - p - n) } else { -2 * (2 * m - p) * (m + n - p) };
                    ClosedForms {
                        b,
                        c,
                        d: vec![int(d1)],
                        ijk: StructureTable::zeros(1),
                        highest_weights: vec![hw(eps(1), del(nu))],
                    }
                }
                Some(q) => {
                    let f: Vec<Rational> = c.iter().map(|ci| &b - &two * ci).collect();
                    let half = rat(1, 2);
                    let dd = vec![&half * &f[1] * &f[2], &half * &f[0] * &f[2], &half * &f[0] * &f[1]];
                    let mut ijk = StructureTable::zeros(3);
                    ijk.set_symmetric(0, 1, 2, rat(1, 4) * &f[0] * &f[1] * &f[2]);
                    let pp = d.p();
                    let (l10, l01) = match d.case_tag() {
                        CaseTag::ACase1 => (hw(eps(1), eps(q)), hw(eps(pp + 1), del(nu))),
                        CaseTag::ACase2 => (hw(eps(1), del(q - mu)), hw(eps(pp + 1), del(nu))),
                        _ => (hw(eps(1), del(q - mu)), hw(del(pp - mu + 1), del(nu))),
                    };
                    ClosedForms { b, c, d: dd, ijk, highest_weights: vec![l01, hw(eps(1), del(nu)), l10] }
                }
            }
        }
        DiagramFamily::Osp => {
            let b = int(-2 * n);
            let f1 = &b - &two * &c[0];
            let f2 = &b - &two * &c[1];
            let pm2 = int(p - 2);
            let dd = vec![int(-2) * &pm2 * &f2, -(&pm2 * &f1)];
            let mut ijk = StructureTable::zeros(2);
            ijk.set_symmetric(0, 0, 1, -(&pm2 * &f1 * &f2));
            let nu = d.n;
            let w = |j: usize| {
                let mut v = unit_weight(1, nu, 0, 1);
                v[j] += 1;
                Weight::from_ints(&v, 1)
            };
            ClosedForms { b, c, d: dd, ijk, highest_weights: vec![w(d.p()), w(1)] }
        }
    }
}

/// d_i by counting: the superdimension of Hom between index intervals, times 2.
/// Independent of root fibres and of the Casimirs.
pub fn counted_superdimensions(d: &CircledDiagram) -> Vec<i64> {
    match d.family {
        DiagramFamily::Su => {
            let (m, n) = (d.m as i64, d.n as i64);
            // superdimension of the index interval (lo, hi]
            let sdim = |lo: i64, hi: i64| {
                let even = (hi.min(m) - lo.min(m)).max(0);
                let odd = (hi - lo) - even;
                even - odd
            };
            let p = d.p() as i64;
            match d.q() {
                None => vec![2 * sdim(0, p) * sdim(p, m + n)],
                Some(q) => {
                    let q = q as i64;
                    let (s1, s2, s3) = (sdim(0, p), sdim(p, q), sdim(q, m + n));
                    vec![2 * s2 * s3, 2 * s1 * s3, 2 * s1 * s2]
                }
            }
        }
        DiagramFamily::Osp => {
            // m₁ pairs a (1|p−1) space with a (0|2(n+1−p)) space; m₂ is the
            // symmetric square of the (p−1)-dim δ part plus p−1 odd ε+δ_j lines.
            let (n, p) = (d.n as i64, d.p() as i64);
            let s_mu = 1 - (p - 1);
            let s_nu = -(2 * (n + 1 - p));
            let even2 = (p - 1) * p / 2;
            let odd2 = p - 1;
            let s_wedge = even2 - odd2;
            vec![2 * s_mu * s_nu, 2 * s_wedge]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su(m: usize, n: usize, c: &[usize]) -> CircledDiagram {
        CircledDiagram::su(m, n, c).unwrap()
    }

    #[test]
    fn parse_circle_accepts_and_rejects() {
        assert_eq!(parse_circle("2,1").unwrap(), vec![1, 2]);
        assert_eq!(parse_circle(" 3 ").unwrap(), vec![3]);
        for bad in ["", "1,,2", "0", "1,1", "a", "-1", "1.5"] {
            assert!(parse_circle(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn diagram_validation() {
        assert!(CircledDiagram::su(2, 2, &[1]).is_err());
        assert!(CircledDiagram::su(3, 2, &[5]).is_err());
        assert!(CircledDiagram::su(3, 2, &[1, 2, 3]).is_err());
        assert!(CircledDiagram::osp(2, 1).is_err());
        assert!(CircledDiagram::osp(2, 3).is_err());
        assert_eq!(su(3, 2, &[1, 3]).case_tag(), CaseTag::ACase1);
        assert_eq!(su(3, 2, &[1, 4]).case_tag(), CaseTag::ACase2);
        assert_eq!(su(3, 2, &[3, 4]).case_tag(), CaseTag::ACase3);
        assert_eq!(su(4, 1, &[1, 2]).case_tag(), CaseTag::ACase1);
    }

    #[test]
    fn su32_one_node_block() {
        let d = su(3, 2, &[2]);
        let ctx = FlagContext::for_diagram(&d).unwrap();
        let dec = ctx.decompose(&d).unwrap();
        assert_eq!(dec.s(), 1);
        // Δ_M: ε₁,ε₂ against ε₃,δ₁,δ₂ → 2 even + 4 odd complex roots
        assert_eq!(dec.blocks[0].dim_even, 4);
        assert_eq!(dec.blocks[0].dim_odd, 8);
        let inv = dec.invariants().unwrap();
        assert_eq!(inv.blocks[0].c, int(1));
        assert_eq!(inv.blocks[0].b, int(2));
        assert!(inv.ijk.get(0, 0, 0).is_zero());
        assert_eq!(inv.selected[0], Some((0, 0)));
    }

    #[test]
    fn su41_two_nodes_golden() {
        let d = su(4, 1, &[1, 2]);
        let inv = analyze(&d).unwrap();
        let ds: Vec<Rational> = inv.d();
        assert_eq!(ds, vec![int(2), int(2), int(2)]);
        assert_eq!(inv.c(), vec![int(2), int(2), int(2)]);
        assert_eq!(inv.b(), vec![int(6); 3]);
        assert_eq!(inv.ijk.nonzero_sorted(), vec![((1, 2, 3), int(2))]);
        assert_eq!(inv.selected, vec![Some((1, 2)), Some((0, 2)), Some((0, 1))]);
    }

    #[test]
    fn osp_p2_blocks() {
        let d = CircledDiagram::osp(2, 2).unwrap();
        let ctx = FlagContext::for_diagram(&d).unwrap();
        let dec = ctx.decompose(&d).unwrap();
        let inv = dec.invariants().unwrap();
        assert_eq!(inv.d(), vec![int(0), int(0)]);
        assert_eq!(inv.c(), vec![rat(-3, 2), int(-1)]);
        assert_eq!(inv.b(), vec![int(-4), int(-4)]);
        assert!(inv.ijk.nonzero_sorted().is_empty());
        assert_eq!(inv.selected, vec![Some((0, 1)), Some((0, 0))]);
        let pat = dec.bracket_pattern();
        assert!(pat.contained_in(0, 0, &[Target::K, Target::Block(1)]));
        assert!(pat.contained_in(0, 1, &[Target::Block(0)]));
        assert!(pat.contained_in(1, 1, &[Target::K]));
    }

    #[test]
    fn closed_forms_match_counts() {
        for (m, n) in [(4, 1), (3, 2), (2, 3), (3, 3), (1, 4)] {
            for p in 1..m + n {
                let d = su(m, n, &[p]);
                let cf = closed_forms(&d);
                assert_eq!(cf.d, counted_superdimensions(&d).into_iter().map(int).collect::<Vec<_>>());
                for q in p + 1..m + n {
                    let d = su(m, n, &[p, q]);
                    let cf = closed_forms(&d);
                    let b = &cf.b;
                    assert_eq!(b, &(&cf.c[0] + &cf.c[1] + &cf.c[2]));
                    assert_eq!(cf.d, counted_superdimensions(&d).into_iter().map(int).collect::<Vec<_>>(), "{d}");
                }
            }
        }
        for n in 2..6 {
            for p in 2..=n {
                let d = CircledDiagram::osp(n, p).unwrap();
                let cf = closed_forms(&d);
                assert_eq!(cf.b, int(2) * &cf.c[0] + &cf.c[1]);
                assert_eq!(cf.d, counted_superdimensions(&d).into_iter().map(int).collect::<Vec<_>>(), "{d}");
            }
        }
    }

    #[test]
    fn structure_table_serde_round_trip() {
        let mut t = StructureTable::zeros(3);
        t.set_symmetric(0, 1, 2, rat(5, 2));
        let js = serde_json::to_string(&t).unwrap();
        let back: StructureTable = serde_json::from_str(&js).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<StructureTable>(r#"{"s":2,"nonzero":[{"ijk":[0,1,1],"value":"1"}]}"#).is_err());
    }
}
