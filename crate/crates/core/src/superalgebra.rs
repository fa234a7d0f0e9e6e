//! Matrix models of gl(m|n), sl(m|n), sl(1|1) and osp(2|2n): graded brackets,
//! supertrace, the invariant form Q, the Killing form, star operations and
//! compact real forms.
//!
//! A real form is turned into a [`RealAlgebra`], a table of rational structure
//! constants; everything downstream (flags, curvature) works on that table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sparse_inverse, Expander, Mat, SparseVec};
use crate::roots::{root_system_a, root_system_c, Root, RootSystem};
use crate::scalars::{int, Rational, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Square (m|n)-graded matrix over Q(ζ), stored sparsely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperMatrix {
    m: usize,
    n: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SuperMatrix {
    pub fn zero(m: usize, n: usize) -> Self {
        SuperMatrix { m, n, entries: BTreeMap::new() }
    }

    /// Matrix unit E_ij (0-based).
    pub fn unit(m: usize, n: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zero(m, n);
        x.set(i, j, Scalar::one());
        x
    }

    pub fn identity(m: usize, n: usize) -> Self {
        let mut x = Self::zero(m, n);
        for i in 0..m + n {
            x.set(i, i, Scalar::one());
        }
        x
    }

    pub fn from_entries(m: usize, n: usize, entries: impl IntoIterator<Item = ((usize, usize), Scalar)>) -> Self {
        let mut x = Self::zero(m, n);
        for ((i, j), v) in entries {
            let cur = x.entry(i, j);
            x.set(i, j, cur + v);
        }
        x
    }

    pub fn grading(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn size(&self) -> usize {
        self.m + self.n
    }

    fn index_odd(&self, i: usize) -> bool {
        i >= self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.size() && j < self.size(), "index out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Scalar> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for &(i, j) in self.entries.keys() {
            if self.index_odd(i) == self.index_odd(j) {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    fn part(&self, want_odd: bool) -> SuperMatrix {
        SuperMatrix {
            m: self.m,
            n: self.n,
            entries: self
                .entries
                .iter()
                .filter(|((i, j), _)| (self.index_odd(*i) != self.index_odd(*j)) == want_odd)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn even_part(&self) -> SuperMatrix {
        self.part(false)
    }

    pub fn odd_part(&self) -> SuperMatrix {
        self.part(true)
    }

    fn check_dims(&self, o: &SuperMatrix) -> Result<()> {
        if (self.m, self.n) != (o.m, o.n) {
            return Err(Error::DimensionMismatch(format!("({}|{}) vs ({}|{})", self.m, self.n, o.m, o.n)));
        }
        Ok(())
    }

    pub fn add(&self, o: &SuperMatrix) -> SuperMatrix {
        self.check_dims(o).expect("matching gradings");
        let mut out = self.clone();
        for (&(i, j), v) in &o.entries {
            let cur = out.entry(i, j);
            out.set(i, j, cur + v);
        }
        out
    }

    pub fn sub(&self, o: &SuperMatrix) -> SuperMatrix {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> SuperMatrix {
        if s.is_zero() {
            return Self::zero(self.m, self.n);
        }
        SuperMatrix { m: self.m, n: self.n, entries: self.entries.iter().map(|(k, v)| (*k, v * s)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> SuperMatrix {
        self.scale(&Scalar::from_rational(r.clone()))
    }

    pub fn mul(&self, o: &SuperMatrix) -> SuperMatrix {
        self.check_dims(o).expect("matching gradings");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(k, j), v) in &o.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    *acc.entry((i, j)).or_insert_with(Scalar::zero) += a * b;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        SuperMatrix { m: self.m, n: self.n, entries: acc }
    }

    pub fn supertrace(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (&(i, j), v) in &self.entries {
            if i == j {
                if self.index_odd(i) {
                    s -= v;
                } else {
                    s += v;
                }
            }
        }
        s
    }

    /// Trace of the top-left m×m block.
    pub fn trace_top(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (&(i, j), v) in &self.entries {
            if i == j && !self.index_odd(i) {
                s += v;
            }
        }
        s
    }

    pub fn transpose(&self) -> SuperMatrix {
        SuperMatrix {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|(&(i, j), v)| ((j, i), v.clone())).collect(),
        }
    }

    pub fn conj_transpose(&self) -> SuperMatrix {
        SuperMatrix {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|(&(i, j), v)| ((j, i), v.conjugate())).collect(),
        }
    }

    /// Flattened coordinates for expansion.
    pub fn as_map(&self) -> &BTreeMap<(usize, usize), Scalar> {
        &self.entries
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.entries.iter().map(|((i, j), v)| format!("({})*E{}_{}", v, i + 1, j + 1)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for SuperMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            m: usize,
            n: usize,
            entries: Vec<(usize, usize, &'a Scalar)>,
        }
        Repr { m: self.m, n: self.n, entries: self.entries.iter().map(|(&(i, j), v)| (i, j, v)).collect() }.serialize(s)
    }
}

/// Graded bracket XY − (−1)^{|X||Y|} YX; mixed inputs are split into
/// homogeneous parts and recombined bilinearly.
pub fn graded_bracket(x: &SuperMatrix, y: &SuperMatrix) -> Result<SuperMatrix> {
    x.check_dims(y)?;
    let homog = |a: &SuperMatrix, b: &SuperMatrix, both_odd: bool| {
        let ab = a.mul(b);
        let ba = b.mul(a);
        if both_odd {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    };
    match (x.parity(), y.parity()) {
        (Parity::Mixed, _) | (_, Parity::Mixed) => {
            let (x0, x1, y0, y1) = (x.even_part(), x.odd_part(), y.even_part(), y.odd_part());
            Ok(homog(&x0, &y0, false)
                .add(&homog(&x0, &y1, false))
                .add(&homog(&x1, &y0, false))
                .add(&homog(&x1, &y1, true)))
        }
        (px, py) => Ok(homog(x, y, px == Parity::Odd && py == Parity::Odd)),
    }
}

pub fn supertrace(x: &SuperMatrix) -> Scalar {
    x.supertrace()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    Gl,
    Sl,
    Osp,
    Sl11,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Gl => "gl",
            Family::Sl => "sl",
            Family::Osp => "osp",
            Family::Sl11 => "sl11",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "gl" => Ok(Family::Gl),
            "sl" | "su" => Ok(Family::Sl),
            "osp" => Ok(Family::Osp),
            "sl11" => Ok(Family::Sl11),
            other => Err(Error::UnsupportedAlgebra(format!("unknown family {other:?}"))),
        }
    }
}

/// Which invariant form Q the model carries.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum QForm {
    /// −Str(XY)
    MinusStr,
    /// sl(n|n): C·I ⊕ complement with Q(I,I) = 1, Q(I, complement) = 0, −Str on the complement.
    SlNnSplit,
    /// −Str(XY) on osp(2|2n)
    OspMinusStr,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum StarKind {
    /// X* = conjugate transpose
    Type1A,
    /// X* = D X† D, D = diag(1, −1, 1, …, 1); fixes the Cartan and maps E_α to E_{−α}
    Type1C,
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub matrix: SuperMatrix,
    pub odd: bool,
    /// ε/δ coordinates of the root, `None` for Cartan elements.
    pub root: Option<Vec<i64>>,
    pub label: String,
}

/// A concrete complex matrix Lie superalgebra with Cartan-first basis.
#[derive(Clone, Debug)]
pub struct AlgebraModel {
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub basis: Vec<BasisElement>,
    pub n_cartan: usize,
    pub q_form: QForm,
    pub star_kind: StarKind,
    pub roots: Option<RootSystem>,
    /// Q(E_α, E_{−α}) for each positive root, in root-system order.
    pub root_pairings: Vec<(Vec<i64>, Rational)>,
    expander: Expander<(usize, usize), Scalar>,
}

fn fmt_root(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

impl AlgebraModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_even(&self) -> usize {
        self.basis.iter().filter(|b| !b.odd).count()
    }

    pub fn dim_odd(&self) -> usize {
        self.basis.iter().filter(|b| b.odd).count()
    }

    /// Matrix grading (rows of even | odd type).
    pub fn grading(&self) -> (usize, usize) {
        self.basis[0].matrix.grading()
    }

    pub fn cartan(&self) -> &[BasisElement] {
        &self.basis[..self.n_cartan]
    }

    pub fn root_vector(&self, root: &[i64]) -> Option<&SuperMatrix> {
        self.basis.iter().find(|b| b.root.as_deref() == Some(root)).map(|b| &b.matrix)
    }

    /// Coordinates of X in the model basis, `None` if X is outside the algebra.
    pub fn coords(&self, x: &SuperMatrix) -> Option<BTreeMap<usize, Scalar>> {
        self.expander.coords(x.as_map())
    }

    pub fn contains(&self, x: &SuperMatrix) -> bool {
        self.coords(x).is_some()
    }

    /// The designated form Q.
    pub fn bilinear_q(&self, x: &SuperMatrix, y: &SuperMatrix) -> Scalar {
        let base = -x.mul(y).supertrace();
        match self.q_form {
            QForm::MinusStr | QForm::OspMinusStr => base,
            QForm::SlNnSplit => {
                // φ(X) = tr_top(X)/n is the I-coefficient in the split.
                let n2 = Scalar::from_int((self.n * self.n) as i64);
                base + &(x.trace_top() * y.trace_top()) / &n2
            }
        }
    }

    /// Str_g(ad X ad Y), computed by expanding ad in the model basis.
    pub fn killing_form(&self, x: &SuperMatrix, y: &SuperMatrix) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, e) in self.basis.iter().enumerate() {
            let inner = graded_bracket(y, &e.matrix).expect("same grading");
            let outer = graded_bracket(x, &inner).expect("same grading");
            let c = self.coords(&outer).expect("bracket stays in the algebra");
            if let Some(v) = c.get(&a) {
                if e.odd {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
        }
        acc
    }

    /// The type (1) star operation: anti-linear, involutive, [X,Y]* = [Y*,X*].
    pub fn star(&self, x: &SuperMatrix) -> SuperMatrix {
        let ct = x.conj_transpose();
        match self.star_kind {
            StarKind::Type1A => ct,
            StarKind::Type1C => {
                let sign = |i: usize| if i == 1 { -1 } else { 1 };
                SuperMatrix::from_entries(
                    x.m,
                    x.n,
                    ct.entries.iter().map(|(&(i, j), v)| ((i, j), v.scale(&int(sign(i) * sign(j))))),
                )
            }
        }
    }

    /// ı·H for the Cartan basis, A_α/B_α for even positive roots and
    /// √ı·A_α/√ı·B_α for odd positive roots.
    pub fn compact_real_basis(&self) -> Result<RealFormBasis> {
        let Some(rs) = &self.roots else {
            return Err(Error::UnsupportedAlgebra(format!("{} has no compact real form model", self.family)));
        };
        let i = Scalar::imag();
        let zeta = Scalar::zeta();
        let mut out = RealFormBasis::default();
        for h in self.cartan() {
            out.push(h.matrix.scale(&i), false, format!("i*{}", h.label), None, RealKind::Cartan);
        }
        let pairs = rs.positive_even.iter().chain(&rs.positive_odd);
        for r in pairs {
            let e = self.root_vector(&r.coords).expect("positive root vector");
            let neg: Vec<i64> = r.coords.iter().map(|x| -x).collect();
            let f = self.root_vector(&neg).expect("negative root vector");
            let a = e.sub(f);
            let b = e.add(f).scale(&i);
            let name = fmt_root(&r.coords);
            if r.odd {
                out.push(a.scale(&zeta), true, format!("sqrt(i)*A{name}"), Some(r.clone()), RealKind::A);
                out.push(b.scale(&zeta), true, format!("sqrt(i)*B{name}"), Some(r.clone()), RealKind::B);
            } else {
                out.push(a, false, format!("A{name}"), Some(r.clone()), RealKind::A);
                out.push(b, false, format!("B{name}"), Some(r.clone()), RealKind::B);
            }
        }
        Ok(out)
    }
}

fn push_root_vectors(basis: &mut Vec<BasisElement>, rs: &RootSystem, vec_for: &dyn Fn(&Root) -> SuperMatrix) {
    let groups: [(&[Root], bool); 2] = [(&rs.positive_even, false), (&rs.positive_odd, true)];
    for (roots, odd) in groups {
        for sign in [1i64, -1] {
            for r in roots {
                let rr = if sign == 1 { r.clone() } else { r.negated() };
                basis.push(BasisElement {
                    matrix: vec_for(&rr),
                    odd,
                    root: Some(rr.coords.clone()),
                    label: format!("E{}", fmt_root(&rr.coords)),
                });
            }
        }
    }
}

fn finalize(mut model: AlgebraModel) -> AlgebraModel {
    let mut ex = Expander::new();
    for b in &model.basis {
        assert!(ex.push(b.matrix.as_map()), "basis is linearly independent");
    }
    model.expander = ex;
    if let Some(rs) = model.roots.clone() {
        model.root_pairings = rs
            .positive()
            .map(|r| {
                let neg: Vec<i64> = r.coords.iter().map(|x| -x).collect();
                let q = model.bilinear_q(
                    model.root_vector(&r.coords).expect("root vector"),
                    model.root_vector(&neg).expect("root vector"),
                );
                (r.coords.clone(), q.as_rational().expect("rational root pairing"))
            })
            .collect();
    }
    model
}

fn build_type_a(family: Family, m: usize, n: usize) -> Result<AlgebraModel> {
    let rs = root_system_a(m, n)?;
    let d = m + n;
    let mut basis = Vec::new();
    let diag = |pairs: &[(usize, i64)]| {
        SuperMatrix::from_entries(m, n, pairs.iter().map(|&(i, c)| ((i, i), Scalar::from_int(c))))
    };
    let q_form = match family {
        Family::Gl => {
            for i in 0..d {
                basis.push(BasisElement {
                    matrix: diag(&[(i, 1)]),
                    odd: false,
                    root: None,
                    label: format!("E{}{}", i + 1, i + 1),
                });
            }
            QForm::MinusStr
        }
        _ => {
            let split = m == n;
            if split {
                basis.push(BasisElement {
                    matrix: SuperMatrix::identity(m, n),
                    odd: false,
                    root: None,
                    label: "I".into(),
                });
            }
            for k in 1..d {
                if split && k == m {
                    continue;
                }
                let sign = if k == m { 1 } else { -1 };
                basis.push(BasisElement {
                    matrix: diag(&[(k - 1, 1), (k, sign)]),
                    odd: false,
                    root: None,
                    label: format!("h{k}"),
                });
            }
            if split {
                QForm::SlNnSplit
            } else {
                QForm::MinusStr
            }
        }
    };
    let n_cartan = basis.len();
    let unit_for = |r: &Root| {
        let i = r.coords.iter().position(|&c| c == 1).expect("type A root");
        let j = r.coords.iter().position(|&c| c == -1).expect("type A root");
        SuperMatrix::unit(m, n, i, j)
    };
    push_root_vectors(&mut basis, &rs, &unit_for);
    Ok(finalize(AlgebraModel {
        family,
        m,
        n,
        basis,
        n_cartan,
        q_form,
        star_kind: StarKind::Type1A,
        roots: Some(rs),
        root_pairings: Vec::new(),
        expander: Expander::new(),
    }))
}

/// Weight of row index i in the osp(2|2n) matrix model, over (ε, δ₁..δ_n).
fn osp_index_weight(n: usize, i: usize) -> Vec<i64> {
    let mut w = vec![0i64; 1 + n];
    match i {
        0 => w[0] = 1,
        1 => w[0] = -1,
        _ if i < 2 + n => w[1 + (i - 2)] = 1,
        _ => w[1 + (i - 2 - n)] = -1,
    }
    w
}

/// ω = [[0,1],[1,0]] ⊕ [[0,I_n],[−I_n,0]].
fn osp_form(n: usize) -> Vec<((usize, usize), i64)> {
    let mut w = vec![((0, 1), 1), ((1, 0), 1)];
    for j in 0..n {
        w.push(((2 + j, 2 + n + j), 1));
        w.push(((2 + n + j, 2 + j), -1));
    }
    w
}

/// Left-hand side of the osp membership condition for a homogeneous X:
/// (Xᵀω)_ab + (−1)^{|X||a|} (ωX)_ab, which vanishes exactly on osp(2|2n).
pub fn osp_condition(n: usize, x: &SuperMatrix) -> SuperMatrix {
    let omega = SuperMatrix::from_entries(2, 2 * n, osp_form(n).into_iter().map(|(k, v)| (k, Scalar::from_int(v))));
    let odd = x.parity() == Parity::Odd;
    let left = x.transpose().mul(&omega);
    let right = omega.mul(x);
    let mut out = left;
    for (&(a, b), v) in right.entries() {
        let sign = if odd && a >= 2 { -1 } else { 1 };
        let cur = out.entry(a, b);
        out.set(a, b, cur + v.scale(&int(sign)));
    }
    out
}

fn build_osp(n: usize) -> Result<AlgebraModel> {
    if n < 1 {
        return Err(Error::UnsupportedAlgebra("osp(2|2n) needs n >= 1".into()));
    }
    let rs = root_system_c(n)?;
    let size = 2 + 2 * n;
    let (gm, gn) = (2, 2 * n);
    let mut basis = vec![BasisElement {
        matrix: SuperMatrix::from_entries(gm, gn, [((0, 0), Scalar::one()), ((1, 1), -Scalar::one())]),
        odd: false,
        root: None,
        label: "h1".into(),
    }];
    for j in 0..n {
        basis.push(BasisElement {
            matrix: SuperMatrix::from_entries(
                gm,
                gn,
                [((2 + j, 2 + j), Scalar::one()), ((2 + n + j, 2 + n + j), -Scalar::one())],
            ),
            odd: false,
            root: None,
            label: format!("f{}", j + 1),
        });
    }
    let n_cartan = basis.len();
    let d_sign = |i: usize| if i == 1 { -1 } else { 1 };
    let positive_vector = |r: &Root| -> SuperMatrix {
        let cells: Vec<(usize, usize)> = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let wi = osp_index_weight(n, i);
                let wj = osp_index_weight(n, j);
                i != j && wi.iter().zip(&wj).map(|(a, b)| a - b).eq(r.coords.iter().copied())
            })
            .collect();
        // Linear map coefficients → condition entries; its kernel is the root space.
        let probes: Vec<SuperMatrix> =
            cells.iter().map(|&(i, j)| osp_condition(n, &SuperMatrix::unit(gm, gn, i, j))).collect();
        let keys: Vec<(usize, usize)> = {
            let mut ks: Vec<(usize, usize)> = probes.iter().flat_map(|p| p.entries().keys().copied()).collect();
            ks.sort_unstable();
            ks.dedup();
            ks
        };
        let mut mat = Mat::<Rational>::zeros(keys.len().max(1), cells.len());
        for (c, p) in probes.iter().enumerate() {
            for (r_idx, k) in keys.iter().enumerate() {
                mat.set(r_idx, c, p.entry(k.0, k.1).as_rational().expect("integral condition"));
            }
        }
        let ker = mat.kernel();
        assert_eq!(ker.len(), 1, "osp root spaces are one-dimensional");
        let mut v = ker.into_iter().next().expect("one kernel vector");
        let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero").clone();
        for x in v.iter_mut() {
            *x = &*x / &lead;
        }
        SuperMatrix::from_entries(gm, gn, cells.iter().zip(v).map(|(&k, x)| (k, Scalar::from_rational(x))))
    };
    let vec_for = |r: &Root| -> SuperMatrix {
        let positive = r.simple_coeffs.iter().all(|&c| c >= 0);
        if positive {
            positive_vector(r)
        } else {
            // E_{−α} := star(E_α) = D E_α† D; entries are rational so † is a transpose.
            let e = positive_vector(&r.negated());
            SuperMatrix::from_entries(
                gm,
                gn,
                e.entries().iter().map(|(&(i, j), v)| ((j, i), v.scale(&int(d_sign(i) * d_sign(j))))),
            )
        }
    };
    push_root_vectors(&mut basis, &rs, &vec_for);
    Ok(finalize(AlgebraModel {
        family: Family::Osp,
        m: 2,
        n,
        basis,
        n_cartan,
        q_form: QForm::OspMinusStr,
        star_kind: StarKind::Type1C,
        roots: Some(rs),
        root_pairings: Vec::new(),
        expander: Expander::new(),
    }))
}

fn build_sl11() -> AlgebraModel {
    let basis = vec![
        BasisElement { matrix: SuperMatrix::identity(1, 1), odd: false, root: None, label: "X1".into() },
        BasisElement { matrix: SuperMatrix::unit(1, 1, 0, 1), odd: true, root: None, label: "X2".into() },
        BasisElement { matrix: SuperMatrix::unit(1, 1, 1, 0), odd: true, root: None, label: "X3".into() },
    ];
    finalize(AlgebraModel {
        family: Family::Sl11,
        m: 1,
        n: 1,
        basis,
        n_cartan: 1,
        q_form: QForm::MinusStr,
        star_kind: StarKind::Type1A,
        roots: None,
        root_pairings: Vec::new(),
        expander: Expander::new(),
    })
}

/// Builds a model. For `Osp` the parameter `m` must be 2 and `n` is the rank of sp(2n).
pub fn build_algebra(family: Family, m: usize, n: usize) -> Result<AlgebraModel> {
    match family {
        Family::Sl11 => Ok(build_sl11()),
        Family::Gl => {
            if m + n < 1 {
                return Err(Error::UnsupportedAlgebra("gl(0|0)".into()));
            }
            build_type_a(family, m, n)
        }
        Family::Sl => {
            if m + n < 2 {
                return Err(Error::UnsupportedAlgebra(format!("sl({m}|{n}) needs m+n >= 2")));
            }
            if m == n && m < 3 {
                return Err(Error::UnsupportedAlgebra(format!("sl({m}|{n}) with m = n needs m >= 3")));
            }
            build_type_a(family, m, n)
        }
        Family::Osp => {
            if m != 2 || n < 2 {
                return Err(Error::UnsupportedAlgebra(format!("osp({m}|2*{n}) needs m = 2 and n >= 2")));
            }
            build_osp(n)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RealKind {
    Cartan,
    A,
    B,
}

/// An ordered real basis of a real form, with labels.
#[derive(Clone, Debug, Default)]
pub struct RealFormBasis {
    pub elements: Vec<SuperMatrix>,
    pub odd: Vec<bool>,
    pub labels: Vec<String>,
    /// The positive root behind A_α/B_α elements.
    pub roots: Vec<Option<Root>>,
    pub kinds: Vec<RealKind>,
}

impl RealFormBasis {
    fn push(&mut self, x: SuperMatrix, odd: bool, label: String, root: Option<Root>, kind: RealKind) {
        self.elements.push(x);
        self.odd.push(odd);
        self.labels.push(label);
        self.roots.push(root);
        self.kinds.push(kind);
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// A real Lie superalgebra given by rational structure constants in a fixed
/// homogeneous basis, together with the rational Gram matrix of Q.
#[derive(Clone, Debug)]
pub struct RealAlgebra {
    pub odd: Vec<bool>,
    pub labels: Vec<String>,
    pub roots: Vec<Option<Root>>,
    pub kinds: Vec<RealKind>,
    /// brackets[a][b] = [e_a, e_b]
    brackets: Vec<Vec<SparseVec>>,
    gram: Vec<SparseVec>,
}

impl RealAlgebra {
    /// Computes structure constants of the real span of `basis` inside `model`.
    /// Fails with `NonRational` if a bracket leaves the rational span.
    pub fn from_basis(model: &AlgebraModel, basis: &RealFormBasis) -> Result<RealAlgebra> {
        let mut ex: Expander<(usize, usize), Scalar> = Expander::new();
        for x in &basis.elements {
            if !ex.push(x.as_map()) {
                return Err(Error::Invariant("real basis is linearly dependent".into()));
            }
        }
        let dim = basis.len();
        let mut brackets = vec![vec![SparseVec::new(); dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let br = graded_bracket(&basis.elements[a], &basis.elements[b])?;
                let coords = ex.coords(br.as_map()).ok_or_else(|| {
                    Error::Invariant(format!("[{}, {}] leaves the span", basis.labels[a], basis.labels[b]))
                })?;
                let mut v = SparseVec::new();
                for (k, s) in coords {
                    v.add_at(k, &s.as_rational()?);
                }
                let sign = if basis.odd[a] && basis.odd[b] { int(1) } else { int(-1) };
                brackets[b][a] = v.scaled(&sign);
                brackets[a][b] = v;
            }
        }
        let mut gram = vec![SparseVec::new(); dim];
        for a in 0..dim {
            for b in 0..dim {
                if basis.odd[a] != basis.odd[b] {
                    continue;
                }
                let q = model.bilinear_q(&basis.elements[a], &basis.elements[b]).as_rational()?;
                gram[a].add_at(b, &q);
            }
        }
        Ok(RealAlgebra {
            odd: basis.odd.clone(),
            labels: basis.labels.clone(),
            roots: basis.roots.clone(),
            kinds: basis.kinds.clone(),
            brackets,
            gram,
        })
    }

    /// The compact real form of a model.
    pub fn compact(model: &AlgebraModel) -> Result<RealAlgebra> {
        let basis = model.compact_real_basis()?;
        Self::from_basis(model, &basis)
    }

    /// sl(1|1) on X₁ = I, X₂ = E₁₂, X₃ = E₂₁ with [X₂,X₃] = X₁.
    pub fn sl11() -> RealAlgebra {
        let model = build_sl11();
        let basis = RealFormBasis {
            elements: model.basis.iter().map(|b| b.matrix.clone()).collect(),
            odd: model.basis.iter().map(|b| b.odd).collect(),
            labels: model.basis.iter().map(|b| b.label.clone()).collect(),
            roots: vec![None; 3],
            kinds: vec![RealKind::Cartan; 3],
        };
        Self::from_basis(&model, &basis).expect("sl(1|1) has integral structure constants")
    }

    pub fn dim(&self) -> usize {
        self.odd.len()
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &SparseVec {
        &self.brackets[a][b]
    }

    pub fn bracket(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, x) in u.iter() {
            for (b, y) in v.iter() {
                out.axpy(&(x * y), &self.brackets[a][b]);
            }
        }
        out
    }

    /// [e_a, v]
    pub fn ad_basis(&self, a: usize, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (b, y) in v.iter() {
            out.axpy(y, &self.brackets[a][b]);
        }
        out
    }

    pub fn q_basis(&self, a: usize, b: usize) -> Rational {
        self.gram[a].get(b)
    }

    pub fn gram_row(&self, a: usize) -> &SparseVec {
        &self.gram[a]
    }

    pub fn q(&self, u: &SparseVec, v: &SparseVec) -> Rational {
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

    /// Parity of a vector (zero counts as even).
    pub fn parity(&self, v: &SparseVec) -> Parity {
        let (mut e, mut o) = (false, false);
        for a in v.support() {
            if self.odd[a] {
                o = true;
            } else {
                e = true;
            }
        }
        match (e, o) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    /// Killing form Str(ad X ad Y).
    pub fn killing(&self, u: &SparseVec, v: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for a in 0..self.dim() {
            let inner = self.ad_on_basis(v, a);
            let outer = self.bracket(u, &inner);
            let c = outer.get(a);
            if self.odd[a] {
                acc -= c;
            } else {
                acc += c;
            }
        }
        acc
    }

    /// [v, e_a]
    fn ad_on_basis(&self, v: &SparseVec, a: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (b, y) in v.iter() {
            out.axpy(y, &self.brackets[b][a]);
        }
        out
    }

    /// Right Q-duals of the basis elements in `subset`, assuming the span of
    /// `subset` is Q-non-degenerate and Q-orthogonal to its complement
    /// within the pairs used. Returns sparse vectors over the global basis.
    pub fn q_duals(&self, subset: &[usize]) -> Result<Vec<SparseVec>> {
        let local: BTreeMap<usize, usize> = subset.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let rows: Vec<SparseVec> = subset.iter().map(|&a| self.gram[a].reindex(|b| local.get(&b).copied())).collect();
        let inv = sparse_inverse(&rows).ok_or_else(|| Error::DegenerateForm("Q restricted to subset".into()))?;
        // ē_b = Σ_c (G⁻¹)_{cb} e_c
        let mut duals = vec![SparseVec::new(); subset.len()];
        for (c, row) in inv.iter().enumerate() {
            for (b, v) in row.iter() {
                duals[b].add_at(subset[c], v);
            }
        }
        Ok(duals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn e(m: usize, n: usize, i: usize, j: usize) -> SuperMatrix {
        SuperMatrix::unit(m, n, i - 1, j - 1)
    }

    #[test]
    fn gl11_bracket_of_odd_units() {
        let br = graded_bracket(&e(1, 1, 1, 2), &e(1, 1, 2, 1)).unwrap();
        assert_eq!(br, SuperMatrix::identity(1, 1));
        let x = e(2, 1, 1, 2);
        assert!(graded_bracket(&x, &x).unwrap().is_zero());
        assert!(matches!(graded_bracket(&x, &e(1, 1, 1, 1)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn supertrace_examples() {
        assert_eq!(SuperMatrix::identity(3, 2).supertrace(), Scalar::from_int(1));
        assert_eq!(e(1, 1, 1, 1).supertrace(), Scalar::from_int(1));
        assert_eq!(e(1, 1, 2, 2).supertrace(), Scalar::from_int(-1));
    }

    #[test]
    fn sl11_relations() {
        let a = build_algebra(Family::Sl11, 0, 0).unwrap();
        assert_eq!(a.dim(), 3);
        let x = |k: usize| &a.basis[k].matrix;
        assert_eq!(graded_bracket(x(1), x(2)).unwrap(), x(0).clone());
        for k in 0..3 {
            assert!(graded_bracket(x(0), x(k)).unwrap().is_zero());
        }
    }

    #[test]
    fn sl32_dimensions_and_roots() {
        let a = build_algebra(Family::Sl, 3, 2).unwrap();
        assert_eq!(a.dim(), 24);
        let rs = a.roots.as_ref().unwrap();
        assert_eq!(rs.positive_even.len(), 4);
        assert_eq!(rs.positive_odd.len(), 6);
        assert_eq!(a.dim_even(), 12);
        assert_eq!(a.dim_odd(), 12);
    }

    #[test]
    fn osp24_dimensions() {
        let a = build_algebra(Family::Osp, 2, 2).unwrap();
        assert_eq!(a.dim_even(), 11);
        assert_eq!(a.dim_odd(), 8);
        for b in &a.basis {
            assert!(osp_condition(2, &b.matrix).is_zero(), "{} not in osp", b.label);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(build_algebra(Family::Sl, 2, 2).is_err());
        assert!(build_algebra(Family::Sl, 1, 0).is_err());
        assert!(build_algebra(Family::Osp, 2, 1).is_err());
        assert!(build_algebra(Family::Osp, 3, 2).is_err());
        assert!("so".parse::<Family>().is_err());
    }

    #[test]
    fn q_and_killing_examples() {
        let a = build_algebra(Family::Sl, 2, 1).unwrap();
        let x = e(2, 1, 1, 2);
        let y = e(2, 1, 2, 1);
        assert_eq!(a.bilinear_q(&x, &y), Scalar::from_int(-1));
        assert_eq!(a.killing_form(&x, &y), Scalar::from_int(2));
        let nn = build_algebra(Family::Sl, 3, 3).unwrap();
        let id = SuperMatrix::identity(3, 3);
        assert_eq!(nn.bilinear_q(&id, &id), Scalar::one());
        for b in nn.basis.iter().skip(1) {
            assert!(nn.bilinear_q(&id, &b.matrix).is_zero(), "{}", b.label);
        }
    }

    #[test]
    fn star_examples() {
        let a = build_algebra(Family::Sl, 2, 1).unwrap();
        assert_eq!(a.star(&e(2, 1, 1, 2)), e(2, 1, 2, 1));
        let ix = e(2, 1, 1, 2).scale(&Scalar::imag());
        assert_eq!(a.star(&ix), e(2, 1, 2, 1).scale(&-Scalar::imag()));
    }

    #[test]
    fn osp_star_pairs_root_vectors_and_fixes_cartan() {
        let a = build_algebra(Family::Osp, 2, 3).unwrap();
        for b in &a.basis {
            let s = a.star(&b.matrix);
            assert!(a.contains(&s));
            match &b.root {
                None => assert_eq!(s, b.matrix),
                Some(r) => {
                    let neg: Vec<i64> = r.iter().map(|x| -x).collect();
                    assert_eq!(&s, a.root_vector(&neg).unwrap(), "{}", b.label);
                }
            }
        }
        for (_, q) in &a.root_pairings {
            assert!(!q.is_zero());
        }
    }

    #[test]
    fn su21_compact_basis() {
        let a = build_algebra(Family::Sl, 2, 1).unwrap();
        let rb = a.compact_real_basis().unwrap();
        assert_eq!(rb.len(), 8);
        assert_eq!(rb.odd.iter().filter(|&&o| !o).count(), 4);
        let real = RealAlgebra::from_basis(&a, &rb).unwrap();
        assert_eq!(real.dim(), 8);
        let _ = rat(1, 2);
    }
}
