//! Quadratic sets `(X, r)` with `r(x, y) = (ˣy, xʸ)` and their pointwise axioms.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{default_labels, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QsetError {
    #[error("row {row} has degree {got}, expected {expected}")]
    RaggedRows { row: usize, got: usize, expected: usize },
    #[error("table size {got} does not match n*n = {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("table entry {value} at ({x}, {y}) out of range for n = {n}")]
    EntryOutOfRange { x: usize, y: usize, value: usize, n: usize },
    #[error("element {0} out of range")]
    IndexOutOfRange(usize),
    #[error("translation of element {0} is not a bijection")]
    NotBijective(usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { got: usize, expected: usize },
    #[error("empty element set")]
    Empty,
    #[error("subset is not r-invariant")]
    NotInvariant,
    #[error("parts do not form a disjoint cover of X")]
    NotAPartition,
}

/// Finite quadratic set. `left[x*n+y] = ˣy`, `right[x*n+y] = xʸ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSet {
    n: usize,
    left: Vec<usize>,
    right: Vec<usize>,
    labels: Option<Vec<String>>,
    lri_derived: bool,
}

impl QuadraticSet {
    /// `ˣy = rows[x](y)` and `xʸ = rows[y]⁻¹(x)`.
    pub fn from_left_action(rows: &[Permutation]) -> Result<Self, QsetError> {
        let n = rows.len();
        if n == 0 {
            return Err(QsetError::Empty);
        }
        for (row, p) in rows.iter().enumerate() {
            if p.degree() != n {
                return Err(QsetError::RaggedRows { row, got: p.degree(), expected: n });
            }
        }
        let inverses: Vec<Permutation> = rows.iter().map(Permutation::inverse).collect();
        let mut left = vec![0; n * n];
        let mut right = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                left[x * n + y] = rows[x].apply(y);
                right[x * n + y] = inverses[y].apply(x);
            }
        }
        Ok(QuadraticSet { n, left, right, labels: None, lri_derived: true })
    }

    /// Left action given by `rows`, right action forced by involutivity:
    /// `xʸ = ℒ_{ˣy}⁻¹(x)`. The result is involutive but need not satisfy lri.
    pub fn from_left_action_involutive(rows: &[Permutation]) -> Result<Self, QsetError> {
        let n = rows.len();
        if n == 0 {
            return Err(QsetError::Empty);
        }
        for (row, p) in rows.iter().enumerate() {
            if p.degree() != n {
                return Err(QsetError::RaggedRows { row, got: p.degree(), expected: n });
            }
        }
        let inverses: Vec<Permutation> = rows.iter().map(Permutation::inverse).collect();
        let mut left = vec![0; n * n];
        let mut right = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let u = rows[x].apply(y);
                left[x * n + y] = u;
                right[x * n + y] = inverses[u].apply(x);
            }
        }
        Ok(QuadraticSet { n, left, right, labels: None, lri_derived: false })
    }

    /// Arbitrary tables in row-major order.
    pub fn from_tables(n: usize, left: Vec<usize>, right: Vec<usize>) -> Result<Self, QsetError> {
        if n == 0 {
            return Err(QsetError::Empty);
        }
        for t in [&left, &right] {
            if t.len() != n * n {
                return Err(QsetError::TableSize { got: t.len(), expected: n * n });
            }
            if let Some(i) = t.iter().position(|&v| v >= n) {
                return Err(QsetError::EntryOutOfRange { x: i / n, y: i % n, value: t[i], n });
            }
        }
        Ok(QuadraticSet { n, left, right, labels: None, lri_derived: false })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, QsetError> {
        if labels.len() != self.n {
            return Err(QsetError::LabelCount { got: labels.len(), expected: self.n });
        }
        self.labels = if labels == default_labels(self.n) { None } else { Some(labels) };
        Ok(self)
    }

    pub(crate) fn set_lri_derived(mut self, flag: bool) -> Self {
        self.lri_derived = flag;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ˣy`
    #[inline]
    pub fn left(&self, x: usize, y: usize) -> usize {
        self.left[x * self.n + y]
    }

    /// `xʸ`
    #[inline]
    pub fn right(&self, x: usize, y: usize) -> usize {
        self.right[x * self.n + y]
    }

    #[inline]
    pub fn r(&self, x: usize, y: usize) -> (usize, usize) {
        (self.left(x, y), self.right(x, y))
    }

    pub fn left_table(&self) -> &[usize] {
        &self.left
    }

    pub fn right_table(&self) -> &[usize] {
        &self.right
    }

    /// The images of `ℒ_x`.
    pub fn left_row(&self, x: usize) -> &[usize] {
        &self.left[x * self.n..(x + 1) * self.n]
    }

    pub fn lri_derived(&self) -> bool {
        self.lri_derived
    }

    pub fn has_custom_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn labels(&self) -> Vec<String> {
        self.labels.clone().unwrap_or_else(|| default_labels(self.n))
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("x{}", i + 1),
        }
    }

    pub fn left_perm(&self, x: usize) -> Result<Permutation, QsetError> {
        if x >= self.n {
            return Err(QsetError::IndexOutOfRange(x));
        }
        Permutation::from_images(self.left_row(x).to_vec()).map_err(|_| QsetError::NotBijective(x))
    }

    /// `ℛ_x : y ↦ yˣ`.
    pub fn right_perm(&self, x: usize) -> Result<Permutation, QsetError> {
        if x >= self.n {
            return Err(QsetError::IndexOutOfRange(x));
        }
        let images = (0..self.n).map(|y| self.right(y, x)).collect();
        Permutation::from_images(images).map_err(|_| QsetError::NotBijective(x))
    }

    pub fn left_perms(&self) -> Result<Vec<Permutation>, QsetError> {
        (0..self.n).map(|x| self.left_perm(x)).collect()
    }

    /// True when the right table is the row-inverse of the left table.
    pub fn right_is_lri_of_left(&self) -> bool {
        let n = self.n;
        (0..n).all(|y| (0..n).all(|x| self.left(y, self.right(x, y)) == x))
            && self.left_perms().is_ok()
    }

    fn check_subset(&self, ys: &[usize]) -> Result<Vec<bool>, QsetError> {
        let mut mask = vec![false; self.n];
        for &y in ys {
            if y >= self.n {
                return Err(QsetError::IndexOutOfRange(y));
            }
            mask[y] = true;
        }
        Ok(mask)
    }

    /// `r(Y×Y) ⊆ Y×Y`.
    pub fn is_r_invariant(&self, ys: &[usize]) -> Result<bool, QsetError> {
        let mask = self.check_subset(ys)?;
        Ok(ys.iter().all(|&a| {
            ys.iter().all(|&b| {
                let (u, v) = self.r(a, b);
                mask[u] && mask[v]
            })
        }))
    }

    /// `ℒ_x(Y) ⊆ Y` for every `x ∈ X`.
    pub fn is_g_invariant(&self, ys: &[usize]) -> Result<bool, QsetError> {
        let mask = self.check_subset(ys)?;
        Ok((0..self.n).all(|x| ys.iter().all(|&y| mask[self.left(x, y)])))
    }

    /// Restriction to an r-invariant subset, relabelled by increasing index.
    pub fn restrict(&self, ys: &[usize]) -> Result<QuadraticSet, QsetError> {
        let mut sorted = ys.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(QsetError::Empty);
        }
        if !self.is_r_invariant(&sorted)? {
            return Err(QsetError::NotInvariant);
        }
        let mut pos = vec![usize::MAX; self.n];
        for (i, &y) in sorted.iter().enumerate() {
            pos[y] = i;
        }
        let m = sorted.len();
        let mut left = Vec::with_capacity(m * m);
        let mut right = Vec::with_capacity(m * m);
        for &a in &sorted {
            for &b in &sorted {
                left.push(pos[self.left(a, b)]);
                right.push(pos[self.right(a, b)]);
            }
        }
        let labels = self.labels.as_ref().map(|l| sorted.iter().map(|&i| l[i].clone()).collect());
        Ok(QuadraticSet { n: m, left, right, labels, lri_derived: self.lri_derived })
    }

    /// Applies a relabelling `x ↦ perm(x)`.
    pub fn relabel(&self, perm: &Permutation) -> QuadraticSet {
        let n = self.n;
        let inv = perm.inverse();
        let mut left = vec![0; n * n];
        let mut right = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let (a, b) = (inv.apply(x), inv.apply(y));
                left[x * n + y] = perm.apply(self.left(a, b));
                right[x * n + y] = perm.apply(self.right(a, b));
            }
        }
        QuadraticSet { n, left, right, labels: None, lri_derived: self.lri_derived }
    }
}

impl fmt::Display for QuadraticSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels();
        for x in 0..self.n {
            let row = match self.left_perm(x) {
                Ok(p) => p.format_cycles_with(&labels),
                Err(_) => format!("{:?}", self.left_row(x)),
            };
            writeln!(f, "L_{} = {}", labels[x], row)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Nondegenerate,
    Involutive,
    Braided,
    L1,
    R1,
    Lr3,
    SquareFree,
    Lri,
    CyclicCl1,
    CyclicCl2,
    CyclicCr1,
    CyclicCr2,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::Nondegenerate,
        Property::Involutive,
        Property::Braided,
        Property::L1,
        Property::R1,
        Property::Lr3,
        Property::SquareFree,
        Property::Lri,
        Property::CyclicCl1,
        Property::CyclicCl2,
        Property::CyclicCr1,
        Property::CyclicCr2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Nondegenerate => "nondegenerate",
            Property::Involutive => "involutive",
            Property::Braided => "braided",
            Property::L1 => "l1",
            Property::R1 => "r1",
            Property::Lr3 => "lr3",
            Property::SquareFree => "square_free",
            Property::Lri => "lri",
            Property::CyclicCl1 => "cyclic_cl1",
            Property::CyclicCl2 => "cyclic_cl2",
            Property::CyclicCr1 => "cyclic_cr1",
            Property::CyclicCr2 => "cyclic_cr2",
        }
    }
}

/// Verdicts of [`classify`]. A failed property has its least counterexample tuple in `witnesses`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFlags {
    pub nondegenerate: bool,
    pub involutive: bool,
    pub braided: bool,
    pub l1: bool,
    pub r1: bool,
    pub lr3: bool,
    pub square_free: bool,
    pub lri: bool,
    pub cyclic_cl1: bool,
    pub cyclic_cl2: bool,
    pub cyclic_cr1: bool,
    pub cyclic_cr2: bool,
    pub witnesses: BTreeMap<Property, Vec<usize>>,
}

impl PropertyFlags {
    pub fn get(&self, p: Property) -> bool {
        match p {
            Property::Nondegenerate => self.nondegenerate,
            Property::Involutive => self.involutive,
            Property::Braided => self.braided,
            Property::L1 => self.l1,
            Property::R1 => self.r1,
            Property::Lr3 => self.lr3,
            Property::SquareFree => self.square_free,
            Property::Lri => self.lri,
            Property::CyclicCl1 => self.cyclic_cl1,
            Property::CyclicCl2 => self.cyclic_cl2,
            Property::CyclicCr1 => self.cyclic_cr1,
            Property::CyclicCr2 => self.cyclic_cr2,
        }
    }

    pub fn is_symmetric_set(&self) -> bool {
        self.nondegenerate && self.involutive && self.braided
    }

    pub fn is_square_free_solution(&self) -> bool {
        self.is_symmetric_set() && self.square_free
    }

    pub fn cyclic(&self) -> bool {
        self.cyclic_cl1 && self.cyclic_cl2 && self.cyclic_cr1 && self.cyclic_cr2
    }
}

/// Least `x` (in parallel, deterministic) for which `fails(x)` returns a witness.
fn least_failure<F>(n: usize, fails: F) -> Option<Vec<usize>>
where
    F: Fn(usize) -> Option<Vec<usize>> + Sync + Send,
{
    (0..n).into_par_iter().find_map_first(fails)
}

fn failing_pair<F>(n: usize, ok: F) -> Option<Vec<usize>>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    least_failure(n, |x| (0..n).find(|&y| !ok(x, y)).map(|y| vec![x, y]))
}

fn failing_triple<F>(n: usize, ok: F) -> Option<Vec<usize>>
where
    F: Fn(usize, usize, usize) -> bool + Sync,
{
    least_failure(n, |x| {
        (0..n).find_map(|y| (0..n).find(|&z| !ok(x, y, z)).map(|z| vec![x, y, z]))
    })
}

fn is_bijection(images: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in images {
        if std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    true
}

fn witness_nondegenerate(q: &QuadraticSet) -> Option<Vec<usize>> {
    let n = q.n;
    (0..n)
        .find(|&x| !is_bijection(q.left_row(x).iter().copied(), n) || !is_bijection((0..n).map(|y| q.right(y, x)), n))
        .map(|x| vec![x])
}

fn witness_involutive(q: &QuadraticSet) -> Option<Vec<usize>> {
    failing_pair(q.n, |x, y| {
        let (u, v) = q.r(x, y);
        q.r(u, v) == (x, y)
    })
}

fn braid_sides(q: &QuadraticSet, x: usize, y: usize, z: usize) -> ([usize; 3], [usize; 3]) {
    // r12 r23 r12
    let (a, b) = q.r(x, y);
    let (b, c) = q.r(b, z);
    let (a, b) = q.r(a, b);
    let lhs = [a, b, c];
    // r23 r12 r23
    let (b2, c2) = q.r(y, z);
    let (a2, b2) = q.r(x, b2);
    let (b2, c2) = q.r(b2, c2);
    (lhs, [a2, b2, c2])
}

fn witness_braided(q: &QuadraticSet) -> Option<Vec<usize>> {
    failing_triple(q.n, |x, y, z| {
        let (l, r) = braid_sides(q, x, y, z);
        l == r
    })
}

fn l1_holds(q: &QuadraticSet, x: usize, y: usize, z: usize) -> bool {
    q.left(x, q.left(y, z)) == q.left(q.left(x, y), q.left(q.right(x, y), z))
}

fn r1_holds(q: &QuadraticSet, x: usize, y: usize, z: usize) -> bool {
    q.right(q.right(x, y), z) == q.right(q.right(x, q.left(y, z)), q.right(y, z))
}

fn lr3_holds(q: &QuadraticSet, x: usize, y: usize, z: usize) -> bool {
    q.right(q.left(x, y), q.left(q.right(x, y), z)) == q.left(q.right(x, q.left(y, z)), q.right(y, z))
}

fn witness_square_free(q: &QuadraticSet) -> Option<Vec<usize>> {
    (0..q.n).find(|&x| q.r(x, x) != (x, x)).map(|x| vec![x])
}

fn witness_lri(q: &QuadraticSet) -> Option<Vec<usize>> {
    failing_pair(q.n, |x, y| q.right(q.left(x, y), x) == y && q.left(x, q.right(y, x)) == y)
}

/// Exhaustive check of every flag. The n = 1 set passes everything.
pub fn classify(q: &QuadraticSet) -> PropertyFlags {
    let n = q.n;
    let mut witnesses = BTreeMap::new();
    let mut record = |p: Property, w: Option<Vec<usize>>| -> bool {
        match w {
            Some(w) => {
                witnesses.insert(p, w);
                false
            }
            None => true,
        }
    };
    let nondegenerate = record(Property::Nondegenerate, witness_nondegenerate(q));
    let involutive = record(Property::Involutive, witness_involutive(q));
    let braided = record(Property::Braided, witness_braided(q));
    let l1 = record(Property::L1, failing_triple(n, |x, y, z| l1_holds(q, x, y, z)));
    let r1 = record(Property::R1, failing_triple(n, |x, y, z| r1_holds(q, x, y, z)));
    let lr3 = record(Property::Lr3, failing_triple(n, |x, y, z| lr3_holds(q, x, y, z)));
    let square_free = record(Property::SquareFree, witness_square_free(q));
    let lri = record(Property::Lri, witness_lri(q));
    let cyclic_cl1 = record(Property::CyclicCl1, failing_pair(n, |x, y| q.left(q.right(y, x), x) == q.left(y, x)));
    let cyclic_cl2 = record(Property::CyclicCl2, failing_pair(n, |x, y| q.left(q.left(x, y), x) == q.left(y, x)));
    let cyclic_cr1 = record(Property::CyclicCr1, failing_pair(n, |x, y| q.right(x, q.left(x, y)) == q.right(x, y)));
    let cyclic_cr2 = record(Property::CyclicCr2, failing_pair(n, |x, y| q.right(x, q.right(y, x)) == q.right(x, y)));
    let flags = PropertyFlags {
        nondegenerate,
        involutive,
        braided,
        l1,
        r1,
        lr3,
        square_free,
        lri,
        cyclic_cl1,
        cyclic_cl2,
        cyclic_cr1,
        cyclic_cr2,
        witnesses,
    };
    debug_assert!(!flags.braided || (flags.l1 && flags.r1 && flags.lr3));
    flags
}

/// Nondegenerate, involutive, square-free and braided, by direct check.
pub fn is_square_free_solution(q: &QuadraticSet) -> bool {
    let direct = witness_nondegenerate(q).is_none()
        && witness_square_free(q).is_none()
        && witness_involutive(q).is_none()
        && witness_braided(q).is_none();
    if cfg!(debug_assertions) {
        let by_rows = left_action_conditions_hold(q);
        let cyclic = cyclic_conditions_hold(q);
        debug_assert_eq!(by_rows, cyclic, "alternative characterisations disagree");
        if direct {
            debug_assert!(by_rows, "square-free solution fails the left-action conditions");
        } else if q.right_is_lri_of_left() {
            debug_assert!(!by_rows, "left-action conditions accept a non-solution");
        }
    }
    direct
}

/// Conditions on the left action alone: `ˣx = x`, `^{yˣ}x = ʸx` and l1, with
/// `xʸ = ℒ_y⁻¹(x)`. False when some row is not a bijection.
pub fn left_action_conditions_hold(q: &QuadraticSet) -> bool {
    let Ok(rows) = q.left_perms() else { return false };
    let n = q.n;
    let inv: Vec<Permutation> = rows.iter().map(Permutation::inverse).collect();
    let l = |x: usize, y: usize| rows[x].apply(y);
    let rt = |x: usize, y: usize| inv[y].apply(x);
    if (0..n).any(|x| l(x, x) != x) {
        return false;
    }
    if (0..n).any(|x| (0..n).any(|y| l(rt(y, x), x) != l(y, x))) {
        return false;
    }
    (0..n).into_par_iter().all(|x| {
        (0..n).all(|y| (0..n).all(|z| l(x, l(y, z)) == l(l(x, y), l(rt(x, y), z))))
    })
}

/// `ˣx = x` and `ℒ_{ˣy}ℒ_x = ℒ_{ʸx}ℒ_y` for all `x, y`.
pub fn cyclic_conditions_hold(q: &QuadraticSet) -> bool {
    let Ok(rows) = q.left_perms() else { return false };
    let n = q.n;
    if (0..n).any(|x| rows[x].apply(x) != x) {
        return false;
    }
    (0..n).into_par_iter().all(|x| {
        (0..n).all(|y| {
            let a = &rows[rows[x].apply(y)] * &rows[x];
            let b = &rows[rows[y].apply(x)] * &rows[y];
            a == b
        })
    })
}

/// The four-way agreement for 𝒢-invariance: `Y` 𝒢-invariant, its complement
/// 𝒢-invariant, and both r-invariant. Meaningful for square-free solutions.
pub fn invariance_agrees(q: &QuadraticSet, ys: &[usize]) -> Result<bool, QsetError> {
    let mask = q.check_subset(ys)?;
    let comp: Vec<usize> = (0..q.n).filter(|&i| !mask[i]).collect();
    let g_y = q.is_g_invariant(ys)?;
    let g_c = q.is_g_invariant(&comp)?;
    let r_both = q.is_r_invariant(ys)? && q.is_r_invariant(&comp)?;
    Ok(g_y == g_c && g_c == r_both)
}

/// A total map `X×X → X×X` stored as a table of pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairMap {
    n: usize,
    table: Vec<(usize, usize)>,
}

impl PairMap {
    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        self.table[x * self.n + y]
    }

    pub fn is_involutive(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                let (u, v) = self.apply(x, y);
                self.apply(u, v) == (x, y)
            })
        })
    }

    pub fn to_quadratic_set(&self) -> QuadraticSet {
        let left = self.table.iter().map(|p| p.0).collect();
        let right = self.table.iter().map(|p| p.1).collect();
        QuadraticSet { n: self.n, left, right, labels: None, lri_derived: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub f_involutive: bool,
    pub g_involutive: bool,
    pub r_equals_f_tau_g: bool,
    pub f_is_solution: bool,
    /// `^{αʸ}x = ᵅx` for `x, y ∈ X`, `α ∈ Y`.
    pub f_stu_condition: bool,
    pub g_is_solution: bool,
    /// `^{xᵝ}α = ˣα` for `α, β ∈ Y`, `x ∈ X`.
    pub g_stu_condition: bool,
}

fn part_mask(q: &QuadraticSet, xs: &[usize], ys: &[usize]) -> Result<Vec<bool>, QsetError> {
    let mut in_x = vec![None; q.n];
    for &x in xs {
        if x >= q.n || in_x[x].is_some() {
            return Err(QsetError::NotAPartition);
        }
        in_x[x] = Some(true);
    }
    for &y in ys {
        if y >= q.n || in_x[y].is_some() {
            return Err(QsetError::NotAPartition);
        }
        in_x[y] = Some(false);
    }
    if in_x.iter().any(Option::is_none) {
        return Err(QsetError::NotAPartition);
    }
    if !q.is_r_invariant(xs)? || !q.is_r_invariant(ys)? {
        return Err(QsetError::NotInvariant);
    }
    Ok(in_x.into_iter().map(|v| v.unwrap()).collect())
}

/// The X-split map `f` and Y-split map `g`.
///
/// `f` keeps `r` on `X×X`, flips `Y×Y`, and on mixed pairs carries only the
/// action of `Y` on `X`; `g` flips `X×X`, keeps `r` on `Y×Y` and carries the
/// action of `X` on `Y`.
pub fn split_maps(q: &QuadraticSet, xs: &[usize], ys: &[usize]) -> Result<(PairMap, PairMap), QsetError> {
    let in_x = part_mask(q, xs, ys)?;
    let n = q.n;
    let mut f = Vec::with_capacity(n * n);
    let mut g = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (fa, ga) = match (in_x[a], in_x[b]) {
                (true, true) => (q.r(a, b), (b, a)),
                (false, false) => ((b, a), q.r(a, b)),
                // a = α ∈ Y, b = x ∈ X
                (false, true) => ((q.left(a, b), a), (b, q.right(a, b))),
                // a = x ∈ X, b = α ∈ Y
                (true, false) => ((b, q.right(a, b)), (q.left(a, b), a)),
            };
            f.push(fa);
            g.push(ga);
        }
    }
    Ok((PairMap { n, table: f }, PairMap { n, table: g }))
}

pub fn check_split_identity(q: &QuadraticSet, xs: &[usize], ys: &[usize]) -> Result<SplitReport, QsetError> {
    let (f, g) = split_maps(q, xs, ys)?;
    let n = q.n;
    let r_equals_f_tau_g = (0..n).all(|a| {
        (0..n).all(|b| {
            let (u, v) = g.apply(a, b);
            f.apply(v, u) == q.r(a, b)
        })
    });
    let f_stu_condition = ys
        .iter()
        .all(|&al| xs.iter().all(|&x| xs.iter().all(|&y| q.left(q.right(al, y), x) == q.left(al, x))));
    let g_stu_condition = xs
        .iter()
        .all(|&x| ys.iter().all(|&al| ys.iter().all(|&be| q.left(q.right(x, be), al) == q.left(x, al))));
    Ok(SplitReport {
        f_involutive: f.is_involutive(),
        g_involutive: g.is_involutive(),
        r_equals_f_tau_g,
        f_is_solution: is_square_free_solution(&f.to_quadratic_set()),
        f_stu_condition,
        g_is_solution: is_square_free_solution(&g.to_quadratic_set()),
        g_stu_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{gap_example, three_element, trivial_extension, trivial_solution};

    fn perm(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn from_left_action_examples() {
        let t = QuadraticSet::from_left_action(&vec![Permutation::identity(4); 4]).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(t.r(x, y), (y, x));
            }
        }
        assert!(t.lri_derived());
        let rows = vec![Permutation::identity(3), Permutation::identity(3), perm("(1 2)", 3)];
        let q = QuadraticSet::from_left_action(&rows).unwrap();
        assert_eq!(q.r(2, 0), (1, 2));
        assert_eq!(q.r(0, 2), (2, 1));
        assert!(is_square_free_solution(&q));
        let ragged = vec![Permutation::identity(2), Permutation::identity(3)];
        assert!(matches!(QuadraticSet::from_left_action(&ragged), Err(QsetError::RaggedRows { row: 1, .. })));
        assert!(is_square_free_solution(&gap_example()));
    }

    #[test]
    fn classify_examples() {
        let f = classify(&trivial_solution(5).unwrap());
        assert!(Property::ALL.iter().all(|&p| f.get(p)));
        assert!(f.witnesses.is_empty());
        let g = classify(&gap_example());
        assert!(g.braided && g.square_free && g.lri && g.cyclic());
        let swap = perm("(1 2)", 2);
        let bad = QuadraticSet::from_left_action(&[swap.clone(), swap]).unwrap();
        let fb = classify(&bad);
        assert!(!fb.square_free);
        assert_eq!(fb.witnesses[&Property::SquareFree], vec![0]);
        let one = trivial_solution(1).unwrap();
        assert!(Property::ALL.iter().all(|&p| classify(&one).get(p)));
    }

    #[test]
    fn mutated_table_fails_with_least_witness() {
        // swap two entries of row 11 (element d) of the gap example
        let q = gap_example();
        let n = q.n();
        let mut left = q.left_table().to_vec();
        left.swap(11 * n, 11 * n + 1);
        let bad = QuadraticSet::from_tables(n, left, q.right_table().to_vec()).unwrap();
        let flags = classify(&bad);
        assert!(!is_square_free_solution(&bad));
        assert!(!flags.braided);
        // least failing triple found by brute force
        let w = flags.witnesses[&Property::Braided].clone();
        let mut first = None;
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (l, r) = braid_sides(&bad, x, y, z);
                    if l != r {
                        first = Some(vec![x, y, z]);
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(Some(w), first);
    }

    #[test]
    fn perms_of_elements() {
        let t = trivial_solution(3).unwrap();
        assert!(t.left_perm(1).unwrap().is_identity());
        let g = gap_example();
        let a = 8;
        assert_eq!(
            g.left_perm(a).unwrap().format_cycles_with(&g.labels()),
            "(x1 x2)(x3 x4)(x5 x6)(x7 x8)(b d)"
        );
        let q = three_element();
        assert_eq!(q.right_perm(2).unwrap(), q.left_perm(2).unwrap());
        assert_eq!(q.right_perm(2).unwrap(), perm("(x1 x2)", 3));
        assert_eq!(t.left_perm(3), Err(QsetError::IndexOutOfRange(3)));
        for x in 0..g.n() {
            assert_eq!(g.right_perm(x).unwrap(), g.left_perm(x).unwrap().inverse());
        }
    }

    #[test]
    fn invariant_subsets() {
        let g = gap_example();
        let (a, b, c) = (8, 9, 10);
        assert!(g.is_r_invariant(&[a, c]).unwrap());
        let sub = g.restrict(&[a, c]).unwrap();
        assert_eq!(sub.n(), 2);
        assert!(sub.left_perms().unwrap().iter().all(Permutation::is_identity));
        assert_eq!(sub.labels(), vec!["a".to_string(), "c".to_string()]);
        assert!(!g.is_r_invariant(&[a, b]).unwrap());
        assert_eq!(g.restrict(&[a, b]), Err(QsetError::NotInvariant));
        let all: Vec<usize> = (0..g.n()).collect();
        assert_eq!(g.restrict(&all).unwrap(), g);
        for ys in [vec![a, c], vec![a, b], vec![0], (0..8).collect::<Vec<_>>(), all] {
            assert!(invariance_agrees(&g, &ys).unwrap());
        }
        let three = three_element();
        assert!(three.is_r_invariant(&[0]).unwrap());
        assert!(!three.is_g_invariant(&[0]).unwrap());
        assert!(invariance_agrees(&three, &[0]).unwrap());
    }

    #[test]
    fn split_maps_examples() {
        let z = trivial_extension(&trivial_solution(2).unwrap(), &trivial_solution(3).unwrap());
        let rep = check_split_identity(&z, &[0, 1], &[2, 3, 4]).unwrap();
        assert!(rep.f_involutive && rep.g_involutive && rep.r_equals_f_tau_g);
        assert!(rep.f_is_solution && rep.g_is_solution);

        let g = gap_example();
        let xs: Vec<usize> = (0..8).collect();
        let ys: Vec<usize> = (8..12).collect();
        let rep = check_split_identity(&g, &xs, &ys).unwrap();
        assert!(rep.f_involutive && rep.g_involutive && rep.r_equals_f_tau_g);
        assert_eq!(rep.f_is_solution, rep.f_stu_condition);
        assert_eq!(rep.g_is_solution, rep.g_stu_condition);
        // the parts may also be given the other way round
        let rep2 = check_split_identity(&g, &ys, &xs).unwrap();
        assert!(rep2.r_equals_f_tau_g);
        assert_eq!(rep2.f_is_solution, rep2.f_stu_condition);

        assert_eq!(check_split_identity(&g, &xs, &ys[..3]), Err(QsetError::NotAPartition));
        assert_eq!(
            check_split_identity(&g, &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9], &[10, 11]),
            Err(QsetError::NotInvariant)
        );
    }

    #[test]
    fn restriction_of_solution_is_solution() {
        let g = gap_example();
        for part in [vec![8, 10], vec![9, 11], (0..8).collect::<Vec<_>>(), (0..12).collect()] {
            assert!(is_square_free_solution(&g.restrict(&part).unwrap()));
        }
    }

    #[test]
    fn classify_is_deterministic() {
        let q = gap_example();
        let mut left = q.left_table().to_vec();
        left.swap(3, 5);
        let bad = QuadraticSet::from_tables(q.n(), left, q.right_table().to_vec()).unwrap();
        let first = classify(&bad);
        for _ in 0..5 {
            assert_eq!(classify(&bad), first);
        }
    }
}
