//! Explicit constructions: trivial solutions and extensions, strong twisted
//! unions, one-point extensions by an automorphism, canonical doubling, wreath
//! products, the σ_m / Y_m / X_m family, the doubling family, the abelian mpl-2
//! construction and the ring construction.
//!
//! Index layouts are fixed so that outputs are byte-reproducible:
//! unions list the first part before the second, new points go last, wreath
//! cells `(α, x)` sit at `α·|X₀| + x`, and product sets use mixed radix with
//! component 0 most significant.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{abelian_invariants, normalize_invariants, yb_group, GroupError, PermGroup, ENUMERATION_BOUND};
use crate::perm::{PermError, Permutation};
use crate::qset::{classify, is_square_free_solution, Property, PropertyFlags, QsetError, QuadraticSet};
use crate::retract::{mpl_unchecked, RetractError};

/// Default recursion depth for the σ_m family and the doubling family.
pub const DEFAULT_DEPTH: usize = 12;
/// Default bound on the number of elements a constructor may produce.
pub const SIZE_BUDGET: usize = 4096;
/// Post-construction checks that are cubic in `n` (braid relation, group
/// orders) only run up to this size.
pub const VERIFY_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("a solution needs at least one element")]
    Empty,
    #[error("depth {m} exceeds the configured maximum {max}")]
    DepthExceeded { m: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{size} elements exceed the size budget {budget}")]
    SizeBudget { size: usize, budget: usize },
    #[error("part {0} is not a symmetric set")]
    NotSymmetric(usize),
    #[error("part {0} is not a square-free solution")]
    NotSquareFreeSolution(usize),
    #[error("malformed actions: {0}")]
    MalformedActions(String),
    #[error("stu law `{law}` violated at {witness:?}")]
    StuLawViolated { law: &'static str, witness: Vec<usize> },
    #[error("not an automorphism: the {side} action breaks at ({x}, {y})")]
    NotAutomorphism { side: &'static str, x: usize, y: usize },
    #[error("the action of element {generator} is not an automorphism (braid relation fails at {braid_witness:?})")]
    ActionNotAutomorphism { generator: usize, braid_witness: Option<Vec<usize>> },
    #[error("{omega} is not a unit modulo {modulus}")]
    NotUnit { omega: u64, modulus: u64 },
    #[error("(1 - omega)^2 = {obstruction} mod N, expected 0")]
    InvalidLinear { obstruction: u64 },
    #[error("empty invariant list")]
    EmptyInvariants,
    #[error("cyclic order {0} is below 2")]
    InvalidInvariant(u64),
    #[error("post-condition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Qset(#[from] QsetError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Retract(#[from] RetractError),
}

type Result<T> = std::result::Result<T, ConstructError>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(ConstructError::Postcondition(what()))
    }
}

fn verify_solution(q: &QuadraticSet) -> Result<()> {
    if q.n() <= VERIFY_LIMIT {
        ensure(is_square_free_solution(q), || "result is not a square-free solution".into())?;
    }
    Ok(())
}

/// Full check below [`VERIFY_LIMIT`], square-freeness and lri above it.
fn require_square_free(q: &QuadraticSet, part: usize) -> Result<()> {
    let ok = if q.n() <= VERIFY_LIMIT {
        classify(q).is_square_free_solution()
    } else {
        q.right_is_lri_of_left() && (0..q.n()).all(|x| q.r(x, x) == (x, x))
    };
    if ok {
        Ok(())
    } else {
        Err(ConstructError::NotSquareFreeSolution(part))
    }
}

fn group_order(q: &QuadraticSet) -> Result<BigUint> {
    Ok(yb_group(q)?.order())
}

/// Labels for a set assembled from `parts` followed by new points named `extra`.
/// Stays `None` (default labels) unless some part carries custom labels;
/// clashing names get primes appended.
fn assemble_labels(parts: &[&QuadraticSet], extra: &[&str]) -> Option<Vec<String>> {
    if parts.iter().all(|q| !q.has_custom_labels()) {
        return None;
    }
    let mut seen = HashSet::new();
    let names = parts.iter().flat_map(|q| q.labels()).chain(extra.iter().map(|s| s.to_string()));
    Some(
        names
            .map(|mut name| {
                while !seen.insert(name.clone()) {
                    name.push('\'');
                }
                name
            })
            .collect(),
    )
}

fn with_optional_labels(q: QuadraticSet, labels: Option<Vec<String>>) -> Result<QuadraticSet> {
    match labels {
        Some(l) => Ok(q.with_labels(l)?),
        None => Ok(q),
    }
}

/// Square-free solution from image tables of its left translations.
fn from_rows(rows: Vec<Vec<usize>>) -> Result<QuadraticSet> {
    let perms = rows.into_iter().map(Permutation::from_images).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(QuadraticSet::from_left_action(&perms)?)
}

/// Table of `(ˣy, xʸ)` filled from a closure.
fn from_pairs(n: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> QuadraticSet {
    let mut left = vec![0; n * n];
    let mut right = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let (l, r) = f(x, y);
            left[x * n + y] = l;
            right[x * n + y] = r;
        }
    }
    QuadraticSet::from_tables(n, left, right).expect("assembled tables are in range")
}

/// First failure of `(σ×σ)∘r = r∘(σ×σ)`, as `(side, x, y)`.
pub fn automorphism_witness(q: &QuadraticSet, sigma: &Permutation) -> Option<(&'static str, usize, usize)> {
    let n = q.n();
    if sigma.degree() != n {
        return Some(("degree", n, sigma.degree()));
    }
    for x in 0..n {
        for y in 0..n {
            let (sx, sy) = (sigma.apply(x), sigma.apply(y));
            if sigma.apply(q.left(x, y)) != q.left(sx, sy) {
                return Some(("left", x, y));
            }
            if sigma.apply(q.right(x, y)) != q.right(sx, sy) {
                return Some(("right", x, y));
            }
        }
    }
    None
}

pub fn is_automorphism(q: &QuadraticSet, sigma: &Permutation) -> bool {
    automorphism_witness(q, sigma).is_none()
}

/// `ℒ_a ℒ_b = ℒ_b ℒ_a` for all `a, b`.
pub fn left_actions_commute(q: &QuadraticSet) -> bool {
    let n = q.n();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|x| q.left(a, q.left(b, x)) == q.left(b, q.left(a, x)))))
}

/// The flip `r(x, y) = (y, x)` on `n` points.
pub fn trivial_solution(n: usize) -> Result<QuadraticSet> {
    if n == 0 {
        return Err(ConstructError::Empty);
    }
    from_rows(vec![(0..n).collect(); n])
}

/// Disjoint union with the flip across parts; `q1` occupies `0..n₁`.
pub fn trivial_extension(q1: &QuadraticSet, q2: &QuadraticSet) -> QuadraticSet {
    let n1 = q1.n();
    let z = from_pairs(n1 + q2.n(), |x, y| match (x < n1, y < n1) {
        (true, true) => q1.r(x, y),
        (false, false) => {
            let (a, b) = q2.r(x - n1, y - n1);
            (a + n1, b + n1)
        }
        _ => (y, x),
    })
    .set_lri_derived(q1.lri_derived() && q2.lri_derived());
    with_optional_labels(z, assemble_labels(&[q1, q2], &[])).expect("one label per element")
}

/// `{x1, x2, x3}` with `ℒ_{x3} = (x1 x2)` and the other two acting trivially.
pub fn three_element() -> QuadraticSet {
    from_rows(vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 0, 2]]).expect("fixed rows")
}

/// Twelve points `x1..x8, a, b, c, d` (indices 0..7, then 8..11); mpl 3 with
/// an abelian group of order 8.
pub fn gap_example() -> QuadraticSet {
    let labels: Vec<String> =
        (1..=8).map(|i| format!("x{i}")).chain(["a", "b", "c", "d"].map(String::from)).collect();
    let act = |text: &str| Permutation::parse_cycles_with(text, &labels).expect("fixture cycles parse");
    let mut rows = vec![Permutation::identity(12); 8];
    rows.push(act("(b d)(x1 x2)(x3 x4)(x5 x6)(x7 x8)"));
    rows.push(act("(a c)(x1 x3)(x2 x4)(x5 x7)(x6 x8)"));
    rows.push(act("(b d)(x1 x5)(x2 x6)(x3 x7)(x4 x8)"));
    rows.push(act("(a c)(x1 x8)(x2 x7)(x3 x6)(x4 x5)"));
    QuadraticSet::from_left_action(&rows).expect("fixture rows").with_labels(labels).expect("twelve labels")
}

/// Twenty-six points: `x_j^i` at `(i−1)·4 + (j−1)` for copies `i` and
/// positions `j` in 1..4, then `a1..a4` (16..19), `a1'..a4'` (20..23), `b`
/// (24), `c` (25). mpl 4 and `|𝒢| = 2¹⁴`.
pub fn jump_example() -> QuadraticSet {
    const N: usize = 26;
    let x = |i: usize, j: usize| (i - 1) * 4 + (j - 1);
    let a = |i: usize| 16 + i - 1;
    let a2 = |i: usize| 20 + i - 1;
    let perm = |cycles: Vec<Vec<usize>>| Permutation::from_cycles(N, &cycles).expect("disjoint fixture cycles");
    let mut rows = vec![Permutation::identity(N); N];
    for i in 1..=4 {
        let odd = perm(vec![vec![x(i, 2), x(i, 4)], vec![a(i), a2(i)]]);
        let even = perm(vec![vec![x(i, 1), x(i, 3)], vec![a(i), a2(i)]]);
        let rotation = perm(vec![vec![x(i, 1), x(i, 2), x(i, 3), x(i, 4)]]);
        rows[x(i, 1)] = odd.clone();
        rows[x(i, 3)] = odd;
        rows[x(i, 2)] = even.clone();
        rows[x(i, 4)] = even;
        rows[a(i)] = rotation.clone();
        rows[a2(i)] = rotation;
    }
    let mut lb = vec![vec![a(1), a(2)], vec![a(3), a(4)], vec![a2(1), a2(2)], vec![a2(3), a2(4)]];
    let mut lc = vec![vec![a(1), a(3)], vec![a(2), a(4)], vec![a2(1), a2(3)], vec![a2(2), a2(4)]];
    for j in 1..=4 {
        lb.push(vec![x(1, j), x(2, j)]);
        lb.push(vec![x(3, j), x(4, j)]);
        lc.push(vec![x(1, j), x(3, j)]);
        lc.push(vec![x(2, j), x(4, j)]);
    }
    rows[24] = perm(lb);
    rows[25] = perm(lc);
    let mut labels: Vec<String> = Vec::with_capacity(N);
    for i in 1..=4 {
        labels.extend((1..=4).map(|j| format!("x{j}^{i}")));
    }
    labels.extend((1..=4).map(|i| format!("a{i}")));
    labels.extend((1..=4).map(|i| format!("a{i}'")));
    labels.extend(["b".to_string(), "c".to_string()]);
    QuadraticSet::from_left_action(&rows).expect("fixture rows").with_labels(labels).expect("26 labels")
}

/// Cross actions of a two-part union `A ∪ B`, each on the other part's own indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuActions {
    /// `ℒ_x|B` for each `x ∈ A`.
    pub a_on_b: Vec<Permutation>,
    /// `ℒ_β|A` for each `β ∈ B`.
    pub b_on_a: Vec<Permutation>,
}

impl StuActions {
    pub fn trivial(n1: usize, n2: usize) -> Self {
        StuActions { a_on_b: vec![Permutation::identity(n2); n1], b_on_a: vec![Permutation::identity(n1); n2] }
    }
}

#[derive(Debug, Clone)]
pub struct StuUnion {
    pub set: QuadraticSet,
    pub flags: PropertyFlags,
    /// Nondegenerate, involutive and braided.
    pub is_solution: bool,
    /// Every cross action is an automorphism of the part it acts on.
    pub restricted_automorphisms: bool,
}

fn check_action_relations(
    q: &QuadraticSet,
    acts: &[Permutation],
    offset_actor: usize,
    offset_target: usize,
) -> Result<()> {
    let n = q.n();
    let m = acts.first().map_or(0, Permutation::degree);
    for x in 0..n {
        for y in 0..n {
            let (u, v) = q.r(x, y);
            for t in 0..m {
                if acts[x].apply(acts[y].apply(t)) != acts[u].apply(acts[v].apply(t)) {
                    return Err(ConstructError::StuLawViolated {
                        law: "action",
                        witness: vec![offset_actor + x, offset_actor + y, offset_target + t],
                    });
                }
            }
        }
    }
    Ok(())
}

/// Assembles `A ∪ B` (A first) from two symmetric sets and cross actions,
/// with right actions `x^β = ℒ_β⁻¹(x)`. The action relations and the stu law
/// (cross actions constant on orbits of the other part) are enforced; whether
/// the result is braided is reported, not assumed.
pub fn stu_union(q1: &QuadraticSet, q2: &QuadraticSet, actions: &StuActions) -> Result<StuUnion> {
    let (n1, n2) = (q1.n(), q2.n());
    if actions.a_on_b.len() != n1 || actions.b_on_a.len() != n2 {
        return Err(ConstructError::MalformedActions(format!(
            "expected {n1} and {n2} permutations, got {} and {}",
            actions.a_on_b.len(),
            actions.b_on_a.len()
        )));
    }
    if let Some(p) = actions.a_on_b.iter().find(|p| p.degree() != n2) {
        return Err(ConstructError::MalformedActions(format!("action on B of degree {}, expected {n2}", p.degree())));
    }
    if let Some(p) = actions.b_on_a.iter().find(|p| p.degree() != n1) {
        return Err(ConstructError::MalformedActions(format!("action on A of degree {}, expected {n1}", p.degree())));
    }
    for (i, q) in [q1, q2].into_iter().enumerate() {
        if !classify(q).is_symmetric_set() {
            return Err(ConstructError::NotSymmetric(i + 1));
        }
    }
    let (ab, ba) = (&actions.a_on_b, &actions.b_on_a);
    for y in 0..n1 {
        for beta in 0..n2 {
            if ba[ab[y].apply(beta)] != ba[beta] {
                return Err(ConstructError::StuLawViolated { law: "stu", witness: vec![y, n1 + beta] });
            }
        }
    }
    for beta in 0..n2 {
        for x in 0..n1 {
            if ab[ba[beta].apply(x)] != ab[x] {
                return Err(ConstructError::StuLawViolated { law: "stu", witness: vec![n1 + beta, x] });
            }
        }
    }
    check_action_relations(q2, ba, n1, 0)?;
    check_action_relations(q1, ab, 0, n1)?;

    let ab_inv: Vec<Permutation> = ab.iter().map(Permutation::inverse).collect();
    let ba_inv: Vec<Permutation> = ba.iter().map(Permutation::inverse).collect();
    let set = from_pairs(n1 + n2, |x, y| match (x < n1, y < n1) {
        (true, true) => q1.r(x, y),
        (false, false) => {
            let (a, b) = q2.r(x - n1, y - n1);
            (a + n1, b + n1)
        }
        (true, false) => (n1 + ab[x].apply(y - n1), ba_inv[y - n1].apply(x)),
        (false, true) => (ba[x - n1].apply(y), n1 + ab_inv[y].apply(x - n1)),
    })
    .set_lri_derived(q1.lri_derived() && q2.lri_derived());
    let set = with_optional_labels(set, assemble_labels(&[q1, q2], &[]))?;
    let restricted_automorphisms =
        ab.iter().all(|p| is_automorphism(q2, p)) && ba.iter().all(|p| is_automorphism(q1, p));
    let flags = classify(&set);
    Ok(StuUnion { is_solution: flags.is_symmetric_set(), flags, set, restricted_automorphisms })
}

/// `actor` restricted to part `part` is not an automorphism of that part;
/// `pair` is where it fails, in global indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StuWitness {
    pub actor: usize,
    pub part: usize,
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StuCheck {
    pub holds: bool,
    pub witness: Option<StuWitness>,
}

/// Whether `ℒ_x|X_j ∈ Aut(X_j)` for all parts `i ≠ j` and `x ∈ X_i`.
pub fn is_stu_decomposition(q: &QuadraticSet, parts: &[Vec<usize>]) -> Result<StuCheck> {
    let n = q.n();
    let mut part_of = vec![usize::MAX; n];
    for (i, part) in parts.iter().enumerate() {
        for &x in part {
            if x >= n {
                return Err(QsetError::IndexOutOfRange(x).into());
            }
            if part_of[x] != usize::MAX {
                return Err(QsetError::NotAPartition.into());
            }
            part_of[x] = i;
        }
    }
    if part_of.contains(&usize::MAX) || parts.iter().any(Vec::is_empty) {
        return Err(QsetError::NotAPartition.into());
    }
    for part in parts {
        if !q.is_g_invariant(part)? {
            return Err(QsetError::NotInvariant.into());
        }
    }
    let sorted: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| {
            let mut s = p.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let mut local = vec![0; n];
    for s in &sorted {
        for (i, &x) in s.iter().enumerate() {
            local[x] = i;
        }
    }
    for (j, s) in sorted.iter().enumerate() {
        let restricted = q.restrict(s)?;
        for x in (0..n).filter(|&x| part_of[x] != j) {
            let sigma = Permutation::from_images(s.iter().map(|&y| local[q.left(x, y)]).collect())?;
            if let Some((_, a, b)) = automorphism_witness(&restricted, &sigma) {
                return Ok(StuCheck {
                    holds: false,
                    witness: Some(StuWitness { actor: x, part: j, pair: (s[a], s[b]) }),
                });
            }
        }
    }
    Ok(StuCheck { holds: true, witness: None })
}

/// One new point `α` (index `n`) with `ℒ_α = τ` and `ℒ_x(α) = α`.
pub fn extend_by_automorphism(q: &QuadraticSet, tau: &Permutation) -> Result<QuadraticSet> {
    let n = q.n();
    if tau.degree() != n {
        return Err(PermError::DegreeMismatch(tau.degree(), n).into());
    }
    require_square_free(q, 1)?;
    if let Some((side, x, y)) = automorphism_witness(q, tau) {
        return Err(ConstructError::NotAutomorphism { side, x, y });
    }
    let mut rows: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut row = q.left_row(x).to_vec();
            row.push(n);
            row
        })
        .collect();
    let mut top = tau.images().to_vec();
    top.push(n);
    rows.push(top);
    let z = with_optional_labels(from_rows(rows)?, assemble_labels(&[q], &["α"]))?;
    verify_solution(&z)?;
    if z.n() <= VERIFY_LIMIT {
        if let Some(m) = mpl_unchecked(q)? {
            if !yb_group(q)?.contains(tau) {
                let mz = mpl_unchecked(&z)?;
                ensure(mz == Some(m + 1), || format!("mpl {mz:?} after extending a level-{m} solution"))?;
            }
        }
    }
    Ok(z)
}

/// `X ♮₀ X′ ♮ {α}`: `X` at `0..n`, its copy at `n..2n`, and `α` at `2n`
/// swapping `x_i ↔ x_i′`.
pub fn canonical_doubling(q: &QuadraticSet) -> Result<QuadraticSet> {
    let n = q.n();
    let size = 2 * n + 1;
    if size > SIZE_BUDGET {
        return Err(ConstructError::SizeBudget { size, budget: SIZE_BUDGET });
    }
    let base = trivial_extension(q, q);
    let swap = Permutation::from_images((n..2 * n).chain(0..n).collect())?;
    let z = extend_by_automorphism(&base, &swap)?;
    if n >= 2 {
        let (m, mz) = (mpl_unchecked(q)?, mpl_unchecked(&z)?);
        ensure(mz == m.map(|m| m + 1), || format!("doubling moved mpl from {m:?} to {mz:?}"))?;
    }
    if size <= VERIFY_LIMIT {
        let (g, gz) = (group_order(q)?, group_order(&z)?);
        ensure(gz == BigUint::from(2u32) * &g * &g, || format!("|G(Z)| = {gz}, |G(X)| = {g}"))?;
    }
    Ok(z)
}

/// `X₀ ≀ Y` within [`SIZE_BUDGET`].
pub fn wreath_product(x0: &QuadraticSet, y: &QuadraticSet) -> Result<QuadraticSet> {
    wreath_product_with_budget(x0, y, SIZE_BUDGET)
}

/// `|Y|` copies of `X₀` trivially extended, the copy over `α` at
/// `α·|X₀| .. (α+1)·|X₀|`, followed by `Y`; each `β ∈ Y` moves copy `α` onto
/// copy `ᵝα` and acts on `Y` as in `Y`.
pub fn wreath_product_with_budget(x0: &QuadraticSet, y: &QuadraticSet, budget: usize) -> Result<QuadraticSet> {
    let (n0, ny) = (x0.n(), y.n());
    let size = n0 * ny + ny;
    if size > budget {
        return Err(ConstructError::SizeBudget { size, budget });
    }
    require_square_free(x0, 1)?;
    require_square_free(y, 2)?;
    let base = n0 * ny;
    let mut rows = Vec::with_capacity(size);
    for alpha in 0..ny {
        for x in 0..n0 {
            let mut row: Vec<usize> = (0..size).collect();
            for z in 0..n0 {
                row[alpha * n0 + z] = alpha * n0 + x0.left(x, z);
            }
            rows.push(row);
        }
    }
    for beta in 0..ny {
        let mut row = Vec::with_capacity(size);
        for alpha in 0..ny {
            row.extend((0..n0).map(|x| y.left(beta, alpha) * n0 + x));
        }
        row.extend((0..ny).map(|t| base + y.left(beta, t)));
        rows.push(row);
    }
    let z = from_rows(rows)?;
    let z = if x0.has_custom_labels() || y.has_custom_labels() {
        let (lx, ly) = (x0.labels(), y.labels());
        let mut names: Vec<String> = Vec::with_capacity(size);
        for a in &ly {
            names.extend(lx.iter().map(|x| format!("{x}_{a}")));
        }
        names.extend(ly.iter().cloned());
        let mut seen = HashSet::new();
        let names = names
            .into_iter()
            .map(|mut s| {
                while !seen.insert(s.clone()) {
                    s.push('\'');
                }
                s
            })
            .collect();
        z.with_labels(names)?
    } else {
        z
    };
    verify_solution(&z)?;
    let (mx, my, mz) = (mpl_unchecked(x0)?, mpl_unchecked(y)?, mpl_unchecked(&z)?);
    if let (Some(a), Some(b)) = (mx, my) {
        if a >= 1 && b >= 1 {
            ensure(mz == Some(a + b - 1), || format!("mpl {mz:?} for factors of level {a} and {b}"))?;
        }
    }
    if size <= VERIFY_LIMIT {
        let (gx, gy, gz) = (group_order(x0)?, group_order(y)?, group_order(&z)?);
        let expected = num_traits::pow(gx.clone(), ny) * &gy;
        ensure(gz == expected, || format!("|G(Z)| = {gz}, expected {expected}"))?;
    }
    Ok(z)
}

/// The `2^m`-cycle `σ_m`: `σ_0` is the identity on one point, `σ_1 = (x1 x2)`
/// and `σ_m = σ_{m−1} ∨ σ_{m−1}[2^{m−1}]`.
pub fn gi_sigma(m: usize) -> Result<Permutation> {
    gi_sigma_bounded(m, DEFAULT_DEPTH)
}

pub fn gi_sigma_bounded(m: usize, max_depth: usize) -> Result<Permutation> {
    if m > max_depth {
        return Err(ConstructError::DepthExceeded { m, max: max_depth });
    }
    let mut sigma = Permutation::identity(1);
    for k in 1..=m {
        sigma = if k == 1 {
            Permutation::from_cycles(2, &[vec![0, 1]])?
        } else {
            let h = 1 << (k - 1);
            Permutation::vee(&sigma.shift(0, 2 * h)?, &sigma.shift(h, 2 * h)?)?
        };
    }
    Ok(sigma)
}

/// `Y_m` on `2^m` points: `Y_0` is one point and `Y_m = Y_{m−1} ♮ Y_{m−1}[2^{m−1}]`,
/// where the first half acts on the second by `σ_{m−1}[2^{m−1}]` and the second
/// half acts on the first by `σ_{m−1}`.
pub fn gi_y(m: usize) -> Result<QuadraticSet> {
    gi_y_bounded(m, DEFAULT_DEPTH)
}

pub fn gi_y_bounded(m: usize, max_depth: usize) -> Result<QuadraticSet> {
    if m > max_depth {
        return Err(ConstructError::DepthExceeded { m, max: max_depth });
    }
    let mut rows: Vec<Vec<usize>> = vec![vec![0]];
    let mut sigma = Permutation::identity(1);
    for k in 1..=m {
        let h = rows.len();
        let mut next = Vec::with_capacity(2 * h);
        for row in &rows {
            let mut r = row.clone();
            r.extend((0..h).map(|z| h + sigma.apply(z)));
            next.push(r);
        }
        for row in &rows {
            let mut r: Vec<usize> = (0..h).map(|z| sigma.apply(z)).collect();
            r.extend(row.iter().map(|&z| h + z));
            next.push(r);
        }
        rows = next;
        sigma = gi_sigma_bounded(k, max_depth)?;
    }
    let y = from_rows(rows)?;
    verify_solution(&y)?;
    Ok(y)
}

/// `X_m = Y_{m−1} ♮ {x_{2^{m−1}+1}}` with `ℒ = σ_{m−1}`, for `m ≥ 1`; it has
/// `2^{m−1} + 1` points and mpl `m`.
pub fn gi_x(m: usize) -> Result<QuadraticSet> {
    gi_x_bounded(m, DEFAULT_DEPTH)
}

pub fn gi_x_bounded(m: usize, max_depth: usize) -> Result<QuadraticSet> {
    if m == 0 {
        return Err(ConstructError::InvalidParameter("the X_m family starts at m = 1".into()));
    }
    if m > max_depth {
        return Err(ConstructError::DepthExceeded { m, max: max_depth });
    }
    extend_by_automorphism(&gi_y_bounded(m - 1, max_depth)?, &gi_sigma_bounded(m - 1, max_depth)?)
}

/// `X_0` is one point, `X_1 = trivial(2)`, `X_2 = X_1 ♮ {x3}` with
/// `ℒ_{x3} = (x1 x2)`, and `X_m` is the canonical doubling of `X_{m−1}`.
pub fn easy_family(m: usize) -> Result<QuadraticSet> {
    easy_family_bounded(m, DEFAULT_DEPTH)
}

pub fn easy_family_bounded(m: usize, max_depth: usize) -> Result<QuadraticSet> {
    if m > max_depth {
        return Err(ConstructError::DepthExceeded { m, max: max_depth });
    }
    let mut x = match m {
        0 => return trivial_solution(1),
        1 => return trivial_solution(2),
        _ => extend_by_automorphism(&trivial_solution(2)?, &Permutation::from_cycles(2, &[vec![0, 1]])?)?,
    };
    for _ in 3..=m {
        let prev = x.n();
        x = canonical_doubling(&x)?;
        ensure(x.n() == 2 * prev + 1, || format!("doubling of {prev} points gave {}", x.n()))?;
    }
    let level = mpl_unchecked(&x)?;
    ensure(level == Some(m), || format!("mpl {level:?}, expected {m}"))?;
    Ok(x)
}

/// `H = ∏ C_{dᵢ}` (mixed radix, component 0 most significant) at `0..|H|`,
/// then fixed points `a₁..a_r`; `H` acts trivially and `aᵢ` translates by the
/// i-th generator.
pub fn abelian_mpl2(orders: &[u64]) -> Result<QuadraticSet> {
    if orders.is_empty() {
        return Err(ConstructError::EmptyInvariants);
    }
    if let Some(&d) = orders.iter().find(|&&d| d < 2) {
        return Err(ConstructError::InvalidInvariant(d));
    }
    let too_big = || ConstructError::SizeBudget { size: usize::MAX, budget: SIZE_BUDGET };
    let h = orders.iter().try_fold(1usize, |acc, &d| acc.checked_mul(usize::try_from(d).ok()?)).ok_or_else(too_big)?;
    let size = h.checked_add(orders.len()).ok_or_else(too_big)?;
    if size > SIZE_BUDGET {
        return Err(ConstructError::SizeBudget { size, budget: SIZE_BUDGET });
    }
    let r = orders.len();
    let mut strides = vec![1usize; r];
    for i in (0..r.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * orders[i + 1] as usize;
    }
    let mut rows: Vec<Vec<usize>> = vec![(0..size).collect(); h];
    for (i, &d) in orders.iter().enumerate() {
        let d = d as usize;
        let mut row: Vec<usize> = (0..size).collect();
        for (idx, slot) in row.iter_mut().enumerate().take(h) {
            let digit = (idx / strides[i]) % d;
            *slot = idx - digit * strides[i] + ((digit + 1) % d) * strides[i];
        }
        rows.push(row);
    }
    let q = from_rows(rows)?;
    verify_solution(&q)?;
    let level = mpl_unchecked(&q)?;
    ensure(level == Some(2), || format!("mpl {level:?}, expected 2"))?;
    let inv = abelian_invariants(&yb_group(&q)?, ENUMERATION_BOUND)?;
    let want = normalize_invariants(orders);
    ensure(inv == want, || format!("group invariants {inv:?}, expected {want:?}"))?;
    Ok(q)
}

/// `A = (Z/N)^k` with `ℒ_a(x) = ωx + (1−ω)a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearParams {
    pub modulus: u64,
    pub omega: u64,
    pub rank: usize,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl LinearParams {
    pub fn new(modulus: u64, omega: u64, rank: usize) -> Result<Self> {
        let p = LinearParams { modulus, omega, rank };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.modulus < 2 {
            return Err(ConstructError::InvalidParameter(format!("modulus {} below 2", self.modulus)));
        }
        if self.rank == 0 {
            return Err(ConstructError::InvalidParameter("rank must be at least 1".into()));
        }
        if gcd(self.omega % self.modulus, self.modulus) != 1 {
            return Err(ConstructError::NotUnit { omega: self.omega, modulus: self.modulus });
        }
        Ok(())
    }

    /// `(1 − ω)² mod N`; the construction is a solution exactly when this is 0.
    pub fn obstruction(&self) -> u64 {
        let n = self.modulus as u128;
        let c = (n + 1 - (self.omega as u128 % n)) % n;
        ((c * c) % n) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.omega % self.modulus == 1
    }
}

/// The quadratic set of the ring construction, whether or not it is a solution.
pub fn linear_quadratic_set(params: LinearParams) -> Result<QuadraticSet> {
    params.validate()?;
    let n = params.modulus as usize;
    let size = u32::try_from(params.rank)
        .ok()
        .and_then(|k| n.checked_pow(k))
        .filter(|&s| s <= SIZE_BUDGET)
        .ok_or(ConstructError::SizeBudget { size: usize::MAX, budget: SIZE_BUDGET })?;
    let w = (params.omega % params.modulus) as usize;
    let c = (n + 1 - w) % n;
    let digits = |mut v: usize| {
        let mut d = vec![0; params.rank];
        for slot in d.iter_mut().rev() {
            *slot = v % n;
            v /= n;
        }
        d
    };
    let points: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let rows = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|x| x.iter().zip(a).fold(0, |acc, (&xi, &ai)| acc * n + (w * xi + c * ai) % n))
                .collect()
        })
        .collect();
    from_rows(rows)
}

/// The ring construction, rejected unless `(1 − ω)² ≡ 0 (mod N)`.
pub fn linear_solution(params: LinearParams) -> Result<QuadraticSet> {
    params.validate()?;
    let obstruction = params.obstruction();
    if obstruction != 0 {
        return Err(ConstructError::InvalidLinear { obstruction });
    }
    let q = linear_quadratic_set(params)?;
    verify_solution(&q)?;
    let want = if params.is_trivial() { 1 } else { 2 };
    let level = mpl_unchecked(&q)?;
    ensure(level == Some(want), || format!("mpl {level:?}, expected {want}"))?;
    if q.n() <= VERIFY_LIMIT {
        ensure(left_actions_commute(&q), || "left translations do not commute".into())?;
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemidirectOrders {
    pub order_z: BigUint,
    pub order_x: BigUint,
    /// Order of the group generated by the action images.
    pub order_acting: BigUint,
    /// `|𝒢(Z)|` divides `|𝒢(X)|·order_acting`.
    pub divides: bool,
}

#[derive(Debug, Clone)]
pub struct SemidirectExtension {
    pub set: QuadraticSet,
    pub flags: PropertyFlags,
    pub is_solution: bool,
    /// Present when the assembly is a solution.
    pub orders: Option<SemidirectOrders>,
}

/// `Z = X ∪ Y` where `Y` acts on `X` through `action[β]`, `X` acts trivially on
/// `Y`, and each part keeps its own map.
pub fn semidirect_extension(q1: &QuadraticSet, q2: &QuadraticSet, action: &[Permutation]) -> Result<SemidirectExtension> {
    let (n1, n2) = (q1.n(), q2.n());
    if action.len() != n2 {
        return Err(ConstructError::MalformedActions(format!("expected {n2} permutations, got {}", action.len())));
    }
    if let Some(p) = action.iter().find(|p| p.degree() != n1) {
        return Err(ConstructError::MalformedActions(format!("action of degree {}, expected {n1}", p.degree())));
    }
    require_square_free(q1, 1)?;
    require_square_free(q2, 2)?;
    let size = n1 + n2;
    let mut rows: Vec<Vec<usize>> = (0..n1)
        .map(|x| {
            let mut row = q1.left_row(x).to_vec();
            row.extend(n1..size);
            row
        })
        .collect();
    for (beta, p) in action.iter().enumerate() {
        let mut row = p.images().to_vec();
        row.extend(q2.left_row(beta).iter().map(|&t| n1 + t));
        rows.push(row);
    }
    let set = with_optional_labels(from_rows(rows)?, assemble_labels(&[q1, q2], &[]))?;
    let flags = classify(&set);
    if let Some(beta) = action.iter().position(|p| !is_automorphism(q1, p)) {
        return Err(ConstructError::ActionNotAutomorphism {
            generator: n1 + beta,
            braid_witness: flags.witnesses.get(&Property::Braided).cloned(),
        });
    }
    let is_solution = flags.is_symmetric_set();
    let orders = if is_solution {
        let order_z = group_order(&set)?;
        let order_x = group_order(q1)?;
        let order_acting = PermGroup::new(n1, action)?.order();
        let bound = &order_x * &order_acting;
        let divides = !order_z.is_zero() && (&bound % &order_z).is_zero();
        Some(SemidirectOrders { order_z, order_x, order_acting, divides })
    } else {
        None
    };
    Ok(SemidirectExtension { set, flags, is_solution, orders })
}
