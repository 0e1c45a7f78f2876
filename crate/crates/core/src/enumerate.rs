//! Exhaustive enumeration of small square-free solutions, isomorphism tests,
//! canonical forms and census scans.
//!
//! The search assigns rows `ℒ_x` fixing `x`, branching on the least unassigned
//! row, and prunes with `^{yˣ}x = ʸx` and `ℒ_xℒ_y = ℒ_{ˣy}ℒ_{xʸ}`; the latter
//! also forces a row once the other three are known, and the former narrows
//! each open row to a bitset of candidates. Work is split after two
//! branchings and the result is sorted by left table, so output is the
//! lexicographic order of row choices whatever the number of threads.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::yb_group;
use crate::iso;
use crate::perm::Permutation;
use crate::qset::{is_square_free_solution, QuadraticSet};
use crate::retract::mpl_unchecked;

/// Largest order enumerated without [`EnumerateOptions::allow_8`].
pub const ENUMERATION_CAP: usize = 7;
/// Default size bound for [`is_isomorphic`] and [`canonical_form`].
pub const ISOMORPHISM_CAP: usize = 10;
/// Largest order accepted by [`enumerate_involutive_candidates`].
pub const CANDIDATE_CAP: usize = 5;

const PREFIX_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("order {n} is outside the supported range 2..={cap}")]
    OutOfRange { n: usize, cap: usize },
    #[error("sizes differ: {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Worker threads; `None` uses the global pool.
    pub shards: Option<usize>,
    /// Lifts the cap from 7 to 8.
    pub allow_8: bool,
}

/// Permutations of `0..n` fixing `x`, in lexicographic order, with inverses.
fn row_candidates(n: usize, x: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if p[x] == x {
            let mut inv = vec![0; n];
            for (i, &v) in p.iter().enumerate() {
                inv[v] = i;
            }
            out.push((p.clone(), inv));
        }
        // next permutation in lexicographic order
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

struct Search {
    n: usize,
    candidates: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    words: usize,
    /// `masks[(w*n + x)*n + v]`: candidates for row `w` with `ℒ_w(x) = v`, as a bitset.
    masks: Vec<Vec<u64>>,
}

type Picks = Vec<Option<usize>>;

impl Search {
    fn new(n: usize) -> Self {
        let candidates: Vec<_> = (0..n).map(|x| row_candidates(n, x)).collect();
        let index = candidates
            .iter()
            .map(|rows: &Vec<(Vec<usize>, Vec<usize>)>| rows.iter().enumerate().map(|(i, (p, _))| (p.clone(), i)).collect())
            .collect();
        let words = candidates.iter().map(Vec::len).max().unwrap_or(0).div_ceil(64);
        let mut masks = vec![vec![0u64; words]; n * n * n];
        for (w, rows) in candidates.iter().enumerate() {
            for (i, (p, _)) in rows.iter().enumerate() {
                for (x, &v) in p.iter().enumerate() {
                    masks[(w * n + x) * n + v][i / 64] |= 1 << (i % 64);
                }
            }
        }
        Search { n, candidates, index, words, masks }
    }

    /// Forward check on `^{yˣ}x = ʸx`: for an unassigned row `t` and assigned
    /// `x`, the rows at `ℒ_x(t)` and `ℒ_x⁻¹(t)` pin `ℒ_t(x)`. Assigns rows
    /// left with one candidate; `None` when some row has none.
    fn narrow(&self, picks: &mut Picks) -> Option<bool> {
        let n = self.n;
        let mut changed = false;
        let mut dom = vec![0u64; self.words];
        for t in 0..n {
            if picks[t].is_some() {
                continue;
            }
            let mut constrained = false;
            for x in 0..n {
                let (Some(lx), Some(ix)) = (self.row(picks, x), self.inv(picks, x)) else { continue };
                for p in [lx[t], ix[t]] {
                    if let Some(lp) = self.row(picks, p) {
                        let mask = &self.masks[(t * n + x) * n + lp[x]];
                        if constrained {
                            dom.iter_mut().zip(mask).for_each(|(d, m)| *d &= m);
                        } else {
                            dom.copy_from_slice(mask);
                            constrained = true;
                        }
                    }
                }
            }
            if !constrained {
                continue;
            }
            let count: u32 = dom.iter().map(|d| d.count_ones()).sum();
            match count {
                0 => return None,
                1 => {
                    let word = dom.iter().position(|&d| d != 0).unwrap();
                    picks[t] = Some(word * 64 + dom[word].trailing_zeros() as usize);
                    changed = true;
                }
                _ => {}
            }
        }
        Some(changed)
    }

    fn row(&self, picks: &Picks, x: usize) -> Option<&[usize]> {
        picks[x].map(|i| self.candidates[x][i].0.as_slice())
    }

    fn inv(&self, picks: &Picks, x: usize) -> Option<&[usize]> {
        picks[x].map(|i| self.candidates[x][i].1.as_slice())
    }

    /// Checks every constraint whose rows are known and assigns rows forced by
    /// `ℒ_xℒ_y = ℒ_{ˣy}ℒ_{xʸ}` once three of its four rows are known. Runs to a
    /// fixed point; `false` means a contradiction.
    fn propagate(&self, picks: &mut Picks) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for x in 0..n {
                let (Some(lx), Some(ix)) = (self.row(picks, x), self.inv(picks, x)) else { continue };
                for y in 0..n {
                    let (Some(ly), Some(iy)) = (self.row(picks, y), self.inv(picks, y)) else { continue };
                    let yx = ix[y];
                    if let Some(lyx) = self.row(picks, yx) {
                        if lyx[x] != ly[x] {
                            return false;
                        }
                    }
                    let (u, v) = (lx[y], iy[x]);
                    let forced = match (picks[u], picks[v]) {
                        (Some(_), Some(_)) => {
                            let (lu, lv) = (self.row(picks, u).unwrap(), self.row(picks, v).unwrap());
                            if (0..n).any(|z| lx[ly[z]] != lu[lv[z]]) {
                                return false;
                            }
                            None
                        }
                        // ℒ_v = ℒ_u⁻¹ℒ_xℒ_y
                        (Some(_), None) => {
                            let iu = self.inv(picks, u).unwrap();
                            Some((v, (0..n).map(|z| iu[lx[ly[z]]]).collect::<Vec<_>>()))
                        }
                        // ℒ_u = ℒ_xℒ_yℒ_v⁻¹
                        (None, Some(_)) => {
                            let iv = self.inv(picks, v).unwrap();
                            Some((u, (0..n).map(|z| lx[ly[iv[z]]]).collect::<Vec<_>>()))
                        }
                        (None, None) => None,
                    };
                    if let Some((w, images)) = forced {
                        match self.index[w].get(&images) {
                            Some(&i) => {
                                picks[w] = Some(i);
                                changed = true;
                            }
                            None => return false,
                        }
                    }
                }
            }
            if !changed {
                match self.narrow(picks) {
                    None => return false,
                    Some(false) => return true,
                    Some(true) => {}
                }
            }
        }
    }

    fn finish(&self, picks: &Picks) -> Option<QuadraticSet> {
        let rows: Vec<Permutation> = (0..self.n)
            .map(|x| Permutation::from_images_unchecked(self.row(picks, x).expect("all rows assigned").to_vec()))
            .collect();
        let q = QuadraticSet::from_left_action(&rows).expect("rows have the right degree");
        let ok = is_square_free_solution(&q);
        debug_assert!(ok, "pruning conditions passed but the braid check failed");
        ok.then_some(q)
    }

    /// Branches on the least unassigned row until `branchings` choices have
    /// been made or every row is assigned.
    fn extend(&self, picks: &Picks, branchings: usize, visit: &mut dyn FnMut(&Picks)) {
        let Some(k) = picks.iter().position(Option::is_none) else {
            visit(picks);
            return;
        };
        if branchings == 0 {
            visit(picks);
            return;
        }
        for i in 0..self.candidates[k].len() {
            let mut next = picks.clone();
            next[k] = Some(i);
            if self.propagate(&mut next) {
                self.extend(&next, branchings - 1, visit);
            }
        }
    }

    fn prefixes(&self) -> Vec<Picks> {
        let mut out = Vec::new();
        self.extend(&vec![None; self.n], PREFIX_DEPTH, &mut |p| out.push(p.clone()));
        out
    }

    fn complete(&self, prefix: &Picks) -> Vec<QuadraticSet> {
        let mut out = Vec::new();
        self.extend(prefix, usize::MAX, &mut |p| out.extend(self.finish(p)));
        out
    }
}

fn check_range(n: usize, opts: &EnumerateOptions) -> Result<(), EnumerateError> {
    let cap = if opts.allow_8 { 8 } else { ENUMERATION_CAP };
    if n < 2 || n > cap {
        return Err(EnumerateError::OutOfRange { n, cap });
    }
    Ok(())
}

fn in_pool<T: Send>(shards: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, EnumerateError> {
    match shards {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| EnumerateError::ThreadPool(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// All square-free solutions on `n` points, sorted by left table; with
/// `up_to_iso`, one canonical representative per class, sorted by table.
pub fn enumerate_square_free(
    n: usize,
    up_to_iso: bool,
    opts: &EnumerateOptions,
) -> Result<Vec<QuadraticSet>, EnumerateError> {
    check_range(n, opts)?;
    in_pool(opts.shards, || {
        let search = Search::new(n);
        let shards: Vec<Vec<QuadraticSet>> =
            search.prefixes().par_iter().map(|prefix| search.complete(prefix)).collect();
        let mut all: Vec<QuadraticSet> = shards.into_iter().flatten().collect();
        all.sort_by(|a, b| a.left_table().cmp(b.left_table()));
        if up_to_iso {
            representatives(&all)
        } else {
            all
        }
    })
}

/// Canonical forms of `sets`, deduplicated and sorted.
fn representatives(sets: &[QuadraticSet]) -> Vec<QuadraticSet> {
    let forms: Vec<QuadraticSet> = sets.par_iter().map(canonical_unbounded).collect();
    let mut unique: BTreeMap<(Vec<usize>, Vec<usize>), QuadraticSet> = BTreeMap::new();
    for q in forms {
        unique.entry((q.left_table().to_vec(), q.right_table().to_vec())).or_insert(q);
    }
    unique.into_values().collect()
}

pub fn count(n: usize, up_to_iso: bool, opts: &EnumerateOptions) -> Result<usize, EnumerateError> {
    Ok(enumerate_square_free(n, up_to_iso, opts)?.len())
}

/// An isomorphism `q1 → q2` as a permutation, for `n ≤` [`ISOMORPHISM_CAP`].
pub fn is_isomorphic(q1: &QuadraticSet, q2: &QuadraticSet) -> Result<Option<Permutation>, EnumerateError> {
    is_isomorphic_with_cap(q1, q2, ISOMORPHISM_CAP)
}

/// As [`is_isomorphic`] with an explicit size bound.
pub fn is_isomorphic_with_cap(
    q1: &QuadraticSet,
    q2: &QuadraticSet,
    cap: usize,
) -> Result<Option<Permutation>, EnumerateError> {
    if q1.n() != q2.n() {
        return Err(EnumerateError::SizeMismatch(q1.n(), q2.n()));
    }
    if q1.n() > cap {
        return Err(EnumerateError::OutOfRange { n: q1.n(), cap });
    }
    if row_profile(q1) != row_profile(q2) {
        return Ok(None);
    }
    Ok(iso::find_isomorphism_extending(q1, q2, &[])
        .map(|images| Permutation::from_images(images).expect("search returns a bijection")))
}

/// Sorted multiset of (fixed points, cycle type) over left rows.
fn row_profile(q: &QuadraticSet) -> Vec<(usize, Vec<usize>)> {
    let mut out: Vec<(usize, Vec<usize>)> = (0..q.n())
        .map(|x| {
            let row = q.left_row(x);
            let fixed = (0..q.n()).filter(|&y| row[y] == y).count();
            let mut seen = vec![false; q.n()];
            let mut lens = Vec::new();
            for s in 0..q.n() {
                let mut len = 0;
                let mut t = s;
                while !seen[t] {
                    seen[t] = true;
                    t = row[t];
                    len += 1;
                }
                if len > 0 {
                    lens.push(len);
                }
            }
            lens.sort_unstable();
            (fixed, lens)
        })
        .collect();
    out.sort();
    out
}

/// Least relabelled table in the isomorphism class, for `n ≤` [`ISOMORPHISM_CAP`].
pub fn canonical_form(q: &QuadraticSet) -> Result<QuadraticSet, EnumerateError> {
    canonical_form_with_cap(q, ISOMORPHISM_CAP)
}

pub fn canonical_form_with_cap(q: &QuadraticSet, cap: usize) -> Result<QuadraticSet, EnumerateError> {
    if q.n() > cap {
        return Err(EnumerateError::OutOfRange { n: q.n(), cap });
    }
    Ok(canonical_unbounded(q))
}

fn canonical_unbounded(q: &QuadraticSet) -> QuadraticSet {
    let perm = Permutation::from_images(iso::canonical_labelling(q)).expect("labelling is a bijection");
    q.relabel(&perm)
}

/// Least `n` in `2..=max_n` with a square-free solution of level `target`
/// (`1` for level 0).
pub fn min_order_scan(target: usize, max_n: usize, opts: &EnumerateOptions) -> Result<Option<usize>, EnumerateError> {
    if target == 0 {
        return Ok((max_n >= 1).then_some(1));
    }
    for n in 2..=max_n {
        let found = enumerate_square_free(n, false, opts)?
            .par_iter()
            .any(|q| mpl_unchecked(q).ok().flatten() == Some(target));
        if found {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub n: usize,
    /// Labelled solutions.
    pub count: usize,
    pub iso_classes: usize,
    pub by_mpl: BTreeMap<usize, usize>,
    pub by_group_order: BTreeMap<u64, usize>,
    pub abelian: usize,
    pub irretractable: usize,
    /// Left tables of irretractable solutions, if any were found.
    pub irretractable_examples: Vec<Vec<usize>>,
}

/// One row per order `2..=max_n`.
pub fn census(max_n: usize, opts: &EnumerateOptions) -> Result<Vec<CensusRow>, EnumerateError> {
    let cap = if opts.allow_8 { 8 } else { ENUMERATION_CAP };
    if max_n > cap {
        return Err(EnumerateError::OutOfRange { n: max_n, cap });
    }
    (2..=max_n).map(|n| census_row(n, opts)).collect()
}

fn census_row(n: usize, opts: &EnumerateOptions) -> Result<CensusRow, EnumerateError> {
    let sets = enumerate_square_free(n, false, opts)?;
    let stats: Vec<(Option<usize>, u64, bool)> = in_pool(opts.shards, || {
        sets.par_iter()
            .map(|q| {
                let g = yb_group(q).expect("solutions are nondegenerate");
                let order = u64::try_from(g.order()).expect("order fits u64 at these sizes");
                (mpl_unchecked(q).expect("solutions retract consistently"), order, g.is_abelian())
            })
            .collect()
    })?;
    let mut row = CensusRow {
        n,
        count: sets.len(),
        iso_classes: in_pool(opts.shards, || representatives(&sets).len())?,
        by_mpl: BTreeMap::new(),
        by_group_order: BTreeMap::new(),
        abelian: 0,
        irretractable: 0,
        irretractable_examples: Vec::new(),
    };
    for (q, (level, order, abelian)) in sets.iter().zip(stats) {
        match level {
            Some(m) => *row.by_mpl.entry(m).or_default() += 1,
            None => {
                row.irretractable += 1;
                row.irretractable_examples.push(q.left_table().to_vec());
            }
        }
        *row.by_group_order.entry(order).or_default() += 1;
        row.abelian += usize::from(abelian);
    }
    Ok(row)
}

fn join_counts<K: std::fmt::Display>(m: &BTreeMap<K, usize>) -> String {
    if m.is_empty() {
        return "-".into();
    }
    m.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",")
}

/// Tab-separated census with a header line.
pub fn census_tsv(rows: &[CensusRow]) -> String {
    let mut out = String::from("n\tcount\tiso_classes\tby_mpl\tby_group_order\tabelian\tirretractable\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.n,
            r.count,
            r.iso_classes,
            join_counts(&r.by_mpl),
            join_counts(&r.by_group_order),
            r.abelian,
            r.irretractable
        ));
    }
    out
}

/// Every left table with `ℒ_x(x) = x`, right action `xʸ = ℒ_{ˣy}⁻¹(x)`, kept
/// when the right translations are bijective too. These are the nondegenerate
/// involutive square-free quadratic sets with bijective left rows; no braid
/// filtering is applied.
pub fn enumerate_involutive_candidates(n: usize) -> Result<Vec<QuadraticSet>, EnumerateError> {
    if !(2..=CANDIDATE_CAP).contains(&n) {
        return Err(EnumerateError::OutOfRange { n, cap: CANDIDATE_CAP });
    }
    let cands: Vec<Vec<Permutation>> = (0..n)
        .map(|x| row_candidates(n, x).into_iter().map(|(p, _)| Permutation::from_images_unchecked(p)).collect())
        .collect();
    let total: usize = cands.iter().map(Vec::len).product();
    let sets = (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut rows = Vec::with_capacity(n);
            for c in cands.iter().rev() {
                rows.push(c[code % c.len()].clone());
                code /= c.len();
            }
            rows.reverse();
            let q = QuadraticSet::from_left_action_involutive(&rows).expect("rows have degree n");
            right_nondegenerate(&q).then_some(q)
        })
        .collect();
    Ok(sets)
}

fn right_nondegenerate(q: &QuadraticSet) -> bool {
    let n = q.n();
    (0..n).all(|x| {
        let mut seen = vec![false; n];
        (0..n).all(|y| !std::mem::replace(&mut seen[q.right(y, x)], true))
    })
}
