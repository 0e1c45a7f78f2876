//! Colour refinement and individualization search shared by the isomorphism,
//! canonical-form and automorphism routines.

use crate::qset::QuadraticSet;

type Colors = Vec<u32>;

/// Refines `colors` until stable. Each round colours `x` by its old colour and
/// the multiset of colour tuples `(y, ˣy, ʸx, xʸ, yˣ)`; new colours are ranks
/// of the sorted distinct signatures, so the result is relabelling-invariant.
pub(crate) fn refine(q: &QuadraticSet, colors: &mut Colors) {
    let n = q.n();
    let mut classes = count_classes(colors);
    loop {
        let mut sigs: Vec<(u32, Vec<[u32; 5]>, usize)> = (0..n)
            .map(|x| {
                let mut v: Vec<[u32; 5]> = (0..n)
                    .map(|y| {
                        [
                            colors[y],
                            colors[q.left(x, y)],
                            colors[q.left(y, x)],
                            colors[q.right(x, y)],
                            colors[q.right(y, x)],
                        ]
                    })
                    .collect();
                v.sort_unstable();
                (colors[x], v, x)
            })
            .collect();
        sigs.sort_unstable();
        let mut rank = 0u32;
        for i in 0..n {
            if i > 0 && (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                rank += 1;
            }
            colors[sigs[i].2] = rank;
        }
        let now = rank as usize + 1;
        if now == classes {
            return;
        }
        classes = now;
    }
}

fn count_classes(colors: &Colors) -> usize {
    let mut c = colors.clone();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn histogram(colors: &Colors) -> Vec<u32> {
    let mut c = colors.clone();
    c.sort_unstable();
    c
}

/// Gives `x` a colour of its own; the value is fixed so two structures
/// individualized in step stay comparable.
fn individualize(colors: &mut Colors, x: usize, depth: usize) {
    colors[x] = u32::MAX - depth as u32;
}

/// The cell to branch on: smallest non-singleton class, ties to the smaller colour.
fn target_cell(colors: &Colors) -> Option<u32> {
    let mut counts: std::collections::BTreeMap<u32, usize> = std::collections::BTreeMap::new();
    for &c in colors {
        *counts.entry(c).or_default() += 1;
    }
    counts.into_iter().filter(|&(_, k)| k > 1).min_by_key(|&(c, k)| (k, c)).map(|(c, _)| c)
}

fn is_isomorphism(a: &QuadraticSet, b: &QuadraticSet, phi: &[usize]) -> bool {
    let n = a.n();
    (0..n).all(|x| {
        (0..n).all(|y| {
            phi[a.left(x, y)] == b.left(phi[x], phi[y]) && phi[a.right(x, y)] == b.right(phi[x], phi[y])
        })
    })
}

fn search(a: &QuadraticSet, b: &QuadraticSet, ca: Colors, cb: Colors, depth: usize) -> Option<Vec<usize>> {
    let Some(cell) = target_cell(&ca) else {
        let n = a.n();
        let mut pos = vec![0; n];
        for (y, &c) in cb.iter().enumerate() {
            pos[c as usize] = y;
        }
        let phi: Vec<usize> = (0..n).map(|x| pos[ca[x] as usize]).collect();
        return is_isomorphism(a, b, &phi).then_some(phi);
    };
    let x = ca.iter().position(|&c| c == cell).unwrap();
    for y in (0..b.n()).filter(|&y| cb[y] == cell) {
        let (mut na, mut nb) = (ca.clone(), cb.clone());
        individualize(&mut na, x, depth);
        individualize(&mut nb, y, depth);
        refine(a, &mut na);
        refine(b, &mut nb);
        if histogram(&na) != histogram(&nb) {
            continue;
        }
        if let Some(phi) = search(a, b, na, nb, depth + 1) {
            return Some(phi);
        }
    }
    None
}

/// An isomorphism `φ: a → b` with `φ(x) = y` for each given pair, as an image table.
pub(crate) fn find_isomorphism_extending(a: &QuadraticSet, b: &QuadraticSet, fixed: &[(usize, usize)]) -> Option<Vec<usize>> {
    if a.n() != b.n() {
        return None;
    }
    let n = a.n();
    let (mut ca, mut cb) = (vec![0; n], vec![0; n]);
    for (depth, &(x, y)) in fixed.iter().enumerate() {
        individualize(&mut ca, x, depth);
        individualize(&mut cb, y, depth);
    }
    refine(a, &mut ca);
    refine(b, &mut cb);
    if histogram(&ca) != histogram(&cb) {
        return None;
    }
    search(a, b, ca, cb, fixed.len())
}

/// Least relabelled `(left, right)` tables over all leaves of the search tree.
pub(crate) fn canonical_labelling(q: &QuadraticSet) -> Vec<usize> {
    let n = q.n();
    let mut colors = vec![0; n];
    refine(q, &mut colors);
    let mut best: Option<(Vec<usize>, Vec<usize>, Vec<usize>)> = None;
    leaves(q, colors, 0, &mut best);
    best.expect("search tree has a leaf").2
}

fn leaves(q: &QuadraticSet, colors: Colors, depth: usize, best: &mut Option<(Vec<usize>, Vec<usize>, Vec<usize>)>) {
    let Some(cell) = target_cell(&colors) else {
        let n = q.n();
        let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let mut inv = vec![0; n];
        for (x, &p) in perm.iter().enumerate() {
            inv[p] = x;
        }
        let mut left = Vec::with_capacity(n * n);
        let mut right = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                left.push(perm[q.left(inv[i], inv[j])]);
                right.push(perm[q.right(inv[i], inv[j])]);
            }
        }
        let better = match best {
            Some((l, r, _)) => (&left, &right) < (l, r),
            None => true,
        };
        if better {
            *best = Some((left, right, perm));
        }
        return;
    };
    for x in (0..q.n()).filter(|&x| colors[x] == cell) {
        let mut next = colors.clone();
        individualize(&mut next, x, depth);
        refine(q, &mut next);
        leaves(q, next, depth + 1, best);
    }
}
