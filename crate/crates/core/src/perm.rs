//! Permutations of `{0..n-1}`.
//!
//! Composition follows the functional convention: `p.compose(&q)` maps `i`
//! to `p(q(i))`. Text surfaces are 1-based with labels `x1..xn`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("images do not form a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("shifted support exceeds degree {0}")]
    SupportOverflow(usize),
    #[error("vee needs two disjoint single cycles of equal length")]
    NotVeeCompatible,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("point `{0}` repeated")]
    RepeatedPoint(String),
    #[error("malformed cycle notation at byte {0}")]
    Malformed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(PermError::NotBijection(n));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from disjoint cycles of 0-based points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= n {
                    return Err(PermError::UnknownLabel(format!("{}", p + 1)));
                }
                if used[p] {
                    return Err(PermError::RepeatedPoint(format!("x{}", p + 1)));
                }
                used[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn compose(&self, q: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != q.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), q.degree()));
        }
        Ok(Permutation { images: q.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Moved points in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.images[i] != i).collect()
    }

    /// Nontrivial cycles, each starting at its least point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }

    pub fn order(&self) -> BigUint {
        self.cycles().iter().fold(BigUint::one(), |acc, c| {
            let len = BigUint::from(c.len());
            let g = gcd(&acc, &len);
            acc * len / g
        })
    }

    /// `p^k` for small non-negative `k`.
    pub fn pow(&self, k: usize) -> Permutation {
        let mut out = Permutation::identity(self.degree());
        for _ in 0..k {
            out = self * &out;
        }
        out
    }

    /// ρ[N]: every point `i` becomes `i + shift`, on a permutation of degree `new_degree`.
    pub fn shift(&self, shift: usize, new_degree: usize) -> Result<Permutation, PermError> {
        let mut images: Vec<usize> = (0..new_degree).collect();
        for i in self.support() {
            let (a, b) = (i + shift, self.images[i] + shift);
            if a >= new_degree || b >= new_degree {
                return Err(PermError::SupportOverflow(new_degree));
            }
            images[a] = b;
        }
        Ok(Permutation { images })
    }

    /// Interleaves two disjoint k-cycles: `(r1 s1 r2 s2 ...)`, where `s1` is the
    /// least point of `sigma` and `r1` the least point of `rho`.
    pub fn vee(rho: &Permutation, sigma: &Permutation) -> Result<Permutation, PermError> {
        if rho.degree() != sigma.degree() {
            return Err(PermError::DegreeMismatch(rho.degree(), sigma.degree()));
        }
        let (rc, sc) = (rho.cycles(), sigma.cycles());
        if rc.len() != 1 || sc.len() != 1 || rc[0].len() != sc[0].len() {
            return Err(PermError::NotVeeCompatible);
        }
        let (r, s) = (&rc[0], &sc[0]);
        if r.iter().any(|p| s.contains(p)) {
            return Err(PermError::NotVeeCompatible);
        }
        let joined: Vec<usize> = r.iter().zip(s).flat_map(|(&a, &b)| [a, b]).collect();
        Permutation::from_cycles(rho.degree(), &[joined])
    }

    /// Cycle notation with default labels `x1..xn`; the identity prints as `()`.
    pub fn format_cycles(&self) -> String {
        let labels = default_labels(self.degree());
        self.format_cycles_with(&labels)
    }

    pub fn format_cycles_with(&self, labels: &[String]) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut out = String::new();
        for c in cycles {
            out.push('(');
            let names: Vec<&str> = c.iter().map(|&p| labels[p].as_str()).collect();
            out.push_str(&names.join(" "));
            out.push(')');
        }
        out
    }

    /// Parses a product of disjoint cycles over `x1..xn` or 1-based integers.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
        Self::parse_cycles_with(text, &default_labels(degree))
    }

    /// As [`Permutation::parse_cycles`], also accepting the given labels.
    pub fn parse_cycles_with(text: &str, labels: &[String]) -> Result<Permutation, PermError> {
        let degree = labels.len();
        let resolve = |tok: &str| -> Result<usize, PermError> {
            if let Some(i) = labels.iter().position(|l| l == tok) {
                return Ok(i);
            }
            let digits = tok.strip_prefix('x').unwrap_or(tok);
            match digits.parse::<usize>() {
                Ok(k) if k >= 1 && k <= degree => Ok(k - 1),
                _ => Err(PermError::UnknownLabel(tok.to_string())),
            }
        };
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut current: Option<Vec<usize>> = None;
        let mut token = String::new();
        let mut token_start = 0;
        let flush = |token: &mut String, current: &mut Option<Vec<usize>>, at: usize| -> Result<(), PermError> {
            if token.is_empty() {
                return Ok(());
            }
            let cur = current.as_mut().ok_or(PermError::Malformed(at))?;
            cur.push(resolve(token)?);
            token.clear();
            Ok(())
        };
        for (pos, ch) in text.char_indices() {
            match ch {
                '(' => {
                    if current.is_some() || !token.is_empty() {
                        return Err(PermError::Malformed(pos));
                    }
                    current = Some(Vec::new());
                }
                ')' => {
                    flush(&mut token, &mut current, token_start)?;
                    let c = current.take().ok_or(PermError::Malformed(pos))?;
                    if c.len() > 1 {
                        cycles.push(c);
                    }
                }
                c if c.is_whitespace() || c == ',' => flush(&mut token, &mut current, token_start)?,
                c => {
                    if token.is_empty() {
                        token_start = pos;
                    }
                    token.push(c);
                }
            }
        }
        if current.is_some() || !token.is_empty() {
            return Err(PermError::Malformed(text.len()));
        }
        Permutation::from_cycles(degree, &cycles).map_err(|e| match e {
            PermError::RepeatedPoint(_) => {
                let mut seen = vec![false; degree];
                let dup = cycles.iter().flatten().find(|&&p| std::mem::replace(&mut seen[p], true));
                PermError::RepeatedPoint(dup.map(|&p| labels[p].clone()).unwrap_or_default())
            }
            other => other,
        })
    }
}

impl Mul<&Permutation> for &Permutation {
    type Output = Permutation;

    /// `p * q` is `p ∘ q`. Panics on degree mismatch; use `compose` for a checked version.
    fn mul(self, q: &Permutation) -> Permutation {
        assert_eq!(self.degree(), q.degree(), "degree mismatch in permutation product");
        Permutation { images: q.images.iter().map(|&i| self.images[i]).collect() }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != BigUint::from(0u8) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}
