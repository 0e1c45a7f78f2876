//! Graphviz export of the action graph: an arrow `x → ᵃx` labelled `a`.

use thiserror::Error;
use ybs_core::QuadraticSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("the right action is not the inverse of the left action (lri fails), so the graph is undefined")]
    NotLri,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Nodes in index order, then edges by source and actor. Self-loops only
/// with `include_loops`.
pub fn export_dot(q: &QuadraticSet, include_loops: bool) -> Result<String, DotError> {
    if !q.right_is_lri_of_left() {
        return Err(DotError::NotLri);
    }
    let labels = q.labels();
    let mut out = String::from("digraph ybs {\n");
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&format!("  n{i} [label={}];\n", quote(l)));
    }
    for x in 0..q.n() {
        for a in 0..q.n() {
            let y = q.left(a, x);
            if y != x || include_loops {
                out.push_str(&format!("  n{x} -> n{y} [label={}];\n", quote(&labels[a])));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Connected components of the loopless action graph, ordered by least member.
pub fn components(q: &QuadraticSet) -> Vec<Vec<usize>> {
    let n = q.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..n {
        for x in 0..n {
            let (u, v) = (find(&mut parent, x), find(&mut parent, q.left(a, x)));
            if u != v {
                parent[u.max(v)] = u.min(v);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for x in 0..n {
        let root = find(&mut parent, x);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ybs_core::construct::{gap_example, jump_example, three_element, trivial_solution};
    use ybs_core::group::{orbits, yb_group};

    #[test]
    fn trivial_has_no_edges() {
        let dot = export_dot(&trivial_solution(3).unwrap(), false).unwrap();
        assert!(!dot.contains("->"));
        let with_loops = export_dot(&trivial_solution(3).unwrap(), true).unwrap();
        assert_eq!(with_loops.matches("->").count(), 9);
    }

    #[test]
    fn three_element_edges() {
        let dot = export_dot(&three_element(), false).unwrap();
        let expected = "digraph ybs {\n  n0 [label=\"x1\"];\n  n1 [label=\"x2\"];\n  n2 [label=\"x3\"];\n  \
                        n0 -> n1 [label=\"x3\"];\n  n1 -> n0 [label=\"x3\"];\n}\n";
        assert_eq!(dot, expected);
    }

    #[test]
    fn labels_are_escaped() {
        let q = trivial_solution(2).unwrap().with_labels(vec!["a\"b".into(), "c\\d".into()]).unwrap();
        let dot = export_dot(&q, false).unwrap();
        assert!(dot.contains(r#"[label="a\"b"]"#));
        assert!(dot.contains(r#"[label="c\\d"]"#));
    }

    #[test]
    fn rejects_non_lri() {
        let n = 2;
        let q = QuadraticSet::from_tables(n, vec![0, 1, 0, 1], vec![1, 1, 0, 0]).unwrap();
        assert_eq!(export_dot(&q, false), Err(DotError::NotLri));
    }

    #[test]
    fn components_are_orbits() {
        for q in [trivial_solution(4).unwrap(), three_element(), gap_example(), jump_example()] {
            let g = yb_group(&q).unwrap();
            assert_eq!(components(&q), orbits(&g).orbits);
        }
    }
}
