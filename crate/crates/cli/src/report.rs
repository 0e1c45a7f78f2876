//! Analysis reports: property flags, orbits, retraction level, group data.

use std::fmt::Write as _;

use serde::Serialize;
use ybs_core::group::{abelian_invariants, orbits, solvable_length, yb_group};
use ybs_core::qset::Property;
use ybs_core::retract::{retract_class_decomposition, retract_tower, TowerStatus};
use ybs_core::{classify, PropertyFlags, QuadraticSet};

/// Version tag of the JSON layout; bump on any incompatible change.
pub const REPORT_SCHEMA: &str = "ybs-report/1";

/// Default bound on |𝒢| for computations that list group elements.
pub const DEFAULT_MAX_GROUP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum MplStatus {
    Finite { level: usize },
    /// The retract tower stops shrinking at `Ret^level`, above one element.
    Irretractable { level: usize },
    /// Not a symmetric set, so retraction is undefined.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    /// Decimal, since orders overflow 64 bits quickly.
    pub order: String,
    pub abelian: bool,
    /// Invariant factors; `None` when 𝒢 is not abelian or larger than the bound.
    pub abelian_invariants: Option<Vec<u64>>,
    /// Derived length of 𝒢; `None` when not solvable.
    pub solvable_length: Option<usize>,
    /// Derived length of the structure group G(X, r) = sol(𝒢) + 1, for square-free solutions.
    pub structure_group_solvable_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetractClassSummary {
    pub members: Vec<String>,
    pub g_invariant: bool,
    pub union_of_orbits: bool,
    pub restricted_mpl: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub schema: &'static str,
    pub n: usize,
    pub labels: Vec<String>,
    /// Right action derived from the left rows rather than given.
    pub right_derived: bool,
    pub square_free_solution: bool,
    pub flags: PropertyFlags,
    pub orbits: Vec<Vec<String>>,
    pub mpl: MplStatus,
    /// `None` when some ℒ_x is not a bijection.
    pub group: Option<GroupSummary>,
    /// Fibres of `X → Ret^{m−1}` for finite `mpl = m`.
    pub retract_classes: Option<Vec<RetractClassSummary>>,
}

fn names(labels: &[String], xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| labels[x].clone()).collect()
}

pub fn analyze(q: &QuadraticSet, max_group: usize) -> SolutionReport {
    let labels = q.labels();
    let flags = classify(q);
    let square_free_solution = flags.is_square_free_solution();

    let mpl = match retract_tower(q, q.n()) {
        Ok(t) => match t.status {
            TowerStatus::TerminatedAt(m) => MplStatus::Finite { level: m },
            TowerStatus::StabilizedAt(k) => MplStatus::Irretractable { level: k },
            TowerStatus::BudgetExhausted => unreachable!("a tower of n levels always terminates or stabilizes"),
        },
        Err(_) => MplStatus::Undefined,
    };

    let group = yb_group(q).ok();
    let orbit_list = match &group {
        Some(g) => orbits(g).orbits,
        None => (0..q.n()).map(|x| vec![x]).collect(),
    };
    let group = group.map(|g| {
        let order = g.order();
        let abelian = g.is_abelian();
        // fails when |𝒢| exceeds the bound
        let abelian_invariants = abelian.then(|| abelian_invariants(&g, max_group).ok()).flatten();
        let solvable_length = solvable_length(&g);
        let structure_group_solvable_length = solvable_length.filter(|_| square_free_solution).map(|s| s + 1);
        GroupSummary {
            order: order.to_string(),
            abelian,
            abelian_invariants,
            solvable_length,
            structure_group_solvable_length,
        }
    });

    let retract_classes = match mpl {
        MplStatus::Finite { level } if level >= 1 => retract_class_decomposition(q).ok().map(|d| {
            d.classes
                .into_iter()
                .map(|c| RetractClassSummary {
                    members: names(&labels, &c.members),
                    g_invariant: c.g_invariant,
                    union_of_orbits: c.union_of_orbits,
                    restricted_mpl: c.restricted_mpl,
                })
                .collect()
        }),
        _ => None,
    };

    SolutionReport {
        schema: REPORT_SCHEMA,
        n: q.n(),
        right_derived: q.lri_derived(),
        square_free_solution,
        flags,
        orbits: orbit_list.iter().map(|o| names(&labels, o)).collect(),
        mpl,
        group,
        retract_classes,
        labels,
    }
}

impl SolutionReport {
    /// Cross-checks between fields that must agree for any input.
    pub fn inconsistencies(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (MplStatus::Finite { level }, Some(g)) = (&self.mpl, &self.group) {
            if *level <= 1 && g.order != "1" {
                out.push(format!("mpl {level} but group order {}", g.order));
            }
            if self.square_free_solution && *level >= 1 {
                if let Some(s) = g.solvable_length {
                    if s + 1 > *level {
                        out.push(format!("sol {s} exceeds mpl {level} minus one"));
                    }
                }
            }
        }
        if let Some(g) = &self.group {
            if g.abelian != g.solvable_length.is_some_and(|s| s <= 1) {
                out.push(format!("abelian = {} but solvable length {:?}", g.abelian, g.solvable_length));
            }
            if let Some(inv) = &g.abelian_invariants {
                let product: u128 = inv.iter().map(|&d| d as u128).product();
                if product.to_string() != g.order {
                    out.push(format!("invariants {inv:?} do not multiply to {}", g.order));
                }
            }
        }
        if self.square_free_solution && self.group.as_ref().and_then(|g| g.structure_group_solvable_length).is_none() {
            out.push("square-free solution without a structure group length".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable form; line order is fixed.
    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        writeln!(s, "n: {}", self.n).unwrap();
        if self.right_derived {
            writeln!(s, "right action: derived from the left rows").unwrap();
        }
        writeln!(s, "square-free solution: {}", yes(self.square_free_solution)).unwrap();
        s.push_str(&flag_lines(&self.flags, &self.labels));
        let orbits: Vec<String> = self.orbits.iter().map(|o| format!("{{{}}}", o.join(" "))).collect();
        writeln!(s, "orbits: {} {}", self.orbits.len(), orbits.join(" ")).unwrap();
        match &self.mpl {
            MplStatus::Finite { level } => writeln!(s, "mpl: {level}").unwrap(),
            MplStatus::Irretractable { level } => writeln!(s, "mpl: irretractable at level {level}").unwrap(),
            MplStatus::Undefined => writeln!(s, "mpl: undefined (not a symmetric set)").unwrap(),
        }
        match &self.group {
            Some(g) => {
                writeln!(s, "group order: {}", g.order).unwrap();
                writeln!(s, "group abelian: {}", yes(g.abelian)).unwrap();
                if let Some(inv) = &g.abelian_invariants {
                    let parts: Vec<String> = inv.iter().map(u64::to_string).collect();
                    writeln!(s, "abelian invariants: [{}]", parts.join(", ")).unwrap();
                }
                match g.solvable_length {
                    Some(k) => writeln!(s, "sol(group): {k}").unwrap(),
                    None => writeln!(s, "sol(group): not solvable").unwrap(),
                }
                if let Some(k) = g.structure_group_solvable_length {
                    writeln!(s, "sol(G): {k}").unwrap();
                }
            }
            None => writeln!(s, "group: undefined (degenerate left action)").unwrap(),
        }
        if let Some(classes) = &self.retract_classes {
            writeln!(s, "retract classes: {}", classes.len()).unwrap();
            for c in classes {
                let mpl = c.restricted_mpl.map_or("-".to_string(), |m| m.to_string());
                writeln!(
                    s,
                    "  {{{}}} invariant={} union_of_orbits={} mpl={}",
                    c.members.join(" "),
                    yes(c.g_invariant),
                    yes(c.union_of_orbits),
                    mpl
                )
                .unwrap();
            }
        }
        s
    }
}

/// One line per property, failures followed by their least witness tuple.
pub fn flag_lines(flags: &PropertyFlags, labels: &[String]) -> String {
    let mut s = String::new();
    for p in Property::ALL {
        let ok = flags.get(p);
        write!(s, "{}: {}", p.name(), if ok { "yes" } else { "no" }).unwrap();
        if let Some(w) = flags.witnesses.get(&p) {
            write!(s, " (witness {})", names(labels, w).join(" ")).unwrap();
        }
        s.push('\n');
    }
    s
}
