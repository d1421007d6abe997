//! The weighted digraph of a CNF formula whose long negative cycles
//! correspond to satisfying choices.
//!
//! For every literal occurrence `ℓ` (literal `ℓ` in clause `j`) there are two
//! three-arc paths, `p → a → b → q` with weights `1/2, -1/2, 0` and
//! `r → b' → a' → s` with weights `0, -1/2, 1/2`. The first paths of all
//! positive occurrences of `x_i` form a chain from `v_{i-1}` to `v_i`, as do
//! those of the negative occurrences; the second paths of clause `j` run in
//! parallel from `v'_{j-1}` to `v'_j` (with `v'_0 = v_n`). A marked arc
//! `v'_m → v_0` of weight `-1` closes the spine, and finally `a` is merged
//! with `a'` and `b` with `b'` for every occurrence.

use serde::Serialize;

use crate::cnf::CnfFormula;
use crate::digraph::{enumerate_cycles, Cycle, WeightedDigraph};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// One literal occurrence and the two arcs that form its short cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    /// 0-based clause index.
    pub clause: usize,
    pub literal: i32,
    /// Arc `a → b`.
    pub ab_arc: usize,
    /// Arc `b' → a'`.
    pub ba_arc: usize,
}

/// A formula's graph before and after merging `a`/`a'` and `b`/`b'`. Arc
/// ids agree between the two.
#[derive(Clone, Debug)]
pub struct PhiGraph {
    pub graph: WeightedDigraph,
    pub unmerged: WeightedDigraph,
    /// `v_0, …, v_n, v'_1, …, v'_m` as node ids of `graph`.
    pub spine: Vec<usize>,
    pub occurrences: Vec<Occurrence>,
    pub marked_arc: usize,
}

fn occurrence_name(literal: i32, clause: usize) -> String {
    let var = literal.unsigned_abs();
    if literal > 0 {
        format!("x{var}@C{}", clause + 1)
    } else {
        format!("~x{var}@C{}", clause + 1)
    }
}

/// Builds the graph of `phi`. Every variable must occur both positively and
/// negatively; otherwise its chain would be empty.
pub fn build_phi_graph(phi: &CnfFormula) -> Result<PhiGraph> {
    let n = phi.num_vars();
    let m = phi.num_clauses();
    if m == 0 {
        return Err(Error::ConstructionUndefined("formula has no clauses".into()));
    }
    // occurrences per (variable, polarity), in clause order
    let mut by_literal: Vec<[Vec<(usize, usize)>; 2]> = vec![[Vec::new(), Vec::new()]; n + 1];
    for (j, clause) in phi.clauses().iter().enumerate() {
        for (pos, &lit) in clause.iter().enumerate() {
            by_literal[lit.unsigned_abs() as usize][usize::from(lit < 0)].push((j, pos));
        }
    }
    for (i, lists) in by_literal.iter().enumerate().skip(1) {
        if lists[0].is_empty() || lists[1].is_empty() {
            let missing = if lists[0].is_empty() { "positively" } else { "negatively" };
            return Err(Error::ConstructionUndefined(format!("variable x{i} never occurs {missing}")));
        }
    }

    let half = Rational::frac(1, 2);
    let neg_half = Rational::frac(-1, 2);
    let mut g = WeightedDigraph::with_nodes(0);
    let v: Vec<usize> = (0..=n).map(|i| g.add_node(format!("v{i}"))).collect();
    let mut v_prime = vec![v[n]];
    v_prime.extend((1..=m).map(|j| g.add_node(format!("v'{j}"))));

    // node ids of a, b, a', b' and the two short-cycle arcs, per (clause, position)
    let mut slots: Vec<Vec<Option<[usize; 6]>>> = phi.clauses().iter().map(|c| vec![None; c.len()]).collect();

    for i in 1..=n {
        for list in &by_literal[i] {
            let mut cur = v[i - 1];
            for (t, &(j, pos)) in list.iter().enumerate() {
                let name = occurrence_name(phi.clauses()[j][pos], j);
                g.add_label(cur, format!("p[{name}]"));
                let a = g.add_node(format!("a[{name}]"));
                let b = g.add_node(format!("b[{name}]"));
                let next = if t + 1 == list.len() { v[i] } else { g.add_node(format!("q[{name}]")) };
                if t + 1 == list.len() {
                    g.add_label(next, format!("q[{name}]"));
                }
                g.add_arc(cur, a, half.clone())?;
                let ab = g.add_arc(a, b, neg_half.clone())?;
                g.add_arc(b, next, Rational::zero())?;
                slots[j][pos] = Some([a, b, 0, 0, ab, 0]);
                cur = next;
            }
        }
    }
    for (j, (clause, row)) in phi.clauses().iter().zip(slots.iter_mut()).enumerate() {
        let (r, s) = (v_prime[j], v_prime[j + 1]);
        for (&lit, slot) in clause.iter().zip(row.iter_mut()) {
            let name = occurrence_name(lit, j);
            g.add_label(r, format!("r[{name}]"));
            g.add_label(s, format!("s[{name}]"));
            let b2 = g.add_node(format!("b'[{name}]"));
            let a2 = g.add_node(format!("a'[{name}]"));
            g.add_arc(r, b2, Rational::zero())?;
            let ba = g.add_arc(b2, a2, neg_half.clone())?;
            g.add_arc(a2, s, half.clone())?;
            let slot = slot.as_mut().expect("every occurrence has a chain path");
            slot[2] = a2;
            slot[3] = b2;
            slot[5] = ba;
        }
    }
    let marked = g.add_arc(v_prime[m], v[0], Rational::from(-1))?;
    g.set_marked_arc(marked)?;

    let mut classes = Vec::new();
    let mut occurrences = Vec::new();
    for (j, row) in slots.iter().enumerate() {
        for (pos, slot) in row.iter().enumerate() {
            let [a, b, a2, b2, ab, ba] = slot.expect("filled above");
            classes.push(vec![a, a2]);
            classes.push(vec![b, b2]);
            occurrences.push(Occurrence {
                clause: j,
                literal: phi.clauses()[j][pos],
                ab_arc: ab,
                ba_arc: ba,
            });
        }
    }
    let graph = g.identify(&classes)?;
    let spine = v
        .iter()
        .chain(&v_prime[1..])
        .map(|&node| {
            let label = g.labels(node)[0].clone();
            graph.find_node(&label).expect("spine nodes survive merging")
        })
        .collect();
    Ok(PhiGraph {
        graph,
        unmerged: g,
        spine,
        occurrences,
        marked_arc: marked,
    })
}

/// Negative cycles of a formula graph, split by whether they use the marked
/// arc.
#[derive(Clone, Debug, Default, Serialize)]
pub struct NegativeCycles {
    pub short: Vec<Cycle>,
    pub long: Vec<Cycle>,
}

/// Enumerates the cycles of `pg.graph` and sorts the negative ones into
/// short and long. Checks along the way that every negative cycle has weight
/// `-1`, that the short ones are exactly the two-arc cycles `a → b → a` of
/// the occurrences, and that every long one passes through all spine nodes;
/// a failed check is reported as [`Error::InvariantViolation`].
pub fn classify_negative(pg: &PhiGraph, cap: usize) -> Result<NegativeCycles> {
    let g = &pg.graph;
    let minus_one = Rational::from(-1);
    let mut out = NegativeCycles::default();
    for c in enumerate_cycles(g, cap)? {
        if !c.weight.is_negative() {
            continue;
        }
        if c.weight != minus_one {
            return Err(Error::InvariantViolation(format!(
                "negative cycle {:?} has weight {}",
                c.arcs, c.weight
            )));
        }
        if c.contains_arc(pg.marked_arc) {
            let nodes = c.nodes(g);
            if let Some(missing) = pg.spine.iter().find(|s| !nodes.contains(s)) {
                return Err(Error::InvariantViolation(format!(
                    "long cycle {:?} misses spine node {}",
                    c.arcs,
                    g.labels(*missing)[0]
                )));
            }
            out.long.push(c);
        } else {
            let mut arcs = c.arcs.clone();
            arcs.sort_unstable();
            let is_short = pg.occurrences.iter().any(|o| {
                let mut pair = [o.ab_arc, o.ba_arc];
                pair.sort_unstable();
                arcs == pair
            });
            if !is_short {
                return Err(Error::InvariantViolation(format!(
                    "negative cycle {:?} avoids the marked arc but is not an occurrence cycle",
                    c.arcs
                )));
            }
            out.short.push(c);
        }
    }
    if out.short.len() != pg.occurrences.len() {
        return Err(Error::InvariantViolation(format!(
            "found {} short cycles for {} literal occurrences",
            out.short.len(),
            pg.occurrences.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{brute_force_sat, parse_dimacs};
    use crate::digraph::DEFAULT_CYCLE_CAP;

    const SAMPLE: &str = "p cnf 3 3\n1 2 -3 0\n1 -2 3 0\n-1 2 -3 0\n";

    fn unsat() -> CnfFormula {
        CnfFormula::new(2, vec![vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2]]).unwrap()
    }

    #[test]
    fn sizes_match_counting_formulas() {
        let phi = parse_dimacs(SAMPLE).unwrap();
        let pg = build_phi_graph(&phi).unwrap();
        assert_eq!(pg.unmerged.node_count(), 46);
        assert_eq!(pg.unmerged.arc_count(), 55);
        assert_eq!(pg.graph.node_count(), 28);
        assert_eq!(pg.graph.arc_count(), 55);
        assert_eq!(pg.marked_arc, 54);
        assert_eq!(pg.graph.arc(54).weight, Rational::from(-1));
        assert_eq!(pg.graph.arc(54).tail, pg.spine[6]);
        assert_eq!(pg.graph.arc(54).head, pg.spine[0]);

        let phi = CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, -2, -3]]).unwrap();
        let pg = build_phi_graph(&phi).unwrap();
        assert_eq!(pg.unmerged.node_count(), 30);
        assert_eq!(pg.unmerged.arc_count(), 37);
    }

    #[test]
    fn path_weights() {
        let phi = CnfFormula::new(1, vec![vec![1, -1]]).unwrap();
        let pg = build_phi_graph(&phi).unwrap();
        let g = &pg.unmerged;
        let w: Vec<Rational> = g.arcs().iter().map(|a| a.weight.clone()).collect();
        let h = Rational::frac(1, 2);
        let z = Rational::zero();
        // x1 chain, ~x1 chain, then the clause paths for x1 and ~x1, then the marked arc
        assert_eq!(
            w,
            vec![
                h.clone(), -h.clone(), z.clone(),
                h.clone(), -h.clone(), z.clone(),
                z.clone(), -h.clone(), h.clone(),
                z.clone(), -h.clone(), h.clone(),
                Rational::from(-1)
            ]
        );
        let a = g.find_node("a[x1@C1]").unwrap();
        let a2 = g.find_node("a'[x1@C1]").unwrap();
        assert_eq!(g.arc(8).tail, a2);
        assert_eq!(g.arc(1).tail, a);
        assert_eq!(pg.graph.find_node("a[x1@C1]"), pg.graph.find_node("a'[x1@C1]"));
        assert_eq!(g.find_node("p[x1@C1]"), g.find_node("v0"));
        assert_eq!(g.find_node("q[~x1@C1]"), g.find_node("v1"));
        assert_eq!(g.find_node("r[x1@C1]"), g.find_node("v1"));
    }

    #[test]
    fn single_polarity_is_rejected() {
        let phi = CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2]]).unwrap();
        assert!(matches!(build_phi_graph(&phi), Err(Error::ConstructionUndefined(_))));
        let phi = CnfFormula::new(3, vec![vec![1, -1]]).unwrap();
        assert!(matches!(build_phi_graph(&phi), Err(Error::ConstructionUndefined(_))));
    }

    #[test]
    fn classification_on_sample() {
        let phi = parse_dimacs(SAMPLE).unwrap();
        let pg = build_phi_graph(&phi).unwrap();
        let neg = classify_negative(&pg, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(neg.short.len(), 9);
        assert!(!neg.long.is_empty());
        assert!(brute_force_sat(&phi).unwrap().satisfiable);
    }

    #[test]
    fn unsatisfiable_has_no_long_cycle() {
        let pg = build_phi_graph(&unsat()).unwrap();
        let neg = classify_negative(&pg, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(neg.short.len(), 8);
        assert!(neg.long.is_empty());
    }

    /// A long negative cycle walks every variable chain of one polarity, so
    /// the polarity it skips is a truth value, and then takes one clause path
    /// whose chain path was skipped. Counting those choices directly gives
    /// the number of long cycles.
    fn count_by_assignment(phi: &CnfFormula) -> usize {
        let n = phi.num_vars();
        (0..1usize << n)
            .map(|mask| {
                let value = |lit: i32| {
                    let bit = mask >> (lit.unsigned_abs() - 1) & 1 == 1;
                    bit == (lit > 0)
                };
                phi.clauses()
                    .iter()
                    .map(|c| c.iter().filter(|&&l| value(l)).count())
                    .product::<usize>()
            })
            .sum()
    }

    #[test]
    fn long_cycles_count_true_literal_choices() {
        for phi in [
            parse_dimacs(SAMPLE).unwrap(),
            unsat(),
            CnfFormula::new(3, vec![vec![1, 2, 3], vec![-1, -2, -3]]).unwrap(),
            CnfFormula::new(2, vec![vec![1, -2], vec![-1, 2]]).unwrap(),
        ] {
            let pg = build_phi_graph(&phi).unwrap();
            let neg = classify_negative(&pg, DEFAULT_CYCLE_CAP).unwrap();
            assert_eq!(neg.long.len(), count_by_assignment(&phi), "{phi:?}");
        }
    }
}
