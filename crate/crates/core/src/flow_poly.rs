//! The polyhedron of nonnegative circulations with total weight `-1`, its
//! vertices as scaled negative cycles, and satisfiability read off the
//! centroid of a formula graph's polyhedron.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cnf::CnfFormula;
use crate::digraph::{enumerate_cycles, Cycle, WeightedDigraph};
use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};
use crate::phi_graph::{build_phi_graph, classify_negative};
use crate::polytope::{HPolyhedron, Halfspace, Hyperplane};
use crate::vertex_enum::{enumerate_vertices, is_vertex, EnumCaps};

/// `{y in R^E : out-flow = in-flow at every node, w·y = -1, y >= 0}`.
#[derive(Clone, Debug)]
pub struct FlowPolyhedron {
    pub base: HPolyhedron,
    pub graph: WeightedDigraph,
}

/// Builds the circulation polyhedron of `g` with one coordinate per arc.
///
/// Nodes whose conservation row vanishes (isolated nodes, nodes with only
/// loops) contribute no equality. When every weight is zero the weight
/// equality reads `0 = -1`; it is then stored as the inequality
/// `Σ y <= -1`, which together with `y >= 0` leaves the polyhedron empty.
pub fn build_flow_polyhedron(g: &WeightedDigraph) -> Result<FlowPolyhedron> {
    let e = g.arc_count();
    if e == 0 {
        return Err(Error::Unsupported("graph has no arcs".into()));
    }
    let mut rows = vec![vec![Rational::zero(); e]; g.node_count()];
    for (id, a) in g.arcs().iter().enumerate() {
        rows[a.tail][id] += Rational::one();
        rows[a.head][id] -= Rational::one();
    }
    let mut equalities: Vec<Hyperplane> = rows
        .into_iter()
        .map(QVector::new)
        .filter(|r| !r.is_zero())
        .map(|r| Hyperplane {
            normal: r,
            value: Rational::zero(),
        })
        .collect();
    let weights = QVector::new(g.arcs().iter().map(|a| a.weight.clone()).collect());
    let mut inequalities: Vec<Halfspace> = (0..e).map(|i| Halfspace::lower(e, i, Rational::zero())).collect();
    if weights.is_zero() {
        inequalities.push(Halfspace {
            normal: QVector::filled(e, Rational::one()),
            bound: Rational::from(-1),
        });
    } else {
        equalities.push(Hyperplane {
            normal: weights,
            value: Rational::from(-1),
        });
    }
    Ok(FlowPolyhedron {
        base: HPolyhedron::new(e, inequalities, equalities)?,
        graph: g.clone(),
    })
}

/// `-χ(C) / w(C)` for every negative simple cycle `C` of `g`.
pub fn expected_vertices(g: &WeightedDigraph, cycle_cap: usize) -> Result<BTreeSet<QVector>> {
    let mut out = BTreeSet::new();
    for c in enumerate_cycles(g, cycle_cap)? {
        if c.weight.is_negative() {
            out.insert(scaled_indicator(&c, g.arc_count()));
        }
    }
    Ok(out)
}

fn scaled_indicator(c: &Cycle, arc_count: usize) -> QVector {
    let value = -c.weight.recip().expect("negative weight is nonzero");
    c.indicator(arc_count).scale(&value)
}

/// If the support of `y` is a single simple cycle `C` of `g` and `y` equals
/// `-1/w(C)` on it, returns `C`.
pub fn single_cycle_support(g: &WeightedDigraph, y: &QVector) -> Option<Cycle> {
    if y.dim() != g.arc_count() {
        return None;
    }
    let support: Vec<usize> = (0..y.dim()).filter(|&i| !y[i].is_zero()).collect();
    let first = *support.first()?;
    let mut next_arc: BTreeMap<usize, usize> = BTreeMap::new();
    let mut heads = BTreeSet::new();
    for &id in &support {
        let a = g.arc(id);
        if next_arc.insert(a.tail, id).is_some() || !heads.insert(a.head) {
            return None;
        }
    }
    let mut arcs = vec![first];
    let start = g.arc(first).tail;
    let mut at = g.arc(first).head;
    while at != start {
        let id = *next_arc.get(&at)?;
        arcs.push(id);
        at = g.arc(id).head;
    }
    if arcs.len() != support.len() {
        return None;
    }
    let lowest = (0..arcs.len()).min_by_key(|&i| g.arc(arcs[i]).tail)?;
    arcs.rotate_left(lowest);
    let c = Cycle::from_arcs(g, arcs).ok()?;
    if !c.weight.is_negative() {
        return None;
    }
    let value = -c.weight.recip().ok()?;
    support.iter().all(|&i| y[i] == value).then_some(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Enumerate the polyhedron's vertices and compare with the cycles.
    Full,
    /// Check only that every cycle point is a vertex with single-cycle
    /// support; scales to polyhedra too large to enumerate.
    Candidate,
}

/// Outcome of [`verify_cycle_vertices`]. Point lists hold counterexamples
/// and are empty on success.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub arcs: usize,
    pub negative_cycles: usize,
    pub enumerated_vertices: Option<usize>,
    /// Cycle points that are not vertices.
    pub not_vertices: Vec<QVector>,
    /// Vertices that are not cycle points.
    pub unexpected_vertices: Vec<QVector>,
    /// Points whose support is not one cycle with uniform value.
    pub bad_support: Vec<QVector>,
    pub ok: bool,
}

/// Checks that the vertices of the circulation polyhedron of `g` are
/// exactly the points `-χ(C)/w(C)` of its negative cycles.
pub fn verify_cycle_vertices(
    g: &WeightedDigraph,
    mode: VerifyMode,
    caps: &EnumCaps,
    cycle_cap: usize,
) -> Result<VerifyReport> {
    let poly = build_flow_polyhedron(g)?;
    let expected = expected_vertices(g, cycle_cap)?;
    let mut report = VerifyReport {
        mode,
        arcs: g.arc_count(),
        negative_cycles: expected.len(),
        enumerated_vertices: None,
        not_vertices: Vec::new(),
        unexpected_vertices: Vec::new(),
        bad_support: Vec::new(),
        ok: false,
    };
    let mut checked: BTreeSet<QVector> = expected.clone();
    match mode {
        VerifyMode::Full => {
            let vs = enumerate_vertices(&poly.base, caps)?;
            report.enumerated_vertices = Some(vs.len());
            report.not_vertices = expected.iter().filter(|x| !vs.contains(x)).cloned().collect();
            report.unexpected_vertices = vs.points().iter().filter(|x| !expected.contains(*x)).cloned().collect();
            checked.extend(vs.points().iter().cloned());
        }
        VerifyMode::Candidate => {
            for x in &expected {
                if !is_vertex(&poly.base, x)? {
                    report.not_vertices.push(x.clone());
                }
            }
        }
    }
    report.bad_support = checked
        .into_iter()
        .filter(|x| single_cycle_support(g, x).is_none())
        .collect();
    report.ok = report.not_vertices.is_empty() && report.unexpected_vertices.is_empty() && report.bad_support.is_empty();
    Ok(report)
}

/// Random digraph on 2 to 4 nodes with 1 to 6 distinct arcs (loops
/// allowed) and weights drawn from `{-2, -1, 0, 1}`.
pub fn random_small_digraph(rng: &mut impl Rng) -> WeightedDigraph {
    let n = rng.gen_range(2..=4usize);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|t| (0..n).map(move |h| (t, h))).collect();
    pairs.shuffle(rng);
    let k = rng.gen_range(1..=6usize.min(pairs.len()));
    let mut chosen = pairs[..k].to_vec();
    chosen.sort_unstable();
    let mut g = WeightedDigraph::with_nodes(n);
    for (t, h) in chosen {
        let w = [-2, -1, 0, 1][rng.gen_range(0..4)];
        g.add_arc(t, h, Rational::from(w)).expect("nodes in range");
    }
    g
}

/// `count` random small digraphs, reproducible from `seed`.
pub fn random_digraph_corpus(seed: u64, count: usize) -> Vec<WeightedDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_small_digraph(&mut rng)).collect()
}

/// Marked coordinate of the centroid of a formula graph's circulation
/// polyhedron, and the satisfiability decision it supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// Number of clauses.
    pub m: usize,
    /// Number of literal occurrences (`3m` for clauses of three literals).
    pub literals: usize,
    /// Number of long negative cycles.
    pub long_cycles: usize,
    pub marked_arc: usize,
    /// `K / (K + L)` with `K` long cycles and `L` literal occurrences.
    pub marked_value: Rational,
    /// `1 / (2(L + 1))`.
    pub threshold: Rational,
    pub decision: bool,
}

/// `1 / (2(L + 1))` for `L` literal occurrences: half the smallest positive
/// value the marked coordinate can take.
pub fn gap_threshold(literals: usize) -> Rational {
    Rational::new(1u64, 2 * (literals as u64 + 1)).expect("positive denominator")
}

/// Exact centroid of the circulation polyhedron of `phi`'s graph, taken
/// over the cycle points.
pub fn formula_centroid(phi: &CnfFormula, cycle_cap: usize) -> Result<QVector> {
    let pg = build_phi_graph(phi)?;
    let pts = expected_vertices(&pg.graph, cycle_cap)?;
    crate::vertex_enum::average(&pts.into_iter().collect::<Vec<_>>(), pg.graph.arc_count())
}

/// Counts long cycles of `phi`'s graph and evaluates the marked coordinate
/// `K / (K + L)`, cross-checking it against the centroid of the cycle
/// points.
pub fn marked_coordinate(phi: &CnfFormula, cycle_cap: usize) -> Result<GapReport> {
    let pg = build_phi_graph(phi)?;
    let neg = classify_negative(&pg, cycle_cap)?;
    let k = neg.long.len();
    let l = pg.occurrences.len();
    let marked_value = Rational::new(k as u64, (k + l) as u64)?;

    let pts: Vec<QVector> = neg
        .short
        .iter()
        .chain(&neg.long)
        .map(|c| scaled_indicator(c, pg.graph.arc_count()))
        .collect();
    if pts.iter().any(|p| p.iter().any(|x| !x.is_zero() && x != &Rational::one())) {
        return Err(Error::InvariantViolation("cycle point outside {0,1}^E".into()));
    }
    let centroid = crate::vertex_enum::average(&pts, pg.graph.arc_count())?;
    if centroid[pg.marked_arc] != marked_value {
        return Err(Error::InvariantViolation(format!(
            "centroid has marked coordinate {}, expected {marked_value}",
            centroid[pg.marked_arc]
        )));
    }
    let threshold = gap_threshold(l);
    Ok(GapReport {
        m: phi.num_clauses(),
        literals: l,
        long_cycles: k,
        marked_arc: pg.marked_arc,
        decision: marked_value >= threshold,
        marked_value,
        threshold,
    })
}

/// Reads satisfiability off a point claimed to be within the gap threshold
/// of the centroid: satisfiable iff its marked coordinate reaches the
/// threshold.
pub fn decide_sat_via_gap(phi: &CnfFormula, approx: &QVector) -> Result<bool> {
    let l = phi.literal_count();
    let arcs = 6 * l + 1;
    if approx.dim() != arcs {
        return Err(Error::shape(format!(
            "point has {} coordinates, the formula graph has {arcs} arcs",
            approx.dim()
        )));
    }
    Ok(approx[arcs - 1] >= gap_threshold(l))
}
