//! Exact vertex enumeration and counting by brute force over constraint
//! subsets.
//!
//! Every equality is always part of the tight system; inequality subsets are
//! drawn to top the rank up to the ambient dimension, each square system is
//! solved exactly, and feasible solutions are collected into a deduplicated
//! set. Degenerate (non-simple) vertices reached from several subsets are
//! merged by exact equality. Unbounded polyhedra are fine: only their
//! vertices are reported.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{bareiss_rank, bareiss_solve, integer_row, QVector, Rational};
use crate::polytope::{HPolyhedron, Hyperplane};

/// Resource caps for brute-force enumeration. Exceeding one is an error,
/// never a silent truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumCaps {
    pub max_dim: usize,
    pub max_constraints: usize,
    /// Upper bound on the number of inequality subsets examined.
    pub max_subsets: u128,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            max_dim: 20,
            max_constraints: 128,
            max_subsets: 50_000_000,
        }
    }
}

/// Deduplicated vertex list in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    ambient_dim: usize,
    points: Vec<QVector>,
}

impl VertexSet {
    pub fn new(ambient_dim: usize, points: BTreeSet<QVector>) -> Self {
        VertexSet {
            ambient_dim,
            points: points.into_iter().collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[QVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &QVector) -> bool {
        self.points.binary_search(x).is_ok()
    }

    /// Coordinatewise average of the points.
    pub fn centroid(&self) -> Result<QVector> {
        average(&self.points, self.ambient_dim)
    }
}

pub(crate) fn average(points: &[QVector], dim: usize) -> Result<QVector> {
    if points.is_empty() {
        return Err(Error::UndefinedCentroid("no vertices".into()));
    }
    let n = Rational::from(points.len());
    let mut sum = QVector::zeros(dim);
    for p in points {
        sum = sum.add(p)?;
    }
    Ok(sum.scale(&n.recip()?))
}

/// Whether `x` is a vertex of `p`: feasible, and the normals of all
/// equalities together with the inequalities tight at `x` have full rank.
pub fn is_vertex(p: &HPolyhedron, x: &QVector) -> Result<bool> {
    if !p.contains(x)? {
        return Ok(false);
    }
    let mut rows: Vec<Vec<BigInt>> = p
        .equalities()
        .iter()
        .map(|e| integer_row(e.normal.entries(), None))
        .collect();
    for h in p.inequalities() {
        if h.slack(x)?.is_zero() {
            rows.push(integer_row(h.normal.entries(), None));
        }
    }
    Ok(bareiss_rank(rows, p.dim()) == p.dim())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn check_caps(p: &HPolyhedron, caps: &EnumCaps) -> Result<()> {
    if p.dim() > caps.max_dim {
        return Err(Error::Resource {
            cap: "max_dim",
            limit: caps.max_dim as u128,
            required: p.dim() as u128,
        });
    }
    if p.constraint_count() > caps.max_constraints {
        return Err(Error::Resource {
            cap: "max_constraints",
            limit: caps.max_constraints as u128,
            required: p.constraint_count() as u128,
        });
    }
    Ok(())
}

/// Greedy maximal independent subset of the equality rows (augmented).
fn equality_basis(eqs: &[Hyperplane], dim: usize) -> Vec<Vec<BigInt>> {
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for e in eqs {
        let row = integer_row(e.normal.entries(), Some(&e.value));
        let mut trial: Vec<Vec<BigInt>> = basis.iter().map(|r| r[..dim].to_vec()).collect();
        trial.push(row[..dim].to_vec());
        if bareiss_rank(trial, dim) > basis.len() {
            basis.push(row);
        }
    }
    basis
}

/// All vertices of `p`.
pub fn enumerate_vertices(p: &HPolyhedron, caps: &EnumCaps) -> Result<VertexSet> {
    check_caps(p, caps)?;
    let dim = p.dim();
    let basis = equality_basis(p.equalities(), dim);
    let need = dim - basis.len();
    let ineq_rows: Vec<Vec<BigInt>> = p
        .inequalities()
        .iter()
        .map(|h| integer_row(h.normal.entries(), Some(&h.bound)))
        .collect();
    let subsets = binomial(ineq_rows.len(), need);
    if subsets > caps.max_subsets {
        return Err(Error::Resource {
            cap: "max_subsets",
            limit: caps.max_subsets,
            required: subsets,
        });
    }

    let mut found = BTreeSet::new();
    if need > ineq_rows.len() {
        return Ok(VertexSet::new(dim, found));
    }
    let mut chosen: Vec<usize> = (0..need).collect();
    loop {
        let mut system = basis.clone();
        system.extend(chosen.iter().map(|&i| ineq_rows[i].clone()));
        if let Some(x) = bareiss_solve(system) {
            let x = QVector::new(x);
            if !found.contains(&x) && p.contains(&x)? {
                found.insert(x);
            }
        }
        if !next_combination(&mut chosen, ineq_rows.len()) {
            break;
        }
    }
    Ok(VertexSet::new(dim, found))
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Number of vertices of `p`.
///
/// Counts each independent coordinate block separately and multiplies,
/// which keeps product polytopes tractable; the result always equals
/// `enumerate_vertices(p).len()`.
pub fn count_vertices(p: &HPolyhedron, caps: &EnumCaps) -> Result<u128> {
    let mut total: u128 = 1;
    for block in p.coordinate_blocks() {
        let n = enumerate_vertices(&p.restrict_to_block(&block), caps)?.len() as u128;
        if n == 0 {
            return Ok(0);
        }
        total = total.saturating_mul(n);
    }
    Ok(total)
}

/// Number of vertices of `p ∩ {x_axis = c}` (0-based `axis`).
pub fn face_vertex_count(p: &HPolyhedron, axis: usize, c: &Rational, caps: &EnumCaps) -> Result<u128> {
    if axis >= p.dim() {
        return Err(Error::shape(format!("axis {axis} out of range for R^{}", p.dim())));
    }
    count_vertices(&p.intersect_hyperplane(&Hyperplane::axis(p.dim(), axis, c.clone()))?, caps)
}
