//! Vertex centroids: exact computation, sidedness queries, recovery of the
//! vertex count from the pyramid lift, slice-based approximation with a
//! counting oracle, and the product bootstrap.

mod bootstrap;
mod slicing;

pub use bootstrap::{
    bootstrap_approx, choose_fold_depth, fold_half, BootstrapResult, CentroidApproximator, ExactApproximator, Guarantee,
    AdversarialApproximator, Perfect, PowerLaw,
};
pub use slicing::{approx_centroid_sliced, slab_vertex_count, vertex_on_plane, CountingOracle, SliceStat, SlicedApprox};

use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};
use crate::polytope::{HPolyhedron, Halfspace};
use crate::vertex_enum::{enumerate_vertices, EnumCaps};

/// Exact coordinatewise average of the vertices of `p`.
///
/// Independent coordinate blocks are enumerated separately: the vertex set
/// of a product is the Cartesian product of the factors' vertex sets, so its
/// centroid is the concatenation of the factors' centroids.
pub fn exact_centroid(p: &HPolyhedron, caps: &EnumCaps) -> Result<QVector> {
    let mut out = QVector::zeros(p.dim());
    for block in p.coordinate_blocks() {
        let vs = enumerate_vertices(&p.restrict_to_block(&block), caps)?;
        if vs.is_empty() {
            return Err(Error::UndefinedCentroid("polyhedron has no vertices".into()));
        }
        let c = vs.centroid()?;
        for (k, &i) in block.iter().enumerate() {
            out[i] = c[k].clone();
        }
    }
    Ok(out)
}

/// Position of the centroid relative to the hyperplane bounding a halfspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Sidedness {
    Below,
    On,
    Above,
}

/// Compares `h.normal · c(P)` against `h.bound` exactly.
pub fn centroid_sidedness(p: &HPolyhedron, h: &Halfspace, caps: &EnumCaps) -> Result<Sidedness> {
    if h.dim() != p.dim() {
        return Err(Error::shape("halfspace and polyhedron dimensions differ"));
    }
    let value = h.normal.dot(&exact_centroid(p, caps)?)?;
    Ok(match value.cmp(&h.bound) {
        std::cmp::Ordering::Less => Sidedness::Below,
        std::cmp::Ordering::Equal => Sidedness::On,
        std::cmp::Ordering::Greater => Sidedness::Above,
    })
}

/// Result of [`count_via_sidedness`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CountSearch {
    pub count: u64,
    pub queries: u32,
}

/// Height `n / (n + 1)` of the pyramid centroid when the base has `n`
/// vertices.
pub fn pyramid_height(n: u64) -> Rational {
    Rational::new(n, n + 1).expect("n + 1 > 0")
}

/// Recovers the vertex count of a bounded `p` using only sidedness queries
/// against the centroid of its pyramid lift.
///
/// The candidates are `1..=n_max` plus an overflow outcome. Each query asks
/// where the lifted centroid sits relative to the height `n/(n+1)` of one
/// candidate: `On` pins the count, `Below`/`Above` discard one side. This
/// needs at most `ceil(log2 n_max)` queries for `n_max >= 2`.
pub fn count_via_sidedness(p: &HPolyhedron, n_max: u64, caps: &EnumCaps) -> Result<CountSearch> {
    if n_max == 0 {
        return Err(Error::SearchRange { n_max });
    }
    let q = p.pyramid_embed()?;
    let d = q.dim();
    let mut queries = 0u32;
    let (mut lo, mut hi) = (1u64, n_max + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let h = Halfspace::upper(d, d - 1, pyramid_height(mid));
        queries += 1;
        match centroid_sidedness(&q, &h, caps)? {
            Sidedness::On => return Ok(CountSearch { count: mid, queries }),
            Sidedness::Below => hi = mid - 1,
            Sidedness::Above => lo = mid + 1,
        }
    }
    if lo > hi {
        return Err(Error::Infeasible("pyramid centroid lies below every candidate height".into()));
    }
    if lo > n_max {
        return Err(Error::SearchRange { n_max });
    }
    Ok(CountSearch { count: lo, queries })
}

/// Weighted average `Σ n_i c_i / Σ n_i` of sub-centroids.
pub fn combine_subcentroids(stats: &[(u128, QVector)]) -> Result<QVector> {
    let total: u128 = stats.iter().map(|(n, _)| n).sum();
    if total == 0 {
        return Err(Error::UndefinedCentroid("sub-centroid weights sum to zero".into()));
    }
    let dim = stats[0].1.dim();
    let mut acc = QVector::zeros(dim);
    for (n, c) in stats {
        if c.dim() != dim {
            return Err(Error::shape("sub-centroids of different dimension"));
        }
        acc = acc.add(&c.scale(&Rational::from_integer(*n)))?;
    }
    Ok(acc.scale(&Rational::from_integer(total).recip()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex_enum::count_vertices;

    fn caps() -> EnumCaps {
        EnumCaps::default()
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::frac(p, d)
    }

    #[test]
    fn exact_centroid_examples() {
        assert_eq!(
            exact_centroid(&HPolyhedron::unit_cube(3), &caps()).unwrap(),
            QVector::filled(3, q(1, 2))
        );
        assert_eq!(
            exact_centroid(&HPolyhedron::standard_simplex(3), &caps()).unwrap(),
            QVector::filled(3, q(1, 4))
        );
        let pyr = HPolyhedron::unit_cube(2).pyramid_embed().unwrap();
        assert_eq!(exact_centroid(&pyr, &caps()).unwrap()[2], q(4, 5));
        let empty = HPolyhedron::unit_cube(2)
            .intersect_halfspace(&Halfspace::upper(2, 0, q(-1, 1)))
            .unwrap();
        assert!(matches!(exact_centroid(&empty, &caps()), Err(Error::UndefinedCentroid(_))));
    }

    #[test]
    fn block_centroid_matches_whole_enumeration() {
        let p = HPolyhedron::standard_simplex(2).product(&HPolyhedron::cross_polytope(2));
        let whole = enumerate_vertices(&p, &caps()).unwrap().centroid().unwrap();
        assert_eq!(exact_centroid(&p, &caps()).unwrap(), whole);
    }

    #[test]
    fn product_centroid_is_diagonal() {
        let tri = HPolyhedron::standard_simplex(2)
            .intersect_halfspace(&Halfspace::upper(2, 0, q(1, 2)))
            .unwrap();
        let c = exact_centroid(&tri, &caps()).unwrap();
        let cc = enumerate_vertices(&tri.product(&tri), &caps()).unwrap().centroid().unwrap();
        assert_eq!(cc, c.concat(&c));
    }

    #[test]
    fn sidedness_examples() {
        let sq = HPolyhedron::unit_cube(2);
        assert_eq!(
            centroid_sidedness(&sq, &Halfspace::upper(2, 0, q(3, 4)), &caps()).unwrap(),
            Sidedness::Below
        );
        assert_eq!(
            centroid_sidedness(&sq, &Halfspace::upper(2, 0, q(1, 2)), &caps()).unwrap(),
            Sidedness::On
        );
        let pyr = sq.pyramid_embed().unwrap();
        assert_eq!(
            centroid_sidedness(&pyr, &Halfspace::upper(3, 2, q(7, 10)), &caps()).unwrap(),
            Sidedness::Above
        );
    }

    #[test]
    fn count_search_examples() {
        let r = count_via_sidedness(&HPolyhedron::unit_cube(2), 16, &caps()).unwrap();
        assert_eq!(r.count, 4);
        assert!(r.queries <= 4);
        let r = count_via_sidedness(&HPolyhedron::unit_cube(1), 2, &caps()).unwrap();
        assert_eq!(r.count, 2);
        assert!(r.queries <= 1);
        for p in [HPolyhedron::unit_cube(3), HPolyhedron::cross_polytope(3), HPolyhedron::standard_simplex(3)] {
            let r = count_via_sidedness(&p, 64, &caps()).unwrap();
            assert_eq!(r.count as u128, count_vertices(&p, &caps()).unwrap());
            assert!(r.queries <= 6);
        }
    }

    #[test]
    fn count_search_range_error() {
        assert_eq!(
            count_via_sidedness(&HPolyhedron::unit_cube(3), 7, &caps()),
            Err(Error::SearchRange { n_max: 7 })
        );
        assert_eq!(count_via_sidedness(&HPolyhedron::unit_cube(3), 8, &caps()).unwrap().count, 8);
    }

    /// Exhaustive check of the query bound for every count in range: the
    /// search only depends on the pyramid height, so it is simulated here
    /// against the closed-form height.
    #[test]
    fn query_bound_holds_for_all_counts() {
        for n_max in 2u64..=70 {
            let bound = 64 - (n_max - 1).leading_zeros();
            for n in 1..=n_max + 3 {
                let height = pyramid_height(n);
                let (mut lo, mut hi, mut queries) = (1u64, n_max + 1, 0u32);
                let mut found = None;
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    queries += 1;
                    match height.cmp(&pyramid_height(mid)) {
                        std::cmp::Ordering::Equal => {
                            found = Some(mid);
                            break;
                        }
                        std::cmp::Ordering::Less => hi = mid - 1,
                        std::cmp::Ordering::Greater => lo = mid + 1,
                    }
                }
                let result = found.unwrap_or(lo);
                assert!(queries <= bound, "n_max={n_max} n={n} queries={queries}");
                if n <= n_max {
                    assert_eq!(result, n);
                } else {
                    assert_eq!(result, n_max + 1);
                }
            }
        }
    }

    #[test]
    fn combine_examples() {
        let c = combine_subcentroids(&[(2, QVector::from_ints(&[0, 0])), (2, QVector::from_ints(&[1, 1]))]).unwrap();
        assert_eq!(c, QVector::filled(2, q(1, 2)));
        let x = QVector::new(vec![q(1, 3), q(-2, 7)]);
        assert_eq!(combine_subcentroids(&[(5, x.clone())]).unwrap(), x);
        assert!(combine_subcentroids(&[(0, x.clone())]).is_err());
        assert!(combine_subcentroids(&[]).is_err());
    }

    #[test]
    fn split_square_recombines() {
        // cut at x = 1/2 + 1/100 and recombine the sub-centroids of the
        // original vertices on each side
        let sq = HPolyhedron::unit_cube(2);
        let cut = q(51, 100);
        let left = sq.intersect_halfspace(&Halfspace::upper(2, 0, cut.clone())).unwrap();
        let right = sq.intersect_halfspace(&Halfspace::lower(2, 0, cut)).unwrap();
        let original = enumerate_vertices(&sq, &caps()).unwrap();
        let side = |p: &HPolyhedron| -> (u128, QVector) {
            let shared: Vec<QVector> = enumerate_vertices(p, &caps())
                .unwrap()
                .points()
                .iter()
                .filter(|v| original.contains(v))
                .cloned()
                .collect();
            (shared.len() as u128, crate::vertex_enum::average(&shared, 2).unwrap())
        };
        let c = combine_subcentroids(&[side(&left), side(&right)]).unwrap();
        assert_eq!(c, QVector::filled(2, q(1, 2)));
    }
}
