use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::combine_subcentroids;
use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};
use crate::polytope::{HPolyhedron, Halfspace, Hyperplane};
use crate::vertex_enum::{count_vertices, enumerate_vertices, is_vertex, EnumCaps};

/// Vertex-counting oracle that records how often it is consulted.
#[derive(Debug, Default)]
pub struct CountingOracle {
    caps: EnumCaps,
    calls: AtomicUsize,
}

impl CountingOracle {
    pub fn new(caps: EnumCaps) -> Self {
        CountingOracle {
            caps,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn count(&self, p: &HPolyhedron) -> Result<u128> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        count_vertices(p, &self.caps)
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn caps(&self) -> &EnumCaps {
        &self.caps
    }
}

/// Whether some vertex of `p` lies on `{x_axis = c}`. Exact; does not consult
/// the counting oracle.
pub fn vertex_on_plane(p: &HPolyhedron, axis: usize, c: &Rational, caps: &EnumCaps) -> Result<bool> {
    let face = p.intersect_hyperplane(&Hyperplane::axis(p.dim(), axis, c.clone()))?;
    for v in enumerate_vertices(&face, caps)?.points() {
        if is_vertex(p, v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn slab(p: &HPolyhedron, axis: usize, lo: &Rational, hi: &Rational) -> Result<HPolyhedron> {
    let d = p.dim();
    p.intersect_halfspace(&Halfspace::lower(d, axis, lo.clone()))?
        .intersect_halfspace(&Halfspace::upper(d, axis, hi.clone()))
}

/// Three oracle calls: vertices of the closed slab minus those of its two
/// bounding faces. What remains are exactly the vertices of `p` strictly
/// inside the slab.
fn slab_count_unchecked(
    p: &HPolyhedron,
    axis: usize,
    lo: &Rational,
    hi: &Rational,
    oracle: &CountingOracle,
) -> Result<u128> {
    let s = slab(p, axis, lo, hi)?;
    let d = p.dim();
    let total = oracle.count(&s)?;
    let low_face = oracle.count(&s.intersect_hyperplane(&Hyperplane::axis(d, axis, lo.clone()))?)?;
    let high_face = oracle.count(&s.intersect_hyperplane(&Hyperplane::axis(d, axis, hi.clone()))?)?;
    total
        .checked_sub(low_face + high_face)
        .ok_or_else(|| Error::InvariantViolation("slab faces have more vertices than the slab".into()))
}

/// Number of vertices `v` of `p` with `lo < v_axis < hi` (0-based `axis`).
///
/// Fails with [`Error::PerturbationRequired`] when a vertex of `p` sits on
/// either cut plane.
pub fn slab_vertex_count(
    p: &HPolyhedron,
    axis: usize,
    lo: &Rational,
    hi: &Rational,
    oracle: &CountingOracle,
) -> Result<u128> {
    if axis >= p.dim() {
        return Err(Error::shape(format!("axis {axis} out of range for R^{}", p.dim())));
    }
    if lo >= hi {
        return Err(Error::Unsupported(format!("empty slab [{lo}, {hi}]")));
    }
    for c in [lo, hi] {
        if vertex_on_plane(p, axis, c, oracle.caps())? {
            return Err(Error::PerturbationRequired {
                axis,
                value: c.to_string(),
            });
        }
    }
    slab_count_unchecked(p, axis, lo, hi, oracle)
}

/// One slab of a per-axis slicing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceStat {
    pub count: u128,
    /// Representative coordinate: midpoint of the slab clipped to `[0, 1]`.
    pub midpoint: Rational,
}

/// Output of [`approx_centroid_sliced`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlicedApprox {
    pub point: QVector,
    pub oracle_calls: usize,
    /// Boundary shift finally used on each axis (zero when no perturbation
    /// was needed).
    pub shifts: Vec<Rational>,
    pub slices: Vec<Vec<SliceStat>>,
}

const MAX_RETRIES: u32 = 3;

/// Approximates the vertex centroid of `p` (vertices in `[0,1]^d`) so that
/// every coordinate is within `eps` of the true one, consulting only a
/// vertex-counting oracle.
///
/// Each axis is sliced independently into `ceil(1/eps)` slabs of equal
/// width. If a vertex lies on an interior boundary, all boundaries of that
/// axis are shifted by `eps / 2^(r+3)` on retry `r` (at most three retries).
/// Slab counts weight the slab midpoints.
pub fn approx_centroid_sliced(p: &HPolyhedron, eps: &Rational, oracle: &CountingOracle) -> Result<SlicedApprox> {
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(Error::Unsupported(format!("eps must lie in (0, 1], got {eps}")));
    }
    let slabs = eps
        .recip()?
        .ceil()
        .to_usize()
        .ok_or_else(|| Error::Unsupported("eps too small".into()))?;
    let width = Rational::from(slabs).recip()?;
    let calls_before = oracle.calls();
    let (zero, one) = (Rational::zero(), Rational::one());

    let mut point = Vec::with_capacity(p.dim());
    let mut shifts = Vec::with_capacity(p.dim());
    let mut all_slices = Vec::with_capacity(p.dim());
    for axis in 0..p.dim() {
        let mut chosen = None;
        for retry in 0..=MAX_RETRIES {
            let shift = if retry == 0 {
                Rational::zero()
            } else {
                eps / Rational::from(1u64 << (retry + 3))
            };
            let inner: Vec<Rational> = (1..slabs).map(|i| &width * Rational::from(i) + &shift).collect();
            let mut clear = true;
            for b in &inner {
                if vertex_on_plane(p, axis, b, oracle.caps())? {
                    clear = false;
                    break;
                }
            }
            if clear {
                chosen = Some((shift, inner));
                break;
            }
        }
        let Some((shift, inner)) = chosen else {
            return Err(Error::PerturbationRequired {
                axis,
                value: format!("all {} perturbations of the slab boundaries", MAX_RETRIES + 1),
            });
        };

        // vertices lie in [0,1], so the outer cuts at -1 and 2 touch none
        let mut edges = Vec::with_capacity(slabs + 1);
        edges.push(Rational::from(-1));
        edges.extend(inner);
        edges.push(Rational::from(2));

        let mut slices = Vec::with_capacity(slabs);
        for w in edges.windows(2) {
            let count = slab_count_unchecked(p, axis, &w[0], &w[1], oracle)?;
            let lo = std::cmp::max(&w[0], &zero);
            let hi = std::cmp::min(&w[1], &one);
            slices.push(SliceStat {
                count,
                midpoint: (lo + hi) / Rational::from(2),
            });
        }
        let stats: Vec<(u128, QVector)> = slices
            .iter()
            .map(|s| (s.count, QVector::new(vec![s.midpoint.clone()])))
            .collect();
        point.push(combine_subcentroids(&stats)?[0].clone());
        shifts.push(shift);
        all_slices.push(slices);
    }
    Ok(SlicedApprox {
        point: QVector::new(point),
        oracle_calls: oracle.calls() - calls_before,
        shifts,
        slices: all_slices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centroid::exact_centroid;

    fn q(p: i64, d: i64) -> Rational {
        Rational::frac(p, d)
    }

    fn oracle() -> CountingOracle {
        CountingOracle::new(EnumCaps::default())
    }

    #[test]
    fn slab_examples() {
        let cube = HPolyhedron::unit_cube(3);
        let o = oracle();
        // truncated cube: 8 vertices, face at 1/4 has 4, face at -1/4 none
        assert_eq!(slab_vertex_count(&cube, 0, &q(-1, 4), &q(1, 4), &o).unwrap(), 4);
        assert_eq!(o.calls(), 3);
        assert_eq!(slab_vertex_count(&cube, 0, &q(-1, 1), &q(2, 1), &o).unwrap(), 8);
        assert_eq!(slab_vertex_count(&cube, 0, &q(3, 1), &q(4, 1), &o).unwrap(), 0);
    }

    #[test]
    fn slab_rejects_vertex_on_cut() {
        let cube = HPolyhedron::unit_cube(2);
        let o = oracle();
        assert!(matches!(
            slab_vertex_count(&cube, 0, &q(0, 1), &q(1, 2), &o),
            Err(Error::PerturbationRequired { axis: 0, .. })
        ));
        assert_eq!(o.calls(), 0);
        assert!(slab_vertex_count(&cube, 0, &q(1, 2), &q(1, 2), &o).is_err());
        assert!(slab_vertex_count(&cube, 5, &q(0, 1), &q(1, 2), &o).is_err());
    }

    #[test]
    fn eps_one_is_single_slab() {
        let tri = HPolyhedron::standard_simplex(2);
        let r = approx_centroid_sliced(&tri, &Rational::one(), &oracle()).unwrap();
        assert_eq!(r.point, QVector::filled(2, q(1, 2)));
        assert_eq!(r.oracle_calls, 6);
    }

    #[test]
    fn square_quarter() {
        let sq = HPolyhedron::unit_cube(2);
        let eps = q(1, 4);
        let r = approx_centroid_sliced(&sq, &eps, &oracle()).unwrap();
        let c = exact_centroid(&sq, &EnumCaps::default()).unwrap();
        assert!(r.point.max_abs_diff(&c).unwrap() <= eps);
        assert_eq!(r.oracle_calls, 2 * 3 * 4);
    }

    #[test]
    fn pyramid_eighth() {
        let pyr = HPolyhedron::unit_cube(2).pyramid_embed().unwrap();
        let eps = q(1, 8);
        let r = approx_centroid_sliced(&pyr, &eps, &oracle()).unwrap();
        assert!((&r.point[2] - q(4, 5)).abs() <= eps);
        assert!(r.oracle_calls <= 3 * 3 * 8);
    }

    #[test]
    fn perturbs_when_vertex_on_boundary() {
        // vertex at x = 1/2 sits on the unshifted boundary for eps = 1/4
        let p = HPolyhedron::standard_simplex(2)
            .intersect_halfspace(&Halfspace::upper(2, 0, q(1, 2)))
            .unwrap();
        let eps = q(1, 4);
        let r = approx_centroid_sliced(&p, &eps, &oracle()).unwrap();
        assert_eq!(r.shifts[0], q(1, 64));
        let c = exact_centroid(&p, &EnumCaps::default()).unwrap();
        assert!(r.point.max_abs_diff(&c).unwrap() <= eps);
        let total: u128 = r.slices[0].iter().map(|s| s.count).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn rejects_bad_eps() {
        let sq = HPolyhedron::unit_cube(2);
        assert!(approx_centroid_sliced(&sq, &Rational::zero(), &oracle()).is_err());
        assert!(approx_centroid_sliced(&sq, &q(3, 2), &oracle()).is_err());
    }
}
