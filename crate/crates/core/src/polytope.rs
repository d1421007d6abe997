//! H-representation of polyhedra and the constructions built on it:
//! halfspace intersection, the pyramid lift, products and unit-cube
//! normalization.
//!
//! Polyhedra are stored exactly as given. Redundant inequalities are legal
//! everywhere and nothing is ever pruned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};
use crate::vertex_enum::{enumerate_vertices, EnumCaps};

/// The closed halfspace `normal · x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(rename = "a")]
    pub normal: QVector,
    #[serde(rename = "b")]
    pub bound: Rational,
}

impl Halfspace {
    pub fn new(normal: QVector, bound: Rational) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::Unsupported("constraint with zero normal".into()));
        }
        Ok(Halfspace { normal, bound })
    }

    /// `x_axis <= bound`.
    pub fn upper(dim: usize, axis: usize, bound: Rational) -> Self {
        Halfspace {
            normal: QVector::unit(dim, axis),
            bound,
        }
    }

    /// `x_axis >= bound`, stored as `-x_axis <= -bound`.
    pub fn lower(dim: usize, axis: usize, bound: Rational) -> Self {
        Halfspace {
            normal: QVector::unit(dim, axis).scale(&-Rational::one()),
            bound: -bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// Signed slack `bound - normal · x`; zero means tight.
    pub fn slack(&self, x: &QVector) -> Result<Rational> {
        Ok(&self.bound - self.normal.dot(x)?)
    }
}

/// The hyperplane `normal · x = value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(rename = "a")]
    pub normal: QVector,
    #[serde(rename = "b")]
    pub value: Rational,
}

impl Hyperplane {
    pub fn new(normal: QVector, value: Rational) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::Unsupported("constraint with zero normal".into()));
        }
        Ok(Hyperplane { normal, value })
    }

    /// `x_axis = value`.
    pub fn axis(dim: usize, axis: usize, value: Rational) -> Self {
        Hyperplane {
            normal: QVector::unit(dim, axis),
            value,
        }
    }
}

/// `{x in R^dim : every inequality and equality holds}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronFile", into = "PolyhedronFile")]
pub struct HPolyhedron {
    dim: usize,
    inequalities: Vec<Halfspace>,
    equalities: Vec<Hyperplane>,
}

/// On-disk shape of a polyhedron: `dim`, `ineqs`, optional `eqs`.
#[derive(Serialize, Deserialize)]
struct PolyhedronFile {
    dim: usize,
    ineqs: Vec<Halfspace>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    eqs: Vec<Hyperplane>,
}

impl TryFrom<PolyhedronFile> for HPolyhedron {
    type Error = Error;
    fn try_from(f: PolyhedronFile) -> Result<Self> {
        HPolyhedron::new(f.dim, f.ineqs, f.eqs)
    }
}

impl From<HPolyhedron> for PolyhedronFile {
    fn from(p: HPolyhedron) -> Self {
        PolyhedronFile {
            dim: p.dim,
            ineqs: p.inequalities,
            eqs: p.equalities,
        }
    }
}

impl HPolyhedron {
    pub fn new(dim: usize, inequalities: Vec<Halfspace>, equalities: Vec<Hyperplane>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::shape("ambient dimension must be positive"));
        }
        for (k, n) in inequalities
            .iter()
            .map(|h| &h.normal)
            .chain(equalities.iter().map(|e| &e.normal))
            .enumerate()
        {
            if n.dim() != dim {
                return Err(Error::shape(format!(
                    "constraint {k} has {} coefficients, ambient dimension is {dim}",
                    n.dim()
                )));
            }
            if n.is_zero() {
                return Err(Error::Unsupported(format!("constraint {k} has a zero normal")));
            }
        }
        Ok(HPolyhedron {
            dim,
            inequalities,
            equalities,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polyhedron serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Halfspace] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Hyperplane] {
        &self.equalities
    }

    pub fn constraint_count(&self) -> usize {
        self.inequalities.len() + self.equalities.len()
    }

    /// Axis-aligned box `lo <= x <= hi`.
    pub fn axis_box(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::shape("box bounds of different length"));
        }
        let d = lo.len();
        let mut ineqs = Vec::with_capacity(2 * d);
        for i in 0..d {
            ineqs.push(Halfspace::lower(d, i, lo[i].clone()));
            ineqs.push(Halfspace::upper(d, i, hi[i].clone()));
        }
        Self::new(d, ineqs, vec![])
    }

    /// `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        Self::axis_box(&vec![Rational::zero(); d], &vec![Rational::one(); d]).expect("valid box")
    }

    /// `{x >= 0, sum x <= 1}`.
    pub fn standard_simplex(d: usize) -> Self {
        let mut ineqs: Vec<Halfspace> = (0..d).map(|i| Halfspace::lower(d, i, Rational::zero())).collect();
        ineqs.push(Halfspace {
            normal: QVector::filled(d, Rational::one()),
            bound: Rational::one(),
        });
        Self::new(d, ineqs, vec![]).expect("valid simplex")
    }

    /// `{sum |x_i| <= 1}` written as its `2^d` sign inequalities.
    pub fn cross_polytope(d: usize) -> Self {
        let ineqs = (0..1usize << d)
            .map(|mask| Halfspace {
                normal: (0..d)
                    .map(|i| if mask >> i & 1 == 1 { -Rational::one() } else { Rational::one() })
                    .collect(),
                bound: Rational::one(),
            })
            .collect();
        Self::new(d, ineqs, vec![]).expect("valid cross-polytope")
    }

    /// Whether `x` satisfies every constraint exactly.
    pub fn contains(&self, x: &QVector) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(Error::shape(format!("point of dimension {} in R^{}", x.dim(), self.dim)));
        }
        for e in &self.equalities {
            if e.normal.dot(x)? != e.value {
                return Ok(false);
            }
        }
        for h in &self.inequalities {
            if h.slack(x)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `self ∩ h`, with `h` appended to the inequality list.
    pub fn intersect_halfspace(&self, h: &Halfspace) -> Result<Self> {
        if h.dim() != self.dim {
            return Err(Error::shape(format!(
                "halfspace in R^{} intersected with polyhedron in R^{}",
                h.dim(),
                self.dim
            )));
        }
        let mut out = self.clone();
        out.inequalities.push(Halfspace::new(h.normal.clone(), h.bound.clone())?);
        Ok(out)
    }

    /// `self ∩ e`, with `e` appended to the equality list.
    pub fn intersect_hyperplane(&self, e: &Hyperplane) -> Result<Self> {
        if e.normal.dim() != self.dim {
            return Err(Error::shape(format!(
                "hyperplane in R^{} intersected with polyhedron in R^{}",
                e.normal.dim(),
                self.dim
            )));
        }
        let mut out = self.clone();
        out.equalities.push(Hyperplane::new(e.normal.clone(), e.value.clone())?);
        Ok(out)
    }

    /// Cone over `self` placed at height `t = 1`, apex at the origin:
    /// `{(x, t) : A x <= t b, 0 <= t <= 1}` in `R^{d+1}`.
    ///
    /// For bounded `self` with `n` vertices the result has exactly `n + 1`
    /// vertices: the apex and the copies of `self`'s vertices at `t = 1`.
    pub fn pyramid_embed(&self) -> Result<Self> {
        if !self.equalities.is_empty() {
            return Err(Error::Unsupported("pyramid_embed requires an inequality-only polyhedron".into()));
        }
        let d = self.dim + 1;
        let mut ineqs: Vec<Halfspace> = self
            .inequalities
            .iter()
            .map(|h| {
                let mut normal = h.normal.clone().into_entries();
                normal.push(-&h.bound);
                Halfspace {
                    normal: QVector::new(normal),
                    bound: Rational::zero(),
                }
            })
            .collect();
        ineqs.push(Halfspace::lower(d, d - 1, Rational::zero()));
        ineqs.push(Halfspace::upper(d, d - 1, Rational::one()));
        Self::new(d, ineqs, vec![])
    }

    /// Cartesian product `{(x, y) : x in self, y in other}`.
    pub fn product(&self, other: &HPolyhedron) -> HPolyhedron {
        let d = self.dim + other.dim;
        let left_pad = QVector::zeros(other.dim);
        let right_pad = QVector::zeros(self.dim);
        let lift_left = |n: &QVector| n.concat(&left_pad);
        let lift_right = |n: &QVector| right_pad.concat(n);
        let inequalities = self
            .inequalities
            .iter()
            .map(|h| Halfspace {
                normal: lift_left(&h.normal),
                bound: h.bound.clone(),
            })
            .chain(other.inequalities.iter().map(|h| Halfspace {
                normal: lift_right(&h.normal),
                bound: h.bound.clone(),
            }))
            .collect();
        let equalities = self
            .equalities
            .iter()
            .map(|e| Hyperplane {
                normal: lift_left(&e.normal),
                value: e.value.clone(),
            })
            .chain(other.equalities.iter().map(|e| Hyperplane {
                normal: lift_right(&e.normal),
                value: e.value.clone(),
            }))
            .collect();
        HPolyhedron {
            dim: d,
            inequalities,
            equalities,
        }
    }

    /// `k`-fold repeated squaring: `P_0 = self`, `P_{i+1} = P_i × P_i`.
    /// The result lives in `R^{2^k d}`.
    pub fn product_power(&self, k: u32) -> HPolyhedron {
        (0..k).fold(self.clone(), |p, _| p.product(&p))
    }

    /// Image of `self` under the invertible per-axis map `map`.
    pub fn apply_affine(&self, map: &AffineMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::shape("affine map and polyhedron dimensions differ"));
        }
        // x = y / s - t, so a·x <= b becomes (a / s)·y <= b + a·t.
        let pull = |normal: &QVector, rhs: &Rational| -> Result<(QVector, Rational)> {
            let n: QVector = normal
                .iter()
                .zip(map.scale.iter())
                .map(|(a, s)| a / s)
                .collect();
            Ok((n, rhs + normal.dot(&map.translate)?))
        };
        let mut ineqs = Vec::with_capacity(self.inequalities.len());
        for h in &self.inequalities {
            let (normal, bound) = pull(&h.normal, &h.bound)?;
            ineqs.push(Halfspace { normal, bound });
        }
        let mut eqs = Vec::with_capacity(self.equalities.len());
        for e in &self.equalities {
            let (normal, value) = pull(&e.normal, &e.value)?;
            eqs.push(Hyperplane { normal, value });
        }
        Self::new(self.dim, ineqs, eqs)
    }

    /// Groups coordinates into independent blocks: two coordinates share a
    /// block when some constraint involves both. Coordinates that appear in
    /// no constraint form singleton blocks. A polyhedron is the product of
    /// its block restrictions.
    pub fn coordinate_blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let normals = self
            .inequalities
            .iter()
            .map(|h| &h.normal)
            .chain(self.equalities.iter().map(|e| &e.normal));
        for n in normals {
            let mut support = n.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i);
            if let Some(first) = support.next() {
                for j in support {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut root_block = vec![usize::MAX; self.dim];
        for i in 0..self.dim {
            let r = find(&mut parent, i);
            if root_block[r] == usize::MAX {
                root_block[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[root_block[r]].push(i);
        }
        blocks
    }

    /// Restriction of the constraints to a coordinate block returned by
    /// [`HPolyhedron::coordinate_blocks`]. Constraints with support outside
    /// the block are dropped; constant constraints on an empty support are
    /// impossible because zero normals are rejected.
    pub fn restrict_to_block(&self, block: &[usize]) -> HPolyhedron {
        let in_block = |n: &QVector| n.iter().enumerate().any(|(i, a)| !a.is_zero() && block.contains(&i));
        let project = |n: &QVector| block.iter().map(|&i| n[i].clone()).collect::<QVector>();
        HPolyhedron {
            dim: block.len(),
            inequalities: self
                .inequalities
                .iter()
                .filter(|h| in_block(&h.normal))
                .map(|h| Halfspace {
                    normal: project(&h.normal),
                    bound: h.bound.clone(),
                })
                .collect(),
            equalities: self
                .equalities
                .iter()
                .filter(|e| in_block(&e.normal))
                .map(|e| Hyperplane {
                    normal: project(&e.normal),
                    value: e.value.clone(),
                })
                .collect(),
        }
    }
}

/// Per-axis map `x ↦ scale ⊙ (x + translate)` with every scale positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: QVector,
    pub translate: QVector,
}

impl AffineMap {
    pub fn new(scale: QVector, translate: QVector) -> Result<Self> {
        if scale.dim() != translate.dim() {
            return Err(Error::shape("scale and translate differ in length"));
        }
        if scale.iter().any(|s| !s.is_positive()) {
            return Err(Error::Unsupported("affine scale factors must be positive".into()));
        }
        Ok(AffineMap { scale, translate })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap {
            scale: QVector::filled(dim, Rational::one()),
            translate: QVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.scale.dim()
    }

    pub fn apply(&self, x: &QVector) -> Result<QVector> {
        let shifted = x.add(&self.translate)?;
        Ok(shifted.iter().zip(self.scale.iter()).map(|(a, s)| a * s).collect())
    }

    pub fn invert(&self, y: &QVector) -> Result<QVector> {
        if y.dim() != self.dim() {
            return Err(Error::shape("point and map dimensions differ"));
        }
        let unscaled: QVector = y.iter().zip(self.scale.iter()).map(|(a, s)| a / s).collect();
        unscaled.sub(&self.translate)
    }
}

/// Rescales a bounded nonempty polyhedron so that all its vertices lie in
/// `[0,1]^d`, using the bounding box of the enumerated vertex set. An axis of
/// zero width is only translated.
pub fn normalize_to_unit_cube(p: &HPolyhedron, caps: &EnumCaps) -> Result<(HPolyhedron, AffineMap)> {
    let vertices = enumerate_vertices(p, caps)?;
    let points = vertices.points();
    if points.is_empty() {
        return Err(Error::Infeasible("cannot normalize a polyhedron without vertices".into()));
    }
    let d = p.dim();
    let mut scale = Vec::with_capacity(d);
    let mut translate = Vec::with_capacity(d);
    for j in 0..d {
        let lo = points.iter().map(|v| &v[j]).min().expect("nonempty");
        let hi = points.iter().map(|v| &v[j]).max().expect("nonempty");
        let width = hi - lo;
        scale.push(if width.is_zero() { Rational::one() } else { width.recip()? });
        translate.push(-lo);
    }
    let map = AffineMap::new(QVector::new(scale), QVector::new(translate))?;
    Ok((p.apply_affine(&map)?, map))
}
