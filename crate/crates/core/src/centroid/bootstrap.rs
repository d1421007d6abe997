use num_bigint::BigInt;
use num_traits::Pow;

use super::exact_centroid;
use crate::error::{Error, Result};
use crate::exact::{QVector, Rational};
use crate::polytope::HPolyhedron;
use crate::vertex_enum::EnumCaps;

/// Accuracy promise of a centroid approximator: on any polytope in the unit
/// cube of `R^D` its output is within Euclidean distance `√D / g(D)` of the
/// vertex centroid, for a nondecreasing unbounded `g`.
///
/// All decisions are exact, so implementations compare powers rather than
/// roots.
pub trait Guarantee: Send + Sync {
    /// Decides `√base_dim / g(big_dim) <= eps`.
    fn reaches(&self, base_dim: usize, big_dim: usize, eps: &Rational) -> bool;

    /// Decides `err_sq <= dim / g(dim)^2`, i.e. whether a squared error is
    /// allowed by the promise in `R^dim`.
    fn admits(&self, dim: usize, err_sq: &Rational) -> bool;

    fn description(&self) -> String;
}

/// `g = ∞`: the approximator is exact.
#[derive(Clone, Copy, Debug, Default)]
pub struct Perfect;

impl Guarantee for Perfect {
    fn reaches(&self, _: usize, _: usize, _: &Rational) -> bool {
        true
    }

    fn admits(&self, _: usize, err_sq: &Rational) -> bool {
        err_sq.is_zero()
    }

    fn description(&self) -> String {
        "exact".into()
    }
}

/// `g(D) = D^δ` for a rational `δ = p/q` in `(0, 1/2]`; the guarantee is
/// then `D^(1/2 - δ)`.
#[derive(Clone, Debug)]
pub struct PowerLaw {
    p: u32,
    q: u32,
}

impl PowerLaw {
    pub fn new(delta: &Rational) -> Result<Self> {
        let half = Rational::frac(1, 2);
        if !delta.is_positive() || delta > &half {
            return Err(Error::Unsupported(format!("exponent must lie in (0, 1/2], got {delta}")));
        }
        let conv = |x: &BigInt| u32::try_from(x).map_err(|_| Error::Unsupported("exponent too large".into()));
        Ok(PowerLaw {
            p: conv(delta.numer())?,
            q: conv(delta.denom())?,
        })
    }

    pub fn delta(&self) -> Rational {
        Rational::new(self.p, self.q).expect("q > 0")
    }

    /// Smallest integer `r >= D^δ`; equals `D^δ` when that is an integer.
    pub fn ceil_g(&self, dim: usize) -> BigInt {
        let base = BigInt::from(dim).pow(self.p);
        let root = base.nth_root(self.q);
        if root.clone().pow(self.q) == base {
            root
        } else {
            root + 1
        }
    }
}

impl Guarantee for PowerLaw {
    fn reaches(&self, base_dim: usize, big_dim: usize, eps: &Rational) -> bool {
        // √d <= eps·D^(p/q)  ⇔  d^q <= eps^(2q)·D^(2p)
        let lhs = Rational::from(base_dim).pow(self.q as i32);
        let rhs = eps.pow(2 * self.q as i32) * Rational::from(big_dim).pow(2 * self.p as i32);
        lhs <= rhs
    }

    fn admits(&self, dim: usize, err_sq: &Rational) -> bool {
        // e² <= D^(1-2p/q)  ⇔  e^(2q) <= D^(q-2p)
        err_sq.pow(self.q as i32) <= Rational::from(dim).pow(self.q as i32 - 2 * self.p as i32)
    }

    fn description(&self) -> String {
        format!("g(D) = D^({})", self.delta())
    }
}

/// A (possibly inexact) vertex-centroid algorithm with a stated guarantee.
/// Implementations must be deterministic.
pub trait CentroidApproximator {
    fn guarantee(&self) -> &dyn Guarantee;
    fn approximate(&self, p: &HPolyhedron) -> Result<QVector>;
}

/// Exact vertex centroid.
#[derive(Clone, Debug, Default)]
pub struct ExactApproximator {
    pub caps: EnumCaps,
}

impl CentroidApproximator for ExactApproximator {
    fn guarantee(&self) -> &dyn Guarantee {
        &Perfect
    }

    fn approximate(&self, p: &HPolyhedron) -> Result<QVector> {
        exact_centroid(p, &self.caps)
    }
}

/// Synthetic worst case for a [`PowerLaw`] guarantee on products of a
/// `base_dim`-dimensional polytope.
///
/// On a polytope in `R^D` it returns the exact centroid plus a noise vector
/// that repeats the same offset `r·e_1` in each of the `D / base_dim`
/// blocks. Midpoint folds cannot cancel a repeated offset, so after folding
/// back to `R^base_dim` the error is still `r`. The noise has squared norm
/// exactly `D / g(D)^2` whenever that allowance splits into rational
/// block offsets, and stays below it otherwise.
#[derive(Clone, Debug)]
pub struct AdversarialApproximator {
    pub law: PowerLaw,
    pub base_dim: usize,
    pub caps: EnumCaps,
}

const SQRT_DENOM: u64 = 1 << 20;

/// Largest rational `r = k / 2^20` with `r^2 <= s`, or `√s` itself when `s`
/// is the square of a rational.
fn sqrt_floor(s: &Rational) -> Rational {
    let (n, d) = (s.numer(), s.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return Rational::new(rn, rd).expect("d > 0");
    }
    let scaled = (s * Rational::from(SQRT_DENOM * SQRT_DENOM)).floor();
    Rational::new(scaled.sqrt(), SQRT_DENOM).expect("nonzero denominator")
}

impl AdversarialApproximator {
    /// Per-block offset `r` for an input in `R^dim`: `r^2 <= base_dim / g(dim)^2`.
    pub fn offset(&self, dim: usize) -> Rational {
        // g(dim)^2 = dim^(2p/q); round it up when it is not an integer
        let base = BigInt::from(dim).pow(2 * self.law.p);
        let root = base.nth_root(self.law.q);
        let g_sq = if root.clone().pow(self.law.q) == base { root } else { root + 1 };
        sqrt_floor(&(Rational::from(self.base_dim) / Rational::from_integer(g_sq)))
    }
}

impl CentroidApproximator for AdversarialApproximator {
    fn guarantee(&self) -> &dyn Guarantee {
        &self.law
    }

    fn approximate(&self, p: &HPolyhedron) -> Result<QVector> {
        if self.base_dim == 0 || !p.dim().is_multiple_of(self.base_dim) {
            return Err(Error::shape("input dimension is not a multiple of the base dimension"));
        }
        let r = self.offset(p.dim());
        let mut c = exact_centroid(p, &self.caps)?;
        for block in 0..p.dim() / self.base_dim {
            c[block * self.base_dim] += &r;
        }
        Ok(c)
    }
}

/// Splits `z = (x, y)` into halves and returns `(x + y) / 2`.
///
/// For any `u`, `‖u − (x+y)/2‖² <= ‖(u,u) − (x,y)‖² / 2`, so folding an
/// approximation of a diagonal point shrinks the error by `√2`.
pub fn fold_half(z: &QVector) -> Result<QVector> {
    if !z.dim().is_multiple_of(2) {
        return Err(Error::shape(format!("cannot fold odd dimension {}", z.dim())));
    }
    let d = z.dim() / 2;
    let x = QVector::new(z.entries()[..d].to_vec());
    let y = QVector::new(z.entries()[d..].to_vec());
    Ok(x.add(&y)?.scale(&Rational::frac(1, 2)))
}

/// Smallest `k >= 0` with `√d / g(2^k·d) <= eps`, failing past `k_cap`.
pub fn choose_fold_depth(dim: usize, guarantee: &dyn Guarantee, eps: &Rational, k_cap: u32) -> Result<u32> {
    if !eps.is_positive() {
        return Err(Error::Unsupported(format!("eps must be positive, got {eps}")));
    }
    for k in 0..=k_cap {
        let big = dim
            .checked_shl(k)
            .filter(|b| b >> k == dim)
            .ok_or(Error::Resource {
                cap: "max_fold_depth",
                limit: k_cap as u128,
                required: k as u128,
            })?;
        if guarantee.reaches(dim, big, eps) {
            return Ok(k);
        }
    }
    Err(Error::Resource {
        cap: "max_fold_depth",
        limit: k_cap as u128,
        required: k_cap as u128 + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BootstrapResult {
    pub k: u32,
    pub point: QVector,
}

/// Turns an approximator with guarantee `√D / g(D)` into an `eps`
/// approximation: run it on the `2^k`-fold product of `p` with itself and
/// fold the answer back `k` times. The product's centroid is the diagonal
/// replication of `p`'s, so each fold divides the error by `√2`.
pub fn bootstrap_approx(
    p: &HPolyhedron,
    oracle: &dyn CentroidApproximator,
    eps: &Rational,
    k_cap: u32,
) -> Result<BootstrapResult> {
    let k = choose_fold_depth(p.dim(), oracle.guarantee(), eps, k_cap)?;
    let power = p.product_power(k);
    let mut z = oracle.approximate(&power)?;
    if z.dim() != power.dim() {
        return Err(Error::shape("approximator returned a point of the wrong dimension"));
    }
    for _ in 0..k {
        z = fold_half(&z)?;
    }
    Ok(BootstrapResult { k, point: z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::frac(p, d)
    }

    #[test]
    fn fold_examples() {
        let x = QVector::new(vec![q(1, 3), q(-2, 1)]);
        assert_eq!(fold_half(&x.concat(&x)).unwrap(), x);
        assert_eq!(fold_half(&QVector::from_ints(&[0, 2])).unwrap(), QVector::from_ints(&[1]));
        assert!(fold_half(&QVector::zeros(3)).is_err());

        let u = QVector::zeros(2);
        let z = QVector::from_ints(&[1, -1, 1, 1]);
        let lhs = u.distance_squared(&fold_half(&z).unwrap()).unwrap();
        let rhs = u.concat(&u).distance_squared(&z).unwrap() / Rational::from(2);
        assert_eq!(lhs, Rational::one());
        assert_eq!(rhs, Rational::from(2));
    }

    /// Floating-point evaluation of `√d / (2^k d)^δ`, used only to confirm
    /// the exact decision away from ties.
    fn float_bound(d: usize, k: u32, delta: f64) -> f64 {
        (d as f64).sqrt() / ((d as f64) * 2f64.powi(k as i32)).powf(delta)
    }

    #[test]
    fn fold_depth_quarter_power() {
        // √2 / (2^k·2)^(1/4) = 2^((1-k)/4): 1.19, 1, 0.84, 0.71, 0.59, 0.5
        let law = PowerLaw::new(&q(1, 4)).unwrap();
        let eps = q(1, 2);
        for k in 0..5 {
            assert!(!law.reaches(2, 2 << k, &eps), "k={k}");
            assert!(float_bound(2, k, 0.25) > 0.5);
        }
        assert!(law.reaches(2, 64, &eps));
        assert_eq!(choose_fold_depth(2, &law, &eps, 20).unwrap(), 5);
    }

    #[test]
    fn fold_depth_against_float_evaluation() {
        for (p, qq) in [(1, 4), (1, 3), (1, 2), (1, 8)] {
            let law = PowerLaw::new(&q(p, qq)).unwrap();
            let delta = p as f64 / qq as f64;
            for d in 1..6usize {
                for eps in [q(1, 2), q(1, 3), q(3, 4), q(1, 1)] {
                    let Ok(k) = choose_fold_depth(d, &law, &eps, 40) else { continue };
                    let e = eps.to_f64();
                    assert!(float_bound(d, k, delta) <= e * (1.0 + 1e-12));
                    if k > 0 {
                        assert!(float_bound(d, k - 1, delta) > e * (1.0 - 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn exact_oracle_needs_no_folding() {
        let tri = HPolyhedron::standard_simplex(2);
        let r = bootstrap_approx(&tri, &ExactApproximator::default(), &q(1, 100), 10).unwrap();
        assert_eq!(r.k, 0);
        assert_eq!(r.point, QVector::filled(2, q(1, 3)));
    }

    #[test]
    fn noisy_oracle_meets_eps() {
        let tri = HPolyhedron::standard_simplex(2);
        let law = PowerLaw::new(&q(1, 4)).unwrap();
        let oracle = AdversarialApproximator {
            law: law.clone(),
            base_dim: 2,
            caps: EnumCaps::default(),
        };
        let eps = q(1, 2);
        let r = bootstrap_approx(&tri, &oracle, &eps, 10).unwrap();
        assert_eq!(r.k, 5);
        let c = QVector::filled(2, q(1, 3));
        let err = r.point.distance_squared(&c).unwrap();
        assert_eq!(err, q(1, 4));
        assert!(err <= &eps * &eps);
        // the oracle spends its whole allowance on P^k: 64 / g(64)^2 = 8
        let big = tri.product_power(5);
        let raw = oracle.approximate(&big).unwrap();
        let full_c = exact_centroid(&big, &EnumCaps::default()).unwrap();
        let raw_err = raw.distance_squared(&full_c).unwrap();
        assert_eq!(raw_err, Rational::from(8));
        assert!(law.admits(big.dim(), &raw_err));
        assert!(!law.admits(big.dim(), &(raw_err + q(1, 1000))));
    }

    #[test]
    fn offset_falls_back_below_allowance() {
        let law = PowerLaw::new(&q(1, 3)).unwrap();
        let oracle = AdversarialApproximator {
            law: law.clone(),
            base_dim: 3,
            caps: EnumCaps::default(),
        };
        for dim in [3usize, 6, 12, 24, 48] {
            let r = oracle.offset(dim);
            let err_sq = &r * &r * Rational::from(dim / 3);
            assert!(law.admits(dim, &err_sq), "dim={dim}");
            assert!(r.is_positive());
        }
        assert_eq!(sqrt_floor(&q(9, 4)), q(3, 2));
        let r = sqrt_floor(&Rational::from(2));
        assert!(&r * &r <= Rational::from(2));
    }

    #[test]
    fn fold_depth_cap() {
        let law = PowerLaw::new(&q(1, 8)).unwrap();
        assert!(matches!(
            choose_fold_depth(4, &law, &q(1, 1000), 3),
            Err(Error::Resource { cap: "max_fold_depth", .. })
        ));
    }

    #[test]
    fn power_law_validation() {
        assert!(PowerLaw::new(&q(0, 1)).is_err());
        assert!(PowerLaw::new(&q(3, 4)).is_err());
        let law = PowerLaw::new(&q(1, 3)).unwrap();
        assert_eq!(law.ceil_g(8), BigInt::from(2));
        assert_eq!(law.ceil_g(9), BigInt::from(3));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=9).prop_map(|(p, d)| Rational::frac(p, d))
    }

    proptest! {
        #[test]
        fn midpoint_fold_shrinks_error(
            u in proptest::collection::vec(small_rational(), 1..=4),
            seed in proptest::collection::vec((small_rational(), small_rational()), 4),
        ) {
            let d = u.len();
            let u = QVector::new(u);
            let x: QVector = seed[..d].iter().map(|s| s.0.clone()).collect();
            let y: QVector = seed[..d].iter().map(|s| s.1.clone()).collect();
            let z = x.concat(&y);
            let lhs = u.distance_squared(&fold_half(&z).unwrap()).unwrap();
            let rhs = u.concat(&u).distance_squared(&z).unwrap() / Rational::from(2);
            prop_assert!(lhs <= rhs);
        }
    }
}
