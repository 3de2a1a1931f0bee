//! Integer staircase frontier and the rate-to-depth certificate.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::Real;

/// Depth cap `k` and the largest rate compatible with it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint<R> {
    pub n: usize,
    pub k: usize,
    pub m_blocks: usize,
    pub eta_max: R,
}

pub fn frontier_point<R: Real>(n: usize, k: usize) -> Result<FrontierPoint<R>> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("depth cap k = {k} must lie in 1..={n}")));
    }
    let m_blocks = n.div_ceil(k);
    Ok(FrontierPoint { n, k, m_blocks, eta_max: R::lit(m_blocks as f64).sqrt().recip() })
}

/// `η_max(k) = 1/√⌈n/k⌉`.
pub fn eta_max<R: Real>(n: usize, k: usize) -> Result<R> {
    frontier_point(n, k).map(|p| p.eta_max)
}

/// Depth certified by an observed rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate<R> {
    pub n: usize,
    pub eta_observed: R,
    /// `⌊η⁻²⌋`: most independent block orthogonalizations compatible with `η`.
    pub m_max: u64,
    /// `⌈n / m_max⌉`.
    pub depth_certified: usize,
    /// `⌈n η²⌉`.
    pub smooth_bound: usize,
    /// `η > 1/√2` with `n > 1`.
    pub genuine_npartite: bool,
}

fn saturating_u64<R: Real>(x: R) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

/// `⌊x⌋`, or `round(x)` when `x` is within `snap_tol·x` of an integer.
fn snapped_floor<R: Real>(x: R, snap_tol: R) -> u64 {
    let r = x.round();
    saturating_u64(if (x - r).abs() <= snap_tol * x { r } else { x.floor() })
}

fn snapped_ceil<R: Real>(x: R, snap_tol: R) -> u64 {
    let r = x.round();
    saturating_u64(if (x - r).abs() <= snap_tol * x { r } else { x.ceil() })
}

fn ceil_div(n: usize, m: u64) -> usize {
    (n as u64).div_ceil(m.max(1)) as usize
}

/// Staircase witness `⌈n/⌊η⁻²⌋⌉` with integer snapping of `η⁻²` and `nη²`.
///
/// Rates above one by at most `snap_tol` are clamped to one; anything larger
/// contradicts the speed limit for complete charging and is rejected.
pub fn certified_depth<R: Real>(n: usize, eta: R, snap_tol: R) -> Result<Certificate<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("qubit count must be at least 1".into()));
    }
    if !(eta.is_finite() && eta > R::zero()) || eta > R::one() + snap_tol {
        return Err(Error::RateOutOfRange(eta.to_f64_lossy()));
    }
    let eta = eta.min(R::one());
    let eta_sq = eta * eta;
    let m_max = snapped_floor(eta_sq.recip(), snap_tol).max(1);
    let smooth = snapped_ceil(R::lit(n as f64) * eta_sq, snap_tol).max(1) as usize;
    Ok(Certificate {
        n,
        eta_observed: eta,
        m_max,
        depth_certified: ceil_div(n, m_max),
        smooth_bound: smooth,
        genuine_npartite: n > 1 && m_max == 1,
    })
}

/// Certificate for an exactly known rational `η²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactCertificate {
    pub n: usize,
    pub eta_sq: Ratio<u64>,
    pub m_max: u64,
    pub depth_certified: usize,
    pub smooth_bound: usize,
    pub genuine_npartite: bool,
}

pub fn certified_depth_exact(n: usize, eta_sq: Ratio<u64>) -> Result<ExactCertificate> {
    if n == 0 {
        return Err(Error::InvalidArgument("qubit count must be at least 1".into()));
    }
    let (p, q) = (*eta_sq.numer(), *eta_sq.denom());
    if p == 0 || p > q {
        return Err(Error::RateOutOfRange(p as f64 / q as f64));
    }
    let m_max = q / p;
    let smooth = ((n as u128 * p as u128).div_ceil(q as u128)) as usize;
    Ok(ExactCertificate {
        n,
        eta_sq,
        m_max,
        depth_certified: ceil_div(n, m_max),
        smooth_bound: smooth,
        genuine_npartite: n > 1 && m_max == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaircasePoint<R> {
    pub eta: R,
    pub depth_certified: usize,
    pub smooth_bound: usize,
}

/// `i / points` for `i = 1..=points`.
pub fn uniform_eta_grid<R: Real>(points: usize) -> Vec<R> {
    (1..=points).map(|i| R::lit(i as f64) / R::lit(points as f64)).collect()
}

pub fn staircase_curve<R: Real>(n: usize, eta_grid: &[R], snap_tol: R) -> Result<Vec<StaircasePoint<R>>> {
    eta_grid
        .iter()
        .map(|&eta| {
            let c = certified_depth(n, eta, snap_tol)?;
            Ok(StaircasePoint { eta, depth_certified: c.depth_certified, smooth_bound: c.smooth_bound })
        })
        .collect()
}

/// Rates `1/√m`, `m = 1..=n`, at which the certified depth can change.
pub fn staircase_thresholds<R: Real>(n: usize) -> Vec<(usize, R)> {
    (1..=n).map(|m| (m, R::lit(m as f64).sqrt().recip())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eta_max_examples() {
        assert_eq!(eta_max::<f64>(7, 7).unwrap(), 1.0);
        assert_eq!(eta_max::<f64>(9, 1).unwrap(), 1.0 / 3.0);
        assert_eq!(eta_max::<f64>(20, 7).unwrap(), 1.0 / 3f64.sqrt());
        assert!(eta_max::<f64>(5, 0).is_err());
        assert!(eta_max::<f64>(5, 6).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = certified_depth(20, 1.0, 1e-9).unwrap();
        assert_eq!((c.m_max, c.depth_certified), (1, 20));
        for n in [1usize, 2, 7, 20, 64] {
            let c = certified_depth(n, 1.0 / (n as f64).sqrt(), 1e-9).unwrap();
            assert_eq!((c.m_max, c.depth_certified), (n as u64, 1), "n={n}");
        }
        let c = certified_depth(20, 0.72, 1e-9).unwrap();
        assert_eq!((c.m_max, c.depth_certified, c.genuine_npartite), (1, 20, true));
        let c = certified_depth(20, 0.70, 1e-9).unwrap();
        assert_eq!((c.m_max, c.depth_certified, c.genuine_npartite), (2, 10, false));
        let c = certified_depth(20, 0.5, 1e-9).unwrap();
        assert_eq!((c.m_max, c.depth_certified), (4, 5));
    }

    #[test]
    fn certificate_rejections_and_clamp() {
        assert!(matches!(certified_depth(20, 1.01, 1e-9), Err(Error::RateOutOfRange(_))));
        assert!(certified_depth(20, 0.0, 1e-9).is_err());
        assert!(certified_depth(20, -0.3, 1e-9).is_err());
        assert!(certified_depth(20, f64::NAN, 1e-9).is_err());
        let c = certified_depth(20, 1.0 + 1e-10, 1e-9).unwrap();
        assert_eq!(c.eta_observed, 1.0);
        assert_eq!(c.depth_certified, 20);
    }

    #[test]
    fn single_qubit_never_genuine() {
        let c = certified_depth(1, 1.0, 1e-9).unwrap();
        assert!(!c.genuine_npartite);
        assert_eq!(c.depth_certified, 1);
    }

    #[test]
    fn snapping_holds_the_step_at_the_threshold() {
        for m in 1..=50u64 {
            let eta = 1.0 / (m as f64).sqrt();
            assert_eq!(certified_depth(50, eta, 1e-9).unwrap().m_max, m);
            // one ulp-scale perturbations either side stay snapped
            assert_eq!(certified_depth(50, eta * (1.0 + 1e-13), 1e-9).unwrap().m_max, m);
            assert_eq!(certified_depth(50, eta * (1.0 - 1e-13), 1e-9).unwrap().m_max, m);
        }
    }

    #[test]
    fn just_below_half_root_two() {
        let c = certified_depth(9, 0.707, 1e-9).unwrap();
        assert_eq!(c.depth_certified, 5);
    }

    #[test]
    fn exact_route_examples() {
        let c = certified_depth_exact(20, Ratio::new(1, 4)).unwrap();
        assert_eq!((c.m_max, c.depth_certified, c.smooth_bound), (4, 5, 5));
        let c = certified_depth_exact(20, Ratio::new(18, 25)).unwrap();
        assert_eq!((c.m_max, c.depth_certified), (1, 20));
        assert!(certified_depth_exact(3, Ratio::new(5, 4)).is_err());
        assert!(certified_depth_exact(3, Ratio::new(0, 4)).is_err());
    }

    proptest! {
        #[test]
        fn staircase_dominates_smooth_bound(n in 1usize..200, eta in 1e-6f64..=1.0) {
            let c = certified_depth(n, eta, 1e-9).unwrap();
            prop_assert!(c.depth_certified >= c.smooth_bound);
            prop_assert!(c.depth_certified <= n && c.depth_certified >= 1);
            if c.genuine_npartite {
                prop_assert_eq!(c.depth_certified, n);
            }
        }

        #[test]
        fn float_route_matches_exact_rationals(n in 1usize..100, p in 1u64..500, extra in 0u64..500) {
            let q = p + extra;
            let exact = certified_depth_exact(n, Ratio::new(p, q)).unwrap();
            let float = certified_depth(n, (p as f64 / q as f64).sqrt(), 1e-9).unwrap();
            prop_assert_eq!(exact.m_max, float.m_max);
            prop_assert_eq!(exact.depth_certified, float.depth_certified);
            prop_assert_eq!(exact.smooth_bound, float.smooth_bound);
        }

        #[test]
        fn eta_max_monotone(n in 1usize..100, k in 1usize..100) {
            prop_assume!(k < n);
            let here: f64 = eta_max(n, k).unwrap();
            prop_assert!(eta_max::<f64>(n, k + 1).unwrap() >= here);
            prop_assert!(eta_max::<f64>(n + 1, k).unwrap() <= here);
            prop_assert!(here > 0.0 && here <= 1.0);
        }
    }
}
