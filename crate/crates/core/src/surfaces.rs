//! Closed-form separating surfaces in the normalized parameter space
//! `(d3, d4, r2)` with `d2 = 1`, and the five polynomial
//! conditions they were extracted from.
//!
//! Each surface is given as a threshold `d4 = S(d3, r2)`:
//!
//! | id | threshold | transition |
//! |----|-----------|------------|
//! | C1 | `√(½(S − (S² − d3² + r2²)/(AB)))`, `S = d3² + r2²` | four equal IK roots (dom1/dom2) |
//! | C2 | `d3·A/(1 + d3)` | line `θ3 = −acos(−d3/d4)` tangent to S1 (dom2/dom3) |
//! | C3 | `d3·B/(d3 − 1)`, `d3 > 1` | same line tangent to S2 (dom3/dom4) |
//! | C4 | `d3·B/(1 − d3)`, `d3 < 1` | line `θ3 = +acos(−d3/d4)` tangent to S1 (dom3/dom5) |
//! | E1 | `(A − B)/2` | lateral segments of WS1 meet (WT2/WT3) |
//! | E2 | `d3` | singular lines appear (WT3/WT4) |
//! | E3 | `(A + B)/2` | WS1 tangent to WS2 (WT5/WT6, WT8/WT9) |
//!
//! with `A = √((d3 + 1)² + r2²)`, `B = √((d3 − 1)² + r2²)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceId {
    C1,
    C2,
    C3,
    C4,
    E1,
    E2,
    E3,
}

impl SurfaceId {
    pub const ALL: [SurfaceId; 7] = [
        SurfaceId::C1,
        SurfaceId::C2,
        SurfaceId::C3,
        SurfaceId::C4,
        SurfaceId::E1,
        SurfaceId::E2,
        SurfaceId::E3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceId::C1 => "C1",
            SurfaceId::C2 => "C2",
            SurfaceId::C3 => "C3",
            SurfaceId::C4 => "C4",
            SurfaceId::E1 => "E1",
            SurfaceId::E2 => "E2",
            SurfaceId::E3 => "E3",
        }
    }

    /// Whether the surface is defined at this `d3`.
    pub fn applies(&self, d3: f64) -> bool {
        match self {
            SurfaceId::C3 => d3 > 1.0,
            SurfaceId::C4 => d3 < 1.0,
            _ => true,
        }
    }

    /// Cusp-count transitions (C*) versus node transitions (E*).
    pub fn is_cusp_surface(&self) -> bool {
        matches!(
            self,
            SurfaceId::C1 | SurfaceId::C2 | SurfaceId::C3 | SurfaceId::C4
        )
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurfaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SurfaceId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown surface {s:?}")))
    }
}

/// The auxiliary radicals `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxAB {
    pub a: f64,
    pub b: f64,
}

impl AuxAB {
    pub fn new(d3: f64, r2: f64) -> Self {
        Self {
            a: (d3 + 1.0).hypot(r2),
            b: (d3 - 1.0).hypot(r2),
        }
    }
}

/// Threshold `d4` of surface `id` at `(d3, r2)`.
pub fn surface_value(id: SurfaceId, d3: f64, r2: f64) -> Result<f64> {
    SurfaceAtlas::exact().value(id, d3, r2)
}

/// Surface evaluator. The perturbed form scales one surface by a constant
/// factor and exists so that the cross-check suites can be shown to fail on a
/// wrong constant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfaceAtlas {
    perturbation: Option<(SurfaceId, f64)>,
}

impl SurfaceAtlas {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn perturbed(id: SurfaceId, factor: f64) -> Self {
        Self {
            perturbation: Some((id, factor)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.perturbation.is_none()
    }

    pub fn value(&self, id: SurfaceId, d3: f64, r2: f64) -> Result<f64> {
        if !id.applies(d3) {
            return Err(Error::SurfaceDomain { id, d3 });
        }
        let AuxAB { a, b } = AuxAB::new(d3, r2);
        let v = match id {
            SurfaceId::C1 => {
                let s = d3 * d3 + r2 * r2;
                (0.5 * (s - (s * s - d3 * d3 + r2 * r2) / (a * b)))
                    .max(0.0)
                    .sqrt()
            }
            SurfaceId::C2 => d3 * a / (1.0 + d3),
            SurfaceId::C3 => d3 * b / (d3 - 1.0),
            SurfaceId::C4 => d3 * b / (1.0 - d3),
            SurfaceId::E1 => 0.5 * (a - b),
            SurfaceId::E2 => d3,
            SurfaceId::E3 => 0.5 * (a + b),
        };
        Ok(match self.perturbation {
            Some((pid, factor)) if pid == id => v * factor,
            _ => v,
        })
    }

    /// All surfaces defined at `d3`, with their thresholds.
    pub fn applicable(&self, d3: f64, r2: f64) -> Vec<(SurfaceId, f64)> {
        SurfaceId::ALL
            .into_iter()
            .filter(|id| id.applies(d3))
            .map(|id| (id, self.value(id, d3, r2).expect("applicable surface")))
            .collect()
    }
}

/// The five polynomial conditions whose zero sets are candidate
/// separating surfaces. Only some branches actually separate topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// `d4·(1 + r2²) − d3`; not separating.
    Ratio,
    /// `d3² − d4² + r2²`; not separating.
    Hypot,
    /// Quadratic in `d4²`; the smaller root is C1, the larger is not separating.
    FourFold,
    /// Positive branch is C3 (`d3 > 1`) or C4 (`d3 < 1`).
    Outer,
    /// Positive branch is C2.
    Inner,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Ratio,
        Condition::Hypot,
        Condition::FourFold,
        Condition::Outer,
        Condition::Inner,
    ];

    fn terms(&self) -> &'static [Term] {
        match self {
            Condition::Ratio => RATIO,
            Condition::Hypot => HYPOT,
            Condition::FourFold => FOUR_FOLD,
            Condition::Outer => OUTER,
            Condition::Inner => INNER,
        }
    }

    /// Value of the polynomial at `(d3, d4, r2)`.
    pub fn residual(&self, d3: f64, d4: f64, r2: f64) -> f64 {
        eval_terms(self.terms(), d3, d4, r2).0
    }

    /// Residual divided by the sum of the absolute values of its terms.
    pub fn relative_residual(&self, d3: f64, d4: f64, r2: f64) -> f64 {
        let (v, scale) = eval_terms(self.terms(), d3, d4, r2);
        if scale == 0.0 {
            v.abs()
        } else {
            v.abs() / scale
        }
    }
}

/// One monomial `coef · d3^i · d4^j · r2^k`.
type Term = (f64, i32, i32, i32);

const RATIO: &[Term] = &[(-1.0, 1, 0, 0), (1.0, 0, 1, 2), (1.0, 0, 1, 0)];

const HYPOT: &[Term] = &[(1.0, 2, 0, 0), (-1.0, 0, 2, 0), (1.0, 0, 0, 2)];

const FOUR_FOLD: &[Term] = &[
    (1.0, 6, 2, 0),
    (-1.0, 4, 4, 0),
    (3.0, 4, 2, 2),
    (-2.0, 4, 2, 0),
    (2.0, 2, 4, 0),
    (-2.0, 2, 4, 2),
    (1.0, 2, 2, 0),
    (3.0, 2, 2, 4),
    (-1.0, 2, 0, 2),
    (-2.0, 0, 4, 2),
    (-1.0, 0, 4, 4),
    (-1.0, 0, 4, 0),
    (1.0, 0, 2, 6),
    (1.0, 0, 2, 2),
    (2.0, 0, 2, 4),
];

const OUTER: &[Term] = &[
    (1.0, 2, 0, 2),
    (1.0, 2, 0, 0),
    (-2.0, 3, 0, 0),
    (1.0, 4, 0, 0),
    (-1.0, 0, 2, 0),
    (2.0, 1, 2, 0),
    (-1.0, 2, 2, 0),
];

const INNER: &[Term] = &[
    (1.0, 2, 0, 2),
    (1.0, 2, 0, 0),
    (2.0, 3, 0, 0),
    (1.0, 4, 0, 0),
    (-1.0, 0, 2, 0),
    (-2.0, 1, 2, 0),
    (-1.0, 2, 2, 0),
];

fn eval_terms(t: &[Term], d3: f64, d4: f64, r2: f64) -> (f64, f64) {
    t.iter().fold((0.0, 0.0), |(sum, scale), &(c, i, j, k)| {
        let v = c * d3.powi(i) * d4.powi(j) * r2.powi(k);
        (sum + v, scale + v.abs())
    })
}

/// Coefficients `(α, β, γ)` of [`Condition::FourFold`] read as
/// `α·u² + β·u + γ` in `u = d4²`.
pub fn four_fold_quadratic(d3: f64, r2: f64) -> (f64, f64, f64) {
    let mut c = [0.0; 3];
    for &(coef, i, j, k) in FOUR_FOLD {
        c[(j / 2) as usize] += coef * d3.powi(i) * r2.powi(k);
    }
    (c[2], c[1], c[0])
}

/// Positive `d4` roots of [`Condition::FourFold`], ascending.
pub fn four_fold_roots(d3: f64, r2: f64) -> Vec<f64> {
    let (alpha, beta, gamma) = four_fold_quadratic(d3, r2);
    let disc = beta * beta - 4.0 * alpha * gamma;
    if disc < 0.0 || alpha == 0.0 {
        return Vec::new();
    }
    // stable pair: q = −(β + sign(β)√disc)/2, roots q/α and γ/q
    let q = -0.5 * (beta + beta.signum() * disc.sqrt());
    let mut u = vec![q / alpha, gamma / q];
    u.retain(|x| *x > 0.0);
    let mut d4: Vec<f64> = u.into_iter().map(f64::sqrt).collect();
    d4.sort_by(f64::total_cmp);
    d4
}

/// Zero set of [`Condition::Ratio`]: `d4 = d3 / (1 + r2²)`.
pub fn ratio_surface(d3: f64, r2: f64) -> f64 {
    d3 / (1.0 + r2 * r2)
}

/// Zero set of [`Condition::Hypot`]: `d4 = √(d3² + r2²)`.
pub fn hypot_surface(d3: f64, r2: f64) -> f64 {
    d3.hypot(r2)
}

/// Positive branch of [`Condition::Outer`], `d4 = d3·B/|1 − d3|`, with the
/// surface it coincides with. `None` at `d3 = 1`.
pub fn outer_branch(d3: f64, r2: f64) -> Option<(SurfaceId, f64)> {
    if d3 == 1.0 {
        return None;
    }
    let b = AuxAB::new(d3, r2).b;
    let v = d3 * b / (1.0 - d3).abs();
    Some((
        if d3 > 1.0 {
            SurfaceId::C3
        } else {
            SurfaceId::C4
        },
        v,
    ))
}

/// Positive branch of [`Condition::Inner`], `d4 = d3·A/(1 + d3)`.
pub fn inner_branch(d3: f64, r2: f64) -> f64 {
    d3 * AuxAB::new(d3, r2).a / (1.0 + d3)
}

/// How the branches of the five conditions relate to the surfaces at
/// `(d3, r2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub d3: f64,
    pub r2: f64,
    /// Both positive `d4` roots of [`Condition::FourFold`], ascending.
    pub four_fold_roots: Vec<f64>,
    /// The smaller root coincides with C1.
    pub small_root_is_c1: bool,
    /// Relative gap between the smaller root and C1.
    pub c1_gap: f64,
    /// The larger root, which does not separate topologies.
    pub large_root: Option<f64>,
    pub outer: Option<(SurfaceId, f64)>,
    pub outer_matches: bool,
    pub inner: f64,
    pub inner_matches_c2: bool,
    pub ratio: f64,
    pub hypot: f64,
}

pub fn branch_report(d3: f64, r2: f64) -> BranchReport {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
    let roots = four_fold_roots(d3, r2);
    let c1 = surface_value(SurfaceId::C1, d3, r2).expect("C1 is always defined");
    let small = roots.first().copied().unwrap_or(f64::NAN);
    let outer = outer_branch(d3, r2);
    let outer_matches = outer
        .map(|(id, v)| close(v, surface_value(id, d3, r2).expect("matching domain")))
        .unwrap_or(false);
    let inner = inner_branch(d3, r2);
    BranchReport {
        d3,
        r2,
        small_root_is_c1: close(small, c1),
        c1_gap: (small - c1).abs() / c1.max(f64::MIN_POSITIVE),
        large_root: roots.get(1).copied(),
        four_fold_roots: roots,
        outer,
        outer_matches,
        inner,
        inner_matches_c2: close(inner, surface_value(SurfaceId::C2, d3, r2).expect("C2")),
        ratio: ratio_surface(d3, r2),
        hypot: hypot_surface(d3, r2),
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn anchor_values() {
        let v = |id, d3| surface_value(id, d3, 1.0).unwrap();
        assert_abs_diff_eq!(v(SurfaceId::C1, 2.0), 0.200811, epsilon = 1e-6);
        assert_abs_diff_eq!(v(SurfaceId::C2, 2.0), 2.10819, epsilon = 1e-5);
        assert_abs_diff_eq!(v(SurfaceId::C3, 2.0), 2.82843, epsilon = 1e-5);
        assert_abs_diff_eq!(v(SurfaceId::E1, 2.0), 0.87403, epsilon = 1e-5);
        assert_abs_diff_eq!(v(SurfaceId::E3, 2.0), 2.28825, epsilon = 1e-5);
        assert_abs_diff_eq!(v(SurfaceId::C4, 0.5), 1.11803, epsilon = 1e-5);
        assert_abs_diff_eq!(v(SurfaceId::E3, 0.5), 1.46040, epsilon = 1e-5);
        assert_eq!(v(SurfaceId::E2, 0.7), 0.7);
    }

    #[test]
    fn domain_restrictions() {
        assert!(matches!(
            surface_value(SurfaceId::C3, 0.9, 1.0),
            Err(Error::SurfaceDomain { .. })
        ));
        assert!(surface_value(SurfaceId::C3, 1.0, 1.0).is_err());
        assert!(surface_value(SurfaceId::C4, 1.0, 1.0).is_err());
        assert!(surface_value(SurfaceId::C4, 1.5, 1.0).is_err());
    }

    #[test]
    fn four_fold_as_quadratic() {
        let (a, b, c) = four_fold_quadratic(2.0, 1.0);
        assert_abs_diff_eq!(a, -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c, -4.0, epsilon = 1e-12);
        let roots = four_fold_roots(2.0, 1.0);
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[0] * roots[0], 0.040325, epsilon = 1e-6);
        assert_abs_diff_eq!(roots[1] * roots[1], 4.9597, epsilon = 1e-4);
        assert_abs_diff_eq!(roots[0], 0.200811, epsilon = 1e-6);
        assert_abs_diff_eq!(roots[1], 2.22704, epsilon = 1e-5);
    }

    #[test]
    fn residual_anchors() {
        let c2 = surface_value(SurfaceId::C2, 2.0, 1.0).unwrap();
        let c3 = surface_value(SurfaceId::C3, 2.0, 1.0).unwrap();
        assert!(Condition::Inner.relative_residual(2.0, c2, 1.0) < 1e-9);
        assert!(Condition::Outer.relative_residual(2.0, c3, 1.0) < 1e-9);
        let c1 = surface_value(SurfaceId::C1, 2.0, 1.0).unwrap();
        assert!(Condition::FourFold.relative_residual(2.0, c1, 1.0) < 1e-9);
        assert_eq!(Condition::Ratio.residual(2.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn branch_report_anchors() {
        let r = branch_report(2.0, 1.0);
        assert!(r.small_root_is_c1);
        assert_abs_diff_eq!(r.large_root.unwrap(), 2.22704, epsilon = 1e-5);
        assert_eq!(r.outer.unwrap().0, SurfaceId::C3);
        assert_abs_diff_eq!(r.outer.unwrap().1, 2.82843, epsilon = 1e-5);
        assert!(r.outer_matches && r.inner_matches_c2);

        let r = branch_report(0.5, 1.0);
        assert_eq!(r.outer.unwrap().0, SurfaceId::C4);
        assert_abs_diff_eq!(r.outer.unwrap().1, 1.11803, epsilon = 1e-5);
    }

    #[test]
    fn perturbed_atlas_only_moves_one_surface() {
        let atlas = SurfaceAtlas::perturbed(SurfaceId::C2, 1.05);
        let exact = SurfaceAtlas::exact();
        assert_abs_diff_eq!(
            atlas.value(SurfaceId::C2, 2.0, 1.0).unwrap(),
            1.05 * exact.value(SurfaceId::C2, 2.0, 1.0).unwrap(),
            epsilon = 1e-12
        );
        assert_eq!(
            atlas.value(SurfaceId::E1, 2.0, 1.0).unwrap(),
            exact.value(SurfaceId::E1, 2.0, 1.0).unwrap()
        );
    }

    proptest! {
        #[test]
        fn ab_identity(d3 in 0.01f64..10.0, r2 in 0.01f64..10.0) {
            let AuxAB { a, b } = AuxAB::new(d3, r2);
            let lhs = a * a * b * b;
            let rhs = (d3 * d3 + r2 * r2 + 1.0).powi(2) - 4.0 * d3 * d3;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            prop_assert!(a > b);
        }

        #[test]
        fn surface_ordering(d3 in 0.05f64..4.0, r2 in 0.05f64..4.0) {
            let v = |id| surface_value(id, d3, r2).unwrap();
            let b = AuxAB::new(d3, r2).b;
            prop_assert!(v(SurfaceId::E1) < v(SurfaceId::E3));
            prop_assert!((v(SurfaceId::E3) - v(SurfaceId::E1) - b).abs() < 1e-12 * (1.0 + b));
            prop_assert!(v(SurfaceId::C1) < v(SurfaceId::E3));
            // ordering the decision procedure relies on
            prop_assert!(v(SurfaceId::C1) < v(SurfaceId::C2));
            prop_assert!(v(SurfaceId::E1) < v(SurfaceId::E2));
            prop_assert!(v(SurfaceId::E2) < v(SurfaceId::C2));
        }
    }
}
