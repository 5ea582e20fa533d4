//! Singular curves in joint space and their images in the half cross-section.
//!
//! The second Jacobian factor `s3·d2 + c2(s3·d3 − c3·r2)` vanishes iff
//! `tan θ3 = c2·r2 / (d2 + c2·d3)`. Since `d2 > 0` the right-hand side never
//! hits `0/0`, so each singular branch is the graph of a smooth periodic
//! function of `θ2`, the two branches differing by `π` in `θ3`. Tracing by
//! `θ2` therefore needs no fold handling. The first factor `d3 + c3·d4`
//! contributes two horizontal lines when `d3 ≤ d4`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, Geometry, HalfSectionPoint};

pub const DEFAULT_TRACE_SAMPLES: usize = 2000;
pub const MIN_TRACE_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// Internal boundary preimage.
    S1,
    /// External boundary preimage.
    S2,
    LinePlus,
    LineMinus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::S1 => "S1",
            Branch::S2 => "S2",
            Branch::LinePlus => "LINE_PLUS",
            Branch::LineMinus => "LINE_MINUS",
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Branch::LinePlus | Branch::LineMinus)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the two smooth branches of the second determinant factor,
/// parametrized by `θ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchParam {
    geom: Geometry,
    /// 0 or π
    lift: f64,
}

/// A point of a singular branch together with the image velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub theta2: f64,
    pub theta3: f64,
    pub rho: f64,
    pub z: f64,
    pub drho: f64,
    pub dz: f64,
}

impl BranchParam {
    pub fn new(geom: Geometry, lift_index: usize) -> Self {
        Self {
            geom,
            lift: if lift_index == 0 { 0.0 } else { PI },
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn theta3(&self, theta2: f64) -> f64 {
        let c2 = theta2.cos();
        let Geometry { d2, d3, r2, .. } = self.geom;
        wrap_angle((c2 * r2).atan2(d2 + c2 * d3) + self.lift)
    }

    pub fn eval(&self, theta2: f64) -> BranchPoint {
        let Geometry { d2, d3, d4, r2 } = self.geom;
        let (s2, c2) = theta2.sin_cos();
        let n = c2 * r2;
        let d = d2 + c2 * d3;
        let theta3 = wrap_angle(n.atan2(d) + self.lift);
        let dtheta3 = -s2 * r2 * d2 / (n * n + d * d);
        let (s3, c3) = theta3.sin_cos();
        let f = d3 + c3 * d4;
        let g = s3 * d4 + r2;
        let k = d2 + c2 * f;
        let df = -s3 * d4 * dtheta3;
        let dg = c3 * d4 * dtheta3;
        let dk = -s2 * f + c2 * df;
        let rho = k.hypot(g);
        let drho = if rho > 0.0 {
            (k * dk + g * dg) / rho
        } else {
            0.0
        };
        BranchPoint {
            theta2,
            theta3,
            rho,
            z: -s2 * f,
            drho,
            dz: -c2 * f - s2 * df,
        }
    }
}

/// A sampled singular branch and its image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularCurve {
    pub branch: Branch,
    /// `(θ2, θ3)` samples, consecutive in `θ2`, closing up periodically.
    pub joints: Vec<(f64, f64)>,
    pub image: Vec<HalfSectionPoint>,
    /// Which lift of the branch parametrization produced this curve
    /// (unused for the singular lines).
    pub lift_index: usize,
}

impl SingularCurve {
    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    /// Parametrization of S-branches; `None` for singular lines.
    pub fn param(&self, geom: &Geometry) -> Option<BranchParam> {
        (!self.branch.is_line()).then(|| BranchParam::new(*geom, self.lift_index))
    }

    pub fn max_rho(&self) -> f64 {
        self.image.iter().fold(0.0, |m, p| m.max(p.rho))
    }
}

/// `θ2` values on the S-curves for a given `θ3`: `c2 = s3·d2 / (c3·r2 − s3·d3)`.
pub fn singular_theta2(geom: &Geometry, theta3: f64) -> Vec<f64> {
    let (s3, c3) = theta3.sin_cos();
    let denom = c3 * geom.r2 - s3 * geom.d3;
    let numer = s3 * geom.d2;
    if denom.abs() <= 1e-14 * geom.scale() {
        return Vec::new();
    }
    let c2 = numer / denom;
    if c2.abs() > 1.0 {
        return Vec::new();
    }
    let a = c2.acos();
    if a == 0.0 {
        vec![0.0]
    } else {
        vec![-a, a]
    }
}

/// `θ3` angles of the singular lines `d3 + c3·d4 = 0`; empty when `d3 > d4`.
pub fn singular_line_angles(geom: &Geometry) -> Vec<f64> {
    let ratio = geom.d3 / geom.d4;
    if ratio > 1.0 + 1e-12 {
        return Vec::new();
    }
    if (ratio - 1.0).abs() <= 1e-12 {
        return vec![-PI];
    }
    let a = (-ratio).acos();
    vec![a, -a]
}

/// Samples the S-branches (and the singular lines when `d3 ≤ d4`).
///
/// The S-branch with the larger radial extent is labelled S2 (external
/// boundary). Output order: S1, S2, then lines.
pub fn trace_singular_set(geom: &Geometry, n_samples: usize) -> Result<Vec<SingularCurve>> {
    if n_samples < MIN_TRACE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "n_samples must be >= {MIN_TRACE_SAMPLES}, got {n_samples}"
        )));
    }
    let grid: Vec<f64> = (0..n_samples)
        .map(|i| -PI + TAU * i as f64 / n_samples as f64)
        .collect();

    let mut branches: Vec<SingularCurve> = (0..2)
        .map(|lift| {
            let param = BranchParam::new(*geom, lift);
            let mut joints = Vec::with_capacity(n_samples);
            let mut image = Vec::with_capacity(n_samples);
            for &t2 in &grid {
                let p = param.eval(t2);
                joints.push((t2, p.theta3));
                image.push(HalfSectionPoint::new(p.rho, p.z));
            }
            SingularCurve {
                branch: Branch::S1,
                joints,
                image,
                lift_index: lift,
            }
        })
        .collect();
    let external = if branches[0].max_rho() >= branches[1].max_rho() {
        0
    } else {
        1
    };
    branches[external].branch = Branch::S2;
    branches.sort_by_key(|c| c.branch);

    let labels = [Branch::LinePlus, Branch::LineMinus];
    for (theta3, branch) in singular_line_angles(geom).into_iter().zip(labels) {
        let point = line_image(geom, theta3);
        branches.push(SingularCurve {
            branch,
            joints: grid.iter().map(|&t2| (t2, theta3)).collect(),
            image: vec![point; n_samples],
            lift_index: 0,
        });
    }
    Ok(branches)
}

fn line_image(geom: &Geometry, theta3: f64) -> HalfSectionPoint {
    let g = theta3.sin() * geom.d4 + geom.r2;
    HalfSectionPoint::new(geom.d2.hypot(g), 0.0)
}

/// Half-section image of a traced curve through forward kinematics with
/// `θ1 = 0`.
pub fn workspace_image(geom: &Geometry, curve: &SingularCurve) -> Vec<HalfSectionPoint> {
    curve
        .joints
        .iter()
        .map(|&(t2, t3)| {
            let q = crate::geometry::JointConfig::new(0.0, t2, t3);
            crate::kinematics::forward_kinematics(geom, &q).half_section()
        })
        .collect()
}

/// Images of the singular lines: two points on the `ρ` axis when `d3 < d4`,
/// one when `d3 = d4`, none otherwise. Sorted by `(ρ, z)`.
pub fn isolated_singular_points(geom: &Geometry) -> Vec<HalfSectionPoint> {
    let mut pts: Vec<HalfSectionPoint> = singular_line_angles(geom)
        .into_iter()
        .map(|t3| line_image(geom, t3))
        .collect();
    pts.sort_by(|a, b| a.rho.total_cmp(&b.rho).then(a.z.total_cmp(&b.z)));
    pts
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::geometry::JointConfig;
    use crate::kinematics::jacobian_det_closed;

    fn geom(d3: f64, d4: f64) -> Geometry {
        Geometry::new(1.0, d3, d4, 1.0).unwrap()
    }

    #[test]
    fn singular_theta2_examples() {
        let g = geom(2.0, 1.5);
        let at_zero = singular_theta2(&g, 0.0);
        assert_eq!(at_zero.len(), 2);
        assert_abs_diff_eq!(at_zero[1], PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at_zero[0], -PI / 2.0, epsilon = 1e-12);

        let at_right = singular_theta2(&g, PI / 2.0);
        assert_eq!(at_right.len(), 2);
        assert_abs_diff_eq!(at_right[1], 2.09440, epsilon = 1e-5);
        for t2 in at_right {
            let q = JointConfig::new(0.0, t2, PI / 2.0);
            assert!(jacobian_det_closed(&g, &q).abs() < 1e-12);
        }

        // c3·r2 − s3·d3 = 0
        let theta3 = (g.r2).atan2(g.d3);
        assert!(singular_theta2(&g, theta3).is_empty());
    }

    #[test]
    fn two_branches_when_d3_exceeds_d4() {
        let curves = trace_singular_set(&geom(2.0, 1.5), 400).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].branch, Branch::S1);
        assert_eq!(curves[1].branch, Branch::S2);
        assert!(curves[1].max_rho() > curves[0].max_rho());
    }

    #[test]
    fn lines_when_d4_exceeds_d3() {
        let g = geom(0.5, 1.5);
        let curves = trace_singular_set(&g, 400).unwrap();
        assert_eq!(curves.len(), 4);
        let want = (-1.0f64 / 3.0).acos();
        assert_eq!(curves[2].branch, Branch::LinePlus);
        assert_abs_diff_eq!(curves[2].joints[0].1, want, epsilon = 1e-12);
        assert_eq!(curves[3].branch, Branch::LineMinus);
        assert_abs_diff_eq!(curves[3].joints[0].1, -want, epsilon = 1e-12);
        // each line collapses to a single half-section point on the ρ axis
        for c in &curves[2..] {
            let img = workspace_image(&g, c);
            assert!(img
                .iter()
                .all(|p| p.distance(&img[0]) < 1e-12 && p.z.abs() < 1e-12));
        }
    }

    #[test]
    fn samples_are_singular() {
        for g in [geom(2.0, 1.5), geom(0.5, 1.5), geom(0.3, 2.9)] {
            for c in trace_singular_set(&g, 500).unwrap() {
                for &(t2, t3) in &c.joints {
                    let det = jacobian_det_closed(&g, &JointConfig::new(0.0, t2, t3));
                    assert!(det.abs() <= 1e-9, "{} {det}", c.branch);
                }
            }
        }
    }

    #[test]
    fn stored_image_matches_forward_kinematics() {
        let g = geom(1.3, 0.7);
        for c in trace_singular_set(&g, 300).unwrap() {
            for (a, b) in c.image.iter().zip(workspace_image(&g, &c)) {
                assert!(a.distance(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_velocity_matches_difference_quotient() {
        let g = geom(1.7, 2.3);
        for lift in 0..2 {
            let p = BranchParam::new(g, lift);
            for i in 0..50 {
                let t = -3.0 + 0.12 * i as f64;
                let h = 1e-6;
                let a = p.eval(t - h);
                let b = p.eval(t + h);
                let m = p.eval(t);
                assert_abs_diff_eq!(m.drho, (b.rho - a.rho) / (2.0 * h), epsilon = 1e-5);
                assert_abs_diff_eq!(m.dz, (b.z - a.z) / (2.0 * h), epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn isolated_points() {
        assert!(isolated_singular_points(&geom(2.0, 1.5)).is_empty());
        let pts = isolated_singular_points(&geom(0.5, 1.5));
        assert_eq!(pts.len(), 2);
        assert_abs_diff_eq!(pts[0].rho, 1.08239, epsilon = 1e-5);
        assert_abs_diff_eq!(pts[1].rho, 2.61313, epsilon = 1e-5);
        let one = isolated_singular_points(&geom(1.0, 1.0));
        assert_eq!(one.len(), 1);
        assert_abs_diff_eq!(one[0].rho, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_coarse_sampling() {
        assert!(trace_singular_set(&geom(2.0, 1.5), 50).is_err());
    }
}
