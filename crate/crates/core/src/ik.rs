//! Inverse kinematics through the half-angle quartic in `t = tan(θ3/2)`.
//!
//! Writing `K = d2 + c2·F`, the position equations give `K² = R − G²` and
//! `(K − d2)² + z² = F²` with `R = x² + y²`. Eliminating `K`:
//!
//! `(F² + G² − d2² − z² − R)² − 4·d2²·(R − G²) = 0`,
//!
//! which is a quartic in `t` once `c3`, `s3` are replaced by their half-angle
//! forms and the denominators `(1 + t²)²` are cleared.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{wrap_angle, CartesianPoint, Geometry, JointConfig};
use crate::kinematics::forward_kinematics;
use crate::poly::{solve_half_angle, AngleRoot, QuarticPoly, DEFAULT_ROOT_TOL};

/// IK quartic in `t = tan(θ3/2)` for a target at squared radial distance
/// `radial_sq` and height `z`.
pub fn ik_quartic(geom: &Geometry, radial_sq: f64, z: f64) -> QuarticPoly {
    quartic_in_chart(geom, radial_sq, z, false)
}

/// Same quartic in the shifted half-angle `t' = tan((θ3 − π)/2)`.
pub fn ik_quartic_shifted(geom: &Geometry, radial_sq: f64, z: f64) -> QuarticPoly {
    quartic_in_chart(geom, radial_sq, z, true)
}

fn quartic_in_chart(geom: &Geometry, radial_sq: f64, z: f64, shifted: bool) -> QuarticPoly {
    let Geometry { d2, d3, d4, r2 } = *geom;
    // F² + G² = d3² + d4² + r2² + 2·d3·d4·c3 + 2·r2·d4·s3
    let a = d3 * d3 + d4 * d4 + r2 * r2 - d2 * d2 - z * z - radial_sq;
    let sign = if shifted { -1.0 } else { 1.0 };
    let b = sign * 2.0 * d3 * d4;
    let e = sign * 2.0 * r2 * d4;
    // (1+t²)·(F² + G² − d2² − z² − R) and (1+t²)·G, lowest power first
    let l = [a + b, 2.0 * e, a - b];
    let g = [r2, sign * 2.0 * d4, r2];
    let one = [1.0, 0.0, 1.0];
    let ll = square(l);
    let gg = square(g);
    let oo = square(one);
    let k = 4.0 * d2 * d2;
    let mut c = [0.0; 5];
    for i in 0..5 {
        c[i] = ll[i] - k * (radial_sq * oo[i] - gg[i]);
    }
    QuarticPoly::from_ascending(c)
}

fn square(p: [f64; 3]) -> [f64; 5] {
    [
        p[0] * p[0],
        2.0 * p[0] * p[1],
        p[1] * p[1] + 2.0 * p[0] * p[2],
        2.0 * p[1] * p[2],
        p[2] * p[2],
    ]
}

/// Result of [`inverse_kinematics`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkSolutions {
    pub solutions: Vec<JointConfig>,
    /// Multiplicity of each solution's `θ3` as a root of the quartic.
    pub multiplicities: Vec<u32>,
    /// Some root put the end point on the second joint axis (`F ≈ 0`): the
    /// target is an isolated singular point and `θ2` is free there.
    pub on_second_axis: bool,
    /// The quartic vanished identically.
    pub continuum: bool,
}

impl IkSolutions {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// All joint configurations placing the end point at `p`.
pub fn inverse_kinematics(geom: &Geometry, p: &CartesianPoint, tol: f64) -> IkSolutions {
    let radial_sq = p.radial_sq();
    let mut out = IkSolutions {
        solutions: Vec::new(),
        multiplicities: Vec::new(),
        on_second_axis: false,
        continuum: false,
    };
    let roots = match theta3_roots(geom, radial_sq, p.z, tol) {
        Ok(r) => r,
        Err(_) => {
            out.continuum = true;
            return out;
        }
    };
    let scale = geom.scale();
    let Geometry { d2, d3, d4, r2 } = *geom;
    for AngleRoot {
        theta: theta3,
        multiplicity,
    } in roots
    {
        let (s3, c3) = theta3.sin_cos();
        let f = d3 + c3 * d4;
        let g = s3 * d4 + r2;
        if f.abs() <= 1e-9 * scale {
            out.on_second_axis = true;
            continue;
        }
        // K = d2 + c2·F, directly from (K − d2)² + z² = F² and K² = R − G²
        let k = (radial_sq + d2 * d2 + p.z * p.z - f * f - g * g) / (2.0 * d2);
        let c2 = (k - d2) / f;
        let s2 = -p.z / f;
        if (c2 * c2 + s2 * s2 - 1.0).abs() > 1e-6 {
            continue;
        }
        let theta2 = s2.atan2(c2);
        let theta1 = p.y.atan2(p.x) - g.atan2(k);
        out.solutions
            .push(JointConfig::new(wrap_angle(theta1), theta2, theta3));
        out.multiplicities.push(multiplicity);
    }
    out
}

/// Convenience wrapper with [`DEFAULT_ROOT_TOL`].
pub fn inverse_kinematics_default(geom: &Geometry, p: &CartesianPoint) -> IkSolutions {
    inverse_kinematics(geom, p, DEFAULT_ROOT_TOL)
}

/// Real `θ3` roots of the IK quartic, solved in both half-angle charts.
pub fn theta3_roots(geom: &Geometry, radial_sq: f64, z: f64, tol: f64) -> Result<Vec<AngleRoot>> {
    solve_half_angle(&ik_quartic(geom, radial_sq, z), tol)
}

/// Number of distinct IK solutions at a half-section point.
pub fn solution_count(geom: &Geometry, rho: f64, z: f64) -> usize {
    inverse_kinematics_default(geom, &CartesianPoint::new(rho, 0.0, z)).len()
}

/// Position error `|FK(q) − p|` of a candidate solution.
pub fn residual(geom: &Geometry, q: &JointConfig, p: &CartesianPoint) -> f64 {
    forward_kinematics(geom, q).distance(p)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    use super::*;
    use crate::poly::solve_roots;

    fn reference() -> Geometry {
        Geometry::new(1.0, 2.0, 1.5, 1.0).unwrap()
    }

    #[test]
    fn quartic_has_root_of_known_config() {
        let g = reference();
        let q = JointConfig::new(0.0, FRAC_PI_4, FRAC_PI_4);
        let p = forward_kinematics(&g, &q);
        assert!((p.radial_sq() - 14.2585).abs() < 1e-4);
        let poly = ik_quartic(&g, p.radial_sq(), p.z);
        let pattern = solve_roots(&poly, DEFAULT_ROOT_TOL).unwrap();
        assert!(pattern
            .roots
            .iter()
            .any(|r| (r.t - FRAC_PI_8.tan()).abs() < 1e-9));
    }

    #[test]
    fn shifted_chart_matches_reversal() {
        let g = reference();
        let a = ik_quartic(&g, 3.0, 0.7).ascending();
        let b = ik_quartic_shifted(&g, 3.0, 0.7).ascending();
        // t' = −1/t  ⇒  shifted(t') = t'^4 · p(−1/t')
        for i in 0..5 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((b[i] - sign * a[4 - i]).abs() < 1e-12 * (1.0 + a[4 - i].abs()));
        }
    }

    #[test]
    fn unreachable_point() {
        let g = reference();
        let poly = ik_quartic(&g, 100.0 * 100.0, 0.0);
        assert!(solve_roots(&poly, DEFAULT_ROOT_TOL)
            .unwrap()
            .roots
            .is_empty());
        assert!(inverse_kinematics_default(&g, &CartesianPoint::new(100.0, 0.0, 0.0)).is_empty());
    }

    #[test]
    fn round_trip_contains_seed() {
        let g = reference();
        let q = JointConfig::new(0.0, FRAC_PI_4, FRAC_PI_4);
        let sols = inverse_kinematics_default(&g, &forward_kinematics(&g, &q));
        assert!(sols.len() == 2 || sols.len() == 4, "{sols:?}");
        assert!(sols
            .solutions
            .iter()
            .any(|s| s.max_angle_distance(&q) < 1e-9));
    }

    #[test]
    fn isolated_point_is_flagged() {
        // d3 < d4: F = 0 at θ3 = ±acos(−d3/d4)
        let g = Geometry::new(1.0, 0.5, 1.5, 1.0).unwrap();
        let theta3 = (-g.d3 / g.d4).acos();
        let q = JointConfig::new(0.0, 0.3, theta3);
        let sols = inverse_kinematics_default(&g, &forward_kinematics(&g, &q));
        assert!(sols.on_second_axis);
    }
}
