//! Forward kinematics and Jacobian determinants.

use crate::geometry::{CartesianPoint, Geometry, JointConfig};

/// Default central-difference step for [`jacobian_det_numeric`].
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Position of the end point.
///
/// With `F = d3 + c3·d4` and `G = s3·d4 + r2`:
/// `x = c1(d2 + c2F) − s1G`, `y = s1(d2 + c2F) + c1G`, `z = −s2F`.
pub fn forward_kinematics(geom: &Geometry, q: &JointConfig) -> CartesianPoint {
    let (s1, c1) = q.theta1.sin_cos();
    let (s2, c2) = q.theta2.sin_cos();
    let (s3, c3) = q.theta3.sin_cos();
    let f = geom.d3 + c3 * geom.d4;
    let g = s3 * geom.d4 + geom.r2;
    let k = geom.d2 + c2 * f;
    CartesianPoint::new(c1 * k - s1 * g, s1 * k + c1 * g, -s2 * f)
}

/// `det(J) = (d3 + c3·d4)(s3·d2 + c2(s3·d3 − c3·r2))`.
///
/// This is the position Jacobian determinant divided by `d4`; see
/// [`jacobian_det_numeric`].
pub fn jacobian_det_closed(geom: &Geometry, q: &JointConfig) -> f64 {
    let c2 = q.theta2.cos();
    let (s3, c3) = q.theta3.sin_cos();
    jacobian_first_factor(geom, c3) * jacobian_second_factor(geom, c2, s3, c3)
}

/// `d3 + c3·d4`, which vanishes when the end point meets the second joint axis.
pub fn jacobian_first_factor(geom: &Geometry, c3: f64) -> f64 {
    geom.d3 + c3 * geom.d4
}

/// `s3·d2 + c2(s3·d3 − c3·r2)`, whose zero set is the pair of curves S1, S2.
pub fn jacobian_second_factor(geom: &Geometry, c2: f64, s3: f64, c3: f64) -> f64 {
    s3 * geom.d2 + c2 * (s3 * geom.d3 - c3 * geom.r2)
}

/// Determinant of the central-difference Jacobian of [`forward_kinematics`].
pub fn jacobian_det_numeric(geom: &Geometry, q: &JointConfig, step: f64) -> f64 {
    let angles = [q.theta1, q.theta2, q.theta3];
    let mut cols = [[0.0; 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let mut plus = angles;
        let mut minus = angles;
        plus[j] += step;
        minus[j] -= step;
        // no wrapping: the difference quotient must see the raw offsets
        let p = forward_raw(geom, plus);
        let m = forward_raw(geom, minus);
        for i in 0..3 {
            col[i] = (p[i] - m[i]) / (2.0 * step);
        }
    }
    det3(cols)
}

fn forward_raw(geom: &Geometry, angles: [f64; 3]) -> [f64; 3] {
    let q = JointConfig {
        theta1: angles[0],
        theta2: angles[1],
        theta3: angles[2],
    };
    forward_kinematics(geom, &q).as_array()
}

/// Determinant of the matrix whose columns are `cols`.
fn det3(cols: [[f64; 3]; 3]) -> f64 {
    let [a, b, c] = cols;
    a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1])
        + c[0] * (a[1] * b[2] - a[2] * b[1])
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use approx::assert_abs_diff_eq;

    use super::*;

    fn reference() -> Geometry {
        Geometry::new(1.0, 2.0, 1.5, 1.0).unwrap()
    }

    #[test]
    fn zero_configuration() {
        let p = forward_kinematics(&reference(), &JointConfig::new(0.0, 0.0, 0.0));
        assert_abs_diff_eq!(p.x, 4.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_determinant_values() {
        let g = reference();
        assert_abs_diff_eq!(
            jacobian_det_closed(&g, &JointConfig::new(0.4, FRAC_PI_2, 0.0)),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            jacobian_det_closed(&g, &JointConfig::new(-1.0, 0.0, FRAC_PI_2)),
            6.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            jacobian_det_closed(&g, &JointConfig::new(2.0, FRAC_PI_2, FRAC_PI_2)),
            2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn numeric_determinant_values() {
        let g = reference();
        let h = DEFAULT_FD_STEP;
        assert_abs_diff_eq!(
            jacobian_det_numeric(&g, &JointConfig::new(0.0, 0.0, FRAC_PI_2), h),
            9.0,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            jacobian_det_numeric(&g, &JointConfig::new(0.0, FRAC_PI_2, FRAC_PI_2), h),
            3.0,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            jacobian_det_numeric(&g, &JointConfig::new(1.1, FRAC_PI_2, 0.0), h),
            0.0,
            epsilon = 1e-6
        );
        let q = JointConfig::new(0.3, FRAC_PI_4, -FRAC_PI_4);
        let ratio = jacobian_det_numeric(&g, &q, h) / jacobian_det_closed(&g, &q);
        assert_abs_diff_eq!(ratio, g.d4, epsilon = 1e-6);
    }
}
