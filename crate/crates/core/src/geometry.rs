//! Geometry of the manipulator family and the coordinate types shared by the
//! kinematic routines.
//!
//! Every manipulator of the family has α2 = −90°, α3 = +90° and a zero offset
//! on the last joint. Only the four lengths `d2`, `d3`, `d4` and `r2` vary.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// DH lengths of one manipulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub r2: f64,
}

impl Geometry {
    /// Builds a geometry, rejecting non-positive or non-finite lengths.
    pub fn new(d2: f64, d3: f64, d4: f64, r2: f64) -> Result<Self> {
        for (name, value) in [("d2", d2), ("d3", d3), ("d4", d4), ("r2", r2)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidGeometry { name, value });
            }
        }
        Ok(Self { d2, d3, d4, r2 })
    }

    /// Geometry with `d2 = 1`.
    pub fn normalized(d3: f64, d4: f64, r2: f64) -> Result<Self> {
        Self::new(1.0, d3, d4, r2)
    }

    /// Rescales every length so that `d2 = 1`.
    pub fn to_normalized(&self) -> Self {
        self.scaled(1.0 / self.d2)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            d2: self.d2 * factor,
            d3: self.d3 * factor,
            d4: self.d4 * factor,
            r2: self.r2 * factor,
        }
    }

    /// Characteristic length used to make tolerances scale-free.
    pub fn scale(&self) -> f64 {
        self.d2 + self.d3 + self.d4 + self.r2
    }

    /// Largest distance from the first joint axis the end point can reach.
    pub fn reach(&self) -> f64 {
        self.d2 + (self.d3 + self.d4).hypot(self.r2)
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for inputs just below a multiple of it
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Smallest absolute difference between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Joint coordinates in radians, wrapped to `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl JointConfig {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
            theta3: wrap_angle(theta3),
        }
    }

    /// Largest per-joint angular distance to `other`.
    pub fn max_angle_distance(&self, other: &JointConfig) -> f64 {
        angle_distance(self.theta1, other.theta1)
            .max(angle_distance(self.theta2, other.theta2))
            .max(angle_distance(self.theta3, other.theta3))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Squared distance from the first joint axis.
    pub fn radial_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn half_section(&self) -> HalfSectionPoint {
        HalfSectionPoint {
            rho: self.x.hypot(self.y),
            z: self.z,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Point of the `(ρ, z)` half cross-section, `ρ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSectionPoint {
    pub rho: f64,
    pub z: f64,
}

impl HalfSectionPoint {
    pub fn new(rho: f64, z: f64) -> Self {
        Self { rho: rho.abs(), z }
    }

    pub fn distance(&self, other: &HalfSectionPoint) -> f64 {
        (self.rho - other.rho).hypot(self.z - other.z)
    }

    /// Representative 3D point with `y = 0`.
    pub fn to_cartesian(&self) -> CartesianPoint {
        CartesianPoint::new(self.rho, 0.0, self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_lengths() {
        assert!(Geometry::new(1.0, 2.0, 1.5, 1.0).is_ok());
        assert!(Geometry::new(1.0, 0.0, 1.5, 1.0).is_err());
        assert!(Geometry::new(1.0, 2.0, -1.5, 1.0).is_err());
        assert!(Geometry::new(1.0, 2.0, 1.5, f64::NAN).is_err());
        assert!(Geometry::new(0.0, 2.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn normalization_sets_unit_d2() {
        let g = Geometry::new(2.0, 4.0, 3.0, 2.0).unwrap().to_normalized();
        assert_eq!(g, Geometry::normalized(2.0, 1.5, 1.0).unwrap());
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(wrap_angle(-1e-300) <= 0.0);
        for k in -5..5 {
            let a = wrap_angle(0.3 + k as f64 * TAU);
            assert!((a - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_distance_wraps() {
        assert!(angle_distance(PI - 1e-3, -PI + 1e-3) < 2.1e-3);
    }
}
