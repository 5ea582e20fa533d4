//! Counting aspects: connected singularity-free regions of the `(θ2, θ3)` torus.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::kinematics::{jacobian_first_factor, jacobian_second_factor};

pub const DEFAULT_ASPECT_GRID: usize = 512;
pub const MIN_ASPECT_GRID: usize = 64;

/// Number of connected components of `{det J ≠ 0}` sampled on a
/// `grid_n × grid_n` cell-centred grid, 4-connected with wraparound on both
/// axes. Neighbouring cells belong to the same component when the
/// determinant has the same sign at both.
pub fn aspect_count(geom: &Geometry, grid_n: usize) -> Result<usize> {
    if grid_n < MIN_ASPECT_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid_n must be >= {MIN_ASPECT_GRID}, got {grid_n}"
        )));
    }
    let n = grid_n;
    let angle = |i: usize| -PI + TAU * (i as f64 + 0.5) / n as f64;
    let trig: Vec<(f64, f64)> = (0..n).map(|i| angle(i).sin_cos()).collect();

    // row = θ3 index, column = θ2 index
    let mut sign = vec![0i8; n * n];
    for (r, &(s3, c3)) in trig.iter().enumerate() {
        let first = jacobian_first_factor(geom, c3);
        for (c, &(_, c2)) in trig.iter().enumerate() {
            let det = first * jacobian_second_factor(geom, c2, s3, c3);
            sign[r * n + c] = if det > 0.0 {
                1
            } else if det < 0.0 {
                -1
            } else {
                0
            };
        }
    }

    let mut label = vec![usize::MAX; n * n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..n * n {
        if sign[start] == 0 || label[start] != usize::MAX {
            continue;
        }
        label[start] = components;
        queue.push_back(start);
        while let Some(cell) = queue.pop_front() {
            let (r, c) = (cell / n, cell % n);
            let neighbours = [
                ((r + n - 1) % n) * n + c,
                ((r + 1) % n) * n + c,
                r * n + (c + n - 1) % n,
                r * n + (c + 1) % n,
            ];
            for nb in neighbours {
                if label[nb] == usize::MAX && sign[nb] == sign[cell] {
                    label[nb] = components;
                    queue.push_back(nb);
                }
            }
        }
        components += 1;
    }
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_aspects_without_lines() {
        let g = Geometry::new(1.0, 2.0, 1.5, 1.0).unwrap();
        assert_eq!(aspect_count(&g, DEFAULT_ASPECT_GRID).unwrap(), 2);
    }

    #[test]
    fn lines_add_aspects() {
        let g = Geometry::new(1.0, 0.5, 1.5, 1.0).unwrap();
        let coarse = aspect_count(&g, 512).unwrap();
        assert!(coarse >= 2);
        assert_eq!(coarse, aspect_count(&g, 1024).unwrap());
    }

    #[test]
    fn rejects_small_grid() {
        let g = Geometry::new(1.0, 2.0, 1.5, 1.0).unwrap();
        assert!(aspect_count(&g, 16).is_err());
    }
}
