//! Real roots of low-degree polynomials with explicit multiplicities.
//!
//! Roots are isolated by recursion on the derivative: the critical points of
//! `p` split the search interval into monotone pieces, each holding at most one
//! simple root, and a critical point where `p` itself vanishes is a multiple
//! root whose multiplicity is one more than its multiplicity in `p'`. The real
//! line is covered by two charts, `t ∈ [-1, 1]` on `p` and `s = 1/t ∈ [-1, 1]`
//! on the reversed polynomial, so that roots at or near infinity (a vanishing
//! leading coefficient) are resolved as accurately as finite ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default clustering tolerance: roots closer than `tol·(1 + |t|)` are equal.
pub const DEFAULT_ROOT_TOL: f64 = 1e-7;

/// Chart overlap so that roots at `|t| = 1` are seen from both sides.
const CHART_MARGIN: f64 = 1e-3;

/// Polynomial of degree at most four, coefficients stored lowest power first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticPoly {
    coeffs: [f64; 5],
}

impl QuarticPoly {
    /// `coeffs[i]` multiplies `t^i`.
    pub fn from_ascending(coeffs: [f64; 5]) -> Self {
        Self { coeffs }
    }

    /// Coefficients given as `a4, a3, a2, a1, a0`.
    pub fn from_descending(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self {
            coeffs: [a0, a1, a2, a3, a4],
        }
    }

    pub fn ascending(&self) -> [f64; 5] {
        self.coeffs
    }

    pub fn descending(&self) -> [f64; 5] {
        let c = self.coeffs;
        [c[4], c[3], c[2], c[1], c[0]]
    }

    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }

    /// `s⁴·p(1/s)`.
    pub fn reversed(&self) -> Self {
        let c = self.coeffs;
        Self {
            coeffs: [c[4], c[3], c[2], c[1], c[0]],
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// `k`-th Taylor coefficient at `t`, i.e. `p^(k)(t) / k!`, together with
    /// the same sum taken over absolute values (its rounding scale).
    pub fn taylor(&self, k: usize, t: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut scale = 0.0;
        for i in k..5 {
            let w = binomial(i, k) * t.powi((i - k) as i32);
            value += self.coeffs[i] * w;
            scale += (self.coeffs[i] * w).abs();
        }
        (value, scale)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// A real root and how many times it is repeated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub t: f64,
    pub multiplicity: u32,
}

/// All real roots of a [`QuarticPoly`], clustered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootPattern {
    /// Finite roots in increasing order.
    pub roots: Vec<Root>,
    /// Multiplicity of the root at infinity (degree drop).
    pub at_infinity: u32,
    pub tol: f64,
}

impl RootPattern {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum::<u32>() + self.at_infinity
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.roots
            .iter()
            .map(|r| r.multiplicity)
            .chain(std::iter::once(self.at_infinity))
            .max()
            .unwrap_or(0)
    }

    /// Number of distinct roots (infinity included) repeated at least `m` times.
    pub fn count_at_least(&self, m: u32) -> usize {
        self.roots.iter().filter(|r| r.multiplicity >= m).count()
            + usize::from(self.at_infinity >= m && m > 0)
    }

    pub fn distinct(&self) -> usize {
        self.roots.len() + usize::from(self.at_infinity > 0)
    }

    /// `(t, multiplicity)` pairs; convenient for comparisons in tests.
    pub fn pairs(&self) -> Vec<(f64, u32)> {
        self.roots.iter().map(|r| (r.t, r.multiplicity)).collect()
    }
}

/// Real roots of `poly` over the whole line, with multiplicities.
///
/// Roots with `|1/t| ≤ tol` are reported in `at_infinity`.
pub fn solve_roots(poly: &QuarticPoly, tol: f64) -> Result<RootPattern> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "root tolerance must be > 0, got {tol}"
        )));
    }
    if poly.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let vtol = tol * tol;
    let bound = 1.0 + CHART_MARGIN;

    let mut finite: Vec<Root> = roots_in(&poly.ascending(), -bound, bound, vtol);
    let mut at_infinity = 0;
    for r in roots_in(&poly.reversed().ascending(), -bound, bound, vtol) {
        if r.t.abs() <= tol {
            at_infinity = at_infinity.max(r.multiplicity);
            continue;
        }
        let t = 1.0 / r.t;
        merge_chart_root(&mut finite, Root { t, ..r }, tol);
    }
    finite.sort_by(|a, b| a.t.total_cmp(&b.t));
    let roots = cluster(finite, tol, 4 - at_infinity.min(4));
    Ok(RootPattern {
        roots,
        at_infinity,
        tol,
    })
}

/// A root expressed as an angle `θ = 2·atan(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRoot {
    /// Angle in `[-π, π)`.
    pub theta: f64,
    pub multiplicity: u32,
}

/// Real roots of a half-angle polynomial in `t = tan(θ/2)`, returned as
/// angles. The neighbourhood of `θ = π` is solved on the reversed polynomial,
/// so a vanishing leading coefficient needs no special casing.
pub fn solve_half_angle(poly: &QuarticPoly, tol: f64) -> Result<Vec<AngleRoot>> {
    if poly.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let vtol = tol * tol;
    let bound = 1.0 + CHART_MARGIN;
    let mut out: Vec<AngleRoot> = roots_in(&poly.ascending(), -bound, bound, vtol)
        .into_iter()
        .map(|r| AngleRoot {
            theta: 2.0 * r.t.atan(),
            multiplicity: r.multiplicity,
        })
        .collect();
    for r in roots_in(&poly.reversed().ascending(), -bound, bound, vtol) {
        // tan(θ/2) = 1/s  ⇒  θ/2 = atan2(1, s) ∈ (0, π)
        let theta = crate::geometry::wrap_angle(2.0 * 1f64.atan2(r.t));
        let dup = out
            .iter_mut()
            .find(|a| crate::geometry::angle_distance(a.theta, theta) <= 2.0 * tol);
        match dup {
            Some(a) => a.multiplicity = a.multiplicity.max(r.multiplicity),
            None => out.push(AngleRoot {
                theta,
                multiplicity: r.multiplicity,
            }),
        }
    }
    out.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(out)
}

/// Number of leading Taylor coefficients of `poly` at `t0` that vanish
/// relative to their rounding scale, i.e. the multiplicity of `t0` as a root.
///
/// The scale is floored at the largest coefficient: near a multiple root the
/// low-order coefficients are themselves cancellation noise, so measuring
/// them only against their own terms would never call them zero.
pub fn multiplicity_at(poly: &QuarticPoly, t0: f64, tol: f64) -> u32 {
    let floor = poly.max_abs_coeff();
    let mut m = 0;
    for k in 0..=4 {
        let (value, scale) = poly.taylor(k, t0);
        let scale = scale.max(floor);
        if scale == 0.0 || value.abs() <= tol * scale {
            m += 1;
        } else {
            break;
        }
    }
    m
}

fn merge_chart_root(roots: &mut Vec<Root>, r: Root, tol: f64) {
    match roots
        .iter_mut()
        .find(|x| (x.t - r.t).abs() <= tol * (1.0 + x.t.abs()))
    {
        Some(x) => x.multiplicity = x.multiplicity.max(r.multiplicity),
        None => roots.push(r),
    }
}

/// Merges sorted roots closer than `tol·(1 + |t|)`.
fn cluster(sorted: Vec<Root>, tol: f64, cap: u32) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::with_capacity(sorted.len());
    for r in sorted {
        if let Some(last) = out.last_mut() {
            if (r.t - last.t).abs() <= tol * (1.0 + last.t.abs()) {
                let m = last.multiplicity + r.multiplicity;
                last.t =
                    (last.t * last.multiplicity as f64 + r.t * r.multiplicity as f64) / m as f64;
                last.multiplicity = m.min(cap.max(1));
                continue;
            }
        }
        out.push(r);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_abs(c: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    c.iter().rev().fold(0.0, |acc, &a| acc * ax + a.abs())
}

/// Roots of the polynomial `c` (lowest power first) inside `[lo, hi]`.
///
/// A critical point `x` counts as a root when `|p(x)| ≤ vtol·Σ|aᵢ||x|ⁱ`.
fn roots_in(c: &[f64], lo: f64, hi: f64, vtol: f64) -> Vec<Root> {
    let Some(deg) = c.iter().rposition(|&a| a != 0.0) else {
        return Vec::new();
    };
    let c = &c[..=deg];
    match deg {
        0 => return Vec::new(),
        1 => {
            let r = -c[0] / c[1];
            return if (lo..=hi).contains(&r) {
                vec![Root {
                    t: r,
                    multiplicity: 1,
                }]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }

    let derivative: Vec<f64> = c[1..]
        .iter()
        .enumerate()
        .map(|(i, &a)| a * (i + 1) as f64)
        .collect();
    let critical = roots_in(&derivative, lo, hi, vtol);

    let mut out = Vec::new();
    // (position, sign of p there; 0 when the point is itself a root)
    let mut breaks: Vec<(f64, f64)> = Vec::with_capacity(critical.len() + 2);
    breaks.push((lo, horner(c, lo).signum()));
    for cr in &critical {
        let v = horner(c, cr.t);
        if v.abs() <= vtol * horner_abs(c, cr.t) {
            out.push(Root {
                t: cr.t,
                multiplicity: cr.multiplicity + 1,
            });
            breaks.push((cr.t, 0.0));
        } else {
            breaks.push((cr.t, v.signum()));
        }
    }
    breaks.push((hi, horner(c, hi).signum()));

    for w in breaks.windows(2) {
        let (a, sa) = w[0];
        let (b, sb) = w[1];
        if sa * sb < 0.0 {
            out.push(Root {
                t: bisect(c, a, b, sa),
                multiplicity: 1,
            });
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, sign_a: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let v = horner(c, m);
        if v == 0.0 {
            return m;
        }
        if v.signum() == sign_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
