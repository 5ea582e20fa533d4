//! Cusps and nodes of the singular-curve images: the numerical oracle.
//!
//! A cusp is a point where the image velocity of a singular branch reverses
//! (the kernel of the Jacobian is tangent to the branch). Every candidate is
//! confirmed by a root of multiplicity ≥ 3 of the IK quartic; reversals that
//! fail confirmation, such as the fold of the half-section where a branch
//! image crosses the first joint axis, are kept as diagnostics only.
//!
//! Nodes are transverse intersections between the polylines of WS1 and WS2
//! (self- and cross-intersections), refined by Newton iteration on the branch
//! parameters.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{Geometry, HalfSectionPoint};
use crate::ik::{ik_quartic, ik_quartic_shifted};
use crate::poly::multiplicity_at;
use crate::trace::{
    isolated_singular_points, trace_singular_set, Branch, BranchParam, SingularCurve,
    DEFAULT_TRACE_SAMPLES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspPoint {
    pub location: HalfSectionPoint,
    pub theta2: f64,
    pub theta3: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodePoint {
    pub location: HalfSectionPoint,
    /// `(θ2, θ3)` preimages on the two passages.
    pub preimages: [(f64, f64); 2],
    pub branches: (Branch, Branch),
    /// Coincides with the image of a singular line.
    pub at_isolated_point: bool,
}

impl NodePoint {
    pub fn is_cross(&self) -> bool {
        self.branches.0 != self.branches.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureCount {
    pub n_cusps: usize,
    pub n_nodes: usize,
}

/// Tolerances of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Samples per S-branch.
    pub samples: usize,
    /// Relative tolerance on the first three Taylor coefficients of the IK
    /// quartic at a cusp candidate.
    pub cusp_confirm_tol: f64,
    /// Node de-duplication and isolated-point merging radius, relative to
    /// the geometry scale.
    pub merge_radius: f64,
    /// Intersections this close to a cusp (relative) are discarded.
    pub cusp_exclusion_radius: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_TRACE_SAMPLES,
            cusp_confirm_tol: 1e-6,
            merge_radius: 1e-6,
            cusp_exclusion_radius: 1e-6,
        }
    }
}

/// Everything the oracle found for one geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub curves: Vec<SingularCurve>,
    pub cusps: Vec<CuspPoint>,
    pub nodes: Vec<NodePoint>,
    /// Velocity reversals without a triple root.
    pub unconfirmed_reversals: Vec<HalfSectionPoint>,
    pub isolated_points: Vec<HalfSectionPoint>,
}

impl FeatureReport {
    pub fn count(&self) -> FeatureCount {
        FeatureCount {
            n_cusps: self.cusps.len(),
            n_nodes: self.nodes.len(),
        }
    }

    pub fn cusps_on(&self, branch: Branch) -> usize {
        self.cusps.iter().filter(|c| c.branch == branch).count()
    }

    pub fn cross_nodes(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_cross()).count()
    }

    pub fn isolated_nodes(&self) -> usize {
        self.nodes.iter().filter(|n| n.at_isolated_point).count()
    }

    pub fn curve(&self, branch: Branch) -> Option<&SingularCurve> {
        self.curves.iter().find(|c| c.branch == branch)
    }
}

/// Cusps of the S-branch images, plus the reversals that failed confirmation.
pub fn detect_cusps(
    geom: &Geometry,
    curves: &[SingularCurve],
    config: &FeatureConfig,
) -> (Vec<CuspPoint>, Vec<HalfSectionPoint>) {
    let mut cusps = Vec::new();
    let mut rejected = Vec::new();
    for curve in curves {
        let Some(param) = curve.param(geom) else {
            continue;
        };
        let n = curve.len();
        let pts: Vec<_> = curve.joints.iter().map(|&(t2, _)| param.eval(t2)).collect();
        for i in 0..n {
            let a = &pts[i];
            let b = &pts[(i + 1) % n];
            if a.drho * b.drho + a.dz * b.dz >= 0.0 {
                continue;
            }
            let hi = if i + 1 == n {
                b.theta2 + std::f64::consts::TAU
            } else {
                b.theta2
            };
            let theta2 = refine_reversal(&param, a.theta2, hi, (a.drho, a.dz));
            let p = param.eval(theta2);
            let location = HalfSectionPoint::new(p.rho, p.z);
            if has_triple_root(geom, p.rho, p.z, p.theta3, config.cusp_confirm_tol) {
                cusps.push(CuspPoint {
                    location,
                    theta2: crate::geometry::wrap_angle(theta2),
                    theta3: p.theta3,
                    branch: curve.branch,
                });
            } else {
                rejected.push(location);
            }
        }
    }
    sort_points(&mut cusps, |c| c.location);
    (cusps, rejected)
}

/// Bisection on `v(θ)·v(lo)` for the parameter where the image velocity
/// turns around.
fn refine_reversal(param: &BranchParam, mut lo: f64, mut hi: f64, v0: (f64, f64)) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = param.eval(mid);
        if p.drho * v0.0 + p.dz * v0.1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// True when `θ3` is a root of multiplicity ≥ 3 of the IK quartic at `(ρ, z)`.
pub fn has_triple_root(geom: &Geometry, rho: f64, z: f64, theta3: f64, tol: f64) -> bool {
    root_multiplicity(geom, rho, z, theta3, tol) >= 3
}

/// Multiplicity of `θ3` as a root of the IK quartic at `(ρ, z)`, evaluated in
/// whichever half-angle chart keeps `|t| ≤ 1`.
pub fn root_multiplicity(geom: &Geometry, rho: f64, z: f64, theta3: f64, tol: f64) -> u32 {
    let t = (0.5 * theta3).tan();
    if t.abs() <= 1.0 {
        multiplicity_at(&ik_quartic(geom, rho * rho, z), t, tol)
    } else {
        let shifted = (0.5 * (theta3 - std::f64::consts::PI)).tan();
        multiplicity_at(&ik_quartic_shifted(geom, rho * rho, z), shifted, tol)
    }
}

const CHAIN: usize = 16;

struct Chain {
    curve: usize,
    start: usize,
    end: usize,
    min: (f64, f64),
    max: (f64, f64),
}

/// Self- and cross-intersections of the S-branch images.
pub fn detect_nodes(
    geom: &Geometry,
    curves: &[SingularCurve],
    cusps: &[CuspPoint],
    config: &FeatureConfig,
) -> Vec<NodePoint> {
    let scale = geom.scale();
    let sbranches: Vec<(usize, &SingularCurve)> = curves
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.branch.is_line())
        .collect();

    let mut chains = Vec::new();
    for &(ci, curve) in &sbranches {
        let n = curve.len();
        let mut start = 0;
        while start < n {
            let end = (start + CHAIN).min(n);
            let mut min = (f64::INFINITY, f64::INFINITY);
            let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            // segment s joins image[s] and image[s + 1 mod n]
            for s in start..end {
                for p in [&curve.image[s], &curve.image[(s + 1) % n]] {
                    min = (min.0.min(p.rho), min.1.min(p.z));
                    max = (max.0.max(p.rho), max.1.max(p.z));
                }
            }
            chains.push(Chain {
                curve: ci,
                start,
                end,
                min,
                max,
            });
            start = end;
        }
    }

    let mut raw = Vec::new();
    for (a, ca) in chains.iter().enumerate() {
        for cb in &chains[a..] {
            if ca.max.0 < cb.min.0
                || cb.max.0 < ca.min.0
                || ca.max.1 < cb.min.1
                || cb.max.1 < ca.min.1
            {
                continue;
            }
            let same = ca.curve == cb.curve;
            let (curve_a, curve_b) = (&curves[ca.curve], &curves[cb.curve]);
            let (na, nb) = (curve_a.len(), curve_b.len());
            for i in ca.start..ca.end {
                let j0 = if same && ca.start == cb.start {
                    i + 1
                } else {
                    cb.start
                };
                for j in j0..cb.end {
                    if same && (j == i || (j + 1) % na == i || (i + 1) % na == j) {
                        continue;
                    }
                    let p0 = curve_a.image[i];
                    let p1 = curve_a.image[(i + 1) % na];
                    let q0 = curve_b.image[j];
                    let q1 = curve_b.image[(j + 1) % nb];
                    if let Some((u, v)) = segment_intersection(p0, p1, q0, q1) {
                        raw.push((ca.curve, i, u, cb.curve, j, v));
                    }
                }
            }
        }
    }

    let isolated = isolated_singular_points(geom);
    let merge = config.merge_radius * scale;
    let mut nodes: Vec<NodePoint> = Vec::new();
    for (ci, i, u, cj, j, v) in raw {
        let (curve_a, curve_b) = (&curves[ci], &curves[cj]);
        let pa = curve_a.param(geom).expect("S-branch");
        let pb = curve_b.param(geom).expect("S-branch");
        let ta = lerp_param(curve_a, i, u);
        let tb = lerp_param(curve_b, j, v);
        let (ta, tb) = refine_intersection(&pa, &pb, ta, tb, step_of(curve_a), step_of(curve_b));
        let a = pa.eval(ta);
        let b = pb.eval(tb);
        let location = HalfSectionPoint::new(0.5 * (a.rho + b.rho), 0.5 * (a.z + b.z));
        if cusps
            .iter()
            .any(|c| c.location.distance(&location) <= config.cusp_exclusion_radius * scale)
        {
            continue;
        }
        if nodes
            .iter()
            .any(|n| n.location.distance(&location) <= merge)
        {
            continue;
        }
        let at_isolated_point = isolated
            .iter()
            .any(|p| p.distance(&location) <= merge.max(1e-6));
        nodes.push(NodePoint {
            location,
            preimages: [
                (crate::geometry::wrap_angle(ta), a.theta3),
                (crate::geometry::wrap_angle(tb), b.theta3),
            ],
            branches: (curve_a.branch, curve_b.branch),
            at_isolated_point,
        });
    }
    sort_points(&mut nodes, |n| n.location);
    nodes
}

fn step_of(curve: &SingularCurve) -> f64 {
    std::f64::consts::TAU / curve.len() as f64
}

fn lerp_param(curve: &SingularCurve, i: usize, u: f64) -> f64 {
    curve.joints[i].0 + u * step_of(curve)
}

/// Newton iteration on `Pa(ta) = Pb(tb)`; falls back to the polyline estimate
/// if the iteration wanders off the bracketing segments.
fn refine_intersection(
    pa: &BranchParam,
    pb: &BranchParam,
    ta0: f64,
    tb0: f64,
    ha: f64,
    hb: f64,
) -> (f64, f64) {
    let (mut ta, mut tb) = (ta0, tb0);
    for _ in 0..40 {
        let a = pa.eval(ta);
        let b = pb.eval(tb);
        let f = (a.rho - b.rho, a.z - b.z);
        // [va  -vb] · (δa, δb) = −f
        let det = a.drho * (-b.dz) - (-b.drho) * a.dz;
        if det.abs() < 1e-300 {
            break;
        }
        let da = (-f.0 * (-b.dz) - (-b.drho) * (-f.1)) / det;
        let db = (a.drho * (-f.1) - a.dz * (-f.0)) / det;
        ta += da;
        tb += db;
        if (ta - ta0).abs() > 2.0 * ha || (tb - tb0).abs() > 2.0 * hb {
            return (ta0, tb0);
        }
        if da.abs() < 1e-15 && db.abs() < 1e-15 {
            break;
        }
    }
    (ta, tb)
}

/// Parameters `(u, v) ∈ [0,1)²` of a proper crossing of segments `p0p1`, `q0q1`.
fn segment_intersection(
    p0: HalfSectionPoint,
    p1: HalfSectionPoint,
    q0: HalfSectionPoint,
    q1: HalfSectionPoint,
) -> Option<(f64, f64)> {
    let r = (p1.rho - p0.rho, p1.z - p0.z);
    let s = (q1.rho - q0.rho, q1.z - q0.z);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let w = (q0.rho - p0.rho, q0.z - p0.z);
    let u = (w.0 * s.1 - w.1 * s.0) / den;
    let v = (w.0 * r.1 - w.1 * r.0) / den;
    ((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v)).then_some((u, v))
}

fn sort_points<T>(items: &mut [T], key: impl Fn(&T) -> HalfSectionPoint) {
    items.sort_by(|a, b| {
        let (pa, pb) = (key(a), key(b));
        pa.rho.total_cmp(&pb.rho).then(pa.z.total_cmp(&pb.z))
    });
}

/// Runs the full oracle: trace, cusps, nodes.
pub fn analyze_features(geom: &Geometry, config: &FeatureConfig) -> Result<FeatureReport> {
    let curves = trace_singular_set(geom, config.samples)?;
    let (cusps, unconfirmed_reversals) = detect_cusps(geom, &curves, config);
    let nodes = detect_nodes(geom, &curves, &cusps, config);
    Ok(FeatureReport {
        isolated_points: isolated_singular_points(geom),
        curves,
        cusps,
        nodes,
        unconfirmed_reversals,
    })
}

/// Cusp and node counts with default tolerances.
pub fn count_features(geom: &Geometry) -> FeatureCount {
    analyze_features(geom, &FeatureConfig::default())
        .expect("default sample count is valid")
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(d3: f64, d4: f64) -> Geometry {
        Geometry::new(1.0, d3, d4, 1.0).unwrap()
    }

    #[test]
    fn segment_crossing() {
        let p = |r, z| HalfSectionPoint::new(r, z);
        let hit = segment_intersection(p(0.0, 0.0), p(2.0, 2.0), p(0.0, 2.0), p(2.0, 0.0));
        let (u, v) = hit.unwrap();
        assert!((u - 0.5).abs() < 1e-15 && (v - 0.5).abs() < 1e-15);
        assert!(segment_intersection(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)).is_none());
    }

    #[test]
    fn reference_geometry_has_four_cusps_no_nodes() {
        let report = analyze_features(&geom(2.0, 1.5), &FeatureConfig::default()).unwrap();
        assert_eq!(
            report.count(),
            FeatureCount {
                n_cusps: 4,
                n_nodes: 0
            }
        );
        assert_eq!(report.cusps_on(Branch::S1), 4);
    }

    #[test]
    fn cusps_confirmed_by_triple_root() {
        let g = geom(2.0, 1.5);
        let report = analyze_features(&g, &FeatureConfig::default()).unwrap();
        for c in &report.cusps {
            assert!(root_multiplicity(&g, c.location.rho, c.location.z, c.theta3, 1e-6) >= 3);
        }
    }

    #[test]
    fn mirrored_in_z() {
        let report = analyze_features(&geom(2.0, 3.0), &FeatureConfig::default()).unwrap();
        for c in &report.cusps {
            assert!(report.cusps.iter().any(|d| {
                (d.location.rho - c.location.rho).abs() < 1e-9
                    && (d.location.z + c.location.z).abs() < 1e-9
            }));
        }
        for n in &report.nodes {
            assert!(report.nodes.iter().any(|m| {
                (m.location.rho - n.location.rho).abs() < 1e-9
                    && (m.location.z + n.location.z).abs() < 1e-9
            }));
        }
    }

    #[test]
    fn domain_examples() {
        assert_eq!(
            count_features(&geom(2.0, 0.1)),
            FeatureCount {
                n_cusps: 0,
                n_nodes: 0
            }
        );
        assert_eq!(
            count_features(&geom(2.0, 0.5)),
            FeatureCount {
                n_cusps: 4,
                n_nodes: 2
            }
        );
        assert_eq!(count_features(&geom(2.0, 2.5)).n_cusps, 2);
        assert_eq!(
            count_features(&geom(2.0, 3.0)),
            FeatureCount {
                n_cusps: 4,
                n_nodes: 4
            }
        );
    }

    #[test]
    fn wt4_nodes_sit_on_isolated_points() {
        let report = analyze_features(&geom(2.0, 2.05), &FeatureConfig::default()).unwrap();
        assert_eq!(
            report.count(),
            FeatureCount {
                n_cusps: 4,
                n_nodes: 2
            }
        );
        assert_eq!(report.isolated_nodes(), 2);
    }

    #[test]
    fn cusp_next_to_theta3_pi_is_confirmed() {
        // the two inner cusps sit within ~1e-3 rad of θ3 = π
        let g = Geometry::normalized(2.5886392378023944, 2.072692034254618, 0.5).unwrap();
        let report = analyze_features(&g, &FeatureConfig::default()).unwrap();
        assert_eq!(report.count().n_cusps, 4);
    }
}
