//! Mapping a geometry to a cusp domain (1–5) and a workspace topology
//! (WT1–WT9), either from the closed-form surfaces or from the numerical
//! oracle, or from both with a cross-check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{analyze_features, FeatureConfig, FeatureReport};
use crate::geometry::{CartesianPoint, Geometry};
use crate::ik::inverse_kinematics_default;
use crate::surfaces::{SurfaceAtlas, SurfaceId};
use crate::trace::Branch;

/// Default exactness band around a surface, in normalized `d4`.
pub const DEFAULT_BOUNDARY_EPS: f64 = 1e-6;

/// Workspace topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wt {
    WT1,
    WT2,
    WT3,
    WT4,
    WT5,
    WT6,
    WT7,
    WT8,
    WT9,
}

impl Wt {
    pub const ALL: [Wt; 9] = [
        Wt::WT1,
        Wt::WT2,
        Wt::WT3,
        Wt::WT4,
        Wt::WT5,
        Wt::WT6,
        Wt::WT7,
        Wt::WT8,
        Wt::WT9,
    ];

    pub fn index(&self) -> usize {
        *self as usize + 1
    }

    pub fn as_str(&self) -> &'static str {
        [
            "WT1", "WT2", "WT3", "WT4", "WT5", "WT6", "WT7", "WT8", "WT9",
        ][*self as usize]
    }

    /// Cusp domain containing this topology.
    pub fn domain(&self) -> u8 {
        match self {
            Wt::WT1 => 1,
            Wt::WT2 | Wt::WT3 | Wt::WT4 => 2,
            Wt::WT5 | Wt::WT6 => 3,
            Wt::WT7 => 4,
            Wt::WT8 | Wt::WT9 => 5,
        }
    }

    /// `(cusps, nodes)` in the full half-section, both signs of `z`.
    ///
    /// WT5/WT6/WT8/WT9 were measured with the numerical oracle: the
    /// single WT5 node is the self-crossing of WS1 at the surviving isolated
    /// singular point, and crossing WS2 adds two more (WT6). WT4's two nodes
    /// are the isolated singular points.
    pub fn expected_counts(&self) -> (usize, usize) {
        match self {
            Wt::WT1 => (0, 0),
            Wt::WT2 => (4, 2),
            Wt::WT3 => (4, 0),
            Wt::WT4 => (4, 2),
            Wt::WT5 => (2, 1),
            Wt::WT6 => (2, 3),
            Wt::WT7 => (4, 4),
            Wt::WT8 => (0, 0),
            Wt::WT9 => (0, 2),
        }
    }
}

impl fmt::Display for Wt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Wt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Wt::ALL
            .into_iter()
            .find(|w| w.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown topology {s:?}")))
    }
}

/// Cusp count of each domain.
pub fn domain_cusps(domain: u8) -> usize {
    match domain {
        2 | 4 => 4,
        3 => 2,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Surfaces,
    Numeric,
    Both,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Surfaces => "surfaces",
            Method::Numeric => "numeric",
            Method::Both => "both",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surfaces" => Ok(Method::Surfaces),
            "numeric" => Ok(Method::Numeric),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Agreement {
    #[serde(rename = "agree")]
    Agree,
    #[serde(rename = "disagree")]
    Disagree,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Agreement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub domain: u8,
    pub wt: Wt,
    pub n_cusps: usize,
    pub n_nodes: usize,
    pub method: Method,
    /// Within the exactness band of a separating surface, or the oracle saw
    /// a feature pattern that matches no topology.
    pub boundary: bool,
    pub agreement: Agreement,
    pub nearest_surface: (SurfaceId, f64),
    /// Populated when something needs a human look: disagreements,
    /// unmatched oracle patterns.
    pub diagnostics: Vec<String>,
}

/// Closest applicable surface to `geom` and its distance in normalized `d4`.
pub fn nearest_boundary_distance(geom: &Geometry) -> (SurfaceId, f64) {
    nearest_with(geom, &SurfaceAtlas::exact())
}

fn nearest_with(geom: &Geometry, atlas: &SurfaceAtlas) -> (SurfaceId, f64) {
    let g = geom.to_normalized();
    atlas
        .applicable(g.d3, g.r2)
        .into_iter()
        .map(|(id, v)| (id, (g.d4 - v).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("C1, C2, E1-E3 always apply")
}

/// Decision procedure on the closed-form thresholds.
pub fn classify_by_surfaces(geom: &Geometry, eps: f64) -> Classification {
    classify_by_surfaces_with(geom, eps, &SurfaceAtlas::exact())
}

/// [`classify_by_surfaces`] with an explicit surface evaluator.
pub fn classify_by_surfaces_with(
    geom: &Geometry,
    eps: f64,
    atlas: &SurfaceAtlas,
) -> Classification {
    let g = geom.to_normalized();
    let (d3, d4, r2) = (g.d3, g.d4, g.r2);
    let s = |id| atlas.value(id, d3, r2).expect("surface applies");
    let nearest = nearest_with(&g, atlas);
    let mut boundary = nearest.1 <= eps;

    let wt = if d4 < s(SurfaceId::C1) {
        Wt::WT1
    } else if d4 < s(SurfaceId::C2) {
        if d4 < s(SurfaceId::E1) {
            Wt::WT2
        } else if d4 < s(SurfaceId::E2) {
            Wt::WT3
        } else {
            Wt::WT4
        }
    } else {
        let upper = if (d3 - 1.0).abs() <= eps {
            // C3 and C4 both run off to infinity at d3 = 1
            boundary = true;
            f64::INFINITY
        } else if d3 > 1.0 {
            s(SurfaceId::C3)
        } else {
            s(SurfaceId::C4)
        };
        if d4 < upper {
            if d4 < s(SurfaceId::E3) {
                Wt::WT5
            } else {
                Wt::WT6
            }
        } else if d3 > 1.0 {
            Wt::WT7
        } else if d4 < s(SurfaceId::E3) {
            Wt::WT8
        } else {
            Wt::WT9
        }
    };
    let (n_cusps, n_nodes) = wt.expected_counts();
    Classification {
        domain: wt.domain(),
        wt,
        n_cusps,
        n_nodes,
        method: Method::Surfaces,
        boundary,
        agreement: Agreement::NotApplicable,
        nearest_surface: nearest,
        diagnostics: Vec::new(),
    }
}

/// IK solution counts on both sides of the internal boundary WS1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCounts {
    pub min: usize,
    pub max: usize,
}

impl SideCounts {
    /// WS1 bounds a void.
    pub fn has_hole(&self) -> bool {
        self.min == 0
    }

    /// Some region has four solutions.
    pub fn quaternary(&self) -> bool {
        self.max >= 4
    }
}

/// Counts IK solutions just off WS1, on both sides, at evenly spaced
/// samples away from cusps.
pub fn ws1_side_counts(geom: &Geometry, report: &FeatureReport) -> SideCounts {
    let Some(curve) = report.curve(Branch::S1) else {
        return SideCounts { min: 0, max: 0 };
    };
    let param = curve.param(geom).expect("S-branch");
    let h = 1e-4 * geom.scale();
    let n = curve.len();
    let probes = 48;
    let mut min = usize::MAX;
    let mut max = 0;
    for k in 0..probes {
        // offset by half a stride so θ2 = 0, ±π (on the ρ axis) are skipped
        let i = ((2 * k + 1) * n) / (2 * probes);
        let p = param.eval(curve.joints[i].0);
        let speed = p.drho.hypot(p.dz);
        if speed < 1e-3 * geom.scale() {
            continue;
        }
        let normal = (-p.dz / speed, p.drho / speed);
        for side in [-1.0, 1.0] {
            let rho = p.rho + side * h * normal.0;
            let z = p.z + side * h * normal.1;
            if rho <= h {
                continue;
            }
            let count = inverse_kinematics_default(geom, &CartesianPoint::new(rho, 0.0, z)).len();
            min = min.min(count);
            max = max.max(count);
        }
    }
    if min == usize::MAX {
        min = 0;
    }
    SideCounts { min, max }
}

/// Topology inferred from the oracle's findings.
pub fn infer_topology(report: &FeatureReport, sides: SideCounts) -> (Wt, bool, Vec<String>) {
    let count = report.count();
    let mut notes = Vec::new();
    let mut ambiguous = false;
    let wt = match count.n_cusps {
        0 => {
            if sides.quaternary() {
                if report.cross_nodes() > 0 {
                    Wt::WT9
                } else {
                    Wt::WT8
                }
            } else {
                Wt::WT1
            }
        }
        2 => {
            if report.cross_nodes() > 0 {
                Wt::WT6
            } else {
                Wt::WT5
            }
        }
        4 => {
            if report.cusps_on(Branch::S1) > 0 && report.cusps_on(Branch::S2) > 0 {
                Wt::WT7
            } else if count.n_nodes == 0 {
                Wt::WT3
            } else if report.isolated_nodes() > 0 {
                Wt::WT4
            } else {
                Wt::WT2
            }
        }
        other => {
            ambiguous = true;
            notes.push(format!("unexpected cusp count {other}"));
            if other > 4 {
                Wt::WT7
            } else if other == 3 {
                Wt::WT5
            } else {
                Wt::WT1
            }
        }
    };
    let expected = wt.expected_counts();
    if (count.n_cusps, count.n_nodes) != expected {
        ambiguous = true;
        notes.push(format!(
            "oracle found ({}, {}) cusps/nodes but {} has ({}, {})",
            count.n_cusps, count.n_nodes, wt, expected.0, expected.1
        ));
    }
    (wt, ambiguous, notes)
}

/// Classification from the numerical oracle alone.
pub fn classify_numeric(geom: &Geometry) -> Classification {
    classify_numeric_with(geom, &FeatureConfig::default())
}

pub fn classify_numeric_with(geom: &Geometry, config: &FeatureConfig) -> Classification {
    let g = geom.to_normalized();
    let nearest = nearest_boundary_distance(&g);
    let report = match analyze_features(&g, config) {
        Ok(r) => r,
        Err(e) => {
            // only reachable through an invalid sample count
            return Classification {
                domain: 1,
                wt: Wt::WT1,
                n_cusps: 0,
                n_nodes: 0,
                method: Method::Numeric,
                boundary: true,
                agreement: Agreement::NotApplicable,
                nearest_surface: nearest,
                diagnostics: vec![e.to_string()],
            };
        }
    };
    let sides = if report.cusps.is_empty() {
        ws1_side_counts(&g, &report)
    } else {
        SideCounts { min: 0, max: 4 }
    };
    let (wt, ambiguous, mut diagnostics) = infer_topology(&report, sides);
    if !report.unconfirmed_reversals.is_empty() {
        diagnostics.push(format!(
            "{} velocity reversal(s) without a triple root (axis folds)",
            report.unconfirmed_reversals.len()
        ));
    }
    let count = report.count();
    Classification {
        domain: wt.domain(),
        wt,
        n_cusps: count.n_cusps,
        n_nodes: count.n_nodes,
        method: Method::Numeric,
        boundary: ambiguous || nearest.1 <= DEFAULT_BOUNDARY_EPS,
        agreement: Agreement::NotApplicable,
        nearest_surface: nearest,
        diagnostics,
    }
}

/// Classifies with the requested method. With [`Method::Both`] the domain
/// and topology come from the surfaces, the counts from the oracle, and
/// `agreement` records whether the two verdicts match.
pub fn classify(geom: &Geometry, mode: Method) -> Classification {
    classify_with(geom, mode, DEFAULT_BOUNDARY_EPS, &SurfaceAtlas::exact())
}

pub fn classify_with(
    geom: &Geometry,
    mode: Method,
    eps: f64,
    atlas: &SurfaceAtlas,
) -> Classification {
    match mode {
        Method::Surfaces => classify_by_surfaces_with(geom, eps, atlas),
        Method::Numeric => classify_numeric(geom),
        Method::Both => {
            let s = classify_by_surfaces_with(geom, eps, atlas);
            let n = classify_numeric(geom);
            let agree = s.domain == n.domain && s.wt == n.wt;
            let mut diagnostics = n.diagnostics;
            if !agree {
                let g = geom.to_normalized();
                diagnostics.push(format!(
                    "surfaces say dom{} {} but oracle says dom{} {} ({} cusps, {} nodes) at d3={} d4={} r2={}; nearest surface {} at {:.3e}",
                    s.domain, s.wt, n.domain, n.wt, n.n_cusps, n.n_nodes, g.d3, g.d4, g.r2,
                    s.nearest_surface.0, s.nearest_surface.1
                ));
            }
            Classification {
                domain: s.domain,
                wt: s.wt,
                n_cusps: n.n_cusps,
                n_nodes: n.n_nodes,
                method: Method::Both,
                boundary: s.boundary || n.boundary,
                agreement: if agree {
                    Agreement::Agree
                } else {
                    Agreement::Disagree
                },
                nearest_surface: s.nearest_surface,
                diagnostics,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn geom(d3: f64, d4: f64) -> Geometry {
        Geometry::new(1.0, d3, d4, 1.0).unwrap()
    }

    #[test]
    fn surfaces_examples() {
        let cases = [
            (2.0, 1.5, 2, Wt::WT3),
            (2.0, 0.5, 2, Wt::WT2),
            (2.0, 2.05, 2, Wt::WT4),
            (2.0, 2.2, 3, Wt::WT5),
            (2.0, 2.5, 3, Wt::WT6),
            (2.0, 3.0, 4, Wt::WT7),
            (0.5, 1.3, 5, Wt::WT8),
            (0.5, 2.0, 5, Wt::WT9),
            (2.0, 0.1, 1, Wt::WT1),
        ];
        for (d3, d4, dom, wt) in cases {
            let c = classify_by_surfaces(&geom(d3, d4), DEFAULT_BOUNDARY_EPS);
            assert_eq!((c.domain, c.wt), (dom, wt), "d3={d3} d4={d4}");
            assert!(!c.boundary);
        }
    }

    #[test]
    fn surfaces_and_oracle_agree_on_examples() {
        for (d3, d4) in [
            (2.0, 1.5),
            (2.0, 0.5),
            (2.0, 2.05),
            (2.0, 2.2),
            (2.0, 2.5),
            (2.0, 3.0),
            (0.5, 1.3),
            (0.5, 2.0),
            (2.0, 0.1),
        ] {
            let c = classify(&geom(d3, d4), Method::Both);
            assert_eq!(c.agreement, Agreement::Agree, "{c:?}");
            assert_eq!((c.n_cusps, c.n_nodes), c.wt.expected_counts(), "{c:?}");
        }
    }

    #[test]
    fn on_e2_is_boundary() {
        let c = classify_by_surfaces(&geom(2.0, 2.0), DEFAULT_BOUNDARY_EPS);
        assert!(c.boundary);
        assert_eq!(c.nearest_surface.0, SurfaceId::E2);
    }

    #[test]
    fn nearest_boundary_examples() {
        let (id, d) = nearest_boundary_distance(&geom(2.0, 1.5));
        assert_eq!(id, SurfaceId::E2);
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
        let (id, d) = nearest_boundary_distance(&geom(2.0, 2.10819));
        assert_eq!(id, SurfaceId::C2);
        assert!(d < 1e-5);
        let (id, d) = nearest_boundary_distance(&geom(2.0, 0.200811));
        assert_eq!(id, SurfaceId::C1);
        assert!(d < 1e-6);
    }

    #[test]
    fn wt1_has_a_hole() {
        let g = geom(2.0, 0.1);
        let report = analyze_features(&g, &FeatureConfig::default()).unwrap();
        let sides = ws1_side_counts(&g, &report);
        assert!(sides.has_hole());
        assert!(!sides.quaternary());
    }

    #[test]
    fn wt8_is_quaternary() {
        let g = geom(0.5, 1.3);
        let report = analyze_features(&g, &FeatureConfig::default()).unwrap();
        let sides = ws1_side_counts(&g, &report);
        assert!(sides.quaternary());
        assert!(!sides.has_hole());
    }

    #[test]
    fn scale_invariance() {
        let base = Geometry::new(1.0, 2.0, 1.5, 1.0).unwrap();
        for lambda in [0.1, 10.0] {
            let c = classify(&base.scaled(lambda), Method::Both);
            assert_eq!(
                (c.domain, c.wt, c.agreement),
                (2, Wt::WT3, Agreement::Agree)
            );
        }
    }

    #[test]
    fn wt_domain_table() {
        for wt in Wt::ALL {
            assert_eq!(domain_cusps(wt.domain()), wt.expected_counts().0);
            assert_eq!(wt.as_str().parse::<Wt>().unwrap(), wt);
        }
    }
}
