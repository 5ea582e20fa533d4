//! Self-checks run by `orthocusp verify`: closed forms against numerics,
//! inverse against forward kinematics, surfaces against the oracle.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{
    classify_by_surfaces_with, classify_numeric, Classification, DEFAULT_BOUNDARY_EPS,
};
use crate::exec::{map_indexed, Execution};
use crate::geometry::{Geometry, JointConfig};
use crate::ik::inverse_kinematics_default;
use crate::kinematics::{
    forward_kinematics, jacobian_det_closed, jacobian_det_numeric, DEFAULT_FD_STEP,
};
use crate::surfaces::{
    four_fold_roots, hypot_surface, ratio_surface, Condition, SurfaceAtlas, SurfaceId,
};

/// Exclusion band around the surfaces for the oracle-agreement suite.
pub const ORACLE_BAND: f64 = 1e-2;
/// Relative offset on each side of a candidate surface in straddle tests.
pub const STRADDLE_DELTA: f64 = 1e-2;
/// Straddle points must be at least this far (in `d4`) from any surface.
pub const STRADDLE_CLEARANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples for the determinant, round-trip and residual suites.
    pub samples: usize,
    pub oracle_samples: usize,
    /// Points per candidate surface in the non-separation suite.
    pub straddle_samples: usize,
    pub atlas: SurfaceAtlas,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            oracle_samples: 500,
            straddle_samples: 50,
            atlas: SurfaceAtlas::exact(),
            execution: Execution::default(),
        }
    }
}

impl VerifyConfig {
    /// Scales every suite from a single sample count.
    pub fn with_samples(n: usize, seed: u64) -> Self {
        Self {
            seed,
            samples: n,
            oracle_samples: (n / 2).max(1),
            straddle_samples: n.min(50),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub detail: String,
    /// Worst offenders, for diagnosis.
    pub diagnostics: Vec<String>,
}

impl SuiteResult {
    fn new(
        name: &'static str,
        checked: usize,
        failures: usize,
        passed: bool,
        detail: String,
    ) -> Self {
        Self {
            name,
            passed,
            checked,
            failures,
            detail,
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_geometry(rng: &mut impl Rng) -> Geometry {
    let d2 = rng.gen_range(0.5..2.0);
    Geometry::new(
        d2,
        d2 * rng.gen_range(0.1..3.0),
        d2 * rng.gen_range(0.1..3.0),
        d2 * rng.gen_range(0.1..3.0),
    )
    .expect("positive lengths")
}

fn random_config(rng: &mut impl Rng) -> JointConfig {
    JointConfig::new(
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
        rng.gen_range(-PI..PI),
    )
}

/// Finite-difference determinant equals `d4` times the closed form.
pub fn det_ratio_suite(config: &VerifyConfig) -> SuiteResult {
    let mut rng = rng_for(config.seed, 1);
    let geoms: Vec<Geometry> = (0..20).map(|_| random_geometry(&mut rng)).collect();
    let mut checked = 0;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for k in 0..config.samples {
        let g = geoms[k % geoms.len()];
        let q = random_config(&mut rng);
        let closed = jacobian_det_closed(&g, &q);
        if closed.abs() < 1e-6 * g.scale() * g.scale() {
            continue;
        }
        let numeric = jacobian_det_numeric(&g, &q, DEFAULT_FD_STEP);
        let rel = (numeric - g.d4 * closed).abs() / (g.d4 * closed).abs();
        worst = worst.max(rel);
        checked += 1;
        if rel > 1e-5 {
            failures += 1;
        }
    }
    SuiteResult::new(
        "det_ratio",
        checked,
        failures,
        failures == 0 && checked > 0,
        format!("max relative error {worst:.2e} (limit 1e-5)"),
    )
}

/// Forward then inverse kinematics recovers the seed configuration.
pub fn ik_round_trip_suite(config: &VerifyConfig) -> SuiteResult {
    let mut rng = rng_for(config.seed, 2);
    let cases: Vec<(Geometry, JointConfig)> = (0..config.samples)
        .map(|_| loop {
            let g = random_geometry(&mut rng);
            let q = random_config(&mut rng);
            let s = g.scale();
            if (g.d4 * jacobian_det_closed(&g, &q)).abs() > 1e-3 * s * s * s {
                break (g, q);
            }
        })
        .collect();
    let outcomes = map_indexed(cases.len(), config.execution, |k| {
        let (g, q) = cases[k];
        let p = forward_kinematics(&g, &q);
        let sols = inverse_kinematics_default(&g, &p);
        let err = sols
            .solutions
            .iter()
            .map(|s| s.max_angle_distance(&q))
            .fold(f64::INFINITY, f64::min);
        (err, sols.len())
    });
    let mut failures = 0;
    let mut diagnostics = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, &(err, count)) in outcomes.iter().enumerate() {
        worst = worst.max(err);
        if err > 1e-6 || !(count == 2 || count == 4) {
            failures += 1;
            if diagnostics.len() < 10 {
                diagnostics.push(format!("case {k}: error {err:.2e}, {count} solutions"));
            }
        }
    }
    let mut r = SuiteResult::new(
        "ik_round_trip",
        outcomes.len(),
        failures,
        failures == 0,
        format!("max joint error {worst:.2e} rad (limit 1e-6)"),
    );
    r.diagnostics = diagnostics;
    r
}

/// The surfaces are zero sets of the matching polynomial conditions.
pub fn branch_residual_suite(config: &VerifyConfig) -> SuiteResult {
    let mut rng = rng_for(config.seed, 3);
    let atlas = &config.atlas;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut diagnostics = Vec::new();
    for _ in 0..config.samples {
        let d3 = rng.gen_range(0.05..4.0);
        let r2 = rng.gen_range(0.05..4.0);
        let mut checks = vec![
            (Condition::Inner, SurfaceId::C2),
            (Condition::FourFold, SurfaceId::C1),
        ];
        if d3 != 1.0 {
            let outer = if d3 > 1.0 {
                SurfaceId::C3
            } else {
                SurfaceId::C4
            };
            checks.push((Condition::Outer, outer));
        }
        for (cond, id) in checks {
            let d4 = atlas.value(id, d3, r2).expect("applicable");
            let rel = cond.relative_residual(d3, d4, r2);
            worst = worst.max(rel);
            if rel > 1e-9 {
                failures += 1;
                if diagnostics.len() < 10 {
                    diagnostics.push(format!(
                        "{id} at d3={d3}, r2={r2}: relative residual {rel:.2e}"
                    ));
                }
            }
        }
    }
    let mut r = SuiteResult::new(
        "branch_residuals",
        config.samples,
        failures,
        failures == 0,
        format!("max relative residual {worst:.2e} (limit 1e-9)"),
    );
    r.diagnostics = diagnostics;
    r
}

/// One oracle-vs-surfaces comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub geometry: Geometry,
    pub surfaces: Classification,
    pub numeric: Classification,
}

impl OracleCase {
    pub fn agree(&self) -> bool {
        self.surfaces.domain == self.numeric.domain && self.surfaces.wt == self.numeric.wt
    }
}

/// Random geometries in `(0.05, 3]²` × `{0.5, 1, 2}` at least `band` away
/// from every surface, compared between both classifiers.
pub fn oracle_cases(config: &VerifyConfig, n: usize, band: f64) -> Vec<OracleCase> {
    let mut rng = rng_for(config.seed, 4);
    let geoms: Vec<Geometry> = (0..n)
        .map(|_| loop {
            let r2 = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
            let g = Geometry::normalized(rng.gen_range(0.05..=3.0), rng.gen_range(0.05..=3.0), r2)
                .expect("positive");
            let clear = config
                .atlas
                .applicable(g.d3, g.r2)
                .iter()
                .all(|(_, v)| (g.d4 - v).abs() >= band)
                && (g.d3 - 1.0).abs() >= band;
            if clear {
                break g;
            }
        })
        .collect();
    map_indexed(geoms.len(), config.execution, |k| {
        let g = geoms[k];
        OracleCase {
            geometry: g,
            surfaces: classify_by_surfaces_with(&g, DEFAULT_BOUNDARY_EPS, &config.atlas),
            numeric: classify_numeric(&g),
        }
    })
}

pub fn oracle_agreement_suite(config: &VerifyConfig) -> SuiteResult {
    let cases = oracle_cases(config, config.oracle_samples, ORACLE_BAND);
    let disagreements: Vec<&OracleCase> = cases.iter().filter(|c| !c.agree()).collect();
    let rate = 1.0 - disagreements.len() as f64 / cases.len().max(1) as f64;
    let mut r = SuiteResult::new(
        "oracle_agreement",
        cases.len(),
        disagreements.len(),
        rate >= 0.99,
        format!("agreement {:.2}% (limit 99%)", 100.0 * rate),
    );
    r.diagnostics = disagreements
        .iter()
        .map(|c| {
            let g = c.geometry;
            format!(
                "d3={} d4={} r2={}: surfaces {} / oracle {} ({} cusps, {} nodes) {}",
                g.d3,
                g.d4,
                g.r2,
                c.surfaces.wt,
                c.numeric.wt,
                c.numeric.n_cusps,
                c.numeric.n_nodes,
                c.numeric.diagnostics.join("; ")
            )
        })
        .collect();
    r
}

/// Candidate surface that the theory says does not separate topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateSurface {
    Ratio,
    Hypot,
    FourFoldLarge,
}

impl CandidateSurface {
    pub const ALL: [CandidateSurface; 3] = [
        CandidateSurface::Ratio,
        CandidateSurface::Hypot,
        CandidateSurface::FourFoldLarge,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateSurface::Ratio => "ratio",
            CandidateSurface::Hypot => "hypot",
            CandidateSurface::FourFoldLarge => "four_fold_large",
        }
    }

    pub fn value(&self, d3: f64, r2: f64) -> Option<f64> {
        match self {
            CandidateSurface::Ratio => Some(ratio_surface(d3, r2)),
            CandidateSurface::Hypot => Some(hypot_surface(d3, r2)),
            CandidateSurface::FourFoldLarge => four_fold_roots(d3, r2).get(1).copied(),
        }
    }
}

/// Straddles of one candidate surface: oracle verdicts just below and just
/// above it, at points clear of every separating surface.
pub fn straddle_cases(
    config: &VerifyConfig,
    candidate: CandidateSurface,
    n: usize,
) -> Vec<((f64, f64, f64), Classification, Classification)> {
    let stream = 10 + candidate as u64;
    let mut rng = rng_for(config.seed, stream);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0;
    while points.len() < n && attempts < 100_000 {
        attempts += 1;
        let d3 = rng.gen_range(0.05..3.0);
        let r2 = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let Some(s) = candidate.value(d3, r2) else {
            continue;
        };
        if !(0.05..=4.0).contains(&s) || (d3 - 1.0).abs() < STRADDLE_CLEARANCE {
            continue;
        }
        let clear = config
            .atlas
            .applicable(d3, r2)
            .iter()
            .all(|(_, v)| (s - v).abs() >= STRADDLE_CLEARANCE);
        if clear {
            points.push((d3, s, r2));
        }
    }
    map_indexed(points.len(), config.execution, |k| {
        let (d3, s, r2) = points[k];
        let below = Geometry::normalized(d3, s * (1.0 - STRADDLE_DELTA), r2).expect("positive");
        let above = Geometry::normalized(d3, s * (1.0 + STRADDLE_DELTA), r2).expect("positive");
        (
            (d3, s, r2),
            classify_numeric(&below),
            classify_numeric(&above),
        )
    })
}

pub fn non_separation_suite(config: &VerifyConfig) -> SuiteResult {
    let mut checked = 0;
    let mut failures = 0;
    let mut diagnostics = Vec::new();
    let mut short = Vec::new();
    for candidate in CandidateSurface::ALL {
        let cases = straddle_cases(config, candidate, config.straddle_samples);
        if cases.len() < config.straddle_samples {
            short.push(candidate.as_str());
        }
        for ((d3, s, r2), below, above) in cases {
            checked += 1;
            let same = below.wt == above.wt
                && below.n_cusps == above.n_cusps
                && below.n_nodes == above.n_nodes;
            if !same {
                failures += 1;
                diagnostics.push(format!(
                    "{} at d3={d3} r2={r2} (d4={s}): {} ({},{}) vs {} ({},{})",
                    candidate.as_str(),
                    below.wt,
                    below.n_cusps,
                    below.n_nodes,
                    above.wt,
                    above.n_cusps,
                    above.n_nodes
                ));
            }
        }
    }
    let mut detail = format!(
        "{checked} straddles, classification unchanged in {}",
        checked - failures
    );
    if !short.is_empty() {
        detail.push_str(&format!("; too few clear points for {}", short.join(", ")));
    }
    let mut r = SuiteResult::new(
        "non_separation",
        checked,
        failures,
        failures == 0 && short.is_empty(),
        detail,
    );
    r.diagnostics = diagnostics;
    r
}

/// Runs every suite in a fixed order.
pub fn run_all(config: &VerifyConfig) -> VerifyReport {
    VerifyReport {
        suites: vec![
            det_ratio_suite(config),
            ik_round_trip_suite(config),
            branch_residual_suite(config),
            oracle_agreement_suite(config),
            non_separation_suite(config),
        ],
    }
}
