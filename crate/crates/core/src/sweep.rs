//! Grid sweeps over `(d3, d4)` at fixed `r2`: partition rasters, per-topology
//! area statistics and the separating-curve overlays.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{
    classify_by_surfaces, classify_numeric, nearest_boundary_distance, Classification, Method, Wt,
    DEFAULT_BOUNDARY_EPS,
};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::geometry::Geometry;
use crate::surfaces::{surface_value, SurfaceId};

pub const MIN_RESOLUTION: usize = 16;
pub const MIN_OVERLAY_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub r2: f64,
    pub d3_range: (f64, f64),
    pub d4_range: (f64, f64),
    /// Cells along `d3`.
    pub n_d3: usize,
    /// Cells along `d4`.
    pub n_d4: usize,
    pub mode: Method,
    /// Share of cells re-classified numerically in surfaces mode.
    pub spot_check_fraction: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            r2: 1.0,
            d3_range: (0.02, 3.0),
            d4_range: (0.02, 3.0),
            n_d3: 300,
            n_d4: 300,
            mode: Method::Surfaces,
            spot_check_fraction: 0.01,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl SweepConfig {
    pub fn with_r2(r2: f64) -> Self {
        Self {
            r2,
            ..Self::default()
        }
    }

    pub fn square(r2: f64, d3_range: (f64, f64), d4_range: (f64, f64), n: usize) -> Self {
        Self {
            r2,
            d3_range,
            d4_range,
            n_d3: n,
            n_d4: n,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive_range = |(lo, hi): (f64, f64)| lo > 0.0 && hi > lo && hi.is_finite();
        if !(self.r2 > 0.0 && self.r2.is_finite()) {
            return Err(Error::InvalidGeometry {
                name: "r2",
                value: self.r2,
            });
        }
        if !positive_range(self.d3_range) || !positive_range(self.d4_range) {
            return Err(Error::InvalidParameter(format!(
                "ranges must satisfy 0 < min < max, got d3 {:?}, d4 {:?}",
                self.d3_range, self.d4_range
            )));
        }
        if self.n_d3 < MIN_RESOLUTION || self.n_d4 < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "resolution must be >= {MIN_RESOLUTION}, got {}x{}",
                self.n_d3, self.n_d4
            )));
        }
        if !(0.0..=1.0).contains(&self.spot_check_fraction) {
            return Err(Error::InvalidParameter(format!(
                "spot-check fraction must lie in [0, 1], got {}",
                self.spot_check_fraction
            )));
        }
        Ok(())
    }

    /// Centre of cell `i` out of `n` on `[lo, hi]`.
    pub fn center(range: (f64, f64), n: usize, i: usize) -> f64 {
        range.0 + (range.1 - range.0) * (2 * i + 1) as f64 / (2 * n) as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        let dx = (self.d3_range.1 - self.d3_range.0) / self.n_d3 as f64;
        let dy = (self.d4_range.1 - self.d4_range.0) / self.n_d4 as f64;
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub d3: f64,
    pub d4: f64,
    pub domain: u8,
    pub wt: Wt,
    pub n_cusps: usize,
    pub n_nodes: usize,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub index: usize,
    pub numeric: Wt,
    pub agree: bool,
}

/// Row-major cells: row `j` is the `j`-th `d4` value, column `i` the `i`-th
/// `d3` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRaster {
    pub config: SweepConfig,
    pub boundary_eps: f64,
    pub cells: Vec<Cell>,
    pub spot_checks: Vec<SpotCheck>,
}

impl PartitionRaster {
    pub fn get(&self, i_d3: usize, j_d4: usize) -> &Cell {
        &self.cells[j_d4 * self.config.n_d3 + i_d3]
    }

    /// Cell whose centre is nearest to `(d3, d4)`, if inside the ranges.
    pub fn cell_at(&self, d3: f64, d4: f64) -> Option<&Cell> {
        let c = &self.config;
        let index = |v: f64, (lo, hi): (f64, f64), n: usize| {
            if v < lo || v > hi {
                return None;
            }
            Some((((v - lo) / (hi - lo) * n as f64) as usize).min(n - 1))
        };
        let i = index(d3, c.d3_range, c.n_d3)?;
        let j = index(d4, c.d4_range, c.n_d4)?;
        Some(self.get(i, j))
    }

    pub fn labels(&self) -> BTreeSet<Wt> {
        self.cells.iter().map(|c| c.wt).collect()
    }

    pub fn spot_check_agreement(&self) -> Option<f64> {
        if self.spot_checks.is_empty() {
            return None;
        }
        let ok = self.spot_checks.iter().filter(|s| s.agree).count();
        Some(ok as f64 / self.spot_checks.len() as f64)
    }
}

fn to_cell(d3: f64, d4: f64, c: &Classification, boundary: bool) -> Cell {
    Cell {
        d3,
        d4,
        domain: c.domain,
        wt: c.wt,
        n_cusps: c.n_cusps,
        n_nodes: c.n_nodes,
        boundary: boundary || c.boundary,
    }
}

/// Classifies every cell centre of the grid.
pub fn sweep(config: &SweepConfig) -> Result<PartitionRaster> {
    config.validate()?;
    let (n_d3, n_d4) = (config.n_d3, config.n_d4);
    let diag = config.cell_diagonal();
    let geometry = |index: usize| {
        let d3 = SweepConfig::center(config.d3_range, n_d3, index % n_d3);
        let d4 = SweepConfig::center(config.d4_range, n_d4, index / n_d3);
        (
            d3,
            d4,
            Geometry::normalized(d3, d4, config.r2).expect("validated ranges"),
        )
    };
    let cells = map_indexed(n_d3 * n_d4, config.execution, |index| {
        let (d3, d4, g) = geometry(index);
        let near = nearest_boundary_distance(&g).1 < diag;
        let c = match config.mode {
            Method::Surfaces => classify_by_surfaces(&g, DEFAULT_BOUNDARY_EPS),
            mode => crate::classify::classify(&g, mode),
        };
        to_cell(d3, d4, &c, near)
    });

    let mut spot_checks = Vec::new();
    if config.mode == Method::Surfaces && config.spot_check_fraction > 0.0 {
        let total = cells.len();
        let k = ((config.spot_check_fraction * total as f64).ceil() as usize).min(total);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut picks = sample(&mut rng, total, k).into_vec();
        picks.sort_unstable();
        spot_checks = map_indexed(picks.len(), config.execution, |p| {
            let index = picks[p];
            let numeric = classify_numeric(&geometry(index).2).wt;
            SpotCheck {
                index,
                numeric,
                agree: numeric == cells[index].wt,
            }
        });
    }
    Ok(PartitionRaster {
        config: config.clone(),
        boundary_eps: DEFAULT_BOUNDARY_EPS,
        cells,
        spot_checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WtStat {
    /// All cells with this label.
    pub cells: usize,
    /// Cells with this label and no boundary flag.
    pub interior_cells: usize,
    /// `interior_cells / total cells`.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub total_cells: usize,
    pub boundary_cells: usize,
    pub per_wt: BTreeMap<Wt, WtStat>,
}

impl RegionStats {
    pub fn fraction(&self, wt: Wt) -> f64 {
        self.per_wt.get(&wt).map_or(0.0, |s| s.fraction)
    }

    pub fn cells(&self, wt: Wt) -> usize {
        self.per_wt.get(&wt).map_or(0, |s| s.cells)
    }

    pub fn domain_cells(&self, domain: u8) -> usize {
        self.per_wt
            .iter()
            .filter(|(wt, _)| wt.domain() == domain)
            .map(|(_, s)| s.cells)
            .sum()
    }

    pub fn domain_interior_cells(&self, domain: u8) -> usize {
        self.per_wt
            .iter()
            .filter(|(wt, _)| wt.domain() == domain)
            .map(|(_, s)| s.interior_cells)
            .sum()
    }

    pub fn fraction_sum(&self) -> f64 {
        self.per_wt.values().map(|s| s.fraction).sum()
    }
}

pub fn region_stats(raster: &PartitionRaster) -> RegionStats {
    let total = raster.cells.len();
    let mut per_wt: BTreeMap<Wt, WtStat> =
        Wt::ALL.iter().map(|&w| (w, WtStat::default())).collect();
    let mut boundary_cells = 0;
    for cell in &raster.cells {
        let s = per_wt.get_mut(&cell.wt).expect("all labels present");
        s.cells += 1;
        if cell.boundary {
            boundary_cells += 1;
        } else {
            s.interior_cells += 1;
        }
    }
    for s in per_wt.values_mut() {
        s.fraction = if total == 0 {
            0.0
        } else {
            s.interior_cells as f64 / total as f64
        };
    }
    RegionStats {
        total_cells: total,
        boundary_cells,
        per_wt,
    }
}

/// A separating surface sampled over `d3` at fixed `r2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub id: SurfaceId,
    /// `(d3, d4)` pairs, `d3` ascending.
    pub points: Vec<(f64, f64)>,
}

/// Every surface sampled at `n` evenly spaced `d3` values (endpoints
/// included), keeping only the `d3` where it is defined.
pub fn boundary_overlay(r2: f64, d3_range: (f64, f64), n: usize) -> Result<Vec<Polyline>> {
    if n < MIN_OVERLAY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "overlay needs >= {MIN_OVERLAY_SAMPLES} samples, got {n}"
        )));
    }
    let (lo, hi) = d3_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "bad d3 range {d3_range:?}"
        )));
    }
    let d3s: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    Ok(SurfaceId::ALL
        .iter()
        .map(|&id| Polyline {
            id,
            points: d3s
                .iter()
                .filter_map(|&d3| surface_value(id, d3, r2).ok().map(|v| (d3, v)))
                .collect(),
        })
        .filter(|p| !p.points.is_empty())
        .collect())
}

/// Unordered pairs of overlay curves whose difference changes sign at
/// some common sample.
pub fn crossing_pairs(overlay: &[Polyline]) -> BTreeSet<(SurfaceId, SurfaceId)> {
    let mut pairs = BTreeSet::new();
    for (a_idx, a) in overlay.iter().enumerate() {
        for b in &overlay[a_idx + 1..] {
            let lookup: BTreeMap<u64, f64> =
                b.points.iter().map(|&(x, y)| (x.to_bits(), y)).collect();
            let diffs: Vec<f64> = a
                .points
                .iter()
                .filter_map(|&(x, y)| lookup.get(&x.to_bits()).map(|&yb| y - yb))
                .collect();
            if diffs.windows(2).any(|w| w[0] * w[1] < 0.0) {
                let key = if a.id < b.id {
                    (a.id, b.id)
                } else {
                    (b.id, a.id)
                };
                pairs.insert(key);
            }
        }
    }
    pairs
}

/// Side of every surface a point lies on; undefined C3/C4 count as `+∞`.
fn side_signature(d3: f64, d4: f64, r2: f64) -> [bool; 7] {
    let mut sig = [false; 7];
    for (k, id) in SurfaceId::ALL.iter().enumerate() {
        let v = surface_value(*id, d3, r2).unwrap_or(f64::INFINITY);
        sig[k] = d4 > v;
    }
    sig
}

/// Pairs of 4-adjacent interior cells whose labels differ although no
/// surface passes between their centres.
pub fn adjacency_violations(raster: &PartitionRaster) -> Vec<(usize, usize)> {
    let c = &raster.config;
    let (n, m) = (c.n_d3, c.n_d4);
    let sigs: Vec<[bool; 7]> = raster
        .cells
        .iter()
        .map(|cell| side_signature(cell.d3, cell.d4, c.r2))
        .collect();
    let mut out = Vec::new();
    for j in 0..m {
        for i in 0..n {
            let a = j * n + i;
            let mut neighbours = Vec::with_capacity(2);
            if i + 1 < n {
                neighbours.push(a + 1);
            }
            if j + 1 < m {
                neighbours.push(a + n);
            }
            for b in neighbours {
                let (ca, cb) = (&raster.cells[a], &raster.cells[b]);
                if ca.boundary || cb.boundary || ca.wt == cb.wt {
                    continue;
                }
                if sigs[a] == sigs[b] {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(r2: f64, n: usize) -> SweepConfig {
        SweepConfig {
            n_d3: n,
            n_d4: n,
            spot_check_fraction: 0.0,
            ..SweepConfig::with_r2(r2)
        }
    }

    #[test]
    fn cell_centers() {
        assert_eq!(SweepConfig::center((1.0, 3.0), 17, 8), 2.0);
        assert_eq!(SweepConfig::center((1.0, 2.0), 17, 8), 1.5);
    }

    #[test]
    fn exact_center_is_wt3() {
        let config = SweepConfig {
            d3_range: (1.0, 3.0),
            d4_range: (1.0, 2.0),
            ..small(1.0, 17)
        };
        let raster = sweep(&config).unwrap();
        let cell = raster.get(8, 8);
        assert_eq!(
            (cell.d3, cell.d4, cell.wt, cell.boundary),
            (2.0, 1.5, Wt::WT3, false)
        );
    }

    #[test]
    fn all_nine_labels_at_moderate_resolution() {
        let raster = sweep(&small(1.0, 120)).unwrap();
        assert_eq!(raster.labels().len(), 9);
        assert_eq!(raster.cell_at(2.0, 1.5).unwrap().wt, Wt::WT3);
        assert!(adjacency_violations(&raster).is_empty());
    }

    #[test]
    fn stats_fractions_bounded() {
        let raster = sweep(&small(1.0, 60)).unwrap();
        let stats = region_stats(&raster);
        let sum = stats.fraction_sum();
        assert!(sum <= 1.0 && sum > 0.5, "{sum}");
        assert_eq!(stats.per_wt.values().map(|s| s.cells).sum::<usize>(), 3600);
    }

    #[test]
    fn sequential_and_parallel_match() {
        let mut config = small(1.0, 40);
        config.spot_check_fraction = 0.01;
        let par = sweep(&config).unwrap();
        config.execution = Execution::Sequential;
        let seq = sweep(&config).unwrap();
        assert_eq!(par.cells, seq.cells);
        assert_eq!(par.spot_checks, seq.spot_checks);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(sweep(&small(1.0, 8)).is_err());
        let mut c = small(1.0, 20);
        c.d3_range = (0.0, 1.0);
        assert!(sweep(&c).is_err());
    }

    #[test]
    fn overlay_domains_and_values() {
        let overlay = boundary_overlay(1.0, (0.02, 3.0), 300).unwrap();
        let get = |id| overlay.iter().find(|p| p.id == id).unwrap();
        assert!(get(SurfaceId::C3).points.iter().all(|p| p.0 > 1.0));
        assert!(get(SurfaceId::C4).points.iter().all(|p| p.0 < 1.0));
        assert!(boundary_overlay(1.0, (0.02, 3.0), 10).is_err());
    }

    #[test]
    fn crossing_pattern_is_stable() {
        let a = crossing_pairs(&boundary_overlay(0.8, (0.02, 3.0), 400).unwrap());
        let b = crossing_pairs(&boundary_overlay(1.2, (0.02, 3.0), 400).unwrap());
        assert_eq!(a, b);
    }
}
