use orthocusp::classify::{Method, Wt};
use orthocusp::exec::Execution;
use orthocusp::surfaces::SurfaceId;
use orthocusp::sweep::{boundary_overlay, sweep, SweepConfig};

#[test]
fn surfaces_and_numeric_rasters_agree_off_band() {
    let base = SweepConfig {
        n_d3: 50,
        n_d4: 50,
        spot_check_fraction: 0.0,
        ..SweepConfig::default()
    };
    let surf = sweep(&base).unwrap();
    let num = sweep(&SweepConfig {
        mode: Method::Numeric,
        ..base.clone()
    })
    .unwrap();
    let mut interior = 0;
    let mut agree = 0;
    for (a, b) in surf.cells.iter().zip(&num.cells) {
        if a.boundary || b.boundary {
            continue;
        }
        interior += 1;
        if a.wt == b.wt && a.domain == b.domain {
            agree += 1;
        }
    }
    assert!(interior > 1500);
    assert!(agree as f64 >= 0.99 * interior as f64, "{agree}/{interior}");
}

#[test]
fn sequential_fallback_gives_identical_numeric_raster() {
    let config = SweepConfig {
        n_d3: 16,
        n_d4: 16,
        mode: Method::Numeric,
        ..SweepConfig::default()
    };
    let par = sweep(&config).unwrap();
    let seq = sweep(&SweepConfig {
        execution: Execution::Sequential,
        ..config
    })
    .unwrap();
    assert_eq!(par.cells, seq.cells);
}

#[test]
fn overlay_crosses_anchor_column() {
    let overlay = boundary_overlay(1.0, (1.0, 3.0), 201).unwrap();
    let at_two = |id: SurfaceId| {
        let line = overlay.iter().find(|p| p.id == id).unwrap();
        line.points.iter().find(|p| p.0 == 2.0).unwrap().1
    };
    assert!((at_two(SurfaceId::C2) - 2.10819).abs() < 1e-5);
    assert!((at_two(SurfaceId::E3) - 2.28825).abs() < 1e-5);
}

#[test]
fn low_offset_shrinks_wt4() {
    let raster = sweep(&SweepConfig {
        spot_check_fraction: 0.0,
        ..SweepConfig::with_r2(0.05)
    })
    .unwrap();
    assert!(raster
        .cells
        .iter()
        .filter(|c| c.wt == Wt::WT4)
        .all(|c| c.boundary));
}
