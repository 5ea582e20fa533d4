//! Number formatting and CSV rendering.

use std::fmt::Write;

use orthocusp::sweep::PartitionRaster;
use orthocusp::trace::SingularCurve;

/// `%.{digits}g`: `digits` significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 ≤ |x| < 10^digits`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const BOUNDARY_HEADER: &str = "branch,theta2,theta3,rho,z";
pub const SWEEP_HEADER: &str = "d3,d4,r2,domain,wt,n_cusps,n_nodes,boundary";

pub fn boundary_csv(curves: &[SingularCurve]) -> String {
    let mut out = String::new();
    writeln!(out, "{BOUNDARY_HEADER}").unwrap();
    for curve in curves {
        for (&(t2, t3), p) in curve.joints.iter().zip(&curve.image) {
            writeln!(
                out,
                "{},{},{},{},{}",
                curve.branch.as_str(),
                sig(t2, 9),
                sig(t3, 9),
                sig(p.rho, 9),
                sig(p.z, 9)
            )
            .unwrap();
        }
    }
    out
}

/// Row-major cells, shortest round-trip floats.
pub fn sweep_csv(raster: &PartitionRaster) -> String {
    let mut out = String::with_capacity(raster.cells.len() * 40);
    writeln!(out, "{SWEEP_HEADER}").unwrap();
    let r2 = raster.config.r2;
    for c in &raster.cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.d3, c.d4, r2, c.domain, c.wt, c.n_cusps, c.n_nodes, c.boundary
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.0, 9), "0");
        assert_eq!(sig(1.5, 9), "1.5");
        assert_eq!(sig(-2.0, 9), "-2");
        assert_eq!(sig(std::f64::consts::PI, 9), "3.14159265");
        assert_eq!(sig(123456.789012, 9), "123456.789");
        assert_eq!(sig(1.0e-7, 9), "1e-7");
        assert_eq!(sig(-1.23456789012e-9, 9), "-1.23456789e-9");
        assert_eq!(sig(9.999999999, 9), "10");
        assert_eq!(sig(2.5e12, 9), "2.5e12");
    }
}
