//! Byte-deterministic serialization: fixed field order, 17-significant-digit
//! floating-point rendering, no locale or thread-count dependence.

use crate::model::CouplingParams;
use crate::report::VerificationReport;
use crate::secular::{ComplexPair, PhasePoint, SpectrumResult};
use crate::states::{quasi_parity, BoundState};
use crate::TOOL_VERSION;
use std::fmt::Write as _;

/// Render a float with 17 significant digits (round-trippable for f64).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    format!("{:.16e}", x)
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn complex_pair_json(pair: &Option<ComplexPair>) -> String {
    match pair {
        None => "null".to_string(),
        Some(p) => format!(
            "{{\"pair\":[{},{}],\"sigma\":{}}}",
            p.pair.0,
            p.pair.1,
            p.sigma.as_i32()
        ),
    }
}

/// Spectrum as JSON: params, levels (n, sigma, s, t, E, Q, quasi_parity),
/// physical flag, the first complexified pair when present, tool version.
pub fn spectrum_to_json(spectrum: &SpectrumResult) -> String {
    let mut out = String::new();
    out.push_str("{\"params\":");
    out.push_str(&params_json(&spectrum.params));
    out.push_str(",\"levels\":[");
    for (i, root) in spectrum.levels.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let rho = quasi_parity(root)
            .map(|r| r.as_i32().to_string())
            .unwrap_or_else(|_| "null".to_string());
        let _ = write!(
            out,
            "{{\"n\":{},\"sigma\":{},\"s\":{},\"t\":{},\"E\":{},\"Q\":{},\"quasi_parity\":{}}}",
            root.n(),
            root.sigma().as_i32(),
            fmt_f64(root.s()),
            fmt_f64(root.t()),
            fmt_f64(root.energy()),
            fmt_f64(root.q_correction()),
            rho
        );
    }
    let _ = write!(
        out,
        "],\"physical\":{},\"first_complex_pair\":{},\"tool_version\":\"{}\"}}",
        spectrum.physical,
        complex_pair_json(&spectrum.first_complex_pair),
        json_escape(TOOL_VERSION)
    );
    out.push('\n');
    out
}

fn params_json(params: &CouplingParams) -> String {
    format!(
        "{{\"x\":{},\"y\":{},\"z\":{}}}",
        fmt_f64(params.x()),
        fmt_f64(params.y()),
        fmt_f64(params.z())
    )
}

/// Spectrum as CSV, one row per level, mirroring the JSON level fields.
pub fn spectrum_to_csv(spectrum: &SpectrumResult) -> String {
    let mut out = String::from("n,sigma,s,t,E,Q,quasi_parity\n");
    for root in &spectrum.levels {
        let rho = quasi_parity(root)
            .map(|r| r.as_i32().to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            root.n(),
            root.sigma().as_i32(),
            fmt_f64(root.s()),
            fmt_f64(root.t()),
            fmt_f64(root.energy()),
            fmt_f64(root.q_correction()),
            rho
        );
    }
    out
}

/// Phase scan as CSV with the extracted boundary appended as a second
/// table after a blank line.
pub fn phase_to_csv(points: &[PhasePoint], boundary: &[(f64, f64)]) -> String {
    let mut out = String::from("xy,z,physical,first_complex_pair\n");
    for p in points {
        let pair = p
            .first_complex_pair
            .map(|c| format!("{}-{}:{}", c.pair.0, c.pair.1, c.sigma.as_i32()))
            .unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(p.xy), fmt_f64(p.z), p.physical, pair);
    }
    out.push('\n');
    out.push_str("xy,z_boundary\n");
    for (xy, z) in boundary {
        let _ = writeln!(out, "{},{}", fmt_f64(*xy), fmt_f64(*z));
    }
    out
}

/// Perturbation comparison table as CSV.
pub fn perturb_to_csv(rows: &[crate::perturbation::PerturbRow]) -> String {
    let mut out = String::from("n,sigma,q_exact,q_order1,q_order2,err1,err2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.sigma.as_i32(),
            fmt_f64(r.q_exact),
            fmt_f64(r.q_order1),
            fmt_f64(r.q_order2),
            fmt_f64(r.err1),
            fmt_f64(r.err2)
        );
    }
    out
}

/// Sampled wavefunction as CSV.
pub fn wavefunction_to_csv(
    state: &BoundState,
    params: &CouplingParams,
    samples: usize,
) -> String {
    let mut out = String::from("x,re_phi,im_phi,re_chi,im_chi\n");
    let last = samples.max(2) - 1;
    for j in 0..=last {
        // Endpoints land on exactly -1 and 1 so the boundary zeros are exact.
        let x = -1.0 + 2.0 * (j as f64) / (last as f64);
        let (phi, chi) = crate::states::eval_wavefunction(state, params, x);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(x),
            fmt_f64(phi.re),
            fmt_f64(phi.im),
            fmt_f64(chi.re),
            fmt_f64(chi.im)
        );
    }
    out
}

/// Verification report as JSON.
pub fn report_to_json(
    params: &CouplingParams,
    grid_n: usize,
    n_max: usize,
    report: &VerificationReport,
) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"params\":{},\"grid_n\":{},\"n_max\":{},\"identities\":[",
        params_json(params),
        grid_n,
        n_max
    );
    for (i, check) in report.checks.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"name\":\"{}\",\"residual\":{},\"tolerance\":{},\"norm\":\"{}\",\"pass\":{}}}",
            json_escape(check.name),
            fmt_f64(check.residual),
            fmt_f64(check.tolerance),
            check.norm.as_str(),
            check.pass
        );
    }
    let _ = write!(
        out,
        "],\"all_pass\":{},\"tool_version\":\"{}\"}}",
        report.all_pass(),
        json_escape(TOOL_VERSION)
    );
    out.push('\n');
    out
}

/// Parse a `start:stop:step` range, inclusive of start, exclusive of stop.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range must be start:stop:step, got {spec:?}"));
    }
    let start: f64 = parts[0].parse().map_err(|_| format!("bad range start {:?}", parts[0]))?;
    let stop: f64 = parts[1].parse().map_err(|_| format!("bad range stop {:?}", parts[1]))?;
    let step: f64 = parts[2].parse().map_err(|_| format!("bad range step {:?}", parts[2]))?;
    if !(step > 0.0) {
        return Err(format!("range step must be > 0, got {step}"));
    }
    if stop < start {
        return Err(format!("range stop {stop} below start {start}"));
    }
    let mut values = Vec::new();
    let mut i = 0usize;
    loop {
        let x = start + step * i as f64;
        if x >= stop - 1e-9 * step {
            break;
        }
        values.push(x);
        i += 1;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpinSector;
    use crate::secular::{solve_spectrum, DEFAULT_TOL};

    #[test]
    fn float_rendering_roundtrips() {
        for &x in &[0.0, 1.0, std::f64::consts::PI, -2.4674011002723395, 1e-300] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn spectrum_json_deterministic_and_ordered() {
        let params = CouplingParams::new(1.0, 1.0, 0.3).unwrap();
        let spectrum = solve_spectrum(&params, 2, DEFAULT_TOL);
        let a = spectrum_to_json(&spectrum);
        let b = spectrum_to_json(&solve_spectrum(&params, 2, DEFAULT_TOL));
        assert_eq!(a, b, "byte-deterministic");
        assert!(a.starts_with("{\"params\":{\"x\":"));
        assert!(a.contains("\"levels\":["));
        assert!(a.contains("\"physical\":true"));
        assert!(a.trim_end().ends_with("}"));
    }

    #[test]
    fn range_parsing() {
        let v = parse_range("0:1:0.25").unwrap();
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75]);
        assert!(parse_range("1:0:0.5").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
        // start inclusive, stop exclusive
        let v = parse_range("0:4:0.5").unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 0.0);
        assert_eq!(*v.last().unwrap(), 3.5);
    }

    #[test]
    fn wavefunction_csv_boundary_rows_zero() {
        let params = CouplingParams::new(1.0, 1.0, 0.0).unwrap();
        let root = crate::secular::solve_level(0, SpinSector::Plus, &params, DEFAULT_TOL).unwrap();
        let state = crate::states::match_amplitudes(&root, &params).unwrap();
        let csv = wavefunction_to_csv(&state, &params, 101);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 102);
        let first: Vec<&str> = lines[1].split(',').collect();
        let last: Vec<&str> = lines[101].split(',').collect();
        for field in &first[1..] {
            assert_eq!(field.parse::<f64>().unwrap(), 0.0);
        }
        for field in &last[1..] {
            assert_eq!(field.parse::<f64>().unwrap(), 0.0);
        }
    }
}
