//! Text, CSV and JSON rendering. Numbers are written with 17 significant
//! digits so that every printed value reads back to the same `f64`.

use std::fmt::Write;

use serde::Serialize;
use serde_json::json;

use super::commands::{ComputeOutput, PosteriorOutput, PosteriorSummary, SweepRow};
use super::config::OutputFormat;
use crate::verify::VerifyReport;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV cell: blank for missing or non-finite values.
fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => num(v),
        _ => String::new(),
    }
}

fn json_doc<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn compute(out: &ComputeOutput, format: OutputFormat) -> String {
    let r = &out.report;
    match format {
        OutputFormat::Json => json_doc(out),
        OutputFormat::Csv => {
            let mut s = String::from(
                "copies_M,total_photons_N,mean_L2,mean_L2_sq,inverse_dth2,delta_theta,sql_ratio,closed_form,inv_dth2_closed,relative_difference\n",
            );
            let engine = format!(
                "{},{},{},{},{},{},{}",
                num(r.copies_m),
                num(r.total_photons_n),
                num(r.mean_l2),
                num(r.mean_l2_sq),
                num(r.inverse_dth2),
                cell(Some(r.delta_theta)),
                num(out.sql_ratio)
            );
            if out.closed_forms.is_empty() {
                let _ = writeln!(s, "{engine},,,");
            }
            for c in &out.closed_forms {
                let _ = writeln!(
                    s,
                    "{engine},{},{},{}",
                    c.formula,
                    num(c.inverse_dth2),
                    num(c.relative_difference)
                );
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "mode_a          {}", out.mode_a);
            let _ = writeln!(s, "mode_b          {}", out.mode_b);
            let _ = writeln!(s, "copies_M        {}", num(r.copies_m));
            let _ = writeln!(s, "total_photons_N {}", num(r.total_photons_n));
            let _ = writeln!(s, "mean_L2         {}", num(r.mean_l2));
            let _ = writeln!(s, "mean_L2_sq      {}", num(r.mean_l2_sq));
            let _ = writeln!(s, "inverse_dth2    {}", num(r.inverse_dth2));
            let _ = writeln!(s, "delta_theta     {}", num(r.delta_theta));
            let _ = writeln!(s, "sql_ratio       {}", num(out.sql_ratio));
            for c in &out.closed_forms {
                let _ = writeln!(
                    s,
                    "closed_form     {} inverse_dth2 {} relative_difference {}",
                    c.formula,
                    num(c.inverse_dth2),
                    num(c.relative_difference)
                );
            }
            s
        }
    }
}

pub fn sweep(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json_doc(&json!({ "rows": rows })),
        OutputFormat::Csv | OutputFormat::Text => {
            let mut s = String::from("param,value,inv_dth2_engine,inv_dth2_closed,sql_ratio\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.param,
                    num(r.value),
                    num(r.inv_dth2_engine),
                    cell(r.inv_dth2_closed),
                    cell(r.sql_ratio)
                );
            }
            s
        }
    }
}

fn interval(i: Option<(f64, f64)>) -> String {
    match i {
        Some((lo, hi)) => format!("[{}, {}]", num(lo), num(hi)),
        None => "n/a".into(),
    }
}

pub fn posterior_summary_lines(s: &PosteriorSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "copies_M                 {}", s.copies_m);
    let _ = writeln!(
        out,
        "predicted_delta_theta    {}",
        s.predicted_delta_theta.map_or("n/a".into(), num)
    );
    let _ = writeln!(out, "exact_mean               {}", num(s.exact_mean));
    let _ = writeln!(out, "exact_std_dev            {}", num(s.exact_std_dev));
    let _ = writeln!(
        out,
        "exact_interval_68        {}",
        interval(Some(s.exact_interval_68))
    );
    let _ = writeln!(
        out,
        "exact_interval_95        {}",
        interval(Some(s.exact_interval_95))
    );
    let _ = writeln!(
        out,
        "gaussian_interval_68     {}",
        interval(s.gaussian_interval_68)
    );
    let _ = writeln!(
        out,
        "gaussian_interval_95     {}",
        interval(s.gaussian_interval_95)
    );
    let _ = writeln!(
        out,
        "total_variation_distance {}",
        s.total_variation_distance.map_or("n/a".into(), num)
    );
    out
}

pub fn posterior(out: &PosteriorOutput, format: OutputFormat) -> String {
    let thetas = out.grid.thetas();
    let exact = out.exact.masses();
    let gaussian = out.gaussian.as_ref().map(|g| g.masses());
    match format {
        OutputFormat::Json => {
            let rows: Vec<_> = thetas
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    json!({
                        "theta": t,
                        "exact_posterior": exact[i],
                        "gaussian_approx": gaussian.map(|g| g[i]),
                    })
                })
                .collect();
            json_doc(&json!({ "grid": out.grid, "summary": out.summary, "rows": rows }))
        }
        OutputFormat::Csv | OutputFormat::Text => {
            let mut s = String::new();
            if format == OutputFormat::Text {
                s.push_str(&posterior_summary_lines(&out.summary));
                s.push('\n');
            }
            s.push_str("theta,exact_posterior,gaussian_approx\n");
            for (i, t) in thetas.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    num(*t),
                    num(exact[i]),
                    cell(gaussian.map(|g| g[i]))
                );
            }
            s
        }
    }
}

pub fn verify(report: &VerifyReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json_doc(&json!({
            "max_total_photons": report.max_total_photons,
            "seed": report.seed,
            "all_passed": report.all_passed(),
            "checks": report.checks,
        })),
        OutputFormat::Csv => {
            let mut s = String::from("check,passed,worst,tolerance\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    c.name,
                    c.passed,
                    num(c.worst),
                    num(c.tolerance)
                );
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{} {:<24} worst {} tolerance {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    num(c.worst),
                    num(c.tolerance)
                );
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed == 0 {
                s.push_str("all checks passed\n");
            } else {
                let _ = writeln!(s, "{failed} check(s) failed");
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            50.0,
            3690.122178597449,
            f64::MIN_POSITIVE,
            -2.5e-300,
        ] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(cell(Some(f64::INFINITY)), "");
        assert_eq!(cell(None), "");
    }
}
