use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use anyhow::{Context, Result};
use dipole_core::dipole::atlas;
use dipole_core::energy::{energy, gap_experiment};
use dipole_core::geom::{AxiMap, HalfPlanePoint};
use dipole_core::verify::{default_suite, run_checks};

use crate::config::{RunConfig, UsageError};

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

/// The map on a grid x grid lattice of cell centres covering
/// 0 < r < 4, -4 < x3 < 4. Nodes outside the domain or on a singular set
/// get region "none" and NaN values.
pub fn eval_csv(cfg: &RunConfig) -> Result<String> {
    let map = cfg.build_map()?;
    let n = cfg.grid;
    let mut s = String::from("r,x3,region,image_r,image_x3,det,frob2\n");
    for j in 0..n {
        let x3 = -4.0 + 8.0 * (j as f64 + 0.5) / n as f64;
        for i in 0..n {
            let r = 4.0 * (i as f64 + 0.5) / n as f64;
            let p = HalfPlanePoint::new(r, x3);
            let row = map.tag(p).and_then(|t| {
                let y = map.eval(p)?;
                let jac = map.jacobian_in(t, p)?;
                let det = map.exact_det(p).unwrap_or_else(|| jac.det());
                Ok((t.as_str(), [y.r, y.x3, det, jac.frobenius_sq()]))
            });
            let (region, vals) = row.unwrap_or(("none", [f64::NAN; 4]));
            write!(s, "{},{},{region}", fmt17(r), fmt17(x3))?;
            for v in vals {
                write!(s, ",{}", fmt17(v))?;
            }
            s.push('\n');
        }
    }
    Ok(s)
}

/// EnergyReport as JSON, with `budget_exceeded` set when the quadrature
/// missed its tolerance.
pub fn energy_json(cfg: &RunConfig) -> Result<String> {
    let map = cfg.build_map()?;
    let rep = energy(&map, &cfg.quad, &cfg.h);
    let mut v = serde_json::to_value(&rep)?;
    v["budget_exceeded"] = serde_json::Value::Bool(!rep.converged);
    if !rep.converged {
        eprintln!(
            "warning: quadrature budget exceeded (error estimate {:.3e})",
            rep.error_est
        );
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub struct VerifyOutput {
    pub json: String,
    pub passed: bool,
    /// wall-clock timings per report id, kept apart from the reports
    pub timings: BTreeMap<String, Vec<(String, u128)>>,
}

pub fn verify(cfg: &RunConfig) -> Result<VerifyOutput> {
    let specs: Vec<_> = default_suite(cfg.seed, cfg.scale)
        .into_iter()
        .filter(|s| cfg.suite == "all" || s.id().starts_with(&cfg.suite))
        .collect();
    if specs.is_empty() {
        return Err(UsageError(format!("no check matches suite '{}'", cfg.suite)).into());
    }
    let reports = run_checks(&specs);
    let passed = reports.iter().all(|r| r.passed());
    let timings = reports.iter().map(|r| (r.id.clone(), r.timings_ms.clone())).collect();
    Ok(VerifyOutput {
        json: serde_json::to_string_pretty(&reports)? + "\n",
        passed,
        timings,
    })
}

/// Ladder table: one row for E(v), one for F(v), then the u_eps and
/// b_delta ladders.
pub fn gap_table(cfg: &RunConfig, json: bool) -> Result<String> {
    if cfg.eps_ladder.is_empty() && cfg.deltas.is_empty() {
        return Err(UsageError("gap needs a non-empty eps or delta ladder".into()).into());
    }
    let g = gap_experiment(&cfg.eps_ladder, &cfg.deltas, cfg.gamma, &cfg.h, &cfg.quad)?;
    if json {
        return Ok(serde_json::to_string_pretty(&g)? + "\n");
    }
    let mut s = String::from("ladder,eps_or_delta,E,err,deviation,converged\n");
    let v = &g.energy_v;
    writeln!(s, "v,0,{},{},{},{}", fmt17(v.total), fmt17(v.error_est), fmt17(v.total - g.relaxed_v), v.converged)?;
    writeln!(s, "relaxed_v,0,{},{},0,{}", fmt17(g.relaxed_v), fmt17(v.error_est), v.converged)?;
    for (name, rows) in [("ueps", &g.ueps), ("bdelta", &g.bdelta)] {
        for r in rows {
            writeln!(
                s,
                "{name},{},{},{},{},{}",
                fmt17(r.param),
                fmt17(r.energy),
                fmt17(r.error_est),
                fmt17(r.deviation),
                r.converged
            )?;
        }
    }
    Ok(s)
}

pub fn atlas_csv(cfg: &RunConfig) -> Result<String> {
    let mut s = String::from("x1,x3,region,color\n");
    for row in atlas(cfg.grid) {
        writeln!(s, "{},{},{},{}", fmt17(row.x1), fmt17(row.x3), row.region, row.color)?;
    }
    Ok(s)
}
