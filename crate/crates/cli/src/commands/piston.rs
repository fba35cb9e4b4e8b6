use infobound::piston::{run_protocol, tradeoff_product, DevicePrecision, PistonConfig};
use infobound::{TradeoffReport, Verdict};
use serde::Serialize;

use super::RunContext;
use crate::error::CliError;
use crate::output::{prepare_dir, write_json, Cell, Provenance, Table};

pub const COLUMNS: &[&str] = &[
    "r",
    "k",
    "extracted_work",
    "reversible_work",
    "dissipated_work",
    "delta_phi_device",
    "delta_phi_readout",
    "product_over_kB",
    "satisfied",
];

pub const DEFAULT_R_GRID: &[f64] = &[1e-3, 1e-2, 0.05, 0.1, 0.3, 0.5, 0.9];
pub const DEFAULT_K_GRID: &[u64] = &[1, 2, 4, 8, 16, 64, 256, 1024];

#[derive(Serialize)]
struct Artifact {
    #[serde(flatten)]
    provenance: Provenance,
    reports: Vec<TradeoffReport>,
}

fn precision(name: &str) -> Result<DevicePrecision, CliError> {
    match name {
        "per-step" => Ok(DevicePrecision::PerStep),
        "end-to-end" => Ok(DevicePrecision::EndToEnd),
        other => Err(CliError::Config(format!(
            "piston.device_precision must be \"per-step\" or \"end-to-end\", got {other:?}"
        ))),
    }
}

pub fn run(ctx: &RunContext) -> Result<(), CliError> {
    let r_grid = ctx.config.f64_list_or("piston.r_grid", DEFAULT_R_GRID)?;
    let k_grid = ctx.config.u64_list_or("piston.k_grid", DEFAULT_K_GRID)?;
    if r_grid.is_empty() || k_grid.is_empty() {
        return Err(CliError::Config("piston grids must be non-empty".into()));
    }
    let n_particles = ctx.config.u64_or("piston.n_particles", 1)?;
    let device = precision(ctx.config.str_or("piston.device_precision", "per-step")?)?;
    let physics = ctx.physics()?;
    let seed = ctx.seed()?;

    let points: Vec<(f64, u64)> = r_grid
        .iter()
        .flat_map(|&r| k_grid.iter().map(move |&k| (r, k)))
        .collect();
    let results = ctx.ordered_map(points.len(), |i| {
        let (r, k) = points[i];
        let mut cfg = PistonConfig::with_ratio(n_particles, physics, r, k as usize);
        cfg.precision = device;
        Ok((run_protocol(&cfg)?, tradeoff_product(&cfg)?))
    })?;

    let kb = physics.kb();
    let mut table = Table::new(COLUMNS);
    let mut reports = Vec::with_capacity(results.len());
    let mut violations = 0;
    for ((r, k), (run, report)) in points.iter().zip(results) {
        let row = if report.satisfied == Verdict::NoProcess {
            vec![0.0; 6]
        } else {
            vec![
                run.extracted_work,
                run.reversible_work,
                run.dissipated,
                run.delta_phi_device,
                run.delta_phi_readout,
                report.product / kb,
            ]
        };
        let mut cells = vec![Cell::Float(*r), Cell::Int(*k)];
        cells.extend(row.iter().map(|&x| Cell::Float(x)));
        cells.push(Cell::Text(report.satisfied.as_str().to_owned()));
        table.push(cells)?;
        if report.satisfied.is_violation() {
            violations += 1;
        }
        reports.push(report);
    }

    let dir = prepare_dir(&ctx.out)?;
    table.write(&dir.join("piston.csv"))?;
    write_json(
        &dir.join("piston_report.json"),
        &Artifact {
            provenance: Provenance::new("scan-piston", seed),
            reports,
        },
    )?;
    println!(
        "scan-piston: {} grid points, {violations} violations",
        points.len()
    );
    if violations > 0 {
        return Err(CliError::CheckFailed(format!(
            "{violations} grid point(s) fall below k_B/2"
        )));
    }
    Ok(())
}
