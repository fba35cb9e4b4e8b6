use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use infobound::info::kl_fisher_expansion_check;
use infobound::phase::readout_family;
use infobound::report::finite_or_inf;
use infobound::stats::loglog_slope;
use serde::Serialize;

use super::RunContext;
use crate::error::CliError;
use crate::output::{prepare_dir, write_json, Cell, Provenance, Table};

pub const COLUMNS: &[&str] = &[
    "phi",
    "delta",
    "kl_forward",
    "kl_reverse",
    "jeffreys",
    "quadratic",
    "ratio",
];

pub const DEFAULT_DELTAS: &[f64] = &[1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Serialize)]
struct Slope {
    #[serde(with = "finite_or_inf")]
    phi: f64,
    /// `None` when fewer than two points have `ratio ≠ 1`.
    slope: Option<f64>,
}

#[derive(Serialize)]
struct Footer {
    #[serde(flatten)]
    provenance: Provenance,
    slopes: Vec<Slope>,
    min_slope: Option<f64>,
    #[serde(with = "finite_or_inf")]
    max_jeffreys_residual: f64,
}

pub fn run(ctx: &RunContext) -> Result<(), CliError> {
    let phis = ctx
        .config
        .f64_list_or("klfisher.phi", &[FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3])?;
    let deltas = ctx
        .config
        .f64_list_or("klfisher.delta_grid", DEFAULT_DELTAS)?;
    if phis.is_empty() || deltas.is_empty() {
        return Err(CliError::Config("klfisher grids must be non-empty".into()));
    }
    let seed = ctx.seed()?;
    let finest = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let family = readout_family(finest)?;

    let mut table = Table::new(COLUMNS);
    let mut slopes = Vec::new();
    let mut max_jeffreys_residual = 0.0f64;
    for &phi in &phis {
        let mut gaps = Vec::with_capacity(deltas.len());
        for &delta in &deltas {
            let e = kl_fisher_expansion_check(&family, phi, delta)?;
            max_jeffreys_residual =
                max_jeffreys_residual.max((e.jeffreys - e.kl_forward - e.kl_reverse).abs());
            gaps.push((e.ratio - 1.0).abs());
            table.push(vec![
                Cell::Float(phi),
                Cell::Float(delta),
                Cell::Float(e.kl_forward),
                Cell::Float(e.kl_reverse),
                Cell::Float(e.jeffreys),
                Cell::Float(e.quadratic),
                Cell::Float(e.ratio),
            ])?;
        }
        slopes.push(Slope {
            phi,
            slope: loglog_slope(&deltas, &gaps),
        });
    }
    let min_slope = slopes
        .iter()
        .filter_map(|s| s.slope)
        .fold(None, |acc: Option<f64>, s| {
            Some(acc.map_or(s, |a| a.min(s)))
        });

    let dir = prepare_dir(&ctx.out)?;
    table.write(&dir.join("kl_fisher.csv"))?;
    write_json(
        &dir.join("kl_fisher_summary.json"),
        &Footer {
            provenance: Provenance::new("kl-fisher", seed),
            slopes,
            min_slope,
            max_jeffreys_residual,
        },
    )?;
    match min_slope {
        Some(s) => println!("kl-fisher: min log-log slope of |ratio - 1| = {s:.4}"),
        None => println!("kl-fisher: too few points for a slope"),
    }
    Ok(())
}
