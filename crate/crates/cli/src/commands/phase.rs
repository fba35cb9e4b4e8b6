use std::f64::consts::FRAC_PI_3;

use infobound::phase::{
    cramer_rao, tradeoff_chain, EncoderMode, EncoderSpec, EstimationPlan, EstimationRun,
    MIN_ENSEMBLES,
};
use infobound::report::finite_or_inf;
use infobound::{TradeoffReport, Verdict};
use serde::Serialize;

use super::RunContext;
use crate::error::CliError;
use crate::output::{prepare_dir, write_json, Cell, Provenance, Table};

pub const COLUMNS: &[&str] = &[
    "phi",
    "delta_phi_device",
    "N",
    "M",
    "seed",
    "var_estimate",
    "cr_bound",
    "cr_ratio",
    "info_proxy",
    "chain_lhs",
    "chain_rhs",
    "satisfied",
];

#[derive(Serialize)]
struct RowDetail {
    #[serde(with = "finite_or_inf")]
    mean_estimate: f64,
    #[serde(with = "finite_or_inf")]
    delta_eff: f64,
    #[serde(with = "finite_or_inf")]
    expansion_ratio: f64,
    #[serde(with = "finite_or_inf")]
    relative_accuracy: f64,
    #[serde(with = "finite_or_inf")]
    cr_tolerance: f64,
    single_shot: bool,
    report: TradeoffReport,
}

#[derive(Serialize)]
struct Artifact {
    #[serde(flatten)]
    provenance: Provenance,
    rows: Vec<RowDetail>,
}

fn mode(name: &str) -> Result<EncoderMode, CliError> {
    match name {
        "quantize" => Ok(EncoderMode::Quantize),
        "jitter" => Ok(EncoderMode::Jitter),
        other => Err(CliError::Config(format!(
            "phase.mode must be \"quantize\" or \"jitter\", got {other:?}"
        ))),
    }
}

pub fn run(ctx: &RunContext) -> Result<(), CliError> {
    let phis = ctx.config.f64_list_or("phase.phi", &[FRAC_PI_3])?;
    let pitches = ctx.config.f64_list_or("phase.delta_phi", &[0.01])?;
    let shot_counts = ctx.config.u64_list_or("phase.shots", &[100])?;
    let ensembles = ctx.config.u64_or("phase.ensembles", 10_000)? as usize;
    let mode = mode(ctx.config.str_or("phase.mode", "quantize")?)?;
    let origin = ctx.config.f64_or("phase.origin", 0.0)?;
    let physics = ctx.physics()?;
    let seed = ctx.seed()?;

    if ensembles < MIN_ENSEMBLES {
        eprintln!(
            "warning: M = {ensembles} < {MIN_ENSEMBLES}; the statistical tolerance dominates the comparison"
        );
    }

    let mut table = Table::new(COLUMNS);
    let mut rows = Vec::new();
    let mut violations = 0;
    for &phi in &phis {
        for &delta in &pitches {
            for &shots in &shot_counts {
                let encoder = EncoderSpec::new(delta, mode)?.with_origin(origin);
                let plan = EstimationPlan::new(phi, shots, ensembles, seed).with_encoder(encoder);
                let estimates = ctx.ordered_map(ensembles, |e| Ok(plan.ensemble(e)?))?;
                let run = EstimationRun::from_estimates(plan, estimates)?;
                let cr = cramer_rao(&run)?;
                let chain = tradeoff_chain(phi, &encoder, &run, &physics)?;
                if chain.verdict == Verdict::Violated {
                    violations += 1;
                }
                table.push(vec![
                    Cell::Float(phi),
                    Cell::Float(delta),
                    Cell::Int(shots),
                    Cell::Int(ensembles as u64),
                    Cell::Int(seed),
                    Cell::Float(cr.variance),
                    Cell::Float(cr.bound),
                    Cell::Float(cr.ratio),
                    Cell::Float(chain.info_proxy),
                    Cell::Float(chain.chain_lhs),
                    Cell::Float(chain.chain_rhs),
                    Cell::Text(chain.verdict.as_str().to_owned()),
                ])?;
                rows.push(RowDetail {
                    mean_estimate: run.mean_estimate,
                    delta_eff: chain.delta_eff,
                    expansion_ratio: chain.expansion_ratio,
                    relative_accuracy: chain.relative_accuracy,
                    cr_tolerance: cr.tolerance,
                    single_shot: cr.degenerate,
                    report: chain.report,
                });
            }
        }
    }

    let row_count = rows.len();
    let dir = prepare_dir(&ctx.out)?;
    table.write(&dir.join("phase.csv"))?;
    write_json(
        &dir.join("phase_report.json"),
        &Artifact {
            provenance: Provenance::new("estimate-phase", seed),
            rows,
        },
    )?;
    println!("estimate-phase: {row_count} rows, {violations} violations");
    if violations > 0 {
        return Err(CliError::CheckFailed(format!(
            "{violations} row(s) violate the trade-off beyond the statistical tolerance"
        )));
    }
    Ok(())
}
