use infobound::phase::substream;
use infobound::report::finite_or_inf;
use infobound::tpm::{jarzynski_check, QuantumDrive};
use rand::Rng;
use serde::Serialize;

use super::RunContext;
use crate::error::CliError;
use crate::output::{prepare_dir, write_json, Cell, Provenance, Table};

pub const TOLERANCE: f64 = 1e-12;
pub const COLUMNS: &[&str] = &["trial", "dim", "lhs", "rhs", "residual"];

#[derive(Serialize)]
struct Summary {
    #[serde(flatten)]
    provenance: Provenance,
    trials: u64,
    max_dim: u64,
    #[serde(with = "finite_or_inf")]
    max_residual: f64,
    worst_trial: u64,
    #[serde(with = "finite_or_inf")]
    tolerance: f64,
    passed: bool,
}

pub fn run(ctx: &RunContext) -> Result<(), CliError> {
    let trials = ctx.config.u64_or("jarzynski.trials", 500)?;
    if trials == 0 {
        return Err(CliError::Config(
            "jarzynski.trials = 0 leaves nothing to report".into(),
        ));
    }
    let max_dim = ctx.config.u64_or("jarzynski.dim", 6)?;
    if max_dim < 2 {
        return Err(CliError::Config(format!(
            "jarzynski.dim = {max_dim}: a drive needs at least 2 levels"
        )));
    }
    let physics = ctx.physics()?;
    let seed = ctx.seed()?;

    let checks = ctx.ordered_map(trials as usize, |t| {
        let mut rng = substream(seed, t as u64);
        let dim = rng.random_range(2..=max_dim) as usize;
        let drive = QuantumDrive::random(dim, physics, &mut rng)?;
        Ok((dim, jarzynski_check(&drive)))
    })?;

    let mut table = Table::new(COLUMNS);
    let mut max_residual = 0.0f64;
    let mut worst_trial = 0;
    for (t, (dim, check)) in checks.iter().enumerate() {
        if check.residual.is_nan() {
            return Err(CliError::NaN(format!("residual of trial {t}")));
        }
        if check.residual > max_residual {
            max_residual = check.residual;
            worst_trial = t as u64;
        }
        table.push(vec![
            Cell::Int(t as u64),
            Cell::Int(*dim as u64),
            Cell::Float(check.lhs),
            Cell::Float(check.rhs),
            Cell::Float(check.residual),
        ])?;
    }

    let dir = prepare_dir(&ctx.out)?;
    table.write(&dir.join("jarzynski.csv"))?;
    let passed = max_residual <= TOLERANCE;
    write_json(
        &dir.join("jarzynski.json"),
        &Summary {
            provenance: Provenance::new("verify-jarzynski", seed),
            trials,
            max_dim,
            max_residual,
            worst_trial,
            tolerance: TOLERANCE,
            passed,
        },
    )?;
    println!("verify-jarzynski: {trials} drives, max residual {max_residual:.3e}");
    if !passed {
        return Err(CliError::CheckFailed(format!(
            "max residual {max_residual:.3e} exceeds {TOLERANCE:e} (trial {worst_trial})"
        )));
    }
    Ok(())
}
