//! Consolidates one row of a finished `scan-piston` or `estimate-phase`
//! run into a single [`TradeoffReport`].

use std::collections::BTreeMap;
use std::path::Path;

use infobound::report::InputValue;
use infobound::{TradeoffReport, Verdict};
use serde::Serialize;

use super::RunContext;
use crate::error::CliError;
use crate::output::{parse_float, prepare_dir, write_json};

/// Relative slack when re-deriving a stored product from its factors.
const CONSISTENCY: f64 = 1e-9;

#[derive(Serialize)]
struct Consolidated {
    artifact_version: &'static str,
    seed: u64,
    source: String,
    source_row: usize,
    #[serde(flatten)]
    report: TradeoffReport,
}

enum Kind {
    Piston,
    Phase,
}

struct Rows {
    kind: Kind,
    header: Vec<String>,
    records: Vec<Vec<String>>,
}

impl Rows {
    fn read(path: &Path) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let kind = if header == super::piston::COLUMNS {
            Kind::Piston
        } else if header == super::phase::COLUMNS {
            Kind::Phase
        } else {
            return Err(CliError::Schema(format!(
                "{}: column set matches neither a piston scan nor a phase run: {}",
                path.display(),
                header.join(",")
            )));
        };
        let records = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>()?;
        if records.is_empty() {
            return Err(CliError::Schema(format!(
                "{}: no data rows",
                path.display()
            )));
        }
        Ok(Self {
            kind,
            header,
            records,
        })
    }

    fn text(&self, row: usize, column: &str) -> &str {
        let idx = self
            .header
            .iter()
            .position(|h| h == column)
            .expect("validated header");
        &self.records[row][idx]
    }

    fn float(&self, row: usize, column: &str) -> Result<f64, CliError> {
        parse_float(column, self.text(row, column))
    }

    fn int(&self, row: usize, column: &str) -> Result<u64, CliError> {
        self.text(row, column)
            .parse()
            .map_err(|_| CliError::Schema(format!("column `{column}` must be an integer")))
    }

    fn verdict(&self, row: usize) -> Result<Verdict, CliError> {
        let s = self.text(row, "satisfied");
        Verdict::parse(s).ok_or_else(|| CliError::Schema(format!("unknown verdict {s:?}")))
    }

    /// Non-degenerate row with the smallest product, else row 0.
    fn tightest(&self) -> Result<usize, CliError> {
        let key = match self.kind {
            Kind::Piston => "product_over_kB",
            Kind::Phase => "chain_lhs",
        };
        let mut best: Option<(usize, f64)> = None;
        for row in 0..self.records.len() {
            if matches!(self.verdict(row)?, Verdict::NoProcess | Verdict::Ideal) {
                continue;
            }
            let v = self.float(row, key)?;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((row, v));
            }
        }
        Ok(best.map_or(0, |(r, _)| r))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY * a.abs().max(b.abs()).max(1.0)
}

fn piston_report(rows: &Rows, row: usize, ctx: &RunContext) -> Result<TradeoffReport, CliError> {
    let physics = ctx.physics()?;
    let kb = physics.kb();
    let mut inputs: BTreeMap<String, InputValue> = BTreeMap::new();
    inputs.insert("r".into(), rows.float(row, "r")?.into());
    inputs.insert("k".into(), rows.int(row, "k")?.into());
    inputs.insert("kb".into(), kb.into());
    inputs.insert("temperature".into(), physics.temperature().into());

    let stored = rows.verdict(row)?;
    if stored == Verdict::NoProcess {
        return Ok(TradeoffReport::degenerate(
            "piston",
            Verdict::NoProcess,
            kb,
            inputs,
        ));
    }
    let delta_dollar = rows.float(row, "dissipated_work")? / physics.temperature();
    let ratio = rows.float(row, "delta_phi_readout")? / rows.float(row, "delta_phi_device")?;
    let report = TradeoffReport::new(
        "piston",
        delta_dollar,
        ratio * ratio,
        kb,
        infobound::piston::PRODUCT_TOLERANCE,
        inputs,
    );
    if !close(report.product / kb, rows.float(row, "product_over_kB")?) {
        return Err(CliError::Schema(format!(
            "row {row}: product_over_kB does not match the stored work and spreads"
        )));
    }
    if report.satisfied != stored {
        return Err(CliError::Schema(format!(
            "row {row}: stored verdict disagrees with the product"
        )));
    }
    Ok(report)
}

/// Rebuilds the phase report: `Δ$ = k_B I` and `ΔI = chain_lhs / (2 I)`.
fn phase_report(
    rows: &Rows,
    row: usize,
    ctx: &RunContext,
) -> Result<(TradeoffReport, u64), CliError> {
    let kb = ctx.physics()?.kb();
    let seed = rows.int(row, "seed")?;
    let ensembles = rows.int(row, "M")?;
    let mut inputs: BTreeMap<String, InputValue> = BTreeMap::new();
    inputs.insert("phi".into(), rows.float(row, "phi")?.into());
    inputs.insert(
        "delta_phi_device".into(),
        rows.float(row, "delta_phi_device")?.into(),
    );
    inputs.insert("shots".into(), rows.int(row, "N")?.into());
    inputs.insert("ensembles".into(), ensembles.into());
    inputs.insert("seed".into(), seed.into());

    let stored = rows.verdict(row)?;
    let info = rows.float(row, "info_proxy")?;
    if stored == Verdict::Ideal || info == 0.0 {
        return Ok((
            TradeoffReport::degenerate("phase", Verdict::Ideal, kb, inputs),
            seed,
        ));
    }
    let chain_lhs = rows.float(row, "chain_lhs")?;
    let tolerance = 3.0 * (2.0 / ensembles as f64).sqrt();
    let report = TradeoffReport::new(
        "phase",
        kb * info,
        chain_lhs / (2.0 * info),
        kb,
        tolerance,
        inputs,
    );
    if report.satisfied != stored {
        return Err(CliError::Schema(format!(
            "row {row}: stored verdict disagrees with chain_lhs"
        )));
    }
    Ok((report, seed))
}

pub fn run(ctx: &RunContext, input: &Path) -> Result<(), CliError> {
    if !input.is_file() {
        return Err(CliError::Config(format!(
            "input {} does not exist",
            input.display()
        )));
    }
    let rows = Rows::read(input)?;
    let row = match ctx.config.optional_u64("report.row")? {
        Some(r) if (r as usize) < rows.records.len() => r as usize,
        Some(r) => {
            return Err(CliError::Config(format!(
                "report.row = {r} but the input has {} rows",
                rows.records.len()
            )))
        }
        None => rows.tightest()?,
    };
    let (report, seed) = match rows.kind {
        Kind::Piston => (piston_report(&rows, row, ctx)?, ctx.seed()?),
        Kind::Phase => phase_report(&rows, row, ctx)?,
    };
    let violated = report.satisfied.is_violation();
    let dir = prepare_dir(&ctx.out)?;
    write_json(
        &dir.join("tradeoff_report.json"),
        &Consolidated {
            artifact_version: env!("CARGO_PKG_VERSION"),
            seed,
            source: input.display().to_string(),
            source_row: row,
            report,
        },
    )?;
    println!("tradeoff-report: row {row} of {}", input.display());
    if violated {
        return Err(CliError::CheckFailed(
            "the selected row violates the bound".into(),
        ));
    }
    Ok(())
}
