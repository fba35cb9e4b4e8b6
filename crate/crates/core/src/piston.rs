//! Isothermal ideal gas under a mass-loaded piston.
//!
//! The external pressure is lowered from `p_initial` to `p_final` in `k`
//! equal decrements. After each decrement the gas re-equilibrates at the
//! bath temperature, so stage `i` ends at `V_i = N k_B T / P_i` and the work
//! extracted during the stage is `P_i (V_i − V_{i−1})` against the constant
//! new load. The reversible reference is `N k_B T ln(P_initial / P_final)`.
//!
//! The piston height `x = V / A` is the probe read-out. Expanding
//! `U(x) = P A x − N k_B T ln x` to second order about its minimum gives the
//! thermal spread `Var(x) = k_B T / U″(x₀) = x₀² / N`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::report::{InputValue, TradeoffReport, Verdict};
use crate::{Error, PhysicalContext, Result};

/// Relative slack on `product ≥ k_B/2` for this deterministic model.
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

/// How the device precision `δ_φ` is read off a staged protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DevicePrecision {
    /// Smallest single-stage displacement.
    #[default]
    PerStep,
    /// Total displacement from the initial to the final equilibrium.
    EndToEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PistonConfig {
    pub n_particles: u64,
    pub ctx: PhysicalContext,
    pub area: f64,
    pub p_initial: f64,
    pub p_final: f64,
    pub steps: usize,
    #[serde(default)]
    pub precision: DevicePrecision,
}

impl PistonConfig {
    /// Unit area and `p_initial = 1`, with `p_final = 1 − r`.
    pub fn with_ratio(n_particles: u64, ctx: PhysicalContext, r: f64, steps: usize) -> Self {
        Self {
            n_particles,
            ctx,
            area: 1.0,
            p_initial: 1.0,
            p_final: 1.0 - r,
            steps,
            precision: DevicePrecision::PerStep,
        }
    }

    /// Fractional pressure drop `(p_initial − p_final) / p_initial`.
    pub fn ratio(&self) -> f64 {
        (self.p_initial - self.p_final) / self.p_initial
    }

    fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParameter("n_particles must be ≥ 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be ≥ 1".into()));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "area must be positive, got {}",
                self.area
            )));
        }
        if !self.ctx.temperature().is_finite() {
            return Err(Error::InvalidParameter("temperature must be finite".into()));
        }
        let ok = self.p_initial.is_finite()
            && self.p_final.is_finite()
            && self.p_final > 0.0
            && self.p_final <= self.p_initial;
        if !ok {
            return Err(Error::BadPressureOrder {
                p_initial: self.p_initial,
                p_final: self.p_final,
            });
        }
        Ok(())
    }

    /// External pressure after each stage, `P_0 … P_k`.
    pub fn pressures(&self) -> Vec<f64> {
        let step = (self.p_initial - self.p_final) / self.steps as f64;
        (0..=self.steps)
            .map(|i| {
                if i == self.steps {
                    self.p_final
                } else {
                    self.p_initial - i as f64 * step
                }
            })
            .collect()
    }

    fn height(&self, pressure: f64) -> f64 {
        self.n_particles as f64 * self.ctx.thermal_energy() / (pressure * self.area)
    }

    fn inputs(&self) -> BTreeMap<String, InputValue> {
        let mut m = BTreeMap::new();
        m.insert("n_particles".into(), self.n_particles.into());
        m.insert("kb".into(), self.ctx.kb().into());
        m.insert("temperature".into(), self.ctx.temperature().into());
        m.insert("area".into(), self.area.into());
        m.insert("p_initial".into(), self.p_initial.into());
        m.insert("p_final".into(), self.p_final.into());
        m.insert("r".into(), self.ratio().into());
        m.insert("steps".into(), self.steps.into());
        let precision = match self.precision {
            DevicePrecision::PerStep => "per-step",
            DevicePrecision::EndToEnd => "end-to-end",
        };
        m.insert("device_precision".into(), precision.into());
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PistonRun {
    pub extracted_work: f64,
    pub reversible_work: f64,
    /// Sum of per-stage dissipation; equals `reversible − extracted`.
    pub dissipated: f64,
    pub pressures: Vec<f64>,
    /// Equilibrium heights `x_0 … x_k`.
    pub positions: Vec<f64>,
    pub delta_phi_device: f64,
    pub delta_phi_readout: f64,
}

impl PistonRun {
    pub fn is_no_process(&self) -> bool {
        self.delta_phi_device == 0.0
    }
}

/// `−ln(1 − r) − r`, accurate for small `r`.
fn stage_dissipation(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let mut term = r * r;
        let mut total = 0.0;
        for k in 2..=7 {
            total += term / k as f64;
            term *= r;
        }
        total
    } else {
        -(-r).ln_1p() - r
    }
}

pub fn run_protocol(cfg: &PistonConfig) -> Result<PistonRun> {
    cfg.validate()?;
    let nkt = cfg.n_particles as f64 * cfg.ctx.thermal_energy();
    let pressures = cfg.pressures();
    let positions: Vec<f64> = pressures.iter().map(|&p| cfg.height(p)).collect();

    let mut extracted_work = 0.0;
    let mut dissipated = 0.0;
    for pair in pressures.windows(2) {
        let r = (pair[0] - pair[1]) / pair[0];
        // P_i (V_i − V_{i−1}) = N k_B T (1 − P_i / P_{i−1})
        extracted_work += nkt * r;
        dissipated += nkt * stage_dissipation(r);
    }
    let reversible_work = nkt * (cfg.p_initial / cfg.p_final).ln();

    let delta_phi_device = match cfg.precision {
        DevicePrecision::PerStep => positions
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(f64::INFINITY, f64::min),
        DevicePrecision::EndToEnd => (positions[cfg.steps] - positions[0]).abs(),
    };
    let delta_phi_readout = positions[cfg.steps] / (cfg.n_particles as f64).sqrt();

    Ok(PistonRun {
        extracted_work,
        reversible_work,
        dissipated,
        pressures,
        positions,
        delta_phi_device,
        delta_phi_readout,
    })
}

/// Thermal read-out spread `x_stage / √N` at the given stage.
pub fn fluctuation_scale(cfg: &PistonConfig, stage: usize) -> Result<f64> {
    cfg.validate()?;
    if stage > cfg.steps {
        return Err(Error::StageOutOfRange {
            stage,
            stages: cfg.steps,
        });
    }
    let p = cfg.pressures()[stage];
    Ok(cfg.height(p) / (cfg.n_particles as f64).sqrt())
}

/// `Δ$ = W_D / T` and `ΔI_φ = (Δφ / δ_φ)²` with `Δφ` the final-stage spread.
pub fn tradeoff_product(cfg: &PistonConfig) -> Result<TradeoffReport> {
    let run = run_protocol(cfg)?;
    let kb = cfg.ctx.kb();
    let inputs = cfg.inputs();
    if run.is_no_process() {
        return Ok(TradeoffReport::degenerate(
            "piston",
            Verdict::NoProcess,
            kb,
            inputs,
        ));
    }
    let delta_dollar = run.dissipated / cfg.ctx.temperature();
    let delta_info = (run.delta_phi_readout / run.delta_phi_device).powi(2);
    Ok(TradeoffReport::new(
        "piston",
        delta_dollar,
        delta_info,
        kb,
        PRODUCT_TOLERANCE,
        inputs,
    ))
}

/// `(⟨W_D⟩ / ⟨E₀⟩) (Δφ / δ_φ)²` with `⟨E₀⟩ = k_B T / 2`.
pub fn dimensionless_report(cfg: &PistonConfig) -> Result<f64> {
    let run = run_protocol(cfg)?;
    if run.is_no_process() {
        return Ok(0.0);
    }
    let energy_per_dof = 0.5 * cfg.ctx.thermal_energy();
    Ok(run.dissipated / energy_per_dof * (run.delta_phi_readout / run.delta_phi_device).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn cfg(r: f64, steps: usize) -> PistonConfig {
        PistonConfig::with_ratio(1, PhysicalContext::default(), r, steps)
    }

    #[test]
    fn one_shot_half_pressure() {
        let run = run_protocol(&cfg(0.5, 1)).unwrap();
        assert!((run.extracted_work - 0.5).abs() < 1e-15);
        assert!((run.reversible_work - LN_2).abs() < 1e-15);
        assert!((run.dissipated - (LN_2 - 0.5)).abs() < 1e-15);
        assert!((run.dissipated - 0.1931472).abs() < 1e-7);
    }

    #[test]
    fn dissipation_matches_work_difference() {
        for r in [1e-3, 0.1, 0.5, 0.9] {
            for k in [1, 3, 17, 256] {
                let run = run_protocol(&cfg(r, k)).unwrap();
                let diff = run.reversible_work - run.extracted_work;
                assert!((run.dissipated - diff).abs() <= 1e-12 * run.reversible_work);
                assert!(run.dissipated >= -1e-12 * run.reversible_work);
            }
        }
    }

    #[test]
    fn many_steps_approach_reversible_limit() {
        let r = 0.5;
        let k = 1 << 10;
        let run = run_protocol(&cfg(r, k)).unwrap();
        // k W_D → N k_B T r² / (2 (1 − r)) from the Riemann sum of r_i² / 2
        let limit = r * r / (2.0 * (1.0 - r));
        assert!(run.dissipated <= 1.01 * limit / k as f64);
        assert!(run.dissipated < run_protocol(&cfg(r, 1)).unwrap().dissipated / 100.0);
    }

    #[test]
    fn no_process_is_all_zero() {
        let run = run_protocol(&cfg(0.0, 4)).unwrap();
        assert_eq!(run.extracted_work, 0.0);
        assert_eq!(run.reversible_work, 0.0);
        assert_eq!(run.dissipated, 0.0);
        let report = tradeoff_product(&cfg(0.0, 4)).unwrap();
        assert_eq!(report.satisfied, Verdict::NoProcess);
    }

    #[test]
    fn bad_pressure_order() {
        let mut c = cfg(0.1, 1);
        c.p_final = 1.2;
        assert!(matches!(
            run_protocol(&c),
            Err(Error::BadPressureOrder { .. })
        ));
        c.p_final = 0.0;
        assert!(matches!(
            run_protocol(&c),
            Err(Error::BadPressureOrder { .. })
        ));
    }

    #[test]
    fn fluctuation_examples() {
        // x₀ = N k_B T / (P A) = 1 with N = 10⁴, P = 10⁴
        let c = PistonConfig {
            n_particles: 10_000,
            ctx: PhysicalContext::default(),
            area: 1.0,
            p_initial: 1e4,
            p_final: 5e3,
            steps: 2,
            precision: DevicePrecision::PerStep,
        };
        assert!((fluctuation_scale(&c, 0).unwrap() - 0.01).abs() < 1e-15);

        let hot = PistonConfig {
            ctx: PhysicalContext::new(1.0, 3.0).unwrap(),
            ..c
        };
        let ratio = fluctuation_scale(&hot, 1).unwrap() / fluctuation_scale(&c, 1).unwrap();
        assert!((ratio - 3.0).abs() < 1e-12);

        let big = PistonConfig {
            n_particles: 1 << 40,
            ..c
        };
        let rel = fluctuation_scale(&big, 0).unwrap() / big.height(big.p_initial);
        assert!(rel < 1e-6);

        assert!(matches!(
            fluctuation_scale(&c, 3),
            Err(Error::StageOutOfRange {
                stage: 3,
                stages: 2
            })
        ));
    }

    #[test]
    fn product_examples() {
        let r = 1e-3;
        let report = tradeoff_product(&cfg(r, 1)).unwrap();
        assert!((report.product - (0.5 + r / 3.0)).abs() < 1e-4);
        assert!((report.product - 0.5 - r / 3.0).abs() <= r * r);

        let report = tradeoff_product(&cfg(0.5, 1)).unwrap();
        assert!(report.product > 0.5);
        assert_eq!(report.satisfied, Verdict::Satisfied);

        // a k-step chain multiplies the product by roughly k at small r
        let report = tradeoff_product(&cfg(1e-3, 16)).unwrap();
        assert!((report.product / 8.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn dimensionless_examples() {
        let c = cfg(1e-3, 1);
        let v = dimensionless_report(&c).unwrap();
        assert!((v - 1.0007).abs() < 2e-4);
        for (r, k) in [(1e-3, 1), (0.5, 1), (0.3, 8)] {
            let c = cfg(r, k);
            let v = dimensionless_report(&c).unwrap();
            let p = tradeoff_product(&c).unwrap();
            assert!((v - 2.0 * p.product).abs() <= 1e-12 * v);
            assert!(v >= 1.0);
        }
    }

    #[test]
    fn end_to_end_precision_uses_total_displacement() {
        let mut c = cfg(0.2, 4);
        c.precision = DevicePrecision::EndToEnd;
        let run = run_protocol(&c).unwrap();
        let total = run.positions[4] - run.positions[0];
        assert!((run.delta_phi_device - total).abs() < 1e-15);
    }
}
