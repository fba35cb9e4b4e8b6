//! Interferometric phase estimation with a balanced-superposition probe.
//!
//! The probe `(|0⟩ + |1⟩)/√2` picks up a phase from `U(φ) = e^{iφ|1⟩⟨1|}`
//! and is read out in the `|±⟩` basis, giving `p(±) = (1 ± cos φ)/2`. The
//! model is restricted to `φ ∈ [0, π]`, where `cos` is invertible.
//!
//! Ensembles are simulated from counter-derived RNG substreams: ensemble `e`
//! of a run seeded with `s` draws from ChaCha8 seeded with `s` on stream `e`,
//! so results do not depend on evaluation order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::info::{fisher_information, relative_entropy};
use crate::report::{InputValue, TradeoffReport, Verdict};
use crate::stats::{loglog_slope, mean, sample_variance};
use crate::tpm::{hadamard, CMatrix, QuantumDrive, C64};
use crate::{DiscreteDist, Error, JointDist, ParamFamily, PhysicalContext, Result};

/// Minimum ensemble count for a Cramér–Rao comparison.
pub const MIN_ENSEMBLES: usize = 100;

/// Largest encoder pitch accepted by [`tradeoff_chain`].
pub const MAX_PERTURBATIVE_PITCH: f64 = 0.05;

fn check_branch(phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::OutOfBranch { phi });
    }
    Ok(())
}

fn readout_weights(phi: f64) -> Vec<f64> {
    let c = phi.cos();
    vec![0.5 * (1.0 + c), 0.5 * (1.0 - c)]
}

/// `[p(+), p(−)] = [(1 + cos φ)/2, (1 − cos φ)/2]`.
pub fn readout_distribution(phi: f64) -> Result<DiscreteDist> {
    check_branch(phi)?;
    DiscreteDist::new(readout_weights(phi))
}

/// The read-out as a parameterised family with analytic derivative.
pub fn readout_family(precision: f64) -> Result<ParamFamily> {
    Ok(ParamFamily::new(readout_weights, (0.0, PI), precision)?
        .with_derivative(|phi: f64| vec![-0.5 * phi.sin(), 0.5 * phi.sin()]))
}

/// TPM joint of the encoding step: the thermal qubit (`E = {0, 1}`) is
/// measured in the computational basis, rotated by a Hadamard, phase-shifted
/// and read out in the `|±⟩` basis. Rows index the initial level, columns
/// the read-out `(+, −)`.
pub fn encoding_joint(phi: f64, ctx: PhysicalContext) -> Result<JointDist> {
    Ok(crate::tpm::tpm_joint(&encoding_drive(phi, ctx)?))
}

pub fn encoding_drive(phi: f64, ctx: PhysicalContext) -> Result<QuantumDrive> {
    let o = C64::new(0.0, 0.0);
    let shifter =
        CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), o, o, C64::from_polar(1.0, phi)]);
    // ⟨±| are the rows of the Hadamard
    let basis_change = hadamard() * shifter * hadamard();
    QuantumDrive::new(vec![0.0, 1.0], vec![0.0, 1.0], basis_change, ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderMode {
    /// `φ_enc = origin + δ·round((φ − origin)/δ)`, ties to even.
    Quantize,
    /// `φ_enc = φ + U(−δ/2, δ/2)`, drawn per ensemble.
    Jitter,
}

/// A finite-precision phase shifter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub delta_phi: f64,
    pub mode: EncoderMode,
    /// Grid origin for [`EncoderMode::Quantize`].
    #[serde(default)]
    pub origin: f64,
    /// Work charged for probe preparation; zero unless configured.
    #[serde(default)]
    pub preparation_work: f64,
}

impl EncoderSpec {
    pub fn quantize(delta_phi: f64) -> Result<Self> {
        Self::new(delta_phi, EncoderMode::Quantize)
    }

    pub fn jitter(delta_phi: f64) -> Result<Self> {
        Self::new(delta_phi, EncoderMode::Jitter)
    }

    pub fn new(delta_phi: f64, mode: EncoderMode) -> Result<Self> {
        if !(delta_phi > 0.0 && delta_phi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "encoder pitch must be positive, got {delta_phi}"
            )));
        }
        Ok(Self {
            delta_phi,
            mode,
            origin: 0.0,
            preparation_work: 0.0,
        })
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_preparation_work(mut self, work: f64) -> Self {
        self.preparation_work = work;
        self
    }

    /// Grid point nearest to `phi`.
    pub fn quantized(&self, phi: f64) -> f64 {
        self.origin + self.delta_phi * ((phi - self.origin) / self.delta_phi).round_ties_even()
    }

    /// Realised encoded phase; `rng` is only consulted in jitter mode.
    pub fn encode<R: Rng + ?Sized>(&self, phi: f64, rng: &mut R) -> f64 {
        match self.mode {
            EncoderMode::Quantize => self.quantized(phi),
            EncoderMode::Jitter => phi + self.delta_phi * (rng.random::<f64>() - 0.5),
        }
    }

    /// Read-out distribution of the real encoder, averaged over its
    /// randomness. For jitter, `E[cos(φ + u)] = cos φ · sin(δ/2) / (δ/2)`.
    pub fn real_readout(&self, phi: f64) -> Result<DiscreteDist> {
        match self.mode {
            EncoderMode::Quantize => readout_distribution(self.quantized(phi)),
            EncoderMode::Jitter => {
                check_branch(phi)?;
                let half = 0.5 * self.delta_phi;
                let c = phi.cos() * half.sin() / half;
                DiscreteDist::new(vec![0.5 * (1.0 + c), 0.5 * (1.0 - c)])
            }
        }
    }

    /// `S(p^{re} ‖ p_φ)`: information written by the real encoder relative
    /// to the ideal one. Jitter averages the divergence over the realised
    /// shift (each ensemble sees one fixed shift), using a midpoint rule.
    pub fn info_proxy(&self, phi: f64) -> Result<f64> {
        let ideal = readout_distribution(phi)?;
        let divergence = |shifted: f64| -> Result<f64> {
            let d = relative_entropy(&DiscreteDist::new(readout_weights(shifted))?, &ideal)?;
            if d.support_violation {
                return Err(Error::SupportViolation);
            }
            Ok(d.value)
        };
        match self.mode {
            EncoderMode::Quantize => divergence(self.quantized(phi)),
            EncoderMode::Jitter => {
                const NODES: usize = 256;
                let mut total = 0.0;
                for i in 0..NODES {
                    let u = self.delta_phi * ((i as f64 + 0.5) / NODES as f64 - 0.5);
                    total += divergence(phi + u)?;
                }
                Ok(total / NODES as f64)
            }
        }
    }

    /// Realised encoding error: `|φ_enc − φ|` when quantising, the rms
    /// shift `δ/√12` when jittering.
    pub fn effective_error(&self, phi: f64) -> f64 {
        match self.mode {
            EncoderMode::Quantize => (self.quantized(phi) - phi).abs(),
            EncoderMode::Jitter => self.delta_phi / 12f64.sqrt(),
        }
    }
}

/// RNG for ensemble `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `[n₊, n₋]` for `shots` read-outs of the probe encoded at `phi`.
pub fn sample_shots<R: Rng + ?Sized>(phi: f64, shots: u64, rng: &mut R) -> Result<[u64; 2]> {
    check_branch(phi)?;
    if shots == 0 {
        return Err(Error::EmptySample);
    }
    let p_plus = readout_weights(phi)[0].clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .sample(rng);
    Ok([plus, shots - plus])
}

/// `φ̂ = arccos(2f − 1)` with `f` the `+` fraction.
pub fn mle_estimate(counts: [u64; 2]) -> Result<f64> {
    let total = counts[0] + counts[1];
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let f = (counts[0] as f64 / total as f64).clamp(0.0, 1.0);
    Ok((2.0 * f - 1.0).clamp(-1.0, 1.0).acos())
}

/// Inputs of a Monte Carlo estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationPlan {
    pub phi_true: f64,
    pub shots: u64,
    pub ensembles: usize,
    pub seed: u64,
    pub encoder: Option<EncoderSpec>,
}

impl EstimationPlan {
    pub fn new(phi_true: f64, shots: u64, ensembles: usize, seed: u64) -> Self {
        Self {
            phi_true,
            shots,
            ensembles,
            seed,
            encoder: None,
        }
    }

    pub fn with_encoder(mut self, encoder: EncoderSpec) -> Self {
        self.encoder = Some(encoder);
        self
    }

    fn validate(&self) -> Result<()> {
        check_branch(self.phi_true)?;
        if self.shots == 0 {
            return Err(Error::EmptySample);
        }
        if self.ensembles == 0 {
            return Err(Error::TooFewEnsembles {
                required: 1,
                got: 0,
            });
        }
        Ok(())
    }

    /// Estimate from ensemble `index`; independent of every other ensemble.
    pub fn ensemble(&self, index: usize) -> Result<f64> {
        let mut rng = substream(self.seed, index as u64);
        let phi = match &self.encoder {
            Some(enc) => enc.encode(self.phi_true, &mut rng),
            None => self.phi_true,
        };
        let counts = sample_shots(phi, self.shots, &mut rng)?;
        mle_estimate(counts)
    }

    /// Runs every ensemble in index order.
    pub fn run(&self) -> Result<EstimationRun> {
        self.validate()?;
        let estimates = (0..self.ensembles)
            .map(|e| self.ensemble(e))
            .collect::<Result<Vec<_>>>()?;
        EstimationRun::from_estimates(*self, estimates)
    }

    /// Phase the shots are drawn at, when deterministic.
    pub fn sampled_phase(&self) -> f64 {
        match &self.encoder {
            Some(enc) if enc.mode == EncoderMode::Quantize => enc.quantized(self.phi_true),
            _ => self.phi_true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationRun {
    pub plan: EstimationPlan,
    pub estimates: Vec<f64>,
    /// Sample mean `⟨φ̂⟩`.
    pub mean_estimate: f64,
    /// Sample standard deviation `Δφ`.
    pub delta_phi_hat: f64,
}

impl EstimationRun {
    /// Wraps estimates produced by [`EstimationPlan::ensemble`], in index order.
    pub fn from_estimates(plan: EstimationPlan, estimates: Vec<f64>) -> Result<Self> {
        plan.validate()?;
        if estimates.len() != plan.ensembles {
            return Err(Error::DimensionMismatch {
                left: plan.ensembles,
                right: estimates.len(),
            });
        }
        let mean_estimate = mean(&estimates).unwrap_or(f64::NAN);
        let delta_phi_hat = sample_variance(&estimates).unwrap_or(0.0).sqrt();
        Ok(Self {
            plan,
            estimates,
            mean_estimate,
            delta_phi_hat,
        })
    }

    pub fn variance(&self) -> f64 {
        self.delta_phi_hat * self.delta_phi_hat
    }

    /// `N · Var(φ̂)`: the variance expressed per single shot.
    pub fn per_shot_variance(&self) -> f64 {
        self.plan.shots as f64 * self.variance()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CramerRao {
    pub variance: f64,
    /// `1 / (N 𝓕)`
    pub bound: f64,
    pub ratio: f64,
    /// `3 √(2/M)`
    pub tolerance: f64,
    /// Single-shot runs only produce `{0, π}`; the comparison is not meaningful.
    pub degenerate: bool,
}

impl CramerRao {
    pub fn holds(&self) -> bool {
        self.degenerate || self.ratio >= 1.0 - self.tolerance
    }
}

/// Compares the sample variance with `1/(N 𝓕)`; needs at least
/// [`MIN_ENSEMBLES`] ensembles.
pub fn cramer_rao_check(run: &EstimationRun) -> Result<CramerRao> {
    let ensembles = run.plan.ensembles;
    if ensembles < MIN_ENSEMBLES {
        return Err(Error::TooFewEnsembles {
            required: MIN_ENSEMBLES,
            got: ensembles,
        });
    }
    cramer_rao(run)
}

/// Same comparison without the ensemble-count guard. With few ensembles the
/// tolerance `3√(2/M)` dominates the ratio.
pub fn cramer_rao(run: &EstimationRun) -> Result<CramerRao> {
    let ensembles = run.plan.ensembles;
    let family = readout_family(1.0)?;
    let fisher = fisher_information(&family, run.plan.sampled_phase())?;
    let bound = 1.0 / (run.plan.shots as f64 * fisher);
    let variance = run.variance();
    Ok(CramerRao {
        variance,
        bound,
        ratio: variance / bound,
        tolerance: 3.0 * (2.0 / ensembles as f64).sqrt(),
        degenerate: run.plan.shots == 1,
    })
}

/// Variance of `φ̂` for each shot count, and the log-log slope against `N`.
pub fn variance_scaling(
    phi: f64,
    shot_counts: &[u64],
    ensembles: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    let variances = shot_counts
        .iter()
        .map(|&n| {
            EstimationPlan::new(phi, n, ensembles, seed)
                .run()
                .map(|r| r.variance())
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = shot_counts.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &variances)
        .ok_or_else(|| Error::InvalidParameter("need at least two shot counts".into()))?;
    Ok((variances, slope))
}

/// Every quantity of the estimation trade-off chain for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffChain {
    pub phi: f64,
    pub delta_phi_device: f64,
    pub delta_eff: f64,
    pub fisher: f64,
    /// `S(p_φ^{re} ‖ p_φ^{id})`
    pub info_proxy: f64,
    /// `info_proxy / ((δ_eff² / 2) 𝓕)`
    pub expansion_ratio: f64,
    /// `(δ_eff / φ)²`
    pub relative_accuracy: f64,
    /// `N Var(φ̂) · 2 I / δ_eff²`
    pub chain_lhs: f64,
    pub chain_rhs: f64,
    /// `3 √(2/M)`
    pub tolerance: f64,
    /// `N Var(φ̂) / δ_φ²` with the device pitch.
    pub delta_info_device: f64,
    pub verdict: Verdict,
    pub report: TradeoffReport,
}

/// Combines the read-out variance, the realised encoding error and the
/// relative-entropy information proxy into `(Δφ)² · 2⟨I⟩ / δ² ≥ 1`.
///
/// `Δφ` is taken per shot (`N · Var(φ̂)`), matching the single-shot Fisher
/// information. Dissipated work is identified through `β⟨W_D⟩ = ⟨I⟩`, so
/// `Δ$ = k_B · I` plus any configured preparation work over `T`.
pub fn tradeoff_chain(
    phi: f64,
    encoder: &EncoderSpec,
    run: &EstimationRun,
    ctx: &PhysicalContext,
) -> Result<TradeoffChain> {
    if encoder.delta_phi > MAX_PERTURBATIVE_PITCH {
        return Err(Error::OutOfRegime {
            delta: encoder.delta_phi,
            max: MAX_PERTURBATIVE_PITCH,
        });
    }
    check_branch(phi)?;
    let family = readout_family(encoder.delta_phi)?;
    let fisher = fisher_information(&family, phi)?;
    let info_proxy = encoder.info_proxy(phi)?;
    let delta_eff = encoder.effective_error(phi);
    let per_shot_variance = run.per_shot_variance();
    let tolerance = 3.0 * (2.0 / run.plan.ensembles as f64).sqrt();
    let delta_info_device = per_shot_variance / encoder.delta_phi.powi(2);

    let mut inputs: BTreeMap<String, InputValue> = BTreeMap::new();
    inputs.insert("phi".into(), phi.into());
    inputs.insert("delta_phi_device".into(), encoder.delta_phi.into());
    inputs.insert("delta_eff".into(), delta_eff.into());
    inputs.insert("shots".into(), run.plan.shots.into());
    inputs.insert("ensembles".into(), run.plan.ensembles.into());
    inputs.insert("seed".into(), run.plan.seed.into());
    inputs.insert("delta_info_device".into(), delta_info_device.into());
    inputs.insert(
        "encoder_mode".into(),
        match encoder.mode {
            EncoderMode::Quantize => "quantize",
            EncoderMode::Jitter => "jitter",
        }
        .into(),
    );
    inputs.insert(
        "dissipation_accounting".into(),
        "beta*W_D identified with relative-entropy information".into(),
    );
    inputs.insert("preparation_work".into(), encoder.preparation_work.into());

    let kb = ctx.kb();
    if delta_eff == 0.0 || info_proxy == 0.0 {
        let report = TradeoffReport::degenerate("phase", Verdict::Ideal, kb, inputs);
        return Ok(TradeoffChain {
            phi,
            delta_phi_device: encoder.delta_phi,
            delta_eff,
            fisher,
            info_proxy,
            expansion_ratio: f64::INFINITY,
            relative_accuracy: 0.0,
            chain_lhs: 0.0,
            chain_rhs: 1.0,
            tolerance,
            delta_info_device,
            verdict: Verdict::Ideal,
            report,
        });
    }

    let chain_lhs = per_shot_variance * 2.0 * info_proxy / (delta_eff * delta_eff);
    let verdict = if chain_lhs >= 1.0 - tolerance {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    let delta_dollar = kb * info_proxy + encoder.preparation_work / ctx.temperature();
    let delta_info = per_shot_variance / (delta_eff * delta_eff);
    let report = TradeoffReport::new("phase", delta_dollar, delta_info, kb, tolerance, inputs);
    Ok(TradeoffChain {
        phi,
        delta_phi_device: encoder.delta_phi,
        delta_eff,
        fisher,
        info_proxy,
        expansion_ratio: info_proxy / (0.5 * delta_eff * delta_eff * fisher),
        relative_accuracy: (delta_eff / phi).powi(2),
        chain_lhs,
        chain_rhs: 1.0,
        tolerance,
        delta_info_device,
        verdict,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::mutual_information;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn readout_examples() {
        assert_eq!(readout_distribution(0.0).unwrap().weights(), &[1.0, 0.0]);
        let d = readout_distribution(FRAC_PI_2).unwrap();
        assert!((d.get(0) - 0.5).abs() < 1e-15);
        let d = readout_distribution(FRAC_PI_3).unwrap();
        assert!((d.get(0) - 0.75).abs() < 1e-15);
        assert!(matches!(
            readout_distribution(-0.1),
            Err(Error::OutOfBranch { .. })
        ));
        assert!(readout_distribution(3.2).is_err());
    }

    #[test]
    fn shots_examples() {
        let mut rng = substream(1, 0);
        assert_eq!(sample_shots(0.0, 500, &mut rng).unwrap(), [500, 0]);

        let n = 100_000;
        let counts = sample_shots(FRAC_PI_2, n, &mut substream(42, 0)).unwrap();
        let f = counts[0] as f64 / n as f64;
        assert!((f - 0.5).abs() <= 5.0 * (0.25 / n as f64).sqrt());

        let again = sample_shots(FRAC_PI_2, n, &mut substream(42, 0)).unwrap();
        assert_eq!(counts, again);
    }

    #[test]
    fn mle_examples() {
        assert_eq!(mle_estimate([10, 0]).unwrap(), 0.0);
        assert!((mle_estimate([5, 5]).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((mle_estimate([3, 1]).unwrap() - FRAC_PI_3).abs() < 1e-15);
        assert!((mle_estimate([0, 7]).unwrap() - PI).abs() < 1e-15);
        assert_eq!(mle_estimate([0, 0]), Err(Error::EmptySample));
    }

    #[test]
    fn quantizer_rounds_half_to_even() {
        let enc = EncoderSpec::quantize(1.0).unwrap();
        assert_eq!(enc.quantized(2.5), 2.0);
        assert_eq!(enc.quantized(3.5), 4.0);
        let enc = EncoderSpec::quantize(0.01).unwrap();
        for phi in [0.1234, 1.0, 2.6543] {
            assert!((enc.quantized(phi) - phi).abs() <= 0.005 + 1e-15);
        }
    }

    #[test]
    fn jitter_stays_within_half_pitch() {
        let enc = EncoderSpec::jitter(0.02).unwrap();
        let mut rng = substream(9, 3);
        for _ in 0..1000 {
            assert!((enc.encode(1.0, &mut rng) - 1.0).abs() <= 0.01);
        }
    }

    #[test]
    fn jitter_average_readout_matches_mean_of_shifts() {
        let enc = EncoderSpec::jitter(0.04).unwrap();
        let phi = 1.2;
        let analytic = enc.real_readout(phi).unwrap();
        // midpoint rule over the uniform jitter
        let n = 20_000;
        let avg: f64 = (0..n)
            .map(|i| {
                let u = -0.02 + 0.04 * (i as f64 + 0.5) / n as f64;
                0.5 * (1.0 + (phi + u).cos())
            })
            .sum::<f64>()
            / n as f64;
        assert!((analytic.get(0) - avg).abs() < 1e-12);
    }

    #[test]
    fn jitter_information_matches_rms_shift() {
        let enc = EncoderSpec::jitter(0.02).unwrap();
        let phi = 1.1;
        let expected = 0.5 * enc.effective_error(phi).powi(2);
        assert!((enc.info_proxy(phi).unwrap() / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cramer_rao_needs_enough_ensembles() {
        let run = EstimationPlan::new(FRAC_PI_3, 10, 50, 1).run().unwrap();
        assert!(matches!(
            cramer_rao_check(&run),
            Err(Error::TooFewEnsembles { .. })
        ));
    }

    #[test]
    fn single_shot_runs_are_flagged() {
        let run = EstimationPlan::new(FRAC_PI_3, 1, 200, 3).run().unwrap();
        assert!(run.estimates.iter().all(|&e| e == 0.0 || e == PI));
        let cr = cramer_rao_check(&run).unwrap();
        assert!(cr.degenerate);
    }

    #[test]
    fn ensembles_are_order_independent() {
        let plan = EstimationPlan::new(1.0, 50, 300, 77);
        let forward = plan.run().unwrap();
        let reversed: Vec<f64> = (0..300).rev().map(|e| plan.ensemble(e).unwrap()).collect();
        let reordered: Vec<f64> = reversed.into_iter().rev().collect();
        assert_eq!(forward.estimates, reordered);
    }

    #[test]
    fn on_grid_phase_is_ideal() {
        let enc = EncoderSpec::quantize(0.01).unwrap();
        let phi = enc.quantized(1.0);
        let plan = EstimationPlan::new(phi, 100, 200, 5).with_encoder(enc);
        let run = plan.run().unwrap();
        let chain = tradeoff_chain(phi, &enc, &run, &PhysicalContext::default()).unwrap();
        assert_eq!(chain.info_proxy, 0.0);
        assert_eq!(chain.verdict, Verdict::Ideal);
        assert_eq!(chain.report.satisfied, Verdict::Ideal);
    }

    #[test]
    fn coarse_encoder_is_out_of_regime() {
        let enc = EncoderSpec::quantize(0.1).unwrap();
        let run = EstimationPlan::new(1.0, 10, 10, 0).run().unwrap();
        assert!(matches!(
            tradeoff_chain(1.0, &enc, &run, &PhysicalContext::default()),
            Err(Error::OutOfRegime { .. })
        ));
    }

    #[test]
    fn encoding_joint_reproduces_readout_at_zero_temperature() {
        let cold = PhysicalContext::from_beta(1.0, 800.0).unwrap();
        let j = encoding_joint(FRAC_PI_3, cold).unwrap();
        let (_, readout) = j.marginals();
        assert!((readout.get(0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn encoding_joint_is_independent_at_quarter_turn() {
        let j = encoding_joint(FRAC_PI_2, PhysicalContext::default()).unwrap();
        assert!(mutual_information(&j) < 1e-15);
    }
}
