//! Maximum-information joint distribution under normalisation and a
//! mean-energy-change constraint.
//!
//! Stationarity of the Lagrangian gives the exponential-family form
//!
//! ```text
//! p(n, m) = p(n) p(m) e^{−λ (E′_m − E_n)} / Ζ,    Ζ = Σ p(n) p(m) e^{−λ (E′_m − E_n)}
//! ```
//!
//! with `−∂ ln Ζ / ∂λ = ΔE`. The joint is stored with rows indexed by the
//! initial level `n` and columns by the final level `m`.
//!
//! Because the exponent separates into `λ E_n − λ E′_m`, the table is a
//! product of two tilted marginals. Its information is therefore measured
//! against the *reference* marginals `p(n)`, `p(m)` it was built from
//! (see [`MaxEntJoint::reference_information`]), not against its own.

use serde::{Deserialize, Serialize};

use crate::prob::{check_same_len, ZERO_FLOOR};
use crate::{DiscreteDist, Error, JointDist, PhysicalContext, Result};

/// Largest admissible `|λ| · max|E′_m − E_n|`.
pub const EXPONENT_GUARD: f64 = 700.0;

/// Iteration cap for [`solve_lambda`].
pub const MAX_BISECTIONS: usize = 200;

const MAX_BRACKET_DOUBLINGS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLadder {
    pub initial: Vec<f64>,
    pub final_: Vec<f64>,
}

impl EnergyLadder {
    pub fn new(initial: Vec<f64>, final_: Vec<f64>) -> Result<Self> {
        if initial.is_empty() || final_.is_empty() {
            return Err(Error::Empty);
        }
        if initial.iter().chain(&final_).any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("energy level"));
        }
        Ok(Self { initial, final_ })
    }

    fn check_marginals(&self, pm: &DiscreteDist, pn: &DiscreteDist) -> Result<()> {
        check_same_len(self.initial.len(), pn.len())?;
        check_same_len(self.final_.len(), pm.len())
    }

    fn max_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for en in &self.initial {
            for em in &self.final_ {
                gap = gap.max((em - en).abs());
            }
        }
        gap
    }
}

/// Weighted energy differences over the support of `p(n) p(m)`.
struct Tilt {
    log_weights: Vec<f64>,
    gaps: Vec<f64>,
}

impl Tilt {
    fn new(pm: &DiscreteDist, pn: &DiscreteDist, ladder: &EnergyLadder) -> Self {
        let mut log_weights = Vec::new();
        let mut gaps = Vec::new();
        for (n, a) in pn.iter().enumerate() {
            for (m, b) in pm.iter().enumerate() {
                if a > ZERO_FLOOR && b > ZERO_FLOOR {
                    log_weights.push(a.ln() + b.ln());
                    gaps.push(ladder.final_[m] - ladder.initial[n]);
                }
            }
        }
        Self { log_weights, gaps }
    }

    fn range(&self) -> (f64, f64) {
        self.gaps
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| {
                (lo.min(g), hi.max(g))
            })
    }

    /// `ΔE(λ)`, evaluated with a log-sum-exp shift.
    fn mean_gap(&self, lambda: f64) -> f64 {
        let exps: Vec<f64> = self
            .log_weights
            .iter()
            .zip(&self.gaps)
            .map(|(lw, g)| lw - lambda * g)
            .collect();
        let shift = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, g) in exps.iter().zip(&self.gaps) {
            let w = (x - shift).exp();
            num += w * g;
            den += w;
        }
        num / den
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntJoint {
    pub joint: JointDist,
    pub lambda: f64,
    pub zeta: f64,
    pub delta_e: f64,
    /// Reference initial marginal `p(n)`.
    pub initial: DiscreteDist,
    /// Reference final marginal `p(m)`.
    pub final_: DiscreteDist,
    pub ladder: EnergyLadder,
}

impl MaxEntJoint {
    /// `Σ p(n,m) ln[p(n,m) / (p(n) p(m))]` against the reference marginals.
    pub fn reference_information(&self) -> f64 {
        let mut total = 0.0;
        for (n, m, p) in self.joint.entries() {
            if p > ZERO_FLOOR {
                total += p * (p / (self.initial.get(n) * self.final_.get(m))).ln();
            }
        }
        total
    }

    /// `−ln Ζ − λ ΔE`.
    pub fn closed_form_information(&self) -> f64 {
        -self.zeta.ln() - self.lambda * self.delta_e
    }
}

/// Builds the max-ent joint for a given multiplier `lambda`.
pub fn build_maxent_joint(
    pm: &DiscreteDist,
    pn: &DiscreteDist,
    ladder: &EnergyLadder,
    lambda: f64,
) -> Result<MaxEntJoint> {
    ladder.check_marginals(pm, pn)?;
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lagrange multiplier"));
    }
    let exponent = lambda.abs() * ladder.max_gap();
    if exponent > EXPONENT_GUARD {
        return Err(Error::Overflow { exponent });
    }
    let rows = pn.len();
    let cols = pm.len();
    let mut weights = Vec::with_capacity(rows * cols);
    for (n, a) in pn.iter().enumerate() {
        for (m, b) in pm.iter().enumerate() {
            let gap = ladder.final_[m] - ladder.initial[n];
            weights.push(a * b * (-lambda * gap).exp());
        }
    }
    let zeta: f64 = weights.iter().sum();
    let normalized: Vec<f64> = weights.iter().map(|w| w / zeta).collect();
    let joint = JointDist::from_row_major(rows, cols, normalized)?;
    let delta_e = joint
        .entries()
        .map(|(n, m, p)| p * (ladder.final_[m] - ladder.initial[n]))
        .sum();
    Ok(MaxEntJoint {
        joint,
        lambda,
        zeta,
        delta_e,
        initial: pn.clone(),
        final_: pm.clone(),
        ladder: ladder.clone(),
    })
}

/// `ln Ζ(λ)` for the given marginals.
pub fn log_partition(
    pm: &DiscreteDist,
    pn: &DiscreteDist,
    ladder: &EnergyLadder,
    lambda: f64,
) -> Result<f64> {
    build_maxent_joint(pm, pn, ladder, lambda).map(|m| m.zeta.ln())
}

/// Attainable open interval of `ΔE(λ)` as `λ` sweeps the real line.
pub fn attainable_range(
    pm: &DiscreteDist,
    pn: &DiscreteDist,
    ladder: &EnergyLadder,
) -> Result<(f64, f64)> {
    ladder.check_marginals(pm, pn)?;
    Ok(Tilt::new(pm, pn, ladder).range())
}

/// Finds `λ` with `ΔE(λ) = target` by bracketed bisection.
///
/// `ΔE(λ)` is non-increasing (its derivative is minus the variance of the
/// energy gap under the tilted joint), so the root is unique whenever the
/// target lies strictly inside the attainable range.
pub fn solve_lambda(
    pm: &DiscreteDist,
    pn: &DiscreteDist,
    ladder: &EnergyLadder,
    target: f64,
) -> Result<f64> {
    ladder.check_marginals(pm, pn)?;
    if !target.is_finite() {
        return Err(Error::NonFinite("target energy change"));
    }
    let tilt = Tilt::new(pm, pn, ladder);
    let (lo, hi) = tilt.range();
    if !(target > lo && target < hi) {
        return Err(Error::Unattainable { target, lo, hi });
    }
    let tolerance = 1e-10 * target.abs().max(1.0);

    // f(λ) = ΔE(λ) − target is decreasing: positive on the left.
    let f = |lambda: f64| tilt.mean_gap(lambda) - target;
    let (mut left, mut right) = (-1.0_f64, 1.0_f64);
    let mut doublings = 0;
    while f(left) < 0.0 {
        left *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NoConvergence {
                iterations: doublings,
            });
        }
    }
    while f(right) > 0.0 {
        right *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NoConvergence {
                iterations: doublings,
            });
        }
    }

    let mut mid = 0.5 * (left + right);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (left + right);
        let value = f(mid);
        if value == 0.0 {
            break;
        }
        if value > 0.0 {
            left = mid;
        } else {
            right = mid;
        }
        if right - left <= 2.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    if f(mid).abs() > tolerance {
        return Err(Error::NoConvergence {
            iterations: MAX_BISECTIONS,
        });
    }
    Ok(mid)
}

/// `(lhs, rhs)` of `⟨I⟩ = −ln Ζ − λ ΔE`; `lhs` is the direct sum.
pub fn maxent_mutual_info_identity(joint: &MaxEntJoint) -> (f64, f64) {
    (
        joint.reference_information(),
        joint.closed_form_information(),
    )
}

/// Residuals of the thermodynamic identification `λ = −β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalIdentification {
    pub zeta: f64,
    /// `Z / Z′`
    pub partition_ratio: f64,
    pub zeta_residual: f64,
    /// `⟨I⟩` against the reference marginals
    pub information: f64,
    /// `β (⟨W⟩ − ΔF)` with `⟨W⟩ = ΔE`, `ΔF = −k_B T ln(Z′/Z)`
    pub beta_dissipated_work: f64,
    pub information_residual: f64,
}

/// Compares the max-ent joint with the thermodynamic quantities it is
/// identified with. Residuals are reported, not asserted.
pub fn thermal_identification(
    ctx: &PhysicalContext,
    joint: &MaxEntJoint,
    z: f64,
    z_prime: f64,
) -> ThermalIdentification {
    let beta = ctx.beta();
    let partition_ratio = z / z_prime;
    // β ΔF = −ln(Z′/Z), finite even when T is infinite
    let beta_free_energy = -(z_prime / z).ln();
    let beta_dissipated_work = beta * joint.delta_e - beta_free_energy;
    let information = joint.reference_information();
    ThermalIdentification {
        zeta: joint.zeta,
        partition_ratio,
        zeta_residual: joint.zeta - partition_ratio,
        information,
        beta_dissipated_work,
        information_residual: information - beta_dissipated_work,
    }
}
