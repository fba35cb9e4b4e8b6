//! Information functionals over finite distributions, in nats.
//!
//! Zero-probability conventions:
//!
//! - `0 · ln 0 = 0` and `0 · ln(0 / q) = 0`;
//! - `p(a) > 0` with `q(a) = 0` makes `S(p‖q) = +∞` and sets
//!   [`DivergenceResult::support_violation`];
//! - joint cells with zero mass carry information density `0`.

use serde::{Deserialize, Serialize};

use crate::prob::{check_same_len, family_derivative, ZERO_FLOOR};
use crate::{DiscreteDist, Error, JointDist, ParamFamily, Result};

/// Probabilities below this are excluded from the Fisher sum.
pub const FISHER_EXCLUSION: f64 = 1e-12;

/// Outcomes excluded from the Fisher sum must have `|∂p/∂φ|` below this.
pub const FISHER_DERIVATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub value: f64,
    pub support_violation: bool,
}

impl DivergenceResult {
    pub fn is_finite(&self) -> bool {
        !self.support_violation
    }
}

fn xlogx(p: f64) -> f64 {
    if p > ZERO_FLOOR {
        p * p.ln()
    } else {
        0.0
    }
}

/// `H(p) = −Σ p ln p`.
pub fn shannon_entropy(p: &DiscreteDist) -> f64 {
    -p.iter().map(xlogx).sum::<f64>()
}

/// Entropy of the joint table viewed as one distribution over cells.
pub fn joint_entropy(joint: &JointDist) -> f64 {
    -joint.as_slice().iter().copied().map(xlogx).sum::<f64>()
}

/// `S(p‖q) = Σ p ln(p/q)`.
pub fn relative_entropy(p: &DiscreteDist, q: &DiscreteDist) -> Result<DivergenceResult> {
    check_same_len(p.len(), q.len())?;
    Ok(kl_slices(p.weights(), q.weights()))
}

fn kl_slices(p: &[f64], q: &[f64]) -> DivergenceResult {
    let mut value = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a <= ZERO_FLOOR {
            continue;
        }
        if b <= ZERO_FLOOR {
            return DivergenceResult {
                value: f64::INFINITY,
                support_violation: true,
            };
        }
        value += a * (a / b).ln();
    }
    DivergenceResult {
        // Rounding can leave a ~1e-17 negative residue when p ≈ q.
        value: value.max(0.0),
        support_violation: false,
    }
}

/// KL divergence between two joint tables of the same shape.
pub fn joint_relative_entropy(p: &JointDist, q: &JointDist) -> Result<DivergenceResult> {
    check_shape(p, q)?;
    Ok(kl_slices(p.as_slice(), q.as_slice()))
}

fn check_shape(a: &JointDist, b: &JointDist) -> Result<()> {
    check_same_len(a.rows(), b.rows())?;
    check_same_len(a.cols(), b.cols())
}

/// Symmetrised KL, `S(p‖q) + S(q‖p)`; `+∞` without mutual support.
pub fn jeffreys_divergence(p: &DiscreteDist, q: &DiscreteDist) -> Result<f64> {
    let forward = relative_entropy(p, q)?;
    let reverse = relative_entropy(q, p)?;
    Ok(forward.value + reverse.value)
}

/// Pointwise `ln[p(j,k) / (p(j) p(k))]`, zero on cells without mass.
pub fn information_density(joint: &JointDist) -> Vec<Vec<f64>> {
    let (row, col) = joint.marginals();
    let mut density = vec![vec![0.0; joint.cols()]; joint.rows()];
    for (j, k, p) in joint.entries() {
        if p > ZERO_FLOOR {
            density[j][k] = (p / (row.get(j) * col.get(k))).ln();
        }
    }
    density
}

/// `⟨I⟩ = Σ p(j,k) ln[p(j,k) / (p(j) p(k))]`.
pub fn mutual_information(joint: &JointDist) -> f64 {
    let density = information_density(joint);
    joint
        .entries()
        .map(|(j, k, p)| p * density[j][k])
        .sum::<f64>()
        .max(0.0)
}

/// `⟨e^{−I}⟩` over the support of the joint, which equals
/// `Σ_{p(j,k) > 0} p(j) p(k)`: exactly 1 for full support, below 1 otherwise.
pub fn exp_information_average(joint: &JointDist) -> f64 {
    let density = information_density(joint);
    joint
        .entries()
        .filter(|&(_, _, p)| p > ZERO_FLOOR)
        .map(|(j, k, p)| p * (-density[j][k]).exp())
        .sum()
}

/// Fisher information with the list of outcomes that were dropped from the
/// sum because their probability vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherInformation {
    pub value: f64,
    pub excluded: Vec<usize>,
}

/// `𝓕(φ) = Σ_x p_φ(x) (∂ ln p_φ(x) / ∂φ)²`.
pub fn fisher_information(family: &ParamFamily, phi: f64) -> Result<f64> {
    fisher_information_detailed(family, phi).map(|f| f.value)
}

pub fn fisher_information_detailed(family: &ParamFamily, phi: f64) -> Result<FisherInformation> {
    let p = family.evaluate(phi)?;
    let dp = family_derivative(family, phi)?;
    check_same_len(p.len(), dp.len())?;
    let mut value = 0.0;
    let mut excluded = Vec::new();
    for (index, (prob, d)) in p.iter().zip(&dp).enumerate() {
        if prob < FISHER_EXCLUSION {
            if d.abs() > FISHER_DERIVATIVE_TOLERANCE {
                return Err(Error::DegenerateSupport {
                    index,
                    derivative: *d,
                });
            }
            excluded.push(index);
            continue;
        }
        value += d * d / prob;
    }
    Ok(FisherInformation { value, excluded })
}

/// Plug-in Fisher information: empirical frequencies weight the model score
/// `∂ ln p_φ / ∂φ`.
pub fn fisher_plugin(counts: &[u64], family: &ParamFamily, phi: f64) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let p = family.evaluate(phi)?;
    let dp = family_derivative(family, phi)?;
    check_same_len(p.len(), counts.len())?;
    check_same_len(p.len(), dp.len())?;
    let n = total as f64;
    let mut value = 0.0;
    for (index, ((prob, d), &c)) in p.iter().zip(&dp).zip(counts).enumerate() {
        if prob < FISHER_EXCLUSION {
            if d.abs() > FISHER_DERIVATIVE_TOLERANCE {
                return Err(Error::DegenerateSupport {
                    index,
                    derivative: *d,
                });
            }
            continue;
        }
        let score = d / prob;
        value += (c as f64 / n) * score * score;
    }
    Ok(value)
}

/// Comparison of `S(p_φ‖p_{φ+δ})` with its quadratic approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlFisherExpansion {
    pub phi: f64,
    pub delta: f64,
    /// `S(p_φ‖p_{φ+δ})`
    pub kl_forward: f64,
    /// `S(p_{φ+δ}‖p_φ)`
    pub kl_reverse: f64,
    pub jeffreys: f64,
    pub fisher: f64,
    /// `(δ²/2) 𝓕(φ)`
    pub quadratic: f64,
    /// `kl_forward / quadratic`
    pub ratio: f64,
}

pub fn kl_fisher_expansion_check(
    family: &ParamFamily,
    phi: f64,
    delta: f64,
) -> Result<KlFisherExpansion> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "expansion step must be positive, got {delta}"
        )));
    }
    let p = family.evaluate(phi)?;
    let shifted = family.evaluate(phi + delta)?;
    let forward = relative_entropy(&p, &shifted)?;
    let reverse = relative_entropy(&shifted, &p)?;
    if forward.support_violation || reverse.support_violation {
        return Err(Error::SupportViolation);
    }
    let fisher = fisher_information(family, phi)?;
    let quadratic = 0.5 * delta * delta * fisher;
    Ok(KlFisherExpansion {
        phi,
        delta,
        kl_forward: forward.value,
        kl_reverse: reverse.value,
        jeffreys: forward.value + reverse.value,
        fisher,
        quadratic,
        ratio: forward.value / quadratic,
    })
}

/// Terms of `Ω = ⟨I^{id}⟩_{re} − S(p₀^{re}‖p₀^{id}) − S(p_φ^{re}‖p_φ^{id})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaBreakdown {
    pub idealized_mutual_info_under_real: f64,
    pub kl_initial: f64,
    pub kl_final: f64,
    pub omega: f64,
    /// `Σ p^{re} ln p^{id} + H(p₀^{re}) + H(p_φ^{re})`, algebraically equal to `omega`.
    pub cross_entropy_form: f64,
}

impl OmegaBreakdown {
    pub fn identity_residual(&self) -> f64 {
        (self.omega - self.cross_entropy_form).abs()
    }

    pub fn is_non_negative(&self, tolerance: f64) -> bool {
        self.omega >= -tolerance
    }
}

/// Evaluates Ω for a real (irreversible) and an ideal (reversible) joint.
///
/// Fails with [`Error::SupportViolation`] (Ω = −∞) when the ideal joint
/// vanishes on a cell where the real one has mass.
pub fn omega(real: &JointDist, ideal: &JointDist) -> Result<OmegaBreakdown> {
    check_shape(real, ideal)?;
    for (&r, &i) in real.as_slice().iter().zip(ideal.as_slice()) {
        if r > ZERO_FLOOR && i <= ZERO_FLOOR {
            return Err(Error::SupportViolation);
        }
    }
    let (real_initial, real_final) = real.marginals();
    let (ideal_initial, ideal_final) = ideal.marginals();
    let ideal_density = information_density(ideal);

    let mut averaged_density = 0.0;
    let mut cross = 0.0;
    for (j, k, p) in real.entries() {
        if p > ZERO_FLOOR {
            averaged_density += p * ideal_density[j][k];
            cross += p * ideal.get(j, k).ln();
        }
    }
    let kl_initial = relative_entropy(&real_initial, &ideal_initial)?;
    let kl_final = relative_entropy(&real_final, &ideal_final)?;
    if kl_initial.support_violation || kl_final.support_violation {
        return Err(Error::SupportViolation);
    }
    let omega = averaged_density - kl_initial.value - kl_final.value;
    let cross_entropy_form = cross + shannon_entropy(&real_initial) + shannon_entropy(&real_final);
    Ok(OmegaBreakdown {
        idealized_mutual_info_under_real: averaged_density,
        kl_initial: kl_initial.value,
        kl_final: kl_final.value,
        omega,
        cross_entropy_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, LN_2, PI};

    fn dist(w: &[f64]) -> DiscreteDist {
        DiscreteDist::new(w.to_vec()).unwrap()
    }

    fn joint(rows: &[&[f64]]) -> JointDist {
        JointDist::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn qubit() -> ParamFamily {
        ParamFamily::new(
            |phi: f64| vec![(1.0 + phi.cos()) / 2.0, (1.0 - phi.cos()) / 2.0],
            (0.0, PI),
            0.01,
        )
        .unwrap()
        .with_derivative(|phi: f64| vec![-phi.sin() / 2.0, phi.sin() / 2.0])
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&dist(&[1.0, 0.0])), 0.0);
        assert!((shannon_entropy(&dist(&[0.5, 0.5])) - LN_2).abs() < 1e-15);
        let h = shannon_entropy(&dist(&[0.7310586, 0.2689414]));
        assert!((h - 0.5822).abs() < 1e-4);
    }

    #[test]
    fn relative_entropy_examples() {
        let p = dist(&[0.75, 0.25]);
        assert_eq!(relative_entropy(&p, &p).unwrap().value, 0.0);

        let d = relative_entropy(&p, &dist(&[0.5, 0.5])).unwrap();
        let oracle = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((d.value - oracle).abs() < 1e-15);
        assert!((d.value - 0.1308120).abs() < 1e-7);

        let d = relative_entropy(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap();
        assert!(d.support_violation);
        assert_eq!(d.value, f64::INFINITY);

        // zero mass on the left never contributes
        let d = relative_entropy(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((d.value - LN_2).abs() < 1e-15);

        assert!(matches!(
            relative_entropy(&dist(&[1.0]), &dist(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jeffreys_examples() {
        let p = dist(&[0.6, 0.4]);
        let q = dist(&[0.4, 0.6]);
        assert_eq!(jeffreys_divergence(&p, &p).unwrap(), 0.0);
        let j = jeffreys_divergence(&p, &q).unwrap();
        assert!((j - 2.0 * 0.2 * 1.5f64.ln()).abs() < 1e-15);
        assert!((j - 0.1621860).abs() < 1e-7);
        assert_eq!(
            jeffreys_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn mutual_information_examples() {
        assert!(mutual_information(&joint(&[&[0.25, 0.25], &[0.25, 0.25]])).abs() < 1e-15);
        let mi = mutual_information(&joint(&[&[0.5, 0.0], &[0.0, 0.5]]));
        assert!((mi - LN_2).abs() < 1e-15);
        // deterministic conditional: MI equals the entropy of the marginal
        let flip = joint(&[&[0.0, 0.7310586], &[0.2689414, 0.0]]);
        assert!((mutual_information(&flip) - 0.5822).abs() < 1e-4);
        assert!(
            (mutual_information(&flip) - shannon_entropy(&dist(&[0.7310586, 0.2689414]))).abs()
                < 1e-15
        );
    }

    #[test]
    fn information_density_examples() {
        let d = information_density(&joint(&[&[0.25, 0.25], &[0.25, 0.25]]));
        assert!(d.iter().flatten().all(|x| x.abs() < 1e-15));
        let d = information_density(&joint(&[&[0.5, 0.0], &[0.0, 0.5]]));
        assert!((d[0][0] - LN_2).abs() < 1e-15);
        assert!((d[1][1] - LN_2).abs() < 1e-15);
        assert_eq!(d[0][1], 0.0);
    }

    #[test]
    fn exp_information_examples() {
        assert!((exp_information_average(&joint(&[&[0.5, 0.0], &[0.0, 0.5]])) - 0.5).abs() < 1e-15);
        assert!(
            (exp_information_average(&joint(&[&[0.25, 0.25], &[0.25, 0.25]])) - 1.0).abs() < 1e-15
        );
        let j = joint(&[&[0.1, 0.2, 0.05], &[0.3, 0.15, 0.2]]);
        assert!((exp_information_average(&j) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fisher_examples() {
        let fam = qubit();
        assert!((fisher_information(&fam, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-8);
        assert!((fisher_information(&fam, FRAC_PI_3).unwrap() - 1.0).abs() < 1e-8);

        let constant = ParamFamily::new(|_| vec![0.2, 0.8], (0.0, 1.0), 0.1).unwrap();
        assert!(fisher_information(&constant, 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fisher_score_variance_cross_check() {
        // 𝓕 = Var(score) since E[score] = 0
        let fam = qubit();
        for phi in [0.4, 1.1, 2.0, 2.9] {
            let p = fam.evaluate(phi).unwrap();
            let dp = family_derivative(&fam, phi).unwrap();
            let scores: Vec<f64> = p.iter().zip(&dp).map(|(a, d)| d / a).collect();
            let mean = p.expectation(&scores).unwrap();
            let second: f64 = p.iter().zip(&scores).map(|(a, s)| a * s * s).sum();
            let var = second - mean * mean;
            assert!(mean.abs() < 1e-12);
            assert!((var - fisher_information(&fam, phi).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_excludes_dead_outcomes() {
        let fam = ParamFamily::new(|phi: f64| vec![phi, 1.0 - phi, 0.0], (0.0, 1.0), 0.1).unwrap();
        let f = fisher_information_detailed(&fam, 0.5).unwrap();
        assert_eq!(f.excluded, vec![2]);
        assert!((f.value - 4.0).abs() < 1e-6);
    }

    #[test]
    fn fisher_flags_degenerate_support() {
        let fam = ParamFamily::new(|_| vec![1.0, 0.0], (0.0, 1.0), 0.1)
            .unwrap()
            .with_derivative(|_| vec![-0.1, 0.1]);
        assert!(matches!(
            fisher_information(&fam, 0.5),
            Err(Error::DegenerateSupport { index: 1, .. })
        ));
    }

    #[test]
    fn fisher_plugin_examples() {
        let fam = qubit();
        let phi = FRAC_PI_3;
        // p = [0.75, 0.25]
        let f = fisher_plugin(&[3000, 1000], &fam, phi).unwrap();
        assert!((f - fisher_information(&fam, phi).unwrap()).abs() < 1e-12);
        assert_eq!(fisher_plugin(&[0, 0], &fam, phi), Err(Error::EmptySample));
    }

    #[test]
    fn kl_fisher_examples() {
        let fam = qubit();
        let e = kl_fisher_expansion_check(&fam, FRAC_PI_2, 1e-3).unwrap();
        assert!((e.ratio - 1.0).abs() < 1e-2);
        let e = kl_fisher_expansion_check(&fam, FRAC_PI_2, 1e-1).unwrap();
        assert!((e.ratio - 1.0).abs() < 1e-1);
        for delta in [1e-1, 1e-2, 1e-3] {
            let e = kl_fisher_expansion_check(&fam, FRAC_PI_3, delta).unwrap();
            // both directions share the quadratic term; the gap is O(δ³)
            assert!((e.kl_forward - e.kl_reverse).abs() <= delta.powi(3));
            assert_eq!(e.jeffreys, e.kl_forward + e.kl_reverse);
        }
        assert!(kl_fisher_expansion_check(&fam, FRAC_PI_2, 0.0).is_err());
    }

    #[test]
    fn omega_examples() {
        let ideal = joint(&[&[0.4, 0.1], &[0.15, 0.35]]);
        let o = omega(&ideal, &ideal).unwrap();
        assert!((o.omega - mutual_information(&ideal)).abs() < 1e-15);
        assert!(o.identity_residual() < 1e-12);
        assert_eq!(o.kl_initial, 0.0);
        assert_eq!(o.kl_final, 0.0);

        let holed = joint(&[&[0.5, 0.0], &[0.15, 0.35]]);
        assert_eq!(omega(&ideal, &holed), Err(Error::SupportViolation));
    }
}
