//! Finite probability vectors, joint tables and parameterised families.
//!
//! Construction validates and renormalises once, so every downstream routine
//! can assume `Σ p = 1` to within `1e-12`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weights below this are treated as exact zeros for support logic.
pub const ZERO_FLOOR: f64 = 1e-300;

/// Negative weights down to this value are clamped to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Largest normalisation drift that is silently renormalised away.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn validate_and_normalize(weights: &mut [f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for (index, w) in weights.iter_mut().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite("probability weight"));
        }
        if *w < 0.0 {
            if *w < -NEGATIVE_TOLERANCE {
                return Err(Error::NegativeWeight { index, value: *w });
            }
            *w = 0.0;
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::BadNormalization { sum });
    }
    for w in weights.iter_mut() {
        *w /= sum;
    }
    Ok(())
}

/// A probability vector over a finite outcome set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl DiscreteDist {
    /// Validates `weights` and renormalises them to unit sum.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut weights = weights;
        validate_and_normalize(&mut weights)?;
        Ok(Self {
            weights,
            labels: None,
        })
    }

    /// Normalises arbitrary non-negative weights (e.g. Boltzmann factors).
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("unnormalised weight"));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::BadNormalization { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty);
        }
        Self::new(vec![1.0 / len as f64; len])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                left: self.weights.len(),
                right: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Whether outcome `index` carries probability mass.
    pub fn in_support(&self, index: usize) -> bool {
        self.weights[index] > ZERO_FLOOR
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().copied()
    }

    /// Expectation of `values` under this distribution.
    pub fn expectation(&self, values: &[f64]) -> Result<f64> {
        check_same_len(self.len(), values.len())?;
        Ok(self.iter().zip(values).map(|(p, v)| p * v).sum())
    }

    /// Draws a multinomial count vector of `n` trials.
    ///
    /// Counts are produced by the sequential conditional-binomial method, so
    /// the output depends only on the state of `rng`.
    pub fn sample_counts<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Vec<u64> {
        let mut counts = vec![0; self.len()];
        let mut remaining_n = n;
        let mut remaining_mass = 1.0;
        let last = self.len() - 1;
        for (i, p) in self.iter().enumerate() {
            if remaining_n == 0 {
                break;
            }
            if i == last {
                counts[i] = remaining_n;
                break;
            }
            let q = if remaining_mass > 0.0 {
                (p / remaining_mass).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let draw = match q {
                q if q <= 0.0 => 0,
                q if q >= 1.0 => remaining_n,
                q => Binomial::new(remaining_n, q)
                    .expect("probability clamped to (0, 1)")
                    .sample(rng),
            };
            counts[i] = draw;
            remaining_n -= draw;
            remaining_mass -= p;
        }
        counts
    }
}

impl fmt::Display for DiscreteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w:.7}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn check_same_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Joint probability table. Rows index the first outcome (initial
/// measurement `n` / `j`), columns the second (final measurement `m` / `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDist {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JointDist {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            check_same_len(ncols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_row_major(nrows, ncols, data)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        check_same_len(rows * cols, data.len())?;
        let mut data = data;
        validate_and_normalize(&mut data)?;
        Ok(Self { rows, cols, data })
    }

    /// Builds the product distribution `p ⊗ q`.
    pub fn product(p: &DiscreteDist, q: &DiscreteDist) -> Self {
        let data = p
            .iter()
            .flat_map(|a| q.iter().map(move |b| a * b))
            .collect();
        Self::from_row_major(p.len(), q.len(), data).expect("product of valid marginals")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Iterates `(row, col, probability)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i / cols, i % cols, p))
    }

    /// Flattened view as a single distribution over all cells.
    pub fn flattened(&self) -> DiscreteDist {
        DiscreteDist::new(self.data.clone()).expect("joint is normalised")
    }

    /// Row-sum and column-sum distributions.
    pub fn marginals(&self) -> (DiscreteDist, DiscreteDist) {
        let mut row = vec![0.0; self.rows];
        let mut col = vec![0.0; self.cols];
        for (j, k, p) in self.entries() {
            row[j] += p;
            col[k] += p;
        }
        (
            DiscreteDist::new(row).expect("row marginal of a valid joint"),
            DiscreteDist::new(col).expect("column marginal of a valid joint"),
        )
    }
}

type Evaluator = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// A differentiable map `φ ↦ p_φ` together with the encoding precision `δ_φ`.
#[derive(Clone)]
pub struct ParamFamily {
    evaluator: Arc<Evaluator>,
    derivative: Option<Arc<Evaluator>>,
    domain: (f64, f64),
    precision: f64,
}

impl fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamFamily")
            .field("domain", &self.domain)
            .field("precision", &self.precision)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl ParamFamily {
    /// `evaluator` must return a normalised weight vector for every `φ` in
    /// the closed `domain`.
    pub fn new<F>(evaluator: F, domain: (f64, f64), precision: f64) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "precision must be positive, got {precision}"
            )));
        }
        if domain.0.is_nan() || domain.1.is_nan() || domain.0 >= domain.1 {
            return Err(Error::InvalidParameter(format!(
                "empty domain [{}, {}]",
                domain.0, domain.1
            )));
        }
        Ok(Self {
            evaluator: Arc::new(evaluator),
            derivative: None,
            domain,
            precision,
        })
    }

    /// Attaches an analytic `∂p/∂φ`.
    pub fn with_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn contains(&self, phi: f64) -> bool {
        phi >= self.domain.0 && phi <= self.domain.1
    }

    pub fn evaluate(&self, phi: f64) -> Result<DiscreteDist> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("family parameter"));
        }
        if !self.contains(phi) {
            return Err(Error::DomainEdge { phi });
        }
        DiscreteDist::new((self.evaluator)(phi))
    }

    /// Analytic derivative if one was supplied.
    pub fn analytic_derivative(&self, phi: f64) -> Option<Vec<f64>> {
        self.derivative.as_ref().map(|d| d(phi))
    }

    /// Central finite difference, ignoring any analytic derivative.
    pub fn finite_difference(&self, phi: f64) -> Result<Vec<f64>> {
        let h = fd_step(phi);
        let (lo, hi) = self.domain;
        if phi - h < lo || phi + h > hi {
            return Err(Error::DomainEdge { phi });
        }
        let plus = (self.evaluator)(phi + h);
        let minus = (self.evaluator)(phi - h);
        check_same_len(plus.len(), minus.len())?;
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect())
    }
}

/// Step used by [`family_derivative`]: `1e-5 · max(1, |φ|)`.
pub fn fd_step(phi: f64) -> f64 {
    1e-5 * phi.abs().max(1.0)
}

/// `∂p_φ/∂φ`: the analytic derivative when available, otherwise a central
/// difference with step [`fd_step`].
pub fn family_derivative(family: &ParamFamily, phi: f64) -> Result<Vec<f64>> {
    if !phi.is_finite() {
        return Err(Error::NonFinite("family parameter"));
    }
    match family.analytic_derivative(phi) {
        Some(d) => {
            if !family.contains(phi) {
                return Err(Error::DomainEdge { phi });
            }
            Ok(d)
        }
        None => family.finite_difference(phi),
    }
}

/// Boltzmann constant and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalContext {
    kb: f64,
    temperature: f64,
}

impl Default for PhysicalContext {
    fn default() -> Self {
        Self {
            kb: 1.0,
            temperature: 1.0,
        }
    }
}

impl PhysicalContext {
    pub fn new(kb: f64, temperature: f64) -> Result<Self> {
        if !(kb > 0.0 && kb.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kB must be positive, got {kb}"
            )));
        }
        if temperature.is_nan() || temperature <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self { kb, temperature })
    }

    /// Context with inverse temperature `beta`; `beta = 0` is the
    /// infinite-temperature limit.
    pub fn from_beta(kb: f64, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        let temperature = if beta == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (kb * beta)
        };
        Self::new(kb, temperature)
    }

    pub fn kb(&self) -> f64 {
        self.kb
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / (self.kb * self.temperature)
    }

    pub fn thermal_energy(&self) -> f64 {
        self.kb * self.temperature
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qubit_family() -> ParamFamily {
        ParamFamily::new(
            |phi: f64| vec![(1.0 + phi.cos()) / 2.0, (1.0 - phi.cos()) / 2.0],
            (0.0, std::f64::consts::PI),
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn make_dist_examples() {
        let d = DiscreteDist::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);

        let z = 1.0 + (-1.0f64).exp();
        let thermal = DiscreteDist::new(vec![0.7310586, 0.2689414]).unwrap();
        assert!((thermal.get(0) - 1.0 / z).abs() < 1e-7);

        assert!(matches!(
            DiscreteDist::new(vec![0.5, 0.6]),
            Err(Error::BadNormalization { .. })
        ));
    }

    #[test]
    fn make_dist_rejects_bad_input() {
        assert!(matches!(
            DiscreteDist::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            DiscreteDist::new(vec![-0.1, 1.1]),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
        assert_eq!(DiscreteDist::new(vec![]), Err(Error::Empty));
    }

    #[test]
    fn tiny_negative_weights_are_clamped_and_drift_renormalised() {
        let d = DiscreteDist::new(vec![-5e-13, 1.0 + 5e-7]).unwrap();
        assert_eq!(d.get(0), 0.0);
        assert!((d.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(!d.in_support(0));
    }

    #[test]
    fn marginals_examples() {
        let j = JointDist::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let (a, b) = j.marginals();
        assert_eq!(a.weights(), &[0.5, 0.5]);
        assert_eq!(b.weights(), &[0.5, 0.5]);

        let j = JointDist::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let (a, b) = j.marginals();
        assert_eq!(a.weights(), &[0.5, 0.5]);
        assert_eq!(b.weights(), &[0.5, 0.5]);

        let j = JointDist::new(vec![vec![0.7310586, 0.0], vec![0.0, 0.2689414]]).unwrap();
        let (a, b) = j.marginals();
        for m in [a, b] {
            assert!((m.get(0) - 0.7310586).abs() < 1e-12);
            assert!((m.get(1) - 0.2689414).abs() < 1e-12);
        }
    }

    #[test]
    fn ragged_joint_is_rejected() {
        assert!(matches!(
            JointDist::new(vec![vec![0.5, 0.25], vec![0.25]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn qubit_derivative_at_quarter_turn() {
        let fam = qubit_family();
        let d = family_derivative(&fam, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((d[0] + 0.5).abs() < 1e-9);
        assert!((d[1] - 0.5).abs() < 1e-9);
        assert!(d.iter().sum::<f64>().abs() < 1e-8);
    }

    #[test]
    fn finite_difference_matches_analytic() {
        let fam =
            qubit_family().with_derivative(|phi: f64| vec![-phi.sin() / 2.0, phi.sin() / 2.0]);
        for phi in [0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5] {
            let a = family_derivative(&fam, phi).unwrap();
            let f = fam.finite_difference(phi).unwrap();
            for (x, y) in a.iter().zip(&f) {
                assert!((x - y).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn constant_family_has_zero_derivative() {
        let fam = ParamFamily::new(|_| vec![0.3, 0.7], (-1.0, 1.0), 0.1).unwrap();
        let d = family_derivative(&fam, 0.0).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn derivative_at_domain_edge_fails() {
        let fam = qubit_family();
        assert_eq!(
            family_derivative(&fam, 0.0),
            Err(Error::DomainEdge { phi: 0.0 })
        );
    }

    #[test]
    fn sampled_counts_sum_to_n_and_are_reproducible() {
        let d = DiscreteDist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let a = d.sample_counts(1000, &mut ChaCha8Rng::seed_from_u64(3));
        let b = d.sample_counts(1000, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 1000);

        let point = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
        let c = point.sample_counts(50, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(c, vec![50, 0]);
    }

    #[test]
    fn context_beta() {
        let ctx = PhysicalContext::new(1.0, 2.0).unwrap();
        assert_eq!(ctx.beta(), 0.5);
        assert_eq!(PhysicalContext::from_beta(1.0, 0.0).unwrap().beta(), 0.0);
        assert!(PhysicalContext::new(1.0, 0.0).is_err());
        assert!(PhysicalContext::new(-1.0, 1.0).is_err());
    }
}
