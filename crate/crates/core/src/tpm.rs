//! Two-point-measurement (TPM) work statistics for a unitary drive.
//!
//! The system starts in the Gibbs state of `H = Σ E_n |ψ_n⟩⟨ψ_n|`, is
//! measured in that basis, evolves under `U`, and is measured again in the
//! eigenbasis of `H′ = Σ E′_m |ψ′_m⟩⟨ψ′_m|`. The only operator the statistics
//! depend on is the basis-change matrix `B(m, n) = ⟨ψ′_m|U|ψ_n⟩`.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::info::mutual_information;
use crate::maxent::{build_maxent_joint, EnergyLadder};
use crate::prob::ZERO_FLOOR;
use crate::{DiscreteDist, Error, JointDist, PhysicalContext, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Allowed deviation from Hermiticity / unitarity.
pub const MATRIX_TOLERANCE: f64 = 1e-10;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `max |B†B − I|`.
pub fn unitarity_defect(b: &CMatrix) -> f64 {
    let n = b.ncols();
    max_abs(&(b.adjoint() * b - CMatrix::identity(n, n)))
}

pub fn pauli_x() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[o, l, l, o])
}

pub fn pauli_z() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[l, o, o, -l])
}

pub fn hadamard() -> CMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

/// `U = exp(−i G t)` via the eigendecomposition of the Hermitian `G`.
pub fn unitary_from_generator(generator: &CMatrix, t: f64) -> Result<CMatrix> {
    if !generator.is_square() {
        return Err(Error::DimensionMismatch {
            left: generator.nrows(),
            right: generator.ncols(),
        });
    }
    if generator
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
        || !t.is_finite()
    {
        return Err(Error::NonFinite("generator"));
    }
    let deviation = hermiticity_defect(generator);
    if deviation > MATRIX_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = generator.clone().symmetric_eigen();
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(0.0, -e * t).exp()));
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// Random Hermitian matrix with independent standard-normal real and
/// imaginary parts above the diagonal.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let d: f64 = StandardNormal.sample(rng);
        m[(i, i)] = C64::new(d, 0.0);
        for j in (i + 1)..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    m
}

fn log_partition_function(energies: &[f64], beta: f64) -> f64 {
    let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = energies.iter().map(|e| (-beta * (e - ground)).exp()).sum();
    -beta * ground + sum.ln()
}

/// A driven finite-level system: initial and final spectra, the basis
/// change `B(m, n) = ⟨ψ′_m|U|ψ_n⟩`, and the bath it starts in equilibrium with.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDrive {
    energies: Vec<f64>,
    final_energies: Vec<f64>,
    basis_change: CMatrix,
    ctx: PhysicalContext,
}

impl QuantumDrive {
    pub fn new(
        energies: Vec<f64>,
        final_energies: Vec<f64>,
        basis_change: CMatrix,
        ctx: PhysicalContext,
    ) -> Result<Self> {
        let dim = energies.len();
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "a drive needs at least two levels, got {dim}"
            )));
        }
        if final_energies.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: final_energies.len(),
            });
        }
        if basis_change.nrows() != dim || basis_change.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: basis_change.nrows().max(basis_change.ncols()),
            });
        }
        for ladder in [&energies, &final_energies] {
            if ladder.iter().any(|e| !e.is_finite()) {
                return Err(Error::NonFinite("energy level"));
            }
            if ladder.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidParameter(
                    "energy levels must be sorted ascending".into(),
                ));
            }
        }
        let deviation = unitarity_defect(&basis_change);
        if deviation > MATRIX_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            energies,
            final_energies,
            basis_change,
            ctx,
        })
    }

    /// Same basis before and after, `B = U`.
    pub fn from_unitary(
        energies: Vec<f64>,
        final_energies: Vec<f64>,
        unitary: CMatrix,
        ctx: PhysicalContext,
    ) -> Result<Self> {
        Self::new(energies, final_energies, unitary, ctx)
    }

    /// Random drive: ladders uniform on `[0, 3)` (sorted), `U = exp(−iGt)`
    /// with a standard-normal Hermitian `G` and `t` uniform on `[0, 2)`.
    pub fn random<R: Rng + ?Sized>(dim: usize, ctx: PhysicalContext, rng: &mut R) -> Result<Self> {
        let ladder = |rng: &mut R| {
            let mut e: Vec<f64> = (0..dim).map(|_| 3.0 * rng.random::<f64>()).collect();
            e.sort_by(f64::total_cmp);
            e
        };
        let energies = ladder(rng);
        let final_energies = ladder(rng);
        let generator = random_hermitian(dim, rng);
        let t = 2.0 * rng.random::<f64>();
        let unitary = unitary_from_generator(&generator, t)?;
        Self::new(energies, final_energies, unitary, ctx)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn final_energies(&self) -> &[f64] {
        &self.final_energies
    }

    pub fn basis_change(&self) -> &CMatrix {
        &self.basis_change
    }

    pub fn context(&self) -> &PhysicalContext {
        &self.ctx
    }

    pub fn ladder(&self) -> EnergyLadder {
        EnergyLadder {
            initial: self.energies.clone(),
            final_: self.final_energies.clone(),
        }
    }

    /// `|B(m, n)|²`
    pub fn transition_probability(&self, m: usize, n: usize) -> f64 {
        self.basis_change[(m, n)].norm_sqr()
    }

    pub fn log_partition(&self) -> f64 {
        log_partition_function(&self.energies, self.ctx.beta())
    }

    pub fn log_final_partition(&self) -> f64 {
        log_partition_function(&self.final_energies, self.ctx.beta())
    }
}

/// Gibbs populations `e^{−βE_n}/Z` and the partition function `Z`.
pub fn thermal_populations(drive: &QuantumDrive) -> (DiscreteDist, f64) {
    let beta = drive.ctx.beta();
    let ground = drive.energies.iter().copied().fold(f64::INFINITY, f64::min);
    let factors: Vec<f64> = drive
        .energies
        .iter()
        .map(|e| (-beta * (e - ground)).exp())
        .collect();
    let p = DiscreteDist::from_unnormalized(factors).expect("ground level has unit weight");
    (p, drive.log_partition().exp())
}

/// `p(n, m) = p(n) |B(m, n)|²`, rows `n`, columns `m`.
pub fn tpm_joint(drive: &QuantumDrive) -> JointDist {
    let (p, _) = thermal_populations(drive);
    let dim = drive.dim();
    let mut data = Vec::with_capacity(dim * dim);
    for n in 0..dim {
        for m in 0..dim {
            data.push(p.get(n) * drive.transition_probability(m, n));
        }
    }
    JointDist::from_row_major(dim, dim, data).expect("unitary basis change preserves norm")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkDistribution {
    /// Distinct work outcomes `w = E′_m − E_n`, ascending.
    pub values: Vec<f64>,
    pub probs: DiscreteDist,
    pub joint: JointDist,
}

impl WorkDistribution {
    pub fn mean(&self) -> f64 {
        self.probs
            .expectation(&self.values)
            .expect("values and probabilities have equal length")
    }

    pub fn probability_of(&self, w: f64, tolerance: f64) -> f64 {
        self.values
            .iter()
            .zip(self.probs.iter())
            .filter(|(v, _)| (*v - w).abs() <= tolerance)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Work outcomes weighted by the TPM joint. Outcomes closer than
/// `1e-12 · max|E|` are merged; cells without mass are dropped.
pub fn work_distribution(drive: &QuantumDrive) -> WorkDistribution {
    let joint = tpm_joint(drive);
    let scale = drive
        .energies
        .iter()
        .chain(&drive.final_energies)
        .fold(0.0_f64, |acc, e| acc.max(e.abs()));
    let merge_tolerance = 1e-12 * scale;

    let mut outcomes: Vec<(f64, f64)> = joint
        .entries()
        .filter(|&(_, _, p)| p > ZERO_FLOOR)
        .map(|(n, m, p)| (drive.final_energies[m] - drive.energies[n], p))
        .collect();
    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut values: Vec<f64> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for (w, p) in outcomes {
        match values.last() {
            Some(&last) if (w - last).abs() <= merge_tolerance => {
                *probs.last_mut().expect("parallel vectors") += p;
            }
            _ => {
                values.push(w);
                probs.push(p);
            }
        }
    }
    WorkDistribution {
        values,
        probs: DiscreteDist::new(probs).expect("aggregated joint mass"),
        joint,
    }
}

/// `ΔF = −k_B T ln(Z′/Z)`. At infinite temperature this is the limit
/// `mean(E′) − mean(E)`.
pub fn free_energy_difference(drive: &QuantumDrive) -> f64 {
    let beta = drive.ctx.beta();
    if beta == 0.0 {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        return mean(&drive.final_energies) - mean(&drive.energies);
    }
    -(drive.log_final_partition() - drive.log_partition()) / beta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JarzynskiCheck {
    /// `⟨e^{−βw}⟩` under the TPM joint
    pub lhs: f64,
    /// `e^{−βΔF} = Z′/Z`
    pub rhs: f64,
    pub residual: f64,
}

pub fn jarzynski_check(drive: &QuantumDrive) -> JarzynskiCheck {
    let beta = drive.ctx.beta();
    let joint = tpm_joint(drive);
    let lhs: f64 = joint
        .entries()
        .map(|(n, m, p)| p * (-beta * (drive.final_energies[m] - drive.energies[n])).exp())
        .sum();
    let rhs = (drive.log_final_partition() - drive.log_partition()).exp();
    JarzynskiCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}

/// `⟨W_D⟩ = ⟨W⟩ − ΔF`.
pub fn dissipated_work(drive: &QuantumDrive) -> f64 {
    work_distribution(drive).mean() - free_energy_difference(drive)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoWorkRelation {
    /// `β ⟨W_D⟩`
    pub beta_wd: f64,
    /// Mutual information of the TPM joint.
    pub mi_tpm: f64,
    /// Information of the max-ent joint built from the TPM marginals at
    /// `λ = −β`, measured against those marginals.
    pub mi_maxent: f64,
}

pub fn info_work_relation(drive: &QuantumDrive) -> Result<InfoWorkRelation> {
    let beta = drive.ctx.beta();
    let joint = tpm_joint(drive);
    let (initial, final_) = joint.marginals();
    let maxent = build_maxent_joint(&final_, &initial, &drive.ladder(), -beta)?;
    Ok(InfoWorkRelation {
        beta_wd: beta * dissipated_work(drive),
        mi_tpm: mutual_information(&joint),
        mi_maxent: maxent.reference_information(),
    })
}
