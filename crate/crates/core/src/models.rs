//! Hamiltonian and initial-state builders with cached eigendecompositions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;
use crate::qcore::{hermitian_eigen, ComplexMatrix, StateVector};

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Which Hamiltonian a spec was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HamiltonianKind {
    SingleQubitZ,
    MixedFieldIsing { sites: u32, periodic: bool },
    Explicit,
}

/// Hermitian Hamiltonian with a cached spectral decomposition.
///
/// Eigenvalues are sorted ascending; eigenvectors carry a canonical phase,
/// so states built in the eigenbasis are reproducible bit-for-bit.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    kind: HamiltonianKind,
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HamiltonianSpec {
    fn from_parts(kind: HamiltonianKind, matrix: ComplexMatrix) -> Self {
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        HamiltonianSpec {
            kind,
            matrix,
            eigenvalues,
            eigenvectors,
        }
    }

    /// H = σz on a single qubit.
    pub fn single_qubit_z() -> Self {
        Self::from_parts(HamiltonianKind::SingleQubitZ, pauli_z())
    }

    /// Mixed-field Ising chain H = -Σ_i (σz_i σz_{i+1} + σz_i + σx_i) on
    /// `sites` spins; the wraparound bond is included iff `periodic`.
    /// Site 0 is the most significant qubit factor.
    pub fn mixed_field_ising(sites: u32, periodic: bool, cfg: &NumericsConfig) -> Result<Self> {
        if sites == 0 || sites > cfg.ising_site_cap {
            return Err(Error::CapExceeded(format!(
                "ising sites {} outside 1..={}",
                sites, cfg.ising_site_cap
            )));
        }
        let n = sites as usize;
        let dim = 1usize << n;
        let mut h = ComplexMatrix::zeros(dim, dim);
        let minus_one = Complex64::new(-1.0, 0.0);
        for i in 0..n {
            h = &h + &embed_site(&pauli_z(), n, i).scale(minus_one);
            h = &h + &embed_site(&pauli_x(), n, i).scale(minus_one);
        }
        let bonds = if periodic && n >= 2 { n } else { n.saturating_sub(1) };
        for i in 0..bonds {
            let j = (i + 1) % n;
            h = &h + &embed_two_sites(&pauli_z(), &pauli_z(), n, i, j).scale(minus_one);
        }
        debug_assert!(h.hermiticity_residual() < 1e-14);
        Ok(Self::from_parts(
            HamiltonianKind::MixedFieldIsing { sites, periodic },
            h,
        ))
    }

    /// Wraps an explicit Hermitian matrix.
    pub fn explicit(matrix: ComplexMatrix, cfg: &NumericsConfig) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("Hamiltonian must be square".into()));
        }
        if matrix.rows() > cfg.density_side_cap {
            return Err(Error::CapExceeded(format!(
                "Hamiltonian dim {} exceeds cap {}",
                matrix.rows(),
                cfg.density_side_cap
            )));
        }
        if !matrix.is_hermitian(cfg.hermiticity_tol) {
            return Err(Error::Contract(format!(
                "Hamiltonian is not Hermitian (residual {:.3e})",
                matrix.hermiticity_residual()
            )));
        }
        Ok(Self::from_parts(HamiltonianKind::Explicit, matrix))
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors, ordered like the values.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        let d = self.dim();
        StateVector::new((0..d).map(|r| self.eigenvectors[(r, k)]).collect()).unwrap()
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenvector(0)
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// ||H|| = max |eigenvalue|.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max)
    }

    /// e^{scale H} from the cached decomposition.
    pub fn evolution(&self, scale: Complex64) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let f = (scale * e).exp();
            for r in 0..d {
                scaled[(r, k)] *= f;
            }
        }
        &scaled * &self.eigenvectors.adjoint()
    }

    /// Forward real-time evolution e^{-iHt}.
    pub fn real_evolution(&self, t: f64) -> ComplexMatrix {
        self.evolution(Complex64::new(0.0, -t))
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &StateVector) -> Vec<Complex64> {
        let d = self.dim();
        assert_eq!(psi.dim(), d);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..d {
                acc += self.eigenvectors[(r, k)].conj() * psi.amplitudes()[r];
            }
            *slot = acc;
        }
        out
    }

    /// State with the given eigenbasis coefficients.
    pub fn from_eigenbasis(&self, coeffs: &[Complex64]) -> StateVector {
        let d = self.dim();
        assert_eq!(coeffs.len(), d);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (k, c) in coeffs.iter().enumerate() {
            for (r, slot) in out.iter_mut().enumerate() {
                *slot += self.eigenvectors[(r, k)] * c;
            }
        }
        StateVector::new(out).unwrap()
    }
}

/// Embeds a single-site operator at `site` in an `n`-qubit register.
fn embed_site(op: &ComplexMatrix, n: usize, site: usize) -> ComplexMatrix {
    let cfg = NumericsConfig::default();
    let mut out = ComplexMatrix::identity(1);
    for k in 0..n {
        let factor = if k == site {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = crate::qcore::kron(&out, &factor, &cfg).expect("ising term within cap");
    }
    out
}

fn embed_two_sites(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    n: usize,
    site_a: usize,
    site_b: usize,
) -> ComplexMatrix {
    let cfg = NumericsConfig::default();
    let mut out = ComplexMatrix::identity(1);
    for k in 0..n {
        let factor = if k == site_a {
            a.clone()
        } else if k == site_b {
            b.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = crate::qcore::kron(&out, &factor, &cfg).expect("ising term within cap");
    }
    out
}

/// Ground energy, gap, and ground-space degeneracy of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    pub ground_energy: f64,
    /// E_1 - E_0 where E_1 is the lowest eigenvalue above the degeneracy
    /// tolerance; 0 for a fully degenerate spectrum.
    pub gap: f64,
    /// Number of eigenvalues within tolerance of the ground energy.
    pub degeneracy: usize,
    pub dim: usize,
}

/// Classifies the spectrum with the given absolute degeneracy tolerance.
pub fn spectral_summary(h: &HamiltonianSpec, degeneracy_tol: f64) -> SpectralSummary {
    let evals = h.eigenvalues();
    let e0 = evals[0];
    let degeneracy = evals.iter().take_while(|&&e| e - e0 <= degeneracy_tol).count();
    let gap = if degeneracy == evals.len() {
        0.0
    } else {
        evals[degeneracy] - e0
    };
    SpectralSummary {
        ground_energy: e0,
        gap,
        degeneracy,
        dim: evals.len(),
    }
}

/// Default degeneracy tolerance, scaled by the operator norm.
pub fn default_degeneracy_tol(h: &HamiltonianSpec, cfg: &NumericsConfig) -> f64 {
    cfg.degeneracy_rel_tol * h.operator_norm().max(1.0)
}

/// Declarative initial-state description.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSpec {
    /// √p |gs> + √(1-p) |φ⊥>, with |φ⊥> the equal-weight superposition of
    /// all excited eigenvectors (real positive coefficients).
    OverlapMix { p: f64 },
    /// Uniform superposition of the computational basis.
    PlusAll,
    /// |0...0>.
    BasisZero,
    /// (1/√d) Σ_i |ii> on a two-factor register of total dim d².
    MaxEntangled { d: usize },
    Explicit(StateVector),
}

/// Materializes an initial state for the given Hamiltonian.
pub fn initial_state(
    spec: &InitialStateSpec,
    h: &HamiltonianSpec,
    cfg: &NumericsConfig,
) -> Result<StateVector> {
    let d = h.dim();
    match spec {
        InitialStateSpec::OverlapMix { p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Contract(format!("overlap p={p} outside [0, 1]")));
            }
            let summary = spectral_summary(h, default_degeneracy_tol(h, cfg));
            if summary.degeneracy > 1 {
                return Err(Error::Contract(format!(
                    "overlap_mix needs a non-degenerate ground state (found degeneracy {})",
                    summary.degeneracy
                )));
            }
            if d == 1 {
                if (p - 1.0).abs() > cfg.norm_tol {
                    return Err(Error::Contract(
                        "overlap_mix with dim 1 forces p = 1".into(),
                    ));
                }
                return Ok(h.ground_state());
            }
            let excited = ((1.0 - p) / (d - 1) as f64).sqrt();
            let mut coeffs = vec![Complex64::new(excited, 0.0); d];
            coeffs[0] = Complex64::new(p.sqrt(), 0.0);
            h.from_eigenbasis(&coeffs).normalized(cfg)
        }
        InitialStateSpec::PlusAll => {
            let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
            StateVector::new(vec![amp; d])
        }
        InitialStateSpec::BasisZero => Ok(StateVector::basis(d, 0)),
        InitialStateSpec::MaxEntangled { d: inner } => {
            if inner * inner != d {
                return Err(Error::Shape(format!(
                    "max_entangled({inner}) needs Hamiltonian dim {} but got {d}",
                    inner * inner
                )));
            }
            let amp = Complex64::new(1.0 / (*inner as f64).sqrt(), 0.0);
            let mut data = vec![Complex64::new(0.0, 0.0); d];
            for i in 0..*inner {
                data[i * inner + i] = amp;
            }
            StateVector::new(data)
        }
        InitialStateSpec::Explicit(v) => {
            if v.dim() != d {
                return Err(Error::Shape(format!(
                    "explicit state dim {} does not match Hamiltonian dim {d}",
                    v.dim()
                )));
            }
            v.normalized(cfg)
        }
    }
}

/// Normalized imaginary-time evolution e^{-βH} |φ0> / ||·||.
///
/// Positive β suppresses high energies. Computed in the eigenbasis with a
/// max-exponent shift so large β cannot overflow; the only failure mode is
/// an initial state orthogonal to the entire retained spectrum.
pub fn imaginary_evolved(
    h: &HamiltonianSpec,
    phi0: &StateVector,
    beta: f64,
    cfg: &NumericsConfig,
) -> Result<StateVector> {
    if (phi0.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Contract(format!(
            "imaginary_evolved input is not normalized (norm {:.6})",
            phi0.norm()
        )));
    }
    let coeffs = h.to_eigenbasis(phi0);
    let shift = h
        .eigenvalues()
        .iter()
        .map(|&e| -beta * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let evolved: Vec<Complex64> = coeffs
        .iter()
        .zip(h.eigenvalues().iter())
        .map(|(c, &e)| c * (-beta * e - shift).exp())
        .collect();
    let norm: f64 = evolved.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-280 {
        return Err(Error::NumericalRange(
            "imaginary-time weights underflowed; initial state orthogonal to retained spectrum"
                .into(),
        ));
    }
    h.from_eigenbasis(&evolved).normalized(cfg)
}
