//! Fixed-N bosonic Fock basis, Hamiltonian assembly and exact
//! diagonalization — the reference engine the PEPS is benchmarked against.
//!
//! Basis states are occupation vectors (n_1, …, n_12) with Σ n_k = N, stored
//! in lexicographic order so matrix layouts are reproducible across runs.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::topology::{Bond, KagomeTopology, Site, N_SITES};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Largest total photon number the basis enumerator accepts (dim 75 582).
pub const MAX_SECTOR_N: usize = 8;

/// Largest sector dimension for which a dense Hamiltonian may be built.
pub const MAX_DENSE_DIM: usize = 13_000;

/// Physical parameters of the driven hopping Hamiltonian
/// H = ħω_d Σ n̂_k − Σ_⟨k,k'⟩ κ_{kk'} (a†_k a_k' + h.c.) − μ N̂.
#[derive(Clone, Debug)]
pub struct HamiltonianParams {
    /// Driving frequency ω_d, rad/s.
    pub omega_d: f64,
    /// ħ in J·s; a fixed physical constant, exposed for unit transparency.
    pub hbar: f64,
    /// Hopping strength per bond, J.
    pub couplings: BTreeMap<Bond, f64>,
    /// Chemical potential μ, J. Zero except in grand-canonical scans.
    pub mu: f64,
    /// Reference frequency Ω_R (rad/s) used to report E/(ħΩ_R).
    pub unit_scale: f64,
}

impl HamiltonianParams {
    pub fn new(omega_d: f64, couplings: BTreeMap<Bond, f64>, mu: f64, unit_scale: f64) -> Result<Self> {
        let p = HamiltonianParams { omega_d, hbar: HBAR, couplings, mu, unit_scale };
        p.validate()?;
        Ok(p)
    }

    /// Uniform coupling κ (J) on every bond of `topology`.
    pub fn uniform(topology: &KagomeTopology, omega_d: f64, kappa: f64, mu: f64, unit_scale: f64) -> Result<Self> {
        Self::new(omega_d, topology.uniform_couplings(kappa), mu, unit_scale)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_d > 0.0) {
            return Err(Error::Config(format!("omega_d must be positive, got {}", self.omega_d)));
        }
        if !(self.unit_scale > 0.0) {
            return Err(Error::Config(format!("unit_scale must be positive, got {}", self.unit_scale)));
        }
        for (b, k) in &self.couplings {
            if !(*k >= 0.0) {
                return Err(Error::Config(format!("coupling at bond {b} must be ≥ 0, got {k}")));
            }
        }
        Ok(())
    }

    /// ħΩ_R in J, the reporting unit for dimensionless energies.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.unit_scale
    }

    /// E/(ħΩ_R).
    pub fn dimensionless(&self, energy_j: f64) -> f64 {
        energy_j / self.energy_scale()
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_couplings(mut self, couplings: BTreeMap<Bond, f64>) -> Self {
        self.couplings = couplings;
        self
    }

    fn coupling(&self, bond: Bond) -> Result<f64> {
        self.couplings
            .get(&bond)
            .copied()
            .ok_or_else(|| Error::Config(format!("coupling map is missing bond {bond}")))
    }
}

/// An occupation vector over the 12 cavities.
pub type Occupation = [u8; N_SITES];

/// The fixed-N sector basis (optionally with a per-site occupancy cap).
#[derive(Clone, Debug)]
pub struct FockBasis {
    n_total: usize,
    site_cap: usize,
    states: Vec<Occupation>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

impl FockBasis {
    /// All occupation vectors with Σ n_k = `n_total`, lexicographic order.
    pub fn enumerate(n_total: usize) -> Result<Self> {
        Self::with_site_cap(n_total, n_total)
    }

    /// As [`FockBasis::enumerate`] but with per-site occupancy capped at
    /// `site_cap` (used for truncated-space energies in μ-window selection).
    pub fn with_site_cap(n_total: usize, site_cap: usize) -> Result<Self> {
        if n_total > MAX_SECTOR_N {
            return Err(Error::Capacity { what: "total photon number", requested: n_total, limit: MAX_SECTOR_N });
        }
        let mut states = Vec::with_capacity(binomial(n_total + N_SITES - 1, N_SITES - 1));
        let mut occ: Occupation = [0; N_SITES];
        fill(&mut states, &mut occ, 0, n_total, site_cap);
        Ok(FockBasis { n_total, site_cap, states })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn site_cap(&self) -> usize {
        self.site_cap
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &Occupation {
        &self.states[index]
    }

    /// Basis index of an occupation vector, if it belongs to this sector.
    pub fn index(&self, occ: &Occupation) -> Option<usize> {
        self.states.binary_search(occ).ok()
    }

    /// Flat index of |n_1 … n_12⟩ in the d^12 product space, site 1 slowest.
    pub fn product_index(occ: &Occupation, phys_dim: usize) -> usize {
        occ.iter().fold(0usize, |acc, &n| acc * phys_dim + n as usize)
    }

    /// Extract this sector's amplitudes from a full d^12 product-space vector.
    pub fn sector_component(&self, full: &Array1<C64>, phys_dim: usize) -> Result<Array1<C64>> {
        let expected = phys_dim.pow(N_SITES as u32);
        if full.len() != expected {
            return Err(Error::Argument(format!(
                "product vector has length {}, expected {expected} for d = {phys_dim}",
                full.len()
            )));
        }
        if self.n_total >= phys_dim && self.states.iter().any(|s| s.iter().any(|&n| n as usize >= phys_dim)) {
            return Err(Error::State(format!(
                "sector N = {} holds occupations beyond phys_dim = {phys_dim}",
                self.n_total
            )));
        }
        Ok(Array1::from_iter(self.states.iter().map(|occ| full[Self::product_index(occ, phys_dim)])))
    }
}

fn fill(states: &mut Vec<Occupation>, occ: &mut Occupation, site: usize, remaining: usize, cap: usize) {
    if site == N_SITES - 1 {
        if remaining <= cap {
            occ[site] = remaining as u8;
            states.push(*occ);
            occ[site] = 0;
        }
        return;
    }
    for n in 0..=remaining.min(cap) {
        occ[site] = n as u8;
        fill(states, occ, site + 1, remaining - n, cap);
    }
    occ[site] = 0;
}

/// A dense Hermitian matrix over a sector basis.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    mat: Array2<C64>,
}

impl HermitianOperator {
    /// Wrap a matrix, checking Hermiticity to 1e-12 relative.
    pub fn new(mat: Array2<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Argument(format!("operator must be square, got {}×{}", mat.nrows(), mat.ncols())));
        }
        let asym = linalg::hermiticity_error(&mat.view());
        if asym > 1e-12 {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(HermitianOperator { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    /// True when every entry has exactly zero imaginary part (the hopping
    /// model with real couplings always lands here).
    pub fn is_real(&self) -> bool {
        self.mat.iter().all(|z| z.im == 0.0)
    }

    /// ⟨state|O|state⟩ for a unit-norm state (real part; the operator is
    /// Hermitian so the imaginary part is round-off).
    pub fn expectation(&self, state: &Array1<C64>) -> f64 {
        let hs = self.mat.dot(state);
        state.iter().zip(hs.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Assemble the sector Hamiltonian of `params` over `basis`.
///
/// Diagonal: (ħω_d − μ)·N on every basis state. Off-diagonal: moving one
/// photon across bond ⟨k,k'⟩ carries −κ_{kk'}·√((n_k+1)·n_{k'}).
pub fn build_hamiltonian(
    params: &HamiltonianParams,
    basis: &FockBasis,
    topology: &KagomeTopology,
) -> Result<HermitianOperator> {
    params.validate()?;
    let dim = basis.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::Capacity { what: "dense sector dimension", requested: dim, limit: MAX_DENSE_DIM });
    }
    for b in topology.bonds() {
        params.coupling(*b)?;
    }
    let diag = (params.hbar * params.omega_d - params.mu) * basis.n_total() as f64;
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..dim {
        h[[i, i]] = C64::new(diag, 0.0);
    }
    let cap = basis.site_cap() as u8;
    for (j, occ) in basis.states().iter().enumerate() {
        for bond in topology.bonds() {
            let (p, q) = bond.endpoints();
            let kappa = params.coupling(*bond)?;
            // a†_p a_q and a†_q a_p applied to |occ⟩.
            for (dst, src) in [(p, q), (q, p)] {
                let (di, si) = (dst.index(), src.index());
                if occ[si] == 0 || occ[di] >= cap {
                    continue;
                }
                let mut moved = *occ;
                moved[si] -= 1;
                moved[di] += 1;
                let Some(i) = basis.index(&moved) else { continue };
                let amp = -kappa * (((occ[di] + 1) as f64) * (occ[si] as f64)).sqrt();
                h[[i, j]] += C64::new(amp, 0.0);
            }
        }
    }
    HermitianOperator::new(h)
}

/// The `k_lowest` smallest eigenpairs, ascending, eigenvectors unit-norm.
pub fn ed_spectrum(h: &HermitianOperator, k_lowest: usize) -> Result<Vec<(f64, Array1<C64>)>> {
    if k_lowest > h.dim() {
        return Err(Error::Argument(format!("k_lowest = {} exceeds dimension {}", k_lowest, h.dim())));
    }
    let (vals, vecs) = if h.is_real() {
        let re = h.matrix().mapv(|z| z.re);
        let (w, v) = linalg::eigh_real(&re.view())?;
        (w, v.mapv(|x| C64::new(x, 0.0)))
    } else {
        linalg::eigh_complex(&h.matrix().view())?
    };
    Ok((0..k_lowest).map(|i| (vals[i], vecs.column(i).to_owned())).collect())
}

/// All eigenvalues, ascending (no vectors; cheaper for large sectors).
pub fn ed_energies(h: &HermitianOperator) -> Result<Array1<f64>> {
    if h.is_real() {
        let re = h.matrix().mapv(|z| z.re);
        linalg::eigh_real_values(&re.view())
    } else {
        linalg::eigh_complex_values(&h.matrix().view())
    }
}

/// Sector ground-state energy.
pub fn ed_ground_energy(h: &HermitianOperator) -> Result<f64> {
    Ok(ed_energies(h)?[0])
}

/// Mean photon number per site, n_k = Σ_states |amplitude|²·n_k.
pub fn local_occupations(state: &Array1<C64>, basis: &FockBasis) -> Result<Vec<f64>> {
    if state.len() != basis.dim() {
        return Err(Error::Argument(format!(
            "state length {} does not match basis dimension {}",
            state.len(),
            basis.dim()
        )));
    }
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::State(format!("state norm {norm} deviates from 1 beyond 1e-8")));
    }
    let mut occ = vec![0.0f64; N_SITES];
    for (amp, s) in state.iter().zip(basis.states()) {
        let w = amp.norm_sqr();
        for (k, &n) in s.iter().enumerate() {
            occ[k] += w * n as f64;
        }
    }
    Ok(occ)
}

/// Ground-state energy of the uniform-κ single-photon sector predicted from
/// the adjacency spectrum: ħω_d − μ − κ·λ_max(A).
pub fn single_photon_ground_energy(params: &HamiltonianParams, topology: &KagomeTopology, kappa: f64) -> Result<f64> {
    let a = topology.adjacency_matrix();
    let w = linalg::eigh_real_values(&a.view())?;
    let lambda_max = w[w.len() - 1];
    Ok(params.hbar * params.omega_d - params.mu - kappa * lambda_max)
}

/// Largest adjacency eigenvalue of the cell.
pub fn adjacency_lambda_max(topology: &KagomeTopology) -> Result<f64> {
    let a = topology.adjacency_matrix();
    let w = linalg::eigh_real_values(&a.view())?;
    Ok(w[w.len() - 1])
}
