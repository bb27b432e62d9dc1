//! Real-time sector dynamics via spectral decomposition, two-point
//! photon-number correlations, and the interferometry initial states.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{sample_couplings, DisorderSpec};
use crate::fock::{build_hamiltonian, FockBasis, HamiltonianParams, HermitianOperator, Occupation};
use crate::linalg;
use crate::topology::{KagomeTopology, Site};

/// How the cell starts out at t = 0.
#[derive(Clone, Debug)]
pub enum InitialStateSpec {
    /// All photons dropped into one cavity.
    Localized { site: Site, photons: usize },
    /// The delocalized two-photon superposition
    /// (|2⟩₁ + |2⟩₇ + e^{iφ}|1⟩₁|1⟩₇)/√3 with relative phase φ.
    Superposition { phi: f64 },
    /// Explicit amplitudes over the sector basis.
    Custom { amplitudes: Vec<C64> },
}

/// Uniform time grid in dimensionless time τ = Ω_R·t.
#[derive(Clone, Copy, Debug)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if !(t_end > t_start) {
            return Err(Error::Argument(format!("time grid must increase, got [{t_start}, {t_end}]")));
        }
        if n_samples < 2 {
            return Err(Error::Argument(format!("time grid needs ≥ 2 samples, got {n_samples}")));
        }
        Ok(TimeGrid { t_start, t_end, n_samples })
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = (self.t_end - self.t_start) / (self.n_samples - 1) as f64;
        (0..self.n_samples).map(|i| self.t_start + dt * i as f64).collect()
    }
}

/// Build the unit-norm initial vector in `basis`.
pub fn build_initial_state(spec: &InitialStateSpec, basis: &FockBasis) -> Result<Array1<C64>> {
    match spec {
        InitialStateSpec::Localized { site, photons } => {
            if *photons != basis.n_total() {
                return Err(Error::State(format!(
                    "localized state with {photons} photons does not lie in the N = {} sector",
                    basis.n_total()
                )));
            }
            let mut occ: Occupation = [0; 12];
            occ[site.index()] = *photons as u8;
            let idx = basis
                .index(&occ)
                .ok_or_else(|| Error::State(format!("occupation with {photons} photons at site {site} not in basis")))?;
            let mut v = Array1::<C64>::zeros(basis.dim());
            v[idx] = C64::new(1.0, 0.0);
            Ok(v)
        }
        InitialStateSpec::Superposition { phi } => {
            if basis.n_total() != 2 {
                return Err(Error::State(format!(
                    "superposition state is a two-photon state, basis has N = {}",
                    basis.n_total()
                )));
            }
            let mut v = Array1::<C64>::zeros(basis.dim());
            let amp = C64::new(1.0 / 3.0f64.sqrt(), 0.0);
            let mut two_at_1: Occupation = [0; 12];
            two_at_1[0] = 2;
            let mut two_at_7: Occupation = [0; 12];
            two_at_7[6] = 2;
            let mut split: Occupation = [0; 12];
            split[0] = 1;
            split[6] = 1;
            v[basis.index(&two_at_1).unwrap()] = amp;
            v[basis.index(&two_at_7).unwrap()] = amp;
            v[basis.index(&split).unwrap()] = amp * C64::from_polar(1.0, *phi);
            Ok(v)
        }
        InitialStateSpec::Custom { amplitudes } => {
            if amplitudes.len() != basis.dim() {
                return Err(Error::State(format!(
                    "custom amplitudes length {} does not match sector dimension {}",
                    amplitudes.len(),
                    basis.dim()
                )));
            }
            let v = Array1::from_vec(amplitudes.clone());
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::State(format!("custom state norm {norm} deviates from 1 beyond 1e-8")));
            }
            Ok(v.mapv(|z| z / norm))
        }
    }
}

/// Evolve `psi0` over the grid: Ψ(τ) = Σ_j e^{−i(E_j/ħΩ_R)τ} ⟨v_j|ψ0⟩ v_j.
pub fn spectral_evolve(
    h: &HermitianOperator,
    psi0: &Array1<C64>,
    grid: &TimeGrid,
    params: &HamiltonianParams,
) -> Result<Vec<Array1<C64>>> {
    if psi0.len() != h.dim() {
        return Err(Error::Argument(format!(
            "state length {} does not match operator dimension {}",
            psi0.len(),
            h.dim()
        )));
    }
    let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::State(format!("initial state norm {norm} deviates from 1 beyond 1e-8")));
    }
    let (vals, vecs) = if h.is_real() {
        let re = h.matrix().mapv(|z| z.re);
        let (w, v) = linalg::eigh_real(&re.view())?;
        (w, v.mapv(|x| C64::new(x, 0.0)))
    } else {
        linalg::eigh_complex(&h.matrix().view())?
    };
    // Overlaps ⟨v_j|ψ0⟩.
    let vh: Array2<C64> = vecs.t().mapv(|z| z.conj());
    let coeffs = vh.dot(psi0);
    let scale = params.energy_scale();
    Ok(grid
        .times()
        .iter()
        .map(|&tau| {
            let phased = Array1::from_iter(
                coeffs
                    .iter()
                    .zip(vals.iter())
                    .map(|(c, e)| c * C64::from_polar(1.0, -(e / scale) * tau)),
            );
            vecs.dot(&phased)
        })
        .collect())
}

/// Metadata carried alongside a correlation series for export.
#[derive(Clone, Debug, Default)]
pub struct SeriesMeta {
    pub couplings_label: String,
    pub seed: Option<u64>,
    pub phi: Option<f64>,
    pub realization: Option<usize>,
}

/// Samples of G_{k,k'}(τ) = ⟨Ψ(τ)|n̂_k n̂_{k'}|Ψ(τ)⟩ over a time grid.
#[derive(Clone, Debug)]
pub struct CorrelationSeries {
    pub pair: (Site, Site),
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SeriesMeta,
}

impl CorrelationSeries {
    /// Peak-to-trough contrast over the grid.
    pub fn contrast(&self) -> f64 {
        let max = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Time of the earliest local maximum reaching half the global maximum.
    pub fn first_peak_time(&self) -> Option<f64> {
        let max = self.max_value();
        if !(max > 0.0) {
            return None;
        }
        for i in 1..self.values.len().saturating_sub(1) {
            let v = self.values[i];
            if v >= 0.5 * max && v >= self.values[i - 1] && v >= self.values[i + 1] {
                return Some(self.times[i]);
            }
        }
        None
    }
}

/// Evaluate G_{k,k'} on already-evolved states. n̂_k n̂_{k'} is diagonal over
/// occupation states, so each sample is Σ_s |amp_s|²·n_k(s)·n_{k'}(s).
pub fn correlation(
    pair: (Site, Site),
    states: &[Array1<C64>],
    times: &[f64],
    basis: &FockBasis,
    meta: SeriesMeta,
) -> Result<CorrelationSeries> {
    if states.len() != times.len() {
        return Err(Error::Argument(format!(
            "{} states for {} time samples",
            states.len(),
            times.len()
        )));
    }
    let (k, kp) = (pair.0.index(), pair.1.index());
    let weights: Vec<f64> = basis.states().iter().map(|s| s[k] as f64 * s[kp] as f64).collect();
    let values = states
        .iter()
        .map(|psi| psi.iter().zip(&weights).map(|(a, w)| a.norm_sqr() * w).sum())
        .collect();
    Ok(CorrelationSeries { pair, times: times.to_vec(), values, meta })
}

/// Convenience: build, evolve and correlate one experiment.
pub fn run_correlation(
    params: &HamiltonianParams,
    topology: &KagomeTopology,
    init: &InitialStateSpec,
    grid: &TimeGrid,
    pair: (Site, Site),
    meta: SeriesMeta,
) -> Result<CorrelationSeries> {
    let basis = sector_basis_for(init)?;
    let h = build_hamiltonian(params, &basis, topology)?;
    let psi0 = build_initial_state(init, &basis)?;
    let states = spectral_evolve(&h, &psi0, grid, params)?;
    correlation(pair, &states, &grid.times(), &basis, meta)
}

fn sector_basis_for(init: &InitialStateSpec) -> Result<FockBasis> {
    let n = match init {
        InitialStateSpec::Localized { photons, .. } => *photons,
        InitialStateSpec::Superposition { .. } => 2,
        InitialStateSpec::Custom { .. } => {
            return Err(Error::Argument("custom initial states need an explicit basis".into()))
        }
    };
    FockBasis::enumerate(n)
}

/// One correlation series per disorder realization plus the ensemble mean,
/// reproducible from the master seed.
pub fn disorder_correlation(
    base: &HamiltonianParams,
    topology: &KagomeTopology,
    disorder: &DisorderSpec,
    init: &InitialStateSpec,
    grid: &TimeGrid,
    pair: (Site, Site),
) -> Result<(Vec<CorrelationSeries>, CorrelationSeries)> {
    disorder.validate()?;
    let runs: Vec<Result<CorrelationSeries>> = (0..disorder.realizations)
        .into_par_iter()
        .map(|r| {
            let couplings = sample_couplings(disorder, topology, r)?;
            let params = base.clone().with_couplings(couplings);
            run_correlation(
                &params,
                topology,
                init,
                grid,
                pair,
                SeriesMeta {
                    couplings_label: format!("disorder[{:.6e}, {:.6e}]", disorder.interval.0, disorder.interval.1),
                    seed: Some(disorder.master_seed),
                    phi: None,
                    realization: Some(r),
                },
            )
        })
        .collect();
    let mut series = Vec::with_capacity(runs.len());
    for r in runs {
        series.push(r?);
    }
    let times = grid.times();
    let mut mean = vec![0.0f64; times.len()];
    for s in &series {
        for (m, v) in mean.iter_mut().zip(&s.values) {
            *m += v;
        }
    }
    let count = series.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);
    let mean_series = CorrelationSeries {
        pair,
        times,
        values: mean,
        meta: SeriesMeta {
            couplings_label: "ensemble-mean".into(),
            seed: Some(disorder.master_seed),
            phi: None,
            realization: None,
        },
    };
    Ok((series, mean_series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::HBAR;
    use crate::topology::build_unit_cell;

    const OMEGA: f64 = 1.0e7;

    fn uniform_params(kappa_rel: f64) -> (KagomeTopology, HamiltonianParams) {
        let topo = build_unit_cell();
        let params = HamiltonianParams::uniform(&topo, OMEGA, kappa_rel * HBAR * OMEGA, 0.0, OMEGA).unwrap();
        (topo, params)
    }

    #[test]
    fn localized_state_is_basis_vector() {
        let basis = FockBasis::enumerate(2).unwrap();
        let v = build_initial_state(&InitialStateSpec::Localized { site: Site::new(1).unwrap(), photons: 2 }, &basis)
            .unwrap();
        let mut occ: Occupation = [0; 12];
        occ[0] = 2;
        let idx = basis.index(&occ).unwrap();
        assert_eq!(v[idx], C64::new(1.0, 0.0));
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn superposition_amplitudes() {
        let basis = FockBasis::enumerate(2).unwrap();
        let v0 = build_initial_state(&InitialStateSpec::Superposition { phi: 0.0 }, &basis).unwrap();
        let norm: f64 = v0.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        assert_eq!(v0.iter().filter(|z| z.norm() > 0.0).count(), 3);
        let vpi = build_initial_state(&InitialStateSpec::Superposition { phi: std::f64::consts::PI }, &basis).unwrap();
        let mut split: Occupation = [0; 12];
        split[0] = 1;
        split[6] = 1;
        let idx = basis.index(&split).unwrap();
        assert!((v0[idx] + vpi[idx]).norm() < 1e-14, "third amplitude flips sign");
        for (i, (a, b)) in v0.iter().zip(vpi.iter()).enumerate() {
            if i != idx {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn evolution_conserves_norm_energy_and_number() {
        let (topo, params) = uniform_params(0.05);
        let basis = FockBasis::enumerate(2).unwrap();
        let h = build_hamiltonian(&params, &basis, &topo).unwrap();
        let psi0 =
            build_initial_state(&InitialStateSpec::Localized { site: Site::new(1).unwrap(), photons: 2 }, &basis)
                .unwrap();
        let grid = TimeGrid::new(0.0, 120.0, 121).unwrap();
        let states = spectral_evolve(&h, &psi0, &grid, &params).unwrap();
        let e0 = h.expectation(&psi0);
        for psi in &states {
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            assert!((h.expectation(psi) - e0).abs() < 1e-10 * e0.abs());
            let occ_sum: f64 = local_number_sum(psi, &basis);
            assert!((occ_sum - 2.0).abs() < 1e-10);
        }
        // t = 0 reproduces the initial state.
        let d0: f64 = states[0].iter().zip(psi0.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(d0 < 1e-12);
    }

    fn local_number_sum(psi: &Array1<C64>, basis: &FockBasis) -> f64 {
        basis
            .states()
            .iter()
            .zip(psi.iter())
            .map(|(s, a)| a.norm_sqr() * s.iter().map(|&n| n as f64).sum::<f64>())
            .sum()
    }

    #[test]
    fn zero_coupling_only_accumulates_phase() {
        let (topo, params) = uniform_params(0.0);
        let basis = FockBasis::enumerate(2).unwrap();
        let h = build_hamiltonian(&params, &basis, &topo).unwrap();
        let psi0 =
            build_initial_state(&InitialStateSpec::Localized { site: Site::new(3).unwrap(), photons: 2 }, &basis)
                .unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 11).unwrap();
        for psi in spectral_evolve(&h, &psi0, &grid, &params).unwrap() {
            let overlap: C64 = psi0.iter().zip(psi.iter()).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_occupations_are_stationary() {
        let (topo, params) = uniform_params(0.08);
        let basis = FockBasis::enumerate(1).unwrap();
        let h = build_hamiltonian(&params, &basis, &topo).unwrap();
        let (_, v) = crate::fock::ed_spectrum(&h, 1).unwrap().remove(0);
        let grid = TimeGrid::new(0.0, 40.0, 21).unwrap();
        let states = spectral_evolve(&h, &v, &grid, &params).unwrap();
        let n0 = crate::fock::local_occupations(&states[0], &basis).unwrap();
        for psi in &states {
            let n = crate::fock::local_occupations(psi, &basis).unwrap();
            for k in 0..12 {
                assert!((n[k] - n0[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn correlation_initial_values_and_symmetry() {
        let (topo, params) = uniform_params(0.05);
        let init = InitialStateSpec::Localized { site: Site::new(1).unwrap(), photons: 2 };
        let grid = TimeGrid::new(0.0, 60.0, 200).unwrap();
        let s11 = run_correlation(
            &params,
            &topo,
            &init,
            &grid,
            (Site::new(1).unwrap(), Site::new(1).unwrap()),
            SeriesMeta::default(),
        )
        .unwrap();
        assert!((s11.values[0] - 4.0).abs() < 1e-12, "G_11(0) = ⟨n̂₁²⟩ = 4");
        let s17 = run_correlation(
            &params,
            &topo,
            &init,
            &grid,
            (Site::new(1).unwrap(), Site::new(7).unwrap()),
            SeriesMeta::default(),
        )
        .unwrap();
        assert!(s17.values[0].abs() < 1e-14);
        let s71 = run_correlation(
            &params,
            &topo,
            &init,
            &grid,
            (Site::new(7).unwrap(), Site::new(1).unwrap()),
            SeriesMeta::default(),
        )
        .unwrap();
        for (a, b) in s17.values.iter().zip(s71.values.iter()) {
            assert_eq!(a, b, "G symmetric under k↔k'");
        }
        assert!(s17.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn spectral_evolution_matches_matrix_exponential_oracle() {
        // Independent route: scaled-and-squared Taylor expm on a random N=1
        // disorder instance.
        use rand::{Rng, SeedableRng};
        let topo = build_unit_cell();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        let couplings: std::collections::BTreeMap<_, _> = topo
            .bonds()
            .iter()
            .map(|&b| (b, rng.gen_range(0.0..0.1) * HBAR * OMEGA))
            .collect();
        let params = HamiltonianParams::new(OMEGA, couplings, 0.0, OMEGA).unwrap();
        let basis = FockBasis::enumerate(1).unwrap();
        let h = build_hamiltonian(&params, &basis, &topo).unwrap();
        let psi0 =
            build_initial_state(&InitialStateSpec::Localized { site: Site::new(5).unwrap(), photons: 1 }, &basis)
                .unwrap();
        let grid = TimeGrid::new(0.0, 25.0, 6).unwrap();
        let states = spectral_evolve(&h, &psi0, &grid, &params).unwrap();
        for (tau, psi) in grid.times().iter().zip(states.iter()) {
            let u = expm_oracle(&h.matrix().mapv(|z| z / C64::new(params.energy_scale(), 0.0)), *tau);
            let want = u.dot(&psi0);
            let diff: f64 = want.iter().zip(psi.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-9, "τ = {tau}: deviation {diff:.3e}");
        }
    }

    /// exp(−iMτ) by scaling-and-squaring Taylor series (test oracle).
    fn expm_oracle(m_dimless: &Array2<C64>, tau: f64) -> Array2<C64> {
        let n = m_dimless.nrows();
        let a = m_dimless.mapv(|z| z * C64::new(0.0, -tau));
        let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
        let s = norm.log2().ceil().max(0.0) as u32 + 1;
        let scaled = a.mapv(|z| z / C64::new(2f64.powi(s as i32), 0.0));
        let mut result = Array2::<C64>::eye(n);
        let mut term = Array2::<C64>::eye(n);
        for k in 1..=24 {
            term = term.dot(&scaled).mapv(|z| z / C64::new(k as f64, 0.0));
            result = result + &term;
        }
        for _ in 0..s {
            result = result.dot(&result);
        }
        result
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        let basis = FockBasis::enumerate(2).unwrap();
        let bad = InitialStateSpec::Custom { amplitudes: vec![C64::new(1.0, 0.0); 3] };
        assert!(build_initial_state(&bad, &basis).is_err());
    }
}
