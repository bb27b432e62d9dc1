//! Disorder sampling, grand-canonical sector scans and benchmark tables —
//! the reproducible experiment layer. Every result is a pure function of
//! (configuration, master seed).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{build_hamiltonian, ed_ground_energy, FockBasis, HamiltonianParams};
use crate::topology::{Bond, KagomeTopology};

/// Independent uniform per-bond coupling disorder on [κ1, κ2].
#[derive(Clone, Copy, Debug)]
pub struct DisorderSpec {
    /// Coupling interval [κ1, κ2], J.
    pub interval: (f64, f64),
    pub master_seed: u64,
    pub realizations: usize,
}

impl DisorderSpec {
    pub fn new(interval: (f64, f64), master_seed: u64, realizations: usize) -> Result<Self> {
        let s = DisorderSpec { interval, master_seed, realizations };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (k1, k2) = self.interval;
        if !(k1 <= k2) {
            return Err(Error::Config(format!("disorder interval requires κ1 ≤ κ2, got [{k1}, {k2}]")));
        }
        if !(k1 >= 0.0) {
            return Err(Error::Config(format!("couplings must stay ≥ 0, interval starts at {k1}")));
        }
        if self.realizations == 0 {
            return Err(Error::Config("disorder needs at least one realization".into()));
        }
        Ok(())
    }
}

/// 18 i.i.d. uniform coupling draws, deterministic in (master seed, index).
pub fn sample_couplings(
    spec: &DisorderSpec,
    topology: &KagomeTopology,
    realization: usize,
) -> Result<BTreeMap<Bond, f64>> {
    spec.validate()?;
    if realization >= spec.realizations {
        return Err(Error::Argument(format!(
            "realization index {realization} outside 0..{}",
            spec.realizations
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(realization as u64);
    let (k1, k2) = spec.interval;
    Ok(topology
        .bonds()
        .iter()
        .map(|&b| {
            let k = if k1 == k2 { k1 } else { rng.gen_range(k1..=k2) };
            (b, k)
        })
        .collect())
}

/// A realization whose ground energy escaped the [E(κ2), E(κ1)] envelope.
#[derive(Clone, Copy, Debug)]
pub struct BoundViolation {
    pub realization: usize,
    pub energy: f64,
}

/// Ground energies of disorder realizations against the uniform-coupling
/// envelope E_G(κ2) ≤ E_G(realization) ≤ E_G(κ1).
#[derive(Clone, Debug)]
pub struct DisorderBoundsReport {
    pub n_total: usize,
    pub energies: Vec<f64>,
    /// Uniform-κ1 ground energy (upper envelope).
    pub upper: f64,
    /// Uniform-κ2 ground energy (lower envelope).
    pub lower: f64,
    pub violations: Vec<BoundViolation>,
}

/// Check the disorder envelope for every realization. Violations are data,
/// not errors.
pub fn disorder_energy_bounds(
    spec: &DisorderSpec,
    n_total: usize,
    base: &HamiltonianParams,
    topology: &KagomeTopology,
) -> Result<DisorderBoundsReport> {
    spec.validate()?;
    let basis = FockBasis::enumerate(n_total)?;
    let (k1, k2) = spec.interval;
    let uniform_energy = |kappa: f64| -> Result<f64> {
        let params = base.clone().with_couplings(topology.uniform_couplings(kappa));
        ed_ground_energy(&build_hamiltonian(&params, &basis, topology)?)
    };
    let upper = uniform_energy(k1)?;
    let lower = uniform_energy(k2)?;
    let energies: Vec<f64> = (0..spec.realizations)
        .into_par_iter()
        .map(|r| {
            let couplings = sample_couplings(spec, topology, r)?;
            let params = base.clone().with_couplings(couplings);
            ed_ground_energy(&build_hamiltonian(&params, &basis, topology)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = base.energy_scale();
    let slack = 1e-10 * scale;
    let violations = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e < lower - slack || e > upper + slack)
        .map(|(r, &e)| BoundViolation { realization: r, energy: e })
        .collect();
    Ok(DisorderBoundsReport { n_total, energies, upper, lower, violations })
}

/// Which knob a sector scan sweeps.
#[derive(Clone, Debug)]
pub enum ScanAxis {
    /// Chemical potential values, J (uniform κ fixed by `params`).
    Mu(Vec<f64>),
    /// Uniform coupling values, J (μ fixed by `params`).
    Kappa(Vec<f64>),
}

/// One grid point of a sector scan.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    /// The swept value (μ or κ, J).
    pub value: f64,
    /// E_G(N) for N = 0..=n_max.
    pub sector_energies: Vec<f64>,
    /// E_G(N) − μN for N = 0..=n_max.
    pub grand_energies: Vec<f64>,
    /// Sector minimizing the grand energy; ties resolve to the smaller N.
    pub n_star: usize,
    /// Whether the minimum was degenerate at this point.
    pub tie: bool,
}

/// A maximal run of grid points sharing one selected sector.
#[derive(Clone, Copy, Debug)]
pub struct SectorWindow {
    pub n_star: usize,
    pub start: f64,
    pub end: f64,
}

impl SectorWindow {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Result of a fixed-N window scan over μ or κ.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub windows: Vec<SectorWindow>,
}

/// Scan sector selection N*(μ or κ) = argmin_N [E_G(N) − μN] for N ≤ n_max.
pub fn fixed_n_window_scan(
    axis: &ScanAxis,
    base: &HamiltonianParams,
    topology: &KagomeTopology,
    n_max: usize,
) -> Result<ScanResult> {
    let values = match axis {
        ScanAxis::Mu(v) | ScanAxis::Kappa(v) => v.clone(),
    };
    if values.is_empty() {
        return Err(Error::Argument("scan grid is empty".into()));
    }
    let bases: Vec<FockBasis> = (0..=n_max).map(FockBasis::enumerate).collect::<Result<Vec<_>>>()?;
    let scale = base.energy_scale();
    let tie_slack = 1e-12 * scale;
    let points: Vec<ScanPoint> = values
        .par_iter()
        .map(|&value| {
            let params = match axis {
                ScanAxis::Mu(_) => base.clone().with_mu(value),
                ScanAxis::Kappa(_) => base.clone().with_couplings(topology.uniform_couplings(value)),
            };
            // Sector energies are reported without the −μN shift; selection
            // applies it explicitly.
            let sector_params = params.clone().with_mu(0.0);
            let mut sector_energies = Vec::with_capacity(n_max + 1);
            for basis in &bases {
                let h = build_hamiltonian(&sector_params, basis, topology)?;
                sector_energies.push(ed_ground_energy(&h)?);
            }
            let grand_energies: Vec<f64> = sector_energies
                .iter()
                .enumerate()
                .map(|(n, e)| e - params.mu * n as f64)
                .collect();
            let mut n_star = 0usize;
            let mut tie = false;
            for (n, &g) in grand_energies.iter().enumerate().skip(1) {
                if g < grand_energies[n_star] - tie_slack {
                    n_star = n;
                } else if (g - grand_energies[n_star]).abs() <= tie_slack {
                    tie = true; // smaller N keeps the slot
                }
            }
            Ok(ScanPoint { value, sector_energies, grand_energies, n_star, tie })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut windows: Vec<SectorWindow> = Vec::new();
    for p in &points {
        match windows.last_mut() {
            Some(w) if w.n_star == p.n_star => w.end = p.value,
            _ => windows.push(SectorWindow { n_star: p.n_star, start: p.value, end: p.value }),
        }
    }
    Ok(ScanResult { points, windows })
}

/// Least-squares line fit with coefficient of determination.
#[derive(Clone, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Argument(format!("linear fit needs ≥ 2 paired points, got {}/{}", xs.len(), ys.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("linear fit over a degenerate x grid".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r_squared, residuals })
}

/// Chemical potential placed inside the truncation-induced window that makes
/// the d = N+1 grand ground state coincide with the fixed-N sector ground
/// state (see module docs of [`crate::peps`]).
///
/// Returns (μ, window width pen(N+1)). Fails when the window is closed
/// (κ = 0 collapses every penalty to zero).
pub fn sector_window_mu(
    n_target: usize,
    kappa: f64,
    base: &HamiltonianParams,
    topology: &KagomeTopology,
) -> Result<(f64, f64)> {
    if n_target == 0 {
        return Err(Error::Argument("sector targeting needs N ≥ 1".into()));
    }
    let params = base.clone().with_couplings(topology.uniform_couplings(kappa)).with_mu(0.0);
    let eps_min = crate::fock::single_photon_ground_energy(&params, topology, kappa)?;
    // Penalty of over-filling: E_G in the (N+m)-photon sector with per-site
    // occupancy capped at N, relative to the untruncated condensate line.
    let penalty = |extra: usize| -> Result<f64> {
        let m = n_target + extra;
        let basis = FockBasis::with_site_cap(m, n_target)?;
        let h = build_hamiltonian(&params, &basis, topology)?;
        Ok(ed_ground_energy(&h)? - m as f64 * eps_min)
    };
    let pen1 = penalty(1)?;
    let mut delta_max = pen1;
    if n_target + 2 <= crate::fock::MAX_SECTOR_N {
        delta_max = delta_max.min(penalty(2)? / 2.0);
    }
    if !(delta_max > 0.0) {
        return Err(Error::Config(format!(
            "sector window for N = {n_target} is closed (penalty {delta_max:.3e} J); need κ > 0"
        )));
    }
    Ok((eps_min + 0.4 * delta_max, pen1))
}
