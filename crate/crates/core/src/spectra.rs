//! Finite-difference spectra for real lattice members, and Rayleigh
//! quotients and eigen-residuals for any member.
//!
//! Complex members are never diagonalized; their spectra are certified on
//! chain-built states.

use crate::algebra::{product, ProductKind};
use crate::error::{Error, Result};
use crate::model::{apply_hamiltonian, closed_form_spectrum, LatticeLabel};
use crate::numerics::{interior_norm, lowest_eigenvalues, Grid, TridiagonalSystem};
use crate::states::WaveFunction;
use num_complex::Complex64 as C64;
use serde::Serialize;

/// Default acceptance tolerance of the plain FD spectrum.
pub const FD_TOLERANCE: f64 = 1e-3;
/// Target of the Richardson-extrapolated spectrum.
pub const RICHARDSON_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ClosedForm,
    FiniteDifference,
    Richardson,
    Rayleigh,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralLevel {
    pub n: usize,
    pub energy: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub label: LatticeLabel,
    pub method: SpectrumMethod,
    pub levels: Vec<SpectralLevel>,
    pub grid: Option<Grid>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<C64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

pub fn closed_form_levels(label: &LatticeLabel) -> SpectrumResult {
    SpectrumResult {
        label: *label,
        method: SpectrumMethod::ClosedForm,
        levels: closed_form_spectrum(label)
            .into_iter()
            .map(|l| SpectralLevel { n: l.n, energy: C64::new(l.energy, 0.0) })
            .collect(),
        grid: None,
    }
}

fn fd_eigenvalues(label: &LatticeLabel, grid: &Grid, count: usize) -> Result<Vec<f64>> {
    if label.k != 0 {
        return Err(Error::ComplexMember(label.k));
    }
    let h = grid.spacing();
    let eff = label.effective();
    let diagonal: Vec<f64> = (1..grid.len() - 1).map(|i| 2.0 / (h * h) + eff.potential(grid.node(i)).re).collect();
    let off = vec![-1.0 / (h * h); diagonal.len() - 1];
    lowest_eigenvalues(&TridiagonalSystem::new(diagonal, off)?, count)
}

/// Lowest `count` eigenvalues of `−d²/dx² + V` with Dirichlet ends on the
/// interior nodes. Only real members (`k = 0`).
pub fn bound_spectrum_fd(label: &LatticeLabel, grid: &Grid, count: usize) -> Result<SpectrumResult> {
    let e = fd_eigenvalues(label, grid, count)?;
    Ok(SpectrumResult {
        label: *label,
        method: SpectrumMethod::FiniteDifference,
        levels: e.into_iter().enumerate().map(|(n, e)| SpectralLevel { n, energy: C64::new(e, 0.0) }).collect(),
        grid: Some(*grid),
    })
}

/// `(4E_{h/2} − E_h)/3` from the grid and its refinement.
pub fn bound_spectrum_richardson(label: &LatticeLabel, grid: &Grid, count: usize) -> Result<SpectrumResult> {
    let coarse = fd_eigenvalues(label, grid, count)?;
    let fine = fd_eigenvalues(label, &grid.refined(), count)?;
    Ok(SpectrumResult {
        label: *label,
        method: SpectrumMethod::Richardson,
        levels: coarse
            .iter()
            .zip(&fine)
            .enumerate()
            .map(|(n, (c, f))| SpectralLevel { n, energy: C64::new((4.0 * f - c) / 3.0, 0.0) })
            .collect(),
        grid: Some(*grid),
    })
}

/// `⟨w, Hw⟩ / ⟨w, w⟩` in the chosen product.
pub fn rayleigh_quotient(label: &LatticeLabel, w: &WaveFunction, kind: ProductKind) -> Result<C64> {
    let hw = apply_hamiltonian(label, &w.f);
    let den = product(&w.f, &w.f, kind)?;
    let herm = product(&w.f, &w.f, ProductKind::Hermitian)?.re;
    // negated so a NaN norm also counts as degenerate
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(den.norm() > 1e-14 * herm) {
        return Err(Error::DegenerateNorm(den.norm()));
    }
    Ok(product(&w.f, &hw, kind)? / den)
}

/// `‖Hw − Ew‖ / ‖w‖` over interior nodes.
pub fn eigen_residual(label: &LatticeLabel, w: &WaveFunction, energy: C64) -> f64 {
    let hw = apply_hamiltonian(label, &w.f);
    let r = hw.combine(C64::new(1.0, 0.0), &w.f, -energy).expect("same grid");
    interior_norm(&r) / interior_norm(&w.f)
}
