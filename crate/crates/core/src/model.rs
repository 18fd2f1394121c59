//! Scarf II parameters, the `(k, m)` lattice of Hamiltonians and the
//! closed-form bound spectrum.
//!
//! With `γ` the hyperbolic scale, the lattice member `(k, m)` has
//! `α_eff = α + iγk`, `β_eff = β + γm` and potential
//!
//! ```text
//! V(x) = (α_eff² − β_eff² + γ²/4 + 2 α_eff β_eff sinh γx) / cosh² γx
//! ```
//!
//! At `γ = 2` this is `(α² − β² + 1 + 2αβ sinh 2x)/cosh² 2x`. The
//! `(A, B, γ)` form `(B² − (A+γ/2)² + γ²/4 + 2B(A+γ/2) sinh γx)/cosh² γx`
//! is the same family with `α = B`, `β = A + γ/2`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::GridFunction;
use num_complex::Complex64 as C64;
use serde::Serialize;

pub const DEFAULT_GAMMA: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaseParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BaseParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        BaseParams { alpha, beta, gamma: DEFAULT_GAMMA }
    }

    pub fn with_gamma(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        Ok(BaseParams { alpha, beta, gamma })
    }

    pub fn label(self, k: i64, m: i64) -> LatticeLabel {
        LatticeLabel { base: self, k, m }
    }

    /// The real Hamiltonian at the lattice origin.
    pub fn origin(self) -> LatticeLabel {
        self.label(0, 0)
    }
}

/// A node `H_{α+iγk, β+γm}` of the Hamiltonian lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeLabel {
    pub base: BaseParams,
    pub k: i64,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams {
    pub alpha: C64,
    pub beta: f64,
    pub gamma: f64,
}

impl LatticeLabel {
    pub fn effective(&self) -> EffectiveParams {
        let g = self.base.gamma;
        EffectiveParams {
            alpha: C64::new(self.base.alpha, g * self.k as f64),
            beta: self.base.beta + g * self.m as f64,
            gamma: g,
        }
    }

    pub fn shifted(&self, dk: i64, dm: i64) -> LatticeLabel {
        LatticeLabel { base: self.base, k: self.k + dk, m: self.m + dm }
    }

    pub fn gamma(&self) -> f64 {
        self.base.gamma
    }

    pub fn beta_eff(&self) -> f64 {
        self.effective().beta
    }

    pub fn alpha_eff(&self) -> C64 {
        self.effective().alpha
    }

    pub fn is_real(&self) -> bool {
        self.k == 0
    }

    /// The label with `(α, β) → (−α, −β)`; it carries the same potential.
    pub fn mirrored(&self) -> LatticeLabel {
        LatticeLabel {
            base: BaseParams { alpha: -self.base.alpha, beta: -self.base.beta, gamma: self.base.gamma },
            k: -self.k,
            m: -self.m,
        }
    }
}

impl EffectiveParams {
    /// `V` on a jet of `x`.
    pub fn potential_jet(&self, x: &Jet) -> Jet {
        let g = self.gamma;
        let u = x.scale(C64::new(g, 0.0));
        let sech = u.sech();
        let sinh = u.sinh();
        let a = self.alpha;
        let b = C64::new(self.beta, 0.0);
        let constant = a * a - b * b + g * g / 4.0;
        let numerator = sinh.scale(2.0 * a * b).add_scalar(constant);
        &(&numerator * &sech) * &sech
    }

    pub fn potential(&self, x: f64) -> C64 {
        let g = self.gamma;
        let (s, c) = ((g * x).sinh(), (g * x).cosh());
        let a = self.alpha;
        let b = C64::new(self.beta, 0.0);
        (a * a - b * b + g * g / 4.0 + 2.0 * a * b * s) / (c * c)
    }
}

pub fn potential_value(label: &LatticeLabel, x: f64) -> C64 {
    label.effective().potential(x)
}

/// Real and imaginary parts of `V` expanded with `α_eff = α + iγk`:
/// `Re = (α² − γ²k² − β_eff² + γ²/4 + 2αβ_eff sinh γx)/cosh² γx` and
/// `Im = (2γαk + 2γkβ_eff sinh γx)/cosh² γx`.
pub fn potential_split(label: &LatticeLabel, x: f64) -> (f64, f64) {
    let g = label.gamma();
    let a = label.base.alpha;
    let k = label.k as f64;
    let b = label.beta_eff();
    let (s, c) = ((g * x).sinh(), (g * x).cosh());
    let c2 = c * c;
    let re = (a * a - g * g * k * k - b * b + g * g / 4.0 + 2.0 * a * b * s) / c2;
    let im = (2.0 * g * a * k + 2.0 * g * k * b * s) / c2;
    (re, im)
}

/// `−f″ + V f`, exact when `f` carries two or more derivative channels.
pub fn apply_hamiltonian(label: &LatticeLabel, f: &GridFunction) -> GridFunction {
    let eff = label.effective();
    f.map_jets(2, |x, fj| {
        let order = fj.order().saturating_sub(2);
        let v = eff.potential_jet(&Jet::variable(x, order));
        let f2 = fj.derivative().derivative();
        &(&v * &fj.truncate(order)) - &f2
    })
}

/// Which side of the `β` line carries the bound states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `β_eff > γ/2`, lowest-bounded hierarchy.
    Right,
    /// `β_eff < −γ/2`, the mirrored hierarchy.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    pub energy: f64,
}

/// The side of a lattice member with bound states, if any.
pub fn bound_side(beta_eff: f64, gamma: f64) -> Option<Side> {
    if beta_eff - gamma / 2.0 > 0.0 {
        Some(Side::Right)
    } else if beta_eff + gamma / 2.0 < 0.0 {
        Some(Side::Left)
    } else {
        None
    }
}

/// Largest admissible excitation, enforcing `β − γ/2 − γn > 0` strictly.
pub fn n_max(beta_eff: f64, gamma: f64) -> Option<usize> {
    let kappa0 = match bound_side(beta_eff, gamma)? {
        Side::Right => beta_eff - gamma / 2.0,
        Side::Left => -beta_eff - gamma / 2.0,
    };
    let mut n = (kappa0 / gamma).floor() as usize;
    // integer boundary: κ = 0 is not a bound state
    if kappa0 - gamma * n as f64 <= 0.0 {
        n = n.checked_sub(1)?;
    }
    Some(n)
}

/// `−(β − γ/2 − γn)²` on the right, `−(β + γ/2 + γn)²` on the left.
pub fn level_energy(beta_eff: f64, gamma: f64, side: Side, n: usize) -> f64 {
    let kappa = match side {
        Side::Right => beta_eff - gamma / 2.0 - gamma * n as f64,
        Side::Left => beta_eff + gamma / 2.0 + gamma * n as f64,
    };
    -kappa * kappa
}

/// All bound levels, ascending in `n`; empty when `|β_eff| ≤ γ/2`. The
/// result depends on the lattice only through `β_eff`.
pub fn closed_form_spectrum(label: &LatticeLabel) -> Vec<Level> {
    let (b, g) = (label.beta_eff(), label.gamma());
    match (bound_side(b, g), n_max(b, g)) {
        (Some(side), Some(top)) => (0..=top)
            .map(|n| Level { n, energy: level_energy(b, g, side, n) })
            .collect(),
        _ => Vec::new(),
    }
}
