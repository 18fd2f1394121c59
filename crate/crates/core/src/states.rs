//! Bound states of the hierarchy: closed forms, ladder-built chains, the
//! complex-hierarchy states, and the non-normalizable zero modes of the
//! complex ladders.
//!
//! Closed-form states at `u = γx`, with `s = β/γ − ½` and `λ = α/γ`:
//!
//! ```text
//! ψⁿ(x) = iⁿ (cosh u)^(−s) e^(−λ gd u) P_n^(−iλ−s−½, iλ−s−½)(i sinh u)
//! ```
//!
//! Normalization convention: unit Hermitian norm, then the phase that makes
//! the sample of largest modulus real and positive.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{bound_side, level_energy, n_max, BaseParams, EffectiveParams, LatticeLabel, Side};
use crate::numerics::{integrate, trapezoid, Grid, GridFunction};
use crate::operators::{ladder, Direction, Family};
use num_complex::Complex64 as C64;
use serde::Serialize;

/// Exact derivative channels left on every constructed state.
pub const JET_HEADROOM: usize = 8;
/// Allowed relative change of the L² norm when the domain shrinks by 25%.
pub const SQUARE_INTEGRABLE_TOLERANCE: f64 = 1e-6;
/// Boundary-to-peak modulus above which normalization is domain-limited.
const TAIL_WARNING: f64 = 1e-3;
const JACOBI_GUARD: f64 = 1e-12;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Unnormalized,
    HermitianUnit,
    BilinearUnit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateLabel {
    pub lattice: LatticeLabel,
    pub n: usize,
    pub side: Side,
}

impl StateLabel {
    /// Checks `β_eff − γ/2 − γn > 0` (right) or `β_eff + γ/2 + γn < 0` (left).
    pub fn new(lattice: LatticeLabel, n: usize, side: Side) -> Result<Self> {
        let (b, g) = (lattice.beta_eff(), lattice.gamma());
        if bound_side(b, g) != Some(side) {
            return Err(Error::Domain(format!("beta_eff = {b} has no {side:?} bound states")));
        }
        let top = n_max(b, g);
        if top.is_none_or(|t| n > t) {
            return Err(Error::LevelOutOfRange { n, n_max: top, beta: b });
        }
        Ok(StateLabel { lattice, n, side })
    }

    pub fn energy(&self) -> f64 {
        level_energy(self.lattice.beta_eff(), self.lattice.gamma(), self.side, self.n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub label: StateLabel,
    pub f: GridFunction,
    pub energy: f64,
    pub norm_kind: NormKind,
}

impl WaveFunction {
    pub fn unnormalized(label: StateLabel, f: GridFunction) -> Self {
        WaveFunction { energy: label.energy(), label, f, norm_kind: NormKind::Unnormalized }
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZeroModeKind {
    /// Solution of `C⁻_{α,β} φ = 0`.
    CMinusKernel,
    /// Solution of `C⁺_{α+iγ,β} φ = 0`.
    CPlusKernel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroMode {
    pub lattice: LatticeLabel,
    pub which: ZeroModeKind,
    pub f: GridFunction,
}

/// `gd x = 2 arctan(tanh(x/2))`.
pub fn gudermannian(x: f64) -> f64 {
    2.0 * (0.5 * x).tanh().atan()
}

/// Power-basis coefficients of `P_n^(a,b)` from the three-term recurrence
/// `2n(n+a+b)(2n+a+b−2) P_n = (2n+a+b−1)[(2n+a+b)(2n+a+b−2) z + a² − b²] P_{n−1}
///  − 2(n+a−1)(n+b−1)(2n+a+b) P_{n−2}`.
pub fn jacobi_coefficients(n: usize, a: C64, b: C64) -> Result<Vec<C64>> {
    let one = C64::new(1.0, 0.0);
    let mut prev = vec![one];
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = vec![(a - b) / 2.0, (a + b + 2.0) / 2.0];
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let den = 2.0 * kf * (kf + a + b) * (s - 2.0);
        if den.norm() < JACOBI_GUARD {
            return Err(Error::InvalidArgument(format!(
                "Jacobi recurrence denominator vanishes at degree {k} for a = {a}, b = {b}"
            )));
        }
        let lin = (s - 1.0) * s * (s - 2.0);
        let cst = (s - 1.0) * (a * a - b * b);
        let back = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let mut next = vec![C64::new(0.0, 0.0); k + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j] += cst * c;
            next[j + 1] += lin * c;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= back * c;
        }
        for c in next.iter_mut() {
            *c /= den;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `P_n^(a,b)(z)` by the three-term recurrence, for complex indices and
/// argument.
pub fn jacobi_polynomial(n: usize, a: C64, b: C64, z: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return Ok(one);
    }
    let mut prev = one;
    let mut cur = (a - b) / 2.0 + (a + b + 2.0) * z / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let den = 2.0 * kf * (kf + a + b) * (s - 2.0);
        if den.norm() < JACOBI_GUARD {
            return Err(Error::InvalidArgument(format!(
                "Jacobi recurrence denominator vanishes at degree {k} for a = {a}, b = {b}"
            )));
        }
        let next = ((s - 1.0) * (s * (s - 2.0) * z + a * a - b * b) * cur
            - 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s * prev)
            / den;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn horner(coeffs: &[C64], z: &Jet) -> Jet {
    let mut acc = Jet::constant(coeffs[coeffs.len() - 1], z.order());
    for c in coeffs.iter().rev().skip(1) {
        acc = (&acc * z).add_scalar(*c);
    }
    acc
}

/// Closed-form right-hierarchy state on a jet of `x`.
fn closed_form_jet(eff: &EffectiveParams, n: usize, coeffs: &[C64], x: &Jet) -> Jet {
    let g = eff.gamma;
    let s = eff.beta / g - 0.5;
    let lambda = eff.alpha / g;
    let u = x.scale(C64::new(g, 0.0));
    let log_env = &u.cosh().ln().scale(C64::new(-s, 0.0)) - &u.gd().scale(lambda);
    let z = u.sinh().scale(I);
    (&log_env.exp() * &horner(coeffs, &z)).scale(I.powu(n as u32))
}

/// `(a, b) = (−iλ − s − ½, iλ − s − ½)`. This ordering pairs with the
/// `e^(−λ gd u)` envelope; the opposite ordering does not solve the equation.
fn jacobi_indices(eff: &EffectiveParams) -> (C64, C64) {
    let s = eff.beta / eff.gamma - 0.5;
    let lambda = eff.alpha / eff.gamma;
    (-I * lambda - s - 0.5, I * lambda - s - 0.5)
}

fn warn_if_flat(f: &GridFunction, what: &str) {
    let v = f.values();
    if v.is_empty() {
        return;
    }
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let edge = v[0].norm().max(v[v.len() - 1].norm());
    if peak > 0.0 && edge / peak > TAIL_WARNING {
        log::warn!(
            "{what}: boundary modulus is {:.3e} of the peak; widen the domain for accurate normalization",
            edge / peak
        );
    }
}

fn right_ground_raw(lattice: &LatticeLabel, grid: Grid, order: usize) -> Result<WaveFunction> {
    let label = StateLabel::new(*lattice, 0, Side::Right)?;
    let eff = lattice.effective();
    let g = eff.gamma;
    let decay = C64::new(-(eff.beta - g / 2.0) / g, 0.0);
    let twist = -eff.alpha / g;
    let f = GridFunction::from_jets(grid, order, |x| {
        let u = x.scale(C64::new(g, 0.0));
        (&u.cosh().ln().scale(decay) + &u.gd().scale(twist)).exp()
    });
    Ok(WaveFunction::unnormalized(label, f))
}

fn left_ground_raw(lattice: &LatticeLabel, grid: Grid, order: usize) -> Result<WaveFunction> {
    let label = StateLabel::new(*lattice, 0, Side::Left)?;
    let eff = lattice.effective();
    let g = eff.gamma;
    let decay = C64::new((eff.beta + g / 2.0) / g, 0.0);
    let twist = eff.alpha / g;
    let f = GridFunction::from_jets(grid, order, |x| {
        let u = x.scale(C64::new(g, 0.0));
        (&u.cosh().ln().scale(decay) + &u.gd().scale(twist)).exp()
    });
    Ok(WaveFunction::unnormalized(label, f))
}

fn closed_form_raw(lattice: &LatticeLabel, n: usize, grid: Grid, order: usize) -> Result<WaveFunction> {
    let label = StateLabel::new(*lattice, n, Side::Right)?;
    let eff = lattice.effective();
    let (a, b) = jacobi_indices(&eff);
    let coeffs = jacobi_coefficients(n, a, b)?;
    let f = GridFunction::from_jets(grid, order, |x| closed_form_jet(&eff, n, &coeffs, x));
    Ok(WaveFunction::unnormalized(label, f))
}

/// Ground state `e^(−(α/γ) gd γx) (cosh γx)^(−(β−γ/2)/γ)` annihilated by
/// `A⁻_{α,β}`, with energy `μ_β`. Complex `α_eff` is allowed.
pub fn ground_state(lattice: &LatticeLabel, grid: &Grid) -> Result<WaveFunction> {
    normalize(&right_ground_raw(lattice, *grid, JET_HEADROOM)?, NormKind::HermitianUnit)
}

/// Left ground state `e^((α/γ) gd γx) (cosh γx)^((β+γ/2)/γ)`, `β_eff < −γ/2`,
/// annihilated by `A⁺_{α,β+γ}`.
pub fn left_ground_state(lattice: &LatticeLabel, grid: &Grid) -> Result<WaveFunction> {
    normalize(&left_ground_raw(lattice, *grid, JET_HEADROOM)?, NormKind::HermitianUnit)
}

/// Jacobi closed form of the `n`-th right-hierarchy state.
pub fn excited_state_closed_form(lattice: &LatticeLabel, n: usize, grid: &Grid) -> Result<WaveFunction> {
    normalize(&closed_form_raw(lattice, n, *grid, JET_HEADROOM)?, NormKind::HermitianUnit)
}

fn ladder_chain_raw(lattice: &LatticeLabel, n: usize, grid: Grid, headroom: usize) -> Result<WaveFunction> {
    let side = bound_side(lattice.beta_eff(), lattice.gamma())
        .ok_or_else(|| Error::Domain(format!("beta_eff = {} has no bound states", lattice.beta_eff())))?;
    let label = StateLabel::new(*lattice, n, side)?;
    let order = n + headroom;
    let n_i = n as i64;
    let f = match side {
        Side::Right => {
            // A⁺_{β} ⋯ A⁺_{β−γn+γ} ψ⁰_{β−γn}
            let mut f = right_ground_raw(&lattice.shifted(0, -n_i), grid, order)?.f;
            for j in 1..=n_i {
                f = ladder(&lattice.shifted(0, j - n_i), Family::A, Direction::Plus).apply(&f);
            }
            f
        }
        Side::Left => {
            // A⁻_{β+γ} ⋯ A⁻_{β+γn} ψ̃⁰_{β+γn}
            let mut f = left_ground_raw(&lattice.shifted(0, n_i), grid, order)?.f;
            for j in (1..=n_i).rev() {
                f = ladder(&lattice.shifted(0, j), Family::A, Direction::Minus).apply(&f);
            }
            f
        }
    };
    Ok(WaveFunction::unnormalized(label, f))
}

/// The `n`-th state built by the real ladder chain from a ground state:
/// raising chain on the right side, lowering chain on the left side.
pub fn excited_state_ladder(lattice: &LatticeLabel, n: usize, grid: &Grid) -> Result<WaveFunction> {
    normalize(&ladder_chain_raw(lattice, n, *grid, JET_HEADROOM)?, NormKind::HermitianUnit)
}

/// State `n` of `H_{α+iγk, β}`, built from the real state of `H_{α,β}` by
/// `k` complex raising moves (`k > 0`, `C⁺`) or `|k|` lowering moves
/// (`k < 0`, `C⁻`). Its energy is the real `Eⁿ` for every `k`.
pub fn complex_state(base: &BaseParams, k: i64, n: usize, grid: &Grid) -> Result<WaveFunction> {
    let origin = base.origin();
    let headroom = k.unsigned_abs() as usize + JET_HEADROOM;
    let start = match bound_side(base.beta, base.gamma) {
        Some(Side::Right) => closed_form_raw(&origin, n, *grid, headroom)?,
        Some(Side::Left) => ladder_chain_raw(&origin, n, *grid, headroom)?,
        None => return Err(Error::Domain(format!("beta = {} has no bound states", base.beta))),
    };
    let mut f = start.f;
    if k > 0 {
        for j in 1..=k {
            f = ladder(&base.label(j, 0), Family::C, Direction::Plus).apply(&f);
        }
    } else {
        for j in 0..-k {
            f = ladder(&base.label(-j, 0), Family::C, Direction::Minus).apply(&f);
        }
    }
    let label = StateLabel::new(base.label(k, 0), n, start.label.side)?;
    normalize(&WaveFunction::unnormalized(label, f), NormKind::HermitianUnit)
}

/// Closed-form kernels of the complex ladders. Both grow like
/// `(cosh γx)^(1/2)` for real parameters.
pub fn zero_mode(lattice: &LatticeLabel, which: ZeroModeKind, grid: &Grid) -> ZeroMode {
    let eff = lattice.effective();
    let g = eff.gamma;
    let (phase, power) = match which {
        // C⁻_{α,β} φ = 0: φ = e^(−i(β/γ) gd u) (cosh u)^((iα + γ/2)/γ)
        ZeroModeKind::CMinusKernel => (-I * eff.beta / g, (I * eff.alpha + g / 2.0) / g),
        // C⁺_{α+iγ,β} φ = 0: φ = e^(i(β/γ) gd u) (cosh u)^((−iα + γ/2)/γ)
        ZeroModeKind::CPlusKernel => (I * eff.beta / g, (-I * eff.alpha + g / 2.0) / g),
    };
    let f = GridFunction::from_jets(*grid, JET_HEADROOM, |x| {
        let u = x.scale(C64::new(g, 0.0));
        (&u.gd().scale(phase) + &u.cosh().ln().scale(power)).exp()
    });
    ZeroMode { lattice: *lattice, which, f }
}

/// `|f|` decays towards both ends and the L² norm is stable when the domain
/// is cut by 25%.
pub fn square_integrable(f: &GridFunction) -> bool {
    square_integrable_with_tolerance(f, SQUARE_INTEGRABLE_TOLERANCE)
}

pub fn square_integrable_with_tolerance(f: &GridFunction, tolerance: f64) -> bool {
    let grid = f.grid();
    let v = f.values();
    let center = 0.5 * (grid.x_min() + grid.x_max());
    let half = 0.5 * (grid.x_max() - grid.x_min());
    let at = |x: f64| v[grid.nearest(x)].norm();
    let decays = at(grid.x_max()) < at(center + half / 2.0) && at(grid.x_min()) < at(center - half / 2.0);
    if !decays {
        return false;
    }
    let dens: Vec<C64> = v.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
    let full = trapezoid(&dens, grid.spacing()).re;
    let lo = grid.nearest(center - half / 1.25);
    let hi = grid.nearest(center + half / 1.25);
    let inner = trapezoid(&dens[lo..=hi], grid.spacing()).re;
    full.is_finite() && full > 0.0 && (full - inner).abs() <= tolerance * full
}

/// Rescales to the requested norm. Hermitian: `∫|f|² = 1`, then the sample
/// of largest modulus is made real and positive. Bilinear: `∫f² = 1` with
/// the principal square root, then the sign that makes the real part of the
/// largest sample non-negative.
pub fn normalize(w: &WaveFunction, kind: NormKind) -> Result<WaveFunction> {
    let f = &w.f;
    if kind != NormKind::Unnormalized {
        warn_if_flat(f, "state");
    }
    let herm2 = {
        let dens: Vec<C64> = f.values().iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
        trapezoid(&dens, f.grid().spacing()).re
    };
    if !(herm2 > 0.0 && herm2.is_finite()) {
        return Err(Error::DegenerateNorm(herm2));
    }
    let peak = f
        .values()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let scaled = match kind {
        NormKind::Unnormalized => f.clone(),
        NormKind::HermitianUnit => {
            let g = f.scale(C64::new(1.0 / herm2.sqrt(), 0.0));
            let p = g.values()[peak];
            g.scale(p.conj() / p.norm())
        }
        NormKind::BilinearUnit => {
            let bil = integrate(&GridFunction::new(*f.grid(), f.values().iter().map(|z| z * z).collect())?);
            if bil.norm() < JACOBI_GUARD * herm2 {
                return Err(Error::DegenerateNorm(bil.norm()));
            }
            let g = f.scale(1.0 / bil.sqrt());
            if g.values()[peak].re < 0.0 {
                g.scale(C64::new(-1.0, 0.0))
            } else {
                g
            }
        }
    };
    Ok(WaveFunction { label: w.label, f: scaled, energy: w.energy, norm_kind: kind })
}
