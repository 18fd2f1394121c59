//! The four first-order ladder families and residual checks of their
//! factorization, intertwining, adjointness and cross-commutation identities.
//!
//! With `u = γx` every operator has the form
//! `L f = ∓f′ + (c_sech·sech u + c_tanh·tanh u) f` and factorizes the
//! Hamiltonian as `H = L⁺L⁻ + μ`:
//!
//! | family | `c_sech` | `c_tanh`        | `μ`             |
//! |--------|----------|-----------------|-----------------|
//! | A      | `α`      | `β − γ/2`       | `−(β − γ/2)²`   |
//! | Ã      | `−α`     | `−β − γ/2`      | `−(β + γ/2)²`   |
//! | C      | `iβ`     | `−i(α − iγ/2)`  | `(α − iγ/2)²`   |
//! | C̃      | `−iβ`    | `i(α + iγ/2)`   | `(α + iγ/2)²`   |
//!
//! As operators `Ã± = −A∓` at `β + γ` and `C̃± = −C∓` at `α + iγ`, so the
//! tilde factorizations coincide with the shifted ones.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{apply_hamiltonian, EffectiveParams, LatticeLabel};
use crate::numerics::{integrate, interior_inner, interior_max, interior_norm, GridFunction};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Relative tolerance for exact operator identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Relative tolerance for integration-by-parts (adjointness) checks.
pub const ADJOINT_TOLERANCE: f64 = 1e-9;
/// Allowed spread of a measured multiplicative constant.
pub const CONSTANCY_TOLERANCE: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    ATilde,
    C,
    CTilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Plus,
    Minus,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Family::A),
            "A_tilde" => Ok(Family::ATilde),
            "C" => Ok(Family::C),
            "C_tilde" => Ok(Family::CTilde),
            other => Err(Error::InvalidArgument(format!("unknown ladder family {other:?}"))),
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Direction::Plus),
            "minus" | "-" => Ok(Direction::Minus),
            other => Err(Error::InvalidArgument(format!("unknown ladder direction {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::ATilde => "A_tilde",
            Family::C => "C",
            Family::CTilde => "C_tilde",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderOperator {
    /// Coefficient of `d/dx`: −1 for raising (`+`), +1 for lowering (`−`).
    pub derivative_coefficient: f64,
    pub c_sech: C64,
    pub c_tanh: C64,
    pub gamma: f64,
    pub family: Family,
    pub direction: Direction,
    /// Factorization energy.
    pub mu: C64,
}

pub fn make_ladder(family: Family, direction: Direction, params: &EffectiveParams) -> LadderOperator {
    let EffectiveParams { alpha, beta, gamma } = *params;
    let half = gamma / 2.0;
    let (c_sech, c_tanh) = match family {
        Family::A => (alpha, C64::new(beta - half, 0.0)),
        Family::ATilde => (-alpha, C64::new(-beta - half, 0.0)),
        Family::C => (I * beta, -I * (alpha - I * half)),
        Family::CTilde => (-I * beta, I * (alpha + I * half)),
    };
    let mu = match family {
        Family::A | Family::ATilde => -c_tanh * c_tanh,
        Family::C => (alpha - I * half).powi(2),
        Family::CTilde => (alpha + I * half).powi(2),
    };
    let derivative_coefficient = match direction {
        Direction::Plus => -1.0,
        Direction::Minus => 1.0,
    };
    LadderOperator { derivative_coefficient, c_sech, c_tanh, gamma, family, direction, mu }
}

/// Ladder operator attached to a lattice node.
pub fn ladder(label: &LatticeLabel, family: Family, direction: Direction) -> LadderOperator {
    make_ladder(family, direction, &label.effective())
}

impl LadderOperator {
    /// The multiplicative part `c_sech·sech γx + c_tanh·tanh γx` on a jet.
    pub fn superpotential_jet(&self, x: &Jet) -> Jet {
        let u = x.scale(C64::new(self.gamma, 0.0));
        &u.sech().scale(self.c_sech) + &u.tanh().scale(self.c_tanh)
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        f.map_jets(1, |x, fj| {
            let order = fj.order().saturating_sub(1);
            let w = self.superpotential_jet(&Jet::variable(x, order));
            &(&w * &fj.truncate(order)) + &fj.derivative().scale(C64::new(self.derivative_coefficient, 0.0))
        })
    }

    /// Same derivative part, complex-conjugated coefficients.
    pub fn conjugated(&self) -> LadderOperator {
        LadderOperator { c_sech: self.c_sech.conj(), c_tanh: self.c_tanh.conj(), mu: self.mu.conj(), ..*self }
    }
}

pub fn apply_ladder(op: &LadderOperator, f: &GridFunction) -> GridFunction {
    op.apply(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity_name: String,
    pub max_pointwise_residual: f64,
    pub relative_residual: f64,
    pub pass: bool,
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn new(identity_name: impl Into<String>, max_pointwise_residual: f64, relative_residual: f64, tolerance: f64) -> Self {
        ResidualReport {
            identity_name: identity_name.into(),
            max_pointwise_residual,
            relative_residual,
            pass: relative_residual <= tolerance,
            tolerance,
        }
    }

    /// `residual` measured against a composite scale.
    pub fn from_residual(identity_name: impl Into<String>, residual: &GridFunction, scale: f64, tolerance: f64) -> Self {
        let rel = if scale > 0.0 { interior_norm(residual) / scale } else { interior_norm(residual) };
        ResidualReport::new(identity_name, interior_max(residual), rel, tolerance)
    }

    pub fn judged(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.relative_residual <= tolerance;
        self
    }
}

/// `‖f‖ + ‖Hf‖`, the scale all operator residuals are measured against.
pub fn composite_scale(label: &LatticeLabel, f: &GridFunction) -> f64 {
    interior_norm(f) + interior_norm(&apply_hamiltonian(label, f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorizationVariant {
    /// `H = A⁺_β A⁻_β + μ_β`
    ALower,
    /// `H = A⁻_{β+γ} A⁺_{β+γ} + μ_{β+γ}`
    AUpper,
    /// `H = C⁺_α C⁻_α + μ_α`
    CLower,
    /// `H = C⁻_{α+iγ} C⁺_{α+iγ} + μ_{α+iγ}`
    CUpper,
}

impl FactorizationVariant {
    pub const ALL: [FactorizationVariant; 4] = [Self::ALower, Self::AUpper, Self::CLower, Self::CUpper];

    pub fn name(&self) -> &'static str {
        match self {
            Self::ALower => "A_lower",
            Self::AUpper => "A_upper",
            Self::CLower => "C_lower",
            Self::CUpper => "C_upper",
        }
    }

    /// `(outer, inner)` with `H = outer·inner + inner.mu`.
    pub fn operators(&self, label: &LatticeLabel) -> (LadderOperator, LadderOperator) {
        use Direction::*;
        match self {
            Self::ALower => (ladder(label, Family::A, Plus), ladder(label, Family::A, Minus)),
            Self::AUpper => {
                let up = label.shifted(0, 1);
                (ladder(&up, Family::A, Minus), ladder(&up, Family::A, Plus))
            }
            Self::CLower => (ladder(label, Family::C, Plus), ladder(label, Family::C, Minus)),
            Self::CUpper => {
                let up = label.shifted(1, 0);
                (ladder(&up, Family::C, Minus), ladder(&up, Family::C, Plus))
            }
        }
    }
}

/// Residual of `(outer·inner + μ − H) f`.
pub fn composition_residual(
    name: &str,
    label: &LatticeLabel,
    outer: &LadderOperator,
    inner: &LadderOperator,
    mu: C64,
    f: &GridFunction,
) -> ResidualReport {
    let composed = outer.apply(&inner.apply(f));
    let lhs = composed.combine(C64::new(1.0, 0.0), f, mu).expect("same grid");
    let r = lhs.sub(&apply_hamiltonian(label, f)).expect("same grid");
    ResidualReport::from_residual(name, &r, composite_scale(label, f), IDENTITY_TOLERANCE)
}

pub fn factorization_residual(label: &LatticeLabel, variant: FactorizationVariant, f: &GridFunction) -> ResidualReport {
    let (outer, inner) = variant.operators(label);
    composition_residual(&format!("factorization.{}", variant.name()), label, &outer, &inner, inner.mu, f)
}

/// Residual of `(L·H_from − H_to·L) f`.
pub fn intertwining_residual_between(
    name: &str,
    op: &LadderOperator,
    from: &LatticeLabel,
    to: &LatticeLabel,
    f: &GridFunction,
) -> ResidualReport {
    let left = op.apply(&apply_hamiltonian(from, f));
    let right = apply_hamiltonian(to, &op.apply(f));
    let r = left.sub(&right).expect("same grid");
    ResidualReport::from_residual(name, &r, composite_scale(from, f), IDENTITY_TOLERANCE)
}

/// `A⁻_{α,β} H_{α,β} = H_{α,β−γ} A⁻_{α,β}` or `C⁻_{α,β} H_{α,β} = H_{α−iγ,β} C⁻_{α,β}`.
pub fn intertwining_residual(label: &LatticeLabel, family: Family, f: &GridFunction) -> Result<ResidualReport> {
    let (to, name) = match family {
        Family::A => (label.shifted(0, -1), "intertwining.A"),
        Family::C => (label.shifted(-1, 0), "intertwining.C"),
        other => return Err(Error::InvalidArgument(format!("intertwining is checked for A or C, got {other}"))),
    };
    let op = ladder(label, family, Direction::Minus);
    Ok(intertwining_residual_between(name, &op, label, &to, f))
}

/// A constant `c` with `r ≈ c f`, fitted by least squares, and the relative
/// spread of `r − c f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredConstant {
    pub value: C64,
    pub spread: f64,
}

pub fn measure_constant(r: &GridFunction, f: &GridFunction, scale: f64, tolerance: f64) -> Result<MeasuredConstant> {
    let ff = interior_inner(f, f)?;
    if ff.norm() == 0.0 {
        return Err(Error::DegenerateNorm(0.0));
    }
    let value = interior_inner(f, r)? / ff;
    let spread = interior_norm(&r.combine(C64::new(1.0, 0.0), f, -value)?) / scale;
    if spread > tolerance {
        return Err(Error::NonConstant { spread, tolerance });
    }
    Ok(MeasuredConstant { value, spread })
}

/// `(L⁺L⁻ − L⁻_shift L⁺_shift) f / f`: `μ_{β+γ} − μ_β = −2γβ` for A,
/// `μ_{α+iγ} − μ_α = 2iγα` for C.
pub fn factorization_gap_constant(label: &LatticeLabel, family: Family, f: &GridFunction) -> Result<MeasuredConstant> {
    let (lower, upper) = match family {
        Family::A => (FactorizationVariant::ALower, FactorizationVariant::AUpper),
        Family::C => (FactorizationVariant::CLower, FactorizationVariant::CUpper),
        other => return Err(Error::InvalidArgument(format!("gap constant is defined for A or C, got {other}"))),
    };
    let (o1, i1) = lower.operators(label);
    let (o2, i2) = upper.operators(label);
    let r = o1.apply(&i1.apply(f)).sub(&o2.apply(&i2.apply(f)))?;
    measure_constant(&r, f, composite_scale(label, f), CONSTANCY_TOLERANCE)
}

/// The four commuting squares of real and complex moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossPairing {
    MinusMinus,
    PlusMinus,
    MinusPlus,
    PlusPlus,
}

impl CrossPairing {
    pub const ALL: [CrossPairing; 4] = [Self::MinusMinus, Self::PlusMinus, Self::MinusPlus, Self::PlusPlus];

    pub fn name(&self) -> &'static str {
        match self {
            Self::MinusMinus => "A-C-",
            Self::PlusMinus => "A+C-",
            Self::MinusPlus => "A-C+",
            Self::PlusPlus => "A+C+",
        }
    }

    /// `(a_first, c_after, c_first, a_after)`: the paths `c_after·a_first`
    /// and `a_after·c_first` both map `H_label` to the same target.
    pub fn operators(&self, label: &LatticeLabel) -> [LadderOperator; 4] {
        use Direction::*;
        let (dm, a_dir) = match self {
            Self::MinusMinus | Self::MinusPlus => (-1, Minus),
            Self::PlusMinus | Self::PlusPlus => (1, Plus),
        };
        let (dk, c_dir) = match self {
            Self::MinusMinus | Self::PlusMinus => (-1, Minus),
            Self::MinusPlus | Self::PlusPlus => (1, Plus),
        };
        // A⁻ is attached to its source, A⁺ to its target; same for C.
        let a_node = |l: &LatticeLabel| if dm < 0 { *l } else { l.shifted(0, 1) };
        let c_node = |l: &LatticeLabel| if dk < 0 { *l } else { l.shifted(1, 0) };
        let a_first = ladder(&a_node(label), Family::A, a_dir);
        let c_after = ladder(&c_node(&label.shifted(0, dm)), Family::C, c_dir);
        let c_first = ladder(&c_node(label), Family::C, c_dir);
        let a_after = ladder(&a_node(&label.shifted(dk, 0)), Family::A, a_dir);
        [a_first, c_after, c_first, a_after]
    }
}

/// Residuals of `C·A − A·C` along all four commuting squares at `label`.
pub fn cross_commutation_residual(label: &LatticeLabel, f: &GridFunction) -> Vec<ResidualReport> {
    let scale = composite_scale(label, f);
    CrossPairing::ALL
        .iter()
        .map(|p| {
            let [a_first, c_after, c_first, a_after] = p.operators(label);
            let r = c_after
                .apply(&a_first.apply(f))
                .sub(&a_after.apply(&c_first.apply(f)))
                .expect("same grid");
            ResidualReport::from_residual(format!("cross_commutation.{}", p.name()), &r, scale, IDENTITY_TOLERANCE)
        })
        .collect()
}

/// `|⟨L⁺f, g⟩ − ⟨f, partner·g⟩|` relative to `‖L⁺f‖‖g‖ + ‖f‖‖partner·g‖`.
pub fn adjoint_pair_residual(
    name: &str,
    plus: &LadderOperator,
    partner: &LadderOperator,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<ResidualReport> {
    let pf = plus.apply(f);
    let qg = partner.apply(g);
    let herm = |u: &GridFunction, v: &GridFunction| -> Result<C64> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        let prod: Vec<C64> = u.values().iter().zip(v.values()).map(|(a, b)| a.conj() * b).collect();
        Ok(integrate(&GridFunction::new(*u.grid(), prod)?))
    };
    let lhs = herm(&pf, g)?;
    let rhs = herm(f, &qg)?;
    let norm = |u: &GridFunction| herm(u, u).map(|v| v.re.max(0.0).sqrt());
    let scale = norm(&pf)? * norm(g)? + norm(f)? * norm(&qg)?;
    let diff = (lhs - rhs).norm();
    Ok(ResidualReport::new(name, diff, diff / scale, ADJOINT_TOLERANCE))
}

/// `(L⁺)† = (L⁻)*`: the adjoint of the raising operator is the lowering
/// operator with conjugated coefficients. For real A this is `(A⁺)† = A⁻`.
pub fn adjoint_relation_residual(
    label: &LatticeLabel,
    family: Family,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<ResidualReport> {
    let plus = ladder(label, family, Direction::Plus);
    let partner = ladder(label, family, Direction::Minus).conjugated();
    adjoint_pair_residual(&format!("adjoint.{family}"), &plus, &partner, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BaseParams;
    use crate::numerics::Grid;

    fn grid() -> Grid {
        Grid::symmetric(8.0, 2001).unwrap()
    }

    fn gaussian(order: usize) -> GridFunction {
        GridFunction::from_jets(grid(), order, |x| {
            let poly = &x.scale(C64::new(0.3, -0.2)).add_scalar(C64::new(1.0, 0.5)) * x;
            let g = (&x.add_scalar(C64::new(-0.4, 0.0)) * &x.add_scalar(C64::new(-0.4, 0.0)))
                .scale(C64::new(-0.8, 0.0))
            .exp();
            &poly.add_scalar(C64::new(0.7, 0.0)) * &g
        })
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lowering_a_coefficients() {
        let p = BaseParams::new(3.0, 6.8).origin().effective();
        let op = make_ladder(Family::A, Direction::Minus, &p);
        assert_eq!(op.derivative_coefficient, 1.0);
        assert!(close(op.c_sech, C64::new(3.0, 0.0), 1e-15));
        assert!(close(op.c_tanh, C64::new(5.8, 0.0), 1e-15));
        assert!(close(op.mu, C64::new(-33.64, 0.0), 1e-12));
    }

    #[test]
    fn lowering_c_coefficients() {
        let p = BaseParams::new(3.0, 6.8).origin().effective();
        let op = make_ladder(Family::C, Direction::Minus, &p);
        assert!(close(op.c_sech, C64::new(0.0, 6.8), 1e-15));
        // −i(3 − i) = −1 − 3i
        assert!(close(op.c_tanh, C64::new(-1.0, -3.0), 1e-15));
        assert!(close(op.mu, C64::new(8.0, -6.0), 1e-12));
    }

    #[test]
    fn tilde_operators_are_negated_shifted_ladders() {
        let label = BaseParams::new(1.7, 4.2).label(1, 0);
        let p = label.effective();
        let up_beta = label.shifted(0, 1);
        let up_alpha = label.shifted(1, 0);
        for (tilde, plain, at) in [(Family::ATilde, Family::A, up_beta), (Family::CTilde, Family::C, up_alpha)] {
            let tp = make_ladder(tilde, Direction::Plus, &p);
            let sm = ladder(&at, plain, Direction::Minus);
            assert_eq!(tp.derivative_coefficient, -sm.derivative_coefficient);
            assert!(close(tp.c_sech, -sm.c_sech, 1e-14));
            assert!(close(tp.c_tanh, -sm.c_tanh, 1e-14));
            assert!(close(tp.mu, sm.mu, 1e-12));
        }
    }

    #[test]
    fn tilde_factorization_reproduces_hamiltonian() {
        let label = BaseParams::new(3.0, 6.8).origin();
        let f = gaussian(4);
        for fam in [Family::ATilde, Family::CTilde] {
            let p = ladder(&label, fam, Direction::Plus);
            let m = ladder(&label, fam, Direction::Minus);
            let r = composition_residual("tilde", &label, &p, &m, m.mu, &f);
            assert!(r.pass, "{fam}: {:?}", r);
        }
    }

    #[test]
    fn family_tags_parse() {
        assert_eq!("A_tilde".parse::<Family>().unwrap(), Family::ATilde);
        assert_eq!("minus".parse::<Direction>().unwrap(), Direction::Minus);
        assert!("B".parse::<Family>().is_err());
        assert!("up".parse::<Direction>().is_err());
    }

    #[test]
    fn factorizations_hold_on_gaussian() {
        let label = BaseParams::new(3.0, 6.8).origin();
        let f = gaussian(4);
        for v in FactorizationVariant::ALL {
            let r = factorization_residual(&label, v, &f);
            assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn wrong_mu_is_detected() {
        let label = BaseParams::new(3.0, 6.8).origin();
        let f = gaussian(4);
        let (outer, inner) = FactorizationVariant::ALower.operators(&label);
        let r = composition_residual("off", &label, &outer, &inner, inner.mu + 1.0, &f);
        assert!(!r.pass);
        assert!(r.relative_residual > 1e-3);
    }

    #[test]
    fn intertwining_and_wrong_target() {
        let label = BaseParams::new(3.0, 6.8).label(1, -1);
        let f = gaussian(5);
        assert!(intertwining_residual(&label, Family::A, &f).unwrap().pass);
        assert!(intertwining_residual(&label, Family::C, &f).unwrap().pass);
        let op = ladder(&label, Family::C, Direction::Minus);
        let bad = intertwining_residual_between("wrong", &op, &label, &label, &f);
        assert!(!bad.pass && bad.relative_residual > 1e-4);
        assert!(intertwining_residual(&label, Family::ATilde, &f).is_err());
    }

    #[test]
    fn gap_constants() {
        let f = gaussian(4);
        let label = BaseParams::new(3.0, 6.8).origin();
        let a = factorization_gap_constant(&label, Family::A, &f).unwrap();
        assert!(close(a.value, C64::new(-27.2, 0.0), 1e-9), "{:?}", a);
        let c = factorization_gap_constant(&label, Family::C, &f).unwrap();
        assert!(close(c.value, C64::new(0.0, 12.0), 1e-9), "{:?}", c);
        let zero = factorization_gap_constant(&BaseParams::new(3.0, 0.0).origin(), Family::A, &f).unwrap();
        assert!(zero.value.norm() < 1e-9);
    }

    #[test]
    fn cross_commutators_vanish_including_alpha_zero() {
        let f = gaussian(4);
        for base in [BaseParams::new(3.0, 6.8), BaseParams::new(0.0, 6.8), BaseParams::new(-1.3, 2.2)] {
            for r in cross_commutation_residual(&base.label(1, 0), &f) {
                assert!(r.pass, "{:?}", r);
            }
        }
    }

    #[test]
    fn adjointness_distinguishes_dagger_from_star() {
        let label = BaseParams::new(3.0, 6.8).origin();
        let f = gaussian(2);
        let g = GridFunction::from_jets(grid(), 2, |x| (x * x).scale(C64::new(-1.2, 0.0)).exp().scale(C64::new(0.5, 1.0)));
        assert!(adjoint_relation_residual(&label, Family::A, &f, &g).unwrap().pass);
        assert!(adjoint_relation_residual(&label, Family::C, &f, &g).unwrap().pass);
        let naive = adjoint_pair_residual(
            "naive",
            &ladder(&label, Family::C, Direction::Plus),
            &ladder(&label, Family::C, Direction::Minus),
            &f,
            &g,
        )
        .unwrap();
        assert!(!naive.pass && naive.relative_residual > 1e-3, "{:?}", naive);
    }

    #[test]
    fn general_gamma_factorizes() {
        let label = BaseParams::with_gamma(1.4, 2.9, 1.0).unwrap().label(-1, 1);
        let f = gaussian(5);
        for v in FactorizationVariant::ALL {
            assert!(factorization_residual(&label, v, &f).pass);
        }
        let a = factorization_gap_constant(&label, Family::A, &f).unwrap();
        // −2γβ_eff
        assert!(close(a.value, C64::new(-2.0 * 3.9, 0.0), 1e-9));
        for r in cross_commutation_residual(&label, &f) {
            assert!(r.pass, "{:?}", r);
        }
    }
}
