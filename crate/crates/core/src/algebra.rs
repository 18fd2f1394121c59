//! Products, the abstract ladder actions with lattice relabeling, and the
//! commutator, Casimir and norm relations of the real and complex algebras.
//!
//! The generators carry a factor `1/γ`:
//! `A⁻ = A⁻_{α,β}/γ`, `A⁺ = A⁺_{α,β+γ}/γ`, `A⁰ = β/γ`,
//! `C⁻ = C⁻_{α,β}/γ`, `C⁺ = C⁺_{α+iγ,β}/γ`, `C⁰ = α/γ`.

use crate::error::{Error, Result};
use crate::model::{BaseParams, LatticeLabel, Side};
use crate::numerics::{trapezoid, GridFunction};
use crate::operators::{
    composite_scale, ladder, measure_constant, CrossPairing, Direction, Family, LadderOperator, MeasuredConstant,
    ResidualReport, CONSTANCY_TOLERANCE,
};
use crate::states::{excited_state_closed_form, excited_state_ladder, NormKind, StateLabel, WaveFunction};
use crate::numerics::Grid;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Tolerance of the bilinear norm relation.
pub const NORM_RELATION_TOLERANCE: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    /// `∫ conj(f) g`
    Hermitian,
    /// `∫ f g`
    Bilinear,
}

/// Trapezoid value of `∫ conj(f) g` or `∫ f g`.
pub fn product(f: &GridFunction, g: &GridFunction, kind: ProductKind) -> Result<C64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let vals: Vec<C64> = match kind {
        ProductKind::Hermitian => f.values().iter().zip(g.values()).map(|(a, b)| a.conj() * b).collect(),
        ProductKind::Bilinear => f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect(),
    };
    Ok(trapezoid(&vals, f.grid().spacing()))
}

pub fn inner_product(f: &WaveFunction, g: &WaveFunction, kind: ProductKind) -> Result<C64> {
    product(&f.f, &g.f, kind)
}

/// `|⟨f,g⟩| / √(|⟨f,f⟩||⟨g,g⟩|)`.
pub fn normalized_overlap(f: &GridFunction, g: &GridFunction, kind: ProductKind) -> Result<f64> {
    let fg = product(f, g, kind)?;
    let ff = product(f, f, kind)?;
    let gg = product(g, g, kind)?;
    let den = (ff.norm() * gg.norm()).sqrt();
    if den == 0.0 {
        return Err(Error::DegenerateNorm(den));
    }
    Ok(fg.norm() / den)
}

/// `‖f − (⟨g,f⟩/⟨g,g⟩) g‖ / ‖f‖` in the Hermitian norm.
pub fn collinearity_residual(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let gg = product(g, g, ProductKind::Hermitian)?.re;
    if gg <= 0.0 {
        return Err(Error::DegenerateNorm(gg));
    }
    let c = product(g, f, ProductKind::Hermitian)? / gg;
    let r = f.combine(C64::new(1.0, 0.0), g, -c)?;
    let ff = product(f, f, ProductKind::Hermitian)?.re;
    if ff <= 0.0 {
        return Err(Error::DegenerateNorm(ff));
    }
    Ok((product(&r, &r, ProductKind::Hermitian)?.re.max(0.0) / ff).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    APlus,
    AMinus,
    AZero,
    CPlus,
    CMinus,
    CZero,
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "A_plus" => Self::APlus,
            "A_minus" => Self::AMinus,
            "A_zero" => Self::AZero,
            "C_plus" => Self::CPlus,
            "C_minus" => Self::CMinus,
            "C_zero" => Self::CZero,
            other => return Err(Error::InvalidArgument(format!("unknown generator {other:?}"))),
        })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::APlus => "A_plus",
            Self::AMinus => "A_minus",
            Self::AZero => "A_zero",
            Self::CPlus => "C_plus",
            Self::CMinus => "C_minus",
            Self::CZero => "C_zero",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledAction {
    pub generator: Generator,
    pub factor: C64,
}

impl LabeledAction {
    /// The generator with its standard `1/γ` factor.
    pub fn standard(generator: Generator, gamma: f64) -> Self {
        LabeledAction { generator, factor: C64::new(1.0 / gamma, 0.0) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ActionOutput {
    State(WaveFunction),
    /// The move leaves the bound-state window; the computed image (zero up
    /// to discretization) is returned as is.
    Annihilated(GridFunction),
}

impl ActionOutput {
    pub fn function(&self) -> &GridFunction {
        match self {
            ActionOutput::State(w) => &w.f,
            ActionOutput::Annihilated(f) => f,
        }
    }
}

/// Operator and target `(Δk, Δm, Δn)` of a shift generator on `label`.
fn shift_move(generator: Generator, label: &StateLabel) -> (LadderOperator, i64, i64, i64) {
    let l = &label.lattice;
    let right = label.side == Side::Right;
    match generator {
        Generator::AMinus => (ladder(l, Family::A, Direction::Minus), 0, -1, if right { -1 } else { 1 }),
        Generator::APlus => (ladder(&l.shifted(0, 1), Family::A, Direction::Plus), 0, 1, if right { 1 } else { -1 }),
        Generator::CMinus => (ladder(l, Family::C, Direction::Minus), -1, 0, 0),
        Generator::CPlus => (ladder(&l.shifted(1, 0), Family::C, Direction::Plus), 1, 0, 0),
        Generator::AZero | Generator::CZero => unreachable!("diagonal generators have no move"),
    }
}

/// Applies the generator and relabels. On the right side `A⁻` lowers `n`;
/// on the left side `A⁺` does. Diagonal generators return scaled copies.
pub fn apply_action(act: &LabeledAction, w: &WaveFunction) -> Result<ActionOutput> {
    // the standard factor 1/γ turns β and α into A⁰ and C⁰
    let diag = |v: C64| {
        ActionOutput::State(WaveFunction { f: w.f.scale(act.factor * v), norm_kind: NormKind::Unnormalized, ..w.clone() })
    };
    match act.generator {
        Generator::AZero => return Ok(diag(C64::new(w.label.lattice.beta_eff(), 0.0))),
        Generator::CZero => return Ok(diag(w.label.lattice.alpha_eff())),
        _ => {}
    }
    let (op, dk, dm, dn) = shift_move(act.generator, &w.label);
    let image = op.apply(&w.f).scale(act.factor);
    let target_n = w.label.n as i64 + dn;
    if target_n < 0 {
        return Ok(ActionOutput::Annihilated(image));
    }
    let target = w.label.lattice.shifted(dk, dm);
    let label = StateLabel::new(target, target_n as usize, w.label.side).map_err(|e| {
        Error::InadmissibleTarget(format!("{} moves {:?} n = {} to n = {target_n}: {e}", act.generator, w.label.side, w.label.n))
    })?;
    Ok(ActionOutput::State(WaveFunction::unnormalized(label, image)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CommutatorPair {
    /// `[A⁻, A⁺]`, expected `2A⁰ = 2β/γ`.
    APair,
    /// `[C⁻, C⁺]`, measured `−2iα/γ`.
    CPair,
    /// Real and complex moves, expected 0 on all four squares.
    Cross,
}

impl FromStr for CommutatorPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "A_pair" => Self::APair,
            "C_pair" => Self::CPair,
            "cross" => Self::Cross,
            other => return Err(Error::InvalidArgument(format!("unknown commutator pair {other:?}"))),
        })
    }
}

/// Measured constant `c` with `[X, Y] f = c f` at `label`, including the
/// `1/γ²` of the generators. For `Cross` the pairing of largest magnitude is
/// returned.
pub fn commutator_constant(pair: CommutatorPair, label: &LatticeLabel, f: &GridFunction) -> Result<MeasuredConstant> {
    let g2 = label.gamma() * label.gamma();
    let scale = composite_scale(label, f) / g2;
    let s = C64::new(1.0 / g2, 0.0);
    let two_paths = |first: &LadderOperator, then: &LadderOperator, first2: &LadderOperator, then2: &LadderOperator| {
        then.apply(&first.apply(f)).sub(&then2.apply(&first2.apply(f))).map(|r| r.scale(s))
    };
    match pair {
        CommutatorPair::APair => {
            let up = label.shifted(0, 1);
            let r = two_paths(
                &ladder(&up, Family::A, Direction::Plus),
                &ladder(&up, Family::A, Direction::Minus),
                &ladder(label, Family::A, Direction::Minus),
                &ladder(label, Family::A, Direction::Plus),
            )?;
            measure_constant(&r, f, scale, CONSTANCY_TOLERANCE)
        }
        CommutatorPair::CPair => {
            let up = label.shifted(1, 0);
            let r = two_paths(
                &ladder(&up, Family::C, Direction::Plus),
                &ladder(&up, Family::C, Direction::Minus),
                &ladder(label, Family::C, Direction::Minus),
                &ladder(label, Family::C, Direction::Plus),
            )?;
            measure_constant(&r, f, scale, CONSTANCY_TOLERANCE)
        }
        CommutatorPair::Cross => {
            let mut worst: Option<MeasuredConstant> = None;
            for p in CrossPairing::ALL {
                let [a_first, c_after, c_first, a_after] = p.operators(label);
                let r = two_paths(&a_first, &c_after, &c_first, &a_after)?;
                let m = measure_constant(&r, f, scale, CONSTANCY_TOLERANCE)?;
                if worst.is_none_or(|w| m.value.norm() > w.value.norm()) {
                    worst = Some(m);
                }
            }
            Ok(worst.expect("four pairings"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CasimirValue {
    pub measured: C64,
    pub spread: f64,
    /// Representation label: `β/γ − n` on the right, `−β/γ − n` on the left.
    pub nu: f64,
    /// `−ν(ν − 1)`
    pub from_nu: f64,
    /// `E/γ² + 1/4`
    pub from_energy: f64,
}

/// Casimir eigenvalue on an eigenstate: `A⁺A⁻ − A⁰(A⁰ − 1)` (family A) or
/// `C⁺C⁻ + C⁰(C⁰ − i)` (family C).
pub fn casimir_value(family: Family, w: &WaveFunction) -> Result<CasimirValue> {
    let label = &w.label.lattice;
    let g = label.gamma();
    let f = &w.f;
    let s = C64::new(1.0 / (g * g), 0.0);
    let (down, up, diag) = match family {
        Family::A => {
            let a0 = C64::new(label.beta_eff() / g, 0.0);
            (Family::A, Family::A, -a0 * (a0 - 1.0))
        }
        Family::C => {
            let c0 = label.alpha_eff() / g;
            (Family::C, Family::C, c0 * (c0 - I))
        }
        other => return Err(Error::InvalidArgument(format!("Casimir is defined for A or C, got {other}"))),
    };
    let pm = ladder(label, up, Direction::Plus).apply(&ladder(label, down, Direction::Minus).apply(f));
    let r = pm.combine(s, f, diag)?;
    let m = measure_constant(&r, f, composite_scale(label, f) / (g * g), CONSTANCY_TOLERANCE)?;
    let n = w.label.n as f64;
    let nu = match w.label.side {
        Side::Right => label.beta_eff() / g - n,
        Side::Left => -label.beta_eff() / g - n,
    };
    Ok(CasimirValue {
        measured: m.value,
        spread: m.spread,
        nu,
        from_nu: -nu * (nu - 1.0),
        from_energy: w.energy / (g * g) + 0.25,
    })
}

/// `⟨Lψⁿ, Lψⁿ⟩ = (Eⁿ − μ)⟨ψⁿ, ψⁿ⟩` in the bilinear product, with `L = A⁻_β`
/// or `C⁻_α` at the origin of `base`. The deviation is measured against
/// `(|Eⁿ| + |μ|)‖ψⁿ‖²`.
pub fn norm_relation_residual(base: &BaseParams, n: usize, family: Family, grid: &Grid) -> Result<ResidualReport> {
    let origin = base.origin();
    let w = match crate::model::bound_side(base.beta, base.gamma) {
        Some(Side::Right) => excited_state_closed_form(&origin, n, grid)?,
        _ => excited_state_ladder(&origin, n, grid)?,
    };
    let op = match family {
        Family::A | Family::C => ladder(&origin, family, Direction::Minus),
        other => return Err(Error::InvalidArgument(format!("norm relation is checked for A or C, got {other}"))),
    };
    let lw = op.apply(&w.f);
    let lhs = product(&lw, &lw, ProductKind::Bilinear)?;
    let e = C64::new(w.energy, 0.0);
    let rhs = (e - op.mu) * product(&w.f, &w.f, ProductKind::Bilinear)?;
    let herm = product(&w.f, &w.f, ProductKind::Hermitian)?.re;
    let diff = (lhs - rhs).norm();
    let scale = (e.norm() + op.mu.norm()) * herm;
    Ok(ResidualReport::new(format!("norm_relation.{family}.n{n}"), diff, diff / scale, NORM_RELATION_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{complex_state, ground_state, left_ground_state};

    fn grid() -> Grid {
        Grid::symmetric(8.0, 4001).unwrap()
    }

    fn base() -> BaseParams {
        BaseParams::new(3.0, 6.8)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn products() {
        let g = grid();
        let w0 = excited_state_closed_form(&base().origin(), 0, &g).unwrap();
        let w1 = excited_state_closed_form(&base().origin(), 1, &g).unwrap();
        assert!(inner_product(&w0, &w1, ProductKind::Hermitian).unwrap().norm() < 1e-9);
        let r = ground_state(&BaseParams::new(0.0, 6.8).origin(), &g).unwrap();
        assert!((inner_product(&r, &r, ProductKind::Bilinear).unwrap() - 1.0).norm() < 1e-12);
        let z0 = complex_state(&base(), -1, 0, &g).unwrap();
        let z1 = complex_state(&base(), -1, 1, &g).unwrap();
        assert!(normalized_overlap(&z0.f, &z1.f, ProductKind::Bilinear).unwrap() < 1e-8);
        let other = Grid::symmetric(8.0, 2001).unwrap();
        let w2 = excited_state_closed_form(&base().origin(), 0, &other).unwrap();
        assert_eq!(inner_product(&w0, &w2, ProductKind::Hermitian), Err(Error::GridMismatch));
    }

    #[test]
    fn collinearity() {
        let g = grid();
        let w0 = excited_state_closed_form(&base().origin(), 0, &g).unwrap();
        let w1 = excited_state_closed_form(&base().origin(), 1, &g).unwrap();
        assert!(collinearity_residual(&w0.f.scale(c(0.0, 3.0)), &w0.f).unwrap() < 1e-14);
        assert!(collinearity_residual(&w1.f, &w0.f).unwrap() > 0.99);
        assert!(matches!(collinearity_residual(&w0.f, &GridFunction::zeros(g)), Err(Error::DegenerateNorm(_))));
    }

    #[test]
    fn diagonal_and_annihilating_actions() {
        let g = grid();
        let w = excited_state_closed_form(&base().origin(), 1, &g).unwrap();
        let a0 = apply_action(&LabeledAction::standard(Generator::AZero, 2.0), &w).unwrap();
        assert!(collinearity_residual(a0.function(), &w.f).unwrap() < 1e-12);
        assert!((a0.function().values()[2000] - 3.4 * w.f.values()[2000]).norm() < 1e-14);
        let c0 = apply_action(&LabeledAction::standard(Generator::CZero, 2.0), &w).unwrap();
        assert!((c0.function().values()[2000] - 1.5 * w.f.values()[2000]).norm() < 1e-14);

        let gs = ground_state(&base().origin(), &g).unwrap();
        let out = apply_action(&LabeledAction::standard(Generator::AMinus, 2.0), &gs).unwrap();
        assert!(matches!(out, ActionOutput::Annihilated(_)));
        assert!(crate::numerics::interior_norm(out.function()) < 1e-8);

        let left = left_ground_state(&BaseParams::new(-3.0, -6.8).origin(), &g).unwrap();
        let out = apply_action(&LabeledAction::standard(Generator::APlus, 2.0), &left).unwrap();
        assert!(matches!(out, ActionOutput::Annihilated(_)));
    }

    #[test]
    fn shift_actions_relabel() {
        let g = grid();
        let w = excited_state_closed_form(&base().origin(), 1, &g).unwrap();
        let ActionOutput::State(down) = apply_action(&LabeledAction::standard(Generator::AMinus, 2.0), &w).unwrap()
        else {
            panic!("expected a state")
        };
        assert_eq!(down.label.n, 0);
        assert!((down.label.lattice.beta_eff() - 4.8).abs() < 1e-15);
        assert!((down.energy + 14.44).abs() < 1e-12);
        let target = ground_state(&base().label(0, -1), &g).unwrap();
        assert!(collinearity_residual(&down.f, &target.f).unwrap() < 1e-8);

        let ActionOutput::State(up) = apply_action(&LabeledAction::standard(Generator::CPlus, 2.0), &w).unwrap()
        else {
            panic!("expected a state")
        };
        assert_eq!(up.label.lattice.alpha_eff(), c(3.0, 2.0));
        assert!(crate::spectra::eigen_residual(&up.label.lattice, &up, c(-14.44, 0.0)) < 1e-7);
    }

    #[test]
    fn path_independence() {
        let g = grid();
        let w = excited_state_closed_form(&base().origin(), 1, &g).unwrap();
        let act = |gen, w: &WaveFunction| match apply_action(&LabeledAction::standard(gen, 2.0), w).unwrap() {
            ActionOutput::State(s) => s,
            ActionOutput::Annihilated(_) => panic!("unexpected annihilation"),
        };
        let p = act(Generator::CMinus, &act(Generator::APlus, &w));
        let q = act(Generator::APlus, &act(Generator::CMinus, &w));
        assert_eq!(p.label, q.label);
        assert!(collinearity_residual(&p.f, &q.f).unwrap() < 1e-8);
    }

    #[test]
    fn commutators() {
        let g = grid();
        let f = excited_state_closed_form(&base().origin(), 1, &g).unwrap().f;
        let label = base().origin();
        let a = commutator_constant(CommutatorPair::APair, &label, &f).unwrap();
        assert!((a.value - 6.8).norm() < 1e-9);
        let cc = commutator_constant(CommutatorPair::CPair, &label, &f).unwrap();
        assert!((cc.value - c(0.0, -3.0)).norm() < 1e-9);
        let x = commutator_constant(CommutatorPair::Cross, &label, &f).unwrap();
        assert!(x.value.norm() < 1e-10);
    }

    #[test]
    fn casimir_values() {
        let g = grid();
        let w = ground_state(&base().origin(), &g).unwrap();
        for family in [Family::A, Family::C] {
            let cv = casimir_value(family, &w).unwrap();
            assert!((cv.measured - (-8.16)).norm() < 1e-6, "{family}: {}", cv.measured);
            assert!((cv.from_nu + 8.16).abs() < 1e-12);
            assert!((cv.from_energy + 8.16).abs() < 1e-12);
        }
        let left = left_ground_state(&BaseParams::new(-3.0, -6.8).origin(), &g).unwrap();
        let cv = casimir_value(Family::A, &left).unwrap();
        assert!((cv.measured - (-8.16)).norm() < 1e-6);
        assert!((cv.from_nu + 8.16).abs() < 1e-12);
        let w2 = excited_state_closed_form(&base().origin(), 2, &g).unwrap();
        let cv = casimir_value(Family::C, &w2).unwrap();
        // ν = 3.4 − 2, E = −3.24
        assert!((cv.measured - (-0.56)).norm() < 1e-6);
        assert!((cv.from_nu + 0.56).abs() < 1e-12);
    }

    #[test]
    fn norm_relations() {
        let g = grid();
        for n in 0..=2 {
            for family in [Family::A, Family::C] {
                let r = norm_relation_residual(&base(), n, family, &g).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
        let op = ladder(&base().origin(), Family::C, Direction::Minus);
        assert!((c(-33.64, 0.0) - op.mu - c(-41.64, 6.0)).norm() < 1e-12);
    }
}
