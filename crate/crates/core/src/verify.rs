//! The full identity suite behind `scarf verify`.
//!
//! Every check yields one named record. Records are merged in name order, so
//! a report depends only on its configuration.

use crate::algebra::{casimir_value, collinearity_residual, commutator_constant, norm_relation_residual, normalized_overlap, CommutatorPair, ProductKind};
use crate::error::{Error, Result};
use crate::model::{bound_side, closed_form_spectrum, BaseParams, LatticeLabel, Side};
use crate::numerics::{interior_norm, Grid, GridFunction};
use crate::operators::{
    adjoint_relation_residual, cross_commutation_residual, factorization_gap_constant, factorization_residual, intertwining_residual,
    ladder, CrossPairing, Direction, Family, FactorizationVariant,
};
use crate::spectra::{bound_spectrum_fd, eigen_residual, rayleigh_quotient};
use crate::states::{
    complex_state, excited_state_closed_form, excited_state_ladder, ground_state, left_ground_state, square_integrable, zero_mode,
    WaveFunction, ZeroModeKind,
};
use crate::testfn::{random_test_function, seeded_rng};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub const DEFAULT_TOLERANCES: [(&str, f64); 11] = [
    ("adjoint", 1e-9),
    ("annihilation", 1e-8),
    ("casimir", 1e-6),
    ("collinearity", 1e-6),
    ("fd_spectrum", 1e-3),
    ("gap", 1e-10),
    ("identity", 1e-10),
    ("isospectral", 1e-6),
    ("norm_relation", 1e-8),
    ("orthogonality", 1e-8),
    ("zero_mode", 1e-8),
];

/// Named tolerances; only the names in [`DEFAULT_TOLERANCES`] exist.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {name} must be positive, got {value}")));
        }
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument(format!("unknown tolerance {name:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub base: BaseParams,
    pub k: i64,
    pub m: i64,
    pub grid: Grid,
    pub seed: u64,
    pub n_test_functions: usize,
    pub tolerances: Tolerances,
}

impl VerifyConfig {
    pub fn new(base: BaseParams, grid: Grid) -> Self {
        VerifyConfig { base, k: 0, m: 0, grid, seed: 42, n_test_functions: 4, tolerances: Tolerances::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub status: CheckStatus,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub pass: bool,
}

impl VerificationReport {
    fn from_checks(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, skipped) = (count(CheckStatus::Pass), count(CheckStatus::Fail), count(CheckStatus::Skipped));
        VerificationReport { checks, passed, failed, skipped, pass: failed == 0 }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Recorder<'a> {
    tol: &'a Tolerances,
    checks: Vec<CheckResult>,
}

impl Recorder<'_> {
    fn value(&mut self, name: String, anchor: &str, tol: &str, value: f64, detail: Option<String>) {
        let tolerance = self.tol.get(tol);
        let status = if value <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(CheckResult { name, anchor: anchor.into(), status, value: Some(value), tolerance, detail });
    }

    fn outcome(&mut self, name: String, anchor: &str, tol: &str, value: Result<f64>) {
        match value {
            Ok(v) => self.value(name, anchor, tol, v, None),
            Err(e) => self.failure(name, anchor, tol, e.to_string()),
        }
    }

    fn failure(&mut self, name: String, anchor: &str, tol: &str, detail: String) {
        let tolerance = self.tol.get(tol);
        self.checks.push(CheckResult { name, anchor: anchor.into(), status: CheckStatus::Fail, value: None, tolerance, detail: Some(detail) });
    }

    fn skip(&mut self, name: String, anchor: &str, tol: &str, why: &str) {
        let tolerance = self.tol.get(tol);
        self.checks.push(CheckResult {
            name,
            anchor: anchor.into(),
            status: CheckStatus::Skipped,
            value: None,
            tolerance,
            detail: Some(why.into()),
        });
    }
}

const NO_STATES: &str = "no bound states for this beta";

pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    let label = cfg.base.label(cfg.k, cfg.m);
    let mut rng = seeded_rng(cfg.seed);
    let fs: Vec<GridFunction> = (0..cfg.n_test_functions.max(2)).map(|_| random_test_function(&mut rng, &cfg.grid)).collect();
    let mut rec = Recorder { tol: &cfg.tolerances, checks: Vec::new() };

    identity_checks(&mut rec, &label, &fs);
    zero_mode_checks(&mut rec, &label, &cfg.grid);

    // state checks on the real member β_eff = β + γm, oriented to the right side
    let b = label.beta_eff();
    let g = cfg.base.gamma;
    let right = match bound_side(b, g) {
        Some(Side::Right) => Some(BaseParams { alpha: cfg.base.alpha, beta: b, gamma: g }),
        Some(Side::Left) => Some(BaseParams { alpha: -cfg.base.alpha, beta: -b, gamma: g }),
        None => None,
    };
    match right {
        Some(base) => state_checks(&mut rec, &base, &cfg.grid)?,
        None => {
            for (name, anchor, tol) in STATE_CHECKS {
                rec.skip(name.to_string(), anchor, tol, NO_STATES);
            }
        }
    }
    Ok(VerificationReport::from_checks(rec.checks))
}

const STATE_CHECKS: [(&str, &str, &str); 11] = [
    ("annihilation.left", "A⁺_{β̃+γ} ψ̃⁰ = 0", "annihilation"),
    ("annihilation.right", "A⁻_β ψ⁰ = 0", "annihilation"),
    ("casimir", "A⁺A⁻ − A⁰(A⁰−1) = C⁺C⁻ + C⁰(C⁰−i) = −ν(ν−1) = E/γ² + 1/4", "casimir"),
    ("dual_construction", "A⁺ chain from ψ⁰_{β−γn} ∝ Jacobi closed form", "collinearity"),
    ("fd_spectrum", "finite-difference levels = −(β − γ/2 − γn)²", "fd_spectrum"),
    ("isospectral", "H_{α+iγk} ψⁿ = Eⁿ ψⁿ with real Eⁿ", "isospectral"),
    ("mirror", "left states at (−α, −β) ∝ right states at (α, β)", "collinearity"),
    ("norm_relation.A", "⟨A⁻ψ, A⁻ψ⟩ = (E − μ_β)⟨ψ, ψ⟩ bilinear", "norm_relation"),
    ("norm_relation.C", "⟨C⁻ψ, C⁻ψ⟩ = (E − μ_α)⟨ψ, ψ⟩ bilinear", "norm_relation"),
    ("orthogonality", "∫ψⁿψⁿ′ = 0 for n ≠ n′ along each complex member", "orthogonality"),
    ("spectrum.levels", "bound levels −(β − γ/2 − γn)², β − γ/2 − γn > 0", "identity"),
];

fn identity_checks(rec: &mut Recorder<'_>, label: &LatticeLabel, fs: &[GridFunction]) {
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);

    for variant in FactorizationVariant::ALL {
        let r = max(fs.par_iter().map(|f| factorization_residual(label, variant, f).relative_residual).collect());
        let anchor = match variant {
            FactorizationVariant::ALower => "H = A⁺_β A⁻_β + μ_β",
            FactorizationVariant::AUpper => "H = A⁻_{β+γ} A⁺_{β+γ} + μ_{β+γ}",
            FactorizationVariant::CLower => "H = C⁺_α C⁻_α + μ_α",
            FactorizationVariant::CUpper => "H = C⁻_{α+iγ} C⁺_{α+iγ} + μ_{α+iγ}",
        };
        rec.value(format!("factorization.{}", variant.name()), anchor, "identity", r, None);
    }

    for (family, anchor) in [(Family::A, "A⁻_β H_β = H_{β−γ} A⁻_β"), (Family::C, "C⁻_α H_α = H_{α−iγ} C⁻_α")] {
        let r: Result<Vec<f64>> = fs.par_iter().map(|f| intertwining_residual(label, family, f).map(|r| r.relative_residual)).collect();
        rec.outcome(format!("intertwining.{family}"), anchor, "identity", r.map(max));
    }

    let cross: Vec<Vec<f64>> = fs.par_iter().map(|f| cross_commutation_residual(label, f).iter().map(|r| r.relative_residual).collect()).collect();
    for (i, p) in CrossPairing::ALL.iter().enumerate() {
        let r = max(cross.iter().map(|v| v[i]).collect());
        rec.value(format!("cross_commutation.{}", p.name()), "real and complex moves commute", "identity", r, None);
    }

    for family in [Family::A, Family::C] {
        let r: Result<Vec<f64>> = (0..fs.len())
            .into_par_iter()
            .map(|i| adjoint_relation_residual(label, family, &fs[i], &fs[(i + 1) % fs.len()]).map(|r| r.relative_residual))
            .collect();
        rec.outcome(format!("adjoint.{family}"), "(L⁺)† = conj-coefficient L⁻", "adjoint", r.map(max));
    }

    let g = label.gamma();
    let eff = label.effective();
    for (family, expected, anchor) in [
        (Family::A, C64::new(-2.0 * g * eff.beta, 0.0), "μ_{β+γ} − μ_β = −2γβ"),
        (Family::C, C64::new(0.0, 2.0 * g) * eff.alpha, "μ_{α+iγ} − μ_α = 2iγα"),
    ] {
        let r: Result<Vec<f64>> = fs
            .par_iter()
            .map(|f| factorization_gap_constant(label, family, f).map(|m| (m.value - expected).norm() / expected.norm().max(1.0)))
            .collect();
        rec.outcome(format!("gap.{family}"), anchor, "gap", r.map(max));
    }

    for (pair, expected, name, anchor) in [
        (CommutatorPair::APair, C64::new(2.0 * eff.beta / g, 0.0), "A_pair", "[A⁻, A⁺] = 2A⁰ = 2β/γ"),
        (CommutatorPair::CPair, C64::new(0.0, -2.0 / g) * eff.alpha, "C_pair", "[C⁻, C⁺] = −2iα/γ"),
        (CommutatorPair::Cross, C64::new(0.0, 0.0), "cross", "[A, C] = 0"),
    ] {
        let measured: Result<Vec<C64>> = fs.par_iter().map(|f| commutator_constant(pair, label, f).map(|m| m.value)).collect();
        match measured {
            Ok(ms) => {
                let dev = max(ms.iter().map(|m| (m - expected).norm() / expected.norm().max(1.0)).collect());
                let detail = format!("measured {:.12} {:+.12}i", ms[0].re, ms[0].im);
                rec.value(format!("commutator.{name}"), anchor, "gap", dev, Some(detail));
            }
            Err(e) => rec.failure(format!("commutator.{name}"), anchor, "gap", e.to_string()),
        }
    }
}

fn zero_mode_checks(rec: &mut Recorder<'_>, label: &LatticeLabel, grid: &Grid) {
    for (which, name, op, anchor) in [
        (ZeroModeKind::CMinusKernel, "C_minus_kernel", ladder(label, Family::C, Direction::Minus), "C⁻_α φ = 0, |φ| = (cosh γx)^{1/2}"),
        (ZeroModeKind::CPlusKernel, "C_plus_kernel", ladder(&label.shifted(1, 0), Family::C, Direction::Plus), "C⁺_{α+iγ} φ = 0, |φ| = (cosh γx)^{1/2}"),
    ] {
        let phi = zero_mode(label, which, grid);
        let r = interior_norm(&op.apply(&phi.f)) / interior_norm(&phi.f);
        let name = format!("zero_mode.{name}");
        if square_integrable(&phi.f) {
            rec.failure(name, anchor, "zero_mode", format!("kernel residual {r:e}, but the zero mode is square integrable"));
        } else {
            rec.value(name, anchor, "zero_mode", r, Some("not square integrable".into()));
        }
    }
}

fn state_checks(rec: &mut Recorder<'_>, base: &BaseParams, grid: &Grid) -> Result<()> {
    let origin = base.origin();
    let levels = closed_form_spectrum(&origin);
    let n_levels = levels.len();

    // the closed-form count equals the number of admissible states
    let formula = crate::model::n_max(base.beta, base.gamma).map_or(0, |n| n + 1);
    rec.value(
        "spectrum.levels".into(),
        STATE_CHECKS[10].1,
        "identity",
        if formula == n_levels { 0.0 } else { 1.0 },
        Some(format!("{n_levels} levels")),
    );

    let gs = ground_state(&origin, grid)?;
    let a = ladder(&origin, Family::A, Direction::Minus).apply(&gs.f);
    rec.value("annihilation.right".into(), STATE_CHECKS[1].1, "annihilation", interior_norm(&a) / interior_norm(&gs.f), None);
    let mirror = origin.mirrored();
    let lgs = left_ground_state(&mirror, grid)?;
    let a = ladder(&mirror.shifted(0, 1), Family::A, Direction::Plus).apply(&lgs.f);
    rec.value("annihilation.left".into(), STATE_CHECKS[0].1, "annihilation", interior_norm(&a) / interior_norm(&lgs.f), None);

    let closed: Vec<WaveFunction> = (0..n_levels).into_par_iter().map(|n| excited_state_closed_form(&origin, n, grid)).collect::<Result<_>>()?;
    let per_n: Vec<(Result<f64>, Result<f64>)> = (0..n_levels)
        .into_par_iter()
        .map(|n| {
            let dual = excited_state_ladder(&origin, n, grid).and_then(|w| collinearity_residual(&w.f, &closed[n].f));
            let mir = excited_state_ladder(&mirror, n, grid).and_then(|w| collinearity_residual(&w.f, &closed[n].f));
            (dual, mir)
        })
        .collect();
    for (n, (dual, mir)) in per_n.into_iter().enumerate() {
        rec.outcome(format!("dual_construction.n{n}"), STATE_CHECKS[3].1, "collinearity", dual);
        rec.outcome(format!("mirror.n{n}"), STATE_CHECKS[6].1, "collinearity", mir);
    }

    for (n, w) in closed.iter().enumerate() {
        for family in [Family::A, Family::C] {
            let r = casimir_value(family, w).map(|c| {
                let a = (c.measured - c.from_nu).norm();
                let b = (c.measured - c.from_energy).norm();
                a.max(b).max((c.from_nu - c.from_energy).abs())
            });
            rec.outcome(format!("casimir.{family}.n{n}"), STATE_CHECKS[2].1, "casimir", r);
            let anchor = if family == Family::A { STATE_CHECKS[7].1 } else { STATE_CHECKS[8].1 };
            let r = norm_relation_residual(base, n, family, grid).map(|r| r.relative_residual);
            rec.outcome(format!("norm_relation.{family}.n{n}"), anchor, "norm_relation", r);
        }
    }

    match bound_spectrum_fd(&origin, grid, n_levels) {
        Ok(s) => {
            let dev = s.levels.iter().zip(&levels).map(|(a, b)| (a.energy.re - b.energy).abs()).fold(0.0, f64::max);
            rec.value("fd_spectrum".into(), STATE_CHECKS[4].1, "fd_spectrum", dev, None);
        }
        Err(e) => rec.failure("fd_spectrum".into(), STATE_CHECKS[4].1, "fd_spectrum", e.to_string()),
    }

    // complex members k ∈ −3..=3 share the real levels
    let ks: Vec<i64> = (-3..=3).collect();
    let chains: Vec<(i64, usize, Result<WaveFunction>)> = ks
        .iter()
        .flat_map(|&k| (0..n_levels).map(move |n| (k, n)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, n)| (k, n, complex_state(base, k, n, grid)))
        .collect();
    let mut by_k: BTreeMap<i64, Vec<WaveFunction>> = BTreeMap::new();
    for (k, n, w) in chains {
        let name = format!("isospectral.k{k:+}.n{n}");
        match w {
            Ok(w) => {
                let l = base.label(k, 0);
                let res = eigen_residual(&l, &w, C64::new(levels[n].energy, 0.0));
                let r = rayleigh_quotient(&l, &w, ProductKind::Bilinear).map(|q| res.max(q.im.abs()));
                rec.outcome(name, STATE_CHECKS[5].1, "isospectral", r);
                by_k.entry(k).or_default().push(w);
            }
            Err(e) => rec.failure(name, STATE_CHECKS[5].1, "isospectral", e.to_string()),
        }
    }
    for k in -2..=2 {
        let ws = by_k.get(&k).map(|v| v.as_slice()).unwrap_or(&[]);
        let mut worst: Result<f64> = Ok(0.0);
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let o = normalized_overlap(&ws[i].f, &ws[j].f, ProductKind::Bilinear);
                worst = worst.and_then(|w| o.map(|o| w.max(o)));
            }
        }
        rec.outcome(format!("orthogonality.k{k:+}"), STATE_CHECKS[9].1, "orthogonality", worst);
    }
    Ok(())
}
