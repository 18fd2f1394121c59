//! Acceptance suite: one PASS/FAIL line per criterion at its stated
//! tolerance.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are run unchanged and reported as
//! FAIL; they do not fail the target. Any other failure does.

mod common;

use common::jacobi_sum;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use scarf_hierarchy::algebra::{casimir_value, collinearity_residual, norm_relation_residual, normalized_overlap, ProductKind};
use scarf_hierarchy::model::{closed_form_spectrum, BaseParams};
use scarf_hierarchy::numerics::{interior_norm, Grid, GridFunction};
use scarf_hierarchy::operators::{
    cross_commutation_residual, factorization_gap_constant, factorization_residual, intertwining_residual, ladder, Direction, Family,
    FactorizationVariant,
};
use scarf_hierarchy::spectra::{bound_spectrum_fd, bound_spectrum_richardson, eigen_residual, rayleigh_quotient};
use scarf_hierarchy::states::{
    complex_state, excited_state_closed_form, excited_state_ladder, ground_state, jacobi_polynomial, left_ground_state, square_integrable,
    zero_mode, ZeroModeKind,
};
use scarf_hierarchy::testfn::{random_admissible, random_test_function, seeded_rng};
use std::process::Command;
use std::time::Instant;

const SEED: u64 = 42;

/// Criteria whose stated thresholds contradict the closed-form values.
const KNOWN_UNATTAINABLE: [(u32, &str); 2] = [
    (2, "n_max = [(3.3 − 1)/2] = 1 admits two levels at β = 3.3 (−5.29 and −0.09), not one"),
    (8, "|φ| = (cosh 2x)^{1/2}, so |φ(8)|/|φ(4)| = √(cosh 16/cosh 8) ≈ e⁴ ≈ 54.6, below 0.5·e⁸ ≈ 1490"),
];

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn paper_grid() -> Grid {
    Grid::symmetric(8.0, 8001).unwrap()
}

fn base() -> BaseParams {
    BaseParams::new(3.0, 6.8)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn c1_spectrum() -> Outcome {
    let label = base().origin();
    let want = [-33.64, -14.44, -3.24];
    let t = Instant::now();
    let fd = bound_spectrum_fd(&label, &paper_grid(), 3).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let rich = bound_spectrum_richardson(&label, &paper_grid(), 3).unwrap();
    let dev = |e: Vec<C64>| e.iter().zip(want).map(|(a, b)| (a.re - b).abs()).fold(0.0, f64::max);
    let (d_fd, d_r) = (dev(fd.energies()), dev(rich.energies()));
    outcome(
        d_fd <= 1e-3 && d_r <= 1e-6 && elapsed < 10.0,
        format!("max |ΔE| fd {d_fd:.2e} (≤ 1e-3), richardson {d_r:.2e} (≤ 1e-6), fd time {elapsed:.2} s"),
    )
}

fn c2_n_max() -> Outcome {
    let count = |beta: f64| closed_form_spectrum(&BaseParams::new(3.0, beta).origin()).len();
    let (a, b) = (count(6.8), count(3.3));
    let zero = (0..=200).map(|i| -1.0 + 0.01 * i as f64).all(|beta| count(beta) == 0);
    outcome(a == 3 && b == 1 && zero, format!("β=6.8 → {a} (want 3), β=3.3 → {b} (want 1), β∈[−1,1] → zero: {zero}"))
}

fn c3_annihilation() -> Outcome {
    let g = paper_grid();
    let label = base().origin();
    let w = ground_state(&label, &g).unwrap();
    let r = interior_norm(&ladder(&label, Family::A, Direction::Minus).apply(&w.f)) / interior_norm(&w.f);
    let left = BaseParams::new(-3.0, -6.8).origin();
    let lw = left_ground_state(&left, &g).unwrap();
    let l = interior_norm(&ladder(&left.shifted(0, 1), Family::A, Direction::Plus).apply(&lw.f)) / interior_norm(&lw.f);
    outcome(r <= 1e-8 && l <= 1e-8, format!("‖A⁻ψ⁰‖/‖ψ⁰‖ = {r:.2e}, ‖A⁺ψ̃⁰‖/‖ψ̃⁰‖ = {l:.2e} (≤ 1e-8)"))
}

struct Draws {
    grid: Grid,
    fs: Vec<GridFunction>,
    params: Vec<BaseParams>,
}

fn draws() -> Draws {
    let grid = Grid::symmetric(8.0, 2001).unwrap();
    let mut rng = seeded_rng(SEED);
    let fs = (0..20).map(|_| random_test_function(&mut rng, &grid)).collect();
    let params = (0..20).map(|_| random_admissible(&mut rng)).collect();
    Draws { grid, fs, params }
}

fn c4_identities(d: &Draws) -> Outcome {
    // every test function against every parameter draw
    let worst = d
        .params
        .par_iter()
        .map(|p| {
            let label = p.origin();
            let mut w = [0.0f64; 3];
            for f in &d.fs {
                for v in FactorizationVariant::ALL {
                    w[0] = w[0].max(factorization_residual(&label, v, f).relative_residual);
                }
                for fam in [Family::A, Family::C] {
                    w[1] = w[1].max(intertwining_residual(&label, fam, f).unwrap().relative_residual);
                }
                for r in cross_commutation_residual(&label, f) {
                    w[2] = w[2].max(r.relative_residual);
                }
            }
            w
        })
        .reduce(|| [0.0; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);
    outcome(
        worst.iter().all(|&r| r <= 1e-10),
        format!(
            "400 pairs on {} points: factorization {:.2e}, intertwining {:.2e}, cross {:.2e} (≤ 1e-10)",
            d.grid.len(),
            worst[0],
            worst[1],
            worst[2]
        ),
    )
}

fn c5_gaps(d: &Draws) -> Outcome {
    let (a, c_) = d
        .params
        .par_iter()
        .map(|p| {
            let label = p.origin();
            let mut w = (0.0f64, 0.0f64);
            for f in &d.fs {
                let ga = factorization_gap_constant(&label, Family::A, f).map_or(f64::INFINITY, |m| (m.value - c(-4.0 * p.beta, 0.0)).norm());
                let gc = factorization_gap_constant(&label, Family::C, f).map_or(f64::INFINITY, |m| (m.value - c(0.0, 4.0 * p.alpha)).norm());
                w = (w.0.max(ga), w.1.max(gc));
            }
            w
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    outcome(a <= 1e-10 && c_ <= 1e-10, format!("max |gap − (−4β)| = {a:.2e}, max |gap − 4iα| = {c_:.2e} (≤ 1e-10)"))
}

fn c6_isospectral() -> Outcome {
    let g = paper_grid();
    let levels = closed_form_spectrum(&base().origin());
    let jobs: Vec<(i64, usize)> = (-3..=3).flat_map(|k| (0..levels.len()).map(move |n| (k, n))).collect();
    let (res, im) = jobs
        .par_iter()
        .map(|&(k, n)| {
            let w = complex_state(&base(), k, n, &g).unwrap();
            let l = base().label(k, 0);
            let r = eigen_residual(&l, &w, c(levels[n].energy, 0.0));
            let q = rayleigh_quotient(&l, &w, ProductKind::Bilinear).unwrap();
            (r, q.im.abs())
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    outcome(res <= 1e-6 && im <= 1e-6, format!("{} states: eigen-residual {res:.2e}, |Im RQ| {im:.2e} (≤ 1e-6)", jobs.len()))
}

fn c7_orthogonality() -> Outcome {
    let g = paper_grid();
    let n_levels = closed_form_spectrum(&base().origin()).len();
    let gram = (-2..=2i64)
        .into_par_iter()
        .map(|k| {
            let ws: Vec<_> = (0..n_levels).map(|n| complex_state(&base(), k, n, &g).unwrap()).collect();
            let mut worst = 0.0f64;
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    worst = worst.max(normalized_overlap(&ws[i].f, &ws[j].f, ProductKind::Bilinear).unwrap());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let norm = (0..n_levels)
        .map(|n| norm_relation_residual(&base(), n, Family::C, &g).unwrap().relative_residual)
        .fold(0.0, f64::max);
    outcome(gram <= 1e-8 && norm <= 1e-8, format!("Gram off-diagonal {gram:.2e}, norm relation {norm:.2e} (≤ 1e-8)"))
}

fn c8_broken_susy() -> Outcome {
    let g = paper_grid();
    let label = base().origin();
    let mut kernel = 0.0f64;
    let mut normalizable = false;
    let mut ratio = f64::INFINITY;
    for (which, op) in [
        (ZeroModeKind::CMinusKernel, ladder(&label, Family::C, Direction::Minus)),
        (ZeroModeKind::CPlusKernel, ladder(&label.shifted(1, 0), Family::C, Direction::Plus)),
    ] {
        let phi = zero_mode(&label, which, &g);
        kernel = kernel.max(interior_norm(&op.apply(&phi.f)) / interior_norm(&phi.f));
        normalizable |= square_integrable(&phi.f);
        let v = phi.f.values();
        ratio = ratio.min(v[g.nearest(8.0)].norm() / v[g.nearest(4.0)].norm());
    }
    let bound = 0.5 * 8f64.exp();
    let exact = (16f64.cosh() / 8f64.cosh()).sqrt();
    outcome(
        kernel <= 1e-8 && !normalizable && ratio >= bound,
        format!(
            "kernel residual {kernel:.2e} (≤ 1e-8), square integrable: {normalizable}, |φ(8)|/|φ(4)| = {ratio:.4} (want ≥ {bound:.1}; closed form {exact:.4})"
        ),
    )
}

fn c9_dual_and_mirror() -> Outcome {
    let g = paper_grid();
    let cases = [base(), BaseParams::new(-1.5, 4.2), BaseParams::new(0.0, 9.1)];
    let (dual, mirror) = cases
        .par_iter()
        .map(|b| {
            let levels = closed_form_spectrum(&b.origin()).len();
            let mut w = (0.0f64, 0.0f64);
            for n in 0..levels {
                let closed = excited_state_closed_form(&b.origin(), n, &g).unwrap();
                let chain = excited_state_ladder(&b.origin(), n, &g).unwrap();
                let left = excited_state_ladder(&b.origin().mirrored(), n, &g).unwrap();
                w.0 = w.0.max(collinearity_residual(&chain.f, &closed.f).unwrap());
                w.1 = w.1.max(collinearity_residual(&left.f, &closed.f).unwrap());
            }
            w
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    outcome(dual <= 1e-6 && mirror <= 1e-6, format!("ladder vs closed form {dual:.2e}, left vs right {mirror:.2e} (≤ 1e-6)"))
}

fn c10_casimir() -> Outcome {
    let g = paper_grid();
    let n_levels = closed_form_spectrum(&base().origin()).len();
    let mut worst = 0.0f64;
    let mut ground = Vec::new();
    for n in 0..n_levels {
        let w = excited_state_closed_form(&base().origin(), n, &g).unwrap();
        for fam in [Family::A, Family::C] {
            let cv = casimir_value(fam, &w).unwrap();
            worst = worst.max((cv.measured - cv.from_nu).norm()).max((cv.measured - cv.from_energy).norm());
            if n == 0 {
                ground.push(cv.measured);
            }
        }
    }
    let g0 = ground.iter().map(|v| (v - c(-8.16, 0.0)).norm()).fold(0.0, f64::max);
    outcome(worst <= 1e-6 && g0 <= 1e-6, format!("max deviation {worst:.2e}, ground-state value off −8.16 by {g0:.2e} (≤ 1e-6)"))
}

fn c11_jacobi() -> Outcome {
    let mut rng = seeded_rng(SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let b = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let z = C64::from_polar(rng.random_range(0.0..5.0), rng.random_range(0.0..std::f64::consts::TAU));
        for n in 0..=6 {
            let r = jacobi_polynomial(n, a, b, z).unwrap();
            let s = jacobi_sum(n, a, b, z);
            worst = worst.max((r - s).norm() / s.norm());
        }
    }
    outcome(worst <= 1e-12, format!("max relative difference {worst:.2e} over 100 draws, n ≤ 6 (≤ 1e-12)"))
}

fn c12_cli_determinism() -> Outcome {
    let run = || Command::new(env!("CARGO_BIN_EXE_scarf")).args(["verify", "--seed", "42"]).env_remove("SCARF_OUTPUT_DIR").output().unwrap();
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let codes = (a.status.code(), b.status.code());
    outcome(same && codes == (Some(0), Some(0)), format!("byte-identical: {same} ({} bytes), exit codes {codes:?}", a.stdout.len()))
}

fn main() {
    let d = draws();
    let criteria: Vec<Criterion<'_>> = vec![
        (1, "spectrum reproduction", Box::new(c1_spectrum)),
        (2, "n_max logic", Box::new(c2_n_max)),
        (3, "annihilation", Box::new(c3_annihilation)),
        (4, "exact operator identities", Box::new(|| c4_identities(&d))),
        (5, "gap constants", Box::new(|| c5_gaps(&d))),
        (6, "isospectral complex hierarchy", Box::new(c6_isospectral)),
        (7, "bilinear orthogonality and norm relation", Box::new(c7_orthogonality)),
        (8, "broken supersymmetry", Box::new(c8_broken_susy)),
        (9, "dual construction and mirror symmetry", Box::new(c9_dual_and_mirror)),
        (10, "Casimir consistency", Box::new(c10_casimir)),
        (11, "Jacobi oracle", Box::new(c11_jacobi)),
        (12, "CLI determinism", Box::new(c12_cli_determinism)),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, run) in &criteria {
        let o = run();
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == id);
        println!("criterion {id:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass {
            passed += 1;
        } else if let Some((_, why)) = known {
            println!("             known unattainable: {why}");
        } else {
            unexpected.push(*id);
        }
        if o.pass && known.is_some() {
            println!("             listed as unattainable but passed; revisit the list");
        }
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
