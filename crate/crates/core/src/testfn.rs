//! Seeded random smooth test functions and parameter draws for the identity
//! suites.

use crate::jet::Jet;
use crate::model::BaseParams;
use crate::numerics::{Grid, GridFunction};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact derivative channels carried by test functions; enough for a
/// second-order operator after a first-order one.
pub const TEST_FUNCTION_ORDER: usize = 4;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p(x − x₀) e^{iκx} e^{−((x − x₀)/w)²}` with a random complex cubic `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunctionSpec {
    pub center: f64,
    pub width: f64,
    pub wavenumber: f64,
    pub coefficients: [C64; 4],
}

impl TestFunctionSpec {
    pub fn draw<R: Rng>(rng: &mut R) -> Self {
        let mut coefficients = [C64::new(0.0, 0.0); 4];
        for c in coefficients.iter_mut() {
            *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        coefficients[0] += C64::new(1.0, 0.0);
        TestFunctionSpec {
            center: rng.random_range(-1.5..1.5),
            width: rng.random_range(0.6..1.5),
            wavenumber: rng.random_range(-2.0..2.0),
            coefficients,
        }
    }

    pub fn jet(&self, x: &Jet) -> Jet {
        let t = x.add_scalar(C64::new(-self.center, 0.0));
        let mut p = Jet::constant(self.coefficients[3], x.order());
        for c in self.coefficients[..3].iter().rev() {
            p = (&p * &t).add_scalar(*c);
        }
        let s = t.scale(C64::new(1.0 / self.width, 0.0));
        let exponent = &(&s * &s).scale(C64::new(-1.0, 0.0)) + &x.scale(C64::new(0.0, self.wavenumber));
        &p * &exponent.exp()
    }

    pub fn sample(&self, grid: &Grid, order: usize) -> GridFunction {
        GridFunction::from_jets(*grid, order, |x| self.jet(x))
    }
}

pub fn random_test_function<R: Rng>(rng: &mut R, grid: &Grid) -> GridFunction {
    TestFunctionSpec::draw(rng).sample(grid, TEST_FUNCTION_ORDER)
}

/// `α ∈ [−5, 5]`, `β ∈ [1.5, 10]`, `γ = 2`: at least one bound state.
pub fn random_admissible<R: Rng>(rng: &mut R) -> BaseParams {
    BaseParams::new(rng.random_range(-5.0..5.0), rng.random_range(1.5..10.0))
}
