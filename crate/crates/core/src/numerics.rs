//! Uniform grids, sampled complex functions, finite differences, trapezoid
//! quadrature and a Sturm-bisection eigenvalue kernel for symmetric
//! tridiagonal matrices.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Default absolute tolerance of [`lowest_eigenvalues`].
pub const EIGEN_TOLERANCE: f64 = 1e-10;
const BISECTION_MAX_ITER: usize = 200;
const STURM_PIVOT_GUARD: f64 = 1e-300;

/// A uniform grid on `[x_min, x_max]` with an odd number of nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "n_points must be odd and >= 3, got {n_points}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
            spacing: (x_max - x_min) / (n_points - 1) as f64,
        })
    }

    /// Symmetric grid `[-x_max, x_max]`.
    pub fn symmetric(x_max: f64, n_points: usize) -> Result<Self> {
        Grid::new(-x_max, x_max, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Node `i`, computed so that symmetric grids are exactly antisymmetric.
    pub fn node(&self, i: usize) -> f64 {
        let last = self.n_points - 1;
        if i == last {
            return self.x_max;
        }
        ((last - i) as f64 * self.x_min + i as f64 * self.x_max) / last as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.spacing).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Same spacing ratio, twice the resolution.
    pub fn refined(&self) -> Grid {
        Grid::new(self.x_min, self.x_max, 2 * self.n_points - 1).expect("refinement of a valid grid")
    }
}

pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n_points)
}

/// Complex samples on a grid, optionally with exact derivative channels.
///
/// `channels[j]` holds the `(j+1)`-th derivative at every node.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<C64>,
    channels: Vec<Vec<C64>>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        GridFunction::with_channels(grid, values, Vec::new())
    }

    pub fn with_channels(grid: Grid, values: Vec<C64>, channels: Vec<Vec<C64>>) -> Result<Self> {
        if values.len() != grid.len() || channels.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "sample count does not match grid of {} points",
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values, channels })
    }

    /// Samples `f` with no derivative channels.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        GridFunction { grid, values, channels: Vec::new() }
    }

    /// Evaluates `f` on the jet of `x` at every node, keeping `order`
    /// exact derivative channels.
    pub fn from_jets<F>(grid: Grid, order: usize, f: F) -> Self
    where
        F: Fn(&Jet) -> Jet + Sync,
    {
        let per_node: Vec<Vec<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&Jet::variable(grid.node(i), order)).derivatives())
            .collect();
        GridFunction::from_node_derivatives(grid, per_node)
    }

    fn from_node_derivatives(grid: Grid, per_node: Vec<Vec<C64>>) -> Self {
        let order = per_node.iter().map(|d| d.len()).min().unwrap_or(1) - 1;
        let values = per_node.iter().map(|d| d[0]).collect();
        let channels = (1..=order)
            .map(|j| per_node.iter().map(|d| d[j]).collect())
            .collect();
        GridFunction { grid, values, channels }
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![C64::new(0.0, 0.0); grid.len()], channels: Vec::new() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Number of exact derivative channels carried.
    pub fn analytic_order(&self) -> usize {
        self.channels.len()
    }

    pub fn analytic_d1(&self) -> Option<&[C64]> {
        self.channels.first().map(Vec::as_slice)
    }

    pub fn analytic_d2(&self) -> Option<&[C64]> {
        self.channels.get(1).map(Vec::as_slice)
    }

    pub fn channel(&self, derivative: usize) -> Option<&[C64]> {
        match derivative {
            0 => Some(&self.values),
            d => self.channels.get(d - 1).map(Vec::as_slice),
        }
    }

    /// Value and all carried derivatives at node `i`, as a jet.
    pub fn jet_at(&self, i: usize) -> Jet {
        let mut d = Vec::with_capacity(self.channels.len() + 1);
        d.push(self.values[i]);
        d.extend(self.channels.iter().map(|c| c[i]));
        Jet::from_derivatives(&d)
    }

    /// Drops derivative channels beyond `order`.
    pub fn truncated(&self, order: usize) -> GridFunction {
        let mut out = self.clone();
        out.channels.truncate(order);
        out
    }

    pub fn scale(&self, s: C64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    /// `a·self + b·other`; keeps the channels both operands carry.
    pub fn combine(&self, a: C64, other: &GridFunction, b: C64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let order = self.analytic_order().min(other.analytic_order());
        let mix = |x: &[C64], y: &[C64]| -> Vec<C64> {
            x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
        };
        Ok(GridFunction {
            grid: self.grid,
            values: mix(&self.values, &other.values),
            channels: (0..order).map(|j| mix(&self.channels[j], &other.channels[j])).collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Applies a node-local linear map on jets, e.g. a differential operator
    /// whose coefficients are themselves jets in `x`.
    ///
    /// `lost` is the derivative order the map consumes. Without enough
    /// channels the input is differentiated by finite differences and the
    /// result carries no channels.
    pub(crate) fn map_jets<F>(&self, lost: usize, f: F) -> GridFunction
    where
        F: Fn(f64, &Jet) -> Jet + Sync,
    {
        if self.analytic_order() >= lost {
            let per_node: Vec<Vec<C64>> = (0..self.grid.len())
                .into_par_iter()
                .map(|i| f(self.grid.node(i), &self.jet_at(i)).derivatives())
                .collect();
            return GridFunction::from_node_derivatives(self.grid, per_node);
        }
        let mut derivs = vec![self.values.clone()];
        for d in 1..=lost {
            let prev = GridFunction::new(self.grid, derivs[d - 1].clone()).expect("same grid");
            derivs.push(fd_first(&prev));
        }
        let values = (0..self.grid.len())
            .map(|i| {
                let d: Vec<C64> = derivs.iter().map(|c| c[i]).collect();
                f(self.grid.node(i), &Jet::from_derivatives(&d)).value()
            })
            .collect();
        GridFunction { grid: self.grid, values, channels: Vec::new() }
    }
}

/// Derivative of order 1 or 2. Returns the analytic channel verbatim when
/// present, else central differences with second-order one-sided stencils at
/// the endpoints.
pub fn differentiate(f: &GridFunction, order: usize) -> Result<GridFunction> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidArgument(format!("derivative order must be 1 or 2, got {order}")));
    }
    if f.analytic_order() >= order {
        let values = f.channels[order - 1].clone();
        let channels = f.channels[order..].to_vec();
        return GridFunction::with_channels(f.grid, values, channels);
    }
    let values = if order == 1 { fd_first(f) } else { fd_second(f) };
    GridFunction::new(f.grid, values)
}

fn fd_first(f: &GridFunction) -> Vec<C64> {
    let v = &f.values;
    let n = v.len();
    let h = f.grid.spacing;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    out
}

fn fd_second(f: &GridFunction) -> Vec<C64> {
    let v = &f.values;
    let n = v.len();
    let h2 = f.grid.spacing * f.grid.spacing;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    if n >= 4 {
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    out
}

/// Composite trapezoid rule over the whole grid.
pub fn integrate(f: &GridFunction) -> C64 {
    trapezoid(&f.values, f.grid.spacing)
}

pub(crate) fn trapezoid(values: &[C64], h: f64) -> C64 {
    let n = values.len();
    let inner: C64 = values[1..n - 1].iter().sum();
    (inner + (values[0] + values[n - 1]) * 0.5) * h
}

/// Discrete L² norm over interior nodes.
pub fn interior_norm(f: &GridFunction) -> f64 {
    let v = &f.values;
    let s: f64 = v[1..v.len() - 1].iter().map(|z| z.norm_sqr()).sum();
    (s * f.grid.spacing).sqrt()
}

/// Discrete `Σ conj(f)·g·h` over interior nodes.
pub fn interior_inner(f: &GridFunction, g: &GridFunction) -> Result<C64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let n = f.values.len();
    let s: C64 = (1..n - 1).map(|i| f.values[i].conj() * g.values[i]).sum();
    Ok(s * f.grid.spacing)
}

/// Largest pointwise modulus over interior nodes.
pub fn interior_max(f: &GridFunction) -> f64 {
    let v = &f.values;
    v[1..v.len() - 1].iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal must have length N-1 (N = {}, got {})",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(TridiagonalSystem { diagonal, off_diagonal })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// Number of eigenvalues strictly below `lambda` (LDLᵀ pivot signs).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diagonal[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diagonal.len() {
            let q_safe = if q.abs() < STURM_PIVOT_GUARD { STURM_PIVOT_GUARD.copysign(q) } else { q };
            let e = self.off_diagonal[i - 1];
            q = (self.diagonal[i] - lambda) - e * e / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diagonal.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }
}

/// The `count` algebraically smallest eigenvalues, ascending, by bisection
/// on the Sturm count to [`EIGEN_TOLERANCE`].
pub fn lowest_eigenvalues(t: &TridiagonalSystem, count: usize) -> Result<Vec<f64>> {
    lowest_eigenvalues_with_tolerance(t, count, EIGEN_TOLERANCE)
}

pub fn lowest_eigenvalues_with_tolerance(
    t: &TridiagonalSystem,
    count: usize,
    tolerance: f64,
) -> Result<Vec<f64>> {
    if count == 0 || count > t.len() {
        return Err(Error::InvalidArgument(format!(
            "count must lie in 1..={}, got {count}",
            t.len()
        )));
    }
    let (lo0, hi0) = t.gershgorin();
    let pad = 1e-12 * (lo0.abs() + hi0.abs()) + tolerance;
    let mut out = Vec::with_capacity(count);
    let mut lower = lo0 - pad;
    for index in 0..count {
        // smallest λ with more than `index` eigenvalues below it
        let mut lo = lower;
        let mut hi = hi0 + pad;
        let mut iter = 0;
        while hi - lo > tolerance {
            if iter == BISECTION_MAX_ITER {
                return Err(Error::NonConvergence { iterations: iter, tolerance });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if t.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            iter += 1;
        }
        let lambda = 0.5 * (lo + hi);
        out.push(lambda);
        lower = lo;
    }
    Ok(out)
}
