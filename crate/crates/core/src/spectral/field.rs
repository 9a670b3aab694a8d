//! Equispaced periodic grid on [0,1) and real grid functions living on it.

use std::ops::{Add, Mul, Neg, Sub};

use super::SpectralError;

/// Equispaced nodes `x_j = j/n`, `j = 0..n`, on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 8;

    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < Self::MIN_NODES || !n.is_multiple_of(2) {
            return Err(SpectralError::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        (j % self.n) as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Signed wavenumber stored at FFT slot `j`. The Nyquist slot `n/2` is
    /// reported as `+n/2`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }
}

/// Real samples of a periodic function at the nodes of a [`Grid`].
///
/// Every `Field` holds finite values; constructors reject NaN and infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite("field construction"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self, SpectralError> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Panics if `value` is not finite.
    pub fn constant(grid: Grid, value: f64) -> Self {
        assert!(value.is_finite(), "constant field must be finite");
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Integral over the circle. The trapezoidal rule on a periodic grid is
    /// the grid mean and is exact for resolvable trigonometric polynomials.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.integral()
    }

    /// `∫|f| dx` by the same quadrature.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / self.grid.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }

    /// Pointwise map. Returns an error if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, SpectralError> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise power with a non-negative integer exponent.
    pub fn powi(&self, exponent: u32) -> Self {
        let values = self
            .values
            .iter()
            .map(|&v| v.powi(exponent as i32))
            .collect();
        Self::from_values_unchecked(self.grid, values)
    }

    /// Cyclic shift by `s` nodes: `out[j] = self[j - s]`.
    pub fn shift(&self, s: isize) -> Self {
        let n = self.grid.len() as isize;
        let values = (0..n)
            .map(|j| self.values[(j - s).rem_euclid(n) as usize])
            .collect();
        Self::from_values_unchecked(self.grid, values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn zip_with(&self, other: &Field, op: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Field::from_values_unchecked(self.grid, values)
    }

    /// `‖self − other‖∞`.
    pub fn distance(&self, other: &Field) -> f64 {
        (self - other).max_abs()
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Pointwise product on the grid (no de-aliasing).
impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        let values = self.values.iter().map(|&v| v * rhs).collect();
        Field::from_values_unchecked(self.grid, values)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_small_or_odd() {
        assert!(Grid::new(6).is_err());
        assert!(Grid::new(9).is_err());
        assert!(Grid::new(0).is_err());
        let g = Grid::new(8).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.node(9), 0.125);
    }

    #[test]
    fn wavenumbers_are_signed() {
        let g = Grid::new(8).unwrap();
        let k: Vec<i64> = (0..8).map(|j| g.wavenumber(j)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = Grid::new(8).unwrap();
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(Field::new(g, v), Err(SpectralError::NonFinite(_))));
        assert!(Field::new(g, vec![0.0; 7]).is_err());
    }

    #[test]
    fn shift_rotates_samples() {
        let g = Grid::new(8).unwrap();
        let f = Field::from_fn(g, |x| x).unwrap();
        let s = f.shift(2);
        assert_eq!(s.values()[2], 0.0);
        assert_eq!(s.values()[0], 0.75);
        assert_eq!(f.shift(-2).shift(2), f);
    }

    #[test]
    fn quadrature_is_exact_for_trig_polynomials() {
        let g = Grid::new(16).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * std::f64::consts::PI * x).sin().powi(2)).unwrap();
        assert!((f.integral() - 0.5).abs() < 1e-15);
    }
}
