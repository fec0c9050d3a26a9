//! Uniform radial grid on `[0, R]` and the discrete sine transform.
//!
//! Fields live on the interior nodes `r_j = j h_r`, `j = 1..J-1`; both end
//! points carry an implicit homogeneous Dirichlet value and have no storage.
//! The transform pair is
//!
//! ```text
//! c_k = (2/J) sum_{j=1}^{J-1} f_j sin(j k pi / J)
//! f_j =       sum_{k=1}^{J-1} c_k sin(j k pi / J)
//! ```
//!
//! with frequencies `mu_k = k pi / R`. Both directions run through a single
//! complex FFT of length `2J` on the odd extension of the data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SpsError};

/// Truncated radial domain with `J` uniform subintervals.
#[derive(Clone)]
pub struct RadialGrid {
    radius: f64,
    intervals: usize,
    spacing: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("radius", &self.radius)
            .field("intervals", &self.intervals)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && self.intervals == other.intervals
    }
}

impl RadialGrid {
    /// Builds the grid `r_j = j R / J`. `J` must be even and at least 4.
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SpsError::config(
                "R",
                format!("domain radius must be positive and finite, got {radius}"),
            ));
        }
        if intervals < 4 {
            return Err(SpsError::config(
                "J",
                format!("need at least 4 subintervals, got {intervals}"),
            ));
        }
        if !intervals.is_multiple_of(2) {
            return Err(SpsError::config(
                "J",
                format!("number of subintervals must be even, got {intervals}"),
            ));
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * intervals);
        Ok(RadialGrid {
            radius,
            intervals,
            spacing: radius / intervals as f64,
            fft,
        })
    }

    /// Grid with the given mesh size; `R / h_r` must be an even integer.
    pub fn with_spacing(radius: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(SpsError::config(
                "h_r",
                format!("mesh size must be positive, got {spacing}"),
            ));
        }
        let ratio = radius / spacing;
        let intervals = ratio.round();
        if (ratio - intervals).abs() > 1e-9 * ratio.max(1.0) {
            return Err(SpsError::config(
                "h_r",
                format!("R / h_r = {ratio} is not an integer"),
            ));
        }
        Self::new(radius, intervals as usize)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of subintervals `J`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of interior nodes, `J - 1`.
    pub fn interior_len(&self) -> usize {
        self.intervals - 1
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `r_j` for `j = 0..=J`.
    pub fn node(&self, j: usize) -> f64 {
        if j == self.intervals {
            self.radius
        } else {
            j as f64 * self.spacing
        }
    }

    /// All nodes `r_0 ..= r_J`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.intervals).map(|j| self.node(j)).collect()
    }

    /// Interior nodes `r_1 .. r_{J-1}`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.intervals).map(|j| self.node(j)).collect()
    }

    /// Frequency of mode `k`, `mu_k = k pi / R`.
    pub fn mu(&self, k: usize) -> f64 {
        k as f64 * PI / self.radius
    }

    /// `mu_k` for `k = 1..J-1`.
    pub fn frequencies(&self) -> Vec<f64> {
        (1..self.intervals).map(|k| self.mu(k)).collect()
    }

    /// Computes `out_k = sum_j x_j sin(j k pi / J)` for `k = 1..J-1`.
    ///
    /// The matrix `sin(j k pi / J)` is symmetric in `(j, k)`, so the same
    /// routine serves analysis and synthesis.
    pub fn sine_sum(&self, input: &[Complex64]) -> Vec<Complex64> {
        let n = self.intervals;
        assert_eq!(input.len(), n - 1, "sine_sum input must have J-1 entries");
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (j, &x) in input.iter().enumerate() {
            buf[j + 1] = x;
            buf[2 * n - j - 1] = -x;
        }
        self.fft.process(&mut buf);
        // FFT of the odd extension is -2i times the sine sum. Real input keeps
        // an exactly real output.
        if input.iter().all(|x| x.im == 0.0) {
            buf[1..n]
                .iter()
                .map(|x| Complex64::new(-0.5 * x.im, 0.0))
                .collect()
        } else {
            buf[1..n]
                .iter()
                .map(|x| Complex64::new(-0.5 * x.im, 0.5 * x.re))
                .collect()
        }
    }

    /// Real-valued variant of [`sine_sum`](Self::sine_sum).
    pub fn sine_sum_real(&self, input: &[f64]) -> Vec<f64> {
        let complex: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.sine_sum(&complex).into_iter().map(|c| c.re).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.interior_len() {
            return Err(SpsError::Shape {
                expected: self.interior_len(),
                actual: len,
            });
        }
        Ok(())
    }
}

/// Complex field on the interior nodes of a grid. For the gradient flow the
/// imaginary parts stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: &RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(RadialField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_real(grid: &RadialGrid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        RadialField {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.interior_len()],
        }
    }

    /// Samples `f(r)` at the interior nodes.
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        RadialField {
            grid: grid.clone(),
            values: grid.interior_nodes().into_iter().map(f).collect(),
        }
    }

    pub fn from_real_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Real parts of the stored values.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Discrete sine coefficients `c_k = (2/J) sum_j f_j sin(j k pi / J)`.
    pub fn dst_forward(&self) -> SineSpectrum {
        let scale = 2.0 / self.grid.intervals as f64;
        let coeffs = self
            .grid
            .sine_sum(&self.values)
            .into_iter()
            .map(|c| c * scale)
            .collect();
        SineSpectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Sine pseudospectral second derivative `D_rr^s f`.
    pub fn laplacian_sine(&self) -> RadialField {
        let mut spectrum = self.dst_forward();
        spectrum.scale_modes(|mu| -mu * mu);
        spectrum.dst_inverse()
    }

    /// `sqrt(h_r sum_j |f_j|^2)`.
    pub fn norm_h(&self) -> f64 {
        (self.grid.spacing * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest nodal modulus.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficients of a field against the modes `sin(mu_k r)`, `k = 1..J-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSpectrum {
    grid: RadialGrid,
    coeffs: Vec<Complex64>,
}

impl SineSpectrum {
    pub fn new(grid: &RadialGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coeffs.len())?;
        Ok(SineSpectrum {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Spectrum with a unit coefficient at mode `k` and zeros elsewhere.
    pub fn unit_mode(grid: &RadialGrid, k: usize) -> Self {
        assert!(k >= 1 && k < grid.intervals, "mode index out of range");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.interior_len()];
        coeffs[k - 1] = Complex64::new(1.0, 0.0);
        SineSpectrum {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Coefficients, index `k - 1` for mode `k`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.grid.frequencies()
    }

    /// Multiplies every coefficient by `factor(mu_k)`.
    pub fn scale_modes(&mut self, factor: impl Fn(f64) -> f64) {
        let grid = &self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= factor(grid.mu(i + 1));
        }
    }

    /// Multiplies every coefficient by a complex `factor(mu_k)`.
    pub fn multiply_modes(&mut self, factor: impl Fn(f64) -> Complex64) {
        let grid = &self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= factor(grid.mu(i + 1));
        }
    }

    /// Synthesis `f_j = sum_k c_k sin(j k pi / J)`.
    pub fn dst_inverse(&self) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.grid.sine_sum(&self.coeffs),
        }
    }

    /// Derivative of the sine series at `r = 0`, `sum_k mu_k c_k`.
    pub fn derivative_at_origin(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.grid.mu(i + 1))
            .sum()
    }

    /// `sum_k |c_k|^2`.
    pub fn energy_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
