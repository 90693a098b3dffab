//! Sampling-type indicators and support reconstruction.
//!
//! All wavenumber integrals use the midpoint rule on the data's own
//! `(j + 1/2) Δk` nodes, so no interpolation is introduced.
//!
//! * [`indicator_single`]: `|Δk Σ_j u∞(θ_m,k_j) e^{i k_j θ_m·z}|`, constant on
//!   lines orthogonal to `θ_m` and large inside the strip hull of the support.
//! * [`indicator_multi`]: sum over directions, raw or normalized per direction.
//! * [`indicator_full`]: full-aperture version, a superposition of `J0` kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::FarFieldSamples;
use crate::geometry::{intersect_strips, ConvexPolygon, Strip, Vec2};

/// Number of samples in a strip-extraction profile.
pub const PROFILE_SAMPLES: usize = 801;
/// Default superlevel threshold for strip extraction.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Uniform grid of sampling points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    x_lo: f64,
    x_hi: f64,
    nx: usize,
    y_lo: f64,
    y_hi: f64,
    ny: usize,
}

impl Default for SamplingGrid {
    /// `[-4, 4]²` with 81 points per axis (spacing 0.1).
    fn default() -> Self {
        Self {
            x_lo: -4.0,
            x_hi: 4.0,
            nx: 81,
            y_lo: -4.0,
            y_hi: 4.0,
            ny: 81,
        }
    }
}

impl SamplingGrid {
    pub fn new(x_lo: f64, x_hi: f64, nx: usize, y_lo: f64, y_hi: f64, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::invalid(format!(
                "grid needs >= 2 points per axis, got {nx}x{ny}"
            )));
        }
        if !(x_lo < x_hi && y_lo < y_hi) || ![x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite())
        {
            return Err(Error::invalid("grid ranges must be finite with lo < hi"));
        }
        Ok(Self {
            x_lo,
            x_hi,
            nx,
            y_lo,
            y_hi,
            ny,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y_lo, self.y_hi)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_hi - self.y_lo) / (self.ny - 1) as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_lo + (self.x_hi - self.x_lo) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_lo + (self.y_hi - self.y_lo) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn point(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(self.x(ix), self.y(iy))
    }

    /// Point for flat index `i` (row-major, rows of constant `y`).
    pub fn point_at(&self, i: usize) -> Vec2 {
        self.point(i % self.nx, i / self.nx)
    }

    /// Same extent with `2n - 1` points per axis.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            ..*self
        }
    }

    /// Range of `z·θ` over the grid rectangle.
    pub fn projection_range(&self, theta: Vec2) -> (f64, f64) {
        let corners = [
            Vec2::new(self.x_lo, self.y_lo),
            Vec2::new(self.x_hi, self.y_lo),
            Vec2::new(self.x_hi, self.y_hi),
            Vec2::new(self.x_lo, self.y_hi),
        ];
        corners
            .iter()
            .map(|c| c.dot(theta))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t), hi.max(t))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorMode {
    /// Full-aperture indicator; needs uniformly spaced directions on the circle.
    Full,
    /// One observation direction (zero-based index).
    Single(usize),
    /// Plain sum over all directions.
    MultiRaw,
    /// Sum of per-direction indicators, each divided by its grid maximum.
    MultiNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub value: f64,
    pub ix: usize,
    pub iy: usize,
    pub location: Vec2,
}

/// Indicator values on a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    grid: SamplingGrid,
    mode: IndicatorMode,
    values: Vec<f64>,
    peak: Peak,
    normalized: bool,
}

impl IndicatorField {
    fn build(grid: SamplingGrid, mode: IndicatorMode, values: Vec<f64>, normalize: bool) -> Self {
        let (imax, vmax) =
            values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                    if *v > bv {
                        (i, *v)
                    } else {
                        (bi, bv)
                    }
                });
        let peak = Peak {
            value: vmax,
            ix: imax % grid.nx,
            iy: imax / grid.nx,
            location: grid.point_at(imax),
        };
        let scale = normalize && vmax > 0.0;
        let values = if scale {
            values.into_iter().map(|v| v / vmax).collect()
        } else {
            values
        };
        Self {
            grid,
            mode,
            values,
            peak,
            normalized: scale,
        }
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn mode(&self) -> IndicatorMode {
        self.mode
    }

    /// Row-major values, rows of constant `y` from `y_lo` upward.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Maximum of the raw indicator, recorded before any normalization.
    pub fn peak(&self) -> Peak {
        self.peak
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn check_direction(data: &FarFieldSamples, m: usize) -> Result<()> {
    if m >= data.n_directions() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: data.n_directions(),
        });
    }
    Ok(())
}

/// `Δk Σ_j u_j e^{i k_j s}` for one row of samples.
fn wavenumber_sum(data: &FarFieldSamples, row: &[Complex64], s: f64) -> Complex64 {
    let kgrid = data.kgrid();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, u) in row.iter().enumerate() {
        acc += u * Complex64::from_polar(1.0, kgrid.k(j) * s);
    }
    acc * kgrid.dk()
}

fn single_unchecked(data: &FarFieldSamples, m: usize, z: Vec2) -> f64 {
    let s = data.directions().direction(m).dot(z);
    wavenumber_sum(data, data.row(m), s).norm()
}

/// Single-direction indicator at sampling point `z`.
pub fn indicator_single(data: &FarFieldSamples, m: usize, z: Vec2) -> Result<f64> {
    check_direction(data, m)?;
    Ok(single_unchecked(data, m, z))
}

/// Per-direction weights for [`indicator_multi`].
#[derive(Debug, Clone, Copy)]
pub enum MultiWeights<'a> {
    Raw,
    /// Per-direction grid maxima from [`direction_peaks`].
    Normalized(&'a [f64]),
}

/// Grid maximum of every single-direction indicator.
pub fn direction_peaks(data: &FarFieldSamples, grid: &SamplingGrid) -> Vec<f64> {
    (0..data.n_directions())
        .into_par_iter()
        .map(|m| {
            (0..grid.len())
                .map(|i| single_unchecked(data, m, grid.point_at(i)))
                .fold(0.0, f64::max)
        })
        .collect()
}

fn check_weights(data: &FarFieldSamples, weights: MultiWeights) -> Result<()> {
    if let MultiWeights::Normalized(peaks) = weights {
        if peaks.len() != data.n_directions() {
            return Err(Error::ShapeMismatch(format!(
                "{} normalization constants for {} directions",
                peaks.len(),
                data.n_directions()
            )));
        }
        if let Some(m) = peaks.iter().position(|p| p.is_nan() || *p <= 0.0) {
            return Err(Error::DegenerateData(format!(
                "direction {m} has a zero indicator on the whole grid"
            )));
        }
    }
    Ok(())
}

fn multi_unchecked(data: &FarFieldSamples, z: Vec2, weights: MultiWeights) -> f64 {
    let mut acc = 0.0;
    for m in 0..data.n_directions() {
        let v = single_unchecked(data, m, z);
        acc += match weights {
            MultiWeights::Raw => v,
            MultiWeights::Normalized(p) => v / p[m],
        };
    }
    acc
}

/// Multi-direction indicator: `Σ_m I^{θ_m}(z)`, optionally with each term divided by its peak.
pub fn indicator_multi(data: &FarFieldSamples, z: Vec2, weights: MultiWeights) -> Result<f64> {
    check_weights(data, weights)?;
    Ok(multi_unchecked(data, z, weights))
}

fn check_full(data: &FarFieldSamples) -> Result<()> {
    let q = data.n_directions();
    if q < 16 {
        return Err(Error::invalid(format!(
            "full-aperture indicator needs at least 16 directions, got {q}"
        )));
    }
    if !data.directions().is_uniform_full() {
        return Err(Error::invalid(
            "full-aperture indicator needs uniformly spaced directions over the whole circle",
        ));
    }
    Ok(())
}

fn full_unchecked(data: &FarFieldSamples, z: Vec2) -> f64 {
    let q = data.n_directions();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..q {
        let s = data.directions().direction(m).dot(z);
        acc += wavenumber_sum(data, data.row(m), s);
    }
    (acc * (2.0 * std::f64::consts::PI / q as f64)).norm()
}

/// Full-aperture indicator `|Δk (2π/Q) Σ_j Σ_q u∞(θ_q,k_j) e^{i k_j θ_q·z}|`.
pub fn indicator_full(data: &FarFieldSamples, z: Vec2) -> Result<f64> {
    check_full(data)?;
    Ok(full_unchecked(data, z))
}

/// Evaluate an indicator at every grid point.
///
/// With `normalize`, Single and Full fields are divided by their maximum
/// (skipped when the maximum is zero). Multi fields are never rescaled.
pub fn compute_field(
    data: &FarFieldSamples,
    mode: IndicatorMode,
    grid: &SamplingGrid,
    normalize: bool,
) -> Result<IndicatorField> {
    let n = grid.len();
    let values: Vec<f64> = match mode {
        IndicatorMode::Single(m) => {
            check_direction(data, m)?;
            (0..n)
                .into_par_iter()
                .map(|i| single_unchecked(data, m, grid.point_at(i)))
                .collect()
        }
        IndicatorMode::Full => {
            check_full(data)?;
            (0..n)
                .into_par_iter()
                .map(|i| full_unchecked(data, grid.point_at(i)))
                .collect()
        }
        IndicatorMode::MultiRaw => (0..n)
            .into_par_iter()
            .map(|i| multi_unchecked(data, grid.point_at(i), MultiWeights::Raw))
            .collect(),
        IndicatorMode::MultiNormalized => {
            let peaks = direction_peaks(data, grid);
            check_weights(data, MultiWeights::Normalized(&peaks))?;
            (0..n)
                .into_par_iter()
                .map(|i| multi_unchecked(data, grid.point_at(i), MultiWeights::Normalized(&peaks)))
                .collect()
        }
    };
    let normalize = normalize && matches!(mode, IndicatorMode::Single(_) | IndicatorMode::Full);
    Ok(IndicatorField::build(*grid, mode, values, normalize))
}

/// Range of `τ` scanned by [`strip_profile`].
///
/// On the midpoint grid `k_j = (j + 1/2) Δk` the single-direction indicator
/// is periodic in `τ` with period `2π/Δk`, so a source at `τ` produces exact
/// copies at `τ ± 2π/Δk`. The scan is the grid's projection onto `θ`, cut to
/// the one period centered on the projection of the grid center.
pub fn profile_range(data: &FarFieldSamples, m: usize, grid: &SamplingGrid) -> Result<(f64, f64)> {
    check_direction(data, m)?;
    let theta = data.directions().direction(m);
    let (lo, hi) = grid.projection_range(theta);
    let center = 0.5 * (lo + hi);
    let half_period = PI / data.kgrid().dk();
    Ok((lo.max(center - half_period), hi.min(center + half_period)))
}

/// Profile `τ ↦ I^{θ_m}(τ θ_m)` on [`PROFILE_SAMPLES`] points spanning [`profile_range`].
pub fn strip_profile(
    data: &FarFieldSamples,
    m: usize,
    grid: &SamplingGrid,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = profile_range(data, m, grid)?;
    let theta = data.directions().direction(m);
    let last = (PROFILE_SAMPLES - 1) as f64;
    Ok((0..PROFILE_SAMPLES)
        .map(|i| {
            let tau = lo + (hi - lo) * i as f64 / last;
            (tau, single_unchecked(data, m, theta * tau))
        })
        .collect())
}

fn strip_for_direction(
    data: &FarFieldSamples,
    m: usize,
    grid: &SamplingGrid,
    threshold: f64,
) -> Result<Strip> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let profile = strip_profile(data, m, grid)?;
    let max = profile.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateData(format!(
            "indicator for direction {m} vanishes along the profile"
        )));
    }
    let level = threshold * max;
    let mut above = profile.iter().filter(|(_, v)| *v >= level).map(|(t, _)| *t);
    let first = above.next().expect("max sample is above the level");
    let last = above.next_back().unwrap_or(first);
    Strip::new(data.directions().direction(m), first, last)
}

/// Smallest interval of `τ` containing every profile sample at or above `threshold · max`.
///
/// The profile is evaluated directly (not interpolated from the field) over
/// [`profile_range`] for the field's grid.
pub fn extract_strip(
    data: &FarFieldSamples,
    field: &IndicatorField,
    threshold: f64,
) -> Result<Strip> {
    let IndicatorMode::Single(m) = field.mode() else {
        return Err(Error::invalid(
            "strip extraction needs a single-direction field",
        ));
    };
    strip_for_direction(data, m, field.grid(), threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullEstimate {
    /// `(direction index, estimated strip)` pairs.
    pub strips: Vec<(usize, Strip)>,
    pub polygon: ConvexPolygon,
}

/// Intersect estimated strips for the selected directions.
pub fn reconstruct_hull(
    data: &FarFieldSamples,
    directions: &[usize],
    grid: &SamplingGrid,
    threshold: f64,
) -> Result<HullEstimate> {
    let strips = directions
        .par_iter()
        .map(|&m| Ok((m, strip_for_direction(data, m, grid, threshold)?)))
        .collect::<Result<Vec<_>>>()?;
    let plain: Vec<Strip> = strips.iter().map(|(_, s)| *s).collect();
    let polygon = intersect_strips(&plain)?;
    Ok(HullEstimate { strips, polygon })
}

/// Perturbation of the full-aperture indicator and its triangle-inequality bound.
///
/// Returns `(|I(z) - I_δ(z)|, Δk (2π/Q) Σ_j Σ_q |u - u_δ|)`.
pub fn stability_gap(
    data: &FarFieldSamples,
    noisy: &FarFieldSamples,
    z: Vec2,
) -> Result<(f64, f64)> {
    if !data.same_layout(noisy) {
        return Err(Error::ShapeMismatch(
            "clean and noisy data have different directions or wavenumbers".into(),
        ));
    }
    check_full(data)?;
    let gap = (full_unchecked(data, z) - full_unchecked(noisy, z)).abs();
    let q = data.n_directions() as f64;
    let diff: f64 = data
        .values()
        .iter()
        .zip(noisy.values())
        .map(|(a, b)| (a - b).norm())
        .sum();
    let bound = data.kgrid().dk() * (2.0 * std::f64::consts::PI / q) * diff;
    Ok((gap, bound))
}
