//! Far-field data synthesis by midpoint quadrature over triangle meshes.
//!
//! For a source `F` supported on `D`, the far field in direction `θ` at
//! wavenumber `k` is `u∞(θ,k) = ∫_D e^{-ik θ·y} F(y,k) dy`, approximated by
//! `Σ_T e^{-ik θ·y_T} F(y_T,k) |T|` with `y_T` the centroid of triangle `T`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{triangulate, Shape, TriangleMesh, Vec2};
use crate::srcexpr::{self, Expr};

/// Default mesh size for synthesis.
pub const DEFAULT_MESH_H: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct SceneComponent {
    pub shape: Shape,
    pub amplitude: Expr,
}

#[derive(Default)]
struct MeshCache(Mutex<HashMap<u64, Arc<Vec<TriangleMesh>>>>);

impl Clone for MeshCache {
    fn clone(&self) -> Self {
        MeshCache(Mutex::new(self.0.lock().unwrap().clone()))
    }
}

impl fmt::Debug for MeshCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<f64> = self
            .0
            .lock()
            .unwrap()
            .keys()
            .map(|b| f64::from_bits(*b))
            .collect();
        f.debug_tuple("MeshCache").field(&sizes).finish()
    }
}

/// A source: amplitude expressions restricted to pairwise disjoint shapes.
#[derive(Debug, Clone)]
pub struct Scene {
    components: Vec<SceneComponent>,
    meshes: MeshCache,
}

impl Scene {
    /// Validates shapes and rejects components whose interiors overlap.
    /// Shared boundaries (touching rectangles) are accepted.
    pub fn new(components: Vec<SceneComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("scene needs at least one component"));
        }
        for (i, c) in components.iter().enumerate() {
            c.shape
                .validate()
                .map_err(|e| Error::invalid(format!("component {i}: {e}")))?;
        }
        for i in 0..components.len() {
            for j in (i + 1)..components.len() {
                if components[i].shape.interiors_overlap(&components[j].shape) {
                    return Err(Error::invalid(format!("components {i} and {j} overlap")));
                }
            }
        }
        Ok(Self {
            components,
            meshes: MeshCache::default(),
        })
    }

    /// Build from `(shape, expression text)` pairs.
    pub fn from_sources<'a>(sources: impl IntoIterator<Item = (Shape, &'a str)>) -> Result<Self> {
        let components = sources
            .into_iter()
            .enumerate()
            .map(|(i, (shape, text))| {
                let amplitude = srcexpr::parse(text).map_err(|source| Error::Source {
                    component: i,
                    source,
                })?;
                Ok(SceneComponent { shape, amplitude })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn components(&self) -> &[SceneComponent] {
        &self.components
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| c.shape.area()).sum()
    }

    /// Per-component meshes at size `h`, built once and cached.
    pub fn meshes(&self, h: f64) -> Result<Arc<Vec<TriangleMesh>>> {
        let key = h.to_bits();
        if let Some(m) = self.meshes.0.lock().unwrap().get(&key) {
            return Ok(Arc::clone(m));
        }
        let built = self
            .components
            .iter()
            .map(|c| triangulate(&c.shape, h))
            .collect::<Result<Vec<_>>>()?;
        let built = Arc::new(built);
        self.meshes
            .0
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&built));
        Ok(built)
    }

    pub fn translated(&self, t: Vec2) -> Result<Scene> {
        let shifted = self
            .components
            .iter()
            .map(|c| SceneComponent {
                shape: c.shape.translated(t),
                amplitude: c.amplitude.clone(),
            })
            .collect();
        Scene::new(shifted)
    }
}

/// Midpoint wavenumber grid `k_j = (j + 1/2) Δk`, `j = 0..n`, `Δk = k_max / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavenumberGrid {
    n: usize,
    k_max: f64,
}

impl WavenumberGrid {
    pub fn new(n: usize, k_max: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("wavenumber count must be positive"));
        }
        if !(k_max > 0.0 && k_max.is_finite()) {
            return Err(Error::invalid(format!(
                "k_max must be positive, got {k_max}"
            )));
        }
        Ok(Self { n, k_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn dk(&self) -> f64 {
        self.k_max / self.n as f64
    }

    /// Wavenumber for zero-based index `j`.
    pub fn k(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dk()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.k(j)).collect()
    }
}

/// Observation directions `θ_m = (cos φ_m, sin φ_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    angles: Vec<f64>,
}

impl DirectionSet {
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("direction set is empty"));
        }
        if !angles.iter().all(|a| a.is_finite()) {
            return Err(Error::invalid("direction angles must be finite"));
        }
        for i in 0..angles.len() {
            for j in (i + 1)..angles.len() {
                if Vec2::from_angle(angles[i]).dist(Vec2::from_angle(angles[j])) < 1e-12 {
                    return Err(Error::invalid(format!(
                        "directions {i} and {j} coincide (angles {} and {})",
                        angles[i], angles[j]
                    )));
                }
            }
        }
        Ok(Self { angles })
    }

    /// `φ_j = -π/2 + jπ/M`, `j = 1..=M`: half-circle sparse aperture.
    pub fn sparse(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("direction count must be positive"));
        }
        Self::from_angles(
            (1..=m)
                .map(|j| -PI / 2.0 + j as f64 * PI / m as f64)
                .collect(),
        )
    }

    /// `φ_q = 2πq/Q`, `q = 0..Q`: full aperture.
    pub fn full(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("direction count must be positive"));
        }
        Self::from_angles((0..q).map(|i| 2.0 * PI * i as f64 / q as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, m: usize) -> f64 {
        self.angles[m]
    }

    pub fn direction(&self, m: usize) -> Vec2 {
        Vec2::from_angle(self.angles[m])
    }

    pub fn directions(&self) -> Vec<Vec2> {
        self.angles.iter().map(|a| Vec2::from_angle(*a)).collect()
    }

    /// True if the angles are `Q` equispaced points covering the whole circle.
    pub fn is_uniform_full(&self) -> bool {
        let q = self.angles.len();
        if q < 3 {
            return false;
        }
        let mut wrapped: Vec<f64> = self.angles.iter().map(|a| a.rem_euclid(2.0 * PI)).collect();
        wrapped.sort_by(f64::total_cmp);
        let step = 2.0 * PI / q as f64;
        (0..q).all(|i| {
            let next = if i + 1 < q {
                wrapped[i + 1]
            } else {
                wrapped[0] + 2.0 * PI
            };
            (next - wrapped[i] - step).abs() < 1e-9
        })
    }
}

/// Far-field samples `u∞(θ_m, k_j)` stored row-major by direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldSamples {
    directions: DirectionSet,
    kgrid: WavenumberGrid,
    values: Vec<Complex64>,
}

impl FarFieldSamples {
    pub fn new(
        directions: DirectionSet,
        kgrid: WavenumberGrid,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let want = directions.len() * kgrid.len();
        if values.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "expected {} x {} = {want} values, got {}",
                directions.len(),
                kgrid.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::invalid(format!(
                "non-finite far-field value at index {i}"
            )));
        }
        Ok(Self {
            directions,
            kgrid,
            values,
        })
    }

    pub fn zeros(directions: DirectionSet, kgrid: WavenumberGrid) -> Self {
        let n = directions.len() * kgrid.len();
        Self {
            directions,
            kgrid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn kgrid(&self) -> &WavenumberGrid {
        &self.kgrid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_directions(&self) -> usize {
        self.directions.len()
    }

    pub fn n_wavenumbers(&self) -> usize {
        self.kgrid.len()
    }

    pub fn get(&self, m: usize, j: usize) -> Complex64 {
        self.values[m * self.kgrid.len() + j]
    }

    /// All wavenumber samples for direction `m`.
    pub fn row(&self, m: usize) -> &[Complex64] {
        let n = self.kgrid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiply every sample by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            directions: self.directions.clone(),
            kgrid: self.kgrid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.directions == other.directions
            && self.kgrid == other.kgrid
            && self.values.len() == other.values.len()
    }
}

fn quadrature_sum(mesh: &TriangleMesh, fvals: &[Complex64], theta: Vec2, k: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((c, a), f) in mesh.centroids().iter().zip(mesh.areas()).zip(fvals) {
        acc += Complex64::from_polar(*a, -k * theta.dot(*c)) * f;
    }
    acc
}

fn amplitudes(scene: &Scene, meshes: &[TriangleMesh], k: f64) -> Result<Vec<Vec<Complex64>>> {
    scene
        .components
        .iter()
        .zip(meshes)
        .enumerate()
        .map(|(i, (comp, mesh))| {
            mesh.centroids()
                .iter()
                .map(|c| {
                    comp.amplitude
                        .evaluate(c.x, c.y, k)
                        .map_err(|source| Error::Source {
                            component: i,
                            source,
                        })
                })
                .collect()
        })
        .collect()
}

fn check_theta_k(theta: Vec2, k: f64) -> Result<()> {
    if (theta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "direction must be a unit vector, got {theta}"
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    Ok(())
}

/// Midpoint-rule far field of `scene` in direction `theta` at wavenumber `k`.
pub fn far_field(scene: &Scene, theta: Vec2, k: f64, h: f64) -> Result<Complex64> {
    check_theta_k(theta, k)?;
    let meshes = scene.meshes(h)?;
    let fvals = amplitudes(scene, &meshes, k)?;
    Ok(meshes
        .iter()
        .zip(&fvals)
        .map(|(mesh, f)| quadrature_sum(mesh, f, theta, k))
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v))
}

/// Exact far field of a constant amplitude `c` on an axis-aligned rectangle.
pub fn far_field_rect_const(rect: &Shape, c: Complex64, theta: Vec2, k: f64) -> Result<Complex64> {
    let Shape::Rectangle {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
    } = *rect
    else {
        return Err(Error::invalid("closed-form far field needs a rectangle"));
    };
    if k.is_nan() || k <= 0.0 {
        return Err(Error::invalid(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let factor = |a: f64, b: f64, w: f64| {
        if w.abs() > 1e-12 {
            (Complex64::from_polar(1.0, -w * a) - Complex64::from_polar(1.0, -w * b))
                / Complex64::new(0.0, w)
        } else {
            Complex64::new(b - a, 0.0)
        }
    };
    Ok(c * factor(x_lo, x_hi, k * theta.x) * factor(y_lo, y_hi, k * theta.y))
}

/// Far field on every `(θ_m, k_j)` pair. Deterministic regardless of thread count.
pub fn synthesize(
    scene: &Scene,
    dirs: &DirectionSet,
    kgrid: &WavenumberGrid,
    h: f64,
) -> Result<FarFieldSamples> {
    let meshes = scene.meshes(h)?;
    let thetas = dirs.directions();
    let n = kgrid.len();
    // one column (fixed k) per task; amplitudes are shared across directions
    let columns = (0..n)
        .into_par_iter()
        .map(|j| {
            let k = kgrid.k(j);
            let fvals = amplitudes(scene, &meshes, k)?;
            Ok(thetas
                .iter()
                .map(|theta| {
                    meshes
                        .iter()
                        .zip(&fvals)
                        .map(|(mesh, f)| quadrature_sum(mesh, f, *theta, k))
                        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![Complex64::new(0.0, 0.0); dirs.len() * n];
    for (j, col) in columns.into_iter().enumerate() {
        for (m, v) in col.into_iter().enumerate() {
            values[m * n + j] = v;
        }
    }
    FarFieldSamples::new(dirs.clone(), *kgrid, values)
}

/// Additive noise `u + δ·η·max|u|` with `η` uniform on `[-1,1]²/√2`, seeded.
pub fn add_noise(data: &FarFieldSamples, delta: f64, seed: u64) -> Result<FarFieldSamples> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!(
            "noise level must be >= 0, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(data.clone());
    }
    let scale = delta * data.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = data
        .values
        .iter()
        .map(|u| {
            let re: f64 = rng.random_range(-1.0..=1.0);
            let im: f64 = rng.random_range(-1.0..=1.0);
            u + Complex64::new(re, im) * (scale / std::f64::consts::SQRT_2)
        })
        .collect();
    FarFieldSamples::new(data.directions.clone(), data.kgrid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2a(amplitude: &str) -> Scene {
        Scene::from_sources([(Shape::rectangle(1.0, 2.0, 1.0, 1.6).unwrap(), amplitude)]).unwrap()
    }

    #[test]
    fn default_grids() {
        let kg = WavenumberGrid::new(20, 20.0).unwrap();
        assert_eq!(kg.k(0), 0.5);
        assert_eq!(kg.k(19), 19.5);
        assert_eq!(kg.dk(), 1.0);
        let ks = kg.values();
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert!(ks[0] > 0.0 && *ks.last().unwrap() < kg.k_max());
        let dirs = DirectionSet::sparse(20).unwrap();
        assert_eq!(dirs.len(), 20);
        assert!((dirs.angle(19) - PI / 2.0).abs() < 1e-15);
        assert!((dirs.angle(0) - (-PI / 2.0 + PI / 20.0)).abs() < 1e-15);
        assert!(!dirs.is_uniform_full());
        assert!(DirectionSet::full(64).unwrap().is_uniform_full());
        assert!(DirectionSet::from_angles(vec![0.0, 2.0 * PI]).is_err());
        assert!(WavenumberGrid::new(0, 1.0).is_err());
    }

    #[test]
    fn low_k_limit_is_mass() {
        let scene = fig2a("5");
        let u = far_field(&scene, Vec2::new(0.0, 1.0), 1e-6, DEFAULT_MESH_H).unwrap();
        assert!((u - Complex64::new(3.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn rect_matches_closed_form() {
        let scene = fig2a("5");
        let rect = &scene.components()[0].shape;
        let theta = Vec2::new(0.0, 1.0);
        let got = far_field(&scene, theta, 20.0, 0.02).unwrap();
        let want = far_field_rect_const(rect, Complex64::new(5.0, 0.0), theta, 20.0).unwrap();
        assert!((got - want).norm() <= 1e-2 * 3.0);
        let k = 20.0f64;
        let modulus = 5.0
            * (Complex64::from_polar(1.0, -k) - Complex64::from_polar(1.0, -1.6 * k)).norm()
            / k;
        assert!((want.norm() - modulus).abs() < 1e-12);
    }

    #[test]
    fn rect_closed_form_small_k_branch() {
        let sq = Shape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let v = far_field_rect_const(&sq, Complex64::new(1.0, 0.0), Vec2::new(1.0, 0.0), 1e-13)
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(far_field_rect_const(
            &Shape::disc(Vec2::default(), 1.0).unwrap(),
            Complex64::new(1.0, 0.0),
            Vec2::new(1.0, 0.0),
            1.0
        )
        .is_err());
    }

    #[test]
    fn zero_amplitude_gives_zero_data() {
        let data = synthesize(
            &fig2a("0"),
            &DirectionSet::sparse(4).unwrap(),
            &WavenumberGrid::new(5, 20.0).unwrap(),
            0.05,
        )
        .unwrap();
        assert!(data.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn synthesis_is_linear_and_matches_far_field() {
        let dirs = DirectionSet::sparse(5).unwrap();
        let kg = WavenumberGrid::new(6, 20.0).unwrap();
        let g = synthesize(&fig2a("x^2-y^2+5"), &dirs, &kg, 0.05).unwrap();
        let g2 = synthesize(&fig2a("2*(x^2-y^2+5)"), &dirs, &kg, 0.05).unwrap();
        for (a, b) in g.values().iter().zip(g2.values()) {
            assert!((a * 2.0 - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
        let scene = fig2a("x^2-y^2+5");
        for m in 0..dirs.len() {
            for j in 0..kg.len() {
                let single = far_field(&scene, dirs.direction(m), kg.k(j), 0.05).unwrap();
                assert_eq!(single, g.get(m, j));
            }
        }
    }

    #[test]
    fn expression_errors_carry_component() {
        let scene = Scene::from_sources([
            (Shape::rectangle(-1.0, 0.0, 0.0, 1.0).unwrap(), "1"),
            (Shape::rectangle(1.0, 2.0, 0.0, 1.0).unwrap(), "1/(k-k)"),
        ])
        .unwrap();
        let err = far_field(&scene, Vec2::new(1.0, 0.0), 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::Source { component: 1, .. }), "{err}");
        let err = Scene::from_sources([(Shape::rectangle(-1.0, 0.0, 0.0, 1.0).unwrap(), "1+")])
            .unwrap_err();
        assert!(matches!(err, Error::Source { component: 0, .. }));
    }

    #[test]
    fn overlapping_components_rejected() {
        let err = Scene::from_sources([
            (Shape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap(), "1"),
            (Shape::disc(Vec2::new(0.5, 0.5), 0.1).unwrap(), "1"),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn noise_contract() {
        let data = synthesize(
            &fig2a("5"),
            &DirectionSet::sparse(20).unwrap(),
            &WavenumberGrid::new(20, 20.0).unwrap(),
            0.05,
        )
        .unwrap();
        assert_eq!(add_noise(&data, 0.0, 7).unwrap(), data);
        let a = add_noise(&data, 0.05, 42).unwrap();
        let b = add_noise(&data, 0.05, 42).unwrap();
        assert!(a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        assert_ne!(add_noise(&data, 0.05, 43).unwrap(), a);
        let max = data.max_abs();
        let dev = a
            .values()
            .iter()
            .zip(data.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(dev <= 0.05 * max * (1.0 + 1e-12));
        assert!(dev >= 0.01 * max);
        assert!(add_noise(&data, -0.1, 0).is_err());
    }

    #[test]
    fn mesh_cache_reused() {
        let scene = fig2a("5");
        let a = scene.meshes(0.05).unwrap();
        let b = scene.meshes(0.05).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = scene.meshes(0.1).unwrap();
        assert!(!Arc::ptr_eq(&a, &c));
    }
}
