//! Geometric and spectral containers shared by every module.
//!
//! Conventions: colatitude `theta` is measured from the north pole `(0, 0, 1)`,
//! longitude `phi` lies in `[0, 2π)`, and spectral tables are flat-indexed by
//! `ℓ² + ℓ + m`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cvec_dot_real, cvec_norm, czero, CVec3, Real};
use crate::sht::TensorGrid;

/// Position of `(ℓ, m)` in a flat spectral table.
pub fn flat_index(l: i64, m: i64) -> Result<usize> {
    if l < 0 || m < -l || m > l {
        return Err(Error::domain(format!("(ℓ, m) = ({l}, {m}) is out of range")));
    }
    Ok(idx(l as usize, m))
}

#[inline]
pub(crate) fn idx(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of `(ℓ, m)` pairs with `ℓ ≤ l_max`.
#[inline]
pub fn spectrum_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Tolerance used when validating unit-length input points.
pub(crate) fn unit_tol<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

/// A point on the unit sphere, stored in Cartesian form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T> {
    x: T,
    y: T,
    z: T,
}

impl<T: Real> SpherePoint<T> {
    /// Builds a point from Cartesian coordinates, which must have unit norm.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - T::one()).abs() > unit_tol::<T>() {
            return Err(Error::domain(format!("point ({x}, {y}, {z}) has norm {n}, expected 1")));
        }
        Ok(Self { x, y, z })
    }

    /// Projects a non-zero vector onto the sphere.
    pub fn normalized(x: T, y: T, z: T) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { x: x / n, y: y / n, z: z / n })
    }

    /// Point at colatitude `theta` and longitude `phi`.
    pub fn from_angles(theta: T, phi: T) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }

    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    #[inline]
    pub fn z(&self) -> T {
        self.z
    }

    #[inline]
    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Colatitude in `[0, π]`.
    pub fn theta(&self) -> T {
        self.z.max(-T::one()).min(T::one()).acos()
    }

    /// Longitude in `[0, 2π)`; zero at the poles.
    pub fn phi(&self) -> T {
        if self.x == T::zero() && self.y == T::zero() {
            return T::zero();
        }
        let mut phi = self.y.atan2(self.x);
        if phi < T::zero() {
            phi = phi + T::TAU();
        }
        if phi >= T::TAU() {
            phi = T::zero();
        }
        phi
    }

    /// `(theta, phi)` pair.
    pub fn to_spherical(&self) -> (T, T) {
        (self.theta(), self.phi())
    }

    /// Dot product with another point.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Complex coefficients `f̂_{ℓ,m}` for `0 ≤ ℓ ≤ l_max`, `|m| ≤ ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCoefficients<T> {
    l_max: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> ScalarCoefficients<T> {
    pub fn zeros(l_max: usize) -> Self {
        Self { l_max, values: vec![czero(); spectrum_len(l_max)] }
    }

    pub fn from_values(l_max: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != spectrum_len(l_max) {
            return Err(Error::LengthMismatch { expected: spectrum_len(l_max), got: values.len() });
        }
        Ok(Self { l_max, values })
    }

    #[inline]
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Entry at `(l, m)`; zero whenever the pair lies outside the table.
    #[inline]
    pub fn get(&self, l: i64, m: i64) -> Complex<T> {
        if l < 0 || l as usize > self.l_max || m < -l || m > l {
            czero()
        } else {
            self.values[idx(l as usize, m)]
        }
    }

    pub fn set(&mut self, l: i64, m: i64, v: Complex<T>) -> Result<()> {
        if l as usize > self.l_max {
            return Err(Error::domain(format!("degree {l} exceeds l_max {}", self.l_max)));
        }
        let k = flat_index(l, m)?;
        self.values[k] = v;
        Ok(())
    }

    /// Copy truncated or zero-padded to a new degree bound.
    pub fn resized(&self, l_max: usize) -> Self {
        let mut out = Self::zeros(l_max);
        let keep = spectrum_len(l_max.min(self.l_max));
        out.values[..keep].copy_from_slice(&self.values[..keep]);
        out
    }

    /// Iterates `(ℓ, m, value)` in flat-index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex<T>)> + '_ {
        (0..=self.l_max).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |m| (l, m, self.values[idx(l, m)]))
        })
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }
}

/// Divergence-free (`div`) and curl-free (`curl`) coefficient tables.
///
/// Both tables share `l_max ≥ 1` and their `ℓ = 0` entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCoefficients<T> {
    pub(crate) div: ScalarCoefficients<T>,
    pub(crate) curl: ScalarCoefficients<T>,
}

impl<T: Real> VectorCoefficients<T> {
    pub fn zeros(l_max: usize) -> Result<Self> {
        if l_max < 1 {
            return Err(Error::domain("vector coefficients need l_max ≥ 1"));
        }
        Ok(Self { div: ScalarCoefficients::zeros(l_max), curl: ScalarCoefficients::zeros(l_max) })
    }

    pub fn from_parts(div: ScalarCoefficients<T>, curl: ScalarCoefficients<T>) -> Result<Self> {
        if div.l_max() != curl.l_max() {
            return Err(Error::domain(format!(
                "div and curl tables disagree on l_max ({} vs {})",
                div.l_max(),
                curl.l_max()
            )));
        }
        if div.l_max() < 1 {
            return Err(Error::domain("vector coefficients need l_max ≥ 1"));
        }
        if div.get(0, 0) != czero() || curl.get(0, 0) != czero() {
            return Err(Error::domain("ℓ = 0 vector coefficients must be zero"));
        }
        Ok(Self { div, curl })
    }

    #[inline]
    pub fn l_max(&self) -> usize {
        self.div.l_max()
    }

    #[inline]
    pub fn div(&self) -> &ScalarCoefficients<T> {
        &self.div
    }

    #[inline]
    pub fn curl(&self) -> &ScalarCoefficients<T> {
        &self.curl
    }

    pub fn set_div(&mut self, l: i64, m: i64, v: Complex<T>) -> Result<()> {
        if l == 0 {
            return Err(Error::domain("ℓ = 0 has no vector harmonic"));
        }
        self.div.set(l, m, v)
    }

    pub fn set_curl(&mut self, l: i64, m: i64, v: Complex<T>) -> Result<()> {
        if l == 0 {
            return Err(Error::domain("ℓ = 0 has no vector harmonic"));
        }
        self.curl.set(l, m, v)
    }

    /// Largest entry-wise difference over both tables (zero-padded to a common degree).
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let l = self.l_max().max(other.l_max());
        let (a, b) = (self.div.resized(l), other.div.resized(l));
        let (c, d) = (self.curl.resized(l), other.curl.resized(l));
        let da = a.values.iter().zip(&b.values).fold(T::zero(), |m, (x, y)| m.max((x - y).norm()));
        let dc = c.values.iter().zip(&d.values).fold(T::zero(), |m, (x, y)| m.max((x - y).norm()));
        da.max(dc)
    }
}

/// Complex tangent vectors `T_k` attached to sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFieldSamples<T> {
    points: Vec<SpherePoint<T>>,
    values: Vec<CVec3<T>>,
}

impl<T: Real> TangentFieldSamples<T> {
    pub fn new(points: Vec<SpherePoint<T>>, values: Vec<CVec3<T>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch { expected: points.len(), got: values.len() });
        }
        if points.is_empty() {
            return Err(Error::domain("tangent field needs at least one sample"));
        }
        Ok(Self { points, values })
    }

    pub(crate) fn from_raw(points: Vec<SpherePoint<T>>, values: Vec<CVec3<T>>) -> Self {
        debug_assert_eq!(points.len(), values.len());
        Self { points, values }
    }

    /// Like [`TangentFieldSamples::new`] but also rejects samples with a
    /// normal component above `1e-8·(1 + |T_k|)`.
    pub fn new_tangent(points: Vec<SpherePoint<T>>, values: Vec<CVec3<T>>) -> Result<Self> {
        let s = Self::new(points, values)?;
        let tol = T::lit(1e-8).max(T::epsilon() * T::lit(256.0));
        for (k, (p, v)) in s.points.iter().zip(&s.values).enumerate() {
            if cvec_dot_real(v, &p.to_array()).norm() > tol * (T::one() + cvec_norm(v)) {
                return Err(Error::domain(format!("sample {k} is not tangent")));
            }
        }
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[SpherePoint<T>] {
        &self.points
    }

    #[inline]
    pub fn values(&self) -> &[CVec3<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<CVec3<T>> {
        self.values
    }

    /// Largest `|T_k · x_k|` over the samples.
    pub fn max_normal_component(&self) -> T {
        self.points
            .iter()
            .zip(&self.values)
            .fold(T::zero(), |m, (p, v)| m.max(cvec_dot_real(v, &p.to_array()).norm()))
    }

    /// Vector infinity norm: max over samples of the Euclidean magnitude.
    pub fn max_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(cvec_norm(v)))
    }

    /// `max_k |T_k − S_k|` (Euclidean per sample).
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| {
            let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            m.max(cvec_norm(&d))
        }))
    }
}

/// Provenance of a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GlTensor,
    SphericalDesign,
    Custom,
}

/// Weighted point set `{(w_i, x_i)}` with a claimed polynomial exactness.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    points: Vec<SpherePoint<T>>,
    weights: Vec<T>,
    exactness: Option<usize>,
    kind: RuleKind,
    grid: Option<TensorGrid<T>>,
}

impl<T: Real> QuadratureRule<T> {
    /// Validates weights against the claimed exactness and kind.
    pub fn new(
        points: Vec<SpherePoint<T>>,
        weights: Vec<T>,
        exactness: Option<usize>,
        kind: RuleKind,
    ) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: points.len(), got: weights.len() });
        }
        if points.is_empty() {
            return Err(Error::domain("quadrature rule needs at least one point"));
        }
        let four_pi = T::lit(4.0) * T::PI();
        let tol = T::lit(1e-8).max(T::epsilon() * T::from_usize_(points.len()) * T::lit(16.0));
        if exactness.is_some() {
            let total = weights.iter().fold(T::zero(), |s, &w| s + w);
            if (total - four_pi).abs() > tol {
                return Err(Error::domain(format!("weights sum to {total}, expected 4π")));
            }
        }
        if kind == RuleKind::SphericalDesign {
            let w = four_pi / T::from_usize_(points.len());
            if weights.iter().any(|&wi| (wi - w).abs() > tol) {
                return Err(Error::domain("spherical design weights must all equal 4π/N"));
            }
        }
        Ok(Self { points, weights, exactness, kind, grid: None })
    }

    /// Equal-weight rule on the given points.
    pub fn equal_weight(points: Vec<SpherePoint<T>>, exactness: Option<usize>, kind: RuleKind) -> Result<Self> {
        let w = T::lit(4.0) * T::PI() / T::from_usize_(points.len().max(1));
        let weights = vec![w; points.len()];
        Self::new(points, weights, exactness, kind)
    }

    pub(crate) fn with_grid(mut self, grid: TensorGrid<T>) -> Self {
        self.grid = Some(grid);
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[SpherePoint<T>] {
        &self.points
    }

    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn exactness(&self) -> Option<usize> {
        self.exactness
    }

    #[inline]
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Tensor structure, when the points form an iso-latitude grid.
    #[inline]
    pub fn grid(&self) -> Option<&TensorGrid<T>> {
        self.grid.as_ref()
    }

    /// Attaches tensor structure if the point layout is a ring-major
    /// iso-latitude grid with equispaced longitudes starting at zero.
    pub fn detect_grid(mut self) -> Self {
        if self.grid.is_none() {
            self.grid = TensorGrid::detect(&self.points, &self.weights);
        }
        self
    }
}
