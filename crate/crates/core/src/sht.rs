//! Forward and adjoint scalar spherical harmonic transforms.
//!
//! Two realizations share one contract:
//!
//! * the *direct* path sums over arbitrary weighted points in `O(N·L²)`;
//! * the *fast* path works on iso-latitude tensor grids: a discrete Fourier
//!   transform along each ring followed by a Legendre sum over rings for
//!   every order `m`, `O(N log n_φ + n_θ·L²)`.
//!
//! Longitudinal analysis uses `F_m = Σ_j f_j e^{−imφ_j}` with
//! `φ_j = 2πj/n_φ`. Orders are mapped to DFT bins by `m mod n_φ`; the sum
//! over grid points is the same for every member of a residue class, so
//! the fast path agrees with the direct one for any ring length.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::legendre::{sign_pow, tri, LegendreRecurrence};
use crate::scalar::{czero, Real};
use crate::types::{spectrum_len, QuadratureRule, RuleKind, ScalarCoefficients, SpherePoint};

/// Iso-latitude grid: `n_θ` rings, each with `n_φ` equispaced longitudes
/// starting at zero. Points are laid out ring-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid<T> {
    ring_thetas: Vec<T>,
    ring_cos: Vec<T>,
    ring_sin: Vec<T>,
    ring_weights: Vec<T>,
    n_phi: usize,
}

impl<T: Real> TensorGrid<T> {
    /// `ring_weights` are per-point weights (already including `2π/n_φ`).
    pub fn new(ring_thetas: Vec<T>, ring_weights: Vec<T>, n_phi: usize) -> Result<Self> {
        if ring_thetas.is_empty() || n_phi == 0 {
            return Err(Error::domain("tensor grid needs at least one ring and one longitude"));
        }
        if ring_thetas.len() != ring_weights.len() {
            return Err(Error::LengthMismatch { expected: ring_thetas.len(), got: ring_weights.len() });
        }
        for w in ring_thetas.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("ring colatitudes must be strictly increasing"));
            }
        }
        if !(ring_thetas[0] > T::zero()) || !(ring_thetas[ring_thetas.len() - 1] < T::PI()) {
            return Err(Error::domain("rings must lie strictly between the poles"));
        }
        let ring_cos = ring_thetas.iter().map(|t| t.cos()).collect();
        let ring_sin = ring_thetas.iter().map(|t| t.sin()).collect();
        Ok(Self { ring_thetas, ring_cos, ring_sin, ring_weights, n_phi })
    }

    /// Ring structure given directly by `cos θ`, `sin θ` pairs.
    pub(crate) fn from_cos_sin(cos: Vec<T>, sin: Vec<T>, ring_weights: Vec<T>, n_phi: usize) -> Result<Self> {
        let thetas: Vec<T> = cos.iter().zip(&sin).map(|(&c, &s)| s.atan2(c)).collect();
        let mut g = Self::new(thetas, ring_weights, n_phi)?;
        g.ring_cos = cos;
        g.ring_sin = sin;
        Ok(g)
    }

    #[inline]
    pub fn ring_thetas(&self) -> &[T] {
        &self.ring_thetas
    }

    #[inline]
    pub fn ring_weights(&self) -> &[T] {
        &self.ring_weights
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.ring_thetas.len()
    }

    #[inline]
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn phi(&self, j: usize) -> T {
        T::TAU() * T::from_usize_(j) / T::from_usize_(self.n_phi)
    }

    /// Grid points in ring-major order.
    pub fn points(&self) -> Vec<SpherePoint<T>> {
        let mut out = Vec::with_capacity(self.len());
        for r in 0..self.n_theta() {
            let (c, s) = (self.ring_cos[r], self.ring_sin[r]);
            for j in 0..self.n_phi {
                let (sp, cp) = self.phi(j).sin_cos();
                // (s cp, s sp, c) is unit up to rounding in s² + c²
                out.push(SpherePoint::normalized(s * cp, s * sp, c).expect("ring point"));
            }
        }
        out
    }

    /// Per-point weights in ring-major order.
    pub fn point_weights(&self) -> Vec<T> {
        self.ring_weights.iter().flat_map(|&w| std::iter::repeat(w).take(self.n_phi)).collect()
    }

    /// Flattened quadrature rule carrying this grid.
    pub fn to_rule(&self, exactness: Option<usize>, kind: RuleKind) -> Result<QuadratureRule<T>> {
        Ok(QuadratureRule::new(self.points(), self.point_weights(), exactness, kind)?.with_grid(self.clone()))
    }

    /// Recognizes a ring-major tensor layout in a flat point list.
    pub(crate) fn detect(points: &[SpherePoint<T>], weights: &[T]) -> Option<Self> {
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        let n = points.len();
        let z0 = points.first()?.z();
        let n_phi = points.iter().take_while(|p| (p.z() - z0).abs() <= tol).count();
        if n_phi == 0 || n % n_phi != 0 {
            return None;
        }
        let n_theta = n / n_phi;
        let (mut cos, mut sin, mut ws) = (Vec::new(), Vec::new(), Vec::new());
        for r in 0..n_theta {
            let ring = &points[r * n_phi..(r + 1) * n_phi];
            let wr = &weights[r * n_phi..(r + 1) * n_phi];
            let z = ring[0].z();
            let s = (ring[0].x() * ring[0].x() + ring[0].y() * ring[0].y()).sqrt();
            if !(s > tol) {
                return None;
            }
            for (j, (p, &w)) in ring.iter().zip(wr).enumerate() {
                if (p.z() - z).abs() > tol || (w - wr[0]).abs() > tol * (T::one() + wr[0].abs()) {
                    return None;
                }
                let phi = T::TAU() * T::from_usize_(j) / T::from_usize_(n_phi);
                let (sp, cp) = phi.sin_cos();
                if (p.x() - s * cp).abs() > tol * T::lit(16.0) || (p.y() - s * sp).abs() > tol * T::lit(16.0) {
                    return None;
                }
            }
            cos.push(z);
            sin.push(s);
            ws.push(wr[0]);
        }
        if cos.windows(2).any(|w| !(w[0] > w[1])) {
            return None;
        }
        Self::from_cos_sin(cos, sin, ws, n_phi).ok()
    }
}

fn check_len<T>(f: &[T], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    Ok(())
}

/// Chunk size for point-parallel reductions. Depends only on `n` so the
/// summation order is independent of the thread count.
fn reduction_chunk(n: usize) -> usize {
    (n / 64).max(64)
}

/// `F̂_{ℓ,m} = Σ_k w_k f_k conj(Y_{ℓ,m}(x_k))` by direct summation.
pub fn forward_sht_direct<T: Real>(
    f: &[Complex<T>],
    rule: &QuadratureRule<T>,
    l_max: usize,
) -> Result<ScalarCoefficients<T>> {
    let mut out = forward_direct_batch(&[f], rule.points(), rule.weights(), l_max)?;
    Ok(out.pop().expect("one transform"))
}

/// Several direct forward transforms over the same points, sharing the
/// Legendre evaluations.
pub(crate) fn forward_direct_batch<T: Real>(
    fs: &[&[Complex<T>]],
    points: &[SpherePoint<T>],
    weights: &[T],
    l_max: usize,
) -> Result<Vec<ScalarCoefficients<T>>> {
    let n = points.len();
    check_len(weights, n)?;
    for f in fs {
        check_len(f, n)?;
    }
    let nb = fs.len();
    let len = spectrum_len(l_max);
    let rec = LegendreRecurrence::<T>::new(l_max);
    let chunk = reduction_chunk(n);
    let idx: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<Complex<T>>> = idx
        .par_chunks(chunk)
        .map(|ks| {
            let mut acc = vec![czero(); nb * len];
            let mut leg = vec![T::zero(); tri(l_max, l_max) + 1];
            let mut g = vec![czero(); nb];
            for &k in ks {
                let p = &points[k];
                let t = p.z().max(-T::one()).min(T::one());
                let s = (p.x() * p.x() + p.y() * p.y()).sqrt();
                rec.fill(t, s, &mut leg);
                let phi = p.phi();
                for (gb, f) in g.iter_mut().zip(fs) {
                    *gb = f[k] * weights[k];
                }
                for m in 0..=l_max {
                    let e = Complex::from_polar(T::one(), T::from_usize_(m) * phi);
                    let sign = sign_pow::<T>(m as i64);
                    for (b, &gb) in g.iter().enumerate() {
                        let pos = gb * e.conj();
                        let neg = gb * e * sign;
                        let acc = &mut acc[b * len..(b + 1) * len];
                        for l in m..=l_max {
                            let pl = leg[tri(l, m)];
                            let base = l * l + l;
                            acc[base + m] = acc[base + m] + pos * pl;
                            if m > 0 {
                                acc[base - m] = acc[base - m] + neg * pl;
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![czero(); nb * len];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t = *t + p;
        }
    }
    Ok(total
        .chunks(len)
        .map(|c| ScalarCoefficients::from_values(l_max, c.to_vec()).expect("sized"))
        .collect())
}

/// `S_L(g; x_i) = Σ_{ℓ ≤ L} Σ_m g_{ℓ,m} Y_{ℓ,m}(x_i)` by direct summation.
pub fn adjoint_sht_direct<T: Real>(g: &ScalarCoefficients<T>, points: &[SpherePoint<T>]) -> Vec<Complex<T>> {
    adjoint_direct_batch(&[g], points).pop().expect("one transform")
}

pub(crate) fn adjoint_direct_batch<T: Real>(
    gs: &[&ScalarCoefficients<T>],
    points: &[SpherePoint<T>],
) -> Vec<Vec<Complex<T>>> {
    let l_max = gs.iter().map(|g| g.l_max()).max().unwrap_or(0);
    let nb = gs.len();
    let rec = LegendreRecurrence::<T>::new(l_max);
    let per_point: Vec<Vec<Complex<T>>> = points
        .par_iter()
        .map_init(
            || vec![T::zero(); tri(l_max, l_max) + 1],
            |leg, p| {
                let t = p.z().max(-T::one()).min(T::one());
                let s = (p.x() * p.x() + p.y() * p.y()).sqrt();
                rec.fill(t, s, leg);
                let phi = p.phi();
                let mut out = vec![czero(); nb];
                for m in 0..=l_max as i64 {
                    let e = Complex::from_polar(T::one(), T::from_i64_(m) * phi);
                    let sign = sign_pow::<T>(m);
                    for (o, g) in out.iter_mut().zip(gs) {
                        let gl = g.l_max() as i64;
                        if m > gl {
                            continue;
                        }
                        let (mut pos, mut neg) = (czero::<T>(), czero::<T>());
                        for l in m..=gl {
                            let pl = leg[tri(l as usize, m as usize)];
                            pos = pos + g.get(l, m) * pl;
                            if m > 0 {
                                neg = neg + g.get(l, -m) * pl;
                            }
                        }
                        *o = *o + pos * e;
                        if m > 0 {
                            *o = *o + neg * e.conj() * sign;
                        }
                    }
                }
                out
            },
        )
        .collect();
    let mut res = vec![Vec::with_capacity(points.len()); nb];
    for v in per_point {
        for (r, x) in res.iter_mut().zip(v) {
            r.push(x);
        }
    }
    res
}

struct RingPlans<T: Real> {
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> RingPlans<T> {
    fn forward(n: usize) -> Self {
        Self { fft: FftPlanner::new().plan_fft_forward(n) }
    }

    fn inverse(n: usize) -> Self {
        Self { fft: FftPlanner::new().plan_fft_inverse(n) }
    }

    fn run(&self, data: &mut [Complex<T>], n: usize) {
        let scratch_len = self.fft.get_inplace_scratch_len();
        data.par_chunks_mut(n).for_each_init(
            || vec![czero(); scratch_len],
            |scratch, ring| self.fft.process_with_scratch(ring, scratch),
        );
    }
}

#[inline]
fn bin(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Diagonal seeds `P̄_m^m(θ_r)` for every ring, ring-major.
fn ring_seeds<T: Real>(rec: &LegendreRecurrence<T>, grid: &TensorGrid<T>) -> Vec<T> {
    let l1 = rec.l_max() + 1;
    let mut seeds = vec![T::zero(); grid.n_theta() * l1];
    seeds.par_chunks_mut(l1).enumerate().for_each(|(r, out)| rec.seeds(grid.ring_sin[r], out));
    seeds
}

/// Fast forward transform on a tensor grid; same contract as
/// [`forward_sht_direct`] on the induced rule.
pub fn forward_sht_fast<T: Real>(
    f: &[Complex<T>],
    grid: &TensorGrid<T>,
    l_max: usize,
) -> Result<ScalarCoefficients<T>> {
    let mut out = forward_fast_batch(&[f], grid, l_max)?;
    Ok(out.pop().expect("one transform"))
}

pub(crate) fn forward_fast_batch<T: Real>(
    fs: &[&[Complex<T>]],
    grid: &TensorGrid<T>,
    l_max: usize,
) -> Result<Vec<ScalarCoefficients<T>>> {
    let n = grid.len();
    let n_phi = grid.n_phi;
    let n_theta = grid.n_theta();
    for f in fs {
        check_len(f, n)?;
    }
    let plans = RingPlans::<T>::forward(n_phi);
    let spectra: Vec<Vec<Complex<T>>> = fs
        .iter()
        .map(|f| {
            let mut data = f.to_vec();
            plans.run(&mut data, n_phi);
            data
        })
        .collect();

    let rec = LegendreRecurrence::<T>::new(l_max);
    let seeds = ring_seeds(&rec, grid);
    let nb = fs.len();
    // columns[m] holds, per transform, the values for ℓ = m..=L at +m and −m
    let columns: Vec<Vec<Complex<T>>> = (0..=l_max)
        .into_par_iter()
        .map(|m| {
            let cl = l_max + 1 - m;
            let mut acc = vec![czero(); nb * 2 * cl];
            let mut col = vec![T::zero(); cl];
            let (bp, bn) = (bin(m as i64, n_phi), bin(-(m as i64), n_phi));
            let sign = sign_pow::<T>(m as i64);
            for r in 0..n_theta {
                rec.column(m, grid.ring_cos[r], seeds[r * (l_max + 1) + m], &mut col);
                let w = grid.ring_weights[r];
                for (b, spec) in spectra.iter().enumerate() {
                    let pos = spec[r * n_phi + bp] * w;
                    let neg = spec[r * n_phi + bn] * (w * sign);
                    let a = &mut acc[b * 2 * cl..(b + 1) * 2 * cl];
                    for (i, &pl) in col.iter().enumerate() {
                        a[i] = a[i] + pos * pl;
                        a[cl + i] = a[cl + i] + neg * pl;
                    }
                }
            }
            acc
        })
        .collect();

    let mut out = vec![ScalarCoefficients::zeros(l_max); nb];
    for (m, acc) in columns.iter().enumerate() {
        let cl = l_max + 1 - m;
        for (b, o) in out.iter_mut().enumerate() {
            let vals = o.values_mut();
            for i in 0..cl {
                let l = m + i;
                let base = l * l + l;
                vals[base + m] = acc[b * 2 * cl + i];
                if m > 0 {
                    vals[base - m] = acc[b * 2 * cl + cl + i];
                }
            }
        }
    }
    Ok(out)
}

/// Fast adjoint transform on a tensor grid; values in ring-major order.
pub fn adjoint_sht_fast<T: Real>(g: &ScalarCoefficients<T>, grid: &TensorGrid<T>) -> Vec<Complex<T>> {
    adjoint_fast_batch(&[g], grid).pop().expect("one transform")
}

pub(crate) fn adjoint_fast_batch<T: Real>(gs: &[&ScalarCoefficients<T>], grid: &TensorGrid<T>) -> Vec<Vec<Complex<T>>> {
    let l_max = gs.iter().map(|g| g.l_max()).max().unwrap_or(0);
    let n_phi = grid.n_phi;
    let n_theta = grid.n_theta();
    let rec = LegendreRecurrence::<T>::new(l_max);
    let seeds = ring_seeds(&rec, grid);
    let nb = gs.len();

    // Per order m ≥ 0: ring sums for +m and −m, per transform.
    let columns: Vec<Vec<Complex<T>>> = (0..=l_max)
        .into_par_iter()
        .map(|m| {
            let cl = l_max + 1 - m;
            let mut col = vec![T::zero(); cl];
            let mut out = vec![czero(); nb * 2 * n_theta];
            let sign = sign_pow::<T>(m as i64);
            for r in 0..n_theta {
                rec.column(m, grid.ring_cos[r], seeds[r * (l_max + 1) + m], &mut col);
                for (b, g) in gs.iter().enumerate() {
                    let (mut pos, mut neg) = (czero(), czero());
                    for (i, &pl) in col.iter().enumerate() {
                        let l = (m + i) as i64;
                        pos = pos + g.get(l, m as i64) * pl;
                        if m > 0 {
                            neg = neg + g.get(l, -(m as i64)) * pl;
                        }
                    }
                    out[b * 2 * n_theta + r] = pos;
                    out[b * 2 * n_theta + n_theta + r] = neg * sign;
                }
            }
            out
        })
        .collect();

    let plans = RingPlans::<T>::inverse(n_phi);
    (0..nb)
        .map(|b| {
            let mut data = vec![czero(); grid.len()];
            data.par_chunks_mut(n_phi).enumerate().for_each(|(r, ring)| {
                for (m, col) in columns.iter().enumerate() {
                    let pos = col[b * 2 * n_theta + r];
                    let k = bin(m as i64, n_phi);
                    ring[k] = ring[k] + pos;
                    if m > 0 {
                        let k = bin(-(m as i64), n_phi);
                        ring[k] = ring[k] + col[b * 2 * n_theta + n_theta + r];
                    }
                }
            });
            plans.run(&mut data, n_phi);
            data
        })
        .collect()
}
