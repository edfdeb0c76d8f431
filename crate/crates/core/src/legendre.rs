//! Normalized associated Legendre functions and complex scalar harmonics.
//!
//! `P̄_ℓ^m(t)` includes both the factor `√((2ℓ+1)/(4π) · (ℓ−m)!/(ℓ+m)!)` and
//! the Condon–Shortley phase, so `Y_{ℓ,m}(θ, φ) = P̄_ℓ^m(cos θ) e^{imφ}` for
//! `m ≥ 0` and `Y_{ℓ,−m} = (−1)^m conj(Y_{ℓ,m})`.
//!
//! Everything is computed with normalized recurrences; raw `P_ℓ^m` would
//! overflow long before `ℓ ≈ 150`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Real};
use crate::types::{ScalarCoefficients, SpherePoint};

#[inline]
pub(crate) fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Precomputed three-term recurrence factors up to a degree bound.
#[derive(Debug, Clone)]
pub(crate) struct LegendreRecurrence<T> {
    l_max: usize,
    // a_{ℓ,m}, b_{ℓ,m} for ℓ ≥ m + 2, and the diagonal factors.
    a: Vec<T>,
    b: Vec<T>,
    diag: Vec<T>,
    sub: Vec<T>,
}

impl<T: Real> LegendreRecurrence<T> {
    pub(crate) fn new(l_max: usize) -> Self {
        let n = tri(l_max, l_max) + 1;
        let mut a = vec![T::zero(); n];
        let mut b = vec![T::zero(); n];
        for m in 0..=l_max {
            for l in (m + 2)..=l_max {
                let (lf, mf) = (l as f64, m as f64);
                let l1 = lf - 1.0;
                a[tri(l, m)] = T::lit(((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt());
                b[tri(l, m)] = T::lit(((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt());
            }
        }
        let diag = (0..=l_max)
            .map(|m| if m == 0 { T::zero() } else { T::lit(-((2 * m + 1) as f64 / (2 * m) as f64).sqrt()) })
            .collect();
        let sub = (0..=l_max).map(|m| T::lit(((2 * m + 3) as f64).sqrt())).collect();
        Self { l_max, a, b, diag, sub }
    }

    #[inline]
    pub(crate) fn l_max(&self) -> usize {
        self.l_max
    }

    /// Writes `P̄_ℓ^m(t)` for `0 ≤ m ≤ ℓ ≤ l_max` into `out` (triangular order),
    /// where `s = √(1 − t²)`.
    pub(crate) fn fill(&self, t: T, s: T, out: &mut [T]) {
        let l_max = self.l_max;
        debug_assert!(out.len() > tri(l_max, l_max));
        let mut pmm = T::one() / (T::lit(4.0) * T::PI()).sqrt();
        for m in 0..=l_max {
            if m > 0 {
                pmm = self.diag[m] * s * pmm;
            }
            out[tri(m, m)] = pmm;
            if m == l_max {
                break;
            }
            let mut p2 = pmm;
            let mut p1 = self.sub[m] * t * pmm;
            out[tri(m + 1, m)] = p1;
            for l in (m + 2)..=l_max {
                let k = tri(l, m);
                let p = self.a[k] * (t * p1 - self.b[k] * p2);
                out[k] = p;
                p2 = p1;
                p1 = p;
            }
        }
    }
}

impl<T: Real> LegendreRecurrence<T> {
    /// Diagonal seeds `P̄_m^m` for `m = 0..=l_max` at `s = sin θ`.
    pub(crate) fn seeds(&self, s: T, out: &mut [T]) {
        let mut pmm = T::one() / (T::lit(4.0) * T::PI()).sqrt();
        out[0] = pmm;
        for m in 1..=self.l_max {
            pmm = self.diag[m] * s * pmm;
            out[m] = pmm;
        }
    }

    /// Column `P̄_ℓ^m(t)` for `ℓ = m..=l_max` written to `out[ℓ - m]`.
    pub(crate) fn column(&self, m: usize, t: T, seed: T, out: &mut [T]) {
        out[0] = seed;
        if m == self.l_max {
            return;
        }
        let mut p2 = seed;
        let mut p1 = self.sub[m] * t * seed;
        out[1] = p1;
        for l in (m + 2)..=self.l_max {
            let k = tri(l, m);
            let p = self.a[k] * (t * p1 - self.b[k] * p2);
            out[l - m] = p;
            p2 = p1;
            p1 = p;
        }
    }
}

/// Normalized Legendre values `P̄_ℓ^m(t)` for `0 ≤ m ≤ ℓ ≤ l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreBlock<T> {
    l_max: usize,
    t: T,
    values: Vec<T>,
}

impl<T: Real> LegendreBlock<T> {
    #[inline]
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t
    }

    /// `P̄_ℓ^m(t)`; zero outside `0 ≤ m ≤ ℓ ≤ l_max`.
    #[inline]
    pub fn get(&self, l: usize, m: usize) -> T {
        if m > l || l > self.l_max {
            T::zero()
        } else {
            self.values[tri(l, m)]
        }
    }
}

fn clamp_unit<T: Real>(t: T) -> Result<T> {
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
    if !t.is_finite() || t.abs() > T::one() + tol {
        return Err(Error::domain(format!("Legendre argument {t} outside [-1, 1]")));
    }
    Ok(t.max(-T::one()).min(T::one()))
}

/// All `P̄_ℓ^m(t)` up to degree `l_max`.
pub fn eval_legendre_block<T: Real>(l_max: usize, t: T) -> Result<LegendreBlock<T>> {
    let t = clamp_unit(t)?;
    let s = (T::one() - t * t).max(T::zero()).sqrt();
    let rec = LegendreRecurrence::new(l_max);
    let mut values = vec![T::zero(); tri(l_max, l_max) + 1];
    rec.fill(t, s, &mut values);
    Ok(LegendreBlock { l_max, t, values })
}

/// Single `P̄_ℓ^m(t)` for `0 ≤ m ≤ ℓ` in `O(ℓ)` work.
pub(crate) fn legendre_single<T: Real>(l: usize, m: usize, t: T, s: T) -> T {
    if m > l {
        return T::zero();
    }
    let mut pmm = T::one() / (T::lit(4.0) * T::PI()).sqrt();
    for k in 1..=m {
        pmm = -T::lit(((2 * k + 1) as f64 / (2 * k) as f64).sqrt()) * s * pmm;
    }
    if l == m {
        return pmm;
    }
    let mut p2 = pmm;
    let mut p1 = T::lit(((2 * m + 3) as f64).sqrt()) * t * pmm;
    let mf = m as f64;
    for k in (m + 2)..=l {
        let kf = k as f64;
        let k1 = kf - 1.0;
        let a = T::lit(((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt());
        let b = T::lit(((k1 * k1 - mf * mf) / (4.0 * k1 * k1 - 1.0)).sqrt());
        let p = a * (t * p1 - b * p2);
        p2 = p1;
        p1 = p;
    }
    p1
}

#[inline]
pub(crate) fn sign_pow<T: Real>(m: i64) -> T {
    if m.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Complex scalar harmonic `Y_{ℓ,m}(p)`; zero when `|m| > ℓ` or `ℓ < 0`.
pub fn eval_ylm<T: Real>(l: i64, m: i64, p: &SpherePoint<T>) -> Complex<T> {
    if l < 0 || m.abs() > l {
        return czero();
    }
    let t = p.z().max(-T::one()).min(T::one());
    let s = (p.x() * p.x() + p.y() * p.y()).sqrt();
    let ma = m.unsigned_abs() as usize;
    let pl = legendre_single(l as usize, ma, t, s);
    let phase = Complex::from_polar(T::one(), T::from_i64_(m) * p.phi());
    // Y_{ℓ,−|m|} = (−1)^m conj(Y_{ℓ,|m|}) = (−1)^m P̄ e^{−i|m|φ}
    let sign = if m < 0 { sign_pow::<T>(m) } else { T::one() };
    phase * (pl * sign)
}

/// All `Y_{ℓ,m}(p)` for `ℓ ≤ l_max` in flat-index order.
pub fn eval_ylm_row<T: Real>(l_max: usize, p: &SpherePoint<T>) -> ScalarCoefficients<T> {
    let rec = LegendreRecurrence::new(l_max);
    let mut leg = vec![T::zero(); tri(l_max, l_max) + 1];
    let mut out = ScalarCoefficients::zeros(l_max);
    fill_ylm_row(&rec, p, &mut leg, out.values_mut());
    out
}

/// Row fill using a caller-owned recurrence and scratch buffer.
pub(crate) fn fill_ylm_row<T: Real>(
    rec: &LegendreRecurrence<T>,
    p: &SpherePoint<T>,
    leg: &mut [T],
    out: &mut [Complex<T>],
) {
    let l_max = rec.l_max();
    let t = p.z().max(-T::one()).min(T::one());
    let s = (p.x() * p.x() + p.y() * p.y()).sqrt();
    rec.fill(t, s, leg);
    let phi = p.phi();
    for m in 0..=l_max {
        let e = Complex::from_polar(T::one(), T::from_usize_(m) * phi);
        let sign = sign_pow::<T>(m as i64);
        for l in m..=l_max {
            let pl = leg[tri(l, m)];
            let base = l * l + l;
            out[base + m] = e * pl;
            if m > 0 {
                out[base - m] = e.conj() * (pl * sign);
            }
        }
    }
}
