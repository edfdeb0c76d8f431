//! Clebsch–Gordan coefficients with a unit second angular momentum, the
//! coupling tables used by the fast vector transforms, and a Wigner 3j
//! evaluator used as an independent reference.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{idx, spectrum_len, ScalarCoefficients, VectorCoefficients};

/// The nine coefficients `C^{ℓ,m}_{j1,m1,1,μ}` appearing in the vector
/// harmonics, named by `(j1, m1, μ)` relative to `(ℓ, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CgKind {
    /// `C^{ℓ,m}_{ℓ−1,m−1,1,1}`
    LowerRaise,
    /// `C^{ℓ,m}_{ℓ+1,m−1,1,1}`
    UpperRaise,
    /// `C^{ℓ,m}_{ℓ−1,m,1,0}`
    LowerZero,
    /// `C^{ℓ,m}_{ℓ+1,m,1,0}`
    UpperZero,
    /// `C^{ℓ,m}_{ℓ−1,m+1,1,−1}`
    LowerLower,
    /// `C^{ℓ,m}_{ℓ+1,m+1,1,−1}`
    UpperLower,
    /// `C^{ℓ,m}_{ℓ,m−1,1,1}`
    SameRaise,
    /// `C^{ℓ,m}_{ℓ,m+1,1,−1}`
    SameLower,
    /// `C^{ℓ,m}_{ℓ,m,1,0}`
    SameZero,
}

impl CgKind {
    pub const ALL: [CgKind; 9] = [
        CgKind::LowerRaise,
        CgKind::UpperRaise,
        CgKind::LowerZero,
        CgKind::UpperZero,
        CgKind::LowerLower,
        CgKind::UpperLower,
        CgKind::SameRaise,
        CgKind::SameLower,
        CgKind::SameZero,
    ];

    /// `(j1 − ℓ, m1 − m, μ)`.
    pub fn offsets(self) -> (i64, i64, i64) {
        match self {
            CgKind::LowerRaise => (-1, -1, 1),
            CgKind::UpperRaise => (1, -1, 1),
            CgKind::LowerZero => (-1, 0, 0),
            CgKind::UpperZero => (1, 0, 0),
            CgKind::LowerLower => (-1, 1, -1),
            CgKind::UpperLower => (1, 1, -1),
            CgKind::SameRaise => (0, -1, 1),
            CgKind::SameLower => (0, 1, -1),
            CgKind::SameZero => (0, 0, 0),
        }
    }
}

impl TryFrom<usize> for CgKind {
    type Error = Error;

    /// One-based position in [`CgKind::ALL`].
    fn try_from(i: usize) -> Result<Self> {
        i.checked_sub(1)
            .and_then(|k| CgKind::ALL.get(k).copied())
            .ok_or_else(|| Error::domain(format!("unknown Clebsch–Gordan kind {i}")))
    }
}

/// Closed-form `C^{ℓ,m}_{j1,m1,1,μ}` for the selected kind. Returns 0 when
/// any angular momentum or projection is out of range.
pub fn cg_explicit<T: Real>(kind: CgKind, l: i64, m: i64) -> T {
    let (dj, dm, _) = kind.offsets();
    let (j1, m1) = (l + dj, m + dm);
    // the triangle (j1, 1, ℓ) fails only for j1 = ℓ = 0
    if l < 0 || m.abs() > l || j1 < 0 || m1.abs() > j1 || (j1 == 0 && l == 0) {
        return T::zero();
    }
    let f = |v: i64| T::from_i64_(v);
    let sq = |num: i64, den: i64| (f(num) / f(den)).sqrt();
    match kind {
        CgKind::LowerRaise => sq((l + m) * (l + m - 1), 2 * l * (2 * l - 1)),
        CgKind::UpperRaise => sq((l - m + 1) * (l - m + 2), (2 * l + 2) * (2 * l + 3)),
        CgKind::LowerZero => sq((l + m) * (l - m), l * (2 * l - 1)),
        CgKind::UpperZero => -sq((l - m + 1) * (l + m + 1), (2 * l + 3) * (l + 1)),
        CgKind::LowerLower => sq((l - m) * (l - m - 1), 2 * l * (2 * l - 1)),
        CgKind::UpperLower => sq((l + m + 1) * (l + m + 2), (2 * l + 3) * (2 * l + 2)),
        CgKind::SameRaise => -sq((l + m) * (l - m + 1), l * (2 * l + 2)),
        CgKind::SameLower => sq((l + m + 1) * (l - m), l * (2 * l + 2)),
        CgKind::SameZero => f(m) / f(l * (l + 1)).sqrt(),
    }
}

const LOG_FACT_LEN: usize = 1024;

fn log_factorial(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; LOG_FACT_LEN];
        for k in 1..LOG_FACT_LEN {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        v
    });
    t[n as usize]
}

/// Wigner 3j symbol by the Racah sum with log-factorials. Returns 0 when a
/// selection rule is violated.
pub fn wigner3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if j1 < 0 || j2 < 0 || j3 < 0 || m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
        return 0.0;
    }
    assert!(j1 + j2 + j3 + 1 < LOG_FACT_LEN as i64, "3j arguments too large");
    let lf = log_factorial;
    let log_delta = lf(j1 + j2 - j3) + lf(j1 - j2 + j3) + lf(-j1 + j2 + j3) - lf(j1 + j2 + j3 + 1);
    let log_proj = lf(j1 + m1) + lf(j1 - m1) + lf(j2 + m2) + lf(j2 - m2) + lf(j3 + m3) + lf(j3 - m3);
    let log_pre = 0.5 * (log_delta + log_proj);
    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let log_den = lf(k) + lf(j3 - j2 + k + m1) + lf(j3 - j1 + k - m2) + lf(j1 + j2 - j3 - k) + lf(j1 - k - m1) + lf(j2 - k + m2);
        let term = (log_pre - log_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        -sum
    } else {
        sum
    }
}

/// `C^{j3,m3}_{j1,m1,j2,m2} = (−1)^{m3+j1−j2} √(2j3+1) · 3j(j1 j2 j3; m1 m2 −m3)`.
pub fn clebsch_gordan(j1: i64, m1: i64, j2: i64, m2: i64, j3: i64, m3: i64) -> f64 {
    let w = wigner3j(j1, j2, j3, m1, m2, -m3);
    if w == 0.0 {
        return 0.0;
    }
    let s = if (m3 + j1 - j2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    s * ((2 * j3 + 1) as f64).sqrt() * w
}

/// `c_ℓ = √((ℓ+1)/(2ℓ+1))`.
pub fn c_const<T: Real>(l: i64) -> T {
    if l < 0 {
        return T::zero();
    }
    (T::from_i64_(l + 1) / T::from_i64_(2 * l + 1)).sqrt()
}

/// `d_ℓ = √(ℓ/(2ℓ+1))`.
pub fn d_const<T: Real>(l: i64) -> T {
    if l < 0 {
        return T::zero();
    }
    (T::from_i64_(l) / T::from_i64_(2 * l + 1)).sqrt()
}

/// Forward coupling tables `ξ^(1..6)` and `μ^(1..3)` over `0 ≤ ℓ ≤ L+1`.
#[derive(Debug, Clone)]
pub struct CgTables<T> {
    l_max: usize,
    c: Vec<T>,
    d: Vec<T>,
    xi: [Vec<T>; 6],
    mu: [Vec<T>; 3],
}

/// Builds the coupling tables for band limit `L ≥ 1`.
pub fn build_cg_tables<T: Real>(l_max: usize) -> Result<CgTables<T>> {
    if l_max < 1 {
        return Err(Error::domain("coupling tables need L ≥ 1"));
    }
    let top = l_max + 1;
    let n = spectrum_len(top);
    let c: Vec<T> = (0..=top as i64 + 1).map(c_const).collect();
    let d: Vec<T> = (0..=top as i64 + 1).map(d_const).collect();
    let mut xi: [Vec<T>; 6] = std::array::from_fn(|_| vec![T::zero(); n]);
    let mut mu: [Vec<T>; 3] = std::array::from_fn(|_| vec![T::zero(); n]);
    for l in 0..=top {
        let li = l as i64;
        let cu = c[l + 1];
        let dl = if l >= 1 { d[l - 1] } else { T::zero() };
        for m in -li..=li {
            let k = idx(l, m);
            xi[0][k] = cu * cg_explicit(CgKind::LowerRaise, li + 1, m + 1);
            xi[1][k] = dl * cg_explicit(CgKind::UpperRaise, li - 1, m + 1);
            xi[2][k] = cu * cg_explicit(CgKind::LowerLower, li + 1, m - 1);
            xi[3][k] = dl * cg_explicit(CgKind::UpperLower, li - 1, m - 1);
            xi[4][k] = cu * cg_explicit(CgKind::LowerZero, li + 1, m);
            xi[5][k] = dl * cg_explicit(CgKind::UpperZero, li - 1, m);
            mu[0][k] = cg_explicit(CgKind::SameRaise, li, m + 1);
            mu[1][k] = cg_explicit(CgKind::SameZero, li, m);
            mu[2][k] = cg_explicit(CgKind::SameLower, li, m - 1);
        }
    }
    Ok(CgTables { l_max, c, d, xi, mu })
}

impl<T: Real> CgTables<T> {
    /// Band limit `L`; tables cover degrees up to `L+1`.
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn c(&self, l: i64) -> T {
        self.c.get(l as usize).copied().filter(|_| l >= 0).unwrap_or_else(T::zero)
    }

    pub fn d(&self, l: i64) -> T {
        self.d.get(l as usize).copied().filter(|_| l >= 0).unwrap_or_else(T::zero)
    }

    fn read(&self, table: &[T], l: i64, m: i64) -> T {
        if l < 0 || l as usize > self.l_max + 1 || m.abs() > l {
            T::zero()
        } else {
            table[idx(l as usize, m)]
        }
    }

    /// `ξ^(k)_{ℓ,m}` for `k ∈ 1..=6`; zero outside the table.
    pub fn xi(&self, k: usize, l: i64, m: i64) -> T {
        self.read(&self.xi[k - 1], l, m)
    }

    /// `μ^(k)_{ℓ,m}` for `k ∈ 1..=3`; zero outside the table.
    pub fn mu(&self, k: usize, l: i64, m: i64) -> T {
        self.read(&self.mu[k - 1], l, m)
    }
}

/// Adjoint coupling arrays `ν^(1..6)` (degrees up to `L+1`) and `η^(1..3)`
/// (degrees up to `L`) for a coefficient pair `(a, b)`.
#[derive(Debug, Clone)]
pub struct AdjointCoupling<T> {
    pub nu: [ScalarCoefficients<T>; 6],
    pub eta: [ScalarCoefficients<T>; 3],
}

/// Builds the adjoint coupling arrays. An entry is zero exactly when every
/// coefficient it reads is out of range.
pub fn build_adjoint_coupling<T: Real>(coeffs: &VectorCoefficients<T>) -> AdjointCoupling<T> {
    let tables = build_cg_tables::<T>(coeffs.l_max()).expect("vector coefficients have L ≥ 1");
    build_adjoint_coupling_with(coeffs, &tables)
}

pub(crate) fn build_adjoint_coupling_with<T: Real>(coeffs: &VectorCoefficients<T>, t: &CgTables<T>) -> AdjointCoupling<T> {
    let l_max = coeffs.l_max();
    let (a, b) = (coeffs.div(), coeffs.curl());
    let i = Complex::new(T::zero(), T::one());
    let mut nu: [ScalarCoefficients<T>; 6] = std::array::from_fn(|_| ScalarCoefficients::zeros(l_max + 1));
    let mut eta: [ScalarCoefficients<T>; 3] = std::array::from_fn(|_| ScalarCoefficients::zeros(l_max));
    for l in 0..=(l_max as i64 + 1) {
        for m in -l..=l {
            let k = idx(l as usize, m);
            let up_r = a.get(l + 1, m + 1) * t.xi(1, l, m);
            let up_l = a.get(l + 1, m - 1) * t.xi(3, l, m);
            let lo_r = a.get(l - 1, m + 1) * t.xi(2, l, m);
            let lo_l = a.get(l - 1, m - 1) * t.xi(4, l, m);
            nu[0].values_mut()[k] = up_r - up_l;
            nu[1].values_mut()[k] = lo_r - lo_l;
            nu[2].values_mut()[k] = i * (up_r + up_l);
            nu[3].values_mut()[k] = i * (lo_r + lo_l);
            nu[4].values_mut()[k] = a.get(l + 1, m) * t.xi(5, l, m);
            nu[5].values_mut()[k] = a.get(l - 1, m) * t.xi(6, l, m);
            if l as usize <= l_max {
                let r = b.get(l, m + 1) * t.mu(1, l, m);
                let s = b.get(l, m - 1) * t.mu(3, l, m);
                eta[0].values_mut()[k] = i * (r - s);
                eta[1].values_mut()[k] = r + s;
                eta[2].values_mut()[k] = i * b.get(l, m) * t.mu(2, l, m);
            }
        }
    }
    AdjointCoupling { nu, eta }
}
