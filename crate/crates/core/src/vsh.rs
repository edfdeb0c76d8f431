//! Vector spherical harmonics in Cartesian components and the direct
//! forward and adjoint vector transforms built on them.

use num_complex::Complex;
use rayon::prelude::*;

use crate::cg::{c_const, cg_explicit, d_const, CgKind};
use crate::error::{Error, Result};
use crate::legendre::{fill_ylm_row, tri, LegendreRecurrence};
use crate::scalar::{cvec_zero, czero, CVec3, Real};
use crate::types::{
    idx, spectrum_len, QuadratureRule, ScalarCoefficients, SpherePoint, TangentFieldSamples, VectorCoefficients,
};

/// Spherical components `(+1, 0, −1)` of the two harmonic families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdValues<T> {
    pub b: [Complex<T>; 3],
    pub d: [Complex<T>; 3],
}

/// Values of `y^div_{ℓ,m}` and `y^curl_{ℓ,m}` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VshValue<T> {
    pub div: CVec3<T>,
    pub curl: CVec3<T>,
}

fn check_degree(l: i64, m: i64) -> Result<()> {
    if l < 1 {
        return Err(Error::domain(format!("vector harmonics need ℓ ≥ 1, got {l}")));
    }
    if m.abs() > l {
        return Err(Error::domain(format!("order {m} exceeds degree {l}")));
    }
    Ok(())
}

/// `B` and `D` components from any scalar harmonic lookup `y(ℓ, m)` that
/// returns zero out of range.
fn bd_from<T: Real>(l: i64, m: i64, y: impl Fn(i64, i64) -> Complex<T>) -> BdValues<T> {
    let c = c_const::<T>(l);
    let d = d_const::<T>(l);
    let cg = |k| cg_explicit::<T>(k, l, m);
    let i = Complex::new(T::zero(), T::one());
    let b = [
        y(l - 1, m - 1) * (c * cg(CgKind::LowerRaise)) + y(l + 1, m - 1) * (d * cg(CgKind::UpperRaise)),
        y(l - 1, m) * (c * cg(CgKind::LowerZero)) + y(l + 1, m) * (d * cg(CgKind::UpperZero)),
        y(l - 1, m + 1) * (c * cg(CgKind::LowerLower)) + y(l + 1, m + 1) * (d * cg(CgKind::UpperLower)),
    ];
    let d = [
        i * y(l, m - 1) * cg(CgKind::SameRaise),
        i * y(l, m) * cg(CgKind::SameZero),
        i * y(l, m + 1) * cg(CgKind::SameLower),
    ];
    BdValues { b, d }
}

/// `(−(v₊ − v₋)/√2, −i(v₊ + v₋)/√2, v₀)`.
fn cartesian<T: Real>(v: &[Complex<T>; 3]) -> CVec3<T> {
    let h = T::FRAC_1_SQRT_2();
    let i = Complex::new(T::zero(), T::one());
    [-(v[0] - v[2]) * h, -i * (v[0] + v[2]) * h, v[1]]
}

/// The six spherical components `B_{ν,ℓ,m}(p)`, `D_{ν,ℓ,m}(p)`.
pub fn eval_bd<T: Real>(l: i64, m: i64, p: &SpherePoint<T>) -> Result<BdValues<T>> {
    check_degree(l, m)?;
    Ok(bd_from(l, m, |a, b| crate::legendre::eval_ylm(a, b, p)))
}

/// `y^div_{ℓ,m}(p)` and `y^curl_{ℓ,m}(p)` as complex Cartesian vectors.
pub fn eval_vsh<T: Real>(l: i64, m: i64, p: &SpherePoint<T>) -> Result<VshValue<T>> {
    let bd = eval_bd(l, m, p)?;
    Ok(VshValue { div: cartesian(&bd.b), curl: cartesian(&bd.d) })
}

/// Evaluates every `(y^div, y^curl)` with `1 ≤ ℓ ≤ L` at one point from a
/// precomputed scalar row of degree `L+1`.
pub(crate) fn vsh_row<T: Real>(row: &[Complex<T>], l_max: usize, out: &mut [VshValue<T>]) {
    let top = l_max as i64 + 1;
    let y = |l: i64, m: i64| {
        if l < 0 || l > top || m.abs() > l {
            czero()
        } else {
            row[idx(l as usize, m)]
        }
    };
    for l in 1..=l_max as i64 {
        for m in -l..=l {
            let bd = bd_from(l, m, y);
            out[idx(l as usize, m)] = VshValue { div: cartesian(&bd.b), curl: cartesian(&bd.d) };
        }
    }
}

fn conj_dot<T: Real>(y: &CVec3<T>, v: &CVec3<T>) -> Complex<T> {
    y[0].conj() * v[0] + y[1].conj() * v[1] + y[2].conj() * v[2]
}

/// Direct forward transform `â_{ℓ,m} = Σ_k w_k y^div_{ℓ,m}(x_k)^H T_k` and
/// likewise for `b̂`, for `1 ≤ ℓ ≤ L`. Cost `O(N·L²)`.
pub fn forward_vsht_direct<T: Real>(
    samples: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
    l_max: usize,
) -> Result<VectorCoefficients<T>> {
    if l_max < 1 {
        return Err(Error::domain("vector transforms need L ≥ 1"));
    }
    if samples.len() != rule.len() {
        return Err(Error::domain(format!(
            "samples have {} points but the rule has {}",
            samples.len(),
            rule.len()
        )));
    }
    if samples.points() != rule.points() {
        return Err(Error::domain("sample points differ from the rule's nodes"));
    }
    let n = samples.len();
    let len = spectrum_len(l_max);
    let rec = LegendreRecurrence::<T>::new(l_max + 1);
    let chunk = (n / 64).max(64);
    let ks: Vec<usize> = (0..n).collect();
    let partials: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)> = ks
        .par_chunks(chunk)
        .map(|ks| {
            let mut a = vec![czero(); len];
            let mut b = vec![czero(); len];
            let mut leg = vec![T::zero(); tri(l_max + 1, l_max + 1) + 1];
            let mut row = vec![czero(); spectrum_len(l_max + 1)];
            let mut vals = vec![VshValue { div: cvec_zero(), curl: cvec_zero() }; len];
            for &k in ks {
                fill_ylm_row(&rec, &samples.points()[k], &mut leg, &mut row);
                vsh_row(&row, l_max, &mut vals);
                let w = rule.weights()[k];
                let tk = samples.values()[k];
                for j in 1..len {
                    a[j] = a[j] + conj_dot(&vals[j].div, &tk) * w;
                    b[j] = b[j] + conj_dot(&vals[j].curl, &tk) * w;
                }
            }
            (a, b)
        })
        .collect();
    let mut a = vec![czero(); len];
    let mut b = vec![czero(); len];
    for (pa, pb) in partials {
        for j in 0..len {
            a[j] = a[j] + pa[j];
            b[j] = b[j] + pb[j];
        }
    }
    VectorCoefficients::from_parts(ScalarCoefficients::from_values(l_max, a)?, ScalarCoefficients::from_values(l_max, b)?)
}

/// Direct adjoint transform: the partial sum
/// `Σ_{ℓ=1}^{L} Σ_m (a_{ℓ,m} y^div_{ℓ,m} + b_{ℓ,m} y^curl_{ℓ,m})` at each point.
pub fn adjoint_vsht_direct<T: Real>(coeffs: &VectorCoefficients<T>, points: &[SpherePoint<T>]) -> TangentFieldSamples<T> {
    let l_max = coeffs.l_max();
    let len = spectrum_len(l_max);
    let rec = LegendreRecurrence::<T>::new(l_max + 1);
    let (a, b) = (coeffs.div().values(), coeffs.curl().values());
    let values: Vec<CVec3<T>> = points
        .par_iter()
        .map_init(
            || {
                (
                    vec![T::zero(); tri(l_max + 1, l_max + 1) + 1],
                    vec![czero(); spectrum_len(l_max + 1)],
                    vec![VshValue { div: cvec_zero(), curl: cvec_zero() }; len],
                )
            },
            |(leg, row, vals), p| {
                fill_ylm_row(&rec, p, leg, row);
                vsh_row(row, l_max, vals);
                let mut out = cvec_zero();
                for j in 1..len {
                    for c in 0..3 {
                        out[c] = out[c] + a[j] * vals[j].div[c] + b[j] * vals[j].curl[c];
                    }
                }
                out
            },
        )
        .collect();
    TangentFieldSamples::from_raw(points.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cg::clebsch_gordan;
    use crate::legendre::eval_ylm;
    use crate::quadrature::gen_gl_tensor;
    use crate::scalar::{cvec_dot_real, cvec_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_points(n: usize, seed: u64) -> Vec<SpherePoint<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| SpherePoint::from_angles(rng.gen_range(-1.0f64..1.0).acos(), rng.gen_range(0.0..2.0 * PI)))
            .collect()
    }

    fn random_coeffs(l_max: usize, seed: u64) -> VectorCoefficients<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = VectorCoefficients::zeros(l_max).unwrap();
        for l in 1..=l_max as i64 {
            for m in -l..=l {
                v.set_div(l, m, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
                v.set_curl(l, m, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            }
        }
        v
    }

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn degree_zero_is_rejected() {
        let p = SpherePoint::from_angles(0.4, 0.2);
        assert!(matches!(eval_bd(0, 0, &p), Err(Error::Domain(_))));
        assert!(matches!(eval_vsh(2, 3, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn bd_examples() {
        let p = SpherePoint::from_angles(0.9, 2.2);
        assert_eq!(eval_bd(1, 0, &p).unwrap().d[1], c(0.0));

        let north = SpherePoint::new(0.0, 0.0, 1.0).unwrap();
        let bd = eval_bd(1, 1, &north).unwrap();
        let want = c_const::<f64>(1) * clebsch_gordan(0, 0, 1, 1, 1, 1) * eval_ylm(0, 0, &north)
            + d_const::<f64>(1) * clebsch_gordan(2, 0, 1, 1, 1, 1) * eval_ylm(2, 0, &north);
        assert!((bd.b[0] - want).norm() < 1e-15);

        // every component against the 3j oracle at (2, −2), x = (1, 0, 0)
        let p = SpherePoint::new(1.0, 0.0, 0.0).unwrap();
        let bd = eval_bd(2, -2, &p).unwrap();
        let (l, m) = (2i64, -2i64);
        let i = Complex::new(0.0, 1.0);
        for (nu, mu) in [(0usize, 1i64), (1, 0), (2, -1)] {
            let b = c_const::<f64>(l) * clebsch_gordan(l - 1, m - mu, 1, mu, l, m) * eval_ylm(l - 1, m - mu, &p)
                + d_const::<f64>(l) * clebsch_gordan(l + 1, m - mu, 1, mu, l, m) * eval_ylm(l + 1, m - mu, &p);
            let d = i * clebsch_gordan(l, m - mu, 1, mu, l, m) * eval_ylm(l, m - mu, &p);
            assert!((bd.b[nu] - b).norm() < 1e-14, "B{nu}");
            assert!((bd.d[nu] - d).norm() < 1e-14, "D{nu}");
        }
    }

    #[test]
    fn harmonics_are_tangent() {
        for p in random_points(100, 1) {
            let x = p.to_array();
            for l in 1..=6 {
                for m in -l..=l {
                    let v = eval_vsh(l, m, &p).unwrap();
                    assert!(cvec_dot_real(&v.div, &x).norm() <= 1e-10 * (1.0 + cvec_norm(&v.div)));
                    assert!(cvec_dot_real(&v.curl, &x).norm() <= 1e-10 * (1.0 + cvec_norm(&v.curl)));
                }
            }
        }
        // the poles as well
        for z in [1.0, -1.0] {
            let p = SpherePoint::new(0.0, 0.0, z).unwrap();
            let v = eval_vsh(3, 1, &p).unwrap();
            assert!(cvec_dot_real(&v.div, &p.to_array()).norm() < 1e-12);
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        let l_max = 8usize;
        let (_, rule) = gen_gl_tensor::<f64>(2 * l_max + 2);
        let len = spectrum_len(l_max);
        let rec = LegendreRecurrence::<f64>::new(l_max + 1);
        let mut leg = vec![0.0; tri(l_max + 1, l_max + 1) + 1];
        let mut row = vec![czero(); spectrum_len(l_max + 1)];
        let mut vals = vec![VshValue { div: cvec_zero(), curl: cvec_zero() }; len];
        let nb = 2 * (len - 1);
        let mut gram = vec![Complex::new(0.0, 0.0); nb * nb];
        for (p, &w) in rule.points().iter().zip(rule.weights()) {
            fill_ylm_row(&rec, p, &mut leg, &mut row);
            vsh_row(&row, l_max, &mut vals);
            let basis: Vec<&CVec3<f64>> =
                vals[1..].iter().map(|v| &v.div).chain(vals[1..].iter().map(|v| &v.curl)).collect();
            for (r, u) in basis.iter().enumerate() {
                for (s, v) in basis.iter().enumerate() {
                    gram[r * nb + s] += conj_dot(u, v) * w;
                }
            }
        }
        for r in 0..nb {
            for s in 0..nb {
                let want = if r == s { 1.0 } else { 0.0 };
                assert!((gram[r * nb + s] - want).norm() <= 1e-10, "{r} {s}: {}", gram[r * nb + s]);
            }
        }
    }

    #[test]
    fn forward_picks_out_single_harmonics() {
        let (_, rule) = gen_gl_tensor::<f64>(8);
        let pts = rule.points().to_vec();
        let field = |f: &dyn Fn(&SpherePoint<f64>) -> CVec3<f64>| {
            TangentFieldSamples::new(pts.clone(), pts.iter().map(f).collect()).unwrap()
        };
        let s = field(&|p| eval_vsh(2, 1, p).unwrap().div);
        let co = forward_vsht_direct(&s, &rule, 3).unwrap();
        let mut want = VectorCoefficients::zeros(3).unwrap();
        want.set_div(2, 1, c(1.0)).unwrap();
        assert!(co.max_abs_diff(&want) <= 1e-10);

        let s = field(&|p| eval_vsh(3, -2, p).unwrap().curl);
        let co = forward_vsht_direct(&s, &rule, 3).unwrap();
        let mut want = VectorCoefficients::zeros(3).unwrap();
        want.set_curl(3, -2, c(1.0)).unwrap();
        assert!(co.max_abs_diff(&want) <= 1e-10);

        let s = field(&|_| cvec_zero());
        assert_eq!(forward_vsht_direct(&s, &rule, 3).unwrap().max_abs_diff(&VectorCoefficients::zeros(3).unwrap()), 0.0);
    }

    #[test]
    fn forward_rejects_mismatched_points() {
        let (_, rule) = gen_gl_tensor::<f64>(4);
        let pts = random_points(rule.len(), 3);
        let s = TangentFieldSamples::new(pts, vec![cvec_zero(); rule.len()]).unwrap();
        assert!(matches!(forward_vsht_direct(&s, &rule, 2), Err(Error::Domain(_))));
        let s = TangentFieldSamples::new(random_points(3, 3), vec![cvec_zero(); 3]).unwrap();
        assert!(matches!(forward_vsht_direct(&s, &rule, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn adjoint_examples() {
        let pts = random_points(40, 9);
        let mut co = VectorCoefficients::zeros(2).unwrap();
        co.set_div(1, 0, c(1.0)).unwrap();
        let s = adjoint_vsht_direct(&co, &pts);
        for (p, v) in pts.iter().zip(s.values()) {
            let y = eval_vsh(1, 0, p).unwrap().div;
            assert!(cvec_norm(&[v[0] - y[0], v[1] - y[1], v[2] - y[2]]) < 1e-14);
        }
        let z = adjoint_vsht_direct(&VectorCoefficients::<f64>::zeros(3).unwrap(), &pts);
        assert_eq!(z.max_norm(), 0.0);

        let co = random_coeffs(4, 2);
        let s = adjoint_vsht_direct(&co, &pts);
        for (p, v) in pts.iter().zip(s.values()) {
            let mut want = cvec_zero();
            for l in 1..=4 {
                for m in -l..=l {
                    let y = eval_vsh(l, m, p).unwrap();
                    for k in 0..3 {
                        want[k] += co.div().get(l, m) * y.div[k] + co.curl().get(l, m) * y.curl[k];
                    }
                }
            }
            assert!(cvec_norm(&[v[0] - want[0], v[1] - want[1], v[2] - want[2]]) < 1e-12);
        }
        assert!(s.max_normal_component() < 1e-12);
    }

    #[test]
    fn forward_inverts_adjoint_on_exact_rules() {
        for l_max in [1usize, 3, 7] {
            let co = random_coeffs(l_max, l_max as u64);
            let (_, rule) = gen_gl_tensor::<f64>(2 * l_max + 2);
            let s = adjoint_vsht_direct(&co, rule.points());
            let back = forward_vsht_direct(&s, &rule, l_max).unwrap();
            assert!(back.max_abs_diff(&co) <= 1e-9, "L={l_max}");
        }
    }
}
