//! Synthetic tangent fields `T = L s + ∇* v` built from a stream function
//! `s` and a velocity potential `v`, with the surface operators they need.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::legendre::legendre_single;
use crate::types::{SpherePoint, TangentFieldSamples};

/// Central-difference step in radians.
pub const FD_STEP: f64 = 1e-5;
/// Minimum colatitude distance from a pole for finite differences.
pub const POLE_GUARD: f64 = 1e-6;

/// A real function on the sphere, optionally with analytic angular
/// derivatives `(∂_θ, ∂_φ)` in colatitude and longitude.
pub trait SurfaceFunction: Send + Sync {
    fn value(&self, p: &SpherePoint<f64>) -> f64;

    fn angular_derivatives(&self, _p: &SpherePoint<f64>) -> Option<(f64, f64)> {
        None
    }
}

/// Wraps a closure; derivatives come from finite differences.
pub struct FnSurface<F>(pub F);

impl<F: Fn(&SpherePoint<f64>) -> f64 + Send + Sync> SurfaceFunction for FnSurface<F> {
    fn value(&self, p: &SpherePoint<f64>) -> f64 {
        (self.0)(p)
    }
}

/// Orthonormal real spherical harmonic: `√2(−1)^m P̄_ℓ^m cos mφ` for
/// `m > 0`, `√2(−1)^m P̄_ℓ^{|m|} sin |m|φ` for `m < 0`, `P̄_ℓ^0` for `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHarmonic {
    pub l: usize,
    pub m: i64,
}

fn legendre_dtheta(l: usize, m: usize, t: f64, s: f64) -> f64 {
    let (lf, mf) = (l as f64, m as f64);
    let up = ((lf - mf) * (lf + mf + 1.0)).sqrt() * legendre_single(l, m + 1, t, s);
    if m == 0 {
        return up;
    }
    let down = ((lf + mf) * (lf - mf + 1.0)).sqrt() * legendre_single(l, m - 1, t, s);
    0.5 * (up - down)
}

impl RealHarmonic {
    fn parts(&self, p: &SpherePoint<f64>) -> (f64, f64, f64, f64) {
        let t = p.z().clamp(-1.0, 1.0);
        let s = p.x().hypot(p.y());
        let ma = self.m.unsigned_abs() as usize;
        let scale = if self.m == 0 {
            1.0
        } else if ma % 2 == 0 {
            SQRT_2
        } else {
            -SQRT_2
        };
        let (sn, cs) = (ma as f64 * p.phi()).sin_cos();
        (scale, t, s, if self.m >= 0 { cs } else { sn })
    }
}

impl SurfaceFunction for RealHarmonic {
    fn value(&self, p: &SpherePoint<f64>) -> f64 {
        let ma = self.m.unsigned_abs() as usize;
        let (scale, t, s, trig) = self.parts(p);
        scale * legendre_single(self.l, ma, t, s) * trig
    }

    fn angular_derivatives(&self, p: &SpherePoint<f64>) -> Option<(f64, f64)> {
        let ma = self.m.unsigned_abs() as usize;
        let (scale, t, s, trig) = self.parts(p);
        let (sn, cs) = (ma as f64 * p.phi()).sin_cos();
        let dtrig = if self.m >= 0 { -(ma as f64) * sn } else { ma as f64 * cs };
        let pl = legendre_single(self.l, ma, t, s);
        Some((scale * legendre_dtheta(self.l, ma, t, s) * trig, scale * pl * dtrig))
    }
}

/// `Σ c_j f_j`; analytic derivatives when every term has them.
#[derive(Default)]
pub struct Combination {
    terms: Vec<(f64, Box<dyn SurfaceFunction>)>,
}

impl Combination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, coef: f64, f: impl SurfaceFunction + 'static) -> Self {
        self.terms.push((coef, Box::new(f)));
        self
    }
}

impl SurfaceFunction for Combination {
    fn value(&self, p: &SpherePoint<f64>) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.value(p)).sum()
    }

    fn angular_derivatives(&self, p: &SpherePoint<f64>) -> Option<(f64, f64)> {
        self.terms.iter().try_fold((0.0, 0.0), |(a, b), (c, f)| {
            let (dt, dp) = f.angular_derivatives(p)?;
            Some((a + c * dt, b + c * dp))
        })
    }
}

fn frame(theta: f64, phi: f64) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ([ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}

fn finite_differences(f: &dyn SurfaceFunction, theta: f64, phi: f64) -> (f64, f64) {
    let at = |t: f64, q: f64| f.value(&SpherePoint::from_angles(t, q));
    let h = FD_STEP;
    let dt = (at(theta + h, phi) - at(theta - h, phi)) / (2.0 * h);
    let dp = (at(theta, phi + h) - at(theta, phi - h)) / (2.0 * h);
    (dt, dp)
}

/// `∇* f = θ̂ ∂_θ f + φ̂ (1/sin θ) ∂_φ f` in Cartesian components.
pub fn surface_gradient(f: &dyn SurfaceFunction, p: &SpherePoint<f64>) -> Result<[f64; 3]> {
    let (theta, phi) = p.to_spherical();
    let sin = theta.sin();
    let (dt, dp) = match f.angular_derivatives(p) {
        Some(d) if sin > 0.0 => d,
        Some(_) => return Err(Error::domain("surface gradient is undefined in angular form at a pole")),
        None => {
            if theta < POLE_GUARD || theta > PI - POLE_GUARD {
                return Err(Error::domain("finite differences too close to a pole"));
            }
            finite_differences(f, theta, phi)
        }
    };
    let (th, ph) = frame(theta, phi);
    let dp = dp / sin;
    Ok([0, 1, 2].map(|c| th[c] * dt + ph[c] * dp))
}

/// `L f = x × ∇* f`.
pub fn surface_curl(f: &dyn SurfaceFunction, p: &SpherePoint<f64>) -> Result<[f64; 3]> {
    let g = surface_gradient(f, p)?;
    let x = p.to_array();
    Ok([x[1] * g[2] - x[2] * g[1], x[2] * g[0] - x[0] * g[2], x[0] * g[1] - x[1] * g[0]])
}

/// A tangent field given by its stream function and velocity potential.
pub struct TangentField {
    stream: Box<dyn SurfaceFunction>,
    potential: Box<dyn SurfaceFunction>,
}

impl TangentField {
    pub fn new(stream: impl SurfaceFunction + 'static, potential: impl SurfaceFunction + 'static) -> Self {
        Self { stream: Box::new(stream), potential: Box::new(potential) }
    }

    pub fn stream(&self) -> &dyn SurfaceFunction {
        self.stream.as_ref()
    }

    pub fn potential(&self) -> &dyn SurfaceFunction {
        self.potential.as_ref()
    }

    /// Divergence-free part `L s`.
    pub fn rotational(&self, p: &SpherePoint<f64>) -> Result<[f64; 3]> {
        surface_curl(self.stream.as_ref(), p)
    }

    /// Curl-free part `∇* v`.
    pub fn irrotational(&self, p: &SpherePoint<f64>) -> Result<[f64; 3]> {
        surface_gradient(self.potential.as_ref(), p)
    }

    pub fn eval(&self, p: &SpherePoint<f64>) -> Result<[f64; 3]> {
        let a = self.rotational(p)?;
        let b = self.irrotational(p)?;
        Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    }

    /// Samples the field (or one of its parts) at every point in parallel.
    pub fn sample(&self, points: &[SpherePoint<f64>], part: FieldPart) -> Result<TangentFieldSamples<f64>> {
        let values = points
            .par_iter()
            .map(|p| {
                let v = match part {
                    FieldPart::Full => self.eval(p)?,
                    FieldPart::Rotational => self.rotational(p)?,
                    FieldPart::Irrotational => self.irrotational(p)?,
                };
                Ok(v.map(|c| Complex::new(c, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        TangentFieldSamples::new_tangent(points.to_vec(), values)
    }
}

/// Which part of a field to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldPart {
    #[default]
    Full,
    Rotational,
    Irrotational,
}

/// Unit vector at latitude `lat`, longitude `lon`.
pub fn from_lat_lon(lat: f64, lon: f64) -> [f64; 3] {
    let (sl, cl) = lat.sin_cos();
    let (so, co) = lon.sin_cos();
    [cl * co, cl * so, sl]
}

fn dot(p: &SpherePoint<f64>, c: &[f64; 3]) -> f64 {
    (p.x() * c[0] + p.y() * c[1] + p.z() * c[2]).clamp(-1.0, 1.0)
}

/// Compactly supported cubic bump of width `2/σ` in geodesic distance.
pub fn bump(p: &SpherePoint<f64>, sigma: f64, lat: f64, lon: f64) -> f64 {
    const BINOM4: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
    let r = dot(p, &from_lat_lon(lat, lon)).acos();
    let sum: f64 = (0..5)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * BINOM4[j] * (r - (j as f64 - 2.0) / sigma).abs().powi(3)
        })
        .sum();
    sigma.powi(3) / 12.0 * sum
}

/// Smooth-but-not-analytic kernel centred at latitude `lat`, longitude `lon`.
pub fn kernel_g(p: &SpherePoint<f64>, lat: f64, lon: f64) -> f64 {
    let t = dot(p, &from_lat_lon(lat, lon));
    let a = (1.0 - t).max(1e-15);
    -0.5 * ((3.0 * t + 3.0 * SQRT_2 * a.powf(1.5) - 4.0)
        + (3.0 * t * t - 4.0 * t + 1.0) * a.ln()
        + (3.0 * t - 1.0) * a * ((2.0 * a).sqrt() + a).ln())
}

/// `∫_{−π/2}^{lat} sin¹⁴(2ξ) dξ` by power reduction.
pub fn sin14_integral(lat: f64) -> f64 {
    const BINOM14: [f64; 8] = [1.0, 14.0, 91.0, 364.0, 1001.0, 2002.0, 3003.0, 3432.0];
    let scale = 1.0 / 16384.0;
    let mut s = BINOM14[7] * (lat + FRAC_PI_2);
    for k in 0..7 {
        let n = (7 - k) as f64;
        let sign = if (7 - k) % 2 == 0 { 1.0 } else { -1.0 };
        s += 2.0 * sign * BINOM14[k] * (4.0 * n * lat).sin() / (4.0 * n);
    }
    scale * s
}

fn rossby_haurwitz() -> Combination {
    Combination::new()
        .with(-1.0 / 3f64.sqrt(), RealHarmonic { l: 1, m: 0 })
        .with(8.0 * SQRT_2 / (3.0 * 385f64.sqrt()), RealHarmonic { l: 5, m: 4 })
}

/// Band-limited field: Rossby–Haurwitz stream function and a two-term
/// harmonic potential. Gradients are analytic.
pub fn field_a() -> TangentField {
    let v = Combination::new().with(1.0 / 25.0, RealHarmonic { l: 4, m: 0 }).with(1.0 / 25.0, RealHarmonic { l: 6, m: -3 });
    TangentField::new(rossby_haurwitz(), v)
}

/// Rossby–Haurwitz stream function with a potential made of four
/// compactly supported bumps.
pub fn field_b() -> TangentField {
    let v = FnSurface(|p: &SpherePoint<f64>| {
        bump(p, 5.0, PI / 6.0, 0.0) / 8.0 - bump(p, 3.0, PI / 5.0, -PI / 7.0) / 7.0 + bump(p, 5.0, -PI / 6.0, FRAC_PI_2) / 9.0
            - bump(p, 3.0, -PI / 5.0, PI / 3.0) / 8.0
    });
    TangentField::new(rossby_haurwitz(), v)
}

/// Field of limited smoothness built from the kernel `g` and a zonal jet.
pub fn field_c() -> TangentField {
    let s = FnSurface(|p: &SpherePoint<f64>| {
        let lat = FRAC_PI_2 - p.theta();
        sin14_integral(lat) - 3.0 * kernel_g(p, PI / 4.0, -PI / 12.0)
    });
    let v = FnSurface(|p: &SpherePoint<f64>| {
        2.5 * kernel_g(p, PI / 4.0, 0.0) - 1.75 * kernel_g(p, PI / 6.0, PI / 9.0) - 1.5 * kernel_g(p, 5.0 * PI / 16.0, PI / 10.0)
    });
    TangentField::new(s, v)
}

/// Named synthetic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldName {
    A,
    B,
    C,
}

impl FieldName {
    pub fn build(self) -> TangentField {
        match self {
            FieldName::A => field_a(),
            FieldName::B => field_b(),
            FieldName::C => field_c(),
        }
    }
}

impl FromStr for FieldName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(FieldName::A),
            "B" => Ok(FieldName::B),
            "C" => Ok(FieldName::C),
            other => Err(Error::domain(format!("unknown field {other:?}"))),
        }
    }
}
