//! Fast forward and adjoint vector transforms. Each reduces to three scalar
//! transforms of degree `L+1` plus an `O(L²)` coupling step.

use num_complex::Complex;

use crate::cg::{build_adjoint_coupling_with, build_cg_tables, CgTables};
use crate::error::{Error, Result};
use crate::scalar::{CVec3, Real};
use crate::sht::{adjoint_direct_batch, adjoint_fast_batch, forward_direct_batch, forward_fast_batch, TensorGrid};
use crate::types::{idx, QuadratureRule, ScalarCoefficients, SpherePoint, TangentFieldSamples, VectorCoefficients};

/// Which scalar transform backs the vector transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalarPath {
    /// Fast when tensor-grid structure is available, direct otherwise.
    #[default]
    Auto,
    Direct,
    Fast,
}

/// Where the adjoint transform is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum EvalTarget<'a, T> {
    Points(&'a [SpherePoint<T>]),
    Grid(&'a TensorGrid<T>),
}

impl<'a, T: Real> From<&'a QuadratureRule<T>> for EvalTarget<'a, T> {
    fn from(rule: &'a QuadratureRule<T>) -> Self {
        match rule.grid() {
            Some(g) => EvalTarget::Grid(g),
            None => EvalTarget::Points(rule.points()),
        }
    }
}

impl<'a, T: Real> From<&'a [SpherePoint<T>]> for EvalTarget<'a, T> {
    fn from(points: &'a [SpherePoint<T>]) -> Self {
        EvalTarget::Points(points)
    }
}

impl<'a, T: Real> From<&'a TensorGrid<T>> for EvalTarget<'a, T> {
    fn from(grid: &'a TensorGrid<T>) -> Self {
        EvalTarget::Grid(grid)
    }
}

fn resolve_grid<'a, T: Real>(grid: Option<&'a TensorGrid<T>>, path: ScalarPath) -> Result<Option<&'a TensorGrid<T>>> {
    match (path, grid) {
        (ScalarPath::Direct, _) => Ok(None),
        (_, Some(g)) => Ok(Some(g)),
        (ScalarPath::Auto, None) => Ok(None),
        (ScalarPath::Fast, None) => Err(Error::domain("the fast scalar path needs a tensor-product grid")),
    }
}

/// Forward vector transform: `â_{ℓ,m}`, `b̂_{ℓ,m}` for `1 ≤ ℓ ≤ L` from
/// samples at the rule's nodes.
pub fn forward_favest<T: Real>(
    samples: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
    l_max: usize,
    path: ScalarPath,
) -> Result<VectorCoefficients<T>> {
    let tables = build_cg_tables::<T>(l_max)?;
    forward_with(samples, rule, &tables, path)
}

pub(crate) fn forward_with<T: Real>(
    samples: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
    t: &CgTables<T>,
    path: ScalarPath,
) -> Result<VectorCoefficients<T>> {
    if samples.len() != rule.len() || samples.points() != rule.points() {
        return Err(Error::domain("sample points differ from the rule's nodes"));
    }
    let l_max = t.l_max();
    let grid = resolve_grid(rule.grid(), path)?;
    let i = Complex::new(T::zero(), T::one());
    let n = samples.len();
    let mut f1 = Vec::with_capacity(n);
    let mut f2 = Vec::with_capacity(n);
    let mut f3 = Vec::with_capacity(n);
    for v in samples.values() {
        f1.push(-v[0] + i * v[1]);
        f2.push(v[0] + i * v[1]);
        f3.push(v[2]);
    }
    let fs: [&[Complex<T>]; 3] = [&f1, &f2, &f3];
    let sh = match grid {
        Some(g) => forward_fast_batch(&fs, g, l_max + 1)?,
        None => forward_direct_batch(&fs, rule.points(), rule.weights(), l_max + 1)?,
    };
    let (s1, s2, s3) = (&sh[0], &sh[1], &sh[2]);
    let h = T::FRAC_1_SQRT_2();
    let mut a = ScalarCoefficients::zeros(l_max);
    let mut b = ScalarCoefficients::zeros(l_max);
    for l in 1..=l_max as i64 {
        for m in -l..=l {
            let k = idx(l as usize, m);
            let pm = s1.get(l - 1, m - 1) * t.xi(1, l - 1, m - 1)
                + s1.get(l + 1, m - 1) * t.xi(2, l + 1, m - 1)
                + s2.get(l - 1, m + 1) * t.xi(3, l - 1, m + 1)
                + s2.get(l + 1, m + 1) * t.xi(4, l + 1, m + 1);
            let z = s3.get(l - 1, m) * t.xi(5, l - 1, m) + s3.get(l + 1, m) * t.xi(6, l + 1, m);
            a.values_mut()[k] = pm * h + z;
            let pm = s1.get(l, m - 1) * t.mu(1, l, m - 1) + s2.get(l, m + 1) * t.mu(3, l, m + 1);
            b.values_mut()[k] = -i * (pm * h + s3.get(l, m) * t.mu(2, l, m));
        }
    }
    VectorCoefficients::from_parts(a, b)
}

/// Adjoint vector transform: the degree-`L` partial sum evaluated at the
/// target points.
pub fn adjoint_favest<'a, T: Real>(
    coeffs: &VectorCoefficients<T>,
    target: impl Into<EvalTarget<'a, T>>,
    path: ScalarPath,
) -> Result<TangentFieldSamples<T>> {
    let tables = build_cg_tables::<T>(coeffs.l_max())?;
    adjoint_with(coeffs, target.into(), &tables, path)
}

pub(crate) fn adjoint_with<T: Real>(
    coeffs: &VectorCoefficients<T>,
    target: EvalTarget<'_, T>,
    t: &CgTables<T>,
    path: ScalarPath,
) -> Result<TangentFieldSamples<T>> {
    let l_max = coeffs.l_max();
    let cpl = build_adjoint_coupling_with(coeffs, t);
    let h = T::FRAC_1_SQRT_2();
    let top = l_max + 1;
    let mut g: [ScalarCoefficients<T>; 3] = std::array::from_fn(|_| ScalarCoefficients::zeros(top));
    for l in 0..=top as i64 {
        for m in -l..=l {
            let k = idx(l as usize, m);
            let nu = |j: usize| cpl.nu[j].values()[k];
            let eta = |j: usize| cpl.eta[j].get(l, m);
            g[0].values_mut()[k] = -(nu(0) + nu(1) + eta(0)) * h;
            g[1].values_mut()[k] = -(nu(2) + nu(3) - eta(1)) * h;
            g[2].values_mut()[k] = nu(4) + nu(5) + eta(2);
        }
    }
    let gs = [&g[0], &g[1], &g[2]];
    let (points, comps) = match target {
        EvalTarget::Grid(grid) if path != ScalarPath::Direct => (grid.points(), adjoint_fast_batch(&gs, grid)),
        EvalTarget::Grid(grid) => {
            let pts = grid.points();
            let c = adjoint_direct_batch(&gs, &pts);
            (pts, c)
        }
        EvalTarget::Points(_) if path == ScalarPath::Fast => {
            return Err(Error::domain("the fast scalar path needs a tensor-product grid"))
        }
        EvalTarget::Points(pts) => (pts.to_vec(), adjoint_direct_batch(&gs, pts)),
    };
    let values = (0..points.len()).map(|k| [comps[0][k], comps[1][k], comps[2][k]]).collect();
    Ok(TangentFieldSamples::from_raw(points, values))
}

/// `√(Σ_k w_k |T_k − S_k|²) / √(Σ_k w_k |T_k|²)`.
pub fn weighted_rel_l2<T: Real>(reference: &[CVec3<T>], approx: &[CVec3<T>], weights: &[T]) -> Result<T> {
    if reference.len() != approx.len() || reference.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), got: approx.len().min(weights.len()) });
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for ((r, s), &w) in reference.iter().zip(approx).zip(weights) {
        for c in 0..3 {
            num = num + w * (r[c] - s[c]).norm_sqr();
            den = den + w * r[c].norm_sqr();
        }
    }
    if den <= T::zero() {
        return Err(Error::domain("relative error of a zero field is undefined"));
    }
    Ok((num / den).sqrt())
}

/// Outcome of one forward-then-adjoint pass.
#[derive(Debug, Clone)]
pub struct Roundtrip<T> {
    pub coefficients: VectorCoefficients<T>,
    pub reconstruction: TangentFieldSamples<T>,
    pub rel_l2_error: T,
    pub max_error: T,
}

/// Projects samples onto the degree-`L` vector harmonics and evaluates the
/// projection back at the same nodes.
pub fn roundtrip<T: Real>(samples: &TangentFieldSamples<T>, rule: &QuadratureRule<T>, l_max: usize) -> Result<Roundtrip<T>> {
    roundtrip_with_path(samples, rule, l_max, ScalarPath::Auto)
}

pub fn roundtrip_with_path<T: Real>(
    samples: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
    l_max: usize,
    path: ScalarPath,
) -> Result<Roundtrip<T>> {
    let tables = build_cg_tables::<T>(l_max)?;
    let coefficients = forward_with(samples, rule, &tables, path)?;
    let reconstruction = adjoint_with(&coefficients, rule.into(), &tables, path)?;
    let rel_l2_error = weighted_rel_l2(samples.values(), reconstruction.values(), rule.weights())?;
    let max_error = samples.max_diff(&reconstruction)?;
    Ok(Roundtrip { coefficients, reconstruction, rel_l2_error, max_error })
}

/// Infinity-norm errors of two forward/adjoint cycles
/// `T₀ → (a₀,b₀) → T₁ → (a₁,b₁) → T₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatErrors<T> {
    pub t1_t0: T,
    pub t2_t0: T,
    pub t2_t1: T,
    pub coeff: T,
}

pub fn repeat_transform_errors<T: Real>(
    samples: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
    l_max: usize,
) -> Result<RepeatErrors<T>> {
    let tables = build_cg_tables::<T>(l_max)?;
    let c0 = forward_with(samples, rule, &tables, ScalarPath::Auto)?;
    let t1 = adjoint_with(&c0, rule.into(), &tables, ScalarPath::Auto)?;
    let c1 = forward_with(&t1, rule, &tables, ScalarPath::Auto)?;
    let t2 = adjoint_with(&c1, rule.into(), &tables, ScalarPath::Auto)?;
    Ok(RepeatErrors {
        t1_t0: t1.max_diff(samples)?,
        t2_t0: t2.max_diff(samples)?,
        t2_t1: t2.max_diff(&t1)?,
        coeff: c1.max_abs_diff(&c0),
    })
}
