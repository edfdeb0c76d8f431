//! Polynomial-exact quadrature rules on the sphere: Gauss–Legendre tensor
//! rules, spherical designs loaded from point files, and an exactness check.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sht::{forward_direct_batch, forward_fast_batch, TensorGrid};
use crate::types::{QuadratureRule, RuleKind, SpherePoint};

const NEWTON_MAX_ITER: usize = 100;

/// Gauss–Legendre nodes (descending, so colatitudes ascend) and weights on
/// `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let tol = T::lit(1e-15).max(T::epsilon() * T::lit(2.0));
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Tricomi-style initial guess
        let mut x = T::lit((std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos());
        let mut dp = T::one();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol * (T::one() + x.abs()) {
                dp = legendre_and_derivative(n, x).1;
                break;
            }
        }
        nodes.push(x);
        weights.push(T::lit(2.0) / ((T::one() - x * x) * dp * dp));
    }
    (nodes, weights)
}

fn legendre_and_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize_(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Gauss–Legendre tensor rule exact for spherical polynomials of degree `t`:
/// `⌈(t+1)/2⌉` Gauss rings in `cos θ` times `t+1` equispaced longitudes.
pub fn gen_gl_tensor<T: Real>(t: usize) -> (TensorGrid<T>, QuadratureRule<T>) {
    let n_theta = t / 2 + 1;
    let n_phi = t + 1;
    let (x, w) = gauss_legendre::<T>(n_theta);
    let sin: Vec<T> = x.iter().map(|&c| ((T::one() - c) * (T::one() + c)).max(T::zero()).sqrt()).collect();
    let lon = T::TAU() / T::from_usize_(n_phi);
    let ring_w: Vec<T> = w.iter().map(|&wi| wi * lon).collect();
    let grid = TensorGrid::from_cos_sin(x, sin, ring_w, n_phi).expect("Gauss nodes lie strictly inside (-1, 1)");
    let rule = grid.to_rule(Some(t), RuleKind::GlTensor).expect("Gauss weights sum to 4π");
    (grid, rule)
}

/// One parsed row of a point file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRow<T> {
    pub point: SpherePoint<T>,
    pub weight: Option<T>,
}

/// Parses `x y z` or `x y z w` rows. Blank lines and `#` comments are
/// skipped. Points within `1e-6` of unit norm are renormalized.
pub fn parse_point_rows<T: Real>(text: &str) -> Result<Vec<PointRow<T>>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        if nums.len() != 3 && nums.len() != 4 {
            return Err(Error::Parse { line: i + 1, msg: format!("expected 3 or 4 columns, found {}", nums.len()) });
        }
        let (x, y, z) = (nums[0], nums[1], nums[2]);
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Parse { line: i + 1, msg: format!("point norm {norm} is not 1") });
        }
        let point = SpherePoint::normalized(T::lit(x), T::lit(y), T::lit(z))
            .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        rows.push(PointRow { point, weight: nums.get(3).map(|&w| T::lit(w)) });
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no points".into() });
    }
    Ok(rows)
}

/// Loads a spherical design (`x y z` per line, equal weights `4π/N`).
/// The claimed exactness `t` is recorded, not certified.
pub fn load_design<T: Real>(path: impl AsRef<Path>, t: usize) -> Result<QuadratureRule<T>> {
    let text = std::fs::read_to_string(path)?;
    design_from_str(&text, t)
}

pub fn design_from_str<T: Real>(text: &str, t: usize) -> Result<QuadratureRule<T>> {
    let rows = parse_point_rows::<T>(text)?;
    if rows.iter().any(|r| r.weight.is_some()) {
        return Err(Error::Parse { line: 0, msg: "design files carry no weight column".into() });
    }
    let pts = rows.into_iter().map(|r| r.point).collect();
    QuadratureRule::equal_weight(pts, Some(t), RuleKind::SphericalDesign)
}

/// Loads any rule file. Three-column files get equal weights; four-column
/// files use the given weights. No exactness is claimed. Tensor structure
/// is detected when present.
pub fn load_rule<T: Real>(path: impl AsRef<Path>) -> Result<QuadratureRule<T>> {
    let text = std::fs::read_to_string(path)?;
    rule_from_str(&text)
}

pub fn rule_from_str<T: Real>(text: &str) -> Result<QuadratureRule<T>> {
    let rows = parse_point_rows::<T>(text)?;
    let weighted = rows.iter().filter(|r| r.weight.is_some()).count();
    let rule = if weighted == 0 {
        QuadratureRule::equal_weight(rows.into_iter().map(|r| r.point).collect(), None, RuleKind::Custom)?
    } else if weighted == rows.len() {
        let (pts, ws) = rows.into_iter().map(|r| (r.point, r.weight.expect("weighted"))).unzip();
        QuadratureRule::new(pts, ws, None, RuleKind::Custom)?
    } else {
        return Err(Error::Parse { line: 0, msg: "mixed 3- and 4-column rows".into() });
    };
    Ok(rule.detect_grid())
}

/// `x y z w` rows with 17 significant digits.
pub fn format_rule<T: Real>(rule: &QuadratureRule<T>) -> String {
    let mut s = String::with_capacity(rule.len() * 100);
    for (p, w) in rule.points().iter().zip(rule.weights()) {
        let v = |x: T| x.to_f64().expect("finite");
        writeln!(s, "{:.16e} {:.16e} {:.16e} {:.16e}", v(p.x()), v(p.y()), v(p.z()), v(*w)).expect("string write");
    }
    s
}

/// Result of an exactness certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactnessReport<T> {
    pub max_defect: T,
    pub pass: bool,
}

/// Largest `|Σ_i w_i Y_{ℓ,m}(x_i) − √(4π)·δ_{ℓ0}|` over `ℓ ≤ t`; passes when
/// it is at most `1e-8`.
pub fn verify_exactness<T: Real>(rule: &QuadratureRule<T>, t: usize) -> ExactnessReport<T> {
    let ones = vec![Complex::new(T::one(), T::zero()); rule.len()];
    // conj(Σ w conj(Y)) = Σ w Y for real weights; the modulus is what matters
    let sums = match rule.grid() {
        Some(grid) => forward_fast_batch(&[&ones], grid, t),
        None => forward_direct_batch(&[&ones], rule.points(), rule.weights(), t),
    }
    .expect("lengths agree by construction")
    .pop()
    .expect("one transform");
    let root = (T::lit(4.0) * T::PI()).sqrt();
    let max_defect = sums.iter().fold(T::zero(), |acc, (l, _, v)| {
        let target = if l == 0 { Complex::new(root, T::zero()) } else { Complex::new(T::zero(), T::zero()) };
        acc.max((v - target).norm())
    });
    ExactnessReport { max_defect, pass: max_defect <= T::lit(1e-8) }
}

/// The twelve vertices of a regular icosahedron, a spherical 5-design.
pub fn icosahedron_design<T: Real>() -> QuadratureRule<T> {
    design_from_str(ICOSAHEDRON, 5).expect("bundled design is valid")
}

/// Bundled icosahedron point file.
pub const ICOSAHEDRON: &str = include_str!("../data/icosahedron.txt");
