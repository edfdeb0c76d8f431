//! Stability ratios of the forward transform, reconstruction error metrics,
//! and a timing harness.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cg::{build_cg_tables, CgTables};
use crate::error::{Error, Result};
use crate::favest::{adjoint_with, forward_with, weighted_rel_l2, ScalarPath};
use crate::legendre::{fill_ylm_row, tri, LegendreRecurrence};
use crate::quadrature::gen_gl_tensor;
use crate::scalar::{cvec_norm, cvec_zero, czero, Real};
use crate::types::{idx, spectrum_len, QuadratureRule, SpherePoint, TangentFieldSamples, VectorCoefficients};
use crate::vsh::{vsh_row, VshValue};

/// Ratios of `|y(x_k)|` to the sum of the absolute values of the terms the
/// fast transform adds up, maximised over `ℓ ≤ L`, `1 ≤ |m| ≤ ℓ` and nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub l_max: usize,
    pub n: usize,
    pub r_hat: f64,
    pub r_tilde: f64,
    pub r_hat_over_n: f64,
    pub r_tilde_over_n: f64,
    /// Largest single Cartesian component of `y^div` relative to `V̂`; at
    /// most 1 by the triangle inequality.
    pub component_hat: f64,
    /// Same for `y^curl` relative to `Ṽ`.
    pub component_tilde: f64,
}

/// Denominators at or below this are skipped.
const TINY: f64 = 1e-300;

#[derive(Clone, Copy, Default)]
struct Maxima {
    r_hat: f64,
    r_tilde: f64,
    c_hat: f64,
    c_tilde: f64,
}

impl Maxima {
    fn merge(self, o: Self) -> Self {
        Maxima {
            r_hat: self.r_hat.max(o.r_hat),
            r_tilde: self.r_tilde.max(o.r_tilde),
            c_hat: self.c_hat.max(o.c_hat),
            c_tilde: self.c_tilde.max(o.c_tilde),
        }
    }
}

fn denominators(t: &CgTables<f64>, row: &[Complex<f64>], top: usize, l: i64, m: i64) -> (f64, f64) {
    let y = |a: i64, b: i64| {
        if a < 0 || a as usize > top || b.abs() > a {
            0.0
        } else {
            row[idx(a as usize, b)].norm()
        }
    };
    let v_hat = t.xi(1, l - 1, m - 1).abs() * y(l - 1, m - 1)
        + t.xi(2, l + 1, m - 1).abs() * y(l + 1, m - 1)
        + t.xi(3, l - 1, m + 1).abs() * y(l - 1, m + 1)
        + t.xi(4, l + 1, m + 1).abs() * y(l + 1, m + 1)
        + t.xi(5, l - 1, m).abs() * y(l - 1, m)
        + t.xi(6, l + 1, m).abs() * y(l + 1, m);
    let v_tilde =
        t.mu(1, l, m - 1).abs() * y(l, m - 1) + t.mu(3, l, m + 1).abs() * y(l, m + 1) + t.mu(2, l, m).abs() * y(l, m);
    (std::f64::consts::SQRT_2 * v_hat, std::f64::consts::SQRT_2 * v_tilde)
}

/// Stability ratios over the nodes of `rule` (weights are not used).
pub fn stability_ratios(l_max: usize, rule: &QuadratureRule<f64>) -> Result<StabilityReport> {
    stability_ratios_at(l_max, rule.points())
}

pub fn stability_ratios_at(l_max: usize, points: &[SpherePoint<f64>]) -> Result<StabilityReport> {
    let tables = build_cg_tables::<f64>(l_max)?;
    let top = l_max + 1;
    let rec = LegendreRecurrence::<f64>::new(top);
    let len = spectrum_len(l_max);
    let max = points
        .par_iter()
        .map_init(
            || {
                (
                    vec![0.0; tri(top, top) + 1],
                    vec![czero::<f64>(); spectrum_len(top)],
                    vec![VshValue { div: cvec_zero(), curl: cvec_zero() }; len],
                )
            },
            |(leg, row, vals), p| {
                fill_ylm_row(&rec, p, leg, row);
                vsh_row(row, l_max, vals);
                let mut mx = Maxima::default();
                for l in 1..=l_max as i64 {
                    for m in (-l..=l).filter(|&m| m != 0) {
                        let (vh, vt) = denominators(&tables, row, top, l, m);
                        let v = &vals[idx(l as usize, m)];
                        if vh > TINY {
                            mx.r_hat = mx.r_hat.max(cvec_norm(&v.div) / vh);
                            mx.c_hat = v.div.iter().fold(mx.c_hat, |a, c| a.max(c.norm() / vh));
                        }
                        if vt > TINY {
                            mx.r_tilde = mx.r_tilde.max(cvec_norm(&v.curl) / vt);
                            mx.c_tilde = v.curl.iter().fold(mx.c_tilde, |a, c| a.max(c.norm() / vt));
                        }
                    }
                }
                mx
            },
        )
        .reduce(Maxima::default, Maxima::merge);
    let n = points.len();
    let nf = n.max(1) as f64;
    Ok(StabilityReport {
        l_max,
        n,
        r_hat: max.r_hat,
        r_tilde: max.r_tilde,
        r_hat_over_n: max.r_hat / nf,
        r_tilde_over_n: max.r_tilde / nf,
        component_hat: max.c_hat,
        component_tilde: max.c_tilde,
    })
}

/// Uniformly distributed random points from a seeded generator.
pub fn random_points(n: usize, seed: u64) -> Vec<SpherePoint<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            SpherePoint::from_angles(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// `(relative weighted L2 error, max pointwise 3-vector error)`.
pub fn error_metrics<T: Real>(
    reference: &TangentFieldSamples<T>,
    approx: &TangentFieldSamples<T>,
    rule: &QuadratureRule<T>,
) -> Result<(T, T)> {
    if reference.len() != rule.len() {
        return Err(Error::LengthMismatch { expected: rule.len(), got: reference.len() });
    }
    let rel = weighted_rel_l2(reference.values(), approx.values(), rule.weights())?;
    Ok((rel, reference.max_diff(approx)?))
}

/// One line of a timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub l_max: usize,
    /// Number of nodes.
    pub n: usize,
    /// Coefficient count `L² + L` (two families of `L² + 2L` would double it;
    /// this follows the usual per-family count).
    pub m: usize,
    pub t_fwd: f64,
    pub t_adj: f64,
    /// `t_fwd` over the previous record's `t_fwd`.
    pub ratio_fwd: Option<f64>,
    pub ratio_adj: Option<f64>,
    pub threads: usize,
    pub path: ScalarPath,
}

/// Timing settings.
#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub repetitions: usize,
    pub threads: usize,
    pub path: ScalarPath,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { repetitions: 5, threads: 1, path: ScalarPath::Fast, seed: 1 }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times forward and adjoint transforms on Gauss–Legendre grids of
/// exactness `2(L+1)` for each `L`, reporting medians.
pub fn bench(l_list: &[usize], cfg: BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.repetitions == 0 {
        return Err(Error::domain("bench needs at least one repetition"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::domain(e.to_string()))?;
    let mut out: Vec<BenchRecord> = Vec::with_capacity(l_list.len());
    for &l_max in l_list {
        let (_, rule) = gen_gl_tensor::<f64>(2 * (l_max + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ l_max as u64);
        let mut rc = || Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let vals = (0..rule.len()).map(|_| [rc(), rc(), rc()]).collect();
        let samples = TangentFieldSamples::new(rule.points().to_vec(), vals)?;
        let mut coeffs = VectorCoefficients::zeros(l_max)?;
        for l in 1..=l_max as i64 {
            for m in -l..=l {
                coeffs.set_div(l, m, rc())?;
                coeffs.set_curl(l, m, rc())?;
            }
        }
        let (t_fwd, t_adj) = pool.install(|| -> Result<(f64, f64)> {
            // Untimed warm-up so allocation and cache effects stay out of the medians.
            let tables = build_cg_tables::<f64>(l_max)?;
            std::hint::black_box(forward_with(&samples, &rule, &tables, cfg.path)?);
            std::hint::black_box(adjoint_with(&coeffs, (&rule).into(), &tables, cfg.path)?);
            let mut tf = Vec::with_capacity(cfg.repetitions);
            let mut ta = Vec::with_capacity(cfg.repetitions);
            for _ in 0..cfg.repetitions {
                let start = Instant::now();
                let tables = build_cg_tables::<f64>(l_max)?;
                std::hint::black_box(forward_with(&samples, &rule, &tables, cfg.path)?);
                tf.push(start.elapsed().as_secs_f64());
                let start = Instant::now();
                let tables = build_cg_tables::<f64>(l_max)?;
                std::hint::black_box(adjoint_with(&coeffs, (&rule).into(), &tables, cfg.path)?);
                ta.push(start.elapsed().as_secs_f64());
            }
            Ok((median(tf), median(ta)))
        })?;
        let prev = out.last();
        out.push(BenchRecord {
            l_max,
            n: rule.len(),
            m: l_max * l_max + l_max,
            t_fwd,
            t_adj,
            ratio_fwd: prev.map(|p| t_fwd / p.t_fwd),
            ratio_adj: prev.map(|p| t_adj / p.t_adj),
            threads: cfg.threads.max(1),
            path: cfg.path,
        });
    }
    Ok(out)
}
