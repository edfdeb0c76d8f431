//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use favest::cg::{cg_explicit, CgKind};
use favest::diagnostics::{bench, random_points, stability_ratios_at, BenchConfig};
use favest::favest::{adjoint_favest, forward_favest, repeat_transform_errors, roundtrip, ScalarPath};
use favest::fields::{field_a, field_b, field_c, FieldPart};
use favest::quadrature::{gen_gl_tensor, icosahedron_design, verify_exactness};
use favest::vsh::{adjoint_vsht_direct, eval_vsh, forward_vsht_direct};
use favest::{SpherePoint, TangentFieldSamples, VectorCoefficients, C};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ln_fact(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Racah's closed sum for `C^{J,M}_{j1,m1,j2,m2}`, integer spins.
fn racah_cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j || j < (j1 - j2).abs() || j > j1 + j2 || j1 < 0 {
        return 0.0;
    }
    let pre = 0.5
        * ((2 * j + 1) as f64).ln()
        + 0.5 * (ln_fact(j + j1 - j2) + ln_fact(j - j1 + j2) + ln_fact(j1 + j2 - j) - ln_fact(j1 + j2 + j + 1))
        + 0.5
            * (ln_fact(j + m)
                + ln_fact(j - m)
                + ln_fact(j1 - m1)
                + ln_fact(j1 + m1)
                + ln_fact(j2 - m2)
                + ln_fact(j2 + m2));
    let mut sum = 0.0;
    for k in 0..=(j1 + j2 - j) {
        let den = [k, j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if den.iter().any(|&d| d < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (pre - den.iter().map(|&d| ln_fact(d)).sum::<f64>()).exp();
    }
    sum
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for l in 1..=30i64 {
        for m in -l..=l {
            for (kind, (dj, dm, mu)) in [
                (CgKind::LowerRaise, (-1, -1, 1)),
                (CgKind::UpperRaise, (1, -1, 1)),
                (CgKind::LowerZero, (-1, 0, 0)),
                (CgKind::UpperZero, (1, 0, 0)),
                (CgKind::LowerLower, (-1, 1, -1)),
                (CgKind::UpperLower, (1, 1, -1)),
                (CgKind::SameRaise, (0, -1, 1)),
                (CgKind::SameLower, (0, 1, -1)),
                (CgKind::SameZero, (0, 0, 0)),
            ] {
                let got: f64 = cg_explicit(kind, l, m);
                worst = worst.max((got - racah_cg(l + dj, m + dm, 1, mu, l, m)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-12 && secs < 1.0, format!("max |explicit - oracle| = {worst:.2e}, {secs:.3} s"))
}

fn random_tangent(points: &[SpherePoint<f64>], rng: &mut ChaCha8Rng) -> TangentFieldSamples<f64> {
    let values = points
        .iter()
        .map(|p| {
            let x = p.to_array();
            let mut v: [C<f64>; 3] = std::array::from_fn(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let dot = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
            for c in 0..3 {
                v[c] -= dot * x[c];
            }
            v
        })
        .collect();
    TangentFieldSamples::new(points.to_vec(), values).unwrap()
}

fn random_coeffs(l_max: usize, rng: &mut ChaCha8Rng) -> VectorCoefficients<f64> {
    let mut c = VectorCoefficients::zeros(l_max).unwrap();
    for l in 1..=l_max as i64 {
        for m in -l..=l {
            c.set_div(l, m, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            c.set_curl(l, m, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
    }
    c
}

fn crit2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for l in [4usize, 8, 16] {
        let (_, rule) = gen_gl_tensor::<f64>(2 * (l + 1));
        let s = random_tangent(rule.points(), &mut rng);
        let fast = forward_favest(&s, &rule, l, ScalarPath::Auto).unwrap();
        let direct = forward_vsht_direct(&s, &rule, l).unwrap();
        worst = worst.max(fast.max_abs_diff(&direct));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs < 30.0, format!("max coefficient difference = {worst:.2e}, {secs:.2} s"))
}

fn crit3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts = random_points(500, 33);
    let mut worst = 0.0f64;
    for l in [4usize, 8, 16] {
        let c = random_coeffs(l, &mut rng);
        let fast = adjoint_favest(&c, &pts[..], ScalarPath::Auto).unwrap();
        let direct = adjoint_vsht_direct(&c, &pts);
        worst = worst.max(fast.max_diff(&direct).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs < 30.0, format!("max sample difference = {worst:.2e}, {secs:.2} s"))
}

fn crit4() -> Outcome {
    let (_, rule) = gen_gl_tensor::<f64>(18);
    let mut basis = Vec::new();
    for l in 1..=8i64 {
        for m in -l..=l {
            let vals: Vec<_> = rule.points().iter().map(|p| eval_vsh(l, m, p).unwrap()).collect();
            basis.push(vals.iter().map(|v| v.div).collect::<Vec<_>>());
            basis.push(vals.iter().map(|v| v.curl).collect::<Vec<_>>());
        }
    }
    let mut worst = 0.0f64;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let g: C<f64> = rule
                .weights()
                .iter()
                .zip(u.iter().zip(v))
                .map(|(&w, (a, b))| (a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]) * w)
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    outcome(worst <= 1e-10, format!("{} harmonics, max |G - I| = {worst:.2e}", basis.len()))
}

fn field_samples(f: &favest::fields::TangentField, pts: &[SpherePoint<f64>]) -> TangentFieldSamples<f64> {
    f.sample(pts, FieldPart::Full).unwrap()
}

fn crit5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (_, rule) = gen_gl_tensor::<f64>(66);
    let c = random_coeffs(32, &mut rng);
    let t = adjoint_favest(&c, &rule, ScalarPath::Auto).unwrap();
    let back = forward_favest(&t, &rule, 32, ScalarPath::Auto).unwrap();
    let drift = back.max_abs_diff(&c);
    let (_, rule_a) = gen_gl_tensor::<f64>(22);
    let rel = roundtrip(&field_samples(&field_a(), rule_a.points()), &rule_a, 10).unwrap().rel_l2_error;
    outcome(drift <= 1e-9 && rel <= 1e-9, format!("L=32 coefficient drift = {drift:.2e}; field A L=10 rel L2 = {rel:.2e}"))
}

fn rel_error(f: &favest::fields::TangentField, l: usize) -> f64 {
    let (_, rule) = gen_gl_tensor::<f64>(2 * (l + 1));
    roundtrip(&field_samples(f, rule.points()), &rule, l).unwrap().rel_l2_error
}

fn crit6() -> Outcome {
    let b10 = rel_error(&field_b(), 10);
    let b30 = rel_error(&field_b(), 30);
    let c30 = rel_error(&field_c(), 30);
    let pass = (0.03..=0.15).contains(&b10) && (1e-3..=1e-2).contains(&b30) && (2e-3..=2e-2).contains(&c30);
    outcome(pass, format!("B L=10 {b10:.3e}, B L=30 {b30:.3e}, C L=30 {c30:.3e}"))
}

fn crit7() -> Outcome {
    let (_, rule) = gen_gl_tensor::<f64>(82);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f, target) in [("A", field_a(), None), ("B", field_b(), Some(1.49e-3)), ("C", field_c(), Some(2.0e-2))] {
        let e = repeat_transform_errors(&field_samples(&f, rule.points()), &rule, 40).unwrap();
        let mut ok = e.t2_t1 <= 1e-9 && e.coeff <= 1e-9;
        if let Some(t) = target {
            ok &= e.t1_t0 >= t / 3.0 && e.t1_t0 <= t * 3.0;
        }
        pass &= ok;
        parts.push(format!(
            "{name}[{}]: |T1-T0| {:.2e} |T2-T0| {:.2e} |T2-T1| {:.2e} coeff {:.2e}",
            if ok { "ok" } else { "out of bounds" },
            e.t1_t0,
            e.t2_t0,
            e.t2_t1,
            e.coeff
        ));
    }
    outcome(pass, parts.join("; "))
}

fn crit8() -> Outcome {
    let fast = bench(&[32, 64], BenchConfig { repetitions: 15, threads: 1, path: ScalarPath::Fast, seed: 8 }).unwrap();
    let direct = bench(&[32, 64], BenchConfig { repetitions: 21, threads: 1, path: ScalarPath::Direct, seed: 8 }).unwrap();
    let rf = fast[1].ratio_fwd.unwrap();
    let rd = direct[1].ratio_fwd.unwrap();
    let speedup = direct[1].t_fwd / fast[1].t_fwd;
    outcome(
        rf <= 10.0 && rd >= 12.0 && speedup >= 3.0,
        format!(
            "fast t(64)/t(32) = {rf:.2}, direct t(64)/t(32) = {rd:.2} ({:.4} s -> {:.4} s), speedup at L=64 = {speedup:.1}x",
            direct[0].t_fwd, direct[1].t_fwd
        ),
    )
}

fn crit9() -> Outcome {
    let mut comp = 0.0f64;
    let mut over_n = Vec::new();
    for (n, seed) in [(100usize, 91u64), (1000, 92), (10_000, 93)] {
        let r = stability_ratios_at(5, &random_points(n, seed)).unwrap();
        comp = comp.max(r.component_hat).max(r.component_tilde);
        over_n.push(r.r_hat_over_n);
    }
    let pass = comp <= 1.0 + 1e-12 && over_n[2] < over_n[0];
    outcome(pass, format!("max component ratio = {comp:.6}, r_hat/N at N=100 {:.3e}, N=10000 {:.3e}", over_n[0], over_n[2]))
}

fn crit10() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..=140 {
        let (_, rule) = gen_gl_tensor::<f64>(t);
        worst = worst.max(verify_exactness(&rule, t).max_defect);
    }
    let ico = verify_exactness(&icosahedron_design::<f64>(), 5);
    outcome(worst <= 1e-10 && ico.pass, format!("GL t<=140 max defect = {worst:.2e}; icosahedron t=5 defect = {:.2e}", ico.max_defect))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("CG coefficients against Racah oracle", crit1),
        ("fast forward equals direct forward", crit2),
        ("fast adjoint equals direct adjoint", crit3),
        ("orthonormality of the basis", crit4),
        ("lossless roundtrip", crit5),
        ("roundtrip error bands", crit6),
        ("repeated transforms", crit7),
        ("complexity", crit8),
        ("stability", crit9),
        ("quadrature certification", crit10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criterion(s) failed");
        std::process::exit(1);
    }
}
