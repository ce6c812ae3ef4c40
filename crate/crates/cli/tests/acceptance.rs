//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p lfqa-cli --test acceptance`.
//! Criterion 13 needs `LFQA_DATASET_MANIFEST` (and optionally
//! `LFQA_DATASET_LAYOUT`, `LFQA_DATASET_POLARITY`) pointing at a manifest of
//! a real subjective dataset; it is skipped otherwise.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lfqa_core::eval::{lcc, logistic_fit, srcc, FeatureTable};
use lfqa_core::gdd::{self, gradient_direction_map, gradients};
use lfqa_core::lcn::cyclopean::cyclopean_weights;
use lfqa_core::lcn::{
    estimate_disparity, fit_aggd, mscn, mscn_window, synthesize_cyclopean, ActivityConfig,
    DisparityConfig, DisparityMap,
};
use lfqa_core::svr::smo::{max_kkt_violation, solve};
use lfqa_core::svr::{svr_train, KernelMatrix, SvrParams};
use lfqa_core::synth::{
    apply_distortion, build_benchmark, generate_scene, BenchmarkConfig, DistortionKind,
    DistortionSpec, MAX_LEVEL,
};
use lfqa_core::wlbp::{riu2_label, wlbp_features, LbpConfig};
use lfqa_core::{EpiSlice, Image, LightField, Orientation, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::{gamma_lr, ln_gamma};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

// ---------------------------------------------------------------- 1

/// riu2 label from the definition: minimise over all rotations, then count
/// 0/1 transitions around the circle.
fn lbp_oracle(bits: u32, p: usize) -> u16 {
    let mask = (1u32 << p) - 1;
    let rotated = (0..p)
        .map(|k| ((bits >> k) | (bits << (p - k))) & mask)
        .min()
        .unwrap();
    let bit = |i: usize| (rotated >> (i % p)) & 1;
    let transitions = (0..p).filter(|&i| bit(i) != bit(i + 1)).count();
    if transitions <= 2 {
        (0..p).map(bit).sum::<u32>() as u16
    } else {
        p as u16 + 1
    }
}

fn c1_lbp_oracle() -> Verdict {
    let start = Instant::now();
    let mismatches = (0u32..256).filter(|&b| riu2_label(b, 8) != lbp_oracle(b, 8)).count();
    let elapsed = start.elapsed();
    verdict(
        mismatches == 0 && elapsed < Duration::from_secs(1),
        format!("{mismatches} mismatches over 256 patterns in {elapsed:?}"),
    )
}

// ---------------------------------------------------------------- 2

fn ramp(f: impl Fn(usize, usize) -> f64) -> EpiSlice {
    EpiSlice {
        orientation: Orientation::Vertical,
        fixed_angular: 0,
        fixed_spatial: 0,
        pixels: Image::from_fn_clamped(12, 9, f),
    }
}

fn c2_gradient_kernels() -> Verdict {
    let cases = [
        ("I=t", ramp(|x, _| x as f64), 8.0, 0.0, 0.0),
        ("I=v", ramp(|_, y| y as f64), 0.0, 8.0, -90.0),
        ("I=v+t", ramp(|x, y| (x + y) as f64), 8.0, 8.0, -45.0),
    ];
    let mut bad = Vec::new();
    for (name, epi, ex_want, ey_want, dir_want) in cases {
        let (ex, ey) = gradients(&epi.pixels);
        let dirs = gradient_direction_map(&epi).unwrap();
        let w = epi.pixels.width();
        for y in 1..epi.pixels.height() - 1 {
            for x in 1..w - 1 {
                let d = dirs.values()[y * w + x];
                if ex.get(x, y) != ex_want || ey.get(x, y) != ey_want || d != dir_want {
                    bad.push(format!("{name} at ({x},{y})"));
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "Ex/Ey = +-8 and directions 0/-90/-45 exact on all interior pixels".into()
        } else {
            format!("{} mismatches, first {}", bad.len(), bad[0])
        },
    )
}

// ---------------------------------------------------------------- 3

fn c3_mscn() -> Verdict {
    let flat = Plane::filled(32, 20, 137.0);
    let out = mscn(&flat).unwrap();
    let max_abs = out.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sum: f64 = mscn_window().iter().sum();
    verdict(
        max_abs == 0.0 && (sum - 1.0).abs() <= 1e-12,
        format!("max |MSCN| on constant = {max_abs}, window sum - 1 = {:e}", sum - 1.0),
    )
}

// ---------------------------------------------------------------- 4

/// Inverse of the regularised lower incomplete gamma `P(a, x) = p`, by
/// Newton steps safeguarded with bisection.
fn inv_gamma_lr(a: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while gamma_lr(a, hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    let lg = ln_gamma(a);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = gamma_lr(a, x) - p;
        if f.abs() < 1e-14 {
            break;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dens = ((a - 1.0) * x.ln() - x - lg).exp();
        let newton = x - f / dens;
        x = if newton > lo && newton < hi && dens.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    x
}

/// Symmetric generalised Gaussian samples with shape `alpha` and standard
/// deviation `sigma`, by inverting the CDF.
fn ggd_samples(alpha: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let beta = sigma * (ln_gamma(1.0 / alpha) - ln_gamma(3.0 / alpha)).exp().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            sign * beta * inv_gamma_lr(1.0 / alpha, u).powf(1.0 / alpha)
        })
        .collect()
}

fn c4_aggd_recovery() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, tol, seed) in [(2.0, 0.1, 1u64), (1.0, 0.15, 2), (4.0, 0.15, 3)] {
        let xs = ggd_samples(alpha, 1.0, 1_000_000, seed);
        let fit = fit_aggd(&xs).unwrap();
        let good = (fit.alpha - alpha).abs() <= tol
            && (fit.sigma_l - fit.sigma_r).abs() <= 0.05
            && fit.eta.abs() <= 0.02;
        ok &= good;
        parts.push(format!(
            "a={alpha}: fit {:.3} dsigma {:.4} eta {:.4}",
            fit.alpha,
            fit.sigma_l - fit.sigma_r,
            fit.eta
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    verdict(ok, format!("{}; {:.1} s", parts.join("; "), elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------- 5

fn textured(w: usize, h: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Plane::from_fn(w, h, |_, _| rng.gen_range(0.0..255.0));
    // Light smoothing keeps the texture natural-looking but still unique.
    Plane::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                acc += raw.get_clamped(x as isize + dx, y as isize + dy);
            }
        }
        acc / 9.0
    })
}

fn c5_disparity() -> Verdict {
    let left = textured(80, 48, 21);
    let right = Plane::from_fn(80, 48, |x, y| left.get_clamped(x as isize - 3, y as isize));
    let cfg = DisparityConfig {
        d_max: 4,
        ..Default::default()
    };
    let d = estimate_disparity(&left, &right, &cfg).unwrap();
    let margin = 4 + cfg.window / 2;
    let mut interior: Vec<i32> = Vec::new();
    for y in margin..48 - margin {
        for x in margin..80 - margin {
            interior.push(d.get(x, y));
        }
    }
    interior.sort_unstable();
    let median = interior[interior.len() / 2];
    let exact = interior.iter().filter(|&&v| v == 3).count() as f64 / interior.len() as f64;
    verdict(
        median == 3,
        format!("median interior disparity {median} ({:.1}% exactly 3)", 100.0 * exact),
    )
}

// ---------------------------------------------------------------- 6

fn c6_cyclopean() -> Verdict {
    let img = textured(48, 40, 5);
    let cfg = ActivityConfig::default();
    let c = synthesize_cyclopean(&img, &img, &DisparityMap::zeros(48, 40), &cfg).unwrap();
    let worst = c
        .data()
        .iter()
        .zip(img.data())
        .map(|(a, b)| (a - b).abs() / 255.0)
        .fold(0.0, f64::max);

    let right = textured(48, 40, 6);
    let d = estimate_disparity(&img, &right, &DisparityConfig::default()).unwrap();
    let (wl, wr, _, _) = cyclopean_weights(&img, &right, &d, &cfg);
    let act_l = lfqa_core::lcn::spatial_activity(&img, cfg.n, cfg.a2);
    let act_r = lfqa_core::lcn::spatial_activity(&right, cfg.n, cfg.a2);
    let mut violations = 0;
    for y in 0..40 {
        for x in 0..48 {
            let er = act_r.get_clamped(x as isize + d.get(x, y) as isize, y as isize);
            let upper = 1.0 + cfg.a1 / (act_l.get(x, y) + er + cfg.a1);
            let sum = wl.get(x, y) + wr.get(x, y);
            if !(sum >= 1.0 - 1e-12 && sum <= upper + 1e-12) {
                violations += 1;
            }
        }
    }
    verdict(
        worst <= 1e-3 && violations == 0,
        format!("max |C - left|/255 = {worst:.2e}; weight-sum bound violations {violations}"),
    )
}

// ---------------------------------------------------------------- 7

fn axis_mass(lf: &LightField, o: Orientation) -> f64 {
    let h = gdd::mean_histogram(lf, o).unwrap();
    h.mass_near(0.0, 2.0) + h.mass_near(-180.0, 2.0)
}

fn c7_gdd_signature(bench: &lfqa_core::synth::Benchmark) -> Verdict {
    let mut worst_gain = f64::INFINITY;
    let mut cases = 0;
    for spec in &bench.scenes {
        let pristine = generate_scene(spec).unwrap();
        for level in 3..=MAX_LEVEL {
            let nn = apply_distortion(&pristine, DistortionSpec { kind: DistortionKind::Nn, level }).unwrap();
            for o in Orientation::ALL {
                worst_gain = worst_gain.min(axis_mass(&nn, o) - axis_mass(&pristine, o));
                cases += 1;
            }
        }
    }
    verdict(
        worst_gain > 0.0,
        format!("smallest gain in mass near 0/-180 deg over {cases} scene/level/orientation cases: {worst_gain:.4}"),
    )
}

// ---------------------------------------------------------------- 8

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn c8_wlbp_separation(bench: &lfqa_core::synth::Benchmark) -> Verdict {
    let cfg = LbpConfig::default();
    let seeds = 6;
    let mut h: HashMap<(usize, Option<DistortionKind>, u32), Vec<f64>> = HashMap::new();
    for s in 0..seeds {
        let pristine = generate_scene(&bench.scenes[s]).unwrap();
        h.insert((s, None, 0), wlbp_features(&pristine, &cfg).unwrap().1);
        for kind in [DistortionKind::Nn, DistortionKind::Linear] {
            for level in 1..=MAX_LEVEL {
                let lf = apply_distortion(&pristine, DistortionSpec { kind, level }).unwrap();
                h.insert((s, Some(kind), level), wlbp_features(&lf, &cfg).unwrap().1);
            }
        }
    }
    let (nn, li) = (Some(DistortionKind::Nn), Some(DistortionKind::Linear));
    // Pairs of distinct scenes at equal level: NN vs LINEAR against
    // NN vs NN and LINEAR vs LINEAR.
    let (mut between, mut within, mut pairs) = (0.0, 0.0, 0);
    for level in 1..=MAX_LEVEL {
        for a in 0..seeds {
            for b in 0..seeds {
                if a == b {
                    continue;
                }
                between += l1(&h[&(a, nn, level)], &h[&(b, li, level)]);
                within += 0.5
                    * (l1(&h[&(a, nn, level)], &h[&(b, nn, level)])
                        + l1(&h[&(a, li, level)], &h[&(b, li, level)]));
                pairs += 1;
            }
        }
    }
    let (between, within) = (between / pairs as f64, within / pairs as f64);

    let levels: Vec<f64> = (1..=MAX_LEVEL).map(f64::from).collect();
    let mut monotone = Vec::new();
    for kind in [nn, li] {
        let drift: Vec<f64> = (1..=MAX_LEVEL)
            .map(|l| (0..seeds).map(|s| l1(&h[&(s, kind, l)], &h[&(s, None, 0)])).sum::<f64>() / seeds as f64)
            .collect();
        monotone.push(srcc(&levels, &drift).unwrap());
    }
    verdict(
        between > within && monotone.iter().all(|&r| r >= 0.9),
        format!(
            "{seeds} scenes: between-type L1 {between:.3} vs within-type {within:.3}; drift-vs-level SRCC nn {:.2}, linear {:.2}",
            monotone[0], monotone[1]
        ),
    )
}

// ---------------------------------------------------------------- 9

fn rbf(xs: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let n = xs.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d: f64 = xs[i].iter().zip(&xs[j]).map(|(a, b)| (a - b).powi(2)).sum();
            k[i * n + j] = (-gamma * d).exp();
        }
    }
    k
}

/// Accelerated projected gradient on the `2n`-variable dual; the
/// projection onto the box and the equality constraint is found by
/// bisection on its multiplier.
fn pg_objective(k: &[f64], n: usize, z: &[f64], c: f64, eps: f64) -> f64 {
    let y: Vec<f64> = (0..2 * n).map(|t| if t < n { 1.0 } else { -1.0 }).collect();
    let p: Vec<f64> = z.iter().map(|z| eps - z).chain(z.iter().map(|z| eps + z)).collect();
    let grad = |a: &[f64]| -> Vec<f64> {
        let beta: Vec<f64> = (0..n).map(|i| a[i] - a[i + n]).collect();
        (0..2 * n)
            .map(|t| y[t] * (0..n).map(|j| k[(t % n) * n + j] * beta[j]).sum::<f64>() + p[t])
            .collect()
    };
    let project = |v: &[f64]| -> Vec<f64> {
        let at = |lam: f64| -> Vec<f64> { v.iter().zip(&y).map(|(v, y)| (v - lam * y).clamp(0.0, c)).collect() };
        let (mut lo, mut hi) = (-1e6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if at(mid).iter().zip(&y).map(|(a, y)| a * y).sum::<f64>() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    let l = 2.0 * (0..n).map(|i| k[i * n..(i + 1) * n].iter().sum::<f64>()).fold(0.0, f64::max);
    let (mut a, mut w, mut t) = (vec![0.0; 2 * n], vec![0.0; 2 * n], 1.0f64);
    for _ in 0..30_000 {
        let g = grad(&w);
        let next = project(&w.iter().zip(&g).map(|(w, g)| w - g / l).collect::<Vec<_>>());
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        w = next.iter().zip(&a).map(|(n, o)| n + (t - 1.0) / t_next * (n - o)).collect();
        a = next;
        t = t_next;
    }
    let g = grad(&a);
    a.iter().zip(g.iter().zip(&p)).map(|(a, (g, p))| 0.5 * a * (g + p)).sum()
}

fn c9_svr() -> Verdict {
    let mut worst_rel = 0.0f64;
    let mut worst_kkt = 0.0f64;
    let mut all_converged = true;
    for (seed, n, c, eps) in [(1u64, 12, 1.0, 0.05), (2, 20, 4.0, 0.1), (3, 30, 0.5, 0.02), (4, 30, 16.0, 0.0), (5, 25, 2.0, 0.1)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let z: Vec<f64> = xs
            .iter()
            .map(|x| (0.5 + 0.4 * (2.0 * x[0]).sin() * x[1] + 0.1 * rng.gen_range(-1.0..1.0)).clamp(0.0, 1.0))
            .collect();
        let k = rbf(&xs, 0.8);
        let km = KernelMatrix { n, values: &k };
        let sol = solve(&km, &z, c, eps, 1e-3, 10_000_000);
        all_converged &= sol.report.converged;
        worst_kkt = worst_kkt.max(max_kkt_violation(&km, &z, eps, c, &sol.alpha));
        let reference = pg_objective(&k, n, &z, c, eps);
        worst_rel = worst_rel.max((sol.report.objective - reference).abs() / reference.abs());
    }
    let params = SvrParams::default();
    let xs: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, (i * i) as f64]).collect();
    let constant = svr_train(&xs, &[2.75; 12], &params, vec![]).unwrap();
    let const_ok = [vec![0.0, 0.0], vec![50.0, -3.0]]
        .iter()
        .all(|r| constant.predict(r).unwrap() == 2.75);
    let single = svr_train(&[vec![1.0, 2.0]], &[4.5], &params, vec![]).unwrap();
    let single_ok = (single.predict(&[1.0, 2.0]).unwrap() - 4.5).abs() <= params.epsilon;
    verdict(
        all_converged && worst_kkt <= 1e-3 && worst_rel <= 1e-3 && const_ok && single_ok,
        format!(
            "max KKT violation {worst_kkt:.2e}; max relative objective gap {worst_rel:.2e}; constant-target {const_ok}; single-point {single_ok}"
        ),
    )
}

// ---------------------------------------------------------------- 10

fn c10_metrics() -> Verdict {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0];
    let rev = [5.0, 4.0, 3.0, 2.0, 1.0];
    let perfect = srcc(&a, &a).unwrap() == 1.0
        && srcc(&a, &rev).unwrap() == -1.0
        && lcc(&a, &a).unwrap() == 1.0
        && lcc(&a, &rev).unwrap() == -1.0;
    let half = srcc(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() == 0.5;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut inputs, mut worst) = (0, f64::NEG_INFINITY);
    for case in 0..300 {
        let n = rng.gen_range(5..80);
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let s: Vec<f64> = q
            .iter()
            .map(|&v| match case % 3 {
                0 => rng.gen_range(0.0..5.0),
                1 => 1.5 * v + 2.0 + rng.gen_range(-0.5..0.5),
                _ => 4.0 / (1.0 + (-1.3 * v).exp()) + 1.0 + rng.gen_range(-0.2..0.2),
            })
            .collect();
        let fit = logistic_fit(&q, &s).unwrap();
        worst = worst.max(fit.sse - fit.linear_sse);
        inputs += 1;
    }
    verdict(
        perfect && half && worst <= 1e-9,
        format!(
            "+-1 cases {perfect}; srcc([1,2,3],[1,3,2]) = 0.5 {half}; max (logistic - linear) SSE over {inputs} inputs {worst:.2e}"
        ),
    )
}

// ---------------------------------------------------------------- 11, 12

fn lfqa(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lfqa"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("lfqa {args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Pipeline {
    root: PathBuf,
}

impl Pipeline {
    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

fn c11_end_to_end(pipe: &Pipeline) -> Result<Verdict, String> {
    let start = Instant::now();
    let bench = pipe.path("bench");
    let feats = pipe.path("features.csv");
    let report = pipe.path("report.json");
    lfqa(&["synth", "--seed", "0", "--out", s(&bench)])?;
    lfqa(&["extract", "--input", s(&bench.join("manifest.csv")), "--out", s(&feats)])?;
    let extracted = start.elapsed();
    lfqa(&["eval", "--features", s(&feats), "--trials", "200", "--seed", "0", "--out", s(&report)])?;
    let elapsed = start.elapsed();
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let rows = FeatureTable::read_csv(std::fs::File::open(&feats).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .records
        .len();
    let m = &v["median"];
    let (srcc_m, rmse_m) = (m["srcc"].as_f64().unwrap(), m["rmse"].as_f64().unwrap());
    Ok(verdict(
        rows == 168 && srcc_m >= 0.85 && rmse_m <= 0.7 && elapsed <= Duration::from_secs(15 * 60),
        format!(
            "{rows} items, 200 trials: median SRCC {srcc_m:.4}, LCC {:.4}, RMSE {rmse_m:.4}, OR {:.4}; {:.0} s total ({:.0} s synth+extract) on {} thread(s)",
            m["lcc"].as_f64().unwrap(),
            m["or"].as_f64().unwrap(),
            elapsed.as_secs_f64(),
            extracted.as_secs_f64(),
            rayon::current_num_threads()
        ),
    ))
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut files = 0;
    let mut entries: Vec<_> = std::fs::read_dir(a).map_err(|e| e.to_string())?.collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let (pa, pb) = (e.path(), b.join(e.file_name()));
        if pa.is_dir() {
            files += same_tree(&pa, &pb)?;
        } else {
            if std::fs::read(&pa).ok() != std::fs::read(&pb).ok() {
                return Err(format!("{} differs", pb.display()));
            }
            files += 1;
        }
    }
    Ok(files)
}

fn same_file(a: &Path, b: &Path) -> Result<(), String> {
    if std::fs::read(a).map_err(|e| e.to_string())? == std::fs::read(b).map_err(|e| e.to_string())? {
        Ok(())
    } else {
        Err(format!("{} and {} differ", a.display(), b.display()))
    }
}

fn c12_determinism(pipe: &Pipeline) -> Result<Verdict, String> {
    let p = |n: &str| pipe.path(n);
    lfqa(&["--jobs", "3", "synth", "--seed", "0", "--out", s(&p("bench2"))])?;
    let files = same_tree(&p("bench"), &p("bench2"))?;

    // Extraction is repeated on a subset to keep the run short.
    let subset = p("bench2").join("subset.csv");
    let manifest = std::fs::read_to_string(p("bench2").join("manifest.csv")).map_err(|e| e.to_string())?;
    let keep: Vec<&str> = manifest.lines().take(1 + 42).collect();
    std::fs::write(&subset, keep.join("\n") + "\n").map_err(|e| e.to_string())?;
    lfqa(&["--jobs", "1", "extract", "--input", s(&subset), "--out", s(&p("f1.csv"))])?;
    lfqa(&["--jobs", "4", "extract", "--input", s(&subset), "--out", s(&p("f4.csv"))])?;
    same_file(&p("f1.csv"), &p("f4.csv"))?;

    let feats = p("features.csv");
    for jobs in ["1", "4"] {
        lfqa(&["--jobs", jobs, "eval", "--features", s(&feats), "--trials", "12", "--seed", "5", "--out", s(&p(&format!("r{jobs}.json")))])?;
        lfqa(&["--jobs", jobs, "train", "--features", s(&feats), "--seed", "5", "--out", s(&p(&format!("m{jobs}.json")))])?;
        lfqa(&["--jobs", jobs, "predict", "--model", s(&p(&format!("m{jobs}.json"))), "--features", s(&feats), "--out", s(&p(&format!("p{jobs}.csv")))])?;
        for what in ["gdd", "wlbp"] {
            lfqa(&["--jobs", jobs, "histdump", "--input", s(&p("bench").join("scene00_nn_3")), "--what", what, "--out", s(&p(&format!("{what}{jobs}.csv")))])?;
        }
    }
    for stem in ["r{}.json", "m{}.json", "p{}.csv", "gdd{}.csv", "wlbp{}.csv"] {
        same_file(&p(&stem.replace("{}", "1")), &p(&stem.replace("{}", "4")))?;
    }
    Ok(Verdict::Pass(format!(
        "synth ({files} files), extract, eval, train, predict and histdump byte-identical across runs with --jobs 1/3/4"
    )))
}

// ---------------------------------------------------------------- 13

fn c13_dataset(pipe: &Pipeline) -> Result<Verdict, String> {
    let Ok(manifest) = std::env::var("LFQA_DATASET_MANIFEST") else {
        return Ok(Verdict::Skip("set LFQA_DATASET_MANIFEST to a dataset manifest to run".into()));
    };
    let layout = std::env::var("LFQA_DATASET_LAYOUT").unwrap_or_else(|_| "r{v}_c{u}.png".into());
    let polarity = std::env::var("LFQA_DATASET_POLARITY").unwrap_or_else(|_| "higher-better".into());
    let feats = pipe.path("dataset_features.csv");
    let report = pipe.path("dataset_report.json");
    lfqa(&["extract", "--input", &manifest, "--layout", &layout, "--out", s(&feats)])?;
    lfqa(&["eval", "--features", s(&feats), "--polarity", &polarity, "--trials", "1000", "--out", s(&report)])?;
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let m = v["median"]["srcc"].as_f64().unwrap();
    Ok(verdict(
        (m - 0.90).abs() <= 0.05,
        format!("median SRCC {m:.4} (target band 0.90 +- 0.05)"),
    ))
}

fn main() {
    let tmp = tempfile::TempDir::new().expect("temp dir");
    let pipe = Pipeline {
        root: tmp.path().to_path_buf(),
    };
    let bench = build_benchmark(&BenchmarkConfig::default()).unwrap();

    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let wrap = |r: Result<Verdict, String>| r.unwrap_or_else(Verdict::Fail);
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "LBP riu2 oracle equivalence", Box::new(c1_lbp_oracle)),
        (2, "Sobel kernels on ramp EPIs", Box::new(c2_gradient_kernels)),
        (3, "MSCN constant image and window", Box::new(c3_mscn)),
        (4, "AGGD parameter recovery", Box::new(c4_aggd_recovery)),
        (5, "SSIM disparity on a 3 px shift", Box::new(c5_disparity)),
        (6, "cyclopean identity and weight bound", Box::new(c6_cyclopean)),
        (7, "GDD signature of NN interpolation", Box::new(|| c7_gdd_signature(&bench))),
        (8, "WLBP type separation and drift", Box::new(|| c8_wlbp_separation(&bench))),
        (9, "SVR KKT, oracle objective, trivial cases", Box::new(c9_svr)),
        (10, "metrics and logistic nesting", Box::new(c10_metrics)),
        (11, "end-to-end synthetic benchmark", Box::new(|| wrap(c11_end_to_end(&pipe)))),
        (12, "determinism of CLI outputs", Box::new(|| wrap(c12_determinism(&pipe)))),
        (13, "dataset reproduction (optional)", Box::new(|| wrap(c13_dataset(&pipe)))),
    ];

    let only: Option<Vec<u32>> = std::env::var("LFQA_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, check) in &criteria {
        if only.as_ref().is_some_and(|o| !o.contains(id)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Verdict::Fail("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                // The optional criterion never fails the suite.
                if *id != 13 {
                    failed += 1;
                }
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {id:>2}. {name}: {detail} ({secs:.1} s)");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
