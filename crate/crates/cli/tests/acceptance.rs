//! Acceptance suite. Prints one `[PASS]` / `[FAIL]` line per criterion and
//! exits non-zero if any fails.
//!
//! cargo test --release -p greenfront-cli --test acceptance

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use greenfront::archive::{dominates, EpsArchive, Grid, MinimizedObjectives};
use greenfront::engine::{run, run_with_progress, EvMogaConfig};
use greenfront::export::{FrontEntry, FrontExport};
use greenfront::hypervolume::hypervolume;
use greenfront::market_data::AssetUniverse;
use greenfront::portfolio::{Bounds, ObjectiveVector, Portfolio};
use greenfront::preferences::{
    chebyshev_distances, filter_region, reference_vectors, representatives, GreenLabel, PreferenceFilter,
    ProfileConfig, RiskLabel,
};
use greenfront::synthetic;
use greenfront_cli::commands::{all_profiles, cmd_report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("C1 exhaustive epsilon-front coverage", c1_oracle_coverage),
        ("C2 two-asset analytic frontier", c2_analytic_frontier),
        ("C3 archive invariants under 10^4 operations", c3_archive_invariants),
        ("C4 deterministic replay", c4_determinism),
        ("C5 region nesting in risk percentile", c5_nesting),
        ("C6 published-scale run", c6_published_scale),
        ("C7 percentile and representative oracles", c7_preference_oracles),
        ("C8 report golden file", c8_report_golden),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<f64, String> {
    let t = start.elapsed();
    ensure!(t <= budget, "{what} took {:.1}s, budget {:.0}s", t.as_secs_f64(), budget.as_secs_f64());
    Ok(t.as_secs_f64())
}

// ---------------------------------------------------------------- C1

/// All weight vectors on the simplex with entries in multiples of 1/steps.
fn simplex_lattice(n: usize, steps: u32) -> Vec<Vec<f64>> {
    fn rec(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut ints = Vec::new();
    rec(steps, n, &mut Vec::new(), &mut ints);
    ints.into_iter()
        .map(|v| v.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect()
}

/// Direct evaluation, independent of the library's evaluation code.
fn direct_objectives(w: &[f64], u: &AssetUniverse) -> [f64; 3] {
    let n = w.len();
    let mut var = 0.0;
    for i in 0..n {
        for j in 0..n {
            var += w[i] * u.sigma(i, j) * w[j];
        }
    }
    let ret: f64 = w.iter().zip(u.mu()).map(|(a, b)| a * b).sum();
    let carbon: f64 = w.iter().zip(u.carbon()).map(|(a, b)| a * b).sum();
    [var, -ret, carbon]
}

fn pareto_filter(points: &[[f64; 3]]) -> Vec<usize> {
    let dom = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).all(|(x, y)| x <= y) && a != b;
    (0..points.len())
        .filter(|&i| !points.iter().any(|p| dom(p, &points[i])))
        .collect()
}

fn box_of(g: &[f64; 3], grid: &Grid) -> Option<[u32; 3]> {
    let (lo, hi, eps) = (grid.f_min(), grid.f_max(), grid.eps());
    let mut b = [0u32; 3];
    for i in 0..3 {
        if g[i] < lo[i] || g[i] > hi[i] {
            return None;
        }
        b[i] = (((g[i] - lo[i]) / eps[i]).floor() as u32).min(grid.n_box() - 1);
    }
    Some(b)
}

fn center_dist(g: &[f64; 3], b: &[u32; 3], grid: &Grid) -> f64 {
    (0..3)
        .map(|i| {
            let c = grid.f_min()[i] + (b[i] as f64 + 0.5) * grid.eps()[i];
            ((g[i] - c) / grid.eps()[i]).powi(2)
        })
        .sum()
}

/// Epsilon-front of the exhaustive lattice under `grid`: Pareto points
/// bucketed by box, boxes dominated by another occupied box dropped, the
/// point nearest the centre kept per box. Returns (box, point) plus the
/// count of Pareto points falling outside the grid.
fn oracle_front(points: &[[f64; 3]], grid: &Grid) -> (BTreeMap<[u32; 3], [f64; 3]>, usize) {
    let mut outside = 0;
    let mut boxes: BTreeMap<[u32; 3], [f64; 3]> = BTreeMap::new();
    for &i in &pareto_filter(points) {
        let g = points[i];
        let Some(b) = box_of(&g, grid) else {
            outside += 1;
            continue;
        };
        match boxes.get(&b) {
            Some(cur) if center_dist(cur, &b, grid) <= center_dist(&g, &b, grid) => {}
            _ => {
                boxes.insert(b, g);
            }
        }
    }
    let occupied: Vec<[u32; 3]> = boxes.keys().copied().collect();
    let box_dom = |a: &[u32; 3], b: &[u32; 3]| a != b && a.iter().zip(b).all(|(x, y)| x <= y);
    boxes.retain(|b, _| !occupied.iter().any(|o| box_dom(o, b)));
    (boxes, outside)
}

/// Oracle boxes whose oracle point is matched by a stored point that sits in
/// the same box or in a box weakly dominating it, and is not Pareto-dominated
/// by the oracle point. Also returns the count matched in the same box.
fn coverage(oracle: &BTreeMap<[u32; 3], [f64; 3]>, stored: &[([u32; 3], [f64; 3])]) -> (usize, usize) {
    let mut eps_cov = 0;
    let mut same_box = 0;
    for (b, og) in oracle {
        let og = MinimizedObjectives(*og);
        let ok = |g: &[f64; 3]| !dominates(&og, &MinimizedObjectives(*g));
        if stored.iter().any(|(sb, g)| sb.iter().zip(b).all(|(x, y)| x <= y) && ok(g)) {
            eps_cov += 1;
        }
        if stored.iter().any(|(sb, g)| sb == b && ok(g)) {
            same_box += 1;
        }
    }
    (eps_cov, same_box)
}

fn c1_case(n: usize, seed: u64) -> Result<String, String> {
    let u = synthetic::instance(n, 120, seed).map_err(|e| e.to_string())?;
    let cfg = EvMogaConfig {
        nind_p: 200,
        nind_ga: 100,
        k_max: 2000,
        n_box: 40,
        seed,
        ..EvMogaConfig::default()
    };
    let start = Instant::now();
    let r = run(&u, &Bounds::unit(n), &cfg).map_err(|e| e.to_string())?;
    let ga_secs = within(start, Duration::from_secs(60), "optimizer run")?;
    let grid = r.archive.grid().expect("non-empty archive").clone();

    let lattice = simplex_lattice(n, 20);
    let pts: Vec<[f64; 3]> = lattice.iter().map(|w| direct_objectives(w, &u)).collect();
    let (oracle, outside) = oracle_front(&pts, &grid);
    let stored: Vec<([u32; 3], [f64; 3])> = r.archive.entries().iter().map(|e| (e.box_index(), e.minimized().0)).collect();
    let (eps_cov, same_box) = coverage(&oracle, &stored);

    // The same counts for a finer exhaustive lattice, as a yardstick for
    // what same-box matching can reach at all.
    let fine_steps = if n <= 4 { 50 } else { 30 };
    let fine: Vec<[f64; 3]> = simplex_lattice(n, fine_steps).iter().map(|w| direct_objectives(w, &u)).collect();
    let (fine_front, _) = oracle_front(&fine, &grid);
    let fine_stored: Vec<([u32; 3], [f64; 3])> = fine_front.into_iter().collect();
    let (fine_eps, fine_same) = coverage(&oracle, &fine_stored);

    let total = oracle.len() + outside;
    let ratio = eps_cov as f64 / total as f64;
    let detail = format!(
        "{n} assets, {} lattice portfolios, {total} oracle boxes ({outside} outside grid): covered {eps_cov} ({:.1}%), \
         {same_box} in the identical box (finer lattice: {fine_eps} covered, {fine_same} identical), run {ga_secs:.1}s",
        lattice.len(),
        100.0 * ratio
    );
    ensure!(ratio >= 0.95, "{detail}");
    Ok(detail)
}

fn c1_oracle_coverage() -> Outcome {
    // 4 assets is 1,771 lattice portfolios; 10,626 is the 5-asset lattice.
    let a = c1_case(4, 101)?;
    let b = c1_case(5, 102)?;
    Ok(format!("{a}; {b}"))
}

// ---------------------------------------------------------------- C2

fn c2_analytic_frontier() -> Outcome {
    let start = Instant::now();
    let u = AssetUniverse::new(
        vec!["A".into(), "B".into()],
        vec![0.4, 1.1],
        vec![vec![4.0, 1.2], vec![1.2, 9.0]],
        vec![5.0, 5.0],
        (0.0, 10.0),
    )
    .map_err(|e| e.to_string())?;
    let cfg = EvMogaConfig {
        nind_p: 200,
        nind_ga: 100,
        k_max: 1000,
        n_box: 100,
        seed: 2,
        ..EvMogaConfig::default()
    };
    let r = run(&u, &Bounds::unit(2), &cfg).map_err(|e| e.to_string())?;

    let (m1, m2) = (0.4, 1.1);
    let (s11, s12, s22) = (4.0, 1.2, 9.0);
    // weight on A for a target return, and the variance it implies
    let w_of = |t: f64| (t - m2) / (m1 - m2);
    let var_of = |t: f64| {
        let w = w_of(t);
        w * w * s11 + 2.0 * w * (1.0 - w) * s12 + (1.0 - w) * (1.0 - w) * s22
    };
    let w_gmv = (s22 - s12) / (s11 - 2.0 * s12 + s22);
    let r_gmv = w_gmv * m1 + (1.0 - w_gmv) * m2;

    let mut front: Vec<(f64, f64)> = r.archive.entries().iter().map(|e| (e.objectives().ret, e.objectives().risk)).collect();
    front.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(ret, risk) in &front {
        ensure!(ret >= r_gmv - 1e-3, "entry with return {ret} below the minimum-variance return {r_gmv}");
        ensure!((risk - var_of(ret)).abs() <= 1e-9 * var_of(ret).max(1.0), "entry off the frontier at {ret}");
    }
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let t = r_gmv + (k as f64 + 0.5) / 20.0 * (m2 - r_gmv);
        let j = front.partition_point(|p| p.0 < t);
        ensure!(j > 0 && j < front.len(), "no front entries bracket return {t:.4}");
        let (a, b) = (front[j - 1], front[j]);
        let risk = a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1);
        let rel = (risk - var_of(t)).abs() / var_of(t);
        worst = worst.max(rel);
        ensure!(rel <= 1e-2, "relative error {rel:.2e} at return {t:.4}");
    }
    let secs = within(start, Duration::from_secs(10), "two-asset run")?;
    Ok(format!("{} entries, worst relative error {worst:.1e} over 20 levels, {secs:.1}s", front.len()))
}

// ---------------------------------------------------------------- C3

fn c3_archive_invariants() -> Outcome {
    let mut ops = 0usize;
    let mut max_len = 0usize;
    for (seed, n_box) in [(1u64, 5u32), (2, 20), (3, 60)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = EpsArchive::new(n_box).map_err(|e| e.to_string())?;
        let mut scale = 1.0;
        for step in 0..10_000 {
            if step % 50 == 49 {
                // push the grid outward, sometimes below the current minimum
                scale *= 1.01;
                let g = MinimizedObjectives([
                    rng.random_range(-0.5..2.0) * scale,
                    rng.random_range(-0.5..2.0) * scale,
                    rng.random_range(-0.5..2.0) * scale,
                ]);
                a.extend_grid(&g);
            } else {
                // points near the sphere x^2 + y^2 + z^2 = scale^2 give many
                // mutually non-dominated candidates
                let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0f64..1.0));
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-9);
                let jitter = rng.random_range(0.95..1.3);
                let g = v.map(|x| scale * jitter * x / norm);
                a.try_insert(Portfolio::new(vec![1.0], &Bounds::unit(1)).unwrap(), ObjectiveVector::from(MinimizedObjectives(g)));
            }
            ops += 1;
            a.validate().map_err(|e| format!("n_box {n_box}, operation {step}: {e}"))?;
            max_len = max_len.max(a.len());
        }
    }
    Ok(format!("{ops} operations on three grids, zero violations (largest archive {max_len})"))
}

// ---------------------------------------------------------------- C4

fn c4_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst = dir.path().join("instance.json");
    synthetic::instance(22, 120, 4)
        .and_then(|u| u.save(&inst))
        .map_err(|e| e.to_string())?;
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "nind_p = 2000\nnind_ga = 200\nk_max = 3000\nn_box = 100\nseed = 17\nweight_upper = 0.2\n")
        .map_err(|e| e.to_string())?;
    let mut sections = Vec::new();
    for name in ["a.json", "b.json"] {
        let out: PathBuf = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_greenfront"))
            .args(["optimize", "--instance"])
            .arg(&inst)
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(o.status.success(), "optimize failed: {}", String::from_utf8_lossy(&o.stderr));
        let front = FrontExport::load(&out).map_err(|e| e.to_string())?;
        sections.push((front.entries_json().map_err(|e| e.to_string())?, front.entries.len()));
    }
    ensure!(sections[0].0 == sections[1].0, "entry sections differ");
    Ok(format!("{} entries, {} bytes identical across two CLI runs", sections[0].1, sections[0].0.len()))
}

// ---------------------------------------------------------------- C5

fn random_front(rng: &mut ChaCha8Rng, seed: u64) -> Result<FrontExport, String> {
    let n = rng.random_range(2..9);
    let u = synthetic::instance(n, 60, seed).map_err(|e| e.to_string())?;
    let cfg = EvMogaConfig {
        nind_p: 100,
        nind_ga: 40,
        k_max: rng.random_range(5..80),
        n_box: rng.random_range(5..60),
        seed,
        ..EvMogaConfig::default()
    };
    let b = Bounds::unit(n);
    let r = run(&u, &b, &cfg).map_err(|e| e.to_string())?;
    FrontExport::from_run(&u, &b, &cfg, &r).map_err(|e| e.to_string())
}

fn c5_nesting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut checks = 0;
    for f in 0..50u64 {
        let front = random_front(&mut rng, 1000 + f)?;
        let refs = reference_vectors(&front.entries, [25.0, 55.0, 75.0], [50.0, 75.0, 100.0]).map_err(|e| e.to_string())?;
        for g in GreenLabel::ALL {
            let sets: Vec<Vec<usize>> = RiskLabel::ALL
                .iter()
                .map(|&r| filter_region(&front.entries, refs.filter(g, r)).ids())
                .collect();
            for w in sets.windows(2) {
                ensure!(w[0].iter().all(|id| w[1].contains(id)), "front {f}, green {g}: region not nested");
                checks += 1;
            }
        }
    }
    Ok(format!("50 fronts, {checks} containments, zero violations"))
}

// ---------------------------------------------------------------- C6

struct Profile {
    detail: String,
}

fn c6_run(k_max: u64, budget: Duration) -> Result<Profile, String> {
    let u = synthetic::instance(22, 120, 2024).map_err(|e| e.to_string())?;
    let bounds = Bounds::new(vec![0.0; 22], vec![0.2; 22]).map_err(|e| e.to_string())?;
    let cfg = EvMogaConfig {
        k_max,
        seed: 6,
        ..EvMogaConfig::default()
    };
    let tenth = cfg.checkpoint_period();
    let start = Instant::now();
    let mut violation: Option<String> = None;
    let mut at_tenth: Vec<[f64; 3]> = Vec::new();
    let r = run_with_progress(&u, &bounds, &cfg, &mut |cp, archive| {
        if violation.is_none() {
            if let Err(e) = archive.validate() {
                violation = Some(format!("iteration {}: {e}", cp.iteration));
            }
        }
        if cp.iteration == tenth {
            at_tenth = archive.entries().iter().map(|e| e.minimized().0).collect();
        }
    })
    .map_err(|e| e.to_string())?;
    let secs = within(start, budget, &format!("k_max {k_max}"))?;
    if let Some(v) = violation {
        return Err(format!("archive invariant violated at {v}"));
    }
    let cp10 = r.checkpoints.iter().find(|c| c.iteration == tenth).ok_or("no 10% checkpoint")?;
    let last = r.checkpoints.last().ok_or("no checkpoints")?;

    // Each checkpoint's reading uses the grid of that moment; the common
    // reading puts both archives under the final grid's f_max.
    let reference = r.archive.grid().ok_or("empty archive")?.f_max();
    let final_pts: Vec<[f64; 3]> = r.archive.entries().iter().map(|e| e.minimized().0).collect();
    let hv_final = hypervolume(&final_pts, reference);
    let hv_tenth = hypervolume(&at_tenth, reference);
    ensure!(
        last.hypervolume >= cp10.hypervolume * 0.99,
        "checkpoint hypervolume fell from {} to {}",
        cp10.hypervolume,
        last.hypervolume
    );
    ensure!(hv_final >= hv_tenth * 0.99, "common-reference hypervolume fell from {hv_tenth} to {hv_final}");
    Ok(Profile {
        detail: format!(
            "k_max {k_max}: {} entries, HV {:.4} -> {:.4} (common ref {:.4} -> {:.4}), {secs:.1}s",
            r.archive.len(),
            cp10.hypervolume,
            last.hypervolume,
            hv_tenth,
            hv_final
        ),
    })
}

fn c6_published_scale() -> Outcome {
    let reduced = c6_run(10_000, Duration::from_secs(180))?;
    let full = c6_run(100_000, Duration::from_secs(1800))?;
    Ok(format!("{}; {}", reduced.detail, full.detail))
}

// ---------------------------------------------------------------- C7

fn oracle_percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = q / 100.0 * (v.len() as f64 - 1.0);
    let below = rank.floor();
    let frac = rank - below;
    let i = below as usize;
    if frac == 0.0 {
        v[i]
    } else {
        v[i] + frac * (v[i + 1] - v[i])
    }
}

/// Random mutually non-dominated entries with deliberate value ties.
fn random_entries(rng: &mut ChaCha8Rng) -> Vec<FrontEntry> {
    let n_assets = rng.random_range(1..6);
    let count = rng.random_range(1..60);
    let mut pts: Vec<[f64; 3]> = Vec::new();
    let grid_vals = |rng: &mut ChaCha8Rng| (rng.random_range(0..20) as f64) * 0.25;
    while pts.len() < count * 3 {
        let risk = grid_vals(rng) + 1.0;
        let ret = grid_vals(rng) * 0.1;
        let carbon = grid_vals(rng);
        pts.push([risk, -ret, carbon]);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let keep = pareto_filter(&pts);
    keep.into_iter()
        .take(count)
        .enumerate()
        .map(|(id, i)| {
            let mut w: Vec<f64> = (0..n_assets).map(|_| rng.random_range(0..4) as f64).collect();
            if w.iter().sum::<f64>() == 0.0 {
                w[0] = 1.0;
            }
            let s: f64 = w.iter().sum();
            FrontEntry {
                id,
                weights: w.iter().map(|x| x / s).collect(),
                risk: pts[i][0],
                ret: -pts[i][1],
                carbon: pts[i][2],
                box_index: [0, 0, 0],
            }
        })
        .collect()
}

fn tie_key(e: &FrontEntry) -> (f64, f64, f64, Vec<f64>) {
    (e.risk, e.carbon, -e.ret, e.weights.clone())
}

fn key_less(a: &(f64, f64, f64, Vec<f64>), b: &(f64, f64, f64, Vec<f64>)) -> bool {
    a.partial_cmp(b) == Some(std::cmp::Ordering::Less)
}

fn pick<'a>(region: &[&'a FrontEntry], score: impl Fn(&FrontEntry) -> f64) -> &'a FrontEntry {
    let mut best = region[0];
    for &e in &region[1..] {
        let (se, sb) = (score(e), score(best));
        if se < sb || (se == sb && key_less(&tie_key(e), &tie_key(best))) {
            best = e;
        }
    }
    best
}

fn c7_preference_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut regions = 0;
    let mut max_dev: f64 = 0.0;
    for f in 0..100 {
        let entries = random_entries(&mut rng);
        let greens = [25.0, 55.0, 75.0];
        let risks = [50.0, 75.0, 100.0];
        let refs = reference_vectors(&entries, greens, risks).map_err(|e| e.to_string())?;
        let carbon: Vec<f64> = entries.iter().map(|e| e.carbon).collect();
        let risk: Vec<f64> = entries.iter().map(|e| e.risk).collect();
        for k in 0..3 {
            ensure!(refs.p_g[k] == oracle_percentile(&carbon, greens[k]), "front {f}: p_g[{k}] differs");
            ensure!(refs.p_r[k] == oracle_percentile(&risk, risks[k]), "front {f}: p_r[{k}] differs");
        }
        let mut filters: Vec<PreferenceFilter> = all_profiles().into_iter().map(|(g, r)| refs.filter(g, r)).collect();
        for _ in 0..5 {
            filters.push(PreferenceFilter::new(rng.random_range(0.0..5.0), rng.random_range(1.0..6.0)).unwrap());
        }
        for filter in filters {
            let scan: Vec<&FrontEntry> =
                entries.iter().filter(|e| e.carbon <= filter.p_g && e.risk <= filter.p_r).collect();
            let region = filter_region(&entries, filter);
            ensure!(
                region.ids() == scan.iter().map(|e| e.id).collect::<Vec<_>>(),
                "front {f}: region differs from scan"
            );
            if scan.is_empty() {
                ensure!(representatives(&region).is_err(), "front {f}: empty region gave representatives");
                continue;
            }
            regions += 1;
            // Chebyshev oracle on (risk, -ret, carbon) scaled by ideal..nadir
            let axes: [fn(&FrontEntry) -> f64; 3] = [|e| e.risk, |e| -e.ret, |e| e.carbon];
            let ideal = axes.map(|a| scan.iter().map(|e| a(e)).fold(f64::INFINITY, f64::min));
            let nadir = axes.map(|a| scan.iter().map(|e| a(e)).fold(f64::NEG_INFINITY, f64::max));
            let dist = |e: &FrontEntry| {
                let mut d: f64 = 0.0;
                for i in 0..3 {
                    if nadir[i] > ideal[i] {
                        d = d.max((axes[i](e) - ideal[i]) / (nadir[i] - ideal[i]));
                    }
                }
                d
            };
            let lib = chebyshev_distances(&region.entries);
            for (e, d) in scan.iter().zip(&lib) {
                let dev = (dist(e) - d).abs();
                max_dev = max_dev.max(dev);
                ensure!(dev <= 1e-12, "front {f}: distance of entry {} off by {dev:e}", e.id);
            }
            let best = scan.iter().map(|e| dist(e)).fold(f64::INFINITY, f64::min);
            let tied: Vec<&FrontEntry> = scan.iter().copied().filter(|e| dist(e) - best <= 1e-12).collect();
            let opt = pick(&tied, |_| 0.0);
            let reps = representatives(&region).map_err(|e| e.to_string())?;
            ensure!(reps.opt.id == opt.id, "front {f}: opt {} vs oracle {}", reps.opt.id, opt.id);
            ensure!(reps.min_var.id == pick(&scan, |e| e.risk).id, "front {f}: min var differs");
            ensure!(reps.min_emi.id == pick(&scan, |e| e.carbon).id, "front {f}: min emi differs");
            ensure!(reps.max_ret.id == pick(&scan, |e| -e.ret).id, "front {f}: max ret differs");
        }
    }
    Ok(format!("100 fronts, {regions} non-empty regions, max distance deviation {max_dev:.1e}"))
}

// ---------------------------------------------------------------- C8

fn c8_report_golden() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let front = FrontExport::load(dir.join("front.json")).map_err(|e| e.to_string())?;
    let profiles = ProfileConfig::default();
    let rep = cmd_report(&front, &all_profiles(), &profiles, None, None).map_err(|e| e.to_string())?;
    let golden = fs::read_to_string(dir.join("report_all.txt")).map_err(|e| e.to_string())?;
    if rep.text != golden {
        let mut diff = String::new();
        for (i, (a, b)) in rep.text.lines().zip(golden.lines()).enumerate() {
            if a != b {
                let _ = write!(diff, "line {}: got {a:?}, want {b:?}", i + 1);
                break;
            }
        }
        return Err(format!("report differs from golden file. {diff}"));
    }

    // Row scheme: label column, weights at one decimal, three objectives at
    // three decimals, then the row name.
    let names = ["opt", "min var", "min emi", "max ret"];
    let mut rows = 0;
    for line in rep.text.lines() {
        let Some(name) = names.iter().find(|n| line.ends_with(&format!("  {n}"))) else {
            continue;
        };
        let body = &line[..line.len() - name.len()];
        let nums: Vec<&str> = body
            .split_whitespace()
            .filter(|t| t.parse::<f64>().is_ok())
            .collect();
        ensure!(nums.len() >= 4, "short row {line:?}");
        let (w, o) = nums.split_at(nums.len() - 3);
        ensure!(w.iter().all(|t| t.split('.').nth(1).map(str::len) == Some(1)), "weight precision in {line:?}");
        ensure!(o.iter().all(|t| t.split('.').nth(1).map(str::len) == Some(3)), "objective precision in {line:?}");
        rows += 1;
    }
    ensure!(rows + 4 * rep.empty.len() == 36, "expected 36 rows, found {rows} with {} empty profiles", rep.empty.len());

    // Rows agree with the representatives chosen on the same front.
    let refs = reference_vectors(&front.entries, profiles.green_percentiles(), profiles.risk_percentiles())
        .map_err(|e| e.to_string())?;
    let region = filter_region(&front.entries, refs.filter(GreenLabel::Moderate, RiskLabel::Conservative));
    let reps = representatives(&region).map_err(|e| e.to_string())?;
    let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let tail = squash(&format!("{:.3} {:.3} {:.3} min var", reps.min_var.risk, reps.min_var.ret, reps.min_var.carbon));
    let block = rep.text.split("\n\n").nth(1).ok_or("missing moderate block")?;
    ensure!(
        block.lines().any(|l| squash(l).ends_with(&tail)),
        "moderate/conservative min var row does not match {tail:?}"
    );
    Ok(format!("{rows} rows match golden file"))
}
