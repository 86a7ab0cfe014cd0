//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any criterion fails. Criterion 5 (full 50 x 60 power
//! study, roughly an hour or more) runs only with `SPGAMMA_ACCEPTANCE_FULL=1`.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;
use spgamma::permutation::stream_rng;
use spgamma::pvalue::balanced_log_constant;
use spgamma::pvalue::balanced_tail_bound;
use spgamma::{
    bh_adjust, exact_local_pvalues, global_pvalue, lisa, local_pvalues, mc_global_pvalue, mc_local_pvalues,
    power_curve, reg_inc_beta, spatial_bh_adjust, upper_reg_gamma, GridSpec, PanelMatrix, PowerCurve, PowerMode,
    SimConfig, Statistic, WeightGraph,
};
use spgamma_oracle as oracle;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Instance {
    n: usize,
    rows: Vec<Vec<f64>>,
    adj: oracle::Dense,
    graph: WeightGraph,
    data: PanelMatrix,
}

fn instance(r: &mut impl Rng, n_lo: usize, n_hi: usize, t_max: usize) -> Instance {
    let n = r.random_range(n_lo..=n_hi);
    let t = r.random_range(1..=t_max);
    let density = r.random_range(0.02..0.7);
    let edges = oracle::random_edges(n, density, r);
    let rows = oracle::random_rows(t, n, r);
    Instance {
        n,
        adj: oracle::dense_from_edges(n, &edges),
        graph: WeightGraph::from_edge_list(n, &edges).unwrap(),
        data: PanelMatrix::from_rows(&rows).unwrap(),
        rows,
    }
}

fn reference(s: Statistic) -> oracle::Kernel {
    oracle::Kernel::by_name(s.name())
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = stream_rng(2024, 1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let inst = instance(&mut r, 2, 40, 6);
        for s in Statistic::ALL {
            let got = lisa(&s.kernel(), &inst.data, &inst.graph).unwrap();
            let want = oracle::lisa(&reference(s), &inst.rows, &inst.adj);
            let lam = oracle::similarity_matrix(&reference(s), &inst.rows);
            for i in 0..inst.n {
                let scale: f64 = (0..inst.n)
                    .filter(|&j| inst.adj[i][j])
                    .map(|j| lam[i][j].abs())
                    .sum::<f64>()
                    .max(want.gamma[i].abs())
                    .max(f64::MIN_POSITIVE);
                worst = worst.max((got.gamma[i] - want.gamma[i]).abs() / scale);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && within(Duration::from_secs(10), elapsed),
        format!("200 instances x 4 kernels, worst relative error {worst:.2e}, {elapsed:.1?} (limit 10 s)"),
    )
}

fn criterion_2() -> Outcome {
    const B_LOCAL: usize = 20_000;
    const B_GLOBAL: usize = 50_000;
    let start = Instant::now();
    let mut r = stream_rng(2024, 2);
    let mut checked = 0usize;
    let mut violations = [0usize; 4];
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let inst = instance(&mut r, 2, 40, 6);
        for (si, s) in Statistic::ALL.into_iter().enumerate() {
            let lv = lisa(&s.kernel(), &inst.data, &inst.graph).unwrap();
            let analytic = local_pvalues(&lv, &inst.graph).unwrap().p_raw;
            let mc = mc_local_pvalues(&s.kernel(), &inst.data, &inst.graph, B_LOCAL, k).unwrap();
            for (a, m) in analytic.iter().zip(&mc) {
                let se = (m * (1.0 - m) / B_LOCAL as f64).sqrt();
                checked += 1;
                if *a < m - 3.0 * se {
                    violations[si] += 1;
                    worst = worst.max(m - 3.0 * se - a);
                }
            }
        }
    }
    let mut g_checked = 0usize;
    let mut g_violations = 0usize;
    let mut g_worst = 0.0f64;
    for k in 0..100u64 {
        let inst = instance(&mut r, 2, 30, 6);
        for s in Statistic::ALL {
            let lv = lisa(&s.kernel(), &inst.data, &inst.graph).unwrap();
            let a = global_pvalue(&lv, &inst.graph).unwrap().p;
            let m = mc_global_pvalue(&s.kernel(), &inst.data, &inst.graph, B_GLOBAL, k).unwrap();
            let se = (m * (1.0 - m) / B_GLOBAL as f64).sqrt();
            g_checked += 1;
            if a < m - 3.0 * se {
                g_violations += 1;
                g_worst = g_worst.max(m - 3.0 * se - a);
            }
        }
    }
    let elapsed = start.elapsed();
    let local_total: usize = violations.iter().sum();
    outcome(
        local_total == 0 && g_violations == 0 && within(Duration::from_secs(300), elapsed),
        format!(
            "local: {local_total}/{checked} vertex-kernel pairs below MC - 3 SE \
             (moran {}, geary-l2 {}, geary-l1 {}, binary {}; worst gap {worst:.3}); \
             global: {g_violations}/{g_checked} (worst gap {g_worst:.3}); {elapsed:.1?} (limit 300 s)",
            violations[0], violations[1], violations[2], violations[3]
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut r = stream_rng(2024, 3);
    let mut erfc_err = 0.0f64;
    let mut beta_err = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = r.random_range(0.0..30.0);
        let want = libm::erfc(x.sqrt());
        let got = upper_reg_gamma(0.5, x).unwrap();
        erfc_err = erfc_err.max((got - want).abs() / want.max(f64::MIN_POSITIVE));
        let x: f64 = r.random_range(0.0..=1.0);
        beta_err = beta_err.max((reg_inc_beta(x, 1.0, 1.0).unwrap() - x).abs());
    }
    let mut balanced_ok = true;
    for n in [3usize, 10, 100, 1000, 5000, 10_000] {
        for m in [1, n / 4, n / 3, n / 2, n - 2] {
            if m == 0 || m >= n - 1 {
                continue;
            }
            balanced_ok &= balanced_log_constant(m, n).is_finite();
            for t in [0.0, 0.1, 1.0, 10.0, 1e3] {
                let p = balanced_tail_bound(t, m, n, 1.0).unwrap();
                balanced_ok &= (0.0..=1.0).contains(&p);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        erfc_err <= 1e-10 && beta_err <= 1e-10 && balanced_ok && within(Duration::from_secs(5), elapsed),
        format!(
            "Q(1/2,x) vs erfc rel err {erfc_err:.2e}, I_x(1,1) abs err {beta_err:.2e}, \
             balanced branch finite and in [0,1]: {balanced_ok}, {elapsed:.1?} (limit 5 s)"
        ),
    )
}

fn desk_config(statistics: Vec<Statistic>) -> SimConfig {
    SimConfig {
        grid: GridSpec::new(20, 25).unwrap(),
        times: 5,
        c_values: vec![-0.2, -0.1, 0.0, 0.1, 0.2],
        replicates: 50,
        alpha: 0.05,
        seed: 2024,
        statistics,
    }
}

fn at(curve: &PowerCurve, s: Statistic, c: f64) -> (f64, f64) {
    let p = curve.get(s, c).unwrap();
    (p.power, p.se)
}

fn beats(curve: &PowerCurve, a: Statistic, b: Statistic, c: f64) -> (bool, String) {
    let (pa, sa) = at(curve, a, c);
    let (pb, sb) = at(curve, b, c);
    let need = 2.0 * (sa * sa + sb * sb).sqrt();
    (pa - pb >= need, format!("{a} {pa:.4} - {b} {pb:.4} = {:.4} (need {need:.4})", pa - pb))
}

fn criterion_4() -> Outcome {
    use Statistic::*;
    let start = Instant::now();
    let local = power_curve(&desk_config(Statistic::ALL.to_vec()), PowerMode::Lisa).unwrap();
    let global = power_curve(&desk_config(Statistic::ALL.to_vec()), PowerMode::Gisa).unwrap();
    let elapsed = start.elapsed();

    let null: Vec<(Statistic, f64)> = Statistic::ALL.iter().map(|&s| (s, at(&local, s, 0.0).0)).collect();
    let a = null.iter().all(|&(_, p)| p <= 0.05);
    let (b1, d1) = beats(&local, Moran, GearyL1, 0.2);
    let (b2, d2) = beats(&local, GearyL1, GearyL2, 0.2);
    let (b3, d3) = beats(&local, GearyL1, Binary, 0.2);
    let b = b1 && b2 && b3;
    let rates: Vec<(Statistic, f64)> = Statistic::ALL.iter().map(|&s| (s, at(&global, s, 0.2).0)).collect();
    let moran_rate = rates[0].1;
    let c = rates.iter().all(|&(_, p)| p > 0.5) && rates.iter().all(|&(_, p)| moran_rate >= p);
    let fmt = |v: &[(Statistic, f64)]| {
        v.iter().map(|(s, p)| format!("{s} {p:.4}")).collect::<Vec<_>>().join(", ")
    };
    outcome(
        a && b && c && within(Duration::from_secs(600), elapsed),
        format!(
            "(a) {} LISA size at c=0: {}; (b) {} {d1}; {d2}; {d3}; (c) {} GISA rate at c=0.2: {}; \
             {elapsed:.1?} (limit 600 s)",
            if a { "ok" } else { "FAILED" },
            fmt(&null),
            if b { "ok" } else { "FAILED" },
            if c { "ok" } else { "FAILED" },
            fmt(&rates)
        ),
    )
}

fn criterion_5() -> Option<Outcome> {
    std::env::var_os("SPGAMMA_ACCEPTANCE_FULL")?;
    use Statistic::*;
    let cfg = SimConfig {
        grid: GridSpec::new(50, 60).unwrap(),
        times: 5,
        c_values: vec![-0.25, -0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2, 0.25],
        replicates: 200,
        alpha: 0.05,
        seed: 2024,
        statistics: Statistic::ALL.to_vec(),
    };
    let start = Instant::now();
    let local = power_curve(&cfg, PowerMode::Lisa).unwrap();
    power_curve(&cfg, PowerMode::Gisa).unwrap();
    let elapsed = start.elapsed();
    let positive = [0.1, 0.15, 0.2, 0.25].iter().all(|&c| at(&local, Moran, c).0 > at(&local, GearyL1, c).0);
    let gap = [-0.25, -0.2, -0.15, -0.1, -0.05]
        .iter()
        .map(|&c| (at(&local, Moran, c).0 - at(&local, GearyL2, c).0).abs())
        .fold(0.0f64, f64::max);
    Some(outcome(
        positive && gap <= 0.05 && within(Duration::from_secs(2 * 3600), elapsed),
        format!(
            "Moran > Geary l1 for c >= 0.1: {positive}; max |Moran - Geary l2| for c < 0: {gap:.4} \
             (limit 0.05); {elapsed:.1?} (limit 2 h)"
        ),
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut r = stream_rng(2024, 6);
    let mut mismatches = 0usize;
    let mut overlaps = 0usize;
    for _ in 0..100 {
        let n = r.random_range(1..=50);
        let density = r.random_range(0.02..0.3);
        let edges = oracle::random_edges(n, density, &mut r);
        let g = WeightGraph::from_edge_list(n, &edges).unwrap();
        let dist = oracle::distances(&oracle::dense_from_edges(n, &edges));
        let mut seen = vec![vec![false; n]; n];
        for k in 1..n.max(2) {
            let lag = g.lag(k);
            for i in 0..n {
                for j in 0..n {
                    let want = i != j && dist[i][j] == Some(k);
                    if lag.contains(i, j) != want {
                        mismatches += 1;
                    }
                    if lag.contains(i, j) {
                        if seen[i][j] {
                            overlaps += 1;
                        }
                        seen[i][j] = true;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && overlaps == 0 && within(Duration::from_secs(5), elapsed),
        format!("100 graphs: {mismatches} mismatched pairs, {overlaps} overlapping supports, {elapsed:.1?} (limit 5 s)"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut r = stream_rng(2024, 7);
    let mut mismatch = 0.0f64;
    let mut checked = 0usize;
    let mut below = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let inst = instance(&mut r, 5, 5, 6);
        for s in Statistic::ALL {
            let exhaustive = exact_local_pvalues(&s.kernel(), &inst.data, &inst.graph).unwrap();
            let exact = oracle::exact_pvalues(&reference(s), &inst.rows, &inst.adj);
            let lv = lisa(&s.kernel(), &inst.data, &inst.graph).unwrap();
            let analytic = local_pvalues(&lv, &inst.graph).unwrap().p_raw;
            for i in 0..inst.n {
                mismatch = mismatch.max((exhaustive[i] - exact[i]).abs());
                checked += 1;
                if analytic[i] < exact[i] - 1e-12 {
                    below += 1;
                    worst = worst.max(exact[i] - analytic[i]);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatch < 1e-12 && below == 0 && within(Duration::from_secs(5), elapsed),
        format!(
            "exhaustive vs exact max diff {mismatch:.1e}; analytic < exact at {below}/{checked} vertices \
             (worst gap {worst:.3}); {elapsed:.1?} (limit 5 s)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let fixtures: [(&[f64], &[f64]); 4] = [
        (&[0.01, 0.04, 0.03, 0.005], &[0.02, 0.04, 0.04, 0.02]),
        (&[0.5, 0.2, 0.9], &[0.75, 0.6, 0.9]),
        (&[0.01, 0.02, 0.03, 0.04, 0.05], &[0.05, 0.05, 0.05, 0.05, 0.05]),
        (&[0.001, 0.3, 0.3, 0.8], &[0.004, 0.4, 0.4, 0.8]),
    ];
    let mut worst = 0.0f64;
    for (p, want) in fixtures {
        for (a, b) in bh_adjust(p).unwrap().iter().zip(want) {
            worst = worst.max((a - b).abs());
        }
    }
    let mut r = stream_rng(2024, 8);
    let mut equal = true;
    for _ in 0..200 {
        let n = r.random_range(0..60);
        let p: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        equal &= spatial_bh_adjust(&p, &WeightGraph::complete(n)).unwrap() == bh_adjust(&p).unwrap();
    }
    outcome(
        worst <= 1e-15 && equal,
        format!("hand fixtures max error {worst:.1e}; spatial on complete graph equals BH on 200 vectors: {equal}"),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_spgamma"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn criterion_9() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let d = dir.path();
    let grid = WeightGraph::grid(GridSpec::new(12, 15).unwrap());
    let data = spgamma::sample_grid_gaussian(GridSpec::new(12, 15).unwrap(), 5, 0.15, 9).unwrap();
    let mut g = fs::File::create(d.join("g.csv")).unwrap();
    spgamma::io::write_edge_list(&grid, &mut g).unwrap();
    let mut y = fs::File::create(d.join("y.csv")).unwrap();
    spgamma::io::write_panel(&data, &mut y).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in ["1", "2", "8"] {
        let sig = d.join(format!("sig{threads}.csv"));
        let pow = d.join(format!("pow{threads}.csv"));
        let lisa_args = [
            "--threads", threads, "lisa", "--graph", &s(&d.join("g.csv")), "--panel", &s(&d.join("y.csv")),
            "--stat", "geary-l1", "--mc", "999", "--seed", "5", "--fdr", "spatial", "--out", &s(&sig),
        ];
        let sim_args = [
            "--threads", threads, "simulate", "--rows", "8", "--cols", "9", "--c-list", "-0.2,0,0.2",
            "--replicates", "6", "--seed", "5", "--out", &s(&pow),
        ];
        if let Err(e) = run_cli(&lisa_args).and_then(|_| run_cli(&sim_args)) {
            return outcome(false, format!("CLI failed under {threads} threads: {e}"));
        }
        let read = |p: &Path| fs::read(p).unwrap();
        let manifest = |p: &Path| {
            let text = fs::read_to_string(p).unwrap();
            text.replace(&format!("sig{threads}"), "sig").replace(&format!("pow{threads}"), "pow").into_bytes()
        };
        outputs.push(vec![
            read(&sig),
            read(&pow),
            manifest(&d.join(format!("sig{threads}.csv.manifest.json"))),
            manifest(&d.join(format!("pow{threads}.csv.manifest.json"))),
        ]);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!("lisa (MC, spatial FDR) and simulate outputs and manifests byte-identical under 1, 2, 8 threads: {same}"),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn criterion_5_guarded() -> Option<Outcome> {
    std::env::var_os("SPGAMMA_ACCEPTANCE_FULL")?;
    Some(guarded(|| criterion_5().expect("enabled")))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome); 8] = [
        (1, "vectorized vs double-sum LISA", criterion_1),
        (2, "analytic p-values conservative vs Monte Carlo", criterion_2),
        (3, "special functions", criterion_3),
        (4, "desk-scale power curves", criterion_4),
        (6, "lag graph vs BFS distance", criterion_6),
        (7, "exhaustive permutation agreement", criterion_7),
        (8, "Benjamini-Hochberg", criterion_8),
        (9, "CLI determinism across thread counts", criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        let o = guarded(f);
        println!("{} criterion {id} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(id);
        }
        if id == 4 {
            match criterion_5_guarded() {
                None => println!("SKIP criterion 5 (full-scale power study): set SPGAMMA_ACCEPTANCE_FULL=1 to run"),
                Some(o) => {
                    println!(
                        "{} criterion 5 (full-scale power study): {}",
                        if o.pass { "PASS" } else { "FAIL" },
                        o.detail
                    );
                    if !o.pass {
                        failed.push(5);
                    }
                }
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
