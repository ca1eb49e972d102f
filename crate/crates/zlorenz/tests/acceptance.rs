//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zlorenz::{read_csv, to_csv_string};
use zlorenz_core::chaos::{lyapunov_max, LyapunovConfig};
use zlorenz_core::covering::{branch_preimages, cover_point, cover_trajectory, lift_trajectory};
use zlorenz_core::dynamics::{evaluate, fixed_points, l2_field, ln_cartesian_field, SystemSpec};
use zlorenz_core::integrate::{flow, FnField, IntegratorConfig};
use zlorenz_core::params::{NormalizedParams, StandardParams};
use zlorenz_core::state::{CartesianState, PolarState};
use zlorenz_core::trajectory::simulate;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn tight() -> IntegratorConfig {
    IntegratorConfig::adaptive(1e-10, 1e-12)
}

fn random_states(seed: u64, count: usize) -> Vec<CartesianState> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s =
            CartesianState::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..=3.0));
        if (0.05..=3.0).contains(&s.radius()) {
            out.push(s);
        }
    }
    out
}

fn equilibria() -> Verdict {
    let p = NormalizedParams::canonical();
    let specs = [
        SystemSpec::L2 { params: p },
        SystemSpec::Ln { params: p, n: 1 },
        SystemSpec::Ln { params: p, n: 2 },
        SystemSpec::Ln { params: p, n: 3 },
        SystemSpec::Ln { params: p, n: 5 },
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for spec in &specs {
        for e in fixed_points(spec).unwrap().regular {
            count += 1;
            let v = evaluate(spec, e.to_array()).unwrap();
            worst = worst.max(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
    }
    verdict(
        worst < 1e-12,
        format!("max residual {worst:.2e} at {count} equilibria of l2 and ln, n in {{1,2,3,5}} (< 1e-12)"),
    )
}

fn identity_n2() -> Verdict {
    let p = NormalizedParams::canonical();
    let worst = random_states(1, 10_000).into_iter().fold(0.0f64, |m, s| {
        let a = ln_cartesian_field(s, &p, 2).unwrap();
        m.max(a.max_abs_diff(&l2_field(s, &p)))
    });
    verdict(worst < 1e-10, format!("max |ln(n=2) - l2| {worst:.2e} over 1e4 states (< 1e-10)"))
}

fn semi_conjugacy() -> Verdict {
    let l2 = SystemSpec::l2();
    let l1 = SystemSpec::l1();
    let (f2, f1) = (l2.field().unwrap(), l1.field().unwrap());
    let cfg = tight();
    let on =
        simulate(&l2, l2.default_initial_state(), 0.0, 150.0, &IntegratorConfig::default().with_sample_interval(0.5))
            .unwrap()
            .since(50.0);
    let dt = 0.05;
    let mut worst: f64 = 0.0;
    for s in on.cartesian_points().take(200) {
        let up = CartesianState::from_array(flow(&f2, s.to_array(), dt, &cfg).unwrap());
        let down0 = l1.to_native(cover_point(s, 2).unwrap()).unwrap();
        let down = PolarState::from_array(flow(&f1, down0, dt, &cfg).unwrap()).to_cartesian();
        worst = worst.max(cover_point(up, 2).unwrap().max_abs_diff(&down));
    }
    verdict(worst < 1e-6, format!("max segment discrepancy {worst:.2e} over 200 segments of dt=0.05 (< 1e-6)"))
}

fn normalization_conjugacy() -> Verdict {
    let p = StandardParams::CANONICAL;
    let std_spec = SystemSpec::standard();
    let l2 = SystemSpec::L2 { params: p.normalize().unwrap() };
    let f2 = l2.field().unwrap();
    let cfg = tight();
    let traj =
        simulate(&std_spec, CartesianState::new(1.0, 1.0, 1.0), 0.0, 1.0, &cfg.with_sample_interval(0.05)).unwrap();
    let scale = p.time_scale().unwrap();
    let mut worst: f64 = 0.0;
    let pts: Vec<_> = traj.cartesian_points().collect();
    for (k, w) in pts.windows(2).enumerate() {
        let dt = traj.times()[k + 1] - traj.times()[k];
        let (x0, _) = p.state_normalize(w[0], 0.0).unwrap();
        let (x1, _) = p.state_normalize(w[1], 0.0).unwrap();
        let moved = CartesianState::from_array(flow(&f2, x0.to_array(), dt * scale, &cfg).unwrap());
        worst = worst.max(moved.max_abs_diff(&x1));
    }
    verdict(
        worst < 1e-6,
        format!("max segment discrepancy {worst:.2e} over {} segments on [0, 1] (< 1e-6)", pts.len() - 1),
    )
}

fn equivariance() -> Verdict {
    let p = NormalizedParams::canonical();
    let states = random_states(2, 10_000);
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 5] {
        let turn = std::f64::consts::TAU / f64::from(n);
        for s in &states {
            let lhs = ln_cartesian_field(s.rotate(turn), &p, n).unwrap();
            let rhs = ln_cartesian_field(*s, &p, n).unwrap().rotate(turn);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    verdict(worst < 1e-12, format!("max |f(Rs) - Rf(s)| {worst:.2e} for n in {{2,3,5}} over 1e4 states (< 1e-12)"))
}

fn standard_exponent() -> Verdict {
    let spec = SystemSpec::standard();
    let est = lyapunov_max(&spec, CartesianState::new(1.0, 1.0, 1.0), &LyapunovConfig::default()).unwrap();
    let ok = (est.lambda1 - 0.906).abs() <= 0.04;
    verdict(ok, format!("lambda1 = {:.4} ± {:.4} with T=2000 (target 0.906 ± 0.04)", est.lambda1, est.stderr))
}

fn normalized_exponents() -> Verdict {
    let cfg = LyapunovConfig { total_time: 20_000.0, tau: 5.0, transient: 500.0, ..LyapunovConfig::default() };
    let lam = |spec: SystemSpec, s0| lyapunov_max(&spec, s0, &cfg).unwrap().lambda1;
    let up = SystemSpec::l2().default_initial_state();
    let down = cover_point(up, 2).unwrap();
    let three = branch_preimages(down, 3).unwrap()[0].base;
    let (l2, l1, l3) = (lam(SystemSpec::l2(), up), lam(SystemSpec::l1(), down), lam(SystemSpec::ln(3), three));
    let ok = (l2 - l1).abs() < 0.05 && (l3 - l1).abs() < 0.05;
    verdict(
        ok,
        format!(
            "l2 {l2:.4}, l1 {l1:.4}, l3 {l3:.4}; gaps {:.1e} and {:.1e} (< 0.05)",
            (l2 - l1).abs(),
            (l3 - l1).abs()
        ),
    )
}

fn rotated_cloud() -> Verdict {
    let spec = SystemSpec::ln(3);
    let traj =
        simulate(&spec, spec.default_initial_state(), 0.0, 550.0, &IntegratorConfig::default()).unwrap().since(50.0);
    let stride = (traj.len() / 5000).max(1);
    let cloud: Vec<(f64, f64)> = traj.cartesian_points().step_by(stride).map(|c| (c.x, c.y)).collect();
    let (s, c) = (std::f64::consts::TAU / 3.0).sin_cos();
    let mut diameter: f64 = 0.0;
    let mut total = 0.0;
    for &(x, y) in &cloud {
        let (rx, ry) = (c * x - s * y, s * x + c * y);
        let mut nearest = f64::INFINITY;
        for &(u, v) in &cloud {
            nearest = nearest.min((rx - u).hypot(ry - v));
            diameter = diameter.max((x - u).hypot(y - v));
        }
        total += nearest;
    }
    let mean = total / cloud.len() as f64;
    let ratio = mean / diameter;
    verdict(
        ratio < 0.05,
        format!(
            "mean nearest distance {mean:.4} = {:.2}% of diameter {diameter:.3} ({} points, < 5%)",
            100.0 * ratio,
            cloud.len()
        ),
    )
}

fn covered_run() -> Verdict {
    let spec = SystemSpec::l2();
    let traj = simulate(&spec, spec.default_initial_state(), 0.0, 200.0, &IntegratorConfig::default()).unwrap();
    let covered = cover_trajectory(&traj, 2).unwrap();
    let colors = covered.colors().unwrap();
    let both = colors.contains(&0) && colors.contains(&1);
    let lifted = lift_trajectory(&covered, 2, colors[0]).unwrap();
    let worst =
        traj.cartesian_points().zip(lifted.cartesian_points()).fold(0.0f64, |m, (a, b)| m.max(a.max_abs_diff(&b)));
    verdict(
        both && worst < 1e-12,
        format!("both colors present: {both}; lift of cover differs by {worst:.2e} (< 1e-12)"),
    )
}

fn tooling() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let decay = FnField(|y: &[f64; 1]| [-y[0]]);
    let err = |h: f64| {
        let y = flow(&decay, [1.0], 1.0, &IntegratorConfig::fixed(h).with_sample_interval(1.0)).unwrap();
        (y[0] - (-1.0f64).exp()).abs()
    };
    let order = (err(0.1) / err(0.05)).log2();
    ok &= (order - 4.0).abs() < 0.2;
    notes.push(format!("rk4 order {order:.2}"));

    let spec = SystemSpec::l2();
    let traj = simulate(&spec, spec.default_initial_state(), 0.0, 50.0, &IntegratorConfig::default()).unwrap();
    let traj = cover_trajectory(&traj, 2).unwrap();
    let back = read_csv(to_csv_string(&traj).as_bytes()).unwrap();
    let bits = |t: &zlorenz_core::trajectory::Trajectory| {
        t.times().iter().chain(t.states().iter().flatten()).map(|v| v.to_bits()).collect::<Vec<_>>()
    };
    let exact_csv = bits(&traj) == bits(&back) && traj.colors() == back.colors() && traj.meta == back.meta;
    ok &= exact_csv;
    notes.push(format!("csv bit-exact {exact_csv}"));

    let exe = env!("CARGO_BIN_EXE_zlorenz");
    let dir = std::env::temp_dir().join(format!("zlorenz-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.csv");
    std::fs::write(dir.join("bad.json"), "{\"schema_version\": 1,").unwrap();
    let g = good.to_str().unwrap().to_string();
    let bad_json = dir.join("bad.json").to_str().unwrap().to_string();
    let matrix: Vec<(Vec<&str>, i32)> = vec![
        (vec!["simulate", "--system", "l2", "--t1", "1", "--out", &g], 0),
        (vec!["simulate", "--system", "l2", "--t1", "nan-ish", "--out", &g], 2),
        (vec!["simulate", "--scenario", &bad_json], 2),
        (vec!["simulate", "--system", "l2", "--rayleigh", "0.5", "--t1", "1", "--out", &g], 2),
        (
            vec![
                "simulate",
                "--system",
                "standard",
                "--t1",
                "10",
                "--step",
                "1",
                "--min-step",
                "0.5",
                "--max-step",
                "10",
                "--sample-interval",
                "1",
                "--out",
                &g,
            ],
            3,
        ),
        (vec!["fixed-points", "--system", "l1"], 0),
    ];
    let mut codes_ok = true;
    for (args, want) in &matrix {
        let got = Command::new(exe).args(args).env_remove("ZLORENZ_SCENARIO_DIR").output().unwrap().status.code();
        codes_ok &= got == Some(*want);
    }
    ok &= codes_ok;
    notes.push(format!("exit codes {codes_ok}"));

    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/figures.sh");
    let figs = dir.join("figures");
    let status = Command::new("bash").arg(&script).arg(&figs).env("ZLORENZ", exe).output().unwrap().status;
    let wanted = ["fig1_standard.svg", "fig2_l2.svg", "fig3_covered.svg", "fig5_l1.svg", "fig6_l3.svg"];
    let svgs_ok = status.success()
        && wanted.iter().all(|f| {
            std::fs::read_to_string(figs.join(f)).map(|s| s.starts_with("<?xml") && s.contains("<svg")).unwrap_or(false)
        });
    ok &= svgs_ok;
    notes.push(format!("figure script {svgs_ok}"));
    let _ = std::fs::remove_dir_all(&dir);

    verdict(ok, notes.join(", "))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("equilibria are exact zeros of their fields", equilibria),
        ("n=2 extension coincides with the normalized form", identity_n2),
        ("covering map intertwines the flows", semi_conjugacy),
        ("normalizing transform conjugates the flows", normalization_conjugacy),
        ("extension fields are rotation equivariant", equivariance),
        ("largest exponent of the standard form", standard_exponent),
        ("normalized, quotient and 3-fold exponents agree", normalized_exponents),
        ("3-fold attractor is rotation invariant", rotated_cloud),
        ("covered run uses both sheets and lifts back", covered_run),
        ("integrator order, csv, exit codes, figures", tooling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
