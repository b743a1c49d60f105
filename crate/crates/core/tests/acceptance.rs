//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use crossbar_sim::data::{self, Label};
use crossbar_sim::device::{update_error_variance, DeviceModel, DevicePreset, Direction, UpdateMode, PRESETS};
use crossbar_sim::experiment::{
    format_accuracy_table, preset_sweep_configs, run_experiment, run_experiment_on, run_sweep,
    ExperimentConfig,
};
use crossbar_sim::nn::{quadratic_cost, sigmoid, softmax};
use crossbar_sim::parallel::Execution;
use crossbar_sim::{BalancedCore, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    data_path, dense_matvec, dense_matvec_t, interpolated_row, ks_distance, random_matrix, row_cdf,
    ToyProblem, TOY_SHAPES,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn base_config(mode: UpdateMode) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset("taox", mode);
    cfg.data = data_path();
    cfg
}

fn numeric_accuracy_band() -> Outcome {
    let ds = data::load_wdbc(data_path()).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut passing = 0;
    let mut slowest = Duration::ZERO;
    for seed in 1..=5 {
        let mut cfg = base_config(UpdateMode::Numeric);
        cfg.seed = seed;
        let start = Instant::now();
        let r = run_experiment_on(&cfg, &ds).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        passing += usize::from(r.test_accuracy() >= 0.95);
        lines.push(format!("seed {seed}: {}", r.accuracy_percent()));
    }
    check(
        passing >= 4 && slowest < Duration::from_secs(60),
        format!("{passing}/5 seeds >= 95.0% [{}], slowest run {:.2}s", lines.join(", "), slowest.as_secs_f64()),
    )
}

fn noisy_accuracy_band() -> Outcome {
    let cfgs = preset_sweep_configs(&base_config(UpdateMode::Numeric), None);
    let start = Instant::now();
    let rows = run_sweep(&cfgs, Execution::Sequential);
    let elapsed = start.elapsed();
    print!("{}", format_accuracy_table(&rows));
    let noisy: Vec<_> = rows.iter().filter(|r| r.config.mode != UpdateMode::Numeric).collect();
    let low: Vec<String> = noisy
        .iter()
        .filter(|r| r.accuracy().is_none_or(|a| a < 0.90))
        .map(|r| r.config.label())
        .collect();
    let worst = noisy.iter().filter_map(|r| r.accuracy()).fold(1.0, f64::min);
    check(
        noisy.len() == 16 && low.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{}/16 noisy cells >= 90.0% (lowest {:.1}%), 24-cell sweep single-threaded in {:.1}s{}",
            16 - low.len(),
            100.0 * worst,
            elapsed.as_secs_f64(),
            if low.is_empty() { String::new() } else { format!("; below band: {}", low.join(", ")) }
        ),
    )
}

fn norm_rel_err(got: &[f64], want: &[f64]) -> f64 {
    let diff = got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = want.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let rows = rng.random_range(1..=32);
        let cols = rng.random_range(1..=32);
        let w = random_matrix(&mut rng, rows, cols, 1.0);
        let mut core = BalancedCore::from_weights(&Matrix::from_rows(&w), 2.0, DeviceModel::numeric())
            .map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d: Vec<f64> = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        worst[0] = worst[0].max(norm_rel_err(&core.vmm(&x).unwrap(), &dense_matvec(&w, &x)));
        worst[1] = worst[1].max(norm_rel_err(&core.vmm_transpose(&d).unwrap(), &dense_matvec_t(&w, &d)));
        let eta = rng.random_range(0.01..0.5);
        core.outer_update(eta, &d, &x, 0, &mut rng).unwrap();
        let want: Vec<f64> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| w[i][j] - eta * d[i] * x[j])
            .collect();
        worst[2] = worst[2].max(norm_rel_err(core.weights().as_slice(), &want));
    }
    check(
        worst.iter().all(|e| *e <= 1e-12),
        format!(
            "1000 instances, worst relative error vmm {:.1e}, vmm_transpose {:.1e}, outer_update {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let p = ToyProblem::random(&mut rng, TOY_SHAPES[k % TOY_SHAPES.len()]);
        worst = worst.max(p.max_gradient_error(1e-5));
    }
    check(worst <= 1e-5, format!("100 toy nets, worst parameter relative error {worst:.2e}"))
}

fn function_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut note = |got: f64, want: f64| worst = worst.max((got - want).abs());
    note(sigmoid(0.0), 0.5);
    for x in [-5.0, -1.0, 0.3, 10.0] {
        note(sigmoid(x) + sigmoid(-x), 1.0);
    }
    note(sigmoid(3.0f64.ln()), 0.75);
    for c in [-3.0, 0.0, 17.5, 1000.0] {
        let s = softmax(&[c, c]);
        note(s[0], 0.5);
        note(s[1], 0.5);
    }
    let s = softmax(&[0.0, 3.0f64.ln()]);
    note(s[0], 0.25);
    note(s[1], 0.75);
    let shifted = softmax(&[1000.0, 1000.0 + 3.0f64.ln()]);
    note(shifted[0], s[0]);
    note(shifted[1], s[1]);
    note(quadratic_cost(&[[1.0, 0.0]], &[[1.0, 0.0]]).unwrap(), 0.0);
    note(quadratic_cost(&[[0.0, 1.0]], &[[1.0, 0.0]]).unwrap(), 1.0);
    note(quadratic_cost(&[[0.5, 0.5], [0.5, 0.5]], &[[1.0, 0.0], [0.0, 1.0]]).unwrap(), 0.25);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_sum = 0.0f64;
    for _ in 0..10_000 {
        let k = rng.random_range(1..=16);
        let z: Vec<f64> = (0..k).map(|_| rng.random_range(-50.0..50.0)).collect();
        worst_sum = worst_sum.max((softmax(&z).iter().sum::<f64>() - 1.0).abs());
    }
    check(
        worst <= 1e-12 && worst_sum <= 1e-12,
        format!("worst example error {worst:.1e}, worst softmax sum error over 1e4 vectors {worst_sum:.1e}"),
    )
}

fn lut_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    let mut picked = Vec::new();
    for _ in 0..10 {
        let preset = &PRESETS[rng.random_range(0..PRESETS.len())];
        let mode = if rng.random::<bool>() { UpdateMode::Standard } else { UpdateMode::Multi };
        let model = preset.model(mode).map_err(|e| e.to_string())?;
        let direction = if rng.random::<bool>() { Direction::Increasing } else { Direction::Decreasing };
        let cell = rng.random_range(0..100);
        // away from the rails, so no pulse is clamped
        let g = rng.random_range(0.05..0.95);
        let table = model.table_for(cell, direction).map_err(|e| e.to_string())?;
        let row = interpolated_row(table, g);
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| model.pulse(cell, g, direction, &mut rng).unwrap())
            .collect();
        let d = ks_distance(&mut draws, |x| row_cdf(&row, table.q_grid(), x));
        worst = worst.max(d);
        picked.push(format!("{} {mode} {direction} g={g:.2}: {d:.4}", preset.slug));
    }
    check(
        worst < 0.02,
        format!("10 (table, g) pairs at 1e5 draws, worst KS distance {worst:.4} [{}]", picked.join("; ")),
    )
}

fn noise_monotonicity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for mechanism in ["sot", "stt"] {
        for mode in [UpdateMode::Standard, UpdateMode::Multi] {
            let mut vars = Vec::new();
            for temp in ["0k", "300k", "400k"] {
                let preset = DevicePreset::lookup(&format!("dwmtj-{mechanism}-{temp}")).unwrap();
                let model = preset.model(mode).map_err(|e| e.to_string())?;
                let target = 8.0 * model.unit_step();
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                vars.push(update_error_variance(&model, 0.5, target, 10_000, &mut rng).map_err(|e| e.to_string())?);
            }
            ok &= vars[0] < vars[1] && vars[1] < vars[2];
            lines.push(format!("{mechanism} {mode}: {:.3e} < {:.3e} < {:.3e}", vars[0], vars[1], vars[2]));
        }
    }
    check(ok, format!("update-error variance, 1e4 updates [{}]", lines.join("; ")))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let mut cfg = base_config(UpdateMode::Multi);
        cfg.device = crossbar_sim::experiment::DeviceSource::Preset("dwmtj-stt-400k".into());
        cfg.seed = 11;
        cfg.out = Some(dir.path().to_path_buf());
        run_experiment(&cfg).map_err(|e| e.to_string())?;
    }
    let mut differing = Vec::new();
    for name in ["loss.txt", "updates.txt", "summary.txt"] {
        let a = fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        if a != b || a.is_empty() {
            differing.push(name);
        }
    }
    check(
        differing.is_empty(),
        if differing.is_empty() {
            "loss.txt, updates.txt, summary.txt byte-identical across two 80-epoch runs".into()
        } else {
            format!("differing or empty: {}", differing.join(", "))
        },
    )
}

fn data_pipeline() -> Outcome {
    let ds = data::load_wdbc(data_path()).map_err(|e| e.to_string())?;
    let s = data::split(ds.len(), 1).map_err(|e| e.to_string())?;
    let c = data::correlation_matrix(&ds);
    let symmetric = (0..c.len()).all(|a| c[a][a] == 1.0 && (0..c.len()).all(|b| c[a][b] == c[b][a]));
    let (b, m) = (ds.count(Label::Benign), ds.count(Label::Malignant));
    let sizes = (s.train.len(), s.val.len(), s.test.len());
    check(
        ds.len() == 569 && (b, m) == (357, 212) && sizes == (227, 170, 172) && symmetric,
        format!(
            "N={} benign/malignant {b}/{m}, split {}/{}/{}, correlation symmetric with unit diagonal: {symmetric}",
            ds.len(),
            sizes.0,
            sizes.1,
            sizes.2
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("numeric-mode accuracy band", numeric_accuracy_band),
        ("noisy-mode accuracy band", noisy_accuracy_band),
        ("oracle equivalence", oracle_equivalence),
        ("gradient check", gradient_check),
        ("function-level exactness", function_exactness),
        ("LUT statistical consistency", lut_consistency),
        ("noise monotonicity", noise_monotonicity),
        ("determinism", determinism),
        ("data pipeline", data_pipeline),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {}: {name}: {detail}", k + 1);
        failed += usize::from(outcome.is_err());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
