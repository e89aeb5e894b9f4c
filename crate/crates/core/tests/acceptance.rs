//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Criteria run concurrently and
//! report in order. Set `BACON_STRETCH=1` to add the eight-variable Boolean
//! stretch case and `BACON_ACCEPTANCE_STRICT=1` to exit non-zero on any FAIL.
//! Positional arguments select criteria by number.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use bacon::analysis::{attribution, bool_equivalence, repeated_eval, threshold_sweep};
use bacon::data::{boolean_dataset, load_csv, LabelColumn, Prepared};
use bacon::logic::gcd2_value;
use bacon::permutation::{hungarian, sinkhorn, SINKHORN_ITERS};
use bacon::training::{load_model, save_model, LossConfig};
use bacon::{train, BoolExpr, NormalizerKind, Preparation, RawTable, TrainedModel, TrainingConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances and budgets.
const ANCHOR_TOL: f64 = 1e-12;
const ANCHOR_PAIRS: usize = 10_000;
const GRADIENT_MODELS: usize = 100;
const HUNGARIAN_CASES: usize = 100;
const HUNGARIAN_N: usize = 7;
const SINKHORN_TOL: f64 = 1e-6;
const BOOL_REPEATS: usize = 100;
const BOOL_ATTEMPTS: usize = 5;
const IRIS_MIN_ACCURACY: f64 = 0.95;
const IRIS_ATTEMPTS: usize = 5;
const WDBC_RUNS: usize = 20;
const WDBC_MEAN: f64 = 0.965;
const WDBC_BEST: f64 = 0.975;
const WDBC_MAX_FAILED: usize = 1;
const PRUNE_MIN_K: usize = 20;
const PRUNE_MAX_DROP: f64 = 0.015;
const IMPORTANCE_PENALTY: f64 = 1e-2;
const PLANTED_ROWS: usize = 1000;
const PLANTED_MAX_DELTA: f64 = 0.01;
const PLANTED_MIN_ACCURACY: f64 = 0.92;

fn data_path(file: &str) -> String {
    format!("{}/../../data/{file}", env!("CARGO_MANIFEST_DIR"))
}

struct Verdict {
    id: String,
    pass: bool,
    detail: String,
}

type Check = fn() -> Verdict;

fn verdict(id: &str, pass: bool, detail: String) -> Verdict {
    Verdict { id: id.into(), pass, detail }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn c1_gcd_anchors() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..ANCHOR_PAIRS {
        let (x, y): (f64, f64) = (rng.random(), rng.random());
        worst = worst.max((gcd2_value(x, y, 0.5, 1.25) - x * y).abs());
        worst = worst.max((gcd2_value(x, y, 0.5, -0.25) - (x + y - x * y)).abs());
        let w: f64 = rng.random();
        for seam in [0.5f64, 0.75, 0.25] {
            let below = gcd2_value(x, y, w, f64::from_bits(seam.to_bits() - 1));
            let above = gcd2_value(x, y, w, f64::from_bits(seam.to_bits() + 1));
            let at = gcd2_value(x, y, w, seam);
            worst = worst.max((below - at).abs()).max((above - at).abs());
        }
    }
    let mut drastic = true;
    for x in [0.0, 0.3, 1.0] {
        for y in [0.0, 0.7, 1.0] {
            let cc = if x == 1.0 && y == 1.0 { 1.0 } else { 0.0 };
            let dd = if x == 0.0 && y == 0.0 { 0.0 } else { 1.0 };
            drastic &= gcd2_value(x, y, 0.4, 2.0) == cc && gcd2_value(x, y, 0.4, -1.0) == dd;
        }
    }
    let el = t.elapsed();
    verdict(
        "1 gcd anchors",
        worst <= ANCHOR_TOL && drastic && within(el, 1),
        format!("max deviation {worst:.1e}, drastic exact {drastic}, {:.3}s", el.as_secs_f64()),
    )
}

fn c2_gradients() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..GRADIENT_MODELS {
        let n = rng.random_range(2..=8);
        let frozen = i % 2 == 1 || n == 2;
        let (p, x, y, noise) = common::random_case(n, frozen, &mut rng);
        let cfg = LossConfig::new(rng.random_range(0.5..10.0), rng.random_range(0.0..0.1), n - 1).unwrap();
        worst = worst.max(common::check(&p, &x, &y, &cfg, noise.as_ref()));
    }
    let el = t.elapsed();
    verdict(
        "2 gradient oracle",
        worst <= common::REL_TOL && within(el, 30),
        format!("{GRADIENT_MODELS} models, worst relative error {worst:.2e}, {:.2}s", el.as_secs_f64()),
    )
}

fn best_by_search(m: &Array2<f64>) -> f64 {
    fn go(m: &Array2<f64>, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if row == m.nrows() {
            *best = best.max(acc);
            return;
        }
        for c in 0..m.ncols() {
            if !used[c] {
                used[c] = true;
                go(m, row + 1, used, acc + m[[row, c]], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(m, 0, &mut vec![false; m.ncols()], 0.0, &mut best);
    best
}

fn c3_hungarian_sinkhorn() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut optimal = 0;
    let mut sink_err: f64 = 0.0;
    for _ in 0..HUNGARIAN_CASES {
        let m = Array2::from_shape_simple_fn((HUNGARIAN_N, HUNGARIAN_N), || rng.random_range(-1.0..1.0));
        let p = hungarian(&m).unwrap();
        let got: f64 = p.as_slice().iter().enumerate().map(|(r, &c)| m[[r, c]]).sum();
        if (got - best_by_search(&m)).abs() < 1e-12 {
            optimal += 1;
        }
        let s = sinkhorn(&m, 1.0, SINKHORN_ITERS).unwrap();
        for sums in [s.sum_axis(ndarray::Axis(0)), s.sum_axis(ndarray::Axis(1))] {
            sink_err = sums.iter().fold(sink_err, |e, v| e.max((v - 1.0).abs()));
        }
    }
    let el = t.elapsed();
    verdict(
        "3 hungarian/sinkhorn",
        optimal == HUNGARIAN_CASES && sink_err <= SINKHORN_TOL && within(el, 5),
        format!(
            "{optimal}/{HUNGARIAN_CASES} optimal, sinkhorn marginal error {sink_err:.1e} after {SINKHORN_ITERS} iterations, {:.2}s",
            el.as_secs_f64()
        ),
    )
}

fn boolean_config() -> TrainingConfig {
    let mut cfg = TrainingConfig {
        attempts: BOOL_ATTEMPTS,
        acceptance_threshold: 1.0,
        post_freeze_epochs: Some(500),
        seed: 1,
        ..Default::default()
    };
    cfg.permutation.initial_temperature = 0.1;
    cfg
}

/// Trains on the repeated truth table; returns a summary and whether the
/// model is frozen, exact on every row and equivalent to the expression.
fn recover(expr: &str, cfg: &TrainingConfig) -> (bool, String) {
    let e: BoolExpr = expr.parse().unwrap();
    let data = boolean_dataset::<f64>(&e, BOOL_REPEATS).unwrap();
    match train(&data, cfg) {
        Ok(model) => {
            let acc = model.accuracy(&boolean_dataset(&e, 1).unwrap(), 0.5).unwrap();
            let eq = bool_equivalence(model.tree(), &e, 0.5).unwrap();
            let ok = model.params().perm.is_frozen() && acc == 1.0 && eq.equivalent;
            (ok, format!("{expr}: attempt {}, accuracy {acc:.3}, equivalent {}", model.metadata.attempt, eq.equivalent))
        }
        Err(err) => (false, format!("{expr}: {err}")),
    }
}

fn c4_boolean() -> Verdict {
    let t = Instant::now();
    let mut exprs = vec!["A and B", "A or B", "(A and B) or C", "(A or B) and C and D"];
    if std::env::var_os("BACON_STRETCH").is_some() {
        exprs.push("(((((((A or B) or C) and D) and E) and F) or G) or H)");
    }
    let cfg = boolean_config();
    let results: Vec<(bool, String)> = exprs.iter().map(|e| recover(e, &cfg)).collect();
    let el = t.elapsed();
    let ok = results.iter().all(|r| r.0);
    let lines: Vec<String> = results.into_iter().map(|r| r.1).collect();
    verdict("4 boolean recovery", ok && within(el, 600), format!("{}; {:.1}s", lines.join("; "), el.as_secs_f64()))
}

fn iris_case(positive: f64, reversed: bool) -> (bool, String) {
    let table = load_csv(data_path("iris.csv"), &LabelColumn::Name("species".into()), true).unwrap();
    let labels = table.binary_labels(Some(positive)).unwrap();
    let prep = Preparation {
        normalizer: NormalizerKind::Minmax,
        reversed: if reversed { table.names.clone() } else { Vec::new() },
        test_fraction: 0.2,
    };
    let Prepared { train: tr, test: te, .. } = prep.prepare::<f64>(&table, &labels, 0).unwrap();
    let mut cfg = TrainingConfig { attempts: IRIS_ATTEMPTS, freeze_loss_threshold: 0.05, ..Default::default() };
    cfg.permutation.initial_temperature = 0.1;
    match train(&tr, &cfg) {
        Ok(m) => {
            let acc = m.accuracy(&te, 0.5).unwrap();
            (acc >= IRIS_MIN_ACCURACY, format!("class {positive}: test {acc:.4} (attempt {})", m.metadata.attempt))
        }
        Err(e) => (false, format!("class {positive}: {e}")),
    }
}

fn c5_iris() -> Verdict {
    let t = Instant::now();
    let setosa = iris_case(0.0, true);
    let virginica = iris_case(2.0, false);
    let el = t.elapsed();
    verdict(
        "5 iris one-vs-rest",
        setosa.0 && virginica.0 && within(el, 300),
        format!("setosa reversed {}; virginica {}; {:.1}s", setosa.1, virginica.1, el.as_secs_f64()),
    )
}

fn wdbc_table() -> (RawTable, Vec<bool>) {
    let table = load_csv(data_path("wdbc.csv"), &LabelColumn::Name("diagnosis".into()), true).unwrap();
    let labels = table.binary_labels(None).unwrap();
    (table, labels)
}

fn wdbc_preparation() -> Preparation {
    Preparation { normalizer: NormalizerKind::RobustSigmoid, reversed: Vec::new(), test_fraction: 0.2 }
}

fn wdbc_config() -> TrainingConfig {
    let mut cfg = TrainingConfig {
        attempts: 3,
        max_epochs: 4000,
        post_freeze_epochs: Some(1000),
        freeze_loss_threshold: 0.05,
        seed: 0,
        ..Default::default()
    };
    cfg.permutation.initial_temperature = 0.1;
    cfg
}

/// Converged WDBC model on split seed 0.
fn wdbc_model(cfg: &TrainingConfig) -> Result<(TrainedModel<f64>, Prepared<f64>), String> {
    let (table, labels) = wdbc_table();
    let prepared = wdbc_preparation().prepare::<f64>(&table, &labels, cfg.seed).map_err(|e| e.to_string())?;
    let model = train(&prepared.train, cfg).map_err(|e| e.to_string())?;
    Ok((model, prepared))
}

fn c6_wdbc() -> Verdict {
    let t = Instant::now();
    let (table, labels) = wdbc_table();
    let report = match repeated_eval::<f64>(&table, &labels, &wdbc_preparation(), &wdbc_config(), WDBC_RUNS) {
        Ok(r) => r,
        Err(e) => return verdict("6 wdbc repeated", false, e.to_string()),
    };
    let el = t.elapsed();
    let ok = report.mean >= WDBC_MEAN
        && report.best() >= WDBC_BEST
        && report.failures.len() <= WDBC_MAX_FAILED
        && within(el, 3600);
    verdict(
        "6 wdbc repeated",
        ok,
        format!(
            "mean {:.4} (95% CI [{:.4}, {:.4}]), best {:.4}, {} failed of {WDBC_RUNS}, {:.0}s",
            report.mean,
            report.ci_low,
            report.ci_high,
            report.best(),
            report.failures.len(),
            el.as_secs_f64()
        ),
    )
}

fn c7_pruning() -> Verdict {
    // feature-importance setting: strong pull of every weight towards 0.5
    let cfg = TrainingConfig { weight_penalty_strength: IMPORTANCE_PENALTY, ..wdbc_config() };
    let (model, prepared) = match wdbc_model(&cfg) {
        Ok(m) => m,
        Err(e) => return verdict("7 pruning/attribution", false, e),
    };
    let (model, prepared) = (&model, &prepared);
    let report = attribution(model, &prepared.test, 0.5).unwrap();
    let full = model.accuracy(&prepared.test, 0.5).unwrap();
    let ordered = report.rows.iter().enumerate().all(|(i, r)| r.pruned == i);
    let exact = report.rows[0].accuracy == full;
    let k = report.deepest_prune_within(PRUNE_MAX_DROP).map_or(0, |r| r.pruned);
    let acc_k = report.rows[k].accuracy;
    verdict(
        "7 pruning/attribution",
        ordered && exact && k >= PRUNE_MIN_K,
        format!("full {full:.4}, deepest k within 1.5 pt = {k} (accuracy {acc_k:.4}), ordered {ordered}, k=0 exact {exact}"),
    )
}

fn c8_thresholds() -> Verdict {
    let (model, prepared) = match wdbc_model(&wdbc_config()) {
        Ok(m) => m,
        Err(e) => return verdict("8 threshold tuning", false, e),
    };
    let (model, prepared) = (&model, &prepared);
    let r = threshold_sweep(model, &prepared.test, 0.01).unwrap();
    let full_recall = r.rows.iter().any(|row| row.recall == 1.0);
    let full_precision = r.rows.iter().any(|row| row.precision == 1.0 && row.predicted_positives > 0);
    let at_half = r.row_at(0.5).unwrap().accuracy;
    let best = r.rows[r.picks.max_accuracy].accuracy;
    let monotone = r.rows.windows(2).all(|w| w[1].recall <= w[0].recall);
    verdict(
        "8 threshold tuning",
        full_recall && full_precision && best >= at_half && monotone,
        format!(
            "recall 100% point {full_recall}, precision 100% point {full_precision}, max accuracy {best:.4} at {:.2} vs {at_half:.4} at 0.50, recall non-increasing {monotone}",
            r.rows[r.picks.max_accuracy].threshold
        ),
    )
}

fn c9_persistence() -> Verdict {
    let e: BoolExpr = "(A or B) and C".parse().unwrap();
    let data = boolean_dataset::<f64>(&e, 20).unwrap();
    let cfg = boolean_config();
    let a = train(&data, &cfg).unwrap();
    let b = train(&data, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_model(&a, &path).unwrap();
    let loaded: TrainedModel<f64> = load_model(&path).unwrap();
    let bits = |m: &TrainedModel<f64>| -> Vec<u64> {
        let p = m.params();
        p.theta_w.iter().chain(&p.theta_a).chain(p.perm.logits.iter()).map(|v| v.to_bits()).collect()
    };
    let roundtrip = bits(&a) == bits(&loaded)
        && a.params().perm.hard_assignment() == loaded.params().perm.hard_assignment()
        && a.predict(&data).unwrap() == loaded.predict(&data).unwrap()
        && a.to_json().unwrap() == loaded.to_json().unwrap();
    let same_model = a.to_json().unwrap() == b.to_json().unwrap();
    let same_reports = attribution(&a, &data, 0.5).unwrap() == attribution(&b, &data, 0.5).unwrap()
        && threshold_sweep(&a, &data, 0.05).unwrap() == threshold_sweep(&b, &data, 0.05).unwrap();
    verdict(
        "9 persistence/determinism",
        roundtrip && same_model && same_reports,
        format!("bitwise round-trip {roundtrip}, identical model {same_model}, identical reports {same_reports}"),
    )
}

fn planted_table() -> (RawTable, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let names = ["f1", "f2", "noise1", "noise2"].map(String::from).to_vec();
    let rows: Vec<Vec<f64>> = (0..PLANTED_ROWS).map(|_| (0..4).map(|_| rng.random()).collect()).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r[0] > 0.5 && r[1] > 0.5).collect();
    let table = RawTable {
        names,
        rows,
        labels: labels.iter().map(|&l| f64::from(u8::from(l))).collect(),
        source: "planted".into(),
    };
    (table, labels)
}

fn c10_planted() -> Verdict {
    let (table, labels) = planted_table();
    let prepared = Preparation::default().prepare::<f64>(&table, &labels, 0).unwrap();
    let mut cfg = TrainingConfig { attempts: 5, freeze_loss_threshold: 0.1, ..Default::default() };
    cfg.permutation.initial_temperature = 0.1;
    let model = match train(&prepared.train, &cfg) {
        Ok(m) => m,
        Err(e) => return verdict("10 planted logic", false, e.to_string()),
    };
    let report = attribution(&model, &prepared.test, 0.5).unwrap();
    let mut dropped = Vec::new();
    let mut worst_delta = f64::NEG_INFINITY;
    for w in report.rows.windows(2) {
        let feature = w[1].pruned_feature.clone().unwrap();
        if !feature.starts_with("noise") {
            break;
        }
        worst_delta = worst_delta.max(w[0].accuracy - w[1].accuracy);
        dropped.push(feature);
    }
    let pruned_acc = report.rows[dropped.len()].accuracy;
    let ok = dropped.len() == 2 && worst_delta < PLANTED_MAX_DELTA && pruned_acc >= PLANTED_MIN_ACCURACY;
    verdict(
        "10 planted logic",
        ok,
        format!(
            "leaves deepest first {:?}, noise dropped {dropped:?} (worst delta {:.4}), pruned accuracy {pruned_acc:.4}",
            model.tree().features(),
            worst_delta.max(0.0)
        ),
    )
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("1", c1_gcd_anchors),
        ("2", c2_gradients),
        ("3", c3_hungarian_sinkhorn),
        ("4", c4_boolean),
        ("5", c5_iris),
        ("6", c6_wdbc),
        ("7", c7_pruning),
        ("8", c8_thresholds),
        ("9", c9_persistence),
        ("10", c10_planted),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<Check> = checks
        .iter()
        .filter(|(id, _)| filter.is_empty() || filter.iter().any(|f| f == id))
        .map(|&(_, c)| c)
        .collect();
    let verdicts: Vec<Verdict> = std::thread::scope(|s| {
        let handles: Vec<_> = selected.iter().map(|&c| s.spawn(c)).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for v in &verdicts {
        failed += usize::from(!v.pass);
        writeln!(out, "criterion {}: {} ({})", v.id, if v.pass { "PASS" } else { "FAIL" }, v.detail).unwrap();
    }
    writeln!(out, "acceptance: {} of {} criteria pass", verdicts.len() - failed, verdicts.len()).unwrap();
    if failed > 0 && std::env::var_os("BACON_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
