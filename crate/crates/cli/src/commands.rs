use std::path::Path;

use serde::Serialize;

use crate::args::{Command, EvalArgs};
use crate::config::{data_spec, training_config, DataSpec, FileConfig};
use crate::error::{CliError, CliResult};
use bacon::analysis::{attribution, bool_equivalence, metrics, repeated_eval, threshold_sweep};
use bacon::data::{boolean_dataset, fit_none, load_csv, stratified_split, LabelColumn};
use bacon::training::{load_model, save_model, DataProvenance};
use bacon::tree::emit_report_prompt;
use bacon::{train, BoolExpr, Dataset, RawTable, TrainedModel, TrainingConfig};

pub const ENDPOINT_VAR: &str = "BACON_REPORT_ENDPOINT";

type Model = TrainedModel<f64>;

pub struct Ctx {
    pub json: bool,
    pub file: FileConfig,
}

impl Ctx {
    fn emit<S: Serialize>(&self, value: &S, text: impl FnOnce() -> String) -> CliResult<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            print!("{}", text());
        }
        Ok(())
    }
}

fn label_column(label: Option<&str>) -> LabelColumn {
    label.map(|l| LabelColumn::Name(l.to_string())).unwrap_or_default()
}

fn load_table(spec: &DataSpec) -> CliResult<(RawTable, Vec<bool>)> {
    let table = load_csv(&spec.path, &label_column(spec.label.as_deref()), spec.has_header)?;
    let labels = table.binary_labels(spec.positive)?;
    Ok((table, labels))
}

fn expand_reverse(spec: &mut DataSpec, table: &RawTable) {
    if spec.preparation.reversed.iter().any(|c| c == "all") {
        spec.preparation.reversed = table.names.clone();
    }
}

fn read_model(path: &Path) -> CliResult<Model> {
    Ok(load_model(path)?)
}

/// Rows of a data file normalized the way the model was trained.
fn model_dataset(model: &Model, eval: &EvalArgs) -> CliResult<Dataset<f64>> {
    let prov = model.metadata.data.as_ref();
    let label = prov.and_then(|p| p.label.as_deref());
    let positive = prov.and_then(|p| p.positive);
    let table = load_csv(&eval.data, &label_column(label), true)?;
    let labels = table.binary_labels(positive)?;
    let (table, labels) = match eval.split.as_str() {
        "all" => (table, labels),
        which @ ("train" | "test") => {
            let p = prov.ok_or_else(|| CliError::Input("model records no split; use --split all".into()))?;
            let (tr, te) = stratified_split(&labels, p.test_fraction, p.split_seed)?;
            let idx = if which == "train" { tr } else { te };
            let sub: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
            (table.subset(&idx), sub)
        }
        other => return Err(CliError::Input(format!("unknown split `{other}` (all, train, test)"))),
    };
    let spec = model.normalizer.clone().unwrap_or_else(|| fit_none(&table));
    Ok(spec.apply(&table, labels)?)
}

fn threshold_of(model: &Model, flag: Option<f64>) -> f64 {
    flag.unwrap_or(if model.metadata.threshold > 0.0 { model.metadata.threshold } else { 0.5 })
}

pub fn run(command: Command, ctx: &Ctx) -> CliResult<()> {
    match command {
        Command::Train { data, train: targs, out } => {
            let cfg = training_config(&ctx.file, &targs)?;
            let mut spec = data_spec(&ctx.file, &data)?;
            let (table, labels) = load_table(&spec)?;
            expand_reverse(&mut spec, &table);
            let prepared = spec.preparation.prepare::<f64>(&table, &labels, cfg.seed)?;
            let mut model = train(&prepared.train, &TrainingConfig { save_model: false, ..cfg.clone() })?;
            model.normalizer = Some(prepared.normalizer);
            model.metadata.data = Some(DataProvenance {
                source: spec.path.display().to_string(),
                label: spec.label.clone(),
                positive: spec.positive,
                test_fraction: spec.preparation.test_fraction,
                split_seed: cfg.seed,
            });
            let path = out.unwrap_or_else(|| cfg.save_path.clone());
            save_model(&model, &path)?;
            let test = if prepared.test.is_empty() {
                None
            } else {
                Some(metrics(&model.predict(&prepared.test)?, prepared.test.labels(), cfg.threshold)?)
            };
            #[derive(Serialize)]
            struct Out<'a> {
                model: &'a Path,
                train_accuracy: f64,
                test: Option<bacon::analysis::Metrics>,
                features: &'a [String],
                attempts: &'a [bacon::AttemptReport],
            }
            let o = Out {
                model: &path,
                train_accuracy: model.metadata.train_accuracy,
                test,
                features: model.tree().features(),
                attempts: &model.metadata.attempts,
            };
            ctx.emit(&o, || {
                let mut s = String::new();
                for a in o.attempts {
                    s.push_str(&format!("{a}\n"));
                }
                s.push_str(&format!("saved {}\ntrain accuracy {:.4}\n", path.display(), o.train_accuracy));
                if let Some(m) = &o.test {
                    s.push_str(&format!(
                        "test accuracy {:.4}, precision {:.4}, recall {:.4}\n",
                        m.accuracy, m.precision, m.recall
                    ));
                }
                s.push_str(&format!("leaves (deepest first): {}\n", o.features.join(", ")));
                s
            })
        }
        Command::Evaluate { model, eval } => {
            let m = read_model(&model.model)?;
            let data = model_dataset(&m, &eval)?;
            let r = metrics(&m.predict(&data)?, data.labels(), threshold_of(&m, eval.threshold))?;
            ctx.emit(&r, || {
                format!(
                    "rows {}\nthreshold {:.2}\naccuracy {:.4}\nprecision {:.4}{}\nrecall {:.4}{}\n",
                    data.len(),
                    r.threshold,
                    r.accuracy,
                    r.precision,
                    if r.precision_undefined { " (no positive predictions)" } else { "" },
                    r.recall,
                    if r.recall_undefined { " (no positive labels)" } else { "" },
                )
            })
        }
        Command::Prune { model, k, out, eval } => {
            let m = read_model(&model.model)?;
            let pruned = m.pruned(k)?;
            save_model(&pruned, &out)?;
            #[derive(Serialize)]
            struct Out {
                pruned: usize,
                retained: Vec<String>,
                accuracy_before: Option<f64>,
                accuracy_after: Option<f64>,
            }
            let (mut before, mut after) = (None, None);
            if let Some(data) = eval.data {
                let ev = EvalArgs { data, split: eval.split, threshold: eval.threshold };
                let d = model_dataset(&m, &ev)?;
                let t = threshold_of(&m, ev.threshold);
                before = Some(m.accuracy(&d, t)?);
                after = Some(pruned.accuracy(&d, t)?);
            }
            let o = Out { pruned: k, retained: pruned.tree().features().to_vec(), accuracy_before: before, accuracy_after: after };
            ctx.emit(&o, || {
                let mut s = format!("saved {}\nretained {} leaves: {}\n", out.display(), o.retained.len(), o.retained.join(", "));
                if let (Some(b), Some(a)) = (o.accuracy_before, o.accuracy_after) {
                    s.push_str(&format!("accuracy {b:.4} -> {a:.4}\n"));
                }
                s
            })
        }
        Command::Explain { model, merge, out } => {
            let m = read_model(&model.model)?;
            let tree = m.tree().simplify(merge);
            let json = tree.to_json();
            let expr = m.tree().to_expression();
            match out {
                Some(p) => {
                    std::fs::write(&p, &json)?;
                    println!("{expr}");
                }
                None if ctx.json => println!("{json}"),
                None => println!("{json}\n\n{expr}"),
            }
            Ok(())
        }
        Command::Thresholds { model, eval, threshold_step } => {
            let m = read_model(&model.model)?;
            let data = model_dataset(&m, &eval)?;
            let r = threshold_sweep(&m, &data, threshold_step)?;
            ctx.emit(&r, || r.markdown())
        }
        Command::Attribution { model, eval } => {
            let m = read_model(&model.model)?;
            let data = model_dataset(&m, &eval)?;
            let r = attribution(&m, &data, threshold_of(&m, eval.threshold))?;
            ctx.emit(&r, || r.markdown())
        }
        Command::Boolgen { expr, repeats, out } => {
            let e: BoolExpr = expr.parse()?;
            let d = boolean_dataset::<f64>(&e, repeats)?;
            let csv = dataset_csv(&d);
            match out {
                Some(p) => std::fs::write(p, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Boolcheck { model, expr } => {
            let m = read_model(&model.model)?;
            let e: BoolExpr = expr.parse()?;
            let r = bool_equivalence(m.tree(), &e, threshold_of(&m, None))?;
            ctx.emit(&r, || {
                let ops: Vec<String> = r.operators.iter().map(|c| c.to_string()).collect();
                let mut s = format!(
                    "equivalent: {}\nleaves: {}\noperators: {}\n",
                    r.equivalent,
                    r.features.join(", "),
                    ops.join(", ")
                );
                for mm in &r.mismatches {
                    let bits: Vec<String> =
                        r.variables.iter().zip(&mm.assignment).map(|(v, b)| format!("{v}={}", u8::from(*b))).collect();
                    s.push_str(&format!("mismatch {} expected {} score {:.4}\n", bits.join(" "), mm.expected, mm.score));
                }
                s
            })
        }
        Command::ReportPrompt { model, context, context_file, merge, out, send } => {
            let m = read_model(&model.model)?;
            let context = match (context, context_file) {
                (Some(c), _) => c,
                (None, Some(p)) => std::fs::read_to_string(p)?,
                (None, None) => String::new(),
            };
            let prompt = emit_report_prompt(&m.tree().simplify(merge), &context);
            match &out {
                Some(p) => std::fs::write(p, &prompt)?,
                None if !send => print!("{prompt}"),
                None => {}
            }
            if send {
                let url = std::env::var(ENDPOINT_VAR)
                    .map_err(|_| CliError::Config(format!("--send requires {ENDPOINT_VAR} to be set")))?;
                println!("{}", post_prompt(&url, &prompt)?);
            }
            Ok(())
        }
        Command::Repeat { data, train: targs, runs, top } => {
            let cfg = training_config(&ctx.file, &targs)?;
            let mut spec = data_spec(&ctx.file, &data)?;
            let (table, labels) = load_table(&spec)?;
            expand_reverse(&mut spec, &table);
            let r = repeated_eval::<f64>(&table, &labels, &spec.preparation, &cfg, runs)?;
            ctx.emit(&r, || r.markdown(top))
        }
    }
}

fn dataset_csv(d: &Dataset<f64>) -> String {
    let mut w = String::new();
    let mut header = d.names().to_vec();
    header.push("label".into());
    w.push_str(&header.join(","));
    w.push('\n');
    for (row, &l) in d.rows().rows().into_iter().zip(d.labels()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        w.push_str(&cells.join(","));
        w.push_str(if l { ",1\n" } else { ",0\n" });
    }
    w
}

fn post_prompt(url: &str, prompt: &str) -> CliResult<String> {
    let mut resp = ureq::post(url)
        .header("Content-Type", "text/plain; charset=utf-8")
        .send(prompt)
        .map_err(|e| CliError::Http(e.to_string()))?;
    resp.body_mut().read_to_string().map_err(|e| CliError::Http(e.to_string()))
}

