use std::fmt::Write as _;
use std::path::Path;

use log::info;
use serde::Serialize;
use serde_json::{json, Value};
use tweakboost::prune::{combine, cumulative_mass, DEFAULT_MASS_FRACTION, DEFAULT_REL_TOL, DEFAULT_WINDOW};
use tweakboost::tweak::{grid_slack, oracle_grid, ExplanationRecord};
use tweakboost::{
    brute_force_oracle, select_kprime_alpha_mass, select_kprime_trajectory, train_adaboost, BoostConfig, Dataset64,
    Ensemble64, EpsilonPolicy, ExplainConfig, ExplainRequest, Explainer, Norm, PruneError,
    PruneReport64, Sign, TweakError, MODEL_VERSION,
};

use crate::args::{
    EpsilonModeArg, ExplainArgs, NormArg, ReportAlphasArgs, ReportTrajectoriesArgs, TrainArgs, TweakArgs, VerifyArgs,
};
use crate::config::TrainConfig;
use crate::output::{csv_preamble, emit, write_atomic};
use crate::CliError;

fn load_model(path: &Path) -> Result<(Ensemble64, Option<Value>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ensemble64::from_model_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn training_split(run_config: Option<&Value>) -> Result<Dataset64, CliError> {
    TrainConfig::from_embedded(run_config)?.load().map(|(train, _)| train)
}

fn accuracy(e: &Ensemble64, ds: &Dataset64) -> f64 {
    let hits = ds.rows().iter().zip(ds.labels()).filter(|(x, y)| e.predict(x) == **y).count();
    hits as f64 / ds.len() as f64
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn train(a: &TrainArgs) -> Result<(), CliError> {
    let cfg = TrainConfig::from_args(a)?;
    let (train, test) = cfg.load()?;
    info!("training on {} rows, {} features", train.len(), train.n_features());
    let e = train_adaboost(&train, &BoostConfig::new(cfg.k, cfg.max_depth, cfg.seed))
        .map_err(|e| CliError::Train(e.to_string()))?;
    let run_config = serde_json::to_value(&cfg).expect("config serializes");
    write_atomic(&cfg.out, e.to_model_json(Some(&run_config)).as_bytes())?;

    let alphas = e.alphas();
    let head = &alphas[..alphas.len().min(10)];
    let tail = &alphas[alphas.len().saturating_sub(10)..];
    let mut s = String::new();
    writeln!(s, "model: {} ({MODEL_VERSION})", cfg.out.display()).unwrap();
    writeln!(s, "rounds: {} of {} requested, stop: {:?}", e.n_trees(), cfg.k, e.stop_reason()).unwrap();
    writeln!(s, "train accuracy: {:.4} ({} rows)", accuracy(&e, &train), train.len()).unwrap();
    if let Some(test) = &test {
        writeln!(s, "test accuracy: {:.4} ({} rows)", accuracy(&e, test), test.len()).unwrap();
    }
    writeln!(
        s,
        "alpha: min {:.4}, mean {:.4}, max {:.4}; first-10 mean {:.4}, last-10 mean {:.4}",
        alphas.iter().copied().fold(f64::INFINITY, f64::min),
        mean(alphas),
        alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean(head),
        mean(tail),
    )
    .unwrap();
    print!("{s}");
    Ok(())
}

fn explain_config(t: &TweakArgs, k_prime: Option<usize>) -> ExplainConfig<f64> {
    ExplainConfig {
        epsilon: match t.epsilon_mode {
            EpsilonModeArg::Absolute => EpsilonPolicy::absolute(t.epsilon),
            EpsilonModeArg::RangeScaled => EpsilonPolicy::range_scaled(t.epsilon),
        },
        norm: match t.norm {
            NormArg::L2Std => Norm::L2Std,
            NormArg::L1Std => Norm::L1Std,
            NormArg::L0 => Norm::L0,
        },
        k_prime,
        threads: t.threads as usize,
    }
}

fn tweak_error(e: TweakError) -> CliError {
    match e {
        TweakError::BadEpsilon | TweakError::BadPrefix { .. } | TweakError::ThreadPool(_) => CliError::Usage(e.to_string()),
        TweakError::Misclassified { .. } => {
            CliError::Data(format!("{e}; pass --allow-misclassified to explain it anyway"))
        }
        _ => CliError::Data(e.to_string()),
    }
}

fn check_epsilon(t: &TweakArgs) -> Result<(), CliError> {
    if !(t.epsilon.is_finite() && t.epsilon > 0.0) {
        return Err(CliError::Usage(format!("--epsilon must be finite and positive, got {}", t.epsilon)));
    }
    Ok(())
}

/// A parsed `--prune` specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
enum PruneSpec {
    AlphaMass { mass_fraction: f64 },
    Trajectory { window: usize, rel_tol: f64 },
}

fn parse_prune(spec: &str) -> Result<PruneSpec, CliError> {
    let bad = || CliError::Usage(format!("bad --prune `{spec}`; expected alpha-mass[:F] or trajectory[:W[:TOL]]"));
    let mut parts = spec.split(':');
    let parsed = match parts.next().map(str::trim) {
        Some("alpha-mass") => PruneSpec::AlphaMass {
            mass_fraction: parts.next().map_or(Ok(DEFAULT_MASS_FRACTION), |p| p.trim().parse()).map_err(|_| bad())?,
        },
        Some("trajectory") => PruneSpec::Trajectory {
            window: parts.next().map_or(Ok(DEFAULT_WINDOW), |p| p.trim().parse()).map_err(|_| bad())?,
            rel_tol: parts.next().map_or(Ok(DEFAULT_REL_TOL), |p| p.trim().parse()).map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(parsed)
}

fn prune_error(e: PruneError) -> CliError {
    match e {
        PruneError::BadMassFraction(_) | PruneError::BadWindow(_) | PruneError::BadTolerance => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Data(e.to_string()),
    }
}

/// Which instance to explain, resolved against the training split.
struct Resolved {
    values: Vec<f64>,
    label: Option<Sign>,
    training_index: Option<usize>,
}

fn resolve_instance(a: &ExplainArgs, e: &Ensemble64, train: Option<&Dataset64>) -> Result<Resolved, CliError> {
    if let Some(r) = a.row {
        let train = train.expect("training split loaded for --row");
        let i = usize::try_from(r)
            .ok()
            .filter(|&i| i < train.len())
            .ok_or_else(|| CliError::Data(format!("row {r} outside the training split (0..{})", train.len())))?;
        return Ok(Resolved {
            values: train.rows()[i].clone(),
            label: Some(train.labels()[i]),
            training_index: Some(i),
        });
    }
    let raw = a.instance.as_deref().unwrap_or_default();
    let values = raw
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Data(format!("--instance value `{}` is not a finite number", v.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != e.n_features() {
        let names: Vec<&str> = e.schema().iter().map(|f| f.name.as_str()).collect();
        return Err(CliError::Data(format!(
            "--instance has {} values, model expects {} ({})",
            values.len(),
            e.n_features(),
            names.join(",")
        )));
    }
    Ok(Resolved {
        values,
        label: None,
        training_index: None,
    })
}

#[derive(Serialize)]
struct ExplainDocument<'a> {
    version: &'static str,
    run_config: Value,
    pruning: Option<PruneReport64>,
    pruning_notes: Vec<String>,
    explanation: ExplanationRecord<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    training: Option<&'a Value>,
}

pub fn explain(a: &ExplainArgs) -> Result<(), CliError> {
    check_epsilon(&a.tweak)?;
    let specs = a.prune.iter().map(|s| parse_prune(s)).collect::<Result<Vec<_>, _>>()?;
    let (e, embedded) = load_model(&a.model)?;
    if e.n_trees() == 0 {
        return Err(CliError::Data("model has no trees".into()));
    }

    // Training rows are needed to resolve --row and to measure agreement of
    // the pruned prefix; inline instances can do without them.
    let train = match (a.row.is_some(), specs.is_empty()) {
        (true, _) => Some(training_split(embedded.as_ref())?),
        (false, false) => training_split(embedded.as_ref()).ok(),
        (false, true) => None,
    };
    let inst = resolve_instance(a, &e, train.as_ref())?;

    let mut notes = Vec::new();
    let mut reports = Vec::new();
    for spec in &specs {
        match *spec {
            PruneSpec::AlphaMass { mass_fraction } => {
                reports.push(select_kprime_alpha_mass(&e, mass_fraction).map_err(prune_error)?)
            }
            PruneSpec::Trajectory { window, rel_tol } => match inst.training_index {
                Some(i) if !e.trajectories().is_empty() => {
                    reports.push(select_kprime_trajectory(&e, i, window, rel_tol).map_err(prune_error)?)
                }
                Some(_) => notes.push("trajectory pruning skipped: model stores no trajectories".to_string()),
                None => notes.push("trajectory pruning skipped: instance is not a training row".to_string()),
            },
        }
    }
    let pruning = if reports.is_empty() {
        None
    } else {
        let report = combine(&e, reports).map_err(prune_error)?;
        Some(match &train {
            Some(t) => report.with_agreement(&e, t.rows()).map_err(prune_error)?,
            None => {
                notes.push("agreement rate not computed: training data unavailable".to_string());
                report
            }
        })
    };

    let cfg = explain_config(&a.tweak, pruning.as_ref().map(|p| p.k_prime));
    let explainer = Explainer::new(&e, cfg).map_err(tweak_error)?;
    let request = ExplainRequest {
        target: None,
        label: if a.allow_misclassified { None } else { inst.label },
    };
    let outcome = explainer.explain(&inst.values, request).map_err(tweak_error)?;
    let mut record = outcome.to_record(&cfg);
    if let Some(label) = inst.label {
        if label != record.prediction {
            record.diagnostics.push(format!("instance is misclassified (label {label})"));
        }
    }

    let run_config = json!({
        "command": "explain",
        "model": a.model,
        "row": a.row,
        "instance": a.instance.as_ref().map(|_| &inst.values),
        "epsilon": cfg.epsilon,
        "norm": cfg.norm,
        "prune": specs,
        "threads": cfg.threads,
        "allow_misclassified": a.allow_misclassified,
        "out": a.out,
    });
    let doc = ExplainDocument {
        version: MODEL_VERSION,
        run_config,
        pruning,
        pruning_notes: notes,
        explanation: record,
        training: embedded.as_ref(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("explanation serializes");
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn report_config(command: &str, model: &Path, out: Option<&Path>, embedded: Option<&Value>) -> Value {
    json!({ "command": command, "model": model, "out": out, "training": embedded })
}

pub fn report_alphas(a: &ReportAlphasArgs) -> Result<(), CliError> {
    let (e, embedded) = load_model(&a.model)?;
    let mut text = csv_preamble(&report_config("report-alphas", &a.model, a.out.as_deref(), embedded.as_ref()));
    text.push_str("k,alpha_k,cumulative_mass\n");
    for (k, (alpha, mass)) in e.alphas().iter().zip(cumulative_mass(&e)).enumerate() {
        writeln!(text, "{},{alpha},{mass}", k + 1).unwrap();
    }
    emit(a.out.as_deref(), &text)
}

pub fn report_trajectories(a: &ReportTrajectoriesArgs) -> Result<(), CliError> {
    let (e, embedded) = load_model(&a.model)?;
    if e.trajectories().is_empty() {
        return Err(CliError::Data("model stores no sample-weight trajectories".into()));
    }
    let n = e.n_training();
    let mut wanted: Vec<(usize, &str)> = Vec::new();
    for &r in &a.rows {
        let i = usize::try_from(r).ok().filter(|&i| i < n).ok_or_else(|| {
            CliError::Data(format!(
                "row {r} is not a training instance; weights are recorded only for the {n} training rows"
            ))
        })?;
        wanted.push((i, "requested"));
    }
    let train = if a.pair { Some(training_split(embedded.as_ref())?) } else { None };
    if let Some(t) = &train {
        let correct = |i: &usize| e.predict(&t.rows()[*i]) == t.labels()[*i];
        match (0..t.len()).find(correct) {
            Some(i) => wanted.push((i, "correct")),
            None => eprintln!("warning: no correctly classified training row"),
        }
        match (0..t.len()).find(|i| !correct(i)) {
            Some(i) => wanted.push((i, "incorrect")),
            None => eprintln!("warning: no misclassified training row"),
        }
    }

    std::fs::create_dir_all(&a.out_dir)
        .map_err(|err| CliError::Data(format!("cannot create {}: {err}", a.out_dir.display())))?;
    let preamble = csv_preamble(&json!({
        "command": "report-trajectories",
        "model": a.model,
        "rows": a.rows,
        "pair": a.pair,
        "out_dir": a.out_dir,
        "training": embedded,
    }));
    for (i, role) in wanted {
        let traj = e.weight_trajectory(i).map_err(|err| CliError::Data(err.to_string()))?;
        let mut text = preamble.clone();
        writeln!(text, "# row: {i}\n# role: {role}").unwrap();
        if let Some(t) = &train {
            writeln!(text, "# label: {}\n# prediction: {}", t.labels()[i], e.predict(&t.rows()[i])).unwrap();
        }
        text.push_str("k,w_k\n");
        for (k, w) in traj.iter().enumerate() {
            writeln!(text, "{k},{w}").unwrap();
        }
        let path = a.out_dir.join(format!("trajectory_{i}.csv"));
        write_atomic(&path, text.as_bytes())?;
        println!("{role} row {i} -> {}", path.display());
    }
    Ok(())
}

fn fmt_dist(d: Option<f64>) -> String {
    d.map_or_else(|| "-".to_string(), |d| format!("{d:.6}"))
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    check_epsilon(&a.tweak)?;
    let (e, embedded) = load_model(&a.model)?;
    if e.n_trees() == 0 {
        return Err(CliError::Data("model has no trees".into()));
    }
    let train = training_split(embedded.as_ref())?;
    let cfg = explain_config(&a.tweak, None);
    let explainer = Explainer::new(&e, cfg).map_err(tweak_error)?;
    let slack = grid_slack(explainer.epsilons(), explainer.stats(), cfg.norm);
    let n = (a.rows as usize).min(train.len());

    let mut table = csv_preamble(&json!({
        "command": "verify",
        "model": a.model,
        "rows": a.rows,
        "steps": a.steps,
        "epsilon": cfg.epsilon,
        "norm": cfg.norm,
        "threads": cfg.threads,
        "out": a.out,
        "training": embedded,
    }));
    writeln!(table, "# grid slack: {slack}").unwrap();
    table.push_str("row,prediction,explain_distance,oracle_distance,agree,sound\n");
    let (mut solvable, mut agreed, mut violations, mut oracle_better) = (0, 0, 0, 0);
    let mut notes = Vec::new();
    for i in 0..n {
        let x = &train.rows()[i];
        let found = explainer.explain(x, ExplainRequest::default()).map_err(tweak_error)?;
        let grid = oracle_grid(&e, x, explainer.epsilons(), a.steps as usize);
        let oracle = brute_force_oracle(&e, x, &grid, explainer.stats(), cfg.norm).map_err(|err| match err {
            TweakError::GridTooLarge { .. } => CliError::Data(format!(
                "{err}; the oracle is meant for small models (try fewer features, trees or --steps)"
            )),
            other => tweak_error(other),
        })?;
        let s = e.predict(x);
        let sound = found.counterfactual().is_none_or(|c| e.predict(&c.transformed) != s)
            && oracle.counterfactual().is_none_or(|c| e.predict(&c.transformed) != s);
        if !sound {
            violations += 1;
        }
        let (de, dor) = (found.distance(), oracle.distance());
        let agree = match (de, dor) {
            (None, None) => "n/a",
            (Some(d), Some(o)) => {
                solvable += 1;
                if o < d - slack {
                    oracle_better += 1;
                    notes.push(format!(
                        "row {i}: oracle {o:.6} < explain {d:.6}; the oracle point flips the ensemble through a \
                         combination of trees that no single path tweak reaches"
                    ));
                }
                if (d - o).abs() <= slack {
                    agreed += 1;
                    "yes"
                } else {
                    "no"
                }
            }
            (None, Some(o)) => {
                solvable += 1;
                notes.push(format!(
                    "row {i}: explain found nothing, oracle found {o:.6}; no single path tweak flips the ensemble"
                ));
                "no"
            }
            (Some(d), None) => {
                solvable += 1;
                notes.push(format!("row {i}: explain found {d:.6} but the oracle grid missed it"));
                "no"
            }
        };
        writeln!(table, "{i},{s},{},{},{agree},{}", fmt_dist(de), fmt_dist(dor), if sound { "yes" } else { "NO" })
            .unwrap();
    }
    for note in &notes {
        writeln!(table, "# {note}").unwrap();
    }
    writeln!(
        table,
        "# summary: {n} instances, {solvable} solvable, {agreed} agree within slack, {oracle_better} oracle strictly \
         better, {violations} soundness violations"
    )
    .unwrap();
    emit(a.out.as_deref(), &table)?;
    if violations > 0 {
        return Err(CliError::Soundness(format!("{violations} counterfactuals failed to flip the prediction")));
    }
    Ok(())
}
