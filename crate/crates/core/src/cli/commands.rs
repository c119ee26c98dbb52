use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::*;
use crate::audit::{audit_audio_dir, AuditBins, AuditReport, VadConfig};
use crate::calibration::{fit_beta, fit_logreg, CalibrationModel, ScoreScaling, TrainConfig};
use crate::error::Result;
use crate::fusion::{grid_search_weight, linear_fuse, lse_fuse, LinearFusionSpec, LsePolicy, SweepReport, WeightGrid};
use crate::io::{
    join_scores_metadata, parse_cm_scores, parse_metadata, read_text, write_cm_scores, write_metadata, write_report,
    write_sasv_trials, Report, SasvTrialSet, ScoreRecord, TrialClass,
};
use crate::metrics::{
    grouped_eval, grouped_eval_sasv, BinaryScores, CmMetric, CostModel, MetricReport, ProfileSet, TeerGrid,
};
use crate::synth::{synth_cm, synth_sasv, SynthConfig, SynthManifest};

pub(super) fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Audit(a) => audit(a),
        Command::EvalCm(a) => eval_cm(a),
        Command::EvalSasv(a) => eval_sasv(a),
        Command::Calibrate(CalibrateCommand::Fit(a)) => calibrate_fit(a),
        Command::Calibrate(CalibrateCommand::Apply(a)) => calibrate_apply(a),
        Command::Fuse(FuseCommand::Linear(a)) => fuse_linear(a),
        Command::Fuse(FuseCommand::Lse(a)) => fuse_lse(a),
        Command::Sweep(a) => sweep(a),
        Command::Synth(a) => synth(a),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| Error::File { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_report<R: Report>(report: &R, output: &OutputArgs) -> Result<()> {
    emit(output.out.as_deref(), &write_report(report, output.format)?)
}

/// Fails before any computation when an input path does not exist.
fn require_files<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Error::File {
                path: p.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
            });
        }
    }
    Ok(())
}

fn resolve_cost(args: &CostArgs) -> Result<CostModel> {
    let mut cm = match CostModel::profile(&args.profile) {
        Some(cm) => cm,
        None => {
            let (path, member) = match args.profile.rsplit_once('#') {
                Some((p, m)) => (p, Some(m)),
                None => (args.profile.as_str(), None),
            };
            if !Path::new(path).is_file() {
                return Err(Error::invalid(format!("`{}` is neither a built-in profile nor a file", args.profile)));
            }
            let text = read_text(path)?;
            match member {
                Some(name) => ProfileSet::from_json(&text)?
                    .get(name)
                    .ok_or_else(|| Error::invalid(format!("profile `{name}` not found in {path}")))?,
                None => match serde_json::from_str::<CostModel>(&text) {
                    Ok(cm) => cm,
                    Err(_) => {
                        let set = ProfileSet::from_json(&text)?;
                        let mut it = set.profiles.into_values();
                        match (it.next(), it.next()) {
                            (Some(cm), None) => cm,
                            _ => {
                                return Err(Error::invalid(format!(
                                    "{path} holds several profiles; pick one with `#name`"
                                )))
                            }
                        }
                    }
                },
            }
        }
    };
    let overrides = [
        (args.c_miss, &mut cm.c_miss),
        (args.c_fa, &mut cm.c_fa),
        (args.c_fa_spoof, &mut cm.c_fa_spoof),
        (args.pi_target, &mut cm.pi_target),
        (args.pi_nontarget, &mut cm.pi_nontarget),
        (args.pi_spoof, &mut cm.pi_spoof),
    ];
    for (value, field) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    cm.validate()?;
    Ok(cm)
}

fn audit(a: AuditArgs) -> Result<()> {
    require_files([&a.meta].into_iter().chain(&a.audio).chain(&a.quality))?;
    let meta = parse_metadata(&read_text(&a.meta)?)?;
    let bins = AuditBins::default();
    let mut report = AuditReport::from_metadata(&meta);
    if let Some(dir) = &a.audio {
        let cfg = VadConfig { threshold_db: a.vad_threshold_db, hangover_frames: a.hangover, ..VadConfig::default() };
        let (facts, missing) = audit_audio_dir(dir, &meta, &cfg)?;
        if !missing.is_empty() {
            eprintln!("sasvkit: {} metadata row(s) have no audio file", missing.len());
        }
        report = report.with_audio(&facts, &meta, missing.len(), &bins)?;
    }
    if let Some(q) = &a.quality {
        report = report.with_quality(&parse_cm_scores(&read_text(q)?)?, &meta, &bins)?;
    }
    emit_report(&report, &a.output)
}

fn eval_cm(a: EvalCmArgs) -> Result<()> {
    require_files([&a.scores, &a.meta])?;
    let metric: CmMetric = a.metric.parse()?;
    let cm = resolve_cost(&a.cost)?;
    let scores = parse_cm_scores(&read_text(&a.scores)?)?;
    let meta = parse_metadata(&read_text(&a.meta)?)?;
    let set = join_scores_metadata(&scores, &meta)?;
    let report = MetricReport::binary(&set.binary()?, &cm)?;
    if a.output.out.is_some() {
        eprintln!("{}", report.summary());
    }
    emit_report(&report, &a.output)?;
    if let Some(by) = a.by {
        let table = grouped_eval(&set, by, metric, &cm)?;
        emit(a.breakdown.as_deref(), &write_report(&table, a.output.format)?)?;
    }
    Ok(())
}

fn eval_sasv(a: EvalSasvArgs) -> Result<()> {
    require_files([&a.trials].into_iter().chain(&a.meta))?;
    let cm = resolve_cost(&a.cost)?;
    let policy = LsePolicy::new(a.p)?;
    let trials = SasvTrialSet::parse(&read_text(&a.trials)?)?;
    let (fused, paired) = if trials.has_paired_scores() {
        (trials.fused(policy)?, Some(trials.paired()?))
    } else {
        (trials.single_scores()?, None)
    };
    let report = MetricReport::sasv(&fused, paired.as_ref(), &cm, TeerGrid { points: a.teer_grid })?;
    for w in &report.warnings {
        eprintln!("sasvkit: warning: {w}");
    }
    emit_report(&report, &a.output)?;
    if let Some(by) = a.by {
        let meta_path = a.meta.as_ref().ok_or_else(|| Error::invalid("--by needs --meta"))?;
        let meta = parse_metadata(&read_text(meta_path)?)?;
        let asv_column = trials.trials.iter().all(|t| t.asv_score.is_some());
        // every trial carries the scores read above
        let per_trial: Vec<f64> = trials
            .trials
            .iter()
            .map(|t| {
                let s = if paired.is_some() {
                    t.asv_score.zip(t.cm_score).map(|(asv, c)| lse_fuse(c, asv, policy))
                } else if asv_column {
                    t.asv_score
                } else {
                    t.cm_score
                };
                s.unwrap_or(f64::NAN)
            })
            .collect();
        let table = grouped_eval_sasv(&trials, &per_trial, &meta, by, &cm)?;
        emit(a.breakdown.as_deref(), &write_report(&table, a.output.format)?)?;
    }
    Ok(())
}

fn column_is_asv(column: &str) -> Result<bool> {
    match column {
        "asv" => Ok(true),
        "cm" => Ok(false),
        other => Err(Error::invalid(format!("unknown column `{other}`, expected asv or cm"))),
    }
}

fn load_training_scores(src: &ScoreSource) -> Result<BinaryScores> {
    match (&src.trials, &src.scores, &src.meta) {
        (Some(t), _, _) => {
            require_files([t])?;
            let trials = SasvTrialSet::parse(&read_text(t)?)?;
            if column_is_asv(&src.column)? {
                trials.asv_binary()
            } else {
                trials.cm_binary()
            }
        }
        (None, Some(s), Some(m)) => {
            require_files([s, m])?;
            let scores = parse_cm_scores(&read_text(s)?)?;
            let meta = parse_metadata(&read_text(m)?)?;
            join_scores_metadata(&scores, &meta)?.binary()
        }
        _ => Err(Error::invalid("give --scores with --meta, or --trials")),
    }
}

fn calibrate_fit(a: FitArgs) -> Result<()> {
    let data = load_training_scores(&a.source)?;
    let (pos, neg) = (data.pos(), data.neg());
    let mut tc = match a.prior.as_str() {
        "empirical" => TrainConfig::empirical_prior(pos.len(), neg.len()),
        p => TrainConfig {
            effective_prior: p.parse().map_err(|_| Error::invalid(format!("bad prior `{p}`")))?,
            ..TrainConfig::default()
        },
    };
    tc.max_iters = a.max_iters;
    let model = match a.kind.as_str() {
        "logreg" => fit_logreg(pos, neg, &tc)?,
        "beta" => fit_beta(pos, neg, ScoreScaling::new(a.scaling.parse()?, ScoreScaling::default().epsilon)?, &tc)?,
        other => return Err(Error::invalid(format!("unknown model kind `{other}`"))),
    };
    emit(a.out.as_deref(), model.to_json().as_bytes())
}

fn calibrate_apply(a: ApplyArgs) -> Result<()> {
    require_files([&a.model].into_iter().chain(&a.scores).chain(&a.trials))?;
    let model = CalibrationModel::from_json(&read_text(&a.model)?)?;
    let text = match (&a.scores, &a.trials) {
        (Some(s), _) => {
            let scores = parse_cm_scores(&read_text(s)?)?;
            let llrs: Vec<ScoreRecord> =
                scores.into_iter().map(|r| ScoreRecord::new(r.utt_id, model.apply(r.score))).collect();
            write_cm_scores(&llrs)
        }
        (None, Some(t)) => {
            let asv = column_is_asv(&a.column)?;
            let mut trials = SasvTrialSet::parse(&read_text(t)?)?;
            for tr in &mut trials.trials {
                let col = if asv { &mut tr.asv_score } else { &mut tr.cm_score };
                *col = col.map(|s| model.apply(s));
            }
            write_sasv_trials(&trials.trials)
        }
        (None, None) => return Err(Error::invalid("give --scores or --trials")),
    };
    emit(a.out.as_deref(), text.as_bytes())
}

/// Keys present in some but not all files; first-file order, then the rest.
fn key_mismatch(files: &[Vec<ScoreRecord>]) -> Vec<String> {
    let sets: Vec<BTreeSet<&str>> = files.iter().map(|f| f.iter().map(|r| r.utt_id.as_str()).collect()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in files {
        for r in f {
            let k = r.utt_id.as_str();
            if sets.iter().any(|s| !s.contains(k)) && seen.insert(k) {
                out.push(k.to_string());
            }
        }
    }
    out
}

fn load_aligned(paths: &[PathBuf]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    require_files(paths)?;
    let files = paths.iter().map(|p| parse_cm_scores(&read_text(p)?)).collect::<Result<Vec<_>>>()?;
    let bad = key_mismatch(&files);
    if !bad.is_empty() {
        return Err(Error::KeyMismatch { keys: bad });
    }
    let keys: Vec<String> = files[0].iter().map(|r| r.utt_id.clone()).collect();
    let columns = files
        .iter()
        .map(|f| {
            let idx: HashMap<&str, f64> = f.iter().map(|r| (r.utt_id.as_str(), r.score)).collect();
            keys.iter().map(|k| idx[k.as_str()]).collect()
        })
        .collect();
    Ok((keys, columns))
}

fn fuse_linear(a: LinearArgs) -> Result<()> {
    let spec = match &a.weights {
        Some(w) => LinearFusionSpec::new(
            w.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad weight `{x}`"))))
                .collect::<Result<_>>()?,
        )?,
        None => LinearFusionSpec::equal(a.scores.len())?,
    };
    if spec.weights().len() != a.scores.len() {
        return Err(Error::invalid(format!("{} weights for {} score files", spec.weights().len(), a.scores.len())));
    }
    let (keys, columns) = load_aligned(&a.scores)?;
    let fused = keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
            linear_fuse(&row, &spec).map(|s| ScoreRecord::new(k, s))
        })
        .collect::<Result<Vec<_>>>()?;
    emit(a.out.as_deref(), write_cm_scores(&fused).as_bytes())
}

fn fuse_lse(a: LseArgs) -> Result<()> {
    let policy = LsePolicy::new(a.p)?;
    let text = match (&a.cm, &a.asv, &a.trials) {
        (Some(cm), Some(asv), None) => {
            let (keys, columns) = load_aligned(&[cm.clone(), asv.clone()])?;
            let fused: Vec<ScoreRecord> = keys
                .into_iter()
                .enumerate()
                .map(|(i, k)| ScoreRecord::new(k, lse_fuse(columns[0][i], columns[1][i], policy)))
                .collect();
            write_cm_scores(&fused)
        }
        (None, None, Some(t)) => {
            require_files([t])?;
            let mut trials = SasvTrialSet::parse(&read_text(t)?)?;
            if !trials.has_paired_scores() {
                return Err(Error::invalid("LSE fusion of a trial file needs both score columns on every trial"));
            }
            // fused score goes to the ASV column, read back as a single-score file
            for tr in &mut trials.trials {
                if let (Some(asv), Some(c)) = (tr.asv_score, tr.cm_score) {
                    tr.asv_score = Some(lse_fuse(c, asv, policy));
                    tr.cm_score = None;
                }
            }
            write_sasv_trials(&trials.trials)
        }
        _ => return Err(Error::invalid("give --cm with --asv, or --trials")),
    };
    emit(a.out.as_deref(), text.as_bytes())
}

fn sweep(a: SweepArgs) -> Result<()> {
    require_files([&a.trials])?;
    let cm = resolve_cost(&a.cost)?;
    let points = WeightGrid::parse(&a.grid)?.points()?;
    let trials = SasvTrialSet::parse(&read_text(&a.trials)?)?;
    for class in [TrialClass::Target, TrialClass::Nontarget, TrialClass::Spoof] {
        if trials.class_count(class) == 0 {
            return Err(Error::EmptyClass(class.token().to_string()));
        }
    }
    if !trials.has_paired_scores() {
        return Err(Error::invalid("sweep needs paired asv and cm scores on every trial"));
    }
    let result = grid_search_weight(&trials.paired()?, &cm, &points)?;
    emit_report(&SweepReport::new("min_a_dcf", &result), &a.output)
}

fn synth(a: SynthArgs) -> Result<()> {
    let cfg = SynthConfig { seed: a.seed, n: a.n, mu_pos: a.mu_pos, mu_neg: a.mu_neg, sigma: a.sigma };
    cfg.validate()?;
    fs::create_dir_all(&a.out).map_err(|source| Error::File { path: a.out.clone(), source })?;
    let (scores, meta) = synth_cm(&cfg)?;
    let trials = synth_sasv(&cfg)?;
    let files = [
        ("cm_scores.txt", write_cm_scores(&scores)),
        ("metadata.tsv", write_metadata(&meta)),
        ("sasv_trials.tsv", write_sasv_trials(&trials)),
    ];
    for (name, text) in &files {
        emit(Some(&a.out.join(name)), text.as_bytes())?;
    }
    let names = files.iter().map(|(n, _)| n.to_string()).collect();
    let manifest = SynthManifest::new(&cfg, names);
    emit(Some(&a.out.join("manifest.json")), &write_report(&manifest, ReportFormat::Json)?)
}
