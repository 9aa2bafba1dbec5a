//! The pipeline stages. Each stage owns one directory under the output root,
//! writes its artifacts there and finishes with a manifest. A stage whose
//! parameters, inputs and outputs all match its manifest is skipped.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use polymm_core::depict::{depict, write_images, Style};
use polymm_core::descriptors::{compute_all, DescriptorVector};
use polymm_core::psmiles::parse;
use polymm_data::dataset::{
    ingest_csv, merge_sequential, missing_stats, read_table, split, write_rejects, write_table, PolymerRecord,
    SplitManifest,
};
use polymm_data::instructgen::{decompose, emit_jsonl, render, SplitTag, TemplateBank};
use polymm_data::metrics::{evaluate, EvalReport, MetricError, PolymerPrediction};
use polymm_data::Property;
use polymm_learn::baselines::{
    build_task, evaluate_group, train, write_checkpoint, BaselineModel, ModelKind, PredictionRow,
};
use polymm_learn::lora::{param_count, toy_finetune, write_adapter, ToyConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::PipelineConfig;
use crate::manifest::{digest_inputs, digest_outputs, is_current, read_manifest, write_manifest, Manifest, StageInput};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ran,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub status: StageStatus,
    pub summary: Value,
}

pub struct Pipeline {
    pub config: PipelineConfig,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

pub fn load_table(path: &Path) -> Result<Vec<PolymerRecord>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_table(BufReader::new(file), &path.display().to_string())?)
}

fn save_table(path: &Path, table: &[PolymerRecord]) -> Result<(), CliError> {
    write_table(create(path)?, table).map_err(csv_err(path))
}

/// Descriptor rows keyed by canonical P-SMILES.
pub fn load_descriptors(path: &Path) -> Result<HashMap<String, DescriptorVector>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(csv_err(path))?;
        let cells: Vec<&str> = row.iter().skip(1).collect();
        let v = DescriptorVector::from_csv_cells(&cells)
            .ok_or_else(|| CliError::Io(format!("{}: malformed descriptor row", path.display())))?;
        out.insert(row[0].to_string(), v);
    }
    Ok(out)
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    reader.deserialize().map(|r| r.map_err(csv_err(path))).collect()
}

/// Score predictions against truth records. Polymers absent from the
/// predictions are counted as unscored; a scored polymer must have a
/// prediction for every property it has a truth for.
pub fn score_predictions(
    predictions: &[PredictionRow],
    truth: &[PolymerRecord],
) -> Result<(EvalReport, usize), MetricError> {
    let mut by_key: HashMap<&str, BTreeMap<Property, f64>> = HashMap::new();
    for p in predictions {
        by_key.entry(p.key.as_str()).or_default().insert(p.property, p.value);
    }
    let mut rows = Vec::new();
    let mut unscored = 0;
    for r in truth.iter().filter(|r| !r.properties.is_empty()) {
        let Some(preds) = by_key.get(r.canonical_psmiles.as_str()) else {
            unscored += 1;
            continue;
        };
        let mut row = PolymerPrediction { key: r.canonical_psmiles.clone(), ..Default::default() };
        for (&p, &t) in &r.properties {
            let &y = preds
                .get(&p)
                .ok_or_else(|| MetricError::MissingPrediction { key: r.canonical_psmiles.clone(), property: p })?;
            row.truths.insert(p, t);
            row.preds.insert(p, y);
        }
        rows.push(row);
    }
    Ok((evaluate(&rows)?, unscored))
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Pipeline {
        Pipeline { config }
    }

    pub fn root(&self) -> &Path {
        &self.config.output_dir
    }

    fn dir(&self, stage: &str) -> PathBuf {
        self.root().join(stage)
    }

    /// An input produced by an earlier stage, labelled relative to the root.
    fn internal(&self, rel: &str) -> StageInput {
        StageInput { label: rel.to_string(), path: self.root().join(rel) }
    }

    fn external(&self, path: &str) -> StageInput {
        StageInput { label: path.to_string(), path: self.config.resolve(path) }
    }

    fn run_stage(
        &self,
        stage: &str,
        params: Value,
        inputs: Vec<StageInput>,
        body: impl FnOnce(&Path) -> Result<Value, CliError>,
    ) -> Result<StageReport, CliError> {
        for i in &inputs {
            if !i.path.is_file() {
                return Err(CliError::StageInputMissing { stage: stage.into(), path: i.path.display().to_string() });
            }
        }
        let dir = self.dir(stage);
        let digests = digest_inputs(&inputs)?;
        if is_current(&dir, stage, &params, &digests) {
            let summary = read_manifest(&dir).map(|m| m.summary).unwrap_or(Value::Null);
            return Ok(StageReport { stage: stage.into(), status: StageStatus::Skipped, summary });
        }
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        }
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let summary = match body(&dir) {
            Ok(s) => s,
            Err(e) => {
                let _ = fs::remove_dir_all(&dir);
                return Err(e);
            }
        };
        let manifest = Manifest {
            stage: stage.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            params,
            inputs: digests,
            outputs: digest_outputs(&dir)?,
            summary: summary.clone(),
        };
        write_manifest(&dir, &manifest)?;
        Ok(StageReport { stage: stage.into(), status: StageStatus::Ran, summary })
    }

    fn ingest_files(&self) -> Vec<String> {
        self.config.sources.iter().enumerate().map(|(i, s)| format!("ingest/{i:02}-{}.csv", s.source.name())).collect()
    }

    pub fn ingest(&self) -> Result<StageReport, CliError> {
        let cfg = &self.config;
        if cfg.sources.is_empty() {
            return Err(CliError::Config("no sources configured".into()));
        }
        let inputs: Vec<StageInput> = cfg.sources.iter().map(|s| self.external(&s.path)).collect();
        let outputs = self.ingest_files();
        self.run_stage("ingest", json!({ "sources": cfg.sources }), inputs.clone(), |dir| {
            let mut summary = Vec::new();
            for ((s, input), out) in cfg.sources.iter().zip(&inputs).zip(&outputs) {
                let ingested = ingest_csv(&input.path, &s.schema())?;
                let name = Path::new(out).file_name().expect("file name");
                save_table(&dir.join(name), &ingested.records)?;
                let rejects = dir.join(name).with_extension("rejects.csv");
                write_rejects(create(&rejects)?, &ingested.rejects).map_err(csv_err(&rejects))?;
                // Advisory only: kept, but counted.
                let odd_wildcards = ingested
                    .records
                    .iter()
                    .filter(|r| parse(&r.canonical_psmiles).map_or(true, |g| !g.is_well_formed_polymer()))
                    .count();
                summary.push(json!({
                    "path": s.path,
                    "source": s.source,
                    "records": ingested.records.len(),
                    "rejects": ingested.rejects.len(),
                    "not_two_wildcards": odd_wildcards,
                }));
            }
            Ok(json!(summary))
        })
    }

    pub fn merge(&self) -> Result<StageReport, CliError> {
        let inputs: Vec<StageInput> = self.ingest_files().iter().map(|f| self.internal(f)).collect();
        if inputs.is_empty() {
            return Err(CliError::Config("no sources configured".into()));
        }
        self.run_stage("merge", json!({}), inputs.clone(), |dir| {
            let mut tables = inputs.iter().map(|i| load_table(&i.path)).collect::<Result<Vec<_>, _>>()?;
            let main = tables.remove(0);
            let outcome = merge_sequential(main, &tables);
            save_table(&dir.join("merged.csv"), &outcome.table)?;
            let path = dir.join("conflicts.csv");
            let mut w = csv_writer(&path)?;
            w.write_record(["psmiles", "property", "kept", "rejected"]).map_err(csv_err(&path))?;
            for c in &outcome.conflicts {
                w.write_record([c.key.clone(), c.property.name().into(), c.kept.to_string(), c.rejected.to_string()])
                    .map_err(csv_err(&path))?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            Ok(json!({
                "records": outcome.table.len(),
                "duplicates_removed": outcome.duplicates_removed,
                "conflicts": outcome.conflicts.len(),
            }))
        })
    }

    pub fn stats(&self) -> Result<StageReport, CliError> {
        let input = self.internal("merge/merged.csv");
        self.run_stage("stats", json!({}), vec![input.clone()], |dir| {
            let stats = missing_stats(&load_table(&input.path)?);
            write_json(&dir.join("stats.json"), &stats)?;
            Ok(serde_json::to_value(&stats).expect("serializable"))
        })
    }

    pub fn split(&self) -> Result<StageReport, CliError> {
        let cfg = &self.config;
        let input = self.internal("merge/merged.csv");
        let params = json!({ "ratio": cfg.split_ratio, "seed": cfg.seed });
        self.run_stage("split", params, vec![input.clone()], |dir| {
            let s = split(&load_table(&input.path)?, cfg.split_ratio, cfg.seed)?;
            write_json(&dir.join("split.json"), &s.manifest())?;
            save_table(&dir.join("train.csv"), &s.train)?;
            save_table(&dir.join("test.csv"), &s.test)?;
            Ok(json!({ "train": s.train.len(), "test": s.test.len() }))
        })
    }

    pub fn descriptors(&self) -> Result<StageReport, CliError> {
        let input = self.internal("merge/merged.csv");
        self.run_stage("descriptors", json!({}), vec![input.clone()], |dir| {
            let table = load_table(&input.path)?;
            let computed: Vec<(String, Result<DescriptorVector, String>)> = table
                .par_iter()
                .map(|r| {
                    let key = r.canonical_psmiles.clone();
                    let v = parse(&key).map(|g| compute_all(&g)).map_err(|e| e.to_string());
                    (key, v)
                })
                .collect();
            let path = dir.join("descriptors.csv");
            let mut w = csv_writer(&path)?;
            let mut header = vec!["psmiles"];
            header.extend(DescriptorVector::csv_header());
            w.write_record(&header).map_err(csv_err(&path))?;
            let epath = dir.join("errors.csv");
            let mut errors = csv_writer(&epath)?;
            errors.write_record(["psmiles", "descriptor", "error"]).map_err(csv_err(&epath))?;
            let mut complete = 0;
            for (key, v) in &computed {
                match v {
                    Ok(v) => {
                        let mut row = vec![key.clone()];
                        row.extend(v.csv_cells());
                        w.write_record(&row).map_err(csv_err(&path))?;
                        complete += usize::from(v.is_complete());
                        for (d, e) in v.errors() {
                            errors.write_record([key.as_str(), d.name(), &e.to_string()]).map_err(csv_err(&epath))?;
                        }
                    }
                    Err(e) => errors.write_record([key.as_str(), "", e]).map_err(csv_err(&epath))?,
                }
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            errors.flush().map_err(|e| CliError::io(&epath, e))?;
            Ok(json!({ "molecules": computed.len(), "complete": complete }))
        })
    }

    pub fn depict(&self) -> Result<StageReport, CliError> {
        let cfg = &self.config;
        let style = Style::with_overrides(&cfg.style);
        let input = self.internal("merge/merged.csv");
        let params = json!({ "img_size": cfg.img_size, "png": cfg.png, "style": style });
        self.run_stage("depict", params, vec![input.clone()], |dir| {
            let table = load_table(&input.path)?;
            let images = dir.join("images");
            let results: Vec<(String, Result<(String, bool), String>)> = table
                .par_iter()
                .map(|r| {
                    let key = r.canonical_psmiles.clone();
                    let out = depict(&key, cfg.img_size, &style)
                        .and_then(|d| {
                            write_images(&d, &images, cfg.img_size, cfg.png).map(|_| (d.stem(), d.has_overlaps()))
                        })
                        .map_err(|e| e.to_string());
                    (key, out)
                })
                .collect();
            let path = dir.join("index.csv");
            let mut w = csv_writer(&path)?;
            w.write_record(["psmiles", "stem", "overlaps"]).map_err(csv_err(&path))?;
            let fpath = dir.join("failures.csv");
            let mut failures = csv_writer(&fpath)?;
            failures.write_record(["psmiles", "error"]).map_err(csv_err(&fpath))?;
            let (mut ok, mut overlapping, mut failed) = (0, 0, 0);
            for (key, r) in &results {
                match r {
                    Ok((stem, overlaps)) => {
                        ok += 1;
                        overlapping += usize::from(*overlaps);
                        w.write_record([key.as_str(), stem, if *overlaps { "1" } else { "0" }])
                            .map_err(csv_err(&path))?;
                    }
                    Err(e) => {
                        failed += 1;
                        failures.write_record([key.as_str(), e]).map_err(csv_err(&fpath))?;
                    }
                }
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            failures.flush().map_err(|e| CliError::io(&fpath, e))?;
            Ok(json!({ "images": ok, "overlaps": overlapping, "failed": failed }))
        })
    }

    pub fn gen_instructions(&self) -> Result<StageReport, CliError> {
        let cfg = &self.config;
        let mut inputs = vec![
            self.internal("split/train.csv"),
            self.internal("split/test.csv"),
            self.internal("descriptors/descriptors.csv"),
            self.internal("depict/index.csv"),
        ];
        if let Some(t) = &cfg.templates {
            inputs.push(self.external(t));
        }
        let units = cfg.units();
        let ext = if cfg.png { "png" } else { "svg" };
        let params = json!({
            "seed": cfg.seed,
            "units": units,
            "templates": cfg.templates.as_deref().unwrap_or("builtin"),
            "image_format": ext,
        });
        self.run_stage("instructions", params, inputs.clone(), |dir| {
            let bank = match inputs.get(4) {
                Some(t) => TemplateBank::load(&t.path)?,
                None => TemplateBank::builtin(),
            };
            let descriptors = load_descriptors(&inputs[2].path)?;
            let mut stems = HashMap::new();
            let index = &inputs[3].path;
            let mut reader = csv::Reader::from_path(index).map_err(csv_err(index))?;
            for row in reader.records() {
                let row = row.map_err(csv_err(index))?;
                stems.insert(row[0].to_string(), row[1].to_string());
            }
            let spath = dir.join("skipped.csv");
            let mut skipped = csv_writer(&spath)?;
            skipped.write_record(["psmiles", "property", "split", "reason"]).map_err(csv_err(&spath))?;
            let mut counts = BTreeMap::new();
            let mut skipped_count = 0;
            for (tag, input, name) in [(SplitTag::Train, &inputs[0], "train"), (SplitTag::Test, &inputs[1], "test")] {
                let mut pairs = Vec::new();
                for sample in decompose(&load_table(&input.path)?, tag) {
                    let key = &sample.canonical_psmiles;
                    let reason = match (descriptors.get(key), stems.get(key)) {
                        (None, _) => Some("no descriptor row".to_string()),
                        (_, None) => Some("no image".to_string()),
                        (Some(d), Some(stem)) => {
                            let image = format!("depict/images/{stem}.{ext}");
                            match render(&sample, d, &image, &bank, &units, cfg.seed) {
                                Ok(pair) => {
                                    pairs.push(pair);
                                    None
                                }
                                Err(e) => Some(e.to_string()),
                            }
                        }
                    };
                    if let Some(reason) = reason {
                        skipped_count += 1;
                        skipped
                            .write_record([key.as_str(), sample.property.name(), name, &reason])
                            .map_err(csv_err(&spath))?;
                    }
                }
                emit_jsonl(&pairs, &dir.join(format!("{name}.jsonl")))?;
                counts.insert(name, pairs.len());
            }
            skipped.flush().map_err(|e| CliError::io(&spath, e))?;
            Ok(json!({ "train": counts["train"], "test": counts["test"], "skipped": skipped_count }))
        })
    }

    /// Train one model per property on the training side of `split_manifest`
    /// (the split stage's manifest when `None`) and score the test side.
    pub fn baseline(&self, kind: ModelKind, split_manifest: Option<&str>) -> Result<StageReport, CliError> {
        let cfg = &self.config;
        let split_input = match split_manifest {
            Some(p) => self.external(p),
            None => self.internal("split/split.json"),
        };
        let inputs = vec![self.internal("merge/merged.csv"), split_input, self.internal("descriptors/descriptors.csv")];
        let mut params = json!({ "model": kind });
        if kind == ModelKind::Mlp {
            params["mlp"] = json!(cfg.mlp);
        }
        let stage = format!("baseline-{}", kind.name());
        self.run_stage(&stage, params, inputs.clone(), |dir| {
            let table = load_table(&inputs[0].path)?;
            let manifest: SplitManifest = read_json(&inputs[1].path)?;
            let data = manifest.apply(&table)?;
            let descriptors = load_descriptors(&inputs[2].path)?;
            let trained: Vec<(Property, Option<BaselineModel>)> = Property::ALL
                .par_iter()
                .map(|&p| {
                    let task = build_task(&data.train, &descriptors, p);
                    if task.y.is_empty() {
                        return Ok((p, None));
                    }
                    train(&task, kind, &cfg.mlp).map(|m| (p, Some(m)))
                })
                .collect::<Result<_, _>>()?;
            let models: BTreeMap<Property, BaselineModel> =
                trained.into_iter().filter_map(|(p, m)| m.map(|m| (p, m))).collect();
            for (p, m) in &models {
                let path = dir.join(format!("{}.pmmb", p.name()));
                fs::write(&path, write_checkpoint(m)).map_err(|e| CliError::io(&path, e))?;
            }
            let (report, predictions, skipped) = evaluate_group(&data.test, &descriptors, &models)?;
            let path = dir.join("predictions.csv");
            let mut w = csv_writer(&path)?;
            for row in &predictions {
                w.serialize(row).map_err(csv_err(&path))?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            write_json(&dir.join("report.json"), &report)?;
            let rows: BTreeMap<&str, usize> = models.iter().map(|(p, m)| (p.name(), m.train_rows)).collect();
            Ok(json!({ "train_rows": rows, "wmae": report.overall.wmae, "skipped_test_polymers": skipped }))
        })
    }

    /// Score prediction files against truth tables. Each job is
    /// (report name, predictions, truth).
    pub fn evaluate(&self, jobs: &[(String, StageInput, StageInput)]) -> Result<StageReport, CliError> {
        let inputs: Vec<StageInput> = jobs.iter().flat_map(|(_, p, t)| [p.clone(), t.clone()]).collect();
        let names: Vec<&str> = jobs.iter().map(|(n, _, _)| n.as_str()).collect();
        self.run_stage("evaluate", json!({ "reports": names }), inputs, |dir| {
            let mut summary = BTreeMap::new();
            for (name, preds, truth) in jobs {
                let (report, unscored) = score_predictions(&load_predictions(&preds.path)?, &load_table(&truth.path)?)?;
                write_json(
                    &dir.join(format!("{name}.json")),
                    &json!({ "report": report, "unscored_polymers": unscored }),
                )?;
                summary.insert(name.clone(), json!({ "wmae": report.overall.wmae, "unscored_polymers": unscored }));
            }
            Ok(json!(summary))
        })
    }

    /// Evaluation jobs for every configured baseline.
    pub fn baseline_eval_jobs(&self) -> Vec<(String, StageInput, StageInput)> {
        self.config
            .models
            .iter()
            .map(|k| {
                (
                    k.name().to_string(),
                    self.internal(&format!("baseline-{}/predictions.csv", k.name())),
                    self.internal("split/test.csv"),
                )
            })
            .collect()
    }

    pub fn file_input(&self, path: &str) -> StageInput {
        self.external(path)
    }

    pub fn lora_demo(&self, config: &ToyConfig) -> Result<StageReport, CliError> {
        self.run_stage("lora", json!(config), vec![], |dir| {
            let (block, trace) = toy_finetune(config)?;
            for (name, ad) in [("query.pmla", &block.query), ("value.pmla", &block.value)] {
                let path = dir.join(name);
                fs::write(&path, write_adapter(ad)).map_err(|e| CliError::io(&path, e))?;
            }
            write_json(&dir.join("trace.json"), &trace)?;
            let large = param_count(4096, 4096, config.rank)?;
            Ok(json!({
                "initial_loss": trace.initial(),
                "final_loss": trace.last(),
                "loss_ratio": trace.last() / trace.initial(),
                "frozen_unchanged": trace.frozen_sha256_before == trace.frozen_sha256_after,
                "trainable_params": trace.trainable_params,
                "frozen_params": trace.frozen_params,
                "params_4096x4096": { "trainable": large, "full": 4096 * 4096, "ratio": (4096.0 * 4096.0) / large as f64 },
            }))
        })
    }

    /// Every stage in order.
    pub fn run_all(&self) -> Result<Vec<StageReport>, CliError> {
        let mut reports = vec![
            self.ingest()?,
            self.merge()?,
            self.stats()?,
            self.split()?,
            self.descriptors()?,
            self.depict()?,
            self.gen_instructions()?,
        ];
        for &kind in &self.config.models {
            reports.push(self.baseline(kind, None)?);
        }
        if !self.config.models.is_empty() {
            reports.push(self.evaluate(&self.baseline_eval_jobs())?);
        }
        reports.push(self.lora_demo(&self.config.lora)?);
        Ok(reports)
    }
}

/// Write `reports` as one line per stage.
pub fn print_reports(out: &mut impl Write, reports: &[StageReport]) -> std::io::Result<()> {
    for r in reports {
        let status = match r.status {
            StageStatus::Ran => "ran",
            StageStatus::Skipped => "skipped (unchanged)",
        };
        writeln!(out, "{}: {status} {}", r.stage, r.summary)?;
    }
    Ok(())
}
