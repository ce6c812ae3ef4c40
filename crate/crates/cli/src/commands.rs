use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lfqa_core::eval::{run_protocol, FeatureRecord, FeatureTable, Polarity};
use lfqa_core::io::{load_lightfield, LoadOptions};
use lfqa_core::svr::{grid_search, svr_train, SvrModel};
use lfqa_core::synth::build_benchmark;
use lfqa_core::{extract_features, gdd, wlbp, RunConfig};
use rayon::prelude::*;

use crate::inputs::discover;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn read_table(path: &Path) -> Result<FeatureTable> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    FeatureTable::read_csv(f).with_context(|| format!("reading {}", path.display()))
}

pub fn extract(
    cfg: &RunConfig,
    input: &Path,
    pattern: &str,
    opts: LoadOptions,
    out: &Path,
) -> Result<()> {
    let items = discover(input)?;
    if items.is_empty() {
        bail!("no light fields found under {}", input.display());
    }
    let results: Vec<Result<_>> = items
        .par_iter()
        .map(|item| {
            let start = Instant::now();
            let lf = load_lightfield(&item.dir, pattern, opts)
                .with_context(|| format!("item {}: loading {}", item.id, item.dir.display()))?;
            let fv = extract_features(&lf, &cfg.features)
                .with_context(|| format!("item {}: feature extraction", item.id))?;
            eprintln!("extract {}: {:.3} s", item.id, start.elapsed().as_secs_f64());
            Ok(fv)
        })
        .collect();
    let mut layout: Option<Vec<String>> = None;
    let mut records = Vec::with_capacity(items.len());
    for (item, res) in items.iter().zip(results) {
        let fv = res?;
        match &layout {
            None => layout = Some(fv.layout.names.clone()),
            Some(l) if *l != fv.layout.names => bail!(
                "item {}: feature layout differs from earlier items (view grid or size changed)",
                item.id
            ),
            Some(_) => {}
        }
        records.push(FeatureRecord {
            id: item.id.clone(),
            scene: item.scene.clone(),
            distortion: item.distortion.clone(),
            level: item.level,
            extra: vec![("score".to_string(), item.score)],
            features: fv.values,
        });
    }
    let table = FeatureTable {
        layout: layout.unwrap_or_default(),
        records,
    };
    table.write_csv(create(out)?)?;
    Ok(())
}

pub fn train(cfg: &RunConfig, features: &Path, column: &str, seed: u64, out: &Path) -> Result<()> {
    let table = read_table(features)?;
    let y = table.scores(column)?;
    let x: Vec<Vec<f64>> = table.records.iter().map(|r| r.features.clone()).collect();
    let best = grid_search(&x, &y, &cfg.svr, seed)?;
    eprintln!(
        "selected C = {}, gamma = {} (CV RMSE {})",
        best.params.c, best.params.gamma, best.cv_rmse
    );
    let model = svr_train(&x, &y, &best.params, table.layout.clone())?;
    let mut w = create(out)?;
    w.write_all(model.to_json()?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn predict(model: &Path, features: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let model = SvrModel::from_json(&text).with_context(|| format!("parsing {}", model.display()))?;
    let table = read_table(features)?;
    let mut w = csv::Writer::from_writer(create(out)?);
    w.write_record(["id", "score"])?;
    for r in &table.records {
        let p = model
            .predict_named(&table.layout, &r.features)
            .with_context(|| format!("item {}", r.id))?;
        w.write_record([r.id.clone(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn eval(
    cfg: &RunConfig,
    features: &Path,
    column: &str,
    polarity: Polarity,
    timing: bool,
    out: &Path,
) -> Result<()> {
    let ds = read_table(features)?.into_dataset(column, polarity)?;
    let start = Instant::now();
    let mut report = run_protocol(&ds, &cfg.protocol, &cfg.svr)?;
    if timing {
        report.elapsed_secs = Some(start.elapsed().as_secs_f64());
    }
    let m = report.median;
    eprintln!(
        "median over {} trials: SRCC {:.4}  LCC {:.4}  RMSE {:.4}  OR {:.4}",
        report.trials.len(),
        m.srcc,
        m.lcc,
        m.rmse,
        m.or
    );
    let mut w = create(out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn synth(cfg: &RunConfig, out: &Path) -> Result<()> {
    let bench = build_benchmark(&cfg.synth)?;
    bench.write(out)?;
    eprintln!("wrote {} items to {}", bench.items.len(), out.display());
    Ok(())
}

pub fn histdump(
    cfg: &RunConfig,
    input: &Path,
    pattern: &str,
    opts: LoadOptions,
    gdd_hist: bool,
    out: &Path,
) -> Result<()> {
    let lf = load_lightfield(input, pattern, opts)
        .with_context(|| format!("loading {}", input.display()))?;
    let mut w = csv::Writer::from_writer(create(out)?);
    if gdd_hist {
        w.write_record(["orientation", "bin", "start_deg", "mass"])?;
        for o in gdd::usable_orientations(&lf) {
            let h = gdd::mean_histogram(&lf, o)?;
            for (b, m) in h.mass().iter().enumerate() {
                w.write_record([
                    o.short_name().to_string(),
                    b.to_string(),
                    gdd::DirectionHistogram::bin_start(b).to_string(),
                    m.to_string(),
                ])?;
            }
        }
    } else {
        w.write_record(["orientation", "radius", "points", "bin", "mass"])?;
        for (o, rung, h) in wlbp::wlbp_histograms(&lf, &cfg.features.lbp)? {
            for (b, m) in h.bins.iter().enumerate() {
                w.write_record([
                    o.short_name().to_string(),
                    rung.radius.to_string(),
                    rung.points.to_string(),
                    b.to_string(),
                    m.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
