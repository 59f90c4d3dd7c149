//! plotminer: identify 2-D plot images and extract their data points.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use plotminer::anneal::{anneal, match_placements, AnnealConfig, Placement};
use plotminer::extract::{classify_image, extract_from_image, ExtractParams};
use plotminer::features::load_lexicon;
use plotminer::jsonfmt;
use plotminer::plotseg::TemplateLibrary;
use plotminer::raster::{binarize, load_image};
use plotminer::svm::{cross_validate, train, SvmModel, DEFAULT_EPOCHS};
use plotminer::synth::{
    eval_disambiguation, gen_classifier_corpus, gen_overlap_image, gen_plot_image, OverlapSpec,
    PlotSpec,
};

const TEMPLATES_ENV: &str = "PLOTMINER_TEMPLATES";

#[derive(Parser)]
#[command(
    name = "plotminer",
    version,
    about = "Identify 2-D plot images and extract their data points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify images as 2-D plots or not.
    Classify(ClassifyArgs),
    /// Run the full extraction pipeline on one image.
    Extract(ExtractArgs),
    /// Train the plot classifier from a JSON-lines corpus.
    Train(TrainArgs),
    /// Evaluate overlap disambiguation on a generated corpus.
    Eval(EvalArgs),
    /// Generate synthetic images, truth sidecars, or a feature corpus.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Resolve one overlap blob image into marker placements.
    Disambiguate(DisambiguateArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Template directory of <shape_id>.pgm masks (or $PLOTMINER_TEMPLATES;
    /// builtin shapes otherwise).
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Newline-separated caption keyword lexicon.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// JSON file with annealing and feature parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for all randomized behavior.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Flip ink polarity for light-on-dark inputs.
    #[arg(long)]
    invert: bool,
    /// Images to classify; captions pair by `<stem>.caption.txt` sidecars.
    #[arg(required = true)]
    images: Vec<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    model: PathBuf,
    /// Caption text file (defaults to the `<stem>.caption.txt` sidecar).
    #[arg(long)]
    caption: Option<PathBuf>,
    /// Flip ink polarity for light-on-dark inputs.
    #[arg(long)]
    invert: bool,
    /// Write region and component dumps (JSON) to this file.
    #[arg(long)]
    dump_segmentation: Option<PathBuf>,
    image: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// JSON-lines training corpus: {"features": [...], "label": 1|-1}.
    #[arg(long)]
    data: PathBuf,
    /// Where to store the trained model.
    #[arg(long)]
    out_model: PathBuf,
    /// Soft-margin C parameter.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    /// Cross-validation folds reported before the final fit.
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Also hold out this fraction (seeded split) and report train/test
    /// confusion matrices for it.
    #[arg(long)]
    holdout: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Number of generated overlap images.
    #[arg(long, default_value_t = 24)]
    images: usize,
    /// Shape counts per image, e.g. --shapes diamond=3 --shapes triangle=2.
    #[arg(long = "shapes", value_parser = parse_shape_count)]
    shapes: Vec<(String, usize)>,
    /// Minimum intersecting placement pairs per image.
    #[arg(long, default_value_t = 1)]
    min_overlap: usize,
    /// Canvas as HxW.
    #[arg(long, default_value = "90x90", value_parser = parse_dims)]
    canvas: (usize, usize),
    /// Annealing iterations.
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    /// Cooling fraction e in (0, 1).
    #[arg(long, default_value_t = 0.4)]
    temp_const: f64,
    /// Matching tolerance in pixels (Chebyshev).
    #[arg(long, default_value_t = 2)]
    tol: u32,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Overlapping-markers images with truth sidecars.
    Overlap(GenOverlapArgs),
    /// Synthetic plot images with truth and caption sidecars.
    Plot(GenPlotArgs),
    /// Labeled feature corpus (JSON lines) for classifier training.
    Corpus(GenCorpusArgs),
}

#[derive(Args)]
struct GenOverlapArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long = "shapes", value_parser = parse_shape_count)]
    shapes: Vec<(String, usize)>,
    #[arg(long, default_value_t = 1)]
    min_overlap: usize,
    #[arg(long, default_value = "90x90", value_parser = parse_dims)]
    canvas: (usize, usize),
    /// Output directory for `<name>.pgm` and `<name>.truth.json`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenPlotArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Marker series, e.g. --series diamond=10.
    #[arg(long = "series", value_parser = parse_shape_count)]
    series: Vec<(String, usize)>,
    #[arg(long, default_value = "120x120", value_parser = parse_dims)]
    canvas: (usize, usize),
    /// Axis position as ROWxCOL.
    #[arg(long, default_value = "100x15", value_parser = parse_dims)]
    axes: (usize, usize),
    /// Fraction of pixels turned into speckle noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Connect consecutive markers of each series with a polyline.
    #[arg(long)]
    connect: bool,
    #[arg(long, default_value = "Plot of the measured distribution")]
    caption: String,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenCorpusArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long, default_value_t = 200)]
    plots: usize,
    #[arg(long, default_value_t = 200)]
    negatives: usize,
}

#[derive(Args)]
struct DisambiguateArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Annealing iterations.
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    /// Cooling fraction e in (0, 1).
    #[arg(long, default_value_t = 0.4)]
    temp_const: f64,
    /// Matching tolerance against a truth sidecar, pixels.
    #[arg(long, default_value_t = 2)]
    tol: u32,
    /// Binary (dark-ink) PGM image of one overlap blob.
    image: PathBuf,
}

/// Placement wire record.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlacementRecord {
    shape: String,
    i: usize,
    j: usize,
}

impl From<&Placement> for PlacementRecord {
    fn from(p: &Placement) -> Self {
        Self {
            shape: p.shape_id.clone(),
            i: p.offset.0,
            j: p.offset.1,
        }
    }
}

impl PlacementRecord {
    fn into_placement(self) -> Placement {
        Placement::new(self.shape, self.i, self.j)
    }
}

/// Truth sidecar written next to generated images.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TruthSidecar {
    canvas: (usize, usize),
    seed: u64,
    #[serde(default)]
    axis_row: Option<usize>,
    #[serde(default)]
    axis_col: Option<usize>,
    #[serde(default)]
    caption: Option<String>,
    placements: Vec<PlacementRecord>,
}

#[derive(Debug, Deserialize)]
struct CorpusLine {
    features: Vec<f64>,
    label: i8,
}

fn parse_shape_count(s: &str) -> Result<(String, usize), String> {
    let (name, count) = s
        .split_once('=')
        .ok_or_else(|| format!("expected shape=count, got '{s}'"))?;
    let count: usize = count
        .parse()
        .map_err(|_| format!("invalid count in '{s}'"))?;
    Ok((name.to_string(), count))
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got '{s}'"))?;
    let a = a.parse().map_err(|_| format!("invalid number in '{s}'"))?;
    let b = b.parse().map_err(|_| format!("invalid number in '{s}'"))?;
    Ok((a, b))
}

fn load_templates(opts: &CommonOpts) -> Result<TemplateLibrary> {
    let dir = opts
        .templates
        .clone()
        .or_else(|| std::env::var_os(TEMPLATES_ENV).map(PathBuf::from));
    match dir {
        Some(dir) => TemplateLibrary::from_dir(&dir)
            .with_context(|| format!("loading templates from {}", dir.display())),
        None => Ok(TemplateLibrary::builtin()),
    }
}

fn load_params(opts: &CommonOpts) -> Result<ExtractParams> {
    let mut params = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => ExtractParams::default(),
    };
    if let Some(path) = &opts.lexicon {
        params.features.lexicon =
            load_lexicon(path).with_context(|| format!("reading lexicon {}", path.display()))?;
    }
    params.anneal.seed = opts.seed;
    Ok(params)
}

fn write_output(opts: &CommonOpts, text: &str) -> Result<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn caption_sidecar(image: &Path) -> Option<String> {
    let stem = image.file_stem()?;
    let candidate = image.with_file_name(format!("{}.caption.txt", stem.to_string_lossy()));
    std::fs::read_to_string(candidate).ok()
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8> {
    let params = load_params(&args.common)?;
    let model = SvmModel::load(&args.model)
        .with_context(|| format!("loading model {}", args.model.display()))?;

    #[derive(Serialize)]
    struct Verdict<'a> {
        file: &'a str,
        is_plot: bool,
        score: f64,
    }

    eprintln!("seed {}", args.common.seed);
    let mut lines = String::new();
    let mut failures = 0usize;
    for image_path in &args.images {
        let file = image_path.to_string_lossy();
        let outcome = load_image(image_path).map_err(anyhow::Error::from).and_then(|img| {
            let img = if args.invert { img.inverted() } else { img };
            let caption = caption_sidecar(image_path);
            classify_image(&img, caption.as_deref(), &model, &params.features)
                .map_err(anyhow::Error::from)
        });
        match outcome {
            Ok((is_plot, score)) => {
                lines.push_str(&jsonfmt::to_json_line(&Verdict {
                    file: &file,
                    is_plot,
                    score,
                })?);
            }
            Err(e) => {
                eprintln!("plotminer: {file}: {e:#}");
                failures += 1;
            }
        }
    }
    write_output(&args.common, &lines)?;
    Ok(u8::from(failures > 0))
}

fn cmd_extract(args: &ExtractArgs) -> Result<u8> {
    let params = load_params(&args.common)?;
    let model = SvmModel::load(&args.model)
        .with_context(|| format!("loading model {}", args.model.display()))?;
    let templates = load_templates(&args.common)?;
    let img = load_image(&args.image)?;
    let img = if args.invert { img.inverted() } else { img };
    let caption = match &args.caption {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .with_context(|| format!("reading caption {}", path.display()))?,
        ),
        None => caption_sidecar(&args.image),
    };
    eprintln!("seed {}", args.common.seed);
    let result = extract_from_image(
        &args.image.to_string_lossy(),
        &img,
        caption.as_deref(),
        &model,
        &templates,
        &params,
    )?;

    if let Some(path) = &args.dump_segmentation {
        #[derive(Serialize)]
        struct ComponentDump {
            bbox: plotminer::plotseg::BBox,
            pixel_count: usize,
            centroid: (f64, f64),
        }
        #[derive(Serialize)]
        struct SegmentationDump<'a> {
            regions: &'a Option<plotminer::plotseg::PlotRegions>,
            components: Vec<ComponentDump>,
        }
        let binary = binarize(&img, None);
        let components = plotminer::plotseg::connected_components(&binary)
            .into_iter()
            .map(|c| ComponentDump {
                bbox: c.bbox,
                pixel_count: c.pixel_count,
                centroid: c.centroid,
            })
            .collect();
        let dump = SegmentationDump {
            regions: &result.regions,
            components,
        };
        std::fs::write(path, jsonfmt::to_json_line(&dump)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }

    write_output(&args.common, &format!("{}\n", jsonfmt::to_string(&result)?))?;
    Ok(0)
}

fn cmd_train(args: &TrainArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("reading corpus {}", args.data.display()))?;
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: CorpusLine = serde_json::from_str(line)
            .with_context(|| format!("{}:{}", args.data.display(), lineno + 1))?;
        if parsed.label != 1 && parsed.label != -1 {
            bail!("{}:{}: label must be +1 or -1", args.data.display(), lineno + 1);
        }
        samples.push(parsed.features);
        labels.push(parsed.label);
    }

    let (accuracy, folds) = cross_validate(&samples, &labels, args.folds, args.c, args.common.seed)?;
    println!(
        "{}-fold cross-validation accuracy: {accuracy:.2}% (n = {}, C = {}, seed = {})",
        args.folds,
        samples.len(),
        args.c,
        args.common.seed
    );
    for (k, cm) in folds.iter().enumerate() {
        println!("fold {} confusion matrix ({:.2}% accurate):", k + 1, cm.accuracy() * 100.0);
        println!("{cm}");
    }

    if let Some(fraction) = args.holdout {
        if !(0.0 < fraction && fraction < 1.0) {
            bail!("--holdout must be in (0, 1)");
        }
        let n = samples.len();
        if n < 4 {
            bail!("--holdout needs at least 4 samples");
        }
        let n_test = ((n as f64 * fraction).round() as usize).clamp(1, n - 2);
        // Seeded shuffle, then the tail becomes the held-out test set.
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng_seed = args.common.seed;
        for i in (1..n).rev() {
            rng_seed = plotminer::derive_seed(rng_seed, i as u64);
            order.swap(i, (rng_seed % (i as u64 + 1)) as usize);
        }
        let (train_idx, test_idx) = order.split_at(n - n_test);
        let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<i8>) {
            (
                idx.iter().map(|&i| samples[i].clone()).collect(),
                idx.iter().map(|&i| labels[i]).collect(),
            )
        };
        let (tr_x, tr_y) = pick(train_idx);
        let (te_x, te_y) = pick(test_idx);
        let split_model = train(&tr_x, &tr_y, args.c, args.epochs, args.common.seed)?;
        let confusion = |xs: &[Vec<f64>], ys: &[i8]| -> Result<plotminer::svm::ConfusionMatrix> {
            let mut cm = plotminer::svm::ConfusionMatrix::default();
            for (x, &y) in xs.iter().zip(ys) {
                cm.record(y, split_model.predict(x)?.0);
            }
            Ok(cm)
        };
        let train_cm = confusion(&tr_x, &tr_y)?;
        let test_cm = confusion(&te_x, &te_y)?;
        println!(
            "holdout split {:.0}%/{:.0}% (seed {}): train confusion matrix ({:.2}% accurate):",
            (1.0 - fraction) * 100.0,
            fraction * 100.0,
            args.common.seed,
            train_cm.accuracy() * 100.0
        );
        println!("{train_cm}");
        println!("test confusion matrix ({:.2}% accurate):", test_cm.accuracy() * 100.0);
        println!("{test_cm}");
    }

    let model = train(&samples, &labels, args.c, args.epochs, args.common.seed)?;
    model.save(&args.out_model)?;
    println!("model written to {}", args.out_model.display());
    Ok(0)
}

fn default_shapes(shapes: &[(String, usize)]) -> Vec<(String, usize)> {
    if shapes.is_empty() {
        vec![("diamond".to_string(), 3), ("triangle".to_string(), 2)]
    } else {
        shapes.to_vec()
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<u8> {
    let params = load_params(&args.common)?;
    let templates = load_templates(&args.common)?;
    let spec = OverlapSpec {
        canvas: args.canvas,
        shape_counts: default_shapes(&args.shapes).into_iter().collect(),
        min_overlap_pairs: args.min_overlap,
        seed: args.common.seed,
    };
    let config = AnnealConfig {
        max_iterations: args.iters,
        temp_constant_e: args.temp_const,
        seed: args.common.seed,
        ..params.anneal
    };
    let table = eval_disambiguation(args.images, &spec, &config, args.tol, &templates)?;
    println!(
        "{} images, tol {} px, {} iterations, e = {} (seed {}):",
        args.images, args.tol, args.iters, args.temp_const, args.common.seed
    );
    println!("{table}");
    if args.common.out.is_some() {
        write_output(&args.common, &format!("{}\n", jsonfmt::to_string(&table)?))?;
    }
    Ok(0)
}

fn cmd_gen_overlap(args: &GenOverlapArgs) -> Result<u8> {
    let templates = load_templates(&args.common)?;
    std::fs::create_dir_all(&args.out_dir)?;
    for idx in 0..args.count {
        let seed = plotminer::derive_seed(args.common.seed, idx as u64);
        let spec = OverlapSpec {
            canvas: args.canvas,
            shape_counts: default_shapes(&args.shapes).into_iter().collect(),
            min_overlap_pairs: args.min_overlap,
            seed,
        };
        let (image, truth) = gen_overlap_image(&spec, &templates)?;
        let name = format!("overlap_{idx:04}");
        image
            .to_gray()
            .save_pgm(args.out_dir.join(format!("{name}.pgm")))?;
        let sidecar = TruthSidecar {
            canvas: args.canvas,
            seed,
            axis_row: None,
            axis_col: None,
            caption: None,
            placements: truth.iter().map(PlacementRecord::from).collect(),
        };
        std::fs::write(
            args.out_dir.join(format!("{name}.truth.json")),
            jsonfmt::to_json_line(&sidecar)?,
        )?;
    }
    println!(
        "wrote {} overlap image(s) to {} (seed {})",
        args.count,
        args.out_dir.display(),
        args.common.seed
    );
    Ok(0)
}

fn cmd_gen_plot(args: &GenPlotArgs) -> Result<u8> {
    let templates = load_templates(&args.common)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let series = if args.series.is_empty() {
        vec![("diamond".to_string(), 10)]
    } else {
        args.series.clone()
    };
    for idx in 0..args.count {
        let seed = plotminer::derive_seed(args.common.seed, idx as u64);
        let spec = PlotSpec {
            canvas: args.canvas,
            axes: args.axes,
            series: series.clone(),
            noise: args.noise,
            caption: args.caption.clone(),
            connect: args.connect,
            seed,
        };
        let (image, truth) = gen_plot_image(&spec, &templates)?;
        let name = format!("plot_{idx:04}");
        image.save_pgm(args.out_dir.join(format!("{name}.pgm")))?;
        std::fs::write(
            args.out_dir.join(format!("{name}.caption.txt")),
            &truth.caption,
        )?;
        let sidecar = TruthSidecar {
            canvas: args.canvas,
            seed,
            axis_row: Some(truth.axis_row),
            axis_col: Some(truth.axis_col),
            caption: Some(truth.caption.clone()),
            placements: truth.placements.iter().map(PlacementRecord::from).collect(),
        };
        std::fs::write(
            args.out_dir.join(format!("{name}.truth.json")),
            jsonfmt::to_json_line(&sidecar)?,
        )?;
    }
    println!(
        "wrote {} plot image(s) to {} (seed {})",
        args.count,
        args.out_dir.display(),
        args.common.seed
    );
    Ok(0)
}

fn cmd_gen_corpus(args: &GenCorpusArgs) -> Result<u8> {
    let params = load_params(&args.common)?;
    let templates = load_templates(&args.common)?;
    let corpus = gen_classifier_corpus(
        args.plots,
        args.negatives,
        args.common.seed,
        &templates,
        &params.features,
    )?;

    #[derive(Serialize)]
    struct Line {
        features: Vec<f64>,
        label: i8,
    }

    let mut text = String::new();
    for item in &corpus {
        text.push_str(&jsonfmt::to_json_line(&Line {
            features: item.features.dense(),
            label: item.label,
        })?);
    }
    write_output(&args.common, &text)?;
    eprintln!(
        "generated {} plot and {} negative samples (seed {})",
        args.plots, args.negatives, args.common.seed
    );
    Ok(0)
}

fn cmd_disambiguate(args: &DisambiguateArgs) -> Result<u8> {
    let params = load_params(&args.common)?;
    let templates = load_templates(&args.common)?;
    let gray = load_image(&args.image)?;
    let target = binarize(&gray, None);
    let config = AnnealConfig {
        max_iterations: args.iters,
        temp_constant_e: args.temp_const,
        seed: args.common.seed,
        ..params.anneal
    };
    let result = anneal(&target, &templates, &config)?;

    println!(
        "cost {} after {} iteration(s), converged: {} (seed {})",
        result.final_cost, result.iterations_used, result.converged, args.common.seed
    );
    let records: Vec<PlacementRecord> =
        result.placements.iter().map(PlacementRecord::from).collect();
    let json = format!("{}\n", jsonfmt::to_string(&records)?);
    write_output(&args.common, &json)?;

    // A truth sidecar next to the image turns this into a scored run.
    let stem = args.image.file_stem().map(|s| s.to_string_lossy().to_string());
    if let Some(stem) = stem {
        let sidecar_path = args.image.with_file_name(format!("{stem}.truth.json"));
        if let Ok(text) = std::fs::read_to_string(&sidecar_path) {
            let sidecar: TruthSidecar = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", sidecar_path.display()))?;
            let truth: Vec<Placement> = sidecar
                .placements
                .into_iter()
                .map(PlacementRecord::into_placement)
                .collect();
            let report = match_placements(&result, &truth, args.tol);
            println!("matched against {}:", sidecar_path.display());
            let mut by_shape: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
            for row in &report.per_shape {
                by_shape.insert(&row.shape_id, (row.total, row.correct));
            }
            for (shape, (total, correct)) in by_shape {
                println!("  {shape}: {correct}/{total} within {} px", args.tol);
            }
            println!("  overall recall: {:.1}%", report.recall * 100.0);
        }
    }
    Ok(0)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Gen(GenCommand::Overlap(args)) => cmd_gen_overlap(args),
        Command::Gen(GenCommand::Plot(args)) => cmd_gen_plot(args),
        Command::Gen(GenCommand::Corpus(args)) => cmd_gen_corpus(args),
        Command::Disambiguate(args) => cmd_disambiguate(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("plotminer: {e:#}");
            ExitCode::from(1)
        }
    }
}
