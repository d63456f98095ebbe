//! The `uniform-textures` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
//! Results go to stdout as JSON; warnings and errors go to stderr.

use std::collections::HashMap;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    indscal, ingest_ratings, read_ratings_file, scree, screen_participants, DissimilarityMatrix, Embedding,
    IndscalOptions, StimulusKey,
};
use crate::config::PipelineConfig;
use crate::error::{invalid, Error, Result};
use crate::raster::{read_image, write_image, Raster};
use crate::reparam::{levels_from_embedding, paper_levels, paper_params, sigmoid_levels, LabeledEmbedding};
use crate::server::{load_stimuli, serve, AppState};
use crate::study::Journal;
use crate::synth::{continuous_map, gen_crosshatch, gen_stimulus_set, generate, PerceptualMapping, TextureType};

#[derive(Debug, Parser)]
#[command(name = "uniform-textures", version, about = "Density-exact textures and perceptually uniform density levels")]
pub struct Cli {
    /// JSON pipeline config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one texture, a density series or a crosshatch grid.
    Generate(GenerateArgs),
    /// Report the covered fraction of images.
    Measure(MeasureArgs),
    /// Ratings CSV to matrices, screening, INDSCAL embedding and scree.
    Analyze(AnalyzeArgs),
    /// Perceptually uniform levels from an embedding or the published constants.
    Levels(LevelsArgs),
    /// Texture map whose local density follows a grayscale field.
    Continuous(ContinuousArgs),
    /// HTTP backend for rating sessions.
    StudyServe(ServeArgs),
}

fn texture_type(s: &str) -> std::result::Result<TextureType, String> {
    s.parse::<TextureType>().map_err(|e| e.to_string())
}

fn unit(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        Ok(v) => Err(format!("{v} is outside [0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["density", "series", "grid", "pair"]))]
pub struct GenerateArgs {
    #[arg(long = "type", value_parser = texture_type)]
    pub texture: TextureType,
    /// Target density of a single texture.
    #[arg(long, value_parser = unit)]
    pub density: Option<f64>,
    /// Density step of a series `0, step, ..., 1`, written with stimulus keys.
    #[arg(long, value_parser = unit)]
    pub series: Option<f64>,
    /// Per-axis step of the crosshatch grid, written with stimulus keys.
    #[arg(long, value_parser = unit)]
    pub grid: Option<f64>,
    /// One crosshatch texture `d_h,d_v`.
    #[arg(long, value_delimiter = ',', num_args = 2, value_parser = unit)]
    pub pair: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Square texture side (default 512).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Also report densities of square blocks of this side.
    #[arg(long)]
    pub blocks: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub ratings: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Density step that turns `type:NN` keys into densities.
    #[arg(long)]
    pub step: Option<f64>,
    /// Drop these participants before fitting.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Drop every participant the screening flags.
    #[arg(long)]
    pub exclude_flagged: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["embedding", "paper"]))]
pub struct LevelsArgs {
    /// Embedding JSON with labels or densities.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Use the published constants for this texture type.
    #[arg(long)]
    pub paper: Option<String>,
    /// Take levels from the sigmoid at k/(n+1) instead of the curve.
    #[arg(long)]
    pub via_sigmoid: bool,
    #[arg(long)]
    pub n: Option<usize>,
    /// Texture type of the embedding, when its labels do not say.
    #[arg(long = "type", value_parser = texture_type)]
    pub texture: Option<TextureType>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Search every window instead of using the configured one.
    #[arg(long, conflicts_with = "window")]
    pub search_window: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MappingKind {
    /// The published sigmoid of the texture type.
    Paper,
    Identity,
}

#[derive(Debug, Args)]
pub struct ContinuousArgs {
    /// Grayscale field; darker pixels ask for more ink (value = 1 - luma/255).
    pub field: PathBuf,
    #[arg(long = "type", value_parser = texture_type)]
    pub texture: TextureType,
    #[arg(long, value_enum, default_value = "paper")]
    pub mapping: MappingKind,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output image (default `{out_dir}/continuous_{type}.png`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write per-block target and measured densities as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Directory of a generated stimulus set (images and keyed sidecars).
    #[arg(long)]
    pub stimuli: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Append-only session journals, replayed on startup.
    #[arg(long)]
    pub journal: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Validation(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render().ansi());
            return e.exit_code();
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_owned(), source }
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(value).expect("json")).map_err(io_err(Path::new("<stdout>")))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let body = serde_json::to_string_pretty(value).expect("json");
    std::fs::write(path, body + "\n").map_err(io_err(path))
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(&cfg, a, out, err),
        Command::Measure(a) => cmd_measure(a, out),
        Command::Analyze(a) => cmd_analyze(&cfg, a, out, err),
        Command::Levels(a) => cmd_levels(&cfg, a, out),
        Command::Continuous(a) => cmd_continuous(&cfg, a, out, err),
        Command::StudyServe(a) => cmd_serve(&cfg, a, err),
    }
}

fn cmd_generate(cfg: &PipelineConfig, a: GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut spec = cfg.texture.clone();
    spec.texture_type = a.texture;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(n) = a.size {
        (spec.width, spec.height) = (n, n);
    }
    spec.validate()?;
    let dir = a.out.unwrap_or_else(|| cfg.output_dir.clone());
    let crosshatch = a.texture == TextureType::Crosshatch;

    let report = |tex: &crate::synth::TextureInstance, key: Option<&StimulusKey>, out: &mut dyn Write, err: &mut dyn Write| {
        let path = tex.write_to(&dir, key)?;
        for w in &tex.warnings {
            let _ = writeln!(err, "warning: {}: {w}", path.display());
        }
        emit(
            out,
            &json!({
                "image": path,
                "key": key.map(|k| k.0.clone()),
                "target_density": tex.target_density,
                "measured_density": tex.measured_density,
                "warnings": tex.warnings,
            }),
        )
    };

    if let Some(d) = a.density {
        let tex = generate(d, &spec)?;
        return report(&tex, None, out, err);
    }
    if let Some(p) = a.pair {
        if !crosshatch {
            return Err(invalid("--pair applies to --type crosshatch only"));
        }
        let tex = gen_crosshatch(p[0], p[1], &spec)?;
        return report(&tex, None, out, err);
    }
    let step = match (a.series, a.grid) {
        (Some(_), _) if crosshatch => return Err(invalid("crosshatch stimulus sets use --grid")),
        (_, Some(_)) if !crosshatch => return Err(invalid("--grid applies to --type crosshatch only")),
        (Some(s), _) | (_, Some(s)) => s,
        (None, None) => unreachable!("clap requires one generation mode"),
    };
    if step <= 0.0 {
        return Err(invalid("step must be positive"));
    }
    for s in gen_stimulus_set(&spec, step)? {
        report(&s.texture, Some(&s.key), out, err)?;
    }
    Ok(())
}

fn cmd_measure(a: MeasureArgs, out: &mut dyn Write) -> Result<()> {
    for path in &a.images {
        let r = read_image(path)?;
        let mut v = json!({ "image": path, "width": r.width(), "height": r.height(), "density": r.density() });
        if let Some(b) = a.blocks {
            if b == 0 {
                return Err(invalid("--blocks must be positive"));
            }
            let rows: Vec<Vec<f64>> = (0..r.height().div_ceil(b))
                .map(|by| {
                    (0..r.width().div_ceil(b)).map(|bx| r.region_density(bx * b, by * b, (bx + 1) * b, (by + 1) * b)).collect()
                })
                .collect();
            v["blocks"] = json!({ "size": b, "densities": rows });
        }
        emit(out, &v)?;
    }
    Ok(())
}

/// Density of each key: crosshatch keys carry it, series keys are `index * step`.
fn key_densities(keys: &[String], step: f64) -> Option<Vec<f64>> {
    keys.iter()
        .map(|k| {
            let nums = StimulusKey(k.clone()).numbers()?;
            match nums.as_slice() {
                [i] => Some((i * step * 1e9).round() / 1e9),
                [h, v] => Some(h.max(*v)),
                _ => None,
            }
        })
        .collect()
}

fn cmd_analyze(cfg: &PipelineConfig, a: AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let records = read_ratings_file(&a.ratings)?;
    let keys: Vec<String> =
        StimulusKey::sorted_unique(records.iter().flat_map(|r| [r.stim_a.as_str(), r.stim_b.as_str()]))?
            .into_iter()
            .map(|k| k.0)
            .collect();
    let data = ingest_ratings(&records, &keys)?;
    let screening = screen_participants(&data, cfg.screening.into());
    let flagged: Vec<String> = screening.flagged().into_iter().map(str::to_owned).collect();
    for id in &flagged {
        let _ = writeln!(err, "warning: participant {id} flagged by screening");
    }
    let keep: Vec<_> = data
        .participants
        .iter()
        .filter(|p| !a.exclude.contains(&p.id) && !(a.exclude_flagged && flagged.contains(&p.id)))
        .collect();
    if keep.is_empty() {
        return Err(invalid("every participant was excluded"));
    }
    let matrices: Vec<DissimilarityMatrix> = keep.iter().map(|p| p.matrix.clone()).collect();
    let dim = a.dim.unwrap_or(cfg.mds_dim);
    let mut emb = indscal(&matrices, dim, IndscalOptions::default())?;
    emb.labels = Some(keys.clone());
    emb.densities = key_densities(&keys, a.step.unwrap_or(cfg.series_step));
    let mean = DissimilarityMatrix::mean(&matrices)?;
    let scree_values = scree(&mean, cfg.scree_max_dim)?;

    let dir = a.out.unwrap_or_else(|| cfg.output_dir.clone());
    let per_participant: HashMap<&str, &DissimilarityMatrix> =
        data.participants.iter().map(|p| (p.id.as_str(), &p.matrix)).collect();
    write_json(&dir.join("matrices.json"), &json!({ "stimuli": keys, "participants": per_participant }))?;
    write_json(&dir.join("screening.json"), &screening)?;
    write_json(&dir.join("embedding.json"), &emb)?;
    write_json(&dir.join("scree.json"), &json!({ "dims": (1..=scree_values.len()).collect::<Vec<_>>(), "stress1": scree_values }))?;
    for w in &emb.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    emit(
        out,
        &json!({
            "participants": data.participants.len(),
            "used": keep.len(),
            "accepted_records": data.accepted_records,
            "flagged": flagged,
            "stress1": emb.stress1,
            "scree": scree_values,
            "out": dir,
        }),
    )
}

/// Ordered points and densities for curve fitting. Crosshatch embeddings
/// contribute their horizontal-only row (`hatch:dx0.0`) plus the saturated
/// stimulus.
fn labeled_points(emb: &Embedding) -> Result<(Option<TextureType>, LabeledEmbedding)> {
    let n = emb.points.len();
    let dens = emb.densities.clone().ok_or_else(|| invalid("embedding has no densities"))?;
    if dens.len() != n {
        return Err(invalid("embedding densities do not match its points"));
    }
    let labels = emb.labels.clone().unwrap_or_default();
    let xy = |p: &Vec<f64>| [p.first().copied().unwrap_or(0.0), p.get(1).copied().unwrap_or(0.0)];
    let keys: Vec<StimulusKey> = labels.iter().map(|l| StimulusKey(l.clone())).collect();
    let is_grid = !keys.is_empty() && keys.iter().all(|k| k.numbers().is_some_and(|v| v.len() == 2));
    let mut rows: Vec<(f64, [f64; 2])> = if is_grid {
        keys.iter()
            .zip(&emb.points)
            .filter_map(|(k, p)| {
                let v = k.numbers()?;
                (v[1] == 0.0 || (v[0] >= 1.0 && v[1] >= 1.0)).then(|| (v[0], xy(p)))
            })
            .collect()
    } else {
        dens.iter().zip(&emb.points).map(|(&d, p)| (d, xy(p))).collect()
    };
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let texture = keys.first().and_then(|k| match k.texture() {
        "hatch" if is_grid => Some(TextureType::HatchH),
        t => t.parse().ok(),
    });
    let le = LabeledEmbedding::new(rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.0).collect())?;
    Ok((texture, le))
}

fn cmd_levels(cfg: &PipelineConfig, a: LevelsArgs, out: &mut dyn Write) -> Result<()> {
    let n = a.n.unwrap_or(cfg.levels);
    if n == 0 {
        return Err(invalid("--n must be at least 1"));
    }
    let result = if let Some(t) = &a.paper {
        let params = paper_params(t)?;
        let levels = if a.via_sigmoid {
            sigmoid_levels(&params, n)?
        } else if n == 5 {
            paper_levels(t)?.to_vec()
        } else {
            return Err(invalid("the published table has 5 levels; use --via-sigmoid for other counts"));
        };
        json!({
            "texture_type": t.parse::<TextureType>().map(|t| t.as_str()).unwrap_or(t.as_str()),
            "source": "paper",
            "window": null, "degree": null, "sse": null,
            "levels": levels,
            "sigmoid": params,
        })
    } else {
        let path = a.embedding.as_ref().expect("clap requires a source");
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let emb: Embedding =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: not an embedding: {e}", path.display())))?;
        let (found, le) = labeled_points(&emb)?;
        let texture = a.texture.or(found).ok_or_else(|| invalid("cannot tell the texture type; pass --type"))?;
        let setting = cfg.windows.for_texture(texture);
        let degree = a.degree.unwrap_or(setting.degree);
        let window = if a.search_window { None } else { a.window.or(setting.window) };
        let r = levels_from_embedding(&le, degree, window, n, a.via_sigmoid)?;
        json!({
            "texture_type": texture.as_str(),
            "source": "embedding",
            "window": r.window, "degree": r.degree, "sse": r.sse,
            "ties": r.ties,
            "levels": r.levels,
            "sigmoid": r.sigmoid,
        })
    };
    if let Some(p) = &a.out {
        write_json(p, &result)?;
    }
    emit(out, &result)
}

fn cmd_continuous(cfg: &PipelineConfig, a: ContinuousArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let field: Raster = read_image(&a.field)?;
    let mapping = match a.mapping {
        MappingKind::Identity => PerceptualMapping::Identity,
        MappingKind::Paper => PerceptualMapping::paper(a.texture.as_str())?,
    };
    let mut spec = cfg.texture.clone();
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    let map = continuous_map(&field, &mapping, a.texture, &spec)?;
    let path = a.out.unwrap_or_else(|| cfg.output_dir.join(format!("continuous_{}.png", a.texture)));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    write_image(&map.raster, &path)?;
    for w in &map.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let summary = json!({
        "image": path,
        "texture_type": a.texture.as_str(),
        "target_density": map.target.density(),
        "measured_density": map.measured_density(),
        "block_size": spec.block_size,
        "block_mae": map.block_mae(0.0),
        "warnings": map.warnings,
    });
    if let Some(r) = &a.report {
        let mut full = summary.clone();
        full["blocks"] = serde_json::to_value(&map.blocks).expect("json");
        write_json(r, &full)?;
    }
    emit(out, &summary)
}

fn cmd_serve(cfg: &PipelineConfig, a: ServeArgs, err: &mut dyn Write) -> Result<()> {
    let stimuli = load_stimuli(&a.stimuli)?;
    let journal = a.journal.map(Journal::new).transpose()?;
    let state = AppState::new(stimuli, a.seed.unwrap_or(cfg.study_seed), journal)?;
    let addr = SocketAddr::new(a.host, a.port);
    let _ = writeln!(err, "serving {} on http://{addr}", a.stimuli.display());
    let rt = tokio::runtime::Runtime::new().map_err(io_err(Path::new("<tokio runtime>")))?;
    rt.block_on(serve(addr, state))
}
