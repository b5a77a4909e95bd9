//! The `tilerank` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tilerank_core::tile::{all_placements, no_skill_argmax_tile, no_skill_value_tile};
use tilerank_core::TileGrid;

use crate::compute::{self, fmt_num, fmt_value, CorrelateParams, DEFAULT_SCORES};
use crate::render::{self, OutputFormat, Overlays, Palette, RenderSpec};
use crate::roster::{load_roster, Roster, RosterFormat};

#[derive(Parser, Debug)]
#[command(name = "tilerank", version, about = "Ranking scores on the (a, b) tile", arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a table of catalog scores for every entity.
    Score(ScoreArgs),
    /// Write the value (or rank) tile of one entity.
    Tile(TileArgs),
    /// Write the rank-r ranking regions of a roster.
    Regions(RegionsArgs),
    /// Write the Kendall τ tile of a target score against every R(a,b).
    Correlate(CorrelateArgs),
    /// Write the iso-performance pencil at one tile coordinate.
    Roc(RocArgs),
    /// Print the volume under the tile, closed form and quadrature.
    Vut(VutArgs),
    /// Write the best no-skill score (or its argmax) over the tile.
    NoSkill(NoSkillArgs),
    /// Print where named orderings sit on the tile.
    Placements(PlacementsArgs),
    /// Start the JSON API.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct RosterArgs {
    /// Roster file, CSV (`name,tn,fp,fn,tp`) or JSON.
    pub roster: PathBuf,
    /// Override the format inferred from the extension.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Shift every entity to this positive prior (needed for mixed priors).
    #[arg(long, value_name = "PI_POS")]
    pub shift_to: Option<f64>,
}

impl RosterArgs {
    pub fn load(&self) -> Result<Roster> {
        let format = self.format.map(|f| match f {
            FormatArg::Csv => RosterFormat::Csv,
            FormatArg::Json => RosterFormat::Json,
        });
        Ok(load_roster(&self.roster, format, self.shift_to)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Data output (.json or .csv); JSON on stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Image output (.png or .svg).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Pixels per cell in images.
    #[arg(long, default_value_t = 4)]
    pub cell_px: u32,
    #[arg(long)]
    pub palette: Option<String>,
    /// Draw the γπ curve.
    #[arg(long)]
    pub gamma: bool,
    /// Draw the balanced grid as seen at the grid's priors.
    #[arg(long)]
    pub prior_grid: bool,
    /// Mark named orderings.
    #[arg(long)]
    pub placements: bool,
}

impl OutputArgs {
    fn spec(&self, format: OutputFormat, res: usize) -> Result<RenderSpec> {
        let palette = self.palette.as_deref().map(Palette::parse).transpose()?;
        let spec = RenderSpec {
            format,
            res,
            cell_px: self.cell_px,
            palette,
            overlays: Overlays { gamma: self.gamma, prior_grid: self.prior_grid, placements: self.placements },
        };
        spec.validate()?;
        Ok(spec)
    }

    fn write_grid(&self, grid: &mut TileGrid, out: &mut dyn Write) -> Result<()> {
        if let Some(p) = self.palette.as_deref() {
            grid.meta.palette = Some(Palette::parse(p)?.name().to_string());
        }
        match &self.out {
            Some(path) => {
                let f = OutputFormat::from_path(path)?;
                if f.is_image() {
                    bail!("--out takes .json or .csv; use --image for {}", path.display());
                }
                render::write_grid(grid, path, &self.spec(f, grid.n_a)?)?;
            }
            None => writeln!(out, "{}", render::grid_to_json(grid))?,
        }
        if let Some(path) = &self.image {
            let f = image_format(path)?;
            render::write_grid(grid, path, &self.spec(f, grid.n_a)?)?;
        }
        Ok(())
    }
}

fn image_format(path: &Path) -> Result<OutputFormat> {
    let f = OutputFormat::from_path(path)?;
    if !f.is_image() {
        bail!("--image takes .png or .svg, got {}", path.display());
    }
    Ok(f)
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub roster: RosterArgs,
    /// Comma-separated catalog names.
    #[arg(long, default_value = DEFAULT_SCORES)]
    pub names: String,
    /// Emit JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct TileArgs {
    #[command(flatten)]
    pub roster: RosterArgs,
    /// Entity name; optional for single-entity rosters.
    #[arg(long)]
    pub entity: Option<String>,
    #[arg(long, default_value_t = 101)]
    pub res: usize,
    /// Rank within the roster instead of the score value.
    #[arg(long)]
    pub rank: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub roster: RosterArgs,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Negative prior to view the roster at.
    #[arg(long, value_name = "PI_NEG")]
    pub priors: Option<f64>,
    /// Lattice size of the image.
    #[arg(long, default_value_t = 201)]
    pub res: usize,
    /// RegionSet JSON output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Region map (.png or .svg).
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub cell_px: u32,
    #[arg(long)]
    pub gamma: bool,
    #[arg(long)]
    pub prior_grid: bool,
    #[arg(long)]
    pub placements: bool,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    /// Catalog name or tile coordinate `a,b`.
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 51)]
    pub res: usize,
    /// Dirichlet concentration of unconstrained draws.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Hold the negative prior fixed at this value.
    #[arg(long, value_name = "PI_NEG")]
    pub fixed_priors: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RocArgs {
    /// Tile coordinate `a,b`.
    #[arg(long)]
    pub coord: String,
    /// Negative prior; defaults to the roster's, else balanced.
    #[arg(long, value_name = "PI_NEG")]
    pub priors: Option<f64>,
    /// Roster whose entities are drawn with their iso-lines.
    #[arg(long)]
    pub roster: Option<PathBuf>,
    #[arg(long, value_name = "PI_POS")]
    pub shift_to: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VutArgs {
    /// Roster file; every entity is reported.
    #[arg(required_unless_present = "perf", conflicts_with = "perf")]
    pub roster: Option<PathBuf>,
    /// One performance `tn,fp,fn,tp`, counts or probabilities.
    #[arg(long)]
    pub perf: Option<String>,
    /// Gauss–Legendre nodes per axis.
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct NoSkillArgs {
    #[arg(long, value_name = "PI_NEG")]
    pub priors: f64,
    #[arg(long, default_value_t = 101)]
    pub res: usize,
    /// Positive prediction rate of the winner instead of its score.
    #[arg(long)]
    pub argmax: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PlacementsArgs {
    #[arg(long, value_name = "PI_NEG")]
    pub priors: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Serve this directory (a UI build) for paths outside the API.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(writeln!(out, "{text}")?),
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut s = line(header);
    for r in rows {
        s.push('\n');
        s.push_str(&line(r));
    }
    s
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Score(args) => {
            let roster = args.roster.load()?;
            let scores = compute::parse_scores(&args.names)?;
            if scores.is_empty() {
                bail!("--names lists no scores");
            }
            let rows = compute::score_table(&roster, &scores);
            if args.json {
                let labels: Vec<String> = scores.iter().map(ToString::to_string).collect();
                let doc = serde_json::json!({ "scores": labels, "rows": rows });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                let mut header = vec!["name".to_string()];
                header.extend(scores.iter().map(ToString::to_string));
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| std::iter::once(r.name.clone()).chain(r.values.iter().map(|&v| fmt_value(v))).collect())
                    .collect();
                writeln!(out, "{}", table(&header, &body))?;
            }
        }
        Command::Tile(args) => {
            let roster = args.roster.load()?;
            let mut grid = if args.rank {
                compute::entity_rank_tile(&roster, args.entity.as_deref(), args.res)?
            } else {
                compute::entity_value_tile(&roster, args.entity.as_deref(), args.res)?
            };
            args.output.write_grid(&mut grid, out)?;
        }
        Command::Regions(args) => {
            let roster = args.roster.load()?;
            let set = compute::regions(&roster, args.rank, args.priors)?;
            let json = serde_json::to_string_pretty(&set)?;
            write_text(args.out.as_deref(), &json, out)?;
            if let Some(path) = &args.image {
                let spec = RenderSpec {
                    format: image_format(path)?,
                    res: args.res,
                    cell_px: args.cell_px,
                    palette: None,
                    overlays: Overlays { gamma: args.gamma, prior_grid: args.prior_grid, placements: args.placements },
                };
                // Drawn from the written JSON, as with grids.
                let reread: tilerank_core::regions::RegionSet = serde_json::from_str(&json)?;
                let bytes = render::render_regions(&reread, args.rank, &spec)?;
                std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Correlate(args) => {
            let target = compute::parse_target(&args.target)?;
            let params = CorrelateParams {
                n: args.n,
                seed: args.seed,
                res: args.res,
                alpha: args.alpha,
                fixed_neg_prior: args.fixed_priors,
            };
            let mut grid = compute::correlate(&target, &params)?;
            args.output.write_grid(&mut grid, out)?;
        }
        Command::Roc(args) => {
            let c = compute::parse_coord(&args.coord)?;
            let roster = args.roster.as_deref().map(|p| load_roster(p, None, args.shift_to)).transpose()?;
            let pencil = compute::roc(c, args.priors, roster.as_ref())?;
            write_text(args.out.as_deref(), &serde_json::to_string_pretty(&pencil)?, out)?;
        }
        Command::Vut(args) => {
            let perfs: Vec<(String, tilerank_core::Performance)> = match (&args.perf, &args.roster) {
                (Some(p), _) => vec![("P".to_string(), compute::parse_perf(p)?)],
                (None, Some(path)) => load_roster(path, None, None)?
                    .entities
                    .into_iter()
                    .map(|e| (e.name, e.performance))
                    .collect(),
                (None, None) => bail!("give a roster or --perf"),
            };
            let reports = perfs
                .iter()
                .map(|(n, p)| compute::vut_report(n, p, args.nodes))
                .collect::<Result<Vec<_>>>()?;
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
            } else {
                let header: Vec<String> =
                    ["name", "closed_form", "quadrature", "case"].iter().map(|s| s.to_string()).collect();
                let rows: Vec<Vec<String>> = reports
                    .iter()
                    .map(|r| {
                        let case = serde_json::to_value(r.case).expect("case serializes");
                        vec![
                            r.name.clone(),
                            fmt_num(r.closed_form),
                            fmt_num(r.numeric),
                            case.as_str().unwrap_or_default().to_string(),
                        ]
                    })
                    .collect();
                writeln!(out, "{}", table(&header, &rows))?;
            }
        }
        Command::NoSkill(args) => {
            let priors = compute::priors_from_neg(args.priors)?;
            let mut grid = if args.argmax {
                no_skill_argmax_tile(priors, args.res)?
            } else {
                no_skill_value_tile(priors, args.res)?
            };
            grid.meta.palette = Some(Palette::for_kind(grid.kind).name().to_string());
            args.output.write_grid(&mut grid, out)?;
        }
        Command::Placements(args) => {
            let priors = args.priors.map(compute::priors_from_neg).transpose()?;
            writeln!(out, "{}", serde_json::to_string_pretty(&all_placements(priors)?)?)?;
        }
        Command::Serve(args) => {
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(crate::api::serve(&args.host, args.port, args.static_dir))?;
        }
    }
    Ok(())
}

/// Caps rayon's pool at `TILE_RANK_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TILE_RANK_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("TILE_RANK_THREADS=`{v}` must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
