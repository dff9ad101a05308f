//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use testevo_core::phases::{WindowMode, DEFAULT_EPSILON};
use testevo_core::views::{AxisMode, ViewOptions};

use crate::error::CliError;

/// `releases` or a positive block size.
pub fn parse_window(text: &str) -> Result<WindowMode, String> {
    if text == "releases" {
        return Ok(WindowMode::Releases);
    }
    match text.parse::<usize>() {
        Ok(n) if n > 0 => Ok(WindowMode::Blocks(n)),
        _ => Err(format!("expected `releases` or a positive commit count, got {text:?}")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags given here take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Commit log (JSON lines).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Release markers (`label<TAB>commit-id-or-timestamp`).
    #[arg(long)]
    pub releases: Option<PathBuf>,
    /// Per-release coverage report.
    #[arg(long)]
    pub coverage: Option<PathBuf>,
    /// Language profile (TOML); defaults to the built-in Java profile.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Snapshot directory laid out as `<commit-id>/<path>`.
    #[arg(long)]
    pub content: Option<PathBuf>,
    /// Read file contents from this git repository instead.
    #[arg(long, conflicts_with = "content")]
    pub git_repo: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// X axis of the change history view.
    #[arg(long)]
    pub axis: Option<AxisMode>,
    /// Phase windows: `releases` or a block size in commits.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<WindowMode>,
    /// Relative change below which a metric counts as flat.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Phase rulebook file.
    #[arg(long)]
    pub rulebook: Option<PathBuf>,
    /// Tolerated backwards clock skew between commits, in seconds.
    #[arg(long)]
    pub skew_tolerance: Option<i64>,
    /// Thin out change-history marks on very large histories.
    #[arg(long)]
    pub downsample: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum WindowValue {
    Size(usize),
    Name(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PhaseSection {
    window: Option<WindowValue>,
    epsilon: Option<f64>,
    rulebook: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    log: Option<PathBuf>,
    releases: Option<PathBuf>,
    coverage: Option<PathBuf>,
    profile: Option<PathBuf>,
    content: Option<PathBuf>,
    git_repo: Option<PathBuf>,
    out: Option<PathBuf>,
    skew_tolerance_secs: Option<i64>,
    view: Option<ViewOptions>,
    phases: PhaseSection,
}

#[derive(Debug, Clone)]
pub enum ContentSource {
    Dir(PathBuf),
    Git(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub log: Option<PathBuf>,
    pub releases: Option<PathBuf>,
    pub coverage: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub rulebook: Option<PathBuf>,
    pub content: Option<ContentSource>,
    pub out: PathBuf,
    pub view: ViewOptions,
    pub window: WindowMode,
    pub epsilon: f64,
    pub skew_tolerance_secs: i64,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let (file, base) = match &args.config {
            Some(path) => (load_file(path)?, path.parent().unwrap_or(Path::new("")).to_path_buf()),
            None => (FileConfig::default(), PathBuf::new()),
        };
        let from_file = |p: Option<PathBuf>| p.map(|p| base.join(p));
        let pick = |flag: &Option<PathBuf>, fallback: Option<PathBuf>| flag.clone().or_else(|| from_file(fallback));

        let content = match (&args.content, &args.git_repo) {
            (Some(dir), _) => Some(ContentSource::Dir(dir.clone())),
            (None, Some(repo)) => Some(ContentSource::Git(repo.clone())),
            (None, None) => match (from_file(file.content), from_file(file.git_repo)) {
                (Some(dir), _) => Some(ContentSource::Dir(dir)),
                (None, Some(repo)) => Some(ContentSource::Git(repo)),
                (None, None) => None,
            },
        };

        let file_window = match file.phases.window {
            None => None,
            Some(WindowValue::Size(n)) => Some(parse_window(&n.to_string())),
            Some(WindowValue::Name(s)) => Some(parse_window(&s)),
        }
        .transpose()
        .map_err(CliError::Validation)?;

        let mut view = file.view.unwrap_or_default();
        if let Some(axis) = args.axis {
            view.axis = axis;
        }
        view.downsample |= args.downsample;
        if !(view.width > 0.0 && view.height > 0.0 && view.mark_size > 0.0) {
            return Err(CliError::Validation(
                "view width, height and mark_size must be positive".into(),
            ));
        }

        let epsilon = args.epsilon.or(file.phases.epsilon).unwrap_or(DEFAULT_EPSILON);
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CliError::Validation(format!("epsilon must be positive, got {epsilon}")));
        }
        let skew = args.skew_tolerance.or(file.skew_tolerance_secs).unwrap_or(0);
        if skew < 0 {
            return Err(CliError::Validation("skew tolerance must not be negative".into()));
        }

        Ok(Self {
            log: pick(&args.log, file.log),
            releases: pick(&args.releases, file.releases),
            coverage: pick(&args.coverage, file.coverage),
            profile: pick(&args.profile, file.profile),
            rulebook: pick(&args.rulebook, file.phases.rulebook),
            content,
            out: pick(&args.out, file.out).unwrap_or_else(|| PathBuf::from("out")),
            view,
            window: args.window.or(file_window).unwrap_or(WindowMode::Releases),
            epsilon,
            skew_tolerance_secs: skew,
        })
    }
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = read_input(path, "config file")?;
    toml::from_str(&text).map_err(|e| CliError::invalid("config file", path, e))
}

/// Reads a whole input file, reporting absence as a missing input.
pub fn read_input(path: &Path, what: &'static str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => CliError::MissingInput {
            what,
            path: path.to_path_buf(),
        },
        io::ErrorKind::InvalidData => CliError::invalid(what, path, "not valid UTF-8"),
        _ => CliError::Read {
            what,
            path: path.to_path_buf(),
            source,
        },
    })
}
