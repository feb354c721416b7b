//! The batch subcommands. Each writes its report to `out`.

use std::io::Write;
use std::path::{Path, PathBuf};

use zdungeon_core::gan::WeightBundle;
use zdungeon_core::grammar::{default_backbone, RuleSet};
use zdungeon_core::layout::RoomSource;
use zdungeon_core::metrics::{format_table, summarize, Scope};
use zdungeon_core::model::{Dungeon, Room};
use zdungeon_core::repair::{generate_playable, solve, SolveResult};
use zdungeon_core::vglc::{one_hot_export, rooms_to_json};

use crate::assets::{load_corpus, load_pool, load_weights};
use crate::CliError;

pub const POOL_FILE: &str = "pool.json";
pub const ONE_HOT_FILE: &str = "onehot.txt";

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Splits the corpus into rooms, writes the unique-room pool and the one-hot
/// training export.
pub fn ingest(corpus_dir: &Path, out_dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_dir)?;
    let unique = corpus.unique_rooms();
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    write_file(&out_dir.join(POOL_FILE), &rooms_to_json(&unique))?;
    write_file(&out_dir.join(ONE_HOT_FILE), &one_hot_export(&corpus.stripped_rooms()))?;
    for d in &corpus.dungeons {
        let _ = writeln!(out, "{}: {} rooms", d.name, d.to_dungeon().rooms.len());
    }
    let _ = writeln!(
        out,
        "{} dungeons, {} rooms, {} unique rooms",
        corpus.dungeons.len(),
        corpus.total_rooms(),
        unique.len()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Gan,
    Pool,
}

pub struct GenerateArgs {
    pub source: Source,
    pub seed: u64,
    pub weights: Option<PathBuf>,
    pub pool: Option<PathBuf>,
    pub count: usize,
    pub out: PathBuf,
}

/// Loaded room source for generation.
pub enum Assets {
    Gan(WeightBundle),
    Pool(Vec<Room>),
}

impl Assets {
    pub fn source(&self) -> RoomSource<'_> {
        match self {
            Assets::Gan(w) => RoomSource::Gan(w),
            Assets::Pool(p) => RoomSource::Pool(p),
        }
    }
}

/// Builds and repairs `count` dungeons from consecutive seeds.
pub fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let assets = match args.source {
        Source::Gan => {
            let path = args.weights.as_deref().ok_or_else(|| CliError::Input("gan mode needs --weights".into()))?;
            Assets::Gan(load_weights(path)?)
        }
        Source::Pool => {
            let path = args.pool.as_deref().ok_or_else(|| CliError::Input("pool mode needs --pool".into()))?;
            Assets::Pool(load_pool(path)?)
        }
    };
    std::fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let rules = RuleSet::default_rules();
    let backbone = default_backbone();
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let g = generate_playable(&backbone, &rules, assets.source(), seed)
            .map_err(|e| CliError::Generation(format!("seed {seed}: {e}")))?;
        let path = args.out.join(format!("dungeon-{seed}.json"));
        write_file(&path, &g.dungeon.to_json())?;
        let _ = writeln!(
            out,
            "{} seed={} repairCount={} rooms={} plan={}",
            path.display(),
            g.dungeon.meta.seed,
            g.dungeon.meta.repair_count,
            g.dungeon.rooms.len(),
            g.plan.len()
        );
        for w in &g.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
    }
    Ok(())
}

pub fn read_dungeon(path: &Path) -> Result<Dungeon, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Dungeon::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Files as given, directories expanded to their `.json` entries in name order.
fn dungeon_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| io_err(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json") && f.file_name() != Some(POOL_FILE.as_ref()))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

pub fn solve_files(paths: &[PathBuf], out: &mut dyn Write) -> Result<(), CliError> {
    for path in dungeon_files(paths)? {
        let d = read_dungeon(&path)?;
        match solve(&d) {
            SolveResult::Plan(plan) => {
                let _ = writeln!(out, "{}: beatable in {} actions", path.display(), plan.len());
            }
            SolveResult::Failure(report) => {
                let missing: Vec<String> =
                    report.unvisited.iter().map(|p| format!("{:?} in room {}", p.kind, p.room)).collect();
                let _ = writeln!(out, "{}: unbeatable; unreached: {}", path.display(), missing.join(", "));
            }
        }
    }
    Ok(())
}

/// Novelty summary over dungeon files, or over the corpus when `corpus` is set.
pub fn metrics(paths: &[PathBuf], corpus: Option<&Path>, label: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let mut dungeons = Vec::new();
    if let Some(dir) = corpus {
        dungeons.extend(load_corpus(dir)?.dungeons.iter().map(|d| d.to_dungeon()));
    }
    for path in dungeon_files(paths)? {
        dungeons.push(read_dungeon(&path)?);
    }
    if dungeons.is_empty() {
        return Err(CliError::Input("no dungeons given".into()));
    }
    let reports = [
        (format!("{label} Dungeons"), Scope::Dungeons),
        (format!("All {label} Rooms"), Scope::AllRooms),
        (format!("Unique {label} Rooms"), Scope::UniqueRooms),
    ]
    .into_iter()
    .map(|(name, scope)| summarize(&name, &dungeons, scope).map_err(|e| CliError::Input(e.to_string())))
    .collect::<Result<Vec<_>, _>>()?;
    let _ = write!(out, "{}", format_table(&reports));
    Ok(())
}
