//! Locating and loading the corpus, room pool and generator weights.

use std::path::{Path, PathBuf};

use zdungeon_core::gan::WeightBundle;
use zdungeon_core::model::Room;
use zdungeon_core::vglc::{rooms_from_json, Corpus};

use crate::CliError;

pub const CORPUS_ENV: &str = "ZDUNGEON_VGLC_DIR";
pub const WEIGHTS_ENV: &str = "ZDUNGEON_WEIGHTS";

pub fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn load_corpus(dir: &Path) -> Result<Corpus, CliError> {
    Corpus::load_dir(dir).map_err(|e| CliError::Input(format!("cannot read corpus: {e}")))
}

/// A pool is either a JSON room list written by `ingest` or a corpus
/// directory, in which case its unique rooms are used.
pub fn load_pool(path: &Path) -> Result<Vec<Room>, CliError> {
    let rooms = if path.is_dir() {
        load_corpus(path)?.unique_rooms()
    } else {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read pool {}: {e}", path.display())))?;
        rooms_from_json(&text).map_err(|e| CliError::Input(format!("malformed pool {}: {e}", path.display())))?
    };
    if rooms.is_empty() {
        return Err(CliError::Input(format!("pool {} has no rooms", path.display())));
    }
    Ok(rooms)
}

pub fn load_weights(path: &Path) -> Result<WeightBundle, CliError> {
    WeightBundle::load(path).map_err(|e| CliError::Input(format!("cannot load weights {}: {e}", path.display())))
}
