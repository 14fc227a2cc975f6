//! Reading and writing scenes, relation files, oracle fixtures and JSON
//! outputs.

use std::fs;
use std::path::{Path, PathBuf};

use grop_core::oracle::{infer_objects, parse_place_lines, StaticTable};
use grop_core::relations::{Relation, RelationError, RelationSet};
use grop_core::scene::SceneError;
use grop_core::Scene;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Json { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {source}")]
    Scene {
        origin: String,
        #[source]
        source: SceneError,
    },
    #[error("{origin}:{line}: {message}")]
    Relations { origin: String, line: usize, message: String },
}

fn json_error(origin: &str, e: serde_json::Error) -> IoError {
    IoError::Json { origin: origin.into(), line: e.line(), column: e.column(), message: e.to_string() }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })
}

/// Parses and validates a scene; `origin` names the source in errors.
pub fn parse_scene(text: &str, origin: &str) -> Result<Scene, IoError> {
    let scene: Scene = serde_json::from_str(text).map_err(|e| json_error(origin, e))?;
    scene.validate().map_err(|source| IoError::Scene { origin: origin.into(), source })?;
    Ok(scene)
}

pub fn read_scene(path: &Path) -> Result<Scene, IoError> {
    parse_scene(&read_text(path)?, &path.display().to_string())
}

/// Relations from either JSON lines (one relation object per line) or
/// `Place` lines. Blank input is the empty set.
pub fn parse_relations(text: &str, origin: &str) -> Result<RelationSet, IoError> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let Some(first) = first else { return Ok(RelationSet::default()) };
    let relation_error =
        |line: usize, e: RelationError| IoError::Relations { origin: origin.into(), line, message: e.to_string() };
    if first.starts_with('{') {
        let mut relations = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let r: Relation = serde_json::from_str(line).map_err(|e| IoError::Relations {
                origin: origin.into(),
                line: i + 1,
                message: e.to_string(),
            })?;
            r.check_well_formed().map_err(|e| relation_error(i + 1, e))?;
            relations.push(r);
        }
        return RelationSet::from_relations(relations).map_err(|e| relation_error(0, e));
    }
    let objects = infer_objects(text);
    let parsed = parse_place_lines(text, &objects).map_err(|e| IoError::Relations {
        origin: origin.into(),
        line: 0,
        message: e.to_string(),
    })?;
    Ok(parsed.relations)
}

pub fn read_relations(path: &Path) -> Result<RelationSet, IoError> {
    parse_relations(&read_text(path)?, &path.display().to_string())
}

pub fn read_static_table(path: &Path) -> Result<StaticTable, IoError> {
    let origin = path.display().to_string();
    serde_json::from_str(&read_text(path)?).map_err(|e| json_error(&origin, e))
}

/// Recorded responses: a JSON array of strings.
pub fn read_replay(path: &Path) -> Result<Vec<String>, IoError> {
    let origin = path.display().to_string();
    serde_json::from_str(&read_text(path)?).map_err(|e| json_error(&origin, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| IoError::Write { path: dir.into(), source })?;
    }
    fs::write(path, text).map_err(|source| IoError::Write { path: path.into(), source })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_json(value))
}
