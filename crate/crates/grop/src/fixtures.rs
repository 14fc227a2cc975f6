//! Built-in task scenes and the curated answers of the offline oracle.

use grop_core::oracle::{StaticBackend, StaticTable};
use grop_core::Scene;
use thiserror::Error;

use crate::io::{parse_scene, IoError};

pub const TASK_IDS: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

const TASKS: [&str; 8] = [
    include_str!("../tasks/task1.json"),
    include_str!("../tasks/task2.json"),
    include_str!("../tasks/task3.json"),
    include_str!("../tasks/task4.json"),
    include_str!("../tasks/task5.json"),
    include_str!("../tasks/task6.json"),
    include_str!("../tasks/task7.json"),
    include_str!("../tasks/task8.json"),
];

/// Two chairs covering the whole south side of the dining table.
const BLOCKED_SIDE: &str = include_str!("../tasks/blocked_side.json");

const STATIC_TABLE: &str = include_str!("../data/static_table.json");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown task {0}; built-in tasks are 1-8")]
    UnknownTask(u32),
    #[error(transparent)]
    Io(#[from] IoError),
}

pub fn task(id: u32) -> Result<Scene, FixtureError> {
    let text = id.checked_sub(1).and_then(|i| TASKS.get(i as usize)).ok_or(FixtureError::UnknownTask(id))?;
    Ok(parse_scene(text, &format!("task{id}.json"))?)
}

pub fn blocked_side() -> Scene {
    parse_scene(BLOCKED_SIDE, "blocked_side.json").expect("built-in scene is valid")
}

pub fn static_table() -> StaticTable {
    serde_json::from_str(STATIC_TABLE).expect("built-in static table is valid")
}

pub fn static_backend() -> StaticBackend {
    StaticBackend::new(static_table())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_task_loads() {
        for id in TASK_IDS {
            let s = task(id).unwrap();
            let n = s.objects.len();
            assert_eq!(
                n,
                match id {
                    1..=5 => 3,
                    6 | 7 => 4,
                    _ => 5,
                }
            );
            assert!(static_table().arrangement(&s.object_names()).is_some(), "task {id}");
        }
        assert!(matches!(task(0), Err(FixtureError::UnknownTask(0))));
        assert!(matches!(task(99), Err(FixtureError::UnknownTask(99))));
        blocked_side().validate().unwrap();
    }
}
