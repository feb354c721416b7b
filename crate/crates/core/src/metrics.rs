//! Interior-tile novelty of rooms and dungeons.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{interior_cells, Dungeon, Room, INTERIOR_CELL_COUNT};
use crate::vglc::{dedupe, strip_doors};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("novelty needs at least two rooms, found {0}")]
    TooFewRooms(usize),
    #[error("empty collection")]
    Empty,
}

/// Fraction of the 84 interior cells whose tiles differ.
pub fn room_distance(a: &Room, b: &Room) -> f64 {
    let differing = interior_cells().into_iter().filter(|&c| a.tiles.get(c) != b.tiles.get(c)).count();
    differing as f64 / INTERIOR_CELL_COUNT as f64
}

/// Mean distance from `rooms[index]` to every other room in the slice.
pub fn room_novelty(index: usize, rooms: &[&Room]) -> Result<f64, MetricError> {
    if rooms.len() < 2 {
        return Err(MetricError::TooFewRooms(rooms.len()));
    }
    let total: f64 = rooms
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != index)
        .map(|(_, other)| room_distance(rooms[index], other))
        .sum();
    Ok(total / (rooms.len() - 1) as f64)
}

/// Novelty of every room against the rest of its set.
pub fn room_novelties(rooms: &[&Room]) -> Result<Vec<f64>, MetricError> {
    (0..rooms.len()).map(|i| room_novelty(i, rooms)).collect()
}

pub fn dungeon_novelty(dungeon: &Dungeon) -> Result<f64, MetricError> {
    let rooms: Vec<&Room> = dungeon.rooms.values().collect();
    let values = room_novelties(&rooms)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Scope {
    Dungeons,
    AllRooms,
    UniqueRooms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NoveltyReport {
    pub label: String,
    pub scope: Scope,
    pub values: Vec<f64>,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
}

impl NoveltyReport {
    pub fn from_values(label: &str, scope: Scope, values: Vec<f64>) -> Result<Self, MetricError> {
        if values.is_empty() {
            return Err(MetricError::Empty);
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let stdev = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(NoveltyReport { label: label.to_string(), scope, values, n, mean, stdev, min, max })
    }
}

/// Summary over a collection. `AllRooms` scores each room within its own
/// dungeon; `UniqueRooms` pools the door-stripped, deduplicated rooms of the
/// whole collection and scores them against each other.
pub fn summarize(label: &str, dungeons: &[Dungeon], scope: Scope) -> Result<NoveltyReport, MetricError> {
    let values = match scope {
        Scope::Dungeons => dungeons.iter().map(dungeon_novelty).collect::<Result<Vec<_>, _>>()?,
        Scope::AllRooms => {
            let mut all = Vec::new();
            for d in dungeons {
                let rooms: Vec<&Room> = d.rooms.values().collect();
                all.extend(room_novelties(&rooms)?);
            }
            all
        }
        Scope::UniqueRooms => {
            let stripped: Vec<Room> = dungeons.iter().flat_map(|d| d.rooms.values().map(strip_doors)).collect();
            let unique = dedupe(&stripped);
            if unique.len() < 2 {
                // A single distinct room has nothing to differ from.
                return NoveltyReport::from_values(label, scope, vec![0.0; unique.len()]);
            }
            let refs: Vec<&Room> = unique.iter().collect();
            room_novelties(&refs)?
        }
    };
    NoveltyReport::from_values(label, scope, values)
}

/// Plain-text table with columns Type, N, Avg ± StDev, Min, Max.
pub fn format_table(reports: &[NoveltyReport]) -> String {
    let width = reports.iter().map(|r| r.label.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>5}  {:>17}  {:>6}  {:>6}", "Type", "N", "Avg ± StDev", "Min", "Max").unwrap();
    for r in reports {
        writeln!(
            out,
            "{:<width$}  {:>5}  {:>8.4} ± {:.4}  {:>6.4}  {:>6.4}",
            r.label, r.n, r.mean, r.stdev, r.min, r.max
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, DungeonMeta, RoomPos, SourceKind, Tile, TileGrid};
    use proptest::prelude::*;

    fn room_from_bits(bits: &[u8]) -> Room {
        let mut r = Room::from_tiles(TileGrid::walled_floor());
        for (c, &b) in interior_cells().iter().zip(bits) {
            r.tiles.set(*c, Tile::ALL[b as usize % 3]);
        }
        r
    }

    fn dungeon(rooms: Vec<Room>) -> Dungeon {
        let mut d = Dungeon::new(DungeonMeta { seed: 0, source_kind: SourceKind::Original, repair_count: 0, repaired_rooms: vec![] });
        for (i, r) in rooms.into_iter().enumerate() {
            d.rooms.insert(RoomPos::new(i as i32, 0), r);
        }
        d
    }

    #[test]
    fn distance_extremes() {
        let a = room_from_bits(&[0; 84]);
        let b = room_from_bits(&[1; 84]);
        assert_eq!(room_distance(&a, &a), 0.0);
        assert_eq!(room_distance(&a, &b), 1.0);
        let mut c = a.clone();
        for cell in interior_cells().into_iter().step_by(4) {
            c.tiles.set(cell, Tile::Water);
        }
        assert_eq!(room_distance(&a, &c), 0.25);
    }

    #[test]
    fn border_and_doors_do_not_count() {
        let a = room_from_bits(&[0; 84]);
        let mut b = a.clone();
        b.tiles.set(Cell::new(0, 0), Tile::Water);
        b.set_door(crate::model::Door::new(crate::model::Dir::N, crate::model::DoorKind::Normal));
        assert_eq!(room_distance(&a, &b), 0.0);
    }

    #[test]
    fn toy_dungeon_matches_double_loop() {
        let rooms: Vec<Room> = (0..3u8).map(|k| room_from_bits(&(0..84).map(|i| ((i * 7 + k as usize * 13) % 5) as u8).collect::<Vec<_>>())).collect();
        let d = dungeon(rooms.clone());
        let mut total = 0.0;
        for i in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                if i != j {
                    let diff = (0..84).filter(|&k| {
                        let c = interior_cells()[k];
                        rooms[i].tiles.get(c) != rooms[j].tiles.get(c)
                    });
                    s += diff.count() as f64 / 84.0;
                }
            }
            total += s / 2.0;
        }
        assert!((dungeon_novelty(&d).unwrap() - total / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_rooms_have_zero_novelty_and_one_unique() {
        let r = room_from_bits(&[2; 84]);
        let d = dungeon(vec![r.clone(), r.clone(), r]);
        assert_eq!(dungeon_novelty(&d).unwrap(), 0.0);
        let u = summarize("u", &[d], Scope::UniqueRooms).unwrap();
        assert_eq!(u.n, 1);
    }

    #[test]
    fn single_room_is_an_error() {
        let d = dungeon(vec![room_from_bits(&[0; 84])]);
        assert_eq!(dungeon_novelty(&d), Err(MetricError::TooFewRooms(1)));
    }

    #[test]
    fn table_has_header_and_rows() {
        let r = NoveltyReport::from_values("Original Dungeons", Scope::Dungeons, vec![0.1, 0.3]).unwrap();
        assert!((r.stdev - 0.1414213562).abs() < 1e-9);
        let t = format_table(&[r]);
        assert!(t.starts_with("Type"));
        assert!(t.contains("0.2000 ± 0.1414"));
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(
            a in prop::collection::vec(0u8..3, 84),
            b in prop::collection::vec(0u8..3, 84),
            c in prop::collection::vec(0u8..3, 84),
        ) {
            let (a, b, c) = (room_from_bits(&a), room_from_bits(&b), room_from_bits(&c));
            let (ab, bc, ac) = (room_distance(&a, &b), room_distance(&b, &c), room_distance(&a, &c));
            prop_assert_eq!(ab, room_distance(&b, &a));
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(ab == 0.0, a.tiles == b.tiles);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
