//! VGLC Legend of Zelda dungeon ingestion.
//!
//! The processed VGLC text places 16×11 rooms on a lattice, with `-` filling
//! the space where no room exists. Tiles are reduced to floor, wall and water.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{
    door_slot, Dir, Dungeon, DungeonMeta, Room, RoomPos, SourceKind, Tile, TileGrid, ROOM_HEIGHT,
    ROOM_WIDTH,
};

/// Filler between rooms in the processed corpus.
pub const VOID_CHAR: char = '-';

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name}: unknown tile character {ch:?} at row {row}, column {col}")]
    UnknownChar { source_name: String, ch: char, row: usize, col: usize },
    #[error("{source_name}: grid of {width}x{height} characters does not tile into 16x11 rooms")]
    NotPartitionable { source_name: String, width: usize, height: usize },
    #[error("{source_name}: rows have unequal lengths (row {row} has {len}, expected {expected})")]
    Ragged { source_name: String, row: usize, len: usize, expected: usize },
    #[error("{source_name}: room block at {pos} is partly void")]
    PartialVoid { source_name: String, pos: RoomPos },
    #[error("corpus directory {0} contains no dungeon files")]
    EmptyCorpus(PathBuf),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// VGLC character to simplified tile. The void character is not a tile.
pub fn simplify_tile(c: char) -> Option<Tile> {
    match c {
        'F' => Some(Tile::Floor),
        'W' | 'B' | 'D' | 'S' => Some(Tile::Wall),
        'P' | 'O' | 'I' | 'M' => Some(Tile::Water),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct VglcDungeon {
    /// File stem, e.g. `tloz4_1`.
    pub name: String,
    pub grid: Vec<Vec<char>>,
    pub rooms: Vec<(RoomPos, Room)>,
}

impl VglcDungeon {
    pub fn parse(name: &str, text: &str) -> Result<Self, IngestError> {
        let grid: Vec<Vec<char>> = text
            .lines()
            .map(|l| l.trim_end_matches(['\r', ' ', '\t']))
            .filter(|l| !l.is_empty())
            .map(|l| l.chars().collect())
            .collect();
        let mut dungeon = VglcDungeon { name: name.to_string(), grid, rooms: Vec::new() };
        dungeon.rooms = split_rooms(&dungeon)?;
        Ok(dungeon)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse(&name, &text)
    }

    /// Quest and dungeon number parsed from a `tlozQ_N` style name.
    pub fn quest_and_number(&self) -> Option<(u32, u32)> {
        let digits = self.name.trim_start_matches(|c: char| !c.is_ascii_digit());
        let (d, q) = digits.split_once('_')?;
        Some((q.parse().ok()?, d.parse().ok()?))
    }

    /// Rooms as a dungeon keyed by lattice position, without doors.
    pub fn to_dungeon(&self) -> Dungeon {
        let mut d = Dungeon::new(DungeonMeta {
            seed: 0,
            source_kind: SourceKind::Original,
            repair_count: 0,
            repaired_rooms: Vec::new(),
        });
        for (pos, room) in &self.rooms {
            d.rooms.insert(*pos, room.clone());
        }
        d
    }
}

/// Partitions the character grid on the 16×11 lattice. Entirely void blocks
/// are skipped, as are blocks with no orthogonal neighbour (stair-only rooms).
pub fn split_rooms(dungeon: &VglcDungeon) -> Result<Vec<(RoomPos, Room)>, IngestError> {
    let source_name = dungeon.name.clone();
    let height = dungeon.grid.len();
    let width = dungeon.grid.first().map_or(0, Vec::len);
    for (row, line) in dungeon.grid.iter().enumerate() {
        if line.len() != width {
            return Err(IngestError::Ragged { source_name, row, len: line.len(), expected: width });
        }
    }
    if width == 0 || !width.is_multiple_of(ROOM_WIDTH) || !height.is_multiple_of(ROOM_HEIGHT) {
        return Err(IngestError::NotPartitionable { source_name, width, height });
    }

    let mut blocks = Vec::new();
    for by in 0..height / ROOM_HEIGHT {
        for bx in 0..width / ROOM_WIDTH {
            let pos = RoomPos::new(bx as i32, by as i32);
            let mut tiles = TileGrid::filled(Tile::Wall);
            let mut void = 0;
            for y in 0..ROOM_HEIGHT {
                for x in 0..ROOM_WIDTH {
                    let (row, col) = (by * ROOM_HEIGHT + y, bx * ROOM_WIDTH + x);
                    let ch = dungeon.grid[row][col];
                    if ch == VOID_CHAR {
                        void += 1;
                        continue;
                    }
                    let tile = simplify_tile(ch).ok_or_else(|| IngestError::UnknownChar {
                        source_name: source_name.clone(),
                        ch,
                        row,
                        col,
                    })?;
                    tiles.set(crate::model::Cell::new(x as i32, y as i32), tile);
                }
            }
            match void {
                0 => blocks.push((pos, Room::from_tiles(tiles))),
                n if n == ROOM_WIDTH * ROOM_HEIGHT => {}
                _ => return Err(IngestError::PartialVoid { source_name, pos }),
            }
        }
    }

    let occupied: HashSet<RoomPos> = blocks.iter().map(|(p, _)| *p).collect();
    if occupied.len() > 1 {
        blocks.retain(|(p, _)| Dir::ALL.iter().any(|&d| occupied.contains(&p.step(d))));
    }
    Ok(blocks)
}

/// Walls up every door slot and drops the door list; the interior is untouched.
pub fn strip_doors(room: &Room) -> Room {
    let mut out = room.clone();
    for side in Dir::ALL {
        for &c in door_slot(side) {
            out.tiles.set(c, Tile::Wall);
        }
    }
    out.doors.clear();
    out
}

/// Keeps the first room with each distinct tile grid, in order of first occurrence.
pub fn dedupe(rooms: &[Room]) -> Vec<Room> {
    let mut seen = HashSet::new();
    rooms.iter().filter(|r| seen.insert(r.tiles.clone())).cloned().collect()
}

/// All dungeons of a corpus directory, sorted by file name.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub dungeons: Vec<VglcDungeon>,
}

impl Corpus {
    pub fn load_dir(dir: &Path) -> Result<Self, IngestError> {
        let entries = fs::read_dir(dir).map_err(|source| IngestError::Io { path: dir.to_path_buf(), source })?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "txt"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(IngestError::EmptyCorpus(dir.to_path_buf()));
        }
        let dungeons = paths.iter().map(|p| VglcDungeon::load(p)).collect::<Result<_, _>>()?;
        Ok(Corpus { dungeons })
    }

    pub fn total_rooms(&self) -> usize {
        self.dungeons.iter().map(|d| d.rooms.len()).sum()
    }

    /// Door-stripped rooms of every dungeon, in corpus order.
    pub fn stripped_rooms(&self) -> Vec<Room> {
        self.dungeons.iter().flat_map(|d| d.rooms.iter().map(|(_, r)| strip_doors(r))).collect()
    }

    pub fn unique_rooms(&self) -> Vec<Room> {
        dedupe(&self.stripped_rooms())
    }
}

/// One-hot export: a header line `count 11 16 3`, then one line per room of
/// row-major 0/1 digits over (row, column, channel) with channels floor, wall, water.
pub fn one_hot_export(rooms: &[Room]) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {} {}", rooms.len(), ROOM_HEIGHT, ROOM_WIDTH, Tile::ALL.len()).unwrap();
    for room in rooms {
        for row in room.tiles.rows() {
            for &tile in row {
                for channel in Tile::ALL {
                    out.push(if tile == channel { '1' } else { '0' });
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Serialises a list of rooms as a JSON array of room objects.
pub fn rooms_to_json(rooms: &[Room]) -> String {
    let mut s = serde_json::to_string_pretty(rooms).expect("rooms serialise");
    s.push('\n');
    s
}

pub fn rooms_from_json(text: &str) -> Result<Vec<Room>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Door, DoorKind};

    fn block(fill: char) -> Vec<String> {
        let mut rows = Vec::new();
        for y in 0..ROOM_HEIGHT {
            let row: String = (0..ROOM_WIDTH)
                .map(|x| {
                    if fill == VOID_CHAR {
                        VOID_CHAR
                    } else if x < 2 || x >= 14 || y < 2 || y >= 9 {
                        'W'
                    } else {
                        fill
                    }
                })
                .collect();
            rows.push(row);
        }
        rows
    }

    fn join(grid: &[Vec<Vec<String>>]) -> String {
        let mut text = String::new();
        for band in grid {
            for y in 0..ROOM_HEIGHT {
                for b in band {
                    text.push_str(&b[y]);
                }
                text.push('\n');
            }
        }
        text
    }

    #[test]
    fn table_one_mapping() {
        assert_eq!(simplify_tile('F'), Some(Tile::Floor));
        for c in ['W', 'B', 'D', 'S'] {
            assert_eq!(simplify_tile(c), Some(Tile::Wall), "{c}");
        }
        for c in ['P', 'O', 'I', 'M'] {
            assert_eq!(simplify_tile(c), Some(Tile::Water), "{c}");
        }
        assert_eq!(simplify_tile('X'), None);
        assert_eq!(simplify_tile(VOID_CHAR), None);
    }

    #[test]
    fn two_by_two_tiling() {
        let text = join(&[vec![block('F'), block('P')], vec![block('B'), block('F')]]);
        let d = VglcDungeon::parse("tloz1_1", &text).unwrap();
        let positions: Vec<RoomPos> = d.rooms.iter().map(|(p, _)| *p).collect();
        assert_eq!(
            positions,
            vec![RoomPos::new(0, 0), RoomPos::new(1, 0), RoomPos::new(0, 1), RoomPos::new(1, 1)]
        );
        assert_eq!(d.rooms[1].1.tiles.get(Cell::new(5, 5)), Tile::Water);
        assert_eq!(d.rooms[2].1.tiles.get(Cell::new(5, 5)), Tile::Wall);
    }

    #[test]
    fn void_block_skipped() {
        let text = join(&[vec![block('F'), block('F')], vec![block(VOID_CHAR), block('F')]]);
        let d = VglcDungeon::parse("x", &text).unwrap();
        assert_eq!(d.rooms.len(), 3);
        assert!(d.rooms.iter().all(|(p, _)| *p != RoomPos::new(0, 1)));
    }

    #[test]
    fn isolated_block_is_treated_as_stair_room() {
        let text = join(&[
            vec![block('F'), block('F'), block(VOID_CHAR)],
            vec![block(VOID_CHAR), block(VOID_CHAR), block('F')],
        ]);
        let d = VglcDungeon::parse("x", &text).unwrap();
        assert_eq!(d.rooms.len(), 2);
    }

    #[test]
    fn unknown_char_reports_location() {
        let mut b = block('F');
        b[4].replace_range(3..4, "Z");
        let err = VglcDungeon::parse("tloz2_1", &join(&[vec![b]])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'Z'") && msg.contains("row 4") && msg.contains("column 3"), "{msg}");
    }

    #[test]
    fn bad_dimensions_rejected() {
        let text = "FFFF\nFFFF\n";
        match VglcDungeon::parse("x", text) {
            Err(IngestError::NotPartitionable { width: 4, height: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strip_doors_walls_slots_and_is_idempotent() {
        let mut room = Room::from_tiles(TileGrid::walled_floor());
        room.set_door(Door::new(Dir::N, DoorKind::Normal));
        let stripped = strip_doors(&room);
        assert!(stripped.doors.is_empty());
        for &c in door_slot(Dir::N) {
            assert_eq!(stripped.tiles.get(c), Tile::Wall);
        }
        assert_eq!(strip_doors(&stripped), stripped);
        let plain = Room::from_tiles(TileGrid::walled_floor());
        assert_eq!(strip_doors(&plain), plain);
    }

    #[test]
    fn dedupe_keeps_first_occurrences() {
        let a = Room::from_tiles(TileGrid::walled_floor());
        let mut b = a.clone();
        b.tiles.set(Cell::new(4, 4), Tile::Water);
        let out = dedupe(&[a.clone(), a.clone(), b.clone(), a.clone()]);
        assert_eq!(out, vec![a, b]);
    }

    #[test]
    fn one_hot_header_and_width() {
        let rooms = vec![Room::from_tiles(TileGrid::walled_floor())];
        let text = one_hot_export(&rooms);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("1 11 16 3"));
        let body = lines.next().unwrap();
        assert_eq!(body.len(), 11 * 16 * 3);
        // (0,0) is wall: channels 0,1,0
        assert_eq!(&body[..3], "010");
    }

    #[test]
    fn quest_number_from_name() {
        let d = VglcDungeon { name: "tloz4_1".into(), grid: vec![], rooms: vec![] };
        assert_eq!(d.quest_and_number(), Some((1, 4)));
    }
}
