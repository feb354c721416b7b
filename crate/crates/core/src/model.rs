//! Rooms, doors, dungeons and mission graphs.
//!
//! A room is a 16×11 tile grid with a two-cell-thick border. The playable
//! interior is the inner 12×7 block; doors sit in the centre of each side.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const ROOM_WIDTH: usize = 16;
pub const ROOM_HEIGHT: usize = 11;
pub const BORDER: i32 = 2;
pub const INTERIOR_WIDTH: usize = 12;
pub const INTERIOR_HEIGHT: usize = 7;
pub const INTERIOR_CELL_COUNT: usize = INTERIOR_WIDTH * INTERIOR_HEIGHT;

/// Centre of the interior. The interior is 12 wide, so the centre column is
/// ambiguous; the left of the two middle columns is used.
pub const INTERIOR_CENTER: Cell = Cell { x: 7, y: 5 };

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("room {room}: {message}")]
    Room { room: String, message: String },
    #[error("malformed dungeon file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dungeon invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tile {
    Floor,
    Wall,
    Water,
}

impl Tile {
    pub const ALL: [Tile; 3] = [Tile::Floor, Tile::Wall, Tile::Water];

    pub fn to_char(self) -> char {
        match self {
            Tile::Floor => '.',
            Tile::Wall => 'W',
            Tile::Water => '~',
        }
    }

    pub fn from_char(c: char) -> Option<Tile> {
        match c {
            '.' => Some(Tile::Floor),
            'W' => Some(Tile::Wall),
            '~' => Some(Tile::Water),
            _ => None,
        }
    }
}

/// Compass direction. Used both for room sides and for movement; north is -y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::N => (0, -1),
            Dir::E => (1, 0),
            Dir::S => (0, 1),
            Dir::W => (-1, 0),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dir::N => "N",
            Dir::E => "E",
            Dir::S => "S",
            Dir::W => "W",
        };
        f.write_str(s)
    }
}

/// A cell inside a room, in tile coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl From<[i32; 2]> for Cell {
    fn from([x, y]: [i32; 2]) -> Self {
        Cell { x, y }
    }
}

impl From<Cell> for [i32; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn step(self, dir: Dir) -> Cell {
        let (dx, dy) = dir.delta();
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn in_room(self) -> bool {
        self.x >= 0 && self.y >= 0 && (self.x as usize) < ROOM_WIDTH && (self.y as usize) < ROOM_HEIGHT
    }

    pub fn is_interior(self) -> bool {
        self.x >= BORDER
            && self.y >= BORDER
            && self.x < ROOM_WIDTH as i32 - BORDER
            && self.y < ROOM_HEIGHT as i32 - BORDER
    }

    pub fn manhattan(self, other: Cell) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn chebyshev(self, other: Cell) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Position of a room on the dungeon's integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoomPos {
    pub x: i32,
    pub y: i32,
}

impl RoomPos {
    pub const ORIGIN: RoomPos = RoomPos { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        RoomPos { x, y }
    }

    pub fn step(self, dir: Dir) -> RoomPos {
        let (dx, dy) = dir.delta();
        RoomPos::new(self.x + dx, self.y + dy)
    }

    /// Direction from `self` to an orthogonally adjacent `other`.
    pub fn dir_to(self, other: RoomPos) -> Option<Dir> {
        Dir::ALL.into_iter().find(|&d| self.step(d) == other)
    }

    pub fn manhattan(self, other: RoomPos) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl fmt::Display for RoomPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for RoomPos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("room key {s:?} is not of the form \"x,y\""))?;
        let x = x.trim().parse().map_err(|e| format!("room key {s:?}: {e}"))?;
        let y = y.trim().parse().map_err(|e| format!("room key {s:?}: {e}"))?;
        Ok(RoomPos::new(x, y))
    }
}

impl Serialize for RoomPos {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RoomPos {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two outer wall cells of a side's door slot.
pub fn door_anchor(side: Dir) -> [Cell; 2] {
    match side {
        Dir::N => [Cell::new(7, 0), Cell::new(8, 0)],
        Dir::S => [Cell::new(7, 10), Cell::new(8, 10)],
        Dir::W => [Cell::new(0, 5), Cell::new(1, 5)],
        Dir::E => [Cell::new(15, 5), Cell::new(14, 5)],
    }
}

/// Every cell a door on `side` occupies: the passage through the border.
pub fn door_slot(side: Dir) -> &'static [Cell] {
    const N: [Cell; 4] = [Cell::new(7, 0), Cell::new(8, 0), Cell::new(7, 1), Cell::new(8, 1)];
    const S: [Cell; 4] = [Cell::new(7, 10), Cell::new(8, 10), Cell::new(7, 9), Cell::new(8, 9)];
    const W: [Cell; 2] = [Cell::new(0, 5), Cell::new(1, 5)];
    const E: [Cell; 2] = [Cell::new(15, 5), Cell::new(14, 5)];
    match side {
        Dir::N => &N,
        Dir::S => &S,
        Dir::W => &W,
        Dir::E => &E,
    }
}

/// Slot side a cell belongs to, if any.
pub fn slot_side(cell: Cell) -> Option<Dir> {
    Dir::ALL.into_iter().find(|&d| door_slot(d).contains(&cell))
}

/// The slot cell of `side` touching the interior (the door's point of interest).
pub fn door_inner_cell(side: Dir) -> Cell {
    match side {
        Dir::N => Cell::new(7, 1),
        Dir::S => Cell::new(7, 9),
        Dir::W => Cell::new(1, 5),
        Dir::E => Cell::new(14, 5),
    }
}

/// The interior cell directly in front of a door.
pub fn door_front(side: Dir) -> Cell {
    door_inner_cell(side).step(side.opposite())
}

/// Cell reached when walking off the edge of a room through the slot on `side`:
/// the matching outer slot cell in the neighbouring room.
pub fn crossing_target(side: Dir, cell: Cell) -> Cell {
    match side {
        Dir::N => Cell::new(cell.x, ROOM_HEIGHT as i32 - 1),
        Dir::S => Cell::new(cell.x, 0),
        Dir::W => Cell::new(ROOM_WIDTH as i32 - 1, cell.y),
        Dir::E => Cell::new(0, cell.y),
    }
}

/// The 12×7 interior in row-major order.
pub fn interior_cells() -> Vec<Cell> {
    let mut cells = Vec::with_capacity(INTERIOR_CELL_COUNT);
    for y in BORDER..ROOM_HEIGHT as i32 - BORDER {
        for x in BORDER..ROOM_WIDTH as i32 - BORDER {
            cells.push(Cell::new(x, y));
        }
    }
    cells
}

/// A 16×11 grid of tiles.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TileGrid {
    cells: [[Tile; ROOM_WIDTH]; ROOM_HEIGHT],
}

impl TileGrid {
    pub fn filled(tile: Tile) -> Self {
        TileGrid { cells: [[tile; ROOM_WIDTH]; ROOM_HEIGHT] }
    }

    /// Solid wall ring around a floor interior.
    pub fn walled_floor() -> Self {
        let mut grid = TileGrid::filled(Tile::Wall);
        for c in interior_cells() {
            grid.set(c, Tile::Floor);
        }
        grid
    }

    pub fn get(&self, cell: Cell) -> Tile {
        self.cells[cell.y as usize][cell.x as usize]
    }

    /// Tile at `cell`, or `None` outside the room.
    pub fn try_get(&self, cell: Cell) -> Option<Tile> {
        cell.in_room().then(|| self.get(cell))
    }

    pub fn set(&mut self, cell: Cell, tile: Tile) {
        self.cells[cell.y as usize][cell.x as usize] = tile;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Tile; ROOM_WIDTH]> {
        self.cells.iter()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.cells.iter().map(|row| row.iter().map(|t| t.to_char()).collect()).collect()
    }

    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self, String> {
        if rows.len() != ROOM_HEIGHT {
            return Err(format!("expected {ROOM_HEIGHT} tile rows, found {}", rows.len()));
        }
        let mut grid = TileGrid::filled(Tile::Wall);
        for (y, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != ROOM_WIDTH {
                return Err(format!("tile row {y} has {} characters, expected {ROOM_WIDTH}", chars.len()));
            }
            for (x, c) in chars.into_iter().enumerate() {
                let tile = Tile::from_char(c)
                    .ok_or_else(|| format!("unknown tile character {c:?} at ({x},{y})"))?;
                grid.cells[y][x] = tile;
            }
        }
        Ok(grid)
    }
}

impl fmt::Debug for TileGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl Serialize for TileGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TileGrid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(deserializer)?;
        TileGrid::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DoorKind {
    Normal,
    Locked,
    SoftLocked,
    Puzzle,
    Bombable,
}

impl DoorKind {
    /// Soft-locked and puzzle doors are shutters: they gate leaving the room
    /// that owns them, never entering it.
    pub fn is_shutter(self) -> bool {
        matches!(self, DoorKind::SoftLocked | DoorKind::Puzzle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Door {
    pub side: Dir,
    pub kind: DoorKind,
    pub open: bool,
}

impl Door {
    pub fn new(side: Dir, kind: DoorKind) -> Self {
        Door { side, kind, open: kind == DoorKind::Normal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ItemKind {
    Key,
    Raft,
    Triforce,
    Heart,
    Bomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItemPlacement {
    pub kind: ItemKind,
    pub cell: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnemyPlacement {
    pub cell: Cell,
}

/// A pushable block. The player stands on `pre_push_poi` and pushes the block
/// one step in `push_direction`, onto `post_push_poi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PuzzleSpec {
    pub block_cell: Cell,
    pub push_direction: Dir,
    pub pre_push_poi: Cell,
    pub post_push_poi: Cell,
}

impl PuzzleSpec {
    pub fn new(block_cell: Cell, push_direction: Dir) -> Self {
        PuzzleSpec {
            block_cell,
            push_direction,
            pre_push_poi: block_cell.step(push_direction.opposite()),
            post_push_poi: block_cell.step(push_direction),
        }
    }

    pub fn is_consistent(&self) -> bool {
        *self == PuzzleSpec::new(self.block_cell, self.push_direction)
            && self.pre_push_poi.in_room()
            && self.post_push_poi.in_room()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Start,
    Enemy,
    Key,
    Lock,
    SoftLock,
    Puzzle,
    Triforce,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 7] = [
        SymbolKind::Start,
        SymbolKind::Enemy,
        SymbolKind::Key,
        SymbolKind::Lock,
        SymbolKind::SoftLock,
        SymbolKind::Puzzle,
        SymbolKind::Triforce,
    ];

    fn short(self) -> &'static str {
        match self {
            SymbolKind::Start => "S",
            SymbolKind::Enemy => "E",
            SymbolKind::Key => "K",
            SymbolKind::Lock => "L",
            SymbolKind::SoftLock => "SL",
            SymbolKind::Puzzle => "P",
            SymbolKind::Triforce => "T",
        }
    }
}

/// A grammar symbol. Non-terminals are written upper case (`K`, `SL`),
/// terminals lower case (`k`, `sl`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoomSymbol {
    kind: SymbolKind,
    terminal: bool,
}

impl RoomSymbol {
    pub const fn terminal(kind: SymbolKind) -> Self {
        RoomSymbol { kind, terminal: true }
    }

    pub const fn non_terminal(kind: SymbolKind) -> Self {
        RoomSymbol { kind, terminal: false }
    }

    pub fn kind(self) -> SymbolKind {
        self.kind
    }

    pub fn is_terminal(self) -> bool {
        self.terminal
    }

    pub fn as_terminal(self) -> Self {
        RoomSymbol::terminal(self.kind)
    }
}

impl fmt::Display for RoomSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terminal {
            f.write_str(&self.kind.short().to_ascii_lowercase())
        } else {
            f.write_str(self.kind.short())
        }
    }
}

impl FromStr for RoomSymbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        for kind in SymbolKind::ALL {
            if s == kind.short() {
                return Ok(RoomSymbol::non_terminal(kind));
            }
            if s == kind.short().to_ascii_lowercase() {
                return Ok(RoomSymbol::terminal(kind));
            }
        }
        Err(format!("unknown symbol {s:?}"))
    }
}

impl Serialize for RoomSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RoomSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub tiles: TileGrid,
    #[serde(default)]
    pub doors: Vec<Door>,
    #[serde(default)]
    pub items: Vec<ItemPlacement>,
    #[serde(default)]
    pub enemies: Vec<EnemyPlacement>,
    #[serde(default)]
    pub puzzle: Option<PuzzleSpec>,
    #[serde(default)]
    pub symbol: Option<RoomSymbol>,
    /// Mission-graph node this room realises.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
}

impl Room {
    pub fn from_tiles(tiles: TileGrid) -> Self {
        Room {
            tiles,
            doors: Vec::new(),
            items: Vec::new(),
            enemies: Vec::new(),
            puzzle: None,
            symbol: None,
            node: None,
        }
    }

    pub fn door(&self, side: Dir) -> Option<&Door> {
        self.doors.iter().find(|d| d.side == side)
    }

    pub fn door_mut(&mut self, side: Dir) -> Option<&mut Door> {
        self.doors.iter_mut().find(|d| d.side == side)
    }

    /// Adds or replaces the door on `side` and opens its slot in the tiles.
    pub fn set_door(&mut self, door: Door) {
        self.doors.retain(|d| d.side != door.side);
        self.doors.push(door);
        self.doors.sort_by_key(|d| d.side);
        for &c in door_slot(door.side) {
            self.tiles.set(c, Tile::Floor);
        }
    }

    pub fn item_at(&self, cell: Cell) -> Option<ItemKind> {
        self.items.iter().find(|i| i.cell == cell).map(|i| i.kind)
    }

    pub fn has_item(&self, kind: ItemKind) -> bool {
        self.items.iter().any(|i| i.kind == kind)
    }

    /// Cell is a slot cell of an existing door.
    pub fn is_door_cell(&self, cell: Cell) -> bool {
        slot_side(cell).is_some_and(|side| self.door(side).is_some())
    }

    /// Checks the structural room invariants, returning a description of each violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for y in 0..ROOM_HEIGHT as i32 {
            for x in 0..ROOM_WIDTH as i32 {
                let c = Cell::new(x, y);
                if c.is_interior() || self.is_door_cell(c) {
                    continue;
                }
                if self.tiles.get(c) == Tile::Floor {
                    out.push(format!("border cell {c} is floor"));
                }
            }
        }
        for (i, d) in self.doors.iter().enumerate() {
            if self.doors[..i].iter().any(|o| o.side == d.side) {
                out.push(format!("two doors on side {}", d.side));
            }
        }
        for item in &self.items {
            if !item.cell.is_interior() {
                out.push(format!("item {:?} outside the interior at {}", item.kind, item.cell));
            }
        }
        for e in &self.enemies {
            if !e.cell.is_interior() {
                out.push(format!("enemy outside the interior at {}", e.cell));
            }
        }
        if let Some(p) = &self.puzzle {
            if !p.is_consistent() || !p.block_cell.is_interior() {
                out.push(format!("inconsistent puzzle block at {}", p.block_cell));
            }
        }
        out
    }
}

/// Directed graph of room symbols produced by grammar expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MissionGraph {
    pub nodes: Vec<RoomSymbol>,
    pub edges: Vec<(usize, usize)>,
    pub start_node: usize,
    pub triforce_node: usize,
    /// Backbone position each node was derived from.
    #[serde(default)]
    pub origins: Vec<usize>,
}

impl MissionGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == node).map(|e| e.1)
    }

    /// Edge list in breadth-first order from the start node, each edge oriented
    /// so that its first element is the endpoint discovered earlier. Edges are
    /// treated as undirected for the traversal; ties follow edge-list order.
    pub fn bfs_edges(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut used = vec![false; self.edges.len()];
        let mut queue = std::collections::VecDeque::new();
        let mut out = Vec::with_capacity(self.edges.len());
        if n == 0 {
            return out;
        }
        seen[self.start_node] = true;
        queue.push_back(self.start_node);
        loop {
            while let Some(u) = queue.pop_front() {
                for (i, &(a, b)) in self.edges.iter().enumerate() {
                    if used[i] || (a != u && b != u) {
                        continue;
                    }
                    used[i] = true;
                    let other = if a == u { b } else { a };
                    out.push((u, other));
                    if !seen[other] {
                        seen[other] = true;
                        queue.push_back(other);
                    }
                }
            }
            // Disconnected remainder: not produced by a valid grammar, but keep
            // the order total.
            match (0..n).find(|&i| !seen[i]) {
                Some(i) => {
                    seen[i] = true;
                    queue.push_back(i);
                }
                None => break,
            }
        }
        out
    }

    /// Nodes in breadth-first discovery order from the start node.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.start_node];
        let mut seen = vec![false; self.nodes.len()];
        if self.nodes.is_empty() {
            return Vec::new();
        }
        seen[self.start_node] = true;
        for (_, b) in self.bfs_edges() {
            if !seen[b] {
                seen[b] = true;
                order.push(b);
            }
        }
        for (i, s) in seen.iter().enumerate() {
            if !s {
                order.push(i);
            }
        }
        order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Gan,
    Pool,
    Original,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DungeonMeta {
    pub seed: u64,
    pub source_kind: SourceKind,
    #[serde(default)]
    pub repair_count: u32,
    /// Rooms touched by at least one repair carve.
    #[serde(default)]
    pub repaired_rooms: Vec<RoomPos>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Dungeon {
    pub meta: DungeonMeta,
    pub rooms: BTreeMap<RoomPos, Room>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<MissionGraph>,
    #[serde(default)]
    pub lost_edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<RoomPos>,
}

impl Dungeon {
    pub fn new(meta: DungeonMeta) -> Self {
        Dungeon { meta, rooms: BTreeMap::new(), graph: None, lost_edges: Vec::new(), start: None }
    }

    pub fn start_room(&self) -> RoomPos {
        self.start.unwrap_or(RoomPos::ORIGIN)
    }

    /// Room holding the Triforce item.
    pub fn triforce(&self) -> Option<(RoomPos, Cell)> {
        self.rooms.iter().find_map(|(&pos, room)| {
            room.items.iter().find(|i| i.kind == ItemKind::Triforce).map(|i| (pos, i.cell))
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dungeon serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let dungeon: Dungeon = serde_json::from_str(text)?;
        let problems = dungeon.violations();
        if let Some(first) = problems.into_iter().next() {
            return Err(SchemaError::Invariant(first));
        }
        Ok(dungeon)
    }

    /// Structural invariants: per-room checks plus door symmetry.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (&pos, room) in &self.rooms {
            out.extend(room.violations().into_iter().map(|v| format!("room {pos}: {v}")));
            for door in &room.doors {
                let other = pos.step(door.side);
                let facing = self.rooms.get(&other).and_then(|r| r.door(door.side.opposite()));
                match facing {
                    None => out.push(format!("room {pos}: door {} has no facing door", door.side)),
                    Some(f) => {
                        let shared = |k: DoorKind| matches!(k, DoorKind::Locked | DoorKind::Bombable);
                        if (shared(door.kind) || shared(f.kind)) && (door.kind != f.kind || door.open != f.open) {
                            out.push(format!("room {pos}: door {} disagrees with its facing door", door.side));
                        }
                    }
                }
            }
        }
        out
    }
}
