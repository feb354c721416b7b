//! Grid layout of mission graphs, door realisation and per-symbol decoration.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gan::{normalize_border, sample_room, WeightBundle};
use crate::grammar::{expand, validate, ExpansionError, RuleSet};
use crate::model::{
    door_front, interior_cells, Cell, Dir, Door, DoorKind, Dungeon, DungeonMeta, EnemyPlacement, ItemKind,
    ItemPlacement, MissionGraph, PuzzleSpec, Room, RoomPos, RoomSymbol, SourceKind, SymbolKind, Tile,
    INTERIOR_CENTER,
};

pub const PLACEMENT_ATTEMPTS: usize = 20;
pub const BOMBABLE_PROBABILITY: f64 = 0.40;
/// Upper bound on placement search steps before giving up on one attempt.
pub const PLACEMENT_STEP_LIMIT: usize = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("no grid embedding found for the mission graph")]
    PlacementExhausted,
    #[error("placement failed {0} times")]
    Generation(usize),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error("mission graph is invalid: {0}")]
    InvalidGraph(String),
    #[error("room pool is empty")]
    EmptyPool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Grid position of each node.
    pub positions: Vec<RoomPos>,
    pub realized_edges: Vec<(usize, usize)>,
    pub lost_edges: Vec<(usize, usize)>,
}

impl Placement {
    fn classify(positions: Vec<RoomPos>, graph: &MissionGraph) -> Self {
        let (realized_edges, lost_edges) = graph
            .edges
            .iter()
            .partition(|&&(a, b)| positions[a].manhattan(positions[b]) == 1);
        Placement { positions, realized_edges, lost_edges }
    }
}

/// Places the start room at the origin, then every other room next to the room
/// that first reaches it in breadth-first edge order, backtracking
/// chronologically when a room runs out of free neighbours.
pub fn place_rooms<R: Rng + ?Sized>(graph: &MissionGraph, rng: &mut R) -> Result<Placement, LayoutError> {
    let n = graph.len();
    if n == 0 {
        return Err(LayoutError::InvalidGraph("empty graph".into()));
    }
    let mut discovered = vec![false; n];
    discovered[graph.start_node] = true;
    let mut tree = Vec::new();
    for (a, b) in graph.bfs_edges() {
        if !discovered[b] {
            discovered[b] = true;
            tree.push((a, b));
        }
    }
    let mut positions: Vec<Option<RoomPos>> = vec![None; n];
    let mut occupied: HashSet<RoomPos> = HashSet::new();
    positions[graph.start_node] = Some(RoomPos::ORIGIN);
    occupied.insert(RoomPos::ORIGIN);

    struct Frame {
        dirs: [Dir; 4],
        next: usize,
    }
    let mut stack: Vec<Frame> = Vec::with_capacity(tree.len());
    let mut i = 0;
    let mut steps = 0;
    while i < tree.len() {
        steps += 1;
        if steps > PLACEMENT_STEP_LIMIT {
            return Err(LayoutError::PlacementExhausted);
        }
        let (parent, child) = tree[i];
        if stack.len() == i {
            let mut dirs = Dir::ALL;
            dirs.shuffle(rng);
            stack.push(Frame { dirs, next: 0 });
        }
        if let Some(p) = positions[child].take() {
            occupied.remove(&p);
        }
        let base = positions[parent].expect("parent placed before child");
        let frame = &mut stack[i];
        let mut placed = false;
        while frame.next < 4 {
            let candidate = base.step(frame.dirs[frame.next]);
            frame.next += 1;
            if !occupied.contains(&candidate) {
                positions[child] = Some(candidate);
                occupied.insert(candidate);
                placed = true;
                break;
            }
        }
        if placed {
            i += 1;
        } else {
            stack.pop();
            if i == 0 {
                return Err(LayoutError::PlacementExhausted);
            }
            i -= 1;
        }
    }
    let positions = positions.into_iter().map(|p| p.expect("every node placed")).collect();
    Ok(Placement::classify(positions, graph))
}

/// Adds a normal door on both facing sides of every realised edge.
pub fn realize_doors(placement: &Placement, rooms: &mut BTreeMap<RoomPos, Room>) {
    for &(a, b) in &placement.realized_edges {
        let (pa, pb) = (placement.positions[a], placement.positions[b]);
        let dir = pa.dir_to(pb).expect("realised edges are adjacent");
        if let Some(r) = rooms.get_mut(&pa) {
            r.set_door(Door::new(dir, DoorKind::Normal));
        }
        if let Some(r) = rooms.get_mut(&pb) {
            r.set_door(Door::new(dir.opposite(), DoorKind::Normal));
        }
    }
}

/// Where undecorated rooms come from.
#[derive(Debug, Clone, Copy)]
pub enum RoomSource<'a> {
    Gan(&'a WeightBundle),
    /// Drawn uniformly with replacement.
    Pool(&'a [Room]),
}

impl RoomSource<'_> {
    pub fn kind(&self) -> SourceKind {
        match self {
            RoomSource::Gan(_) => SourceKind::Gan,
            RoomSource::Pool(_) => SourceKind::Pool,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Room, LayoutError> {
        match self {
            RoomSource::Gan(w) => Ok(sample_room(rng, w)),
            RoomSource::Pool(rooms) => {
                let mut tiles = rooms.choose(rng).ok_or(LayoutError::EmptyPool)?.tiles.clone();
                normalize_border(&mut tiles);
                Ok(Room::from_tiles(tiles))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecorationWarning {
    pub node: usize,
    pub symbol: RoomSymbol,
    pub message: String,
}

impl std::fmt::Display for DecorationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "node {} ({}): {}", self.node, self.symbol, self.message)
    }
}

fn is_reserved(room: &Room, cell: Cell) -> bool {
    room.item_at(cell).is_some()
        || room.enemies.iter().any(|e| e.cell == cell)
        || room
            .puzzle
            .is_some_and(|p| [p.block_cell, p.pre_push_poi, p.post_push_poi].contains(&cell))
}

/// Uniform empty interior floor cell. A room with none gets a random free
/// interior cell turned to floor.
fn empty_floor<R: Rng + ?Sized>(room: &mut Room, rng: &mut R) -> Option<Cell> {
    let free: Vec<Cell> = interior_cells().into_iter().filter(|&c| !is_reserved(room, c)).collect();
    let floor: Vec<Cell> = free.iter().copied().filter(|&c| room.tiles.get(c) == Tile::Floor).collect();
    if let Some(&c) = floor.choose(rng) {
        return Some(c);
    }
    let c = *free.choose(rng)?;
    room.tiles.set(c, Tile::Floor);
    Some(c)
}

fn add_enemies<R: Rng + ?Sized>(room: &mut Room, rng: &mut R) {
    let count = rng.random_range(1..=3);
    for _ in 0..count {
        if let Some(cell) = empty_floor(room, rng) {
            room.enemies.push(EnemyPlacement { cell });
        }
    }
}

fn add_item<R: Rng + ?Sized>(room: &mut Room, kind: ItemKind, rng: &mut R) {
    if let Some(cell) = empty_floor(room, rng) {
        room.items.push(ItemPlacement { kind, cell });
    }
}

/// Picks a block cell and a push direction whose flanking cells are interior.
fn add_puzzle<R: Rng + ?Sized>(room: &mut Room, rng: &mut R) {
    let fronts: Vec<Cell> = room.doors.iter().map(|d| door_front(d.side)).collect();
    let mut options = Vec::new();
    for block in interior_cells() {
        if fronts.contains(&block) || is_reserved(room, block) {
            continue;
        }
        let dirs: Vec<Dir> = Dir::ALL
            .into_iter()
            .filter(|&d| {
                let p = PuzzleSpec::new(block, d);
                [p.pre_push_poi, p.post_push_poi]
                    .iter()
                    .all(|c| c.is_interior() && !fronts.contains(c) && !is_reserved(room, *c))
            })
            .collect();
        if !dirs.is_empty() {
            options.push((block, dirs));
        }
    }
    if let Some((block, dirs)) = options.choose(rng) {
        let dir = *dirs.choose(rng).expect("non-empty");
        room.tiles.set(*block, Tile::Floor);
        room.puzzle = Some(PuzzleSpec::new(*block, dir));
    }
}

/// Applies symbol-specific content to every room, then rolls bombable doors.
pub fn decorate<R: Rng + ?Sized>(
    dungeon: &mut Dungeon,
    placement: &Placement,
    graph: &MissionGraph,
    rng: &mut R,
) -> Vec<DecorationWarning> {
    let mut warnings = Vec::new();
    let order = graph.bfs_order();
    let bfs_index: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let realized: HashSet<(RoomPos, RoomPos)> = placement
        .realized_edges
        .iter()
        .flat_map(|&(a, b)| {
            let (pa, pb) = (placement.positions[a], placement.positions[b]);
            [(pa, pb), (pb, pa)]
        })
        .collect();
    let mut raft_placed = false;

    for &node in &order {
        let symbol = graph.nodes[node];
        let pos = placement.positions[node];
        let mut warn = |message: String| warnings.push(DecorationWarning { node, symbol, message });
        // Door to the earliest successor, for symbols that gate onward progress.
        let onward = || {
            let next = graph.successors(node).min_by_key(|s| bfs_index[s])?;
            let to = placement.positions[next];
            Some((next, pos.dir_to(to).filter(|_| realized.contains(&(pos, to)))))
        };
        let room = dungeon.rooms.get_mut(&pos).expect("room filled");
        match symbol.kind() {
            SymbolKind::Start => room.tiles.set(INTERIOR_CENTER, Tile::Floor),
            SymbolKind::Enemy => add_enemies(room, rng),
            SymbolKind::Key => {
                add_item(room, ItemKind::Key, rng);
                add_enemies(room, rng);
            }
            SymbolKind::Triforce => {
                room.tiles.set(INTERIOR_CENTER, Tile::Floor);
                room.items.push(ItemPlacement { kind: ItemKind::Triforce, cell: INTERIOR_CENTER });
            }
            SymbolKind::SoftLock => {
                if !raft_placed {
                    add_item(room, ItemKind::Raft, rng);
                    raft_placed = true;
                }
                add_enemies(room, rng);
            }
            SymbolKind::Puzzle => add_puzzle(room, rng),
            SymbolKind::Lock => {}
        }
        let gate = match symbol.kind() {
            SymbolKind::Lock => DoorKind::Locked,
            SymbolKind::SoftLock => DoorKind::SoftLocked,
            SymbolKind::Puzzle => DoorKind::Puzzle,
            _ => continue,
        };
        if symbol.kind() == SymbolKind::Puzzle && room.puzzle.is_none() {
            warn("no cell fits a puzzle block".into());
            continue;
        }
        let side = match onward() {
            None => {
                warn("no successor to gate".into());
                continue;
            }
            Some((next, None)) => {
                warn(format!("edge to node {next} was lost in layout"));
                continue;
            }
            Some((_, Some(side))) => side,
        };
        let facing = pos.step(side);
        let current = |d: &Dungeon| (d.rooms[&pos].door(side).map(|d| d.kind), d.rooms[&facing].door(side.opposite()).map(|d| d.kind));
        if current(dungeon) != (Some(DoorKind::Normal), Some(DoorKind::Normal)) {
            warn(format!("door {side} is already gated"));
            continue;
        }
        dungeon.rooms.get_mut(&pos).unwrap().set_door(Door::new(side, gate));
        if gate == DoorKind::Locked {
            dungeon.rooms.get_mut(&facing).unwrap().set_door(Door::new(side.opposite(), gate));
        }
    }

    // Bombable doors on edges that are normal from both sides.
    let mut normal_edges = Vec::new();
    for (&pos, room) in &dungeon.rooms {
        for door in &room.doors {
            let other = pos.step(door.side);
            if pos < other
                && door.kind == DoorKind::Normal
                && dungeon.rooms[&other].door(door.side.opposite()).map(|d| d.kind) == Some(DoorKind::Normal)
            {
                normal_edges.push((pos, door.side));
            }
        }
    }
    let mut bombable = 0;
    for &(pos, side) in &normal_edges {
        if rng.random_bool(BOMBABLE_PROBABILITY) {
            make_bombable(dungeon, pos, side);
            bombable += 1;
        }
    }
    if bombable == 0 {
        match normal_edges.choose(rng) {
            Some(&(pos, side)) => make_bombable(dungeon, pos, side),
            None => warnings.push(DecorationWarning {
                node: graph.start_node,
                symbol: graph.nodes[graph.start_node],
                message: "no normal door can become bombable".into(),
            }),
        }
    }
    warnings
}

fn make_bombable(dungeon: &mut Dungeon, pos: RoomPos, side: Dir) {
    dungeon.rooms.get_mut(&pos).unwrap().set_door(Door::new(side, DoorKind::Bombable));
    dungeon.rooms.get_mut(&pos.step(side)).unwrap().set_door(Door::new(side.opposite(), DoorKind::Bombable));
}

#[derive(Debug, Clone)]
pub struct BuiltDungeon {
    pub dungeon: Dungeon,
    pub placement: Placement,
    pub warnings: Vec<DecorationWarning>,
}

/// Lays out and decorates an already expanded mission graph.
pub fn assemble<R: Rng + ?Sized>(
    graph: MissionGraph,
    source: RoomSource<'_>,
    seed: u64,
    rng: &mut R,
) -> Result<BuiltDungeon, LayoutError> {
    let report = validate(&graph);
    if let Some(v) = report.violations.first() {
        return Err(LayoutError::InvalidGraph(v.clone()));
    }
    let mut placement = None;
    for _ in 0..PLACEMENT_ATTEMPTS {
        match place_rooms(&graph, rng) {
            Ok(p) => {
                placement = Some(p);
                break;
            }
            Err(LayoutError::PlacementExhausted) => continue,
            Err(e) => return Err(e),
        }
    }
    let placement = placement.ok_or(LayoutError::Generation(PLACEMENT_ATTEMPTS))?;

    let mut dungeon = Dungeon::new(DungeonMeta {
        seed,
        source_kind: source.kind(),
        repair_count: 0,
        repaired_rooms: Vec::new(),
    });
    for (node, &pos) in placement.positions.iter().enumerate() {
        let mut room = source.draw(rng)?;
        room.symbol = Some(graph.nodes[node]);
        room.node = Some(node);
        dungeon.rooms.insert(pos, room);
    }
    realize_doors(&placement, &mut dungeon.rooms);
    let warnings = decorate(&mut dungeon, &placement, &graph, rng);
    dungeon.lost_edges = placement.lost_edges.clone();
    dungeon.start = Some(placement.positions[graph.start_node]);
    dungeon.graph = Some(graph);
    Ok(BuiltDungeon { dungeon, placement, warnings })
}

/// Expand, validate, place, fill, realise doors and decorate, all driven by one seed.
pub fn build_dungeon(
    backbone: &[RoomSymbol],
    rules: &RuleSet,
    source: RoomSource<'_>,
    seed: u64,
) -> Result<BuiltDungeon, LayoutError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = expand(backbone, rules, &mut rng)?;
    assemble(graph, source, seed, &mut rng)
}
