//! Beatability check and repair.
//!
//! `solve` runs A* over an abstract state (position, keys picked up, locks
//! opened, puzzles pushed, raft) that ignores enemies and assumes unlimited
//! bombs. When no plan exists, `repair_loop` carves floor lines between points
//! of interest until one does.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::ActionInput;
use crate::grammar::RuleSet;
use crate::layout::{build_dungeon, BuiltDungeon, DecorationWarning, LayoutError, RoomSource};
use crate::model::{
    crossing_target, door_front, door_inner_cell, slot_side, Cell, Dir, DoorKind, Dungeon, ItemKind, Room, RoomPos,
    RoomSymbol, Tile, INTERIOR_CENTER, ROOM_HEIGHT, ROOM_WIDTH,
};

pub const REPAIR_ITERATION_CAP: usize = 100;
pub const GENERATION_ATTEMPTS: usize = 20;

/// 4-connected Bresenham line from `a` to `b`, both ends included. Where the
/// classic line would step diagonally, the horizontal step comes first.
pub fn line4(a: Cell, b: Cell) -> Vec<Cell> {
    let dx = (b.x - a.x).abs();
    let dy = -(b.y - a.y).abs();
    let sx = (b.x - a.x).signum();
    let sy = (b.y - a.y).signum();
    let mut err = dx + dy;
    let (mut x, mut y) = (a.x, a.y);
    let mut out = vec![a];
    while (x, y) != (b.x, b.y) {
        let e2 = 2 * err;
        let step_x = e2 >= dy;
        let step_y = e2 <= dx;
        if step_x {
            err += dy;
            x += sx;
            out.push(Cell::new(x, y));
        }
        if step_y {
            err += dx;
            y += sy;
            out.push(Cell::new(x, y));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PoiKind {
    Start,
    Door(Dir),
    Key,
    Raft,
    Triforce,
    PuzzlePre,
    PuzzlePost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poi {
    pub room: RoomPos,
    pub kind: PoiKind,
    pub cell: Cell,
}

impl Poi {
    /// Interior end of a carved line. Doors carve from the cell in front of
    /// the slot so the border stays intact.
    pub fn carve_cell(&self) -> Cell {
        match self.kind {
            PoiKind::Door(side) => door_front(side),
            _ => self.cell,
        }
    }
}

/// Every point of interest, in room order.
pub fn pois(dungeon: &Dungeon) -> Vec<Poi> {
    let mut out = Vec::new();
    let start = dungeon.start_room();
    for (&room, r) in &dungeon.rooms {
        if room == start {
            out.push(Poi { room, kind: PoiKind::Start, cell: INTERIOR_CENTER });
        }
        for d in &r.doors {
            out.push(Poi { room, kind: PoiKind::Door(d.side), cell: door_inner_cell(d.side) });
        }
        for item in &r.items {
            let kind = match item.kind {
                ItemKind::Key => PoiKind::Key,
                ItemKind::Raft => PoiKind::Raft,
                ItemKind::Triforce => PoiKind::Triforce,
                ItemKind::Heart | ItemKind::Bomb => continue,
            };
            out.push(Poi { room, kind, cell: item.cell });
        }
        if let Some(p) = r.puzzle {
            out.push(Poi { room, kind: PoiKind::PuzzlePre, cell: p.pre_push_poi });
            out.push(Poi { room, kind: PoiKind::PuzzlePost, cell: p.post_push_poi });
        }
    }
    out
}

/// Turns every non-door cell on the line between the two POIs into floor.
pub fn carve(room: &Room, from: &Poi, to: &Poi) -> Room {
    let mut out = room.clone();
    for c in line4(from.carve_cell(), to.carve_cell()) {
        if !room.is_door_cell(c) {
            out.tiles.set(c, Tile::Floor);
        }
    }
    out
}

fn carve_changes(room: &Room, a: &Poi, b: &Poi) -> bool {
    line4(a.carve_cell(), b.carve_cell())
        .into_iter()
        .any(|c| !room.is_door_cell(c) && room.tiles.get(c) != Tile::Floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SearchState {
    room: u16,
    x: i8,
    y: i8,
    keys: u64,
    locks: u64,
    puzzles: u64,
    raft: bool,
}

impl SearchState {
    fn cell(&self) -> Cell {
        Cell::new(self.x as i32, self.y as i32)
    }

    fn keys_held(&self) -> u32 {
        self.keys.count_ones() - self.locks.count_ones()
    }
}

/// Static lookup tables for one dungeon.
struct World<'a> {
    rooms: Vec<(RoomPos, &'a Room)>,
    index: HashMap<RoomPos, u16>,
    keys: HashMap<(u16, Cell), usize>,
    locks: HashMap<(u16, Dir), usize>,
    puzzles: HashMap<u16, usize>,
}

impl<'a> World<'a> {
    fn new(dungeon: &'a Dungeon) -> Self {
        let rooms: Vec<(RoomPos, &Room)> = dungeon.rooms.iter().map(|(&p, r)| (p, r)).collect();
        let index: HashMap<RoomPos, u16> = rooms.iter().enumerate().map(|(i, (p, _))| (*p, i as u16)).collect();
        let mut keys = HashMap::new();
        let mut locks = HashMap::new();
        let mut puzzles = HashMap::new();
        for (i, (pos, room)) in rooms.iter().enumerate() {
            let i = i as u16;
            for item in room.items.iter().filter(|it| it.kind == ItemKind::Key) {
                let n = keys.len();
                keys.entry((i, item.cell)).or_insert(n);
            }
            for d in room.doors.iter().filter(|d| d.kind == DoorKind::Locked && !d.open) {
                // Facing locked doors share one bit.
                let other = index.get(&pos.step(d.side)).copied();
                let shared = other.and_then(|o| locks.get(&(o, d.side.opposite())).copied());
                let n = locks.len();
                locks.insert((i, d.side), shared.unwrap_or(n));
            }
            if room.puzzle.is_some() {
                let n = puzzles.len();
                puzzles.insert(i, n);
            }
        }
        World { rooms, index, keys, locks, puzzles }
    }

    fn global(&self, room: u16, cell: Cell) -> (i32, i32) {
        let p = self.rooms[room as usize].0;
        (p.x * ROOM_WIDTH as i32 + cell.x, p.y * ROOM_HEIGHT as i32 + cell.y)
    }

    fn block_at(&self, s: &SearchState, cell: Cell) -> bool {
        let room = self.rooms[s.room as usize].1;
        match (room.puzzle, self.puzzles.get(&s.room)) {
            (Some(p), Some(&bit)) => {
                let pushed = s.puzzles & (1 << bit) != 0;
                cell == if pushed { p.post_push_poi } else { p.block_cell }
            }
            _ => false,
        }
    }

    /// Successor states with their action and cost.
    fn successors(&self, s: &SearchState, out: &mut Vec<(SearchState, Dir, u32)>) {
        out.clear();
        let (pos, room) = self.rooms[s.room as usize];
        let from = s.cell();
        for dir in Dir::ALL {
            let to = from.step(dir);
            if !to.in_room() {
                if slot_side(from) == Some(dir) && room.door(dir).is_some() {
                    if let Some(&next) = self.index.get(&pos.step(dir)) {
                        let c = crossing_target(dir, from);
                        out.push((SearchState { room: next, x: c.x as i8, y: c.y as i8, ..*s }, dir, 1));
                    }
                }
                continue;
            }
            let mut next = *s;
            if let (Some(p), Some(&bit)) = (room.puzzle, self.puzzles.get(&s.room)) {
                let pushed = s.puzzles & (1 << bit) != 0;
                if to == (if pushed { p.post_push_poi } else { p.block_cell }) {
                    let post = p.post_push_poi;
                    let free = post.in_room() && room.tiles.get(post) == Tile::Floor && room.item_at(post).is_none();
                    if !pushed && dir == p.push_direction && free {
                        next.puzzles |= 1 << bit;
                        next.x = to.x as i8;
                        next.y = to.y as i8;
                        out.push((next, dir, 1));
                    }
                    continue;
                }
            }
            if let Some(side) = slot_side(to) {
                if let Some(door) = room.door(side) {
                    if slot_side(from) != Some(side) && !door.open {
                        match door.kind {
                            DoorKind::Normal | DoorKind::SoftLocked | DoorKind::Bombable => {}
                            DoorKind::Puzzle => {
                                let solved = self.puzzles.get(&s.room).is_some_and(|&b| s.puzzles & (1 << b) != 0);
                                if !solved {
                                    continue;
                                }
                            }
                            DoorKind::Locked => {
                                let bit = self.locks[&(s.room, side)];
                                if next.locks & (1 << bit) == 0 {
                                    if next.keys_held() == 0 {
                                        continue;
                                    }
                                    next.locks |= 1 << bit;
                                }
                            }
                        }
                    }
                }
            }
            let (land, cost) = match room.tiles.get(to) {
                Tile::Floor => (to, 1),
                Tile::Wall => continue,
                Tile::Water => {
                    let land = to.step(dir);
                    let ok = s.raft
                        && to.is_interior()
                        && land.is_interior()
                        && room.tiles.get(land) == Tile::Floor
                        && !self.block_at(s, land);
                    if !ok {
                        continue;
                    }
                    (land, 2)
                }
            };
            next.x = land.x as i8;
            next.y = land.y as i8;
            if let Some(&k) = self.keys.get(&(s.room, land)) {
                next.keys |= 1 << k;
            }
            if room.item_at(land) == Some(ItemKind::Raft) {
                next.raft = true;
            }
            out.push((next, dir, cost));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FailureReport {
    pub visited: Vec<Poi>,
    pub unvisited: Vec<Poi>,
    pub states_explored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Plan(Vec<ActionInput>),
    Failure(FailureReport),
}

impl SolveResult {
    pub fn is_plan(&self) -> bool {
        matches!(self, SolveResult::Plan(_))
    }
}

/// A* from the start room's centre to the Triforce.
pub fn solve(dungeon: &Dungeon) -> SolveResult {
    let world = World::new(dungeon);
    let all_pois = pois(dungeon);
    let Some((goal_room, goal_cell)) = dungeon.triforce() else {
        return SolveResult::Failure(FailureReport { visited: vec![], unvisited: all_pois, states_explored: 0 });
    };
    let Some(&start_room) = world.index.get(&dungeon.start_room()) else {
        return SolveResult::Failure(FailureReport { visited: vec![], unvisited: all_pois, states_explored: 0 });
    };
    let goal_room = world.index[&goal_room];
    let goal = world.global(goal_room, goal_cell);
    let h = |s: &SearchState| {
        let (x, y) = world.global(s.room, s.cell());
        ((x - goal.0).abs() + (y - goal.1).abs()) as u32
    };

    let start = SearchState {
        room: start_room,
        x: INTERIOR_CENTER.x as i8,
        y: INTERIOR_CENTER.y as i8,
        keys: 0,
        locks: 0,
        puzzles: 0,
        raft: false,
    };
    // Nodes: state, parent, move that reached it.
    let mut nodes: Vec<(SearchState, usize, Dir)> = vec![(start, usize::MAX, Dir::N)];
    let mut best: HashMap<SearchState, u32> = HashMap::from([(start, 0)]);
    let mut heap = BinaryHeap::from([Reverse((h(&start), 0u32, 0usize))]);
    let mut visited_cells: HashSet<(u16, Cell)> = HashSet::new();
    let mut succ = Vec::with_capacity(4);
    let mut found = None;
    while let Some(Reverse((_, g, id))) = heap.pop() {
        let s = nodes[id].0;
        if best.get(&s).is_some_and(|&b| b < g) {
            continue;
        }
        visited_cells.insert((s.room, s.cell()));
        if s.room == goal_room && s.cell() == goal_cell {
            found = Some(id);
            break;
        }
        world.successors(&s, &mut succ);
        for &(n, dir, cost) in &succ {
            let ng = g + cost;
            if best.get(&n).is_some_and(|&b| b <= ng) {
                continue;
            }
            best.insert(n, ng);
            nodes.push((n, id, dir));
            heap.push(Reverse((ng + h(&n), ng, nodes.len() - 1)));
        }
    }

    let Some(goal_id) = found else {
        let (visited, unvisited) = all_pois
            .into_iter()
            .partition(|p| world.index.get(&p.room).is_some_and(|&r| visited_cells.contains(&(r, p.cell))));
        return SolveResult::Failure(FailureReport { visited, unvisited, states_explored: best.len() });
    };

    let mut path = Vec::new();
    let mut id = goal_id;
    while nodes[id].1 != usize::MAX {
        path.push(id);
        id = nodes[id].1;
    }
    path.reverse();
    let mut plan = Vec::with_capacity(path.len());
    let mut bombed: HashSet<(RoomPos, Dir)> = HashSet::new();
    for id in path {
        let (_, parent, dir) = nodes[id];
        let prev = nodes[parent].0;
        let (pos, room) = world.rooms[prev.room as usize];
        let from = prev.cell();
        let to = from.step(dir);
        if to.in_room() && slot_side(to) == Some(dir) && slot_side(from).is_none() {
            if let Some(d) = room.door(dir) {
                if d.kind == DoorKind::Bombable && !d.open && !bombed.contains(&(pos, dir)) {
                    plan.push(ActionInput::Bomb(dir));
                    bombed.insert((pos, dir));
                    bombed.insert((pos.step(dir), dir.opposite()));
                }
            }
        }
        plan.push(ActionInput::moving(dir));
    }
    SolveResult::Plan(plan)
}

#[derive(Debug, Error)]
pub enum RepairError {
    #[error("dungeon still unbeatable after {iterations} carves")]
    CapExceeded { iterations: usize, dump: Box<String> },
    #[error("no carve between points of interest can change the dungeon")]
    Stuck { dump: Box<String> },
}

#[derive(Debug, Clone)]
pub struct Repaired {
    pub dungeon: Dungeon,
    pub plan: Vec<ActionInput>,
    pub repair_count: u32,
}

/// Carves until `solve` finds a plan. Each round picks a random unvisited POI
/// and a random visited POI in its room (or a second unvisited one when the
/// room has no visited POI), considering only pairs whose line would change
/// at least one tile.
pub fn repair_loop<R: Rng + ?Sized>(mut dungeon: Dungeon, rng: &mut R) -> Result<Repaired, RepairError> {
    let mut carves = 0usize;
    let mut touched: BTreeSet<RoomPos> = dungeon.meta.repaired_rooms.iter().copied().collect();
    loop {
        let report = match solve(&dungeon) {
            SolveResult::Plan(plan) => {
                dungeon.meta.repair_count += carves as u32;
                dungeon.meta.repaired_rooms = touched.into_iter().collect();
                return Ok(Repaired { dungeon, plan, repair_count: carves as u32 });
            }
            SolveResult::Failure(report) => report,
        };
        if carves >= REPAIR_ITERATION_CAP {
            return Err(RepairError::CapExceeded { iterations: carves, dump: Box::new(dungeon.to_json()) });
        }
        let partners = |u: &Poi| -> Vec<Poi> {
            let room = &dungeon.rooms[&u.room];
            let same_room = |p: &&Poi| p.room == u.room && p.carve_cell() != u.carve_cell();
            let visited: Vec<Poi> = report.visited.iter().filter(same_room).copied().collect();
            let pool = if visited.is_empty() {
                report.unvisited.iter().filter(same_room).copied().collect()
            } else {
                visited
            };
            pool.into_iter().filter(|p| carve_changes(room, p, u)).collect()
        };
        let candidates: Vec<(Poi, Vec<Poi>)> = report
            .unvisited
            .iter()
            .map(|u| (*u, partners(u)))
            .filter(|(_, p)| !p.is_empty())
            .collect();
        let Some((target, options)) = candidates.choose(rng) else {
            return Err(RepairError::Stuck { dump: Box::new(dungeon.to_json()) });
        };
        let from = *options.choose(rng).expect("non-empty");
        let room = dungeon.rooms.get_mut(&target.room).expect("poi room");
        *room = carve(room, &from, target);
        touched.insert(target.room);
        carves += 1;
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("no beatable dungeon after {attempts} attempts: {last}")]
    Unrepairable { attempts: usize, last: RepairError },
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub dungeon: Dungeon,
    pub plan: Vec<ActionInput>,
    pub warnings: Vec<DecorationWarning>,
    /// Builds discarded because repair gave up.
    pub discarded: usize,
}

/// Seed used for the `attempt`-th try of a master seed.
pub fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    if attempt == 0 {
        seed
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        rng.random()
    }
}

/// Builds and repairs a dungeon, starting over with a derived seed when
/// repair gives up.
pub fn generate_playable(
    backbone: &[RoomSymbol],
    rules: &RuleSet,
    source: RoomSource<'_>,
    seed: u64,
) -> Result<Generated, GenerateError> {
    let mut last = None;
    for attempt in 0..GENERATION_ATTEMPTS {
        let s = attempt_seed(seed, attempt);
        let BuiltDungeon { dungeon, warnings, .. } = build_dungeon(backbone, rules, source, s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        rng.set_stream(u64::MAX);
        match repair_loop(dungeon, &mut rng) {
            Ok(r) => return Ok(Generated { dungeon: r.dungeon, plan: r.plan, warnings, discarded: attempt }),
            Err(e) => last = Some(e),
        }
    }
    Err(GenerateError::Unrepairable { attempts: GENERATION_ATTEMPTS, last: last.expect("at least one attempt") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Door, DungeonMeta, ItemPlacement, SourceKind, TileGrid};

    fn meta() -> DungeonMeta {
        DungeonMeta { seed: 0, source_kind: SourceKind::Pool, repair_count: 0, repaired_rooms: vec![] }
    }

    /// Independent rasteriser: classic 8-connected Bresenham, then every
    /// diagonal step split into horizontal followed by vertical.
    fn reference_line(a: Cell, b: Cell) -> Vec<Cell> {
        let mut pts = Vec::new();
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let n = dx.abs().max(dy.abs());
        for i in 0..=n {
            // Round-half-toward-start interpolation matches Bresenham's
            // midpoint choice for these inputs.
            let t = |d: i32| if n == 0 { 0 } else { (2 * d * i + n * d.signum()).div_euclid(2 * n) };
            let (x, y) = if dx.abs() >= dy.abs() { (a.x + dx.signum() * i, a.y + t(dy)) } else { (a.x + t(dx), a.y + dy.signum() * i) };
            pts.push(Cell::new(x, y));
        }
        let mut out = vec![pts[0]];
        for w in pts.windows(2) {
            if w[0].x != w[1].x && w[0].y != w[1].y {
                out.push(Cell::new(w[1].x, w[0].y));
            }
            out.push(w[1]);
        }
        out
    }

    #[test]
    fn axis_line() {
        let l = line4(Cell::new(2, 5), Cell::new(13, 5));
        assert_eq!(l, (2..=13).map(|x| Cell::new(x, 5)).collect::<Vec<_>>());
    }

    #[test]
    fn slanted_line_matches_reference() {
        let l = line4(Cell::new(2, 2), Cell::new(5, 4));
        assert_eq!(l, reference_line(Cell::new(2, 2), Cell::new(5, 4)));
        assert_eq!(l.len(), 6);
        for w in l.windows(2) {
            assert_eq!(w[0].manhattan(w[1]), 1);
        }
    }

    #[test]
    fn lines_are_four_connected_monotone_and_tight() {
        for ax in 2..14 {
            for ay in 2..9 {
                for (bx, by) in [(13, 8), (2, 8), (9, 2), (ax, 5), (5, ay)] {
                    let (a, b) = (Cell::new(ax, ay), Cell::new(bx, by));
                    let l = line4(a, b);
                    assert_eq!(l.len() as i32, a.manhattan(b) + 1);
                    assert_eq!((l[0], *l.last().unwrap()), (a, b));
                    assert!(l.windows(2).all(|w| w[0].manhattan(w[1]) == 1));
                }
            }
        }
    }

    fn room_with(edit: impl FnOnce(&mut Room)) -> Room {
        let mut r = Room::from_tiles(TileGrid::walled_floor());
        edit(&mut r);
        r
    }

    #[test]
    fn carve_is_idempotent_and_skips_doors() {
        let room = room_with(|r| {
            for y in 2..9 {
                r.tiles.set(Cell::new(6, y), Tile::Water);
            }
            r.set_door(Door::new(Dir::W, DoorKind::Normal));
        });
        let a = Poi { room: RoomPos::ORIGIN, kind: PoiKind::Door(Dir::W), cell: door_inner_cell(Dir::W) };
        let b = Poi { room: RoomPos::ORIGIN, kind: PoiKind::Key, cell: Cell::new(12, 7) };
        let once = carve(&room, &a, &b);
        assert!(once.violations().is_empty());
        assert_eq!(carve(&once, &a, &b), once);
        assert!(line4(a.carve_cell(), b.carve_cell()).iter().all(|&c| once.tiles.get(c) == Tile::Floor));
    }

    fn dungeon(rooms: Vec<(RoomPos, Room)>) -> Dungeon {
        let mut d = Dungeon::new(meta());
        d.rooms = rooms.into_iter().collect();
        d
    }

    #[test]
    fn open_room_is_solvable() {
        let d = dungeon(vec![(
            RoomPos::ORIGIN,
            room_with(|r| r.items.push(ItemPlacement { kind: ItemKind::Triforce, cell: Cell::new(12, 3) })),
        )]);
        match solve(&d) {
            SolveResult::Plan(p) => assert_eq!(p.len(), 7),
            f => panic!("{f:?}"),
        }
    }

    fn pair(kind: DoorKind, with_key: bool) -> Dungeon {
        let a = room_with(|r| {
            r.set_door(Door::new(Dir::E, kind));
            if with_key {
                r.items.push(ItemPlacement { kind: ItemKind::Key, cell: Cell::new(3, 3) });
            }
        });
        let b = room_with(|r| {
            r.set_door(Door::new(Dir::W, kind));
            r.items.push(ItemPlacement { kind: ItemKind::Triforce, cell: INTERIOR_CENTER });
        });
        dungeon(vec![(RoomPos::ORIGIN, a), (RoomPos::new(1, 0), b)])
    }

    #[test]
    fn bombable_door_needs_no_bombs_in_hand() {
        match solve(&pair(DoorKind::Bombable, false)) {
            SolveResult::Plan(p) => assert_eq!(p.iter().filter(|a| matches!(a, ActionInput::Bomb(Dir::E))).count(), 1),
            f => panic!("{f:?}"),
        }
    }

    #[test]
    fn lock_without_key_fails_with_door_unvisited() {
        let SolveResult::Failure(report) = solve(&pair(DoorKind::Locked, false)) else { panic!() };
        assert!(report.unvisited.iter().any(|p| p.kind == PoiKind::Door(Dir::E) && p.room == RoomPos::ORIGIN));
        assert!(report.visited.iter().any(|p| p.kind == PoiKind::Start));
        assert!(solve(&pair(DoorKind::Locked, true)).is_plan());
    }

    #[test]
    fn walled_off_triforce_gets_carved() {
        let mut d = dungeon(vec![(
            RoomPos::ORIGIN,
            room_with(|r| {
                for y in 2..9 {
                    r.tiles.set(Cell::new(10, y), Tile::Wall);
                }
                r.items.push(ItemPlacement { kind: ItemKind::Triforce, cell: Cell::new(12, 5) });
            }),
        )]);
        d.start = Some(RoomPos::ORIGIN);
        assert!(!solve(&d).is_plan());
        let fixed = repair_loop(d, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(fixed.repair_count >= 1);
        assert_eq!(fixed.dungeon.meta.repaired_rooms, vec![RoomPos::ORIGIN]);
        assert!(solve(&fixed.dungeon).is_plan());
    }

    #[test]
    fn beatable_dungeon_is_untouched() {
        let d = pair(DoorKind::Normal, false);
        let r = repair_loop(d.clone(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(r.repair_count, 0);
        assert_eq!(r.dungeon, d);
    }
}
