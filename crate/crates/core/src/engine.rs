//! Turn-based rogue-like play over a generated dungeon.
//!
//! The player acts first, then every live enemy in the player's room. Invalid
//! inputs are rejected with a `Blocked` event and consume no turn.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    crossing_target, interior_cells, slot_side, Cell, Dir, Door, DoorKind, Dungeon, ItemKind, ItemPlacement,
    RoomPos, SymbolKind, Tile, INTERIOR_CENTER,
};
use crate::repair::line4;

/// (starting and maximum hearts, heart drop rate) per difficulty tier.
pub const TIERS: [(u32, f64); 4] = [(4, 0.30), (6, 0.60), (8, 0.90), (20, 0.90)];
pub const MAX_TIER: usize = 3;
pub const SIGHT_RANGE: i32 = 4;

pub fn tier_params(tier: usize) -> (u32, f64) {
    TIERS[tier.min(MAX_TIER)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionInput {
    MoveN,
    MoveE,
    MoveS,
    MoveW,
    Bomb(Dir),
}

impl ActionInput {
    pub fn moving(dir: Dir) -> Self {
        match dir {
            Dir::N => ActionInput::MoveN,
            Dir::E => ActionInput::MoveE,
            Dir::S => ActionInput::MoveS,
            Dir::W => ActionInput::MoveW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionOptions {
    pub enemies: bool,
    pub infinite_bombs: bool,
    pub respawn_probability: f64,
    pub auto_restart: bool,
    pub hit_probability: f64,
    pub bomb_drop_probability: f64,
    /// Replaces the tier's heart drop rate when set.
    pub heart_drop_override: Option<f64>,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            enemies: true,
            infinite_bombs: false,
            respawn_probability: 0.30,
            auto_restart: true,
            hit_probability: 0.5,
            bomb_drop_probability: 0.30,
            heart_drop_override: None,
        }
    }
}

impl SessionOptions {
    /// Enemies off and bombs unlimited: the conditions plans are checked under.
    pub fn replay() -> Self {
        SessionOptions { enemies: false, infinite_bombs: true, ..SessionOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Playing,
    Won,
    Dead,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("session is not in play ({0:?})")]
    NotPlaying(Status),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EventKind {
    Moved { room: RoomPos, cell: Cell },
    Blocked { room: RoomPos, cell: Cell },
    Attacked { room: RoomPos, cell: Cell, hit: bool },
    EnemyKilled { room: RoomPos, cell: Cell },
    Drop { room: RoomPos, cell: Cell, item: ItemKind },
    PickedUp { room: RoomPos, cell: Cell, item: ItemKind },
    DoorOpened { room: RoomPos, side: Dir },
    Bombed { room: RoomPos, side: Dir },
    PuzzleSolved { room: RoomPos, cell: Cell },
    RoomCleared { room: RoomPos },
    EnemiesSpawned { room: RoomPos, count: usize },
    Damaged { hearts: u32 },
    Died { deaths: u32 },
    Restarted { tier: usize, hearts: u32 },
    Won { room: RoomPos, cell: Cell },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub turn: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PuzzleState {
    /// Where the block currently sits.
    pub block: Cell,
    pub solved: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GameState {
    #[serde(skip)]
    dungeon: Arc<Dungeon>,
    #[serde(skip)]
    rng: ChaCha8Rng,
    #[serde(skip)]
    options: SessionOptions,
    #[serde(skip)]
    hidden: BTreeMap<RoomPos, Vec<ItemPlacement>>,
    pub player_room: RoomPos,
    pub player_cell: Cell,
    pub hearts: u32,
    pub max_hearts: u32,
    pub bombs: u32,
    pub keys: u32,
    pub has_raft: bool,
    pub keys_collected: u32,
    pub locks_opened: u32,
    pub enemies: BTreeMap<RoomPos, Vec<Cell>>,
    pub items: BTreeMap<RoomPos, Vec<ItemPlacement>>,
    pub doors: BTreeMap<RoomPos, Vec<Door>>,
    pub puzzles: BTreeMap<RoomPos, PuzzleState>,
    pub cleared: BTreeSet<RoomPos>,
    pub tier: usize,
    pub deaths: u32,
    pub status: Status,
    pub turn: u64,
}

/// Starts play at the centre of the start room with the tier's hearts and
/// nothing else.
pub fn new_session(dungeon: Arc<Dungeon>, tier: usize, seed: u64, options: SessionOptions) -> GameState {
    let mut state = GameState {
        dungeon,
        rng: ChaCha8Rng::seed_from_u64(seed),
        options,
        hidden: BTreeMap::new(),
        player_room: RoomPos::ORIGIN,
        player_cell: INTERIOR_CENTER,
        hearts: 0,
        max_hearts: 0,
        bombs: 0,
        keys: 0,
        has_raft: false,
        keys_collected: 0,
        locks_opened: 0,
        enemies: BTreeMap::new(),
        items: BTreeMap::new(),
        doors: BTreeMap::new(),
        puzzles: BTreeMap::new(),
        cleared: BTreeSet::new(),
        tier: 0,
        deaths: 0,
        status: Status::Playing,
        turn: 0,
    };
    state.reset(tier.min(MAX_TIER));
    state
}

/// Heart with the given rate, otherwise a bomb with `bomb_rate`.
pub fn drop_roll<R: Rng + ?Sized>(rng: &mut R, heart_rate: f64, bomb_rate: f64) -> Option<ItemKind> {
    if rng.random_bool(heart_rate) {
        Some(ItemKind::Heart)
    } else if rng.random_bool(bomb_rate) {
        Some(ItemKind::Bomb)
    } else {
        None
    }
}

impl GameState {
    pub fn dungeon(&self) -> &Arc<Dungeon> {
        &self.dungeon
    }

    pub fn options(&self) -> &SessionOptions {
        &self.options
    }

    pub fn heart_drop_rate(&self) -> f64 {
        self.options.heart_drop_override.unwrap_or(tier_params(self.tier).1)
    }

    fn reset(&mut self, tier: usize) {
        let dungeon = Arc::clone(&self.dungeon);
        let (hearts, _) = tier_params(tier);
        self.tier = tier;
        self.hearts = hearts;
        self.max_hearts = hearts;
        self.bombs = 0;
        self.keys = 0;
        self.has_raft = false;
        self.keys_collected = 0;
        self.locks_opened = 0;
        self.status = Status::Playing;
        self.player_room = dungeon.start_room();
        self.player_cell = INTERIOR_CENTER;
        self.enemies.clear();
        self.items.clear();
        self.hidden.clear();
        self.doors.clear();
        self.puzzles.clear();
        self.cleared.clear();
        for (&pos, room) in &dungeon.rooms {
            let enemies = if self.options.enemies { room.enemies.iter().map(|e| e.cell).collect() } else { Vec::new() };
            self.enemies.insert(pos, enemies);
            let is_key_room = room.symbol.is_some_and(|s| s.kind() == SymbolKind::Key);
            let (hidden, visible): (Vec<_>, Vec<_>) =
                room.items.iter().partition(|i| is_key_room && i.kind == ItemKind::Key);
            self.items.insert(pos, visible);
            self.hidden.insert(pos, hidden);
            self.doors.insert(pos, room.doors.clone());
            if let Some(p) = room.puzzle {
                self.puzzles.insert(pos, PuzzleState { block: p.block_cell, solved: false });
            }
        }
        let empty: Vec<RoomPos> = self.enemies.iter().filter(|(_, e)| e.is_empty()).map(|(&p, _)| p).collect();
        let mut sink = Vec::new();
        for pos in empty {
            self.clear_room(pos, &mut sink);
        }
    }

    pub fn door(&self, room: RoomPos, side: Dir) -> Option<Door> {
        self.doors.get(&room)?.iter().find(|d| d.side == side).copied()
    }

    fn door_mut(&mut self, room: RoomPos, side: Dir) -> Option<&mut Door> {
        self.doors.get_mut(&room)?.iter_mut().find(|d| d.side == side)
    }

    fn open_door(&mut self, room: RoomPos, side: Dir, shared: bool, ev: &mut Vec<Event>) {
        if let Some(d) = self.door_mut(room, side) {
            d.open = true;
        }
        if shared {
            if let Some(d) = self.door_mut(room.step(side), side.opposite()) {
                d.open = true;
            }
        }
        self.emit(ev, EventKind::DoorOpened { room, side });
    }

    fn emit(&self, ev: &mut Vec<Event>, kind: EventKind) {
        ev.push(Event { turn: self.turn, kind });
    }

    fn tile(&self, room: RoomPos, cell: Cell) -> Tile {
        self.dungeon.rooms[&room].tiles.get(cell)
    }

    /// The pushable block, before or after its push, is solid.
    fn block_at(&self, room: RoomPos, cell: Cell) -> bool {
        self.puzzles.get(&room).is_some_and(|p| p.block == cell)
    }

    fn enemy_at(&self, room: RoomPos, cell: Cell) -> Option<usize> {
        self.enemies.get(&room)?.iter().position(|&e| e == cell)
    }

    pub fn step(&mut self, action: ActionInput) -> Result<Vec<Event>, StateError> {
        if self.status != Status::Playing {
            return Err(StateError::NotPlaying(self.status));
        }
        let mut ev = Vec::new();
        self.turn += 1;
        let acted = match action {
            ActionInput::Bomb(dir) => self.bomb(dir, &mut ev),
            ActionInput::MoveN => self.try_move(Dir::N, &mut ev),
            ActionInput::MoveE => self.try_move(Dir::E, &mut ev),
            ActionInput::MoveS => self.try_move(Dir::S, &mut ev),
            ActionInput::MoveW => self.try_move(Dir::W, &mut ev),
        };
        if !acted {
            self.turn -= 1;
            let kind = EventKind::Blocked { room: self.player_room, cell: self.player_cell };
            return Ok(vec![Event { turn: self.turn, kind }]);
        }
        if self.status == Status::Playing {
            self.enemy_phase(&mut ev);
        }
        Ok(ev)
    }

    fn bomb(&mut self, dir: Dir, ev: &mut Vec<Event>) -> bool {
        let target = self.player_cell.step(dir);
        if slot_side(self.player_cell).is_some() || slot_side(target) != Some(dir) {
            return false;
        }
        let usable = match self.door(self.player_room, dir) {
            Some(d) => d.kind == DoorKind::Bombable && !d.open,
            None => false,
        };
        if !usable || (self.bombs == 0 && !self.options.infinite_bombs) {
            return false;
        }
        if !self.options.infinite_bombs {
            self.bombs -= 1;
        }
        self.emit(ev, EventKind::Bombed { room: self.player_room, side: dir });
        self.open_door(self.player_room, dir, true, ev);
        true
    }

    fn try_move(&mut self, dir: Dir, ev: &mut Vec<Event>) -> bool {
        let room = self.player_room;
        let from = self.player_cell;
        let to = from.step(dir);
        if !to.in_room() {
            if slot_side(from) != Some(dir) || self.door(room, dir).is_none() {
                return false;
            }
            let next = room.step(dir);
            if !self.dungeon.rooms.contains_key(&next) {
                return false;
            }
            self.player_room = next;
            self.player_cell = crossing_target(dir, from);
            self.emit(ev, EventKind::Moved { room: next, cell: self.player_cell });
            self.maybe_respawn(next, ev);
            return true;
        }
        if let Some(i) = self.enemy_at(room, to) {
            self.kill(room, i, ev);
            return true;
        }
        if let Some(p) = self.puzzles.get(&room).copied() {
            if p.block == to {
                return !p.solved && self.push_block(dir, ev);
            }
        }
        if let Some(side) = slot_side(to) {
            if let Some(door) = self.door(room, side) {
                if slot_side(from) != Some(side) && !door.open {
                    if door.kind == DoorKind::Locked && self.keys > 0 {
                        self.keys -= 1;
                        self.locks_opened += 1;
                        self.open_door(room, side, true, ev);
                    } else {
                        return false;
                    }
                }
            }
        }
        match self.tile(room, to) {
            Tile::Floor => {
                self.move_to(to, ev);
                true
            }
            Tile::Wall => false,
            Tile::Water => self.raft_cross(dir, ev),
        }
    }

    /// Crosses exactly one interior water tile onto interior floor.
    fn raft_cross(&mut self, dir: Dir, ev: &mut Vec<Event>) -> bool {
        let room = self.player_room;
        let water = self.player_cell.step(dir);
        let land = water.step(dir);
        let ok = self.has_raft
            && water.is_interior()
            && land.is_interior()
            && self.tile(room, land) == Tile::Floor
            && !self.block_at(room, land)
            && self.enemy_at(room, land).is_none();
        if ok {
            self.move_to(land, ev);
        }
        ok
    }

    fn push_block(&mut self, dir: Dir, ev: &mut Vec<Event>) -> bool {
        let room = self.player_room;
        let spec = self.dungeon.rooms[&room].puzzle.expect("puzzle state has a spec");
        let post = spec.post_push_poi;
        let free = post.in_room()
            && self.tile(room, post) == Tile::Floor
            && self.enemy_at(room, post).is_none()
            && !self.items[&room].iter().any(|i| i.cell == post);
        if dir != spec.push_direction || !free {
            return false;
        }
        self.puzzles.insert(room, PuzzleState { block: post, solved: true });
        self.emit(ev, EventKind::PuzzleSolved { room, cell: post });
        let gated: Vec<Dir> = self.doors[&room]
            .iter()
            .filter(|d| d.kind == DoorKind::Puzzle && !d.open)
            .map(|d| d.side)
            .collect();
        for side in gated {
            self.open_door(room, side, false, ev);
        }
        self.move_to(spec.block_cell, ev);
        true
    }

    fn move_to(&mut self, cell: Cell, ev: &mut Vec<Event>) {
        let room = self.player_room;
        self.player_cell = cell;
        self.emit(ev, EventKind::Moved { room, cell });
        let items = self.items.get_mut(&room).expect("room items");
        let picked: Vec<ItemPlacement> = items.iter().filter(|i| i.cell == cell).copied().collect();
        items.retain(|i| i.cell != cell);
        for item in picked {
            match item.kind {
                ItemKind::Key => {
                    self.keys += 1;
                    self.keys_collected += 1;
                }
                ItemKind::Raft => self.has_raft = true,
                ItemKind::Heart => self.hearts = (self.hearts + 1).min(self.max_hearts),
                ItemKind::Bomb => self.bombs += 1,
                ItemKind::Triforce => self.status = Status::Won,
            }
            self.emit(ev, EventKind::PickedUp { room, cell, item: item.kind });
            if item.kind == ItemKind::Triforce {
                self.emit(ev, EventKind::Won { room, cell });
            }
        }
    }

    fn kill(&mut self, room: RoomPos, index: usize, ev: &mut Vec<Event>) {
        let cell = self.enemies.get_mut(&room).expect("room enemies").remove(index);
        self.emit(ev, EventKind::EnemyKilled { room, cell });
        let heart_rate = self.heart_drop_rate();
        if let Some(item) = drop_roll(&mut self.rng, heart_rate, self.options.bomb_drop_probability) {
            self.items.get_mut(&room).expect("room items").push(ItemPlacement { kind: item, cell });
            self.emit(ev, EventKind::Drop { room, cell, item });
        }
        if self.enemies[&room].is_empty() && !self.cleared.contains(&room) {
            self.emit(ev, EventKind::RoomCleared { room });
            self.clear_room(room, ev);
        }
    }

    /// Reveals withheld keys and opens soft-locked doors.
    fn clear_room(&mut self, room: RoomPos, ev: &mut Vec<Event>) {
        self.cleared.insert(room);
        let revealed = self.hidden.get_mut(&room).map(std::mem::take).unwrap_or_default();
        self.items.get_mut(&room).expect("room items").extend(revealed);
        let gated: Vec<Dir> = self.doors[&room]
            .iter()
            .filter(|d| d.kind == DoorKind::SoftLocked && !d.open)
            .map(|d| d.side)
            .collect();
        for side in gated {
            self.open_door(room, side, false, ev);
        }
    }

    fn maybe_respawn(&mut self, room: RoomPos, ev: &mut Vec<Event>) {
        if !self.options.enemies || self.bombs > 0 || !self.enemies[&room].is_empty() {
            return;
        }
        if !self.rng.random_bool(self.options.respawn_probability) {
            return;
        }
        let count = self.rng.random_range(1..=3);
        let mut spawned = 0;
        for _ in 0..count {
            let free: Vec<Cell> = interior_cells()
                .into_iter()
                .filter(|&c| self.enemy_can_stand(room, c) && self.tile(room, c) == Tile::Floor)
                .filter(|&c| !self.items[&room].iter().any(|i| i.cell == c))
                .collect();
            if let Some(&c) = free.choose(&mut self.rng) {
                self.enemies.get_mut(&room).expect("room enemies").push(c);
                spawned += 1;
            }
        }
        if spawned > 0 {
            self.emit(ev, EventKind::EnemiesSpawned { room, count: spawned });
        }
    }

    fn enemy_can_stand(&self, room: RoomPos, cell: Cell) -> bool {
        cell.is_interior()
            && self.tile(room, cell) != Tile::Wall
            && !(room == self.player_room && cell == self.player_cell)
            && !self.block_at(room, cell)
            && self.enemy_at(room, cell).is_none()
    }

    fn enemy_phase(&mut self, ev: &mut Vec<Event>) {
        let room = self.player_room;
        let count = self.enemies.get(&room).map_or(0, Vec::len);
        for i in 0..count {
            if self.status != Status::Playing || self.player_room != room {
                return;
            }
            let cell = self.enemies[&room][i];
            let player = self.player_cell;
            if cell.chebyshev(player) == 1 {
                let hit = self.rng.random_bool(self.options.hit_probability);
                self.emit(ev, EventKind::Attacked { room, cell, hit });
                if hit {
                    self.hearts -= 1;
                    self.emit(ev, EventKind::Damaged { hearts: self.hearts });
                    if self.hearts == 0 {
                        self.on_death(ev);
                        return;
                    }
                }
                continue;
            }
            let steps: Vec<Cell> = if line_of_sight(&self.dungeon, room, cell, player) {
                let d = cell.manhattan(player);
                Dir::ALL
                    .iter()
                    .map(|&dir| cell.step(dir))
                    .filter(|&c| c.manhattan(player) < d && self.enemy_can_stand(room, c))
                    .collect()
            } else {
                Dir::ALL.iter().map(|&dir| cell.step(dir)).filter(|&c| self.enemy_can_stand(room, c)).collect()
            };
            if let Some(&next) = steps.choose(&mut self.rng) {
                self.enemies.get_mut(&room).expect("room enemies")[i] = next;
            }
        }
    }

    /// Counts the death, raises the tier and, if configured, starts over.
    pub fn on_death(&mut self, ev: &mut Vec<Event>) {
        self.deaths += 1;
        self.emit(ev, EventKind::Died { deaths: self.deaths });
        let tier = (self.tier + 1).min(MAX_TIER);
        if self.options.auto_restart {
            self.reset(tier);
            self.emit(ev, EventKind::Restarted { tier, hearts: self.hearts });
        } else {
            self.tier = tier;
            self.status = Status::Dead;
        }
    }
}

/// Within `SIGHT_RANGE` steps and no wall on the 4-connected line between.
pub fn line_of_sight(dungeon: &Dungeon, room: RoomPos, from: Cell, to: Cell) -> bool {
    if from.manhattan(to) > SIGHT_RANGE {
        return false;
    }
    let tiles = &dungeon.rooms[&room].tiles;
    line4(from, to).into_iter().all(|c| tiles.get(c) != Tile::Wall)
}
