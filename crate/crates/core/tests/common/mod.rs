#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zdungeon_core::engine::{new_session, ActionInput, EventKind, GameState, SessionOptions, Status};
use zdungeon_core::layout::{decorate, place_rooms, realize_doors};
use zdungeon_core::model::{
    interior_cells, Dir, Dungeon, DungeonMeta, MissionGraph, Room, RoomSymbol, SourceKind, SymbolKind, Tile, TileGrid,
};

pub const ALL_ACTIONS: [ActionInput; 8] = [
    ActionInput::MoveN,
    ActionInput::MoveE,
    ActionInput::MoveS,
    ActionInput::MoveW,
    ActionInput::Bomb(Dir::N),
    ActionInput::Bomb(Dir::E),
    ActionInput::Bomb(Dir::S),
    ActionInput::Bomb(Dir::W),
];

pub fn workspace_root() -> PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).expect("workspace root").to_path_buf()
}

pub fn corpus_dir() -> PathBuf {
    std::env::var_os("ZDUNGEON_VGLC_DIR").map(PathBuf::from).unwrap_or_else(|| workspace_root().join("assets/vglc"))
}

pub fn weights_path() -> PathBuf {
    std::env::var_os("ZDUNGEON_WEIGHTS")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("assets/generator.zgan"))
}

pub fn random_room<R: Rng>(rng: &mut R, wall: f64, water: f64) -> Room {
    let mut tiles = TileGrid::walled_floor();
    for c in interior_cells() {
        let roll: f64 = rng.random();
        if roll < wall {
            tiles.set(c, Tile::Wall);
        } else if roll < wall + water {
            tiles.set(c, Tile::Water);
        }
    }
    Room::from_tiles(tiles)
}

/// Two to four rooms in a chain from Start to Triforce, with random gating
/// symbols in between, an optional shortcut edge, and cluttered interiors.
pub fn small_dungeon(seed: u64) -> Dungeon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=4);
    let middle = [SymbolKind::Enemy, SymbolKind::Key, SymbolKind::Lock, SymbolKind::SoftLock, SymbolKind::Puzzle];
    let mut nodes = vec![RoomSymbol::terminal(SymbolKind::Start)];
    if n == 4 && rng.random_bool(0.4) {
        nodes.push(RoomSymbol::terminal(SymbolKind::Key));
        nodes.push(RoomSymbol::terminal(SymbolKind::Lock));
    } else {
        for _ in 1..n - 1 {
            nodes.push(RoomSymbol::terminal(middle[rng.random_range(0..middle.len())]));
        }
    }
    nodes.push(RoomSymbol::terminal(SymbolKind::Triforce));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    if n >= 3 && rng.random_bool(0.3) {
        edges.push((0, n - 1));
    }
    let graph = MissionGraph { origins: (0..n).collect(), nodes, edges, start_node: 0, triforce_node: n - 1 };
    let placement = place_rooms(&graph, &mut rng).expect("chains always embed");
    let mut dungeon = Dungeon::new(DungeonMeta {
        seed,
        source_kind: SourceKind::Pool,
        repair_count: 0,
        repaired_rooms: Vec::new(),
    });
    let wall = rng.random_range(0.05..0.35);
    let water = rng.random_range(0.0..0.2);
    for (node, &pos) in placement.positions.iter().enumerate() {
        let mut room = random_room(&mut rng, wall, water);
        room.symbol = Some(graph.nodes[node]);
        room.node = Some(node);
        dungeon.rooms.insert(pos, room);
    }
    realize_doors(&placement, &mut dungeon.rooms);
    decorate(&mut dungeon, &placement, &graph, &mut rng);
    dungeon.lost_edges = placement.lost_edges.clone();
    dungeon.start = Some(placement.positions[0]);
    dungeon.graph = Some(graph);
    dungeon
}

fn state_key(s: &GameState) -> String {
    format!(
        "{:?}|{:?}|{}|{}|{:?}|{:?}|{:?}",
        s.player_room, s.player_cell, s.keys, s.has_raft, s.doors, s.puzzles, s.items
    )
}

/// Exhaustive breadth-first search over engine states with enemies off and
/// unlimited bombs. Returns whether any action sequence reaches the Triforce.
pub fn brute_force_beatable(dungeon: Arc<Dungeon>) -> bool {
    let start = new_session(dungeon, 0, 0, SessionOptions::replay());
    let mut seen = HashSet::from([state_key(&start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        for action in ALL_ACTIONS {
            let mut next = state.clone();
            let events = next.step(action).expect("playing");
            if matches!(events[0].kind, EventKind::Blocked { .. }) {
                continue;
            }
            if next.status == Status::Won {
                return true;
            }
            if seen.insert(state_key(&next)) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// Runs a plan with enemies off and unlimited bombs; returns the final status
/// and whether any step was rejected.
pub fn replay(dungeon: Arc<Dungeon>, plan: &[ActionInput]) -> (Status, bool) {
    let mut state = new_session(dungeon, 0, 0, SessionOptions::replay());
    let mut rejected = false;
    for &a in plan {
        if state.status != Status::Playing {
            break;
        }
        let events = state.step(a).expect("playing");
        rejected |= matches!(events[0].kind, EventKind::Blocked { .. });
    }
    (state.status, rejected)
}
