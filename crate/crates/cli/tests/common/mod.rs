#![allow(dead_code)]

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zdungeon_core::gan::WeightBundle;

/// Writes `dungeons` text files, each a row of `rooms` rooms joined by doors,
/// with cluttered interiors whose centre is floor.
pub fn write_corpus(dir: &Path, dungeons: usize, rooms: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 0..dungeons {
        let mut grid = vec![vec!['W'; 16 * rooms]; 11];
        for r in 0..rooms {
            for y in 2..9 {
                for x in 2..14 {
                    let roll: f64 = rng.random();
                    grid[y][r * 16 + x] = if roll < 0.15 {
                        'B'
                    } else if roll < 0.20 {
                        'P'
                    } else {
                        'F'
                    };
                }
            }
            grid[5][r * 16 + 7] = 'F';
            if r + 1 < rooms {
                for x in [r * 16 + 14, r * 16 + 15, r * 16 + 16, r * 16 + 17] {
                    grid[5][x] = 'D';
                }
            }
        }
        let text: String = grid.iter().map(|row| row.iter().collect::<String>() + "\n").collect();
        std::fs::write(dir.join(format!("tloz{}_1.txt", d + 1)), text).unwrap();
    }
}

pub fn write_weights(path: &Path, seed: u64) {
    let w = WeightBundle::random_generator(&mut ChaCha8Rng::seed_from_u64(seed), &[16, 8, 8]);
    w.save(path).unwrap();
}
