use slidenorm::lab::{generate, StreamVariant, SyntheticSpec};
use slidenorm::symnorm::{GridConfig, LayerGrid};
use std::time::Instant;

fn main() {
    let m = 1u64 << 15;
    let n = 1u64 << 16;
    let stream = generate(&SyntheticSpec { m, n, seed: 1, variant: StreamVariant::AppendixC }).unwrap();
    let mut cfg = GridConfig::practical(n, m, 0.2, 16.0, 7);
    cfg.overrides.r_cap = 5;
    let t0 = Instant::now();
    let mut grid = LayerGrid::new(cfg).unwrap();
    for &x in &stream.items {
        grid.update(x).unwrap();
    }
    println!("feed: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let (lv, _) = grid.estimate_level_sizes().unwrap();
    println!("level sizes: {:?} ({} buckets)", t0.elapsed(), lv.buckets().len());
}
