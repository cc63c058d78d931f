//! Brute-force Dijkstra over the explicit edge graph of a window.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rwfpp_core::fpp::edge_weight;
use rwfpp_core::{Distance, DistanceFrontier, IncrementField, JumpSet, Site, Window};

/// Shortest weights from `source` to every site of `window` at times
/// `source.t..=horizon`, over paths that stay in the window. Candidate edges
/// are every pair of window sites at most `max_dt` apart in time.
pub fn dijkstra(
    field: &IncrementField,
    jumps: &JumpSet,
    source: Site,
    horizon: i64,
    window: Window,
) -> BTreeMap<(i64, i64), u32> {
    let max_dt = jumps.max_dt().max(1);
    let mut best: BTreeMap<(i64, i64), u32> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    best.insert((source.t, source.x), 0);
    heap.push(Reverse((0u32, source.t, source.x)));
    while let Some(Reverse((d, t, x))) = heap.pop() {
        if best.get(&(t, x)).is_some_and(|&b| b < d) {
            continue;
        }
        let u = Site::new(x, t);
        for vt in t..=(t + max_dt).min(horizon) {
            for vx in window.x_min..=window.x_max {
                let v = Site::new(vx, vt);
                if v == u {
                    continue;
                }
                let Distance::Finite(w) = edge_weight(field, jumps, u, v) else { continue };
                let nd = d + w;
                if best.get(&(vt, vx)).is_none_or(|&b| nd < b) {
                    best.insert((vt, vx), nd);
                    heap.push(Reverse((nd, vt, vx)));
                }
            }
        }
    }
    best
}

/// The frontier's entries keyed like [`dijkstra`]'s output.
pub fn frontier_map(frontier: &DistanceFrontier) -> BTreeMap<(i64, i64), u32> {
    frontier.entries().map(|(t, x, d)| ((t, x), d)).collect()
}

/// The oracle restricted to distances `≤ max_dist`.
pub fn truncate(oracle: &BTreeMap<(i64, i64), u32>, max_dist: u32) -> BTreeMap<(i64, i64), u32> {
    oracle.iter().filter(|(_, &d)| d <= max_dist).map(|(&k, &d)| (k, d)).collect()
}
