//! Random models and brute-force oracles shared by the test targets.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};

use monoslicer::model::{AreaMap, IoSignature, SystemModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Call edges only go from lower to higher function index.
    pub acyclic: bool,
}

/// Arbitrary graph-shaped model: facades call functions, functions call
/// functions and touch tables. Signatures are empty; ordinals are gap-free.
pub fn random_model(seed: u64, shape: Shape) -> SystemModel {
    let mut rng = rng(seed);
    let n = rng.gen_range(3..=shape.max_vertices.max(3));
    let facades = rng.gen_range(1..=(n / 3).max(1));
    let tables = rng.gen_range(1..=((n - facades) / 2).max(1));
    let functions = n - facades - tables;
    let edges = rng.gen_range(0..=shape.max_edges);

    let mut b = SystemModel::builder();
    for i in 0..facades {
        b = b.facade(&format!("fc{i}"), IoSignature::default());
    }
    for i in 0..functions {
        b = b.function(&format!("bf{i}"), IoSignature::default());
    }
    for i in 0..tables {
        b = b.table(&format!("tb{i}"));
    }
    if functions == 0 {
        return b.build();
    }
    let mut seen = BTreeSet::new();
    for _ in 0..edges {
        let roll = rng.gen_range(0..3);
        if roll == 0 {
            let (f, g) = (rng.gen_range(0..facades), rng.gen_range(0..functions));
            if seen.insert((format!("fc{f}"), format!("bf{g}"))) {
                b = b.call(&format!("fc{f}"), &format!("bf{g}"));
            }
        } else if roll == 1 {
            let (mut f, mut g) = (rng.gen_range(0..functions), rng.gen_range(0..functions));
            if shape.acyclic {
                if f == g {
                    continue;
                }
                if f > g {
                    std::mem::swap(&mut f, &mut g);
                }
            }
            if seen.insert((format!("bf{f}"), format!("bf{g}"))) {
                b = b.call(&format!("bf{f}"), &format!("bf{g}"));
            }
        } else {
            let (f, t) = (rng.gen_range(0..functions), rng.gen_range(0..tables));
            if seen.insert((format!("bf{f}"), format!("tb{t}"))) {
                b = if rng.gen_bool(0.5) {
                    b.read(&format!("bf{f}"), &format!("tb{t}"))
                } else {
                    b.write(&format!("bf{f}"), &format!("tb{t}"), None)
                };
            }
        }
    }
    b.build()
}

/// A model that passes validation, with signatures drawn from a small item
/// pool, a few areas, occasional control and shared tables and transaction
/// scopes. Small enough for thousands of full pipeline runs.
pub fn random_valid(seed: u64) -> (SystemModel, AreaMap) {
    let mut rng = rng(seed);
    let items = ["a", "b", "c", "d", "e", "f"];
    let sig = |rng: &mut ChaCha8Rng| {
        let mut pool = items.to_vec();
        pool.shuffle(rng);
        let k = rng.gen_range(0..=3);
        let o = rng.gen_range(0..=2);
        IoSignature::new(pool[..k].iter().copied(), pool[k..k + o].iter().copied())
    };
    let facades = rng.gen_range(1..=5);
    let functions = rng.gen_range(1..=10);
    let tables = rng.gen_range(1..=6);
    let areas = ["A", "B", "C"];

    let mut b = SystemModel::builder();
    for i in 0..facades {
        b = b.facade(&format!("fc{i}"), sig(&mut rng));
    }
    for i in 0..functions {
        b = b.function(&format!("bf{i}"), sig(&mut rng));
    }
    let mut map = AreaMap::default();
    for t in 0..tables {
        let name = format!("tb{t}");
        b = b.table(&name);
        match rng.gen_range(0..10) {
            0 => map.assign(&name, "control"),
            1 => {
                map.assign(&name, areas[0]);
                map.assign(&name, areas[1 + rng.gen_range(0..2)]);
            }
            _ => map.assign(&name, areas[rng.gen_range(0..areas.len())]),
        }
    }
    let mut seen = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=2 * facades + 2 * functions) {
        let callee = format!("bf{}", rng.gen_range(0..functions));
        let caller = if rng.gen_bool(0.4) {
            format!("fc{}", rng.gen_range(0..facades))
        } else {
            format!("bf{}", rng.gen_range(0..functions))
        };
        if caller != callee && seen.insert((caller.clone(), callee.clone())) {
            b = b.call(&caller, &callee);
        }
    }
    for _ in 0..rng.gen_range(0..=2 * functions) {
        let f = format!("bf{}", rng.gen_range(0..functions));
        let t = format!("tb{}", rng.gen_range(0..tables));
        b = if rng.gen_bool(0.6) {
            b.read(&f, &t)
        } else {
            let txn = rng.gen_bool(0.5).then(|| format!("T{}", rng.gen_range(0..2)));
            b.write(&f, &t, txn.as_deref())
        };
    }
    (b.build(), map)
}

/// Plain adjacency over model names.
pub fn adjacency(model: &SystemModel) -> BTreeMap<String, BTreeSet<String>> {
    let mut adj: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for c in &model.call_edges {
        adj.entry(c.caller.clone()).or_default().insert(c.callee.clone());
    }
    for a in &model.access_edges {
        adj.entry(a.function.clone()).or_default().insert(a.table.clone());
    }
    adj
}

/// Everything reachable from `start` by a recursive search, `start` included.
pub fn dfs(adj: &BTreeMap<String, BTreeSet<String>>, start: &str) -> BTreeSet<String> {
    fn go(adj: &BTreeMap<String, BTreeSet<String>>, v: &str, seen: &mut BTreeSet<String>) {
        if !seen.insert(v.to_string()) {
            return;
        }
        for w in adj.get(v).into_iter().flatten() {
            go(adj, w, seen);
        }
    }
    let mut seen = BTreeSet::new();
    go(adj, start, &mut seen);
    seen
}

pub fn oracle_pairs(model: &SystemModel) -> BTreeSet<(String, String)> {
    let adj = adjacency(model);
    let tables: BTreeSet<&String> = model.tables.iter().collect();
    let mut out = BTreeSet::new();
    for f in &model.facades {
        for v in dfs(&adj, f) {
            if tables.contains(&v) {
                out.insert((f.clone(), v));
            }
        }
    }
    out
}

/// Per-vertex reachability computed by independent recursive searches.
pub struct ReachOracle {
    reach: BTreeMap<String, BTreeSet<String>>,
    functions: BTreeSet<String>,
}

impl ReachOracle {
    pub fn new(model: &SystemModel) -> Self {
        let adj = adjacency(model);
        let reach = model
            .facades
            .iter()
            .chain(&model.functions)
            .chain(&model.tables)
            .map(|v| (v.clone(), dfs(&adj, v)))
            .collect();
        ReachOracle {
            reach,
            functions: model.functions.iter().cloned().collect(),
        }
    }

    pub fn reach(&self, v: &str) -> &BTreeSet<String> {
        &self.reach[v]
    }

    /// Functions reachable from the facade that themselves reach a target.
    pub fn slice(&self, facade: &str, targets: &BTreeSet<String>) -> BTreeSet<String> {
        self.reach[facade]
            .iter()
            .filter(|v| self.functions.contains(*v))
            .filter(|v| !self.reach[*v].is_disjoint(targets))
            .cloned()
            .collect()
    }
}

/// Functions on at least one simple path from the facade to a target table,
/// by enumerating every simple path.
pub fn oracle_slice_paths(model: &SystemModel, facade: &str, targets: &BTreeSet<String>) -> BTreeSet<String> {
    fn go(
        adj: &BTreeMap<String, BTreeSet<String>>,
        targets: &BTreeSet<String>,
        path: &mut Vec<String>,
        out: &mut BTreeSet<String>,
    ) {
        let v = path.last().expect("non-empty path").clone();
        if targets.contains(&v) {
            out.extend(path[1..path.len() - 1].iter().cloned());
            return;
        }
        for w in adj.get(&v).into_iter().flatten() {
            if !path.contains(w) {
                path.push(w.clone());
                go(adj, targets, path, out);
                path.pop();
            }
        }
    }
    let adj = adjacency(model);
    let mut out = BTreeSet::new();
    go(&adj, targets, &mut vec![facade.to_string()], &mut out);
    out
}
