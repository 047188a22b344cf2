//! Shared fixtures and brute-force reference implementations.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use seeddistill::features::{AstNode, CfgGraph, CfgNode, Weights};
use seeddistill::{FeatureKind, FeatureVector, TieRng};

/// Small deterministic generator for fixtures (not the engine's tie RNG
/// stream; it only shares the type).
pub struct Gen(TieRng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(TieRng::new(seed ^ 0x9e37_79b9_7f4a_7c15))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.below(n)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.0.below(hi - lo + 1)
    }

    pub fn chance(&mut self, num: usize, den: usize) -> bool {
        self.0.below(den) < num
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

// ---------------------------------------------------------------- vectors

/// Random vectors of one kind. Small integer values make exact distance
/// ties common; `dense` picks the embedding representation.
pub fn random_vectors(g: &mut Gen, n: usize, dims: usize, dense: bool) -> Vec<FeatureVector> {
    let integral = g.chance(1, 2);
    let mut out: Vec<FeatureVector> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && g.chance(1, 8) {
            let copy = out[g.below(i)].clone();
            out.push(FeatureVector {
                seed_id: format!("s{i}"),
                ..copy
            });
            continue;
        }
        let value = |g: &mut Gen| {
            if integral {
                g.range(0, 3) as f64
            } else {
                g.unit() * 4.0 - 1.0
            }
        };
        let id = format!("s{i}");
        if dense {
            let values = (0..dims).map(|_| value(g)).collect();
            out.push(FeatureVector::dense(id, values));
        } else {
            let nnz = g.range(0, dims.min(12));
            let entries: Vec<(u32, f64)> =
                (0..nnz).map(|_| (g.below(dims) as u32, value(g))).collect();
            out.push(FeatureVector::sparse(id, FeatureKind::Token, entries));
        }
    }
    out
}

pub fn densify(vectors: &[FeatureVector]) -> Vec<Vec<f64>> {
    let dims = vectors
        .iter()
        .map(|v| v.dimension_bound())
        .max()
        .unwrap_or(0);
    vectors
        .iter()
        .map(|v| {
            let mut row = vec![0.0; dims];
            match &v.weights {
                Weights::Dense(d) => row[..d.len()].copy_from_slice(d),
                Weights::Sparse(e) => {
                    for &(d, w) in e {
                        row[d as usize] = w;
                    }
                }
            }
            row
        })
        .collect()
}

/// Element-wise mean, summing seeds in order per dimension.
pub fn naive_centroid(rows: &[Vec<f64>]) -> Vec<f64> {
    let dims = rows.first().map_or(0, Vec::len);
    (0..dims)
        .map(|d| {
            let mut s = 0.0;
            for r in rows {
                s += r[d];
            }
            s / rows.len() as f64
        })
        .collect()
}

pub fn naive_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for d in 0..a.len() {
        let diff = a[d] - b[d];
        s += diff * diff;
    }
    s.sqrt()
}

/// Unpicked indices attaining the best score of round `picked.len()`, with
/// every score recomputed from scratch.
pub fn naive_candidates(rows: &[Vec<f64>], picked: &[usize]) -> (f64, Vec<usize>) {
    let centroid = naive_centroid(rows);
    let score = |i: usize| -> f64 {
        if picked.is_empty() {
            naive_distance(&rows[i], &centroid)
        } else {
            picked
                .iter()
                .map(|&j| naive_distance(&rows[i], &rows[j]))
                .fold(f64::INFINITY, f64::min)
        }
    };
    let scores: Vec<(usize, f64)> = (0..rows.len())
        .filter(|i| !picked.contains(i))
        .map(|i| (i, score(i)))
        .collect();
    let best = scores
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied = scores
        .iter()
        .filter(|&&(_, s)| s == best)
        .map(|&(i, _)| i)
        .collect();
    (best, tied)
}

/// O(n^2)-per-round FPS: rescans every pairwise distance each round and
/// breaks ties with the same protocol as the engine.
pub fn naive_fps(vectors: &[FeatureVector], rng_seed: u64) -> Vec<usize> {
    let rows = densify(vectors);
    let mut rng = TieRng::new(rng_seed);
    let mut picked = Vec::with_capacity(rows.len());
    while picked.len() < rows.len() {
        let (_, tied) = naive_candidates(&rows, &picked);
        picked.push(tied[rng.pick_tied(tied.len())]);
    }
    picked
}

// ------------------------------------------------------------ trees/graphs

pub const LABELS: &[&str] = &["A", "B", "C", "D", "E"];

/// Random tree with exactly `size` nodes over a small label alphabet.
pub fn random_tree(g: &mut Gen, size: usize) -> AstNode {
    // parent[i] < i gives a uniformly shaped random recursive tree
    let parent: Vec<usize> = (1..size).map(|i| g.below(i)).collect();
    let kinds: Vec<&str> = (0..size).map(|_| *g.pick(LABELS)).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &p) in parent.iter().enumerate() {
        children[p].push(i + 1);
    }
    fn build(i: usize, kinds: &[&str], children: &[Vec<usize>]) -> AstNode {
        AstNode::new(
            kinds[i],
            children[i]
                .iter()
                .map(|&c| build(c, kinds, children))
                .collect(),
        )
    }
    build(0, &kinds, &children)
}

pub type Triple = (String, String, String);

fn bump(map: &mut BTreeMap<Triple, u64>, a: &str, b: &str, c: &str) {
    *map.entry((a.into(), b.into(), c.into())).or_default() += 1;
}

/// Every parent -> child -> grandchild path, found recursively.
pub fn naive_tree_chains(root: &AstNode) -> BTreeMap<Triple, u64> {
    fn visit(node: &AstNode, out: &mut BTreeMap<Triple, u64>) {
        for child in &node.children {
            for grandchild in &child.children {
                bump(out, &node.kind, &child.kind, &grandchild.kind);
            }
            visit(child, out);
        }
    }
    let mut out = BTreeMap::new();
    visit(root, &mut out);
    out
}

/// Random digraph with cycles, self-loops and repeated edges allowed. Node
/// ids are sparse and shuffled so nothing relies on ids being positions.
pub fn random_graph(g: &mut Gen, nodes: usize) -> CfgGraph {
    let mut ids: Vec<u64> = (0..nodes as u64).map(|i| i * 3 + 7).collect();
    for i in (1..ids.len()).rev() {
        let j = g.below(i + 1);
        ids.swap(i, j);
    }
    let graph_nodes = ids
        .iter()
        .map(|&id| CfgNode {
            id,
            label: (*g.pick(LABELS)).to_owned(),
        })
        .collect();
    let edge_count = if nodes == 0 { 0 } else { g.range(0, nodes * 2) };
    let edges = (0..edge_count)
        .map(|_| (ids[g.below(nodes)], ids[g.below(nodes)]))
        .collect();
    CfgGraph {
        nodes: graph_nodes,
        edges,
    }
}

/// Walks u -> v -> w by brute force over all node triples of an adjacency
/// matrix (so duplicate edges count once).
pub fn naive_walk_chains(graph: &CfgGraph) -> BTreeMap<Triple, u64> {
    let n = graph.nodes.len();
    let index = |id: u64| graph.nodes.iter().position(|x| x.id == id).unwrap();
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in &graph.edges {
        adj[index(a)][index(b)] = true;
    }
    let l = |i: usize| graph.nodes[i].label.as_str();
    let mut out = BTreeMap::new();
    for u in 0..n {
        for v in (0..n).filter(|&v| adj[u][v]) {
            for w in (0..n).filter(|&w| adj[v][w]) {
                bump(&mut out, l(u), l(v), l(w));
            }
        }
    }
    out
}

// ---------------------------------------------------------- mini-language

const NAMES: &[&str] = &["a", "b", "c", "i", "j", "n", "x", "y", "z", "acc", "tmp"];
const CALLS: &[&str] = &["f", "g", "h", "check", "emit", "load"];
const BINOPS: &[&str] = &[
    "+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||",
];

fn expr(g: &mut Gen, depth: usize, out: &mut String) {
    match if depth == 0 { g.below(2) } else { g.below(6) } {
        0 => out.push_str(g.pick(NAMES)),
        1 => {
            let _ = write!(out, "{}", g.below(100));
        }
        2 | 3 => {
            out.push('(');
            expr(g, depth - 1, out);
            let _ = write!(out, " {} ", g.pick(BINOPS));
            expr(g, depth - 1, out);
            out.push(')');
        }
        4 => {
            let _ = write!(out, "{}(", g.pick(CALLS));
            for k in 0..g.below(3) {
                if k > 0 {
                    out.push_str(", ");
                }
                expr(g, depth - 1, out);
            }
            out.push(')');
        }
        _ => {
            out.push_str(if g.chance(1, 2) { "-(" } else { "!(" });
            expr(g, depth - 1, out);
            out.push(')');
        }
    }
}

/// Appends statements until `budget` reaches 0.
fn block(g: &mut Gen, budget: &mut usize, depth: usize, in_fn: bool, out: &mut String) {
    while *budget > 0 {
        *budget -= 1;
        match g.below(if depth >= 3 { 4 } else { 7 }) {
            0 | 1 => {
                let _ = write!(out, "{} = ", g.pick(NAMES));
                expr(g, 2, out);
                out.push_str(";\n");
            }
            2 => {
                let _ = write!(out, "{} {}= ", g.pick(NAMES), g.pick(&["+", "-", "*"]));
                expr(g, 1, out);
                out.push_str(";\n");
            }
            3 => {
                let _ = write!(out, "{}(", g.pick(CALLS));
                expr(g, 1, out);
                out.push_str(");\n");
            }
            4 | 5 => {
                let kw = if g.chance(1, 2) { "if" } else { "while" };
                let _ = write!(out, "{kw} (");
                expr(g, 2, out);
                out.push_str(") {\n");
                let mut inner = g.range(1, 6).min(*budget);
                *budget -= inner;
                block(g, &mut inner, depth + 1, in_fn, out);
                out.push('}');
                if kw == "if" && g.chance(1, 2) && *budget > 0 {
                    out.push_str(" else {\n");
                    let mut inner = g.range(1, 4).min(*budget);
                    *budget -= inner;
                    block(g, &mut inner, depth + 1, in_fn, out);
                    out.push('}');
                }
                out.push('\n');
            }
            _ => {
                if in_fn && g.chance(1, 3) {
                    out.push_str("return ");
                    expr(g, 1, out);
                    out.push_str(";\n");
                } else {
                    let _ = write!(out, "{} = {}(", g.pick(NAMES), g.pick(CALLS));
                    expr(g, 1, out);
                    out.push_str(");\n");
                }
            }
        }
    }
}

/// A program of roughly `statements` statements: a few functions plus
/// top-level code.
pub fn mini_program(g: &mut Gen, statements: usize) -> String {
    let mut out = String::new();
    let mut budget = statements;
    let mut k = 0;
    while budget > statements / 3 {
        let mut body = g.range(5, 20).min(budget);
        budget -= body;
        let _ = writeln!(out, "fn fn{k}(p, q) {{");
        block(g, &mut body, 1, true, &mut out);
        out.push_str("}\n");
        k += 1;
    }
    block(g, &mut budget, 0, false, &mut out);
    out
}

// ---------------------------------------------------------------- corpora

pub struct SeedFiles<'a> {
    pub id: &'a str,
    pub source: Option<&'a str>,
    pub coverage: Option<&'a [usize]>,
    pub bug_count: Option<u64>,
}

impl<'a> SeedFiles<'a> {
    pub fn source(id: &'a str, source: &'a str) -> Self {
        SeedFiles {
            id,
            source: Some(source),
            coverage: None,
            bug_count: None,
        }
    }
}

/// Writes side files under `dir/seeds/` and a manifest at `dir/manifest.json`.
pub fn write_corpus(dir: &Path, name: &str, seeds: &[SeedFiles<'_>], width: usize) -> PathBuf {
    let seed_dir = dir.join("seeds");
    fs::create_dir_all(&seed_dir).unwrap();
    let mut entries = Vec::new();
    for s in seeds {
        let mut e = serde_json::Map::new();
        e.insert("id".into(), s.id.into());
        if let Some(src) = s.source {
            fs::write(seed_dir.join(format!("{}.mini", s.id)), src).unwrap();
            e.insert("source".into(), format!("seeds/{}.mini", s.id).into());
        }
        if let Some(cov) = s.coverage {
            let doc = serde_json::json!({ "width": width, "covered": cov });
            fs::write(seed_dir.join(format!("{}.cov.json", s.id)), doc.to_string()).unwrap();
            e.insert("coverage".into(), format!("seeds/{}.cov.json", s.id).into());
        }
        if let Some(b) = s.bug_count {
            e.insert("bug_count".into(), b.into());
        }
        entries.push(serde_json::Value::Object(e));
    }
    let manifest = serde_json::json!({ "name": name, "seeds": entries });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}

/// `n` generated mini-language seeds of about `statements` statements each.
pub fn write_mini_corpus(dir: &Path, n: usize, statements: usize, seed: u64) -> PathBuf {
    let mut g = Gen::new(seed);
    let ids: Vec<String> = (0..n).map(|i| format!("seed{i:04}")).collect();
    let sources: Vec<String> = (0..n).map(|_| mini_program(&mut g, statements)).collect();
    let seeds: Vec<SeedFiles<'_>> = ids
        .iter()
        .zip(&sources)
        .map(|(id, src)| SeedFiles::source(id, src))
        .collect();
    write_corpus(dir, "generated", &seeds, 0)
}
