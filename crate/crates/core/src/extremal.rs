//! Largest progression-free subsets: the progression hypergraph, an exact
//! branch and bound over bitsets, randomized greedy lower bounds and a
//! log-log exponent fit.

use crate::counting::YRule;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::par;
use crate::poly::PolySystem;
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

const WORDS: usize = 8;
pub const MAX_VERTICES: usize = 64 * WORDS;
/// Depth of the deterministic top-level split into parallel tasks.
const SPLIT_DEPTH: usize = 6;
const NODE_FLUSH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// Every `(x, y != 0)` gives an edge, even when points coincide.
    #[default]
    PaperLiteral,
    /// Only progressions with `m + 1` distinct points.
    DistinctPoints,
}

impl std::str::FromStr for Degeneracy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_literal" | "paper-literal" => Ok(Degeneracy::PaperLiteral),
            "distinct_points" | "distinct-points" => Ok(Degeneracy::DistinctPoints),
            other => Err(Error::Parse(format!("unknown degeneracy policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionHypergraph {
    pub q: usize,
    pub p: u64,
    pub k: usize,
    pub system: String,
    /// Sorted vertex lists, deduplicated as sets, in lexicographic order.
    pub edges: Vec<Vec<usize>>,
    pub y_rule: YRule,
    pub degeneracy: Degeneracy,
    /// Number of `(x, y)` pairs enumerated before deduplication.
    pub generating_pairs: usize,
}

impl ProgressionHypergraph {
    /// Builds a hypergraph from explicit edges.
    pub fn from_edges(q: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() || e.iter().any(|&v| v >= q) {
                return Err(Error::InvalidRange(format!("edge {e:?} is not a nonempty subset of [0, {q})")));
            }
            set.insert(e);
        }
        let n = set.len();
        Ok(ProgressionHypergraph {
            q,
            p: 0,
            k: 0,
            system: String::new(),
            edges: set.into_iter().collect(),
            y_rule: YRule::Nonzero,
            degeneracy: Degeneracy::PaperLiteral,
            generating_pairs: n,
        })
    }

    /// No edge lies inside `set`.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut inside = vec![false; self.q];
        for &v in set {
            if v >= self.q {
                return false;
            }
            inside[v] = true;
        }
        !self.edges.iter().any(|e| e.iter().all(|&v| inside[v]))
    }
}

pub fn build_hypergraph(system: &PolySystem, field: &FieldSpec, y_rule: YRule, degeneracy: Degeneracy) -> Result<ProgressionHypergraph> {
    if !system.is_pure() {
        return Err(Error::TwistedSystem);
    }
    let q = field.q();
    let tables: Vec<Vec<usize>> = system.p.iter().map(|p| p.value_table(field)).collect();
    let m = system.m1();
    let first_y = if y_rule == YRule::Nonzero { 1 } else { 0 };
    let mut set = BTreeSet::new();
    let mut pairs = 0;
    for x in 0..q {
        for y in first_y..q {
            pairs += 1;
            let mut e: Vec<usize> = std::iter::once(x).chain(tables.iter().map(|t| field.add_idx(x, t[y]))).collect();
            e.sort_unstable();
            e.dedup();
            if degeneracy == Degeneracy::DistinctPoints && e.len() != m + 1 {
                continue;
            }
            set.insert(e);
        }
    }
    Ok(ProgressionHypergraph {
        q,
        p: field.p(),
        k: field.k(),
        system: system.describe(),
        edges: set.into_iter().collect(),
        y_rule,
        degeneracy,
        generating_pairs: pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub q: usize,
    pub r: usize,
    /// Vertex indices, ascending.
    pub witness: Vec<usize>,
    pub exact: bool,
    pub nodes_explored: u64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Default)]
struct Bits([u64; WORDS]);

impl Bits {
    #[inline]
    fn set(&mut self, v: usize) {
        self.0[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    fn clear(&mut self, v: usize) {
        self.0[v >> 6] &= !(1 << (v & 63));
    }

    #[inline]
    fn has(&self, v: usize) -> bool {
        self.0[v >> 6] >> (v & 63) & 1 == 1
    }

    #[inline]
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    fn or(&self, o: &Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }

    #[inline]
    fn minus(&self, o: &Bits) -> Bits {
        Bits(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }

    #[inline]
    fn intersects(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    #[inline]
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    #[inline]
    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// The hypergraph relabelled so that branching order is index order.
struct Instance {
    n: usize,
    /// Relabelled vertex -> original vertex.
    original: Vec<usize>,
    edges: Vec<Bits>,
    incident: Vec<Vec<usize>>,
    /// Vertices not in any singleton edge.
    allowed: Bits,
}

impl Instance {
    fn new(hg: &ProgressionHypergraph) -> Result<Self> {
        let n = hg.q;
        if n > MAX_VERTICES {
            return Err(Error::InvalidRange(format!("q = {n} exceeds the {MAX_VERTICES}-vertex bitset width")));
        }
        let mut degree = vec![0usize; n];
        for e in &hg.edges {
            for &v in e {
                degree[v] += 1;
            }
        }
        let mut original: Vec<usize> = (0..n).collect();
        original.sort_by_key(|&v| (degree[v], v));
        let mut label = vec![0; n];
        for (new, &old) in original.iter().enumerate() {
            label[old] = new;
        }
        let mut sorted: Vec<&Vec<usize>> = hg.edges.iter().collect();
        sorted.sort_by_key(|e| e.len());
        let mut allowed = Bits::default();
        for v in 0..n {
            allowed.set(v);
        }
        let mut edges = vec![];
        let mut incident = vec![vec![]; n];
        for e in sorted {
            if e.len() == 1 {
                allowed.clear(label[e[0]]);
                continue;
            }
            let mut b = Bits::default();
            for &v in e {
                b.set(label[v]);
                incident[label[v]].push(edges.len());
            }
            edges.push(b);
        }
        Ok(Instance { n, original, edges, incident, allowed })
    }

    fn to_original(&self, set: &Bits) -> Vec<usize> {
        let mut w: Vec<usize> = set.iter().map(|v| self.original[v]).collect();
        w.sort_unstable();
        w
    }

    /// Candidates that stay addable once `v` joins `chosen`.
    fn include(&self, chosen: &Bits, cand: &Bits, v: usize) -> (Bits, Bits) {
        let mut c = *chosen;
        c.set(v);
        let mut p = *cand;
        p.clear(v);
        for &ei in &self.incident[v] {
            let rest = self.edges[ei].minus(&c);
            if rest.count() == 1 {
                let u = rest.first().expect("one element");
                p.clear(u);
            }
        }
        (c, p)
    }
}

#[derive(Clone, Copy)]
struct Node {
    chosen: Bits,
    cand: Bits,
    size: usize,
}

struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    aborted: AtomicBool,
    budget: u64,
}

struct Task<'a> {
    inst: &'a Instance,
    shared: &'a Shared,
    local_best: usize,
    local_set: Option<Bits>,
    pending_nodes: u64,
    adj: Vec<Bits>,
    touched: Vec<usize>,
    cliques: Vec<Bits>,
}

impl<'a> Task<'a> {
    fn new(inst: &'a Instance, shared: &'a Shared) -> Self {
        Task { inst, shared, local_best: 0, local_set: None, pending_nodes: 0, adj: vec![Bits::default(); inst.n], touched: vec![], cliques: vec![] }
    }

    fn flush(&mut self) {
        let total = self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed) + self.pending_nodes;
        self.pending_nodes = 0;
        if total > self.shared.budget {
            self.shared.aborted.store(true, Ordering::Relaxed);
        }
    }

    /// Upper bound on how many candidates can still be added.
    fn bound(&mut self, chosen: &Bits, cand: &Bits) -> usize {
        let alive = chosen.or(cand);
        let mut used = Bits::default();
        let mut packed = 0;
        for v in self.touched.drain(..) {
            self.adj[v] = Bits::default();
        }
        for e in &self.inst.edges {
            if !e.subset_of(&alive) {
                continue;
            }
            let rest = e.minus(chosen);
            if !rest.intersects(&used) {
                used = used.or(&rest);
                packed += 1;
            }
            if rest.count() == 2 {
                let mut it = rest.iter();
                let (a, b) = (it.next().expect("two"), it.next().expect("two"));
                if self.adj[a].is_empty() {
                    self.touched.push(a);
                }
                if self.adj[b].is_empty() {
                    self.touched.push(b);
                }
                self.adj[a].set(b);
                self.adj[b].set(a);
            }
        }
        let packing_bound = cand.count() - packed;
        self.cliques.clear();
        for v in cand.iter() {
            match self.cliques.iter_mut().find(|c| c.subset_of(&self.adj[v])) {
                Some(c) => c.set(v),
                None => {
                    let mut c = Bits::default();
                    c.set(v);
                    self.cliques.push(c);
                }
            }
        }
        packing_bound.min(self.cliques.len())
    }

    fn search(&mut self, node: Node) {
        if self.shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        self.pending_nodes += 1;
        if self.pending_nodes >= NODE_FLUSH {
            self.flush();
        }
        if self.local_set.is_none() || node.size > self.local_best {
            self.local_best = node.size;
            self.local_set = Some(node.chosen);
            self.shared.best.fetch_max(node.size, Ordering::Relaxed);
        }
        if node.cand.is_empty() {
            return;
        }
        let global = self.shared.best.load(Ordering::Relaxed);
        let ub = node.size + self.bound(&node.chosen, &node.cand);
        // Ties with the global best are still explored so that every task
        // finds its own first maximum; only ties with its own best are cut.
        if ub < global || ub <= self.local_best {
            return;
        }
        let v = node.cand.first().expect("nonempty");
        let (c, p) = self.inst.include(&node.chosen, &node.cand, v);
        self.search(Node { chosen: c, cand: p, size: node.size + 1 });
        let mut rest = node.cand;
        rest.clear(v);
        self.search(Node { chosen: node.chosen, cand: rest, size: node.size });
    }
}

/// Subtrees at depth `SPLIT_DEPTH` in depth-first order (include first).
fn split(inst: &Instance, node: Node, depth: usize, out: &mut Vec<Node>) {
    if depth == 0 || node.cand.is_empty() {
        out.push(node);
        return;
    }
    let v = node.cand.first().expect("nonempty");
    let (c, p) = inst.include(&node.chosen, &node.cand, v);
    split(inst, Node { chosen: c, cand: p, size: node.size + 1 }, depth - 1, out);
    let mut rest = node.cand;
    rest.clear(v);
    split(inst, Node { chosen: node.chosen, cand: rest, size: node.size }, depth - 1, out);
}

fn greedy(inst: &Instance, order: impl Iterator<Item = usize>) -> Bits {
    let mut chosen = Bits::default();
    let mut cand = inst.allowed;
    for v in order {
        if cand.has(v) {
            let (c, p) = inst.include(&chosen, &cand, v);
            chosen = c;
            cand = p;
        }
    }
    chosen
}

/// Exact maximum progression-free set by branch and bound. Subtrees of a
/// fixed top-level split run in parallel and share the best size found. The
/// witness is the first maximum set in depth-first order, so it does not
/// depend on the thread count unless the node budget runs out.
pub fn r_exact(hg: &ProgressionHypergraph, node_budget: u64) -> Result<ExtremalResult> {
    let start = Instant::now();
    let inst = Instance::new(hg)?;
    let seed_set = greedy(&inst, 0..inst.n);
    let shared = Shared {
        best: AtomicUsize::new(seed_set.count()),
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
        budget: node_budget,
    };
    let mut roots = vec![];
    split(&inst, Node { chosen: Bits::default(), cand: inst.allowed, size: 0 }, SPLIT_DEPTH, &mut roots);
    let found = par::map_slice(&roots, |&root| {
        let mut task = Task::new(&inst, &shared);
        task.search(root);
        task.flush();
        (task.local_best, task.local_set)
    });
    let aborted = shared.aborted.load(Ordering::Relaxed);
    let r = found.iter().map(|f| f.0).max().unwrap_or(0);
    let mut witness = found.iter().find(|f| f.0 == r && f.1.is_some()).and_then(|f| f.1).unwrap_or_default();
    let mut r = r;
    if seed_set.count() > r {
        r = seed_set.count();
        witness = seed_set;
    }
    Ok(ExtremalResult {
        q: hg.q,
        r,
        witness: inst.to_original(&witness),
        exact: !aborted,
        nodes_explored: shared.nodes.load(Ordering::Relaxed),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Best of `iters` greedy insertions along random permutations.
pub fn r_lower_random(hg: &ProgressionHypergraph, iters: usize, seed: u64) -> Result<ExtremalResult> {
    let start = Instant::now();
    let inst = Instance::new(hg)?;
    let runs = par::map_range(iters, |i| {
        let mut r = rng::seeded(rng::derive_seed(seed, i as u64));
        greedy(&inst, rng::permutation(&mut r, inst.n).into_iter())
    });
    let best = runs.iter().enumerate().max_by_key(|(i, b)| (b.count(), std::cmp::Reverse(*i))).map(|(_, b)| *b).unwrap_or_default();
    Ok(ExtremalResult {
        q: hg.q,
        r: best.count(),
        witness: inst.to_original(&best),
        exact: false,
        nodes_explored: iters as u64,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub gamma_hat: f64,
    /// Standard error of the fitted exponent.
    pub stderr: f64,
    pub points_used: usize,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Least squares fit of `log r = (1 - gamma) log q + c` over the exact
/// results with `r >= 1`.
pub fn gamma_fit(results: &[ExtremalResult]) -> Result<GammaFit> {
    let pts: Vec<(f64, f64)> = results.iter().filter(|r| r.exact && r.r >= 1).map(|r| ((r.q as f64).ln(), (r.r as f64).ln())).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: pts.len() });
    }
    let (slope, intercept, stderr) = least_squares(&pts)?;
    let residuals = pts.iter().map(|(x, y)| y - (slope * x + intercept)).collect();
    Ok(GammaFit { gamma_hat: 1.0 - slope, stderr, points_used: pts.len(), intercept, residuals })
}

/// Slope, intercept and the slope's standard error.
pub fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let stderr = if pts.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok((slope, intercept, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn hg(polys: &str, p: u64, deg: Degeneracy) -> ProgressionHypergraph {
        let f = make_field(p, 1, None).unwrap();
        build_hypergraph(&PolySystem::parse(polys, "").unwrap(), &f, YRule::Nonzero, deg).unwrap()
    }

    fn exhaustive(h: &ProgressionHypergraph) -> usize {
        (0u64..1 << h.q)
            .filter(|m| h.edges.iter().all(|e| e.iter().any(|&v| m >> v & 1 == 0)))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn linear_gives_complete_graph() {
        let h = hg("y", 7, Degeneracy::PaperLiteral);
        assert_eq!(h.edges.len(), 21);
        assert!(h.edges.iter().all(|e| e.len() == 2));
        assert_eq!(h.generating_pairs, 42);
        assert_eq!(r_exact(&h, u64::MAX).unwrap().r, 1);
    }

    #[test]
    fn three_term_progressions_in_f5() {
        let h = hg("y, 2y", 5, Degeneracy::PaperLiteral);
        assert_eq!(h.generating_pairs, 20);
        // {x, x+y, x+2y} and {x+2y, x+y, x} coincide as sets
        assert_eq!(h.edges.len(), 10);
        let r = r_exact(&h, u64::MAX).unwrap();
        assert_eq!(r.r, exhaustive(&h));
        assert!(h.is_independent(&r.witness));
    }

    #[test]
    fn distinct_points_drops_collapsed_edges() {
        let literal = hg("y^3 - y", 7, Degeneracy::PaperLiteral);
        assert!(literal.edges.iter().any(|e| e.len() == 1));
        assert_eq!(r_exact(&literal, u64::MAX).unwrap().r, 0);
        let distinct = hg("y^3 - y", 7, Degeneracy::DistinctPoints);
        assert!(distinct.edges.iter().all(|e| e.len() == 2));
        assert_eq!(r_exact(&distinct, u64::MAX).unwrap().r, exhaustive(&distinct));
    }

    #[test]
    fn matches_exhaustive_on_battery() {
        for polys in ["y", "y, 2y", "y, y^2", "y, y^2, y^3", "y^2", "y^3, 3y"] {
            for p in [5, 7, 11, 13] {
                let h = hg(polys, p, Degeneracy::PaperLiteral);
                let r = r_exact(&h, u64::MAX).unwrap();
                assert!(r.exact);
                assert_eq!(r.r, exhaustive(&h), "{polys} over F_{p}");
                assert!(h.is_independent(&r.witness));
                assert_eq!(r.witness.len(), r.r);
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_the_witness() {
        let h = hg("y, 2y", 23, Degeneracy::PaperLiteral);
        let one = par::with_threads(1, || r_exact(&h, u64::MAX).unwrap());
        let many = par::with_threads(4, || r_exact(&h, u64::MAX).unwrap());
        assert_eq!((one.r, &one.witness), (many.r, &many.witness));
    }

    #[test]
    fn random_lower_bound() {
        let h = hg("y, 2y", 13, Degeneracy::PaperLiteral);
        let exact = r_exact(&h, u64::MAX).unwrap().r;
        let lo = r_lower_random(&h, 200, 7).unwrap();
        assert!(lo.r >= 1 && lo.r <= exact && !lo.exact);
        assert!(h.is_independent(&lo.witness));
        assert_eq!(lo, r_lower_random(&h, 200, 7).map(|mut r| {
            r.wall_time_ms = lo.wall_time_ms;
            r
        }).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let h = hg("y, 2y", 31, Degeneracy::PaperLiteral);
        let r = r_exact(&h, 10).unwrap();
        assert!(!r.exact);
        assert!(h.is_independent(&r.witness));
    }

    fn synthetic(q: usize, r: usize) -> ExtremalResult {
        ExtremalResult { q, r, witness: vec![], exact: true, nodes_explored: 0, wall_time_ms: 0.0 }
    }

    #[test]
    fn gamma_fit_examples() {
        let lin: Vec<_> = [4, 16, 64, 256].iter().map(|&q| synthetic(q, q)).collect();
        assert!(gamma_fit(&lin).unwrap().gamma_hat.abs() < 1e-12);
        let root: Vec<_> = [4, 16, 64, 256].iter().map(|&q| synthetic(q, (q as f64).sqrt() as usize)).collect();
        assert!((gamma_fit(&root).unwrap().gamma_hat - 0.5).abs() < 1e-12);
        assert!(matches!(gamma_fit(&lin[..2]), Err(Error::InsufficientData { needed: 3, got: 2 })));
    }
}
