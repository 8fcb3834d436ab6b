//! Minimum-weight perfect matching on general graphs.
//!
//! The solver is Edmonds' primal-dual blossom method in the O(n^3) form of
//! Galil ("Efficient algorithms for finding maximum matching in graphs",
//! ACM Computing Surveys, 1986), following the structure of Joris van
//! Rantwijk's reference implementation. Vertex duals are kept doubled so
//! that integer weights stay integral throughout.
//!
//! A minimum-weight perfect matching is obtained by running the maximum
//! weight, maximum cardinality variant on `K - w` for a constant `K` larger
//! than every weight: all perfect matchings have the same number of edges,
//! so the shift does not change the optimum.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("graph has an odd number of vertices ({0})")]
    OddVertexCount(usize),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside the graph")]
    VertexOutOfRange(usize, usize),
    #[error("edge weight is not finite")]
    NonFiniteWeight,
}

/// Edge weights the solver can process. Integer weights are handled
/// exactly; floating point weights treat slacks within `1e-9` of zero as
/// tight.
pub trait Weight: Copy + PartialOrd + Debug + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn twice(self) -> Self;
    /// Exact half of an even slack (integers) or plain half (floats).
    fn half(self) -> Self;
    fn is_tight(slack: Self) -> bool;
    fn is_finite(self) -> bool;
}

impl Weight for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn twice(self) -> Self {
        2 * self
    }
    fn half(self) -> Self {
        debug_assert_eq!(self % 2, 0);
        self / 2
    }
    fn is_tight(slack: Self) -> bool {
        slack <= 0
    }
    fn is_finite(self) -> bool {
        true
    }
}

/// Absolute tolerance for dual feasibility tests on `f64` weights.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn twice(self) -> Self {
        2.0 * self
    }
    fn half(self) -> Self {
        0.5 * self
    }
    fn is_tight(slack: Self) -> bool {
        slack <= FLOAT_TOLERANCE
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<W> {
    num_vertices: usize,
    edges: Vec<(usize, usize, W)>,
}

impl<W: Weight> WeightedGraph<W> {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize, W)>) -> Result<Self, MatchingError> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v, w) in &edges {
            if u == v {
                return Err(MatchingError::SelfLoop(u));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(MatchingError::VertexOutOfRange(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(MatchingError::DuplicateEdge(u, v));
            }
            if !w.is_finite() {
                return Err(MatchingError::NonFiniteWeight);
            }
        }
        Ok(WeightedGraph { num_vertices, edges })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize, W)] {
        &self.edges
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching<W> {
    /// Indices into the graph's edge list.
    pub edges: Vec<usize>,
    /// `mate[v]` is the vertex matched to `v`.
    pub mate: Vec<usize>,
    pub total_weight: W,
}

pub fn min_weight_perfect_matching<W: Weight>(g: &WeightedGraph<W>) -> Result<Matching<W>, MatchingError> {
    let n = g.num_vertices;
    if n % 2 == 1 {
        return Err(MatchingError::OddVertexCount(n));
    }
    if n == 0 {
        return Ok(Matching { edges: Vec::new(), mate: Vec::new(), total_weight: W::zero() });
    }
    let max_w = g
        .edges
        .iter()
        .map(|e| e.2)
        .fold(None, |m: Option<W>, w| match m {
            Some(m) if m >= w => Some(m),
            _ => Some(w),
        })
        .ok_or(MatchingError::NoPerfectMatching)?;
    let shift = max_w + W::one();
    let flipped: Vec<(usize, usize, W)> = g.edges.iter().map(|&(u, v, w)| (u, v, shift - w)).collect();

    let mate = Blossom::new(n, &flipped).solve();

    let mut edge_of = std::collections::HashMap::with_capacity(g.edges.len());
    for (k, &(u, v, _)) in g.edges.iter().enumerate() {
        edge_of.insert((u.min(v), u.max(v)), k);
    }
    let mut edges = Vec::with_capacity(n / 2);
    let mut total = W::zero();
    let mut out = vec![0; n];
    for v in 0..n {
        let m = mate[v];
        if m == NONE {
            return Err(MatchingError::NoPerfectMatching);
        }
        out[v] = m;
        if v < m {
            let k = edge_of[&(v, m)];
            edges.push(k);
            total = total + g.edges[k].2;
        }
    }
    Ok(Matching { edges, mate: out, total_weight: total })
}

const NONE: usize = usize::MAX;

/// Working state of the maximum-weight, maximum-cardinality solver.
///
/// Vertices are `0..n`, blossoms `n..2n`. Edge `k` has endpoints `2k` and
/// `2k + 1`; `endpoint[p]` is the vertex at endpoint `p`, and `p ^ 1` is the
/// opposite endpoint.
struct Blossom<'a, W> {
    n: usize,
    edges: &'a [(usize, usize, W)],
    endpoint: Vec<usize>,
    /// Endpoints of incident edges, pointing away from the vertex.
    neighbend: Vec<Vec<usize>>,
    /// Remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    /// 0 free, 1 S, 2 T; bit 4 marks blossoms during scanning.
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<W>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a, W: Weight> Blossom<'a, W> {
    fn new(n: usize, edges: &'a [(usize, usize, W)]) -> Self {
        let nedge = edges.len();
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let maxweight = edges.iter().map(|e| e.2).fold(W::zero(), |m, w| if w > m { w } else { m });
        let mut dualvar = vec![maxweight; n];
        dualvar.extend(std::iter::repeat_n(W::zero(), n));
        let mut blossombase: Vec<usize> = (0..n).collect();
        blossombase.extend(std::iter::repeat_n(NONE, n));
        Blossom {
            n,
            edges,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> W {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - w.twice()
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.n {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev().copied());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let mut w = w;
        let mut t = t;
        let mut p = p;
        loop {
            let b = self.inblossom[w];
            debug_assert!(self.label[w] == 0 && self.label[b] == 0);
            self.label[w] = t;
            self.label[b] = t;
            self.labelend[w] = p;
            self.labelend[b] = p;
            self.bestedge[w] = NONE;
            self.bestedge[b] = NONE;
            if t == 1 {
                let leaves = self.leaves(b);
                self.queue.extend(leaves);
                return;
            }
            // T-vertex: label the mate of its base as S.
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert!(mb != NONE);
            w = self.endpoint[mb];
            t = 1;
            p = mb ^ 1;
        }
    }

    /// Traces back from `v` and `w` to find either a new blossom (returns
    /// its base) or an augmenting path (returns NONE).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                let bt = self.inblossom[v];
                debug_assert_eq!(self.label[bt], 2);
                v = self.endpoint[self.labelend[bt]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots available");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = W::zero();
        for leaf in self.leaves_of_path(&path) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &sub in &path {
            let nblist: Vec<usize> = match self.blossombestedges[sub].take() {
                Some(list) => list,
                None => self
                    .leaves(sub)
                    .into_iter()
                    .flat_map(|leaf| self.neighbend[leaf].iter().map(|p| p / 2))
                    .collect(),
            };
            for kk in nblist {
                let (i, mut j, _) = self.edges[kk];
                if self.inblossom[j] == b {
                    j = i;
                }
                let bj = self.inblossom[j];
                if bj != b
                    && self.label[bj] == 1
                    && (bestedgeto[bj] == NONE || self.slack(kk) < self.slack(bestedgeto[bj]))
                {
                    bestedgeto[bj] = kk;
                }
            }
            self.bestedge[sub] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&kk| kk != NONE).collect();
        self.bestedge[b] = NONE;
        for &kk in &list {
            if self.bestedge[b] == NONE || self.slack(kk) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = kk;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.blossomchilds[b] = path;
        self.blossomendps[b] = endps;
    }

    fn leaves_of_path(&self, path: &[usize]) -> Vec<usize> {
        path.iter().flat_map(|&s| self.leaves(s)).collect()
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == W::zero() {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }

        if !endstage && self.label[b] == 2 {
            // Relabel the children along the even path from the entry
            // child to the base.
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let len = childs.len() as isize;
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = endps[at(j - endptrick as isize)] ^ endptrick ^ 1;
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[endps[at(j - endptrick as isize)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves(bv);
                let v = leaves.iter().copied().find(|&v| self.label[v] != 0).unwrap_or(*leaves.last().unwrap());
                if self.label[v] != 0 {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let mb = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[mb]] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }

        self.label[b] = u8::MAX;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the even path from `v` to the
    /// base of blossom `b`, making `v` the new base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let childs = self.blossomchilds[b].clone();
        let endps = self.blossomendps[b].clone();
        let len = childs.len() as isize;
        let at = |j: isize| -> usize { j.rem_euclid(len) as usize };
        let i = childs.iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t1 = childs[at(j)];
            let p = endps[at(j - endptrick as isize)] ^ endptrick;
            if t1 >= self.n {
                self.augment_blossom(t1, self.endpoint[p]);
            }
            j += jstep;
            let t2 = childs[at(j)];
            if t2 >= self.n {
                self.augment_blossom(t2, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (s0, p0) in [(v, 2 * k + 1), (w, 2 * k)] {
            let (mut s, mut p) = (s0, p0);
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Returns `mate` as vertex indices (NONE for unmatched vertices).
    fn solve(mut self) -> Vec<usize> {
        let n = self.n;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = W::zero();
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if W::is_tight(kslack) {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path on tight edges: pick the largest dual
                // change that keeps every slack non-negative.
                let mut deltatype = 0u8;
                let mut delta = W::zero();
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;

                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let d = self.slack(self.bestedge[b]).half();
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // Maximum cardinality reached; make the final dual
                    // update and stop.
                    deltatype = 1;
                    let m = self.dualvar[..n].iter().copied().fold(None, |m: Option<W>, d| match m {
                        Some(m) if m <= d => Some(m),
                        _ => Some(d),
                    });
                    delta = match m {
                        Some(m) if m > W::zero() => m,
                        _ => W::zero(),
                    };
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] = self.dualvar[v] - delta,
                        2 => self.dualvar[v] = self.dualvar[v] + delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] = self.dualvar[b] + delta,
                            2 => self.dualvar[b] = self.dualvar[b] - delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }

            // End of stage: expand S-blossoms whose dual reached zero.
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == W::zero()
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        self.mate.iter().map(|&p| if p == NONE { NONE } else { self.endpoint[p] }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = WeightedGraph::new(2, vec![(0, 1, 5i64)]).unwrap();
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.total_weight, 5);
        assert_eq!(m.edges, vec![0]);
    }

    #[test]
    fn k4_prefers_cheap_pairs() {
        let g = WeightedGraph::new(
            4,
            vec![(0, 1, 1i64), (2, 3, 1), (0, 2, 10), (1, 3, 10), (0, 3, 10), (1, 2, 10)],
        )
        .unwrap();
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.total_weight, 2);
        let mut e = m.edges.clone();
        e.sort();
        assert_eq!(e, vec![0, 1]);
    }

    #[test]
    fn negative_weights() {
        let g = WeightedGraph::new(4, vec![(0, 1, -3.0), (2, 3, 4.0), (0, 2, -1.0), (1, 3, -1.0)]).unwrap();
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.total_weight, -2.0);
    }

    #[test]
    fn infeasible_inputs() {
        let g = WeightedGraph::new(3, vec![(0, 1, 1i64)]).unwrap();
        assert_eq!(min_weight_perfect_matching(&g), Err(MatchingError::OddVertexCount(3)));
        // a star has no perfect matching
        let g = WeightedGraph::new(4, vec![(0, 1, 1i64), (0, 2, 1), (0, 3, 1)]).unwrap();
        assert_eq!(min_weight_perfect_matching(&g), Err(MatchingError::NoPerfectMatching));
        let g = WeightedGraph::new(2, Vec::<(usize, usize, i64)>::new()).unwrap();
        assert_eq!(min_weight_perfect_matching(&g), Err(MatchingError::NoPerfectMatching));
    }

    #[test]
    fn malformed_graphs() {
        assert_eq!(WeightedGraph::new(2, vec![(1, 1, 0i64)]), Err(MatchingError::SelfLoop(1)));
        assert_eq!(WeightedGraph::new(2, vec![(0, 1, 0i64), (1, 0, 2)]), Err(MatchingError::DuplicateEdge(1, 0)));
        assert_eq!(WeightedGraph::new(2, vec![(0, 2, 0i64)]), Err(MatchingError::VertexOutOfRange(0, 2)));
        assert_eq!(WeightedGraph::new(2, vec![(0, 1, f64::NAN)]), Err(MatchingError::NonFiniteWeight));
    }

    #[test]
    fn empty_graph() {
        let g = WeightedGraph::<i64>::new(0, vec![]).unwrap();
        assert_eq!(min_weight_perfect_matching(&g).unwrap().total_weight, 0);
    }
}
