//! Maximum-weight matching in general weighted graphs.
//!
//! This is a port of the blossom-based primal-dual method of Galil (1986),
//! following Joris van Rantwijk's reference implementation. Weight-optimal
//! matchings are computed directly (never maximum-cardinality-then-weight),
//! so negative-weight edges are never forced into the result.
//!
//! Weights are exact rationals and all dual arithmetic stays exact, which
//! keeps tightness tests (`slack == 0`) reliable; callers with float weights
//! convert them losslessly. Runs in O(n^3) stages like the reference.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{rat_zero, Rat};

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertices: usize,
    edges: Vec<(usize, usize, Rat)>,
}

impl WeightedGraph {
    pub fn new(vertices: usize) -> Self {
        WeightedGraph {
            vertices,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(vertices: usize, edges: Vec<(usize, usize, Rat)>) -> Result<Self> {
        let mut g = WeightedGraph::new(vertices);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// Lossless f64 -> rational conversion; rejects non-finite weights.
    pub fn from_f64_edges(vertices: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = WeightedGraph::new(vertices);
        for &(u, v, w) in edges {
            let w = Rat::from_float(w)
                .ok_or_else(|| Error::InvalidParameter(format!("non-finite edge weight {w}")))?;
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// The graph must stay simple: no loops, at most one edge per pair.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: Rat) -> Result<()> {
        if u == v {
            return Err(Error::InvalidParameter(format!("loop edge at vertex {u}")));
        }
        if u >= self.vertices || v >= self.vertices {
            return Err(Error::InvalidParameter(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.vertices
            )));
        }
        if self
            .edges
            .iter()
            .any(|(a, b, _)| (*a == u && *b == v) || (*a == v && *b == u))
        {
            return Err(Error::InvalidParameter(format!(
                "parallel edge between {u} and {v}"
            )));
        }
        self.edges.push((u, v, weight));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, Rat)] {
        &self.edges
    }
}

/// Edges of a maximum-weight matching, as (u, v) pairs with u < v, sorted.
pub fn max_weight_matching(graph: &WeightedGraph) -> Vec<(usize, usize)> {
    if graph.edges.is_empty() {
        return Vec::new();
    }
    let mut solver = Blossom::new(graph);
    solver.solve();
    #[cfg(debug_assertions)]
    solver.verify_optimum();
    let mut pairs = Vec::new();
    for v in 0..solver.nvertex {
        if let Some(p) = solver.mate[v] {
            let w = solver.endpoint[p];
            if v < w {
                pairs.push((v, w));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

pub fn matching_total_weight(graph: &WeightedGraph, matching: &[(usize, usize)]) -> Rat {
    let mut total = rat_zero();
    for &(u, v) in matching {
        for (a, b, w) in &graph.edges {
            if (*a == u && *b == v) || (*a == v && *b == u) {
                total += w;
                break;
            }
        }
    }
    total
}

const FREE: u8 = 0;
const LABEL_S: u8 = 1;
const LABEL_T: u8 = 2;
const BREADCRUMB: u8 = 5; // S-label with the scan_blossom marker bit

struct Blossom {
    nvertex: usize,
    nedge: usize,
    edges: Vec<(usize, usize, Rat)>,
    // endpoint[p]: vertex to which endpoint p is attached; endpoints 2k and
    // 2k+1 belong to edge k.
    endpoint: Vec<usize>,
    // neighbend[v]: remote endpoints of the edges attached to v.
    neighbend: Vec<Vec<usize>>,
    // mate[v]: remote endpoint of v's matched edge, or None if single.
    mate: Vec<Option<usize>>,
    // label of a top-level blossom (looked up via inblossom for vertices).
    label: Vec<u8>,
    // labelend[b]: remote endpoint of the edge through which b got its label.
    labelend: Vec<Option<usize>>,
    // inblossom[v]: top-level blossom containing vertex v.
    inblossom: Vec<usize>,
    blossomparent: Vec<Option<usize>>,
    // blossomchilds[b]: ordered sub-blossoms, starting at the base.
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<Option<usize>>,
    // blossomendps[b][i]: endpoint of child i on the edge to child i+1.
    blossomendps: Vec<Vec<usize>>,
    // least-slack edge bookkeeping for delta2/delta3.
    bestedge: Vec<Option<usize>>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    // dualvar[v] = 2u(v) for vertices, z(b) for blossoms.
    dualvar: Vec<Rat>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    fn new(graph: &WeightedGraph) -> Self {
        let edges = graph.edges.clone();
        let nedge = edges.len();
        let nvertex = graph.vertices;
        let maxweight = edges
            .iter()
            .map(|(_, _, w)| w.clone())
            .max()
            .unwrap_or_else(rat_zero)
            .max(rat_zero());
        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, (i, j, _)) in edges.iter().enumerate() {
            neighbend[*i].push(2 * k + 1);
            neighbend[*j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![rat_zero(); nvertex]);
        Blossom {
            nvertex,
            nedge,
            edges,
            endpoint,
            neighbend,
            mate: vec![None; nvertex],
            label: vec![FREE; 2 * nvertex],
            labelend: vec![None; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![None; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex)
                .map(Some)
                .chain((0..nvertex).map(|_| None))
                .collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![None; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    /// 2 * slack of edge k (not meaningful inside blossoms).
    fn slack(&self, k: usize) -> Rat {
        let (i, j, ref wt) = self.edges[k];
        &self.dualvar[i] + &self.dualvar[j] - wt * crate::rat::rat_int(2)
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = Vec::new();
        if b < self.nvertex {
            leaves.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    leaves.push(t);
                } else {
                    leaves.extend(self.blossom_leaves(t));
                }
            }
        }
        leaves
    }

    fn assign_label(&mut self, w: usize, t: u8, p: Option<usize>) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == FREE && self.label[b] == FREE);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = None;
        self.bestedge[b] = None;
        if t == LABEL_S {
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else if t == LABEL_T {
            // The base is the only vertex of a T-blossom with an external
            // mate; its mate becomes an S-vertex.
            let base = self.blossombase[b].expect("labelled blossom has a base");
            let mbase = self.mate[base].expect("T-blossom base is matched");
            let endpoint = self.endpoint[mbase];
            self.assign_label(endpoint, LABEL_S, Some(mbase ^ 1));
        }
    }

    /// Trace back from v and w; returns the base of a new blossom, or None
    /// if an augmenting path was discovered.
    fn scan_blossom(&mut self, v: usize, w: usize) -> Option<usize> {
        let mut path = Vec::new();
        let mut base = None;
        let mut v = Some(v);
        let mut w = Some(w);
        while let Some(vc) = v {
            let mut b = self.inblossom[vc];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], LABEL_S);
            path.push(b);
            self.label[b] = BREADCRUMB;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b].unwrap()]);
            match self.labelend[b] {
                None => v = None, // the base of b is single; stop this path
                Some(le) => {
                    let vb = self.endpoint[le];
                    b = self.inblossom[vb];
                    debug_assert_eq!(self.label[b], LABEL_T);
                    let le2 = self.labelend[b].expect("T-blossom has a label end");
                    v = Some(self.endpoint[le2]);
                }
            }
            if w.is_some() {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = LABEL_S;
        }
        base
    }

    /// Build a new blossom with the given base around edge k (which joins
    /// two S-vertices); relabel its T-vertices as S.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unusedblossoms.pop().expect("blossom slots available");
        self.blossombase[b] = Some(base);
        self.blossomparent[b] = None;
        self.blossomparent[bb] = Some(b);

        let mut childs = Vec::new();
        let mut endps = Vec::new();

        // Trace back from v to the base.
        while bv != bb {
            self.blossomparent[bv] = Some(b);
            childs.push(bv);
            let le = self.labelend[bv].expect("sub-blossom has a label end");
            endps.push(le);
            v = self.endpoint[le];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);

        // Trace back from w to the base.
        while bw != bb {
            self.blossomparent[bw] = Some(b);
            childs.push(bw);
            let le = self.labelend[bw].expect("sub-blossom has a label end");
            endps.push(le ^ 1);
            w = self.endpoint[le];
            bw = self.inblossom[w];
        }

        self.blossomchilds[b] = childs;
        self.blossomendps[b] = endps;

        debug_assert_eq!(self.label[bb], LABEL_S);
        self.label[b] = LABEL_S;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = rat_zero();

        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == LABEL_T {
                // T-vertices inside the new S-blossom turn into S-vertices.
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Recompute least-slack edges to neighbouring S-blossoms.
        let mut bestedgeto: Vec<Option<usize>> = vec![None; 2 * self.nvertex];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self
                    .blossom_leaves(bv)
                    .iter()
                    .map(|&v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        j = i;
                    }
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == LABEL_S
                        && (bestedgeto[bj].is_none()
                            || self.slack(k) < self.slack(bestedgeto[bj].unwrap()))
                    {
                        bestedgeto[bj] = Some(k);
                    }
                }
            }
            self.bestedge[bv] = None;
        }
        let best: Vec<usize> = bestedgeto.into_iter().flatten().collect();
        self.bestedge[b] = None;
        for &k in &best {
            if self.bestedge[b].is_none() || self.slack(k) < self.slack(self.bestedge[b].unwrap())
            {
                self.bestedge[b] = Some(k);
            }
        }
        self.blossombestedges[b] = Some(best);
    }

    /// Expand the given top-level blossom.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = None;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s].is_zero() {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }

        if !endstage && self.label[b] == LABEL_T {
            // Relabel sub-blossoms from the entry child to the base.
            let lb = self.labelend[b].expect("T-blossom has a label end");
            let entrychild = self.inblossom[self.endpoint[lb ^ 1]];
            let len = self.blossomchilds[b].len() as i64;
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .expect("entry child is a sub-blossom") as i64;
            let (jstep, endptrick): (i64, i64) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = lb;
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = FREE;
                let q = at(&self.blossomendps[b], j - endptrick) ^ endptrick as usize;
                self.label[self.endpoint[q ^ 1]] = FREE;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, LABEL_T, Some(p));
                // Step to the next S-sub-blossom and note its forward endpoint.
                self.allowedge[at(&self.blossomendps[b], j - endptrick) / 2] = true;
                j += jstep;
                p = at(&self.blossomendps[b], j - endptrick) ^ endptrick as usize;
                // Step to the next T-sub-blossom.
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // Relabel the base T-sub-blossom without stepping through to its
            // mate.
            let bv = at(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = LABEL_T;
            self.label[bv] = LABEL_T;
            self.labelend[self.endpoint[p ^ 1]] = Some(p);
            self.labelend[bv] = Some(p);
            self.bestedge[bv] = None;
            // Continue along the blossom until we get back to entrychild.
            j += jstep;
            while at(&self.blossomchilds[b], j) != entrychild {
                let bv = at(&self.blossomchilds[b], j);
                if self.label[bv] == LABEL_S {
                    j += jstep;
                    continue;
                }
                let mut reached = None;
                for v in self.blossom_leaves(bv) {
                    if self.label[v] != FREE {
                        reached = Some(v);
                        break;
                    }
                }
                if let Some(v) = reached {
                    debug_assert_eq!(self.label[v], LABEL_T);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = FREE;
                    let base_mate = self.mate[self.blossombase[bv].unwrap()].unwrap();
                    self.label[self.endpoint[base_mate]] = FREE;
                    let lblend = self.labelend[v];
                    self.assign_label(v, LABEL_T, lblend);
                }
                j += jstep;
            }
        }

        self.label[b] = FREE;
        self.labelend[b] = None;
        self.blossombase[b] = None;
        self.bestedge[b] = None;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombestedges[b] = None;
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges over an alternating path through
    /// blossom b between vertex v and the base vertex.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != Some(b) {
            t = self.blossomparent[t].expect("v lies inside b");
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b]
            .iter()
            .position(|&c| c == t)
            .expect("t is a sub-blossom");
        let len = self.blossomchilds[b].len() as i64;
        let mut j = i as i64;
        let (jstep, endptrick): (i64, i64) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = at(&self.blossomchilds[b], j);
            let p = at(&self.blossomendps[b], j - endptrick) ^ endptrick as usize;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = at(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = Some(p ^ 1);
            self.mate[self.endpoint[p ^ 1]] = Some(p);
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], Some(v));
    }

    /// Swap matched/unmatched edges along the augmenting path through edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], LABEL_S);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs].unwrap()]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = Some(p);
                match self.labelend[bs] {
                    None => break, // reached a single vertex
                    Some(le) => {
                        let t = self.endpoint[le];
                        let bt = self.inblossom[t];
                        debug_assert_eq!(self.label[bt], LABEL_T);
                        let le2 = self.labelend[bt].expect("T-blossom has a label end");
                        s = self.endpoint[le2];
                        let j = self.endpoint[le2 ^ 1];
                        debug_assert_eq!(self.blossombase[bt], Some(t));
                        if bt >= self.nvertex {
                            self.augment_blossom(bt, j);
                        }
                        self.mate[j] = Some(le2);
                        p = le2 ^ 1;
                    }
                }
            }
        }
    }

    fn solve(&mut self) {
        for _stage in 0..self.nvertex {
            self.label = vec![FREE; 2 * self.nvertex];
            self.bestedge = vec![None; 2 * self.nvertex];
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b] = None;
            }
            self.allowedge = vec![false; self.nedge];
            self.queue.clear();

            for v in 0..self.nvertex {
                if self.mate[v].is_none() && self.label[self.inblossom[v]] == FREE {
                    self.assign_label(v, LABEL_S, None);
                }
            }

            let mut augmented = false;
            loop {
                'scan: while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], LABEL_S);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue; // internal to a blossom
                        }
                        let mut kslack = None;
                        if !self.allowedge[k] {
                            let s = self.slack(k);
                            if s <= rat_zero() {
                                self.allowedge[k] = true;
                            } else {
                                kslack = Some(s);
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == FREE {
                                self.assign_label(w, LABEL_T, Some(p ^ 1));
                            } else if self.label[self.inblossom[w]] == LABEL_S {
                                match self.scan_blossom(v, w) {
                                    Some(base) => self.add_blossom(base, k),
                                    None => {
                                        self.augment_matching(k);
                                        augmented = true;
                                        break 'scan;
                                    }
                                }
                            } else if self.label[w] == FREE {
                                debug_assert_eq!(self.label[self.inblossom[w]], LABEL_T);
                                self.label[w] = LABEL_T;
                                self.labelend[w] = Some(p ^ 1);
                            }
                        } else if self.label[self.inblossom[w]] == LABEL_S {
                            let b = self.inblossom[v];
                            let ks = kslack.expect("slack computed for non-allowed edge");
                            if self.bestedge[b].is_none()
                                || ks < self.slack(self.bestedge[b].unwrap())
                            {
                                self.bestedge[b] = Some(k);
                            }
                        } else if self.label[w] == FREE {
                            let ks = kslack.expect("slack computed for non-allowed edge");
                            if self.bestedge[w].is_none()
                                || ks < self.slack(self.bestedge[w].unwrap())
                            {
                                self.bestedge[w] = Some(k);
                            }
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under the current duals: pump slack.
                // Type 1 terminates (a vertex dual is about to reach zero).
                let mut deltatype = 1;
                let mut delta = self.dualvar[..self.nvertex]
                    .iter()
                    .min()
                    .expect("at least one vertex")
                    .clone();
                let mut deltaedge = 0usize;
                let mut deltablossom = 0usize;

                // delta2: least slack to a free vertex.
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == FREE {
                        if let Some(be) = self.bestedge[v] {
                            let d = self.slack(be);
                            if d < delta {
                                delta = d;
                                deltatype = 2;
                                deltaedge = be;
                            }
                        }
                    }
                }

                // delta3: half the least slack between two S-blossoms.
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b].is_none() && self.label[b] == LABEL_S {
                        if let Some(be) = self.bestedge[b] {
                            let d = self.slack(be) / crate::rat::rat_int(2);
                            if d < delta {
                                delta = d;
                                deltatype = 3;
                                deltaedge = be;
                            }
                        }
                    }
                }

                // delta4: least dual of a top-level T-blossom.
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b].is_some()
                        && self.blossomparent[b].is_none()
                        && self.label[b] == LABEL_T
                        && self.dualvar[b] < delta
                    {
                        delta = self.dualvar[b].clone();
                        deltatype = 4;
                        deltablossom = b;
                    }
                }

                // Update dual variables.
                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        FREE => {}
                        LABEL_S => self.dualvar[v] -= &delta,
                        LABEL_T => self.dualvar[v] += &delta,
                        other => unreachable!("unexpected label {other}"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b].is_some() && self.blossomparent[b].is_none() {
                        match self.label[b] {
                            FREE => {}
                            LABEL_S => self.dualvar[b] += &delta,
                            LABEL_T => self.dualvar[b] -= &delta,
                            other => unreachable!("unexpected label {other}"),
                        }
                    }
                }

                match deltatype {
                    1 => break, // optimum reached
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == FREE {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], LABEL_S);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], LABEL_S);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    other => unreachable!("unexpected delta type {other}"),
                }
            }

            if !augmented {
                break;
            }

            // End of a stage: expand S-blossoms whose dual dropped to zero.
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b].is_none()
                    && self.blossombase[b].is_some()
                    && self.label[b] == LABEL_S
                    && self.dualvar[b].is_zero()
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }

    /// Exact check of the dual certificate: non-negative slacks, tight
    /// matched edges, zero duals on single vertices, full positive blossoms.
    #[cfg(debug_assertions)]
    fn verify_optimum(&self) {
        for k in 0..self.nedge {
            let (i, j, _) = self.edges[k];
            let mut s = self.slack(k);
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while let Some(p) = self.blossomparent[*iblossoms.last().unwrap()] {
                iblossoms.push(p);
            }
            while let Some(p) = self.blossomparent[*jblossoms.last().unwrap()] {
                jblossoms.push(p);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (bi, bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += &self.dualvar[*bi] * crate::rat::rat_int(2);
            }
            assert!(s >= rat_zero(), "negative slack on edge {k}");
            let matched_i = self.mate[i].map(|p| p / 2) == Some(k);
            let matched_j = self.mate[j].map(|p| p / 2) == Some(k);
            if matched_i || matched_j {
                assert!(matched_i && matched_j);
                assert!(s.is_zero(), "matched edge {k} is not tight");
            }
        }
        for v in 0..self.nvertex {
            assert!(
                self.mate[v].is_some() || self.dualvar[v].is_zero(),
                "single vertex {v} has positive dual"
            );
        }
        for b in self.nvertex..2 * self.nvertex {
            if self.blossombase[b].is_some() && self.dualvar[b] > rat_zero() {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert_eq!(self.mate[self.endpoint[p]], Some(p ^ 1));
                        assert_eq!(self.mate[self.endpoint[p ^ 1]], Some(p));
                    }
                }
            }
        }
    }
}

/// Python-style indexing: negative j counts from the back.
fn at(v: &[usize], j: i64) -> usize {
    if j >= 0 {
        v[j as usize]
    } else {
        v[v.len() - (-j) as usize]
    }
}
