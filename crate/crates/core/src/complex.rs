//! Weighted graphs, their flag complexes and Vietoris-Rips filtrations, and
//! the Alexandrov-topology operations (star, closure, frontier, interior) on
//! subsets of a filtered complex.
//!
//! Simplices are stored with their vertices in ascending order, which also
//! fixes their orientation. A [`Filtration`] keeps its simplices totally
//! ordered by `(value, dimension, lexicographic vertices)`, so that exactly
//! one simplex enters at every step.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of simplices a flag complex may contain.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

/// Undirected graph with nonnegative edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Validates and normalizes an edge list. Edges are stored with `u < v`.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::contract(format!("self-loop on vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::contract(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::contract(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::contract(format!("duplicate edge ({a}, {b})")));
            }
            out.push((a, b, w));
        }
        Ok(Self { vertex_count, edges: out })
    }

    /// Complete graph on a point cloud, optionally sparsified to the union of
    /// each point's `knn` nearest neighbors.
    pub fn from_points(points: &[Vec<f64>], metric: Metric, knn: Option<usize>) -> Result<Self> {
        let n = points.len();
        if let Some(d) = points.first().map(Vec::len) {
            if let Some(bad) = points.iter().position(|p| p.len() != d) {
                return Err(Error::contract(format!(
                    "point {bad} has {} coordinates, expected {d}",
                    points[bad].len()
                )));
            }
        }
        let dist = |i: usize, j: usize| metric.distance(&points[i], &points[j]);
        let mut keep = BTreeSet::new();
        match knn {
            None => {
                for i in 0..n {
                    for j in i + 1..n {
                        keep.insert((i, j));
                    }
                }
            }
            Some(k) => {
                for i in 0..n {
                    let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                    others.sort_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)).then(a.cmp(&b)));
                    for &j in others.iter().take(k) {
                        keep.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
        Self::new(n, keep.into_iter().map(|(i, j)| (i, j, dist(i, j))))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Returns a copy with the weight of edge `index` replaced.
    pub fn with_weight(&self, index: usize, weight: f64) -> Result<Self> {
        let mut edges = self.edges.clone();
        let e = edges
            .get_mut(index)
            .ok_or_else(|| Error::contract(format!("edge index {index} out of range")))?;
        e.2 = weight;
        Self::new(self.vertex_count, edges)
    }
}

/// Distance used to turn a point cloud into a complete weighted graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Manhattan,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.map(f64::abs).sum(),
        }
    }
}

/// An oriented simplex, identified by its strictly increasing vertex tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty or repeated vertex lists.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract(format!("invalid simplex vertex list {vertices:?}")));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces with their incidence signs: removing vertex `i`
    /// contributes `(-1)^i`.
    pub fn facets(&self) -> impl Iterator<Item = (i64, Simplex)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut f = self.0.clone();
            f.remove(i);
            (if i % 2 == 0 { 1 } else { -1 }, Simplex(f))
        })
    }

    pub fn contains(&self, other: &Simplex) -> bool {
        other.0.iter().all(|v| self.0.binary_search(v).is_ok())
    }

    /// Sign of `facet` in the boundary of `self`, or `None` if it is not a facet.
    pub fn incidence(&self, facet: &Simplex) -> Option<i64> {
        if facet.0.len() + 1 != self.0.len() {
            return None;
        }
        let missing = (0..self.0.len()).find(|&i| {
            self.0
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v)
                .eq(facet.0.iter())
        })?;
        Some(if missing % 2 == 0 { 1 } else { -1 })
    }
}

fn filtration_order(a: (&Simplex, f64), b: (&Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.dim().cmp(&b.0.dim()))
        .then_with(|| a.0.cmp(b.0))
}

/// A filtered simplicial complex with a total order on its simplices.
///
/// Immutable after construction; all queries take `&self`.
#[derive(Clone, Debug)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    values: Vec<f64>,
    lookup: HashMap<Simplex, usize>,
    /// `facets[i][j]` is the index of the face obtained by removing vertex `j`.
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
    dim_cap: usize,
}

/// One entry of the JSON filtration dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationEntry {
    pub vertices: Vec<usize>,
    pub value: f64,
    pub index: usize,
}

impl Filtration {
    /// Builds a filtration from explicit `(simplex, value)` pairs.
    ///
    /// The set must be closed under faces and face-monotone. `dim_cap` records
    /// the dimension up to which the complex is known to be complete; it
    /// defaults to the largest dimension present.
    pub fn from_simplices(entries: Vec<(Simplex, f64)>, dim_cap: Option<usize>) -> Result<Self> {
        let mut entries = entries;
        entries.sort_by(|a, b| filtration_order((&a.0, a.1), (&b.0, b.1)));
        let max_dim = entries.iter().map(|(s, _)| s.dim()).max().unwrap_or(0);
        let dim_cap = dim_cap.unwrap_or(max_dim);
        if dim_cap < max_dim {
            return Err(Error::contract(format!(
                "dimension cap {dim_cap} is below the largest simplex dimension {max_dim}"
            )));
        }
        let mut lookup = HashMap::with_capacity(entries.len());
        for (i, (s, v)) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::contract(format!("simplex {:?} has non-finite value", s.0)));
            }
            if lookup.insert(s.clone(), i).is_some() {
                return Err(Error::contract(format!("duplicate simplex {:?}", s.0)));
            }
        }
        let (simplices, values): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let mut facets = Vec::with_capacity(simplices.len());
        let mut cofacets = vec![Vec::new(); simplices.len()];
        for (i, s) in simplices.iter().enumerate() {
            let mut fs = Vec::with_capacity(s.0.len());
            for (_, f) in s.facets() {
                let j = *lookup.get(&f).ok_or_else(|| {
                    Error::contract(format!("face {:?} of {:?} is missing", f.0, s.0))
                })?;
                if values[j] > values[i] {
                    return Err(Error::contract(format!(
                        "face {:?} enters after its coface {:?}",
                        f.0, s.0
                    )));
                }
                cofacets[j].push(i);
                fs.push(j);
            }
            facets.push(fs);
        }
        Ok(Self { simplices, values, lookup, facets, cofacets, dim_cap })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, index: usize) -> &Simplex {
        &self.simplices[index]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self, index: usize) -> usize {
        self.simplices[index].dim()
    }

    /// Dimension up to which every clique is present.
    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn index_of(&self, simplex: &Simplex) -> Result<usize> {
        self.lookup
            .get(simplex)
            .copied()
            .ok_or_else(|| Error::UnknownSimplex(simplex.0.clone()))
    }

    pub fn vertex_index(&self, v: usize) -> Result<usize> {
        self.index_of(&Simplex::vertex(v))
    }

    /// Facet indices of simplex `index`, ordered by the removed vertex position.
    pub fn facets(&self, index: usize) -> &[usize] {
        &self.facets[index]
    }

    pub fn cofacets(&self, index: usize) -> &[usize] {
        &self.cofacets[index]
    }

    /// Vertex ids present in the complex, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> =
            self.simplices.iter().filter(|s| s.dim() == 0).map(|s| s.0[0]).collect();
        vs.sort_unstable();
        vs
    }

    /// Number of simplices with value `<= t`; these form the prefix `S_t`.
    pub fn prefix_len(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v <= t)
    }

    /// Largest filtration value (`t+`), or 0 for an empty filtration.
    pub fn horizon(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Distinct filtration values, ascending.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &v in &self.values {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Edges of simplex `index` in filtration order; the last one realizes the
    /// simplex value under the tie-break.
    pub fn edges_of(&self, index: usize) -> Vec<usize> {
        let vs = &self.simplices[index].0;
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if let Some(&e) = self.lookup.get(&Simplex(vec![vs[i], vs[j]])) {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_entries(&self) -> Vec<FiltrationEntry> {
        self.simplices
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(|(index, (s, &value))| FiltrationEntry { vertices: s.0.clone(), value, index })
            .collect()
    }

    /// Rebuilds a filtration from a dump. Indices are recomputed and must
    /// agree with the stored ones.
    pub fn from_entries(entries: &[FiltrationEntry], dim_cap: Option<usize>) -> Result<Self> {
        let pairs = entries
            .iter()
            .map(|e| Ok((Simplex::new(e.vertices.clone())?, e.value)))
            .collect::<Result<Vec<_>>>()?;
        let f = Self::from_simplices(pairs, dim_cap)?;
        for e in entries {
            let i = f.index_of(&Simplex::new(e.vertices.clone())?)?;
            if i != e.index {
                return Err(Error::contract(format!(
                    "simplex {:?} stored at index {} but sorts to {i}",
                    e.vertices, e.index
                )));
            }
        }
        Ok(f)
    }

    /// Builds a subset from simplex indices, classifying it as open/closed.
    pub fn subset(&self, members: impl IntoIterator<Item = usize>) -> Result<SimplexSubset> {
        let mut m: Vec<usize> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        if let Some(&bad) = m.iter().find(|&&i| i >= self.len()) {
            return Err(Error::contract(format!("simplex index {bad} out of range")));
        }
        Ok(self.classified(m))
    }

    fn classified(&self, members: Vec<usize>) -> SimplexSubset {
        let mut mask = vec![false; self.len()];
        for &i in &members {
            mask[i] = true;
        }
        let open = members.iter().all(|&i| self.cofacets[i].iter().all(|&c| mask[c]));
        let closed = members.iter().all(|&i| self.facets[i].iter().all(|&f| mask[f]));
        SimplexSubset { members, open, closed }
    }

    pub fn whole(&self) -> SimplexSubset {
        SimplexSubset { members: (0..self.len()).collect(), open: true, closed: true }
    }

    pub fn empty_subset(&self) -> SimplexSubset {
        SimplexSubset { members: Vec::new(), open: true, closed: true }
    }

    fn star_indices(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::new();
        for s in seeds {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &c in &self.cofacets[i] {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        (0..self.len()).filter(|&i| seen[i]).collect()
    }

    /// All cofaces of `simplex`, including itself. Always open.
    pub fn star(&self, simplex: &Simplex) -> Result<SimplexSubset> {
        let i = self.index_of(simplex)?;
        Ok(SimplexSubset { members: self.star_indices([i]), open: true, closed: false }
            .reclassify(self))
    }

    pub fn vertex_star(&self, v: usize) -> Result<SimplexSubset> {
        self.star(&Simplex::vertex(v))
    }

    /// Union of the stars of the subset's simplices, i.e. the smallest open
    /// set containing it.
    pub fn open_hull(&self, subset: &SimplexSubset) -> SimplexSubset {
        self.classified(self.star_indices(subset.members.iter().copied()))
    }

    /// Smallest subcomplex containing `subset`.
    pub fn closure(&self, subset: &SimplexSubset) -> SimplexSubset {
        let mut mask = vec![false; self.len()];
        for &i in &subset.members {
            mask[i] = true;
        }
        // facets precede their cofaces in the order, so one backward sweep suffices
        for i in (0..self.len()).rev() {
            if mask[i] {
                for &f in &self.facets[i] {
                    mask[f] = true;
                }
            }
        }
        self.classified((0..self.len()).filter(|&i| mask[i]).collect())
    }

    /// `closure(A) \ A` for an open subset `A`.
    pub fn frontier(&self, subset: &SimplexSubset) -> Result<SimplexSubset> {
        if !subset.open {
            return Err(Error::contract("frontier requires an open subset"));
        }
        let cl = self.closure(subset);
        Ok(self.classified(cl.members.into_iter().filter(|i| !subset.contains(*i)).collect()))
    }

    /// Largest open set contained in `subset`: simplices whose whole star lies inside.
    pub fn interior(&self, subset: &SimplexSubset) -> SimplexSubset {
        let mut mask = vec![false; self.len()];
        for &i in &subset.members {
            mask[i] = true;
        }
        // a simplex survives iff it and all its cofacets survive; cofaces come later
        let mut keep = mask.clone();
        for i in (0..self.len()).rev() {
            if keep[i] && self.cofacets[i].iter().any(|&c| !keep[c]) {
                keep[i] = false;
            }
        }
        self.classified((0..self.len()).filter(|&i| keep[i]).collect())
    }

    pub fn complement(&self, subset: &SimplexSubset) -> SimplexSubset {
        self.classified((0..self.len()).filter(|&i| !subset.contains(i)).collect())
    }

    pub fn intersection(&self, a: &SimplexSubset, b: &SimplexSubset) -> SimplexSubset {
        self.classified(a.members.iter().copied().filter(|&i| b.contains(i)).collect())
    }

    pub fn union(&self, a: &SimplexSubset, b: &SimplexSubset) -> SimplexSubset {
        self.classified(a.members.iter().chain(&b.members).copied().collect::<BTreeSet<_>>().into_iter().collect())
    }

    /// Sub-filtration induced by the `rings`-fold closed-star neighborhood of
    /// `vertices`, together with the union of the vertices' stars inside it.
    ///
    /// Ring `r` is the closure of the stars of every vertex of ring `r - 1`;
    /// ring 0 is the input vertex set.
    pub fn truncate_neighborhood(&self, vertices: &[usize], rings: usize) -> Result<(Truncation, SimplexSubset)> {
        if rings < 1 {
            return Err(Error::contract("neighborhood truncation needs rings >= 1"));
        }
        let seeds = vertices.iter().map(|&v| self.vertex_index(v)).collect::<Result<Vec<_>>>()?;
        let mut current: Vec<usize> = seeds.clone();
        let mut region = Vec::new();
        for _ in 0..rings {
            let star = SimplexSubset { members: self.star_indices(current.iter().copied()), open: true, closed: false };
            region = self.closure(&star).members;
            current = region.iter().copied().filter(|&i| self.dim(i) == 0).collect();
        }
        let truncation = Truncation::new(self, &region)?;
        let star = self.star_indices(seeds);
        let local = star.iter().map(|&i| truncation.local_index(i).expect("star lies in its closure"));
        let subset = truncation.filtration.subset(local)?;
        Ok((truncation, subset))
    }
}

/// Subset of a filtration's simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexSubset {
    members: Vec<usize>,
    open: bool,
    closed: bool,
}

impl SimplexSubset {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Dense membership mask over a filtration of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.members {
            m[i] = true;
        }
        m
    }

    fn reclassify(self, f: &Filtration) -> Self {
        f.classified(self.members)
    }
}

/// A sub-filtration together with the map back to the parent's indices.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub filtration: Filtration,
    /// `parent_index[i]` is the parent index of local simplex `i`.
    pub parent_index: Vec<usize>,
    local: HashMap<usize, usize>,
}

impl Truncation {
    fn new(parent: &Filtration, members: &[usize]) -> Result<Self> {
        let entries = members
            .iter()
            .map(|&i| (parent.simplex(i).clone(), parent.value(i)))
            .collect();
        let filtration = Filtration::from_simplices(entries, Some(parent.dim_cap()))?;
        // the parent's order restricted to a subset is the subset's own order
        let parent_index: Vec<usize> = members.to_vec();
        let local = parent_index.iter().enumerate().map(|(l, &p)| (p, l)).collect();
        Ok(Self { filtration, parent_index, local })
    }

    pub fn local_index(&self, parent: usize) -> Option<usize> {
        self.local.get(&parent).copied()
    }
}

/// Flag complex of `graph` up to dimension `max_dim` with Vietoris-Rips values:
/// vertices enter at 0 and every other simplex at the largest weight among its edges.
pub fn build_flag_complex(graph: &WeightedGraph, max_dim: usize) -> Result<Filtration> {
    build_flag_complex_with_budget(graph, max_dim, DEFAULT_SIMPLEX_BUDGET)
}

pub fn build_flag_complex_with_budget(graph: &WeightedGraph, max_dim: usize, budget: usize) -> Result<Filtration> {
    let n = graph.vertex_count();
    // neighbors with larger id, sorted, with weights
    let mut upper: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in graph.edges() {
        upper[u].push((v, w));
    }
    for list in &mut upper {
        list.sort_by_key(|&(v, _)| v);
    }
    let weight = |a: usize, b: usize| -> Option<f64> {
        let list = &upper[a];
        list.binary_search_by_key(&b, |&(v, _)| v).ok().map(|i| list[i].1)
    };

    let mut entries: Vec<(Simplex, f64)> = Vec::new();
    let mut stack: Vec<(Vec<usize>, f64, Vec<usize>)> = Vec::new();
    for v in 0..n {
        stack.push((vec![v], 0.0, upper[v].iter().map(|&(u, _)| u).collect()));
    }
    while let Some((clique, value, candidates)) = stack.pop() {
        if entries.len() >= budget {
            return Err(Error::Budget { budget });
        }
        let dim = clique.len() - 1;
        if dim < max_dim {
            for (pos, &c) in candidates.iter().enumerate() {
                let mut w = value;
                for &x in &clique {
                    w = w.max(weight(x, c).expect("candidate adjacent to clique"));
                }
                let next: Vec<usize> = candidates[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&d| weight(c, d).is_some())
                    .collect();
                let mut grown = clique.clone();
                grown.push(c);
                stack.push((grown, w, next));
            }
        }
        entries.push((Simplex(clique), value));
    }
    Filtration::from_simplices(entries, Some(max_dim))
}
