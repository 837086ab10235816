//! Simple undirected graphs with labeled vertices.
//!
//! Vertex indices follow input order and every enumeration (neighbors,
//! edges, BFS frontier) proceeds in ascending index order, so all derived
//! objects are reproducible across runs.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::cycles::{BasisKind, Cycle, CycleBasis, Provenance};
use crate::error::{Error, Result};

/// A simple undirected graph.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted ascending; the position
/// of an edge in that list is its edge index, which addresses bits of
/// [`crate::cycles::EdgeVector`].
#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
    host_id: u64,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.edges == other.edges
    }
}

impl Eq for Graph {}

/// Wire form of a graph: `{"vertices": [...], "edges": [["a","b"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl Graph {
    /// Builds a graph from labels and index pairs. Rejects duplicate labels,
    /// loops, duplicate edges (in either orientation) and out-of-range
    /// endpoints. Connectivity is not required here; see [`Graph::ensure_connected`].
    pub fn new<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let n = labels.len();
        let mut pairs = Vec::new();
        let mut set = HashSet::new();
        for (a, b) in edges {
            if a >= n {
                return Err(Error::IndexOutOfRange(a));
            }
            if b >= n {
                return Err(Error::IndexOutOfRange(b));
            }
            if a == b {
                return Err(Error::Loop(labels[a].clone()));
            }
            let key = (a.min(b), a.max(b));
            if !set.insert(key) {
                return Err(Error::DuplicateEdge(
                    labels[key.0].clone(),
                    labels[key.1].clone(),
                ));
            }
            pairs.push(key);
        }
        pairs.sort_unstable();

        let mut adj = vec![Vec::new(); n];
        let mut edge_index = HashMap::with_capacity(pairs.len());
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            adj[a].push(b);
            adj[b].push(a);
            edge_index.insert((a, b), idx);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        let mut hasher = DefaultHasher::new();
        labels.hash(&mut hasher);
        pairs.hash(&mut hasher);
        let host_id = hasher.finish();

        Ok(Graph {
            labels,
            edges: pairs,
            edge_index,
            adj,
            host_id,
        })
    }

    /// Builds a graph from label pairs, e.g. `[("a","b"), ("b","c")]`.
    pub fn from_labeled<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *lookup
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownVertex(a.as_ref().to_string()))?;
            let ib = *lookup
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownVertex(b.as_ref().to_string()))?;
            pairs.push((ia, ib));
        }
        Graph::new(labels, pairs)
    }

    /// Cycle `C_n` on vertices labeled `a, b, c, ...` (or `v0, v1, ...` past 26).
    pub fn cycle(n: usize) -> Self {
        let labels = default_labels(n);
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        Graph::new(labels, edges).expect("cycle graph needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let labels = default_labels(n);
        Graph::new(labels, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn complete(n: usize) -> Self {
        let labels = default_labels(n);
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(labels, edges).expect("valid complete graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges as `(i, j)` with `i < j`, in edge-index order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// Edge index of `{a, b}` in either orientation.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_id(a, b).is_some()
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Identity tag shared by all edge vectors over this graph.
    pub fn host_id(&self) -> u64 {
        self.host_id
    }

    /// Returns the first vertex (ascending index) not reachable from vertex 0.
    pub fn unreachable_vertex(&self) -> Option<usize> {
        if self.labels.is_empty() {
            return None;
        }
        let dist = self.bfs_distances(0);
        dist.iter().position(|d| d.is_none())
    }

    pub fn is_connected(&self) -> bool {
        self.unreachable_vertex().is_none()
    }

    pub fn ensure_connected(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::Empty);
        }
        match self.unreachable_vertex() {
            Some(v) => Err(Error::Disconnected(self.labels[v].clone())),
            None => Ok(()),
        }
    }

    /// BFS distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
        }
    }

    /// Validates a wire graph, including connectivity.
    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = json
            .edges
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let vertices: Vec<&str> = json.vertices.iter().map(String::as_str).collect();
        let g = Graph::from_labeled(&vertices, &pairs)?;
        g.ensure_connected()?;
        Ok(g)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: GraphJson = serde_json::from_str(text)?;
        Graph::from_json(&json)
    }

    /// Canonical pretty-printed JSON; re-loading and re-exporting is byte-identical.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph JSON is always serializable")
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", escape_dot(name));
        for label in &self.labels {
            let _ = writeln!(out, "  \"{}\";", escape_dot(label));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\";",
                escape_dot(&self.labels[a]),
                escape_dot(&self.labels[b])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// `a, b, ..., z` for up to 26 vertices, `v0, v1, ...` beyond.
pub fn default_labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    } else {
        (0..n).map(|i| format!("v{i}")).collect()
    }
}

/// First Betti number `|E| - |V| + 1` of a connected graph.
pub fn betti(g: &Graph) -> Result<usize> {
    g.ensure_connected()?;
    Ok(g.edge_count() + 1 - g.vertex_count())
}

pub fn has_triangles(g: &Graph) -> bool {
    g.edges().iter().any(|&(a, b)| {
        let (na, nb) = (g.neighbors(a), g.neighbors(b));
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    })
}

/// A rooted spanning tree together with a breadth-first vertex ordering.
///
/// `order[p]` is the vertex at BFS position `p` (position 0 is the root);
/// positions never decrease in tree depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
    position: Vec<usize>,
    host_id: u64,
}

impl RootedTree {
    /// Roots the given tree edges at `root` and orders vertices breadth-first
    /// (ascending index among siblings). Fails unless the edges form a
    /// spanning tree of `g`.
    pub fn from_edges(g: &Graph, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = g.vertex_count();
        if root >= n {
            return Err(Error::IndexOutOfRange(root));
        }
        if edges.len() + 1 != n {
            return Err(Error::NotSpanningTree(format!(
                "{} edges given, a spanning tree of {} vertices has {}",
                edges.len(),
                n,
                n - 1
            )));
        }
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange(a.max(b)));
            }
            if !g.has_edge(a, b) {
                return Err(Error::NotSpanningTree(format!(
                    "{{{}, {}}} is not an edge of the graph",
                    g.label(a),
                    g.label(b)
                )));
            }
        }
        let tree = Graph::new(g.labels().to_vec(), edges.iter().copied())
            .map_err(|e| Error::NotSpanningTree(e.to_string()))?;
        if let Some(v) = tree.unreachable_vertex() {
            return Err(Error::NotSpanningTree(format!(
                "vertex `{}` is not reached by the tree edges",
                g.label(v)
            )));
        }
        Ok(Self::bfs_over(&tree, root, g.host_id()))
    }

    fn bfs_over(tree_or_graph: &Graph, root: usize, host_id: u64) -> Self {
        let n = tree_or_graph.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        depth[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in tree_or_graph.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        let mut position = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        RootedTree {
            root,
            parent,
            depth,
            order,
            position,
            host_id,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertices in BFS position order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// BFS position of vertex `v` (inverse of [`RootedTree::order`]).
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    /// Tree edges as `(parent, child)`, listed by the child's BFS position.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.order
            .iter()
            .skip(1)
            .map(|&c| (self.parent[c].unwrap(), c))
            .collect()
    }

    /// The tree edge whose deeper endpoint sits at BFS position `p` (`p >= 1`),
    /// as `(parent, child)`.
    pub fn edge_at(&self, p: usize) -> (usize, usize) {
        let child = self.order[p];
        (self.parent[child].expect("non-root position"), child)
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    pub fn host_id(&self) -> u64 {
        self.host_id
    }

    /// Tree path from `v` up to the root, starting with `v`.
    fn path_to_root(&self, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path
    }

    /// Vertex sequence of the tree path from `a` to `b`.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let up_a = self.path_to_root(a);
        let up_b = self.path_to_root(b);
        let on_b: HashSet<usize> = up_b.iter().copied().collect();
        let cut_a = up_a.iter().position(|v| on_b.contains(v)).unwrap();
        let lca = up_a[cut_a];
        let cut_b = up_b.iter().position(|&v| v == lca).unwrap();
        let mut path: Vec<usize> = up_a[..=cut_a].to_vec();
        path.extend(up_b[..cut_b].iter().rev());
        path
    }
}

/// Breadth-first spanning tree rooted at `root`; neighbors are explored in
/// ascending index order and `order` is the dequeue order.
pub fn bfs_spanning_tree(g: &Graph, root: usize) -> Result<RootedTree> {
    if root >= g.vertex_count() {
        return Err(Error::IndexOutOfRange(root));
    }
    let dist = g.bfs_distances(root);
    if let Some(v) = dist.iter().position(Option::is_none) {
        return Err(Error::Disconnected(g.label(v).to_string()));
    }
    Ok(RootedTree::bfs_over(g, root, g.host_id()))
}

/// One cycle per non-tree edge: the non-tree edge closed by the tree path
/// between its endpoints.
pub fn fundamental_cycles(g: &Graph, t: &RootedTree) -> Result<CycleBasis> {
    if t.host_id() != g.host_id() || t.order().len() != g.vertex_count() {
        return Err(Error::NotSpanningTree(
            "tree was built for a different graph".into(),
        ));
    }
    for (p, c) in t.edges() {
        if !g.has_edge(p, c) {
            return Err(Error::NotSpanningTree(format!(
                "{{{}, {}}} is not an edge of the graph",
                g.label(p),
                g.label(c)
            )));
        }
    }
    let mut elements = Vec::new();
    for &(a, b) in g.edges() {
        if t.contains_edge(a, b) {
            continue;
        }
        let walk = t.path_between(a, b);
        elements.push(Cycle::from_vertices(g, walk, Provenance::Fundamental)?);
    }
    Ok(CycleBasis::new(g, BasisKind::Fundamental, elements))
}
