//! Trees on dense vertex labels `0..n`, vertex subsets, rooting and
//! canonical isomorphism codes.
//!
//! Every neighbor list is kept sorted ascending so that all traversals, and
//! therefore every result computed downstream, are deterministic.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub type Vertex = usize;

/// Why an edge list failed to describe a tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotATree {
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("graph contains a cycle ({edges} edges on {n} vertices)")]
    Cyclic { n: usize, edges: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("not a tree: {0}")]
    NotATree(#[from] NotATree),
}

/// An immutable tree on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    adj: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
}

impl Tree {
    /// Validates `edges` as a spanning tree on `0..n`.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, NotATree> {
        if n == 0 {
            return Err(NotATree::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(NotATree::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(NotATree::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(NotATree::ParallelEdge(w[0].0, w[0].1));
        }
        if normalized.len() > n - 1 {
            return Err(NotATree::Cyclic {
                n,
                edges: normalized.len(),
            });
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let tree = Tree {
            adj,
            edges: normalized,
        };
        if tree.edges.len() < n - 1 || tree.bfs_distances(0).iter().any(Option::is_none) {
            return Err(NotATree::Disconnected);
        }
        Ok(tree)
    }

    /// The single-vertex tree.
    pub fn k1() -> Self {
        Tree {
            adj: vec![Vec::new()],
            edges: Vec::new(),
        }
    }

    /// Path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1, "path needs at least one vertex");
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::from_edges(n, &edges).expect("path is a tree")
    }

    /// Star `K_{1,k}` with center 0.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Tree::from_edges(k + 1, &edges).expect("star is a tree")
    }

    /// Decodes a Prüfer sequence over `0..seq.len()+2`.
    pub fn from_prufer(seq: &[Vertex]) -> Result<Self, NotATree> {
        let n = seq.len() + 2;
        if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
            return Err(NotATree::VertexOutOfRange { vertex: bad, n });
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut leaves: std::collections::BTreeSet<Vertex> =
            (0..n).filter(|&v| degree[v] == 1).collect();
        let mut edges = Vec::with_capacity(n - 1);
        for &x in seq {
            let leaf = leaves.pop_first().expect("a leaf remains while decoding");
            edges.push((leaf, x));
            degree[x] -= 1;
            if degree[x] == 1 {
                leaves.insert(x);
            }
        }
        let rest: Vec<Vertex> = leaves.into_iter().collect();
        edges.push((rest[0], rest[1]));
        Tree::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Edges as `(min, max)` pairs, sorted ascending.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.degree(v) == 1
    }

    pub fn is_support(&self, v: Vertex) -> bool {
        self.adj[v].iter().any(|&u| self.is_leaf(u))
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    /// Degree-one vertices. `K1` has none.
    pub fn leaves(&self) -> VertexSet {
        VertexSet::from_iter(self.n(), self.vertices().filter(|&v| self.is_leaf(v)))
    }

    /// Vertices adjacent to at least one leaf.
    pub fn supports(&self) -> VertexSet {
        VertexSet::from_iter(self.n(), self.vertices().filter(|&v| self.is_support(v)))
    }

    /// Number of leaves attached at `v`.
    pub fn leaf_count_at(&self, v: Vertex) -> usize {
        self.adj[v].iter().filter(|&&u| self.is_leaf(u)).count()
    }

    /// Leaves attached at `v`, ascending.
    pub fn leaves_at(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v]
            .iter()
            .copied()
            .filter(move |&u| self.is_leaf(u))
    }

    pub(crate) fn bfs_distances(&self, source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &u in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn distances(&self, source: Vertex) -> Vec<usize> {
        self.bfs_distances(source)
            .into_iter()
            .map(|d| d.unwrap_or(0))
            .collect()
    }

    /// Eccentricity of every vertex, from the two endpoints of a diameter.
    pub fn eccentricities(&self) -> Vec<usize> {
        let from_zero = self.distances(0);
        let a = argmax(&from_zero);
        let from_a = self.distances(a);
        let b = argmax(&from_a);
        let from_b = self.distances(b);
        from_a
            .iter()
            .zip(&from_b)
            .map(|(&x, &y)| x.max(y))
            .collect()
    }

    /// Smallest-index vertex of maximum eccentricity (an endpoint of a
    /// longest path).
    pub fn max_eccentricity_vertex(&self) -> Vertex {
        let ecc = self.eccentricities();
        let max = ecc.iter().copied().max().unwrap_or(0);
        ecc.iter().position(|&e| e == max).unwrap_or(0)
    }

    /// Center vertices: one, or two adjacent ones.
    pub fn centers(&self) -> Vec<Vertex> {
        let ecc = self.eccentricities();
        let radius = ecc.iter().copied().min().unwrap_or(0);
        self.vertices().filter(|&v| ecc[v] == radius).collect()
    }

    pub fn root_at(&self, root: Vertex) -> RootedTree {
        RootedTree::new(self.clone(), root)
    }

    /// The tree obtained by renaming vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Tree {
        assert_eq!(perm.len(), self.n(), "permutation length must equal n");
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u], perm[v]))
            .collect();
        Tree::from_edges(self.n(), &edges).expect("relabeling preserves tree shape")
    }

    /// The subtree induced by `keep`, relabeled densely in ascending order of
    /// the original labels. Returns the tree and the new-to-old label map.
    pub fn induced(&self, keep: &VertexSet) -> Result<(Tree, Vec<Vertex>), NotATree> {
        let old: Vec<Vertex> = keep.iter().collect();
        let mut new_of = vec![usize::MAX; self.n()];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep.contains(u) && keep.contains(v))
            .map(|&(u, v)| (new_of[u], new_of[v]))
            .collect();
        Ok((Tree::from_edges(old.len(), &edges)?, old))
    }

    /// A copy with `count` new vertices `n..n+count` joined by `new_edges`.
    pub(crate) fn extended(&self, count: usize, new_edges: &[(Vertex, Vertex)]) -> Tree {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(new_edges);
        Tree::from_edges(self.n() + count, &edges).expect("attachment keeps a tree")
    }

    /// Canonical isomorphism code: equal for two trees iff they are
    /// isomorphic.
    pub fn canonical_code(&self) -> Vec<u8> {
        self.centers()
            .into_iter()
            .map(|c| self.root_at(c).ahu_code())
            .min()
            .unwrap_or_default()
    }

    /// Serializes in the edge-list text format with an `n` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Tree", 2)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

fn argmax(values: &[usize]) -> usize {
    let max = values.iter().copied().max().unwrap_or(0);
    values.iter().position(|&x| x == max).unwrap_or(0)
}

/// Parses the edge-list format: one `u v` pair per line, `#` comments, and
/// an optional leading `n <count>` header. Without a header, `n` is one more
/// than the largest vertex mentioned.
pub fn parse_edge_list(text: &str) -> Result<Tree, GraphError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| GraphError::Parse {
            line: line_no,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first() == Some(&"n") {
            if seen_content {
                return Err(err("header must precede all edges".into()));
            }
            if tokens.len() != 2 {
                return Err(err(format!("expected `n <count>`, got `{line}`")));
            }
            let n = tokens[1]
                .parse::<usize>()
                .map_err(|_| err(format!("invalid vertex count `{}`", tokens[1])))?;
            declared = Some(n);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if tokens.len() != 2 {
            return Err(err(format!("expected `u v`, got `{line}`")));
        }
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| err(format!("invalid vertex `{t}`")))
        };
        let (u, v) = (parse(tokens[0])?, parse(tokens[1])?);
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(err(format!("vertex {} exceeds declared n = {n}", u.max(v))));
            }
        }
        edges.push((u, v));
    }
    let n = match declared {
        Some(n) => n,
        None => match edges.iter().map(|&(u, v)| u.max(v)).max() {
            Some(m) => m + 1,
            None => {
                return Err(GraphError::Parse {
                    line: 0,
                    message: "no edges and no header".into(),
                })
            }
        },
    };
    Ok(Tree::from_edges(n, &edges)?)
}

impl FromStr for Tree {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_edge_list(s)
    }
}

/// A subset of a tree's vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    member: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            member: vec![false; universe],
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        VertexSet {
            member: vec![true; universe],
            len: universe,
        }
    }

    /// Panics if an element is outside `0..universe`.
    pub fn from_iter(universe: usize, items: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = VertexSet::empty(universe);
        for v in items {
            set.insert(v);
        }
        set
    }

    pub fn from_mask(universe: usize, mask: u64) -> Self {
        VertexSet::from_iter(universe, (0..universe).filter(|&v| mask >> v & 1 == 1))
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        assert!(
            v < self.universe(),
            "vertex {v} outside universe {}",
            self.universe()
        );
        let fresh = !self.member[v];
        if fresh {
            self.member[v] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        let present = self.contains(v);
        if present {
            self.member[v] = false;
            self.len -= 1;
        }
        present
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Same members in a larger universe.
    pub fn grown(&self, universe: usize) -> VertexSet {
        assert!(universe >= self.universe());
        let mut member = self.member.clone();
        member.resize(universe, false);
        VertexSet {
            member,
            len: self.len,
        }
    }

    /// Image of the set under a vertex map `map[v]` into a universe of
    /// `universe` vertices.
    pub fn mapped(&self, map: &[Vertex], universe: usize) -> VertexSet {
        VertexSet::from_iter(universe, self.iter().map(|v| map[v]))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Ordering used when listing several vertex sets: lexicographic on the
/// ascending member lists.
pub fn canonical_set_order(a: &VertexSet, b: &VertexSet) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

/// A tree with a chosen root, parent pointers, sorted children and depths.
#[derive(Debug, Clone)]
pub struct RootedTree {
    base: Tree,
    root: Vertex,
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    depth: Vec<usize>,
    order: Vec<Vertex>,
}

impl RootedTree {
    pub fn new(base: Tree, root: Vertex) -> Self {
        assert!(root < base.n(), "root {root} out of range");
        let n = base.n();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in base.neighbors(v) {
                if !visited[u] {
                    visited[u] = true;
                    parent[u] = Some(v);
                    depth[u] = depth[v] + 1;
                    children[v].push(u);
                    queue.push_back(u);
                }
            }
        }
        RootedTree {
            base,
            root,
            parent,
            children,
            depth,
            order,
        }
    }

    pub fn base(&self) -> &Tree {
        &self.base
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    /// Vertices in BFS order from the root; every parent precedes its
    /// children.
    pub fn bfs_order(&self) -> &[Vertex] {
        &self.order
    }

    /// Vertex set of the maximal subtree `T_v`.
    pub fn subtree_vertices(&self, v: Vertex) -> VertexSet {
        let mut set = VertexSet::empty(self.base.n());
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            set.insert(x);
            stack.extend_from_slice(&self.children[x]);
        }
        set
    }

    /// Forgets the root, recovering the underlying tree from parent links.
    pub fn unroot(&self) -> Tree {
        let edges: Vec<_> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
            .collect();
        Tree::from_edges(self.base.n(), &edges).expect("parent links form a tree")
    }

    /// AHU code of the rooted tree: `(` + sorted child codes + `)`.
    pub fn ahu_code(&self) -> Vec<u8> {
        let n = self.base.n();
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &v in self.order.iter().rev() {
            let mut child_codes: Vec<Vec<u8>> = self.children[v]
                .iter()
                .map(|&c| std::mem::take(&mut codes[c]))
                .collect();
            child_codes.sort_unstable();
            let mut code = Vec::with_capacity(2 + child_codes.iter().map(Vec::len).sum::<usize>());
            code.push(b'(');
            for c in child_codes {
                code.extend_from_slice(&c);
            }
            code.push(b')');
            codes[v] = code;
        }
        std::mem::take(&mut codes[self.root])
    }
}
