//! Graphs, metrics, regions and boundary counting.
//!
//! Every bound in this crate refers to distances on an unweighted graph:
//! the metric is shortest-path edge count, never a Euclidean embedding.

use crate::error::{Error, Result};

/// Undirected graph of spin sites.
///
/// Edges are stored as a list so that periodic builders may produce
/// parallel edges (a 2-site ring or a 2xN torus has doubled bonds; the
/// Hamiltonian then carries one term per bond). [`SpinGraph::new`]
/// itself rejects duplicates; only the builders use the multigraph path.
#[derive(Debug, Clone)]
pub struct SpinGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Deduplicated neighbor lists (metric ignores edge multiplicity).
    adjacency: Vec<Vec<usize>>,
    coordinates: Option<Vec<(i64, i64)>>,
    max_degree: usize,
}

impl SpinGraph {
    /// Build a simple graph. Rejects self-loops, duplicate edges and
    /// disconnected vertex sets.
    pub fn new(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        coordinates: Option<Vec<(i64, i64)>>,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
        }
        Self::with_edge_list(n_vertices, edges, coordinates)
    }

    /// Multigraph-tolerant constructor used by the periodic builders.
    fn with_edge_list(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        coordinates: Option<Vec<(i64, i64)>>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::domain("graph must have at least one vertex"));
        }
        if let Some(coords) = &coordinates {
            if coords.len() != n_vertices {
                return Err(Error::Dimension {
                    context: "graph coordinates",
                    expected: n_vertices,
                    found: coords.len(),
                });
            }
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        let mut degree = vec![0usize; n_vertices];
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::domain(format!("self-loop at vertex {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) out of range for {n_vertices} vertices"
                )));
            }
            degree[u] += 1;
            degree[v] += 1;
            if !adjacency[u].contains(&v) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let graph = SpinGraph {
            n_vertices,
            edges,
            adjacency,
            coordinates,
            max_degree: degree.iter().copied().max().unwrap_or(0),
        };
        if !graph.is_connected() {
            return Err(Error::domain("graph is not connected"));
        }
        Ok(graph)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Edge list, multiplicity included (one Hamiltonian term per entry).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coordinates(&self) -> Option<&[(i64, i64)]> {
        self.coordinates.as_deref()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        u < self.n_vertices && self.adjacency[u].contains(&v)
    }

    fn is_connected(&self) -> bool {
        self.distances_from(&[0]).iter().all(|&d| d != usize::MAX)
    }

    /// BFS distances (edge counts) from a set of source vertices.
    /// Unreachable vertices get `usize::MAX`.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n_vertices];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs shortest-path distances; row `v` is `distances_from(&[v])`.
    pub fn all_pairs_distances(&self) -> Vec<Vec<usize>> {
        (0..self.n_vertices).map(|v| self.distances_from(&[v])).collect()
    }

    /// Largest pairwise distance in the graph.
    pub fn diameter(&self) -> usize {
        (0..self.n_vertices)
            .flat_map(|v| self.distances_from(&[v]))
            .max()
            .unwrap_or(0)
    }
}

/// Nonempty vertex subset of a host graph, with its diameter cached.
///
/// The diameter is measured with the metric of the *full* host graph,
/// not the induced subgraph: a region's extent is what an observable
/// supported on it can reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    vertices: Vec<usize>,
    diameter: usize,
}

impl Region {
    pub fn new(graph: &SpinGraph, vertices: impl Into<Vec<usize>>) -> Result<Self> {
        let mut vertices: Vec<usize> = vertices.into();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::domain("region must be nonempty"));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= graph.n_vertices()) {
            return Err(Error::domain(format!(
                "region vertex {v} outside graph of {} vertices",
                graph.n_vertices()
            )));
        }
        let mut diameter = 0;
        for &u in &vertices {
            let dist = graph.distances_from(&[u]);
            for &v in &vertices {
                diameter = diameter.max(dist[v]);
            }
        }
        Ok(Region { vertices, diameter })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        self.vertices.iter().any(|&v| other.contains(v))
    }
}

/// Shortest-path edge count between two disjoint regions,
/// minimized over vertex pairs. Symmetric in its arguments.
pub fn graph_distance(graph: &SpinGraph, a: &Region, b: &Region) -> Result<usize> {
    if a.overlaps(b) {
        return Err(Error::domain(
            "graph_distance requires disjoint regions (overlap is a caller bug)",
        ));
    }
    let dist = graph.distances_from(a.vertices());
    Ok(b.vertices().iter().map(|&v| dist[v]).min().expect("region nonempty"))
}

/// Number of edges with exactly one endpoint in `a` (multiplicity counts:
/// each entry is one Hamiltonian term crossing the cut).
pub fn boundary_term_count(graph: &SpinGraph, a: &Region) -> usize {
    graph
        .edges()
        .iter()
        .filter(|&&(u, v)| a.contains(u) != a.contains(v))
        .count()
}

/// Path (open) or cycle (periodic) graph on `n >= 2` vertices.
pub fn build_chain(n: usize, periodic: bool) -> Result<SpinGraph> {
    if n < 2 {
        return Err(Error::domain(format!("chain needs n >= 2, got {n}")));
    }
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic {
        edges.push((n - 1, 0));
    }
    let coords = (0..n as i64).map(|i| (i, 0)).collect();
    SpinGraph::with_edge_list(n, edges, Some(coords))
}

/// nx x ny torus: nx*ny vertices, 2*nx*ny edges, degree 4 everywhere.
/// For nx == 2 or ny == 2 the wrap-around bonds are parallel edges.
pub fn build_torus_2d(nx: usize, ny: usize) -> Result<SpinGraph> {
    if nx < 2 || ny < 2 {
        return Err(Error::domain(format!("torus needs nx, ny >= 2, got {nx}x{ny}")));
    }
    let idx = |r: usize, c: usize| r * nx + c;
    let mut edges = Vec::with_capacity(2 * nx * ny);
    let mut coords = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        for c in 0..nx {
            edges.push((idx(r, c), idx(r, (c + 1) % nx)));
            edges.push((idx(r, c), idx((r + 1) % ny, c)));
            coords.push((c as i64, r as i64));
        }
    }
    SpinGraph::with_edge_list(nx * ny, edges, Some(coords))
}

/// Toric-code geometry: one qubit per edge of the nx x ny torus.
#[derive(Debug, Clone)]
pub struct ToricLayout {
    /// Graph over the 2*nx*ny edge qubits; qubits are adjacent iff their
    /// torus edges meet at a lattice vertex and are not the doubled wrap
    /// partner of each other. Stars and plaquettes then have diameter at
    /// most 2, while the weight-2 logical loops of the 2x2 code keep
    /// diameter 2 and stay invisible to diameter-1 observables.
    pub qubit_graph: SpinGraph,
    /// Star (vertex) supports, 4 qubits each.
    pub stars: Vec<[usize; 4]>,
    /// Plaquette (face) supports, 4 qubits each.
    pub plaquettes: Vec<[usize; 4]>,
    pub nx: usize,
    pub ny: usize,
}

impl ToricLayout {
    pub fn n_qubits(&self) -> usize {
        2 * self.nx * self.ny
    }

    /// Direct-lattice loop winding horizontally: the horizontal edges of
    /// vertex row `r`. A Z product on it is the Z-type logical operator.
    pub fn logical_z_loop(&self, r: usize) -> Vec<usize> {
        (0..self.nx).map(|c| self.h_qubit(r, c)).collect()
    }

    /// Dual-lattice loop winding horizontally: the vertical edges of
    /// vertex row `r`. An X product on it commutes with every plaquette
    /// (each face meets it an even number of times) and is the X-type
    /// logical operator; applied to |0...0> it seeds the second ground
    /// state sector.
    pub fn logical_x_loop(&self, r: usize) -> Vec<usize> {
        (0..self.nx).map(|c| self.v_qubit(r, c)).collect()
    }

    pub fn h_qubit(&self, r: usize, c: usize) -> usize {
        r * self.nx + c
    }

    pub fn v_qubit(&self, r: usize, c: usize) -> usize {
        self.nx * self.ny + r * self.nx + c
    }
}

/// Qubits-on-edges layout of the toric code on an nx x ny torus:
/// 2*nx*ny qubits, nx*ny stars, nx*ny plaquettes, every qubit in
/// exactly two stars and two plaquettes.
pub fn build_toric_code_layout(nx: usize, ny: usize) -> Result<ToricLayout> {
    if nx < 2 || ny < 2 {
        return Err(Error::domain(format!("toric layout needs nx, ny >= 2, got {nx}x{ny}")));
    }
    let n_qubits = 2 * nx * ny;
    let h = |r: usize, c: usize| r * nx + c;
    let v = |r: usize, c: usize| nx * ny + r * nx + c;

    let mut stars = Vec::with_capacity(nx * ny);
    let mut plaquettes = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        for c in 0..nx {
            // Edges incident to vertex (r, c).
            stars.push([
                h(r, c),
                h(r, (c + nx - 1) % nx),
                v(r, c),
                v((r + ny - 1) % ny, c),
            ]);
            // Edges bounding the face whose top-left corner is (r, c).
            plaquettes.push([h(r, c), h((r + 1) % ny, c), v(r, c), v(r, (c + 1) % nx)]);
        }
    }

    // Endpoint pairs of each edge qubit, for the adjacency rule.
    let mut endpoints = Vec::with_capacity(n_qubits);
    for r in 0..ny {
        for c in 0..nx {
            endpoints.push(((r, c), (r, (c + 1) % nx)));
        }
    }
    for r in 0..ny {
        for c in 0..nx {
            endpoints.push(((r, c), ((r + 1) % ny, c)));
        }
    }
    let normalize = |e: ((usize, usize), (usize, usize))| {
        if e.0 <= e.1 { e } else { (e.1, e.0) }
    };
    let mut pair_set = std::collections::BTreeSet::new();
    for a in 0..n_qubits {
        for b in a + 1..n_qubits {
            let (ea, eb) = (endpoints[a], endpoints[b]);
            let shares = ea.0 == eb.0 || ea.0 == eb.1 || ea.1 == eb.0 || ea.1 == eb.1;
            let parallel = normalize(ea) == normalize(eb);
            if shares && !parallel {
                pair_set.insert((a, b));
            }
        }
    }
    let qubit_graph = SpinGraph::with_edge_list(n_qubits, pair_set.into_iter().collect(), None)?;
    Ok(ToricLayout { qubit_graph, stars, plaquettes, nx, ny })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(g: &SpinGraph, vs: &[usize]) -> Region {
        Region::new(g, vs.to_vec()).unwrap()
    }

    #[test]
    fn chain_basics() {
        let g = build_chain(2, false).unwrap();
        assert_eq!(g.edges().len(), 1);
        let g = build_chain(3, true).unwrap();
        assert_eq!(g.edges().len(), 3);
        let g = build_chain(10, true).unwrap();
        assert!((0..10).all(|v| g.neighbors(v).len() == 2));
        assert!(build_chain(1, false).is_err());
    }

    #[test]
    fn chain_distance_examples() {
        let g = build_chain(5, false).unwrap();
        let d = graph_distance(&g, &region(&g, &[0]), &region(&g, &[4])).unwrap();
        assert_eq!(d, 4);
        let d = graph_distance(&g, &region(&g, &[0, 1]), &region(&g, &[4])).unwrap();
        assert_eq!(d, 3);
    }

    #[test]
    fn chain_endpoint_distances() {
        for n in 2..=20 {
            let g = build_chain(n, false).unwrap();
            let d = graph_distance(&g, &region(&g, &[0]), &region(&g, &[n - 1])).unwrap();
            assert_eq!(d, n - 1);
        }
    }

    #[test]
    fn overlap_is_domain_error() {
        let g = build_chain(5, false).unwrap();
        let r = graph_distance(&g, &region(&g, &[0, 1]), &region(&g, &[1, 2]));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    /// Floyd-Warshall oracle, independent of the BFS implementation.
    fn floyd_warshall(g: &SpinGraph) -> Vec<Vec<usize>> {
        let n = g.n_vertices();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for &(u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        d
    }

    #[test]
    fn torus_distance_matches_floyd_warshall_oracle() {
        let g = build_torus_2d(4, 4).unwrap();
        let oracle = floyd_warshall(&g);
        // (0,0) -> (2,2): indices 0 and 2*4+2 = 10.
        assert_eq!(oracle[0][10], 4);
        let d = graph_distance(&g, &region(&g, &[0]), &region(&g, &[10])).unwrap();
        assert_eq!(d, 4);
        for a in 0..g.n_vertices() {
            for b in 0..g.n_vertices() {
                if a == b {
                    continue;
                }
                let d = graph_distance(&g, &region(&g, &[a]), &region(&g, &[b])).unwrap();
                assert_eq!(d, oracle[a][b], "distance mismatch {a} -> {b}");
            }
        }
    }

    #[test]
    fn torus_counts() {
        let g = build_torus_2d(2, 2).unwrap();
        assert_eq!(g.n_vertices(), 4);
        assert_eq!(g.edges().len(), 8);
        let g = build_torus_2d(3, 3).unwrap();
        assert_eq!(g.edges().len(), 18);
        let g = build_torus_2d(4, 4).unwrap();
        assert_eq!(
            graph_distance(&g, &region(&g, &[0]), &region(&g, &[4 + 1])).unwrap(),
            2
        );
        assert!(build_torus_2d(1, 4).is_err());
    }

    #[test]
    fn boundary_counts() {
        let g = build_chain(10, true).unwrap();
        assert_eq!(boundary_term_count(&g, &region(&g, &[2, 3, 4, 5])), 2);
        let g = build_chain(10, false).unwrap();
        assert_eq!(boundary_term_count(&g, &region(&g, &[0, 1, 2])), 1);
    }

    #[test]
    fn torus_block_boundary_matches_edge_count_oracle() {
        let g = build_torus_2d(4, 4).unwrap();
        // 2x2 block: vertices (0,0), (1,0), (0,1), (1,1) -> indices 0, 1, 4, 5.
        let block = region(&g, &[0, 1, 4, 5]);
        // Oracle: count cut edges directly from the edge list.
        let cut = g
            .edges()
            .iter()
            .filter(|&&(u, v)| block.contains(u) != block.contains(v))
            .count();
        assert_eq!(cut, 8);
        assert_eq!(boundary_term_count(&g, &block), 8);
    }

    #[test]
    fn boundary_equals_complement_boundary() {
        let g = build_torus_2d(4, 3).unwrap();
        let a = region(&g, &[0, 1, 2, 5, 6]);
        let comp: Vec<usize> = (0..g.n_vertices()).filter(|v| !a.contains(*v)).collect();
        let b = region(&g, &comp);
        assert_eq!(boundary_term_count(&g, &a), boundary_term_count(&g, &b));
    }

    #[test]
    fn triangle_inequality_on_singletons() {
        let g = build_torus_2d(3, 4).unwrap();
        let n = g.n_vertices();
        let d = g.all_pairs_distances();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert!(d[a][b] <= d[a][c] + d[c][b]);
                }
            }
        }
    }

    #[test]
    fn region_diameter_uses_host_metric() {
        let g = build_chain(6, false).unwrap();
        // Disconnected-in-subgraph region {0, 3}: host metric says 3.
        let r = region(&g, &[0, 3]);
        assert_eq!(r.diameter(), 3);
    }

    #[test]
    fn toric_layout_counts() {
        let layout = build_toric_code_layout(2, 2).unwrap();
        assert_eq!(layout.n_qubits(), 8);
        assert_eq!(layout.stars.len(), 4);
        assert_eq!(layout.plaquettes.len(), 4);
        // Every qubit sits in exactly 2 stars.
        for q in 0..8 {
            let count = layout.stars.iter().filter(|s| s.contains(&q)).count();
            assert_eq!(count, 2, "qubit {q}");
        }
        let layout = build_toric_code_layout(2, 3).unwrap();
        assert_eq!(layout.n_qubits(), 12);
        assert!(build_toric_code_layout(2, 1).is_err());
    }

    #[test]
    fn toric_layout_stars_have_distinct_qubits() {
        let layout = build_toric_code_layout(2, 2).unwrap();
        for s in layout.stars.iter().chain(layout.plaquettes.iter()) {
            let mut q = s.to_vec();
            q.sort_unstable();
            q.dedup();
            assert_eq!(q.len(), 4);
        }
    }

    #[test]
    fn duplicate_edge_rejected_by_public_constructor() {
        let r = SpinGraph::new(3, vec![(0, 1), (1, 0), (1, 2)], None);
        assert!(r.is_err());
    }
}
