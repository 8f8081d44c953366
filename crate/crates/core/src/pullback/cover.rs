//! Ball covers of sampled metric spaces, their incidence graphs, and the
//! spanning-tree schedule along which local charts are glued one leaf at a time.

use std::collections::VecDeque;
use std::path::Path;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// Flat torus with the given periods per axis.
    Torus {
        lengths: Vec<f64>,
    },
}

/// A finite sample of a metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    metric: Metric,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, metric: Metric) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(LabError::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Metric::Torus { lengths } = &metric {
            if lengths.len() != dim || lengths.iter().any(|&l| !(l > 0.0)) {
                return Err(LabError::InvalidArgument(format!(
                    "torus periods {lengths:?} do not match dimension {dim}"
                )));
            }
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(LabError::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(PointCloud {
            dim,
            coords,
            metric,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        let sq: f64 = match &self.metric {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Metric::Torus { lengths } => a
                .iter()
                .zip(b)
                .zip(lengths)
                .map(|((x, y), l)| {
                    let d = (x - y).rem_euclid(*l);
                    let d = d.min(l - d);
                    d * d
                })
                .sum(),
        };
        sq.sqrt()
    }

    /// Parses the point-cloud CSV format.
    ///
    /// The first line is a header `# metric=euclidean` or
    /// `# metric=torus lengths=1,1`; every further line holds one point's
    /// comma-separated coordinates.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| LabError::Parse("empty point cloud".into()))?;
        let rest = header
            .strip_prefix('#')
            .ok_or_else(|| LabError::Parse(format!("missing metric header: {header:?}")))?;
        let mut kind = None;
        let mut lengths = None;
        for token in rest.split_whitespace() {
            match token.split_once('=') {
                Some(("metric", v)) => kind = Some(v.to_string()),
                Some(("lengths", v)) => {
                    lengths = Some(
                        v.split(',')
                            .map(|s| s.trim().parse::<f64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|e| LabError::Parse(format!("bad lengths {v:?}: {e}")))?,
                    )
                }
                _ => return Err(LabError::Parse(format!("unknown header token {token:?}"))),
            }
        }
        let mut dim = 0;
        let mut coords = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| LabError::Parse(format!("point {lineno}: {e}")))?;
            if dim == 0 {
                dim = row.len();
            } else if row.len() != dim {
                return Err(LabError::Parse(format!(
                    "point {lineno} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend(row);
        }
        if dim == 0 {
            return Err(LabError::Parse("point cloud has no points".into()));
        }
        let metric = match kind.as_deref() {
            Some("euclidean") => Metric::Euclidean,
            Some("torus") => Metric::Torus {
                lengths: lengths.unwrap_or_else(|| vec![1.0; dim]),
            },
            other => return Err(LabError::Parse(format!("unknown metric {other:?}"))),
        };
        PointCloud::new(dim, coords, metric)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        PointCloud::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = match &self.metric {
            Metric::Euclidean => "# metric=euclidean\n".to_string(),
            Metric::Torus { lengths } => format!(
                "# metric=torus lengths={}\n",
                lengths
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        };
        for i in 0..self.len() {
            let row: Vec<String> = self.point(i).iter().map(|c| c.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallCover {
    pub points: PointCloud,
    pub radius: f64,
    /// Point indices of the ball centres, in insertion order.
    pub centers: Vec<usize>,
    /// For each point, the balls (positions in `centers`) containing it.
    pub assignment: Vec<Vec<usize>>,
}

impl BallCover {
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Re-checks the cover from scratch: distinct centres, every point
    /// assigned, and each assignment within `radius`.
    pub fn validate(&self) -> Result<()> {
        let mut sorted = self.centers.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.centers.len() {
            return Err(LabError::InvalidArgument("repeated ball centre".into()));
        }
        for (i, balls) in self.assignment.iter().enumerate() {
            if balls.is_empty() {
                return Err(LabError::InvalidArgument(format!("point {i} is uncovered")));
            }
            for &b in balls {
                let d = self.points.distance(i, self.centers[b]);
                if d > self.radius {
                    return Err(LabError::InvalidArgument(format!(
                        "point {i} is {d} from centre of ball {b}, radius {}",
                        self.radius
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Greedy farthest-point cover.
///
/// Starts at point 0 and keeps adding the uncovered point farthest from the
/// current centres (lowest index on ties) until every point is within `radius`.
pub fn ball_cover(points: &PointCloud, radius: f64) -> Result<BallCover> {
    if points.is_empty() {
        return Err(LabError::InvalidArgument("empty point cloud".into()));
    }
    if !(radius > 0.0) {
        return Err(LabError::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let count = points.len();
    let mut nearest = vec![f64::INFINITY; count];
    let mut centers = Vec::new();
    let mut next = Some(0);
    while let Some(c) = next {
        centers.push(c);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(points.distance(i, c));
        }
        next = None;
        let mut far = radius;
        for (i, &d) in nearest.iter().enumerate() {
            if d > far {
                far = d;
                next = Some(i);
            }
        }
    }
    let assignment = (0..count)
        .map(|i| {
            centers
                .iter()
                .enumerate()
                .filter(|(_, &c)| points.distance(i, c) <= radius)
                .map(|(b, _)| b)
                .collect()
        })
        .collect();
    let cover = BallCover {
        points: points.clone(),
        radius,
        centers,
        assignment,
    };
    cover.validate()?;
    Ok(cover)
}

/// Undirected graph on `k` vertices with sorted, deduplicated edges `(i, j)`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceGraph {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl IncidenceGraph {
    pub fn new(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= k || b >= k {
                return Err(LabError::InvalidArgument(format!(
                    "edge ({a}, {b}) outside {k} vertices"
                )));
            }
            if a != b {
                list.push((a.min(b), a.max(b)));
            }
        }
        list.sort_unstable();
        list.dedup();
        Ok(IncidenceGraph { k, edges: list })
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.k];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Balls `i` and `j` are adjacent when some sample point lies in both.
pub fn incidence_graph(cover: &BallCover) -> IncidenceGraph {
    let edges = cover.assignment.iter().flat_map(|balls| {
        balls
            .iter()
            .enumerate()
            .flat_map(move |(x, &a)| balls[x + 1..].iter().map(move |&b| (a, b)))
    });
    IncidenceGraph::new(cover.k(), edges).expect("assignment indexes valid balls")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningTreeReport {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
    /// Vertices in the order they are removed as leaves; the last one is the survivor.
    pub leaf_order: Vec<usize>,
}

impl SpanningTreeReport {
    /// `k − 1` edges, no cycle, one component.
    pub fn is_tree(&self) -> bool {
        if self.k == 0 || self.edges.len() != self.k - 1 {
            return false;
        }
        let mut uf = UnionFind::<usize>::new(self.k);
        for &(a, b) in &self.edges {
            if a >= self.k || b >= self.k || !uf.union(a, b) {
                return false;
            }
        }
        true
    }

    /// Replays `leaf_order`, checking each removed vertex is a leaf of what remains.
    pub fn leaf_order_is_valid(&self) -> bool {
        if self.leaf_order.len() != self.k {
            return false;
        }
        let mut degree = vec![0usize; self.k];
        for &(a, b) in &self.edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let adj = IncidenceGraph {
            k: self.k,
            edges: self.edges.clone(),
        }
        .neighbours();
        let mut removed = vec![false; self.k];
        for (step, &v) in self.leaf_order.iter().enumerate() {
            if v >= self.k || removed[v] {
                return false;
            }
            let last = step + 1 == self.k;
            if (last && degree[v] != 0) || (!last && degree[v] != 1) {
                return false;
            }
            removed[v] = true;
            for &u in &adj[v] {
                if !removed[u] {
                    degree[u] -= 1;
                }
            }
        }
        true
    }
}

/// Breadth-first spanning tree from vertex 0 (neighbours in index order) and
/// the lowest-index-leaf removal order.
pub fn spanning_tree(graph: &IncidenceGraph) -> Result<SpanningTreeReport> {
    let k = graph.k;
    if k == 0 {
        return Err(LabError::InvalidArgument("graph has no vertices".into()));
    }
    let adj = graph.neighbours();
    let mut seen = vec![false; k];
    let mut edges = Vec::with_capacity(k - 1);
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                edges.push((v.min(u), v.max(u)));
                queue.push_back(u);
            }
        }
    }
    let reached = seen.iter().filter(|&&s| s).count();
    if reached != k {
        return Err(LabError::Disconnected { reached, total: k });
    }
    edges.sort_unstable();
    let leaf_order = leaf_removal_order(k, &edges);
    Ok(SpanningTreeReport {
        k,
        edges,
        leaf_order,
    })
}

fn leaf_removal_order(k: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let adj = IncidenceGraph {
        k,
        edges: edges.to_vec(),
    }
    .neighbours();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        // the final survivor has degree 0
        let v = (0..k)
            .find(|&v| !removed[v] && degree[v] <= 1)
            .expect("a finite tree always has a leaf");
        removed[v] = true;
        order.push(v);
        for &u in &adj[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle4() -> PointCloud {
        PointCloud::new(
            1,
            vec![0.0, 0.25, 0.5, 0.75],
            Metric::Torus { lengths: vec![1.0] },
        )
        .unwrap()
    }

    #[test]
    fn four_point_circle() {
        let cover = ball_cover(&circle4(), 0.3).unwrap();
        assert_eq!(cover.centers, vec![0, 2]);
        let g = incidence_graph(&cover);
        assert_eq!(g.edges, vec![(0, 1)]);
        let tree = spanning_tree(&g).unwrap();
        assert_eq!(tree.edges, vec![(0, 1)]);
        assert_eq!(tree.leaf_order, vec![0, 1]);
        assert!(tree.is_tree() && tree.leaf_order_is_valid());
    }

    #[test]
    fn radius_extremes() {
        let one = ball_cover(&circle4(), 0.5).unwrap();
        assert_eq!(one.k(), 1);
        assert!(incidence_graph(&one).edges.is_empty());
        let all = ball_cover(&circle4(), 0.13).unwrap();
        assert_eq!(all.k(), 4);
        assert_eq!(all.centers, vec![0, 2, 1, 3]);
        assert!(ball_cover(&circle4(), 0.0).is_err());
    }

    #[test]
    fn path_leaf_order() {
        let g = IncidenceGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let tree = spanning_tree(&g).unwrap();
        assert_eq!(tree.leaf_order, vec![0, 1, 2]);
        assert!(tree.leaf_order_is_valid());
    }

    #[test]
    fn triangle_tree() {
        let g = IncidenceGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let tree = spanning_tree(&g).unwrap();
        assert_eq!(tree.edges, vec![(0, 1), (0, 2)]);
        assert!(tree.is_tree());
    }

    #[test]
    fn overlapping_balls_form_complete_graph() {
        let pts = PointCloud::new(1, vec![0.0, 0.1, 0.2, 0.3], Metric::Euclidean).unwrap();
        let cover = BallCover {
            assignment: (0..4).map(|_| vec![0, 1, 2, 3]).collect(),
            centers: vec![0, 1, 2, 3],
            radius: 0.31,
            points: pts,
        };
        cover.validate().unwrap();
        assert_eq!(incidence_graph(&cover).edges.len(), 6);
    }

    #[test]
    fn disconnected_graph_is_reported() {
        let g = IncidenceGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            spanning_tree(&g),
            Err(LabError::Disconnected {
                reached: 2,
                total: 4
            })
        ));
    }

    #[test]
    fn bad_replays_are_caught() {
        let tree = SpanningTreeReport {
            k: 3,
            edges: vec![(0, 1), (1, 2)],
            leaf_order: vec![1, 0, 2],
        };
        assert!(tree.is_tree());
        assert!(!tree.leaf_order_is_valid());
        let good = SpanningTreeReport {
            leaf_order: vec![0, 1, 2],
            ..tree
        };
        assert!(good.leaf_order_is_valid());
        let cyclic = SpanningTreeReport {
            k: 3,
            edges: vec![(0, 1), (1, 2), (0, 2)],
            leaf_order: vec![0, 1, 2],
        };
        assert!(!cyclic.is_tree());
    }

    #[test]
    fn csv_round_trip() {
        let text = "# metric=torus lengths=1,2\n0.1,0.2\n0.5,1.5\n";
        let cloud = PointCloud::from_csv(text).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.to_csv(), text);
        assert!((cloud.distance(0, 1) - (0.4f64.powi(2) + 0.7f64.powi(2)).sqrt()).abs() < 1e-12);
        let e = PointCloud::from_csv("# metric=euclidean\n0,0\n3,4\n").unwrap();
        assert_eq!(e.distance(0, 1), 5.0);
        assert!(PointCloud::from_csv("0,0\n").is_err());
    }
}
