//! DBSCAN over 2D points.
//!
//! Neighbourhoods are inclusive (`d <= eps`) and count the point itself.
//! Points are scanned in ascending index order; a border point joins the
//! first cluster whose expansion reaches it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Noise,
    Cluster(usize),
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(c) => Some(c),
            Label::Noise => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabeling {
    pub labels: Vec<Label>,
    pub cluster_count: usize,
}

impl ClusterLabeling {
    /// Member indices of every cluster, in cluster order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, l) in self.labels.iter().enumerate() {
            if let Label::Cluster(c) = l {
                out[*c].push(i);
            }
        }
        out
    }
}

/// Uniform grid with cell size `eps`; neighbours live in the 3x3 block.
struct Grid {
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(points: &[Point2], eps: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, eps)).or_default().push(i);
        }
        Grid { eps, cells }
    }

    fn key(p: &Point2, eps: f64) -> (i64, i64) {
        ((p[0] / eps).floor() as i64, (p[1] / eps).floor() as i64)
    }

    fn neighbours(&self, points: &[Point2], i: usize) -> Vec<usize> {
        let p = points[i];
        let (cx, cy) = Self::key(&p, self.eps);
        let eps2 = self.eps * self.eps;
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(idx) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &j in idx {
                        let (ex, ey) = (points[j][0] - p[0], points[j][1] - p[1]);
                        if ex * ex + ey * ey <= eps2 {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn dbscan(points: &[Point2], eps: f64, min_pts: usize) -> ClusterLabeling {
    let n = points.len();
    let mut labels = vec![Label::Noise; n];
    if n == 0 || !(eps > 0.0) {
        return ClusterLabeling {
            labels,
            cluster_count: 0,
        };
    }
    let min_pts = min_pts.max(1);
    let grid = Grid::new(points, eps);
    let mut visited = vec![false; n];
    let mut cluster = 0;
    for i in 0..n {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let seeds = grid.neighbours(points, i);
        if seeds.len() < min_pts {
            continue;
        }
        labels[i] = Label::Cluster(cluster);
        let mut queue = seeds;
        let mut head = 0;
        while head < queue.len() {
            let j = queue[head];
            head += 1;
            if labels[j] == Label::Noise {
                labels[j] = Label::Cluster(cluster);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let nb = grid.neighbours(points, j);
            if nb.len() >= min_pts {
                queue.extend(nb);
            }
        }
        cluster += 1;
    }
    ClusterLabeling {
        labels,
        cluster_count: cluster,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_example() {
        let l = dbscan(&[[0.0, 0.0], [0.5, 0.0], [10.0, 10.0]], 1.0, 2);
        assert_eq!(l.labels, vec![Label::Cluster(0), Label::Cluster(0), Label::Noise]);
        assert_eq!(l.cluster_count, 1);
    }

    #[test]
    fn sparse_points_are_noise() {
        let pts: Vec<Point2> = (0..6).map(|i| [i as f64 * 3.0, 0.0]).collect();
        let l = dbscan(&pts, 1.0, 2);
        assert!(l.labels.iter().all(|x| *x == Label::Noise));
    }

    #[test]
    fn eps_boundary_is_inclusive() {
        let l = dbscan(&[[0.0, 0.0], [1.0, 0.0]], 1.0, 2);
        assert_eq!(l.cluster_count, 1);
    }

    #[test]
    fn border_point_goes_to_first_cluster() {
        // Two dense groups sharing one border point at x = 2.
        let pts = [
            [0.0, 0.0], [0.3, 0.0], [0.6, 0.0], [1.0, 0.0],
            [2.0, 0.0],
            [3.0, 0.0], [3.4, 0.0], [3.7, 0.0], [4.0, 0.0],
        ];
        let l = dbscan(&pts, 1.0, 4);
        assert_eq!(l.cluster_count, 2);
        assert_eq!(l.labels[4], Label::Cluster(0));
        assert_eq!(l.labels[5], Label::Cluster(1));
    }
}
