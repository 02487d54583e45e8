//! Threshold graphs of point clouds.

use alloc::vec;
use alloc::vec::Vec;

use super::{Graph, GraphError};
use crate::math;
use crate::pointproc::{DomainKind, PointCloud};

/// Adjacency rule of a threshold graph. Both conditions are closed: points at
/// distance exactly `t` (or angle exactly `θ`) are adjacent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// `‖x − y‖ ≤ t`, minimum-image on a periodic box.
    Distance(f64),
    /// `⟨x, y⟩ ≥ cos θ`; unit sphere only.
    Angle(f64),
}

impl Threshold {
    #[inline]
    pub fn is_edge(&self, cloud: &PointCloud, i: usize, j: usize) -> bool {
        let (a, b) = (cloud.point(i), cloud.point(j));
        match *self {
            Threshold::Distance(t) => cloud.domain().dist2(a, b) <= t * t,
            Threshold::Angle(theta) => dot(a, b) >= math::cos(theta),
        }
    }

    fn check(&self, cloud: &PointCloud) -> Result<(), GraphError> {
        match *self {
            Threshold::Distance(t) if !(t >= 0.0) => {
                Err(GraphError::InvalidParameters("distance threshold must be nonnegative"))
            }
            Threshold::Angle(_) if cloud.domain().kind != DomainKind::UnitSphere => {
                Err(GraphError::InvalidParameters("angular threshold needs the unit sphere"))
            }
            _ => Ok(()),
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All-pairs construction. Quadratic; used directly on small spherical clouds
/// and as the reference the cell grid must match.
pub fn build_geometric_graph_brute_force(cloud: &PointCloud, threshold: Threshold) -> Result<Graph, GraphError> {
    threshold.check(cloud)?;
    let n = cloud.len();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if threshold.is_edge(cloud, i, j) {
                adjacency[i].push(j as u32);
                adjacency[j].push(i as u32);
            }
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}

/// Spherical clouds below this size are handled all-pairs.
pub const SPHERE_BRUTE_FORCE_LIMIT: usize = 100_000;

/// Exact threshold graph. Euclidean clouds use a uniform cell grid over the
/// first `min(d, 3)` coordinates with cells no smaller than the threshold;
/// large spherical clouds use the same grid in the ambient cube with cells
/// no smaller than the chord `√(2 − 2cos θ)`. Every candidate pair is then
/// tested with the exact predicate, so the edge set equals the all-pairs one.
pub fn build_geometric_graph(cloud: &PointCloud, threshold: Threshold) -> Result<Graph, GraphError> {
    build_with_sphere_limit(cloud, threshold, SPHERE_BRUTE_FORCE_LIMIT)
}

fn build_with_sphere_limit(cloud: &PointCloud, threshold: Threshold, sphere_limit: usize) -> Result<Graph, GraphError> {
    threshold.check(cloud)?;
    let domain = cloud.domain();
    let (reach, lo, extent, wrap) = match (domain.kind, threshold) {
        (DomainKind::UnitSphere, Threshold::Angle(_)) if cloud.len() < sphere_limit => {
            return build_geometric_graph_brute_force(cloud, threshold);
        }
        (DomainKind::UnitSphere, Threshold::Angle(theta)) => {
            // Unit vectors at angle ≤ θ are within this chord of each other.
            let chord = math::sqrt((2.0 - 2.0 * math::cos(theta)).max(0.0));
            (chord + 1e-9, -1.0, 2.0, false)
        }
        (DomainKind::UnitSphere, Threshold::Distance(t)) => (t, -1.0, 2.0, false),
        (DomainKind::Ball { radius }, Threshold::Distance(t)) => (t, -radius, 2.0 * radius, false),
        (DomainKind::PeriodicBox { side }, Threshold::Distance(t)) => (t, 0.0, side, true),
        (_, Threshold::Angle(_)) => unreachable!("rejected by Threshold::check"),
    };
    let axes = domain.dim.min(3);
    // Cells slightly wider than the reach, so rounding in the cell index
    // cannot separate two adjacent points by more than one cell.
    let per_axis = if reach > 0.0 {
        math::floor(extent / (reach * (1.0 + 1e-9))).clamp(1.0, (1u64 << 20) as f64) as u64
    } else {
        1u64 << 20
    };
    let width = extent / per_axis as f64;
    let cell_of = |p: &[f64]| -> [u64; 3] {
        let mut c = [0u64; 3];
        for a in 0..axes {
            let k = math::floor((p[a] - lo) / width);
            c[a] = k.clamp(0.0, (per_axis - 1) as f64) as u64;
        }
        c
    };
    let key = |c: [u64; 3]| c[0] + per_axis * (c[1] + per_axis * c[2]);

    let n = cloud.len();
    let mut order: Vec<(u64, u32)> = (0..n).map(|i| (key(cell_of(cloud.point(i))), i as u32)).collect();
    order.sort_unstable();
    let mut cells: Vec<(u64, usize, usize)> = Vec::new();
    for (pos, &(k, _)) in order.iter().enumerate() {
        match cells.last_mut() {
            Some(last) if last.0 == k => last.2 = pos + 1,
            _ => cells.push((k, pos, pos + 1)),
        }
    }

    let mut adjacency = vec![Vec::new(); n];
    let mut neighbor_keys = Vec::with_capacity(27);
    for &(_, start, end) in &cells {
        let home = cell_of(cloud.point(order[start].1 as usize));
        neighbor_keys.clear();
        for offset in 0..3usize.pow(axes as u32) {
            let mut c = [0u64; 3];
            let mut valid = true;
            let mut rest = offset;
            for a in 0..axes {
                let delta = (rest % 3) as i64 - 1;
                rest /= 3;
                let mut v = home[a] as i64 + delta;
                if wrap {
                    v = v.rem_euclid(per_axis as i64);
                } else if v < 0 || v >= per_axis as i64 {
                    valid = false;
                }
                c[a] = v as u64;
            }
            if valid {
                neighbor_keys.push(key(c));
            }
        }
        neighbor_keys.sort_unstable();
        neighbor_keys.dedup();
        for &nk in &neighbor_keys {
            let Ok(slot) = cells.binary_search_by_key(&nk, |c| c.0) else {
                continue;
            };
            let (_, other_start, other_end) = cells[slot];
            for &(_, a) in &order[start..end] {
                for &(_, b) in &order[other_start..other_end] {
                    if a < b && threshold.is_edge(cloud, a as usize, b as usize) {
                        adjacency[a as usize].push(b);
                        adjacency[b as usize].push(a);
                    }
                }
            }
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}
