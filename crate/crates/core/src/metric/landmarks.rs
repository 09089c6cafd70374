//! Farthest-point landmark selection.

use crate::conformal::ConformalField;
use crate::error::{Error, Result};
use crate::grid::GridManifold;

use super::paths::{DistanceRows, PathGraph, PathStencil};

#[derive(Debug, Clone)]
pub struct Landmarks {
    /// Landmark vertices in selection order.
    pub vertices: Vec<usize>,
    /// Distances from each landmark to every vertex.
    pub rows: DistanceRows,
    /// `max_v min_i d(v, landmark_i)` over the candidate set.
    pub covering_radius: f64,
}

/// Greedy farthest-point sampling in `d_u`, started from the smallest
/// candidate id; ties go to the smaller vertex id. `candidates` defaults to
/// every vertex.
pub fn farthest_point_landmarks(
    m: &GridManifold,
    u: &ConformalField,
    count: usize,
    candidates: Option<&[usize]>,
    stencil: PathStencil,
) -> Result<Landmarks> {
    let mut cand: Vec<usize> = match candidates {
        Some(c) => c.to_vec(),
        None => (0..m.len()).collect(),
    };
    cand.sort_unstable();
    cand.dedup();
    if cand.is_empty() {
        return Err(Error::EmptyRegion("no landmark candidates".into()));
    }
    if count == 0 || count > cand.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot pick {count} landmarks from {} candidates",
            cand.len()
        )));
    }
    if let Some(&v) = cand.last().filter(|&&v| v >= m.len()) {
        return Err(Error::InvalidArgument(format!("candidate {v} is not a vertex")));
    }
    let g = PathGraph::new(m, u, stencil)?;
    let mut nearest = vec![f64::INFINITY; cand.len()];
    let mut vertices = Vec::with_capacity(count);
    let mut rows = Vec::with_capacity(count);
    let mut next = cand[0];
    loop {
        let row = g.dijkstra(next, None);
        for (i, &v) in cand.iter().enumerate() {
            nearest[i] = nearest[i].min(row[v]);
        }
        vertices.push(next);
        rows.push(row);
        if vertices.len() == count {
            break;
        }
        let mut far = (f64::NEG_INFINITY, next);
        for (i, &v) in cand.iter().enumerate() {
            if nearest[i] > far.0 {
                far = (nearest[i], v);
            }
        }
        next = far.1;
    }
    let covering_radius = nearest.iter().copied().fold(0.0, f64::max);
    Ok(Landmarks {
        rows: DistanceRows {
            sources: vertices.clone(),
            rows,
        },
        vertices,
        covering_radius,
    })
}
