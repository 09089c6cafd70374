//! Gromov-Hausdorff distance between finite metric spaces.

use crate::error::{Error, Result};

use super::FiniteMetricSpace;

/// Largest space [`gh_bruteforce`] accepts.
pub const GH_BRUTEFORCE_LIMIT: usize = 6;

/// Upper bound `½ max |d1 - d2|` from the identity correspondence. Both spaces
/// must carry the same point labels in the same order.
pub fn gh_upper_shared(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<f64> {
    if a.ids() != b.ids() {
        return Err(Error::PointSetMismatch(format!(
            "{} labelled points vs {}",
            a.len(),
            b.len()
        )));
    }
    let gap = a
        .matrix()
        .iter()
        .zip(b.matrix())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(0.5 * gap)
}

/// Exact `d_GH = ½ min_R dis(R)` over correspondences, by branch and bound.
///
/// Every correspondence contains one that picks a partner for each `x` and
/// then a partner for each `y` still uncovered; distortion only grows with
/// the relation, so searching those assignments is enough.
pub fn gh_bruteforce(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<f64> {
    let size = a.len().max(b.len());
    if size > GH_BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: GH_BRUTEFORCE_LIMIT,
        });
    }
    let mut s = Search {
        a,
        b,
        pairs: Vec::with_capacity(a.len() + b.len()),
        covered: vec![0; b.len()],
        best: f64::INFINITY,
    };
    s.assign_x(0, 0.0);
    Ok(0.5 * s.best)
}

struct Search<'a> {
    a: &'a FiniteMetricSpace,
    b: &'a FiniteMetricSpace,
    pairs: Vec<(usize, usize)>,
    covered: Vec<u32>,
    best: f64,
}

impl Search<'_> {
    fn added(&self, x: usize, y: usize) -> f64 {
        self.pairs
            .iter()
            .map(|&(p, q)| (self.a.dist(x, p) - self.b.dist(y, q)).abs())
            .fold(0.0, f64::max)
    }

    fn assign_x(&mut self, x: usize, cur: f64) {
        if x == self.a.len() {
            self.assign_y(0, cur);
            return;
        }
        for y in 0..self.b.len() {
            let next = cur.max(self.added(x, y));
            if next >= self.best {
                continue;
            }
            self.pairs.push((x, y));
            self.covered[y] += 1;
            self.assign_x(x + 1, next);
            self.covered[y] -= 1;
            self.pairs.pop();
        }
    }

    fn assign_y(&mut self, y: usize, cur: f64) {
        if y == self.b.len() {
            self.best = cur;
            return;
        }
        if self.covered[y] > 0 {
            self.assign_y(y + 1, cur);
            return;
        }
        for x in 0..self.a.len() {
            let next = cur.max(self.added(x, y));
            if next >= self.best {
                continue;
            }
            self.pairs.push((x, y));
            self.assign_y(y + 1, next);
            self.pairs.pop();
        }
    }
}
