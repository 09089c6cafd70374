//! Finite metric spaces: validation and a plain-text format.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative slack for the axioms, scaled by `max(1, diameter)`.
pub const AXIOM_TOL: f64 = 1e-9;
/// Triangle inequality is checked on every triple up to this many points,
/// and on seeded random triples beyond.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 21;
const SAMPLED_TRIPLES: usize = 10_000;

pub const METRIC_MAGIC: &str = "conflab-metric v1";

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<usize>,
    d: Vec<f64>,
    measure: Option<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validate and build. `matrix` is row-major `k x k`; asymmetry within
    /// tolerance is resolved by taking the smaller entry.
    pub fn new(ids: Vec<usize>, matrix: Vec<f64>, measure: Option<Vec<f64>>) -> Result<Self> {
        let k = ids.len();
        if k == 0 {
            return Err(Error::NotMetric("no points".into()));
        }
        if matrix.len() != k * k {
            return Err(Error::NotMetric(format!("{k} points need {} entries, got {}", k * k, matrix.len())));
        }
        if let Some(mu) = &measure {
            if mu.len() != k || mu.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::NotMetric("measure must be k finite non-negative weights".into()));
            }
        }
        let mut d = matrix;
        let diam = d.iter().copied().fold(0.0, f64::max);
        if !diam.is_finite() || d.iter().any(|x| x.is_nan()) {
            return Err(Error::NotMetric("distances must be finite".into()));
        }
        let tol = AXIOM_TOL * diam.max(1.0);
        for i in 0..k {
            if d[i * k + i].abs() > tol {
                return Err(Error::NotMetric(format!("d({i},{i}) = {}", d[i * k + i])));
            }
            d[i * k + i] = 0.0;
            for j in i + 1..k {
                let (a, b) = (d[i * k + j], d[j * k + i]);
                if a < -tol || b < -tol {
                    return Err(Error::NotMetric(format!("negative distance between {i} and {j}")));
                }
                if (a - b).abs() > tol {
                    return Err(Error::NotMetric(format!("d({i},{j}) = {a} but d({j},{i}) = {b}")));
                }
                let s = a.min(b).max(0.0);
                d[i * k + j] = s;
                d[j * k + i] = s;
            }
        }
        let space = FiniteMetricSpace { ids, d, measure };
        if let Some((i, j, l)) = space.triangle_violation(tol, 0x5eed) {
            return Err(Error::NotMetric(format!(
                "triangle inequality fails: d({i},{l}) > d({i},{j}) + d({j},{l})"
            )));
        }
        Ok(space)
    }

    fn triangle_violation(&self, tol: f64, seed: u64) -> Option<(usize, usize, usize)> {
        let k = self.len();
        let bad = |i: usize, j: usize, l: usize| self.dist(i, l) > self.dist(i, j) + self.dist(j, l) + tol;
        if k <= EXHAUSTIVE_TRIANGLE_LIMIT {
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        if bad(i, j, l) {
                            return Some((i, j, l));
                        }
                    }
                }
            }
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..SAMPLED_TRIPLES)
            .map(|_| (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)))
            .find(|&(i, j, l)| bad(i, j, l))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Labels of the points (mesh vertex ids when built from a mesh).
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn measure(&self) -> Option<&[f64]> {
        self.measure.as_deref()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.len() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.d
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{METRIC_MAGIC}");
        let _ = writeln!(s, "points {}", self.len());
        let ids: Vec<String> = self.ids.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "ids {}", ids.join(" "));
        match &self.measure {
            Some(mu) => {
                let w: Vec<String> = mu.iter().map(|x| format!("{x:?}")).collect();
                let _ = writeln!(s, "measure {}", w.join(" "));
            }
            None => s.push_str("measure none\n"),
        }
        for i in 0..self.len() {
            let row: Vec<String> = (0..self.len()).map(|j| format!("{:?}", self.dist(i, j))).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Format(format!("metric file: {msg}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(METRIC_MAGIC) {
            return Err(bad("missing header"));
        }
        let field = |line: Option<&str>, key: &str| -> Result<Vec<String>> {
            let line = line.ok_or_else(|| bad(&format!("missing {key}")))?;
            let mut it = line.split_whitespace();
            if it.next() != Some(key) {
                return Err(bad(&format!("expected {key}")));
            }
            Ok(it.map(str::to_owned).collect())
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        let k: usize = field(lines.next(), "points")?
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad point count"))?;
        let ids = field(lines.next(), "ids")?
            .iter()
            .map(|s| s.parse::<usize>().map_err(|_| bad("bad id")))
            .collect::<Result<Vec<_>>>()?;
        if ids.len() != k {
            return Err(bad("id count does not match"));
        }
        let mu = field(lines.next(), "measure")?;
        let measure = if mu == ["none"] {
            None
        } else {
            Some(mu.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?)
        };
        let mut d = Vec::with_capacity(k * k);
        for _ in 0..k {
            let row = lines.next().ok_or_else(|| bad("truncated matrix"))?;
            let vals = row.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
            if vals.len() != k {
                return Err(bad("row length does not match"));
            }
            d.extend(vals);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(bad("trailing data"));
        }
        FiniteMetricSpace::new(ids, d, measure)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
