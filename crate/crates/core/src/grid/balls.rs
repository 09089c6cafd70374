use super::{GridManifold, Topology};

/// Vertices within base distance `r` of `center` (periodic on the torus),
/// sorted by vertex id.
pub fn ball_vertices(m: &GridManifold, center: usize, r: f64) -> Vec<usize> {
    let r = r.max(0.0);
    let r2 = r * r * (1.0 + 1e-12);
    let mut out = match m.topology {
        Topology::CylinderS3 => (0..m.len())
            .filter(|&v| m.base_distance_sq(center, v) <= r2)
            .collect(),
        _ => {
            let c: Vec<isize> = m.lattice_index(center).iter().map(|&i| i as isize).collect();
            let mut seen = Vec::new();
            let mut p = c.clone();
            for off in ball_offsets(m, r) {
                for a in 0..m.dim {
                    p[a] = c[a] + off[a];
                }
                if let Some(v) = m.vertex_at(&p) {
                    seen.push(v);
                }
            }
            seen
        }
    };
    out.sort_unstable();
    // Offsets larger than half the torus alias onto the same vertex.
    out.dedup();
    out
}

/// Lattice offsets of a flat grid with Euclidean length at most `r`.
pub fn ball_offsets(m: &GridManifold, r: f64) -> Vec<Vec<isize>> {
    let h = m.spacing[0];
    let r2 = r * r * (1.0 + 1e-12);
    let mut k = (r / h).floor() as isize;
    if m.periodic[0] {
        // Beyond half the torus every offset aliases an existing one.
        k = k.min(m.shape[0] as isize / 2);
    }
    let n = m.dim;
    let mut out = Vec::new();
    let mut off = vec![-k; n];
    loop {
        let d2: f64 = off.iter().map(|&o| (o as f64 * h).powi(2)).sum();
        if d2 <= r2 || (m.periodic[0] && periodic_d2(m, &off) <= r2) {
            out.push(off.clone());
        }
        let mut a = n;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if off[a] < k {
                off[a] += 1;
                break;
            }
            off[a] = -k;
        }
    }
}

fn periodic_d2(m: &GridManifold, off: &[isize]) -> f64 {
    off.iter()
        .enumerate()
        .map(|(a, &o)| (m.lattice_delta(0, o.rem_euclid(m.shape[a] as isize) as usize, a) as f64 * m.spacing[a]).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_cylinder, build_stereo_ball, build_torus};
    use proptest::prelude::*;

    fn brute(m: &GridManifold, c: usize, r: f64) -> Vec<usize> {
        (0..m.len())
            .filter(|&v| m.base_distance_sq(c, v) <= r * r * (1.0 + 1e-12))
            .collect()
    }

    #[test]
    fn zero_radius_is_center() {
        let m = build_torus(3, 1.0, 8).unwrap();
        assert_eq!(ball_vertices(&m, 17, 0.0), vec![17]);
        let b = build_stereo_ball(4, 1.0, 10).unwrap();
        let c = b.nearest_vertex(&[0.0; 4]).unwrap();
        assert_eq!(ball_vertices(&b, c, 0.9 * b.spacing()[0]), vec![c]);
    }

    #[test]
    fn torus_ball_wraps() {
        // The farthest point of the unit 3-torus is at distance sqrt(3)/2.
        let m = build_torus(3, 1.0, 8).unwrap();
        assert_eq!(ball_vertices(&m, 5, 0.87).len(), m.len());
        assert!(ball_vertices(&m, 5, 0.6).len() < m.len());
        assert_eq!(ball_vertices(&m, 5, 0.6), brute(&m, 5, 0.6));
    }

    #[test]
    fn cylinder_matches_brute_force() {
        let (m, _) = build_cylinder(1.0, 3, 2, 4).unwrap();
        for &(c, r) in &[(0usize, 0.5), (40, 1.3), (100, 3.0)] {
            assert_eq!(ball_vertices(&m, c, r), brute(&m, c, r));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn matches_brute_force_and_is_monotone(c in 0usize..512, r in 0.0f64..1.0, dr in 0.0f64..0.3) {
            let t = build_torus(3, 1.0, 8).unwrap();
            let small = ball_vertices(&t, c, r);
            prop_assert_eq!(&small, &brute(&t, c, r));
            let big = ball_vertices(&t, c, r + dr);
            prop_assert!(small.iter().all(|v| big.binary_search(v).is_ok()));

            let b = build_stereo_ball(3, 1.0, 8).unwrap();
            let cb = c % b.len();
            prop_assert_eq!(ball_vertices(&b, cb, r), brute(&b, cb, r));
        }
    }
}
