//! Transverse self-intersections and innermost sub-loops of closed polygons.

use super::{genericity_eps, TopologyError};
use crate::geom::{self, Vec2};
use crate::model::{CenterSystem, PeriodicLoop};
use std::collections::BTreeSet;

/// One transverse crossing between two non-adjacent segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub seg_a: usize,
    pub seg_b: usize,
    /// Parameter along segment `seg_a` in (0, 1).
    pub s: f64,
    /// Parameter along segment `seg_b` in (0, 1).
    pub u: f64,
    pub point: Vec2,
}

impl Crossing {
    /// Loop positions of the two visits (segment index + parameter).
    pub fn positions(&self) -> (f64, f64) {
        (self.seg_a as f64 + self.s, self.seg_b as f64 + self.u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionReport {
    pub crossings: Vec<Crossing>,
    pub count: usize,
}

/// All transverse crossings of the closed polygon, excluding shared
/// endpoints of adjacent segments. Crossings whose parameters fall within
/// the genericity margin of a segment end are reported as a non-generic
/// configuration error.
pub fn self_intersections(loop_: &PeriodicLoop) -> Result<IntersectionReport, TopologyError> {
    crossings_of(loop_.nodes(), genericity_eps(loop_)).map(|crossings| {
        let count = crossings.len();
        IntersectionReport { crossings, count }
    })
}

pub(crate) fn crossings_of(nodes: &[Vec2], eps: f64) -> Result<Vec<Crossing>, TopologyError> {
    let n = nodes.len();
    let mut out = Vec::new();
    let mut bad: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        let p1 = nodes[i];
        let p2 = nodes[(i + 1) % n];
        let li = (p2 - p1).norm();
        for j in i + 1..n {
            // Skip adjacent segments (including the wrap-around pair).
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let q1 = nodes[j];
            let q2 = nodes[(j + 1) % n];
            let lj = (q2 - q1).norm();

            let r = p2 - p1;
            let w = q2 - q1;
            let denom = r.cross(w);
            if denom.abs() < 1e-14 * li * lj {
                // (Near-)parallel: non-generic if the segments nearly touch.
                let near = geom::point_segment_distance(q1, p1, p2)
                    .min(geom::point_segment_distance(q2, p1, p2))
                    .min(geom::point_segment_distance(p1, q1, q2))
                    .min(geom::point_segment_distance(p2, q1, q2));
                if near < eps {
                    bad.push((i, j));
                    continue;
                }
                if denom == 0.0 {
                    continue;
                }
            }
            let diff = q1 - p1;
            let s = diff.cross(w) / denom;
            let u = diff.cross(r) / denom;
            let margin_s = eps / li.max(1e-300);
            let margin_u = eps / lj.max(1e-300);
            let inside = s > 0.0 && s < 1.0 && u > 0.0 && u < 1.0;
            let near_end = (s > -margin_s && s < margin_s)
                || (s > 1.0 - margin_s && s < 1.0 + margin_s)
                || (u > -margin_u && u < margin_u)
                || (u > 1.0 - margin_u && u < 1.0 + margin_u);
            if near_end && (inside || (s > -margin_s && s < 1.0 + margin_s && u > -margin_u && u < 1.0 + margin_u)) {
                bad.push((i, j));
                continue;
            }
            if inside {
                out.push(Crossing { seg_a: i, seg_b: j, s, u, point: p1 + r * s });
            }
        }
    }
    if !bad.is_empty() {
        return Err(TopologyError::NonGeneric(bad));
    }
    out.sort_by(|a, b| (a.seg_a, a.s).partial_cmp(&(b.seg_a, b.s)).unwrap());
    Ok(out)
}

/// A sub-loop of the parent polygon: the part between the two visits of one
/// crossing (or the whole loop when it is already simple).
#[derive(Debug, Clone)]
pub struct SubLoop {
    /// Cyclic node interval (first, last) of the parent nodes contained in
    /// the sub-loop; empty intervals are possible for slivers.
    pub node_range: (usize, usize),
    /// The crossing point splitting the sub-loop off (the parent's base
    /// point for a crossing-free loop).
    pub crossing_point: Vec2,
    pub is_innermost: bool,
    pub enclosed_centers: BTreeSet<usize>,
    /// Closed polygon of the sub-loop.
    pub polygon: Vec<Vec2>,
}

/// Vertices of the sub-polygon split off by positions (pos_a, pos_b) along
/// the parent polygon, closed at `point`.
pub(crate) fn subloop_polygon(nodes: &[Vec2], pos_a: f64, pos_b: f64, point: Vec2) -> Vec<Vec2> {
    let n = nodes.len();
    let mut poly = vec![point];
    let mut idx = pos_a.floor() as usize + 1;
    let end = pos_b;
    loop {
        let pos = idx as f64;
        if pos >= end {
            break;
        }
        poly.push(nodes[idx % n]);
        idx += 1;
    }
    poly
}

fn polygon_is_simple(poly: &[Vec2], eps: f64) -> bool {
    if poly.len() < 3 {
        return true;
    }
    matches!(crossings_of(poly, eps), Ok(c) if c.is_empty())
}

fn enclosed_centers(poly: &[Vec2], sys: &CenterSystem) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if poly.len() < 3 {
        return out;
    }
    for (j, &c) in sys.positions().iter().enumerate() {
        let w = geom::total_turning_about(poly, c) / (2.0 * std::f64::consts::PI);
        if w.round().abs() >= 1.0 && (w - w.round()).abs() < 1e-6 {
            out.insert(j);
        }
    }
    out
}

/// Split the loop at its crossings and classify each sub-loop; innermost
/// means the sub-polygon is simple (a Jordan curve). A crossing-free loop is
/// its own (single) innermost sub-loop.
pub fn innermost_subloops(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
) -> Result<Vec<SubLoop>, TopologyError> {
    let report = self_intersections(loop_)?;
    let nodes = loop_.nodes();
    let n = nodes.len();
    let eps = genericity_eps(loop_);
    let mut out = Vec::new();

    if report.crossings.is_empty() {
        let poly = nodes.to_vec();
        out.push(SubLoop {
            node_range: (0, n - 1),
            crossing_point: nodes[0],
            is_innermost: true,
            enclosed_centers: enclosed_centers(&poly, sys),
            polygon: poly,
        });
        return Ok(out);
    }

    for c in &report.crossings {
        let (pa, pb) = c.positions();
        for (lo, hi) in [(pa, pb), (pb, pa + n as f64)] {
            let poly = subloop_polygon(nodes, lo, hi, c.point);
            let is_innermost = polygon_is_simple(&poly, eps);
            let enclosed = if is_innermost {
                enclosed_centers(&poly, sys)
            } else {
                BTreeSet::new()
            };
            let first = (lo.floor() as usize + 1) % n;
            let last = (hi.ceil() as usize + n - 1) % n;
            out.push(SubLoop {
                node_range: (first, last),
                crossing_point: c.point,
                is_innermost,
                enclosed_centers: enclosed,
                polygon: poly,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::circle_loop;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn figure_eight(n: usize) -> PeriodicLoop {
        // Half-step phase keeps the self-crossing at the origin away from
        // the sample nodes.
        let nodes: Vec<Vec2> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Vec2::new((2.0 * t).sin(), t.sin() * 0.5)
            })
            .collect();
        PeriodicLoop::new(2.0 * PI, nodes).unwrap()
    }

    #[test]
    fn convex_polygon_has_no_crossings() {
        let lp = circle_loop(Vec2::ZERO, 1.0, 17, 1.0, 1);
        assert_eq!(self_intersections(&lp).unwrap().count, 0);
    }

    #[test]
    fn figure_eight_has_one_crossing() {
        let report = self_intersections(&figure_eight(64)).unwrap();
        assert_eq!(report.count, 1);
        assert!(report.crossings[0].point.norm() < 1e-9);
    }

    /// Straightforward quadratic oracle, no prefilters or margins beyond the
    /// strict interior test.
    fn brute_force_crossings(nodes: &[Vec2]) -> Vec<(usize, usize)> {
        let n = nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if geom::segment_intersection(
                    nodes[i],
                    nodes[(i + 1) % n],
                    nodes[j],
                    nodes[(j + 1) % n],
                )
                .is_some()
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn random_polygons_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 60 {
            let n = 50;
            let nodes: Vec<Vec2> = (0..n)
                .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let lp = PeriodicLoop::new(1.0, nodes).unwrap();
            match self_intersections(&lp) {
                Ok(report) => {
                    let mut got: Vec<(usize, usize)> =
                        report.crossings.iter().map(|c| (c.seg_a, c.seg_b)).collect();
                    got.sort();
                    assert_eq!(got, brute_force_crossings(lp.nodes()));
                    done += 1;
                }
                Err(TopologyError::NonGeneric(_)) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn figure_eight_lobes_are_innermost() {
        let sys = CenterSystem::new(
            vec![1.0, 1.0],
            vec![Vec2::new(-0.9, 0.0), Vec2::new(0.9, 0.0)],
            1.0,
        )
        .unwrap();
        let n = 64;
        let nodes: Vec<Vec2> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Vec2::new(1.6 * t.sin(), 0.6 * (2.0 * t).sin())
            })
            .collect();
        let lp = PeriodicLoop::new(2.0 * PI, nodes).unwrap();
        let subs = innermost_subloops(&lp, &sys).unwrap();
        let innermost: Vec<&SubLoop> = subs.iter().filter(|s| s.is_innermost).collect();
        assert_eq!(innermost.len(), 2);
        let mut sets: Vec<Vec<usize>> = innermost
            .iter()
            .map(|s| s.enclosed_centers.iter().copied().collect())
            .collect();
        sets.sort();
        assert_eq!(sets, vec![vec![0], vec![1]]);
    }

    #[test]
    fn simple_circle_is_its_own_innermost_subloop() {
        let sys = CenterSystem::new(
            vec![1.0, 1.0],
            vec![Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)],
            1.0,
        )
        .unwrap();
        let lp = circle_loop(Vec2::ZERO, 2.0, 64, 2.0 * PI, 1);
        let subs = innermost_subloops(&lp, &sys).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_innermost);
        assert_eq!(
            subs[0].enclosed_centers.iter().copied().collect::<Vec<_>>(),
            vec![0, 1]
        );
    }

    #[test]
    fn trefoil_census() {
        // Classic trefoil shadow: 3 crossings at radius ~1.5. For this
        // curve all six crossing arcs are simple — three petals (one
        // center each) and three complementary two-petal arcs (two
        // centers each). Census enumerated by hand from the fixture
        // geometry: enclosed sets {0},{1},{2},{0,1},{0,2},{1,2}.
        let n = 120;
        let nodes: Vec<Vec2> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Vec2::new(t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos())
            })
            .collect();
        let lp = PeriodicLoop::new(2.0 * PI, nodes).unwrap();
        assert_eq!(self_intersections(&lp).unwrap().count, 3);

        // Petal tips sit at radius 3, angles 31.5°, 151.5°, 271.5°.
        let sys = CenterSystem::new(
            vec![1.0; 3],
            vec![
                Vec2::from_angle(31.5f64.to_radians()) * 2.4,
                Vec2::from_angle(151.5f64.to_radians()) * 2.4,
                Vec2::from_angle(271.5f64.to_radians()) * 2.4,
            ],
            1.0,
        )
        .unwrap();
        let subs = innermost_subloops(&lp, &sys).unwrap();
        let innermost: Vec<&SubLoop> = subs.iter().filter(|s| s.is_innermost).collect();
        assert_eq!(innermost.len(), 6);
        let mut seen: Vec<Vec<usize>> = innermost
            .iter()
            .map(|s| s.enclosed_centers.iter().copied().collect())
            .collect();
        seen.sort();
        assert_eq!(
            seen,
            vec![vec![0], vec![0, 1], vec![0, 2], vec![1], vec![1, 2], vec![2]]
        );
        // Cross-validate simplicity with the brute-force oracle.
        for s in innermost {
            assert!(brute_force_crossings(&s.polygon).is_empty());
        }
    }
}
