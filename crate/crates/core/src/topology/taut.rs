//! Excess self-intersection removal: singular 1-gon and 2-gon surgeries.
//!
//! A generic loop with excess self-intersection has a singular 1-gon (a
//! null-homotopic sub-loop at one crossing) or a singular 2-gon (two
//! strands between two crossings whose identification loop is trivial).
//! Reversing a 1-gon, or exchanging/reversing the strands of a 2-gon,
//! preserves the free homotopy class, turns the affected crossings into
//! touch points, and a small corner nudge separates them. Every surgery
//! strictly decreases the crossing count, so iterating terminates.

use super::intersect::{crossings_of, subloop_polygon, Crossing};
use super::{genericity_eps, homotopy_word, HomotopyWord, TopologyError};
use crate::geom::{self, Vec2};
use crate::model::{action, CenterSystem, PeriodicLoop};

/// Result of a taut reduction.
#[derive(Debug, Clone)]
pub struct TautReport {
    pub output: PeriodicLoop,
    pub surgeries: usize,
    pub crossings_before: usize,
    pub crossings_after: usize,
    pub action_before: f64,
    pub action_after: f64,
}

enum Item {
    Node(Vec2),
    Visit(Vec2),
}

/// Materialize an item list, replacing each crossing visit by its base point
/// nudged into the corner formed by its realized neighbors.
fn assemble(items: &[Item], eps: f64) -> Vec<Vec2> {
    let n = items.len();
    let base = |it: &Item| match *it {
        Item::Node(p) | Item::Visit(p) => p,
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        match items[k] {
            Item::Node(p) => out.push(p),
            Item::Visit(p) => {
                let prev = base(&items[(k + n - 1) % n]);
                let next = base(&items[(k + 1) % n]);
                let u = (p - prev).normalized();
                let v = (next - p).normalized();
                let mut dir = (v - u) * 0.5;
                if dir.norm() < 1e-9 {
                    dir = v.rot90();
                }
                out.push(p + dir.normalized() * eps);
            }
        }
    }
    out
}

fn word_of_polygon(poly: &[Vec2], sys: &CenterSystem) -> Option<HomotopyWord> {
    if poly.len() < 3 {
        return Some(HomotopyWord::reduce(&[]));
    }
    let lp = PeriodicLoop::new(1.0, poly.to_vec()).ok()?;
    homotopy_word(&lp, sys).ok()
}

/// Nodes strictly inside the open position interval (lo, hi) along the
/// cyclic node sequence (hi may exceed n to express wrap-around).
fn arc_nodes(nodes: &[Vec2], lo: f64, hi: f64) -> Vec<Vec2> {
    let n = nodes.len();
    let mut out = Vec::new();
    let mut idx = lo.floor() as isize + 1;
    while (idx as f64) < hi {
        if idx as f64 > lo {
            out.push(nodes[(idx as usize) % n]);
        }
        idx += 1;
    }
    out
}

fn min_center_clearance(nodes: &[Vec2], sys: &CenterSystem) -> f64 {
    let n = nodes.len();
    let mut best = f64::INFINITY;
    for k in 0..n {
        for &c in sys.positions() {
            best = best.min(geom::point_segment_distance(c, nodes[k], nodes[(k + 1) % n]));
        }
    }
    best
}

/// Try a surgery given as an item list; succeeds when the reassembled loop
/// is generic, drops at least `min_drop` crossings, and keeps clear of the
/// centers. The nudge shrinks on failure.
fn try_surgery(
    items: &[Item],
    period: f64,
    sys: &CenterSystem,
    old_count: usize,
    min_drop: usize,
    scale: f64,
) -> Option<PeriodicLoop> {
    let mut eps = 1e-3 * scale;
    for _ in 0..8 {
        let nodes = assemble(items, eps);
        let gen_eps = 1e-9 * geom::diameter(&nodes).max(1e-12);
        if let Ok(crossings) = crossings_of(&nodes, gen_eps) {
            if crossings.len() + min_drop <= old_count
                && min_center_clearance(&nodes, sys) > sys.collision_epsilon()
            {
                return PeriodicLoop::new(period, nodes).ok();
            }
        }
        eps *= 0.25;
    }
    None
}

struct MonogonCandidate {
    /// Crossing point (stable across loop rotation).
    point: Vec2,
    /// Positions (lo, hi) of the null sub-loop along the node sequence.
    lo: f64,
    hi: f64,
    area: f64,
}

fn monogon_candidates(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
    crossings: &[Crossing],
) -> Vec<MonogonCandidate> {
    let nodes = loop_.nodes();
    let n = nodes.len() as f64;
    let mut out = Vec::new();
    for c in crossings {
        let (pa, pb) = c.positions();
        for (lo, hi) in [(pa, pb), (pb, pa + n)] {
            let poly = subloop_polygon(nodes, lo, hi, c.point);
            let trivial = match word_of_polygon(&poly, sys) {
                Some(w) => w.is_trivial(),
                None => false,
            };
            if trivial {
                out.push(MonogonCandidate {
                    point: c.point,
                    lo,
                    hi,
                    area: geom::polygon_area(&poly).abs(),
                });
            }
        }
    }
    out.sort_by(|a, b| a.area.partial_cmp(&b.area).unwrap());
    out
}

/// Remove one singular 1-gon: reverse the null sub-loop and separate the
/// now non-transverse crossing. Class preserved, crossing count strictly
/// decreased.
pub fn remove_monogon(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
) -> Result<PeriodicLoop, TopologyError> {
    let crossings = crossings_of(loop_.nodes(), genericity_eps(loop_))?;
    let old_count = crossings.len();
    let nodes = loop_.nodes();
    let n = nodes.len();
    for cand in monogon_candidates(loop_, sys, &crossings) {
        // Items: outside arc, visit, reversed inside arc, visit.
        let inside: Vec<Vec2> = arc_nodes(nodes, cand.lo, cand.hi);
        let outside: Vec<Vec2> = arc_nodes(nodes, cand.hi, cand.lo + n as f64);
        let mut items = Vec::with_capacity(n + 2);
        items.push(Item::Visit(cand.point));
        for &p in inside.iter().rev() {
            items.push(Item::Node(p));
        }
        items.push(Item::Visit(cand.point));
        for &p in &outside {
            items.push(Item::Node(p));
        }
        let scale = loop_.diameter() / n as f64;
        if let Some(lp) = try_surgery(&items, loop_.period(), sys, old_count, 1, scale) {
            return Ok(lp);
        }
    }
    Err(TopologyError::NoMonogon)
}

struct BigonCandidate {
    /// Item program for the reassembled loop.
    items: Vec<Item>,
    area: f64,
}

fn bigon_candidates(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
    crossings: &[Crossing],
) -> Vec<BigonCandidate> {
    let nodes = loop_.nodes();
    let n = nodes.len() as f64;
    let eps = genericity_eps(loop_);
    let mut out = Vec::new();
    for (ia, a) in crossings.iter().enumerate() {
        for b in &crossings[ia + 1..] {
            if (a.point - b.point).norm() < eps {
                continue;
            }
            // Four cut positions in cyclic order with their crossing labels.
            let mut cuts = [
                (a.positions().0, 0u8),
                (a.positions().1, 0u8),
                (b.positions().0, 1u8),
                (b.positions().1, 1u8),
            ];
            cuts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let pt = |label: u8| if label == 0 { a.point } else { b.point };
            let arcs: Vec<Vec<Vec2>> = (0..4)
                .map(|i| {
                    let lo = cuts[i].0;
                    let hi = if i == 3 { cuts[0].0 + n } else { cuts[i + 1].0 };
                    arc_nodes(nodes, lo, hi)
                })
                .collect();
            let labels: Vec<u8> = cuts.iter().map(|c| c.1).collect();

            // Opposite-arc pairs (0, 2) and (1, 3) are strand candidates: a
            // strand must connect the two distinct crossing points.
            for (s1, s2) in [(0usize, 2usize), (1, 3)] {
                let (e11, e12) = (labels[s1], labels[(s1 + 1) % 4]);
                let (e21, e22) = (labels[s2], labels[(s2 + 1) % 4]);
                if e11 == e12 || e21 == e22 {
                    continue;
                }
                let parallel = e11 == e21;
                // Identification loop of the 2-gon.
                let mut poly = vec![pt(e11)];
                poly.extend_from_slice(&arcs[s1]);
                poly.push(pt(e12));
                if parallel {
                    poly.extend(arcs[s2].iter().rev().copied());
                } else {
                    poly.extend_from_slice(&arcs[s2]);
                }
                let trivial = match word_of_polygon(&poly, sys) {
                    Some(w) => w.is_trivial(),
                    None => false,
                };
                if !trivial {
                    continue;
                }
                let area = geom::polygon_area(&poly).abs();

                let m1 = (s1 + 1) % 4;
                let m2 = (s2 + 1) % 4;
                let mut items = Vec::new();
                if parallel {
                    // Exchange the strands.
                    items.push(Item::Visit(pt(labels[s1])));
                    for &p in &arcs[s2] {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(labels[m1])));
                    for &p in &arcs[m1] {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(labels[s2])));
                    for &p in &arcs[s1] {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(labels[m2])));
                    for &p in &arcs[m2] {
                        items.push(Item::Node(p));
                    }
                } else {
                    // Anti-parallel: traverse each strand's image backwards.
                    for &p in &arcs[m2] {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(e11)));
                    for &p in arcs[s2].iter().rev() {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(e12)));
                    for &p in &arcs[m1] {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(e12)));
                    for &p in arcs[s1].iter().rev() {
                        items.push(Item::Node(p));
                    }
                    items.push(Item::Visit(pt(e11)));
                }
                out.push(BigonCandidate { items, area });
            }
        }
    }
    out.sort_by(|x, y| x.area.partial_cmp(&y.area).unwrap());
    out
}

/// Remove one singular 2-gon; the crossing count drops by two.
pub fn remove_bigon(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
) -> Result<PeriodicLoop, TopologyError> {
    let crossings = crossings_of(loop_.nodes(), genericity_eps(loop_))?;
    let old_count = crossings.len();
    let scale = loop_.diameter() / loop_.len() as f64;
    for cand in bigon_candidates(loop_, sys, &crossings) {
        if let Some(lp) = try_surgery(&cand.items, loop_.period(), sys, old_count, 2, scale) {
            return Ok(lp);
        }
    }
    Err(TopologyError::NoBigon)
}

/// Iterate 1-gon and 2-gon removal until neither applies, then redistribute
/// nodes along long segments to keep the parametrization (and with it the
/// action) close to the input's.
pub fn make_taut(loop_: &PeriodicLoop, sys: &CenterSystem) -> Result<TautReport, TopologyError> {
    let crossings_before = crossings_of(loop_.nodes(), genericity_eps(loop_))?.len();
    let action_before = action(loop_, sys)?;
    let mut cur = loop_.clone();
    let mut surgeries = 0usize;
    let cap = 2 * crossings_before + 8;
    for _ in 0..cap {
        match remove_monogon(&cur, sys) {
            Ok(next) => {
                cur = next;
                surgeries += 1;
                continue;
            }
            Err(TopologyError::NoMonogon) => {}
            Err(e) => return Err(e),
        }
        match remove_bigon(&cur, sys) {
            Ok(next) => {
                cur = next;
                surgeries += 1;
                continue;
            }
            Err(TopologyError::NoBigon) => break,
            Err(e) => return Err(e),
        }
    }
    let crossings_after = crossings_of(cur.nodes(), genericity_eps(&cur))?.len();
    if crossings_after > 0 && surgeries >= cap {
        return Err(TopologyError::IterationCap);
    }
    if surgeries > 0 {
        cur = rebalance(&cur, 4 * loop_.len() + 64);
    }
    let action_after = action(&cur, sys)?;
    Ok(TautReport {
        output: cur,
        surgeries,
        crossings_before,
        crossings_after,
        action_before,
        action_after,
    })
}

/// Split the longest edges (inserting points on the polygon, which never
/// changes its image) until the piecewise-linear kinetic energy is within
/// 10% of its constant-speed lower bound or the node budget runs out.
fn rebalance(loop_: &PeriodicLoop, max_nodes: usize) -> PeriodicLoop {
    let mut nodes = loop_.nodes().to_vec();
    loop {
        let n = nodes.len();
        let lengths: Vec<f64> = (0..n).map(|k| (nodes[(k + 1) % n] - nodes[k]).norm()).collect();
        let total: f64 = lengths.iter().sum();
        let sum_sq: f64 = lengths.iter().map(|l| l * l).sum();
        // kinetic = n·Σℓ²/(2T), lower bound L²/(2T).
        if n as f64 * sum_sq <= 1.1 * total * total || n >= max_nodes {
            break;
        }
        let (k_max, _) = lengths
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let mid = (nodes[k_max] + nodes[(k_max + 1) % n]) * 0.5;
        nodes.insert(k_max + 1, mid);
    }
    PeriodicLoop::new(loop_.period(), nodes).expect("rebalance keeps the loop valid")
}
