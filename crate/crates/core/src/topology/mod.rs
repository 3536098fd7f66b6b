//! Computational topology of loops in the N-punctured plane.
//!
//! The fundamental group of the plane punctured at the N centers is free of
//! rank N; a free homotopy class is a conjugacy class there, represented by
//! a cyclically reduced word. This module reads words off loops (signed
//! crossings with disjoint rays dropped from each center), computes winding
//! vectors, enumerates transverse self-intersections and innermost
//! sub-loops, decides admissibility of a class, and reduces loops to taut
//! position by singular 1-gon / 2-gon surgeries.

mod intersect;
mod taut;

pub use intersect::{innermost_subloops, self_intersections, Crossing, IntersectionReport, SubLoop};
pub use taut::{make_taut, remove_bigon, remove_monogon, TautReport};

use crate::geom::{self, Vec2};
use crate::model::{CenterSystem, PeriodicLoop};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("segment {segment} passes through center {center}: winding ill-defined")]
    SegmentThroughCenter { segment: usize, center: usize },
    #[error("winding sum {0} is not close to an integer multiple of 2π")]
    NonIntegerWinding(f64),
    #[error("non-generic configuration: segment pairs {0:?} nearly tangent or endpoint-incident")]
    NonGeneric(Vec<(usize, usize)>),
    #[error("ray from center {center} stays degenerate after {retries} angular perturbations")]
    RayDegenerate { center: usize, retries: usize },
    #[error("word letter {0} out of range for {1} centers")]
    LetterOutOfRange(i32, usize),
    #[error("trivial class")]
    TrivialWord,
    #[error("no singular 1-gon found")]
    NoMonogon,
    #[error("no singular 2-gon found")]
    NoBigon,
    #[error("taut reduction exceeded its iteration cap")]
    IterationCap,
    #[error("representative construction failed: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Index of the loop about each center (the abelianized class).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindingVector(pub Vec<i64>);

/// Cyclically reduced word in the rank-N free group. Letter `+j` is the
/// generator of center `j` (1-based), `-j` its inverse.
#[derive(Debug, Clone, Eq)]
pub struct HomotopyWord {
    letters: Vec<i32>,
}

impl HomotopyWord {
    /// Reduce a raw letter sequence freely and then cyclically.
    pub fn reduce(raw: &[i32]) -> HomotopyWord {
        let mut stack: Vec<i32> = Vec::with_capacity(raw.len());
        for &l in raw {
            if l == 0 {
                continue;
            }
            if stack.last().is_some_and(|&t| t == -l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        // Cyclic reduction: cancel across the wrap-around.
        while stack.len() >= 2 && *stack.first().unwrap() == -*stack.last().unwrap() {
            stack.pop();
            stack.remove(0);
        }
        HomotopyWord { letters: stack }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    /// Signed letter sums: the Hurewicz image of the class.
    pub fn abelianization(&self, n_centers: usize) -> WindingVector {
        let mut v = vec![0i64; n_centers];
        for &l in &self.letters {
            let j = (l.unsigned_abs() as usize) - 1;
            if j < n_centers {
                v[j] += l.signum() as i64;
            }
        }
        WindingVector(v)
    }

    /// Validate letters against the number of centers.
    pub fn check_alphabet(&self, n_centers: usize) -> Result<(), TopologyError> {
        for &l in &self.letters {
            let j = l.unsigned_abs() as usize;
            if j == 0 || j > n_centers {
                return Err(TopologyError::LetterOutOfRange(l, n_centers));
            }
        }
        Ok(())
    }

    /// Parse whitespace-separated tokens "a3" (generator 3) / "A3" (inverse).
    pub fn parse(text: &str) -> Result<HomotopyWord, TopologyError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (sign, digits) = match tok.chars().next() {
                Some('a') => (1i32, &tok[1..]),
                Some('A') => (-1i32, &tok[1..]),
                _ => {
                    return Err(TopologyError::ConstructionFailed(format!(
                        "bad word token '{tok}' (expected a<j> or A<j>)"
                    )))
                }
            };
            let j: i32 = digits.parse().map_err(|_| {
                TopologyError::ConstructionFailed(format!("bad word token '{tok}'"))
            })?;
            if j < 1 {
                return Err(TopologyError::LetterOutOfRange(j, usize::MAX));
            }
            letters.push(sign * j);
        }
        Ok(HomotopyWord::reduce(&letters))
    }
}

impl std::fmt::Display for HomotopyWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(trivial)");
        }
        let toks: Vec<String> = self
            .letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("a{l}")
                } else {
                    format!("A{}", -l)
                }
            })
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

/// Words compare as free homotopy classes: equal up to cyclic rotation.
impl PartialEq for HomotopyWord {
    fn eq(&self, other: &Self) -> bool {
        if self.letters.len() != other.letters.len() {
            return false;
        }
        let n = self.letters.len();
        if n == 0 {
            return true;
        }
        (0..n).any(|r| (0..n).all(|i| self.letters[(i + r) % n] == other.letters[i]))
    }
}

/// Genericity tolerance for a loop: 1e-9 × its diameter.
pub(crate) fn genericity_eps(loop_: &PeriodicLoop) -> f64 {
    1e-9 * loop_.diameter().max(1e-12)
}

/// Winding vector via summed signed angle increments around each center.
pub fn winding_vector(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
) -> Result<WindingVector, TopologyError> {
    let n = loop_.len();
    let eps = genericity_eps(loop_).max(sys.collision_epsilon());
    let mut out = Vec::with_capacity(sys.len());
    for (j, &c) in sys.positions().iter().enumerate() {
        for k in 0..n {
            if geom::point_segment_distance(c, loop_.node(k), loop_.node(k + 1)) < eps {
                return Err(TopologyError::SegmentThroughCenter { segment: k, center: j });
            }
        }
        let total = geom::total_turning_about(loop_.nodes(), c) / (2.0 * std::f64::consts::PI);
        let rounded = total.round();
        if (total - rounded).abs() > 1e-6 {
            return Err(TopologyError::NonIntegerWinding(total));
        }
        out.push(rounded as i64);
    }
    Ok(WindingVector(out))
}

/// One signed ray crossing while reading a word.
struct RayHit {
    position: f64,
    letter: i32,
}

/// Read the free homotopy class of the loop as a cyclically reduced word.
///
/// A ray is dropped from each center (downward by default) and each
/// transverse crossing of the loop with the ray contributes the center's
/// generator, signed by crossing direction. Rays that pass too close to a
/// node, another center, or a near-parallel segment are rotated by golden
/// angle steps, up to 16 retries.
pub fn homotopy_word(
    loop_: &PeriodicLoop,
    sys: &CenterSystem,
) -> Result<HomotopyWord, TopologyError> {
    let n = loop_.len();
    let eps = genericity_eps(loop_).max(sys.collision_epsilon());
    let golden = 2.0 * std::f64::consts::PI * (1.0 - 1.0 / 1.618_033_988_749_895);
    let reach = 4.0 * (loop_.diameter() + sys.scale());

    let mut hits: Vec<RayHit> = Vec::new();
    'centers: for (j, &c) in sys.positions().iter().enumerate() {
        'retry: for retry in 0..16 {
            let theta = -std::f64::consts::FRAC_PI_2 + retry as f64 * golden;
            let u = Vec2::from_angle(theta);
            // Ray must clear the other centers.
            for (j2, &c2) in sys.positions().iter().enumerate() {
                if j2 != j && geom::point_segment_distance(c2, c, c + u * reach) < 16.0 * eps {
                    continue 'retry;
                }
            }
            let mut local: Vec<RayHit> = Vec::new();
            for k in 0..n {
                let p = loop_.node(k);
                let q = loop_.node(k + 1);
                let d = q - p;
                let denom = d.cross(u);
                let e = c - p;
                if denom.abs() < 1e-12 * d.norm() {
                    // Near-parallel: reject only if the segment actually
                    // comes close to the ray line.
                    if geom::point_segment_distance(p, c, c + u * reach) < 4.0 * eps
                        || geom::point_segment_distance(q, c, c + u * reach) < 4.0 * eps
                    {
                        continue 'retry;
                    }
                    continue;
                }
                let s = e.cross(u) / denom;
                let t = e.cross(d) / denom;
                if t <= 0.0 {
                    // Behind or at the center.
                    if s > 0.0 && s < 1.0 && t > -eps {
                        return Err(TopologyError::SegmentThroughCenter { segment: k, center: j });
                    }
                    continue;
                }
                if s <= 0.0 || s >= 1.0 {
                    // Crossing close to a node: perturb the ray.
                    let margin = eps / d.norm().max(1e-300);
                    if (s - 0.0).abs() < margin || (s - 1.0).abs() < margin {
                        continue 'retry;
                    }
                    continue;
                }
                let margin = eps / d.norm().max(1e-300);
                if s < margin || s > 1.0 - margin {
                    continue 'retry;
                }
                let sign = if d.cross(u) < 0.0 { 1 } else { -1 };
                local.push(RayHit { position: k as f64 + s, letter: sign * (j as i32 + 1) });
            }
            hits.extend(local);
            continue 'centers;
        }
        return Err(TopologyError::RayDegenerate { center: j, retries: 16 });
    }

    hits.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    let raw: Vec<i32> = hits.iter().map(|h| h.letter).collect();
    Ok(HomotopyWord::reduce(&raw))
}

/// Admissibility verdict for a free homotopy class.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    /// Innermost sub-loop enclosing fewer than two centers, when one exists.
    pub witness: Option<SubLoop>,
    /// The taut generic representative the verdict was computed on.
    pub representative: PeriodicLoop,
}

/// Decide whether every innermost sub-loop of a taut generic representative
/// of the class encloses at least two centers.
///
/// With `cross_check` a second, differently seeded representative is built
/// and both verdicts must agree.
pub fn is_admissible(
    word: &HomotopyWord,
    sys: &CenterSystem,
    cross_check: bool,
) -> Result<Admissibility, TopologyError> {
    if word.is_trivial() {
        return Err(TopologyError::TrivialWord);
    }
    word.check_alphabet(sys.len())?;
    let verdict = admissibility_once(word, sys, 0)?;
    if cross_check {
        let second = admissibility_once(word, sys, 1)?;
        if second.admissible != verdict.admissible {
            return Err(TopologyError::ConstructionFailed(format!(
                "representatives disagree on admissibility of {word}"
            )));
        }
    }
    Ok(verdict)
}

fn admissibility_once(
    word: &HomotopyWord,
    sys: &CenterSystem,
    variant: usize,
) -> Result<Admissibility, TopologyError> {
    let rep = class_representative(word, sys, variant)?;
    let taut = make_taut(&rep, sys)?.output;
    let got = homotopy_word(&taut, sys)?;
    if got != *word {
        return Err(TopologyError::ConstructionFailed(format!(
            "taut representative spells {got}, wanted {word}"
        )));
    }
    let subs = innermost_subloops(&taut, sys)?;
    let witness = subs
        .iter()
        .filter(|s| s.is_innermost)
        .find(|s| s.enclosed_centers.len() < 2)
        .cloned();
    Ok(Admissibility { admissible: witness.is_none(), witness, representative: taut })
}

/// Build a generic collision-free loop spelling `word`: one "petal" circling
/// the right center per letter, joined by corridors from a bus line below
/// the configuration, then lightly relaxed. Retries a rotated frame when the
/// construction self-obstructs.
pub fn class_representative(
    word: &HomotopyWord,
    sys: &CenterSystem,
    variant: usize,
) -> Result<PeriodicLoop, TopologyError> {
    if word.is_trivial() {
        return Err(TopologyError::TrivialWord);
    }
    word.check_alphabet(sys.len())?;
    let golden = 2.0 * std::f64::consts::PI * (1.0 - 1.0 / 1.618_033_988_749_895);
    for attempt in 0..6 {
        let frame = golden * (variant as f64 + 2.5 * attempt as f64);
        match flower_polyline(word, sys, frame) {
            Ok(nodes) => {
                let lp = PeriodicLoop::new(2.0 * std::f64::consts::PI, nodes)?;
                if !lp.is_collision_free(sys) {
                    continue;
                }
                let lp = relax(&lp, sys, 40);
                match homotopy_word(&lp, sys) {
                    Ok(w) if w == *word => return Ok(lp),
                    _ => continue,
                }
            }
            Err(_) => continue,
        }
    }
    Err(TopologyError::ConstructionFailed(format!(
        "could not realize {word} over this center layout"
    )))
}

/// Petal-and-corridor polyline spelling the word, built in a frame rotated
/// by `frame` radians (rotation changes which direction counts as "down").
fn flower_polyline(
    word: &HomotopyWord,
    sys: &CenterSystem,
    frame: f64,
) -> Result<Vec<Vec2>, TopologyError> {
    let rot = Vec2::from_angle(frame);
    let unrot = Vec2::from_angle(-frame);
    let centers: Vec<Vec2> = sys.positions().iter().map(|&c| unrot.cmul(c)).collect();

    let spacing = if sys.len() > 1 { sys.min_spacing() } else { sys.scale() };
    let r_base = 0.3 * spacing;
    let min_y = centers.iter().map(|c| c.y).fold(f64::INFINITY, f64::min);
    let max_r = centers.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let bus_y = min_y - 0.4 * (max_r + spacing) - 2.0 * r_base;

    let m_letters = word.len();
    let mut occurrence = vec![0usize; sys.len()];
    let mut nodes: Vec<Vec2> = Vec::new();
    let dy = 0.08 * r_base;

    for (m, &l) in word.letters().iter().enumerate() {
        let j = (l.unsigned_abs() as usize) - 1;
        let ccw = l > 0;
        let occ = occurrence[j];
        occurrence[j] += 1;
        let r = r_base * (1.0 - 0.12 * occ as f64);
        if r < 0.05 * r_base {
            return Err(TopologyError::ConstructionFailed(
                "too many visits to one center for the petal radii".into(),
            ));
        }
        let c = centers[j];
        let ang = 0.25 + 0.1 * occ as f64;
        let base = -std::f64::consts::FRAC_PI_2;
        // CCW petals enter bottom-right and leave bottom-left; CW petals
        // the reverse. Sweeping the long way around encloses the center.
        let (th_in, th_out) = if ccw { (base + ang, base - ang) } else { (base - ang, base + ang) };
        let level = bus_y - m as f64 * dy;
        let entry = c + Vec2::from_angle(th_in) * r;
        nodes.push(Vec2::new(entry.x, level));
        nodes.push(entry);
        let sweep = 2.0 * std::f64::consts::PI - 2.0 * ang;
        let steps = 40;
        for k in 1..steps {
            let th = if ccw {
                th_in + sweep * k as f64 / steps as f64
            } else {
                th_in - sweep * k as f64 / steps as f64
            };
            nodes.push(c + Vec2::from_angle(th) * r);
        }
        let exit = c + Vec2::from_angle(th_out) * r;
        nodes.push(exit);
        let next_level = if m + 1 < m_letters { bus_y - (m + 1) as f64 * dy } else { bus_y };
        nodes.push(Vec2::new(exit.x, level));
        nodes.push(Vec2::new(exit.x, 0.5 * (level + next_level)));
    }

    Ok(nodes.into_iter().map(|p| rot.cmul(p)).collect())
}

/// A few rounds of spring smoothing plus short-range center repulsion, with
/// per-step motion clamped well below the local center clearance so the
/// class cannot change.
fn relax(loop_: &PeriodicLoop, sys: &CenterSystem, iters: usize) -> PeriodicLoop {
    let n = loop_.len();
    let mut nodes = loop_.nodes().to_vec();
    let repel_radius = 0.2 * if sys.len() > 1 { sys.min_spacing() } else { sys.scale() };
    for _ in 0..iters {
        let mut next = nodes.clone();
        for k in 0..n {
            let prev = nodes[(k + n - 1) % n];
            let here = nodes[k];
            let after = nodes[(k + 1) % n];
            let mut step = ((prev + after) * 0.5 - here) * 0.25;
            let mut clearance = f64::INFINITY;
            for &c in sys.positions() {
                let d = here - c;
                let dist = d.norm();
                clearance = clearance.min(dist);
                if dist < repel_radius && dist > 0.0 {
                    step += d * (0.3 * (repel_radius - dist) / dist);
                }
            }
            let cap = 0.25 * clearance;
            if step.norm() > cap {
                step = step * (cap / step.norm());
            }
            next[k] = here + step;
        }
        nodes = next;
    }
    PeriodicLoop::new(loop_.period(), nodes).expect("relaxation keeps the loop valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::circle_loop;
    use std::f64::consts::PI;

    fn two_centers() -> CenterSystem {
        CenterSystem::new(
            vec![1.0, 1.0],
            vec![Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn winding_examples() {
        let sys = two_centers();
        let around_first = circle_loop(Vec2::new(-0.5, 0.0), 0.3, 64, 2.0 * PI, 1);
        assert_eq!(winding_vector(&around_first, &sys).unwrap().0, vec![1, 0]);
        let cw = around_first.reversed();
        assert_eq!(winding_vector(&cw, &sys).unwrap().0, vec![-1, 0]);
        let big_twice = circle_loop(Vec2::ZERO, 3.0, 128, 2.0 * PI, 2);
        assert_eq!(winding_vector(&big_twice, &sys).unwrap().0, vec![2, 2]);
    }

    #[test]
    fn winding_refinement_and_shift_invariant() {
        let sys = two_centers();
        let lp = circle_loop(Vec2::ZERO, 2.0, 48, 2.0 * PI, 1);
        let w = winding_vector(&lp, &sys).unwrap();
        assert_eq!(winding_vector(&lp.refined(), &sys).unwrap(), w);
        assert_eq!(winding_vector(&lp.rotated(13), &sys).unwrap(), w);
    }

    #[test]
    fn winding_errors_on_center_hit() {
        let sys = CenterSystem::new(vec![1.0], vec![Vec2::ZERO], 1.0).unwrap();
        let lp = PeriodicLoop::new(
            1.0,
            vec![
                Vec2::new(-1.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(-1.0, 1.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            winding_vector(&lp, &sys),
            Err(TopologyError::SegmentThroughCenter { segment: 0, center: 0 })
        ));
    }

    #[test]
    fn reduce_word_examples() {
        assert!(HomotopyWord::reduce(&[1, -1]).is_trivial());
        assert_eq!(HomotopyWord::reduce(&[-2, 1, 2]).letters(), &[1]);
        assert_eq!(HomotopyWord::reduce(&[1, 2, -2, 1]).letters(), &[1, 1]);
        // Fixed point.
        let w = HomotopyWord::reduce(&[1, 2, -1]);
        assert_eq!(HomotopyWord::reduce(w.letters()), w);
    }

    #[test]
    fn word_parse_and_display() {
        let w = HomotopyWord::parse("a1 A2 a1").unwrap();
        assert_eq!(w.letters(), &[1, -2, 1]);
        assert_eq!(w.to_string(), "a1 A2 a1");
        assert!(HomotopyWord::parse("b2").is_err());
    }

    #[test]
    fn class_equality_is_cyclic() {
        let a = HomotopyWord::reduce(&[1, 2, -1, 3]);
        let b = HomotopyWord::reduce(&[-1, 3, 1, 2]);
        assert_eq!(a, b);
        assert_ne!(a, HomotopyWord::reduce(&[1, 2, 3]));
    }

    #[test]
    fn word_of_simple_circle() {
        let sys = two_centers();
        let lp = circle_loop(Vec2::new(-0.5, 0.0), 0.3, 64, 2.0 * PI, 1);
        assert_eq!(homotopy_word(&lp, &sys).unwrap().letters(), &[1]);
        let trivial = circle_loop(Vec2::new(0.0, 5.0), 0.5, 32, 2.0 * PI, 1);
        assert!(homotopy_word(&trivial, &sys).unwrap().is_trivial());
    }

    /// Independent ray tracer used as an oracle for the figure-eight word;
    /// horizontal rays to the right instead of the implementation's
    /// downward rays.
    fn word_by_right_rays(lp: &PeriodicLoop, sys: &CenterSystem) -> Vec<i32> {
        let n = lp.len();
        let mut hits: Vec<(f64, i32)> = Vec::new();
        for (j, &c) in sys.positions().iter().enumerate() {
            for k in 0..n {
                let p = lp.node(k);
                let q = lp.node(k + 1);
                // Crossing of y = c.y with x > c.x.
                if (p.y > c.y) != (q.y > c.y) {
                    let s = (c.y - p.y) / (q.y - p.y);
                    let x = p.x + s * (q.x - p.x);
                    if x > c.x {
                        let sign = if q.y > p.y { 1 } else { -1 };
                        hits.push((k as f64 + s, sign * (j as i32 + 1)));
                    }
                }
            }
        }
        hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        hits.into_iter().map(|h| h.1).collect()
    }

    #[test]
    fn word_of_figure_eight() {
        // Figure-eight: CCW lobe around the first center, CW lobe around
        // the second.
        let sys = two_centers();
        let n = 64;
        let nodes: Vec<Vec2> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Vec2::new(0.9 * t.sin(), 0.45 * (2.0 * t).sin())
            })
            .collect();
        let lp = PeriodicLoop::new(2.0 * PI, nodes).unwrap();
        let got = homotopy_word(&lp, &sys).unwrap();

        let oracle = HomotopyWord::reduce(&word_by_right_rays(&lp, &sys));
        assert_eq!(got, oracle);
        // One lobe positive around one center, negative around the other.
        let mut sorted = got.letters().to_vec();
        sorted.sort();
        assert!(sorted == vec![-2, 1] || sorted == vec![-1, 2], "got {got}");
    }

    #[test]
    fn abelianization_matches_winding_on_random_loops() {
        use rand::{Rng, SeedableRng};
        let sys = two_centers();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut done = 0;
        while done < 200 {
            let n = 48;
            let cx = rng.gen_range(-1.0..1.0);
            let cy = rng.gen_range(-1.0..1.0);
            let r0 = rng.gen_range(0.3..2.2);
            let wob = rng.gen_range(0.0..0.45);
            let ph = rng.gen_range(0.0..PI);
            let lobes = rng.gen_range(1..5);
            let nodes: Vec<Vec2> = (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    let r = r0 * (1.0 + wob * (lobes as f64 * t + ph).sin());
                    Vec2::new(cx, cy) + Vec2::from_angle(t) * r
                })
                .collect();
            let lp = PeriodicLoop::new(2.0 * PI, nodes).unwrap();
            if !lp.is_collision_free(&sys) {
                continue;
            }
            let (Ok(w), Ok(word)) = (winding_vector(&lp, &sys), homotopy_word(&lp, &sys)) else {
                continue;
            };
            assert_eq!(w, word.abelianization(sys.len()), "loop {done}");
            done += 1;
        }
    }

    #[test]
    fn representative_spells_its_word() {
        let sys = two_centers();
        for text in ["a1 a2", "a1", "a1 A2", "a1 a2 a1"] {
            let w = HomotopyWord::parse(text).unwrap();
            let rep = class_representative(&w, &sys, 0).unwrap();
            assert_eq!(homotopy_word(&rep, &sys).unwrap(), w, "word {text}");
            assert!(rep.is_collision_free(&sys));
        }
    }

    #[test]
    fn admissibility_fixture_triple() {
        let sys = two_centers();
        let cases = [("a1 a2", true), ("a1", false), ("a1 A2", false)];
        for (text, expect) in cases {
            let w = HomotopyWord::parse(text).unwrap();
            let verdict = is_admissible(&w, &sys, true).unwrap();
            assert_eq!(verdict.admissible, expect, "word {text}");
            if !expect {
                let witness = verdict.witness.expect("witness for inadmissible class");
                assert!(witness.enclosed_centers.len() < 2);
            }
        }
        assert!(matches!(
            is_admissible(&HomotopyWord::reduce(&[]), &sys, false),
            Err(TopologyError::TrivialWord)
        ));
    }
}
