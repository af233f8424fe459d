//! Incidence layer: the fixed circles traced by side-line intersections,
//! their concurrency points, and the reports for the named special
//! configurations (three and four touching circles, the extended Steiner
//! quadrilateral).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{self, Chain, ChainError, PivotChoice, Trace};
use crate::geom::{
    circumcircle, fit_circle, intersect_circles, intersect_lines, Circle, CircleRelation,
    GeomError, Line, Point, Tolerance,
};

#[derive(Debug, Error)]
pub enum IncidenceError {
    #[error("chain does not close, no fixed circles exist")]
    NotClosing,
    #[error("need at least {needed} starts, got {got}")]
    TooFewStarts { needed: usize, got: usize },
    #[error("expected a chain of {expected} touching circles")]
    NotTouching { expected: usize },
    #[error("contact points are not concyclic (defect {defect:.3e})")]
    ContactsNotConcyclic { defect: f64 },
    #[error("degenerate line configuration: {0}")]
    DegenerateLines(&'static str),
    #[error("start {start}: {source}")]
    Start { start: usize, source: ChainError },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Fitted circle for one pair of side lines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCircle {
    pub j: usize,
    pub k: usize,
    pub samples: Vec<Point>,
    pub circle: Circle,
    pub residual: f64,
}

/// Concurrency point of the three pair circles of a triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleConcurrency {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub point: Point,
    /// Maximum pairwise distance of the three intersection candidates.
    pub spread: f64,
}

/// Result of sweeping side-line intersections over many starting points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LighthouseReport {
    pub starts: usize,
    pub pivots: Vec<Point>,
    pub pairs: Vec<PairCircle>,
    pub triples: Vec<TripleConcurrency>,
    /// Pairs whose side lines were parallel or unfittable; absent data, not
    /// an error.
    pub omitted_pairs: Vec<(usize, usize)>,
}

/// Report for the three- and four-touching-circle configurations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TouchingReport {
    Three {
        x135: Point,
        x246: Point,
        base_circle: Circle,
        /// Worst |dot| of the direction pairs (l_i, l_{i+3}).
        orthogonality_defects: [f64; 3],
        /// Worst distance of the midpoint of x135 x246 from the base center.
        midpoint_defect: f64,
        /// Worst distance of x135 and x246 from the base circle.
        membership_defects: [f64; 2],
    },
    Four {
        x13: Point,
        x24: Point,
        base_circle: Circle,
        membership_defects: [f64; 2],
    },
}

/// Everything the extended Steiner quadrilateral theorem asserts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteinerReport {
    pub steiner_point: Point,
    pub p_point: Point,
    pub q_point: Point,
    pub circumcircles: [Circle; 4],
    pub circle_c13: Circle,
    pub circle_c24: Circle,
    pub circle_c: Circle,
    pub circle_d: Circle,
    /// Distances of P from line X1 X3 and of Q from line X2 X4.
    pub collinearity_defects: [f64; 2],
    /// Named membership defects, each a distance from the relevant circle:
    /// S on C1..C4, X13 on C13, X24 on C24, X on C, X4 and S on D.
    pub membership_defects: Vec<(String, f64)>,
}

/// Tangency test between two circles with the measured defect.
pub fn tangency_probe(c1: &Circle, c2: &Circle, tol: &Tolerance) -> (bool, f64) {
    let d = c1.center.dist(c2.center);
    let defect = (d - (c1.radius + c2.radius))
        .abs()
        .min((d - (c1.radius - c2.radius).abs()).abs());
    (defect <= tol.eps(), defect)
}

/// Deterministic well-spread start angle for index `s`.
pub fn start_angle(s: usize) -> f64 {
    const GOLDEN: f64 = 0.618033988749895;
    std::f64::consts::TAU * ((GOLDEN * s as f64 + 0.1234).fract())
}

/// Intersections of all side-line pairs of one trace. Parallel pairs are
/// omitted.
pub fn side_line_intersections(
    trace: &Trace,
    tol: &Tolerance,
) -> BTreeMap<(usize, usize), Point> {
    let mut out = BTreeMap::new();
    let lines = &trace.side_lines;
    for j in 0..lines.len() {
        for k in j + 1..lines.len() {
            if let Ok(p) = intersect_lines(&lines[j], &lines[k], tol) {
                out.insert((j, k), p);
            }
        }
    }
    out
}

/// Second common point of two circles besides `shared`.
fn other_common_point(
    c1: &Circle,
    c2: &Circle,
    shared: Point,
    tol: &Tolerance,
) -> Option<Point> {
    match intersect_circles(c1, c2, tol) {
        CircleRelation::Tangent(p) => Some(p),
        CircleRelation::Intersecting(a, b) => {
            if shared.dist(a) >= shared.dist(b) {
                Some(a)
            } else {
                Some(b)
            }
        }
        _ => None,
    }
}

/// Sweep the chain from many starting points and fit, for every pair of
/// side lines, the fixed circle their intersection traces. Also extracts
/// the concurrency point of every circle triple.
///
/// Samples coinciding with a pivot carry no fit information and are
/// skipped. If any pair has all its samples in one half-plane of its pivot
/// chord, the start set is widened so both proof cases are exercised.
pub fn lighthouse_sweep(
    chain: &Chain,
    starts: usize,
    tol: &Tolerance,
) -> Result<LighthouseReport, IncidenceError> {
    if starts < 5 {
        return Err(IncidenceError::TooFewStarts {
            needed: 5,
            got: starts,
        });
    }
    if !chain::is_closing(chain, tol)? {
        return Err(IncidenceError::NotClosing);
    }
    let pivots = chain.resolved_pivots(tol)?;
    let n = chain.joint_count();

    let mut count = starts;
    for attempt in 0..3 {
        let mut samples: BTreeMap<(usize, usize), Vec<Point>> = BTreeMap::new();
        for s in 0..count {
            let start = chain.circles[0].point_at(start_angle(s));
            let trace = chain::iterate(chain, start, 1, None, tol)
                .map_err(|source| IncidenceError::Start { start: s, source })?;
            for ((j, k), p) in side_line_intersections(&trace, tol) {
                let near_pivot = pivots.iter().any(|a| a.dist(p) <= 10.0 * tol.eps());
                if !near_pivot {
                    samples.entry((j, k)).or_default().push(p);
                }
            }
        }
        // Both half-planes of the pivot chord should be represented.
        let one_sided = samples.iter().any(|(&(j, k), pts)| {
            let chord = pivots[k] - pivots[j];
            if chord.norm() <= tol.eps() {
                return false;
            }
            let sides: Vec<f64> = pts
                .iter()
                .map(|p| chord.cross(*p - pivots[j]))
                .filter(|s| s.abs() > tol.eps())
                .collect();
            sides.len() >= 2
                && (sides.iter().all(|&s| s > 0.0) || sides.iter().all(|&s| s < 0.0))
        });
        if one_sided && attempt < 2 {
            count *= 2;
            continue;
        }

        let mut pairs = Vec::new();
        let mut omitted = Vec::new();
        let mut fitted: BTreeMap<(usize, usize), Circle> = BTreeMap::new();
        for j in 0..n {
            for k in j + 1..n {
                let pts = samples.get(&(j, k)).cloned().unwrap_or_default();
                if pts.is_empty() {
                    omitted.push((j, k));
                    continue;
                }
                let mut fit_points = pts.clone();
                fit_points.push(pivots[j]);
                fit_points.push(pivots[k]);
                match fit_circle(&fit_points, tol) {
                    Ok((circle, residual)) => {
                        fitted.insert((j, k), circle);
                        pairs.push(PairCircle {
                            j,
                            k,
                            samples: pts,
                            circle,
                            residual,
                        });
                    }
                    Err(_) => omitted.push((j, k)),
                }
            }
        }

        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (Some(c_ij), Some(c_jk), Some(c_ki)) = (
                        fitted.get(&(i, j)),
                        fitted.get(&(j, k)),
                        fitted.get(&(i, k)),
                    ) else {
                        continue;
                    };
                    let cands = [
                        other_common_point(c_ij, c_jk, pivots[j], tol),
                        other_common_point(c_jk, c_ki, pivots[k], tol),
                        other_common_point(c_ki, c_ij, pivots[i], tol),
                    ];
                    let pts: Vec<Point> = cands.into_iter().flatten().collect();
                    if pts.len() < 2 {
                        continue;
                    }
                    let mut spread = 0.0_f64;
                    for a in 0..pts.len() {
                        for b in a + 1..pts.len() {
                            spread = spread.max(pts[a].dist(pts[b]));
                        }
                    }
                    triples.push(TripleConcurrency {
                        i,
                        j,
                        k,
                        point: pts[0],
                        spread,
                    });
                }
            }
        }
        return Ok(LighthouseReport {
            starts: count,
            pivots,
            pairs,
            triples,
            omitted_pairs: omitted,
        });
    }
    unreachable!("loop always returns on the last attempt")
}

fn require_all_tangent(chain: &Chain, n: usize, tol: &Tolerance) -> Result<(), IncidenceError> {
    if chain.circles.len() != n || !chain.closed {
        return Err(IncidenceError::NotTouching { expected: n });
    }
    for i in 0..n {
        let (a, b) = chain.joint(i);
        if !matches!(intersect_circles(a, b, tol), CircleRelation::Tangent(_)) {
            return Err(IncidenceError::NotTouching { expected: n });
        }
    }
    Ok(())
}

/// Report for a closed chain of three touching circles, traversed twice.
///
/// The opposite side lines are orthogonal, the two triple intersections lie
/// on the circumcircle of the contact triangle, and their midpoint is its
/// center. All defects are worst-case over the given number of starts.
pub fn three_touching_report(
    chain: &Chain,
    starts: usize,
    tol: &Tolerance,
) -> Result<TouchingReport, IncidenceError> {
    require_all_tangent(chain, 3, tol)?;
    let contacts = chain.resolved_pivots(tol)?;
    let base_circle = circumcircle(contacts[0], contacts[1], contacts[2], tol)?;

    let mut ortho = [0.0_f64; 3];
    let mut midpoint_defect = 0.0_f64;
    let mut membership = [0.0_f64; 2];
    let mut first_points: Option<(Point, Point)> = None;
    for s in 0..starts.max(1) {
        let start = chain.circles[0].point_at(start_angle(s));
        let trace = chain::iterate(chain, start, 2, None, tol)
            .map_err(|source| IncidenceError::Start { start: s, source })?;
        let lines = &trace.side_lines;
        for i in 0..3 {
            ortho[i] = ortho[i].max(lines[i].direction.dot(lines[i + 3].direction).abs());
        }
        let x135 = intersect_lines(&lines[0], &lines[2], tol)
            .map_err(|_| IncidenceError::DegenerateLines("l1 parallel to l3"))?;
        let x246 = intersect_lines(&lines[1], &lines[3], tol)
            .map_err(|_| IncidenceError::DegenerateLines("l2 parallel to l4"))?;
        midpoint_defect =
            midpoint_defect.max(x135.midpoint(x246).dist(base_circle.center));
        membership[0] = membership[0].max(base_circle.signed_dist(x135).abs());
        membership[1] = membership[1].max(base_circle.signed_dist(x246).abs());
        first_points.get_or_insert((x135, x246));
    }
    let (x135, x246) = first_points.unwrap();
    Ok(TouchingReport::Three {
        x135,
        x246,
        base_circle,
        orthogonality_defects: ortho,
        midpoint_defect,
        membership_defects: membership,
    })
}

/// Report for a closed chain of four touching circles: the contact points
/// are concyclic and both diagonal side-line intersections stay on that
/// circle.
pub fn four_touching_report(
    chain: &Chain,
    starts: usize,
    tol: &Tolerance,
) -> Result<TouchingReport, IncidenceError> {
    require_all_tangent(chain, 4, tol)?;
    let contacts = chain.resolved_pivots(tol)?;
    let base_circle = circumcircle(contacts[0], contacts[1], contacts[2], tol)?;
    let concyclicity = base_circle.signed_dist(contacts[3]).abs();
    if concyclicity > 1e3 * tol.eps() {
        return Err(IncidenceError::ContactsNotConcyclic {
            defect: concyclicity,
        });
    }

    let mut membership = [0.0_f64; 2];
    let mut first_points: Option<(Point, Point)> = None;
    for s in 0..starts.max(1) {
        let start = chain.circles[0].point_at(start_angle(s));
        let trace = chain::iterate(chain, start, 1, None, tol)
            .map_err(|source| IncidenceError::Start { start: s, source })?;
        let lines = &trace.side_lines;
        let x13 = intersect_lines(&lines[0], &lines[2], tol)
            .map_err(|_| IncidenceError::DegenerateLines("l1 parallel to l3"))?;
        let x24 = intersect_lines(&lines[1], &lines[3], tol)
            .map_err(|_| IncidenceError::DegenerateLines("l2 parallel to l4"))?;
        membership[0] = membership[0].max(base_circle.signed_dist(x13).abs());
        membership[1] = membership[1].max(base_circle.signed_dist(x24).abs());
        first_points.get_or_insert((x13, x24));
    }
    let (x13, x24) = first_points.unwrap();
    Ok(TouchingReport::Four {
        x13,
        x24,
        base_circle,
        membership_defects: membership,
    })
}

/// The vertices, diagonal points and circumcircles of a complete
/// quadrilateral, with the pivot chain they induce.
pub struct SteinerFrame {
    /// A_i = intersection of l_i and l_{i+1}, cyclically.
    pub vertices: [Point; 4],
    pub p_point: Point,
    pub q_point: Point,
    pub circumcircles: [Circle; 4],
    pub steiner_point: Point,
    pub chain: Chain,
}

/// Build the circumcircle frame of four lines in general position.
pub fn steiner_frame(lines: &[Line; 4], tol: &Tolerance) -> Result<SteinerFrame, IncidenceError> {
    let meet = |i: usize, j: usize| {
        intersect_lines(&lines[i], &lines[j], tol)
            .map_err(|_| IncidenceError::DegenerateLines("two lines are parallel"))
    };
    let vertices = [meet(0, 1)?, meet(1, 2)?, meet(2, 3)?, meet(3, 0)?];
    let p_point = meet(1, 3)?;
    let q_point = meet(0, 2)?;
    // C_i is the circumcircle of the triangle cut out by dropping l_{i+2};
    // its vertices are A_{i-1}, A_i and the diagonal point P or Q.
    let diag = [p_point, q_point, p_point, q_point];
    let mut circumcircles = [Circle::new(Point::new(0.0, 0.0), 1.0); 4];
    for i in 0..4 {
        circumcircles[i] = circumcircle(vertices[(i + 3) % 4], vertices[i], diag[i], tol)
            .map_err(|_| IncidenceError::DegenerateLines("three lines are concurrent"))?;
    }
    let candidates = match intersect_circles(&circumcircles[0], &circumcircles[2], tol) {
        CircleRelation::Intersecting(a, b) => vec![a, b],
        CircleRelation::Tangent(p) => vec![p],
        _ => {
            return Err(IncidenceError::DegenerateLines(
                "circumcircles C1 and C3 do not meet",
            ))
        }
    };
    let steiner_point = candidates
        .into_iter()
        .min_by(|a, b| {
            let da = circumcircles[1].signed_dist(*a).abs() + circumcircles[3].signed_dist(*a).abs();
            let db = circumcircles[1].signed_dist(*b).abs() + circumcircles[3].signed_dist(*b).abs();
            da.total_cmp(&db)
        })
        .unwrap();
    let chain = Chain::closed(
        circumcircles.to_vec(),
        vertices.iter().map(|p| PivotChoice::Explicit(*p)).collect(),
    );
    Ok(SteinerFrame {
        vertices,
        p_point,
        q_point,
        circumcircles,
        steiner_point,
        chain,
    })
}

/// Verify every claim of the extended Steiner quadrilateral theorem for one
/// starting point on C_1.
pub fn steiner_report(
    lines: &[Line; 4],
    start: Point,
    tol: &Tolerance,
) -> Result<SteinerReport, IncidenceError> {
    let frame = steiner_frame(lines, tol)?;
    let s = frame.steiner_point;
    let a = frame.vertices;
    let trace = chain::iterate(&frame.chain, start, 1, None, tol)?;
    let x = &trace.vertices;
    let lines_l = &trace.side_lines;

    let x13 = intersect_lines(&lines_l[0], &lines_l[2], tol)
        .map_err(|_| IncidenceError::DegenerateLines("side lines 1 and 3 are parallel"))?;
    let x24 = intersect_lines(&lines_l[1], &lines_l[3], tol)
        .map_err(|_| IncidenceError::DegenerateLines("side lines 2 and 4 are parallel"))?;
    let circle_c13 = circumcircle(a[0], a[2], s, tol)?;
    let circle_c24 = circumcircle(a[1], a[3], s, tol)?;
    let circle_c = circumcircle(frame.p_point, frame.q_point, s, tol)?;
    let circle_d = circumcircle(x[0], x[1], x[2], tol)?;

    let diag13 = Line::through(x[0], x[2])?;
    let diag24 = Line::through(x[1], x[3])?;
    let diag_meet = intersect_lines(&diag13, &diag24, tol)
        .map_err(|_| IncidenceError::DegenerateLines("diagonals are parallel"))?;

    let mut membership_defects = Vec::new();
    for (i, c) in frame.circumcircles.iter().enumerate() {
        membership_defects.push((format!("S on C{}", i + 1), c.signed_dist(s).abs()));
    }
    membership_defects.push(("X13 on C13".into(), circle_c13.signed_dist(x13).abs()));
    membership_defects.push(("X24 on C24".into(), circle_c24.signed_dist(x24).abs()));
    membership_defects.push(("X on C".into(), circle_c.signed_dist(diag_meet).abs()));
    membership_defects.push(("X4 on D".into(), circle_d.signed_dist(x[3]).abs()));
    membership_defects.push(("S on D".into(), circle_d.signed_dist(s).abs()));

    let collinearity_defects = [diag13.dist(frame.p_point), diag24.dist(frame.q_point)];

    Ok(SteinerReport {
        steiner_point: s,
        p_point: frame.p_point,
        q_point: frame.q_point,
        circumcircles: frame.circumcircles,
        circle_c13,
        circle_c24,
        circle_c,
        circle_d,
        collinearity_defects,
        membership_defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_touching() -> Chain {
        // Unit circles at an equilateral triangle of side 2 touch pairwise
        // at the edge midpoints.
        let h = 3.0_f64.sqrt();
        let centers = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, h),
        ];
        Chain::closed(
            centers.map(|c| Circle::new(c, 1.0)).to_vec(),
            vec![PivotChoice::A; 3],
        )
    }

    #[test]
    fn tangency_probe_examples() {
        let tol = Tolerance::new(1e-9, 5.0);
        let (t, d) = tangency_probe(
            &Circle::new(Point::new(0.0, 0.0), 1.0),
            &Circle::new(Point::new(3.0, 0.0), 2.0),
            &tol,
        );
        assert!(t && d < 1e-12);
        let (t, d) = tangency_probe(
            &Circle::new(Point::new(0.0, 0.0), 2.0),
            &Circle::new(Point::new(1.0, 0.0), 1.0),
            &tol,
        );
        assert!(t && d < 1e-12);
        let (t, _) = tangency_probe(
            &Circle::new(Point::new(0.0, 0.0), 1.0),
            &Circle::new(Point::new(3.0, 0.0), 1.0),
            &tol,
        );
        assert!(!t);
    }

    #[test]
    fn three_touching_corollary() {
        let chain = three_touching();
        let tol = chain.tolerance();
        let report = three_touching_report(&chain, 12, &tol).unwrap();
        let TouchingReport::Three {
            base_circle,
            orthogonality_defects,
            midpoint_defect,
            membership_defects,
            ..
        } = report
        else {
            panic!("expected three-touching report");
        };
        // Contacts are the edge midpoints (1,0), (1.5, h/2), (0.5, h/2);
        // their circumcircle is centered at the triangle centroid.
        let h = 3.0_f64.sqrt();
        assert!(base_circle.center.dist(Point::new(1.0, h / 3.0)) < 1e-12);
        let eps = 1e-9 * tol.scene_scale;
        for d in orthogonality_defects {
            assert!(d <= 1e-9, "orthogonality defect {d:.3e}");
        }
        assert!(midpoint_defect <= eps, "midpoint defect {midpoint_defect:.3e}");
        for d in membership_defects {
            assert!(d <= eps, "membership defect {d:.3e}");
        }
    }

    #[test]
    fn four_touching_corollary() {
        let centers = [
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
        ];
        let chain = Chain::closed(
            centers.map(|c| Circle::new(c, 1.0)).to_vec(),
            vec![PivotChoice::A; 4],
        );
        let tol = chain.tolerance();
        let report = four_touching_report(&chain, 10, &tol).unwrap();
        let TouchingReport::Four {
            base_circle,
            membership_defects,
            ..
        } = report
        else {
            panic!("expected four-touching report");
        };
        assert!(base_circle.center.dist(Point::new(0.0, 0.0)) < 1e-12);
        assert!((base_circle.radius - 1.0).abs() < 1e-12);
        for d in membership_defects {
            assert!(d <= 1e-9 * tol.scene_scale, "membership defect {d:.3e}");
        }
    }

    #[test]
    fn three_touching_pairs_meet_at_pivots() {
        // Pairs (1,4), (2,5), (3,6) of the doubled traversal meet in the
        // contact points themselves.
        let chain = three_touching();
        let tol = chain.tolerance();
        let pivots = chain.resolved_pivots(&tol).unwrap();
        let start = chain.circles[0].point_at(0.9);
        let trace = chain::iterate(&chain, start, 2, None, &tol).unwrap();
        let meets = side_line_intersections(&trace, &tol);
        for (i, pivot) in pivots.iter().enumerate() {
            let p = meets[&(i, i + 3)];
            assert!(p.dist(*pivot) <= 1e-9 * tol.scene_scale);
        }
    }

    #[test]
    fn miquel_chain_lighthouse_circles_are_concurrent() {
        let chain = crate::scenes::gen_common_point(3, 6).unwrap();
        let tol = chain.tolerance();
        let report = lighthouse_sweep(&chain, 12, &tol).unwrap();
        assert_eq!(report.pairs.len(), 3);
        for triple in &report.triples {
            assert!(
                triple.spread <= 1e-8 * tol.scene_scale,
                "spread {:.3e}",
                triple.spread
            );
        }
    }

    #[test]
    fn ab_three_chain_pair_circles_coincide_and_touch() {
        // A 3-chain traversed once through the A pivots and once through
        // the B pivots closes, and its six side lines produce pair circles
        // with C_24 = C_46 = C_62 and C_13 = C_35 = C_51, while C_14, C_25
        // and C_36 touch both of those.
        let base = crate::scenes::gen_generic_chain(3, 4).unwrap();
        let tol = base.tolerance();
        let a = base.resolved_pivots(&tol).unwrap();
        let mut pivots: Vec<PivotChoice> =
            a.iter().map(|p| PivotChoice::Explicit(*p)).collect();
        for i in 0..3 {
            let (c1, c2) = base.joint(i);
            let b = chain::companion_pivot(c1, c2, a[i], &tol).unwrap();
            pivots.push(PivotChoice::Explicit(b));
        }
        let mut circles = base.circles.clone();
        circles.extend(base.circles.iter().copied());
        let ab = Chain::closed(circles, pivots);
        assert!(chain::is_closing(&ab, &tol).unwrap());

        let report = lighthouse_sweep(&ab, 16, &tol).unwrap();
        let get = |j: usize, k: usize| {
            report
                .pairs
                .iter()
                .find(|p| p.j == j && p.k == k)
                .unwrap_or_else(|| panic!("missing pair ({j},{k})"))
                .circle
        };
        let close = |x: Circle, y: Circle| {
            x.center.dist(y.center) <= 1e-7 * tol.scene_scale
                && (x.radius - y.radius).abs() <= 1e-7 * tol.scene_scale
        };
        let c246 = get(1, 3);
        assert!(close(c246, get(3, 5)));
        assert!(close(c246, get(1, 5)));
        let c135 = get(0, 2);
        assert!(close(c135, get(2, 4)));
        assert!(close(c135, get(0, 4)));
        for bridge in [get(0, 3), get(1, 4), get(2, 5)] {
            for fixed in [c246, c135] {
                let (_, defect) = tangency_probe(&bridge, &fixed, &tol);
                assert!(
                    defect <= 1e-7 * tol.scene_scale,
                    "tangency defect {defect:.3e}"
                );
            }
        }
    }

    #[test]
    fn steiner_worked_example() {
        let lines = [
            Line::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap(),
            Line::new(Point::new(0.0, 0.0), Point::new(0.0, 1.0)).unwrap(),
            Line::through(Point::new(0.0, 1.0), Point::new(1.0, 0.0)).unwrap(),
            Line::through(Point::new(0.0, 0.3), Point::new(1.0, 2.3)).unwrap(),
        ];
        let tol = Tolerance::new(1e-9, 10.0);
        let frame = steiner_frame(&lines, &tol).unwrap();
        let start = frame.circumcircles[0].point_at(0.4);
        let report = steiner_report(&lines, start, &tol).unwrap();
        let eps = 1e-9 * tol.scene_scale;
        for (name, defect) in &report.membership_defects {
            assert!(*defect <= eps, "{name}: {defect:.3e}");
        }
        for d in report.collinearity_defects {
            assert!(d <= eps, "collinearity defect {d:.3e}");
        }
    }

    #[test]
    fn steiner_start_at_vertex_degenerates_gracefully() {
        let lines = [
            Line::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap(),
            Line::new(Point::new(0.0, 0.0), Point::new(0.0, 1.0)).unwrap(),
            Line::through(Point::new(0.0, 1.0), Point::new(1.0, 0.0)).unwrap(),
            Line::through(Point::new(0.0, 0.3), Point::new(1.0, 2.3)).unwrap(),
        ];
        let tol = Tolerance::new(1e-9, 10.0);
        let frame = steiner_frame(&lines, &tol).unwrap();
        let report = steiner_report(&lines, frame.vertices[0], &tol).unwrap();
        let eps = 1e-9 * tol.scene_scale;
        for d in report.collinearity_defects {
            assert!(d <= eps, "collinearity defect {d:.3e}");
        }
    }
}
