//! Pivot maps, transfer angles and the closing criterion for circle chains.
//!
//! The pivot map sends a point X on one circle to the second intersection of
//! the line through X and the pivot with the next circle; at X = pivot the
//! tangent line takes the chord's place. Composing the maps around a closed
//! chain is the identity exactly when the transfer angles sum to a multiple
//! of 2*pi, which is what [`transfer_report`] and [`is_closing`] decide.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    circumcircle, intersect_circles, normalize_angle, oriented_angle, second_intersection,
    tangent_line, Angle, Circle, CircleRelation, GeomError, Line, Point, Tolerance,
};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("chain needs at least 2 circles, got {0}")]
    TooShort(usize),
    #[error("pivot count {pivots} does not match joint count {joints}")]
    PivotCountMismatch { pivots: usize, joints: usize },
    #[error("joint {index}: circles are {relation}, no pivot exists")]
    BadJoint { index: usize, relation: &'static str },
    #[error("joint {index}: explicit pivot is not on both circles")]
    PivotOffCircle { index: usize },
    #[error("point is not on the expected circle")]
    OffCircle,
    #[error("concyclic anchor lies on a joint circle")]
    AnchorOnCircle,
    #[error("step {step}: {source}")]
    Step { step: usize, source: GeomError },
    #[error("operation requires a closed chain")]
    NotClosed,
    #[error("operation requires an open chain")]
    NotOpen,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Which of the two common points of a joint acts as the pivot.
///
/// `A` is the intersection on the left of the directed center line from the
/// first to the second circle, `B` the one on the right. For touching
/// circles both resolve to the contact point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PivotChoice {
    A,
    B,
    Explicit(Point),
}

/// An ordered chain of circles with per-joint pivot selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub circles: Vec<Circle>,
    pub pivots: Vec<PivotChoice>,
    pub closed: bool,
}

/// Per-joint central angles and the transfer angle derived from them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JointAngles {
    pub delta: Angle,
    pub gamma: Angle,
    pub mu: Angle,
}

/// Transfer angles of a closed chain with the unnormalized total.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferReport {
    pub joints: Vec<JointAngles>,
    /// Exact sum of the per-joint transfer angles, not normalized.
    pub total: f64,
    /// Integer k minimizing |total - 2*pi*k|.
    pub winding: i64,
    /// total - 2*pi*winding, in (-pi, pi].
    pub closing_defect: f64,
}

/// The polygon produced by iterating the pivot maps around a chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trace {
    pub vertices: Vec<Point>,
    pub side_lines: Vec<Line>,
    pub rounds: usize,
}

impl Chain {
    pub fn closed(circles: Vec<Circle>, pivots: Vec<PivotChoice>) -> Self {
        Chain {
            circles,
            pivots,
            closed: true,
        }
    }

    pub fn open(circles: Vec<Circle>, pivots: Vec<PivotChoice>) -> Self {
        Chain {
            circles,
            pivots,
            closed: false,
        }
    }

    pub fn joint_count(&self) -> usize {
        if self.closed {
            self.circles.len()
        } else {
            self.circles.len().saturating_sub(1)
        }
    }

    /// Circle pair of joint `index` (cyclic for closed chains).
    pub fn joint(&self, index: usize) -> (&Circle, &Circle) {
        let n = self.circles.len();
        (&self.circles[index % n], &self.circles[(index + 1) % n])
    }

    /// Tolerance scaled to this chain's bounding box.
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::for_circles(&self.circles)
    }

    pub fn tolerance_with_rel(&self, rel: f64) -> Tolerance {
        Tolerance::with_rel(&self.circles, rel)
    }

    /// Check the chain invariants: every joint intersects or touches and
    /// every pivot resolves to a point on both of its circles.
    pub fn validate(&self, tol: &Tolerance) -> Result<(), ChainError> {
        if self.circles.len() < 2 {
            return Err(ChainError::TooShort(self.circles.len()));
        }
        if self.pivots.len() != self.joint_count() {
            return Err(ChainError::PivotCountMismatch {
                pivots: self.pivots.len(),
                joints: self.joint_count(),
            });
        }
        for i in 0..self.joint_count() {
            let (c_from, c_to) = self.joint(i);
            resolve_pivot(c_from, c_to, self.pivots[i], tol)
                .map_err(|e| annotate_joint(e, i))?;
        }
        Ok(())
    }

    /// Resolved pivot points of all joints, in joint order.
    pub fn resolved_pivots(&self, tol: &Tolerance) -> Result<Vec<Point>, ChainError> {
        (0..self.joint_count())
            .map(|i| {
                let (c_from, c_to) = self.joint(i);
                resolve_pivot(c_from, c_to, self.pivots[i], tol)
                    .map_err(|e| annotate_joint(e, i))
            })
            .collect()
    }

    /// The same chain with every pivot swapped for its companion point.
    pub fn flipped(&self, tol: &Tolerance) -> Result<Chain, ChainError> {
        let mut pivots = Vec::with_capacity(self.pivots.len());
        for i in 0..self.joint_count() {
            let (c_from, c_to) = self.joint(i);
            let flipped = match self.pivots[i] {
                PivotChoice::A => PivotChoice::B,
                PivotChoice::B => PivotChoice::A,
                PivotChoice::Explicit(p) => {
                    let other = companion_pivot(c_from, c_to, p, tol)
                        .map_err(|e| annotate_joint(e, i))?;
                    PivotChoice::Explicit(other)
                }
            };
            pivots.push(flipped);
        }
        Ok(Chain {
            circles: self.circles.clone(),
            pivots,
            closed: self.closed,
        })
    }
}

fn annotate_joint(err: ChainError, index: usize) -> ChainError {
    match err {
        ChainError::BadJoint { relation, .. } => ChainError::BadJoint { index, relation },
        ChainError::PivotOffCircle { .. } => ChainError::PivotOffCircle { index },
        other => other,
    }
}

/// Resolve a pivot choice on a joint to a concrete point.
pub fn resolve_pivot(
    c_from: &Circle,
    c_to: &Circle,
    choice: PivotChoice,
    tol: &Tolerance,
) -> Result<Point, ChainError> {
    let relation = intersect_circles(c_from, c_to, tol);
    let (a, b) = match relation {
        CircleRelation::Tangent(p) => (p, p),
        CircleRelation::Intersecting(a, b) => (a, b),
        CircleRelation::Disjoint => {
            return Err(ChainError::BadJoint {
                index: 0,
                relation: "disjoint",
            })
        }
        CircleRelation::Nested => {
            return Err(ChainError::BadJoint {
                index: 0,
                relation: "nested",
            })
        }
        CircleRelation::Coincident => {
            return Err(ChainError::BadJoint {
                index: 0,
                relation: "coincident",
            })
        }
    };
    match choice {
        PivotChoice::A => Ok(a),
        PivotChoice::B => Ok(b),
        PivotChoice::Explicit(p) => {
            if c_from.contains(p, tol) && c_to.contains(p, tol) {
                Ok(p)
            } else {
                Err(ChainError::PivotOffCircle { index: 0 })
            }
        }
    }
}

/// The other common point of a joint; equals `pivot` for touching circles.
pub fn companion_pivot(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    tol: &Tolerance,
) -> Result<Point, ChainError> {
    match intersect_circles(c_from, c_to, tol) {
        CircleRelation::Tangent(_) => Ok(pivot),
        CircleRelation::Intersecting(a, b) => {
            if pivot.dist(a) >= pivot.dist(b) {
                Ok(a)
            } else {
                Ok(b)
            }
        }
        _ => Err(ChainError::BadJoint {
            index: 0,
            relation: "no common point",
        }),
    }
}

fn check_pivot(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    tol: &Tolerance,
) -> Result<(), ChainError> {
    if c_from.contains(pivot, tol) && c_to.contains(pivot, tol) {
        Ok(())
    } else {
        Err(ChainError::PivotOffCircle { index: 0 })
    }
}

/// Apply the pivot map and also return the carrier line used, which doubles
/// as the polygon side even when the chord degenerates.
pub fn pivot_map_with_carrier(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    x: Point,
    tol: &Tolerance,
) -> Result<(Point, Line), ChainError> {
    check_pivot(c_from, c_to, pivot, tol)?;
    if !c_from.contains(x, tol) {
        return Err(ChainError::OffCircle);
    }
    let carrier = if x.dist(pivot) <= tol.eps() {
        tangent_line(c_from, pivot, tol)?
    } else {
        Line::new(pivot, pivot - x)?
    };
    let image = second_intersection(&carrier, c_to, pivot, tol)?;
    Ok((image, carrier))
}

/// The pivot map: X on `c_from` to the second intersection of the line
/// through X and `pivot` with `c_to`; the tangent line replaces the chord
/// when X coincides with the pivot.
pub fn pivot_map(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    x: Point,
    tol: &Tolerance,
) -> Result<Point, ChainError> {
    pivot_map_with_carrier(c_from, c_to, pivot, x, tol).map(|(p, _)| p)
}

/// Concyclic variant of the pivot map: the carrier through X and the pivot
/// is the circle through the fixed anchor point instead of a line.
pub fn pivot_map_concyclic(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    anchor: Point,
    x: Point,
    tol: &Tolerance,
) -> Result<Point, ChainError> {
    pivot_map_concyclic_with_carrier(c_from, c_to, pivot, anchor, x, tol).map(|(p, _)| p)
}

/// As [`pivot_map_concyclic`], additionally returning the chord direction of
/// the carrier at the pivot (the side line for degenerate steps).
pub fn pivot_map_concyclic_with_carrier(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    anchor: Point,
    x: Point,
    tol: &Tolerance,
) -> Result<(Point, Line), ChainError> {
    check_pivot(c_from, c_to, pivot, tol)?;
    if !c_from.contains(x, tol) {
        return Err(ChainError::OffCircle);
    }
    if c_from.contains(anchor, tol) || c_to.contains(anchor, tol) {
        return Err(ChainError::AnchorOnCircle);
    }
    let at_pivot = x.dist(pivot) <= tol.eps();
    let carrier = if at_pivot {
        tangent_carrier_circle(c_from, pivot, anchor, tol)?
    } else {
        let u = pivot - x;
        let v = anchor - x;
        if u.cross(v).abs() <= tol.rel * u.norm() * v.norm() {
            // X, pivot and anchor collinear: the carrier degenerates to the
            // line, which is the plain pivot map.
            None
        } else {
            Some(circumcircle(x, pivot, anchor, tol)?)
        }
    };
    match carrier {
        None => pivot_map_with_carrier(c_from, c_to, pivot, x, tol),
        Some(circle) => {
            let image = circle_second_intersection(&circle, c_to, pivot, tol)?;
            let chord = tangent_line(&circle, pivot, tol)?;
            Ok((image, chord))
        }
    }
}

/// Circle through `pivot` and `anchor` tangent to `c_from` at `pivot`, or
/// `None` when the anchor lies on that tangent line (line carrier).
fn tangent_carrier_circle(
    c_from: &Circle,
    pivot: Point,
    anchor: Point,
    tol: &Tolerance,
) -> Result<Option<Circle>, ChainError> {
    let radial = (pivot - c_from.center).normalized()?;
    let w = anchor - pivot;
    let along = radial.dot(w);
    if along.abs() <= tol.rel * w.norm() {
        return Ok(None);
    }
    // Center on the radial line through the pivot, equidistant from pivot
    // and anchor: s = |w|^2 / (2 radial . w).
    let s = w.norm_sq() / (2.0 * along);
    let center = pivot + radial * s;
    Ok(Some(Circle::new(center, s.abs())))
}

/// Second common point of two intersecting circles besides `known`.
fn circle_second_intersection(
    carrier: &Circle,
    target: &Circle,
    known: Point,
    tol: &Tolerance,
) -> Result<Point, ChainError> {
    match intersect_circles(carrier, target, tol) {
        CircleRelation::Tangent(p) => Ok(p),
        CircleRelation::Intersecting(a, b) => {
            if known.dist(a) >= known.dist(b) {
                Ok(a)
            } else {
                Ok(b)
            }
        }
        _ => Err(ChainError::BadJoint {
            index: 0,
            relation: "carrier misses target circle",
        }),
    }
}

/// Transfer angle from the definition: rotate a probe point a quarter turn
/// away from the pivot, apply the map, and compare radial directions.
pub fn transfer_angle_measured(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    tol: &Tolerance,
) -> Result<Angle, ChainError> {
    transfer_angle_probed(c_from, c_to, pivot, PI / 2.0, tol)
}

/// As [`transfer_angle_measured`] with an arbitrary probe offset from the
/// pivot's polar angle. The result must not depend on the offset.
pub fn transfer_angle_probed(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    probe_offset: f64,
    tol: &Tolerance,
) -> Result<Angle, ChainError> {
    let pivot_angle = (pivot - c_from.center).polar_angle();
    let x = c_from.point_at(pivot_angle + probe_offset);
    let y = pivot_map(c_from, c_to, pivot, x, tol)?;
    Ok(oriented_angle(x - c_from.center, y - c_to.center)?)
}

/// Transfer angle from the central angles: mu = pi - (delta + gamma) / 2.
///
/// The half-angle sum determines mu only up to pi; the radial-angle
/// difference of the pivot about the two centers selects the branch.
pub fn transfer_angle_formula(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    tol: &Tolerance,
) -> Result<JointAngles, ChainError> {
    check_pivot(c_from, c_to, pivot, tol)?;
    let other = companion_pivot(c_from, c_to, pivot, tol)?;
    let delta = if other.dist(pivot) <= tol.eps() {
        Angle::new(0.0)
    } else {
        oriented_angle(pivot - c_from.center, other - c_from.center)?
    };
    let gamma = if other.dist(pivot) <= tol.eps() {
        Angle::new(0.0)
    } else {
        oriented_angle(other - c_to.center, pivot - c_to.center)?
    };
    let raw = PI - 0.5 * (delta.radians() + gamma.radians());
    let direct = oriented_angle(pivot - c_to.center, pivot - c_from.center)?.radians();
    let c1 = normalize_angle(raw);
    let c2 = normalize_angle(raw + PI);
    let mu = if normalize_angle(c1 - direct).abs() <= normalize_angle(c2 - direct).abs() {
        c1
    } else {
        c2
    };
    Ok(JointAngles {
        delta,
        gamma,
        mu: Angle::new(mu),
    })
}

/// Transfer angle as the oriented angle between the two tangents at the
/// pivot: the tangent to `c_to` directed out of `c_from` against the tangent
/// to `c_from` directed into `c_to`.
///
/// When a tangent is also tangent to the other circle the orientation rule
/// degenerates and the probe-based route takes over.
pub fn transfer_angle_tangent(
    c_from: &Circle,
    c_to: &Circle,
    pivot: Point,
    tol: &Tolerance,
) -> Result<Angle, ChainError> {
    check_pivot(c_from, c_to, pivot, tol)?;
    let t1 = tangent_line(c_from, pivot, tol)?;
    let t2 = tangent_line(c_to, pivot, tol)?;
    let into_target = t1.direction.dot(pivot - c_to.center);
    let out_of_source = t2.direction.dot(pivot - c_from.center);
    if into_target.abs() <= tol.eps() || out_of_source.abs() <= tol.eps() {
        return transfer_angle_measured(c_from, c_to, pivot, tol);
    }
    // A small step along t1 must decrease the distance to M2, so the
    // direction must point against the radial vector pivot - M2.
    let d1 = if into_target < 0.0 {
        t1.direction
    } else {
        -t1.direction
    };
    let d2 = if out_of_source > 0.0 {
        t2.direction
    } else {
        -t2.direction
    };
    Ok(oriented_angle(d2, d1)?)
}

/// Per-joint transfer angles of a closed chain, with the accumulated total,
/// its winding number and the closing defect.
pub fn transfer_report(chain: &Chain, tol: &Tolerance) -> Result<TransferReport, ChainError> {
    if !chain.closed {
        return Err(ChainError::NotClosed);
    }
    chain.validate(tol)?;
    let mut joints = Vec::with_capacity(chain.joint_count());
    let mut total = 0.0;
    for i in 0..chain.joint_count() {
        let (c_from, c_to) = chain.joint(i);
        let pivot = resolve_pivot(c_from, c_to, chain.pivots[i], tol)
            .map_err(|e| annotate_joint(e, i))?;
        let angles =
            transfer_angle_formula(c_from, c_to, pivot, tol).map_err(|e| annotate_joint(e, i))?;
        total += angles.mu.radians();
        joints.push(angles);
    }
    // Ties at half-integer multiples of 2*pi resolve to the smaller winding,
    // keeping the defect in (-pi, pi] with +pi for the odd touching case.
    let winding = (total / (2.0 * PI) - 0.5).ceil() as i64;
    let closing_defect = total - 2.0 * PI * winding as f64;
    Ok(TransferReport {
        joints,
        total,
        winding,
        closing_defect,
    })
}

/// Whether the chain's composite pivot map is the identity, decided by the
/// closing defect with a tolerance scaling with the joint count.
pub fn is_closing(chain: &Chain, tol: &Tolerance) -> Result<bool, ChainError> {
    let report = transfer_report(chain, tol)?;
    Ok(report.closing_defect.abs() <= chain.joint_count() as f64 * tol.rel)
}

/// Iterate the pivot maps from `start`, producing the polygon vertices and
/// side lines. With an anchor every step uses the concyclic map.
pub fn iterate(
    chain: &Chain,
    start: Point,
    rounds: usize,
    concyclic_anchor: Option<Point>,
    tol: &Tolerance,
) -> Result<Trace, ChainError> {
    assert!(rounds >= 1);
    if !chain.closed && rounds != 1 {
        return Err(ChainError::NotClosed);
    }
    if !chain.circles[0].contains(start, tol) {
        return Err(ChainError::OffCircle);
    }
    let joints = chain.joint_count();
    let steps = joints * rounds;
    let mut vertices = Vec::with_capacity(steps + 1);
    let mut side_lines = Vec::with_capacity(steps);
    let mut x = start;
    vertices.push(x);
    for step in 0..steps {
        let j = step % joints;
        let (c_from, c_to) = chain.joint(j);
        let pivot = resolve_pivot(c_from, c_to, chain.pivots[j], tol)
            .map_err(|e| annotate_step(e, step))?;
        let (next, carrier) = match concyclic_anchor {
            None => pivot_map_with_carrier(c_from, c_to, pivot, x, tol),
            Some(anchor) => pivot_map_concyclic_with_carrier(c_from, c_to, pivot, anchor, x, tol),
        }
        .map_err(|e| annotate_step(e, step))?;
        let side = if next.dist(x) > tol.eps() {
            Line::through(x, next).map_err(|e| annotate_step(e.into(), step))?
        } else {
            carrier
        };
        side_lines.push(side);
        vertices.push(next);
        x = next;
    }
    Ok(Trace {
        vertices,
        side_lines,
        rounds,
    })
}

fn annotate_step(err: ChainError, step: usize) -> ChainError {
    match err {
        ChainError::Geom(source) => ChainError::Step { step, source },
        other => other,
    }
}

/// Smallest k <= `max_k` for which k rounds close, or `None`.
///
/// The candidate from the transfer-angle total is cross-validated by
/// actually iterating k rounds from a probe start.
pub fn closure_order(
    chain: &Chain,
    max_k: usize,
    tol: &Tolerance,
) -> Result<Option<usize>, ChainError> {
    let report = transfer_report(chain, tol)?;
    let n = chain.joint_count() as f64;
    for k in 1..=max_k {
        let defect = normalize_angle(report.total * k as f64);
        if defect.abs() <= k as f64 * n * tol.rel {
            let start = chain.circles[0].point_at(0.7390851332151607);
            let trace = iterate(chain, start, k, None, tol)?;
            let back = *trace.vertices.last().unwrap();
            if back.dist(start) <= 100.0 * k as f64 * n * tol.eps() {
                return Ok(Some(k));
            }
        }
    }
    Ok(None)
}

/// Which pivots the return leg of a doubled chain uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReturnPivots {
    /// Reuse the identical pivot points, which cancels every transfer angle.
    Same,
    /// Use the companion intersection points on the return leg.
    Companion,
}

/// Close an open chain by traversing it forward and then backward.
///
/// The result has 2n-2 circles; the return leg reuses the forward pivots (or
/// their companions). A/B labels flip with the traversal direction, so the
/// return pivots are stored as explicit points.
pub fn doubled_chain(
    open: &Chain,
    return_pivots: ReturnPivots,
    tol: &Tolerance,
) -> Result<Chain, ChainError> {
    if open.closed {
        return Err(ChainError::NotOpen);
    }
    open.validate(tol)?;
    let n = open.circles.len();
    let forward = open.resolved_pivots(tol)?;
    let mut circles = open.circles.clone();
    circles.extend(open.circles[1..n - 1].iter().rev().copied());
    let mut pivots: Vec<PivotChoice> =
        forward.iter().map(|p| PivotChoice::Explicit(*p)).collect();
    for i in (0..n - 1).rev() {
        let point = match return_pivots {
            ReturnPivots::Same => forward[i],
            ReturnPivots::Companion => {
                let (c_from, c_to) = open.joint(i);
                companion_pivot(c_from, c_to, forward[i], tol)?
            }
        };
        pivots.push(PivotChoice::Explicit(point));
    }
    Ok(Chain::closed(circles, pivots))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3_2: f64 = 0.8660254037844386;

    fn unit_pair() -> (Circle, Circle) {
        (
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(1.0, 0.0), 1.0),
        )
    }

    fn tangent_pair() -> (Circle, Circle) {
        (
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(2.0, 0.0), 1.0),
        )
    }

    fn orthogonal_pair() -> (Circle, Circle) {
        (
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(1.0, 1.0), 1.0),
        )
    }

    fn tol() -> Tolerance {
        Tolerance::new(1e-9, 4.0)
    }

    fn touching_chain(n: usize) -> Chain {
        // Centers on a regular n-gon, all radii half the side length.
        let big = 10.0;
        let side = 2.0 * big * (PI / n as f64).sin();
        let circles = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                Circle::new(Point::new(big * a.cos(), big * a.sin()), side / 2.0)
            })
            .collect();
        Chain::closed(circles, vec![PivotChoice::A; n])
    }

    #[test]
    fn resolve_pivot_left_right() {
        let (c1, c2) = unit_pair();
        let a = resolve_pivot(&c1, &c2, PivotChoice::A, &tol()).unwrap();
        assert!(a.dist(Point::new(0.5, SQRT3_2)) < 1e-12);
        let (c1, c2) = tangent_pair();
        let b = resolve_pivot(&c1, &c2, PivotChoice::B, &tol()).unwrap();
        assert!(b.dist(Point::new(1.0, 0.0)) < 1e-12);
        // Left of the diagonal direction (1,1).
        let (c1, c2) = orthogonal_pair();
        let a = resolve_pivot(&c1, &c2, PivotChoice::A, &tol()).unwrap();
        assert!(a.dist(Point::new(0.0, 1.0)) < 1e-12, "{a:?}");
    }

    #[test]
    fn pivot_map_examples() {
        let (c1, c2) = tangent_pair();
        let pivot = Point::new(1.0, 0.0);
        let y = pivot_map(&c1, &c2, pivot, Point::new(-1.0, 0.0), &tol()).unwrap();
        assert!(y.dist(Point::new(3.0, 0.0)) < 1e-12);
        // X at the pivot: the common tangent x = 1 touches both circles.
        let y = pivot_map(&c1, &c2, pivot, pivot, &tol()).unwrap();
        assert!(y.dist(pivot) < 1e-12);
        let y = pivot_map(&c1, &c2, pivot, Point::new(0.0, 1.0), &tol()).unwrap();
        assert!(y.dist(Point::new(2.0, -1.0)) < 1e-12);
    }

    #[test]
    fn pivot_map_rejects_bad_input() {
        let (c1, c2) = tangent_pair();
        assert!(pivot_map(&c1, &c2, Point::new(1.0, 0.0), Point::new(5.0, 5.0), &tol()).is_err());
        assert!(pivot_map(&c1, &c2, Point::new(0.5, 0.0), Point::new(-1.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn concyclic_degenerate_collinear_matches_line_map() {
        let (c1, c2) = tangent_pair();
        let pivot = Point::new(1.0, 0.0);
        let x = Point::new(-1.0, 0.0);
        let anchor = Point::new(5.0, 0.0);
        let y = pivot_map_concyclic(&c1, &c2, pivot, anchor, x, &tol()).unwrap();
        assert!(y.dist(Point::new(3.0, 0.0)) < 1e-12);
    }

    #[test]
    fn concyclic_generic_carrier() {
        let (c1, c2) = tangent_pair();
        let pivot = Point::new(1.0, 0.0);
        let x = Point::new(-1.0, 0.0);
        let anchor = Point::new(1.0, 5.0);
        let y = pivot_map_concyclic(&c1, &c2, pivot, anchor, x, &tol()).unwrap();
        // Oracle: second intersection of circumcircle(x, pivot, anchor)
        // with c2 besides the pivot.
        let carrier = circumcircle(x, pivot, anchor, &tol()).unwrap();
        assert!(carrier.contains(y, &tol()));
        assert!(c2.contains(y, &tol()));
        assert!(y.dist(pivot) > 1e-6);
    }

    #[test]
    fn concyclic_rejects_anchor_on_circle() {
        let (c1, c2) = tangent_pair();
        let pivot = Point::new(1.0, 0.0);
        assert!(matches!(
            pivot_map_concyclic(&c1, &c2, pivot, Point::new(0.0, 1.0), Point::new(-1.0, 0.0), &tol()),
            Err(ChainError::AnchorOnCircle)
        ));
    }

    #[test]
    fn transfer_angle_touching_is_pi() {
        let (c1, c2) = tangent_pair();
        let pivot = Point::new(1.0, 0.0);
        let mu = transfer_angle_measured(&c1, &c2, pivot, &tol()).unwrap();
        assert!((mu.radians() - PI).abs() < 1e-12);
        let angles = transfer_angle_formula(&c1, &c2, pivot, &tol()).unwrap();
        assert_eq!(angles.delta.radians(), 0.0);
        assert_eq!(angles.gamma.radians(), 0.0);
        assert!((angles.mu.radians() - PI).abs() < 1e-12);
        let mu = transfer_angle_tangent(&c1, &c2, pivot, &tol()).unwrap();
        assert!((mu.radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn transfer_angle_orthogonal_pair() {
        let (c1, c2) = orthogonal_pair();
        let pivot = Point::new(1.0, 0.0);
        let mu = transfer_angle_measured(&c1, &c2, pivot, &tol()).unwrap();
        assert!((mu.radians() - PI / 2.0).abs() < 1e-12);
        let angles = transfer_angle_formula(&c1, &c2, pivot, &tol()).unwrap();
        assert!((angles.delta.radians() - PI / 2.0).abs() < 1e-12);
        assert!((angles.gamma.radians() - PI / 2.0).abs() < 1e-12);
        assert!((angles.mu.radians() - PI / 2.0).abs() < 1e-12);
        let mu = transfer_angle_tangent(&c1, &c2, pivot, &tol()).unwrap();
        assert!((mu.radians() - PI / 2.0).abs() < 1e-12);
        // Companion pivot negates the transfer angle.
        let angles_b = transfer_angle_formula(&c1, &c2, Point::new(0.0, 1.0), &tol()).unwrap();
        assert!((angles_b.mu.radians() + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn probe_independence() {
        let (c1, c2) = orthogonal_pair();
        let pivot = Point::new(1.0, 0.0);
        let reference = transfer_angle_measured(&c1, &c2, pivot, &tol()).unwrap();
        for i in 1..32 {
            let offset = 2.0 * PI * i as f64 / 32.0;
            let mu = transfer_angle_probed(&c1, &c2, pivot, offset, &tol()).unwrap();
            assert!(
                normalize_angle(mu.radians() - reference.radians()).abs() < 1e-10,
                "probe {i}"
            );
        }
    }

    #[test]
    fn touching_chain_report() {
        let chain = touching_chain(4);
        let tol = chain.tolerance();
        let report = transfer_report(&chain, &tol).unwrap();
        assert!((report.total - 4.0 * PI).abs() < 1e-9);
        assert_eq!(report.winding, 2);
        assert!(report.closing_defect.abs() < 1e-9);
        assert!(is_closing(&chain, &tol).unwrap());

        let chain = touching_chain(3);
        let tol = chain.tolerance();
        let report = transfer_report(&chain, &tol).unwrap();
        assert!((report.total - 3.0 * PI).abs() < 1e-9);
        assert!((report.closing_defect - PI).abs() < 1e-9);
        assert!(!is_closing(&chain, &tol).unwrap());
        assert_eq!(closure_order(&chain, 8, &tol).unwrap(), Some(2));
    }

    #[test]
    fn flipped_chain_negates_total() {
        let chain = touching_chain(5);
        let tol = chain.tolerance();
        let flipped = chain.flipped(&tol).unwrap();
        let r1 = transfer_report(&chain, &tol).unwrap();
        let r2 = transfer_report(&flipped, &tol).unwrap();
        // Touching joints are self-companion, so the totals agree; a mixed
        // chain is covered by the property tests.
        assert!((r1.total - r2.total).abs() < 1e-9);
    }

    #[test]
    fn iterate_touching_parity() {
        let chain = touching_chain(4);
        let tol = chain.tolerance();
        let start = chain.circles[0].point_at(0.3);
        let trace = iterate(&chain, start, 1, None, &tol).unwrap();
        assert_eq!(trace.vertices.len(), 5);
        assert!(trace.vertices[4].dist(start) <= 1e-9 * tol.scene_scale);

        let chain = touching_chain(3);
        let tol = chain.tolerance();
        let start = chain.circles[0].point_at(1.1);
        let trace = iterate(&chain, start, 1, None, &tol).unwrap();
        assert!(trace.vertices[3].dist(start) > 1e-3 * tol.scene_scale);
        let trace = iterate(&chain, start, 2, None, &tol).unwrap();
        assert_eq!(trace.vertices.len(), 7);
        assert!(trace.vertices[6].dist(start) <= 1e-9 * tol.scene_scale);
    }

    #[test]
    fn doubled_open_chain_always_closes() {
        let circles = vec![
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(1.5, 0.2), 1.0),
            Circle::new(Point::new(3.0, -0.1), 1.2),
        ];
        let open = Chain::open(circles, vec![PivotChoice::A, PivotChoice::B]);
        let tol = open.tolerance();
        let doubled = doubled_chain(&open, ReturnPivots::Same, &tol).unwrap();
        assert_eq!(doubled.circles.len(), 4);
        assert_eq!(doubled.pivots.len(), 4);
        assert!(is_closing(&doubled, &tol).unwrap());
    }

    #[test]
    fn doubled_two_chain() {
        let circles = vec![
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(1.5, 0.2), 1.0),
        ];
        let open = Chain::open(circles, vec![PivotChoice::A]);
        let tol = open.tolerance();
        let doubled = doubled_chain(&open, ReturnPivots::Same, &tol).unwrap();
        assert_eq!(doubled.circles.len(), 2);
        let report = transfer_report(&doubled, &tol).unwrap();
        assert!(report.closing_defect.abs() < 1e-12);
        assert!(is_closing(&doubled, &tol).unwrap());
    }

    #[test]
    fn validate_rejects_disjoint_joint() {
        let circles = vec![
            Circle::new(Point::new(0.0, 0.0), 1.0),
            Circle::new(Point::new(10.0, 0.0), 1.0),
            Circle::new(Point::new(1.0, 0.0), 1.0),
        ];
        let chain = Chain::closed(circles, vec![PivotChoice::A; 3]);
        let tol = chain.tolerance();
        assert!(matches!(
            chain.validate(&tol),
            Err(ChainError::BadJoint { index: 0, .. })
        ));
    }
}
