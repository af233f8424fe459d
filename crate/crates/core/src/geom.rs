//! Planar primitives: points, circles, lines, oriented angles and the
//! tolerance-governed incidence predicates everything else is built on.
//!
//! All predicates compare against a single relative tolerance scaled by the
//! scene diameter, so pass/fail decisions stay comparable across scenes of
//! different size.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("points are collinear")]
    Collinear,
    #[error("lines are parallel")]
    ParallelLines,
    #[error("point ({0:.6}, {1:.6}) is not on the circle")]
    NotOnCircle(f64, f64),
    #[error("zero-length vector")]
    ZeroVector,
    #[error("need at least 3 points to fit a circle, got {0}")]
    TooFewPoints(usize),
    #[error("point set is collinear or coincident, no circle fit")]
    DegenerateFit,
}

/// A point in the plane, also used as a 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, positive when `other` is
    /// counterclockwise from `self`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Result<Point, GeomError> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        Ok(self / n)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn polar_angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A circle with positive finite radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius > 0.0 && radius.is_finite());
        Circle { center, radius }
    }

    /// Point at the given polar angle about the center.
    pub fn point_at(&self, angle: f64) -> Point {
        self.center + Point::new(angle.cos(), angle.sin()) * self.radius
    }

    /// Signed distance of `p` from the circle (negative inside).
    pub fn signed_dist(&self, p: Point) -> f64 {
        self.center.dist(p) - self.radius
    }

    pub fn contains(&self, p: Point, tol: &Tolerance) -> bool {
        self.signed_dist(p).abs() <= tol.eps()
    }
}

/// A directed line through `anchor` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub anchor: Point,
    pub direction: Point,
}

impl Line {
    pub fn new(anchor: Point, direction: Point) -> Result<Self, GeomError> {
        Ok(Line {
            anchor,
            direction: direction.normalized()?,
        })
    }

    pub fn through(a: Point, b: Point) -> Result<Self, GeomError> {
        Line::new(a, b - a)
    }

    /// Perpendicular distance of `p` from the line.
    pub fn dist(&self, p: Point) -> f64 {
        self.direction.cross(p - self.anchor).abs()
    }
}

/// Oriented angle in radians, normalized to the half-open interval (-pi, pi].
///
/// Pi, not -pi, is the representative of the antipodal class, so the transfer
/// angle of a touching joint always prints as +pi.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        Angle(normalize_angle(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Wrap to (-pi, pi] with pi as the representative of the boundary class.
pub fn normalize_angle(radians: f64) -> f64 {
    let r = radians.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Relative tolerance together with the scene scale it applies to.
///
/// The scene scale is the diameter of the bounding box of all circles
/// (centers plus radii); every absolute comparison uses `rel * scene_scale`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub scene_scale: f64,
}

pub const DEFAULT_REL_TOL: f64 = 1e-9;

impl Tolerance {
    pub fn new(rel: f64, scene_scale: f64) -> Self {
        debug_assert!(rel > 0.0 && scene_scale > 0.0);
        Tolerance { rel, scene_scale }
    }

    /// Default relative tolerance at unit scene scale.
    pub fn unit() -> Self {
        Tolerance::new(DEFAULT_REL_TOL, 1.0)
    }

    /// Tolerance for a set of circles, with the scene scale taken from
    /// their joint bounding box.
    pub fn for_circles<'a, I>(circles: I) -> Self
    where
        I: IntoIterator<Item = &'a Circle>,
    {
        Tolerance::with_rel(circles, DEFAULT_REL_TOL)
    }

    pub fn with_rel<'a, I>(circles: I, rel: f64) -> Self
    where
        I: IntoIterator<Item = &'a Circle>,
    {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut any = false;
        for c in circles {
            any = true;
            lo.x = lo.x.min(c.center.x - c.radius);
            lo.y = lo.y.min(c.center.y - c.radius);
            hi.x = hi.x.max(c.center.x + c.radius);
            hi.y = hi.y.max(c.center.y + c.radius);
        }
        let scale = if any { (hi - lo).norm().max(1e-300) } else { 1.0 };
        Tolerance::new(rel, scale)
    }

    /// Absolute length tolerance.
    pub fn eps(&self) -> f64 {
        self.rel * self.scene_scale
    }
}

/// How two circles relate to each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleRelation {
    Disjoint,
    Tangent(Point),
    /// The two intersection points, `a` on the left of the directed center
    /// line M1 -> M2, `b` on the right.
    Intersecting(Point, Point),
    Coincident,
    Nested,
}

/// Classify the relation of two circles and return intersection points.
///
/// For `Intersecting(a, b)`, `a` is the point with positive cross product
/// against the directed center line M1 -> M2 and `b` the one with negative
/// cross product. Near-tangency within tolerance is snapped to `Tangent`
/// with the contact on the center line.
pub fn intersect_circles(c1: &Circle, c2: &Circle, tol: &Tolerance) -> CircleRelation {
    let eps = tol.eps();
    let delta = c2.center - c1.center;
    let d = delta.norm();
    if d <= eps && (c1.radius - c2.radius).abs() <= eps {
        return CircleRelation::Coincident;
    }
    if d <= eps {
        return CircleRelation::Nested;
    }
    let u = delta / d;
    let sum = c1.radius + c2.radius;
    let diff = (c1.radius - c2.radius).abs();
    if (d - sum).abs() <= eps || (d - diff).abs() <= eps {
        // Contact point on the center line; a = (d^2 + r1^2 - r2^2) / (2 d)
        // handles both the external and the internal case.
        let a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
        return CircleRelation::Tangent(c1.center + u * a);
    }
    if d > sum {
        return CircleRelation::Disjoint;
    }
    if d < diff {
        return CircleRelation::Nested;
    }
    let a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    let h_sq = c1.radius * c1.radius - a * a;
    let h = h_sq.max(0.0).sqrt();
    let base = c1.center + u * a;
    let v = u.rot90();
    CircleRelation::Intersecting(base + v * h, base - v * h)
}

/// Second intersection of a line with a circle, given one intersection.
///
/// Returns `known` itself when the line is tangent at `known`. The other
/// root is recovered through the Vieta sum identity on the chord quadratic,
/// so it suffers no cancellation near tangency.
pub fn second_intersection(
    carrier: &Line,
    circle: &Circle,
    known: Point,
    tol: &Tolerance,
) -> Result<Point, GeomError> {
    if !circle.contains(known, tol) {
        return Err(GeomError::NotOnCircle(known.x, known.y));
    }
    // Parametrize p(t) = anchor + t * dir with |dir| = 1:
    // t^2 + 2 b t + c = 0, roots sum to -2b.
    let dir = carrier.direction;
    let offset = carrier.anchor - circle.center;
    let b = dir.dot(offset);
    let t_known = dir.dot(known - carrier.anchor);
    let t_other = -2.0 * b - t_known;
    Ok(carrier.anchor + dir * t_other)
}

/// Circumcircle of three pairwise distinct, non-collinear points.
pub fn circumcircle(p: Point, q: Point, r: Point, tol: &Tolerance) -> Result<Circle, GeomError> {
    let u = q - p;
    let v = r - p;
    let cross = u.cross(v);
    if cross.abs() <= tol.rel * u.norm() * v.norm() {
        return Err(GeomError::Collinear);
    }
    // Perpendicular bisector system relative to p.
    let u2 = u.norm_sq();
    let v2 = v.norm_sq();
    let cx = (u2 * v.y - v2 * u.y) / (2.0 * cross);
    let cy = (v2 * u.x - u2 * v.x) / (2.0 * cross);
    let center = p + Point::new(cx, cy);
    Ok(Circle::new(center, Point::new(cx, cy).norm()))
}

/// Oriented angle from `u` to `v`, counterclockwise positive, in (-pi, pi].
pub fn oriented_angle(u: Point, v: Point) -> Result<Angle, GeomError> {
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(GeomError::ZeroVector);
    }
    Ok(Angle::new(u.cross(v).atan2(u.dot(v))))
}

/// Tangent line to `circle` at `at`, directed as the counterclockwise
/// rotation of the outward radial direction.
pub fn tangent_line(circle: &Circle, at: Point, tol: &Tolerance) -> Result<Line, GeomError> {
    if !circle.contains(at, tol) {
        return Err(GeomError::NotOnCircle(at.x, at.y));
    }
    let radial = (at - circle.center).normalized()?;
    Ok(Line {
        anchor: at,
        direction: radial.rot90(),
    })
}

/// Intersection point of two lines; error when parallel within tolerance.
pub fn intersect_lines(l1: &Line, l2: &Line, tol: &Tolerance) -> Result<Point, GeomError> {
    let cross = l1.direction.cross(l2.direction);
    if cross.abs() <= tol.rel {
        return Err(GeomError::ParallelLines);
    }
    let t = (l2.anchor - l1.anchor).cross(l2.direction) / cross;
    Ok(l1.anchor + l1.direction * t)
}

/// Least-squares circle through `points` in the algebraic (Kasa) formulation.
///
/// Returns the circle and the residual, the maximum over the points of the
/// absolute difference between their center distance and the radius.
pub fn fit_circle(points: &[Point], tol: &Tolerance) -> Result<(Circle, f64), GeomError> {
    if points.len() < 3 {
        return Err(GeomError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let centroid = points
        .iter()
        .fold(Point::new(0.0, 0.0), |acc, p| acc + *p)
        / n;
    // Centered coordinates: minimize sum (z.z + d.z + f)^2 over (dx, dy, f).
    // With sum(z) = 0 the normal equations decouple f from the linear part
    // only through sum(|z|^2), so solve the full symmetric 3x3 system.
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    let (mut sxz, mut syz, mut szz) = (0.0, 0.0, 0.0);
    for p in points {
        let z = *p - centroid;
        let zz = z.norm_sq();
        sxx += z.x * z.x;
        sxy += z.x * z.y;
        syy += z.y * z.y;
        sxz += z.x * zz;
        syz += z.y * zz;
        szz += zz;
    }
    // Normal equations for center (a, b) in centered coordinates:
    //   [sxx sxy] [a]   [sxz / 2]
    //   [sxy syy] [b] = [syz / 2]
    let det = sxx * syy - sxy * sxy;
    let scale2 = (sxx + syy) / n;
    if det.abs() <= (tol.rel * scale2 * n).powi(2).max(f64::MIN_POSITIVE) || scale2 == 0.0 {
        return Err(GeomError::DegenerateFit);
    }
    let a = (0.5 * sxz * syy - 0.5 * syz * sxy) / det;
    let b = (0.5 * syz * sxx - 0.5 * sxz * sxy) / det;
    let r_sq = a * a + b * b + szz / n;
    if !(r_sq > 0.0) || !r_sq.is_finite() {
        return Err(GeomError::DegenerateFit);
    }
    let circle = Circle::new(centroid + Point::new(a, b), r_sq.sqrt());
    let residual = points
        .iter()
        .map(|p| circle.signed_dist(*p).abs())
        .fold(0.0_f64, f64::max);
    Ok((circle, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3_2: f64 = 0.8660254037844386;

    fn tol() -> Tolerance {
        Tolerance::unit()
    }

    fn assert_close(p: Point, q: Point, eps: f64) {
        assert!(p.dist(q) <= eps, "{p:?} vs {q:?}");
    }

    #[test]
    fn circles_intersecting() {
        let c1 = Circle::new(Point::new(0.0, 0.0), 1.0);
        let c2 = Circle::new(Point::new(1.0, 0.0), 1.0);
        match intersect_circles(&c1, &c2, &tol()) {
            CircleRelation::Intersecting(a, b) => {
                assert_close(a, Point::new(0.5, SQRT3_2), 1e-12);
                assert_close(b, Point::new(0.5, -SQRT3_2), 1e-12);
            }
            other => panic!("expected intersection, got {other:?}"),
        }
    }

    #[test]
    fn circles_tangent_external() {
        let c1 = Circle::new(Point::new(0.0, 0.0), 1.0);
        let c2 = Circle::new(Point::new(2.0, 0.0), 1.0);
        match intersect_circles(&c1, &c2, &tol()) {
            CircleRelation::Tangent(p) => assert_close(p, Point::new(1.0, 0.0), 1e-12),
            other => panic!("expected tangency, got {other:?}"),
        }
    }

    #[test]
    fn circles_tangent_internal() {
        let c1 = Circle::new(Point::new(0.0, 0.0), 2.0);
        let c2 = Circle::new(Point::new(1.0, 0.0), 1.0);
        match intersect_circles(&c1, &c2, &tol()) {
            CircleRelation::Tangent(p) => assert_close(p, Point::new(2.0, 0.0), 1e-12),
            other => panic!("expected tangency, got {other:?}"),
        }
    }

    #[test]
    fn circles_disjoint_and_nested() {
        let c1 = Circle::new(Point::new(0.0, 0.0), 1.0);
        let c2 = Circle::new(Point::new(4.0, 0.0), 1.0);
        assert_eq!(intersect_circles(&c1, &c2, &tol()), CircleRelation::Disjoint);
        let c3 = Circle::new(Point::new(0.1, 0.0), 0.2);
        assert_eq!(intersect_circles(&c1, &c3, &tol()), CircleRelation::Nested);
        assert_eq!(intersect_circles(&c1, &c1, &tol()), CircleRelation::Coincident);
    }

    #[test]
    fn second_intersection_diametral() {
        let line = Line::new(Point::new(1.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let circle = Circle::new(Point::new(2.0, 0.0), 1.0);
        let p = second_intersection(&line, &circle, Point::new(1.0, 0.0), &tol()).unwrap();
        assert_close(p, Point::new(3.0, 0.0), 1e-12);
    }

    #[test]
    fn second_intersection_tangent_contact() {
        let line = Line::new(Point::new(1.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let circle = Circle::new(Point::new(1.0, 1.0), 1.0);
        let p = second_intersection(&line, &circle, Point::new(1.0, 0.0), &tol()).unwrap();
        assert_close(p, Point::new(1.0, 0.0), 1e-12);
    }

    #[test]
    fn second_intersection_oblique() {
        // Line through (0,1) and (1,0) meets ((2,0),1) in (1,0) and (2,-1):
        // substituting y = 1 - x into (x-2)^2 + y^2 = 1 gives x in {1, 2}.
        let line = Line::through(Point::new(0.0, 1.0), Point::new(1.0, 0.0)).unwrap();
        let circle = Circle::new(Point::new(2.0, 0.0), 1.0);
        let p = second_intersection(&line, &circle, Point::new(1.0, 0.0), &tol()).unwrap();
        assert_close(p, Point::new(2.0, -1.0), 1e-12);
    }

    #[test]
    fn second_intersection_rejects_off_circle() {
        let line = Line::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let circle = Circle::new(Point::new(2.0, 0.0), 1.0);
        assert!(second_intersection(&line, &circle, Point::new(0.5, 0.0), &tol()).is_err());
    }

    #[test]
    fn circumcircle_examples() {
        let c = circumcircle(
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
            &tol(),
        )
        .unwrap();
        assert_close(c.center, Point::new(0.0, 0.0), 1e-12);
        assert!((c.radius - 1.0).abs() <= 1e-12);

        // Perpendicular bisectors of (0,0),(2,0),(0,2) meet in (1,1).
        let c = circumcircle(
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 2.0),
            &tol(),
        )
        .unwrap();
        assert_close(c.center, Point::new(1.0, 1.0), 1e-12);
        assert!((c.radius - 2.0_f64.sqrt()).abs() <= 1e-12);

        assert!(matches!(
            circumcircle(
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
                &tol()
            ),
            Err(GeomError::Collinear)
        ));
    }

    #[test]
    fn oriented_angle_convention() {
        let a = oriented_angle(Point::new(1.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert!((a.radians() - PI / 2.0).abs() < 1e-15);
        let a = oriented_angle(Point::new(1.0, 0.0), Point::new(-1.0, 0.0)).unwrap();
        assert_eq!(a.radians(), PI);
        let a = oriented_angle(Point::new(1.0, 0.0), Point::new(1.0, -1.0)).unwrap();
        assert!((a.radians() + PI / 4.0).abs() < 1e-15);
        assert!(oriented_angle(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn tangent_line_direction() {
        let c = Circle::new(Point::new(0.0, 0.0), 1.0);
        let t = tangent_line(&c, Point::new(1.0, 0.0), &tol()).unwrap();
        assert_close(t.direction, Point::new(0.0, 1.0), 1e-15);
        let t = tangent_line(&c, Point::new(0.0, 1.0), &tol()).unwrap();
        assert_close(t.direction, Point::new(-1.0, 0.0), 1e-15);
        // Outward radial at (1,0) on ((2,0),1) is (-1,0), so the tangent
        // direction is its ccw rotation (0,-1).
        let c = Circle::new(Point::new(2.0, 0.0), 1.0);
        let t = tangent_line(&c, Point::new(1.0, 0.0), &tol()).unwrap();
        assert_close(t.direction, Point::new(0.0, -1.0), 1e-15);
    }

    #[test]
    fn line_intersections() {
        let x_axis = Line::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let y_axis = Line::new(Point::new(0.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert_close(
            intersect_lines(&x_axis, &y_axis, &tol()).unwrap(),
            Point::new(0.0, 0.0),
            1e-15,
        );
        let diag = Line::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0)).unwrap();
        let horiz = Line::new(Point::new(0.0, 1.0), Point::new(1.0, 0.0)).unwrap();
        assert_close(
            intersect_lines(&diag, &horiz, &tol()).unwrap(),
            Point::new(1.0, 1.0),
            1e-15,
        );
        let horiz0 = Line::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            intersect_lines(&horiz0, &horiz, &tol()),
            Err(GeomError::ParallelLines)
        ));
    }

    #[test]
    fn fit_circle_exact_samples() {
        let pts: Vec<Point> = (0..8)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 8.0;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let (c, res) = fit_circle(&pts, &tol()).unwrap();
        assert_close(c.center, Point::new(0.0, 0.0), 1e-12);
        assert!((c.radius - 1.0).abs() <= 1e-12);
        assert!(res <= 1e-12);

        let tri = [
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
        ];
        let (c, res) = fit_circle(&tri, &tol()).unwrap();
        assert_close(c.center, Point::new(0.0, 0.0), 1e-12);
        assert!(res <= 1e-12);
    }

    #[test]
    fn fit_circle_degenerate() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
        ];
        assert!(fit_circle(&pts, &tol()).is_err());
        assert!(fit_circle(&pts[..2], &tol()).is_err());
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(Angle::new(3.0 * PI).radians(), PI);
        assert_eq!(Angle::new(-PI).radians(), PI);
        assert!((Angle::new(2.5 * PI).radians() - 0.5 * PI).abs() < 1e-15);
    }
}
