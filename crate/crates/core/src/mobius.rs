//! Möbius transformations on points, circles and whole chains.
//!
//! Transfer angles and the closing property are conformal invariants, so a
//! fractional-linear map whose pole stays off every chain circle carries a
//! chain to another chain with identical closing behaviour. The generator
//! here samples such maps deterministically from a seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{Chain, ChainError, PivotChoice};
use crate::geom::{circumcircle, Circle, GeomError, Line, Point, Tolerance};

#[derive(Debug, Error)]
pub enum MobiusError {
    #[error("point coincides with the pole of the map")]
    AtPole,
    #[error("circles {0:?} would map to lines (pole on circle)")]
    CirclesBecomeLines(Vec<usize>),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Fractional-linear map z -> (a z + b) / (c z + d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Coefficients (alpha, beta, gamma, delta) of
/// alpha (x^2 + y^2) + beta x + gamma y + delta = 0,
/// normalized to maximum coefficient magnitude 1. A vanishing alpha encodes
/// a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCircle {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

fn to_complex(p: Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

fn to_point(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        MobiusMap { a, b, c, d }
    }

    pub fn identity() -> Self {
        MobiusMap::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Pole of the map, or `None` for affine maps (c = 0).
    pub fn pole(&self) -> Option<Point> {
        if self.c.norm() == 0.0 {
            None
        } else {
            Some(to_point(-self.d / self.c))
        }
    }

    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
        )
    }
}

impl GeneralizedCircle {
    pub fn normalized(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        let m = alpha
            .abs()
            .max(beta.abs())
            .max(gamma.abs())
            .max(delta.abs());
        debug_assert!(m > 0.0);
        GeneralizedCircle {
            alpha: alpha / m,
            beta: beta / m,
            gamma: gamma / m,
            delta: delta / m,
        }
    }

    pub fn from_circle(c: &Circle) -> Self {
        GeneralizedCircle::normalized(
            1.0,
            -2.0 * c.center.x,
            -2.0 * c.center.y,
            c.center.norm_sq() - c.radius * c.radius,
        )
    }

    pub fn from_line(l: &Line) -> Self {
        let normal = l.direction.rot90();
        GeneralizedCircle::normalized(0.0, normal.x, normal.y, -normal.dot(l.anchor))
    }

    pub fn is_line(&self, tol: &Tolerance) -> bool {
        self.alpha.abs() <= tol.rel
    }

    pub fn to_circle(&self, tol: &Tolerance) -> Option<Circle> {
        if self.is_line(tol) {
            return None;
        }
        let cx = -self.beta / (2.0 * self.alpha);
        let cy = -self.gamma / (2.0 * self.alpha);
        let r_sq = cx * cx + cy * cy - self.delta / self.alpha;
        if r_sq <= 0.0 {
            return None;
        }
        Some(Circle::new(Point::new(cx, cy), r_sq.sqrt()))
    }

    pub fn to_line(&self, tol: &Tolerance) -> Option<Line> {
        if !self.is_line(tol) {
            return None;
        }
        let normal = Point::new(self.beta, self.gamma);
        let n2 = normal.norm_sq();
        if n2 == 0.0 {
            return None;
        }
        let anchor = normal * (-self.delta / n2);
        Line::new(anchor, normal.rot90()).ok()
    }
}

/// Image of a point under the map; errors at the pole.
pub fn apply_point(m: &MobiusMap, p: Point) -> Result<Point, MobiusError> {
    let z = to_complex(p);
    let den = m.c * z + m.d;
    if den.norm() <= 1e-300 {
        return Err(MobiusError::AtPole);
    }
    Ok(to_point((m.a * z + m.b) / den))
}

/// Image of a circle, which is a line exactly when the pole lies on it.
///
/// Computed by mapping three well-spread sample points (kept away from the
/// pole direction) and refitting.
pub fn apply_circle(
    m: &MobiusMap,
    c: &Circle,
    tol: &Tolerance,
) -> Result<GeneralizedCircle, MobiusError> {
    let pole = m.pole();
    let pole_angle = pole
        .map(|p| (p - c.center).polar_angle())
        .unwrap_or(0.0);
    let samples = [
        std::f64::consts::PI,
        std::f64::consts::FRAC_PI_2,
        -std::f64::consts::FRAC_PI_2,
    ]
    .map(|off| c.point_at(pole_angle + off));
    let images = [
        apply_point(m, samples[0])?,
        apply_point(m, samples[1])?,
        apply_point(m, samples[2])?,
    ];
    let pole_on_circle = pole.map(|p| c.contains(p, tol)).unwrap_or(false);
    if pole_on_circle {
        let line = Line::through(images[0], images[1])?;
        return Ok(GeneralizedCircle::from_line(&line));
    }
    let circle = circumcircle(images[0], images[1], images[2], tol)?;
    Ok(GeneralizedCircle::from_circle(&circle))
}

/// Image of a whole chain: circles map to circles, pivots become explicit
/// image points. Rejected if any circle would map to a line.
pub fn apply_scene(m: &MobiusMap, chain: &Chain, tol: &Tolerance) -> Result<Chain, MobiusError> {
    if let Some(pole) = m.pole() {
        let offending: Vec<usize> = chain
            .circles
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(pole, tol))
            .map(|(i, _)| i)
            .collect();
        if !offending.is_empty() {
            return Err(MobiusError::CirclesBecomeLines(offending));
        }
    }
    let mut circles = Vec::with_capacity(chain.circles.len());
    for c in &chain.circles {
        let image = apply_circle(m, c, tol)?
            .to_circle(tol)
            .ok_or(MobiusError::CirclesBecomeLines(vec![]))?;
        circles.push(image);
    }
    let pivots = chain
        .resolved_pivots(tol)?
        .into_iter()
        .map(|p| apply_point(m, p).map(PivotChoice::Explicit))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Chain {
        circles,
        pivots,
        closed: chain.closed,
    })
}

/// Deterministic orientation-preserving map from a seed, with the pole
/// placed outside two and a half times the scene bounding disk so that every
/// scene circle maps to a circle.
pub fn random_mobius(seed: u64, scene_scale: f64) -> MobiusMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = rng.gen_range(0.0..std::f64::consts::TAU);
    let scale = rng.gen_range(0.5..2.0);
    let w = Complex64::from_polar(scale, rot);
    let t = Complex64::new(
        rng.gen_range(-0.5..0.5) * scene_scale,
        rng.gen_range(-0.5..0.5) * scene_scale,
    );
    if rng.gen_bool(0.25) {
        // Affine map, no pole.
        return MobiusMap::new(w, t, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let pole_angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let pole_radius = rng.gen_range(2.5..4.0) * scene_scale;
    let p = Complex64::from_polar(pole_radius, pole_angle);
    // Near the scene (|z| << |p|) this behaves like z -> w z + t.
    MobiusMap::new(-w * p, -t * p, Complex64::new(1.0, 0.0), -p)
}

/// Inversion with center `pole` and power `k2`: p -> pole + k2 (p - pole) / |p - pole|^2.
pub fn invert_point(pole: Point, k2: f64, p: Point) -> Result<Point, MobiusError> {
    let d = p - pole;
    let n2 = d.norm_sq();
    if n2 <= 1e-300 {
        return Err(MobiusError::AtPole);
    }
    Ok(pole + d * (k2 / n2))
}

/// Image of a circle not through the inversion center.
pub fn invert_circle(pole: Point, k2: f64, c: &Circle) -> Result<Circle, MobiusError> {
    let d = c.center - pole;
    let s = d.norm_sq() - c.radius * c.radius;
    if s.abs() <= 1e-300 {
        return Err(MobiusError::AtPole);
    }
    let center = pole + d * (k2 / s);
    Ok(Circle::new(center, (k2 / s).abs() * c.radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::new(1e-9, 4.0)
    }

    fn reciprocal() -> MobiusMap {
        MobiusMap::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    #[test]
    fn identity_and_reciprocal_points() {
        let id = MobiusMap::identity();
        let p = apply_point(&id, Point::new(3.0, 4.0)).unwrap();
        assert!(p.dist(Point::new(3.0, 4.0)) < 1e-15);
        let inv = reciprocal();
        let p = apply_point(&inv, Point::new(2.0, 0.0)).unwrap();
        assert!(p.dist(Point::new(0.5, 0.0)) < 1e-15);
        assert!(matches!(
            apply_point(&inv, Point::new(0.0, 0.0)),
            Err(MobiusError::AtPole)
        ));
    }

    #[test]
    fn reciprocal_circle_image() {
        // 1/z maps ((2,0),1) through its diametral points 1 and 3 to the
        // circle through 1 and 1/3, centered on the real axis.
        let c = Circle::new(Point::new(2.0, 0.0), 1.0);
        let img = apply_circle(&reciprocal(), &c, &tol())
            .unwrap()
            .to_circle(&tol())
            .unwrap();
        assert!(img.center.dist(Point::new(2.0 / 3.0, 0.0)) < 1e-12);
        assert!((img.radius - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pole_on_circle_gives_line() {
        // 1/z with pole 0 on ((1,0),1): images of (2,0) and (1,1) are
        // (1/2,0) and (1/2,-1/2), the vertical line x = 1/2.
        let c = Circle::new(Point::new(1.0, 0.0), 1.0);
        let g = apply_circle(&reciprocal(), &c, &tol()).unwrap();
        assert!(g.is_line(&tol()));
        let line = g.to_line(&tol()).unwrap();
        assert!(line.dist(Point::new(0.5, 0.0)) < 1e-12);
        assert!(line.dist(Point::new(0.5, -0.5)) < 1e-12);
        assert!(line.dist(Point::new(0.5, 7.0)) < 1e-12);
    }

    #[test]
    fn composition_group_law() {
        let m1 = random_mobius(1, 1.0);
        let m2 = random_mobius(2, 1.0);
        let composed = m2.compose(&m1);
        for i in 0..10 {
            let p = Point::new(0.1 * i as f64 - 0.4, 0.07 * i as f64);
            let step = apply_point(&m2, apply_point(&m1, p).unwrap()).unwrap();
            let direct = apply_point(&composed, p).unwrap();
            assert!(step.dist(direct) < 1e-10);
        }
    }

    #[test]
    fn random_mobius_is_deterministic() {
        let m1 = random_mobius(42, 3.0);
        let m2 = random_mobius(42, 3.0);
        assert_eq!(m1, m2);
        assert!(m1.determinant().norm() > 0.0);
        if let Some(pole) = m1.pole() {
            assert!(pole.norm() >= 2.5 * 3.0);
        }
    }

    #[test]
    fn inversion_roundtrip() {
        let pole = Point::new(0.3, -0.7);
        let p = Point::new(2.0, 1.0);
        let q = invert_point(pole, 2.5, p).unwrap();
        let back = invert_point(pole, 2.5, q).unwrap();
        assert!(back.dist(p) < 1e-12);

        let c = Circle::new(Point::new(3.0, 1.0), 0.8);
        let img = invert_circle(pole, 2.5, &c).unwrap();
        // Image of a point of c lies on the image circle.
        for i in 0..8 {
            let s = c.point_at(0.7 * i as f64);
            let si = invert_point(pole, 2.5, s).unwrap();
            assert!(img.signed_dist(si).abs() < 1e-10);
        }
    }
}
