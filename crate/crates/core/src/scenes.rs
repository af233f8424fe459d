//! Deterministic scene generators. Each generator constructs a configuration
//! that satisfies its closing theorem by construction rather than by
//! root-finding on the closing condition it is used to test.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{self, Chain, ChainError, PivotChoice};
use crate::geom::{
    circumcircle, intersect_circles, intersect_lines, normalize_angle, oriented_angle, Angle,
    Circle, CircleRelation, GeomError, Line, Point, Tolerance,
};

const MAX_RETRIES: usize = 64;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("need n >= {min} for this generator, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("invalid rational target p/q = {p}/{q}")]
    BadRational { p: i64, q: u64 },
    #[error("gave up after {MAX_RETRIES} attempts: {what}")]
    RetriesExhausted { what: &'static str },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The named scene families the CLI can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    Polygon,
    CommonPoint,
    Touching,
    Quadrilateral,
    NLines,
    Rational,
    OpenPolygon,
}

/// Parameters selecting one deterministic scene.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub n: usize,
    pub seed: u64,
    /// Rational target numerator (rational kind only).
    #[serde(default)]
    pub p: i64,
    /// Rational target denominator (rational kind only).
    #[serde(default = "default_q")]
    pub q: u64,
}

fn default_q() -> u64 {
    1
}

/// A generated chain plus the kind-specific extras.
#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub chain: Chain,
    pub witness: Option<Point>,
    pub lines: Option<LineArrangement>,
}

/// Lines in general position with the exterior angles of their polygon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineArrangement {
    pub lines: Vec<Line>,
    pub exterior_angles: Vec<Angle>,
}

/// Dispatch a scene spec to its generator.
pub fn generate(spec: &SceneSpec) -> Result<GeneratedScene, SceneError> {
    let plain = |chain: Chain| GeneratedScene {
        chain,
        witness: None,
        lines: None,
    };
    match spec.kind {
        SceneKind::Polygon => {
            let (chain, witness) = gen_polygon_chain(spec.n, spec.seed)?;
            Ok(GeneratedScene {
                chain,
                witness: Some(witness),
                lines: None,
            })
        }
        SceneKind::CommonPoint => Ok(plain(gen_common_point(spec.n, spec.seed)?)),
        SceneKind::Touching => Ok(plain(gen_touching_chain(spec.n, spec.seed)?)),
        SceneKind::Quadrilateral => {
            let (lines, chain) = gen_line_arrangement(4, spec.seed)?;
            Ok(GeneratedScene {
                chain,
                witness: None,
                lines: Some(lines),
            })
        }
        SceneKind::NLines => {
            let (lines, chain) = gen_line_arrangement(spec.n, spec.seed)?;
            Ok(GeneratedScene {
                chain,
                witness: None,
                lines: Some(lines),
            })
        }
        SceneKind::Rational => Ok(plain(gen_rational_chain(spec.n, spec.p, spec.q, spec.seed)?)),
        SceneKind::OpenPolygon => {
            let (chain, witness) = gen_open_polygon(spec.n, spec.seed)?;
            Ok(GeneratedScene {
                chain,
                witness: Some(witness),
                lines: None,
            })
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Jittered convex polygon vertices around the origin.
fn convex_polygon(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    let base = TAU / n as f64;
    (0..n)
        .map(|i| {
            let angle = base * i as f64 + rng.gen_range(-0.25 * base..0.25 * base);
            let radius = rng.gen_range(6.0..12.0);
            Point::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// Pivot parameter on a side: mostly interior, sometimes on the extension.
fn side_parameter(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.2) {
        if rng.gen_bool(0.5) {
            rng.gen_range(-0.5..-0.15)
        } else {
            rng.gen_range(1.15..1.5)
        }
    } else {
        rng.gen_range(0.15..0.85)
    }
}

/// Closed polygon first, circles second: C_i is the circumcircle of the
/// previous pivot, the vertex X_i and the next pivot, so the pivot map sends
/// X_i to X_{i+1} exactly and the chain closes at the witness X_1.
pub fn gen_polygon_chain(n: usize, seed: u64) -> Result<(Chain, Point), SceneError> {
    if n < 3 {
        return Err(SceneError::TooSmall { n, min: 3 });
    }
    let mut rng = rng_for(seed ^ 0x706f6c79);
    'attempt: for _ in 0..MAX_RETRIES {
        let xs = convex_polygon(&mut rng, n);
        let pivots: Vec<Point> = (0..n)
            .map(|i| {
                let t = side_parameter(&mut rng);
                xs[i] + (xs[(i + 1) % n] - xs[i]) * t
            })
            .collect();
        let mut circles = Vec::with_capacity(n);
        let probe_tol = Tolerance::new(1e-9, 20.0);
        for i in 0..n {
            let prev = pivots[(i + n - 1) % n];
            match circumcircle(prev, xs[i], pivots[i], &probe_tol) {
                Ok(c) => circles.push(c),
                Err(_) => continue 'attempt,
            }
        }
        let chain = Chain::closed(
            circles,
            pivots.iter().map(|p| PivotChoice::Explicit(*p)).collect(),
        );
        let tol = chain.tolerance();
        if chain.validate(&tol).is_err() {
            continue;
        }
        let witness = xs[0];
        let Ok(trace) = chain::iterate(&chain, witness, 1, None, &tol) else {
            continue;
        };
        let back = *trace.vertices.last().unwrap();
        if back.dist(witness) > 1e-10 * tol.scene_scale {
            continue;
        }
        if !chain::is_closing(&chain, &tol).unwrap_or(false) {
            continue;
        }
        return Ok((chain, witness));
    }
    Err(SceneError::RetriesExhausted {
        what: "polygon chain construction",
    })
}

/// n circles through a common point; every pivot is the second intersection
/// of its joint, so one round is the identity.
pub fn gen_common_point(n: usize, seed: u64) -> Result<Chain, SceneError> {
    if n < 3 {
        return Err(SceneError::TooSmall { n, min: 3 });
    }
    let mut rng = rng_for(seed ^ 0x636f6d6d);
    'attempt: for _ in 0..MAX_RETRIES {
        let b = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let base = TAU / n as f64;
        let circles: Vec<Circle> = (0..n)
            .map(|i| {
                let angle = base * i as f64 + rng.gen_range(-0.3 * base..0.3 * base);
                let radius = rng.gen_range(4.0..9.0);
                let center = b + Point::new(radius * angle.cos(), radius * angle.sin());
                Circle::new(center, radius)
            })
            .collect();
        let tol = Tolerance::for_circles(circles.iter());
        let mut pivots = Vec::with_capacity(n);
        for i in 0..n {
            let c1 = &circles[i];
            let c2 = &circles[(i + 1) % n];
            let CircleRelation::Intersecting(p, q) = intersect_circles(c1, c2, &tol) else {
                continue 'attempt;
            };
            let away = if p.dist(b) >= q.dist(b) { p } else { q };
            if away.dist(b) < 1e-3 * tol.scene_scale {
                continue 'attempt;
            }
            pivots.push(PivotChoice::Explicit(away));
        }
        let chain = Chain::closed(circles, pivots);
        if chain.validate(&tol).is_err() || !chain::is_closing(&chain, &tol).unwrap_or(false) {
            continue;
        }
        return Ok(chain);
    }
    Err(SceneError::RetriesExhausted {
        what: "common-point chain construction",
    })
}

/// Closed chain of pairwise externally tangent neighbours. Random tangent
/// lengths t_i give side lengths L_i = t_i + t_{i+1}; the centers form the
/// cyclic polygon with those sides, found by bisection on the circumradius,
/// and the radii are the tangent lengths themselves.
pub fn gen_touching_chain(n: usize, seed: u64) -> Result<Chain, SceneError> {
    if n < 3 {
        return Err(SceneError::TooSmall { n, min: 3 });
    }
    let mut rng = rng_for(seed ^ 0x746f7563);
    'attempt: for _ in 0..MAX_RETRIES {
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
        let sides: Vec<f64> = (0..n).map(|i| t[i] + t[(i + 1) % n]).collect();
        let max_side = sides.iter().cloned().fold(0.0, f64::max);

        let half_angle_sum = |radius: f64| -> f64 {
            sides.iter().map(|l| (l / (2.0 * radius)).asin()).sum::<f64>() - PI
        };
        let mut lo = max_side / 2.0 * (1.0 + 1e-12);
        let mut hi = 100.0 * max_side;
        if half_angle_sum(lo) <= 0.0 || half_angle_sum(hi) >= 0.0 {
            continue 'attempt;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if half_angle_sum(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let radius = 0.5 * (lo + hi);

        let origin = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let mut angle = rng.gen_range(0.0..TAU);
        let mut circles = Vec::with_capacity(n);
        for i in 0..n {
            let center = origin + Point::new(radius * angle.cos(), radius * angle.sin());
            circles.push(Circle::new(center, t[i]));
            angle += 2.0 * (sides[i] / (2.0 * radius)).asin();
        }
        let chain = Chain::closed(circles, vec![PivotChoice::A; n]);
        let tol = chain.tolerance();
        if chain.validate(&tol).is_err() {
            continue;
        }
        for i in 0..n {
            let (a, b) = chain.joint(i);
            if !matches!(intersect_circles(a, b, &tol), CircleRelation::Tangent(_)) {
                continue 'attempt;
            }
        }
        return Ok(chain);
    }
    Err(SceneError::RetriesExhausted {
        what: "touching chain construction",
    })
}

/// n lines in general position (tangent to concentric circles of jittered
/// radii), their polygon A_i = l_i cap l_{i+1}, its exterior angles, and the
/// chain of triangle circumcircles C_i of (l_{i-1}, l_i, l_{i+1}).
pub fn gen_line_arrangement(
    n: usize,
    seed: u64,
) -> Result<(LineArrangement, Chain), SceneError> {
    if n < 4 {
        return Err(SceneError::TooSmall { n, min: 4 });
    }
    let mut rng = rng_for(seed ^ 0x6c696e65);
    'attempt: for _ in 0..MAX_RETRIES {
        let base = TAU / n as f64;
        let mut lines = Vec::with_capacity(n);
        for i in 0..n {
            let psi = base * i as f64 + rng.gen_range(-0.2 * base..0.2 * base);
            let rho = rng.gen_range(3.0..5.0);
            let radial = Point::new(psi.cos(), psi.sin());
            lines.push(Line::new(radial * rho, radial.rot90())?);
        }
        // General position: no near-parallel pair, no near-concurrent triple.
        for i in 0..n {
            for j in i + 1..n {
                if lines[i].direction.cross(lines[j].direction).abs() < 0.05 {
                    continue 'attempt;
                }
            }
        }
        let probe_tol = Tolerance::new(1e-9, 10.0);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let pij = intersect_lines(&lines[i], &lines[j], &probe_tol)?;
                    if lines[k].dist(pij) < 0.05 {
                        continue 'attempt;
                    }
                }
            }
        }

        let vertices: Vec<Point> = (0..n)
            .map(|i| intersect_lines(&lines[i], &lines[(i + 1) % n], &probe_tol))
            .collect::<Result<_, _>>()?;
        let exterior_angles: Vec<Angle> = (0..n)
            .map(|i| {
                let prev = vertices[(i + n - 1) % n];
                let next = vertices[(i + 1) % n];
                // Signed so that the transfer angle at A_i equals
                // 2*pi - (w_{i-1} + w_i + w_{i+1}) modulo 2*pi.
                oriented_angle(next - vertices[i], vertices[i] - prev)
            })
            .collect::<Result<_, _>>()?;

        let mut circles = Vec::with_capacity(n);
        for i in 0..n {
            let a_prev = vertices[(i + n - 1) % n];
            let diag =
                intersect_lines(&lines[(i + n - 1) % n], &lines[(i + 1) % n], &probe_tol)?;
            match circumcircle(a_prev, vertices[i], diag, &probe_tol) {
                Ok(c) => circles.push(c),
                Err(_) => continue 'attempt,
            }
        }
        let chain = Chain::closed(
            circles,
            vertices.iter().map(|p| PivotChoice::Explicit(*p)).collect(),
        );
        let tol = chain.tolerance();
        if chain.validate(&tol).is_err() || !chain::is_closing(&chain, &tol).unwrap_or(false) {
            continue;
        }
        let arrangement = LineArrangement {
            lines,
            exterior_angles,
        };
        return Ok((arrangement, chain));
    }
    Err(SceneError::RetriesExhausted {
        what: "line arrangement construction",
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Chain whose transfer-angle total is exactly 2*pi*p/q, so it closes after
/// q rounds and not before. The first n-1 circles are random; the last one
/// belongs to the one-parameter family through the two boundary pivots and
/// is found by a bracketed bisection on the family parameter (the signed
/// offset of the center along the perpendicular bisector, equivalent to
/// signed curvature). The bracket is verified numerically per instance.
pub fn gen_rational_chain(n: usize, p: i64, q: u64, seed: u64) -> Result<Chain, SceneError> {
    if n < 3 {
        return Err(SceneError::TooSmall { n, min: 3 });
    }
    if q == 0 || (q > 1 && gcd(p.unsigned_abs(), q) != 1) {
        return Err(SceneError::BadRational { p, q });
    }
    let target = TAU * p as f64 / q as f64;
    let mut rng = rng_for(seed ^ 0x72617469);

    'attempt: for _ in 0..MAX_RETRIES {
        let pivots = convex_polygon(&mut rng, n);
        let probe_tol = Tolerance::new(1e-9, 24.0);
        // Fixed circles 0..n-2, each through its two pivots and a bulge point.
        let mut fixed = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let a = pivots[i];
            let b = pivots[(i + 1) % n];
            let mid = a.midpoint(b);
            let bulge = mid + (b - a).rot90() * rng.gen_range(0.25..0.8);
            match circumcircle(a, bulge, b, &probe_tol) {
                Ok(c) => fixed.push(c),
                Err(_) => continue 'attempt,
            }
        }
        let a_last = pivots[n - 1];
        let a_first = pivots[0];
        let Ok(bisector) = (a_first - a_last).rot90().normalized() else {
            continue 'attempt;
        };
        let mid = a_last.midpoint(a_first);

        let family = |s: f64| -> Chain {
            let center = mid + bisector * s;
            let mut circles = fixed.clone();
            circles.push(Circle::new(center, center.dist(a_first)));
            let mut choice: Vec<PivotChoice> = (1..n)
                .map(|i| PivotChoice::Explicit(pivots[i]))
                .collect();
            choice.push(PivotChoice::Explicit(a_first));
            Chain::closed(circles, choice)
        };
        let defect = |s: f64| -> Option<f64> {
            let chain = family(s);
            let tol = chain.tolerance();
            chain.validate(&tol).ok()?;
            let report = chain::transfer_report(&chain, &tol).ok()?;
            Some(normalize_angle(report.total - target))
        };

        // Scan the parameter for a sign change without a branch-cut jump,
        // widening the range geometrically if necessary.
        let mut span = 2.0 * a_last.dist(a_first);
        let mut bracket = None;
        'widen: for _ in 0..4 {
            let steps = 160;
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=steps {
                let s = -span + 2.0 * span * k as f64 / steps as f64;
                let Some(g) = defect(s) else {
                    prev = None;
                    continue;
                };
                if let Some((s0, g0)) = prev {
                    if g0.signum() != g.signum() && (g - g0).abs() < PI {
                        bracket = Some((s0, g0, s, g));
                        break 'widen;
                    }
                }
                prev = Some((s, g));
            }
            span *= 2.0;
        }
        let Some((mut lo, mut glo, mut hi, _)) = bracket else {
            continue 'attempt;
        };
        for _ in 0..120 {
            let mid_s = 0.5 * (lo + hi);
            let Some(g) = defect(mid_s) else {
                continue 'attempt;
            };
            if g.signum() == glo.signum() {
                lo = mid_s;
                glo = g;
            } else {
                hi = mid_s;
            }
        }
        let chain = family(0.5 * (lo + hi));
        let tol = chain.tolerance();
        if chain.validate(&tol).is_err() {
            continue;
        }
        match chain::closure_order(&chain, q as usize, &tol) {
            Ok(Some(k)) if k as u64 == q => return Ok(chain),
            _ => continue,
        }
    }
    Err(SceneError::RetriesExhausted {
        what: "rational chain construction",
    })
}

/// Open analogue of the polygon-first generator: an open polyline, pivots on
/// its sides, circumcircles through consecutive pivots. Iterating from the
/// witness reproduces the polyline, and the forward-then-back doubling of
/// the chain closes.
pub fn gen_open_polygon(n: usize, seed: u64) -> Result<(Chain, Point), SceneError> {
    if n < 2 {
        return Err(SceneError::TooSmall { n, min: 2 });
    }
    let mut rng = rng_for(seed ^ 0x6f70656e);
    'attempt: for _ in 0..MAX_RETRIES {
        // Polyline along a jittered arc so consecutive sides never fold back.
        let sweep = rng.gen_range(0.6 * PI..1.3 * PI);
        let xs: Vec<Point> = (0..n)
            .map(|i| {
                let angle = sweep * i as f64 / (n.max(2) - 1) as f64
                    + rng.gen_range(-0.04 * sweep..0.04 * sweep);
                let radius = rng.gen_range(6.0..10.0);
                Point::new(radius * angle.cos(), radius * angle.sin())
            })
            .collect();
        let pivots: Vec<Point> = (0..n - 1)
            .map(|i| {
                let t = side_parameter(&mut rng);
                xs[i] + (xs[i + 1] - xs[i]) * t
            })
            .collect();

        let probe_tol = Tolerance::new(1e-9, 20.0);
        let free_point = |rng: &mut ChaCha8Rng, near: Point| {
            near + Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(1.0..4.0))
        };
        let mut circles = Vec::with_capacity(n);
        for i in 0..n {
            let trio = if i == 0 {
                (free_point(&mut rng, xs[0]), xs[0], pivots[0])
            } else if i == n - 1 {
                (pivots[n - 2], xs[n - 1], free_point(&mut rng, xs[n - 1]))
            } else {
                (pivots[i - 1], xs[i], pivots[i])
            };
            match circumcircle(trio.0, trio.1, trio.2, &probe_tol) {
                Ok(c) => circles.push(c),
                Err(_) => continue 'attempt,
            }
        }
        let chain = Chain::open(
            circles,
            pivots.iter().map(|p| PivotChoice::Explicit(*p)).collect(),
        );
        let tol = chain.tolerance();
        if chain.validate(&tol).is_err() {
            continue;
        }
        let witness = xs[0];
        let Ok(trace) = chain::iterate(&chain, witness, 1, None, &tol) else {
            continue;
        };
        let faithful = trace
            .vertices
            .iter()
            .zip(&xs)
            .all(|(v, x)| v.dist(*x) <= 1e-9 * tol.scene_scale);
        if !faithful {
            continue;
        }
        let Ok(doubled) = chain::doubled_chain(&chain, chain::ReturnPivots::Same, &tol) else {
            continue;
        };
        if !chain::is_closing(&doubled, &tol).unwrap_or(false) {
            continue;
        }
        return Ok((chain, witness));
    }
    Err(SceneError::RetriesExhausted {
        what: "open polygon construction",
    })
}

/// A valid but generically non-closing chain: circles on a ring with radii
/// chosen so every neighbouring pair intersects transversally.
pub fn gen_generic_chain(n: usize, seed: u64) -> Result<Chain, SceneError> {
    if n < 3 {
        return Err(SceneError::TooSmall { n, min: 3 });
    }
    let mut rng = rng_for(seed ^ 0x67656e65);
    for _ in 0..MAX_RETRIES {
        let ring = rng.gen_range(7.0..10.0);
        let base = TAU / n as f64;
        let gap = 2.0 * ring * (base / 2.0).sin();
        let circles: Vec<Circle> = (0..n)
            .map(|i| {
                let angle = base * i as f64 + rng.gen_range(-0.1 * base..0.1 * base);
                let center = Point::new(ring * angle.cos(), ring * angle.sin());
                Circle::new(center, gap * rng.gen_range(0.55..0.8))
            })
            .collect();
        let pivots = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    PivotChoice::A
                } else {
                    PivotChoice::B
                }
            })
            .collect();
        let chain = Chain::closed(circles, pivots);
        let tol = chain.tolerance();
        if chain.validate(&tol).is_ok() {
            return Ok(chain);
        }
    }
    Err(SceneError::RetriesExhausted {
        what: "generic chain construction",
    })
}
