//! Circle chain calculus.
//!
//! A chain is an ordered sequence of circles in which every pair of
//! neighbouring circles intersects or touches. Each joint carries a pivot
//! (one of the two common points), and the pivot map sends a point on one
//! circle to the second intersection of the chord through the pivot with the
//! next circle. This crate implements the geometric kernel, the transfer
//! angle calculus with its closing criterion, incidence reports for the
//! derived circles traced by side-line intersections, Möbius invariance
//! checks, deterministic scene generators, and JSON/SVG interchange formats.

pub mod chain;
pub mod doc;
pub mod geom;
pub mod incidence;
pub mod mobius;
pub mod scenes;
pub mod svg;

pub use chain::{Chain, JointAngles, PivotChoice, Trace, TransferReport};
pub use geom::{Angle, Circle, CircleRelation, Line, Point, Tolerance};
