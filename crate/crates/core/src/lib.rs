//! Rotation sets of degree-one maps on the lifted sigma graph.

pub mod analysis;
pub mod circle;
pub mod covering;
pub mod cycles;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod mapfile;
pub mod markov;
pub mod oracle;
pub mod pamap;
pub mod par;
pub mod pl;
pub mod rational;
pub mod rotset;
pub mod space;
pub mod sweep;

pub use error::{Error, Result};
pub use pamap::PAMap;
pub use rational::Rational;
pub use space::{BranchSegment, Point, Sigma};
