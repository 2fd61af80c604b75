pub mod code;

pub use code::{parse_gauss, CodeError, CodeKind, GaussCode, Passage, Sign, Token};
pub mod surface;
pub mod moves;
pub mod poly;
pub mod statesum;
pub mod algebra;
pub mod alexander;
pub mod quaternion;
pub mod homology;
pub mod braids;
pub mod planar;
pub mod catalog;
pub mod report;
