//! Inputs shared by the benchmarks.

use vknot::braids::{close_braid, BraidWord};
use vknot::catalog::lookup;
use vknot::GaussCode;

/// Closure of `σ₁^k`: the (2, k) torus knot or link with `k` crossings.
pub fn torus(k: usize) -> GaussCode {
    close_braid(&BraidWord::parse(&"s1 ".repeat(k), 2).expect("valid word"))
}

pub fn catalog_code(name: &str) -> GaussCode {
    lookup(name).expect("catalog name").code().expect("a Gauss entry").clone()
}
