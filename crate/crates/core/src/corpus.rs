//! The shipped SUTs and their input specifications.

use crate::lang::{parse, Program};
use crate::specgen::SpecSet;

pub const TRIANGLE_SUT: &str = include_str!("../corpus/triangle.sut");
pub const FIND_MIDDLE_SUT: &str = include_str!("../corpus/find_middle.sut");
pub const TRIANGLE_SPEC: &str = include_str!("../corpus/triangle.spec");
pub const FIND_MIDDLE_SPEC: &str = include_str!("../corpus/find_middle.spec");

pub fn triangle() -> Program {
    parse(TRIANGLE_SUT).expect("shipped triangle.sut parses")
}

pub fn find_middle() -> Program {
    parse(FIND_MIDDLE_SUT).expect("shipped find_middle.sut parses")
}

pub fn triangle_spec() -> SpecSet {
    SpecSet::parse(TRIANGLE_SPEC).expect("shipped triangle.spec parses")
}

pub fn find_middle_spec() -> SpecSet {
    SpecSet::parse(FIND_MIDDLE_SPEC).expect("shipped find_middle.spec parses")
}
