//! The three execution semantics.

pub mod distributed;
pub mod interleaved;
pub mod parallel;
