//! Expression-tree features with trainable edge weights.

mod individual;
mod ops;
mod random;
mod text;
mod tree;

pub use individual::Individual;
pub use ops::{saturate, Operator, EXP_CLAMP};
pub use random::{random_leaf, random_program, EPHEMERAL_RANGE, P_ATTRIBUTE, P_LEAF};
pub use text::{parse, render};
pub use tree::{Node, Program};
