use rand::Rng;

use crate::program::ops::Operator;
use crate::program::tree::{Node, Program};
use crate::Scalar;

/// Probability that a non-forced node is a leaf while growing a tree.
pub const P_LEAF: f64 = 0.5;
/// Probability that a leaf is an attribute rather than an ephemeral constant.
pub const P_ATTRIBUTE: f64 = 0.8;
/// Ephemeral constants are drawn uniformly from `[-EPHEMERAL_RANGE, EPHEMERAL_RANGE]`.
pub const EPHEMERAL_RANGE: f64 = 1.0;

/// Grows a random tree of depth at most `depth_limit` over `d` attributes.
///
/// Each node is a leaf with probability [`P_LEAF`] (always at the depth
/// limit), otherwise an operator drawn uniformly from the function set.
/// All weights start at 1.
pub fn random_program<T: Scalar, R: Rng + ?Sized>(depth_limit: usize, d: usize, rng: &mut R) -> Program<T> {
    assert!(depth_limit >= 1, "depth_limit must be at least 1");
    assert!(d >= 1, "need at least one attribute");
    let mut nodes = Vec::new();
    grow(depth_limit, d, rng, &mut nodes);
    Program::from_nodes(nodes).expect("grown tree is complete")
}

fn grow<T: Scalar, R: Rng + ?Sized>(remaining: usize, d: usize, rng: &mut R, out: &mut Vec<Node<T>>) {
    if remaining == 1 || rng.gen_bool(P_LEAF) {
        out.push(random_leaf(d, rng));
        return;
    }
    let op = Operator::ALL[rng.gen_range(0..Operator::ALL.len())];
    out.push(Node::op(op));
    for _ in 0..op.arity() {
        grow(remaining - 1, d, rng, out);
    }
}

pub fn random_leaf<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Node<T> {
    if rng.gen_bool(P_ATTRIBUTE) {
        Node::Var(rng.gen_range(0..d))
    } else {
        Node::Const(T::lit(rng.gen_range(-EPHEMERAL_RANGE..=EPHEMERAL_RANGE)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn depth_one_is_leaf() {
        let mut r = rng::seeded(0);
        for _ in 0..100 {
            let p: Program<f64> = random_program(1, 3, &mut r);
            assert_eq!(p.node_count(), 1);
        }
    }

    #[test]
    fn depth_limit_respected() {
        let mut r = rng::seeded(1);
        let mut deepest = 0;
        for _ in 0..1000 {
            let p: Program<f64> = random_program(6, 4, &mut r);
            deepest = deepest.max(p.depth());
            p.check_attributes(4).unwrap();
            assert!(p.weights().iter().all(|w| *w == 1.0));
        }
        assert!(deepest <= 6);
        assert!(deepest >= 4, "grow should reach deep trees sometimes");
    }

    #[test]
    fn same_seed_same_tree() {
        let a: Vec<Program<f64>> = (0..20).scan(rng::seeded(5), |r, _| Some(random_program(6, 3, r))).collect();
        let b: Vec<Program<f64>> = (0..20).scan(rng::seeded(5), |r, _| Some(random_program(6, 3, r))).collect();
        assert_eq!(a, b);
    }
}
