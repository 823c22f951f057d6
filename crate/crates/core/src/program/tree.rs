use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::program::ops::{in_range, saturate, Operator};
use crate::Scalar;

/// A node of a program in prefix order.
///
/// `weights[k]` scales the output of child `k` before it enters the operator.
/// Only the first `arity` entries are meaningful, and only for differentiable
/// operators; otherwise they stay at 1.
#[derive(Clone, Debug, PartialEq)]
pub enum Node<T> {
    Op { op: Operator, weights: [T; 2] },
    Var(usize),
    Const(T),
}

impl<T: Scalar> Node<T> {
    pub fn op(op: Operator) -> Self {
        Node::Op {
            op,
            weights: [T::one(); 2],
        }
    }

    #[inline]
    pub fn arity(&self) -> usize {
        match self {
            Node::Op { op, .. } => op.arity(),
            _ => 0,
        }
    }

    fn n_weights(&self) -> usize {
        match self {
            Node::Op { op, .. } if op.differentiable() => op.arity(),
            _ => 0,
        }
    }
}

/// One evolved feature: an expression tree stored as a prefix-ordered node list.
#[derive(Clone, Debug, PartialEq)]
pub struct Program<T> {
    nodes: Vec<Node<T>>,
}

#[inline]
fn weigh<T: Scalar>(w: T, c: T, weighted: bool) -> T {
    if weighted {
        saturate(w * c)
    } else {
        c
    }
}

impl<T: Scalar> Program<T> {
    /// Validates that `nodes` forms exactly one complete prefix tree.
    pub fn from_nodes(nodes: Vec<Node<T>>) -> Result<Self> {
        let mut need: usize = 1;
        for (i, n) in nodes.iter().enumerate() {
            if need == 0 {
                return Err(Error::Parse {
                    offset: i,
                    message: "trailing nodes after a complete tree".into(),
                });
            }
            need = need - 1 + n.arity();
            let finite = match n {
                Node::Op { weights, .. } => weights.iter().all(|w| w.is_finite()),
                Node::Const(c) => c.is_finite(),
                Node::Var(_) => true,
            };
            if !finite {
                return Err(Error::Parse {
                    offset: i,
                    message: "non-finite weight or constant".into(),
                });
            }
        }
        if need != 0 || nodes.is_empty() {
            return Err(Error::Parse {
                offset: nodes.len(),
                message: "incomplete tree".into(),
            });
        }
        Ok(Self { nodes })
    }

    pub fn var(index: usize) -> Self {
        Self {
            nodes: vec![Node::Var(index)],
        }
    }

    pub fn constant(value: T) -> Self {
        Self {
            nodes: vec![Node::Const(value)],
        }
    }

    pub fn unary(op: Operator, child: Program<T>) -> Self {
        assert_eq!(op.arity(), 1, "{op:?} is not unary");
        let mut nodes = vec![Node::op(op)];
        nodes.extend(child.nodes);
        Self { nodes }
    }

    pub fn binary(op: Operator, a: Program<T>, b: Program<T>) -> Self {
        assert_eq!(op.arity(), 2, "{op:?} is not binary");
        let mut nodes = vec![Node::op(op)];
        nodes.extend(a.nodes);
        nodes.extend(b.nodes);
        Self { nodes }
    }

    #[inline]
    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Node<T>] {
        &mut self.nodes
    }

    /// Internal nodes plus leaves.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Depth of every node; the root has depth 1.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depths = Vec::with_capacity(self.nodes.len());
        // open slots: (depth of the parent, children still expected)
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for n in &self.nodes {
            let depth = match stack.last_mut() {
                Some((d, remaining)) => {
                    *remaining -= 1;
                    *d + 1
                }
                None => 1,
            };
            while matches!(stack.last(), Some((_, 0))) {
                stack.pop();
            }
            depths.push(depth);
            if n.arity() > 0 {
                stack.push((depth, n.arity()));
            }
        }
        depths
    }

    pub fn depth(&self) -> usize {
        self.node_depths().into_iter().max().unwrap_or(0)
    }

    /// Exclusive end of the subtree rooted at node `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        let mut need = 1usize;
        let mut j = i;
        while need > 0 {
            need = need - 1 + self.nodes[j].arity();
            j += 1;
        }
        j
    }

    pub fn subtree(&self, i: usize) -> Program<T> {
        Program {
            nodes: self.nodes[i..self.subtree_end(i)].to_vec(),
        }
    }

    /// Copy with the subtree at `i` replaced by `donor`.
    pub fn replace_subtree(&self, i: usize, donor: &Program<T>) -> Program<T> {
        let end = self.subtree_end(i);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - i) + donor.nodes.len());
        nodes.extend_from_slice(&self.nodes[..i]);
        nodes.extend_from_slice(&donor.nodes);
        nodes.extend_from_slice(&self.nodes[end..]);
        Program { nodes }
    }

    pub fn max_attribute(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(j) => Some(*j),
                _ => None,
            })
            .max()
    }

    pub fn check_attributes(&self, d: usize) -> Result<()> {
        match self.max_attribute() {
            Some(index) if index >= d => Err(Error::AttributeOutOfRange { index, d }),
            _ => Ok(()),
        }
    }

    /// Number of trainable edge weights.
    pub fn n_weights(&self) -> usize {
        self.nodes.iter().map(Node::n_weights).sum()
    }

    /// Trainable weights in prefix order, children left to right.
    pub fn weights(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_weights());
        for n in &self.nodes {
            if let Node::Op { op, weights } = n {
                if op.differentiable() {
                    out.extend_from_slice(&weights[..op.arity()]);
                }
            }
        }
        out
    }

    /// Inverse of [`Program::weights`].
    pub fn set_weights(&mut self, values: &[T]) {
        assert_eq!(values.len(), self.n_weights(), "weight vector length");
        let mut it = values.iter();
        for n in &mut self.nodes {
            if let Node::Op { op, weights } = n {
                if op.differentiable() {
                    for w in weights.iter_mut().take(op.arity()) {
                        *w = *it.next().unwrap();
                    }
                }
            }
        }
    }

    pub fn evaluate(&self, ds: &Dataset<T>) -> Result<Vec<T>> {
        self.evaluate_matrix(ds.x())
    }

    /// Output for every row of `x`. Every value is finite.
    pub fn evaluate_matrix(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        self.check_attributes(x.cols())?;
        let n = x.rows();
        let mut stack: Vec<Vec<T>> = Vec::new();
        for node in self.nodes.iter().rev() {
            match node {
                Node::Var(j) => stack.push(x.col(*j).to_vec()),
                Node::Const(c) => stack.push(vec![*c; n]),
                Node::Op { op, weights } => {
                    let weighted = op.differentiable();
                    let mut a = stack.pop().expect("well-formed tree");
                    if op.arity() == 1 {
                        for v in &mut a {
                            *v = saturate(op.apply(weigh(weights[0], *v, weighted), T::zero()));
                        }
                    } else {
                        let b = stack.pop().expect("well-formed tree");
                        for (v, bv) in a.iter_mut().zip(&b) {
                            let u0 = weigh(weights[0], *v, weighted);
                            let u1 = weigh(weights[1], *bv, weighted);
                            *v = saturate(op.apply(u0, u1));
                        }
                    }
                    stack.push(a);
                }
            }
        }
        Ok(stack.pop().expect("well-formed tree"))
    }

    /// Child node indices of every node, `usize::MAX` when absent.
    fn child_indices(&self) -> Vec<[usize; 2]> {
        let mut out = vec![[usize::MAX; 2]; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (i, node) in self.nodes.iter().enumerate().rev() {
            for k in 0..node.arity() {
                out[i][k] = stack.pop().expect("well-formed tree");
            }
            stack.push(i);
        }
        out
    }

    pub fn gradient(&self, ds: &Dataset<T>) -> Result<Matrix<T>> {
        self.gradient_matrix(ds.x())
    }

    /// Jacobian of the program output with respect to its weights: one row per
    /// data row, one column per weight (ordering of [`Program::weights`]).
    ///
    /// Reverse mode over the whole batch: one forward sweep storing every node
    /// output, then one backward sweep in prefix order.
    pub fn gradient_matrix(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_attributes(x.cols())?;
        let n = x.rows();
        let n_params = self.n_weights();
        let mut jac = Matrix::zeros(n, n_params);
        if n_params == 0 {
            return Ok(jac);
        }
        let children = self.child_indices();

        let mut outputs: Vec<Vec<T>> = vec![Vec::new(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate().rev() {
            outputs[i] = match node {
                Node::Var(j) => x.col(*j).to_vec(),
                Node::Const(c) => vec![*c; n],
                Node::Op { op, weights } => {
                    let weighted = op.differentiable();
                    let a = &outputs[children[i][0]];
                    if op.arity() == 1 {
                        a.iter()
                            .map(|&v| saturate(op.apply(weigh(weights[0], v, weighted), T::zero())))
                            .collect()
                    } else {
                        let b = &outputs[children[i][1]];
                        a.iter()
                            .zip(b)
                            .map(|(&av, &bv)| {
                                saturate(op.apply(
                                    weigh(weights[0], av, weighted),
                                    weigh(weights[1], bv, weighted),
                                ))
                            })
                            .collect()
                    }
                }
            };
        }

        let mut param = 0usize;
        let mut adjoint: Vec<Vec<T>> = vec![Vec::new(); self.nodes.len()];
        adjoint[0] = vec![T::one(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            let Node::Op { op, weights } = node else {
                continue;
            };
            let weighted = op.differentiable();
            let arity = op.arity();
            let adj = std::mem::take(&mut adjoint[i]);
            let mut child_adj = vec![vec![T::zero(); n]; arity];
            for r in 0..n {
                let c = [
                    outputs[children[i][0]][r],
                    if arity == 2 { outputs[children[i][1]][r] } else { T::zero() },
                ];
                let mut u = [T::zero(); 2];
                // d u_k / d c_k and d u_k / d w_k
                let mut du_dc = [T::zero(); 2];
                let mut du_dw = [T::zero(); 2];
                for k in 0..arity {
                    if weighted {
                        let raw = weights[k] * c[k];
                        u[k] = saturate(raw);
                        if in_range(raw) {
                            du_dc[k] = weights[k];
                            du_dw[k] = c[k];
                        }
                    } else {
                        u[k] = c[k];
                        du_dc[k] = T::one();
                    }
                }
                let raw = op.apply(u[0], u[1]);
                if !in_range(raw) {
                    continue;
                }
                let parts = op.partials(u[0], u[1]);
                for k in 0..arity {
                    let g = adj[r] * parts[k];
                    if weighted {
                        jac.set(r, param + k, saturate(g * du_dw[k]));
                    }
                    child_adj[k][r] = saturate(g * du_dc[k]);
                }
            }
            for (k, a) in child_adj.into_iter().enumerate() {
                adjoint[children[i][k]] = a;
            }
            if weighted {
                param += arity;
            }
        }
        Ok(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn x(i: usize) -> Program<f64> {
        Program::var(i)
    }

    fn ds(rows: &[Vec<f64>]) -> Dataset<f64> {
        Dataset::from_rows(rows, vec![0.0; rows.len()]).unwrap()
    }

    #[test]
    fn add_of_attributes() {
        let p = Program::binary(Operator::Add, x(0), x(1));
        assert_eq!(p.evaluate(&ds(&[vec![1.0, 2.0]])).unwrap(), vec![3.0]);
        assert_eq!(p.node_count(), 3);
    }

    #[test]
    fn exp_of_cube() {
        let p = Program::unary(Operator::ExpC, Program::unary(Operator::Cube, x(0)));
        let v = p.evaluate(&ds(&[vec![1.0]])).unwrap()[0];
        assert!((v - E).abs() < 1e-15);
        assert_eq!(p.node_count(), 3);
        assert_eq!(p.depth(), 3);
    }

    #[test]
    fn analytic_quotient_at_zero_denominator() {
        let p = Program::binary(Operator::DivAq, x(0), x(1));
        assert_eq!(p.evaluate(&ds(&[vec![1.0, 0.0]])).unwrap(), vec![1.0]);
    }

    #[test]
    fn out_of_range_attribute() {
        let p = Program::binary(Operator::Add, x(0), x(3));
        assert!(matches!(
            p.evaluate(&ds(&[vec![1.0, 2.0]])),
            Err(Error::AttributeOutOfRange { index: 3, d: 2 })
        ));
    }

    #[test]
    fn weighted_square_gradient() {
        // (w * x1)^2, d/dw = 2 w x1^2 = 18 at w = 1, x1 = 3
        let p = Program::unary(Operator::Square, x(0));
        let jac = p.gradient(&ds(&[vec![3.0]])).unwrap();
        assert_eq!(jac.cols(), 1);
        assert_eq!(jac.get(0, 0), 18.0);
    }

    #[test]
    fn leaf_program_has_no_weights() {
        let p = Program::constant(0.5);
        let jac = p.gradient(&ds(&[vec![1.0], vec![2.0]])).unwrap();
        assert_eq!((jac.rows(), jac.cols()), (2, 0));
        let jac = x(0).gradient(&ds(&[vec![1.0]])).unwrap();
        assert_eq!(jac.cols(), 0);
    }

    #[test]
    fn sqrt_carries_no_weight_but_passes_gradient() {
        // sqrt(|w * x1|) with the weight on the square edge below it
        let p = Program::unary(Operator::SqrtA, Program::unary(Operator::Square, x(0)));
        assert_eq!(p.n_weights(), 1);
        let jac = p.gradient(&ds(&[vec![2.0]])).unwrap();
        // sqrt((w x)^2) = |w x|, derivative |x| = 2 at w = 1
        assert!((jac.get(0, 0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn depths_and_subtrees() {
        // add(cube(x1), mul(x2, 0.5))
        let p = Program::binary(
            Operator::Add,
            Program::unary(Operator::Cube, x(0)),
            Program::binary(Operator::Mul, x(1), Program::constant(0.5)),
        );
        assert_eq!(p.node_depths(), vec![1, 2, 3, 2, 3, 3]);
        assert_eq!(p.depth(), 3);
        assert_eq!(p.subtree_end(1), 3);
        assert_eq!(p.subtree_end(3), 6);
        assert_eq!(p.subtree(3).node_count(), 3);
        let q = p.replace_subtree(1, &x(1));
        assert_eq!(q.node_count(), 5);
        assert_eq!(q.evaluate(&ds(&[vec![0.0, 4.0]])).unwrap(), vec![6.0]);
    }

    #[test]
    fn weight_roundtrip() {
        let mut p = Program::binary(Operator::Mul, Program::unary(Operator::Sin, x(0)), x(1));
        assert_eq!(p.weights(), vec![1.0, 1.0, 1.0]);
        p.set_weights(&[2.0, 3.0, 4.0]);
        assert_eq!(p.weights(), vec![2.0, 3.0, 4.0]);
        let v = p.evaluate(&ds(&[vec![0.5, 1.0]])).unwrap()[0];
        assert!((v - 2.0 * (4.0f64 * 0.5).sin() * 3.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_node_lists() {
        assert!(Program::<f64>::from_nodes(vec![]).is_err());
        assert!(Program::<f64>::from_nodes(vec![Node::op(Operator::Add), Node::Var(0)]).is_err());
        assert!(Program::<f64>::from_nodes(vec![Node::Var(0), Node::Var(1)]).is_err());
    }
}
