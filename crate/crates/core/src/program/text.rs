//! Infix rendering and the matching parser.
//!
//! Grammar of a rendered program:
//!
//! ```text
//! expr  := var | number | '(' arg OP arg ')' | NAME '(' arg [',' arg] ')'
//! arg   := [number '*'] expr          weight present iff the operator is weighted
//! var   := 'x' INDEX                  1-based attribute index
//! OP    := '+' | '-' | '*'
//! NAME  := aq | sin | cos | exp | log | sqrt | square | cube | tanh
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so parsing a rendering
//! reproduces every weight and constant exactly.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::program::ops::Operator;
use crate::program::tree::{Node, Program};
use crate::Scalar;

pub fn render<T: Scalar>(p: &Program<T>) -> String {
    let mut out = String::new();
    render_at(p.nodes(), 0, &mut out);
    out
}

fn render_at<T: Scalar>(nodes: &[Node<T>], i: usize, out: &mut String) -> usize {
    match &nodes[i] {
        Node::Var(j) => {
            let _ = write!(out, "x{}", j + 1);
            i + 1
        }
        Node::Const(c) => {
            let _ = write!(out, "{:?}", c.as_f64());
            i + 1
        }
        Node::Op { op, weights } => {
            let weighted = op.differentiable();
            let mut next = i + 1;
            let arg = |k: usize, next: &mut usize, out: &mut String| {
                if weighted {
                    let _ = write!(out, "{:?}*", weights[k].as_f64());
                }
                *next = render_at(nodes, *next, out);
            };
            if op.is_infix() {
                out.push('(');
                arg(0, &mut next, out);
                let _ = write!(out, " {} ", op.symbol());
                arg(1, &mut next, out);
                out.push(')');
            } else {
                out.push_str(op.symbol());
                out.push('(');
                arg(0, &mut next, out);
                if op.arity() == 2 {
                    out.push_str(", ");
                    arg(1, &mut next, out);
                }
                out.push(')');
            }
            next
        }
    }
}

/// Parses the output of [`render`].
pub fn parse<T: Scalar>(text: &str) -> Result<Program<T>> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Program::from_nodes(parser.nodes)
}

struct Parser<'a, T> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Parser<'_, T> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn at_number(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => true,
            Some(b'-') => matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_digit() || *c == b'.'),
            _ => false,
        }
    }

    fn number(&mut self) -> Result<T> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        if bytes.get(i) == Some(&b'-') {
            i += 1;
        }
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).expect("ascii slice");
        let v: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        self.pos = i;
        T::from_f64(v)
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error("number not representable"))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    /// Parses one weighted-or-plain argument, returning its weight.
    fn arg(&mut self, weighted: bool) -> Result<T> {
        if self.at_number() {
            let save = (self.pos, self.nodes.len());
            let v = self.number()?;
            if self.peek() == Some(b'*') {
                if !weighted {
                    return Err(self.error("weight on an unweighted edge"));
                }
                self.pos += 1;
                self.expr()?;
                return Ok(v);
            }
            // a bare constant leaf; re-read it as an expression
            self.pos = save.0;
            self.nodes.truncate(save.1);
        }
        self.expr()?;
        Ok(T::one())
    }

    fn expr(&mut self) -> Result<()> {
        if self.at_number() {
            let v = self.number()?;
            self.nodes.push(Node::Const(v));
            return Ok(());
        }
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let at = self.nodes.len();
                self.nodes.push(Node::op(Operator::Add));
                let w0 = self.arg(true)?;
                let op = match self.peek() {
                    Some(b'+') => Operator::Add,
                    Some(b'-') => Operator::Sub,
                    Some(b'*') => Operator::Mul,
                    _ => return Err(self.error("expected infix operator")),
                };
                self.pos += 1;
                let w1 = self.arg(true)?;
                self.expect(b')')?;
                self.nodes[at] = Node::Op { op, weights: [w0, w1] };
                Ok(())
            }
            Some(b'x') => {
                let name = self.ident();
                match name[1..].parse::<usize>() {
                    Ok(i) if i >= 1 => {
                        self.nodes.push(Node::Var(i - 1));
                        Ok(())
                    }
                    _ => Err(self.error(&format!("bad attribute `{name}`"))),
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                let op = Operator::from_function_name(&name)
                    .ok_or_else(|| self.error(&format!("unknown function `{name}`")))?;
                self.expect(b'(')?;
                let at = self.nodes.len();
                self.nodes.push(Node::op(op));
                let weighted = op.differentiable();
                let mut weights = [T::one(); 2];
                weights[0] = self.arg(weighted)?;
                if op.arity() == 2 {
                    self.expect(b',')?;
                    weights[1] = self.arg(weighted)?;
                }
                self.expect(b')')?;
                self.nodes[at] = Node::Op { op, weights };
                Ok(())
            }
            _ => Err(self.error("expected expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_example_feature() {
        let p: Program<f64> = Program::unary(Operator::ExpC, Program::unary(Operator::Cube, Program::var(0)));
        assert_eq!(render(&p), "exp(1.0*cube(1.0*x1))");
        let q: Program<f64> = Program::binary(Operator::Sub, Program::var(0), Program::constant(-0.25));
        assert_eq!(render(&q), "(1.0*x1 - 1.0*-0.25)");
        let s: Program<f64> = Program::unary(Operator::SqrtA, Program::constant(0.5));
        assert_eq!(render(&s), "sqrt(0.5)");
    }

    #[test]
    fn parses_back() {
        for text in [
            "exp(1.0*cube(1.0*x1))",
            "(1.0*x1 - 1.0*-0.25)",
            "sqrt(0.5)",
            "aq(2.5*x2, -1e-7*sqrt(x1))",
            "(1.0*(0.5*x1 * 2.0*x3) + 1.0*tanh(1.0*0.125))",
        ] {
            let p: Program<f64> = parse(text).unwrap();
            assert_eq!(render(&p), text);
        }
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "x0", "foo(x1)", "(x1 + )", "sqrt(2.0*x1)", "x1 x2", "cube(x1"] {
            assert!(parse::<f64>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn missing_weight_defaults_to_one() {
        let p: Program<f64> = parse("(x1 + x2)").unwrap();
        assert_eq!(p.weights(), vec![1.0, 1.0]);
    }
}
