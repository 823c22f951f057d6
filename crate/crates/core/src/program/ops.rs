use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Argument bound of the clamped exponential.
pub const EXP_CLAMP: f64 = 20.0;

/// The fixed function set. Every operator is total on finite inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Add,
    Sub,
    Mul,
    /// Analytic quotient `a / sqrt(1 + b^2)`.
    DivAq,
    Sin,
    Cos,
    /// `exp` with its argument clamped to `[-20, 20]`.
    ExpC,
    /// `sign(x) * ln(1 + |x|)`.
    LogP,
    /// `sqrt(|x|)`.
    SqrtA,
    Square,
    Cube,
    Tanh,
}

impl Operator {
    pub const ALL: [Operator; 12] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::DivAq,
        Operator::Sin,
        Operator::Cos,
        Operator::ExpC,
        Operator::LogP,
        Operator::SqrtA,
        Operator::Square,
        Operator::Cube,
        Operator::Tanh,
    ];

    pub fn arity(self) -> usize {
        match self {
            Operator::Add | Operator::Sub | Operator::Mul | Operator::DivAq => 2,
            _ => 1,
        }
    }

    /// Whether the edges into this operator carry trainable weights.
    ///
    /// `sqrt_a` has an unbounded derivative at zero, so it gets no weights;
    /// gradients still flow through it.
    pub fn differentiable(self) -> bool {
        !matches!(self, Operator::SqrtA)
    }

    /// Name used in rendered expressions. Add, sub and mul render infix.
    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::DivAq => "aq",
            Operator::Sin => "sin",
            Operator::Cos => "cos",
            Operator::ExpC => "exp",
            Operator::LogP => "log",
            Operator::SqrtA => "sqrt",
            Operator::Square => "square",
            Operator::Cube => "cube",
            Operator::Tanh => "tanh",
        }
    }

    pub fn from_function_name(name: &str) -> Option<Operator> {
        Operator::ALL
            .into_iter()
            .find(|op| op.symbol() == name && op.symbol().chars().all(char::is_alphabetic))
    }

    pub fn is_infix(self) -> bool {
        matches!(self, Operator::Add | Operator::Sub | Operator::Mul)
    }

    /// Raw (unsaturated) value. `b` is ignored for unary operators.
    #[inline]
    pub fn apply<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            Operator::Add => a + b,
            Operator::Sub => a - b,
            Operator::Mul => a * b,
            Operator::DivAq => a / (T::one() + b * b).sqrt(),
            Operator::Sin => a.sin(),
            Operator::Cos => a.cos(),
            Operator::ExpC => {
                let c = T::lit(EXP_CLAMP);
                a.max(-c).min(c).exp()
            }
            Operator::LogP => a.abs().ln_1p() * sign(a),
            Operator::SqrtA => a.abs().sqrt(),
            Operator::Square => a * a,
            Operator::Cube => a * a * a,
            Operator::Tanh => a.tanh(),
        }
    }

    /// Partial derivatives with respect to each argument.
    #[inline]
    pub fn partials<T: Scalar>(self, a: T, b: T) -> [T; 2] {
        let zero = T::zero();
        match self {
            Operator::Add => [T::one(), T::one()],
            Operator::Sub => [T::one(), -T::one()],
            Operator::Mul => [b, a],
            Operator::DivAq => {
                let q = T::one() + b * b;
                let s = q.sqrt();
                [T::one() / s, -a * b / (q * s)]
            }
            Operator::Sin => [a.cos(), zero],
            Operator::Cos => [-a.sin(), zero],
            Operator::ExpC => {
                let c = T::lit(EXP_CLAMP);
                if a.abs() <= c {
                    [a.exp(), zero]
                } else {
                    [zero, zero]
                }
            }
            Operator::LogP => [T::one() / (T::one() + a.abs()), zero],
            Operator::SqrtA => {
                if a == zero {
                    [zero, zero]
                } else {
                    [sign(a) / (T::lit(2.0) * a.abs().sqrt()), zero]
                }
            }
            Operator::Square => [T::lit(2.0) * a, zero],
            Operator::Cube => [T::lit(3.0) * a * a, zero],
            Operator::Tanh => {
                let t = a.tanh();
                [T::one() - t * t, zero]
            }
        }
    }
}

#[inline]
fn sign<T: Scalar>(a: T) -> T {
    if a > T::zero() {
        T::one()
    } else if a < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Clamps into `[-saturation, saturation]`, mapping NaN to zero.
#[inline]
pub fn saturate<T: Scalar>(v: T) -> T {
    let big = T::saturation();
    if v.is_nan() {
        T::zero()
    } else if v > big {
        big
    } else if v < -big {
        -big
    } else {
        v
    }
}

/// True when `saturate` leaves `v` untouched.
#[inline]
pub fn in_range<T: Scalar>(v: T) -> bool {
    v.is_finite() && v.abs() <= T::saturation()
}
