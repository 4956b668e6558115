//! Expression-tree symbolic differentiator.
//!
//! This is the reference derivative route used by the test suite to
//! cross-check dual-number propagation. It never touches
//! [`DualScalar`](crate::scalars::DualScalar): derivatives come from
//! rewriting the tree (sum/product/quotient rules) and evaluating the result
//! over plain [`Scalar`]s.
//!
//! [`Expr`] also implements [`ExactScalar`], so generic formula code can be
//! run once over `Expr` to capture the formula as a tree and differentiate it
//! symbolically. `Zero`/`One` on `Expr` are structural (a literal constant),
//! which is all the generic code relies on.

use std::rc::Rc;

use num_traits::{One, Zero};

use crate::scalars::{DivisionByZero, ExactScalar, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub enum Expr {
    Const(Scalar),
    Var(usize),
    Add(Rc<Expr>, Rc<Expr>),
    Sub(Rc<Expr>, Rc<Expr>),
    Mul(Rc<Expr>, Rc<Expr>),
    Div(Rc<Expr>, Rc<Expr>),
    Neg(Rc<Expr>),
}

impl Expr {
    pub fn constant(v: Scalar) -> Expr {
        Expr::Const(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn is_const_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    fn is_const_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// Smart constructors fold the identities 0+x, x·0, x·1, x−0, 0−x, x/1
    /// so derivative trees stay small. No other rewriting happens.
    fn add(a: Expr, b: Expr) -> Expr {
        if a.is_const_zero() {
            b
        } else if b.is_const_zero() {
            a
        } else {
            Expr::Add(Rc::new(a), Rc::new(b))
        }
    }

    fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_const_zero() {
            a
        } else if a.is_const_zero() {
            Expr::neg(b)
        } else {
            Expr::Sub(Rc::new(a), Rc::new(b))
        }
    }

    fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_const_zero() || b.is_const_zero() {
            Expr::Const(Scalar::zero())
        } else if a.is_const_one() {
            b
        } else if b.is_const_one() {
            a
        } else {
            Expr::Mul(Rc::new(a), Rc::new(b))
        }
    }

    fn div(a: Expr, b: Expr) -> Expr {
        if b.is_const_one() || a.is_const_zero() {
            a
        } else {
            Expr::Div(Rc::new(a), Rc::new(b))
        }
    }

    fn neg(a: Expr) -> Expr {
        if a.is_const_zero() {
            a
        } else {
            Expr::Neg(Rc::new(a))
        }
    }

    pub fn eval(&self, vars: &[Scalar]) -> Result<Scalar, DivisionByZero> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => a.eval(vars)?.checked_div(&b.eval(vars)?)?,
            Expr::Neg(a) => -a.eval(vars)?,
        })
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(Scalar::zero()),
            Expr::Var(i) => Expr::Const(if *i == var {
                Scalar::one()
            } else {
                Scalar::zero()
            }),
            Expr::Add(a, b) => Expr::add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(var), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = (a'b − ab') / b²
                let num = Expr::sub(
                    Expr::mul(a.derivative(var), (**b).clone()),
                    Expr::mul((**a).clone(), b.derivative(var)),
                );
                Expr::div(num, Expr::mul((**b).clone(), (**b).clone()))
            }
            Expr::Neg(a) => Expr::neg(a.derivative(var)),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl Zero for Expr {
    fn zero() -> Self {
        Expr::Const(Scalar::zero())
    }
    fn is_zero(&self) -> bool {
        self.is_const_zero()
    }
}

impl One for Expr {
    fn one() -> Self {
        Expr::Const(Scalar::one())
    }
}

impl ExactScalar for Expr {
    /// Fails only on a structurally zero divisor; value-level zero divisors
    /// surface at [`Expr::eval`] time.
    fn checked_div(&self, rhs: &Self) -> Result<Self, DivisionByZero> {
        if rhs.is_const_zero() {
            return Err(DivisionByZero);
        }
        Ok(Expr::div(self.clone(), rhs.clone()))
    }

    fn from_int(n: i64) -> Self {
        Expr::Const(Scalar::from_integer(n))
    }
}
