use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == s)
    }
}

/// Expression tree in the variables `u` and `v`.
///
/// Literals produced by the parser are never negative; a leading minus is a
/// [`Expr::Neg`] node. Use [`Expr::num`] to build literals so that printing
/// and re-parsing gives back the same tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(c: f64) -> Expr {
        if c.is_sign_negative() && c != 0.0 {
            Expr::Neg(Box::new(Expr::Num(-c)))
        } else {
            Expr::Num(c.abs())
        }
    }

    pub fn u() -> Expr {
        Expr::Var(Var::U)
    }

    pub fn v() -> Expr {
        Expr::Var(Var::V)
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Pow, a, b)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(c) if *c == 0.0)
    }

    /// Replace `u` and `v` by the given expressions.
    pub fn substitute(&self, u: &Expr, v: &Expr) -> Expr {
        match self {
            Expr::Num(c) => Expr::Num(*c),
            Expr::Var(Var::U) => u.clone(),
            Expr::Var(Var::V) => v.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(u, v)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(u, v), b.substitute(u, v)),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(u, v)),
        }
    }

    /// Sum of terms, skipping literal zeros.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut acc: Option<Expr> = None;
        for t in terms {
            if t.is_zero() {
                continue;
            }
            acc = Some(match acc {
                None => t,
                Some(a) => Expr::add(a, t),
            });
        }
        acc.unwrap_or(Expr::Num(0.0))
    }

    /// Product that folds literal zeros and ones.
    pub fn product(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Num(x), _) if *x == 0.0 => Expr::Num(0.0),
            (_, Expr::Num(y)) if *y == 0.0 => Expr::Num(0.0),
            (Expr::Num(x), _) if *x == 1.0 => b,
            (_, Expr::Num(y)) if *y == 1.0 => a,
            _ => Expr::mul(a, b),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn write_min(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_min(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::V) => write!(f, "v"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_min(f, 3)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_min(f, 0)?;
                write!(f, ")")
            }
            Expr::Bin(op, a, b) => {
                let (sym, lmin, rmin) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                a.write_min(f, lmin)?;
                write!(f, "{sym}")?;
                b.write_min(f, rmin)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_min(f, 0)
    }
}
