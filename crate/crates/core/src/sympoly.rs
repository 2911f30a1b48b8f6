//! Univariate rational-coefficient polynomials and the parametrized
//! tournament matrices whose map densities expand into them.

use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rat, rat, Rat};
use crate::stepton::TournamentMatrix;
use crate::tournament::Tournament;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SympolyError {
    #[error("parametrized matrices capped at order 4, got {0}")]
    OrderTooLarge(usize),
    #[error("pattern on {0} vertices exceeds the 6-vertex bound")]
    PatternTooLarge(usize),
    #[error("invalid parametrized matrix: {0}")]
    InvalidMatrix(String),
    #[error("{0} outside the matrix domain [-1/2, 1/2]")]
    OutsideDomain(String),
    #[error("unknown matrix name {0:?}; expected A_x, B_x or C_x")]
    UnknownMatrix(String),
}

/// Dense univariate polynomial with exact rational coefficients; index =
/// degree, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalPolynomial {
    coeffs: Vec<Rat>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> RationalPolynomial {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> RationalPolynomial {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> RationalPolynomial {
        RationalPolynomial::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, degree: usize) -> Rat {
        self.coeffs.get(degree).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Horner evaluation in exact arithmetic.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// The polynomial p(-x): odd coefficients negate.
    pub fn substitute_neg_x(&self) -> RationalPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| if d % 2 == 1 { -c.clone() } else { c.clone() })
            .collect();
        RationalPolynomial::new(coeffs)
    }

    pub fn has_only_even_terms(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(d, c)| d % 2 == 0 || c.is_zero())
    }

    fn mul_affine(&self, c0: &Rat, c1: &Rat) -> RationalPolynomial {
        let mut out = vec![Rat::zero(); self.coeffs.len() + 1];
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c0.is_zero() {
                out[d] += c * c0;
            }
            if !c1.is_zero() {
                out[d + 1] += c * c1;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let abs = c.abs();
            match d {
                0 => write!(f, "{}", format_rat(&abs))?,
                1 => write!(f, "{} x", format_rat(&abs))?,
                _ => write!(f, "{} x^{d}", format_rat(&abs))?,
            }
        }
        Ok(())
    }
}

/// Square matrix of affine forms c0 + c1*x with entry(i,j) + entry(j,i) = 1
/// identically and all entries inside `[0,1]` for x in `[-1/2, 1/2]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamMatrix {
    c0: Vec<Vec<Rat>>,
    c1: Vec<Vec<Rat>>,
}

impl ParamMatrix {
    pub fn new(c0: Vec<Vec<Rat>>, c1: Vec<Vec<Rat>>) -> Result<ParamMatrix, SympolyError> {
        let n = c0.len();
        if n == 0 || c1.len() != n || c0.iter().chain(&c1).any(|row| row.len() != n) {
            return Err(SympolyError::InvalidMatrix("ragged or empty matrix".into()));
        }
        let one = Rat::one();
        for i in 0..n {
            for j in 0..n {
                if &c0[i][j] + &c0[j][i] != one || !(&c1[i][j] + &c1[j][i]).is_zero() {
                    return Err(SympolyError::InvalidMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) do not sum to 1 identically"
                    )));
                }
                let half = rat(1, 2);
                for endpoint in [&c0[i][j] + &c1[i][j] * &half, &c0[i][j] - &c1[i][j] * &half] {
                    if endpoint < Rat::zero() || endpoint > one {
                        return Err(SympolyError::InvalidMatrix(format!(
                            "entry ({i},{j}) leaves [0,1] on the domain"
                        )));
                    }
                }
            }
        }
        Ok(ParamMatrix { c0, c1 })
    }

    pub fn order(&self) -> usize {
        self.c0.len()
    }

    pub fn constant_part(&self, i: usize, j: usize) -> &Rat {
        &self.c0[i][j]
    }

    pub fn linear_part(&self, i: usize, j: usize) -> &Rat {
        &self.c1[i][j]
    }

    /// Instantiates the matrix at a fixed x in [-1/2, 1/2].
    pub fn at(&self, x: &Rat) -> Result<TournamentMatrix, SympolyError> {
        if x < &rat(-1, 2) || x > &rat(1, 2) {
            return Err(SympolyError::OutsideDomain(format_rat(x)));
        }
        let n = self.order();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &self.c0[i][j] + &self.c1[i][j] * x)
                    .collect()
            })
            .collect();
        TournamentMatrix::new(entries)
            .map_err(|e| SympolyError::InvalidMatrix(e.to_string()))
    }

    pub fn transpose(&self) -> ParamMatrix {
        let n = self.order();
        let flip = |m: &Vec<Vec<Rat>>| {
            (0..n)
                .map(|i| (0..n).map(|j| m[j][i].clone()).collect())
                .collect()
        };
        ParamMatrix {
            c0: flip(&self.c0),
            c1: flip(&self.c1),
        }
    }
}

fn affine_rows(rows: &[&[(i64, i64)]]) -> ParamMatrix {
    let c0 = rows
        .iter()
        .map(|r| r.iter().map(|&(n, _)| rat(n, 2)).collect())
        .collect();
    let c1 = rows
        .iter()
        .map(|r| r.iter().map(|&(_, s)| rat(s, 1)).collect())
        .collect();
    ParamMatrix::new(c0, c1).expect("built-in matrices are valid")
}

/// The 2x2 matrix with off-diagonal entries 1/2 -+ x.
pub fn param_a() -> ParamMatrix {
    affine_rows(&[&[(1, 0), (1, -1)], &[(1, 1), (1, 0)]])
}

/// The circulant 3x3 matrix with first row (1/2, 1/2 - x, 1/2 + x).
pub fn param_b() -> ParamMatrix {
    affine_rows(&[
        &[(1, 0), (1, -1), (1, 1)],
        &[(1, 1), (1, 0), (1, -1)],
        &[(1, -1), (1, 1), (1, 0)],
    ])
}

/// The 4x4 matrix whose last row is (1/2 + x, 1/2 + x, 1/2 + x, 1/2).
pub fn param_c() -> ParamMatrix {
    affine_rows(&[
        &[(1, 0), (1, -1), (1, 1), (1, -1)],
        &[(1, 1), (1, 0), (1, -1), (1, -1)],
        &[(1, -1), (1, 1), (1, 0), (1, -1)],
        &[(1, 1), (1, 1), (1, 1), (1, 0)],
    ])
}

/// The three built-in parametrized matrices keyed by their display names.
pub fn builtin_matrices() -> Vec<(&'static str, ParamMatrix)> {
    vec![("A_x", param_a()), ("B_x", param_b()), ("C_x", param_c())]
}

pub fn matrix_by_name(name: &str) -> Result<ParamMatrix, SympolyError> {
    match name.trim() {
        "A_x" | "A" => Ok(param_a()),
        "B_x" | "B" => Ok(param_b()),
        "C_x" | "C" => Ok(param_c()),
        other => Err(SympolyError::UnknownMatrix(other.to_string())),
    }
}

/// d*(h, m) with uniform weights, expanded symbolically: the exact polynomial
/// sum over all l^k maps of l^-k times the product of edge entries.
pub fn d_star_poly(h: &Tournament, m: &ParamMatrix) -> Result<RationalPolynomial, SympolyError> {
    let l = m.order();
    if l > 4 {
        return Err(SympolyError::OrderTooLarge(l));
    }
    let k = h.vertex_count();
    if k > 6 {
        return Err(SympolyError::PatternTooLarge(k));
    }
    let mut acc = RationalPolynomial::zero();
    let mut assignment = vec![0usize; k];
    let unit = RationalPolynomial::constant(Rat::one());
    poly_rec(h, m, 0, &unit, &mut assignment, &mut acc);
    let scale = rat(1, (l as i64).pow(k as u32));
    Ok(RationalPolynomial::new(
        acc.coefficients().iter().map(|c| c * &scale).collect(),
    ))
}

fn poly_rec(
    h: &Tournament,
    m: &ParamMatrix,
    depth: usize,
    partial: &RationalPolynomial,
    assignment: &mut [usize],
    acc: &mut RationalPolynomial,
) {
    let k = h.vertex_count();
    if depth == k {
        let mut merged = vec![Rat::zero(); acc.coefficients().len().max(partial.coefficients().len())];
        for (d, c) in acc.coefficients().iter().enumerate() {
            merged[d] += c;
        }
        for (d, c) in partial.coefficients().iter().enumerate() {
            merged[d] += c;
        }
        *acc = RationalPolynomial::new(merged);
        return;
    }
    'blocks: for block in 0..m.order() {
        assignment[depth] = block;
        let mut p = partial.clone();
        for prev in 0..depth {
            let (i, j) = if h.beats(depth, prev) {
                (block, assignment[prev])
            } else {
                (assignment[prev], block)
            };
            p = p.mul_affine(m.constant_part(i, j), m.linear_part(i, j));
            if p.is_zero() {
                continue 'blocks;
            }
        }
        poly_rec(h, m, depth + 1, &p, assignment, acc);
    }
}

/// Exact Horner evaluation of `p` at `x`.
pub fn evaluate(p: &RationalPolynomial, x: &Rat) -> Rat {
    p.eval(x)
}

/// Scans an ascending grid of `steps + 1` rationals over [lo, hi] and returns
/// the first x with p(x) strictly above the threshold.
pub fn find_exceeding(
    p: &RationalPolynomial,
    threshold: &Rat,
    lo: &Rat,
    hi: &Rat,
    steps: usize,
) -> Option<Rat> {
    assert!(steps >= 1 && lo < hi);
    let span = hi - lo;
    for i in 0..=steps {
        let x = lo + &span * rat(i as i64, steps as i64);
        if &p.eval(&x) > threshold {
            return Some(x);
        }
    }
    None
}
