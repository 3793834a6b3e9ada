//! Finite-dimensional Lie algebras given by exact structure constants.
//!
//! Generators are numbered `1..=n` in every public signature. A bracket
//! `[z_i, z_j] = sum_k c_ij^k z_k` is stored for `i < j` only; the other
//! orderings follow from antisymmetry.

mod catalog;
mod spec;

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use catalog::{catalog, catalog_entry, catalog_get, catalog_spec, paper_basis, CatalogEntry};
pub use spec::{load_algebra, serialize_algebra, AlgebraSpec, BracketSpec, CoefExpr, Constraint};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = num::BigRational;

/// Parameter bindings, e.g. `alpha -> -1`.
pub type Bindings = BTreeMap<String, Rational>;

/// Parses `"p/q"` or `"p"` (no decimal point) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    if trimmed.is_empty() || trimmed.contains('.') {
        return Err(bad());
    }
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: num::BigInt = num.parse().map_err(|_| bad())?;
    let den: num::BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(Rational::new(num, den))
}

/// Shorthand for an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(value.into())
}

/// Shorthand for `num / den`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Parses a `name=p/q` binding as given on the command line.
pub fn parse_binding(text: &str) -> Result<(String, Rational)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected name=value, got `{text}`")))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::Parse(format!("empty parameter name in `{text}`")));
    }
    Ok((name.to_string(), parse_rational(value)?))
}

/// The Lie bracket of `g` on a fixed basis `z_1..z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    // dense c[(i * n + j) * n + k], 0-based, antisymmetric in (i, j)
    coeffs: Vec<Rational>,
}

impl StructureConstants {
    /// The abelian algebra of dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            coeffs: vec![Rational::zero(); dim * dim * dim],
        }
    }

    /// Builds constants from `((i, j), [c^1, .., c^n])` entries with `1 <= i < j <= n`.
    ///
    /// The Jacobi identity is not checked here; see [`check_jacobi`] and
    /// [`StructureConstants::validated`].
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Vec<Rational>)>,
    {
        if dim == 0 {
            return Err(Error::IndexOutOfRange("dimension must be at least 1".into()));
        }
        let mut sc = Self::zero(dim);
        for ((i, j), out) in entries {
            sc.set(i, j, out)?;
        }
        Ok(sc)
    }

    /// Sets `[z_i, z_j]` for `i < j` (and implicitly `[z_j, z_i]`).
    pub fn set(&mut self, i: usize, j: usize, out: Vec<Rational>) -> Result<()> {
        let n = self.dim;
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::IndexOutOfRange(format!(
                "bracket pair ({i}, {j}) must satisfy 1 <= i < j <= {n}"
            )));
        }
        if out.len() != n {
            return Err(Error::IndexOutOfRange(format!(
                "bracket ({i}, {j}) has {} coefficients, expected {n}",
                out.len()
            )));
        }
        for (k, c) in out.into_iter().enumerate() {
            let (a, b) = (self.offset(i - 1, j - 1, k), self.offset(j - 1, i - 1, k));
            self.coeffs[b] = -&c;
            self.coeffs[a] = c;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// `c_ij^k` with 0-based indices.
    #[inline]
    pub(crate) fn coeff0(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.coeffs[self.offset(i, j, k)]
    }

    /// `c_ij^k` with 1-based indices; any ordering of `i`, `j` is accepted.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.coeff0(i - 1, j - 1, k - 1)
    }

    /// `[z_i, z_j]` as a coefficient vector (1-based indices, any order).
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.dim)
            .map(|k| self.coeff0(i - 1, j - 1, k).clone())
            .collect()
    }

    /// Nonzero brackets `((i, j), out)` with `i < j`, in lexicographic order.
    pub fn entries(&self) -> Vec<((usize, usize), Vec<Rational>)> {
        let mut out = Vec::new();
        for i in 1..=self.dim {
            for j in i + 1..=self.dim {
                let b = self.bracket(i, j);
                if b.iter().any(|c| !c.is_zero()) {
                    out.push(((i, j), b));
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Returns `self` if the Jacobi identity holds, otherwise the violations.
    pub fn validated(self) -> Result<Self> {
        let violations = check_jacobi(&self);
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::Jacobi(violations))
        }
    }

    /// Human-readable bracket list, e.g. `[z1,z3] = z1`.
    pub fn describe(&self) -> Vec<String> {
        self.entries()
            .into_iter()
            .map(|((i, j), out)| {
                let terms: Vec<(String, Rational)> = out
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (format!("z{}", k + 1), c))
                    .collect();
                format!("[z{i},z{j}] = {}", format_combination(&terms))
            })
            .collect()
    }
}

/// One failing triple of the Jacobi identity together with its exact residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiViolation {
    /// 1-based `(i, j, k)` with `i < j < k`.
    pub triple: (usize, usize, usize),
    /// Coefficients of `[[z_i,z_j],z_k] + [[z_j,z_k],z_i] + [[z_k,z_i],z_j]`.
    pub residual: Vec<Rational>,
}

impl fmt::Display for JacobiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        let terms: Vec<String> = self.residual.iter().map(|c| c.to_string()).collect();
        write!(f, "({i},{j},{k}) residual [{}]", terms.join(", "))
    }
}

/// Lists every triple `i < j < k` where the cyclic Jacobi sum is nonzero.
pub fn check_jacobi(sc: &StructureConstants) -> Vec<JacobiViolation> {
    let n = sc.dim();
    // [[a,b],c] = sum_l c_ab^l [z_l, z_c]
    let nested = |a: usize, b: usize, c: usize, out: &mut Vec<Rational>| {
        for l in 0..n {
            let outer = sc.coeff0(a, b, l);
            if outer.is_zero() {
                continue;
            }
            for (m, slot) in out.iter_mut().enumerate() {
                let inner = sc.coeff0(l, c, m);
                if !inner.is_zero() {
                    *slot += outer * inner;
                }
            }
        }
    };
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut residual = vec![Rational::zero(); n];
                nested(i, j, k, &mut residual);
                nested(j, k, i, &mut residual);
                nested(k, i, j, &mut residual);
                if residual.iter().any(|c| !c.is_zero()) {
                    violations.push(JacobiViolation {
                        triple: (i + 1, j + 1, k + 1),
                        residual,
                    });
                }
            }
        }
    }
    violations
}

/// Renders `sum c_i * name_i` as `-2·u1 + z4`, `1/2·z1`, or `0`.
pub fn format_combination(terms: &[(String, Rational)]) -> String {
    let mut out = String::new();
    for (name, coef) in terms.iter().filter(|(_, c)| !c.is_zero()) {
        let negative = coef.is_negative();
        let magnitude = coef.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if !magnitude.is_one() {
            out.push_str(&magnitude.to_string());
            out.push('·');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc_from(dim: usize, brackets: &[((usize, usize), &[(usize, i64)])]) -> StructureConstants {
        let entries = brackets.iter().map(|&((i, j), out)| {
            let mut v = vec![Rational::zero(); dim];
            for &(k, c) in out {
                v[k - 1] = int(c);
            }
            ((i, j), v)
        });
        StructureConstants::from_entries(dim, entries).unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-2/4").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational(" 6/-3 ").unwrap(), int(-2));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("alpha").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn parses_bindings() {
        assert_eq!(parse_binding("alpha=-1/2").unwrap(), ("alpha".into(), frac(-1, 2)));
        assert!(parse_binding("alpha").is_err());
        assert!(parse_binding("=3").is_err());
    }

    #[test]
    fn antisymmetry_is_structural() {
        let sc = sc_from(3, &[((1, 2), &[(3, 1)]), ((1, 3), &[(1, 2)])]);
        assert_eq!(sc.bracket(2, 1), vec![int(0), int(0), int(-1)]);
        assert_eq!(sc.bracket(3, 1), vec![int(-2), int(0), int(0)]);
        assert!(sc.bracket(2, 2).iter().all(Zero::is_zero));
        assert_eq!(sc.coefficient(1, 2, 3), &int(1));
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(StructureConstants::from_entries(3, [((2, 1), vec![int(0); 3])]).is_err());
        assert!(StructureConstants::from_entries(3, [((1, 4), vec![int(0); 3])]).is_err());
        assert!(StructureConstants::from_entries(3, [((1, 2), vec![int(0); 2])]).is_err());
        assert!(StructureConstants::from_entries(0, []).is_err());
    }

    #[test]
    fn abelian_passes_jacobi() {
        assert!(check_jacobi(&StructureConstants::zero(4)).is_empty());
        assert!(StructureConstants::zero(4).is_abelian());
    }

    #[test]
    fn shifted_triple_table_satisfies_jacobi() {
        // [z1,z2] = z1, [z1,z3] = z2, [z2,z3] = z3
        let sc = sc_from(3, &[((1, 2), &[(1, 1)]), ((1, 3), &[(2, 1)]), ((2, 3), &[(3, 1)])]);
        assert!(check_jacobi(&sc).is_empty());
    }

    #[test]
    fn reports_violating_triple() {
        // [z1,z2] = z3, [z1,z3] = z1: cyclic sum is -z3
        let sc = sc_from(3, &[((1, 2), &[(3, 1)]), ((1, 3), &[(1, 1)])]);
        let v = check_jacobi(&sc);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].triple, (1, 2, 3));
        assert_eq!(v[0].residual, vec![int(0), int(0), int(-1)]);
        assert!(matches!(sc.validated(), Err(Error::Jacobi(_))));
    }

    #[test]
    fn formats_combinations() {
        let terms = vec![
            ("u1".to_string(), int(-2)),
            ("z4".to_string(), int(1)),
            ("u2".to_string(), frac(1, 2)),
            ("u3".to_string(), int(0)),
        ];
        assert_eq!(format_combination(&terms), "-2·u1 + z4 + 1/2·u2");
        assert_eq!(format_combination(&[]), "0");
        assert_eq!(format_combination(&[("z1".into(), int(-1))]), "-z1");
    }
}
