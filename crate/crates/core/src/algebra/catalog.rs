//! Built-in algebras: the abelian algebras, the non-abelian 2-dimensional
//! algebra, the four classes of non-abelian 3-dimensional algebras, sl(2) on
//! an e/f/h basis and gl(2).

use std::collections::BTreeMap;

use num::Zero;

use super::spec::{AlgebraSpec, BracketSpec, CoefExpr, Constraint};
use super::{frac, int, Bindings, Rational, StructureConstants};
use crate::error::{Error, Result};
use crate::exterior::{AliasBasis, Multivector};

/// Listing entry for `catalog`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub summary: String,
    pub has_paper_basis: bool,
}

const MAX_ABELIAN: usize = 6;

pub fn catalog() -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = (1..=MAX_ABELIAN)
        .map(|n| CatalogEntry {
            name: format!("abelian{n}"),
            dim: n,
            params: vec![],
            summary: format!("abelian Lie algebra of dimension {n}"),
            has_paper_basis: false,
        })
        .collect();
    let fixed: [(&str, usize, &[&str], &str, bool); 7] = [
        ("aff1", 2, &[], "[z1,z2]=z1", false),
        ("heis3", 3, &[], "[z1,z2]=z3 (derived algebra 1-dim, central)", true),
        ("g3d1n", 3, &[], "[z1,z2]=z2 (derived algebra 1-dim, not central)", true),
        ("g3d2", 3, &["alpha"], "[z1,z3]=z1, [z2,z3]=alpha z2, alpha != 0", true),
        ("g3d3", 3, &["alpha", "beta"], "[z1,z2]=z3, [z1,z3]=-beta z2, [z2,z3]=alpha z1", true),
        ("sl2_efh", 3, &[], "[z1,z2]=z3, [z1,z3]=2z1, [z2,z3]=-2z2", true),
        ("gl2", 4, &[], "gl(2) on E11, E12, E21, E22", false),
    ];
    out.extend(fixed.iter().map(|&(name, dim, params, summary, alias)| CatalogEntry {
        name: name.into(),
        dim,
        params: params.iter().map(|p| p.to_string()).collect(),
        summary: summary.into(),
        has_paper_basis: alias,
    }));
    out
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownAlgebra(name.to_string()))
}

fn bracket(i: usize, j: usize, out: &[(usize, CoefExpr)]) -> BracketSpec {
    BracketSpec {
        i,
        j,
        out: out.iter().cloned().collect::<BTreeMap<_, _>>(),
    }
}

fn konst(v: i64) -> CoefExpr {
    CoefExpr::Const(int(v))
}

fn nonzero(param: &str) -> Constraint {
    Constraint {
        param: param.into(),
        nonzero: true,
    }
}

/// The parametrised description of a catalog algebra.
pub fn catalog_spec(name: &str) -> Result<AlgebraSpec> {
    let spec = |dim, brackets, params: &[&str]| AlgebraSpec {
        name: name.to_string(),
        dim,
        brackets,
        params: params.iter().map(|p| p.to_string()).collect(),
        constraints: params.iter().map(|p| nonzero(p)).collect(),
    };
    if let Some(n) = name.strip_prefix("abelian") {
        return match n.parse::<usize>() {
            Ok(n) if (1..=MAX_ABELIAN).contains(&n) => Ok(spec(n, vec![], &[])),
            _ => Err(Error::UnknownAlgebra(name.to_string())),
        };
    }
    Ok(match name {
        "aff1" => spec(2, vec![bracket(1, 2, &[(1, konst(1))])], &[]),
        "heis3" => spec(3, vec![bracket(1, 2, &[(3, konst(1))])], &[]),
        "g3d1n" => spec(3, vec![bracket(1, 2, &[(2, konst(1))])], &[]),
        "g3d2" => spec(
            3,
            vec![
                bracket(1, 3, &[(1, konst(1))]),
                bracket(2, 3, &[(2, CoefExpr::param("alpha"))]),
            ],
            &["alpha"],
        ),
        "g3d3" => spec(
            3,
            vec![
                bracket(1, 2, &[(3, konst(1))]),
                bracket(1, 3, &[(2, CoefExpr::scaled_param(int(-1), "beta"))]),
                bracket(2, 3, &[(1, CoefExpr::param("alpha"))]),
            ],
            &["alpha", "beta"],
        ),
        "sl2_efh" => spec(
            3,
            vec![
                bracket(1, 2, &[(3, konst(1))]),
                bracket(1, 3, &[(1, konst(2))]),
                bracket(2, 3, &[(2, konst(-2))]),
            ],
            &[],
        ),
        "gl2" => AlgebraSpec::from_constants(name, &gl2()),
        _ => return Err(Error::UnknownAlgebra(name.to_string())),
    })
}

/// gl(2) on `z1..z4 = E11, E12, E21, E22` with `[E_ab, E_cd] = d_bc E_ad - d_da E_cb`.
fn gl2() -> StructureConstants {
    let units = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let index_of = |a: usize, b: usize| units.iter().position(|&u| u == (a, b)).unwrap();
    let mut entries = Vec::new();
    for (x, &(a, b)) in units.iter().enumerate() {
        for (y, &(c, d)) in units.iter().enumerate().skip(x + 1) {
            let mut out = vec![Rational::zero(); 4];
            if b == c {
                out[index_of(a, d)] += int(1);
            }
            if d == a {
                out[index_of(c, b)] -= int(1);
            }
            entries.push(((x + 1, y + 1), out));
        }
    }
    StructureConstants::from_entries(4, entries).expect("gl2 indices are in range")
}

/// Looks up a catalog algebra and binds its parameters.
pub fn catalog_get(name: &str, bindings: &Bindings) -> Result<StructureConstants> {
    catalog_spec(name)?.instantiate(bindings)
}

/// The named level-2 basis `u1, u2, u3` used for the catalog algebra's
/// multiplication table, or `None` when the canonical basis is used.
pub fn paper_basis(name: &str, bindings: &Bindings) -> Result<Option<AliasBasis>> {
    // canonical level-2 elements for n = 3 are (1,2), (1,3), (2,3)
    let two = |terms: &[(&[usize], Rational)]| {
        Multivector::from_terms(2, terms.iter().map(|(idx, c)| (idx.to_vec(), c.clone())))
    };
    let param = |p: &str| {
        bindings
            .get(p)
            .cloned()
            .ok_or_else(|| Error::UnboundParameter(p.to_string()))
    };
    let elements = match name {
        "heis3" => vec![
            two(&[(&[2, 3], int(1))])?,
            two(&[(&[3, 1], int(1))])?,
            two(&[(&[1, 2], int(1))])?,
        ],
        "g3d1n" => vec![
            two(&[(&[1, 2], int(1))])?,
            two(&[(&[2, 3], int(1))])?,
            two(&[(&[3, 1], int(1))])?,
        ],
        "g3d2" => vec![
            two(&[(&[1, 2], int(1))])?,
            two(&[(&[1, 3], int(1))])?,
            two(&[(&[2, 3], int(1))])?,
        ],
        "g3d3" => {
            let (alpha, beta) = (param("alpha")?, param("beta")?);
            if alpha.is_zero() || beta.is_zero() {
                return Err(Error::ConstraintViolated {
                    param: if alpha.is_zero() { "alpha" } else { "beta" }.into(),
                    value: int(0),
                    constraint: "nonzero".into(),
                });
            }
            vec![
                two(&[(&[2, 3], alpha.recip())])?,
                two(&[(&[1, 3], -beta.recip())])?,
                two(&[(&[1, 2], int(1))])?,
            ]
        }
        "sl2_efh" => vec![
            two(&[(&[1, 3], frac(1, 2))])?,
            two(&[(&[2, 3], frac(-1, 2))])?,
            two(&[(&[1, 2], int(1))])?,
        ],
        other => {
            catalog_entry(other)?;
            return Ok(None);
        }
    };
    Ok(Some(AliasBasis::new(2, elements)?))
}
