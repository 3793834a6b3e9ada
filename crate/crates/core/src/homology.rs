//! Betti tables of the weight-graded complexes.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{parse_rational, Bindings};
use crate::chain::{boundary_matrix_between, weight_basis};
use crate::error::{Error, Result};
use crate::exterior::GeneratorSystem;
use crate::ranklin::{eliminate, EliminationReport, RationalMatrix};

/// `(space_dim, kernel_dim, betti)` at one degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BettiCell {
    pub dim: usize,
    pub kernel: usize,
    pub betti: usize,
}

/// One weight of the table; `degrees` lists the nonempty chain spaces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiRow {
    pub w: usize,
    pub degrees: Vec<usize>,
    pub dims: Vec<usize>,
    pub kernels: Vec<usize>,
    pub betti: Vec<usize>,
}

impl BettiRow {
    /// The cell at degree `m`; degrees outside the support are all zero.
    pub fn cell(&self, m: usize) -> BettiCell {
        match self.degrees.iter().position(|&d| d == m) {
            Some(i) => BettiCell {
                dim: self.dims[i],
                kernel: self.kernels[i],
                betti: self.betti[i],
            },
            None => BettiCell::default(),
        }
    }

    /// `sum_m (-1)^m dim C_m`.
    pub fn euler(&self) -> i64 {
        alternating(&self.degrees, &self.dims)
    }

    /// `sum_m (-1)^m betti_m`.
    pub fn betti_euler(&self) -> i64 {
        alternating(&self.degrees, &self.betti)
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

fn alternating(degrees: &[usize], values: &[usize]) -> i64 {
    degrees
        .iter()
        .zip(values)
        .map(|(&m, &v)| if m % 2 == 0 { v as i64 } else { -(v as i64) })
        .sum()
}

/// One boundary map `∂_m` of a row, kept when matrices or reports are wanted.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub w: usize,
    pub m: usize,
    pub matrix: RationalMatrix,
    pub report: EliminationReport,
}

/// A row plus the boundary maps that produced it.
#[derive(Clone, Debug)]
pub struct RowComputation {
    pub row: BettiRow,
    pub boundaries: Vec<BoundaryData>,
}

/// Computes the row at weight `w`, keeping every boundary matrix and its
/// elimination report.
pub fn compute_row(gs: &GeneratorSystem, w: usize) -> RowComputation {
    let bases = weight_basis(gs, w);
    let degrees: Vec<usize> = bases.keys().copied().collect();
    let boundaries: Vec<BoundaryData> = degrees
        .par_iter()
        .filter_map(|&m| {
            let codomain = bases.get(&m.checked_sub(1)?)?;
            let matrix = boundary_matrix_between(gs, &bases[&m], codomain);
            let report = eliminate(&matrix);
            Some(BoundaryData { w, m, matrix, report })
        })
        .collect();
    let ranks: BTreeMap<usize, usize> = boundaries.iter().map(|b| (b.m, b.report.rank)).collect();
    let rank_of = |m: usize| ranks.get(&m).copied().unwrap_or(0);
    let dims: Vec<usize> = degrees.iter().map(|m| bases[m].len()).collect();
    let kernels: Vec<usize> = degrees.iter().zip(&dims).map(|(&m, &d)| d - rank_of(m)).collect();
    let betti: Vec<usize> = degrees
        .iter()
        .zip(&kernels)
        .map(|(&m, &k)| k - rank_of(m + 1))
        .collect();
    RowComputation {
        row: BettiRow {
            w,
            degrees,
            dims,
            kernels,
            betti,
        },
        boundaries,
    }
}

pub fn betti_row(gs: &GeneratorSystem, w: usize) -> BettiRow {
    compute_row(gs, w).row
}

/// `sum_m (-1)^m dim C_m^w`.
pub fn euler_check(gs: &GeneratorSystem, w: usize) -> i64 {
    let bases = weight_basis(gs, w);
    bases
        .iter()
        .map(|(&m, b)| if m % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) })
        .sum()
}

/// Betti rows for `w = 0..=w_max` of a named algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    pub algebra: String,
    pub params: Bindings,
    pub rows: Vec<BettiRow>,
}

pub fn betti_table(gs: &GeneratorSystem, algebra: &str, params: &Bindings, w_max: usize) -> BettiTable {
    let rows: Vec<BettiRow> = (0..=w_max).into_par_iter().map(|w| betti_row(gs, w)).collect();
    BettiTable {
        algebra: algebra.to_string(),
        params: params.clone(),
        rows,
    }
}

impl BettiTable {
    pub fn row(&self, w: usize) -> Option<&BettiRow> {
        self.rows.iter().find(|r| r.w == w)
    }

    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
            .collect();
        json!({
            "algebra": self.algebra,
            "params": params,
            "rows": self.rows.iter().map(|r| json!({
                "w": r.w,
                "degrees": r.degrees,
                "dims": r.dims,
                "kernels": r.kernels,
                "betti": r.betti,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("table serializes") + "\n"
    }

    /// One line per cell: `w,m,dim,kernel,betti`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,m,dim,kernel,betti\n");
        for r in &self.rows {
            for i in 0..r.degrees.len() {
                let _ = writeln!(out, "{},{},{},{},{}", r.w, r.degrees[i], r.dims[i], r.kernels[i], r.betti[i]);
            }
        }
        out
    }

    /// One block per weight with `SpaceDim`, `KerDim` and `Betti` lines.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}", self.algebra);
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(out, " ({})", ps.join(", "));
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "\n## w = {}\n\n", r.w);
            if r.is_empty() {
                out.push_str("(all chain spaces vanish)\n");
                continue;
            }
            let line = |label: &str, vals: &[usize]| {
                let cells: Vec<String> = vals.iter().map(usize::to_string).collect();
                format!("| {label} | {} |\n", cells.join(" | "))
            };
            out.push_str(&line("m", &r.degrees));
            let _ = writeln!(out, "|---|{}", "---|".repeat(r.degrees.len()));
            out.push_str(&line("SpaceDim", &r.dims));
            out.push_str(&line("KerDim", &r.kernels));
            out.push_str(&line("Betti", &r.betti));
        }
        out
    }
}

/// An expected table: like [`BettiTable`] JSON, with every numeric field
/// optional and `null` allowed for unknown cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpectedTable {
    pub algebra: Option<String>,
    pub params: Bindings,
    pub rows: Vec<ExpectedRow>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpectedRow {
    pub w: usize,
    pub degrees: Vec<usize>,
    pub dims: Option<Vec<Option<usize>>>,
    pub kernels: Option<Vec<Option<usize>>>,
    pub betti: Option<Vec<Option<usize>>>,
}

impl ExpectedTable {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedExpected(msg);
        let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let obj = doc.as_object().ok_or_else(|| bad("top level must be an object".into()))?;
        let algebra = match obj.get("algebra") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(bad("`algebra` must be a string".into())),
        };
        let mut params = Bindings::new();
        if let Some(p) = obj.get("params").filter(|p| !p.is_null()) {
            let p = p.as_object().ok_or_else(|| bad("`params` must be an object".into()))?;
            for (k, v) in p {
                let text = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_i64() => n.to_string(),
                    _ => return Err(bad(format!("parameter `{k}` must be a rational string"))),
                };
                params.insert(k.clone(), parse_rational(&text).map_err(|e| bad(e.to_string()))?);
            }
        }
        let rows_val = obj
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("`rows` must be an array".into()))?;
        let mut rows = Vec::with_capacity(rows_val.len());
        for (i, r) in rows_val.iter().enumerate() {
            let w = r
                .get("w")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(format!("row {i}: `w` must be a natural number")))? as usize;
            let degrees: Vec<usize> = r
                .get("degrees")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("row w={w}: `degrees` must be an array")))?
                .iter()
                .map(|d| d.as_u64().map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| bad(format!("row w={w}: degrees must be natural numbers")))?;
            let field = |name: &str| -> Result<Option<Vec<Option<usize>>>> {
                match r.get(name) {
                    None | Some(Value::Null) => Ok(None),
                    Some(Value::Array(vals)) => {
                        if vals.len() != degrees.len() {
                            return Err(bad(format!("row w={w}: `{name}` length differs from `degrees`")));
                        }
                        vals.iter()
                            .map(|v| match v {
                                Value::Null => Ok(None),
                                v => v
                                    .as_u64()
                                    .map(|x| Some(x as usize))
                                    .ok_or_else(|| bad(format!("row w={w}: `{name}` holds a non-natural value"))),
                            })
                            .collect::<Result<Vec<_>>>()
                            .map(Some)
                    }
                    Some(_) => Err(bad(format!("row w={w}: `{name}` must be an array"))),
                }
            };
            rows.push(ExpectedRow {
                w,
                dims: field("dims")?,
                kernels: field("kernels")?,
                betti: field("betti")?,
                degrees,
            });
        }
        Ok(ExpectedTable { algebra, params, rows })
    }
}

/// One disagreeing cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMismatch {
    pub w: usize,
    pub m: usize,
    pub field: &'static str,
    pub expected: usize,
    pub computed: usize,
}

/// Cell-by-cell comparison result; empty means every given cell matched.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffReport {
    pub mismatches: Vec<CellMismatch>,
    /// Expected weights absent from the computed table.
    pub missing_rows: Vec<usize>,
    pub cells_checked: usize,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty() && self.missing_rows.is_empty()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "all cells match ({} checked)", self.cells_checked);
        }
        for w in &self.missing_rows {
            writeln!(f, "w={w}: row not computed")?;
        }
        for d in &self.mismatches {
            writeln!(f, "w={} m={} {}: expected {}, computed {}", d.w, d.m, d.field, d.expected, d.computed)?;
        }
        Ok(())
    }
}

/// Compares every cell the expected table provides.
pub fn verify_table(computed: &BettiTable, expected: &ExpectedTable) -> DiffReport {
    let mut report = DiffReport::default();
    for er in &expected.rows {
        let Some(row) = computed.row(er.w) else {
            report.missing_rows.push(er.w);
            continue;
        };
        for (i, &m) in er.degrees.iter().enumerate() {
            let cell = row.cell(m);
            let checks: [(&'static str, &Option<Vec<Option<usize>>>, usize); 3] = [
                ("dim", &er.dims, cell.dim),
                ("kernel", &er.kernels, cell.kernel),
                ("betti", &er.betti, cell.betti),
            ];
            for (field, vals, got) in checks {
                if let Some(Some(want)) = vals.as_ref().map(|v| v[i]) {
                    report.cells_checked += 1;
                    if want != got {
                        report.mismatches.push(CellMismatch {
                            w: er.w,
                            m,
                            field,
                            expected: want,
                            computed: got,
                        });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog_get, int, paper_basis};
    use crate::exterior::binomial;

    fn system(name: &str, pairs: &[(&str, i64)]) -> (GeneratorSystem, Bindings) {
        let b: Bindings = pairs.iter().map(|(k, v)| (k.to_string(), int(*v))).collect();
        let sc = catalog_get(name, &b).unwrap();
        (GeneratorSystem::canonical(&sc), b)
    }

    #[test]
    fn heis3_row() {
        let (gs, _) = system("heis3", &[]);
        let row = betti_row(&gs, 3);
        assert_eq!(row.degrees, vec![2, 3, 4, 5, 6]);
        assert_eq!(row.betti, vec![0, 3, 10, 11, 4]);
    }

    #[test]
    fn g3d1n_and_g3d2_rows() {
        let (gs, _) = system("g3d1n", &[]);
        assert_eq!(betti_row(&gs, 4).betti, vec![0, 1, 2, 1, 0]);
        let (gs, _) = system("g3d2", &[("alpha", -1)]);
        assert_eq!(betti_row(&gs, 5).betti, vec![0, 0, 1, 2, 1]);
        assert_eq!(betti_row(&gs, 0).betti, vec![1, 1, 1, 1]);
        let (gs, _) = system("g3d2", &[("alpha", 2)]);
        assert_eq!(betti_row(&gs, 5).betti, vec![0; 5]);
    }

    #[test]
    fn abelian_betti_equals_dims() {
        let (gs, _) = system("abelian3", &[]);
        for w in 0..4 {
            let row = betti_row(&gs, w);
            assert_eq!(row.betti, row.dims);
            assert_eq!(row.kernels, row.dims);
        }
    }

    #[test]
    fn euler_vanishes() {
        let (gs, _) = system("heis3", &[]);
        assert_eq!(euler_check(&gs, 7), 0);
        let (gs, _) = system("abelian4", &[]);
        assert_eq!(euler_check(&gs, 0), 0);
        let (gs, _) = system("gl2", &[]);
        assert_eq!(euler_check(&gs, 5), 0);
    }

    #[test]
    fn sl2_kernel_at_top_degree() {
        let (gs, _) = system("sl2_efh", &[]);
        let row = betti_row(&gs, 5);
        assert_eq!(row.cell(8).kernel, 0);
        assert_eq!(row.cell(8).dim, binomial(7, 2));
        assert_eq!(row.cell(100), BettiCell::default());
    }

    #[test]
    fn heis3_top_boundary_rank() {
        let (gs, _) = system("heis3", &[]);
        let comp = compute_row(&gs, 3);
        let top = comp.boundaries.iter().find(|b| b.m == 6).unwrap();
        assert_eq!(top.report.rank, 6);
        assert_eq!(top.matrix.cols() - top.report.rank, 4);
    }

    #[test]
    fn aliases_do_not_change_betti() {
        let b = Bindings::new();
        let sc = catalog_get("sl2_efh", &b).unwrap();
        let alias = paper_basis("sl2_efh", &b).unwrap().unwrap();
        let a = GeneratorSystem::with_aliases(&sc, &[alias]).unwrap();
        let c = GeneratorSystem::canonical(&sc);
        assert_eq!(betti_table(&a, "sl2_efh", &b, 4), betti_table(&c, "sl2_efh", &b, 4));
    }

    #[test]
    fn renderings() {
        let (gs, b) = system("aff1", &[]);
        let table = betti_table(&gs, "aff1", &b, 1);
        let csv = table.to_csv();
        assert!(csv.starts_with("w,m,dim,kernel,betti\n0,0,1,1,1\n"));
        let md = table.to_markdown();
        assert!(md.contains("| Betti | 1 | 1 | 0 |"));
        assert!(md.contains("| KerDim | 1 | 1 | 0 |"));
    }

    #[test]
    fn json_round_trips_through_expected_parser() {
        let (gs, b) = system("g3d2", &[("alpha", -1)]);
        let table = betti_table(&gs, "g3d2", &b, 3);
        let parsed = ExpectedTable::parse(&table.to_json_string()).unwrap();
        assert_eq!(parsed.params, b);
        assert_eq!(parsed.rows.len(), 4);
        let report = verify_table(&table, &parsed);
        assert!(report.is_empty());
        assert_eq!(report.cells_checked, 3 * table.rows.iter().map(|r| r.degrees.len()).sum::<usize>());
    }

    #[test]
    fn perturbed_cell_is_reported() {
        let (gs, b) = system("heis3", &[]);
        let table = betti_table(&gs, "heis3", &b, 2);
        let mut doc = table.to_json();
        doc["rows"][2]["betti"][1] = json!(99);
        let expected = ExpectedTable::parse(&doc.to_string()).unwrap();
        let report = verify_table(&table, &expected);
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].w, 2);
        assert_eq!(report.mismatches[0].field, "betti");
        assert!(report.to_string().contains("expected 99"));
    }

    #[test]
    fn partial_expected_checks_only_betti() {
        let (gs, b) = system("aff1", &[]);
        let table = betti_table(&gs, "aff1", &b, 2);
        let text = r#"{"rows": [{"w": 1, "degrees": [1, 2, 3, 4], "betti": [0, 0, null, 0]},
                              {"w": 9, "degrees": [], "betti": []}]}"#;
        let expected = ExpectedTable::parse(text).unwrap();
        let report = verify_table(&table, &expected);
        assert_eq!(report.cells_checked, 3);
        assert!(report.mismatches.is_empty());
        assert_eq!(report.missing_rows, vec![9]);
    }

    #[test]
    fn malformed_expected() {
        for text in [
            "[]",
            "{\"rows\": 3}",
            "{\"rows\": [{\"w\": 0}]}",
            "{\"rows\": [{\"w\": 0, \"degrees\": [0], \"betti\": [1, 2]}]}",
            "{\"rows\": [{\"w\": 0, \"degrees\": [0], \"betti\": [-1]}]}",
            "not json",
        ] {
            assert!(matches!(ExpectedTable::parse(text), Err(Error::MalformedExpected(_))), "{text}");
        }
    }
}
