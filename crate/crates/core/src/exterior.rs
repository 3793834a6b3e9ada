//! Multivectors on `g`, the Schouten-like bracket, and the graded generator
//! set of the induced superalgebra.
//!
//! An element of `Λ^k g` has super-degree (grade) `k - 1`. The generator set
//! holds a basis of every `Λ^k g`, `1 <= k <= n`, ordered with all even-grade
//! generators first (by level, then lexicographically) followed by all
//! odd-grade generators. Even generators are named `z1, z2, ..`, odd ones
//! `u1, u2, ..`, each counted in that order; for `n = 3` this gives
//! `z1, z2, z3, z4 = z1∧z2∧z3` and `u1, u2, u3` on `Λ^2 g`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::algebra::{format_combination, Rational, StructureConstants};
use crate::chain::SuperMonomial;
use crate::error::{Error, Result};

/// A canonical basis element `z_{i1} ∧ .. ∧ z_{ik}` with `i1 < .. < ik` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WedgeBasisElement(Vec<usize>);

impl WedgeBasisElement {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::IndexOutOfRange(format!(
                "wedge index set {indices:?} must be strictly increasing and 1-based"
            )));
        }
        Ok(WedgeBasisElement(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn grade(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_odd(&self) -> bool {
        self.grade() % 2 == 1
    }
}

impl fmt::Display for WedgeBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("z{i}")).collect();
        f.write_str(&parts.join("∧"))
    }
}

/// The `C(n, k)` canonical basis elements of `Λ^k g`, in lexicographic order.
pub fn wedge_basis(dim: usize, level: usize) -> Result<Vec<WedgeBasisElement>> {
    if level == 0 || level > dim {
        return Err(Error::LevelOutOfRange { level, dim });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(level);
    fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<WedgeBasisElement>) {
        if left == 0 {
            out.push(WedgeBasisElement(cur.clone()));
            return;
        }
        for i in start..=dim + 1 - left {
            cur.push(i);
            rec(i + 1, dim, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(1, dim, level, &mut current, &mut out);
    Ok(out)
}

/// Position of `elem` in [`wedge_basis`] order (combinatorial number system).
fn lex_rank(dim: usize, elem: &WedgeBasisElement) -> usize {
    let k = elem.level();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &i) in elem.0.iter().enumerate() {
        for skipped in prev + 1..i {
            rank += binomial(dim - skipped, k - pos - 1);
        }
        prev = i;
    }
    rank
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorts distinct indices in place, returning the permutation sign, or `None`
/// if an index repeats (the wedge vanishes).
fn sort_with_sign(indices: &mut [usize]) -> Option<bool> {
    let mut negative = false;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
        if j > 0 && indices[j - 1] == indices[j] {
            return None;
        }
    }
    Some(negative)
}

/// A homogeneous element of `Λ^k g` over the canonical wedge basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    level: usize,
    terms: BTreeMap<WedgeBasisElement, Rational>,
}

impl Multivector {
    pub fn zero(level: usize) -> Self {
        Multivector {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(elem: WedgeBasisElement) -> Self {
        let mut mv = Self::zero(elem.level());
        mv.terms.insert(elem, Rational::one());
        mv
    }

    /// `z_i` as an element of `Λ^1 g`.
    pub fn generator(i: usize) -> Self {
        Self::basis(WedgeBasisElement(vec![i]))
    }

    /// Sums `c * z_{i1} ∧ .. ∧ z_{ik}` over index lists in any order; lists are
    /// sorted with the permutation sign and repeated indices drop out.
    pub fn from_terms<I>(level: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut mv = Self::zero(level);
        for (mut idx, c) in terms {
            if idx.len() != level || idx.contains(&0) {
                return Err(Error::IndexOutOfRange(format!(
                    "index list {idx:?} does not describe a level-{level} wedge"
                )));
            }
            if let Some(negative) = sort_with_sign(&mut idx) {
                let c = if negative { -c } else { c };
                mv.add_term(WedgeBasisElement(idx), c);
            }
        }
        Ok(mv)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn grade(&self) -> usize {
        self.level.saturating_sub(1)
    }

    pub fn terms(&self) -> &BTreeMap<WedgeBasisElement, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, elem: &WedgeBasisElement) -> Rational {
        self.terms.get(elem).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, elem: WedgeBasisElement, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(elem).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// `self += c * other`; both must share a level.
    pub fn add_scaled(&mut self, other: &Multivector, c: &Rational) {
        assert_eq!(self.level, other.level, "adding multivectors of different levels");
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Multivector {
        let mut out = Self::zero(self.level);
        out.add_scaled(self, c);
        out
    }

    /// The exterior product in `Λ g`, of level `p + q`.
    pub fn wedge(&self, other: &Multivector) -> Multivector {
        let mut out = Self::zero(self.level + other.level);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut idx: Vec<usize> = ea.0.iter().chain(&eb.0).copied().collect();
                if let Some(negative) = sort_with_sign(&mut idx) {
                    let c = ca * cb;
                    out.add_term(WedgeBasisElement(idx), if negative { -c } else { c });
                }
            }
        }
        out
    }
}

impl std::ops::Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl std::ops::Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl std::ops::Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(&-Rational::one())
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Rational)> =
            self.terms.iter().map(|(e, c)| (e.to_string(), c.clone())).collect();
        f.write_str(&format_combination(&terms))
    }
}

/// The Schouten-like bracket of `a ∈ Λ^p g` and `b ∈ Λ^q g`:
///
/// `[a, b] = sum_{i,j} (-1)^{i+j} [a_i, b_j] ∧ a[i] ∧ b[j]`
///
/// on decomposable terms, where `a[i]` omits the `i`-th factor. The result
/// lies in `Λ^{p+q-1} g`.
pub fn schouten(sc: &StructureConstants, a: &Multivector, b: &Multivector) -> Result<Multivector> {
    if a.level == 0 || b.level == 0 {
        return Err(Error::LevelOutOfRange {
            level: 0,
            dim: sc.dim(),
        });
    }
    let n = sc.dim();
    let mut out = Multivector::zero(a.level + b.level - 1);
    let mut idx = Vec::with_capacity(out.level);
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let cab = ca * cb;
            for (i, &ai) in ea.0.iter().enumerate() {
                for (j, &bj) in eb.0.iter().enumerate() {
                    let sign_negative = (i + j) % 2 == 1;
                    for k in 0..n {
                        let c = sc.coeff0(ai - 1, bj - 1, k);
                        if c.is_zero() {
                            continue;
                        }
                        idx.clear();
                        idx.push(k + 1);
                        idx.extend(ea.0.iter().enumerate().filter(|&(s, _)| s != i).map(|(_, &x)| x));
                        idx.extend(eb.0.iter().enumerate().filter(|&(s, _)| s != j).map(|(_, &x)| x));
                        if let Some(negative) = sort_with_sign(&mut idx) {
                            let term = &cab * c;
                            let term = if negative ^ sign_negative { -term } else { term };
                            out.add_term(WedgeBasisElement(idx.clone()), term);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A replacement basis for one level `Λ^k g`, given in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliasBasis {
    level: usize,
    elements: Vec<Multivector>,
}

impl AliasBasis {
    pub fn new(level: usize, elements: Vec<Multivector>) -> Result<Self> {
        if let Some(bad) = elements.iter().find(|e| e.level != level) {
            return Err(Error::LevelOutOfRange {
                level: bad.level,
                dim: level,
            });
        }
        Ok(AliasBasis { level, elements })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn elements(&self) -> &[Multivector] {
        &self.elements
    }
}

/// One graded generator of the superalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub vector: Multivector,
}

impl Generator {
    pub fn level(&self) -> usize {
        self.vector.level()
    }

    pub fn grade(&self) -> usize {
        self.vector.level() - 1
    }

    pub fn is_odd(&self) -> bool {
        self.grade() % 2 == 1
    }
}

/// A sparse combination of generators, sorted by generator index.
pub type GenCombination = Vec<(usize, Rational)>;

/// The ordered generators of `Λ^1 g ⊕ .. ⊕ Λ^n g` with a cached bracket table.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    sc: StructureConstants,
    generators: Vec<Generator>,
    grades: Vec<usize>,
    odd: Vec<bool>,
    even_count: usize,
    /// `level_start[k]` is the index of the first generator of level `k`.
    level_start: Vec<usize>,
    /// `coords[k][r]`: canonical element `r` of level `k` in generator coordinates.
    coords: Vec<Vec<GenCombination>>,
    table: Vec<Vec<GenCombination>>,
    aliased: bool,
}

impl GeneratorSystem {
    /// Generators are the canonical wedge bases.
    pub fn canonical(sc: &StructureConstants) -> Self {
        Self::with_aliases(sc, &[]).expect("canonical bases are always valid")
    }

    /// Replaces the canonical basis at each alias level by the alias elements.
    pub fn with_aliases(sc: &StructureConstants, aliases: &[AliasBasis]) -> Result<Self> {
        let n = sc.dim();
        let levels: Vec<usize> = (1..=n)
            .filter(|k| (k - 1) % 2 == 0)
            .chain((1..=n).filter(|k| (k - 1) % 2 == 1))
            .collect();

        let mut generators = Vec::new();
        let mut level_start = vec![0; n + 1];
        let mut coords = vec![Vec::new(); n + 1];
        let (mut evens, mut odds) = (0, 0);
        for &k in &levels {
            let basis = wedge_basis(n, k)?;
            let start = generators.len();
            level_start[k] = start;
            let vectors: Vec<Multivector> = match aliases.iter().find(|a| a.level == k) {
                Some(alias) => {
                    if alias.elements.len() != basis.len() {
                        return Err(Error::SingularAlias(k));
                    }
                    let matrix: Vec<Vec<Rational>> = alias
                        .elements
                        .iter()
                        .map(|e| basis.iter().map(|b| e.coefficient(b)).collect())
                        .collect();
                    let inverse = invert(matrix).ok_or(Error::SingularAlias(k))?;
                    coords[k] = (0..basis.len())
                        .map(|c| {
                            (0..basis.len())
                                .filter(|&r| !inverse[c][r].is_zero())
                                .map(|r| (start + r, inverse[c][r].clone()))
                                .collect()
                        })
                        .collect();
                    alias.elements.clone()
                }
                None => {
                    coords[k] = (0..basis.len())
                        .map(|r| vec![(start + r, Rational::one())])
                        .collect();
                    basis.into_iter().map(Multivector::basis).collect()
                }
            };
            for vector in vectors {
                let name = if (k - 1) % 2 == 0 {
                    evens += 1;
                    format!("z{evens}")
                } else {
                    odds += 1;
                    format!("u{odds}")
                };
                generators.push(Generator { name, vector });
            }
        }

        let grades: Vec<usize> = generators.iter().map(Generator::grade).collect();
        let odd: Vec<bool> = generators.iter().map(Generator::is_odd).collect();
        let mut gs = GeneratorSystem {
            sc: sc.clone(),
            generators,
            grades,
            odd,
            even_count: evens,
            level_start,
            coords,
            table: Vec::new(),
            aliased: !aliases.is_empty(),
        };
        let count = gs.generators.len();
        let mut table = vec![vec![Vec::new(); count]; count];
        for (g, row) in table.iter_mut().enumerate() {
            for (h, slot) in row.iter_mut().enumerate() {
                let (p, q) = (gs.generators[g].level(), gs.generators[h].level());
                if p + q - 1 <= n {
                    let mv = schouten(sc, &gs.generators[g].vector, &gs.generators[h].vector)?;
                    *slot = gs.coordinates(&mv);
                }
            }
        }
        gs.table = table;
        Ok(gs)
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn dim(&self) -> usize {
        self.sc.dim()
    }

    pub fn is_aliased(&self) -> bool {
        self.aliased
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn even_count(&self) -> usize {
        self.even_count
    }

    pub fn odd_count(&self) -> usize {
        self.generators.len() - self.even_count
    }

    #[inline]
    pub fn grade(&self, g: usize) -> usize {
        self.grades[g]
    }

    #[inline]
    pub fn is_odd(&self, g: usize) -> bool {
        self.odd[g]
    }

    pub fn name(&self, g: usize) -> &str {
        &self.generators[g].name
    }

    /// Index of the generator spanning `Λ^n g`.
    pub fn top_generator(&self) -> usize {
        self.level_start[self.dim()]
    }

    /// Indices of the generators at `level`.
    pub fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        let start = self.level_start[level];
        start..start + binomial(self.dim(), level)
    }

    /// Expresses a multivector in generator coordinates.
    pub fn coordinates(&self, mv: &Multivector) -> GenCombination {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        if mv.level == 0 || mv.level > self.dim() {
            return Vec::new();
        }
        for (elem, c) in &mv.terms {
            let r = lex_rank(self.dim(), elem);
            for (g, a) in &self.coords[mv.level][r] {
                *acc.entry(*g).or_insert_with(Rational::zero) += c * a;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Rebuilds a multivector from generator coordinates (all at one level).
    pub fn to_multivector(&self, level: usize, combo: &[(usize, Rational)]) -> Multivector {
        let mut mv = Multivector::zero(level);
        for (g, c) in combo {
            mv.add_scaled(&self.generators[*g].vector, c);
        }
        mv
    }

    /// Cached `[g, h]` in generator coordinates.
    #[inline]
    pub fn bracket(&self, g: usize, h: usize) -> &[(usize, Rational)] {
        &self.table[g][h]
    }

    /// Renders a generator combination, e.g. `-2·u1`.
    pub fn format(&self, combo: &[(usize, Rational)]) -> String {
        let terms: Vec<(String, Rational)> =
            combo.iter().map(|(g, c)| (self.name(*g).to_string(), c.clone())).collect();
        format_combination(&terms)
    }
}

/// Gauss-Jordan inverse over the rationals; `None` if singular.
fn invert(mut m: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].recip();
        for x in m[col].iter_mut().chain(inv[col].iter_mut()) {
            *x *= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let dm = &f * &m[col][c];
                    m[r][c] -= dm;
                    let di = &f * &inv[col][c];
                    inv[r][c] -= di;
                }
            }
        }
    }
    Some(inv)
}

/// Pairwise brackets of all generators.
#[derive(Clone, Debug)]
pub struct BracketTable<'a> {
    gs: &'a GeneratorSystem,
}

impl<'a> BracketTable<'a> {
    pub fn entry(&self, g: usize, h: usize) -> &'a [(usize, Rational)] {
        self.gs.bracket(g, h)
    }

    /// Entry by generator names, e.g. `("z1", "u3")`.
    pub fn get(&self, left: &str, right: &str) -> Option<String> {
        let find = |name: &str| self.gs.generators.iter().position(|g| g.name == name);
        Some(self.gs.format(self.entry(find(left)?, find(right)?)))
    }

    /// Two text matrices: grade-0 rows against every generator, then odd rows
    /// against odd generators and the top generator.
    pub fn render(&self) -> String {
        let gs = self.gs;
        let grade0: Vec<usize> = (0..gs.len()).filter(|&g| gs.grade(g) == 0).collect();
        let all: Vec<usize> = (0..gs.len()).collect();
        let odd: Vec<usize> = (0..gs.len()).filter(|&g| gs.is_odd(g)).collect();
        let mut odd_cols = odd.clone();
        if !gs.is_odd(gs.top_generator()) {
            odd_cols.push(gs.top_generator());
        }
        let mut out = render_matrix(gs, &grade0, &all);
        if !odd.is_empty() {
            out.push('\n');
            out.push_str(&render_matrix(gs, &odd, &odd_cols));
        }
        out
    }
}

fn render_matrix(gs: &GeneratorSystem, rows: &[usize], cols: &[usize]) -> String {
    let mut cells: Vec<Vec<String>> = Vec::with_capacity(rows.len() + 1);
    let mut header = vec![String::new()];
    header.extend(cols.iter().map(|&c| gs.name(c).to_string()));
    cells.push(header);
    for &r in rows {
        let mut line = vec![gs.name(r).to_string()];
        line.extend(cols.iter().map(|&c| gs.format(gs.bracket(r, c))));
        cells.push(line);
    }
    let widths: Vec<usize> = (0..=cols.len())
        .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in cells.iter().enumerate() {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
                line.push_str(" |");
            } else {
                line.push(' ');
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            let total = widths.iter().sum::<usize>() + widths.len() + 1;
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

/// The complete bracket table of a generator system.
pub fn bracket_table(gs: &GeneratorSystem) -> BracketTable<'_> {
    BracketTable { gs }
}

/// Sorts a word of generator letters into canonical order.
///
/// Each transposition of adjacent letters with parities `x`, `y` contributes
/// `-(-1)^{xy}`: odd letters commute, everything else anticommutes. Returns
/// `None` when an even generator occurs twice (the product vanishes).
pub fn normalize_word(gs: &GeneratorSystem, word: &[usize]) -> Option<(i32, SuperMonomial)> {
    let mut negative = false;
    for (p, &a) in word.iter().enumerate() {
        for &b in &word[p + 1..] {
            if a == b {
                if !gs.is_odd(a) {
                    return None;
                }
            } else if a > b && !(gs.is_odd(a) && gs.is_odd(b)) {
                negative = !negative;
            }
        }
    }
    let mut exps = vec![0u32; gs.len()];
    for &g in word {
        exps[g] += 1;
    }
    Some((if negative { -1 } else { 1 }, SuperMonomial::from_exponents(gs, &exps)))
}
