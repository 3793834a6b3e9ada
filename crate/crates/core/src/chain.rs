//! Weight-graded super chain spaces and the boundary operator.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::{One, Zero};

use crate::algebra::Rational;
use crate::exterior::{normalize_word, GeneratorSystem};
use crate::ranklin::RationalMatrix;

/// One basis chain: a 0/1 exponent per even generator and a natural exponent
/// per odd generator.
///
/// The derived order compares even exponents first (as a bit string with the
/// first generator most significant) and then odd exponents lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperMonomial {
    even: Vec<u8>,
    odd: Vec<u32>,
    degree: u32,
    weight: u32,
}

impl SuperMonomial {
    /// The empty product, spanning `C_0^0`.
    pub fn one(gs: &GeneratorSystem) -> Self {
        SuperMonomial {
            even: vec![0; gs.even_count()],
            odd: vec![0; gs.odd_count()],
            degree: 0,
            weight: 0,
        }
    }

    /// Builds a monomial from one exponent per generator.
    ///
    /// Panics if an even exponent exceeds 1 or the length is wrong.
    pub fn from_exponents(gs: &GeneratorSystem, exps: &[u32]) -> Self {
        assert_eq!(exps.len(), gs.len(), "exponent vector has wrong length");
        let e = gs.even_count();
        let even: Vec<u8> = exps[..e]
            .iter()
            .map(|&x| {
                assert!(x <= 1, "even generators square to zero");
                x as u8
            })
            .collect();
        let degree = exps.iter().sum();
        let weight = exps.iter().enumerate().map(|(g, &x)| x * gs.grade(g) as u32).sum();
        SuperMonomial {
            even,
            odd: exps[e..].to_vec(),
            degree,
            weight,
        }
    }

    pub fn even(&self) -> &[u8] {
        &self.even
    }

    pub fn odd(&self) -> &[u32] {
        &self.odd
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn weight(&self) -> usize {
        self.weight as usize
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.even.iter().map(|&x| x as u32).chain(self.odd.iter().copied()).collect()
    }

    /// The monomial as a canonical word of generator indices, odd letters
    /// repeated per exponent.
    pub fn word(&self) -> Vec<usize> {
        let e = self.even.len();
        let mut w = Vec::with_capacity(self.degree as usize);
        w.extend(self.even.iter().enumerate().filter(|(_, &x)| x == 1).map(|(g, _)| g));
        for (o, &x) in self.odd.iter().enumerate() {
            w.extend(std::iter::repeat(e + o).take(x as usize));
        }
        w
    }

    /// Paper-style notation: `W^{1101} ∧ U^{2,0,1}` when `n = 3`, otherwise
    /// `Z{1,2,4} ∧ U{u1^2 u3}`.
    pub fn render(&self, gs: &GeneratorSystem) -> String {
        if gs.dim() == 3 {
            let bits: String = self.even.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
            let exps: Vec<String> = self.odd.iter().map(u32::to_string).collect();
            return format!("W^{{{bits}}} ∧ U^{{{}}}", exps.join(","));
        }
        let mut parts = Vec::new();
        if self.even.iter().any(|&b| b == 1) {
            let idx: Vec<String> = self
                .even
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 1)
                .map(|(g, _)| (g + 1).to_string())
                .collect();
            parts.push(format!("Z{{{}}}", idx.join(",")));
        }
        if self.odd.iter().any(|&x| x > 0) {
            let mut s = String::new();
            for (o, &x) in self.odd.iter().enumerate().filter(|(_, &x)| x > 0) {
                if !s.is_empty() {
                    s.push(' ');
                }
                let _ = write!(s, "u{}", o + 1);
                if x > 1 {
                    let _ = write!(s, "^{x}");
                }
            }
            parts.push(format!("U{{{s}}}"));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ∧ ")
        }
    }
}

/// A rational combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    terms: BTreeMap<SuperMonomial, Rational>,
}

impl Chain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(mono: SuperMonomial) -> Self {
        let mut c = Self::zero();
        c.add_term(mono, Rational::one());
        c
    }

    pub fn terms(&self) -> &BTreeMap<SuperMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &SuperMonomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, mono: SuperMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    /// The super exterior product.
    pub fn wedge(&self, gs: &GeneratorSystem, other: &Chain) -> Chain {
        let mut out = Chain::zero();
        for (a, ca) in &self.terms {
            let wa = a.word();
            for (b, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend(b.word());
                if let Some((sign, mono)) = normalize_word(gs, &word) {
                    out.add_term(mono, Rational::from_integer(sign.into()) * ca * cb);
                }
            }
        }
        out
    }

    /// Renders the chain as a sum of rendered monomials.
    pub fn render(&self, gs: &GeneratorSystem) -> String {
        let terms: Vec<(String, Rational)> =
            self.terms.iter().map(|(m, c)| (m.render(gs), c.clone())).collect();
        crate::algebra::format_combination(&terms)
    }
}

/// All monomials of degree `m` and weight `w`, in ascending monomial order.
pub fn chain_basis(gs: &GeneratorSystem, m: usize, w: usize) -> Vec<SuperMonomial> {
    let count = gs.len();
    // grade-0 generators left at or after position g
    let mut grade0_after = vec![0usize; count + 1];
    for g in (0..count).rev() {
        grade0_after[g] = grade0_after[g + 1] + usize::from(gs.grade(g) == 0);
    }
    let mut out = Vec::new();
    let mut exps = vec![0u32; count];
    enumerate(gs, &grade0_after, 0, m, w, &mut exps, &mut out);
    out.sort();
    out
}

fn enumerate(
    gs: &GeneratorSystem,
    grade0_after: &[usize],
    g: usize,
    m_left: usize,
    w_left: usize,
    exps: &mut Vec<u32>,
    out: &mut Vec<SuperMonomial>,
) {
    if m_left == 0 && w_left == 0 {
        out.push(SuperMonomial::from_exponents(gs, exps));
        return;
    }
    // every letter of positive grade adds at least one to the weight
    if g == gs.len() || m_left > grade0_after[g] + w_left || m_left == 0 {
        return;
    }
    let grade = gs.grade(g);
    let cap = if gs.is_odd(g) { m_left } else { 1.min(m_left) };
    for e in 0..=cap {
        if e * grade > w_left {
            break;
        }
        exps[g] = e as u32;
        enumerate(gs, grade0_after, g + 1, m_left - e, w_left - e * grade, exps, out);
    }
    exps[g] = 0;
}

/// Chain bases of weight `w` for every degree with a nonempty space.
pub fn weight_basis(gs: &GeneratorSystem, w: usize) -> BTreeMap<usize, Vec<SuperMonomial>> {
    let grade0 = (0..gs.len()).filter(|&g| gs.grade(g) == 0).count();
    (0..=grade0 + w)
        .map(|m| (m, chain_basis(gs, m, w)))
        .filter(|(_, b)| !b.is_empty())
        .collect()
}

/// Calls `emit(monomial, coefficient)` for every term of `∂(mono)`, with
/// repeats (the caller collects).
///
/// `∂(Y1..Ym) = sum_{i<j} (-1)^{i-1 + y_i sum_{i<s<j} y_s} Y1..^Yi..[Yi,Yj]..Ym`
/// with the bracket in position `j`.
fn boundary_terms<F>(gs: &GeneratorSystem, mono: &SuperMonomial, mut emit: F)
where
    F: FnMut(SuperMonomial, &Rational, bool),
{
    let word = mono.word();
    let len = word.len();
    if len < 2 {
        return;
    }
    let mut buf = Vec::with_capacity(len - 1);
    for i in 0..len {
        let yi_odd = gs.is_odd(word[i]);
        let mut between_odd = false;
        for j in i + 1..len {
            let terms = gs.bracket(word[i], word[j]);
            if !terms.is_empty() {
                let negative = (i % 2 == 1) ^ (yi_odd && between_odd);
                for (g, c) in terms {
                    buf.clear();
                    buf.extend_from_slice(&word[..i]);
                    buf.extend_from_slice(&word[i + 1..j]);
                    buf.push(*g);
                    buf.extend_from_slice(&word[j + 1..]);
                    if let Some((sign, out)) = normalize_word(gs, &buf) {
                        emit(out, c, negative ^ (sign < 0));
                    }
                }
            }
            between_odd ^= gs.is_odd(word[j]);
        }
    }
}

/// `∂(mono)`, of degree `m - 1` and the same weight.
pub fn boundary_monomial(gs: &GeneratorSystem, mono: &SuperMonomial) -> Chain {
    let mut acc: HashMap<SuperMonomial, Rational> = HashMap::new();
    boundary_terms(gs, mono, |m, c, negative| {
        let slot = acc.entry(m).or_insert_with(Rational::zero);
        if negative {
            *slot -= c;
        } else {
            *slot += c;
        }
    });
    let mut chain = Chain::zero();
    for (m, c) in acc {
        chain.add_term(m, c);
    }
    chain
}

/// `∂` extended linearly to a chain.
pub fn boundary(gs: &GeneratorSystem, chain: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (m, c) in chain.terms() {
        out.add_scaled(&boundary_monomial(gs, m), c);
    }
    out
}

/// `∂(a∧b) - (∂a)∧b - (-1)^{deg a} a∧(∂b)`.
pub fn induced_bracket(gs: &GeneratorSystem, a: &SuperMonomial, b: &SuperMonomial) -> Chain {
    let (ca, cb) = (Chain::monomial(a.clone()), Chain::monomial(b.clone()));
    let mut out = boundary(gs, &ca.wedge(gs, &cb));
    out.add_scaled(&boundary_monomial(gs, a).wedge(gs, &cb), &-Rational::one());
    let sign = if a.degree() % 2 == 0 { -Rational::one() } else { Rational::one() };
    out.add_scaled(&ca.wedge(gs, &boundary_monomial(gs, b)), &sign);
    out
}

/// Matrix of `∂ : C_m^w -> C_{m-1}^w`; columns index `C_m^w`, rows `C_{m-1}^w`,
/// both in [`chain_basis`] order.
pub fn boundary_matrix(gs: &GeneratorSystem, m: usize, w: usize) -> RationalMatrix {
    let domain = chain_basis(gs, m, w);
    let codomain = if m == 0 { Vec::new() } else { chain_basis(gs, m - 1, w) };
    boundary_matrix_between(gs, &domain, &codomain)
}

/// Matrix of `∂` between explicitly given bases.
pub fn boundary_matrix_between(
    gs: &GeneratorSystem,
    domain: &[SuperMonomial],
    codomain: &[SuperMonomial],
) -> RationalMatrix {
    let index: HashMap<&SuperMonomial, usize> = codomain.iter().enumerate().map(|(r, m)| (m, r)).collect();
    let mut matrix = RationalMatrix::zeros(codomain.len(), domain.len());
    if codomain.is_empty() {
        return matrix;
    }
    for (col, mono) in domain.iter().enumerate() {
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        boundary_terms(gs, mono, |m, c, negative| {
            let row = *index.get(&m).expect("boundary leaves the chain basis");
            let slot = acc.entry(row).or_insert_with(Rational::zero);
            if negative {
                *slot -= c;
            } else {
                *slot += c;
            }
        });
        for (row, c) in acc {
            matrix.set(row, col, c);
        }
    }
    matrix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog_get, int, paper_basis, Bindings};
    use crate::exterior::binomial;
    use proptest::prelude::*;

    fn system(name: &str, pairs: &[(&str, i64)], paper: bool) -> GeneratorSystem {
        let b: Bindings = pairs.iter().map(|(k, v)| (k.to_string(), int(*v))).collect();
        let sc = catalog_get(name, &b).unwrap();
        match paper_basis(name, &b).unwrap() {
            Some(alias) if paper => GeneratorSystem::with_aliases(&sc, &[alias]).unwrap(),
            _ => GeneratorSystem::canonical(&sc),
        }
    }

    fn mono(gs: &GeneratorSystem, exps: &[u32]) -> SuperMonomial {
        SuperMonomial::from_exponents(gs, exps)
    }

    fn three_dim() -> Vec<GeneratorSystem> {
        vec![
            system("heis3", &[], true),
            system("g3d1n", &[], true),
            system("g3d2", &[("alpha", -1)], true),
            system("g3d2", &[("alpha", 2)], false),
            system("g3d3", &[("alpha", 1), ("beta", -1)], true),
            system("sl2_efh", &[], true),
            system("abelian3", &[], false),
        ]
    }

    #[test]
    fn empty_monomial_spans_degree_zero() {
        for gs in three_dim() {
            assert_eq!(chain_basis(&gs, 0, 0), vec![SuperMonomial::one(&gs)]);
        }
    }

    #[test]
    fn small_bases() {
        let gs = system("heis3", &[], true);
        let low = chain_basis(&gs, 3, 4);
        assert_eq!(low.len(), 6);
        assert!(low.iter().all(|m| m.even() == [0, 0, 0, 1]));
        let high = chain_basis(&gs, 5, 2);
        assert_eq!(high.len(), 6);
        assert!(high.iter().all(|m| m.even() == [1, 1, 1, 0]));
        assert_eq!(chain_basis(&gs, 4, 3).len(), 39);
    }

    #[test]
    fn basis_is_sorted_and_consistent() {
        let gs = system("gl2", &[], false);
        let basis = chain_basis(&gs, 4, 3);
        assert_eq!(basis.len(), 372);
        assert!(basis.windows(2).all(|p| p[0] < p[1]));
        assert!(basis.iter().all(|m| m.degree() == 4 && m.weight() == 3));
    }

    #[test]
    fn generic_three_dim_dimensions() {
        for gs in three_dim() {
            for w in 2..=9 {
                let c = |k: usize| binomial(k, 2);
                let expect = [
                    c(w),
                    3 * c(w) + c(w + 2),
                    3 * c(w) + 3 * c(w + 2),
                    c(w) + 3 * c(w + 2),
                    c(w + 2),
                ];
                let spaces = weight_basis(&gs, w);
                let got: Vec<usize> = (w - 1..=w + 3).map(|m| spaces.get(&m).map_or(0, Vec::len)).collect();
                assert_eq!(got, expect);
                assert!(spaces.keys().all(|&m| (w - 1..=w + 3).contains(&m)));
            }
        }
    }

    #[test]
    fn sl2_volume_boundaries() {
        let gs = system("sl2_efh", &[], true);
        assert!(boundary_monomial(&gs, &mono(&gs, &[1, 1, 1, 0, 0, 0, 0])).is_zero());
        let d = boundary_monomial(&gs, &mono(&gs, &[1, 1, 0, 1, 0, 0, 0]));
        assert_eq!(d, Chain::monomial(mono(&gs, &[0, 0, 1, 1, 0, 0, 0])));
    }

    #[test]
    fn g3d2_volume_boundary() {
        let gs = system("g3d2", &[("alpha", 2)], false);
        let d = boundary_monomial(&gs, &mono(&gs, &[1, 1, 1, 0, 0, 0, 0]));
        let mut expect = Chain::zero();
        expect.add_term(mono(&gs, &[1, 1, 0, 0, 0, 0, 0]), int(-3));
        assert_eq!(d, expect);
    }

    #[test]
    fn lowest_space_is_cycles() {
        for gs in three_dim() {
            for w in 2..=6 {
                for m in chain_basis(&gs, w - 1, w) {
                    assert!(boundary_monomial(&gs, &m).is_zero());
                }
            }
        }
    }

    #[test]
    fn sl2_odd_power_formula() {
        // ∂U^{a,b,c} = z4 ∧ (-ab U^{a-1,b-1,c} + 2 C(c,2) U^{a,b,c-2})
        let gs = system("sl2_efh", &[], true);
        for a in 0..4u32 {
            for b in 0..4u32 {
                for c in 0..5u32 {
                    let d = boundary_monomial(&gs, &mono(&gs, &[0, 0, 0, 0, a, b, c]));
                    let mut expect = Chain::zero();
                    if a > 0 && b > 0 {
                        expect.add_term(mono(&gs, &[0, 0, 0, 1, a - 1, b - 1, c]), int(-((a * b) as i64)));
                    }
                    if c >= 2 {
                        expect.add_term(
                            mono(&gs, &[0, 0, 0, 1, a, b, c - 2]),
                            int(2 * binomial(c as usize, 2) as i64),
                        );
                    }
                    assert_eq!(d, expect, "U^{{{a},{b},{c}}}");
                }
            }
        }
    }

    #[test]
    fn induced_bracket_examples() {
        let gs = system("heis3", &[], true);
        let z1 = mono(&gs, &[1, 0, 0, 0, 0, 0, 0]);
        let z2 = mono(&gs, &[0, 1, 0, 0, 0, 0, 0]);
        let u3 = mono(&gs, &[0, 0, 0, 0, 0, 0, 1]);
        let u2 = mono(&gs, &[0, 0, 0, 0, 0, 1, 0]);
        let mut expect = Chain::zero();
        expect.add_term(u2, int(-1));
        assert_eq!(induced_bracket(&gs, &z1, &u3), expect);
        let z3 = Chain::monomial(mono(&gs, &[0, 0, 1, 0, 0, 0, 0]));
        assert_eq!(induced_bracket(&gs, &z1, &z2), z3);
        assert!(induced_bracket(&gs, &z1, &SuperMonomial::one(&gs)).is_zero());
    }

    #[test]
    fn abelian_matrices_vanish() {
        let gs = system("abelian3", &[], false);
        for w in 0..4 {
            for m in 1..w + 5 {
                assert_eq!(boundary_matrix(&gs, m, w).nnz(), 0);
            }
        }
    }

    #[test]
    fn degenerate_shapes() {
        let gs = system("heis3", &[], true);
        let a = boundary_matrix(&gs, 1, 1);
        assert_eq!((a.rows(), a.cols()), (0, 3));
        let e = boundary_matrix(&gs, 1, 3);
        assert_eq!((e.rows(), e.cols()), (0, 0));
        let b = boundary_matrix(&gs, 0, 0);
        assert_eq!((b.rows(), b.cols()), (0, 1));
    }

    #[test]
    fn renders_paper_notation() {
        let gs = system("heis3", &[], true);
        assert_eq!(mono(&gs, &[1, 1, 0, 1, 2, 0, 1]).render(&gs), "W^{1101} ∧ U^{2,0,1}");
        let gl2 = system("gl2", &[], false);
        let mut exps = vec![0u32; 15];
        exps[0] = 1;
        exps[1] = 1;
        exps[3] = 1;
        exps[8] = 2;
        exps[10] = 1;
        assert_eq!(mono(&gl2, &exps).render(&gl2), "Z{1,2,4} ∧ U{u1^2 u3}");
        assert_eq!(SuperMonomial::one(&gl2).render(&gl2), "1");
    }

    fn random_monomial(gs: &GeneratorSystem, seed: &[u32]) -> SuperMonomial {
        let exps: Vec<u32> = (0..gs.len())
            .map(|g| {
                let x = seed[g % seed.len()] ^ (g as u32 * 7);
                if gs.is_odd(g) { x % 3 } else { x % 2 }
            })
            .collect();
        mono(gs, &exps)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn boundary_preserves_weight_and_lowers_degree(
            which in 0usize..7,
            seed in proptest::collection::vec(0u32..16, 7),
        ) {
            let gs = &three_dim()[which];
            let m = random_monomial(gs, &seed);
            for out in boundary_monomial(gs, &m).terms().keys() {
                prop_assert_eq!(out.weight(), m.weight());
                prop_assert_eq!(out.degree() + 1, m.degree());
            }
        }

        #[test]
        fn boundary_squares_to_zero(
            which in 0usize..7,
            seed in proptest::collection::vec(0u32..16, 7),
        ) {
            let gs = &three_dim()[which];
            let m = random_monomial(gs, &seed);
            prop_assert!(boundary(gs, &boundary_monomial(gs, &m)).is_zero());
        }

        #[test]
        fn leibniz_decomposition(
            which in 0usize..7,
            sa in proptest::collection::vec(0u32..16, 7),
            sb in proptest::collection::vec(0u32..16, 7),
        ) {
            let gs = &three_dim()[which];
            let (a, b) = (random_monomial(gs, &sa), random_monomial(gs, &sb));
            let (ca, cb) = (Chain::monomial(a.clone()), Chain::monomial(b.clone()));
            let lhs = boundary(gs, &ca.wedge(gs, &cb));
            let mut rhs = boundary_monomial(gs, &a).wedge(gs, &cb);
            let sign = if a.degree() % 2 == 0 { Rational::one() } else { -Rational::one() };
            rhs.add_scaled(&ca.wedge(gs, &boundary_monomial(gs, &b)), &sign);
            rhs.add_scaled(&induced_bracket(gs, &a, &b), &Rational::one());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn induced_bracket_on_letters_is_the_bracket(which in 0usize..7, g in 0usize..7, h in 0usize..7) {
            let gs = &three_dim()[which];
            let letter = |x: usize| {
                let mut e = vec![0u32; gs.len()];
                e[x] = 1;
                mono(gs, &e)
            };
            let mut expect = Chain::zero();
            for (k, c) in gs.bracket(g, h) {
                expect.add_term(letter(*k), c.clone());
            }
            prop_assert_eq!(induced_bracket(gs, &letter(g), &letter(h)), expect);
        }
    }
}
