//! Endomorphisms of G given by generator images, and their fixed subgroups.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{Element, Generator, GroupSpec};
use crate::intlat::{solve_linear, IntMatrix};
use crate::subgroup::{Special, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("image of {generator} lies in a different group")]
    WrongGroup { generator: String },
    #[error("relation {relation} is not preserved: its image is {image}")]
    Relation { relation: String, image: String },
    #[error("word length bound must be at least 1")]
    ZeroBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    spec: GroupSpec,
    images: Vec<Element>,
}

/// Outcome of [`Endomorphism::fixed_subgroup`].
#[derive(Clone, Debug)]
pub struct FixResult {
    pub subgroup: Subgroup,
    /// For every parity class containing fixed elements, its canonical fixed
    /// representative.
    pub class_reps: Vec<(Vec<bool>, Element)>,
    pub solved_classes: usize,
    pub class_count: usize,
}

/// `constant + Σ coeffs[j] * x_j`
#[derive(Clone, Debug)]
struct Affine {
    constant: BigInt,
    coeffs: Vec<BigInt>,
}

impl Affine {
    fn constant(c: BigInt, vars: usize) -> Self {
        Affine {
            constant: c,
            coeffs: vec![BigInt::zero(); vars],
        }
    }

    fn scaled_exponent(base: &BigInt, parity: bool, var: usize, vars: usize) -> Self {
        // base * (parity + 2 x_var)
        let mut a = Affine::constant(if parity { base.clone() } else { BigInt::zero() }, vars);
        a.coeffs[var] = base * 2;
        a
    }

    fn add(&self, other: &Affine, sign: i32) -> Affine {
        let f = |a: &BigInt, b: &BigInt| if sign > 0 { a + b } else { a - b };
        Affine {
            constant: f(&self.constant, &other.constant),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// All variable coefficients stay even, so the parity is the constant's.
    fn is_odd(&self) -> bool {
        num_integer::Integer::is_odd(&self.constant)
    }
}

/// An element whose exponents are affine in the unknowns of one parity class.
struct SymbolicElement {
    klein: Vec<(Affine, Affine)>,
    free: Vec<Affine>,
    tor: Vec<bool>,
}

impl SymbolicElement {
    fn constant(g: &Element, vars: usize) -> Self {
        SymbolicElement {
            klein: g
                .klein
                .iter()
                .map(|(s, t)| (Affine::constant(s.clone(), vars), Affine::constant(t.clone(), vars)))
                .collect(),
            free: g.free.iter().map(|n| Affine::constant(n.clone(), vars)).collect(),
            tor: g.tor.clone(),
        }
    }

    /// `base^(parity + 2 x_var)`.
    fn power(base: &Element, parity: bool, var: usize, vars: usize) -> Self {
        let klein = base
            .klein
            .iter()
            .map(|(s, t)| {
                let t_odd = num_integer::Integer::is_odd(t);
                let s_part = if t_odd {
                    Affine::constant(if parity { s.clone() } else { BigInt::zero() }, vars)
                } else {
                    Affine::scaled_exponent(s, parity, var, vars)
                };
                (s_part, Affine::scaled_exponent(t, parity, var, vars))
            })
            .collect();
        SymbolicElement {
            klein,
            free: base
                .free
                .iter()
                .map(|n| Affine::scaled_exponent(n, parity, var, vars))
                .collect(),
            tor: base.tor.iter().map(|&e| e && parity).collect(),
        }
    }

    fn mul(&self, other: &SymbolicElement) -> SymbolicElement {
        SymbolicElement {
            klein: self
                .klein
                .iter()
                .zip(&other.klein)
                .map(|((s, t), (s2, t2))| {
                    let sign = if t.is_odd() { -1 } else { 1 };
                    (s.add(s2, sign), t.add(t2, 1))
                })
                .collect(),
            free: self.free.iter().zip(&other.free).map(|(a, b)| a.add(b, 1)).collect(),
            tor: self.tor.iter().zip(&other.tor).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Integer coordinates in the order `s1, t1, ..., sl, tl, n1, ..., np`.
    fn integer_coords(&self) -> Vec<&Affine> {
        let mut out: Vec<&Affine> = Vec::new();
        for (s, t) in &self.klein {
            out.push(s);
            out.push(t);
        }
        out.extend(self.free.iter());
        out
    }
}

fn element_from_exponents(spec: GroupSpec, ints: &[BigInt], tor: &[bool]) -> Element {
    Element {
        klein: (0..spec.klein)
            .map(|i| (ints[2 * i].clone(), ints[2 * i + 1].clone()))
            .collect(),
        free: ints[2 * spec.klein..].to_vec(),
        tor: tor.to_vec(),
    }
}

impl Endomorphism {
    pub fn identity(spec: GroupSpec) -> Self {
        Endomorphism {
            spec,
            images: spec.generators().into_iter().map(|g| spec.gen(g)).collect(),
        }
    }

    /// Validates that the images satisfy every defining relation of G.
    pub fn new_checked(spec: GroupSpec, images: Vec<Element>) -> Result<Self, MorphismError> {
        let gens = spec.generators();
        if images.len() != gens.len() {
            return Err(MorphismError::ImageCount {
                expected: gens.len(),
                got: images.len(),
            });
        }
        if let Some(i) = images.iter().position(|x| x.spec() != spec) {
            return Err(MorphismError::WrongGroup {
                generator: gens[i].to_string(),
            });
        }
        let f = Endomorphism { spec, images };
        f.check_relations()?;
        Ok(f)
    }

    fn check_relations(&self) -> Result<(), MorphismError> {
        let spec = self.spec;
        let fail = |relation: String, image: &Element| {
            if image.is_identity() {
                Ok(())
            } else {
                Err(MorphismError::Relation {
                    relation,
                    image: image.to_string(),
                })
            }
        };
        for i in 0..spec.klein {
            let a = self.image(Generator::A(i));
            let b = self.image(Generator::B(i));
            let rel = b.mul(a).mul(&b.inv()).mul(a);
            fail(format!("b{0} a{0} b{0}^-1 a{0}", i + 1), &rel)?;
        }
        for j in 0..spec.torsion {
            let d = self.image(Generator::D(j));
            fail(format!("d{}^2", j + 1), &d.mul(d))?;
        }
        let gens = spec.generators();
        for (x, &g) in gens.iter().enumerate() {
            for &h in &gens[x + 1..] {
                if spec.factor_of(g) != spec.factor_of(h) {
                    let c = self.image(g).commutator(self.image(h));
                    fail(format!("[{}, {}]", g, h), &c)?;
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, g: Generator) -> &Element {
        let idx = self
            .spec
            .generators()
            .iter()
            .position(|&x| x == g)
            .expect("generator of this group");
        &self.images[idx]
    }

    pub fn apply(&self, g: &Element) -> Element {
        let spec = self.spec;
        let mut acc = spec.identity();
        let mut k = 0;
        for (s, t) in &g.klein {
            acc = acc.mul(&self.images[k].pow(s)).mul(&self.images[k + 1].pow(t));
            k += 2;
        }
        for n in &g.free {
            acc = acc.mul(&self.images[k].pow(n));
            k += 1;
        }
        for &e in &g.tor {
            if e {
                acc = acc.mul(&self.images[k]);
            }
            k += 1;
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        assert_eq!(self.spec, other.spec);
        let images = other.images.iter().map(|x| self.apply(x)).collect();
        Endomorphism::new_checked(self.spec, images).expect("composition of endomorphisms")
    }

    pub fn is_identity(&self) -> bool {
        *self == Endomorphism::identity(self.spec)
    }

    /// Surjectivity, which for these Hopfian groups is bijectivity.
    pub fn is_automorphism(&self) -> bool {
        Subgroup::from_generators(self.spec, &self.images) == Subgroup::special(self.spec, Special::Full)
    }

    /// Exact fixed subgroup.
    ///
    /// The exponent vector of `g` is split by parity class: `x = π + 2x̂`.
    /// Inside one class every exponent of `φ(g)` is an affine function of
    /// `x̂` and its torsion part is constant, so the fixed points of the class
    /// form an affine lattice. Fixed elements of the all-even class give a
    /// lattice; together with one fixed element per nonempty class they
    /// generate the fixed subgroup, since parity classes multiply additively.
    pub fn fixed_subgroup(&self) -> FixResult {
        let spec = self.spec;
        let n = spec.gen_count();
        let vars = spec.lattice_dim();
        let class_count = 1usize << n;
        let mut gens = Vec::new();
        let mut class_reps = Vec::new();
        for code in 0..class_count {
            // most significant bit first, so classes run in lexicographic order
            let class: Vec<bool> = (0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect();
            let Some(sol) = self.solve_class(&class) else {
                continue;
            };
            let (int_parity, tor) = class.split_at(vars);
            // exponents π + 2x̂
            let to_element = |x: &[BigInt]| {
                let ints: Vec<BigInt> = x.iter().zip(int_parity).map(|(v, &p)| v * 2 + u8::from(p)).collect();
                element_from_exponents(spec, &ints, tor)
            };
            if code == 0 {
                gens.extend(sol.lattice().basis_vecs().iter().map(|v| to_element(v)));
            } else {
                let rep = to_element(sol.offset());
                debug_assert_eq!(self.apply(&rep), rep);
                gens.push(rep.clone());
                class_reps.push((class, rep));
            }
        }
        let solved_classes = class_reps.len() + 1;
        FixResult {
            subgroup: Subgroup::from_generators(spec, &gens),
            class_reps,
            solved_classes,
            class_count,
        }
    }

    fn solve_class(&self, class: &[bool]) -> Option<crate::intlat::AffineLattice> {
        let spec = self.spec;
        let vars = spec.lattice_dim();
        let mut sym = SymbolicElement::constant(&spec.identity(), vars);
        for (k, &parity) in class.iter().enumerate() {
            let factor = if k < vars {
                SymbolicElement::power(&self.images[k], parity, k, vars)
            } else if parity {
                SymbolicElement::constant(&self.images[k], vars)
            } else {
                continue;
            };
            sym = sym.mul(&factor);
        }
        if sym.tor.as_slice() != &class[vars..] {
            return None;
        }
        // A x̂ + c = π + 2 x̂
        let coords = sym.integer_coords();
        let mut rows = Vec::with_capacity(vars);
        let mut rhs = Vec::with_capacity(vars);
        for (c, form) in coords.iter().enumerate() {
            let mut row = form.coeffs.clone();
            row[c] -= 2;
            rows.push(row);
            rhs.push(BigInt::from(class[c] as u8) - &form.constant);
        }
        solve_linear(&IntMatrix::from_rows(vars, rows), &rhs)
    }

    /// Random endomorphism: images are random words of length at most
    /// `word_len_bound`, retried until all relations hold.
    pub fn random(spec: GroupSpec, word_len_bound: usize, seed: u64) -> Result<Option<Self>, MorphismError> {
        Self::random_with_budget(spec, word_len_bound, seed, 200_000)
    }

    pub fn random_with_budget(
        spec: GroupSpec,
        word_len_bound: usize,
        seed: u64,
        attempts: usize,
    ) -> Result<Option<Self>, MorphismError> {
        if word_len_bound == 0 {
            return Err(MorphismError::ZeroBound);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..attempts {
            let images = (0..spec.gen_count())
                .map(|_| random_word(spec, word_len_bound, &mut rng))
                .collect();
            if let Ok(f) = Endomorphism::new_checked(spec, images) {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }
}

/// Random word of length `0..=max_len` over the generators and their inverses.
pub fn random_word<R: Rng>(spec: GroupSpec, max_len: usize, rng: &mut R) -> Element {
    let gens = spec.generators();
    let len = rng.gen_range(0..=max_len);
    let mut acc = spec.identity();
    if gens.is_empty() {
        return acc;
    }
    for _ in 0..len {
        let g = spec.gen(gens[rng.gen_range(0..gens.len())]);
        acc = acc.mul(&if rng.gen_bool(0.5) { g } else { g.inv() });
    }
    acc
}

/// Fixed subgroup of a family: the intersection of the individual ones.
pub fn fixed_family(fs: &[Endomorphism]) -> Subgroup {
    let mut it = fs.iter();
    let first = it.next().expect("nonempty family");
    it.fold(first.fixed_subgroup().subgroup, |acc, f| {
        acc.intersect(&f.fixed_subgroup().subgroup)
    })
}

/// Parses a map file: one `name -> word` line per generator, `#` comments.
/// With `partial_identity`, generators without a line map to themselves.
pub fn parse_map(spec: GroupSpec, text: &str, partial_identity: bool) -> Result<Endomorphism, MapError> {
    let gens = spec.generators();
    let mut images: Vec<Option<Element>> = vec![None; gens.len()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, word) = line.split_once("->").ok_or(MapError::Syntax { line: lineno + 1 })?;
        let name = name.trim();
        let g = spec.lookup(name).ok_or_else(|| MapError::UnknownGenerator {
            line: lineno + 1,
            name: name.to_string(),
        })?;
        let idx = gens.iter().position(|&x| x == g).unwrap();
        if images[idx].is_some() {
            return Err(MapError::Duplicate {
                line: lineno + 1,
                name: name.to_string(),
            });
        }
        let img = spec.parse_word(word.trim()).map_err(|e| MapError::Word {
            line: lineno + 1,
            source: e,
        })?;
        images[idx] = Some(img);
    }
    let mut full = Vec::with_capacity(gens.len());
    for (g, img) in gens.iter().zip(images) {
        match img {
            Some(x) => full.push(x),
            None if partial_identity => full.push(spec.gen(*g)),
            None => return Err(MapError::Missing { name: g.to_string() }),
        }
    }
    Endomorphism::new_checked(spec, full).map_err(MapError::Invalid)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("line {line}: expected `name -> word`")]
    Syntax { line: usize },
    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },
    #[error("line {line}: generator `{name}` mapped twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {source}")]
    Word {
        line: usize,
        source: crate::group::WordError,
    },
    #[error("no image given for `{name}` (use --partial-identity to default to the identity map)")]
    Missing { name: String },
    #[error(transparent)]
    Invalid(MorphismError),
}

impl std::fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (g, x) in self.spec.generators().iter().zip(&self.images) {
            writeln!(f, "{} -> {}", g, x)?;
        }
        Ok(())
    }
}

/// Endomorphism from a list of image words in generator order.
pub fn endo_from_words(spec: GroupSpec, words: &[&str]) -> Result<Endomorphism, MapError> {
    let text: String = spec
        .generators()
        .iter()
        .zip(words)
        .map(|(g, w)| format!("{} -> {}\n", g, w))
        .collect();
    parse_map(spec, &text, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twist_map(p: usize) -> Endomorphism {
        let spec = GroupSpec::new(1, p, 1);
        let mut words = vec!["a1 d1".to_string(), "b1 a1".to_string(), "c1 d1".to_string()];
        for j in 2..=p {
            words.push(format!("c{}^-1", j));
        }
        words.push("d1".into());
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        endo_from_words(spec, &refs).unwrap()
    }

    fn sub(spec: GroupSpec, text: &str) -> Subgroup {
        Subgroup::parse(spec, text).unwrap()
    }

    #[test]
    fn accepts_twist_map_map_and_identity() {
        twist_map(2);
        Endomorphism::identity(GroupSpec::new(2, 1, 1));
    }

    #[test]
    fn rejects_relation_violation() {
        let spec = GroupSpec::new(1, 0, 0);
        match endo_from_words(spec, &["b1", "b1"]) {
            Err(MapError::Invalid(MorphismError::Relation { image, .. })) => assert_eq!(image, "b1^2"),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn application() {
        let f = twist_map(2);
        let spec = f.spec();
        assert_eq!(
            f.apply(&spec.parse_word("b1").unwrap()),
            spec.parse_word("b1 a1").unwrap()
        );
        let ac = spec.parse_word("a1 c1").unwrap();
        assert_eq!(f.apply(&ac), ac);
        let g = spec.parse_word("a1^3 b1^-2 c2 d1").unwrap();
        assert_eq!(Endomorphism::identity(spec).apply(&g), g);
    }

    #[test]
    fn composition() {
        let f = twist_map(2);
        let spec = f.spec();
        let psi = endo_from_words(spec, &["a1 d1", "b1 a1^-1 d1", "c1 d1", "c2^-1", "d1"]).unwrap();
        assert!(f.compose(&psi).is_identity());
        assert!(psi.compose(&f).is_identity());
        assert_eq!(Endomorphism::identity(spec).compose(&f), f);
        let g = GroupSpec::new(1, 1, 0);
        let shear = endo_from_words(g, &["a1", "b1 a1", "c1"]).unwrap();
        assert_eq!(
            shear.compose(&shear).image(Generator::B(0)),
            &g.parse_word("b1 a1^2").unwrap()
        );
    }

    #[test]
    fn fixed_subgroups_of_worked_examples() {
        let f = twist_map(2);
        let spec = f.spec();
        assert_eq!(f.fixed_subgroup().subgroup, sub(spec, "a1^2; b1^2; a1 c1; d1"));
        assert_eq!(
            Endomorphism::identity(spec).fixed_subgroup().subgroup,
            Subgroup::special(spec, Special::Full)
        );
        let g = GroupSpec::new(1, 1, 0);
        let shear = endo_from_words(g, &["a1", "b1 a1", "c1"]).unwrap();
        assert_eq!(shear.fixed_subgroup().subgroup, sub(g, "a1; b1^2; c1"));
        let g2 = GroupSpec::new(2, 0, 0);
        let double_shear = endo_from_words(g2, &["a1", "b1 a1", "a2", "b2^-1"]).unwrap();
        assert_eq!(double_shear.fixed_subgroup().subgroup, sub(g2, "a1; b1^2; a2"));
    }

    #[test]
    fn fix_reps_are_fixed() {
        let f = twist_map(1);
        let res = f.fixed_subgroup();
        assert_eq!(res.class_count, 16);
        for (_, r) in &res.class_reps {
            assert_eq!(&f.apply(r), r);
        }
        for g in res.subgroup.stored_generators() {
            assert_eq!(f.apply(&g), g);
        }
    }

    #[test]
    fn families() {
        let g = GroupSpec::new(1, 1, 0);
        let id = Endomorphism::identity(g);
        let shear = endo_from_words(g, &["a1", "b1 a1", "c1"]).unwrap();
        let kill = endo_from_words(g, &["a1", "b1", "c1^-1"]).unwrap();
        assert_eq!(
            fixed_family(std::slice::from_ref(&id)),
            Subgroup::special(g, Special::Full)
        );
        assert_eq!(fixed_family(&[shear.clone(), id]), shear.fixed_subgroup().subgroup);
        assert_eq!(fixed_family(&[shear, kill]), sub(g, "a1; b1^2"));
    }

    #[test]
    fn automorphism_detection() {
        assert!(twist_map(2).is_automorphism());
        assert!(Endomorphism::identity(GroupSpec::new(1, 1, 1)).is_automorphism());
        let ns2 = GroupSpec::new(1, 0, 0);
        assert!(!endo_from_words(ns2, &["a1^2", "b1"]).unwrap().is_automorphism());
    }

    #[test]
    fn random_endomorphisms_are_reproducible() {
        let spec = GroupSpec::new(1, 1, 0);
        let a = Endomorphism::random(spec, 3, 7).unwrap();
        let b = Endomorphism::random(spec, 3, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_some());
        assert_eq!(Endomorphism::random(spec, 0, 7), Err(MorphismError::ZeroBound));
        let c = Endomorphism::random(spec, 1, 11).unwrap();
        assert_eq!(c, Endomorphism::random(spec, 1, 11).unwrap());
    }

    #[test]
    fn map_file_errors() {
        let spec = GroupSpec::new(1, 0, 0);
        assert!(matches!(
            parse_map(spec, "a1 -> a1\n", false),
            Err(MapError::Missing { .. })
        ));
        assert!(parse_map(spec, "a1 -> a1 # keep\n", true).unwrap().is_identity());
        assert!(matches!(
            parse_map(spec, "a1 = a1", false),
            Err(MapError::Syntax { line: 1 })
        ));
        assert!(matches!(
            parse_map(spec, "x1 -> a1", false),
            Err(MapError::UnknownGenerator { .. })
        ));
    }
}
