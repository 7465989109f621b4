//! The ambient group `G = NS2^l x Z^p x Z2^q` and its elements in normal form.
//!
//! An element is stored as the exponent record of
//! `a1^s1 b1^t1 ... al^sl bl^tl c1^n1 ... cp^np d1^e1 ... dq^eq`.
//! In each Klein bottle factor `b a = a^-1 b`, so
//! `(s, t)(s', t') = (s + (-1)^t s', t + t')`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

/// The five Euclidean surface groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EuclideanBlock {
    Trivial,
    Z,
    Z2Free,
    Z2,
    KleinBottle,
}

/// Canonical `(l, p, q)` description of `NS2^l x Z^p x Z2^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    pub klein: usize,
    pub free: usize,
    pub torsion: usize,
}

/// A generator of G, by position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::A(i) => write!(f, "a{}", i + 1),
            Generator::B(i) => write!(f, "b{}", i + 1),
            Generator::C(i) => write!(f, "c{}", i + 1),
            Generator::D(i) => write!(f, "d{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{name}` at token {token} (offset {offset})")]
    UnknownGenerator { name: String, token: usize, offset: usize },
    #[error("malformed exponent `{text}` at token {token} (offset {offset})")]
    BadExponent { text: String, token: usize, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("empty group description")]
    Empty,
    #[error("unknown factor `{0}` (expected NS2, Z, Z2, T2, P2 or 1)")]
    UnknownFactor(String),
    #[error("bad repetition count in `{0}`")]
    BadCount(String),
}

impl EuclideanBlock {
    /// Parses one factor name; `T2` is the torus and `P2` the projective plane.
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "1" => EuclideanBlock::Trivial,
            "Z" => EuclideanBlock::Z,
            "T2" => EuclideanBlock::Z2Free,
            "Z2" | "P2" => EuclideanBlock::Z2,
            "NS2" => EuclideanBlock::KleinBottle,
            _ => return None,
        })
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = SpecError;

    /// Factors separated by `x`, each optionally repeated with `^k`.
    fn from_str(text: &str) -> Result<Self, SpecError> {
        if text.trim().is_empty() {
            return Err(SpecError::Empty);
        }
        let mut blocks = Vec::new();
        for raw in text.split('x') {
            let factor = raw.trim();
            let (name, count) = match factor.split_once('^') {
                Some((n, k)) => {
                    let k: usize = k.trim().parse().map_err(|_| SpecError::BadCount(factor.to_string()))?;
                    (n.trim(), k)
                }
                None => (factor, 1),
            };
            let block = EuclideanBlock::parse(name).ok_or_else(|| SpecError::UnknownFactor(name.to_string()))?;
            blocks.extend(std::iter::repeat_n(block, count));
        }
        Ok(GroupSpec::from_blocks(&blocks))
    }
}

/// Distinguished normal subgroups: `N = <a_i>`, `G' = <a_i^2>`, and the
/// free abelian kernel `T` of the parity quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distinguished {
    N,
    GPrime,
    T,
}

impl GroupSpec {
    pub fn new(klein: usize, free: usize, torsion: usize) -> Self {
        GroupSpec { klein, free, torsion }
    }

    pub fn from_blocks(blocks: &[EuclideanBlock]) -> Self {
        let mut spec = GroupSpec::new(0, 0, 0);
        for b in blocks {
            match b {
                EuclideanBlock::Trivial => {}
                EuclideanBlock::Z => spec.free += 1,
                EuclideanBlock::Z2Free => spec.free += 2,
                EuclideanBlock::Z2 => spec.torsion += 1,
                EuclideanBlock::KleinBottle => spec.klein += 1,
            }
        }
        spec
    }

    /// Number of generators, `2l + p + q`.
    pub fn gen_count(&self) -> usize {
        2 * self.klein + self.free + self.torsion
    }

    /// Rank of the lattice `T`, `2l + p`.
    pub fn lattice_dim(&self) -> usize {
        2 * self.klein + self.free
    }

    /// Dimension of the parity quotient `Z2^(l+q)`.
    pub fn quotient_dim(&self) -> usize {
        self.klein + self.torsion
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::with_capacity(self.gen_count());
        for i in 0..self.klein {
            out.push(Generator::A(i));
            out.push(Generator::B(i));
        }
        out.extend((0..self.free).map(Generator::C));
        out.extend((0..self.torsion).map(Generator::D));
        out
    }

    /// Direct factor a generator belongs to, numbered in generator order.
    pub fn factor_of(&self, g: Generator) -> usize {
        match g {
            Generator::A(i) | Generator::B(i) => i,
            Generator::C(j) => self.klein + j,
            Generator::D(j) => self.klein + self.free + j,
        }
    }

    pub fn identity(&self) -> Element {
        Element {
            klein: vec![(BigInt::zero(), BigInt::zero()); self.klein],
            free: vec![BigInt::zero(); self.free],
            tor: vec![false; self.torsion],
        }
    }

    pub fn gen(&self, g: Generator) -> Element {
        let mut e = self.identity();
        match g {
            Generator::A(i) => e.klein[i].0 = BigInt::one(),
            Generator::B(i) => e.klein[i].1 = BigInt::one(),
            Generator::C(j) => e.free[j] = BigInt::one(),
            Generator::D(j) => e.tor[j] = true,
        }
        e
    }

    pub fn lookup(&self, name: &str) -> Option<Generator> {
        let (head, idx) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
        if idx.starts_with('0') {
            return None;
        }
        let i: usize = idx.parse().ok()?;
        let g = match head {
            "a" if i <= self.klein => Generator::A(i - 1),
            "b" if i <= self.klein => Generator::B(i - 1),
            "c" if i <= self.free => Generator::C(i - 1),
            "d" if i <= self.torsion => Generator::D(i - 1),
            _ => return None,
        };
        Some(g)
    }

    /// Parses a whitespace-separated word such as `a1^2 b1^-3 c1 d2` and
    /// returns its normal form. The empty word and the token `1` denote the
    /// identity.
    pub fn parse_word(&self, text: &str) -> Result<Element, WordError> {
        let mut acc = self.identity();
        let mut pos = 0;
        for (index, piece) in text.split_whitespace().enumerate() {
            let offset = pos + text[pos..].find(piece).unwrap_or(0);
            pos = offset + piece.len();
            let token = index + 1;
            if piece == "1" {
                continue;
            }
            let (name, exp) = match piece.split_once('^') {
                Some((n, e)) => {
                    let k: BigInt = e.parse().map_err(|_| WordError::BadExponent {
                        text: e.to_string(),
                        token,
                        offset,
                    })?;
                    (n, k)
                }
                None => (piece, BigInt::one()),
            };
            let g = self.lookup(name).ok_or_else(|| WordError::UnknownGenerator {
                name: name.to_string(),
                token,
                offset,
            })?;
            acc = acc.mul(&self.gen(g).pow(&exp));
        }
        Ok(acc)
    }

    pub fn in_distinguished(&self, g: &Element, which: Distinguished) -> bool {
        g.in_distinguished(which)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.klein > 0 {
            parts.push(if self.klein == 1 {
                "NS2".to_string()
            } else {
                format!("NS2^{}", self.klein)
            });
        }
        if self.free > 0 {
            parts.push(if self.free == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free)
            });
        }
        if self.torsion > 0 {
            parts.push(if self.torsion == 1 {
                "Z2".to_string()
            } else {
                format!("Z2^{}", self.torsion)
            });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Normal-form element; two elements are equal in G iff their records are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub klein: Vec<(BigInt, BigInt)>,
    pub free: Vec<BigInt>,
    pub tor: Vec<bool>,
}

fn is_odd(x: &BigInt) -> bool {
    x.is_odd()
}

impl Element {
    pub fn spec(&self) -> GroupSpec {
        GroupSpec::new(self.klein.len(), self.free.len(), self.tor.len())
    }

    pub fn is_identity(&self) -> bool {
        self.klein.iter().all(|(s, t)| s.is_zero() && t.is_zero())
            && self.free.iter().all(Zero::is_zero)
            && self.tor.iter().all(|e| !e)
    }

    pub fn mul(&self, other: &Element) -> Element {
        debug_assert_eq!(self.spec(), other.spec(), "elements of different groups");
        let klein = self
            .klein
            .iter()
            .zip(&other.klein)
            .map(|((s, t), (s2, t2))| {
                let s = if is_odd(t) { s - s2 } else { s + s2 };
                (s, t + t2)
            })
            .collect();
        let free = self.free.iter().zip(&other.free).map(|(a, b)| a + b).collect();
        let tor = self.tor.iter().zip(&other.tor).map(|(a, b)| a ^ b).collect();
        Element { klein, free, tor }
    }

    pub fn inv(&self) -> Element {
        let klein = self
            .klein
            .iter()
            .map(|(s, t)| {
                let s = if is_odd(t) { s.clone() } else { -s };
                (s, -t)
            })
            .collect();
        Element {
            klein,
            free: self.free.iter().map(|n| -n).collect(),
            tor: self.tor.clone(),
        }
    }

    /// `self^k`. A Klein pair with odd `t` squares to `b^2t`, so its powers
    /// keep the `a`-exponent only for odd `k`.
    pub fn pow(&self, k: &BigInt) -> Element {
        let k_odd = is_odd(k);
        let klein = self
            .klein
            .iter()
            .map(|(s, t)| {
                let s = if is_odd(t) {
                    if k_odd {
                        s.clone()
                    } else {
                        BigInt::zero()
                    }
                } else {
                    s * k
                };
                (s, t * k)
            })
            .collect();
        Element {
            klein,
            free: self.free.iter().map(|n| n * k).collect(),
            tor: self.tor.iter().map(|&e| e && k_odd).collect(),
        }
    }

    pub fn pow_i64(&self, k: i64) -> Element {
        self.pow(&BigInt::from(k))
    }

    pub fn commutator(&self, other: &Element) -> Element {
        self.mul(other).mul(&self.inv()).mul(&other.inv())
    }

    /// Every exponent reduced mod 2, in generator order.
    pub fn parity_class(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.spec().gen_count());
        for (s, t) in &self.klein {
            out.push(is_odd(s));
            out.push(is_odd(t));
        }
        out.extend(self.free.iter().map(is_odd));
        out.extend(self.tor.iter().copied());
        out
    }

    /// Image in `Z2^(l+q)`: parities of the `b`-exponents, then the torsion part.
    pub fn quotient_image(&self) -> Vec<bool> {
        let mut out: Vec<bool> = self.klein.iter().map(|(_, t)| is_odd(t)).collect();
        out.extend(self.tor.iter().copied());
        out
    }

    /// Coordinates `(s_i, floor(t_i/2), n_j)`; for an element of `T` these are
    /// its lattice coordinates.
    pub fn lattice_coords(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.spec().lattice_dim());
        for (s, t) in &self.klein {
            out.push(s.clone());
            out.push(t.div_floor(&BigInt::from(2)));
        }
        out.extend(self.free.iter().cloned());
        out
    }

    /// Inverse of [`Element::lattice_coords`] on the elements with the given
    /// parity-quotient image.
    pub fn from_lattice_coords(spec: GroupSpec, quotient: &[bool], w: &[BigInt]) -> Element {
        assert_eq!(quotient.len(), spec.quotient_dim());
        assert_eq!(w.len(), spec.lattice_dim());
        let klein = (0..spec.klein)
            .map(|i| {
                let t = &w[2 * i + 1] * 2 + if quotient[i] { 1 } else { 0 };
                (w[2 * i].clone(), t)
            })
            .collect();
        Element {
            klein,
            free: w[2 * spec.klein..].to_vec(),
            tor: quotient[spec.klein..].to_vec(),
        }
    }

    pub fn in_distinguished(&self, which: Distinguished) -> bool {
        let torsion_free = self.free.iter().all(Zero::is_zero) && self.tor.iter().all(|e| !e);
        match which {
            Distinguished::N => torsion_free && self.klein.iter().all(|(_, t)| t.is_zero()),
            Distinguished::GPrime => torsion_free && self.klein.iter().all(|(s, t)| t.is_zero() && s.is_even()),
            Distinguished::T => self.tor.iter().all(|e| !e) && self.klein.iter().all(|(_, t)| t.is_even()),
        }
    }

    /// The square root in `N` of an element of `G'`.
    pub fn sqrt_in_n(&self) -> Result<Element, NotInGPrime> {
        for (i, (s, t)) in self.klein.iter().enumerate() {
            if !t.is_zero() {
                return Err(NotInGPrime(format!("b{}^{}", i + 1, t)));
            }
            if s.is_odd() {
                return Err(NotInGPrime(format!("a{}^{}", i + 1, s)));
            }
        }
        if let Some(j) = self.free.iter().position(|n| !n.is_zero()) {
            return Err(NotInGPrime(format!("c{}^{}", j + 1, self.free[j])));
        }
        if let Some(j) = self.tor.iter().position(|&e| e) {
            return Err(NotInGPrime(format!("d{}", j + 1)));
        }
        let mut root = self.clone();
        for (s, _) in root.klein.iter_mut() {
            *s = &*s / 2;
        }
        Ok(root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("element is not in the commutator subgroup: offending coordinate {0}")]
pub struct NotInGPrime(pub String);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut toks = Vec::new();
        let mut push = |name: String, k: &BigInt| {
            if k.is_zero() {
            } else if k.is_one() {
                toks.push(name);
            } else {
                toks.push(format!("{}^{}", name, k));
            }
        };
        for (i, (s, t)) in self.klein.iter().enumerate() {
            push(format!("a{}", i + 1), s);
            push(format!("b{}", i + 1), t);
        }
        for (j, n) in self.free.iter().enumerate() {
            push(format!("c{}", j + 1), n);
        }
        for (j, &e) in self.tor.iter().enumerate() {
            if e {
                toks.push(format!("d{}", j + 1));
            }
        }
        if toks.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", toks.join(" "))
        }
    }
}

/// Sign flip of the `s`-coordinates selected by `quotient`: the action of
/// conjugation by an element with that parity image on `T`.
pub(crate) fn conjugation_action(spec: GroupSpec, quotient: &[bool], w: &[BigInt]) -> Vec<BigInt> {
    let mut out = w.to_vec();
    for i in 0..spec.klein {
        if quotient[i] {
            out[2 * i] = -&out[2 * i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns2() -> GroupSpec {
        GroupSpec::new(1, 0, 0)
    }

    fn el(spec: GroupSpec, w: &str) -> Element {
        spec.parse_word(w).unwrap()
    }

    #[test]
    fn spec_strings() {
        let g: GroupSpec = "NS2 x Z^2 x Z2".parse().unwrap();
        assert_eq!(g, GroupSpec::new(1, 2, 1));
        assert_eq!(g.to_string().parse::<GroupSpec>().unwrap(), g);
        assert_eq!("T2 x P2 x NS2x1".parse::<GroupSpec>().unwrap(), GroupSpec::new(1, 2, 1));
        assert_eq!("1".parse::<GroupSpec>().unwrap(), GroupSpec::new(0, 0, 0));
        assert!(matches!("NS3".parse::<GroupSpec>(), Err(SpecError::UnknownFactor(_))));
        assert!(matches!("Z^x".parse::<GroupSpec>(), Err(SpecError::BadCount(_))));
        assert!("".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn canonicalize_blocks() {
        use EuclideanBlock::*;
        assert_eq!(GroupSpec::from_blocks(&[KleinBottle]), GroupSpec::new(1, 0, 0));
        assert_eq!(GroupSpec::from_blocks(&[Z2Free, Z2]), GroupSpec::new(0, 2, 1));
        assert_eq!(
            GroupSpec::from_blocks(&[Trivial, Z, KleinBottle]),
            GroupSpec::new(1, 1, 0)
        );
    }

    #[test]
    fn b_a_is_a_inverse_b() {
        let g = ns2();
        let ba = g.gen(Generator::B(0)).mul(&g.gen(Generator::A(0)));
        assert_eq!(ba, el(g, "a1^-1 b1"));
        assert_eq!(ba.to_string(), "a1^-1 b1");
    }

    #[test]
    fn identity_and_torsion() {
        let g = GroupSpec::new(1, 0, 1);
        let x = el(g, "a1^3 b1 d1");
        assert_eq!(x.mul(&g.identity()), x);
        let d = g.gen(Generator::D(0));
        assert!(d.mul(&d).is_identity());
    }

    #[test]
    fn inverses() {
        let g = ns2();
        assert_eq!(g.gen(Generator::A(0)).inv(), el(g, "a1^-1"));
        assert_eq!(g.gen(Generator::B(0)).inv(), el(g, "b1^-1"));
        let ab = el(g, "a1 b1");
        assert_eq!(ab.inv(), el(g, "a1 b1^-1"));
        assert!(ab.mul(&ab.inv()).is_identity());
    }

    #[test]
    fn powers() {
        let g = ns2();
        for r in -3..=3 {
            let x = el(g, &format!("a1^{} b1", r));
            assert_eq!(x.pow_i64(2), el(g, "b1^2"));
        }
        assert!(el(g, "a1 b1").pow_i64(0).is_identity());
        assert_eq!(el(g, "a1 b1").pow_i64(3), el(g, "a1 b1^3"));
    }

    #[test]
    fn parsing() {
        let g = ns2();
        assert_eq!(el(g, "b1 a1"), el(g, "a1^-1 b1"));
        assert!(el(g, "a1 a1^-1").is_identity());
        assert_eq!(el(g, "b1 a1^3 b1 a1^2"), el(g, "a1^-1 b1^2"));
        assert!(el(g, "").is_identity());
        assert!(el(g, "1").is_identity());
    }

    #[test]
    fn parse_errors_carry_position() {
        let g = GroupSpec::new(1, 1, 0);
        match g.parse_word("a1 c2") {
            Err(WordError::UnknownGenerator { name, token, offset }) => {
                assert_eq!((name.as_str(), token, offset), ("c2", 2, 3));
            }
            other => panic!("unexpected {:?}", other),
        }
        match g.parse_word("a1^x") {
            Err(WordError::BadExponent { token: 1, .. }) => {}
            other => panic!("unexpected {:?}", other),
        }
        assert!(g.parse_word("a01").is_err());
        assert!(g.parse_word("a0").is_err());
    }

    #[test]
    fn parity_classes() {
        let g = GroupSpec::new(1, 0, 1);
        assert_eq!(g.identity().parity_class(), vec![false; 3]);
        assert_eq!(el(g, "a1 b1 d1").parity_class(), vec![true, true, true]);
        let b = el(g, "b1");
        let a = el(g, "a1");
        let sum: Vec<bool> = b
            .parity_class()
            .iter()
            .zip(a.parity_class())
            .map(|(x, y)| x ^ y)
            .collect();
        assert_eq!(b.mul(&a).parity_class(), sum);
    }

    #[test]
    fn square_roots() {
        let g = GroupSpec::new(2, 0, 0);
        assert_eq!(el(g, "a1^2").sqrt_in_n().unwrap(), el(g, "a1"));
        assert_eq!(el(g, "a1^4 a2^-2").sqrt_in_n().unwrap(), el(g, "a1^2 a2^-1"));
        assert!(el(g, "b1^2").sqrt_in_n().is_err());
    }

    #[test]
    fn distinguished_membership() {
        let g = ns2();
        assert!(el(g, "a1").in_distinguished(Distinguished::N));
        assert!(!el(g, "a1").in_distinguished(Distinguished::GPrime));
        assert!(el(g, "b1^2").in_distinguished(Distinguished::T));
        assert!(!el(g, "b1").in_distinguished(Distinguished::T));
    }

    #[test]
    fn lattice_coords_round_trip() {
        let g = GroupSpec::new(2, 1, 1);
        let x = el(g, "a1^-3 b1^-3 a2 b2^4 c1^2 d1");
        let w = x.lattice_coords();
        assert_eq!(Element::from_lattice_coords(g, &x.quotient_image(), &w), x);
    }
}
