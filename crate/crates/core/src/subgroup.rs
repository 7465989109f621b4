//! Finitely generated subgroups of `G`.
//!
//! The parity quotient `G -> Z2^(l+q)` (b-exponent parities and torsion part)
//! has free abelian kernel `T`, with coordinates `(s1, t1/2, ..., sl, tl/2,
//! n1, ..., np)`. A subgroup `H` is stored as
//!
//! * its image `F` in the quotient, as a reduced echelon basis,
//! * one representative of `H` per basis vector of `F`,
//! * the lattice `H ∩ T` in Hermite normal form.
//!
//! Representatives are reduced modulo the lattice, so equal subgroups have
//! equal records. Conjugation by an element with quotient image `f` acts on
//! `T` by negating each `s_i` with `f_i = 1`; the lattice is invariant under
//! these sign flips.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{conjugation_action, Element, Generator, GroupSpec};
use crate::intlat::{affine_meet, lattice_meet, snf, AffineLattice, IntMatrix, Lattice, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("first subgroup is not contained in the second")]
    NotContained,
    #[error("operation requires {0}")]
    Precondition(String),
}

/// Named subgroups of G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Special {
    Full,
    Trivial,
    N,
    GPrime,
    T,
}

/// `[K : H]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{}", n),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

/// Bounds on the minimal number of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    /// Number of invariant factors of the abelianization.
    pub lower: usize,
    /// Size of `generators`.
    pub upper: usize,
    pub exact: bool,
    /// A generating set realizing `upper`.
    pub generators: Vec<Element>,
}

impl RankCertificate {
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.upper)
    }
}

impl fmt::Display for RankCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{} (exact)", self.upper)
        } else {
            write!(f, "{}..{}", self.lower, self.upper)
        }
    }
}

/// Limits for the generating-set search behind [`Subgroup::rank`].
#[derive(Clone, Copy, Debug)]
pub struct RankOptions {
    /// Maximum number of candidate generating sets tested.
    pub max_checks: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { max_checks: 4000 }
    }
}

/// Isomorphism type of a subgroup of `NS2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionType {
    Trivial,
    Z,
    Z2,
    NS2,
}

impl fmt::Display for ProjectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProjectionType::Trivial => "1",
            ProjectionType::Z => "Z",
            ProjectionType::Z2 => "Z^2",
            ProjectionType::NS2 => "NS2",
        };
        write!(f, "{}", s)
    }
}

/// `H ≅ πH × (H ∩ Z2^q)` for `H ≤ NS2 × Z2^q`.
#[derive(Clone, Debug)]
pub struct Euc2Decomposition {
    pub projection_type: ProjectionType,
    /// `πH`, as a subgroup of `NS2`.
    pub projection: Subgroup,
    /// Presentation generators `u, v` of `πH` (as elements of G with trivial
    /// torsion part) paired with their chosen preimages in `H`.
    pub splitting: Vec<(Element, Element)>,
    pub torsion_part: Subgroup,
    /// The preimages satisfy the presentation relation of `πH`, and together
    /// with the torsion part they generate `H`.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    spec: GroupSpec,
    quotient_basis: Vec<Vec<bool>>,
    reps: Vec<Element>,
    lattice: Lattice,
}

fn pivot(v: &[bool]) -> Option<usize> {
    v.iter().position(|&b| b)
}

fn xor_into(dst: &mut [bool], src: &[bool]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

fn product(spec: GroupSpec, elems: impl IntoIterator<Item = Element>) -> Element {
    elems.into_iter().fold(spec.identity(), |acc, x| acc.mul(&x))
}

/// Closes a lattice under the sign flips induced by the given quotient vectors.
fn conjugation_closure(spec: GroupSpec, lattice: Lattice, flips: &[Vec<bool>]) -> Lattice {
    let mut out = lattice;
    // the flips commute and are involutions, so one pass suffices
    for f in flips {
        let flipped = out
            .basis_vecs()
            .iter()
            .map(|w| conjugation_action(spec, f, w))
            .collect();
        out = out.join(&Lattice::span(spec.lattice_dim(), flipped));
    }
    out
}

fn z2_rank(vectors: impl IntoIterator<Item = Vec<bool>>) -> usize {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for mut v in vectors {
        for r in &rows {
            if let Some(p) = pivot(r) {
                if v[p] {
                    xor_into(&mut v, r);
                }
            }
        }
        if pivot(&v).is_some() {
            rows.push(v);
        }
    }
    rows.len()
}

impl Subgroup {
    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    /// Reduced echelon basis of the parity-quotient image.
    pub fn quotient_basis(&self) -> &[Vec<bool>] {
        &self.quotient_basis
    }

    pub fn reps(&self) -> &[Element] {
        &self.reps
    }

    /// `H ∩ T` in lattice coordinates.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn trivial(spec: GroupSpec) -> Self {
        Subgroup {
            spec,
            quotient_basis: Vec::new(),
            reps: Vec::new(),
            lattice: Lattice::zero(spec.lattice_dim()),
        }
    }

    /// Assembles a subgroup from a conjugation-closed lattice and quotient
    /// representatives, canonicalizing the representatives.
    fn from_parts(spec: GroupSpec, basis: Vec<(Vec<bool>, Element)>, lattice: Lattice) -> Self {
        let mut quotient_basis = Vec::with_capacity(basis.len());
        let mut reps = Vec::with_capacity(basis.len());
        for (f, r) in basis {
            let w = lattice.reduce(&r.lattice_coords());
            reps.push(Element::from_lattice_coords(spec, &f, &w));
            quotient_basis.push(f);
        }
        Subgroup {
            spec,
            quotient_basis,
            reps,
            lattice,
        }
    }

    pub fn from_generators(spec: GroupSpec, gens: &[Element]) -> Self {
        // echelon form of the quotient images, carrying elements of H along
        let mut rows: Vec<(Vec<bool>, Element)> = Vec::new();
        for g in gens {
            debug_assert_eq!(g.spec(), spec);
            let mut v = g.quotient_image();
            let mut x = g.clone();
            for (rv, rx) in &rows {
                if v[pivot(rv).unwrap()] {
                    xor_into(&mut v, rv);
                    x = x.mul(rx);
                }
            }
            if pivot(&v).is_some() {
                rows.push((v, x));
            }
        }
        rows.sort_by_key(|(v, _)| pivot(v));
        for i in 0..rows.len() {
            let p = pivot(&rows[i].0).unwrap();
            let (rv, rx) = rows[i].clone();
            for (j, row) in rows.iter_mut().enumerate() {
                if j != i && row.0[p] {
                    xor_into(&mut row.0, &rv);
                    row.1 = row.1.mul(&rx);
                }
            }
        }
        let mut shell = Subgroup {
            spec,
            quotient_basis: rows.iter().map(|(v, _)| v.clone()).collect(),
            reps: rows.iter().map(|(_, x)| x.clone()).collect(),
            lattice: Lattice::zero(spec.lattice_dim()),
        };

        // H ∩ T is generated, as a normal subgroup, by g * rep(g)^-1,
        // the squares of the representatives and their commutators
        let mut lattice_gens = Vec::new();
        for g in gens {
            let r = shell
                .quotient_rep(&g.quotient_image())
                .expect("generator image lies in the span");
            lattice_gens.push(g.mul(&r.inv()).lattice_coords());
        }
        for (i, r) in shell.reps.iter().enumerate() {
            lattice_gens.push(r.mul(r).lattice_coords());
            for s in &shell.reps[i + 1..] {
                lattice_gens.push(r.commutator(s).lattice_coords());
            }
        }
        let lattice = conjugation_closure(
            spec,
            Lattice::span(spec.lattice_dim(), lattice_gens),
            &shell.quotient_basis,
        );
        shell.lattice = lattice;
        let basis = shell.quotient_basis.into_iter().zip(shell.reps).collect();
        Subgroup::from_parts(spec, basis, shell.lattice)
    }

    /// Parses `w1; w2; ...` (commas also separate) into the generated subgroup.
    pub fn parse(spec: GroupSpec, text: &str) -> Result<Self, crate::group::WordError> {
        let gens = text
            .split([';', ','])
            .filter(|w| !w.trim().is_empty())
            .map(|w| spec.parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subgroup::from_generators(spec, &gens))
    }

    pub fn special(spec: GroupSpec, which: Special) -> Self {
        let gens: Vec<Element> = match which {
            Special::Full => spec.generators().into_iter().map(|g| spec.gen(g)).collect(),
            Special::Trivial => Vec::new(),
            Special::N => (0..spec.klein).map(|i| spec.gen(Generator::A(i))).collect(),
            Special::GPrime => (0..spec.klein).map(|i| spec.gen(Generator::A(i)).pow_i64(2)).collect(),
            Special::T => {
                let mut v = Vec::new();
                for i in 0..spec.klein {
                    v.push(spec.gen(Generator::A(i)));
                    v.push(spec.gen(Generator::B(i)).pow_i64(2));
                }
                v.extend((0..spec.free).map(|j| spec.gen(Generator::C(j))));
                v
            }
        };
        Subgroup::from_generators(spec, &gens)
    }

    /// The torsion factor `Z2^q`.
    pub fn torsion_factor(spec: GroupSpec) -> Self {
        let gens: Vec<Element> = (0..spec.torsion).map(|j| spec.gen(Generator::D(j))).collect();
        Subgroup::from_generators(spec, &gens)
    }

    /// Basis indices whose sum is `f`, or `None` if `f` is outside the image.
    fn quotient_decompose(&self, f: &[bool]) -> Option<Vec<usize>> {
        let mut v = f.to_vec();
        let mut used = Vec::new();
        for (i, b) in self.quotient_basis.iter().enumerate() {
            if v[pivot(b).unwrap()] {
                xor_into(&mut v, b);
                used.push(i);
            }
        }
        pivot(&v).is_none().then_some(used)
    }

    /// Some element of `H` with quotient image `f`.
    fn quotient_rep(&self, f: &[bool]) -> Option<Element> {
        let used = self.quotient_decompose(f)?;
        Some(product(self.spec, used.into_iter().map(|i| self.reps[i].clone())))
    }

    fn lattice_element(&self, w: &[BigInt]) -> Element {
        Element::from_lattice_coords(self.spec, &vec![false; self.spec.quotient_dim()], w)
    }

    /// Lattice basis elements followed by the quotient representatives.
    pub fn stored_generators(&self) -> Vec<Element> {
        let mut out: Vec<Element> = self
            .lattice
            .basis_vecs()
            .iter()
            .map(|w| self.lattice_element(w))
            .collect();
        out.extend(self.reps.iter().cloned());
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.reps.is_empty() && self.lattice.rank() == 0
    }

    pub fn contains(&self, g: &Element) -> bool {
        match self.quotient_rep(&g.quotient_image()) {
            Some(r) => self.lattice.contains(&r.inv().mul(g).lattice_coords()),
            None => false,
        }
    }

    /// `other ⊆ self`.
    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.stored_generators().iter().all(|g| self.contains(g))
    }

    /// All elements of the quotient image, paired with representatives.
    fn quotient_elements(&self) -> Vec<(Vec<bool>, Element)> {
        let k = self.quotient_basis.len();
        (0u64..1 << k)
            .map(|mask| {
                let mut f = vec![false; self.spec.quotient_dim()];
                let mut x = self.spec.identity();
                for i in 0..k {
                    if mask >> i & 1 == 1 {
                        xor_into(&mut f, &self.quotient_basis[i]);
                        x = x.mul(&self.reps[i]);
                    }
                }
                (f, x)
            })
            .collect()
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(self.spec, other.spec);
        let meet = lattice_meet(&self.lattice, &other.lattice);
        let mut gens: Vec<Element> = meet.basis_vecs().iter().map(|w| self.lattice_element(w)).collect();
        for (f, r) in self.quotient_elements().into_iter().skip(1) {
            let Some(r2) = other.quotient_rep(&f) else {
                continue;
            };
            // elements of H with image f have coordinates rep + (H ∩ T)
            let c1 = AffineLattice::new(r.lattice_coords(), self.lattice.clone());
            let c2 = AffineLattice::new(r2.lattice_coords(), other.lattice.clone());
            if let Some(c) = affine_meet(&c1, &c2) {
                gens.push(Element::from_lattice_coords(self.spec, &f, c.offset()));
            }
        }
        Subgroup::from_generators(self.spec, &gens)
    }

    /// `[other : self]`, defined when `self ⊆ other`.
    pub fn index_in(&self, other: &Subgroup) -> Result<Index, SubgroupError> {
        if !other.contains_subgroup(self) {
            return Err(SubgroupError::NotContained);
        }
        let Some(lattice_index) = self.lattice.index_in(&other.lattice) else {
            return Ok(Index::Infinite);
        };
        let quotient_index = BigInt::one() << (other.reps.len() - self.reps.len());
        Ok(Index::Finite(lattice_index * quotient_index))
    }

    pub fn commutator_subgroup(&self) -> Subgroup {
        let mut gens = Vec::new();
        for (i, r) in self.reps.iter().enumerate() {
            for s in &self.reps[i + 1..] {
                gens.push(r.commutator(s).lattice_coords());
            }
            let f = &self.quotient_basis[i];
            for w in self.lattice.basis_vecs() {
                let flipped = conjugation_action(self.spec, f, &w);
                gens.push(flipped.iter().zip(&w).map(|(a, b)| a - b).collect());
            }
        }
        let lattice = conjugation_closure(
            self.spec,
            Lattice::span(self.spec.lattice_dim(), gens),
            &self.quotient_basis,
        );
        Subgroup::from_parts(self.spec, Vec::new(), lattice)
    }

    /// Invariant factors of `H / [H, H]`, computed from the presentation with
    /// generators (lattice basis, representatives) and relations: conjugation
    /// action, squares of representatives, commutators of representatives.
    pub fn abelianization(&self) -> SmithForm {
        let m = self.lattice.rank();
        let k = self.reps.len();
        let cols = m + k;
        let in_lattice = |w: &[BigInt]| -> Vec<BigInt> {
            let mut row = self.lattice.coordinates(w).expect("element of H ∩ T");
            row.resize(cols, BigInt::zero());
            row
        };
        let mut rows = Vec::new();
        let basis = self.lattice.basis_vecs();
        for (i, r) in self.reps.iter().enumerate() {
            let f = &self.quotient_basis[i];
            for (j, w) in basis.iter().enumerate() {
                let mut row = in_lattice(&conjugation_action(self.spec, f, w));
                row[j] -= 1;
                rows.push(row);
            }
            let mut row: Vec<BigInt> = in_lattice(&r.mul(r).lattice_coords()).into_iter().map(|x| -x).collect();
            row[m + i] += 2;
            rows.push(row);
            for s in &self.reps[i + 1..] {
                rows.push(in_lattice(&r.commutator(s).lattice_coords()));
            }
        }
        snf(&IntMatrix::from_rows(cols, rows))
    }

    /// Number of invariant factors of the abelianization, a lower bound for the rank.
    pub fn rank_lower_bound(&self) -> usize {
        let ab = self.abelianization();
        ab.torsion().len() + ab.free_rank
    }

    fn generated_by(&self, cand: &[Element]) -> bool {
        let dim = self.quotient_basis.len();
        if z2_rank(cand.iter().map(Element::quotient_image)) < dim {
            return false;
        }
        Subgroup::from_generators(self.spec, cand) == *self
    }

    pub fn rank(&self) -> RankCertificate {
        self.rank_with(RankOptions::default())
    }

    /// Rank bounds: the abelianization gives the lower bound; the upper bound
    /// is the smallest generating set found among subsets of the stored
    /// generators and their pairwise products, of size `lower` or `lower + 1`.
    pub fn rank_with(&self, opts: RankOptions) -> RankCertificate {
        let lower = self.rank_lower_bound();
        let stored = self.stored_generators();
        let fallback = |lower: usize, gens: Vec<Element>| RankCertificate {
            lower,
            upper: gens.len(),
            exact: gens.len() == lower,
            generators: gens,
        };
        if stored.len() <= lower {
            return fallback(lower, stored);
        }
        let mut pool = stored.clone();
        for (i, x) in stored.iter().enumerate() {
            for (j, y) in stored.iter().enumerate() {
                if i != j {
                    let p = x.mul(y);
                    if !p.is_identity() && !pool.contains(&p) {
                        pool.push(p);
                    }
                }
            }
        }
        let mut checks = 0;
        for size in lower..=(lower + 1).min(stored.len() - 1) {
            for combo in (0..stored.len()).combinations(size) {
                let cand: Vec<Element> = combo.iter().map(|&i| stored[i].clone()).collect();
                checks += 1;
                if self.generated_by(&cand) {
                    return fallback(lower, cand);
                }
            }
            for combo in (0..pool.len()).combinations(size) {
                if combo.iter().all(|&i| i < stored.len()) {
                    continue;
                }
                if checks >= opts.max_checks {
                    break;
                }
                let cand: Vec<Element> = combo.iter().map(|&i| pool[i].clone()).collect();
                checks += 1;
                if self.generated_by(&cand) {
                    return fallback(lower, cand);
                }
            }
        }
        fallback(lower, stored)
    }

    /// `√h ∈ H` for every `h ∈ H ∩ G'`.
    pub fn is_sqrt_closed(&self) -> bool {
        let meet = self.intersect(&Subgroup::special(self.spec, Special::GPrime));
        meet.lattice.basis_vecs().iter().all(|w| {
            let h = self.lattice_element(w);
            let root = h.sqrt_in_n().expect("element of G'");
            self.contains(&root)
        })
    }

    /// Image of `H` in `G/G' ≅ Z2^l × Z^(l+p) × Z2^q`, as an abelian group.
    pub fn abelianization_image(&self) -> SmithForm {
        // coordinates (s_i, t_i, n_j, e_j) modulo the relations 2 s_i = 0, 2 e_j = 0
        let spec = self.spec;
        let dim = spec.gen_count();
        let coords = |g: &Element| -> Vec<BigInt> {
            let mut v = Vec::with_capacity(dim);
            for (s, t) in &g.klein {
                v.push(s.clone());
                v.push(t.clone());
            }
            v.extend(g.free.iter().cloned());
            v.extend(g.tor.iter().map(|&e| BigInt::from(e as u8)));
            v
        };
        let image = Lattice::span(dim, self.stored_generators().iter().map(coords).collect());
        let mut rel_gens = Vec::new();
        for i in 0..spec.klein {
            let mut v = vec![BigInt::zero(); dim];
            v[2 * i] = BigInt::from(2);
            rel_gens.push(v);
        }
        for j in 0..spec.torsion {
            let mut v = vec![BigInt::zero(); dim];
            v[spec.lattice_dim() + j] = BigInt::from(2);
            rel_gens.push(v);
        }
        let relations = lattice_meet(&image, &Lattice::span(dim, rel_gens));
        let rows = relations
            .basis_vecs()
            .iter()
            .map(|w| image.coordinates(w).expect("sublattice"))
            .collect();
        snf(&IntMatrix::from_rows(image.rank(), rows))
    }

    /// Splitting of `H ≤ NS2 × Z2^q` as `πH × (H ∩ Z2^q)`.
    pub fn decompose_euc2(&self) -> Result<Euc2Decomposition, SubgroupError> {
        let spec = self.spec;
        if spec.klein != 1 || spec.free != 0 {
            return Err(SubgroupError::Precondition("a group of the form NS2 x Z2^q".into()));
        }
        let ns2 = GroupSpec::new(1, 0, 0);
        let project = |g: &Element| Element {
            klein: g.klein.clone(),
            free: Vec::new(),
            tor: Vec::new(),
        };
        let lift = |g: &Element, tor: Vec<bool>| Element {
            klein: g.klein.clone(),
            free: Vec::new(),
            tor,
        };
        let gens = self.stored_generators();
        let projection = Subgroup::from_generators(ns2, &gens.iter().map(project).collect::<Vec<_>>());

        // u generates πH ∩ <a>
        let a_axis = Lattice::span(2, vec![vec![BigInt::one(), BigInt::zero()]]);
        let u_lat = lattice_meet(projection.lattice(), &a_axis);
        let u = u_lat
            .basis_vecs()
            .first()
            .map(|w| Element::from_lattice_coords(ns2, &[false], w));

        // v has the least positive b-exponent in πH, built from H's generators
        let mut v_lift: Option<(BigInt, Element)> = None;
        for g in &gens {
            let t = &g.klein[0].1;
            if t.is_zero() {
                continue;
            }
            v_lift = Some(match v_lift {
                None => (t.clone(), g.clone()),
                Some((m, x)) => {
                    let eg = m.extended_gcd(t);
                    (eg.gcd, x.pow(&eg.x).mul(&g.pow(&eg.y)))
                }
            });
        }
        let v_lift = v_lift.map(|(m, x)| if m < BigInt::zero() { x.inv() } else { x });

        let q = spec.torsion;
        let u_lift = u.as_ref().map(|u| {
            (0u64..1 << q)
                .map(|mask| lift(u, (0..q).map(|j| mask >> j & 1 == 1).collect()))
                .find(|x| self.contains(x))
                .expect("every element of πH has a preimage in H")
        });

        let odd_v = v_lift.as_ref().is_some_and(|v| v.klein[0].1.is_odd());
        let projection_type = match (&u_lift, &v_lift) {
            (None, None) => ProjectionType::Trivial,
            (Some(_), None) | (None, Some(_)) => ProjectionType::Z,
            (Some(_), Some(_)) if odd_v => ProjectionType::NS2,
            (Some(_), Some(_)) => ProjectionType::Z2,
        };

        let torsion_part = self.intersect(&Subgroup::torsion_factor(spec));
        let mut splitting = Vec::new();
        let to_g = |x: &Element| lift(x, vec![false; q]);
        if let Some(x) = &u_lift {
            splitting.push((to_g(&project(x)), x.clone()));
        }
        if let Some(x) = &v_lift {
            splitting.push((to_g(&project(x)), x.clone()));
        }
        let relation_holds = match (&u_lift, &v_lift) {
            (Some(u), Some(v)) if odd_v => v.mul(u).mul(&v.inv()).mul(u).is_identity(),
            (Some(u), Some(v)) => u.commutator(v).is_identity(),
            _ => true,
        };
        let mut all: Vec<Element> = splitting.iter().map(|(_, x)| x.clone()).collect();
        all.extend(torsion_part.stored_generators());
        let verified = relation_holds && Subgroup::from_generators(spec, &all) == *self;
        Ok(Euc2Decomposition {
            projection_type,
            projection,
            splitting,
            torsion_part,
            verified,
        })
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.stored_generators().iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}
