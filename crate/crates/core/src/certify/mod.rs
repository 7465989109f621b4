//! Compression and inertia: the classification of Euclidean products,
//! one-sided compression certificates, bounded counterexample searches and a
//! seeded sampler for the inertia property.

mod suite;

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{Element, GroupSpec};
use crate::morphism::random_word;
use crate::subgroup::{RankCertificate, Subgroup, SubgroupError};

pub use suite::{paper_suite, Check, Scale, SuiteReport};

/// Shape of `NS2^l x Z^p x Z2^q` with respect to the Euclidean classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EucCase {
    /// `Z^p x Z2^q`
    Euc1,
    /// `NS2 x Z2^q`
    Euc2,
    /// `NS2 x Z^p x Z2`, `p >= 1`
    Euc3,
    /// `NS2^l x Z^p`, `l >= 1`
    Euc4,
    OtherEuclidean,
}

impl fmt::Display for EucCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EucCase::Euc1 => "euc1",
            EucCase::Euc2 => "euc2",
            EucCase::Euc3 => "euc3",
            EucCase::Euc4 => "euc4",
            EucCase::OtherEuclidean => "other-euclidean",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub case: EucCase,
    /// Every fixed subgroup of an endomorphism is compressed.
    pub compressed_all: bool,
    /// Every fixed subgroup of an endomorphism is inert.
    pub inert_all: bool,
}

pub fn classify(spec: GroupSpec) -> Classification {
    let (l, p, q) = (spec.klein, spec.free, spec.torsion);
    let case = if l == 0 {
        EucCase::Euc1
    } else if l == 1 && p == 0 {
        EucCase::Euc2
    } else if l == 1 && q == 1 {
        EucCase::Euc3
    } else if q == 0 {
        EucCase::Euc4
    } else {
        EucCase::OtherEuclidean
    };
    Classification {
        case,
        compressed_all: matches!(case, EucCase::Euc1 | EucCase::Euc2 | EucCase::Euc4),
        inert_all: matches!(case, EucCase::Euc1 | EucCase::Euc2),
    }
}

/// Evidence that `H` is compressed: `H` contains the square roots of its
/// elements in `G'`, and its image in `G/G'` has the same rank as `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionCertificate {
    pub image_rank: usize,
    pub rank: RankCertificate,
}

/// Returns a certificate when the square-root criterion applies. `None` says
/// nothing about compression. Requires `q = 0`.
pub fn check_compressed_certificate(h: &Subgroup) -> Result<Option<CompressionCertificate>, SubgroupError> {
    if h.spec().torsion != 0 {
        return Err(SubgroupError::Precondition("a group without Z2 factors".into()));
    }
    if !h.is_sqrt_closed() {
        return Ok(None);
    }
    let image = h.abelianization_image();
    let image_rank = image.torsion().len() + image.free_rank;
    let rank = h.rank();
    Ok((rank.exact && rank.upper == image_rank).then_some(CompressionCertificate { image_rank, rank }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Compression,
    Inertia,
}

/// A pair of subgroups violating compression (`H ≤ K`, `rk K < rk H`) or
/// inertia (`rk(H ∩ K) > rk K`).
#[derive(Clone, Debug)]
pub struct Witness {
    pub kind: WitnessKind,
    pub h: Subgroup,
    pub k: Subgroup,
    pub meet: Option<Subgroup>,
    pub rank_h: RankCertificate,
    pub rank_k: RankCertificate,
    pub rank_meet: Option<RankCertificate>,
}

impl Witness {
    /// Recomputes every containment, intersection and rank from scratch.
    pub fn revalidate(&self) -> bool {
        let rk = self.k.rank();
        match self.kind {
            WitnessKind::Compression => {
                let rh = self.h.rank();
                self.k.contains_subgroup(&self.h) && rh.exact && rk.exact && rk.upper < rh.upper
            }
            WitnessKind::Inertia => {
                let meet = self.h.intersect(&self.k);
                let rm = meet.rank();
                Some(&meet) == self.meet.as_ref() && rm.exact && rk.exact && rm.upper > rk.upper
            }
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WitnessKind::Compression => write!(
                f,
                "compression witness: H = {} (rank {}) <= K = {} (rank {})",
                self.h, self.rank_h, self.k, self.rank_k
            ),
            WitnessKind::Inertia => write!(
                f,
                "inertia witness: K = {} (rank {}), H ∩ K = {} (rank {})",
                self.k,
                self.rank_k,
                self.meet.as_ref().expect("inertia witness has a meet"),
                self.rank_meet.as_ref().expect("inertia witness has a meet rank"),
            ),
        }
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    /// Distinct candidate subgroups examined.
    pub examined: usize,
    /// Candidates dropped because a rank certificate was inexact.
    pub skipped_inexact: usize,
}

/// Distinct nontrivial elements given by words of length `1..=max_len`, in
/// shortlex order over the letters `a1, a1^-1, b1, b1^-1, ...`.
pub fn candidate_words(spec: GroupSpec, max_len: usize) -> Vec<Element> {
    let letters: Vec<Element> = spec
        .generators()
        .into_iter()
        .flat_map(|g| {
            let x = spec.gen(g);
            let y = x.inv();
            [x, y]
        })
        .collect();
    let mut seen: HashSet<Element> = HashSet::from([spec.identity()]);
    let mut out = Vec::new();
    // elements at word distance exactly `len`, in order of first appearance
    let mut layer = vec![spec.identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for x in &letters {
                let y = w.mul(x);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn extend(parent: &Subgroup, w: &Element) -> Subgroup {
    let mut gens = parent.stored_generators();
    gens.push(w.clone());
    Subgroup::from_generators(parent.spec(), &gens)
}

/// Looks for `K = <H, w1, ..., wk>` with `k <= max_extra_gens` words of length
/// `<= max_word_len` and `rk K < rk H`. Candidates are visited breadth first:
/// level by level, parents in discovery order, words in shortlex order.
pub fn search_compression_counterexample(
    h: &Subgroup,
    max_word_len: usize,
    max_extra_gens: usize,
) -> Result<SearchOutcome, SubgroupError> {
    let rank_h = h.rank();
    if !rank_h.exact {
        return Err(SubgroupError::Precondition("an exact rank for H".into()));
    }
    let target = rank_h.upper;
    let mut outcome = SearchOutcome {
        witness: None,
        examined: 0,
        skipped_inexact: 0,
    };
    // a group of rank <= 1 is cyclic and so are all its subgroups
    if target <= 2 {
        return Ok(outcome);
    }
    let words = candidate_words(h.spec(), max_word_len);
    let mut seen: HashSet<Subgroup> = HashSet::from([h.clone()]);
    let mut frontier = vec![h.clone()];
    for _ in 0..max_extra_gens {
        let mut next = Vec::new();
        for parent in &frontier {
            for w in &words {
                if parent.contains(w) {
                    continue;
                }
                let k = extend(parent, w);
                if !seen.insert(k.clone()) {
                    continue;
                }
                outcome.examined += 1;
                if k.rank_lower_bound() < target {
                    let rank_k = k.rank();
                    if !rank_k.exact {
                        outcome.skipped_inexact += 1;
                    } else if rank_k.upper < target {
                        outcome.witness = Some(Witness {
                            kind: WitnessKind::Compression,
                            h: h.clone(),
                            k,
                            meet: None,
                            rank_h,
                            rank_k,
                            rank_meet: None,
                        });
                        return Ok(outcome);
                    }
                }
                next.push(k);
            }
        }
        frontier = next;
    }
    Ok(outcome)
}

/// Looks for `K = <w1, ..., wk>` with `k <= max_gens` words of length
/// `<= max_word_len` and `rk(H ∩ K) > rk K`, in the same breadth-first order.
pub fn search_inertia_counterexample(h: &Subgroup, max_word_len: usize, max_gens: usize) -> SearchOutcome {
    let spec = h.spec();
    let mut outcome = SearchOutcome {
        witness: None,
        examined: 0,
        skipped_inexact: 0,
    };
    let words = candidate_words(spec, max_word_len);
    let trivial = Subgroup::trivial(spec);
    let mut seen: HashSet<Subgroup> = HashSet::from([trivial.clone()]);
    let mut frontier = vec![trivial];
    for level in 1..=max_gens {
        let mut next = Vec::new();
        for parent in &frontier {
            for w in &words {
                if parent.contains(w) {
                    continue;
                }
                let k = extend(parent, w);
                if !seen.insert(k.clone()) {
                    continue;
                }
                outcome.examined += 1;
                // rk K <= level, and subgroups of cyclic groups are cyclic
                if level >= 2 {
                    let meet = h.intersect(&k);
                    if meet.stored_generators().len() > k.rank_lower_bound() {
                        let rank_k = k.rank();
                        let rank_meet = meet.rank();
                        if !(rank_k.exact && rank_meet.exact) {
                            outcome.skipped_inexact += 1;
                        } else if rank_meet.upper > rank_k.upper {
                            outcome.witness = Some(Witness {
                                kind: WitnessKind::Inertia,
                                h: h.clone(),
                                rank_h: h.rank(),
                                k,
                                meet: Some(meet),
                                rank_k,
                                rank_meet: Some(rank_meet),
                            });
                            return outcome;
                        }
                    }
                }
                next.push(k);
            }
        }
        frontier = next;
    }
    outcome
}

/// Random subgroup generated by `1..=gen_bound` random words of length `<= word_len`.
pub fn random_subgroup<R: Rng>(spec: GroupSpec, gen_bound: usize, word_len: usize, rng: &mut R) -> Subgroup {
    let n = rng.gen_range(1..=gen_bound.max(1));
    let gens: Vec<Element> = (0..n).map(|_| random_word(spec, word_len, rng)).collect();
    Subgroup::from_generators(spec, &gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaReport {
    pub spec: GroupSpec,
    pub trials: usize,
    /// Pairs where both `rk K` and `rk(H ∩ K)` are exact.
    pub exact_pairs: usize,
    pub violations: usize,
    /// First violating pair as `(H, K)`.
    pub first_violation: Option<(String, String)>,
}

impl InertiaReport {
    pub fn exact_fraction(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.exact_pairs as f64 / self.trials as f64
        }
    }
}

impl fmt::Display for InertiaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {}", self.spec)?;
        writeln!(f, "trials {}", self.trials)?;
        writeln!(f, "exact {}", self.exact_pairs)?;
        writeln!(f, "violations {}", self.violations)?;
        if let Some((h, k)) = &self.first_violation {
            writeln!(f, "violation H={} K={}", h, k)?;
        }
        Ok(())
    }
}

/// Samples `trials` random pairs `(H, K)` and checks `rk(H ∩ K) <= rk K`
/// whenever both ranks are exact. An optional extra pair is checked first.
pub fn sample_inertia_property(
    spec: GroupSpec,
    trials: usize,
    gen_bound: usize,
    word_len: usize,
    seed: u64,
    injected: Option<(Subgroup, Subgroup)>,
) -> InertiaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InertiaReport {
        spec,
        trials: 0,
        exact_pairs: 0,
        violations: 0,
        first_violation: None,
    };
    let check = |h: Subgroup, k: Subgroup, report: &mut InertiaReport| {
        report.trials += 1;
        let meet = h.intersect(&k);
        let rank_k = k.rank();
        let rank_meet = meet.rank();
        if rank_k.exact && rank_meet.exact {
            report.exact_pairs += 1;
            if rank_meet.upper > rank_k.upper {
                report.violations += 1;
                if report.first_violation.is_none() {
                    report.first_violation = Some((h.to_string(), k.to_string()));
                }
            }
        }
    };
    if let Some((h, k)) = injected {
        check(h, k, &mut report);
    }
    for _ in 0..trials {
        let h = random_subgroup(spec, gen_bound, word_len, &mut rng);
        let k = random_subgroup(spec, gen_bound, word_len, &mut rng);
        check(h, k, &mut report);
    }
    report
}
