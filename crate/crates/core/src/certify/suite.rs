//! Reproduction suite for the worked examples, with optional randomized batches.

use std::fmt;

use itertools::Itertools;

use super::{
    check_compressed_certificate, classify, sample_inertia_property, search_compression_counterexample,
    search_inertia_counterexample, EucCase,
};
use crate::group::GroupSpec;
use crate::morphism::{endo_from_words, Endomorphism};
use crate::subgroup::{Index, Special, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Worked examples only.
    Quick,
    /// Worked examples plus the seeded randomized batches.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    fn record(&mut self, id: &str, expected: impl ToString, actual: impl ToString) {
        let expected = expected.to_string();
        let actual = actual.to_string();
        self.checks.push(Check {
            id: id.to_string(),
            pass: expected == actual,
            expected,
            actual,
        });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "CHECK {} {} expected={} actual={}",
                c.id,
                if c.pass { "PASS" } else { "FAIL" },
                c.expected,
                c.actual
            )?;
        }
        writeln!(f, "TOTAL {}/{}", self.passed(), self.checks.len())
    }
}

fn sub(spec: GroupSpec, text: &str) -> Subgroup {
    Subgroup::parse(spec, text).expect("well-formed subgroup literal")
}

fn endo(spec: GroupSpec, words: &[&str]) -> Result<Endomorphism, String> {
    endo_from_words(spec, words).map_err(|e| e.to_string())
}

fn rank_str(h: &Subgroup) -> String {
    h.rank().to_string()
}

fn abelianization_str(h: &Subgroup) -> String {
    let ab = h.abelianization();
    let torsion = ab.torsion().iter().map(|d| format!("Z{}", d)).join("x");
    match (ab.free_rank, torsion.is_empty()) {
        (0, true) => "1".to_string(),
        (0, false) => torsion,
        (r, true) => format!("Z^{}", r),
        (r, false) => format!("Z^{}x{}", r, torsion),
    }
}

pub fn paper_suite(scale: Scale) -> SuiteReport {
    let mut r = SuiteReport::default();
    normal_form_checks(&mut r);
    twist_checks(&mut r);
    reflection_pair_checks(&mut r);
    shear_checks(&mut r);
    classification_checks(&mut r);
    if scale == Scale::Full {
        randomized_checks(&mut r);
    }
    r
}

fn normal_form_checks(r: &mut SuiteReport) {
    let g = GroupSpec::new(1, 1, 0);
    let ba = g.parse_word("b1 a1").map(|x| x.to_string()).unwrap_or_default();
    r.record("normal-form.ba", "a1^-1 b1", ba);
    let x = g.parse_word("a1^5 b1").unwrap();
    r.record("normal-form.root-nonunique", "b1^2", x.pow_i64(2));
}

fn twist_checks(r: &mut SuiteReport) {
    let g = GroupSpec::new(1, 2, 1);
    let phi = match endo(g, &["a1 d1", "b1 a1", "c1 d1", "c2^-1", "d1"]) {
        Ok(f) => f,
        Err(e) => return r.record("twist-automorphism.valid", "valid", e),
    };
    r.record("twist-automorphism.valid", "valid", "valid");
    r.record("twist-automorphism.automorphism", true, phi.is_automorphism());
    let inverse = match endo(g, &["a1 d1", "b1 a1^-1 d1", "c1 d1", "c2^-1", "d1"]) {
        Ok(psi) => phi.compose(&psi).is_identity() && psi.compose(&phi).is_identity(),
        Err(_) => false,
    };
    r.record("twist-automorphism.explicit-inverse", true, inverse);
    let fix = phi.fixed_subgroup().subgroup;
    let expected = sub(g, "a1^2; b1^2; a1 c1; d1");
    r.record("twist-automorphism.fix", &expected, &fix);
    r.record("twist-automorphism.rank", "4 (exact)", rank_str(&fix));
    r.record("twist-automorphism.abelianization", "Z^3xZ2", abelianization_str(&fix));
    let k = sub(g, "a1 c1; b1; d1");
    r.record("twist-automorphism.fix-in-k", true, k.contains_subgroup(&fix));
    match search_compression_counterexample(&fix, 3, 3) {
        Ok(out) => {
            let found = out.witness.map(|w| format!("{} rank {}", w.k, w.rank_k));
            r.record(
                "twist-automorphism.compression-witness",
                format!("{} rank 3 (exact)", k),
                found.unwrap_or_else(|| "none".into()),
            );
        }
        Err(e) => r.record("twist-automorphism.compression-witness", "witness", e),
    }
}

fn reflection_pair_checks(r: &mut SuiteReport) {
    let g = GroupSpec::new(1, 1, 0);
    let big_r = sub(g, "a1 c1; b1");
    r.record(
        "reflection-pair.conjugate",
        true,
        big_r.contains(&g.parse_word("a1^-1 c1").unwrap()),
    );
    r.record(
        "reflection-pair.a-squared",
        true,
        big_r.contains(&g.parse_word("a1^2").unwrap()),
    );
    r.record(
        "reflection-pair.c-squared",
        true,
        big_r.contains(&g.parse_word("c1^2").unwrap()),
    );
    let h = sub(g, "a1^2; b1^2; c1^2");
    r.record("reflection-pair.rank-h", "3 (exact)", rank_str(&h));
    r.record("reflection-pair.rank-r", "2 (exact)", rank_str(&big_r));
    let cert = check_compressed_certificate(&h).map(|c| c.is_some());
    r.record(
        "reflection-pair.no-certificate",
        "false",
        format!("{}", cert.unwrap_or(true)),
    );
    let found = search_compression_counterexample(&h, 3, 3)
        .ok()
        .and_then(|o| o.witness)
        .map(|w| format!("{} rank {}", w.k, w.rank_k));
    r.record(
        "reflection-pair.compression-witness",
        format!("{} rank 2 (exact)", big_r),
        found.unwrap_or_else(|| "none".into()),
    );
    // the projection of R onto NS2 does not split
    let proj_has_a = big_r.contains(&g.parse_word("a1").unwrap());
    r.record("reflection-pair.no-torsion-free-lift", false, proj_has_a);
}

fn shear_checks(r: &mut SuiteReport) {
    let g = GroupSpec::new(1, 1, 0);
    match endo(g, &["a1", "b1 a1", "c1"]) {
        Ok(shear) => {
            r.record("shear.automorphism", true, shear.is_automorphism());
            let fix = shear.fixed_subgroup().subgroup;
            r.record("shear.fix", sub(g, "a1; b1^2; c1"), &fix);
            r.record("shear.rank", "3 (exact)", rank_str(&fix));
            let k = sub(g, "a1 c1; b1");
            let meet = fix.intersect(&k);
            let small = sub(g, "a1 c1; a1^2; b1^2");
            r.record("shear.meet", &small, &meet);
            r.record("shear.meet-rank", "3 (exact)", rank_str(&meet));
            r.record("shear.k-rank", "2 (exact)", rank_str(&k));
            let idx = small
                .index_in(&fix)
                .map(|i| i.to_string())
                .unwrap_or_else(|e| e.to_string());
            r.record("shear.index", Index::Finite(2.into()), idx);
            r.record("shear.sqrt-closed", true, fix.is_sqrt_closed());
            let cert = check_compressed_certificate(&fix).map(|c| c.is_some()).unwrap_or(false);
            r.record("shear.certificate", true, cert);
        }
        Err(e) => r.record("shear.valid", "valid", e),
    }

    let g2 = GroupSpec::new(2, 0, 0);
    match endo(g2, &["a1", "b1 a1", "a2", "b2^-1"]) {
        Ok(double_shear) => {
            r.record("double-shear.automorphism", true, double_shear.is_automorphism());
            let fix = double_shear.fixed_subgroup().subgroup;
            r.record("double-shear.fix", sub(g2, "a1; b1^2; a2"), &fix);
            r.record("double-shear.rank", "3 (exact)", rank_str(&fix));
            r.record("double-shear.sqrt-closed", true, fix.is_sqrt_closed());
            let w = search_inertia_counterexample(&fix, 3, 2).witness;
            let ok = w.as_ref().is_some_and(|w| w.revalidate());
            r.record("double-shear.inertia-witness", true, ok);
            let k = sub(g2, "a1 a2; b1");
            let meet = fix.intersect(&k);
            r.record(
                "double-shear.listed-k",
                "3 (exact) > 2 (exact)",
                format!("{} > {}", rank_str(&meet), rank_str(&k)),
            );
        }
        Err(e) => r.record("double-shear.valid", "valid", e),
    }

    let ns2 = GroupSpec::new(1, 0, 0);
    r.record(
        "klein-commutator",
        sub(ns2, "a1^2"),
        Subgroup::special(ns2, Special::Full).commutator_subgroup(),
    );
}

fn classification_checks(r: &mut SuiteReport) {
    let mut mismatches = Vec::new();
    for (l, p, q) in (0..=3)
        .cartesian_product(0..=3)
        .cartesian_product(0..=3)
        .map(|((a, b), c)| (a, b, c))
    {
        let c = classify(GroupSpec::new(l, p, q));
        let compressed = l == 0 || (l == 1 && p == 0) || q == 0;
        let inert = l == 0 || (l == 1 && p == 0);
        if c.compressed_all != compressed || c.inert_all != inert {
            mismatches.push(format!("({},{},{})", l, p, q));
        }
    }
    r.record(
        "classify.table",
        "0 mismatches",
        format!("{} mismatches", mismatches.len()),
    );
    r.record("classify.euc3", EucCase::Euc3, classify(GroupSpec::new(1, 1, 1)).case);
}

fn randomized_checks(r: &mut SuiteReport) {
    for q in 0..=3 {
        let spec = GroupSpec::new(1, 0, q);
        let rep = sample_inertia_property(spec, 100, 3, 4, 1000 + q as u64, None);
        r.record(
            &format!("inertia-sample.q{}", q),
            "0 violations",
            format!("{} violations", rep.violations),
        );
    }
    let g = GroupSpec::new(1, 1, 0);
    let pair = (sub(g, "a1; b1^2; c1"), sub(g, "a1 c1; b1"));
    let rep = sample_inertia_property(g, 0, 3, 3, 7, Some(pair));
    r.record(
        "inertia-sample.injected",
        "1 violations",
        format!("{} violations", rep.violations),
    );

    for spec in [
        GroupSpec::new(1, 0, 0),
        GroupSpec::new(1, 1, 0),
        GroupSpec::new(2, 0, 0),
    ] {
        let mut failures = 0;
        for seed in 0..20 {
            let Ok(Some(f)) = Endomorphism::random(spec, 3, seed) else {
                continue;
            };
            let fix = f.fixed_subgroup().subgroup;
            let certified = matches!(check_compressed_certificate(&fix), Ok(Some(_)));
            if !fix.is_sqrt_closed() || !certified {
                failures += 1;
            }
        }
        r.record(
            &format!("fixed-certificate.{}", spec).replace(' ', ""),
            "0 failures",
            format!("{} failures", failures),
        );
    }
}
