//! Candidate images of `rho_12` and the relation tests that decide them.
//!
//! For a restriction class `alpha` of `D_n'` and an even `tau` centralizing
//! `alpha(S)`, every transvection image is forced: `rho_ij` is a conjugate of
//! `tau` by the image of a fixed element of `A_n`, and `lambda_ij` is a conjugate
//! of `rho_ij` by the image of `eps_i eps_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{centralizer_in_alternating, PermGroup};
use crate::hom::HomClass;
use crate::perm::Permutation;
use crate::relations::{audit_relations, RelationAudit, TransvectionTable};
use crate::sources::SourceGroups;

pub type TransvectionImages = TransvectionTable<Permutation>;

/// Default bound on centralizer elements examined per restriction class.
pub const DEFAULT_TAU_BUDGET: u64 = 1_000_000_000;

/// What every candidate must pass before the full audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerTest {
    /// The single instance `[rho_12^-1, rho_23^-1] = rho_13^-1`.
    #[default]
    R2,
    /// Every relation instance, stopping at the first failure.
    Full,
}

/// Everything about one restriction class that the inner loop needs.
#[derive(Debug, Clone)]
pub struct PreparedAlpha {
    pub n: usize,
    pub m: usize,
    pub stabilizer_images: Vec<Permutation>,
    /// `(i, j, alpha(sigma))` with `rho_12^sigma = rho_ij`.
    pub conjugators: Vec<(usize, usize, Permutation)>,
    /// `(i, j, alpha(eps_i eps_j))`.
    pub epsilons: Vec<(usize, usize, Permutation)>,
    pub centralizer: PermGroup,
}

impl PreparedAlpha {
    pub fn new(sources: &SourceGroups, alpha: &HomClass) -> Result<Self> {
        let n = sources.n;
        let m = alpha.degree;
        let g = &sources.d_prime;
        let images = g
            .extend_hom(m, &alpha.generator_images)?
            .ok_or_else(|| Error::input("restriction class is not a homomorphism of D_n'"))?;
        let at = |e: u32| images[e as usize].clone();
        let stabilizer_images: Vec<Permutation> = sources.stabilizer_generators.iter().map(|&e| at(e)).collect();
        let conjugators = sources.pair_conjugators.iter().map(|&(i, j, e)| (i, j, at(e))).collect();
        let epsilons = sources.epsilon_pairs.iter().map(|&(i, j, e)| (i, j, at(e))).collect();
        let centralizer = centralizer_in_alternating(m, &stabilizer_images)?.build_chain();
        Ok(PreparedAlpha { n, m, stabilizer_images, conjugators, epsilons, centralizer })
    }

    pub fn candidate_count(&self) -> u128 {
        self.centralizer.order()
    }

    fn conjugator(&self, i: usize, j: usize) -> Option<&Permutation> {
        self.conjugators.iter().find(|c| c.0 == i && c.1 == j).map(|c| &c.2)
    }

    fn centralizes(&self, tau: &Permutation) -> bool {
        self.stabilizer_images.iter().all(|s| (tau * s) == (s * tau))
    }
}

/// All transvection images forced by `alpha` and `tau`.
///
/// For `n = 3` the pairs outside the `A_3`-orbit of `(1, 2)` are filled in from
/// `rho_ik = [rho_ij^-1, rho_jk^-1]^-1`.
pub fn transvection_images(prep: &PreparedAlpha, tau: &Permutation) -> Result<TransvectionImages> {
    if tau.degree() != prep.m {
        return Err(Error::input(format!("candidate of degree {} for degree {}", tau.degree(), prep.m)));
    }
    if !tau.is_even() {
        return Err(Error::input("candidate image of rho_12 is odd"));
    }
    if !prep.centralizes(tau) {
        return Err(Error::input("candidate image of rho_12 does not centralize the stabilizer image"));
    }
    let n = prep.n;
    let mut t = TransvectionImages::empty(n);
    for (i, j, c) in &prep.conjugators {
        t.set_rho(*i, *j, tau.conjugate(c)?);
    }
    if n == 3 {
        for (i, j, k) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            let a = t.rho(i, j).inverse();
            let b = t.rho(j, k).inverse();
            let rho_ik = a.commutator(&b)?.inverse();
            t.set_rho(i, k, rho_ik);
        }
    }
    for (i, j, e) in &prep.epsilons {
        let lambda = t.rho(*i, *j).conjugate(e)?;
        t.set_lambda(*i, *j, lambda);
    }
    Ok(t)
}

/// `[rho_12^-1, rho_23^-1] == rho_13^-1`.
pub fn check_r2(t: &TransvectionImages) -> bool {
    let lhs = t.rho(1, 2).inverse().commutator_with(&t.rho(2, 3).inverse());
    lhs == t.rho(1, 3).inverse()
}

/// The inner test on the three images it needs, without building the full table.
fn quick_r2(prep: &PreparedAlpha, tau: &Permutation) -> bool {
    match (prep.conjugator(2, 3), prep.conjugator(1, 3)) {
        (Some(c23), Some(c13)) => {
            let rho23 = tau.conjugate_by(c23);
            let rho13 = tau.conjugate_by(c13);
            tau.inverse().commutator_with(&rho23.inverse()) == rho13.inverse()
        }
        // n = 3: rho_13 is synthesized from this very relation.
        _ => true,
    }
}

/// Every instance of every relation family.
pub fn verify_certificate(t: &TransvectionImages) -> Result<RelationAudit> {
    audit_relations(t, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Trivial,
    Nontrivial,
}

pub fn classify(t: &TransvectionImages) -> Classification {
    let all_identity = t.pairs().all(|(i, j)| t.rho(i, j).is_identity() && t.lambda(i, j).is_identity());
    if all_identity {
        Classification::Trivial
    } else {
        Classification::Nontrivial
    }
}

/// Outcome of testing the candidates `start..end` of one restriction class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardResult {
    pub alpha: usize,
    pub start: u64,
    pub end: u64,
    pub tested: u64,
    pub passed_inner: u64,
    /// Nontrivial candidates that passed the inner test but failed the full audit.
    pub audit_rejected: u64,
    /// Index of the first candidate whose images pass the full audit and are nontrivial.
    pub found: Option<u64>,
}

/// Tests candidates `start..end` in chain order, stopping at the first verified nontrivial one.
pub fn run_shard(prep: &PreparedAlpha, alpha: usize, start: u64, end: u64, inner: InnerTest) -> Result<ShardResult> {
    let mut r = ShardResult { alpha, start, end, ..Default::default() };
    for (offset, tau) in prep.centralizer.elements_range(start as u128, end as u128).enumerate() {
        r.tested += 1;
        if !prep.centralizes(&tau) {
            return Err(Error::input(format!("centralizer element {} fails to commute with the stabilizer image", start + offset as u64)));
        }
        let pass = match inner {
            InnerTest::R2 => quick_r2(prep, &tau),
            InnerTest::Full => audit_relations(&transvection_images(prep, &tau)?, true)?.passed(),
        };
        if !pass {
            continue;
        }
        r.passed_inner += 1;
        if tau.is_identity() {
            continue;
        }
        let t = transvection_images(prep, &tau)?;
        if audit_relations(&t, true)?.passed() {
            r.found = Some(start + offset as u64);
            return Ok(r);
        }
        r.audit_rejected += 1;
    }
    Ok(r)
}

/// One `(i, j, image)` entry of a transvection table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairImage {
    pub i: usize,
    pub j: usize,
    pub image: Permutation,
}

/// Transvection images in file form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub n: usize,
    pub degree: usize,
    pub rho: Vec<PairImage>,
    pub lambda: Vec<PairImage>,
}

impl ImageRecord {
    pub fn from_table(t: &TransvectionImages) -> Result<Self> {
        let n = t.rank();
        if !t.is_complete() {
            return Err(Error::input("transvection table is incomplete"));
        }
        let degree = t.rho(1, 2).degree();
        let rho = t.pairs().map(|(i, j)| PairImage { i, j, image: t.rho(i, j).clone() }).collect();
        let lambda = t.pairs().map(|(i, j)| PairImage { i, j, image: t.lambda(i, j).clone() }).collect();
        Ok(ImageRecord { n, degree, rho, lambda })
    }

    pub fn to_table(&self) -> Result<TransvectionImages> {
        let n = self.n;
        if n < 3 {
            return Err(Error::input("rank below 3"));
        }
        let mut t = TransvectionImages::empty(n);
        let valid = |p: &PairImage| p.i >= 1 && p.j >= 1 && p.i <= n && p.j <= n && p.i != p.j;
        for (list, is_rho) in [(&self.rho, true), (&self.lambda, false)] {
            for p in list {
                if !valid(p) {
                    return Err(Error::input(format!("pair ({}, {}) out of range", p.i, p.j)));
                }
                if p.image.degree() != self.degree {
                    return Err(Error::input(format!("image of degree {} in a degree {} record", p.image.degree(), self.degree)));
                }
                if is_rho {
                    t.set_rho(p.i, p.j, p.image.clone());
                } else {
                    t.set_lambda(p.i, p.j, p.image.clone());
                }
            }
        }
        if !t.is_complete() {
            return Err(Error::input("record does not cover every ordered pair"));
        }
        Ok(t)
    }
}

/// Counts behind an exhaustion claim.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionCounts {
    pub alpha_classes: usize,
    pub beta_classes: usize,
    pub after_injectivity: usize,
    pub after_compatibility: usize,
    pub candidates_tested: u64,
    pub passed_inner: u64,
    pub audit_rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Nontrivial {
        n: usize,
        m: usize,
        origin: Origin,
        images: ImageRecord,
        audit: RelationAudit,
    },
    Exhausted {
        n: usize,
        m: usize,
        counts: ExhaustionCounts,
        filter_justifications: Vec<String>,
    },
}

/// Where the images of a nontrivial certificate came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum Origin {
    Search { alpha_index: usize, tau_index: u64, alpha: HomClass },
    Control { description: String },
}

impl Certificate {
    /// Audits `t` and wraps it as a nontrivial certificate.
    pub fn from_images(t: &TransvectionImages, origin: Origin) -> Result<Certificate> {
        let audit = verify_certificate(t)?;
        if !audit.passed() || classify(t) != Classification::Nontrivial {
            return Err(Error::input("images do not verify as a nontrivial action"));
        }
        let images = ImageRecord::from_table(t)?;
        Ok(Certificate::Nontrivial { n: images.n, m: images.degree, origin, images, audit })
    }

    pub fn degree(&self) -> usize {
        match self {
            Certificate::Nontrivial { m, .. } | Certificate::Exhausted { m, .. } => *m,
        }
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Certificate::Nontrivial { .. })
    }
}

/// Builds the certificate for a verified candidate.
pub fn nontrivial_certificate(
    prep: &PreparedAlpha,
    alpha_index: usize,
    alpha: &HomClass,
    tau_index: u64,
) -> Result<Certificate> {
    let tau = prep.centralizer.element_at(tau_index as u128)?;
    let t = transvection_images(prep, &tau)?;
    Certificate::from_images(&t, Origin::Search { alpha_index, tau_index, alpha: alpha.clone() })
        .map_err(|_| Error::input(format!("candidate {tau_index} of class {alpha_index} does not verify")))
}

/// Outcome of checking a certificate from its contents alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub passed: bool,
    pub classification: Option<Classification>,
    pub audit: Option<RelationAudit>,
    pub problems: Vec<String>,
}

/// Re-audits a nontrivial certificate; exhaustion records are checked for internal consistency only.
pub fn check_certificate(cert: &Certificate) -> Result<CertificateCheck> {
    match cert {
        Certificate::Nontrivial { n, m, images, .. } => {
            let mut problems = Vec::new();
            if images.n != *n || images.degree != *m {
                problems.push(format!("record is rank {} degree {}, header says {n}, {m}", images.n, images.degree));
            }
            let t = images.to_table()?;
            for (i, j) in t.pairs() {
                if !t.rho(i, j).is_even() || !t.lambda(i, j).is_even() {
                    problems.push(format!("image for pair ({i},{j}) is odd"));
                }
            }
            let audit = verify_certificate(&t)?;
            problems.extend(audit.failures.iter().map(|f| format!("{}: {}", f.family, f.witness)));
            Ok(CertificateCheck {
                passed: problems.is_empty(),
                classification: Some(classify(&t)),
                audit: Some(audit),
                problems,
            })
        }
        Certificate::Exhausted { counts, .. } => {
            let mut problems = Vec::new();
            if counts.alpha_classes == 0 {
                problems.push("no restriction classes enumerated".to_string());
            }
            if counts.after_compatibility > counts.after_injectivity || counts.after_injectivity > counts.alpha_classes {
                problems.push("filter counts grow".to_string());
            }
            if counts.passed_inner > counts.candidates_tested || counts.audit_rejected > counts.passed_inner {
                problems.push("candidate counts inconsistent".to_string());
            }
            Ok(CertificateCheck { passed: problems.is_empty(), classification: None, audit: None, problems })
        }
    }
}

/// Options for a single-threaded sweep of one degree.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub tau_budget: u64,
    pub inner: InnerTest,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { tau_budget: DEFAULT_TAU_BUDGET, inner: InnerTest::R2 }
    }
}

/// Tests every candidate for every class in `alphas`, in order.
///
/// `counts` should already carry the enumeration and filter numbers; the
/// candidate numbers are filled in here.
pub fn search_degree(
    sources: &SourceGroups,
    m: usize,
    alphas: &[HomClass],
    mut counts: ExhaustionCounts,
    filter_justifications: Vec<String>,
    options: SearchOptions,
) -> Result<Certificate> {
    let prepared = alphas.iter().map(|a| PreparedAlpha::new(sources, a)).collect::<Result<Vec<_>>>()?;
    for (k, p) in prepared.iter().enumerate() {
        if p.candidate_count() > options.tau_budget as u128 {
            return Err(Error::capacity(format!(
                "class {k} at degree {m}: centralizer of order {} exceeds the candidate budget {}",
                p.candidate_count(),
                options.tau_budget
            )));
        }
    }
    for (k, p) in prepared.iter().enumerate() {
        let r = run_shard(p, k, 0, p.candidate_count() as u64, options.inner)?;
        counts.candidates_tested += r.tested;
        counts.passed_inner += r.passed_inner;
        counts.audit_rejected += r.audit_rejected;
        if let Some(tau_index) = r.found {
            return nontrivial_certificate(p, k, &alphas[k], tau_index);
        }
    }
    Ok(Certificate::Exhausted { n: sources.n, m, counts, filter_justifications })
}
