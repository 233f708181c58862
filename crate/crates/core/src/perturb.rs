//! Perturbation certificates.
//!
//! All four theorems share one shape. A reference operator `T` with reduced
//! minimum modulus `γ > 0` is perturbed by `A`, where
//! `‖Au‖ ≤ a‖u‖ + b‖Tu‖` and `a < (1 − b)γ`. Then `T + A` keeps closed range,
//! `dim N_{T+A} ≤ dim N_T`, `codim R_{T+A} ≤ codim R_T` and the index.
//!
//! * `kato`: `T`, `A` are matrices, `b = 0`, `a = ‖A‖` unless given.
//! * `pw_type`: `T = S_f`, `A = S_g − S_f`, `(b, a) = (λ, μ)`.
//! * `bari_gamma`: `q = Σ‖f_n − g_n‖² < γ²` gives `a = √q`, `b = 0`.
//! * `bari_prb`: `q < ∞` makes `A` Hilbert–Schmidt, so a pseudo-Riesz basis stays one.

use std::fmt;

use itertools::Itertools;
use nalgebra::DVector;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::classify::{
    analyze, analyze_sequence, default_schedule, scan, ClassFlag, Count, Provenance, Taxonomy,
};
use crate::duals::DEFAULT_SECTION_VECTORS;
use crate::error::{invalid, Result};
use crate::numkernel::{svd, Field, Matrix, Scalar, TolerancePolicy};
use crate::sampling::{low_rank_matrix, normal_matrix, seed_from_env, seeded_rng, SeededRng};
use crate::seqmodel::{EventualForm, Truncation, VectorSequence};

/// Random coefficient vectors used to test a supplied relative bound.
pub const BOUND_SAMPLES: usize = 1000;

/// Slack allowed when testing a supplied relative bound.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Kato,
    PwType,
    BariPrb,
    BariGamma,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Kato => "kato",
            Theorem::PwType => "pw_type",
            Theorem::BariPrb => "bari_prb",
            Theorem::BariGamma => "bari_gamma",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BariVariant {
    Prb,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Kato {
        a: f64,
        b: f64,
    },
    PwType {
        lambda: f64,
        mu: f64,
        estimated: bool,
    },
    /// `q = None` when the sum diverges; `a = √q`.
    Quadratic {
        q: Option<f64>,
        a: Option<f64>,
    },
}

/// How the relative bound `‖Au‖ ≤ a‖u‖ + b‖Tu‖` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCheck {
    /// Holds by construction (`a = ‖A‖`, `b = 0`).
    ByConstruction,
    /// Verified exactly via the operator norm (`b = 0`).
    Exact,
    /// No violation on random coefficient vectors.
    Sampled,
    Violated,
    /// The perturbation is unbounded.
    Unbounded,
    NotApplicable,
}

impl BoundCheck {
    fn holds(self) -> bool {
        matches!(
            self,
            BoundCheck::ByConstruction
                | BoundCheck::Exact
                | BoundCheck::Sampled
                | BoundCheck::NotApplicable
        )
    }
}

/// A property guaranteed by a theorem whose hypotheses are met.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "conclusion", content = "class", rename_all = "kebab-case")]
pub enum Conclusion {
    KernelNotLarger,
    CorangeNotLarger,
    IndexPreserved,
    ClassPreserved(ClassFlag),
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::KernelNotLarger => f.write_str("dim N_{T+A} ≤ dim N_T"),
            Conclusion::CorangeNotLarger => f.write_str("codim R_{T+A} ≤ codim R_T"),
            Conclusion::IndexPreserved => f.write_str("ind (T+A) = ind T"),
            Conclusion::ClassPreserved(flag) => write!(f, "class preserved: {flag}"),
        }
    }
}

/// Measured invariants of one side of the pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Invariants {
    pub kernel: Count,
    pub corange: Count,
    /// `None` when kernel or corange is unbounded.
    pub index: Option<i64>,
    pub taxonomy: Taxonomy,
}

impl Invariants {
    fn new(kernel: Count, corange: Count, taxonomy: Taxonomy) -> Self {
        let index = match (kernel, corange) {
            (Count::Finite(k), Count::Finite(c)) => Some(k as i64 - c as i64),
            _ => None,
        };
        Invariants {
            kernel,
            corange,
            index,
            taxonomy,
        }
    }

    fn of_matrix(m: &Matrix, tol: &TolerancePolicy) -> Result<(Self, f64)> {
        let a = analyze(m, tol)?;
        let kernel = Count::Finite(a.kernel_dim);
        let corange = Count::Finite(a.corange_dim);
        let taxonomy = Taxonomy::from_invariants(true, true, kernel, corange, Provenance::Exact);
        Ok((Invariants::new(kernel, corange, taxonomy), a.gamma))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Empirical {
    pub reference: Invariants,
    pub perturbed: Invariants,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationCertificate {
    pub theorem: Theorem,
    pub params: Params,
    pub gamma_of_reference: f64,
    pub bound_check: BoundCheck,
    pub hypothesis_met: bool,
    /// Empty unless `hypothesis_met`.
    pub guaranteed: Vec<Conclusion>,
    pub empirical: Empirical,
    /// Every guaranteed conclusion holds on the measured invariants.
    pub empirical_agreement: bool,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

fn count_not_larger(perturbed: Count, reference: Count) -> bool {
    match (perturbed, reference) {
        (_, Count::Unbounded) => true,
        (Count::Unbounded, Count::Finite(_)) => false,
        (Count::Finite(p), Count::Finite(r)) => p <= r,
    }
}

fn index_equal(p: &Invariants, r: &Invariants) -> bool {
    match (p.index, r.index) {
        (Some(a), Some(b)) => a == b,
        (None, None) => {
            let pattern =
                |i: &Invariants| (i.kernel == Count::Unbounded, i.corange == Count::Unbounded);
            pattern(p) == pattern(r) && pattern(r) != (true, true)
        }
        _ => false,
    }
}

impl Conclusion {
    pub fn holds(self, e: &Empirical) -> bool {
        match self {
            Conclusion::KernelNotLarger => count_not_larger(e.perturbed.kernel, e.reference.kernel),
            Conclusion::CorangeNotLarger => {
                count_not_larger(e.perturbed.corange, e.reference.corange)
            }
            Conclusion::IndexPreserved => index_equal(&e.perturbed, &e.reference),
            Conclusion::ClassPreserved(flag) => e.perturbed.taxonomy.has(flag),
        }
    }
}

const KATO_CONCLUSIONS: [Conclusion; 3] = [
    Conclusion::KernelNotLarger,
    Conclusion::CorangeNotLarger,
    Conclusion::IndexPreserved,
];

/// Conclusions of a stability theorem for a reference sequence of the given class.
///
/// Closed range survives only when the reference is semi-Fredholm, so the
/// Kato conclusions and `quasi_frame` are withheld otherwise.
fn stability_conclusions(reference: &Taxonomy) -> Vec<Conclusion> {
    let semi_fredholm = reference.pseudo_frame || reference.pseudo_riesz_sequence;
    let mut out = Vec::new();
    if semi_fredholm {
        out.extend(KATO_CONCLUSIONS);
    }
    out.extend(
        reference
            .flags()
            .into_iter()
            .filter(|f| semi_fredholm || *f != ClassFlag::QuasiFrame)
            .map(Conclusion::ClassPreserved),
    );
    out
}

impl PerturbationCertificate {
    /// Drops the conclusions when the hypothesis fails and checks the rest
    /// against the measured invariants.
    fn settle(mut self) -> Self {
        if !self.hypothesis_met {
            self.guaranteed.clear();
        }
        self.empirical_agreement = self.guaranteed.iter().all(|c| c.holds(&self.empirical));
        self
    }
}

fn random_coefficients(rng: &mut SeededRng, n: usize, field: Field) -> DVector<Scalar> {
    normal_matrix(rng, n, 1, field)
        .into_dmatrix()
        .column(0)
        .into_owned()
}

/// Tests `‖A c‖ ≤ μ‖c‖ + λ‖T c‖`.
///
/// With `λ = 0` the test is exact (`μ ≥ ‖A‖`); otherwise it is sampled.
fn check_relative_bound(
    t: &Matrix,
    a_mat: &Matrix,
    lambda: f64,
    mu: f64,
    seed: u64,
) -> Result<BoundCheck> {
    if lambda == 0.0 {
        let norm = svd(a_mat)?.sigma_max();
        return Ok(if norm <= mu + BOUND_SLACK * mu.max(1.0) {
            BoundCheck::Exact
        } else {
            BoundCheck::Violated
        });
    }
    let field = t.field().join(a_mat.field());
    let mut rng = seeded_rng(seed);
    for _ in 0..BOUND_SAMPLES {
        let c = random_coefficients(&mut rng, t.cols(), field);
        let lhs = (a_mat.as_dmatrix() * &c).norm();
        let rhs = lambda * (t.as_dmatrix() * &c).norm() + mu * c.norm();
        if lhs > rhs + BOUND_SLACK * rhs.max(1.0) {
            return Ok(BoundCheck::Violated);
        }
    }
    Ok(BoundCheck::Sampled)
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be a finite nonnegative number, got {x}"
        )))
    }
}

/// Kato certificate with `b = 0` and `a = ‖A‖`.
pub fn kato_certificate(
    t: &Matrix,
    a_mat: &Matrix,
    tol: &TolerancePolicy,
) -> Result<PerturbationCertificate> {
    kato_certificate_with_bounds(t, a_mat, None, tol)
}

/// Kato certificate; explicit `(a, b)` are checked against the pair first.
pub fn kato_certificate_with_bounds(
    t: &Matrix,
    a_mat: &Matrix,
    bounds: Option<(f64, f64)>,
    tol: &TolerancePolicy,
) -> Result<PerturbationCertificate> {
    if t.shape() != a_mat.shape() {
        return Err(invalid(format!(
            "T is {}x{} but A is {}x{}",
            t.rows(),
            t.cols(),
            a_mat.rows(),
            a_mat.cols()
        )));
    }
    let (a, b, bound_check) = match bounds {
        None => (svd(a_mat)?.sigma_max(), 0.0, BoundCheck::ByConstruction),
        Some((a, b)) => {
            check_nonneg("a", a)?;
            check_nonneg("b", b)?;
            (a, b, check_relative_bound(t, a_mat, b, a, seed_from_env())?)
        }
    };
    let (reference, gamma) = Invariants::of_matrix(t, tol)?;
    let (perturbed, _) = Invariants::of_matrix(&(t + a_mat), tol)?;
    let hypothesis_met = bound_check.holds() && b < 1.0 && gamma > 0.0 && a < (1.0 - b) * gamma;
    let mut notes = Vec::new();
    if bound_check == BoundCheck::Violated {
        notes.push(format!(
            "the supplied bound ‖Au‖ ≤ {a}‖u‖ + {b}‖Tu‖ fails on this pair"
        ));
    }
    Ok(PerturbationCertificate {
        theorem: Theorem::Kato,
        params: Params::Kato { a, b },
        gamma_of_reference: gamma,
        bound_check,
        hypothesis_met,
        guaranteed: KATO_CONCLUSIONS.to_vec(),
        empirical: Empirical {
            reference,
            perturbed,
        },
        empirical_agreement: false,
        provenance: Provenance::Exact,
        notes,
    }
    .settle())
}

struct Side {
    invariants: Invariants,
    gamma: f64,
    provenance: Provenance,
    notes: Vec<String>,
}

fn side(s: &VectorSequence, tol: &TolerancePolicy) -> Result<Side> {
    match s {
        VectorSequence::Rule(_) => {
            let report = scan(s, &default_schedule(s)?, tol)?;
            let last = &report.steps[report.steps.len() - 1].analysis;
            let mut notes: Vec<String> = report.notes.iter().map(ToString::to_string).collect();
            if !report.gamma_settled {
                notes.push("γ did not settle across the scan".into());
            }
            let kernel = report.kernel_trend.count(last.kernel_dim);
            let corange = report.corange_trend.count(last.corange_dim);
            Ok(Side {
                invariants: Invariants::new(kernel, corange, report.extrapolated),
                gamma: last.gamma,
                provenance: Provenance::TruncationExtrapolated,
                notes,
            })
        }
        _ => {
            let a = analyze_sequence(s, tol)?;
            let kernel = Count::Finite(a.kernel_dim);
            let corange = Count::Finite(a.corange_dim);
            Ok(Side {
                invariants: Invariants::new(
                    kernel,
                    corange,
                    Taxonomy::from_invariants(true, true, kernel, corange, Provenance::Exact),
                ),
                gamma: a.gamma,
                provenance: Provenance::Exact,
                notes: Vec::new(),
            })
        }
    }
}

/// Eventual forms with terms of equal index merged; equal forms mean the
/// sequences agree past the larger horizon.
fn tails_agree(f: &EventualForm, g: &EventualForm) -> bool {
    let merged = |e: &EventualForm| {
        e.terms
            .iter()
            .map(|t| ((t.index.a, t.index.b), t.coeff))
            .into_group_map()
            .into_iter()
            .map(|(k, polys)| {
                let sum = polys.iter().skip(1).fold(polys[0], |acc, p| acc.add(p));
                (k, sum)
            })
            .filter(|(_, p)| !p.is_zero())
            .sorted_by_key(|(k, _)| *k)
            .collect::<Vec<_>>()
    };
    let (a, b) = (merged(f), merged(g));
    a.len() == b.len()
        && a.iter()
            .zip(&b)
            .all(|((ka, pa), (kb, pb))| ka == kb && pa.sub(pb).is_zero())
}

/// The data every sequence-pair certificate needs.
struct PairData {
    sf: Matrix,
    sg: Matrix,
    reference: Side,
    perturbed: Side,
    /// The sections contain every vector where `f` and `g` differ.
    difference_exact: bool,
    /// `S_g − S_f` is known to be unbounded.
    difference_unbounded: bool,
}

fn pair_data(f: &VectorSequence, g: &VectorSequence, tol: &TolerancePolicy) -> Result<PairData> {
    match (f, g) {
        (VectorSequence::Finite(ff), VectorSequence::Finite(gg)) => {
            if ff.synthesis().shape() != gg.synthesis().shape() {
                return Err(invalid(format!(
                    "sequences differ in shape: {} vectors in ℂ^{} and {} vectors in ℂ^{}",
                    ff.len(),
                    ff.dim(),
                    gg.len(),
                    gg.dim()
                )));
            }
            Ok(PairData {
                sf: ff.synthesis().clone(),
                sg: gg.synthesis().clone(),
                reference: side(f, tol)?,
                perturbed: side(g, tol)?,
                difference_exact: true,
                difference_unbounded: false,
            })
        }
        (VectorSequence::Finite(_), _) | (_, VectorSequence::Finite(_)) => Err(invalid(
            "cannot compare a finite sequence with a structured one",
        )),
        _ => {
            let ef = f.eventual_form().expect("structured");
            let eg = g.eventual_form().expect("structured");
            let agree = tails_agree(&ef, &eg);
            let n = if agree {
                ef.horizon.max(eg.horizon).max(1)
            } else {
                DEFAULT_SECTION_VECTORS
            };
            let d = f.lossless_dim(n)?.max(g.lossless_dim(n)?);
            let t = Truncation::new(n, d);
            let reference = side(f, tol)?;
            let perturbed = side(g, tol)?;
            let difference_unbounded = !agree
                && (!reference.invariants.taxonomy.bessel || !perturbed.invariants.taxonomy.bessel);
            Ok(PairData {
                sf: f.truncate(t)?.matrix,
                sg: g.truncate(t)?.matrix,
                reference,
                perturbed,
                difference_exact: agree,
                difference_unbounded,
            })
        }
    }
}

impl PairData {
    fn provenance(&self) -> Provenance {
        if self.difference_exact
            && self.reference.provenance == Provenance::Exact
            && self.perturbed.provenance == Provenance::Exact
        {
            Provenance::Exact
        } else {
            Provenance::TruncationExtrapolated
        }
    }

    fn notes(&self) -> Vec<String> {
        let tag = |who: &str, notes: &[String]| {
            notes
                .iter()
                .map(|n| format!("{who}: {n}"))
                .collect::<Vec<_>>()
        };
        let mut out = tag("f", &self.reference.notes);
        out.extend(tag("g", &self.perturbed.notes));
        out
    }

    fn reference_usable(&self) -> bool {
        let t = &self.reference.invariants.taxonomy;
        t.bessel && t.quasi_frame && self.reference.gamma > 0.0
    }

    fn empirical(&self) -> Empirical {
        Empirical {
            reference: self.reference.invariants.clone(),
            perturbed: self.perturbed.invariants.clone(),
        }
    }
}

/// Certificate for the λ, μ stability theorem.
///
/// Missing parameters are estimated as `λ = 0`, `μ = ‖S_g − S_f‖`.
/// Supplied parameters are checked exactly when `λ = 0` and on
/// [`BOUND_SAMPLES`] seeded random coefficient vectors otherwise; the seed
/// comes from `FRAMEFORGE_SEED`.
pub fn pw_certificate(
    f: &VectorSequence,
    g: &VectorSequence,
    lambda: Option<f64>,
    mu: Option<f64>,
    tol: &TolerancePolicy,
) -> Result<PerturbationCertificate> {
    pw_certificate_seeded(f, g, lambda, mu, seed_from_env(), tol)
}

pub fn pw_certificate_seeded(
    f: &VectorSequence,
    g: &VectorSequence,
    lambda: Option<f64>,
    mu: Option<f64>,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<PerturbationCertificate> {
    if let Some(l) = lambda {
        check_nonneg("λ", l)?;
    }
    if let Some(m) = mu {
        check_nonneg("μ", m)?;
    }
    let data = pair_data(f, g, tol)?;
    let diff = &data.sg - &data.sf;
    let estimated = mu.is_none();
    let lambda = lambda.unwrap_or(0.0);
    let (mu, mut bound_check) = match mu {
        None => (svd(&diff)?.sigma_max(), BoundCheck::ByConstruction),
        Some(m) => (m, check_relative_bound(&data.sf, &diff, lambda, m, seed)?),
    };
    let mut notes = data.notes();
    if data.difference_unbounded {
        bound_check = BoundCheck::Unbounded;
        notes.push("S_g − S_f is unbounded, so no (λ, μ) bound exists".into());
    } else if bound_check == BoundCheck::Violated {
        notes.push(format!(
            "the supplied bound with λ = {lambda}, μ = {mu} fails on this pair"
        ));
    }
    if lambda >= 1.0 {
        notes.push("λ ≥ 1 leaves no room for μ < (1 − λ)γ".into());
    }
    let gamma = data.reference.gamma;
    let hypothesis_met = bound_check.holds()
        && data.reference_usable()
        && lambda < 1.0
        && mu < (1.0 - lambda) * gamma;
    Ok(PerturbationCertificate {
        theorem: Theorem::PwType,
        params: Params::PwType {
            lambda,
            mu,
            estimated,
        },
        gamma_of_reference: gamma,
        bound_check,
        hypothesis_met,
        guaranteed: stability_conclusions(&data.reference.invariants.taxonomy),
        empirical: data.empirical(),
        empirical_agreement: false,
        provenance: data.provenance(),
        notes,
    }
    .settle())
}

/// Certificate for the quadratic-closeness theorems.
///
/// `q = Σ‖f_n − g_n‖²` is exact for finite pairs and for structured pairs
/// whose eventual forms coincide; otherwise the terms stay bounded away
/// from zero and `q` diverges.
pub fn bari_certificate(
    f: &VectorSequence,
    g: &VectorSequence,
    variant: BariVariant,
    tol: &TolerancePolicy,
) -> Result<PerturbationCertificate> {
    let data = pair_data(f, g, tol)?;
    let q = data
        .difference_exact
        .then(|| (&data.sg - &data.sf).frobenius_sq());
    let a = q.map(f64::sqrt);
    let mut notes = data.notes();
    if q.is_none() {
        notes.push("Σ‖f_n − g_n‖² diverges: the sequences differ in every late vector".into());
    }
    let reference_tax = &data.reference.invariants.taxonomy;
    let gamma = data.reference.gamma;
    let (theorem, hypothesis_met, conclusions, bound_check) = match variant {
        BariVariant::Prb => {
            let conclusions = if reference_tax.pseudo_riesz_basis {
                vec![Conclusion::ClassPreserved(ClassFlag::PseudoRieszBasis)]
            } else {
                Vec::new()
            };
            (
                Theorem::BariPrb,
                q.is_some() && reference_tax.bessel,
                conclusions,
                BoundCheck::NotApplicable,
            )
        }
        BariVariant::Gamma => {
            let met = q.is_some_and(|q| q < gamma * gamma) && data.reference_usable();
            let check = if q.is_some() {
                BoundCheck::ByConstruction
            } else {
                BoundCheck::Unbounded
            };
            (
                Theorem::BariGamma,
                met,
                stability_conclusions(reference_tax),
                check,
            )
        }
    };
    Ok(PerturbationCertificate {
        theorem,
        params: Params::Quadratic { q, a },
        gamma_of_reference: gamma,
        bound_check,
        hypothesis_met,
        guaranteed: conclusions,
        empirical: data.empirical(),
        empirical_agreement: false,
        provenance: data.provenance(),
        notes,
    }
    .settle())
}

/// Shapes drawn by the stability trials.
pub const TRIAL_SHAPES: [(usize, usize); 3] = [(4, 6), (6, 4), (5, 5)];

/// Scale of `‖A‖` relative to `(1 − b)γ` in regular trials.
pub const TRIAL_SCALE: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialViolation {
    pub trial: usize,
    pub shape: (usize, usize),
    pub rank_deficiency: usize,
    pub conclusion: Conclusion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub trials: usize,
    pub scale: f64,
    /// Trials whose hypothesis held, so the conclusions were asserted.
    pub asserted: usize,
    /// Trials recorded as "hypothesis unmet, conclusion not asserted".
    pub unasserted: usize,
    pub violations: Vec<TrialViolation>,
}

/// Random Kato trials with `‖A‖ = 0.9 (1 − b) γ(T)`.
pub fn stability_trials(seed: u64, trials: usize, tol: &TolerancePolicy) -> Result<TrialReport> {
    stability_trials_scaled(seed, trials, TRIAL_SCALE, tol)
}

/// Random Kato trials with `‖A‖ = scale · (1 − b) γ(T)`.
///
/// Trial `i` draws from stream `i` of the seeded generator, so the report
/// does not depend on evaluation order.
pub fn stability_trials_scaled(
    seed: u64,
    trials: usize,
    scale: f64,
    tol: &TolerancePolicy,
) -> Result<TrialReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    check_nonneg("scale", scale)?;
    let mut report = TrialReport {
        seed,
        trials,
        scale,
        asserted: 0,
        unasserted: 0,
        violations: Vec::new(),
    };
    for trial in 0..trials {
        let mut rng = seeded_rng(seed);
        rng.set_stream(trial as u64);
        let &(rows, cols) = TRIAL_SHAPES.choose(&mut rng).expect("nonempty");
        let deficiency = rng.random_range(0..=2usize);
        let field = if rng.random_bool(0.5) {
            Field::Real
        } else {
            Field::Complex
        };
        let t = low_rank_matrix(&mut rng, rows, cols, rows.min(cols) - deficiency, field);
        let b: f64 = rng.random_range(0.0..0.5);
        let gamma = analyze(&t, tol)?.gamma;
        let raw = normal_matrix(&mut rng, rows, cols, field);
        let target = scale * (1.0 - b) * gamma;
        let a_mat = raw.scale(Scalar::new(target / svd(&raw)?.sigma_max(), 0.0));
        let cert = kato_certificate_with_bounds(&t, &a_mat, Some((target, b)), tol)?;
        if !cert.hypothesis_met {
            report.unasserted += 1;
            continue;
        }
        report.asserted += 1;
        for c in cert.guaranteed.iter().filter(|c| !c.holds(&cert.empirical)) {
            report.violations.push(TrialViolation {
                trial,
                shape: (rows, cols),
                rank_deficiency: deficiency,
                conclusion: *c,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqmodel::FiniteSequence;
    use approx::assert_abs_diff_eq;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn diag(entries: &[f64]) -> Matrix {
        let n = entries.len();
        let mut v = vec![0.0; n * n];
        for (i, e) in entries.iter().enumerate() {
            v[i * n + i] = *e;
        }
        Matrix::real(n, n, &v).unwrap()
    }

    fn finite(rows: &[Vec<f64>]) -> VectorSequence {
        VectorSequence::Finite(FiniteSequence::from_real(rows).unwrap())
    }

    fn dup_rows() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]
    }

    #[test]
    fn kato_examples() {
        let t = diag(&[1.0, 1.0, 0.0]);
        let c = kato_certificate(&t, &Matrix::zeros(3, 3), &tol()).unwrap();
        assert!(c.hypothesis_met);
        assert_eq!(c.params, Params::Kato { a: 0.0, b: 0.0 });
        assert_eq!(c.empirical.reference.index, Some(0));
        assert_eq!(c.empirical.perturbed.index, Some(0));

        let c = kato_certificate(&t, &diag(&[0.5, 0.0, 0.0]), &tol()).unwrap();
        assert!(c.hypothesis_met);
        assert!(c.guaranteed.contains(&Conclusion::IndexPreserved));
        assert_eq!(c.empirical.perturbed.kernel, Count::Finite(1));
        assert_eq!(c.empirical.perturbed.corange, Count::Finite(1));
        assert!(c.empirical_agreement);

        let c = kato_certificate(&t, &diag(&[2.0, 0.0, 0.0]), &tol()).unwrap();
        assert!(!c.hypothesis_met);
        assert!(c.guaranteed.is_empty());
        assert_eq!(c.empirical.reference.kernel, Count::Finite(1));

        assert!(kato_certificate(&t, &Matrix::zeros(2, 3), &tol()).is_err());
    }

    #[test]
    fn kato_rejects_false_explicit_bounds() {
        let t = diag(&[1.0, 1.0]);
        let a = diag(&[0.5, 0.0]);
        let c = kato_certificate_with_bounds(&t, &a, Some((0.1, 0.0)), &tol()).unwrap();
        assert_eq!(c.bound_check, BoundCheck::Violated);
        assert!(!c.hypothesis_met);
        let c = kato_certificate_with_bounds(&t, &a, Some((0.0, 0.5)), &tol()).unwrap();
        assert_eq!(c.bound_check, BoundCheck::Sampled);
    }

    #[test]
    fn pw_examples() {
        let f = finite(&dup_rows());
        let c = pw_certificate(&f, &f, None, None, &tol()).unwrap();
        assert!(c.hypothesis_met);
        assert_eq!(
            c.params,
            Params::PwType {
                lambda: 0.0,
                mu: 0.0,
                estimated: true
            }
        );

        let id: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = id
            .iter()
            .map(|v| v.iter().map(|x| 1.5 * x).collect())
            .collect();
        let c =
            pw_certificate(&finite(&id), &finite(&scaled), Some(0.5), Some(0.0), &tol()).unwrap();
        assert_eq!(c.bound_check, BoundCheck::Sampled);
        assert!(c.hypothesis_met);
        assert!(c.empirical.perturbed.taxonomy.riesz_basis);
        assert!(c
            .guaranteed
            .contains(&Conclusion::ClassPreserved(ClassFlag::RieszBasis)));
        assert!(c.empirical_agreement);

        let mut nudged = dup_rows();
        nudged[2][1] = 0.1;
        let c = pw_certificate(&f, &finite(&nudged), None, None, &tol()).unwrap();
        if let Params::PwType { mu, .. } = c.params {
            assert_abs_diff_eq!(mu, 0.1, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(c.gamma_of_reference, 1.0, epsilon = 1e-12);
        assert!(c.hypothesis_met);
        assert!(c
            .guaranteed
            .contains(&Conclusion::ClassPreserved(ClassFlag::PseudoRieszBasis)));
        assert_eq!(c.empirical.reference.index, Some(0));
        assert_eq!(c.empirical.perturbed.index, Some(0));
    }

    #[test]
    fn pw_lambda_at_least_one_is_reported() {
        let f = finite(&dup_rows());
        let c = pw_certificate(&f, &f, Some(1.0), Some(0.0), &tol()).unwrap();
        assert!(!c.hypothesis_met);
        assert!(c.guaranteed.is_empty());
        assert!(pw_certificate(&f, &f, Some(-1.0), None, &tol()).is_err());
    }

    #[test]
    fn bari_examples() {
        let f = finite(&dup_rows());
        for v in [BariVariant::Prb, BariVariant::Gamma] {
            let c = bari_certificate(&f, &f, v, &tol()).unwrap();
            assert!(c.hypothesis_met);
            assert_eq!(
                c.params,
                Params::Quadratic {
                    q: Some(0.0),
                    a: Some(0.0)
                }
            );
        }

        let id: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let u = [0.5, 0.5, 0.5, 0.5];
        let g: Vec<Vec<f64>> = id
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let w = 0.5f64.powi(n as i32 + 1);
                v.iter().zip(u).map(|(x, y)| x + w * y).collect()
            })
            .collect();
        let c = bari_certificate(&finite(&id), &finite(&g), BariVariant::Gamma, &tol()).unwrap();
        let expected: f64 = (1..=4).map(|n| 0.25f64.powi(n)).sum();
        match c.params {
            Params::Quadratic { q: Some(q), .. } => {
                assert_abs_diff_eq!(q, expected, epsilon = 1e-12)
            }
            other => panic!("unexpected params {other:?}"),
        }
        assert!(c.hypothesis_met);

        let mut nudged = dup_rows();
        nudged[0][1] = 0.05;
        let c = bari_certificate(&f, &finite(&nudged), BariVariant::Prb, &tol()).unwrap();
        match c.params {
            Params::Quadratic { q: Some(q), .. } => assert_abs_diff_eq!(q, 0.0025, epsilon = 1e-14),
            other => panic!("unexpected params {other:?}"),
        }
        assert_eq!(
            c.guaranteed,
            vec![Conclusion::ClassPreserved(ClassFlag::PseudoRieszBasis)]
        );
        assert!(c.empirical_agreement);
        assert_eq!(c.empirical.perturbed.index, Some(0));
    }

    #[test]
    fn stability_trials_small_runs() {
        let r = stability_trials(42, 1, &tol()).unwrap();
        assert_eq!((r.asserted, r.unasserted), (1, 0));
        assert!(r.violations.is_empty());

        let r = stability_trials(3, 50, &tol()).unwrap();
        assert_eq!(r.asserted, 50);
        assert!(r.violations.is_empty());
        assert_eq!(r, stability_trials(3, 50, &tol()).unwrap());

        let r = stability_trials_scaled(3, 20, 1.1, &tol()).unwrap();
        assert_eq!(r.asserted, 0);
        assert_eq!(r.unasserted, 20);

        assert!(stability_trials(0, 0, &tol()).is_err());
    }
}
