//! Synthesis-operator diagnostics and the frame/Riesz taxonomy.
//!
//! Every verdict is read off the singular spectrum of the synthesis matrix
//! `S` (vectors as columns):
//!
//! | property                 | synthesis operator              |
//! |--------------------------|---------------------------------|
//! | Bessel                   | bounded                         |
//! | frame                    | onto                            |
//! | Riesz sequence           | one-to-one with closed range    |
//! | quasi-frame              | closed range                    |
//! | pseudo-frame             | closed range of finite codim    |
//! | pseudo-Riesz sequence    | closed range, finite kernel     |
//! | pseudo-Riesz basis       | Fredholm                        |
//! | near-Riesz basis         | onto with finite kernel         |
//!
//! In finite dimensions every matrix is Fredholm, so the `pseudo_*` flags are
//! always set for finite sequences. They carry information for structured
//! sequences in ℓ²: edited bases are classified exactly, rule-based
//! sequences through a truncation scan whose verdicts are marked as
//! extrapolated.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numkernel::{numeric_rank, orthonormal_complement_basis, svd, Matrix, TolerancePolicy};
use crate::seqmodel::{EditedBasis, FiniteSequence, Truncation, VectorSequence};

/// Spectral diagnostics of a synthesis operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisAnalysis {
    /// Singular values of the (finite part of the) synthesis matrix.
    pub singular_values: Vec<f64>,
    /// Optimal Bessel bound `σ_max²`.
    pub bessel_bound: f64,
    /// Optimal lower frame bound, 0 when the range is not everything.
    pub frame_lower: f64,
    /// Optimal lower Riesz bound, 0 when the kernel is nontrivial.
    pub riesz_lower: f64,
    /// Reduced minimum modulus: the smallest nonzero singular value (0 for the zero operator).
    pub gamma: f64,
    pub rank: usize,
    pub kernel_dim: usize,
    pub corange_dim: usize,
    pub index: i64,
}

/// Diagnostics of a finite synthesis matrix.
pub fn analyze(m: &Matrix, tol: &TolerancePolicy) -> Result<SynthesisAnalysis> {
    let decomposition = svd(m)?;
    let sv = decomposition.singular_values;
    let rank = numeric_rank(&sv, tol);
    let (rows, cols) = m.shape();
    let kernel_dim = cols - rank;
    let corange_dim = rows - rank;
    let gamma = if rank > 0 { sv[rank - 1] } else { 0.0 };
    let sq = |x: f64| x * x;
    Ok(SynthesisAnalysis {
        bessel_bound: sv.first().map_or(0.0, |&s| sq(s)),
        frame_lower: if corange_dim == 0 && rows > 0 {
            sq(sv[rows - 1])
        } else {
            0.0
        },
        riesz_lower: if kernel_dim == 0 && cols > 0 {
            sq(sv[cols - 1])
        } else {
            0.0
        },
        gamma,
        rank,
        kernel_dim,
        corange_dim,
        index: kernel_dim as i64 - corange_dim as i64,
        singular_values: sv,
    })
}

/// Smallest finite section of an edited basis that carries all of its structure:
/// the head plus every tail vector that lands inside the head's coordinates.
pub fn core_block(e: &EditedBasis) -> Truncation {
    let d = e.head_reach();
    Truncation::new(e.horizon() + d + 1 - e.tail_start(), d)
}

/// Exact diagnostics of an edited basis in ℓ².
///
/// Past the core block the sequence is an orthonormal family orthogonal to
/// the block's coordinates, so it adds singular values equal to 1 and
/// nothing to kernel or corange.
pub fn analyze_edited(e: &EditedBasis, tol: &TolerancePolicy) -> Result<SynthesisAnalysis> {
    let section = VectorSequence::Edited(e.clone()).truncate(core_block(e))?;
    debug_assert!(!section.lossy);
    let mut a = analyze(&section.matrix, tol)?;
    a.bessel_bound = a.bessel_bound.max(1.0);
    a.gamma = if a.rank > 0 { a.gamma.min(1.0) } else { 1.0 };
    let gamma_sq = a.gamma * a.gamma;
    a.frame_lower = if a.corange_dim == 0 { gamma_sq } else { 0.0 };
    a.riesz_lower = if a.kernel_dim == 0 { gamma_sq } else { 0.0 };
    Ok(a)
}

/// Exact diagnostics for finite sequences and edited bases.
pub fn analyze_sequence(s: &VectorSequence, tol: &TolerancePolicy) -> Result<SynthesisAnalysis> {
    match s {
        VectorSequence::Finite(f) => analyze(f.synthesis(), tol),
        VectorSequence::Edited(e) => analyze_edited(e, tol),
        VectorSequence::Rule(_) => Err(Error::UnsupportedExact(
            "rule-based sequences can only be scanned".into(),
        )),
    }
}

/// A dimension that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Count {
    Finite(usize),
    #[serde(serialize_with = "serialize_unbounded")]
    Unbounded,
}

fn serialize_unbounded<S: serde::Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("unbounded")
}

impl Count {
    pub fn finite(self) -> Option<usize> {
        match self {
            Count::Finite(n) => Some(n),
            Count::Unbounded => None,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Unbounded => write!(f, "∞"),
        }
    }
}

/// How a taxonomy was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    TruncationExtrapolated,
}

/// Names of the taxonomy flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassFlag {
    Bessel,
    Frame,
    RieszSequence,
    RieszBasis,
    QuasiFrame,
    PseudoFrame,
    PseudoRieszSequence,
    PseudoRieszBasis,
    NearRieszBasis,
}

impl ClassFlag {
    pub const ALL: [ClassFlag; 9] = [
        ClassFlag::Bessel,
        ClassFlag::Frame,
        ClassFlag::RieszSequence,
        ClassFlag::RieszBasis,
        ClassFlag::QuasiFrame,
        ClassFlag::PseudoFrame,
        ClassFlag::PseudoRieszSequence,
        ClassFlag::PseudoRieszBasis,
        ClassFlag::NearRieszBasis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassFlag::Bessel => "bessel",
            ClassFlag::Frame => "frame",
            ClassFlag::RieszSequence => "riesz_sequence",
            ClassFlag::RieszBasis => "riesz_basis",
            ClassFlag::QuasiFrame => "quasi_frame",
            ClassFlag::PseudoFrame => "pseudo_frame",
            ClassFlag::PseudoRieszSequence => "pseudo_riesz_sequence",
            ClassFlag::PseudoRieszBasis => "pseudo_riesz_basis",
            ClassFlag::NearRieszBasis => "near_riesz_basis",
        }
    }

    pub fn from_name(name: &str) -> Option<ClassFlag> {
        ClassFlag::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for ClassFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Class membership of a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Taxonomy {
    pub bessel: bool,
    pub frame: bool,
    pub riesz_sequence: bool,
    pub riesz_basis: bool,
    pub quasi_frame: bool,
    pub pseudo_frame: bool,
    pub pseudo_riesz_sequence: bool,
    pub pseudo_riesz_basis: bool,
    pub near_riesz_basis: bool,
    /// Minimal number of removals that leave a Riesz sequence.
    pub excess: Option<usize>,
    /// Number of vectors the canonical extension to a frame appends.
    pub deficit: Option<usize>,
    pub provenance: Provenance,
}

impl Taxonomy {
    /// Flags implied by the synthesis operator's boundedness, range closure,
    /// kernel dimension and range codimension.
    pub fn from_invariants(
        bessel: bool,
        closed_range: bool,
        kernel: Count,
        corange: Count,
        provenance: Provenance,
    ) -> Self {
        let closed = bessel && closed_range;
        let frame = closed && corange == Count::Finite(0);
        let riesz_sequence = closed && kernel == Count::Finite(0);
        let pseudo_frame = closed && corange.finite().is_some();
        let pseudo_riesz_sequence = closed && kernel.finite().is_some();
        Taxonomy {
            bessel,
            frame,
            riesz_sequence,
            riesz_basis: frame && riesz_sequence,
            quasi_frame: closed,
            pseudo_frame,
            pseudo_riesz_sequence,
            pseudo_riesz_basis: pseudo_frame && pseudo_riesz_sequence,
            near_riesz_basis: frame && pseudo_riesz_sequence,
            excess: kernel.finite().filter(|_| pseudo_riesz_sequence),
            deficit: corange.finite().filter(|_| pseudo_frame),
            provenance,
        }
    }

    fn exact_from(a: &SynthesisAnalysis) -> Self {
        Self::from_invariants(
            true,
            true,
            Count::Finite(a.kernel_dim),
            Count::Finite(a.corange_dim),
            Provenance::Exact,
        )
    }

    pub fn has(&self, flag: ClassFlag) -> bool {
        match flag {
            ClassFlag::Bessel => self.bessel,
            ClassFlag::Frame => self.frame,
            ClassFlag::RieszSequence => self.riesz_sequence,
            ClassFlag::RieszBasis => self.riesz_basis,
            ClassFlag::QuasiFrame => self.quasi_frame,
            ClassFlag::PseudoFrame => self.pseudo_frame,
            ClassFlag::PseudoRieszSequence => self.pseudo_riesz_sequence,
            ClassFlag::PseudoRieszBasis => self.pseudo_riesz_basis,
            ClassFlag::NearRieszBasis => self.near_riesz_basis,
        }
    }

    /// Flags that are set.
    pub fn flags(&self) -> Vec<ClassFlag> {
        ClassFlag::ALL
            .into_iter()
            .filter(|f| self.has(*f))
            .collect()
    }

    /// Implication-lattice clauses this taxonomy violates (empty when consistent).
    pub fn lattice_violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut check = |ok: bool, clause: &'static str| {
            if !ok {
                out.push(clause);
            }
        };
        check(
            self.riesz_basis == (self.frame && self.riesz_sequence),
            "riesz_basis <=> frame & riesz_sequence",
        );
        check(
            self.pseudo_riesz_basis == (self.pseudo_frame && self.pseudo_riesz_sequence),
            "pseudo_riesz_basis <=> pseudo_frame & pseudo_riesz_sequence",
        );
        check(
            self.near_riesz_basis == (self.frame && self.pseudo_riesz_sequence),
            "near_riesz_basis <=> frame & pseudo_riesz_sequence",
        );
        check(
            (!self.frame || self.pseudo_frame)
                && (!self.riesz_sequence || self.pseudo_riesz_sequence),
            "frame => pseudo_frame, riesz_sequence => pseudo_riesz_sequence",
        );
        check(
            !(self.frame || self.riesz_sequence) || self.quasi_frame,
            "frame | riesz_sequence => quasi_frame",
        );
        check(
            self.excess.is_some() == self.pseudo_riesz_sequence
                && self.deficit.is_some() == self.pseudo_frame,
            "excess defined <=> pseudo_riesz_sequence, deficit defined <=> pseudo_frame",
        );
        out
    }
}

/// Exact classification of a finite sequence.
pub fn classify_finite(s: &FiniteSequence, tol: &TolerancePolicy) -> Result<Taxonomy> {
    Ok(Taxonomy::exact_from(&analyze(s.synthesis(), tol)?))
}

/// Exact classification of a finite sequence or an edited basis.
pub fn classify_structured(s: &VectorSequence, tol: &TolerancePolicy) -> Result<Taxonomy> {
    match s {
        VectorSequence::Rule(_) => Err(Error::UnsupportedExact(
            "rule-based sequences have no exact classifier; scan them instead".into(),
        )),
        other => Ok(Taxonomy::exact_from(&analyze_sequence(other, tol)?)),
    }
}

/// Exact classification where available, otherwise a scan over the default schedule.
pub fn classify(s: &VectorSequence, tol: &TolerancePolicy) -> Result<Taxonomy> {
    match s {
        VectorSequence::Rule(_) => Ok(scan(s, &default_schedule(s)?, tol)?.extrapolated),
        other => classify_structured(other, tol),
    }
}

/// Evidence that a sequence is not Bessel, or that a scan invariant diverges.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DivergenceNote {
    /// A rule term has a non-constant coefficient, so `‖f_n‖ → ∞`.
    UnboundedNorm {
        term: usize,
    },
    /// A rule term puts a fixed nonzero coefficient on `e_index` in every vector.
    RepeatedCoordinate {
        term: usize,
        index: usize,
    },
    /// The Bessel bound grew more than tenfold across the scan.
    BesselBoundGrowth {
        first: f64,
        last: f64,
    },
    KernelGrowth,
    CorangeGrowth,
}

impl DivergenceNote {
    pub fn refutes_bessel(&self) -> bool {
        !matches!(
            self,
            DivergenceNote::KernelGrowth | DivergenceNote::CorangeGrowth
        )
    }
}

impl fmt::Display for DivergenceNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceNote::UnboundedNorm { term } => write!(
                f,
                "term {term} has a non-constant coefficient, so sup ‖f_n‖ = ∞: not Bessel"
            ),
            DivergenceNote::RepeatedCoordinate { term, index } => write!(
                f,
                "term {term} gives every vector the same nonzero coefficient on e_{index}, \
                 so Σ|⟨e_{index}, f_n⟩|² = ∞: not Bessel"
            ),
            DivergenceNote::BesselBoundGrowth { first, last } => write!(
                f,
                "Bessel bound grows without bound ({first:.4} → {last:.4}): not Bessel"
            ),
            DivergenceNote::KernelGrowth => write!(f, "kernel dimension grows with the section"),
            DivergenceNote::CorangeGrowth => {
                write!(f, "range codimension grows with the section")
            }
        }
    }
}

/// Decides boundedness of the synthesis operator without truncation.
///
/// Finite sequences and edited bases are always Bessel. For rules
/// `f_n = Σ p_j(n) e_{a_j n + b_j}`, a term with non-constant `p_j` makes the
/// norms unbounded, and a term with `a_j = 0` hits one coordinate in every
/// vector; either refutes the Bessel property. Otherwise every index map is
/// injective and `‖S‖ ≤ Σ_j |p_j|`.
pub fn bessel_precheck(s: &VectorSequence) -> Vec<DivergenceNote> {
    let VectorSequence::Rule(rule) = s else {
        return Vec::new();
    };
    let mut notes = Vec::new();
    for (k, t) in rule.terms().iter().enumerate() {
        if t.coeff.is_zero() {
            continue;
        }
        if !t.coeff.is_constant() {
            notes.push(DivergenceNote::UnboundedNorm { term: k + 1 });
        } else if t.index.a == 0 {
            notes.push(DivergenceNote::RepeatedCoordinate {
                term: k + 1,
                index: t.index.b as usize,
            });
        }
    }
    notes
}

/// Scan sizes used when the caller gives none.
pub const DEFAULT_SCAN_SIZES: [usize; 4] = [8, 16, 32, 64];

/// Lossless truncations at the given numbers of vectors.
pub fn schedule_for(s: &VectorSequence, sizes: &[usize]) -> Result<Vec<Truncation>> {
    sizes.iter().map(|&n| Truncation::lossless(s, n)).collect()
}

pub fn default_schedule(s: &VectorSequence) -> Result<Vec<Truncation>> {
    schedule_for(s, &DEFAULT_SCAN_SIZES)
}

/// Behaviour of an integer invariant over the last three scan steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "trend", content = "value", rename_all = "lowercase")]
pub enum Trend {
    Settled(usize),
    Growing,
    Unsettled,
}

impl Trend {
    fn of(values: &[usize]) -> Trend {
        if values.len() < 3 {
            return Trend::Unsettled;
        }
        let tail = &values[values.len() - 3..];
        if tail.iter().all_equal() {
            Trend::Settled(tail[0])
        } else if tail.windows(2).all(|w| w[1] > w[0]) {
            Trend::Growing
        } else {
            Trend::Unsettled
        }
    }

    /// Extrapolated value: settled value, unbounded, or the last observation.
    pub fn count(self, last: usize) -> Count {
        match self {
            Trend::Settled(v) => Count::Finite(v),
            Trend::Growing => Count::Unbounded,
            Trend::Unsettled => Count::Finite(last),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanStep {
    pub truncation: Truncation,
    pub analysis: SynthesisAnalysis,
}

/// Result of a finite-section scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub steps: Vec<ScanStep>,
    pub kernel_trend: Trend,
    pub corange_trend: Trend,
    pub gamma_settled: bool,
    /// Both integer invariants settled or grow steadily, and γ settled.
    pub stabilized: bool,
    pub extrapolated: Taxonomy,
    pub notes: Vec<DivergenceNote>,
}

/// Analyzes a structured sequence on a schedule of lossless truncations and
/// extrapolates its class.
///
/// An integer invariant counts as settled when it is constant over the last
/// three steps and as unbounded when it strictly increases over them; γ is
/// settled when it moves by less than `stabilization_rtol` (relative) over
/// the last three steps.
pub fn scan(
    s: &VectorSequence,
    schedule: &[Truncation],
    tol: &TolerancePolicy,
) -> Result<ScanReport> {
    if s.kind() == crate::seqmodel::SequenceKind::Finite {
        return Err(invalid("scan expects a structured sequence"));
    }
    if schedule.is_empty() {
        return Err(invalid("scan schedule is empty"));
    }
    if let Some(w) = schedule
        .windows(2)
        .find(|w| w[1].n_vectors <= w[0].n_vectors)
    {
        return Err(invalid(format!(
            "schedule must grow strictly: {} vectors followed by {}",
            w[0].n_vectors, w[1].n_vectors
        )));
    }

    let mut steps = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let section = s.truncate(t)?;
        if section.lossy {
            return Err(invalid(format!(
                "truncation to {} coordinates clips the first {} vectors",
                t.d_coords, t.n_vectors
            )));
        }
        steps.push(ScanStep {
            truncation: t,
            analysis: analyze(&section.matrix, tol)?,
        });
    }

    let kernels: Vec<usize> = steps.iter().map(|s| s.analysis.kernel_dim).collect();
    let coranges: Vec<usize> = steps.iter().map(|s| s.analysis.corange_dim).collect();
    let kernel_trend = Trend::of(&kernels);
    let corange_trend = Trend::of(&coranges);

    let last = &steps[steps.len() - 1].analysis;
    let gamma_settled = steps.len() >= 3 && {
        let recent = &steps[steps.len() - 3..];
        let reference = last.gamma;
        recent
            .iter()
            .all(|st| (st.analysis.gamma - reference).abs() <= tol.stabilization_rtol * reference)
    };
    let stabilized =
        kernel_trend != Trend::Unsettled && corange_trend != Trend::Unsettled && gamma_settled;

    let mut notes = bessel_precheck(s);
    let first_m = steps[0].analysis.bessel_bound;
    if last.bessel_bound > 10.0 * first_m {
        notes.push(DivergenceNote::BesselBoundGrowth {
            first: first_m,
            last: last.bessel_bound,
        });
    }
    if kernel_trend == Trend::Growing {
        notes.push(DivergenceNote::KernelGrowth);
    }
    if corange_trend == Trend::Growing {
        notes.push(DivergenceNote::CorangeGrowth);
    }

    let bessel = !notes.iter().any(DivergenceNote::refutes_bessel);
    let closed_range = last.rank == 0 || gamma_settled;
    let extrapolated = Taxonomy::from_invariants(
        bessel,
        closed_range,
        kernel_trend.count(last.kernel_dim),
        corange_trend.count(last.corange_dim),
        Provenance::TruncationExtrapolated,
    );

    Ok(ScanReport {
        steps,
        kernel_trend,
        corange_trend,
        gamma_settled,
        stabilized,
        extrapolated,
        notes,
    })
}

/// Outcome of the subset-search excess oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExcessSearch {
    Found(usize),
    Exceeded,
}

/// Smallest `k ≤ k_max` such that deleting some `k` vectors leaves an
/// independent family, found by exhaustive subset search.
pub fn excess_bruteforce(
    s: &FiniteSequence,
    k_max: usize,
    tol: &TolerancePolicy,
) -> Result<ExcessSearch> {
    if k_max > 4 {
        return Err(invalid("subset search is limited to k_max ≤ 4"));
    }
    let m = s.synthesis();
    for k in 0..=k_max.min(s.len()) {
        for removed in (0..s.len()).combinations(k) {
            let rest = m.remove_columns(&removed);
            let rank = numeric_rank(&svd(&rest)?.singular_values, tol);
            if rank == rest.cols() {
                return Ok(ExcessSearch::Found(k));
            }
        }
    }
    Ok(ExcessSearch::Exceeded)
}

/// Appends an orthonormal basis of the range's orthogonal complement,
/// which turns the sequence into a frame.
pub fn extend_to_frame(s: &FiniteSequence, tol: &TolerancePolicy) -> Result<FiniteSequence> {
    let complement = orthonormal_complement_basis(s.synthesis(), tol)?;
    if complement.cols() == 0 {
        return Ok(s.clone());
    }
    s.appended(&complement)
}

/// Greedily removes redundant vectors until the rest is independent.
///
/// Each round considers the vectors whose removal keeps the span, and
/// drops the one leaving the largest γ; ties go to the lowest position.
/// Returns the reduced sequence and the removed 1-based positions, sorted.
pub fn reduce_to_riesz(
    s: &FiniteSequence,
    tol: &TolerancePolicy,
) -> Result<(FiniteSequence, Vec<usize>)> {
    let mut current = s.synthesis().clone();
    let mut labels: Vec<usize> = (1..=s.len()).collect();
    let mut removed = Vec::new();
    loop {
        let a = analyze(&current, tol)?;
        if a.kernel_dim == 0 {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..current.cols() {
            let candidate = analyze(&current.remove_columns(&[j]), tol)?;
            if candidate.rank != a.rank {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, score)) => candidate.gamma > score * (1.0 + 1e-12),
            };
            if better {
                best = Some((j, candidate.gamma));
            }
        }
        let (j, _) = best.expect("a nontrivial kernel leaves a redundant vector");
        current = current.remove_columns(&[j]);
        removed.push(labels.remove(j));
    }
    removed.sort_unstable();
    Ok((FiniteSequence::from_synthesis(current)?, removed))
}
