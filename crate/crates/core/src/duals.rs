//! Canonical duals, pseudo-duals and pseudo-coduals.
//!
//! A sequence `g` is a pseudo-dual of `f` when `S_f S_g* = I + K` and a
//! pseudo-codual when `S_g* S_f = I + K`, with `K` of finite rank. The
//! constructions here fix the Moore–Penrose inverse; any other generalized
//! inverse of the frame operator or the Grammian yields another valid
//! partner.
//!
//! The pseudo-reconstruction `f = Σ ⟨f, g_n⟩ f_n` holds exactly on the
//! kernel of the defect, a subspace of codimension `defect_rank`.

use std::fmt;

use serde::Serialize;

use crate::classify::{analyze, classify, Taxonomy};
use crate::error::{invalid, Error, Result};
use crate::numkernel::{numeric_rank, pseudo_inverse, svd, Matrix, TolerancePolicy};
use crate::seqmodel::{FiniteSequence, Truncation, VectorSequence};

/// Vectors per section when a structured pair is verified on truncations.
pub const DEFAULT_SECTION_VECTORS: usize = 32;

/// Absolute tolerance on each inner product in biorthogonality checks.
pub const BIORTHOGONALITY_TOL: f64 = 1e-8;

/// Which side of the pair must reproduce the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `S_f S_g* − I` on the ambient space.
    Dual,
    /// `S_g* S_f − I` on the coefficient space.
    Codual,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Dual => "dual",
            Relation::Codual => "codual",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DualityVerdict {
    ExactDual,
    PseudoDual { rank: usize },
    NotAPseudoDual,
}

impl DualityVerdict {
    fn from_rank(rank: usize, budget: usize) -> Self {
        if rank == 0 {
            DualityVerdict::ExactDual
        } else if rank < budget {
            DualityVerdict::PseudoDual { rank }
        } else {
            DualityVerdict::NotAPseudoDual
        }
    }
}

impl fmt::Display for DualityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualityVerdict::ExactDual => f.write_str("exact-dual"),
            DualityVerdict::PseudoDual { rank } => write!(f, "pseudo-dual(rank {rank})"),
            DualityVerdict::NotAPseudoDual => f.write_str("not-a-pseudo-dual"),
        }
    }
}

/// Defect of a duality relation together with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityCertificate {
    pub relation: Relation,
    #[serde(skip)]
    pub defect_matrix: Matrix,
    pub defect_rank: usize,
    pub rank_budget: usize,
    pub bessel_flag_of_partner: bool,
    pub verdict: DualityVerdict,
    /// Section on which the defect was computed, for structured pairs.
    pub section: Option<Truncation>,
    pub source_taxonomy: Taxonomy,
}

impl DualityCertificate {
    /// Codimension of the subspace on which the (co)reconstruction formula is exact.
    pub fn exact_subspace_codim(&self) -> usize {
        self.defect_rank
    }
}

/// Default rank budget: the larger of excess and deficit, plus two.
pub fn default_rank_budget(source: &Taxonomy) -> usize {
    source.excess.unwrap_or(0).max(source.deficit.unwrap_or(0)) + 2
}

/// The defect matrix of a relation between two synthesis matrices.
pub fn defect_matrix(sf: &Matrix, sg: &Matrix, relation: Relation) -> Result<Matrix> {
    if sf.shape() != sg.shape() {
        return Err(invalid(format!(
            "partners have incompatible shapes {}x{} and {}x{}",
            sf.rows(),
            sf.cols(),
            sg.rows(),
            sg.cols()
        )));
    }
    let product = match relation {
        Relation::Dual => sf * &sg.adjoint(),
        Relation::Codual => &sg.adjoint() * sf,
    };
    Ok(product.minus_identity())
}

fn rank_of(m: &Matrix, tol: &TolerancePolicy) -> Result<usize> {
    Ok(numeric_rank(&svd(m)?.singular_values, tol))
}

/// `F⁻¹ f_n` for a finite frame, with `F = S S*`.
pub fn canonical_dual(s: &FiniteSequence, tol: &TolerancePolicy) -> Result<FiniteSequence> {
    let a = analyze(s.synthesis(), tol)?;
    if a.corange_dim > 0 {
        return Err(Error::NotAFrame {
            corange_dim: a.corange_dim,
        });
    }
    let sm = s.synthesis().as_dmatrix();
    let frame_operator = sm * sm.adjoint();
    let cholesky = frame_operator
        .cholesky()
        .ok_or(Error::NotAFrame { corange_dim: 0 })?;
    FiniteSequence::from_synthesis(Matrix::from_dmatrix(cholesky.solve(sm)))
}

/// `g_n = R f_n` with `R` the Moore–Penrose inverse of the frame operator.
///
/// Evaluated as `(S⁺)*`, which equals `(S S*)⁺ S` without squaring the
/// condition number.
pub fn pseudo_dual_construct(
    s: &FiniteSequence,
    tol: &TolerancePolicy,
) -> Result<(FiniteSequence, DualityCertificate)> {
    let g = FiniteSequence::from_synthesis(pseudo_inverse(s.synthesis(), tol)?.adjoint())?;
    let cert = verify_finite(s, &g, Relation::Dual, None, tol)?;
    Ok((g, cert))
}

/// `g_n = Σ_k (R e_n)_k f_k` with `R` the Moore–Penrose inverse of the Grammian.
///
/// Evaluated as `(S⁺)*`, which equals `S (S* S)⁺`.
pub fn pseudo_codual_construct(
    s: &FiniteSequence,
    tol: &TolerancePolicy,
) -> Result<(FiniteSequence, DualityCertificate)> {
    let g = FiniteSequence::from_synthesis(pseudo_inverse(s.synthesis(), tol)?.adjoint())?;
    let cert = verify_finite(s, &g, Relation::Codual, None, tol)?;
    Ok((g, cert))
}

fn verify_finite(
    f: &FiniteSequence,
    g: &FiniteSequence,
    relation: Relation,
    rank_budget: Option<usize>,
    tol: &TolerancePolicy,
) -> Result<DualityCertificate> {
    let defect = defect_matrix(f.synthesis(), g.synthesis(), relation)?;
    let source_taxonomy = crate::classify::classify_finite(f, tol)?;
    let budget = rank_budget.unwrap_or_else(|| default_rank_budget(&source_taxonomy));
    let defect_rank = rank_of(&defect, tol)?;
    Ok(DualityCertificate {
        relation,
        defect_matrix: defect,
        defect_rank,
        rank_budget: budget,
        bessel_flag_of_partner: true,
        verdict: DualityVerdict::from_rank(defect_rank, budget),
        section: None,
        source_taxonomy,
    })
}

/// Checks a relation between two sequences of the same kind.
///
/// Structured pairs are compared on the first [`DEFAULT_SECTION_VECTORS`]
/// vectors, truncated to a common lossless coordinate count; the partner's
/// Bessel flag comes from its exact classification or truncation scan.
pub fn verify_duality(
    f: &VectorSequence,
    g: &VectorSequence,
    relation: Relation,
    rank_budget: Option<usize>,
    tol: &TolerancePolicy,
) -> Result<DualityCertificate> {
    verify_duality_at(f, g, relation, rank_budget, DEFAULT_SECTION_VECTORS, tol)
}

/// [`verify_duality`] with an explicit section size for structured pairs.
pub fn verify_duality_at(
    f: &VectorSequence,
    g: &VectorSequence,
    relation: Relation,
    rank_budget: Option<usize>,
    n_vectors: usize,
    tol: &TolerancePolicy,
) -> Result<DualityCertificate> {
    match (f, g) {
        (VectorSequence::Finite(f), VectorSequence::Finite(g)) => {
            verify_finite(f, g, relation, rank_budget, tol)
        }
        (VectorSequence::Finite(_), _) | (_, VectorSequence::Finite(_)) => Err(invalid(
            "cannot pair a finite sequence with a structured one",
        )),
        _ => {
            if n_vectors == 0 {
                return Err(invalid("section must contain at least one vector"));
            }
            let d = f.lossless_dim(n_vectors)?.max(g.lossless_dim(n_vectors)?);
            let t = Truncation::new(n_vectors, d);
            let sf = f.truncate(t)?.matrix;
            let sg = g.truncate(t)?.matrix;
            let defect = defect_matrix(&sf, &sg, relation)?;
            let source_taxonomy = classify(f, tol)?;
            let budget = rank_budget.unwrap_or_else(|| default_rank_budget(&source_taxonomy));
            let defect_rank = rank_of(&defect, tol)?;
            Ok(DualityCertificate {
                relation,
                defect_matrix: defect,
                defect_rank,
                rank_budget: budget,
                bessel_flag_of_partner: classify(g, tol)?.bessel,
                verdict: DualityVerdict::from_rank(defect_rank, budget),
                section: Some(t),
                source_taxonomy,
            })
        }
    }
}

/// Largest deviation of `⟨g_i, f_j⟩` from `δ_ij`.
pub fn biorthogonality_defect(sf: &Matrix, sg: &Matrix) -> Result<f64> {
    Ok(defect_matrix(sf, sg, Relation::Codual)?.max_abs())
}

pub fn is_biorthogonal(sf: &Matrix, sg: &Matrix) -> Result<bool> {
    Ok(biorthogonality_defect(sf, sg)? <= BIORTHOGONALITY_TOL)
}

/// Outcome of checking a partner against the class-transfer theorems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum PartnerCheck {
    Pass,
    Fail { clause: String },
    HypothesesUnmet { reason: String },
}

impl fmt::Display for PartnerCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartnerCheck::Pass => f.write_str("pass"),
            PartnerCheck::Fail { clause } => write!(f, "fail: {clause}"),
            PartnerCheck::HypothesesUnmet { reason } => {
                write!(f, "theorem hypotheses unmet ({reason})")
            }
        }
    }
}

/// Checks that a Bessel partner inherits the source's class.
///
/// * an exact dual of a frame is a frame, an exact codual of a Riesz
///   sequence is a Riesz sequence;
/// * a Bessel pseudo-dual of a pseudo-frame is a pseudo-frame;
/// * a Bessel pseudo-codual of a pseudo-Riesz sequence is a pseudo-Riesz sequence;
/// * a Bessel pseudo-dual or pseudo-codual of a pseudo-Riesz basis is a pseudo-Riesz basis.
pub fn check_partner_class(cert: &DualityCertificate, partner: &Taxonomy) -> PartnerCheck {
    if cert.verdict == DualityVerdict::NotAPseudoDual {
        return PartnerCheck::HypothesesUnmet {
            reason: "defect rank exceeds the budget".into(),
        };
    }
    if !cert.bessel_flag_of_partner || !partner.bessel {
        return PartnerCheck::HypothesesUnmet {
            reason: "not Bessel".into(),
        };
    }
    let source = &cert.source_taxonomy;
    let exact = cert.verdict == DualityVerdict::ExactDual;
    let clauses: [(bool, bool, &str); 3] = match cert.relation {
        Relation::Dual => [
            (
                exact && source.frame,
                partner.frame,
                "an exact dual of a frame is a frame",
            ),
            (
                source.pseudo_frame,
                partner.pseudo_frame,
                "a Bessel pseudo-dual of a pseudo-frame is a pseudo-frame",
            ),
            (
                source.pseudo_riesz_basis,
                partner.pseudo_riesz_basis,
                "a Bessel pseudo-dual of a pseudo-Riesz basis is a pseudo-Riesz basis",
            ),
        ],
        Relation::Codual => [
            (
                exact && source.riesz_sequence,
                partner.riesz_sequence,
                "an exact codual of a Riesz sequence is a Riesz sequence",
            ),
            (
                source.pseudo_riesz_sequence,
                partner.pseudo_riesz_sequence,
                "a Bessel pseudo-codual of a pseudo-Riesz sequence is a pseudo-Riesz sequence",
            ),
            (
                source.pseudo_riesz_basis,
                partner.pseudo_riesz_basis,
                "a Bessel pseudo-codual of a pseudo-Riesz basis is a pseudo-Riesz basis",
            ),
        ],
    };
    match clauses.iter().find(|(hyp, concl, _)| *hyp && !*concl) {
        Some((_, _, clause)) => PartnerCheck::Fail {
            clause: (*clause).to_string(),
        },
        None => PartnerCheck::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_finite;
    use crate::numkernel::Scalar;
    use crate::seqmodel::{CoefficientRule, EditScript, RuleTerm};
    use approx::assert_abs_diff_eq;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn mercedes() -> FiniteSequence {
        let v: Vec<Vec<f64>> = [90.0f64, 210.0, 330.0]
            .iter()
            .map(|a| vec![a.to_radians().cos(), a.to_radians().sin()])
            .collect();
        FiniteSequence::from_real(&v).unwrap()
    }

    fn dup() -> FiniteSequence {
        FiniteSequence::from_real(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn canonical_dual_examples() {
        let onb = FiniteSequence::from_synthesis(Matrix::identity(3)).unwrap();
        let d = canonical_dual(&onb, &tol()).unwrap();
        assert!((d.synthesis() - onb.synthesis()).max_abs() < 1e-14);

        let mb = mercedes();
        let d = canonical_dual(&mb, &tol()).unwrap();
        let expected = mb.synthesis().scale(Scalar::new(2.0 / 3.0, 0.0));
        assert!((d.synthesis() - &expected).max_abs() < 1e-12);

        let e1e3 = FiniteSequence::from_real(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(
            canonical_dual(&e1e3, &tol()),
            Err(Error::NotAFrame { corange_dim: 1 })
        );
    }

    #[test]
    fn pseudo_dual_examples() {
        let (g, cert) = pseudo_dual_construct(&mercedes(), &tol()).unwrap();
        assert_eq!(cert.verdict, DualityVerdict::ExactDual);
        let c = canonical_dual(&mercedes(), &tol()).unwrap();
        assert!((g.synthesis() - c.synthesis()).max_abs() < 1e-12);

        let e1e3 = FiniteSequence::from_real(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let (g, cert) = pseudo_dual_construct(&e1e3, &tol()).unwrap();
        assert!((g.synthesis() - e1e3.synthesis()).max_abs() < 1e-14);
        assert_eq!(cert.defect_rank, 1);
        let minus_p2 = Matrix::real(3, 3, &[0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((&cert.defect_matrix - &minus_p2).max_abs() < 1e-14);

        let (_, cert) = pseudo_dual_construct(&dup(), &tol()).unwrap();
        assert_eq!(cert.defect_rank, 1);
        assert_eq!(cert.verdict, DualityVerdict::PseudoDual { rank: 1 });
    }

    #[test]
    fn pseudo_codual_examples() {
        let onb = FiniteSequence::from_synthesis(Matrix::identity(4)).unwrap();
        let (g, cert) = pseudo_codual_construct(&onb, &tol()).unwrap();
        assert_eq!(g, onb);
        assert_eq!(cert.defect_rank, 0);

        let odd = VectorSequence::make_rule(
            CoefficientRule::new(vec![RuleTerm::constant(2, -1, 1.0)]).unwrap(),
        );
        let section = odd.truncate(Truncation::new(3, 6)).unwrap().matrix;
        let f = FiniteSequence::from_synthesis(section).unwrap();
        let (g, cert) = pseudo_codual_construct(&f, &tol()).unwrap();
        assert!((g.synthesis() - f.synthesis()).max_abs() < 1e-14);
        assert_eq!(cert.defect_rank, 0);

        let (g, cert) = pseudo_codual_construct(&dup(), &tol()).unwrap();
        assert_eq!(cert.defect_rank, 1);
        assert_eq!(cert.relation, Relation::Codual);
        let partner = classify_finite(&g, &tol()).unwrap();
        assert_eq!(check_partner_class(&cert, &partner), PartnerCheck::Pass);
    }

    #[test]
    fn canonical_dual_passes_partner_check() {
        let f = VectorSequence::Finite(mercedes());
        let g = VectorSequence::Finite(canonical_dual(&mercedes(), &tol()).unwrap());
        let cert = verify_duality(&f, &g, Relation::Dual, None, &tol()).unwrap();
        assert_eq!(cert.verdict, DualityVerdict::ExactDual);
        let partner = classify(&g, &tol()).unwrap();
        assert!(partner.frame);
        assert_eq!(check_partner_class(&cert, &partner), PartnerCheck::Pass);
    }

    #[test]
    fn shifted_pair_is_biorthogonal_but_not_bessel() {
        let m = 2;
        let f = VectorSequence::make_structured(EditScript::drop_head(m)).unwrap();
        let g = VectorSequence::make_rule(
            CoefficientRule::new(vec![
                RuleTerm::constant(0, 1, 1.0),
                RuleTerm::constant(1, m as i64, 1.0),
            ])
            .unwrap(),
        );
        let codual = verify_duality(&f, &g, Relation::Codual, None, &tol()).unwrap();
        assert_eq!(codual.defect_rank, 0);
        assert!(!codual.bessel_flag_of_partner);
        let dual = verify_duality(&f, &g, Relation::Dual, None, &tol()).unwrap();
        assert!(dual.defect_rank <= m);
        let partner = classify(&g, &tol()).unwrap();
        assert_eq!(
            check_partner_class(&codual, &partner),
            PartnerCheck::HypothesesUnmet {
                reason: "not Bessel".into()
            }
        );
    }

    #[test]
    fn mixed_kinds_and_shapes_are_rejected() {
        let f = VectorSequence::Finite(mercedes());
        assert!(verify_duality(
            &f,
            &VectorSequence::standard_basis(),
            Relation::Dual,
            None,
            &tol()
        )
        .is_err());
        let g = VectorSequence::Finite(dup());
        assert!(matches!(
            verify_duality(&f, &g, Relation::Dual, None, &tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn biorthogonality_helpers() {
        let id = Matrix::identity(3);
        assert!(is_biorthogonal(&id, &id).unwrap());
        let mut nearly = id.clone().into_dmatrix();
        nearly[(0, 1)] = Scalar::new(1e-6, 0.0);
        let nearly = Matrix::from_dmatrix(nearly);
        assert_abs_diff_eq!(
            biorthogonality_defect(&id, &nearly).unwrap(),
            1e-6,
            epsilon = 1e-15
        );
        assert!(!is_biorthogonal(&id, &nearly).unwrap());
    }
}
