//! Named example sequences with their expected classification.
//!
//! Parameterized entries are addressed as `name(p)`; a bare name uses the
//! default parameter.

use serde::Serialize;

use crate::classify::{schedule_for, Count, Provenance, Taxonomy};
use crate::duals::Relation;
use crate::error::{invalid, Error, Result};
use crate::numkernel::Scalar;
use crate::seqmodel::{
    CoefficientRule, Edit, EditScript, FiniteSequence, RuleTerm, Truncation, VectorSequence,
};

/// Default `m` of parameterized entries.
pub const DEFAULT_M: usize = 2;

/// Default scale of `scaled-onb`.
pub const DEFAULT_SCALE: f64 = 2.0;

/// Off-diagonal entry of the triangular operator `T = I + α E₁₂` that turns
/// the standard basis into the Riesz basis `h_n = T e_n`.
pub const TRIANGULAR_ALPHA: f64 = 0.5;

pub const SCAN_SIZES: [usize; 4] = [4, 8, 16, 32];

/// A statement an entry is meant to exhibit, with its origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub statement: String,
    pub source: String,
}

/// Expected behaviour of the second sequence of a paired entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartnerExpectation {
    pub relation: Relation,
    pub defect_rank: usize,
    /// Defect rank of the other relation, when the entry pins it down.
    pub other_defect_rank: Option<usize>,
    pub biorthogonal: bool,
    pub partner_bessel: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryEntry {
    pub name: String,
    pub sequence: VectorSequence,
    pub partner: Option<VectorSequence>,
    pub expected_taxonomy: Taxonomy,
    pub partner_expectation: Option<PartnerExpectation>,
    pub claims: Vec<Claim>,
    pub suggested_truncations: Vec<Truncation>,
}

/// Entry names, sorted, with parameterized entries at their defaults.
pub fn list_names() -> Vec<String> {
    let mut names = vec![
        "duplicate-e1".to_string(),
        format!("dropped-head({DEFAULT_M})"),
        "mercedes-benz".to_string(),
        "odd-basis-with-growing-codual".to_string(),
        "onb".to_string(),
        format!("scaled-onb({DEFAULT_SCALE})"),
        format!("shifted-basis-pair({DEFAULT_M})"),
        format!("shifted-basis-pair-triangular({DEFAULT_M})"),
    ];
    names.sort();
    names
}

fn split_name(name: &str) -> Result<(&str, Option<&str>)> {
    let name = name.trim();
    match name.split_once('(') {
        None => Ok((name, None)),
        Some((base, rest)) => {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| invalid(format!("unbalanced parentheses in `{name}`")))?;
            Ok((base, Some(arg.trim())))
        }
    }
}

fn parse_m(arg: Option<&str>, min: usize) -> Result<usize> {
    let m = match arg {
        None => DEFAULT_M,
        Some(s) => s
            .parse()
            .map_err(|_| invalid(format!("`{s}` is not a nonnegative integer")))?,
    };
    if m < min {
        return Err(invalid(format!(
            "parameter must be at least {min}, got {m}"
        )));
    }
    Ok(m)
}

fn parse_scale(arg: Option<&str>) -> Result<f64> {
    let s = match arg {
        None => return Ok(DEFAULT_SCALE),
        Some(s) => s,
    };
    let x: f64 = s
        .parse()
        .map_err(|_| invalid(format!("`{s}` is not a number")))?;
    if !x.is_finite() || x == 0.0 {
        return Err(invalid("scale must be finite and nonzero"));
    }
    Ok(x)
}

fn claim(statement: &str, source: &str) -> Claim {
    Claim {
        statement: statement.into(),
        source: source.into(),
    }
}

fn exact(kernel: usize, corange: usize) -> Taxonomy {
    Taxonomy::from_invariants(
        true,
        true,
        Count::Finite(kernel),
        Count::Finite(corange),
        Provenance::Exact,
    )
}

fn rule(terms: Vec<RuleTerm>) -> Result<VectorSequence> {
    Ok(VectorSequence::make_rule(CoefficientRule::new(terms)?))
}

fn structured_schedule(s: &VectorSequence) -> Result<Vec<Truncation>> {
    schedule_for(s, &SCAN_SIZES)
}

/// Looks up an entry by name.
pub fn get(name: &str) -> Result<GalleryEntry> {
    let (base, arg) = split_name(name)?;
    let no_arg = |entry: Result<GalleryEntry>| match arg {
        Some(_) => Err(invalid(format!("`{base}` takes no parameter"))),
        None => entry,
    };
    match base {
        "duplicate-e1" => no_arg(duplicate_e1()),
        "mercedes-benz" => no_arg(mercedes_benz()),
        "onb" => no_arg(onb()),
        "odd-basis-with-growing-codual" => no_arg(odd_basis_with_growing_codual()),
        "dropped-head" => dropped_head(parse_m(arg, 1)?),
        "scaled-onb" => scaled_onb(parse_scale(arg)?),
        "shifted-basis-pair" => shifted_basis_pair(parse_m(arg, 1)?),
        "shifted-basis-pair-triangular" => shifted_basis_pair_triangular(parse_m(arg, 2)?),
        _ => Err(Error::NotFound(name.to_string())),
    }
}

fn duplicate_e1() -> Result<GalleryEntry> {
    let sequence = VectorSequence::make_structured(EditScript::new(vec![Edit::Replace {
        index: 2,
        vector: vec![Scalar::new(1.0, 0.0)],
    }]))?;
    Ok(GalleryEntry {
        name: "duplicate-e1".into(),
        suggested_truncations: structured_schedule(&sequence)?,
        sequence,
        partner: None,
        expected_taxonomy: exact(1, 1),
        partner_expectation: None,
        claims: vec![
            claim(
                "{e1, e1, e3, e4, ...} is neither a frame nor a Riesz sequence",
                "motivating example for pseudo-Riesz bases",
            ),
            claim(
                "removing one vector and adding e2 restores an orthonormal basis: excess 1, deficit 1",
                "motivating example for pseudo-Riesz bases",
            ),
        ],
    })
}

fn mercedes_benz() -> Result<GalleryEntry> {
    let vectors: Vec<Vec<f64>> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let t = deg.to_radians();
            vec![t.cos(), t.sin()]
        })
        .collect();
    let f = FiniteSequence::from_real(&vectors)?;
    let t = Truncation::new(f.len(), f.dim());
    Ok(GalleryEntry {
        name: "mercedes-benz".into(),
        sequence: VectorSequence::Finite(f),
        partner: None,
        expected_taxonomy: exact(1, 0),
        partner_expectation: None,
        claims: vec![claim(
            "three unit vectors at 120° form a tight frame with bound 3/2 and one redundant vector",
            "standard finite frame",
        )],
        suggested_truncations: vec![t],
    })
}

fn onb() -> Result<GalleryEntry> {
    let sequence = VectorSequence::standard_basis();
    Ok(GalleryEntry {
        name: "onb".into(),
        suggested_truncations: structured_schedule(&sequence)?,
        sequence,
        partner: None,
        expected_taxonomy: exact(0, 0),
        partner_expectation: None,
        claims: vec![claim(
            "the standard orthonormal basis is a Riesz basis",
            "definition",
        )],
    })
}

fn dropped_head(m: usize) -> Result<GalleryEntry> {
    let sequence = VectorSequence::make_structured(EditScript::drop_head(m))?;
    Ok(GalleryEntry {
        name: format!("dropped-head({m})"),
        suggested_truncations: structured_schedule(&sequence)?,
        sequence,
        partner: None,
        expected_taxonomy: exact(0, m),
        partner_expectation: None,
        claims: vec![claim(
            &format!("{{e_(n+{m})}} is a Riesz sequence whose span misses {m} directions"),
            "pseudo-frame that is not a frame",
        )],
    })
}

fn scaled_onb(lambda: f64) -> Result<GalleryEntry> {
    let sequence = rule(vec![RuleTerm::constant(1, 0, lambda)])?;
    Ok(GalleryEntry {
        name: format!("scaled-onb({lambda})"),
        suggested_truncations: structured_schedule(&sequence)?,
        sequence,
        partner: None,
        expected_taxonomy: Taxonomy::from_invariants(
            true,
            true,
            Count::Finite(0),
            Count::Finite(0),
            Provenance::TruncationExtrapolated,
        ),
        partner_expectation: None,
        claims: vec![claim(
            &format!(
                "{{{lambda}·e_n}} is a Riesz basis with bounds {0}",
                lambda * lambda
            ),
            "scaled orthonormal basis",
        )],
    })
}

fn odd_basis_with_growing_codual() -> Result<GalleryEntry> {
    let f = rule(vec![RuleTerm::constant(2, -1, 1.0)])?;
    let zero = Scalar::new(0.0, 0.0);
    let g = rule(vec![
        RuleTerm::constant(2, -1, 1.0),
        RuleTerm::new(2, 0, [zero, Scalar::new(1.0, 0.0), zero]),
    ])?;
    Ok(GalleryEntry {
        name: "odd-basis-with-growing-codual".into(),
        suggested_truncations: structured_schedule(&f)?,
        sequence: f,
        partner: Some(g),
        expected_taxonomy: Taxonomy::from_invariants(
            true,
            true,
            Count::Finite(0),
            Count::Unbounded,
            Provenance::TruncationExtrapolated,
        ),
        partner_expectation: Some(PartnerExpectation {
            relation: Relation::Codual,
            defect_rank: 0,
            other_defect_rank: None,
            biorthogonal: true,
            partner_bessel: false,
        }),
        claims: vec![
            claim(
                "f_n = e_(2n-1) is a Riesz sequence",
                "biorthogonal sequence that is not Bessel",
            ),
            claim(
                "g_n = e_(2n-1) + n·e_(2n) is biorthogonal to f, hence a pseudo-codual, but not Bessel",
                "biorthogonal sequence that is not Bessel",
            ),
        ],
    })
}

fn shifted_pair(
    name: String,
    m: usize,
    g_terms: Vec<RuleTerm>,
    extra: Claim,
) -> Result<GalleryEntry> {
    let f = VectorSequence::make_structured(EditScript::drop_head(m))?;
    let g = rule(g_terms)?;
    Ok(GalleryEntry {
        name,
        suggested_truncations: structured_schedule(&g)?,
        sequence: f,
        partner: Some(g),
        expected_taxonomy: exact(0, m),
        partner_expectation: Some(PartnerExpectation {
            relation: Relation::Codual,
            defect_rank: 0,
            other_defect_rank: Some(m),
            biorthogonal: true,
            partner_bessel: false,
        }),
        claims: vec![
            claim(
                &format!("f_i = h_({m}+i) is a pseudo-Riesz basis"),
                "pseudo-Riesz basis with a non-Bessel pseudo-dual",
            ),
            claim(
                &format!(
                    "g_i = h~_1 + h~_({m}+i) is biorthogonal to f and reconstructs on a subspace of codimension {m}"
                ),
                "pseudo-Riesz basis with a non-Bessel pseudo-dual",
            ),
            claim(
                "g is not Bessel: every g_i has the same component along h~_1",
                "pseudo-Riesz basis with a non-Bessel pseudo-dual",
            ),
            extra,
        ],
    })
}

fn shifted_basis_pair(m: usize) -> Result<GalleryEntry> {
    shifted_pair(
        format!("shifted-basis-pair({m})"),
        m,
        vec![
            RuleTerm::constant(0, 1, 1.0),
            RuleTerm::constant(1, m as i64, 1.0),
        ],
        claim("h is the standard basis, so h~ = h", "instance choice"),
    )
}

/// `h_n = T e_n` with `T = I + α E₁₂`, so `h~_1 = e_1 − α e_2` and
/// `h~_n = e_n` otherwise; for `m ≥ 2`, `f_i = h_(m+i) = e_(m+i)`.
fn shifted_basis_pair_triangular(m: usize) -> Result<GalleryEntry> {
    shifted_pair(
        format!("shifted-basis-pair-triangular({m})"),
        m,
        vec![
            RuleTerm::constant(0, 1, 1.0),
            RuleTerm::constant(0, 2, -TRIANGULAR_ALPHA),
            RuleTerm::constant(1, m as i64, 1.0),
        ],
        claim(
            &format!("h = (I + {TRIANGULAR_ALPHA}·E12) e, with biorthogonal h~ = (I − {TRIANGULAR_ALPHA}·E21) e"),
            "instance choice",
        ),
    )
}
