//! Vector sequences and their finite sections.
//!
//! Three kinds of sequence are supported:
//!
//! * [`FiniteSequence`]: finitely many vectors in ℂᵈ, stored as the
//!   synthesis matrix (vectors are columns).
//! * [`EditedBasis`]: the standard basis `{e_n}` of ℓ² after finitely many
//!   drops, inserts and replacements. These agree with a shifted standard
//!   basis co-finitely and can be classified exactly.
//! * [`CoefficientRule`]: `f_n = Σ_j p_j(n) e_{a_j n + b_j}` with affine
//!   indices and polynomial coefficients of degree at most two.
//!
//! Sequence positions and basis indices are 1-based everywhere in this
//! module, matching the usual `f_1, f_2, …` notation.

use std::collections::BTreeSet;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numkernel::{Field, Matrix, Scalar};

const ZERO: Scalar = Scalar::new(0.0, 0.0);
const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Finitely supported vector of ℓ², keyed by 1-based basis index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVector {
    /// Builds from (index, coefficient) pairs; zero coefficients are dropped
    /// and repeated indices are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut entries: Vec<(usize, Scalar)> = Vec::new();
        let mut sorted: Vec<_> = pairs.into_iter().collect();
        sorted.sort_by_key(|(i, _)| *i);
        for (i, c) in sorted {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => entries.push((i, c)),
            }
        }
        entries.retain(|(_, c)| *c != ZERO);
        SparseVector { entries }
    }

    /// The standard basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        SparseVector {
            entries: vec![(k, ONE)],
        }
    }

    /// Dense coordinates `(c_1, …, c_d)`.
    pub fn from_dense(coords: &[Scalar]) -> Self {
        Self::from_pairs(coords.iter().enumerate().map(|(i, c)| (i + 1, *c)))
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    /// Largest basis index carrying a nonzero coefficient, 0 for the zero vector.
    pub fn support_max(&self) -> usize {
        self.entries.last().map(|(i, _)| *i).unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn is_basis_vector(&self, k: usize) -> bool {
        self.entries.len() == 1 && self.entries[0] == (k, ONE)
    }

    pub fn field(&self) -> Field {
        Field::of(self.entries.iter().map(|(_, c)| c))
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        Self::from_pairs(
            self.entries
                .iter()
                .copied()
                .chain(other.entries.iter().map(|(i, c)| (*i, -*c))),
        )
    }

    /// Projection onto the first `d` coordinates; the flag reports whether
    /// nonzero coefficients were cut off.
    pub fn project(&self, d: usize) -> (DVector<Scalar>, bool) {
        let mut out = DVector::zeros(d);
        let mut lossy = false;
        for &(i, c) in &self.entries {
            if i <= d {
                out[i - 1] = c;
            } else {
                lossy = true;
            }
        }
        (out, lossy)
    }

    /// Dense coefficients up to the last nonzero one.
    pub fn to_dense(&self) -> Vec<Scalar> {
        self.project(self.support_max()).0.iter().copied().collect()
    }
}

/// Finitely many vectors in ℂᵈ, stored as the `d x n` synthesis matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSequence {
    synthesis: Matrix,
}

impl FiniteSequence {
    /// Sequence from coefficient vectors of equal length.
    pub fn new(vectors: &[Vec<Scalar>]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(invalid("a finite sequence needs at least one vector"));
        };
        let dim = first.len();
        let columns: Vec<DVector<Scalar>> = vectors
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if v.len() == dim {
                    Ok(DVector::from_column_slice(v))
                } else {
                    Err(invalid(format!(
                        "vector {} has length {}, expected {dim}",
                        j + 1,
                        v.len()
                    )))
                }
            })
            .collect::<Result<_>>()?;
        Self::from_synthesis(Matrix::from_columns(dim, &columns)?)
    }

    pub fn from_real(vectors: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Scalar>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| Scalar::new(x, 0.0)).collect())
            .collect();
        Self::new(&complex)
    }

    pub fn from_synthesis(synthesis: Matrix) -> Result<Self> {
        if !synthesis.all_finite() {
            return Err(invalid("sequence has non-finite coefficients"));
        }
        Ok(FiniteSequence { synthesis })
    }

    /// The empty sequence in ℂᵈ.
    pub fn empty(dim: usize) -> Self {
        FiniteSequence {
            synthesis: Matrix::zeros(dim, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.synthesis.rows()
    }

    pub fn len(&self) -> usize {
        self.synthesis.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn field(&self) -> Field {
        self.synthesis.field()
    }

    pub fn synthesis(&self) -> &Matrix {
        &self.synthesis
    }

    /// The `n`-th vector (1-based).
    pub fn vector(&self, n: usize) -> Result<DVector<Scalar>> {
        if n == 0 || n > self.len() {
            return Err(Error::OutOfRange {
                index: n,
                len: self.len(),
            });
        }
        Ok(self.synthesis.column(n - 1))
    }

    pub fn vectors(&self) -> Vec<Vec<Scalar>> {
        self.synthesis
            .columns()
            .into_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// The sequence followed by the columns of `extra`.
    pub fn appended(&self, extra: &Matrix) -> Result<Self> {
        Self::from_synthesis(self.synthesis.hstack(extra)?)
    }

    /// The sequence with the given 1-based positions removed.
    pub fn without(&self, positions: &[usize]) -> Result<Self> {
        if let Some(&p) = positions.iter().find(|&&p| p == 0 || p > self.len()) {
            return Err(Error::OutOfRange {
                index: p,
                len: self.len(),
            });
        }
        let zero_based: Vec<usize> = positions.iter().map(|p| p - 1).collect();
        Ok(FiniteSequence {
            synthesis: self.synthesis.remove_columns(&zero_based),
        })
    }
}

/// One step of an edit script over the standard basis.
///
/// `Drop` and `Replace` address positions of the original basis;
/// `Insert` positions address the sequence after drops and replacements,
/// with inserts applied left to right.
#[derive(Clone, Debug, PartialEq)]
pub enum Edit {
    Drop {
        index: usize,
    },
    Insert {
        position: usize,
        vector: Vec<Scalar>,
    },
    Replace {
        index: usize,
        vector: Vec<Scalar>,
    },
}

/// An ordered list of edits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EditScript {
    pub edits: Vec<Edit>,
}

impl EditScript {
    pub fn new(edits: Vec<Edit>) -> Self {
        EditScript { edits }
    }

    /// Drops positions `1..=m`.
    pub fn drop_head(m: usize) -> Self {
        EditScript::new((1..=m).map(|index| Edit::Drop { index }).collect())
    }
}

/// The standard basis after an edit script, kept in normal form:
/// `f_n = head[n]` for `n ≤ head.len()`, and `f_n = e_{tail_start + n - head.len() - 1}` after.
#[derive(Clone, Debug)]
pub struct EditedBasis {
    script: EditScript,
    head: Vec<SparseVector>,
    tail_start: usize,
}

impl PartialEq for EditedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.tail_start == other.tail_start
    }
}

impl EditedBasis {
    pub fn new(script: EditScript) -> Result<Self> {
        let mut dropped = BTreeSet::new();
        let mut replaced = std::collections::BTreeMap::new();
        let mut inserts = Vec::new();
        for edit in &script.edits {
            match edit {
                Edit::Drop { index } => {
                    if *index == 0 {
                        return Err(invalid("drop index must be positive"));
                    }
                    if !dropped.insert(*index) {
                        return Err(invalid(format!("position {index} dropped twice")));
                    }
                }
                Edit::Replace { index, vector } => {
                    if *index == 0 {
                        return Err(invalid("replace index must be positive"));
                    }
                    check_coefficients(vector)?;
                    if replaced
                        .insert(*index, SparseVector::from_dense(vector))
                        .is_some()
                    {
                        return Err(invalid(format!("position {index} replaced twice")));
                    }
                }
                Edit::Insert { position, vector } => {
                    if *position == 0 {
                        return Err(invalid("insert position must be positive"));
                    }
                    check_coefficients(vector)?;
                    inserts.push((*position, SparseVector::from_dense(vector)));
                }
            }
        }
        if let Some(i) = dropped.iter().find(|i| replaced.contains_key(i)) {
            return Err(invalid(format!(
                "position {i} is both dropped and replaced"
            )));
        }

        let reach = dropped
            .iter()
            .chain(replaced.keys())
            .copied()
            .max()
            .unwrap_or(0);
        let mut head: Vec<SparseVector> = (1..=reach)
            .filter(|i| !dropped.contains(i))
            .map(|i| {
                replaced
                    .remove(&i)
                    .unwrap_or_else(|| SparseVector::basis(i))
            })
            .collect();
        let mut tail_start = reach + 1;

        for (position, vector) in inserts {
            while head.len() < position - 1 {
                head.push(SparseVector::basis(tail_start));
                tail_start += 1;
            }
            head.insert(position - 1, vector);
        }

        while tail_start > 1
            && head
                .last()
                .is_some_and(|v| v.is_basis_vector(tail_start - 1))
        {
            head.pop();
            tail_start -= 1;
        }

        Ok(EditedBasis {
            script,
            head,
            tail_start,
        })
    }

    pub fn script(&self) -> &EditScript {
        &self.script
    }

    /// Vectors before the tail takes over.
    pub fn head(&self) -> &[SparseVector] {
        &self.head
    }

    /// Number of leading vectors that differ from the shifted basis.
    pub fn horizon(&self) -> usize {
        self.head.len()
    }

    /// Basis index of the first tail vector.
    pub fn tail_start(&self) -> usize {
        self.tail_start
    }

    /// `k` with `f_n = e_{n+k}` for every `n` past the horizon.
    pub fn shift(&self) -> i64 {
        self.tail_start as i64 - self.head.len() as i64 - 1
    }

    pub fn vector(&self, n: usize) -> SparseVector {
        if n <= self.head.len() {
            self.head[n - 1].clone()
        } else {
            SparseVector::basis(self.tail_start + n - self.head.len() - 1)
        }
    }

    /// Largest basis index touched by the head or skipped before the tail.
    pub fn head_reach(&self) -> usize {
        self.head
            .iter()
            .map(SparseVector::support_max)
            .max()
            .unwrap_or(0)
            .max(self.tail_start - 1)
    }
}

fn check_coefficients(v: &[Scalar]) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(invalid("coefficients must be finite"))
    }
}

/// Basis index `a·n + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineIndex {
    pub a: i64,
    pub b: i64,
}

impl AffineIndex {
    pub fn at(&self, n: usize) -> usize {
        (self.a * n as i64 + self.b) as usize
    }
}

/// Coefficient polynomial `c0 + c1·n + c2·n²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientPoly(pub [Scalar; 3]);

impl CoefficientPoly {
    pub fn constant(c: Scalar) -> Self {
        CoefficientPoly([c, ZERO, ZERO])
    }

    pub fn at(&self, n: usize) -> Scalar {
        let x = n as f64;
        self.0[0] + self.0[1] * x + self.0[2] * x * x
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.0[1] == ZERO && self.0[2] == ZERO
    }

    pub fn sub(&self, other: &CoefficientPoly) -> CoefficientPoly {
        CoefficientPoly([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }

    pub fn add(&self, other: &CoefficientPoly) -> CoefficientPoly {
        CoefficientPoly([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }
}

/// One term `p(n) · e_{a n + b}` of a coefficient rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleTerm {
    pub index: AffineIndex,
    pub coeff: CoefficientPoly,
}

impl RuleTerm {
    pub fn new(a: i64, b: i64, coeff: [Scalar; 3]) -> Self {
        RuleTerm {
            index: AffineIndex { a, b },
            coeff: CoefficientPoly(coeff),
        }
    }

    /// Real constant coefficient.
    pub fn constant(a: i64, b: i64, c: f64) -> Self {
        Self::new(a, b, [Scalar::new(c, 0.0), ZERO, ZERO])
    }
}

/// `f_n = Σ_j p_j(n) e_{a_j n + b_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRule {
    terms: Vec<RuleTerm>,
}

impl CoefficientRule {
    pub fn new(terms: Vec<RuleTerm>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            let AffineIndex { a, b } = t.index;
            if a < 0 || a + b < 1 {
                return Err(invalid(format!(
                    "term {}: index {a}·n{b:+} must stay positive for every n ≥ 1",
                    k + 1
                )));
            }
            if t.coeff
                .0
                .iter()
                .any(|z| !(z.re.is_finite() && z.im.is_finite()))
            {
                return Err(invalid(format!("term {}: non-finite coefficient", k + 1)));
            }
        }
        for (i, s) in terms.iter().enumerate() {
            for (j, t) in terms.iter().enumerate().skip(i + 1) {
                if let Some(n) = collision(s.index, t.index) {
                    return Err(invalid(format!(
                        "terms {} and {} hit the same basis index {} at n = {n}",
                        i + 1,
                        j + 1,
                        s.index.at(n)
                    )));
                }
            }
        }
        Ok(CoefficientRule { terms })
    }

    pub fn terms(&self) -> &[RuleTerm] {
        &self.terms
    }

    pub fn vector(&self, n: usize) -> SparseVector {
        SparseVector::from_pairs(self.terms.iter().map(|t| (t.index.at(n), t.coeff.at(n))))
    }

    pub fn field(&self) -> Field {
        Field::of(self.terms.iter().flat_map(|t| t.coeff.0.iter()))
    }
}

/// First `n ≥ 1` where two affine indices coincide, if any.
fn collision(s: AffineIndex, t: AffineIndex) -> Option<usize> {
    if s.a == t.a {
        return (s.b == t.b).then_some(1);
    }
    let num = t.b - s.b;
    let den = s.a - t.a;
    (num % den == 0 && num / den >= 1).then(|| (num / den) as usize)
}

/// The form a structured sequence takes eventually: `f_n = Σ terms` for `n > horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct EventualForm {
    pub horizon: usize,
    pub terms: Vec<RuleTerm>,
}

/// A vector sequence of any supported kind.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorSequence {
    Finite(FiniteSequence),
    Edited(EditedBasis),
    Rule(CoefficientRule),
}

/// Coarse kind, as reported in file formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Finite,
    Structured,
}

/// Coordinates of one vector after projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coords: DVector<Scalar>,
    pub lossy: bool,
}

/// First `n_vectors` vectors projected onto the first `d_coords` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_vectors: usize,
    pub d_coords: usize,
}

impl Truncation {
    pub fn new(n_vectors: usize, d_coords: usize) -> Self {
        Truncation {
            n_vectors,
            d_coords,
        }
    }

    /// Smallest `d_coords` that keeps every coefficient of the first `n` vectors.
    pub fn lossless(s: &VectorSequence, n_vectors: usize) -> Result<Self> {
        Ok(Truncation {
            n_vectors,
            d_coords: s.lossless_dim(n_vectors)?,
        })
    }
}

/// Synthesis matrix of a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub matrix: Matrix,
    pub lossy: bool,
}

impl VectorSequence {
    pub fn make_finite(vectors: &[Vec<Scalar>]) -> Result<Self> {
        FiniteSequence::new(vectors).map(VectorSequence::Finite)
    }

    pub fn make_structured(script: EditScript) -> Result<Self> {
        EditedBasis::new(script).map(VectorSequence::Edited)
    }

    pub fn make_rule(rule: CoefficientRule) -> Self {
        VectorSequence::Rule(rule)
    }

    /// The standard orthonormal basis of ℓ².
    pub fn standard_basis() -> Self {
        VectorSequence::Edited(EditedBasis::new(EditScript::default()).expect("empty script"))
    }

    pub fn kind(&self) -> SequenceKind {
        match self {
            VectorSequence::Finite(_) => SequenceKind::Finite,
            _ => SequenceKind::Structured,
        }
    }

    /// Number of vectors, `None` for infinite sequences.
    pub fn len(&self) -> Option<usize> {
        match self {
            VectorSequence::Finite(f) => Some(f.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn field(&self) -> Field {
        match self {
            VectorSequence::Finite(f) => f.field(),
            VectorSequence::Edited(e) => e
                .head()
                .iter()
                .map(SparseVector::field)
                .fold(Field::Real, Field::join),
            VectorSequence::Rule(r) => r.field(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSequence> {
        match self {
            VectorSequence::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// The `n`-th vector (1-based) as a sparse vector.
    pub fn sparse_vector(&self, n: usize) -> Result<SparseVector> {
        if n == 0 {
            return Err(invalid("sequence positions start at 1"));
        }
        match self {
            VectorSequence::Finite(f) => {
                let v = f.vector(n)?;
                Ok(SparseVector::from_dense(v.as_slice()))
            }
            VectorSequence::Edited(e) => Ok(e.vector(n)),
            VectorSequence::Rule(r) => Ok(r.vector(n)),
        }
    }

    /// The `n`-th vector projected onto the first `d_coords` coordinates.
    pub fn vector_at(&self, n: usize, d_coords: usize) -> Result<Projection> {
        let (coords, lossy) = self.sparse_vector(n)?.project(d_coords);
        Ok(Projection { coords, lossy })
    }

    /// Coordinates needed to hold the first `n_vectors` vectors without loss.
    ///
    /// For a finite sequence this is its ambient dimension.
    pub fn lossless_dim(&self, n_vectors: usize) -> Result<usize> {
        match self {
            VectorSequence::Finite(f) => {
                if n_vectors > f.len() {
                    return Err(Error::OutOfRange {
                        index: n_vectors,
                        len: f.len(),
                    });
                }
                Ok(f.dim())
            }
            _ => Ok((1..=n_vectors)
                .map(|n| self.sparse_vector(n).map(|v| v.support_max()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0)),
        }
    }

    /// `d_coords x n_vectors` synthesis matrix of the truncation.
    pub fn truncate(&self, t: Truncation) -> Result<Section> {
        if let VectorSequence::Finite(f) = self {
            if t.n_vectors > f.len() {
                return Err(Error::OutOfRange {
                    index: t.n_vectors,
                    len: f.len(),
                });
            }
        }
        let mut lossy = false;
        let mut columns = Vec::with_capacity(t.n_vectors);
        for n in 1..=t.n_vectors {
            let p = self.vector_at(n, t.d_coords)?;
            lossy |= p.lossy;
            columns.push(p.coords);
        }
        Ok(Section {
            matrix: Matrix::from_columns(t.d_coords, &columns)?,
            lossy,
        })
    }

    /// Eventual rule form of a structured sequence; `None` for finite sequences.
    pub fn eventual_form(&self) -> Option<EventualForm> {
        match self {
            VectorSequence::Finite(_) => None,
            VectorSequence::Edited(e) => Some(EventualForm {
                horizon: e.horizon(),
                terms: vec![RuleTerm::constant(1, e.shift(), 1.0)],
            }),
            VectorSequence::Rule(r) => Some(EventualForm {
                horizon: 0,
                terms: r.terms().to_vec(),
            }),
        }
    }
}
