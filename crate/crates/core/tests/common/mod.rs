#![allow(dead_code)]

use frameforge::numkernel::{Field, Matrix, Scalar, TolerancePolicy};
use frameforge::sampling::{low_rank_matrix, seeded_rng};
use frameforge::seqmodel::{
    CoefficientRule, Edit, EditScript, FiniteSequence, RuleTerm, VectorSequence,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

pub fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

/// Shape, rank and field of a random synthesis matrix.
#[derive(Clone, Copy, Debug)]
pub struct MatrixRecipe {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub complex: bool,
    pub duplicate: bool,
    pub seed: u64,
}

impl MatrixRecipe {
    pub fn field(&self) -> Field {
        if self.complex {
            Field::Complex
        } else {
            Field::Real
        }
    }

    /// Random matrix of the recipe's rank; `duplicate` copies column 1 into the last column.
    pub fn build(&self) -> Matrix {
        let mut rng = seeded_rng(self.seed);
        let m = low_rank_matrix(&mut rng, self.rows, self.cols, self.rank, self.field());
        if self.duplicate && self.cols >= 2 {
            let mut d = m.into_dmatrix();
            let first = d.column(0).into_owned();
            d.set_column(self.cols - 1, &first);
            Matrix::from_dmatrix(d)
        } else {
            m
        }
    }

    pub fn sequence(&self) -> FiniteSequence {
        FiniteSequence::from_synthesis(self.build()).unwrap()
    }
}

pub fn recipe(max_rows: usize, max_cols: usize) -> impl Strategy<Value = MatrixRecipe> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(rows, cols)| {
            (
                Just(rows),
                Just(cols),
                0..=rows.min(cols),
                any::<bool>(),
                prop::bool::weighted(0.2),
                any::<u64>(),
            )
        })
        .prop_map(
            |(rows, cols, rank, complex, duplicate, seed)| MatrixRecipe {
                rows,
                cols,
                rank,
                complex,
                duplicate,
                seed,
            },
        )
}

/// Deterministic list of recipes drawn from one seed.
pub fn seeded_recipes(
    seed: u64,
    count: usize,
    max_rows: usize,
    max_cols: usize,
) -> Vec<MatrixRecipe> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let rows = rng.random_range(1..=max_rows);
            let cols = rng.random_range(1..=max_cols);
            MatrixRecipe {
                rows,
                cols,
                rank: rng.random_range(0..=rows.min(cols)),
                complex: rng.random_bool(0.5),
                duplicate: rng.random_bool(0.2),
                seed: rng.random(),
            }
        })
        .collect()
}

fn small_vector() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-2i32..=2, -1i32..=1), 1..=6).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Scalar::new(re as f64, im as f64 * 0.5))
            .collect()
    })
}

pub fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        (1usize..=6).prop_map(|index| Edit::Drop { index }),
        (1usize..=6, small_vector())
            .prop_map(|(position, vector)| Edit::Insert { position, vector }),
        (1usize..=6, small_vector()).prop_map(|(index, vector)| Edit::Replace { index, vector }),
    ]
}

/// Edit scripts that the model accepts, with their insert and drop counts.
pub fn edited_sequence() -> impl Strategy<Value = (VectorSequence, i64)> {
    prop::collection::vec(edit(), 0..=5).prop_filter_map("script rejected", |edits| {
        let inserts = edits
            .iter()
            .filter(|e| matches!(e, Edit::Insert { .. }))
            .count() as i64;
        let drops = edits
            .iter()
            .filter(|e| matches!(e, Edit::Drop { .. }))
            .count() as i64;
        VectorSequence::make_structured(EditScript::new(edits))
            .ok()
            .map(|s| (s, inserts - drops))
    })
}

fn rule_term() -> impl Strategy<Value = RuleTerm> {
    let coeff = prop_oneof![
        3 => (-3i32..=3).prop_map(|c| [c as f64, 0.0, 0.0]),
        1 => ((-2i32..=2), (-1i32..=1)).prop_map(|(c, d)| [c as f64, d as f64, 0.0]),
        1 => (-1i32..=1).prop_map(|e| [1.0, 0.0, e as f64]),
    ];
    (0i64..=3, -1i64..=3, coeff)
        .prop_map(|(a, b, c)| RuleTerm::new(a, b, c.map(|x| Scalar::new(x, 0.0))))
}

/// Coefficient rules that the model accepts.
pub fn rule_sequence() -> impl Strategy<Value = VectorSequence> {
    prop::collection::vec(rule_term(), 1..=3).prop_filter_map("rule rejected", |terms| {
        CoefficientRule::new(terms)
            .ok()
            .map(VectorSequence::make_rule)
    })
}

/// Hermitian eigendecomposition oracle: eigenvalues and eigenvectors of `A* A`.
pub fn gram_eigen(m: &Matrix) -> (Vec<f64>, DMatrix<Scalar>) {
    let a = m.as_dmatrix();
    let g = a.adjoint() * a;
    let eig = g.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Numeric rank from the eigen oracle, or `None` when some eigenvalue of
/// `A* A` sits in the zone where squared precision cannot decide.
pub fn oracle_rank(m: &Matrix) -> Option<usize> {
    let (values, _) = gram_eigen(m);
    classify_eigenvalues(&values).map(|zero| zero.iter().filter(|z| !**z).count())
}

fn classify_eigenvalues(values: &[f64]) -> Option<Vec<bool>> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Some(vec![true; values.len()]);
    }
    values
        .iter()
        .map(|&lambda| {
            let rel = lambda / top;
            if rel < 1e-13 {
                Some(true)
            } else if rel > 1e-11 {
                Some(false)
            } else {
                None
            }
        })
        .collect()
}

/// Orthogonal projection onto the null space from the eigen oracle, when decidable.
pub fn null_projection(m: &Matrix) -> Option<DMatrix<Scalar>> {
    let (values, vectors) = gram_eigen(m);
    let zero = classify_eigenvalues(&values)?;
    let n = m.cols();
    let mut p = DMatrix::<Scalar>::zeros(n, n);
    for (k, z) in zero.iter().enumerate() {
        if *z {
            let v = vectors.column(k);
            p += v * v.adjoint();
        }
    }
    Some(p)
}

/// Proptest configuration with a fixed seed and no regression files.
pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
