//! The λ-parametrization of volumes and the deficit-angle components ω.
//!
//! Values λ on the 20 two-faces generate all 15 tetrahedron volumes by the
//! alternating sum V_WXYZ = λ_XYZ − λ_WYZ + λ_WXZ − λ_WXY, which makes the
//! six boundary relations hold identically. [`solve_lambda`] inverts the map
//! up to gauge. The two ω components per central face (ABC, with the DEF
//! variant produced by mechanical σ-substitution) vanish exactly when the
//! volume table comes from an actual ℝ³ embedding; their exact partials with
//! respect to λ drive the rank counting here and the Jacobi determinants in
//! [`crate::jacobians`].

use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::{
    enumerate_faces, enumerate_tetras, DegenerateKey, FaceKey, VertexLabel,
};
use crate::geometry3::VolumeTable;
use crate::linalg;
use crate::scalars::{DualScalar, ExactScalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LambdaOmegaError {
    /// The volume table violates a boundary relation, so no λ exists.
    #[error("volume table violates the boundary relations")]
    InconsistentVolumes,
    /// A denominator volume of ω is zero.
    #[error("zero denominator volume in omega")]
    SingularOmega,
    /// The λ assignment is not a flat point.
    #[error("lambda assignment is not a flat point")]
    NotFlat,
}

/// One of the two central 2-faces of the move.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CentralFace {
    Abc,
    Def,
}

impl CentralFace {
    pub const BOTH: [CentralFace; 2] = [CentralFace::Abc, CentralFace::Def];

    pub fn face_key(self) -> FaceKey {
        use VertexLabel::*;
        let verts = match self {
            CentralFace::Abc => [A, B, C],
            CentralFace::Def => [D, E, F],
        };
        FaceKey::canonicalize(verts).expect("distinct").0
    }

    /// Identity for ABC, the σ involution for DEF: the DEF formulas are the
    /// ABC formulas with every index substituted.
    fn substitute(self, v: VertexLabel) -> VertexLabel {
        match self {
            CentralFace::Abc => v,
            CentralFace::Def => v.relabel(),
        }
    }
}

impl std::fmt::Display for CentralFace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.face_key())
    }
}

/// A value per canonical 2-face; permuted access picks up the permutation
/// sign, so λ is totally antisymmetric in its indices.
#[derive(Clone, PartialEq, Debug)]
pub struct LambdaAssignment<T = Scalar> {
    values: [T; 20],
}

impl<T: ExactScalar> LambdaAssignment<T> {
    pub fn zero() -> Self {
        LambdaAssignment {
            values: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn from_fn(mut f: impl FnMut(&FaceKey) -> T) -> Self {
        let faces = enumerate_faces();
        LambdaAssignment {
            values: std::array::from_fn(|i| f(&faces[i])),
        }
    }

    pub fn get(&self, key: &FaceKey) -> &T {
        &self.values[key.index()]
    }

    pub fn set(&mut self, key: &FaceKey, value: T) {
        self.values[key.index()] = value;
    }

    /// Value through an arbitrary ordering, with the permutation sign.
    pub fn signed(&self, tuple: [VertexLabel; 3]) -> Result<T, DegenerateKey> {
        let (key, sign) = FaceKey::canonicalize(tuple)?;
        Ok(sign.apply(self.get(&key).clone()))
    }

    /// Copy with `delta` added on one canonical face.
    pub fn perturbed(&self, face: &FaceKey, delta: &T) -> Self {
        let mut out = self.clone();
        out.set(face, self.get(face).clone() + delta.clone());
        out
    }
}

impl LambdaAssignment<Scalar> {
    /// Lifts to dual numbers, seeding the derivative direction at `active`.
    pub fn lift(&self, active: &FaceKey) -> LambdaAssignment<DualScalar> {
        LambdaAssignment::from_fn(|face| {
            DualScalar::lift(
                self.get(face).clone(),
                if face == active {
                    Scalar::one()
                } else {
                    Scalar::zero()
                },
            )
        })
    }
}

/// V_WXYZ = λ_XYZ − λ_WYZ + λ_WXZ − λ_WXY for every canonical tetrahedron.
/// The resulting table satisfies all six boundary relations identically.
pub fn volumes_from_lambda<T: ExactScalar>(lambda: &LambdaAssignment<T>) -> VolumeTable<T> {
    VolumeTable::from_fn(|tetra| {
        let mut acc = T::zero();
        for (face, sign) in tetra.boundary_faces() {
            acc = acc + sign.apply(lambda.get(&face).clone());
        }
        acc
    })
}

/// The 15×20 coefficient matrix of [`volumes_from_lambda`], tetrahedra in
/// enumeration order by faces in enumeration order. Rank 10.
pub fn lambda_volume_matrix() -> Vec<Vec<Scalar>> {
    enumerate_tetras()
        .iter()
        .map(|tetra| {
            let mut row = vec![Scalar::zero(); 20];
            for (face, sign) in tetra.boundary_faces() {
                row[face.index()] = sign.apply(Scalar::one());
            }
            row
        })
        .collect()
}

/// Rank over ℚ of the λ→V linear map (= 10: fifteen volumes cut by the five
/// independent boundary relations).
pub fn lambda_map_rank() -> usize {
    linalg::rank(&lambda_volume_matrix())
}

/// Inverts [`volumes_from_lambda`] in the gauge λ = 0 on the ten faces
/// containing A, solving the remaining 15×10 system exactly. Fails with
/// `InconsistentVolumes` when the table violates a boundary relation. Should
/// the gauge system ever come back underdetermined, the exact least-norm
/// solution of the full 15×20 system is used instead.
pub fn solve_lambda(vt: &VolumeTable<Scalar>) -> Result<LambdaAssignment<Scalar>, LambdaOmegaError> {
    let faces = enumerate_faces();
    let free: Vec<&FaceKey> = faces
        .iter()
        .filter(|f| !f.contains(VertexLabel::A))
        .collect();
    debug_assert_eq!(free.len(), 10);

    let matrix: Vec<Vec<Scalar>> = enumerate_tetras()
        .iter()
        .map(|tetra| {
            let mut row = vec![Scalar::zero(); free.len()];
            for (face, sign) in tetra.boundary_faces() {
                if let Some(col) = free.iter().position(|f| **f == face) {
                    row[col] = sign.apply(Scalar::one());
                }
            }
            row
        })
        .collect();
    let rhs: Vec<Scalar> = enumerate_tetras()
        .iter()
        .map(|t| vt.get(t).clone())
        .collect();

    let solution = match linalg::solve(&matrix, &rhs) {
        linalg::Solve::Unique(x) => x,
        linalg::Solve::Inconsistent => return Err(LambdaOmegaError::InconsistentVolumes),
        linalg::Solve::Underdetermined(_) => return least_norm_lambda(vt),
    };

    let mut lambda = LambdaAssignment::zero();
    for (col, face) in free.iter().enumerate() {
        lambda.set(face, solution[col].clone());
    }
    debug_assert_eq!(&volumes_from_lambda(&lambda), vt);
    Ok(lambda)
}

/// Exact minimum-norm preimage of the full 15×20 λ→V system — the gauge-free
/// fallback. Unlike [`solve_lambda`] it spreads λ over all 20 faces.
pub fn least_norm_lambda(
    vt: &VolumeTable<Scalar>,
) -> Result<LambdaAssignment<Scalar>, LambdaOmegaError> {
    let matrix = lambda_volume_matrix();
    let rhs: Vec<Scalar> = enumerate_tetras()
        .iter()
        .map(|t| vt.get(t).clone())
        .collect();
    let x = linalg::least_norm_solve(&matrix, &rhs)
        .ok_or(LambdaOmegaError::InconsistentVolumes)?;
    let faces = enumerate_faces();
    let mut lambda = LambdaAssignment::zero();
    for (i, face) in faces.iter().enumerate() {
        lambda.set(face, x[i].clone());
    }
    if &volumes_from_lambda(&lambda) != vt {
        return Err(LambdaOmegaError::InconsistentVolumes);
    }
    Ok(lambda)
}

/// The two deficit-angle components at a central face.
#[derive(Clone, PartialEq, Debug)]
pub struct OmegaPair<T = Scalar> {
    pub w1: T,
    pub w2: T,
    pub face: CentralFace,
}

impl<T: ExactScalar> OmegaPair<T> {
    pub fn is_zero(&self) -> bool {
        self.w1.is_zero() && self.w2.is_zero()
    }
}

/// One ω term: (negated, numerator tuple, denominator tuples).
type OmegaTerm = (
    bool,
    [VertexLabel; 4],
    [VertexLabel; 4],
    [VertexLabel; 4],
);

/// Index patterns of the ω components for face ABC. Each term is
/// sign · V(num) / (V(den1)·V(den2)); the DEF variant substitutes σ into
/// every tuple and lets canonicalization supply the permutation signs.
const OMEGA_W1_TERMS: [OmegaTerm; 3] = {
    use VertexLabel::*;
    [
        (true, [B, C, D, E], [A, B, C, D], [A, B, C, E]),
        (true, [B, C, E, F], [A, B, C, E], [A, B, C, F]),
        (false, [B, C, D, F], [A, B, C, F], [A, B, C, D]),
    ]
};

const OMEGA_W2_TERMS: [OmegaTerm; 3] = {
    use VertexLabel::*;
    [
        (false, [A, C, D, E], [A, B, C, D], [A, B, C, E]),
        (false, [A, C, E, F], [A, B, C, E], [A, B, C, F]),
        (true, [A, C, D, F], [A, B, C, F], [A, B, C, D]),
    ]
};

/// The deficit-angle components of `face` on a volume table:
///
/// ```text
/// ω⁽¹⁾_ABC = −V_BCDE/(V_ABCD·V_ABCE) − V_BCEF/(V_ABCE·V_ABCF) + V_BCDF/(V_ABCF·V_ABCD)
/// ω⁽²⁾_ABC = +V_ACDE/(V_ABCD·V_ABCE) + V_ACEF/(V_ABCE·V_ABCF) − V_ACDF/(V_ABCF·V_ABCD)
/// ```
///
/// and the σ-relabeled pair for DEF. Both components vanish exactly on
/// tables built from a [`crate::geometry3::Configuration3`].
pub fn omega<T: ExactScalar>(
    face: CentralFace,
    vt: &VolumeTable<T>,
) -> Result<OmegaPair<T>, LambdaOmegaError> {
    let lookup = |tuple: [VertexLabel; 4]| -> T {
        vt.signed(tuple.map(|v| face.substitute(v)))
            .expect("patterns are duplicate-free")
    };
    let eval = |terms: &[OmegaTerm; 3]| {
        let mut acc = T::zero();
        for (negate, num, den1, den2) in terms {
            let den = lookup(*den1) * lookup(*den2);
            let term = lookup(*num)
                .checked_div(&den)
                .map_err(|_| LambdaOmegaError::SingularOmega)?;
            acc = if *negate { acc - term } else { acc + term };
        }
        Ok(acc)
    };
    Ok(OmegaPair {
        w1: eval(&OMEGA_W1_TERMS)?,
        w2: eval(&OMEGA_W2_TERMS)?,
        face,
    })
}

/// ω as a function of λ: the composition with [`volumes_from_lambda`],
/// generic over the scalar type so the same code runs on [`DualScalar`] for
/// exact partials (and on the test oracle's expression trees).
pub fn omega_of_lambda<T: ExactScalar>(
    face: CentralFace,
    lambda: &LambdaAssignment<T>,
) -> Result<OmegaPair<T>, LambdaOmegaError> {
    omega(face, &volumes_from_lambda(lambda))
}

/// All four ω components vanish at λ.
pub fn is_flat(lambda: &LambdaAssignment<Scalar>) -> Result<bool, LambdaOmegaError> {
    let vt = volumes_from_lambda(lambda);
    Ok(omega(CentralFace::Abc, &vt)?.is_zero() && omega(CentralFace::Def, &vt)?.is_zero())
}

/// Exact partials of both ω components of `face` with respect to one λ.
pub fn omega_partials(
    face: CentralFace,
    lambda: &LambdaAssignment<Scalar>,
    with_respect_to: &FaceKey,
) -> Result<(Scalar, Scalar), LambdaOmegaError> {
    let pair = omega_of_lambda(face, &lambda.lift(with_respect_to))?;
    Ok((
        pair.w1.derivative().clone(),
        pair.w2.derivative().clone(),
    ))
}

/// The 4×20 matrix of exact partials of (ω⁽¹⁾_ABC, ω⁽²⁾_ABC, ω⁽¹⁾_DEF,
/// ω⁽²⁾_DEF) with respect to the 20 λ values, in face enumeration order.
pub fn omega_jacobian_matrix(
    lambda: &LambdaAssignment<Scalar>,
) -> Result<Vec<Vec<Scalar>>, LambdaOmegaError> {
    let faces = enumerate_faces();
    let mut rows: Vec<Vec<Scalar>> = (0..4).map(|_| Vec::with_capacity(20)).collect();
    for face_var in faces.iter() {
        let (a1, a2) = omega_partials(CentralFace::Abc, lambda, face_var)?;
        let (d1, d2) = omega_partials(CentralFace::Def, lambda, face_var)?;
        rows[0].push(a1);
        rows[1].push(a2);
        rows[2].push(d1);
        rows[3].push(d2);
    }
    Ok(rows)
}

/// Rank over ℚ of the flatness conditions at a flat point: the number of
/// independent constraints the four ω components impose on λ. Expected 3 at
/// generic flat points.
pub fn flatness_rank(lambda: &LambdaAssignment<Scalar>) -> Result<usize, LambdaOmegaError> {
    if !is_flat(lambda)? {
        return Err(LambdaOmegaError::NotFlat);
    }
    Ok(linalg::rank(&omega_jacobian_matrix(lambda)?))
}
