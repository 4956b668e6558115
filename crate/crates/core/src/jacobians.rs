//! Jacobi determinants of the ω components and the main 3→3 relation.
//!
//! At a flat point, J_{face,i} is the 2×2 determinant of exact partials of
//! (ω⁽¹⁾, ω⁽²⁾) of a central face with respect to (λ_face, λ_i), where i is
//! any of the 18 admissible aux faces. The ratio J_ABC,i / J_DEF,i does not
//! depend on i — checked here in cross-multiplied form — and the main
//! relation ties the two sides of the move together:
//!
//! ```text
//! (V_ABCD·V_ABCE·V_ABCF)² · J_ABC,i = (V_ADEF·V_BDEF·V_CDEF)² · J_DEF,i
//! ```
//!
//! Everything is exact; residuals are literal rational zeros.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::{enumerate_faces, FaceKey, VertexLabel};
use crate::lambda_omega::{
    is_flat, omega_partials, volumes_from_lambda, CentralFace, LambdaAssignment, LambdaOmegaError,
};
use crate::scalars::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum JacobiError {
    /// The λ assignment is not a flat point.
    #[error("lambda assignment is not a flat point")]
    NotFlat,
    /// A denominator volume of ω is zero.
    #[error("zero denominator volume in omega")]
    SingularOmega,
    /// The aux face must differ from both ABC and DEF.
    #[error("aux face must differ from ABC and DEF")]
    BadAuxFace,
}

impl From<LambdaOmegaError> for JacobiError {
    fn from(e: LambdaOmegaError) -> Self {
        match e {
            LambdaOmegaError::NotFlat => JacobiError::NotFlat,
            LambdaOmegaError::SingularOmega => JacobiError::SingularOmega,
            // jacobian code never inverts the λ→V map
            LambdaOmegaError::InconsistentVolumes => unreachable!("no λ solve on this path"),
        }
    }
}

/// A Jacobi determinant J_{face,aux_face} evaluated at a flat point.
#[derive(Clone, PartialEq, Debug)]
pub struct JacobiValue {
    pub face: CentralFace,
    pub aux_face: FaceKey,
    pub value: Scalar,
}

/// The 18 faces admissible as the aux index: everything but ABC and DEF.
pub fn admissible_aux_faces() -> Vec<FaceKey> {
    let abc = CentralFace::Abc.face_key();
    let def = CentralFace::Def.face_key();
    enumerate_faces()
        .iter()
        .copied()
        .filter(|f| *f != abc && *f != def)
        .collect()
}

fn check_aux(aux: &FaceKey) -> Result<(), JacobiError> {
    if *aux == CentralFace::Abc.face_key() || *aux == CentralFace::Def.face_key() {
        return Err(JacobiError::BadAuxFace);
    }
    Ok(())
}

/// J without the flatness precondition check; callers verify it once.
fn jacobi_at(
    face: CentralFace,
    aux: &FaceKey,
    lambda: &LambdaAssignment<Scalar>,
) -> Result<Scalar, JacobiError> {
    // two dual passes: seed λ_face, then seed λ_aux
    let (c1w1, c1w2) = omega_partials(face, lambda, &face.face_key())?;
    let (c2w1, c2w2) = omega_partials(face, lambda, aux)?;
    Ok(c1w1 * c2w2 - c2w1 * c1w2)
}

/// The 2×2 determinant of partials of (ω⁽¹⁾_face, ω⁽²⁾_face) with respect to
/// (λ_face, λ_aux), at a flat point.
pub fn jacobi(
    face: CentralFace,
    aux: &FaceKey,
    lambda: &LambdaAssignment<Scalar>,
) -> Result<JacobiValue, JacobiError> {
    check_aux(aux)?;
    if !is_flat(lambda)? {
        return Err(JacobiError::NotFlat);
    }
    Ok(JacobiValue {
        face,
        aux_face: *aux,
        value: jacobi_at(face, aux, lambda)?,
    })
}

/// A violated pair equality J_ABC,i·J_DEF,j = J_ABC,j·J_DEF,i.
#[derive(Clone, PartialEq, Debug)]
pub struct RatioViolation {
    pub face_i: FaceKey,
    pub face_j: FaceKey,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct RatioIndependenceReport {
    pub pairs_checked: usize,
    pub violations: Vec<RatioViolation>,
    /// Aux faces whose J vanished, per central face; the cross-multiplied
    /// equalities still evaluate there, but they are flagged separately.
    pub zero_jacobians: Vec<(CentralFace, FaceKey)>,
}

impl RatioIndependenceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies J_ABC,i·J_DEF,j = J_ABC,j·J_DEF,i exactly for all C(18,2) pairs
/// of admissible aux faces — the i-independence of the ratio, with no
/// division so zero Jacobians stay meaningful.
pub fn check_ratio_independence(
    lambda: &LambdaAssignment<Scalar>,
) -> Result<RatioIndependenceReport, JacobiError> {
    if !is_flat(lambda)? {
        return Err(JacobiError::NotFlat);
    }
    let aux = admissible_aux_faces();
    let j_abc: Vec<Scalar> = aux
        .iter()
        .map(|i| jacobi_at(CentralFace::Abc, i, lambda))
        .collect::<Result<_, _>>()?;
    let j_def: Vec<Scalar> = aux
        .iter()
        .map(|i| jacobi_at(CentralFace::Def, i, lambda))
        .collect::<Result<_, _>>()?;

    let mut report = RatioIndependenceReport::default();
    for (k, i) in aux.iter().enumerate() {
        if j_abc[k].is_zero() {
            report.zero_jacobians.push((CentralFace::Abc, *i));
        }
        if j_def[k].is_zero() {
            report.zero_jacobians.push((CentralFace::Def, *i));
        }
    }
    for a in 0..aux.len() {
        for b in (a + 1)..aux.len() {
            let lhs = j_abc[a].clone() * j_def[b].clone();
            let rhs = j_abc[b].clone() * j_def[a].clone();
            if lhs != rhs {
                report.violations.push(RatioViolation {
                    face_i: aux[a],
                    face_j: aux[b],
                    lhs,
                    rhs,
                });
            }
            report.pairs_checked += 1;
        }
    }
    Ok(report)
}

/// Residual of the main relation at aux face i with the volume products
/// raised to `exponent`:
///
/// ```text
/// (V_ABCD·V_ABCE·V_ABCF)^e · J_ABC,i − (V_ADEF·V_BDEF·V_CDEF)^e · J_DEF,i
/// ```
///
/// Zero for every flat point at the true exponent 2; generically nonzero at
/// 1 or 3, which guards the test harness against vacuity.
pub fn main_relation_residual(
    lambda: &LambdaAssignment<Scalar>,
    aux: &FaceKey,
    exponent: u32,
) -> Result<Scalar, JacobiError> {
    check_aux(aux)?;
    if !is_flat(lambda)? {
        return Err(JacobiError::NotFlat);
    }
    let (p_abc, p_def) = volume_products(lambda);
    let pow = |base: Scalar| -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..exponent {
            acc = acc * base.clone();
        }
        acc
    };
    let j_abc = jacobi_at(CentralFace::Abc, aux, lambda)?;
    let j_def = jacobi_at(CentralFace::Def, aux, lambda)?;
    Ok(pow(p_abc) * j_abc - pow(p_def) * j_def)
}

/// The main 3→3 relation residual (exponent 2); exactly zero at flat points.
pub fn check_main_relation(
    lambda: &LambdaAssignment<Scalar>,
    aux: &FaceKey,
) -> Result<Scalar, JacobiError> {
    main_relation_residual(lambda, aux, 2)
}

/// (V_ABCD·V_ABCE·V_ABCF, V_ADEF·V_BDEF·V_CDEF) at λ.
pub fn volume_products(lambda: &LambdaAssignment<Scalar>) -> (Scalar, Scalar) {
    use VertexLabel::*;
    let vt = volumes_from_lambda(lambda);
    let v = |t: [VertexLabel; 4]| vt.signed(t).expect("distinct");
    (
        v([A, B, C, D]) * v([A, B, C, E]) * v([A, B, C, F]),
        v([A, D, E, F]) * v([B, D, E, F]) * v([C, D, E, F]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry3::{Configuration3, VolumeTable};
    use crate::lambda_omega::solve_lambda;
    use crate::scalars::{DualScalar, ExactScalar};
    use crate::symdiff::Expr;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    fn face(s: &str) -> FaceKey {
        let v: Vec<VertexLabel> = s
            .chars()
            .map(|c| VertexLabel::ALL[(c as u8 - b'A') as usize])
            .collect();
        FaceKey::canonicalize([v[0], v[1], v[2]]).unwrap().0
    }

    fn reference_lambda() -> LambdaAssignment<Scalar> {
        solve_lambda(&VolumeTable::from_configuration(&Configuration3::reference())).unwrap()
    }

    #[test]
    fn eighteen_admissible_faces() {
        let aux = admissible_aux_faces();
        assert_eq!(aux.len(), 18);
        assert!(!aux.contains(&face("ABC")));
        assert!(!aux.contains(&face("DEF")));
    }

    #[test]
    fn jacobi_value_on_reference_flat_point() {
        // frozen; cross-checked against the expression-tree differentiator below
        let j = jacobi(CentralFace::Abc, &face("ABD"), &reference_lambda()).unwrap();
        assert_eq!(j.value, q(5184, 5));
    }

    #[test]
    fn jacobi_rejects_central_faces_and_non_flat_points() {
        let lambda = reference_lambda();
        assert_eq!(
            jacobi(CentralFace::Abc, &face("ABC"), &lambda).unwrap_err(),
            JacobiError::BadAuxFace
        );
        assert_eq!(
            jacobi(CentralFace::Abc, &face("DEF"), &lambda).unwrap_err(),
            JacobiError::BadAuxFace
        );
        let bent = lambda.perturbed(&face("BCD"), &q(1, 7));
        assert_eq!(
            jacobi(CentralFace::Abc, &face("ABD"), &bent).unwrap_err(),
            JacobiError::NotFlat
        );
    }

    #[test]
    fn jacobi_determinant_flips_sign_when_columns_swap() {
        let lambda = reference_lambda();
        let aux = face("ABD");
        let (c1w1, c1w2) =
            omega_partials(CentralFace::Abc, &lambda, &CentralFace::Abc.face_key()).unwrap();
        let (c2w1, c2w2) = omega_partials(CentralFace::Abc, &lambda, &aux).unwrap();
        let j = jacobi(CentralFace::Abc, &aux, &lambda).unwrap().value;
        let swapped = c2w1 * c1w2 - c1w1 * c2w2;
        assert_eq!(swapped, -j);
    }

    #[test]
    fn zero_seeds_give_zero_determinant() {
        // both passes with all seeds zero: constants only, so both derivative
        // columns vanish and the determinant is that of the zero matrix
        let lambda = reference_lambda();
        let constants: LambdaAssignment<DualScalar> =
            LambdaAssignment::from_fn(|f| DualScalar::constant(lambda.get(f).clone()));
        let pair =
            crate::lambda_omega::omega_of_lambda(CentralFace::Abc, &constants).unwrap();
        assert!(pair.w1.derivative().is_zero());
        assert!(pair.w2.derivative().is_zero());
    }

    #[test]
    fn dual_partials_match_symbolic_differentiator() {
        // the same ω formula captured as an expression tree, then
        // differentiated symbolically — an independent derivative route
        let lambda = reference_lambda();
        let faces = enumerate_faces();
        let as_exprs: LambdaAssignment<Expr> =
            LambdaAssignment::from_fn(|f| Expr::var(f.index()));
        let point: Vec<Scalar> = faces.iter().map(|f| lambda.get(f).clone()).collect();
        for central in CentralFace::BOTH {
            let tree = crate::lambda_omega::omega_of_lambda(central, &as_exprs).unwrap();
            for var in [face("ABC"), face("ABD"), face("BCD"), face("DEF")] {
                let (d1, d2) = omega_partials(central, &lambda, &var).unwrap();
                assert_eq!(
                    tree.w1.derivative(var.index()).eval(&point).unwrap(),
                    d1
                );
                assert_eq!(
                    tree.w2.derivative(var.index()).eval(&point).unwrap(),
                    d2
                );
            }
        }
    }

    #[test]
    fn ratio_independence_on_reference_configuration() {
        let report = check_ratio_independence(&reference_lambda()).unwrap();
        assert_eq!(report.pairs_checked, 153);
        assert!(report.holds());
        // this configuration happens to have matched zero Jacobians
        let zeros: Vec<String> = report
            .zero_jacobians
            .iter()
            .map(|(f, i)| format!("{}:{}", f, i))
            .collect();
        assert_eq!(
            zeros,
            vec!["ABC:ABF", "DEF:ABF", "ABC:ACF", "DEF:ACF", "ABC:BCF", "DEF:BCF"]
        );
    }

    #[test]
    fn ratio_violation_is_reported_with_the_witnessing_pair() {
        // corrupt one Jacobian by hand: recompute the pair products with a
        // deliberately wrong J_ABC value for one face
        let lambda = reference_lambda();
        let aux = admissible_aux_faces();
        let mut j_abc: Vec<Scalar> = aux
            .iter()
            .map(|i| jacobi(CentralFace::Abc, i, &lambda).unwrap().value)
            .collect();
        let j_def: Vec<Scalar> = aux
            .iter()
            .map(|i| jacobi(CentralFace::Def, i, &lambda).unwrap().value)
            .collect();
        j_abc[0] = j_abc[0].clone() + Scalar::one();
        let mut violated = Vec::new();
        for a in 0..aux.len() {
            for b in (a + 1)..aux.len() {
                if j_abc[a].clone() * j_def[b].clone() != j_abc[b].clone() * j_def[a].clone() {
                    violated.push((aux[a], aux[b]));
                }
            }
        }
        assert!(!violated.is_empty());
        assert!(violated.iter().all(|(i, j)| *i == aux[0] || *j == aux[0]));
    }

    #[test]
    fn main_relation_holds_on_reference_and_random_configurations() {
        let lambda = reference_lambda();
        for aux in admissible_aux_faces() {
            assert!(check_main_relation(&lambda, &aux).unwrap().is_zero());
        }
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..3 {
            let (cfg, _) = Configuration3::random(&mut rng, 10);
            let lambda = solve_lambda(&VolumeTable::from_configuration(&cfg)).unwrap();
            for aux in admissible_aux_faces() {
                assert!(check_main_relation(&lambda, &aux).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn corrupted_volume_breaks_the_main_relation() {
        // fault injection: corrupt V_ADEF inside the residual assembly while
        // the Jacobians stay those of the genuine flat point
        let lambda = reference_lambda();
        let aux = face("ABD");
        let j_abc = jacobi(CentralFace::Abc, &aux, &lambda).unwrap().value;
        let j_def = jacobi(CentralFace::Def, &aux, &lambda).unwrap().value;
        assert!(!j_abc.is_zero());
        let (p_abc, p_def) = volume_products(&lambda);
        assert!((p_abc.clone() * p_abc.clone() * j_abc.clone()
            - p_def.clone() * p_def.clone() * j_def.clone())
        .is_zero());

        let vt = volumes_from_lambda(&lambda);
        let v_adef = vt
            .signed([VertexLabel::A, VertexLabel::D, VertexLabel::E, VertexLabel::F])
            .unwrap();
        let corrupted_ratio = (v_adef.clone() + Scalar::one())
            .checked_div(&v_adef)
            .unwrap();
        let p_def_bad = p_def * corrupted_ratio;
        let residual =
            p_abc.clone() * p_abc * j_abc - p_def_bad.clone() * p_def_bad * j_def;
        assert!(!residual.is_zero());
    }

    #[test]
    fn wrong_exponents_fail_where_jacobians_are_nonzero() {
        let lambda = reference_lambda();
        let (pa, pd) = volume_products(&lambda);
        assert_ne!(pa, pd);
        for aux in admissible_aux_faces() {
            let j = jacobi(CentralFace::Abc, &aux, &lambda).unwrap().value;
            let jd = jacobi(CentralFace::Def, &aux, &lambda).unwrap().value;
            if j.is_zero() && jd.is_zero() {
                // vacuous at every exponent
                assert!(main_relation_residual(&lambda, &aux, 1).unwrap().is_zero());
                continue;
            }
            assert!(!main_relation_residual(&lambda, &aux, 1).unwrap().is_zero());
            assert!(!main_relation_residual(&lambda, &aux, 3).unwrap().is_zero());
            assert!(main_relation_residual(&lambda, &aux, 2).unwrap().is_zero());
        }
    }
}
