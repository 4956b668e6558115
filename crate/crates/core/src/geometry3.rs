//! ℝ³ point configurations over exact rationals: oriented tetrahedron
//! volumes, the boundary relations of the six 4-simplices, the vector
//! transports around face ABC, and their composed holonomy.
//!
//! The geometry here is affine volume-preserving: points carry bare rational
//! coordinates, no lengths or angles. A volume is det/6, antisymmetric in the
//! vertex order. Transports and the holonomy are written over an arbitrary
//! [`VolumeTable`] — not over coordinates — so they stay meaningful on tables
//! that do not come from any embedding, which is exactly the regime where the
//! deficit-angle components are nonzero.

use rand::Rng;
use thiserror::Error;

use crate::combinatorics::{enumerate_tetras, DegenerateKey, TetraKey, VertexLabel};
use crate::scalars::{ExactScalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    DegenerateKey(#[from] DegenerateKey),
    /// A transport denominator volume is zero.
    #[error("zero denominator volume in vertex transport")]
    SingularTransport,
}

/// A point of ℝ³ with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(
            Scalar::from_integer(x),
            Scalar::from_integer(y),
            Scalar::from_integer(z),
        )
    }
}

/// A displacement between two points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vec3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Vec3 {
    pub fn scaled(&self, k: &Scalar) -> Vec3 {
        Vec3 {
            x: k.clone() * self.x.clone(),
            y: k.clone() * self.y.clone(),
            z: k.clone() * self.z.clone(),
        }
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3 {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z,
        }
    }
}

fn det3(u: &Vec3, v: &Vec3, w: &Vec3) -> Scalar {
    let minor = |a: &Scalar, b: &Scalar, c: &Scalar, d: &Scalar| {
        a.clone() * d.clone() - b.clone() * c.clone()
    };
    u.x.clone() * minor(&v.y, &v.z, &w.y, &w.z) - u.y.clone() * minor(&v.x, &v.z, &w.x, &w.z)
        + u.z.clone() * minor(&v.x, &v.y, &w.x, &w.y)
}

/// An assignment of an ℝ³ point to each of the six labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration3 {
    points: [Point3; 6],
}

impl Configuration3 {
    /// Points in label order A..F.
    pub fn new(points: [Point3; 6]) -> Self {
        Configuration3 { points }
    }

    pub fn point(&self, v: VertexLabel) -> &Point3 {
        &self.points[v.index()]
    }

    /// The displacement `to − from`.
    pub fn edge_vector(&self, from: VertexLabel, to: VertexLabel) -> Vec3 {
        let p = self.point(from);
        let q = self.point(to);
        Vec3 {
            x: q.x.clone() - p.x.clone(),
            y: q.y.clone() - p.y.clone(),
            z: q.z.clone() - p.z.clone(),
        }
    }

    /// Fixed nondegenerate configuration used throughout the test suite.
    pub fn reference() -> Self {
        Configuration3::new([
            Point3::from_ints(0, 0, 0),
            Point3::from_ints(1, 0, 0),
            Point3::from_ints(0, 1, 0),
            Point3::from_ints(0, 0, 1),
            Point3::from_ints(1, 1, 1),
            Point3::from_ints(2, 3, 5),
        ])
    }

    /// Rejection-samples integer coordinates uniform in [−range, range] until
    /// all 15 tetrahedron volumes are nonzero. Returns the configuration and
    /// the number of rejected (degenerate) draws.
    pub fn random(rng: &mut impl Rng, range: i64) -> (Self, u32) {
        let mut rejected = 0;
        loop {
            let points = std::array::from_fn(|_| {
                Point3::from_ints(
                    rng.random_range(-range..=range),
                    rng.random_range(-range..=range),
                    rng.random_range(-range..=range),
                )
            });
            let config = Configuration3::new(points);
            if !VolumeTable::from_configuration(&config).is_degenerate() {
                return (config, rejected);
            }
            rejected += 1;
        }
    }
}

/// Oriented volume of the tetrahedron on an ordered label tuple:
/// det[Q−P, R−P, S−P] / 6 for (P, Q, R, S).
pub fn oriented_volume(
    config: &Configuration3,
    tuple: [VertexLabel; 4],
) -> Result<Scalar, GeometryError> {
    // reject repeated labels up front
    let _ = TetraKey::canonicalize(tuple)?;
    let [p, q, r, s] = tuple;
    let d = det3(
        &config.edge_vector(p, q),
        &config.edge_vector(p, r),
        &config.edge_vector(p, s),
    );
    Ok(d.checked_div(&Scalar::from_integer(6)).expect("6 != 0"))
}

/// The 15 oriented volumes, one per canonical tetrahedron key.
#[derive(Clone, PartialEq, Debug)]
pub struct VolumeTable<T = Scalar> {
    volumes: [T; 15],
}

impl<T: ExactScalar> VolumeTable<T> {
    pub fn from_fn(mut f: impl FnMut(&TetraKey) -> T) -> Self {
        let tetras = enumerate_tetras();
        VolumeTable {
            volumes: std::array::from_fn(|i| f(&tetras[i])),
        }
    }

    pub fn get(&self, key: &TetraKey) -> &T {
        &self.volumes[key.index()]
    }

    pub fn set(&mut self, key: &TetraKey, value: T) {
        self.volumes[key.index()] = value;
    }

    /// Volume looked up through an arbitrary ordering; the permutation sign
    /// is applied, so `signed([B,A,C,D]) = −signed([A,B,C,D])`.
    pub fn signed(&self, tuple: [VertexLabel; 4]) -> Result<T, DegenerateKey> {
        let (key, sign) = TetraKey::canonicalize(tuple)?;
        Ok(sign.apply(self.get(&key).clone()))
    }

    /// A configuration is degenerate iff some tetrahedron volume vanishes;
    /// that is what every transport and ω denominator needs to avoid.
    pub fn is_degenerate(&self) -> bool {
        self.volumes.iter().any(|v| v.is_zero())
    }
}

impl VolumeTable<Scalar> {
    pub fn from_configuration(config: &Configuration3) -> Self {
        VolumeTable::from_fn(|key| {
            oriented_volume(config, key.vertices()).expect("canonical keys are distinct")
        })
    }
}

/// The six alternating boundary sums, one per omitted vertex X: for the
/// 4-simplex X̂ on the remaining five labels v₀<…<v₄, the sum
/// Σₖ (−1)ᵏ V(X̂ ∖ vₖ). Exactly zero on every table built from coordinates.
pub fn boundary_residuals<T: ExactScalar>(vt: &VolumeTable<T>) -> [T; 6] {
    std::array::from_fn(|omit| {
        let five: Vec<VertexLabel> = VertexLabel::ALL
            .into_iter()
            .filter(|v| v.index() != omit)
            .collect();
        let mut acc = T::zero();
        for k in 0..5 {
            let mut tuple = [VertexLabel::A; 4];
            let mut w = 0;
            for (i, &v) in five.iter().enumerate() {
                if i != k {
                    tuple[w] = v;
                    w += 1;
                }
            }
            let term = vt.signed(tuple).expect("distinct by construction");
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    })
}

/// Coefficients expressing the transported vector CY in the basis
/// (CA, CB, CX): CY = coef_a·CA + coef_b·CB + coef_from·CX.
#[derive(Clone, PartialEq, Debug)]
pub struct TransportCoeffs<T = Scalar> {
    pub coef_a: T,
    pub coef_b: T,
    pub coef_from: T,
}

impl TransportCoeffs<Scalar> {
    pub fn apply(&self, ca: &Vec3, cb: &Vec3, c_from: &Vec3) -> Vec3 {
        ca.scaled(&self.coef_a) + cb.scaled(&self.coef_b) + c_from.scaled(&self.coef_from)
    }
}

/// Expresses CY through CX around face ABC, reading every coefficient as a
/// signed volume ratio:
///
/// ```text
/// CY = ( V(C,Y,B,X)·CA + V(C,A,Y,X)·CB + V(C,A,B,Y)·CX ) / V(C,A,B,X)
/// ```
///
/// For (X, Y) = (D, E) this is CE = (−V_BCDE·CA + V_ACDE·CB + V_ABCE·CD) / V_ABCD,
/// and the cycle D→E→F→D covers the three 4-simplices around ABC.
pub fn transport_vertex<T: ExactScalar>(
    vt: &VolumeTable<T>,
    from: VertexLabel,
    to: VertexLabel,
) -> Result<TransportCoeffs<T>, GeometryError> {
    use VertexLabel::{A, B, C, D, E, F};
    assert!(
        [D, E, F].contains(&from) && [D, E, F].contains(&to) && from != to,
        "transport endpoints must be distinct vertices of {{D, E, F}}"
    );
    let den = vt.signed([C, A, B, from])?;
    if den.is_zero() {
        return Err(GeometryError::SingularTransport);
    }
    let div = |num: T| num.checked_div(&den).expect("denominator checked nonzero");
    Ok(TransportCoeffs {
        coef_a: div(vt.signed([C, to, B, from])?),
        coef_b: div(vt.signed([C, A, to, from])?),
        coef_from: div(vt.signed([C, A, B, to])?),
    })
}

/// Composes the three transports D→E→F→D around ABC symbolically in the
/// basis (CA, CB, CD), returning (c_a, c_b, c_d) with
/// CD_new = c_a·CA + c_b·CB + c_d·CD.
///
/// On any nondegenerate table c_d = 1 identically, and the other two
/// coefficients are the deficit-angle components scaled by V_ABCD:
/// c_a = ω⁽¹⁾·V_ABCD, c_b = ω⁽²⁾·V_ABCD. On tables from an actual embedding
/// both vanish.
pub fn holonomy<T: ExactScalar>(vt: &VolumeTable<T>) -> Result<(T, T, T), GeometryError> {
    use VertexLabel::{D, E, F};
    let mut c_a = T::zero();
    let mut c_b = T::zero();
    let mut c_d = T::one();
    for (from, to) in [(D, E), (E, F), (F, D)] {
        let step = transport_vertex(vt, from, to)?;
        c_a = step.coef_a + step.coef_from.clone() * c_a;
        c_b = step.coef_b + step.coef_from.clone() * c_b;
        c_d = step.coef_from * c_d;
    }
    Ok((c_a, c_b, c_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use VertexLabel::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d).unwrap()
    }

    fn tetra(s: &str) -> TetraKey {
        let v: Vec<VertexLabel> = s
            .chars()
            .map(|c| VertexLabel::ALL[(c as u8 - b'A') as usize])
            .collect();
        TetraKey::canonicalize([v[0], v[1], v[2], v[3]]).unwrap().0
    }

    #[test]
    fn unit_tetrahedron_volume() {
        let cfg = Configuration3::reference();
        assert_eq!(oriented_volume(&cfg, [A, B, C, D]).unwrap(), q(1, 6));
        assert_eq!(oriented_volume(&cfg, [B, A, C, D]).unwrap(), q(-1, 6));
        assert_eq!(
            oriented_volume(&cfg, [A, A, C, D]),
            Err(GeometryError::DegenerateKey(DegenerateKey))
        );
    }

    #[test]
    fn coplanar_points_have_zero_volume() {
        let cfg = Configuration3::new([
            Point3::from_ints(0, 0, 0),
            Point3::from_ints(1, 0, 0),
            Point3::from_ints(0, 1, 0),
            Point3::from_ints(1, 1, 0), // coplanar with A, B, C
            Point3::from_ints(1, 1, 1),
            Point3::from_ints(2, 3, 5),
        ]);
        assert_eq!(oriented_volume(&cfg, [A, B, C, D]).unwrap(), Scalar::zero());
        assert!(VolumeTable::from_configuration(&cfg).is_degenerate());
    }

    #[test]
    fn repeated_point_degenerates_the_table() {
        // E placed on D: every tetra containing both collapses
        let cfg = Configuration3::new([
            Point3::from_ints(0, 0, 0),
            Point3::from_ints(1, 0, 0),
            Point3::from_ints(0, 1, 0),
            Point3::from_ints(0, 0, 1),
            Point3::from_ints(0, 0, 1),
            Point3::from_ints(2, 3, 5),
        ]);
        let vt = VolumeTable::from_configuration(&cfg);
        assert_eq!(vt.signed([A, B, D, E]).unwrap(), Scalar::zero());
        assert!(vt.is_degenerate());
    }

    #[test]
    fn oriented_volume_antisymmetric_over_all_24_orderings() {
        let cfg = Configuration3::reference();
        let base = oriented_volume(&cfg, [A, B, C, E]).unwrap();
        let verts = [A, B, C, E];
        let mut count = 0;
        permute4(|p| {
            let tuple = p.map(|i| verts[i]);
            let (_, sign) = TetraKey::canonicalize(tuple).unwrap();
            assert_eq!(
                oriented_volume(&cfg, tuple).unwrap(),
                sign.apply(base.clone())
            );
            count += 1;
        });
        assert_eq!(count, 24);
    }

    fn permute4(mut f: impl FnMut([usize; 4])) {
        let mut p = [0usize, 1, 2, 3];
        loop {
            f(p);
            // next lexicographic permutation
            let mut i = 3;
            while i > 0 && p[i - 1] >= p[i] {
                i -= 1;
            }
            if i == 0 {
                return;
            }
            let mut j = 3;
            while p[j] <= p[i - 1] {
                j -= 1;
            }
            p.swap(i - 1, j);
            p[i..].reverse();
        }
    }

    #[test]
    fn reference_volume_table() {
        // frozen from direct determinant evaluation
        let vt = VolumeTable::from_configuration(&Configuration3::reference());
        let expected = [
            ("ABCD", 1, 6),
            ("ABCE", 1, 6),
            ("ABCF", 5, 6),
            ("ABDE", -1, 6),
            ("ABDF", -1, 2),
            ("ABEF", 1, 3),
            ("ACDE", 1, 6),
            ("ACDF", 1, 3),
            ("ACEF", -1, 2),
            ("ADEF", 1, 6),
            ("BCDE", 1, 3),
            ("BCDF", 3, 2),
            ("BCEF", -1, 6),
            ("BDEF", -1, 2),
            ("CDEF", 5, 6),
        ];
        for (name, n, d) in expected {
            assert_eq!(vt.get(&tetra(name)), &q(n, d), "V_{}", name);
        }
        assert!(!vt.is_degenerate());
    }

    #[test]
    fn signed_lookup_applies_parity() {
        let vt = VolumeTable::from_configuration(&Configuration3::reference());
        assert_eq!(vt.signed([B, A, C, D]).unwrap(), q(-1, 6));
        assert_eq!(vt.signed([C, A, B, D]).unwrap(), q(1, 6));
        assert_eq!(vt.signed([A, A, B, C]), Err(DegenerateKey));
    }

    #[test]
    fn boundary_relations_vanish_on_configurations() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let (cfg, _) = Configuration3::random(&mut rng, 10);
            let vt = VolumeTable::from_configuration(&cfg);
            assert_eq!(boundary_residuals(&vt), std::array::from_fn(|_| Scalar::zero()));
        }
    }

    #[test]
    fn boundary_residuals_pick_up_a_perturbation_with_eq2_signs() {
        // +1 on V_ABCD enters the omitted-E and omitted-F relations at the
        // last alternating slot, so both residuals move by +1
        let mut vt = VolumeTable::from_configuration(&Configuration3::reference());
        let key = tetra("ABCD");
        let bumped = vt.get(&key).clone() + Scalar::one();
        vt.set(&key, bumped);
        let res = boundary_residuals(&vt);
        assert_eq!(
            res,
            [
                Scalar::zero(),
                Scalar::zero(),
                Scalar::zero(),
                Scalar::zero(),
                Scalar::one(),
                Scalar::one()
            ]
        );
    }

    #[test]
    fn boundary_residuals_zero_table() {
        let vt: VolumeTable = VolumeTable::from_fn(|_| Scalar::zero());
        assert_eq!(boundary_residuals(&vt), std::array::from_fn(|_| Scalar::zero()));
    }

    #[test]
    fn transport_reproduces_embedded_coordinates() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..20 {
            let (cfg, _) = Configuration3::random(&mut rng, 10);
            let vt = VolumeTable::from_configuration(&cfg);
            for (from, to) in [(D, E), (E, F), (F, D)] {
                let coeffs = transport_vertex(&vt, from, to).unwrap();
                let got = coeffs.apply(
                    &cfg.edge_vector(C, A),
                    &cfg.edge_vector(C, B),
                    &cfg.edge_vector(C, from),
                );
                assert_eq!(got, cfg.edge_vector(C, to));
            }
        }
    }

    #[test]
    fn transport_coefficients_match_volume_ratios() {
        let vt = VolumeTable::from_configuration(&Configuration3::reference());
        let coeffs = transport_vertex(&vt, D, E).unwrap();
        let v = |s: &str| vt.get(&tetra(s)).clone();
        let div = |a: Scalar, b: Scalar| a.checked_div(&b).unwrap();
        assert_eq!(coeffs.coef_a, div(-v("BCDE"), v("ABCD")));
        assert_eq!(coeffs.coef_b, div(v("ACDE"), v("ABCD")));
        assert_eq!(coeffs.coef_from, div(v("ABCE"), v("ABCD")));
        // frozen: (−2, 1, 1) on the reference configuration
        assert_eq!(coeffs.coef_a, q(-2, 1));
        assert_eq!(coeffs.coef_b, q(1, 1));
        assert_eq!(coeffs.coef_from, q(1, 1));
    }

    #[test]
    fn transport_with_zero_denominator_is_singular() {
        let mut vt = VolumeTable::from_configuration(&Configuration3::reference());
        vt.set(&tetra("ABCD"), Scalar::zero());
        assert_eq!(
            transport_vertex(&vt, D, E).unwrap_err(),
            GeometryError::SingularTransport
        );
    }

    #[test]
    fn holonomy_is_identity_on_configurations() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let (cfg, _) = Configuration3::random(&mut rng, 10);
            let vt = VolumeTable::from_configuration(&cfg);
            let (c_a, c_b, c_d) = holonomy(&vt).unwrap();
            assert_eq!((c_a, c_b, c_d), (Scalar::zero(), Scalar::zero(), Scalar::one()));
        }
    }

    #[test]
    fn holonomy_cd_is_one_even_on_arbitrary_tables() {
        // entries chosen freely: the c_d coefficient telescopes regardless
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..10 {
            let vt: VolumeTable = VolumeTable::from_fn(|_| {
                let v = q(rng.random_range(1..=40), rng.random_range(1..=9));
                if rng.random_bool(0.5) {
                    -v
                } else {
                    v
                }
            });
            let (_, _, c_d) = holonomy(&vt).unwrap();
            assert_eq!(c_d, Scalar::one());
        }
    }

    #[test]
    fn random_configurations_are_nondegenerate() {
        let mut rng = StdRng::seed_from_u64(99);
        let (cfg, _rejected) = Configuration3::random(&mut rng, 2);
        assert!(!VolumeTable::from_configuration(&cfg).is_degenerate());
    }
}
