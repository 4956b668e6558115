//! The six-vertex label algebra: oriented face and tetrahedron keys with
//! permutation-sign semantics, the ABC↔DEF relabeling involution σ, and the
//! enumeration of all 20 two-faces and 15 tetrahedra.
//!
//! Keys are stored canonically (vertices ascending); any permuted access
//! yields the parity sign of the sorting permutation, which is how total
//! antisymmetry is enforced structurally rather than by convention inside
//! formulas.

use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use thiserror::Error;

/// A simplex key with a repeated vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("repeated vertex in simplex key")]
pub struct DegenerateKey;

/// The six vertices of the move, totally ordered A < B < C < D < E < F.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VertexLabel {
    A,
    B,
    C,
    D,
    E,
    F,
}

use VertexLabel::*;

impl VertexLabel {
    pub const ALL: [VertexLabel; 6] = [A, B, C, D, E, F];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The involution σ: A↔D, B↔E, C↔F.
    pub fn relabel(self) -> VertexLabel {
        match self {
            A => D,
            B => E,
            C => F,
            D => A,
            E => B,
            F => C,
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Parity of a vertex permutation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn apply<T: std::ops::Neg<Output = T>>(self, v: T) -> T {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Sorts a small vertex tuple in place, returning the permutation parity, or
/// `DegenerateKey` on a repeated vertex.
fn sort_with_parity(v: &mut [VertexLabel]) -> Result<Sign, DegenerateKey> {
    let mut sign = Sign::Plus;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = sign.flip();
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return Err(DegenerateKey);
        }
    }
    Ok(sign)
}

fn mask(verts: &[VertexLabel]) -> usize {
    verts.iter().fold(0, |m, v| m | (1 << v.index()))
}

/// Canonical (ascending) key of an oriented 2-face.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FaceKey([VertexLabel; 3]);

/// Canonical (ascending) key of an oriented tetrahedron.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TetraKey([VertexLabel; 4]);

impl FaceKey {
    /// Canonicalizes an ordered triple: sorted key plus permutation sign.
    pub fn canonicalize(verts: [VertexLabel; 3]) -> Result<(FaceKey, Sign), DegenerateKey> {
        let mut v = verts;
        let sign = sort_with_parity(&mut v)?;
        Ok((FaceKey(v), sign))
    }

    pub fn vertices(&self) -> [VertexLabel; 3] {
        self.0
    }

    pub fn contains(&self, v: VertexLabel) -> bool {
        self.0.contains(&v)
    }

    /// Position in [`enumerate_faces`] order (0..20).
    pub fn index(&self) -> usize {
        face_index_table()[mask(&self.0)] as usize
    }

    /// σ applied vertexwise, then canonicalized.
    pub fn relabel(&self) -> (FaceKey, Sign) {
        Self::canonicalize(self.0.map(VertexLabel::relabel)).expect("σ preserves distinctness")
    }
}

impl TetraKey {
    pub fn canonicalize(verts: [VertexLabel; 4]) -> Result<(TetraKey, Sign), DegenerateKey> {
        let mut v = verts;
        let sign = sort_with_parity(&mut v)?;
        Ok((TetraKey(v), sign))
    }

    pub fn vertices(&self) -> [VertexLabel; 4] {
        self.0
    }

    pub fn contains(&self, v: VertexLabel) -> bool {
        self.0.contains(&v)
    }

    /// Position in [`enumerate_tetras`] order (0..15).
    pub fn index(&self) -> usize {
        tetra_index_table()[mask(&self.0)] as usize
    }

    pub fn relabel(&self) -> (TetraKey, Sign) {
        Self::canonicalize(self.0.map(VertexLabel::relabel)).expect("σ preserves distinctness")
    }

    /// The faces of this tetrahedron with the boundary signs (−1)^k of the
    /// omitted-vertex position: `V_WXYZ = λ_XYZ − λ_WYZ + λ_WXZ − λ_WXY`.
    pub fn boundary_faces(&self) -> [(FaceKey, Sign); 4] {
        let v = self.0;
        let face = |a, b, c| FaceKey([v[a], v[b], v[c]]);
        [
            (face(1, 2, 3), Sign::Plus),
            (face(0, 2, 3), Sign::Minus),
            (face(0, 1, 3), Sign::Plus),
            (face(0, 1, 2), Sign::Minus),
        ]
    }
}

impl fmt::Display for FaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

impl fmt::Display for TetraKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// All 20 faces, lexicographic (ABC first, DEF last).
pub fn enumerate_faces() -> &'static [FaceKey; 20] {
    static FACES: OnceLock<[FaceKey; 20]> = OnceLock::new();
    FACES.get_or_init(|| {
        let mut out = Vec::with_capacity(20);
        for i in 0..6 {
            for j in (i + 1)..6 {
                for k in (j + 1)..6 {
                    out.push(FaceKey([
                        VertexLabel::ALL[i],
                        VertexLabel::ALL[j],
                        VertexLabel::ALL[k],
                    ]));
                }
            }
        }
        out.try_into().unwrap()
    })
}

/// All 15 tetrahedra, lexicographic (ABCD first).
pub fn enumerate_tetras() -> &'static [TetraKey; 15] {
    static TETRAS: OnceLock<[TetraKey; 15]> = OnceLock::new();
    TETRAS.get_or_init(|| {
        let mut out = Vec::with_capacity(15);
        for i in 0..6 {
            for j in (i + 1)..6 {
                for k in (j + 1)..6 {
                    for l in (k + 1)..6 {
                        out.push(TetraKey([
                            VertexLabel::ALL[i],
                            VertexLabel::ALL[j],
                            VertexLabel::ALL[k],
                            VertexLabel::ALL[l],
                        ]));
                    }
                }
            }
        }
        out.try_into().unwrap()
    })
}

fn face_index_table() -> &'static [u8; 64] {
    static TABLE: OnceLock<[u8; 64]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [u8::MAX; 64];
        for (i, f) in enumerate_faces().iter().enumerate() {
            t[mask(&f.0)] = i as u8;
        }
        t
    })
}

fn tetra_index_table() -> &'static [u8; 64] {
    static TABLE: OnceLock<[u8; 64]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [u8::MAX; 64];
        for (i, k) in enumerate_tetras().iter().enumerate() {
            t[mask(&k.0)] = i as u8;
        }
        t
    })
}
