//! Small integer lattice helpers for ℤ² and its dual.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// An element of ℤ² (or of the dual copy, for covectors).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct V2(pub [i64; 2]);

impl V2 {
    pub const ZERO: V2 = V2([0, 0]);

    pub fn new(x: i64, y: i64) -> V2 {
        V2([x, y])
    }
    pub fn x(self) -> i64 {
        self.0[0]
    }
    pub fn y(self) -> i64 {
        self.0[1]
    }
    pub fn dot(self, o: V2) -> i64 {
        self.x() * o.x() + self.y() * o.y()
    }
    pub fn is_zero(self) -> bool {
        self.0 == [0, 0]
    }
    pub fn is_primitive(self) -> bool {
        self.x().gcd(&self.y()) == 1
    }
    /// Rotation by a quarter turn: the covector vanishing on `self` that
    /// pairs to +1 with any `t` satisfying det(self, t) = 1.
    pub fn perp(self) -> V2 {
        V2([-self.y(), self.x()])
    }
}

impl std::ops::Add for V2 {
    type Output = V2;
    fn add(self, o: V2) -> V2 {
        V2([self.x() + o.x(), self.y() + o.y()])
    }
}
impl std::ops::Sub for V2 {
    type Output = V2;
    fn sub(self, o: V2) -> V2 {
        V2([self.x() - o.x(), self.y() - o.y()])
    }
}
impl std::ops::Neg for V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        V2([-self.x(), -self.y()])
    }
}
impl std::ops::Mul<V2> for i64 {
    type Output = V2;
    fn mul(self, v: V2) -> V2 {
        V2([self * v.x(), self * v.y()])
    }
}

impl std::fmt::Display for V2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x(), self.y())
    }
}

pub fn det(a: V2, b: V2) -> i64 {
    a.x() * b.y() - a.y() * b.x()
}

/// The transverse generator of a primitive direction `d`: the unique `t`
/// with det(d, t) = 1 and 0 <= <t, d> < |d|².
pub fn transverse(d: V2) -> V2 {
    debug_assert!(d.is_primitive());
    // extended gcd: a*dx + b*dy = 1, so t0 = (-b, a) has det(d, t0) = 1
    let g = d.x().extended_gcd(&d.y());
    let (a, b) = if g.gcd == 1 { (g.x, g.y) } else { (-g.x, -g.y) };
    let t0 = V2([-b, a]);
    let n2 = d.dot(d);
    let s = t0.dot(d);
    // shifting t by k*d keeps det and moves <t,d> by k*|d|²
    let k = -s.div_euclid(n2);
    t0 + k * d
}

/// Rays in ccw order form a complete simplicial fan: each consecutive pair
/// turns strictly counterclockwise and the whole sequence winds once.
pub fn is_complete_ccw(rays: &[V2]) -> bool {
    let k = rays.len();
    if k < 3 || rays.iter().any(|r| r.is_zero()) {
        return false;
    }
    let probe = V2::new(1, 0);
    let mut winds = 0;
    for i in 0..k {
        let (a, b) = (rays[i], rays[(i + 1) % k]);
        if det(a, b) <= 0 {
            return false;
        }
        if det(a, probe) >= 0 && det(probe, b) > 0 {
            winds += 1;
        }
    }
    winds == 1
}

/// 2×2 integer matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const ID: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn from_cols(a: V2, b: V2) -> Mat2 {
        Mat2([[a.x(), b.x()], [a.y(), b.y()]])
    }
    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
    pub fn apply(&self, v: V2) -> V2 {
        let m = &self.0;
        V2([m[0][0] * v.x() + m[0][1] * v.y(), m[1][0] * v.x() + m[1][1] * v.y()])
    }
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }
    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<Mat2> {
        let d = self.det();
        if d != 1 && d != -1 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[d * m[1][1], -d * m[0][1]], [-d * m[1][0], d * m[0][0]]]))
    }
    /// Contragredient action on covectors: m ↦ m ∘ g⁻¹.
    pub fn cotransform(&self, m: V2) -> Option<V2> {
        Some(self.inverse_unimodular()?.transpose().apply(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transverse_examples() {
        assert_eq!(transverse(V2::new(1, 0)), V2::new(0, 1));
        assert_eq!(transverse(V2::new(1, 1)), V2::new(0, 1));
        assert_eq!(transverse(V2::new(0, 1)), V2::new(-1, 0));
        assert_eq!(transverse(V2::new(-1, -1)), V2::new(0, -1));
    }

    #[test]
    fn transverse_brute_force() {
        for x in -6..=6i64 {
            for y in -6..=6i64 {
                let d = V2::new(x, y);
                if !d.is_primitive() {
                    continue;
                }
                let mut hits = vec![];
                for a in -40..=40 {
                    for b in -40..=40 {
                        let t = V2::new(a, b);
                        if det(d, t) == 1 && t.dot(d) >= 0 && t.dot(d) < d.dot(d) {
                            hits.push(t);
                        }
                    }
                }
                assert_eq!(hits, vec![transverse(d)], "d = {d}");
            }
        }
    }

    #[test]
    fn completeness() {
        let p2 = [V2::new(1, 0), V2::new(0, 1), V2::new(-1, -1)];
        assert!(is_complete_ccw(&p2));
        assert!(!is_complete_ccw(&[V2::new(1, 0), V2::new(0, 1)]));
        assert!(!is_complete_ccw(&[V2::new(1, 0), V2::new(-1, -1), V2::new(0, 1)]));
        // winds twice
        let six = [(1, 0), (0, 1), (-1, -1), (1, 0), (0, 1), (-1, -1)].map(|(a, b)| V2::new(a, b));
        assert!(!is_complete_ccw(&six));
    }

    #[test]
    fn cotransform_preserves_pairing() {
        let g = Mat2([[2, 1], [1, 1]]);
        let m = V2::new(3, -4);
        let x = V2::new(5, 7);
        assert_eq!(g.cotransform(m).unwrap().dot(g.apply(x)), m.dot(x));
    }
}
