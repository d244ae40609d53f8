//! The fan of ℙ² and the piecewise linear functions living on it: φ_k on the
//! fan itself and φ_{m,n} on its double cover branched at the origin.

use crate::lattice::{det, transverse, V2};

/// Ray generators v_0, v_1, v_2.
pub const RAYS: [V2; 3] = [V2([-1, -1]), V2([1, 0]), V2([0, 1])];

/// Cone σ_i is spanned by the two rays other than v_i, listed ccw.
pub const CONES: [[usize; 2]; 3] = [[1, 2], [2, 0], [0, 1]];

/// Sheet labels over each cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    Plus,
    Minus,
}

/// Slopes of φ_{m,n}: `[cone][0]` is the + sheet, `[cone][1]` the − sheet.
pub fn phi_mn_slopes(m: i64, n: i64) -> [[V2; 2]; 3] {
    let d = n - m;
    [
        [V2::new(d, 0), V2::new(0, d)],
        [V2::new(n, 0), V2::new(n, d)],
        [V2::new(d, n), V2::new(0, n)],
    ]
}

/// The six sheets of φ_{m,n} in ccw order starting at σ_0^+, as (cone, sheet).
/// Going once around the origin visits σ_0, σ_1, σ_2 twice; the sheet flips
/// only when crossing v_0.
pub const CYCLE: [(usize, Sheet); 6] = [
    (0, Sheet::Plus),
    (1, Sheet::Plus),
    (2, Sheet::Minus),
    (0, Sheet::Minus),
    (1, Sheet::Minus),
    (2, Sheet::Plus),
];

pub fn phi_mn_cycle(m: i64, n: i64) -> [V2; 6] {
    let s = phi_mn_slopes(m, n);
    CYCLE.map(|(c, sh)| s[c][if sh == Sheet::Plus { 0 } else { 1 }])
}

/// Slopes of φ_k = max-type function with value 0, kξ_1, kξ_2 on σ_0, σ_1, σ_2.
pub fn phi_k_slopes(k: i64) -> [V2; 3] {
    [V2::new(0, 0), V2::new(k, 0), V2::new(0, k)]
}

/// Kink across a ray `d` (primitive) from the cone on its clockwise side
/// with slope `cw` to the cone on its counterclockwise side with slope `ccw`.
/// Continuity means ccw − cw vanishes on d; the kink is its value on the
/// transverse generator. It is unchanged by GL(2,ℤ), including reflections,
/// once the cw/ccw roles are swapped with the orientation.
pub fn kink(d: V2, cw: V2, ccw: V2) -> i64 {
    (ccw - cw).dot(transverse(d))
}

/// Slope change when crossing ray d counterclockwise with kink κ.
pub fn kink_step(d: V2, k: i64) -> V2 {
    k * d.perp()
}

pub fn continuous_across(d: V2, a: V2, b: V2) -> bool {
    (a - b).dot(d) == 0
}

/// Rays crossed in the six-step ccw cycle: step i goes from CYCLE[i] to CYCLE[i+1].
pub fn cycle_rays() -> [V2; 6] {
    // σ0→σ1 crosses v2, σ1→σ2 crosses v0, σ2→σ0 crosses v1
    let across = |from: usize| match from {
        0 => RAYS[2],
        1 => RAYS[0],
        _ => RAYS[1],
    };
    CYCLE.map(|(c, _)| across(c))
}

pub fn sanity_ccw() -> bool {
    CONES.iter().all(|&[a, b]| det(RAYS[a], RAYS[b]) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cones_are_unimodular_ccw() {
        assert!(sanity_ccw());
    }

    #[test]
    fn cycle_is_continuous_with_alternating_kinks() {
        for (m, n) in [(1, 0), (0, 1), (3, -2), (5, 4), (-1, 2)] {
            let c = phi_mn_cycle(m, n);
            let rays = cycle_rays();
            let mut got = vec![];
            for i in 0..6 {
                let (a, b) = (c[i], c[(i + 1) % 6]);
                assert!(continuous_across(rays[i], a, b), "({m},{n}) step {i}");
                got.push(kink(rays[i], a, b));
            }
            assert_eq!(got, vec![-m, -n, -m, -n, -m, -n]);
        }
    }

    #[test]
    fn phi_k_has_uniform_kink() {
        let s = phi_k_slopes(3);
        // σ0 → σ1 across v2, σ1 → σ2 across v0, σ2 → σ0 across v1
        assert_eq!(kink(RAYS[2], s[0], s[1]), -3);
        assert_eq!(kink(RAYS[0], s[1], s[2]), -3);
        assert_eq!(kink(RAYS[1], s[2], s[0]), -3);
    }

    #[test]
    fn kink_step_inverts_kink() {
        let d = V2::new(2, -3);
        let a = V2::new(4, 1);
        assert_eq!(kink(d, a, a + kink_step(d, 7)), 7);
    }
}
