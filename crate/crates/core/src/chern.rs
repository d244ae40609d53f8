//! Piecewise polynomials on the fan of ℙ², equivariant Chern classes of the
//! rank-2 local model, the forgetful map, and Newton polytopes of PL
//! functions on arbitrary complete fans.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{pre, Error, Result};
use crate::lattice::{det, is_complete_ccw, V2};
use crate::linalg::{ceil_q, floor_q, fmt_q, q, solve, Q};
use crate::local_model::{phi_mn_slopes, CONES, RAYS};

/// Polynomial in ξ_1, ξ_2 keyed by exponent pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn constant(c: Q) -> Self {
        Self::term(c, 0, 0)
    }
    pub fn term(c: Q, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Poly { terms }
    }
    /// The linear form ⟨a, ξ⟩.
    pub fn linear(a: V2) -> Self {
        Self::term(q(a.x()), 1, 0).add(&Self::term(q(a.y()), 0, 1))
    }
    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            let s = r.terms.entry(*e).or_insert_with(Q::zero);
            *s += c;
            if s.is_zero() {
                r.terms.remove(e);
            }
        }
        r
    }
    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &o.terms {
                r = r.add(&Self::term(a * b, i + k, j + l));
            }
        }
        r
    }
    /// Restriction to the line t·d, as coefficients of t^k.
    pub fn restrict(&self, d: V2) -> BTreeMap<u32, Q> {
        let mut out: BTreeMap<u32, Q> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let v = c * q(d.x()).pow(*i as i32) * q(d.y()).pow(*j as i32);
            let s = out.entry(i + j).or_insert_with(Q::zero);
            *s += v;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), c)| {
                let mut s = fmt_q(c);
                for (e, name) in [(*i, "ξ1"), (*j, "ξ2")] {
                    match e {
                        0 => {}
                        1 => s += &format!("·{name}"),
                        _ => s += &format!("·{name}^{e}"),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One polynomial per maximal cone σ_0, σ_1, σ_2 of the ℙ² fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly(pub [Poly; 3]);

impl PiecewisePoly {
    pub fn zero() -> Self {
        PiecewisePoly([Poly::zero(), Poly::zero(), Poly::zero()])
    }
    pub fn add(&self, o: &Self) -> Self {
        PiecewisePoly([0, 1, 2].map(|i| self.0[i].add(&o.0[i])))
    }
    pub fn mul(&self, o: &Self) -> Self {
        PiecewisePoly([0, 1, 2].map(|i| self.0[i].mul(&o.0[i])))
    }
    pub fn scale(&self, c: &Q) -> Self {
        PiecewisePoly([0, 1, 2].map(|i| self.0[i].scale(c)))
    }
    /// Adjacent cones agree on their common ray.
    pub fn is_continuous(&self) -> bool {
        (0..3).all(|r| {
            let cones: Vec<usize> = (0..3).filter(|&c| CONES[c].contains(&r)).collect();
            self.0[cones[0]].restrict(RAYS[r]) == self.0[cones[1]].restrict(RAYS[r])
        })
    }
    /// Courant function t_i: linear on each cone, 1 at v_i, 0 at the other rays.
    pub fn courant(i: usize) -> Self {
        PiecewisePoly([0, 1, 2].map(|c| {
            let [a, b] = CONES[c];
            // solve ⟨ℓ, v_a⟩ = δ_ia, ⟨ℓ, v_b⟩ = δ_ib; the cones are unimodular
            let (va, vb) = (RAYS[a], RAYS[b]);
            let (ra, rb) = ((a == i) as i64, (b == i) as i64);
            let dt = det(va, vb);
            let l = V2::new((ra * vb.y() - rb * va.y()) / dt, (rb * va.x() - ra * vb.x()) / dt);
            Poly::linear(l)
        }))
    }
}

/// Coefficients of 1, H, H² in ℤ[H]/(H³).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass(pub [Q; 3]);

impl CohomologyClass {
    pub fn from_ints(c: [i64; 3]) -> Self {
        CohomologyClass(c.map(q))
    }
}

impl std::fmt::Display for CohomologyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = &self.0;
        write!(f, "{} + {}·H + {}·H²", fmt_q(&c[0]), fmt_q(&c[1]), fmt_q(&c[2]))
    }
}

fn courant_monomials(deg: u32) -> Vec<(Vec<usize>, PiecewisePoly)> {
    let t: Vec<PiecewisePoly> = (0..3).map(PiecewisePoly::courant).collect();
    match deg {
        0 => vec![(vec![], PiecewisePoly([0, 1, 2].map(|_| Poly::constant(q(1)))))],
        1 => (0..3).map(|i| (vec![i], t[i].clone())).collect(),
        2 => {
            let mut v = vec![];
            for i in 0..3 {
                for j in i..3 {
                    v.push((vec![i, j], t[i].mul(&t[j])));
                }
            }
            v
        }
        _ => vec![],
    }
}

/// Writes `p` in the basis of Courant monomials (modulo t_0 t_1 t_2) and
/// sends every t_i to H.
pub fn forgetful(p: &PiecewisePoly) -> Result<CohomologyClass> {
    if !p.is_continuous() {
        return Err(Error::Internal("piecewise polynomial is not continuous".into()));
    }
    let mut out = [Q::zero(), Q::zero(), Q::zero()];
    for deg in 0..=2u32 {
        let basis = courant_monomials(deg);
        let exps: Vec<(u32, u32)> = (0..=deg).map(|i| (i, deg - i)).collect();
        let mut rows = vec![];
        let mut rhs = vec![];
        for c in 0..3 {
            for &(i, j) in &exps {
                rows.push(basis.iter().map(|(_, b)| b.0[c].coeff(i, j)).collect::<Vec<_>>());
                rhs.push(p.0[c].coeff(i, j));
            }
        }
        let x = solve(&rows, &rhs)
            .ok_or_else(|| Error::Internal(format!("degree-{deg} part is not in the span of Courant monomials")))?;
        out[deg as usize] = x.into_iter().fold(Q::zero(), |a, b| a + b);
    }
    if p.0.iter().any(|poly| poly.degree().unwrap_or(0) > 2) {
        return Err(Error::Internal("degree above 2 is not supported".into()));
    }
    Ok(CohomologyClass(out))
}

/// Equivariant c_1 and c_2 of E_{m,n}. The torus acts on the fibres through
/// minus the slopes, so the Chern roots on a cone are −⟨m_±, ξ⟩.
pub fn equivariant_chern(m: i64, n: i64) -> Result<(PiecewisePoly, PiecewisePoly)> {
    if m == n {
        return pre("m must differ from n");
    }
    let s = phi_mn_slopes(m, n);
    let roots = |c: usize| (Poly::linear(-s[c][0]), Poly::linear(-s[c][1]));
    let c1 = PiecewisePoly([0, 1, 2].map(|c| {
        let (a, b) = roots(c);
        a.add(&b)
    }));
    let c2 = PiecewisePoly([0, 1, 2].map(|c| {
        let (a, b) = roots(c);
        a.mul(&b)
    }));
    if !c1.is_continuous() || !c2.is_continuous() {
        return Err(Error::Internal("local model Chern classes are not continuous".into()));
    }
    Ok((c1, c2))
}

pub fn total_chern(m: i64, n: i64) -> Result<CohomologyClass> {
    let (c1, c2) = equivariant_chern(m, n)?;
    let a = forgetful(&c1)?;
    let b = forgetful(&c2)?;
    Ok(CohomologyClass([q(1), a.0[1].clone(), b.0[2].clone()]))
}

#[derive(Clone, Debug, Serialize)]
pub struct Stability {
    pub c1: String,
    pub c2: String,
    /// c_1² − 4c_2
    pub discriminant: String,
    pub stable: bool,
    pub note: String,
}

pub fn stability_discriminant(m: i64, n: i64) -> Result<Stability> {
    let c = total_chern(m, n)?;
    let delta = &c.0[1] * &c.0[1] - q(4) * &c.0[2];
    if delta != q(-3 * (m - n) * (m - n)) {
        return Err(Error::Internal(format!("discriminant {} differs from -3(m-n)^2", fmt_q(&delta))));
    }
    let stable = delta < Q::zero() && delta != q(-4);
    Ok(Stability {
        c1: fmt_q(&c.0[1]),
        c2: fmt_q(&c.0[2]),
        discriminant: fmt_q(&delta),
        stable,
        note: "discriminant taken as c1^2 - 4 c2; the form c2 - 4 c1^2 does not equal -3(m-n)^2".into(),
    })
}

/// A continuous PL function on a complete fan: `slopes[i]` lives on the cone
/// spanned by `rays[i]` and `rays[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlFunction {
    pub rays: Vec<V2>,
    pub slopes: Vec<V2>,
}

impl PlFunction {
    pub fn new(rays: Vec<V2>, slopes: Vec<V2>) -> Result<Self> {
        let f = PlFunction { rays, slopes };
        f.check()?;
        Ok(f)
    }
    pub fn p2(slopes: [V2; 3]) -> Self {
        // ccw order v1, v2, v0 puts σ0, σ1, σ2 in positions 0, 1, 2
        PlFunction { rays: vec![RAYS[1], RAYS[2], RAYS[0]], slopes: slopes.to_vec() }
    }
    pub fn check(&self) -> Result<()> {
        let k = self.rays.len();
        if self.slopes.len() != k {
            return Err(Error::Invalid("one slope per cone is required".into()));
        }
        if !is_complete_ccw(&self.rays) {
            return Err(Error::Invalid("rays do not form a complete ccw fan".into()));
        }
        for i in 0..k {
            let prev = self.slopes[(i + k - 1) % k];
            if (self.slopes[i] - prev).dot(self.rays[i]) != 0 {
                return Err(Error::Invalid(format!("slopes disagree on ray {}", self.rays[i])));
            }
        }
        Ok(())
    }
    pub fn value_on_ray(&self, i: usize) -> i64 {
        self.slopes[i].dot(self.rays[i])
    }
    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.rays, o.rays);
        PlFunction { rays: self.rays.clone(), slopes: self.slopes.iter().zip(&o.slopes).map(|(a, b)| *a - *b).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolytope {
    pub points: Vec<V2>,
    pub vertices: Vec<V2>,
}

impl NewtonPolytope {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn contains(&self, u: V2) -> bool {
        self.points.binary_search(&u).is_ok()
    }
}

/// Lattice points u with ⟨u, ρ⟩ ≥ φ(ρ) on every ray, scanned row by row.
pub fn newton_polytope(f: &PlFunction) -> Result<NewtonPolytope> {
    f.check()?;
    // half-planes a·u ≥ c
    let hs: Vec<(V2, i64)> = (0..f.rays.len()).map(|i| (f.rays[i], f.value_on_ray(i))).collect();
    let feasible = |x: &Q, y: &Q| hs.iter().all(|(a, c)| q(a.x()) * x + q(a.y()) * y >= q(*c));
    let mut ys: Vec<Q> = vec![];
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let (a, c) = hs[i];
            let (b, d) = hs[j];
            let dt = det(a, b);
            if dt == 0 {
                continue;
            }
            let x = Q::new(BigInt::from(c * b.y() - d * a.y()), BigInt::from(dt));
            let y = Q::new(BigInt::from(a.x() * d - b.x() * c), BigInt::from(dt));
            if feasible(&x, &y) {
                ys.push(y);
            }
        }
    }
    let mut points = vec![];
    if let (Some(lo), Some(hi)) = (ys.iter().min(), ys.iter().max()) {
        let (lo, hi) = (ceil_q(lo).to_i64().unwrap(), floor_q(hi).to_i64().unwrap());
        for y in lo..=hi {
            let mut xmin: Option<Q> = None;
            let mut xmax: Option<Q> = None;
            let mut ok = true;
            for (a, c) in &hs {
                let r = q(*c - a.y() * y);
                match a.x().signum() {
                    1 => {
                        let b = r / q(a.x());
                        xmin = Some(xmin.map_or(b.clone(), |m| m.max(b)));
                    }
                    -1 => {
                        let b = r / q(a.x());
                        xmax = Some(xmax.map_or(b.clone(), |m| m.min(b)));
                    }
                    _ => ok &= r <= Q::zero(),
                }
            }
            let (Some(xmin), Some(xmax)) = (xmin, xmax) else {
                return Err(Error::Internal("unbounded Newton polytope on a complete fan".into()));
            };
            if !ok {
                continue;
            }
            let (a, b) = (ceil_q(&xmin).to_i64().unwrap(), floor_q(&xmax).to_i64().unwrap());
            points.extend((a..=b).map(|x| V2::new(x, y)));
        }
    }
    points.sort();
    let vertices = convex_hull(&points);
    Ok(NewtonPolytope { points, vertices })
}

/// Monotone-chain hull, ccw, collinear points dropped.
pub fn convex_hull(pts: &[V2]) -> Vec<V2> {
    let mut p = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let cross = |o: V2, a: V2, b: V2| det(a - o, b - o);
    let mut lower: Vec<V2> = vec![];
    for &x in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], x) <= 0 {
            lower.pop();
        }
        lower.push(x);
    }
    let mut upper: Vec<V2> = vec![];
    for &x in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], x) <= 0 {
            upper.pop();
        }
        upper.push(x);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// The weight-m(σ) monomial section is nonzero at the fixed point of σ iff
/// m(σ) is a lattice point of the polytope.
pub fn nonvanishing_at_fixed_point(f: &PlFunction, poly: &NewtonPolytope, cone: usize) -> Result<bool> {
    let m = *f.slopes.get(cone).ok_or_else(|| Error::Invalid(format!("no cone {cone}")))?;
    Ok(poly.contains(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_model::phi_k_slopes;

    fn lin(a: i64, b: i64) -> Poly {
        Poly::linear(V2::new(a, b))
    }

    #[test]
    fn courant_functions() {
        for i in 0..3 {
            let t = PiecewisePoly::courant(i);
            assert!(t.is_continuous());
            for (c, [a, b]) in CONES.iter().enumerate() {
                for r in [*a, *b] {
                    let v = t.0[c].restrict(RAYS[r]).get(&1).cloned().unwrap_or_else(Q::zero);
                    assert_eq!(v, q((r == i) as i64));
                }
            }
        }
        assert_eq!(PiecewisePoly::courant(0).0[1], lin(-1, 0));
    }

    #[test]
    fn chern_on_cones() {
        // (1,0): roots are minus the slopes, so c1 = ξ1 + ξ2 on σ0
        let (c1, _) = equivariant_chern(1, 0).unwrap();
        assert_eq!(c1.0[0], lin(1, 1));
        let (_, c2) = equivariant_chern(2, -1).unwrap();
        // n² = 1 and n(n−m) = (−1)(−3) = 3
        let expect = Poly::term(q(1), 2, 0).add(&Poly::term(q(3), 1, 1));
        assert_eq!(c2.0[1], expect);
    }

    #[test]
    fn chern_matches_display_up_to_c1_sign() {
        for (m, n) in [(1, 0), (3, -2), (-1, 4)] {
            let (c1, c2) = equivariant_chern(m, n).unwrap();
            let d = n - m;
            let disp_c1 = [lin(d, d), lin(2 * n, d), lin(d, 2 * n)];
            let disp_c2 = [
                Poly::term(q(d * d), 1, 1),
                Poly::term(q(n * n), 2, 0).add(&Poly::term(q(n * d), 1, 1)),
                Poly::term(q(n * d), 1, 1).add(&Poly::term(q(n * n), 0, 2)),
            ];
            for c in 0..3 {
                assert_eq!(c1.0[c], disp_c1[c].scale(&q(-1)));
                assert_eq!(c2.0[c], disp_c2[c]);
            }
        }
    }

    #[test]
    fn forgetful_basics() {
        assert_eq!(forgetful(&PiecewisePoly::courant(0)).unwrap(), CohomologyClass::from_ints([0, 1, 0]));
        assert_eq!(forgetful(&PiecewisePoly::zero()).unwrap(), CohomologyClass::from_ints([0, 0, 0]));
        let t = (0..3).map(PiecewisePoly::courant).collect::<Vec<_>>();
        assert_eq!(t[0].mul(&t[1]).mul(&t[2]), PiecewisePoly::zero());
        let broken = PiecewisePoly([lin(1, 0), lin(0, 0), lin(0, 0)]);
        assert!(forgetful(&broken).is_err());
    }

    #[test]
    fn total_chern_examples() {
        assert_eq!(total_chern(1, 0).unwrap(), CohomologyClass::from_ints([1, 1, 1]));
        assert_eq!(total_chern(2, -1).unwrap(), CohomologyClass::from_ints([1, 1, 7]));
        assert_eq!(total_chern(1, -1).unwrap(), CohomologyClass::from_ints([1, 0, 3]));
    }

    #[test]
    fn discriminant_examples() {
        let s = stability_discriminant(1, 0).unwrap();
        assert_eq!((s.discriminant.as_str(), s.stable), ("-3", true));
        assert_eq!(stability_discriminant(3, 1).unwrap().discriminant, "-12");
        for n in -4..4 {
            assert_eq!(stability_discriminant(n + 1, n).unwrap().discriminant, "-3");
        }
    }

    fn brute(f: &PlFunction, r: i64) -> Vec<V2> {
        let mut v = vec![];
        for x in -r..=r {
            for y in -r..=r {
                let u = V2::new(x, y);
                let ok = (0..f.rays.len()).all(|i| {
                    let k = f.rays.len();
                    (u - f.slopes[i]).dot(f.rays[i]) >= 0 && (u - f.slopes[i]).dot(f.rays[(i + 1) % k]) >= 0
                });
                if ok {
                    v.push(u);
                }
            }
        }
        v
    }

    #[test]
    fn newton_phi1_and_zero() {
        let f = PlFunction::p2(phi_k_slopes(1));
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.points, brute(&f, 2));
        assert_eq!(p.points.len(), 3);
        let z = PlFunction::p2([V2::ZERO; 3]);
        assert_eq!(newton_polytope(&z).unwrap().points, vec![V2::ZERO]);
        for k in 0..5 {
            let n = newton_polytope(&PlFunction::p2(phi_k_slopes(k))).unwrap().points.len() as i64;
            assert_eq!(n, (k + 1) * (k + 2) / 2);
        }
        assert!(newton_polytope(&PlFunction::p2(phi_k_slopes(-1))).unwrap().is_empty());
    }

    #[test]
    fn newton_segment_on_p1xp1() {
        let rays = vec![V2::new(1, 0), V2::new(0, 1), V2::new(-1, 0), V2::new(0, -1)];
        // values 0, 0, -1, 0 on the four rays
        let f = PlFunction::new(rays, vec![V2::new(0, 0), V2::new(1, 0), V2::new(1, 0), V2::new(0, 0)]).unwrap();
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.points, vec![V2::new(0, 0), V2::new(1, 0)]);
        assert_eq!(p.points, brute(&f, 4));
    }

    #[test]
    fn nonconvex_function_fails_on_some_cones() {
        let rays = vec![V2::new(1, 0), V2::new(1, 1), V2::new(0, 1), V2::new(-1, -1)];
        let slopes = vec![V2::new(0, -1), V2::new(-1, 0), V2::new(2, 0), V2::new(0, 2)];
        let f = PlFunction::new(rays, slopes).unwrap();
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.points, brute(&f, 6));
        let got: Vec<bool> = (0..4).map(|c| nonvanishing_at_fixed_point(&f, &p, c).unwrap()).collect();
        assert_eq!(got, vec![false, false, true, true]);
    }

    #[test]
    fn empty_polytope_never_nonvanishing() {
        let f = PlFunction::p2(phi_k_slopes(-2));
        let p = newton_polytope(&f).unwrap();
        assert!(p.is_empty());
        assert!((0..3).all(|c| !nonvanishing_at_fixed_point(&f, &p, c).unwrap()));
    }

    #[test]
    fn phi1_every_cone_nonvanishing() {
        let f = PlFunction::p2(phi_k_slopes(1));
        let p = newton_polytope(&f).unwrap();
        assert!((0..3).all(|c| nonvanishing_at_fixed_point(&f, &p, c).unwrap()));
        assert_eq!(p.vertices.len(), 3);
    }
}
