//! Two-variable Laurent polynomials and matrices over them, plus the
//! transition functions of the rank-2 local model on the three standard
//! charts of ℙ².
//!
//! Chart `i` uses the inhomogeneous coordinates w_i^j = ζ^j/ζ^i for the two
//! indices j ≠ i in increasing order, so chart 0 is (w_0^1, w_0^2), chart 1 is
//! (w_1^0, w_1^2) and chart 2 is (w_2^0, w_2^1). Variables are called x, y.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{pre, Error, Result};
use crate::linalg::{fmt_q, q, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<(i64, i64), Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::constant(q(1))
    }
    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0, 0)
    }
    pub fn monomial(c: Q, i: i64, j: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        LaurentPoly { terms }
    }
    pub fn x() -> Self {
        Self::monomial(q(1), 1, 0)
    }
    pub fn y() -> Self {
        Self::monomial(q(1), 0, 1)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Q)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: (i64, i64), c: Q) {
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
    pub fn neg(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                r.add_term((ea.0 + eb.0, ea.1 + eb.1), ca * cb);
            }
        }
        r
    }
    pub fn scale(&self, c: &Q) -> Self {
        self.mul(&Self::constant(c.clone()))
    }
    /// `Some((c, i, j))` when this is a single term c·x^i·y^j.
    pub fn as_monomial(&self) -> Option<(Q, i64, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        Some((c.clone(), e.0, e.1))
    }
    pub fn substitute(&self, map: &ChartMap) -> Self {
        let mut r = Self::zero();
        for (&(i, j), c) in &self.terms {
            let [(sx, ex), (sy, ey)] = map.images;
            let sign = if (sx < 0 && i.rem_euclid(2) == 1) ^ (sy < 0 && j.rem_euclid(2) == 1) { -1 } else { 1 };
            let e = (i * ex[0] + j * ey[0], i * ex[1] + j * ey[1]);
            r.add_term(e, c * q(sign));
        }
        r
    }

    /// Serialized form: [i, j, numerator, denominator] per term.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|((i, j), c)| serde_json::json!([i, j, c.numer().to_string(), c.denom().to_string()]))
                .collect(),
        )
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), c)| {
                let mut s = fmt_q(c);
                if *i != 0 {
                    s += &format!("*x^{i}");
                }
                if *j != 0 {
                    s += &format!("*y^{j}");
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Monomial substitution x ↦ ±x^a y^b, y ↦ ±x^c y^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub from: u8,
    pub to: u8,
    pub images: [(i8, [i64; 2]); 2],
}

impl ChartMap {
    pub fn new(from: u8, to: u8, images: [(i8, [i64; 2]); 2]) -> Result<Self> {
        let d = images[0].1[0] * images[1].1[1] - images[0].1[1] * images[1].1[0];
        if d.abs() != 1 || images.iter().any(|(s, _)| s.abs() != 1) {
            return Err(Error::Invalid("chart map is not an invertible signed monomial map".into()));
        }
        Ok(ChartMap { from, to, images })
    }

    pub fn identity(chart: u8) -> Self {
        ChartMap { from: chart, to: chart, images: [(1, [1, 0]), (1, [0, 1])] }
    }

    /// Expresses chart `c` coordinates in chart 0 coordinates X = w_0^1, Y = w_0^2.
    pub fn to_chart0(c: u8) -> Self {
        match c {
            0 => Self::identity(0),
            // w_1^0 = 1/X, w_1^2 = Y/X
            1 => ChartMap { from: 1, to: 0, images: [(1, [-1, 0]), (1, [-1, 1])] },
            // w_2^0 = 1/Y, w_2^1 = X/Y
            2 => ChartMap { from: 2, to: 0, images: [(1, [0, -1]), (1, [1, -1])] },
            _ => panic!("chart index out of range"),
        }
    }

    /// self then other: substitute self's images into other's frame.
    pub fn then(&self, other: &ChartMap) -> Result<ChartMap> {
        if self.to != other.from {
            return Err(Error::Invalid("chart maps do not compose".into()));
        }
        let img = |k: usize| {
            let p = LaurentPoly::monomial(q(self.images[k].0 as i64), self.images[k].1[0], self.images[k].1[1])
                .substitute(other);
            let (c, i, j) = p.as_monomial().expect("monomial stays monomial");
            (if c == q(1) { 1 } else { -1 }, [i, j])
        };
        ChartMap::new(self.from, other.to, [img(0), img(1)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<LaurentPoly>,
    pub chart: u8,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    chart: u8,
    rows: Vec<Vec<serde_json::Value>>,
}

impl LaurentMatrix {
    pub fn from_rows(chart: u8, rows: Vec<Vec<LaurentPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        LaurentMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect(), chart }
    }
    pub fn identity(n: usize, chart: u8) -> Self {
        let mut m = Self::zeros(n, n, chart);
        for i in 0..n {
            m.entries[i * n + i] = LaurentPoly::one();
        }
        m
    }
    pub fn zeros(rows: usize, cols: usize, chart: u8) -> Self {
        LaurentMatrix { rows, cols, entries: vec![LaurentPoly::zero(); rows * cols], chart }
    }
    pub fn diag(chart: u8, d: Vec<LaurentPoly>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n, chart);
        for (i, p) in d.into_iter().enumerate() {
            m.entries[i * n + i] = p;
        }
        m
    }
    pub fn const_diag(chart: u8, d: &[Q]) -> Self {
        Self::diag(chart, d.iter().map(|c| LaurentPoly::constant(c.clone())).collect())
    }
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.chart != o.chart {
            return Err(Error::Invalid(format!("chart mismatch {} vs {}", self.chart, o.chart)));
        }
        if self.cols != o.rows {
            return Err(Error::Invalid("dimension mismatch".into()));
        }
        let mut r = Self::zeros(self.rows, o.cols, self.chart);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = LaurentPoly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                r.set(i, j, acc);
            }
        }
        Ok(r)
    }
    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.chart != o.chart || self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Invalid("shape or chart mismatch".into()));
        }
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect();
        Ok(LaurentMatrix { entries, ..self.clone() })
    }
    pub fn transpose(&self) -> Self {
        let mut r = Self::zeros(self.cols, self.rows, self.chart);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(j, i, self.get(i, j).clone());
            }
        }
        r
    }
    pub fn substitute(&self, map: &ChartMap) -> Result<Self> {
        if map.from != self.chart {
            return Err(Error::Invalid("chart map source does not match matrix chart".into()));
        }
        Ok(LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p.substitute(map)).collect(),
            chart: map.to,
        })
    }
    pub fn to_chart0(&self) -> Self {
        self.substitute(&ChartMap::to_chart0(self.chart)).expect("source chart matches")
    }
    pub fn det2(&self) -> LaurentPoly {
        assert!(self.rows == 2 && self.cols == 2);
        self.get(0, 0).mul(self.get(1, 1)).sub(&self.get(0, 1).mul(self.get(1, 0)))
    }
    /// Inverse of a 2×2 matrix whose determinant is a monomial.
    pub fn inverse2(&self) -> Option<Self> {
        let (c, i, j) = self.det2().as_monomial()?;
        let dinv = LaurentPoly::monomial(c.recip(), -i, -j);
        let adj = LaurentMatrix::from_rows(
            self.chart,
            vec![
                vec![self.get(1, 1).clone(), self.get(0, 1).neg()],
                vec![self.get(1, 0).neg(), self.get(0, 0).clone()],
            ],
        );
        Some(LaurentMatrix { entries: adj.entries.iter().map(|p| p.mul(&dinv)).collect(), ..adj })
    }
    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows, self.chart)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_json()).collect()).collect();
        serde_json::to_value(MatrixJson { chart: self.chart, rows }).expect("serializable")
    }
}

impl std::fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "chart {}:", self.chart)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The three transition matrices, indexed as (τ10, τ21, τ02).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transitions {
    pub t10: LaurentMatrix,
    pub t21: LaurentMatrix,
    pub t02: LaurentMatrix,
}

impl Transitions {
    pub fn as_array(&self) -> [&LaurentMatrix; 3] {
        [&self.t10, &self.t21, &self.t02]
    }
}

fn check_constants(a: &[Q; 3], b: &[Q; 3]) -> Result<()> {
    if a.iter().chain(b).any(|c| c.is_zero()) {
        return pre("all constants a_i, b_i must be nonzero");
    }
    Ok(())
}

fn mono(c: &Q, i: i64, j: i64) -> LaurentPoly {
    LaurentPoly::monomial(c.clone(), i, j)
}

pub fn build_tau_sf(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<Transitions> {
    if m == n {
        return pre("m must differ from n");
    }
    check_constants(a, b)?;
    let z = LaurentPoly::zero;
    // chart 0: w_0^1 = x
    let t10 = LaurentMatrix::diag(0, vec![mono(&a[0], -m, 0), mono(&b[0], -n, 0)]);
    // chart 1: w_1^2 = y
    let t21 = LaurentMatrix::diag(1, vec![mono(&b[1], 0, -n), mono(&a[1], 0, -m)]);
    // chart 2: w_2^0 = x
    let t02 = LaurentMatrix::from_rows(2, vec![vec![z(), mono(&b[2], -n, 0)], vec![mono(&a[2], -m, 0), z()]]);
    Ok(Transitions { t10, t21, t02 })
}

pub fn build_theta(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<Transitions> {
    if m == n {
        return pre("m must differ from n");
    }
    check_constants(a, b)?;
    let unip = |chart: u8, lower: bool, p: LaurentPoly| {
        let mut t = LaurentMatrix::identity(2, chart);
        if lower {
            t.set(1, 0, p);
        } else {
            t.set(0, 1, p);
        }
        t
    };
    let k = (m - n).abs();
    // ratios: chart 0 w_0^2/w_0^1 = y/x, chart 1 w_1^0/w_1^2 = x/y, chart 2 w_2^1/w_2^0 = y/x
    let r0 = |c: Q| mono(&-c, -k, k);
    let r1 = |c: Q| mono(&-c, k, -k);
    let r2 = |c: Q| mono(&-c, -k, k);
    Ok(if m > n {
        Transitions {
            t10: unip(0, true, r0(&a[0] * &b[1] * &a[2])),
            t21: unip(1, false, r1(&a[0] * &a[1] * &b[2])),
            t02: unip(2, true, r2(&b[0] * &a[1] * &a[2])),
        }
    } else {
        Transitions {
            t10: unip(0, false, r0(&b[0] * &a[1] * &b[2])),
            t21: unip(1, true, r1(&b[0] * &b[1] * &a[2])),
            t02: unip(2, false, r2(&a[0] * &b[1] * &b[2])),
        }
    })
}

/// τ_ij = τ^sf_ij · Θ_ij, each in its own chart.
pub fn build_tau(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<Transitions> {
    let sf = build_tau_sf(m, n, a, b)?;
    let th = build_theta(m, n, a, b)?;
    Ok(Transitions { t10: sf.t10.mul(&th.t10)?, t21: sf.t21.mul(&th.t21)?, t02: sf.t02.mul(&th.t02)? })
}

pub fn reference_constants() -> ([Q; 3], [Q; 3]) {
    ([q(-1), q(-1), q(-1)], [q(1), q(1), q(1)])
}

/// τ' of the reference constants a_i = −1, b_i = 1.
pub fn build_tau_reference(m: i64, n: i64) -> Result<Transitions> {
    let (a, b) = reference_constants();
    build_tau(m, n, &a, &b)
}

/// τ02·τ21·τ10 evaluated in chart 0.
pub fn cocycle_product(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<LaurentMatrix> {
    let t = build_tau(m, n, a, b)?;
    t.t02.to_chart0().mul(&t.t21.to_chart0())?.mul(&t.t10)
}

pub fn verify_cocycle(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<bool> {
    Ok(cocycle_product(m, n, a, b)?.is_identity())
}

pub fn constants_product(a: &[Q; 3], b: &[Q; 3]) -> Q {
    a.iter().chain(b).fold(Q::one(), |acc, c| acc * c)
}

/// The diagonal gauge (f0, f1, f2) relating τ for constants (a, b) to the
/// reference τ'. The first entry of f2 carries a minus sign; without it two
/// of the three identities fail.
pub fn independence_gauge(a: &[Q; 3], b: &[Q; 3]) -> [[Q; 2]; 3] {
    [
        [q(1), &a[0] * &b[1] * &a[2]],
        [-a[0].clone(), -(&a[1] * &b[2]).recip()],
        [-(&a[0] * &b[1]), b[2].recip()],
    ]
}

/// Checks τ02 f2 = f0 τ'02, τ21 f1 = f2 τ'21, τ10 f0 = f1 τ'10 for a given gauge.
pub fn check_gauge(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3], f: &[[Q; 2]; 3]) -> Result<bool> {
    let t = build_tau(m, n, a, b)?;
    let tp = build_tau_reference(m, n)?;
    let fm = |i: usize, chart: u8| LaurentMatrix::const_diag(chart, &f[i]);
    let ok02 = t.t02.mul(&fm(2, 2))? == fm(0, 2).mul(&tp.t02)?;
    let ok21 = t.t21.mul(&fm(1, 1))? == fm(2, 1).mul(&tp.t21)?;
    let ok10 = t.t10.mul(&fm(0, 0))? == fm(1, 0).mul(&tp.t10)?;
    Ok(ok02 && ok21 && ok10)
}

pub fn verify_constant_independence(m: i64, n: i64, a: &[Q; 3], b: &[Q; 3]) -> Result<bool> {
    check_constants(a, b)?;
    if constants_product(a, b) != q(-1) {
        return pre("the product of all a_i b_i must be -1");
    }
    check_gauge(m, n, a, b, &independence_gauge(a, b))
}

fn j_matrix(chart: u8) -> LaurentMatrix {
    let c = |v: i64| LaurentPoly::constant(q(v));
    LaurentMatrix::from_rows(chart, vec![vec![c(0), c(-1)], vec![c(1), c(0)]])
}

pub fn verify_duality(m: i64, n: i64) -> Result<bool> {
    if m == n {
        return pre("m must differ from n");
    }
    let t = build_tau_reference(m, n)?;
    let s = build_tau_reference(n, m)?;
    let d = build_tau_reference(-m, -n)?;
    let j = |c| j_matrix(c);
    let jinv = |c| j_matrix(c).inverse2().expect("J is invertible");
    let swap = t.t10.mul(&j(0))? == jinv(0).mul(&s.t10)?
        && t.t21.mul(&jinv(1))? == j(1).mul(&s.t21)?
        && t.t02.mul(&j(2))? == j(2).mul(&s.t02)?;
    let mut dual = true;
    for (x, y) in t.as_array().into_iter().zip(d.as_array()) {
        dual &= x.inverse2().map(|inv| inv == y.transpose()).unwrap_or(false);
    }
    Ok(swap && dual)
}
