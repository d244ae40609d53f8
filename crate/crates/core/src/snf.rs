//! Dense Smith normal form over ℤ and Gaussian elimination over GF(2).
//!
//! Used as an independent route for small coboundary problems; entries are
//! i128 and any overflow is reported rather than wrapped.

use crate::error::{Error, Result};

pub type Mat = Vec<Vec<i128>>;

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

fn ovf() -> Error {
    Error::Internal("integer overflow in Smith normal form".into())
}

fn add_row(m: &mut Mat, dst: usize, src: usize, k: i128) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    for j in 0..m[dst].len() {
        let v = m[src][j].checked_mul(k).and_then(|x| m[dst][j].checked_add(x)).ok_or_else(ovf)?;
        m[dst][j] = v;
    }
    Ok(())
}

fn add_col(m: &mut Mat, dst: usize, src: usize, k: i128) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    for row in m.iter_mut() {
        row[dst] = row[src].checked_mul(k).and_then(|x| row[dst].checked_add(x)).ok_or_else(ovf)?;
    }
    Ok(())
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// U·A·V = D with D diagonal, d_i | d_{i+1}, U and V unimodular.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
}

pub fn smith_normal_form(a: &Mat) -> Result<Smith> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t] != 0 {
                    let q = d[i][t].div_euclid(d[t][t]);
                    add_row(&mut d, i, t, -q)?;
                    add_row(&mut u, i, t, -q)?;
                    if d[i][t] != 0 {
                        d.swap(t, i);
                        u.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if d[t][j] != 0 {
                    let q = d[t][j].div_euclid(d[t][t]);
                    add_col(&mut d, j, t, -q)?;
                    add_col(&mut v, j, t, -q)?;
                    if d[t][j] != 0 {
                        swap_cols(&mut d, t, j);
                        swap_cols(&mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold any offending row into the pivot row
            let p = d[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| d[i][j] % p != 0));
            match bad {
                Some(i) => {
                    add_row(&mut d, t, i, 1)?;
                    add_row(&mut u, t, i, 1)?;
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    Ok(Smith { u, d, v })
}

fn mat_vec(m: &Mat, x: &[i128]) -> Result<Vec<i128>> {
    m.iter()
        .map(|row| {
            row.iter().zip(x).try_fold(0i128, |acc, (&a, &b)| a.checked_mul(b).and_then(|p| acc.checked_add(p)).ok_or_else(ovf))
        })
        .collect()
}

/// Some integer x with A·x = b, or None.
pub fn solve_integer(a: &Mat, b: &[i128]) -> Result<Option<Vec<i128>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let s = smith_normal_form(a)?;
    let ub = mat_vec(&s.u, b)?;
    let mut y = vec![0i128; cols];
    for i in 0..rows {
        let di = if i < cols { s.d[i][i] } else { 0 };
        if di == 0 {
            if ub[i] != 0 {
                return Ok(None);
            }
        } else {
            if ub[i] % di != 0 {
                return Ok(None);
            }
            y[i] = ub[i] / di;
        }
    }
    Ok(Some(mat_vec(&s.v, &y)?))
}

/// Some x over GF(2) with A·x = b, or None.
pub fn solve_gf2(a: &[Vec<u8>], b: &[u8]) -> Option<Vec<u8>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<u8>> = a.iter().zip(b).map(|(r, &bi)| r.iter().map(|x| x & 1).chain([bi & 1]).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] == 1) else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && m[i][c] == 1 {
                for j in c..=cols {
                    m[i][j] ^= m[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| row[cols] == 1) {
        return None;
    }
    let mut x = vec![0u8; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &Mat, b: &Mat) -> Mat {
        let (n, k, m) = (a.len(), b.len(), b[0].len());
        (0..n).map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
    }

    #[test]
    fn smith_of_small_matrix() {
        let a: Mat = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a).unwrap();
        assert_eq!(mul(&mul(&s.u, &a), &s.v), s.d);
        // invariant factors of this matrix: 2, 6, 12
        assert_eq!([s.d[0][0], s.d[1][1], s.d[2][2]], [2, 6, 12]);
    }

    #[test]
    fn integer_solutions() {
        let a: Mat = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_integer(&a, &[4, 9]).unwrap(), Some(vec![2, 3]));
        assert_eq!(solve_integer(&a, &[1, 0]).unwrap(), None);
        // boundary of a triangle: δ of vertex values hits any edge values with zero sum
        let d: Mat = vec![vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]];
        let x = solve_integer(&d, &[3, -5, 2]).unwrap().unwrap();
        assert_eq!(mat_vec(&d, &x).unwrap(), vec![3, -5, 2]);
        assert_eq!(solve_integer(&d, &[1, 0, 0]).unwrap(), None);
    }

    #[test]
    fn gf2_solutions() {
        let a = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert!(solve_gf2(&a, &[1, 1, 0]).is_some());
        assert!(solve_gf2(&a, &[1, 0, 0]).is_none());
    }
}
