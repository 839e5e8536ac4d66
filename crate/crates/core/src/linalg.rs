// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra: products, Kronecker products, matrix
//! exponential, a symmetric eigensolver, and small LU solves.
//!
//! Everything in this artifact stays at dimensions of a few thousand at
//! most, so dense storage and straightforward algorithms are the right
//! trade-off. The matrix exponential follows Higham's scaling-and-squaring
//! Padé(13) scheme; the eigensolver is a cyclic Jacobi for real symmetric
//! matrices (all heavy spectral work here is real symmetric).

use ndarray::{Array1, Array2};

use crate::C64;

pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;
pub type RMat = Array2<f64>;

/// Complex matrix product through four real GEMMs.
///
/// ndarray's generic complex fallback is scalar-looped; splitting into real
/// parts keeps the fast matrixmultiply kernels in play for the large oracle
/// propagations.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let (n, k) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k, k2, "matmul: inner dimensions differ");
    let ar = a.mapv(|z| z.re);
    let ai = a.mapv(|z| z.im);
    let br = b.mapv(|z| z.re);
    let bi = b.mapv(|z| z.im);
    let re = ar.dot(&br) - ai.dot(&bi);
    let im = ar.dot(&bi) + ai.dot(&br);
    let mut out = CMat::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            out[[i, j]] = C64::new(re[[i, j]], im[[i, j]]);
        }
    }
    out
}

pub fn matvec(a: &CMat, x: &CVec) -> CVec {
    a.dot(x)
}

/// Row-vector times matrix, used by the oracle's row propagation.
pub fn vecmat(x: &CVec, a: &CMat) -> CVec {
    let (n, m) = a.dim();
    assert_eq!(x.len(), n, "vecmat: dimensions differ");
    let mut out = CVec::zeros(m);
    for i in 0..n {
        let xi = x[i];
        if xi == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..m {
            out[j] += xi * a[[i, j]];
        }
    }
    out
}

pub fn dagger(a: &CMat) -> CMat {
    let (n, m) = a.dim();
    let mut out = CMat::zeros((m, n));
    for i in 0..n {
        for j in 0..m {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

pub fn identity(n: usize) -> CMat {
    CMat::eye(n)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    matmul(a, b) - matmul(b, a)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = CMat::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn one_norm(a: &CMat) -> f64 {
    let (n, m) = a.dim();
    let mut best = 0.0_f64;
    for j in 0..m {
        let mut s = 0.0;
        for i in 0..n {
            s += a[[i, j]].norm();
        }
        best = best.max(s);
    }
    best
}

/// Matrix exponential by scaling-and-squaring with Padé(13).
///
/// Higham (2005), SIAM J. Matrix Anal. Appl. 26(4), 1179.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    const THETA13: f64 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let a1 = a.mapv(|z| z * scale);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let id = identity(n);
    let a2 = matmul(&a1, &a1);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a2, &a4);

    let u_inner = a6.mapv(|z| z * B[13])
        + a4.mapv(|z| z * B[11])
        + a2.mapv(|z| z * B[9]);
    let u_poly = matmul(&a6, &u_inner)
        + a6.mapv(|z| z * B[7])
        + a4.mapv(|z| z * B[5])
        + a2.mapv(|z| z * B[3])
        + id.mapv(|z| z * B[1]);
    let u = matmul(&a1, &u_poly);

    let v_inner = a6.mapv(|z| z * B[12])
        + a4.mapv(|z| z * B[10])
        + a2.mapv(|z| z * B[8]);
    let v = matmul(&a6, &v_inner)
        + a6.mapv(|z| z * B[6])
        + a4.mapv(|z| z * B[4])
        + a2.mapv(|z| z * B[2])
        + id.mapv(|z| z * B[0]);

    // Solve (V - U) R = (V + U).
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = solve_matrix(&lhs, &rhs);
    for _ in 0..s {
        r = matmul(&r, &r);
    }
    r
}

/// LU decomposition with partial pivoting; returns (LU, pivots).
fn lu_decompose(a: &CMat) -> (CMat, Vec<usize>) {
    let n = a.nrows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[[k, k]].norm();
        for i in (k + 1)..n {
            let v = lu[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[p, j]];
                lu[[p, j]] = tmp;
            }
            piv.swap(k, p);
        }
        let pivot = lu[[k, k]];
        assert!(pivot.norm() > 0.0, "lu_decompose: singular matrix");
        for i in (k + 1)..n {
            let f = lu[[i, k]] / pivot;
            lu[[i, k]] = f;
            for j in (k + 1)..n {
                let sub = f * lu[[k, j]];
                lu[[i, j]] -= sub;
            }
        }
    }
    (lu, piv)
}

fn lu_solve_vec(lu: &CMat, piv: &[usize], b: &CVec) -> CVec {
    let n = lu.nrows();
    let mut x = CVec::zeros(n);
    for i in 0..n {
        x[i] = b[piv[i]];
    }
    for i in 0..n {
        for j in 0..i {
            let sub = lu[[i, j]] * x[j];
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let sub = lu[[i, j]] * x[j];
            x[i] -= sub;
        }
        x[i] /= lu[[i, i]];
    }
    x
}

/// Solve A X = B for X.
pub fn solve_matrix(a: &CMat, b: &CMat) -> CMat {
    let (lu, piv) = lu_decompose(a);
    let (n, m) = b.dim();
    let mut out = CMat::zeros((n, m));
    for j in 0..m {
        let col = b.column(j).to_owned();
        let x = lu_solve_vec(&lu, &piv, &col);
        for i in 0..n {
            out[[i, j]] = x[i];
        }
    }
    out
}

/// Solve A x = b for one right-hand side.
pub fn solve_vec(a: &CMat, b: &CVec) -> CVec {
    let (lu, piv) = lu_decompose(a);
    lu_solve_vec(&lu, &piv, b)
}

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// Returns eigenvalues (ascending) and the orthogonal matrix of column
/// eigenvectors. Quadratically convergent; the off-diagonal Frobenius norm
/// is driven below `1e-14 * ||A||`.
pub fn eigh_real(a: &RMat) -> (Vec<f64>, RMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh_real requires a square matrix");
    let mut m = a.clone();
    let mut v = RMat::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j] ] * m[[i, j]];
            }
        }
        if off.sqrt() < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| m[[i, i]]).collect();
    let mut vecs = RMat::zeros((n, n));
    for (newc, &oldc) in idx.iter().enumerate() {
        for r in 0..n {
            vecs[[r, newc]] = v[[r, oldc]];
        }
    }
    (vals, vecs)
}
