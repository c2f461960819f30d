mod common;

use std::cell::Cell;

use common::*;
use dwd_core::linalg::*;
use dwd_core::Error;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

#[test]
fn csc_from_empty_triplets() {
    let m = CscMatrix::from_triplets(2, 2, &[]).unwrap();
    assert_eq!(m.colptr(), &[0, 0, 0]);
    assert_eq!(m.nnz(), 0);
}

#[test]
fn csc_identity_from_triplets() {
    let m = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
    assert_eq!(m, CscMatrix::identity(2));
}

#[test]
fn csc_duplicates_are_summed() {
    let m = CscMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
    assert_eq!(m.nnz(), 1);
    assert_eq!(m.get(0, 0), 3.0);
}

#[test]
fn csc_cancelling_duplicates_are_dropped() {
    let m = CscMatrix::from_triplets(2, 2, &[(0, 1, 1.5), (0, 1, -1.5), (1, 0, 0.0)]).unwrap();
    assert_eq!(m.nnz(), 0);
}

#[test]
fn csc_out_of_bounds_is_rejected() {
    assert!(matches!(CscMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]), Err(Error::IndexOutOfBounds { .. })));
    assert!(matches!(CscMatrix::from_triplets(2, 2, &[(0, 5, 1.0)]), Err(Error::IndexOutOfBounds { .. })));
}

#[test]
fn csc_from_parts_validates_structure() {
    assert!(CscMatrix::from_parts(2, 1, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
    assert!(CscMatrix::from_parts(2, 1, vec![0, 1], vec![2], vec![1.0]).is_err());
    assert!(CscMatrix::from_parts(2, 1, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
    assert!(CscMatrix::from_parts(2, 1, vec![0, 1], vec![0], vec![1.0]).is_ok());
}

#[test]
fn matvec_identity_and_zero() {
    let x = [1.0, -2.0, 3.5];
    assert_eq!(CscMatrix::identity(3).matvec(&x, false).unwrap(), x.to_vec());
    assert_eq!(CscMatrix::identity(3).matvec(&x, true).unwrap(), x.to_vec());
    assert_eq!(CscMatrix::zeros(2, 3).matvec(&x, false).unwrap(), vec![0.0; 2]);
}

#[test]
fn matvec_dimension_mismatch() {
    let m = CscMatrix::zeros(2, 3);
    assert!(matches!(m.matvec(&[1.0; 2], false), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(m.matvec(&[1.0; 3], true), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn adjoint_identity_random_5x3() {
    let mut r = rng(11);
    for _ in 0..20 {
        let m = random_csc(&mut r, 5, 3, 0.7);
        let x = random_vec(&mut r, 5);
        let y = random_vec(&mut r, 3);
        let lhs = dot(&x, &m.matvec(&y, false).unwrap());
        let rhs = dot(&m.matvec(&x, true).unwrap(), &y);
        assert!((lhs - rhs).abs() <= 1e-14);
    }
}

#[test]
fn blocked_product_matches_dense_oracle() {
    // Large enough to take the fixed-block path.
    let mut r = rng(5);
    let m = random_csc(&mut r, 300, 400, 0.5);
    assert!(m.nnz() >= 1 << 15);
    let x = random_vec(&mut r, 400);
    let got = m.matvec(&x, false).unwrap();
    let want = na_matvec(&csc_to_na(&m), &x);
    assert!(rel_diff(&got, &want) < 1e-13);
    assert_eq!(got, m.matvec(&x, false).unwrap());
}

#[test]
fn gram_matches_dense_oracle() {
    let mut r = rng(8);
    let m = random_csc(&mut r, 12, 30, 0.3);
    let g = to_na(&m.gram());
    let md = csc_to_na(&m);
    let want = &md * md.transpose();
    assert!((g - want).amax() < 1e-13);
}

#[test]
fn transpose_and_row_operations() {
    let mut r = rng(9);
    let m = random_csc(&mut r, 6, 4, 0.6);
    assert_eq!(csc_to_na(&m.transpose()), csc_to_na(&m).transpose());
    let s = [2.0, 1.0, 4.0, 0.5, 1.0, 8.0];
    let scaled = csc_to_na(&m.scale_rows(&s).unwrap());
    let divided = csc_to_na(&m.divide_rows(&s).unwrap());
    let md = csc_to_na(&m);
    for i in 0..6 {
        for j in 0..4 {
            assert_eq!(scaled[(i, j)], md[(i, j)] * s[i]);
            assert_eq!(divided[(i, j)], md[(i, j)] / s[i]);
        }
    }
    let kept = m.select_rows(&[1, 4]).unwrap();
    for j in 0..4 {
        assert_eq!(kept.get(0, j), m.get(1, j));
        assert_eq!(kept.get(1, j), m.get(4, j));
    }
}

#[test]
fn cholesky_examples() {
    let f = cholesky_factorize(&DenseMatrix::identity(3)).unwrap();
    assert_eq!(f.reconstruct(), DenseMatrix::identity(3));
    let b = [0.3, -1.0, 2.0];
    assert_eq!(f.solve(&b).unwrap(), b.to_vec());

    let s = DenseMatrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]);
    let f = cholesky_factorize(&s).unwrap();
    assert_eq!(f.r(0, 0), 2.0);
    assert_eq!(f.r(0, 1), 1.0);
    assert!((f.r(1, 1) - 2f64.sqrt()).abs() < 1e-15);
    let back = f.reconstruct();
    for i in 0..2 {
        for j in 0..2 {
            assert!((back[(i, j)] - s[(i, j)]).abs() < 1e-14);
        }
    }
    let x = f.solve(&[6.0, 5.0]).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);

    let indefinite = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
    assert!(matches!(cholesky_factorize(&indefinite), Err(Error::IndefiniteMatrix { .. })));
}

#[test]
fn cholesky_factor_matches_naive_oracle() {
    let mut r = rng(3);
    let s = random_spd(&mut r, 40, 1e3);
    let f = cholesky_factorize(&s).unwrap();
    // Textbook row-by-row upper factor.
    let n = 40;
    let mut u = vec![vec![0.0; n]; n];
    for i in 0..n {
        let diag = s[(i, i)] - (0..i).map(|k| u[k][i] * u[k][i]).sum::<f64>();
        u[i][i] = diag.sqrt();
        for j in i + 1..n {
            u[i][j] = (s[(i, j)] - (0..i).map(|k| u[k][i] * u[k][j]).sum::<f64>()) / u[i][i];
        }
    }
    for i in 0..n {
        for j in 0..n {
            assert!((f.r(i, j) - u[i][j]).abs() < 1e-10 * u[i][i].abs().max(1.0));
        }
    }
}

#[test]
fn permuted_factor_solves_original_system() {
    let mut r = rng(4);
    let s = random_spd(&mut r, 25, 1e4);
    let b = random_vec(&mut r, 25);
    let perm: Vec<usize> = (0..25).rev().collect();
    let plain = cholesky_factorize(&s).unwrap().solve(&b).unwrap();
    let permuted = cholesky_factorize_permuted(&s, perm).unwrap().solve(&b).unwrap();
    assert!(rel_diff(&permuted, &plain) < 1e-10);
    let oracle = to_na(&s).lu().solve(&nalgebra::DVector::from_column_slice(&b)).unwrap();
    assert!(rel_diff(&permuted, oracle.as_slice()) < 1e-10);
}

#[test]
fn lanczos_diagonal_example() {
    let values = [5.0, 4.0, 3.0, 2.0, 1.0];
    let op = |x: &[f64], y: &mut [f64]| {
        for i in 0..5 {
            y[i] = values[i] * x[i];
        }
    };
    let eig = lanczos_topk(5, op, 2, 1e-12, 100, 42).unwrap();
    assert!((eig.eigenvalues[0] - 5.0).abs() < 1e-12);
    assert!((eig.eigenvalues[1] - 4.0).abs() < 1e-12);
    assert!((eig.vectors[(0, 0)].abs() - 1.0).abs() < 1e-10);
    assert!((eig.vectors[(1, 1)].abs() - 1.0).abs() < 1e-10);
}

#[test]
fn lanczos_identity_values_only() {
    let eig = lanczos_topk(8, |x: &[f64], y: &mut [f64]| y.copy_from_slice(x), 2, 1e-12, 100, 1).unwrap();
    assert_eq!(eig.len(), 2);
    for l in &eig.eigenvalues {
        assert!((l - 1.0).abs() < 1e-12);
    }
}

fn random_symmetric(seed: u64, n: usize) -> DMatrix<f64> {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(n, n, |_, _| random_vec(&mut r, 1)[0]);
    (&g + g.transpose()) * 0.5
}

#[test]
fn lanczos_matches_dense_eigensolver() {
    let m = random_symmetric(17, 30);
    let op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(&na_matvec(&m, x));
    let eig = lanczos_topk(30, op, 4, 1e-12, 30, 2).unwrap();
    let mut want: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    want.sort_by(|a, b| b.total_cmp(a));
    for i in 0..4 {
        assert!((eig.eigenvalues[i] - want[i]).abs() < 1e-8, "{} vs {}", eig.eigenvalues[i], want[i]);
    }
    for i in 0..4 {
        for j in 0..4 {
            let ip = dot(eig.vectors.column(i), eig.vectors.column(j));
            assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
}

#[test]
fn lanczos_reports_best_so_far_on_nonconvergence() {
    let m = random_symmetric(23, 200);
    let op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(&na_matvec(&m, x));
    match lanczos_topk(200, op, 3, 1e-14, 6, 0) {
        Err(Error::LanczosNotConverged { iterations, best }) => {
            assert_eq!(iterations, 6);
            assert_eq!(best.len(), 3);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn tridiagonal_eig_matches_dense() {
    let diag = [1.0, -2.0, 3.0, 0.5, 4.0];
    let off = [0.3, 1.2, -0.7, 2.0];
    let (mut vals, _) = tridiagonal_eig(&diag, &off);
    vals.sort_by(f64::total_cmp);
    let t = DMatrix::from_fn(5, 5, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let mut want: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    want.sort_by(f64::total_cmp);
    for i in 0..5 {
        assert!((vals[i] - want[i]).abs() < 1e-12);
    }
}

#[test]
fn psqmr_examples() {
    let id = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
    let b = [1.0, 2.0, -3.0];
    let out = psqmr(id, &b, id, 1e-12, 10, &[0.0; 3]).unwrap();
    assert!(out.converged && out.iterations <= 1);
    assert_eq!(out.x, b.to_vec());

    let diag = |x: &[f64], y: &mut [f64]| {
        for i in 0..3 {
            y[i] = (i + 1) as f64 * x[i];
        }
    };
    let out = psqmr(diag, &[1.0, 2.0, 3.0], id, 1e-12, 10, &[0.0; 3]).unwrap();
    for v in out.x {
        assert!((v - 1.0).abs() < 1e-10);
    }
}

#[test]
fn psqmr_matches_dense_cholesky_on_spd() {
    let mut r = rng(21);
    let s = random_spd(&mut r, 50, 1e3);
    let b = random_vec(&mut r, 50);
    let op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(&s.matvec(x).unwrap());
    let pre = JacobiPreconditioner::new(&(0..50).map(|i| s[(i, i)]).collect::<Vec<_>>());
    let out = psqmr(op, &b, |x: &[f64], y: &mut [f64]| pre.apply(x, y), 1e-12, 500, &[0.0; 50]).unwrap();
    assert!(out.converged);
    let want = cholesky_factorize(&s).unwrap().solve(&b).unwrap();
    assert!(rel_diff(&out.x, &want) < 1e-8);
}

#[test]
fn psqmr_breakdown_carries_iterate() {
    let res = psqmr(|_: &[f64], y: &mut [f64]| y.fill(0.0), &[1.0], |x: &[f64], y: &mut [f64]| y.copy_from_slice(x), 1e-12, 5, &[0.0]);
    match res {
        Err(Error::PsqmrBreakdown { x, .. }) => assert_eq!(x.len(), 1),
        other => panic!("expected breakdown, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triplet_construction_invariants(seed in any::<u64>(), nrows in 1usize..12, ncols in 1usize..12, count in 0usize..60) {
        let mut r = rng(seed);
        let trip: Vec<(usize, usize, f64)> = (0..count)
            .map(|_| {
                let v = if random_vec(&mut r, 1)[0] > 0.8 { 0.0 } else { random_vec(&mut r, 1)[0] };
                let i = (random_vec(&mut r, 1)[0].abs() * nrows as f64) as usize % nrows;
                let j = (random_vec(&mut r, 1)[0].abs() * ncols as f64) as usize % ncols;
                (i, j, v)
            })
            .collect();
        let m = CscMatrix::from_triplets(nrows, ncols, &trip).unwrap();
        prop_assert_eq!(m.colptr()[0], 0);
        prop_assert_eq!(m.colptr()[ncols], m.nnz());
        prop_assert!(m.colptr().windows(2).all(|w| w[0] <= w[1]));
        for j in 0..ncols {
            let (rows, vals) = m.col(j);
            prop_assert!(rows.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(rows.iter().all(|&i| i < nrows));
            prop_assert!(vals.iter().all(|&v| v != 0.0));
        }
        let mut dense = vec![vec![0.0; ncols]; nrows];
        for &(i, j, v) in &trip {
            dense[i][j] += v;
        }
        for i in 0..nrows {
            for j in 0..ncols {
                prop_assert_eq!(m.get(i, j), dense[i][j]);
            }
        }
    }

    #[test]
    fn gram_product_matches_dense(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_csc(&mut r, 20, 30, 0.3);
        let x = random_vec(&mut r, 20);
        let got = m.matvec(&m.matvec(&x, true).unwrap(), false).unwrap();
        let md = csc_to_na(&m);
        let want = na_matvec(&(&md * md.transpose()), &x);
        prop_assert!(rel_diff(&got, &want) <= 1e-12);
    }

    #[test]
    fn cholesky_solve_is_an_inverse(seed in any::<u64>(), n in 1usize..40, log_cond in 0.0f64..6.0) {
        let mut r = rng(seed);
        let s = random_spd(&mut r, n, 10f64.powf(log_cond));
        let b = random_vec(&mut r, n);
        let f = cholesky_factorize(&s).unwrap();
        let x = f.solve(&b).unwrap();
        let sx = s.matvec(&x).unwrap();
        prop_assert!(rel_diff(&sx, &b) <= 1e-10);
        let back = f.reconstruct();
        let scale = (0..n).map(|i| s[(i, i)]).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((back[(i, j)] - s[(i, j)]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn lanczos_never_overshoots_lambda_max(seed in any::<u64>(), n in 5usize..40, k in 1usize..4) {
        let m = random_symmetric(seed, n);
        let op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(&na_matvec(&m, x));
        let tol = 1e-10;
        let eig = lanczos_topk(n, op, k, tol, n, seed).unwrap();
        let lmax = SymmetricEigen::new(m.clone()).eigenvalues.max();
        let norm = m.norm();
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            prop_assert!(l <= lmax + tol * norm);
            prop_assert!(eig.residual_norms[i] <= 1e-8 * norm);
        }
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn psqmr_counts_and_residual(seed in any::<u64>(), n in 2usize..40, cap in 1usize..60) {
        let mut r = rng(seed);
        let s = random_spd(&mut r, n, 1e2);
        let b = random_vec(&mut r, n);
        let calls = Cell::new(0usize);
        let op = |x: &[f64], y: &mut [f64]| {
            calls.set(calls.get() + 1);
            y.copy_from_slice(&s.matvec(x).unwrap());
        };
        let tol = 1e-9;
        let out = psqmr(op, &b, |x: &[f64], y: &mut [f64]| y.copy_from_slice(x), tol, cap, &vec![0.0; n]).unwrap();
        let ax = s.matvec(&out.x).unwrap();
        let res = norm(&b.iter().zip(&ax).map(|(p, q)| p - q).collect::<Vec<_>>());
        if out.converged {
            prop_assert!(res <= tol);
        } else {
            prop_assert_eq!(out.iterations, cap);
        }
        prop_assert!((out.residual_norm - res).abs() <= 1e-12 * (1.0 + res));
        prop_assert!(calls.get().abs_diff(out.iterations) <= 1);
    }

    #[test]
    fn lanczos_is_deterministic(seed in any::<u64>()) {
        let m = random_symmetric(seed, 25);
        let op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(&na_matvec(&m, x));
        let a = lanczos_topk(25, op, 3, 1e-10, 25, seed).unwrap();
        let b = lanczos_topk(25, op, 3, 1e-10, 25, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
