use proptest::prelude::*;

use tensor_svd::tensor::{fold, kronecker, matricize, mode_product, mode_product_t, subtensor, tucker_compose};
use tensor_svd::{Matrix, Mode, Tensor3};

fn dims() -> impl Strategy<Value = [usize; 3]> {
    [1usize..6, 1usize..6, 1usize..6]
}

fn tensor_with(d: [usize; 3]) -> impl Strategy<Value = Tensor3> {
    prop::collection::vec(-10.0f64..10.0, d[0] * d[1] * d[2]).prop_map(move |v| Tensor3::new(d, v).unwrap())
}

fn tensor() -> impl Strategy<Value = Tensor3> {
    dims().prop_flat_map(tensor_with)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3.0f64..3.0, rows * cols).prop_map(move |v| Matrix::new(rows, cols, v).unwrap())
}

/// Textbook triple sum for `X ×_mode A`.
fn naive_product(x: &Tensor3, mode: Mode, a: &Matrix) -> Tensor3 {
    let mut d = x.dims();
    let m = mode.index();
    d[m] = a.rows();
    Tensor3::from_fn(d, |i, j, k| {
        let idx = [i, j, k];
        (0..x.dims()[m])
            .map(|t| {
                let mut src = idx;
                src[m] = t;
                a.get(idx[m], t) * x.get(src[0], src[1], src[2])
            })
            .sum()
    })
}

fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    a.shape() == b.shape() && a.max_abs_diff(b) <= tol
}

fn counting() -> Tensor3 {
    Tensor3::from_fn([2, 2, 2], |i, j, k| (4 * i + 2 * j + k) as f64)
}

#[test]
fn hand_computed_unfoldings() {
    let x = counting();
    assert_eq!(matricize(&x, Mode::One), Matrix::from_rows(&[[0.0, 1.0, 2.0, 3.0], [4.0, 5.0, 6.0, 7.0]]));
    assert_eq!(matricize(&x, Mode::Two), Matrix::from_rows(&[[0.0, 4.0, 1.0, 5.0], [2.0, 6.0, 3.0, 7.0]]));
    // M3 column index is i*p2 + j.
    assert_eq!(matricize(&x, Mode::Three), Matrix::from_rows(&[[0.0, 2.0, 4.0, 6.0], [1.0, 3.0, 5.0, 7.0]]));
}

#[test]
fn summing_mode_one_slices() {
    let y = mode_product(&counting(), Mode::One, &Matrix::from_rows(&[[1.0, 1.0]])).unwrap();
    assert_eq!(y.dims(), [1, 2, 2]);
    assert_eq!(y.as_slice(), &[4.0, 6.0, 8.0, 10.0]);
}

#[test]
fn product_shape_errors_name_the_mode() {
    let err = mode_product(&counting(), Mode::Three, &Matrix::zeros(2, 3)).unwrap_err();
    assert!(err.to_string().contains("mode-3"), "{err}");
    assert!(fold(&Matrix::zeros(2, 3), Mode::Two, [2, 2, 2]).is_err());
}

#[test]
fn kronecker_blocks() {
    let a = Matrix::from_rows(&[[1.0, 2.0]]);
    let b = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
    let k = kronecker(&a, &b);
    assert_eq!(k, Matrix::from_rows(&[[0.0, 1.0, 0.0, 2.0], [1.0, 0.0, 2.0, 0.0]]));
}

#[test]
fn subtensor_copies_the_block() {
    let x = Tensor3::from_fn([3, 4, 5], |i, j, k| (100 * i + 10 * j + k) as f64);
    let b = subtensor(&x, [1..3, 0..2, 2..5]).unwrap();
    assert_eq!(b.dims(), [2, 2, 3]);
    assert_eq!(b.get(1, 1, 0), 212.0);
    assert!(subtensor(&x, [0..4, 0..1, 0..1]).is_err());
    assert!(subtensor(&x, [1..1, 0..1, 0..1]).is_err());
}

proptest! {
    #[test]
    fn fold_inverts_matricize(x in tensor()) {
        for mode in Mode::ALL {
            let m = matricize(&x, mode);
            prop_assert_eq!(m.rows(), x.dim(mode));
            prop_assert!((m.frobenius_norm() - x.frobenius_norm()).abs() <= 1e-12 * (1.0 + x.frobenius_norm()));
            prop_assert_eq!(fold(&m, mode, x.dims()).unwrap(), x.clone());
        }
    }

    #[test]
    fn mode_product_matches_triple_sum(
        (x, a, mode) in tensor().prop_flat_map(|x| {
            (0usize..3).prop_flat_map(move |m| {
                let mode = Mode::ALL[m];
                let p = x.dim(mode);
                (Just(x.clone()), (1usize..5).prop_flat_map(move |q| matrix(q, p)), Just(mode))
            })
        })
    ) {
        let fast = mode_product(&x, mode, &a).unwrap();
        let slow = naive_product(&x, mode, &a);
        prop_assert!(fast.max_abs_diff(&slow) <= 1e-11);
        // M_mode(X ×_mode A) = A M_mode(X)
        let lhs = matricize(&fast, mode);
        let rhs = a.matmul(&matricize(&x, mode)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-11));
        let via_t = mode_product_t(&x, mode, &a.transpose()).unwrap();
        prop_assert!(via_t.max_abs_diff(&fast) <= 1e-11);
    }

    #[test]
    fn unfolding_of_tucker_product_is_kronecker(
        (s, u) in dims().prop_flat_map(|r| {
            let d = [r[0] + 1, r[1] + 2, r[2]];
            (tensor_with(r), (matrix(d[0], r[0]), matrix(d[1], r[1]), matrix(d[2], r[2])))
        })
    ) {
        let (u1, u2, u3) = u;
        let x = tucker_compose(&s, &u1, &u2, &u3).unwrap();
        let us = [&u1, &u2, &u3];
        for mode in Mode::ALL {
            let k = mode.index();
            let (a, b) = (us[(k + 1) % 3], us[(k + 2) % 3]);
            let expected = us[k]
                .matmul(&matricize(&s, mode))
                .unwrap()
                .matmul_t(&kronecker(a, b))
                .unwrap();
            let scale = 1.0 + expected.frobenius_norm();
            prop_assert!(close(&matricize(&x, mode), &expected, 1e-10 * scale));
        }
    }

    #[test]
    fn products_along_distinct_modes_commute(
        (x, a, b) in tensor().prop_flat_map(|x| {
            let d = x.dims();
            (Just(x), matrix(3, d[0]), matrix(2, d[2]))
        })
    ) {
        let ab = mode_product(&mode_product(&x, Mode::One, &a).unwrap(), Mode::Three, &b).unwrap();
        let ba = mode_product(&mode_product(&x, Mode::Three, &b).unwrap(), Mode::One, &a).unwrap();
        prop_assert!(ab.max_abs_diff(&ba) <= 1e-10);
    }

    #[test]
    fn identity_product_is_a_no_op(x in tensor(), m in 0usize..3) {
        let mode = Mode::ALL[m];
        let y = mode_product(&x, mode, &Matrix::identity(x.dim(mode))).unwrap();
        prop_assert_eq!(y, x);
    }

    #[test]
    fn kronecker_mixed_product(
        (a, b, c, d) in (1usize..4, 1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(m, n, p, q, r)| {
            (matrix(m, n), matrix(p, q), matrix(n, r), matrix(q, 2))
        })
    ) {
        // (A ⊗ B)(C ⊗ D) = AC ⊗ BD
        let lhs = kronecker(&a, &b).matmul(&kronecker(&c, &d)).unwrap();
        let rhs = kronecker(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }
}
