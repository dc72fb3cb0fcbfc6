use num_complex::Complex64;
use proptest::prelude::*;
use rigidpack::gridoracle::{synthesize, GridParams};
use rigidpack::ladder::{expand_word, heisenberg_word, xp_polynomial, Symbol, MAX_WORD_LEN};
use rigidpack::{FockState, PacketSpec, Units};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const DIM: usize = 40;

type Matrix = Vec<Vec<Complex64>>;

fn zeros() -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); DIM]; DIM]
}

fn identity() -> Matrix {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = zeros();
    for i in 0..DIM {
        for k in 0..DIM {
            if a[i][k] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..DIM {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn combine(a: &Matrix, ca: f64, b: &Matrix, cb: f64) -> Matrix {
    (0..DIM).map(|i| (0..DIM).map(|j| a[i][j] * ca + b[i][j] * cb).collect()).collect()
}

/// Truncated x̃ and p̃ built from `a|n⟩ = √n |n−1⟩`.
fn position_momentum() -> (Matrix, Matrix) {
    let mut x = zeros();
    let mut p = zeros();
    for n in 1..DIM {
        let s = (n as f64).sqrt() * FRAC_1_SQRT_2;
        x[n - 1][n] = Complex64::new(s, 0.0);
        x[n][n - 1] = Complex64::new(s, 0.0);
        p[n - 1][n] = Complex64::new(0.0, -s);
        p[n][n - 1] = Complex64::new(0.0, s);
    }
    (x, p)
}

fn word_matrix(word: &[Symbol], x: &Matrix, p: &Matrix) -> Matrix {
    word.iter().fold(identity(), |acc, s| mat_mul(&acc, if *s == Symbol::X { x } else { p }))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(prop_oneof![Just(Symbol::X), Just(Symbol::P)], 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_ordering_matches_dense_matrices(word in word_strategy(7)) {
        let (x, p) = position_momentum();
        let dense = word_matrix(&word, &x, &p);
        let poly = expand_word(&word).unwrap();
        for m in 0..12 {
            for n in 0..12 {
                let d = (poly.matrix_element(m, n) - dense[m][n]).norm();
                prop_assert!(d < 1e-10 * (1.0 + dense[m][n].norm()), "<{m}|..|{n}> off by {d:e}");
            }
        }
    }

    #[test]
    fn heisenberg_matches_substitution(word in word_strategy(6), theta in -7.0f64..7.0) {
        // x(θ) = x cos θ + p sin θ, p(θ) = p cos θ − x sin θ
        let (x, p) = position_momentum();
        let (s, c) = theta.sin_cos();
        let xt = combine(&x, c, &p, s);
        let pt = combine(&p, c, &x, -s);
        let dense = word_matrix(&word, &xt, &pt);
        let poly = heisenberg_word(&word, theta).unwrap();
        for m in 0..10 {
            for n in 0..10 {
                let d = (poly.matrix_element(m, n) - dense[m][n]).norm();
                prop_assert!(d < 1e-10 * (1.0 + dense[m][n].norm()));
            }
        }
    }

    #[test]
    fn adjoint_reverses_the_word(word in word_strategy(8), m in 0usize..10, n in 0usize..10) {
        let reversed: Vec<Symbol> = word.iter().rev().copied().collect();
        let a = expand_word(&word).unwrap().matrix_element(m, n);
        let b = expand_word(&reversed).unwrap().matrix_element(n, m).conj();
        prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn selection_rule(word in word_strategy(8), m in 0usize..14, n in 0usize..14) {
        let len = word.len();
        let v = expand_word(&word).unwrap().matrix_element(m, n);
        let gap = m.abs_diff(n);
        if gap > len || (len - gap) % 2 == 1 {
            prop_assert_eq!(v, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn full_turn_is_periodic(word in word_strategy(6), theta in -4.0f64..4.0, m in 0usize..8, n in 0usize..8) {
        let a = heisenberg_word(&word, theta).unwrap().matrix_element(m, n);
        let b = heisenberg_word(&word, theta + 2.0 * PI).unwrap().matrix_element(m, n);
        prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
    }
}

#[test]
fn words_past_the_limit_are_rejected() {
    assert!(expand_word(&[Symbol::X; MAX_WORD_LEN]).is_ok());
    assert!(expand_word(&[Symbol::P; MAX_WORD_LEN + 1]).is_err());
}

#[test]
fn grid_quadrature_agrees_with_ladder_elements() {
    let u = Units::default();
    let params = GridParams::symmetric(16.0, 1024, &u);
    let states: Vec<_> = (0..=6)
        .map(|n| synthesize(&PacketSpec::centered(FockState::number(n).unwrap()), &u, params).unwrap())
        .collect();
    for k in 0..=4 {
        for l in 0..=(4 - k) {
            let poly = xp_polynomial(k, l).unwrap();
            for m in 0..=6 {
                for n in 0..=6 {
                    let grid = states[n].raw_element(&states[m], k, l).unwrap();
                    let exact = poly.matrix_element(m, n);
                    assert!((grid - exact).norm() < 1e-9, "k={k} l={l} <{m}|..|{n}>: {grid} vs {exact}");
                }
            }
        }
    }
}
