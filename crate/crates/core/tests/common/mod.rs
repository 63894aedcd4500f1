//! Reference matrices and shared helpers for the integration and acceptance
//! tests. Everything here is written out entry by entry, without going through
//! the library's matrix-element rules.
#![allow(dead_code)]

use darkstate_core::numerics::{ComplexMatrix, C64};
use rand::Rng;

pub const S2: f64 = std::f64::consts::SQRT_2;

fn sq(rows: usize, cols: usize, v: Vec<f64>) -> ComplexMatrix {
    ComplexMatrix::from_real(rows, cols, &v)
}

/// Two atoms, one excitation.
#[rustfmt::skip]
pub fn h2_1(d: f64, g: [f64; 2], v: f64) -> ComplexMatrix {
    sq(3, 3, vec![
        -d,   g[0], g[1],
        g[0], 0.0,  v,
        g[1], v,    0.0,
    ])
}

/// Three atoms, one excitation.
#[rustfmt::skip]
pub fn h3_1(d: f64, g: [f64; 3], v: f64) -> ComplexMatrix {
    let h = -d / 2.0;
    sq(4, 4, vec![
        -1.5 * d, g[0], g[1], g[2],
        g[0],     h,    v,    v,
        g[1],     v,    h,    v,
        g[2],     v,    v,    h,
    ])
}

/// Three atoms, two excitations.
#[rustfmt::skip]
pub fn h3_2(d: f64, g: [f64; 3], v: f64) -> ComplexMatrix {
    let [g1, g2, g3] = g;
    let h = d / 2.0;
    sq(7, 7, vec![
        -1.5 * d, S2 * g1, S2 * g2, S2 * g3, 0.0, 0.0, 0.0,
        S2 * g1,  -h,      v,       v,       g2,  g3,  0.0,
        S2 * g2,  v,       -h,      v,       g1,  0.0, g3,
        S2 * g3,  v,       v,       -h,      0.0, g1,  g2,
        0.0,      g2,      g1,      0.0,     h,   v,   v,
        0.0,      g3,      0.0,     g1,      v,   h,   v,
        0.0,      0.0,     g3,      g2,      v,   v,   h,
    ])
}

/// Four atoms, one excitation.
#[rustfmt::skip]
pub fn h4_1(d: f64, g: [f64; 4], v: f64) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    sq(5, 5, vec![
        -2.0 * d, g1, g2, g3, g4,
        g1, -d, v,  v,  v,
        g2, v,  -d, v,  v,
        g3, v,  v,  -d, v,
        g4, v,  v,  v,  -d,
    ])
}

#[rustfmt::skip]
pub fn u4_2(d: f64, g: [f64; 4], v: f64) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    sq(5, 5, vec![
        -2.0 * d, S2 * g1, S2 * g2, S2 * g3, S2 * g4,
        S2 * g1,  -d,      v,       v,       v,
        S2 * g2,  v,       -d,      v,       v,
        S2 * g3,  v,       v,       -d,      v,
        S2 * g4,  v,       v,       v,       -d,
    ])
}

#[rustfmt::skip]
pub fn l4_2(v: f64) -> ComplexMatrix {
    sq(6, 6, vec![
        0.0, v,   v,   v,   v,   0.0,
        v,   0.0, v,   v,   0.0, v,
        v,   v,   0.0, 0.0, v,   v,
        v,   v,   0.0, 0.0, v,   v,
        v,   0.0, v,   v,   0.0, v,
        0.0, v,   v,   v,   v,   0.0,
    ])
}

#[rustfmt::skip]
pub fn c4_2(g: [f64; 4]) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    sq(5, 6, vec![
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        g2,  g3,  g4,  0.0, 0.0, 0.0,
        g1,  0.0, 0.0, g3,  g4,  0.0,
        0.0, g1,  0.0, g2,  0.0, g4,
        0.0, 0.0, g1,  0.0, g2,  g3,
    ])
}

#[rustfmt::skip]
pub fn l4_3(d: f64, v: f64) -> ComplexMatrix {
    sq(4, 4, vec![
        d, v, v, v,
        v, d, v, v,
        v, v, d, v,
        v, v, v, d,
    ])
}

/// Written as a 4 x 11 matrix and transposed.
#[rustfmt::skip]
pub fn c4_3(g: [f64; 4]) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    sq(4, 11, vec![
        0.0, 0.0, 0.0, 0.0, 0.0, g3,  g2,  0.0, g1,  0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, g4,  0.0, g2,  0.0, g1,  0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g4,  g3,  0.0, 0.0, g1,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g4,  g3,  g2,
    ])
    .transpose()
}

/// Reference lower-block unitaries (rows are dressed states).
#[rustfmt::skip]
pub fn sl_2() -> ComplexMatrix {
    let s = 1.0 / S2;
    sq(2, 2, vec![s, s, -s, s])
}

#[rustfmt::skip]
pub fn sl_3() -> ComplexMatrix {
    let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / S2, 1.0 / 6f64.sqrt());
    sq(3, 3, vec![
        a,  a,  a,
        -b, b,  0.0,
        -c, -c, 2.0 * c,
    ])
}

#[rustfmt::skip]
pub fn sl_4() -> ComplexMatrix {
    let (b, c, e) = (1.0 / S2, 1.0 / 6f64.sqrt(), 3f64.sqrt() / 6.0);
    sq(4, 4, vec![
        0.5, 0.5, 0.5, 0.5,
        -b,  b,   0.0, 0.0,
        -c,  -c,  2.0 * c, 0.0,
        -e,  -e,  -e,  3f64.sqrt() / 2.0,
    ])
}

#[rustfmt::skip]
pub fn sl_4_2() -> ComplexMatrix {
    let (a, b, e, f) = (1.0 / 6f64.sqrt(), 1.0 / S2, 3f64.sqrt() / 6.0, 1.0 / 3f64.sqrt());
    sq(6, 6, vec![
        a,   a,   a,   a,   a,   a,
        0.5, 0.0, -0.5, -0.5, 0.0, 0.5,
        -e,  f,   -e,  -e,  f,   -e,
        -b,  0.0, 0.0, 0.0, 0.0, b,
        0.0, -b,  0.0, 0.0, b,   0.0,
        0.0, 0.0, -b,  b,   0.0, 0.0,
    ])
}

/// Transformed coupling block of four atoms, two excitations, reference form.
#[rustfmt::skip]
pub fn c_tilde_4_2(g: [f64; 4]) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    let (r6, r3) = (6f64.sqrt(), 3f64.sqrt());
    sq(5, 6, vec![
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        (g2 + g3 + g4) / r6, (g2 - g4) / 2.0, -(g2 - 2.0 * g3 + g4) / (2.0 * r3), -g2 / S2, -g3 / S2, -g4 / S2,
        (g1 + g3 + g4) / r6, (g1 - g3) / 2.0, -(g1 + g3 - 2.0 * g4) / (2.0 * r3), -g1 / S2, g4 / S2, g3 / S2,
        (g1 + g2 + g4) / r6, (-g2 + g4) / 2.0, (2.0 * g1 - g2 - g4) / (2.0 * r3), g4 / S2, -g1 / S2, g2 / S2,
        (g1 + g2 + g3) / r6, (-g1 + g3) / 2.0, -(g1 - 2.0 * g2 + g3) / (2.0 * r3), g3 / S2, g2 / S2, -g1 / S2,
    ])
}

/// Transformed coupling block of four atoms, three excitations, reference form.
#[rustfmt::skip]
pub fn c_tilde_4_3(g: [f64; 4]) -> ComplexMatrix {
    let [g1, g2, g3, g4] = g;
    let (r6, r3) = (6f64.sqrt(), 3f64.sqrt());
    let mut rows = vec![0.0; 5 * 4];
    rows.extend([
        (g3 + g4) / 2.0, (-g3 + g4) / S2, (-g3 - g4) / r6, (-g3 - g4) / (2.0 * r3),
        (g2 + g4) / 2.0, -g2 / S2, (-g2 + 2.0 * g4) / r6, (-g2 - g4) / (2.0 * r3),
        (g2 + g3) / 2.0, g2 / S2, (-g2 + 2.0 * g3) / r6, (-g2 - g3) / (2.0 * r3),
        (g1 + g4) / 2.0, -g1 / S2, -g1 / r6, (-g1 + 3.0 * g4) / (2.0 * r3),
        (g1 + g3) / 2.0, g1 / S2, -g1 / r6, (-g1 + 3.0 * g3) / (2.0 * r3),
        (g1 + g2) / 2.0, 0.0, r6 * g1 / 3.0, (-g1 + 3.0 * g2) / (2.0 * r3),
    ]);
    sq(11, 4, rows)
}

/// Vector in a subspace basis from `(label, amplitude)` pairs.
pub fn ket(basis: &darkstate_core::SubspaceBasis, terms: &[(&str, f64)]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); basis.len()];
    for &(label, a) in terms {
        let s = darkstate_core::BasisState::parse_label(label).unwrap().0;
        v[basis.index_of(&s).unwrap()] += C64::new(a, 0.0);
    }
    v
}

pub fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let n = darkstate_core::numerics::norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// `‖P v - v‖` for the projector `P`.
pub fn distance_from_span(p: &ComplexMatrix, v: &[C64]) -> f64 {
    let pv = p.mul_vec(v);
    pv.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Random Hermitian matrix with entries of modulus up to `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = C64::new(rng.gen_range(-scale..scale), 0.0);
        for c in r + 1..n {
            let z = C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}
