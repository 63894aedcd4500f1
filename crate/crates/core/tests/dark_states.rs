//! Dark-state counts and closed-form dark vectors for small atom numbers.

mod common;

use common::*;
use darkstate_core::darkstate::{collective_dark_family, orthogonalize};
use darkstate_core::numerics::C64;
use darkstate_core::{analyze, compare, oracle, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn count(g: &[f64], v: f64, n: u32) -> usize {
    let p = SystemParams::uniform(g.to_vec(), v, 0.0, 0.0).unwrap();
    analyze(&p, n).unwrap().1.total_dark
}

fn random_g(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

#[test]
fn two_atoms_dark_iff_equal_magnitudes() {
    assert_eq!(count(&[1.0, 1.0], 0.5, 1), 1);
    assert_eq!(count(&[1.0, -1.0], 0.5, 1), 1);
    assert_eq!(count(&[0.7, 0.7], -1.3, 1), 1);
    for g2 in [0.0, 0.5, 0.999, 1.001, -0.3, 2.0] {
        assert_eq!(count(&[1.0, g2], 0.5, 1), 0, "g2 = {g2}");
    }
}

#[test]
fn two_atoms_dark_vectors() {
    let p = SystemParams::uniform(vec![1.0, 1.0], 0.5, 0.0, 0.0).unwrap();
    let (_, r) = analyze(&p, 1).unwrap();
    let want = normalized(ket(&r.basis, &[("0,eg", 1.0), ("0,ge", -1.0)]));
    assert!(distance_from_span(&r.projector(), &want) < 1e-12);
    assert!((r.eigenvalues[0] + 0.5).abs() < 1e-12);

    let p = SystemParams::uniform(vec![1.0, -1.0], 0.5, 0.0, 0.0).unwrap();
    let (_, r) = analyze(&p, 1).unwrap();
    let want = normalized(ket(&r.basis, &[("0,eg", 1.0), ("0,ge", 1.0)]));
    assert!(distance_from_span(&r.projector(), &want) < 1e-12);
}

#[test]
fn three_atoms_single_excitation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let g = random_g(&mut rng, 3);
        assert_eq!(count(&g, 0.5, 1), 1, "g = {g:?}");
    }
    // Symmetric coupling vanishes.
    assert_eq!(count(&[1.0, 0.9, -1.9], 0.5, 1), 2);
    assert_eq!(count(&[0.3, -1.2, 0.9], -0.4, 1), 2);
}

#[test]
fn three_atoms_dark_state_closed_form() {
    for g in [vec![1.0, 0.8, 1.5], vec![0.3, -1.1, 0.6]] {
        let p = SystemParams::uniform(g.clone(), 0.5, 0.0, 0.0).unwrap();
        let (_, r) = analyze(&p, 1).unwrap();
        let family = collective_dark_family(&g).unwrap();
        assert_eq!(family.len(), 1);
        assert!(distance_from_span(&r.projector(), &normalized(family[0].clone())) < 1e-12);
        // Expanded directly: G₃|L(2)⟩ - G₂|L(3)⟩ in bare atomic states.
        let (a, b) = (2f64.sqrt(), 6f64.sqrt());
        let g2 = (-g[0] + g[1]) / a;
        let g3 = (-g[0] - g[1] + 2.0 * g[2]) / b;
        let by_hand = ket(
            &r.basis,
            &[
                ("0,egg", -g3 / a + g2 / b),
                ("0,geg", g3 / a + g2 / b),
                ("0,gge", -2.0 * g2 / b),
            ],
        );
        assert!(distance_from_span(&r.projector(), &normalized(by_hand)) < 1e-12);
    }
}

#[test]
fn three_atoms_two_excitations_has_none() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        assert_eq!(count(&random_g(&mut rng, 3), 0.5, 2), 0);
    }
    assert_eq!(count(&[1.0, 0.9, -1.9], 0.5, 2), 0);
    assert_eq!(count(&[1.0, 1.0, 1.0], 0.5, 2), 0);
}

#[test]
fn four_atoms_single_excitation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        assert_eq!(count(&random_g(&mut rng, 4), 0.5, 1), 2);
    }
    assert_eq!(count(&[1.0, 0.8, 1.5, -3.3], 0.5, 1), 3);
}

#[test]
fn four_atoms_gram_schmidt_family() {
    let g = [1.0, 0.8, 1.5, 1.2];
    let p = SystemParams::uniform(g.to_vec(), 0.5, 0.0, 0.0).unwrap();
    let (_, r) = analyze(&p, 1).unwrap();
    let ortho = orthogonalize(&collective_dark_family(&g).unwrap(), 1e-12);
    assert!(ortho.dropped.is_empty());
    assert_eq!(ortho.vectors.len(), 2);
    assert!((darkstate_core::numerics::inner(&ortho.vectors[0], &ortho.vectors[1])).norm() < 1e-14);
    for v in &ortho.vectors {
        assert!(distance_from_span(&r.projector(), v) < 1e-12);
    }
}

fn four_atom_pair_states(basis: &darkstate_core::SubspaceBasis) -> [Vec<C64>; 3] {
    [
        ket(
            basis,
            &[
                ("0,eegg", -0.5),
                ("0,ggee", 0.5),
                ("0,egeg", 0.5),
                ("0,gege", -0.5),
            ],
        ),
        ket(
            basis,
            &[
                ("0,eegg", -0.5),
                ("0,ggee", 0.5),
                ("0,egge", 0.5),
                ("0,geeg", -0.5),
            ],
        ),
        ket(
            basis,
            &[
                ("0,egeg", -0.5),
                ("0,gege", 0.5),
                ("0,egge", 0.5),
                ("0,geeg", -0.5),
            ],
        ),
    ]
}

#[test]
fn four_atoms_two_excitations_conditions() {
    let v = 0.5;
    let cases: [(&[f64], usize); 4] = [
        (&[1.0, 0.8, 0.8, -1.0], 0),
        (&[1.0, 0.8, -1.0, 0.8], 1),
        (&[1.0, -1.0, 0.8, 0.8], 2),
        (&[0.9, 1.3, 1.3, -0.9], 0),
    ];
    for (g, which) in cases {
        let p = SystemParams::uniform(g.to_vec(), v, 0.0, 0.0).unwrap();
        let (_, r) = analyze(&p, 2).unwrap();
        assert_eq!(r.total_dark, 1, "g = {g:?}");
        let d = four_atom_pair_states(&r.basis)[which].clone();
        assert!(distance_from_span(&r.projector(), &d) < 1e-12, "g = {g:?}");
        assert!(r.eigenvalues[0].abs() < 1e-12, "{:?}", r.eigenvalues);
    }
}

#[test]
fn four_atoms_two_excitations_double_condition() {
    let p = SystemParams::uniform(vec![-1.0, 1.0, 1.0, 1.0], 0.5, 0.0, 0.0).unwrap();
    let (h, r) = analyze(&p, 2).unwrap();
    assert_eq!(r.total_dark, 2);
    for d in four_atom_pair_states(&r.basis) {
        assert!(distance_from_span(&r.projector(), &d) < 1e-12);
    }
    let o = oracle(&h, None).unwrap();
    assert!(compare(&r, &o, 1e-7).agree);
}

#[test]
fn four_atoms_two_excitations_generic_and_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let g = random_g(&mut rng, 4);
        assert_eq!(count(&g, 0.5, 2), 0, "g = {g:?}");
        assert_eq!(count(&g, 0.5, 3), 0, "g = {g:?}");
    }
    assert_eq!(count(&[1.0, 0.8, 1.5, 1.2], 0.5, 3), 0);
}

#[test]
fn no_dark_states_at_or_above_full_inversion() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n_atoms in 1..=6 {
        let g = random_g(&mut rng, n_atoms);
        for n in n_atoms as u32..=n_atoms as u32 + 2 {
            assert_eq!(count(&g, 0.5, n), 0, "N = {n_atoms}, n = {n}");
        }
    }
}

#[test]
fn general_single_excitation_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n_atoms in 2..=8 {
        for _ in 0..5 {
            let g = random_g(&mut rng, n_atoms);
            let v = rng.gen_range(-1.0..1.0);
            assert_eq!(count(&g, v, 1), n_atoms - 2, "N = {n_atoms}, g = {g:?}");
        }
    }
}

#[test]
fn dark_vectors_are_eigenvectors_without_upper_weight() {
    let p = SystemParams::uniform(vec![1.0, 0.8, 1.5, 1.2, -0.7], 0.5, 0.3, 0.0).unwrap();
    let (h, r) = analyze(&p, 1).unwrap();
    assert_eq!(r.total_dark, 3);
    for (d, &e) in r.dark_vectors.iter().zip(&r.eigenvalues) {
        let hd = h.h.mul_vec(d);
        let res: f64 = hd
            .iter()
            .zip(d)
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-10);
        assert!(d[h.upper_range()].iter().all(|z| z.norm() == 0.0));
    }
}
