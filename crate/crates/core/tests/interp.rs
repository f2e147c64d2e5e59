//! Divided differences against an independent Vandermonde solve.

mod common;

use adaptmesh::interp::{divided_difference, interpolate};
use adaptmesh::StateVector;
use common::{random_nodes, vandermonde_coefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn divided_difference_matches_vandermonde_leading_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let nodes = random_nodes(&mut rng, n);
        // Values of a polynomial whose leading coefficient is bounded away from 0.
        let mut coef: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        coef[n - 1] = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let values: Vec<f64> = nodes
            .iter()
            .map(|&t| coef.iter().rev().fold(0.0, |acc, c| acc * t + c))
            .collect();
        let lead = *vandermonde_coefficients(&nodes, &values).last().unwrap();
        let svals: Vec<StateVector> = values
            .iter()
            .map(|&v| StateVector::new(vec![v]).unwrap())
            .collect();
        let dd = divided_difference(&nodes, &svals).unwrap()[0];
        let rel = (dd - lead).abs() / lead.abs();
        worst = worst.max(rel);
        assert!(rel <= 1e-8, "nodes {nodes:?}: dd {dd} vs {lead}");
    }
    println!("worst relative deviation {worst:e}");
}

#[test]
fn interpolant_matches_vandermonde_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let mut nodes = random_nodes(&mut rng, n);
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let svals: Vec<StateVector> = values
            .iter()
            .map(|&v| StateVector::new(vec![v]).unwrap())
            .collect();
        // Compare in the local variable t - nodes[0].
        let local: Vec<f64> = nodes.iter().map(|t| t - nodes[0]).collect();
        let want = vandermonde_coefficients(&local, &values);
        let got = interpolate(&nodes, &svals).unwrap();
        assert_eq!(got.origin, nodes[0]);
        let scale = want.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (row, w) in got.coeffs.iter().zip(&want) {
            assert!((row[0] - w).abs() <= 1e-9 * scale, "{} vs {w}", row[0]);
        }
    }
}
