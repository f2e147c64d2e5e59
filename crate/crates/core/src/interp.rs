//! Node generation, Newton-form interpolation expanded to local monomials,
//! exact antiderivatives and componentwise divided differences.
//!
//! Polynomials are stored as rows of coefficients in the local variable
//! `s = t - origin`: row `k` holds the `d` components of the `s^k` coefficient.
//! Node counts stay small (at most `r + 1 <= 11`), where the monomial
//! expansion is well conditioned enough for the step sizes in use.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Strictly increasing, finite interpolation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet(Vec<f64>);

impl NodeSet {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidNodes("empty node set".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidNodes("non-finite node".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidNodes(
                "nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self(nodes))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for NodeSet {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `count` equidistant nodes on `[x0, x1]`.
///
/// A single node is placed at `x0`; otherwise the first node is `x0` and the
/// last is exactly `x1`.
pub fn equidistant_nodes(x0: f64, x1: f64, count: usize) -> Result<NodeSet> {
    if count < 1 {
        return Err(Error::InvalidNodes("count must be at least 1".into()));
    }
    if !(x0 < x1) {
        return Err(Error::InvalidNodes(format!(
            "need x0 < x1, got [{x0}, {x1}]"
        )));
    }
    if count == 1 {
        return NodeSet::new(vec![x0]);
    }
    let h = x1 - x0;
    let last = (count - 1) as f64;
    let mut nodes: Vec<f64> = (0..count).map(|k| x0 + h * (k as f64 / last)).collect();
    nodes[count - 1] = x1;
    // Very short intervals far from the origin can collapse neighbours.
    NodeSet::new(nodes)
}

/// A vector-valued polynomial in the local variable `t - origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPolynomial {
    pub origin: f64,
    /// `coeffs[k][c]` multiplies `(t - origin)^k` in component `c`.
    pub coeffs: Vec<Vec<f64>>,
}

impl LocalPolynomial {
    pub fn constant(origin: f64, value: &[f64]) -> Self {
        Self {
            origin,
            coeffs: vec![value.to_vec()],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    /// Number of stored coefficient rows minus one.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation, one component at a time.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = t - self.origin;
        (0..self.dim())
            .map(|c| {
                self.coeffs
                    .iter()
                    .rev()
                    .fold(0.0, |acc, row| acc * s + row[c])
            })
            .collect()
    }

    /// Re-expands the polynomial around `new_origin` (Taylor shift).
    pub fn recentered(&self, new_origin: f64) -> Self {
        let shift = new_origin - self.origin;
        let mut coeffs = self.coeffs.clone();
        if shift != 0.0 {
            let n = coeffs.len();
            for i in 0..n {
                for k in (i..n - 1).rev() {
                    let (lo, hi) = coeffs.split_at_mut(k + 1);
                    for (a, b) in lo[k].iter_mut().zip(&hi[0]) {
                        *a += shift * b;
                    }
                }
            }
        }
        Self {
            origin: new_origin,
            coeffs,
        }
    }
}

fn check_values(nodes: &[f64], values: &[StateVector]) -> Result<usize> {
    if nodes.is_empty() {
        return Err(Error::InvalidNodes("empty node set".into()));
    }
    if nodes.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} nodes but {} values",
            nodes.len(),
            values.len()
        )));
    }
    if nodes.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidNodes("non-finite node".into()));
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[i + 1..].iter().any(|b| a == b) {
            return Err(Error::InvalidNodes(format!("coincident nodes at {a}")));
        }
    }
    let d = values[0].dim();
    if values.iter().any(|v| v.dim() != d) {
        return Err(Error::InvalidArgument("values differ in dimension".into()));
    }
    Ok(d)
}

/// Newton coefficients `g[t_0], g[t_0,t_1], ..., g[t_0..t_{n-1}]`, per component.
fn newton_coefficients(nodes: &[f64], values: &[StateVector]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut table: Vec<Vec<f64>> = values.iter().map(|v| v.as_slice().to_vec()).collect();
    for k in 1..n {
        for i in (k..n).rev() {
            let denom = nodes[i] - nodes[i - k];
            let (lo, hi) = table.split_at_mut(i);
            for (t, prev) in hi[0].iter_mut().zip(&lo[i - 1]) {
                *t = (*t - prev) / denom;
            }
        }
    }
    table
}

/// Interpolating polynomial of degree `<= nodes.len() - 1`, expanded around
/// the first node.
pub fn interpolate(nodes: &[f64], values: &[StateVector]) -> Result<LocalPolynomial> {
    let d = check_values(nodes, values)?;
    let newton = newton_coefficients(nodes, values);
    let origin = nodes[0];
    let n = nodes.len();

    // p <- p * (s - o_k) + c_k, from the innermost Newton term outwards.
    let mut coeffs: Vec<Vec<f64>> = vec![newton[n - 1].clone()];
    for k in (0..n - 1).rev() {
        let offset = nodes[k] - origin;
        let mut next = vec![vec![0.0; d]; coeffs.len() + 1];
        for (j, row) in coeffs.iter().enumerate() {
            for c in 0..d {
                next[j + 1][c] += row[c];
                next[j][c] -= offset * row[c];
            }
        }
        for c in 0..d {
            next[0][c] += newton[k][c];
        }
        coeffs = next;
    }
    Ok(LocalPolynomial { origin, coeffs })
}

/// `P(t) = y_i + \int_{x_i}^t poly`, as a polynomial around `x_i`.
///
/// `P(x_i) = y_i` holds exactly since the constant row is `y_i` itself.
pub fn integrate_from(
    poly: &LocalPolynomial,
    x_i: f64,
    y_i: &StateVector,
) -> Result<LocalPolynomial> {
    if poly.dim() != y_i.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    if !x_i.is_finite() || poly.coeffs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    let centred;
    let poly = if poly.origin == x_i {
        poly
    } else {
        centred = poly.recentered(x_i);
        &centred
    };
    let mut coeffs = Vec::with_capacity(poly.coeffs.len() + 1);
    coeffs.push(y_i.as_slice().to_vec());
    for (k, row) in poly.coeffs.iter().enumerate() {
        let div = (k + 1) as f64;
        coeffs.push(row.iter().map(|v| v / div).collect());
    }
    Ok(LocalPolynomial {
        origin: x_i,
        coeffs,
    })
}

/// Order-`(n-1)` divided difference `g[t_0, ..., t_{n-1}]`, computed
/// component by component. Nodes need only be pairwise distinct.
pub fn divided_difference(nodes: &[f64], values: &[StateVector]) -> Result<StateVector> {
    check_values(nodes, values)?;
    let mut newton = newton_coefficients(nodes, values);
    StateVector::new(newton.pop().expect("non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(v: &[f64]) -> StateVector {
        StateVector::from_slice(v).unwrap()
    }

    fn scalars(v: &[f64]) -> Vec<StateVector> {
        v.iter().map(|&x| sv(&[x])).collect()
    }

    #[test]
    fn equidistant_examples() {
        assert_eq!(equidistant_nodes(0.0, 1.0, 1).unwrap().as_slice(), &[0.0]);
        assert_eq!(
            equidistant_nodes(0.0, 1.0, 3).unwrap().as_slice(),
            &[0.0, 0.5, 1.0]
        );
        assert_eq!(
            equidistant_nodes(2.0, 4.0, 2).unwrap().as_slice(),
            &[2.0, 4.0]
        );
    }

    #[test]
    fn equidistant_errors() {
        assert!(matches!(
            equidistant_nodes(0.0, 1.0, 0),
            Err(Error::InvalidNodes(_))
        ));
        assert!(matches!(
            equidistant_nodes(1.0, 1.0, 2),
            Err(Error::InvalidNodes(_))
        ));
        assert!(matches!(
            equidistant_nodes(2.0, 1.0, 2),
            Err(Error::InvalidNodes(_))
        ));
    }

    #[test]
    fn last_node_is_exact() {
        let x1 = 0.1 + 0.2;
        let n = equidistant_nodes(0.1, x1, 7).unwrap();
        assert_eq!(*n.last().unwrap(), x1);
    }

    #[test]
    fn interpolate_examples() {
        let p = interpolate(&[0.0], &scalars(&[5.0])).unwrap();
        assert_eq!(p.coeffs, vec![vec![5.0]]);

        let p = interpolate(&[0.0, 1.0], &scalars(&[0.0, 2.0])).unwrap();
        assert_eq!(p.coeffs, vec![vec![0.0], vec![2.0]]);

        let p = interpolate(&[0.0, 0.5, 1.0], &scalars(&[0.0, 0.25, 1.0])).unwrap();
        assert_eq!(p.coeffs, vec![vec![0.0], vec![0.0], vec![1.0]]);
    }

    #[test]
    fn interpolate_rejects_coincident_nodes() {
        let err = interpolate(&[0.0, 0.0], &scalars(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidNodes(_)));
    }

    #[test]
    fn integrate_examples() {
        let zero = LocalPolynomial::constant(0.0, &[0.0]);
        let p = integrate_from(&zero, 0.0, &sv(&[3.0])).unwrap();
        assert_eq!(p.eval(0.7), vec![3.0]);

        let c = LocalPolynomial::constant(0.0, &[2.5]);
        let p = integrate_from(&c, 0.0, &sv(&[0.0])).unwrap();
        assert_eq!(p.coeffs, vec![vec![0.0], vec![2.5]]);

        let two_t = LocalPolynomial {
            origin: 0.0,
            coeffs: vec![vec![0.0], vec![2.0]],
        };
        let p = integrate_from(&two_t, 0.0, &sv(&[1.0])).unwrap();
        assert_eq!(p.coeffs, vec![vec![1.0], vec![0.0], vec![1.0]]);
    }

    #[test]
    fn integrate_recentres_off_origin() {
        // q(t) = 2t expanded at 0, integrated from x_i = 1 with y_i = 0: P = t^2 - 1.
        let two_t = LocalPolynomial {
            origin: 0.0,
            coeffs: vec![vec![0.0], vec![2.0]],
        };
        let p = integrate_from(&two_t, 1.0, &sv(&[0.0])).unwrap();
        assert_eq!(p.origin, 1.0);
        assert_eq!(p.eval(1.0), vec![0.0]);
        assert!((p.eval(3.0)[0] - 8.0).abs() < 1e-14);
    }

    #[test]
    fn divided_difference_examples() {
        assert_eq!(
            divided_difference(&[0.0, 1.0], &scalars(&[0.0, 1.0])).unwrap()[0],
            1.0
        );
        assert_eq!(
            divided_difference(&[0.0, 1.0, 2.0], &scalars(&[0.0, 1.0, 4.0])).unwrap()[0],
            1.0
        );
        // t^3 at 0, 1/2, 1: Vandermonde leading coefficient 1.5 (= sum of nodes).
        let dd = divided_difference(&[0.0, 0.5, 1.0], &scalars(&[0.0, 0.125, 1.0])).unwrap();
        assert!((dd[0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn divided_difference_errors() {
        assert!(matches!(
            divided_difference(&[1.0, 2.0, 1.0], &scalars(&[0.0, 1.0, 2.0])),
            Err(Error::InvalidNodes(_))
        ));
        assert!(matches!(
            divided_difference(&[], &[]),
            Err(Error::InvalidNodes(_))
        ));
        assert!(matches!(
            divided_difference(&[0.0, 1.0], &scalars(&[0.0])),
            Err(Error::InvalidArgument(_))
        ));
    }

    fn poly_eval(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, a| acc * t + a)
    }

    /// Distinct nodes in [-2, 2] with gaps of at least 0.1, in random order.
    fn spread_nodes(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-20i32..=20, 1..=max)
            .prop_map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v
            })
            .prop_flat_map(|v| {
                let n = v.len();
                (Just(v), prop::collection::vec(-0.04..0.04f64, n))
            })
            .prop_map(|(v, jitter)| {
                v.iter()
                    .zip(jitter)
                    .map(|(&k, j)| k as f64 * 0.1 + j)
                    .collect::<Vec<_>>()
            })
            .prop_shuffle()
    }

    proptest! {
        #[test]
        fn reproduces_polynomials(
            nodes in spread_nodes(6),
            seed in prop::collection::vec(-3.0..3.0f64, 6),
        ) {
            let n = nodes.len();
            let mut sorted = nodes.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let origin = sorted[0];
            // Coefficients of p in the local variable t - origin.
            let coef = &seed[..n];
            let values: Vec<StateVector> =
                sorted.iter().map(|&t| sv(&[poly_eval(coef, t - origin)])).collect();
            let p = interpolate(&sorted, &values).unwrap();
            prop_assert!(p.degree() < n);
            let scale = coef.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (row, want) in p.coeffs.iter().zip(coef) {
                prop_assert!((row[0] - want).abs() <= 1e-10 * scale, "{} vs {}", row[0], want);
            }
            for (t, v) in sorted.iter().zip(&values) {
                let got = p.eval(*t)[0];
                prop_assert!((got - v[0]).abs() <= 4.0 * crate::state::UNIT_ROUNDOFF * n as f64 * 1e3 * scale);
            }
        }

        #[test]
        fn divided_difference_is_symmetric(nodes in spread_nodes(6), vals in prop::collection::vec(-5.0..5.0f64, 6)) {
            let n = nodes.len();
            let values = scalars(&vals[..n]);
            let base = divided_difference(&nodes, &values).unwrap()[0];
            let mut idx: Vec<usize> = (0..n).collect();
            idx.reverse();
            idx.rotate_left(n / 2);
            let pn: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
            let pv: Vec<StateVector> = idx.iter().map(|&i| values[i].clone()).collect();
            let perm = divided_difference(&pn, &pv).unwrap()[0];
            prop_assert!((base - perm).abs() <= 1e-9 * base.abs().max(1.0));
        }

        #[test]
        fn divided_difference_is_componentwise(
            nodes in spread_nodes(5),
            a in prop::collection::vec(-5.0..5.0f64, 5),
            b in prop::collection::vec(-5.0..5.0f64, 5),
        ) {
            let n = nodes.len();
            let stacked: Vec<StateVector> = (0..n).map(|k| sv(&[a[k], b[k]])).collect();
            let dd = divided_difference(&nodes, &stacked).unwrap();
            let da = divided_difference(&nodes, &scalars(&a[..n])).unwrap();
            let db = divided_difference(&nodes, &scalars(&b[..n])).unwrap();
            prop_assert_eq!(dd[0], da[0]);
            prop_assert_eq!(dd[1], db[0]);
        }
    }
}
