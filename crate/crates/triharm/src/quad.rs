//! Symmetric Gaussian quadrature rules on the reference triangle.
//!
//! Points are barycentric, weights sum to one (reference-area normalized):
//! ∫_τ f = area(τ) · Σ w_i f(p_i). Degrees 2 and 4 serve load assembly,
//! degree 6 the error norms, degree 8 the saturation check.

use alloc::vec::Vec;

/// A quadrature rule: barycentric points, matching weights, exactness degree.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Returns the rule exact for polynomials up to `degree` ∈ {2, 4, 6, 8}.
///
/// # Panics
/// Panics on an unsupported degree; the set of rules is a closed part of the
/// crate's numerics contract.
pub fn quadrature_rule(degree: usize) -> QuadratureRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match degree {
        2 => {
            push3(&mut points, &mut weights, 1.0 / 3.0, 0.5);
        }
        4 => {
            push3(&mut points, &mut weights, 0.223381589678011, 0.445948490915965);
            push3(&mut points, &mut weights, 0.109951743655322, 0.091576213509771);
        }
        6 => {
            push3(&mut points, &mut weights, 0.116786275726379, 0.249286745170910);
            push3(&mut points, &mut weights, 0.050844906370207, 0.063089014491502);
            push6(
                &mut points,
                &mut weights,
                0.082851075618374,
                0.310352451033785,
                0.053145049844816,
            );
        }
        8 => {
            let third = 1.0 / 3.0;
            points.push([third, third, third]);
            weights.push(0.1443156076777804);
            push3(&mut points, &mut weights, 0.09509163426728942, 0.4592925882927186);
            push3(&mut points, &mut weights, 0.10321737053471724, 0.17056930775175527);
            push3(&mut points, &mut weights, 0.03245849762319833, 0.050547228317030854);
            push6(
                &mut points,
                &mut weights,
                0.02723031417443411,
                0.2631128296346509,
                0.00839477740995761,
            );
        }
        _ => panic!("unsupported quadrature degree {degree}"),
    }
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

/// The three cyclic permutations of (a, a, 1−2a).
fn push3(points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>, w: f64, a: f64) {
    let c = 1.0 - 2.0 * a;
    for p in [[a, a, c], [a, c, a], [c, a, a]] {
        points.push(p);
        weights.push(w);
    }
}

/// All six permutations of (1−b−c, b, c).
fn push6(points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>, w: f64, b: f64, c: f64) {
    let a = 1.0 - b - c;
    for p in [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ] {
        points.push(p);
        weights.push(w);
    }
}
