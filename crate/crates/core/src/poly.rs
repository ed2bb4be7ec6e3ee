//! Simultaneous root finding for dense complex polynomials.
//!
//! Coefficients are stored highest degree first, `c[0] z^d + c[1] z^{d-1} +
//! ... + c[d]`. Roots are refined together with the Ehrlich-Aberth iteration,
//! started from the Newton-polygon estimates of the root moduli. Outside the
//! unit disk the Newton correction is evaluated on the reversed polynomial so
//! that `z^d` never overflows, which matters for the bound-state roots of
//! degree ~1000 Bethe polynomials.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Residual threshold on `|p(z)| / (max|c| max(1,|z|)^d)`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iterations: usize,
    pub residual_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            residual_tol: ROOT_RESIDUAL_TOL,
        }
    }
}

/// All nonzero roots of `coeffs`, with multiplicity.
///
/// Trailing zero coefficients correspond to roots at `z = 0`; those are
/// dropped.
pub fn solve_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    solve_roots_with(coeffs, RootOptions::default())
}

pub fn solve_roots_with(coeffs: &[Complex64], opts: RootOptions) -> Result<Vec<Complex64>> {
    if coeffs.is_empty() || coeffs[0] == Complex64::new(0.0, 0.0) {
        return Err(Error::Contract(
            "leading coefficient must be nonzero".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Contract("coefficients must be finite".into()));
    }
    let trailing = coeffs.iter().rev().take_while(|c| c.norm() == 0.0).count();
    let c = &coeffs[..coeffs.len() - trailing];
    let degree = c.len() - 1;
    if degree < 1 {
        return Err(Error::Contract("polynomial degree must be at least 1".into()));
    }
    if degree == 1 {
        return Ok(vec![-c[1] / c[0]]);
    }

    let mut last = Error::NoConvergence {
        iterations: 0,
        worst_residual: f64::INFINITY,
    };
    // A second start with rotated guesses rescues the rare run in which two
    // approximations collapse onto one root.
    for offset in [0.3, 1.1] {
        match aberth(c, hull_guesses(c, offset), opts) {
            Ok(roots) => return Ok(roots),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn aberth(c: &[Complex64], mut roots: Vec<Complex64>, opts: RootOptions) -> Result<Vec<Complex64>> {
    let degree = c.len() - 1;
    let mut frozen = vec![false; degree];
    let mut iterations = 0;
    while iterations < opts.max_iterations && frozen.iter().any(|f| !f) {
        iterations += 1;
        for i in 0..degree {
            if frozen[i] {
                continue;
            }
            let zi = roots[i];
            let (ratio, residual) = newton_ratio(c, zi);
            if residual == 0.0 {
                frozen[i] = true;
                continue;
            }
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                // p'(z) vanished; nudge off the critical point.
                roots[i] = zi * Complex64::new(1.0 + 1e-8, 1e-8);
                continue;
            }
            roots[i] = zi - step;
            if step.norm() <= 4.0 * f64::EPSILON * roots[i].norm().max(1.0)
                || residual <= f64::EPSILON * f64::EPSILON
            {
                frozen[i] = true;
            }
        }
    }

    let worst = roots
        .iter()
        .map(|&z| scaled_residual(c, z))
        .fold(0.0_f64, f64::max);
    if !(worst <= opts.residual_tol) {
        return Err(Error::NoConvergence {
            iterations,
            worst_residual: worst,
        });
    }
    Ok(roots)
}

/// `|p(z)| / (max|c| * max(1, |z|)^d)`.
pub fn scaled_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let value = if z.norm() <= 1.0 {
        horner(coeffs, z).0
    } else {
        horner_reversed(coeffs, z.inv()).0
    };
    value.norm() / scale
}

/// Evaluates `p(z)` (highest-first coefficients) and `p'(z)`.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = coeffs[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Evaluates `q(w) = w^d p(1/w)` and `q'(w)`.
fn horner_reversed(coeffs: &[Complex64], w: Complex64) -> (Complex64, Complex64) {
    let mut q = coeffs[coeffs.len() - 1];
    let mut dq = Complex64::new(0.0, 0.0);
    for &c in coeffs[..coeffs.len() - 1].iter().rev() {
        dq = dq * w + q;
        q = q * w + c;
    }
    (q, dq)
}

/// Newton correction `p(z)/p'(z)` together with the scaled residual at `z`.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    let degree = (coeffs.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (p, dp) = horner(coeffs, z);
        (p / dp, p.norm() / scale)
    } else {
        let w = z.inv();
        let (q, dq) = horner_reversed(coeffs, w);
        (z * q / (q * degree - w * dq), q.norm() / scale)
    }
}

/// Starting points from the upper convex hull of `(i, ln|a_i|)`: every hull
/// edge `(i0, i1)` contributes the `i1 - i0` roots of the two-term truncation
/// `a_i1 z^i1 + a_i0 z^i0`, slightly rotated to break reflection symmetry.
pub fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    hull_guesses(coeffs, 0.3)
}

fn hull_guesses(coeffs: &[Complex64], offset: f64) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    // a_i is the coefficient of z^i.
    let points: Vec<(usize, f64)> = (0..=degree)
        .filter_map(|i| {
            let a = coeffs[degree - i].norm();
            (a > 0.0).then(|| (i, a.ln()))
        })
        .collect();

    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(points.len());
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            // Nearly collinear points merge; otherwise rounding in ln|a_i|
            // splits an edge into unit edges with coincident guesses.
            let slack = 1e-9 * (pt.0 - x1) as f64 * (1.0 + y1.abs().max(pt.1.abs()));
            if cross >= -slack {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut guesses = Vec::with_capacity(degree);
    for edge in hull.windows(2) {
        let (i0, i1) = (edge[0].0, edge[1].0);
        let m = i1 - i0;
        let target = -coeffs[degree - i0] / coeffs[degree - i1];
        let radius = target.norm().powf(1.0 / m as f64);
        let base = target.arg() / m as f64 + offset / m as f64;
        for k in 0..m {
            let angle = base + std::f64::consts::TAU * k as f64 / m as f64;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_poly(coeffs: &[f64]) -> Vec<Complex64> {
        coeffs.iter().map(|&x| c(x, 0.0)).collect()
    }

    /// Matches each expected root to a distinct found root.
    fn assert_same_roots(found: &[Complex64], expected: &[Complex64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        let mut used = vec![false; found.len()];
        for e in expected {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < tol, "root {e} missing (closest at {dist:e})");
            used[idx] = true;
        }
    }

    #[test]
    fn quadratic_unit_roots() {
        let roots = solve_roots(&real_poly(&[1.0, 0.0, 1.0])).unwrap();
        assert_same_roots(&roots, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-13);
    }

    #[test]
    fn fifth_roots_of_unity() {
        let roots = solve_roots(&real_poly(&[1.0, 0.0, 0.0, 0.0, 0.0, -1.0])).unwrap();
        let expected: Vec<_> = (0..5)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 5.0))
            .collect();
        assert_same_roots(&roots, &expected, 1e-13);
    }

    #[test]
    fn zero_roots_are_dropped() {
        let roots = solve_roots(&real_poly(&[1.0, -3.0, 2.0, 0.0, 0.0])).unwrap();
        assert_same_roots(&roots, &[c(1.0, 0.0), c(2.0, 0.0)], 1e-13);
    }

    #[test]
    fn rejects_zero_leading_coefficient() {
        assert!(matches!(
            solve_roots(&real_poly(&[0.0, 1.0, 1.0])),
            Err(Error::Contract(_))
        ));
        assert!(solve_roots(&real_poly(&[2.0])).is_err());
    }

    fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
        let d = coeffs.len() - 1;
        let mut m = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            m[(0, j)] = -coeffs[j + 1] / coeffs[0];
        }
        for i in 1..d {
            m[(i, i - 1)] = 1.0;
        }
        m.complex_eigenvalues().iter().copied().collect()
    }

    #[test]
    fn bethe_quintic_matches_companion_eigenvalues() {
        // 2z^5 + 2z^4 - 2z - 2: the N = 5, gamma = -2, zero-momentum polynomial.
        let coeffs = [2.0, 2.0, 0.0, 0.0, -2.0, -2.0];
        let roots = solve_roots(&real_poly(&coeffs)).unwrap();
        // z = -1 is a double root here; its estimates are only accurate to
        // ~sqrt(eps).
        assert_same_roots(&roots, &companion_roots(&coeffs), 1e-6);
        for z in &roots {
            assert!(scaled_residual(&real_poly(&coeffs), *z) < 1e-14);
        }
    }

    #[test]
    fn wide_dynamic_range_real_polynomial() {
        // (z - 1e3)(z - 1)(z - 1e-3)(z + 2)
        let r = [1e3, 1.0, 1e-3, -2.0];
        let mut coeffs = vec![c(1.0, 0.0)];
        for &root in &r {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * root;
            }
            coeffs = next;
        }
        let roots = solve_roots(&coeffs).unwrap();
        let expected: Vec<_> = r.iter().map(|&x| c(x, 0.0)).collect();
        assert_same_roots(&roots, &expected, 1e-9);
    }

    #[test]
    fn equal_modulus_coefficients_get_distinct_starts() {
        let w = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_3);
        let coeffs = vec![w, c(1.0, 0.0), w.conj(), -w];
        let guesses = initial_guesses(&coeffs);
        for i in 0..3 {
            for j in 0..i {
                assert!((guesses[i] - guesses[j]).norm() > 0.5);
            }
        }
        let roots = solve_roots(&coeffs).unwrap();
        assert!(roots.iter().all(|&z| scaled_residual(&coeffs, z) < 1e-13));
    }

    #[test]
    fn high_degree_sparse_polynomial_stays_finite() {
        // Degree 1001 with a root of modulus ~5: z^1001 would overflow.
        let n = 1001;
        let mut coeffs = vec![c(0.0, 0.0); n + 1];
        coeffs[0] = c(2.0, 0.0);
        coeffs[1] = c(10.0, 0.0);
        coeffs[n - 1] = c(-10.0, 0.0);
        coeffs[n] = c(-2.0, 0.0);
        let roots = solve_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), n);
        assert!(roots.iter().any(|z| (z.norm() - 5.0).abs() < 0.1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn roots_satisfy_residual_bound(
                parts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..12)
            ) {
                let mut coeffs: Vec<Complex64> = parts.iter().map(|&(a, b)| c(a, b)).collect();
                coeffs[0] = c(1.0, 0.0);
                let roots = solve_roots(&coeffs).unwrap();
                prop_assert_eq!(roots.len(), coeffs.len() - 1);
                for z in roots {
                    prop_assert!(scaled_residual(&coeffs, z) <= ROOT_RESIDUAL_TOL);
                }
            }
        }
    }
}
