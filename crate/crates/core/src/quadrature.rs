//! Gauss rules on the unit interval and collapsed (Duffy) rules on the
//! reference triangle `{x >= 0, y >= 0, x + y <= 1}`.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Quadrature rule: points and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

impl<P> Rule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

pub type IntervalRule = Rule<f64>;
pub type TriangleRule = Rule<[f64; 2]>;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre_biunit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule with `npts` points on `[0, 1]`, exact through degree `2 npts - 1`.
pub fn gauss_interval(npts: usize) -> IntervalRule {
    assert!(npts >= 1, "a Gauss rule needs at least one point");
    let (x, w) = gauss_legendre_biunit(npts);
    Rule {
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&v| 0.5 * v).collect(),
    }
}

/// Gauss-Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`
/// (Golub-Welsch).
fn gauss_jacobi_biunit(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        jac[(k, k)] = if denom.abs() < 1e-300 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let num = 4.0 * m * (m + alpha) * (m + beta) * (m + ab);
            let den = (2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0);
            let b = (num / den).sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    // Newton polish, then closed-form weights
    let nf = n as f64;
    let cst = 2f64.powf(ab + 1.0) * gamma(nf + alpha + 1.0) * gamma(nf + beta + 1.0)
        / (gamma(nf + ab + 1.0) * gamma(nf + 1.0));
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..5 {
            let (p, d) = jacobi_with_derivative(n, alpha, beta, *x);
            let dx = p / d;
            *x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = jacobi_with_derivative(n, alpha, beta, *x);
        weights.push(cst / ((1.0 - *x * *x) * d * d));
    }
    (nodes, weights)
}

/// Classical (unnormalized) Jacobi polynomial `P_n^{(a,b)}(x)` and its derivative.
fn jacobi_with_derivative(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let eval = |n: usize, a: f64, b: f64| -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mut p0 = 1.0;
        let mut p1 = 0.5 * ((a + b + 2.0) * x + a - b);
        for k in 2..=n {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
            let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
            let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
            let p2 = (c2 * p1 - c3 * p0) / c1;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let p = eval(n, alpha, beta);
    let d = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * eval(n - 1, alpha + 1.0, beta + 1.0)
    };
    (p, d)
}

/// Gamma function for the small nonnegative integer/half-integer arguments used here.
fn gamma(x: f64) -> f64 {
    if (x - x.round()).abs() < 1e-14 && x > 0.0 {
        (1..x.round() as u64).map(|k| k as f64).product()
    } else {
        // Lanczos approximation, only hit for non-integer Jacobi parameters.
        const G: f64 = 7.0;
        const C: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Collapsed rule on the reference triangle exact for all bivariate
/// polynomials of total degree `<= degree_exact`.
///
/// Gauss-Legendre in the collapsed direction, Gauss-Jacobi with weight
/// `(1 - y)` in the other. Degrees 0 and 1 reduce to the centroid rule.
pub fn triangle_quadrature(degree_exact: usize) -> TriangleRule {
    let n = (degree_exact + 2) / 2;
    let (a, wa) = gauss_legendre_biunit(n);
    let (b, wb) = gauss_jacobi_biunit(n, 1.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&bj, &wbj) in b.iter().zip(&wb) {
        let y = 0.5 * (bj + 1.0);
        for (&ai, &wai) in a.iter().zip(&wa) {
            let s = 0.5 * (ai + 1.0);
            points.push([s * (1.0 - y), y]);
            // 1/2 from the Legendre map, 1/4 from the Jacobi map
            weights.push(0.125 * wai * wbj);
        }
    }
    Rule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn interval_small_rules() {
        let r = gauss_interval(1);
        assert_eq!(r.points, vec![0.5]);
        assert_eq!(r.weights, vec![1.0]);
        let r = gauss_interval(2);
        let off = 0.5 / 3f64.sqrt();
        assert!((r.points[0] - (0.5 - off)).abs() < 1e-15);
        assert!((r.points[1] - (0.5 + off)).abs() < 1e-15);
        assert!(r.weights.iter().all(|&w| (w - 0.5).abs() < 1e-15));
        let cube: f64 = r.iter().map(|(&s, w)| w * s.powi(3)).sum();
        assert!((cube - 0.25).abs() < 1e-15);
    }

    #[test]
    fn interval_exactness() {
        for n in 1..=20 {
            let r = gauss_interval(n);
            for d in 0..2 * n {
                let q: f64 = r.iter().map(|(&s, w)| w * s.powi(d as i32)).sum();
                let exact = 1.0 / (d as f64 + 1.0);
                assert!((q - exact).abs() < 2e-15 * 10.0, "n={n} d={d}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn centroid_rule() {
        for d in [0, 1] {
            let r = triangle_quadrature(d);
            assert_eq!(r.len(), 1);
            assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-15);
            assert!((r.points[0][1] - 1.0 / 3.0).abs() < 1e-15);
            assert!((r.weights[0] - 0.5).abs() < 1e-15);
        }
        let r = triangle_quadrature(1);
        let lin: f64 = r.iter().map(|(p, w)| w * (p[0] + p[1])).sum();
        assert!((lin - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_monomials_exact() {
        for deg in 0..=30 {
            let r = triangle_quadrature(deg);
            let wsum: f64 = r.weights.iter().sum();
            assert!((wsum - 0.5).abs() < 1e-14);
            for a in 0..=deg {
                for b in 0..=deg - a {
                    let q: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!(
                        (q - exact).abs() <= 1e-14 * exact.max(1e-3),
                        "deg={deg} a={a} b={b}: {q} vs {exact}"
                    );
                }
            }
        }
    }
}
