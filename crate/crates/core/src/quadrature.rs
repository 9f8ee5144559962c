//! Gauss-Legendre rules and the Bessel function J0.

use std::f64::consts::PI;

/// Nodes and weights on `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let dp = legendre(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn on(n: usize, a: f64, b: f64) -> Self {
        let base = Self::new(n);
        let (h, c) = ((b - a) / 2.0, (b + a) / 2.0);
        GaussLegendre {
            nodes: base.nodes.iter().map(|x| c + h * x).collect(),
            weights: base.weights.iter().map(|w| h * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
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

const J0_SPLIT: f64 = 12.0;

/// Power series below `J0_SPLIT`, Hankel asymptotic expansion above.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < J0_SPLIT {
        let y = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= y / (k * k);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        // P ~ sum (-1)^k a_2k / x^2k, Q ~ -sum (-1)^k a_(2k+1) / x^(2k+1),
        // a_j = prod_{i<=j} (2i - 1)^2 / (8 i); stop at the smallest term.
        let mut a = 1.0;
        let (mut p, mut q) = (1.0, 0.0);
        let mut last = f64::INFINITY;
        let mut inv = 1.0;
        for j in 1..60 {
            let jf = j as f64;
            a *= (2.0 * jf - 1.0).powi(2) / (8.0 * jf);
            inv /= x;
            let t = a * inv;
            if t > last || t < 1e-17 {
                break;
            }
            last = t;
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if j % 2 == 0 {
                p += sign * t;
            } else {
                q -= sign * t;
            }
        }
        let chi = x - PI / 4.0;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Miller's backward recurrence normalized by `J0 + 2 sum J_2k = 1`.
    fn j0_miller(x: f64) -> f64 {
        if x == 0.0 {
            return 1.0;
        }
        let start = 2 * ((x + 40.0) as usize / 2) + 20;
        let (mut jp, mut j) = (0.0f64, 1e-300f64);
        let mut norm = 0.0;
        let mut j0 = 0.0;
        for k in (1..=start).rev() {
            let jm = 2.0 * k as f64 / x * j - jp;
            jp = j;
            j = jm;
            if (k - 1) % 2 == 0 && k - 1 > 0 {
                norm += 2.0 * j;
            }
            if k - 1 == 0 {
                j0 = j;
            }
            if j.abs() > 1e250 {
                j *= 1e-250;
                jp *= 1e-250;
                norm *= 1e-250;
            }
        }
        j0 / (norm + j0)
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 64, 128] {
            let r = GaussLegendre::on(n, -1.0, 3.0);
            assert!((r.weights.iter().sum::<f64>() - 4.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let n = 12;
        let r = GaussLegendre::on(n, 0.0, 2.0);
        for d in 0..2 * n {
            let exact = 2f64.powi(d as i32 + 1) / (d as f64 + 1.0);
            assert!((r.integrate(|x| x.powi(d as i32)) - exact).abs() < 1e-12 * exact, "degree {d}");
        }
    }

    #[test]
    fn gaussian_moment() {
        let r = GaussLegendre::on(64, -8.0, 8.0);
        assert!((r.integrate(|x| (-x * x).exp()) - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn j0_reference_points() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j0(2.404_825_557_695_773)).abs() < 1e-14);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-13);
        assert!((bessel_j0(50.0) - 0.055_812_327_669_251_87).abs() < 1e-14);
    }

    #[test]
    fn j0_matches_miller_recurrence() {
        let mut worst = 0.0f64;
        for i in 0..4000 {
            let x = i as f64 * 0.075;
            worst = worst.max((bessel_j0(x) - j0_miller(x)).abs());
        }
        assert!(worst < 1e-11, "{worst}");
    }

    #[test]
    fn j0_continuous_at_split() {
        let a = bessel_j0(J0_SPLIT - 1e-12);
        let b = bessel_j0(J0_SPLIT + 1e-12);
        assert!((a - b).abs() < 1e-11);
    }
}
