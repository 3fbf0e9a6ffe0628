//! Small numeric kernel: complex scalars, singular values of tall skinny
//! matrices, and deterministic grid generation.

use serde::{Deserialize, Serialize};

/// Complex double. Kept local so hot loops stay allocation- and dependency-free.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
    pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
    pub const I: C64 = C64 { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> C64 {
        C64 { re, im }
    }

    /// e^{i t}
    pub fn cis(t: f64) -> C64 {
        C64 {
            re: t.cos(),
            im: t.sin(),
        }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn abs_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn conj(self) -> C64 {
        C64::new(self.re, -self.im)
    }

    pub fn scale(self, s: f64) -> C64 {
        C64::new(self.re * s, self.im * s)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl std::ops::Add for C64 {
    type Output = C64;
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
}

impl std::ops::Sub for C64 {
    type Output = C64;
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
}

impl std::ops::Mul for C64 {
    type Output = C64;
    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl std::ops::Neg for C64 {
    type Output = C64;
    fn neg(self) -> C64 {
        C64::new(-self.re, -self.im)
    }
}

/// Singular values of an m x 2 real matrix (rows supplied), descending.
///
/// Uses the 2x2 Gram matrix eigenvalues in closed form, which is exact
/// enough for rank certification at the tolerances used here.
pub fn singular_values_mx2(rows: &[[f64; 2]]) -> [f64; 2] {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut d = 0.0;
    for r in rows {
        a += r[0] * r[0];
        b += r[0] * r[1];
        d += r[1] * r[1];
    }
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    [l1.max(0.0).sqrt(), l2.max(0.0).sqrt()]
}

/// Singular values of an m x n real matrix, n <= 4, via Jacobi iteration on
/// the n x n Gram matrix. Descending order.
pub fn singular_values_small(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    assert!(n <= 4 && n >= 1);
    let mut g = [[0.0f64; 4]; 4];
    for r in rows {
        for i in 0..n {
            for j in 0..n {
                g[i][j] += r[i] * r[j];
            }
        }
    }
    let mut ev = jacobi_eigenvalues(&mut g, n);
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Eigenvalues of a symmetric n x n matrix (n <= 4) by cyclic Jacobi.
fn jacobi_eigenvalues(m: &mut [[f64; 4]; 4], n: usize) -> Vec<f64> {
    for _ in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Solve a 2x2 linear system a*x = b. Returns None when near-singular.
pub fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (b[1] * a[0][0] - b[0] * a[1][0]) / det,
    ])
}

/// Uniform grid over [lo, hi) with n points: lo + i*(hi-lo)/n.
///
/// The exclusive upper end is deliberate: on periodic axes it avoids the
/// seam duplicate, and for symmetric ranges with even n it places a sample
/// exactly at the midpoint.
pub fn linspace_excl(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + i as f64 * step)
}

/// Uniform grid over [lo, hi] inclusive of both ends (n >= 2 points).
pub fn linspace_incl(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + i as f64 * step })
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = t % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Largest circular gap in a set of angles (radians). Returns (gap, center).
/// Angles need not be sorted or wrapped. Empty input yields (TAU, 0.0).
pub fn max_circular_gap(angles: &[f64]) -> (f64, f64) {
    if angles.is_empty() {
        return (std::f64::consts::TAU, 0.0);
    }
    let mut a: Vec<f64> = angles.iter().map(|&t| wrap_angle(t)).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut best = 0.0;
    let mut center = 0.0;
    for i in 0..a.len() {
        let next = if i + 1 == a.len() {
            a[0] + std::f64::consts::TAU
        } else {
            a[i + 1]
        };
        let gap = next - a[i];
        if gap > best {
            best = gap;
            center = wrap_angle(a[i] + 0.5 * gap);
        }
    }
    (best, center)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_singular_values_orthonormal_columns() {
        let rows = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]];
        let s = singular_values_mx2(&rows);
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert!((s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_second_value_zero() {
        let rows = [[1.0, 2.0], [2.0, 4.0], [-1.0, -2.0]];
        let s = singular_values_mx2(&rows);
        assert!(s[1].abs() < 1e-12);
    }

    #[test]
    fn jacobi_matches_gram_on_two_columns() {
        let rows: Vec<Vec<f64>> = vec![
            vec![0.3, -1.2],
            vec![2.0, 0.7],
            vec![-0.5, 0.1],
            vec![1.1, 1.1],
        ];
        let fixed: Vec<[f64; 2]> = rows.iter().map(|r| [r[0], r[1]]).collect();
        let a = singular_values_mx2(&fixed);
        let b = singular_values_small(&rows, 2);
        assert!((a[0] - b[0]).abs() < 1e-10);
        assert!((a[1] - b[1]).abs() < 1e-10);
    }

    #[test]
    fn circular_gap_finds_missing_arc() {
        let angles: Vec<f64> = (0..100).map(|i| -1.0 + 2.0 * i as f64 / 100.0).collect();
        let (gap, center) = max_circular_gap(&angles);
        assert!(gap > 4.0);
        assert!(center.abs() > 2.5);
    }
}
