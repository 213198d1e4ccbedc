//! Partial eigensolver for real symmetric tridiagonal matrices: Sturm
//! sequence bisection for eigenvalues, inverse iteration for vectors.

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`: negative pivots of the
    /// `LDLᵀ` factorization of `T - x`.
    pub fn count_below(&self, x: f64) -> usize {
        self.count_below_guarded(x, f64::EPSILON * self.gershgorin_scale())
    }

    fn count_below_guarded(&self, x: f64, guard: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q.abs() < guard {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected inside `[lo, hi]`
    /// down to a few ulps.
    pub fn kth_eigenvalue_in(&self, k: usize, lo: f64, hi: f64) -> f64 {
        self.bisect(k, lo, hi, f64::EPSILON * self.gershgorin_scale())
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64, guard: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                return mid;
            }
            if self.count_below_guarded(mid, guard) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// All eigenvalues strictly below `cutoff`, ascending.
    pub fn eigenvalues_below(&self, cutoff: f64) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let hi = cutoff.min(ghi);
        if !(hi > glo) {
            return Vec::new();
        }
        let guard = f64::EPSILON * self.gershgorin_scale();
        let k = self.count_below_guarded(hi, guard);
        let mut out = Vec::with_capacity(k);
        let mut lo = glo;
        for j in 0..k {
            let ev = self.bisect(j, lo, hi, guard);
            out.push(ev);
            // eigenvalues are ascending; the next one is not below this one
            lo = lo.max(ev - 4.0 * f64::EPSILON * ev.abs().max(1.0));
        }
        out
    }

    /// Solve `(T - shift) y = b` by Gaussian elimination with partial
    /// pivoting. Zero pivots are replaced by a tiny perturbation.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * self.gershgorin_scale();
        // U has up to two super-diagonals after pivoting.
        let mut d = vec![0.0; n];
        let mut du = vec![0.0; n];
        let mut du2 = vec![0.0; n];
        let mut dl: Vec<f64> = self.off.clone();
        let mut y = b.to_vec();
        d.iter_mut()
            .zip(&self.diag)
            .for_each(|(d, a)| *d = a - shift);
        du[..n - 1].copy_from_slice(&self.off);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                dl[i] = m;
                d[i + 1] -= m * du[i];
                y[i + 1] -= m * y[i];
                du2[i] = 0.0;
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - m * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                y.swap(i, i + 1);
                y[i + 1] -= m * y[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        x
    }

    /// Unit-Euclidean-norm eigenvector for the eigenvalue `ev`, orthogonal to
    /// the vectors in `previous`.
    pub fn inverse_iteration(&self, ev: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let scale = self.gershgorin_scale();
        let shift = ev + 8.0 * f64::EPSILON * scale.max(ev.abs());
        // deterministic, non-symmetric start so no eigenvector is missed
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75).fract())
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            x = self.shifted_solve(shift, &x);
            for p in previous {
                let c = dot(&x, p);
                x.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
            }
            normalize(&mut x);
        }
        // fix the sign: largest component positive
        let imax = x
            .iter()
            .enumerate()
            .fold(
                (0, 0.0),
                |(im, m), (i, v)| if v.abs() > m { (i, v.abs()) } else { (im, m) },
            )
            .0;
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// Eigenpairs with eigenvalue below `cutoff`, ascending; vectors have unit
    /// Euclidean norm.
    pub fn eigenpairs_below(&self, cutoff: f64) -> Vec<(f64, Vec<f64>)> {
        self.eigenvectors_for(self.eigenvalues_below(cutoff))
    }

    /// Eigenvectors for a complete ascending run of lowest eigenvalues, as
    /// returned by [`Self::eigenvalues_below`].
    pub fn eigenvectors_for(&self, values: Vec<f64>) -> Vec<(f64, Vec<f64>)> {
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for &ev in &values {
            let v = self.inverse_iteration(ev, &vectors);
            vectors.push(v);
        }
        values.into_iter().zip(vectors).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Tridiagonal (2, -1) matrix: eigenvalues 2 - 2cos(kπ/(n+1)).
    fn second_difference(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn sturm_count_matches_closed_form() {
        let n = 50;
        let t = second_difference(n);
        let exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .collect();
        for x in [0.0, 0.1, 1.01, 2.0, 3.5, 4.1] {
            let expected = exact.iter().filter(|&&e| e < x).count();
            assert_eq!(t.count_below(x), expected, "x = {x}");
        }
    }

    #[test]
    fn bisection_and_inverse_iteration() {
        let n = 400;
        let t = second_difference(n);
        let pairs = t.eigenpairs_below(0.01);
        let exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .filter(|&e| e < 0.01)
            .collect();
        assert_eq!(pairs.len(), exact.len());
        for ((ev, v), ex) in pairs.iter().zip(&exact) {
            assert!((ev - ex).abs() <= 1e-13, "{ev} vs {ex}");
            let tv = t.matvec(v);
            let r: f64 = tv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - ev * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-10, "residual {r}");
        }
        for i in 0..pairs.len() {
            for j in 0..pairs.len() {
                let d = dot(&pairs[i].1, &pairs[j].1);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_below_spectrum() {
        let t = second_difference(20);
        assert!(t.eigenvalues_below(0.0).is_empty());
        assert!(t.eigenpairs_below(-5.0).is_empty());
    }

    #[test]
    fn solve_with_pivoting() {
        let t = SymTridiagonal::new(vec![0.0, 1.0, 3.0, -2.0], vec![2.0, -1.0, 0.5]);
        let b = vec![1.0, -2.0, 0.5, 4.0];
        let x = t.shifted_solve(0.0, &b);
        let tx = t.matvec(&x);
        for (a, b) in tx.iter().zip(&b) {
            assert!((a - b).abs() < 1e-12);
        }
        let x = t.shifted_solve(1.3, &b);
        let tx = t.matvec(&x);
        for i in 0..4 {
            assert!((tx[i] - 1.3 * x[i] - b[i]).abs() < 1e-12);
        }
    }
}
