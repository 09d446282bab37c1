use crate::error::{Error, Result};

/// Symmetric positive definite matrix in lower band storage:
/// `band[i][k] = A(i, i − k)` for `k ≤ bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBanded {
    n: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

impl SymmetricBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            band: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, k: usize) -> usize {
        i * (self.bandwidth + 1) + k
    }

    /// Adds `v` to `A(i, j)` (and implicitly `A(j, i)`); requires `j ≤ i`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        let s = self.slot(i, i - j);
        self.band[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.band[self.slot(i, i - j)]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.band[self.slot(i, 0)..self.slot(i, 0) + self.bandwidth + 1];
            y[i] += row[0] * x[i];
            for k in 1..=self.bandwidth.min(i) {
                let a = row[k];
                y[i] += a * x[i - k];
                y[i - k] += a * x[i];
            }
        }
        y
    }

    /// `A = L Lᵀ` with `L` sharing the band layout.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let bw = self.bandwidth;
        let mut l = self.band.clone();
        let w = bw + 1;
        for i in 0..self.n {
            let k0 = bw.min(i);
            // off-diagonal entries L(i, j), j = i − k, from farthest to nearest
            for k in (1..=k0).rev() {
                let j = i - k;
                let mut s = l[i * w + k];
                // Σ_{m < j} L(i, m) L(j, m) over the shared band
                let reach = bw.min(j).min(k0 - k);
                for t in 1..=reach {
                    s -= l[i * w + k + t] * l[j * w + t];
                }
                l[i * w + k] = s / l[j * w];
            }
            let mut d = l[i * w];
            for k in 1..=k0 {
                d -= l[i * w + k] * l[i * w + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "matrix is not positive definite (pivot {d:e} at row {i})"
                )));
            }
            l[i * w] = d.sqrt();
        }
        Ok(BandedCholesky {
            n: self.n,
            bandwidth: bw,
            l,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let w = self.bandwidth + 1;
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for k in 1..=self.bandwidth.min(i) {
                s -= self.l[i * w + k] * y[i - k];
            }
            y[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in 1..=self.bandwidth.min(self.n - 1 - i) {
                s -= self.l[(i + k) * w + k] * y[i + k];
            }
            y[i] = s / self.l[i * w];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, bw: usize, seed: u64) -> SymmetricBanded {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = SymmetricBanded::zeros(n, bw);
        for i in 0..n {
            let mut off = 0.0;
            for k in 1..=bw.min(i) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a.add(i, i - k, v);
                off += v.abs();
            }
            a.add(i, i, 2.0 * bw as f64 + off + 1.0);
        }
        a
    }

    #[test]
    fn solves_random_banded_system() {
        for (n, bw) in [(1, 0), (5, 2), (40, 7), (100, 1)] {
            let a = random_spd(n, bw, n as u64);
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let b = a.matvec(&x);
            let got = a.cholesky().unwrap().solve(&b);
            for (g, e) in got.iter().zip(&x) {
                assert!((g - e).abs() < 1e-12, "n={n} bw={bw}");
            }
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let a = random_spd(12, 3, 1);
        let x: Vec<f64> = (0..12).map(|i| i as f64 - 5.0).collect();
        let y = a.matvec(&x);
        for i in 0..12 {
            let dense: f64 = (0..12).map(|j| a.get(i, j) * x[j]).sum();
            assert!((dense - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let mut a = SymmetricBanded::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        assert!(matches!(a.cholesky(), Err(Error::SolverFailure(_))));
    }
}
