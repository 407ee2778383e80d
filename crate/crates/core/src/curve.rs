//! The curve `C_{k,n}`: input validation, genus, and the exponent tuples
//! indexing its holomorphic 1-forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generalized Fermat curve of type `(k, n)` with branch values
/// `λ₁, …, λ_{n−2}`.
///
/// The finite branch set is `R = (0, 1, λ₁, …, λ_{n−2})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    k: u32,
    n: usize,
    lambdas: Vec<Complex64>,
    branch_points: Vec<Complex64>,
}

impl CurveSpec {
    /// Validates `(k, n, λ)` and builds the branch set.
    pub fn new(k: u32, n: usize, lambdas: &[Complex64]) -> Result<Self> {
        if k < 2 {
            return Err(Error::DegenerateInput(format!("k = {k}, need k >= 2")));
        }
        if n < 2 {
            return Err(Error::DegenerateInput(format!("n = {n}, need n >= 2")));
        }
        if lambdas.len() != n - 2 {
            return Err(Error::DegenerateInput(format!(
                "expected {} lambda values for n = {n}, got {}",
                n - 2,
                lambdas.len()
            )));
        }
        if lambdas
            .iter()
            .any(|l| !(l.re.is_finite() && l.im.is_finite()))
        {
            return Err(Error::DegenerateInput("non-finite lambda".into()));
        }

        let mut branch_points = Vec::with_capacity(n);
        branch_points.push(Complex64::new(0.0, 0.0));
        branch_points.push(Complex64::new(1.0, 0.0));
        branch_points.extend_from_slice(lambdas);

        for a in 0..n {
            for b in a + 1..n {
                if branch_points[a] == branch_points[b] {
                    return Err(Error::CollidingBranchPoints {
                        first: a + 1,
                        second: b + 1,
                    });
                }
            }
        }

        Ok(Self {
            k,
            n,
            lambdas: lambdas.to_vec(),
            branch_points,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    /// `R = (r₁ = 0, r₂ = 1, r₃ = λ₁, …)`.
    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn genus(&self) -> usize {
        genus(self.k, self.n)
    }

    pub fn forms(&self) -> Vec<FormIndex> {
        enumerate_forms(self.k, self.n)
    }

    /// Smallest distance between two distinct branch points.
    pub fn min_separation(&self) -> f64 {
        let r = &self.branch_points;
        let mut best = f64::INFINITY;
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                best = best.min((r[a] - r[b]).norm());
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        let r = &self.branch_points;
        let mut best = 0.0f64;
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                best = best.max((r[a] - r[b]).norm());
            }
        }
        best
    }

    /// Default base point: centroid of `R` shifted up by twice its diameter.
    pub fn default_base_point(&self) -> Complex64 {
        let c = self.branch_points.iter().sum::<Complex64>() / self.n as f64;
        c + Complex64::new(0.0, 2.0 * self.diameter())
    }
}

/// `g = (2 + k^{n−1}((n−1)(k−1) − 2)) / 2`.
pub fn genus(k: u32, n: usize) -> usize {
    let k = k as i128;
    let n = n as i128;
    let g = (2 + k.pow((n - 1) as u32) * ((n - 1) * (k - 1) - 2)) / 2;
    g as usize
}

/// An exponent tuple `α = (α₁, …, α_n)` with `0 ≤ αᵢ ≤ k−1` for `i ≥ 2` and
/// `0 ≤ α₁ ≤ Σ_{i≥2} αᵢ − 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormIndex {
    alpha: Vec<u32>,
}

impl FormIndex {
    /// Checks the index-set bounds for the given `k`.
    pub fn new(alpha: Vec<u32>, k: u32) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::DegenerateInput(
                "form index needs at least two entries".into(),
            ));
        }
        if alpha[1..].iter().any(|&a| a >= k) {
            return Err(Error::DegenerateInput(format!(
                "{alpha:?}: entries after the first must be < {k}"
            )));
        }
        let tail: i64 = alpha[1..].iter().map(|&a| a as i64).sum();
        if alpha[0] as i64 > tail - 2 {
            return Err(Error::DegenerateInput(format!(
                "{alpha:?}: first entry exceeds sum of the rest minus 2"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// `M₁ = α₁ + 1`, `Mᵢ = −αᵢ` for `i ≥ 2`: the exponent of `ζ_k` by which the
    /// form changes under the `i`-th standard deck generator.
    pub fn m_exponents(&self) -> Vec<i64> {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| if i == 0 { a as i64 + 1 } else { -(a as i64) })
            .collect()
    }

    /// Exponents of `(−w)` and `(w − r_t)` in the integrand `W(R, α)`.
    pub fn integrand_exponents(&self, k: u32) -> Vec<f64> {
        let k = k as f64;
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if i == 0 {
                    (a as f64 + 1.0) / k - 1.0
                } else {
                    -(a as f64) / k
                }
            })
            .collect()
    }
}

/// All of `I_{k,n}` in lexicographic order.
pub fn enumerate_forms(k: u32, n: usize) -> Vec<FormIndex> {
    let mut out = Vec::new();
    let mut tail = vec![0u32; n.saturating_sub(1)];
    loop {
        let s: u32 = tail.iter().sum();
        if s >= 2 {
            for a1 in 0..=s - 2 {
                let mut alpha = Vec::with_capacity(n);
                alpha.push(a1);
                alpha.extend_from_slice(&tail);
                out.push(FormIndex { alpha });
            }
        }
        // odometer over [0, k-1]^{n-1}
        let mut pos = tail.len();
        loop {
            if pos == 0 {
                out.sort();
                return out;
            }
            pos -= 1;
            tail[pos] += 1;
            if tail[pos] < k {
                break;
            }
            tail[pos] = 0;
        }
    }
}
