//! Symbolic generators of `H₁(C_{k,n}, ℤ)` as words in the free generators
//! `φ₁, …, φ_n` of the deck group of the punctured sphere.
//!
//! Generator indices are 0-based here; serialized output uses 1-based
//! `j`, `l`, `i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveSpec, FormIndex};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HomologyWord {
    /// `φᵢᵏ`.
    Power { i: usize },
    /// `ρ [φⱼ, φₗ] ρ⁻¹` with `ρ = ∏_d φ_d^{g_d}` and `j < l`.
    ConjComm { g: Vec<u32>, j: usize, l: usize },
}

/// A free-group letter: generator index and exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn inv(self) -> Self {
        Self {
            inverse: !self.inverse,
            ..self
        }
    }
}

impl HomologyWord {
    pub fn is_power(&self) -> bool {
        matches!(self, HomologyWord::Power { .. })
    }

    /// Literal free-group spelling, left to right; no reduction.
    pub fn expand(&self, k: u32) -> Vec<Letter> {
        match self {
            HomologyWord::Power { i } => vec![Letter::new(*i, false); k as usize],
            HomologyWord::ConjComm { g, j, l } => {
                let rho: Vec<Letter> = g
                    .iter()
                    .enumerate()
                    .flat_map(|(d, &e)| std::iter::repeat_n(Letter::new(d, false), e as usize))
                    .collect();
                let mut out = Vec::with_capacity(2 * rho.len() + 4);
                out.extend_from_slice(&rho);
                out.extend([
                    Letter::new(*j, false),
                    Letter::new(*l, false),
                    Letter::new(*j, true),
                    Letter::new(*l, true),
                ]);
                out.extend(rho.iter().rev().map(|x| x.inv()));
                out
            }
        }
    }

    /// `Σ_d g_d M_d` for a conjugated commutator, `None` for powers.
    pub fn conjugation_exponent(&self, form: &FormIndex) -> Option<i64> {
        match self {
            HomologyWord::Power { .. } => None,
            HomologyWord::ConjComm { g, .. } => Some(
                g.iter()
                    .zip(form.m_exponents())
                    .map(|(&gd, md)| gd as i64 * md)
                    .sum(),
            ),
        }
    }

    /// `ζ_k^{Σ g_d M_d}`; unity for powers.
    pub fn conjugation_phase(&self, form: &FormIndex, k: u32) -> Complex64 {
        self.conjugation_exponent(form)
            .map_or(Complex64::new(1.0, 0.0), |e| root_of_unity(k, e))
    }
}

/// `ζ_k^e` with `ζ_k = e^{2πi/k}`; the exponent is reduced mod `k` first so
/// that `e ≡ 0` yields exactly 1.
pub fn root_of_unity(k: u32, e: i64) -> Complex64 {
    let r = e.rem_euclid(k as i64);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == k as i64 {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == k as i64 {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * k as i64 {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / k as f64)
}

/// The finite generating set of `H₁`: conjugated commutators ordered by
/// `(j, l, g)`, optionally preceded by `Power(0..n)`.
pub fn enumerate_generators(spec: &CurveSpec, include_powers: bool) -> Vec<HomologyWord> {
    let (k, n) = (spec.k(), spec.n());
    let mut out = Vec::new();
    if include_powers {
        out.extend((0..n).map(|i| HomologyWord::Power { i }));
    }
    let conjugators = conjugators(k, n);
    for j in 0..n {
        for l in j + 1..n {
            out.extend(
                conjugators
                    .iter()
                    .map(|g| HomologyWord::ConjComm { g: g.clone(), j, l }),
            );
        }
    }
    out
}

/// `[0, k−1]^n` in lexicographic order.
fn conjugators(k: u32, n: usize) -> Vec<Vec<u32>> {
    let total = (k as usize).pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut g = vec![0u32; n];
            for d in (0..n).rev() {
                g[d] = (idx % k as usize) as u32;
                idx /= k as usize;
            }
            g
        })
        .collect()
}
