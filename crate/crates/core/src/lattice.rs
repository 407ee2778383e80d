//! Period vectors as points of `ℝ^{2g}` and extraction of a ℤ-basis of the
//! lattice they generate.
//!
//! Extraction picks `2g` independent generators, rewrites every generator
//! in their coordinates, recovers those coordinates as rationals with
//! bounded denominators, and merges the scaled integer rows with an exact
//! Hermite normal form.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::periods::PeriodMatrix;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Largest allowed distance between a coordinate and its rational approximant.
pub const RATIONAL_MATCH_TOL: f64 = 1e-7;
/// Reconstruction residual bound, relative to the largest generator norm.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Row `s` becomes `(Re P[s][0..g], Im P[s][0..g])`.
pub fn real_split(pm: &PeriodMatrix) -> DMatrix<f64> {
    let g = pm.genus();
    DMatrix::from_fn(pm.entries.len(), 2 * g, |s, c| {
        if c < g {
            pm.entries[s][c].re
        } else {
            pm.entries[s][c - g].im
        }
    })
}

/// Number of singular values above `rank_tol × σ_max`.
pub fn lattice_rank(vectors: &DMatrix<f64>, rank_tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let sv = vectors.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * top).count()
}

/// A ℤ-basis of the lattice spanned by a set of generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    /// `2g` basis vectors, each of length `2g`.
    pub basis: Vec<Vec<f64>>,
    /// `coefficients[s]` expresses generator `s` in the basis.
    pub coefficients: Vec<Vec<i64>>,
    /// `generator_combinations[i]` expresses basis vector `i` in the generators.
    pub generator_combinations: Vec<Vec<i64>>,
    /// Largest reconstruction error `‖Σ coefficients·basis − generator‖`.
    pub residual: f64,
    pub abs_det: f64,
}

impl LatticeBasis {
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        rows_to_matrix(&self.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub rank_tol: f64,
    pub denominator_bound: u64,
    pub match_tol: f64,
}

impl ExtractOptions {
    /// Defaults for a curve: denominators up to `k^{2n}`.
    pub fn for_spec(spec: &CurveSpec) -> Self {
        let bound = (spec.k() as u64)
            .checked_pow(2 * spec.n() as u32)
            .unwrap_or(u64::MAX);
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            denominator_bound: bound,
            match_tol: RATIONAL_MATCH_TOL,
        }
    }
}

/// A ℤ-basis of the period lattice spanned by the rows of `vectors`.
pub fn extract_basis(vectors: &DMatrix<f64>, spec: &CurveSpec) -> Result<LatticeBasis> {
    extract_basis_with(vectors, 2 * spec.genus(), &ExtractOptions::for_spec(spec))
}

pub fn extract_basis_with(
    vectors: &DMatrix<f64>,
    dim: usize,
    opts: &ExtractOptions,
) -> Result<LatticeBasis> {
    if vectors.ncols() != dim {
        return Err(Error::DegenerateInput(format!(
            "vectors have {} components, expected {dim}",
            vectors.ncols()
        )));
    }
    let m = vectors.nrows();
    let pivots = greedy_independent_rows(vectors, dim, opts.rank_tol)?;
    let b0 = vectors.select_rows(&pivots);
    let lu = b0.transpose().lu();

    // coordinates of every generator in the rows of b0, as exact rationals
    let mut rationals = Vec::with_capacity(m);
    for s in 0..m {
        let v: DVector<f64> = vectors.row(s).transpose();
        let x = lu.solve(&v).ok_or_else(|| Error::NotFullRank {
            rank: dim.saturating_sub(1),
            expected: dim,
        })?;
        let row = x
            .iter()
            .map(|&xi| {
                rational_approx(xi, opts.denominator_bound, opts.match_tol).ok_or_else(|| {
                    Error::ReconstructionFailed(format!(
                        "generator {s}: coordinate {xi} has no approximant with denominator <= {}",
                        opts.denominator_bound
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rationals.push(row);
    }

    let lcm = rationals
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, &(_, q)| acc.lcm(&BigInt::from(q)));
    let scaled: Vec<Vec<BigInt>> = rationals
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(p, q)| BigInt::from(p) * (&lcm / BigInt::from(q)))
                .collect()
        })
        .collect();

    let hnf = hermite_normal_form(&scaled);
    if hnf.rows.len() != dim {
        return Err(Error::NotFullRank {
            rank: hnf.rows.len(),
            expected: dim,
        });
    }

    let lcm_f = lcm.to_f64().unwrap_or(f64::INFINITY);
    let coords = DMatrix::from_fn(dim, dim, |i, c| big_to_f64(&hnf.rows[i][c]) / lcm_f);
    let basis_m = &coords * &b0;

    let mut coefficients = Vec::with_capacity(m);
    for (s, row) in scaled.iter().enumerate() {
        let a = hnf.solve(row).ok_or_else(|| {
            Error::ReconstructionFailed(format!(
                "generator {s} is not an integer combination of the HNF rows"
            ))
        })?;
        coefficients.push(to_i64_row(&a)?);
    }
    let generator_combinations = hnf
        .transforms
        .iter()
        .map(|t| to_i64_row(t))
        .collect::<Result<Vec<_>>>()?;

    let scale = (0..m).map(|s| vectors.row(s).norm()).fold(0.0, f64::max);
    let mut residual = 0.0f64;
    for (s, a) in coefficients.iter().enumerate() {
        let a = DVector::from_iterator(dim, a.iter().map(|&x| x as f64));
        let rebuilt = basis_m.transpose() * a;
        residual = residual.max((rebuilt - vectors.row(s).transpose()).norm());
    }
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::ReconstructionFailed(format!(
            "reconstruction residual {residual:.3e} exceeds {:.1e} x {scale:.3e}",
            RESIDUAL_TOL
        )));
    }

    let abs_det = basis_m.clone().lu().determinant().abs();
    Ok(LatticeBasis {
        basis: matrix_to_rows(&basis_m),
        coefficients,
        generator_combinations,
        residual,
        abs_det,
    })
}

/// Pivoted Gram–Schmidt: repeatedly takes the generator with the largest
/// component orthogonal to those already chosen.
fn greedy_independent_rows(
    vectors: &DMatrix<f64>,
    dim: usize,
    rank_tol: f64,
) -> Result<Vec<usize>> {
    let m = vectors.nrows();
    let mut resid: Vec<DVector<f64>> = (0..m).map(|s| vectors.row(s).transpose()).collect();
    let top = resid.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut chosen = Vec::with_capacity(dim);
    for _ in 0..dim {
        let best = (0..m)
            .filter(|s| !chosen.contains(s))
            .max_by(|&a, &b| resid[a].norm().total_cmp(&resid[b].norm()));
        let Some(best) = best else { break };
        let nb = resid[best].norm();
        if top == 0.0 || nb <= rank_tol * top {
            break;
        }
        let q = &resid[best] / nb;
        for r in resid.iter_mut() {
            let d = q.dot(r);
            r.axpy(-d, &q, 1.0);
        }
        chosen.push(best);
    }
    if chosen.len() < dim {
        return Err(Error::NotFullRank {
            rank: chosen.len(),
            expected: dim,
        });
    }
    Ok(chosen)
}

/// Best rational approximation `p/q` of `x` with `q ≤ max_den` and
/// `|x − p/q| ≤ tol`, from the continued-fraction convergents.
pub fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            return None;
        }
        let a_i = a as i128;
        let h_next = a_i.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a_i.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den as i128 {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((i64::try_from(h).ok()?, k as u64));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Row-style Hermite normal form with the unimodular transform recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct Hnf {
    /// Nonzero rows, upper echelon with positive pivots and reduced entries
    /// above each pivot.
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    /// `transforms[i]` combines the input rows into `rows[i]`.
    pub transforms: Vec<Vec<BigInt>>,
}

impl Hnf {
    /// Integer `a` with `a · rows = v`, if it exists.
    pub fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = v.to_vec();
        let mut out = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let (q, rem) = rest[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
            out.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(out)
    }
}

/// Hermite normal form of the integer rows, built by inserting one row at a
/// time into an echelon basis and reducing at the end.
pub fn hermite_normal_form(input: &[Vec<BigInt>]) -> Hnf {
    let m = input.len();
    // (pivot, row, transform), sorted by pivot
    let mut ech: Vec<(usize, Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    for (s, row) in input.iter().enumerate() {
        let mut v = row.clone();
        let mut t = vec![BigInt::zero(); m];
        t[s] = BigInt::one();
        while let Some(p) = v.iter().position(|x| !x.is_zero()) {
            match ech.binary_search_by_key(&p, |e| e.0) {
                Err(pos) => {
                    if v[p].is_negative() {
                        v.iter_mut().chain(t.iter_mut()).for_each(|x| *x = -&*x);
                    }
                    ech.insert(pos, (p, v, t));
                    break;
                }
                Ok(pos) => {
                    let (_, ref mut row, ref mut rt) = ech[pos];
                    let (a, b) = (row[p].clone(), v[p].clone());
                    let eg = a.extended_gcd(&b);
                    let (ag, bg) = (&a / &eg.gcd, &b / &eg.gcd);
                    // [x y; b/g −a/g] has determinant −1
                    let new_row = lin(&eg.x, row, &eg.y, &v);
                    let new_rt = lin(&eg.x, rt, &eg.y, &t);
                    v = lin(&bg, row, &-&ag, &v);
                    t = lin(&bg, rt, &-&ag, &t);
                    *row = new_row;
                    *rt = new_rt;
                    if row[p].is_negative() {
                        row.iter_mut().chain(rt.iter_mut()).for_each(|x| *x = -&*x);
                    }
                }
            }
        }
    }

    for i in 0..ech.len() {
        let p = ech[i].0;
        let (head, tail) = ech.split_at_mut(i);
        let (_, ref prow, ref pt) = tail[0];
        for (_, row, t) in head.iter_mut() {
            let q = row[p].div_floor(&prow[p]);
            if q.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(prow) {
                *x -= &q * y;
            }
            for (x, y) in t.iter_mut().zip(pt) {
                *x -= &q * y;
            }
        }
    }

    let pivots = ech.iter().map(|e| e.0).collect();
    let (rows, transforms) = ech.into_iter().map(|(_, r, t)| (r, t)).unzip();
    Hnf {
        rows,
        pivots,
        transforms,
    }
}

fn lin(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn to_i64_row(row: &[BigInt]) -> Result<Vec<i64>> {
    row.iter()
        .map(|x| {
            x.to_i64().ok_or_else(|| {
                Error::ReconstructionFailed(format!("integer coefficient {x} exceeds 64 bits"))
            })
        })
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().cloned().collect())
        .collect()
}

/// Integer coordinates of each row of `vectors` in the (square) `basis`,
/// with the largest residual relative to the largest row norm of `vectors`.
/// `None` if the basis is singular.
pub fn integer_coordinates(
    vectors: &DMatrix<f64>,
    basis: &DMatrix<f64>,
) -> Option<(Vec<Vec<i64>>, f64)> {
    let lu = basis.transpose().lu();
    let scale = (0..vectors.nrows())
        .map(|s| vectors.row(s).norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let mut out = Vec::with_capacity(vectors.nrows());
    for s in 0..vectors.nrows() {
        let v: DVector<f64> = vectors.row(s).transpose();
        let x = lu.solve(&v)?;
        let a: Vec<i64> = x.iter().map(|xi| xi.round() as i64).collect();
        let av = DVector::from_iterator(a.len(), a.iter().map(|&t| t as f64));
        worst = worst.max((basis.transpose() * av - v).norm() / scale);
        out.push(a);
    }
    Some((out, worst))
}

/// Whether two square bases generate the same lattice: each is an integer
/// combination of the other within `tol` (relative).
pub fn same_lattice(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    let fwd = integer_coordinates(a, b).is_some_and(|(_, r)| r < tol);
    let back = integer_coordinates(b, a).is_some_and(|(_, r)| r < tol);
    fwd && back
}
