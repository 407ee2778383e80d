//! Independent routes to the periods: literal contour integration of
//! homology words, the Beta function for classical Fermat curves, and the
//! arithmetic–geometric mean for the genus-one case `(k, n) = (2, 3)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{BranchState, Leg, Path};
use crate::curve::{CurveSpec, FormIndex};
use crate::error::{Error, Result};
use crate::homology::{enumerate_generators, root_of_unity, HomologyWord};
use crate::lattice::{self, extract_basis, lattice_rank, real_split, rows_to_matrix};
use crate::periods::{self, base_integrals, prefactor_vanishes, BaseIntegrals};
use crate::quad::{integrate_smooth_multi, QuadConfig};
use crate::special::beta;

pub const POWER_TOL: f64 = 1e-8;
pub const ENTRY_REL_TOL: f64 = 1e-8;
pub const ZERO_ENTRY_ABS_TOL: f64 = 1e-10;
pub const BETA_REL_TOL: f64 = 1e-9;
pub const LATTICE_TOL: f64 = 1e-6;

/// Contour integrator for words, with the standard legs from one base point.
#[derive(Debug, Clone)]
pub struct WordIntegrator {
    spec: CurveSpec,
    cfg: QuadConfig,
    start: BranchState,
    legs: Vec<Leg>,
}

impl WordIntegrator {
    pub fn new(spec: &CurveSpec, cfg: &QuadConfig) -> Result<Self> {
        Self::with_base(spec, spec.default_base_point(), cfg)
    }

    pub fn with_base(spec: &CurveSpec, base: Complex64, cfg: &QuadConfig) -> Result<Self> {
        let r = spec.branch_points();
        let start = BranchState::init(base, r)?;
        let legs = (0..spec.n())
            .map(|i| Leg::new(base, i, r))
            .collect::<Result<_>>()?;
        Ok(Self {
            spec: spec.clone(),
            cfg: *cfg,
            start,
            legs,
        })
    }

    /// The concatenated loop path spelling `word`, letters left to right.
    pub fn word_path(&self, word: &HomologyWord) -> Path {
        let r = self.spec.branch_points();
        let segments = word
            .expand(self.spec.k())
            .into_iter()
            .flat_map(|letter| {
                let orient = letter.sign() as i8;
                self.legs[letter.generator]
                    .loop_path(r, orient)
                    .segments()
                    .to_vec()
            })
            .collect();
        Path::new(segments).expect("loops share the base point")
    }

    /// `∫ −(1/k) W dw` along `path` from the base determination, for each form.
    pub fn integrate_path(&self, path: &Path, forms: &[FormIndex]) -> Result<Vec<Complex64>> {
        let k = self.spec.k();
        let exps: Vec<Vec<f64>> = forms.iter().map(|f| f.integrand_exponents(k)).collect();
        let (vals, _) = integrate_smooth_multi(
            path,
            &self.start,
            &exps,
            self.spec.branch_points(),
            &self.cfg,
        )?;
        Ok(vals.into_iter().map(|v| -v / k as f64).collect())
    }

    /// Period of every form over `word`.
    pub fn integrate_word_multi(
        &self,
        word: &HomologyWord,
        forms: &[FormIndex],
    ) -> Result<Vec<Complex64>> {
        self.integrate_path(&self.word_path(word), forms)
    }

    /// `∫_u^{φᵢ^{±1}u} q*θ_α`: one loop around `rᵢ`.
    pub fn single_loop(
        &self,
        i: usize,
        orientation: i8,
        forms: &[FormIndex],
    ) -> Result<Vec<Complex64>> {
        let path = self.legs[i].loop_path(self.spec.branch_points(), orientation);
        self.integrate_path(&path, forms)
    }
}

/// Period of `θ_α` over `word` by direct integration along its loop path.
pub fn integrate_word(
    word: &HomologyWord,
    form: &FormIndex,
    spec: &CurveSpec,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    Ok(WordIntegrator::new(spec, cfg)?.integrate_word_multi(word, std::slice::from_ref(form))?[0])
}

/// `B((α₁+1)/k, 1 − α₂/k)`, the modulus of `∫₀¹ W dw` on `C_{k,2}`.
pub fn beta_closed_form(form: &FormIndex, k: u32) -> Result<f64> {
    if form.n() != 2 {
        return Err(Error::InvalidArity(form.n()));
    }
    let a = form.alpha();
    Ok(beta(
        (a[0] as f64 + 1.0) / k as f64,
        1.0 - a[1] as f64 / k as f64,
    ))
}

/// Complex AGM, choosing at each step the square root closer to the
/// arithmetic mean.
pub fn agm(a: Complex64, b: Complex64) -> Complex64 {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
        let next_a = 0.5 * (a + b);
        let mut next_b = (a * b).sqrt();
        if (next_a - next_b).norm() > (next_a + next_b).norm() {
            next_b = -next_b;
        }
        a = next_a;
        b = next_b;
    }
    a
}

/// A ℤ-basis `(ω₁, ω₂)` of the periods of `dw/√(w(w−1)(w−λ))`.
///
/// With roots `e₁ = λ, e₂ = 1, e₃ = 0`, the periods are `2π/M(√(e₁−e₃), √(e₁−e₂))`
/// and `2πi/M(√(e₁−e₃), √(e₂−e₃))`, square roots signed so that each pair
/// is as close as possible.
pub fn agm_elliptic_periods(lambda: Complex64) -> Result<(Complex64, Complex64)> {
    if lambda == Complex64::new(0.0, 0.0)
        || lambda == Complex64::new(1.0, 0.0)
        || !lambda.is_finite()
    {
        return Err(Error::DegenerateLambda);
    }
    let one = Complex64::new(1.0, 0.0);
    let a = lambda.sqrt();
    let closer = |x: Complex64| {
        if (a - x).norm() > (a + x).norm() {
            -x
        } else {
            x
        }
    };
    let b = closer((lambda - one).sqrt());
    let c = closer(one);
    let w1 = 2.0 * PI / agm(a, b);
    let w2 = Complex64::new(0.0, 2.0 * PI) / agm(a, c);
    Ok((w1, w2))
}

/// Period lattice of the single form `θ_{(0,1,1)}` on `C_{2,3}(λ)`, predicted
/// from the AGM periods.
///
/// `θ = −(i/2) dw/Y` is pulled back from `Y² = w(w−1)(w−λ)` by the degree-4
/// unramified map `Y = i·y₁y₂y₃`, whose image in homology has index 4, so
/// the lattice is `i·(2ω₁ℤ + 2ω₂ℤ)/2 = i·Λ_AGM`.
pub fn agm_theta_lattice(lambda: Complex64) -> Result<[Complex64; 2]> {
    let (w1, w2) = agm_elliptic_periods(lambda)?;
    let i = Complex64::new(0.0, 1.0);
    Ok([i * w1, i * w2])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, max_deviation: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: max_deviation <= tolerance,
            max_deviation,
            tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub k: u32,
    pub n: usize,
    pub lambdas: Vec<[f64; 2]>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `|oracle(Power(i))| / maxᵢ |Jᵢ[α]|`, worst over all `i` and `α`.
pub fn power_vanishing(
    oracle: &WordIntegrator,
    base: &BaseIntegrals,
    forms: &[FormIndex],
) -> Result<f64> {
    let n = base.values.len();
    let scale: Vec<f64> = (0..forms.len())
        .map(|c| base.column(c).iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();
    let per_i = (0..n)
        .into_par_iter()
        .map(|i| oracle.integrate_word_multi(&HomologyWord::Power { i }, forms))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_i
        .iter()
        .flat_map(|vals| vals.iter().zip(&scale).map(|(v, s)| v.norm() / s))
        .fold(0.0, f64::max))
}

/// Deviation of an oracle period from the closed form: relative where the
/// prefactor is nonzero, absolute (scaled to the relative tolerance) where it
/// vanishes.
pub fn entry_deviation(oracle_value: Complex64, closed: Complex64, zero_prefactor: bool) -> f64 {
    if zero_prefactor {
        oracle_value.norm() / ZERO_ENTRY_ABS_TOL * ENTRY_REL_TOL
    } else {
        (oracle_value - closed).norm() / closed.norm()
    }
}

/// Closed form vs contour oracle and conjugation covariance over `words`.
/// Returns the two worst deviations.
pub fn compare_words(
    oracle: &WordIntegrator,
    spec: &CurveSpec,
    base: &BaseIntegrals,
    words: &[HomologyWord],
) -> Result<(f64, f64)> {
    let forms = spec.forms();
    let k = spec.k();
    let closed = periods::entries_for(spec, words, base);

    let mut pairs: Vec<(usize, usize)> = words
        .iter()
        .filter_map(|w| match w {
            HomologyWord::ConjComm { j, l, .. } => Some((*j, *l)),
            HomologyWord::Power { .. } => None,
        })
        .collect();
    pairs.sort();
    pairs.dedup();
    let plain: HashMap<(usize, usize), Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(j, l)| {
            let w = HomologyWord::ConjComm {
                g: vec![0; spec.n()],
                j,
                l,
            };
            oracle.integrate_word_multi(&w, &forms).map(|v| ((j, l), v))
        })
        .collect::<Result<_>>()?;

    let values = words
        .par_iter()
        .map(|w| oracle.integrate_word_multi(w, &forms))
        .collect::<Result<Vec<_>>>()?;

    let mut worst_entry = 0.0f64;
    let mut worst_conj = 0.0f64;
    for ((w, vals), row) in words.iter().zip(&values).zip(&closed) {
        let HomologyWord::ConjComm { j, l, .. } = w else {
            continue;
        };
        let reference = &plain[&(*j, *l)];
        for (c, f) in forms.iter().enumerate() {
            let zero = prefactor_vanishes(f, *j, *l, k);
            worst_entry = worst_entry.max(entry_deviation(vals[c], row[c], zero));
            let predicted = w.conjugation_phase(f, k) * reference[c];
            let dev = if zero {
                (vals[c] - predicted).norm() / ZERO_ENTRY_ABS_TOL * ENTRY_REL_TOL
            } else {
                (vals[c] - predicted).norm() / reference[c].norm()
            };
            worst_conj = worst_conj.max(dev);
        }
    }
    Ok((worst_entry, worst_conj))
}

/// Worst relative gap between `|J₂ − J₁|` and the Beta closed form (`n = 2`).
pub fn beta_deviation(spec: &CurveSpec, base: &BaseIntegrals) -> Result<f64> {
    let mut worst = 0.0f64;
    for (c, f) in spec.forms().iter().enumerate() {
        let want = beta_closed_form(f, spec.k())?;
        let got = (base.values[1][c] - base.values[0][c]).norm();
        worst = worst.max((got - want).abs() / want);
    }
    Ok(worst)
}

/// Phase consistency of `(J₂ − J₁)/B` across forms (`n = 2`).
///
/// On the segment `(0, 1)` the integrand's two factors pick up fixed odd
/// multiples of `π`, so every ratio must be `η^{c + s₁α₁ − s₂α₂}` with
/// `η = e^{iπ/k}`, one `c` and odd `s₁, s₂` shared by all forms. Returns the
/// worst distance to the nearest `2k`-th root of unity, or infinity when no
/// such affine exponent fits.
pub fn beta_phase_deviation(spec: &CurveSpec, base: &BaseIntegrals) -> Result<f64> {
    let k = spec.k();
    let two_k = 2 * k as i64;
    let mut worst = 0.0f64;
    let mut samples = Vec::new();
    for (c, f) in spec.forms().iter().enumerate() {
        let rho = (base.values[1][c] - base.values[0][c]) / beta_closed_form(f, k)?;
        let e = (rho.arg() * k as f64 / PI).round() as i64;
        worst = worst.max((rho - root_of_unity(2 * k, e)).norm());
        samples.push((
            f.alpha()[0] as i64,
            f.alpha()[1] as i64,
            e.rem_euclid(two_k),
        ));
    }
    let Some(&(a0, b0, e0)) = samples.first() else {
        return Ok(worst);
    };
    let fits = (1..two_k).step_by(2).any(|s1| {
        (1..two_k).step_by(2).any(|s2| {
            samples
                .iter()
                .all(|&(a, b, e)| (e0 + s1 * (a - a0) - s2 * (b - b0) - e).rem_euclid(two_k) == 0)
        })
    });
    Ok(if fits { worst } else { f64::INFINITY })
}

/// Worst mutual-expressibility residual between the extracted basis and
/// the AGM prediction (`(k, n) = (2, 3)`).
pub fn agm_lattice_residual(spec: &CurveSpec, basis: &lattice::LatticeBasis) -> Result<f64> {
    let lambda = spec.lambdas()[0];
    let [a, b] = agm_theta_lattice(lambda)?;
    let predicted = rows_to_matrix(&[vec![a.re, a.im], vec![b.re, b.im]]);
    let ours = basis.basis_matrix();
    let fwd = lattice::integer_coordinates(&ours, &predicted).map_or(f64::INFINITY, |x| x.1);
    let back = lattice::integer_coordinates(&predicted, &ours).map_or(f64::INFINITY, |x| x.1);
    Ok(fwd.max(back))
}

/// Runs every applicable cross-check on one curve.
pub fn crosscheck_report(
    spec: &CurveSpec,
    cfg: &QuadConfig,
    sample: usize,
    seed: u64,
) -> Result<Report> {
    let forms = spec.forms();
    let base = base_integrals(spec, cfg)?;
    let oracle = WordIntegrator::with_base(spec, base.base_point, cfg)?;
    let mut checks = Vec::new();

    let pv = power_vanishing(&oracle, &base, &forms)?;
    checks.push(CheckResult::new(
        "power_vanishing",
        pv,
        POWER_TOL,
        format!(
            "|oracle(phi_i^k)| / max|J_i| over {} branch points x {} forms",
            spec.n(),
            forms.len()
        ),
    ));

    let words = sample_words(spec, sample, seed);
    let (entry, conj) = compare_words(&oracle, spec, &base, &words)?;
    checks.push(CheckResult::new(
        "closed_form_vs_contour",
        entry,
        ENTRY_REL_TOL,
        format!(
            "{} sampled generators x {} forms (seed {seed})",
            words.len(),
            forms.len()
        ),
    ));
    checks.push(CheckResult::new(
        "conjugation_covariance",
        conj,
        ENTRY_REL_TOL,
        "oracle(rho[phi_j,phi_l]rho^-1) vs zeta^(sum g_d M_d) oracle([phi_j,phi_l])".into(),
    ));

    let pm = periods::assemble_with(spec, base.clone(), false);
    let split = real_split(&pm);
    let rank = lattice_rank(&split, lattice::DEFAULT_RANK_TOL);
    let expected = 2 * spec.genus();
    checks.push(CheckResult::new(
        "lattice_rank",
        rank.abs_diff(expected) as f64,
        0.0,
        format!("rank {rank}, expected {expected}"),
    ));

    if spec.n() == 2 {
        checks.push(CheckResult::new(
            "beta_magnitude",
            beta_deviation(spec, &base)?,
            BETA_REL_TOL,
            "| |J_2 - J_1| - B((a1+1)/k, 1 - a2/k) | / B".into(),
        ));
        checks.push(CheckResult::new(
            "beta_phase_consistency",
            beta_phase_deviation(spec, &base)?,
            BETA_REL_TOL,
            "(J_2 - J_1)/B = eta^(c + s1 a1 - s2 a2), s1, s2 odd, shared by all forms".into(),
        ));
    }

    if spec.k() == 2 && spec.n() == 3 {
        let residual = match extract_basis(&split, spec) {
            Ok(b) => agm_lattice_residual(spec, &b)?,
            Err(_) => f64::INFINITY,
        };
        checks.push(CheckResult::new(
            "agm_lattice",
            residual,
            LATTICE_TOL,
            "extracted basis vs i x AGM periods, mutual integer expressibility".into(),
        ));
    }

    Ok(Report {
        k: spec.k(),
        n: spec.n(),
        lambdas: spec.lambdas().iter().map(|l| [l.re, l.im]).collect(),
        checks,
    })
}

/// `sample` distinct conjugated commutators, chosen reproducibly from `seed`
/// (all of them if there are fewer).
pub fn sample_words(spec: &CurveSpec, sample: usize, seed: u64) -> Vec<HomologyWord> {
    let all = enumerate_generators(spec, false);
    if sample >= all.len() {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, all.len(), sample).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| all[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_unit_interval;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_examples() {
        let k4 = FormIndex::new(vec![0, 2], 4).unwrap();
        let g = crate::special::gamma;
        let want = g(0.25) * g(0.5) / g(0.75);
        assert!((beta_closed_form(&k4, 4).unwrap() - want).abs() < 1e-13 * want);
        let k3 = FormIndex::new(vec![0, 2], 3).unwrap();
        let want = g(1.0 / 3.0).powi(2) / g(2.0 / 3.0);
        assert!((beta_closed_form(&k3, 3).unwrap() - want).abs() < 1e-13 * want);
        let k2 = FormIndex::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(beta_closed_form(&k2, 2), Err(Error::InvalidArity(3)));
    }

    #[test]
    fn agm_fixed_point_and_symmetry() {
        let a = c(1.3, -0.2);
        assert_eq!(agm(a, a), a);
        let x = agm(c(1.0, 0.0), c(2.0f64.sqrt(), 0.0));
        // Gauss's constant: AGM(1, √2) = π / ϖ·√2 ≈ 1.19814023473559
        assert!((x.re - 1.198_140_234_735_592_2).abs() < 1e-14 && x.im.abs() < 1e-15);
        let y = agm(c(2.0f64.sqrt(), 0.0), c(1.0, 0.0));
        assert!((x - y).norm() < 1e-15);
    }

    #[test]
    fn agm_periods_match_real_quadrature() {
        // λ > 1: ω₁ = 2∫₀¹ dw/√(w(1−w)(λ−w)), ω₂ = 2i∫₁^λ dw/√(w(w−1)(λ−w))
        let cfg = QuadConfig::default();
        for lam in [2.0, 5.0, 1.3] {
            let (w1, w2) = agm_elliptic_periods(c(lam, 0.0)).unwrap();
            let real =
                integrate_unit_interval(|s, t| c(1.0 / (s * t * (lam - s)).sqrt(), 0.0), &cfg)
                    .unwrap();
            let span = lam - 1.0;
            let imag = integrate_unit_interval(
                |s, t| {
                    let w = 1.0 + span * s;
                    c(span / (w * (span * s) * (span * t)).sqrt(), 0.0)
                },
                &cfg,
            )
            .unwrap();
            assert!((w1.re - 2.0 * real.re).abs() < 1e-10 * w1.re && w1.im.abs() < 1e-14);
            assert!(
                (w2.im.abs() - 2.0 * imag.re).abs() < 1e-10 * w2.im.abs() && w2.re.abs() < 1e-14
            );
        }
        assert_eq!(
            agm_elliptic_periods(c(1.0, 0.0)),
            Err(Error::DegenerateLambda)
        );
        assert_eq!(
            agm_elliptic_periods(c(0.0, 0.0)),
            Err(Error::DegenerateLambda)
        );
    }

    /// Klein's j from a period ratio, via Eisenstein q-series after reducing
    /// τ to the fundamental domain.
    fn j_of_tau(mut tau: Complex64) -> Complex64 {
        if tau.im < 0.0 {
            tau = -tau;
        }
        for _ in 0..100 {
            tau.re -= tau.re.round();
            if tau.norm_sqr() < 1.0 {
                tau = -1.0 / tau;
            } else {
                break;
            }
        }
        let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
        let (mut e4, mut e6) = (c(1.0, 0.0), c(1.0, 0.0));
        let mut qn = c(1.0, 0.0);
        for n in 1..60u32 {
            qn *= q;
            let s3: f64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| (d as f64).powi(3))
                .sum();
            let s5: f64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| (d as f64).powi(5))
                .sum();
            e4 += 240.0 * s3 * qn;
            e6 -= 504.0 * s5 * qn;
        }
        1728.0 * e4.powi(3) / (e4.powi(3) - e6.powi(2))
    }

    #[test]
    fn agm_lattice_shape_is_mobius_invariant() {
        for lam in [c(2.0, 1.0), c(3.0, 0.0), c(-0.7, 0.4)] {
            let want =
                256.0 * (lam * lam - lam + 1.0).powi(3) / (lam * lam * (lam - 1.0) * (lam - 1.0));
            for image in [lam, 1.0 - lam, 1.0 / lam] {
                let (w1, w2) = agm_elliptic_periods(image).unwrap();
                assert!((w2 / w1).im.abs() > 1e-3);
                let j = j_of_tau(w2 / w1);
                assert!(
                    (j - want).norm() < 1e-8 * want.norm(),
                    "λ={image}: {j} vs {want}"
                );
            }
        }
    }

    #[test]
    fn power_words_vanish() {
        let spec = CurveSpec::new(3, 3, &[c(2.0, 1.0)]).unwrap();
        let cfg = QuadConfig::default();
        let base = base_integrals(&spec, &cfg).unwrap();
        let oracle = WordIntegrator::new(&spec, &cfg).unwrap();
        assert!(power_vanishing(&oracle, &base, &spec.forms()).unwrap() < POWER_TOL);
    }

    #[test]
    fn commutator_splits_into_single_loops() {
        let spec = CurveSpec::new(4, 3, &[c(-1.5, 0.0)]).unwrap();
        let cfg = QuadConfig::default();
        let forms = spec.forms();
        let base = base_integrals(&spec, &cfg).unwrap();
        let oracle = WordIntegrator::new(&spec, &cfg).unwrap();
        let k = 4;
        let loops: Vec<Vec<Complex64>> = (0..3)
            .map(|i| oracle.single_loop(i, 1, &forms).unwrap())
            .collect();
        for (c_, f) in forms.iter().enumerate() {
            let m = f.m_exponents();
            let z = |e: i64| root_of_unity(k, e);
            for i in 0..3 {
                let want = -(1.0 - z(m[i])) * base.values[i][c_] / k as f64;
                assert!((loops[i][c_] - want).norm() <= 1e-8 * base.values[i][c_].norm());
            }
            for j in 0..3 {
                for l in j + 1..3 {
                    let w = HomologyWord::ConjComm {
                        g: vec![0; 3],
                        j,
                        l,
                    };
                    let got = oracle
                        .integrate_word_multi(&w, std::slice::from_ref(f))
                        .unwrap()[0];
                    let want = (1.0 - z(m[l])) * loops[j][c_] - (1.0 - z(m[j])) * loops[l][c_];
                    let scale = loops[j][c_].norm().max(loops[l][c_].norm());
                    assert!(
                        (got - want).norm() <= 1e-8 * scale,
                        "{:?} j={j} l={l}",
                        f.alpha()
                    );
                }
            }
        }
    }

    #[test]
    fn report_for_classical_cubic() {
        let spec = CurveSpec::new(3, 2, &[]).unwrap();
        let report = crosscheck_report(&spec, &QuadConfig::default(), 9, 7).unwrap();
        assert!(report.all_passed(), "{report:#?}");
        assert!(report.checks.iter().any(|c| c.name == "beta_magnitude"));
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "beta_phase_consistency"));
    }

    #[test]
    fn report_for_genus_one_pair() {
        let spec = CurveSpec::new(2, 3, &[c(2.0, 0.0)]).unwrap();
        let report = crosscheck_report(&spec, &QuadConfig::default(), 8, 1).unwrap();
        assert!(report.all_passed(), "{report:#?}");
        assert!(report.checks.iter().any(|c| c.name == "agm_lattice"));
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = CurveSpec::new(3, 3, &[c(2.0, 0.0)]).unwrap();
        assert_eq!(sample_words(&spec, 25, 3), sample_words(&spec, 25, 3));
        assert_ne!(sample_words(&spec, 25, 3), sample_words(&spec, 25, 4));
        assert_eq!(sample_words(&spec, 1000, 3).len(), 81);
    }
}
