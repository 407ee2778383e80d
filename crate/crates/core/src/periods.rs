//! The period matrix from the closed-form period vectors
//!
//! `∫_{ρ[φⱼ,φₗ]ρ⁻¹} θ_α = ζ^{Σ g_d M_d} (1 − ζ^{Mⱼ})(1 − ζ^{Mₗ}) / k · ∫_{rⱼ}^{rₗ} W(R, α) dw`,
//!
//! where `∫_{rⱼ}^{rₗ}` is realized as `Jₗ − Jⱼ`, `Jᵢ = ∫_{z₀}^{rᵢ} W dw` along
//! the standard legs from one shared branch determination at `z₀`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{BranchState, Leg};
use crate::curve::{CurveSpec, FormIndex};
use crate::error::{Error, Result};
use crate::homology::{enumerate_generators, root_of_unity, HomologyWord};
use crate::quad::{integrate_leg, QuadConfig};

/// Forms integrated together along one leg.
const FORM_CHUNK: usize = 32;

/// `Jᵢ[α]` for every branch point `rᵢ` and form `α`, anchored at `base_point`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseIntegrals {
    pub base_point: Complex64,
    /// `values[i][c]` for branch point `i` and form column `c`.
    pub values: Vec<Vec<Complex64>>,
}

impl BaseIntegrals {
    /// `J₀[c], …, J_{n−1}[c]` for one form column.
    pub fn column(&self, c: usize) -> Vec<Complex64> {
        self.values.iter().map(|row| row[c]).collect()
    }
}

/// Evaluates all `Jᵢ[α]` from the curve's default base point.
pub fn base_integrals(spec: &CurveSpec, cfg: &QuadConfig) -> Result<BaseIntegrals> {
    base_integrals_from(spec, spec.default_base_point(), cfg)
}

pub fn base_integrals_from(
    spec: &CurveSpec,
    base: Complex64,
    cfg: &QuadConfig,
) -> Result<BaseIntegrals> {
    cfg.validate()?;
    let r = spec.branch_points();
    let start = BranchState::init(base, r)?;
    let forms = spec.forms();
    let legs = (0..spec.n())
        .map(|i| Leg::new(base, i, r))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..spec.n())
        .flat_map(|i| (0..forms.len()).step_by(FORM_CHUNK).map(move |c| (i, c)))
        .collect();
    let chunks = jobs
        .par_iter()
        .map(|&(i, c0)| {
            let chunk = &forms[c0..(c0 + FORM_CHUNK).min(forms.len())];
            integrate_leg(&legs[i], &start, chunk, spec, cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = vec![Vec::with_capacity(forms.len()); spec.n()];
    for (&(i, _), chunk) in jobs.iter().zip(chunks) {
        values[i].extend(chunk);
    }
    Ok(BaseIntegrals {
        base_point: base,
        values,
    })
}

/// `(1 − ζ^{Mⱼ})(1 − ζ^{Mₗ}) / k`.
pub fn prefactor(form: &FormIndex, j: usize, l: usize, k: u32) -> Complex64 {
    let m = form.m_exponents();
    let one = Complex64::new(1.0, 0.0);
    (one - root_of_unity(k, m[j])) * (one - root_of_unity(k, m[l])) / k as f64
}

/// Whether the prefactor vanishes identically, i.e. `Mⱼ ≡ 0` or `Mₗ ≡ 0 (mod k)`.
pub fn prefactor_vanishes(form: &FormIndex, j: usize, l: usize, k: u32) -> bool {
    let m = form.m_exponents();
    m[j].rem_euclid(k as i64) == 0 || m[l].rem_euclid(k as i64) == 0
}

/// One period: the integral of `θ_α` over `word`, given `Jᵢ[α]` for `i = 0..n`.
/// Powers of a single generator are null-homologous and give exactly zero.
pub fn period_entry(
    word: &HomologyWord,
    form: &FormIndex,
    leg_values: &[Complex64],
    k: u32,
) -> Complex64 {
    match word {
        HomologyWord::Power { .. } => Complex64::new(0.0, 0.0),
        HomologyWord::ConjComm { j, l, .. } => {
            if prefactor_vanishes(form, *j, *l, k) {
                return Complex64::new(0.0, 0.0);
            }
            word.conjugation_phase(form, k)
                * prefactor(form, *j, *l, k)
                * (leg_values[*l] - leg_values[*j])
        }
    }
}

/// Rows are homology generators, columns are forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    pub spec: CurveSpec,
    pub rows: Vec<HomologyWord>,
    pub cols: Vec<FormIndex>,
    pub entries: Vec<Vec<Complex64>>,
    pub base: BaseIntegrals,
}

impl PeriodMatrix {
    pub fn genus(&self) -> usize {
        self.cols.len()
    }

    pub fn base_point(&self) -> Complex64 {
        self.base.base_point
    }
}

/// Entries for the given generators from precomputed base integrals.
pub fn entries_for(
    spec: &CurveSpec,
    rows: &[HomologyWord],
    base: &BaseIntegrals,
) -> Vec<Vec<Complex64>> {
    let forms = spec.forms();
    let columns: Vec<Vec<Complex64>> = (0..forms.len()).map(|c| base.column(c)).collect();
    rows.par_iter()
        .map(|w| {
            forms
                .iter()
                .zip(&columns)
                .map(|(f, col)| period_entry(w, f, col, spec.k()))
                .collect()
        })
        .collect()
}

/// The full matrix over `enumerate_generators(spec, include_powers) × I_{k,n}`.
pub fn assemble(spec: &CurveSpec, cfg: &QuadConfig, include_powers: bool) -> Result<PeriodMatrix> {
    let base = base_integrals(spec, cfg)?;
    Ok(assemble_with(spec, base, include_powers))
}

pub fn assemble_with(spec: &CurveSpec, base: BaseIntegrals, include_powers: bool) -> PeriodMatrix {
    let rows = enumerate_generators(spec, include_powers);
    let entries = entries_for(spec, &rows, &base);
    PeriodMatrix {
        spec: spec.clone(),
        rows,
        cols: spec.forms(),
        entries,
        base,
    }
}

/// Checks that a matrix has the shape its spec implies.
pub fn check_shape(pm: &PeriodMatrix) -> Result<()> {
    let g = pm.spec.genus();
    let ok = pm.cols.len() == g
        && pm.entries.len() == pm.rows.len()
        && pm.entries.iter().all(|r| r.len() == g)
        && pm.base.values.len() == pm.spec.n()
        && pm.base.values.iter().all(|r| r.len() == g);
    if ok {
        Ok(())
    } else {
        Err(Error::DegenerateInput(
            "period matrix shape does not match its curve".into(),
        ))
    }
}
