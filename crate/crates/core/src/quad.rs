//! Quadrature for the integrals of `W(R, α) dw`: a tanh-sinh kernel for legs
//! that end on a branch point, and adaptive Gauss–Legendre panels for smooth
//! paths (the loops used by the contour oracle).

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{exponent_sum, BranchState, Leg, Path, Segment};
use crate::curve::{CurveSpec, FormIndex};
use crate::error::{Error, Result};

/// Nodes closer than this (in the unit parameter) to an endpoint are dropped.
const ENDPOINT_CLIP: f64 = 1e-290;

/// Tolerances for both quadrature kernels.
///
/// At tanh-sinh level `L` the abscissa spacing is `2^{4−L}`, so level 4 is the
/// unit step and every further level halves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub level: u32,
    pub rel_tol: f64,
    pub max_level: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            level: 10,
            rel_tol: 1e-10,
            max_level: 14,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.level > self.max_level {
            return Err(Error::DegenerateInput(format!(
                "invalid quadrature config: level {} max_level {} rel_tol {}",
                self.level, self.max_level, self.rel_tol
            )));
        }
        Ok(())
    }
}

/// One tanh-sinh abscissa on `[0, 1]`: `s`, `1 − s` (both accurate near
/// their endpoint) and the weight `h·ds/dt`.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub s: f64,
    pub one_minus_s: f64,
    pub weight: f64,
}

/// Nodes of the given level in increasing `s`.
pub fn tanh_sinh_nodes(level: u32) -> Vec<TsNode> {
    let h = 2f64.powi(4 - level as i32);
    // 1 - s = 1/(1 + e^{2u}) reaches the clip at u = ln(1/clip)/2
    let u_max = 0.5 * (1.0 / ENDPOINT_CLIP).ln();
    let t_max = (u_max / FRAC_PI_2).asinh();
    let n = (t_max / h).floor() as i64;
    (-n..=n)
        .filter_map(|j| {
            let t = j as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u.abs()).exp();
            let (small, large) = (e / (1.0 + e), 1.0 / (1.0 + e));
            let (s, one_minus_s) = if u >= 0.0 {
                (large, small)
            } else {
                (small, large)
            };
            if s < ENDPOINT_CLIP || one_minus_s < ENDPOINT_CLIP {
                return None;
            }
            // ds/dt = (π/4) cosh t · sech² u
            let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
            let weight = h * 0.5 * FRAC_PI_2 * t.cosh() * sech2;
            Some(TsNode {
                s,
                one_minus_s,
                weight,
            })
        })
        .collect()
}

/// Tanh-sinh estimate of `∫₀¹ f(s, 1−s) ds` at a single level.
pub fn tanh_sinh_level<F>(mut f: F, level: u32) -> Complex64
where
    F: FnMut(f64, f64) -> Complex64,
{
    tanh_sinh_nodes(level)
        .iter()
        .map(|n| f(n.s, n.one_minus_s) * n.weight)
        .sum()
}

/// `∫₀¹ f(s, 1−s) ds`, refining levels until successive estimates agree to
/// `rel_tol`.
pub fn integrate_unit_interval<F>(mut f: F, cfg: &QuadConfig) -> Result<Complex64>
where
    F: FnMut(f64, f64) -> Complex64,
{
    cfg.validate()?;
    let mut prev = tanh_sinh_level(&mut f, cfg.level);
    for level in cfg.level + 1..=cfg.max_level {
        let cur = tanh_sinh_level(&mut f, level);
        if (cur - prev).norm() <= cfg.rel_tol * cur.norm() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!(
        "tanh-sinh reached level {}",
        cfg.max_level
    )))
}

/// Single-level estimates of `∫ W(R, α) dw` along `leg` for several forms.
///
/// Logs at the nodes are continued in order along each piece; the log of
/// the target factor on the final radial piece is set in closed form.
pub fn leg_estimate(
    leg: &Leg,
    start: &BranchState,
    exponents: &[Vec<f64>],
    branch_points: &[Complex64],
    level: u32,
) -> Result<Vec<Complex64>> {
    let nodes = tanh_sinh_nodes(level);
    let segments = leg.segments();
    let target = leg.target();
    let mut acc = vec![Complex64::new(0.0, 0.0); exponents.len()];
    let mut st = start.clone();

    for (idx, seg) in segments.iter().enumerate() {
        let last = idx + 1 == segments.len();
        let dw = seg.derivative(0.0);
        let anchor = st.logs()[target];
        let mut s_prev = 0.0;
        for node in &nodes {
            if last {
                st.advance_on(seg, s_prev, node.s, branch_points, Some(target))?;
                // w − r_target = (a − r_target)(1 − s) on the radial piece
                st.set_log(target, anchor + node.one_minus_s.ln());
            } else {
                st.advance_on(seg, s_prev, node.s, branch_points, None)?;
            }
            s_prev = node.s;
            let jac = dw * node.weight;
            for (a, e) in acc.iter_mut().zip(exponents) {
                *a += exponent_sum(st.logs(), e).exp() * jac;
            }
        }
        if !last {
            st.advance_on(seg, s_prev, 1.0, branch_points, None)?;
        }
    }
    Ok(acc)
}

/// `∫_{z₀}^{r_i} W(R, α) dw` along `leg` for several forms at once, from the
/// branch determination `start` at the base point.
pub fn integrate_leg(
    leg: &Leg,
    start: &BranchState,
    forms: &[FormIndex],
    spec: &CurveSpec,
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    if start.point() != leg.base() {
        return Err(Error::DegenerateInput(
            "branch state is not at the leg's base point".into(),
        ));
    }
    let exponents: Vec<Vec<f64>> = forms
        .iter()
        .map(|f| f.integrand_exponents(spec.k()))
        .collect();
    let r = spec.branch_points();
    let mut prev = leg_estimate(leg, start, &exponents, r, cfg.level)?;
    let mut failing = 0;
    for level in cfg.level + 1..=cfg.max_level {
        let cur = leg_estimate(leg, start, &exponents, r, level)?;
        match cur
            .iter()
            .zip(&prev)
            .position(|(c, p)| (c - p).norm() > cfg.rel_tol * c.norm().max(f64::MIN_POSITIVE))
        {
            None => return Ok(cur),
            Some(idx) => failing = idx,
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!(
        "leg to r{} for form {:?} at level {}",
        leg.target() + 1,
        forms.get(failing).map(FormIndex::alpha).unwrap_or_default(),
        cfg.max_level
    )))
}

/// `∫_{z₀}^{r_target} W(R, α) dw` along the standard leg from the state's point.
pub fn integrate_to_branch_point(
    state: &BranchState,
    target: usize,
    form: &FormIndex,
    spec: &CurveSpec,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let leg = Leg::new(state.point(), target, spec.branch_points())?;
    Ok(integrate_leg(&leg, state, std::slice::from_ref(form), spec, cfg)?[0])
}

const GL_ORDER: usize = 16;
const MAX_PANELS: usize = 1 << 12;

/// Gauss–Legendre nodes and weights on `[0, 1]`, computed by Newton
/// iteration on `P_16`.
fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static NODES: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = [(0.0, 0.0); GL_ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for m in 2..=n {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *slot = (0.5 * (1.0 - x), 0.5 * w);
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    })
}

/// Composite Gauss–Legendre sums of `W dw` over one segment with `panels`
/// equal panels; returns the sums, their `L¹` scale, and the state at the
/// segment end.
fn segment_estimate(
    seg: &Segment,
    start: &BranchState,
    exponents: &[Vec<f64>],
    branch_points: &[Complex64],
    panels: usize,
) -> Result<(Vec<Complex64>, Vec<f64>, BranchState)> {
    let gl = gauss_legendre();
    let mut acc = vec![Complex64::new(0.0, 0.0); exponents.len()];
    let mut scale = vec![0.0; exponents.len()];
    let mut st = start.clone();
    let width = 1.0 / panels as f64;
    let mut s_prev = 0.0;
    for p in 0..panels {
        let lo = p as f64 * width;
        for &(x, w) in gl {
            let s = lo + x * width;
            st.advance_on(seg, s_prev, s, branch_points, None)?;
            s_prev = s;
            let jac = seg.derivative(s) * (w * width);
            for ((a, sc), e) in acc.iter_mut().zip(scale.iter_mut()).zip(exponents) {
                let v = exponent_sum(st.logs(), e).exp() * jac;
                *a += v;
                *sc += v.norm();
            }
        }
    }
    st.advance_on(seg, s_prev, 1.0, branch_points, None)?;
    Ok((acc, scale, st))
}

/// `∫ W(R, α) dw` along a smooth path for several forms, plus the branch
/// state at the path end.
///
/// Each segment is refined by panel doubling until successive sums agree to
/// `rel_tol` relative to the `L¹` size of the integrand on that segment.
pub fn integrate_smooth_multi(
    path: &Path,
    state: &BranchState,
    exponents: &[Vec<f64>],
    branch_points: &[Complex64],
    cfg: &QuadConfig,
) -> Result<(Vec<Complex64>, BranchState)> {
    cfg.validate()?;
    let mut total = vec![Complex64::new(0.0, 0.0); exponents.len()];
    let mut st = state.clone();
    for seg in path.segments() {
        let mut panels = 2;
        let (mut prev, _, _) = segment_estimate(seg, &st, exponents, branch_points, panels)?;
        loop {
            panels *= 2;
            if panels > MAX_PANELS {
                return Err(Error::NoConvergence(format!(
                    "Gauss-Legendre panels exceeded {MAX_PANELS} on segment {seg:?}"
                )));
            }
            let (cur, scale, end) = segment_estimate(seg, &st, exponents, branch_points, panels)?;
            let done = cur
                .iter()
                .zip(&prev)
                .zip(&scale)
                .all(|((c, p), &sc)| (c - p).norm() <= cfg.rel_tol * sc);
            if done {
                for (t, c) in total.iter_mut().zip(&cur) {
                    *t += c;
                }
                st = end;
                break;
            }
            prev = cur;
        }
    }
    Ok((total, st))
}

/// Single-form wrapper around [`integrate_smooth_multi`].
pub fn integrate_smooth(
    path: &Path,
    state: &BranchState,
    form: &FormIndex,
    spec: &CurveSpec,
    cfg: &QuadConfig,
) -> Result<(Complex64, BranchState)> {
    let e = [form.integrand_exponents(spec.k())];
    let (v, st) = integrate_smooth_multi(path, state, &e, spec.branch_points(), cfg)?;
    Ok((v[0], st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::loop_path;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = gauss_legendre();
        let wsum: f64 = gl.iter().map(|p| p.1).sum();
        assert!((wsum - 1.0).abs() < 1e-15);
        for deg in 0..32 {
            let v: f64 = gl.iter().map(|&(x, w)| w * x.powi(deg)).sum();
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn arcsine_integral() {
        let f = |s: f64, t: f64| c(s.powf(-0.5) * t.powf(-0.5), 0.0);
        let v = integrate_unit_interval(f, &QuadConfig::default()).unwrap();
        assert!((v.re - PI).abs() < 1e-10 * PI && v.im == 0.0);
    }

    #[test]
    fn no_convergence_is_reported() {
        let cfg = QuadConfig {
            level: 2,
            rel_tol: 1e-30,
            max_level: 3,
        };
        let err = integrate_unit_interval(|s, _| c(s.sqrt(), 0.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::NoConvergence(_)));
        assert!(QuadConfig {
            level: 5,
            rel_tol: 1e-10,
            max_level: 4
        }
        .validate()
        .is_err());
        assert!(QuadConfig {
            level: 5,
            rel_tol: 0.0,
            max_level: 9
        }
        .validate()
        .is_err());
    }

    #[test]
    fn zero_length_smooth_path() {
        let spec = CurveSpec::new(3, 2, &[]).unwrap();
        let f = FormIndex::new(vec![0, 2], 3).unwrap();
        let st = BranchState::init(c(0.5, 2.0), spec.branch_points()).unwrap();
        let (v, end) =
            integrate_smooth(&Path::empty(), &st, &f, &spec, &QuadConfig::default()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        assert_eq!(end, st);
    }

    #[test]
    fn cauchy_on_empty_disc() {
        let spec = CurveSpec::new(4, 3, &[c(2.0, 1.0)]).unwrap();
        let st = BranchState::init(c(5.0, 5.0), spec.branch_points()).unwrap();
        let circle = Path::new(vec![Segment::Arc {
            center: c(4.0, 5.0),
            radius: 1.0,
            start_angle: 0.0,
            end_angle: 2.0 * PI,
            orientation: 1,
        }])
        .unwrap();
        for f in spec.forms() {
            let (v, end) =
                integrate_smooth(&circle, &st, &f, &spec, &QuadConfig::default()).unwrap();
            assert!(v.norm() < 1e-10, "{v}");
            for (a, b) in end.logs().iter().zip(st.logs()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn loop_then_reverse_cancels() {
        let spec = CurveSpec::new(3, 3, &[c(2.0, 1.0)]).unwrap();
        let base = spec.default_base_point();
        let r = spec.branch_points();
        let st = BranchState::init(base, r).unwrap();
        let lp = loop_path(base, 1, r, 1).unwrap();
        let both = lp.clone().concat(&lp.reversed()).unwrap();
        for f in spec.forms() {
            let (v, end) = integrate_smooth(&both, &st, &f, &spec, &QuadConfig::default()).unwrap();
            let (one, _) = integrate_smooth(&lp, &st, &f, &spec, &QuadConfig::default()).unwrap();
            assert!(v.norm() < 1e-10 * one.norm().max(1.0));
            for (a, b) in end.logs().iter().zip(st.logs()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn single_loop_matches_leg_integral() {
        // loop_i = (1 − e^{2πi e_i}) ∫_{z0}^{r_i} W dw
        let spec = CurveSpec::new(4, 3, &[c(-1.5, 0.0)]).unwrap();
        let base = spec.default_base_point();
        let r = spec.branch_points();
        let st = BranchState::init(base, r).unwrap();
        let cfg = QuadConfig::default();
        for f in spec.forms() {
            let e = f.integrand_exponents(4);
            for i in 0..3 {
                let j = integrate_to_branch_point(&st, i, &f, &spec, &cfg).unwrap();
                let (lp, _) =
                    integrate_smooth(&loop_path(base, i, r, 1).unwrap(), &st, &f, &spec, &cfg)
                        .unwrap();
                let mono = Complex64::from_polar(1.0, 2.0 * PI * e[i]);
                let want = (1.0 - mono) * j;
                assert!(
                    (lp - want).norm() < 1e-10 * j.norm(),
                    "{:?} i={i}: {lp} vs {want}",
                    f.alpha()
                );
            }
        }
    }

    #[test]
    fn reversed_leg_negates() {
        // the straight leg integrated from r_1 back to z0 with the mirrored
        // parametrization and direct per-node continuation from z0
        let spec = CurveSpec::new(3, 2, &[]).unwrap();
        let f = FormIndex::new(vec![0, 2], 3).unwrap();
        let base = spec.default_base_point();
        let r = spec.branch_points();
        let st = BranchState::init(base, r).unwrap();
        let cfg = QuadConfig::default();
        let fwd = integrate_to_branch_point(&st, 0, &f, &spec, &cfg).unwrap();
        let e = f.integrand_exponents(3);
        let target = r[0];
        let back = integrate_unit_interval(
            |s, one_minus_s| {
                // w = r + (z0 − r) s, so w − r = (z0 − r) s
                let w = target + (base - target) * s;
                let mut node = st.clone();
                node.step_skipping(w, r, Some(0)).unwrap();
                node.set_log(0, st.logs()[0] + s.ln());
                let _ = one_minus_s;
                exponent_sum(node.logs(), &e).exp() * (base - target)
            },
            &cfg,
        )
        .unwrap();
        assert!((fwd + back).norm() < 1e-12 * fwd.norm());
    }

    #[test]
    fn detoured_leg_agrees_with_straight_leg() {
        let spec = CurveSpec::new(5, 4, &[c(2.0, 0.5), c(-1.0, 1.0)]).unwrap();
        let base = spec.default_base_point();
        let r = spec.branch_points();
        let st = BranchState::init(base, r).unwrap();
        let cfg = QuadConfig::default();
        let forms: Vec<_> = spec.forms().into_iter().step_by(17).collect();
        for i in 0..4 {
            let straight = Leg::new(base, i, r).unwrap();
            assert_eq!(straight.vertices().len(), 2);
            let kink = 0.5 * (base + r[i]) + c(0.3, -0.2);
            let bent = Leg::from_vertices(vec![base, kink, r[i]], i);
            let a = integrate_leg(&straight, &st, &forms, &spec, &cfg).unwrap();
            let b = integrate_leg(&bent, &st, &forms, &spec, &cfg).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-9 * x.norm(), "{x} vs {y}");
            }
        }
    }
}
