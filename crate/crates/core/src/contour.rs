//! Paths in `ℂ ∖ R` and branch-tracked evaluation of
//! `W(R, α)(w) = (−w)^{(α₁+1)/k − 1} ∏_{t≥2} (w − r_t)^{−α_t/k}`.
//!
//! The sheet of `W` is carried by a [`BranchState`]: continuous
//! determinations of `log(−w)` and `log(w − r_t)` that are moved along a path
//! by accumulating principal logarithms of point ratios.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::curve::FormIndex;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Current point plus the continued logarithms `log(−w)`, `log(w − r₂)`, ….
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    point: Complex64,
    logs: Vec<Complex64>,
}

impl BranchState {
    /// Principal determinations at `base`.
    pub fn init(base: Complex64, branch_points: &[Complex64]) -> Result<Self> {
        if let Some(t) = branch_points.iter().position(|&r| r == base) {
            return Err(Error::BasePointOnBranchPoint(t));
        }
        let logs = branch_points
            .iter()
            .enumerate()
            .map(|(t, &r)| {
                if t == 0 {
                    (-base).ln()
                } else {
                    (base - r).ln()
                }
            })
            .collect();
        Ok(Self { point: base, logs })
    }

    pub fn point(&self) -> Complex64 {
        self.point
    }

    pub fn logs(&self) -> &[Complex64] {
        &self.logs
    }

    /// One continuation step along the straight segment to `to`.
    ///
    /// Fails with `StepTooCoarse` if some ratio `(to − r)/(w − r)` has
    /// argument of magnitude `≥ π/2`.
    pub fn step(&mut self, to: Complex64, branch_points: &[Complex64]) -> Result<()> {
        self.step_skipping(to, branch_points, None)
    }

    /// Like [`step`](Self::step), leaving the log at index `skip` untouched.
    pub(crate) fn step_skipping(
        &mut self,
        to: Complex64,
        branch_points: &[Complex64],
        skip: Option<usize>,
    ) -> Result<()> {
        let mut inc = vec![Complex64::new(0.0, 0.0); branch_points.len()];
        for (t, &r) in branch_points.iter().enumerate() {
            if Some(t) == skip {
                continue;
            }
            let d = ((to - r) / (self.point - r)).ln();
            if !(d.im.abs() < FRAC_PI_2) {
                return Err(Error::StepTooCoarse {
                    branch: t,
                    arg: d.im,
                });
            }
            inc[t] = d;
        }
        for (l, d) in self.logs.iter_mut().zip(inc) {
            *l += d;
        }
        self.point = to;
        Ok(())
    }

    /// Overwrites one continued log; used where it is known in closed form.
    pub(crate) fn set_log(&mut self, t: usize, value: Complex64) {
        self.logs[t] = value;
    }

    /// Moves along `segment` from parameter `s0` to `s1`, bisecting the step
    /// until every increment is below the threshold.
    pub(crate) fn advance_on(
        &mut self,
        segment: &Segment,
        s0: f64,
        s1: f64,
        branch_points: &[Complex64],
        skip: Option<usize>,
    ) -> Result<()> {
        // a chord is only a faithful stand-in for a short arc
        let pieces = match *segment {
            Segment::Arc {
                start_angle,
                end_angle,
                ..
            } => ((end_angle - start_angle).abs() * (s1 - s0).abs() / FRAC_PI_4)
                .ceil()
                .max(1.0) as usize,
            Segment::Line { .. } => 1,
        };
        let mut lo = s0;
        for p in 1..=pieces {
            let hi = if p == pieces {
                s1
            } else {
                s0 + (s1 - s0) * p as f64 / pieces as f64
            };
            self.advance_rec(segment, lo, hi, branch_points, skip, 0)?;
            lo = hi;
        }
        Ok(())
    }

    fn advance_rec(
        &mut self,
        segment: &Segment,
        s0: f64,
        s1: f64,
        branch_points: &[Complex64],
        skip: Option<usize>,
        depth: u32,
    ) -> Result<()> {
        let target = segment.point(s1);
        match self.step_skipping(target, branch_points, skip) {
            Ok(()) => Ok(()),
            Err(e @ Error::StepTooCoarse { .. }) if depth >= 48 => Err(e),
            Err(Error::StepTooCoarse { .. }) => {
                let mid = 0.5 * (s0 + s1);
                self.advance_rec(segment, s0, mid, branch_points, skip, depth + 1)?;
                self.advance_rec(segment, mid, s1, branch_points, skip, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// Value of the branch of `W(R, α)` selected by this state.
    pub fn eval_w(&self, form: &FormIndex, k: u32) -> Complex64 {
        exponent_sum(&self.logs, &form.integrand_exponents(k)).exp()
    }
}

pub(crate) fn exponent_sum(logs: &[Complex64], exponents: &[f64]) -> Complex64 {
    logs.iter().zip(exponents).map(|(l, &e)| l * e).sum()
}

/// A path piece: a straight line or a circular arc.
///
/// Arcs sweep from `start_angle` to `end_angle`; `orientation` is `+1` for
/// counterclockwise and must agree with the sign of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        orientation: i8,
    },
}

impl Segment {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                ..
            } => {
                center + Complex64::from_polar(radius, start_angle + s * (end_angle - start_angle))
            }
        }
    }

    /// `dw/ds`.
    pub fn derivative(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => {
                let sweep = end_angle - start_angle;
                I * sweep * Complex64::from_polar(radius, start_angle + s * sweep)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => Segment::Arc {
                center,
                radius,
                start_angle: end_angle,
                end_angle: start_angle,
                orientation: -orientation,
            },
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => radius * (end_angle - start_angle).abs(),
        }
    }
}

/// A continuous chain of segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    segments: Vec<Segment>,
}

impl Path {
    /// Checks continuity and arc orientation.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if let Segment::Arc {
                radius,
                start_angle,
                end_angle,
                orientation,
                ..
            } = *s
            {
                let sweep = end_angle - start_angle;
                let ok = radius > 0.0
                    && (orientation == 1 || orientation == -1)
                    && sweep * orientation as f64 > 0.0;
                if !ok {
                    return Err(Error::DegenerateInput(format!("malformed arc {s:?}")));
                }
            }
        }
        for w in segments.windows(2) {
            let (a, b) = (w[0].end(), w[1].start());
            if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
                return Err(Error::DegenerateInput(format!(
                    "path is discontinuous at {a}"
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(mut self, other: &Path) -> Result<Path> {
        self.segments.extend_from_slice(&other.segments);
        Path::new(self.segments)
    }
}

/// Continues `state` along `path` with a fixed number of equal parameter
/// steps per segment.
pub fn continue_along(
    state: &BranchState,
    path: &Path,
    steps_per_segment: usize,
    branch_points: &[Complex64],
) -> Result<BranchState> {
    let steps = steps_per_segment.max(1);
    let mut st = state.clone();
    for seg in path.segments() {
        for m in 1..=steps {
            st.step(seg.point(m as f64 / steps as f64), branch_points)?;
        }
    }
    Ok(st)
}

/// Continues `state` along `path`, refining steps wherever an increment
/// would be too coarse.
pub fn continue_adaptive(
    state: &BranchState,
    path: &Path,
    branch_points: &[Complex64],
) -> Result<BranchState> {
    let mut st = state.clone();
    for seg in path.segments() {
        st.advance_on(seg, 0.0, 1.0, branch_points, None)?;
    }
    Ok(st)
}

/// `1e−3 ×` the smallest pairwise branch point distance.
pub fn min_clearance(branch_points: &[Complex64]) -> f64 {
    1e-3 * min_pairwise(branch_points)
}

/// Radius of the standard loop around `r_i`: a quarter of the distance to
/// the nearest other branch point.
pub fn loop_radius(branch_points: &[Complex64], i: usize) -> f64 {
    let r = branch_points[i];
    let nearest = branch_points
        .iter()
        .enumerate()
        .filter(|&(t, _)| t != i)
        .map(|(_, &s)| (s - r).norm())
        .fold(f64::INFINITY, f64::min);
    0.25 * nearest
}

fn min_pairwise(r: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..r.len() {
        for b in a + 1..r.len() {
            best = best.min((r[a] - r[b]).norm());
        }
    }
    best
}

fn diameter(r: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for a in 0..r.len() {
        for b in a + 1..r.len() {
            best = best.max((r[a] - r[b]).norm());
        }
    }
    best.max(1.0)
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// The polyline from the base point to a branch point that both the
/// singular integrals and the loops around that branch point follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    vertices: Vec<Complex64>,
    target: usize,
}

impl Leg {
    /// The straight leg from `base` to `r_target`, or a one-kink detour
    /// (perpendicular offset at the midpoint) if the straight line passes
    /// within the minimum clearance of another branch point.
    pub fn new(base: Complex64, target: usize, branch_points: &[Complex64]) -> Result<Self> {
        if let Some(t) = branch_points.iter().position(|&r| r == base) {
            return Err(Error::BasePointOnBranchPoint(t));
        }
        let end = branch_points[target];
        let clearance = min_clearance(branch_points);
        let clear = |a: Complex64, b: Complex64| {
            branch_points
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != target)
                .all(|(_, &r)| point_segment_distance(r, a, b) >= clearance)
        };
        if clear(base, end) {
            return Ok(Self {
                vertices: vec![base, end],
                target,
            });
        }
        let dir = (end - base) / (end - base).norm();
        let normal = I * dir;
        let mid = 0.5 * (base + end);
        let reach = diameter(branch_points);
        for m in 1..=8 {
            for sign in [1.0, -1.0] {
                let kink = mid + normal * (sign * reach * m as f64 / 8.0);
                if clear(base, kink) && clear(kink, end) {
                    return Ok(Self {
                        vertices: vec![base, kink, end],
                        target,
                    });
                }
            }
        }
        Err(Error::ClearanceUnachievable(target))
    }

    /// A leg through explicit vertices, from the base point to `r_target`.
    /// The caller is responsible for keeping it clear of other branch points.
    pub fn from_vertices(vertices: Vec<Complex64>, target: usize) -> Self {
        assert!(vertices.len() >= 2, "a leg needs at least two vertices");
        Self { vertices, target }
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn base(&self) -> Complex64 {
        self.vertices[0]
    }

    /// Straight pieces in order; the last one ends at the branch point.
    pub fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .map(|w| Segment::Line {
                from: w[0],
                to: w[1],
            })
            .collect()
    }

    /// Standard loop for `φ_target^{±1}`: follow the leg to radius `ρ`,
    /// circle once with the given orientation, return along the leg.
    pub fn loop_path(&self, branch_points: &[Complex64], orientation: i8) -> Path {
        let center = branch_points[self.target];
        let rho = loop_radius(branch_points, self.target);
        let m = self.vertices.len();
        let approach = self.vertices[m - 2];
        let p = center + (approach - center) * (rho / (approach - center).norm());

        let mut out_pts: Vec<Complex64> = self.vertices[..m - 1].to_vec();
        out_pts.push(p);
        let mut segs: Vec<Segment> = out_pts
            .windows(2)
            .map(|w| Segment::Line {
                from: w[0],
                to: w[1],
            })
            .collect();
        let start_angle = (p - center).arg();
        segs.push(Segment::Arc {
            center,
            radius: rho,
            start_angle,
            end_angle: start_angle + 2.0 * PI * orientation as f64,
            orientation,
        });
        segs.extend(out_pts.windows(2).rev().map(|w| Segment::Line {
            from: w[1],
            to: w[0],
        }));
        Path { segments: segs }
    }
}

/// The loop for `φ_target^{orientation}` from `base`.
pub fn loop_path(
    base: Complex64,
    target: usize,
    branch_points: &[Complex64],
    orientation: i8,
) -> Result<Path> {
    if orientation != 1 && orientation != -1 {
        return Err(Error::DegenerateInput(format!(
            "orientation must be ±1, got {orientation}"
        )));
    }
    Ok(Leg::new(base, target, branch_points)?.loop_path(branch_points, orientation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(center: Complex64, radius: f64, start: f64, orientation: i8) -> Path {
        Path::new(vec![Segment::Arc {
            center,
            radius,
            start_angle: start,
            end_angle: start + 2.0 * PI * orientation as f64,
            orientation,
        }])
        .unwrap()
    }

    #[test]
    fn init_examples() {
        let r = [c(0.0, 0.0), c(1.0, 0.0)];
        let s = BranchState::init(c(0.0, 1.0), &r).unwrap();
        assert!((s.logs()[0] - c(0.0, -FRAC_PI_2)).norm() < 1e-15);
        assert!((s.logs()[1] - c(0.5 * 2f64.ln(), 0.75 * PI)).norm() < 1e-15);
        assert_eq!(
            BranchState::init(c(0.0, 0.0), &r),
            Err(Error::BasePointOnBranchPoint(0))
        );

        let r3 = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let s = BranchState::init(c(0.0, 2.0), &r3).unwrap();
        assert_eq!(s.logs()[0], c(0.0, -2.0).ln());
        assert_eq!(s.logs()[1], c(-1.0, 2.0).ln());
        assert_eq!(s.logs()[2], c(-2.0, 2.0).ln());
    }

    #[test]
    fn circle_winding() {
        let r = [c(0.0, 0.0), c(1.0, 0.0)];
        let s0 = BranchState::init(c(0.25, 0.0), &r).unwrap();
        let s1 = continue_along(&s0, &circle(r[0], 0.25, 0.0, 1), 64, &r).unwrap();
        assert!((s1.logs()[0] - s0.logs()[0] - c(0.0, 2.0 * PI)).norm() < 1e-10);
        assert!((s1.logs()[1] - s0.logs()[1]).norm() < 1e-10);

        let s0 = BranchState::init(c(1.25, 0.0), &r).unwrap();
        let s1 = continue_along(&s0, &circle(r[1], 0.25, 0.0, -1), 64, &r).unwrap();
        assert!((s1.logs()[1] - s0.logs()[1] + c(0.0, 2.0 * PI)).norm() < 1e-10);
        assert!((s1.logs()[0] - s0.logs()[0]).norm() < 1e-10);
    }

    #[test]
    fn empty_path_is_identity() {
        let r = [c(0.0, 0.0), c(1.0, 0.0)];
        let s0 = BranchState::init(c(0.3, 0.7), &r).unwrap();
        assert_eq!(continue_along(&s0, &Path::empty(), 10, &r).unwrap(), s0);
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let r = [c(0.0, 0.0), c(1.0, 0.0)];
        let s0 = BranchState::init(c(0.25, 0.0), &r).unwrap();
        let err = continue_along(&s0, &circle(r[0], 0.25, 0.0, 1), 3, &r).unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse { branch: 0, .. }));
        // the adaptive variant refines instead
        let s1 = continue_adaptive(&s0, &circle(r[0], 0.25, 0.0, 1), &r).unwrap();
        assert!((s1.logs()[0] - s0.logs()[0] - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn eval_w_principal_value() {
        let lam = c(2.5, 0.5);
        let r = [c(0.0, 0.0), c(1.0, 0.0), lam];
        let f = FormIndex::new(vec![0, 1, 1], 2).unwrap();
        for w in [c(0.3, 0.4), c(-1.0, 0.2), c(3.0, 2.0)] {
            let s = BranchState::init(w, &r).unwrap();
            let expected = 1.0 / ((-w).sqrt() * (w - 1.0).sqrt() * (w - lam).sqrt());
            assert!((s.eval_w(&f, 2) - expected).norm() < 1e-14 * expected.norm());
        }
    }

    #[test]
    fn monodromy_of_w() {
        let r = [c(0.0, 0.0), c(1.0, 0.0), c(-1.5, 0.0)];
        let base = c(-1.0 / 6.0, 5.0);
        let k = 5;
        let f = FormIndex::new(vec![1, 3, 2], k).unwrap();
        let s0 = BranchState::init(base, &r).unwrap();
        for i in 0..3 {
            let lp = loop_path(base, i, &r, 1).unwrap();
            let s1 = continue_adaptive(&s0, &lp, &r).unwrap();
            for t in 0..3 {
                let gain = s1.logs()[t] - s0.logs()[t];
                let want = if t == i {
                    c(0.0, 2.0 * PI)
                } else {
                    c(0.0, 0.0)
                };
                assert!((gain - want).norm() < 1e-10, "loop {i} log {t}: {gain}");
            }
            let ratio = s1.eval_w(&f, k) / s0.eval_w(&f, k);
            let e = f.integrand_exponents(k)[i];
            let want = Complex64::from_polar(1.0, 2.0 * PI * e);
            assert!((ratio - want).norm() < 1e-9);
        }
    }

    #[test]
    fn reversal_restores_logs() {
        let r = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)];
        let base = c(1.0, 4.5);
        let s0 = BranchState::init(base, &r).unwrap();
        let lp = loop_path(base, 2, &r, 1)
            .unwrap()
            .concat(&loop_path(base, 0, &r, -1).unwrap())
            .unwrap();
        let s1 = continue_adaptive(&s0, &lp, &r).unwrap();
        let s2 = continue_adaptive(&s1, &lp.reversed(), &r).unwrap();
        for (a, b) in s0.logs().iter().zip(s2.logs()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn refinement_is_stable() {
        let r = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)];
        let base = c(1.0, 4.5);
        let s0 = BranchState::init(base, &r).unwrap();
        let lp = loop_path(base, 1, &r, 1).unwrap();
        let a = continue_along(&s0, &lp, 64, &r).unwrap();
        let b = continue_along(&s0, &lp, 128, &r).unwrap();
        for (x, y) in a.logs().iter().zip(b.logs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn loop_path_shape() {
        let r = [c(0.0, 0.0), c(1.0, 0.0)];
        let lp = loop_path(c(0.0, 1.0), 0, &r, 1).unwrap();
        assert_eq!(lp.segments().len(), 3);
        assert!(matches!(
            lp.segments()[1],
            Segment::Arc { orientation: 1, .. }
        ));
        assert_eq!(lp.segments()[0].start(), c(0.0, 1.0));
        assert!((lp.segments()[2].end() - c(0.0, 1.0)).norm() < 1e-15);
        let cw = loop_path(c(0.0, 1.0), 0, &r, -1).unwrap();
        assert!(matches!(
            cw.segments()[1],
            Segment::Arc {
                orientation: -1,
                ..
            }
        ));
        assert!(Path::new(lp.segments().to_vec()).is_ok());
    }

    #[test]
    fn loop_path_detours_near_miss() {
        let r = [c(0.0, 0.0), c(1.0, 0.0), c(0.5, 1e-9)];
        let base = c(1.5, 0.0);
        match Leg::new(base, 0, &r) {
            Ok(leg) => {
                assert_eq!(leg.vertices().len(), 3);
                let clearance = min_clearance(&r);
                for seg in leg.segments() {
                    let Segment::Line { from, to } = seg else {
                        unreachable!()
                    };
                    for t in 1..3 {
                        assert!(point_segment_distance(r[t], from, to) >= clearance);
                    }
                }
                let lp = leg.loop_path(&r, 1);
                assert_eq!(lp.segments().len(), 5);
            }
            Err(e) => assert_eq!(e, Error::ClearanceUnachievable(0)),
        }
    }

    #[test]
    fn unreachable_target() {
        // every leg starts at the base point, which hugs r_3
        let r = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let base = c(2.0, 1e-5);
        assert_eq!(Leg::new(base, 0, &r), Err(Error::ClearanceUnachievable(0)));
        assert!(Leg::new(base, 2, &r).is_ok());
    }
}
