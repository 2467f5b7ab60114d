//! Root location for period polynomials and argument-principle certificates.
//!
//! Two independent routes find the zeros on the unit circle. The first
//! writes `p(X) = q(X) + X^{2M} q(1/X)` and follows sign changes of the real
//! function `2 Re(e^{-iMθ} q(e^{iθ}))` on the intervals
//! `I_j = [π/(2M) + πj/M, π/(2M) + π(j+1)/M]`; every zero found that way is
//! bracketed. The second refines all roots of `p` at once (Aberth iteration,
//! first in double precision and then at working precision) and reads off
//! `|ρ|`. Contour work (winding numbers, boundary minima, sup norms) runs in
//! rectangular multi-precision complex arithmetic with phases taken in
//! double precision.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::period::{complex_powi, trivial_zero_certificate, RealPoly, TrivialZeroCertificate};
use crate::real::{Complex, Ctx, Real};

/// `2 cos(Mθ) R(θ) + 2 sin(Mθ) I(θ)` with `R + iI = q(e^{iθ})`, which equals
/// `e^{-iMθ} p(e^{iθ})` for `p = q + X^{2M} q(1/X)`.
pub fn real_circle_function(q: &RealPoly, m: usize, theta: &Real, cx: &mut Ctx) -> Real {
    let z = cx.cis(theta);
    let zm = complex_powi(&z, m as u32);
    let v = q.eval(&z);
    // Re(conj(z^M) q(z)) = cos(Mθ) R + sin(Mθ) I
    (&zm.re * &v.re + &zm.im * &v.im).ldexp(1)
}

fn horner_c64(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn horner_c64_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Zeros of `e^{-iMθ} p(e^{iθ})` located interval by interval.
#[derive(Clone, Debug)]
pub struct CircleZeros {
    pub m: usize,
    /// Sorted angles in `[0, 2π)`.
    pub angles: Vec<Real>,
    /// Number of zeros found in each `I_j`, `j = 0 .. 2M-1`.
    pub interval_hits: Vec<usize>,
    /// Intervals on which `Im q(e^{iθ})` vanishes somewhere.
    pub skipped_intervals: Vec<usize>,
    /// Lattice points `θ_j` with `Im q(e^{iθ_j}) = 0` to working precision.
    pub lattice_hits: Vec<usize>,
}

impl CircleZeros {
    /// Intervals in which no zero was located.
    pub fn empty_intervals(&self) -> Vec<usize> {
        (0..self.interval_hits.len())
            .filter(|&j| self.interval_hits[j] == 0)
            .collect()
    }
}

const SAMPLES_PER_INTERVAL: usize = 24;

/// Localizes the zeros of `q(X) + X^N q(1/X)` on `|X| = 1`, `N = 2M`.
///
/// Each interval is sampled in double precision; every strict sign change
/// is then refined at the precision of `q` by Illinois steps until the
/// bracket is narrower than `2^{-prec/2}`.
pub fn circle_zeros_by_intervals(q: &RealPoly, n: usize) -> Result<CircleZeros> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameters(alloc::format!("N = {n} must be positive and even")));
    }
    let m = n / 2;
    let prec = q.prec();
    let mut cx = Ctx::new(prec);
    let (c64, _) = q.to_f64_scaled();
    let scale: f64 = c64.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let start = PI / (2.0 * m as f64);
    let width = PI / m as f64;
    let f64_eval = |th: f64| {
        let z = Complex64::from_polar(1.0, th);
        let v = horner_c64(&c64, z);
        let zm = Complex64::from_polar(1.0, m as f64 * th);
        (2.0 * (zm.re * v.re + zm.im * v.im), v.im)
    };
    let hp_eval = |th: &Real, cx: &mut Ctx| real_circle_function(q, m, th, cx);
    let tol_bits = -(prec as i64) / 2;

    let mut angles = Vec::new();
    let mut interval_hits = vec![0usize; n];
    let mut skipped = Vec::new();
    let mut lattice_hits = Vec::new();
    for j in 0..n {
        let a = start + width * j as f64;
        let samples: Vec<(f64, f64, f64)> = (0..=SAMPLES_PER_INTERVAL)
            .map(|i| {
                let th = a + width * i as f64 / SAMPLES_PER_INTERVAL as f64;
                let (fv, iv) = f64_eval(th);
                (th, fv, iv)
            })
            .collect();

        let im_tiny = |v: f64| v.abs() <= 1e-12 * scale;
        if samples.windows(2).any(|w| w[0].2 * w[1].2 < 0.0) || samples.iter().any(|s| im_tiny(s.2)) {
            skipped.push(j);
        }
        // Lattice point θ_j: F(θ_j) = ±2 I(θ_j).
        if im_tiny(samples[0].2) {
            let th = lattice_angle(j, m, &mut cx);
            let z = cx.cis(&th);
            let im = q.eval(&z).im;
            let rel = im.abs().log2_abs() - (libm::log2(scale) + q.to_f64_scaled().1 as f64);
            if im.is_zero() || rel < tol_bits as f64 {
                lattice_hits.push(j);
                interval_hits[j] += 1;
                angles.push(th);
                continue;
            }
        }
        // A sample sitting on a zero has a rounding-noise sign in double
        // precision; take its sign at working precision instead.
        let samples: Vec<(f64, f64, f64)> = samples
            .into_iter()
            .map(|(th, fv, iv)| {
                if fv.abs() > 1e-9 * scale {
                    return (th, fv, iv);
                }
                let v = hp_eval(&Real::from_f64(th, prec), &mut cx);
                (th, v.signum() as f64 * f64::MIN_POSITIVE, iv)
            })
            .collect();
        for w in samples.windows(2) {
            let (t0, f0, _) = w[0];
            let (t1, f1, _) = w[1];
            if f0 * f1 < 0.0 {
                let (t0, t1) = shrink_bracket_f64(&f64_eval, t0, t1, f0, 1e-12 * scale);
                let lo = Real::from_f64(t0, prec);
                let hi = Real::from_f64(t1, prec);
                // Sign changes that do not survive at working precision are
                // rounding noise around a double zero.
                let (flo, fhi) = (hp_eval(&lo, &mut cx), hp_eval(&hi, &mut cx));
                if flo.signum() * fhi.signum() > 0 {
                    continue;
                }
                let root = illinois(&hp_eval, (lo, flo), (hi, fhi), tol_bits, &mut cx);
                interval_hits[j] += 1;
                angles.push(root);
            }
        }
    }
    let two_pi = cx.two_pi();
    let mut angles: Vec<Real> = angles
        .into_iter()
        .map(|t| if t >= two_pi { t - &two_pi } else { t })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    Ok(CircleZeros { m, angles, interval_hits, skipped_intervals: skipped, lattice_hits })
}

/// Bisection in double precision while the sampled sign is trustworthy.
fn shrink_bracket_f64<F: Fn(f64) -> (f64, f64)>(f: &F, mut a: f64, mut b: f64, fa: f64, noise: f64) -> (f64, f64) {
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        let fm = f(m).0;
        if fm.abs() <= noise || m <= a || m >= b {
            break;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

fn lattice_angle(j: usize, m: usize, cx: &mut Ctx) -> Real {
    cx.pi().mul_i64(2 * j as i64 + 1) / Real::from_i64(2 * m as i64, cx.prec())
}

/// Illinois variant of regula falsi on a bracket with a sign change.
fn illinois<F: Fn(&Real, &mut Ctx) -> Real>(
    f: &F,
    (mut a, mut fa): (Real, Real),
    (mut b, mut fb): (Real, Real),
    tol_log2: i64,
    cx: &mut Ctx,
) -> Real {
    if fa.is_zero() {
        return a;
    }
    if fb.is_zero() {
        return b;
    }
    for _ in 0..400 {
        let width = (&b - &a).abs();
        if width.is_zero() || width.log2_abs() < tol_log2 as f64 {
            break;
        }
        let mut c = &b - &(&fb * &(&b - &a) / (&fb - &fa));
        if c <= a.clone().min(b.clone()) || c >= a.clone().max(b.clone()) {
            c = (&a + &b).ldexp(-1);
        }
        let fc = f(&c, cx);
        if fc.is_zero() {
            return c;
        }
        if fc.signum() == fb.signum() {
            fa = fa.ldexp(-1);
        } else {
            a = b;
            fa = fb;
        }
        b = c;
        fb = fc;
    }
    (&a + &b).ldexp(-1)
}

/// Roots of a polynomial with their multiplicities.
#[derive(Clone, Debug)]
pub struct RootSet {
    /// Every root, repeated by multiplicity; `degree` entries.
    pub roots: Vec<Complex>,
    /// Distinct roots after merging points closer than `2^{-prec/4}`.
    pub clusters: Vec<(Complex, usize)>,
}

const F64_ITERATIONS: usize = 800;
const HP_ITERATIONS: usize = 200;

/// Aberth–Ehrlich iteration in double precision from starts on the circles of
/// radius 0.5, 1 and 2.
fn aberth_f64(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let offset = 0.4;
    let radii = [0.5, 1.0, 2.0];
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| Complex64::from_polar(radii[j % 3], 2.0 * PI * j as f64 / d as f64 + offset))
        .collect();
    let mut frozen = vec![false; d];
    for _ in 0..F64_ITERATIONS {
        let mut moved = false;
        for i in 0..d {
            if frozen[i] {
                continue;
            }
            let (p, dp) = horner_c64_with_derivative(c, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                frozen[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1.0) {
                frozen[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}

fn union_clusters(z: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= tol * z[i].norm().max(1.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[label[r]].push(i);
    }
    groups
}

/// `Σ_i |c_i| i!/(i-j)! |z|^{i-j}`: the size of the terms in `p^{(j)}(z)`.
fn derivative_scale(c: &[f64], j: usize, r: f64) -> f64 {
    let mut total = 0.0;
    for (i, a) in c.iter().enumerate().skip(j) {
        let falling: f64 = (i - j + 1..=i).map(|x| x as f64).product();
        total += a.abs() * falling * r.powi((i - j) as i32);
    }
    total
}

/// All roots of `p` by simultaneous refinement.
///
/// Double-precision Aberth iteration gives starting values. Points closer
/// than `1e-4` are treated as one candidate multiple root and polished by
/// Newton's method on the derivative of the matching order, then accepted
/// only if the lower derivatives vanish to `2^{-prec/4}`. Everything else is
/// polished by Aberth steps at working precision until the last step is
/// below `2^{-prec/2}`. Multiplicities are read off by clustering the final
/// roots within `2^{-prec/4}`.
pub fn refine_all_roots(p: &RealPoly) -> Result<RootSet> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::InvalidParameters("root refinement needs degree >= 1".into()));
    }
    let prec = p.prec();
    let (c64, _) = p.to_f64_scaled();
    let start = aberth_f64(&c64);

    let groups = union_clusters(&start, 1e-4);
    let derivs: Vec<RealPoly> = {
        let max_m = groups.iter().map(Vec::len).max().unwrap_or(1);
        let mut v = vec![p.clone()];
        for _ in 1..max_m {
            let next = v.last().unwrap().derivative();
            v.push(next);
        }
        v
    };

    let mut roots: Vec<Complex> = start.iter().map(|z| Complex::from_f64(z.re, z.im, prec)).collect();
    let mut active: Vec<usize> = Vec::new();
    let quarter = -(prec as f64) / 4.0;
    for g in &groups {
        if g.len() == 1 {
            active.push(g[0]);
            continue;
        }
        let m = g.len();
        let centroid = g.iter().fold(Complex64::new(0.0, 0.0), |a, &i| a + start[i]) / m as f64;
        let mut z = Complex::from_f64(centroid.re, centroid.im, prec);
        let target = &derivs[m - 1];
        let mut converged = false;
        for _ in 0..HP_ITERATIONS {
            let (v, dv) = target.eval_with_derivative(&z);
            if v.is_zero() || dv.is_zero() {
                converged = true;
                break;
            }
            let step = &v / &dv;
            z = &z - &step;
            if step_small(&step, &z, prec) {
                converged = true;
                break;
            }
        }
        let r = z.abs().to_f64();
        let genuine = converged
            && (0..m).all(|j| {
                let v = derivs[j].eval(&z).abs();
                let s = derivative_scale(&c64, j, r) * libm::exp2(p.to_f64_scaled().1 as f64);
                v.is_zero() || v.log2_abs() - libm::log2(s) < quarter
            });
        if genuine {
            for &i in g {
                roots[i] = z.clone();
            }
        } else {
            active.extend_from_slice(g);
        }
    }

    let mut stuck = Vec::new();
    let mut frozen = vec![true; d];
    for &i in &active {
        frozen[i] = false;
    }
    for _ in 0..HP_ITERATIONS {
        let approx: Vec<Complex64> = roots.iter().map(|z| z.to_c64_scaled().0).collect();
        let mut any = false;
        for i in 0..d {
            if frozen[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(&roots[i]);
            if v.is_zero() {
                frozen[i] = true;
                continue;
            }
            let ratio = &v / &dv;
            // The Aberth sum only needs a few correct bits once the roots are close.
            let sum: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (approx[i] - approx[j]))
                .filter(|s| s.re.is_finite() && s.im.is_finite())
                .sum();
            let r64 = ratio.to_c64_scaled();
            let corr = Complex64::new(1.0, 0.0) - r64.0 * libm::exp2(r64.1 as f64) * sum;
            let denom = Complex::from_f64(corr.re, corr.im, prec);
            let step = &ratio / &denom;
            roots[i] = &roots[i] - &step;
            if step_small(&step, &roots[i], prec) {
                frozen[i] = true;
            } else {
                any = true;
            }
        }
        if !any {
            break;
        }
    }
    for i in 0..d {
        if !frozen[i] {
            stuck.push(i);
        }
    }
    if !stuck.is_empty() {
        return Err(Error::NoConvergence(stuck));
    }
    let clusters = cluster_roots(&roots, prec);
    Ok(RootSet { roots, clusters })
}

fn step_small(step: &Complex, z: &Complex, prec: usize) -> bool {
    if step.is_zero() {
        return true;
    }
    let mag = z.abs().log2_abs().max(0.0);
    step.abs().log2_abs() < mag - (prec as f64) / 2.0
}

fn cluster_roots(roots: &[Complex], prec: usize) -> Vec<(Complex, usize)> {
    let tol = -(prec as f64) / 4.0;
    let mut out: Vec<(Complex, usize)> = Vec::new();
    'next: for z in roots {
        for (c, m) in out.iter_mut() {
            let gap = (z - &*c).abs();
            if gap.is_zero() || gap.log2_abs() < tol + c.abs().log2_abs().max(0.0) {
                *m += 1;
                continue 'next;
            }
        }
        out.push((z.clone(), 1));
    }
    out
}

/// The forced zeros of an odd period polynomial and their multiplicities.
pub const TRIVIAL_ZEROS: [(f64, usize); 7] = [
    (0.0, 1),
    (2.0, 1),
    (-2.0, 1),
    (0.5, 1),
    (-0.5, 1),
    (1.0, 2),
    (-1.0, 2),
];

/// How the roots of one polynomial split between the forced set and the unit circle.
#[derive(Clone, Debug)]
pub struct RootClassification {
    /// Multiplicity found at each point of [`TRIVIAL_ZEROS`].
    pub trivial_found: Vec<usize>,
    /// Roots outside the forced set, with multiplicity.
    pub other: Vec<Complex>,
    /// Those of `other` with `||ρ| - 1| < threshold`.
    pub n_circle: usize,
    /// `max ||ρ| - 1|` over `other`.
    pub max_modulus_deviation: Real,
}

impl RootClassification {
    pub fn trivial_complete(&self) -> bool {
        self.trivial_found
            .iter()
            .zip(TRIVIAL_ZEROS.iter())
            .all(|(f, (_, m))| f == m)
    }

    pub fn trivial_count(&self) -> usize {
        self.trivial_found.iter().sum()
    }
}

/// Splits roots into the forced set (matched within `2^{-prec/4}`) and the
/// rest, counting those within `threshold` of the unit circle.
pub fn classify_roots(set: &RootSet, trivial: &[(f64, usize)], threshold: f64) -> RootClassification {
    let prec = set.roots.first().map_or(64, Complex::prec);
    let tol = -(prec as f64) / 4.0;
    let mut trivial_found = vec![0usize; trivial.len()];
    let mut other = Vec::new();
    for z in &set.roots {
        let hit = trivial.iter().position(|(t, _)| {
            let gap = (z - &Complex::from_f64(*t, 0.0, prec)).abs();
            gap.is_zero() || gap.log2_abs() < tol
        });
        match hit {
            Some(i) => trivial_found[i] += 1,
            None => other.push(z.clone()),
        }
    }
    let one = Real::one(prec);
    let mut max_dev = Real::zero(prec);
    let mut n_circle = 0;
    for z in &other {
        let dev = (z.abs() - &one).abs();
        if dev.to_f64() < threshold {
            n_circle += 1;
        }
        max_dev = max_dev.max(dev);
    }
    RootClassification { trivial_found, other, n_circle, max_modulus_deviation: max_dev }
}

/// A closed contour: one circle, or both boundary circles of an annulus.
#[derive(Clone, Debug)]
pub enum ContourKind {
    Circle,
    AnnulusBoundary,
}

#[derive(Clone, Debug)]
pub struct Contour {
    pub kind: ContourKind,
    /// One radius for a circle; inner then outer for an annulus.
    pub radii: Vec<Real>,
    /// Initial samples per circle before adaptive refinement.
    pub samples: usize,
}

impl Contour {
    pub fn circle(radius: Real, samples: usize) -> Result<Self> {
        if radius.signum() <= 0 || samples < 4 {
            return Err(Error::InvalidParameters("circle needs a positive radius and >= 4 samples".into()));
        }
        Ok(Contour { kind: ContourKind::Circle, radii: vec![radius], samples })
    }

    pub fn annulus(inner: Real, outer: Real, samples: usize) -> Result<Self> {
        if inner.signum() <= 0 || inner >= outer || samples < 4 {
            return Err(Error::InvalidParameters("annulus needs 0 < inner < outer and >= 4 samples".into()));
        }
        Ok(Contour { kind: ContourKind::AnnulusBoundary, radii: vec![inner, outer], samples })
    }

    /// `4/5 <= |z| <= 5/4`.
    pub fn lemma_annulus(samples: usize, prec: usize) -> Self {
        let inner = Real::from_i64(4, prec).div_i64(5);
        let outer = Real::from_i64(5, prec).div_i64(4);
        Contour::annulus(inner, outer, samples).expect("valid annulus")
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        Contour { samples, ..self.clone() }
    }

    /// Circles with the orientation sign they carry in the argument principle.
    fn oriented(&self) -> Vec<(Real, i64)> {
        match self.kind {
            ContourKind::Circle => vec![(self.radii[0].clone(), 1)],
            ContourKind::AnnulusBoundary => vec![(self.radii[0].clone(), -1), (self.radii[1].clone(), 1)],
        }
    }
}

fn circle_point(radius: &Real, t: f64, cx: &mut Ctx) -> Complex {
    let th = cx.two_pi() * Real::from_f64(t, cx.prec());
    cx.cis(&th).scale(radius)
}

/// Result of the argument principle on a contour.
#[derive(Clone, Debug)]
pub struct Winding {
    pub count: i64,
    /// Total phase change divided by `2π` before snapping.
    pub raw: f64,
    pub snap_distance: f64,
    /// Number of function evaluations, including adaptive ones.
    pub evaluations: usize,
}

const MAX_BISECTIONS: u32 = 40;

/// Zeros minus poles enclosed, from the accumulated phase of `f`.
///
/// Consecutive samples are bisected until every phase step is below `π/2`.
pub fn winding_count<F>(f: &F, contour: &Contour, cx: &mut Ctx) -> Result<Winding>
where
    F: Fn(&Complex, &mut Ctx) -> Complex,
{
    let mut total = 0.0;
    let mut evaluations = 0usize;
    for (radius, orientation) in contour.oriented() {
        let n = contour.samples;
        let mut arg_at = |t: f64, cx: &mut Ctx| -> Result<f64> {
            evaluations += 1;
            let v = f(&circle_point(&radius, t, cx), cx);
            if v.is_zero() {
                return Err(Error::ContourZero(t));
            }
            Ok(v.arg_f64())
        };
        let mut args = Vec::with_capacity(n + 1);
        for j in 0..n {
            args.push(arg_at(j as f64 / n as f64, cx)?);
        }
        args.push(args[0]);
        let mut phase = 0.0;
        for j in 0..n {
            let t0 = j as f64 / n as f64;
            let t1 = (j + 1) as f64 / n as f64;
            phase += phase_step(&mut arg_at, t0, t1, args[j], args[j + 1], MAX_BISECTIONS, cx)?;
        }
        total += orientation as f64 * phase;
    }
    let raw = total / (2.0 * PI);
    let count = libm::round(raw) as i64;
    let snap_distance = (raw - count as f64).abs();
    if snap_distance >= 0.01 {
        return Err(Error::WindingSnap { value: raw, distance: snap_distance });
    }
    Ok(Winding { count, raw, snap_distance, evaluations })
}

fn principal(d: f64) -> f64 {
    let mut d = libm::fmod(d, 2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn phase_step<A>(arg_at: &mut A, t0: f64, t1: f64, a0: f64, a1: f64, depth: u32, cx: &mut Ctx) -> Result<f64>
where
    A: FnMut(f64, &mut Ctx) -> Result<f64>,
{
    let d = principal(a1 - a0);
    if d.abs() < PI / 2.0 {
        return Ok(d);
    }
    if depth == 0 {
        return Err(Error::ContourZero(t0));
    }
    let tm = 0.5 * (t0 + t1);
    let am = arg_at(tm, cx)?;
    Ok(phase_step(arg_at, t0, tm, a0, am, depth - 1, cx)? + phase_step(arg_at, tm, t1, am, a1, depth - 1, cx)?)
}

/// An extreme value of `|g|` on a contour and where it occurs.
#[derive(Clone, Debug)]
pub struct Extremum {
    pub value: Real,
    pub at: Complex,
}

const REFINED_CANDIDATES: usize = 4;
const GOLDEN_STEPS: usize = 28;

/// Grid search for the extreme of a real function on each circle of the
/// contour, followed by golden-section refinement around the best local
/// extrema.
fn contour_extremum<H>(h: &H, contour: &Contour, maximize: bool, cx: &mut Ctx) -> Extremum
where
    H: Fn(&Complex, &mut Ctx) -> Real,
{
    let better = |a: &Real, b: &Real| if maximize { a > b } else { a < b };
    let mut best: Option<Extremum> = None;
    for (radius, _) in contour.oriented() {
        let n = contour.samples;
        let eval = |t: f64, cx: &mut Ctx| {
            let z = circle_point(&radius, t, cx);
            let v = h(&z, cx);
            (v, z)
        };
        let vals: Vec<(Real, Complex)> = (0..n).map(|j| eval(j as f64 / n as f64, cx)).collect();
        let mut cands: Vec<usize> = (0..n)
            .filter(|&j| {
                let prev = &vals[(j + n - 1) % n].0;
                let next = &vals[(j + 1) % n].0;
                !better(prev, &vals[j].0) && !better(next, &vals[j].0)
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let o = vals[a].0.partial_cmp(&vals[b].0).unwrap();
            if maximize {
                o.reverse()
            } else {
                o
            }
        });
        cands.truncate(REFINED_CANDIDATES);
        for j in cands {
            let h_step = 1.0 / n as f64;
            let (mut lo, mut hi) = (j as f64 / n as f64 - h_step, j as f64 / n as f64 + h_step);
            let gr = 0.5 * (libm::sqrt(5.0) - 1.0);
            let mut x1 = hi - gr * (hi - lo);
            let mut x2 = lo + gr * (hi - lo);
            let mut f1 = eval(x1, cx);
            let mut f2 = eval(x2, cx);
            let mut local = vals[j].clone();
            for _ in 0..GOLDEN_STEPS {
                if better(&f1.0, &f2.0) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1.clone();
                    x1 = hi - gr * (hi - lo);
                    f1 = eval(x1, cx);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2.clone();
                    x2 = lo + gr * (hi - lo);
                    f2 = eval(x2, cx);
                }
                for cand in [&f1, &f2] {
                    if better(&cand.0, &local.0) {
                        local = cand.clone();
                    }
                }
            }
            if best.as_ref().is_none_or(|b| better(&local.0, &b.value)) {
                best = Some(Extremum { value: local.0, at: local.1 });
            }
        }
    }
    best.expect("contour has at least one circle")
}

/// Minimum of `|f|` over the contour.
pub fn boundary_min<F>(f: &F, contour: &Contour, cx: &mut Ctx) -> Extremum
where
    F: Fn(&Complex, &mut Ctx) -> Complex,
{
    contour_extremum(&|z: &Complex, cx: &mut Ctx| f(z, cx).abs(), contour, false, cx)
}

/// Maximum of `|f|` over the contour.
pub fn boundary_max<F>(f: &F, contour: &Contour, cx: &mut Ctx) -> Extremum
where
    F: Fn(&Complex, &mut Ctx) -> Complex,
{
    contour_extremum(&|z: &Complex, cx: &mut Ctx| f(z, cx).abs(), contour, true, cx)
}

/// Outcome of comparing `f` against `g` on a contour.
#[derive(Clone, Debug)]
pub struct RoucheReport {
    pub max_difference: Extremum,
    pub min_reference: Extremum,
    /// `max |f - g| < min |g|`.
    pub verified: bool,
    pub winding_f: Option<Winding>,
    pub winding_g: Option<Winding>,
}

impl RoucheReport {
    /// Verified, both windings computed and equal.
    pub fn consistent(&self) -> bool {
        self.verified
            && matches!((&self.winding_f, &self.winding_g), (Some(a), Some(b)) if a.count == b.count)
    }
}

pub fn rouche_compare<F, G>(f: &F, g: &G, contour: &Contour, cx: &mut Ctx) -> RoucheReport
where
    F: Fn(&Complex, &mut Ctx) -> Complex,
    G: Fn(&Complex, &mut Ctx) -> Complex,
{
    let min_reference = boundary_min(g, contour, cx);
    let winding_g = winding_count(g, contour, cx).ok();
    rouche_against(f, g, contour, &min_reference, winding_g.as_ref(), cx)
}

/// Like [`rouche_compare`] with `min |g|` and the winding of `g` already known,
/// for running many `f` against one reference.
pub fn rouche_against<F, G>(
    f: &F,
    g: &G,
    contour: &Contour,
    min_reference: &Extremum,
    winding_g: Option<&Winding>,
    cx: &mut Ctx,
) -> RoucheReport
where
    F: Fn(&Complex, &mut Ctx) -> Complex,
    G: Fn(&Complex, &mut Ctx) -> Complex,
{
    let diff = |z: &Complex, cx: &mut Ctx| f(z, cx) - g(z, cx);
    let max_difference = boundary_max(&diff, contour, cx);
    let verified = !min_reference.value.is_zero() && max_difference.value < min_reference.value;
    let (winding_f, winding_g) = if verified {
        (winding_count(f, contour, cx).ok(), winding_g.cloned())
    } else {
        (None, None)
    };
    RoucheReport { max_difference, min_reference: min_reference.clone(), verified, winding_f, winding_g }
}

/// `sup_{|z| = radius} |sin 2πz - q(z)|`.
pub fn sin_approx_sup(q: &RealPoly, radius: &Real, samples: usize, cx: &mut Ctx) -> Result<Extremum> {
    let contour = Contour::circle(radius.clone(), samples)?;
    let f = |z: &Complex, cx: &mut Ctx| {
        let two_pi = cx.two_pi();
        cx.sin_complex(&z.scale(&two_pi)) - q.eval(z)
    };
    Ok(boundary_max(&f, &contour, cx))
}

/// `S(z) = sin 2πz - sin(2π/z)`.
pub fn s_function(z: &Complex, cx: &mut Ctx) -> Complex {
    let two_pi = cx.two_pi();
    let a = cx.sin_complex(&z.scale(&two_pi));
    let b = cx.sin_complex(&z.inv().scale(&two_pi));
    a - b
}

/// `Q(z) = q(z) - q(1/z)`.
pub fn antisymmetric_part(q: &RealPoly, z: &Complex) -> Complex {
    q.eval(z) - q.eval(&z.inv())
}

/// Rounds every coefficient to `prec` bits, for contour work where a few
/// hundred bits are plenty.
pub fn with_precision(p: &RealPoly, prec: usize) -> RealPoly {
    RealPoly::new(p.coeffs().iter().map(|c| c.clone().with_prec(prec)).collect(), prec)
}

/// Whether the refined circle roots and the interval-localized angles match
/// one to one within `2^{-prec/4}` in angle.
pub fn cross_validate(circle: &CircleZeros, roots: &[Complex], prec: usize) -> bool {
    if circle.angles.len() != roots.len() {
        return false;
    }
    let mut cx = Ctx::new(prec);
    let two_pi = cx.two_pi();
    let mut angles: Vec<Real> = roots
        .iter()
        .map(|z| {
            let a = complex_arg(z, &mut cx);
            if a.is_negative() {
                a + &two_pi
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = -(prec as f64) / 4.0;
    angles.iter().zip(&circle.angles).all(|(a, b)| {
        let gap = (a - b).abs();
        let wrapped = (&two_pi - &gap).abs();
        let g = gap.min(wrapped);
        g.is_zero() || g.log2_abs() < tol
    })
}

/// Argument of `z` in `(-π, π]` at the precision of `z`.
pub fn complex_arg(z: &Complex, cx: &mut Ctx) -> Real {
    // Newton polish of the double-precision angle on sin θ |z| = Im z.
    let prec = z.prec();
    let r = z.abs();
    let mut th = Real::from_f64(z.arg_f64(), prec);
    for _ in 0..64 {
        let c = cx.cos(&th);
        let s = cx.sin(&th);
        let step = (&c * &z.im - &s * &z.re) / &r;
        th = &th + &step;
        if step.is_zero() || step.log2_abs() < -(prec as f64) + 4.0 {
            break;
        }
    }
    th
}

/// Where the zeros of one odd period polynomial lie.
#[derive(Clone, Debug)]
pub struct ZeroReport {
    pub weight: u32,
    pub form_index: usize,
    pub trivial: TrivialZeroCertificate,
    /// Multiplicities found at the points of [`TRIVIAL_ZEROS`] by refinement.
    pub trivial_found: Vec<usize>,
    /// Bracketed circle zeros from the interval scan.
    pub circle_angles: Vec<Real>,
    pub empty_intervals: Vec<usize>,
    pub skipped_intervals: Vec<usize>,
    pub lattice_hits: Vec<usize>,
    /// Refined roots outside the forced set with `||ρ| - 1| < 1e-20`.
    pub n_circle_zeros: usize,
    /// Refined roots outside the forced set.
    pub n_nontrivial: usize,
    pub max_modulus_deviation: Real,
    /// Bracketed angles and refined circle roots agree one to one.
    pub cross_validated: bool,
    pub accounted: bool,
}

/// Circle threshold for refined roots.
pub const CIRCLE_TOLERANCE: f64 = 1e-20;

/// Runs the trivial-zero certificate, full refinement of `r` and the interval
/// scan of `q`, where `r` is a multiple of `q(X) + X^w q(1/X)`.
pub fn zero_report(weight: u32, form_index: usize, r: &RealPoly, q: &RealPoly) -> Result<ZeroReport> {
    let w = weight as usize - 2;
    let prec = r.prec();
    let trivial = trivial_zero_certificate(r, w)?;
    let set = refine_all_roots(r)?;
    let cls = classify_roots(&set, &TRIVIAL_ZEROS, CIRCLE_TOLERANCE);
    let circle = circle_zeros_by_intervals(q, w)?;
    let on_circle: Vec<Complex> = cls
        .other
        .iter()
        .filter(|z| (z.abs() - Real::one(prec)).abs().to_f64() < CIRCLE_TOLERANCE)
        .cloned()
        .collect();
    let cross_validated = cross_validate(&circle, &on_circle, prec);
    let expected = r.degree().saturating_sub(9);
    let accounted = trivial.passed()
        && cls.trivial_complete()
        && cls.other.len() == cls.n_circle
        && cls.n_circle == expected
        && cross_validated;
    Ok(ZeroReport {
        weight,
        form_index,
        trivial,
        trivial_found: cls.trivial_found.clone(),
        empty_intervals: circle.empty_intervals(),
        skipped_intervals: circle.skipped_intervals,
        lattice_hits: circle.lattice_hits,
        circle_angles: circle.angles,
        n_circle_zeros: cls.n_circle,
        n_nontrivial: cls.other.len(),
        max_modulus_deviation: cls.max_modulus_deviation,
        cross_validated,
        accounted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::RealPoly;

    const P: usize = 192;

    fn poly(v: &[f64]) -> RealPoly {
        RealPoly::from_f64(v, P)
    }

    #[test]
    fn real_circle_function_examples() {
        let mut cx = Ctx::new(P);
        let q = poly(&[0.0, 1.0]);
        for t in [0.0, 0.3, 1.7, 4.0] {
            let th = Real::from_f64(t, P);
            let v = real_circle_function(&q, 1, &th, &mut cx);
            assert!((v.to_f64() - 2.0).abs() < 1e-30);
        }
        let q = poly(&[0.3, -1.0, 0.0, 2.0]);
        let th = Real::from_f64(0.9, P);
        let shifted = &th + &cx.two_pi();
        let a = real_circle_function(&q, 3, &th, &mut cx);
        let b = real_circle_function(&q, 3, &shifted, &mut cx);
        assert!((a - b).abs().log2_abs() < -150.0);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let set = refine_all_roots(&poly(&[-4.0, 0.0, 1.0])).unwrap();
        let mut re: Vec<f64> = set.roots.iter().map(|z| z.re.to_f64()).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(re, std::vec![-2.0, 2.0]);
        assert!(set.roots.iter().all(|z| z.im.abs().to_f64() < 1e-40));

        // (x - 1)^3 (x + 0.5): a triple root is recovered as one cluster.
        let set = refine_all_roots(&poly(&[-0.5, 0.5, 1.5, -2.5, 1.0])).unwrap();
        assert_eq!(set.roots.len(), 4);
        let mut mult: Vec<usize> = set.clusters.iter().map(|c| c.1).collect();
        mult.sort();
        assert_eq!(mult, std::vec![1, 3]);

        assert!(refine_all_roots(&poly(&[3.0])).is_err());
    }

    #[test]
    fn close_simple_roots_stay_separate() {
        // (x - 1)(x - 1 - 1e-6)
        let e = 1e-6;
        let set = refine_all_roots(&poly(&[1.0 + e, -(2.0 + e), 1.0])).unwrap();
        assert_eq!(set.clusters.len(), 2);
    }

    #[test]
    fn winding_of_powers() {
        let mut cx = Ctx::new(128);
        let unit = Contour::circle(Real::one(128), 8).unwrap();
        let cube = |z: &Complex, _: &mut Ctx| z * &(z * z);
        assert_eq!(winding_count(&cube, &unit, &mut cx).unwrap().count, 3);
        let inv = |z: &Complex, _: &mut Ctx| z.inv();
        assert_eq!(winding_count(&inv, &unit, &mut cx).unwrap().count, -1);
        let ann = Contour::annulus(Real::from_f64(0.5, 128), Real::from_f64(2.0, 128), 16).unwrap();
        // zeros at 0 and 1: only the one at 1 lies in the annulus
        let f = |z: &Complex, _: &mut Ctx| z * &(z - &Complex::from_f64(1.0, 0.0, 128));
        assert_eq!(winding_count(&f, &ann, &mut cx).unwrap().count, 1);
        let through = |z: &Complex, _: &mut Ctx| z - &Complex::from_f64(1.0, 0.0, 128);
        assert!(winding_count(&through, &unit, &mut cx).is_err());
    }

    #[test]
    fn boundary_minimum_examples() {
        let mut cx = Ctx::new(128);
        let unit = Contour::circle(Real::one(128), 64).unwrap();
        let id = |z: &Complex, _: &mut Ctx| z.clone();
        let m = boundary_min(&id, &unit, &mut cx);
        assert!((m.value.to_f64() - 1.0).abs() < 1e-30);
        let shifted = |z: &Complex, _: &mut Ctx| z - &Complex::from_f64(1.0, 0.0, 128);
        let m = boundary_min(&shifted, &unit, &mut cx);
        assert!(m.value.to_f64() < 1e-9);
        assert!((m.at.re.to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rouche_examples() {
        let mut cx = Ctx::new(128);
        let unit = Contour::circle(Real::one(128), 32).unwrap();
        let sq = |z: &Complex, _: &mut Ctx| z * z;
        let shifted = |z: &Complex, _: &mut Ctx| &(z * z) + &Complex::from_f64(3.0, 0.0, 128);
        let r = rouche_compare(&sq, &shifted, &unit, &mut cx);
        assert!(!r.verified);
        assert!((r.max_difference.value.to_f64() - 3.0).abs() < 1e-20);
        let r = rouche_compare(&sq, &sq, &unit, &mut cx);
        assert!(r.verified && r.consistent());
        let small = |z: &Complex, _: &mut Ctx| &(z * z) + &Complex::from_f64(0.25, 0.0, 128);
        let r = rouche_compare(&small, &sq, &unit, &mut cx);
        assert!(r.consistent());
        assert_eq!(r.winding_f.unwrap().count, 2);
    }

    #[test]
    fn truncated_sine_matches_sine() {
        let prec = 192;
        let mut cx = Ctx::new(prec);
        let two_pi = cx.two_pi();
        let mut coeffs = vec![Real::zero(prec); 62];
        let mut t = Real::one(prec);
        for j in 1..62 {
            t = (&t * &two_pi).div_i64(j as i64);
            if j % 2 == 1 {
                coeffs[j] = if (j / 2) % 2 == 0 { t.clone() } else { -&t };
            }
        }
        let q = RealPoly::new(coeffs, prec);
        let r = Real::from_f64(1.25, prec);
        let sup = sin_approx_sup(&q, &r, 256, &mut cx).unwrap();
        assert!(sup.value.to_f64() < 1e-20, "{:?}", sup.value);
    }

    #[test]
    fn circle_zeros_of_a_self_reciprocal_example() {
        // q = 1 + 0.5 X: p = q + X^4 q(1/X) = 1 + 0.5X + 0.5X^3 + X^4.
        let q = poly(&[1.0, 0.5]);
        let cz = circle_zeros_by_intervals(&q, 4).unwrap();
        let p = poly(&[1.0, 0.5, 0.0, 0.5, 1.0]);
        let set = refine_all_roots(&p).unwrap();
        let on_circle: Vec<Complex> = set.roots.clone();
        assert!(on_circle.iter().all(|z| (z.abs().to_f64() - 1.0).abs() < 1e-30));
        assert_eq!(cz.angles.len(), 4);
        assert!(cross_validate(&cz, &on_circle, P));
        // conjugate pairs
        let a: Vec<f64> = cz.angles.iter().map(Real::to_f64).collect();
        assert!((a[0] + a[3] - 2.0 * PI).abs() < 1e-12);
        assert!(circle_zeros_by_intervals(&q, 3).is_err());
    }

    #[test]
    fn complex_argument_is_precise() {
        let prec = 256;
        let mut cx = Ctx::new(prec);
        let th = Real::from_f64(2.5, prec) + Real::pow2(-100, prec).div_i64(3);
        let z = cx.cis(&th).scale(&Real::from_f64(3.0, prec));
        let a = complex_arg(&z, &mut cx);
        assert!((a - th).abs().log2_abs() < -240.0);
    }
}
