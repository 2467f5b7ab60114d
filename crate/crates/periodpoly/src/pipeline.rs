//! Per-weight and per-form verification runs.

use std::time::Instant;

use periodpoly_core::hecke::{deligne_ratio, eigenforms, multiplicativity_residual, Eigenform, HeckeSystem};
use periodpoly_core::lfunction::{
    check_lemma4_bounds, functional_equation_residual, truncation_length, GammaTable, LValues,
};
use periodpoly_core::period::{
    bernoulli_period_polynomial, check_cocycle_relations, is_self_reciprocal, normalized_p,
    odd_period_polynomial, q_split, reconstruction_residual, sample_points, RealPoly,
};
use periodpoly_core::zeros::{
    antisymmetric_part, boundary_min, classify_roots, refine_all_roots, rouche_against, s_function,
    sin_approx_sup, winding_count, with_precision, zero_report, Contour, Extremum, Winding,
    TRIVIAL_ZEROS,
};
use periodpoly_core::{Complex, Ctx, Error, Real};
use rayon::prelude::*;

use crate::config::VerifyConfig;
use crate::report::*;

/// Working precision for contour integrals and sup norms.
pub const CONTOUR_PREC: usize = 128;
/// Weights from which the sine-approximation and Rouché checks apply.
pub const SINE_REGIME_WEIGHT: u32 = 80;
const SINE_THRESHOLD: f64 = 0.01;
const RECONSTRUCTION_POINTS: usize = 64;
const TRIVIAL_LABELS: [&str; 7] = ["0", "2", "-2", "1/2", "-1/2", "1", "-1"];

fn point(dec: &mut Decimal, z: &Complex) -> Point {
    Point { re: dec.real(&z.re), im: dec.real(&z.im) }
}

fn winding_record(w: &Winding) -> WindingRecord {
    WindingRecord {
        count: w.count,
        raw: float(w.raw),
        snap_distance: float(w.snap_distance),
        evaluations: w.evaluations,
        error: None,
    }
}

fn seconds(start: Instant) -> String {
    float(start.elapsed().as_secs_f64())
}

/// The annulus certificate for `S` plus what the Rouché checks reuse.
pub struct AnnulusRun {
    pub report: AnnulusCertificate,
    pub contour: Contour,
    pub min: Extremum,
    pub winding: Option<Winding>,
}

/// Winding number and boundary minimum of `S` at `samples` and `2 * samples`.
pub fn annulus_certificate(samples: usize) -> AnnulusRun {
    let start = Instant::now();
    let mut cx = Ctx::new(CONTOUR_PREC);
    let mut dec = Decimal::new();
    let contour = Contour::lemma_annulus(samples, CONTOUR_PREC);
    let doubled = contour.with_samples(2 * samples);
    let winding = winding_count(&s_function, &contour, &mut cx);
    let winding2 = winding_count(&s_function, &doubled, &mut cx);
    let min = boundary_min(&s_function, &contour, &mut cx);
    let min2 = boundary_min(&s_function, &doubled, &mut cx);
    let rec = winding_outcome(&winding);
    let rec2 = winding_outcome(&winding2);
    let one = Real::one(CONTOUR_PREC);
    let passed = matches!((&winding, &winding2), (Ok(a), Ok(b)) if a.count == 10 && b.count == 10)
        && min.value > one
        && min2.value > one;
    let report = AnnulusCertificate {
        inner_radius: dec.real(&contour.radii[0]),
        outer_radius: dec.real(&contour.radii[1]),
        samples,
        winding: rec,
        winding_doubled: rec2,
        boundary_min: dec.real(&min.value),
        boundary_min_at: point(&mut dec, &min.at),
        boundary_min_doubled: dec.real(&min2.value),
        passed,
        wall_time_s: seconds(start),
    };
    AnnulusRun { report, contour, min, winding: winding.ok() }
}

fn winding_outcome(w: &Result<Winding, Error>) -> WindingRecord {
    match w {
        Ok(w) => winding_record(w),
        Err(e) => WindingRecord {
            count: 0,
            raw: "nan".into(),
            snap_distance: "nan".into(),
            evaluations: 0,
            error: Some(e.to_string()),
        },
    }
}

struct Polys {
    lv: LValues,
    r: RealPoly,
    p: RealPoly,
    q: RealPoly,
}

fn polys(f: &Eigenform, table: &GammaTable) -> Polys {
    let lv = LValues::from_table(f, table);
    let r = odd_period_polynomial(f, &lv);
    let p = normalized_p(f, &lv);
    let q = q_split(f, &lv);
    Polys { lv, r, p, q }
}

/// Every check on one eigenform.
pub fn verify_form(
    f: &Eigenform,
    form_index: usize,
    table: &GammaTable,
    annulus: &AnnulusRun,
) -> Result<FormReport, Error> {
    let start = Instant::now();
    let k = f.weight;
    let w = k as usize - 2;
    let prec = f.prec_bits;
    let mut dec = Decimal::new();
    let Polys { lv, r, p, q } = polys(f, table);

    let zr = zero_report(k, form_index, &r, &q)?;
    let zeros = ZeroSection {
        degree: r.degree(),
        trivial_residuals: zr
            .trivial
            .evaluations
            .iter()
            .chain(&zr.trivial.identities)
            .map(|c| TrivialResidual {
                label: c.label.to_string(),
                residual: dec.real(&c.residual),
                tolerance: dec.real(&c.tolerance),
                ok: c.ok,
            })
            .collect(),
        trivial_multiplicities: TRIVIAL_ZEROS
            .iter()
            .zip(&zr.trivial_found)
            .zip(TRIVIAL_LABELS)
            .map(|(((_, m), found), label)| TrivialMultiplicity { point: label.into(), expected: *m, found: *found })
            .collect(),
        circle_angles: dec.reals(&zr.circle_angles),
        n_circle_zeros: zr.n_circle_zeros,
        expected_circle_zeros: r.degree().saturating_sub(9),
        n_nontrivial: zr.n_nontrivial,
        max_modulus_deviation: dec.real(&zr.max_modulus_deviation),
        cross_validated: zr.cross_validated,
        empty_intervals: zr.empty_intervals.clone(),
        skipped_intervals: zr.skipped_intervals.clone(),
        lattice_hits: zr.lattice_hits.clone(),
        accounted: zr.accounted,
    };

    let tol = Real::pow2(-(prec as i64) / 2, prec);
    let fe = functional_equation_residual(f, table);
    let coc = check_cocycle_relations(&r, k as usize)?;
    let recon = reconstruction_residual(&p, &q, w, &sample_points(RECONSTRUCTION_POINTS, prec));
    let mult = multiplicativity_residual(f);
    let deligne = deligne_ratio(f);
    let self_reciprocal = is_self_reciprocal(&r, w);
    let central_value = (k % 4 == 2).then(|| {
        let rec = lv.get(k / 2);
        CentralValue {
            s: k / 2,
            value: dec.real(&rec.value),
            tail_bound: dec.real(&rec.tail_bound),
            ok: rec.value.abs() <= rec.tail_bound,
        }
    });
    let structure_passed = fe < tol
        && self_reciprocal
        && coc.max() < tol
        && recon < tol
        && mult < tol
        && deligne <= &Real::one(prec) + &tol
        && central_value.as_ref().is_none_or(|c| c.ok);
    let structure = StructureSection {
        tolerance: dec.real(&tol),
        functional_equation_residual: dec.real(&fe),
        self_reciprocal,
        cocycle_s: dec.real(&coc.s_relation),
        cocycle_u: dec.real(&coc.u_relation),
        reconstruction_residual: dec.real(&recon),
        multiplicativity_residual: dec.real(&mult),
        deligne_ratio: dec.real(&deligne),
        central_value,
        passed: structure_passed,
    };

    let bounds = check_lemma4_bounds(&lv);
    let near: Vec<_> = bounds.iter().filter_map(|(s, b, _)| b.map(|ok| (*s, ok))).collect();
    let size: Vec<_> = bounds.iter().filter_map(|(s, _, b)| b.map(|ok| (*s, ok))).collect();
    let near_one_violations: Vec<u32> = near.iter().filter(|x| !x.1).map(|x| x.0).collect();
    let size_violations: Vec<u32> = size.iter().filter(|x| !x.1).map(|x| x.0).collect();
    let lvalue_bounds = LValueBounds {
        s_min: k / 2,
        s_max: k - 1,
        near_one_checked: near.len(),
        size_checked: size.len(),
        passed: near_one_violations.is_empty() && size_violations.is_empty(),
        near_one_violations,
        size_violations,
    };

    let (sine_approximation, rouche) = if k >= SINE_REGIME_WEIGHT {
        let (s, r) = sine_regime(&q, annulus, &mut dec);
        (Some(s), Some(r))
    } else {
        (None, None)
    };

    let passed = zeros.accounted
        && structure.passed
        && lvalue_bounds.passed
        && sine_approximation.as_ref().is_none_or(|s| s.passed)
        && rouche.as_ref().is_none_or(|r| r.passed);
    Ok(FormReport {
        weight: k,
        form_index,
        field_degree: f.field_degree,
        t2_eigenvalue: dec.real(&f.t2_eigenvalue),
        prec_bits: prec,
        n_coeffs: f.n_coeffs(),
        n_terms: table.n_terms(),
        zeros,
        structure,
        lvalue_bounds,
        sine_approximation,
        rouche,
        passed,
        wall_time_s: seconds(start),
    })
}

/// `sup |sin 2πz - q(z)|` on `|z| = 5/4` and the comparison of
/// `q(z) - q(1/z)` against `S` on the annulus.
fn sine_regime(q: &RealPoly, annulus: &AnnulusRun, dec: &mut Decimal) -> (SineApproximation, RoucheSection) {
    let mut cx = Ctx::new(CONTOUR_PREC);
    let q128 = with_precision(q, CONTOUR_PREC);
    let radius = annulus.contour.radii[1].clone();
    let samples = annulus.contour.samples;
    let sup = sin_approx_sup(&q128, &radius, samples, &mut cx).expect("valid circle");
    let sine = SineApproximation {
        radius: dec.real(&radius),
        sup: dec.real(&sup.value),
        at: point(dec, &sup.at),
        threshold: float(SINE_THRESHOLD),
        passed: sup.value.to_f64() < SINE_THRESHOLD,
    };

    let qf = |z: &Complex, _: &mut Ctx| antisymmetric_part(&q128, z);
    let rep = rouche_against(&qf, &s_function, &annulus.contour, &annulus.min, annulus.winding.as_ref(), &mut cx);

    let prec = q.prec();
    let mut hp = Ctx::new(prec);
    let scale: Real = q.coeffs().iter().fold(Real::zero(prec), |a, c| a + c.abs());
    let tol = scale.ldexp(-(prec as i64) / 2);
    let zero = Real::zero(prec);
    let pi = hp.pi();
    let at_zero = q.eval(&hp.cis(&zero));
    let at_pi = q.eval(&hp.cis(&pi));
    let plus = q.eval(&Complex::from_f64(1.0, 0.0, prec)).abs();
    let minus = q.eval(&Complex::from_f64(-1.0, 0.0, prec)).abs();
    let small = |x: &Real| x <= &tol;
    let im0 = at_zero.im.abs();
    let impi = at_pi.im.abs();
    let winding_ok = rep.winding_f.as_ref().is_some_and(|w| w.count <= 10);
    let passed = rep.consistent() && winding_ok && small(&im0) && small(&impi) && small(&plus) && small(&minus);
    let rouche = RoucheSection {
        max_difference: dec.real(&rep.max_difference.value),
        max_difference_at: point(dec, &rep.max_difference.at),
        min_reference: dec.real(&rep.min_reference.value),
        verified: rep.verified,
        winding_q: rep.winding_f.as_ref().map(winding_record),
        winding_s: rep.winding_g.as_ref().map(winding_record),
        q_at_plus_one: dec.real(&plus),
        q_at_minus_one: dec.real(&minus),
        im_q_at_zero: dec.real(&im0),
        im_q_at_pi: dec.real(&impi),
        tolerance: dec.real(&tol),
        passed,
    };
    (sine, rouche)
}

fn failure(weight: u32, form_index: Option<usize>, e: &Error) -> Failure {
    Failure { weight, form_index, error: e.to_string() }
}

/// Eigenforms of weight `k` with the shared gamma table, or the reason there are none.
pub fn weight_setup(k: u32, config: &VerifyConfig) -> Result<Option<(Vec<Eigenform>, GammaTable)>, Error> {
    let prec = config.prec_for(k);
    let n = config.coeffs_for(k);
    let forms = match eigenforms(k, n, prec) {
        Ok(f) => f,
        Err(Error::NoCuspForms(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let n_terms = truncation_length(k, prec);
    if n_terms > n {
        return Err(Error::InsufficientCoefficients { s: 0, required: n_terms, available: n });
    }
    let table = GammaTable::new(k, n_terms, prec);
    Ok(Some((forms, table)))
}

fn verify_weight(k: u32, config: &VerifyConfig, annulus: &AnnulusRun) -> (WeightReport, Vec<Failure>) {
    let empty = |note: Option<String>| WeightReport { weight: k, dimension: 0, note, forms: Vec::new() };
    match weight_setup(k, config) {
        Ok(None) => (empty(Some("no cusp forms of this weight".into())), Vec::new()),
        Err(e) => (empty(Some(e.to_string())), vec![failure(k, None, &e)]),
        Ok(Some((forms, table))) => {
            let results: Vec<Result<FormReport, Error>> = forms
                .par_iter()
                .enumerate()
                .map(|(i, f)| verify_form(f, i, &table, annulus))
                .collect();
            let mut reports = Vec::new();
            let mut failures = Vec::new();
            for (i, r) in results.into_iter().enumerate() {
                match r {
                    Ok(rep) => reports.push(rep),
                    Err(e) => failures.push(failure(k, Some(i), &e)),
                }
            }
            (WeightReport { weight: k, dimension: forms.len(), note: None, forms: reports }, failures)
        }
    }
}

fn config_echo(config: &VerifyConfig) -> ConfigEcho {
    ConfigEcho {
        weights: config.weights.to_string(),
        prec_bits: config.prec_bits,
        n_coeffs: config.n_coeffs,
        contour_samples: config.contour_samples,
    }
}

/// The full pipeline over the configured weights.
pub fn verify(config: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let annulus = annulus_certificate(config.contour_samples);
    let per_weight: Vec<(WeightReport, Vec<Failure>)> = config
        .weights
        .weights()
        .par_iter()
        .map(|&k| verify_weight(k, config, &annulus))
        .collect();
    let mut weights = Vec::new();
    let mut failures = Vec::new();
    for (w, f) in per_weight {
        weights.push(w);
        failures.extend(f);
    }
    let n_forms = weights.iter().map(|w| w.dimension).sum();
    let n_passed = weights.iter().flat_map(|w| &w.forms).filter(|f| f.passed).count();
    let passed = annulus.report.passed && failures.is_empty() && n_passed == n_forms;
    VerifyReport {
        header: Header::new("periodpoly.verify"),
        config: config_echo(config),
        annulus: annulus.report,
        weights,
        failures,
        n_forms,
        n_passed,
        passed,
        wall_time_s: seconds(start),
    }
}

/// Root report for the period polynomial of the cusp form built from
/// Bernoulli numbers, with `n` even and `0 < n < w`.
pub fn bernoulli(n: usize, w: usize, prec: usize) -> Result<BernoulliReport, Error> {
    if n % 2 == 1 || n == 0 || n >= w {
        return Err(Error::InvalidParameters(format!("need n even with 0 < n < w, got n = {n}, w = {w}")));
    }
    let threshold = 1e-15;
    let p = bernoulli_period_polynomial(n, w, prec)?;
    let set = refine_all_roots(&p)?;
    let cls = classify_roots(&set, &TRIVIAL_ZEROS, threshold);
    let mut dec = Decimal::new();
    let one = Real::one(p.prec());
    let tol = -(p.prec() as f64) / 4.0;
    let label = |z: &Complex| {
        TRIVIAL_ZEROS.iter().zip(TRIVIAL_LABELS).find_map(|((t, _), l)| {
            let gap = (z - &Complex::from_f64(*t, 0.0, z.prec())).abs();
            (gap.is_zero() || gap.log2_abs() < tol).then(|| l.to_string())
        })
    };
    let roots = set
        .roots
        .iter()
        .map(|z| RootRecord {
            re: dec.real(&z.re),
            im: dec.real(&z.im),
            modulus_deviation: dec.real(&(z.abs() - &one).abs()),
            trivial: label(z),
        })
        .collect();
    Ok(BernoulliReport {
        header: Header::new("periodpoly.bernoulli"),
        n,
        w,
        prec_bits: p.prec(),
        coefficients: dec.reals(p.coeffs()),
        roots,
        n_trivial: cls.trivial_count(),
        n_nontrivial: cls.other.len(),
        n_on_circle: cls.n_circle,
        max_modulus_deviation: dec.real(&cls.max_modulus_deviation),
        threshold: float(threshold),
        passed: cls.n_circle == cls.other.len(),
    })
}

/// Hecke data for every weight in the range.
pub fn eigenform_listing(config: &VerifyConfig) -> EigenformsReport {
    let results: Vec<Result<Option<EigenformWeight>, Error>> = config
        .weights
        .weights()
        .par_iter()
        .map(|&k| {
            let prec = config.prec_for(k);
            let n = config.coeffs_for(k);
            let sys = match HeckeSystem::new(k, n) {
                Ok(s) => s,
                Err(Error::NoCuspForms(_)) => {
                    return Ok(Some(EigenformWeight {
                        weight: k,
                        dimension: 0,
                        t2_charpoly: vec!["1".into()],
                        prec_bits: prec,
                        n_coeffs: n,
                        forms: Vec::new(),
                    }))
                }
                Err(e) => return Err(e),
            };
            let forms = sys.eigenforms(n, prec)?;
            let mut dec = Decimal::new();
            let records = forms
                .iter()
                .enumerate()
                .map(|(i, f)| EigenformRecord {
                    form_index: i,
                    field_degree: f.field_degree,
                    t2_eigenvalue: dec.real(&f.t2_eigenvalue),
                    coefficients: dec.reals(&f.coeffs),
                    deligne_ratio: dec.real(&deligne_ratio(f)),
                    multiplicativity_residual: dec.real(&multiplicativity_residual(f)),
                })
                .collect();
            Ok(Some(EigenformWeight {
                weight: k,
                dimension: forms.len(),
                t2_charpoly: sys.charpoly.iter().map(|c| c.to_string()).collect(),
                prec_bits: prec,
                n_coeffs: n,
                forms: records,
            }))
        })
        .collect();
    let mut weights = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in config.weights.weights().into_iter().zip(results) {
        match r {
            Ok(Some(w)) => weights.push(w),
            Ok(None) => {}
            Err(e) => failures.push(failure(k, None, &e)),
        }
    }
    EigenformsReport { header: Header::new("periodpoly.eigenforms"), config: config_echo(config), weights, failures }
}

/// Critical values of every eigenform in the range.
pub fn lvalue_listing(config: &VerifyConfig) -> LValuesReport {
    let results: Vec<(u32, Result<Vec<LValueForm>, Error>)> = config
        .weights
        .weights()
        .par_iter()
        .map(|&k| {
            let forms = weight_setup(k, config).map(|setup| match setup {
                None => Vec::new(),
                Some((forms, table)) => forms
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let mut dec = Decimal::new();
                        let lv = LValues::from_table(f, &table);
                        LValueForm {
                            weight: k,
                            form_index: i,
                            prec_bits: f.prec_bits,
                            functional_equation_residual: dec.real(&functional_equation_residual(f, &table)),
                            values: lv
                                .records()
                                .iter()
                                .map(|r| LValueEntry {
                                    s: r.s,
                                    value: dec.real(&r.value),
                                    completed: dec.real(&r.completed),
                                    tail_bound: dec.real(&r.tail_bound),
                                    n_terms_used: r.n_terms_used,
                                    near_one_ok: r.bound1_ok,
                                    size_ok: r.bound2_ok,
                                })
                                .collect(),
                        }
                    })
                    .collect(),
            });
            (k, forms)
        })
        .collect();
    let mut forms = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in results {
        match r {
            Ok(f) => forms.extend(f),
            Err(e) => failures.push(failure(k, None, &e)),
        }
    }
    LValuesReport { header: Header::new("periodpoly.lvalues"), config: config_echo(config), forms, failures }
}

/// `r_f^-` for one form, for plotting.
pub fn period_polynomial_for(k: u32, form_index: usize, config: &VerifyConfig) -> Result<RealPoly, Error> {
    let (forms, table) = weight_setup(k, config)?.ok_or(Error::NoCuspForms(k))?;
    let f = forms.get(form_index).ok_or_else(|| {
        Error::InvalidParameters(format!("weight {k} has {} forms, no index {form_index}", forms.len()))
    })?;
    Ok(polys(f, &table).r)
}
