//! JSON report types.
//!
//! Every floating value is a decimal string: multi-precision values carry all
//! their digits, `f64` values use the shortest round-trip form. Fields named
//! `wall_time_s` are the only ones that vary between identical runs.

use std::fs;
use std::io;
use std::path::Path;

use periodpoly_core::{Ctx, Real};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Decimal formatting of multi-precision values.
pub struct Decimal {
    cx: Ctx,
}

impl Decimal {
    pub fn new() -> Self {
        Decimal { cx: Ctx::new(64) }
    }

    pub fn real(&mut self, x: &Real) -> String {
        self.cx.to_decimal(x)
    }

    pub fn reals(&mut self, xs: &[Real]) -> Vec<String> {
        xs.iter().map(|x| self.real(x)).collect()
    }
}

impl Default for Decimal {
    fn default() -> Self {
        Self::new()
    }
}

pub fn float(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
}

impl Header {
    pub fn new(schema: &'static str) -> Self {
        Header { schema, schema_version: SCHEMA_VERSION, tool_version: TOOL_VERSION }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub weights: String,
    pub prec_bits: Option<usize>,
    pub n_coeffs: Option<usize>,
    pub contour_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Point {
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingRecord {
    pub count: i64,
    pub raw: String,
    pub snap_distance: String,
    pub evaluations: usize,
    pub error: Option<String>,
}

/// Winding and boundary minimum of `sin 2πz - sin(2π/z)` on `4/5 <= |z| <= 5/4`.
#[derive(Clone, Debug, Serialize)]
pub struct AnnulusCertificate {
    pub inner_radius: String,
    pub outer_radius: String,
    pub samples: usize,
    pub winding: WindingRecord,
    pub winding_doubled: WindingRecord,
    pub boundary_min: String,
    pub boundary_min_at: Point,
    pub boundary_min_doubled: String,
    pub passed: bool,
    pub wall_time_s: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSReport {
    #[serde(flatten)]
    pub header: Header,
    pub certificate: AnnulusCertificate,
    pub grid_csv: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialResidual {
    pub label: String,
    pub residual: String,
    pub tolerance: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialMultiplicity {
    pub point: String,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSection {
    pub degree: usize,
    pub trivial_residuals: Vec<TrivialResidual>,
    pub trivial_multiplicities: Vec<TrivialMultiplicity>,
    /// Bracketed zeros `e^{iθ}` from the interval scan, `θ` in `[0, 2π)`.
    pub circle_angles: Vec<String>,
    pub n_circle_zeros: usize,
    pub expected_circle_zeros: usize,
    pub n_nontrivial: usize,
    pub max_modulus_deviation: String,
    pub cross_validated: bool,
    pub empty_intervals: Vec<usize>,
    pub skipped_intervals: Vec<usize>,
    pub lattice_hits: Vec<usize>,
    pub accounted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralValue {
    pub s: u32,
    pub value: String,
    pub tail_bound: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureSection {
    /// `2^{-prec/2}`, the bound for the residuals below.
    pub tolerance: String,
    pub functional_equation_residual: String,
    pub self_reciprocal: bool,
    pub cocycle_s: String,
    pub cocycle_u: String,
    pub reconstruction_residual: String,
    pub multiplicativity_residual: String,
    pub deligne_ratio: String,
    pub central_value: Option<CentralValue>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LValueBounds {
    pub s_min: u32,
    pub s_max: u32,
    pub near_one_checked: usize,
    pub near_one_violations: Vec<u32>,
    pub size_checked: usize,
    pub size_violations: Vec<u32>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SineApproximation {
    pub radius: String,
    pub sup: String,
    pub at: Point,
    pub threshold: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoucheSection {
    pub max_difference: String,
    pub max_difference_at: Point,
    pub min_reference: String,
    pub verified: bool,
    pub winding_q: Option<WindingRecord>,
    pub winding_s: Option<WindingRecord>,
    /// `|q(1)|` and `|q(-1)|`.
    pub q_at_plus_one: String,
    pub q_at_minus_one: String,
    /// `|Im q(e^{iθ})|` at `θ = 0` and `θ = π`.
    pub im_q_at_zero: String,
    pub im_q_at_pi: String,
    pub tolerance: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormReport {
    pub weight: u32,
    pub form_index: usize,
    pub field_degree: usize,
    pub t2_eigenvalue: String,
    pub prec_bits: usize,
    pub n_coeffs: usize,
    pub n_terms: usize,
    pub zeros: ZeroSection,
    pub structure: StructureSection,
    pub lvalue_bounds: LValueBounds,
    pub sine_approximation: Option<SineApproximation>,
    pub rouche: Option<RoucheSection>,
    pub passed: bool,
    pub wall_time_s: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub weight: u32,
    pub form_index: Option<usize>,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightReport {
    pub weight: u32,
    pub dimension: usize,
    pub note: Option<String>,
    pub forms: Vec<FormReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub header: Header,
    pub config: ConfigEcho,
    pub annulus: AnnulusCertificate,
    pub weights: Vec<WeightReport>,
    pub failures: Vec<Failure>,
    pub n_forms: usize,
    pub n_passed: usize,
    pub passed: bool,
    pub wall_time_s: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootRecord {
    pub re: String,
    pub im: String,
    pub modulus_deviation: String,
    pub trivial: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BernoulliReport {
    #[serde(flatten)]
    pub header: Header,
    pub n: usize,
    pub w: usize,
    pub prec_bits: usize,
    pub coefficients: Vec<String>,
    pub roots: Vec<RootRecord>,
    pub n_trivial: usize,
    pub n_nontrivial: usize,
    pub n_on_circle: usize,
    pub max_modulus_deviation: String,
    pub threshold: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenformRecord {
    pub form_index: usize,
    pub field_degree: usize,
    pub t2_eigenvalue: String,
    pub coefficients: Vec<String>,
    pub deligne_ratio: String,
    pub multiplicativity_residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenformWeight {
    pub weight: u32,
    pub dimension: usize,
    pub t2_charpoly: Vec<String>,
    pub prec_bits: usize,
    pub n_coeffs: usize,
    pub forms: Vec<EigenformRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenformsReport {
    #[serde(flatten)]
    pub header: Header,
    pub config: ConfigEcho,
    pub weights: Vec<EigenformWeight>,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LValueEntry {
    pub s: u32,
    pub value: String,
    pub completed: String,
    pub tail_bound: String,
    pub n_terms_used: usize,
    pub near_one_ok: Option<bool>,
    pub size_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LValueForm {
    pub weight: u32,
    pub form_index: usize,
    pub prec_bits: usize,
    pub functional_equation_residual: String,
    pub values: Vec<LValueEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LValuesReport {
    #[serde(flatten)]
    pub header: Header,
    pub config: ConfigEcho,
    pub forms: Vec<LValueForm>,
    pub failures: Vec<Failure>,
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}
