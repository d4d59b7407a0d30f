//! Scenario files, the verification targets they request, and reports.
//!
//! A scenario names a variety over a finite field and, optionally, a normal
//! crossing compactification, Chow profiles and a regulator assembly. Each
//! target compares a zeta-side quantity against a Chow-side one computed
//! through independent code, using exact rationals only.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::abgroup::FGAbGroup;
use crate::chowcat::{
    chow_product_at, regulator_chi, smooth_proper_product, spadesuit_check, Catalog, Certification,
    ChowProfile, RegulatorAssembly,
};
use crate::ffield::Budget;
use crate::geometry::{counts_within_budget, BaseField, CountOptions, Variety, VarietySpec};
use crate::serial::rat_to_string;
use crate::weight::{
    build_snc_complex, localization_check, vanishing_audit, weight_homology, AuditEntry, Lambda,
    SNCConfig, SNCConfigData,
};
use crate::zeta::{
    reconstruct_rational, special_value, strip_sign_ppower, zeta_series, RationalFunctionQ, DEFAULT_GUARD,
};

pub const SCHEMA: u32 = 1;
pub const DEFAULT_MAX_N: u32 = 6;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: unsupported schema {found}, expected {SCHEMA}")]
    Schema { path: PathBuf, found: u32 },
}

/// How the two sides of an identity are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Equal absolute values.
    Sign,
    /// Equal after removing signs and powers of `p`.
    SignAndPPower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "statement", rename_all = "snake_case")]
pub enum Target {
    MainZero,
    NegativeR { r: i64 },
    SmoothProper,
    BaseChange { degree: u32, over_extension: VarietySpec },
    SncMultiplicativity,
    WeightVanishing {
        #[serde(default)]
        a1_product: bool,
    },
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::MainZero => write!(f, "main_zero"),
            Target::NegativeR { r } => write!(f, "negative_r({r})"),
            Target::SmoothProper => write!(f, "smooth_proper"),
            Target::BaseChange { degree, .. } => write!(f, "base_change({degree})"),
            Target::SncMultiplicativity => write!(f, "snc_multiplicativity"),
            Target::WeightVanishing { .. } => write!(f, "weight_vanishing"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SncSection {
    pub config: SNCConfigData,
    /// Each stratum as a variety over the base field, for zeta comparisons.
    #[serde(default)]
    pub strata: BTreeMap<String, VarietySpec>,
    /// Counts used for the strata, when they differ from the scenario's.
    #[serde(default)]
    pub max_n: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub base: BaseField,
    pub variety: VarietySpec,
    #[serde(default)]
    pub max_n: Option<u32>,
    #[serde(default)]
    pub geometrically_irreducible: bool,
    #[serde(default)]
    pub lambda: Lambda,
    #[serde(default)]
    pub regime: Option<Regime>,
    #[serde(default)]
    pub snc: Option<SncSection>,
    /// Catalog tag of the variety's own profile.
    #[serde(default)]
    pub profile: Option<String>,
    /// Catalog tags of the pieces of each weight-complex term.
    #[serde(default)]
    pub regulator: Option<Vec<Vec<String>>>,
    /// Profiles added to the bundled catalog for this scenario.
    #[serde(default)]
    pub profiles: Vec<ChowProfile>,
    #[serde(default)]
    pub targets: Vec<Target>,
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let sc = Scenario::from_json(&text).map_err(|source| InputError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        if sc.schema != SCHEMA {
            return Err(InputError::Schema {
                path: path.to_path_buf(),
                found: sc.schema,
            });
        }
        Ok(sc)
    }

    /// Sign-only for dimension at most 3 with integral coefficients.
    pub fn regime(&self) -> Regime {
        self.regime.unwrap_or(match self.lambda {
            Lambda::Z if self.variety.dim() <= 3 => Regime::Sign,
            _ => Regime::SignAndPPower,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Mismatch,
    Skipped,
    SpadesuitFailed,
    Error,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Mismatch | Verdict::SpadesuitFailed | Verdict::Error)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "MISMATCH",
            Verdict::Skipped => "skipped",
            Verdict::SpadesuitFailed => "(♠) failed",
            Verdict::Error => "ERROR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(&self.0))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rat_to_string(&self.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetReport {
    pub statement: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_stripped: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_stripped: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal_up_to_sign: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal_up_to_sign_and_p_power: Option<bool>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl TargetReport {
    fn new(statement: String, verdict: Verdict) -> Self {
        TargetReport {
            statement,
            verdict,
            reason: None,
            regime: None,
            lhs: None,
            rhs: None,
            lhs_stripped: None,
            rhs_stripped: None,
            equal_up_to_sign: None,
            equal_up_to_sign_and_p_power: None,
            details: Value::Null,
        }
    }

    fn with_reason(statement: String, verdict: Verdict, reason: impl Into<String>) -> Self {
        TargetReport {
            reason: Some(reason.into()),
            ..TargetReport::new(statement, verdict)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaSummary {
    #[serde(with = "crate::serial::bigint_vec")]
    pub counts: Vec<BigInt>,
    pub zeta: RationalFunctionQ,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaSummary>,
    pub targets: Vec<TargetReport>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        !self.targets.iter().any(|t| t.verdict.is_failure())
    }
}

/// Counts `N_1..N_max_n` within budget and recovers `Z` from them.
pub fn zeta_from_variety(variety: &Variety, max_n: u32, opts: &CountOptions) -> Result<ZetaSummary, String> {
    let counts = counts_within_budget(variety, max_n, opts).map_err(|e| format!("{e:?}"))?;
    let series = zeta_series(&counts).map_err(|e| format!("{e:?}"))?;
    let zeta = reconstruct_rational(&series, None, DEFAULT_GUARD).map_err(|e| format!("{e:?}"))?;
    Ok(ZetaSummary { counts, zeta })
}

fn compare(statement: String, lhs: BigRational, rhs: BigRational, p: u64, regime: Regime) -> TargetReport {
    let sign = lhs.abs() == rhs.abs();
    let (ls, rs) = match (strip_sign_ppower(&lhs, p), strip_sign_ppower(&rhs, p)) {
        (Ok(a), Ok(b)) => (Some(a), Some(b)),
        _ => (None, None),
    };
    let pp = ls.is_some() && ls == rs;
    let ok = match regime {
        Regime::Sign => sign,
        Regime::SignAndPPower => pp,
    };
    TargetReport {
        regime: Some(regime),
        lhs: Some(Rat(lhs)),
        rhs: Some(Rat(rhs)),
        lhs_stripped: ls.map(Rat),
        rhs_stripped: rs.map(Rat),
        equal_up_to_sign: Some(sign),
        equal_up_to_sign_and_p_power: Some(pp),
        ..TargetReport::new(statement, if ok { Verdict::Match } else { Verdict::Mismatch })
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    catalog: Catalog,
    opts: CountOptions,
    zeta: Result<ZetaSummary, String>,
    snc: Option<Result<SNCConfig, String>>,
}

impl Context<'_> {
    fn max_n(&self) -> u32 {
        self.scenario.max_n.unwrap_or(DEFAULT_MAX_N)
    }

    fn profile(&self, tag: &str) -> Result<ChowProfile, String> {
        self.scenario
            .profiles
            .iter()
            .find(|p| p.tag() == tag)
            .cloned()
            .map(Ok)
            .unwrap_or_else(|| self.catalog.get(tag).cloned().map_err(|e| e.to_string()))
            .map(|p| p.with_lambda(self.scenario.lambda))
    }

    fn own_profile(&self) -> Result<ChowProfile, String> {
        let tag = self.scenario.profile.as_deref().ok_or("scenario names no profile")?;
        self.profile(tag)
    }

    fn assembly(&self) -> Result<RegulatorAssembly, String> {
        let dim = self.scenario.variety.dim();
        match &self.scenario.regulator {
            Some(terms) => {
                let terms = terms
                    .iter()
                    .map(|t| t.iter().map(|tag| self.profile(tag)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                RegulatorAssembly::new(dim, terms).map_err(|e| format!("{e:?}"))
            }
            None => {
                let p = self.own_profile().map_err(|_| "no regulator assembly or profile".to_string())?;
                RegulatorAssembly::new(dim, vec![vec![p]]).map_err(|e| format!("{e:?}"))
            }
        }
    }

    fn snc(&self) -> Result<&SNCConfig, String> {
        match &self.snc {
            None => Err("scenario has no normal crossing data".into()),
            Some(Err(e)) => Err(e.clone()),
            Some(Ok(c)) => Ok(c),
        }
    }

    fn weight_homology(&self) -> Option<Vec<FGAbGroup>> {
        let cfg = self.snc().ok()?;
        build_snc_complex(cfg, self.scenario.lambda).ok().map(|w| weight_homology(&w))
    }

    fn q(&self) -> BigInt {
        self.scenario.base.q()
    }

    fn p(&self) -> u64 {
        self.scenario.base.p
    }
}

/// Errors that come from malformed data rather than a failed identity.
fn needs_data(e: &str) -> bool {
    e.starts_with("scenario has no") || e.starts_with("scenario names no") || e.starts_with("no regulator")
}

fn failed(statement: String, e: String) -> TargetReport {
    let verdict = if needs_data(&e) { Verdict::Skipped } else { Verdict::Error };
    TargetReport::with_reason(statement, verdict, e)
}

fn main_zero(cx: &Context, statement: String) -> Result<TargetReport, String> {
    let assembly = cx.assembly()?;
    let homology = cx.weight_homology();
    let spade = spadesuit_check(&assembly, homology.as_deref());
    match spade.status {
        Certification::Failed => {
            let mut r = TargetReport::with_reason(statement, Verdict::SpadesuitFailed, "regulator not rationally surjective");
            r.details = json!({ "spadesuit": spade });
            return Ok(r);
        }
        Certification::Undeterminable => {
            let mut r = TargetReport::with_reason(statement, Verdict::Skipped, "(♠) cannot be decided from the data");
            r.details = json!({ "spadesuit": spade });
            return Ok(r);
        }
        Certification::Satisfied => {}
    }
    let z = &cx.zeta.as_ref().map_err(Clone::clone)?.zeta;
    let lv = special_value(z, &cx.q(), 0).map_err(|e| format!("{e:?}"))?;
    let reg = regulator_chi(&assembly, cx.scenario.lambda).map_err(|e| format!("{e:?}"))?;
    let mut r = compare(statement, lv.leading.clone(), reg.product.clone(), cx.p(), cx.scenario.regime());
    if cx.scenario.geometrically_irreducible && lv.order != -1 {
        r.verdict = Verdict::Mismatch;
        r.reason = Some(format!("pole order at t = 1 is {} rather than 1", -lv.order));
    }
    r.details = json!({ "laurent": lv, "regulator": reg, "spadesuit": spade });
    Ok(r)
}

fn negative_r(cx: &Context, statement: String, r: i64) -> Result<TargetReport, String> {
    if r >= 0 {
        return Err(format!("r = {r} is not negative"));
    }
    let profile = cx.own_profile()?;
    let z = &cx.zeta.as_ref().map_err(Clone::clone)?.zeta;
    let lv = special_value(z, &cx.q(), r).map_err(|e| format!("{e:?}"))?;
    let rhs = chow_product_at(&profile, r).map_err(|e| format!("{e:?}"))?;
    let mut out = compare(statement, lv.leading.clone(), rhs, cx.p(), cx.scenario.regime());
    out.details = json!({ "laurent": lv, "profile": profile.tag() });
    Ok(out)
}

fn smooth_proper(cx: &Context, statement: String) -> Result<TargetReport, String> {
    let profile = cx.own_profile()?;
    if profile.components().len() != 1 || profile.components()[0].constant_field_degree != 1 {
        return Ok(TargetReport::with_reason(
            statement,
            Verdict::Skipped,
            "profile is not geometrically connected",
        ));
    }
    let z = &cx.zeta.as_ref().map_err(Clone::clone)?.zeta;
    let lv = special_value(z, &cx.q(), 0).map_err(|e| format!("{e:?}"))?;
    let rhs = smooth_proper_product(&profile).map_err(|e| format!("{e:?}"))?;
    let mut out = compare(statement, lv.leading.clone(), rhs, cx.p(), cx.scenario.regime());
    out.details = json!({ "laurent": lv, "profile": profile.tag() });
    Ok(out)
}

fn base_change_target(cx: &Context, statement: String, degree: u32, over: &VarietySpec) -> Result<TargetReport, String> {
    if degree == 0 {
        return Err("degree must be positive".into());
    }
    let base = cx.scenario.base;
    let ext = BaseField::new(base.p, base.e * degree).map_err(|e| format!("{e:?}"))?;
    let over_k = &cx.zeta.as_ref().map_err(Clone::clone)?.zeta;
    let variety = Variety::new(ext, over.clone()).map_err(|e| format!("{e:?}"))?;
    let over_big = zeta_from_variety(&variety, cx.max_n(), &cx.opts)?;
    let functional = over_big.zeta.base_change(degree as usize).map_err(|e| format!("{e:?}"))?;
    let functional_ok = &functional == over_k;
    let lk = special_value(over_k, &base.q(), 0).map_err(|e| format!("{e:?}"))?;
    let lbig = special_value(&over_big.zeta, &ext.q(), 0).map_err(|e| format!("{e:?}"))?;
    // Z_k(t) = Z_K(t^e) and t^e - 1 = e (t - 1) + ..., so the leading
    // coefficients differ by e^{-order}
    let e = BigRational::from_integer(BigInt::from(degree));
    let factor = if lk.order <= 0 {
        num_traits::pow(e, (-lk.order) as usize)
    } else {
        num_traits::pow(e, lk.order as usize).recip()
    };
    let rhs = factor * &lk.leading;
    let exact = lbig.leading == rhs;
    let mut out = TargetReport::new(
        statement,
        if exact && functional_ok { Verdict::Match } else { Verdict::Mismatch },
    );
    if !functional_ok {
        out.reason = Some("Z over the base is not Z over the extension at t^degree".into());
    }
    out.lhs = Some(Rat(lbig.leading.clone()));
    out.rhs = Some(Rat(rhs));
    out.details = json!({
        "zeta_over_base": over_k,
        "zeta_over_extension": over_big.zeta,
        "functional_equation": functional_ok,
        "laurent_over_base": lk,
        "laurent_over_extension": lbig,
    });
    Ok(out)
}

fn snc_multiplicativity(cx: &Context, statement: String) -> Result<TargetReport, String> {
    let cfg = cx.snc()?;
    let section = cx.scenario.snc.as_ref().expect("checked by snc()");
    let strata = &section.strata;
    let max_n = section.max_n.unwrap_or(cx.max_n());
    let z_u = &cx.zeta.as_ref().map_err(Clone::clone)?.zeta;
    let mut product = RationalFunctionQ::one();
    let mut descent = BigRational::one();
    let mut per_level = Vec::new();
    for (a, level) in cfg.levels().iter().enumerate() {
        let mut level_z = RationalFunctionQ::one();
        for id in level {
            let spec = strata
                .get(id)
                .ok_or_else(|| format!("scenario has no variety for stratum {id:?}"))?;
            let v = Variety::new(cx.scenario.base, spec.clone()).map_err(|e| format!("{e:?}"))?;
            level_z = level_z.mul(&zeta_from_variety(&v, max_n, &cx.opts)?.zeta);
        }
        let lv = special_value(&level_z, &cx.q(), 0).map_err(|e| format!("{e:?}"))?;
        let sign = if a % 2 == 0 { 1 } else { -1 };
        product = product.mul(&level_z.powi(sign).ok_or("zero zeta function")?);
        descent *= if sign > 0 { lv.leading.clone() } else { lv.leading.recip() };
        per_level.push(json!({ "level": a, "zeta": level_z, "laurent": lv }));
    }
    let equal = &product == z_u;
    let lu = special_value(z_u, &cx.q(), 0).map_err(|e| format!("{e:?}"))?;
    let mut out = compare(statement, lu.leading.clone(), descent, cx.p(), Regime::Sign);
    if !equal {
        out.verdict = Verdict::Mismatch;
        out.reason = Some("Z_U differs from the alternating product over strata".into());
    }
    out.details = json!({ "zeta_u": z_u, "alternating_product": product, "levels": per_level, "rational_functions_equal": equal });
    Ok(out)
}

fn weight_vanishing(cx: &Context, statement: String, a1_product: bool) -> Result<TargetReport, String> {
    let cfg = cx.snc()?;
    let lambda = cx.scenario.lambda;
    let w = build_snc_complex(cfg, lambda).map_err(|e| format!("{e:?}"))?;
    let homology = weight_homology(&w);
    let loc = localization_check(cfg, lambda).map_err(|e| format!("{e:?}"))?;
    let audit = vanishing_audit(&[AuditEntry {
        label: cx.scenario.name.clone(),
        dim: cfg.dim(),
        homology: homology.clone(),
        a1_product,
    }]);
    let ok = audit.passed() && loc.is_exact() && loc.matches_direct;
    let mut out = TargetReport::new(statement, if ok { Verdict::Match } else { Verdict::Mismatch });
    if !ok {
        out.reason = Some(if !audit.passed() {
            "weight homology fails to vanish".into()
        } else {
            format!("localization sequence inexact in degrees {:?}", loc.inexact_degrees)
        });
    }
    out.details = json!({
        "lambda": lambda,
        "homology": homology.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "localization": loc,
        "audit": audit,
    });
    Ok(out)
}

pub fn verify_scenario(scenario: &Scenario, opts: &CountOptions) -> ScenarioReport {
    let zeta = Variety::new(scenario.base, scenario.variety.clone())
        .map_err(|e| format!("{e:?}"))
        .and_then(|v| zeta_from_variety(&v, scenario.max_n.unwrap_or(DEFAULT_MAX_N), opts));
    let snc = scenario
        .snc
        .as_ref()
        .map(|s| s.config.clone().build().map_err(|e| format!("{e:?}")));
    let mut catalog = Catalog::bundled();
    if !scenario.profiles.is_empty() {
        let mut all = scenario.profiles.clone();
        all.extend(catalog.profiles().iter().cloned());
        catalog = Catalog::from_profiles(all);
    }
    let cx = Context {
        scenario,
        catalog,
        opts: *opts,
        zeta,
        snc,
    };
    let targets = scenario
        .targets
        .iter()
        .map(|t| {
            let statement = t.to_string();
            let res = match t {
                Target::MainZero => main_zero(&cx, statement.clone()),
                Target::NegativeR { r } => negative_r(&cx, statement.clone(), *r),
                Target::SmoothProper => smooth_proper(&cx, statement.clone()),
                Target::BaseChange { degree, over_extension } => {
                    base_change_target(&cx, statement.clone(), *degree, over_extension)
                }
                Target::SncMultiplicativity => snc_multiplicativity(&cx, statement.clone()),
                Target::WeightVanishing { a1_product } => weight_vanishing(&cx, statement.clone(), *a1_product),
            };
            res.unwrap_or_else(|e| failed(statement, e))
        })
        .collect();
    ScenarioReport {
        schema: SCHEMA,
        name: scenario.name.clone(),
        zeta: cx.zeta.ok(),
        targets,
    }
}

pub fn count_options() -> CountOptions {
    CountOptions::with_budget(Budget::from_env())
}

/// Verifies scenarios on `jobs` threads; reports come back in input order.
pub fn verify_all(scenarios: &[Scenario], jobs: usize, opts: &CountOptions) -> Vec<ScenarioReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| scenarios.par_iter().map(|s| verify_scenario(s, opts)).collect())
}

/// Fixed-width summary, one line per target.
pub fn render_table(reports: &[ScenarioReport]) -> String {
    let mut rows = vec![[
        "scenario".to_string(),
        "target".to_string(),
        "verdict".to_string(),
        "lhs".to_string(),
        "rhs".to_string(),
    ]];
    for r in reports {
        for t in &r.targets {
            let show = |x: &Option<Rat>| x.as_ref().map_or("-".to_string(), ToString::to_string);
            let verdict = match &t.reason {
                Some(reason) if t.verdict != Verdict::Match => format!("{} ({reason})", t.verdict),
                _ => t.verdict.to_string(),
            };
            rows.push([r.name.clone(), t.statement.clone(), verdict, show(&t.lhs), show(&t.rhs)]);
        }
    }
    let widths: Vec<usize> = (0..4)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c < 4 {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// 0 when every non-skipped target matches, 1 otherwise.
pub fn exit_code(reports: &[ScenarioReport]) -> i32 {
    if reports.iter().all(ScenarioReport::passed) {
        0
    } else {
        1
    }
}
