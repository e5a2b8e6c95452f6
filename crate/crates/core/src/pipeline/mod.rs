//! End-to-end verification runs on `C^n` with the circle action: the
//! appendix identities, the generalized Kähler suite and the reduction
//! oracles, each producing [`Check`] records collected in a [`Report`].
//!
//! Per-point work runs through [`crate::par`]; every point gets its own
//! seeded generator so results do not depend on scheduling.

pub mod config;
pub mod report;

mod appendix_suite;
mod gk_suite;
mod reduction_suite;

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::algebra::Scalar;
use crate::courant::{courant_bracket, project_onto, parse_section, Projection, TwistH};
use crate::error::{Error, Result};
use crate::gk::{deformed_frames, mc_residual, DeformedFrames, DeformedSource};
use crate::reduction::{MetricSource, Setup};

pub use config::{Action, Overrides, RunConfig};
pub use report::{timed, Check, Kind, Report, Status, Witness};

type C = Complex64;

/// Which suites to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Appendix,
    Reduction,
    Gk,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Appendix => "appendix",
            Suite::Reduction => "reduction",
            Suite::Gk => "gk",
        }
    }
}

/// Configuration plus lazily built deformed data shared by the suites.
pub struct Context {
    pub cfg: RunConfig,
    frames: OnceLock<std::result::Result<DeformedFrames, Error>>,
    source: OnceLock<Arc<DeformedSource>>,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        Context {
            cfg,
            frames: OnceLock::new(),
            source: OnceLock::new(),
        }
    }

    pub fn integrable(&self) -> bool {
        mc_residual(&self.cfg.deformation).is_zero()
    }

    /// Deformed frames of the configured deformation. Fails on a nonzero
    /// integrability residual unless the override is set.
    pub fn frames(&self) -> Result<&DeformedFrames> {
        self.frames
            .get_or_init(|| deformed_frames(&self.cfg.deformation, self.cfg.allow_nonintegrable))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn source(&self) -> Result<Arc<DeformedSource>> {
        let df = self.frames()?;
        Ok(self.source.get_or_init(|| Arc::new(DeformedSource::new(df))).clone())
    }

    /// The configured action over the given metric.
    pub fn setup(&self, source: Arc<dyn MetricSource>) -> Setup {
        let a = &self.cfg.action;
        Setup {
            source,
            h0: crate::calculus::Form::zero(self.cfg.n),
            gens: vec![(a.vector.clone(), a.xi.clone())],
            constraints: a.constraints.clone(),
        }
    }

    /// `count` seeded sphere points.
    pub fn points(&self, count: usize, salt: u64) -> Vec<Vec<C>> {
        crate::gk::sphere_samples(self.cfg.n, count, self.cfg.seed ^ salt, |_| 1.0)
    }
}

/// Generator for the `k`-th point of a sweep.
pub fn point_rng(seed: u64, salt: u64, k: usize) -> ChaCha8Rng {
    crate::sample::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt.rotate_left(17) ^ (k as u64).wrapping_mul(0x85eb_ca6b))
}

/// Largest and smallest per-point values of a sweep.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn max(&self) -> (f64, usize) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |acc, (k, v)| if v > acc.0 || v.is_nan() { (v, k) } else { acc })
    }

    pub fn min(&self) -> (f64, usize) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((f64::INFINITY, 0), |acc, (k, v)| if v < acc.0 || v.is_nan() { (v, k) } else { acc })
    }
}

/// Evaluates `f` at every point (in parallel when enabled).
pub fn sweep<F>(pts: &[Vec<C>], f: F) -> Result<Sweep>
where
    F: Fn(usize, &[C]) -> Result<f64> + Sync + Send,
{
    let vals = crate::par::map_range(pts.len(), |k| f(k, &pts[k]));
    Ok(Sweep {
        values: vals.into_iter().collect::<Result<_>>()?,
    })
}

/// Numeric check: the worst per-point residual must stay below `tol`.
pub fn sweep_check<F>(name: &str, formula: &str, pts: &[Vec<C>], tol: f64, seed: u64, f: F) -> Check
where
    F: Fn(usize, &[C]) -> Result<f64> + Sync + Send,
{
    timed(|| match sweep(pts, f) {
        Ok(s) => {
            let (worst, at) = s.max();
            Check::numeric(name, formula, worst, tol, seed).with_witnesses(vec![Witness::at(&pts[at], format!("{worst:e}"))])
        }
        Err(e) => Check::errored(name, formula, Kind::Numeric, &e),
    })
}

/// Negative control: the smallest per-point value must exceed `threshold`.
pub fn control_check<F>(name: &str, formula: &str, pts: &[Vec<C>], threshold: f64, seed: u64, f: F) -> Check
where
    F: Fn(usize, &[C]) -> Result<f64> + Sync + Send,
{
    timed(|| match sweep(pts, f) {
        Ok(s) => {
            let (least, at) = s.min();
            Check::exceeds(name, formula, least, threshold, seed).with_witnesses(vec![Witness::at(&pts[at], format!("{least:e}"))])
        }
        Err(e) => Check::errored(name, formula, Kind::Numeric, &e),
    })
}

/// Short text for a nonzero exact residual.
pub fn describe<T: std::fmt::Display>(x: &T) -> String {
    let s = x.to_string();
    if s.len() > 200 {
        format!("{}... ({} chars)", &s[..200], s.len())
    } else {
        s
    }
}

/// Relative difference `|a - b| / max(1, |a|)`.
pub fn rel_diff(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

/// Runs the requested suites.
pub fn run(suite: Suite, cfg: RunConfig) -> Result<Report> {
    let t = Instant::now();
    let mut report = Report::new(&format!("verify {}", suite.name()), &cfg);
    let ctx = Context::new(cfg);
    if matches!(suite, Suite::All | Suite::Appendix) {
        report.extend(appendix_suite::run(&ctx)?);
    }
    if matches!(suite, Suite::All | Suite::Gk) {
        report.extend(gk_suite::run(&ctx)?);
    }
    if matches!(suite, Suite::All | Suite::Reduction) {
        report.extend(reduction_suite::run(&ctx)?);
    }
    report.runtime_ms = t.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

pub use appendix_suite::run as appendix_checks;
pub use gk_suite::run as gk_checks;
pub use reduction_suite::run as reduction_checks;

/// Exact untwisted bracket of two sections in the expression syntax of
/// [`crate::courant::parse_section`], optionally split into its `V+` and
/// `V-` parts for the configured deformation.
pub fn bracket_text(ctx: &Context, lhs: &str, rhs: &str, project: bool) -> Result<String> {
    let n = ctx.cfg.n;
    let a = parse_section(lhs, n).map_err(|e| Error::Config(format!("left operand: {e}")))?;
    let b = parse_section(rhs, n).map_err(|e| Error::Config(format!("right operand: {e}")))?;
    let br = courant_bracket(&a, &b, &TwistH::zero(n));
    let mut out = format!("[{lhs}, {rhs}] = {br}\n");
    if project {
        let df = ctx.frames()?;
        for (label, sub, comp) in [("V+", df.v_plus(), df.v_minus()), ("V-", df.v_minus(), df.v_plus())] {
            match project_onto(&br, &sub, &comp, None)? {
                Projection::Exact(s) => out.push_str(&format!("{label} part = {s}\n")),
                Projection::Numeric(_) => unreachable!("no fallback point given"),
            }
        }
    }
    Ok(out)
}

/// The type-jumping locus of the configured deformation, with its
/// comparison against the cubic formulas.
pub fn type_locus_text(ctx: &Context) -> Result<String> {
    let d = &ctx.cfg.deformation;
    let chk = crate::gk::locus::check_locus(d)?;
    let ratio = |r: &Option<Scalar>| r.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "not proportional".into());
    Ok(match chk.locus {
        None => "no locus: the degree-0 part vanishes identically\n".into(),
        Some(p) => format!(
            "locus = {p}\nlocus / (z0 (f1 - f2) + z1 (f2 - f0) + z2 (f0 - f1)) = {}\nlocus / det(z; lambda f; g) = {}\n",
            ratio(&chk.displayed_ratio),
            ratio(&chk.general_ratio)
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_is_green() {
        let cfg = RunConfig::default_for(3).unwrap();
        let r = run(Suite::All, cfg).unwrap();
        eprintln!("{}", r.to_text());
        assert!(r.all_pass());
    }
}
