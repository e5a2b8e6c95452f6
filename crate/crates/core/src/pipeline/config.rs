//! Run configuration: a TOML file plus command-line overrides.
//!
//! ```toml
//! n = 3
//! seed = 7
//! points = 20
//! tolerance = 1e-9
//! lambda = "1/10"
//!
//! [action]
//! vector = ["i*z0", "i*z1", "i*z2", "-i*zb0", "-i*zb1", "-i*zb2"]
//! xi = ["0", "0", "0", "0", "0", "0"]
//! moment = "z0*zb0 + z1*zb1 + z2*zb2 - 1"
//! constraints = ["z0*zb0 + z1*zb1 + z2*zb2 - 1"]
//!
//! [deformation]
//! f = ["(z1 - z0)*(z2 - z0)", "(z0 - z1)*(z2 - z1)", "(z0 - z2)*(z1 - z2)"]
//! g = ["1", "1", "1"]
//! ```
//!
//! Every key is optional; the defaults are the ones shown. The vector part
//! lists the `d/dz_k` then the `d/dzb_k` components, `xi` the `dz_k` then the
//! `dzb_k` components.

use serde::Deserialize;

use crate::algebra::{parse_poly, parse_scalar, sphere_moment, Poly, RatFunc, Scalar};
use crate::calculus::{rotation_field, Form, VectorField};
use crate::error::{Error, Result};
use crate::gk::Deformation;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tolerance: Option<f64>,
    pub lambda: Option<String>,
    pub action: Option<ActionSpec>,
    pub deformation: Option<DeformationSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub vector: Option<Vec<String>>,
    pub xi: Option<Vec<String>>,
    pub moment: Option<String>,
    pub constraints: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationSpec {
    pub f: Vec<String>,
    pub g: Vec<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub lambda: Option<String>,
    pub allow_nonintegrable: bool,
}

/// The circle generator with its form part, moment map and the functions
/// cutting out the level set.
#[derive(Clone, Debug)]
pub struct Action {
    pub vector: VectorField,
    pub xi: Form,
    pub moment: Poly,
    pub constraints: Vec<Poly>,
}

impl Action {
    pub fn circle(n: usize) -> Self {
        let mu = sphere_moment(n);
        Action {
            vector: rotation_field(n),
            xi: Form::zero(n),
            moment: mu.clone(),
            constraints: vec![mu],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub lambda: Scalar,
    pub action: Action,
    pub deformation: Deformation,
    pub allow_nonintegrable: bool,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_POINTS: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_LAMBDA: &str = "1/10";

fn cfg_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{what}: {e}"))
}

fn polys(what: &str, src: &[String], n: usize, len: usize) -> Result<Vec<Poly>> {
    if src.len() != len {
        return Err(Error::Config(format!("{what} needs {len} entries, got {}", src.len())));
    }
    src.iter()
        .enumerate()
        .map(|(k, s)| parse_poly(s, n).map_err(|e| cfg_err(&format!("{what}[{k}]"), e)))
        .collect()
}

impl RunConfig {
    pub fn default_for(n: usize) -> Result<Self> {
        RunConfig::resolve(ConfigFile { n: Some(n), ..Default::default() }, &Overrides::default())
    }

    pub fn from_toml(text: &str, ov: &Overrides) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| cfg_err("config", e))?;
        RunConfig::resolve(file, ov)
    }

    pub fn load(path: &std::path::Path, ov: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(&path.display().to_string(), e))?;
        RunConfig::from_toml(&text, ov)
    }

    pub fn resolve(file: ConfigFile, ov: &Overrides) -> Result<Self> {
        let n = file.n.unwrap_or(3);
        if n == 0 || 2 * n > 12 {
            return Err(Error::Config(format!("unsupported dimension n = {n}")));
        }
        let lambda_text = ov.lambda.clone().or(file.lambda).unwrap_or_else(|| DEFAULT_LAMBDA.into());
        let lambda = parse_scalar(&lambda_text).map_err(|e| cfg_err("lambda", e))?;
        if lambda.is_zero() {
            return Err(Error::Config("lambda must be nonzero".into()));
        }
        let tol = ov.tol.or(file.tolerance).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }

        let mut action = Action::circle(n);
        if let Some(a) = file.action {
            if let Some(v) = a.vector {
                action.vector = VectorField::from_polys(n, polys("action.vector", &v, n, 2 * n)?);
            }
            if let Some(x) = a.xi {
                let c = polys("action.xi", &x, n, 2 * n)?;
                action.xi = Form::one_form(n, c.into_iter().map(RatFunc::from_poly).collect());
            }
            if let Some(m) = a.moment {
                action.moment = parse_poly(&m, n).map_err(|e| cfg_err("action.moment", e))?;
            }
            if let Some(c) = a.constraints {
                action.constraints = polys("action.constraints", &c, n, c.len())?;
            }
        }

        let deformation = match file.deformation {
            Some(d) => {
                let f = polys("deformation.f", &d.f, n, n)?;
                let g = polys("deformation.g", &d.g, n, n)?;
                Deformation::new(f, g, lambda.clone())?
            }
            None if n == 3 => Deformation::solution_ii(lambda.clone()),
            None => Deformation::undeformed(n).with_lambda(lambda.clone()),
        };

        Ok(RunConfig {
            n,
            seed: ov.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            points: ov.points.or(file.points).unwrap_or(DEFAULT_POINTS),
            tol,
            lambda,
            action,
            deformation,
            allow_nonintegrable: ov.allow_nonintegrable,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::from_toml("", &Overrides::default()).unwrap();
        assert_eq!((c.n, c.seed, c.points), (3, DEFAULT_SEED, DEFAULT_POINTS));
        assert_eq!(c.lambda, Scalar::from_ratio(1, 10));
        assert_eq!(c.deformation.f(), Deformation::solution_ii(c.lambda.clone()).f());
        assert_eq!(c.action.vector, rotation_field(3));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            seed: Some(99),
            lambda: Some("1/20".into()),
            ..Default::default()
        };
        let c = RunConfig::from_toml("seed = 1\nlambda = \"1/2\"", &ov).unwrap();
        assert_eq!(c.seed, 99);
        assert_eq!(c.lambda, Scalar::from_ratio(1, 20));
    }

    #[test]
    fn written_defaults_round_trip() {
        let text = r#"
            [action]
            vector = ["i*z0", "i*z1", "i*z2", "-i*zb0", "-i*zb1", "-i*zb2"]
            moment = "z0*zb0 + z1*zb1 + z2*zb2 - 1"
            [deformation]
            f = ["(z1 - z0)*(z2 - z0)", "(z0 - z1)*(z2 - z1)", "(z0 - z2)*(z1 - z2)"]
            g = ["1", "1", "1"]
        "#;
        let c = RunConfig::from_toml(text, &Overrides::default()).unwrap();
        let d = RunConfig::default_for(3).unwrap();
        assert_eq!(c.action.vector, d.action.vector);
        assert_eq!(c.action.moment, d.action.moment);
        assert_eq!(c.deformation.f(), d.deformation.f());
    }

    #[test]
    fn bad_input_is_rejected() {
        let ov = Overrides::default();
        assert!(RunConfig::from_toml("bogus = 1", &ov).is_err());
        assert!(RunConfig::from_toml("lambda = \"0\"", &ov).is_err());
        assert!(RunConfig::from_toml("[deformation]\nf = [\"z0\"]\ng = [\"1\",\"1\",\"1\"]", &ov).is_err());
        assert!(RunConfig::from_toml("[deformation]\nf = [\"z0 +\", \"0\", \"0\"]\ng = [\"1\",\"1\",\"1\"]", &ov).is_err());
    }
}
