//! Experiment configuration: the flat `key = value` file format and the
//! compact spelling of forecaster and bootstrap specs shared with the CLI.

use std::path::{Path, PathBuf};

use crate::bootstrap::{BootstrapSpec, InnerScheme, Scheme};
use crate::error::{Error, Result};
use crate::forecasters::{ArMethod, ArOrder, Criterion, ForecasterSpec, Param};
use crate::regions::{Method, SigmaMode, DEFAULT_INNER_REPLICATES};

/// Largest order tried by `ar(auto)`.
pub const DEFAULT_MAX_AR_ORDER: usize = 10;

/// The rolling-window protocol. `replicates` and `seed` have no defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub window_len: usize,
    pub step: usize,
    pub n_windows: usize,
    pub horizons: Vec<usize>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub forecaster: ForecasterSpec,
    pub bootstrap: BootstrapSpec,
    pub sigma_mode: SigmaMode,
    pub seed: u64,
    /// Per-window point forecasts (`window,h,point` CSV) that replace the
    /// forecaster's central path; errors are still bootstrapped.
    pub external: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        let forecaster = ForecasterSpec::Ar {
            order: ArOrder::Auto {
                max: DEFAULT_MAX_AR_ORDER,
                criterion: Criterion::Aic,
            },
            d: 0,
            seasonal_d: 0,
            period: 0,
            method: ArMethod::YuleWalker,
        };
        Self {
            window_len: 2245,
            step: 10,
            n_windows: 100,
            horizons: vec![6, 12, 18, 24],
            ks: vec![1, 2, 3],
            alphas: vec![0.1, 0.2, 0.3],
            replicates,
            methods: vec![Method::Kfwe, Method::Bonferroni],
            forecaster,
            bootstrap: BootstrapSpec::new(Scheme::ModelBased(forecaster)),
            sigma_mode: SigmaMode::Shared,
            seed,
            external: None,
        }
    }

    pub fn max_horizon(&self) -> usize {
        self.horizons.iter().copied().max().unwrap_or(0)
    }

    /// Observations needed: the last window's training slice plus its truth.
    pub fn needed_len(&self) -> usize {
        self.window_len + self.n_windows.saturating_sub(1) * self.step + self.max_horizon()
    }

    pub fn validate(&self, series_len: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n_windows == 0 || self.step == 0 || self.window_len == 0 {
            return bad("window_len, step and n_windows must be positive");
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return bad("H must list positive horizons");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("k must list positive values");
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return bad("alpha values must lie in (0, 1)");
        }
        if self.methods.is_empty() {
            return bad("no methods configured");
        }
        if self.replicates < 2 {
            return bad("B must be at least 2");
        }
        let needed = self.needed_len();
        if needed > series_len {
            return Err(Error::ConfigTooLargeForSeries {
                needed,
                len: series_len,
            });
        }
        Ok(())
    }

    /// Reads a config file; a relative `external` path resolves against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(ext), Some(dir)) = (&cfg.external, path.parent()) {
            if ext.is_relative() {
                cfg.external = Some(dir.join(ext));
            }
        }
        Ok(cfg)
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// `B` and `seed` are required, unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if entries.iter().any(|(_, k, _)| *k == key) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            entries.push((line, key, value.trim()));
        }
        let find = |key: &str| entries.iter().find(|(_, k, _)| *k == key).map(|(l, _, v)| (*l, *v));
        let required = |key: &str| {
            find(key).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing required key `{key}`"),
            })
        };

        let (line, v) = required("B")?;
        let replicates = scalar(line, v)?;
        let (line, v) = required("seed")?;
        let seed = scalar(line, v)?;
        let mut cfg = Self::new(replicates, seed);

        let mut explicit_bootstrap = false;
        let mut inner = DEFAULT_INNER_REPLICATES;
        let mut double = false;
        let mut jitter = 0.0;
        for &(line, key, value) in &entries {
            let at = |e: Error| Error::Parse {
                line,
                message: e.to_string(),
            };
            match key {
                "B" | "seed" => {}
                "window_len" => cfg.window_len = scalar(line, value)?,
                "step" => cfg.step = scalar(line, value)?,
                "n_windows" => cfg.n_windows = scalar(line, value)?,
                "H" => cfg.horizons = list(line, value)?,
                "k" => cfg.ks = list(line, value)?,
                "alpha" => cfg.alphas = list(line, value)?,
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(|m| m.trim().parse())
                        .collect::<Result<_>>()
                        .map_err(at)?
                }
                "forecaster" => cfg.forecaster = parse_forecaster(value).map_err(at)?,
                "bootstrap" => explicit_bootstrap = true,
                "sigma" => {
                    double = match value {
                        "shared" => false,
                        "double" => true,
                        _ => {
                            return Err(Error::Parse {
                                line,
                                message: format!("sigma must be `shared` or `double`, got `{value}`"),
                            })
                        }
                    }
                }
                "inner" => inner = scalar(line, value)?,
                "jitter" => jitter = scalar(line, value)?,
                "external" => cfg.external = Some(PathBuf::from(value)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        // the bootstrap spelling `model` needs the final forecaster
        if explicit_bootstrap {
            let (line, v) = required("bootstrap")?;
            cfg.bootstrap = parse_bootstrap(v, &cfg.forecaster).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        } else {
            cfg.bootstrap = BootstrapSpec::new(Scheme::ModelBased(cfg.forecaster));
        }
        cfg.bootstrap = cfg.bootstrap.with_smoothing(jitter);
        if double {
            cfg.sigma_mode = SigmaMode::Double { inner };
        }
        Ok(cfg)
    }
}

fn scalar<T: std::str::FromStr>(line: usize, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| Error::Parse {
        line,
        message: format!("`{v}`: {e}"),
    })
}

fn list<T: std::str::FromStr>(line: usize, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|x| scalar(line, x.trim())).collect()
}

/// Splits `name(a, b(c))` into `name` and its top-level arguments.
fn split_call(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::InvalidArgument(format!("unbalanced parentheses in `{s}`")))?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::InvalidArgument(format!("unbalanced parentheses in `{s}`")));
        }
    }
    if depth != 0 {
        return Err(Error::InvalidArgument(format!("unbalanced parentheses in `{s}`")));
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    Ok((s[..open].trim(), args))
}

fn number<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a valid number")))
}

fn param(s: &str) -> Result<Param> {
    if s == "auto" {
        Ok(Param::Auto)
    } else {
        number(s).map(Param::Fixed)
    }
}

fn arity(name: &str, args: &[&str], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "`{name}` takes {allowed:?} arguments, got {}",
            args.len()
        )))
    }
}

/// Parses a forecaster spelling:
///
/// ```text
/// ses | ses(α)            holt | holt(α, β)
/// hw(m) | hw(m, α, β, γ)  ar(p) | arima(p, d) | sarima(p, d, D, m)
/// ```
///
/// Smoothing parameters may be `auto`; `p` may be `auto` (AIC over
/// `0..=10`). AR-family specs take an optional trailing `ols` or `yw`
/// (the default).
pub fn parse_forecaster(s: &str) -> Result<ForecasterSpec> {
    let (name, mut args) = split_call(s)?;
    match name {
        "ses" => {
            arity(name, &args, &[0, 1])?;
            Ok(ForecasterSpec::Ses {
                alpha: args.first().map_or(Ok(Param::Auto), |a| param(a))?,
            })
        }
        "holt" => {
            arity(name, &args, &[0, 2])?;
            let p = |i: usize| args.get(i).map_or(Ok(Param::Auto), |a| param(a));
            Ok(ForecasterSpec::Holt {
                alpha: p(0)?,
                beta: p(1)?,
            })
        }
        "hw" => {
            arity(name, &args, &[1, 4])?;
            let p = |i: usize| args.get(i).map_or(Ok(Param::Auto), |a| param(a));
            Ok(ForecasterSpec::HoltWinters {
                alpha: p(1)?,
                beta: p(2)?,
                gamma: p(3)?,
                period: number(args[0])?,
            })
        }
        "ar" | "arima" | "sarima" => {
            let method = match args.last() {
                Some(&"ols") => Some(ArMethod::Ols),
                Some(&"yw") => Some(ArMethod::YuleWalker),
                _ => None,
            };
            if method.is_some() {
                args.pop();
            }
            let expected = match name {
                "ar" => 1,
                "arima" => 2,
                _ => 4,
            };
            arity(name, &args, &[expected])?;
            let order = if args[0] == "auto" {
                ArOrder::Auto {
                    max: DEFAULT_MAX_AR_ORDER,
                    criterion: Criterion::Aic,
                }
            } else {
                ArOrder::Fixed(number(args[0])?)
            };
            let at = |i: usize| args.get(i).map_or(Ok(0), |a| number(a));
            Ok(ForecasterSpec::Ar {
                order,
                d: at(1)?,
                seasonal_d: at(2)?,
                period: at(3)?,
                method: method.unwrap_or(ArMethod::YuleWalker),
            })
        }
        _ => Err(Error::InvalidArgument(format!("unknown forecaster `{s}`"))),
    }
}

fn block(args: &[&str]) -> Result<Option<usize>> {
    args.first().map(|a| number(a)).transpose()
}

/// Parses a bootstrap spelling:
///
/// ```text
/// model | mbb | mbb(l) | cbb | cbb(l) | bob(outer, inner)
/// stationary(mean) | sieve | sieve(p)
/// decomposed(m) | decomposed(m, mbb(l)) | decomposed(m, stationary(mean))
/// ```
///
/// `model` simulates from `forecaster`. Omitted block lengths use the
/// `round(T^{1/3})` default.
pub fn parse_bootstrap(s: &str, forecaster: &ForecasterSpec) -> Result<BootstrapSpec> {
    let (name, args) = split_call(s)?;
    let scheme = match name {
        "model" => {
            arity(name, &args, &[0])?;
            Scheme::ModelBased(*forecaster)
        }
        "mbb" => {
            arity(name, &args, &[0, 1])?;
            Scheme::MovingBlock {
                block_len: block(&args)?,
            }
        }
        "cbb" => {
            arity(name, &args, &[0, 1])?;
            Scheme::CircularBlock {
                block_len: block(&args)?,
            }
        }
        "bob" => {
            arity(name, &args, &[2])?;
            Scheme::BlockOfBlocks {
                outer: number(args[0])?,
                inner: number(args[1])?,
            }
        }
        "stationary" => {
            arity(name, &args, &[1])?;
            Scheme::Stationary {
                mean_block: number(args[0])?,
            }
        }
        "sieve" => {
            arity(name, &args, &[0, 1])?;
            Scheme::Sieve {
                order: block(&args)?,
            }
        }
        "decomposed" => {
            arity(name, &args, &[1, 2])?;
            let inner = match args.get(1) {
                None => InnerScheme::MovingBlock { block_len: None },
                Some(spec) => match split_call(spec)? {
                    ("mbb", a) if a.len() <= 1 => InnerScheme::MovingBlock {
                        block_len: block(&a)?,
                    },
                    ("stationary", a) if a.len() == 1 => InnerScheme::Stationary {
                        mean_block: number(a[0])?,
                    },
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "decomposed inner scheme must be mbb or stationary, got `{spec}`"
                        )))
                    }
                },
            };
            Scheme::DecomposedBlock {
                period: number(args[0])?,
                inner,
            }
        }
        _ => return Err(Error::InvalidArgument(format!("unknown bootstrap `{s}`"))),
    };
    Ok(BootstrapSpec::new(scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "B = 200\nseed = 9\n";

    #[test]
    fn defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!((c.window_len, c.step, c.n_windows), (2245, 10, 100));
        assert_eq!((c.replicates, c.seed), (200, 9));
        assert_eq!(c.needed_len(), 2245 + 99 * 10 + 24);
        assert!(matches!(c.bootstrap.scheme, Scheme::ModelBased(f) if f == c.forecaster));
    }

    #[test]
    fn full_file() {
        let text = "\
# comment line
B = 1000
seed = 3   # trailing comment
window_len = 500
step = 5
n_windows = 20
H = 6, 12
k = 1,2
alpha = 0.1
methods = kfwe, scheffe, np
forecaster = sarima(2, 0, 1, 30, ols)
bootstrap = decomposed(30, stationary(8))
sigma = double
inner = 40
jitter = 0.5
external = points.csv
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.horizons, vec![6, 12]);
        assert_eq!(c.ks, vec![1, 2]);
        assert_eq!(c.methods, vec![Method::Kfwe, Method::Scheffe, Method::Np]);
        assert_eq!(
            c.forecaster,
            ForecasterSpec::Ar {
                order: ArOrder::Fixed(2),
                d: 0,
                seasonal_d: 1,
                period: 30,
                method: ArMethod::Ols
            }
        );
        assert_eq!(
            c.bootstrap.scheme,
            Scheme::DecomposedBlock {
                period: 30,
                inner: InnerScheme::Stationary { mean_block: 8.0 }
            }
        );
        assert_eq!(c.bootstrap.smoothing_noise_sd, 0.5);
        assert_eq!(c.sigma_mode, SigmaMode::Double { inner: 40 });
        assert_eq!(c.external, Some(PathBuf::from("points.csv")));
        assert_eq!(c.needed_len(), 500 + 19 * 5 + 12);
    }

    #[test]
    fn model_bootstrap_follows_forecaster_in_any_order() {
        let c = ExperimentConfig::parse("bootstrap = model\nforecaster = ses(0.4)\nB = 5\nseed = 1").unwrap();
        assert_eq!(c.bootstrap.scheme, Scheme::ModelBased(c.forecaster));
    }

    #[test]
    fn parse_errors_carry_lines() {
        for (text, line) in [
            ("seed = 1\n", 0),
            ("B = 10\n", 0),
            ("B = 10\nseed = 1\nfoo = 3\n", 3),
            ("B = 10\nseed = x\n", 2),
            ("B = 10\nseed = 1\nno equals sign\n", 3),
            ("B = 10\nB = 11\nseed = 1\n", 2),
            ("B = 10\nseed = 1\nmethods = kfwe, magic\n", 3),
            ("B = 10\nseed = 1\nsigma = triple\n", 3),
        ] {
            match ExperimentConfig::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new(100, 1);
        assert!(c.validate(c.needed_len()).is_ok());
        assert!(matches!(
            c.validate(c.needed_len() - 1),
            Err(Error::ConfigTooLargeForSeries { needed: 3259, len: 3258 })
        ));
        c.alphas = vec![1.0];
        assert!(c.validate(10_000).is_err());
    }

    #[test]
    fn forecaster_spellings() {
        assert_eq!(parse_forecaster("ses").unwrap(), ForecasterSpec::Ses { alpha: Param::Auto });
        assert_eq!(
            parse_forecaster("holt(0.3, auto)").unwrap(),
            ForecasterSpec::Holt {
                alpha: Param::Fixed(0.3),
                beta: Param::Auto
            }
        );
        assert!(matches!(
            parse_forecaster("hw(12)").unwrap(),
            ForecasterSpec::HoltWinters { period: 12, alpha: Param::Auto, .. }
        ));
        assert!(matches!(
            parse_forecaster("ar(auto)").unwrap(),
            ForecasterSpec::Ar { order: ArOrder::Auto { max: 10, .. }, d: 0, .. }
        ));
        assert!(matches!(
            parse_forecaster("arima(1, 1)").unwrap(),
            ForecasterSpec::Ar { order: ArOrder::Fixed(1), d: 1, seasonal_d: 0, .. }
        ));
        for bad in ["hw", "ar", "ar(1, 2)", "lstm", "ses(0.2", "ses(x)"] {
            assert!(parse_forecaster(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn bootstrap_spellings() {
        let f = parse_forecaster("ar(1)").unwrap();
        let s = |x: &str| parse_bootstrap(x, &f).map(|b| b.scheme);
        assert_eq!(s("mbb").unwrap(), Scheme::MovingBlock { block_len: None });
        assert_eq!(s("cbb(7)").unwrap(), Scheme::CircularBlock { block_len: Some(7) });
        assert_eq!(s("bob(20, 5)").unwrap(), Scheme::BlockOfBlocks { outer: 20, inner: 5 });
        assert_eq!(s("sieve").unwrap(), Scheme::Sieve { order: None });
        assert_eq!(
            s("decomposed(12)").unwrap(),
            Scheme::DecomposedBlock {
                period: 12,
                inner: InnerScheme::MovingBlock { block_len: None }
            }
        );
        for bad in ["stationary", "decomposed(12, sieve)", "model(1)", "jackknife"] {
            assert!(s(bad).is_err(), "{bad}");
        }
    }
}
