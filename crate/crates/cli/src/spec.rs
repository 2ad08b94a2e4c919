//! Parsers for the family / process / rule specification strings.
//!
//! Grammar: `head` or `head:params`, where `params` is a comma-separated
//! list of `key=value` pairs. A bare token (no `=`) extends the previous
//! key's value list, so grids read naturally:
//! `truncated-cauchy-grid:a=10,100,1000`.
//!
//! Families:  `gaussian:mu=0,sigma=1` | `rademacher` | `truncated-cauchy:a=100`
//!            | `truncated-cauchy-grid:a=10,100,1000` | `binary-pn:n=5`
//!            | `two-coin:i=1`
//! Processes: `L:lambda=0.2` | `normal-mixture` | `one-sided-paper`
//!            | `one-sided-exact` | `witness:levels=4,8,16[,base=<process>]`
//! Rules:     `always` | `never` | `first-one` | `ones-count:n=3`
//!            | `leading-zeros:m=5` | `fixed:t=100`
//!            | `abs-mean-above:threshold=1,start=10` | `tau-kn:k=100,n=2`

use eville_core::evidence::{
    likelihood_process, normal_mixture, one_sided_mixture_exact, one_sided_mixture_paper,
    EvidenceProcess,
};
use eville_core::families::{
    binary_pn, gaussian_iid, rademacher_iid, truncated_cauchy, truncated_cauchy_family,
    two_coin, DistributionFamily,
};
use eville_core::paths::{level_rule, StoppingRule};
use eville_core::slln::tau_kn;

use crate::error::{usage, CliError};

struct Params {
    head: String,
    pairs: Vec<(String, Vec<String>)>,
}

fn require<T>(spec: &str, key: &str, value: Option<T>) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("spec '{spec}' is missing '{key}='")))
}

impl Params {
    fn parse(spec: &str) -> Result<Self, CliError> {
        let (head, rest) = match spec.split_once(':') {
            None => (spec, None),
            Some((h, r)) => (h, Some(r)),
        };
        let mut pairs: Vec<(String, Vec<String>)> = Vec::new();
        if let Some(rest) = rest {
            for token in rest.split(',') {
                match token.split_once('=') {
                    Some((k, v)) => pairs.push((k.trim().to_owned(), vec![v.trim().to_owned()])),
                    None => match pairs.last_mut() {
                        Some((_, list)) => list.push(token.trim().to_owned()),
                        None => {
                            return Err(usage(format!(
                                "malformed spec '{spec}': '{token}' is not key=value"
                            )))
                        }
                    },
                }
            }
        }
        Ok(Params {
            head: head.trim().to_owned(),
            pairs,
        })
    }

    fn take(&mut self, key: &str) -> Option<Vec<String>> {
        let idx = self.pairs.iter().position(|(k, _)| k == key)?;
        Some(self.pairs.remove(idx).1)
    }

    fn take_scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(vals) if vals.len() == 1 => vals[0]
                .parse::<T>()
                .map(Some)
                .map_err(|_| usage(format!("bad value for '{key}': {}", vals[0]))),
            Some(vals) => Err(usage(format!(
                "'{key}' wants one value, got {}",
                vals.len()
            ))),
        }
    }

    fn take_list_f64(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(vals) => vals
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| usage(format!("bad value in '{key}' list: {v}")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    fn finish(self, spec: &str) -> Result<(), CliError> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(usage(format!("unknown key '{k}' in spec '{spec}'"))),
        }
    }
}

pub fn parse_family(spec: &str) -> Result<DistributionFamily, CliError> {
    let mut p = Params::parse(spec)?;
    let fam = match p.head.as_str() {
        "gaussian" => {
            let mu = p.take_scalar::<f64>("mu")?.unwrap_or(0.0);
            let sigma = p.take_scalar::<f64>("sigma")?.unwrap_or(1.0);
            DistributionFamily::singleton(gaussian_iid(mu, sigma)?)
        }
        "rademacher" => DistributionFamily::singleton(rademacher_iid()),
        "truncated-cauchy" => {
            let a = require(spec, "a", p.take("a").and_then(|v| v.first().cloned()))?;
            let a: f64 = a
                .parse()
                .map_err(|_| usage(format!("bad value for 'a': {a}")))?;
            DistributionFamily::singleton(truncated_cauchy(a)?)
        }
        "truncated-cauchy-grid" => {
            let grid = require(spec, "a", p.take_list_f64("a")?)?;
            truncated_cauchy_family(&grid)?
        }
        "binary-pn" => {
            let n = require(spec, "n", p.take_scalar::<u32>("n")?)?;
            DistributionFamily::singleton(binary_pn(n))
        }
        "two-coin" => {
            let i = require(spec, "i", p.take_scalar::<u8>("i")?)?;
            DistributionFamily::singleton(two_coin(i)?)
        }
        other => return Err(usage(format!("unknown family '{other}'"))),
    };
    p.finish(spec)?;
    Ok(fam)
}

pub fn parse_process(spec: &str) -> Result<EvidenceProcess, CliError> {
    let mut p = Params::parse(spec)?;
    let process = match p.head.as_str() {
        "L" => {
            let lambda = require(spec, "lambda", p.take_scalar::<f64>("lambda")?)?;
            if !lambda.is_finite() {
                return Err(usage("lambda must be finite"));
            }
            likelihood_process(lambda)
        }
        "normal-mixture" => normal_mixture(),
        "one-sided-paper" => one_sided_mixture_paper(),
        "one-sided-exact" => one_sided_mixture_exact(),
        "witness" => {
            // indicator witness over level crossings of a base e-process;
            // level 2^n crossings have sup_P P(tau < inf) <= 2^-n by Ville
            let levels = require(spec, "levels", p.take_list_f64("levels")?)?;
            let base = match p.take("base") {
                None => normal_mixture(),
                Some(vals) if vals.len() == 1 => parse_process(&vals[0])?,
                Some(_) => return Err(usage("'base' wants one value")),
            };
            let rules = levels
                .iter()
                .map(|&lv| level_rule(base.clone(), lv).map_err(CliError::from))
                .collect::<Result<Vec<_>, _>>()?;
            EvidenceProcess::indicator_witness(rules)?
        }
        other => return Err(usage(format!("unknown process '{other}'"))),
    };
    p.finish(spec)?;
    Ok(process)
}

pub fn parse_rule(spec: &str) -> Result<StoppingRule, CliError> {
    let mut p = Params::parse(spec)?;
    let rule = match p.head.as_str() {
        "always" => StoppingRule::always(),
        "never" => StoppingRule::never(),
        "first-one" => StoppingRule::first_one(),
        "ones-count" => {
            let n = require(spec, "n", p.take_scalar::<u32>("n")?)?;
            StoppingRule::count_ones(n)
        }
        "leading-zeros" => {
            let m = require(spec, "m", p.take_scalar::<usize>("m")?)?;
            StoppingRule::leading_zeros(m)?
        }
        "fixed" => {
            let t = require(spec, "t", p.take_scalar::<usize>("t")?)?;
            StoppingRule::fixed_time(t)?
        }
        "abs-mean-above" => {
            let threshold = require(spec, "threshold", p.take_scalar::<f64>("threshold")?)?;
            let start = p.take_scalar::<usize>("start")?.unwrap_or(1);
            StoppingRule::abs_mean_above(threshold, start)?
        }
        "tau-kn" => {
            let k = require(spec, "k", p.take_scalar::<u128>("k")?)?;
            let n = require(spec, "n", p.take_scalar::<u32>("n")?)?;
            tau_kn(k, n)?
        }
        other => return Err(usage(format!("unknown rule '{other}'"))),
    };
    p.finish(spec)?;
    Ok(rule)
}
