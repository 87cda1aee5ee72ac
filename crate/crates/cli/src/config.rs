//! Tower configuration shared by every subcommand.

use std::path::PathBuf;

use asw_core::expsum::{Precision, Tower, TowerSpec, DEFAULT_BUDGET};
use asw_core::gf::FqElt;
use asw_core::par::Strategy;
use asw_core::{Error, Result};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TowerArgs {
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    /// Degree of F_q over F_p.
    #[arg(long, default_value_t = 1)]
    pub a: usize,
    /// Coefficients of f, leading first. For a >= 2 each entry is an integer
    /// in [0, p^a) whose base-p digits are the coordinates in the basis of
    /// the field's defining modulus, lowest digit first.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = false)]
    pub f: Vec<u64>,
    /// p-adic digits N.
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// T-adic truncation order D.
    #[arg(long = "D")]
    pub t_order: Option<usize>,
    /// s-degree truncation K.
    #[arg(long = "K")]
    pub s_degree: Option<usize>,
    /// Guard digits G; raised to the required value if too low.
    #[arg(long = "G")]
    pub g: Option<u32>,
    /// Cap on the number of field elements enumerated per extension.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Directory of the histogram cache.
    #[arg(long, env = "ASW_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run every kernel on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

/// Per-command defaults for (N, D, K).
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub n: u32,
    pub t_order: usize,
    pub k: usize,
}

pub const STANDARD: Defaults = Defaults { n: 6, t_order: 40, k: 6 };

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: TowerSpec,
    pub f_input: Vec<u64>,
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub strategy: Strategy,
}

/// Coefficients b_0..b_d from the leading-first command-line encoding.
pub fn parse_f(p: u64, a: usize, f: &[u64]) -> Result<Vec<FqElt>> {
    let q = (p as u128).checked_pow(a as u32).ok_or_else(|| Error::InvalidSpec("p^a overflows".into()))?;
    f.iter()
        .rev()
        .map(|&c| {
            if c as u128 >= q {
                return Err(Error::InvalidSpec(format!("coefficient {c} is not below q = {q}")));
            }
            let mut digits = Vec::with_capacity(a);
            let mut x = c;
            for _ in 0..a {
                digits.push(x % p);
                x /= p;
            }
            Ok(FqElt(digits))
        })
        .collect()
}

impl RunConfig {
    /// Validate the arguments; returns the configuration and any warnings.
    pub fn new(args: &TowerArgs, defaults: Defaults) -> Result<(Self, Vec<String>)> {
        let p = args.p;
        let n = args.n.unwrap_or(defaults.n);
        let t_order = args.t_order.unwrap_or(defaults.t_order);
        let k = args.s_degree.unwrap_or(defaults.k);
        if n == 0 || t_order == 0 {
            return Err(Error::InvalidSpec("N and D must be positive".into()));
        }
        if !asw_core::nt::is_prime(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        let need = Precision::required_guard(p, k, t_order);
        let mut warnings = Vec::new();
        let g = match args.g {
            Some(g) if g < need => {
                warnings.push(format!("guard G = {g} raised to {need}"));
                need
            }
            Some(g) => g,
            None => need,
        };
        let f = parse_f(p, args.a, &args.f)?;
        let spec = TowerSpec::new(p, args.a, f, Precision { n, d: t_order, k, g })?;
        let strategy = if args.sequential { Strategy::Sequential } else { Strategy::Parallel };
        Ok((
            RunConfig {
                spec,
                f_input: args.f.clone(),
                budget: args.budget,
                cache_dir: args.cache_dir.clone(),
                format: args.format,
                strategy,
            },
            warnings,
        ))
    }

    pub fn tower(&self) -> Tower {
        let t = Tower::new(self.spec.clone()).with_strategy(self.strategy).with_budget(self.budget);
        match &self.cache_dir {
            Some(dir) => t.with_cache_dir(dir),
            None => t,
        }
    }

    /// Echo of the inputs, including the modulus that fixes the basis of F_q.
    pub fn to_json(&self) -> Value {
        let pr = self.spec.prec;
        json!({
            "p": self.spec.p,
            "a": self.spec.a,
            "f": self.f_input,
            "modulus": self.spec.base_modulus(),
            "N": pr.n,
            "D": pr.d,
            "K": pr.k,
            "G": pr.g,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_is_leading_first_with_base_p_digits() {
        let f = parse_f(3, 2, &[1, 0, 5]).unwrap();
        assert_eq!(f, vec![FqElt(vec![2, 1]), FqElt(vec![0, 0]), FqElt(vec![1, 0])]);
        assert!(parse_f(3, 2, &[1, 9]).is_err());
    }
}
