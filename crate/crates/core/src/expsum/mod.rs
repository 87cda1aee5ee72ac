//! Character-sum pathway: trace histograms over F_{q^k}, T-adic exponential
//! sums, L-functions of finite characters, and characteristic series.

mod cache;
mod histogram;
mod lfun;

pub use cache::{CacheEntry, HistogramCache};
pub use histogram::{trace_histogram, TraceHistogram};
pub use lfun::{
    bivariate_t_valuations, c_star_chi, c_star_chi_exp, c_star_chi_product, c_star_t, l_degree, l_function, np_pi_chi,
    np_t_adic, s_chi, s_star_t, specialize_t, BivSeries, LFunction, Over,
};

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::gf::FqElt;
use crate::nt;
use crate::padic::binom_guard;
use crate::par::Strategy;
use crate::series::guard_digits;

/// Truncation parameters: p-adic digits N, T-order D, s-degree K, guard G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    pub n: u32,
    pub d: usize,
    pub k: usize,
    pub g: u32,
}

impl Precision {
    /// Guard digits that make every division in the T-adic pathway exact:
    /// v_p(K!) for the exponential plus floor(log_p(D-1)) for binomial powers.
    pub fn required_guard(p: u64, k: usize, d: usize) -> u32 {
        guard_digits(p, k) + binom_guard(p, d)
    }

    pub fn new(p: u64, n: u32, d: usize, k: usize) -> Self {
        Precision { n, d, k, g: Self::required_guard(p, k, d) }
    }

    pub fn n_eff(&self) -> u32 {
        self.n + self.g
    }
}

/// The tower data: prime p, F_q = F_{p^a}, and a monic f over F_q with p ∤ deg f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    pub p: u64,
    pub a: usize,
    /// Coefficients b_0..b_d as elements of F_q (coordinates in the basis of
    /// the deterministic modulus of degree a).
    pub f: Vec<FqElt>,
    pub prec: Precision,
}

impl TowerSpec {
    pub fn new(p: u64, a: usize, f: Vec<FqElt>, prec: Precision) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        if a == 0 {
            return Err(Error::InvalidSpec("a must be at least 1".into()));
        }
        if f.len() < 2 {
            return Err(Error::InvalidSpec("f must have degree at least 1".into()));
        }
        if f.iter().any(|b| b.0.len() != a || b.0.iter().any(|&c| c >= p)) {
            return Err(Error::InvalidSpec("coefficients must be elements of F_q".into()));
        }
        let d = f.len() - 1;
        let lead = &f[d].0;
        if lead[0] != 1 || lead[1..].iter().any(|&c| c != 0) {
            return Err(Error::InvalidSpec("f must be monic".into()));
        }
        if (d as u64).is_multiple_of(p) {
            return Err(Error::InvalidSpec(format!("p = {p} divides deg f = {d}")));
        }
        let need = Precision::required_guard(p, prec.k, prec.d);
        if prec.g < need {
            return Err(Error::InsufficientGuard { have: prec.g, need });
        }
        if nt::checked_pow(p, prec.n_eff()).filter(|&x| x < (1 << 62)).is_none() {
            return Err(Error::InvalidSpec("p^(N+G) must stay below 2^62".into()));
        }
        Ok(TowerSpec { p, a, f, prec })
    }

    /// f given by F_p-coefficients (a = 1), leading coefficient first.
    pub fn over_fp(p: u64, f_desc: &[u64], prec: Precision) -> Result<Self> {
        let f = f_desc.iter().rev().map(|&c| FqElt(vec![c % p])).collect();
        TowerSpec::new(p, 1, f, prec)
    }

    pub fn d(&self) -> usize {
        self.f.len() - 1
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a as u32)
    }

    /// The modulus fixing the basis of F_q.
    pub fn base_modulus(&self) -> Vec<u64> {
        crate::gf::find_irreducible(self.p, self.a)
    }

    /// Smallest m0 >= 1 with p^(m0-1) >= a(d-1)^2/(8d).
    pub fn m0(&self) -> u32 {
        m0(self.p, self.a as u64, self.d() as u64)
    }

    pub fn with_prec(&self, prec: Precision) -> Result<Self> {
        TowerSpec::new(self.p, self.a, self.f.clone(), prec)
    }
}

pub fn m0(p: u64, a: u64, d: u64) -> u32 {
    let bound = Rational64::new((a * (d - 1) * (d - 1)) as i64, (8 * d) as i64);
    let mut m = 1u32;
    let mut pw = Rational64::from(1);
    while pw < bound {
        pw *= Rational64::from(p as i64);
        m += 1;
    }
    m
}

/// Default cap on the number of field elements enumerated per extension.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Computation context: memoized histograms plus an optional disk cache.
pub struct Tower {
    pub spec: TowerSpec,
    pub strategy: Strategy,
    pub budget: u64,
    cache: Option<HistogramCache>,
    memo: Mutex<HashMap<usize, Arc<TraceHistogram>>>,
}

impl Tower {
    pub fn new(spec: TowerSpec) -> Self {
        Tower {
            spec,
            strategy: Strategy::default(),
            budget: DEFAULT_BUDGET,
            cache: None,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache = Some(HistogramCache::new(dir.into()));
        self
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    /// Trace histogram over F_{q^k}, with at least `n_eff` digits.
    pub fn histogram(&self, k: usize, n_eff: u32) -> Result<Arc<TraceHistogram>> {
        {
            let memo = self.memo.lock().unwrap();
            if let Some(h) = memo.get(&k) {
                if h.n_eff >= n_eff {
                    return Ok(if h.n_eff == n_eff { h.clone() } else { Arc::new(h.reduce(n_eff)) });
                }
            }
        }
        let h = match self.cache.as_ref().and_then(|c| c.load(&self.spec, k, n_eff)) {
            Some(h) => h,
            None => {
                let h = trace_histogram(&self.spec, k, n_eff, self.budget, self.strategy)?;
                if let Some(c) = &self.cache {
                    c.store(&self.spec, &h)?;
                }
                h
            }
        };
        let h = Arc::new(h);
        self.memo.lock().unwrap().insert(k, h.clone());
        Ok(h)
    }
}
