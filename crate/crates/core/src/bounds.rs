//! Upper bounds on the supported file size and the matching lower bound on
//! the reconstruction degree, all in exact integer arithmetic.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{self, FileSizeHierarchy, SearchConfig};
use crate::incidence::{validate_fr, FrParams, IncidenceStructure};

/// `C(n, k)` over arbitrary precision; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn check_k(params: FrParams, k: usize) -> Result<()> {
    if k == 0 || k > params.n {
        return Err(Error::Argument(format!("k = {k} is outside 1..={}", params.n)));
    }
    Ok(())
}

/// `⌊v · (1 − C(n−ρ, k) / C(n, k))⌋`, floored once at the end.
pub fn binomial_bound(params: FrParams, k: usize) -> Result<usize> {
    check_k(params, k)?;
    let FrParams { n, v, rho, .. } = params;
    let total = binomial(n, k);
    let missing = binomial(n - rho, k);
    let value = (BigUint::from(v) * (&total - missing)) / total;
    Ok(value.to_usize().expect("bounded by v"))
}

/// `g(1) = α`, `g(k+1) = g(k) + α − ⌈(ρ·g(k) − k·α) / (n−k)⌉`.
/// Element `k - 1` holds `g(k)`. Ceilings round toward `+∞`.
pub fn recursive_g(params: FrParams) -> Vec<i64> {
    let (n, alpha, rho) = (params.n as i64, params.alpha as i64, params.rho as i64);
    let mut g = Vec::with_capacity(params.n);
    g.push(alpha);
    for k in 1..n {
        let prev = g[g.len() - 1];
        g.push(prev + alpha - Integer::div_ceil(&(rho * prev - k * alpha), &(n - k)));
    }
    g
}

/// `g'(1) = ρ`, `g'(l+1) = g'(l) + ρ − ⌈(α·g'(l) − l·ρ) / (v−l)⌉`: the
/// recursive bound evaluated on the transpose code. Element `l - 1` holds `g'(l)`.
pub fn g_prime(params: FrParams) -> Vec<i64> {
    let (v, alpha, rho) = (params.v as i64, params.alpha as i64, params.rho as i64);
    let mut gp = vec![rho];
    for l in 1..v {
        let prev = *gp.last().unwrap();
        let step = rho - Integer::div_ceil(&(alpha * prev - l * rho), &(v - l));
        gp.push(prev + step);
    }
    gp
}

/// `#{ i in 1..=v : k > n − g'(i) }`.
pub fn dual_bound(params: FrParams, k: usize) -> Result<usize> {
    check_k(params, k)?;
    Ok(dual_bound_from(params, &g_prime(params), k))
}

fn dual_bound_from(params: FrParams, gp: &[i64], k: usize) -> usize {
    let (n, k) = (params.n as i64, k as i64);
    gp.iter().filter(|&&g| k > n - g).count()
}

/// Smallest reconstruction degree allowed for file size `m`:
/// `⌈n · C(m−1, α) / C(v, α)⌉ + 1`.
pub fn silberstein_min_k(params: FrParams, m: usize) -> Result<usize> {
    if m == 0 || m > params.v {
        return Err(Error::Argument(format!(
            "file size {m} is outside 1..={}",
            params.v
        )));
    }
    let num = BigUint::from(params.n) * binomial(m - 1, params.alpha);
    let den = binomial(params.v, params.alpha);
    let ceil = Integer::div_ceil(&num, &den);
    Ok(ceil.to_usize().expect("bounded by n") + 1)
}

/// Bound values for one reconstruction degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub k: usize,
    pub binomial: usize,
    /// `g(k)` clamped to `[0, v]`.
    pub g: usize,
    pub g_raw: i64,
    pub dual: usize,
    pub exact: Option<usize>,
}

impl BoundRow {
    /// Whether the recursive bound is at least as tight as the binomial one.
    pub fn g_le_binomial(&self) -> bool {
        self.g <= self.binomial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub params: FrParams,
    pub rows: Vec<BoundRow>,
    pub g_prime: Vec<i64>,
    /// `g(k)` never decreased. Not a proven property; checked per code.
    pub g_nondecreasing: bool,
}

impl BoundReport {
    pub fn new(params: FrParams, exact: Option<&FileSizeHierarchy>) -> Result<Self> {
        if let Some(h) = exact {
            if h.num_blocks() != params.n || h.num_points() != params.v {
                return Err(Error::Argument(format!(
                    "exact hierarchy has shape {}x{}, parameters say {}x{}",
                    h.num_blocks(),
                    h.num_points(),
                    params.n,
                    params.v
                )));
            }
        }
        let g = recursive_g(params);
        let gp = g_prime(params);
        let v = params.v as i64;
        let rows = (1..=params.n)
            .map(|k| {
                Ok(BoundRow {
                    k,
                    binomial: binomial_bound(params, k)?,
                    g: g[k - 1].clamp(0, v) as usize,
                    g_raw: g[k - 1],
                    dual: dual_bound_from(params, &gp, k),
                    exact: exact.map(|h| h.supported(k)),
                })
            })
            .collect::<Result<_>>()?;
        Ok(BoundReport {
            params,
            rows,
            g_nondecreasing: g.windows(2).all(|w| w[0] <= w[1]),
            g_prime: gp,
        })
    }

    /// Rows whose exact value exceeds some bound. Empty for a sound report.
    pub fn violations(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| {
                r.exact
                    .is_some_and(|m| m > r.binomial || m > r.g || m > r.dual)
            })
            .map(|r| r.k)
            .collect()
    }

    /// Text table `k  eq9  g(k)  dual  exact` over the requested `ks`.
    pub fn to_table(&self, ks: impl IntoIterator<Item = usize>) -> String {
        let with_exact = self.rows.iter().any(|r| r.exact.is_some());
        let mut out = String::from("k  eq9  g(k)  dual");
        if with_exact {
            out.push_str("  exact");
        }
        out.push('\n');
        for k in ks {
            let r = &self.rows[k - 1];
            out.push_str(&format!("{}  {}  {}  {}", r.k, r.binomial, r.g, r.dual));
            if let Some(m) = r.exact {
                out.push_str(&format!("  {m}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Outcome of comparing an exact `M_k` against the dual bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Optimality {
    /// `M_k` meets the dual bound; `witness` is the lexicographically
    /// smallest `k`-set of blocks attaining it.
    Certified {
        k: usize,
        value: usize,
        witness: Vec<usize>,
        binomial: usize,
        g: usize,
    },
    NotCertified {
        k: usize,
        exact: usize,
        dual: usize,
        gap: usize,
        binomial: usize,
        g: usize,
    },
}

pub fn optimality_certificate(
    s: &IncidenceStructure,
    k: usize,
    cfg: &SearchConfig,
) -> Result<Optimality> {
    let code = validate_fr(s)?;
    let params = code.params();
    check_k(params, k)?;
    let dual = dual_bound(params, k)?;
    let binomial = binomial_bound(params, k)?;
    let g = recursive_g(params)[k - 1].clamp(0, params.v as i64) as usize;
    let exact = hierarchy::supported_file_size(s, k, cfg)?;
    if exact != dual {
        return Ok(Optimality::NotCertified {
            k,
            exact,
            dual,
            gap: dual.abs_diff(exact),
            binomial,
            g,
        });
    }
    let witness = hierarchy::min_union_witness(s, k, exact, cfg)?
        .ok_or_else(|| Error::Internal(format!("no {k}-subset attains M_k = {exact}")))?;
    Ok(Optimality::Certified {
        k,
        value: exact,
        witness,
        binomial,
        g,
    })
}
