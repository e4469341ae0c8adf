//! MDL variable importance and entropy measures, in bits per instance.

use statrs::function::gamma::ln_gamma;
use std::f64::consts::LN_2;

use super::table::ContingencyTable;
use crate::error::{Error, Result};

/// log2 of n! / Π k_i!
pub fn log2_multinomial(parts: &[u64]) -> f64 {
    let n: u64 = parts.iter().sum();
    let mut acc = ln_factorial(n);
    for &k in parts {
        acc -= ln_factorial(k);
    }
    acc / LN_2
}

/// log2 of C(n, k).
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)) / LN_2
}

fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Code length of the labels before seeing the attribute, in bits (not per instance).
pub fn prior_bits(table: &ContingencyTable) -> f64 {
    let c = table.n_classes() as u64;
    log2_multinomial(&table.row_sums()) + log2_binomial(table.total() + c - 1, c - 1)
}

/// Code length of the labels given the attribute value, in bits.
pub fn post_bits(table: &ContingencyTable) -> f64 {
    let c = table.n_classes() as u64;
    (0..table.n_values())
        .map(|j| {
            let col = table.column(j);
            let n_j: u64 = col.iter().sum();
            log2_multinomial(&col) + log2_binomial(n_j + c - 1, c - 1)
        })
        .sum()
}

/// Per-instance compression achieved by the attribute: (prior − post) / n.
pub fn mdl_score(table: &ContingencyTable) -> Result<f64> {
    let n = table.total();
    if n == 0 {
        return Err(Error::Domain("MDL of an empty table".into()));
    }
    if table.n_values() == 1 {
        return Ok(0.0);
    }
    Ok((prior_bits(table) - post_bits(table)) / n as f64)
}

fn entropy_of(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&k| k > 0)
        .map(|k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Class, attribute and joint entropies of a table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entropies {
    pub h_c: f64,
    pub h_a: f64,
    pub h_ca: f64,
}

impl Entropies {
    pub fn of(table: &ContingencyTable) -> Self {
        let n = table.total() as f64;
        if n == 0.0 {
            return Self { h_c: 0.0, h_a: 0.0, h_ca: 0.0 };
        }
        Self {
            h_c: entropy_of(table.row_sums().into_iter(), n),
            h_a: entropy_of(table.col_sums().into_iter(), n),
            h_ca: entropy_of(table.counts().iter().flatten().copied(), n),
        }
    }

    /// H(C|A) = H(C,A) − H(A).
    pub fn h_c_given_a(&self) -> f64 {
        self.h_ca - self.h_a
    }
}

/// H(C) − H(C|A), clamped at zero against rounding.
pub fn info_gain(table: &ContingencyTable) -> f64 {
    let e = Entropies::of(table);
    (e.h_c - e.h_c_given_a()).max(0.0)
}
