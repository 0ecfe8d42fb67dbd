//! Gaussian polynomials (q-binomial coefficients) in base `q^k`.
//!
//! `[A, B]_k` is the polynomial q-analogue of `binomial(A, B)` with every
//! exponent scaled by `k`; it is zero unless `A >= B >= 0`. Polynomials are
//! built by the recurrence
//!
//! ```text
//! [A, B]_k = [A-1, B-1]_k + q^{kB} [A-1, B]_k
//! ```
//!
//! staying in integer arithmetic throughout; the ratio definition
//! `(q^k;q^k)_A / ((q^k;q^k)_B (q^k;q^k)_{A-B})` is kept as a test oracle.
//! Base polynomials (k = 1) are memoized behind a mutex, so concurrent
//! lookups are safe; base `q^k` is a pure exponent stretch of the base case.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::series::{Aux, TruncatedSeries};

/// A Gaussian polynomial `[a, b]_k` with dense integer coefficients in `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QBinomial {
    pub a: i64,
    pub b: i64,
    pub k: u32,
    /// Coefficient of `q^d` at index `d`; empty for the zero polynomial.
    pub coeffs: Vec<i128>,
}

impl QBinomial {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `k * b * (a - b)` whenever `a >= b >= 0`.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Value at q = 1, i.e. the ordinary binomial coefficient.
    pub fn eval_at_one(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    /// Embeds the polynomial into a truncated series of the given shape,
    /// dropping terms above the order.
    pub fn to_series(&self, order: usize, arity: usize) -> TruncatedSeries {
        TruncatedSeries::from_entries(
            order,
            arity,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(d, &c)| (d, Aux::NONE, c)),
        )
    }
}

fn base_cache() -> &'static Mutex<HashMap<(u32, u32), Arc<Vec<i128>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Vec<i128>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Base-q Gaussian polynomial coefficients for `a >= b >= 0`, memoized.
fn gaussian_base(a: u32, b: u32) -> Arc<Vec<i128>> {
    if b == 0 || b == a {
        return Arc::new(vec![1]);
    }
    if let Some(hit) = base_cache().lock().unwrap().get(&(a, b)) {
        return Arc::clone(hit);
    }
    let left = gaussian_base(a - 1, b - 1);
    let right = gaussian_base(a - 1, b);
    let shift = b as usize;
    let mut coeffs = vec![0i128; (b as usize) * ((a - b) as usize) + 1];
    for (d, &c) in left.iter().enumerate() {
        coeffs[d] += c;
    }
    for (d, &c) in right.iter().enumerate() {
        coeffs[d + shift] += c;
    }
    let out = Arc::new(coeffs);
    base_cache()
        .lock()
        .unwrap()
        .insert((a, b), Arc::clone(&out));
    out
}

/// The Gaussian polynomial `[a, b]_k`. Arguments outside `a >= b >= 0`
/// yield the zero polynomial, matching the defining case split.
pub fn gaussian(a: i64, b: i64, k: u32) -> QBinomial {
    assert!(k >= 1, "q-binomial base exponent must be positive");
    if a < 0 || b < 0 || b > a {
        return QBinomial {
            a,
            b,
            k,
            coeffs: Vec::new(),
        };
    }
    let base = gaussian_base(a as u32, b as u32);
    let coeffs = if k == 1 {
        base.as_ref().clone()
    } else {
        let mut stretched = vec![0i128; (base.len() - 1) * k as usize + 1];
        for (d, &c) in base.iter().enumerate() {
            stretched[d * k as usize] = c;
        }
        stretched
    };
    QBinomial { a, b, k, coeffs }
}
