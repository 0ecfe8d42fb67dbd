//! Truncated formal power series in `q` with exact integer coefficients.
//!
//! A [`TruncatedSeries`] stores the coefficients of a formal series up to and
//! including a fixed q-degree `order`, together with the exponents of up to
//! two auxiliary tracking variables (statistics such as "number of parts in a
//! residue class" or "number of overlined parts").
//!
//! Invariants:
//! - every stored key has q-degree `<= order`;
//! - no stored coefficient is zero (canonical sparse form);
//! - auxiliary exponents beyond the declared arity are zero;
//! - two series are equal iff order, arity and coefficient maps are equal.
//!
//! Coefficients are `i128` with checked arithmetic: an overflow surfaces as
//! [`Error::Overflow`] instead of wrapping. Desk-scale truncations stay far
//! below that bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponents of the two auxiliary tracking variables.
///
/// `e0` is the exponent of the first variable and `e1` of the second; which
/// statistics they carry depends on the generating function being built.
/// Exponents above a series' declared arity must stay zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Aux {
    pub e0: u32,
    pub e1: u32,
}

impl Aux {
    pub const NONE: Aux = Aux { e0: 0, e1: 0 };

    pub fn new(e0: u32, e1: u32) -> Self {
        Aux { e0, e1 }
    }

    fn checked_add(self, rhs: Aux) -> Option<Aux> {
        Some(Aux {
            e0: self.e0.checked_add(rhs.e0)?,
            e1: self.e1.checked_add(rhs.e1)?,
        })
    }

    fn fits_arity(self, arity: usize) -> bool {
        match arity {
            0 => self.e0 == 0 && self.e1 == 0,
            1 => self.e1 == 0,
            _ => true,
        }
    }
}

/// A signed monomial `coeff * t0^e0 * t1^e1` in the tracking variables,
/// used as the `c` of a Pochhammer factor `(1 - c q^d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxMonomial {
    pub coeff: i128,
    pub aux: Aux,
}

impl AuxMonomial {
    pub fn new(coeff: i128, aux: Aux) -> Self {
        AuxMonomial { coeff, aux }
    }

    /// Plain `c` with no tracking variables.
    pub fn constant(coeff: i128) -> Self {
        AuxMonomial {
            coeff,
            aux: Aux::NONE,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }
}

/// Key of one stored coefficient: q-degree first, then aux exponents, so the
/// map iterates in (degree, e0, e1) order.
type Key = (usize, Aux);

/// Formal power series in `q` truncated at a fixed order, with exact integer
/// coefficients and up to two auxiliary tracking variables.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: usize,
    arity: usize,
    coeffs: BTreeMap<Key, i128>,
}

impl TruncatedSeries {
    /// The zero series of the given order and arity.
    pub fn zero(order: usize, arity: usize) -> Self {
        assert!(arity <= 2, "at most two tracking variables are supported");
        TruncatedSeries {
            order,
            arity,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series 1.
    pub fn one(order: usize, arity: usize) -> Self {
        Self::monomial(order, arity, 1, 0, Aux::NONE)
    }

    /// A single term `coeff * q^degree * aux`; terms beyond the order are
    /// dropped, consistent with truncation semantics.
    pub fn monomial(order: usize, arity: usize, coeff: i128, degree: usize, aux: Aux) -> Self {
        let mut s = Self::zero(order, arity);
        assert!(aux.fits_arity(arity), "aux exponents exceed declared arity");
        if coeff != 0 && degree <= order {
            s.coeffs.insert((degree, aux), coeff);
        }
        s
    }

    /// Builds a series from raw entries, dropping zeros and over-order terms.
    pub fn from_entries<I>(order: usize, arity: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Aux, i128)>,
    {
        let mut s = Self::zero(order, arity);
        for (degree, aux, coeff) in entries {
            assert!(aux.fits_arity(arity), "aux exponents exceed declared arity");
            if coeff == 0 || degree > order {
                continue;
            }
            let slot = s.coeffs.entry((degree, aux)).or_insert(0);
            *slot += coeff;
            if *slot == 0 {
                s.coeffs.remove(&(degree, aux));
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (nonzero) coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Stored coefficient of `q^degree * aux`, or 0 when absent.
    /// Degrees beyond the truncation order are unknown, not zero.
    pub fn coeff(&self, degree: usize, aux: Aux) -> Result<i128> {
        if degree > self.order {
            return Err(Error::OutOfRange {
                degree,
                order: self.order,
            });
        }
        Ok(self.coeffs.get(&(degree, aux)).copied().unwrap_or(0))
    }

    /// Iterates stored terms in (degree, e0, e1) order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Aux, i128)> + '_ {
        self.coeffs.iter().map(|(&(d, aux), &c)| (d, aux, c))
    }

    fn check_shape(&self, rhs: &Self) -> Result<()> {
        if self.order != rhs.order || self.arity != rhs.arity {
            return Err(Error::MismatchedShape {
                lhs_order: self.order,
                lhs_arity: self.arity,
                rhs_order: rhs.order,
                rhs_arity: rhs.arity,
            });
        }
        Ok(())
    }

    /// Coefficientwise sum.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        let mut out = self.clone();
        for (&key, &c) in &rhs.coeffs {
            let slot = out.coeffs.entry(key).or_insert(0);
            *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
            if *slot == 0 {
                out.coeffs.remove(&key);
            }
        }
        Ok(out)
    }

    /// Coefficientwise difference.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        let mut out = self.clone();
        for (&key, &c) in &rhs.coeffs {
            let slot = out.coeffs.entry(key).or_insert(0);
            *slot = slot.checked_sub(c).ok_or(Error::Overflow)?;
            if *slot == 0 {
                out.coeffs.remove(&key);
            }
        }
        Ok(out)
    }

    /// Truncated product: q-degrees add and are dropped above the order,
    /// auxiliary exponents add componentwise.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        let mut out = Self::zero(self.order, self.arity);
        for (&(da, aa), &ca) in &self.coeffs {
            // keys iterate by ascending degree; once da alone exceeds the
            // order every further product term does too
            if da > self.order {
                break;
            }
            for (&(db, ab), &cb) in &rhs.coeffs {
                let d = da + db;
                if d > self.order {
                    break;
                }
                let aux = aa.checked_add(ab).ok_or(Error::Overflow)?;
                let c = ca.checked_mul(cb).ok_or(Error::Overflow)?;
                let slot = out.coeffs.entry((d, aux)).or_insert(0);
                *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
                if *slot == 0 {
                    out.coeffs.remove(&(d, aux));
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by the monomial `coeff * q^degree * aux`.
    pub fn scale(&self, coeff: i128, degree: usize, aux: Aux) -> Result<Self> {
        assert!(aux.fits_arity(self.arity), "aux exponents exceed declared arity");
        let mut out = Self::zero(self.order, self.arity);
        if coeff == 0 {
            return Ok(out);
        }
        for (&(d, a), &c) in &self.coeffs {
            let nd = d + degree;
            if nd > self.order {
                break;
            }
            let na = a.checked_add(aux).ok_or(Error::Overflow)?;
            let nc = c.checked_mul(coeff).ok_or(Error::Overflow)?;
            out.coeffs.insert((nd, na), nc);
        }
        Ok(out)
    }

    /// Multiplies by the geometric series `1/(1 - c q^shift)`, i.e. by
    /// `sum_{i>=0} c^i q^{shift*i}`. Requires `shift >= 1`.
    ///
    /// Runs in place over ascending degrees: each target coefficient picks up
    /// `c` times the already-extended coefficient `shift` degrees below.
    pub fn inv_factor(&self, c: &AuxMonomial, shift: usize) -> Result<Self> {
        if shift == 0 {
            return Err(Error::IllegalShift);
        }
        let mut out = self.clone();
        if c.is_zero() {
            return Ok(out);
        }
        for degree in shift..=self.order {
            let lower: Vec<(Aux, i128)> = out
                .coeffs
                .range((degree - shift, Aux::NONE)..=(degree - shift, Aux::new(u32::MAX, u32::MAX)))
                .map(|(&(_, aux), &v)| (aux, v))
                .collect();
            for (aux, v) in lower {
                let na = aux.checked_add(c.aux).ok_or(Error::Overflow)?;
                let add = v.checked_mul(c.coeff).ok_or(Error::Overflow)?;
                let slot = out.coeffs.entry((degree, na)).or_insert(0);
                *slot = slot.checked_add(add).ok_or(Error::Overflow)?;
                if *slot == 0 {
                    out.coeffs.remove(&(degree, na));
                }
            }
        }
        Ok(out)
    }

    /// Divides by the finite product `(c q^shift; q^step)_factors`,
    /// expanding each factor geometrically.
    pub fn div_poch_finite(
        &self,
        c: &AuxMonomial,
        shift: usize,
        step: usize,
        factors: usize,
    ) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..factors {
            let d = shift + step * i;
            if d > self.order {
                break;
            }
            out = out.inv_factor(c, d)?;
        }
        Ok(out)
    }

    /// Divides by the infinite product `(c q^shift; q^step)_inf`; only the
    /// factors with `shift + step*i <= order` act within the truncation.
    pub fn div_poch_infinite(&self, c: &AuxMonomial, shift: usize, step: usize) -> Result<Self> {
        if shift == 0 && !c.is_zero() {
            return Err(Error::IllegalShift);
        }
        assert!(step >= 1, "q-Pochhammer step must be positive");
        let mut out = self.clone();
        let mut d = shift;
        while d <= self.order {
            if d >= 1 {
                out = out.inv_factor(c, d)?;
            }
            d += step;
        }
        Ok(out)
    }

    /// Sets both tracking variables to 1: the coefficient of `q^n` becomes
    /// the sum over all auxiliary exponents.
    pub fn collapse_aux(&self) -> Result<Self> {
        let mut out = Self::zero(self.order, 0);
        for (&(d, _), &c) in &self.coeffs {
            let slot = out.coeffs.entry((d, Aux::NONE)).or_insert(0);
            *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
            if *slot == 0 {
                out.coeffs.remove(&(d, Aux::NONE));
            }
        }
        Ok(out)
    }

    /// Reinterprets the series with a higher arity, keeping all terms.
    pub fn with_arity(&self, arity: usize) -> Self {
        assert!(arity <= 2 && arity >= self.arity, "arity can only widen");
        TruncatedSeries {
            order: self.order,
            arity,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// The finite product `(c q^shift; q^step)_factors
///   = prod_{i=0}^{factors-1} (1 - c q^{shift + step*i})`,
/// truncated at `order`. The empty product is 1.
pub fn poch_finite(
    c: &AuxMonomial,
    shift: usize,
    step: usize,
    factors: usize,
    order: usize,
    arity: usize,
) -> Result<TruncatedSeries> {
    assert!(step >= 1, "q-Pochhammer step must be positive");
    assert!(c.aux.fits_arity(arity), "aux exponents exceed declared arity");
    let mut out = TruncatedSeries::one(order, arity);
    for i in 0..factors {
        let d = shift + step * i;
        if d > order {
            break;
        }
        let factor = TruncatedSeries::from_entries(
            order,
            arity,
            [(0, Aux::NONE, 1), (d, c.aux, -c.coeff)],
        );
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// The infinite product `(c q^shift; q^step)_inf` truncated at `order`:
/// exactly the factors with `shift + step*i <= order` are included, so the
/// result equals [`poch_finite`] with `floor((order-shift)/step) + 1` factors.
/// Requires `shift >= 1` unless `c` is zero.
pub fn poch_infinite(
    c: &AuxMonomial,
    shift: usize,
    step: usize,
    order: usize,
    arity: usize,
) -> Result<TruncatedSeries> {
    if shift == 0 && !c.is_zero() {
        return Err(Error::IllegalShift);
    }
    let factors = if shift > order {
        0
    } else {
        (order - shift) / step + 1
    };
    poch_finite(c, shift.max(1), step, factors, order, arity)
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(order={}, arity={})[", self.order, self.arity)?;
        for (i, (&(d, aux), &c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if aux.e0 > 0 {
                write!(f, "*t0^{}", aux.e0)?;
            }
            if aux.e1 > 0 {
                write!(f, "*t1^{}", aux.e1)?;
            }
            if d > 0 {
                write!(f, "*q^{d}")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(order: usize) -> TruncatedSeries {
        // 1/(1-q) expanded directly
        TruncatedSeries::from_entries(order, 0, (0..=order).map(|d| (d, Aux::NONE, 1)))
    }

    #[test]
    fn zero_series_is_empty() {
        let s = TruncatedSeries::zero(10, 2);
        assert!(s.is_zero());
        assert_eq!(s.coeff(3, Aux::NONE).unwrap(), 0);
        let z = TruncatedSeries::zero(0, 0);
        assert!(z.is_zero());
    }

    #[test]
    fn add_identity_and_inverse() {
        let one = TruncatedSeries::one(5, 1);
        let s = TruncatedSeries::zero(5, 1).add(&one).unwrap();
        assert_eq!(s, one);
        let neg = TruncatedSeries::monomial(5, 1, -1, 0, Aux::NONE);
        assert!(s.add(&neg).unwrap().is_zero());
    }

    #[test]
    fn add_cancels_q_terms() {
        let a = TruncatedSeries::from_entries(5, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, 1)]);
        let b = TruncatedSeries::from_entries(5, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, -1)]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, TruncatedSeries::monomial(5, 0, 2, 0, Aux::NONE));
    }

    #[test]
    fn mul_truncates_above_order() {
        let one_plus_q = TruncatedSeries::from_entries(1, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, 1)]);
        let sq = one_plus_q.mul(&one_plus_q).unwrap();
        // (1+q)^2 = 1 + 2q at order 1
        assert_eq!(
            sq,
            TruncatedSeries::from_entries(1, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, 2)])
        );
    }

    #[test]
    fn mul_by_one_is_identity() {
        let s = TruncatedSeries::from_entries(6, 2, [(2, Aux::new(1, 0), 3), (5, Aux::new(0, 2), -1)]);
        assert_eq!(s.mul(&TruncatedSeries::one(6, 2)).unwrap(), s);
    }

    #[test]
    fn geometric_times_factor_is_one() {
        let g = geometric(5);
        let factor = TruncatedSeries::from_entries(5, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, -1)]);
        assert_eq!(g.mul(&factor).unwrap(), TruncatedSeries::one(5, 0));
    }

    #[test]
    fn mismatched_shape_rejected() {
        let a = TruncatedSeries::zero(5, 0);
        let b = TruncatedSeries::zero(6, 0);
        assert!(matches!(a.add(&b), Err(Error::MismatchedShape { .. })));
        let c = TruncatedSeries::zero(5, 1);
        assert!(matches!(a.mul(&c), Err(Error::MismatchedShape { .. })));
    }

    #[test]
    fn poch_finite_empty_product() {
        let s = poch_finite(&AuxMonomial::constant(1), 1, 1, 0, 5, 0).unwrap();
        assert_eq!(s, TruncatedSeries::one(5, 0));
    }

    #[test]
    fn poch_finite_two_factors() {
        // (q;q)_2 = (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let s = poch_finite(&AuxMonomial::constant(1), 1, 1, 2, 5, 0).unwrap();
        let expected = TruncatedSeries::from_entries(
            5,
            0,
            [
                (0, Aux::NONE, 1),
                (1, Aux::NONE, -1),
                (2, Aux::NONE, -1),
                (3, Aux::NONE, 1),
            ],
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn poch_single_negative_aux_factor() {
        // (-t0 t1 q^3; q^3)_1 = 1 + t0 t1 q^3
        let c = AuxMonomial::new(-1, Aux::new(1, 1));
        let s = poch_finite(&c, 3, 3, 1, 6, 2).unwrap();
        let expected =
            TruncatedSeries::from_entries(6, 2, [(0, Aux::NONE, 1), (3, Aux::new(1, 1), 1)]);
        assert_eq!(s, expected);
    }

    #[test]
    fn poch_infinite_keeps_only_reachable_factors() {
        // (-t0 t1 q^3; q^3)_inf at order 6: factors q^3 and q^6 survive
        let c = AuxMonomial::new(-1, Aux::new(1, 1));
        let s = poch_infinite(&c, 3, 3, 6, 2).unwrap();
        let expected = TruncatedSeries::from_entries(
            6,
            2,
            [
                (0, Aux::NONE, 1),
                (3, Aux::new(1, 1), 1),
                (6, Aux::new(1, 1), 1),
            ],
        );
        assert_eq!(s, expected);

        // (q^7;q^3)_inf at order 5 has no factor within range
        let t = poch_infinite(&AuxMonomial::constant(1), 7, 3, 5, 0).unwrap();
        assert_eq!(t, TruncatedSeries::one(5, 0));
    }

    #[test]
    fn poch_infinite_matches_finite_count() {
        let c = AuxMonomial::constant(1);
        let order = 12;
        for shift in 1..=order {
            for step in 1..=4 {
                let inf = poch_infinite(&c, shift, step, order, 0).unwrap();
                let n = (order - shift) / step + 1;
                let fin = poch_finite(&c, shift, step, n, order, 0).unwrap();
                assert_eq!(inf, fin, "shift={shift} step={step}");
            }
        }
    }

    #[test]
    fn poch_infinite_rejects_zero_shift() {
        assert_eq!(
            poch_infinite(&AuxMonomial::constant(1), 0, 1, 5, 0),
            Err(Error::IllegalShift)
        );
        // zero c is the constant 1 regardless of shift
        let s = poch_infinite(&AuxMonomial::constant(0), 0, 1, 5, 0).unwrap();
        assert_eq!(s, TruncatedSeries::one(5, 0));
    }

    #[test]
    fn inverse_partition_numbers() {
        // 1/(q;q)_inf counts partitions: 1,1,2,3,5,7
        let s = TruncatedSeries::one(5, 0)
            .div_poch_infinite(&AuxMonomial::constant(1), 1, 1)
            .unwrap();
        let expected: Vec<i128> = vec![1, 1, 2, 3, 5, 7];
        for (d, want) in expected.into_iter().enumerate() {
            assert_eq!(s.coeff(d, Aux::NONE).unwrap(), want, "degree {d}");
        }
    }

    #[test]
    fn inv_factor_geometric_in_aux() {
        // 1/(1 - t1 q) = 1 + t1 q + t1^2 q^2 + t1^3 q^3
        let c = AuxMonomial::new(1, Aux::new(0, 1));
        let s = TruncatedSeries::one(3, 2).inv_factor(&c, 1).unwrap();
        let expected = TruncatedSeries::from_entries(
            3,
            2,
            (0..=3u32).map(|i| (i as usize, Aux::new(0, i), 1)),
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn inv_factor_undoes_factor() {
        let s = TruncatedSeries::from_entries(8, 0, [(0, Aux::NONE, 2), (3, Aux::NONE, -5)]);
        let c = AuxMonomial::constant(1);
        let factor = TruncatedSeries::from_entries(8, 0, [(0, Aux::NONE, 1), (1, Aux::NONE, -1)]);
        let back = s.mul(&factor).unwrap().inv_factor(&c, 1).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn inv_factor_rejects_zero_shift() {
        let s = TruncatedSeries::one(5, 0);
        assert_eq!(
            s.inv_factor(&AuxMonomial::constant(1), 0),
            Err(Error::IllegalShift)
        );
    }

    #[test]
    fn two_part_counts_in_aux_coefficient() {
        // 1/(t1 q; q)_inf: coefficient of t1^2 q^4 counts partitions of 4
        // into exactly 2 parts: (3,1) and (2,2)
        let c = AuxMonomial::new(1, Aux::new(0, 1));
        let s = TruncatedSeries::one(4, 2).div_poch_infinite(&c, 1, 1).unwrap();
        assert_eq!(s.coeff(4, Aux::new(0, 2)).unwrap(), 2);
    }

    #[test]
    fn collapse_aux_sums_tracking_exponents() {
        let s = TruncatedSeries::from_entries(4, 2, [(0, Aux::NONE, 1), (3, Aux::new(1, 1), 1)]);
        let c = s.collapse_aux().unwrap();
        let expected = TruncatedSeries::from_entries(4, 0, [(0, Aux::NONE, 1), (3, Aux::NONE, 1)]);
        assert_eq!(c, expected);

        let plain = TruncatedSeries::from_entries(4, 0, [(2, Aux::NONE, 7)]);
        assert_eq!(plain.collapse_aux().unwrap(), plain);
    }

    #[test]
    fn coeff_out_of_range() {
        let s = TruncatedSeries::one(4, 0);
        assert_eq!(
            s.coeff(5, Aux::NONE),
            Err(Error::OutOfRange { degree: 5, order: 4 })
        );
    }

    #[test]
    fn overflow_is_reported() {
        let big = TruncatedSeries::monomial(2, 0, i128::MAX, 1, Aux::NONE);
        assert_eq!(big.mul(&big), Err(Error::Overflow));
        assert_eq!(big.add(&big), Err(Error::Overflow));
    }
}
