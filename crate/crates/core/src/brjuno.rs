//! Continued fractions with certified quotient extraction, Brjuno partial sums
//! `Σ ln(q_{n+1})/q_n`, and constructions of angles whose sums diverge.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A real number known to lie in the closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighPrecisionReal {
    lo: BigRational,
    hi: BigRational,
}

impl HighPrecisionReal {
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::input("zero denominator"));
        }
        let r = BigRational::new(num.into(), den.into());
        Ok(HighPrecisionReal { lo: r.clone(), hi: r })
    }

    pub fn interval(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::input("empty interval"));
        }
        Ok(HighPrecisionReal { lo, hi })
    }

    /// A decimal string is read as the truncation of a longer expansion:
    /// `0.d₁…d_k` encloses `[x, x + 10^-k]`.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("malformed decimal '{s}'"));
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let lo = BigRational::new(digits, scale.clone());
        let hi = lo.clone() + BigRational::new(BigInt::one(), scale);
        Ok(HighPrecisionReal { lo, hi })
    }

    /// `(a + b·√n)/c` with `√n` enclosed to `bits` binary digits.
    pub fn quadratic_surd(a: i64, b: i64, n: u64, c: i64, bits: u32) -> Result<Self> {
        if c == 0 {
            return Err(Error::input("zero denominator"));
        }
        let scale = BigUint::one() << bits;
        let s = (BigUint::from(n) * &scale * &scale).sqrt();
        let exact = &s * &s == BigUint::from(n) * &scale * &scale;
        let den = BigInt::from(scale);
        let r_lo = BigRational::new(BigInt::from(s.clone()), den.clone());
        let r_hi = if exact { r_lo.clone() } else { BigRational::new(BigInt::from(s + 1u32), den) };
        let bq = BigRational::from_integer(b.into());
        let (x, y) = (bq.clone() * &r_lo, bq * &r_hi);
        let (smin, smax) = if x <= y { (x, y) } else { (y, x) };
        let aq = BigRational::from_integer(a.into());
        let cq = BigRational::from_integer(c.into());
        let (p, q) = ((aq.clone() + smin) / &cq, (aq + smax) / &cq);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        Ok(HighPrecisionReal { lo, hi })
    }

    /// `γ = (√5 − 1)/2`.
    pub fn golden_mean(bits: u32) -> Self {
        Self::quadratic_surd(-1, 1, 5, 2, bits).expect("nonzero denominator")
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn to_f64(&self) -> f64 {
        let mid = (self.lo.clone() + &self.hi) / BigRational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

/// Partial quotients `a₁…a_N` of `θ ∈ (0,1)` and convergents `p_n/q_n`,
/// `n = 0…N`, with `p₀/q₀ = 0/1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigUint>,
    pub convergents: Vec<(BigUint, BigUint)>,
    /// Set when the input's precision could not certify all requested quotients.
    pub truncated: bool,
}

impl ContinuedFraction {
    pub fn from_quotients(quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.iter().any(|a| a.is_zero()) {
            return Err(Error::input("partial quotients must be positive"));
        }
        let mut convergents = vec![(BigUint::zero(), BigUint::one())];
        let (mut p2, mut q2) = (BigUint::one(), BigUint::zero());
        let (mut p1, mut q1) = (BigUint::zero(), BigUint::one());
        for a in &quotients {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            convergents.push((p, q));
        }
        Ok(ContinuedFraction { quotients, convergents, truncated: false })
    }

    pub fn denominators(&self) -> impl Iterator<Item = &BigUint> {
        self.convergents.iter().map(|(_, q)| q)
    }

    /// The last convergent as a float.
    pub fn approximation(&self) -> f64 {
        let (p, q) = self.convergents.last().expect("p0/q0 always present");
        BigRational::new(p.clone().into(), q.clone().into()).to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let quotients: Vec<String> = self.quotients.iter().map(|a| a.to_string()).collect();
        let convergents: Vec<[String; 2]> =
            self.convergents.iter().map(|(p, q)| [p.to_string(), q.to_string()]).collect();
        let mut st = s.serialize_struct("ContinuedFraction", 3)?;
        st.serialize_field("quotients", &quotients)?;
        st.serialize_field("convergents", &convergents)?;
        st.serialize_field("truncated", &self.truncated)?;
        st.end()
    }
}

/// Gauss-map expansion. A quotient is emitted only when every point of the
/// current enclosure yields the same `⌊1/x⌋`; otherwise the result is
/// returned with `truncated` set.
pub fn cf_expand(theta: &HighPrecisionReal, n: usize) -> Result<ContinuedFraction> {
    let (mut lo, mut hi) = (theta.lo.clone(), theta.hi.clone());
    if theta.is_exact() && (lo.is_zero() || lo.is_integer()) {
        return Err(Error::RationalInput(lo.to_string()));
    }
    if !lo.is_positive() || hi >= BigRational::one() {
        return Err(Error::input("theta must lie in (0,1)"));
    }
    let mut quotients = Vec::with_capacity(n);
    let mut truncated = false;
    while quotients.len() < n {
        if !lo.is_positive() {
            truncated = true;
            break;
        }
        let (inv_lo, inv_hi) = (hi.recip(), lo.recip());
        let (a_lo, a_hi) = (inv_lo.floor(), inv_hi.floor());
        if a_lo != a_hi {
            truncated = true;
            break;
        }
        let a = a_lo.to_integer();
        let a_q = BigRational::from_integer(a.clone());
        lo = inv_lo - &a_q;
        hi = inv_hi - &a_q;
        quotients.push(a.to_biguint().expect("quotient of a number in (0,1) is positive"));
        if lo == hi && lo.is_zero() {
            return Err(Error::RationalInput(theta.lo.to_string()));
        }
    }
    let mut cf = ContinuedFraction::from_quotients(quotients)?;
    cf.truncated = truncated;
    Ok(cf)
}

/// Whether `|x − p_n/q_n| < 1/(q_n q_{n+1})` holds at both ends of the
/// enclosure for every `n` with a successor.
pub fn check_approximation(theta: &HighPrecisionReal, cf: &ContinuedFraction) -> bool {
    cf.convergents.windows(2).all(|w| {
        let (p, q) = &w[0];
        let q1 = &w[1].1;
        let c = BigRational::new(p.clone().into(), q.clone().into());
        let bound = BigRational::new(BigInt::one(), BigInt::from(q * q1));
        [&theta.lo, &theta.hi].iter().all(|x| ((*x).clone() - &c).abs() < bound)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrjunoPartialSums {
    /// `ln(q_{n+1})/q_n` for `n = 0…N−1`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

impl BrjunoPartialSums {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Sum of the first `n` terms.
    pub fn sum_to(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.partial_sums[n.min(self.partial_sums.len()) - 1]
        }
    }
}

/// Natural log of a big integer to double precision, valid beyond the `f64` range.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit mantissa fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Terms are nonnegative; a quotient `a₁ = 1` gives `q₁ = 1` and a zero term.
pub fn brjuno_partial_sums(cf: &ContinuedFraction) -> Result<BrjunoPartialSums> {
    if cf.convergents.len() < 2 {
        return Err(Error::input("need at least two convergents"));
    }
    let terms: Vec<f64> = cf
        .convergents
        .windows(2)
        .map(|w| {
            let q = w[0].1.to_f64().unwrap_or(f64::INFINITY);
            ln_biguint(&w[1].1) / q
        })
        .collect();
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    Ok(BrjunoPartialSums { terms, partial_sums })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthRule {
    /// `a_{n+1} = ⌈e^{q_n}/q_n⌉`, so `q_{n+1} ≥ e^{q_n}` and each term is ≥ 1.
    ExpOverQ,
    /// `a_{n+1} = (q_n + 1)^{q_n}`; terms grow like `ln q_n`.
    PowerOfQ,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonBrjuno {
    pub theta: f64,
    pub cf: ContinuedFraction,
    /// Number of leading terms proven `≥ 1` by exact integer comparison.
    pub certified_terms: usize,
    pub truncated: bool,
}

impl NonBrjuno {
    /// Certified lower bound on the partial sum of the first `certified_terms` terms.
    pub fn certified_sum(&self) -> usize {
        self.certified_terms
    }
}

/// `e·2^p` enclosed between two integers.
fn e_fixed_point(p: u64) -> (BigUint, BigUint) {
    let one = BigUint::one() << p;
    let mut term = one.clone();
    let mut sum = one;
    let mut k = 1u32;
    while !term.is_zero() {
        term /= k;
        sum += &term;
        k += 1;
    }
    // Each floor division loses < 1 and the tail after the last nonzero term
    // is below 2, so e·2^p ∈ [sum, sum + k + 2].
    let hi = &sum + BigUint::from(k + 2);
    (sum, hi)
}

/// `⌈e^q/q⌉` and an integer upper bound `U` with `e^q ≤ U / 2^{p q}`, found by
/// doubling the working precision; `None` if `q·log₂e` exceeds the budget.
fn exp_over_q(q: &BigUint, max_bits: u64) -> Option<(BigUint, BigUint, u64)> {
    let qn = q.to_u64()?;
    if (qn as f64) * std::f64::consts::LOG2_E > max_bits as f64 {
        return None;
    }
    let mut p = 64u64;
    loop {
        let (lo, hi) = e_fixed_point(p);
        let lo_q = lo.pow(qn as u32);
        let hi_q = hi.pow(qn as u32);
        let den = (BigUint::one() << (p * qn)) * q;
        let a_lo = Integer::div_ceil(&lo_q, &den);
        let a_hi = Integer::div_ceil(&hi_q, &den);
        if a_lo == a_hi {
            return Some((a_lo, hi_q, p));
        }
        p *= 2;
        if p * qn > 4 * max_bits {
            return None;
        }
    }
}

/// Builds a finite continued-fraction prefix whose Brjuno sum diverges under
/// the growth rule and certifies as many leading terms `ln q_{n+1}/q_n ≥ 1` as
/// fit in `max_bits` of integer arithmetic.
pub fn make_non_brjuno(rule: GrowthRule, n: usize, max_bits: u64) -> NonBrjuno {
    let mut quotients: Vec<BigUint> = Vec::new();
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    let mut certified = 0;
    let mut truncated = false;
    while quotients.len() < n {
        let next = match rule {
            GrowthRule::ExpOverQ => match exp_over_q(&q, max_bits) {
                Some((a, upper, p)) => {
                    let q_next = &a * &q + &q_prev;
                    let shift = p * q.to_u64().expect("bounded by budget");
                    if certified == quotients.len() && (&q_next << shift) >= upper {
                        certified += 1;
                    }
                    Some(a)
                }
                None => None,
            },
            GrowthRule::PowerOfQ => {
                let e = q.to_u32().filter(|&e| (e as u64) * (q.bits() + 1) <= max_bits);
                e.map(|e| (&q + 1u32).pow(e))
            }
        };
        let Some(a) = next else {
            truncated = true;
            break;
        };
        let q_next = &a * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, q_next);
        quotients.push(a);
    }
    let cf = ContinuedFraction::from_quotients(quotients).expect("quotients are positive");
    NonBrjuno { theta: cf.approximation(), cf, certified_terms: certified, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib(n: usize) -> Vec<u64> {
        let mut v = vec![1u64, 1];
        while v.len() < n {
            let k = v.len();
            v.push(v[k - 1] + v[k - 2]);
        }
        v.truncate(n);
        v
    }

    #[test]
    fn golden_mean_convergents_are_fibonacci() {
        let cf = cf_expand(&HighPrecisionReal::golden_mean(256), 10).unwrap();
        assert!(!cf.truncated);
        assert!(cf.quotients.iter().all(|a| a == &BigUint::one()));
        let q: Vec<u64> = cf.denominators().take(10).map(|q| q.to_u64().unwrap()).collect();
        assert_eq!(q, fib(10));
    }

    #[test]
    fn sqrt2_minus_one_has_quotients_two() {
        let theta = HighPrecisionReal::quadratic_surd(-1, 1, 2, 1, 128).unwrap();
        let cf = cf_expand(&theta, 6).unwrap();
        assert_eq!(cf.quotients, vec![BigUint::from(2u32); 6]);
        assert!(check_approximation(&theta, &cf));
    }

    #[test]
    fn rational_input_rejected() {
        let third = HighPrecisionReal::exact(1, 3).unwrap();
        assert!(matches!(cf_expand(&third, 5), Err(Error::RationalInput(_))));
        let x = HighPrecisionReal::exact(5, 13).unwrap();
        assert!(matches!(cf_expand(&x, 10), Err(Error::RationalInput(_))));
    }

    #[test]
    fn precision_exhaustion_truncates() {
        let theta = HighPrecisionReal::golden_mean(32);
        let cf = cf_expand(&theta, 200).unwrap();
        assert!(cf.truncated);
        assert!(cf.quotients.len() < 200 && cf.quotients.len() > 10);
        assert!(cf.quotients.iter().all(|a| a == &BigUint::one()));
    }

    #[test]
    fn decimal_input() {
        let theta = HighPrecisionReal::from_decimal("0.6180339887498948482045868343656381").unwrap();
        let cf = cf_expand(&theta, 100).unwrap();
        assert!(cf.truncated);
        assert!(cf.quotients.len() >= 30);
        assert!(cf.quotients.iter().all(|a| a == &BigUint::one()));
        assert!(HighPrecisionReal::from_decimal("0.6x").is_err());
    }

    #[test]
    fn single_term_sum() {
        let cf = ContinuedFraction::from_quotients(vec![BigUint::from(7u32)]).unwrap();
        let s = brjuno_partial_sums(&cf).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.total(), s.terms[0]);
        assert!((s.terms[0] - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn golden_tail_is_small() {
        let cf = cf_expand(&HighPrecisionReal::golden_mean(512), 80).unwrap();
        let s = brjuno_partial_sums(&cf).unwrap();
        assert!(s.total() - s.sum_to(41) < 1e-6);
        assert!(s.partial_sums.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ln_of_huge_integers() {
        let x = BigUint::one() << 5000u32;
        assert!((ln_biguint(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
    }

    #[test]
    fn exp_rule_quotients() {
        let nb = make_non_brjuno(GrowthRule::ExpOverQ, 3, 1 << 16);
        let a: Vec<u64> = nb.cf.quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        // ⌈e/1⌉ = 3, ⌈e³/3⌉ = 7, ⌈e²²/22⌉ = 162 950 584.
        assert_eq!(a, vec![3, 7, 162_950_584]);
        assert_eq!(nb.certified_terms, 3);
        assert!(!nb.truncated);
        let nb = make_non_brjuno(GrowthRule::ExpOverQ, 0, 1 << 16);
        assert_eq!(nb.certified_terms, 0);
    }

    #[test]
    fn power_rule_exceeds_bound() {
        let nb = make_non_brjuno(GrowthRule::PowerOfQ, 3, 1 << 16);
        let s = brjuno_partial_sums(&nb.cf).unwrap();
        assert!(s.total() > 5.0);
    }
}
