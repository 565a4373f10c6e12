//! The counting bound on logical failure of unit-weight matching, in exact
//! rational arithmetic.
//!
//! A crossing path of `m` lines defeats matching only if at least `ceil(m/2)`
//! of its lines carry errors. With line probability `eps` this happens with
//! probability at most `sum_{i >= ceil(m/2)} C(m, i) eps^i <= 2^m eps^ceil(m/2)`.
//! There are at most `3 n^2 11^(m-1)` paths of length `m` through an `n^3`
//! volume, and summing over `m > n` gives
//! `(3n^2/11) (22 sqrt(eps))^(n+1) / (1 - 22 sqrt(eps))`, finite for
//! `eps < 1/484`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Decimal digits kept when `sqrt(eps)` is irrational.
const SQRT_DIGITS: u32 = 40;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

fn binomial(m: u32, i: u32) -> BigUint {
    let mut c = BigUint::one();
    for k in 0..i {
        c = c * BigUint::from(m - k) / BigUint::from(k + 1);
    }
    c
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if eps.is_negative() || *eps > BigRational::one() {
        return Err(Error::InvalidProbability(to_f64(eps)));
    }
    Ok(())
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument { name: "m", reason: "path length must be at least 1" });
    }
    Ok(())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `sum_{i=ceil(m/2)}^{m} C(m, i) eps^i`.
///
/// This is the binomial tail without the `(1 - eps)` factors, so it already
/// overestimates the chance that half the path fails.
pub fn path_failure_exact(m: u32, eps: &BigRational) -> Result<BigRational> {
    check_m(m)?;
    check_eps(eps)?;
    let mut total = BigRational::zero();
    for i in m.div_ceil(2)..=m {
        total += BigRational::from_integer(binomial(m, i).into()) * pow(eps, i);
    }
    Ok(total)
}

/// `2^m eps^ceil(m/2)`.
///
/// Restricted to `eps <= 1/2`: dropping the `1/(1 - eps)` factor on the way to
/// this form needs `C(m, ceil(m/2)) / (1 - eps) <= 2^m`.
pub fn path_failure_bound(m: u32, eps: &BigRational) -> Result<BigRational> {
    check_m(m)?;
    check_eps(eps)?;
    if *eps > ratio(1, 2) {
        return Err(Error::InvalidArgument { name: "eps", reason: "bound only holds for eps <= 1/2" });
    }
    Ok(pow(&BigRational::from_integer(2.into()), m) * pow(eps, m.div_ceil(2)))
}

/// `3 n^2 11^(m-1)`, the number of non-backtracking paths of `m` lines from three faces of an `n^3` volume.
pub fn path_count_bound(n: u32, m: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument { name: "n", reason: "volume side must be at least 1" });
    }
    check_m(m)?;
    Ok(BigUint::from(3u32) * BigUint::from(n) * BigUint::from(n) * num_traits::pow(BigUint::from(11u32), (m - 1) as usize))
}

/// The largest line probability for which the bound converges: `1/484`.
pub fn critical_epsilon() -> BigRational {
    ratio(1, 484)
}

/// `sqrt(x)` rounded up to [`SQRT_DIGITS`] decimals; exact when `x` is a rational square.
pub fn sqrt_up(x: &BigRational) -> BigRational {
    let (n, d) = (x.numer(), x.denom());
    let nd = n * d;
    let root = nd.sqrt();
    if &root * &root == nd {
        return BigRational::new(root, d.clone());
    }
    let scale = num_traits::pow(BigInt::from(10), SQRT_DIGITS as usize);
    let scaled = &nd * &scale * &scale;
    let mut r = scaled.sqrt();
    if &r * &r != scaled {
        r += 1;
    }
    BigRational::new(r, d * scale)
}

/// `22 sqrt(eps)` (rounded up), after checking it is below 1.
fn ratio_x(eps: &BigRational) -> Result<BigRational> {
    check_eps(eps)?;
    if eps >= &critical_epsilon() {
        return Err(Error::Divergent { eps: to_f64(eps) });
    }
    let x = BigRational::from_integer(22.into()) * sqrt_up(eps);
    if x >= BigRational::one() {
        return Err(Error::Divergent { eps: to_f64(eps) });
    }
    Ok(x)
}

/// `(3 n^2 / 11) (22 sqrt(eps))^(n+1) / (1 - 22 sqrt(eps))`.
///
/// Errors with [`Error::Divergent`] once `eps >= 1/484`. An irrational
/// `sqrt(eps)` is rounded up, so the value stays an upper bound.
pub fn logical_error_bound(n: u32, eps: &BigRational) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument { name: "n", reason: "volume side must be at least 1" });
    }
    let x = ratio_x(eps)?;
    let lead = ratio(3 * n as i64 * n as i64, 11);
    Ok(lead * pow(&x, n + 1) / (BigRational::one() - x))
}

/// `sum_{m=n+1}^{max_m} 3 n^2 11^(m-1) 2^m eps^(m/2)`: the series whose limit is [`logical_error_bound`].
pub fn summed_bound(n: u32, eps: &BigRational, max_m: u32) -> Result<BigRational> {
    check_eps(eps)?;
    let root = sqrt_up(eps);
    let mut total = BigRational::zero();
    for m in n + 1..=max_m {
        let count = BigRational::from_integer(path_count_bound(n, m)?.into());
        total += count * pow(&BigRational::from_integer(2.into()), m) * pow(&root, m);
    }
    Ok(total)
}

/// Physical error rate at which lines of probability `c * p` reach the critical `1/484`.
pub fn threshold_from_linear_coefficient(c: &BigRational) -> Result<BigRational> {
    if !c.is_positive() {
        return Err(Error::InvalidArgument { name: "c", reason: "coefficient must be positive" });
    }
    Ok(critical_epsilon() / c)
}

/// Every quantity of the bound chain for one `(n, m, eps)`, plus the threshold for a line coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: u32,
    pub m: u32,
    pub eps: BigRational,
    pub path_failure_exact: BigRational,
    /// `None` when `eps > 1/2`.
    pub path_failure_bound: Option<BigRational>,
    pub path_count_bound: BigUint,
    /// `None` when the series diverges.
    pub logical_error_bound: Option<BigRational>,
    pub critical_eps: BigRational,
    pub coefficient: BigRational,
    pub threshold: BigRational,
}

impl BoundReport {
    pub fn new(n: u32, m: u32, eps: BigRational, coefficient: BigRational) -> Result<Self> {
        Ok(Self {
            n,
            m,
            path_failure_exact: path_failure_exact(m, &eps)?,
            path_failure_bound: path_failure_bound(m, &eps).ok(),
            path_count_bound: path_count_bound(n, m)?,
            logical_error_bound: match logical_error_bound(n, &eps) {
                Ok(v) => Some(v),
                Err(Error::Divergent { .. }) => None,
                Err(e) => return Err(e),
            },
            critical_eps: critical_epsilon(),
            threshold: threshold_from_linear_coefficient(&coefficient)?,
            coefficient,
            eps,
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: &Option<BigRational>| x.as_ref().map_or(String::from("diverges"), |v| alloc::format!("{:e}", to_f64(v)));
        writeln!(f, "n = {}, m = {}, eps = {} ({:e})", self.n, self.m, self.eps, to_f64(&self.eps))?;
        writeln!(f, "path failure (binomial sum) = {:e}", to_f64(&self.path_failure_exact))?;
        writeln!(f, "path failure bound 2^m eps^ceil(m/2) = {}", opt(&self.path_failure_bound))?;
        writeln!(f, "path count bound 3n^2 11^(m-1) = {}", self.path_count_bound)?;
        writeln!(f, "logical error bound = {}", opt(&self.logical_error_bound))?;
        writeln!(f, "critical eps = {} ({:e})", self.critical_eps, to_f64(&self.critical_eps))?;
        write!(f, "threshold for eps = {} p: {} ({:e})", self.coefficient, self.threshold, to_f64(&self.threshold))
    }
}

/// Parses `"a/b"`, a decimal such as `"0.0001"`, or scientific notation such as `"1e-4"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if frac.contains(['+', '-']) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let mut digits = String::from(int);
    digits.push_str(frac);
    if digits == "-" || digits == "+" || digits.is_empty() {
        return None;
    }
    let value: BigInt = digits.parse().ok()?;
    let exp = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if exp >= 0 {
        BigRational::from_integer(value * num_traits::pow(ten, exp as usize))
    } else {
        BigRational::new(value, num_traits::pow(ten, (-exp) as usize))
    })
}

/// Rows `(n, eps, bound)` for a grid; divergent entries are `None`.
pub fn bound_table(ns: &[u32], epss: &[BigRational]) -> Result<Vec<(u32, BigRational, Option<BigRational>)>> {
    let mut rows = Vec::new();
    for eps in epss {
        for &n in ns {
            let b = match logical_error_bound(n, eps) {
                Ok(v) => Some(v),
                Err(Error::Divergent { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push((n, eps.clone(), b));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_exactly() {
        assert_eq!(q("1/484"), ratio(1, 484));
        assert_eq!(q("0.0001"), ratio(1, 10000));
        assert_eq!(q("1e-4"), ratio(1, 10000));
        assert_eq!(q("2.5E-3"), ratio(1, 400));
        assert_eq!(q("3"), ratio(3, 1));
        assert_eq!(q(".5"), ratio(1, 2));
        assert_eq!(q("-0.5"), ratio(-1, 2));
        for bad in ["", "1/0", "abc", "1e", "0.-1", "-"] {
            assert!(parse_rational(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn exact_examples() {
        assert_eq!(path_failure_exact(1, &q("0.1")).unwrap(), q("0.1"));
        assert_eq!(path_failure_exact(3, &q("0.1")).unwrap(), q("0.031"));
        assert_eq!(path_failure_exact(2, &q("0")).unwrap(), q("0"));
        assert!(path_failure_exact(0, &q("0.1")).is_err());
        assert!(path_failure_exact(2, &q("1.5")).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(path_failure_bound(3, &q("0.1")).unwrap(), q("0.08"));
        assert_eq!(path_failure_bound(1, &q("0.25")).unwrap(), q("0.5"));
        assert_eq!(path_failure_bound(4, &q("0")).unwrap(), q("0"));
        assert!(path_failure_bound(3, &q("0.51")).is_err());
        assert!(path_failure_bound(3, &q("1/2")).is_ok());
    }

    #[test]
    fn count_examples() {
        assert_eq!(path_count_bound(4, 5).unwrap(), BigUint::from(702_768u32));
        assert_eq!(path_count_bound(1, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(path_count_bound(4, 3).unwrap(), BigUint::from(5808u32));
        assert!(path_count_bound(0, 3).is_err());
        // Far beyond u64.
        assert_eq!(
            path_count_bound(10, 40).unwrap().to_string(),
            (BigUint::from(300u32) * num_traits::pow(BigUint::from(11u32), 39)).to_string()
        );
    }

    #[test]
    fn logical_bound_examples() {
        // sqrt(1e-4) is exact: (48/11) 0.22^5 / 0.78.
        let v = logical_error_bound(4, &q("1e-4")).unwrap();
        assert_eq!(v, ratio(48, 11) * pow(&q("0.22"), 5) / q("0.78"));
        assert!((to_f64(&v) - 2.883e-3).abs() < 1e-6);
        assert!(matches!(logical_error_bound(4, &q("1/484")), Err(Error::Divergent { .. })));
        assert!(matches!(logical_error_bound(4, &q("0.01")), Err(Error::Divergent { .. })));
        assert!(logical_error_bound(4, &(q("1/484") - q("1e-30"))).is_ok());
        for n in 1..8 {
            assert!(logical_error_bound(n, &q("0")).unwrap().is_zero());
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_from_linear_coefficient(&q("14/5")).unwrap(), q("5/6776"));
        assert_eq!(threshold_from_linear_coefficient(&q("1")).unwrap(), q("1/484"));
        let t = to_f64(&q("5/6776"));
        assert!((t - 7.3789e-4).abs() < 1e-8);
        assert!(threshold_from_linear_coefficient(&q("0")).is_err());
    }

    #[test]
    fn sqrt_rounds_up() {
        assert_eq!(sqrt_up(&q("1/4")), q("1/2"));
        assert_eq!(sqrt_up(&q("1/484")), q("1/22"));
        let r = sqrt_up(&q("2"));
        assert!(&r * &r > q("2"));
        assert!(&r * &r - q("2") < q("1e-38"));
    }

    #[test]
    fn chain_holds_on_grid() {
        for eps in ["0.01", "0.05", "0.1", "0.2", "0.3", "0.49"] {
            let eps = q(eps);
            for m in 1..=20 {
                assert!(path_failure_exact(m, &eps).unwrap() <= path_failure_bound(m, &eps).unwrap());
            }
        }
    }

    #[test]
    fn series_converges_to_closed_form() {
        let eps = q("1e-4");
        for n in 2..=4 {
            let closed = logical_error_bound(n, &eps).unwrap();
            let partial = summed_bound(n, &eps, 200).unwrap();
            assert!(partial < closed);
            assert!(to_f64(&((&closed - &partial) / &closed)) < 1e-6);
        }
    }

    #[test]
    fn suppression_at_small_eps() {
        let eps = q("1e-4");
        for n in 3..60 {
            assert!(logical_error_bound(n + 1, &eps).unwrap() < logical_error_bound(n, &eps).unwrap());
        }
    }

    #[test]
    fn report_collects_everything() {
        let r = BoundReport::new(4, 5, q("1e-4"), q("14/5")).unwrap();
        assert_eq!(r.path_count_bound, BigUint::from(702_768u32));
        assert_eq!(r.threshold, q("5/6776"));
        assert!(r.logical_error_bound.is_some());
        let r = BoundReport::new(4, 5, q("0.6"), q("1")).unwrap();
        assert!(r.path_failure_bound.is_none() && r.logical_error_bound.is_none());
        assert!(alloc::format!("{r}").contains("diverges"));
    }

    proptest! {
        #[test]
        fn exact_below_bound(m in 1u32..30, num in 0i64..=500) {
            let eps = ratio(num, 1000);
            prop_assert!(path_failure_exact(m, &eps).unwrap() <= path_failure_bound(m, &eps).unwrap());
        }

        /// Consecutive bounds differ by the factor `((n+1)/n)^2 * 22 sqrt(eps)`, so the
        /// bound shrinks with `n` exactly when that factor is below 1.
        #[test]
        fn suppression_is_monotone_past_the_crossover(n in 1u32..60, num in 1i64..=1000) {
            let eps = ratio(81, 48400) * ratio(num, 1000);
            let a = logical_error_bound(n, &eps).unwrap();
            let b = logical_error_bound(n + 1, &eps).unwrap();
            let x = BigRational::from_integer(22.into()) * sqrt_up(&eps);
            let factor = ratio((n as i64 + 1).pow(2), (n as i64).pow(2)) * x;
            prop_assert_eq!(b < a, factor < BigRational::one());
        }
    }
}
