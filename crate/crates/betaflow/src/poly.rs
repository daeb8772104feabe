//! Small exact polynomial toolkit: evaluation, gcd, Sturm chains, interval
//! arithmetic. Coefficients are stored lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn sign(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn from_int(coeffs: &[BigInt]) -> QPoly {
    trim(coeffs.iter().map(|c| BigRational::from(c.clone())).collect())
}

pub(crate) fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn eval_int_at(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from(c.clone());
    }
    acc
}

/// Encloses `p([lo, hi])` by interval Horner evaluation.
pub(crate) fn eval_interval(
    p: &[BigRational],
    lo: &BigRational,
    hi: &BigRational,
) -> (BigRational, BigRational) {
    let mut acc_lo = BigRational::zero();
    let mut acc_hi = BigRational::zero();
    for c in p.iter().rev() {
        let products = [
            &acc_lo * lo,
            &acc_lo * hi,
            &acc_hi * lo,
            &acc_hi * hi,
        ];
        let mut min = products[0].clone();
        let mut max = products[0].clone();
        for q in &products[1..] {
            if *q < min {
                min = q.clone();
            }
            if *q > max {
                max = q.clone();
            }
        }
        acc_lo = min + c;
        acc_hi = max + c;
    }
    (acc_lo, acc_hi)
}

pub(crate) fn derivative(p: &[BigRational]) -> QPoly {
    if p.len() <= 1 {
        return Vec::new();
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect()
}

/// Quotient and remainder of `a / b` over the rationals; `b` must be nonzero.
pub(crate) fn div_rem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem: QPoly = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let factor = rem[dr].clone() / lead;
        for i in 0..=db {
            let t = &b[i] * &factor;
            rem[dr - db + i] -= t;
        }
        quot[dr - db] = factor;
        rem = trim(rem);
        if rem.is_empty() {
            break;
        }
    }
    (trim(quot), rem)
}

/// Monic gcd over the rationals; returns the zero polynomial only if both
/// inputs are zero.
pub(crate) fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

fn variations(chain: &[QPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let s = sign(&eval(p, x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
///
/// Requires `p(lo) != 0` and `p(hi) != 0`.
pub(crate) fn count_roots(p: &[BigRational], lo: &BigRational, hi: &BigRational) -> usize {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    debug_assert!(!eval(&p, lo).is_zero() && !eval(&p, hi).is_zero());
    let mut chain = vec![p.clone(), derivative(&p)];
    loop {
        let last = &chain[chain.len() - 1];
        if last.is_empty() {
            chain.pop();
            break;
        }
        if last.len() == 1 {
            break;
        }
        let (_, r) = div_rem(&chain[chain.len() - 2], last);
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    variations(&chain, lo) - variations(&chain, hi)
}

pub(crate) fn int_primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        return p;
    }
    let mut content = BigInt::zero();
    for c in &p {
        content = content.gcd(c);
    }
    if p.last().unwrap().is_negative() {
        content = -content;
    }
    for c in &mut p {
        *c /= &content;
    }
    p
}

/// Clears denominators, returning the primitive integer polynomial with
/// positive leading coefficient.
pub(crate) fn to_primitive_int(p: &[BigRational]) -> Vec<BigInt> {
    let p = trim(p.to_vec());
    let mut denom = BigInt::one();
    for c in &p {
        denom = denom.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| c.numer() * (&denom / c.denom()))
        .collect();
    int_primitive(ints)
}

pub(crate) fn is_squarefree(p: &[BigInt]) -> bool {
    let q = from_int(p);
    if q.len() <= 2 {
        return !q.is_empty();
    }
    gcd(&q, &derivative(&q)).len() <= 1
}

/// The squarefree part `p / gcd(p, p')` as a primitive integer polynomial.
pub(crate) fn squarefree_part(p: &[BigInt]) -> Vec<BigInt> {
    let q = from_int(p);
    let g = gcd(&q, &derivative(&q));
    if g.len() <= 1 {
        return int_primitive(p.to_vec());
    }
    let (quot, rem) = div_rem(&q, &g);
    debug_assert!(rem.is_empty());
    to_primitive_int(&quot)
}
