//! Exact arithmetic for beta-expansions of 1.
//!
//! A base `β > 1` is given by an integer polynomial together with a rational
//! isolating interval ([`AlgebraicNumber`]). Remainders of the greedy digit
//! recursion live in the number field `Q[x]/(p)` as rational coordinate
//! vectors in the power basis, so every floor and every equality test is
//! decided exactly: by residue arithmetic when possible, and by interval
//! refinement with a gcd vanishing guard otherwise.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly;
use crate::seq::{Digit, EventuallyPeriodicSeq, GeneratingSequence, SeqError, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("isolating interval must satisfy lo < hi")]
    EmptyInterval,
    #[error("isolating interval must lie strictly above 1")]
    IntervalNotAboveOne,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial vanishes at an interval endpoint")]
    RootAtEndpoint,
    #[error("interval isolates {0} real roots, expected exactly one")]
    WrongRootCount(usize),
    #[error("expansion truncated after {0} digits; no generating sequence available")]
    Truncated(usize),
    #[error("expansion denotes β = 1, which is not a valid base")]
    DegenerateExpansion,
    #[error("malformed polynomial text: {0}")]
    BadPolynomial(String),
    #[error("malformed rational or interval text: {0}")]
    BadRational(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A real algebraic `β > 1`: primitive squarefree integer polynomial with
/// positive leading coefficient and a rational interval isolating exactly one
/// real root.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    min_poly: Vec<BigInt>,
    qpoly: poly::QPoly,
    lo: BigRational,
    hi: BigRational,
}

impl AlgebraicNumber {
    pub fn new(coeffs: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Result<Self, ArithError> {
        let min_poly = poly::int_primitive(coeffs);
        if min_poly.len() < 2 {
            return Err(ArithError::ConstantPolynomial);
        }
        if lo >= hi {
            return Err(ArithError::EmptyInterval);
        }
        if lo <= BigRational::one() {
            return Err(ArithError::IntervalNotAboveOne);
        }
        if !poly::is_squarefree(&min_poly) {
            return Err(ArithError::NotSquarefree);
        }
        let qpoly = poly::from_int(&min_poly);
        if poly::eval(&qpoly, &lo).is_zero() || poly::eval(&qpoly, &hi).is_zero() {
            return Err(ArithError::RootAtEndpoint);
        }
        let roots = poly::count_roots(&qpoly, &lo, &hi);
        if roots != 1 {
            return Err(ArithError::WrongRootCount(roots));
        }
        Ok(AlgebraicNumber {
            min_poly,
            qpoly,
            lo,
            hi,
        })
    }

    /// An integer base `n ≥ 2`, as the root of `x - n`.
    pub fn from_integer(n: u32) -> Result<Self, ArithError> {
        let n = BigInt::from(n);
        let lo = BigRational::new(&n * 2 - 1, BigInt::from(2));
        let hi = BigRational::new(&n * 2 + 1, BigInt::from(2));
        Self::new(vec![-n, BigInt::one()], lo, hi)
    }

    /// A rational base `q > 1`, as the root of `denom·x - numer`.
    pub fn from_rational(q: BigRational) -> Result<Self, ArithError> {
        let lo = (BigRational::one() + &q) / BigRational::from(BigInt::from(2));
        let hi = &q + BigRational::one();
        Self::new(vec![-q.numer().clone(), q.denom().clone()], lo, hi)
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    /// Exact sign of `f(β)` where `f` has rational coefficients.
    ///
    /// A nonzero residue can still vanish at β when the polynomial is not
    /// actually minimal; the gcd guard keeps the interval refinement from
    /// looping in that case.
    pub(crate) fn sign_at_root(&self, f: &[BigRational]) -> i8 {
        let f = poly::trim(poly::div_rem(&poly::trim(f.to_vec()), &self.qpoly).1);
        if f.is_empty() {
            return 0;
        }
        let g = poly::gcd(&f, &self.qpoly);
        if g.len() > 1 && poly::count_roots(&g, &self.lo, &self.hi) > 0 {
            return 0;
        }
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        let sign_lo = poly::sign(&poly::eval(&self.qpoly, &lo));
        loop {
            let (a, b) = poly::eval_interval(&f, &lo, &hi);
            if poly::sign(&a) > 0 {
                return 1;
            }
            if poly::sign(&b) < 0 {
                return -1;
            }
            let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
            let s = poly::sign(&poly::eval(&self.qpoly, &mid));
            if s == 0 {
                // β is exactly this rational point.
                return poly::sign(&poly::eval(&f, &mid));
            }
            if s == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    fn one(&self) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[0] = BigRational::one();
        FieldElement { coords }
    }

    fn mul_beta(&self, fe: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut coords = vec![BigRational::zero(); d];
        for i in 0..d - 1 {
            coords[i + 1] = fe.coords[i].clone();
        }
        let top = fe.coords[d - 1].clone();
        if !top.is_zero() {
            let lead = BigRational::from(self.min_poly[d].clone());
            for (i, c) in coords.iter_mut().enumerate() {
                *c -= &top * BigRational::from(self.min_poly[i].clone()) / &lead;
            }
        }
        FieldElement { coords }
    }

    fn sub_integer(&self, fe: &FieldElement, m: &BigInt) -> FieldElement {
        let mut coords = fe.coords.clone();
        coords[0] -= BigRational::from(m.clone());
        FieldElement { coords }
    }

    fn sign_of(&self, fe: &FieldElement) -> i8 {
        self.sign_at_root(&fe.coords)
    }

    /// `⌊v⌋` for `0 ≤ v < β`, by binary search on exact sign tests.
    fn floor_of(&self, fe: &FieldElement) -> BigInt {
        debug_assert!(self.sign_of(fe) >= 0);
        let mut lo_m = BigInt::zero();
        let mut hi_m = self.hi.floor().to_integer() + 1;
        debug_assert!(self.sign_of(&self.sub_integer(fe, &hi_m)) < 0);
        while &hi_m - &lo_m > BigInt::one() {
            let mid = (&lo_m + &hi_m) / 2;
            if self.sign_of(&self.sub_integer(fe, &mid)) >= 0 {
                lo_m = mid;
            } else {
                hi_m = mid;
            }
        }
        lo_m
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of {} in ({}, {})",
            poly_to_string(&self.min_poly),
            self.lo,
            self.hi
        )
    }
}

/// An element of `Q[x]/(min_poly)` as coordinates in the power basis
/// `1, β, ..., β^{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }
}

/// Outcome of the greedy digit recursion for a given digit budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionStatus {
    /// The remainder hit zero after `length` digits; digit `length` is
    /// nonzero and all later digits are zero.
    Finite { length: usize },
    /// Remainders repeat; `preperiod` and `period` are minimal.
    EventuallyPeriodic { preperiod: usize, period: usize },
    /// Neither termination nor repetition within the digit budget.
    Truncated { max_digits: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionResult {
    digits: Vec<Digit>,
    status: ExpansionStatus,
}

impl ExpansionResult {
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn status(&self) -> &ExpansionStatus {
        &self.status
    }

    /// The expansion as an eventually periodic sequence, when infinite.
    pub fn to_seq(&self) -> Option<EventuallyPeriodicSeq> {
        match self.status {
            ExpansionStatus::EventuallyPeriodic { preperiod, .. } => Some(
                EventuallyPeriodicSeq::new(
                    Word::new(self.digits[..preperiod].to_vec()),
                    Word::new(self.digits[preperiod..].to_vec()),
                )
                .unwrap(),
            ),
            _ => None,
        }
    }

    /// Derives the generating sequence: the expansion itself when infinite,
    /// and the periodization `(a_1 ... a_{k-1} (a_k - 1))^∞` when finite.
    pub fn generating_sequence(&self) -> Result<GeneratingSequence, ArithError> {
        match self.status {
            ExpansionStatus::Finite { length } => {
                let mut per: Vec<Digit> = self.digits[..length].to_vec();
                let last = per.last().unwrap().value();
                *per.last_mut().unwrap() = Digit::new(last - 1);
                if per.iter().all(|d| d.is_zero()) {
                    return Err(ArithError::DegenerateExpansion);
                }
                let seq = EventuallyPeriodicSeq::new(Word::default(), Word::new(per))?;
                Ok(GeneratingSequence::new(&seq)?)
            }
            ExpansionStatus::EventuallyPeriodic { .. } => {
                Ok(GeneratingSequence::new(&self.to_seq().unwrap())?)
            }
            ExpansionStatus::Truncated { max_digits } => Err(ArithError::Truncated(max_digits)),
        }
    }
}

impl fmt::Display for ExpansionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            ExpansionStatus::Finite { length } => {
                for d in &self.digits[..length] {
                    write!(f, "{d}")?;
                }
                write!(f, " (finite, {length} digits)")
            }
            ExpansionStatus::EventuallyPeriodic { .. } => {
                write!(f, "{} (eventually periodic)", self.to_seq().unwrap())
            }
            ExpansionStatus::Truncated { max_digits } => {
                for d in &self.digits {
                    write!(f, "{d}")?;
                }
                write!(f, "... (truncated at {max_digits} digits)")
            }
        }
    }
}

/// Greedy expansion of 1 in base β with exact remainder arithmetic.
///
/// Starting from `r_0 = 1`, each step takes `x_n = ⌊β r_{n-1}⌋` and
/// `r_n = β r_{n-1} - x_n`. The recursion stops when the remainder is zero,
/// when a remainder repeats, or after `max_digits` steps.
pub fn beta_expansion_of_one(beta: &AlgebraicNumber, max_digits: usize) -> ExpansionResult {
    let mut r = beta.one();
    let mut digits: Vec<Digit> = Vec::new();
    let mut seen: HashMap<Vec<BigRational>, usize> = HashMap::new();
    seen.insert(r.coords.clone(), 0);
    for step in 1..=max_digits {
        let y = beta.mul_beta(&r);
        let m = beta.floor_of(&y);
        let digit = m
            .to_u32()
            .expect("digit exceeds u32::MAX; base is unreasonably large");
        digits.push(Digit::new(digit));
        r = beta.sub_integer(&y, &m);
        if beta.sign_of(&r) == 0 {
            debug_assert!(!digits[step - 1].is_zero());
            return ExpansionResult {
                digits,
                status: ExpansionStatus::Finite { length: step },
            };
        }
        if let Some(&i) = seen.get(&r.coords) {
            let folded = EventuallyPeriodicSeq::new(
                Word::new(digits[..i].to_vec()),
                Word::new(digits[i..step].to_vec()),
            )
            .unwrap()
            .normalize();
            let (n, p) = (folded.preperiod_len(), folded.period_len());
            let digits = (0..n + p).map(|j| folded.digit(j)).collect();
            return ExpansionResult {
                digits,
                status: ExpansionStatus::EventuallyPeriodic {
                    preperiod: n,
                    period: p,
                },
            };
        }
        seen.insert(r.coords.clone(), step);
    }
    ExpansionResult {
        digits,
        status: ExpansionStatus::Truncated { max_digits },
    }
}

/// Coefficients (lowest degree first, leading `-1`) of the polynomial
/// obtained by clearing denominators in
/// `Σ g_i x^{-i} + (Σ g_{n+j} x^{-(n+j)})·x^p/(x^p - 1) - 1`.
///
/// On `(1, ∞)` this polynomial has the same sign as the series expression,
/// so its unique root there is β.
fn beta_poly_raw(g: &GeneratingSequence) -> Vec<BigInt> {
    let n = g.preperiod_len();
    let p = g.period_len();
    let mut coeffs = vec![BigInt::zero(); n + p + 1];
    for i in 1..=n {
        let gi = BigInt::from(g.digit(i - 1).value());
        coeffs[n - i + p] += &gi;
        coeffs[n - i] -= &gi;
    }
    for j in 1..=p {
        let gj = BigInt::from(g.digit(n + j - 1).value());
        coeffs[p - j] += &gj;
    }
    coeffs[n + p] -= BigInt::one();
    coeffs[n] += BigInt::one();
    coeffs
}

/// The defining integer polynomial of β for a generating sequence, primitive
/// with positive leading coefficient.
pub fn beta_polynomial(g: &GeneratingSequence) -> Vec<BigInt> {
    poly::int_primitive(beta_poly_raw(g))
}

/// A rational interval of width at most `precision` containing the unique
/// `β > 1` whose generating sequence is `g`, found by exact bisection.
pub fn beta_from_generating(g: &GeneratingSequence, precision: &BigRational) -> (BigRational, BigRational) {
    assert!(precision.is_positive());
    let praw = poly::from_int(&beta_poly_raw(g));
    let two = BigRational::from(BigInt::from(2));

    let mut off = BigRational::one();
    let mut lo = BigRational::one() + &off;
    while poly::sign(&poly::eval(&praw, &lo)) <= 0 {
        off /= &two;
        lo = BigRational::one() + &off;
    }
    let mut hi = &lo + BigRational::one();
    loop {
        match poly::sign(&poly::eval(&praw, &hi)) {
            -1 => break,
            0 => {
                // hi is exactly β
                let half = precision / &two;
                let lower = (&hi - &half).max((BigRational::one() + &hi) / &two);
                return (lower, &hi + &half);
            }
            _ => hi += BigRational::one(),
        }
    }
    while &hi - &lo > *precision {
        let mid = (&lo + &hi) / &two;
        match poly::sign(&poly::eval(&praw, &mid)) {
            1 => lo = mid,
            -1 => hi = mid,
            _ => {
                let half = precision / &two;
                let lower = (&mid - &half).max((BigRational::one() + &mid) / &two);
                return (lower, mid + half);
            }
        }
    }
    (lo, hi)
}

/// Lifts a generating sequence to an [`AlgebraicNumber`]: the squarefree part
/// of the defining polynomial together with a bisected isolating interval.
pub fn algebraic_from_generating(g: &GeneratingSequence) -> Result<AlgebraicNumber, ArithError> {
    let sf = poly::squarefree_part(&beta_polynomial(g));
    let precision = BigRational::new(BigInt::one(), BigInt::from(1 << 20));
    let (lo, hi) = beta_from_generating(g, &precision);
    AlgebraicNumber::new(sf, lo, hi)
}

/// Enclosure of `ln q` for rational `q > 1` with truncation error at most
/// `err`, via the artanh series at `z = (q-1)/(q+1)`.
fn ln_bounds(q: &BigRational, err: &BigRational) -> (BigRational, BigRational) {
    assert!(*q > BigRational::one());
    let z = (q - BigRational::one()) / (q + BigRational::one());
    let z2 = &z * &z;
    let two = BigRational::from(BigInt::from(2));
    let mut sum = BigRational::zero();
    let mut zpow = z.clone();
    let mut k = 0u32;
    loop {
        sum += &two * &zpow / BigRational::from(BigInt::from(2 * k + 1));
        // tail bound: 2 Σ_{j>k} z^{2j+1}/(2j+1) ≤ 2 z^{2k+3} / ((2k+3)(1-z²))
        let bound = &two * &zpow * &z2
            / (BigRational::from(BigInt::from(2 * k + 3)) * (BigRational::one() - &z2));
        if bound <= *err {
            return (sum.clone(), sum + bound);
        }
        zpow *= &z2;
        k += 1;
    }
}

/// Enclosure of the topological entropy `log β` of the beta-shift of `g`.
pub fn entropy(g: &GeneratingSequence, precision: &BigRational) -> (BigRational, BigRational) {
    let two = BigRational::from(BigInt::from(2));
    let eight = BigRational::from(BigInt::from(8));
    let (lo, hi) = beta_from_generating(g, &(precision / &two));
    let err = precision / &eight;
    let (ln_lo, _) = ln_bounds(&lo, &err);
    let (_, ln_hi) = ln_bounds(&hi, &err);
    (ln_lo, ln_hi)
}

/// Renders an integer polynomial as `x^4-x^3-2x^2+1`.
pub fn poly_to_string(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push('-');
        } else {
            out.push('+');
        }
        let show_coeff = i == 0 || !mag.is_one();
        if show_coeff {
            out.push_str(&mag.to_string());
        }
        if i >= 1 {
            out.push('x');
            if i >= 2 {
                out.push_str(&format!("^{i}"));
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses `x^4-x^3-2x^2+1` into integer coefficients (lowest degree first).
pub fn parse_poly(text: &str) -> Result<Vec<BigInt>, ArithError> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(ArithError::BadPolynomial("empty input".into()));
    }
    let bad = |msg: &str| ArithError::BadPolynomial(msg.to_string());
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if !terms.is_empty() {
            return Err(bad("missing sign between terms"));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff = if start == i {
            sign
        } else {
            sign * text[start..i].parse::<BigInt>().unwrap()
        };
        let exp = if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let estart = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if estart == i {
                    return Err(bad("missing exponent after '^'"));
                }
                text[estart..i]
                    .parse::<usize>()
                    .map_err(|_| bad("exponent too large"))?
            } else {
                1
            }
        } else {
            if start == i {
                return Err(bad("expected coefficient or 'x'"));
            }
            0
        };
        terms.push((coeff, exp));
    }
    let degree = terms.iter().map(|(_, e)| *e).max().unwrap();
    let mut coeffs = vec![BigInt::zero(); degree + 1];
    for (c, e) in terms {
        coeffs[e] += c;
    }
    Ok(coeffs)
}

/// Parses a rational in `a/b` or integer form.
pub fn parse_rational(text: &str) -> Result<BigRational, ArithError> {
    let bad = || ArithError::BadRational(text.to_string());
    match text.split_once('/') {
        Some((a, b)) => {
            let numer: BigInt = a.trim().parse().map_err(|_| bad())?;
            let denom: BigInt = b.trim().parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(numer, denom))
        }
        None => {
            let n: BigInt = text.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
    }
}

/// Parses `lo,hi` with rational endpoints.
pub fn parse_interval(text: &str) -> Result<(BigRational, BigRational), ArithError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| ArithError::BadRational(text.to_string()))?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}
