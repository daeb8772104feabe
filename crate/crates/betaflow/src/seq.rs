//! Digits, finite words, and eventually periodic digit sequences.
//!
//! A one-sided sequence `g = g_1 g_2 ...` is stored as a preperiod word
//! together with a nonempty period word, written `pre(per)` in text form,
//! e.g. `11(10)` for the sequence `1110101010...`. [`EventuallyPeriodicSeq`]
//! is the raw representation; [`GeneratingSequence`] additionally guarantees
//! that every shift of the sequence is lexicographically at most the sequence
//! itself, which is exactly the condition for the sequence to generate the
//! language of a beta-shift.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

/// A single symbol of the alphabet `{0, 1, ..., ⌊β⌋}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Digit(u32);

impl Digit {
    pub const ZERO: Digit = Digit(0);
    pub const ONE: Digit = Digit(1);

    pub fn new(value: u32) -> Self {
        Digit(value)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Digits above 9 use bracketed notation so words round-trip.
        if self.0 <= 9 {
            write!(f, "{}", self.0)
        } else {
            write!(f, "[{}]", self.0)
        }
    }
}

/// A finite word over the digit alphabet.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Self {
        Word(digits)
    }

    pub fn from_values(values: &[u32]) -> Self {
        Word(values.iter().map(|&v| Digit(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn digit_sum(&self) -> u64 {
        self.0.iter().map(|d| u64::from(d.0)).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, SeqError> {
        lex_word(s)
    }
}

/// Errors from parsing and validating digit sequences.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("period is empty")]
    EmptyPeriod,
    #[error("input has no periodic part; eventually periodic sequences require `pre(per)` form")]
    PurelyFinite,
    #[error("malformed sequence text: {0}")]
    Malformed(String),
    #[error("digit does not fit in 32 bits")]
    DigitOverflow,
    #[error("shifting by {0} gives a lexicographically larger sequence")]
    ViolatingShift(usize),
    #[error("period contains only zeros")]
    AllZeroPeriod,
}

fn lex_word(text: &str) -> Result<Word, SeqError> {
    let mut digits = Vec::new();
    let mut chars = text.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '0'..='9' => digits.push(Digit(c as u32 - '0' as u32)),
            '[' => {
                let rest = &text[i + 1..];
                let close = rest
                    .find(']')
                    .ok_or_else(|| SeqError::Malformed("unclosed '['".into()))?;
                let body = &rest[..close];
                if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(SeqError::Malformed(format!("bad bracketed digit [{body}]")));
                }
                let value: u32 = body.parse().map_err(|_| SeqError::DigitOverflow)?;
                digits.push(Digit(value));
                for _ in 0..=close {
                    chars.next();
                }
            }
            _ => return Err(SeqError::Malformed(format!("unexpected character {c:?}"))),
        }
    }
    Ok(Word(digits))
}

/// An eventually periodic one-sided digit sequence `pre (per)^∞`.
///
/// Values are immutable; [`normalize`](Self::normalize) returns the unique
/// representation with primitive period and minimal preperiod.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EventuallyPeriodicSeq {
    preperiod: Word,
    period: Word,
}

impl EventuallyPeriodicSeq {
    pub fn new(preperiod: Word, period: Word) -> Result<Self, SeqError> {
        if period.is_empty() {
            return Err(SeqError::EmptyPeriod);
        }
        Ok(EventuallyPeriodicSeq { preperiod, period })
    }

    pub fn from_values(pre: &[u32], per: &[u32]) -> Result<Self, SeqError> {
        Self::new(Word::from_values(pre), Word::from_values(per))
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Digit at 0-based position `i` of the infinite sequence.
    pub fn digit(&self, i: usize) -> Digit {
        let n = self.preperiod.len();
        if i < n {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - n) % self.period.len()]
        }
    }

    /// Infinite digit stream.
    pub fn digits(&self) -> impl Iterator<Item = Digit> + '_ {
        (0..).map(move |i| self.digit(i))
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.digits().take(len).collect())
    }

    /// The representation with primitive period and minimal preperiod.
    ///
    /// The period is first reduced to its primitive root; then, while the last
    /// preperiod digit equals the last period digit, the period is rotated and
    /// the preperiod shortened. The result denotes the same infinite sequence.
    pub fn normalize(&self) -> Self {
        let per = self.period.digits();
        let p = per.len();
        let root_len = (1..=p)
            .find(|&d| p % d == 0 && (d..p).all(|i| per[i] == per[i - d]))
            .unwrap();
        let mut per: Vec<Digit> = per[..root_len].to_vec();
        let mut pre: Vec<Digit> = self.preperiod.digits().to_vec();
        while !pre.is_empty() && pre.last() == per.last() {
            pre.pop();
            per.rotate_right(1);
        }
        EventuallyPeriodicSeq {
            preperiod: Word(pre),
            period: Word(per),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self == &self.normalize()
    }

    /// Drops the first `k` digits; the result is normalized.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.preperiod.len();
        let shifted = if k <= n {
            EventuallyPeriodicSeq {
                preperiod: Word(self.preperiod.0[k..].to_vec()),
                period: self.period.clone(),
            }
        } else {
            let r = (k - n) % self.period.len();
            let mut per = self.period.0.clone();
            per.rotate_left(r);
            EventuallyPeriodicSeq {
                preperiod: Word(Vec::new()),
                period: Word(per),
            }
        };
        shifted.normalize()
    }

    /// Lexicographic comparison of the infinite digit sequences.
    ///
    /// Decided after at most `max(n_a, n_b) + lcm(p_a, p_b)` digits.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let bound = self.preperiod.len().max(other.preperiod.len())
            + self.period.len().lcm(&other.period.len());
        for i in 0..bound {
            match self.digit(i).cmp(&other.digit(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Whether the sequence satisfies the strict expansion criterion: every
    /// proper shift is lexicographically strictly below the sequence itself.
    ///
    /// Sequences with this property are exactly the expansions of 1 in some
    /// base `β > 1`.
    pub fn is_valid_expansion(&self) -> bool {
        let t = self.normalize();
        let bound = t.preperiod_len() + t.period_len();
        (1..=bound).all(|k| t.shift(k).lex_cmp(&t) == Ordering::Less)
    }
}

impl FromStr for EventuallyPeriodicSeq {
    type Err = SeqError;

    /// Parses the exact grammar `word? '(' word ')'`; a bare word is rejected
    /// as [`SeqError::PurelyFinite`]. The result is the literal pair, not
    /// normalized.
    fn from_str(s: &str) -> Result<Self, SeqError> {
        if s.is_empty() {
            return Err(SeqError::Malformed("empty input".into()));
        }
        match s.find('(') {
            Some(open) => {
                if !s.ends_with(')') || s.len() - 1 <= open {
                    return Err(SeqError::Malformed("unbalanced parentheses".into()));
                }
                let pre = lex_word(&s[..open])?;
                let per = lex_word(&s[open + 1..s.len() - 1])?;
                EventuallyPeriodicSeq::new(pre, per)
            }
            None => {
                lex_word(s)?;
                Err(SeqError::PurelyFinite)
            }
        }
    }
}

impl fmt::Display for EventuallyPeriodicSeq {
    /// Renders the normalized form as `pre(per)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.normalize();
        write!(f, "{}({})", t.preperiod, t.period)
    }
}

/// SFT versus strictly sofic, decided by periodicity of the generating
/// sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ShiftClass {
    Sft,
    StrictlySofic,
}

impl fmt::Display for ShiftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftClass::Sft => write!(f, "SFT"),
            ShiftClass::StrictlySofic => write!(f, "strictly sofic"),
        }
    }
}

/// A validated generating sequence of a sofic beta-shift.
///
/// The wrapped sequence is normalized, its period contains a nonzero digit,
/// and every shift is lexicographically at most the sequence itself. Shifts
/// by `1..=n+p` cover all distinct shifted sequences, so that finite range is
/// a complete certificate.
///
/// # Examples
///
/// ```
/// use betaflow::seq::GeneratingSequence;
///
/// let g: GeneratingSequence = "11(10)".parse().unwrap();
/// assert_eq!(g.preperiod_len(), 2);
/// assert_eq!(g.period_sum(), 1);
/// assert!("(12)".parse::<GeneratingSequence>().is_err());
/// ```
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeneratingSequence(EventuallyPeriodicSeq);

impl GeneratingSequence {
    /// Validates `s` against the shift criterion and normalizes it.
    pub fn new(s: &EventuallyPeriodicSeq) -> Result<Self, SeqError> {
        let t = s.normalize();
        if t.period.0.iter().all(|d| d.is_zero()) {
            return Err(SeqError::AllZeroPeriod);
        }
        let bound = t.preperiod_len() + t.period_len();
        for k in 1..=bound {
            if t.shift(k).lex_cmp(&t) == Ordering::Greater {
                return Err(SeqError::ViolatingShift(k));
            }
        }
        Ok(GeneratingSequence(t))
    }

    pub fn seq(&self) -> &EventuallyPeriodicSeq {
        &self.0
    }

    /// Minimal preperiod length `n`.
    pub fn preperiod_len(&self) -> usize {
        self.0.preperiod_len()
    }

    /// Minimal (primitive) period length `p`.
    pub fn period_len(&self) -> usize {
        self.0.period_len()
    }

    pub fn digit(&self, i: usize) -> Digit {
        self.0.digit(i)
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.0.prefix(len)
    }

    /// Sum `S` of the digits in the minimal period.
    pub fn period_sum(&self) -> u64 {
        self.0.period.digit_sum()
    }

    /// Sum `N` of the digits in the minimal preperiod.
    pub fn preperiod_sum(&self) -> u64 {
        self.0.preperiod.digit_sum()
    }

    /// The largest digit; equals the first digit for a valid sequence.
    pub fn max_digit(&self) -> Digit {
        let m = self
            .0
            .preperiod
            .0
            .iter()
            .chain(self.0.period.0.iter())
            .max()
            .copied()
            .unwrap();
        debug_assert_eq!(m, self.digit(0));
        m
    }

    pub fn is_binary(&self) -> bool {
        self.max_digit().value() <= 1
    }

    /// SFT exactly when the normalized preperiod is empty.
    pub fn shift_class(&self) -> ShiftClass {
        if self.preperiod_len() == 0 {
            ShiftClass::Sft
        } else {
            ShiftClass::StrictlySofic
        }
    }

    /// Whether `w` is a factor (subword) of the beta-shift language.
    ///
    /// Equivalent to: every suffix of `w` is lexicographically at most the
    /// prefix of the generating sequence of the same length. Equality is
    /// admissible, which matches extending the word with `0^∞` and applying
    /// the right-ray criterion.
    pub fn is_factor(&self, w: &Word) -> bool {
        let wd = w.digits();
        for start in 0..wd.len() {
            for (i, &d) in wd[start..].iter().enumerate() {
                match d.cmp(&self.digit(i)) {
                    Ordering::Less => break,
                    Ordering::Greater => return false,
                    Ordering::Equal => {}
                }
            }
        }
        true
    }
}

impl FromStr for GeneratingSequence {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, SeqError> {
        let seq: EventuallyPeriodicSeq = s.parse()?;
        GeneratingSequence::new(&seq)
    }
}

impl fmt::Display for GeneratingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl PartialOrd for GeneratingSequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GeneratingSequence {
    // Total order; normalized representations make lexicographic equality
    // coincide with structural equality.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> EventuallyPeriodicSeq {
        s.parse().unwrap()
    }

    fn gen(s: &str) -> GeneratingSequence {
        s.parse().unwrap()
    }

    #[test]
    fn parse_literal_pairs() {
        let s = seq("11(10)");
        assert_eq!(s.preperiod(), &Word::from_values(&[1, 1]));
        assert_eq!(s.period(), &Word::from_values(&[1, 0]));

        let s = seq("(1)");
        assert!(s.preperiod().is_empty());
        assert_eq!(s.period(), &Word::from_values(&[1]));

        let s = seq("1101101(0101100)");
        assert_eq!(s.preperiod(), &Word::from_values(&[1, 1, 0, 1, 1, 0, 1]));
        assert_eq!(s.period(), &Word::from_values(&[0, 1, 0, 1, 1, 0, 0]));
    }

    #[test]
    fn parse_bracketed_digits() {
        let s = seq("1[12](3[10])");
        assert_eq!(s.preperiod(), &Word::from_values(&[1, 12]));
        assert_eq!(s.period(), &Word::from_values(&[3, 10]));
        assert_eq!(s.to_string(), "1[12](3[10])");
    }

    #[test]
    fn parse_errors() {
        assert_eq!("11".parse::<EventuallyPeriodicSeq>(), Err(SeqError::PurelyFinite));
        assert_eq!("11()".parse::<EventuallyPeriodicSeq>(), Err(SeqError::EmptyPeriod));
        assert_eq!(
            "[99999999999](1)".parse::<EventuallyPeriodicSeq>(),
            Err(SeqError::DigitOverflow)
        );
        assert!(matches!(
            "1 1(0)".parse::<EventuallyPeriodicSeq>(),
            Err(SeqError::Malformed(_))
        ));
        assert!(matches!("1(2".parse::<EventuallyPeriodicSeq>(), Err(SeqError::Malformed(_))));
        assert!(matches!("".parse::<EventuallyPeriodicSeq>(), Err(SeqError::Malformed(_))));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(seq("1(01)").normalize(), seq("(10)").normalize());
        assert_eq!(seq("1(01)").normalize().preperiod_len(), 0);
        assert_eq!(seq("11(10)").normalize(), seq("11(10)"));
        assert_eq!(seq("(1010)").normalize(), seq("(10)"));
    }

    #[test]
    fn normalize_is_idempotent_and_preserves_digits() {
        for text in ["1(01)", "(1010)", "110(011011)", "1101101(0101100)", "10(100100)"] {
            let s = seq(text);
            let t = s.normalize();
            assert_eq!(t.normalize(), t);
            let window = s.preperiod_len() + 2 * s.period_len() + 16;
            for i in 0..window {
                assert_eq!(s.digit(i), t.digit(i), "digit {i} of {text}");
            }
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(seq("11(10)").shift(2), seq("(10)").normalize());
        assert_eq!(seq("(10)").shift(1), seq("(01)").normalize());
        // 1(110)^∞ = 1110110110...; dropping 4 digits leaves 110110... = (110)^∞.
        assert_eq!(seq("1(110)").shift(4), seq("(110)").normalize());
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(seq("(10)").lex_cmp(&seq("11(10)")), Ordering::Less);
        assert_eq!(seq("1(01)").lex_cmp(&seq("(10)")), Ordering::Equal);
        assert_eq!(seq("(110)").lex_cmp(&seq("11(110)")), Ordering::Less);
    }

    #[test]
    fn validate_generating_examples() {
        assert!(GeneratingSequence::new(&seq("11(10)")).is_ok());
        assert_eq!(
            GeneratingSequence::new(&seq("(12)")),
            Err(SeqError::ViolatingShift(1))
        );
        assert!(GeneratingSequence::new(&seq("11(110)")).is_ok());
        assert_eq!(GeneratingSequence::new(&seq("1(0)")), Err(SeqError::AllZeroPeriod));
    }

    #[test]
    fn expansion_criterion_examples() {
        assert!(seq("11(10)").is_valid_expansion());
        assert!(!seq("(10)").is_valid_expansion());
        assert!(!seq("(1)").is_valid_expansion());
    }

    #[test]
    fn factor_examples() {
        let g = gen("11(10)");
        assert!(g.is_factor(&Word::from_values(&[1, 1])));
        // Suffix equality with the prefix of g is admissible: 111·0^∞ stays
        // below 1110(10)^∞, so 111 is a factor. Cross-checked by the
        // extension oracle below.
        assert!(g.is_factor(&Word::from_values(&[1, 1, 1])));
        assert!(!g.is_factor(&Word::from_values(&[2, 0])));
        assert!(!g.is_factor(&Word::from_values(&[1, 1, 1, 1])));
    }

    /// Independent oracle: w is a factor iff w·0^∞ satisfies the right-ray
    /// criterion (every shift at most g).
    fn is_factor_oracle(w: &Word, g: &GeneratingSequence) -> bool {
        let extended = EventuallyPeriodicSeq::new(w.clone(), Word::from_values(&[0])).unwrap();
        (0..=w.len()).all(|k| extended.shift(k).lex_cmp(g.seq()) != Ordering::Greater)
    }

    #[test]
    fn factor_matches_extension_oracle() {
        for g in ["11(10)", "(10)", "1(110)", "11(110)", "(21)", "1101101(0101100)"] {
            let g = gen(g);
            let alpha = g.max_digit().value();
            for len in 0..=5usize {
                for mut code in 0..(alpha as u64 + 2).pow(len as u32) {
                    let mut values = Vec::new();
                    for _ in 0..len {
                        values.push((code % (u64::from(alpha) + 2)) as u32);
                        code /= u64::from(alpha) + 2;
                    }
                    let w = Word::from_values(&values);
                    assert_eq!(
                        g.is_factor(&w),
                        is_factor_oracle(&w, &g),
                        "word {w} against {g}"
                    );
                }
            }
        }
    }

    #[test]
    fn factors_closed_under_subwords() {
        let g = gen("1101101(0101100)");
        for len in 1..=7usize {
            for code in 0..(1u32 << len) {
                let values: Vec<u32> = (0..len).map(|i| (code >> i) & 1).collect();
                let w = Word::from_values(&values);
                if g.is_factor(&w) {
                    for a in 0..len {
                        for b in a..=len {
                            let sub = Word::from_values(&values[a..b]);
                            assert!(g.is_factor(&sub), "subword {sub} of {w}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(gen("(10)").shift_class(), ShiftClass::Sft);
        assert_eq!(gen("11(10)").shift_class(), ShiftClass::StrictlySofic);
        assert_eq!(gen("(1)").shift_class(), ShiftClass::Sft);
    }

    #[test]
    fn display_uses_normalized_form() {
        assert_eq!(seq("1(01)").to_string(), "(10)");
        assert_eq!(seq("(1010)").to_string(), "(10)");
        assert_eq!(gen("11(10)").to_string(), "11(10)");
    }

    #[test]
    fn lex_compare_is_total_order_on_random_triples() {
        // Deterministic exhaustive-ish sweep over small (pre, per) shapes.
        let mut pool = Vec::new();
        for pre_len in 0..=2usize {
            for per_len in 1..=3usize {
                for code in 0..(1u32 << (pre_len + per_len)) {
                    let bits: Vec<u32> = (0..pre_len + per_len).map(|i| (code >> i) & 1).collect();
                    let s = EventuallyPeriodicSeq::from_values(&bits[..pre_len], &bits[pre_len..])
                        .unwrap();
                    pool.push(s);
                }
            }
        }
        for a in pool.iter().step_by(7) {
            for b in pool.iter().step_by(11) {
                // antisymmetry
                assert_eq!(a.lex_cmp(b), b.lex_cmp(a).reverse());
                for c in pool.iter().step_by(13) {
                    // transitivity for <=
                    if a.lex_cmp(b) != Ordering::Greater && b.lex_cmp(c) != Ordering::Greater {
                        assert_ne!(a.lex_cmp(c), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn accepted_sequences_dominate_far_shifts() {
        for text in ["11(10)", "1(110)", "1101101(0101100)", "(21)"] {
            let g = gen(text);
            for k in 1..=50 {
                assert_ne!(
                    g.seq().shift(k).lex_cmp(g.seq()),
                    Ordering::Greater,
                    "shift {k} of {text}"
                );
            }
        }
    }
}
