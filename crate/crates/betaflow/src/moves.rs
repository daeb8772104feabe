//! Flow-equivalence rewritings on generating sequences, with replayable
//! traces.
//!
//! The moves are sequence-level certificates: run-length binarization into
//! the alphabet `{0,1}`, deletion of a `0` after each maximal run of leading
//! ones, the inverse insertion, and the rotation move that turns the
//! preperiod into a pure run of ones while cyclically permuting the period.
//! Each move preserves the period digit sum `S` and the SFT/strictly sofic
//! class; outputs that fail the generating-sequence criterion are rejected
//! rather than repaired.

use std::collections::VecDeque;
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::seq::{Digit, EventuallyPeriodicSeq, GeneratingSequence, ShiftClass, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("sequence is periodic (SFT); this move needs a strictly sofic sequence")]
    NotStrictlySofic,
    #[error("sequence is not over the binary alphabet")]
    NotBinary,
    #[error("k = {k} must exceed half the leading run of ones ({run})")]
    KTooSmall { k: usize, run: usize },
    #[error("k = {k} exceeds the leading run of ones ({run}); there is no initial 1^k")]
    KTooLarge { k: usize, run: usize },
    #[error("block index {block} is outside 1..={blocks}")]
    BlockIndexOutOfRange { block: usize, blocks: usize },
    #[error("exponent {exponent} must be positive")]
    ExponentNotPositive { exponent: i64 },
    #[error("rule is inapplicable here: {0}")]
    RuleInapplicable(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MoveKind {
    /// Digitwise substitution `j -> 1^j 0`.
    Binarize,
    /// Delete a `0` after each occurrence of the maximal leading run `1^n`.
    DeleteZero { run: usize },
    /// Insert a `0` after the initial `1^k` and after each later `01^k`.
    InsertZero { k: usize },
    /// Replace by `1^e (rotated period)^∞` with
    /// `e = S_b + shift·S_p + p_1 + ... + p_block`.
    RotateNormalize { block: usize, shift: i64 },
    /// Replace a periodic sequence by `(1^sum 0)^∞`, the standard form with
    /// the same complete flow invariant.
    FullShiftForm { sum: u64 },
}

impl MoveKind {
    fn name(&self) -> &'static str {
        match self {
            MoveKind::Binarize => "binarize",
            MoveKind::DeleteZero { .. } => "delete_zero",
            MoveKind::InsertZero { .. } => "insert_zero",
            MoveKind::RotateNormalize { .. } => "rotate_normalize",
            MoveKind::FullShiftForm { .. } => "full_shift_form",
        }
    }

    fn params(&self) -> serde_json::Value {
        match *self {
            MoveKind::Binarize => json!({}),
            MoveKind::DeleteZero { run } => json!({ "n": run }),
            MoveKind::InsertZero { k } => json!({ "k": k }),
            MoveKind::RotateNormalize { block, shift } => json!({ "k": block, "l": shift }),
            MoveKind::FullShiftForm { sum } => json!({ "s": sum }),
        }
    }
}

/// One applied move: the rule, its input, and its validated output.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Move {
    pub kind: MoveKind,
    pub before: GeneratingSequence,
    pub after: GeneratingSequence,
}

impl Move {
    /// Recomputes the move from its `before` sequence.
    pub fn reapply(&self) -> Result<Move, MoveError> {
        match self.kind {
            MoveKind::Binarize => Ok(binarize(&self.before)),
            MoveKind::DeleteZero { .. } => delete_zero(&self.before),
            MoveKind::InsertZero { k } => insert_zero(&self.before, k),
            MoveKind::RotateNormalize { block, shift } => {
                rotate_normalize(&self.before, block, shift)
            }
            MoveKind::FullShiftForm { sum } => full_shift_form(&self.before, sum),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.name(),
            "params": self.kind.params(),
            "before": self.before.to_string(),
            "after": self.after.to_string(),
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} -> {}",
            self.kind.name(),
            self.kind.params(),
            self.before,
            self.after
        )
    }
}

/// A composable chain of moves: each move starts where the previous ended.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MoveTrace {
    moves: Vec<Move>,
}

impl MoveTrace {
    pub fn new() -> Self {
        MoveTrace::default()
    }

    pub fn push(&mut self, mv: Move) {
        if let Some(last) = self.moves.last() {
            assert_eq!(last.after, mv.before, "trace must compose");
        }
        self.moves.push(mv);
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn end(&self) -> Option<&GeneratingSequence> {
        self.moves.last().map(|m| &m.after)
    }

    /// Re-applies every recorded move starting from `start`, checking each
    /// recorded output along the way.
    pub fn replay(&self, start: &GeneratingSequence) -> Result<GeneratingSequence, MoveError> {
        let mut current = start.clone();
        for mv in &self.moves {
            if mv.before != current {
                return Err(MoveError::RuleInapplicable(format!(
                    "trace expects {} but the chain is at {current}",
                    mv.before
                )));
            }
            let redone = mv.reapply()?;
            if redone.after != mv.after {
                return Err(MoveError::RuleInapplicable(format!(
                    "replaying {} gave {} instead of {}",
                    mv.before, redone.after, mv.after
                )));
            }
            current = redone.after;
        }
        Ok(current)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self.moves.iter().map(Move::to_json).collect::<Vec<_>>())
    }
}

/// Run-length decomposition `1^{p_1} 0^{q_1} ... 1^{p_m} 0^{q_m}` of the
/// period, after rotating the period to start with a one and end with a zero
/// (absorbing the skipped digits into the preperiod sum).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunLengthForm {
    /// `(p_j, q_j)` pairs, all positive.
    pub blocks: Vec<(usize, usize)>,
    /// Digit sum of the block-aligned preperiod, `S_b`.
    pub preperiod_sum: u64,
    /// Digit sum of the period, `S_p`.
    pub period_sum: u64,
}

impl RunLengthForm {
    pub fn of(g: &GeneratingSequence) -> Result<Self, MoveError> {
        check_strictly_sofic_binary(g)?;
        let per = g.seq().period().digits();
        let p = per.len();
        // A strictly sofic binary period contains both digits, so a 0->1
        // boundary exists.
        let rotation = (0..p)
            .find(|&r| per[r].value() == 1 && per[(r + p - 1) % p].is_zero())
            .expect("strictly sofic binary period contains both digits");
        let mut rotated: Vec<Digit> = per.to_vec();
        rotated.rotate_left(rotation);
        let absorbed: u64 = per[..rotation].iter().map(|d| u64::from(d.value())).sum();

        let mut blocks = Vec::new();
        let mut i = 0;
        while i < p {
            let ones = rotated[i..].iter().take_while(|d| d.value() == 1).count();
            i += ones;
            let zeros = rotated[i..].iter().take_while(|d| d.is_zero()).count();
            i += zeros;
            blocks.push((ones, zeros));
        }
        Ok(RunLengthForm {
            blocks,
            preperiod_sum: g.preperiod_sum() + absorbed,
            period_sum: g.period_sum(),
        })
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The period cyclically rotated to start right after block `k`.
    pub fn rotated_period(&self, k: usize) -> Word {
        let m = self.blocks.len();
        let mut digits = Vec::new();
        for j in 0..m {
            let (ones, zeros) = self.blocks[(k + j) % m];
            digits.extend(std::iter::repeat(Digit::ONE).take(ones));
            digits.extend(std::iter::repeat(Digit::ZERO).take(zeros));
        }
        Word::new(digits)
    }
}

fn check_strictly_sofic_binary(g: &GeneratingSequence) -> Result<(), MoveError> {
    if g.shift_class() != ShiftClass::StrictlySofic {
        return Err(MoveError::NotStrictlySofic);
    }
    if !g.is_binary() {
        return Err(MoveError::NotBinary);
    }
    Ok(())
}

/// Length of the maximal run of ones at the start of the sequence. For a
/// valid binary sequence this is also the global maximal run.
fn leading_one_run(g: &GeneratingSequence) -> usize {
    let bound = g.preperiod_len() + g.period_len();
    (0..bound).take_while(|&i| g.digit(i).value() == 1).count()
}

enum Action {
    Keep,
    Skip,
    KeepInsertZero,
}

/// Applies a backward-looking local rewrite to the infinite sequence and
/// refolds the result into eventually periodic form.
///
/// The rule sees the window of (up to) `context + 1` digits ending at the
/// current position. The output period is read off from the first full input
/// period whose decision windows lie entirely in the periodic tail.
fn rewrite_local(
    seq: &EventuallyPeriodicSeq,
    context: usize,
    rule: impl Fn(&[Digit]) -> Action,
) -> EventuallyPeriodicSeq {
    let n = seq.preperiod_len();
    let p = seq.period_len();
    let mut period_start = n + 1;
    while period_start <= n + context {
        period_start += p;
    }
    let mut out_pre: Vec<Digit> = Vec::new();
    let mut out_per: Vec<Digit> = Vec::new();
    let mut window: VecDeque<Digit> = VecDeque::new();
    for i in 1..period_start + p {
        let d = seq.digit(i - 1);
        window.push_back(d);
        if window.len() > context + 1 {
            window.pop_front();
        }
        let target = if i < period_start {
            &mut out_pre
        } else {
            &mut out_per
        };
        let w: Vec<Digit> = window.iter().copied().collect();
        match rule(&w) {
            Action::Keep => target.push(d),
            Action::Skip => {}
            Action::KeepInsertZero => {
                target.push(d);
                target.push(Digit::ZERO);
            }
        }
    }
    assert!(!out_per.is_empty(), "rewrite erased a full period");
    EventuallyPeriodicSeq::new(Word::new(out_pre), Word::new(out_per))
        .unwrap()
        .normalize()
}

fn finish_move(
    kind: MoveKind,
    before: &GeneratingSequence,
    after_seq: EventuallyPeriodicSeq,
) -> Result<Move, MoveError> {
    let after = GeneratingSequence::new(&after_seq)
        .map_err(|e| MoveError::RuleInapplicable(e.to_string()))?;
    if after.shift_class() != before.shift_class() {
        return Err(MoveError::RuleInapplicable(format!(
            "output {after} is {} while the input is {}",
            after.shift_class(),
            before.shift_class()
        )));
    }
    assert_eq!(
        after.period_sum(),
        before.period_sum(),
        "flow moves preserve the period sum"
    );
    Ok(Move {
        kind,
        before: before.clone(),
        after,
    })
}

/// Digitwise run-length substitution `j -> 1^j 0`, producing a binary
/// generating sequence of a flow-equivalent beta-shift with `1 < β' < 2`.
pub fn binarize(g: &GeneratingSequence) -> Move {
    let phi = |w: &Word| -> Vec<Digit> {
        let mut out = Vec::new();
        for d in w.digits() {
            out.extend(std::iter::repeat(Digit::ONE).take(d.value() as usize));
            out.push(Digit::ZERO);
        }
        out
    };
    let seq = EventuallyPeriodicSeq::new(
        Word::new(phi(g.seq().preperiod())),
        Word::new(phi(g.seq().period())),
    )
    .unwrap();
    finish_move(MoveKind::Binarize, g, seq.normalize())
        .expect("the run-length image of a generating sequence is generating")
}

/// Deletes one `0` after each occurrence of `1^n`, where `n` is the maximal
/// leading run of ones.
pub fn delete_zero(g: &GeneratingSequence) -> Result<Move, MoveError> {
    check_strictly_sofic_binary(g)?;
    let run = leading_one_run(g);
    let out = rewrite_local(g.seq(), run, |w| {
        if w.len() == run + 1 && w[run].is_zero() && w[..run].iter().all(|d| d.value() == 1) {
            Action::Skip
        } else {
            Action::Keep
        }
    });
    finish_move(MoveKind::DeleteZero { run }, g, out)
}

/// Inserts a `0` after the initial `1^k` and after each later occurrence of
/// `01^k`; requires `n/2 < k <= n` for the maximal leading run `n`.
pub fn insert_zero(g: &GeneratingSequence, k: usize) -> Result<Move, MoveError> {
    check_strictly_sofic_binary(g)?;
    let run = leading_one_run(g);
    if 2 * k <= run {
        return Err(MoveError::KTooSmall { k, run });
    }
    if k > run {
        return Err(MoveError::KTooLarge { k, run });
    }
    let out = rewrite_local(g.seq(), k, |w| {
        let all_ones = |d: &[Digit]| d.iter().all(|x| x.value() == 1);
        if w.len() == k && all_ones(w) {
            Action::KeepInsertZero
        } else if w.len() == k + 1 && w[0].is_zero() && all_ones(&w[1..]) {
            Action::KeepInsertZero
        } else {
            Action::Keep
        }
    });
    finish_move(MoveKind::InsertZero { k }, g, out)
}

/// Rewrites `g` as `1^e (period rotated past block k)^∞` with exponent
/// `e = S_b + l·S_p + p_1 + ... + p_k`.
pub fn rotate_normalize(g: &GeneratingSequence, block: usize, shift: i64) -> Result<Move, MoveError> {
    let rlf = RunLengthForm::of(g)?;
    let m = rlf.block_count();
    if block < 1 || block > m {
        return Err(MoveError::BlockIndexOutOfRange { block, blocks: m });
    }
    let partial: u64 = rlf.blocks[..block].iter().map(|&(p, _)| p as u64).sum();
    let exponent = rlf.preperiod_sum as i64 + shift * rlf.period_sum as i64 + partial as i64;
    if exponent <= 0 {
        return Err(MoveError::ExponentNotPositive { exponent });
    }
    let pre = Word::new(vec![Digit::ONE; exponent as usize]);
    let per = rlf.rotated_period(block);
    let seq = EventuallyPeriodicSeq::new(pre, per).unwrap();
    finish_move(MoveKind::RotateNormalize { block, shift }, g, seq.normalize())
}

/// The standard periodic form `(1^sum 0)^∞` of an SFT generating sequence
/// with period sum `sum`; flow equivalence is certified by the complete
/// invariant rather than by the local rules, which need aperiodicity.
fn full_shift_form(g: &GeneratingSequence, sum: u64) -> Result<Move, MoveError> {
    if g.shift_class() != ShiftClass::Sft {
        return Err(MoveError::RuleInapplicable(
            "full shift form applies to periodic sequences only".into(),
        ));
    }
    if g.period_sum() != sum {
        return Err(MoveError::RuleInapplicable(format!(
            "recorded sum {sum} differs from the period sum {}",
            g.period_sum()
        )));
    }
    let mut per = vec![Digit::ONE; sum as usize];
    per.push(Digit::ZERO);
    let seq = EventuallyPeriodicSeq::new(Word::default(), Word::new(per)).unwrap();
    finish_move(MoveKind::FullShiftForm { sum }, g, seq)
}

/// The deterministic canonical form of a binary generating sequence, with
/// the trace reaching it.
///
/// Periodic sequences map to `(1^S 0)^∞`. Strictly sofic sequences map to
/// the candidate `1^e (rotated period)^∞` over all block rotations with
/// exponents reduced to `1..=S_p`, keeping validating outputs and choosing
/// the lexicographically least `(period, exponent)` pair.
pub fn canonical_form(g: &GeneratingSequence) -> Result<(GeneratingSequence, MoveTrace), MoveError> {
    if !g.is_binary() {
        return Err(MoveError::NotBinary);
    }
    let mut trace = MoveTrace::new();
    match g.shift_class() {
        ShiftClass::Sft => {
            let sum = g.period_sum();
            let mv = full_shift_form(g, sum)?;
            if mv.after == *g {
                Ok((mv.after, trace))
            } else {
                let result = mv.after.clone();
                trace.push(mv);
                Ok((result, trace))
            }
        }
        ShiftClass::StrictlySofic => {
            let rlf = RunLengthForm::of(g)?;
            let period_sum = rlf.period_sum as i64;
            let mut best: Option<(Word, u64, Move)> = None;
            for block in 1..=rlf.block_count() {
                let partial: u64 = rlf.blocks[..block].iter().map(|&(p, _)| p as u64).sum();
                let base = rlf.preperiod_sum as i64 + partial as i64;
                let exponent = (base - 1).rem_euclid(period_sum) + 1;
                let shift = (exponent - base) / period_sum;
                match rotate_normalize(g, block, shift) {
                    Ok(mv) => {
                        let key = (
                            Word::new(mv.after.seq().period().digits().to_vec()),
                            exponent as u64,
                        );
                        let better = match &best {
                            None => true,
                            Some((w, e, _)) => (&key.0, &key.1) < (w, e),
                        };
                        if better {
                            best = Some((key.0, key.1, mv));
                        }
                    }
                    Err(MoveError::RuleInapplicable(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            let (_, _, mv) =
                best.expect("the rotation starting at a maximal block always validates");
            if mv.after == *g {
                Ok((g.clone(), trace))
            } else {
                let result = mv.after.clone();
                trace.push(mv);
                Ok((result, trace))
            }
        }
    }
}
