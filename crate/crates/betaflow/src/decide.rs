//! Three-valued flow-equivalence decision for pairs of sofic beta-shifts.
//!
//! The decision uses only what the invariants and constructive moves settle:
//! the SFT/strictly sofic class and the period sum `S` separate classes; SFT
//! pairs with equal `S` are equivalent outright; strictly sofic pairs with
//! equal `S` are equivalent when their canonical forms coincide and otherwise
//! left `Unknown` — equality of `S` is necessary, but whether it is complete
//! for strictly sofic beta-shifts is an open question the verdict must not
//! overclaim.

use serde_json::json;
use thiserror::Error;

use crate::moves::{binarize, canonical_form, MoveTrace};
use crate::seq::{GeneratingSequence, ShiftClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("sequence is strictly sofic, not an SFT")]
    NotSft,
}

/// The invariant separating a `Distinct` pair, with both computed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    ShiftClass { left: ShiftClass, right: ShiftClass },
    PeriodSum { left: u64, right: u64 },
}

impl Witness {
    pub fn invariant_name(&self) -> &'static str {
        match self {
            Witness::ShiftClass { .. } => "class",
            Witness::PeriodSum { .. } => "S",
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Witness::ShiftClass { left, right } => json!({
                "invariant": "class",
                "left": left.to_string(),
                "right": right.to_string(),
            }),
            Witness::PeriodSum { left, right } => json!({
                "invariant": "S",
                "left": left,
                "right": right,
            }),
        }
    }
}

/// Outcome of a flow-equivalence comparison.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// Both sequences rewrite to the same canonical form; the traces replay.
    Equivalent {
        canonical: GeneratingSequence,
        trace_left: MoveTrace,
        trace_right: MoveTrace,
    },
    /// A flow invariant differs.
    Distinct { witness: Witness },
    /// Both strictly sofic with equal `S` but distinct canonical forms.
    Unknown {
        reduced_left: GeneratingSequence,
        reduced_right: GeneratingSequence,
    },
}

impl Verdict {
    pub fn outcome(&self) -> &'static str {
        match self {
            Verdict::Equivalent { .. } => "Equivalent",
            Verdict::Distinct { .. } => "Distinct",
            Verdict::Unknown { .. } => "Unknown",
        }
    }

    pub fn to_json(
        &self,
        left: &GeneratingSequence,
        right: &GeneratingSequence,
    ) -> serde_json::Value {
        let mut value = json!({
            "outcome": self.outcome(),
            "invariants": {
                "S1": left.period_sum(),
                "S2": right.period_sum(),
                "class1": left.shift_class().to_string(),
                "class2": right.shift_class().to_string(),
            },
        });
        match self {
            Verdict::Equivalent {
                canonical,
                trace_left,
                trace_right,
            } => {
                value["canonical"] = json!(canonical.to_string());
                value["traces"] = json!([trace_left.to_json(), trace_right.to_json()]);
            }
            Verdict::Distinct { witness } => {
                value["witness"] = witness.to_json();
            }
            Verdict::Unknown {
                reduced_left,
                reduced_right,
            } => {
                value["reduced_pair"] =
                    json!([reduced_left.to_string(), reduced_right.to_string()]);
            }
        }
        value
    }
}

/// Binarizes when needed, then takes the canonical form, recording all moves.
pub fn canonical_pipeline(g: &GeneratingSequence) -> (GeneratingSequence, MoveTrace) {
    let mut trace = MoveTrace::new();
    let binary = if g.is_binary() {
        g.clone()
    } else {
        let mv = binarize(g);
        let after = mv.after.clone();
        trace.push(mv);
        after
    };
    let (canonical, ctrace) = canonical_form(&binary).expect("input is binary here");
    for mv in ctrace.moves() {
        trace.push(mv.clone());
    }
    (canonical, trace)
}

/// Decides flow equivalence of two sofic beta-shifts as far as the known
/// invariants and constructions reach.
pub fn compare(left: &GeneratingSequence, right: &GeneratingSequence) -> Verdict {
    let class_left = left.shift_class();
    let class_right = right.shift_class();
    if class_left != class_right {
        return Verdict::Distinct {
            witness: Witness::ShiftClass {
                left: class_left,
                right: class_right,
            },
        };
    }
    let s_left = left.period_sum();
    let s_right = right.period_sum();
    if s_left != s_right {
        return Verdict::Distinct {
            witness: Witness::PeriodSum {
                left: s_left,
                right: s_right,
            },
        };
    }
    let (canon_left, trace_left) = canonical_pipeline(left);
    let (canon_right, trace_right) = canonical_pipeline(right);
    if canon_left == canon_right {
        Verdict::Equivalent {
            canonical: canon_left,
            trace_left,
            trace_right,
        }
    } else {
        debug_assert_eq!(class_left, ShiftClass::StrictlySofic);
        Verdict::Unknown {
            reduced_left: canon_left,
            reduced_right: canon_right,
        }
    }
}

/// Alphabet size of the full shift flow equivalent to an SFT beta-shift:
/// `S + 1`.
pub fn full_shift_class(g: &GeneratingSequence) -> Result<u64, DecideError> {
    if g.shift_class() != ShiftClass::Sft {
        return Err(DecideError::NotSft);
    }
    Ok(g.period_sum() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::equivariant_fiber_compare;

    fn gen(s: &str) -> GeneratingSequence {
        s.parse().unwrap()
    }

    #[test]
    fn sft_pair_with_equal_sum_is_equivalent() {
        let left = gen("(110)");
        let right = gen("(20)");
        match compare(&left, &right) {
            Verdict::Equivalent {
                canonical,
                trace_left,
                trace_right,
            } => {
                assert_eq!(canonical, gen("(110)"));
                assert_eq!(trace_left.replay(&left).unwrap(), canonical);
                assert_eq!(trace_right.replay(&right).unwrap(), canonical);
            }
            other => panic!("expected Equivalent, got {}", other.outcome()),
        }
    }

    #[test]
    fn frontier_pair_is_unknown() {
        match compare(&gen("1(110)"), &gen("11(110)")) {
            Verdict::Unknown {
                reduced_left,
                reduced_right,
            } => {
                assert_eq!(reduced_left, gen("1(110)"));
                assert_eq!(reduced_right, gen("11(110)"));
            }
            other => panic!("expected Unknown, got {}", other.outcome()),
        }
    }

    #[test]
    fn distinct_period_sums() {
        match compare(&gen("11(10)"), &gen("11(110)")) {
            Verdict::Distinct {
                witness: Witness::PeriodSum { left, right },
            } => {
                assert_eq!((left, right), (1, 2));
            }
            other => panic!("expected Distinct on S, got {}", other.outcome()),
        }
    }

    #[test]
    fn distinct_classes() {
        match compare(&gen("(10)"), &gen("1(10)")) {
            Verdict::Distinct {
                witness: Witness::ShiftClass { left, right },
            } => {
                assert_eq!(left, ShiftClass::Sft);
                assert_eq!(right, ShiftClass::StrictlySofic);
            }
            other => panic!("expected Distinct on class, got {}", other.outcome()),
        }
    }

    #[test]
    fn comparison_is_symmetric() {
        let pool = [
            "(10)", "(110)", "(20)", "1(10)", "11(10)", "1(110)", "11(110)", "(21)",
        ];
        for a in pool {
            for b in pool {
                let fwd = compare(&gen(a), &gen(b));
                let bwd = compare(&gen(b), &gen(a));
                assert_eq!(fwd.outcome(), bwd.outcome(), "{a} vs {b}");
                if let (
                    Verdict::Equivalent { canonical: cf, .. },
                    Verdict::Equivalent { canonical: cb, .. },
                ) = (&fwd, &bwd)
                {
                    assert_eq!(cf, cb);
                }
            }
        }
    }

    #[test]
    fn equivalence_implies_equal_sums_and_equivariance() {
        let pool = ["1(10)", "11(10)", "1(110)", "11(110)", "111(110)", "110(10)"];
        for a in pool {
            for b in pool {
                let (ga, gb) = (gen(a), gen(b));
                match compare(&ga, &gb) {
                    Verdict::Equivalent { .. } => {
                        assert_eq!(ga.period_sum(), gb.period_sum());
                        assert!(equivariant_fiber_compare(&ga, &gb).unwrap(), "{a} vs {b}");
                    }
                    Verdict::Distinct { witness } => {
                        match witness {
                            Witness::PeriodSum { left, right } => assert_ne!(left, right),
                            Witness::ShiftClass { left, right } => assert_ne!(left, right),
                        }
                    }
                    Verdict::Unknown { .. } => {
                        assert_eq!(ga.period_sum(), gb.period_sum());
                    }
                }
            }
        }
    }

    #[test]
    fn full_shift_class_examples() {
        assert_eq!(full_shift_class(&gen("(10)")).unwrap(), 2);
        assert_eq!(full_shift_class(&gen("(1)")).unwrap(), 2);
        assert_eq!(full_shift_class(&gen("(110)")).unwrap(), 3);
        assert_eq!(full_shift_class(&gen("11(10)")), Err(DecideError::NotSft));
    }

    #[test]
    fn verdict_json_fields() {
        let left = gen("1(110)");
        let right = gen("11(110)");
        let value = compare(&left, &right).to_json(&left, &right);
        assert_eq!(value["outcome"], "Unknown");
        assert_eq!(value["invariants"]["S1"], 2);
        assert_eq!(value["invariants"]["S2"], 2);
        assert!(value["reduced_pair"].is_array());

        let left = gen("11(10)");
        let right = gen("11(110)");
        let value = compare(&left, &right).to_json(&left, &right);
        assert_eq!(value["outcome"], "Distinct");
        assert_eq!(value["witness"]["invariant"], "S");
    }
}
