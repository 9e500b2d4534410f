use legkit_core::mobility::{rationality_report, worked_examples, Diagnosis};

use crate::{ensure, Verdict};

pub fn fixtures() -> Verdict {
    let results = rationality_report(&worked_examples()).map_err(|e| e.to_string())?;
    // Grübler counts worked by hand: 3·7 − 2·9, 6·10 − 5·9 − 3·3,
    // 6·13 − 5·12 − 3·4, 6·15 − 5·14 − 3·4.
    let expected = [
        (3, None, Diagnosis::Unassessed),
        (6, Some(6), Diagnosis::Rational),
        (6, Some(12), Diagnosis::RedundantActuation),
        (8, Some(8), Diagnosis::Rational),
    ];
    ensure(results.len() == expected.len(), || format!("{} mechanisms", results.len()))?;
    for (r, (w, inputs, diagnosis)) in results.iter().zip(expected) {
        ensure(r.mobility == w && r.actuated_inputs == inputs && r.diagnosis == diagnosis, || {
            format!("{}: W = {}, inputs {:?}, {:?}", r.label, r.mobility, r.actuated_inputs, r.diagnosis)
        })?;
        ensure(r.rational == (diagnosis == Diagnosis::Rational), || format!("{}: rational flag", r.label))?;
    }
    let ws: Vec<String> = results.iter().map(|r| r.mobility.to_string()).collect();
    Ok(format!("W = {}; 12 inputs on W = 6 flagged irrational", ws.join(", ")))
}
