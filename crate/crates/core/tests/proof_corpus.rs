mod common;

use common::{load, mutants, mutate, Mutation, CORPUS};
use delas::proof::{Derivation, Justification, ProofError, SchemaId};
use delas::search::{find_countermodel, Bounds, ModelClass};
use delas::syntax::{parse_formula_in, ParseEnv};

#[test]
fn corpus_derivations_check() {
    for (name, conclusion) in CORPUS {
        let d = load(name);
        let thm = d.check().unwrap_or_else(|e| panic!("{name}: {e}"));
        let expected = parse_formula_in(conclusion, &d.env).unwrap();
        assert_eq!(thm.conclusion, expected, "{name}");
        let premises = d.lines.iter().filter(|l| l.justification == Justification::Premise).count();
        assert_eq!(thm.premises.len(), premises, "{name}");
    }
}

#[test]
fn derivations_round_trip_through_text() {
    for (name, _) in CORPUS {
        let d = load(name);
        let again = Derivation::parse(&d.to_string(), &ParseEnv::default()).unwrap();
        assert_eq!(again.lines, d.lines, "{name}");
    }
}

#[test]
fn single_line_mutations_are_rejected_at_that_line() {
    for (name, _) in CORPUS {
        let d = load(name);
        let ms = mutants(&d, 20);
        assert_eq!(ms.len(), 20, "{name}");
        for (line, m, mutant) in ms {
            match mutant.check() {
                Err(ProofError::Line { line: at, .. }) => assert_eq!(at, line, "{name} {m:?} at {line}"),
                other => panic!("{name} {m:?} at {line}: {other:?}"),
            }
            // the same verdict after a trip through the file format
            let reparsed = Derivation::parse(&mutant.to_string(), &ParseEnv::default());
            if let Ok(r) = reparsed {
                assert_eq!(r.check().unwrap_err().line(), Some(line), "{name} {m:?} at {line}");
            }
        }
    }
}

#[test]
fn corrupted_agent_in_eas_is_caught() {
    let d = load("eas");
    let k = d
        .lines
        .iter()
        .position(|l| !matches!(l.justification, Justification::Axiom { schema: SchemaId::Taut, .. }) && l.formula.to_string().contains("K{i}"))
        .unwrap();
    let mutant = mutate(&d, k, Mutation::SwapAgent).unwrap();
    assert_eq!(mutant.check().unwrap_err().line(), Some(d.lines[k].number));
}

#[test]
fn every_line_is_valid_within_bounds() {
    for (name, _) in CORPUS {
        let d = load(name);
        for class in [ModelClass::Arbitrary, ModelClass::Epistemic] {
            let b = Bounds::new(2, 2).with_class(class);
            for l in &d.lines {
                let v = find_countermodel(&l.formula, &b).unwrap();
                assert!(v.is_valid(), "{name} line {}: {}", l.number, v);
            }
        }
    }
}
