use crate::syntax::Formula;

/// Most distinct atoms the truth table of a Boolean skeleton may have.
pub const MAX_TAUT_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TautVerdict {
    Tautology,
    /// A falsifying row: the truth value of every atom, in first-occurrence order.
    Falsified(Vec<(Formula, bool)>),
    TooManyAtoms(usize),
}

/// Atoms of the Boolean skeleton: maximal subformulas that are neither
/// `⊤`, a negation nor a conjunction, in first-occurrence order.
pub fn skeleton_atoms(f: &Formula) -> Vec<&Formula> {
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::Top => {}
            Formula::Not(g) => go(g, out),
            Formula::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    let mut out = vec![];
    go(f, &mut out);
    out
}

/// Truth-tables the Boolean skeleton of `f`, 64 rows at a time.
pub fn check_tautology(f: &Formula) -> TautVerdict {
    let atoms = skeleton_atoms(f);
    let k = atoms.len();
    if k > MAX_TAUT_ATOMS {
        return TautVerdict::TooManyAtoms(k);
    }
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let rows: u64 = 1 << k;
    let live = if k >= 6 { u64::MAX } else { (1u64 << rows) - 1 };
    let chunks = if k > 6 { 1u64 << (k - 6) } else { 1 };
    for c in 0..chunks {
        let pattern = |j: usize| -> u64 {
            if j < 6 {
                LOW[j]
            } else if c >> (j - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        };
        let v = eval_rows(f, &atoms, &pattern);
        let bad = !v & live;
        if bad != 0 {
            let row = c * 64 + bad.trailing_zeros() as u64;
            return TautVerdict::Falsified(atoms.iter().enumerate().map(|(j, a)| ((*a).clone(), row >> j & 1 == 1)).collect());
        }
    }
    TautVerdict::Tautology
}

pub fn is_tautology(f: &Formula) -> bool {
    check_tautology(f) == TautVerdict::Tautology
}

fn eval_rows(f: &Formula, atoms: &[&Formula], pattern: &dyn Fn(usize) -> u64) -> u64 {
    match f {
        Formula::Top => u64::MAX,
        Formula::Not(g) => !eval_rows(g, atoms, pattern),
        Formula::And(a, b) => eval_rows(a, atoms, pattern) & eval_rows(b, atoms, pattern),
        _ => pattern(atoms.iter().position(|a| *a == f).expect("atom collected")),
    }
}
