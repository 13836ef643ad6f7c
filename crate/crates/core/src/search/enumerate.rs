use std::sync::Arc;

use rand::Rng;

use crate::model::{Assignment, KripkeModel, PointedModel, Tuple, Vocab, WorldId, WorldSet};

use super::{Bounds, ModelClass, SearchError, Vocabulary};

/// Largest world count a relation bitmask can hold.
pub(crate) const MAX_WORLDS: usize = 8;
/// Largest `domain^arity` a predicate bitmask can hold.
pub(crate) const MAX_TUPLES: usize = 64;

/// Compact finite model over a fixed vocabulary and domain size: relations
/// as `w × w` bitmasks (bit `v * w + u` for `v → u`), extensions as bitmasks
/// over tuple codes, denotations per world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Packed {
    pub w: usize,
    /// per agent
    pub rel: Vec<u64>,
    /// `rho[p * w + world]`
    pub rho: Vec<u64>,
    /// `eta[name * w + world]`
    pub eta: Vec<u32>,
}

/// Every set partition of `0..w`, as equivalence-relation bitmasks, in
/// restricted-growth order.
pub(crate) fn partitions(w: usize) -> Vec<u64> {
    fn go(w: usize, block: &mut Vec<usize>, out: &mut Vec<u64>) {
        if block.len() == w {
            let mut mask = 0u64;
            for v in 0..w {
                for u in 0..w {
                    if block[v] == block[u] {
                        mask |= 1 << (v * w + u);
                    }
                }
            }
            out.push(mask);
            return;
        }
        let next = block.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            block.push(b);
            go(w, block, out);
            block.pop();
        }
    }
    let mut out = vec![];
    go(w, &mut vec![], &mut out);
    out
}

pub(crate) fn relation_count(w: usize, class: ModelClass) -> u128 {
    match class {
        ModelClass::Arbitrary => 1u128 << (w * w),
        ModelClass::Epistemic => partitions(w).len() as u128,
    }
}

fn tuple_count(d: usize, arity: usize) -> usize {
    d.pow(arity as u32)
}

/// Pointed models for one shape: models × assignments × worlds.
pub(crate) fn shape_count(w: usize, d: usize, class: ModelClass, vocab: &Vocabulary) -> u128 {
    let mut n = relation_count(w, class).saturating_pow(vocab.agents.len() as u32);
    for &(_, k) in &vocab.predicates {
        n = n.saturating_mul((1u128 << tuple_count(d, k)).saturating_pow(w as u32));
    }
    let dd = d as u128;
    n = n.saturating_mul(dd.saturating_pow((vocab.names.len() * w) as u32));
    n = n.saturating_mul(dd.saturating_pow(vocab.variables.len() as u32));
    n.saturating_mul(w as u128)
}

/// Closed-form length of [`enumerate_models`]'s stream.
pub fn model_count(b: &Bounds, vocab: &Vocabulary) -> u128 {
    let mut total = 0u128;
    for w in 1..=b.max_worlds {
        for d in 1..=b.max_domain {
            total = total.saturating_add(shape_count(w, d, b.class, vocab));
        }
    }
    total
}

pub(crate) fn check_shape(b: &Bounds, vocab: &Vocabulary) -> Result<(), SearchError> {
    b.validate()?;
    vocab.fits(b)?;
    for (p, k) in &vocab.predicates {
        if tuple_count(b.max_domain, *k) > MAX_TUPLES {
            return Err(SearchError::PredicateTooWide {
                pred: p.to_string(),
                arity: *k,
            });
        }
    }
    Ok(())
}

/// Odometer over every model of one `(w, d)` shape.
pub(crate) struct ShapeIter {
    w: usize,
    rels: Vec<u64>,
    agents: usize,
    arities: Vec<usize>,
    names: usize,
    digits: Option<Vec<u64>>,
    radices: Vec<u64>,
}

impl ShapeIter {
    pub fn new(w: usize, d: usize, class: ModelClass, vocab: &Vocabulary) -> ShapeIter {
        let rels = match class {
            ModelClass::Arbitrary => vec![],
            ModelClass::Epistemic => partitions(w),
        };
        let agents = vocab.agents.len();
        let arities: Vec<usize> = vocab.predicates.iter().map(|&(_, k)| k).collect();
        let names = vocab.names.len();
        let mut radices = vec![];
        let rel_radix = match class {
            ModelClass::Arbitrary => {
                if w * w == 64 {
                    u64::MAX
                } else {
                    1u64 << (w * w)
                }
            }
            ModelClass::Epistemic => rels.len() as u64,
        };
        radices.extend(std::iter::repeat_n(rel_radix, agents));
        for &k in &arities {
            let t = tuple_count(d, k);
            let r = if t == 64 { u64::MAX } else { 1u64 << t };
            radices.extend(std::iter::repeat_n(r, w));
        }
        radices.extend(std::iter::repeat_n(d as u64, names * w));
        ShapeIter {
            w,
            rels,
            agents,
            arities,
            names,
            digits: Some(vec![0; radices.len()]),
            radices,
        }
    }

}

impl Iterator for ShapeIter {
    type Item = Packed;

    fn next(&mut self) -> Option<Packed> {
        let digits = self.digits.as_mut()?;
        let w = self.w;
        let rel = (0..self.agents)
            .map(|a| if self.rels.is_empty() { digits[a] } else { self.rels[digits[a] as usize] })
            .collect();
        let off = self.agents;
        let rho = digits[off..off + self.arities.len() * w].to_vec();
        let off = off + self.arities.len() * w;
        let eta = digits[off..off + self.names * w].iter().map(|&o| o as u32).collect();
        let code = Packed { w, rel, rho, eta };
        let mut k = 0;
        loop {
            if k == digits.len() {
                self.digits = None;
                break;
            }
            digits[k] += 1;
            if digits[k] < self.radices[k] && self.radices[k] != u64::MAX || self.radices[k] == u64::MAX && digits[k] != 0 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        Some(code)
    }
}

/// Uniformly random model of exactly `w` worlds over a domain of size `d`.
pub(crate) fn sample_packed(rng: &mut impl Rng, w: usize, d: usize, class: ModelClass, vocab: &Vocabulary, parts: &[u64]) -> Packed {
    let full = |bits: usize| if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    let rel = (0..vocab.agents.len())
        .map(|_| match class {
            ModelClass::Arbitrary => rng.gen::<u64>() & full(w * w),
            ModelClass::Epistemic => parts[rng.gen_range(0..parts.len())],
        })
        .collect();
    let mut rho = Vec::with_capacity(vocab.predicates.len() * w);
    for &(_, k) in &vocab.predicates {
        for _ in 0..w {
            rho.push(rng.gen::<u64>() & full(tuple_count(d, k)));
        }
    }
    let eta = (0..vocab.names.len() * w).map(|_| rng.gen_range(0..d as u32)).collect();
    Packed { w, rel, rho, eta }
}

pub(crate) fn make_vocab(vocab: &Vocabulary, d: usize) -> Arc<Vocab> {
    Arc::new(Vocab::new(
        (0..d).map(|o| Arc::from(format!("o{o}").as_str())).collect(),
        vocab.agents.clone(),
        vocab.predicates.clone(),
        vocab.names.clone(),
    ))
}

fn decode(mask: u64, d: usize, arity: usize) -> Vec<Tuple> {
    let mut out = vec![];
    let mut m = mask;
    while m != 0 {
        let code = m.trailing_zeros() as usize;
        m &= m - 1;
        let mut t: Tuple = Tuple::from_elem(0, arity);
        let mut c = code;
        for slot in (0..arity).rev() {
            t[slot] = (c % d) as u32;
            c /= d;
        }
        out.push(t);
    }
    out
}

/// Disjoint union of `packed`; component `k` occupies worlds
/// `offsets[k]..offsets[k + 1]`. Truth at a world depends on its component
/// only, so one evaluation covers every component.
pub(crate) fn build_union(packed: &[Packed], vocab: &Arc<Vocab>, with_ids: bool) -> (KripkeModel, Vec<usize>) {
    let mut offsets = Vec::with_capacity(packed.len() + 1);
    let mut n = 0;
    for s in packed {
        offsets.push(n);
        n += s.w;
    }
    offsets.push(n);
    let d = vocab.objects.len();
    let agents = vocab.agents.len();
    let mut rel = vec![vec![WorldSet::empty(n); n]; agents];
    let mut rho = vec![Vec::with_capacity(n); vocab.preds.len()];
    let mut eta = vec![Vec::with_capacity(n); vocab.names.len()];
    let mut ids = vec![];
    for (s, &off) in packed.iter().zip(&offsets) {
        let w = s.w;
        for (a, row) in rel.iter_mut().enumerate() {
            let mask = s.rel[a];
            for v in 0..w {
                for u in 0..w {
                    if mask >> (v * w + u) & 1 == 1 {
                        row[off + v].insert(off + u);
                    }
                }
            }
        }
        for (p, ext) in rho.iter_mut().enumerate() {
            let k = vocab.preds[p].1;
            for v in 0..w {
                ext.push(decode(s.rho[p * w + v], d, k));
            }
        }
        for (a, den) in eta.iter_mut().enumerate() {
            den.extend_from_slice(&s.eta[a * w..(a + 1) * w]);
        }
        if with_ids {
            ids.extend((0..w).map(|v| WorldId::new(format!("w{v}"))));
        }
    }
    let m = KripkeModel {
        vocab: vocab.clone(),
        ids,
        n,
        base: (0..n as u32).collect(),
        rho: Arc::new(rho),
        rel,
        eta,
    };
    (m, offsets)
}

/// Every assignment of the vocabulary's variables, in odometer order.
pub(crate) fn assignments(vocab: &Vocabulary, d: usize) -> Vec<Assignment> {
    let k = vocab.variables.len();
    let total = d.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let mut sigma = Assignment::new();
            for x in vocab.variables.iter().rev() {
                sigma.set(x.clone(), (code % d) as u32);
                code /= d;
            }
            sigma
        })
        .collect()
}

/// Every pointed model within `b` over `vocab`, ordered by world count,
/// domain size, model, assignment and world.
pub fn enumerate_models(b: &Bounds, vocab: &Vocabulary) -> Result<impl Iterator<Item = PointedModel>, SearchError> {
    let (b, mut vocab) = (b.clone(), vocab.clone());
    vocab.normalize();
    check_shape(&b, &vocab)?;
    let shapes: Vec<(usize, usize)> = (1..=b.max_worlds).flat_map(|w| (1..=b.max_domain).map(move |d| (w, d))).collect();
    Ok(shapes.into_iter().flat_map(move |(w, d)| {
        let voc = make_vocab(&vocab, d);
        let sigmas = assignments(&vocab, d);
        ShapeIter::new(w, d, b.class, &vocab).flat_map(move |code| {
            let m = Arc::new(build_union(std::slice::from_ref(&code), &voc, true).0);
            let sigmas = sigmas.clone();
            sigmas
                .into_iter()
                .flat_map(move |sigma| {
                    let m = m.clone();
                    (0..w).map(move |v| PointedModel::new(m.clone(), v, sigma.clone()))
                })
                .collect::<Vec<_>>()
        })
    }))
}
