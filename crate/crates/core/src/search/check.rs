use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Assignment, PointedModel, Vocab, WorldSet};
use crate::semantics::{eval, sat, truth_set};
use crate::syntax::Formula;

use super::enumerate::{assignments, build_union, check_shape, make_vocab, partitions, sample_packed, ShapeIter, Packed};
use super::{Bounds, ModelClass, SearchError, Verdict, Vocabulary};

/// Components are packed into one model until it reaches this many worlds.
const BATCH_WORLDS: usize = 64;

/// Where the pointed models of a search come from.
#[derive(Clone, Debug)]
pub enum ModelSource {
    /// every model within the bounds
    Exhaustive(Bounds),
    /// `count` uniformly random models with exactly `max_worlds` worlds and
    /// `max_domain` objects, each under every assignment at every world
    Sampled { bounds: Bounds, count: usize, seed: u64 },
}

impl ModelSource {
    pub fn bounds(&self) -> &Bounds {
        match self {
            ModelSource::Exhaustive(b) | ModelSource::Sampled { bounds: b, .. } => b,
        }
    }
}

/// A countermodel to `f` within `b`, or the number of pointed models checked.
pub fn find_countermodel(f: &Formula, b: &Bounds) -> Result<Verdict, SearchError> {
    find_countermodel_in(f, &ModelSource::Exhaustive(b.clone()))
}

/// The first pointed model where `f` and `g` differ.
pub fn find_disagreement(f: &Formula, g: &Formula, source: &ModelSource) -> Result<Verdict, SearchError> {
    find_countermodel_in(&Formula::iff(f.clone(), g.clone()), source)
}

/// Countermodel search over `source`. In exhaustive mode the countermodel
/// returned is the first falsifying pointed model in enumeration order.
pub fn find_countermodel_in(f: &Formula, source: &ModelSource) -> Result<Verdict, SearchError> {
    let vocab = Vocabulary::of(f);
    let b = source.bounds();
    check_shape(b, &vocab)?;
    let mut checked = 0usize;
    let mut checked_symbols = false;
    let mut visit = |packed: &[Packed], voc: &Arc<Vocab>, sigmas: &[Assignment]| -> Result<Option<PointedModel>, SearchError> {
        let (m, offsets) = build_union(packed, voc, false);
        if !checked_symbols {
            truth_set(&m, &sigmas[0], f)?;
            checked_symbols = true;
        }
        let full = WorldSet::full(m.n);
        let mut falsified = false;
        let mut sets = Vec::with_capacity(sigmas.len());
        for sigma in sigmas {
            let s = sat(&m, sigma, f);
            falsified |= s != full;
            sets.push(s);
        }
        if !falsified {
            checked += m.n * sigmas.len();
            return Ok(None);
        }
        for (k, code) in packed.iter().enumerate() {
            for (si, s) in sets.iter().enumerate() {
                if let Some(w) = (0..code.w).find(|&w| !s.contains(offsets[k] + w)) {
                    let single = Arc::new(build_union(std::slice::from_ref(code), voc, true).0);
                    let pm = PointedModel::new(single, w, sigmas[si].clone());
                    if eval(&pm, f)? {
                        return Err(SearchError::Unconfirmed);
                    }
                    return Ok(Some(pm));
                }
            }
        }
        unreachable!("a falsified batch has a falsified component")
    };
    let found = match source {
        ModelSource::Exhaustive(b) => {
            let mut found = None;
            'shapes: for w in 1..=b.max_worlds {
                for d in 1..=b.max_domain {
                    let voc = make_vocab(&vocab, d);
                    let sigmas = assignments(&vocab, d);
                    let mut it = ShapeIter::new(w, d, b.class, &vocab);
                    if let Some(pm) = run_batches(&mut it, w, &voc, &sigmas, &mut visit)? {
                        found = Some(pm);
                        break 'shapes;
                    }
                }
            }
            found
        }
        ModelSource::Sampled { bounds, count, seed } => {
            let (w, d) = (bounds.max_worlds, bounds.max_domain);
            let voc = make_vocab(&vocab, d);
            let sigmas = assignments(&vocab, d);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let parts = match bounds.class {
                ModelClass::Epistemic => partitions(w),
                ModelClass::Arbitrary => vec![],
            };
            let mut it = (0..*count).map(|_| sample_packed(&mut rng, w, d, bounds.class, &vocab, &parts));
            run_batches(&mut it, w, &voc, &sigmas, &mut visit)?
        }
    };
    Ok(match found {
        Some(pm) => Verdict::Countermodel(Box::new(pm)),
        None => Verdict::ValidWithinBounds { checked },
    })
}

type Visit<'a> = dyn FnMut(&[Packed], &Arc<Vocab>, &[Assignment]) -> Result<Option<PointedModel>, SearchError> + 'a;

fn run_batches(
    packed: &mut dyn Iterator<Item = Packed>,
    w: usize,
    voc: &Arc<Vocab>,
    sigmas: &[Assignment],
    visit: &mut Visit<'_>,
) -> Result<Option<PointedModel>, SearchError> {
    let per_batch = (BATCH_WORLDS / w).max(1);
    let mut batch = Vec::with_capacity(per_batch);
    loop {
        batch.clear();
        batch.extend((&mut *packed).take(per_batch));
        if batch.is_empty() {
            return Ok(None);
        }
        if let Some(pm) = visit(&batch, voc, sigmas)? {
            return Ok(Some(pm));
        }
    }
}
