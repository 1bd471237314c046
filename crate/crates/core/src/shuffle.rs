//! Physical card-shuffling models, their exact laws by enumeration, and
//! seeded Monte Carlo sampling.
//!
//! Decks are listed top to bottom with cards `1..=n` (0-based internally).
//! A signed deck also records whether each card is face down.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GroupAlgebraElement, SignedMeasure};
use crate::coxeter::{build_group, CoxeterGroup, CoxeterType};
use crate::error::{Error, Result};

/// Largest number of equally weighted branches an exact enumeration may visit.
pub const MAX_BRANCHES: u64 = 10_000_000;

/// Number of independent RNG streams used by `monte_carlo`.
pub const SHARDS: u64 = 64;

/// How a deck arrangement becomes a group element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DeckEncoding {
    /// `(c_1, …, c_n)` is the permutation sending position `i` to card `c_i`.
    #[default]
    PositionToCard,
    /// The inverse: card `c_i` is sent to position `i`.
    CardToPosition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Gilbert–Shannon–Reeds `a`-shuffle of `n` cards.
    Gsr { n: usize, a: u32 },
    /// Cut into `2k+1` stacks, flip the even-numbered ones, riffle.
    TypeCFlip { n: usize, k: u32 },
    /// Split off a pile of even size `2j` from both ends, riffle the two piles.
    X2Physical { n: usize },
}

impl Model {
    pub fn cards(&self) -> usize {
        match *self {
            Model::Gsr { n, .. } | Model::TypeCFlip { n, .. } | Model::X2Physical { n } => n,
        }
    }

    pub fn is_signed(&self) -> bool {
        matches!(self, Model::TypeCFlip { .. })
    }

    /// The group the outcomes live in: `S_n = A_{n-1}` or `C_n`.
    pub fn group_type(&self) -> Result<CoxeterType> {
        let n = self.cards();
        match *self {
            Model::Gsr { a: 0, .. } => Err(Error::Domain("a must be at least 1".into())),
            Model::TypeCFlip { k: 0, .. } => Err(Error::Domain("k must be at least 1".into())),
            Model::Gsr { .. } | Model::X2Physical { .. } if n < 2 => {
                Err(Error::Domain("decks need at least 2 cards".into()))
            }
            Model::TypeCFlip { .. } if n < 2 => Err(Error::Domain("signed decks need at least 2 cards".into())),
            Model::TypeCFlip { .. } => Ok(CoxeterType::C(n)),
            _ => Ok(CoxeterType::A(n - 1)),
        }
    }

    fn piles(&self) -> usize {
        match *self {
            Model::Gsr { a, .. } => a as usize,
            Model::TypeCFlip { k, .. } => 2 * k as usize + 1,
            Model::X2Physical { .. } => 2,
        }
    }
}

/// A deck: `cards[i]` is the (0-based) card at position `i` from the top,
/// `down[i]` whether it is face down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deck {
    pub cards: Vec<usize>,
    pub down: Vec<bool>,
}

impl Deck {
    pub fn new(n: usize) -> Deck {
        Deck { cards: (0..n).collect(), down: vec![false; n] }
    }

    fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.cards.len()];
        self.cards.len() == self.down.len()
            && self.cards.iter().all(|&c| c < seen.len() && !std::mem::replace(&mut seen[c], true))
    }
}

/// Cuts `sizes` consecutive packets from the top of a fresh deck, flipping
/// the packets with odd 0-based index when `flip` is set, and deals the
/// output according to `labels` (label of each output position).
fn deal(n: usize, sizes: &[usize], flip: bool, labels: &[usize]) -> Deck {
    let mut packets: Vec<Vec<(usize, bool)>> = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for (p, &s) in sizes.iter().enumerate() {
        let mut packet: Vec<(usize, bool)> = (start..start + s).map(|c| (c, false)).collect();
        if flip && p % 2 == 1 {
            packet.reverse();
            for c in &mut packet {
                c.1 = !c.1;
            }
        }
        packets.push(packet);
        start += s;
    }
    let mut next = vec![0usize; sizes.len()];
    let mut deck = Deck { cards: Vec::with_capacity(n), down: Vec::with_capacity(n) };
    for &l in labels {
        let (c, d) = packets[l][next[l]];
        next[l] += 1;
        deck.cards.push(c);
        deck.down.push(d);
    }
    deck
}

/// Piles for one round of the `X2Physical` model with `2j = 2 * j` cards in
/// the second pile: the middle cards, then the bottom `j` on top of the top `j`.
fn x2_piles(n: usize, j: usize) -> Vec<Vec<(usize, bool)>> {
    let middle: Vec<(usize, bool)> = (j..n - j).map(|c| (c, false)).collect();
    let second: Vec<(usize, bool)> = (n - j..n).chain(0..j).map(|c| (c, false)).collect();
    vec![middle, second]
}

fn merge(piles: &[Vec<(usize, bool)>], labels: &[usize]) -> Deck {
    let mut next = vec![0usize; piles.len()];
    let mut deck = Deck { cards: vec![], down: vec![] };
    for &l in labels {
        let (c, d) = piles[l][next[l]];
        next[l] += 1;
        deck.cards.push(c);
        deck.down.push(d);
    }
    deck
}

/// Drops cards one at a time, choosing a packet with probability proportional to its size.
fn drop_labels<R: Rng>(sizes: &[usize], rng: &mut R) -> Vec<usize> {
    let mut left = sizes.to_vec();
    let mut remaining: usize = left.iter().sum();
    let mut labels = Vec::with_capacity(remaining);
    while remaining > 0 {
        let mut u = rng.random_range(0..remaining);
        let mut p = 0;
        while u >= left[p] {
            u -= left[p];
            p += 1;
        }
        left[p] -= 1;
        remaining -= 1;
        labels.push(p);
    }
    labels
}

/// Multinomial cut sizes from `n` independent uniform packet choices.
fn cut_sizes<R: Rng>(n: usize, piles: usize, rng: &mut R) -> Vec<usize> {
    let mut sizes = vec![0usize; piles];
    for _ in 0..n {
        sizes[rng.random_range(0..piles)] += 1;
    }
    sizes
}

pub fn gsr_a_shuffle<R: Rng>(n: usize, a: u32, rng: &mut R) -> Deck {
    let sizes = cut_sizes(n, a as usize, rng);
    let labels = drop_labels(&sizes, rng);
    deal(n, &sizes, false, &labels)
}

pub fn type_c_flip_shuffle<R: Rng>(n: usize, k: u32, rng: &mut R) -> Deck {
    let sizes = cut_sizes(n, 2 * k as usize + 1, rng);
    let labels = drop_labels(&sizes, rng);
    deal(n, &sizes, true, &labels)
}

pub fn x2_physical_shuffle<R: Rng>(n: usize, rng: &mut R) -> Deck {
    // P(2j) = C(n, 2j) / 2^{n-1}: the parity-even subsets of n coins.
    let mut heads = 0;
    for _ in 0..n - 1 {
        heads += rng.random_range(0..2usize);
    }
    let last = heads % 2;
    let j = (heads + last) / 2;
    let piles = x2_piles(n, j);
    let labels = drop_labels(&[piles[0].len(), piles[1].len()], rng);
    merge(&piles, &labels)
}

pub fn sample<R: Rng>(model: Model, rng: &mut R) -> Deck {
    match model {
        Model::Gsr { n, a } => gsr_a_shuffle(n, a, rng),
        Model::TypeCFlip { n, k } => type_c_flip_shuffle(n, k, rng),
        Model::X2Physical { n } => x2_physical_shuffle(n, rng),
    }
}

/// Translates decks into elements of `S_n` or `C_n`.
#[derive(Clone, Debug)]
pub struct DeckIndex {
    group: Arc<CoxeterGroup>,
    signed: bool,
    encoding: DeckEncoding,
    lookup: HashMap<Vec<i8>, usize>,
}

impl DeckIndex {
    pub fn new(model: Model, encoding: DeckEncoding) -> Result<DeckIndex> {
        let group = build_group(model.group_type()?)?;
        let signed = model.is_signed();
        let n = model.cards();
        let mut lookup = HashMap::with_capacity(group.order());
        for perm in permutations(n) {
            let signs: Vec<u32> = if signed { (0..1u32 << n).collect() } else { vec![0] };
            for s in signs {
                // Signed permutation: e_i ↦ ±e_{perm[i]}.
                let key: Vec<i8> = (0..n).map(|i| signed_card(perm[i], s >> i & 1 == 1)).collect();
                let w = element_of_signed_perm(&group, &key)?;
                lookup.insert(key, w);
            }
        }
        if lookup.len() != group.order() {
            return Err(Error::Invariant("deck lookup is not a bijection onto the group".into()));
        }
        Ok(DeckIndex { group, signed, encoding, lookup })
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    pub fn encoding(&self) -> DeckEncoding {
        self.encoding
    }

    pub fn element(&self, deck: &Deck) -> usize {
        debug_assert!(deck.is_valid());
        let n = deck.cards.len();
        let key: Vec<i8> = match self.encoding {
            DeckEncoding::PositionToCard => {
                (0..n).map(|i| signed_card(deck.cards[i], self.signed && deck.down[i])).collect()
            }
            DeckEncoding::CardToPosition => {
                let mut key = vec![0i8; n];
                for i in 0..n {
                    key[deck.cards[i]] = signed_card(i, self.signed && deck.down[i]);
                }
                key
            }
        };
        self.lookup[&key]
    }
}

/// `±(c+1)` as a signed 1-based card.
fn signed_card(c: usize, down: bool) -> i8 {
    let v = c as i8 + 1;
    if down {
        -v
    } else {
        v
    }
}

/// Group element acting on `e_1, …, e_n` by `e_i ↦ sign · e_{|key[i]|}`.
///
/// Type A: `α_i = e_i - e_{i+1}`, coordinates of `Σ v_i e_i` are partial sums.
/// Type C: additionally `α_n = 2e_n`, so the last coordinate is `(Σ v_i) / 2`.
fn element_of_signed_perm(group: &CoxeterGroup, key: &[i8]) -> Result<usize> {
    let n = key.len();
    let field = group.field();
    let type_c = matches!(group.coxeter_type(), CoxeterType::C(_));
    let image = |v: &[i64]| -> Vec<i64> {
        // e_j ↦ sign e_{|key[j]|}
        let mut out = vec![0i64; n];
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                let t = key[j];
                out[t.unsigned_abs() as usize - 1] += if t < 0 { -c } else { c };
            }
        }
        out
    };
    let coords = |v: &[i64]| -> Vec<BigRational> {
        let rank = group.rank();
        let mut out = Vec::with_capacity(rank);
        let mut acc = 0i64;
        for &x in v.iter().take(rank.min(n - 1)) {
            acc += x;
            out.push(BigRational::from_integer(acc.into()));
        }
        if type_c {
            let total: i64 = v.iter().sum();
            out.push(BigRational::new(total.into(), 2.into()));
        }
        out
    };
    let mut images = Vec::with_capacity(group.rank());
    for i in 0..group.rank() {
        let mut alpha = vec![0i64; n];
        if type_c && i == n - 1 {
            alpha[i] = 2;
        } else {
            alpha[i] = 1;
            alpha[i + 1] = -1;
        }
        let c: Vec<_> = coords(&image(&alpha)).into_iter().map(|q| field.elem(q)).collect();
        images.push(group.root_index(&c).ok_or_else(|| Error::Invariant("image of a simple root is not a root".into()))?);
    }
    group
        .element_from_simple_images(&images)
        .ok_or_else(|| Error::Invariant("simple-root images do not define a group element".into()))
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Visits every label word of the model with its (equal) weight.
///
/// For `Gsr` and `TypeCFlip` a uniform word in `{0..piles}^n` fixes both the
/// cut (label counts) and the interleaving, and each word has chance
/// `piles^{-n}`. For `X2Physical` the words with an even number of second-pile
/// labels are equally likely.
fn branch_count(model: Model) -> Option<u64> {
    let n = model.cards() as u32;
    match model {
        Model::X2Physical { .. } => 2u64.checked_pow(n - 1),
        _ => (model.piles() as u64).checked_pow(n),
    }
}

/// Exact law of a model by full enumeration of its branches.
pub fn exact_model_distribution(model: Model, encoding: DeckEncoding) -> Result<SignedMeasure> {
    let index = DeckIndex::new(model, encoding)?;
    exact_with_index(model, &index)
}

pub fn exact_with_index(model: Model, index: &DeckIndex) -> Result<SignedMeasure> {
    let branches = branch_count(model).filter(|&b| b <= MAX_BRANCHES).ok_or_else(|| {
        Error::Resource(format!("exact enumeration of {model:?} exceeds {MAX_BRANCHES} branches"))
    })?;
    let n = model.cards();
    let piles = model.piles();
    let mut counts = vec![0u64; index.group().order()];
    let mut labels = vec![0usize; n];
    let total = (piles as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = (c % piles as u64) as usize;
            c /= piles as u64;
        }
        let deck = match model {
            Model::X2Physical { .. } => {
                let second = labels.iter().filter(|&&l| l == 1).count();
                if second % 2 == 1 {
                    continue;
                }
                merge(&x2_piles(n, second / 2), &labels)
            }
            _ => {
                let mut sizes = vec![0usize; piles];
                for &l in &labels {
                    sizes[l] += 1;
                }
                deal(n, &sizes, model.is_signed(), &labels)
            }
        };
        counts[index.element(&deck)] += 1;
    }
    let denom = BigInt::from(branches);
    let coeffs = counts.into_iter().map(|c| BigRational::new(c.into(), denom.clone())).collect();
    SignedMeasure::new(GroupAlgebraElement::new(index.group().clone(), coeffs))
}

/// Sample counts per group element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmpiricalDistribution {
    pub model: Model,
    pub encoding: DeckEncoding,
    pub seed: u64,
    pub trials: u64,
    pub counts: Vec<u64>,
}

impl EmpiricalDistribution {
    pub fn frequency(&self, w: usize) -> f64 {
        self.counts[w] as f64 / self.trials as f64
    }

    /// `½ Σ |count/trials - p(w)|`, computed exactly.
    pub fn total_variation_exact(&self, exact: &SignedMeasure) -> Result<BigRational> {
        if exact.group().order() != self.counts.len() {
            return Err(Error::Domain("distributions live on different groups".into()));
        }
        let t = BigInt::from(self.trials);
        let s: BigRational = self
            .counts
            .iter()
            .enumerate()
            .map(|(w, &c)| (BigRational::new(c.into(), t.clone()) - exact.value(w)).abs())
            .sum();
        Ok(s / BigRational::from_integer(2.into()))
    }

    pub fn total_variation(&self, exact: &SignedMeasure) -> Result<f64> {
        Ok(self.total_variation_exact(exact)?.to_f64().unwrap_or(f64::NAN))
    }

    /// CSV with a commented header recording the parameters.
    pub fn to_csv(&self, group: &CoxeterGroup) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# model={:?} encoding={:?} seed={} trials={}", self.model, self.encoding, self.seed, self.trials);
        out.push_str("word,descents,count,frequency\n");
        for w in group.elements() {
            let _ = writeln!(out, "{},{},{},{}", group.word_string(w), group.descent_count(w), self.counts[w], self.frequency(w));
        }
        out
    }
}

/// Seeded Monte Carlo over `SHARDS` ChaCha streams; the result depends only
/// on `(model, encoding, trials, seed)`, not on the thread count.
pub fn monte_carlo(model: Model, encoding: DeckEncoding, trials: u64, seed: u64) -> Result<EmpiricalDistribution> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let index = DeckIndex::new(model, encoding)?;
    monte_carlo_with_index(model, &index, trials, seed)
}

pub fn monte_carlo_with_index(model: Model, index: &DeckIndex, trials: u64, seed: u64) -> Result<EmpiricalDistribution> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let order = index.group().order();
    let shards: Vec<Vec<u64>> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let quota = trials / SHARDS + u64::from(s < trials % SHARDS);
            let mut counts = vec![0u64; order];
            for _ in 0..quota {
                counts[index.element(&sample(model, &mut rng))] += 1;
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; order];
    for shard in shards {
        for (c, s) in counts.iter_mut().zip(shard) {
            *c += s;
        }
    }
    Ok(EmpiricalDistribution { model, encoding: index.encoding(), seed, trials, counts })
}

/// `P(2j) = C(n, 2j) / 2^{n-1}` for the first step of the `X2Physical` model.
pub fn x2_split_probabilities(n: usize) -> Vec<(usize, BigRational)> {
    let denom = BigInt::one() << (n - 1);
    let mut binom = BigInt::one();
    let mut out = vec![];
    for i in 0..=n {
        if i % 2 == 0 {
            out.push((i, BigRational::new(binom.clone(), denom.clone())));
        }
        binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out.retain(|(_, p)| !p.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn permutations_are_complete() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn descents_of_decks_match_the_group() {
        let idx = DeckIndex::new(Model::Gsr { n: 4, a: 2 }, DeckEncoding::PositionToCard).unwrap();
        for p in permutations(4) {
            let deck = Deck { cards: p.clone(), down: vec![false; 4] };
            let w = idx.element(&deck);
            let descents = (0..3).filter(|&i| p[i] > p[i + 1]).count() as u32;
            assert_eq!(idx.group().descent_count(w), descents);
        }
    }

    #[test]
    fn signed_decks_cover_c3() {
        let idx = DeckIndex::new(Model::TypeCFlip { n: 3, k: 1 }, DeckEncoding::PositionToCard).unwrap();
        assert_eq!(idx.lookup.len(), 48);
        // turning every card over is -1, the longest element of C_n
        let turned = Deck { cards: vec![0, 1, 2], down: vec![true; 3] };
        assert_eq!(idx.element(&turned), idx.group().longest_element());
        assert_eq!(idx.element(&Deck::new(3)), 0);
    }

    #[test]
    fn gsr_small_exact_law() {
        let m = exact_model_distribution(Model::Gsr { n: 3, a: 2 }, DeckEncoding::PositionToCard).unwrap();
        let g = m.group();
        for w in g.elements() {
            let expect = match g.descent_count(w) {
                0 => rat(1, 2),
                1 => rat(1, 8),
                _ => rat(0, 1),
            };
            assert_eq!(*m.value(w), expect);
        }
        let one = exact_model_distribution(Model::Gsr { n: 4, a: 1 }, DeckEncoding::PositionToCard).unwrap();
        assert_eq!(*one.value(0), rat(1, 1));
    }

    #[test]
    fn x2_split_law() {
        let p = x2_split_probabilities(4);
        assert_eq!(p, vec![(0, rat(1, 8)), (2, rat(6, 8)), (4, rat(1, 8))]);
        let p = x2_split_probabilities(3);
        assert_eq!(p, vec![(0, rat(1, 4)), (2, rat(3, 4))]);
    }

    #[test]
    fn x2_on_three_cards() {
        let m = exact_model_distribution(Model::X2Physical { n: 3 }, DeckEncoding::PositionToCard).unwrap();
        let idx = DeckIndex::new(Model::X2Physical { n: 3 }, DeckEncoding::PositionToCard).unwrap();
        for cards in [[0, 1, 2], [2, 0, 1], [2, 1, 0], [1, 2, 0]] {
            let w = idx.element(&Deck { cards: cards.to_vec(), down: vec![false; 3] });
            assert_eq!(*m.value(w), rat(1, 4));
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let model = Model::Gsr { n: 4, a: 2 };
        let a = monte_carlo(model, DeckEncoding::PositionToCard, 10_000, 7).unwrap();
        let b = monte_carlo(model, DeckEncoding::PositionToCard, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 10_000);
        let c = monte_carlo(model, DeckEncoding::PositionToCard, 1, 7).unwrap();
        assert_eq!(c.counts.iter().sum::<u64>(), 1);
        assert!(monte_carlo(model, DeckEncoding::PositionToCard, 0, 7).is_err());
    }

    #[test]
    fn enumeration_cap() {
        let r = exact_model_distribution(Model::Gsr { n: 8, a: 9 }, DeckEncoding::PositionToCard);
        assert!(matches!(r, Err(Error::Resource(_))));
    }
}
