use super::grammar::{Grammar, NUM_GRAMMARS};

const WORDS: usize = NUM_GRAMMARS / 64;

/// Fixed-size bitset over all parameter vectors, one bit per grammar.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrammarSet {
    words: Box<[u64; WORDS]>,
}

impl GrammarSet {
    pub fn new() -> Self {
        GrammarSet {
            words: Box::new([0; WORDS]),
        }
    }

    /// All grammars `g` with `g & mask == value & mask`.
    pub fn matching(mask: u16, value: u16) -> Self {
        let mut set = GrammarSet::new();
        for g in Grammar::all() {
            if g.index() & mask == value & mask {
                set.insert(g);
            }
        }
        set
    }

    #[inline]
    pub fn insert(&mut self, g: Grammar) -> bool {
        let i = g.index() as usize;
        let word = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        let fresh = *word & bit == 0;
        *word |= bit;
        fresh
    }

    #[inline]
    pub fn contains(&self, g: Grammar) -> bool {
        let i = g.index() as usize;
        self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn union_with(&mut self, other: &GrammarSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Grammar> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(Grammar::from_index((wi * 64 + tz) as u16).expect("in range"))
            })
        })
    }
}

impl Default for GrammarSet {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for GrammarSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrammarSet(len={})", self.len())
    }
}
