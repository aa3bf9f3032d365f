//! Language domain: grammars, sentence patterns and the licensing relation.
//!
//! Parsing is exact membership in a precomputed license index. Each interned
//! sentence carries a [`GrammarSet`] bitset of the grammars that license it, so
//! `licenses` is one hash lookup plus one bit test; the runner skips the hash
//! lookup entirely by working with [`SentenceId`]s.

mod fixture;
mod grammar;
mod grammar_set;
mod sentence;
mod tsv;

use std::collections::HashMap;

pub use fixture::build_fixture_domain;
pub use grammar::{Grammar, SupersetRegistry, NS, NUM_GRAMMARS, NUM_PARAMS, PARAM_NAMES};
pub use grammar_set::GrammarSet;
pub use sentence::{Force, Sentence, Token};
pub use tsv::{load_domain, save_domain};

use crate::error::{Error, Result};

/// Dense handle of a sentence interned in a [`Domain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceId(u32);

impl SentenceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Immutable, fully indexed language domain.
#[derive(Clone)]
pub struct Domain {
    sentences: Vec<Sentence>,
    ids: HashMap<Sentence, SentenceId>,
    licensors: Vec<GrammarSet>,
    languages: Vec<Vec<SentenceId>>,
}

impl Domain {
    /// Builds a domain from (sentence, licensing grammars) pairs. Repeated
    /// sentences have their grammar sets merged; sentences nobody licenses are
    /// dropped.
    pub fn from_licenses(
        entries: impl IntoIterator<Item = (Sentence, GrammarSet)>,
    ) -> Result<Self> {
        let mut builder = DomainBuilder::default();
        for (sentence, set) in entries {
            builder.add_set(sentence, &set);
        }
        builder.build()
    }

    #[inline]
    pub fn id_of(&self, s: &Sentence) -> Option<SentenceId> {
        self.ids.get(s).copied()
    }

    #[inline]
    pub fn sentence(&self, id: SentenceId) -> &Sentence {
        &self.sentences[id.index()]
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn sentence_ids(&self) -> impl Iterator<Item = SentenceId> {
        (0..self.sentences.len() as u32).map(SentenceId)
    }

    /// True iff `g` licenses `s`. Unknown grammars and sentences license nothing.
    pub fn licenses(&self, g: Grammar, s: &Sentence) -> bool {
        self.id_of(s).is_some_and(|id| self.licenses_id(g, id))
    }

    #[inline]
    pub fn licenses_id(&self, g: Grammar, id: SentenceId) -> bool {
        self.licensors[id.index()].contains(g)
    }

    pub fn licensors(&self, id: SentenceId) -> &GrammarSet {
        &self.licensors[id.index()]
    }

    pub fn contains_grammar(&self, g: Grammar) -> bool {
        !self.languages[g.index() as usize].is_empty()
    }

    pub fn grammars(&self) -> impl Iterator<Item = Grammar> + '_ {
        Grammar::all().filter(|&g| self.contains_grammar(g))
    }

    pub fn grammar_count(&self) -> usize {
        self.languages.iter().filter(|l| !l.is_empty()).count()
    }

    /// Sentence ids licensed by `g`, in ascending sentence order.
    pub fn language_ids(&self, g: Grammar) -> Result<&[SentenceId]> {
        let lang = &self.languages[g.index() as usize];
        if lang.is_empty() {
            return Err(Error::UnknownGrammar(g.to_string()));
        }
        Ok(lang)
    }

    pub fn language_of(&self, g: Grammar) -> Result<Vec<&Sentence>> {
        Ok(self
            .language_ids(g)?
            .iter()
            .map(|&id| self.sentence(id))
            .collect())
    }

    /// Number of (grammar, sentence) license pairs.
    pub fn license_count(&self) -> usize {
        self.licensors.iter().map(GrammarSet::len).sum()
    }
}

impl PartialEq for Domain {
    /// Semantic equality: the same license relation, regardless of interning order.
    fn eq(&self, other: &Self) -> bool {
        self.sentences.len() == other.sentences.len()
            && self
                .sentences
                .iter()
                .zip(&self.licensors)
                .all(|(s, set)| other.id_of(s).is_some_and(|id| other.licensors(id) == set))
    }
}

impl Eq for Domain {}

impl std::fmt::Debug for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Domain")
            .field("grammars", &self.grammar_count())
            .field("sentences", &self.sentences.len())
            .field("licenses", &self.license_count())
            .finish()
    }
}

#[derive(Default)]
pub(crate) struct DomainBuilder {
    order: Vec<Sentence>,
    sets: HashMap<Sentence, GrammarSet>,
}

impl DomainBuilder {
    pub(crate) fn add(&mut self, g: Grammar, s: Sentence) {
        self.slot(s).insert(g);
    }

    pub(crate) fn add_set(&mut self, s: Sentence, set: &GrammarSet) {
        self.slot(s).union_with(set);
    }

    fn slot(&mut self, s: Sentence) -> &mut GrammarSet {
        if !self.sets.contains_key(&s) {
            self.order.push(s.clone());
        }
        self.sets.entry(s).or_default()
    }

    /// Interns sentences in sorted order so that ids do not depend on input order.
    pub(crate) fn build(self) -> Result<Domain> {
        let DomainBuilder {
            mut order,
            mut sets,
        } = self;
        order.retain(|s| !sets[s].is_empty());
        if order.is_empty() {
            return Err(Error::NoGrammars);
        }
        order.sort();
        let mut ids = HashMap::with_capacity(order.len());
        let mut licensors = Vec::with_capacity(order.len());
        let mut languages = vec![Vec::new(); NUM_GRAMMARS];
        for (i, s) in order.iter().enumerate() {
            let id = SentenceId(i as u32);
            let set = sets.remove(s).expect("sentence registered");
            for g in set.iter() {
                languages[g.index() as usize].push(id);
            }
            ids.insert(s.clone(), id);
            licensors.push(set);
        }
        Ok(Domain {
            sentences: order,
            ids,
            licensors,
            languages,
        })
    }
}
