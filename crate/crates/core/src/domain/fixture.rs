//! Bundled desk-scale domain.
//!
//! CoLAG English is generated from six verb frames combined with auxiliary,
//! negation, adverb, fronting and inversion options, giving 180 declarative,
//! 36 imperative and 144 question patterns. Each pattern records the
//! parameters its surface form cues (subject present, auxiliary in a
//! declarative, inversion, fronting, stranding, low verb). A grammar licenses a
//! pattern iff it agrees with English on every cued parameter, so grammars
//! close to English parse most of its sentences.
//!
//! NS-English adds one subjectless variant per subjectful declarative or
//! question: the `S` token is deleted, SP stops being cued and NS=1 is
//! required. Variants that collide after deletion are merged and licensed by
//! the union of their sources' grammars. Imperatives never carry a subject
//! and do not cue NS, so both NS values license them.
//!
//! Every pattern cues HIP, so grammars with HIP=1 license nothing and are
//! absent from the domain (4096 of the 8192 parameter vectors remain).

use super::grammar::{Grammar, NS};
use super::{Domain, Force, GrammarSet, Sentence, Token};

use Token::*;

const SP: usize = 0;
const HIP: usize = 1;
const HCP: usize = 2;
const OPT: usize = 3;
const NT: usize = 5;
const WHM: usize = 6;
const PI: usize = 7;
const TM: usize = 8;
const VTOI: usize = 9;
const ITOC: usize = 10;
const AH: usize = 11;
const QINV: usize = 12;

#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    pub tokens: Vec<Token>,
    pub force: Force,
    /// Parameters the pattern constrains, as a grammar bit mask.
    pub cues: u16,
}

impl Pattern {
    fn new(tokens: Vec<Token>, force: Force, cue_params: &[usize]) -> Self {
        let mut cues = Grammar::bit(HIP);
        if tokens.contains(&S) {
            cues |= Grammar::bit(SP);
        }
        for &p in cue_params {
            cues |= Grammar::bit(p);
        }
        Pattern {
            tokens,
            force,
            cues,
        }
    }

    fn licensors(&self, required: u16) -> GrammarSet {
        let english = Grammar::COLAG_ENGLISH.index();
        GrammarSet::matching(self.cues, (english & !required) | required)
    }
}

fn frames() -> [Vec<Token>; 6] {
    [
        vec![Verb],
        vec![Verb, O1],
        vec![Verb, O2, O1],
        vec![Verb, P, O3],
        vec![Verb, O1, P, O3],
        vec![Verb, O2, O1, P, O3],
    ]
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fronting {
    Object1,
    Object2,
    PrepPhrase,
    Stranded,
}

/// Splits `frame` into (fronted constituent, remainder).
fn front(frame: &[Token], kind: Fronting) -> Option<(Vec<Token>, Vec<Token>)> {
    let without = |drop: &[Token]| -> Vec<Token> {
        frame
            .iter()
            .copied()
            .filter(|t| !drop.contains(t))
            .collect()
    };
    match kind {
        Fronting::Object1 if frame.contains(&O1) => Some((vec![O1], without(&[O1]))),
        Fronting::Object2 if frame.contains(&O2) => Some((vec![O2], without(&[O2]))),
        Fronting::PrepPhrase if frame.contains(&P) => Some((vec![P, O3], without(&[P, O3]))),
        Fronting::Stranded if frame.contains(&P) => {
            let mut rest = without(&[P, O3]);
            rest.push(P);
            Some((vec![O3], rest))
        }
        _ => None,
    }
}

fn frontings(frame: &[Token]) -> Vec<(Fronting, Vec<Token>, Vec<Token>)> {
    [
        Fronting::Object1,
        Fronting::Object2,
        Fronting::PrepPhrase,
        Fronting::Stranded,
    ]
    .into_iter()
    .filter_map(|k| front(frame, k).map(|(x, rest)| (k, x, rest)))
    .collect()
}

fn cat(parts: &[&[Token]]) -> Vec<Token> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Cues for a subject-initial or imperative pattern with the given
/// auxiliary/negation prefix and preverbal adverb flag.
fn low_verb_cues(auxneg: &[Token], preverbal_adv: bool) -> Vec<usize> {
    let has_aux = auxneg.contains(&Aux);
    if !has_aux && (auxneg.contains(&Never) || preverbal_adv) {
        vec![VTOI, AH]
    } else {
        Vec::new()
    }
}

fn declaratives() -> Vec<Pattern> {
    let auxneg: [&[Token]; 5] = [&[], &[Aux], &[Aux, Not], &[Never], &[Aux, Never]];
    let mut out = Vec::with_capacity(180);
    for frame in frames() {
        for an in auxneg {
            let mut cues = low_verb_cues(an, false);
            if an.contains(&Aux) {
                cues.push(ITOC);
            }
            out.push(Pattern::new(cat(&[&[S], an, &frame]), Force::Dec, &cues));
            out.push(Pattern::new(
                cat(&[&[Adv, S], an, &frame]),
                Force::Dec,
                &cues,
            ));
            out.push(Pattern::new(
                cat(&[&[S], an, &frame, &[Adv]]),
                Force::Dec,
                &cues,
            ));
        }
        for an in [&[][..], &[Aux], &[Aux, Not]] {
            let mut cues = low_verb_cues(an, true);
            if an.contains(&Aux) {
                cues.push(ITOC);
            }
            out.push(Pattern::new(
                cat(&[&[S], an, &[Adv], &frame]),
                Force::Dec,
                &cues,
            ));
        }
        for (kind, fronted, rest) in frontings(&frame) {
            let mut topic = vec![OPT];
            topic.push(match kind {
                Fronting::Object1 | Fronting::Object2 => NT,
                Fronting::PrepPhrase => TM,
                Fronting::Stranded => PI,
            });
            for an in [&[][..], &[Aux], &[Aux, Not]] {
                let mut cues = topic.clone();
                if an.contains(&Aux) {
                    cues.push(ITOC);
                }
                let base = cat(&[&fronted, &[S], an, &rest]);
                out.push(Pattern::new(base.clone(), Force::Dec, &cues));
                out.push(Pattern::new(cat(&[&base, &[Adv]]), Force::Dec, &cues));
            }
        }
    }
    out
}

fn questions() -> Vec<Pattern> {
    let inverted = [HCP, QINV];
    let mut out = Vec::with_capacity(144);
    for frame in frames() {
        // yes/no questions
        for neg in [&[][..], &[Not], &[Never]] {
            let base = cat(&[&[Aux, S], neg, &frame]);
            out.push(Pattern::new(base.clone(), Force::Q, &inverted));
            out.push(Pattern::new(cat(&[&base, &[Adv]]), Force::Q, &inverted));
        }
        // subject questions keep declarative order
        for an in [&[][..], &[Aux]] {
            let base = cat(&[&[S], an, &frame]);
            out.push(Pattern::new(base.clone(), Force::Q, &[]));
            out.push(Pattern::new(cat(&[&base, &[Adv]]), Force::Q, &[]));
        }
        for an in [&[Aux, Not][..], &[Never], &[Aux, Never]] {
            let cues = low_verb_cues(an, false);
            out.push(Pattern::new(cat(&[&[S], an, &frame]), Force::Q, &cues));
        }
        // adverbial wh
        for neg in [&[][..], &[Not], &[Never]] {
            out.push(Pattern::new(
                cat(&[&[Adv, Aux, S], neg, &frame]),
                Force::Q,
                &[HCP, QINV, WHM],
            ));
        }
        // fronted non-subject wh
        for (kind, fronted, rest) in frontings(&frame) {
            let mut cues = vec![HCP, QINV, WHM];
            if kind == Fronting::Stranded {
                cues.push(PI);
            }
            for neg in [&[][..], &[Not]] {
                let base = cat(&[&fronted, &[Aux, S], neg, &rest]);
                out.push(Pattern::new(base.clone(), Force::Q, &cues));
                out.push(Pattern::new(cat(&[&base, &[Adv]]), Force::Q, &cues));
            }
        }
    }
    out
}

fn imperatives() -> Vec<Pattern> {
    let mut out = Vec::with_capacity(36);
    for frame in frames() {
        out.push(Pattern::new(frame.clone(), Force::Imp, &[]));
        out.push(Pattern::new(cat(&[&[Adv], &frame]), Force::Imp, &[]));
        out.push(Pattern::new(cat(&[&frame, &[Adv]]), Force::Imp, &[]));
        out.push(Pattern::new(
            cat(&[&[Never], &frame]),
            Force::Imp,
            &[VTOI, AH],
        ));
        out.push(Pattern::new(cat(&[&[Aux, Not], &frame]), Force::Imp, &[]));
        out.push(Pattern::new(cat(&[&[Aux], &frame]), Force::Imp, &[]));
    }
    out
}

/// All CoLAG English patterns with their cue masks.
pub(crate) fn english_patterns() -> Vec<Pattern> {
    let mut out = declaratives();
    out.extend(imperatives());
    out.extend(questions());
    out
}

/// Subjectless counterpart of a subjectful DEC/Q pattern, before merging.
pub(crate) fn subjectless_variant(p: &Pattern) -> Option<Pattern> {
    if p.force == Force::Imp || !p.tokens.contains(&S) {
        return None;
    }
    Some(Pattern {
        tokens: p.tokens.iter().copied().filter(|&t| t != S).collect(),
        force: p.force,
        cues: (p.cues & !Grammar::bit(SP)) | Grammar::bit(NS),
    })
}

/// Builds the bundled fixture. Deterministic; contains CoLAG English (360
/// patterns), NS-English and every other grammar that licenses at least one
/// of their patterns.
pub fn build_fixture_domain() -> Domain {
    let english = english_patterns();
    let mut entries: Vec<(Sentence, GrammarSet)> = Vec::with_capacity(english.len() * 2);
    for p in &english {
        let sentence = Sentence::new(p.tokens.clone(), p.force).expect("well-formed pattern");
        entries.push((sentence, p.licensors(0)));
        if let Some(v) = subjectless_variant(p) {
            let sentence = Sentence::new(v.tokens.clone(), v.force).expect("well-formed pattern");
            entries.push((sentence, v.licensors(Grammar::bit(NS))));
        }
    }
    Domain::from_licenses(entries).expect("fixture is non-empty")
}
