//! Reference semantics over finite Herbrand-constant universes: partial
//! states, the refinement order, here-and-there satisfaction, model checking
//! and brute-force equilibrium-model enumeration. Everything downstream is
//! validated against this module.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{Atom, FlpProgram, Formula, Head, Signature, Term};
use crate::expand::{close_formula, expand_program};

pub type GroundAtom = (String, Vec<String>);
pub type FuncEntry = (String, Vec<String>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HtError {
    #[error("search space too large: {needed} candidate states exceed the limit of {limit}")]
    SearchSpaceTooLarge { needed: u128, limit: u128 },
}

/// A state: a valuation of every function entry over constant tuples (absent
/// or `None` meaning undefined) plus a set of ground predicate atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct State {
    pub sigma: BTreeMap<FuncEntry, Option<String>>,
    pub atoms: BTreeSet<GroundAtom>,
}

impl State {
    /// The everywhere-undefined state over a signature's function entries.
    pub fn empty(sig: &Signature) -> State {
        let c0: Vec<String> = sig.constructors().iter().cloned().collect();
        let mut sigma = BTreeMap::new();
        for (f, n) in sig.evaluables() {
            for args in tuples(&c0, *n) {
                sigma.insert((f.clone(), args), None);
            }
        }
        State { sigma, atoms: BTreeSet::new() }
    }

    pub fn set(&mut self, f: &str, args: &[&str], value: Option<&str>) {
        self.sigma.insert(
            (f.to_string(), args.iter().map(|s| s.to_string()).collect()),
            value.map(|s| s.to_string()),
        );
    }

    pub fn add_atom(&mut self, p: &str, args: &[&str]) {
        self.atoms.insert((p.to_string(), args.iter().map(|s| s.to_string()).collect()));
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .atoms
            .iter()
            .map(|(p, args)| {
                if args.is_empty() {
                    p.clone()
                } else {
                    format!("{p}({})", args.join(","))
                }
            })
            .collect();
        for ((func, args), value) in &self.sigma {
            if let Some(v) = value {
                if args.is_empty() {
                    parts.push(format!("{func}={v}"));
                } else {
                    parts.push(format!("{func}({})={v}", args.join(",")));
                }
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// All tuples over `c0` of the given length, in lexicographic order.
pub fn tuples(c0: &[String], n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c0.iter().map(move |c| {
                    let mut t = prefix.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Recursive term evaluation: constants name themselves, an application is
/// looked up on its evaluated arguments, and any undefined argument makes the
/// whole term undefined.
pub fn eval_term(s: &State, t: &Term) -> Option<String> {
    match t {
        Term::Var(v) => panic!("eval_term on non-ground term: variable {v}"),
        Term::Const(c) => Some(c.clone()),
        Term::App(f, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(s, a)?);
            }
            s.sigma.get(&(f.clone(), vals)).cloned().flatten()
        }
    }
}

/// The refinement order: `a` is below `b` when every atom of `a` holds in `b`
/// and every function entry of `a` is undefined or agrees with `b`.
pub fn state_leq(a: &State, b: &State) -> bool {
    a.atoms.is_subset(&b.atoms)
        && a.sigma.iter().all(|(k, v)| match v {
            None => true,
            some => b.sigma.get(k).map(|bv| bv == some).unwrap_or(false),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum World {
    Here,
    There,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HTInterpretation {
    pub here: State,
    pub there: State,
    /// The Herbrand constants quantifiers range over.
    pub universe: Vec<String>,
}

impl HTInterpretation {
    pub fn new(here: State, there: State, universe: Vec<String>) -> HTInterpretation {
        debug_assert!(state_leq(&here, &there), "here-state must refine to the there-state");
        HTInterpretation { here, there, universe }
    }

    pub fn total(state: State, universe: Vec<String>) -> HTInterpretation {
        HTInterpretation { here: state.clone(), there: state, universe }
    }

    fn state(&self, w: World) -> &State {
        match w {
            World::Here => &self.here,
            World::There => &self.there,
        }
    }
}

/// Satisfaction at a world. Implication quantifies over the worlds above `w`;
/// quantifiers range over the Herbrand constants; an atom with an undefined
/// argument is false; equality needs both sides defined and equal.
pub fn satisfies(i: &HTInterpretation, w: World, phi: &Formula) -> bool {
    match phi {
        Formula::Atom(Atom::Pred(p, args)) => {
            let s = i.state(w);
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                match eval_term(s, a) {
                    Some(v) => vals.push(v),
                    None => return false,
                }
            }
            s.atoms.contains(&(p.clone(), vals))
        }
        Formula::Atom(Atom::Eq(l, r)) => {
            let s = i.state(w);
            match (eval_term(s, l), eval_term(s, r)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            }
        }
        Formula::Atom(Atom::Apart(..)) | Formula::Exist(_) | Formula::Equiv(..) => {
            satisfies(i, w, &crate::expand::expand_formula(phi))
        }
        Formula::Falsum => false,
        Formula::Verum => true,
        Formula::And(l, r) => satisfies(i, w, l) && satisfies(i, w, r),
        Formula::Or(l, r) => satisfies(i, w, l) || satisfies(i, w, r),
        Formula::Implies(l, r) => {
            let there_ok = !satisfies(i, World::There, l) || satisfies(i, World::There, r);
            match w {
                World::There => there_ok,
                World::Here => there_ok && (!satisfies(i, World::Here, l) || satisfies(i, World::Here, r)),
            }
        }
        Formula::Forall(v, b) => i
            .universe
            .iter()
            .all(|c| satisfies(i, w, &b.subst(v, &Term::Const(c.clone())))),
        Formula::Exists(v, b) => i
            .universe
            .iter()
            .any(|c| satisfies(i, w, &b.subst(v, &Term::Const(c.clone())))),
    }
}

/// An interpretation models a theory when it satisfies the universal closure
/// of every formula at the here-world.
pub fn is_model(i: &HTInterpretation, theory: &[Formula]) -> bool {
    theory.iter().all(|phi| satisfies(i, World::Here, &close_formula(phi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FunctionClass {
    pub decidable: bool,
    pub total: bool,
}

/// Classify an evaluable function in an interpretation: decidable when both
/// worlds agree on all its entries, total when no entry is undefined.
pub fn classify_function(i: &HTInterpretation, f: &str) -> FunctionClass {
    let mut decidable = true;
    let mut total = true;
    for (key, tv) in &i.there.sigma {
        if key.0 != f {
            continue;
        }
        let hv = i.here.sigma.get(key).cloned().flatten();
        if hv != tv.clone() {
            decidable = false;
        }
        if tv.is_none() || hv.is_none() {
            total = false;
        }
    }
    FunctionClass { decidable, total }
}

/// Unfold quantifiers of a closed formula into finite conjunctions and
/// disjunctions over the universe. Sound because satisfaction of the unfolded
/// formula coincides with the quantifier clauses world by world.
pub fn ground_formula(phi: &Formula, c0: &[String]) -> Formula {
    match phi {
        Formula::Atom(_) | Formula::Falsum | Formula::Verum | Formula::Exist(_) | Formula::Equiv(..) => phi.clone(),
        Formula::And(l, r) => Formula::and(ground_formula(l, c0), ground_formula(r, c0)),
        Formula::Or(l, r) => Formula::or(ground_formula(l, c0), ground_formula(r, c0)),
        Formula::Implies(l, r) => Formula::implies(ground_formula(l, c0), ground_formula(r, c0)),
        Formula::Forall(v, b) => Formula::conj(
            c0.iter()
                .map(|c| ground_formula(&b.subst(v, &Term::Const(c.clone())), c0))
                .collect(),
        ),
        Formula::Exists(v, b) => Formula::disj(
            c0.iter()
                .map(|c| ground_formula(&b.subst(v, &Term::Const(c.clone())), c0))
                .collect(),
        ),
    }
}

/// Default bound on the number of candidate total states the enumerator will
/// visit before giving up.
pub const DEFAULT_MAX_SEARCH: u128 = 1 << 24;

/// All equilibrium models of a program: total states that model the expanded
/// theory with no strictly smaller here-state doing so.
///
/// Search-space pruning, justified by minimality: predicates never occurring
/// in a rule head and functions never assigned by a rule head are false or
/// undefined in every equilibrium model (they only occur in antecedent
/// positions, so removing them preserves modelhood of the smaller state);
/// ground facts must hold in every model, so they are pinned true.
pub fn equilibrium_models(p: &FlpProgram, max_search: u128) -> Result<Vec<State>, HtError> {
    let c0: Vec<String> = p.signature.constructors().iter().cloned().collect();
    let theory: Vec<Formula> = expand_program(p)
        .iter()
        .map(|phi| ground_formula(&close_formula(phi), &c0))
        .collect();

    // pinned facts and the candidate atom/function spaces
    let mut facts: BTreeSet<GroundAtom> = BTreeSet::new();
    let mut head_preds: BTreeSet<(String, usize)> = BTreeSet::new();
    let mut head_funcs: BTreeSet<(String, usize)> = BTreeSet::new();
    for rule in &p.rules {
        match &rule.head {
            Head::Pred(name, args) => {
                if rule.is_fact() {
                    let vals = args
                        .iter()
                        .map(|t| match t {
                            Term::Const(c) => c.clone(),
                            _ => unreachable!("facts have constant arguments"),
                        })
                        .collect();
                    facts.insert((name.clone(), vals));
                } else {
                    head_preds.insert((name.clone(), args.len()));
                }
            }
            Head::Falsum => {}
            Head::Assign { func, args, .. }
            | Head::Choice { func, args, .. }
            | Head::ChoiceEnum { func, args, .. } => {
                head_funcs.insert((func.clone(), args.len()));
            }
        }
    }

    let mut free_atoms: Vec<GroundAtom> = Vec::new();
    for (pred, n) in &head_preds {
        for args in tuples(&c0, *n) {
            let atom = (pred.clone(), args);
            if !facts.contains(&atom) {
                free_atoms.push(atom);
            }
        }
    }
    let mut entries: Vec<FuncEntry> = Vec::new();
    for (f, n) in &head_funcs {
        for args in tuples(&c0, *n) {
            entries.push((f.clone(), args));
        }
    }

    let values = c0.len() as u128 + 1; // every constant, or undefined
    let mut needed: u128 = 1;
    for _ in 0..free_atoms.len() {
        needed = needed.saturating_mul(2);
    }
    for _ in 0..entries.len() {
        needed = needed.saturating_mul(values);
    }
    if needed > max_search {
        return Err(HtError::SearchSpaceTooLarge { needed, limit: max_search });
    }

    let base = {
        let mut s = State::empty(&p.signature);
        s.atoms.extend(facts.iter().cloned());
        s
    };

    let mut models = Vec::new();
    for_each_state(&base, &free_atoms, &entries, &c0, &mut |t| {
        let total = HTInterpretation::total(t.clone(), c0.clone());
        if !is_model(&total, &theory) {
            return;
        }
        if !has_smaller_model(t, &facts, &c0, &theory) {
            models.push(t.clone());
        }
    });
    models.sort();
    Ok(models)
}

/// Visit every state extending `base` by any subset of `free_atoms` and any
/// valuation of `entries`.
fn for_each_state(
    base: &State,
    free_atoms: &[GroundAtom],
    entries: &[FuncEntry],
    c0: &[String],
    visit: &mut dyn FnMut(&State),
) {
    fn rec_entries(
        s: &mut State,
        entries: &[FuncEntry],
        c0: &[String],
        free_atoms: &[GroundAtom],
        visit: &mut dyn FnMut(&State),
    ) {
        match entries.split_first() {
            None => rec_atoms(s, free_atoms, visit),
            Some((e, rest)) => {
                s.sigma.insert(e.clone(), None);
                rec_entries(s, rest, c0, free_atoms, visit);
                for c in c0 {
                    s.sigma.insert(e.clone(), Some(c.clone()));
                    rec_entries(s, rest, c0, free_atoms, visit);
                }
                s.sigma.insert(e.clone(), None);
            }
        }
    }
    fn rec_atoms(s: &mut State, free_atoms: &[GroundAtom], visit: &mut dyn FnMut(&State)) {
        match free_atoms.split_first() {
            None => visit(s),
            Some((a, rest)) => {
                rec_atoms(s, rest, visit);
                s.atoms.insert(a.clone());
                rec_atoms(s, rest, visit);
                s.atoms.remove(a);
            }
        }
    }
    let mut s = base.clone();
    rec_entries(&mut s, entries, c0, free_atoms, visit);
}

/// Is there a strictly smaller here-state that still models the theory
/// against `t` as the there-state? Pinned facts are kept: a here-state
/// dropping a fact cannot be a model.
fn has_smaller_model(t: &State, facts: &BTreeSet<GroundAtom>, c0: &[String], theory: &[Formula]) -> bool {
    let shrink_atoms: Vec<GroundAtom> = t.atoms.iter().filter(|a| !facts.contains(*a)).cloned().collect();
    let shrink_entries: Vec<FuncEntry> = t
        .sigma
        .iter()
        .filter(|(_, v)| v.is_some())
        .map(|(k, _)| k.clone())
        .collect();

    fn rec(
        h: &mut State,
        t: &State,
        c0: &[String],
        theory: &[Formula],
        shrink_atoms: &[GroundAtom],
        shrink_entries: &[FuncEntry],
        changed: bool,
    ) -> bool {
        if let Some((a, rest)) = shrink_atoms.split_first() {
            // keep the atom, or drop it
            if rec(h, t, c0, theory, rest, shrink_entries, changed) {
                return true;
            }
            h.atoms.remove(a);
            let found = rec(h, t, c0, theory, rest, shrink_entries, true);
            h.atoms.insert(a.clone());
            return found;
        }
        if let Some((e, rest)) = shrink_entries.split_first() {
            if rec(h, t, c0, theory, shrink_atoms, rest, changed) {
                return true;
            }
            let old = h.sigma.insert(e.clone(), None);
            let found = rec(h, t, c0, theory, shrink_atoms, rest, true);
            h.sigma.insert(e.clone(), old.unwrap_or(None));
            return found;
        }
        if !changed {
            return false;
        }
        let i = HTInterpretation::new(h.clone(), t.clone(), c0.to_vec());
        is_model(&i, theory)
    }

    let mut h = t.clone();
    rec(&mut h, t, c0, theory, &shrink_atoms, &shrink_entries, false)
}

// ---------------------------------------------------------------------------
// Exhaustive interpretation enumeration for validity checking
// ---------------------------------------------------------------------------

/// All states over the given signature (every valuation of every function
/// entry, every subset of ground atoms). Intended for tiny signatures only.
pub fn all_states(sig: &Signature) -> Vec<State> {
    let c0: Vec<String> = sig.constructors().iter().cloned().collect();
    let base = State::empty(sig);
    let entries: Vec<FuncEntry> = base.sigma.keys().cloned().collect();
    let mut atoms: Vec<GroundAtom> = Vec::new();
    for (p, n) in sig.predicates() {
        for args in tuples(&c0, *n) {
            atoms.push((p.clone(), args));
        }
    }
    let mut out = Vec::new();
    for_each_state(&base, &atoms, &entries, &c0, &mut |s| out.push(s.clone()));
    out
}

/// All HT-interpretations over the signature: ordered pairs of states.
pub fn all_interpretations(sig: &Signature) -> Vec<HTInterpretation> {
    let c0: Vec<String> = sig.constructors().iter().cloned().collect();
    let states = all_states(sig);
    let mut out = Vec::new();
    for t in &states {
        for h in &states {
            if state_leq(h, t) {
                out.push(HTInterpretation::new(h.clone(), t.clone(), c0.clone()));
            }
        }
    }
    out
}

/// A formula is valid over a signature when every interpretation satisfies
/// its universal closure at the here-world.
pub fn is_valid(sig: &Signature, phi: &Formula) -> bool {
    countermodel(sig, phi).is_none()
}

/// A witness interpretation falsifying the formula, if any.
pub fn countermodel(sig: &Signature, phi: &Formula) -> Option<HTInterpretation> {
    let closed = close_formula(phi);
    all_interpretations(sig)
        .into_iter()
        .find(|i| !satisfies(i, World::Here, &closed))
}
