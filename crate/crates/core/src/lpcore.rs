//! Function-free program engine: grounding over the Herbrand constants, the
//! reduct, least models, stable-model enumeration, and the lifting of stable
//! models back to functional states.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{
    Atom, FlpProgram, Head, LpHead, LpLiteral, LpProgram, LpRule, LpTerm, Signature, Term, AUX_PREFIX,
    HOLDS_PREFIX,
};
use crate::htsem::{tuples, GroundAtom, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("unsafe rule: variable '{var}' does not occur in a positive body atom of '{rule}'")]
    Unsafe { var: String, rule: String },
    #[error("two values for one function entry: {0}")]
    UniquenessViolation(String),
    #[error("search space too large: {needed} candidate atom sets exceed the limit of {limit}")]
    SearchSpaceTooLarge { needed: u128, limit: u128 },
    #[error("not a function-free rule: {0}")]
    NotFunctionFree(String),
}

/// A ground rule; `head: None` is a constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Option<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    /// Every atom occurring anywhere in the ground rules.
    pub atoms: BTreeSet<GroundAtom>,
}

fn check_safe(rule: &LpRule) -> Result<(), LpError> {
    let mut restricted: BTreeSet<String> = BTreeSet::new();
    for lit in &rule.body {
        if let LpLiteral::Pred { args, negated: false, .. } = lit {
            for a in args {
                if let LpTerm::Var(v) = a {
                    restricted.insert(v.clone());
                }
            }
        }
    }
    for v in rule.vars() {
        if !restricted.contains(&v) {
            return Err(LpError::Unsafe { var: v, rule: rule.to_string() });
        }
    }
    Ok(())
}

fn ground_term(t: &LpTerm, env: &BTreeMap<String, String>) -> String {
    match t {
        LpTerm::Const(c) => c.clone(),
        LpTerm::Var(v) => env[v].clone(),
    }
}

/// Ground a program over the constants: substitute every variable in every
/// way, evaluate built-in (dis)equalities syntactically, drop falsified
/// instances and satisfied built-ins.
pub fn ground(p: &LpProgram, consts: &[String]) -> Result<GroundProgram, LpError> {
    let mut out = GroundProgram::default();
    for rule in &p.rules {
        check_safe(rule)?;
        let vars: Vec<String> = rule.vars().into_iter().collect();
        for tuple in tuples(consts, vars.len()) {
            let env: BTreeMap<String, String> = vars.iter().cloned().zip(tuple).collect();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut falsified = false;
            for lit in &rule.body {
                match lit {
                    LpLiteral::Pred { name, args, negated } => {
                        let atom = (name.clone(), args.iter().map(|a| ground_term(a, &env)).collect());
                        if *negated {
                            neg.push(atom);
                        } else {
                            pos.push(atom);
                        }
                    }
                    LpLiteral::Eq(l, r) => {
                        if ground_term(l, &env) != ground_term(r, &env) {
                            falsified = true;
                            break;
                        }
                    }
                    LpLiteral::Neq(l, r) => {
                        if ground_term(l, &env) == ground_term(r, &env) {
                            falsified = true;
                            break;
                        }
                    }
                }
            }
            if falsified {
                continue;
            }
            let head = match &rule.head {
                LpHead::Falsum => None,
                LpHead::Pred(name, args) => {
                    Some((name.clone(), args.iter().map(|a| ground_term(a, &env)).collect()))
                }
            };
            out.atoms.extend(head.iter().cloned());
            out.atoms.extend(pos.iter().cloned());
            out.atoms.extend(neg.iter().cloned());
            out.rules.push(GroundRule { head, pos, neg });
        }
    }
    out.rules.sort();
    out.rules.dedup();
    Ok(out)
}

/// The reduct with respect to an atom set: rules with a satisfied negative
/// literal's atom are deleted, the remaining negative literals are removed.
pub fn gl_reduct(g: &GroundProgram, a: &BTreeSet<GroundAtom>) -> GroundProgram {
    let rules: Vec<GroundRule> = g
        .rules
        .iter()
        .filter(|r| r.neg.iter().all(|q| !a.contains(q)))
        .map(|r| GroundRule { head: r.head.clone(), pos: r.pos.clone(), neg: Vec::new() })
        .collect();
    GroundProgram { rules, atoms: g.atoms.clone() }
}

/// Least fixpoint of the immediate-consequence operator; constraints and
/// negation are ignored, so call this on a reduct's defining rules.
pub fn least_model(g: &GroundProgram) -> BTreeSet<GroundAtom> {
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in &g.rules {
            let Some(h) = &r.head else { continue };
            if !model.contains(h) && r.pos.iter().all(|q| model.contains(q)) {
                model.insert(h.clone());
                changed = true;
            }
        }
        if !changed {
            return model;
        }
    }
}

fn violates_constraints(g: &GroundProgram, a: &BTreeSet<GroundAtom>) -> bool {
    g.rules.iter().any(|r| {
        r.head.is_none() && r.pos.iter().all(|q| a.contains(q)) && r.neg.iter().all(|q| !a.contains(q))
    })
}

/// Is `a` a stable model: the least model of the reduct of the defining
/// rules, violating no constraint?
pub fn is_stable(g: &GroundProgram, a: &BTreeSet<GroundAtom>) -> bool {
    let defining = GroundProgram {
        rules: g.rules.iter().filter(|r| r.head.is_some()).cloned().collect(),
        atoms: g.atoms.clone(),
    };
    least_model(&gl_reduct(&defining, a)) == *a && !violates_constraints(g, a)
}

/// Default bound on the candidate atom sets visited by the search.
pub const DEFAULT_MAX_SEARCH: u128 = 1 << 24;

/// All stable models, canonically ordered. The search assigns truth values
/// to head atoms only (an atom outside every head is false in every stable
/// model), forces facts, and propagates: a rule with a decided-true body
/// forces its head; an atom all of whose rules have decided-false bodies is
/// false; a constraint with a decided-true body prunes the branch. Complete
/// assignments are verified against the reduct definition; visited search
/// nodes are counted against the search bound.
pub fn stable_models(g: &GroundProgram, max_search: u128) -> Result<Vec<BTreeSet<GroundAtom>>, LpError> {
    let mut facts: BTreeSet<GroundAtom> = BTreeSet::new();
    let mut head_atoms: BTreeSet<GroundAtom> = BTreeSet::new();
    for r in &g.rules {
        if let Some(h) = &r.head {
            if r.pos.is_empty() && r.neg.is_empty() {
                facts.insert(h.clone());
            } else {
                head_atoms.insert(h.clone());
            }
        }
    }
    head_atoms.retain(|a| !facts.contains(a));
    let open: Vec<GroundAtom> = head_atoms.into_iter().collect();

    // three-valued assignment over the open atoms; everything else is fixed
    let assign: BTreeMap<GroundAtom, Option<bool>> = open.iter().map(|a| (a.clone(), None)).collect();
    let value = |assign: &BTreeMap<GroundAtom, Option<bool>>, atom: &GroundAtom, facts: &BTreeSet<GroundAtom>| {
        if facts.contains(atom) {
            Some(true)
        } else {
            assign.get(atom).copied().unwrap_or(Some(false))
        }
    };

    let mut models = Vec::new();
    let mut visited: u128 = 0;
    let mut stack: Vec<BTreeMap<GroundAtom, Option<bool>>> = vec![assign.clone()];
    'search: while let Some(mut cur) = stack.pop() {
        visited += 1;
        if visited > max_search {
            return Err(LpError::SearchSpaceTooLarge { needed: visited, limit: max_search });
        }
        // propagate to fixpoint
        loop {
            let mut changed = false;
            for r in &g.rules {
                let body_true = r.pos.iter().all(|q| value(&cur, q, &facts) == Some(true))
                    && r.neg.iter().all(|q| value(&cur, q, &facts) == Some(false));
                let body_false = r.pos.iter().any(|q| value(&cur, q, &facts) == Some(false))
                    || r.neg.iter().any(|q| value(&cur, q, &facts) == Some(true));
                match &r.head {
                    None => {
                        if body_true {
                            continue 'search; // constraint conflict
                        }
                    }
                    Some(h) => {
                        if body_true {
                            match value(&cur, h, &facts) {
                                Some(false) => continue 'search,
                                None => {
                                    cur.insert(h.clone(), Some(true));
                                    changed = true;
                                }
                                Some(true) => {}
                            }
                        }
                        let _ = body_false;
                    }
                }
            }
            // unsupported atoms: every potentially deriving rule is dead
            for a in &open {
                if value(&cur, a, &facts) != None {
                    continue;
                }
                let supportable = g.rules.iter().any(|r| {
                    r.head.as_ref() == Some(a)
                        && !r.pos.iter().any(|q| value(&cur, q, &facts) == Some(false))
                        && !r.neg.iter().any(|q| value(&cur, q, &facts) == Some(true))
                });
                if !supportable {
                    cur.insert(a.clone(), Some(false));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        match open.iter().find(|a| cur[*a].is_none()) {
            Some(branch_atom) => {
                let mut on = cur.clone();
                on.insert(branch_atom.clone(), Some(true));
                let mut off = cur;
                off.insert(branch_atom.clone(), Some(false));
                stack.push(off);
                stack.push(on);
            }
            None => {
                let mut a: BTreeSet<GroundAtom> = facts.clone();
                a.extend(open.iter().filter(|x| cur[*x] == Some(true)).cloned());
                if is_stable(g, &a) {
                    models.push(a);
                }
            }
        }
    }
    models.sort();
    models.dedup();
    Ok(models)
}

/// Lift a stable model of a translated program back to a functional state:
/// `holds_f(c̄,d)` becomes the entry `f(c̄)=d`, original predicate atoms are
/// kept, auxiliary atoms are dropped.
pub fn lift(j: &BTreeSet<GroundAtom>, sig: &Signature) -> Result<State, LpError> {
    let mut holds_map: BTreeMap<(String, usize), (String, usize)> = BTreeMap::new();
    for (f, n) in sig.evaluables() {
        let (name, arity) = sig.holds_name(f, *n).map_err(|_| {
            LpError::NotFunctionFree(format!("reserved predicate clash for {f}/{n}"))
        })?;
        holds_map.insert((name, arity), (f.clone(), *n));
    }
    let mut state = State::empty(sig);
    for (name, args) in j {
        if let Some((f, _)) = holds_map.get(&(name.clone(), args.len())) {
            let (val, fargs) = args.split_last().expect("holds atoms have a value argument");
            let key = (f.clone(), fargs.to_vec());
            if let Some(Some(prev)) = state.sigma.get(&key) {
                if prev != val {
                    return Err(LpError::UniquenessViolation(format!("{f}({}) = {prev} and {val}", fargs.join(","))));
                }
            }
            state.sigma.insert(key, Some(val.clone()));
        } else if name.starts_with(AUX_PREFIX) || name.starts_with(HOLDS_PREFIX) {
            // auxiliary atom or a holds atom of an unknown function: dropped
        } else if sig.is_predicate(name, args.len()) {
            state.atoms.insert((name.clone(), args.clone()));
        }
    }
    Ok(state)
}

/// View a program without evaluable functions as a plain function-free
/// program (self-hosting input path).
pub fn lp_from_flp(p: &FlpProgram) -> Result<LpProgram, LpError> {
    fn conv_term(t: &Term) -> Result<LpTerm, LpError> {
        match t {
            Term::Var(v) => Ok(LpTerm::Var(v.clone())),
            Term::Const(c) => Ok(LpTerm::Const(c.clone())),
            Term::App(..) => Err(LpError::NotFunctionFree(t.to_string())),
        }
    }
    let mut rules = Vec::new();
    for r in &p.rules {
        let head = match &r.head {
            Head::Falsum => LpHead::Falsum,
            Head::Pred(name, args) => {
                LpHead::Pred(name.clone(), args.iter().map(conv_term).collect::<Result<_, _>>()?)
            }
            other => return Err(LpError::NotFunctionFree(other.to_string())),
        };
        let mut body = Vec::new();
        for lit in &r.body {
            body.push(match &lit.atom {
                Atom::Pred(name, args) => LpLiteral::Pred {
                    name: name.clone(),
                    args: args.iter().map(conv_term).collect::<Result<_, _>>()?,
                    negated: lit.negated,
                },
                Atom::Eq(l, r2) if !lit.negated => LpLiteral::Eq(conv_term(l)?, conv_term(r2)?),
                Atom::Eq(l, r2) => LpLiteral::Neq(conv_term(l)?, conv_term(r2)?),
                Atom::Apart(l, r2) if !lit.negated => LpLiteral::Neq(conv_term(l)?, conv_term(r2)?),
                Atom::Apart(..) => {
                    return Err(LpError::NotFunctionFree(format!("negated apartness '{lit}'")))
                }
            });
        }
        rules.push(LpRule { head, body });
    }
    Ok(LpProgram { rules })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::translate_program;
    use crate::parser::parse_flp;

    fn atom(name: &str, args: &[&str]) -> GroundAtom {
        (name.to_string(), args.iter().map(|s| s.to_string()).collect())
    }

    fn lp(src: &str) -> LpProgram {
        lp_from_flp(&parse_flp(src, "<test>").unwrap()).unwrap()
    }

    fn consts(cs: &[&str]) -> Vec<String> {
        cs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ground_simple_rule() {
        let p = lp("p(X) :- q(X). q(a).");
        let g = ground(&p, &consts(&["a", "b"])).unwrap();
        let rules: Vec<String> = g
            .rules
            .iter()
            .map(|r| format!("{:?} <- {:?}", r.head, r.pos))
            .collect();
        assert_eq!(g.rules.len(), 3);
        assert!(rules.iter().any(|r| r.contains("\"p\", [\"a\"]")));
        assert!(rules.iter().any(|r| r.contains("\"p\", [\"b\"]")));
    }

    #[test]
    fn ground_evaluates_disequality() {
        let p = lp("q(0). :- h(X,V), h(X,W), V != W.");
        let g = ground(&p, &consts(&["0", "1"])).unwrap();
        let constraints: Vec<&GroundRule> = g.rules.iter().filter(|r| r.head.is_none()).collect();
        // only instances with V, W distinct survive: 2 choices of X times 2 orders
        assert_eq!(constraints.len(), 4);
        for c in constraints {
            assert_ne!(c.pos[0].1[1], c.pos[1].1[1]);
        }
    }

    #[test]
    fn unsafe_rule_rejected() {
        let p = LpProgram {
            rules: vec![LpRule {
                head: LpHead::Pred("p".into(), vec![LpTerm::Var("X".into())]),
                body: vec![],
            }],
        };
        assert!(matches!(ground(&p, &consts(&["a"])), Err(LpError::Unsafe { .. })));
    }

    #[test]
    fn reduct_textbook_cases() {
        let p = lp("x(0). p :- not q.");
        let g = ground(&p, &consts(&["0"])).unwrap();
        let r = gl_reduct(&g, &BTreeSet::new());
        assert!(r.rules.iter().any(|r| r.head == Some(atom("p", &[])) && r.neg.is_empty()));
        let mut a = BTreeSet::new();
        a.insert(atom("q", &[]));
        let r = gl_reduct(&g, &a);
        assert!(!r.rules.iter().any(|r| r.head == Some(atom("p", &[]))));
    }

    #[test]
    fn least_model_fixpoint() {
        let p = lp("x(0). p. q :- p.");
        let g = ground(&p, &consts(&["0"])).unwrap();
        let lm = least_model(&g);
        assert!(lm.contains(&atom("p", &[])) && lm.contains(&atom("q", &[])));
        assert_eq!(least_model(&GroundProgram::default()), BTreeSet::new());
    }

    #[test]
    fn stable_models_even_loop() {
        let p = lp("x(0). p :- not q. q :- not p.");
        let g = ground(&p, &consts(&["0"])).unwrap();
        let models = stable_models(&g, DEFAULT_MAX_SEARCH).unwrap();
        assert_eq!(models.len(), 2);
        assert!(models.iter().any(|m| m.contains(&atom("p", &[])) && !m.contains(&atom("q", &[]))));
        assert!(models.iter().any(|m| m.contains(&atom("q", &[])) && !m.contains(&atom("p", &[]))));
    }

    #[test]
    fn boolean_program_two_stable_models() {
        // p <- not q ; q <- r, not p ; r <- not s
        let p = lp("x(0). p :- not q. q :- r, not p. r :- not s.");
        let g = ground(&p, &consts(&["0"])).unwrap();
        let models = stable_models(&g, DEFAULT_MAX_SEARCH).unwrap();
        let rendered: Vec<Vec<String>> = models
            .iter()
            .map(|m| m.iter().filter(|a| a.0 != "x").map(|a| a.0.clone()).collect())
            .collect();
        assert_eq!(rendered, vec![vec!["p".to_string(), "r".to_string()], vec!["q".to_string(), "r".to_string()]]);
    }

    #[test]
    fn translated_meal_has_single_stable_model() {
        let src = "#evaluable first. #evaluable second.\n\
            first := pasta.\n\
            second := fish :- first = pasta, not friday.\n\
            second := first :- friday.\n\
            menu(pasta). menu(fish).";
        let flp = parse_flp(src, "<test>").unwrap();
        let lpp = translate_program(&flp).unwrap();
        let c0: Vec<String> = flp.signature.constructors().iter().cloned().collect();
        let g = ground(&lpp, &c0).unwrap();
        let models = stable_models(&g, DEFAULT_MAX_SEARCH).unwrap();
        assert_eq!(models.len(), 1);
        assert!(models[0].contains(&atom("holds_second", &["fish"])));
        let state = lift(&models[0], &flp.signature).unwrap();
        assert_eq!(state.sigma[&("second".to_string(), vec![])], Some("fish".to_string()));
        assert!(state.atoms.contains(&atom("menu", &["pasta"])));
    }

    #[test]
    fn lift_examples() {
        let mut sig = Signature::new();
        sig.add_constructor("0").unwrap();
        sig.add_constructor("1").unwrap();
        sig.add_evaluable("next", 1).unwrap();
        sig.add_predicate("node", 1).unwrap();
        let mut j = BTreeSet::new();
        j.insert(atom("holds_next", &["0", "1"]));
        j.insert(atom("node", &["0"]));
        j.insert(atom("aux_1", &["0"]));
        let s = lift(&j, &sig).unwrap();
        assert_eq!(s.sigma[&("next".to_string(), vec!["0".to_string()])], Some("1".to_string()));
        assert_eq!(s.atoms.len(), 1);
        j.insert(atom("holds_next", &["0", "0"]));
        assert!(matches!(lift(&j, &sig), Err(LpError::UniquenessViolation(_))));
        let empty = lift(&BTreeSet::new(), &sig).unwrap();
        assert!(empty.atoms.is_empty());
        assert!(empty.sigma.values().all(|v| v.is_none()));
    }

    #[test]
    fn stable_models_match_equilibrium_on_function_free_program() {
        let src = "x(0). p :- not q. q :- not p. r :- p. :- q, not p.";
        let flp = parse_flp(src, "<test>").unwrap();
        let c0: Vec<String> = flp.signature.constructors().iter().cloned().collect();
        let g = ground(&lp_from_flp(&flp).unwrap(), &c0).unwrap();
        let stable = stable_models(&g, DEFAULT_MAX_SEARCH).unwrap();
        let lifted: Vec<State> = stable.iter().map(|m| lift(m, &flp.signature).unwrap()).collect();
        let eq = crate::htsem::equilibrium_models(&flp, crate::htsem::DEFAULT_MAX_SEARCH).unwrap();
        assert_eq!(lifted, eq);
    }

    #[test]
    fn grounding_is_domain_independent_for_safe_programs() {
        let src = "node(0). node(1). arc(0,1). arc(1,0).\n\
            next(X) in {Z | arc(X,Z)} :- node(X).\n\
            visited(next(0)).\n\
            visited(next(X)) :- visited(X).\n\
            :- node(X), not visited(X).";
        let flp = parse_flp(src, "<test>").unwrap();
        let lpp = translate_program(&flp).unwrap();
        let c0: Vec<String> = flp.signature.constructors().iter().cloned().collect();
        let mut c0_ext = c0.clone();
        c0_ext.push("unused".to_string());
        let m1 = stable_models(&ground(&lpp, &c0).unwrap(), DEFAULT_MAX_SEARCH).unwrap();
        let m2 = stable_models(&ground(&lpp, &c0_ext).unwrap(), DEFAULT_MAX_SEARCH).unwrap();
        let l1: Vec<State> = m1.iter().map(|m| lift(m, &flp.signature).unwrap()).collect();
        let l2: Vec<State> = m2.iter().map(|m| lift(m, &flp.signature).unwrap()).collect();
        assert_eq!(l1, l2);
    }

    #[test]
    fn search_guard_triggers() {
        let mut rules = Vec::new();
        for i in 0..30 {
            rules.push(LpRule {
                head: LpHead::Pred(format!("p{i}"), vec![]),
                body: vec![LpLiteral::Pred { name: format!("q{i}"), args: vec![], negated: true }],
            });
            rules.push(LpRule {
                head: LpHead::Pred(format!("q{i}"), vec![]),
                body: vec![LpLiteral::Pred { name: format!("p{i}"), args: vec![], negated: true }],
            });
        }
        let g = ground(&LpProgram { rules }, &consts(&[])).unwrap();
        assert!(matches!(stable_models(&g, 1 << 10), Err(LpError::SearchSpaceTooLarge { .. })));
    }
}
