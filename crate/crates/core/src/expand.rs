//! Elimination of the derived operators into core formulas: existence `E`,
//! weak equivalence, apartness, the definedness bracket over rule heads, the
//! guarded implication written `:-`, assignments `:=` and choice heads.

use std::collections::BTreeSet;

use crate::ast::{formula_free_vars, Atom, FlpProgram, FlpRule, Formula, Head, Literal, Term};

/// Structural arguments of a term: an evaluable application contributes its
/// immediate arguments, anything else stands for itself.
pub fn term_args(t: &Term) -> Vec<Term> {
    match t {
        Term::App(_, args) => args.clone(),
        other => vec![other.clone()],
    }
}

/// Structural arguments of an atom. Predicate atoms contribute their argument
/// tuple directly; equality (and apartness, which is defined through it)
/// descends one level on both sides.
pub fn args_of(a: &Atom) -> Vec<Term> {
    let mut out = Vec::new();
    let mut push = |t: Term| {
        if !out.contains(&t) {
            out.push(t);
        }
    };
    match a {
        Atom::Pred(_, args) => {
            for t in args {
                push(t.clone());
            }
        }
        Atom::Eq(l, r) | Atom::Apart(l, r) => {
            for t in term_args(l).into_iter().chain(term_args(r)) {
                push(t);
            }
        }
    }
    out
}

/// Replace each atom `A` of a quantifier-free formula by the conjunction of
/// `E t -> A` over the structural arguments `t` of `A`.
pub fn bracket(phi: &Formula) -> Formula {
    match phi {
        Formula::Atom(a) => {
            let guards: Vec<Formula> = args_of(a)
                .into_iter()
                .filter(|t| matches!(t, Term::App(..)))
                .map(Formula::Exist)
                .collect();
            if guards.is_empty() {
                phi.clone()
            } else {
                Formula::implies(Formula::conj(guards), phi.clone())
            }
        }
        Formula::Falsum | Formula::Verum => phi.clone(),
        Formula::And(l, r) => Formula::and(bracket(l), bracket(r)),
        Formula::Or(l, r) => Formula::or(bracket(l), bracket(r)),
        Formula::Implies(l, r) => Formula::implies(bracket(l), bracket(r)),
        Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(bracket(b))),
        Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(bracket(b))),
        Formula::Exist(_) | Formula::Equiv(..) => phi.clone(),
    }
}

/// Rewrite every derived node into the core language:
/// `E t` becomes `t = t`, apartness `t1 # t2` becomes
/// `E t1 & E t2 & not (t1 = t2)`, and weak equivalence `t1 == t2` becomes
/// `(E t1 | E t2) -> t1 = t2`.
pub fn expand_formula(phi: &Formula) -> Formula {
    match phi {
        Formula::Atom(Atom::Apart(l, r)) => Formula::and(
            Formula::and(Formula::Atom(Atom::Eq(l.clone(), l.clone())), Formula::Atom(Atom::Eq(r.clone(), r.clone()))),
            Formula::not(Formula::Atom(Atom::Eq(l.clone(), r.clone()))),
        ),
        Formula::Exist(t) => Formula::Atom(Atom::Eq(t.clone(), t.clone())),
        Formula::Equiv(l, r) => Formula::implies(
            Formula::or(Formula::Atom(Atom::Eq(l.clone(), l.clone())), Formula::Atom(Atom::Eq(r.clone(), r.clone()))),
            Formula::Atom(Atom::Eq(l.clone(), r.clone())),
        ),
        Formula::Atom(_) | Formula::Falsum | Formula::Verum => phi.clone(),
        Formula::And(l, r) => Formula::and(expand_formula(l), expand_formula(r)),
        Formula::Or(l, r) => Formula::or(expand_formula(l), expand_formula(r)),
        Formula::Implies(l, r) => Formula::implies(expand_formula(l), expand_formula(r)),
        Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(expand_formula(b))),
        Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(expand_formula(b))),
    }
}

/// A body literal as a formula; negation is implication into falsum.
pub fn literal_formula(lit: &Literal) -> Formula {
    let atom = Formula::Atom(lit.atom.clone());
    if lit.negated {
        Formula::not(atom)
    } else {
        atom
    }
}

/// Existence guards for the terms that actually need one: guards on Herbrand
/// constants and variables are valid and dropped on the spot.
fn guards(terms: &[Term]) -> Vec<Formula> {
    terms
        .iter()
        .filter(|t| matches!(t, Term::App(..)))
        .map(|t| Formula::Exist(t.clone()))
        .collect()
}

fn implication(antecedent: Vec<Formula>, consequent: Formula) -> Formula {
    if antecedent.is_empty() {
        consequent
    } else {
        Formula::implies(Formula::conj(antecedent), consequent)
    }
}

/// Pick a variable name unused in the rule, for desugared choice heads.
fn fresh_var(used: &BTreeSet<String>) -> String {
    for base in ["X", "Y", "Z", "W", "U"] {
        if !used.contains(base) {
            return base.to_string();
        }
    }
    let mut n = 1;
    loop {
        let candidate = format!("X{n}");
        if !used.contains(&candidate) {
            return candidate;
        }
        n += 1;
    }
}

fn rule_var_names(r: &FlpRule) -> BTreeSet<String> {
    let mut used = crate::ast::rule_free_vars(r);
    if let Head::Choice { var, .. } = &r.head {
        used.insert(var.clone());
    }
    used
}

/// Expand one rule into one core formula (two for choice heads), applying the
/// elementary simplifications the formalism uses when displaying results:
/// valid guards are dropped and nested implications are flattened into a
/// single conjunction of antecedents.
pub fn expand_rule(r: &FlpRule) -> Vec<Formula> {
    let body: Vec<Formula> = r.body.iter().map(literal_formula).collect();
    let formulas = match &r.head {
        Head::Falsum => {
            vec![implication(body, Formula::Falsum)]
        }
        Head::Pred(p, args) => {
            let head = Formula::Atom(Atom::Pred(p.clone(), args.clone()));
            let mut ante = body;
            ante.extend(guards(args));
            vec![implication(ante, head)]
        }
        Head::Assign { func, args, value } => {
            let f_t = Term::App(func.clone(), args.clone());
            let mut ante = guards(args);
            ante.extend(guards(std::slice::from_ref(value)));
            ante.extend(body);
            vec![implication(ante, Formula::Atom(Atom::Eq(f_t, value.clone())))]
        }
        Head::Choice { func, args, var, cond } => {
            let cond: Vec<Formula> = cond.iter().map(literal_formula).collect();
            let f_t = Term::App(func.clone(), args.clone());
            choice_formulas(&f_t, args, var, cond, body)
        }
        Head::ChoiceEnum { func, args, values } => {
            let used = rule_var_names(r);
            let var = fresh_var(&used);
            let f_t = Term::App(func.clone(), args.clone());
            let cond = vec![Formula::disj(
                values
                    .iter()
                    .map(|v| Formula::Atom(Atom::Eq(v.clone(), Term::Var(var.clone()))))
                    .collect(),
            )];
            choice_formulas(&f_t, args, &var, cond, body)
        }
    };
    formulas.iter().map(expand_formula).collect()
}

/// The two formulas a choice head stands for, relativized to the rule body:
/// a picking disjunction for every witness of the condition, and a constraint
/// requiring some witness to be picked.
fn choice_formulas(f_t: &Term, args: &[Term], var: &str, cond: Vec<Formula>, body: Vec<Formula>) -> Vec<Formula> {
    let eq = Formula::Atom(Atom::Eq(f_t.clone(), Term::Var(var.to_string())));
    let mut ante1 = cond.clone();
    ante1.extend(guards(args));
    ante1.extend(body.clone());
    let pick = Formula::Forall(
        var.to_string(),
        Box::new(implication(ante1, Formula::or(eq.clone(), Formula::not(eq.clone())))),
    );
    let mut cond_and_eq = cond;
    cond_and_eq.push(eq);
    let mut ante2 = vec![Formula::not(Formula::Exists(var.to_string(), Box::new(Formula::conj(cond_and_eq))))];
    ante2.extend(guards(args));
    ante2.extend(body);
    let require = implication(ante2, Formula::Falsum);
    vec![pick, require]
}

/// Expand a whole program into a list of core formulas. Free variables are
/// understood as universally quantified over the Herbrand constants.
pub fn expand_program(p: &FlpProgram) -> Vec<Formula> {
    p.rules.iter().flat_map(expand_rule).collect()
}

/// Universally close a formula's free variables.
pub fn close_formula(phi: &Formula) -> Formula {
    let mut out = phi.clone();
    for v in formula_free_vars(phi).into_iter().rev() {
        out = Formula::Forall(v, Box::new(out));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_flp;

    fn rules(src: &str) -> Vec<FlpRule> {
        parse_flp(src, "<test>").unwrap().rules
    }

    fn eq(l: Term, r: Term) -> Formula {
        Formula::Atom(Atom::Eq(l, r))
    }

    #[test]
    fn args_of_examples() {
        let prog = parse_flp("visited(next(X)) :- visited(X). visited(0).", "<t>").unwrap();
        let Head::Pred(p, args) = &prog.rules[0].head else { panic!() };
        assert_eq!(args_of(&Atom::Pred(p.clone(), args.clone())), vec![Term::app("next", vec![Term::var("X")])]);
        let a = Atom::Eq(
            Term::app("mother", vec![Term::var("X")]),
            Term::app("mother", vec![Term::var("Y")]),
        );
        assert_eq!(args_of(&a), vec![Term::var("X"), Term::var("Y")]);
        // 0-ary evaluable: no structural arguments on that side
        let a = Atom::Eq(Term::app("second", vec![]), Term::constant("fish"));
        assert_eq!(args_of(&a), vec![Term::constant("fish")]);
    }

    #[test]
    fn bracket_guards_only_applications() {
        let head = Formula::Atom(Atom::pred("visited", vec![Term::app("next", vec![Term::var("X")])]));
        let b = bracket(&head);
        assert_eq!(
            b,
            Formula::implies(Formula::Exist(Term::app("next", vec![Term::var("X")])), head.clone())
        );
        let plain = Formula::Atom(Atom::pred("p", vec![Term::constant("c")]));
        assert_eq!(bracket(&plain), plain);
    }

    #[test]
    fn meal_assignment_expansions() {
        let rs = rules(
            "#evaluable first. #evaluable second.\n\
             first := pasta.\n\
             second := fish :- first = pasta, not friday.\n\
             second := first :- friday.",
        );
        let first = || Term::app("first", vec![]);
        let second = || Term::app("second", vec![]);
        // fact: guard on the constructor value disappears entirely
        assert_eq!(expand_rule(&rs[0]), vec![eq(first(), Term::constant("pasta"))]);
        // plain body, constructor value: body survives untouched
        assert_eq!(
            expand_rule(&rs[1]),
            vec![Formula::implies(
                Formula::and(eq(first(), Term::constant("pasta")), Formula::not(Formula::Atom(Atom::pred("friday", vec![])))),
                eq(second(), Term::constant("fish")),
            )]
        );
        // evaluable value: its existence guard stays, ahead of the body
        assert_eq!(
            expand_rule(&rs[2]),
            vec![Formula::implies(
                Formula::and(eq(first(), first()), Formula::Atom(Atom::pred("friday", vec![]))),
                eq(second(), first()),
            )]
        );
    }

    #[test]
    fn pred_head_guard_follows_body() {
        let rs = rules("visited(next(X)) :- visited(X). visited(0).");
        let nx = Term::app("next", vec![Term::var("X")]);
        assert_eq!(
            expand_rule(&rs[0]),
            vec![Formula::implies(
                Formula::and(Formula::Atom(Atom::pred("visited", vec![Term::var("X")])), eq(nx.clone(), nx.clone())),
                Formula::Atom(Atom::pred("visited", vec![nx])),
            )]
        );
    }

    #[test]
    fn choice_head_two_formulas() {
        let rs = rules("node(0). next(X) in {Z | arc(X,Z)} :- node(X).");
        let out = expand_rule(&rs[1]);
        assert_eq!(out.len(), 2);
        assert!(matches!(&out[0], Formula::Forall(v, _) if v == "Z"));
        let Formula::Implies(ante, cons) = &out[1] else { panic!("constraint expected") };
        assert_eq!(**cons, Formula::Falsum);
        assert!(matches!(**ante, Formula::And(..)));
        assert!(out.iter().all(|f| f.is_core()));
    }

    #[test]
    fn enum_choice_desugars_to_disjunctive_condition() {
        let rs = rules("#evaluable a. a in {1, 2}.");
        let out = expand_rule(&rs[0]);
        assert_eq!(out.len(), 2);
        let Formula::Forall(v, body) = &out[0] else { panic!() };
        let Formula::Implies(ante, _) = &**body else { panic!() };
        let expected = Formula::or(
            eq(Term::constant("1"), Term::var(v)),
            eq(Term::constant("2"), Term::var(v)),
        );
        assert_eq!(**ante, expected);
    }

    #[test]
    fn apartness_and_equiv_expand() {
        let a = Term::constant("a");
        let f = Term::app("f", vec![]);
        let apart = Formula::Atom(Atom::Apart(f.clone(), a.clone()));
        let out = expand_formula(&apart);
        assert!(out.is_core());
        assert_eq!(
            out,
            Formula::and(
                Formula::and(eq(f.clone(), f.clone()), eq(a.clone(), a.clone())),
                Formula::not(eq(f.clone(), a.clone()))
            )
        );
        let eqv = Formula::Equiv(f.clone(), a.clone());
        assert_eq!(
            expand_formula(&eqv),
            Formula::implies(Formula::or(eq(f.clone(), f.clone()), eq(a.clone(), a.clone())), eq(f, a))
        );
    }

    #[test]
    fn expand_is_idempotent_on_output() {
        let rs = rules(
            "#evaluable b. node(0). next(X) in {Z | arc(X,Z)} :- node(X).\n\
             b := 1 :- not (b # 1). :- f(0) # b.",
        );
        for r in &rs {
            for phi in expand_rule(r) {
                assert!(phi.is_core());
                assert_eq!(expand_formula(&phi), phi);
            }
        }
    }

    #[test]
    fn expanded_free_vars_within_rule_vars() {
        let rs = rules("node(0). next(X) in {Z | arc(X,Z)} :- node(X). p(X) :- q(X,Y).");
        for r in &rs {
            let rv = crate::ast::rule_free_vars(r);
            for phi in expand_rule(r) {
                assert!(formula_free_vars(&phi).is_subset(&rv));
            }
        }
    }
}
