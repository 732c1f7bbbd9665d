//! Restricted-variable analysis and safety checks.
//!
//! Safety guarantees domain independence: grounding a safe program over a
//! larger constant pool yields the same answers. The analysis runs on three
//! layers — source rules with evaluable functions, the translated
//! intermediate theory (quantified bodies, no functions), and the final
//! normalized function-free rules.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Atom, FlpRule, Head, LpLiteral, LpProgram, LpTerm, Literal, Span, Term};
use crate::flatten::{IAtom, IBody, IHead, IRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reason {
    UnrestrictedInHead,
    UnrestrictedUnderNegation,
    ChoiceVarUnrestricted,
    ExistsVarUnrestricted,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::UnrestrictedInHead => "unrestricted-in-head",
            Reason::UnrestrictedUnderNegation => "unrestricted-under-negation",
            Reason::ChoiceVarUnrestricted => "choice-var-unrestricted",
            Reason::ExistsVarUnrestricted => "exists-var-unrestricted",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Rendering of the offending rule.
    pub rule: String,
    pub span: Option<Span>,
    pub var: String,
    pub reason: Reason,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "variable '{}' is {} in '{}'", self.var, self.reason, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SafetyReport {
    pub violations: Vec<Violation>,
}

impl SafetyReport {
    pub fn safe(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: SafetyReport) {
        self.violations.extend(other.violations);
    }
}

/// Variables restricted in a conjunction of literals: least fixpoint of
/// (1) occurring in a positive predicate atom; (2) a direct argument of an
/// evaluable application inside a positive literal; (3) one side of a
/// positive equality whose other side is an application; (4) one side of a
/// positive variable equality whose other side is restricted by a
/// different literal.
pub fn restricted_vars(body: &[Literal]) -> BTreeSet<String> {
    // restricting literal indices per variable, so that case 4 can demand a
    // *different* witness than the equality itself
    let mut by: Vec<BTreeSet<String>> = vec![BTreeSet::new(); body.len()];
    for (i, lit) in body.iter().enumerate() {
        if lit.negated {
            continue;
        }
        match &lit.atom {
            Atom::Pred(_, args) => {
                let mut vs = BTreeSet::new();
                for a in args {
                    a.vars_into(&mut vs);
                }
                by[i] = vs;
            }
            Atom::Eq(l, r) | Atom::Apart(l, r) => {
                for side in [l, r] {
                    for sub in crate::ast::subterms(side) {
                        if let Term::App(_, args) = &sub {
                            for a in args {
                                if let Term::Var(v) = a {
                                    by[i].insert(v.clone());
                                }
                            }
                        }
                    }
                }
                if let Atom::Eq(..) = &lit.atom {
                    match (l, r) {
                        (Term::App(..), Term::Var(v)) | (Term::Var(v), Term::App(..)) => {
                            by[i].insert(v.clone());
                        }
                        _ => {}
                    }
                }
            }
        }
        // evaluable applications nested inside predicate args also restrict
        // their direct variable arguments, subsumed above for equalities
        if let Atom::Pred(_, args) = &lit.atom {
            for a in args {
                for sub in crate::ast::subterms(a) {
                    if let Term::App(_, fargs) = &sub {
                        for fa in fargs {
                            if let Term::Var(v) = fa {
                                by[i].insert(v.clone());
                            }
                        }
                    }
                }
            }
        }
    }
    // case 4 to fixpoint
    loop {
        let mut changed = false;
        for (i, lit) in body.iter().enumerate() {
            if lit.negated {
                continue;
            }
            if let Atom::Eq(Term::Var(x), Term::Var(y)) = &lit.atom {
                for (a, b) in [(x, y), (y, x)] {
                    let b_elsewhere = by.iter().enumerate().any(|(j, s)| j != i && s.contains(b));
                    if b_elsewhere && by[i].insert(a.clone()) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    by.into_iter().flatten().collect()
}

fn occurs_negated(body: &[Literal], var: &str) -> bool {
    body.iter().any(|lit| {
        if !lit.negated {
            return false;
        }
        let mut vs = BTreeSet::new();
        lit.vars_into(&mut vs);
        vs.contains(var)
    })
}

fn direct_head_vars(head: &Head) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut push_direct = |ts: &[Term]| {
        for t in ts {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        }
    };
    match head {
        Head::Falsum => {}
        Head::Pred(_, args) => push_direct(args),
        Head::Assign { args, value, .. } => {
            push_direct(args);
            push_direct(std::slice::from_ref(value));
        }
        Head::Choice { args, .. } => push_direct(args),
        Head::ChoiceEnum { args, values, .. } => {
            push_direct(args);
            push_direct(values);
        }
    }
    out
}

/// Check one source rule. Beyond the body-restriction conditions, any
/// non-choice variable occurring in a choice condition must be restricted
/// in the rule body: the generated completeness constraint places the whole
/// condition under negation.
pub fn check_flp_rule(r: &FlpRule) -> SafetyReport {
    let mut report = SafetyReport::default();
    let mut push = |var: &str, reason: Reason| {
        report.violations.push(Violation { rule: r.to_string(), span: r.span, var: var.to_string(), reason });
    };
    let restricted = restricted_vars(&r.body);
    let head_vars = direct_head_vars(&r.head);

    let (choice_var, cond): (Option<&str>, &[Literal]) = match &r.head {
        Head::Choice { var, cond, .. } => (Some(var.as_str()), cond.as_slice()),
        _ => (None, &[]),
    };
    let cond_restricted = restricted_vars(cond);
    if let Some(cv) = choice_var {
        if !cond_restricted.contains(cv) {
            push(cv, Reason::ChoiceVarUnrestricted);
        }
    }

    let mut vars = crate::ast::rule_free_vars(r);
    let mut cond_vars = BTreeSet::new();
    for lit in cond {
        lit.vars_into(&mut cond_vars);
    }
    vars.extend(cond_vars.iter().cloned());
    for v in &vars {
        if Some(v.as_str()) == choice_var || restricted.contains(v) {
            continue;
        }
        if occurs_negated(&r.body, v) {
            push(v, Reason::UnrestrictedUnderNegation);
        }
        if head_vars.contains(v) {
            push(v, Reason::UnrestrictedInHead);
        }
        if cond_vars.contains(v) {
            push(v, Reason::UnrestrictedUnderNegation);
        }
    }
    report.violations.sort_by(|a, b| (a.var.clone(), a.reason).cmp(&(b.var.clone(), b.reason)));
    report.violations.dedup();
    report
}

pub fn check_flp_program(p: &crate::ast::FlpProgram) -> SafetyReport {
    let mut report = SafetyReport::default();
    for r in &p.rules {
        report.merge(check_flp_rule(r));
    }
    report
}

/// Restriction over function-free literal conjunctions: positive predicate
/// atoms, plus the equality-chain closure (a positive `X = t` restricts `X`
/// when `t` is ground or restricted by a different literal).
fn restricted_lp_vars(lits: &[(IAtom, bool)]) -> BTreeSet<String> {
    let mut by: Vec<BTreeSet<String>> = vec![BTreeSet::new(); lits.len()];
    for (i, (atom, negated)) in lits.iter().enumerate() {
        if *negated {
            continue;
        }
        if let IAtom::Pred(_, args) = atom {
            for a in args {
                if let LpTerm::Var(v) = a {
                    by[i].insert(v.clone());
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for (i, (atom, negated)) in lits.iter().enumerate() {
            if *negated {
                continue;
            }
            if let IAtom::Eq(l, r) = atom {
                for (a, b) in [(l, r), (r, l)] {
                    let LpTerm::Var(v) = a else { continue };
                    let ok = match b {
                        LpTerm::Const(_) => true,
                        LpTerm::Var(w) => by.iter().enumerate().any(|(j, s)| j != i && s.contains(w)),
                    };
                    if ok && by[i].insert(v.clone()) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    by.into_iter().flatten().collect()
}

fn iatom_vars(atom: &IAtom) -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |t: &LpTerm| {
        if let LpTerm::Var(v) = t {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    };
    match atom {
        IAtom::Pred(_, args) => args.iter().for_each(push),
        IAtom::Eq(l, r) | IAtom::Neq(l, r) => {
            push(l);
            push(r);
        }
    }
    out
}

/// Check a translated theory: every free variable of a rule must be
/// restricted by the positive part of its body, and every quantified
/// variable must be restricted inside its own group.
pub fn check_intermediate(theory: &[IRule]) -> SafetyReport {
    let mut report = SafetyReport::default();
    for rule in theory {
        let rendered = rule.to_string();
        let mut push = |var: &String, reason: Reason| {
            report
                .violations
                .push(Violation { rule: rendered.clone(), span: None, var: var.clone(), reason });
        };
        // the positive conjunction visible at rule level
        let mut positive: Vec<(IAtom, bool)> = Vec::new();
        for b in &rule.body {
            if let IBody::Pos(g) = b {
                for lit in &g.lits {
                    positive.push((lit.atom.clone(), lit.negated));
                }
            }
        }
        let restricted = restricted_lp_vars(&positive);

        // free variables of the rule: head vars plus free body vars
        let mut free: Vec<String> = Vec::new();
        match &rule.head {
            IHead::Falsum => {}
            IHead::Atom(a) | IHead::Choice(a) => free.extend(iatom_vars(a)),
        }
        for b in &rule.body {
            let groups: &[crate::flatten::IGroup] = match b {
                IBody::Pos(g) => std::slice::from_ref(g),
                IBody::Neg(gs) => gs.as_slice(),
            };
            for g in groups {
                for lit in &g.lits {
                    for v in iatom_vars(&lit.atom) {
                        if !g.exists.contains(&v) && !free.contains(&v) {
                            free.push(v);
                        }
                    }
                }
                // quantified variables must be restricted within the group
                let group_lits: Vec<(IAtom, bool)> =
                    g.lits.iter().map(|l| (l.atom.clone(), l.negated)).collect();
                let inner = restricted_lp_vars(&group_lits);
                for x in &g.exists {
                    if !inner.contains(x) {
                        push(x, Reason::ExistsVarUnrestricted);
                    }
                }
            }
        }
        let in_head = match &rule.head {
            IHead::Falsum => Vec::new(),
            IHead::Atom(a) | IHead::Choice(a) => iatom_vars(a),
        };
        for v in &free {
            if !restricted.contains(v) {
                let reason = if in_head.contains(v) {
                    Reason::UnrestrictedInHead
                } else {
                    Reason::UnrestrictedUnderNegation
                };
                push(v, reason);
            }
        }
    }
    report.violations.dedup();
    report
}

/// Standard safety for final function-free rules: every variable occurs in
/// a positive body predicate atom. Equality chains have been rewritten away
/// by normalization, so no allowance is needed here.
pub fn lp_safety(p: &LpProgram) -> SafetyReport {
    let mut report = SafetyReport::default();
    for rule in &p.rules {
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
                report.violations.push(Violation {
                    rule: rule.to_string(),
                    span: None,
                    var: v,
                    reason: Reason::UnrestrictedInHead,
                });
            }
        }
    }
    report
}
