//! Many-sorted total-function programs: declarations, type checking, direct
//! answer-set semantics, and the embedding into the partial-function language.

use std::collections::{BTreeMap, BTreeSet};

use std::fmt;

use thiserror::Error;

use crate::ast::{join, Span, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FaspAtom {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
}

impl fmt::Display for FaspAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaspAtom::Pred(p, args) if args.is_empty() => write!(f, "{p}"),
            FaspAtom::Pred(p, args) => write!(f, "{p}({})", join(args, ",")),
            FaspAtom::Eq(l, r) => write!(f, "{l} = {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaspLiteral {
    pub atom: FaspAtom,
    pub negated: bool,
}

impl fmt::Display for FaspLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            if let FaspAtom::Eq(l, r) = &self.atom {
                return write!(f, "{l} != {r}");
            }
            write!(f, "not {}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaspRule {
    pub head: Option<(String, Vec<Term>)>,
    pub body: Vec<FaspLiteral>,
    pub span: Option<Span>,
}

impl fmt::Display for FaspRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match &self.head {
            Some((p, args)) => FaspAtom::Pred(p.clone(), args.clone()).to_string(),
            None => String::new(),
        };
        match (head.is_empty(), self.body.is_empty()) {
            (false, true) => write!(f, "{head}."),
            (false, false) => write!(f, "{head} :- {}.", join(&self.body, ", ")),
            (true, _) => write!(f, ":- {}.", join(&self.body, ", ")),
        }
    }
}

/// A typed program: finite type extensions, ranked predicates, total
/// functions with declared domain and range, and typed variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FaspProgram {
    pub types: BTreeMap<String, Vec<String>>,
    pub preds: BTreeMap<String, Vec<String>>,
    pub funcs: BTreeMap<String, (Vec<String>, String)>,
    pub vars: BTreeMap<String, String>,
    pub rules: Vec<FaspRule>,
}

impl fmt::Display for FaspProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, elems) in &self.types {
            writeln!(f, "#type {name} = {{{}}}.", elems.join(","))?;
        }
        for (name, domain) in &self.preds {
            if domain.is_empty() {
                writeln!(f, "#pred {name}.")?;
            } else {
                writeln!(f, "#pred {name}({}).", domain.join(","))?;
            }
        }
        for (name, (domain, range)) in &self.funcs {
            writeln!(f, "#func {name}({}) -> {range}.", domain.join(","))?;
        }
        for (var, ty) in &self.vars {
            writeln!(f, "#var {var} : {ty}.")?;
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl FaspProgram {
    /// The set of types a term can inhabit. Constants may belong to several
    /// type extensions; variables and applications have exactly one type.
    fn term_types(&self, t: &Term, span: Span, errs: &mut Vec<(Span, String)>) -> Vec<String> {
        match t {
            Term::Var(v) => match self.vars.get(v) {
                Some(ty) => vec![ty.clone()],
                None => {
                    errs.push((span, format!("variable '{v}' has no #var declaration")));
                    Vec::new()
                }
            },
            Term::Const(c) => {
                let tys: Vec<String> = self
                    .types
                    .iter()
                    .filter(|(_, elems)| elems.contains(c))
                    .map(|(name, _)| name.clone())
                    .collect();
                if tys.is_empty() {
                    errs.push((span, format!("constant '{c}' belongs to no declared type")));
                }
                tys
            }
            Term::App(f, args) => match self.funcs.get(f) {
                Some((domain, range)) => {
                    if args.len() != domain.len() {
                        errs.push((
                            span,
                            format!("function '{f}' expects {} argument(s), got {}", domain.len(), args.len()),
                        ));
                    } else {
                        for (arg, ty) in args.iter().zip(domain) {
                            self.check_term_has_type(arg, ty, span, errs);
                        }
                    }
                    vec![range.clone()]
                }
                None => {
                    errs.push((span, format!("'{f}' is not a declared function")));
                    Vec::new()
                }
            },
        }
    }

    fn check_term_has_type(&self, t: &Term, ty: &str, span: Span, errs: &mut Vec<(Span, String)>) {
        let before = errs.len();
        let tys = self.term_types(t, span, errs);
        if errs.len() == before && !tys.iter().any(|x| x == ty) {
            errs.push((span, format!("term '{t}' has type {}, expected '{ty}'", join(&tys, " or "))));
        }
    }

    fn check_atom(&self, atom: &FaspAtom, span: Span, errs: &mut Vec<(Span, String)>) {
        match atom {
            FaspAtom::Pred(p, args) => match self.preds.get(p) {
                Some(domain) => {
                    if args.len() != domain.len() {
                        errs.push((
                            span,
                            format!("predicate '{p}' expects {} argument(s), got {}", domain.len(), args.len()),
                        ));
                    } else {
                        for (arg, ty) in args.iter().zip(domain) {
                            self.check_term_has_type(arg, ty, span, errs);
                        }
                    }
                }
                None => errs.push((span, format!("'{p}' is not a declared predicate"))),
            },
            FaspAtom::Eq(l, r) => {
                let before = errs.len();
                let lt = self.term_types(l, span, errs);
                let rt = self.term_types(r, span, errs);
                if errs.len() == before && !lt.iter().any(|t| rt.contains(t)) {
                    errs.push((
                        span,
                        format!("'{l} = {r}' compares incompatible types ({} vs {})", join(&lt, "/"), join(&rt, "/")),
                    ));
                }
            }
        }
    }

    /// Type-coherence check over all declarations and rules.
    pub fn type_check(&self) -> Vec<(Span, String)> {
        let mut errs = Vec::new();
        let origin = Span::default();
        for (name, domain) in &self.preds {
            for ty in domain {
                if !self.types.contains_key(ty) {
                    errs.push((origin, format!("predicate '{name}' uses undeclared type '{ty}'")));
                }
            }
        }
        for (name, (domain, range)) in &self.funcs {
            for ty in domain.iter().chain([range]) {
                if !self.types.contains_key(ty) {
                    errs.push((origin, format!("function '{name}' uses undeclared type '{ty}'")));
                }
            }
        }
        for (var, ty) in &self.vars {
            if !self.types.contains_key(ty) {
                errs.push((origin, format!("variable '{var}' uses undeclared type '{ty}'")));
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        for rule in &self.rules {
            let span = rule.span.unwrap_or_default();
            if let Some((p, args)) = &rule.head {
                self.check_atom(&FaspAtom::Pred(p.clone(), args.clone()), span, &mut errs);
            }
            for lit in &rule.body {
                self.check_atom(&lit.atom, span, &mut errs);
            }
        }
        errs
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaspError {
    #[error("search space too large: {needed} candidates exceed the limit of {limit}")]
    SearchSpaceTooLarge { needed: u128, limit: u128 },
    #[error("cannot embed program: {0}")]
    Embed(String),
}

/// A total, type-respecting state: every declared function entry has a
/// value in its range, and atoms respect predicate domains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaspState {
    pub sigma: BTreeMap<(String, Vec<String>), String>,
    pub atoms: BTreeSet<(String, Vec<String>)>,
}

impl fmt::Display for FaspState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (p, args) in &self.atoms {
            if args.is_empty() {
                parts.push(p.clone());
            } else {
                parts.push(format!("{p}({})", args.join(",")));
            }
        }
        for ((func, args), value) in &self.sigma {
            if args.is_empty() {
                parts.push(format!("{func}={value}"));
            } else {
                parts.push(format!("{func}({})={value}", args.join(",")));
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

fn term_vars_ordered(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| term_vars_ordered(a, out)),
    }
}

fn rule_vars_ordered(r: &FaspRule) -> Vec<String> {
    let mut out = Vec::new();
    if let Some((_, args)) = &r.head {
        args.iter().for_each(|a| term_vars_ordered(a, &mut out));
    }
    for lit in &r.body {
        match &lit.atom {
            FaspAtom::Pred(_, args) => args.iter().for_each(|a| term_vars_ordered(a, &mut out)),
            FaspAtom::Eq(l, r2) => {
                term_vars_ordered(l, &mut out);
                term_vars_ordered(r2, &mut out);
            }
        }
    }
    out
}

/// Replace every variable by the elements of its declared range, in all
/// possible ways. Type definitions and declarations are retained.
pub fn fasp_ground(p: &FaspProgram) -> FaspProgram {
    let mut out = p.clone();
    out.rules.clear();
    for rule in &p.rules {
        let vars = rule_vars_ordered(rule);
        let mut insts: Vec<FaspRule> = vec![rule.clone()];
        for v in &vars {
            let range = &p.types[&p.vars[v]];
            let mut next = Vec::new();
            for inst in &insts {
                for c in range {
                    let with = Term::Const(c.clone());
                    next.push(FaspRule {
                        head: inst.head.as_ref().map(|(name, args)| {
                            (name.clone(), args.iter().map(|a| a.subst(v, &with)).collect())
                        }),
                        body: inst
                            .body
                            .iter()
                            .map(|lit| FaspLiteral {
                                atom: match &lit.atom {
                                    FaspAtom::Pred(p2, args) => FaspAtom::Pred(
                                        p2.clone(),
                                        args.iter().map(|a| a.subst(v, &with)).collect(),
                                    ),
                                    FaspAtom::Eq(l, r2) => {
                                        FaspAtom::Eq(l.subst(v, &with), r2.subst(v, &with))
                                    }
                                },
                                negated: lit.negated,
                            })
                            .collect(),
                        span: inst.span,
                    });
                }
            }
            insts = next;
        }
        out.rules.extend(insts);
    }
    out
}

fn eval_total(sigma: &BTreeMap<(String, Vec<String>), String>, t: &Term) -> String {
    match t {
        Term::Const(c) => c.clone(),
        Term::App(f, args) => {
            let vals: Vec<String> = args.iter().map(|a| eval_total(sigma, a)).collect();
            sigma
                .get(&(f.clone(), vals.clone()))
                .unwrap_or_else(|| panic!("total state lacks a value for {f}({})", vals.join(",")))
                .clone()
        }
        Term::Var(v) => panic!("reduct of a non-ground rule (variable '{v}')"),
    }
}

/// The reduct of a ground program under a total state: functional terms are
/// evaluated, decided literals (equalities, negated atoms) become true or
/// false, false-bodied rules are dropped. The result is a positive ground
/// function-free program.
pub fn fasp_reduct(g: &FaspProgram, s: &FaspState) -> Vec<FaspRule> {
    let mut out = Vec::new();
    'rules: for rule in &g.rules {
        let mut body = Vec::new();
        for lit in &rule.body {
            match (&lit.atom, lit.negated) {
                (FaspAtom::Eq(l, r), negated) => {
                    let equal = eval_total(&s.sigma, l) == eval_total(&s.sigma, r);
                    if equal == negated {
                        continue 'rules; // body contains falsity
                    }
                }
                (FaspAtom::Pred(p, args), negated) => {
                    let atom =
                        (p.clone(), args.iter().map(|a| eval_total(&s.sigma, a)).collect::<Vec<_>>());
                    if negated {
                        if s.atoms.contains(&atom) {
                            continue 'rules;
                        }
                    } else {
                        body.push(FaspLiteral {
                            atom: FaspAtom::Pred(atom.0, atom.1.into_iter().map(Term::Const).collect()),
                            negated: false,
                        });
                    }
                }
            }
        }
        let head = rule.head.as_ref().map(|(p, args)| {
            (p.clone(), args.iter().map(|a| Term::Const(eval_total(&s.sigma, a))).collect())
        });
        out.push(FaspRule { head, body, span: rule.span });
    }
    out
}

fn const_args(args: &[Term]) -> Vec<String> {
    args.iter()
        .map(|a| match a {
            Term::Const(c) => c.clone(),
            other => panic!("reduct rules are ground and function-free, got '{other}'"),
        })
        .collect()
}

fn reduct_least_model(reduct: &[FaspRule]) -> BTreeSet<(String, Vec<String>)> {
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in reduct {
            let Some((p, args)) = &r.head else { continue };
            let head = (p.clone(), const_args(args));
            let fires = r.body.iter().all(|lit| match &lit.atom {
                FaspAtom::Pred(q, qargs) => model.contains(&(q.clone(), const_args(qargs))),
                FaspAtom::Eq(..) => unreachable!("reducts contain no equality"),
            });
            if fires && model.insert(head) {
                changed = true;
            }
        }
        if !changed {
            return model;
        }
    }
}

fn domain_tuples(types: &BTreeMap<String, Vec<String>>, domain: &[String]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for ty in domain {
        let mut next = Vec::new();
        for prefix in &out {
            for c in &types[ty] {
                let mut t = prefix.clone();
                t.push(c.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub const DEFAULT_MAX_SEARCH: u128 = 1 << 24;

/// All answer sets of a program: total range-respecting assignments whose
/// derivable atoms reproduce themselves through the reduct and violate no
/// constraint.
pub fn fasp_answer_sets(p: &FaspProgram, max_search: u128) -> Result<Vec<FaspState>, FaspError> {
    let g = fasp_ground(p);
    // every (function, argument tuple) entry with its range extension
    let mut entries: Vec<((String, Vec<String>), Vec<String>)> = Vec::new();
    for (f, (domain, range)) in &g.funcs {
        for tuple in domain_tuples(&g.types, domain) {
            entries.push(((f.clone(), tuple), g.types[range].clone()));
        }
    }
    let mut sigma_count: u128 = 1;
    for (_, range) in &entries {
        sigma_count = sigma_count.saturating_mul(range.len() as u128);
    }
    let head_count = g.rules.iter().filter(|r| r.head.is_some()).count() as u32;
    let needed = sigma_count.saturating_mul(2u128.saturating_pow(head_count));
    if needed > max_search {
        return Err(FaspError::SearchSpaceTooLarge { needed, limit: max_search });
    }

    let mut sigmas: Vec<BTreeMap<(String, Vec<String>), String>> = vec![BTreeMap::new()];
    for (entry, range) in &entries {
        let mut next = Vec::new();
        for sigma in &sigmas {
            for value in range {
                let mut s = sigma.clone();
                s.insert(entry.clone(), value.clone());
                next.push(s);
            }
        }
        sigmas = next;
    }

    let mut answers = Vec::new();
    for sigma in sigmas {
        // candidate atoms: the heads this assignment can produce
        let probe = FaspState { sigma: sigma.clone(), atoms: BTreeSet::new() };
        let mut heads: Vec<(String, Vec<String>)> = Vec::new();
        for rule in &g.rules {
            if let Some((p2, args)) = &rule.head {
                let atom = (p2.clone(), args.iter().map(|a| eval_total(&probe.sigma, a)).collect());
                if !heads.contains(&atom) {
                    heads.push(atom);
                }
            }
        }
        for mask in 0u64..(1u64 << heads.len()) {
            let atoms: BTreeSet<(String, Vec<String>)> = heads
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            let cand = FaspState { sigma: sigma.clone(), atoms };
            let reduct = fasp_reduct(&g, &cand);
            let defining: Vec<FaspRule> =
                reduct.iter().filter(|r| r.head.is_some()).cloned().collect();
            if reduct_least_model(&defining) != cand.atoms {
                continue;
            }
            let violated = reduct.iter().any(|r| {
                r.head.is_none()
                    && r.body.iter().all(|lit| match &lit.atom {
                        FaspAtom::Pred(q, qargs) => cand.atoms.contains(&(q.clone(), const_args(qargs))),
                        FaspAtom::Eq(..) => unreachable!("reducts contain no equality"),
                    })
            });
            if !violated {
                answers.push(cand);
            }
        }
    }
    answers.sort();
    answers.dedup();
    Ok(answers)
}

/// Embed a typed total-function program into the partial-function language:
/// one unary predicate (with facts) per type, one choice rule per function
/// declaration, and every source rule extended with range atoms for its
/// variables.
pub fn embed(p: &FaspProgram) -> Result<crate::ast::FlpProgram, FaspError> {
    use crate::ast::{Atom, FlpRule, Head, Literal, Signature};

    let mut sig = Signature::new();
    for elems in p.types.values() {
        for c in elems {
            sig.add_constructor(c).map_err(|e| FaspError::Embed(e.to_string()))?;
        }
    }
    for (name, _) in &p.types {
        sig.add_predicate(name, 1).map_err(|e| FaspError::Embed(e.to_string()))?;
    }
    for (name, domain) in &p.preds {
        sig.add_predicate(name, domain.len()).map_err(|e| FaspError::Embed(e.to_string()))?;
    }
    for (name, (domain, _)) in &p.funcs {
        sig.add_evaluable(name, domain.len()).map_err(|e| FaspError::Embed(e.to_string()))?;
    }
    sig.validate().map_err(|e| FaspError::Embed(e.to_string()))?;

    let mut rules = Vec::new();
    for (name, elems) in &p.types {
        for c in elems {
            rules.push(FlpRule::new(Head::Pred(name.clone(), vec![Term::Const(c.clone())]), vec![]));
        }
    }
    for (name, (domain, range)) in &p.funcs {
        let args: Vec<Term> = (1..=domain.len()).map(|i| Term::Var(format!("X{i}"))).collect();
        let body: Vec<Literal> = domain
            .iter()
            .enumerate()
            .map(|(i, ty)| Literal::pos(Atom::Pred(ty.clone(), vec![Term::Var(format!("X{}", i + 1))])))
            .collect();
        rules.push(FlpRule::new(
            Head::Choice {
                func: name.clone(),
                args,
                var: "Y".to_string(),
                cond: vec![Literal::pos(Atom::Pred(range.clone(), vec![Term::var("Y")]))],
            },
            body,
        ));
    }
    for rule in &p.rules {
        let head = match &rule.head {
            None => Head::Falsum,
            Some((name, args)) => Head::Pred(name.clone(), args.clone()),
        };
        let mut body: Vec<Literal> = rule
            .body
            .iter()
            .map(|lit| Literal {
                atom: match &lit.atom {
                    FaspAtom::Pred(name, args) => Atom::Pred(name.clone(), args.clone()),
                    FaspAtom::Eq(l, r) => Atom::Eq(l.clone(), r.clone()),
                },
                negated: lit.negated,
            })
            .collect();
        for v in rule_vars_ordered(rule) {
            let ty = p.vars[&v].clone();
            body.push(Literal::pos(Atom::Pred(ty, vec![Term::Var(v)])));
        }
        let mut out = FlpRule::new(head, body);
        out.span = rule.span;
        rules.push(out);
    }
    Ok(crate::ast::FlpProgram { signature: sig, rules })
}

/// Restrict an equilibrium state of the embedded program back to the typed
/// signature: keep declared predicate atoms (dropping type range atoms) and
/// the function entries over declared domains. Returns nothing when some
/// declared entry is undefined.
pub fn restrict_state(state: &crate::htsem::State, p: &FaspProgram) -> Option<FaspState> {
    let mut sigma = BTreeMap::new();
    for (f, (domain, _)) in &p.funcs {
        for tuple in domain_tuples(&p.types, domain) {
            let value = state.sigma.get(&(f.clone(), tuple.clone()))?.clone()?;
            sigma.insert((f.clone(), tuple), value);
        }
    }
    let atoms = state
        .atoms
        .iter()
        .filter(|(name, args)| p.preds.get(name).map(|d| d.len()) == Some(args.len()))
        .cloned()
        .collect();
    Some(FaspState { sigma, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_fasp;

    const COLOURING: &str = "#type node = {1,2,3}.\n\
        #type colour = {r,g,b}.\n\
        #pred arc(node,node).\n\
        #func clr(node) -> colour.\n\
        #var X : node.\n\
        #var Y : node.\n\
        arc(1,2). arc(2,3). arc(3,1).\n\
        :- arc(X,Y), clr(X) = clr(Y).";

    const HAM3: &str = "#type node = {0,1,2}.\n\
        #pred arc(node,node). #pred visited(node).\n\
        #func next(node) -> node.\n\
        #var X : node.\n\
        arc(0,1). arc(1,2). arc(2,0).\n\
        :- not arc(X,next(X)).\n\
        visited(next(0)).\n\
        visited(next(X)) :- visited(X).\n\
        :- not visited(X).";

    #[test]
    fn grounding_substitutes_ranges() {
        let p = parse_fasp(HAM3, "<t>").unwrap();
        let g = fasp_ground(&p);
        // arc facts: 3; first constraint: 3; fact rule: 1; recursion: 3; last constraint: 3
        assert_eq!(g.rules.len(), 13);
        let rendered: Vec<String> = g.rules.iter().map(|r| r.to_string()).collect();
        assert!(rendered.contains(&":- not arc(0,next(0)).".to_string()));
        assert!(rendered.contains(&"visited(next(1)) :- visited(1).".to_string()));
        // a variable-free rule grounds to itself
        assert!(rendered.contains(&"visited(next(0)).".to_string()));
    }

    #[test]
    fn reduct_transformations() {
        let p = parse_fasp(
            "#type node = {0,1}.\n#pred visited(node). #pred p(node).\n\
             #func next(node) -> node.\n\
             visited(next(0)).\n\
             :- not visited(0).\n\
             p(0) :- 1 = 1.\n\
             p(1) :- 0 = 1.",
            "<t>",
        )
        .unwrap();
        let mut sigma = BTreeMap::new();
        sigma.insert(("next".to_string(), vec!["0".to_string()]), "1".to_string());
        sigma.insert(("next".to_string(), vec!["1".to_string()]), "0".to_string());
        let mut atoms = BTreeSet::new();
        atoms.insert(("visited".to_string(), vec!["0".to_string()]));
        let s = FaspState { sigma, atoms };
        let reduct = fasp_reduct(&fasp_ground(&p), &s);
        let rendered: Vec<String> = reduct.iter().map(|r| r.to_string()).collect();
        // functional term evaluated in the head
        assert!(rendered.contains(&"visited(1).".to_string()));
        // the constraint's negated satisfied atom makes the body false: dropped
        assert!(!rendered.iter().any(|r| r.contains("not")));
        assert_eq!(rendered.iter().filter(|r| r.starts_with(":-")).count(), 0);
        // true equality erased, false equality drops the rule
        assert!(rendered.contains(&"p(0).".to_string()));
        assert!(!rendered.iter().any(|r| r.starts_with("p(1)")));
    }

    #[test]
    fn triangle_colouring_has_six_answer_sets() {
        let p = parse_fasp(COLOURING, "<t>").unwrap();
        let answers = fasp_answer_sets(&p, DEFAULT_MAX_SEARCH).unwrap();
        assert_eq!(answers.len(), 6);
        for a in &answers {
            // proper colouring: adjacent nodes differ
            for (x, y) in [("1", "2"), ("2", "3"), ("3", "1")] {
                assert_ne!(
                    a.sigma[&("clr".to_string(), vec![x.to_string()])],
                    a.sigma[&("clr".to_string(), vec![y.to_string()])]
                );
            }
        }
    }

    #[test]
    fn two_colours_cannot_colour_a_triangle() {
        let src = COLOURING.replace("{r,g,b}", "{r,g}");
        let p = parse_fasp(&src, "<t>").unwrap();
        assert_eq!(fasp_answer_sets(&p, DEFAULT_MAX_SEARCH).unwrap().len(), 0);
    }

    #[test]
    fn cycle_program_has_unique_answer_set() {
        let p = parse_fasp(HAM3, "<t>").unwrap();
        let answers = fasp_answer_sets(&p, DEFAULT_MAX_SEARCH).unwrap();
        assert_eq!(answers.len(), 1);
        let a = &answers[0];
        assert_eq!(a.sigma[&("next".to_string(), vec!["0".to_string()])], "1");
        assert_eq!(a.sigma[&("next".to_string(), vec!["1".to_string()])], "2");
        assert_eq!(a.sigma[&("next".to_string(), vec!["2".to_string()])], "0");
        for n in ["0", "1", "2"] {
            assert!(a.atoms.contains(&("visited".to_string(), vec![n.to_string()])));
        }
    }

    #[test]
    fn embedding_produces_range_guarded_rules() {
        let p = parse_fasp(COLOURING, "<t>").unwrap();
        let flp = embed(&p).unwrap();
        let rendered: Vec<String> = flp.rules.iter().map(|r| r.to_string()).collect();
        assert!(rendered.contains(&"clr(X1) in { Y | colour(Y) } :- node(X1).".to_string()));
        assert!(rendered
            .contains(&":- arc(X,Y), clr(X) = clr(Y), node(X), node(Y).".to_string()));
        assert!(rendered.contains(&"node(1).".to_string()));
        assert!(rendered.contains(&"colour(r).".to_string()));
        // facts for both types, one choice rule, the source constraint, arcs
        assert_eq!(rendered.len(), 3 + 3 + 1 + 3 + 1);
    }

    #[test]
    fn embedding_of_declarations_only() {
        let p = parse_fasp("#type t = {a}.\n#func f(t) -> t.", "<t>").unwrap();
        let flp = embed(&p).unwrap();
        let rendered: Vec<String> = flp.rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(rendered, vec!["t(a).".to_string(), "f(X1) in { Y | t(Y) } :- t(X1).".to_string()]);
    }

    #[test]
    fn answer_sets_match_equilibrium_models_of_embedding() {
        let src = "#type node = {0,1}.\n\
            #pred visited(node).\n\
            #func next(node) -> node.\n\
            #var X : node.\n\
            visited(next(0)).\n\
            visited(next(X)) :- visited(X).";
        let p = parse_fasp(src, "<t>").unwrap();
        let direct = fasp_answer_sets(&p, DEFAULT_MAX_SEARCH).unwrap();
        let flp = embed(&p).unwrap();
        let eq = crate::htsem::equilibrium_models(&flp, crate::htsem::DEFAULT_MAX_SEARCH).unwrap();
        let mut via_embedding: Vec<FaspState> =
            eq.iter().map(|s| restrict_state(s, &p).expect("total on declared domains")).collect();
        via_embedding.sort();
        via_embedding.dedup();
        assert_eq!(direct, via_embedding);
        assert!(!direct.is_empty());
    }

    #[test]
    fn embedded_program_text_reparses() {
        let p = parse_fasp(HAM3, "<t>").unwrap();
        let flp = embed(&p).unwrap();
        let reparsed = crate::parser::parse_flp(&flp.to_string(), "<embedded>").unwrap();
        assert_eq!(reparsed.rules.len(), flp.rules.len());
        assert_eq!(reparsed.signature, flp.signature);
    }
}
