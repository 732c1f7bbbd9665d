//! Translation of functional programs into function-free rules: every
//! evaluable `f/n` becomes a predicate `holds_f/(n+1)` constrained to be
//! functional, terms become fresh variables plus `holds` atoms, and choice
//! heads become a disjunction `A | not A` plus a definedness constraint.
//! A second step normalizes the intermediate theory to plain rules using
//! auxiliary predicates and an equality-elimination rewrite.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{
    join, Atom, FlpProgram, FlpRule, Formula, Head, Literal, LpHead, LpLiteral, LpProgram, LpRule, LpTerm,
    Signature, SignatureError, Term, AUX_PREFIX, FRESH_VAR_PREFIX,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("rule shape outside the translatable fragment: {0}")]
    UnsupportedShape(String),
}

/// Per-invocation fresh-name supply; sequential counters keep output
/// deterministic, and the reserved prefixes keep names clear of user symbols.
#[derive(Debug, Default)]
pub struct TranslationContext {
    var_counter: usize,
    aux_counter: usize,
}

impl TranslationContext {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_var(&mut self) -> String {
        self.var_counter += 1;
        format!("{FRESH_VAR_PREFIX}{}", self.var_counter)
    }

    fn fresh_aux(&mut self) -> String {
        self.aux_counter += 1;
        format!("{AUX_PREFIX}_{}", self.aux_counter)
    }
}

// ---------------------------------------------------------------------------
// Intermediate representation: the image of the translation before the
// normalization step removes disjunctive heads and quantified bodies.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IAtom {
    Pred(String, Vec<LpTerm>),
    Eq(LpTerm, LpTerm),
    Neq(LpTerm, LpTerm),
}

impl IAtom {
    fn vars_into(&self, out: &mut Vec<String>) {
        let mut push = |t: &LpTerm| {
            if let LpTerm::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        };
        match self {
            IAtom::Pred(_, args) => args.iter().for_each(push),
            IAtom::Eq(l, r) | IAtom::Neq(l, r) => {
                push(l);
                push(r);
            }
        }
    }

    fn negate(&self) -> IAtom {
        match self {
            IAtom::Eq(l, r) => IAtom::Neq(l.clone(), r.clone()),
            IAtom::Neq(l, r) => IAtom::Eq(l.clone(), r.clone()),
            IAtom::Pred(..) => unreachable!("predicate literals carry their own sign"),
        }
    }
}

impl fmt::Display for IAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IAtom::Pred(p, args) if args.is_empty() => write!(f, "{p}"),
            IAtom::Pred(p, args) => write!(f, "{p}({})", join(args, ",")),
            IAtom::Eq(l, r) => write!(f, "{l} = {r}"),
            IAtom::Neq(l, r) => write!(f, "{l} != {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ILit {
    pub atom: IAtom,
    pub negated: bool,
}

impl fmt::Display for ILit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not {}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// An existentially quantified conjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IGroup {
    pub exists: Vec<String>,
    pub lits: Vec<ILit>,
}

impl IGroup {
    fn plain(lits: Vec<ILit>) -> IGroup {
        IGroup { exists: Vec::new(), lits }
    }

    fn free_vars_into(&self, out: &mut Vec<String>) {
        let mut inner = Vec::new();
        for lit in &self.lits {
            lit.atom.vars_into(&mut inner);
        }
        for v in inner {
            if !self.exists.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
}

impl fmt::Display for IGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exists.is_empty() {
            write!(f, "{}", join(&self.lits, ", "))
        } else {
            write!(f, "exists {} ({})", self.exists.join(" "), join(&self.lits, ", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IBody {
    /// A positive quantified conjunction; its witnesses can be lifted to
    /// rule-level variables.
    Pos(IGroup),
    /// A negated quantified disjunction of conjunctions (usually a
    /// singleton; enumerated choices produce one group per element).
    Neg(Vec<IGroup>),
}

impl fmt::Display for IBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IBody::Pos(g) => write!(f, "{g}"),
            IBody::Neg(gs)
                if gs.len() == 1
                    && gs[0].exists.is_empty()
                    && gs[0].lits.len() == 1
                    && !gs[0].lits[0].negated
                    && matches!(gs[0].lits[0].atom, IAtom::Pred(..)) =>
            {
                write!(f, "not {}", gs[0])
            }
            IBody::Neg(gs) if gs.len() == 1 => write!(f, "not ({})", gs[0]),
            IBody::Neg(gs) => {
                let parts: Vec<String> = gs.iter().map(|g| format!("({g})")).collect();
                write!(f, "not ({})", parts.join(" | "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IHead {
    Falsum,
    Atom(IAtom),
    /// `A | not A` — the picking head of a translated choice rule.
    Choice(IAtom),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IRule {
    pub head: IHead,
    pub body: Vec<IBody>,
}

impl fmt::Display for IRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match &self.head {
            IHead::Falsum => String::new(),
            IHead::Atom(a) => a.to_string(),
            IHead::Choice(a) => format!("{a} | not {a}"),
        };
        match (head.is_empty(), self.body.is_empty()) {
            (false, true) => write!(f, "{head}."),
            (false, false) => write!(f, "{head} :- {}.", join(&self.body, ", ")),
            (true, _) => write!(f, ":- {}.", join(&self.body, ", ")),
        }
    }
}

fn lp_term(t: &LpTerm) -> Term {
    match t {
        LpTerm::Var(v) => Term::Var(v.clone()),
        LpTerm::Const(c) => Term::Const(c.clone()),
    }
}

fn iatom_formula(a: &IAtom) -> Formula {
    match a {
        IAtom::Pred(p, args) => Formula::Atom(Atom::Pred(p.clone(), args.iter().map(lp_term).collect())),
        IAtom::Eq(l, r) => Formula::Atom(Atom::Eq(lp_term(l), lp_term(r))),
        IAtom::Neq(l, r) => Formula::not(Formula::Atom(Atom::Eq(lp_term(l), lp_term(r)))),
    }
}

fn igroup_formula(g: &IGroup) -> Formula {
    let mut body = Formula::conj(
        g.lits
            .iter()
            .map(|l| {
                let a = iatom_formula(&l.atom);
                if l.negated {
                    Formula::not(a)
                } else {
                    a
                }
            })
            .collect(),
    );
    for v in g.exists.iter().rev() {
        body = Formula::Exists(v.clone(), Box::new(body));
    }
    body
}

/// The intermediate rule as a core formula, for semantic cross-checks.
pub fn irule_formula(r: &IRule) -> Formula {
    let body = Formula::conj(
        r.body
            .iter()
            .map(|b| match b {
                IBody::Pos(g) => igroup_formula(g),
                IBody::Neg(gs) => Formula::not(Formula::disj(gs.iter().map(igroup_formula).collect())),
            })
            .collect(),
    );
    let head = match &r.head {
        IHead::Falsum => Formula::Falsum,
        IHead::Atom(a) => iatom_formula(a),
        IHead::Choice(a) => {
            let phi = iatom_formula(a);
            Formula::or(phi.clone(), Formula::not(phi))
        }
    };
    if r.body.is_empty() {
        head
    } else {
        Formula::implies(body, head)
    }
}

// ---------------------------------------------------------------------------
// Step 1: the translation proper
// ---------------------------------------------------------------------------

/// The image of one term: an LP-term plus the `holds` atoms and fresh
/// variables backing its evaluable subterms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermTranslation {
    pub lp_term: LpTerm,
    pub phi: Vec<IAtom>,
    pub fresh: Vec<String>,
}

/// Translate a term: LP-terms map to themselves; an application `f(t̄)` maps
/// to a fresh variable `X` constrained by `holds_f(t̄*, X)`.
pub fn translate_term(t: &Term, sig: &Signature, ctx: &mut TranslationContext) -> Result<TermTranslation, TranslateError> {
    match t {
        Term::Var(v) => Ok(TermTranslation { lp_term: LpTerm::Var(v.clone()), phi: Vec::new(), fresh: Vec::new() }),
        Term::Const(c) => Ok(TermTranslation { lp_term: LpTerm::Const(c.clone()), phi: Vec::new(), fresh: Vec::new() }),
        Term::App(f, args) => {
            let (holds, _) = sig.holds_name(f, args.len())?;
            let mut phi = Vec::new();
            let mut fresh = Vec::new();
            let mut lp_args = Vec::with_capacity(args.len() + 1);
            for a in args {
                let sub = translate_term(a, sig, ctx)?;
                phi.extend(sub.phi);
                fresh.extend(sub.fresh);
                lp_args.push(sub.lp_term);
            }
            let x = ctx.fresh_var();
            lp_args.push(LpTerm::Var(x.clone()));
            phi.push(IAtom::Pred(holds, lp_args));
            fresh.push(x.clone());
            Ok(TermTranslation { lp_term: LpTerm::Var(x), phi, fresh })
        }
    }
}

fn phi_lits(phi: Vec<IAtom>) -> Vec<ILit> {
    phi.into_iter().map(|atom| ILit { atom, negated: false }).collect()
}

/// Translate a literal into a quantified group: the translated atom first,
/// then the `holds` atoms of its terms, under an ∃-block for the fresh
/// variables; a negative literal negates the whole group.
pub fn translate_literal(
    lit: &Literal,
    sig: &Signature,
    ctx: &mut TranslationContext,
) -> Result<IBody, TranslateError> {
    let (main, phi, fresh) = match &lit.atom {
        Atom::Pred(p, args) => {
            let mut phi = Vec::new();
            let mut fresh = Vec::new();
            let mut lp_args = Vec::with_capacity(args.len());
            for a in args {
                let sub = translate_term(a, sig, ctx)?;
                phi.extend(sub.phi);
                fresh.extend(sub.fresh);
                lp_args.push(sub.lp_term);
            }
            (IAtom::Pred(p.clone(), lp_args), phi, fresh)
        }
        Atom::Eq(l, r) | Atom::Apart(l, r) => {
            let lt = translate_term(l, sig, ctx)?;
            let rt = translate_term(r, sig, ctx)?;
            let mut phi = lt.phi;
            phi.extend(rt.phi);
            let mut fresh = lt.fresh;
            fresh.extend(rt.fresh);
            let atom = if matches!(lit.atom, Atom::Apart(..)) {
                IAtom::Neq(lt.lp_term, rt.lp_term)
            } else {
                IAtom::Eq(lt.lp_term, rt.lp_term)
            };
            (atom, phi, fresh)
        }
    };
    let mut lits = vec![ILit { atom: main, negated: false }];
    lits.extend(phi_lits(phi));
    let group = IGroup { exists: fresh, lits };
    if lit.negated {
        Ok(IBody::Neg(vec![group]))
    } else {
        Ok(IBody::Pos(group))
    }
}

fn translate_body(body: &[Literal], sig: &Signature, ctx: &mut TranslationContext) -> Result<Vec<IBody>, TranslateError> {
    body.iter().map(|l| translate_literal(l, sig, ctx)).collect()
}

fn translate_tuple(
    args: &[Term],
    sig: &Signature,
    ctx: &mut TranslationContext,
) -> Result<(Vec<LpTerm>, Vec<IAtom>), TranslateError> {
    let mut lp_args = Vec::with_capacity(args.len());
    let mut phi = Vec::new();
    for a in args {
        let sub = translate_term(a, sig, ctx)?;
        phi.extend(sub.phi);
        lp_args.push(sub.lp_term);
    }
    Ok((lp_args, phi))
}

/// Merge translated condition literals into the matrix of the choice
/// constraint's negated ∃-block. Negated condition literals must be plain
/// (no evaluable terms): anything deeper leaves the supported fragment.
fn merge_condition(
    cond: &[Literal],
    sig: &Signature,
    ctx: &mut TranslationContext,
    exists: &mut Vec<String>,
    lits: &mut Vec<ILit>,
) -> Result<(), TranslateError> {
    for lit in cond {
        match translate_literal(lit, sig, ctx)? {
            IBody::Pos(g) => {
                exists.extend(g.exists);
                lits.extend(g.lits);
            }
            IBody::Neg(gs) => {
                let g = &gs[0];
                if g.exists.is_empty() && g.lits.len() == 1 && !g.lits[0].negated {
                    lits.push(match &g.lits[0].atom {
                        IAtom::Pred(p, args) => ILit { atom: IAtom::Pred(p.clone(), args.clone()), negated: true },
                        other => ILit { atom: other.negate(), negated: false },
                    });
                } else {
                    return Err(TranslateError::UnsupportedShape(
                        format!("negated literal '{lit}' with evaluable terms inside a choice condition"),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Translate one rule. Ordering follows the displayed theories: a choice
/// produces the picking rule with condition before body, then the
/// definedness constraint with the negated ∃-block first.
pub fn translate_rule(r: &FlpRule, sig: &Signature, ctx: &mut TranslationContext) -> Result<Vec<IRule>, TranslateError> {
    match &r.head {
        Head::Falsum => {
            let body = translate_body(&r.body, sig, ctx)?;
            Ok(vec![IRule { head: IHead::Falsum, body }])
        }
        Head::Pred(p, args) => {
            let (lp_args, phi) = translate_tuple(args, sig, ctx)?;
            let mut body = Vec::new();
            if !phi.is_empty() {
                body.push(IBody::Pos(IGroup::plain(phi_lits(phi))));
            }
            body.extend(translate_body(&r.body, sig, ctx)?);
            Ok(vec![IRule { head: IHead::Atom(IAtom::Pred(p.clone(), lp_args)), body }])
        }
        Head::Assign { func, args, value } => {
            let (holds, _) = sig.holds_name(func, args.len())?;
            let (mut lp_args, mut phi) = translate_tuple(args, sig, ctx)?;
            let vt = translate_term(value, sig, ctx)?;
            phi.extend(vt.phi);
            lp_args.push(vt.lp_term);
            let mut body = Vec::new();
            if !phi.is_empty() {
                body.push(IBody::Pos(IGroup::plain(phi_lits(phi))));
            }
            body.extend(translate_body(&r.body, sig, ctx)?);
            Ok(vec![IRule { head: IHead::Atom(IAtom::Pred(holds, lp_args)), body }])
        }
        Head::Choice { func, args, var, cond } => {
            let (holds, _) = sig.holds_name(func, args.len())?;
            let (lp_args, phi) = translate_tuple(args, sig, ctx)?;
            let mut head_args = lp_args.clone();
            head_args.push(LpTerm::Var(var.clone()));
            let holds_atom = IAtom::Pred(holds.clone(), head_args);

            // picking rule: condition, then Φ(t̄), then body
            let mut pick_body = translate_body(cond, sig, ctx)?;
            if !phi.is_empty() {
                pick_body.push(IBody::Pos(IGroup::plain(phi_lits(phi.clone()))));
            }
            pick_body.extend(translate_body(&r.body, sig, ctx)?);
            let pick = IRule { head: IHead::Choice(holds_atom.clone()), body: pick_body };

            // constraint: some condition witness must be picked
            let mut exists = vec![var.clone()];
            let mut lits = vec![ILit { atom: holds_atom, negated: false }];
            merge_condition(cond, sig, ctx, &mut exists, &mut lits)?;
            let mut cons_body = vec![IBody::Neg(vec![IGroup { exists, lits }])];
            if !phi.is_empty() {
                cons_body.push(IBody::Pos(IGroup::plain(phi_lits(phi))));
            }
            cons_body.extend(translate_body(&r.body, sig, ctx)?);
            let cons = IRule { head: IHead::Falsum, body: cons_body };
            Ok(vec![pick, cons])
        }
        Head::ChoiceEnum { func, args, values } => {
            let (holds, _) = sig.holds_name(func, args.len())?;
            let (lp_args, phi) = translate_tuple(args, sig, ctx)?;
            let mut out = Vec::new();
            // one picking rule per enumerated value
            for value in values {
                let vt = translate_term(value, sig, ctx)?;
                let mut head_args = lp_args.clone();
                head_args.push(vt.lp_term);
                let mut body = Vec::new();
                let mut all_phi = phi.clone();
                all_phi.extend(vt.phi);
                if !all_phi.is_empty() {
                    body.push(IBody::Pos(IGroup::plain(phi_lits(all_phi))));
                }
                body.extend(translate_body(&r.body, sig, ctx)?);
                out.push(IRule { head: IHead::Choice(IAtom::Pred(holds.clone(), head_args)), body });
            }
            // one constraint whose matrix disjoins the enumerated values
            let x = ctx.fresh_var();
            let mut head_args = lp_args.clone();
            head_args.push(LpTerm::Var(x.clone()));
            let holds_atom = IAtom::Pred(holds, head_args);
            let mut groups = Vec::new();
            for value in values {
                let vt = translate_term(value, sig, ctx)?;
                let mut exists = vec![x.clone()];
                exists.extend(vt.fresh);
                let mut lits = vec![
                    ILit { atom: holds_atom.clone(), negated: false },
                    ILit { atom: IAtom::Eq(LpTerm::Var(x.clone()), vt.lp_term), negated: false },
                ];
                lits.extend(phi_lits(vt.phi));
                groups.push(IGroup { exists, lits });
            }
            let mut cons_body = vec![IBody::Neg(groups)];
            if !phi.is_empty() {
                cons_body.push(IBody::Pos(IGroup::plain(phi_lits(phi))));
            }
            cons_body.extend(translate_body(&r.body, sig, ctx)?);
            out.push(IRule { head: IHead::Falsum, body: cons_body });
            Ok(out)
        }
    }
}

/// One functionality constraint per evaluable `f/n`:
/// `⊥ ← holds_f(X̄,V) ∧ holds_f(X̄,W) ∧ ¬(V=W)`.
pub fn uniqueness_constraints(sig: &Signature) -> Result<Vec<IRule>, TranslateError> {
    let mut out = Vec::new();
    for (f, n) in sig.evaluables() {
        let (holds, _) = sig.holds_name(f, *n)?;
        let args: Vec<LpTerm> = (1..=*n).map(|i| LpTerm::Var(format!("X{i}"))).collect();
        let mut a1 = args.clone();
        a1.push(LpTerm::Var("V".into()));
        let mut a2 = args;
        a2.push(LpTerm::Var("W".into()));
        out.push(IRule {
            head: IHead::Falsum,
            body: vec![
                IBody::Pos(IGroup::plain(vec![
                    ILit { atom: IAtom::Pred(holds.clone(), a1), negated: false },
                    ILit { atom: IAtom::Pred(holds, a2), negated: false },
                ])),
                IBody::Neg(vec![IGroup::plain(vec![ILit {
                    atom: IAtom::Eq(LpTerm::Var("V".into()), LpTerm::Var("W".into())),
                    negated: false,
                }])]),
            ],
        });
    }
    Ok(out)
}

/// The full intermediate theory: every rule's translation plus the
/// functionality constraints.
pub fn translate_program_intermediate(p: &FlpProgram) -> Result<Vec<IRule>, TranslateError> {
    let mut ctx = TranslationContext::new();
    let mut out = Vec::new();
    for r in &p.rules {
        out.extend(translate_rule(r, &p.signature, &mut ctx)?);
    }
    out.extend(uniqueness_constraints(&p.signature)?);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Step 2: normalization to plain rules
// ---------------------------------------------------------------------------

fn ilit_to_lp(lit: &ILit) -> LpLiteral {
    match (&lit.atom, lit.negated) {
        (IAtom::Pred(p, args), neg) => LpLiteral::Pred { name: p.clone(), args: args.clone(), negated: neg },
        (IAtom::Eq(l, r), false) => LpLiteral::Eq(l.clone(), r.clone()),
        (IAtom::Eq(l, r), true) => LpLiteral::Neq(l.clone(), r.clone()),
        (IAtom::Neq(l, r), false) => LpLiteral::Neq(l.clone(), r.clone()),
        (IAtom::Neq(l, r), true) => LpLiteral::Eq(l.clone(), r.clone()),
    }
}

fn subst_rule(rule: &mut LpRule, var: &str, with: &LpTerm) {
    if let LpHead::Pred(_, args) = &mut rule.head {
        for a in args.iter_mut() {
            *a = a.subst(var, with);
        }
    }
    for lit in rule.body.iter_mut() {
        *lit = lit.subst(var, with);
    }
}

/// Exhaust the equality rewrite on one rule: a body equality with a variable
/// side substitutes that variable away; ground (dis)equalities are evaluated.
/// Returns `None` when a falsified literal discards the rule.
fn rewrite_equalities(mut rule: LpRule) -> Option<LpRule> {
    loop {
        let mut action: Option<(usize, Option<(String, LpTerm)>)> = None;
        for (i, lit) in rule.body.iter().enumerate() {
            match lit {
                LpLiteral::Eq(l, r) => {
                    let sub = match (l, r) {
                        (LpTerm::Const(a), LpTerm::Const(b)) => {
                            if a == b {
                                None
                            } else {
                                return None;
                            }
                        }
                        // substitute the right-hand variable by the left side
                        (t, LpTerm::Var(v)) => Some((v.clone(), t.clone())),
                        (LpTerm::Var(v), t) => Some((v.clone(), t.clone())),
                    };
                    action = Some((i, sub));
                    break;
                }
                LpLiteral::Neq(LpTerm::Const(a), LpTerm::Const(b)) => {
                    if a == b {
                        return None;
                    }
                    action = Some((i, None));
                    break;
                }
                LpLiteral::Neq(l, r) if l == r => return None,
                _ => {}
            }
        }
        match action {
            None => break,
            Some((i, sub)) => {
                rule.body.remove(i);
                if let Some((var, with)) = sub {
                    subst_rule(&mut rule, &var, &with);
                }
            }
        }
    }
    // drop exact duplicate body literals, keeping first occurrences
    let mut seen = Vec::new();
    rule.body.retain(|lit| {
        if seen.contains(lit) {
            false
        } else {
            seen.push(lit.clone());
            true
        }
    });
    Some(rule)
}

fn group_free_vars(groups: &[IGroup]) -> Vec<String> {
    let mut out = Vec::new();
    for g in groups {
        g.free_vars_into(&mut out);
    }
    out
}

/// Normalize the intermediate theory into a plain program: disjunctive
/// choice heads become a complementary pair of rules over a fresh auxiliary
/// atom, negated ∃-blocks become a negated auxiliary atom with defining
/// rules, positive ∃-witnesses are lifted to rule level, and the equality
/// rewrite is exhausted on every emitted rule.
pub fn normalize_to_lp(theory: &[IRule], ctx: &mut TranslationContext) -> Result<LpProgram, TranslateError> {
    let mut rules = Vec::new();
    for irule in theory {
        // the positive context: every positive literal of the body, used to
        // relativize the defining rules of auxiliary predicates
        let mut positive: Vec<LpLiteral> = Vec::new();
        for b in &irule.body {
            if let IBody::Pos(g) = b {
                for lit in &g.lits {
                    if !lit.negated {
                        positive.push(ilit_to_lp(lit));
                    }
                }
            }
        }

        let mut body: Vec<LpLiteral> = Vec::new();
        let mut defining: Vec<LpRule> = Vec::new();
        for b in &irule.body {
            match b {
                IBody::Pos(g) => {
                    // lifting: the ∃-witnesses are globally fresh, so they
                    // become ordinary rule variables
                    body.extend(g.lits.iter().map(ilit_to_lp));
                }
                IBody::Neg(gs) => {
                    let only = gs.len() == 1;
                    if only && gs[0].exists.is_empty() && gs[0].lits.len() == 1 && !gs[0].lits[0].negated {
                        // plain negated atom: no auxiliary predicate needed
                        let lit = &gs[0].lits[0];
                        body.push(match &lit.atom {
                            IAtom::Pred(p, args) => LpLiteral::Pred { name: p.clone(), args: args.clone(), negated: true },
                            other => ilit_to_lp(&ILit { atom: other.negate(), negated: false }),
                        });
                        continue;
                    }
                    let aux = ctx.fresh_aux();
                    let aux_args: Vec<LpTerm> = group_free_vars(gs).into_iter().map(LpTerm::Var).collect();
                    for g in gs {
                        let mut def_body: Vec<LpLiteral> = g.lits.iter().map(ilit_to_lp).collect();
                        def_body.extend(positive.iter().cloned());
                        defining.push(LpRule { head: LpHead::Pred(aux.clone(), aux_args.clone()), body: def_body });
                    }
                    body.push(LpLiteral::Pred { name: aux, args: aux_args, negated: true });
                }
            }
        }

        let emitted: Vec<LpRule> = match &irule.head {
            IHead::Falsum => {
                let mut out = defining;
                out.push(LpRule { head: LpHead::Falsum, body });
                out
            }
            IHead::Atom(IAtom::Pred(p, args)) => {
                let mut out = defining;
                out.push(LpRule { head: LpHead::Pred(p.clone(), args.clone()), body });
                out
            }
            IHead::Atom(other) => {
                return Err(TranslateError::UnsupportedShape(format!("non-predicate head '{other}'")));
            }
            IHead::Choice(IAtom::Pred(p, args)) => {
                let mut aux_vars: Vec<String> = Vec::new();
                IAtom::Pred(p.clone(), args.clone()).vars_into(&mut aux_vars);
                for lit in &body {
                    let mut vs = BTreeSet::new();
                    lit.vars_into(&mut vs);
                    for v in vs {
                        if !aux_vars.contains(&v) {
                            aux_vars.push(v);
                        }
                    }
                }
                let aux = ctx.fresh_aux();
                let aux_args: Vec<LpTerm> = aux_vars.into_iter().map(LpTerm::Var).collect();
                let mut pick_body = vec![LpLiteral::Pred { name: aux.clone(), args: aux_args.clone(), negated: true }];
                pick_body.extend(body.iter().cloned());
                let mut aux_body = vec![LpLiteral::Pred { name: p.clone(), args: args.clone(), negated: true }];
                aux_body.extend(body);
                let mut out = defining;
                out.push(LpRule { head: LpHead::Pred(p.clone(), args.clone()), body: pick_body });
                out.push(LpRule { head: LpHead::Pred(aux, aux_args), body: aux_body });
                out
            }
            IHead::Choice(other) => {
                return Err(TranslateError::UnsupportedShape(format!("non-predicate choice head '{other}'")));
            }
        };
        for rule in emitted {
            if let Some(r) = rewrite_equalities(rule) {
                rules.push(r);
            }
        }
    }
    Ok(LpProgram { rules })
}

/// End-to-end translation of a program to a plain function-free program.
pub fn translate_program(p: &FlpProgram) -> Result<LpProgram, TranslateError> {
    let mut ctx = TranslationContext::new();
    let mut theory = Vec::new();
    for r in &p.rules {
        theory.extend(translate_rule(r, &p.signature, &mut ctx)?);
    }
    theory.extend(uniqueness_constraints(&p.signature)?);
    normalize_to_lp(&theory, &mut ctx)
}
