//! Shared abstract syntax: signatures, terms, atoms, literals, rules on the
//! functional side, core formulas, and the function-free rule format emitted
//! at the end of the pipeline.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Source position attached to rules and diagnostics (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub const HOLDS_PREFIX: &str = "holds_";
pub const AUX_PREFIX: &str = "aux";
pub const FRESH_VAR_PREFIX: &str = "V_";

/// True for symbol or variable names the toolchain reserves for itself.
pub fn is_reserved_name(name: &str) -> bool {
    name.starts_with(HOLDS_PREFIX) || name.starts_with(AUX_PREFIX) || name.starts_with(FRESH_VAR_PREFIX)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol {name}/{arity} declared in more than one role")]
    Overlap { name: String, arity: usize },
    #[error("signature declares no Herbrand constants")]
    NoConstructors,
    #[error("predicate {name}/{arity} collides with the reserved translation of {func}")]
    HoldsCollision { name: String, arity: usize, func: String },
}

/// Partition of the symbol space: Herbrand constants, evaluable functions and
/// predicates, pairwise disjoint as name/arity pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    constructors: BTreeSet<String>,
    evaluables: BTreeSet<(String, usize)>,
    predicates: BTreeSet<(String, usize)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_constructor(&mut self, name: &str) -> Result<(), SignatureError> {
        if self.evaluables.contains(&(name.to_string(), 0)) || self.predicates.contains(&(name.to_string(), 0)) {
            return Err(SignatureError::Overlap { name: name.to_string(), arity: 0 });
        }
        self.constructors.insert(name.to_string());
        Ok(())
    }

    pub fn add_evaluable(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if (arity == 0 && self.constructors.contains(name))
            || self.predicates.contains(&(name.to_string(), arity))
        {
            return Err(SignatureError::Overlap { name: name.to_string(), arity });
        }
        self.evaluables.insert((name.to_string(), arity));
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if (arity == 0 && self.constructors.contains(name))
            || self.evaluables.contains(&(name.to_string(), arity))
        {
            return Err(SignatureError::Overlap { name: name.to_string(), arity });
        }
        self.predicates.insert((name.to_string(), arity));
        Ok(())
    }

    /// Final consistency check: violating input is rejected, never repaired.
    pub fn validate(&self) -> Result<(), SignatureError> {
        if self.constructors.is_empty() {
            return Err(SignatureError::NoConstructors);
        }
        for (name, arity) in &self.evaluables {
            if (*arity == 0 && self.constructors.contains(name))
                || self.predicates.contains(&(name.clone(), *arity))
            {
                return Err(SignatureError::Overlap { name: name.clone(), arity: *arity });
            }
        }
        for (name, arity) in &self.predicates {
            if *arity == 0 && self.constructors.contains(name) {
                return Err(SignatureError::Overlap { name: name.clone(), arity: *arity });
            }
        }
        Ok(())
    }

    pub fn constructors(&self) -> &BTreeSet<String> {
        &self.constructors
    }

    pub fn evaluables(&self) -> &BTreeSet<(String, usize)> {
        &self.evaluables
    }

    pub fn predicates(&self) -> &BTreeSet<(String, usize)> {
        &self.predicates
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        self.constructors.contains(name)
    }

    pub fn is_evaluable(&self, name: &str, arity: usize) -> bool {
        self.evaluables.contains(&(name.to_string(), arity))
    }

    pub fn is_predicate(&self, name: &str, arity: usize) -> bool {
        self.predicates.contains(&(name.to_string(), arity))
    }

    /// Name of the relational image of evaluable `f/n`: `holds_f/(n+1)`.
    /// Rejects signatures where the user already took that name.
    pub fn holds_name(&self, func: &str, arity: usize) -> Result<(String, usize), SignatureError> {
        let name = format!("{HOLDS_PREFIX}{func}");
        if self.predicates.contains(&(name.clone(), arity + 1)) {
            return Err(SignatureError::HoldsCollision {
                name,
                arity: arity + 1,
                func: format!("{func}/{arity}"),
            });
        }
        Ok((name, arity + 1))
    }
}

/// Terms of the functional language. Constructor applications of arity > 0 do
/// not occur; `App` is always an evaluable function application.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(name.to_string(), args)
    }

    /// LP-terms are those without evaluable function symbols.
    pub fn is_lp(&self) -> bool {
        !matches!(self, Term::App(..))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
        }
    }

    pub fn subst(&self, var: &str, with: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => with.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(var, with)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(name, args) => {
                if args.is_empty() {
                    write!(f, "{name}")
                } else {
                    write!(f, "{name}({})", join(args, ","))
                }
            }
        }
    }
}

pub(crate) fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(sep)
}

/// All subterms of `t`, including `t` itself, in depth-first pre-order with
/// duplicates removed.
pub fn subterms(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    fn walk(t: &Term, out: &mut Vec<Term>) {
        if !out.contains(t) {
            out.push(t.clone());
        }
        if let Term::App(_, args) = t {
            for a in args {
                walk(a, out);
            }
        }
    }
    walk(t, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    /// Apartness: both sides defined and distinct.
    Apart(Term, Term),
}

impl Atom {
    pub fn pred(name: &str, args: Vec<Term>) -> Self {
        Atom::Pred(name.to_string(), args)
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom::Pred(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
            Atom::Eq(l, r) | Atom::Apart(l, r) => {
                l.vars_into(out);
                r.vars_into(out);
            }
        }
    }

    pub fn subst(&self, var: &str, with: &Term) -> Atom {
        match self {
            Atom::Pred(p, args) => Atom::Pred(p.clone(), args.iter().map(|a| a.subst(var, with)).collect()),
            Atom::Eq(l, r) => Atom::Eq(l.subst(var, with), r.subst(var, with)),
            Atom::Apart(l, r) => Atom::Apart(l.subst(var, with), r.subst(var, with)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pred(p, args) => {
                if args.is_empty() {
                    write!(f, "{p}")
                } else {
                    write!(f, "{p}({})", join(args, ","))
                }
            }
            Atom::Eq(l, r) => write!(f, "{l} = {r}"),
            Atom::Apart(l, r) => write!(f, "{l} # {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, negated: true }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        self.atom.vars_into(out);
    }

    pub fn subst(&self, var: &str, with: &Term) -> Literal {
        Literal { atom: self.atom.subst(var, with), negated: self.negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            if let Atom::Eq(l, r) = &self.atom {
                return write!(f, "{l} != {r}");
            }
            write!(f, "not {}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// Head forms of a functional rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Head {
    Pred(String, Vec<Term>),
    Falsum,
    Assign { func: String, args: Vec<Term>, value: Term },
    Choice { func: String, args: Vec<Term>, var: String, cond: Vec<Literal> },
    ChoiceEnum { func: String, args: Vec<Term>, values: Vec<Term> },
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Pred(p, args) => write!(f, "{}", Atom::Pred(p.clone(), args.clone())),
            Head::Falsum => write!(f, "#false"),
            Head::Assign { func, args, value } => {
                write!(f, "{} := {value}", Term::App(func.clone(), args.clone()))
            }
            Head::Choice { func, args, var, cond } => {
                write!(f, "{} in {{ {var} | {} }}", Term::App(func.clone(), args.clone()), join(cond, ", "))
            }
            Head::ChoiceEnum { func, args, values } => {
                write!(f, "{} in {{ {} }}", Term::App(func.clone(), args.clone()), join(values, ", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlpRule {
    pub head: Head,
    pub body: Vec<Literal>,
    pub span: Option<Span>,
}

impl FlpRule {
    pub fn new(head: Head, body: Vec<Literal>) -> Self {
        FlpRule { head, body, span: None }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
            && matches!(&self.head, Head::Pred(_, args) if args.iter().all(|t| t.is_ground() && t.is_lp()))
    }
}

impl fmt::Display for FlpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.head, self.body.is_empty()) {
            (Head::Falsum, _) => write!(f, ":- {}.", join(&self.body, ", ")),
            (h, true) => write!(f, "{h}."),
            (h, false) => write!(f, "{h} :- {}.", join(&self.body, ", ")),
        }
    }
}

/// Free variables of a rule. The choice variable is bound by its head.
pub fn rule_free_vars(rule: &FlpRule) -> BTreeSet<String> {
    let mut vars = BTreeSet::new();
    for lit in &rule.body {
        lit.vars_into(&mut vars);
    }
    match &rule.head {
        Head::Pred(_, args) => {
            for a in args {
                a.vars_into(&mut vars);
            }
        }
        Head::Falsum => {}
        Head::Assign { args, value, .. } => {
            for a in args {
                a.vars_into(&mut vars);
            }
            value.vars_into(&mut vars);
        }
        Head::Choice { args, var, cond, .. } => {
            for a in args {
                a.vars_into(&mut vars);
            }
            let mut cvars = BTreeSet::new();
            for lit in cond {
                lit.vars_into(&mut cvars);
            }
            cvars.remove(var);
            vars.extend(cvars);
        }
        Head::ChoiceEnum { args, values, .. } => {
            for a in args.iter().chain(values) {
                a.vars_into(&mut vars);
            }
        }
    }
    vars
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlpProgram {
    pub signature: Signature,
    pub rules: Vec<FlpRule>,
}

impl fmt::Display for FlpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 0-ary evaluable functions are indistinguishable from constants in
        // rule text, so their declarations must be printed explicitly
        for (name, arity) in self.signature.evaluables() {
            if *arity == 0 {
                writeln!(f, "#evaluable {name}.")?;
            }
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// Core formulas plus the derived nodes that exist only before expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Falsum,
    Verum,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    /// Derived: existence `E t`, i.e. `t = t`.
    Exist(Term),
    /// Derived: Scott equivalence `t1 == t2`.
    Equiv(Term, Term),
}

impl Formula {
    pub fn not(phi: Formula) -> Formula {
        Formula::Implies(Box::new(phi), Box::new(Formula::Falsum))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn conj(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::Verum,
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, Formula::and)
            }
        }
    }

    pub fn disj(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::Falsum,
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, Formula::or)
            }
        }
    }

    pub fn subst(&self, var: &str, with: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.subst(var, with)),
            Formula::Falsum | Formula::Verum => self.clone(),
            Formula::And(l, r) => Formula::and(l.subst(var, with), r.subst(var, with)),
            Formula::Or(l, r) => Formula::or(l.subst(var, with), r.subst(var, with)),
            Formula::Implies(l, r) => Formula::implies(l.subst(var, with), r.subst(var, with)),
            Formula::Forall(v, _) if v == var => self.clone(),
            Formula::Forall(v, body) => Formula::Forall(v.clone(), Box::new(body.subst(var, with))),
            Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Exists(v, body) => Formula::Exists(v.clone(), Box::new(body.subst(var, with))),
            Formula::Exist(t) => Formula::Exist(t.subst(var, with)),
            Formula::Equiv(l, r) => Formula::Equiv(l.subst(var, with), r.subst(var, with)),
        }
    }

    /// True when no derived operator remains.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(Atom::Apart(..)) | Formula::Exist(_) | Formula::Equiv(..) => false,
            Formula::Atom(_) | Formula::Falsum | Formula::Verum => true,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => l.is_core() && r.is_core(),
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.is_core(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Falsum => write!(f, "#false"),
            Formula::Verum => write!(f, "#true"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Implies(l, r) => {
                if **r == Formula::Falsum {
                    write!(f, "not {l}")
                } else {
                    write!(f, "({l} -> {r})")
                }
            }
            Formula::Forall(v, b) => write!(f, "forall {v} {b}"),
            Formula::Exists(v, b) => write!(f, "exists {v} {b}"),
            Formula::Exist(t) => write!(f, "E {t}"),
            Formula::Equiv(l, r) => write!(f, "{l} == {r}"),
        }
    }
}

/// Free variables of a formula (binders: quantifiers).
pub fn formula_free_vars(phi: &Formula) -> BTreeSet<String> {
    match phi {
        Formula::Atom(a) => {
            let mut out = BTreeSet::new();
            a.vars_into(&mut out);
            out
        }
        Formula::Falsum | Formula::Verum => BTreeSet::new(),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            let mut out = formula_free_vars(l);
            out.extend(formula_free_vars(r));
            out
        }
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            let mut out = formula_free_vars(b);
            out.remove(v);
            out
        }
        Formula::Exist(t) => {
            let mut out = BTreeSet::new();
            t.vars_into(&mut out);
            out
        }
        Formula::Equiv(l, r) => {
            let mut out = BTreeSet::new();
            l.vars_into(&mut out);
            r.vars_into(&mut out);
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Function-free rule format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LpTerm {
    Var(String),
    Const(String),
}

impl LpTerm {
    pub fn subst(&self, var: &str, with: &LpTerm) -> LpTerm {
        match self {
            LpTerm::Var(v) if v == var => with.clone(),
            _ => self.clone(),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            LpTerm::Var(v) => Some(v),
            LpTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for LpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpTerm::Var(v) => write!(f, "{v}"),
            LpTerm::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LpLiteral {
    Pred { name: String, args: Vec<LpTerm>, negated: bool },
    /// Built-in syntactic equality, evaluated away at grounding.
    Eq(LpTerm, LpTerm),
    /// Built-in syntactic disequality.
    Neq(LpTerm, LpTerm),
}

impl LpLiteral {
    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            LpLiteral::Pred { args, .. } => {
                for a in args {
                    if let LpTerm::Var(v) = a {
                        out.insert(v.clone());
                    }
                }
            }
            LpLiteral::Eq(l, r) | LpLiteral::Neq(l, r) => {
                for t in [l, r] {
                    if let LpTerm::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
        }
    }

    pub fn subst(&self, var: &str, with: &LpTerm) -> LpLiteral {
        match self {
            LpLiteral::Pred { name, args, negated } => LpLiteral::Pred {
                name: name.clone(),
                args: args.iter().map(|a| a.subst(var, with)).collect(),
                negated: *negated,
            },
            LpLiteral::Eq(l, r) => LpLiteral::Eq(l.subst(var, with), r.subst(var, with)),
            LpLiteral::Neq(l, r) => LpLiteral::Neq(l.subst(var, with), r.subst(var, with)),
        }
    }
}

impl fmt::Display for LpLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpLiteral::Pred { name, args, negated } => {
                if *negated {
                    write!(f, "not ")?;
                }
                if args.is_empty() {
                    write!(f, "{name}")
                } else {
                    write!(f, "{name}({})", join(args, ","))
                }
            }
            LpLiteral::Eq(l, r) => write!(f, "{l} = {r}"),
            LpLiteral::Neq(l, r) => write!(f, "{l} != {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LpHead {
    Pred(String, Vec<LpTerm>),
    Falsum,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LpRule {
    pub head: LpHead,
    pub body: Vec<LpLiteral>,
}

impl LpRule {
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let LpHead::Pred(_, args) = &self.head {
            for a in args {
                if let LpTerm::Var(v) = a {
                    out.insert(v.clone());
                }
            }
        }
        for lit in &self.body {
            lit.vars_into(&mut out);
        }
        out
    }
}

impl fmt::Display for LpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match &self.head {
            LpHead::Pred(name, args) if args.is_empty() => name.clone(),
            LpHead::Pred(name, args) => format!("{name}({})", join(args, ",")),
            LpHead::Falsum => String::new(),
        };
        match (head.is_empty(), self.body.is_empty()) {
            (false, true) => write!(f, "{head}."),
            (false, false) => write!(f, "{head} :- {}.", join(&self.body, ", ")),
            (true, _) => write!(f, ":- {}.", join(&self.body, ", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpProgram {
    pub rules: Vec<LpRule>,
}

impl fmt::Display for LpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}
