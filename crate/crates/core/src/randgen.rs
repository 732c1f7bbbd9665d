//! Seeded random generation of small safe programs, used by the randomized
//! self-tests and the `compare --random` subcommand. Construction aims for
//! safe rules directly (variables are introduced by positive body atoms) and
//! a safety check plus a search-size bound reject the rare remainder.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ast::{Atom, FlpProgram, FlpRule, Head, Literal, Signature, Term};
use crate::safety::check_flp_rule;

#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Herbrand constants to draw from (at most this many).
    pub max_consts: usize,
    /// Evaluable function symbols (at most this many; at most one unary).
    pub max_funcs: usize,
    /// Rules per program (at most this many, at least one fact).
    pub max_rules: usize,
    /// Bound on the model-search space of the generated program.
    pub max_states: u128,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_consts: 3, max_funcs: 2, max_rules: 4, max_states: 1 << 16 }
    }
}

const CONST_POOL: [&str; 3] = ["a", "b", "c"];
const PRED_POOL: [(&str, usize); 2] = [("p", 1), ("q", 1)];
const FUNC_POOL: [(&str, usize); 2] = [("f", 0), ("g", 1)];

struct Draft {
    consts: Vec<String>,
    funcs: Vec<(String, usize)>,
}

impl Draft {
    /// A constant or a variable already restricted by the positive body.
    fn ground_or_restricted(&self, rng: &mut ChaCha8Rng, restricted: &[String]) -> Term {
        if !restricted.is_empty() && rng.random_bool(0.5) {
            Term::Var(restricted[rng.random_range(0..restricted.len())].clone())
        } else {
            Term::Const(self.consts[rng.random_range(0..self.consts.len())].clone())
        }
    }

    /// A term usable in heads: ground/restricted, or an application thereof.
    fn head_term(&self, rng: &mut ChaCha8Rng, restricted: &[String]) -> Term {
        if !self.funcs.is_empty() && rng.random_bool(0.3) {
            let (f, n) = &self.funcs[rng.random_range(0..self.funcs.len())];
            let args = (0..*n).map(|_| self.ground_or_restricted(rng, restricted)).collect();
            Term::App(f.clone(), args)
        } else {
            self.ground_or_restricted(rng, restricted)
        }
    }
}

fn random_body(draft: &Draft, rng: &mut ChaCha8Rng, restricted: &mut Vec<String>) -> Vec<Literal> {
    let mut body = Vec::new();
    let positives = rng.random_range(0..=2usize);
    for i in 0..positives {
        let (p, n) = PRED_POOL[rng.random_range(0..PRED_POOL.len())];
        let args: Vec<Term> = (0..n)
            .map(|_| {
                if rng.random_bool(0.6) {
                    let v = if i == 0 { "X" } else { "Y" };
                    if !restricted.contains(&v.to_string()) {
                        restricted.push(v.to_string());
                    }
                    Term::var(v)
                } else {
                    Term::Const(draft.consts[rng.random_range(0..draft.consts.len())].clone())
                }
            })
            .collect();
        body.push(Literal::pos(Atom::Pred(p.to_string(), args)));
    }
    // optionally one extra literal over already-restricted terms
    if rng.random_bool(0.4) {
        let extra = match rng.random_range(0..3u8) {
            0 => {
                let (p, n) = PRED_POOL[rng.random_range(0..PRED_POOL.len())];
                let args = (0..n).map(|_| draft.ground_or_restricted(rng, restricted)).collect();
                Literal::neg(Atom::Pred(p.to_string(), args))
            }
            1 => {
                let l = draft.head_term(rng, restricted);
                let r = draft.ground_or_restricted(rng, restricted);
                Literal { atom: Atom::Eq(l, r), negated: rng.random_bool(0.3) }
            }
            _ => {
                let l = draft.head_term(rng, restricted);
                let r = draft.ground_or_restricted(rng, restricted);
                Literal::pos(Atom::Apart(l, r))
            }
        };
        body.push(extra);
    }
    body
}

fn random_rule(draft: &Draft, rng: &mut ChaCha8Rng) -> FlpRule {
    let mut restricted = Vec::new();
    let body = random_body(draft, rng, &mut restricted);
    let shape = rng.random_range(0..10u8);
    let head = match shape {
        // predicate head (facts arise when the body rolls empty)
        0..=3 => {
            let (p, n) = PRED_POOL[rng.random_range(0..PRED_POOL.len())];
            let args = (0..n).map(|_| draft.head_term(rng, &restricted)).collect();
            Head::Pred(p.to_string(), args)
        }
        // assignment
        4..=6 if !draft.funcs.is_empty() => {
            let (f, n) = &draft.funcs[rng.random_range(0..draft.funcs.len())];
            let args = (0..*n).map(|_| draft.ground_or_restricted(rng, &restricted)).collect();
            let value = draft.ground_or_restricted(rng, &restricted);
            Head::Assign { func: f.clone(), args, value }
        }
        // choice with a single positive range condition
        7..=8 if !draft.funcs.is_empty() => {
            let (f, n) = &draft.funcs[rng.random_range(0..draft.funcs.len())];
            let args = (0..*n).map(|_| draft.ground_or_restricted(rng, &restricted)).collect();
            let (p, _) = PRED_POOL[rng.random_range(0..PRED_POOL.len())];
            Head::Choice {
                func: f.clone(),
                args,
                var: "V".to_string(),
                cond: vec![Literal::pos(Atom::Pred(p.to_string(), vec![Term::var("V")]))],
            }
        }
        _ => Head::Falsum,
    };
    if matches!(head, Head::Falsum) && body.is_empty() {
        // never emit the inconsistent empty constraint
        let c = draft.consts[rng.random_range(0..draft.consts.len())].clone();
        return FlpRule::new(Head::Pred("p".to_string(), vec![Term::Const(c)]), vec![]);
    }
    FlpRule::new(head, body)
}

/// Estimate of the candidate-state count the model search would visit,
/// mirroring its pruning: only head predicates and assigned functions vary.
fn search_size(p: &FlpProgram) -> u128 {
    let c0 = p.signature.constructors().len() as u128;
    let mut size: u128 = 1;
    let mut head_funcs = std::collections::BTreeSet::new();
    let mut head_preds = std::collections::BTreeSet::new();
    for r in &p.rules {
        match &r.head {
            Head::Assign { func, args, .. }
            | Head::Choice { func, args, .. }
            | Head::ChoiceEnum { func, args, .. } => {
                head_funcs.insert((func.clone(), args.len()));
            }
            Head::Pred(name, args) => {
                head_preds.insert((name.clone(), args.len()));
            }
            Head::Falsum => {}
        }
    }
    for (_, n) in &head_funcs {
        size = size.saturating_mul((c0 + 1).saturating_pow(c0.saturating_pow(*n as u32) as u32));
    }
    for (_, n) in &head_preds {
        size = size.saturating_mul(2u128.saturating_pow(c0.saturating_pow(*n as u32) as u32));
    }
    size
}

/// Generate one safe program from a seed. Deterministic for a fixed seed
/// and configuration.
pub fn random_safe_program(seed: u64, cfg: &GenConfig) -> FlpProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n_consts = rng.random_range(2..=cfg.max_consts.clamp(2, CONST_POOL.len()));
        let consts: Vec<String> = CONST_POOL[..n_consts].iter().map(|s| s.to_string()).collect();
        let n_funcs = rng.random_range(0..=cfg.max_funcs.min(FUNC_POOL.len()));
        let funcs: Vec<(String, usize)> =
            FUNC_POOL[..n_funcs].iter().map(|(f, n)| (f.to_string(), *n)).collect();
        let draft = Draft { consts: consts.clone(), funcs: funcs.clone() };

        let n_rules = rng.random_range(1..=cfg.max_rules.max(1));
        let mut rules = Vec::new();
        // anchor fact so that some predicate is satisfiable
        let c = consts[rng.random_range(0..consts.len())].clone();
        rules.push(FlpRule::new(Head::Pred("p".to_string(), vec![Term::Const(c)]), vec![]));
        for _ in 0..n_rules {
            let mut rule = random_rule(&draft, &mut rng);
            let mut tries = 0;
            while !check_flp_rule(&rule).safe() && tries < 8 {
                rule = random_rule(&draft, &mut rng);
                tries += 1;
            }
            if check_flp_rule(&rule).safe() {
                rules.push(rule);
            }
        }

        let mut sig = Signature::new();
        for c in &consts {
            sig.add_constructor(c).expect("fresh constant");
        }
        for (p, n) in PRED_POOL {
            sig.add_predicate(p, n).expect("fresh predicate");
        }
        for (f, n) in &funcs {
            sig.add_evaluable(f, *n).expect("fresh function");
        }
        let program = FlpProgram { signature: sig, rules };
        if search_size(&program) <= cfg.max_states
            && crate::safety::check_flp_program(&program).safe()
        {
            return program;
        }
    }
}
