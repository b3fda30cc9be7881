//! Hilbert-style derivations for the weakly transitive μ-logic and its
//! extensions: axiom schemas, instance matching, proof checking and
//! soundness fuzzing.
//!
//! Schema templates are core formulas whose free names are metavariables.
//! Metavariables live in a namespace the parser cannot produce (a leading
//! `?`), so they never clash with atoms of an instance.

mod fuzz;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::symbol::Symbol;
use crate::syntax::{parse_formula, AlphaIndex, Formula};

pub use fuzz::{soundness_fuzz, FuzzConfig, FuzzFailure, FuzzReport, RuleTally, SchemaTally};

/// Largest number of abstracted atoms the tautology check accepts.
pub const MAX_TAUT_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("tautology check needs {0} propositional atoms, more than {MAX_TAUT_ATOMS}")]
    TooManyAtoms(usize),
    #[error("unknown schema {0:?}")]
    UnknownSchema(String),
    #[error("proof format: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schema {
    /// Propositional tautologies, read with maximal modal subformulas as atoms.
    Taut,
    K,
    W,
    /// `νx.θ ⇒ θ(νx.θ)` for `θ` positive in `x`.
    Fix,
    T0Ax,
    FourAx,
    User {
        name: String,
        template: Formula,
    },
}

fn meta(name: &str) -> Formula {
    Formula::Var(Symbol::new(&format!("?{name}")))
}

impl Schema {
    pub const BUILT_IN: [Schema; 6] = [
        Schema::Taut,
        Schema::K,
        Schema::W,
        Schema::Fix,
        Schema::T0Ax,
        Schema::FourAx,
    ];

    pub fn name(&self) -> &str {
        match self {
            Schema::Taut => "Taut",
            Schema::K => "K",
            Schema::W => "W",
            Schema::Fix => "Fix",
            Schema::T0Ax => "T0Ax",
            Schema::FourAx => "FourAx",
            Schema::User { name, .. } => name,
        }
    }

    pub fn built_in(name: &str) -> Option<Schema> {
        Schema::BUILT_IN.into_iter().find(|s| s.name() == name)
    }

    /// A user schema from formula text; its free names become metavariables.
    pub fn user(name: &str, text: &str) -> Result<Schema, crate::Error> {
        let f = parse_formula(text)?;
        let binding: BTreeMap<Symbol, Formula> =
            f.free_vars().into_iter().map(|x| (x, meta(x.as_str()))).collect();
        Ok(Schema::User {
            name: name.to_string(),
            template: f.substitute(&binding),
        })
    }

    /// The template of a uniform-substitution schema. `Taut` and `Fix` have none.
    pub fn template(&self) -> Option<Formula> {
        let (p, q) = (meta("phi"), meta("psi"));
        let bx = Formula::boxed;
        let dia = Formula::dia;
        Some(match self {
            Schema::Taut | Schema::Fix => return None,
            Schema::K => Formula::implies(
                bx(Formula::implies(p.clone(), q.clone())),
                Formula::implies(bx(p), bx(q)),
            ),
            Schema::W => Formula::implies(dia(dia(p.clone())), Formula::or(p.clone(), dia(p))),
            Schema::T0Ax => {
                let (p, q) = (meta("p"), meta("q"));
                Formula::implies(
                    Formula::and(p.clone(), dia(Formula::and(q.clone(), dia(p.clone())))),
                    Formula::or(dia(p), dia(Formula::and(q.clone(), dia(q)))),
                )
            }
            Schema::FourAx => {
                let p = meta("p");
                Formula::implies(dia(dia(p.clone())), dia(p))
            }
            Schema::User { template, .. } => template.clone(),
        })
    }

    /// Metavariables of the template, in order.
    pub fn metavariables(&self) -> Vec<Symbol> {
        self.template()
            .map(|t| t.free_vars().into_iter().collect())
            .unwrap_or_default()
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Metavariable name (without the `?`) to the formula it stands for.
pub type Instantiation = BTreeMap<String, Formula>;

/// Fills a template's metavariables. The result is alpha-normal.
pub fn instantiate(template: &Formula, fill: &BTreeMap<Symbol, Formula>) -> Formula {
    template.substitute(fill)
}

/// `νx.θ ⇒ θ(νx.θ)`
pub fn fix_instance(x: Symbol, theta: &Formula) -> Formula {
    let nu = Formula::nu(x, theta.clone());
    Formula::implies(nu.clone(), theta.substitute_one(x, &nu)).alpha_normalize()
}

/// Returns the antecedent and consequent of a core implication `¬(a ∧ ¬b)`.
pub fn as_implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Neg(inner) = f {
        if let Formula::And(a, nb) = &**inner {
            if let Formula::Neg(b) = &**nb {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn matches_schema(f: &Formula, s: &Schema) -> Result<Option<Instantiation>, ProofError> {
    match s {
        Schema::Taut => Ok(is_tautology(f)?.then(Instantiation::new)),
        Schema::Fix => Ok(match_fix(f)),
        _ => {
            let template = s.template().expect("template schema");
            let mut inst = BTreeMap::new();
            if match_template(&template, f, &mut Vec::new(), &mut inst) {
                Ok(Some(
                    inst.into_iter()
                        .map(|(k, v)| (k.as_str().trim_start_matches('?').to_string(), v))
                        .collect(),
                ))
            } else {
                Ok(None)
            }
        }
    }
}

fn match_fix(f: &Formula) -> Option<Instantiation> {
    let (lhs, rhs) = as_implication(f)?;
    let Formula::Nu(x, theta) = lhs else {
        return None;
    };
    if lhs.positivity_violation().is_some() {
        return None;
    }
    if !theta.substitute_one(*x, lhs).alpha_eq(rhs) {
        return None;
    }
    let mut inst = Instantiation::new();
    inst.insert("x".into(), Formula::Var(*x));
    inst.insert("theta".into(), (**theta).clone());
    Some(inst)
}

/// Structural matching up to renaming of bound variables. `binders` pairs
/// template binders with instance binders on the current path.
fn match_template(
    t: &Formula,
    f: &Formula,
    binders: &mut Vec<(Symbol, Symbol)>,
    inst: &mut BTreeMap<Symbol, Formula>,
) -> bool {
    use Formula::*;
    match (t, f) {
        (Var(x), _) => {
            if let Some(&(_, y)) = binders.iter().rev().find(|(tx, _)| tx == x) {
                return *f == Var(y);
            }
            // A metavariable: its filling must not capture an instance binder.
            let free = f.free_vars();
            if binders.iter().any(|(_, y)| free.contains(y)) {
                return false;
            }
            match inst.get(x) {
                Some(prev) => prev.alpha_eq(f),
                None => {
                    inst.insert(*x, f.clone());
                    true
                }
            }
        }
        (Top, Top) => true,
        (Neg(a), Neg(b)) | (Dia(a), Dia(b)) => match_template(a, b, binders, inst),
        (And(a1, a2), And(b1, b2)) => {
            match_template(a1, b1, binders, inst) && match_template(a2, b2, binders, inst)
        }
        (Nu(x, a), Nu(y, b)) => {
            binders.push((*x, *y));
            let ok = match_template(a, b, binders, inst);
            binders.pop();
            ok
        }
        _ => false,
    }
}

enum Prop {
    Top,
    Atom(usize),
    Neg(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, assignment: u32) -> bool {
        match self {
            Prop::Top => true,
            Prop::Atom(i) => assignment >> i & 1 == 1,
            Prop::Neg(a) => !a.eval(assignment),
            Prop::And(a, b) => a.eval(assignment) && b.eval(assignment),
        }
    }
}

fn abstract_prop(f: &Formula, index: &mut AlphaIndex) -> Prop {
    match f {
        Formula::Top => Prop::Top,
        Formula::Neg(a) => Prop::Neg(Box::new(abstract_prop(a, index))),
        Formula::And(a, b) => Prop::And(
            Box::new(abstract_prop(a, index)),
            Box::new(abstract_prop(b, index)),
        ),
        other => Prop::Atom(index.class_of(other)),
    }
}

/// Truth-table check with maximal non-Boolean subformulas (up to alpha) as atoms.
pub fn is_tautology(f: &Formula) -> Result<bool, ProofError> {
    let mut index = AlphaIndex::default();
    let prop = abstract_prop(f, &mut index);
    let k = index.len();
    if k > MAX_TAUT_ATOMS {
        return Err(ProofError::TooManyAtoms(k));
    }
    Ok((0..1u32 << k).all(|a| prop.eval(a)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Axiom {
        schema: String,
        formula: Formula,
    },
    /// From `minor` = φ and `major` = φ ⇒ ψ, infer ψ.
    ModusPonens {
        minor: usize,
        major: usize,
        formula: Option<Formula>,
    },
    Necessitation {
        from: usize,
        formula: Option<Formula>,
    },
    /// From φ ⇒ θ(φ), infer φ ⇒ νx.θ.
    Induction {
        from: usize,
        var: Symbol,
        body: Formula,
        formula: Option<Formula>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofObject {
    pub steps: Vec<Step>,
    pub conclusion: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofVerdict {
    Valid,
    Invalid { step: usize, reason: String },
}

impl ProofVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ProofVerdict::Valid)
    }
}

fn derive_step(
    k: usize,
    step: &Step,
    derived: &[Formula],
    logic: &HashMap<&str, &Schema>,
) -> Result<Formula, String> {
    let earlier = |i: usize| {
        derived
            .get(i)
            .filter(|_| i < k)
            .ok_or_else(|| format!("step {i} is not an earlier step"))
    };
    let conclusion = match step {
        Step::Axiom { schema, formula } => {
            let s = logic
                .get(schema.as_str())
                .ok_or_else(|| format!("schema {schema} is not part of the logic"))?;
            match matches_schema(formula, s) {
                Ok(Some(_)) => return Ok(formula.clone()),
                Ok(None) => return Err(format!("not an instance of {schema}")),
                Err(e) => return Err(e.to_string()),
            }
        }
        Step::ModusPonens { minor, major, .. } => {
            let phi = earlier(*minor)?;
            let imp = earlier(*major)?;
            let (a, b) = as_implication(imp).ok_or_else(|| format!("step {major} is not an implication"))?;
            if !a.alpha_eq(phi) {
                return Err(format!("antecedent of step {major} differs from step {minor}"));
            }
            b.clone()
        }
        Step::Necessitation { from, .. } => Formula::boxed(earlier(*from)?.clone()).alpha_normalize(),
        Step::Induction { from, var, body, .. } => {
            let premise = earlier(*from)?;
            let nu = Formula::nu(*var, body.clone());
            if let Some((x, path)) = nu.positivity_violation() {
                return Err(format!("body is not positive in {x} (at {path})"));
            }
            let (phi, rhs) =
                as_implication(premise).ok_or_else(|| format!("premise {from} is not an implication"))?;
            if !body.substitute_one(*var, phi).alpha_eq(rhs) {
                return Err(format!("premise {from} is not of the shape phi -> theta(phi)"));
            }
            Formula::implies(phi.clone(), nu).alpha_normalize()
        }
    };
    let stated = match step {
        Step::ModusPonens { formula, .. }
        | Step::Necessitation { formula, .. }
        | Step::Induction { formula, .. } => formula.as_ref(),
        Step::Axiom { .. } => None,
    };
    match stated {
        Some(s) if !s.alpha_eq(&conclusion) => {
            Err(format!("stated formula differs from derived {conclusion}"))
        }
        _ => Ok(conclusion),
    }
}

/// Checks every step in order and reports the first one that fails.
pub fn check_proof(proof: &ProofObject, logic: &[Schema]) -> ProofVerdict {
    let by_name: HashMap<&str, &Schema> = logic.iter().map(|s| (s.name(), s)).collect();
    let mut derived = Vec::with_capacity(proof.steps.len());
    for (k, step) in proof.steps.iter().enumerate() {
        match derive_step(k, step, &derived, &by_name) {
            Ok(f) => derived.push(f),
            Err(reason) => return ProofVerdict::Invalid { step: k, reason },
        }
    }
    match derived.last() {
        None => ProofVerdict::Invalid {
            step: 0,
            reason: "empty proof".into(),
        },
        Some(last) if !last.alpha_eq(&proof.conclusion) => ProofVerdict::Invalid {
            step: derived.len() - 1,
            reason: format!("last step proves {last}, not the conclusion"),
        },
        Some(_) => ProofVerdict::Valid,
    }
}

/// A proof file: the logic it is checked against and the derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFile {
    pub logic: Vec<Schema>,
    pub proof: ProofObject,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    logic: Vec<RawSchema>,
    steps: Vec<RawStep>,
    conclusion: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSchema {
    Name(String),
    User { name: String, template: String },
}

#[derive(Deserialize)]
#[serde(tag = "rule", deny_unknown_fields)]
enum RawStep {
    Axiom {
        schema: String,
        formula: String,
    },
    #[serde(rename = "MP")]
    ModusPonens {
        from: [usize; 2],
        formula: Option<String>,
    },
    #[serde(rename = "Nec", alias = "Necessitation")]
    Necessitation {
        from: usize,
        formula: Option<String>,
    },
    Induction {
        from: usize,
        var: String,
        body: String,
        formula: Option<String>,
    },
}

fn formula_field(text: &str, what: &str) -> Result<Formula, ProofError> {
    parse_formula(text).map_err(|e| ProofError::Format(format!("{what}: {e}")))
}

fn optional_formula(text: &Option<String>, k: usize) -> Result<Option<Formula>, ProofError> {
    text.as_deref()
        .map(|t| formula_field(t, &format!("step {k}")))
        .transpose()
}

/// Reads the JSON proof format. `MP` takes `from: [minor, major]`.
pub fn parse_proof(text: &str) -> Result<ProofFile, ProofError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| ProofError::Format(e.to_string()))?;
    let mut logic = Vec::new();
    for s in raw.logic {
        logic.push(match s {
            RawSchema::Name(n) => Schema::built_in(&n).ok_or(ProofError::UnknownSchema(n))?,
            RawSchema::User { name, template } => Schema::user(&name, &template)
                .map_err(|e| ProofError::Format(format!("schema {name}: {e}")))?,
        });
    }
    let mut steps = Vec::new();
    for (k, s) in raw.steps.iter().enumerate() {
        steps.push(match s {
            RawStep::Axiom { schema, formula } => Step::Axiom {
                schema: schema.clone(),
                formula: formula_field(formula, &format!("step {k}"))?,
            },
            RawStep::ModusPonens { from, formula } => Step::ModusPonens {
                minor: from[0],
                major: from[1],
                formula: optional_formula(formula, k)?,
            },
            RawStep::Necessitation { from, formula } => Step::Necessitation {
                from: *from,
                formula: optional_formula(formula, k)?,
            },
            RawStep::Induction {
                from,
                var,
                body,
                formula,
            } => {
                let var = Symbol::new(var);
                // The body is read as a formula with `var` free.
                let body = formula_field(body, &format!("step {k} body"))?;
                Step::Induction {
                    from: *from,
                    var,
                    body,
                    formula: optional_formula(formula, k)?,
                }
            }
        });
    }
    Ok(ProofFile {
        logic,
        proof: ProofObject {
            steps,
            conclusion: formula_field(&raw.conclusion, "conclusion")?,
        },
    })
}

/// The four derived schemas for `θ` positive in `x`:
/// `νx.θ ⇔ θ(νx.θ)`, `([*]φ ∧ θ(ψ)) ⇒ θ([*]φ ∧ ψ)`,
/// `[*](φ⇒ψ) ⇒ (θ(φ)⇒θ(ψ))` and `[*](φ⇒θ(φ)) ⇒ (φ⇒νx.θ)`.
pub fn derived_theorems(x: Symbol, theta: &Formula, phi: &Formula, psi: &Formula) -> [Formula; 4] {
    let at = |arg: &Formula| theta.substitute_one(x, arg);
    let nu = Formula::nu(x, theta.clone());
    let star_phi = Formula::star_box(phi.clone());
    [
        Formula::iff(nu.clone(), at(&nu)),
        Formula::implies(
            Formula::and(star_phi.clone(), at(psi)),
            at(&Formula::and(star_phi, psi.clone())),
        ),
        Formula::implies(
            Formula::star_box(Formula::implies(phi.clone(), psi.clone())),
            Formula::implies(at(phi), at(psi)),
        ),
        Formula::implies(
            Formula::star_box(Formula::implies(phi.clone(), at(phi))),
            Formula::implies(phi.clone(), nu),
        ),
    ]
    .map(|f| f.alpha_normalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn w_instance() {
        let inst = matches_schema(&f("<><>(p & q) -> (p & q) | <>(p & q)"), &Schema::W)
            .unwrap()
            .unwrap();
        assert_eq!(inst["phi"], f("p & q"));
    }

    #[test]
    fn fix_instance_matches() {
        let inst = matches_schema(&f("(nu X. <>X) -> <>(nu X. <>X)"), &Schema::Fix)
            .unwrap()
            .unwrap();
        assert!(inst["theta"].alpha_eq(&Formula::dia(inst["x"].clone())));
    }

    #[test]
    fn non_instances() {
        let g = f("p -> <>p");
        for s in Schema::BUILT_IN {
            assert_eq!(matches_schema(&g, &s).unwrap(), None, "{s}");
        }
    }

    #[test]
    fn k_t0_four_and_user() {
        assert!(matches_schema(&f("[](p -> <>q) -> ([]p -> []<>q)"), &Schema::K)
            .unwrap()
            .is_some());
        assert!(
            matches_schema(&f("r & <>(s & <>r) -> <>r | <>(s & <>s)"), &Schema::T0Ax)
                .unwrap()
                .is_some()
        );
        assert!(matches_schema(&f("<><>T -> <>T"), &Schema::FourAx)
            .unwrap()
            .is_some());
        assert!(matches_schema(&f("<><>T -> <>p"), &Schema::FourAx)
            .unwrap()
            .is_none());
        let dense = Schema::user("Dense", "<>p -> <><>p").unwrap();
        assert!(matches_schema(&f("<>(q | r) -> <><>(q | r)"), &dense)
            .unwrap()
            .is_some());
    }

    #[test]
    fn templates_match_up_to_alpha() {
        let s = Schema::user("Nu", "(nu X. <>X & p) -> p").unwrap();
        let inst = matches_schema(&f("(nu Y. <>Y & <>q) -> <>q"), &s)
            .unwrap()
            .unwrap();
        assert_eq!(inst["p"], f("<>q"));
        // A filling may not mention the instance's bound variable.
        let s = Schema::user("Cap", "nu X. p").unwrap();
        assert!(matches_schema(&f("nu Y. <>Y"), &s).unwrap().is_none());
    }

    #[test]
    fn tautologies() {
        assert!(is_tautology(&f("p -> T")).unwrap());
        assert!(is_tautology(&f("<>p | ~<>p")).unwrap());
        assert!(is_tautology(&f("(nu X. <>X) | ~(nu Y. <>Y)")).unwrap());
        assert!(!is_tautology(&f("<>p | ~<>q")).unwrap());
        let wide = (0..17).map(|i| format!("<>p{i}")).collect::<Vec<_>>().join(" | ");
        assert_eq!(is_tautology(&f(&wide)), Err(ProofError::TooManyAtoms(17)));
    }

    #[test]
    fn fix_then_necessitation() {
        let text = r#"{"logic":["Taut","K","W","Fix"],
            "steps":[{"rule":"Axiom","schema":"Fix","formula":"(nu X. <>X) -> <>(nu X. <>X)"},
                     {"rule":"Nec","from":0}],
            "conclusion":"[]((nu X. <>X) -> <>(nu X. <>X))"}"#;
        let pf = parse_proof(text).unwrap();
        assert_eq!(check_proof(&pf.proof, &pf.logic), ProofVerdict::Valid);
    }

    #[test]
    fn induction_with_constant_body() {
        let text = r#"{"logic":["Taut"],
            "steps":[{"rule":"Axiom","schema":"Taut","formula":"p -> T"},
                     {"rule":"Induction","from":0,"var":"X","body":"T"}],
            "conclusion":"p -> nu X. T"}"#;
        let pf = parse_proof(text).unwrap();
        assert!(check_proof(&pf.proof, &pf.logic).is_valid());
    }

    #[test]
    fn induction_shape_mismatch() {
        let text = r#"{"logic":["Taut"],
            "steps":[{"rule":"Axiom","schema":"Taut","formula":"p -> T"},
                     {"rule":"Induction","from":0,"var":"X","body":"<>X"}],
            "conclusion":"p -> nu X. <>X"}"#;
        let pf = parse_proof(text).unwrap();
        assert!(matches!(
            check_proof(&pf.proof, &pf.logic),
            ProofVerdict::Invalid { step: 1, .. }
        ));
    }

    #[test]
    fn modus_ponens_and_bad_steps() {
        let text = r#"{"logic":["Taut","W"],
            "steps":[{"rule":"Axiom","schema":"Taut","formula":"T"},
                     {"rule":"Axiom","schema":"Taut","formula":"T -> (q | ~q)"},
                     {"rule":"MP","from":[0,1],"formula":"q | ~q"}],
            "conclusion":"q | ~q"}"#;
        let pf = parse_proof(text).unwrap();
        assert!(check_proof(&pf.proof, &pf.logic).is_valid());
        let mut bad = pf.clone();
        bad.proof.steps[2] = Step::ModusPonens {
            minor: 1,
            major: 0,
            formula: None,
        };
        assert!(matches!(
            check_proof(&bad.proof, &bad.logic),
            ProofVerdict::Invalid { step: 2, .. }
        ));
        let mut forward = pf.clone();
        forward.proof.steps[0] = Step::Necessitation {
            from: 0,
            formula: None,
        };
        assert!(matches!(
            check_proof(&forward.proof, &forward.logic),
            ProofVerdict::Invalid { step: 0, .. }
        ));
        let missing = Step::Axiom {
            schema: "K".into(),
            formula: f("[](p -> p) -> ([]p -> []p)"),
        };
        let p = ProofObject {
            steps: vec![missing],
            conclusion: f("[](p -> p) -> ([]p -> []p)"),
        };
        assert!(!check_proof(&p, &pf.logic).is_valid());
        assert!(matches!(
            parse_proof(r#"{"logic":["Nope"],"steps":[],"conclusion":"T"}"#),
            Err(ProofError::UnknownSchema(_))
        ));
    }

    #[test]
    fn derived_theorems_are_well_formed() {
        let x = Symbol::new("Z");
        let theta = Formula::dia(Formula::and(Formula::Var(x), f("q")));
        for t in derived_theorems(x, &theta, &f("p"), &f("<>q")) {
            assert!(t.is_alpha_normal());
            assert!(t.positivity_violation().is_none());
        }
    }
}
