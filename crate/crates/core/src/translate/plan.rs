//! Simultaneous assignment: snapshot the frame, then write.

use rand::Rng;

use crate::mathkit::{CombineOp, Value};
use crate::model::{frame, primed, Action, ActionKind, Formula};

use super::code::{BinderPlan, Code, Frame};
use super::compile::{compile, compile_plan, CompileError, Scope};
use super::ground::Grounding;
use super::EvalError;

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// Copies each `(variable slot, temporary slot)` pair.
    Snapshot(Vec<(usize, usize)>),
    /// `target := rhs`, with `rhs` reading the snapshot.
    Write {
        label: String,
        target: usize,
        rhs: Code,
    },
    /// `targets :| BA`: `plan` binds the primed names; one solution is
    /// picked and copied into `targets`.
    Solve {
        label: String,
        targets: Vec<usize>,
        plan: BinderPlan,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ActionPlan {
    pub steps: Vec<Step>,
}

/// Lowers a list of actions. `sc` must already map every state variable to
/// its slot; frame variables are re-bound to snapshot temporaries while the
/// right-hand sides compile, and the scope is restored afterwards.
pub fn lower_actions(actions: &[Action], sc: &mut Scope) -> Result<ActionPlan, CompileError> {
    let mark = sc.mark();
    let mut snapshot = Vec::new();
    let mut var_slot = std::collections::BTreeMap::new();
    for v in frame(actions) {
        let Some(slot) = sc.lookup(&v) else {
            return Err(CompileError::Unknown {
                span: actions[0].span.clone(),
                name: v,
            });
        };
        var_slot.insert(v.clone(), slot);
        let tmp = sc.declare(&v);
        snapshot.push((slot, tmp));
    }
    let mut steps = vec![Step::Snapshot(snapshot)];
    for a in actions {
        match &a.kind {
            ActionKind::Deterministic { lhs, rhs } => {
                for (l, e) in lhs.iter().zip(rhs) {
                    let target = var_slot[&l.name];
                    let value = compile(e, sc)?;
                    let rhs = match &l.index {
                        None => value,
                        Some(i) => {
                            let idx = compile(i, sc)?;
                            let pre = Code::Slot(sc.lookup(&l.name).expect("snapshot slot"));
                            Code::Combine(
                                CombineOp::Override,
                                pre.boxed(),
                                Code::SetExt(vec![Code::Maplet(idx.boxed(), value.boxed())])
                                    .boxed(),
                            )
                        }
                    };
                    steps.push(Step::Write {
                        label: a.label.clone(),
                        target,
                        rhs,
                    });
                }
            }
            ActionKind::NonDeterministic { targets, pred } => {
                let inner = sc.mark();
                let names: Vec<String> = targets.iter().map(|t| primed(t)).collect();
                let conj: Vec<&Formula> = pred.conjuncts();
                let plan = compile_plan(&names, &conj, &[pred], sc)?;
                sc.restore(inner);
                steps.push(Step::Solve {
                    label: a.label.clone(),
                    targets: targets.iter().map(|t| var_slot[t]).collect(),
                    plan,
                });
            }
        }
    }
    sc.restore(mark);
    Ok(ActionPlan { steps })
}

impl ActionPlan {
    /// Runs the plan in place. Non-deterministic choices draw from `rng`.
    pub fn execute(
        &self,
        fr: &mut Frame,
        g: &Grounding,
        rng: &mut impl Rng,
    ) -> Result<(), EvalError> {
        let mut writes: Vec<(usize, Value)> = Vec::new();
        for step in &self.steps {
            match step {
                Step::Snapshot(pairs) => {
                    for &(v, t) in pairs {
                        fr[t] = fr[v].clone();
                    }
                }
                Step::Write { target, rhs, .. } => writes.push((*target, rhs.eval(fr, g)?)),
                Step::Solve {
                    label,
                    targets,
                    plan,
                } => {
                    let mut sols: Vec<Vec<Value>> = Vec::new();
                    plan.for_each(fr, g, &mut |fr| {
                        sols.push(plan.levels.iter().map(|l| fr[l.slot].clone()).collect());
                        Ok(true)
                    })?;
                    if sols.is_empty() {
                        return Err(EvalError::Infeasible(label.clone()));
                    }
                    let pick = sols.swap_remove(rng.gen_range(0..sols.len()));
                    writes.extend(targets.iter().copied().zip(pick));
                }
            }
        }
        for (slot, v) in writes {
            fr[slot] = v;
        }
        Ok(())
    }
}
