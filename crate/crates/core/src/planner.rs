//! Reduction of a degree to cheaper equivalent computations.
//!
//! A plan is a tree. Interior nodes are isomorphisms or dimension formulas,
//! leaves are direct computations or Wood vanishing. Every node records the
//! precondition it checked.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::{alpha, binomial, mu, t_bound};
use crate::error::{invalid, Error, Result};
use crate::solver::{CohitSpace, PartSource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Step {
    /// `mu(n) > k`, so the degree vanishes.
    WoodZero { k: usize, n: u64, mu: u32 },
    /// `n = 2d + k` with `mu(n) = k`; the down map is an isomorphism onto degree `d`.
    KamekoIso { k: usize, n: u64, d: u64 },
    /// `n = k(2^s - 1) + 2^s d` with `s > t(k, d)`; collapses to `s = t(k, d)`.
    TinSumStabilize { k: usize, n: u64, d: u64, s: u32, t: u32, target: u64 },
    /// `dim (QP_k^0)_n` as a binomial combination of positive parts.
    MothebeCompose { k: usize, n: u64 },
    /// `n = (k-1)(2^v - 1) + 2^v b`; the dimension is `(2^k - 1) dim (QP_{k-1})_b`.
    SumStabilize { k: usize, n: u64, b: u64, v: u32 },
    /// Elimination in `(P_k)_n`, or in `(P_k^+)_n` when `positive`.
    DirectCompute { k: usize, n: u64, positive: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanNode {
    #[serde(flatten)]
    pub step: Step,
    pub precondition: String,
    /// Multiplier of each child under `MothebeCompose`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PlanNode>,
}

impl PlanNode {
    fn leaf(step: Step, precondition: impl Into<String>) -> PlanNode {
        PlanNode { step, precondition: precondition.into(), weights: Vec::new(), children: Vec::new() }
    }

    fn unary(step: Step, precondition: impl Into<String>, child: PlanNode) -> PlanNode {
        PlanNode { step, precondition: precondition.into(), weights: Vec::new(), children: vec![child] }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            if n.is_leaf() {
                out.push(n);
            }
            stack.extend(n.children.iter().rev());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub k: usize,
    pub n: u64,
    pub root: PlanNode,
}

/// Applies Wood, then Kameko, then Tin-Sum, then sum stabilization, and
/// falls back to a direct computation.
pub fn plan(k: usize, n: u64) -> Result<ReductionPlan> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(ReductionPlan { k, n, root: plan_node(k, n) })
}

/// Plan for the degree `a(2^s - 1) + 2^s b`, starting from the template
/// itself rather than from the largest `s` the degree admits.
pub fn plan_template(k: usize, a: u64, b: u64, s: u32) -> Result<ReductionPlan> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let n = degree_template(a, b, s)?;
    let root = if a == k as u64 {
        tin_sum_node(k, n, b, s).unwrap_or_else(|| plan_node(k, n))
    } else if k >= 2 && a == k as u64 - 1 {
        sum_node(k, n, b, s).unwrap_or_else(|| plan_node(k, n))
    } else {
        plan_node(k, n)
    };
    Ok(ReductionPlan { k, n, root })
}

/// `dim (QP_k^0)_n` through positive parts in fewer variables.
pub fn plan_zero_part(k: usize, n: u64) -> Result<ReductionPlan> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let m = mu(n) as usize;
    let mut weights = Vec::new();
    let mut children = Vec::new();
    for r in m.max(1)..k {
        weights.push(binomial(k as u64, r as u64).expect("small binomial"));
        children.push(PlanNode::leaf(DirectCompute { k: r, n, positive: true }, format!("r = {r}")));
    }
    let root = PlanNode {
        step: Step::MothebeCompose { k, n },
        precondition: format!("mu({n}) = {m}, sum over {} <= r <= {}", m.max(1), k - 1),
        weights,
        children,
    };
    Ok(ReductionPlan { k, n, root })
}

/// `a(2^s - 1) + 2^s b`.
pub fn degree_template(a: u64, b: u64, s: u32) -> Result<u64> {
    let p = 1u64.checked_shl(s).filter(|_| s < 63).ok_or_else(|| invalid(format!("s = {s} too large")))?;
    a.checked_mul(p - 1)
        .and_then(|x| b.checked_mul(p).and_then(|y| x.checked_add(y)))
        .ok_or_else(|| invalid("template degree overflows"))
}

use Step::DirectCompute;

fn plan_node(k: usize, n: u64) -> PlanNode {
    let m = mu(n);
    if m as usize > k {
        return PlanNode::leaf(Step::WoodZero { k, n, mu: m }, format!("mu({n}) = {m} > {k}"));
    }
    if n >= k as u64 && (n - k as u64) % 2 == 0 && m as usize == k && n > 0 {
        let d = (n - k as u64) / 2;
        return PlanNode::unary(
            Step::KamekoIso { k, n, d },
            format!("{n} = 2*{d} + {k} and mu({n}) = {k}"),
            plan_node(k, d),
        );
    }
    let mut s = (n + k as u64).trailing_zeros();
    while s > 0 {
        let d = ((n + k as u64) >> s).checked_sub(k as u64);
        if let Some(node) = d.and_then(|d| tin_sum_node(k, n, d, s)) {
            return node;
        }
        s -= 1;
    }
    if k >= 2 {
        let c = k as u64 - 1;
        let mut v = (n + c).trailing_zeros().min(62);
        while v >= c as u32 {
            if let Some(node) = ((n + c) >> v).checked_sub(c).and_then(|b| sum_node(k, n, b, v)) {
                return node;
            }
            v -= 1;
        }
    }
    PlanNode::leaf(DirectCompute { k, n, positive: false }, "no reduction applies")
}

fn tin_sum_node(k: usize, n: u64, d: u64, s: u32) -> Option<PlanNode> {
    let t = t_bound(k as u32, d);
    if s <= t {
        return None;
    }
    let target = degree_template(k as u64, d, t).ok()?;
    debug_assert_eq!(degree_template(k as u64, d, s).ok(), Some(n));
    Some(PlanNode::unary(
        Step::TinSumStabilize { k, n, d, s, t, target },
        format!(
            "{n} = {k}(2^{s} - 1) + 2^{s}*{d}, t({k},{d}) = max(0, {k} - alpha({dk}) - zeta({dk})) = {t} < {s}",
            dk = d + k as u64
        ),
        plan_node(k, target),
    ))
}

fn sum_node(k: usize, n: u64, b: u64, v: u32) -> Option<PlanNode> {
    let m = mu(b);
    if b == 0 || v < k as u32 - 1 || m != alpha(b + m as u64) {
        return None;
    }
    Some(PlanNode::unary(
        Step::SumStabilize { k, n, b, v },
        format!("mu({b}) = {m} = alpha({}) and v = {v} >= {}", b + m as u64, k - 1),
        plan_node(k - 1, b),
    ))
}

/// Propagates leaf dimensions to the root. `leaf(k, n, positive)` resolves
/// each direct computation.
pub fn evaluate(plan: &ReductionPlan, leaf: &mut impl FnMut(usize, u64, bool) -> Result<u64>) -> Result<u64> {
    eval_node(&plan.root, leaf)
}

fn eval_node(node: &PlanNode, leaf: &mut impl FnMut(usize, u64, bool) -> Result<u64>) -> Result<u64> {
    let child = |i: usize| -> Result<&PlanNode> {
        node.children.get(i).ok_or_else(|| Error::Internal("plan node is missing a child".into()))
    };
    match node.step {
        Step::WoodZero { .. } => Ok(0),
        Step::DirectCompute { k, n, positive } => leaf(k, n, positive),
        Step::KamekoIso { .. } | Step::TinSumStabilize { .. } => eval_node(child(0)?, leaf),
        Step::SumStabilize { k, .. } => Ok(((1u64 << k) - 1) * eval_node(child(0)?, leaf)?),
        Step::MothebeCompose { .. } => {
            let mut total = 0;
            for (c, w) in node.children.iter().zip(&node.weights) {
                total += w * eval_node(c, leaf)?;
            }
            Ok(total)
        }
    }
}

/// Leaf resolver that computes every leaf from scratch through `source`.
pub fn compute_leaf(source: &mut impl PartSource) -> impl FnMut(usize, u64, bool) -> Result<u64> + '_ {
    move |k, n, positive| {
        if positive {
            if n == 0 {
                return Ok(0);
            }
            Ok(source.part(k, n)?.dim() as u64)
        } else {
            Ok(CohitSpace::build(k, n, source)?.dim() as u64)
        }
    }
}

/// `dim (QP_k)_{(k-1)(2^v-1) + 2^v b} = (2^k - 1) dim (QP_{k-1})_b`, refused
/// unless `mu(b) = alpha(b + mu(b))` and `v >= k - 1`.
pub fn sum_stabilize_dimension(k: usize, b: u64, v: u32, source: &mut impl PartSource) -> Result<u64> {
    if k < 2 || k > 10 {
        return Err(invalid(format!("k = {k} outside 2..=10")));
    }
    let m = mu(b);
    if m != alpha(b + m as u64) {
        return Err(Error::Precondition(format!("mu({b}) = {m} but alpha({}) = {}", b + m as u64, alpha(b + m as u64))));
    }
    if v < k as u32 - 1 {
        return Err(Error::Precondition(format!("v = {v} < k - 1 = {}", k - 1)));
    }
    let lower = CohitSpace::build(k - 1, b, source)?.dim() as u64;
    Ok(((1u64 << k) - 1) * lower)
}

/// Human-readable outline of the plan, one line per node.
pub fn render_sketch(plan: &ReductionPlan) -> String {
    let mut out = String::new();
    sketch_node(&plan.root, 0, &mut out);
    out
}

fn sketch_node(node: &PlanNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let line = match &node.step {
        Step::WoodZero { k, n, .. } => format!("({k}, {n}): zero by Wood"),
        Step::KamekoIso { k, n, d } => format!("({k}, {n}): Kameko isomorphism to degree {d}"),
        Step::TinSumStabilize { k, n, d, s, t, target } => {
            if *t == 0 {
                format!("({k}, {n}): t({k},{d}) = 0, so all s collapse; s = {s} reduces to degree {target}")
            } else {
                format!("({k}, {n}): Tin-Sum stabilization from s = {s} to s = {t}, degree {target}")
            }
        }
        Step::MothebeCompose { k, n } => format!("({k}, {n}): zero part as a sum over positive parts"),
        Step::SumStabilize { k, n, b, v } => {
            format!("({k}, {n}): {} times degree {b} in {} variables (v = {v})", (1u64 << k) - 1, k - 1)
        }
        Step::DirectCompute { k, n, positive: false } => format!("({k}, {n}): direct computation"),
        Step::DirectCompute { k, n, positive: true } => format!("({k}, {n}): direct computation of the positive part"),
    };
    let _ = writeln!(out, "{pad}{line}  [{}]", node.precondition);
    for c in &node.children {
        sketch_node(c, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{direct_dimension, Compute};

    fn chain(p: &ReductionPlan) -> Vec<&Step> {
        let mut out = vec![&p.root.step];
        let mut n = &p.root;
        while let Some(c) = n.children.first() {
            out.push(&c.step);
            n = c;
        }
        out
    }

    #[test]
    fn plans_agree_with_direct_computation() {
        for k in 1..=4 {
            for n in 0..=30 {
                let p = plan(k, n).unwrap();
                let via = evaluate(&p, &mut compute_leaf(&mut Compute)).unwrap();
                assert_eq!(via, direct_dimension(k, n).unwrap() as u64, "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn kameko_steps_check_mu() {
        for k in 1..=5 {
            for n in 0..=200 {
                for s in chain(&plan(k, n).unwrap()) {
                    if let Step::KamekoIso { k, n, d } = *s {
                        assert_eq!(mu(n) as usize, k);
                        assert_eq!(n, 2 * d + k as u64);
                    }
                    if let Step::TinSumStabilize { k, d, s, t, .. } = *s {
                        assert_eq!(t, t_bound(k as u32, d));
                        assert!(s > t);
                    }
                }
            }
        }
    }

    #[test]
    fn leaves_are_terminal_steps() {
        for n in 0..=120 {
            let p = plan(5, n).unwrap();
            for leaf in p.root.leaves() {
                assert!(matches!(leaf.step, Step::DirectCompute { .. } | Step::WoodZero { .. }));
            }
        }
    }

    #[test]
    fn four_variables_degree_24_goes_to_10() {
        let p = plan(4, 24).unwrap();
        assert_eq!(p.root.step, Step::KamekoIso { k: 4, n: 24, d: 10 });
        assert_eq!(p.root.children[0].step, DirectCompute { k: 4, n: 10, positive: false });
    }

    #[test]
    fn wood_leaf_when_mu_exceeds_k() {
        let p = plan(3, 100).unwrap();
        assert_eq!(mu(100), 4);
        assert_eq!(p.root.step, Step::WoodZero { k: 3, n: 100, mu: 4 });
        assert_eq!(evaluate(&p, &mut |_, _, _| unreachable!()).unwrap(), 0);
    }

    #[test]
    fn template_collapses_to_53() {
        for s in 1..=7 {
            let p = plan_template(5, 5, 53, s).unwrap();
            assert_eq!(p.n, 5 * ((1 << s) - 1) + (1 << s) * 53);
            let last = *chain(&p).last().unwrap();
            assert_eq!(last, &DirectCompute { k: 5, n: 53, positive: false });
            assert!(matches!(p.root.step, Step::TinSumStabilize { t: 0, target: 53, .. }));
            let q = plan(5, p.n).unwrap();
            assert_eq!(*chain(&q).last().unwrap(), &DirectCompute { k: 5, n: 53, positive: false });
        }
    }

    #[test]
    fn sum_stabilization_refuses_bad_preconditions() {
        assert!(matches!(sum_stabilize_dimension(6, 24, 5, &mut Compute), Err(Error::Precondition(_))));
        assert!(matches!(sum_stabilize_dimension(4, 1, 2, &mut Compute), Err(Error::Precondition(_))));
        assert_eq!(sum_stabilize_dimension(4, 1, 3, &mut Compute).unwrap(), 45);
    }

    #[test]
    fn evaluate_reports_missing_leaves() {
        let p = plan(4, 10).unwrap();
        let r = evaluate(&p, &mut |k, n, _| Err(Error::MissingData(format!("({k}, {n})"))));
        assert!(matches!(r, Err(Error::MissingData(_))));
    }

    #[test]
    fn zero_part_plan_matches_split() {
        for (k, n) in [(4, 13), (5, 10), (3, 6)] {
            let p = plan_zero_part(k, n).unwrap();
            let via = evaluate(&p, &mut compute_leaf(&mut Compute)).unwrap();
            let space = CohitSpace::compute(k, n).unwrap();
            assert_eq!(via, space.zero_basis().count() as u64);
        }
    }

    #[test]
    fn plan_json_round_trip() {
        let p = plan_template(5, 5, 53, 3).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""kind":"tin-sum-stabilize""#));
        let back: ReductionPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(render_sketch(&p).contains("t(5,53) = 0, so all s collapse"));
    }
}
