use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use super::brute::{brute_sum_masked, ResidueMask};
use super::degenerate::{degenerate_reduce_masked, DegenerateReduction};
use super::reduce::{p_power, reduction_shapes, summand_root, TermShape};
use super::value::{Root, SumValue};
use crate::bounds::{classify_masked, ClassKind};
use crate::charmod::MultChar;
use crate::error::Result;
use crate::padic::PrimePower;
use crate::polyrat::RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Mixed sum split into pure sums at its critical residues.
    Mixed,
    /// Pure sum split at its critical residues.
    Pure,
    /// Degenerate sum rewritten over a smaller modulus.
    Degenerate,
    /// Summand constant on the domain.
    Constant,
    /// Local term with `m ≤ σ`: the prefactor is the whole value.
    Closed,
    /// Direct summation.
    Brute,
    /// Empty domain.
    Empty,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Mixed => "mixed",
            Self::Pure => "pure",
            Self::Degenerate => "degenerate",
            Self::Constant => "constant",
            Self::Closed => "closed",
            Self::Brute => "brute",
            Self::Empty => "empty",
        };
        f.write_str(s)
    }
}

/// An edge of the trace: `p^{p_exp}·e(phase)` times the child's value.
#[derive(Clone, Debug)]
pub struct TraceEdge {
    pub alpha: Option<u64>,
    /// `σ` for local terms, `ℓ` for degenerate rewrites.
    pub param: u32,
    pub p_exp: u32,
    pub phase: Root,
    pub child: Arc<ReductionTrace>,
}

/// The tree of reductions behind a fast evaluation.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub modulus: PrimePower,
    pub kind: StepKind,
    pub label: String,
    pub t: Option<u32>,
    pub value: SumValue,
    pub edges: Vec<TraceEdge>,
}

impl ReductionTrace {
    fn leaf(
        modulus: PrimePower,
        kind: StepKind,
        label: String,
        t: Option<u32>,
        value: SumValue,
    ) -> Arc<Self> {
        Arc::new(Self {
            modulus,
            kind,
            label,
            t,
            value,
            edges: Vec::new(),
        })
    }

    pub fn depth(&self) -> usize {
        1 + self
            .edges
            .iter()
            .map(|e| e.child.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .edges
            .iter()
            .map(|e| e.child.node_count())
            .sum::<usize>()
    }

    /// Recomputes the value from leaves and edge prefactors.
    pub fn recompute(&self) -> SumValue {
        if self.edges.is_empty() {
            return self.value.clone();
        }
        let p = self.modulus.p();
        self.edges.iter().fold(SumValue::zero(), |acc, e| {
            acc.add(
                &e.child
                    .recompute()
                    .mul_root(e.phase)
                    .scale(p_power(p, e.p_exp)),
            )
        })
    }

    /// Indented text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0, None);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize, edge: Option<&TraceEdge>) {
        let pad = "  ".repeat(indent);
        let mut head = format!("{pad}[{}] mod {}", self.kind, self.modulus);
        if let Some(e) = edge {
            if let Some(a) = e.alpha {
                let _ = write!(head, " α={a}");
            }
            let name = if self.kind == StepKind::Degenerate || e.alpha.is_none() {
                "ℓ"
            } else {
                "σ"
            };
            let _ = write!(
                head,
                " {name}={} prefactor={}^{}·e({}/{})",
                e.param,
                self.modulus.p(),
                e.p_exp,
                e.phase.num,
                e.phase.den
            );
        }
        if let Some(t) = self.t {
            let _ = write!(head, " t={t}");
        }
        let _ = writeln!(
            out,
            "{head} {}  |S|={:.6}",
            self.label,
            self.value.magnitude()
        );
        for e in &self.edges {
            e.child.render_into(out, indent + 1, Some(e));
        }
    }
}

type MemoKey = (String, u64, u32, Option<Vec<bool>>);

/// Recursive evaluator with a memo of pure subproblems.
#[derive(Debug, Default)]
pub struct Evaluator {
    memo: HashMap<MemoKey, Arc<ReductionTrace>>,
}

/// A local term with its evaluated pure subproblem.
#[derive(Clone, Debug)]
pub struct PlannedTerm {
    pub shape: TermShape,
    pub sub: Arc<ReductionTrace>,
}

/// The `χ`-independent part of a reduction for one `c_χ` class.
#[derive(Clone, Debug)]
pub struct ClassPlan {
    pub t: u32,
    pub terms: Vec<PlannedTerm>,
}

impl ClassPlan {
    /// `Σ p^{p_exp} e(phase(α)) S_sub`.
    pub fn assemble(&self, p: u64, mut phase: impl FnMut(u64) -> Root) -> SumValue {
        self.terms.iter().fold(SumValue::zero(), |acc, term| {
            acc.add(
                &term
                    .sub
                    .value
                    .mul_root(phase(term.shape.alpha))
                    .scale(p_power(p, term.shape.p_exp)),
            )
        })
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Value and trace of `S(χ, g, f, p^m)`.
    pub fn eval(
        &mut self,
        f: &RatFunc,
        g: &RatFunc,
        chi: &MultChar,
    ) -> Result<(SumValue, Arc<ReductionTrace>)> {
        let trace = self.node(f, g, chi, None, 0, chi.pp().m())?;
        Ok((trace.value.clone(), trace))
    }

    /// The class plan for `c_χ` at modulus `pp`, or `None` when the reduction
    /// to pure sums does not apply.
    pub fn class_plan(
        &mut self,
        f: &RatFunc,
        g: &RatFunc,
        c_chi: u64,
        pp: PrimePower,
    ) -> Result<Option<ClassPlan>> {
        let p = pp.p();
        if f.ord_p(p).is_some_and(|o| o < 0) || g.ord_p(p) != Some(0) {
            return Ok(None);
        }
        let Some((t, shapes)) = reduction_shapes(f, g, c_chi, pp, None)? else {
            return Ok(None);
        };
        let terms = self.plan_terms(shapes, pp, 1, pp.m())?;
        Ok(Some(ClassPlan { t, terms }))
    }

    fn plan_terms(
        &mut self,
        shapes: Vec<TermShape>,
        pp: PrimePower,
        depth: u32,
        cap: u32,
    ) -> Result<Vec<PlannedTerm>> {
        shapes
            .into_iter()
            .map(|shape| {
                let sub = match &shape.sub {
                    Some((gp, sub_pp)) => self.node(
                        &RatFunc::from_poly(gp.clone()),
                        &RatFunc::one(),
                        &MultChar::principal(*sub_pp),
                        None,
                        depth,
                        cap,
                    )?,
                    None => ReductionTrace::leaf(
                        pp,
                        StepKind::Closed,
                        String::new(),
                        None,
                        SumValue::one(),
                    ),
                };
                Ok(PlannedTerm { shape, sub })
            })
            .collect()
    }

    fn label(f: &RatFunc, g: &RatFunc, chi: &MultChar) -> String {
        if g == &RatFunc::one() && chi.is_principal() {
            format!("S({f})")
        } else {
            format!("S(χ[c={}], {g}, {f})", chi.c())
        }
    }

    fn node(
        &mut self,
        f: &RatFunc,
        g: &RatFunc,
        chi: &MultChar,
        mask: Option<&ResidueMask>,
        depth: u32,
        cap: u32,
    ) -> Result<Arc<ReductionTrace>> {
        assert!(
            depth <= cap,
            "reduction depth exceeded the exponent of the top modulus"
        );
        let pp = chi.pp();
        let (p, m) = (pp.p(), pp.m());
        let pure = g == &RatFunc::one() && chi.is_principal();
        let key = pure.then(|| (f.serialize(), p, m, mask.map(|mk| mk.to_vec())));
        if let Some(hit) = key.as_ref().and_then(|k| self.memo.get(k)) {
            return Ok(hit.clone());
        }
        let label = Self::label(f, g, chi);
        let trace = self.node_uncached(f, g, chi, mask, depth, cap, label, pure)?;
        if let Some(k) = key {
            self.memo.insert(k, trace.clone());
        }
        Ok(trace)
    }

    #[allow(clippy::too_many_arguments)]
    fn node_uncached(
        &mut self,
        f: &RatFunc,
        g: &RatFunc,
        chi: &MultChar,
        mask: Option<&ResidueMask>,
        depth: u32,
        cap: u32,
        label: String,
        pure: bool,
    ) -> Result<Arc<ReductionTrace>> {
        let pp = chi.pp();
        let (p, m) = (pp.p(), pp.m());
        let brute = |label| {
            ReductionTrace::leaf(
                pp,
                StepKind::Brute,
                label,
                None,
                brute_sum_masked(f, g, chi, mask.cloned()),
            )
        };
        if f.ord_p(p).is_some_and(|o| o < 0) || g.ord_p(p) != Some(0) {
            return Ok(ReductionTrace::leaf(
                pp,
                StepKind::Empty,
                label,
                None,
                SumValue::zero(),
            ));
        }
        if m == 1 {
            return Ok(brute(label));
        }
        if let Some((t, shapes)) = reduction_shapes(f, g, chi.c_chi(), pp, mask)? {
            let terms = self.plan_terms(shapes, pp, depth + 1, cap)?;
            let mut edges = Vec::with_capacity(terms.len());
            let mut value = SumValue::zero();
            for term in terms {
                let phase =
                    summand_root(f, g, chi, term.shape.alpha).expect("critical residue in domain");
                value = value.add(
                    &term
                        .sub
                        .value
                        .mul_root(phase)
                        .scale(p_power(p, term.shape.p_exp)),
                );
                edges.push(TraceEdge {
                    alpha: Some(term.shape.alpha),
                    param: term.shape.sigma,
                    p_exp: term.shape.p_exp,
                    phase,
                    child: term.sub,
                });
            }
            let kind = if pure {
                StepKind::Pure
            } else {
                StepKind::Mixed
            };
            return Ok(Arc::new(ReductionTrace {
                modulus: pp,
                kind,
                label,
                t: Some(t),
                value,
                edges,
            }));
        }
        let cls = match classify_masked(f, g, chi, mask) {
            Ok(c) => c,
            Err(crate::Error::EmptySum) => {
                return Ok(ReductionTrace::leaf(
                    pp,
                    StepKind::Empty,
                    label,
                    None,
                    SumValue::zero(),
                ))
            }
            Err(e) => return Err(e),
        };
        if cls.kind == ClassKind::NonDegenerate {
            return Ok(brute(label));
        }
        let red = degenerate_reduce_masked(f, g, chi, mask)?;
        let (l, phase, child) = match &red {
            DegenerateReduction::ConstantOnDomain { phase, domain, .. } => {
                let value = SumValue::single(*phase, *domain as i64);
                return Ok(ReductionTrace::leaf(
                    pp,
                    StepKind::Constant,
                    label,
                    None,
                    value,
                ));
            }
            DegenerateReduction::Mixed {
                dec,
                phase,
                f: sf,
                g: sg,
                chi: schi,
                mask: smask,
            } => (
                dec.l,
                *phase,
                self.node(sf, sg, schi, Some(smask), depth + 1, cap)?,
            ),
            DegenerateReduction::Pure {
                dec,
                phase,
                f: sf,
                pp: spp,
                mask: smask,
            } => (
                dec.l,
                *phase,
                self.node(
                    sf,
                    &RatFunc::one(),
                    &MultChar::principal(*spp),
                    Some(smask),
                    depth + 1,
                    cap,
                )?,
            ),
        };
        let value = child.value.mul_root(phase).scale(p_power(p, l));
        let edge = TraceEdge {
            alpha: None,
            param: l,
            p_exp: l,
            phase,
            child,
        };
        Ok(Arc::new(ReductionTrace {
            modulus: pp,
            kind: StepKind::Degenerate,
            label,
            t: None,
            value,
            edges: vec![edge],
        }))
    }
}

/// Evaluates `S(χ, g, f, p^m)` through the reductions, with brute force at the leaves.
pub fn fast_eval(
    f: &RatFunc,
    g: &RatFunc,
    chi: &MultChar,
) -> Result<(SumValue, Arc<ReductionTrace>)> {
    Evaluator::new().eval(f, g, chi)
}
