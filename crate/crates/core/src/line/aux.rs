use crate::caps;
use crate::error::{check_cap, usage, Error, Result};
use crate::prob::{Axis, Kernel, Odometer, Pmf};
use crate::{ConditionalKernel, JointPmf};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::pairs::*;

/// Conditional-MI threshold treated as zero.
pub const ZERO_CMI: f64 = 1e-9;

/// Encoder structure at intermediate nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Functional,
    ActionDependent,
    Unrestricted,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "functional" => Ok(Mode::Functional),
            "action-dependent" => Ok(Mode::ActionDependent),
            "unrestricted" => Ok(Mode::Unrestricted),
            _ => Err(usage(format!("unknown mode {s}"))),
        }
    }
}

/// h nodes with action alphabets and a target pmf over X1..Xh.
#[derive(Clone, Debug, Serialize)]
pub struct NetworkSpec {
    pub h: usize,
    pub alphabets: Vec<usize>,
    pub target: JointPmf,
}

impl NetworkSpec {
    pub fn new(target: JointPmf) -> Result<Self> {
        let h = target.axes().len();
        if h < 2 {
            return Err(usage("a line needs at least two nodes"));
        }
        for (k, a) in target.axes().iter().enumerate() {
            if a.label != x_label(k + 1) {
                return Err(usage(format!("target axis {k} must be labeled {}", x_label(k + 1))));
            }
        }
        Ok(NetworkSpec { h, alphabets: target.sizes(), target })
    }

    pub fn x_labels(&self) -> Vec<String> {
        (1..=self.h).map(x_label).collect()
    }

    pub fn x_axes(&self) -> &[Axis] {
        self.target.axes()
    }
}

/// Auxiliary alphabet sizes; size 1 is a constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxLayout {
    /// One per pair, in generation order.
    pub a: Vec<usize>,
    /// One per hop 1..h−1.
    pub b: Vec<usize>,
    /// One per node 2..h.
    pub c: Vec<usize>,
}

impl AuxLayout {
    pub fn a_size(&self, h: usize, p: IndexPair) -> usize {
        self.a[pair_index(h, p)]
    }

    /// Axes of the full joint: A's in generation order, X1, then per hop B, C, X.
    pub fn joint_axes(&self, network: &NetworkSpec) -> Vec<Axis> {
        let h = network.h;
        let mut axes: Vec<Axis> = order_pairs(h)
            .into_iter()
            .zip(&self.a)
            .map(|(p, &s)| Axis::new(a_label(p), s))
            .collect();
        axes.push(Axis::new(x_label(1), network.alphabets[0]));
        for j in 1..h {
            axes.push(Axis::new(b_label(j), self.b[j - 1]));
            axes.push(Axis::new(c_label(j + 1), self.c[j - 1]));
            axes.push(Axis::new(x_label(j + 1), network.alphabets[j]));
        }
        axes
    }
}

/// How one auxiliary is tied to the actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuxChoice {
    Constant,
    /// Copy of action X_k.
    EqualsAction(usize),
    /// Deterministic function of the listed actions; `table` is row-major over them.
    Function { of: Vec<usize>, size: usize, table: Vec<usize> },
    /// Channel from the listed actions; `table` rows are conditional pmfs.
    Channel { of: Vec<usize>, size: usize, table: Vec<f64> },
}

impl AuxChoice {
    pub fn size(&self, network: &NetworkSpec) -> usize {
        match self {
            AuxChoice::Constant => 1,
            AuxChoice::EqualsAction(k) => network.alphabets[k - 1],
            AuxChoice::Function { size, .. } | AuxChoice::Channel { size, .. } => *size,
        }
    }

    /// Kernel from the actions X1..Xh to this auxiliary, labeled `label`.
    fn kernel(&self, network: &NetworkSpec, label: &str) -> Result<(Vec<usize>, ConditionalKernel)> {
        let size = self.size(network);
        let out = Axis::new(label, size);
        let parents = |of: &[usize]| -> Result<Vec<Axis>> {
            of.iter()
                .map(|&k| {
                    if k == 0 || k > network.h {
                        Err(usage(format!("{label}: action X{k} does not exist")))
                    } else {
                        Ok(Axis::new(x_label(k), network.alphabets[k - 1]))
                    }
                })
                .collect()
        };
        match self {
            AuxChoice::Constant => Ok((vec![], Kernel::deterministic(vec![], out, |_| 0)?)),
            AuxChoice::EqualsAction(k) => {
                let g = parents(&[*k])?;
                Ok((vec![*k], Kernel::deterministic(g, out, |x| x[0])?))
            }
            AuxChoice::Function { of, table, .. } => {
                let g = parents(of)?;
                let len: usize = g.iter().map(|a| a.size).product();
                if table.len() != len {
                    return Err(usage(format!("{label}: function table needs {len} entries")));
                }
                let sizes: Vec<usize> = g.iter().map(|a| a.size).collect();
                let k = Kernel::deterministic(g, out, |x| {
                    let f = x.iter().zip(&sizes).fold(0, |f, (&v, &s)| f * s + v);
                    table[f]
                })?;
                Ok((of.clone(), k))
            }
            AuxChoice::Channel { of, table, .. } => {
                let g = parents(of)?;
                Ok((of.clone(), Kernel::new(g, vec![out], table.clone())?))
            }
        }
    }
}

/// Per-auxiliary choices; anything unlisted defaults to constant A and B, C_i = X_i.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuxAssignment {
    pub a: BTreeMap<IndexPair, AuxChoice>,
    pub b: BTreeMap<usize, AuxChoice>,
    pub c: BTreeMap<usize, AuxChoice>,
}

impl AuxAssignment {
    pub fn choice_a(&self, p: IndexPair) -> AuxChoice {
        self.a.get(&p).cloned().unwrap_or(AuxChoice::Constant)
    }

    pub fn choice_b(&self, hop: usize) -> AuxChoice {
        self.b.get(&hop).cloned().unwrap_or(AuxChoice::Constant)
    }

    pub fn choice_c(&self, node: usize) -> AuxChoice {
        self.c.get(&node).cloned().unwrap_or(AuxChoice::EqualsAction(node))
    }
}

/// Joint of the target actions and extra variables, each drawn through its
/// own channel from the actions.
pub fn extend_with_channels(network: &NetworkSpec, extra: &[(String, AuxChoice)]) -> Result<JointPmf> {
    let mut axes = network.x_axes().to_vec();
    let mut kernels = Vec::new();
    for (label, choice) in extra {
        axes.push(Axis::new(label.clone(), choice.size(network)));
        kernels.push(choice.kernel(network, label)?);
    }
    let cells = caps::product(axes.iter().map(|a| a.size));
    check_cap("auxiliary joint", cells, caps::tensor_cap())?;
    let h = network.h;
    Pmf::from_fn(axes, |idx| {
        let mut w = network.target.get(&idx[..h]);
        for (k, (of, kern)) in kernels.iter().enumerate() {
            if w == 0.0 {
                break;
            }
            let g = of.iter().fold(0, |f, &x| f * network.alphabets[x - 1] + idx[x - 1]);
            w *= kern.prob(g, idx[h + k]);
        }
        w
    })
}

/// Product of kernels over `axes`; every axis must be the output of exactly one kernel.
pub fn assemble(axes: Vec<Axis>, kernels: &[ConditionalKernel]) -> Result<JointPmf> {
    let cells = caps::product(axes.iter().map(|a| a.size));
    check_cap("kernel assembly", cells, caps::tensor_cap())?;
    let pos = |l: &str| -> Result<usize> {
        axes.iter()
            .position(|a| a.label == l)
            .ok_or_else(|| usage(format!("kernel axis {l} not in the joint")))
    };
    let mut plans = Vec::with_capacity(kernels.len());
    for k in kernels {
        let mut vars = Vec::new();
        for a in k.given_axes().iter().chain(k.output_axes()) {
            let p = pos(&a.label)?;
            if axes[p].size != a.size {
                return Err(usage(format!("kernel axis {} has the wrong size", a.label)));
            }
            vars.push(p);
        }
        plans.push(vars);
    }
    let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    let mut weights = Vec::with_capacity(cells as usize);
    let mut od = Odometer::new(&sizes);
    while let Some(idx) = od.current() {
        let mut w = 1.0;
        for (k, vars) in kernels.iter().zip(&plans) {
            let f = vars.iter().fold(0, |f, &v| f * sizes[v] + idx[v]);
            w *= k.weights()[f];
            if w == 0.0 {
                break;
            }
        }
        weights.push(w);
        od.advance();
    }
    Pmf::new(axes, weights)
}

pub fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Named conditional-independence check with its conditional MI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub name: String,
    pub cmi: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub chains: Vec<ChainCheck>,
    /// L1 between the declared joint and the kernel reassembly.
    pub factorization_l1: f64,
    /// L1 between the action marginal and the target.
    pub target_l1: f64,
    pub tolerance: f64,
    pub valid: bool,
}

impl ValidationReport {
    pub fn violations(&self) -> Vec<&ChainCheck> {
        self.chains.iter().filter(|c| !c.ok).collect()
    }
}

/// The auxiliary system: a joint over all A, B, C and actions plus the
/// generation-order kernels derived from (or defining) it.
#[derive(Clone, Debug, Serialize)]
pub struct AuxSpec {
    pub network: NetworkSpec,
    pub layout: AuxLayout,
    joint: JointPmf,
    kernels: Vec<ConditionalKernel>,
}

/// (output, given) label lists of the generation-order kernels.
fn kernel_shapes(h: usize) -> Vec<(String, Vec<String>)> {
    let labels = |ps: Vec<IndexPair>| -> Vec<String> { ps.into_iter().map(a_label).collect() };
    let mut out = Vec::new();
    for p in order_pairs(h) {
        out.push((a_label(p), labels(phi(h, p))));
    }
    out.push((x_label(1), labels(psi(h, 1))));
    for j in 1..h {
        let mut g = vec![x_label(j)];
        g.extend(labels(phi_bar(h, IndexPair::new(j, j + 1))));
        out.push((b_label(j), g));
        let mut g = labels(psi(h, j + 1));
        g.push(b_label(j));
        out.push((c_label(j + 1), g.clone()));
        g.push(c_label(j + 1));
        out.push((x_label(j + 1), g));
    }
    out
}

impl AuxSpec {
    /// Derives the generation-order kernels from a declared joint.
    pub fn from_joint(network: NetworkSpec, layout: AuxLayout, joint: JointPmf) -> Result<Self> {
        Self::check_layout(&network, &layout)?;
        let axes = layout.joint_axes(&network);
        let order: Vec<&str> = axes.iter().map(|a| a.label.as_str()).collect();
        if joint.axes().len() != axes.len() {
            return Err(usage("declared joint has the wrong number of axes"));
        }
        let joint = joint.marginalize(&order)?;
        if joint.axes() != axes.as_slice() {
            return Err(usage("declared joint axes do not match the layout"));
        }
        let kernels = kernel_shapes(network.h)
            .into_iter()
            .map(|(o, g)| {
                let g: Vec<&str> = g.iter().map(String::as_str).collect();
                joint.condition_on(&[o.as_str()], &g)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AuxSpec { network, layout, joint, kernels })
    }

    /// Assembles the joint from generation-order kernels (same order as the joint axes).
    pub fn from_kernels(
        network: NetworkSpec,
        layout: AuxLayout,
        kernels: Vec<ConditionalKernel>,
    ) -> Result<Self> {
        Self::check_layout(&network, &layout)?;
        let shapes = kernel_shapes(network.h);
        if kernels.len() != shapes.len() {
            return Err(usage(format!("expected {} kernels", shapes.len())));
        }
        for (k, (o, g)) in kernels.iter().zip(&shapes) {
            let ko: Vec<&str> = k.output_axes().iter().map(|a| a.label.as_str()).collect();
            let kg: Vec<&str> = k.given_axes().iter().map(|a| a.label.as_str()).collect();
            if ko != [o.as_str()] || kg != g.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(usage(format!("kernel for {o} must be given ({})", g.join(","))));
            }
        }
        let joint = assemble(layout.joint_axes(&network), &kernels)?;
        Ok(AuxSpec { network, layout, joint, kernels })
    }

    /// Builds the joint target × Π channels(aux | actions) from per-auxiliary choices.
    pub fn from_assignment(network: NetworkSpec, assignment: &AuxAssignment) -> Result<Self> {
        let h = network.h;
        let mut extra = Vec::new();
        for p in order_pairs(h) {
            extra.push((a_label(p), assignment.choice_a(p)));
        }
        for j in 1..h {
            extra.push((b_label(j), assignment.choice_b(j)));
            extra.push((c_label(j + 1), assignment.choice_c(j + 1)));
        }
        let layout = AuxLayout {
            a: order_pairs(h).into_iter().map(|p| assignment.choice_a(p).size(&network)).collect(),
            b: (1..h).map(|j| assignment.choice_b(j).size(&network)).collect(),
            c: (2..=h).map(|i| assignment.choice_c(i).size(&network)).collect(),
        };
        let joint = extend_with_channels(&network, &extra)?;
        Self::from_joint(network, layout, joint)
    }

    fn check_layout(network: &NetworkSpec, layout: &AuxLayout) -> Result<()> {
        let h = network.h;
        if layout.a.len() != h * (h - 1) / 2 || layout.b.len() != h - 1 || layout.c.len() != h - 1 {
            return Err(usage("auxiliary layout does not match the node count"));
        }
        if layout.a.iter().chain(&layout.b).chain(&layout.c).any(|&s| s == 0) {
            return Err(usage("auxiliary alphabets must be nonempty"));
        }
        Ok(())
    }

    pub fn h(&self) -> usize {
        self.network.h
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// Generation-order kernels: A's, X1, then per hop B, C, X.
    pub fn kernels(&self) -> &[ConditionalKernel] {
        &self.kernels
    }

    pub fn all_a_labels(&self) -> Vec<String> {
        order_pairs(self.h()).into_iter().map(a_label).collect()
    }

    /// H(V) ≤ ZERO_CMI.
    pub fn is_constant(&self, label: &str) -> Result<bool> {
        Ok(self.joint.entropy(&[label])? <= ZERO_CMI)
    }

    /// I(a; b | c) on the joint, by label.
    pub fn info(&self, a: &[String], b: &[String], c: &[String]) -> Result<f64> {
        self.joint.info_measure(&strs(a), &strs(b), &strs(c))
    }

    /// Rejects specs that break the auxiliary restrictions of `mode`.
    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        let h = self.h();
        for p in order_pairs(h) {
            if p.i > 1 && mode != Mode::Unrestricted && !self.is_constant(&a_label(p))? {
                return Err(usage(format!("{mode:?} mode needs {} constant", a_label(p))));
            }
        }
        if mode == Mode::Functional {
            for j in 1..h {
                if !self.is_constant(&b_label(j))? {
                    return Err(usage(format!("functional mode needs {} constant", b_label(j))));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.validate_with(ZERO_CMI)
    }

    pub fn validate_with(&self, tol: f64) -> Result<ValidationReport> {
        let h = self.h();
        let mut chains = Vec::new();
        let mut push = |name: String, cmi: f64| chains.push(ChainCheck { name, ok: cmi <= tol, cmi });
        let all_a = self.all_a_labels();
        for p in order_pairs(h) {
            let given: Vec<String> = phi(h, p).into_iter().map(a_label).collect();
            let me = a_label(p);
            let others: Vec<String> =
                all_a.iter().filter(|l| **l != me && !given.contains(l)).cloned().collect();
            if others.is_empty() {
                continue;
            }
            let cmi = self.info(std::slice::from_ref(&me), &others, &given)?;
            push(format!("{me} ⫫ other A | A_phi{p}"), cmi);
        }
        let everything: Vec<String> = self.joint.labels().iter().map(|s| s.to_string()).collect();
        for i in 1..=h {
            let mut given: Vec<String> = psi(h, i).into_iter().map(a_label).collect();
            if i > 1 {
                given.push(b_label(i - 1));
            }
            if i < h {
                given.push(b_label(i));
            }
            let xi = x_label(i);
            let rest: Vec<String> = everything
                .iter()
                .filter(|l| {
                    **l != xi && !given.contains(l) && (l.starts_with('X') || l.starts_with('A') || l.starts_with('B'))
                })
                .cloned()
                .collect();
            if rest.is_empty() {
                continue;
            }
            let cmi = self.info(std::slice::from_ref(&xi), &rest, &given)?;
            push(format!("{xi} ⫫ rest | A_psi({i}), adjacent B"), cmi);
        }
        for j in 1..h {
            let mut given = all_a.clone();
            given.push(b_label(j));
            let upstream: Vec<String> = (1..=j).map(x_label).collect();
            let cmi = self.info(&[c_label(j + 1)], &upstream, &given)?;
            push(format!("{} ⫫ X1..X{j} | A, {}", c_label(j + 1), b_label(j)), cmi);
        }
        let all_b_constant = (1..h).map(|j| self.is_constant(&b_label(j))).collect::<Result<Vec<_>>>()?;
        if h >= 3 && all_b_constant.iter().all(|&c| c) {
            let a1h = a_label(IndexPair::new(1, h));
            let cmi = self.info(&[x_label(1)], &[x_label(h)], std::slice::from_ref(&a1h))?;
            push(format!("B constant: X1 ⫫ X{h} | {a1h}"), cmi);
        }
        let assembled = assemble(self.joint.axes().to_vec(), &self.kernels)?;
        let factorization_l1 = assembled.l1(&self.joint)?;
        let xs = self.network.x_labels();
        let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
        let target_l1 = self.joint.marginalize(&xs)?.l1(&self.network.target)?;
        let valid = chains.iter().all(|c| c.ok) && factorization_l1 <= tol && target_l1 <= tol;
        Ok(ValidationReport { chains, factorization_l1, target_l1, tolerance: tol, valid })
    }
}
