//! Graph tracing and the reverse sweep.

use std::collections::{HashMap, HashSet};

use super::{Scalar, Tensor};

/// Topologically ordered slice of the recorded graph reachable from one
/// root: every tensor's parents appear before it.
pub struct Tape<T: Scalar> {
    order: Vec<Tensor<T>>,
}

impl<T: Scalar> Tape<T> {
    /// Iterative post-order DFS from `root`.
    pub fn trace(root: &Tensor<T>) -> Self {
        enum Step<T: Scalar> {
            Enter(Tensor<T>),
            Exit(Tensor<T>),
        }
        let mut order = Vec::new();
        let mut entered = HashSet::new();
        let mut stack = vec![Step::Enter(root.clone())];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(t) => {
                    if !entered.insert(t.id()) {
                        continue;
                    }
                    stack.push(Step::Exit(t.clone()));
                    if let Some(node) = t.node() {
                        for p in &node.parents {
                            if !entered.contains(&p.id()) {
                                stack.push(Step::Enter(p.clone()));
                            }
                        }
                    }
                }
                Step::Exit(t) => order.push(t),
            }
        }
        Tape { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn nodes(&self) -> &[Tensor<T>] {
        &self.order
    }

    /// Every tensor's parents precede it in the order.
    pub fn is_topologically_sorted(&self) -> bool {
        let mut seen = HashSet::new();
        for t in &self.order {
            if let Some(node) = t.node() {
                if !node.parents.iter().all(|p| seen.contains(&p.id())) {
                    return false;
                }
            }
            seen.insert(t.id());
        }
        true
    }

    /// Reverse sweep seeded with dL/droot = 1. Gradients of interior nodes
    /// live in a scratch map and are dropped as soon as they are consumed;
    /// leaves accumulate into their `grad` slot.
    pub(crate) fn backprop(&self, root: &Tensor<T>) {
        let mut scratch: HashMap<u64, Vec<T>> = HashMap::new();
        scratch.insert(root.id(), vec![T::one(); root.numel()]);
        for t in self.order.iter().rev() {
            let Some(g) = scratch.remove(&t.id()) else {
                continue;
            };
            match t.node() {
                Some(node) => {
                    let parent_grads = (node.backward)(t, &g);
                    assert_eq!(
                        parent_grads.len(),
                        node.parents.len(),
                        "{}: backward returned {} gradients for {} parents",
                        node.name,
                        parent_grads.len(),
                        node.parents.len()
                    );
                    for (p, pg) in node.parents.iter().zip(parent_grads) {
                        let Some(pg) = pg else { continue };
                        if !p.requires_grad() {
                            continue;
                        }
                        assert_eq!(
                            pg.len(),
                            p.numel(),
                            "{}: gradient length {} does not match parent shape {:?}",
                            node.name,
                            pg.len(),
                            p.shape()
                        );
                        if p.is_leaf() {
                            p.accumulate_grad(&pg);
                        } else {
                            match scratch.get_mut(&p.id()) {
                                Some(acc) => {
                                    for (a, v) in acc.iter_mut().zip(pg) {
                                        *a = *a + v;
                                    }
                                }
                                None => {
                                    scratch.insert(p.id(), pg);
                                }
                            }
                        }
                    }
                }
                // The root itself may be a requires_grad leaf.
                None => {
                    if t.requires_grad() {
                        t.accumulate_grad(&g);
                    }
                }
            }
        }
    }
}
