//! A small reverse-mode tensor engine.
//!
//! Tensors are immutable handles (`Rc`) around row-major buffers. Every
//! operation materializes its output and, while gradient recording is
//! enabled and some input requires gradients, stores a backward closure on
//! the output node. [`Tensor::backward`] traces the graph into a [`Tape`]
//! (topological order), then walks it in reverse, accumulating gradients
//! into the `requires_grad` leaves that are reachable from the loss.
//!
//! Design limits, deliberate for this codebase:
//! - data lives on the heap in plain `Vec`s; no views except `reshape`,
//!   which shares the buffer (layout is unchanged),
//! - in-place mutation is restricted to leaf tensors (parameter updates,
//!   checkpoint loading, finite-difference probes),
//! - double backward is not supported; backward closures are opaque.

mod scalar;
pub mod shape;
mod tape;

pub mod ops;

#[cfg(test)]
mod tests;

use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;

pub use scalar::Scalar;
pub use tape::Tape;

thread_local! {
    static NEXT_ID: Cell<u64> = const { Cell::new(0) };
    static GRAD_ENABLED: Cell<bool> = const { Cell::new(true) };
}

fn next_id() -> u64 {
    NEXT_ID.with(|c| {
        let id = c.get();
        c.set(id + 1);
        id
    })
}

/// True while operations record backward closures.
pub fn grad_enabled() -> bool {
    GRAD_ENABLED.with(|g| g.get())
}

/// Runs `f` with gradient recording disabled (restored afterwards, also on
/// panic). Outputs created inside do not require gradients.
pub fn no_grad<R>(f: impl FnOnce() -> R) -> R {
    struct Guard(bool);
    impl Drop for Guard {
        fn drop(&mut self) {
            GRAD_ENABLED.with(|g| g.set(self.0));
        }
    }
    let _guard = Guard(GRAD_ENABLED.with(|g| g.replace(false)));
    f()
}

/// Per-parent gradient buffers produced by a backward closure, aligned with
/// `Node::parents`. `None` marks an input with no defined gradient path.
pub(crate) type ParentGrads<T> = Vec<Option<Vec<T>>>;
pub(crate) type BackwardFn<T> = Box<dyn Fn(&Tensor<T>, &[T]) -> ParentGrads<T>>;

pub(crate) struct Node<T: Scalar> {
    pub parents: Vec<Tensor<T>>,
    pub name: &'static str,
    pub backward: BackwardFn<T>,
}

struct Inner<T: Scalar> {
    id: u64,
    shape: Vec<usize>,
    data: Rc<RefCell<Vec<T>>>,
    requires_grad: bool,
    grad: RefCell<Option<Vec<T>>>,
    node: Option<Node<T>>,
}

pub struct Tensor<T: Scalar> {
    inner: Rc<Inner<T>>,
}

impl<T: Scalar> Clone for Tensor<T> {
    fn clone(&self) -> Self {
        Tensor {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<T: Scalar> Tensor<T> {
    /// Leaf tensor that does not require gradients.
    pub fn new(data: Vec<T>, shape: &[usize]) -> Self {
        assert_eq!(
            data.len(),
            shape::numel(shape),
            "tensor: data length {} does not match shape {:?}",
            data.len(),
            shape
        );
        Self::leaf(Rc::new(RefCell::new(data)), shape.to_vec(), false)
    }

    /// Leaf tensor that accumulates gradients (a parameter).
    pub fn param(data: Vec<T>, shape: &[usize]) -> Self {
        assert_eq!(
            data.len(),
            shape::numel(shape),
            "tensor: data length {} does not match shape {:?}",
            data.len(),
            shape
        );
        Self::leaf(Rc::new(RefCell::new(data)), shape.to_vec(), true)
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self::new(vec![T::zero(); shape::numel(shape)], shape)
    }

    pub fn ones(shape: &[usize]) -> Self {
        Self::new(vec![T::one(); shape::numel(shape)], shape)
    }

    pub fn full(shape: &[usize], v: T) -> Self {
        Self::new(vec![v; shape::numel(shape)], shape)
    }

    /// Rank-0 tensor.
    pub fn scalar(v: T) -> Self {
        Self::new(vec![v], &[])
    }

    fn leaf(data: Rc<RefCell<Vec<T>>>, shape: Vec<usize>, requires_grad: bool) -> Self {
        Tensor {
            inner: Rc::new(Inner {
                id: next_id(),
                shape,
                data,
                requires_grad,
                grad: RefCell::new(None),
                node: None,
            }),
        }
    }

    /// Output of an operation. The backward closure is only built (and the
    /// node only recorded) when recording is on and an input needs gradients.
    pub(crate) fn from_op(
        data: Vec<T>,
        shape: Vec<usize>,
        parents: Vec<Tensor<T>>,
        name: &'static str,
        make_backward: impl FnOnce() -> BackwardFn<T>,
    ) -> Self {
        debug_assert_eq!(data.len(), shape::numel(&shape), "{name}: bad output buffer");
        let record = grad_enabled() && parents.iter().any(|p| p.requires_grad());
        let node = record.then(|| Node {
            parents,
            name,
            backward: make_backward(),
        });
        Tensor {
            inner: Rc::new(Inner {
                id: next_id(),
                shape,
                data: Rc::new(RefCell::new(data)),
                requires_grad: record,
                grad: RefCell::new(None),
                node,
            }),
        }
    }

    /// Same buffer, new shape metadata, detached from the graph.
    pub(crate) fn view_leaf(&self, shape: Vec<usize>) -> Self {
        Self::leaf(Rc::clone(&self.inner.data), shape, false)
    }

    /// Records `view` (which shares its parent's buffer) as an op output.
    /// Falls back to the detached view when recording is off.
    pub(crate) fn from_op_shared(
        view: Tensor<T>,
        parents: Vec<Tensor<T>>,
        name: &'static str,
        make_backward: impl FnOnce() -> BackwardFn<T>,
    ) -> Self {
        let record = grad_enabled() && parents.iter().any(|p| p.requires_grad());
        if !record {
            return view;
        }
        Tensor {
            inner: Rc::new(Inner {
                id: next_id(),
                shape: view.inner.shape.clone(),
                data: Rc::clone(&view.inner.data),
                requires_grad: true,
                grad: RefCell::new(None),
                node: Some(Node {
                    parents,
                    name,
                    backward: make_backward(),
                }),
            }),
        }
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn rank(&self) -> usize {
        self.inner.shape.len()
    }

    pub fn numel(&self) -> usize {
        shape::numel(&self.inner.shape)
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    pub fn is_leaf(&self) -> bool {
        self.inner.node.is_none()
    }

    pub(crate) fn node(&self) -> Option<&Node<T>> {
        self.inner.node.as_ref()
    }

    /// Operation that produced this tensor, if recorded.
    pub fn op_name(&self) -> Option<&'static str> {
        self.inner.node.as_ref().map(|n| n.name)
    }

    pub fn data(&self) -> std::cell::Ref<'_, Vec<T>> {
        self.inner.data.borrow()
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.inner.data.borrow().clone()
    }

    /// Value of a single-element tensor.
    pub fn item(&self) -> T {
        assert_eq!(
            self.numel(),
            1,
            "item: expected a single element, got shape {:?}",
            self.shape()
        );
        self.inner.data.borrow()[0]
    }

    pub fn at(&self, index: &[usize]) -> T {
        assert_eq!(index.len(), self.rank(), "at: index rank mismatch");
        let st = shape::strides(self.shape());
        let mut off = 0;
        for (d, (&i, &s)) in index.iter().zip(&st).enumerate() {
            assert!(
                i < self.inner.shape[d],
                "at: index {index:?} out of bounds for shape {:?}",
                self.shape()
            );
            off += i * s;
        }
        self.inner.data.borrow()[off]
    }

    /// Accumulated gradient of a leaf, if backward reached it.
    pub fn grad(&self) -> Option<Vec<T>> {
        self.inner.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        *self.inner.grad.borrow_mut() = None;
    }

    pub(crate) fn accumulate_grad(&self, g: &[T]) {
        debug_assert_eq!(g.len(), self.numel());
        let mut slot = self.inner.grad.borrow_mut();
        match slot.as_mut() {
            Some(acc) => {
                for (a, &v) in acc.iter_mut().zip(g) {
                    *a = *a + v;
                }
            }
            None => *slot = Some(g.to_vec()),
        }
    }

    /// In-place mutation of a leaf buffer (optimizer steps, checkpoint
    /// loading, finite-difference probes). Panics on non-leaf tensors: graph
    /// outputs are immutable once recorded.
    pub fn update_data(&self, f: impl FnOnce(&mut [T])) {
        assert!(
            self.is_leaf(),
            "update_data: refusing to mutate the output of `{}`",
            self.op_name().unwrap_or("?")
        );
        f(&mut self.inner.data.borrow_mut());
    }

    pub fn set_data(&self, values: &[T]) {
        assert_eq!(
            values.len(),
            self.numel(),
            "set_data: length {} does not match shape {:?}",
            values.len(),
            self.shape()
        );
        self.update_data(|d| d.copy_from_slice(values));
    }

    /// New leaf sharing this tensor's buffer, cut off from the graph.
    pub fn detach(&self) -> Self {
        Self::leaf(Rc::clone(&self.inner.data), self.inner.shape.clone(), false)
    }

    /// Reverse-mode sweep from a scalar loss. Populates `grad` on every
    /// `requires_grad` leaf reachable from `self`; intermediate gradients
    /// live only for the duration of the sweep.
    pub fn backward(&self) {
        assert_eq!(
            self.numel(),
            1,
            "backward: loss must be a scalar, got shape {:?}",
            self.shape()
        );
        Tape::trace(self).backprop(self);
    }

    pub fn all_finite(&self) -> bool {
        self.inner.data.borrow().iter().all(|v| v.is_finite())
    }
}

impl<T: Scalar> fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let data = self.inner.data.borrow();
        let head: Vec<String> = data.iter().take(8).map(|v| format!("{v:.4}")).collect();
        write!(
            f,
            "Tensor{{shape: {:?}, requires_grad: {}, op: {:?}, data: [{}{}]}}",
            self.shape(),
            self.requires_grad(),
            self.op_name(),
            head.join(", "),
            if data.len() > 8 { ", .." } else { "" }
        )
    }
}
