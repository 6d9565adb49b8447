"""Delayed-evaluation expression layer.

Composing operations builds a lightweight immutable description tree
instead of running kernels.  ``evaluate`` first rewrites known patterns
(fused trace, double transpose, scalar folding), then dispatches
post-order to the eager kernels, fusing scale-into-merge where the
shape of the tree allows it.

Leaves reference their operand matrices; operands must outlive
evaluation, and mutating one between build and evaluate is undefined.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels, ops
from .csc import Dims
from .errors import ShapeError
from .hybrid import SpMat


class Expr:
    """Base expression node; immutable, structurally comparable."""

    __slots__ = ()

    @property
    def shape(self) -> Dims:
        raise NotImplementedError

    def t(self) -> "Expr":
        return Transpose(self)

    def __add__(self, other):
        return Add(self, lift(other))

    def __sub__(self, other):
        return Sub(self, lift(other))

    def __mul__(self, k):
        return ScalarMul(float(k), self)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return Mul(self, lift(other))


def lift(x) -> Expr:
    """Wrap a matrix as a leaf; expressions pass through unchanged."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, SpMat):
        return Leaf(x)
    raise TypeError("cannot build an expression from %r" % type(x).__name__)


@dataclass(frozen=True, eq=True)
class Leaf(Expr):
    mat: SpMat

    @property
    def shape(self) -> Dims:
        return self.mat.dims


@dataclass(frozen=True, eq=True)
class ScalarMul(Expr):
    k: float
    child: Expr

    @property
    def shape(self) -> Dims:
        return self.child.shape


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ShapeError("addition needs equal shapes", self.left.shape, self.right.shape)

    @property
    def shape(self) -> Dims:
        return self.left.shape


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ShapeError("subtraction needs equal shapes", self.left.shape, self.right.shape)

    @property
    def shape(self) -> Dims:
        return self.left.shape


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.left.shape.n_cols != self.right.shape.n_rows:
            raise ShapeError("inner dimensions differ", self.left.shape, self.right.shape)

    @property
    def shape(self) -> Dims:
        return Dims(self.left.shape.n_rows, self.right.shape.n_cols)


@dataclass(frozen=True, eq=True)
class Transpose(Expr):
    child: Expr

    @property
    def shape(self) -> Dims:
        s = self.child.shape
        return Dims(s.n_cols, s.n_rows)


@dataclass(frozen=True, eq=True)
class Trace(Expr):
    child: Expr

    @property
    def shape(self) -> Dims:
        return Dims(1, 1)


@dataclass(frozen=True, eq=True)
class FusedTraceAtB(Expr):
    """trace(left^T @ right) without the transpose or the product."""

    left: Expr
    right: Expr

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ShapeError("fused trace needs equal shapes", self.left.shape, self.right.shape)

    @property
    def shape(self) -> Dims:
        return Dims(1, 1)


def shape_of(e: Expr) -> Dims:
    return e.shape


def _rewrite_node(e: Expr) -> Expr:
    if isinstance(e, Leaf):
        return e
    if isinstance(e, ScalarMul):
        child = _rewrite_node(e.child)
        if isinstance(child, ScalarMul):
            return ScalarMul(e.k * child.k, child.child)
        return ScalarMul(e.k, child)
    if isinstance(e, Transpose):
        child = _rewrite_node(e.child)
        if isinstance(child, Transpose):
            return child.child
        return Transpose(child)
    if isinstance(e, Trace):
        child = _rewrite_node(e.child)
        if (
            isinstance(child, Mul)
            and isinstance(child.left, Transpose)
            and child.left.child.shape == child.right.shape
        ):
            return FusedTraceAtB(child.left.child, child.right)
        return Trace(child)
    if isinstance(e, (Add, Sub, Mul, FusedTraceAtB)):
        left = _rewrite_node(e.left)
        right = _rewrite_node(e.right)
        return type(e)(left, right)
    raise TypeError("unknown expression node %r" % type(e).__name__)


def rewrite(e: Expr) -> Expr:
    """Apply the pattern set to fixpoint; never changes the value."""
    while True:
        out = _rewrite_node(e)
        if out == e:
            return out
        e = out


def fused_trace_at_b(a: SpMat, b: SpMat) -> float:
    """Sum of a(i,j)*b(i,j) over coincident nonzeros, equal to
    trace(a^T @ b); nothing is materialised."""
    if a.dims != b.dims:
        raise ShapeError("fused trace needs equal shapes", a.dims, b.dims)
    ma, mb = a.csc(), b.csc()
    return float(
        _kernels.fused_trace(
            a.dims.n_cols,
            ma.values, ma.row_indices, ma.col_offsets,
            mb.values, mb.row_indices, mb.col_offsets,
        )
    )


class _EvalStats:
    __slots__ = ("materialized",)

    def __init__(self):
        self.materialized = 0


def _eval(e: Expr, stats: _EvalStats, fuse: bool):
    """Returns (value, fresh) where fresh marks a matrix built here."""
    if isinstance(e, Leaf):
        return e.mat, False
    if isinstance(e, ScalarMul):
        if fuse and isinstance(e.child, Add):
            # scale during the merge: one pass, one result, no sum temporary
            left, _ = _eval(e.child.left, stats, fuse)
            right, _ = _eval(e.child.right, stats, fuse)
            stats.materialized += 1
            return ops.scaled_sum(left, right, e.k), True
        child, _ = _eval(e.child, stats, fuse)
        stats.materialized += 1
        return ops.scalar_mul(child, e.k), True
    if isinstance(e, Add):
        left, _ = _eval(e.left, stats, fuse)
        right, _ = _eval(e.right, stats, fuse)
        stats.materialized += 1
        return ops.add(left, right), True
    if isinstance(e, Sub):
        left, _ = _eval(e.left, stats, fuse)
        right, _ = _eval(e.right, stats, fuse)
        stats.materialized += 1
        return ops.subtract(left, right), True
    if isinstance(e, Mul):
        left, _ = _eval(e.left, stats, fuse)
        right, _ = _eval(e.right, stats, fuse)
        stats.materialized += 1
        return ops.matmul(left, right), True
    if isinstance(e, Transpose):
        child, _ = _eval(e.child, stats, fuse)
        stats.materialized += 1
        return ops.transpose(child), True
    if isinstance(e, Trace):
        child, _ = _eval(e.child, stats, fuse)
        return ops.trace(child), False
    if isinstance(e, FusedTraceAtB):
        left, _ = _eval(e.left, stats, fuse)
        right, _ = _eval(e.right, stats, fuse)
        return fused_trace_at_b(left, right), False
    raise TypeError("unknown expression node %r" % type(e).__name__)


def evaluate(e: Expr, optimize: bool = True):
    """Run the expression; matrices come back as SpMat, traces as float.

    With optimize=False nothing is rewritten or fused: plain post-order
    kernel dispatch, the reference the optimised path is checked against.
    """
    result, _ = evaluate_counting(e, optimize=optimize)
    return result


def evaluate_counting(e: Expr, optimize: bool = True):
    """Like evaluate, but also reports how many intermediate matrices
    were materialised (the returned matrix, if any, is not counted)."""
    if optimize:
        e = rewrite(e)
    stats = _EvalStats()
    result, fresh = _eval(e, stats, fuse=optimize)
    intermediates = stats.materialized - (1 if fresh else 0)
    return result, intermediates
