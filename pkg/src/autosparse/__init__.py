"""autosparse: one sparse matrix type, three storage formats, switched
automatically per operation.

The user-facing SpMat keeps its elements in compressed sparse column
form at rest, hops to a red-black tree for element-wise construction
and to a coordinate list for bulk index transforms, and converts back
lazily the next time a CSC operation runs.  A small expression layer
delays composed arithmetic and fuses known patterns (most notably
trace(A.t() @ B)) before any kernel executes.
"""

from .csc import CscData, Dims, Triplet
from .coo import CooData
from .errors import (
    AppendOrderError,
    CoordinateError,
    CorrectnessError,
    CorruptionError,
    DimensionError,
    DomainError,
    DuplicateEntryError,
    MatrixMarketError,
    NormOrderError,
    ResourceLimitError,
    ShapeError,
    SparseError,
)
from .expr import (
    Add,
    Expr,
    FusedTraceAtB,
    Leaf,
    Mul,
    ScalarMul,
    Sub,
    Trace,
    Transpose,
    evaluate,
    evaluate_counting,
    fused_trace_at_b,
    lift,
    rewrite,
    shape_of,
)
from .hybrid import Format, SpMat
from .io import load_mm, render_text, save_mm
from .ops import (
    Span,
    add,
    diag,
    kron,
    mat_times_vec,
    matmul,
    max_dim,
    min_dim,
    norm,
    normalise,
    repmat,
    scalar_mul,
    scaled_sum,
    set_diag,
    set_submat,
    speye,
    sprandu,
    submat,
    subtract,
    sum_dim,
    trace,
    transpose,
    vec_times_mat,
)
from .rbt import RbtStore, decode_index, encode_index

__version__ = "0.1.0"

__all__ = [
    "Add",
    "AppendOrderError",
    "CooData",
    "CoordinateError",
    "CorrectnessError",
    "CorruptionError",
    "CscData",
    "DimensionError",
    "Dims",
    "DomainError",
    "DuplicateEntryError",
    "Expr",
    "Format",
    "FusedTraceAtB",
    "Leaf",
    "MatrixMarketError",
    "Mul",
    "NormOrderError",
    "RbtStore",
    "ResourceLimitError",
    "ScalarMul",
    "ShapeError",
    "SpMat",
    "Span",
    "SparseError",
    "Sub",
    "Trace",
    "Transpose",
    "Triplet",
    "add",
    "decode_index",
    "diag",
    "encode_index",
    "evaluate",
    "evaluate_counting",
    "fused_trace_at_b",
    "kron",
    "lift",
    "load_mm",
    "mat_times_vec",
    "matmul",
    "max_dim",
    "min_dim",
    "norm",
    "normalise",
    "render_text",
    "repmat",
    "rewrite",
    "save_mm",
    "scalar_mul",
    "scaled_sum",
    "set_diag",
    "set_submat",
    "shape_of",
    "speye",
    "sprandu",
    "submat",
    "subtract",
    "sum_dim",
    "trace",
    "transpose",
    "vec_times_mat",
]
