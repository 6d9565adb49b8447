"""Red-black tree keyed by linearised column-major index.

Element (row, col) is stored under index = row + col * n_rows, so an
in-order walk is exactly a column-major scan, which makes conversion to
CSC a single linear pass.  Nodes live in flat arena arrays (slot number
= node identity) rather than individual objects; the hot operations are
numba kernels over those arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .csc import CscData, Dims
from .errors import AppendOrderError, CoordinateError, CorruptionError

NIL = -1
RED = 0
BLACK = 1


def encode_index(row: int, col: int, n_rows: int) -> int:
    """Linearised column-major position of (row, col); requires row < n_rows."""
    return row + col * n_rows


def decode_index(index: int, n_rows: int) -> tuple:
    return index % n_rows, index // n_rows


@njit(cache=True)
def _rotate_left(left, right, parent, root, x):
    y = right[x]
    right[x] = left[y]
    if left[y] != NIL:
        parent[left[y]] = x
    parent[y] = parent[x]
    if parent[x] == NIL:
        root = y
    elif x == left[parent[x]]:
        left[parent[x]] = y
    else:
        right[parent[x]] = y
    left[y] = x
    parent[x] = y
    return root


@njit(cache=True)
def _rotate_right(left, right, parent, root, x):
    y = left[x]
    left[x] = right[y]
    if right[y] != NIL:
        parent[right[y]] = x
    parent[y] = parent[x]
    if parent[x] == NIL:
        root = y
    elif x == right[parent[x]]:
        right[parent[x]] = y
    else:
        left[parent[x]] = y
    right[y] = x
    parent[x] = y
    return root


@njit(cache=True)
def _insert_fixup(left, right, parent, color, root, z):
    while z != root and color[parent[z]] == RED:
        gp = parent[parent[z]]
        if parent[z] == left[gp]:
            u = right[gp]
            if u != NIL and color[u] == RED:
                color[parent[z]] = BLACK
                color[u] = BLACK
                color[gp] = RED
                z = gp
            else:
                if z == right[parent[z]]:
                    z = parent[z]
                    root = _rotate_left(left, right, parent, root, z)
                color[parent[z]] = BLACK
                color[gp] = RED
                root = _rotate_right(left, right, parent, root, gp)
        else:
            u = left[gp]
            if u != NIL and color[u] == RED:
                color[parent[z]] = BLACK
                color[u] = BLACK
                color[gp] = RED
                z = gp
            else:
                if z == left[parent[z]]:
                    z = parent[z]
                    root = _rotate_right(left, right, parent, root, z)
                color[parent[z]] = BLACK
                color[gp] = RED
                root = _rotate_left(left, right, parent, root, gp)
    color[root] = BLACK
    return root


@njit(cache=True)
def _insert(keys, vals, left, right, parent, color, root, key, value, slot):
    """Descend from the root, attach a red node at `slot`, rebalance.

    Returns (root, inserted); on an existing key the value is replaced
    and `slot` is left unused.
    """
    y = NIL
    x = root
    while x != NIL:
        y = x
        if key == keys[x]:
            vals[x] = value
            return root, False
        elif key < keys[x]:
            x = left[x]
        else:
            x = right[x]
    keys[slot] = key
    vals[slot] = value
    left[slot] = NIL
    right[slot] = NIL
    parent[slot] = y
    color[slot] = RED
    if y == NIL:
        root = slot
    elif key < keys[y]:
        left[y] = slot
    else:
        right[y] = slot
    return _insert_fixup(left, right, parent, color, root, slot), True


@njit(cache=True)
def _append_at(keys, vals, left, right, parent, color, root, rightmost, key, value, slot):
    """Attach directly below the current rightmost node, skipping the
    descent; the caller guarantees key exceeds every stored key."""
    keys[slot] = key
    vals[slot] = value
    left[slot] = NIL
    right[slot] = NIL
    color[slot] = RED
    if rightmost == NIL:
        parent[slot] = NIL
        root = slot
    else:
        parent[slot] = rightmost
        right[rightmost] = slot
    return _insert_fixup(left, right, parent, color, root, slot)


@njit(cache=True)
def _find(keys, left, right, root, key):
    x = root
    while x != NIL:
        if key == keys[x]:
            return x
        elif key < keys[x]:
            x = left[x]
        else:
            x = right[x]
    return NIL


@njit(cache=True)
def _delete_fixup(left, right, parent, color, root, x, xp):
    # x may be NIL; xp tracks its parent through the climb
    while x != root and (x == NIL or color[x] == BLACK):
        if x == left[xp]:
            w = right[xp]
            if color[w] == RED:
                color[w] = BLACK
                color[xp] = RED
                root = _rotate_left(left, right, parent, root, xp)
                w = right[xp]
            wl_black = left[w] == NIL or color[left[w]] == BLACK
            wr_black = right[w] == NIL or color[right[w]] == BLACK
            if wl_black and wr_black:
                color[w] = RED
                x = xp
                xp = parent[x]
            else:
                if wr_black:
                    color[left[w]] = BLACK
                    color[w] = RED
                    root = _rotate_right(left, right, parent, root, w)
                    w = right[xp]
                color[w] = color[xp]
                color[xp] = BLACK
                if right[w] != NIL:
                    color[right[w]] = BLACK
                root = _rotate_left(left, right, parent, root, xp)
                x = root
                xp = NIL
        else:
            w = left[xp]
            if color[w] == RED:
                color[w] = BLACK
                color[xp] = RED
                root = _rotate_right(left, right, parent, root, xp)
                w = left[xp]
            wl_black = left[w] == NIL or color[left[w]] == BLACK
            wr_black = right[w] == NIL or color[right[w]] == BLACK
            if wl_black and wr_black:
                color[w] = RED
                x = xp
                xp = parent[x]
            else:
                if wl_black:
                    color[right[w]] = BLACK
                    color[w] = RED
                    root = _rotate_left(left, right, parent, root, w)
                    w = left[xp]
                color[w] = color[xp]
                color[xp] = BLACK
                if left[w] != NIL:
                    color[left[w]] = BLACK
                root = _rotate_right(left, right, parent, root, xp)
                x = root
                xp = NIL
    if x != NIL:
        color[x] = BLACK
    return root


@njit(cache=True)
def _erase(keys, vals, left, right, parent, color, root, key):
    """Remove `key` if present.  Returns (root, freed_slot); freed_slot
    is NIL when the key was absent.  When the doomed node has two
    children its successor's payload is moved into its slot and the
    successor's slot is the one freed."""
    z = _find(keys, left, right, root, key)
    if z == NIL:
        return root, NIL
    if left[z] == NIL or right[z] == NIL:
        y = z
    else:
        y = right[z]
        while left[y] != NIL:
            y = left[y]
    if left[y] != NIL:
        x = left[y]
    else:
        x = right[y]
    xp = parent[y]
    if x != NIL:
        parent[x] = xp
    if xp == NIL:
        root = x
    elif y == left[xp]:
        left[xp] = x
    else:
        right[xp] = x
    if y != z:
        keys[z] = keys[y]
        vals[z] = vals[y]
    if color[y] == BLACK:
        root = _delete_fixup(left, right, parent, color, root, x, xp)
    return root, y


@njit(cache=True)
def _inorder_decode(keys, vals, left, right, root, n_rows, out_rows, out_vals, col_counts):
    """Single in-order pass: decode each index and emit rows/values in
    column-major order while histogramming columns."""
    stack = np.empty(160, np.int64)
    sp = 0
    x = root
    k = 0
    while sp > 0 or x != NIL:
        while x != NIL:
            stack[sp] = x
            sp += 1
            x = left[x]
        sp -= 1
        x = stack[sp]
        key = keys[x]
        out_rows[k] = key % n_rows
        out_vals[k] = vals[x]
        col_counts[key // n_rows] += 1
        k += 1
        x = right[x]
    return k


@njit(cache=True)
def _bulk_append(keys, vals, left, right, parent, color, sorted_keys, sorted_vals):
    """Build a tree from strictly increasing keys via repeated rightmost
    appends; slots are filled 0..n-1."""
    root = NIL
    rightmost = NIL
    for i in range(sorted_keys.shape[0]):
        root = _append_at(
            keys, vals, left, right, parent, color, root, rightmost, sorted_keys[i], sorted_vals[i], i
        )
        rightmost = i
    return root, rightmost


class RbtStore:
    """Ordered map from linearised index to value, with O(log N)
    insert/search/erase and an O(1)-placement append for strictly
    increasing indices.  Assigning an exact zero erases."""

    def __init__(self, dims: Dims, reserve: int = 0):
        self.dims = dims
        cap = max(16, reserve)
        self._keys = np.empty(cap, np.int64)
        self._vals = np.empty(cap, np.float64)
        self._left = np.empty(cap, np.int64)
        self._right = np.empty(cap, np.int64)
        self._parent = np.empty(cap, np.int64)
        self._color = np.empty(cap, np.uint8)
        self.root = NIL
        self.count = 0
        self.max_index = NIL
        self._rightmost = NIL
        self._top = 0
        self._free: list[int] = []

    @property
    def capacity(self) -> int:
        return int(self._keys.shape[0])

    def __len__(self):
        return self.count

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.dims.n_cells:
            raise CoordinateError(
                "linear index %d outside %s matrix (%d cells)"
                % (index, self.dims, self.dims.n_cells)
            )

    def _grow(self):
        cap = self.capacity * 2
        for name in ("_keys", "_vals", "_left", "_right", "_parent", "_color"):
            old = getattr(self, name)
            new = np.empty(cap, old.dtype)
            new[: self._top] = old[: self._top]
            setattr(self, name, new)

    def _take_slot(self) -> int:
        if self._free:
            return self._free[-1]
        if self._top == self.capacity:
            self._grow()
        return self._top

    def _consume_slot(self, slot: int) -> None:
        if self._free and self._free[-1] == slot:
            self._free.pop()
        else:
            self._top += 1

    def _refresh_rightmost(self) -> None:
        x = self.root
        if x == NIL:
            self._rightmost = NIL
            self.max_index = NIL
            return
        right = self._right
        while right[x] != NIL:
            x = right[x]
        self._rightmost = x
        self.max_index = int(self._keys[x])

    def insert(self, index: int, value: float) -> None:
        """Insert or overwrite; inserting 0.0 erases instead."""
        self._check_index(index)
        if value == 0.0:
            self.erase(index)
            return
        slot = self._take_slot()
        self.root, inserted = _insert(
            self._keys, self._vals, self._left, self._right, self._parent, self._color,
            self.root, index, value, slot,
        )
        if inserted:
            self._consume_slot(slot)
            self.count += 1
            if index > self.max_index:
                self.max_index = index
                self._rightmost = slot

    def append_max(self, index: int, value: float) -> None:
        """Insert an index known to exceed every stored index; skips the
        descent by hanging the node off the tracked rightmost node."""
        self._check_index(index)
        if self.count and index <= self.max_index:
            raise AppendOrderError(
                "append index %d not beyond current maximum %d" % (index, self.max_index)
            )
        if value == 0.0:
            return
        slot = self._take_slot()
        self.root = _append_at(
            self._keys, self._vals, self._left, self._right, self._parent, self._color,
            self.root, self._rightmost, index, value, slot,
        )
        self._consume_slot(slot)
        self.count += 1
        self.max_index = index
        self._rightmost = slot

    def get(self, index: int) -> float:
        self._check_index(index)
        slot = _find(self._keys, self._left, self._right, self.root, index)
        if slot == NIL:
            return 0.0
        return float(self._vals[slot])

    def erase(self, index: int) -> bool:
        self._check_index(index)
        self.root, freed = _erase(
            self._keys, self._vals, self._left, self._right, self._parent, self._color,
            self.root, index,
        )
        if freed == NIL:
            return False
        self.count -= 1
        self._free.append(int(freed))
        # the freed slot is not always the slot that held `index`, so the
        # cached rightmost node may have moved; re-walk the right spine
        self._refresh_rightmost()
        return True

    def items(self):
        """In-order (index, value) pairs; strictly increasing indices."""
        stack = []
        x = self.root
        while stack or x != NIL:
            while x != NIL:
                stack.append(x)
                x = self._left[x]
            x = stack.pop()
            yield int(self._keys[x]), float(self._vals[x])
            x = self._right[x]


def to_csc(t: RbtStore) -> CscData:
    """One in-order traversal with index decoding straight into CSC
    arrays; linear in N plus the column count."""
    n = t.count
    n_rows, n_cols = t.dims
    out_rows = np.empty(n, np.int64)
    out_vals = np.empty(n, np.float64)
    col_counts = np.zeros(max(n_cols, 1), np.int64)
    if n:
        _inorder_decode(
            t._keys, t._vals, t._left, t._right, t.root, n_rows, out_rows, out_vals, col_counts
        )
    col_offsets = np.zeros(n_cols + 1, np.int64)
    np.cumsum(col_counts[:n_cols], out=col_offsets[1:])
    return CscData(t.dims, out_vals, out_rows, col_offsets)


def from_csc(m: CscData) -> RbtStore:
    """Rebuild the tree from a canonical CSC matrix; the column-major
    element order is already ascending in linearised index, so the whole
    build runs through the rightmost-append fast path."""
    t = RbtStore(m.dims, reserve=m.nnz)
    n = m.nnz
    if n:
        sorted_keys = m.expand_cols() * m.dims.n_rows + m.row_indices
        t.root, t._rightmost = _bulk_append(
            t._keys, t._vals, t._left, t._right, t._parent, t._color,
            sorted_keys, m.values,
        )
        t.count = n
        t._top = n
        t.max_index = int(sorted_keys[-1])
    return t


def check_invariants(t: RbtStore) -> None:
    """Full tree walk asserting every red-black and bookkeeping
    invariant; raises CorruptionError on the first violation."""
    if t.root == NIL:
        if t.count != 0:
            raise CorruptionError("empty tree with nonzero count")
        if t.max_index != NIL or t._rightmost != NIL:
            raise CorruptionError("empty tree with stale max-index cache")
        return
    keys, vals = t._keys, t._vals
    left, right, parent, color = t._left, t._right, t._parent, t._color
    if color[t.root] != BLACK:
        raise CorruptionError("root is not black")
    if parent[t.root] != NIL:
        raise CorruptionError("root has a parent link")

    n_cells = t.dims.n_cells
    nodes = 0
    height = 0
    prev_key = -1
    # iterative in-order walk carrying depth; black-height checked by a
    # separate post-order pass below
    stack = [(t.root, 1)]
    visited: list = []
    while stack:
        x, depth = stack.pop()
        if x == NIL:
            continue
        visited.append(x)
        nodes += 1
        height = max(height, depth)
        if color[x] == RED:
            for child in (left[x], right[x]):
                if child != NIL and color[child] == RED:
                    raise CorruptionError("red node %d has a red child" % x)
        for child in (left[x], right[x]):
            if child != NIL and parent[child] != x:
                raise CorruptionError("broken parent link at node %d" % child)
        if not 0 <= keys[x] < n_cells:
            raise CorruptionError("stored index %d outside matrix" % keys[x])
        if vals[x] == 0.0:
            raise CorruptionError("stored value is exactly zero at node %d" % x)
        stack.append((right[x], depth + 1))
        stack.append((left[x], depth + 1))

    for idx, _val in t.items():
        if idx <= prev_key:
            raise CorruptionError("in-order indices not strictly increasing")
        prev_key = idx

    if nodes != t.count:
        raise CorruptionError("count %d != reachable nodes %d" % (t.count, nodes))
    limit = 2 * np.log2(nodes + 1)
    if height > limit:
        raise CorruptionError("height %d exceeds 2*log2(N+1) = %.2f" % (height, limit))
    if t.max_index != prev_key:
        raise CorruptionError("cached max index %d != largest key %d" % (t.max_index, prev_key))
    if keys[t._rightmost] != prev_key:
        raise CorruptionError("cached rightmost slot does not hold the largest key")

    # uniform black height on every root-to-leaf path
    bh: dict = {}
    for x in reversed(visited):  # children before parents
        lb = bh[left[x]] if left[x] != NIL else 1
        rb = bh[right[x]] if right[x] != NIL else 1
        if lb != rb:
            raise CorruptionError("black height differs between subtrees of node %d" % x)
        bh[x] = lb + (1 if color[x] == BLACK else 0)
