"""Minimal reverse-mode differentiation over numpy arrays.

Every function here accepts plain arrays or :class:`Var` handles. With plain
inputs it returns exactly ``numpy``'s result, so one code path serves both
the undifferentiated pipeline and the recorded one, and forward values are
bit-identical between the two.

Only the handful of operations the regression pipeline needs are provided.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class DualGraph:
    """Append-only record of ``(tag, parents, vjp)`` nodes.

    Parents always precede their children, so a single reverse sweep over
    the node list visits nodes in a valid topological order.
    """

    def __init__(self):
        self.tags: list[str] = []
        self.parents: list[tuple[int, ...]] = []
        self.vjps: list[Callable | None] = []
        self.values: list[np.ndarray] = []

    def __len__(self):
        return len(self.values)

    def _push(self, tag, value, parents=(), vjp=None) -> Var:
        self.tags.append(tag)
        self.parents.append(tuple(parents))
        self.vjps.append(vjp)
        self.values.append(value)
        return Var(self, len(self.values) - 1)

    def variable(self, value) -> Var:
        return self._push("input", np.asarray(value, dtype=float))

    def backward(self, out: Var) -> list[np.ndarray | None]:
        """Adjoints of ``out`` (a scalar node) with respect to every node."""
        if out.graph is not self:
            raise ValueError("output belongs to a different graph")
        adj: list[np.ndarray | None] = [None] * len(self.values)
        adj[out.index] = np.ones_like(self.values[out.index])
        for i in range(out.index, -1, -1):
            g = adj[i]
            if g is None or self.vjps[i] is None:
                continue
            for p, gp in zip(self.parents[i], self.vjps[i](g)):
                if gp is None:
                    continue
                adj[p] = gp if adj[p] is None else adj[p] + gp
        return adj

    def grad(self, out: Var, wrt: Var) -> np.ndarray:
        g = self.backward(out)[wrt.index]
        return np.zeros_like(wrt.value) if g is None else g


class Var:
    __slots__ = ("graph", "index")
    __array_priority__ = 100.0

    def __init__(self, graph: DualGraph, index: int):
        self.graph = graph
        self.index = index

    @property
    def value(self) -> np.ndarray:
        return self.graph.values[self.index]

    @property
    def shape(self):
        return self.value.shape

    def __len__(self):
        return len(self.value)

    def __repr__(self):
        return f"Var({self.graph.tags[self.index]}, {self.value!r})"

    def __add__(self, o):
        return add(self, o)

    def __radd__(self, o):
        return add(o, self)

    def __sub__(self, o):
        return sub(self, o)

    def __rsub__(self, o):
        return sub(o, self)

    def __mul__(self, o):
        return mul(self, o)

    def __rmul__(self, o):
        return mul(o, self)

    def __truediv__(self, o):
        return div(self, o)

    def __rtruediv__(self, o):
        return div(o, self)

    def __neg__(self):
        return neg(self)

    def __getitem__(self, key):
        return take(self, key)


def value(x):
    return x.value if isinstance(x, Var) else x


def _graph(*xs) -> DualGraph | None:
    for x in xs:
        if isinstance(x, Var):
            return x.graph
    return None


def _unbroadcast(g, shape):
    g = np.asarray(g)
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def _binary(tag, fn, da, db):
    def op(a, b):
        va, vb = value(a), value(b)
        out = fn(va, vb)
        gr = _graph(a, b)
        if gr is None:
            return out
        sa, sb = np.shape(va), np.shape(vb)

        def vjp(g):
            ga = _unbroadcast(da(g, va, vb, out), sa) if isinstance(a, Var) else None
            gb = _unbroadcast(db(g, va, vb, out), sb) if isinstance(b, Var) else None
            return ga, gb

        parents = [x.index if isinstance(x, Var) else -1 for x in (a, b)]
        # constant operands get a dummy parent slot that backward skips
        return gr._push(tag, out, _live(parents), _drop_const(vjp, parents))

    op.__name__ = tag
    return op


def _live(parents):
    return tuple(p for p in parents if p >= 0)


def _drop_const(vjp, parents):
    def wrapped(g):
        return tuple(gp for gp, p in zip(vjp(g), parents) if p >= 0)

    return wrapped


add = _binary("add", np.add, lambda g, a, b, o: g, lambda g, a, b, o: g)
sub = _binary("sub", np.subtract, lambda g, a, b, o: g, lambda g, a, b, o: -g)
mul = _binary("mul", np.multiply, lambda g, a, b, o: g * b, lambda g, a, b, o: g * a)
div = _binary("div", np.divide, lambda g, a, b, o: g / b, lambda g, a, b, o: -g * o / b)
# ties send the gradient to the first argument
maximum = _binary(
    "maximum", np.maximum, lambda g, a, b, o: g * (a >= b), lambda g, a, b, o: g * (a < b)
)
minimum = _binary(
    "minimum", np.minimum, lambda g, a, b, o: g * (a <= b), lambda g, a, b, o: g * (a > b)
)


def _unary(tag, fn, d):
    def op(x):
        vx = value(x)
        out = fn(vx)
        if not isinstance(x, Var):
            return out
        return x.graph._push(tag, out, (x.index,), lambda g: (d(g, vx, out),))

    op.__name__ = tag
    return op


neg = _unary("neg", np.negative, lambda g, x, o: -g)
exp = _unary("exp", np.exp, lambda g, x, o: g * o)
log = _unary("log", np.log, lambda g, x, o: g / x)
sin = _unary("sin", np.sin, lambda g, x, o: g * np.cos(x))
cos = _unary("cos", np.cos, lambda g, x, o: -g * np.sin(x))
sqrt = _unary("sqrt", np.sqrt, lambda g, x, o: g / (2.0 * o))
absolute = _unary("abs", np.abs, lambda g, x, o: g * np.sign(x))
square = _unary("square", np.square, lambda g, x, o: 2.0 * g * x)


def sigmoid(x):
    return 1.0 / (1.0 + exp(neg(x)))


def clip(x, lo, hi):
    vx = value(x)
    out = np.clip(vx, lo, hi)
    if not isinstance(x, Var):
        return out
    inside = (vx >= lo) & (vx <= hi)
    return x.graph._push("clip", out, (x.index,), lambda g: (g * inside,))


def sum(x):  # noqa: A001
    vx = value(x)
    out = np.sum(vx)
    if not isinstance(x, Var):
        return out
    shape = vx.shape
    return x.graph._push("sum", np.asarray(out), (x.index,), lambda g: (np.broadcast_to(g, shape).copy(),))


def mean(x):
    vx = value(x)
    out = np.mean(vx)
    if not isinstance(x, Var):
        return out
    shape, n = vx.shape, vx.size
    return x.graph._push("mean", np.asarray(out), (x.index,), lambda g: (np.full(shape, g / n),))


def cumsum(x):
    vx = value(x)
    out = np.cumsum(vx)
    if not isinstance(x, Var):
        return out
    return x.graph._push("cumsum", out, (x.index,), lambda g: (np.cumsum(g[::-1])[::-1],))


def take(x, key):
    """Indexing (slices or integer arrays); gradients scatter-add back."""
    vx = value(x)
    out = vx[key]
    if not isinstance(x, Var):
        return out
    shape = vx.shape

    def vjp(g):
        full = np.zeros(shape)
        np.add.at(full, key, g)
        return (full,)

    return x.graph._push("take", np.asarray(out), (x.index,), vjp)


def where(mask, a, b):
    """Select with a constant boolean mask."""
    va, vb = value(a), value(b)
    out = np.where(mask, va, vb)
    gr = _graph(a, b)
    if gr is None:
        return out
    sa, sb = np.shape(va), np.shape(vb)
    parents = [x.index if isinstance(x, Var) else -1 for x in (a, b)]

    def vjp(g):
        return (
            _unbroadcast(np.where(mask, g, 0.0), sa) if isinstance(a, Var) else None,
            _unbroadcast(np.where(mask, 0.0, g), sb) if isinstance(b, Var) else None,
        )

    return gr._push("where", out, _live(parents), _drop_const(vjp, parents))


def concatenate(parts):
    vals = [np.atleast_1d(value(p)) for p in parts]
    out = np.concatenate(vals)
    gr = _graph(*parts)
    if gr is None:
        return out
    bounds = np.cumsum([0] + [len(v) for v in vals])
    live = [i for i, p in enumerate(parts) if isinstance(p, Var)]

    def vjp(g):
        return tuple(g[bounds[i] : bounds[i + 1]].reshape(np.shape(vals[i])) for i in live)

    return gr._push("concat", out, tuple(parts[i].index for i in live), vjp)


def finite_difference(fn: Callable[[np.ndarray], float], x, eps: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.array(x, dtype=float)
    g = np.empty_like(x)
    for j in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp.flat[j] += eps
        xm.flat[j] -= eps
        fp, fm = float(fn(xp)), float(fn(xm))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise FloatingPointError(f"non-finite function value at coordinate {j}")
        g.flat[j] = (fp - fm) / (2.0 * eps)
    return g
