"""Forward-mode algorithmic differentiation with dual numbers.

Every coefficient function in this package (metric components, form
components, scalar fields) is written against the helpers below, so the same
evaluator runs on plain floats, complex numbers, or `Dual` values.  First
derivatives come from a single dual-seeded evaluation; second derivatives from
nesting duals once.  A central finite-difference mode is kept as a cross-check
and can be selected globally via `derivative_mode`.

Duals carry no level tags, so a new differentiation level must always be
opened by seeding around the existing values (`seed1` wraps whatever scalars
it is given, dual or not).  Evaluators must be pure functions of the
coordinates they receive; capturing a dual from an enclosing differentiation
and combining it with freshly seeded values would mix levels.
"""

from __future__ import annotations

import cmath
import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "Dual",
    "DiffConfig",
    "derivative_mode",
    "get_config",
    "seed1",
    "seed2",
    "value_of",
    "deep_value",
    "partial_of",
    "hessian_entry",
    "sin",
    "cos",
    "tan",
    "cot",
    "log",
    "exp",
    "sqrt",
    "mat_inv",
    "mat_det",
    "SingularMatrixError",
]


class Dual:
    """A scalar carrying a value and its gradient with respect to n seeds.

    `grad` is a tuple whose entries are floats, complex numbers, or further
    `Dual` values (nesting gives higher derivative order).  Instances are
    immutable; all arithmetic returns new objects.
    """

    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        self.grad = grad

    def __repr__(self):
        return f"Dual({self.val!r}, grad={self.grad!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val,
                        tuple(a + b for a, b in zip(self.grad, other.grad)))
        return Dual(self.val + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val,
                        tuple(a - b for a, b in zip(self.grad, other.grad)))
        return Dual(self.val - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.val, tuple(-a for a in self.grad))

    def __neg__(self):
        return Dual(-self.val, tuple(-a for a in self.grad))

    def __mul__(self, other):
        if isinstance(other, Dual):
            sv, ov = self.val, other.val
            return Dual(sv * ov,
                        tuple(sv * b + ov * a
                              for a, b in zip(self.grad, other.grad)))
        return Dual(self.val * other, tuple(a * other for a in self.grad))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            q = self.val * inv
            return Dual(q, tuple((a - q * b) * inv
                                 for a, b in zip(self.grad, other.grad)))
        inv = 1.0 / other
        return Dual(self.val * inv, tuple(a * inv for a in self.grad))

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        q = other * inv
        return Dual(q, tuple(-q * inv * a for a in self.grad))

    def __pow__(self, k):
        if isinstance(k, int):
            if k == 0:
                return Dual(1.0, tuple(0.0 * a for a in self.grad))
            if k < 0:
                return 1.0 / self.__pow__(-k)
            out = self
            for _ in range(k - 1):
                out = out * self
            return out
        # non-integer exponents go through exp/log
        return exp(k * log(self))


class SingularMatrixError(ArithmeticError):
    """Raised when a (sub)matrix pivot degenerates during elimination."""


def value_of(x):
    """One-level value: strips the outermost dual layer if present."""
    return x.val if isinstance(x, Dual) else x


def deep_value(x):
    """Plain number underneath all dual layers."""
    while isinstance(x, Dual):
        x = x.val
    return x


def partial_of(x, i):
    """i-th gradient entry of the outermost layer; 0 for plain scalars."""
    return x.grad[i] if isinstance(x, Dual) else 0.0


def hessian_entry(x, i, j):
    """Entry (i, j) of the Hessian of a twice-seeded evaluation result."""
    return value_of(partial_of(partial_of(x, i), j))


def seed1(coords):
    """Wrap coordinates for a first-order jet (one new dual layer)."""
    n = len(coords)
    return [Dual(c, tuple(1.0 if k == i else 0.0 for k in range(n)))
            for i, c in enumerate(coords)]


def seed2(coords):
    """Wrap coordinates for a second-order jet (dual-of-dual)."""
    inner = seed1(coords)
    n = len(coords)
    return [Dual(ci, tuple(1.0 if k == i else 0.0 for k in range(n)))
            for i, ci in enumerate(inner)]


def _is_complex(x):
    return isinstance(x, complex)


def sin(x):
    if isinstance(x, Dual):
        s, c = sin(x.val), cos(x.val)
        return Dual(s, tuple(c * g for g in x.grad))
    return cmath.sin(x) if _is_complex(x) else math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        s, c = sin(x.val), cos(x.val)
        return Dual(c, tuple(-s * g for g in x.grad))
    return cmath.cos(x) if _is_complex(x) else math.cos(x)


def tan(x):
    if isinstance(x, Dual):
        t = tan(x.val)
        d = 1.0 + t * t
        return Dual(t, tuple(d * g for g in x.grad))
    return cmath.tan(x) if _is_complex(x) else math.tan(x)


def cot(x):
    return cos(x) / sin(x)


def log(x):
    if isinstance(x, Dual):
        inv = 1.0 / x.val
        return Dual(log(x.val), tuple(inv * g for g in x.grad))
    return cmath.log(x) if _is_complex(x) else math.log(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, tuple(e * g for g in x.grad))
    return cmath.exp(x) if _is_complex(x) else math.exp(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = sqrt(x.val)
        half = 0.5 / r
        return Dual(r, tuple(half * g for g in x.grad))
    return cmath.sqrt(x) if _is_complex(x) else math.sqrt(x)


# ---------------------------------------------------------------------------
# Dense linear algebra over dual scalars (matrices as nested lists).
# Sizes here are at most 6x6, so Gauss-Jordan with partial pivoting is plenty.

def _pivot_size(x):
    return abs(deep_value(x))


def mat_det(m):
    """Determinant by elimination; entries may be duals."""
    n = len(m)
    a = [list(row) for row in m]
    det = 1.0
    sign = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: _pivot_size(a[r][col]))
        if _pivot_size(a[piv][col]) == 0.0:
            return 0.0 * a[0][0] if isinstance(a[0][0], Dual) else 0.0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            f = a[r][col] / p
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return sign * det


def mat_inv(m):
    """Inverse by Gauss-Jordan; raises SingularMatrixError on degeneracy."""
    n = len(m)
    a = [list(row) + [1.0 if c == r else 0.0 for c in range(n)]
         for r, row in enumerate(m)]
    scale = max(max(_pivot_size(x) for x in row[:n]) for row in a)
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    for col in range(n):
        piv = max(range(col, n), key=lambda r: _pivot_size(a[r][col]))
        if _pivot_size(a[piv][col]) <= 1e-14 * scale:
            raise SingularMatrixError(f"singular pivot in column {col}")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if isinstance(f, Dual) or f != 0.0:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------------------
# Derivative-mode configuration (analytic duals vs. finite differences).

@dataclass(frozen=True)
class DiffConfig:
    mode: str = "analytic"  # "analytic" | "fd"
    step: float = 1e-5

    def __post_init__(self):
        if self.mode not in ("analytic", "fd"):
            raise ValueError(f"unknown derivative mode {self.mode!r}")
        if self.step <= 0:
            raise ValueError("fd step must be positive")


_ACTIVE = DiffConfig()


def get_config() -> DiffConfig:
    return _ACTIVE


def set_config(cfg: DiffConfig) -> None:
    global _ACTIVE
    _ACTIVE = cfg


@contextmanager
def derivative_mode(mode: str, step: float = 1e-5):
    """Temporarily switch the package-wide derivative mode."""
    prev = _ACTIVE
    set_config(DiffConfig(mode, step))
    try:
        yield
    finally:
        set_config(prev)


def _shifted(coords, i, delta):
    out = list(coords)
    out[i] = out[i] + delta
    return out


def fd_gradient(fn: Callable, coords: Sequence, step: float) -> list:
    """Central-difference gradient of a scalar-valued evaluator."""
    n = len(coords)
    return [(fn(_shifted(coords, i, step)) - fn(_shifted(coords, i, -step)))
            / (2.0 * step) for i in range(n)]


def fd_hessian(fn: Callable, coords: Sequence, step: float) -> list:
    """Central-difference Hessian (symmetric stencil)."""
    n = len(coords)
    f0 = fn(list(coords))
    hess = [[0.0] * n for _ in range(n)]
    for i in range(n):
        fp = fn(_shifted(coords, i, step))
        fm = fn(_shifted(coords, i, -step))
        hess[i][i] = (fp - 2.0 * f0 + fm) / step**2
        for j in range(i + 1, n):
            fpp = fn(_shifted(_shifted(coords, i, step), j, step))
            fpm = fn(_shifted(_shifted(coords, i, step), j, -step))
            fmp = fn(_shifted(_shifted(coords, i, -step), j, step))
            fmm = fn(_shifted(_shifted(coords, i, -step), j, -step))
            hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * step**2)
    return hess
