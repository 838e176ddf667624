"""Truncated multivariate Taylor jets.

A :class:`Jet` carries the value and every partial derivative of a smooth
scalar quantity up to a fixed order, at one point.  Entries are stored as
raw partial-derivative values (factorials folded out), indexed by dense
multi-indices in graded lexicographic order.  Sums, products, quotients and
the elementary functions propagate derivatives exactly at the retained
order, so downstream geometry never needs finite differencing.

Jets over different variable counts never mix; mixing orders truncates to
the lower order (the product of two truncated expansions is only exact to
the smaller order).
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np


class DomainError(ArithmeticError):
    """Evaluation left the domain of a partial function (log, sqrt, /, ^)."""


def n_entries(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


def _multi_indices(nvars, order):
    out = []
    for total in range(order + 1):
        for combo in combinations_with_replacement(range(nvars), total):
            idx = [0] * nvars
            for v in combo:
                idx[v] += 1
            out.append(tuple(idx))
    return out


class _JetSpace:
    """Index tables shared by every jet with the same (nvars, order)."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        self.indices = _multi_indices(nvars, order)
        self.size = len(self.indices)
        self.position = {m: i for i, m in enumerate(self.indices)}
        self.degree = np.array([sum(m) for m in self.indices])
        # per-degree prefix sizes: truncation to order k is a slice
        self.sizes = [n_entries(nvars, k) for k in range(order + 1)]
        self._mul = None
        self._diff = {}

    def mul_table(self):
        if self._mul is None:
            by_degree: dict[int, list[int]] = {}
            for i, m in enumerate(self.indices):
                by_degree.setdefault(sum(m), []).append(i)
            out, ia, ib, w = [], [], [], []
            for da, rows in by_degree.items():
                for i in rows:
                    mi = self.indices[i]
                    for db in range(self.order - da + 1):
                        for j in by_degree.get(db, ()):
                            mj = self.indices[j]
                            tgt = tuple(a + b for a, b in zip(mi, mj))
                            coeff = 1.0
                            for a, b in zip(mi, mj):
                                coeff *= math.comb(a + b, a)
                            out.append(self.position[tgt])
                            ia.append(i)
                            ib.append(j)
                            w.append(coeff)
            self._mul = (
                np.array(out, dtype=np.intp),
                np.array(ia, dtype=np.intp),
                np.array(ib, dtype=np.intp),
                np.array(w),
            )
        return self._mul

    def diff_map(self, var: int):
        """Source positions of gamma + e_var for every gamma of degree < order."""
        if var not in self._diff:
            sub = _space(self.nvars, self.order - 1)
            src = np.empty(sub.size, dtype=np.intp)
            for t, m in enumerate(sub.indices):
                shifted = list(m)
                shifted[var] += 1
                src[t] = self.position[tuple(shifted)]
            self._diff[var] = src
        return self._diff[var]

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out, ia, ib, w = self.mul_table()
        return np.bincount(out, weights=a[ia] * b[ib] * w, minlength=self.size)


@lru_cache(maxsize=None)
def _space(nvars: int, order: int) -> _JetSpace:
    return _JetSpace(nvars, order)


class Jet:
    """Dense truncated jet: value plus partials up to ``order``."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: _JetSpace, coeffs: np.ndarray):
        self.space = space
        self.coeffs = coeffs

    # -- constructors ----------------------------------------------------
    @staticmethod
    def constant(nvars: int, order: int, value: float) -> "Jet":
        sp = _space(nvars, order)
        c = np.zeros(sp.size)
        c[0] = value
        return Jet(sp, c)

    @staticmethod
    def variable(nvars: int, order: int, var: int, value: float) -> "Jet":
        sp = _space(nvars, order)
        c = np.zeros(sp.size)
        c[0] = value
        if order >= 1:
            c[sp.position[tuple(1 if i == var else 0 for i in range(nvars))]] = 1.0
        return Jet(sp, c)

    # -- inspection ------------------------------------------------------
    @property
    def nvars(self) -> int:
        return self.space.nvars

    @property
    def order(self) -> int:
        return self.space.order

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def partial(self, alpha) -> float:
        """Partial derivative for the multi-index ``alpha``."""
        alpha = tuple(alpha)
        if len(alpha) != self.nvars or sum(alpha) > self.order:
            raise ValueError(f"multi-index {alpha} outside jet of order {self.order}")
        return float(self.coeffs[self.space.position[alpha]])

    def partials(self) -> dict:
        return {m: float(v) for m, v in zip(self.space.indices, self.coeffs)}

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, value={self.value:.6g})"

    # -- structure -------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot extend a jet to higher order")
        sp = _space(self.nvars, order)
        return Jet(sp, self.coeffs[: sp.size])

    def derivative(self, var: int) -> "Jet":
        """The jet of the partial derivative in variable ``var`` (one order lower)."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src = self.space.diff_map(var)
        return Jet(_space(self.nvars, self.order - 1), self.coeffs[src].copy())

    # -- arithmetic ------------------------------------------------------
    def _pair(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets over different variable counts")
            k = min(self.order, other.order)
            return self.truncate(k), other.truncate(k)
        if isinstance(other, (int, float)):
            return self, float(other)
        return None, None

    def __add__(self, other):
        if isinstance(other, Jet) and other.space is self.space:
            return Jet(self.space, self.coeffs + other.coeffs)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        if isinstance(b, float):
            c = a.coeffs.copy()
            c[0] += b
            return Jet(a.space, c)
        return Jet(a.space, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet) and other.space is self.space:
            return Jet(self.space, self.coeffs - other.coeffs)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        if isinstance(b, float):
            c = a.coeffs.copy()
            c[0] -= b
            return Jet(a.space, c)
        return Jet(a.space, a.coeffs - b.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet) and other.space is self.space:
            sp = self.space
            if not (self.coeffs.any() and other.coeffs.any()):
                return Jet(sp, np.zeros(sp.size))
            return Jet(sp, sp.mul(self.coeffs, other.coeffs))
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        if isinstance(b, float):
            return Jet(a.space, a.coeffs * b)
        if not (a.coeffs.any() and b.coeffs.any()):
            return Jet(a.space, np.zeros(a.space.size))
        return Jet(a.space, a.space.mul(a.coeffs, b.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        if isinstance(b, float):
            if b == 0.0:
                raise DomainError("division by zero")
            return Jet(a.space, a.coeffs / b)
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, int) or (
            isinstance(exponent, float) and exponent == int(exponent)
        ):
            return self.powi(int(exponent))
        if isinstance(exponent, float):
            return self.powr(exponent)
        return NotImplemented

    # -- composition with univariate functions ---------------------------
    def _series(self, derivs) -> "Jet":
        """Compose with a univariate f given f^(j) at the jet's value, j = 0..order."""
        k = self.order
        coeffs = [derivs[j] / math.factorial(j) for j in range(k + 1)]
        delta = Jet(self.space, self.coeffs.copy())
        delta.coeffs[0] = 0.0
        acc = Jet.constant(self.nvars, k, coeffs[k])
        for j in range(k - 1, -1, -1):
            acc = acc * delta + coeffs[j]
        return acc

    def reciprocal(self) -> "Jet":
        x = self.value
        if x == 0.0:
            raise DomainError("division by zero")
        derivs = [(-1.0) ** j * math.factorial(j) / x ** (j + 1) for j in range(self.order + 1)]
        return self._series(derivs)

    def exp(self) -> "Jet":
        e = math.exp(self.value)
        return self._series([e] * (self.order + 1))

    def log(self) -> "Jet":
        x = self.value
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x:.6g}")
        derivs = [math.log(x)]
        derivs += [(-1.0) ** (j - 1) * math.factorial(j - 1) / x**j for j in range(1, self.order + 1)]
        return self._series(derivs)

    def sqrt(self) -> "Jet":
        x = self.value
        if x < 0.0 or (x == 0.0 and self.order >= 1):
            raise DomainError(f"sqrt at non-positive value {x:.6g}")
        if x == 0.0:
            return Jet.constant(self.nvars, 0, 0.0)
        return self.powr(0.5)

    def powr(self, r: float) -> "Jet":
        x = self.value
        if x <= 0.0:
            raise DomainError(f"x^{r:.6g} needs positive base, got {x:.6g}")
        derivs, fall = [], 1.0
        for j in range(self.order + 1):
            derivs.append(fall * x ** (r - j))
            fall *= r - j
        return self._series(derivs)

    def powi(self, n: int) -> "Jet":
        if n < 0:
            return self.reciprocal().powi(-n)
        result = Jet.constant(self.nvars, self.order, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def sin(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        cycle = [s, c, -s, -c]
        return self._series([cycle[j % 4] for j in range(self.order + 1)])

    def cos(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        cycle = [c, -s, -c, s]
        return self._series([cycle[j % 4] for j in range(self.order + 1)])

    def tan(self) -> "Jet":
        c = self.cos()
        if c.value == 0.0:
            raise DomainError("tan at a pole")
        return self.sin() / c

    def atan(self) -> "Jet":
        # Taylor coefficients of atan at x0, from the reciprocal power series
        # of 1 + (x0 + t)^2 integrated term by term.
        x = self.value
        k = self.order
        den = [1.0 + x * x, 2.0 * x, 1.0]
        rec = [1.0 / den[0]]
        for j in range(1, k):
            acc = 0.0
            for i in range(1, min(j, 2) + 1):
                acc += den[i] * rec[j - i]
            rec.append(-acc / den[0])
        derivs = [math.atan(x)]
        for j in range(1, k + 1):
            derivs.append(rec[j - 1] / j * math.factorial(j))
        return self._series(derivs)


# -- cross-space plumbing -------------------------------------------------

def embed(jet: Jet, nvars: int) -> Jet:
    """View an m-variable jet inside a larger variable space (new vars inert)."""
    if nvars < jet.nvars:
        raise ValueError("target space smaller than source")
    sp = _space(nvars, jet.order)
    out = np.zeros(sp.size)
    pad = (0,) * (nvars - jet.nvars)
    for i, m in enumerate(jet.space.indices):
        out[sp.position[m + pad]] = jet.coeffs[i]
    return Jet(sp, out)


def extract(jet: Jet, nvars: int, order: int, extra: int | None = None) -> Jet:
    """Restrict an augmented jet back to its first ``nvars`` variables.

    With ``extra`` set, returns the jet of the first partial derivative in
    augmented variable ``extra`` (an index >= nvars), i.e. the slice of
    entries whose extra-variable part is exactly e_extra.
    """
    sp = _space(nvars, order)
    out = np.empty(sp.size)
    pad = [0] * (jet.nvars - nvars)
    if extra is not None:
        pad[extra - nvars] = 1
    pad = tuple(pad)
    src_pos = jet.space.position
    for i, m in enumerate(sp.indices):
        out[i] = jet.coeffs[src_pos[m + pad]]
    return Jet(sp, out)


def seed_point(point, order: int) -> list[Jet]:
    """Variable jets for every coordinate of ``point``."""
    n = len(point)
    return [Jet.variable(n, order, i, float(point[i])) for i in range(n)]


def jet_matrix_inverse(mat):
    """Invert a square matrix of jets by Gauss-Jordan with value pivoting."""
    n = len(mat)
    a = [row[:] for row in mat]
    nv, k = a[0][0].nvars, min(e.order for row in a for e in row)
    eye = [
        [Jet.constant(nv, k, 1.0 if i == j else 0.0) for j in range(n)]
        for i in range(n)
    ]
    a = [[e.truncate(k) for e in row] for row in a]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].value))
        if a[piv][col].value == 0.0:
            raise DomainError("singular matrix of jets")
        a[col], a[piv] = a[piv], a[col]
        eye[col], eye[piv] = eye[piv], eye[col]
        inv = a[col][col].reciprocal()
        a[col] = [e * inv for e in a[col]]
        eye[col] = [e * inv for e in eye[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if np.all(f.coeffs == 0.0):
                continue
            a[r] = [e - f * g for e, g in zip(a[r], a[col])]
            eye[r] = [e - f * g for e, g in zip(eye[r], eye[col])]
    return eye
