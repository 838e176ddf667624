"""Shared test oracles.

The finite-difference helpers here are deliberately independent of the jet
implementation: they difference plain evaluations of the function under
test.  ``fd_partial`` runs the differencing in mpmath's extended precision
(central differences with Richardson extrapolation, step 1e-3), so third
and fourth partials are still good to ~1e-10 where double precision would
drown in roundoff.  The polynomial oracle differentiates coefficient
dictionaries symbolically.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def central_diff(f, x, h):
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def fd_partial(f, point, alpha, h: float = 1e-3) -> float:
    """Partial derivative of multi-index ``alpha`` by nested central
    differences of the plain evaluation, in extended precision."""
    point = [mp.mpf(repr(float(x))) for x in point]
    h = mp.mpf(repr(float(h)))

    def wrapped(pt):
        return mp.mpf(f(pt))

    g = wrapped
    for var, count in enumerate(alpha):
        for _ in range(count):
            g = _diff_in(g, var, h)
    return float(g(point))


def _diff_in(f, var, h):
    def df(pt):
        def g(x):
            q = list(pt)
            q[var] = x
            return f(q)

        return central_diff(g, pt[var], h)

    return df


# -- dense polynomial oracle ---------------------------------------------------


def poly_eval(coeffs: dict, point) -> float:
    total = 0.0
    for mono, c in coeffs.items():
        term = c
        for x, k in zip(point, mono):
            term *= x**k
        total += term
    return total


def poly_diff(coeffs: dict, var: int) -> dict:
    out = {}
    for mono, c in coeffs.items():
        if mono[var] == 0:
            continue
        new = list(mono)
        new[var] -= 1
        out[tuple(new)] = out.get(tuple(new), 0.0) + c * mono[var]
    return out


def poly_partial(coeffs: dict, alpha, point) -> float:
    for var, count in enumerate(alpha):
        for _ in range(count):
            coeffs = poly_diff(coeffs, var)
    return poly_eval(coeffs, point)


def random_poly(rng: np.random.RandomState, nvars: int, degree: int = 4) -> dict:
    from itertools import combinations_with_replacement

    coeffs = {}
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), total):
            mono = [0] * nvars
            for v in combo:
                mono[v] += 1
            if rng.rand() < 0.55:
                coeffs[tuple(mono)] = float(rng.uniform(-2.0, 2.0))
    coeffs.setdefault((0,) * nvars, 1.0)
    return coeffs


def poly_to_source(coeffs: dict, params) -> str:
    parts = []
    for mono, c in sorted(coeffs.items()):
        term = [repr(c)]
        for name, k in zip(params, mono):
            if k == 1:
                term.append(name)
            elif k > 1:
                term.append(f"{name}^{k}")
        parts.append("*".join(term))
    return " + ".join(parts) if parts else "0"
