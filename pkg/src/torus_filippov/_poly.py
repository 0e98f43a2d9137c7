"""Sparse trivariate polynomials with exact differentiation.

The switching function of the torus is a degree-4 polynomial and the vector
fields are linear, so every iterated Lie derivative is again a polynomial.
Keeping the algebra symbolic (exponent-tuple -> coefficient) lets us evaluate
those derivatives exactly instead of differencing.
"""

from __future__ import annotations

import numpy as np

Term = tuple[int, int, int]


class Poly3:
    """Polynomial in (x, y, z) stored as {(i, j, k): coefficient}."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Term, float] | None = None):
        self.terms: dict[Term, float] = {}
        if terms:
            for key, val in terms.items():
                c = float(val)
                if c != 0.0:
                    self.terms[key] = c

    @classmethod
    def constant(cls, c: float) -> "Poly3":
        return cls({(0, 0, 0): c})

    @classmethod
    def variable(cls, axis: int) -> "Poly3":
        key = [0, 0, 0]
        key[axis] = 1
        return cls({tuple(key): 1.0})

    @classmethod
    def linear(cls, coeffs) -> "Poly3":
        """a*x + b*y + c*z from a length-3 coefficient vector."""
        a, b, c = (float(v) for v in coeffs)
        return cls({(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c})

    def __add__(self, other: "Poly3") -> "Poly3":
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, 0.0) + val
        return Poly3(out)

    def __sub__(self, other: "Poly3") -> "Poly3":
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, 0.0) - val
        return Poly3(out)

    def __mul__(self, other):
        if isinstance(other, Poly3):
            out: dict[Term, float] = {}
            for (i1, j1, k1), c1 in self.terms.items():
                for (i2, j2, k2), c2 in other.terms.items():
                    key = (i1 + i2, j1 + j2, k1 + k2)
                    out[key] = out.get(key, 0.0) + c1 * c2
            return Poly3(out)
        return Poly3({k: v * float(other) for k, v in self.terms.items()})

    __rmul__ = __mul__

    def diff(self, axis: int) -> "Poly3":
        out: dict[Term, float] = {}
        for key, c in self.terms.items():
            n = key[axis]
            if n == 0:
                continue
            new = list(key)
            new[axis] = n - 1
            out[tuple(new)] = out.get(tuple(new), 0.0) + c * n
        return Poly3(out)

    def gradient(self) -> tuple["Poly3", "Poly3", "Poly3"]:
        return self.diff(0), self.diff(1), self.diff(2)

    def coeff(self, key: Term) -> float:
        return self.terms.get(key, 0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def __call__(self, pts) -> np.ndarray | float:
        """Evaluate at one point (3,) or a batch (..., 3)."""
        p = np.asarray(pts, dtype=float)
        scalar = p.ndim == 1
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        acc = np.zeros(np.broadcast(x, y, z).shape, dtype=float)
        for (i, j, k), c in self.terms.items():
            term = np.full_like(acc, c)
            if i:
                term = term * x**i
            if j:
                term = term * y**j
            if k:
                term = term * z**k
            acc += term
        return float(acc) if scalar else acc

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = [f"{c:+g}*x^{i}y^{j}z^{k}" for (i, j, k), c in sorted(self.terms.items())]
        return "Poly3(" + " ".join(parts) + ")" if parts else "Poly3(0)"
