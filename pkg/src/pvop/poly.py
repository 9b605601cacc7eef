"""Sparse multivariate polynomials with exact degree bookkeeping.

A :class:`Polynomial` stores its terms as a map from exponent tuples to
nonzero real coefficients, kept in lexicographic order of the exponents.
Equality is therefore a direct comparison of the stored terms.

Evaluation is vectorized: a polynomial accepts either a single point of
shape ``(n,)`` or a batch of points of shape ``(m, n)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

#: Degree reported for the zero polynomial.  Distinct from 0 (the degree of
#: a nonzero constant) so callers can tell the two apart.
ZERO_DEGREE = -1


class DimensionError(ValueError):
    """Point or operand dimension does not match the polynomial."""


class DegreeError(ValueError):
    """An operation needs degree >= 1 but got a constant or zero polynomial."""


class LeadingCancellationError(ValueError):
    """The weighted top-degree leading forms sum to zero."""


@dataclass(frozen=True)
class Monomial:
    exponents: tuple[int, ...]
    coefficient: float

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _as_exponents(e, n: int) -> tuple[int, ...]:
    e = tuple(int(k) for k in e)
    if len(e) != n:
        raise DimensionError(f"exponent tuple {e} has length {len(e)}, expected {n}")
    if any(k < 0 for k in e):
        raise ValueError(f"negative exponent in {e}")
    return e


class Polynomial:
    """Immutable sparse polynomial in ``n`` variables ``x1..xn``."""

    __slots__ = ("n", "_terms", "_exps", "_coeffs", "degree", "_grad")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if int(n) < 1:
            raise DimensionError("dimension must be positive")
        self.n = int(n)
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[tuple[int, ...], float] = {}
        for e, c in items:
            e = _as_exponents(e, self.n)
            merged[e] = merged.get(e, 0.0) + float(c)
        clean = {e: c for e, c in merged.items() if c != 0.0}
        self._terms = tuple(sorted(clean.items()))
        if self._terms:
            self._exps = np.array([e for e, _ in self._terms], dtype=np.int64)
            self._coeffs = np.array([c for _, c in self._terms], dtype=float)
            self.degree = int(self._exps.sum(axis=1).max())
        else:
            self._exps = np.zeros((0, self.n), dtype=np.int64)
            self._coeffs = np.zeros(0)
            self.degree = ZERO_DEGREE
        self._grad = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """The coordinate ``x_{i+1}`` (``i`` is zero-based)."""
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1.0})

    @classmethod
    def from_records(cls, records: Sequence[Mapping], n: int | None = None) -> "Polynomial":
        """Build from ``[{"exponents": [...], "coeff": c}, ...]``.

        Duplicate exponent tuples and zero coefficients are rejected, since
        a term list in canonical form never contains them.
        """
        if n is None:
            if not records:
                raise ValueError("cannot infer dimension from an empty term list")
            n = len(records[0]["exponents"])
        seen = set()
        terms = []
        for rec in records:
            e = _as_exponents(rec["exponents"], n)
            c = float(rec["coeff"])
            if e in seen:
                raise ValueError(f"duplicate exponent tuple {list(e)}")
            if c == 0.0:
                raise ValueError(f"zero coefficient for exponents {list(e)}")
            seen.add(e)
            terms.append((e, c))
        return cls(n, terms)

    def to_records(self) -> list[dict]:
        return [{"exponents": list(e), "coeff": c} for e, c in self._terms]

    # -- structure --------------------------------------------------------
    @property
    def terms(self) -> tuple[Monomial, ...]:
        return tuple(Monomial(e, c) for e, c in self._terms)

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeffs.copy()

    @property
    def exponents(self) -> np.ndarray:
        return self._exps.copy()

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self) -> bool:
        if not self._terms:
            return True
        return bool(np.all(self._exps.sum(axis=1) == self.degree))

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial(self.n, [(e, c) for e, c in self._terms if sum(e) == k])

    def coefficient(self, exponents) -> float:
        return dict(self._terms).get(tuple(exponents), 0.0)

    # -- evaluation -------------------------------------------------------
    def __call__(self, x) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        if X.ndim != 2 or X.shape[1] != self.n:
            raise DimensionError(f"expected points of dimension {self.n}, got shape {x.shape}")
        if not self._terms:
            out = np.zeros(X.shape[0])
        else:
            # (m, T, n) powers; fine for the small n and term counts used here
            mono = np.prod(X[:, None, :] ** self._exps[None, :, :], axis=2)
            out = mono @ self._coeffs
        return float(out[0]) if single else out

    def partial(self, j: int) -> "Polynomial":
        terms = []
        for e, c in self._terms:
            if e[j] > 0:
                d = list(e)
                d[j] -= 1
                terms.append((tuple(d), c * e[j]))
        return Polynomial(self.n, terms)

    def gradient_polys(self) -> tuple["Polynomial", ...]:
        if self._grad is None:
            self._grad = tuple(self.partial(j) for j in range(self.n))
        return self._grad

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        parts = [g(x) for g in self.gradient_polys()]
        return np.stack(parts, axis=-1) if x.ndim == 2 else np.array(parts)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, other)
        self._check(other)
        return Polynomial(self.n, list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, [(e, -c) for e, c in self._terms])

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: float) -> "Polynomial":
        return Polynomial(self.n, [(e, s * c) for e, c in self._terms])

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._check(other)
        terms = []
        for (e1, c1), (e2, c2) in itertools.product(self._terms, other._terms):
            terms.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Polynomial(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = Polynomial.constant(self.n, 1.0)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / display ---------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, self._terms))

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        # highest degree first reads more naturally
        ordered = sorted(self._terms, key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))
        parts = []
        for e, c in ordered:
            factors = [f"x{j + 1}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k]
            mag = abs(c)
            if factors and mag == 1.0:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt(mag)] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        s = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _fmt(c: float) -> str:
    return str(int(c)) if float(c).is_integer() and abs(c) < 1e15 else repr(c)


class VectorObjective:
    """Tuple of polynomials ``(f_1, ..., f_q)`` over a shared dimension.

    Every component must have degree at least 1.
    """

    __slots__ = ("components", "n", "q", "degrees")

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector objective needs at least one component")
        n = comps[0].n
        for p in comps:
            if p.n != n:
                raise DimensionError("objective components have different dimensions")
            if p.degree < 1:
                raise DegreeError(f"objective component {p} has degree < 1")
        self.components = comps
        self.n = n
        self.q = len(comps)
        self.degrees = tuple(p.degree for p in comps)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = [p(x) for p in self.components]
        return np.stack(vals, axis=-1) if x.ndim == 2 else np.array(vals)

    def __getitem__(self, i) -> Polynomial:
        return self.components[i]

    def __len__(self):
        return self.q

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return isinstance(other, VectorObjective) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "VectorObjective(" + ", ".join(str(p) for p in self.components) + ")"

    def to_records(self) -> list[list[dict]]:
        return [p.to_records() for p in self.components]


# -- module-level operations ----------------------------------------------

def evaluate(p: Polynomial, x) -> float | np.ndarray:
    return p(x)


def grad(p: Polynomial, x) -> np.ndarray:
    return p.grad(x)


def leading_form(p: Polynomial) -> Polynomial:
    """Top-degree homogeneous part of ``p`` (requires degree >= 1)."""
    if p.degree < 1:
        raise DegreeError("leading form needs a polynomial of degree >= 1")
    return p.homogeneous_part(p.degree)


def leading_form_vector(f: VectorObjective) -> VectorObjective:
    return VectorObjective([leading_form(p) for p in f])


def _check_weights(lam, q: int) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (q,):
        raise DimensionError(f"weight vector must have length {q}")
    if np.any(lam < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(lam > 0):
        raise ValueError("weights must not all be zero")
    return lam


def weighted_sum(f: VectorObjective, lam) -> Polynomial:
    """``sum_i lam_i f_i`` with exact term merging (cancellation allowed)."""
    lam = _check_weights(lam, f.q)
    terms = []
    for li, p in zip(lam, f):
        if li != 0.0:
            terms.extend((m.exponents, li * m.coefficient) for m in p.terms)
    return Polynomial(f.n, terms)


def weighted_leading_form(f: VectorObjective, lam) -> Polynomial:
    """Weighted sum of the leading forms of the top-degree active components.

    Raises :class:`LeadingCancellationError` when that sum vanishes; the
    caller then falls back to ``leading_form(weighted_sum(f, lam))``.
    """
    lam = _check_weights(lam, f.q)
    d = max(di for li, di in zip(lam, f.degrees) if li != 0.0)
    terms = []
    for li, p in zip(lam, f):
        if li != 0.0 and p.degree == d:
            terms.extend((m.exponents, li * m.coefficient) for m in leading_form(p).terms)
    h = Polynomial(f.n, terms)
    if h.is_zero():
        raise LeadingCancellationError(f"weighted leading forms cancel for weights {lam.tolist()}")
    return h


def coeff_norm(p: Polynomial) -> float:
    """Euclidean norm of the coefficient vector."""
    return float(math.sqrt(float(np.sum(p.coefficients ** 2))))


def vector_coeff_norm(f: VectorObjective | Sequence[Polynomial]) -> float:
    return float(math.sqrt(sum(coeff_norm(p) ** 2 for p in f)))


def perturb(p: Polynomial, g: Polynomial) -> Polynomial:
    if p.n != g.n:
        raise DimensionError(f"dimension mismatch: {p.n} vs {g.n}")
    return p + g


def monomial_exponents(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= d, in lexicographic order."""
    return sorted(e for e in itertools.product(range(d + 1), repeat=n) if sum(e) <= d)


def random_polynomial(n: int, d: int, seed=None, coefficient_scale: float = 1.0,
                      homogeneous: bool = False) -> Polynomial:
    """Dense random polynomial of degree exactly ``d``.

    Coefficients are i.i.d. uniform on ``[-scale, scale]``.  If every
    degree-``d`` coefficient comes out zero they are redrawn.  With
    ``homogeneous=True`` only degree-``d`` monomials are used.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    exps = monomial_exponents(n, d)
    if homogeneous:
        exps = [e for e in exps if sum(e) == d]
    top = np.array([sum(e) == d for e in exps])
    coeffs = rng.uniform(-coefficient_scale, coefficient_scale, size=len(exps))
    while not np.any(coeffs[top] != 0.0):
        coeffs[top] = rng.uniform(-coefficient_scale, coefficient_scale, size=int(top.sum()))
    return Polynomial(n, zip(exps, coeffs))
