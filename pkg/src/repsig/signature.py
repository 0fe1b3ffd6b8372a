"""System signatures of repairable systems.

A repairable system may fail at any component failure from some index on, so
its signature has infinitely many nonzero entries. Every topology handled here
has a finite prefix followed by a geometric tail, which is stored exactly as
``(coefficient, ratio, start)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .distributions import Rates, xi_exponential

__all__ = [
    "Signature",
    "Truncation",
    "TruncatedSignature",
    "parallel2_signature",
    "parallel2_signature_general",
    "parallel_n_signature",
    "remark5_signature",
    "serial2_xi",
    "truncate",
]

DEFAULT_EPS = 1e-9


def _check_probability(name: str, value: float, *, closed: bool = True) -> float:
    value = float(value)
    upper_ok = value <= 1.0 if closed else value < 1.0
    if not (value >= 0.0 and upper_ok):
        bracket = "]" if closed else ")"
        raise ValueError(f"{name} must lie in [0, 1{bracket}, got {value!r}")
    return value


@dataclass(frozen=True)
class Signature:
    """Probabilities ``s_1, s_2, ...`` indexed from 1.

    Entries ``1 .. tail_start - 1`` are stored in ``prefix``. Entry
    ``j >= tail_start`` equals ``tail_coefficient * tail_ratio ** (j - tail_start)``.
    ``residual_mass`` is probability not assigned to any index; it is nonzero
    only for signatures built from a finite sequence of xi values.
    """

    prefix: tuple[float, ...]
    tail_coefficient: float
    tail_ratio: float
    residual_mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(v) for v in self.prefix))
        for v in self.prefix:
            _check_probability("signature entry", v)
        _check_probability("tail ratio", self.tail_ratio, closed=False)
        if self.tail_coefficient < 0:
            raise ValueError("tail coefficient must be nonnegative")
        total = self.total_mass()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"signature mass is {total!r}, expected 1")

    @property
    def tail_start(self) -> int:
        return len(self.prefix) + 1

    @property
    def tail_mass_closed_form(self) -> float:
        return self.tail_coefficient / (1.0 - self.tail_ratio)

    def total_mass(self) -> float:
        return math.fsum(self.prefix) + self.tail_mass_closed_form + self.residual_mass

    def __getitem__(self, j: int) -> float:
        if j < 1:
            raise IndexError("signature indices start at 1")
        if j < self.tail_start:
            return self.prefix[j - 1]
        offset = j - self.tail_start
        if self.tail_ratio == 0.0:
            return self.tail_coefficient if offset == 0 else 0.0
        return self.tail_coefficient * self.tail_ratio**offset

    def mass_from(self, j: int) -> float:
        """Exact mass of entries ``j, j+1, ...`` plus any residual mass."""
        start = self.tail_start
        if j < start:
            head = math.fsum(self.prefix[j - 1 :])
            return head + self.tail_mass_closed_form + self.residual_mass
        offset = j - start
        if self.tail_ratio == 0.0:
            tail = self.tail_coefficient if offset == 0 else 0.0
        else:
            tail = self.tail_coefficient * self.tail_ratio**offset / (1.0 - self.tail_ratio)
        return tail + self.residual_mass

    def nonzero_terms(self) -> Iterator[tuple[int, float]]:
        """Yield ``(index, mass)`` for every nonzero entry, in index order."""
        for j, v in enumerate(self.prefix, start=1):
            if v > 0:
                yield j, v
        if self.tail_coefficient == 0.0:
            return
        j = self.tail_start
        value = self.tail_coefficient
        while value > 0.0:
            yield j, value
            if self.tail_ratio == 0.0:
                return
            j += 1
            value = self[j]

    def describe_tail(self) -> dict:
        return {
            "coefficient": self.tail_coefficient,
            "ratio": self.tail_ratio,
            "start": self.tail_start,
        }


@dataclass(frozen=True)
class Truncation:
    """How many signature terms a computation keeps.

    Exactly one of ``terms`` (keep this many nonzero terms) and ``eps`` (keep
    terms until the discarded mass is at most ``eps``) is set.
    """

    terms: int | None = None
    eps: float | None = None

    def __post_init__(self):
        if (self.terms is None) == (self.eps is None):
            raise ValueError("set exactly one of terms and eps")
        if self.terms is not None and (int(self.terms) != self.terms or self.terms < 1):
            raise ValueError(f"terms must be a positive integer, got {self.terms!r}")
        if self.eps is not None and not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps!r}")

    @classmethod
    def by_count(cls, terms: int) -> Truncation:
        return cls(terms=terms)

    @classmethod
    def by_mass(cls, eps: float = DEFAULT_EPS) -> Truncation:
        return cls(eps=eps)


@dataclass(frozen=True)
class TruncatedSignature:
    terms: tuple[tuple[int, float], ...]
    tail_mass: float

    @property
    def retained_mass(self) -> float:
        return math.fsum(v for _, v in self.terms)

    @property
    def max_index(self) -> int:
        return self.terms[-1][0] if self.terms else 0


def truncate(s: Signature, tr: Truncation) -> TruncatedSignature:
    """Keep the leading nonzero terms of ``s``; report the exact discarded mass.

    At least one term is always kept, even when ``eps`` would allow none.
    """
    kept: list[tuple[int, float]] = []
    for j, v in s.nonzero_terms():
        if kept:
            if tr.terms is not None and len(kept) >= tr.terms:
                break
            if tr.eps is not None and s.mass_from(kept[-1][0] + 1) <= tr.eps:
                break
        kept.append((j, v))
    tail = s.mass_from(kept[-1][0] + 1) if kept else s.total_mass()
    return TruncatedSignature(tuple(kept), tail)


def parallel2_signature(xi: float) -> Signature:
    """Two components in parallel: ``s_1 = 0`` and ``s_j = (1 - xi) xi^(j-2)``."""
    return parallel_n_signature(2, xi)


def parallel_n_signature(n: int, xi: float) -> Signature:
    """``n`` components in parallel: zeros up to ``n - 1``, then ``(1 - xi) xi^(j-n)``."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    xi = _check_probability("xi", xi, closed=False)
    return Signature((0.0,) * (int(n) - 1), 1.0 - xi, xi)


def parallel2_signature_general(xis: Sequence[float]) -> Signature:
    """Two components in parallel with gap-dependent ``xis = (xi_2, ..., xi_J)``.

    ``s_j = (1 - xi_j) * prod(xi_2 .. xi_{j-1})`` for ``j = 2 .. J``. The
    probability of surviving every listed gap is kept as ``residual_mass``.
    """
    xis = [_check_probability("xi", v) for v in xis]
    prefix = [0.0]
    survive = 1.0
    for xi in xis:
        prefix.append((1.0 - xi) * survive)
        survive *= xi
    return Signature(tuple(prefix), 0.0, 0.0, residual_mass=survive)


def serial2_xi(r: Rates) -> float:
    """Two series components with a spare: ``(mu / (lam + mu)) ** 2``."""
    return xi_exponential(r) ** 2


def remark5_signature(q: float, xi: float) -> Signature:
    """Signature of ``min(max(X1, X2), X3)`` under repair.

    ``q`` is the probability that the series component fails the system
    first; the parallel pair then contributes ``(1 - q)(1 - xi) xi^(j-2)``.
    """
    q = _check_probability("q", q)
    xi = _check_probability("xi", xi, closed=False)
    return Signature((q,), (1.0 - q) * (1.0 - xi), xi)
