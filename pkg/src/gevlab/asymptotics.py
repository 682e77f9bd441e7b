"""Closed-form envelopes for the log-magnitude of series terms.

Every tail decision in the package reduces to the question: given the
log-magnitude of the k-th term as a combination of k^q * (log k)^m pieces,
does the series sum converge, and with what certified truncation error?
`AsymForm` is that combination; `TailBounds` sandwiches an actual term
sequence between two forms beyond an explicit index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .logdomain import NEG_INF, logaddexp


@dataclass(frozen=True, order=True)
class AsymTerm:
    power: float
    log_power: int
    coeff: float

    def scale(self) -> tuple:
        return (self.power, self.log_power)


@dataclass(frozen=True)
class AsymForm:
    """Finite sum  const + sum_i c_i * k^{q_i} * (log k)^{m_i}  as a function of k >= 1."""

    terms: tuple[AsymTerm, ...] = ()
    const: float = 0.0

    @classmethod
    def build(cls, terms, const: float = 0.0) -> "AsymForm":
        merged: dict[tuple, float] = {}
        c = float(const)
        for t in terms:
            if t.coeff == 0.0:
                continue
            if t.power == 0.0 and t.log_power == 0:
                c += t.coeff
                continue
            key = (t.power, t.log_power)
            merged[key] = merged.get(key, 0.0) + t.coeff
        kept = tuple(
            AsymTerm(q, m, v)
            for (q, m), v in sorted(merged.items(), reverse=True)
            if v != 0.0
        )
        return cls(kept, c)

    @classmethod
    def constant(cls, c: float) -> "AsymForm":
        return cls.build((), c)

    @classmethod
    def power(cls, q: float, coeff: float, const: float = 0.0) -> "AsymForm":
        return cls.build((AsymTerm(q, 0, coeff),), const)

    @classmethod
    def log_k(cls, coeff: float, const: float = 0.0) -> "AsymForm":
        return cls.build((AsymTerm(0.0, 1, coeff),), const)

    @classmethod
    def power_log(cls, q: float, coeff: float) -> "AsymForm":
        return cls.build((AsymTerm(q, 1, coeff),))

    def __add__(self, other: "AsymForm") -> "AsymForm":
        return AsymForm.build(self.terms + other.terms, self.const + other.const)

    def scale(self, c: float) -> "AsymForm":
        if c == 0.0:
            return AsymForm.constant(0.0)
        return AsymForm.build(
            tuple(AsymTerm(t.power, t.log_power, c * t.coeff) for t in self.terms),
            c * self.const,
        )

    def shift(self, c: float) -> "AsymForm":
        return AsymForm(self.terms, self.const + c)

    def evaluate(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        out = np.full_like(ks, self.const)
        if self.terms:
            lk = np.log(ks)
            for t in self.terms:
                piece = t.coeff * ks**t.power
                if t.log_power:
                    piece = piece * lk**t.log_power
                out = out + piece
        return out

    def at(self, k: float) -> float:
        return float(self.evaluate(np.array([k], dtype=float))[0])

    def leading(self) -> Optional[AsymTerm]:
        return self.terms[0] if self.terms else None

    def derivative(self) -> "AsymForm":
        # d/dk of c k^q (log k)^m = c q k^{q-1}(log k)^m + c m k^{q-1}(log k)^{m-1}
        out = []
        for t in self.terms:
            if t.power != 0.0:
                out.append(AsymTerm(t.power - 1.0, t.log_power, t.coeff * t.power))
            if t.log_power:
                out.append(AsymTerm(t.power - 1.0, t.log_power - 1, t.coeff * t.log_power))
        return AsymForm.build(tuple(out))

    def describe(self) -> str:
        bits = []
        for t in self.terms:
            piece = f"{t.coeff:g}*k^{t.power:g}"
            if t.log_power:
                piece += "*log(k)" if t.log_power == 1 else f"*log(k)^{t.log_power}"
            bits.append(piece)
        if self.const or not bits:
            bits.append(f"{self.const:g}")
        return " + ".join(bits)


class GrowthKind(Enum):
    GROWS = "grows"
    SUPER_DECAY = "super-decay"
    POLY = "poly"
    CONST = "const"


def classify_form(form: AsymForm) -> tuple[GrowthKind, float]:
    """Eventual behavior of e^{form(k)} as a term sequence.

    GROWS/SUPER_DECAY: leading k^q (q>0) piece with positive/negative
    coefficient.  POLY: terms behave like k^d (payload d).  CONST: terms
    approach the constant e^{payload}.
    """
    lead = form.leading()
    if lead is not None and lead.power > 0.0:
        return (GrowthKind.GROWS, lead.coeff) if lead.coeff > 0 else (
            GrowthKind.SUPER_DECAY,
            lead.coeff,
        )
    if lead is not None and lead.power == 0.0 and lead.log_power >= 1:
        return GrowthKind.POLY, lead.coeff
    return GrowthKind.CONST, form.const


def form_converges(form: AsymForm) -> bool:
    """True when sum_k e^{form(k)} is finite by exponent comparison."""
    kind, payload = classify_form(form)
    if kind is GrowthKind.SUPER_DECAY:
        return True
    if kind is GrowthKind.POLY:
        return payload < -1.0
    if kind is GrowthKind.CONST:
        return payload == NEG_INF
    return False


def form_diverges(form: AsymForm) -> bool:
    """True when sum_k e^{form(k)} is infinite whenever terms >= e^{form(k)}."""
    kind, payload = classify_form(form)
    if kind is GrowthKind.GROWS:
        return True
    if kind is GrowthKind.POLY:
        return payload >= -1.0
    if kind is GrowthKind.CONST:
        return payload > NEG_INF
    return False


def _effective_leading(form: AsymForm) -> Optional[AsymTerm]:
    """Leading term with the constant ranked as the k^0 (log k)^0 term."""
    items = list(form.terms)
    if form.const != 0.0:
        items.append(AsymTerm(0.0, 0, form.const))
    if not items:
        return None
    return max(items, key=lambda t: (t.power, t.log_power))


def mono_decreasing_start(form: AsymForm, start: int = 4) -> Optional[int]:
    """Smallest power-of-two index beyond which `form` is decreasing.

    Checks the sign of the symbolic derivative at four doubling checkpoints;
    only meaningful for forms classified SUPER_DECAY or decaying POLY.
    """
    deriv = form.derivative()
    lead = _effective_leading(deriv)
    if lead is not None and lead.coeff > 0:
        return None
    k = max(4, start)
    while k <= 1 << 40:
        pts = np.array([k, 2 * k, 4 * k, 8 * k], dtype=float)
        if np.all(deriv.evaluate(pts) < 0) and form.at(2 * k) <= form.at(k):
            return k
        k *= 2
    return None


def log_tail_bound(form: AsymForm, K: int) -> Optional[float]:
    """Certified upper bound on log( sum_{k > K} e^{form(k)} ), or None.

    Valid whenever form(k) upper-bounds the log-terms for all k > K.  Uses an
    integral bound for polynomial tails and left-endpoint block majorization
    for super-polynomially decaying tails.
    """
    kind, payload = classify_form(form)
    if kind is GrowthKind.CONST and payload == NEG_INF:
        return NEG_INF
    if kind is GrowthKind.POLY and payload < -1.0:
        # the integral bound is exact only for a pure d*log(k) + const form
        if any(t.power != 0.0 or t.log_power != 1 for t in form.terms):
            return None
        # sum_{k>K} k^d e^c <= e^c * K^{d+1} / (-d-1) for decreasing k^d
        return form.const + (payload + 1.0) * math.log(K) - math.log(-payload - 1.0)
    if kind is not GrowthKind.SUPER_DECAY:
        return None
    start = mono_decreasing_start(form)
    if start is None or K < start:
        return None
    acc = NEG_INF
    left = int(K)
    for j in range(240):
        contrib = math.log(left) + form.at(left + 1)
        acc = logaddexp(acc, contrib)
        if j >= 2 and contrib < acc - 60.0:
            return acc
        left *= 2
    return None


@dataclass(frozen=True)
class TailBounds:
    """Sandwich lower(k) <= log-term(k) <= upper(k) valid for k >= k_min.

    Either side may be None when unknown; decisions then use the available
    side only (upper certifies convergence, lower certifies divergence).
    """

    lower: Optional[AsymForm]
    upper: Optional[AsymForm]
    k_min: int = 1

    @classmethod
    def exact(cls, form: AsymForm, k_min: int = 1) -> "TailBounds":
        return cls(form, form, k_min)

    def __add__(self, other: "TailBounds") -> "TailBounds":
        lo = self.lower + other.lower if (self.lower is not None and other.lower is not None) else None
        up = self.upper + other.upper if (self.upper is not None and other.upper is not None) else None
        return TailBounds(lo, up, max(self.k_min, other.k_min))

    def scale(self, c: float) -> "TailBounds":
        """Scale by a scalar; a negative factor swaps the two sides."""
        lo = self.lower.scale(c) if self.lower is not None else None
        up = self.upper.scale(c) if self.upper is not None else None
        if c < 0:
            lo, up = up, lo
        return TailBounds(lo, up, self.k_min)


ZERO_BOUNDS = TailBounds.exact(AsymForm.constant(0.0))
