"""Discrete model of a scalar-type spectral operator on a sequence space.

A spectrum family lists (or generates) the eigenvalues lam_k; vectors are
given by their coordinates in the eigenbasis, stored in log-polar form; the
spectral measure acts by coordinate masking, so every projection has norm
at most one and the model's spectral-measure bound is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .asymptotics import AsymForm, TailBounds, form_converges
from .errors import SpectrumError, VectorError
from .logdomain import NEG_INF, LogPolar, wrap_phase
from .series import (
    DEFAULT_BUDGET,
    ConvergenceCertificate,
    SeriesBudget,
    SeriesStatus,
    certify_log_series,
)

#: Bound on the operator norm of the spectral measure.  The coordinate model
#: forces the bound to be exactly one; it is housed here as a fixed property.
SPECTRAL_MEASURE_BOUND = 1.0

_MIXED_K0 = 1024


def conjugate_exponent(p: float) -> float:
    if p <= 1.0:
        raise VectorError("dual pairing requires p > 1 so that q = p/(p-1) is finite")
    return p / (p - 1.0)


def _require_finite_complex(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SpectrumError(f"{what} must have finite real and imaginary parts, got {z!r}")
    return z


# ---------------------------------------------------------------------------
# Spectrum families
# ---------------------------------------------------------------------------


class SpectrumFamily:
    """Base class; subclasses provide eigenvalues and tail information."""

    size: Optional[int] = None
    label: str = ""

    def eigenvalues(self, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eigenvalue(self, k: int) -> complex:
        return complex(self.eigenvalues(np.asarray([k], dtype=np.int64))[0])

    # Tail descriptions (None when unavailable); all valid for k >= k_min of
    # the returned bounds.
    def re_bounds(self) -> Optional[TailBounds]:
        return None

    def im_bounds(self) -> Optional[TailBounds]:
        return None

    def abs_pow_bounds(self, q: float) -> Optional[TailBounds]:
        return None

    def log_abs_bounds(self) -> Optional[TailBounds]:
        return None

    @property
    def unbounded(self) -> Optional[bool]:
        return None

    def max_abs(self) -> Optional[float]:
        return None


@dataclass(frozen=True)
class ExplicitSpectrum(SpectrumFamily):
    points: tuple[complex, ...]
    label: str = "explicit"

    def __post_init__(self):
        if not self.points:
            raise SpectrumError("explicit spectrum needs at least one eigenvalue")
        pts = tuple(_require_finite_complex(z, "eigenvalue") for z in self.points)
        if len(set(pts)) != len(pts):
            raise SpectrumError("duplicate eigenvalues are rejected, not merged")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:  # type: ignore[override]
        return len(self.points)

    def eigenvalues(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 1 or ks.max() > len(self.points)):
            raise SpectrumError("index outside the explicit spectrum")
        arr = np.asarray(self.points, dtype=complex)
        return arr[ks - 1]

    @property
    def unbounded(self) -> bool:
        return False

    def max_abs(self) -> float:
        return float(max(abs(z) for z in self.points))


@dataclass(frozen=True)
class PowerLawSpectrum(SpectrumFamily):
    """lam_k = a_re * k^p_re + i * a_im * k^p_im for k = 1, 2, ..."""

    a_re: float
    p_re: float
    a_im: float
    p_im: float
    label: str = ""

    def __post_init__(self):
        for name in ("a_re", "p_re", "a_im", "p_im"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise SpectrumError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.p_re < 0 or self.p_im < 0:
            raise SpectrumError("power-law exponents must be >= 0")
        if not ((self.a_re != 0 and self.p_re > 0) or (self.a_im != 0 and self.p_im > 0)):
            raise SpectrumError(
                "power-law family needs a strictly increasing part; "
                "a constant family would repeat one eigenvalue"
            )
        if not self.label:
            object.__setattr__(
                self,
                "label",
                f"power_law({self.a_re:g}*k^{self.p_re:g} + i*{self.a_im:g}*k^{self.p_im:g})",
            )

    def eigenvalues(self, ks: np.ndarray) -> np.ndarray:
        kf = np.asarray(ks, dtype=float)
        return self.a_re * kf**self.p_re + 1j * self.a_im * kf**self.p_im

    def re_bounds(self) -> TailBounds:
        return TailBounds.exact(AsymForm.power(self.p_re, self.a_re))

    def im_bounds(self) -> TailBounds:
        return TailBounds.exact(AsymForm.power(self.p_im, self.a_im))

    def _abs_leading(self) -> tuple[float, float, float]:
        """(exponent, coefficient, multiplicative slack) for |lam_k|."""
        parts = []
        if self.a_re != 0:
            parts.append((self.p_re, abs(self.a_re)))
        if self.a_im != 0:
            parts.append((self.p_im, abs(self.a_im)))
        if len(parts) == 1:
            return parts[0][0], parts[0][1], 1.0
        (p1, a1), (p2, a2) = sorted(parts, reverse=True)
        if p1 == p2:
            return p1, math.hypot(a1, a2), 1.0
        # |lam| in [a1 k^p1, a1 k^p1 (1 + ratio k^{-(p1-p2)})] for k >= 1
        ratio = a2 / a1
        slack = 1.0 + ratio * _MIXED_K0 ** (-(p1 - p2))
        return p1, a1, slack

    def abs_pow_bounds(self, q: float) -> TailBounds:
        if q <= 0:
            raise ValueError("abs_pow_bounds expects q > 0")
        p, a, slack = self._abs_leading()
        lower = AsymForm.power(p * q, a**q)
        if slack == 1.0:
            return TailBounds.exact(lower)
        upper = AsymForm.power(p * q, (a * slack) ** q)
        return TailBounds(lower, upper, _MIXED_K0)

    def log_abs_bounds(self) -> TailBounds:
        p, a, slack = self._abs_leading()
        lower = AsymForm.log_k(p, const=math.log(a))
        if slack == 1.0:
            return TailBounds.exact(lower)
        upper = AsymForm.log_k(p, const=math.log(a * slack))
        return TailBounds(lower, upper, _MIXED_K0)

    @property
    def unbounded(self) -> bool:
        return True


@dataclass(frozen=True)
class CustomSpectrum(SpectrumFamily):
    """Deterministic rule k -> lam_k with optionally declared tail exponents.

    Without declared exponents every asymptotic-analysis operation refuses
    the family.  With exponents, leading coefficients are estimated from two
    deep samples and widened by a factor of 8 on each side, so only
    strict-exponent decisions can ever be certified.
    """

    fn: Callable[[int], complex]
    declared_tail_exponents: Optional[tuple[float, float]] = None
    label: str = "custom"
    _est: Optional[dict] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.declared_tail_exponents is not None:
            p_re, p_im = self.declared_tail_exponents
            if p_re < 0 or p_im < 0:
                raise SpectrumError("declared tail exponents must be >= 0")
            object.__setattr__(self, "_est", self._estimate())

    def eigenvalues(self, ks: np.ndarray) -> np.ndarray:
        return np.asarray([complex(self.fn(int(k))) for k in np.asarray(ks)], dtype=complex)

    def _estimate(self) -> Optional[dict]:
        p_re, p_im = self.declared_tail_exponents
        k1, k2 = 1 << 15, 1 << 16
        z1, z2 = complex(self.fn(k1)), complex(self.fn(k2))
        out: dict = {}
        for name, p, v1, v2 in (
            ("re", p_re, z1.real, z2.real),
            ("im", p_im, z1.imag, z2.imag),
        ):
            c1, c2 = v1 / k1**p, v2 / k2**p
            if c1 == 0 and c2 == 0:
                out[name] = 0.0
            elif c1 * c2 > 0 and 0.5 < abs(c1 / c2) < 2.0:
                out[name] = (c1 + c2) / 2.0
            else:
                return None
        return out

    def _wide(self, coeff: float, p: float) -> Optional[tuple[float, float, float]]:
        if coeff == 0.0:
            return None
        return p, coeff, 8.0

    def re_bounds(self) -> Optional[TailBounds]:
        if self._est is None:
            return None
        p_re, _ = self.declared_tail_exponents
        c = self._est["re"]
        if c == 0.0:
            return TailBounds.exact(AsymForm.constant(0.0), 1 << 15)
        lo, hi = (c / 8.0, c * 8.0) if c > 0 else (c * 8.0, c / 8.0)
        return TailBounds(AsymForm.power(p_re, lo), AsymForm.power(p_re, hi), 1 << 15)

    def im_bounds(self) -> Optional[TailBounds]:
        if self._est is None:
            return None
        _, p_im = self.declared_tail_exponents
        c = self._est["im"]
        if c == 0.0:
            return TailBounds.exact(AsymForm.constant(0.0), 1 << 15)
        lo, hi = (c / 8.0, c * 8.0) if c > 0 else (c * 8.0, c / 8.0)
        return TailBounds(AsymForm.power(p_im, lo), AsymForm.power(p_im, hi), 1 << 15)

    def abs_pow_bounds(self, q: float) -> Optional[TailBounds]:
        if self._est is None:
            return None
        p_re, p_im = self.declared_tail_exponents
        parts = [(p, abs(self._est[n])) for n, p in (("re", p_re), ("im", p_im)) if self._est[n] != 0]
        if not parts:
            return None
        p, a = max(parts)
        return TailBounds(
            AsymForm.power(p * q, (a / 8.0) ** q),
            AsymForm.power(p * q, (a * 16.0) ** q),
            1 << 15,
        )

    def log_abs_bounds(self) -> Optional[TailBounds]:
        if self._est is None:
            return None
        p_re, p_im = self.declared_tail_exponents
        parts = [(p, abs(self._est[n])) for n, p in (("re", p_re), ("im", p_im)) if self._est[n] != 0]
        if not parts:
            return None
        p, a = max(parts)
        return TailBounds(
            AsymForm.log_k(p, const=math.log(a / 8.0)),
            AsymForm.log_k(p, const=math.log(a * 16.0)),
            1 << 15,
        )

    @property
    def unbounded(self) -> Optional[bool]:
        if self.declared_tail_exponents is None:
            return None
        if self._est is None:
            return None
        p_re, p_im = self.declared_tail_exponents
        return (p_re > 0 and self._est["re"] != 0) or (p_im > 0 and self._est["im"] != 0)


# ---------------------------------------------------------------------------
# Borel predicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BorelPredicate:
    """Pure, deterministic membership rule for a Borel subset of the plane."""

    fn: Callable[[complex], bool]
    description: str
    bulk: Optional[Callable[[np.ndarray], np.ndarray]] = None
    is_all: bool = False
    is_none: bool = False

    def __call__(self, lam: complex) -> bool:
        return bool(self.fn(lam))

    def mask(self, lams: np.ndarray) -> np.ndarray:
        if self.is_all:
            return np.ones(len(lams), dtype=bool)
        if self.is_none:
            return np.zeros(len(lams), dtype=bool)
        if self.bulk is not None:
            return np.asarray(self.bulk(lams), dtype=bool)
        return np.asarray([self.fn(complex(z)) for z in lams], dtype=bool)


def predicate_all() -> BorelPredicate:
    return BorelPredicate(lambda z: True, "C", is_all=True)


def predicate_none() -> BorelPredicate:
    return BorelPredicate(lambda z: False, "{}", is_none=True)


def halfplane_re_ge(c: float) -> BorelPredicate:
    return BorelPredicate(
        lambda z: z.real >= c, f"Re(lam) >= {c:g}", bulk=lambda zs: zs.real >= c
    )


def abs_gt(alpha: float) -> BorelPredicate:
    return BorelPredicate(
        lambda z: abs(z) > alpha, f"|lam| > {alpha:g}", bulk=lambda zs: np.abs(zs) > alpha
    )


def abs_le(alpha: float) -> BorelPredicate:
    return BorelPredicate(
        lambda z: abs(z) <= alpha, f"|lam| <= {alpha:g}", bulk=lambda zs: np.abs(zs) <= alpha
    )


def disk(center: complex, radius: float) -> BorelPredicate:
    c = complex(center)
    return BorelPredicate(
        lambda z: abs(z - c) < radius,
        f"|lam - {c}| < {radius:g}",
        bulk=lambda zs: np.abs(zs - c) < radius,
    )


def predicate_and(d1: BorelPredicate, d2: BorelPredicate) -> BorelPredicate:
    if d1.is_none or d2.is_none:
        return predicate_none()
    if d1.is_all:
        return d2
    if d2.is_all:
        return d1
    bulk = None
    if d1.bulk is not None and d2.bulk is not None:
        bulk = lambda zs: np.asarray(d1.bulk(zs), dtype=bool) & np.asarray(d2.bulk(zs), dtype=bool)
    return BorelPredicate(
        lambda z: d1.fn(z) and d2.fn(z),
        f"({d1.description}) and ({d2.description})",
        bulk=bulk,
    )


# ---------------------------------------------------------------------------
# Coefficient vectors
# ---------------------------------------------------------------------------


class _CoeffImpl:
    def log_coeffs(self, ks: np.ndarray, spectrum: SpectrumFamily):
        raise NotImplementedError

    def decay_bounds(self, spectrum: SpectrumFamily) -> Optional[TailBounds]:
        return None

    def support_size(self) -> Optional[int]:
        return None


@dataclass(frozen=True)
class _ExplicitCoeffs(_CoeffImpl):
    entries: tuple[LogPolar, ...]

    def log_coeffs(self, ks, spectrum):
        ks = np.asarray(ks, dtype=np.int64)
        mags = np.full(ks.shape, NEG_INF)
        phases = np.zeros(ks.shape)
        inside = (ks >= 1) & (ks <= len(self.entries))
        if np.any(inside):
            idx = ks[inside] - 1
            mags[inside] = np.asarray([self.entries[i].log_mag for i in idx])
            phases[inside] = np.asarray([self.entries[i].phase for i in idx])
        return mags, phases

    def support_size(self):
        return len(self.entries)


@dataclass(frozen=True)
class _PowerDecayCoeffs(_CoeffImpl):
    c: float
    r: float

    def log_coeffs(self, ks, spectrum):
        kf = np.asarray(ks, dtype=float)
        return -self.c * kf**self.r, np.zeros(kf.shape)

    def decay_bounds(self, spectrum):
        return TailBounds.exact(AsymForm.power(self.r, -self.c))


@dataclass(frozen=True)
class _PolyDecayCoeffs(_CoeffImpl):
    d: float

    def log_coeffs(self, ks, spectrum):
        kf = np.asarray(ks, dtype=float)
        return -self.d * np.log(kf), np.zeros(kf.shape)

    def decay_bounds(self, spectrum):
        return TailBounds.exact(AsymForm.log_k(-self.d))


@dataclass(frozen=True)
class _CustomCoeffs(_CoeffImpl):
    fn: Callable[[np.ndarray], tuple]
    bounds: Optional[TailBounds]
    support: Optional[int] = None

    def log_coeffs(self, ks, spectrum):
        mags, phases = self.fn(np.asarray(ks, dtype=np.int64))
        return np.asarray(mags, dtype=float), np.asarray(phases, dtype=float)

    def decay_bounds(self, spectrum):
        return self.bounds

    def support_size(self):
        return self.support


@dataclass(frozen=True)
class _MaskedCoeffs(_CoeffImpl):
    base: _CoeffImpl
    predicate: BorelPredicate

    def log_coeffs(self, ks, spectrum):
        mags, phases = self.base.log_coeffs(ks, spectrum)
        keep = self.predicate.mask(spectrum.eigenvalues(ks))
        mags = np.where(keep, mags, NEG_INF)
        phases = np.where(keep, phases, 0.0)
        return mags, phases

    def decay_bounds(self, spectrum):
        # Masking can only remove atoms: the upper envelope survives, the
        # lower one does not.
        b = self.base.decay_bounds(spectrum)
        if b is None:
            return None
        return TailBounds(None, b.upper, b.k_min)

    def support_size(self):
        return self.base.support_size()


@dataclass(frozen=True)
class _MappedCoeffs(_CoeffImpl):
    base: _CoeffImpl
    symbols: tuple  # SymbolFunction-like objects, canonically sorted

    def log_coeffs(self, ks, spectrum):
        mags, phases = self.base.log_coeffs(np.asarray(ks, dtype=np.int64), spectrum)
        lams = spectrum.eigenvalues(ks)
        add_mag = np.zeros(len(lams))
        add_phase = np.zeros(len(lams))
        for sym in self.symbols:
            add_mag = add_mag + sym.log_abs(lams)
            add_phase = add_phase + sym.phase(lams)
        mags = np.where(mags == NEG_INF, NEG_INF, mags + add_mag)
        phases = np.asarray(wrap_phase(phases + add_phase), dtype=float)
        phases = np.where(mags == NEG_INF, 0.0, phases)
        return mags, phases

    def decay_bounds(self, spectrum):
        b = self.base.decay_bounds(spectrum)
        if b is None:
            return None
        for sym in self.symbols:
            g = sym.growth_bounds_on(spectrum)
            if g is None:
                return None
            b = b + g
        return b

    def support_size(self):
        return self.base.support_size()


def _canonical_symbols(symbols) -> tuple:
    flat = []
    for s in symbols:
        flat.extend(s.factors())
    return tuple(sorted(flat, key=lambda s: s.sort_key()))


@dataclass(frozen=True)
class CoefficientVector:
    """A vector f given coordinatewise in the eigenbasis of its spectrum."""

    spectrum: SpectrumFamily
    p_norm: float
    label: str
    impl: _CoeffImpl
    series_view: object = None  # optional support-indexed view (duck typed)

    def __post_init__(self):
        p = float(self.p_norm)
        if not (1.0 <= p < math.inf):
            raise VectorError("p_norm must lie in [1, inf)")
        object.__setattr__(self, "p_norm", p)

    # -- constructors -------------------------------------------------------

    @classmethod
    def explicit(cls, spectrum, values=None, log_polars=None, p: float = 2.0, label: str = "explicit"):
        if (values is None) == (log_polars is None):
            raise VectorError("give exactly one of values / log_polars")
        if values is not None:
            entries = tuple(LogPolar.from_complex(v) for v in values)
        else:
            entries = tuple(log_polars)
        if spectrum.size is not None and len(entries) > spectrum.size:
            raise VectorError("more coefficients than eigenvalues in the explicit spectrum")
        return cls(spectrum, p, label, _ExplicitCoeffs(entries))

    @classmethod
    def power_decay(cls, spectrum, c: float, r: float, p: float = 2.0, label: str = ""):
        if not (c > 0 and r > 0):
            raise VectorError("power decay needs c > 0 and r > 0")
        label = label or f"exp(-{c:g}*k^{r:g})"
        return cls(spectrum, p, label, _PowerDecayCoeffs(float(c), float(r)))

    @classmethod
    def polynomial_decay(cls, spectrum, d: float, p: float = 2.0, label: str = ""):
        if not d * p > 1.0:
            raise VectorError(f"k^-{d:g} is not in l^{p:g}: need d*p > 1")
        label = label or f"k^-{d:g}"
        return cls(spectrum, p, label, _PolyDecayCoeffs(float(d)))

    @classmethod
    def custom(
        cls,
        spectrum,
        fn,
        bounds: Optional[TailBounds] = None,
        support_size: Optional[int] = None,
        p: float = 2.0,
        label: str = "custom",
        series_view=None,
    ):
        vec = cls(spectrum, p, label, _CustomCoeffs(fn, bounds, support_size), series_view)
        vec._certify_storable()
        return vec

    @classmethod
    def zero(cls, spectrum, p: float = 2.0):
        return cls(spectrum, p, "zero", _ExplicitCoeffs(()))

    def _certify_storable(self):
        """Reject vectors whose l^p membership cannot be certified."""
        if self.effective_count() is not None:
            return
        b = self.decay_bounds()
        if self.series_view is not None:
            b = getattr(self.series_view, "coeff_bounds", None)
        if b is None or b.upper is None or not form_converges(b.upper.scale(self.p_norm)):
            raise VectorError(
                f"vector {self.label!r}: l^{self.p_norm:g} summability is not certifiable "
                "(declare a decay envelope or a finite support)"
            )

    # -- accessors ----------------------------------------------------------

    def log_coeffs(self, ks: np.ndarray):
        return self.impl.log_coeffs(np.asarray(ks, dtype=np.int64), self.spectrum)

    def decay_bounds(self) -> Optional[TailBounds]:
        return self.impl.decay_bounds(self.spectrum)

    def support_size(self) -> Optional[int]:
        return self.impl.support_size()

    def effective_count(self) -> Optional[int]:
        """Number of (possibly) nonzero coordinates, when finite."""
        candidates = [n for n in (self.spectrum.size, self.support_size()) if n is not None]
        return min(candidates) if candidates else None

    def to_complex(self, ks: np.ndarray) -> np.ndarray:
        mags, phases = self.log_coeffs(ks)
        out = np.where(mags == NEG_INF, 0.0, np.exp(mags)) * np.exp(1j * phases)
        return out

    def log_norm(
        self, budget: SeriesBudget = DEFAULT_BUDGET, resolve_value: bool = True
    ) -> tuple[float, ConvergenceCertificate]:
        """log ||f||_p with its certificate."""
        p = self.p_norm
        space = self.series_space()

        def term(ks):
            mags, _ = space.coeff_log(ks)
            return p * mags

        bounds = space.coeff_bounds
        cert = certify_log_series(
            term,
            count=space.count,
            bounds=bounds.scale(p) if bounds is not None else None,
            budget=budget,
            resolve_value=resolve_value,
        )
        if cert.status is SeriesStatus.CONVERGES:
            return cert.log_value / p, cert
        if cert.status is SeriesStatus.DIVERGES:
            return math.inf, cert
        return math.nan, cert

    def _with_symbols(self, symbols) -> "CoefficientVector":
        """Internal: coordinatewise multiplication by symbol values F(lam_k)."""
        if self.series_view is not None:
            raise VectorError("symbol application on support-view vectors is not implemented")
        if isinstance(self.impl, _MappedCoeffs):
            merged = _canonical_symbols(self.impl.symbols + tuple(symbols))
            impl = _MappedCoeffs(self.impl.base, merged)
        else:
            impl = _MappedCoeffs(self.impl, _canonical_symbols(symbols))
        names = "*".join(getattr(s, "name", "F") for s in symbols)
        return CoefficientVector(self.spectrum, self.p_norm, f"{names}({self.label})", impl)

    def masked(self, predicate: BorelPredicate) -> "CoefficientVector":
        return CoefficientVector(
            self.spectrum,
            self.p_norm,
            f"[{predicate.description}]{self.label}",
            _MaskedCoeffs(self.impl, predicate),
        )

    def series_space(self):
        if self.series_view is not None:
            return self.series_view
        return DenseSpace(self)


@dataclass(frozen=True)
class DenseSpace:
    """Series index space of a vector indexed directly by eigenvalue order."""

    vector: CoefficientVector

    @property
    def count(self) -> Optional[int]:
        return self.vector.effective_count()

    def lam(self, ks):
        return self.vector.spectrum.eigenvalues(ks)

    def coeff_log(self, ks):
        return self.vector.log_coeffs(ks)

    @property
    def coeff_bounds(self) -> Optional[TailBounds]:
        return self.vector.decay_bounds()

    @property
    def re_bounds(self) -> Optional[TailBounds]:
        return self.vector.spectrum.re_bounds()

    @property
    def im_bounds(self) -> Optional[TailBounds]:
        return self.vector.spectrum.im_bounds()

    @property
    def log_abs_bounds(self) -> Optional[TailBounds]:
        return self.vector.spectrum.log_abs_bounds()

    def abs_pow_bounds(self, q: float) -> Optional[TailBounds]:
        return self.vector.spectrum.abs_pow_bounds(q)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def project(f: CoefficientVector, delta: BorelPredicate) -> CoefficientVector:
    """Spectral-measure action E(delta): keep the coordinates inside delta.

    Idempotent and multiplicative bit for bit; the projected vector never has
    a larger norm, which realizes the measure bound M = 1.
    """
    if delta.is_all:
        return f
    if delta.is_none:
        return CoefficientVector.zero(f.spectrum, f.p_norm)
    if isinstance(f.impl, _ExplicitCoeffs) and f.impl.entries:
        n = len(f.impl.entries)
        keep = delta.mask(f.spectrum.eigenvalues(np.arange(1, n + 1, dtype=np.int64)))
        entries = tuple(
            e if keep[i] else LogPolar.zero() for i, e in enumerate(f.impl.entries)
        )
        return CoefficientVector(
            f.spectrum, f.p_norm, f"[{delta.description}]{f.label}", _ExplicitCoeffs(entries)
        )
    return f.masked(delta)


def multiplicativity_check(
    delta1: BorelPredicate,
    delta2: BorelPredicate,
    f: CoefficientVector,
    prefix: int = 4096,
) -> bool:
    """E(d1)E(d2) = E(d1 and d2), checked coordinatewise exactly.

    Explicit vectors are compared over their whole support; parametric ones
    over a deterministic prefix.
    """
    count = f.effective_count()
    n = count if count is not None else prefix
    ks = np.arange(1, n + 1, dtype=np.int64)
    lhs = project(project(f, delta1), delta2)
    rhs = project(f, predicate_and(delta1, delta2))
    lm, lp = lhs.log_coeffs(ks)
    rm, rp = rhs.log_coeffs(ks)
    return bool(np.array_equal(lm, rm) and np.array_equal(lp, rp))


def _same_selection(f: CoefficientVector, g: CoefficientVector):
    fv, gv = f.series_view, g.series_view
    if fv is None and gv is None:
        return None
    if fv is None or gv is None or fv.selection is not gv.selection:
        raise VectorError("paired vectors must share the same support selection")
    return fv


def total_variation(
    f: CoefficientVector,
    g: CoefficientVector,
    delta: BorelPredicate,
    weight=None,
    budget: SeriesBudget = DEFAULT_BUDGET,
    resolve_value: bool = True,
) -> ConvergenceCertificate:
    """Certify sum over {k: lam_k in delta} of weight(lam_k)*|f_k g_k|.

    `weight` is a symbol-like object exposing log_abs(lams) and
    growth_bounds_for(spectrum) / growth_bounds_on(space); None means the
    constant weight 1.  With weight 1 and delta = C this is the total
    variation of the pairing measure, bounded by ||f||_p ||g||_q.
    """
    if f.spectrum is not g.spectrum and f.spectrum != g.spectrum:
        raise VectorError("total variation needs both vectors on the same spectrum")
    q = conjugate_exponent(f.p_norm)
    if abs(g.p_norm - q) > 1e-9:
        raise VectorError(
            f"dual vector must carry the conjugate exponent q={q:g}, got {g.p_norm:g}"
        )
    view = _same_selection(f, g)

    if view is not None:
        space = view
        gview = g.series_view

        def term(ns):
            fm, _ = view.coeff_log(ns)
            gm, _ = gview.coeff_log(ns)
            tot = fm + gm
            if weight is not None:
                tot = tot + weight.log_abs(view.lam(ns))
            if not delta.is_all:
                keep = delta.mask(view.lam(ns))
                tot = np.where(keep, tot, NEG_INF)
            return tot

        b = view.coeff_bounds + gview.coeff_bounds if (
            view.coeff_bounds is not None and gview.coeff_bounds is not None
        ) else None
        count = None
    else:
        space = DenseSpace(f)

        def term(ks):
            fm, _ = f.log_coeffs(ks)
            gm, _ = g.log_coeffs(ks)
            tot = fm + gm
            if weight is not None:
                tot = tot + weight.log_abs(f.spectrum.eigenvalues(ks))
            if not delta.is_all:
                keep = delta.mask(f.spectrum.eigenvalues(ks))
                tot = np.where(keep, tot, NEG_INF)
            return tot

        b = None
        fb, gb = f.decay_bounds(), g.decay_bounds()
        if fb is not None and gb is not None:
            b = fb + gb
        counts = [n for n in (f.effective_count(), g.effective_count()) if n is not None]
        count = min(counts) if counts else None

    if b is not None and weight is not None:
        wb = weight.growth_bounds_on(space)
        b = b + wb if wb is not None else None
    if b is not None and not delta.is_all:
        b = TailBounds(None, b.upper, b.k_min)
    if view is not None and delta.is_all:
        # support views can couple the coefficient decay to the plan's
        # selection inequalities, where componentwise envelopes cannot
        hook = getattr(view, "tv_lower_form", None)
        if hook is not None:
            got = hook(weight)
            if got is not None:
                form, k_min = got
                b = TailBounds(
                    form,
                    b.upper if b is not None else None,
                    max(k_min, b.k_min if b is not None else 1),
                )
    return certify_log_series(
        term, count=count, bounds=b, budget=budget, resolve_value=resolve_value
    )


@dataclass(frozen=True)
class PairingMeasure:
    """Atomic measure with weight |f_k g_k| at lam_k for a dual pair (f, g)."""

    f: CoefficientVector
    g: CoefficientVector

    def __post_init__(self):
        q = conjugate_exponent(self.f.p_norm)
        if abs(self.g.p_norm - q) > 1e-9:
            raise VectorError("pairing measure needs conjugate exponents")

    def atom_log_mags(self, ks) -> np.ndarray:
        fm, _ = self.f.log_coeffs(ks)
        gm, _ = self.g.log_coeffs(ks)
        return fm + gm

    def total_variation(
        self,
        delta: Optional[BorelPredicate] = None,
        weight=None,
        budget: SeriesBudget = DEFAULT_BUDGET,
    ) -> ConvergenceCertificate:
        return total_variation(
            self.f, self.g, delta if delta is not None else predicate_all(), weight, budget
        )

    def holder_log_bound(self, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
        nf, _ = self.f.log_norm(budget)
        ng, _ = self.g.log_norm(budget)
        return nf + ng
