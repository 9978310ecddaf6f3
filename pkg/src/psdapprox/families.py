"""Power-series distribution families and their Stein machinery.

A family here is a non-negative-integer law whose masses satisfy the
recursion ``(k+1) p_{k+1} = (a + b k) p_k`` (:class:`PanjerPSD`), or the
general series form ``p_k = coeff(k) theta^k / norm`` (:class:`PSDSpec`).
The module provides truncated mass tables with certified tail bounds, the
characterizing operator ``A g(k) = (a + b k) g(k+1) - k g(k)``, the explicit
solution of ``A g = f - E f(Z)``, and uniform / exact suprema for the forward
difference of that solution.  Everything is immutable after construction and
safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import (
    InvalidFamilyError,
    LemmaConditionError,
    NonNormalizableError,
    UndefinedMomentsError,
)

# Relative size at which an unnormalized mass is treated as exactly zero
# (guards float dust such as a + b*k ~ -1e-16 at a finite-support edge).
_ZERO_SNAP = 1e-15

# Default relative tail mass when a table length is chosen automatically.
_AUTO_TAIL = 1e-14


@dataclass(frozen=True)
class PMFTable:
    """Finite probability table with an explicit tail-mass certificate.

    ``masses[j]`` is the probability of ``support_min + j``.  The certificate
    guarantees the untabulated mass is at most ``tail_mass_bound``, so
    ``sum(masses) + tail_mass_bound`` must bracket 1 within tolerance.
    Masses are float64 or, in exact mode, ``Fraction`` values.
    """

    support_min: int
    masses: tuple
    tail_mass_bound: float = 0.0

    def __post_init__(self):
        if self.support_min < 0:
            raise ValueError("support_min must be non-negative")
        if any(m < 0 for m in self.masses):
            raise InvalidFamilyError("negative mass in table")
        if self.tail_mass_bound < 0:
            raise ValueError("tail_mass_bound must be non-negative")
        # tail_mass_bound is an upper certificate on the untabulated mass, so
        # the tabulated mass may not exceed 1 and must reach 1 with the tail.
        tabulated = math.fsum(float(m) for m in self.masses)
        if tabulated > 1 + 1e-9:
            raise InvalidFamilyError(f"tabulated mass {tabulated} exceeds 1")
        if tabulated + float(self.tail_mass_bound) < 1 - 1e-9:
            raise InvalidFamilyError(
                f"mass {tabulated} + tail {self.tail_mass_bound} falls short of 1"
            )

    @property
    def exact(self) -> bool:
        return bool(self.masses) and isinstance(self.masses[0], Fraction)

    @property
    def k_max(self) -> int:
        return self.support_min + len(self.masses) - 1

    def total_with_tail(self):
        if self.exact:
            return sum(self.masses) + self.tail_mass_bound
        return math.fsum(self.masses) + self.tail_mass_bound

    def mass(self, k: int):
        j = k - self.support_min
        if 0 <= j < len(self.masses):
            return self.masses[j]
        return Fraction(0) if self.exact else 0.0

    def as_array(self) -> np.ndarray:
        return np.asarray([float(m) for m in self.masses], dtype=float)

    def shifted(self, offset: int = 1) -> "PMFTable":
        """Law of ``Y + offset`` for ``Y`` distributed by this table."""
        return PMFTable(self.support_min + offset, self.masses, self.tail_mass_bound)

    def to_json(self) -> dict:
        return {
            "support_min": self.support_min,
            "masses": [float(m) for m in self.masses],
            "tail": float(self.tail_mass_bound),
        }


def _geometric_tail(last_mass: float, step_ratio: float, limit_ratio: float) -> float:
    """Bound the mass beyond the table entry ``last_mass`` geometrically.

    The recursion ratio is monotone toward ``limit_ratio``, so every later
    step is dominated by ``r = max(step_ratio, limit_ratio)``; requires r < 1.
    """
    r = max(step_ratio, limit_ratio, 0.0)
    if r >= 1:
        raise NonNormalizableError(f"tail ratio {r} not below 1")
    return last_mass * r / (1.0 - r)


@dataclass(frozen=True)
class PanjerPSD:
    """Family with masses satisfying ``(k+1) p_{k+1} = (a + b k) p_k``.

    ``p0`` is fixed by normalization at construction.  ``max_support`` bounds
    the support for finite families (e.g. binomial).  Members with
    ``a, b >= 0`` form the subclass on which the uniform forward-difference
    bound ``1 ^ 1/a`` is valid (``in_p2``).

    ``g_scale`` rescales the characterizing operator by a positive constant:
    the conventional binomial operator ``p(n-k)g(k+1) - qk g(k)`` is the raw
    form times ``q``, and the solution and its difference bounds divide by it.
    """

    a: float
    b: float
    max_support: Optional[int] = None
    g_scale: float = 1.0
    p0: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.a < 0:
            raise InvalidFamilyError("a < 0 yields a negative mass at k=1")
        if self.g_scale <= 0:
            raise InvalidFamilyError("g_scale must be positive")
        if self.max_support is None:
            if self.b >= 1:
                raise NonNormalizableError("recursion ratio tends to b >= 1")
            if self.b < 0:
                # Support must end where a + b k crosses zero; demand it lands
                # on an integer, else a negative mass appears mid-support.
                k0 = self.a / -self.b
                if abs(k0 - round(k0)) > 1e-9:
                    raise InvalidFamilyError(
                        "a + b k turns negative inside the support; "
                        "declare max_support explicitly"
                    )
                object.__setattr__(self, "max_support", int(round(k0)))
        object.__setattr__(self, "p0", self._normalize())

    # -- basic structure ---------------------------------------------------

    @property
    def in_p2(self) -> bool:
        """True when ``a, b >= 0`` (the uniform-bound subclass)."""
        return self.a >= 0 and self.b >= 0

    def op_coeff(self, k: int) -> float:
        """Coefficient of ``g(k+1)`` in the raw operator, ``a + b k``."""
        return self.a + self.b * k

    def ratio(self, k: int) -> float:
        """Mass ratio ``p_{k+1} / p_k = (a + b k) / (k + 1)``."""
        return self.op_coeff(k) / (k + 1)

    def _step(self, value: float, k: int) -> float:
        """One recursion step ``u_{k+1}`` from ``u_k``, snapping dust to 0."""
        c = self.op_coeff(k)
        if c < 0:
            if abs(c) <= _ZERO_SNAP * (abs(self.a) + abs(self.b) * k + 1):
                return 0.0
            raise InvalidFamilyError(
                f"a + b k = {c} < 0 inside claimed support at k={k}"
            )
        return value * c / (k + 1)

    def _unnormalized(self, k_last: Optional[int]) -> list:
        """Masses relative to p0 for indices ``0..k_last`` (or support end)."""
        out = [1.0]
        k = 0
        while True:
            if self.max_support is not None and k >= self.max_support:
                break
            if k_last is not None and k >= k_last:
                break
            nxt = self._step(out[-1], k)
            if nxt == 0.0 and k_last is None:
                break
            out.append(nxt)
            k += 1
        return out

    def _auto_len(self, tail_target: float) -> int:
        """Smallest table end with certified relative tail below target."""
        u = [1.0]
        k = 0
        running = 1.0
        while True:
            nxt = self._step(u[-1], k)
            u.append(nxt)
            running += nxt
            k += 1
            if self.max_support is not None and k >= self.max_support:
                return k
            if nxt == 0.0:
                return k
            r = max(self.ratio(k), self.b, 0.0)
            if r < 1 and nxt * r / (1 - r) < tail_target * running:
                return k
            if k > 10**6:
                raise NonNormalizableError("tail certificate not reached")

    def _normalize(self) -> float:
        k_end = self.max_support if self.max_support is not None else self._auto_len(1e-18)
        u = self._unnormalized(k_end)
        total = math.fsum(u)
        if self.max_support is None:
            total += _geometric_tail(u[-1], self.ratio(len(u) - 1), self.b)
        if total <= 0:
            raise InvalidFamilyError("no positive mass")
        return 1.0 / total

    # -- tables ------------------------------------------------------------

    def pmf(self, k_max: Optional[int] = None, tail_target: float = _AUTO_TAIL) -> PMFTable:
        """Truncated mass table; see :func:`pmf_panjer`."""
        return pmf_panjer(self, k_max, tail_target=tail_target)

    def pmf_exact(self) -> PMFTable:
        """Exact rational table; finite-support families only.

        Parameters must be exactly representable as rationals of the stored
        floats (constructions like ``binomial_family`` with dyadic p qualify).
        """
        if self.max_support is None:
            raise InvalidFamilyError("exact tables require finite support")
        a = Fraction(self.a).limit_denominator(10**12)
        b = Fraction(self.b).limit_denominator(10**12)
        if float(a) != self.a or float(b) != self.b:
            raise InvalidFamilyError("parameters are not exactly rational")
        u = [Fraction(1)]
        for k in range(self.max_support):
            c = a + b * k
            if c < 0:
                c = Fraction(0)
            u.append(u[-1] * c / (k + 1))
        total = sum(u)
        masses = tuple(x / total for x in u)
        return PMFTable(0, masses, 0.0)

    def mean_var(self):
        """Mean ``a/(1-b)`` and variance ``a/(1-b)^2``; requires ``b < 1``."""
        if self.b >= 1:
            raise UndefinedMomentsError(f"moments undefined for b={self.b} >= 1")
        return self.a / (1 - self.b), self.a / (1 - self.b) ** 2

    @property
    def mean(self) -> float:
        return self.mean_var()[0]

    def to_json(self) -> dict:
        out = {"family": "panjer", "a": self.a, "b": self.b}
        if self.max_support is not None:
            out["max_support"] = self.max_support
        if self.g_scale != 1.0:
            out["g_scale"] = self.g_scale
        return out


@dataclass(frozen=True)
class PSDSpec:
    """General power-series family ``p_k = coeff(k) theta^k / norm``.

    ``norm`` is computed eagerly at construction (with a geometric tail
    certificate) when not supplied, so instances are safe to share across
    threads without lazy-initialization races.
    """

    theta: float
    coeff: Callable[[int], float]
    norm: Optional[float] = None

    def __post_init__(self):
        if self.theta <= 0:
            raise InvalidFamilyError("theta must be positive")
        terms, tail = self._terms_with_tail()
        if not any(t > 0 for t in terms):
            raise InvalidFamilyError("no positive coefficient found")
        if self.norm is None:
            object.__setattr__(self, "norm", math.fsum(terms) + tail)
        object.__setattr__(self, "_terms", tuple(terms))
        object.__setattr__(self, "_tail", tail)

    def _terms_with_tail(self, rel_tol: float = 1e-18):
        terms = []
        running = 0.0
        k = 0
        while True:
            c = self.coeff(k)
            if c < 0:
                raise InvalidFamilyError(f"coeff({k}) < 0")
            try:
                term = c * self.theta**k
            except OverflowError:
                raise NonNormalizableError("series terms overflow") from None
            if term > 1e250:
                raise NonNormalizableError("series terms grow without bound")
            terms.append(term)
            running += terms[-1]
            if k >= 2 and terms[-1] > 0 and terms[-2] > 0:
                r = terms[-1] / terms[-2]
                if r < 1 and terms[-1] * r / (1 - r) < rel_tol * running:
                    return terms, terms[-1] * r / (1 - r)
            if terms[-1] == 0.0 and k >= 2 and terms[-2] == 0.0 and running > 0:
                # Two consecutive zero terms: treat support as exhausted.
                return terms[:-2], 0.0
            if k > 10**5:
                raise NonNormalizableError("series tail certificate not reached")
            k += 1

    @property
    def g_scale(self) -> float:
        return 1.0

    @property
    def max_support(self) -> Optional[int]:
        return None

    def op_coeff(self, k: int) -> float:
        """Coefficient ``theta (k+1) coeff(k+1) / coeff(k)`` of ``g(k+1)``."""
        ck = self.coeff(k)
        if ck == 0:
            return 0.0
        return self.theta * (k + 1) * self.coeff(k + 1) / ck

    def ratio(self, k: int) -> float:
        return self.op_coeff(k) / (k + 1)

    @property
    def b(self) -> float:
        """Limiting recursion ratio proxy used for tail domination."""
        terms = getattr(self, "_terms")
        if len(terms) >= 2 and terms[-2] > 0:
            return terms[-1] / terms[-2]
        return 0.0

    def pmf(self, k_max: Optional[int] = None, tail_target: float = _AUTO_TAIL) -> PMFTable:
        terms, tail = self._terms, self._tail
        if k_max is None or k_max >= len(terms) - 1:
            masses = tuple(t / self.norm for t in terms)
            return PMFTable(0, masses, tail / self.norm)
        cut = [t / self.norm for t in terms[: k_max + 1]]
        dropped = math.fsum(terms[k_max + 1 :]) + tail
        return PMFTable(0, tuple(cut), dropped / self.norm)

    @property
    def mean(self) -> float:
        t = self.pmf()
        ks = np.arange(len(t.masses), dtype=float)
        return float(np.dot(t.as_array(), ks))

    def to_json(self) -> dict:
        terms = getattr(self, "_terms")
        coeffs = [self.coeff(k) for k in range(len(terms))]
        return {"family": "series", "theta": self.theta, "coeffs": coeffs}


# -- constructors -------------------------------------------------------------


def poisson_family(lam: float) -> PanjerPSD:
    """Poisson(lam): ``a = lam``, ``b = 0``."""
    return PanjerPSD(lam, 0.0)


def negative_binomial_family(alpha: float, pbar: float) -> PanjerPSD:
    """NB(alpha, pbar) counting failures: ``a = alpha q``, ``b = q = 1 - pbar``."""
    if not 0 < pbar < 1:
        raise InvalidFamilyError("pbar must be in (0,1)")
    q = 1 - pbar
    return PanjerPSD(alpha * q, q)


def geometric_family(pbar: float) -> PanjerPSD:
    return negative_binomial_family(1.0, pbar)


def binomial_family(n: int, p: float, convention: str = "panjer") -> PanjerPSD:
    """Binomial(n, p) with ``a = np/q``, ``b = -p/q``, support ``0..n``.

    ``convention="panjer"`` keeps the raw operator (difference bound 1/np);
    ``convention="standard"`` rescales by ``q`` to the usual operator
    ``p(n-k)g(k+1) - qk g(k)`` (difference bound 1/npq).
    """
    if not 0 < p < 1:
        raise InvalidFamilyError("p must be in (0,1)")
    q = 1 - p
    if convention == "panjer":
        scale = 1.0
    elif convention == "standard":
        scale = q
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return PanjerPSD(n * p / q, -p / q, max_support=n, g_scale=scale)


def dgm_to_psd(V: Callable[[int], float], w: float) -> PSDSpec:
    """Map a Gibbs-measure description ``exp(V(k)) w^k / k!`` to a PSDSpec.

    The coefficient function is ``exp(V(k)) / k!`` (evaluated in log space),
    the series parameter is ``w``; the normalizing constant carries a
    geometric tail certificate and construction fails if it diverges.
    """

    def coeff(k: int) -> float:
        return math.exp(V(k) - math.lgamma(k + 1))

    return PSDSpec(theta=w, coeff=coeff)


def family_to_json(spec) -> dict:
    return spec.to_json()


def family_from_json(obj: dict):
    kind = obj.get("family")
    if kind == "panjer":
        return PanjerPSD(
            float(obj["a"]),
            float(obj["b"]),
            max_support=obj.get("max_support"),
            g_scale=float(obj.get("g_scale", 1.0)),
        )
    if kind == "series":
        coeffs = [float(c) for c in obj["coeffs"]]

        def coeff(k: int) -> float:
            return coeffs[k] if k < len(coeffs) else 0.0

        return PSDSpec(theta=float(obj["theta"]), coeff=coeff)
    raise ValueError(f"unknown family kind {kind!r}")


# -- mass tables ---------------------------------------------------------------


def pmf_panjer(
    spec: PanjerPSD, k_max: Optional[int] = None, tail_target: float = _AUTO_TAIL
) -> PMFTable:
    """Mass table of a Panjer family up to ``k_max`` with certified tail.

    With ``k_max=None`` the table extends until the certified geometric tail
    drops below ``tail_target`` (relative).  For an explicit ``k_max`` the
    certificate walks past any region where the recursion ratio is still
    above one, then dominates the remainder geometrically.
    """
    if k_max is not None and k_max < 0:
        raise ValueError("k_max must be non-negative")
    k_end = k_max if k_max is not None else spec._auto_len(tail_target)
    u = spec._unnormalized(k_end)
    masses = [spec.p0 * x for x in u]

    covered_support = spec.max_support is not None and len(masses) - 1 >= spec.max_support
    if covered_support or masses[-1] == 0.0:
        tail = 0.0
    else:
        k = len(masses) - 1
        extra = 0.0
        m = masses[-1]
        while spec.ratio(k) >= 1:
            m = m * spec.ratio(k)
            extra += m
            k += 1
            if k - len(masses) > 10**6:
                raise NonNormalizableError("tail certificate not reached")
        tail = extra + _geometric_tail(m, spec.ratio(k), spec.b)
    return PMFTable(0, tuple(masses), tail)


# -- Stein operator machinery ---------------------------------------------------


def stein_apply(spec, g: Callable[[int], float], k: int) -> float:
    """Evaluate the characterizing operator at ``k``.

    Raw form ``(a + b k) g(k+1) - k g(k)`` (series form uses the coefficient
    ratio), times the family's operator scaling.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    return spec.g_scale * (spec.op_coeff(k) * g(k + 1) - k * g(k))


def indicator(A) -> Callable[[int], float]:
    """Test function ``1_A`` for a collection of support points."""
    s = frozenset(A)
    return lambda k: 1.0 if k in s else 0.0


class SteinSolution:
    """Solution ``g`` of ``A_Z g = f - E f(Z)`` with ``g(0) = 0``.

    Evaluation is split into three zones to stay cancellation-free after the
    division by ``k p_k``: forward partial sums below the distribution median,
    negated reverse sums from the median out to where the table truncation
    could bite, and ratio-product tail sums beyond that.  Off the support of
    the family the solution is zero by convention.
    """

    # Reverse-sum zone requires p_k at least this many times the tail bound.
    _TAIL_GUARD = 1e13

    def __init__(self, spec, f: Callable[[int], float], f_bound: Optional[float] = None):
        self.spec = spec
        self.f = f
        table = spec.pmf(tail_target=1e-22)
        p = table.as_array()
        self._p = p
        self._k_table = len(p) - 1
        fv = np.asarray([float(f(k)) for k in range(len(p))], dtype=float)
        self._f_bound = f_bound if f_bound is not None else float(np.abs(fv).max())
        self.ef = float(np.dot(p, fv))
        self.ef_slack = table.tail_mass_bound * (self._f_bound + abs(self.ef))
        self._h = fv - self.ef
        terms = p * self._h
        self._terms = terms
        # S[k] = sum_{j<k} p_j h_j ; R[k] = sum_{j>=k} p_j h_j (reverse order
        # accumulates the smallest contributions first).
        self._S = np.concatenate(([0.0], np.cumsum(terms)))
        self._R = np.cumsum(terms[::-1])[::-1]
        self._crossover = int(np.searchsorted(np.cumsum(p), 0.5)) + 1
        self._reverse_ok = p >= self._TAIL_GUARD * table.tail_mass_bound
        self._memo = {}

    def __call__(self, k: int) -> float:
        if k <= 0:
            return 0.0
        scale = self.spec.g_scale
        if k <= self._k_table:
            pk = self._p[k]
            if pk == 0.0:
                return 0.0
            if k < self._crossover:
                return self._S[k] / (k * pk) / scale
            if self._reverse_ok[k]:
                return -self._R[k] / (k * pk) / scale
        if self.spec.max_support is not None and k > self.spec.max_support:
            return 0.0
        return self._ratio_tail(k) / scale

    def _ratio_tail(self, k: int) -> float:
        # g(k) = -(1/k) sum_{j>=k} (p_j/p_k) h(j); the mass ratios come from
        # recursion steps, so no tiny-probability division ever happens.
        cached = self._memo.get(k)
        if cached is None:
            total = 0.0
            prod = 1.0
            j = k
            while True:
                if self.spec.max_support is not None and j > self.spec.max_support:
                    break
                fj = self.f(j) if j > self._k_table else None
                hj = (float(fj) - self.ef) if fj is not None else self._h[j]
                total += prod * hj
                prod *= self.spec.ratio(j)
                j += 1
                if prod < 1e-20 or prod == 0.0 or j - k > 10**5:
                    break
            cached = -total / k
            self._memo[k] = cached
        return cached

    # -- displayed forms, for consistency diagnostics ------------------------

    def forward_form(self, k: int) -> float:
        """Forward partial-sum form, compensated exactly (fsum)."""
        if k <= 0:
            return 0.0
        if k > self._k_table or self._p[k] == 0.0:
            return self(k)
        s = math.fsum(self._terms[:k])
        return s / (k * self._p[k]) / self.spec.g_scale

    def tail_form(self, k: int) -> float:
        """Negated tail-sum form (reverse accumulation)."""
        if k <= 0:
            return 0.0
        if k > self._k_table or self._p[k] == 0.0:
            return self(k)
        return -self._R[k] / (k * self._p[k]) / self.spec.g_scale

    def delta(self, k: int) -> float:
        return self(k + 1) - self(k)

    def sup_abs_delta(self, k_hi: Optional[int] = None) -> float:
        hi = self._k_table if k_hi is None else k_hi
        return max(abs(self.delta(k)) for k in range(hi + 1))


def stein_solve(spec, f: Callable[[int], float], f_bound: Optional[float] = None) -> SteinSolution:
    """Solve ``A_Z g = f - E f(Z)`` for a bounded test function ``f``."""
    return SteinSolution(spec, f, f_bound)


# -- forward-difference bounds ---------------------------------------------------


def delta_g_uniform_bound(spec: PanjerPSD) -> float:
    """Uniform bound on ``sup_k |Delta g_f(k)|`` over indicator test functions.

    ``1 ^ 1/a`` when ``a, b >= 0``; for ``b < 0`` finite-support families the
    optimized ``sup_k (1/k ^ 1/(a+bk))``, which equals ``1/np`` for the
    binomial in raw form.  Rescaled by the operator convention.
    """
    if spec.a <= 0:
        raise InvalidFamilyError("uniform difference bound requires a > 0")
    if spec.in_p2:
        val = min(1.0, 1.0 / spec.a)
    else:
        if spec.max_support is None:
            raise InvalidFamilyError("b < 0 requires finite support")
        best = 0.0
        for k in range(1, spec.max_support + 1):
            c = spec.op_coeff(k)
            second = 1.0 / c if c > _ZERO_SNAP else math.inf
            best = max(best, min(1.0 / k, second))
        val = best
    return val / spec.g_scale


def delta_g_exact_sup(spec, k_max: int, cond_tol: float = 1e-9) -> float:
    """Exact supremum of ``|Delta g_f(k)|`` over ``f`` with values in [0,1].

    Evaluates ``Fbar(k+1)/c_k + F(k-1)/k`` for ``1 <= k <= k_max`` after
    verifying the monotonicity condition
    ``k F(k)/F(k-1) >= c_k >= k Fbar(k+1)/Fbar(k)`` at every tabulated k
    (the condition is checked, not assumed; violations carry the offending
    ``k``).  ``c_k`` is the operator coefficient at ``k``.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    table = spec.pmf(tail_target=1e-18)
    p = table.as_array()
    kk = min(k_max, len(p) - 2)
    cdf = np.cumsum(p)
    sf = np.cumsum(p[::-1])[::-1] + table.tail_mass_bound  # survival, upper value

    best = 0.0
    for k in range(1, kk + 1):
        if p[k] == 0.0:
            continue
        c = spec.op_coeff(k)
        lhs = k * cdf[k] / cdf[k - 1] if cdf[k - 1] > 0 else math.inf
        rhs = k * sf[k + 1] / sf[k] if sf[k] > 0 else 0.0
        if not (lhs >= c - cond_tol and c >= rhs - cond_tol):
            raise LemmaConditionError(k)
        first = sf[k + 1] / c if sf[k + 1] > 1e-300 and c > 0 else 0.0
        val = first + cdf[k - 1] / k
        best = max(best, val)
    return best / spec.g_scale


def g_norm_bound(spec, k_probe: Optional[int] = None) -> float:
    """Certified numeric bound on ``sup_f sup_k |g_f(k)|`` over indicators.

    The solution is linear in ``f``, so ``|g_{1_A}(k)|`` is at most the sum of
    the one-point solutions ``|g_{1_{j}}(k)|`` over ``j in A``; that sum has
    the closed form ``2 F(k-1) Fbar(k) / (k p_k)``, a doubling of the exact
    one-sided supremum by the triangle inequality.  Beyond the probed range
    the expression is dominated by ``2/(k(1-r))`` with ``r`` the certified
    tail ratio, which is folded into the result.
    """
    table = spec.pmf(tail_target=1e-18)
    p = table.as_array()
    hi = len(p) - 1 if k_probe is None else min(k_probe, len(p) - 1)
    cdf = np.cumsum(p)
    sf = np.cumsum(p[::-1])[::-1] + table.tail_mass_bound
    best = 0.0
    for k in range(1, hi + 1):
        if p[k] == 0.0:
            continue
        best = max(best, 2.0 * cdf[k - 1] * sf[k] / (k * p[k]))
    if spec.max_support is None:
        r = max(spec.ratio(len(p) - 1), spec.b)
        if r < 1:
            best = max(best, 2.0 / (max(hi, 1) * (1.0 - r)))
    return best / spec.g_scale
