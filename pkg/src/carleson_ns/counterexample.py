"""A divergence-free field with a bounded Carleson quantity and unbounded BMO^-1 norm.

The first component is

    u1(t, x) = sum_{j, k} a_j(t) Phi^e_{j,k}(x),   e = (1, ..., 1),
    a_j(t)   = t^-a 2^-bj  for 1 <= j <= -log2(t)/2 and t < 1, else 0,

with ``0 < a < 1/2`` and ``n/2 + 2a - 1 < b < n/2``.  Its coefficients do not
depend on ``k``, so ``u1(t, x) = t^-a sum_j 2^{(n/2 - b) j} P(2^j x)`` where
``P`` is the integer periodization of ``Phi^e``, a trigonometric polynomial.
The second component is ``u2 = -(d1/d2) u1`` and the rest vanish, which makes
the field divergence free.

Along ``t = 4^-m`` the fixed-time quantity grows like ``t^-2a`` while the
time-integrated Carleson quantity stays bounded over all root cubes; the
weighted sup norm ``t^(1/2) |u1|_inf`` stays bounded when
``b >= n/2 + 2a - 1``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import dyadic, kernels
from .dyadic import CarlesonDivergence, DyadicCube, QuadratureSpec, TimeCoefficientField
from .meyer import (
    GridSpec,
    MeyerProfile,
    WaveletIndex,
    evaluate_polynomial,
    factorize_polynomial,
    periodization_polynomial,
    phi_hat,
    polynomial_sup_norm,
    TWO_PI,
)

SUP_NORM_LATTICE = 4096


class ParameterError(ValueError):
    """Parameters outside the admissible region; ``constraint`` names the violated one."""

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


class CertificateRefused(ArithmeticError):
    """The sampled curve does not certify blow-up."""


@dataclass(frozen=True)
class CounterexampleParams:
    n: int = 2
    a: float = 0.25
    b: float = 0.75

    @property
    def e(self) -> tuple[int, ...]:
        return (1,) * self.n

    @property
    def carleson_exponent(self) -> float:
        """``b - n/2 - 2a``; the time integral converges iff it exceeds -1."""
        return self.b - self.n / 2 - 2 * self.a

    @property
    def sup_norm_exponent(self) -> float:
        """Power of ``t`` in the sup-norm bound as ``t -> 0``."""
        return 0.5 - self.a - (self.n / 2 - self.b) / 2

    def as_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "b": self.b}


def validate_params(n: int, a: float, b: float) -> CounterexampleParams:
    if int(n) != n or n < 2:
        raise ParameterError("n >= 2", f"dimension n={n} must be an integer >= 2")
    if not (0 < a < 0.5):
        raise ParameterError("0 < a < 1/2", f"a={a} must satisfy 0 < a < 1/2")
    lower = n / 2 + 2 * a - 1
    if not (b > lower):
        raise ParameterError(
            "b > n/2 + 2a - 1", f"b={b} must exceed the lower bound n/2 + 2a - 1 = {lower:g}"
        )
    if not (b < n / 2):
        raise ParameterError("b < n/2", f"b={b} must stay below n/2 = {n / 2:g}")
    return CounterexampleParams(int(n), float(a), float(b))


def top_scale(t: float) -> int:
    """Largest ``j`` with ``j <= -log2(t)/2``, i.e. ``4^-j >= t``; scale ``m`` is active at ``t = 4^-m``."""
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    if t >= 1:
        return 0
    J = int(math.floor(-0.5 * math.log2(t)))
    while math.ldexp(1.0, -2 * (J + 1)) >= t:
        J += 1
    while J > 0 and math.ldexp(1.0, -2 * J) < t:
        J -= 1
    return J


def coeff(params: CounterexampleParams, t: float, j: int, k: Sequence[int] = ()) -> float:
    """``a^e_{j,k}(t)``; independent of ``k``."""
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    if t >= 1 or j < 1 or j > top_scale(t):
        return 0.0
    return t**-params.a * 2.0 ** (-params.b * j)


def _geometric_constants(params: CounterexampleParams):
    n, a, b = params.n, params.a, params.b
    r = 2.0 ** (n - 2 * b)
    q = r * 4.0 ** -(1 - 2 * a)
    return r, q


def _piece_integral(params: CounterexampleParams, m: int) -> float:
    # int_{4^-(m+1)}^{4^-m} t^-2a dt through the antiderivative t^(1-2a) / (1-2a)
    p = 1.0 - 2.0 * params.a
    return (4.0 ** (-m * p) - 4.0 ** (-(m + 1) * p)) / p


def carleson_tail_bound(params: CounterexampleParams, j0: int, m: int) -> float:
    """Upper bound for the contribution of ``t <= 4^-m`` to the Carleson quantity at level ``j0``."""
    r, q = _geometric_constants(params)
    if q >= 1:
        return math.inf
    p = 1.0 - 2.0 * params.a
    # G(m') <= r^(m'+1) / (r - 1) and the piece integral is 4^(-m' p) (1 - 4^-p) / p
    const = r / (r - 1.0) * (1.0 - 4.0**-p) / p
    return const * q**m / (1.0 - q)


@dataclass(frozen=True)
class BBMOResult:
    value: float
    tail_bound: float
    m_max: int


def bbmo_closed_form(params: CounterexampleParams, j0: int, m_max: int | None = None,
                     rtol: float = 1e-9) -> BBMOResult:
    """Carleson quantity ``S(j0)`` summed exactly over the dyadic time intervals.

    ``S(j0) = sum_{m >= M} G(m) int_{4^-(m+1)}^{4^-m} t^-2a dt`` with
    ``M = max(j0, 1)`` and ``G(m) = sum_{j=M}^{m} 2^{(n-2b) j}``.  With
    ``m_max`` given the sum stops there; otherwise it is extended until the
    geometric tail bound falls below ``rtol`` times the value.
    """
    if j0 < 0:
        raise ValueError(f"j0 must be >= 0, got {j0}")
    M = max(j0, 1)
    if m_max is not None and m_max < M + 5:
        raise ValueError(f"m_max must be at least max(j0, 1) + 5 = {M + 5}, got {m_max}")
    r, q = _geometric_constants(params)
    if q >= 1:
        raise CarlesonDivergence(
            f"time exponent b - n/2 - 2a = {params.carleson_exponent:g} <= -1: "
            "the Carleson integral diverges (b must exceed n/2 + 2a - 1)"
        )
    value = 0.0
    G = 0.0
    m = M
    while True:
        G += 2.0 ** ((params.n - 2 * params.b) * m)
        value += G * _piece_integral(params, m)
        tail = carleson_tail_bound(params, j0, m + 1)
        if m_max is not None:
            if m >= m_max:
                return BBMOResult(value, tail, m)
        elif tail <= rtol * value or m >= M + 20000:
            return BBMOResult(value, tail, m)
        m += 1


def bbmo_upper_bound(params: CounterexampleParams, j0: int) -> float:
    """``C int_0^{4^-j0} t^{b - n/2 - 2a} dt`` with ``C = r / (r - 1)``, ``r = 2^{n-2b}``."""
    r, _ = _geometric_constants(params)
    e = params.carleson_exponent
    if e <= -1:
        return math.inf
    return r / (r - 1.0) * 4.0 ** (-j0 * (e + 1)) / (e + 1)


def blim_closed_form(params: CounterexampleParams, t: float, j0: int) -> float:
    """``c(t, j0) = t^-2a sum_{j=max(j0,1)}^{floor(-log2(t)/2)} 2^{(n-2b-2) j}``."""
    if not (0 < t < 1):
        raise ValueError(f"time must lie in (0, 1), got {t}")
    if j0 < 0:
        raise ValueError(f"j0 must be >= 0, got {j0}")
    ratio = params.n - 2 * params.b - 2
    total = 0.0
    for j in range(max(j0, 1), top_scale(t) + 1):
        total += 2.0 ** (ratio * j)
    return t ** (-2 * params.a) * total


def blim_limit_constant(params: CounterexampleParams) -> float:
    """``sum_{j>=1} 2^{(n-2b-2) j}``, the limit of ``c(4^-m, 0) 4^{-2am}``."""
    r = 2.0 ** (params.n - 2 * params.b - 2)
    return r / (1.0 - r)


@dataclass(frozen=True)
class BlowupCertificate:
    m_values: list[int]
    t_values: list[float]
    c_values: list[float]
    fitted_exponent: float
    expected_exponent: float
    limit_constant: float

    @property
    def slope(self) -> float:
        """Least-squares slope of ``log2 c`` against ``m``."""
        return -2.0 * self.fitted_exponent


def blowup_certificate(params: CounterexampleParams, m_range: Sequence[int] = range(4, 17),
                       c_func: Callable[[float], float] | None = None,
                       slope_tol: float = 0.05) -> BlowupCertificate:
    """Certify ``c(4^-m, 0) ~ t^-2a`` along ``t = 4^-m``.

    Refused unless the curve is strictly increasing and the slope of
    ``log2 c`` against ``m`` is ``4a`` within ``slope_tol``.
    """
    ms = list(m_range)
    if len(ms) < 4:
        raise ValueError("need at least four values of m")
    if c_func is None:
        c_func = lambda t: blim_closed_form(params, t, 0)
    ts = [4.0**-m for m in ms]
    cs = [float(c_func(t)) for t in ts]
    if any(not (c > 0) or not math.isfinite(c) for c in cs):
        raise CertificateRefused(f"curve has non-positive or non-finite values: {cs}")
    if any(c2 <= c1 for c1, c2 in zip(cs, cs[1:])):
        raise CertificateRefused("c(4^-m, 0) is not strictly increasing in m")
    slope = float(np.polyfit(ms, np.log2(cs), 1)[0])
    expected = 4 * params.a
    if abs(slope - expected) > slope_tol:
        raise CertificateRefused(f"fitted slope {slope:.6g} differs from 4a = {expected:.6g} by more than {slope_tol}")
    limit = cs[-1] * ts[-1] ** (2 * params.a)
    return BlowupCertificate(ms, ts, cs, -slope / 2.0, -2 * params.a, limit)


def theorem_field(params: CounterexampleParams) -> TimeCoefficientField:
    """The coefficients of ``u1`` as a generator for the functionals of :mod:`dyadic`."""
    e = params.e

    def value(t: float, idx: WaveletIndex) -> float:
        if idx.eps != e:
            return 0.0
        return coeff(params, t, idx.j, idx.k)

    def active(t: float):
        return range(1, top_scale(t) + 1) if t < 1 else range(0)

    return TimeCoefficientField(
        n=params.n,
        coeff=value,
        active_scales=active,
        channels=(e,),
        k_invariant=True,
        dyadic_breakpoints=True,
        carleson_tail=lambda j0, m: carleson_tail_bound(params, j0, m),
    )


@lru_cache(maxsize=None)
def _e_polynomial(profile: MeyerProfile, n: int):
    return tuple(periodization_polynomial(profile, (1,) * n))


@lru_cache(maxsize=None)
def periodization_sup_bound(profile: MeyerProfile, n: int) -> tuple[float, float]:
    """``(sampled max |P|, rigorous upper bound for sup |P|)``.

    The lattice has spacing ``h = 1/4096`` per axis; any point is within
    ``h/2`` of a lattice point in every coordinate, so ``sup |P|`` exceeds the
    lattice maximum by at most ``sum_m |c_m| 2 pi |m|_1 h / 2``.
    """
    terms = _e_polynomial(profile, n)
    sampled = polynomial_sup_norm(terms, n, SUP_NORM_LATTICE)
    lip = sum(abs(c) * TWO_PI * sum(abs(mi) for mi in m) for m, c in terms)
    return sampled, sampled + lip * 0.5 / SUP_NORM_LATTICE


def sup_norm_bound(params: CounterexampleParams, profile: MeyerProfile, t: float) -> float:
    """Upper bound for ``t^(1/2) |u1(t)|_inf`` from the triangle inequality over scales."""
    if not (0 < t < 1):
        raise ValueError(f"time must lie in (0, 1), got {t}")
    _, p_sup = periodization_sup_bound(profile, params.n)
    total = 0.0
    for j in range(1, top_scale(t) + 1):
        total += 2.0 ** ((params.n / 2 - params.b) * j)
    return t ** (0.5 - params.a) * p_sup * total


def _check_box(grid: GridSpec, n: int) -> None:
    if grid.n != n:
        raise ValueError(f"grid dimension {grid.n} does not match n = {n}")
    if abs(2 * grid.box_side - round(2 * grid.box_side)) > 1e-12:
        raise ValueError(f"box_side must be a multiple of 1/2 for a periodic field, got {grid.box_side}")


def synthesize_u1(params: CounterexampleParams, profile: MeyerProfile, t: float, grid: GridSpec) -> np.ndarray:
    """Samples of ``u1(t)`` from the trigonometric polynomial, scale by scale."""
    _check_box(grid, params.n)
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    shape = (grid.points_per_side,) * grid.n
    J = top_scale(t) if t < 1 else 0
    if J < 1:
        return np.zeros(shape)
    grid.require_scale(J)
    terms = _e_polynomial(profile, params.n)
    factors = factorize_polynomial(terms, params.n)
    x = grid.axis()
    u = np.zeros(shape)
    for j in range(1, J + 1):
        weight = 2.0 ** ((params.n / 2 - params.b) * j)
        if factors is None:
            axes = [x.reshape([-1 if d == i else 1 for d in range(grid.n)]) for i in range(grid.n)]
            u += weight * evaluate_polynomial(terms, [2.0**j * xi for xi in axes])
        else:
            # P(y) = prod_i p_i(y_i): evaluate per axis and take the outer product
            vals = np.ones((), dtype=complex)
            for f in factors:
                vals = np.multiply.outer(vals, evaluate_polynomial(f, [2.0**j * x], real=False))
            u += weight * vals.real
    return t**-params.a * u


def u2_multiplier(xi1, xi2):
    """Symbol of ``-(d1/d2)``, i.e. ``-xi1/xi2``; zero where ``xi2 = 0``."""
    xi1, xi2 = np.broadcast_arrays(np.asarray(xi1, float), np.asarray(xi2, float))
    out = np.zeros(xi1.shape)
    nz = xi2 != 0
    out[nz] = -xi1[nz] / xi2[nz]
    return out


def _frequency_axes(grid: GridSpec) -> list[np.ndarray]:
    # real-FFT layout: the last axis keeps only non-negative frequencies
    N = grid.points_per_side
    full = grid.frequencies()
    half = TWO_PI / grid.box_side * np.fft.rfftfreq(N, d=1.0 / N)
    axes = []
    for i in range(grid.n):
        xi = half if i == grid.n - 1 else full
        axes.append(xi.reshape([-1 if d == i else 1 for d in range(grid.n)]))
    return axes


def apply_u2_multiplier(u1: np.ndarray, grid: GridSpec) -> np.ndarray:
    """``-(d1/d2) u1`` for a periodic sampled field, computed in frequency space."""
    if grid.n < 2:
        raise ValueError("u2 needs n >= 2")
    xi = _frequency_axes(grid)
    return np.fft.irfftn(u2_multiplier(xi[0], xi[1]) * np.fft.rfftn(u1), s=u1.shape, axes=tuple(range(u1.ndim)))


def build_u2(params: CounterexampleParams, profile: MeyerProfile, t: float, grid: GridSpec) -> np.ndarray:
    if params.n < 2:
        raise ValueError("u2 needs n >= 2")
    return apply_u2_multiplier(synthesize_u1(params, profile, t, grid), grid)


def synthesize_field(params: CounterexampleParams, profile: MeyerProfile, t: float, grid: GridSpec) -> list[np.ndarray]:
    """All components ``(u1, u2, 0, ..., 0)`` at time ``t``."""
    u1 = synthesize_u1(params, profile, t, grid)
    u2 = apply_u2_multiplier(u1, grid)
    return [u1, u2] + [np.zeros_like(u1) for _ in range(params.n - 2)]


def divergence_residual(components: Sequence[np.ndarray], grid: GridSpec) -> float:
    """``max |sum_i xi_i u_i_hat| / max |u_hat|`` over the dual lattice; 0 for a zero field."""
    if len(components) != grid.n:
        raise ValueError(f"need {grid.n} components, got {len(components)}")
    shape = (grid.points_per_side,) * grid.n
    for c in components:
        if np.shape(c) != shape:
            raise ValueError(f"component of shape {np.shape(c)} does not match the grid {shape}")
    xi = _frequency_axes(grid)
    # real fields: the half spectrum holds every magnitude of the full one
    hats = [np.fft.rfftn(c) for c in components]
    div = sum(x * h for x, h in zip(xi, hats))
    norm = max(float(np.max(np.abs(h))) for h in hats)
    if norm == 0:
        return 0.0
    return float(np.max(np.abs(div))) / norm


# -- re-analysis of the periodic field at desk scale ---------------------------------


def _lattice_terms(params: CounterexampleParams, profile: MeyerProfile, j: int, component: int):
    # Fourier series of 2^{(n/2-b) j} P(2^j x) (times the u2 symbol for component 2),
    # as (angular frequency vector, coefficient) pairs
    out = []
    for m, c in _e_polynomial(profile, params.n):
        if component == 2:
            c = c * (-m[0] / m[1])
        xi = TWO_PI * 2.0**j * np.array(m, dtype=float)
        out.append((xi, 2.0 ** ((params.n / 2 - params.b) * j) * c))
    return out


def periodic_wavelet_coefficient(terms, profile: MeyerProfile, idx: WaveletIndex) -> float:
    """``<f, Phi^eps_{j,k}>`` for ``f = sum c exp(i xi.x)`` given as ``(xi, c)`` pairs.

    Uses ``<exp(i xi.x), Phi_{j,k}> = Phi_hat_{j,k}(-xi)`` for the real wavelet.
    """
    s = 2.0**-idx.j
    total = 0.0j
    for xi, c in terms:
        arg = -s * np.asarray(xi)
        phase = np.exp(1j * s * float(np.dot(xi, idx.k)))
        total += c * s ** (idx.n / 2) * phase * phi_hat(profile, idx.eps, arg)
    return total.real


def u2_desk_field(params: CounterexampleParams, profile: MeyerProfile, max_scale: int = 3) -> TimeCoefficientField:
    """Wavelet coefficients of ``u2`` up to scale ``max_scale``, by re-analysis.

    ``u2`` is not a combination of the ``e`` channel alone: its coefficient at
    ``(eps, j', k)`` collects the ``u1`` scales ``j' - 1`` and ``j'``.
    """
    if params.n != 2:
        raise ValueError("the desk-scale re-analysis is implemented for n = 2")
    channels = tuple(eps for eps in itertools.product((0, 1), repeat=2) if any(eps))

    @lru_cache(maxsize=None)
    def beta(eps, jp, kmod, j):
        return periodic_wavelet_coefficient(
            _lattice_terms(params, profile, j, 2), profile, WaveletIndex(eps, jp, kmod)
        )

    def value(t: float, idx: WaveletIndex) -> float:
        if t >= 1 or idx.j < 1 or idx.j > max_scale:
            return 0.0
        J = top_scale(t)
        kmod = tuple(v % (1 << idx.j) for v in idx.k)
        total = 0.0
        for j in (idx.j - 1, idx.j):
            if 1 <= j <= J:
                total += beta(idx.eps, idx.j, kmod, j)
        return t**-params.a * total

    def active(t: float):
        if t >= 1:
            return range(0)
        return range(1, min(top_scale(t) + 1, max_scale) + 1)

    return TimeCoefficientField(
        n=2, coeff=value, active_scales=active, channels=channels, dyadic_breakpoints=True
    )


# -- orchestration ------------------------------------------------------------------


@dataclass
class VerifyConfig:
    j0_max: int = 10
    m_max: int = 40
    m_range: tuple[int, int] = (4, 16)
    sup_m_range: tuple[int, int] = (1, 12)
    points_per_side: int = 256
    box_side: float = 1.0
    div_grids: tuple[int, ...] = (64, 128, 256)
    u2_roots: tuple[int, ...] = (0, 1, 2, 3)
    threads: int | None = None


@dataclass
class NormReport:
    params: dict
    bbmo: list[dict] = field(default_factory=list)
    blim: list[dict] = field(default_factory=list)
    blowup: dict = field(default_factory=dict)
    ninfty: list[dict] = field(default_factory=list)
    divergence_residual: float = math.nan
    u2_bbmo: list[dict] = field(default_factory=list)
    claims: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.claims) and all(v == "pass" for v in self.claims.values())

    def as_dict(self) -> dict:
        return {
            "params": self.params,
            "bbmo": self.bbmo,
            "blim": self.blim,
            "blowup": self.blowup,
            "ninfty": self.ninfty,
            "divergence_residual": self.divergence_residual,
            "u2_bbmo": self.u2_bbmo,
            "claims": self.claims,
            "failures": self.failures,
        }


def _check_bbmo(params: CounterexampleParams, config: VerifyConfig):
    rows, failures = [], []
    for j0 in range(config.j0_max + 1):
        floor = max(config.m_max, max(j0, 1) + 5)
        res = bbmo_closed_form(params, j0, m_max=floor)
        if res.tail_bound > 1e-9 * res.value:
            res = bbmo_closed_form(params, j0, m_max=None, rtol=1e-9)
            res = bbmo_closed_form(params, j0, m_max=max(res.m_max, floor))
        rows.append({"j0": j0, "value": res.value, "tail": res.tail_bound})
        if not (math.isfinite(res.value) and res.tail_bound <= 1e-9 * res.value):
            failures.append(f"B.BMO: S({j0}) = {res.value!r} with tail {res.tail_bound!r}")
        upper = bbmo_upper_bound(params, j0)
        if res.value > upper:
            failures.append(f"B.BMO: S({j0}) = {res.value!r} exceeds C int t^(b-n/2-2a) = {upper!r}")
    s0 = rows[0]["value"]
    for row in rows[1:]:
        if row["value"] > s0 * (1 + 1e-12):
            failures.append(f"B.BMO: S({row['j0']}) = {row['value']!r} exceeds S(0) = {s0!r}")
    return rows, failures


def _check_blim(params: CounterexampleParams, config: VerifyConfig):
    lo, hi = config.m_range
    ms = range(lo, hi + 1)
    rows = [{"m": m, "t": 4.0**-m, "c": blim_closed_form(params, 4.0**-m, 0)} for m in ms]
    failures = []
    try:
        cert = blowup_certificate(params, ms)
        blowup = {"slope": cert.slope, "expected": 4 * params.a, "limit_constant": cert.limit_constant,
                  "limit_expected": blim_limit_constant(params)}
    except CertificateRefused as exc:
        ys = np.log2([r["c"] for r in rows])
        slope = float(np.polyfit(list(ms), ys, 1)[0]) if all(np.isfinite(ys)) else math.nan
        blowup = {"slope": slope, "expected": 4 * params.a}
        failures.append(f"B.lim-fails: {exc}")
    return rows, blowup, failures


def _check_ninfty(params: CounterexampleParams, profile: MeyerProfile, config: VerifyConfig):
    lo, hi = config.sup_m_range
    grid = GridSpec(params.n, config.box_side, config.points_per_side)
    rows, failures = [], []
    if params.sup_norm_exponent < 0:
        failures.append(f"N-infty: bound grows like t^{params.sup_norm_exponent:g} as t -> 0")
    for m in range(lo, hi + 1):
        t = 4.0**-m
        bound = sup_norm_bound(params, profile, t)
        grid_value = None
        try:
            comps = [synthesize_u1(params, profile, t, grid)]
        except ValueError:
            comps = None
        if comps is not None:
            grid_value = dyadic.n_infty([np.stack(comps)], [t])
            if grid_value > bound:
                failures.append(f"N-infty: grid value {grid_value!r} exceeds the bound {bound!r} at t = 4^-{m}")
        if not math.isfinite(bound):
            failures.append(f"N-infty: bound is not finite at t = 4^-{m}")
        rows.append({"t": t, "bound": bound, "grid_value": grid_value})
    return rows, failures


def _check_divergence(params: CounterexampleParams, profile: MeyerProfile, config: VerifyConfig):
    worst = 0.0
    failures = []
    for N in config.div_grids:
        grid = GridSpec(params.n, config.box_side, N)
        for m in (1, 2, 3):
            t = 4.0**-m
            try:
                comps = synthesize_field(params, profile, t, grid)
            except ValueError:
                continue
            worst = max(worst, divergence_residual(comps, grid))
    if not worst <= 1e-12:
        failures.append(f"div-free: relative residual {worst!r} exceeds 1e-12")
    return worst, failures


def _check_u2(params: CounterexampleParams, profile: MeyerProfile, config: VerifyConfig):
    if params.n != 2:
        return [], []
    fld = u2_desk_field(params, profile)
    rows, failures = [], []
    for j0 in config.u2_roots:
        try:
            res = dyadic.carleson_time_integral(fld, j0, (0, 0))
            rows.append({"j0": j0, "value": res.value})
            if not math.isfinite(res.value):
                failures.append(f"u2 B.BMO spot check: value {res.value!r} at j0 = {j0}")
        except CarlesonDivergence as exc:
            rows.append({"j0": j0, "value": None})
            failures.append(f"u2 B.BMO spot check at j0 = {j0}: {exc}")
    return rows, failures


def verify_theorem(params: CounterexampleParams, profile: MeyerProfile,
                   config: VerifyConfig | None = None) -> NormReport:
    """Run every checkable step of the construction and collect the results.

    ``params`` must already be validated.  Independent checks run on a thread
    pool capped by ``CARLESON_NS_THREADS``; results do not depend on the
    thread count.
    """
    config = config or VerifyConfig()
    threads = config.threads or min(kernels.worker_count(), 5)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        f_bbmo = pool.submit(_check_bbmo, params, config)
        f_blim = pool.submit(_check_blim, params, config)
        f_ninf = pool.submit(_check_ninfty, params, profile, config)
        f_div = pool.submit(_check_divergence, params, profile, config)
        f_u2 = pool.submit(_check_u2, params, profile, config)
        bbmo, bbmo_fail = f_bbmo.result()
        blim, blowup, blim_fail = f_blim.result()
        ninfty, ninf_fail = f_ninf.result()
        residual, div_fail = f_div.result()
        u2_rows, u2_fail = f_u2.result()
    report = NormReport(params=params.as_dict(), bbmo=bbmo, blim=blim, blowup=blowup, ninfty=ninfty,
                        divergence_residual=residual, u2_bbmo=u2_rows)
    report.claims = {
        "B.BMO": "fail" if (bbmo_fail or u2_fail) else "pass",
        "B.lim-fails": "fail" if blim_fail else "pass",
        "N-infty": "fail" if ninf_fail else "pass",
        "div-free": "fail" if div_fail else "pass",
    }
    report.failures = bbmo_fail + blim_fail + ninf_fail + div_fail + u2_fail
    return report
