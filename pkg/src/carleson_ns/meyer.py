"""Tensor-product Meyer wavelets built in the frequency domain.

The one-dimensional profiles are

    Psi0(xi)   low-pass bump, 1 on |xi| <= 2pi/3, 0 on |xi| >= 4pi/3
    Omega(xi)  sqrt(Psi0(xi/2)**2 - Psi0(xi)**2), supported in 2pi/3 <= |xi| <= 8pi/3
    Psi1(xi)   Omega(xi) * exp(-i xi / 2)

and the n-dimensional wavelet of type ``eps`` has Fourier transform
``prod_i Psi^{eps_i}(xi_i)``.  Because every profile is compactly supported,
sampling on a periodic grid is exact up to roundoff once the grid resolves the
support, and the integer periodization of a wavelet is a finite trigonometric
polynomial.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
BAND_LO = TWO_PI / 3.0
BAND_MID = 2.0 * TWO_PI / 3.0
BAND_HI = 4.0 * TWO_PI / 3.0


class NyquistError(ValueError):
    """The grid does not resolve the spectral support of the requested scale."""

    def __init__(self, message: str, required_points: int):
        super().__init__(message)
        self.required_points = required_points


@lru_cache(maxsize=None)
def _smoothstep_coefficients(order: int) -> tuple[float, ...]:
    # nu(x) = x**(order+1) * sum_k C(order+k, k) (1-x)**k; every term is
    # nonnegative on [0, 1], which avoids the cancellation of the monomial basis
    return tuple(float(math.comb(order + k, k)) for k in range(order + 1))


@dataclass(frozen=True)
class MeyerProfile:
    """Spectral profiles of the Meyer wavelet.

    ``transition_order`` selects the polynomial auxiliary function ``nu`` on
    [0, 1]: the unique polynomial of degree ``2*order + 1`` with
    ``nu(0) = 0``, ``nu(1) = 1`` and vanishing derivatives of orders
    ``1..order`` at both endpoints.  Order 3 gives the classical
    ``x**4 (35 - 84x + 70x**2 - 20x**3)``.  Every such ``nu`` satisfies
    ``nu(x) + nu(1 - x) = 1``, which is what makes the partition identities hold.
    """

    transition_order: int = 3
    _coeffs: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.transition_order) != self.transition_order or self.transition_order < 1:
            raise ValueError(f"transition_order must be an integer >= 1, got {self.transition_order!r}")
        object.__setattr__(self, "_coeffs", _smoothstep_coefficients(int(self.transition_order)))

    def transition(self, x):
        """Auxiliary function nu, clamped to 0 below 0 and to 1 above 1."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        y = 1.0 - x
        poly = np.zeros_like(x)
        for c in reversed(self._coeffs):
            poly = poly * y + c
        return x ** (self.transition_order + 1) * poly

    def psi0(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        # cos(pi/2 nu(x)) == sin(pi/2 nu(1 - x)); the sine form stays accurate
        # where the value is tiny near the upper edge
        angle = 0.5 * math.pi * self.transition(2.0 - 3.0 * a / TWO_PI)
        return np.where(a <= BAND_LO, 1.0, np.where(a >= BAND_MID, 0.0, np.sin(angle)))

    def omega(self, xi):
        # closed form of sqrt(psi0(xi/2)**2 - psi0(xi)**2) on each band; keeps
        # relative accuracy where the difference of squares would cancel
        a = np.abs(np.asarray(xi, dtype=float))
        rising = np.sin(0.5 * math.pi * self.transition(3.0 * a / TWO_PI - 1.0))
        falling = self.psi0(0.5 * a)
        out = np.where(a <= BAND_MID, rising, falling)
        return np.where((a <= BAND_LO) | (a >= BAND_HI), 0.0, out)

    def omega_from_definition(self, xi):
        """Omega as the clamped square root of the difference of squares."""
        xi = np.asarray(xi, dtype=float)
        diff = self.psi0(0.5 * xi) ** 2 - self.psi0(xi) ** 2
        return np.sqrt(np.maximum(diff, 0.0))

    def psi1(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.omega(xi) * np.exp(-0.5j * xi)

    def profile(self, eps_i: int, xi):
        """``Psi^{eps_i}`` evaluated at ``xi`` (complex for ``eps_i = 1``)."""
        if eps_i == 0:
            return self.psi0(xi).astype(complex)
        if eps_i == 1:
            return self.psi1(xi)
        raise ValueError(f"wavelet type entries must be 0 or 1, got {eps_i!r}")


def build_profile(transition_order: int = 3) -> MeyerProfile:
    return MeyerProfile(transition_order)


@dataclass(frozen=True)
class WaveletIndex:
    """Index ``(eps, j, k)`` of ``Phi^eps_{j,k}(x) = 2**(nj/2) Phi^eps(2**j x - k)``."""

    eps: tuple[int, ...]
    j: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(int(e) for e in self.eps))
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "j", int(self.j))
        if len(self.eps) != len(self.k):
            raise ValueError(f"eps and k must have the same length, got {len(self.eps)} and {len(self.k)}")
        if any(e not in (0, 1) for e in self.eps):
            raise ValueError(f"eps entries must be 0 or 1, got {self.eps}")

    @property
    def n(self) -> int:
        return len(self.eps)

    @property
    def is_wavelet(self) -> bool:
        """True when the index lies in the wavelet set (``eps != 0``)."""
        return any(self.eps)


@dataclass(frozen=True)
class GridSpec:
    """Periodic box ``[0, box_side)**n`` sampled at ``points_per_side`` points per axis."""

    n: int
    box_side: float = 1.0
    points_per_side: int = 256

    def __post_init__(self):
        N = self.points_per_side
        if self.n < 1:
            raise ValueError(f"grid dimension must be >= 1, got {self.n}")
        if N < 8 or N & (N - 1):
            raise ValueError(f"points_per_side must be a power of two >= 8, got {N}")
        if not self.box_side > 0:
            raise ValueError(f"box_side must be positive, got {self.box_side}")

    @property
    def spacing(self) -> float:
        return self.box_side / self.points_per_side

    @property
    def max_frequency(self) -> float:
        """Largest angular frequency resolved by the grid (the Nyquist frequency)."""
        return math.pi * self.points_per_side / self.box_side

    def axis(self) -> np.ndarray:
        return self.spacing * np.arange(self.points_per_side)

    def coordinates(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.n), indexing="ij")

    def frequencies(self) -> np.ndarray:
        """Angular frequencies of the dual lattice in FFT order (one axis)."""
        N = self.points_per_side
        return TWO_PI / self.box_side * np.fft.fftfreq(N, d=1.0 / N)

    def require_scale(self, j: int) -> None:
        """Raise :class:`NyquistError` if scale ``j`` is not resolved."""
        top = 2.0**j * BAND_HI
        if top > self.max_frequency * (1.0 + 1e-12):
            need = minimal_points(j, self.box_side)
            raise NyquistError(
                f"scale j={j} has spectral support up to {top:.6g} but the grid resolves only "
                f"{self.max_frequency:.6g}; points_per_side must be at least {need}",
                need,
            )


def minimal_points(j: int, box_side: float) -> int:
    """Smallest power-of-two ``points_per_side`` that resolves scale ``j``."""
    need = 2.0**j * BAND_HI * box_side / math.pi
    N = 8
    while N < need * (1.0 - 1e-12):
        N *= 2
    return N


def phi_hat(profile: MeyerProfile, eps: Sequence[int], xi) -> complex:
    """Fourier transform of ``Phi^eps`` at a single frequency vector."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if len(eps) != xi.shape[-1]:
        raise ValueError(f"eps has length {len(eps)} but xi has length {xi.shape[-1]}")
    value = 1.0 + 0.0j
    for e, x in zip(eps, xi):
        value *= complex(profile.profile(e, x))
    return value


def _axis_factor(profile: MeyerProfile, eps_i: int, j: int, k_i: int, xi: np.ndarray) -> np.ndarray:
    # one-dimensional factor of the transform of Phi_{j,k}
    s = 2.0**-j
    return math.sqrt(s) * np.exp(-1j * s * k_i * xi) * profile.profile(eps_i, s * xi)


def wavelet_hat(profile: MeyerProfile, idx: WaveletIndex, grid: GridSpec) -> np.ndarray:
    """Transform of ``Phi^eps_{j,k}`` on the grid's dual lattice, FFT ordering."""
    if grid.n != idx.n:
        raise ValueError(f"grid dimension {grid.n} does not match index dimension {idx.n}")
    grid.require_scale(idx.j)
    xi = grid.frequencies()
    out = np.ones((), dtype=complex)
    for e, k_i in zip(idx.eps, idx.k):
        out = np.multiply.outer(out, _axis_factor(profile, e, idx.j, k_i, xi))
    return out


def sample_wavelet(profile: MeyerProfile, idx: WaveletIndex, grid: GridSpec) -> np.ndarray:
    """Samples of the box-periodization of ``Phi^eps_{j,k}`` on ``grid``.

    The Fourier series coefficient at lattice frequency ``xi_p`` is
    ``F(xi_p) / L**n``; an inverse FFT then gives the samples exactly, provided
    the support fits below the Nyquist frequency (checked).
    """
    coeffs = wavelet_hat(profile, idx, grid) / grid.box_side**grid.n
    values = np.fft.ifftn(coeffs) * grid.points_per_side**grid.n
    return values.real


def grid_inner_product(u: np.ndarray, v: np.ndarray, grid: GridSpec) -> float:
    return float(np.sum(u * v) * grid.spacing**grid.n)


def _gauss_legendre_pieces(breaks: np.ndarray, per_piece: int, order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    xs, ws = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        edges = np.linspace(lo, hi, per_piece + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        xs.append((mid[:, None] + half[:, None] * nodes).ravel())
        ws.append((half[:, None] * weights).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _band_points(eps_i: int) -> list[float]:
    if eps_i == 0:
        return [-BAND_MID, -BAND_LO, BAND_LO, BAND_MID]
    return [-BAND_HI, -BAND_MID, -BAND_LO, BAND_LO, BAND_MID, BAND_HI]


def _inner_product_1d(profile, e1, j1, k1, e2, j2, k2, order: int = 24) -> complex:
    s1, s2 = 2.0**-j1, 2.0**-j2
    pts = sorted({p / s1 for p in _band_points(e1)} | {p / s2 for p in _band_points(e2)})
    lo = max(min(_band_points(e1)) / s1, min(_band_points(e2)) / s2)
    hi = min(max(_band_points(e1)) / s1, max(_band_points(e2)) / s2)
    if hi <= lo:
        return 0.0j
    breaks = np.array([lo] + [p for p in pts if lo < p < hi] + [hi])
    shift = abs(k1 * s1 - k2 * s2)
    per_piece = 4 + int(shift * (hi - lo) / 4.0)
    xi, w = _gauss_legendre_pieces(breaks, per_piece, order)
    f = _axis_factor(profile, e1, j1, k1, xi) * np.conj(_axis_factor(profile, e2, j2, k2, xi))
    return complex(np.sum(w * f)) / TWO_PI


def inner_product(profile: MeyerProfile, first: WaveletIndex, second: WaveletIndex) -> float:
    """``<Phi_first, Phi_second>`` on R^n by Plancherel and frequency quadrature.

    The tensor structure factorizes the integral into one-dimensional ones,
    each evaluated by composite Gauss-Legendre quadrature split at the
    points where the profiles change formula.
    """
    if first.n != second.n:
        raise ValueError("indices have different dimensions")
    value = 1.0 + 0.0j
    for e1, k1, e2, k2 in zip(first.eps, first.k, second.eps, second.k):
        value *= _inner_product_1d(profile, e1, first.j, k1, e2, second.j, k2)
        if value == 0:
            break
    return value.real


def wavelet_values_1d(profile: MeyerProfile, eps_i: int, x, order: int = 24, per_piece: int = 48) -> np.ndarray:
    """Pointwise values of the one-dimensional ``Psi^{eps_i}`` wavelet on R.

    Evaluates the inverse Fourier integral by quadrature; independent of any
    grid or FFT.  ``Phi^eps(x) = prod_i wavelet_values_1d(eps_i, x_i)``.
    """
    x = np.asarray(x, dtype=float)
    pts = [p for p in _band_points(eps_i) if p >= 0]
    breaks = np.array([0.0] + pts)
    xi, w = _gauss_legendre_pieces(breaks, per_piece, order)
    if eps_i == 0:
        amp, arg = profile.psi0(xi), np.multiply.outer(x, xi)
    else:
        amp, arg = profile.omega(xi), np.multiply.outer(x - 0.5, xi)
    # the profile is even in xi, so the integral over R is twice the cosine integral over xi > 0
    return (np.cos(arg) @ (w * amp)) / math.pi


def periodization_polynomial(profile: MeyerProfile, eps: Sequence[int]) -> list[tuple[tuple[int, ...], complex]]:
    """Fourier coefficients of ``P(y) = sum_k Phi^eps(y - k)``.

    Returns the nonzero ``(m, Phi_hat(2 pi m))`` pairs.  Only ``m_i = 0`` can
    survive where ``eps_i = 0`` and only ``m_i = +-1`` where ``eps_i = 1``.
    """
    eps = tuple(int(e) for e in eps)
    if not any(eps):
        raise ValueError("periodization polynomial is defined for eps != 0")
    choices = [(0,) if e == 0 else (-1, 1) for e in eps]
    terms = []
    for m in itertools.product(*choices):
        c = phi_hat(profile, eps, TWO_PI * np.array(m, dtype=float))
        if c != 0:
            terms.append((m, c))
    return terms


def evaluate_polynomial(terms, y: Sequence[np.ndarray], real: bool = True) -> np.ndarray:
    """Evaluate ``sum_m c_m exp(2 pi i m.y)`` at points given per axis (broadcastable arrays)."""
    total = 0.0j
    for m, c in terms:
        phase = sum(mi * yi for mi, yi in zip(m, y))
        total = total + c * np.exp(1j * TWO_PI * phase)
    return np.real(total) if real else total


def polynomial_sup_norm(terms, n: int, points_per_axis: int = 4096) -> float:
    """``max |P|`` over a lattice of one period.

    For n > 1 the polynomial is a product of per-axis factors when it comes
    from a tensor wavelet, so the lattice is sampled per axis and multiplied.
    """
    y = np.arange(points_per_axis) / points_per_axis
    axes = sorted({len(m) for m, _ in terms})
    if axes != [n]:
        raise ValueError("polynomial dimension mismatch")
    factors = factorize_polynomial(terms, n)
    if factors is not None:
        return float(np.prod([np.max(np.abs(evaluate_polynomial(f, [y], real=False))) for f in factors]))
    mesh = np.meshgrid(*([y] * n), indexing="ij")
    return float(np.max(np.abs(evaluate_polynomial(terms, mesh))))


def factorize_polynomial(terms, n: int):
    """Split a tensor-product polynomial into per-axis factors, or return None."""
    if n == 1:
        return [terms]
    per_axis = [sorted({m[i] for m, _ in terms}) for i in range(n)]
    if len(terms) != math.prod(len(a) for a in per_axis):
        return None
    table = dict(terms)
    ref = next(iter(table))
    c_ref = table[ref]
    factors = []
    for i in range(n):
        f = []
        for mi in per_axis[i]:
            m = list(ref)
            m[i] = mi
            f.append(((mi,), table[tuple(m)]))
        factors.append(f)
    scale = c_ref ** (n - 1)
    for m, c in table.items():
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= dict(factors[i])[(m[i],)]
        if abs(prod - c * scale) > 1e-14 * max(1.0, abs(prod)):
            return None
    # rescale so the product of factors reproduces the coefficients
    factors[0] = [(m, c / scale) for m, c in factors[0]]
    return factors
