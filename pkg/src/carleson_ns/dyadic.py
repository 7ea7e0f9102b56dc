"""Dyadic cubes, wavelet coefficient fields and the norm functionals built on them.

Quantities computed here, for a root cube ``Q0 = Q_{j0,k0}``:

* ``tl_norm``: the wavelet form of the endpoint Triebel-Lizorkin norm,
  ``sup_Q { |Q|^-1 sum_{Q_{j,k} in Q} 2^{jq(gamma + n/2 - n/q)} |a|^q }^(1/q)``
  over an explicit list of candidate cubes.
* ``carleson_time_quantity``:
  ``2^{n j0} int_0^{4^-j0} sum_{Q_{j,k} in Q0} |a(t)|^2 dt``.
* ``fixed_time_bmo_quantity``: ``2^{n j0} sum_{Q_{j,k} in Q0} 2^{-2j} |a(t)|^2``.
* ``n_infty``: ``max_t t^(1/2) max_x |u(t, x)|`` over sampled times.

Coefficients of every wavelet type ``eps`` in a cube are summed; with several
vector components the maximum over components is reported.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .meyer import WaveletIndex


class CarlesonDivergence(ArithmeticError):
    """The time integral of a Carleson quantity does not converge."""


class CoefficientFileError(ValueError):
    """A coefficient table file does not match the expected schema."""


@dataclass(frozen=True, order=True)
class DyadicCube:
    """``Q_{j,k} = 2^-j k + 2^-j [0,1]^n``."""

    j: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def side(self) -> float:
        return 2.0**-self.j

    @property
    def volume(self) -> float:
        return 2.0 ** (-self.n * self.j)

    def contains(self, other: "DyadicCube") -> bool:
        """True when ``other`` is a subcube of ``self`` (cubes contain themselves)."""
        if other.j < self.j:
            return False
        s = other.j - self.j
        return all((ki >> s) == k0 for ki, k0 in zip(other.k, self.k))

    def ancestor(self, j0: int) -> "DyadicCube":
        if j0 > self.j:
            raise ValueError(f"level {j0} is finer than the cube's level {self.j}")
        s = self.j - j0
        return DyadicCube(j0, tuple(ki >> s for ki in self.k))

    def subcubes(self, j: int) -> Iterator["DyadicCube"]:
        """All ``2^{n(j - j0)}`` subcubes at level ``j``."""
        if j < self.j:
            return
        s = j - self.j
        ranges = [range(k0 << s, (k0 + 1) << s) for k0 in self.k]
        for k in itertools.product(*ranges):
            yield DyadicCube(j, k)


def count_subcubes_bruteforce(root: DyadicCube, j: int, margin: int = 2) -> int:
    """Count level-``j`` cubes inside ``root`` by testing every cube of a window around it."""
    s = j - root.j
    if s < 0:
        return 0
    ranges = [range((k0 - margin) << s, (k0 + 1 + margin) << s) for k0 in root.k]
    count = 0
    for k in itertools.product(*ranges):
        lo_inside = all(2.0**-j * ki >= 2.0**-root.j * k0 for ki, k0 in zip(k, root.k))
        hi_inside = all(2.0**-j * (ki + 1) <= 2.0**-root.j * (k0 + 1) for ki, k0 in zip(k, root.k))
        if lo_inside and hi_inside:
            count += 1
    return count


@dataclass(frozen=True)
class SpaceParams:
    gamma: float
    q: float

    def __post_init__(self):
        if not (self.q >= 1):
            raise ValueError(f"q must satisfy 1 <= q <= inf, got {self.q}")


@dataclass(frozen=True)
class CoefficientField:
    """Finite table of wavelet coefficients ``a^eps_{j,k}``."""

    n: int
    entries: Mapping[WaveletIndex, float] = field(default_factory=dict)
    provenance: str = "explicit-table"

    def __post_init__(self):
        for idx in self.entries:
            if idx.n != self.n:
                raise ValueError(f"index {idx} does not have dimension {self.n}")
        if self.provenance not in ("explicit-table", "analytic-generator"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def scaled(self, factor: float) -> "CoefficientField":
        return CoefficientField(self.n, {i: factor * v for i, v in self.entries.items()}, self.provenance)

    def arrays(self):
        """``(j, k, |value|)`` as arrays, in insertion order."""
        items = list(self.entries.items())
        j = np.array([i.j for i, _ in items], dtype=np.int64)
        k = np.array([i.k for i, _ in items], dtype=np.int64).reshape(len(items), self.n)
        a = np.abs(np.array([v for _, v in items], dtype=float))
        return j, k, a

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [
                {"eps": list(i.eps), "j": i.j, "k": list(i.k), "value": float(v)}
                for i, v in self.entries.items()
            ],
        }

    @classmethod
    def from_json(cls, data) -> "CoefficientField":
        if not isinstance(data, dict):
            raise CoefficientFileError("coefficient table must be a JSON object")
        if "n" not in data:
            raise CoefficientFileError("coefficient table is missing the 'n' key")
        if "entries" not in data or not isinstance(data["entries"], list):
            raise CoefficientFileError("coefficient table needs an 'entries' list")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise CoefficientFileError(f"'n' must be a positive integer, got {n!r}")
        entries: dict[WaveletIndex, float] = {}
        for pos, e in enumerate(data["entries"]):
            try:
                idx = WaveletIndex(tuple(e["eps"]), e["j"], tuple(e["k"]))
                value = float(e["value"])
            except (KeyError, TypeError, ValueError) as exc:
                raise CoefficientFileError(f"entry {pos} is malformed: {exc}") from None
            if idx.n != n:
                raise CoefficientFileError(f"entry {pos} has dimension {idx.n}, expected {n}")
            entries[idx] = entries.get(idx, 0.0) + value
        return cls(n, entries)

    @classmethod
    def load(cls, path) -> "CoefficientField":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise CoefficientFileError(f"not valid JSON: {exc}") from None
        return cls.from_json(data)


def _root_arrays(roots: Sequence[DyadicCube], n: int):
    rj = np.array([r.j for r in roots], dtype=np.int64)
    rk = np.array([r.k for r in roots], dtype=np.int64).reshape(len(roots), n)
    return rj, rk


def tl_inner(field: CoefficientField, params: SpaceParams, roots: Sequence[DyadicCube]) -> np.ndarray:
    """Per-root value of the braced expression, before the outer ``1/q`` power.

    For ``q = inf`` this is the largest ``2^{j(gamma + n/2)} |a|`` in the cube.
    """
    if not roots:
        raise ValueError("tl_norm needs at least one root cube")
    n = field.n
    if any(r.n != n for r in roots):
        raise ValueError("root cubes must have the field's dimension")
    rj, rk = _root_arrays(roots, n)
    j, k, a = field.arrays()
    if math.isinf(params.q):
        w = 2.0 ** (j * (params.gamma + n / 2)) * a
        return kernels.subcube_reduce(j, k, w, rj, rk, use_max=True)
    q = params.q
    w = 2.0 ** (j * q * (params.gamma + n / 2 - n / q)) * a**q
    return 2.0 ** (n * rj) * kernels.subcube_reduce(j, k, w, rj, rk)


def tl_norm_breakdown(field: CoefficientField, params: SpaceParams, roots: Sequence[DyadicCube]) -> np.ndarray:
    inner = tl_inner(field, params, roots)
    if math.isinf(params.q):
        return inner
    return inner ** (1.0 / params.q)


def tl_norm(field: CoefficientField, params: SpaceParams, roots: Sequence[DyadicCube]) -> float:
    """Wavelet-coefficient norm of the endpoint space, supremum over ``roots``."""
    return float(np.max(tl_norm_breakdown(field, params, roots)))


def hull_roots(field: CoefficientField) -> list[DyadicCube]:
    """Candidate cubes on which the supremum over all dyadic cubes is attained.

    A cube that maximizes the average can be shrunk to the smallest cube with
    the same content, which is an ancestor of an entry.  Below the level where
    every entry has reached its orthant cube nothing merges any more and the
    averages only shrink, so the ancestors above that level suffice.
    """
    if not field.entries:
        return []
    cubes = {DyadicCube(i.j, i.k) for i in field.entries}
    j_min = min(c.j for c in cubes)
    depth = max(max(abs(v) for v in c.k).bit_length() for c in cubes) + 1
    roots = set()
    for c in cubes:
        for level in range(j_min - depth, c.j + 1):
            roots.add(c.ancestor(level))
    return sorted(roots)


@dataclass(frozen=True)
class TimeCoefficientField:
    """Time-dependent coefficients ``a^eps_{j,k}(t)`` of one vector component.

    ``active_scales(t)`` lists the scales that may be nonzero at ``t``.
    ``k_invariant`` declares that coefficients do not depend on ``k``, which
    turns the sum over subcubes into a count.  ``dyadic_breakpoints`` declares
    that the active scales only change at ``t = 4^-m``, so the integrand is
    smooth on every interval ``(4^-(m+1), 4^-m]``.  ``carleson_tail(j0, m)``,
    when given, bounds ``2^{n j0} int_0^{4^-m} sum |a|^2 dt`` over the cube.
    ``table(t)``, when given, returns all nonzero coefficients at ``t``.
    """

    n: int
    coeff: Callable[[float, WaveletIndex], float]
    active_scales: Callable[[float], Iterable[int]]
    channels: tuple[tuple[int, ...], ...]
    k_invariant: bool = False
    dyadic_breakpoints: bool = False
    carleson_tail: Callable[[int, int], float] | None = None
    table: Callable[[float], CoefficientField] | None = None

    def scaled(self, factor: float) -> "TimeCoefficientField":
        table = None
        if self.table is not None:
            table = lambda t, inner=self.table: inner(t).scaled(factor)
        tail = None
        if self.carleson_tail is not None:
            tail = lambda j0, m, inner=self.carleson_tail: factor**2 * inner(j0, m)
        return TimeCoefficientField(
            self.n,
            lambda t, idx, inner=self.coeff: factor * inner(t, idx),
            self.active_scales,
            self.channels,
            self.k_invariant,
            self.dyadic_breakpoints,
            tail,
            table,
        )


def time_independent(field: CoefficientField) -> TimeCoefficientField:
    """View a fixed table as a coefficient field constant in time."""
    scales = sorted({i.j for i in field.entries})
    channels = tuple(sorted({i.eps for i in field.entries}))
    return TimeCoefficientField(
        n=field.n,
        coeff=lambda t, idx: field.entries.get(idx, 0.0),
        active_scales=lambda t: scales,
        channels=channels,
        table=lambda t: field,
    )


def _as_components(fields) -> list[TimeCoefficientField]:
    if isinstance(fields, TimeCoefficientField):
        return [fields]
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one component")
    return fields


def _bmo_weight(j):
    return np.exp2(-2.0 * np.asarray(j, dtype=float))


def _unit_weight(j):
    return np.ones_like(np.asarray(j, dtype=float))


def _subcube_sum(fld: TimeCoefficientField, t: float, root: DyadicCube, scale_weight) -> float:
    """``sum_{eps, Q_{j,k} in root} scale_weight(j) |a(t)|^2`` for one component."""
    if fld.table is not None:
        tab = fld.table(t)
        if not tab.entries:
            return 0.0
        j, k, a = tab.arrays()
        w = scale_weight(j) * a**2
        rj, rk = _root_arrays([root], fld.n)
        return float(kernels.subcube_reduce(j, k, w, rj, rk)[0])
    total = 0.0
    for j in fld.active_scales(t):
        if j < root.j:
            continue
        s = j - root.j
        if fld.k_invariant:
            rep = tuple(k0 << s for k0 in root.k)
            sq = sum(fld.coeff(t, WaveletIndex(eps, j, rep)) ** 2 for eps in fld.channels)
            total += float(scale_weight(j)) * 2.0 ** (fld.n * s) * sq
        else:
            sq = 0.0
            for cube in root.subcubes(j):
                for eps in fld.channels:
                    sq += fld.coeff(t, WaveletIndex(eps, j, cube.k)) ** 2
            total += float(scale_weight(j)) * sq
    return total


def fixed_time_bmo_quantity(fields, t: float, j0: int, k0: Sequence[int]) -> float:
    """``2^{n j0} sum_{Q_{j,k} in Q_{j0,k0}} 2^{-2j} |a(t)|^2``, max over components."""
    if not (0 < t <= 1):
        raise ValueError(f"time must lie in (0, 1], got {t}")
    comps = _as_components(fields)
    root = DyadicCube(j0, tuple(k0))
    return max(2.0 ** (c.n * j0) * _subcube_sum(c, t, root, _bmo_weight) for c in comps)


@dataclass(frozen=True)
class QuadratureSpec:
    """Time-integration rule for the Carleson quantity.

    ``mode="auto"`` uses piecewise Gauss-Legendre on the dyadic intervals
    ``(4^-(m+1), 4^-m]`` when the field declares those breakpoints, and
    adaptive composite midpoint (relative tolerance ``rtol``) on the same
    intervals otherwise.  Intervals are added until the tail is below
    ``tail_rtol`` of the accumulated value.
    """

    mode: str = "auto"
    rtol: float = 1e-6
    tail_rtol: float = 1e-9
    gauss_order: int = 24
    max_pieces: int = 4000
    stall_pieces: int = 40

    def __post_init__(self):
        if self.mode not in ("auto", "dyadic", "adaptive"):
            raise ValueError(f"unknown quadrature mode {self.mode!r}")


def _gauss_piece(f, lo: float, hi: float, order: int) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    return half * sum(wi * f(mid + half * xi) for xi, wi in zip(x, w))


def _midpoint_piece(f, lo: float, hi: float, rtol: float) -> float:
    m = 16
    prev = None
    while True:
        h = (hi - lo) / m
        val = h * sum(f(lo + (i + 0.5) * h) for i in range(m))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        if m > 1 << 16:
            return val
        prev = val
        m *= 2


@dataclass(frozen=True)
class CarlesonResult:
    value: float
    tail: float
    pieces: int


def carleson_time_integral(fld: TimeCoefficientField, j0: int, k0: Sequence[int],
                           quadrature: QuadratureSpec = QuadratureSpec()) -> CarlesonResult:
    """Carleson quantity of one component with its tail estimate."""
    if j0 < 0:
        raise ValueError(f"j0 must be >= 0, got {j0}")
    root = DyadicCube(j0, tuple(k0))
    scale = 2.0 ** (fld.n * j0)

    def integrand(t: float) -> float:
        return scale * _subcube_sum(fld, t, root, _unit_weight)

    mode = quadrature.mode
    if mode == "auto":
        mode = "dyadic" if fld.dyadic_breakpoints else "adaptive"
    if mode == "dyadic" and not fld.dyadic_breakpoints:
        raise ValueError("dyadic quadrature needs a field with dyadic breakpoints")

    total = 0.0
    prev_piece = None
    growing = 0
    for count, m in enumerate(itertools.count(j0), start=1):
        lo, hi = 4.0 ** -(m + 1), 4.0**-m
        if mode == "dyadic":
            piece = _gauss_piece(integrand, lo, hi, quadrature.gauss_order)
        else:
            piece = _midpoint_piece(integrand, lo, hi, quadrature.rtol)
        total += piece
        if fld.carleson_tail is not None:
            tail = fld.carleson_tail(j0, m + 1)
        elif prev_piece is not None and prev_piece > 0 and piece < prev_piece:
            ratio = piece / prev_piece
            tail = piece * ratio / (1.0 - ratio)
        else:
            tail = math.inf if piece > 0 else 0.0
        if prev_piece is not None and piece > 0 and piece >= prev_piece:
            growing += 1
        else:
            growing = 0
        if growing >= quadrature.stall_pieces or not math.isfinite(total):
            raise CarlesonDivergence(
                f"dyadic time pieces stop decaying near t = 4^-{m} (piece {piece:.3e}); "
                "the Carleson integral diverges"
            )
        if total == 0.0 and piece == 0.0 and count >= quadrature.stall_pieces:
            return CarlesonResult(0.0, 0.0, count)
        if total > 0 and tail <= quadrature.tail_rtol * total:
            return CarlesonResult(total, tail, count)
        if count >= quadrature.max_pieces:
            raise CarlesonDivergence(
                f"tail {tail:.3e} still above {quadrature.tail_rtol:g} of {total:.3e} after {count} pieces"
            )
        prev_piece = piece
    raise AssertionError("unreachable")


def carleson_time_quantity(fields, j0: int, k0: Sequence[int],
                           quadrature: QuadratureSpec = QuadratureSpec()) -> float:
    """``2^{n j0} int_0^{4^-j0} sum_{Q_{j,k} in Q_{j0,k0}} |a(t)|^2 dt``, max over components.

    Raises :class:`CarlesonDivergence` when the time integral does not converge.
    """
    return max(carleson_time_integral(c, j0, k0, quadrature).value for c in _as_components(fields))


def n_infty(samples, t_grid: Sequence[float], T: float = 1.0) -> float:
    """``max_t t^(1/2) max_x |u(t, x)|`` over ``t_grid``.

    ``samples`` is a sequence of arrays aligned with ``t_grid`` (each holding
    every component at that time) or a callable ``t -> array``; grid errors
    raised by the callable propagate.  The result is a lower bound for the
    supremum over ``(0, T]``.
    """
    t_grid = list(t_grid)
    if any(not (0 < t <= T) for t in t_grid):
        raise ValueError(f"times must lie in (0, {T}]")
    best = 0.0
    for pos, t in enumerate(t_grid):
        u = samples(t) if callable(samples) else samples[pos]
        u = np.asarray(u)
        if u.size:
            best = max(best, math.sqrt(t) * float(np.max(np.abs(u))))
    return best
