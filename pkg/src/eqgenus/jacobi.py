"""Modular-group machinery and Jacobi-form verification.

Implements membership tests for the three congruence subgroups attached to
the theta kinds, the weight/index slash action, sampled checks of the two
defining Jacobi-form transformation laws, and argument-principle zero
counting by adaptive Gauss-Legendre quadrature of F'/F.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .genera import OperatorKind


class BoundaryZero(Exception):
    """A zero sits on (or too near) the integration contour."""


class NonFiniteSample(Exception):
    pass


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")

    def __mul__(self, o: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                             self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def act(self, t: complex, tau: complex) -> tuple[complex, complex]:
        den = self.c * tau + self.d
        return t / den, (self.a * tau + self.b) / den

    def __str__(self):
        return "[[%d,%d],[%d,%d]]" % (self.a, self.b, self.c, self.d)


IDENTITY = ModularMatrix(1, 0, 0, 1)
S = ModularMatrix(0, -1, 1, 0)
T = ModularMatrix(1, 1, 0, 1)


class ModularGroup(Enum):
    GAMMA0_2 = "Gamma0(2)"
    GAMMA_UPPER0_2 = "Gamma^0(2)"
    GAMMA_THETA = "Gamma_theta"
    SL2Z = "SL2(Z)"


def subgroup_member(g: ModularMatrix, group: ModularGroup) -> bool:
    """Congruence conditions mod 2: c even, b even, or congruent to the
    identity or the antidiagonal."""
    if group is ModularGroup.SL2Z:
        return True
    if group is ModularGroup.GAMMA0_2:
        return g.c % 2 == 0
    if group is ModularGroup.GAMMA_UPPER0_2:
        return g.b % 2 == 0
    pattern = (g.a % 2, g.b % 2, g.c % 2, g.d % 2)
    return pattern in ((1, 0, 0, 1), (0, 1, 1, 0))


GROUP_GENERATORS: dict[ModularGroup, tuple[ModularMatrix, ...]] = {
    ModularGroup.SL2Z: (S, T),
    ModularGroup.GAMMA0_2: (T, S * T * T * S * T),
    ModularGroup.GAMMA_UPPER0_2: (T * T, ModularMatrix(1, 0, 1, 1)),
    ModularGroup.GAMMA_THETA: (S, T * T),
}


@dataclass(frozen=True)
class JacobiFormSpec:
    """Index, weight, lattice scale and modular subgroup of a Jacobi form."""

    index: Fraction
    weight: int
    lattice_scale: int = 2  # (2Z)^2 for all forms arising here
    group: ModularGroup = ModularGroup.SL2Z

    def __post_init__(self):
        object.__setattr__(self, "index", Fraction(self.index))


DESIGNATED_GROUP: dict[OperatorKind, ModularGroup] = {
    OperatorKind.DeltaVThetaPrime: ModularGroup.GAMMA0_2,
    OperatorKind.DVThetaQ: ModularGroup.GAMMA_UPPER0_2,
    OperatorKind.DVThetaMinusQ: ModularGroup.GAMMA_THETA,
    OperatorKind.DVStarDifference: ModularGroup.SL2Z,
    OperatorKind.WittenH: ModularGroup.SL2Z,
}


def designated_spec(kind: OperatorKind, anomaly: int, k: int, l: int, p: int) -> JacobiFormSpec:
    """Expected Jacobi-form data of the degree-2p component: index n/2,
    weight k+p (k-l+p for the antisymmetrized family), and the subgroup
    attached to the theta kind."""
    if kind not in DESIGNATED_GROUP:
        raise ValueError("%s has no designated Jacobi-form group" % kind.value)
    weight = k - l + p if kind is OperatorKind.DVStarDifference else k + p
    return JacobiFormSpec(Fraction(anomaly, 2), weight, 2, DESIGNATED_GROUP[kind])


def slash_action(F, g: ModularMatrix, spec: JacobiFormSpec):
    """The weight/index action: (F |_{m,l} g)(t, tau) =
    (c tau + d)^{-l} e^{-2 pi i m c t^2/(c tau + d)} F(g(t, tau))."""
    m = float(spec.index)
    l = spec.weight

    def slashed(t: complex, tau: complex) -> complex:
        den = g.c * tau + g.d
        t1, tau1 = g.act(t, tau)
        return den ** (-l) * cmath.exp(-2j * math.pi * m * g.c * t * t / den) * F(t1, tau1)

    return slashed


def _norm_diff(a: complex, b: complex) -> float:
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


@dataclass(frozen=True)
class JacobiReport:
    spec: JacobiFormSpec
    samples: int
    max_modular_discrepancy: float
    max_lattice_discrepancy: float
    eps: float

    @property
    def max_discrepancy(self) -> float:
        return max(self.max_modular_discrepancy, self.max_lattice_discrepancy)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.eps


def _jacobi_samples(samples, seed=271828):
    # Im tau is kept moderate: the lattice shifts t + 2 tau live where the
    # summands cancel to an exponentially small value, and double precision
    # loses the digits beyond e^{4 pi Im tau} or so.
    if isinstance(samples, int):
        rng = random.Random(seed)
        return [(complex(rng.uniform(0.07, 0.93), rng.uniform(-0.02, 0.02)),
                 complex(rng.uniform(-0.45, 0.45), rng.uniform(0.5, 0.95)))
                for _ in range(samples)]
    return list(samples)


def _run_samples(fn, items, workers: int):
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def check_jacobi(F, spec: JacobiFormSpec, generators=None, lattice_vectors=None,
                 samples=16, eps: float = 1e-8, workers: int = 1) -> JacobiReport:
    """Sampled check of both defining transformation laws.

    Generators must belong to spec.group; lattice vectors default to the
    basis of (lattice_scale Z)^2.
    """
    if generators is None:
        generators = GROUP_GENERATORS[spec.group]
    for g in generators:
        if not subgroup_member(g, spec.group):
            raise ValueError("generator %s is not in %s" % (g, spec.group.value))
    if lattice_vectors is None:
        s = spec.lattice_scale
        lattice_vectors = ((s, 0), (0, s))
    pts = _jacobi_samples(samples)
    m = float(spec.index)

    def modular_diff(item):
        g, t, tau = item
        lhs = slash_action(F, g, spec)(t, tau)
        rhs = F(t, tau)
        if not (cmath.isfinite(lhs) and cmath.isfinite(rhs)):
            raise NonFiniteSample("non-finite value at t=%s tau=%s" % (t, tau))
        return _norm_diff(lhs, rhs)

    def lattice_diff(item):
        (lam, mu), t, tau = item
        lhs = F(t + lam * tau + mu, tau)
        rhs = cmath.exp(-2j * math.pi * m * (lam * lam * tau + 2 * lam * t)) * F(t, tau)
        if not (cmath.isfinite(lhs) and cmath.isfinite(rhs)):
            raise NonFiniteSample("non-finite value at t=%s tau=%s" % (t, tau))
        return _norm_diff(lhs, rhs)

    mods = _run_samples(modular_diff,
                        [(g, t, tau) for g in generators for t, tau in pts], workers)
    lats = _run_samples(lattice_diff,
                        [(v, t, tau) for v in lattice_vectors for t, tau in pts], workers)
    return JacobiReport(spec, len(pts), max(mods, default=0.0),
                        max(lats, default=0.0), eps)


# ---------------------------------------------------------------------------
# argument-principle zero counting


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[tuple[float, float], ...]:
    """Nodes and weights on [-1, 1] by Newton iteration on the Legendre
    recurrence (checked against the weight-sum and moment identities)."""
    out = []
    for i in range(1, n + 1):
        x = math.cos(math.pi * (i - 0.25) / (n + 0.5))
        for _ in range(100):
            p0, p1 = 1.0, 0.0
            for j in range(1, n + 1):
                p0, p1 = ((2 * j - 1) * x * p0 - (j - 1) * p1) / j, p0
            dp = n * (x * p0 - p1) / (x * x - 1.0)
            dx = p0 / dp
            x -= dx
            if abs(dx) < 1e-15:
                break
        p0, p1 = 1.0, 0.0
        for j in range(1, n + 1):
            p0, p1 = ((2 * j - 1) * x * p0 - (j - 1) * p1) / j, p0
        dp = n * (x * p0 - p1) / (x * x - 1.0)
        out.append((x, 2.0 / ((1.0 - x * x) * dp * dp)))
    return tuple(out)


@dataclass(frozen=True)
class ZeroCountResult:
    count: float | None
    identically_zero: bool
    perturbations: int
    imag_residue: float = 0.0

    def __str__(self):
        if self.identically_zero:
            return "IdenticallyZero"
        return "%.4f zeros (imag %.1e, %d perturbations)" % (
            self.count, self.imag_residue, self.perturbations)


def _panel_integral(F, tau, a: complex, b: complex, h: float, nodes) -> complex:
    mid = (a + b) / 2
    half = (b - a) / 2
    total = 0j
    for x, wgt in nodes:
        z = mid + half * x
        fp = (F(z + h, tau) - F(z - h, tau)) / (2 * h)
        fz = F(z, tau)
        if fz == 0:
            raise BoundaryZero("F vanishes on the contour at %s" % z)
        total += wgt * fp / fz
    return total * half


def _edge_integral(F, tau, a: complex, b: complex, h: float, panels: int,
                   zero_floor: float) -> complex:
    nodes = _gauss_legendre(16)
    total = 0j

    def rec(x0, x1, f0, f1, depth):
        nonlocal total
        if abs(f0) < zero_floor or abs(f1) < zero_floor:
            raise BoundaryZero("contour passes too close to a zero")
        dphase = abs(cmath.phase(f1 / f0))
        if dphase > math.pi / 2 and depth < 14:
            xm = (x0 + x1) / 2
            fm = F(xm, tau)
            rec(x0, xm, f0, fm, depth + 1)
            rec(xm, x1, fm, f1, depth + 1)
            return
        if dphase > math.pi / 2:
            raise BoundaryZero("phase jump did not subdivide away")
        total += _panel_integral(F, tau, x0, x1, h, nodes)

    pts = [a + (b - a) * i / panels for i in range(panels + 1)]
    vals = [F(p, tau) for p in pts]
    for i in range(panels):
        rec(pts[i], pts[i + 1], vals[i], vals[i + 1], 0)
    return total


def count_zeros(F, tau: complex, cell: tuple[complex, complex, complex],
                eps: float = 1e-9, panels: int = 32) -> ZeroCountResult:
    """(1/2 pi i) of the contour integral of F'/F around the cell
    (origin, v1, v2); F' by central differences, panels split adaptively
    whenever the phase of F jumps by more than pi/2.

    The zero function is detected on a 16 x 16 grid first; the deciding
    samples are restricted to the low-imaginary band of the cell, where a
    cancelling sum is computable to full precision (the lattice law
    transports vanishing on a band to the whole cell).  A boundary zero
    triggers up to three perturbations of the cell origin.
    """
    origin, v1, v2 = (complex(x) for x in cell)
    scale = 0.0
    band_max = 0.0
    for i in range(16):
        for j in range(16):
            z = origin + (i + 0.5) / 16 * v1 + (j + 0.5) / 16 * v2
            val = F(z, tau)
            if not cmath.isfinite(val):
                raise NonFiniteSample("non-finite sample at %s" % z)
            scale = max(scale, abs(val))
            if abs(z.imag - origin.imag) <= max(0.35, abs(v2) / 8):
                band_max = max(band_max, abs(val))
    if band_max < 1e-10:
        return ZeroCountResult(None, True, 0)
    h = 1e-6 * max(abs(v1), abs(v2))
    zero_floor = 1e-12 * scale
    shift = 0.0137 + 0.0089j
    base = origin
    for attempt in range(4):
        try:
            total = 0j
            corners = [base, base + v1, base + v1 + v2, base + v2, base]
            for a, b in zip(corners, corners[1:]):
                total += _edge_integral(F, tau, a, b, h, panels, zero_floor)
            count = total / (2j * math.pi)
            return ZeroCountResult(count.real, False, attempt, abs(count.imag))
        except BoundaryZero:
            base = base + shift * (attempt + 1)
    raise BoundaryZero("boundary zero persisted after 3 perturbations")


# ---------------------------------------------------------------------------
# index-based classification


class IndexClassification(Enum):
    RigidByZeroIndex = "RigidByZeroIndex"
    VanishesByNegativeIndex = "VanishesByNegativeIndex"
    PositiveIndexJacobiForm = "PositiveIndexJacobiForm"


@dataclass(frozen=True)
class IndexVerdict:
    classification: IndexClassification
    series_is_zero: bool
    contradiction: bool
    rigidity: object | None = None

    def __str__(self):
        s = self.classification.value
        if self.series_is_zero:
            s += " (series identically zero)"
        if self.contradiction:
            s += " [CONTRADICTION: expected vanishing, series is nonzero]"
        return s


def rigidity_verdict_from_index(n: int, result) -> IndexVerdict:
    """Classify by the anomaly: negative index forces vanishing, zero index
    forces rigidity, positive index gives an honest Jacobi form."""
    from .localization import rigidity_check

    zero = not result.series.c
    if n < 0:
        return IndexVerdict(IndexClassification.VanishesByNegativeIndex, zero, not zero)
    if n == 0:
        rv = rigidity_check(result)
        return IndexVerdict(IndexClassification.RigidByZeroIndex, zero, not rv.rigid, rv)
    return IndexVerdict(IndexClassification.PositiveIndexJacobiForm, zero, False)
