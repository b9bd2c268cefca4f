"""Analytic disc maps with exact conformal sizes.

Constructors for the slit, lune, gobble, Koebe/Landen and bivalent maps, the
two certified contours used by the bound certificates, argument-principle
preimage counting, and circle/grid evaluation.  Map values are computed with
numpy complex arithmetic by default and with mpmath at a requested precision
for derivative cross-checks; rational constants are carried exactly and
materialized per backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

_CONST_PREC = 300


class _Ctx:
    """Dispatch between numpy-array and mpmath-scalar evaluation."""

    def __init__(self, use_mp: bool):
        self.use_mp = use_mp

    def sqrt(self, z):
        return mp.sqrt(z) if self.use_mp else np.sqrt(z)

    def const(self, q: Fraction):
        if self.use_mp:
            return mp.mpf(q.numerator) / q.denominator
        return q.numerator / q.denominator

    def unit(self, theta: Fraction):
        """exp(2 pi i theta) for exact rational theta."""
        if self.use_mp:
            return mp.expjpi(2 * mp.mpf(theta.numerator) / theta.denominator)
        return complex(np.exp(2j * np.pi * (theta.numerator / theta.denominator)))


NP_CTX = _Ctx(False)
MP_CTX = _Ctx(True)


@dataclass(frozen=True)
class ExactSize:
    """A positive real prod base^exp with rational bases and exponents.

    Covers all conformal sizes in play: plain rationals, and surds like
    16^(7/8) = 8*sqrt(2) for the iterated square-root maps.
    """

    factors: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def from_fraction(q) -> "ExactSize":
        q = Fraction(q)
        if q <= 0:
            raise ValueError("sizes must be positive")
        return ExactSize(((q, Fraction(1)),))

    @staticmethod
    def from_power(base, exp) -> "ExactSize":
        return ExactSize(((Fraction(base), Fraction(exp)),))

    def __mul__(self, other: "ExactSize") -> "ExactSize":
        return ExactSize(self.factors + other.factors)

    @property
    def is_rational(self) -> bool:
        return all(e.denominator == 1 for _, e in self.factors)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("size is not rational")
        out = Fraction(1)
        for b, e in self.factors:
            out *= b ** int(e)
        return out

    def mpf(self, prec: int = 128):
        with mp.workprec(prec):
            out = mp.mpf(1)
            for b, e in self.factors:
                out *= mp.power(mp.mpf(b.numerator) / b.denominator, mp.mpf(e.numerator) / e.denominator)
            return +out

    def log(self, prec: int = 128):
        with mp.workprec(prec):
            out = mp.mpf(0)
            for b, e in self.factors:
                out += (mp.mpf(e.numerator) / e.denominator) * mp.log(mp.mpf(b.numerator) / b.denominator)
            return +out

    def __float__(self) -> float:
        return float(self.mpf())


@dataclass(frozen=True)
class AnalyticMap:
    """An evaluator on the closed unit disc plus its exact conformal size."""

    kind: str
    params: tuple
    conformal_size: ExactSize
    _eval: callable = field(repr=False)
    composition: tuple = ()

    def values(self, z):
        """Vectorized evaluation; z is a complex scalar or numpy array."""
        return self._eval(np.asarray(z, dtype=complex), NP_CTX)

    def value_mp(self, z, prec: int = 128):
        with mp.workprec(prec):
            return self._eval(mp.mpc(z), MP_CTX)

    def derivative_at_zero(self, prec: int = 200, h=None):
        """|phi'(0)| by a symmetric difference quotient at high precision."""
        with mp.workprec(prec):
            step = mp.mpf(10) ** -6 if h is None else mp.mpf(h)
            return abs(self._eval(mp.mpc(step), MP_CTX) - self._eval(mp.mpc(-step), MP_CTX)) / (2 * step)


# ---------------------------------------------------------------------------
# Elementary constructors
# ---------------------------------------------------------------------------


def koebe() -> AnalyticMap:
    """z -> 4z/(1+z)^2, the extremal univalent map onto C minus [1, oo)."""

    def ev(z, ctx):
        return 4 * z / (1 + z) ** 2

    return AnalyticMap("koebe", (), ExactSize.from_fraction(4), ev)


def slit(r) -> AnalyticMap:
    """Riemann map of the radially slit disc D minus (-1, -r]; size 4r/(1+r)^2."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError("slit requires r in (0, 1)")
    A = (1 + r) ** 2
    B = 2 * (r - 1) ** 2
    C = 2 * (1 - 6 * r + r * r)
    opr = 1 + r

    def ev(z, ctx):
        a, b, c, p, rr = (ctx.const(v) for v in (A, B, C, opr, r))
        s = ctx.sqrt(a - c * z + a * z * z)
        num = a - b * z + a * z * z + p * (z - 1) * s
        if ctx.use_mp:
            return num / (8 * rr * z) if z != 0 else mp.mpc(0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / (8 * rr * z)
        return np.where(z == 0, 0, out)

    m = AnalyticMap("slit", (r,), ExactSize.from_fraction(4 * r / (1 + r) ** 2), ev)
    _check_series_head(
        m,
        [
            4 * r / (1 + r) ** 2,
            8 * r * (1 - r) ** 2 / (1 + r) ** 4,
            4 * (1 - r) ** 2 * r * (3 - 14 * r + 3 * r * r) / (1 + r) ** 6,
        ],
    )
    return m


def lune(c) -> AnalyticMap:
    """Riemann map onto the disc minus a right-angle crescent at -1; size (c^2-1)/(c^2+1)."""
    c = Fraction(c)
    if c <= 1:
        raise ValueError("lune requires c > 1")
    CC = c * c

    def ev(z, ctx):
        cc = ctx.const(CC)
        s = ctx.sqrt((1 + cc) ** 2 * (1 + z) ** 2 - 16 * cc * z)
        return (z * (1 + cc) - 1 - cc + s) / (2 * (cc - 1))

    size = (c * c - 1) / (c * c + 1)
    m = AnalyticMap("lune", (c,), ExactSize.from_fraction(size), ev)
    _check_series_head(m, [size])
    return m


def gobble(r, e, f) -> AnalyticMap:
    """Two nested lunes scaled by r; size r (e^2-1)(f^2-1)/((e^2+1)(f^2+1))."""
    r, e, f = Fraction(r), Fraction(e), Fraction(f)
    if not (0 < r <= 1 and e > 1 and f > 1):
        raise ValueError("gobble requires r in (0,1], e > 1, f > 1")
    inner, outer = lune(f), lune(e)

    def ev(z, ctx):
        return ctx.const(r) * outer._eval(-inner._eval(z, ctx), ctx)

    size = r * (e * e - 1) * (f * f - 1) / ((e * e + 1) * (f * f + 1))
    return AnalyticMap("gobble", (r, e, f), ExactSize.from_fraction(size), ev, (inner, outer))


def bivalent() -> AnalyticMap:
    """z -> 8(z+z^3)/(1+z)^4 = 1 - ((1-z)/(1+z))^4, two-valent of size 8."""

    def ev(z, ctx):
        return 8 * (z + z ** 3) / (1 + z) ** 4

    return AnalyticMap("bivalent", (), ExactSize.from_fraction(8), ev)


def quadrivalent() -> AnalyticMap:
    """The four-valent iterated-square-root map, size 16^(7/8) = 8*sqrt(2).

    Closed form 8 sqrt(2) z (1+z^2)^2 sqrt(1+z^4) / (sqrt(2) z + sqrt(1+z^4))^4.
    """

    def ev(z, ctx):
        s = ctx.sqrt(1 + z ** 4)
        r2 = mp.sqrt(2) if ctx.use_mp else math.sqrt(2.0)
        return 8 * r2 * z * (1 + z * z) ** 2 * s / (z * r2 + s) ** 4

    m = AnalyticMap("quadrivalent", (), ExactSize.from_power(16, Fraction(7, 8)), ev)
    return m


def landen(n: int) -> AnalyticMap:
    """The n-fold square-root iteration toward the modular lambda map.

    phi_n = G(sqrt(G(sqrt(... G(z^(2^n)) ...)))) with G the Koebe map;
    conformal size exactly 16^(1 - 2^(-n-1)).  Evaluated through the Taylor
    series (branch-free); reliable for |z| <= ~0.8.
    """
    if n < 0:
        raise ValueError("landen requires n >= 0")
    coeffs = _landen_series(n, 192)

    def ev(z, ctx):
        acc = 0 * z
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc

    return AnalyticMap("landen", (n,), ExactSize.from_power(16, 1 - Fraction(1, 2 ** (n + 1))), ev)


def _pad(a, N):
    out = np.zeros(N)
    out[: min(len(a), N)] = a[: min(len(a), N)]
    return out


def _series_div(a, b, N):
    a, b = _pad(a, N), _pad(b, N)
    out = np.zeros(N)
    for i in range(N):
        acc = a[i] - (np.dot(out[:i], b[i:0:-1]) if i else 0.0)
        out[i] = acc / b[0]
    return out


def _series_sqrt_even(g, N):
    """sqrt of a float series with even valuation and positive leading coefficient."""
    nz = np.nonzero(np.abs(g) > 0)[0]
    v = int(nz[0])
    assert v % 2 == 0
    core = _pad(g[v:], N)
    h = np.zeros(N)
    h[0] = math.sqrt(core[0])
    for i in range(1, N - v // 2):
        acc = core[i] - (np.dot(h[1:i], h[i - 1 : 0 : -1]) if i > 1 else 0.0)
        h[i] = acc / (2 * h[0])
    out = np.zeros(N)
    out[v // 2 :] = h[: N - v // 2]
    return out


def _koebe_of_series(s, N):
    one_plus = _pad(s, N).copy()
    one_plus[0] += 1.0
    denom = np.convolve(one_plus, one_plus)[:N]
    return _series_div(4 * _pad(s, N), denom, N)


def _landen_series(n: int, order: int) -> list[float]:
    s = np.zeros(order)
    if 2 ** n < order:
        s[2 ** n] = 1.0
    for _ in range(n):
        s = _series_sqrt_even(_koebe_of_series(s, order), order)
    return list(_koebe_of_series(s, order))


def scale_argument(m: AnalyticMap, delta) -> AnalyticMap:
    """z -> m(delta z); multiplies the conformal size by delta."""
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("scale requires delta in (0, 1]")

    def ev(z, ctx):
        return m._eval(ctx.const(delta) * z, ctx)

    return AnalyticMap("scale", (delta,), ExactSize.from_fraction(delta) * m.conformal_size, ev, (m,))


def postmultiply(m: AnalyticMap, c) -> AnalyticMap:
    """z -> c * m(z) for rational c != 0; size scales by |c|."""
    c = Fraction(c)

    def ev(z, ctx):
        return ctx.const(c) * m._eval(z, ctx)

    return AnalyticMap("postmultiply", (c,), ExactSize.from_fraction(abs(c)) * m.conformal_size, ev, (m,))


def rotate_value(m: AnalyticMap, theta: Fraction) -> AnalyticMap:
    """z -> e^(2 pi i theta) * m(z); conformal size unchanged."""
    theta = Fraction(theta)

    def ev(z, ctx):
        return ctx.unit(theta) * m._eval(z, ctx)

    return AnalyticMap("rotate_value", (theta,), m.conformal_size, ev, (m,))


def negate_argument(m: AnalyticMap) -> AnalyticMap:
    def ev(z, ctx):
        return m._eval(-z, ctx)

    return AnalyticMap("negate_argument", (), m.conformal_size, ev, (m,))


# ---------------------------------------------------------------------------
# Modular hauptmodul evaluators
# ---------------------------------------------------------------------------


def _product_terms(radius: float, prec_bits: int) -> int:
    if radius >= 1:
        raise ValueError("modular products require |q| < 1")
    return max(16, int(prec_bits * math.log(2) / -math.log(radius)) + 8)


def modular_h_map(max_radius: float = 0.84) -> AnalyticMap:
    """The level-2 hauptmodul h(q) = -256 q prod (1+q^n)^24, with h'(0) = -256."""
    nterms = _product_terms(max_radius, 80)

    def ev(q, ctx):
        n = _product_terms(min(float(abs(q)), 0.998), mp.prec + 8) if ctx.use_mp else nterms
        acc = 1 + 0 * q
        qn = 1 + 0 * q
        for _ in range(n):
            qn = qn * q
            acc = acc * (1 + qn) ** 24
        return -256 * q * acc

    return AnalyticMap("modular_h", (), ExactSize.from_fraction(256), ev)


def modular_lambda_map(max_radius: float = 0.94) -> AnalyticMap:
    """The modular lambda map 16 q prod ((1+q^(2n))/(1+q^(2n-1)))^8, lambda'(0) = 16."""
    nterms = _product_terms(max_radius, 80)

    def ev(q, ctx):
        n = _product_terms(min(float(abs(q)), 0.998), mp.prec + 8) if ctx.use_mp else nterms
        acc = 1 + 0 * q
        qodd = 1 + 0 * q
        for k in range(1, n):
            qodd = qodd * q if k == 1 else qodd * q * q  # q^(2k-1)
            qeven = qodd * q
            acc = acc * ((1 + qeven) / (1 + qodd)) ** 8
        return 16 * q * acc

    return AnalyticMap("modular_lambda", (), ExactSize.from_fraction(16), ev)


def compose_outer(outer: AnalyticMap, inner: AnalyticMap) -> AnalyticMap:
    """outer(inner(z)) for maps fixing 0; sizes multiply."""

    def ev(z, ctx):
        return outer._eval(inner._eval(z, ctx), ctx)

    return AnalyticMap("compose", (), outer.conformal_size * inner.conformal_size, ev, (inner, outer))


def construct_map(kind: str, **params) -> AnalyticMap:
    """Constructor dispatch by tag."""
    table = {
        "koebe": koebe,
        "slit": slit,
        "lune": lune,
        "gobble": gobble,
        "landen": landen,
        "bivalent": bivalent,
        "quadrivalent": quadrivalent,
        "modular_h": modular_h_map,
        "modular_lambda": modular_lambda_map,
    }
    if kind not in table:
        raise ValueError(f"unknown map kind {kind!r}")
    return table[kind](**params)


# ---------------------------------------------------------------------------
# Certified contours
# ---------------------------------------------------------------------------

#: Exact conformal size of the four-slits-plus-lune contour below.
THMA_CONFORMAL_SIZE = Fraction(5448339453535586608000000000, 8658833407565631122430056127)

_THMA = {
    "R": Fraction(77, 100),
    "c": Fraction(75, 10),
    "r": (Fraction(91, 100), Fraction(6188, 10000), Fraction(55515, 100000), Fraction(772, 1000)),
    "theta": (Fraction(7977, 100000), Fraction(11543, 100000), Fraction(3525, 100000), Fraction(-783, 10000)),
    "shrink": Fraction(995, 1000),
}

LOGS_CONFORMAL_SIZE = Fraction(1287, 2516)


def build_certified_contour(preset: str) -> AnalyticMap:
    """The inner disc-to-disc map psi of a certificate preset, with exact size.

    "thmA": four successive rotated slits, then a lune of parameter 15/2,
    scaled by -77/100 and shrunk by 995/1000; the slits and the lune pocket
    fence off all but one preimage of -1/72 under the level-2 hauptmodul.
    "logs": -(3/4) h(z, 23/10), a single lune of size 1287/2516.
    """
    if preset == "thmA":
        p = _THMA
        r1, r2, r3, r4 = p["r"]
        th1, th2, th3, th4 = p["theta"]
        m = slit(r1)
        for rr, th in ((r2, th4), (r3, th3), (r4, th2)):
            m = _outer_of(slit(rr), rotate_value(m, th))
        m = rotate_value(m, th1 + Fraction(1, 2))  # the -e^(2 pi i theta_1) factor
        m = _outer_of(lune(p["c"]), m)
        m = postmultiply(m, -p["R"])
        m = scale_argument(m, p["shrink"])
        assert m.conformal_size.as_fraction() == THMA_CONFORMAL_SIZE
        return m
    if preset == "logs":
        return postmultiply(lune(Fraction(23, 10)), Fraction(-3, 4))
    raise ValueError(f"unknown contour preset {preset!r}")


def _outer_of(outer: AnalyticMap, m: AnalyticMap) -> AnalyticMap:
    def ev(z, ctx):
        return outer._eval(m._eval(z, ctx), ctx)

    return AnalyticMap("compose", (), outer.conformal_size * m.conformal_size, ev, (m, outer))


def certified_phi(preset: str) -> AnalyticMap:
    """The full analytic map h(psi(z)) of a certificate preset."""
    return compose_outer(modular_h_map(), build_certified_contour(preset))


# ---------------------------------------------------------------------------
# Preimage counting, circle evaluation, grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreimageCount:
    target: complex
    contour_samples: int
    winding: int
    margin: float


class InconclusiveWinding(RuntimeError):
    pass


def _winding_number(values: np.ndarray) -> tuple[float, int]:
    rotated = np.roll(values, -1)
    angles = np.angle(rotated / values)
    total = float(angles.sum() / (2 * np.pi))
    return total, int(round(total))


def preimage_count(phi: AnalyticMap, target: complex, samples: int, margin_tol: float = 1e-9) -> PreimageCount:
    """Preimages of target in the disc (with multiplicity), by the argument principle.

    Requires agreement between runs at n and 2n samples and near-integer
    winding sums; raises InconclusiveWinding otherwise.
    """
    results = []
    for n in (samples, 2 * samples):
        z = np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
        v = phi.values(z) - target
        margin = float(np.min(np.abs(v)))
        if margin <= margin_tol:
            raise InconclusiveWinding(f"contour passes within {margin} of the target; increase samples")
        total, w = _winding_number(v)
        if abs(total - w) > 0.25:
            raise InconclusiveWinding(f"winding sum {total} too far from an integer")
        results.append((w, margin))
    if results[0][0] != results[1][0]:
        raise InconclusiveWinding("winding changed under sample doubling")
    return PreimageCount(target=target, contour_samples=samples, winding=results[0][0], margin=results[0][1])


def eval_on_circle(phi: AnalyticMap, radius: float, n: int) -> np.ndarray:
    """phi(radius * e^(2 pi i (j+1/2)/n)) on the half-offset grid."""
    if n < 1:
        raise ValueError("need n >= 1")
    z = radius * np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
    v = phi.values(z)
    bad = ~np.isfinite(v)
    if bad.any():
        raise ArithmeticError(f"evaluation failed at sample {z[bad][0]}")
    return v


@dataclass(frozen=True)
class LevelGrid:
    points: np.ndarray  # columns re, im, log_abs
    levels: tuple[float, ...]
    bands: np.ndarray

    def to_csv(self) -> str:
        lines = ["re,im,log_abs,band"]
        for (re, im, la), band in zip(self.points, self.bands):
            lines.append(f"{re!r},{im!r},{la!r},{int(band)}")
        return "\n".join(lines) + "\n"


def level_grid(phi: AnalyticMap, resolution: int, levels, radius: float = 1.0) -> LevelGrid:
    """log|phi| sampled over a disc, with band indices against the given |.|-levels."""
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    ticks = np.linspace(-radius, radius, resolution)
    xs, ys = np.meshgrid(ticks, ticks)
    z = (xs + 1j * ys).ravel()
    z = z[np.abs(z) < radius]
    v = phi.values(z)
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(v))
    levels = tuple(float(l) for l in levels)
    bands = np.searchsorted(np.asarray(levels), np.abs(v))
    return LevelGrid(points=np.column_stack([z.real, z.imag, la]), levels=levels, bands=bands)


# ---------------------------------------------------------------------------
# Construction-time branch check
# ---------------------------------------------------------------------------


def _check_series_head(m: AnalyticMap, head_coeffs, h: float = 1e-3):
    """Verify the evaluator's Taylor head against exact coefficients.

    A wrong square-root branch shows up as an O(1) mismatch in the linear term;
    the tolerance budgets only for the first untested coefficient.
    """
    tol = 50.0 * h ** (len(head_coeffs) + 1)
    with mp.workprec(140):
        hh = mp.mpf(h)
        for point in (hh, -hh, hh * mp.mpc(0, 1)):
            predicted = sum(
                (mp.mpf(c.numerator) / c.denominator) * point ** (k + 1) for k, c in enumerate(head_coeffs)
            )
            actual = m._eval(mp.mpc(point), MP_CTX)
            if abs(actual - predicted) > tol:
                raise AssertionError(f"{m.kind}: series head mismatch at {point}: {actual} vs {predicted}")
