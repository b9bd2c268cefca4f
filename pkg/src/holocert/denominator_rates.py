"""Exact rational denominator-growth calculus.

Computes the integration cost I_u^v(w), the base rate tau_flat of a
column-shaped scheme, the added-integrations rate tau_sharp (an exact global
minimum over a piecewise-quadratic objective), their total, and the refined
rate tau_flatflat for single-column schemes, plus a Monte-Carlo validator
for the general matrix form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class DenominatorScheme:
    """m x r array of rates b (columns: u_j zeros then a constant b_j) plus integer powers e."""

    b: tuple[tuple[Fraction, ...], ...]  # rows
    e: tuple[int, ...]

    def __post_init__(self):
        m, r = self.m, self.r
        if len(self.e) != m:
            raise ValueError("e must have one entry per row")
        if any(v < 0 for v in self.e):
            raise ValueError("e entries must be nonnegative")
        for j in range(r):
            col = [self.b[i][j] for i in range(m)]
            if any(v < 0 for v in col):
                raise ValueError("b entries must be nonnegative")
            u = 0
            while u < m and col[u] == 0:
                u += 1
            tail = col[u:]
            if any(v != tail[0] for v in tail):
                raise ValueError(f"column {j} is not of zeros-then-constant shape")
        sums = self.row_sums()
        if any(sums[i] > sums[i + 1] for i in range(m - 1)):
            raise ValueError("row sums must be nondecreasing")

    @staticmethod
    def from_rows(rows, e) -> "DenominatorScheme":
        b = tuple(tuple(Fraction(v) for v in row) for row in rows)
        return DenominatorScheme(b=b, e=tuple(int(v) for v in e))

    @staticmethod
    def from_columns(cols, e) -> "DenominatorScheme":
        m = len(cols[0])
        rows = [[Fraction(cols[j][i]) for j in range(len(cols))] for i in range(m)]
        return DenominatorScheme.from_rows(rows, e)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def r(self) -> int:
        return len(self.b[0]) if self.b else 0

    def row_sums(self) -> list[Fraction]:
        return [sum(row, Fraction(0)) for row in self.b]

    def column_profile(self) -> list[tuple[int, Fraction]]:
        """(u_j, b_j) per column: number of leading zeros and the constant value."""
        out = []
        for j in range(self.r):
            col = [self.b[i][j] for i in range(self.m)]
            u = 0
            while u < self.m and col[u] == 0:
                u += 1
            out.append((u, col[-1] if u < self.m else Fraction(0)))
        return out

    def to_json_dict(self) -> dict:
        return {
            "b": [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.b],
            "e": list(self.e),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "DenominatorScheme":
        rows = [[Fraction(s) for s in row] for row in data["b"]]
        return DenominatorScheme.from_rows(rows, data["e"])


# ---------------------------------------------------------------------------
# The integration cost I_u^v(w)
# ---------------------------------------------------------------------------


def _harmonic(k: int) -> Fraction:
    return sum((Fraction(1, h) for h in range(1, k + 1)), Fraction(0))


def _segment_breaks(lo: Fraction, hi: Fraction, points) -> list[tuple[Fraction, Fraction]]:
    """Consecutive pairs partitioning [lo, hi] at the given interior points."""
    cuts = sorted({lo, hi, *[p for p in points if lo < p < hi]})
    return list(zip(cuts, cuts[1:]))


def integration_cost(u, v, w) -> Fraction:
    """Exact value of the integration cost function I_u^v(w).

    I = int_{min(u,1)}^1 max(t-w, 0) dt
      + int_{max(u,1)}^v  H(floor((t-1)/max(1,w))) dt
      + int_{max(u,1)}^v  max(t/floor((t + max(0,w-1))/max(1,w)) - w, 0) dt

    with H the harmonic numbers.  Each integrand is piecewise linear between
    rational breakpoints (floor jumps and max switches), so every piece
    integrates in closed form.
    """
    u, v, w = Fraction(u), Fraction(v), Fraction(w)
    if not (0 <= max(u, Fraction(1)) <= v and w <= v):
        raise ValueError("integration_cost requires 0 <= max(u,1) <= v and w <= v")
    step = max(Fraction(1), w)
    total = Fraction(0)

    # First integral: max(t - w, 0) on [min(u,1), 1].
    lo = min(u, Fraction(1))
    if lo < 1:
        a = max(lo, w)
        if a < 1:
            total += (1 - a) * (1 + a - 2 * w) / 2

    lo = max(u, Fraction(1))
    if lo < v:
        # Second integral: the harmonic-sum step function of floor((t-1)/step).
        kmax = int((v - 1) / step)
        breaks = [1 + k * step for k in range(1, kmax + 1)]
        for a, b in _segment_breaks(lo, v, breaks):
            k = int(((a + b) / 2 - 1) / step)
            total += _harmonic(k) * (b - a)

        # Third integral: max(t/floor((t + max(0,w-1))/step) - w, 0).
        off = max(Fraction(0), w - 1)
        kmax = int((v + off) / step) + 1
        breaks = []
        for k in range(1, kmax + 1):
            breaks.append(k * step - off)  # floor jump: t + off = k*step
            breaks.append(k * step)  # max switch inside the k-th piece
        for a, b in _segment_breaks(lo, v, breaks):
            mid = (a + b) / 2
            k = int((mid + off) / step)
            if k >= 1 and mid / k - w > 0:
                total += (a + b) / (2 * k) * (b - a) - w * (b - a)
    return total


# ---------------------------------------------------------------------------
# tau_flat, tau_sharp, tau
# ---------------------------------------------------------------------------


def tau_flat(scheme: DenominatorScheme) -> Fraction:
    """(1/m^2) sum_i (2i-1) sigma_i, exactly."""
    m = scheme.m
    sums = scheme.row_sums()
    return sum(((2 * i + 1) * sums[i] for i in range(m)), Fraction(0)) / (m * m)


def _sharp_objective(xi: Fraction, m: int, e_sum: int, e_max: int) -> Fraction:
    return xi * e_sum + e_max * integration_cost(xi, m, xi)


def _quadratic_through(points):
    """Exact quadratic through three (x, y) pairs, as coefficients (c0, c1, c2)."""
    (x0, y0), (x1, y1), (x2, y2) = points
    den01, den02, den12 = x0 - x1, x0 - x2, x1 - x2
    l0 = (y0 / (den01 * den02), -(x1 + x2) * y0 / (den01 * den02), x1 * x2 * y0 / (den01 * den02))
    l1 = (y1 / (-den01 * den12), (x0 + x2) * y1 / (den01 * den12), -x0 * x2 * y1 / (den01 * den12))
    l2 = (y2 / (den02 * den12), -(x0 + x1) * y2 / (den02 * den12), x0 * x1 * y2 / (den02 * den12))
    c2 = l0[0] + l1[0] + l2[0]
    c1 = l0[1] + l1[1] + l2[1]
    c0 = l0[2] + l1[2] + l2[2]
    return (c0, c1, c2)


def tau_sharp(scheme: DenominatorScheme, grid_step: Fraction = Fraction(1, 120)):
    """(2/m^2) min over xi in [0, m] of (xi * sum(e) + max(e) * I_xi^m(xi)).

    The objective is piecewise quadratic with rational breakpoints at 1 and at
    (m-1)/k, m/k; on each piece the minimum is evaluated in closed form, so the
    returned value is an exact global minimum.  Also returns the widest interval
    of minimizers (merged flat pieces around the argmin).
    """
    m = scheme.m
    e_sum = sum(scheme.e)
    e_max = max(scheme.e) if scheme.e else 0
    if e_max == 0:
        return Fraction(0), (Fraction(0), Fraction(m))
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")

    mf = Fraction(m)
    breaks = {Fraction(0), Fraction(1), mf}
    k = 1
    while Fraction(m - 1, k) > 1:
        breaks.add(Fraction(m - 1, k))
        k += 1
    k = 1
    while Fraction(m, k) > 1:
        breaks.add(Fraction(m, k))
        k += 1
    cells = sorted(breaks)

    obj = lambda xi: _sharp_objective(xi, m, e_sum, e_max)
    best_val = None
    best_pieces = []  # (value, lo, hi) of each piece's exact minimum
    for a, b in zip(cells, cells[1:]):
        pts = [a, (3 * a + b) / 4, (a + b) / 2, (a + 3 * b) / 4, b]
        vals = [obj(x) for x in pts]
        c0, c1, c2 = _quadratic_through(list(zip(pts[:3], vals[:3])))
        # The breakpoint list is complete, so the objective is a single quadratic here.
        for x, y in zip(pts[3:], vals[3:]):
            assert c0 + c1 * x + c2 * x * x == y, "piecewise-quadratic structure violated"
        candidates = [(vals[0], a, a), (vals[-1], b, b)]
        if c2 > 0:
            vertex = -c1 / (2 * c2)
            if a < vertex < b:
                candidates.append((c0 + c1 * vertex + c2 * vertex * vertex, vertex, vertex))
        if c2 == 0 and c1 == 0:
            candidates = [(vals[0], a, b)]  # flat piece
        val, lo, hi = min(candidates, key=lambda t: t[0])
        best_pieces.append((val, lo, hi))
        if best_val is None or val < best_val:
            best_val = val

    # Merge the flat minimizer region around the global minimum.
    lo = hi = None
    for val, a, b in best_pieces:
        if val == best_val:
            if lo is None:
                lo, hi = a, b
            elif a <= hi:
                hi = max(hi, b)
    return 2 * best_val / (m * m), (lo, hi)


def tau_total(scheme: DenominatorScheme) -> Fraction:
    value, _ = tau_sharp(scheme)
    return tau_flat(scheme) + value


# ---------------------------------------------------------------------------
# tau_flatflat, exact for a single column
# ---------------------------------------------------------------------------


def _coverage_fraction(t: Fraction, b_sorted: list[Fraction], m: int) -> Fraction:
    """Max fraction of balanced slots coverable at threshold t.

    Species i has quota 1/m and covers uniformly-distributed values x >= t/b_i.
    The availability sets are nested, so the maximum flow equals the min cut
    min_j [ (j-1)/m + (1 - theta_(j)) ] over thresholds in ascending order.
    """
    thetas = sorted(t / b for b in b_sorted if b > 0 and t / b < 1)
    best = Fraction(len(thetas), m)
    for j, theta in enumerate(thetas):
        best = min(best, Fraction(j, m) + 1 - theta)
    return max(best, Fraction(0))


def tau_flatflat_r1(b_column) -> Fraction:
    """Exact refined rate for a single-column scheme: 2 * int_0^bmax c(t) dt.

    c(t) is the per-threshold maximal covered fraction solved by the nested
    max-flow formula; it is piecewise linear between rational breakpoints, so
    the integral is exact.
    """
    b = sorted(Fraction(v) for v in b_column)
    if any(v < 0 for v in b):
        raise ValueError("b entries must be nonnegative")
    m = len(b)
    bmax = b[-1] if b else Fraction(0)
    if m == 0 or bmax == 0:
        return Fraction(0)
    # Breakpoints: where any theta_i = t/b_i hits 1 (t = b_i), and where the
    # active min-cut switches: intersections of j/m + 1 - t/b_i with k/m + 1 - t/b_j
    # and with the capacity line len/m; all rational.
    points = {Fraction(0), bmax}
    positive = [v for v in b if v > 0]
    for v in positive:
        points.add(v)
    for i, bi in enumerate(positive):
        for j, bj in enumerate(positive):
            if bi != bj:
                # j0/m + 1 - t/bi = k0/m + 1 - t/bj for integer offsets up to m
                for d in range(-m, m + 1):
                    denom = Fraction(1) / bi - Fraction(1) / bj
                    t = Fraction(d, m) / denom
                    if 0 < t < bmax:
                        points.add(t)
        for j0 in range(m + 1):
            for cap in range(m + 1):
                # j0/m + 1 - t/bi = cap/m
                t = (Fraction(j0 - cap, m) + 1) * bi
                if 0 < t < bmax:
                    points.add(t)
    cuts = sorted(points)
    total = Fraction(0)
    for a, c in zip(cuts, cuts[1:]):
        fa = _coverage_fraction(a, b, m)
        fmid = _coverage_fraction((a + c) / 2, b, m)
        fc = _coverage_fraction(c, b, m)
        assert fa + fc == 2 * fmid, "coverage must be linear between breakpoints"
        total += (fa + fc) / 2 * (c - a)
    return 2 * total


def tau_flatflat_mc(b_rows, d: int, n_grid: int, trials: int, seed: int):
    """Monte-Carlo estimate of the refined denominator rate for a general matrix.

    Samples balanced species assignments and exponent vectors, solves the
    per-threshold assignment problem exactly (Hungarian method on replicated
    species), and reports (mean, standard_error) of Den/d over the trials.
    Validation tool only.
    """
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    b = [[Fraction(v) for v in row] for row in b_rows]
    m = len(b)
    r = len(b[0])
    if d % m:
        raise ValueError("d must be divisible by the number of rows")
    rng = random.Random(seed)
    bmax = max(max(row) for row in b)
    estimates = []
    species = [i for i in range(m) for _ in range(d // m)]
    for _ in range(trials):
        xs = sorted(rng.random() for _ in range(d))
        total = 0.0
        kmax = int(bmax * n_grid) + 1
        for k in range(1, kmax + 1):
            t = k / n_grid
            # weight of slot j under species i: number of h with b[i][h] * x_j >= t
            w = np.zeros((d, d))
            for col, i in enumerate(species):
                for j in range(d):
                    w[j, col] = sum(1 for h in range(r) if float(b[i][h]) * xs[j] >= t)
            rows, cols = linear_sum_assignment(-w)
            total += w[rows, cols].sum()
        estimates.append(2.0 * total / (n_grid * d))
    mean = sum(estimates) / len(estimates)
    if len(estimates) > 1:
        var = sum((v - mean) ** 2 for v in estimates) / (len(estimates) - 1)
        se = (var / len(estimates)) ** 0.5
    else:
        se = float("nan")
    return mean, se
