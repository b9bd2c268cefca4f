"""Exact truncated power series over the rationals.

A ``FormalSeries`` knows exactly ``truncation_order`` coefficients (indices
0 .. truncation_order-1) and never reads past them; every operation returns
the maximal provably correct truncation.  Includes ring and composition
operations, Hadamard products, the jet-removing integration family,
denominator-type witnesses, and the plus/minus symmetrizations that descend
from the x-line to the y = x^2/(x-1) line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction


@dataclass(frozen=True)
class FormalSeries:
    coeffs: tuple[Fraction, ...]
    var: str = "x"

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs)

    @staticmethod
    def from_list(values, var: str = "x") -> "FormalSeries":
        return FormalSeries(tuple(Fraction(v) for v in values), var)

    @staticmethod
    def zero(order: int, var: str = "x") -> "FormalSeries":
        return FormalSeries((Fraction(0),) * order, var)

    @staticmethod
    def one(order: int, var: str = "x") -> "FormalSeries":
        return FormalSeries((Fraction(1),) + (Fraction(0),) * (order - 1), var)

    @staticmethod
    def identity(order: int, var: str = "x") -> "FormalSeries":
        c = [Fraction(0)] * order
        if order > 1:
            c[1] = Fraction(1)
        return FormalSeries(tuple(c), var)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def head(self, n: int) -> tuple[Fraction, ...]:
        return self.coeffs[:n]

    def valuation(self) -> int:
        """Index of the first nonzero known coefficient (truncation_order if all zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.truncation_order

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.truncation_order:
            raise ValueError("cannot extend a truncated series")
        return replace(self, coeffs=self.coeffs[:order])

    def _check_var(self, other: "FormalSeries"):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var!r} vs {other.var!r}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FormalSeries.from_list([other] + [0] * (self.truncation_order - 1), self.var)
        self._check_var(other)
        n = min(self.truncation_order, other.truncation_order)
        return FormalSeries(tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])), self.var)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FormalSeries.from_list([other] + [0] * (self.truncation_order - 1), self.var)
        self._check_var(other)
        n = min(self.truncation_order, other.truncation_order)
        return FormalSeries(tuple(a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])), self.var)

    def __neg__(self):
        return replace(self, coeffs=tuple(-a for a in self.coeffs))

    def scale(self, c) -> "FormalSeries":
        c = Fraction(c)
        return replace(self, coeffs=tuple(c * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_var(other)
        n = min(self.truncation_order, other.truncation_order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return FormalSeries(tuple(out), self.var)

    __rmul__ = __mul__

    def divide(self, other: "FormalSeries") -> "FormalSeries":
        """Exact series division; requires a nonzero constant term in the divisor."""
        self._check_var(other)
        if other.truncation_order == 0 or other.coeffs[0] == 0:
            raise ZeroDivisionError("division by a series with zero constant term")
        n = min(self.truncation_order, other.truncation_order)
        g0 = other.coeffs[0]
        out = [Fraction(0)] * n
        for i in range(n):
            acc = self.coeffs[i]
            for k in range(i):
                if out[k] and other.coeffs[i - k]:
                    acc -= out[k] * other.coeffs[i - k]
            out[i] = acc / g0
        return FormalSeries(tuple(out), self.var)

    def hadamard(self, other: "FormalSeries") -> "FormalSeries":
        self._check_var(other)
        n = min(self.truncation_order, other.truncation_order)
        return FormalSeries(tuple(a * b for a, b in zip(self.coeffs[:n], other.coeffs[:n])), self.var)

    def compose(self, inner: "FormalSeries") -> "FormalSeries":
        """self(inner) for inner with zero constant term, by Horner evaluation."""
        if inner.truncation_order == 0 or inner.coeffs[0] != 0:
            raise ValueError("composition requires inner series with zero constant term")
        n = min(self.truncation_order, inner.truncation_order)
        acc = FormalSeries.zero(n, inner.var)
        for k in range(n - 1, -1, -1):
            acc = acc * inner.truncate(n) + self.coeffs[k]
        return acc

    def reverse(self) -> "FormalSeries":
        """Compositional inverse g with self(g) = identity, by Lagrange inversion.

        g_n = (1/n) [x^(n-1)] (x/f)^n, for f = c1*x + ... with c1 != 0.
        """
        n = self.truncation_order
        if n < 2 or self.coeffs[0] != 0 or self.coeffs[1] == 0:
            raise ValueError("reversion requires f(0) = 0 and f'(0) != 0")
        u = FormalSeries.one(n, self.var).divide(FormalSeries(self.coeffs[1:], self.var))
        g = [Fraction(0)] * n
        power = u
        g[1] = power.coeffs[0]
        for m in range(2, n):
            power = power * u
            g[m] = power.coeffs[m - 1] / m
        return FormalSeries(tuple(g), self.var)

    def differentiate(self) -> "FormalSeries":
        n = self.truncation_order
        if n == 0:
            return self
        return FormalSeries(tuple(Fraction(k) * self.coeffs[k] for k in range(1, n)), self.var)

    def integrate(self) -> "FormalSeries":
        """Antiderivative with zero constant term."""
        out = [Fraction(0)] * (self.truncation_order + 1)
        for k, c in enumerate(self.coeffs):
            out[k + 1] = c / (k + 1)
        return FormalSeries(tuple(out), self.var)

    def jet(self, k: int) -> "FormalSeries":
        """The degree-k Taylor polynomial, padded to the same truncation."""
        c = list(self.coeffs)
        for i in range(k + 1, len(c)):
            c[i] = Fraction(0)
        return FormalSeries(tuple(c), self.var)

    def shift_down(self, k: int) -> "FormalSeries":
        """Divide by var^k; the dropped low coefficients must be zero."""
        if any(self.coeffs[:k]):
            raise ValueError("shift_down would drop nonzero coefficients")
        return FormalSeries(self.coeffs[k:], self.var)

    def rename(self, var: str) -> "FormalSeries":
        return replace(self, var=var)

    def eval_exact(self, z: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_float(self, z):
        """Horner evaluation at a float/complex/array/mpmath point."""
        acc = 0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + (c.numerator / c.denominator)
        return acc

    def to_json(self) -> str:
        return json.dumps({"var": self.var, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]})

    @staticmethod
    def from_json(text: str) -> "FormalSeries":
        data = json.loads(text)
        return FormalSeries(tuple(Fraction(s) for s in data["coeffs"]), data.get("var", "x"))


def series_ring(op: str, f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """Ring operation dispatch: add, sub, mul, div at the shared truncation."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f.divide(g)
    raise ValueError(f"unknown ring op {op!r}")


def series_compose(f: FormalSeries, g: FormalSeries, mode: str = "compose") -> FormalSeries:
    if mode == "compose":
        return f.compose(g)
    if mode == "reverse":
        return g.reverse() if f is None else f.reverse()
    raise ValueError(f"unknown compose mode {mode!r}")


def series_hadamard(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    return f.hadamard(g)


def series_integrate_family(f: FormalSeries, pole_order: int) -> FormalSeries:
    """Antiderivative of (f - jet_k(f)) / y^(k+1) for k >= 0; of y*f for k = -1.

    Constant term is always zero.
    """
    k = pole_order
    if k < -1:
        raise ValueError("pole_order must be >= -1")
    if k == -1:
        shifted = FormalSeries((Fraction(0),) + f.coeffs, f.var)
        return shifted.integrate()
    if f.truncation_order < k + 2:
        raise ValueError("insufficient truncation for the requested pole order")
    reduced = (f - f.jet(k)).shift_down(k + 1)
    return reduced.integrate()


# ---------------------------------------------------------------------------
# Denominator-type witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenominatorWitness:
    """Witness for a denominator type n^e * prod_h [1, ..., floor(b_h n) + c_h].

    A series passes iff a_n times that product is an integer for all
    1 <= n < checked_upto.
    """

    b_row: tuple[Fraction, ...]
    e_power: int = 0
    shift_allowances: tuple[int, ...] = ()
    checked_upto: int = 0
    first_violation: int | None = None

    @property
    def passed(self) -> bool:
        return self.checked_upto > 0 and self.first_violation is None


def denominator_check(f: FormalSeries, witness: DenominatorWitness) -> DenominatorWitness:
    """Fill in first_violation (or confirm a pass) up to witness.checked_upto."""
    upto = witness.checked_upto
    if f.truncation_order < upto:
        raise ValueError("series truncation is below checked_upto")
    b = [Fraction(v) for v in witness.b_row]
    shifts = list(witness.shift_allowances) or [0] * len(b)
    if len(shifts) != len(b):
        raise ValueError("shift_allowances length must match b_row")
    lcms = [1] * len(b)
    bounds = [0] * len(b)
    violation = None
    for n in range(1, upto):
        clear = Fraction(n) ** witness.e_power
        for h in range(len(b)):
            m = math.floor(b[h] * n) + shifts[h]
            while bounds[h] < m:
                bounds[h] += 1
                lcms[h] = math.lcm(lcms[h], bounds[h])
            clear *= lcms[h]
        if (f[n] * clear).denominator != 1:
            violation = n
            break
    return replace(witness, first_violation=violation)


# ---------------------------------------------------------------------------
# Symmetrization x -> y = x + x/(x-1) = x^2/(x-1)
# ---------------------------------------------------------------------------


def mobius_x_over_x_minus_1(f: FormalSeries) -> FormalSeries:
    """f(x/(x-1)), using (x/(x-1))^k = (-1)^k sum_j C(j+k-1, j) x^(k+j)."""
    n = f.truncation_order
    out = [Fraction(0)] * n
    for k in range(n):
        ak = f.coeffs[k]
        if not ak:
            continue
        if k == 0:
            out[0] += ak
            continue
        sign = -ak if k % 2 else ak
        for j in range(n - k):
            out[k + j] += sign * math.comb(j + k - 1, j)
    return FormalSeries(tuple(out), f.var)


def _symmetric_polynomials(max_k: int) -> list[list[int]]:
    """P_k(y) = x^k + (x/(x-1))^k as polynomials in y, via P_k = y(P_{k-1} - P_{k-2})."""
    polys = [[2], [0, 1]]
    for _ in range(2, max_k + 1):
        prev, prev2 = polys[-1], polys[-2]
        m = max(len(prev), len(prev2))
        diff = [(prev[i] if i < len(prev) else 0) - (prev2[i] if i < len(prev2) else 0) for i in range(m)]
        polys.append([0] + diff)
    return polys


def to_symmetric_variable(s: FormalSeries, y_var: str = "y") -> FormalSeries:
    """Rewrite an invariant x-series S (S = S o w) as a series in y = x^2/(x-1).

    Uses y^k = (-1)^k sum_j C(k-1+j, j) x^(2k+j); matches coefficients at x^(2k)
    and verifies the remaining ones, which certifies the invariance of S.
    """
    n = s.truncation_order
    m = (n + 1) // 2  # y-coefficients 0..m-1 are determined
    b = [Fraction(0)] * m
    residual = list(s.coeffs)
    for k in range(m):
        bk = residual[2 * k] if k % 2 == 0 else -residual[2 * k]
        b[k] = bk
        if bk:
            sign_bk = -bk if k % 2 else bk
            if k == 0:
                residual[0] -= bk
            else:
                for j in range(n - 2 * k):
                    residual[2 * k + j] -= sign_bk * math.comb(k - 1 + j, j)
    if any(residual[: 2 * m - 1]):
        raise ValueError("series is not invariant under x -> x/(x-1)")
    return FormalSeries(tuple(b), y_var)


def symmetrize(f: FormalSeries, sign: str = "plus", y_var: str = "y") -> FormalSeries:
    """Plus/minus symmetrization of an x-series, expressed in y = x^2/(x-1).

    plus:  F+(y) = f(x) + f(x/(x-1)), via F+ = sum_k a_k P_k(y);
    minus: F-(y) = (x - x/(x-1)) (f(x) - f(x/(x-1))).
    """
    if sign == "plus":
        n = f.truncation_order
        m = (n + 1) // 2
        out = [Fraction(0)] * m
        polys = _symmetric_polynomials(min(n - 1, 2 * m - 1))
        for k, ak in enumerate(f.coeffs):
            if not ak or k >= len(polys):
                continue
            pk = polys[k]
            for d in range(min(len(pk), m)):
                if pk[d]:
                    out[d] += ak * pk[d]
        return FormalSeries(tuple(out), y_var)
    if sign == "minus":
        fw = mobius_x_over_x_minus_1(f)
        n = f.truncation_order
        # x - x/(x-1) = 2x + x^2 + x^3 + ...
        diff_map = FormalSeries(tuple([Fraction(0), Fraction(2)] + [Fraction(1)] * (n - 2)), f.var)
        s = diff_map * (f - fw)
        return to_symmetric_variable(s, y_var)
    raise ValueError(f"unknown symmetrization sign {sign!r}")


def y_of_x_series(order: int, var: str = "x") -> FormalSeries:
    """The series of y(x) = x^2/(x-1) = -x^2 - x^3 - ... to the given order."""
    c = [Fraction(0)] * order
    for k in range(2, order):
        c[k] = Fraction(-1)
    return FormalSeries(tuple(c), var)
