"""Analytic test-function catalog.

Each entry supplies a vectorized evaluation, an analytic gradient, and
(where a sharp one is known) a Hajlasz upper gradient g satisfying
|f(x) - f(y)| <= |x - y| (g(x) + g(y)).  Names accepted anywhere a
function is chosen by string:

* ``coord:<i>`` / ``x1``, ``x2``, ``x3`` - coordinate projections
* ``const:<c>``           - constant (default 1)
* ``affine:<a,b,...,c>``  - sum a_i x_i + c (last entry is the constant)
* ``bump``                - C-infinity bump exp(1/(|x|^2-1)) on |x|<1
* ``powneg:<beta>``       - |x|^-beta, truncated (plateau) at |x| = 1e-3
* ``cusppow:<g>``         - sign(x2) * max(x1, 0)^g, the two-sheet witness
                            whose fractional energy blows up across a cusp
* ``angle``               - atan2(x1, -x2)/pi: smooth off the ray
                            {x1 = 0, x2 >= 0}, jumps by 2 across it
* ``distbdry``            - distance to the domain boundary (resolved at
                            sampling time; needs a domain, so it has no
                            standalone catalog entry)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

POWNEG_TRUNC = 1e-3


@dataclass(frozen=True)
class AnalyticFunction:
    name: str
    f: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hajlasz: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.f(pts)

    def gradient(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.grad(pts)

    def hajlasz_g(self, pts) -> Optional[np.ndarray]:
        if self.hajlasz is None:
            return None
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.hajlasz(pts)


def _coordinate(axis: int) -> AnalyticFunction:
    def f(p):
        return p[:, axis].copy()
    def g(p):
        out = np.zeros_like(p)
        out[:, axis] = 1.0
        return out
    def haj(p):
        # |x_a - y_a| <= |x-y| (1/2 + 1/2) on any domain
        return np.full(len(p), 0.5)
    return AnalyticFunction(f"x{axis + 1}", f, g, haj)


def _const(c: float) -> AnalyticFunction:
    def f(p):
        return np.full(len(p), c)
    def g(p):
        return np.zeros_like(p)
    def haj(p):
        return np.zeros(len(p))
    return AnalyticFunction(f"const:{c:g}", f, g, haj)


def _affine(coef) -> AnalyticFunction:
    a = np.asarray(coef[:-1], dtype=float)
    c = float(coef[-1])
    def f(p):
        return p[:, :len(a)] @ a + c
    def g(p):
        out = np.zeros_like(p)
        out[:, :len(a)] = a
        return out
    lip = float(np.linalg.norm(a))
    def haj(p):
        return np.full(len(p), 0.5 * lip)
    label = ",".join(f"{v:g}" for v in coef)
    return AnalyticFunction(f"affine:{label}", f, g, haj)


def _powneg(beta: float, r0: float = POWNEG_TRUNC) -> AnalyticFunction:
    # |x|^-beta with a plateau inside |x| <= r0 keeping values finite
    cap = r0 ** -beta
    def f(p):
        r = np.sqrt((p ** 2).sum(1))
        return np.where(r <= r0, cap, np.maximum(r, r0) ** -beta)
    def g(p):
        r = np.sqrt((p ** 2).sum(1))
        out = np.zeros_like(p)
        m = r > r0
        out[m] = p[m] * (-beta * r[m] ** (-beta - 2.0))[:, None]
        return out
    return AnalyticFunction(f"powneg:{beta:g}", f, g)


def _bump() -> AnalyticFunction:
    def f(p):
        r2 = (p ** 2).sum(1)
        out = np.zeros(len(p))
        m = r2 < 1.0
        out[m] = np.exp(1.0 / (r2[m] - 1.0))
        return out
    def g(p):
        r2 = (p ** 2).sum(1)
        out = np.zeros_like(p)
        m = r2 < 1.0
        scale = np.exp(1.0 / (r2[m] - 1.0)) * (-2.0 / (r2[m] - 1.0) ** 2)
        out[m] = p[m] * scale[:, None]
        return out
    return AnalyticFunction("bump", f, g)


def _cusppow(gamma: float) -> AnalyticFunction:
    # antisymmetric in x2 and Hoelder-gamma in x1: the two sheets disagree
    # by 2 x1^gamma across the half-line {x2 = 0, x1 > 0}
    def f(p):
        base = np.maximum(p[:, 0], 0.0) ** gamma
        return np.sign(p[:, 1]) * base
    def g(p):
        out = np.zeros_like(p)
        m = p[:, 0] > 0.0
        out[m, 0] = np.sign(p[m, 1]) * gamma * p[m, 0] ** (gamma - 1.0)
        return out
    return AnalyticFunction(f"cusppow:{gamma:g}", f, g)


def _angle() -> AnalyticFunction:
    def f(p):
        return np.arctan2(p[:, 0], -p[:, 1]) / np.pi
    def g(p):
        r2 = (p ** 2).sum(1)
        r2 = np.where(r2 == 0, np.inf, r2)
        out = np.empty_like(p)
        out[:, 0] = -p[:, 1] / r2 / np.pi
        out[:, 1] = p[:, 0] / r2 / np.pi
        return out
    return AnalyticFunction("angle", f, g)


def get_function(name: str) -> AnalyticFunction:
    base, _, arg = name.partition(":")
    if base in ("x1", "x2", "x3"):
        return _coordinate(int(base[1]) - 1)
    if base == "coord":
        return _coordinate(int(arg) - 1)
    if base == "const":
        return _const(float(arg) if arg else 1.0)
    if base == "affine":
        coef = [float(v) for v in arg.split(",")]
        if len(coef) < 2:
            raise ValueError("affine needs at least one slope and a constant")
        return _affine(coef)
    if base == "powneg":
        return _powneg(float(arg or 0.25))
    if base == "bump":
        return _bump()
    if base == "cusppow":
        return _cusppow(float(arg or 0.8))
    if base == "angle":
        return _angle()
    raise ValueError(f"unknown function {name!r}")
