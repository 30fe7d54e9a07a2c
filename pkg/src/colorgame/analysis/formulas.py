"""Strategy constants and phase-dependent rate functions.

All logarithms are natural except log_b(np) with b = 1/(1 - p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def _exact(x) -> Fraction:
    # repr keeps decimal inputs such as 1.25 or 1.1 exact
    return x if isinstance(x, Fraction) else Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class Constants:
    alpha: Fraction
    xi: Fraction
    N: int
    H: tuple[Fraction, ...]

    @property
    def J(self) -> int:
        return len(self.H)

    def cascade(self, h) -> tuple[Fraction, Fraction]:
        """(L, c) with L = (h + 2 xi)/(2 xi) and c = 1/(L + 1)."""
        h = _exact(h)
        L = (h + 2 * self.xi) / (2 * self.xi)
        return L, 1 / (L + 1)

    def table(self) -> list[dict]:
        rows = []
        for j, h in enumerate(self.H, start=1):
            L, c = self.cascade(h)
            rows.append({"j": j, "h": float(h), "L": float(L), "c": float(c)})
        return rows


def constants(alpha) -> Constants:
    """xi = (1 - 1/alpha)/10, N = ceil(8/xi), and the phase grid H.

    H starts at 1/2 - xi, steps by xi, and stops at the first value
    >= 1/alpha + 2 xi.
    """
    a = _exact(alpha)
    if a <= 1:
        raise ValueError("alpha must exceed 1")
    xi = (1 - 1 / a) / 10
    N = math.ceil(8 / xi)
    h = Fraction(1, 2) - xi
    top = 1 / a + 2 * xi
    H = [h]
    while H[-1] < top:
        H.append(H[-1] + xi)
    return Constants(a, xi, N, tuple(H))


@dataclass(frozen=True)
class RateValues:
    n: int
    p: float
    alpha: float
    h: float
    b: float
    logb_np: float
    k: int
    beta: float
    gamma: float
    q: float


def logb_np(n: int, p: float) -> float:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if n * p <= 1:
        raise ValueError("need np > 1")
    return math.log(n * p) / -math.log1p(-p)


def num_colors(n: int, p: float, alpha: float) -> int:
    """k = ceil(alpha * n / log_b(np))."""
    return math.ceil(alpha * n / logb_np(n, p))


def rate_functions(n: int, p: float, alpha, h: float) -> RateValues:
    if n < 2:
        raise ValueError("n must be at least 2")
    lb = logb_np(n, p)
    xi = float(constants(alpha).xi)
    al = float(alpha)
    beta = al * xi * n * (n * p) ** (-h) / (10 * lb)
    gamma = 10 * n * math.log(n) / beta
    q = beta / math.log(n) ** 2
    return RateValues(n, p, al, float(h), 1 / (1 - p), lb, num_colors(n, p, al), beta, gamma, q)


def theory_anchors(n: int, p: float) -> dict[str, float]:
    """n/log_b(np) (game value) and n/(2 log_b(np)) (chromatic value)."""
    lb = logb_np(n, p)
    return {"game": n / lb, "chromatic": n / (2 * lb)}
