"""Independent reference implementations the tests check the engine against.

The maths here is reimplemented from first principles: evidence fusion works
on explicit focal-set tables, and curve evaluation runs at 50 significant
digits via mpmath with no saturation shortcuts. Only the engine's public
data structures are imported, never its arithmetic, so agreement between
the two is meaningful.
"""

from __future__ import annotations

from typing import Mapping

import mpmath

from norm_engine.metrics import AifExpr, CbRef, ConstOne, CssmRef, NumExpr, ParamRef

T = frozenset({"true"})
F = frozenset({"false"})
FRAME = frozenset({"true", "false"})


def focal_sets(m_true: float, m_false: float) -> dict[frozenset, float]:
    """A binary-frame mass function as an explicit focal-set table."""
    return {T: m_true, F: m_false, FRAME: 1.0 - m_true - m_false}


def set_combine(a: Mapping[frozenset, float],
                b: Mapping[frozenset, float]) -> dict[frozenset, float] | None:
    """Dempster's rule by literal subset-intersection enumeration.

    Every focal-set pair contributes its mass product to the intersection;
    mass landing on the empty set is conflict, and the rest renormalises.
    Returns None when the conflict weight reaches 1.
    """
    accum: dict[frozenset, float] = {}
    conflict = 0.0
    for sa, ma in a.items():
        for sb, mb in b.items():
            product = ma * mb
            inter = sa & sb
            if inter:
                accum[inter] = accum.get(inter, 0.0) + product
            else:
                conflict += product
    if conflict >= 1.0:
        return None
    scale = 1.0 - conflict
    return {s: m / scale for s, m in accum.items()}


def mp_logistic(x: float, K: float, M: float, B: float) -> float:
    """K / (1 + e^(-B(x-M))) at 50 digits; mpmath never overflows, so no clip."""
    with mpmath.workdps(50):
        x, K, M, B = map(mpmath.mpf, (x, K, M, B))
        return float(K / (1 + mpmath.exp(-B * (x - M))))


def mp_richards(t: float, A: float, K: float, B: float, v: float,
                Q: float, M: float) -> float:
    """A + (K-A) / (1 + Q e^(-B(t-M)))^(1/v) at 50 digits."""
    with mpmath.workdps(50):
        t, A, K, B, v, Q, M = map(mpmath.mpf, (t, A, K, B, v, Q, M))
        return float(A + (K - A) / (1 + Q * mpmath.exp(-B * (t - M))) ** (1 / v))


def naive_eval_aif(expr: AifExpr, *, args: Mapping[str, float] | None = None,
                   metrics: Mapping | None = None,
                   supports: Mapping | None = None) -> float:
    """Evaluate a sum of logistic products entirely in 50-digit arithmetic.

    supports maps belief keys to plain support floats, mirroring how the
    engine reads belief variables.
    """
    args = args or {}
    metrics = metrics or {}
    supports = supports or {}

    def value_of(var) -> float:
        if isinstance(var, ConstOne):
            return 1.0
        if isinstance(var, ParamRef):
            return args[var.name]
        if isinstance(var, CssmRef):
            return metrics[var.key]
        if isinstance(var, CbRef):
            return supports[var.key]
        raise TypeError(f"unknown variable kind {type(var).__name__}")

    def num(numexpr: NumExpr) -> mpmath.mpf:
        total = mpmath.mpf(0)
        for atom in numexpr.atoms:
            part = atom.const if atom.const is not None else args[atom.param]
            total += atom.sign * mpmath.mpf(part)
        return total

    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for term in expr.terms:
            product = mpmath.mpf(1)
            for comp in term:
                x = mpmath.mpf(value_of(comp.var))
                product *= num(comp.K) / (1 + mpmath.exp(-num(comp.B) * (x - num(comp.M))))
            total += product
        return float(total)


def term_magnitude(expr: AifExpr, *, args: Mapping[str, float] | None = None,
                   metrics: Mapping | None = None,
                   supports: Mapping | None = None) -> float:
    """Sum of the absolute term values; the scale for mixed tolerances.

    Two correct evaluators may disagree in the last float bits of each term,
    so comparisons are made relative to this magnitude rather than to the
    possibly-cancelled total.
    """
    total = 0.0
    for term in expr.terms:
        one_term = AifExpr(terms=(term,))
        total += abs(naive_eval_aif(one_term, args=args, metrics=metrics,
                                    supports=supports))
    return total
