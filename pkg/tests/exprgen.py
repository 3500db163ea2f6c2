"""Seeded random generator of update-function expressions.

Coefficient ranges are kept moderate (|B| <= 20, |M| <= 6) so a float
evaluator and a 50-digit evaluator stay within mixed tolerance 1e-9 of each
other; wilder coefficients only test the saturation clip, which has its own
dedicated tests.
"""

from __future__ import annotations

import random

from norm_engine.metrics import (AifExpr, ConstOne, LogisticComponent, NumAtom,
                                 NumExpr, ParamRef)

PARAM_NAMES = ("x", "y", "t")


def random_args(rng: random.Random) -> dict[str, float]:
    return {"x": rng.uniform(0.0, 1.0), "y": rng.uniform(0.0, 1.0),
            "t": rng.uniform(0.0, 20.0)}


def random_numexpr(rng: random.Random, lo: float, hi: float) -> NumExpr:
    atoms = [NumAtom(rng.choice((1, -1)), const=round(rng.uniform(lo, hi), 4))]
    if rng.random() < 0.3:
        atoms.append(NumAtom(rng.choice((1, -1)), param=rng.choice(PARAM_NAMES)))
    rng.shuffle(atoms)
    return NumExpr(tuple(atoms))


def random_var(rng: random.Random):
    if rng.random() < 0.4:
        return ConstOne()
    return ParamRef(rng.choice(PARAM_NAMES))


def random_expr(rng: random.Random) -> tuple[AifExpr, dict[str, float]]:
    """One random sum-of-products expression plus matching action args."""
    terms = []
    for _ in range(rng.randint(1, 3)):
        terms.append(tuple(
            LogisticComponent(var=random_var(rng),
                              K=random_numexpr(rng, -50.0, 50.0),
                              M=random_numexpr(rng, -6.0, 6.0),
                              B=random_numexpr(rng, -20.0, 20.0))
            for _ in range(rng.randint(1, 3))))
    return AifExpr(tuple(terms)), random_args(rng)
