"""Seeded numeric evaluation at random rational points."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..algebra.bundle import BundleSpec
from ..algebra.expr import Expr, JetVariable, variable_key


@dataclass(frozen=True)
class NumericOracle:
    """Evaluates expressions at ``points`` seeded rational points.

    Point k assigns every variable a value drawn from ``Random(seed, k)``
    in printing order, so a given variable set always gets the same values.
    """

    points: int = 20
    seed: int = 0
    max_value: int = 7

    def sample(self, variables: Iterable[JetVariable], index: int, spec: BundleSpec) -> dict[JetVariable, Fraction]:
        rng = random.Random(self.seed * 1_000_003 + index)
        point: dict[JetVariable, Fraction] = {}
        for var in sorted(variables, key=lambda v: variable_key(spec, v)):
            point[var] = Fraction(rng.randint(-self.max_value, self.max_value), rng.randint(1, self.max_value))
        return point

    def sum_vanishes(self, summands: Sequence[Expr]) -> bool:
        """Whether the summands, evaluated separately, add up to 0 at every point."""
        if not summands:
            return True
        spec = summands[0].spec
        variables: set[JetVariable] = set()
        for term in summands:
            variables |= term.variables()
        for index in range(self.points):
            point = self.sample(variables, index, spec)
            if sum((term.eval_at(point) for term in summands), Fraction(0)) != 0:
                return False
        return True

    def nonzero_somewhere(self, exprs: Sequence[Expr]) -> bool:
        """Whether some expression evaluates nonzero at some point."""
        for expr in exprs:
            if expr.is_zero():
                continue
            for index in range(self.points):
                if expr.eval_at(self.sample(expr.variables(), index, expr.spec)) != 0:
                    return True
        return False
