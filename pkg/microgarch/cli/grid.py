import math
from functools import lru_cache
from pathlib import Path

import lark
from lark import Lark, Transformer, v_args

from microgarch import exc

_THIS_DIR = Path(__file__).parent
_GRAMMAR_PATH = _THIS_DIR / "grid.lark"

# grid points are rounded to this many significant digits, so 0:0.6:0.2 ends at 0.6
_SIGNIFICANT = 12


@lru_cache(maxsize=1)
def build_grammar() -> Lark:
    with open(_GRAMMAR_PATH, "r") as h:
        return Lark(grammar=h, parser="earley")


def _tidy(value: float) -> float:
    return float(f"{value:.{_SIGNIFICANT}g}")


class _EmptyGrid(ValueError):
    pass


@v_args(inline=True)
class GridTransformer(Transformer):
    """turns a parsed grid into a list of floats"""

    def number(self, token) -> float:
        return float(token)

    def values(self, *numbers: float) -> list[float]:
        return list(numbers)

    def range(self, start: float, stop: float, step: float) -> list[float]:
        if step == 0 or (stop - start) * step < 0:
            raise _EmptyGrid("an empty range")
        # tolerate rounding in the step so that the stop value is included
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [_tidy(start + i * step) for i in range(count)]

    def linspace(self, start: float, stop: float, count: float) -> list[float]:
        if count < 1 or not count.is_integer():
            raise _EmptyGrid("a linspace without a positive integer count")
        n = int(count)
        if n == 1:
            return [start]
        step = (stop - start) / (n - 1)
        return [_tidy(start + i * step) for i in range(n - 1)] + [stop]


def parse_grid(spec: str) -> list[float]:
    """Parse a value grid: ``0,0.2,0.4``, ``0:0.6:0.2`` (stop included) or
    ``linspace(0.1, 1.5, 15)``.

    :param spec: The grid text.
    :raises GridSyntaxError: If the text is not a grid, or describes no values.
    :return: The values, in the order written.
    """
    try:
        tree = build_grammar().parse(spec)
    except lark.exceptions.UnexpectedInput as e:
        raise exc.GridSyntaxError(spec=spec) from e

    try:
        return GridTransformer().transform(tree)
    except lark.exceptions.VisitError as e:
        if isinstance(e.orig_exc, _EmptyGrid):
            raise exc.GridSyntaxError(spec=spec, reason=str(e.orig_exc)) from e
        raise


def parse_seeds(spec: str) -> list[int]:
    """Parse a seed list like ``1,2,3`` or ``0:29:1``.

    :raises GridSyntaxError: If a value is not a non-negative integer.
    """
    values = parse_grid(spec)
    if not all(v.is_integer() and v >= 0 for v in values):
        raise exc.GridSyntaxError(
            spec=spec, reason="not a list of non-negative integers"
        )
    return [int(v) for v in values]
