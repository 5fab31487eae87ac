"""Dense simplex for small linear programs.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``, the only form the
capacity computation needs. The slack basis is immediately feasible, and
Bland's pivoting rule guarantees termination on the highly degenerate bases
these programs produce. Arithmetic is either float with a small tolerance or
exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import UmwError


class UnboundedProgram(UmwError):
    """The feasible region is unbounded in the objective direction."""


def solve_lp_max(
    c: Sequence,
    a_rows: Sequence[Sequence],
    b: Sequence,
    *,
    exact: bool = False,
    tol: float = 1e-9,
):
    """Maximize ``c.x`` over ``A x <= b, x >= 0``; returns ``(value, x)``.

    With ``exact=True`` all arithmetic is rational and ``tol`` is ignored.
    """
    m = len(a_rows)
    n = len(c)
    if len(b) != m:
        raise ValueError("A and b dimensions disagree")
    if exact:
        conv = Fraction
        zero = Fraction(0)
        eps = Fraction(0)
    else:
        conv = float
        zero = 0.0
        eps = tol

    width = n + m + 1
    rows = []
    for i, arow in enumerate(a_rows):
        if len(arow) != n:
            raise ValueError(f"row {i} has {len(arow)} entries, expected {n}")
        rhs = conv(b[i])
        if rhs < zero:
            raise ValueError("right-hand sides must be nonnegative")
        row = [conv(x) for x in arow] + [zero] * m + [rhs]
        row[n + i] = conv(1)
        rows.append(row)
    # obj[j] holds the reduced cost of column j; obj[-1] accumulates -value.
    obj = [conv(x) for x in c] + [zero] * (m + 1)
    basis = list(range(n, n + m))

    while True:
        enter = -1
        for j in range(n + m):
            if obj[j] > eps:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_ratio = None
        for i in range(m):
            coef = rows[i][enter]
            if coef > eps:
                ratio = rows[i][-1] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise UnboundedProgram("objective unbounded above")

        pivot_row = rows[leave]
        pivot = pivot_row[enter]
        for j in range(width):
            pivot_row[j] /= pivot
        for i in range(m):
            if i == leave:
                continue
            factor = rows[i][enter]
            if factor != zero:
                row = rows[i]
                for j in range(width):
                    row[j] -= factor * pivot_row[j]
        factor = obj[enter]
        if factor != zero:
            for j in range(width):
                obj[j] -= factor * pivot_row[j]
        basis[leave] = enter

    x = [zero] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = rows[i][-1]
    return -obj[-1], x
