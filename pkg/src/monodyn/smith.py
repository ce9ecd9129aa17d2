"""Smith normal form over the integers, with unimodular transforms.

``smith_normal_form(M)`` returns ``(U, D, V)`` with ``U @ M @ V == D``,
``|det U| == |det V| == 1``, ``D`` diagonal with nonnegative entries, and each
diagonal entry dividing the next.  The transforms are tracked through every
elementary operation, which is what the shift-equivalence layer needs to solve
integer linear systems and extract kernels.
"""

from __future__ import annotations

from .errors import ShapeError
from .matrix import IntMatrix, det


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    rows, cols = m.rows, m.cols
    a = m.to_rows()
    u = IntMatrix.identity(rows).to_rows()
    v = IntMatrix.identity(cols).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):
        # row dst += k * row src
        arow, urow = a[src], u[src]
        for idx in range(cols):
            a[dst][idx] += k * arow[idx]
        for idx in range(rows):
            u[dst][idx] += k * urow[idx]

    def add_col(src, dst, k):
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    n = min(rows, cols)
    for t in range(n):
        while True:
            # Smallest nonzero |entry| in the trailing submatrix becomes the pivot.
            pivot = None
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = a[i][j]
                    if x != 0 and (best is None or abs(x) < best):
                        best = abs(x)
                        pivot = (i, j)
            if pivot is None:
                break
            pi, pj = pivot
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            d = a[t][t]

            dirty = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // d
                    if q:
                        add_row(t, i, -q)
                    if a[i][t] != 0:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // d
                    if q:
                        add_col(t, j, -q)
                    if a[t][j] != 0:
                        dirty = True
            if dirty:
                continue  # remainders became new, smaller pivot candidates

            # Row and column are clear; enforce divisibility of the rest.
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % d != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)  # drags a non-multiple into the pivot row

        if a[t][t] < 0:
            negate_row(t)

    return (
        IntMatrix.from_rows(u),
        IntMatrix.from_rows(a),
        IntMatrix.from_rows(v),
    )


def invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith normal form (length ``min(rows, cols)``)."""
    _, d, _ = smith_normal_form(m)
    return tuple(d.at(i, i) for i in range(min(m.rows, m.cols)))


def is_unimodular(m: IntMatrix) -> bool:
    return m.is_square and abs(det(m)) == 1


def integer_kernel_basis(m: IntMatrix) -> list[tuple[int, ...]]:
    """Basis of the lattice of integer column vectors x with M x = 0."""
    _, d, v = smith_normal_form(m)
    n = min(m.rows, m.cols)
    basis = []
    for j in range(m.cols):
        if j >= n or d.at(j, j) == 0:
            basis.append(tuple(v.at(i, j) for i in range(m.cols)))
    return basis


class IntegerLinearSolver:
    """Precomputed Smith decomposition of M for repeated ``M x = b`` queries."""

    def __init__(self, m: IntMatrix):
        self.m = m
        self.u, self.d, self.v = smith_normal_form(m)

    def solve(self, b: tuple[int, ...]) -> tuple[int, ...] | None:
        """One integer solution, or None when none exists."""
        m = self.m
        if len(b) != m.rows:
            raise ShapeError("right hand side length does not match matrix rows")
        y = tuple(
            sum(self.u.at(i, k) * b[k] for k in range(m.rows)) for i in range(m.rows)
        )
        z = [0] * m.cols
        n = min(m.rows, m.cols)
        for i in range(m.rows):
            di = self.d.at(i, i) if i < n else 0
            if di == 0:
                if y[i] != 0:
                    return None
            else:
                if y[i] % di != 0:
                    return None
                if i < m.cols:
                    z[i] = y[i] // di
        return tuple(
            sum(self.v.at(i, k) * z[k] for k in range(m.cols)) for i in range(m.cols)
        )


def solve_integer_column(m: IntMatrix, b: tuple[int, ...]) -> tuple[int, ...] | None:
    """One integer solution of M x = b, or None when no integer solution exists."""
    return IntegerLinearSolver(m).solve(b)
