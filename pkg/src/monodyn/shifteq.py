"""Certificates, bounded searches, and invariants for shift equivalence of
nonnegative integer matrices.

The verifiers are exact.  The searches are bounded and report the exhausted
bounds on failure; a failed search never claims non-equivalence.  Definite
negative verdicts come only from the invariant layer: the cokernel of I - A
(its invariant factors plus free rank) and the characteristic polynomial with
all factors of t stripped are both preserved by every chain of elementary
moves, so a mismatch is a genuine obstruction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ShapeError
from .matrix import IntMatrix, charpoly, kron
from .smith import integer_kernel_basis, invariant_factors


@dataclass(frozen=True)
class ESWitness:
    """Factorization pair: A = R S and B = S R."""

    r: IntMatrix
    s: IntMatrix


@dataclass(frozen=True)
class SEWitness:
    """Lag-l witness: A^l = R S, B^l = S R, A R = R B, S A = B S."""

    r: IntMatrix
    s: IntMatrix
    lag: int


@dataclass(frozen=True)
class SSEChain:
    """Matrices m_0 .. m_k with one elementary witness per consecutive pair."""

    matrices: tuple[IntMatrix, ...]
    witnesses: tuple[ESWitness, ...]

    def __post_init__(self):
        if len(self.matrices) != len(self.witnesses) + 1:
            raise ShapeError("chain needs exactly one witness per link")

    @property
    def length(self) -> int:
        return len(self.witnesses)


@dataclass
class SearchExhausted:
    """Outcome of a bounded search that found nothing within its bounds."""

    bounds: dict[str, int]
    obstruction: "InvariantReport | None" = None


@dataclass(frozen=True)
class InvariantReport:
    bf_factors_a: tuple[int, ...]  # nontrivial invariant factors of I - A
    bf_free_rank_a: int
    bf_factors_b: tuple[int, ...]
    bf_free_rank_b: int
    charpoly_core_a: tuple[int, ...]  # descending coefficients, t-factors stripped
    charpoly_core_b: tuple[int, ...]
    verdict: str  # "obstruction" | "no_obstruction"


def _check_nonneg(*ms: IntMatrix):
    for m in ms:
        if not m.is_nonnegative:
            raise ShapeError("shift-equivalence matrices must be nonnegative")


def verify_elementary(a: IntMatrix, b: IntMatrix, w: ESWitness) -> bool:
    """True iff a = R S and b = S R hold exactly."""
    _check_nonneg(a, b, w.r, w.s)
    if not (a.is_square and b.is_square):
        raise ShapeError("elementary shift equivalence needs square matrices")
    if w.r.rows != a.rows or w.s.cols != a.cols:
        raise ShapeError("witness R, S shapes do not compose to A")
    if w.s.rows != b.rows or w.r.cols != b.cols:
        raise ShapeError("witness S, R shapes do not compose to B")
    return w.r @ w.s == a and w.s @ w.r == b


def verify_sse_chain(chain: SSEChain) -> tuple[bool, int | None]:
    """Checks every link; returns (ok, first failing link index)."""
    for i, w in enumerate(chain.witnesses):
        if not verify_elementary(chain.matrices[i], chain.matrices[i + 1], w):
            return False, i
    return True, None


def verify_se(a: IntMatrix, b: IntMatrix, w: SEWitness) -> bool:
    """True iff all four lag-l equations hold."""
    _check_nonneg(a, b, w.r, w.s)
    if w.lag < 1:
        raise ShapeError("lag must be >= 1")
    if w.r.rows != a.rows or w.r.cols != b.cols:
        raise ShapeError("witness R must be |A| x |B|")
    if w.s.rows != b.rows or w.s.cols != a.cols:
        raise ShapeError("witness S must be |B| x |A|")
    return (
        a.pow(w.lag) == w.r @ w.s
        and b.pow(w.lag) == w.s @ w.r
        and a @ w.r == w.r @ b
        and w.s @ a == b @ w.s
    )


def _strip_t_factors(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def bowen_franks(a: IntMatrix) -> tuple[tuple[int, ...], int]:
    """Nontrivial invariant factors and free rank of coker(I - A)."""
    if not a.is_square:
        raise ShapeError("square matrix required")
    diag = invariant_factors(IntMatrix.identity(a.rows).sub(a))
    factors = tuple(d for d in diag if d > 1)
    free_rank = sum(1 for d in diag if d == 0)
    return factors, free_rank


def invariants_report(a: IntMatrix, b: IntMatrix) -> InvariantReport:
    fa, ra = bowen_franks(a)
    fb, rb = bowen_franks(b)
    ca = _strip_t_factors(charpoly(a))
    cb = _strip_t_factors(charpoly(b))
    same = fa == fb and ra == rb and ca == cb
    return InvariantReport(
        bf_factors_a=fa,
        bf_free_rank_a=ra,
        bf_factors_b=fb,
        bf_free_rank_b=rb,
        charpoly_core_a=ca,
        charpoly_core_b=cb,
        verdict="no_obstruction" if same else "obstruction",
    )


def permutation_canonical(m: IntMatrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least entry tuple of P m P^T over all simultaneous
    row/column permutations P, together with one permutation realizing it."""
    if not m.is_square:
        raise ShapeError("square matrix required")
    n = m.rows
    best = None
    best_perm = None
    for perm in itertools.permutations(range(n)):
        candidate = tuple(m.at(perm[i], perm[j]) for i in range(n) for j in range(n))
        if best is None or candidate < best:
            best = candidate
            best_perm = perm
    return best, best_perm


def apply_permutation(m: IntMatrix, perm: tuple[int, ...]) -> IntMatrix:
    """P m P^T where row i of the result is row perm[i] of m."""
    n = m.rows
    return IntMatrix(n, n, tuple(m.at(perm[i], perm[j]) for i in range(n) for j in range(n)))


def _permutation_matrix(perm: tuple[int, ...]) -> IntMatrix:
    n = len(perm)
    return IntMatrix(n, n, tuple(1 if j == perm[i] else 0 for i in range(n) for j in range(n)))


def _factorizations(m: IntMatrix, inner_dim: int):
    """All pairs (R, S) of nonnegative matrices with R S = m, R of shape
    n x inner_dim, entries bounded by max(m), in lexicographic order of R
    then of S's columns."""
    n = m.rows
    bound = max(m.max_entry(), 0)
    cols_m = [[m.at(i, j) for i in range(n)] for j in range(n)]

    def solve_column(r_rows, target):
        # All s in [0, bound]^d with sum_k r_rows[i][k] * s[k] = target[i].
        d = inner_dim
        solutions = []
        s = [0] * d

        def rec(k, partial):
            if k == d:
                if partial == target:
                    solutions.append(tuple(s))
                return
            # Remaining capacity check per row.
            for val in range(bound + 1):
                nxt = [partial[i] + r_rows[i][k] * val for i in range(n)]
                if any(nxt[i] > target[i] for i in range(n)):
                    break  # larger val only grows the overshoot
                rest = [
                    sum(r_rows[i][kk] for kk in range(k + 1, d)) * bound for i in range(n)
                ]
                if any(nxt[i] + rest[i] < target[i] for i in range(n)):
                    continue
                s[k] = val
                rec(k + 1, nxt)
            s[k] = 0

        rec(0, [0] * n)
        return solutions

    for flat in itertools.product(range(bound + 1), repeat=n * inner_dim):
        r_rows = [list(flat[i * inner_dim : (i + 1) * inner_dim]) for i in range(n)]
        per_column = []
        feasible = True
        for j in range(n):
            sols = solve_column(r_rows, cols_m[j])
            if not sols:
                feasible = False
                break
            per_column.append(sols)
        if not feasible:
            continue
        r = IntMatrix.from_rows(r_rows)
        for combo in itertools.product(*per_column):
            s_rows = [[combo[j][k] for j in range(n)] for k in range(inner_dim)]
            yield r, IntMatrix.from_rows(s_rows)


def sse_search(
    a: IntMatrix,
    b: IntMatrix,
    max_depth: int = 6,
    max_inner_dim: int = 3,
) -> SSEChain | SearchExhausted:
    """Breadth-first search over elementary moves from A toward B.

    Frontier matrices are deduplicated up to simultaneous row/column
    permutation, which preserves both the equivalence class and
    nonnegativity; a hit on a permuted copy of B is completed by one extra
    permutation link so the returned chain always verifies exactly.
    """
    _check_nonneg(a, b)
    if not (a.is_square and b.is_square):
        raise ShapeError("square matrices required")
    bounds = {"max_depth": max_depth, "max_inner_dim": max_inner_dim}
    if a == b:
        return SSEChain((a,), ())
    canon_b, _ = permutation_canonical(b)

    def perm_link(m: IntMatrix) -> tuple[IntMatrix, ESWitness] | None:
        # One elementary move m -> b via a permutation: m = (m P^T) P and
        # P m P^T = b.
        for perm in itertools.permutations(range(m.rows)):
            if apply_permutation(m, perm) == b:
                p = _permutation_matrix(perm)
                r = m @ p.transpose()
                return b, ESWitness(r, p)
        return None

    start_key, _ = permutation_canonical(a)
    visited = {(a.rows, start_key)}
    frontier: list[tuple[IntMatrix, tuple[IntMatrix, ...], tuple[ESWitness, ...]]] = [
        (a, (a,), ())
    ]
    for depth in range(1, max_depth + 1):
        next_frontier = []
        for m, mats, wits in frontier:
            for inner in range(1, max_inner_dim + 1):
                for r, s in _factorizations(m, inner):
                    succ = s @ r
                    witness = ESWitness(r, s)
                    if succ == b:
                        return SSEChain(mats + (succ,), wits + (witness,))
                    key_tuple, _ = permutation_canonical(succ)
                    key = (succ.rows, key_tuple)
                    if key == (b.rows, canon_b) and depth + 1 <= max_depth:
                        link = perm_link(succ)
                        if link is not None:
                            final, pw = link
                            return SSEChain(
                                mats + (succ, final), wits + (witness, pw)
                            )
                    if key not in visited:
                        visited.add(key)
                        next_frontier.append((succ, mats + (succ,), wits + (witness,)))
        frontier = next_frontier
    return SearchExhausted(bounds=bounds)


def se_search(
    a: IntMatrix,
    b: IntMatrix,
    max_lag: int = 4,
    coeff_bound: int = 2,
    *,
    candidate_cap: int = 250_000,
) -> SEWitness | SearchExhausted:
    """Solve the intertwining equations over the integers, then look for
    entrywise-nonnegative combinations that factor the matrix powers.

    The kernel of the linear map R -> A R - R B is computed exactly; R and S
    candidates are integer combinations of kernel basis vectors with
    coefficients bounded by coeff_bound.  An invariant obstruction short
    circuits the search, since no witness can exist past one.
    """
    _check_nonneg(a, b)
    if not (a.is_square and b.is_square):
        raise ShapeError("square matrices required")
    bounds = {"max_lag": max_lag, "coeff_bound": coeff_bound}
    report = invariants_report(a, b)
    if report.verdict == "obstruction":
        return SearchExhausted(bounds=bounds, obstruction=report)
    if a == b:
        return SEWitness(r=a, s=IntMatrix.identity(a.rows), lag=1)
    n, m = a.rows, b.rows

    def nonneg_candidates(kernel_map: IntMatrix, rows: int, cols: int) -> list[IntMatrix]:
        basis = integer_kernel_basis(kernel_map)
        if not basis:
            return []
        if (2 * coeff_bound + 1) ** len(basis) > candidate_cap:
            return []
        out = []
        seen = set()
        for coeffs in itertools.product(
            range(-coeff_bound, coeff_bound + 1), repeat=len(basis)
        ):
            vec = [0] * (rows * cols)
            for c, bvec in zip(coeffs, basis):
                if c:
                    for i, x in enumerate(bvec):
                        vec[i] += c * x
            t = tuple(vec)
            if t in seen or all(x == 0 for x in t) or any(x < 0 for x in t):
                continue
            seen.add(t)
            out.append(IntMatrix(rows, cols, t))
        return out

    # vec is row-major: vec(A R) = (A kron I) vec(R), vec(R B) = (I kron B^T) vec(R).
    k_r = kron(a, IntMatrix.identity(m)).sub(kron(IntMatrix.identity(n), b.transpose()))
    k_s = kron(IntMatrix.identity(m), a.transpose()).sub(kron(b, IntMatrix.identity(n)))
    rs = nonneg_candidates(k_r, n, m)
    ss = nonneg_candidates(k_s, m, n)
    for lag in range(1, max_lag + 1):
        a_pow = a.pow(lag)
        b_pow = b.pow(lag)
        for r in rs:
            for s in ss:
                if r @ s == a_pow and s @ r == b_pow:
                    return SEWitness(r=r, s=s, lag=lag)
    return SearchExhausted(bounds=bounds)
