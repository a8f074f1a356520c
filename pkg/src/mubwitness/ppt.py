"""PPT polytope for GHZ-diagonal states: analytic inequalities and oracles.

Positivity of the three partial transposes is equivalent, on this family,
to 24 linear inequalities in the mixing probabilities, grouped as six
quadruples.  Both routes are implemented and cross-checked: the signed
sums, and a similarity-rotation (Jacobi) eigenvalue solver applied to the
partially transposed density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .pauli import as_probs, densities_from_p_batch, density_from_p, is_hermitian

# Quadruples (0-based indices into p) in the fixed report order; the four
# rows of each quadruple (a, b, c, d) are a+b+c-d, a+b-c+d, a-b+c+d, -a+b+c+d.
PPT_GROUPS = (
    (2, 3, 4, 5),
    (0, 1, 6, 7),
    (0, 1, 4, 5),
    (2, 3, 6, 7),
    (0, 1, 2, 3),
    (4, 5, 6, 7),
)
_QUAD_SIGNS = np.array(
    [[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]], dtype=np.int64
)

# Groups produced by transposing each qubit: qubit 1 -> groups 0, 1; etc.
GROUPS_BY_QUBIT = ((0, 1), (2, 3), (4, 5))


def inequality_matrix() -> np.ndarray:
    """The 24x8 integer matrix A with A @ p giving all inequality values."""
    a = np.zeros((24, 8), dtype=np.int64)
    row = 0
    for group in PPT_GROUPS:
        for signs in _QUAD_SIGNS:
            for s, idx in zip(signs, group):
                a[row, idx] = s
            row += 1
    return a


_INEQ_MATRIX = inequality_matrix()


@dataclass
class PptReport:
    """Outcome of the PPT test: 6x4 inequality values plus the eigen oracle."""

    quadruples: np.ndarray          # shape (6, 4), report order
    min_eigs: tuple[float, float, float]
    passed: bool
    tol: float

    @property
    def min_value(self) -> float:
        return float(self.quadruples.min())


def ppt_inequalities(p) -> np.ndarray:
    """All 24 inequality left-hand sides, shape (6, 4)."""
    arr = as_probs(p)
    return (_INEQ_MATRIX @ arr).reshape(6, 4)


def ppt_inequalities_batch(ps: np.ndarray) -> np.ndarray:
    """Inequality values for a batch of probability vectors, shape (n, 24)."""
    return np.asarray(ps, dtype=float) @ _INEQ_MATRIX.T


def partial_transpose(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Transpose the chosen qubit's indices (qubit in {1, 2, 3})."""
    if qubit not in (1, 2, 3):
        raise ValueError(f"qubit must be 1, 2 or 3, got {qubit}")
    t = np.asarray(rho).reshape(2, 2, 2, 2, 2, 2)
    axes = list(range(6))
    axes[qubit - 1], axes[qubit + 2] = axes[qubit + 2], axes[qubit - 1]
    return t.transpose(axes).reshape(8, 8)


def _jacobi_batch(mats: np.ndarray, sweeps: int = 14, tol: float = 1e-14) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian matrices by cyclic Jacobi rotations.

    Each sweep annihilates every off-diagonal pair once; convergence is
    quadratic and 8x8 inputs settle well before the sweep cap.
    Returns the sorted eigenvalues, shape (n, d).
    """
    a = np.array(mats, dtype=complex)
    if a.ndim == 2:
        a = a[None, :, :]
    n, d, _ = a.shape
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    for _ in range(sweeps):
        off = np.max(np.abs(a - np.einsum("nij,ij->nij", a, np.eye(d))))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                aabs = np.abs(apq)
                active = aabs > tol * scale * 1e-2
                if not np.any(active):
                    continue
                safe = np.where(active, aabs, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                tau = (aqq - app) / (2.0 * safe)
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(tau == 0.0, 1.0, t)  # 45-degree rotation when diagonal ties
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, :, p].copy()
                col_q = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * col_p - (s * np.conj(phase))[:, None] * col_q
                a[:, :, q] = (s * phase)[:, None] * col_p + c[:, None] * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
                a[:, q, :] = (s * np.conj(phase))[:, None] * row_p + c[:, None] * row_q
    eigs = np.sort(np.einsum("nii->ni", a).real, axis=1)
    return eigs


def jacobi_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of one Hermitian matrix via the Jacobi iteration."""
    if not is_hermitian(np.asarray(h), tol=1e-10):
        raise ValueError("matrix is not Hermitian within 1e-10")
    return _jacobi_batch(np.asarray(h, dtype=complex))[0]


def min_eigenvalue(h: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (Jacobi rotations)."""
    return float(jacobi_eigenvalues(h)[0])


def pt_min_eigenvalues(p) -> tuple[float, float, float]:
    """Minimal eigenvalue of rho^{T_q} for each qubit q."""
    rho = density_from_p(p)
    stack = np.stack([partial_transpose(rho, q) for q in (1, 2, 3)])
    eigs = _jacobi_batch(stack)
    return tuple(float(e[0]) for e in eigs)


def pt_min_eigenvalues_batch(ps: np.ndarray) -> np.ndarray:
    """Batch oracle: min eigenvalue per qubit, shape (n, 3)."""
    rhos = densities_from_p_batch(ps)
    n = rhos.shape[0]
    out = np.empty((n, 3))
    for k, qubit in enumerate((1, 2, 3)):
        t = rhos.reshape(n, 2, 2, 2, 2, 2, 2)
        axes = [0] + [i + 1 for i in range(6)]
        axes[qubit], axes[qubit + 3] = axes[qubit + 3], axes[qubit]
        pts = t.transpose(axes).reshape(n, 8, 8)
        out[:, k] = _jacobi_batch(pts)[:, 0]
    return out


def is_ppt(p, tol: float = 1e-9) -> PptReport:
    """Run the 24-inequality test and the eigenvalue oracle, cross-checked.

    Each qubit's min partial-transpose eigenvalue equals exactly half the
    minimum over that qubit's eight inequality values; a disagreement
    beyond tol signals an implementation bug and raises.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    quads = ppt_inequalities(p)
    min_eigs = pt_min_eigenvalues(p)
    for q, groups in enumerate(GROUPS_BY_QUBIT):
        analytic = min(quads[g].min() for g in groups) / 2.0
        if abs(min_eigs[q] - analytic) > tol:
            raise RuntimeError(
                f"PPT oracle disagreement on qubit {q + 1}: "
                f"eigenvalue {min_eigs[q]} vs inequalities {analytic}"
            )
    passed = bool(quads.min() >= -tol)
    return PptReport(quadruples=quads, min_eigs=min_eigs, passed=passed, tol=tol)


# ---------------------------------------------------------------------------
# Exact linear-programming feasibility (phase-1 simplex, integer pivoting)
# ---------------------------------------------------------------------------

_RELS = ("<=", ">=", "==")


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))  # exact binary expansion of the float


def _scaled_rows(constraints, n_vars: int, nonneg: bool):
    """Normalize constraints to integer rows (coeffs, rel, rhs).

    Free variables are split x = u - v with u, v >= 0 unless nonneg is set.
    """
    rows = []
    for coeffs, rel, rhs in constraints:
        if rel not in _RELS:
            raise ValueError(f"unknown relation {rel!r}")
        cf = [_to_fraction(c) for c in coeffs]
        if len(cf) != n_vars:
            raise ValueError("constraint arity mismatch")
        b = _to_fraction(rhs)
        if not nonneg:
            cf = [v for c in cf for v in (c, -c)]
        denom = 1
        for f in cf + [b]:
            denom = denom * f.denominator // math.gcd(denom, f.denominator)
        ints = [int(f * denom) for f in cf]
        rows.append((ints, rel, int(b * denom)))
    return rows


def _phase1_tableau(rows):
    """Build the integer phase-1 tableau; returns (tableau, basis, n_struct)."""
    m = len(rows)
    n_struct = len(rows[0][0]) if m else 0
    slack_rows = []
    # Normalize every row to rhs >= 0 first.
    normed = []
    for coeffs, rel, b in rows:
        if b < 0:
            coeffs = [-c for c in coeffs]
            b = -b
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        normed.append((coeffs, rel, b))
        slack_rows.append(rel)
    n_slack = sum(1 for r in slack_rows if r in ("<=", ">="))
    cols = n_struct + n_slack + m + 1  # structural, slacks, artificials, rhs
    tab = [[0] * cols for _ in range(m)]
    basis = [-1] * m
    art_cols = []
    si = 0
    for i, (coeffs, rel, b) in enumerate(normed):
        for j, c in enumerate(coeffs):
            tab[i][j] = c
        if rel == "<=":
            tab[i][n_struct + si] = 1
            basis[i] = n_struct + si
            si += 1
        elif rel == ">=":
            tab[i][n_struct + si] = -1
            si += 1
        if basis[i] < 0:
            col = n_struct + n_slack + i
            tab[i][col] = 1
            basis[i] = col
            art_cols.append(col)
        tab[i][-1] = b
    return tab, basis, art_cols


def _lp_phase1(constraints, n_vars: int, nonneg: bool):
    """Exact phase-1 simplex.  Returns a Fraction solution list or None.

    Integer pivoting (fraction-free Bareiss updates) keeps every tableau
    entry an exact integer; Bland's rule prevents cycling.
    """
    rows = _scaled_rows(constraints, n_vars, nonneg)
    if not rows:
        return [Fraction(0)] * n_vars
    tab, basis, art_cols = _phase1_tableau(rows)
    m = len(tab)
    ncols = len(tab[0])
    art_set = set(art_cols)
    # Objective row: reduced costs of minimizing the artificial sum.
    obj = [0] * ncols
    for i in range(m):
        if basis[i] in art_set:
            for j in range(ncols):
                obj[j] += tab[i][j]
    for col in art_cols:
        obj[col] -= 1
    den = 1
    while True:
        enter = -1
        for j in range(ncols - 1):
            if obj[j] > 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_num = best_den = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                num = tab[i][-1]
                if leave < 0 or num * best_den < best_num * a or (
                    num * best_den == best_num * a and basis[i] < basis[leave]
                ):
                    leave, best_num, best_den = i, num, a
        if leave < 0:
            raise RuntimeError("phase-1 objective unbounded (cannot happen)")
        piv = tab[leave][enter]
        new_tab = [row[:] for row in tab]
        for i in range(m):
            if i == leave:
                continue
            ti_e = tab[i][enter]
            row_l = tab[leave]
            row_i = tab[i]
            new_row = new_tab[i]
            for j in range(ncols):
                new_row[j] = (piv * row_i[j] - ti_e * row_l[j]) // den
        o_e = obj[enter]
        new_obj = [(piv * obj[j] - o_e * tab[leave][j]) // den for j in range(ncols)]
        tab, obj = new_tab, new_obj
        basis[leave] = enter
        den = piv
    if obj[-1] != 0:  # den-scaled artificial sum at optimum; nonzero = infeasible
        return None
    solution = [Fraction(0)] * (len(rows[0][0]))
    for i in range(m):
        if basis[i] < len(solution):
            solution[basis[i]] = Fraction(tab[i][-1], den)
    if nonneg:
        return solution[:n_vars]
    return [solution[2 * k] - solution[2 * k + 1] for k in range(n_vars)]


def lp_feasible(constraints, n_vars: int, nonneg: bool = False) -> bool:
    """True iff the affine system has a solution (exact rational pivoting).

    Constraints are (coefficients, relation, rhs) triples with relation one
    of "<=", ">=", "==".  Variables are free reals unless nonneg is set.
    """
    return _lp_phase1(constraints, n_vars, nonneg) is not None


def lp_feasible_point(constraints, n_vars: int, nonneg: bool = False):
    """A feasible point as a list of Fractions, or None if infeasible."""
    return _lp_phase1(constraints, n_vars, nonneg)


# ---------------------------------------------------------------------------
# Feasible-region projections
# ---------------------------------------------------------------------------


def _projection_constraints(plane: tuple[int, int], x: Fraction, y: Fraction):
    """PPT + simplex constraints over the six free probabilities.

    Variables are the probabilities not in `plane` (0-based), kept in
    ascending index order and treated as nonnegative.
    """
    a, b = plane
    free = [k for k in range(8) if k not in (a, b)]
    cons = []
    for row in _INEQ_MATRIX:
        coeffs = [Fraction(int(row[k])) for k in free]
        const = Fraction(int(row[a])) * x + Fraction(int(row[b])) * y
        cons.append((coeffs, ">=", -const))
    cons.append(([Fraction(1)] * len(free), "==", Fraction(1) - x - y))
    return cons, free


def _cell_feasible(plane, grid, i, j) -> bool:
    x, y = Fraction(i, grid), Fraction(j, grid)
    if x + y > 1:
        return False
    cons, free = _projection_constraints(plane, x, y)
    return lp_feasible(cons, len(free), nonneg=True)


def _row_witness(plane, grid, j):
    """A feasible x-value for row y = j/grid, or None if the row is empty.

    Solves one LP with the x-coordinate left free (as an extra variable).
    """
    a, b = plane
    y = Fraction(j, grid)
    free = [k for k in range(8) if k != b]  # includes the x coordinate
    cons = []
    for row in _INEQ_MATRIX:
        coeffs = [Fraction(int(row[k])) for k in free]
        cons.append((coeffs, ">=", -Fraction(int(row[b])) * y))
    cons.append(([Fraction(1)] * len(free), "==", Fraction(1) - y))
    sol = lp_feasible_point(cons, len(free), nonneg=True)
    if sol is None:
        return None
    return sol[free.index(a)]


def project_region(plane: tuple[int, int], grid: int, exhaustive: bool = False):
    """Feasible grid cells of the PPT region projected onto two coordinates.

    A cell (i, j), 0 <= i, j < grid, is classified by its lower-left corner
    (i/grid, j/grid); rational arithmetic makes the classification exact.
    The default method finds each row's feasible interval by binary search
    around an LP witness (the projection of a convex polytope is convex, so
    every row is an interval); `exhaustive` scans all cells instead.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    a, b = plane
    if not (0 <= a < 8 and 0 <= b < 8 and a != b):
        raise ValueError(f"invalid plane {plane}")
    cells = set()
    if exhaustive:
        for j in range(grid):
            for i in range(grid):
                if _cell_feasible(plane, grid, i, j):
                    cells.add((i, j))
        return cells
    for j in range(grid):
        witness = _row_witness(plane, grid, j)
        if witness is None:
            continue
        lo_seed = int(witness * grid)  # floor: witness is a nonneg Fraction
        seed = None
        for cand in (lo_seed, lo_seed + 1):
            if 0 <= cand < grid and _cell_feasible(plane, grid, cand, j):
                seed = cand
                break
        if seed is None:
            continue
        lo, hi = 0, seed
        while lo < hi:  # first feasible index in [0, seed]
            mid = (lo + hi) // 2
            if _cell_feasible(plane, grid, mid, j):
                hi = mid
            else:
                lo = mid + 1
        left = lo
        lo, hi = seed, grid - 1
        while lo < hi:  # last feasible index in [seed, grid-1]
            mid = (lo + hi + 1) // 2
            if _cell_feasible(plane, grid, mid, j):
                lo = mid
            else:
                hi = mid - 1
        right = lo
        for i in range(left, right + 1):
            cells.add((i, j))
    return cells


# ---------------------------------------------------------------------------
# The special boundary family p1 + p3 = 1/2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialFamilyParams:
    """Parameters of the boundary family: p3 = alpha*p4 + 1/4 on p1+p3 = 1/2."""

    alpha: float
    p4: float
    split5: float
    split7: float

    def validate(self, tol: float = 1e-12) -> None:
        if not -1.0 - tol <= self.alpha <= 0.5 + tol:
            raise ValueError(f"alpha {self.alpha} outside [-1, 1/2]")
        cap = 1.0 / (4.0 * (1.0 - self.alpha))
        if not -tol <= self.p4 <= cap + tol:
            raise ValueError(f"p4 {self.p4} outside [0, {cap}]")
        s = self.pair_sum
        for name, val in (("split5", self.split5), ("split7", self.split7)):
            if not -tol <= val <= s + tol:
                raise ValueError(f"{name} {val} outside [0, {s}]")

    @property
    def pair_sum(self) -> float:
        """Common value of p5 + p6 and p7 + p8."""
        return (self.alpha - 1.0) * self.p4 + 0.25


def special_family(params: SpecialFamilyParams) -> np.ndarray:
    """Probability vector of the special boundary family.

    Construction: p3 = alpha*p4 + 1/4, p1 = -alpha*p4 + 1/4,
    p2 = (1 - 2*alpha)*p4, and the remaining mass S = (alpha-1)*p4 + 1/4
    split as (split5, S - split5) and (split7, S - split7).
    """
    params.validate()
    alpha, p4 = params.alpha, params.p4
    s = params.pair_sum
    p = np.array(
        [
            -alpha * p4 + 0.25,
            (1.0 - 2.0 * alpha) * p4,
            alpha * p4 + 0.25,
            p4,
            params.split5,
            s - params.split5,
            params.split7,
            s - params.split7,
        ]
    )
    return as_probs(np.clip(p, 0.0, 1.0))
