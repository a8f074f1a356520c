"""Pauli-string algebra and the GHZ-diagonal state family for three qubits.

Eight GHZ basis states simultaneously diagonalize the seven commuting
observables ZZI, ZIZ, IZZ, XXX, XYY, YXY, YYX.  A state of the family is
described either by eight mixing probabilities p (over the GHZ basis) or
by seven correlation coefficients r (expectations of the observables);
the two coordinate systems are related by an exact +-1 linear map.
"""

from __future__ import annotations

import numpy as np

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

PAULI_LABELS = "IXYZ"

# Operator carrying r_k (k = 1..7) in the diagonal expansion of rho.
R_OPERATORS = ("ZZI", "ZIZ", "IZZ", "XXX", "XYY", "YXY", "YYX")

# r = SIGNS @ p.  Row k holds the signs of p_1..p_8 in r_{k+1}.
SIGNS = np.array(
    [
        [+1, +1, +1, +1, -1, -1, -1, -1],
        [+1, +1, -1, -1, +1, +1, -1, -1],
        [+1, +1, -1, -1, -1, -1, +1, +1],
        [+1, -1, +1, -1, +1, -1, +1, -1],
        [-1, +1, +1, -1, +1, -1, -1, +1],
        [-1, +1, +1, -1, -1, +1, +1, -1],
        [-1, +1, -1, +1, +1, -1, +1, -1],
    ],
    dtype=np.int64,
)

# Character table of the family: first row all ones, then the sign rows.
# Satisfies H @ H.T == 8 * I exactly.
H_MATRIX = np.vstack([np.ones((1, 8), dtype=np.int64), SIGNS])

# Computational-basis index pairs (|abc>, |a~b~c~>) of the GHZ states; the
# basis index of |n1 n2 n3> is 4*n1 + 2*n2 + n3.
GHZ_PAIRS = ((0, 7), (1, 6), (2, 5), (3, 4))

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def pauli_matrix(labels: str) -> np.ndarray:
    """Kronecker product of three single-qubit Paulis, leftmost = qubit 1."""
    if len(labels) != 3 or any(c not in PAULI_LABELS for c in labels):
        raise ValueError(f"invalid Pauli string {labels!r}")
    m = PAULI_1Q[labels[0]]
    for c in labels[1:]:
        m = np.kron(m, PAULI_1Q[c])
    return m


def pauli_product(a: str, b: str) -> tuple[complex, str]:
    """Label-wise product a*b, returned as (phase, string) with phase in {+-1, +-i}."""
    table = {
        ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
        ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
        ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
        ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
    }
    phase = 1.0 + 0.0j
    out = []
    for ca, cb in zip(a, b):
        ph, c = table[(ca, cb)]
        phase *= ph
        out.append(c)
    return phase, "".join(out)


def ghz_basis() -> np.ndarray:
    """The eight GHZ basis vectors as rows of an 8x8 array.

    Row i (0-based) is |psi_{i+1}>: the states come in +/- pairs on the
    computational pairs (0,7), (1,6), (2,5), (3,4).
    """
    basis = np.zeros((8, 8), dtype=complex)
    for k, (lo, hi) in enumerate(GHZ_PAIRS):
        basis[2 * k, lo] = _SQRT_HALF
        basis[2 * k, hi] = _SQRT_HALF
        basis[2 * k + 1, lo] = _SQRT_HALF
        basis[2 * k + 1, hi] = -_SQRT_HALF
    return basis


def ghz_projectors() -> np.ndarray:
    """Stack of the eight rank-1 GHZ projectors, shape (8, 8, 8)."""
    basis = ghz_basis()
    return np.einsum("ki,kj->kij", basis, basis.conj())


def as_probs(p, tol: float = 1e-12) -> np.ndarray:
    """Validate and return a probability vector over the GHZ basis."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (8,):
        raise ValueError(f"expected 8 probabilities, got shape {arr.shape}")
    if np.any(arr < -tol) or np.any(arr > 1.0 + tol):
        raise ValueError(f"probabilities outside [0, 1]: {arr}")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {arr.sum()!r}, not 1")
    return arr


def as_rvec(r, tol: float = 1e-12) -> np.ndarray:
    """Validate and return a correlation vector r_1..r_7."""
    arr = np.asarray(r, dtype=float)
    if arr.shape != (7,):
        raise ValueError(f"expected 7 correlation coefficients, got shape {arr.shape}")
    if np.any(np.abs(arr) > 1.0 + tol):
        raise ValueError(f"correlation coefficients outside [-1, 1]: {arr}")
    return arr


def r_from_p(p) -> np.ndarray:
    """The seven signed sums taking mixing probabilities to correlations."""
    return SIGNS @ as_probs(p)


def p_from_r(r, tol: float = 1e-12) -> np.ndarray:
    """Invert r back to probabilities via p = H^T (1, r) / 8.

    Rejects r outside the image of the probability simplex (some p_i < 0).
    """
    arr = as_rvec(r)
    v = np.concatenate(([1.0], arr))
    p = (H_MATRIX.T @ v) / 8.0
    if np.any(p < -tol):
        raise ValueError(f"r vector leaves the simplex: min p = {p.min()}")
    return np.clip(p, 0.0, 1.0)


def density_from_p(p) -> np.ndarray:
    """Density matrix sum_i p_i |psi_i><psi_i| in the computational basis."""
    arr = as_probs(p)
    return np.tensordot(arr, ghz_projectors(), axes=(0, 0))


def density_from_r(r) -> np.ndarray:
    """Density matrix (1/8)[III + sum_k r_k O_k] with O_k from R_OPERATORS."""
    arr = as_rvec(r)
    rho = np.eye(8, dtype=complex)
    for rk, label in zip(arr, R_OPERATORS):
        rho += rk * pauli_matrix(label)
    return rho / 8.0


def densities_from_p_batch(ps: np.ndarray) -> np.ndarray:
    """Densities for a batch of probability vectors, shape (n, 8, 8)."""
    ps = np.asarray(ps, dtype=float)
    return np.tensordot(ps, ghz_projectors(), axes=(1, 0))


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)
