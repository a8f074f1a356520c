"""End-to-end verdicts for GHZ-diagonal states.

A state is NPT, bound-entangled-detected (PPT but caught by an envelope
witness), separable-certified (an explicit convex decomposition into
manifestly separable pieces reconstructs it), or PPT-undecided.  The
certificate constructions cover: one pair of probabilities zero, three
pairs equal, and the three category separable branches together with the
separable edge of the category-1 triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import SIGNS, as_probs, density_from_p, ghz_projectors, r_from_p
from .ppt import PptReport, is_ppt, ppt_inequalities_batch
from .witness import (
    NonlinearFamilyId,
    all_family_ids,
    nonlinear_value,
    nonlinear_values_batch,
    product_state_vector,
    validated_ids,
)

VERDICT_NPT = "NPT"
VERDICT_BOUND = "bound-detected"
VERDICT_SEPARABLE = "separable-certified"
VERDICT_UNDECIDED = "ppt-undecided"

# Partition conjugate to each z index: these pairs combine with 1 +- r_i
# into category-1/3 equalities; the remaining four pairs give category 2.
_CONJ_PARTITION = {1: ((4, 7), (5, 6)), 2: ((4, 6), (5, 7)), 3: ((4, 5), (6, 7))}


def _build_relations():
    relations = []
    for i in (1, 2, 3):
        pair_a, pair_b = _CONJ_PARTITION[i]  # pair_a contains index 4
        others = [p for part in _CONJ_PARTITION.values() if part != _CONJ_PARTITION[i]
                  for p in part]
        for s in (1, -1):
            relations.append((1, s, i, pair_b, s))
            relations.append((1, s, i, pair_a, -s))
            relations.append((3, s, i, pair_a, s))
            relations.append((3, s, i, pair_b, -s))
            for pair in others:
                for t in (1, -1):
                    relations.append((2, s, i, pair, t))
    return tuple(relations)


CATEGORY_RELATIONS = _build_relations()


@dataclass(frozen=True)
class CategoryHit:
    """One satisfied category equality, e.g. 1+r1 = r4-r7."""

    category: int
    lhs_sign: int
    z_index: int
    pair: tuple[int, int]
    inner_sign: int
    residual: float

    @property
    def equality(self) -> str:
        sl = "+" if self.lhs_sign > 0 else "-"
        si = "+" if self.inner_sign > 0 else "-"
        return f"1{sl}r{self.z_index} = r{self.pair[0]}{si}r{self.pair[1]}"

    @property
    def witness_id(self) -> NonlinearFamilyId:
        """The envelope witness whose value turns negative off the branch."""
        for part in _CONJ_PARTITION.values():
            if self.pair in part:
                return NonlinearFamilyId(self.lhs_sign, self.z_index,
                                         self.inner_sign, part)
        raise AssertionError("pair not in any partition")


def category_of(p, tol: float = 1e-9) -> list[CategoryHit]:
    """All category equalities satisfied by the state within tol."""
    r = r_from_p(p)
    hits = []
    for cat, s, i, (j, k), t in CATEGORY_RELATIONS:
        residual = (1.0 + s * r[i - 1]) - (r[j - 1] + t * r[k - 1])
        if abs(residual) <= tol:
            hits.append(CategoryHit(cat, s, i, (j, k), t, float(residual)))
    hits.sort(key=lambda h: (h.category, h.z_index, -h.lhs_sign))
    return hits


def _require_ppt_cheap(p, tol: float) -> None:
    vals = ppt_inequalities_batch(np.asarray(p, dtype=float)[None, :])
    if vals.min() < -tol:
        raise ValueError("state is not PPT")


def detect_bound(p, tol: float = 1e-9):
    """Best (most negative) validated envelope witness, or None.

    Raises ValueError when called on a non-PPT state.
    """
    arr = as_probs(p)
    _require_ppt_cheap(arr, tol)
    r = SIGNS @ arr
    best_id, best_val = None, -tol
    for id_ in validated_ids():
        val = nonlinear_value(id_, r)
        if val < best_val:
            best_id, best_val = id_, val
    if best_id is None:
        return None
    return best_id, best_val


# ---------------------------------------------------------------------------
# Separable certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertTerm:
    weight: float
    description: str
    matrix: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class SeparableCertificate:
    terms: tuple[CertTerm, ...]
    reconstruction_error: float
    construction: str

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(t.weight for t in self.terms)


_MATCH_TOL = 1e-12


def _projectors():
    return ghz_projectors()


def _pair_mix(k: int) -> np.ndarray:
    """(|psi_{2k+1}><..| + |psi_{2k+2}><..|) / 2: a computational-pair mixture."""
    proj = _projectors()
    return (proj[2 * k] + proj[2 * k + 1]) / 2.0


def _coherence_state(k: int, sign: int) -> np.ndarray:
    """(III + sign*(P_odd - P_even))/8: a phase-averaged product mixture."""
    proj = _projectors()
    return (np.eye(8, dtype=complex) + sign * (proj[2 * k] - proj[2 * k + 1])) / 8.0


def _pair_complement(k: int) -> np.ndarray:
    """(III - P_odd - P_even)/6: the six remaining computational states."""
    proj = _projectors()
    return (np.eye(8, dtype=complex) - proj[2 * k] - proj[2 * k + 1]) / 6.0


def _basis_projector(idx: int) -> np.ndarray:
    m = np.zeros((8, 8), dtype=complex)
    m[idx, idx] = 1.0
    return m


def _product_average(angle_sets) -> np.ndarray:
    """Equal-weight average of explicit product-state projectors."""
    acc = np.zeros((8, 8), dtype=complex)
    for angles in angle_sets:
        v = product_state_vector(angles)
        acc += np.outer(v, v.conj())
    return acc / len(angle_sets)


def _equatorial_mix_a(phi0: float) -> np.ndarray:
    """Average of 8 equatorial products with phi2 = -phi1 (mod the pi branch).

    Carries coherence +1/8 on the (000,111) and (001,110) pairs and
    cos(2*phi0)/8 on the other two; diagonal is uniform.
    """
    half = math.pi / 2.0
    sets = []
    for phi in (phi0, -phi0, phi0 + math.pi, -phi0 + math.pi):
        sets.append((half, phi, half, -phi, half, 0.0))
        sets.append((half, phi, half, math.pi - phi, half, math.pi))
    return _product_average(sets)


def _equatorial_mix_b(phi0: float) -> np.ndarray:
    """Average of 8 equatorial products with phi3 = phi1 (mod the pi branch).

    Carries coherence +1/8 on (001,110) and (011,100) and cos(2*phi0)/8
    on (000,111) and (010,101); diagonal is uniform.
    """
    half = math.pi / 2.0
    sets = []
    for phi in (phi0, -phi0, phi0 + math.pi, -phi0 + math.pi):
        sets.append((half, phi, half, 0.0, half, phi))
        sets.append((half, phi, half, math.pi, half, phi - math.pi))
    return _product_average(sets)


def _pair_values(p: np.ndarray):
    return [(p[2 * k], p[2 * k + 1]) for k in range(4)]


def _try_case1(p: np.ndarray, mt: float):
    """One pair zero; PPT then forces the remaining pairs equal."""
    pairs = _pair_values(p)
    zero = next((k for k, (a, b) in enumerate(pairs) if a <= mt and b <= mt), None)
    if zero is None:
        return None
    terms = []
    for k, (a, b) in enumerate(pairs):
        if k == zero:
            continue
        if abs(a - b) > mt:
            return None
        w = a + b
        if w > 0.0:
            terms.append(CertTerm(w, f"pair-{k + 1} computational mixture", _pair_mix(k)))
    return "one pair zero", terms


def _try_case2(p: np.ndarray, mt: float):
    """At most one unequal pair; epsilon bookkeeping with both branches."""
    pairs = _pair_values(p)
    diffs = [abs(a - b) for a, b in pairs]
    unequal = [k for k in range(4) if diffs[k] > mt]
    if len(unequal) > 1:
        return None
    u = unequal[0] if unequal else int(np.argmax(diffs))
    hi, lo = (2 * u, 2 * u + 1) if p[2 * u] >= p[2 * u + 1] else (2 * u + 1, 2 * u)
    a, b = p[hi], p[lo]
    equal = sorted(
        (( (pa + pb) / 2.0, k) for k, (pa, pb) in enumerate(pairs) if k != u),
    )
    (q1, m1), (q2, m2), (q3, m3) = equal
    eps1 = (b + 2.0 * q1 - a) / 2.0
    if eps1 < -mt:
        return None  # would need a PPT violation
    eps1 = max(eps1, 0.0)
    sign = 1 if hi < lo else -1  # +: the odd (first) member carries the larger weight
    terms = []
    if eps1 <= b:
        if eps1 > 0.0:
            terms.append(CertTerm(8.0 * eps1, "maximally mixed", np.eye(8, dtype=complex) / 8.0))
        if b - eps1 > 0.0:
            terms.append(CertTerm(2.0 * (b - eps1),
                                  f"pair-{u + 1} computational mixture", _pair_mix(u)))
    else:
        if b > 0.0:
            terms.append(CertTerm(8.0 * b, "maximally mixed", np.eye(8, dtype=complex) / 8.0))
        terms.append(CertTerm(6.0 * (eps1 - b),
                              f"complement of pair {u + 1}", _pair_complement(u)))
    if q1 - eps1 > 0.0:
        terms.append(CertTerm(8.0 * (q1 - eps1),
                              f"pair-{u + 1} phase-averaged coherence",
                              _coherence_state(u, sign)))
    for q, k in ((q2, m2), (q3, m3)):
        if q - q1 > 0.0:
            terms.append(CertTerm(2.0 * (q - q1),
                                  f"pair-{k + 1} computational mixture", _pair_mix(k)))
    return "three pairs equal", terms


def _try_branch_cat1(p: np.ndarray, mt: float):
    """p2 = p4 = 0, p1 = p3, equal pair-3/pair-4 imbalance (r5 = r6)."""
    if p[1] > mt or p[3] > mt or abs(p[0] - p[2]) > mt:
        return None
    gamma5 = (p[4] - p[5]) / 2.0
    gamma7 = (p[6] - p[7]) / 2.0
    if abs(gamma5 - gamma7) > mt:
        return None
    u = (p[0] + p[2]) / 2.0
    gamma = (gamma5 + gamma7) / 2.0
    if abs(2.0 * gamma) > u + mt:
        return None
    terms = []
    if u > 0.0:
        t = min(1.0, max(-1.0, 2.0 * gamma / u))
        phi0 = math.acos(t) / 2.0
        terms.append(CertTerm(4.0 * u,
                              f"equatorial product average (z-antialigned 1-2, phi0={phi0:.6g})",
                              _equatorial_mix_a(phi0)))
    w34 = (p[4] + p[5]) / 2.0 - u / 2.0
    w78 = (p[6] + p[7]) / 2.0 - u / 2.0
    if min(w34, w78) < -mt:
        return None
    for w, idx, name in ((w34, 2, "|010>"), (w34, 5, "|101>"),
                         (w78, 3, "|011>"), (w78, 4, "|100>")):
        if w > 0.0:
            terms.append(CertTerm(w, f"basis state {name}", _basis_projector(idx)))
    return "category-1 branch (r5 = r6)", terms


def _try_branch_cat2(p: np.ndarray, mt: float):
    """p4 = 0, p3 = p1 + p2, p7 = p3 + p8, balanced cross pairs (r5 + r7 = 0)."""
    if p[3] > mt:
        return None
    q3 = p[2]
    if abs(q3 - p[0] - p[1]) > mt or abs(p[6] - q3 - p[7]) > mt:
        return None
    delta1 = p[0] - p[1]
    delta5 = p[4] - p[5]
    if abs(delta1 - delta5) > mt:
        return None
    delta = (delta1 + delta5) / 2.0
    if abs(delta) > q3 + mt:
        return None
    terms = []
    if q3 > 0.0:
        t = min(1.0, max(-1.0, delta / q3))
        phi0 = math.acos(t) / 2.0
        terms.append(CertTerm(4.0 * q3,
                              f"equatorial product average (x-aligned qubit 2, phi0={phi0:.6g})",
                              _equatorial_mix_b(phi0)))
    w34 = (p[4] + p[5]) / 2.0 - q3 / 2.0
    w78 = (p[6] + p[7]) / 2.0 - q3 / 2.0
    if min(w34, w78) < -mt:
        return None
    for w, idx, name in ((w34, 2, "|010>"), (w34, 5, "|101>"),
                         (w78, 3, "|011>"), (w78, 4, "|100>")):
        if w > 0.0:
            terms.append(CertTerm(w, f"basis state {name}", _basis_projector(idx)))
    return "category-2 branch (r5 + r7 = 0)", terms


def _try_branch_cat3(p: np.ndarray, mt: float):
    """Boundary family p1 + p3 = 1/2 with p5 = p7, p6 = p8 (r5 = r6)."""
    if abs(p[0] + p[2] - 0.5) > mt:
        return None
    s_candidates = (p[0] - p[1], p[2] - p[3], p[4] + p[5], p[6] + p[7])
    s = float(np.mean(s_candidates))
    if any(abs(c - s) > mt for c in s_candidates) or s < -mt:
        return None
    if abs(p[4] - p[6]) > mt or abs(p[5] - p[7]) > mt:
        return None
    terms = []
    if s > 0.0:
        t = min(1.0, max(-1.0, (p[4] - p[5]) / s))
        phi0 = math.acos(t) / 2.0
        terms.append(CertTerm(4.0 * s,
                              f"equatorial product average (z-aligned 1-2, phi0={phi0:.6g})",
                              _equatorial_mix_c(phi0)))
    w12 = (p[0] + p[1] - s) / 2.0
    w34 = (p[2] + p[3] - s) / 2.0
    if min(w12, w34) < -mt:
        return None
    for w, idx, name in ((w12, 0, "|000>"), (w12, 7, "|111>"),
                         (w34, 1, "|001>"), (w34, 6, "|110>")):
        if w > 0.0:
            terms.append(CertTerm(w, f"basis state {name}", _basis_projector(idx)))
    return "category-3 branch (r5 = r6)", terms


def _equatorial_mix_c(phi0: float) -> np.ndarray:
    """Like _equatorial_mix_a but with qubits 1, 2 z-aligned (theta2 = theta1).

    At theta = pi/2 the two coincide; kept separate for clarity of origin.
    """
    return _equatorial_mix_a(phi0)


_CERTIFICATE_BUILDERS = (
    _try_case1,
    _try_case2,
    _try_branch_cat1,
    _try_branch_cat2,
    _try_branch_cat3,
)


def certify_separable(p, tol: float = 1e-9, match_tol: float = _MATCH_TOL):
    """First verifying separable certificate, or None.

    Constructions are tried in a fixed order (pair-zero, three-pairs-equal,
    then the category branches); each candidate must reconstruct the state
    entrywise to 1e-10 with nonnegative weights summing to one.  A matched
    pattern that fails reconstruction raises, since the constructions are
    exact on their patterns.
    """
    arr = as_probs(p)
    _require_ppt_cheap(arr, tol)
    rho = density_from_p(arr)
    for builder in _CERTIFICATE_BUILDERS:
        out = builder(arr, match_tol)
        if out is None:
            continue
        name, terms = out
        weights = np.array([t.weight for t in terms])
        if weights.size == 0 or weights.min() < -1e-11:
            continue
        if abs(weights.sum() - 1.0) > 1e-10:
            raise RuntimeError(f"certificate '{name}' weights sum to {weights.sum()}")
        recon = sum(t.weight * t.matrix for t in terms)
        err = float(np.max(np.abs(recon - rho)))
        if err > 1e-10:
            raise RuntimeError(f"certificate '{name}' reconstruction error {err}")
        return SeparableCertificate(tuple(terms), err, name)
    return None


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    kind: str
    ppt: PptReport
    detection: tuple[NonlinearFamilyId, float] | None = None
    certificate: SeparableCertificate | None = None


def classify(p, tol: float = 1e-9) -> Verdict:
    """NPT / bound-detected / separable-certified / ppt-undecided."""
    arr = as_probs(p)
    report = is_ppt(arr, tol)
    if not report.passed:
        return Verdict(VERDICT_NPT, report)
    detection = detect_bound(arr, tol)
    if detection is not None:
        cert = certify_separable(arr, tol)
        if cert is not None:
            raise RuntimeError("state both detected and certified separable")
        return Verdict(VERDICT_BOUND, report, detection=detection)
    cert = certify_separable(arr, tol)
    if cert is not None:
        return Verdict(VERDICT_SEPARABLE, report, certificate=cert)
    return Verdict(VERDICT_UNDECIDED, report)


def classify_batch(ps: np.ndarray, tol: float = 1e-9, certify: bool = True):
    """Vectorized pipeline over many states.

    Returns (verdicts, witness_labels, witness_values): object/float arrays
    aligned with the input rows.  PPT here means the analytic inequalities;
    per-state `classify` additionally cross-checks the eigenvalue oracle.
    """
    ps = np.asarray(ps, dtype=float)
    n = ps.shape[0]
    ineq_min = ppt_inequalities_batch(ps).min(axis=1)
    ppt_mask = ineq_min >= -tol
    rs = ps @ SIGNS.T
    ids = all_family_ids()
    valid = set(validated_ids())
    cols = [i for i, id_ in enumerate(ids) if id_ in valid]
    table = nonlinear_values_batch(rs)[:, cols]
    argmin = np.argmin(table, axis=1)
    vmin = table[np.arange(n), argmin]
    detected = ppt_mask & (vmin < -tol)
    verdicts = np.where(ppt_mask, VERDICT_UNDECIDED, VERDICT_NPT).astype(object)
    labels = np.full(n, "", dtype=object)
    values = np.full(n, np.nan)
    for i in np.flatnonzero(detected):
        verdicts[i] = VERDICT_BOUND
        labels[i] = ids[cols[argmin[i]]].label
        values[i] = vmin[i]
    if certify:
        for i in np.flatnonzero(ppt_mask & ~detected):
            if certify_separable(ps[i], tol) is not None:
                verdicts[i] = VERDICT_SEPARABLE
    return verdicts, labels, values


# ---------------------------------------------------------------------------
# Families and constructors
# ---------------------------------------------------------------------------


def cat1_special(p1: float, p2: float) -> np.ndarray:
    """The triangular family (p1, p2, p, 0, p, 0, p, 0), p = (1-p1-p2)/3."""
    if p1 < 0 or p2 < 0 or p1 + p2 > 1.0 + 1e-12:
        raise ValueError("parameters outside the simplex")
    p = (1.0 - p1 - p2) / 3.0
    return as_probs(np.clip([p1, p2, p, 0.0, p, 0.0, p, 0.0], 0.0, 1.0))


def random_case1(rng: np.random.Generator) -> np.ndarray:
    """One random pair zeroed, the others paired equal."""
    zero = int(rng.integers(4))
    q = rng.dirichlet(np.ones(3)) / 2.0
    p = np.zeros(8)
    ks = [k for k in range(4) if k != zero]
    for k, val in zip(ks, q):
        p[2 * k] = p[2 * k + 1] = val
    return p


def random_case2(rng: np.random.Generator) -> np.ndarray:
    """One unequal pair, three equal pairs, PPT by rejection."""
    while True:
        masses = rng.dirichlet(np.ones(4))
        u = int(rng.integers(4))
        beta = rng.uniform(0.5, 1.0)
        a, b = masses[u] * beta, masses[u] * (1.0 - beta)
        qs = [masses[k] / 2.0 for k in range(4) if k != u]
        if a - b <= 2.0 * min(qs) + 1e-15:
            p = np.zeros(8)
            ks = [k for k in range(4) if k != u]
            for k, val in zip(ks, qs):
                p[2 * k] = p[2 * k + 1] = val
            p[2 * u], p[2 * u + 1] = a, b
            return p


def random_cat1_branch(rng: np.random.Generator) -> np.ndarray:
    """p2 = p4 = 0, p1 = p3, r5 = r6; PPT by construction."""
    while True:
        w = rng.dirichlet(np.ones(3))
        u, a, b = w[0] / 2.0, w[1] / 2.0, w[2] / 2.0
        if u <= 2.0 * a and u <= 2.0 * b:
            gmax = min(u, 2.0 * a, 2.0 * b) / 2.0
            gamma = rng.uniform(-1.0, 1.0) * gmax
            return np.array([u, 0, u, 0, a + gamma, a - gamma, b + gamma, b - gamma])


def random_cat2_branch(rng: np.random.Generator) -> np.ndarray:
    """p4 = 0, p3 = p1+p2, p7 = p3+p8, r5 + r7 = 0; PPT by construction."""
    while True:
        y = rng.dirichlet(np.ones(4))
        t = 1.0 / (3.0 * (y[0] + y[1]) + 2.0 * y[2] + y[3])
        p1, p2, p8, m = y[0] * t, y[1] * t, y[2] * t, y[3] * t
        p3 = p1 + p2
        if m >= p3:
            delta = p1 - p2
            return np.array([p1, p2, p3, 0.0,
                             (m + delta) / 2.0, (m - delta) / 2.0, p3 + p8, p8])


def random_cat3_branch(rng: np.random.Generator) -> np.ndarray:
    """Special boundary family with split5 = split7 (so r5 = r6)."""
    from .ppt import SpecialFamilyParams, special_family

    alpha = rng.uniform(-1.0, 0.5)
    p4 = rng.uniform(0.0, 1.0 / (4.0 * (1.0 - alpha)))
    s = (alpha - 1.0) * p4 + 0.25
    split = rng.uniform(0.0, s) if s > 0 else 0.0
    return special_family(SpecialFamilyParams(alpha, p4, split, split))


def random_fig4_edge(rng: np.random.Generator) -> np.ndarray:
    """The separable edge of the category-1 triangle."""
    p2 = rng.uniform(0.0, 0.5)
    p = (1.0 - 2.0 * p2) / 4.0
    return np.array([p2 + p, p2, p, 0.0, p, 0.0, p, 0.0])


SEPARABLE_CONSTRUCTORS = {
    "case1": random_case1,
    "case2": random_case2,
    "cat1-branch": random_cat1_branch,
    "cat2-branch": random_cat2_branch,
    "cat3-branch": random_cat3_branch,
    "fig4-edge": random_fig4_edge,
}
