"""Command-line interface: classify states, scan regions, sample, verify.

All randomness flows from a single seed through a documented split: state
index space is cut into fixed blocks of 4096 and block b draws from
numpy's default_rng seeded with SeedSequence((seed, b)), which mixes the
pair into an independent stream per block.  Outputs are therefore
byte-identical for a given (command, flags, seed), independent of the
worker count (capped by the MUBW_THREADS environment variable).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import mub, pauli, ppt, witness
from .classify import (
    VERDICT_BOUND,
    VERDICT_NPT,
    VERDICT_SEPARABLE,
    VERDICT_UNDECIDED,
    cat1_special,
    classify as classify_state,
    classify_batch,
)

BLOCK_SIZE = 4096

_PLANES = {
    "p1p2": (0, 1),
    "p1p3": (0, 2),
    "p3p4": (2, 3),
    "p2p4": (1, 3),
    "p5p6": (4, 5),
    "p7p8": (6, 7),
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def sample_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points on the probability simplex (normalized exponentials)."""
    e = rng.exponential(1.0, size=(n, 8))
    return e / e.sum(axis=1, keepdims=True)


def _worker_count() -> int:
    env = os.environ.get("MUBW_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def _parse_state(args) -> np.ndarray:
    if args.state_file:
        text = open(args.state_file).read().strip()
        values = [float(v) for v in text.split(",")]
        return pauli.as_probs(values)
    if args.p:
        values = [float(v) for v in args.p.split(",")]
        return pauli.as_probs(values)
    values = [float(v) for v in args.r.split(",")]
    return pauli.p_from_r(pauli.as_rvec(values))


def cmd_classify(args) -> int:
    try:
        p = _parse_state(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    verdict = classify_state(p, tol=args.tol)
    record = {
        "verdict": verdict.kind,
        "p": list(map(float, p)),
        "r": list(map(float, pauli.r_from_p(p))),
        "ppt_pass": verdict.ppt.passed,
        "inequalities": [[float(v) for v in row] for row in verdict.ppt.quadruples],
        "min_eigenvalues": list(verdict.ppt.min_eigs),
        "witness": verdict.detection[0].label if verdict.detection else None,
        "witness_value": verdict.detection[1] if verdict.detection else None,
        "certificate": None,
    }
    if verdict.certificate is not None:
        record["certificate"] = {
            "construction": verdict.certificate.construction,
            "reconstruction_error": verdict.certificate.reconstruction_error,
            "terms": [
                {"weight": t.weight, "description": t.description}
                for t in verdict.certificate.terms
            ],
        }
    if args.json:
        print(json.dumps(record))
        return 0
    print(f"verdict: {verdict.kind}")
    print(f"ppt: {'pass' if verdict.ppt.passed else 'fail'}  "
          f"min inequality = {_fmt(verdict.ppt.min_value)}  "
          f"min eigenvalues = ({', '.join(_fmt(e) for e in verdict.ppt.min_eigs)})")
    group_names = ("(p3,p4,p5,p6)", "(p1,p2,p7,p8)", "(p1,p2,p5,p6)",
                   "(p3,p4,p7,p8)", "(p1,p2,p3,p4)", "(p5,p6,p7,p8)")
    print("inequality values:")
    for name, row in zip(group_names, verdict.ppt.quadruples):
        print(f"  {name}: " + "  ".join(_fmt(v) for v in row))
    if verdict.detection:
        print(f"witness: {verdict.detection[0].label}  value = {_fmt(verdict.detection[1])}")
    else:
        print("witness: none negative")
    if verdict.certificate:
        c = verdict.certificate
        print(f"certificate: {c.construction} (reconstruction error {c.reconstruction_error:.3e})")
        for t in c.terms:
            print(f"  weight {_fmt(t.weight)}  {t.description}")
    else:
        print("certificate: none")
    return 0


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


@dataclass
class SampleReport:
    n_total: int
    n_ppt: int
    n_detected: int
    n_certified_separable: int
    n_undecided: int
    fraction_detected_of_ppt: float
    seed: int
    witness_tallies: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [
            f"samples: {self.n_total}  seed: {self.seed}",
            f"ppt: {self.n_ppt} ({100.0 * self.n_ppt / max(1, self.n_total):.4f}% of samples)",
            f"bound detected: {self.n_detected}"
            f" ({100.0 * self.fraction_detected_of_ppt:.4f}% of ppt)",
            f"separable certified: {self.n_certified_separable}",
            f"undecided: {self.n_undecided}",
        ]
        if self.witness_tallies:
            out.append("witness tallies:")
            for label in sorted(self.witness_tallies):
                out.append(f"  {label}: {self.witness_tallies[label]}")
        return out


def _sample_block(seed: int, block: int, count: int, tol: float):
    rng = np.random.default_rng(np.random.SeedSequence((seed, block)))
    ps = sample_simplex(rng, count)
    verdicts, labels, values = classify_batch(ps, tol=tol)
    return ps, verdicts, labels, values


def run_sample(n: int, seed: int, tol: float = 1e-9, csv_path: str | None = None):
    """Classify n uniform-simplex states; returns the aggregate report."""
    blocks = [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE))
              for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]
    workers = _worker_count()
    results = []
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda bc: _sample_block(seed, bc[0], bc[1], tol), blocks))
    else:
        results = [_sample_block(seed, b, c, tol) for b, c in blocks]
    n_ppt = n_det = n_sep = n_und = 0
    tallies: dict[str, int] = {}
    writer = None
    handle = None
    if csv_path:
        handle = open(csv_path, "w", newline="\n")
        handle.write("index,p1,p2,p3,p4,p5,p6,p7,p8,verdict,witness,witness_value\n")
    index = 0
    for ps, verdicts, labels, values in results:
        for row in range(ps.shape[0]):
            v = verdicts[row]
            if v != VERDICT_NPT:
                n_ppt += 1
            if v == VERDICT_BOUND:
                n_det += 1
                tallies[labels[row]] = tallies.get(labels[row], 0) + 1
            elif v == VERDICT_SEPARABLE:
                n_sep += 1
            elif v == VERDICT_UNDECIDED:
                n_und += 1
            if handle:
                fields = [str(index)] + [_fmt(x) for x in ps[row]] + [str(v)]
                if v == VERDICT_BOUND:
                    fields += [labels[row], _fmt(values[row])]
                else:
                    fields += ["", ""]
                handle.write(",".join(fields) + "\n")
            index += 1
    if handle:
        handle.close()
    report = SampleReport(
        n_total=n,
        n_ppt=n_ppt,
        n_detected=n_det,
        n_certified_separable=n_sep,
        n_undecided=n_und,
        fraction_detected_of_ppt=(n_det / n_ppt) if n_ppt else 0.0,
        seed=seed,
        witness_tallies=tallies,
    )
    return report


def cmd_sample(args) -> int:
    if args.n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    report = run_sample(args.n, args.seed, tol=args.tol, csv_path=args.out)
    for line in report.lines():
        print(line)
    print("note: flat-Dirichlet sampling measure; detection fraction is"
          " measure dependent (reference value in the literature: about 2.7%).")
    return 0


# ---------------------------------------------------------------------------
# region
# ---------------------------------------------------------------------------


def _region_rows_plane(plane, grid, samples, seed, tol):
    cells = ppt.project_region(plane, grid)
    rows = []
    for j in range(grid):
        for i in range(grid):
            feasible = (i, j) in cells
            row = {
                "i": i, "j": j,
                "x": i / grid, "y": j / grid,
                "feasible": int(feasible),
            }
            if samples and feasible:
                tally = _cell_tally(plane, grid, i, j, samples, seed, tol)
                row.update(tally)
            rows.append(row)
    return rows, cells


def _cell_tally(plane, grid, i, j, samples, seed, tol):
    a, b = plane
    rng = np.random.default_rng(np.random.SeedSequence((seed, i * grid + j + 1)))
    x, y = i / grid, j / grid
    rest = 1.0 - x - y
    free = [k for k in range(8) if k not in (a, b)]
    ps = np.zeros((samples, 8))
    w = rng.exponential(1.0, size=(samples, 6))
    w = w / w.sum(axis=1, keepdims=True) * rest
    ps[:, free] = w
    ps[:, a] = x
    ps[:, b] = y
    verdicts, _, _ = classify_batch(ps, tol=tol)
    return {
        "n_npt": int(np.sum(verdicts == VERDICT_NPT)),
        "n_bound": int(np.sum(verdicts == VERDICT_BOUND)),
        "n_separable": int(np.sum(verdicts == VERDICT_SEPARABLE)),
        "n_undecided": int(np.sum(verdicts == VERDICT_UNDECIDED)),
    }


def region_cat1_triangle(grid: int, tol: float = 1e-9):
    """Classify the triangular family over the (p1, p2) lattice."""
    points = []
    states = []
    for j in range(grid + 1):
        for i in range(grid + 1):
            x, y = i / grid, j / grid
            if x + y > 1.0 + 1e-12:
                points.append((i, j, x, y, None))
                continue
            points.append((i, j, x, y, len(states)))
            states.append(cat1_special(x, y))
    if states:
        verdicts, labels, values = classify_batch(np.array(states), tol=tol)
    rows = []
    for i, j, x, y, idx in points:
        if idx is None:
            rows.append({"i": i, "j": j, "p1": x, "p2": y, "status": "invalid",
                         "witness": "", "value": ""})
        else:
            rows.append({
                "i": i, "j": j, "p1": x, "p2": y, "status": str(verdicts[idx]),
                "witness": labels[idx],
                "value": _fmt(values[idx]) if verdicts[idx] == VERDICT_BOUND else "",
            })
    return rows


def write_region_svg(path: str, rows, grid: int) -> None:
    """Minimal vector-graphic rendering of a region scan (one rect per cell)."""
    colors = {
        "feasible": "#4477aa", "infeasible": "#eeeeee",
        VERDICT_NPT: "#eeeeee", VERDICT_BOUND: "#cc3311",
        VERDICT_SEPARABLE: "#228833", VERDICT_UNDECIDED: "#4477aa",
        "invalid": "#ffffff",
    }
    size = 800
    cell = size / grid
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">']
    for row in rows:
        status = row.get("status")
        if status is None:
            status = "feasible" if row.get("feasible") else "infeasible"
        color = colors.get(status, "#000000")
        if color in ("#eeeeee", "#ffffff"):
            continue
        x = row["i"] * cell
        y = size - (row["j"] + 1) * cell
        parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" '
                     f'height="{cell:.2f}" fill="{color}"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_region(args) -> int:
    if args.plane != "cat1-triangle" and args.plane not in _PLANES:
        print(f"error: unknown plane {args.plane!r}", file=sys.stderr)
        return 2
    if args.grid < 2:
        print("error: --grid must be at least 2", file=sys.stderr)
        return 2
    if args.plane == "cat1-triangle":
        rows = region_cat1_triangle(args.grid, tol=args.tol)
        header = ["i", "j", "p1", "p2", "status", "witness", "value"]
    else:
        rows, _ = _region_rows_plane(_PLANES[args.plane], args.grid,
                                     args.samples, args.seed, args.tol)
        header = ["i", "j", "x", "y", "feasible"]
        if args.samples:
            header += ["n_npt", "n_bound", "n_separable", "n_undecided"]
    with open(args.out, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_field(row.get(h, "")) for h in header) + "\n")
    if args.svg:
        write_region_svg(args.svg, rows, args.grid)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _csv_field(v) -> str:
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def suite_oracle(n: int = 20000, seed: int = 0, inject_bug: bool = False):
    """Inequality verdicts against the rotation-eigenvalue oracle."""
    rng = np.random.default_rng(seed)
    ps = sample_simplex(rng, n)
    ineq = ppt.ppt_inequalities_batch(ps)
    if inject_bug:
        ineq = ineq.copy()
        ineq[:, 0] = -ineq[:, 0]  # negative control: corrupt one inequality
    ineq_min = ineq.min(axis=1)
    eig_min = ppt.pt_min_eigenvalues_batch(ps).min(axis=1)
    tol = 1e-9
    verdict_match = np.all((ineq_min >= -tol) == (eig_min >= -tol))
    value_match = float(np.max(np.abs(eig_min - ineq_min / 2.0)))
    ok = bool(verdict_match and value_match <= tol)
    return ok, f"n={n} verdict_agree={bool(verdict_match)} max|eig-ineq/2|={value_match:.3e}"


def suite_envelope(n_states: int = 100, n_psi: int = 10000, seed: int = 1):
    """Sampled-psi minimum of the linear family against the closed form."""
    rng = np.random.default_rng(seed)
    ps = sample_simplex(rng, n_states)
    rs = ps @ pauli.SIGNS.T
    psis = np.linspace(0.0, 2.0 * math.pi, n_psi, endpoint=False)
    cosv, sinv = np.cos(psis), np.sin(psis)
    worst = 0.0
    for id_ in witness.all_family_ids():
        (j, k), (l, m) = id_.partition
        a = rs[:, j - 1] + id_.inner_sign * rs[:, k - 1]
        b = rs[:, l - 1] + id_.inner_sign * rs[:, m - 1]
        base = 1.0 + id_.outer_sign * rs[:, id_.z_index - 1]
        grid_min = base + (np.outer(a, cosv) + np.outer(b, sinv)).min(axis=1)
        closed = base - np.hypot(a, b)
        worst = max(worst, float(np.max(np.abs(grid_min - closed))))
    ok = worst <= 1e-6
    return ok, f"states={n_states} ids=36 psi_grid={n_psi} max_gap={worst:.3e}"


def suite_identities(n: int = 10000, seed: int = 2):
    """Pair-sum identities, character-table orthogonality, state equivalence."""
    rng = np.random.default_rng(seed)
    ps = sample_simplex(rng, n)
    rs = ps @ pauli.SIGNS.T
    checks = []
    pair_forms = {
        (4, 5, 1): ps[:, 2] - ps[:, 3] + ps[:, 4] - ps[:, 5],
        (6, 7, 1): -ps[:, 0] + ps[:, 1] + ps[:, 6] - ps[:, 7],
        (4, 5, -1): ps[:, 0] - ps[:, 1] + ps[:, 6] - ps[:, 7],
        (6, 7, -1): ps[:, 2] - ps[:, 3] - ps[:, 4] + ps[:, 5],
        (4, 6, 1): ps[:, 2] - ps[:, 3] + ps[:, 6] - ps[:, 7],
        (5, 7, 1): -ps[:, 0] + ps[:, 1] + ps[:, 4] - ps[:, 5],
        (4, 6, -1): ps[:, 0] - ps[:, 1] + ps[:, 4] - ps[:, 5],
        (5, 7, -1): ps[:, 2] - ps[:, 3] - ps[:, 6] + ps[:, 7],
        (4, 7, 1): ps[:, 4] - ps[:, 5] + ps[:, 6] - ps[:, 7],
        (5, 6, 1): -ps[:, 0] + ps[:, 1] + ps[:, 2] - ps[:, 3],
        (4, 7, -1): ps[:, 0] - ps[:, 1] + ps[:, 2] - ps[:, 3],
        (5, 6, -1): ps[:, 4] - ps[:, 5] - ps[:, 6] + ps[:, 7],
    }
    for (j, k, t), rhs in pair_forms.items():
        lhs = rs[:, j - 1] + t * rs[:, k - 1]
        checks.append(np.max(np.abs(lhs - 2.0 * rhs)))
    sums = {
        (1, 1): ps[:, 0] + ps[:, 1] + ps[:, 2] + ps[:, 3],
        (1, -1): ps[:, 4] + ps[:, 5] + ps[:, 6] + ps[:, 7],
        (2, 1): ps[:, 0] + ps[:, 1] + ps[:, 4] + ps[:, 5],
        (2, -1): ps[:, 2] + ps[:, 3] + ps[:, 6] + ps[:, 7],
        (3, 1): ps[:, 0] + ps[:, 1] + ps[:, 6] + ps[:, 7],
        (3, -1): ps[:, 2] + ps[:, 3] + ps[:, 4] + ps[:, 5],
    }
    for (i, s), rhs in sums.items():
        checks.append(np.max(np.abs((1.0 + s * rs[:, i - 1]) - 2.0 * rhs)))
    worst = float(max(checks))
    hh = pauli.H_MATRIX @ pauli.H_MATRIX.T
    ortho = bool(np.array_equal(hh, 8 * np.eye(8, dtype=np.int64)))
    sub = ps[: min(n, 2000)]
    d1 = pauli.densities_from_p_batch(sub)
    d2 = np.stack([pauli.density_from_r(pauli.r_from_p(p)) for p in sub])
    equiv = float(np.max(np.abs(d1 - d2)))
    ok = worst <= 1e-13 and ortho and equiv <= 1e-12
    return ok, (f"n={n} identity_max={worst:.3e} H_orthogonal={ortho} "
                f"construction_gap={equiv:.3e}")


def suite_witnesses(psi: float = math.pi / 3):
    """Validation table of all 36 ids at one probe angle."""
    rows = []
    all_ok = True
    for id_ in witness.all_family_ids():
        spec = id_.with_psi(psi)
        min_prod, _ = witness.min_over_products(spec)
        neg = float(witness.witness_eigenvalues(spec)[0])
        ok = min_prod >= -1e-6 and neg < -1e-8
        all_ok &= ok
        rows.append((id_.label, min_prod, neg, ok))
    n_valid = sum(1 for r in rows if r[3])
    return all_ok, f"psi={psi:.4f} validated {n_valid}/36 (min product >= -1e-6, negative eigenvalue)"


def suite_mub():
    """Unbiasedness of all row pairs plus the stated conversions."""
    rows = mub.mub_table()
    bases = [mub.common_eigenbasis(r) for r in rows]
    pair_fail = 0
    for i in range(9):
        for j in range(i + 1, 9):
            if not mub.unbiasedness(bases[i], bases[j]):
                pair_fail += 1
    ghz = pauli.ghz_basis()
    overlaps = np.abs(bases[5].conj() @ ghz.T)
    ghz_match = bool(np.allclose(np.sort(overlaps.max(axis=1)), 1.0, atol=1e-10)
                     and np.allclose((overlaps > 0.5).sum(axis=1), 1))
    converted = mub.transform_row(rows[5], perm="z->x")
    row4 = mub.match_row(converted) == 3
    ok = pair_fail == 0 and ghz_match and row4
    return ok, f"unbiased_pairs=36-{pair_fail} row6_ghz={ghz_match} row6->row4={row4}"


_SUITES = {
    "oracle": suite_oracle,
    "envelope": suite_envelope,
    "identities": suite_identities,
    "witnesses": suite_witnesses,
    "mub": suite_mub,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    failures = 0
    for name in names:
        if name == "oracle":
            ok, detail = suite_oracle(n=args.n, seed=args.seed,
                                      inject_bug=(args.inject_bug == "oracle"))
        elif name == "envelope":
            ok, detail = suite_envelope(seed=args.seed)
        elif name == "identities":
            ok, detail = suite_identities(seed=args.seed)
        else:
            ok, detail = _SUITES[name]()
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mubw",
        description="Classify three-qubit GHZ-diagonal states, scan PPT regions, "
                    "and evaluate envelope entanglement witnesses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify one state")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", help="8 comma-separated probabilities")
    g.add_argument("--r", help="7 comma-separated correlation coefficients")
    g.add_argument("--state-file", help="file with one line of 8 comma-separated values")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--json", action="store_true", help="emit one JSON record")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("sample", help="seeded Monte Carlo classification")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out", help="per-state CSV path")
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("region", help="feasible-region scan")
    r.add_argument("--plane", required=True,
                   choices=sorted(_PLANES) + ["cat1-triangle"])
    r.add_argument("--grid", type=int, required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--svg", help="optional SVG rendering path")
    r.add_argument("--samples", type=int, default=0,
                   help="classification samples per feasible cell")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float, default=1e-9)
    r.set_defaults(func=cmd_region)

    v = sub.add_parser("verify", help="cross-module property suites")
    v.add_argument("--suite", default="all", choices=["all"] + sorted(_SUITES))
    v.add_argument("--n", type=int, default=20000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-bug", default="none", choices=["none", "oracle"],
                   help="negative control: corrupt the named suite's data")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
