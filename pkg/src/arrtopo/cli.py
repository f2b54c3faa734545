"""Command-line front end: `arr analyze`, `arr verify`, `arr corpus`.

Exit codes: 0 pass, 1 mismatch, 2 input error, 3 numeric-unstable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from arrtopo.arrangement import ArrangementError, CentralArrangement, parse_arrangement
from arrtopo.genericity import GenericityError, sample_generic_hypersurface
from arrtopo.invariants import (
    euler_minus_generic_hyperplane,
    full_report,
    invariant_report,
    milnor_chain_report,
)
from arrtopo.lattice import LatticeError, build_lattice, characteristic_polynomial
from arrtopo.oracles import (
    DEFAULT_PRIMES,
    OracleError,
    count_points_mod_q,
    enumerate_regions,
    interpolate_char_poly,
    zaslavsky_check,
)
from arrtopo.solver import (
    SolverOptions,
    gradient_fiber_points,
    multiplicity_probe,
    solve_critical_on_hypersurface,
)

EXIT_PASS, EXIT_MISMATCH, EXIT_INPUT, EXIT_UNSTABLE = 0, 1, 2, 3
EXACT, STABLE, UNSTABLE = "exact", "numeric-stable", "numeric-unstable"
CHECKS = ("thm1", "thm2", "lemma7", "pointcount", "zaslavsky", "remark8")
# a corpus run reports the worst row; a certified mismatch outranks everything
_SEVERITY = {EXIT_PASS: 0, EXIT_UNSTABLE: 1, EXIT_INPUT: 2, EXIT_MISMATCH: 3}

log = logging.getLogger("arrtopo")


class InputError(Exception):
    """Anything the user can fix: unreadable file, bad syntax, unsupported flag combination."""


@dataclass(frozen=True)
class VerifyVerdict:
    check_name: str
    input_digest: str
    predicted: object
    observed: object
    match: Optional[bool]
    certification: str
    provenance: str
    engine: str

    @property
    def exit_code(self) -> int:
        if self.certification == UNSTABLE:
            return EXIT_UNSTABLE
        return EXIT_PASS if self.match else EXIT_MISMATCH

    def to_json(self) -> dict:
        return {
            "check": self.check_name,
            "engine": self.engine,
            "input_hash": self.input_digest,
            "prediction": self.predicted,
            "observation": self.observed,
            "match": self.match,
            "certification": self.certification,
            "provenance": self.provenance,
        }


def _verdict(check, A, predicted, observed, certification, provenance, engine) -> VerifyVerdict:
    match = None if certification == UNSTABLE else predicted == observed
    return VerifyVerdict(check, A.digest(), predicted, observed, match, certification, provenance, engine)


def _numeric_cert(S) -> str:
    return STABLE if S.stability_certified else UNSTABLE


def default_seed() -> int:
    raw = os.environ.get("ARR_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"ARR_SEED must be an integer, got {raw!r}") from None


def load_arrangement(path) -> CentralArrangement:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_arrangement(text)
    except ArrangementError as exc:
        raise InputError(f"{path}: {exc}") from None


# ------------------------------------------------------------------ checks


def check_thm1(A, seed, opts, **_):
    inv = invariant_report(A)
    census = enumerate_regions(A, seed)
    S = gradient_fiber_points(A, seed, opts)
    prov = "gradient degree equals top Betti number"
    return [
        _verdict("thm1", A, inv.gradient_degree, census.bounded_regions, EXACT,
                 prov + "; bounded chambers of a real decone", "chamber-census"),
        _verdict("thm1", A, inv.gradient_degree, S.stable_count, _numeric_cert(S),
                 prov + "; fiber of grad(Q) over a generic direction", "newton-chart"),
    ]


def check_thm2(A, seed, opts, e=2, **_):
    if e not in (1, 2):
        raise InputError("thm2 supports -e 1 or -e 2 (no numeric solver for e >= 3)")
    chain = milnor_chain_report(A, e)
    f = sample_generic_hypersurface(A, e, seed)
    S = solve_critical_on_hypersurface(A, f, replace(opts, seeds=tuple(seed + k for k in opts.seeds)))
    return [
        _verdict("thm2", A, chain.predicted_card_Cg, S.stable_count, _numeric_cert(S),
                 "|C(g)| = (-1)^n e chi(D(fQ)) via stratified Euler calculus", "newton-lagrange"),
    ]


def check_lemma7(A, seed, **_):
    bn = invariant_report(A).bn
    obs = euler_minus_generic_hyperplane(A, seed)
    return [
        _verdict("lemma7", A, bn, obs, EXACT,
                 "(-1)^n (chi(D) - chi(D cap H)) = b_n for a generic hyperplane H", "lattice-restriction"),
    ]


def check_pointcount(A, primes=DEFAULT_PRIMES, extend=True, **_):
    rows = []
    chi = characteristic_polynomial(build_lattice(A))
    for q in primes:
        try:
            res = count_points_mod_q(A, q)
        except OracleError as exc:
            raise InputError(str(exc)) from None
        if not res.good_prime:
            log.info("prime %d is bad for this arrangement; not compared", q)
            continue
        rows.append(_verdict(f"pointcount[q={q}]", A, res.predicted, res.raw_count, EXACT,
                             "complement point count over F_q equals chi_A(q)", "fq-enumeration"))
    try:
        interp = interpolate_char_poly(A, primes, extend=extend)
    except OracleError as exc:
        log.info("interpolation skipped: %s", exc)
    else:
        rows.append(_verdict("pointcount[interpolation]", A, str(chi), str(interp), EXACT,
                             "chi_A recovered from point counts at good primes", "fq-interpolation"))
    if not rows:
        raise InputError("no good primes among " + ",".join(map(str, primes)))
    return rows


def check_zaslavsky(A, seed, primes=DEFAULT_PRIMES, **_):
    census = enumerate_regions(A, seed)
    try:
        z = zaslavsky_check(A, census, primes)
    except OracleError as exc:
        raise InputError(str(exc)) from None
    return [
        _verdict("zaslavsky[regions]", A, z.predicted_regions, z.observed_regions, EXACT,
                 "regions = (-1)^n chi_aff(-1)", "chamber-census"),
        _verdict("zaslavsky[bounded]", A, z.predicted_bounded, z.observed_bounded, EXACT,
                 "bounded regions = (-1)^n chi_aff(1)", "chamber-census"),
    ]


def check_remark8(A, seed, opts, trials=5, **_):
    probe = multiplicity_probe(A, trials, seed, opts)
    cert = STABLE if probe.status != "inconclusive" else UNSTABLE
    return [
        _verdict(f"remark8[m={','.join(map(str, m))}]", A, probe.baseline, c, cert,
                 "chart critical count is independent of multiplicities", "newton-chart")
        for m, c in zip(probe.multiplicities, probe.counts)
    ]


CHECK_FUNCS = {
    "thm1": check_thm1,
    "thm2": check_thm2,
    "lemma7": check_lemma7,
    "pointcount": check_pointcount,
    "zaslavsky": check_zaslavsky,
    "remark8": check_remark8,
}


def run_check(check: str, A: CentralArrangement, **kw) -> list[VerifyVerdict]:
    try:
        return CHECK_FUNCS[check](A, **kw)
    except (GenericityError, LatticeError) as exc:
        raise InputError(str(exc)) from None


def worst(codes) -> int:
    return max(codes, key=_SEVERITY.__getitem__, default=EXIT_PASS)


# ---------------------------------------------------------------- rendering


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def render_table(rows: list[dict], columns: list[str]) -> str:
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


VERDICT_COLUMNS = ["check", "input_hash", "prediction", "observation", "match", "certification", "engine"]


def render_report(A: CentralArrangement, rep: dict, e: int) -> str:
    chain = rep["milnor_chain"]
    lines = [
        f"arrangement   d={A.d} hyperplanes in P^{A.n}  digest {A.digest()}",
        f"essential     {rep['essential']}",
        f"betti (affine)      {rep['betti_affine']}",
        f"betti (projective)  {rep['betti_projective']}",
        f"euler characteristic of D(Q)  {rep['euler_projective']}",
        f"gradient degree     {rep['gradient_degree']}",
        f"polar invariant     {rep['polar_invariant']}",
        f"minimal cells       {rep['minimal_cells']}",
        f"Milnor chain (e={e}):",
    ]
    for key in ("chi_DfQ", "chi_F_minus_N", "chi_X_minus_X0", "c", "card_CV", "card_CH",
                "predicted_card_Cg", "polar_line_count"):
        lines.append(f"  {key:<18} {chain[key]}")
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


def _options(args) -> SolverOptions:
    if getattr(args, "starts", None) is not None:
        if args.starts < 1:
            raise InputError("--starts must be positive")
        return SolverOptions(max_starts=args.starts)
    return SolverOptions()


def cmd_analyze(args) -> int:
    A = load_arrangement(args.file)
    seed = args.seed if args.seed is not None else default_seed()
    if args.e < 1:
        raise InputError("-e must be positive")
    rep = full_report(A, e=args.e, seed=seed)
    if args.dot:
        Path(args.dot).write_text(build_lattice(A).to_dot())
    print(_dumps(rep) if args.json else render_report(A, rep, args.e))
    return EXIT_PASS


def _parse_primes(text: Optional[str]):
    if not text:
        return DEFAULT_PRIMES
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"--primes expects comma-separated integers, got {text!r}") from None


def cmd_verify(args) -> int:
    A = load_arrangement(args.file)
    seed = args.seed if args.seed is not None else default_seed()
    # explicit --primes are used as given; the default set may grow for interpolation
    rows = run_check(args.check, A, seed=seed, opts=_options(args), e=args.e,
                     primes=_parse_primes(args.primes), extend=args.primes is None)
    records = [r.to_json() for r in rows]
    print(_dumps(records) if args.json else render_table(records, VERDICT_COLUMNS))
    return worst(r.exit_code for r in rows)


def corpus_battery(A: CentralArrangement) -> list[str]:
    checks = ["thm1", "lemma7", "pointcount", "zaslavsky", "remark8"]
    if A.n <= 2:
        checks.insert(1, "thm2")
    return checks


def _corpus_entry(path: str, seed: int, starts: Optional[int]) -> list[dict]:
    """All battery rows for one file; errors become exit-2 rows instead of aborting."""
    name = Path(path).name
    try:
        A = load_arrangement(path)
    except InputError as exc:
        return [{"file": name, "check": "parse", "exit": EXIT_INPUT, "error": str(exc)}]
    opts = SolverOptions(max_starts=starts) if starts else SolverOptions()
    out = []
    for check in corpus_battery(A):
        try:
            rows = run_check(check, A, seed=seed, opts=opts, e=2, primes=DEFAULT_PRIMES)
        except InputError as exc:
            out.append({"file": name, "check": check, "exit": EXIT_INPUT, "error": str(exc)})
            continue
        for r in rows:
            out.append({"file": name, "exit": r.exit_code, **r.to_json()})
    return out


def cmd_corpus(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise InputError(f"{root}: not a directory")
    files = sorted(str(p) for p in root.iterdir() if p.is_file() and p.suffix == ".arr")
    if not files:
        raise InputError(f"{root}: no .arr files")
    seed = args.seed if args.seed is not None else default_seed()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_corpus_entry, files, [seed] * len(files), [args.starts] * len(files)))
    else:
        results = [_corpus_entry(f, seed, args.starts) for f in files]
    rows = [r for entry in results for r in entry]
    code = worst(r["exit"] for r in rows)
    if args.json:
        print(_dumps({"exit": code, "rows": rows}))
    else:
        print(render_table(rows, ["file", "exit"] + VERDICT_COLUMNS + ["error"]))
        print(f"\n{len(files)} files, {len(rows)} rows, exit {code}")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="exact invariants of one arrangement")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--dot", metavar="OUT", help="write the lattice Hasse diagram (Graphviz)")
    p.add_argument("-e", type=int, default=2, help="degree of the generic hypersurface (default 2)")
    p.add_argument("--seed", type=int, help="seed for generic choices (default: ARR_SEED or 0)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="cross-engine check on one arrangement")
    p.add_argument("check", choices=CHECKS)
    p.add_argument("file")
    p.add_argument("--seed", type=int, help="seed for generic choices (default: ARR_SEED or 0)")
    p.add_argument("--starts", type=int, help="random Newton starts per seed round")
    p.add_argument("--primes", help="comma-separated primes for pointcount/zaslavsky")
    p.add_argument("-e", type=int, default=2, help="hypersurface degree for thm2 (default 2)")
    p.add_argument("--json", action="store_true", help="emit verdicts as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", help="run the verify battery over a directory of .arr files")
    p.add_argument("dir")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--seed", type=int, help="seed for generic choices (default: ARR_SEED or 0)")
    p.add_argument("--starts", type=int, help="random Newton starts per seed round")
    p.add_argument("--json", action="store_true", help="emit rows as JSON")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"arr: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
