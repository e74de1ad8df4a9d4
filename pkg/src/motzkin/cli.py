"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails (the report is
still written), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from importlib import resources
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from . import bethe, paths, spectra, tl_algebra
from .basis import SectorLabel, encode, sector_codes
from .exact import as_fraction
from .operators import action_table_check, sector_hamiltonian

PROG = "motzkin"
MAX_L = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument types -------------------------------------------------------------

def rational(text: str) -> Fraction:
    try:
        return as_fraction(text.strip())
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}") from None


def sector_arg(text: str) -> SectorLabel:
    try:
        u, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"sector must be 'u,d', got {text!r}") from None
    return SectorLabel(u, d)


def momenta_arg(text: str) -> List[complex]:
    try:
        return [complex(x.strip().replace("i", "j")) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed momentum list {text!r}") from None


def positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--length", "-L", type=int, dest="L")
    common.add_argument("--epsilon", type=rational, default=Fraction(0))
    common.add_argument("--sector", type=sector_arg)
    common.add_argument("--tol", type=positive_float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out")

    p = _Parser(prog=PROG, description="Free Motzkin chain toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("spectrum", parents=[common], help="exact spectrum, full or one sector")
    sub.add_parser("gsd", parents=[common], help="ground-state count by construction and ED")

    alg = sub.add_parser("algebra", parents=[common], help="exact operator-algebra checks")
    alg.add_argument("which", choices=("ptl", "flat", "s21", "ybe"))
    alg.add_argument("--random", type=int, default=20, help="number of random (lambda1, lambda2) pairs")
    alg.add_argument("--lambdas", help="explicit pair 'p/q,p/q' instead of random sampling")

    bt = sub.add_parser("bethe", parents=[common], help="Bethe ansatz solutions and states")
    bt.add_argument("which", choices=("one", "two", "state", "residual"))
    bt.add_argument("--momenta", type=momenta_arg)
    bt.add_argument("--flavors")
    bt.add_argument("--cyclic", action="store_true", help="symmetrize the flavor word over rotations")

    sub.add_parser("compare-xxx", parents=[common], help="compare with the spin-1/2 XXX chain")

    pa = sub.add_parser("paths", parents=[common], help="orbits and ground states")
    pa.add_argument("which", choices=("orbit", "ground-states"))
    pa.add_argument("--config")

    sub.add_parser("action-table", parents=[common], help="audit the (1,1)-sector action table")
    return p


# -- output -----------------------------------------------------------------------

def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([json.dumps(x) if isinstance(x, (list, dict)) else ("" if x is None else x) for x in r])
    return buf.getvalue()


def _records_csv(records: List[dict]) -> str:
    if not records:
        return ""
    header = list(records[0])
    return _csv(header, ([r.get(k) for k in header] for r in records))


class Result:
    def __init__(self, payload, ok: bool = True, text: Optional[Callable[[], str]] = None,
                 csv_text: Optional[Callable[[], str]] = None):
        self.payload, self.ok, self._text, self._csv = payload, ok, text, csv_text

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, indent=2) + "\n"
        if fmt == "text" and self._text:
            return self._text()
        if fmt == "csv":
            if self._csv:
                return self._csv()
            if isinstance(self.payload, list):
                return _records_csv(self.payload)
            return _records_csv([{k: v for k, v in self.payload.items()}])
        return json.dumps(self.payload, indent=2) + "\n"


# -- commands -----------------------------------------------------------------------

def _need_L(args, lo: int = 2, hi: int = MAX_L) -> int:
    if args.L is None:
        raise UsageError("--length is required")
    if not lo <= args.L <= hi:
        raise UsageError(f"length {args.L} outside supported range [{lo}, {hi}]")
    return args.L


def cmd_spectrum(args) -> Result:
    L = _need_L(args, hi=spectra.SECTOR_CAP)
    tol = args.tol or 1e-10
    if args.sector is not None:
        if args.epsilon != 0:
            raise UsageError("sectors not conserved")
        try:
            args.sector.validate(L)
        except ValueError as e:
            raise UsageError(str(e))
        ev = spectra.sector_spectrum(L, args.sector)
        rep = spectra.SpectrumReport(L, Fraction(0), [
            spectra.SectorSpectrum(args.sector.u, args.sector.d, ev, int(np.sum(ev < tol)))], tol)
    else:
        if L > spectra.DENSE_CAP:
            raise UsageError("above dense cap; use --sector")
        rep = spectra.dense_spectrum(L, args.epsilon, tol)

    def text():
        lines = [f"L={L} epsilon={rep.epsilon} kernel_dim={rep.kernel_dim}"]
        lines += [f"{0.0 if abs(v) < tol else v:.12g} x{m}" for v, m in rep.distinct()]
        if rep.gap_ambiguous:
            lines.append("gap ambiguity")
        return "\n".join(lines) + "\n"

    return Result(rep.to_dict(), not rep.gap_ambiguous, text, rep.to_csv)


def cmd_gsd(args) -> Result:
    L = _need_L(args, hi=10)
    try:
        rep = paths.gsd(L)
    except ArithmeticError as e:
        return Result({"L": L, "error": str(e)}, False, lambda: f"{e}\n")
    d = rep.to_dict()
    return Result(d, True, lambda: (f"L={L}: {rep.total} ground states = {rep.product} product + "
                                    f"{rep.entangled} entangled (ED kernel {rep.ed_kernel}; "
                                    f"closed form 2^(L+1)-1 = {rep.claimed})\n"))


def _ybe_pairs(args):
    if args.lambdas:
        try:
            a, b = (rational(x) for x in args.lambdas.split(","))
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"malformed --lambdas {args.lambdas!r}")
        return [(a, b)]
    if args.random < 1:
        raise UsageError("--random must be positive")
    return tl_algebra.random_spectral_pairs(args.random, args.seed)


def cmd_algebra(args) -> Result:
    L = _need_L(args, lo=3, hi=6)
    if args.which == "ptl":
        reps = tl_algebra.check_ptl(L)
    elif args.which == "flat":
        reps = tl_algebra.check_flat_algebra(L)
    elif args.which == "s21":
        reps = [r for j in range(1, L + 1) for sw in (False, True) for r in tl_algebra.check_s21(L, j, sw)]
    else:
        try:
            reps = [tl_algebra.check_ybe(a, b, L) for a, b in _ybe_pairs(args)]
        except ZeroDivisionError as e:
            raise UsageError(str(e))
    rows = [r.to_dict() for r in reps]
    ok = all(r.exact_equal for r in reps)

    def text():
        lines = [f"{'ok  ' if r.exact_equal else 'FAIL'} {r.relation} j={list(r.j)}"
                 + (f" ({'; '.join(r.details)})" if r.details and r.relation == "ybe" else "")
                 + ("" if r.exact_equal else f" defect={r.max_abs_defect}") for r in reps]
        passed = sum(r.exact_equal for r in reps)
        lines.append(f"{passed}/{len(reps)} exact")
        return "\n".join(lines) + "\n"

    return Result(rows, ok, text)


def _sector_residual(L: int, sol, flavors: str, cyclic: bool) -> float:
    fl = bethe.parse_flavors(flavors)
    u = fl.count(0)
    codes = sector_codes(L, u, len(fl) - u)
    v = bethe.two_particle_state(L, sol, flavors, cyclic)
    amp = v.as_dict()
    x = np.array([amp.get(c, 0j) for c in codes])
    H = sector_hamiltonian(L, u, len(fl) - u).to_sparse()
    return float(np.linalg.norm(H @ x - sol.energy * x))


def cmd_bethe(args) -> Result:
    tol = args.tol or 1e-8
    if args.which == "one":
        L = _need_L(args)
        sols = bethe.one_particle_solutions(L)
        return Result([s.to_dict() for s in sols], True,
                      lambda: "".join(f"m={s.m[0]} E={s.energy:.12g}\n" for s in sols))
    if args.which == "two":
        L = _need_L(args, lo=4)
        flavors = args.flavors or "uu"
        if len(flavors) != 2:
            raise UsageError("--flavors must have length 2 for 'bethe two'")
        sols = bethe.solve_two_particle(L)
        for s in sols:
            s.residual = _sector_residual(L, s, flavors, args.cyclic)
        ok = all(s.residual < tol for s in sols)

        def text():
            return "".join(f"{s.cls:18s} m={s.m} E={s.energy:.12g} residual={s.residual:.2e}\n" for s in sols)

        return Result([s.to_dict() for s in sols], ok, text)
    L = _need_L(args)
    if args.momenta is None or not args.flavors:
        raise UsageError("--momenta and --flavors are required")
    if len(args.momenta) != len(args.flavors):
        raise UsageError("--momenta and --flavors must have equal length")
    try:
        v = bethe.r_particle_state(L, args.momenta, args.flavors, cyclic=args.cyclic)
        E = bethe.magnon_energy(args.momenta)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(str(e))
    if args.which == "state":
        payload = {"L": L, "energy": E,
                   "amplitudes": {str(c): [float(f"{a.real:.15g}"), float(f"{a.imag:.15g}")]
                                  for c, a in zip(v.codes, v.amps)}}
        return Result(payload, True, lambda: "".join(
            f"{c} {a.real:+.12f} {a.imag:+.12f}\n" for c, a in zip(v.codes, v.amps)))
    fl = bethe.parse_flavors(args.flavors)
    u = fl.count(0)
    codes = sector_codes(L, u, len(fl) - u)
    amp = v.as_dict()
    x = np.array([amp.get(c, 0j) for c in codes])
    H = sector_hamiltonian(L, u, len(fl) - u).to_sparse()
    res = float(np.linalg.norm(H @ x - E * x))
    payload = {"L": L, "energy": E, "residual": res, "tol": tol}
    return Result(payload, res < tol, lambda: f"E={E:.12g} residual={res:.3e}\n")


def cmd_compare(args) -> Result:
    L = _need_L(args, hi=spectra.DENSE_CAP)
    rep = spectra.compare_to_xxx(L, args.tol or 1e-9)

    def text():
        return "".join(f"{'ok  ' if c.passed else 'FAIL'} {c.name}: {c.detail}\n" for c in rep.checks)

    return Result(rep.to_dict(), rep.passed, text, lambda: _records_csv([c.to_dict() for c in rep.checks]))


def cmd_paths(args) -> Result:
    if args.which == "orbit":
        if not args.config:
            raise UsageError("--config is required")
        try:
            w = encode(args.config)
        except ValueError as e:
            raise UsageError(str(e))
        orb = paths.orbit(w)
        payload = {"representative": orb.representative.text, "size": orb.size,
                   "members": [m.text for m in orb.members]}
        return Result(payload, True, lambda: "".join(m.text + "\n" for m in orb.members),
                      lambda: _csv(["word", "code"], ((m.text, m.code) for m in orb.members)))
    L = _need_L(args, hi=10)
    payload = json.loads(paths.ground_states_json(L))
    n = len(payload["product"]) + len(payload["entangled"])
    return Result(payload, True, lambda: f"L={L}: {len(payload['product'])} product, "
                                          f"{len(payload['entangled'])} entangled, {n} total\n")


def cmd_action(args) -> Result:
    L = _need_L(args, lo=4, hi=8)
    rep = action_table_check(L)
    d = rep.to_dict()

    def text():
        lines = [f"{e['equation']}: {e['match']} match, {e['mismatch']} mismatch "
                 f"({e['wrap_mismatch']} at the wrap)" for e in d["equations"]]
        lines.append(f"{d['uncovered_placements']} placements outside the tabulated domain")
        return "\n".join(lines) + "\n"

    return Result(d, True, text, lambda: _records_csv(d["equations"]))


# JSON schema shipped for each (command, subcommand)
SCHEMAS = {
    ("spectrum", None): "spectrum", ("gsd", None): "gsd",
    ("algebra", "ptl"): "relations", ("algebra", "flat"): "relations",
    ("algebra", "s21"): "relations", ("algebra", "ybe"): "relations",
    ("bethe", "one"): "bethe_solutions", ("bethe", "two"): "bethe_solutions",
    ("bethe", "state"): "bethe_state", ("bethe", "residual"): "bethe_residual",
    ("compare-xxx", None): "compare_xxx", ("paths", "orbit"): "orbit",
    ("paths", "ground-states"): "ground_states", ("action-table", None): "action_table",
}


def load_schema(name: str) -> dict:
    return json.loads(resources.files("motzkin").joinpath("schemas", f"{name}.json").read_text())


COMMANDS = {
    "spectrum": cmd_spectrum, "gsd": cmd_gsd, "algebra": cmd_algebra, "bethe": cmd_bethe,
    "compare-xxx": cmd_compare, "paths": cmd_paths, "action-table": cmd_action,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"{PROG}: error: {e}", file=stderr)
        return 2
    out = result.render(args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(out)
    else:
        stdout.write(out)
    return 0 if result.ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
