"""Command-line front door.

Fans are addressed by builtin name (``toricfano info P4``), by path to a
fan JSON file, or by a name previously registered in the registry
directory (surgeries write their results there).  All numeric output is
exact integers and fractions; ``--json`` switches every command to
canonical machine-readable JSON (sorted keys, deterministic ordering).

Exit codes: 0 success, 1 replay assertion failure, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .fan import ValidationError, fan_from_json, fan_to_json, validate
from .ledger import LedgerError, LedgerState, run_script
from .library import builtin, builtin_names, r3_tower_search
from .mori import (
    InternalCheckError,
    MoriError,
    classified_fixed_divisors,
    classify_fixed_divisor,
    cone_suite,
    fixed_prime_divisors,
    lefschetz_defect,
    mmp_all_for_divisor,
    mmp_for_divisor,
    mori_chambers,
    verify_bounds,
)
from .surgery import SurgeryError, blowup, contract, extremal_rays, flip
from .variety import ToricVariety

EXIT_OK = 0
EXIT_REPLAY_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT_ERROR):
        super().__init__(message)
        self.code = code


# -- session / registry -------------------------------------------------


@dataclass
class Session:
    """Named fan registry backed by a directory, plus a move log."""

    registry: Path
    cache: dict[str, ToricVariety] = field(default_factory=dict)

    def resolve(self, name: str, *, allow_singular: bool = False) -> ToricVariety:
        if name in self.cache:
            return self.cache[name]
        path = Path(name)
        if path.suffix == ".json" or path.exists():
            X = self._load_path(path, allow_singular)
        else:
            reg_path = self.registry / f"{name}.json"
            if reg_path.exists():
                X = self._load_path(reg_path, allow_singular)
            else:
                try:
                    X = builtin(name)
                except KeyError:
                    raise CliError(
                        f"unknown fan {name!r}: not a builtin "
                        f"({', '.join(builtin_names())}), not a file, "
                        f"not in registry {self.registry}"
                    ) from None
        self.cache[name] = X
        return X

    def _load_path(self, path: Path, allow_singular: bool) -> ToricVariety:
        if not path.exists():
            raise CliError(f"no such file: {path}")
        try:
            fan = fan_from_json(path.read_text())
        except ValidationError as e:
            raise CliError(f"{path}: {e}") from None
        try:
            return ToricVariety(fan, allow_singular=allow_singular, name=path.stem)
        except ValidationError:
            # Singular contraction targets are registrable; carry them
            # flagged rather than refusing to load them back.
            try:
                return ToricVariety(fan, allow_singular=True, name=path.stem)
            except ValidationError as e:
                raise CliError(f"{path}: {e}") from None

    def register(self, name: str, X: ToricVariety, move: str) -> Path:
        self.registry.mkdir(parents=True, exist_ok=True)
        out = self.registry / f"{name}.json"
        payload = fan_to_json(X.fan) + "\n"
        if out.exists() and out.read_text() != payload:
            raise CliError(
                f"registry name {name!r} already taken by a different fan; "
                "pick another with --as"
            )
        out.write_text(payload)
        with (self.registry / "moves.log").open("a") as fh:
            fh.write(f"{name}: {move}\n")
        self.cache[name] = X
        return out


# -- formatting ---------------------------------------------------------


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for k, row in enumerate(cells):
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(headers))))
    return "\n".join(lines)


def _ledger_row(s: LedgerState) -> list:
    return [s.chi_minusK, s.degK4, s.c2K2, s.rho, "yes" if s.fano_flag else "no"]


def _parse_int_csv(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError(f"{what} must be a comma-separated list of integers") from None


# -- commands -----------------------------------------------------------


def cmd_validate(session: Session, args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise CliError(f"no such file: {path}")
    try:
        fan = fan_from_json(path.read_text())
    except ValidationError as e:
        if args.json:
            _emit_json({"ok": False, "error": str(e)})
        else:
            print(f"parse error: {e}")
        return EXIT_INPUT_ERROR
    report = validate(fan)
    if args.json:
        _emit_json(report.as_dict())
    else:
        for c in report.checks:
            mark = "pass" if c.passed else "FAIL"
            detail = f"  ({c.detail})" if c.detail else ""
            print(f"{c.name:<20} {mark}{detail}")
    return EXIT_OK if report.ok else EXIT_INPUT_ERROR


def cmd_info(session: Session, args) -> int:
    X = session.resolve(args.name)
    info = {
        "name": X.name or args.name,
        "dim": X.dim,
        "rays": X.n_rays,
        "max_cones": len(X.fan.max_cones),
        "rho": X.rho,
        "smooth": X.is_smooth,
        "fano": X.is_fano if X.is_smooth else None,
        "hash": X.fan.content_hash(),
    }
    if X.is_smooth:
        ledger = X.ledger_state()
        delta, witness = lefschetz_defect(X)
        info.update(
            chi_minusK=ledger.chi_minusK,
            degK4=ledger.degK4,
            c2K2=ledger.c2K2,
            lefschetz_defect=delta,
            delta_witness_ray=witness,
        )
    if args.json:
        _emit_json(info)
    else:
        for k, v in info.items():
            print(f"{k:<18} {v}")
    return EXIT_OK


def _surgery_report(
    session: Session, args, X: ToricVariety, Y: ToricVariety, move: str, data: dict
) -> int:
    new_name = args.as_name or f"{args.name}_{move}"
    out_path = session.register(new_name, Y, f"{move} of {args.name} {data}")
    lb = X.ledger_state() if X.is_smooth else None
    la = Y.ledger_state() if Y.is_smooth else None
    report = {
        "move": move,
        "input": args.name,
        "input_hash": X.fan.content_hash(),
        "output": new_name,
        "output_hash": Y.fan.content_hash(),
        "registered": str(out_path),
        **data,
    }
    if lb and la:
        report["ledger_before"] = lb.as_tuple()
        report["ledger_after"] = la.as_tuple()
        report["ledger_deltas"] = {
            "chi_minusK": la.chi_minusK - lb.chi_minusK,
            "degK4": la.degK4 - lb.degK4,
            "c2K2": la.c2K2 - lb.c2K2,
            "rho": la.rho - lb.rho,
        }
    if args.json:
        _emit_json(report)
    else:
        for k, v in report.items():
            print(f"{k:<14} {v}")
    return EXIT_OK


def cmd_blowup(session: Session, args) -> int:
    X = session.resolve(args.name)
    center = _parse_int_csv(args.center, "--center")
    Y = blowup(X, center)
    return _surgery_report(session, args, X, Y, "blowup", {"center": list(center)})


def cmd_contract(session: Session, args) -> int:
    X = session.resolve(args.name)
    Y = contract(X, args.ray, allow_singular=args.allow_singular)
    data = {"ray": args.ray, "smooth_result": Y.is_smooth}
    return _surgery_report(session, args, X, Y, "contract", data)


def cmd_flip(session: Session, args) -> int:
    X = session.resolve(args.name)
    cls = _parse_int_csv(args.curve_class, "--class")
    if len(cls) != X.rho:
        raise CliError(f"--class must have rho = {X.rho} coordinates")
    Y, circuits = flip(X, cls)
    data = {
        "class": list(cls),
        "circuits": [list(c.support) for c in circuits],
    }
    return _surgery_report(session, args, X, Y, "flip", data)


def _parse_divisor(X: ToricVariety, text: str):
    if text == "minusK":
        return [1] * X.n_rays
    if "," in text:
        vec = _parse_int_csv(text, "--divisor")
        if len(vec) != X.n_rays:
            raise CliError(f"divisor vector must have {X.n_rays} entries")
        return vec
    try:
        ray = int(text)
    except ValueError:
        raise CliError("divisor must be a ray index, a coefficient vector, or 'minusK'") from None
    if not 0 <= ray < X.n_rays:
        raise CliError(f"ray index {ray} out of range")
    return ray


def cmd_mmp(session: Session, args) -> int:
    X = session.resolve(args.name)
    divisor = _parse_divisor(X, args.divisor)
    if args.exhaustive:
        traces = mmp_all_for_divisor(X, divisor, max_steps=args.max_steps)
    else:
        traces = [mmp_for_divisor(X, divisor, max_steps=args.max_steps)]
    payload = []
    for t in traces:
        payload.append(
            {
                "outcome": t.outcome,
                "steps": [
                    {
                        "move": s.move,
                        "class": list(s.curve_class.coords),
                        "kind": s.descriptor.kind,
                        "type_label": s.descriptor.type_label,
                        "circuits": s.circuit_count,
                        "fan_after": s.fan_after.content_hash(),
                    }
                    for s in t.steps
                ],
                "final_hash": t.final.content_hash(),
            }
        )
    if args.json:
        _emit_json({"traces": payload})
    else:
        for i, t in enumerate(payload):
            print(f"trace {i}: outcome {t['outcome']}, final {t['final_hash']}")
            rows = [
                [j, s["move"], s["kind"], s["type_label"] or "-", s["class"], s["circuits"]]
                for j, s in enumerate(t["steps"])
            ]
            print(_table(["step", "move", "kind", "type", "class", "circuits"], rows))
    return EXIT_OK


def cmd_fixed(session: Session, args) -> int:
    X = session.resolve(args.name)
    reports = classified_fixed_divisors(X, max_steps=args.max_steps)
    if args.json:
        _emit_json({"fixed_divisors": [r.as_dict() for r in reports]})
    else:
        rows = [
            [
                r.ray_index,
                X.fan.ray_label(r.ray_index),
                r.type_label,
                r.pairing_D_CD,
                r.degK_CD,
            ]
            for r in reports
        ]
        print(_table(["ray", "label", "type", "D.C_D", "-K.C_D"], rows))
    return EXIT_OK


def cmd_chambers(session: Session, args) -> int:
    X = session.resolve(args.name)
    ch = mori_chambers(X)
    if args.json:
        _emit_json(ch.as_dict())
    else:
        print(f"chambers: {ch.count}")
        rows = [
            [ch.fans[i].content_hash(), ch.fans[j].content_hash(), list(cls)]
            for i, j, cls in ch.adjacency
        ]
        print(_table(["from", "to", "flipped class"], rows))
        for line in ch.excluded:
            print(f"excluded: {line}")
    return EXIT_OK


def cmd_cones(session: Session, args) -> int:
    X = session.resolve(args.name)
    suite = cone_suite(X)
    obj = suite.as_dict()
    obj["basis_note"] = (
        "divisor classes pair with curve classes by dot product; "
        "coordinates over the HNF-reduced relation basis of the rays"
    )
    if args.json:
        _emit_json(obj)
    else:
        for cone_name in ("nef", "mov", "eff", "ne", "mov_curves"):
            data = obj[cone_name]
            print(f"{cone_name}:")
            print(f"  generators    {data['generators']}")
            print(f"  facet normals {data['facet_normals']}")
    return EXIT_OK


def cmd_delta(session: Session, args) -> int:
    X = session.resolve(args.name)
    delta, witness = lefschetz_defect(X)
    bounds = verify_bounds(X)
    if args.json:
        _emit_json(
            {
                "delta": delta,
                "witness_ray": witness,
                "bounds": [{"claim": c, "holds": h} for c, h in bounds],
            }
        )
    else:
        print(f"lefschetz defect: {delta} (witness ray {witness})")
        for claim, holds in bounds:
            print(f"{'pass' if holds else 'FAIL'}  {claim}")
    if not all(h for _, h in bounds):
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_ledger(session: Session, args) -> int:
    path = Path(args.script)
    if not path.exists():
        raise CliError(f"no such file: {path}")
    steps = run_script(path.read_text())
    if args.json:
        _emit_json(
            {
                "trajectory": [
                    {
                        "line": s.lineno,
                        "move": s.text,
                        "chi_minusK": s.state.chi_minusK,
                        "degK4": s.state.degK4,
                        "c2K2": s.state.c2K2,
                        "rho": s.state.rho,
                    }
                    for s in steps
                ]
            }
        )
    else:
        rows = [
            [s.text, s.state.chi_minusK, s.state.degK4, s.state.c2K2, s.state.rho]
            for s in steps
        ]
        print(_table(["move", "chi(-K)", "(-K)^4", "(-K)^2.c2", "rho"], rows))
    return EXIT_OK


# -- replays ------------------------------------------------------------


@dataclass
class Checklist:
    items: list[tuple[str, bool]] = field(default_factory=list)

    def check(self, description: str, passed: bool) -> None:
        self.items.append((description, bool(passed)))

    @property
    def ok(self) -> bool:
        return all(p for _, p in self.items)

    def emit(self, as_json: bool) -> None:
        if as_json:
            _emit_json(
                {
                    "ok": self.ok,
                    "checks": [{"check": d, "passed": p} for d, p in self.items],
                }
            )
        else:
            for d, p in self.items:
                print(f"{'pass' if p else 'FAIL'}  {d}")
            print(f"{'all checks passed' if self.ok else 'SOME CHECKS FAILED'}")


def _replay_ex61(cl: Checklist) -> None:
    script = "start P4\n" + "blowup point\n" * 8 + "flip dir=s2f s=36\n"
    steps = run_script(script)
    mid = steps[8].state
    final = steps[-1].state
    cl.check("eight point blow-ups of P4 reach chi(-K) = h0(-K) = 6", mid.chi_minusK == 6)
    cl.check("(-K)^4 = -23 before the flips", mid.degK4 == -23)
    cl.check("(-K)^4 = 13 after flipping the 28+8 = 36 loci", final.degK4 == 13)
    cl.check("rho = 9 and chi unchanged by the flips",
             final.rho == 9 and final.chi_minusK == 6)


def _replay_ex52(cl: Checklist) -> None:
    X = builtin("D3")
    cl.check("blow-up of the negative section has rho = 3", X.rho == 3)
    cl.check("it is Fano", X.is_fano)
    exc = X.n_rays - 1
    fixed = {r.ray_index for r in fixed_prime_divisors(X)}
    cl.check("the exceptional divisor is a fixed prime divisor", exc in fixed)
    traces = mmp_all_for_divisor(X, exc)
    by_label = {
        t.terminal_descriptor.type_label: t
        for t in traces
        if t.outcome == "contracted"
    }
    cl.check(
        "a direct smooth (3,2) contraction is one MMP for it",
        "(3,2)^sm" in by_label and by_label["(3,2)^sm"].flip_count == 0,
    )
    cl.check(
        "a flip followed by a (3,0) contraction is another",
        "(3,0)_other" in by_label and by_label["(3,0)_other"].flip_count == 1,
    )
    if "(3,0)_other" in by_label:
        t = by_label["(3,0)_other"]
        flipped = ToricVariety(t.steps[0].fan_after)
        pairings = {w.relation[exc] for w in flipped.walls if w.relation[exc] < 0}
        cl.check(
            "after the flip the transformed divisor's negative wall pairs to -2",
            pairings == {-2},
        )
    else:  # pragma: no cover
        cl.check("after the flip the transformed divisor's negative wall pairs to -2", False)


def _replay_ex511(cl: Checklist) -> None:
    X = builtin("B511")
    cl.check("the P1-bundle over P1 x P2 has rho = 3", X.rho == 3)
    cl.check("it is Fano", X.is_fano)
    section = 0
    fixed = [r for r in fixed_prime_divisors(X) if r.ray_index == section]
    cl.check("the section divisor is fixed", bool(fixed))
    labels = {
        d.type_label
        for _, d in extremal_rays(X)
        if d.kind == "divisorial" and d.exc_rays == (section,)
    }
    cl.check(
        "it carries divisorial rays of types (3,1)^sm and (3,2)^sm",
        labels == {"(3,1)^sm", "(3,2)^sm"},
    )
    if fixed:
        rep = classify_fixed_divisor(X, fixed[0])
        cl.check(
            "its type is ambiguous between the two",
            rep.type_label == "ambiguous((3,1)^sm, (3,2)^sm)",
        )
    else:  # pragma: no cover
        cl.check("its type is ambiguous between the two", False)


def _replay_ex62(cl: Checklist) -> None:
    tower = r3_tower_search()
    cl.check("a fixed-point pair with a three-flip Fano tower exists", True)
    cl.check("the tower uses exactly 3 flips", tower.flips == 3)
    X = tower.fano
    cl.check("the result is Fano with rho = 5", X.is_fano and X.rho == 5)
    reports = classified_fixed_divisors(X)
    cl.check("it has exactly 6 fixed prime divisors", len(reports) == 6)
    labels = [r.type_label for r in reports]
    cl.check(
        "exactly two of them are smooth point blow-downs",
        labels.count("(3,0)^sm") == 2,
    )
    point_exceptionals = {X.n_rays - 2, X.n_rays - 1}
    smooth_point_rays = {
        r.ray_index for r in reports if r.type_label == "(3,0)^sm"
    }
    cl.check(
        "those two are the exceptional divisors of the point blow-ups",
        smooth_point_rays == point_exceptionals,
    )
    cl.check(
        "the search reproduces the frozen builtin R3 fan",
        X.fan.canonical_key() == builtin("R3").fan.canonical_key(),
    )


REPLAYS = {
    "ex61_ledger": _replay_ex61,
    "ex52": _replay_ex52,
    "ex511": _replay_ex511,
    "ex62": _replay_ex62,
}


def cmd_replay(session: Session, args) -> int:
    cl = Checklist()
    REPLAYS[args.example](cl)
    cl.emit(args.json)
    return EXIT_OK if cl.ok else EXIT_REPLAY_FAILURE


# -- entry point --------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # The same flags are accepted before and after the subcommand; the
    # post-subcommand copies default to SUPPRESS so they never clobber
    # values given up front.
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--json",
        action="store_true",
        default=d if suppress else False,
        help="machine-readable output",
    )
    parser.add_argument(
        "--registry",
        default=d if suppress else "fans",
        help="directory for registered fans (default: ./fans)",
    )
    parser.add_argument(
        "--max-steps",
        type=int,
        default=d if suppress else 64,
        help="MMP step cap (default 64)",
    )
    parser.add_argument(
        "--exhaustive",
        action="store_true",
        default=d if suppress else False,
        help="enumerate all MMP choice sequences",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricfano",
        description="Exact birational geometry of smooth toric Fano 4-folds.",
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a fan JSON file")
    _global_flags(p, suppress=True)
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="summary: rho, Fano flag, ledger, delta")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("blowup", help="blow up an invariant center")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.add_argument("--center", required=True, help="ray indices, e.g. 0,1,2,3")
    p.add_argument("--as", dest="as_name", default=None)
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("contract", help="contract a divisorial ray")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.add_argument("--ray", type=int, required=True)
    p.add_argument("--allow-singular", action="store_true")
    p.add_argument("--as", dest="as_name", default=None)
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("flip", help="flip a small extremal curve class")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.add_argument("--class", dest="curve_class", required=True,
                   help="curve class coordinates, e.g. 1,-1,0")
    p.add_argument("--as", dest="as_name", default=None)
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("mmp", help="run a divisor-directed MMP")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.add_argument("--divisor", required=True,
                   help="ray index, coefficient vector, or 'minusK'")
    p.set_defaults(func=cmd_mmp)

    p = sub.add_parser("fixed", help="fixed prime divisors with types")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.set_defaults(func=cmd_fixed)

    p = sub.add_parser("chambers", help="chamber decomposition of the movable cone")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.set_defaults(func=cmd_chambers)

    p = sub.add_parser("cones", help="Nef/Mov/Eff and curve-side duals")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.set_defaults(func=cmd_cones)

    p = sub.add_parser("delta", help="Lefschetz defect and bound assertions")
    _global_flags(p, suppress=True)
    p.add_argument("name")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("ledger", help="run an invariant move script")
    _global_flags(p, suppress=True)
    p.add_argument("script")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("replay", help="replay a worked example end to end")
    _global_flags(p, suppress=True)
    p.add_argument("example", choices=sorted(REPLAYS))
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    session = Session(registry=Path(args.registry))
    try:
        return args.func(session, args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except InternalCheckError as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValidationError, SurgeryError, MoriError, LedgerError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
