"""Command-line entry point: ``chiralqc <command> ...``.

Commands emit CSV (with ``#`` header lines echoing tool version, config and
seed) or JSON. Site arguments are 1-based. Exit status is 0 on success and 2
on validation errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .experiments import (
    FIGURE2_COLUMNS,
    Figure2Config,
    Figure3Config,
    figure2,
    figure3,
    figure3_columns,
)
from .protocols import (
    chirality_from_hadamard,
    chirality_from_qpe,
    cost_model,
    hadamard_exact,
    hadamard_test,
    qpe_project,
    qutrit_qpe,
)
from .qstate import expectation, load_state, save_state, stream
from .operators import chirality_matrix
from .states import SiteTrio

TOOL = "chiralqc"


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _round(v):
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    return v


def render_table(command: str, config: dict, columns: list[str], rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        doc = {
            "tool": TOOL, "version": __version__, "command": command,
            "seed": config.get("seed"), "config": _round(config),
            "columns": columns, "rows": [_round({c: r[c] for c in columns}) for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool={TOOL} version={__version__} command={command} seed={config.get('seed')}\n")
    buf.write(f"# config={json.dumps(_round(config), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def render_json(command: str, config: dict, payload: dict) -> str:
    doc = {"tool": TOOL, "version": __version__, "command": command,
           "seed": config.get("seed"), "config": _round(config), **_round(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _sites(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"sites must be three integers like 1,2,3, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three sites, got {text!r}")
    return parts


def _trio_for(reg, sites) -> SiteTrio:
    return SiteTrio.from_one_based(sites).check(reg.n_sites)


def cmd_figure2(args) -> str:
    cfg = Figure2Config(args.n_min, args.n_max, args.shots, args.seed)
    return render_table("figure2", asdict(cfg), FIGURE2_COLUMNS, figure2(cfg), args.format)


def cmd_figure3(args) -> str:
    cfg = Figure3Config(
        n=args.n, j=args.j, bprime=args.bprime, b_start=args.b_start, b_end=args.b_end,
        b_steps=args.b_steps, sites=args.sites, shots=args.shots, seed=args.seed,
    )
    return render_table("figure3", asdict(cfg), figure3_columns(cfg.n), figure3(cfg), args.format)


def cmd_qpe(args) -> str:
    reg = load_state(args.state_file)
    trio = _trio_for(reg, args.sites)
    record, probs = qutrit_qpe(reg, trio, args.shots, stream(args.seed, 0))
    config = {"state_file": str(args.state_file), "sites": list(args.sites), "shots": args.shots,
              "seed": args.seed, "project": args.project}
    payload = {
        "histogram": {str(k): v for k, v in sorted(record.histogram().items())},
        "probabilities": [float(p) for p in probs],
        "exact_chi": float(probs[2] - probs[1]),
        "estimate": chirality_from_qpe(record).to_dict(),
    }
    if args.project:
        lam, collapsed = qpe_project(reg, trio, stream(args.seed, 1))
        save_state(collapsed, args.project)
        payload["projection"] = {"eigenvalue": lam, "state_file": str(args.project)}
    return render_json("qpe", config, payload)


def cmd_hadamard(args) -> str:
    reg = load_state(args.state_file)
    trio = _trio_for(reg, args.sites)
    basis = args.basis.upper()
    record = hadamard_test(reg, trio, basis, args.shots, stream(args.seed, 0))
    config = {"state_file": str(args.state_file), "sites": list(args.sites), "basis": basis,
              "shots": args.shots, "seed": args.seed}
    exact = hadamard_exact(reg, trio)
    payload = {
        "histogram": {str(k): v for k, v in sorted(record.histogram().items())},
        "ancilla_exact": exact[basis],
        "exact": exact["chi" if basis == "Y" else "chi2"],
        "exact_chi_dense": expectation(reg, chirality_matrix(), trio.sites),
        "estimate": chirality_from_hadamard(record).to_dict(),
    }
    return render_json("hadamard", config, payload)


def cmd_cost(args) -> str:
    cm = cost_model(args.epsilon)
    return render_json("cost", {"epsilon": args.epsilon}, cm.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Chirality measurement experiments.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure2", help="spin-wave chirality vs ring size")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("figure3", help="ground-state chirality of the spiral ring vs field")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--bprime", type=float, default=-0.1)
    p.add_argument("--b-start", type=float, default=0.0)
    p.add_argument("--b-end", type=float, default=1.0)
    p.add_argument("--b-steps", type=int, default=21)
    p.add_argument("--sites", type=_sites, default=(1, 4, 9))
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_figure3)

    p = sub.add_parser("qpe", help="single-qutrit phase estimation on a state file")
    p.add_argument("--state-file", required=True)
    p.add_argument("--sites", type=_sites, default=(1, 2, 3))
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--project", default=None, metavar="PATH",
                   help="run one projective shot and write the collapsed state here")
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("hadamard", help="Hadamard test on a state file")
    p.add_argument("--state-file", required=True)
    p.add_argument("--sites", type=_sites, default=(1, 2, 3))
    p.add_argument("--basis", choices=("x", "y", "X", "Y"), default="y")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_hadamard)

    p = sub.add_parser("cost", help="shot-cost comparison, direct vs Hadamard test")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_cost)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"{TOOL} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
