"""Command-line front end (``qnetcert``)."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bounds import PurityProfile, beta, epsilon, gamma_c_entry_bound, gamma_c_trace_bound, r_factor
from .certify import (
    DESCRIPTIONS,
    CertStatus,
    RunOptions,
    fidelity_from_distance,
    min_covariance_distance,
    overall_status,
    run_all,
)
from .network import triangle
from .sampling import sample_cqn_state, sample_iqn_state
from .states import covariance, pauli_measurements, rho_alpha

EXIT_CODES = {CertStatus.COMPATIBLE: 0, CertStatus.INCOMPATIBLE: 2, CertStatus.INDETERMINATE: 3}
INPUT_ERROR = 1

log = logging.getLogger("qnetcert")


def _markdown_table(header: list[str], rows: list[list]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines)


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def cmd_certify(args) -> int:
    g = io.load_network(args.network)
    rho = io.load_state(args.state)
    m = io.load_measurements(args.measurements, rho.n_parties)
    noise = None
    if args.noise:
        noise = np.eye(m.total) if args.noise == "identity" else np.asarray(io.load_json(args.noise), dtype=float)
    options = RunOptions(
        model=args.model,
        criteria=tuple(args.criteria.split(",")) if args.criteria else None,
        tau=args.tau,
        tighten=args.tighten,
        multi_trace_coefficient=args.multi_trace_coeff,
        noise_gamma=noise,
    )
    reports = run_all(rho, m, g, options)
    overall = overall_status(reports)
    if args.format == "json":
        out = io.dumps({"overall": overall.value, "model": args.model,
                        "reports": [r.to_dict() for r in reports]})
    else:
        rows = [[r.criterion, r.target, r.status.value, _fmt(r.margin), DESCRIPTIONS[r.criterion]]
                for r in reports]
        out = (f"**Overall ({args.model.upper()}): {overall.value}**\n\n"
               + _markdown_table(["criterion", "excludes", "status", "margin", "test"], rows))
    _emit(out, args.out)
    return EXIT_CODES[overall]


def cmd_bounds(args) -> int:
    rho = io.load_state(args.state)
    m = io.load_measurements(args.measurements, rho.n_parties)
    p = PurityProfile.from_state(rho, m, tau=args.tau)
    values = {
        "rank": p.r,
        "purity": p.tau,
        "l1": p.l1,
        "beta": beta(p.r, p.tau),
        "epsilon": epsilon(p.r, p.tau),
        "R": r_factor(p.r, p.n0),
        "entry_bound": gamma_c_entry_bound(p),
        "trace_bound": gamma_c_trace_bound(p),
    }
    if args.format == "json":
        out = io.dumps(values)
    else:
        out = _markdown_table(["quantity", "value"], [[k, _fmt(v)] for k, v in values.items()])
    _emit(out, args.out)
    return 0


def cmd_fidelity(args) -> int:
    g = io.load_network(args.network)
    if args.covariance:
        gamma = io.covariance_from_dict(io.load_json(args.covariance))
    else:
        if not args.state:
            raise io.FormatError("fidelity needs --state or --covariance")
        rho = io.load_state(args.state)
        gamma = covariance(rho, io.load_measurements(args.measurements, rho.n_parties))
    t0, verdict = min_covariance_distance(gamma, g)
    if np.isnan(t0):
        _emit(f"distance program ended {verdict.status.value}: {verdict.message}", args.out)
        return 3
    f = fidelity_from_distance(t0, args.mode, tol=1e-9)
    if args.format == "json":
        _emit(io.dumps({"t0": t0, "mode": args.mode, "fidelity_bound": f}), args.out)
    else:
        _emit(f"t0 = {t0:.12g}\nfidelity bound ({args.mode}) = {f:.12g}", args.out)
    return 0


def cmd_sample(args) -> int:
    g = io.load_network(args.network)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ss = np.random.SeedSequence(args.seed)
    summary = {"kind": args.kind, "count": args.count, "seed": args.seed, "network": g.to_dict(),
               "samples": []}
    m = pauli_measurements(g.n_parties, "Z")
    for idx, child in enumerate(ss.spawn(args.count)):
        seed = int(child.generate_state(1)[0])
        if args.kind == "iqn":
            rho, prov = sample_iqn_state(g, local_channels=True, seed=seed)
            options = RunOptions(model="iqn")
            prov_d = io.provenance_to_dict(prov)
        else:
            rho, dec = sample_cqn_state(g, args.components, seed=seed)
            options = RunOptions(model="cqn", tau0=dec.average_purity(), n0=dec.max_rank())
            prov_d = {"decomposition": io.decomposition_to_dict(dec)}
        name = f"{args.kind}_{idx:04d}"
        io.write_json(out_dir / f"{name}.state.json", io.state_to_dict(rho))
        io.write_json(out_dir / f"{name}.provenance.json", {"seed": seed, **prov_d})
        reports = run_all(rho, m, g, options)
        summary["samples"].append({"name": name, "overall": overall_status(reports).value,
                                   "statuses": {r.criterion: r.status.value for r in reports}})
    flagged = [s["name"] for s in summary["samples"] if s["overall"] == "Incompatible"]
    summary["all_compatible"] = not flagged
    io.write_json(out_dir / "summary.json", summary)
    print(f"wrote {args.count} {args.kind} samples to {out_dir}; flagged: {len(flagged)}")
    return 0 if not flagged else 2


def cmd_sweep(args) -> int:
    """Margins of every criterion on the rho(alpha) family over the triangle."""
    lo, hi, step = (float(x) for x in args.alphas.split(":"))
    alphas = np.round(np.arange(lo, hi + step / 2, step), 12)
    m = pauli_measurements(3, "Z")
    rows = []
    for a in alphas:
        for r in run_all(rho_alpha(float(a)), m, triangle(), RunOptions(model=args.model)):
            rows.append([float(a), r.criterion, r.status.value, r.margin])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["alpha", "criterion", "status", "margin"])
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qnetcert", description="Network-compatibility tests for multipartite states.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="run the compatibility criteria on one state")
    c.add_argument("--network", required=True, help="network JSON, or triangle / cycle:N / star:N")
    c.add_argument("--state", required=True)
    c.add_argument("--measurements", required=True, help="measurement JSON, or pauli:Z etc.")
    c.add_argument("--criteria", help="comma-separated criterion ids")
    c.add_argument("--model", choices=("cqn", "iqn"), default="cqn")
    c.add_argument("--tau", type=float, help="purity lower bound to use instead of tr(rho^2)")
    c.add_argument("--tighten", action="store_true", help="tighten the classical trace cap numerically")
    c.add_argument("--multi-trace-coeff", type=float, choices=(1.0, 2.0), default=2.0,
                   help="coefficient of tr(Gamma) in the multi-topology bound; 1 is tighter but unproven")
    c.add_argument("--noise", help="noise covariance JSON (or 'identity') for the known-noise test")
    c.add_argument("--format", choices=("json", "markdown"), default="markdown")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    b = sub.add_parser("bounds", help="print the purity-derived constants")
    b.add_argument("--state", required=True)
    b.add_argument("--measurements", required=True)
    b.add_argument("--tau", type=float)
    b.add_argument("--format", choices=("json", "markdown"), default="markdown")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    f = sub.add_parser("fidelity", help="fidelity upper bound to any independent-network state")
    f.add_argument("--network", required=True)
    f.add_argument("--state")
    f.add_argument("--measurements", default="pauli:Z")
    f.add_argument("--covariance", help="target covariance JSON instead of a state")
    f.add_argument("--mode", choices=("generic", "stabilizer"), default="generic")
    f.add_argument("--format", choices=("json", "markdown"), default="markdown")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("sample", help="draw network states and check them")
    s.add_argument("--network", default="triangle")
    s.add_argument("--kind", choices=("iqn", "cqn"), default="iqn")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--components", type=int, default=3, help="mixture size for cqn samples")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_sample)

    w = sub.add_parser("sweep", help="CSV of margins along the rho(alpha) family")
    w.add_argument("--alphas", default="0:1:0.05", help="start:stop:step")
    w.add_argument("--model", choices=("cqn", "iqn"), default="cqn")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2, which is reserved for Incompatible here
        return 0 if exc.code == 0 else INPUT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (io.FormatError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
