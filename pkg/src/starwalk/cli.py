"""Command-line entry point.

Exit codes: 0 on success, 2 for invalid parameters, 3 when a numerical
contract (norm preservation, subspace invariance) is violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError, NumericContractError
from .experiments import (
    ExperimentConfig,
    SweepConfig,
    build_graph,
    metadata,
    ratio_curve,
    run_path_experiment,
    scaling_fit,
    sweep,
)
from .reduced import reduced_model
from .spectral import exact_spectrum
from .walk import evolve, initial_state, measure

log = logging.getLogger("starwalk")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def _int_list(values):
    out = []
    for v in values:
        out.extend(int(x) for x in str(v).split(",") if x)
    return out


def _range(text):
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(a, b + 1)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text + "\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def cmd_simulate(args):
    graph = build_graph(args.stars, args.prongs, args.shared)
    state = evolve(graph, initial_state(graph), args.steps)
    reading = measure(graph, state)
    payload = {
        "metadata": metadata(vars_of(args)),
        "steps": args.steps,
        "norm": float(np.linalg.norm(state)),
        "path_probability": reading.path_probability,
        "basis_probabilities": reading.basis_probabilities,
        "edges": [
            {"center": c, "outer": b, "probability": float(p)}
            for (c, b), p in zip(graph.edges, reading.edge_probabilities)
        ],
        "amplitudes": [
            {"source": s.source, "target": s.target,
             "re": float(a.real), "im": float(a.imag)}
            for s, a in zip(graph.states, state)
        ],
    }
    _write_json(args.out, payload)


def cmd_experiment(args):
    report = run_path_experiment(
        ExperimentConfig(args.stars, args.prongs, args.shared, args.max_steps)
    )
    payload = report.to_dict()
    payload["metadata"] = metadata(vars_of(args))
    payload["metadata"]["r_plus_measured_at"] = "predicted_step"
    _write_json(args.out, payload)


def cmd_spectrum(args):
    if args.stars == 2:
        graph = build_graph(2, args.prongs)
        model = reduced_model(graph, ["psi2", "psi3"])
    else:
        graph = build_graph(3, args.prongs, args.shared)
        model = reduced_model(graph)
    payload = exact_spectrum(model).to_dict()
    payload["invariance_residual"] = model.residual
    payload["matrix"] = [[[float(z.real), float(z.imag)] for z in row]
                         for row in model.matrix]
    payload["metadata"] = metadata(vars_of(args))
    _write_json(args.out, payload)


def cmd_ratio_curve(args):
    points = ratio_curve(args.prongs, args.shared_range)
    cols = ["m", "r_plus", "p_psi2", "p_psi3", "p_psi4", "step"]
    lines = [
        f"# {k}: {json.dumps(v, sort_keys=True)}\n"
        for k, v in metadata(vars_of(args)).items()
    ]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for p in points:
        d = asdict(p)
        w.writerow([format(d[c], ".12g") if isinstance(d[c], float) else d[c]
                    for c in cols])
    _write_text(args.out, "".join(lines) + out.getvalue())


def cmd_sweep(args):
    config = SweepConfig(
        stars=args.stars,
        N_list=tuple(_int_list(args.prongs_list)),
        m_list=tuple(_int_list(args.shared_list)) if args.shared_list else (None,),
        max_steps=args.max_steps,
        jobs=args.jobs,
    )
    _write_text(args.out, sweep(config))


def cmd_scaling(args):
    fit = scaling_fit(args.stars, _int_list(args.prongs_list), args.shared)
    payload = asdict(fit)
    payload["metadata"] = metadata(vars_of(args))
    _write_json(args.out, payload)


def vars_of(args):
    return {
        k: (list(v) if isinstance(v, range) else v)
        for k, v in vars(args).items()
        if k not in ("func", "out", "verbose")
    }


def build_parser():
    p = argparse.ArgumentParser(
        prog="starwalk",
        description="Scattering quantum walks on chains of star graphs.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp, stars=True, shared_required=False):
        if stars:
            sp.add_argument("--stars", type=int, choices=(2, 3), required=True)
        sp.add_argument("--prongs", type=int, required=True, help="N, prongs per star")
        sp.add_argument("--shared", type=int, required=shared_required,
                        help="m; neighbouring stars share m-1 vertices")
        sp.add_argument("--out", default="-", help="output file ('-' for stdout)")

    sp = sub.add_parser("simulate", help="evolve the initial state and dump it")
    graph_args(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("experiment", help="path-finding run with prediction vs observation")
    graph_args(sp)
    sp.add_argument("--max-steps", type=int)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("spectrum", help="exact vs asymptotic spectrum of the reduced matrix")
    graph_args(sp, stars=False)
    sp.add_argument("--stars", type=int, choices=(2, 3), default=3)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("ratio-curve", help="r_plus against m (three-star)")
    sp.add_argument("--prongs", type=int, required=True)
    sp.add_argument("--shared-range", type=_range, required=True,
                    help="inclusive range a:b of m values")
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_ratio_curve)

    sp = sub.add_parser("sweep", help="CSV table over a grid of (N, m)")
    sp.add_argument("--stars", type=int, choices=(2, 3), default=3)
    sp.add_argument("--prongs-list", nargs="+", required=True)
    sp.add_argument("--shared-list", nargs="+")
    sp.add_argument("--max-steps", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("scaling", help="fit the optimal step count against N")
    sp.add_argument("--stars", type=int, choices=(2, 3), required=True)
    sp.add_argument("--prongs-list", nargs="+", required=True)
    sp.add_argument("--shared", type=int)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_scaling)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (InvalidParameterError, InsufficientDataError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except NumericContractError as exc:
        log.error("numeric contract violated: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
