"""
End-to-end path-finding experiments.

All observations sit on the even-step grid (whole applications of ``U^2``).
The measurement step predicted from the dominant frequency is rounded to
the nearest even integer, ties going down. The observed optimum is the
argmax of path probability within 1.5 predicted measurement times, which
keeps later revivals out of the search.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import InsufficientDataError, InvalidParameterError, NumericContractError
from .graph import build_three_star, build_two_star, center_label
from .reduced import INVARIANCE_TOL, reduced_model
from .spectral import exact_spectrum, gamma_pm
from .walk import initial_state, measure, step_operator

__all__ = [
    "TOLERANCES",
    "ExperimentConfig",
    "ExperimentReport",
    "SweepConfig",
    "RatioPoint",
    "ScalingFit",
    "build_graph",
    "round_even",
    "predicted_measurement_step",
    "predicted_measurement_time",
    "run_path_experiment",
    "ratio_curve",
    "scaling_fit",
    "sweep",
    "sweep_rows",
    "metadata",
    "CSV_COLUMNS",
]

TOLERANCES = {
    "norm": 1e-10,
    "invariance_residual": INVARIANCE_TOL,
    "csv_significant_digits": 12,
}

CSV_COLUMNS = (
    "stars",
    "N",
    "m",
    "predicted_step",
    "observed_step",
    "max_path_probability",
    "path_probability_at_prediction",
    "p_plus",
    "r_plus",
    "error",
)

# argmax window, in units of the predicted measurement time
SEARCH_WINDOW = 1.5


def build_graph(stars, N, m=None):
    if stars == 2:
        return build_two_star(N)
    if stars == 3:
        if m is None:
            raise InvalidParameterError("three-star chains need m")
        return build_three_star(N, m)
    raise InvalidParameterError(f"stars must be 2 or 3, got {stars}")


def round_even(x):
    """Nearest even integer to ``x``; exact ties go to the lower one."""
    lo = 2 * int(np.floor(x / 2))
    return lo if x - lo <= lo + 2 - x else lo + 2


def predicted_measurement_time(graph):
    """Unrounded step count at which the walk localizes on the paths."""
    t = graph.scatter(center_label(1)).t
    if graph.stars == 2:
        gamma = t * np.sqrt(3 * (graph.N - 3))
        return float(np.pi / gamma)
    gp, _ = gamma_pm(graph.m)
    return float(2 * np.pi / np.sqrt(2 * gp * t))


def predicted_measurement_step(graph):
    return round_even(predicted_measurement_time(graph))


@dataclass(frozen=True)
class ExperimentConfig:
    stars: int
    N: int
    m: int | None = None
    max_steps: int | None = None

    def __post_init__(self):
        if self.stars == 2 and self.m is not None and self.m != 3:
            raise InvalidParameterError("two-star chains have a fixed sharing (m = 3)")
        if self.max_steps is not None and (self.max_steps < 0 or self.max_steps % 2):
            raise InvalidParameterError("max_steps must be a non-negative even integer")


@dataclass
class ExperimentReport:
    """Scalar outcomes of one path-finding run plus the even-step series.

    ``r_plus`` and ``p_plus`` are only filled in for three-star chains.
    ``r_plus`` is read at the predicted step, not at the observed optimum.
    """

    stars: int
    N: int
    m: int | None
    steps: list
    path_series: list
    predicted_time: float
    predicted_step: int
    observed_step: int
    max_path_probability: float
    path_probability_at_prediction: float
    basis_probabilities_at_prediction: dict
    p_plus: float | None = None
    p_plus_asymptotic: float | None = None
    r_plus: float | None = None
    elapsed_seconds: float = field(default=0.0, compare=False)

    def to_dict(self):
        return asdict(self)


def run_path_experiment(config):
    graph = build_graph(config.stars, config.N, config.m if config.stars == 3 else None)
    predicted = predicted_measurement_step(graph)
    max_steps = config.max_steps
    if max_steps is None:
        max_steps = 2 * round_even(2 * predicted_measurement_time(graph))
    if max_steps < 2 * predicted:
        raise InvalidParameterError(
            f"max_steps={max_steps} is below twice the predicted step {predicted}"
        )

    t0 = time.perf_counter()
    op = step_operator(graph)
    state = initial_state(graph)
    steps, series = [], []
    at_prediction = None
    for s in range(0, max_steps + 1, 2):
        if s:
            state = op.apply(op.apply(state))
        reading = measure(graph, state)
        steps.append(s)
        series.append(reading.path_probability)
        if s == predicted:
            at_prediction = reading
            norm = np.linalg.norm(state)
            if abs(norm - 1) > TOLERANCES["norm"]:
                raise NumericContractError(f"norm drifted to {norm!r}")

    window = SEARCH_WINDOW * predicted_measurement_time(graph)
    candidates = [i for i, s in enumerate(steps) if s <= window]
    best = max(candidates, key=lambda i: series[i])

    report = ExperimentReport(
        stars=graph.stars,
        N=graph.N,
        m=graph.m if graph.stars == 3 else None,
        steps=steps,
        path_series=series,
        predicted_time=predicted_measurement_time(graph),
        predicted_step=predicted,
        observed_step=steps[best],
        max_path_probability=series[best],
        path_probability_at_prediction=at_prediction.path_probability,
        basis_probabilities_at_prediction=at_prediction.basis_probabilities,
    )
    if graph.stars == 3:
        spectrum = exact_spectrum(reduced_model(graph))
        report.p_plus = spectrum.p_plus
        report.p_plus_asymptotic = spectrum.p_plus_asymptotic
        b = at_prediction.basis_probabilities
        report.r_plus = b["psi3"] / b["psi2"]
    report.elapsed_seconds = time.perf_counter() - t0
    return report


@dataclass(frozen=True)
class RatioPoint:
    m: int
    r_plus: float
    p_psi2: float
    p_psi3: float
    p_psi4: float
    step: int


def ratio_curve(N, m_range):
    """``r_plus = P(psi3) / P(psi2)`` at each ``m``'s predicted measurement step."""
    out = []
    for m in m_range:
        graph = build_three_star(N, m)
        step = predicted_measurement_step(graph)
        op = step_operator(graph)
        state = initial_state(graph)
        for _ in range(step):
            state = op.apply(state)
        b = measure(graph, state).basis_probabilities
        out.append(RatioPoint(m, b["psi3"] / b["psi2"], b["psi2"], b["psi3"],
                              b["psi4"], step))
    return out


@dataclass(frozen=True)
class ScalingFit:
    stars: int
    m: int | None
    N_list: tuple
    observed_steps: tuple
    predicted_steps: tuple
    exponent: float
    prefactor: float


def scaling_fit(stars, N_list, m=None):
    """Least-squares slope of log(observed optimal step) against log(N)."""
    N_list = tuple(int(n) for n in N_list)
    reports = [
        run_path_experiment(ExperimentConfig(stars, n, m if stars == 3 else None))
        for n in N_list
    ]
    observed = tuple(r.observed_step for r in reports)
    if len(set(observed)) < 3 or any(s <= 0 for s in observed):
        raise InsufficientDataError(
            f"need at least 3 distinct positive optima, got {observed}"
        )
    slope, intercept = np.polyfit(np.log(N_list), np.log(observed), 1)
    return ScalingFit(
        stars=stars,
        m=m if stars == 3 else None,
        N_list=N_list,
        observed_steps=observed,
        predicted_steps=tuple(r.predicted_step for r in reports),
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
    )


@dataclass(frozen=True)
class SweepConfig:
    stars: int
    N_list: tuple
    m_list: tuple = (None,)
    max_steps: int | None = None
    jobs: int = 1


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _sweep_row(stars, N, m, max_steps):
    row = {"stars": stars, "N": N, "m": m}
    try:
        r = run_path_experiment(ExperimentConfig(stars, N, m, max_steps))
    except (InvalidParameterError, NumericContractError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        predicted_step=r.predicted_step,
        observed_step=r.observed_step,
        max_path_probability=r.max_path_probability,
        path_probability_at_prediction=r.path_probability_at_prediction,
        p_plus=r.p_plus,
        r_plus=r.r_plus,
    )
    return row


def sweep_rows(config):
    """One dict per ``(N, m)`` pair, sorted by N then m."""
    ms = config.m_list if config.stars == 3 else (None,)
    pairs = sorted(
        {(int(n), None if m is None else int(m)) for n in config.N_list for m in ms},
        key=lambda p: (p[0], -1 if p[1] is None else p[1]),
    )
    args = [(config.stars, n, m, config.max_steps) for n, m in pairs]
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(lambda a: _sweep_row(*a), args))
    return [_sweep_row(*a) for a in args]


def metadata(parameters):
    return {
        "tool": "starwalk",
        "version": __version__,
        "parameters": parameters,
        "tolerances": TOLERANCES,
    }


def sweep(config):
    """Run a parameter sweep and return the CSV text.

    Leading ``#`` lines carry the metadata block; the header follows.
    """
    rows = sweep_rows(config)
    buf = io.StringIO()
    params = {
        "stars": config.stars,
        "N_list": sorted(int(n) for n in config.N_list),
        "m_list": sorted(int(m) for m in config.m_list if m is not None),
        "max_steps": config.max_steps,
    }
    for key, value in metadata(params).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in CSV_COLUMNS])
    return buf.getvalue()
