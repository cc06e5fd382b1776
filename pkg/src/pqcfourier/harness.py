"""Experiment runner and the ``pqc-fourier`` command line.

Subcommands::

    fig3            mean/variance of sum |c_k|^2 over (n, L) for the QNN model
    fig4            per-frequency median and max |c_k| at a single depth
    gradvar         parameter-shift gradient variance of deep HEA circuits
    expressibility  trace-norm expressibility of HEA circuits (n <= 5)
    spectrum        one spectrum per (n, L) at a seeded parameter draw

Settings come from defaults, then ``--config`` (JSON), then flags.
Exit status is 0 on success, 2 on a configuration error and 3 when some
(n, L) rows were skipped.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, sim
from .circuits import CircuitTemplate, expectation_model, hea, observable_for, qnn
from .diagnostics import (
    EXPRESSIBILITY_FIELDS,
    GRADVAR_FIELDS,
    expressibility2,
    fit_decay_base,
    gradient_variance,
    haar_second_moment,
    trace_norm,
)
from .errors import ConfigurationError, StructuralError
from .fourier import (
    STATS_FIELDS,
    model_spectrum,
    parseval_sum,
    sample_flat_params,
    sample_spectra,
    stats_row,
    SumSquareStats,
    write_csv,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("fig3", "fig4", "gradvar", "expressibility", "spectrum")
FIG4_FIELDS = ["n", "k", "median_abs", "max_abs"]
SPECTRUM_FIELDS = ["n", "L", "k", "re", "im", "abs2"]


@dataclass
class ExperimentConfig:
    experiment: str = "fig3"
    qubits: list = field(default_factory=lambda: [2, 4, 6, 8])
    layers: list = field(default_factory=lambda: list(range(5, 51, 5)))
    samples: int = 300
    seed: int = 42
    output_type: str = "expectation"
    axis: str = "Y"
    entangler: str = "chain"
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    draws: int = 5000  # expressibility Monte-Carlo draws M
    repeats: int = 3  # expressibility seeds: seed, seed + 1, ...
    index: int = 0  # gradvar parameter index
    template: str | None = None  # JSON circuit template for gradvar/expressibility

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"experiment must be one of {EXPERIMENTS}")
        if not self.qubits or not self.layers:
            raise ConfigurationError("qubit and layer lists must be non-empty")
        if any(int(n) < 1 for n in self.qubits) or any(int(L) < 1 for L in self.layers):
            raise ConfigurationError("qubit and layer counts must be positive")
        if self.samples < 2:
            raise ConfigurationError("samples must be at least 2")
        if self.output_type not in ("expectation", "probability"):
            raise ConfigurationError("output_type must be expectation or probability")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        if self.entangler not in ("chain", "ring"):
            raise ConfigurationError("entangler must be chain or ring")
        if not self.axis or set(self.axis.upper()) - set("XYZ"):
            raise ConfigurationError("axis must be drawn from X, Y, Z")
        if self.experiment == "fig4" and len(self.layers) != 1:
            raise ConfigurationError("fig4 takes a single layer count")
        if self.workers < 1 or self.repeats < 1:
            raise ConfigurationError("workers and repeats must be positive")
        self.qubits = [int(n) for n in self.qubits]
        self.layers = [int(L) for L in self.layers]
        return self


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    fields: list
    rows: list
    skipped: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    version: str = __version__

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_csv(buf, self.rows, self.fields)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "config": dataclasses.asdict(self.config),
            "rows": self.rows,
            "skipped": self.skipped,
            "extra": self.extra,
            "wall_clock": self.wall_clock,
            "version": self.version,
            "seed": self.seed,
        }, indent=2, default=_json_default)

    def dumps(self) -> str:
        return self.to_json() if self.config.format == "json" else self.to_csv()


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _skip(record_skips, n, L, reason):
    log.warning("skipping n=%s L=%s: %s", n, L, reason)
    record_skips.append({"n": n, "L": L, "reason": reason})


def _qubit_cap(n: int) -> str | None:
    if n > sim.MAX_QUBITS:
        return f"simulator cap n <= {sim.MAX_QUBITS}"
    if n < 2:
        return "layered circuits need n >= 2"
    return None


def _timed(fn):
    def wrapper(config: ExperimentConfig) -> ExperimentRecord:
        config.validate()
        start = time.perf_counter()
        record = fn(config)
        record.wall_clock = time.perf_counter() - start
        return record
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def run_fig3(config: ExperimentConfig) -> ExperimentRecord:
    """Mean and variance of the Parseval sum for ``qnn(n, L)`` per (n, L)."""
    rows, skipped = [], []
    for n in config.qubits:
        for L in config.layers:
            reason = _qubit_cap(n)
            if reason:
                _skip(skipped, n, L, reason)
                continue
            model = qnn(n, L, config.axis, config.entangler, config.output_type)
            spectra = sample_spectra(model, config.samples, config.seed, config.workers)
            stats = SumSquareStats.from_values([parseval_sum(s) for s in spectra])
            rows.append(stats_row(n, L, stats, config.output_type))
            log.info("fig3 n=%d L=%d mean=%.6g", n, L, stats.mean)
    return ExperimentRecord(config, STATS_FIELDS, rows, skipped)


@_timed
def run_fig4(config: ExperimentConfig) -> ExperimentRecord:
    """Median and max of ``|c_k|`` over parameter draws, per n and k."""
    rows, skipped = [], []
    L = config.layers[0]
    for n in config.qubits:
        reason = _qubit_cap(n)
        if reason:
            _skip(skipped, n, L, reason)
            continue
        model = qnn(n, L, config.axis, config.entangler, config.output_type)
        spectra = sample_spectra(model, config.samples, config.seed, config.workers)
        mags = np.abs(np.array([s.coeffs for s in spectra]))
        median, peak = np.median(mags, axis=0), mags.max(axis=0)
        for j, k in enumerate(spectra[0].frequencies):
            rows.append({"n": n, "k": int(k), "median_abs": float(median[j]),
                         "max_abs": float(peak[j])})
    return ExperimentRecord(config, FIG4_FIELDS, rows, skipped, {"L": L})


def _custom_template(config: ExperimentConfig) -> CircuitTemplate | None:
    if config.template is None:
        return None
    try:
        with open(config.template) as fh:
            return CircuitTemplate.from_json(fh.read())
    except (OSError, json.JSONDecodeError, StructuralError) as exc:
        raise ConfigurationError(f"cannot load template {config.template}: {exc}") from exc


def _hea_jobs(config: ExperimentConfig):
    """(n, L, template) triples, or reasons for skipping."""
    custom = _custom_template(config)
    if custom is not None:
        yield custom.n, "template", custom, None
        return
    for n in config.qubits:
        for L in config.layers:
            reason = _qubit_cap(n)
            yield n, L, None if reason else hea(n, L, config.axis, config.entangler), reason


@_timed
def run_gradvar(config: ExperimentConfig) -> ExperimentRecord:
    """Shift-rule gradient variance per (n, L) with a fitted decay base."""
    rows, skipped, entries = [], [], []
    if config.samples < 30:
        raise ConfigurationError("gradvar needs at least 30 samples")
    for n, L, template, reason in _hea_jobs(config):
        if reason:
            _skip(skipped, n, L, reason)
            continue
        model = expectation_model(template, observable_for(n, config.output_type))
        if not 0 <= config.index < template.n_params:
            raise ConfigurationError(f"parameter index {config.index} out of range")
        entry = gradient_variance(model, config.index, config.samples, config.seed,
                                  config.workers, L=L)
        entries.append(entry)
        rows.append(entry.row())
    extra = {}
    if len({e.n for e in entries}) >= 2 and all(e.variance > 0 for e in entries):
        report = fit_decay_base(entries)
        extra = {"b": report.b, "r2": report.r2, "residuals": report.residuals.tolist()}
        log.info("fitted decay base b=%.4g (R^2=%.4f)", report.b, report.r2)
    return ExperimentRecord(config, GRADVAR_FIELDS, rows, skipped, extra)


@_timed
def run_expressibility(config: ExperimentConfig) -> ExperimentRecord:
    """Expressibility rows per (n, L, seed) plus a Haar-vs-Haar control per n."""
    rows, skipped = [], []
    seeds = [config.seed + r for r in range(config.repeats)]
    controlled = set()
    for n, L, template, reason in _hea_jobs(config):
        if reason is None and n > 5:
            reason = "expressibility cap n <= 5"
        if reason:
            _skip(skipped, n, L, reason)
            continue
        state = sim.zero_state(n)
        if n not in controlled:
            haar = haar_second_moment(state).matrix
            rows.append({"n": n, "L": "haar", "M": 0,
                         "epsilon2": trace_norm(haar - haar), "seed": config.seed})
            controlled.add(n)
        for seed in seeds:
            eps = expressibility2(template, state, config.draws, seed)
            rows.append({"n": n, "L": L, "M": config.draws, "epsilon2": eps, "seed": seed})
    return ExperimentRecord(config, EXPRESSIBILITY_FIELDS, rows, skipped)


@_timed
def run_spectrum(config: ExperimentConfig) -> ExperimentRecord:
    """Coefficients of ``qnn(n, L)`` at the parameter draw of sample 0."""
    rows, skipped = [], []
    for n in config.qubits:
        for L in config.layers:
            reason = _qubit_cap(n)
            if reason:
                _skip(skipped, n, L, reason)
                continue
            model = qnn(n, L, config.axis, config.entangler, config.output_type)
            model = model.with_params(sample_flat_params(model, config.seed, 0))
            for row in model_spectrum(model).rows():
                rows.append({"n": n, "L": L, **row})
    return ExperimentRecord(config, SPECTRUM_FIELDS, rows, skipped)


RUNNERS = {
    "fig3": run_fig3,
    "fig4": run_fig4,
    "gradvar": run_gradvar,
    "expressibility": run_expressibility,
    "spectrum": run_spectrum,
}


def run_experiment(config: ExperimentConfig) -> ExperimentRecord:
    config.validate()
    return RUNNERS[config.experiment](config)


# ----------------------------------------------------------------------
# command line
# ----------------------------------------------------------------------
def parse_int_list(text: str) -> list[int]:
    """``"2,4,6"`` or ranges ``"5..50:5"`` (inclusive, optional step)."""
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ".." in part:
                span, _, step = part.partition(":")
                lo, hi = span.split("..")
                out.extend(range(int(lo), int(hi) + 1, int(step or 1)))
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse integer list {text!r}") from exc
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pqc-fourier", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config")
    p.add_argument("--qubits")
    p.add_argument("--layers")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int)
    p.add_argument("--output-type", dest="output_type", choices=("expectation", "probability"))
    p.add_argument("--axis")
    p.add_argument("--entangler", choices=("chain", "ring"))
    p.add_argument("--draws", type=int, help="Monte-Carlo draws M for expressibility")
    p.add_argument("--repeats", type=int, help="number of expressibility seeds")
    p.add_argument("--index", type=int, help="parameter index for gradvar")
    p.add_argument("--template", help="JSON circuit template for gradvar/expressibility")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(values) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields {sorted(unknown)}")
    for name in known:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    values["experiment"] = args.experiment
    for name in ("qubits", "layers"):
        if isinstance(values.get(name), str):
            values[name] = parse_int_list(values[name])
    if args.experiment == "fig4" and "layers" not in values:
        values["layers"] = [15]
    return ExperimentConfig(**values).validate()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = build_config(args)
        record = run_experiment(config)
    except ConfigurationError as exc:
        print(f"pqc-fourier: {exc}", file=sys.stderr)
        return 2
    text = record.dumps()
    if config.output:
        with open(config.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 3 if record.skipped else 0


if __name__ == "__main__":
    sys.exit(main())
