"""Experiment harness: config parsing, cell execution, CSV emission.

Config files are a flat key = value format (a small TOML-like subset, chosen
so any language can parse it):

    # comment
    [dataset]
    kind = "twitch-like"        # twitch-like | corel-like | files
    n = 500
    seed = 7
    colors = 6
    skew = 0.6
    degree = 10.0
    # kind = "files" instead names the inputs:
    # graph = "graph.edges"  labels = "graph.labels"   (coverage objective)
    # tags = "items.tags"    labels = "items.labels"   (tag objective)

    [fairness]
    p_total = 0.9               # p_c = p_total / colors, exact rational
    q_total = 1.1               # q_c = q_total / colors
    # or per-color lists: p = ["3/20", ...]  q = ["11/60", ...]

    [run]
    algorithms = ["greedy-bi", "greedy-fairness-bi", "threshold-fairness-bi"]
    taus = [100, 200]
    seeds = [0]
    epsilon = 0.1
    alpha = 0.2
    delta = 0.1
    scale = 1000                # desk-scale divisor for Monte-Carlo samples

Values are ints, floats, true/false, "strings" (rationals like "9/10" are
read exactly), or flat [lists] of those. One record is produced per
(algorithm, tau, seed) cell; cells that fail (e.g. tau above f(U)) become
error entries and the run continues. Wall time is measured around the
algorithm call only, never ingestion.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .continuous import SamplePlan, beta_continuous, continuous_threshold_greedy
from .convert import ConverterConfig, convert_continuous, convert_fair
from .datasets import (
    generate_skewed_instance,
    generate_tagged_instance,
    load_coverage_instance,
    load_tag_instance,
)
from .discrete import beta_for_epsilon, greedy_bi, greedy_fairness_bi, threshold_fairness_bi
from .errors import ConfigError, InvariantError
from .model import (
    FairnessFractions,
    FscInstance,
    as_fraction,
    fairness_difference,
)
from .oracles import CountingOracle

DISCRETE_FAIR_ALGORITHMS = ("greedy-fairness-bi", "threshold-fairness-bi")
ALGORITHMS = ("greedy-bi",) + DISCRETE_FAIR_ALGORITHMS + ("ctg-continuous",)


# ---------------------------------------------------------------------------
# config parsing


def parse_config_text(text: str) -> dict[str, dict[str, object]]:
    """Parse the flat key = value subset into {section: {key: value}}."""
    sections: dict[str, dict[str, object]] = {}
    current: dict[str, object] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        current[key.strip()] = _parse_value(value.strip(), lineno)
    return sections


def _parse_value(token: str, lineno: int):
    if token.startswith("[") and token.endswith("]"):
        inner = token[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part.strip(), lineno) for part in inner.split(",")]
    return _parse_scalar(token, lineno)


def _parse_scalar(token: str, lineno: int):
    if not token:
        raise ConfigError(f"line {lineno}: empty value")
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value {token!r}") from None


@dataclass
class ExperimentConfig:
    dataset: dict[str, object]
    fractions_p: tuple | None
    fractions_q: tuple | None
    p_total: object
    q_total: object
    algorithms: list[str]
    taus: list[float]
    seeds: list[int]
    epsilon: float = 0.1
    alpha: float = 0.2
    delta: float = 0.1
    scale: int = 1000
    max_kappa: int | None = None
    base_dir: Path = field(default_factory=Path)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_sections(parse_config_text(text), base_dir=path.parent)

    @classmethod
    def from_sections(cls, sections, base_dir=Path()) -> "ExperimentConfig":
        try:
            dataset = dict(sections["dataset"])
            fairness = dict(sections.get("fairness", {}))
            run = dict(sections["run"])
        except KeyError as exc:
            raise ConfigError(f"missing config section {exc}") from exc
        algorithms = list(run.get("algorithms", []))
        for a in algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
        taus = run.get("taus", [])
        if not isinstance(taus, list):
            raise ConfigError("taus must be a list")
        seeds = run.get("seeds", [0])
        if not isinstance(seeds, list):
            raise ConfigError("seeds must be a list")
        return cls(
            dataset=dataset,
            fractions_p=tuple(fairness["p"]) if "p" in fairness else None,
            fractions_q=tuple(fairness["q"]) if "q" in fairness else None,
            p_total=fairness.get("p_total", 0.9),
            q_total=fairness.get("q_total", 1.1),
            algorithms=algorithms,
            taus=list(taus),
            seeds=[int(s) for s in seeds],
            epsilon=run.get("epsilon", 0.1),
            alpha=run.get("alpha", 0.2),
            delta=run.get("delta", 0.1),
            scale=int(run.get("scale", 1000)),
            max_kappa=int(run["max_kappa"]) if run.get("max_kappa") else None,
            base_dir=Path(base_dir),
        )

    def fractions_for(self, num_colors: int) -> FairnessFractions:
        if self.fractions_p is not None and self.fractions_q is not None:
            if len(self.fractions_p) != num_colors or len(self.fractions_q) != num_colors:
                raise ConfigError("per-color fraction lists disagree with color count")
            return FairnessFractions.build(self.fractions_p, self.fractions_q)
        return FairnessFractions.uniform(num_colors, self.p_total, self.q_total)


# ---------------------------------------------------------------------------
# cell execution


@dataclass
class RunRecord:
    algorithm: str
    tau: float
    f_value: float
    cost: int
    fairness_diff: float
    per_color_counts: tuple[int, ...]
    queries: int
    wall_ms: float
    seed: int
    params: dict | None = None


@dataclass
class CellError:
    algorithm: str
    tau: float
    seed: int
    message: str


def _build_dataset(config: ExperimentConfig, seed: int):
    ds = config.dataset
    kind = ds.get("kind")
    if kind == "twitch-like":
        return generate_skewed_instance(
            n=int(ds.get("n", 500)),
            num_colors=int(ds.get("colors", 6)),
            skew=float(ds.get("skew", 0.6)),
            degree=float(ds.get("degree", 10.0)),
            seed=seed,
        )
    if kind == "corel-like":
        return generate_tagged_instance(
            n=int(ds.get("n", 500)),
            seed=seed,
            num_colors=int(ds.get("colors", 6)),
            vocabulary_size=int(ds.get("vocabulary", 374)),
            tags_per_item=float(ds.get("tags_per_item", 4.0)),
        )
    if kind == "files":
        labels = config.base_dir / str(ds["labels"])
        if "graph" in ds:
            universe, oracle, _ = load_coverage_instance(
                config.base_dir / str(ds["graph"]), labels
            )
        elif "tags" in ds:
            universe, oracle, _ = load_tag_instance(
                config.base_dir / str(ds["tags"]), labels
            )
        else:
            raise ConfigError("files dataset needs a 'graph' or 'tags' path")
        return universe, oracle
    raise ConfigError(f"unknown dataset kind {kind!r}")


def _run_cell(algorithm: str, instance: FscInstance,
              config: ExperimentConfig, seed: int, scale: int):
    eps = config.epsilon
    if algorithm == "greedy-bi":
        return greedy_bi(instance.oracle, instance.universe, instance.tau, eps)
    if algorithm == "greedy-fairness-bi":
        conv = ConverterConfig(
            alpha=config.alpha, gamma=1 - as_fraction(eps),
            beta=beta_for_epsilon(eps), max_kappa=config.max_kappa,
        )
        result = convert_fair(
            instance, lambda o, m: greedy_fairness_bi(o, m, eps), conv
        )
    elif algorithm == "threshold-fairness-bi":
        conv = ConverterConfig(
            alpha=config.alpha, gamma=1 - 2 * as_fraction(eps),
            beta=beta_for_epsilon(eps), max_kappa=config.max_kappa,
        )
        result = convert_fair(
            instance, lambda o, m: threshold_fairness_bi(o, m, eps), conv
        )
    elif algorithm == "ctg-continuous":
        gamma = max(Fraction(1, 100), 1 - 7 * as_fraction(eps))
        conv = ConverterConfig(
            alpha=config.alpha, gamma=gamma, beta=beta_continuous(eps),
            epsilon=eps, delta=config.delta, max_kappa=config.max_kappa,
            scale=scale,
        )
        plan = SamplePlan.for_instance(
            instance.universe.n, max(1, math.ceil(1 + as_fraction(config.alpha))),
            eps, rng_seed=seed, scale=scale,
        )
        result = convert_continuous(
            instance,
            lambda o, m: continuous_threshold_greedy(o, m, eps, config.delta, plan),
            conv, plan,
        )
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    if not result.gate_passed:
        raise InvariantError(
            f"guesses exhausted at kappa={result.kappa_final} without covering"
        )
    if algorithm != "greedy-bi" and not all(result.relaxed_fair):
        raise InvariantError(
            f"relaxed fairness violated: {result.relaxed_fair} for "
            f"counts {result.solution.counts}"
        )
    return result.solution


def run_experiment(config: ExperimentConfig, *, full_samples: bool = False
                   ) -> tuple[list[RunRecord], list[CellError]]:
    """Execute every (algorithm, tau, seed) cell; error cells do not stop the
    run. Records come back sorted by (algorithm, tau, seed)."""
    records: list[RunRecord] = []
    errors: list[CellError] = []
    scale = 1 if full_samples else config.scale
    datasets: dict[int, tuple] = {}
    for seed in config.seeds:
        try:
            datasets[seed] = _build_dataset(config, seed)
        except Exception as exc:  # noqa: BLE001 - reported per cell below
            datasets[seed] = exc

    for algorithm in config.algorithms:
        for tau in config.taus:
            for seed in config.seeds:
                built = datasets[seed]
                if isinstance(built, Exception):
                    errors.append(CellError(algorithm, tau, seed, str(built)))
                    continue
                universe, oracle = built
                counter = CountingOracle(oracle)
                try:
                    fractions = config.fractions_for(universe.num_colors)
                    instance = FscInstance(universe, fractions, tau, counter)
                    start = time.perf_counter()
                    solution = _run_cell(algorithm, instance, config, seed, scale)
                    wall_ms = (time.perf_counter() - start) * 1000.0
                except Exception as exc:  # noqa: BLE001 - per-cell error record
                    errors.append(CellError(algorithm, tau, seed, str(exc)))
                    continue
                records.append(RunRecord(
                    algorithm=algorithm,
                    tau=tau,
                    f_value=float(oracle.evaluate(solution)),
                    cost=len(solution),
                    fairness_diff=float(fairness_difference(solution)),
                    per_color_counts=solution.counts,
                    queries=counter.queries,
                    wall_ms=wall_ms,
                    seed=seed,
                    params={
                        "epsilon": config.epsilon, "alpha": config.alpha,
                        "delta": config.delta, "scale": scale,
                    },
                ))
    records.sort(key=lambda r: (r.algorithm, r.tau, r.seed))
    return records, errors


def fairness_verdict(record: RunRecord, config: ExperimentConfig, *,
                     strict: bool) -> bool:
    """Reported fairness of a record: the exact share bounds when strict,
    otherwise the beta-relaxed inequality. Works off the recorded counts."""
    fractions = config.fractions_for(len(record.per_color_counts))
    counts = record.per_color_counts
    size = record.cost
    if size == 0:
        return True
    if strict:
        for c, cnt in enumerate(counts):
            if fractions.p[c] * size > cnt or cnt > fractions.q[c] * size:
                return False
        return True
    beta = beta_for_epsilon(config.epsilon)
    for c, cnt in enumerate(counts):
        lo = beta * math.floor(fractions.p[c] * size / beta)
        hi = beta * math.ceil(fractions.q[c] * size / beta)
        if not lo <= cnt <= hi:
            return False
    return True


# ---------------------------------------------------------------------------
# CSV


def emit_csv(records: list[RunRecord], path) -> None:
    """Write records with header algorithm,tau,f,cost,fairness_diff,queries,
    wall_ms,seed,count_0..count_{N-1}; RFC-4180 quoting, LF line endings,
    fractional values with 6 digits."""
    num_colors = len(records[0].per_color_counts) if records else 0
    for r in records:
        if len(r.per_color_counts) != num_colors:
            raise ValueError("records disagree on color count")
    header = ["algorithm", "tau", "f", "cost", "fairness_diff", "queries",
              "wall_ms", "seed"] + [f"count_{c}" for c in range(num_colors)]
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in records:
            writer.writerow([
                r.algorithm,
                _num(r.tau),
                f"{r.f_value:.6f}",
                r.cost,
                f"{r.fairness_diff:.6f}",
                r.queries,
                f"{r.wall_ms:.3f}",
                r.seed,
                *r.per_color_counts,
            ])


def _num(v):
    return int(v) if float(v).is_integer() else f"{float(v):.6f}"


def parse_csv(path) -> list[RunRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        fixed = ["algorithm", "tau", "f", "cost", "fairness_diff", "queries",
                 "wall_ms", "seed"]
        if header[: len(fixed)] != fixed:
            raise ValueError(f"unexpected CSV header {header!r}")
        count_cols = header[len(fixed):]
        records = []
        for row in reader:
            base = row[: len(fixed)]
            counts = tuple(int(v) for v in row[len(fixed):])
            if len(counts) != len(count_cols):
                raise ValueError("row has wrong number of count columns")
            records.append(RunRecord(
                algorithm=base[0],
                tau=float(base[1]),
                f_value=float(base[2]),
                cost=int(base[3]),
                fairness_diff=float(base[4]),
                per_color_counts=counts,
                queries=int(base[5]),
                wall_ms=float(base[6]),
                seed=int(base[7]),
            ))
    return records
