"""Command-line experiment runner.

    folnerspec run --config folnerspec/configs/z_laplacian_ids.json --out results
    folnerspec ids --config my_ids.json --levels 50,100,200 --threads 4
    folnerspec verify --levels-scale 2

Each run writes <name>.json (report with config hash and library version) plus CSV
tables into --out and prints one "<check>: PASS k/n" line per check. Exit codes: 0 all
checks passed, 1 some check failed or a level was skipped, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import glob
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from folnerspec import io
from folnerspec.enums import Key, Task
from folnerspec.graph import check_levels, folner_window, graph_from_descriptor
from folnerspec.operators import operator_from_dict, validate_invariance
from folnerspec.pattern import frequency_table, pattern_census
from folnerspec.spectra import (
    eigenspace_run,
    ground_state_run,
    ids_run,
    logdet_run,
    moment_plot,
    moment_run,
    norm_run,
    staircase_plot,
    trace_property_run,
    uniform_convergence_diag,
    z_adjacency_ids,
    z_laplacian_ids,
)
from folnerspec.utils import (
    CONFIG_DIR,
    ConfigError,
    LimitExceededError,
    PartialResultWarning,
    UnsupportedGeneratorError,
    config_hash,
    patch_limits,
    to_fraction,
)


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    import pandas as pd
    import plotly.graph_objects as go

    from folnerspec.graph import InfiniteGraph
    from folnerspec.operators import PatternOperator
    from folnerspec.spectra import IDSEstimate

REFERENCES: dict[str, Callable[[Any], Any]] = {
    "z_laplacian": z_laplacian_ids,
    "z_adjacency": z_adjacency_ids,
}
# tasks that only look at the graph
GRAPH_TASKS = (Task.census, Task.frequencies)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description, loaded from JSON."""

    name: str
    task: Task
    graph: dict[str, Any]
    levels: tuple[int, ...]
    operator: dict[str, Any] | None = None
    operator_b: dict[str, Any] | None = None
    params: dict[str, Any] = field(default_factory=dict)
    expect: dict[str, Any] = field(default_factory=dict)
    limits: dict[str, int] = field(default_factory=dict)
    seed: int | None = None

    @classmethod
    def from_dict(cls, data: Any, name: str = "experiment") -> ExperimentConfig:
        """Validate a config dict.

        Raises:
            ConfigError: With the location of the first invalid entry.
        """
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", "config")
        known = {fld.name for fld in dataclasses.fields(cls)}
        if extra := set(data) - known:
            raise ConfigError(f"unknown keys {sorted(extra)}", "config")

        task_val = data.get("task")
        valid_tasks = [task.value for task in Task]
        if task_val not in valid_tasks:
            raise ConfigError(f"unknown {task_val=}, valid are {valid_tasks}", "task")
        task = Task(task_val)

        try:
            levels = tuple(check_levels(data.get("levels") or []))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "levels") from exc

        graph = data.get("graph")
        if not isinstance(graph, dict):
            raise ConfigError("expected a graph descriptor object", "graph")
        for key in ("operator", "operator_b", "params", "expect", "limits"):
            if data.get(key) is not None and not isinstance(data[key], dict):
                raise ConfigError("expected a JSON object", key)
        if task not in GRAPH_TASKS and data.get("operator") is None:
            raise ConfigError(f"{task=} needs an operator", "operator")
        if task == Task.trace and data.get("operator_b") is None:
            raise ConfigError("trace task needs operator_b", "operator_b")
        seed = data.get("seed")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise ConfigError(f"expected int, got {seed!r}", "seed")

        cfg = cls(
            name=str(data.get("name", name)),
            task=task,
            graph=graph,
            levels=levels,
            operator=data.get("operator"),
            operator_b=data.get("operator_b"),
            params=dict(data.get("params") or {}),
            expect=dict(data.get("expect") or {}),
            limits=dict(data.get("limits") or {}),
            seed=seed,
        )
        cfg.build()  # graph/operator compatibility
        return cfg

    @classmethod
    def from_json(cls, path: str) -> ExperimentConfig:
        """Load and validate a JSON config file."""
        with open(path) as file:
            text = file.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
        name = os.path.splitext(os.path.basename(path))[0]
        return cls.from_dict(data, name=name)

    def to_dict(self) -> dict[str, Any]:
        """Inverse of from_dict."""
        return {
            "name": self.name,
            "task": self.task.value,
            "graph": self.graph,
            "levels": list(self.levels),
            "operator": self.operator,
            "operator_b": self.operator_b,
            "params": self.params,
            "expect": self.expect,
            "limits": self.limits,
            "seed": self.seed,
        }

    def with_overrides(
        self,
        *,
        levels: Sequence[int] | None = None,
        seed: int | None = None,
        task: Task | None = None,
        levels_scale: int = 1,
    ) -> ExperimentConfig:
        """Copy with CLI overrides applied (validated again)."""
        data = copy.deepcopy(self.to_dict())
        if levels is not None:
            data["levels"] = list(levels)
        if levels_scale != 1:
            data["levels"] = [lvl * levels_scale for lvl in data["levels"]]
        if seed is not None:
            data["seed"] = seed
        if task is not None:
            data["task"] = Task(task).value
        return type(self).from_dict(data, name=self.name)

    def build_graph(self, seed_offset: int = 0) -> InfiniteGraph:
        """Graph from the descriptor, the top-level seed (if any) replacing its seed."""
        descriptor = dict(self.graph)
        if self.seed is not None and "seed" in descriptor:
            descriptor["seed"] = self.seed
        if seed_offset and descriptor.get("seed") is not None:
            descriptor["seed"] = int(descriptor["seed"]) + seed_offset
        try:
            return graph_from_descriptor(descriptor)
        except (UnsupportedGeneratorError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "graph") from exc

    def build_operator(
        self, g: InfiniteGraph, key: str = "operator", seed_offset: int = 0
    ) -> PatternOperator:
        """Operator rule tree bound to g; seed_offset shifts random_gram seeds."""
        tree = getattr(self, key)
        if seed_offset:
            tree = _reseed(tree, seed_offset)
        return operator_from_dict(tree, g, location=key)

    def build(
        self, seed_offset: int = 0
    ) -> tuple[InfiniteGraph, PatternOperator | None, PatternOperator | None]:
        """(graph, operator, operator_b) with None for absent operators."""
        g = self.build_graph(seed_offset)
        op_a = self.build_operator(g, "operator", seed_offset) if self.operator else None
        op_b = (
            self.build_operator(g, "operator_b", seed_offset) if self.operator_b else None
        )
        return g, op_a, op_b


def _reseed(tree: Any, offset: int) -> Any:
    if isinstance(tree, list):
        return [_reseed(node, offset) for node in tree]
    if not isinstance(tree, dict):
        return tree
    out = {key: _reseed(val, offset) for key, val in tree.items()}
    if out.get("op") == "random_gram" and isinstance(out.get("seed"), int):
        out["seed"] += offset
    return out


@dataclass
class TaskResult:
    """Everything a task produced: JSON report, check counts, tables, figures."""

    report: dict[str, Any]
    checks: dict[str, tuple[int, int]] = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    figures: dict[str, go.Figure] = field(default_factory=dict)
    curves: dict[str, tuple[Any, Any]] = field(default_factory=dict)
    partial: bool = False

    def check(self, name: str, passed: bool | Sequence[bool]) -> None:
        """Record a check (or a batch of instances of one check)."""
        results = list(passed) if isinstance(passed, list | tuple) else [bool(passed)]
        if not results:
            return
        prev_ok, prev_total = self.checks.get(name, (0, 0))
        self.checks[name] = (prev_ok + sum(results), prev_total + len(results))

    @property
    def passed(self) -> bool:
        """All checks passed and no level was skipped."""
        return not self.partial and all(ok == total for ok, total in self.checks.values())

    def verdicts(self) -> list[str]:
        """One-line verdicts like "logdet >= 0: PASS 20/20"."""
        return [
            f"{name}: {'PASS' if ok == total else 'FAIL'} {ok}/{total}"
            for name, (ok, total) in self.checks.items()
        ]


def _param(cfg: ExperimentConfig, key: str, default: Any = None) -> Any:
    return cfg.params.get(key, default)


def _run_census(cfg: ExperimentConfig, threads: int) -> TaskResult:  # noqa: ARG001
    g = cfg.build_graph()
    radius = int(_param(cfg, "radius", 1))
    window = folner_window(g, cfg.levels[-1])
    counts = pattern_census(g, window, radius)
    table = frequency_table(g, [cfg.levels[-1]], radius)
    freqs = table.frequencies()
    result = TaskResult(
        report={
            "radius": radius,
            "level": cfg.levels[-1],
            "n_vertices": len(window),
            "counts": counts,
            "frequencies": freqs,
        },
        tables={"census": table.to_df()},
    )
    if (expected := cfg.expect.get("frequencies")) is not None:
        got = sorted(freqs.values())
        result.check("census frequencies", got == sorted(map(to_fraction, expected)))
    return result


def _run_frequencies(cfg: ExperimentConfig, threads: int) -> TaskResult:  # noqa: ARG001
    g = cfg.build_graph()
    radius = int(_param(cfg, "radius", 1))
    table = frequency_table(g, cfg.levels, radius)
    report: dict[str, Any] = {
        "radius": radius,
        "levels": list(cfg.levels),
        "sizes": table.sizes,
        "convergence": table.convergence,
        "frequencies": table.frequencies(),
    }
    result = TaskResult(report=report, tables={"frequencies": table.to_df()})
    if (event := cfg.expect.get("event")) is not None:
        degree = int(event["root_degree"])
        prob = to_fraction(event["probability"])
        factor = float(to_fraction(event.get("variance_factor", 1)))
        sigmas = float(event.get("sigmas", 3))
        freq = table.event_frequency(lambda code: code.root_degree == degree)
        size = table.sizes[cfg.levels[-1]]
        std_err = math.sqrt(factor * float(prob * (1 - prob)) / size)
        report["event"] = {
            "root_degree": degree,
            "frequency": freq,
            "probability": prob,
            "std_err": std_err,
        }
        result.check(
            f"root degree {degree} within {sigmas:g} sigma",
            abs(float(freq - prob)) <= sigmas * std_err,
        )
    return result


def _run_moments(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, _ = cfg.build()
    ks = _param(cfg, "k", [2])
    ks = [ks] if isinstance(ks, int) else list(ks)
    limits = {int(key): to_fraction(val) for key, val in cfg.expect.get("limits", {}).items()}
    result = TaskResult(report={"moments": {}})
    for k in ks:
        rep = moment_run(op_a, cfg.levels, k, threads=threads)
        result.report["moments"][k] = rep.to_dict()
        result.tables[f"moments_k{k}"] = rep.to_df()
        result.figures[f"moments_k{k}"] = moment_plot(rep)
        result.partial |= rep.partial
        result.check("moment error bound", rep.bound_holds)
        result.check("walk moment consistent", rep.consistent)
        result.check("float vs exact moments", rep.float_consistent)
        if k in limits:
            result.check("moment limit", rep.limit == limits[k])
    return result


def _ids_estimate(
    cfg: ExperimentConfig, op_a: PatternOperator, threads: int
) -> IDSEstimate:
    reference = _param(cfg, "reference")
    if reference is not None and reference not in REFERENCES:
        raise ConfigError(
            f"unknown {reference=}, valid are {list(REFERENCES)}", "params.reference"
        )
    return ids_run(
        op_a,
        cfg.levels,
        reference=REFERENCES[reference] if reference else None,
        merge_tol=_param(cfg, "merge_tol"),
        grid=_param(cfg, "grid"),
        atom_mass=float(_param(cfg, "atom_mass", 0.01)),
        positive=bool(_param(cfg, "positive", True)),
        threads=threads,
    )


def _run_ids(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, _ = cfg.build()
    est = _ids_estimate(cfg, op_a, threads)
    reference = _param(cfg, "reference")
    result = TaskResult(
        report=est.to_dict(),
        tables={"staircases": est.to_df()},
        figures={"staircases": staircase_plot(est, REFERENCES.get(reference))},
        curves={
            f"staircase_n{lvl}": (stair.breakpoints, stair(stair.breakpoints))
            for lvl, stair in est.staircases.items()
        },
        partial=est.partial,
    )
    result.check("staircase range [-K, K]", est.in_range)
    if len(est.levels) > 1 and cfg.expect.get("cauchy_decreasing", True):
        result.check("Cauchy sup distances decrease", est.cauchy_decreasing)
    result.check("atom exact <= float mass", [atom.consistent for atom in est.atoms])
    if (ref_max := cfg.expect.get("reference_max")) is not None:
        top = est.reference_distances[est.levels[-1]]
        result.check("sup distance to reference", top <= float(ref_max))
    if (atom_spec := cfg.expect.get("atom")) is not None:
        lam, min_mass = to_fraction(atom_spec["lambda"]), to_fraction(atom_spec["min_mass"])
        match = [atom for atom in est.atoms if atom.lam == lam]
        result.check("atom certified", bool(match) and match[0].certified)
        if match:
            result.check(
                "atom mass",
                [dens >= min_mass for dens in match[0].exact_densities.values()],
            )
    return result


def _run_converge(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, _ = cfg.build()
    est = _ids_estimate(cfg, op_a, threads)
    diag = uniform_convergence_diag(list(est.staircases.values()))
    report = {"ids": est.to_dict(), "convergence": diag.to_dict()}
    result = TaskResult(report=report, tables={"staircases": est.to_df()})
    result.partial = est.partial
    result.check("pointwise Cauchy", diag.pointwise_cauchy)
    result.check("jump convergence", diag.jumps_converge)
    result.check("sup distances decrease", diag.decreasing)
    if (cert_max := cfg.expect.get("certificate_max")) is not None:
        result.check("uniform convergence certificate", diag.certificate <= cert_max)
    if (ref_max := cfg.expect.get("reference_max")) is not None:
        top = est.reference_distances[est.levels[-1]]
        result.check("sup distance to reference", top <= float(ref_max))
    return result


def _run_ground_state(cfg: ExperimentConfig, threads: int) -> TaskResult:
    g, op_a, _ = cfg.build()
    rep = ground_state_run(op_a, cfg.levels, threads=threads)
    report: dict[str, Any] = {"ground_state": rep.to_dict()}
    result = TaskResult(report=report, tables={"ground_state": rep.to_df()})
    result.partial = rep.partial
    if (min_density := cfg.expect.get("min_density")) is not None:
        result.check(
            "ground-state density lower bound",
            [dens >= to_fraction(min_density) for dens in rep.densities.values()],
        )
    if len(rep.levels) > 1:
        top_size = rep.sizes[rep.levels[-1]]
        result.check(
            "ground-state stabilization",
            rep.stabilization[-1] <= Fraction(2, top_size),
        )
    if (tree := _param(cfg, "eigenspace_operator")) is not None:
        root = operator_from_dict(tree, g, location="params.eigenspace_operator")
        eig = eigenspace_run(root, 0, cfg.levels, threads=threads)
        report["eigenspace"] = eig.to_dict()
        result.partial |= eig.partial
        result.check(
            "ground state = eigenspace density",
            [rep.densities[lvl] == eig.densities[lvl] for lvl in rep.levels],
        )
        result.check("kernel comparison bound", eig.passed)
    return result


def _run_eigenspace(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, _ = cfg.build()
    lam = to_fraction(_param(cfg, "lambda", 0))
    rep = eigenspace_run(op_a, lam, cfg.levels, threads=threads)
    result = TaskResult(report=rep.to_dict(), tables={"eigenspace": rep.to_df()})
    result.partial = rep.partial
    result.check(
        "kernel comparison bound",
        [
            abs(rep.kernel_dims[lvl] - rep.squared_kernel_dims[lvl])
            <= rep.boundaries[lvl]
            for lvl in rep.levels
        ],
    )
    if (dims := cfg.expect.get("kernel_dims")) is not None:
        result.check(
            "kernel dimensions",
            [rep.kernel_dims[lvl] == int(dims[str(lvl)]) for lvl in rep.levels],
        )
    return result


def _run_logdet(cfg: ExperimentConfig, threads: int) -> TaskResult:
    n_instances = int(_param(cfg, "n_instances", 1))
    result = TaskResult(report={"instances": []})
    stair_tol = cfg.expect.get("staircase_tol")
    for offset in range(n_instances):
        _, op_a, _ = cfg.build(seed_offset=offset)
        rep = logdet_run(op_a, cfg.levels, threads=threads)
        result.report["instances"].append(rep.to_dict())
        result.tables[f"logdet_{offset}"] = rep.to_df()
        result.partial |= rep.partial
        result.check("logdet >= 0", rep.passed)
        if stair_tol is not None:
            result.check(
                "logdet staircase identity",
                [err <= float(stair_tol) for err in rep.staircase_errors.values()],
            )
        if (fk_max := cfg.expect.get("fk_max")) is not None:
            result.check(
                "Fuglede-Kadison estimate",
                rep.fk_estimate is not None and abs(rep.fk_estimate) <= float(fk_max),
            )
    return result


def _run_invariance(cfg: ExperimentConfig, threads: int) -> TaskResult:  # noqa: ARG001
    g, op_a, _ = cfg.build()
    window = folner_window(g, cfg.levels[-1])
    seed = cfg.seed if cfg.seed is not None else 0
    rep = validate_invariance(
        op_a, window, samples=int(_param(cfg, "samples", 8)), seed=seed
    )
    result = TaskResult(
        report={
            "n_codes": rep.n_codes,
            "n_pairs": rep.n_pairs,
            "n_isomorphisms": rep.n_isomorphisms,
            "n_checks": rep.n_checks,
            "violations": [dataclasses.asdict(vio) for vio in rep.violations[:20]],
            "n_violations": len(rep.violations),
        }
    )
    result.check("pattern invariance", rep.passed)
    return result


def _run_norm(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, _ = cfg.build()
    rep = norm_run(op_a, cfg.levels, threads=threads)
    result = TaskResult(report=rep.to_dict(), tables={"norm": rep.to_df()})
    result.check(
        "spectral radius <= norm bound",
        [rad <= float(rep.norm_bound) * (1 + 1e-9) for rad in rep.spectral_radii.values()],
    )
    return result


def _run_trace(cfg: ExperimentConfig, threads: int) -> TaskResult:
    _, op_a, op_b = cfg.build()
    rep = trace_property_run(op_a, op_b, cfg.levels, threads=threads)
    result = TaskResult(report=rep.to_dict(), tables={"trace": rep.to_df()})
    result.check(
        "trace property bound",
        [rep.diffs[lvl] <= rep.counted_bounds[lvl] for lvl in rep.levels],
    )
    return result


TASK_RUNNERS: dict[Task, Callable[[ExperimentConfig, int], TaskResult]] = {
    Task.census: _run_census,
    Task.frequencies: _run_frequencies,
    Task.moments: _run_moments,
    Task.ids: _run_ids,
    Task.converge: _run_converge,
    Task.ground_state: _run_ground_state,
    Task.eigenspace: _run_eigenspace,
    Task.logdet: _run_logdet,
    Task.invariance: _run_invariance,
    Task.norm: _run_norm,
    Task.trace: _run_trace,
}


def run_task(cfg: ExperimentConfig, *, threads: int = 1) -> TaskResult:
    """Run cfg.task under cfg.limits, flagging the result partial if any level was
    skipped by a resource guard.
    """
    with patch_limits(**cfg.limits), warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PartialResultWarning)
        try:
            result = TASK_RUNNERS[cfg.task](cfg, threads)
        except LimitExceededError as exc:
            result = TaskResult(report={"error": str(exc)}, partial=True)
    skipped = [str(warn.message) for warn in caught if warn.category is PartialResultWarning]
    for warn in caught:
        if warn.category is not PartialResultWarning:
            warnings.warn_explicit(
                warn.message, warn.category, warn.filename, warn.lineno
            )
    if skipped:
        result.partial = True
        result.report["skipped"] = skipped
    return result


def write_outputs(
    cfg: ExperimentConfig, result: TaskResult, out_dir: str, *, plots: bool = False
) -> str:
    """Write JSON report, CSV tables, two-column curves and (optionally) figures.

    Returns:
        str: Path of the JSON report.
    """
    from folnerspec import __version__

    json_path = f"{out_dir}/{cfg.name}.json"
    io.save_report_json(
        {
            "task": cfg.task.value,
            "config": cfg.to_dict(),
            "report": result.report,
            "checks": {
                name: {"passed": ok, "total": total}
                for name, (ok, total) in result.checks.items()
            },
            Key.passed.value: result.passed,
            "partial": result.partial,
        },
        json_path,
        config_hash=config_hash(cfg.to_dict()),
        version=__version__,
    )
    for table_name, df in result.tables.items():
        io.df_to_csv(df, f"{out_dir}/{cfg.name}_{table_name}.csv")
    for curve_name, (xs, ys) in result.curves.items():
        io.write_two_column(
            list(xs), list(ys), f"{out_dir}/{cfg.name}_{curve_name}.dat", "lambda N"
        )
    if plots:
        for fig_name, fig in result.figures.items():
            io.save_fig(fig, f"{out_dir}/{cfg.name}_{fig_name}.html", env_disable=())
    return json_path


def _parse_levels(text: str) -> list[int]:
    try:
        return check_levels(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folnerspec",
        description="Spectral invariants of pattern-invariant operators along Følner "
        "sequences.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="folnerspec-results", help="Output directory")
    common.add_argument("--seed", type=int, help="Override the config seed")
    common.add_argument(
        "--exact-limit", type=int, help="Largest section for exact arithmetic"
    )
    common.add_argument("--threads", type=int, default=1, help="Worker threads")
    common.add_argument("--plots", action="store_true", help="Also write HTML figures")

    single = argparse.ArgumentParser(add_help=False, parents=[common])
    single.add_argument("--config", required=True, help="Experiment JSON config")
    single.add_argument(
        "--levels", type=_parse_levels, help="Override Følner levels, e.g. 8,16,32"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("run", parents=[single], help="Run a config's task")
    for task in Task:
        subparsers.add_parser(
            task.value, parents=[single], help=f"Run {task.label.lower()} on a config"
        )
    verify = subparsers.add_parser(
        "verify", parents=[common], help="Run the bundled acceptance configs"
    )
    verify.add_argument(
        "--config-dir", default=CONFIG_DIR, help="Directory of JSON configs"
    )
    verify.add_argument(
        "--levels-scale", type=int, default=1, help="Multiply all levels by this"
    )
    return parser


def _limits(args: argparse.Namespace, cfg: ExperimentConfig) -> ExperimentConfig:
    if args.exact_limit is None:
        return cfg
    return dataclasses.replace(cfg, limits=cfg.limits | {"exact_limit": args.exact_limit})


def _run_one(cfg: ExperimentConfig, args: argparse.Namespace) -> bool:
    result = run_task(cfg, threads=args.threads)
    write_outputs(cfg, result, args.out, plots=args.plots)
    for line in result.verdicts():
        print(f"[{cfg.name}] {line}")  # noqa: T201
    if result.partial:
        print(f"[{cfg.name}] partial: some levels were skipped")  # noqa: T201
    return result.passed


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point. Returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2

    try:
        if args.command == "verify":
            paths = sorted(glob.glob(f"{args.config_dir}/*.json"))
            if not paths:
                raise ConfigError(f"no configs in {args.config_dir}", "--config-dir")
            configs = [
                _limits(args, ExperimentConfig.from_json(path)).with_overrides(
                    seed=args.seed, levels_scale=args.levels_scale
                )
                for path in paths
            ]
            n_passed = sum(_run_one(cfg, args) for cfg in configs)
            verdict = "PASS" if n_passed == len(configs) else "FAIL"
            print(f"verify: {verdict} {n_passed}/{len(configs)}")  # noqa: T201
            return 0 if n_passed == len(configs) else 1

        task = None if args.command == "run" else Task(args.command)
        cfg = ExperimentConfig.from_json(args.config).with_overrides(
            levels=args.levels, seed=args.seed, task=task
        )
        return 0 if _run_one(_limits(args, cfg), args) else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)  # noqa: T201
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)  # noqa: T201
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
