#!/usr/bin/env python3
"""
Command line front end for IP trees.

Verbs: simulate, render, sample, reconstruct, check, msiso, decompose and
prokhorov. JSON goes to ``--out`` or stdout; human-readable reports and errors
go to stderr.

Exit codes
----------
0  success, or a boolean check that holds
1  a check that fails, or an input tree that is not valid where one is required
2  bad input: flags, JSON documents, model parameters
3  file system errors
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ip_trees.ipt_build import DEFAULT_TRUNCATION, MODEL_KINDS, Model, build_model
from ip_trees.ipt_codec import (
    dump_hierarchy,
    dump_samples,
    dump_tree,
    dump_tree_measure,
    dumps,
    load_fad,
    load_hierarchy,
    load_tree,
    read_json,
)
from ip_trees.ipt_config import override
from ip_trees.ipt_equiv import canonical_form, ip_representative, prokhorov_distance
from ip_trees.ipt_errors import IpTreeError, ModelError, TreeValidationError
from ip_trees.ipt_hierarchy import Hierarchy, derive_hierarchy, reconstruct_tree, relabel_to_Z
from ip_trees.ipt_logger import BuildLogger
from ip_trees.ipt_measure import decompose
from ip_trees.ipt_render import render_hierarchy_svg, render_tree_svg
from ip_trees.ipt_reports import render_report_lines, tree_report
from ip_trees.ipt_stdlib import derive_seeds
from ip_trees.ipt_tree import IpTree, is_ip_tree

DEFAULT_SEED = 20190101
DEFAULT_DEPTH_CAP = 20

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BAD_INPUT = 2
EXIT_IO = 3

COMMANDS = ("simulate", "render", "sample", "reconstruct", "check", "msiso", "decompose", "prokhorov")
INPUT_COUNTS = {
    "simulate": 0,
    "render": 1,
    "sample": 1,
    "reconstruct": 1,
    "check": 1,
    "msiso": 2,
    "decompose": 1,
    "prokhorov": 2,
}


@dataclass
class RunConfig:
    """Parsed and validated flags for one CLI run."""

    command: str
    inputs: List[str] = field(default_factory=list)
    model: str = "brownian"
    alpha: float = 0.5
    theta: Optional[float] = None
    depth: int = 3
    steps: int = 20
    truncation: int = DEFAULT_TRUNCATION
    measures: Optional[str] = None
    n: int = 10
    K: Optional[int] = None
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    tol: Optional[float] = None
    grid: Optional[float] = None
    batch: int = 1
    workers: int = 1
    verbose: bool = False
    raw: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        if values.get("seed") is None:
            values["seed"] = DEFAULT_SEED
        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        expected = INPUT_COUNTS[self.command]
        if len(self.inputs) != expected:
            raise ModelError(f"{self.command} expects {expected} input file(s), got {len(self.inputs)}")
        if self.steps < 0:
            raise ModelError(f"--steps must be nonnegative, got {self.steps}")
        if self.n < 1:
            raise ModelError(f"-n must be at least 1, got {self.n}")
        if self.K is not None and self.K < 1:
            raise ModelError(f"--K must be at least 1, got {self.K}")
        if self.batch < 1 or self.workers < 1:
            raise ModelError("--batch and --workers must be at least 1")
        if self.batch > 1 and not self.out:
            raise ModelError("--batch needs --out naming an output directory")
        if self.tol is not None and not self.tol > 0:
            raise ModelError(f"--tol must be positive, got {self.tol}")
        if self.model == "custom" and self.command == "simulate" and not self.measures:
            raise ModelError("--model custom needs --measures")

    def model_spec(self) -> Model:
        if self.model == "brownian":
            return Model.brownian()
        if self.model == "alpha_theta":
            theta = self.alpha if self.theta is None else self.theta
            return Model.alpha_theta(self.alpha, theta)
        if self.model == "fat_cantor":
            return Model.fat_cantor(self.depth)
        doc = read_json(self.measures)
        if not isinstance(doc, list):
            raise ModelError("--measures must hold a JSON array of measures")
        return Model.custom([load_fad(entry, f"measures[{k}]") for k, entry in enumerate(doc)])


class CommandFailed(Exception):
    """A boolean command finished with a negative answer."""


def _emit(config: RunConfig, text: str) -> None:
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_tree(path: str) -> IpTree:
    return load_tree(read_json(path), path)


def _simulate_task(payload: Dict[str, Any]) -> Tuple[str, int]:
    """Worker entry point for batch runs; returns the tree document and its violation count."""

    config = RunConfig(**payload)
    with override(eps_tol=config.tol) if config.tol is not None else nullcontext():
        tree = build_model(config.model_spec(), config.steps, config.seed, truncation=config.truncation)
        _, violations = is_ip_tree(tree)
    return dumps(dump_tree(tree)), len(violations)


def cmd_simulate(config: RunConfig, logger: BuildLogger) -> int:
    if config.batch == 1:
        tree = build_model(
            config.model_spec(),
            config.steps,
            config.seed,
            truncation=config.truncation,
            tol=config.tol,
            logger=logger,
        )
        _emit(config, dumps(dump_tree(tree)))
        ok, violations = is_ip_tree(tree, config.tol, logger)
        if not ok:
            for line in render_report_lines(tree_report(tree, tol=config.tol)):
                print(line, file=sys.stderr)
            raise CommandFailed(f"simulated tree is not an IP tree ({len(violations)} violations)")
        return EXIT_OK

    config.model_spec()
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = derive_seeds(config.seed, config.batch)
    payloads = []
    for seed in seeds:
        payload = asdict(config)
        payload.update(seed=seed, batch=1, out=None)
        payloads.append(payload)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(_simulate_task, payloads))
    manifest = []
    failed = 0
    for k, (seed, (document, violation_count)) in enumerate(zip(seeds, results)):
        path = out_dir / f"tree_{k:04d}.json"
        path.write_text(document, encoding="utf-8")
        manifest.append({"path": str(path), "seed": seed, "ip_tree": violation_count == 0})
        logger.log(f"batch task {k} seed={seed} -> {path}")
        if violation_count:
            failed += 1
            print(f"✖ {path}: not an IP tree ({violation_count} violations)", file=sys.stderr)
    sys.stdout.write(dumps({"model": config.model, "steps": config.steps, "trees": manifest}))
    if failed:
        raise CommandFailed(f"{failed} of {config.batch} simulated trees are not IP trees")
    return EXIT_OK


def cmd_render(config: RunConfig, logger: BuildLogger) -> int:
    path = config.inputs[0]
    doc = read_json(path)
    if isinstance(doc, dict) and "hierarchy" in doc:
        doc = doc["hierarchy"]
    if isinstance(doc, dict) and "labels" in doc:
        svg = render_hierarchy_svg(load_hierarchy(doc, path), title=Path(path).name)
    else:
        svg = render_tree_svg(load_tree(doc, path), title=Path(path).name)
    _emit(config, svg)
    return EXIT_OK


def cmd_sample(config: RunConfig, logger: BuildLogger) -> int:
    tree = _load_tree(config.inputs[0])
    h, samples = derive_hierarchy(tree, config.n, config.seed, tol=config.tol, logger=logger)
    _emit(config, dumps({"hierarchy": dump_hierarchy(h), "samples": dump_samples(samples)}))
    return EXIT_OK


def _hierarchy_on_z(path: str) -> Hierarchy:
    doc = read_json(path)
    if isinstance(doc, dict) and "hierarchy" in doc:
        doc = doc["hierarchy"]
    h = load_hierarchy(doc, path)
    if h.labels and h.labels[0] < 0:
        return h
    return relabel_to_Z(h)


def cmd_reconstruct(config: RunConfig, logger: BuildLogger) -> int:
    h = _hierarchy_on_z(config.inputs[0])
    n = (len(h.labels) - 1) // 2
    depth = config.K if config.K is not None else min(n, DEFAULT_DEPTH_CAP)
    tree, _ = reconstruct_tree(h, depth, tol=config.tol, logger=logger)
    if not config.raw:
        tree = ip_representative(tree, tol=config.tol)
    _emit(config, dumps(dump_tree(tree)))
    return EXIT_OK


def cmd_check(config: RunConfig, logger: BuildLogger) -> int:
    tree = _load_tree(config.inputs[0])
    ok, violations = is_ip_tree(tree, config.tol, logger)
    _emit(config, dumps({"ok": ok, "violations": [v.describe() for v in violations]}))
    for line in render_report_lines(tree_report(tree, tol=config.tol)):
        print(line, file=sys.stderr)
    if not ok:
        raise CommandFailed(f"{config.inputs[0]}: not an IP tree ({len(violations)} violations)")
    return EXIT_OK


def cmd_msiso(config: RunConfig, logger: BuildLogger) -> int:
    a, b = (_load_tree(path) for path in config.inputs)
    form_a, form_b = canonical_form(a, tol=config.tol), canonical_form(b, tol=config.tol)
    equivalent = form_a == form_b
    _emit(config, dumps({"equivalent": equivalent, "digests": [form_a.digest, form_b.digest]}))
    if not equivalent:
        raise CommandFailed("trees are not mass-structurally equivalent")
    return EXIT_OK


def cmd_decompose(config: RunConfig, logger: BuildLogger) -> int:
    tree = _load_tree(config.inputs[0])
    resolved, skeleton, pending = decompose(tree.weight, tree)
    _emit(
        config,
        dumps(
            {
                "resolved": dump_tree_measure(resolved),
                "density": dump_tree_measure(skeleton),
                "pending": dump_tree_measure(pending),
                "masses": {
                    "resolved": resolved.total_mass,
                    "density": skeleton.total_mass,
                    "pending": pending.total_mass,
                },
            }
        ),
    )
    for line in render_report_lines(tree_report(tree, tol=config.tol)):
        print(line, file=sys.stderr)
    return EXIT_OK


def cmd_prokhorov(config: RunConfig, logger: BuildLogger) -> int:
    a, b = (_load_tree(path) for path in config.inputs)
    distance = prokhorov_distance(a.weight, b.weight, grid=config.grid)
    _emit(config, dumps({"distance": distance, "grid": config.grid}))
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "render": cmd_render,
    "sample": cmd_sample,
    "reconstruct": cmd_reconstruct,
    "check": cmd_check,
    "msiso": cmd_msiso,
    "decompose": cmd_decompose,
    "prokhorov": cmd_prokhorov,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipt",
        description="Build, check, sample and compare interval-partition trees",
        epilog="Examples:\n"
        "  ipt simulate --model brownian --steps 120 --seed 7 --out tree.json\n"
        "  ipt check tree.json\n"
        "  ipt sample tree.json -n 201 --out sample.json\n"
        "  ipt reconstruct sample.json --K 20 --out rebuilt.json\n"
        "  ipt msiso tree.json rebuilt.json\n",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="Operation to run")
    parser.add_argument("inputs", nargs="*", help="Input JSON documents")
    parser.add_argument("--model", choices=MODEL_KINDS, default="brownian", help="String model for simulate")
    parser.add_argument("--alpha", type=float, default=0.5, help="PD alpha for alpha_theta")
    parser.add_argument("--theta", type=float, default=None, help="PD theta (defaults to alpha)")
    parser.add_argument("--depth", type=int, default=3, help="Fat Cantor depth")
    parser.add_argument("--steps", type=int, default=20, help="Number of crush steps")
    parser.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION, help="Stick-breaking truncation")
    parser.add_argument("--measures", help="JSON array of uniformized measures for --model custom")
    parser.add_argument("-n", type=int, default=10, help="Number of samples")
    parser.add_argument("--K", type=int, default=None, help="Reconstruction depth")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    parser.add_argument("--out", help="Output file (directory for --batch)")
    parser.add_argument("--tol", type=float, default=None, help="Mass and spacing tolerance")
    parser.add_argument("--grid", type=float, default=None, help="Discretization grid for prokhorov")
    parser.add_argument("--batch", type=int, default=1, help="Independent simulate runs")
    parser.add_argument("--workers", type=int, default=1, help="Processes for --batch")
    parser.add_argument("--verbose", action="store_true", help="Print the run log to stderr")
    parser.add_argument("--raw", action="store_true", help="reconstruct: keep the raw tree")
    return parser


def _fail(message: str, code: int) -> int:
    print(f"✖ {message}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the ``ipt`` command."""

    args = build_parser().parse_args(argv)
    logger = BuildLogger()
    try:
        config = RunConfig.from_args(args)
        with override(eps_tol=config.tol) if config.tol is not None else nullcontext():
            return HANDLERS[config.command](config, logger)
    except CommandFailed as exc:
        return _fail(str(exc), EXIT_INVALID)
    except TreeValidationError as exc:
        return _fail(str(exc), EXIT_INVALID)
    except IpTreeError as exc:
        return _fail(str(exc), EXIT_BAD_INPUT)
    except OSError as exc:
        return _fail(f"{getattr(exc, 'filename', None) or 'io'}: {exc.strerror or exc}", EXIT_IO)
    finally:
        if args.verbose and len(logger):
            print(logger.export(), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
