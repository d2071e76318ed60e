"""Command-line entry point: ``frogrec <synth|train|eval|ablate|gradcheck|bench>``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import MODEL_KINDS, ConfigError, RunConfig, parse_config
from .encoders import FeatureTables
from .graph_data import DatasetFormatError, generate_synthetic, load_dataset_dir, split_temporal, write_dataset
from .model.frog import load_checkpoint, save_checkpoint
from .numerics import set_default_dtype
from .seeding import derive_seed
from .train_eval import (
    bench_matching,
    build_model,
    evaluate,
    positive_targets,
    run_seeds,
    train_and_evaluate,
)
from .train_eval.verify import frog_gradcheck

log = logging.getLogger("frogrec")

COMMANDS = ("synth", "train", "eval", "ablate", "gradcheck", "bench")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


class Run:
    """Output directory bookkeeping: deterministic artifacts are hashed into the manifest."""

    def __init__(self, command: str, cfg: RunConfig, argv):
        self.command = command
        self.cfg = cfg
        self.argv = list(argv)
        self.out = Path(cfg.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts: dict[str, Path] = {}
        self.inputs: dict[str, Path] = {}
        self.timings: dict[str, float] = {}

    def artifact(self, path: Path) -> Path:
        self.artifacts[str(Path(path).relative_to(self.out))] = Path(path)
        return path

    def finish(self) -> Path:
        write_json(self.out / "timings.json", self.timings)
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "version": __version__,
            "seed": self.cfg.seed,
            "config": self.cfg.to_dict(),
            "inputs": {k: sha256_file(p) for k, p in sorted(self.inputs.items())},
            "artifacts": {k: sha256_file(p) for k, p in sorted(self.artifacts.items())},
        }
        return write_json(self.out / "manifest.json", manifest)


def load_data(cfg: RunConfig, run: Run | None = None):
    if cfg.data.path is not None:
        root = Path(cfg.data.path)
        ds = load_dataset_dir(root)
        if run is not None:
            for p in sorted(root.iterdir()):
                if p.is_file():
                    run.inputs[str(p)] = p
    else:
        ds = generate_synthetic(cfg.data.generator, cfg.data_seed)
    tables = FeatureTables.from_dataset(ds)
    split = split_temporal(ds.instances, ds.graph, derive_seed(cfg.data_seed, "split"), tables.featurizer)
    return ds, tables, split


# -- subcommands ---------------------------------------------------------------
def cmd_synth(cfg: RunConfig, run: Run, args) -> int:
    t0 = time.perf_counter()
    ds = generate_synthetic(cfg.data.generator, cfg.data_seed)
    paths = write_dataset(ds, run.out / "data")
    for p in paths.values():
        run.artifact(p)
    run.timings["synth_seconds"] = time.perf_counter() - t0
    print(f"wrote {len(paths)} files for {ds.n} users, {ds.graph.num_edges} edges, "
          f"{len(ds.instances)} instances to {run.out / 'data'}")
    return 0


def cmd_train(cfg: RunConfig, run: Run, args) -> int:
    kind = args.kind or cfg.model.variant
    t0 = time.perf_counter()
    ds, tables, split = load_data(cfg, run)
    run.timings["data_seconds"] = time.perf_counter() - t0
    log.info("train %d, validation %d, test %d instances", len(split.train), len(split.validation), len(split.test))
    model = build_model(kind, tables, cfg.seed, cfg.model)
    train_cfg = cfg.train
    train_cfg.seed = cfg.seed
    report = train_and_evaluate(model, split, tables, train_cfg, list(cfg.eval.seeds), log=log.info)
    run.artifact(save_checkpoint(model, run.out / "model.npz"))
    run.artifact(write_json(run.out / "metrics.json", report.to_dict()))
    run.timings.update(report.timings)
    print(json.dumps({"model": kind, "best_epoch": report.best_epoch, **report.test}, sort_keys=True))
    return 0


def cmd_eval(cfg: RunConfig, run: Run, args) -> int:
    ckpt = Path(args.checkpoint) if args.checkpoint else run.out / "model.npz"
    if not ckpt.is_file():
        print(f"error: checkpoint not found: {ckpt}", file=sys.stderr)
        return 2
    run.inputs[str(ckpt)] = ckpt
    model = load_checkpoint(ckpt)
    _, tables, split = load_data(cfg, run)
    t0 = time.perf_counter()
    known = positive_targets(split.train, split.validation, split.test)
    result = evaluate(
        lambda s: model.make_scorer(tables, derive_seed(s, "eval-sampling")),
        split.test,
        tables.graph,
        cfg.train.eval_negatives,
        cfg.train.k_list,
        list(cfg.eval.seeds),
        known,
    )
    run.timings["eval_seconds"] = time.perf_counter() - t0
    out = {
        "model": model.kind,
        "seeds": list(cfg.eval.seeds),
        "test": result.metrics,
        "test_per_seed": result.per_seed,
        "queries": result.queries,
        "skipped": result.skipped,
    }
    run.artifact(write_json(run.out / "eval.json", out))
    print(json.dumps(result.metrics, sort_keys=True))
    return 0


def cmd_ablate(cfg: RunConfig, run: Run, args) -> int:
    _, tables, split = load_data(cfg, run)
    results = {}
    for kind in cfg.ablate.kinds:
        t0 = time.perf_counter()
        sweep = run_seeds(kind, split, tables, cfg.train, list(cfg.ablate.seeds), cfg.model, log=log.info)
        run.timings[f"{kind}_seconds"] = time.perf_counter() - t0
        results[kind] = sweep.to_dict()
    run.artifact(write_json(run.out / "ablation.json", results))
    keys = ("HR@10", "NDCG@10")
    print(f"{'model':<12}" + "".join(f"{k:>10}" for k in keys))
    for kind, res in results.items():
        print(f"{kind:<12}" + "".join(f"{res['mean'][k]:>10.4f}" for k in keys))
    return 0


def cmd_gradcheck(cfg: RunConfig, run: Run, args) -> int:
    g = cfg.gradcheck
    check = frog_gradcheck(
        n=g.users, d=g.dim, h=g.hidden, modalities=g.modalities, batch=g.batch, seed=cfg.seed, step=g.step,
        aggregator=cfg.model.aggregator,
    )
    out = check.to_dict()
    run.timings["gradcheck_seconds"] = out.pop("seconds")
    out["threshold"] = g.threshold
    out["passed"] = bool(check.result.max_rel_error <= g.threshold)
    run.artifact(write_json(run.out / "gradcheck.json", out))
    print(f"max relative error {check.result.max_rel_error:.3e} over {check.result.n_entries} entries "
          f"(worst: {check.result.worst_parameter}); threshold {g.threshold:g}: {'PASS' if out['passed'] else 'FAIL'}")
    return 0 if out["passed"] else 1


def cmd_bench(cfg: RunConfig, run: Run, args) -> int:
    b = cfg.bench
    res = bench_matching(b.d_list, b.t, b.repetitions, b.batch, seed=cfg.seed)
    # timings are machine-dependent, so bench.json is not hashed into the manifest
    write_json(run.out / "bench.json", res.to_dict())
    for d, s in zip(res.d_list, res.seconds):
        print(f"d={d:<5} {s / res.batch * 1e6:10.2f} us/pair")
    print(f"log-log slope {res.slope:.3f}; time ratio for 2t: {res.t_ratio:.3f}")
    return 0


HANDLERS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "gradcheck": cmd_gradcheck,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value (repeatable); dotted or unique bare keys")
    common.add_argument("--out", help="output directory (overrides the config's out)")
    common.add_argument("--seed", type=int, help="master seed (overrides the config's seed)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="frogrec", description="Multi-modal friend recommendation toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    sub.required = True
    sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p = sub.add_parser("train", parents=[common], help="train one model and score the test split")
    p.add_argument("--kind", choices=MODEL_KINDS, help="model variant or baseline (default: model.variant)")
    p = sub.add_parser("eval", parents=[common], help="evaluate a saved checkpoint on the test split")
    p.add_argument("--checkpoint", help="checkpoint file (default: <out>/model.npz)")
    sub.add_parser("ablate", parents=[common], help="train ablation variants and baselines over several seeds")
    sub.add_parser("gradcheck", parents=[common], help="finite-difference check of the full model loss")
    sub.add_parser("bench", parents=[common], help="time the matching network against d")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(("seed", args.seed))
    if args.out is not None:
        overrides.append(("out", args.out))
    try:
        cfg = parse_config(args.config, overrides)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    set_default_dtype(cfg.precision)
    run = Run(args.command, cfg, argv)
    try:
        code = HANDLERS[args.command](cfg, run, args)
    except (DatasetFormatError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
