"""Command-line front end: seeded experiments with bit-exact JSON reports.

A single JSON config document describes the group, the set, and the task
parameters; command-line flags override config fields.  Reports are written
with sorted keys and rationals serialized as ``p/q`` strings, so identical
configs and seeds produce byte-identical files.  Timings are only embedded
when ``--timings`` is passed, keeping the default output reproducible.

Exit codes: 0 success, 1 internal/batch failure, 2 validation error,
3 budget refusal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetExceededError, GroupValidationError, InternalCheckError
from .groups import (
    FiniteGroup,
    GroupSubset,
    from_cayley_table,
    generated_subgroup,
    is_normal,
    make_cyclic,
    make_dihedral,
    make_direct_product,
    make_symmetric,
)
from .setsystem import (
    DEFAULT_WORK_BUDGET,
    SetSystem,
    TranslateFamilySpec,
    shatter_function,
    translate_family,
    vc_dimension,
)
from .approx import eps_net, random_eps_approximation, sample_size
from .stabilizers import (
    covering_number,
    stab_covering_witness,
    stab_zero_subgroup,
    stabilizer_core,
)
from .stratify import build_witness
from .regularity import irregular_fraction, regularity_pipeline

TASKS = (
    "describe",
    "vcdim",
    "shatter",
    "epsnet",
    "approx",
    "stab",
    "cover",
    "gstar",
    "witness",
    "regularity",
    "batch",
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3

# Config fields that affect the computation and therefore the config hash;
# output locations and timing flags are deliberately excluded.
_HASH_FIELDS = (
    "task",
    "group",
    "set",
    "system_file",
    "subgroup",
    "mode",
    "side",
    "cover_mode",
    "exact_limit",
    "shatter_mode",
    "epsilon",
    "audit_epsilon",
    "target_mass",
    "grid",
    "k",
    "cap",
    "n",
    "c",
    "tries",
    "max_attempts",
    "seed",
    "budget",
    "tasks",
)


class ConfigError(ValueError):
    pass


def parse_rational(value, name: str) -> Fraction:
    try:
        if isinstance(value, str):
            if "/" in value:
                p, q = value.split("/", 1)
                return Fraction(int(p), int(q))
            return Fraction(int(value))
        if isinstance(value, int):
            return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name} must be a rational 'p/q', got {value!r}") from exc
    raise ConfigError(f"{name} must be a rational 'p/q' string, got {value!r}")


def build_group(spec, *, base_dir: Path) -> FiniteGroup:
    if not isinstance(spec, dict) or "constructor" not in spec:
        raise ConfigError("group spec must be an object with a 'constructor'")
    ctor = spec["constructor"]
    args = spec.get("args", [])
    if ctor == "cyclic":
        return make_cyclic(int(args[0]))
    if ctor == "symmetric":
        return make_symmetric(int(args[0]))
    if ctor == "dihedral":
        return make_dihedral(int(args[0]))
    if ctor == "direct_product":
        if len(args) < 2:
            raise ConfigError("direct_product needs at least two factor specs")
        parts = [build_group(a, base_dir=base_dir) for a in args]
        g = parts[0]
        for h in parts[1:]:
            g = make_direct_product(g, h)
        return g
    if ctor == "cayley_file":
        path = Path(spec.get("path", ""))
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"cayley file not found: {path}")
        return from_cayley_table(path.read_text(encoding="utf-8"))
    raise ConfigError(f"unknown group constructor {ctor!r}")


def build_set(spec, group: FiniteGroup) -> GroupSubset:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("set spec must be an object with a 'kind'")
    n = group.order
    kind = spec["kind"]
    if kind == "indices":
        return GroupSubset.from_indices(n, (int(v) for v in spec.get("values", [])))
    if kind == "interval":
        start, length = int(spec["start"]), int(spec["length"])
        if length < 0 or length > n:
            raise ConfigError("interval length out of range")
        return GroupSubset.from_indices(n, ((start + j) % n for j in range(length)))
    if kind == "intervals":
        bits = GroupSubset.empty(n)
        for start, length in spec.get("items", []):
            piece = build_set({"kind": "interval", "start": start, "length": length}, group)
            bits = bits | piece
        return bits
    if kind == "coset_union":
        gens = GroupSubset.from_indices(n, (int(v) for v in spec.get("subgroup_generators", [])))
        h = generated_subgroup(group, gens)
        out = GroupSubset.empty(n)
        for rep in spec.get("reps", []):
            out = out | group.left_translate(int(rep), h)
        return out
    if kind == "random":
        density = parse_rational(spec.get("density", "1/2"), "density")
        if not 0 <= density <= 1:
            raise ConfigError("density out of range")
        rng = random.Random(int(spec.get("seed", 0)))
        p, q = density.numerator, density.denominator
        return GroupSubset.from_indices(n, (x for x in range(n) if rng.randrange(q) < p))
    raise ConfigError(f"unknown set kind {kind!r}")


def _family_inputs(cfg, *, base_dir: Path):
    """Resolve a SetSystem either from a system file or from group+set+mode."""
    if cfg.get("system_file"):
        path = Path(cfg["system_file"])
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"system file not found: {path}")
        return SetSystem.from_text(path.read_text(encoding="utf-8"))
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    a = build_set(cfg_require(cfg, "set"), group)
    mode = cfg.get("mode", "left")
    return translate_family(TranslateFamilySpec(group, a, mode))


def cfg_require(cfg, key):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(f"missing required config field {key!r}")
    return cfg[key]


# -- task handlers -----------------------------------------------------------


def run_describe(cfg, *, base_dir: Path):
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    result = {
        "description": group.description,
        "order": group.order,
        "abelian": group.is_abelian(),
        "center_size": len(group.center()),
        "identity": group.identity,
    }
    if cfg.get("set") is not None:
        s = build_set(cfg["set"], group)
        sub = generated_subgroup(group, s)
        result["generated_subgroup_order"] = len(sub)
        result["generated_subgroup_index"] = group.order // len(sub)
    return result, None


def run_vcdim(cfg, *, base_dir: Path):
    sys_ = _family_inputs(cfg, base_dir=base_dir)
    cap = int(cfg.get("cap", 16))
    budget = int(cfg.get("budget", DEFAULT_WORK_BUDGET))
    res = vc_dimension(sys_, cap=cap, budget=budget)
    result = {
        "vc": {"value": res.value, "status": res.status},
        "family_size": len(sys_),
        "base_size": sys_.base_size,
    }
    code = EXIT_BUDGET if res.status == "unknown_above" else EXIT_OK
    return result, code


def run_shatter(cfg, *, base_dir: Path):
    sys_ = _family_inputs(cfg, base_dir=base_dir)
    n = int(cfg_require(cfg, "n"))
    mode = cfg.get("shatter_mode", "exact")
    res = shatter_function(
        sys_,
        n,
        mode,
        seed=cfg.get("seed"),
        tries=int(cfg.get("tries", 1000)),
        budget=int(cfg.get("budget", DEFAULT_WORK_BUDGET)),
    )
    return {
        "n": n,
        "value": res.value,
        "exact": res.exact,
        "family_size": len(sys_),
    }, None


def run_epsnet(cfg, *, base_dir: Path):
    sys_ = _family_inputs(cfg, base_dir=base_dir)
    eps = parse_rational(cfg_require(cfg, "epsilon"), "epsilon")
    cert = eps_net(sys_, eps)
    result = cert.to_json_dict()
    result["net_size"] = len(cert.points)
    result["family_size"] = len(sys_)
    return result, None


def run_approx(cfg, *, base_dir: Path):
    sys_ = _family_inputs(cfg, base_dir=base_dir)
    eps = parse_rational(cfg_require(cfg, "epsilon"), "epsilon")
    k = int(cfg_require(cfg, "k"))
    seed = int(cfg.get("seed", 0))
    cert = random_eps_approximation(
        sys_,
        eps,
        seed,
        int(cfg.get("max_attempts", 3)),
        k=k,
        c=parse_rational(cfg.get("c", "8"), "c"),
    )
    result = cert.to_json_dict()
    result["sample_size"] = sample_size(k, eps, parse_rational(cfg.get("c", "8"), "c"))
    result["family_size"] = len(sys_)
    return result, None


def run_stab(cfg, *, base_dir: Path):
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    a = build_set(cfg_require(cfg, "set"), group)
    eps = parse_rational(cfg_require(cfg, "epsilon"), "epsilon")
    if not 0 <= eps <= 1:
        raise ConfigError("epsilon out of range")
    if eps == 0:
        stab = stab_zero_subgroup(group, a)
        return {
            "epsilon": "0/1",
            "stab_members": stab.members(),
            "stab_size": len(stab),
            "is_subgroup": True,
        }, None
    report = stab_covering_witness(group, a, eps)
    return report.to_json_dict(), None


def run_cover(cfg, *, base_dir: Path):
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    a = build_set(cfg_require(cfg, "set"), group)
    side = cfg.get("side", "left")
    mode = cfg.get("cover_mode", "greedy")
    res = covering_number(
        group, a, side, mode, exact_limit=int(cfg.get("exact_limit", 60))
    )
    return res.to_json_dict(), None


def run_gstar(cfg, *, base_dir: Path):
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    a = build_set(cfg_require(cfg, "set"), group)
    core = stabilizer_core(group, a)
    return {
        "members": core.members(),
        "size": len(core),
        "index": group.order // len(core),
        "is_normal": is_normal(group, core),
    }, None


def run_witness(cfg, *, base_dir: Path):
    k = int(cfg_require(cfg, "k"))
    w = build_witness(k)
    return w.to_json_dict(), None


def run_regularity(cfg, *, base_dir: Path):
    group = build_group(cfg_require(cfg, "group"), base_dir=base_dir)
    a = build_set(cfg_require(cfg, "set"), group)
    eps = parse_rational(cfg_require(cfg, "epsilon"), "epsilon")
    if not 0 <= eps < Fraction(1, 2):
        raise ConfigError("epsilon out of range")
    if cfg.get("subgroup") is not None:
        h = generated_subgroup(group, build_set(cfg["subgroup"], group))
        report = irregular_fraction(group, h, a, eps)
        return report.to_json_dict(), None
    grid = [parse_rational(e, "grid entry") for e in cfg_require(cfg, "grid")]
    target = parse_rational(cfg.get("target_mass", "1/10"), "target_mass")
    res = regularity_pipeline(group, a, grid, eps, target)
    return res.to_json_dict(), None


_HANDLERS = {
    "describe": run_describe,
    "vcdim": run_vcdim,
    "shatter": run_shatter,
    "epsnet": run_epsnet,
    "approx": run_approx,
    "stab": run_stab,
    "cover": run_cover,
    "gstar": run_gstar,
    "witness": run_witness,
    "regularity": run_regularity,
}


# -- report plumbing ---------------------------------------------------------


def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return int(value)
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    return str(value)


def canonical_json(obj) -> str:
    return json.dumps(_jsonify(obj), sort_keys=True, indent=2) + "\n"


def config_hash(cfg: dict) -> str:
    core = {k: cfg[k] for k in _HASH_FIELDS if k in cfg and cfg[k] is not None}
    blob = json.dumps(_jsonify(core), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def make_report(task, cfg, result, errors, timings_ms):
    return {
        "config_hash": config_hash(cfg),
        "version": __version__,
        "task": task,
        "inputs": _jsonify(
            {k: v for k, v in cfg.items() if k in _HASH_FIELDS and v is not None}
        ),
        "result": result,
        "timings_ms": timings_ms,
        "errors": errors,
    }


def write_report(report: dict, out_path: str | None) -> None:
    text = canonical_json(report)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_rows_for(task: str, result: dict) -> list[str] | None:
    holder = None
    if task == "regularity":
        holder = result.get("cosets") or (result.get("best") or {}).get("report", {}).get("cosets")
    if holder is None:
        return None
    lines = ["coset_rep,size,density,regular"]
    for row in holder:
        lines.append(f"{row['rep']},{row['size']},{row['density']},{int(row['regular'])}")
    return lines


def run_task(task: str, cfg: dict, *, base_dir: Path, with_timings: bool):
    """Execute one task; returns (report, exit_code)."""
    errors: list[dict] = []
    result = None
    code = EXIT_OK
    t0 = time.perf_counter()
    try:
        result, override = _HANDLERS[task](cfg, base_dir=base_dir)
        if override is not None:
            code = override
    except (ConfigError, GroupValidationError, ValueError) as exc:
        errors.append({"code": "validation", "message": str(exc)})
        code = EXIT_VALIDATION
    except BudgetExceededError as exc:
        errors.append({"code": "budget", "message": str(exc)})
        code = EXIT_BUDGET
    except InternalCheckError as exc:
        errors.append({"code": "internal", "message": str(exc)})
        code = EXIT_FAILURE
    elapsed = (time.perf_counter() - t0) * 1000.0
    timings = {"total_ms": round(elapsed, 3)} if with_timings else None
    report = make_report(task, cfg, result, errors, timings)
    return report, code


def run_batch(cfg: dict, *, base_dir: Path, with_timings: bool):
    tasks = cfg.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise ConfigError("batch requires a nonempty 'tasks' list")
    entries = []
    failed = 0
    for i, sub in enumerate(tasks):
        if not isinstance(sub, dict) or sub.get("task") not in _HANDLERS:
            entries.append(
                {
                    "task": sub.get("task") if isinstance(sub, dict) else None,
                    "status": "error",
                    "exit_code": EXIT_VALIDATION,
                    "report": None,
                }
            )
            failed += 1
            continue
        sub_cfg = dict(sub)
        if "seed" not in sub_cfg and cfg.get("seed") is not None:
            sub_cfg["seed"] = cfg["seed"]
        report, code = run_task(sub_cfg["task"], sub_cfg, base_dir=base_dir, with_timings=with_timings)
        if sub_cfg.get("out"):
            write_report(report, str(base_dir / sub_cfg["out"]))
        ok = code == EXIT_OK
        failed += 0 if ok else 1
        entries.append(
            {
                "task": sub_cfg["task"],
                "status": "ok" if ok else "error",
                "exit_code": code,
                "report": report,
            }
        )
    summary = {"total": len(entries), "ok": len(entries) - failed, "failed": failed}
    result = {"tasks": entries, "summary": summary}
    return result, (EXIT_OK if failed == 0 else EXIT_FAILURE)


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupvc",
        description="Exact VC-dimension, net, stabilizer and regularity "
        "experiments on finite groups.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} task")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="64-bit unsigned seed")
        p.add_argument("--out", type=str, default=None, help="report output path")
        p.add_argument("--csv", type=str, default=None, help="CSV output path")
        p.add_argument("--budget", type=int, default=None, help="work budget in nodes")
        p.add_argument("--group", type=str, default=None, help="inline group spec JSON")
        p.add_argument("--set", type=str, default=None, help="inline set spec JSON")
        p.add_argument("--epsilon", type=str, default=None, help="rational p/q")
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--cap", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument(
            "--timings",
            action="store_true",
            help="embed wall-clock timings (breaks byte-identical output)",
        )
    return parser


def load_config(args) -> tuple[dict, Path]:
    cfg: dict = {}
    base_dir = Path.cwd()
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        cfg = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        base_dir = path.parent
    if cfg.get("task") not in (None, args.task):
        raise ConfigError(
            f"config task {cfg.get('task')!r} does not match subcommand {args.task!r}"
        )
    cfg["task"] = args.task
    # flags override config fields
    for key in ("seed", "out", "csv", "budget", "epsilon", "k", "cap", "n"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    for key in ("group", "set"):
        val = getattr(args, key)
        if val is not None:
            try:
                cfg[key] = json.loads(val)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--{key} is not valid JSON: {exc}") from exc
    return cfg, base_dir


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, base_dir = load_config(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION

    if args.task == "batch":
        try:
            result, code = run_batch(cfg, base_dir=base_dir, with_timings=args.timings)
        except ConfigError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return EXIT_VALIDATION
        report = make_report("batch", cfg, result, [], None)
        write_report(report, cfg.get("out"))
        return code

    report, code = run_task(args.task, cfg, base_dir=base_dir, with_timings=args.timings)
    write_report(report, cfg.get("out"))
    if cfg.get("csv") and report["result"]:
        rows = _csv_rows_for(args.task, report["result"])
        if rows is not None:
            Path(cfg["csv"]).write_text("\n".join(rows) + "\n", encoding="utf-8")
    if args.task == "describe" and report["result"] and not cfg.get("out"):
        r = report["result"]
        sys.stderr.write(
            f"{r['description']}: order {r['order']}, "
            f"{'abelian' if r['abelian'] else 'non-abelian'}, "
            f"center size {r['center_size']}\n"
        )
    return code


if __name__ == "__main__":
    raise SystemExit(main())
