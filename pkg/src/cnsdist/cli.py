"""Command-line front end: ``cnsdist {generate,cns,evaluate}``.

Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .cns import (ClassCondDistributions, class_distributions_analytic,
                  empirical_class_distributions)
from .evaluation import SplitSpec, evaluate
from .graph import EdgeListParseError, read_edge_list, write_edge_list, write_label_map
from .indices import INDICES, KATZ_PHI, LP_PHI, KatzDivergenceError
from .models import KINDS, ConvergenceError, from_descriptor, load_descriptor, sample_graph

FORMAT_VERSION = 1

EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 2, 3, 4


class UsageError(Exception):
    pass


def _header(config: dict) -> str:
    return f"# cnsdist format_version={FORMAT_VERSION} config={json.dumps(config, sort_keys=True)}\n"


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=KINDS, help="model kind")
    g.add_argument("--config", help="JSON model descriptor {kind, n, m, p, eta, alpha, m0, seed}")
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=float, help="mean degree (ER; BA uses m = k/2)")
    g.add_argument("--p", type=float, help="deletion/rewiring/addition probability")
    g.add_argument("--eta", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--m0", type=int)


def _descriptor(args) -> dict | None:
    if args.config:
        desc = load_descriptor(args.config)
        if args.seed is None and "seed" in desc:
            args.seed = int(desc["seed"])
        return desc
    if args.model is None:
        return None
    if args.n is None:
        raise UsageError("--n is required with --model")
    desc = {"kind": args.model, "n": args.n}
    for key in ("m", "k", "p", "eta", "alpha", "m0"):
        v = getattr(args, key)
        if v is not None:
            desc[key] = v
    return desc


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cnsdist", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a graph from a model")
    _model_args(g)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True, help="edge-list path; a .json sidecar is written next to it")

    c = sub.add_parser("cns", help="CNS distributions of connected/unconnected/all sets")
    _model_args(c)
    c.add_argument("--edges", help="edge-list file (empirical mode)")
    c.add_argument("--mode", choices=("analytic", "empirical", "both"), default="analytic")
    c.add_argument("--q", type=int, default=2)
    c.add_argument("--all-only", action="store_true", help="emit only the all-sets distribution")
    c.add_argument("--sampled", action="store_true", help="sample node sets instead of enumerating")
    c.add_argument("--sample-count", type=int, default=100_000)
    c.add_argument("--seed", type=int)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out-dir", required=True)
    c.add_argument("--threads", type=int, default=1)

    e = sub.add_parser("evaluate", help="experimental and theoretical AUC/Precision")
    e.add_argument("--edges", required=True)
    e.add_argument("--indices", default="cn,ra,aa,lp,katz",
                   help=f"comma-separated subset of {','.join(INDICES)}")
    e.add_argument("--eps", type=float, default=0.1)
    e.add_argument("--reps", type=int, default=100)
    e.add_argument("--comparisons", type=int, default=10_000)
    e.add_argument("--phi-lp", type=float, default=LP_PHI)
    e.add_argument("--phi-katz", type=float, default=KATZ_PHI)
    e.add_argument("--theory-only", action="store_true")
    e.add_argument("--seed", type=int)
    e.add_argument("--format", choices=("json", "text"), default="json")
    e.add_argument("--out", required=True)
    e.add_argument("--threads", type=int, default=1)
    return ap


def _require_seed(args) -> None:
    if args.seed is None:
        raise UsageError("--seed is required")


def _run_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["version"] = __version__
    return cfg


def cmd_generate(args) -> None:
    desc = _descriptor(args)
    _require_seed(args)
    if desc is None:
        raise UsageError("a model is required (--model or --config)")
    model = from_descriptor(desc)
    graph = sample_graph(model, args.seed)
    cfg = _run_config(args)
    with open(args.out, "w") as fh:
        fh.write(_header(cfg))
        write_edge_list(graph, fh)
    side = {"format_version": FORMAT_VERSION, "config": cfg, "model": model.descriptor(),
            "seed": args.seed, "nodes": graph.n, "edges": graph.num_edges}
    with open(Path(args.out).with_suffix(Path(args.out).suffix + ".json"), "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _summary(d: ClassCondDistributions) -> dict:
    out = {"chi_c": d.chi_c, "q": d.q, "meta": d.meta}
    for name in ("p_c", "p_d", "p_a"):
        p = getattr(d, name)
        out[name] = None if p is None else {"mean": p.mean(), "var": p.var(), "median": p.median()}
    out["mixture_residual"] = None if d.p_c is None and d.p_d is None else d.mixture_residual()
    return out


def _write_distributions(d: ClassCondDistributions, out_dir: Path, prefix: str,
                         fmt: str, cfg: dict) -> None:
    if fmt == "json":
        body = {"format_version": FORMAT_VERSION, "config": cfg, **d.to_json()}
        (out_dir / f"{prefix}distributions.json").write_text(json.dumps(body, indent=2) + "\n")
        return
    for name in ("p_c", "p_d", "p_a"):
        p = getattr(d, name)
        if p is None:
            continue
        with open(out_dir / f"{prefix}{name}.csv", "w") as fh:
            fh.write(_header(cfg))
            p.to_csv(fh)


def cmd_cns(args) -> None:
    _require_seed(args)
    if args.q < 2 and not args.all_only:
        raise UsageError("class split needs q >= 2 (use --all-only for the degree distribution)")
    desc = _descriptor(args)
    if args.mode in ("analytic", "both") and desc is None:
        raise UsageError(f"{args.mode} mode needs a model (--model or --config)")
    if args.mode == "empirical" and args.edges is None:
        if desc is None:
            raise UsageError("empirical mode needs --edges or a model to sample")
    _set_threads(args.threads)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _run_config(args)
    summary = {"format_version": FORMAT_VERSION, "config": cfg}
    results = {}
    model = from_descriptor(desc) if desc is not None else None
    if args.mode in ("analytic", "both"):
        results["analytic"] = class_distributions_analytic(
            model, args.q, "sampled" if args.sampled else "exact", args.sample_count, args.seed)
    if args.mode in ("empirical", "both"):
        graph = read_edge_list(args.edges) if args.edges else sample_graph(model, args.seed)
        results["empirical"] = empirical_class_distributions(graph, args.q, args.sample_count,
                                                             args.seed)
    for key, d in results.items():
        prefix = "" if len(results) == 1 else f"{key}_"
        _write_distributions(d, out_dir, prefix, args.format, cfg)
        summary[key] = _summary(d)
    if len(results) == 2:
        a, e = results["analytic"], results["empirical"]
        summary["total_variation"] = {
            name: getattr(a, name).total_variation(getattr(e, name))
            for name in ("p_c", "p_d", "p_a")
            if getattr(a, name) is not None and getattr(e, name) is not None}
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, default=_jsonable) + "\n")


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialize {type(o)}")


def cmd_evaluate(args) -> None:
    _require_seed(args)
    indices = [s.strip().lower() for s in args.indices.split(",") if s.strip()]
    bad = [s for s in indices if s not in INDICES]
    if bad:
        raise UsageError(f"unknown index {bad[0]!r}; valid indices: {', '.join(INDICES)}")
    _set_threads(args.threads)
    try:
        spec = SplitSpec(args.eps, args.seed, args.reps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    graph = read_edge_list(args.edges)
    report = evaluate(graph, indices, spec, args.comparisons, theory_only=args.theory_only,
                      phi_lp=args.phi_lp, phi_katz=args.phi_katz)
    report.config["run"] = _run_config(args)
    report.config["format_version"] = FORMAT_VERSION
    if args.format == "json":
        text = json.dumps(report.to_json(), indent=2) + "\n"
    else:
        text = _header(_run_config(args)) + report.to_table(os.path.basename(args.edges))
    with open(args.out, "w") as fh:
        fh.write(text)


def _set_threads(k: int) -> None:
    if k < 1:
        raise UsageError("--threads must be positive")
    import numba
    numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


COMMANDS = {"generate": cmd_generate, "cns": cmd_cns, "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cnsdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeListParseError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"cnsdist: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, KatzDivergenceError, FloatingPointError) as exc:
        print(f"cnsdist: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"cnsdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
