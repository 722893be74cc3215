"""Write plot-ready CSVs of analytic and simulated CNS distributions.

One file per model and pair class, with columns ``w,analytic,simulated``.
"""

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cnsdist import models
from cnsdist.cns import class_distributions_analytic, empirical_class_distributions
from cnsdist.models import sample_graph


@dataclass
class FigureConfig:
    n: int = 1000
    m: int = 25
    seed: int = 0
    samples: int = 10


def figure_models(cfg: FigureConfig):
    return {
        "rrl": models.rrl(cfg.n, 2 * cfg.m),
        "er": models.er(cfg.n, 2.0 * cfg.m),
        "ws_p0.1": models.ws(cfg.n, cfg.m, 0.1),
        "ws_p0.4": models.ws(cfg.n, cfg.m, 0.4),
        "ba": models.ba(cfg.n, cfg.m),
    }


def averaged_empirical(model, cfg: FigureConfig):
    hc = hd = None
    for k in range(cfg.samples if model.kind != "rrl" else 1):
        d = empirical_class_distributions(sample_graph(model, cfg.seed + k))
        c, u = d.counts["c"], d.counts["d"]
        hc = c if hc is None else hc + c
        hd = u if hd is None else hd + u
    return {"p_c": hc / hc.sum(), "p_d": hd / hd.sum(), "p_a": (hc + hd) / (hc + hd).sum()}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/figures")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--m", type=int, default=25)
    ap.add_argument("--samples", type=int, default=10, help="sampled graphs per model")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = FigureConfig(args.n, args.m, args.seed, args.samples)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, model in figure_models(cfg).items():
        analytic = class_distributions_analytic(model)
        simulated = averaged_empirical(model, cfg)
        for cls in ("p_c", "p_d", "p_a"):
            a = getattr(analytic, cls).dense()
            s = simulated[cls]
            width = max(len(a), len(s))
            a, s = np.pad(a, (0, width - len(a))), np.pad(s, (0, width - len(s)))
            with open(out / f"{name}_{cls}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["w", "analytic", "simulated"])
                for k in range(width):
                    w.writerow([k, repr(float(a[k])), repr(float(s[k]))])
        print(f"{name}: wrote {out}/{name}_{{p_c,p_d,p_a}}.csv")


if __name__ == "__main__":
    main()
