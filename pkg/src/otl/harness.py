"""Experiment protocols and the ``otl`` command line.

Each protocol is a plain function returning in-memory results; the CLI
wraps them, writes CSV curves and JSON summaries into ``--out``, and maps
failures to exit codes (2 invalid input, 3 file problems, 4 iteration cap).
"""

import argparse
import json
import logging
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import datagen
from .balancer import (
    BalanceConfig,
    IterationCapError,
    balance,
    powerlaw_target,
)
from .discrim import discrim_report
from .evaluation import KnnConfig, weighted_knn_predict
from .matrix_core import as_scores, histogram, min_achievable_std
from .sinkhorn import SinkhornConfig, compare_balancers, sinkhorn_balance

log = logging.getLogger("otl")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_ITER_CAP = 0, 2, 3, 4

# Full-size defaults for the sweep commands.
DEFAULT_BETAS = (1.5, 2.0, 3.0, 4.0, 5.0, 6.0)
DEFAULT_KS = (128, 256, 512, 1024)
DEFAULT_COMPARE_KS = tuple(range(50, 1001, 50))
DEFAULT_XS = (0, 2, 4, 6, 8, 10)


# -- protocols ---------------------------------------------------------------

def parse_target(spec, n, k):
    """``"uniform"`` -> None, ``"powerlaw:X"`` -> power-law target array."""
    if spec in (None, "uniform"):
        return None
    kind, _, arg = spec.partition(":")
    if kind != "powerlaw" or not arg:
        raise ValueError(f"target must be 'uniform' or 'powerlaw:X', got {spec!r}")
    try:
        x = float(arg)
    except ValueError:
        raise ValueError(f"bad power-law exponent {arg!r}") from None
    return powerlaw_target(n, k, x)


def summarize(result, n, k, config, wall_ms):
    return {
        "n": n,
        "k": k,
        "beta": config.beta,
        "alpha0": config.alpha_floor,
        "final_std": result.final_std,
        "iterations": result.iterations,
        "improvements": result.improvements,
        "wall_ms": wall_ms,
    }


def timed_balance(scores, config):
    start = time.perf_counter()
    res = balance(scores, config)
    return res, (time.perf_counter() - start) * 1e3


def _run_one(args):
    scores, config = args
    return timed_balance(scores, config)


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _dedupe(values, what):
    seen, out = set(), []
    for v in values:
        if v in seen:
            warnings.warn(f"duplicate {what} {v} dropped", stacklevel=3)
            continue
        seen.add(v)
        out.append(v)
    return out


def sweep_beta(scores, betas, alpha0=1e-15, jobs=1):
    """Balance one matrix once per decay rate; returns ``[(beta, result, wall_ms)]``."""
    m = as_scores(scores)
    betas = _dedupe([float(b) for b in betas], "beta")
    if not betas:
        raise ValueError("beta list is empty")
    configs = [BalanceConfig(beta=b, alpha_floor=alpha0) for b in betas]
    runs = _map(_run_one, [(m, c) for c in configs], jobs)
    return [(b, res, ms) for b, (res, ms) in zip(betas, runs)]


def _make_matrix(gen, n, k, seed, bias=10.0):
    if gen == "uniform":
        return datagen.gen_uniform(n, k, seed)
    if gen == "skewed":
        return datagen.gen_skewed(n, k, seed, bias)
    raise ValueError(f"unknown generator {gen!r}")


def _sweep_k_one(args):
    gen, n, k, seed, config = args
    return timed_balance(_make_matrix(gen, n, k, seed), config)


def sweep_k(n, ks, beta=1.5, seed=0, gen="uniform", alpha0=1e-15, jobs=1):
    """Balance a fresh ``n x k`` matrix per cluster count; ``[(k, result, wall_ms)]``."""
    ks = _dedupe([int(k) for k in ks], "k")
    if not ks:
        raise ValueError("k list is empty")
    if min(ks) < 2:
        raise ValueError("every k must be at least 2")
    config = BalanceConfig(beta=beta, alpha_floor=alpha0)
    runs = _map(_sweep_k_one, [(gen, n, k, seed, config) for k in ks], jobs)
    return [(k, res, ms) for k, (res, ms) in zip(ks, runs)]


def _compare_one(args):
    n, k, seed, otl_config, sk_config = args
    return compare_balancers(datagen.gen_uniform(n, k, seed), otl_config,
                             sk_config)


def compare_sweep(n, ks, seed=0, beta=1.5, alpha0=1e-15, sk_config=None,
                  jobs=1):
    """One OTL-vs-Sinkhorn comparison per ``k`` on uniform random matrices."""
    ks = _dedupe([int(k) for k in ks], "k")
    if not ks:
        raise ValueError("k list is empty")
    if min(ks) < 2:
        raise ValueError("every k must be at least 2")
    otl_config = BalanceConfig(beta=beta, alpha_floor=alpha0)
    sk_config = sk_config or SinkhornConfig()
    return _map(_compare_one,
                [(n, k, seed, otl_config, sk_config) for k in ks], jobs)


def timing_run(n, k, repeats=3, seed=0, beta=1.5, alpha0=1e-15):
    """Median wall time of :func:`balance` over fresh matrices (seeds ``seed + r``)."""
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    config = BalanceConfig(beta=beta, alpha_floor=alpha0)
    times, iters = [], []
    for r in range(repeats):
        m = datagen.gen_uniform(n, k, seed + r)
        res, ms = timed_balance(m, config)
        times.append(ms)
        iters.append(res.iterations)
    return {
        "n": n,
        "k": k,
        "repeats": repeats,
        "seed": seed,
        "iterations": iters,
        "raw_ms": times,
        "median_ms": float(np.median(times)),
    }


def uneven_run(n, k, xs, beta=1.5, seed=0, alpha0=1e-15, scores=None):
    """Balance towards power-law targets for every exponent in ``xs``."""
    xs = _dedupe([float(x) for x in xs], "x")
    if not xs:
        raise ValueError("x list is empty")
    if min(xs) < 0:
        raise ValueError("power-law exponents must be non-negative")
    m = datagen.gen_uniform(n, k, seed) if scores is None else as_scores(scores)
    n, k = m.shape
    out = []
    for x in xs:
        target = powerlaw_target(n, k, x)
        res = balance(m, BalanceConfig(beta=beta, alpha_floor=alpha0,
                                       target=target))
        out.append({
            "x": x,
            "target": target,
            "counts": res.counts,
            "abs_deviation": np.abs(res.counts - target),
            "residual_std": res.final_std,
            "min_achievable_std": min_achievable_std(n, k, target),
            "iterations": res.iterations,
            "improvements": res.improvements,
        })
    return out


def knn_eval(n=5000, dim=128, centers=5, spread=None, seed=0,
             train_fraction=0.8, config=None):
    """Accuracy of the weighted kNN on a train/query split of Gaussian blobs.

    ``spread`` defaults to a tenth of the smallest distance between centers.
    """
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    config = config or KnnConfig()
    if spread is None:
        _, _, c = datagen.gen_blobs(2, dim, centers, 1.0, seed,
                                    return_centers=True)
        d = np.linalg.norm(c[:, None] - c[None, :], axis=-1)
        spread = float(d[np.triu_indices(centers, 1)].min()) / 10
    x, y = datagen.gen_blobs(n, dim, centers, spread, seed)
    cut = int(round(train_fraction * n))
    pred = weighted_knn_predict(x[:cut], y[:cut], x[cut:], config, centers)
    return {
        "n": n,
        "dim": dim,
        "centers": centers,
        "spread": spread,
        "neighbors": config.neighbors,
        "sigma": config.sigma,
        "accuracy": float(np.mean(pred == y[cut:])),
    }


def metrics(counts):
    counts = [int(c) for c in counts]
    if not counts:
        raise ValueError("histogram is empty")
    if any(c < 0 for c in counts):
        raise ValueError(f"histogram counts must be non-negative: {counts}")
    return {"counts": counts, **discrim_report(counts).as_dict()}


# -- command line --------------------------------------------------------------

def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list: {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"not a comma-separated integer list: {text!r}")


def _write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
                    + "\n")


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _source_matrix(args):
    if args.input:
        return datagen.load_matrix(args.input)
    if args.n is None or args.k is None:
        raise ValueError("give --input PATH or --gen with --n and --k")
    return _make_matrix(args.gen, args.n, args.k, args.seed, args.bias)


def _validate_gen(args):
    if not args.input and (args.n is None or args.k is None):
        raise ValueError("give --input PATH or --gen with --n and --k")
    if args.n is not None and args.n < 1:
        raise ValueError("--n must be at least 1")
    if args.k is not None and args.k < 2:
        raise ValueError("--k must be at least 2")
    if args.bias < 0:
        raise ValueError("--bias must be non-negative")


def _balance_config(args, n, k):
    return BalanceConfig(beta=args.beta, alpha_floor=args.alpha0,
                         max_outer_iters=args.max_outer_iters,
                         target=parse_target(args.target, n, k))


def cmd_gen(args):
    _validate_gen(args)
    m = _source_matrix(args)
    out = _out_dir(args)
    datagen.save_matrix(out / "matrix.otlm", m)
    if args.csv:
        datagen.export_csv(out / "matrix.csv", m)


def cmd_balance(args):
    _validate_gen(args)
    BalanceConfig(beta=args.beta, alpha_floor=args.alpha0,
                  max_outer_iters=args.max_outer_iters)
    m = _source_matrix(args)
    n, k = m.shape
    config = _balance_config(args, n, k)
    try:
        res, ms = timed_balance(m, config)
    except IterationCapError as exc:
        _write_balance(args, exc.result, n, k, config, None)
        raise
    _write_balance(args, res, n, k, config, ms)


def _write_balance(args, res, n, k, config, ms):
    out = _out_dir(args)
    datagen.export_csv(out / "labels.csv", res.labels)
    datagen.export_csv(out / "trace.csv", res.trace)
    summary = summarize(res, n, k, config, ms)
    summary["target"] = args.target
    summary["min_achievable_std"] = min_achievable_std(n, k, res.target)
    summary["source"] = args.input or f"{args.gen}:seed={args.seed}"
    _write_json(out / "summary.json", summary)


def cmd_sinkhorn(args):
    _validate_gen(args)
    config = SinkhornConfig(max_iters=args.max_iters, tol=args.tol,
                            temperature=args.temperature)
    m = _source_matrix(args)
    n, k = m.shape
    start = time.perf_counter()
    res = sinkhorn_balance(m, config)
    ms = (time.perf_counter() - start) * 1e3
    counts = histogram(res.labels, k)
    out = _out_dir(args)
    datagen.export_csv(out / "labels.csv", res.labels)
    _write_json(out / "summary.json", {
        "n": n, "k": k,
        "temperature": config.temperature,
        "tol": config.tol,
        "iterations": res.iterations,
        "final_std": float(np.sqrt(np.mean((counts - n / k) ** 2))),
        "wall_ms": ms,
    })


def cmd_compare(args):
    ks = args.ks if args.ks is not None else list(DEFAULT_COMPARE_KS)
    if not ks:
        raise ValueError("k list is empty")
    if args.n is None or args.n < 1:
        raise ValueError("--n must be at least 1")
    BalanceConfig(beta=args.beta, alpha_floor=args.alpha0)
    records = compare_sweep(args.n, ks, args.seed, args.beta, args.alpha0,
                            jobs=args.jobs)
    out = _out_dir(args)
    datagen.export_csv(out / "compare.csv", records)
    wins = sum(r.std_otl <= r.std_sk for r in records)
    _write_json(out / "summary.json", {
        "n": args.n, "seed": args.seed, "rows": len(records),
        "otl_at_least_as_even": wins,
    })


def cmd_sweep_beta(args):
    betas = args.betas if args.betas is not None else list(DEFAULT_BETAS)
    for b in betas:
        BalanceConfig(beta=b, alpha_floor=args.alpha0)
    _validate_gen(args)
    m = _source_matrix(args)
    runs = sweep_beta(m, betas, args.alpha0, args.jobs)
    out = _out_dir(args)
    summary = []
    for b, res, ms in runs:
        datagen.export_csv(out / f"trace_beta_{b:g}.csv", res.trace)
        summary.append(summarize(res, m.shape[0], m.shape[1],
                                 BalanceConfig(beta=b, alpha_floor=args.alpha0),
                                 ms))
    _write_json(out / "summary.json", summary)


def cmd_sweep_k(args):
    ks = args.ks if args.ks is not None else list(DEFAULT_KS)
    BalanceConfig(beta=args.beta, alpha_floor=args.alpha0)
    if args.n is None or args.n < 1:
        raise ValueError("--n must be at least 1")
    runs = sweep_k(args.n, ks, args.beta, args.seed, args.gen, args.alpha0,
                   args.jobs)
    out = _out_dir(args)
    summary = []
    for k, res, ms in runs:
        datagen.export_csv(out / f"trace_k_{k}.csv", res.trace)
        s = summarize(res, args.n, k,
                      BalanceConfig(beta=args.beta, alpha_floor=args.alpha0), ms)
        s["counts_min"] = int(res.counts.min())
        s["counts_max"] = int(res.counts.max())
        summary.append(s)
    _write_json(out / "summary.json", {
        "generator": args.gen,
        "note": "synthetic matrices stand in for network outputs",
        "runs": summary,
    })


def cmd_uneven(args):
    xs = args.xs if args.xs is not None else list(DEFAULT_XS)
    BalanceConfig(beta=args.beta, alpha_floor=args.alpha0)
    if args.n is None or args.k is None:
        raise ValueError("--n and --k are required")
    if args.k < 2:
        raise ValueError("--k must be at least 2")
    if any(x < 0 for x in xs):
        raise ValueError("power-law exponents must be non-negative")
    rows = uneven_run(args.n, args.k, xs, args.beta, args.seed, args.alpha0)
    out = _out_dir(args)
    summary = []
    for r in rows:
        table = [{"cluster": i, "target": float(t), "count": int(c),
                  "abs_deviation": float(d)}
                 for i, (t, c, d) in enumerate(zip(r["target"], r["counts"],
                                                   r["abs_deviation"]))]
        datagen.export_csv(out / f"uneven_x{r['x']:g}.csv", table)
        summary.append({key: r[key] for key in
                        ("x", "residual_std", "min_achievable_std",
                         "iterations", "improvements")})
    _write_json(out / "summary.json", summary)


def cmd_timing(args):
    if args.repeats < 1:
        raise ValueError("--repeats must be at least 1")
    if args.n is None or args.k is None:
        raise ValueError("--n and --k are required")
    BalanceConfig(beta=args.beta, alpha_floor=args.alpha0)
    report = timing_run(args.n, args.k, args.repeats, args.seed, args.beta,
                        args.alpha0)
    _write_json(_out_dir(args) / "timing.json", report)


def _read_labels(path):
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2,
                          dtype=np.int64)
    except ValueError as exc:
        raise ValueError(f"{path}: not a labels CSV ({exc})") from None
    return data[:, -1]


def cmd_metrics(args):
    if args.counts is not None:
        counts = args.counts
    elif args.labels:
        if args.k is None:
            raise ValueError("--labels needs --k")
        counts = histogram(_read_labels(args.labels), args.k).tolist()
    else:
        raise ValueError("give --counts or --labels")
    report = metrics(counts)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        (_out_dir(args) / "metrics.json").write_text(text + "\n")
    print(text)


def cmd_knn_eval(args):
    config = KnnConfig(neighbors=args.neighbors, sigma=args.sigma)
    if args.n < 2 or args.dim < 1:
        raise ValueError("--n must be at least 2 and --dim at least 1")
    report = knn_eval(args.n, args.dim, args.centers, args.spread, args.seed,
                      args.train_fraction, config)
    _write_json(_out_dir(args) / "knn.json", report)


def build_parser():
    p = argparse.ArgumentParser(
        prog="otl",
        description="Balance argmax cluster assignments by output translation.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, source=True, balance_opts=True):
        sp.add_argument("--out", default="otl_out", help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--n", type=int)
        sp.add_argument("--k", type=int)
        if source:
            sp.add_argument("--input", help="matrix file (OTLM format)")
        sp.add_argument("--gen", choices=("uniform", "skewed"),
                        default="uniform")
        sp.add_argument("--bias", type=float, default=10.0,
                        help="column bias for --gen skewed")
        if balance_opts:
            sp.add_argument("--beta", type=float, default=1.5)
            sp.add_argument("--alpha0", type=float, default=1e-15)
            sp.add_argument("--target", default="uniform",
                            help="uniform or powerlaw:X")

    sp = sub.add_parser("gen", help="write a synthetic matrix file")
    common(sp, source=False, balance_opts=False)
    sp.add_argument("--csv", action="store_true", help="also write CSV")
    sp.set_defaults(func=cmd_gen, input=None)

    sp = sub.add_parser("balance", help="balance one matrix")
    common(sp)
    sp.add_argument("--max-outer-iters", type=int, default=10_000,
                    help="iteration cap; exceeding it exits with code 4")
    sp.set_defaults(func=cmd_balance)

    sp = sub.add_parser("sinkhorn", help="Sinkhorn-Knopp baseline")
    common(sp, balance_opts=False)
    sp.add_argument("--max-iters", type=int, default=1000)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--temperature", type=float, default=1.0)
    sp.set_defaults(func=cmd_sinkhorn)

    sp = sub.add_parser("compare", help="OTL vs Sinkhorn-Knopp over k values")
    common(sp, source=False)
    sp.add_argument("--ks", type=_ints)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep-beta", help="one trace per decay rate")
    common(sp)
    sp.add_argument("--betas", type=_floats)
    sp.set_defaults(func=cmd_sweep_beta)

    sp = sub.add_parser("sweep-k", help="one trace per cluster count")
    common(sp, source=False)
    sp.add_argument("--ks", type=_ints)
    sp.set_defaults(func=cmd_sweep_k)

    sp = sub.add_parser("uneven", help="balance towards power-law targets")
    common(sp, source=False)
    sp.add_argument("--xs", type=_floats)
    sp.set_defaults(func=cmd_uneven)

    sp = sub.add_parser("timing", help="median balance wall time")
    common(sp, source=False)
    sp.add_argument("--repeats", type=int, default=3)
    sp.set_defaults(func=cmd_timing)

    sp = sub.add_parser("metrics", help="pair-count discriminativeness")
    sp.add_argument("--counts", type=_ints, help="histogram, e.g. 4,0,0,0")
    sp.add_argument("--labels", help="labels CSV (sample,label)")
    sp.add_argument("--k", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("knn-eval", help="weighted kNN on Gaussian blobs")
    sp.add_argument("--out", default="otl_out")
    sp.add_argument("--n", type=int, default=5000)
    sp.add_argument("--dim", type=int, default=128)
    sp.add_argument("--centers", type=int, default=5)
    sp.add_argument("--spread", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--neighbors", type=int, default=50)
    sp.add_argument("--sigma", type=float, default=0.1)
    sp.add_argument("--train-fraction", type=float, default=0.8)
    sp.set_defaults(func=cmd_knn_eval)
    return p


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="otl: %(message)s")
    logging.captureWarnings(True)
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except datagen.MatrixFormatError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except IterationCapError as exc:
        log.error("%s", exc)
        return EXIT_ITER_CAP
    except (ValueError, FloatingPointError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
