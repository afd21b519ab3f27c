"""Command line: train, score, eval, sweep, synth, verify-bounds.

Every command writes plot-ready CSV with a ``#`` metadata header and
prints a short summary.  Exit codes: 0 success, 2 usage error, 3 data
error, 4 numeric failure.  With ``--no-timestamp`` all outputs are
byte-deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .data import fmt_value, load_csv, write_table
from .errors import DataError, NumericError, UsageError
from .estimator import (fit, kpca_lambda_from_rank, member_mask,
                        regularization_path, score_batch)
from .evaluation import hausdorff, parzen_score, roc_auc, symdiff_measure
from .filters import (KpcaTruncation, Landweber, SpectralCutoff, Tikhonov,
                      decompose, format_filter, parse_filter)
from .kernels import (SEPARATES_ALL, Abel, Gaussian, L1Exponential, Linear,
                      format_kernel, gram, normalize, parse_kernel)
from .model_io import load_model, save_model
from .oracles import bernstein_trials, concentration_trials, effective_dimension
from .selection import lambda_curvature, rate_lambda, width_heuristic
from .synth import get_task, reference_grid, reference_support, sample, task_names

_NAMED_KERNELS = {"abel": Abel, "l1exp": L1Exponential, "gaussian": Gaussian}


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def _say(msg):
    print(msg)


def _f(v):
    return fmt_value(v)


# ---------------------------------------------------------------------------
# Shared resolution of data, kernel and filter flags.


def _train_points(args):
    if (args.data is None) == (args.task is None):
        raise UsageError("provide exactly one of --data or --task")
    if args.data is not None:
        ds = load_csv(args.data, header=args.header)
        return ds.points, f"data={args.data}"
    task = get_task(args.task)
    pts = sample(task, args.n, args.seed)
    return pts, f"task={args.task} n={args.n} seed={args.seed}"


def _resolve_sigma(spec, points):
    spec = spec.strip()
    if spec == "auto" or spec.startswith("auto:"):
        k = 10
        if spec.startswith("auto:"):
            try:
                k = int(spec[len("auto:"):])
            except ValueError:
                raise UsageError(f"bad --sigma {spec!r}; expected auto:<k>") from None
        return width_heuristic(points, k), f"auto:k={k}"
    try:
        return float(spec), "fixed"
    except ValueError:
        raise UsageError(f"bad --sigma {spec!r}") from None


def _resolve_kernel(args, points, warn=True):
    text = args.kernel.strip()
    if any(ch in text for ch in " =("):
        kernel, note = parse_kernel(text), "from spec"
    elif text == "linear":
        kernel, note = Linear(), ""
    elif text in _NAMED_KERNELS:
        sigma, note = _resolve_sigma(args.sigma, points)
        kernel = _NAMED_KERNELS[text](sigma)
    else:
        raise UsageError(
            f"unknown kernel {text!r}; use one of abel, l1exp, gaussian, linear "
            "or a full kernel spec")
    if not kernel.unit_diagonal:
        kernel = normalize(kernel)
        if warn:
            _warn("kernel is not unit-diagonal, normalizing it")
    if warn and kernel.separating != SEPARATES_ALL:
        _warn(f"kernel is not completely separating (status: {kernel.separating}); "
              "the score may stay high away from the support")
    return kernel, note


def _resolve_lam(spec, n, decomposition):
    spec = spec.strip()
    if spec == "auto":
        return lambda_curvature(decomposition.eigenvalues), "auto (spectral curvature)"
    if spec.startswith("rate:"):
        parts = spec[len("rate:"):].split(",")
        try:
            s, b = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"bad --lambda {spec!r}; expected rate:s,b") from None
        return rate_lambda(n, s, b), f"rate s={_f(s)} b={_f(b)}"
    try:
        return float(spec), "fixed"
    except ValueError:
        raise UsageError(f"bad --lambda {spec!r}") from None


def _resolve_filter(args, n, decomposition):
    text = args.filter.strip()
    if any(ch in text for ch in " ="):
        filt, note = parse_filter(text), "from spec"
        if isinstance(filt, KpcaTruncation) and filt.lam is None:
            filt = KpcaTruncation(lam=kpca_lambda_from_rank(decomposition, filt.components))
            note = "from spec, components resolved"
        return filt, note
    if text == "tikhonov":
        lam, note = _resolve_lam(args.lam, n, decomposition)
        return Tikhonov(lam), note
    if text == "cutoff":
        lam, note = _resolve_lam(args.lam, n, decomposition)
        return SpectralCutoff(lam), note
    if text == "landweber":
        if args.m is None:
            raise UsageError("--filter landweber needs --m")
        return Landweber(args.m), f"m={args.m}"
    if text == "kpca":
        if args.components is not None:
            lam = kpca_lambda_from_rank(decomposition, args.components)
            return KpcaTruncation(lam=lam), f"components={args.components}"
        lam, note = _resolve_lam(args.lam, n, decomposition)
        return KpcaTruncation(lam=lam), note
    raise UsageError(
        f"unknown filter {text!r}; use one of tikhonov, cutoff, landweber, kpca "
        "or a full filter spec")


def _build_model(points, args, warn=True):
    """Resolve kernel and filter against the sample, fit, keep one eigh."""
    kernel, kernel_note = _resolve_kernel(args, points, warn=warn)
    G = gram(kernel, points)
    D = decompose(G)
    filt, filter_note = _resolve_filter(args, points.shape[0], D)
    algorithm = None if args.algorithm == "auto" else args.algorithm
    model = fit(points, kernel, filt, algorithm=algorithm, tau=args.tau)
    object.__setattr__(model, "_decomposition", D)
    return model, kernel_note, filter_note


def _config_meta(model, kernel_note, filter_note):
    meta = [
        format_kernel(model.kernel) + (f" ({kernel_note})" if kernel_note else ""),
        format_filter(model.filter) + (f" ({filter_note})" if filter_note else ""),
        f"algorithm={model.algorithm}",
        f"tau={_f(model.tau)}",
        f"n={model.n}",
        f"d={model.dim}",
    ]
    return meta


def _summary(model, kernel_note, filter_note):
    D = model.decomposition()
    top = ", ".join(_f(v) for v in D.eigenvalues[:5])
    positive = int(np.count_nonzero(D.eigenvalues > 1e-12))
    _say(f"n={model.n} d={model.dim}")
    note = f" ({kernel_note})" if kernel_note else ""
    _say(f"{format_kernel(model.kernel)}{note}")
    note = f" ({filter_note})" if filter_note else ""
    _say(f"{format_filter(model.filter)}{note}")
    _say(f"algorithm={model.algorithm} tau={_f(model.tau)}")
    _say(f"eigenvalues: top=[{top}] positive={positive}")
    lam = getattr(model.filter, "lam", None)
    if lam is not None:
        _say(f"effective_dimension(lambda)={_f(effective_dimension(D, lam))}")


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_train(args):
    points, source = _train_points(args)
    model, kernel_note, filter_note = _build_model(points, args)
    save_model(model, args.out, fmt=args.model_format,
               include_decomposition=args.store_decomposition)
    D = model.decomposition()
    eigs_out = args.eigs_out or (args.out + ".eigs.csv")
    write_table(
        eigs_out, "eigenvalue decay", [source] + _config_meta(model, kernel_note, filter_note),
        ["index", "eigenvalue"],
        ((i, v) for i, v in enumerate(D.eigenvalues)),
        timestamp=not args.no_timestamp)
    _summary(model, kernel_note, filter_note)
    _say(f"model written to {args.out}")
    _say(f"eigenvalue decay written to {eigs_out}")
    return 0


def cmd_score(args):
    model = load_model(args.model)
    ds = load_csv(args.data, header=args.header)
    scores = score_batch(model, ds.points)
    tau = model.tau if args.tau is None else args.tau
    member = member_mask(scores, tau)
    write_table(
        args.out, "scores",
        [f"model={args.model}", f"data={args.data}",
         format_kernel(model.kernel), format_filter(model.filter),
         f"tau={_f(tau)}", f"n_train={model.n}", f"n_test={ds.n}"],
        ["index", "score", "member"],
        ((i, s, m) for i, (s, m) in enumerate(zip(scores, member))),
        timestamp=not args.no_timestamp)
    _say(f"scored {ds.n} points; members={int(member.sum())} at tau={_f(tau)}")
    _say(f"scores written to {args.out}")
    return 0


def _uniform_box(task, n, rng):
    cols = [rng.uniform(lo, hi, n) for lo, hi in task.bounding_box]
    return np.column_stack(cols)


def cmd_eval(args):
    if (args.model is not None) == (args.task is not None):
        raise UsageError("provide exactly one of --model (labeled data) or --task (trials)")
    if args.model is not None:
        return _eval_labeled(args)
    return _eval_task(args)


def _eval_labeled(args):
    if args.data is None:
        raise UsageError("--model evaluation needs --data")
    if args.label_col is None:
        raise UsageError("AUC needs labels: pass --label-col")
    model = load_model(args.model)
    ds = load_csv(args.data, header=args.header, label_col=args.label_col)
    scores = score_batch(model, ds.points)
    roc, auc = roc_auc(scores, ds.labels)
    h = getattr(model.kernel, "sigma", None)
    auc_parzen = np.nan
    if h is not None:
        _, auc_parzen = roc_auc(parzen_score(model.points, h, ds.points), ds.labels)
    write_table(
        args.out, "evaluation",
        [f"model={args.model}", f"data={args.data}",
         format_kernel(model.kernel), format_filter(model.filter),
         f"positives={int(ds.labels.sum())}", f"negatives={int((~ds.labels).sum())}"],
        ["trial", "auc_spectral", "auc_parzen"],
        [(0, auc, auc_parzen)],
        timestamp=not args.no_timestamp)
    if args.roc_out:
        write_table(args.roc_out, "roc curve",
                    [f"model={args.model}", f"data={args.data}", f"auc={_f(auc)}"],
                    ["fpr", "tpr"], ((p[0], p[1]) for p in roc),
                    timestamp=not args.no_timestamp)
        _say(f"roc points written to {args.roc_out}")
    _say(f"auc_spectral={_f(auc)}" +
         ("" if h is None else f" auc_parzen={_f(auc_parzen)}"))
    _say(f"evaluation written to {args.out}")
    return 0


def _eval_task(args):
    if args.trials < 1:
        raise UsageError(f"need at least one trial, got {args.trials!r}")
    task = get_task(args.task)
    n_test = args.n_test or args.n
    grid_points, grid_inside, cell_volume = reference_grid(task, args.resolution)
    support = reference_support(task, 2000)
    columns = ["trial", "auc_spectral", "auc_parzen", "hausdorff", "symdiff"]
    rows = []
    for t in range(args.trials):
        train = task.draw(args.n, np.random.default_rng([args.seed, t, 0]))
        model, kernel_note, filter_note = _build_model(train, args, warn=(t == 0))
        pos = task.draw(n_test, np.random.default_rng([args.seed, t, 1]))
        neg = _uniform_box(task, n_test, np.random.default_rng([args.seed, t, 2]))
        X = np.vstack([pos, neg])
        labels = np.r_[np.ones(len(pos), dtype=bool), np.zeros(len(neg), dtype=bool)]
        _, auc = roc_auc(score_batch(model, X), labels)
        h = getattr(model.kernel, "sigma", None)
        auc_parzen = np.nan
        if h is not None:
            _, auc_parzen = roc_auc(parzen_score(train, h, X), labels)
        member = member_mask(score_batch(model, grid_points), model.tau)
        dmu = symdiff_measure(member, grid_inside, cell_volume)
        if member.any():
            dh = hausdorff(grid_points[member], support)
        else:
            dh = np.nan
        rows.append((t, auc, auc_parzen, dh, dmu))
    body = np.asarray([r[1:] for r in rows], dtype=float)
    summary = [("mean", *body.mean(axis=0))]
    if len(rows) >= 2:
        summary.append(("std", *body.std(axis=0, ddof=1)))
    meta = [f"task={args.task}", f"n={args.n}", f"n_test={n_test}",
            f"trials={args.trials}", f"seed={args.seed}",
            f"resolution={args.resolution}", f"cell_volume={_f(cell_volume)}",
            f"kernel={args.kernel}", f"sigma={args.sigma}",
            f"filter={args.filter}", f"lambda={args.lam}", f"tau={_f(args.tau)}"]
    write_table(args.out, "task evaluation", meta, columns, rows + summary,
                timestamp=not args.no_timestamp)
    for label, *vals in summary:
        _say(label + ": " + " ".join(
            f"{c}={_f(v)}" for c, v in zip(columns[1:], vals)))
    _say(f"evaluation written to {args.out}")
    return 0


def _parse_grid(text, what, integer=False):
    items = [t for t in text.split(",") if t.strip() != ""]
    if not items:
        raise UsageError(f"{what} must be a nonempty comma-separated list")
    try:
        return [int(t) if integer else float(t) for t in items]
    except ValueError:
        raise UsageError(f"bad value in {what}: {text!r}") from None


def cmd_sweep(args):
    points, source = _train_points(args)
    model, kernel_note, filter_note = _build_model(points, args)
    integer_grid = isinstance(model.filter, Landweber)
    lambdas = _parse_grid(args.lambdas, "--lambdas", integer=integer_grid)
    taus = _parse_grid(args.taus, "--taus")
    for tau in taus:
        if not 0.0 <= tau < 1.0:
            raise UsageError(f"tau values must lie in [0, 1), got {tau!r}")
    if args.test is not None:
        test = load_csv(args.test, header=args.header).points
        test_note = f"test={args.test}"
    else:
        test = model.points
        test_note = "test=training points"
    path = regularization_path(model, test, lambdas)

    def rows():
        for i, lam in enumerate(lambdas):
            for tau in taus:
                members = member_mask(path[i], tau)
                for j in range(path.shape[1]):
                    yield (lam, tau, j, path[i, j], members[j])

    meta = [source, test_note,
            format_kernel(model.kernel) + (f" ({kernel_note})" if kernel_note else ""),
            f"filter_family={type(model.filter).__name__}",
            f"lambdas={len(lambdas)}", f"taus={len(taus)}", f"points={path.shape[1]}"]
    write_table(args.out, "regularization sweep", meta,
                ["lambda", "tau", "index", "score", "member"], rows(),
                timestamp=not args.no_timestamp)
    _say(f"sweep over {len(lambdas)} lambdas x {len(taus)} taus x {path.shape[1]} points")
    _say(f"sweep written to {args.out}")
    return 0


def cmd_synth(args):
    task = get_task(args.task)
    pts = sample(task, args.n, args.seed)
    cols = [f"x{i}" for i in range(task.dim)]
    write_table(args.out, "synthetic sample",
                [f"task={args.task}", f"n={args.n}", f"seed={args.seed}"],
                cols, (tuple(row) for row in pts),
                timestamp=not args.no_timestamp)
    _say(f"{args.n} points from task {args.task} written to {args.out}")
    if args.grid_out:
        points, inside, cell_volume = reference_grid(task, args.resolution)
        write_table(args.grid_out, "reference grid",
                    [f"task={args.task}", f"resolution={args.resolution}",
                     f"cell_volume={_f(cell_volume)}",
                     f"thickened={int(task.lower_dimensional)}"],
                    cols + ["inside"],
                    (tuple(row) + (bool(flag),) for row, flag in zip(points, inside)),
                    timestamp=not args.no_timestamp)
        _say(f"reference grid written to {args.grid_out}")
    return 0


def cmd_verify_bounds(args):
    if args.trials < 1:
        raise UsageError(f"need at least one trial, got {args.trials!r}")
    if args.harness == "concentration":
        task = get_task(args.task)
        if args.sigma.strip().startswith("auto"):
            raise UsageError("verify-bounds needs a fixed --sigma (no training set to adapt to)")
        kernel, _ = _resolve_kernel(args, points=None)
        observed, bound = concentration_trials(
            task.draw, kernel, args.n, args.delta, args.trials,
            args.ref_size, args.seed)
        meta = [f"harness=concentration", f"task={args.task}",
                format_kernel(kernel), f"ref_size={args.ref_size}",
                f"reference stands in for the true operator; its own deviation "
                f"is bounded by {_f(2.0 * max(args.delta, np.sqrt(2 * args.delta)) / np.sqrt(args.ref_size))} at the same confidence"]
    else:
        observed, bound = bernstein_trials(args.n, args.delta, args.trials, args.seed)
        meta = [f"harness=bernstein", "sample=coin flips in {-1,+1}, M=1, variance=1"]
    violated = observed > bound
    fraction = float(violated.mean())
    write_table(
        args.out, "bound verification",
        meta + [f"trials={args.trials}", f"seed={args.seed}"],
        ["trial", "n", "delta", "observed", "bound", "violated"],
        ((t, args.n, args.delta, observed[t], bound, bool(violated[t]))
         for t in range(args.trials)),
        timestamp=not args.no_timestamp,
        footer=[f"violation_fraction={_f(fraction)}",
                f"tolerated_fraction={_f(2.0 * np.exp(-args.delta))}"])
    _say(f"{args.harness}: violation fraction {_f(fraction)} "
         f"(tolerated {_f(2.0 * np.exp(-args.delta))}) over {args.trials} trials")
    _say(f"table written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser.


def _add_config_flags(sp, with_data=True):
    if with_data:
        sp.add_argument("--data", help="CSV of training points")
        sp.add_argument("--header", action="store_true",
                        help="skip the first row of CSV inputs")
        sp.add_argument("--task", help="synthetic task: " + ", ".join(task_names()))
        sp.add_argument("--n", type=int, default=200, help="sample size for --task")
    sp.add_argument("--kernel", default="abel",
                    help="abel | l1exp | gaussian | linear, or a full kernel spec")
    sp.add_argument("--sigma", default="auto",
                    help="kernel width: a number, auto, or auto:<k>")
    sp.add_argument("--filter", default="tikhonov",
                    help="tikhonov | cutoff | landweber | kpca, or a full filter spec")
    sp.add_argument("--lambda", dest="lam", default="auto",
                    help="regularization: a number, auto, or rate:s,b")
    sp.add_argument("--m", type=int, help="landweber iteration count")
    sp.add_argument("--components", type=int, help="kpca component count")
    sp.add_argument("--tau", type=float, default=0.0,
                    help="membership margin in [0, 1)")
    sp.add_argument("--algorithm", default="auto",
                    choices=["auto", "spectral", "cholesky", "landweber"])


def _add_out_flags(sp):
    sp.add_argument("--out", required=True, help="output path")
    sp.add_argument("--no-timestamp", action="store_true",
                    help="omit the generated= line for byte-reproducible output")


def build_parser():
    p = argparse.ArgumentParser(
        prog="setlearn",
        description="Support estimation with separating kernels and spectral filters")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("train", help="fit a support model and persist it")
    _add_config_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    _add_out_flags(sp)
    sp.add_argument("--eigs-out", help="eigenvalue decay CSV (default: <out>.eigs.csv)")
    sp.add_argument("--model-format", choices=["text", "binary"], default="text")
    sp.add_argument("--store-decomposition", action="store_true",
                    help="persist the eigendecomposition inside the model file")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("score", help="score a test set with a saved model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True, help="CSV of test points")
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--tau", type=float, default=None,
                    help="override the model's membership margin")
    _add_out_flags(sp)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("eval", help="AUC and set metrics, labeled data or task trials")
    sp.add_argument("--model", help="saved model (labeled-data mode)")
    sp.add_argument("--label-col", type=int,
                    help="label column index in --data (nonzero = positive)")
    sp.add_argument("--roc-out", help="write ROC points CSV (labeled-data mode)")
    _add_config_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=10, help="trials in task mode")
    sp.add_argument("--n-test", type=int, help="test points per class (default --n)")
    sp.add_argument("--resolution", type=int, default=64, help="grid points per axis")
    _add_out_flags(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sweep", help="score a grid of (lambda, tau) from one decomposition")
    _add_config_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lambdas", required=True,
                    help="comma-separated lambda grid (iteration counts for landweber)")
    sp.add_argument("--taus", default="0", help="comma-separated tau grid")
    sp.add_argument("--test", help="CSV of points to score (default: the training set)")
    _add_out_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("synth", help="write a synthetic sample (and reference grid)")
    sp.add_argument("--task", required=True)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    _add_out_flags(sp)
    sp.add_argument("--grid-out", help="also write the reference grid CSV")
    sp.add_argument("--resolution", type=int, default=64)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("verify-bounds", help="Monte-Carlo check of the error bounds")
    sp.add_argument("--harness", choices=["concentration", "bernstein"],
                    default="concentration")
    sp.add_argument("--task", default="circle", help="sampler for the concentration harness")
    sp.add_argument("--kernel", default="abel")
    sp.add_argument("--sigma", default="1")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--delta", type=float, default=2.0)
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--ref-size", type=int, default=20000)
    sp.add_argument("--seed", type=int, default=0)
    _add_out_flags(sp)
    sp.set_defaults(func=cmd_verify_bounds)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
