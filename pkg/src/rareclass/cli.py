"""Command-line pipeline: synth, rebalance, fit-logistic, fit-forest, evaluate, compare."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, data, forest, logistic, metrics, reports
from .errors import DegenerateLabelsError, DegenerateSampleError, InputError, RareclassError

EPILOG = """\
recipes:
  full vs downsampled logistic regression:
    rareclass fit-logistic --train train.csv --stepwise --out full.json --score test.csv --report full/
    rareclass rebalance --input train.csv --ratio 0.2 --seed 1 --output train_sample.csv
    rareclass fit-logistic --train train_sample.csv --stepwise --out sample.json --score test.csv --report sample/
    rareclass compare --probs-a full/prob.test.csv --labels-a test.csv \\
                      --probs-b sample/prob.test.csv --labels-b test.csv --threshold 0.5 --report cmp/
  evaluating the three probability sets (sampled train, full train, test):
    run `rareclass evaluate` once per probability file, each with its own --report directory.
"""


class _Outputs:
    """Tracks written files so a failing command can remove them."""

    def __init__(self):
        self.paths = []

    def __call__(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.paths.append(path)
        return path

    def cleanup(self):
        for p in self.paths:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _seed(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned integer, got {text}")
    return v


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return v


def _ratio(text):
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"ratio must lie in (0, 1], got {text}")
    return v


def _open_prevalence(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"prevalence must lie in (0, 1), got {text}")
    return v


def _mislabel(text):
    v = float(text)
    if not 0.0 <= v < 0.5:
        raise argparse.ArgumentTypeError(f"mislabel rate must lie in [0, 0.5), got {text}")
    return v


def _existing(text):
    if not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return text


def _report_dir(args, fallback):
    d = Path(args.report) if args.report else Path(fallback)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _summary(cs):
    return f"n={cs.n} positives={cs.n_pos} negatives={cs.n_neg} prevalence={cs.prevalence:.6f}"


def _read_labels(path):
    cols = reports.read_columns(path)
    if data.LABEL_COLUMN not in cols:
        raise InputError(f"{path}: no '{data.LABEL_COLUMN}' column")
    out = []
    for i, v in enumerate(cols[data.LABEL_COLUMN], start=1):
        try:
            lv = float(v)
        except ValueError:
            lv = -1.0
        if lv not in (0.0, 1.0):
            raise InputError(f"{path}: row {i}: label {v!r} is not 0 or 1")
        out.append(int(lv))
    return np.array(out, dtype=np.int8)


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_rebalance(args, out):
    ds = data.load_csv(args.input)
    print("before:", _summary(data.class_counts(ds)))
    res = data.rebalance(ds, data.RebalanceSpec(args.ratio, args.seed))
    data.write_csv(res, out(args.output))
    print("after: ", _summary(data.class_counts(res)))
    return 0


def cmd_synth(args, out):
    if args.schema == "appendix41":
        if args.p != 41:
            raise InputError("--schema appendix41 requires --p 41")
        names = data.APPENDIX_41
    else:
        names = None
    if args.coef:
        coef = tuple(float(c) for c in args.coef.split(","))
    else:
        coef = data.default_coefficients(args.p, args.signal, args.coef_seed)
    spec = data.SynthSpec(args.n, args.p, coef, args.prevalence, args.mislabel, args.seed, names)
    ds = data.synth_generate(spec)
    data.write_csv(ds, out(args.output))
    print(_summary(data.class_counts(ds)))
    return 0


def _score_logistic(model, paths, report, out):
    for p in paths:
        ds = data.load_csv(p)
        reports.write_probs(out(report / f"prob.{Path(p).stem}.csv"), logistic.predict_proba(model, ds))


def cmd_fit_logistic(args, out):
    ds = data.load_csv(args.train)
    if args.stepwise:
        model, rep, trace = logistic.stepwise_select(ds, n_jobs=args.jobs)
        for rec in trace:
            what = rec.move if rec.feature is None else f"{rec.move} {rec.feature}"
            print(f"step {rec.step:3d}  {what:<40s} AIC={rec.aic:.6f}  ({len(rec.features)} variables)")
            for mv, f, err in rec.failed:
                print(f"          skipped {mv} {f}: {err}")
    else:
        feats = () if args.intercept_only else (
            tuple(args.features.split(",")) if args.features else ds.column_names)
        model, rep = logistic.fit_irls(ds, feats)
        print(f"AIC={rep.aic:.6f}  iterations={rep.n_iterations}  converged={rep.converged}")
    if rep.separation_detected:
        print("warning: complete separation suspected (|coefficient| > 30)", file=sys.stderr)
    logistic.save_model(out(args.out), model, rep)
    if args.score:
        _score_logistic(model, args.score, _report_dir(args, Path(args.out).parent), out)
    return 0


def cmd_fit_forest(args, out):
    ds = data.load_csv(args.train)
    cfg = forest.ForestConfig(n_trees=args.trees, mtry=args.mtry, min_node_size=args.min_node_size,
                              master_seed=args.seed)
    model = forest.fit_forest(ds, cfg, n_jobs=args.jobs)
    forest.save_forest(out(args.out), model)
    report = _report_dir(args, Path(args.out).parent)
    curve = forest.oob_error_curve(model, ds)
    reports.write_rows(out(report / "oob_curve.csv"), ("trees", "oob_error"), curve)
    reports.write_svg(out(report / "oob_curve.svg"), reports.oob_chart(curve))
    print(f"trees={model.n_trees} mtry={model.config.mtry} final OOB error={curve[-1][1]:.6f}")
    if args.score:
        for p in args.score:
            sd = data.load_csv(p)
            reports.write_probs(out(report / f"prob.{Path(p).stem}.csv"), forest.predict_proba(model, sd))
        reports.write_probs(out(report / f"prob.oob.{Path(args.train).stem}.csv"), forest.oob_proba(model, ds))
    return 0


def _load_any_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "trees" in doc:
        m = forest.forest_from_dict(doc)
        return lambda ds: forest.predict_proba(m, ds)
    m = logistic.model_from_dict(doc)
    return lambda ds: logistic.predict_proba(m, ds)


def _point_doc(pt):
    if pt is None:
        return None
    c = pt.confusion
    return {"threshold": pt.threshold, "far": pt.far, "ts": pt.ts, "sensitivity": pt.sensitivity,
            "specificity": pt.specificity, "hits": c.hits, "false_alarms": c.false_alarms,
            "misses": c.misses, "correct_rejections": c.correct_rejections}


def _probs_and_labels(probs_path, labels_path, model_path=None, data_path=None):
    if model_path:
        if not data_path:
            raise InputError("--model requires --data")
        ds = data.load_csv(data_path)
        probs = _load_any_model(model_path)(ds)
        labels = ds.labels if not labels_path else _read_labels(labels_path)
    else:
        if not probs_path or not labels_path:
            raise InputError("need --probs and --labels (or --model and --data)")
        probs = reports.read_probs(probs_path)
        labels = _read_labels(labels_path)
    if probs.shape != labels.shape:
        raise InputError(f"{probs.size} probabilities but {labels.size} labels")
    keep = ~np.isnan(probs)
    if not keep.all():
        print(f"note: {int((~keep).sum())} rows with missing probabilities ignored", file=sys.stderr)
    return probs[keep], labels[keep]


def cmd_evaluate(args, out):
    probs, labels = _probs_and_labels(args.probs, args.labels, args.model, args.data)
    report = _report_dir(args, ".")
    omitted = []

    cm = metrics.confusion(probs, labels, args.threshold)
    pt = metrics.sweep_point(cm, args.threshold)
    reports.write_rows(out(report / "confusion.csv"), reports.CONFUSION_COLUMNS,
                       [(pt.threshold, cm.hits, cm.false_alarms, cm.misses, cm.correct_rejections,
                         pt.far, pt.ts, pt.sensitivity, pt.specificity)])

    sw = metrics.sweep(probs, labels, args.n_points)
    reports.write_sweep(out(report / "sweep.csv"), sw)
    reports.write_svg(out(report / "far_ts_threshold.svg"), reports.threshold_chart(sw))
    reports.write_svg(out(report / "ts_far.svg"), reports.tsfar_chart([(args.name, sw)], [(args.name, pt)]))

    auc = None
    try:
        curve = metrics.roc(probs, labels)
    except DegenerateLabelsError as exc:
        omitted += ["roc.csv", "roc.svg"]
        print(f"warning: ROC omitted: {exc}", file=sys.stderr)
    else:
        auc = curve.auc
        reports.write_roc(out(report / "roc.csv"), curve)
        reports.write_svg(out(report / "roc.svg"), reports.roc_chart([(args.name, curve)]))

    try:
        dpos, dneg = analysis.class_densities(probs, labels)
    except DegenerateSampleError as exc:
        omitted += ["densities.csv", "density.svg"]
        print(f"warning: densities omitted: {exc}", file=sys.stderr)
    else:
        reports.write_densities(out(report / "densities.csv"), dpos, dneg)
        reports.write_svg(out(report / "density.svg"), reports.density_chart(dpos, dneg))

    reports.write_histograms(out(report / "histograms.csv"), analysis.histogram_triptych(probs, labels))

    best = metrics.best_operating_point(sw, args.max_far)
    _write_json(out(report / "summary.json"), {
        "n": int(labels.size),
        "n_pos": int(labels.sum()),
        "auc": auc,
        "at_threshold": _point_doc(pt),
        "max_far": args.max_far,
        "best_operating_point": _point_doc(best),
        "omitted": omitted,
    })
    far_s = "NA" if pt.far is None else f"{pt.far:.4f}"
    ts_s = "NA" if pt.ts is None else f"{pt.ts:.4f}"
    auc_s = "NA" if auc is None else f"{auc:.6f}"
    print(f"tau={args.threshold} hits={cm.hits} false_alarms={cm.false_alarms} misses={cm.misses} "
          f"correct_rejections={cm.correct_rejections} FAR={far_s} TS={ts_s} AUC={auc_s}")
    return 0


def cmd_compare(args, out):
    pa, la = _probs_and_labels(args.probs_a, args.labels_a)
    pb, lb = _probs_and_labels(args.probs_b, args.labels_b)
    report = _report_dir(args, ".")
    sa = metrics.sweep(pa, la, args.n_points)
    sb = metrics.sweep(pb, lb, args.n_points)
    table = analysis.tsfar_compare(sa, sb, args.threshold)
    for w in table.warnings:
        print("warning:", w, file=sys.stderr)
    reports.write_compare(out(report / "compare.csv"), table)
    chart = reports.tsfar_chart([(args.name_a, sa), (args.name_b, sb)],
                                [(args.name_a, table.mark_a), (args.name_b, table.mark_b)],
                                title="FAR as a function of TS: model comparison")
    reports.write_svg(out(report / "compare.svg"), chart)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="rareclass", description=__doc__, epilog=EPILOG,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rebalance", help="keep all positives, downsample negatives")
    p.add_argument("--input", required=True, type=_existing)
    p.add_argument("--ratio", required=True, type=_ratio, help="target #positive / #negative")
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_rebalance)

    p = sub.add_parser("synth", help="write a synthetic dataset in the train.csv layout")
    p.add_argument("--n", required=True, type=_positive_int)
    p.add_argument("--p", required=True, type=_positive_int)
    p.add_argument("--prevalence", required=True, type=_open_prevalence)
    p.add_argument("--mislabel", type=_mislabel, default=0.0)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--output", required=True)
    p.add_argument("--schema", choices=("generic", "appendix41"), default="generic")
    p.add_argument("--signal", type=float, default=3.0, help="norm of the default coefficient vector")
    p.add_argument("--coef-seed", type=_seed, default=0, help="seed of the default coefficient direction")
    p.add_argument("--coef", help="explicit comma-separated coefficients (overrides --signal)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit-logistic", help="maximum-likelihood logistic regression")
    p.add_argument("--train", required=True, type=_existing)
    p.add_argument("--stepwise", action="store_true", help="bidirectional AIC selection from the full model")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--features", help="comma-separated subset (default: all columns)")
    g.add_argument("--intercept-only", action="store_true")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--score", nargs="+", type=_existing, help="datasets to write prob.<name>.csv for")
    p.add_argument("--report", help="directory for probability files (default: next to --out)")
    p.add_argument("--seed", type=_seed, default=0, help="accepted for uniformity; fitting is deterministic")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_fit_logistic)

    p = sub.add_parser("fit-forest", help="random forest with out-of-bag error curve")
    p.add_argument("--train", required=True, type=_existing)
    p.add_argument("--trees", type=_positive_int, default=500)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--mtry", type=_positive_int)
    p.add_argument("--min-node-size", type=_positive_int, default=1)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--score", nargs="+", type=_existing,
                   help="datasets to write prob.<name>.csv for; also writes OOB probabilities of --train")
    p.add_argument("--report", help="directory for oob_curve.* and probability files (default: next to --out)")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_fit_forest)

    p = sub.add_parser("evaluate", help="confusion, FAR/TS sweep, ROC, densities, histograms")
    p.add_argument("--probs", type=_existing, help="CSV with a 'prob' column")
    p.add_argument("--labels", type=_existing, help="CSV with a 'cv' column, row-aligned with --probs")
    p.add_argument("--model", type=_existing, help="logistic or forest model JSON (with --data)")
    p.add_argument("--data", type=_existing)
    p.add_argument("--threshold", type=_unit_interval, default=0.5)
    p.add_argument("--n-points", type=int, default=500)
    p.add_argument("--max-far", type=_unit_interval, default=0.3)
    p.add_argument("--name", default="model")
    p.add_argument("--report", required=True)
    p.add_argument("--seed", type=_seed, default=0, help="accepted for uniformity; unused")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="overlay TS-vs-FAR curves of two models")
    p.add_argument("--probs-a", required=True, type=_existing)
    p.add_argument("--labels-a", required=True, type=_existing)
    p.add_argument("--probs-b", required=True, type=_existing)
    p.add_argument("--labels-b", required=True, type=_existing)
    p.add_argument("--threshold", type=_unit_interval, default=0.5)
    p.add_argument("--n-points", type=int, default=500)
    p.add_argument("--name-a", default="model A")
    p.add_argument("--name-b", default="model B")
    p.add_argument("--report", required=True)
    p.add_argument("--seed", type=_seed, default=0, help="accepted for uniformity; unused")
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_points", 2) < 2:
        parser.error("--n-points must be >= 2")
    out = _Outputs()
    try:
        return args.func(args, out)
    except (RareclassError, OSError, ValueError) as exc:
        out.cleanup()
        print(f"rareclass {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except BaseException:
        out.cleanup()
        raise


if __name__ == "__main__":
    sys.exit(main())
