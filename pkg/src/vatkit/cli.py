"""Command-line entry point: ``vatkit <subcommand> ...``.

``run`` executes the whole pipeline; the other subcommands wrap one stage
each with file inputs and outputs so that intermediate artifacts can be
inspected. With equal seeds, chaining ``reduce``, ``sample``, ``dissim``,
``ivat`` and ``render`` reproduces ``run`` byte for byte.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import data_io
from .data_io import EmbeddingSet, MixtureSpec
from .dissimilarity import load_dissimilarity
from .errors import VatkitError
from .evaluation import nmi, partition_accuracy
from .pipeline import (PRESETS, dissimilarity_stage, load_config, partition_stage,
                       reduce_stage, run_pipeline, sample_stage)
from .render import render_rdi
from .vat import estimate_k, ivat_transform, reorder, vat_reorder

log = logging.getLogger("vatkit")

# run flag -> config key; every one defaults to None so unset flags don't override the config
RUN_FLAGS = {
    "--input": "input", "--format": "format", "--labels": "labels", "--metric": "metric",
    "--reduce": "reduce", "--perplexity": "perplexity", "--tsne-iterations": "tsne-iterations",
    "--target-dim": "target-dim", "--spectral-r": "spectral-r", "--spectral-gamma": "spectral-gamma",
    "--sample": "sample", "--kprime": "kprime", "--sample-n": "sample-n", "--mmrs-start": "mmrs-start",
    "--order": "order", "--kernel-gamma": "kernel-gamma", "--transform": "transform", "--kp": "kp",
    "--kmax": "kmax", "--seed": "seed", "--out-image": "out-image", "--out-labels": "out-labels",
    "--out-report": "out-report", "--out-sample": "out-sample", "--image-scale": "image-scale",
}


def _load(args) -> EmbeddingSet:
    return data_io.load_embeddings(args.input, args.format, getattr(args, "labels", None))


def cmd_run(args) -> int:
    overrides = {key: getattr(args, key.replace("-", "_")) for key in RUN_FLAGS.values()}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    cfg = load_config(args.preset, args.config, overrides)
    report = run_pipeline(cfg)
    sys.stdout.write(report.to_text())
    return 0


def cmd_generate(args) -> int:
    spec = MixtureSpec(args.k, args.dims, args.n_per, args.separation, args.seed)
    ds = data_io.generate_gaussian_mixture(spec)
    data_io.save_embeddings(args.out, ds, args.format)
    if args.out_labels:
        data_io.save_labels(args.out_labels, ds.labels)
    return 0


def cmd_reduce(args) -> int:
    X = _load(args)
    Y = reduce_stage(X, args.method, args.seed, args.metric, args.perplexity, args.tsne_iterations,
                     args.target_dim, args.spectral_r, args.spectral_gamma)
    data_io.save_embeddings(args.out, Y)
    return 0


def cmd_sample(args) -> int:
    X = _load(args)
    idx = sample_stage(X, args.kprime, args.n, args.seed, args.metric, args.mmrs_start)
    sub = X.subset(idx)
    data_io.save_embeddings(args.out, sub)
    if args.out_indices:
        data_io.save_labels(args.out_indices, idx)
    if args.out_labels and sub.labels is not None:
        data_io.save_labels(args.out_labels, sub.labels)
    return 0


def cmd_dissim(args) -> int:
    D = dissimilarity_stage(_load(args), args.metric, args.kernel_gamma)
    data_io.write_dvm(args.out, D.values)
    return 0


def cmd_vat(args) -> int:
    D = load_dissimilarity(args.input)
    ordering = vat_reorder(D)
    data_io.write_dvm(args.out, reorder(D, ordering).values)
    if args.out_order:
        data_io.save_labels(args.out_order, ordering.order)
    return 0


def cmd_ivat(args) -> int:
    D = load_dissimilarity(args.input)
    data_io.write_dvm(args.out, ivat_transform(D, vat_reorder(D)).values)
    return 0


def cmd_estimate(args) -> int:
    ordering = vat_reorder(load_dissimilarity(args.input))
    kp = 1 if ordering.n < 2 else estimate_k(ordering, min(args.kmax, ordering.n))
    print(f"kp={kp}")
    return 0


def cmd_cluster(args) -> int:
    ordering = vat_reorder(load_dissimilarity(args.input))
    kp = None if args.kp == "auto" else int(args.kp)
    est = partition_stage(ordering, kp, args.kmax)
    data_io.save_labels(args.out, est.labels)
    print(f"kp={est.k_p}")
    return 0


def cmd_eval(args) -> int:
    pred = data_io.load_labels(args.pred)
    truth = data_io.load_labels(args.truth)
    print(f"pa={partition_accuracy(pred, truth)!r} nmi={nmi(pred, truth)!r}")
    return 0


def cmd_render(args) -> int:
    render_rdi(data_io.read_dvm(args.input), args.out, args.scale)
    return 0


def _optional_float(text: str):
    return None if text.lower() == "none" else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vatkit", description="VAT/iVAT cluster-tendency assessment")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--preset", choices=sorted(PRESETS))
    for flag in RUN_FLAGS:
        run.add_argument(flag, default=None)
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="write a synthetic Gaussian mixture")
    gen.add_argument("--k", type=int, default=3)
    gen.add_argument("--dims", type=int, default=100)
    gen.add_argument("--n-per", type=int, default=334)
    gen.add_argument("--separation", type=float, default=20.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=["csv", "dvm"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--out-labels")
    gen.set_defaults(func=cmd_generate)

    def embedding_input(p):
        p.add_argument("--in", "--input", dest="input", required=True)
        p.add_argument("--format", choices=["csv", "dvm"])

    red = sub.add_parser("reduce", help="dimensionality reduction")
    embedding_input(red)
    red.add_argument("--method", choices=["none", "tsne", "random_projection", "spectral"], default="tsne")
    red.add_argument("--metric", choices=["euclidean", "cosine"], default="euclidean")
    red.add_argument("--perplexity", type=float, default=30.0)
    red.add_argument("--tsne-iterations", type=int, default=1000)
    red.add_argument("--target-dim", type=int, default=100)
    red.add_argument("--spectral-r", type=int, default=2)
    red.add_argument("--spectral-gamma", type=_optional_float, default=None)
    red.add_argument("--seed", type=int, default=0, help="master seed")
    red.add_argument("--out", required=True)
    red.set_defaults(func=cmd_reduce)

    smp = sub.add_parser("sample", help="maximin-and-random sampling")
    embedding_input(smp)
    smp.add_argument("--labels")
    smp.add_argument("--kprime", type=int, default=15)
    smp.add_argument("--n", type=int, default=4000)
    smp.add_argument("--metric", choices=["euclidean", "cosine"], default="euclidean")
    smp.add_argument("--mmrs-start", choices=["rowsum", "random"], default="rowsum")
    smp.add_argument("--seed", type=int, default=0, help="master seed")
    smp.add_argument("--out", required=True)
    smp.add_argument("--out-indices")
    smp.add_argument("--out-labels")
    smp.set_defaults(func=cmd_sample)

    dis = sub.add_parser("dissim", help="pairwise dissimilarity matrix")
    embedding_input(dis)
    dis.add_argument("--metric", choices=["euclidean", "cosine"], default="euclidean")
    dis.add_argument("--kernel-gamma", type=_optional_float, default=None)
    dis.add_argument("--out", required=True)
    dis.set_defaults(func=cmd_dissim)

    for name, func, text in (("vat", cmd_vat, "VAT-reordered matrix"), ("ivat", cmd_ivat, "iVAT matrix")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--in", "--input", dest="input", required=True)
        p.add_argument("--out", required=True)
        if name == "vat":
            p.add_argument("--out-order")
        p.set_defaults(func=func)

    est = sub.add_parser("estimate", help="estimate the cluster count")
    est.add_argument("--in", "--input", dest="input", required=True)
    est.add_argument("--kmax", type=int, default=15)
    est.set_defaults(func=cmd_estimate)

    clu = sub.add_parser("cluster", help="MST-cut partition")
    clu.add_argument("--in", "--input", dest="input", required=True)
    clu.add_argument("--kp", default="auto")
    clu.add_argument("--kmax", type=int, default=15)
    clu.add_argument("--out", required=True)
    clu.set_defaults(func=cmd_cluster)

    ev = sub.add_parser("eval", help="partition accuracy and NMI")
    ev.add_argument("--pred", required=True)
    ev.add_argument("--truth", required=True)
    ev.set_defaults(func=cmd_eval)

    ren = sub.add_parser("render", help="write a matrix as a P5 graymap")
    ren.add_argument("--in", "--input", dest="input", required=True)
    ren.add_argument("--out", required=True)
    ren.add_argument("--scale", type=int, default=1)
    ren.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (VatkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
