"""End-to-end cluster-tendency pipeline.

Stage order: load -> [reduce] -> [sample] -> dissimilarity -> [kernel] ->
vat -> [ivat] -> estimate/partition -> [evaluate] -> render. Reduction and
sampling may be swapped with ``order=sample_then_reduce``.

Configuration is a flat ``key=value`` mapping. Values are layered as
built-in defaults < preset < config file < command-line flags. Each random
stage draws from its own seed derived from the master seed (see
:func:`vatkit.rng.derive_seed`), so toggling one stage never changes the
randomness of another.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import data_io
from .data_io import EmbeddingSet
from .dissimilarity import METRICS, pairwise_dissimilarity, rbf_kernel_transform
from .errors import PipelineError, VatkitError
from .evaluation import nmi, partition_accuracy
from .reduce import SpectralConfig, TsneConfig, random_project, spectral_embed, tsne
from .render import render_rdi
from .rng import STAGE_REDUCE, STAGE_SAMPLE, derive_seed
from .sampling import mmrs_sample
from .vat import ReorderedMatrix, VatOrdering, estimate_k, ivat_transform, mst_cut_partition, reorder, vat_reorder

log = logging.getLogger(__name__)

REDUCERS = ("none", "tsne", "random_projection", "spectral")
SAMPLERS = ("none", "mmrs")
ORDERS = ("reduce_then_sample", "sample_then_reduce")
TRANSFORMS = ("vat", "ivat")

_DEEPVAT = {
    "reduce": "tsne", "sample": "mmrs", "kprime": "15", "sample-n": "4000",
    "metric": "cosine", "transform": "ivat", "kernel-gamma": "none",
    "order": "reduce_then_sample",
}

PRESETS: dict[str, dict[str, str]] = {
    "plain": {},
    "deepvat": dict(_DEEPVAT),
    "deepvat-minus-tsne": {**_DEEPVAT, "reduce": "none"},
    "deepvat-minus-mmrs": {**_DEEPVAT, "sample": "none"},
    # same stages as deepvat; point --input at raw (flattened) features
    "deepvat-minus-simclr": dict(_DEEPVAT),
    "deepvat-minus-simclr-minus-tsne": {**_DEEPVAT, "reduce": "none"},
    "fensivat": {**_DEEPVAT, "reduce": "random_projection", "target-dim": "100"},
    "kernelvat": {**_DEEPVAT, "reduce": "none", "kernel-gamma": "0.05"},
    "specvat": {**_DEEPVAT, "reduce": "spectral", "spectral-r": "1-10",
                "order": "sample_then_reduce", "transform": "vat"},
}


@dataclass
class PipelineConfig:
    input: Optional[str] = None
    format: Optional[str] = None
    labels: Optional[str] = None
    metric: str = "euclidean"
    reduce: str = "none"
    perplexity: float = 30.0
    tsne_iterations: int = 1000
    target_dim: int = 100
    spectral_r: str = "2"
    spectral_gamma: Optional[float] = None
    sample: str = "none"
    kprime: int = 15
    sample_n: int = 4000
    mmrs_start: str = "rowsum"
    order: str = "reduce_then_sample"
    kernel_gamma: Optional[float] = None
    transform: str = "ivat"
    kp: str = "auto"
    kmax: int = 15
    seed: int = 0
    out_image: Optional[str] = None
    out_labels: Optional[str] = None
    out_report: Optional[str] = None
    out_sample: Optional[str] = None
    image_scale: int = 1

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name.replace("_", "-") for f in fields(cls)]

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "PipelineConfig":
        """Build from string values; ``none`` clears optional settings."""
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in mapping.items():
            name = normalize_key(key).replace("-", "_")
            if name not in types:
                raise VatkitError(f"unknown config key {key!r}")
            value = str(raw).strip()
            typ = types[name]
            if "Optional" in str(typ) and value.lower() in ("", "none"):
                kwargs[name] = None
                continue
            try:
                if "float" in str(typ):
                    kwargs[name] = float(value)
                elif "int" in str(typ):
                    kwargs[name] = int(value)
                else:
                    kwargs[name] = value
            except ValueError:
                raise VatkitError(f"bad value for {key}: {value!r}") from None
        config = cls(**kwargs)
        config.validate()
        return config

    def spectral_rs(self) -> list[int]:
        text = str(self.spectral_r).strip()
        try:
            if "-" in text:
                lo, hi = (int(t) for t in text.split("-", 1))
                rs = list(range(lo, hi + 1))
            else:
                rs = [int(text)]
        except ValueError:
            raise VatkitError(f"spectral-r must be an integer or a range like 1-10, got {text!r}") from None
        if not rs or rs[0] < 1:
            raise VatkitError(f"invalid spectral-r {text!r}")
        return rs

    def fixed_kp(self) -> Optional[int]:
        if str(self.kp).lower() == "auto":
            return None
        try:
            k = int(self.kp)
        except ValueError:
            raise VatkitError(f"kp must be 'auto' or an integer, got {self.kp!r}") from None
        if k < 1:
            raise VatkitError("kp must be >= 1")
        return k

    def validate(self) -> None:
        for name, value, allowed in (("metric", self.metric, METRICS), ("reduce", self.reduce, REDUCERS),
                                     ("sample", self.sample, SAMPLERS), ("order", self.order, ORDERS),
                                     ("transform", self.transform, TRANSFORMS),
                                     ("mmrs-start", self.mmrs_start, ("rowsum", "random"))):
            if value not in allowed:
                raise VatkitError(f"{name} must be one of {allowed}, got {value!r}")
        if self.format is not None and self.format not in ("csv", "dvm"):
            raise VatkitError(f"format must be csv or dvm, got {self.format!r}")
        positive = {"perplexity": self.perplexity, "tsne-iterations": self.tsne_iterations,
                    "target-dim": self.target_dim, "kprime": self.kprime, "sample-n": self.sample_n,
                    "image-scale": self.image_scale}
        for name, value in positive.items():
            if not value > 0:
                raise VatkitError(f"{name} must be positive, got {value}")
        if self.kmax < 2:
            raise VatkitError("kmax must be >= 2")
        for name, value in (("kernel-gamma", self.kernel_gamma), ("spectral-gamma", self.spectral_gamma)):
            if value is not None and not value > 0:
                raise VatkitError(f"{name} must be positive, got {value}")
        self.spectral_rs()
        self.fixed_kp()


def normalize_key(key: str) -> str:
    return key.strip().lower().lstrip("-").replace("_", "-")


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise VatkitError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[normalize_key(key)] = value.strip()
    return out


def resolve_settings(preset: Optional[str] = None, config_path=None,
                     overrides: Optional[dict[str, str]] = None) -> dict[str, str]:
    """Layer preset < config file < overrides. A ``preset`` key inside the
    config file is honoured unless a preset is passed explicitly."""
    file_settings = parse_config_text(Path(config_path).read_text(encoding="utf-8")) if config_path else {}
    overrides = {normalize_key(k): v for k, v in (overrides or {}).items()}
    name = overrides.pop("preset", None) or preset or file_settings.pop("preset", None)
    file_settings.pop("preset", None)
    settings: dict[str, str] = {}
    if name:
        if name not in PRESETS:
            raise VatkitError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        settings.update(PRESETS[name])
    settings.update(file_settings)
    settings.update(overrides)
    return settings


def load_config(preset=None, config_path=None, overrides=None) -> PipelineConfig:
    return PipelineConfig.from_mapping(resolve_settings(preset, config_path, overrides))


# --------------------------------------------------------------------------
# stage helpers shared with the CLI subcommands
# --------------------------------------------------------------------------

def reduce_stage(X: EmbeddingSet, method: str, master_seed: int, metric: str = "euclidean",
                 perplexity: float = 30.0, iterations: int = 1000, target_dim: int = 100,
                 spectral_r: int = 2, spectral_gamma: Optional[float] = None) -> EmbeddingSet:
    seed = derive_seed(master_seed, STAGE_REDUCE)
    if method == "none":
        return X
    if method == "tsne":
        return tsne(X, TsneConfig(perplexity=perplexity, iterations=iterations, seed=seed))
    if method == "random_projection":
        return random_project(X, target_dim, seed)
    if method == "spectral":
        D = pairwise_dissimilarity(X, metric)
        emb = spectral_embed(D, SpectralConfig(r=spectral_r, affinity_gamma=spectral_gamma))
        return EmbeddingSet(emb.data, X.labels)
    raise VatkitError(f"unknown reduction {method!r}")


def sample_stage(X: EmbeddingSet, kprime: int, n: int, master_seed: int, metric: str = "euclidean",
                 start: str = "rowsum") -> np.ndarray:
    n = min(n, X.n_objects)
    result = mmrs_sample(X, kprime, n, derive_seed(master_seed, STAGE_SAMPLE), metric, start)
    return result.sample


def dissimilarity_stage(X: EmbeddingSet, metric: str, kernel_gamma: Optional[float]):
    D = pairwise_dissimilarity(X, metric)
    if kernel_gamma is not None:
        D = rbf_kernel_transform(D, kernel_gamma)
    return D


def partition_stage(ordering: VatOrdering, kp: Optional[int], kmax: int):
    n = ordering.n
    if kp is None:
        kp = 1 if n < 2 else estimate_k(ordering, min(kmax, n))
    return mst_cut_partition(ordering, kp)


# --------------------------------------------------------------------------
# run
# --------------------------------------------------------------------------

@dataclass
class PipelineReport:
    kp: int
    seed: int
    labels: np.ndarray
    indices: np.ndarray
    matrix: ReorderedMatrix
    pa: Optional[float] = None
    nmi: Optional[float] = None
    info: dict = field(default_factory=dict)
    stage_ms: dict = field(default_factory=dict)

    def to_text(self, timing: bool = True) -> str:
        lines = [f"kp={self.kp}"]
        if self.pa is not None:
            lines.append(f"pa={self.pa!r}")
            lines.append(f"nmi={self.nmi!r}")
        lines.append(f"seed={self.seed}")
        lines += [f"{k}={v}" for k, v in self.info.items()]
        if timing:
            lines += [f"stage_ms_{k}={v:.3f}" for k, v in self.stage_ms.items()]
        return "\n".join(lines) + "\n"


class _Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    def run(self, stage: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        except PipelineError:
            raise
        except (VatkitError, OSError) as exc:
            raise PipelineError(stage, exc) from exc
        finally:
            self.ms[stage] = self.ms.get(stage, 0.0) + 1000.0 * (time.perf_counter() - t0)


def _assess(X: EmbeddingSet, cfg: PipelineConfig, spectral_r: int, timer: _Timer):
    """Everything after loading, for one spectral-r value."""
    indices = np.arange(X.n_objects)

    def do_reduce(Z):
        return timer.run("reduce", reduce_stage, Z, cfg.reduce, cfg.seed, cfg.metric, cfg.perplexity,
                         cfg.tsne_iterations, cfg.target_dim, spectral_r, cfg.spectral_gamma)

    def do_sample(Z):
        if cfg.sample == "none":
            return np.arange(Z.n_objects)
        return timer.run("sample", sample_stage, Z, cfg.kprime, cfg.sample_n, cfg.seed, cfg.metric,
                         cfg.mmrs_start)

    if cfg.order == "reduce_then_sample":
        X = do_reduce(X)
        indices = do_sample(X)
        X = X.subset(indices)
    else:
        indices = do_sample(X)
        X = do_reduce(X.subset(indices))

    D = timer.run("dissimilarity", dissimilarity_stage, X, cfg.metric, cfg.kernel_gamma)
    ordering = timer.run("vat", vat_reorder, D)
    if cfg.transform == "ivat":
        matrix = timer.run("ivat", ivat_transform, D, ordering)
    else:
        matrix = reorder(D, ordering)
    estimate = timer.run("estimate", partition_stage, ordering, cfg.fixed_kp(), cfg.kmax)
    pa = score = None
    if X.labels is not None:
        pa, score = timer.run("evaluate", lambda: (partition_accuracy(estimate.labels, X.labels),
                                                   nmi(estimate.labels, X.labels)))
    return dict(indices=indices, matrix=matrix, estimate=estimate, pa=pa, nmi=score, n=X.n_objects)


def run_pipeline(cfg: PipelineConfig, data: Optional[EmbeddingSet] = None) -> PipelineReport:
    """Run every configured stage; write the image/labels/report outputs named in ``cfg``.

    ``data`` bypasses file loading (its labels are used for evaluation).
    """
    cfg.validate()
    timer = _Timer()
    if data is None:
        if cfg.input is None:
            raise PipelineError("load", "no input given")
        data = timer.run("load", data_io.load_embeddings, cfg.input, cfg.format, cfg.labels)

    rs = cfg.spectral_rs() if cfg.reduce == "spectral" else [None]
    runs = []
    for r in rs:
        runs.append((r, _assess(data, cfg, r, timer)))
    if len(runs) > 1 and data.labels is not None:
        best_r, best = max(runs, key=lambda item: item[1]["pa"])  # first r wins ties
    else:
        best_r, best = runs[0]

    info = {"n_objects": data.n_objects, "n_assessed": best["n"], "metric": cfg.metric,
            "reduce": cfg.reduce, "sample": cfg.sample, "transform": cfg.transform}
    if best_r is not None:
        info["spectral_r"] = best_r
        if len(runs) > 1:
            for r, res in runs:
                info[f"spectral_r{r}_kp"] = res["estimate"].k_p
                if res["pa"] is not None:
                    info[f"spectral_r{r}_pa"] = repr(res["pa"])
                    info[f"spectral_r{r}_nmi"] = repr(res["nmi"])
    info["cut_positions"] = " ".join(str(int(c)) for c in best["estimate"].cut_positions)

    report = PipelineReport(kp=best["estimate"].k_p, seed=cfg.seed, labels=best["estimate"].labels,
                            indices=np.asarray(best["indices"]), matrix=best["matrix"],
                            pa=best["pa"], nmi=best["nmi"], info=info)
    if cfg.out_image:
        timer.run("render", render_rdi, best["matrix"], cfg.out_image, cfg.image_scale)
    if cfg.out_labels:
        timer.run("write", data_io.save_labels, cfg.out_labels, report.labels)
    if cfg.out_sample:
        timer.run("write", data_io.save_labels, cfg.out_sample, report.indices)
    report.stage_ms = dict(timer.ms)
    if cfg.out_report:
        try:
            Path(cfg.out_report).write_text(report.to_text(), encoding="utf-8")
        except OSError as exc:
            raise PipelineError("write", exc) from exc
    log.info("pipeline done: kp=%d pa=%s nmi=%s", report.kp, report.pa, report.nmi)
    return report
