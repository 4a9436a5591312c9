"""Cluster-tendency assessment with VAT/iVAT on precomputed embeddings."""

from .data_io import EmbeddingSet, MixtureSpec, generate_gaussian_mixture, load_embeddings, load_labels
from .dissimilarity import DissimilarityMatrix, pairwise_dissimilarity, rbf_kernel_transform
from .errors import ParseError, PipelineError, TsneError, VatkitError
from .evaluation import nmi, partition_accuracy
from .pipeline import PipelineConfig, run_pipeline
from .reduce import SpectralConfig, TsneConfig, random_project, spectral_embed, tsne
from .render import render_rdi
from .sampling import MmrsResult, maximin_select, mmrs_sample, npr_group
from .vat import ClusterEstimate, VatOrdering, estimate_k, ivat, ivat_transform, mst_cut_partition, vat_reorder

__version__ = "0.1.0"
