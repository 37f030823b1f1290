"""Knowledge graph data: vocabularies, triple splits, filter index, corruption sampling"""

from kgecore.data.filter_index import FilterIndex, build_filter_index
from kgecore.data.loader import SPLITS, Triple, TripleStore, as_triple_array, load_dataset, load_triples
from kgecore.data.sampling import (
    BernStats,
    CandidateBatch,
    CandidateSet,
    Side,
    compute_bern_stats,
    sample_candidate_batch,
    sample_candidates,
)
from kgecore.data.vocabulary import Vocabulary, VocabularyBuilder

__all__ = [
    "Vocabulary",
    "VocabularyBuilder",
    "Triple",
    "TripleStore",
    "SPLITS",
    "as_triple_array",
    "load_triples",
    "load_dataset",
    "FilterIndex",
    "build_filter_index",
    "Side",
    "BernStats",
    "CandidateSet",
    "CandidateBatch",
    "compute_bern_stats",
    "sample_candidates",
    "sample_candidate_batch",
]
