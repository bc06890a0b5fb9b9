"""
Template-based recognizer: training store, persistence and matching.
"""

from .template_store import (
    RecognizerError, TemplateStoreError, TemplateStore, make_provenance, train,
    save_store, load_store,
)
from .matcher import (
    MatchResult, METRICS, MATCH_STRATEGIES, similarity, cosine_similarity, classify,
)

__all__ = [
    'RecognizerError', 'TemplateStoreError', 'TemplateStore', 'make_provenance', 'train',
    'save_store', 'load_store',
    'MatchResult', 'METRICS', 'MATCH_STRATEGIES', 'similarity', 'cosine_similarity', 'classify',
]
