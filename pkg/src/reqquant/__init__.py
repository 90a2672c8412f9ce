"""reqquant: performance-requirement quantification.

Turns natural-language performance requirements into piecewise-linear
stakeholder-satisfaction curves, refines them by analogy to past examples,
tunes them in bounded interactive sessions, and scores results with four
curve-distance metrics.
"""

from .analogy import (Matching, apply_analogy, extract_operations, km_match,
                      reason, retrieve_analogy)
from .classify import (Anchor, ClassificationResult, LossBatch, LossItem,
                       classify, contrastive_loss, default_anchors)
from .curves import (AddPoint, ChangeValue, CurveError, Operation,
                     PatternType, Point, Quantification, RemovePoint,
                     apply_operation, apply_operations, from_pattern,
                     operation_cost)
from .embedding import ProviderConfig, cosine_similarity, embed
from .extract import (ExtractionConfig, InitialDraft, extract_threshold,
                      initial_quantification)
from .metrics import (MetricReport, chebyshev, cognitive_overhead_ratio,
                      compare, iad, normalize_domain, p2p, rmse)
from .session import AnswerPath, Session, start_session
from .store import (DatasetRecord, KnowledgeStore, RequirementExample,
                    import_dataset, import_examples)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
