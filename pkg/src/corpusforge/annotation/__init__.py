"""Human-evaluation backend: blind survey assignments, Likert ratings,
pairwise preferences, translation-QE judgments, and their aggregations."""

from .service import AnnotationService, PairwiseTask, SurveyConfig

__all__ = ["AnnotationService", "SurveyConfig", "PairwiseTask"]
