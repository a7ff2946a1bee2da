"""corpusforge: budgeted multilingual training-data pipeline and evaluation toolkit.

Subpackages cover the full desk-side cycle: corpus ingestion and statistics,
budgeted mixture planning and packing, instruction/translation formatting,
benchmark construction, metric scoring, and a human-annotation backend.
"""

__version__ = "0.1.0"
