"""Nature-related financial risk engine.

Projects environmental hazards per country into a Country Degradation Index,
scores firms' Nature Risk from revenue exposure and ecosystem-service
dependencies, and values the resulting equity losses.
"""

import logging

__version__ = "0.1.0"

logging.getLogger("naturisk").addHandler(logging.NullHandler())

from naturisk.config import ScenarioConfig, load_config  # noqa: E402
from naturisk.ingest import Dataset, load_dataset, validate_dataset  # noqa: E402
from naturisk.pipeline import Pipeline  # noqa: E402

__all__ = ["Dataset", "Pipeline", "ScenarioConfig", "load_config", "load_dataset", "validate_dataset", "__version__"]
