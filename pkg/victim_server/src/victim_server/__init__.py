"""HTTP host for fine-tuned victim classifiers.

Wraps a sequence-classification checkpoint behind three JSON endpoints
(GET /labels, POST /predict, POST /embed) with a frozen label order,
deterministic inference, and per-text truncation reporting. The attack
toolkit talks to this server over plain HTTP; neither package imports
the other.
"""

from .app import create_app, main
from .model import ModelRegistration, VictimModel

__all__ = ["ModelRegistration", "VictimModel", "create_app", "main"]
