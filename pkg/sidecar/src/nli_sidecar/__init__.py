"""Inference sidecar speaking the 3-way classifier wire protocol."""

from .app import create_app
from .backends import LexicalBackend, ModelLoadFailure, TransformersBackend

__version__ = "0.1.0"
