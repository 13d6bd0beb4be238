"""Reference scorer server for the style-transfer wire protocol."""

from .app import create_app
from .registry import ModelRegistry, RegistryError

__version__ = "0.1.0"

__all__ = ["create_app", "ModelRegistry", "RegistryError", "__version__"]
