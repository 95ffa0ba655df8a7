"""minisynth: bounded model checking, induction and invariant synthesis for MiniUCL models."""
from .errors import MinisynthError
from .frontend import load_model

__version__ = "0.1.0"

__all__ = ["MinisynthError", "load_model", "__version__"]
