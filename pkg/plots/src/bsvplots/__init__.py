"""Figure regeneration for bsvsim CSV/JSON outputs."""

__version__ = "0.1.0"

from .figures import FigureSpec, RenderResult, render  # noqa: F401
from .io import SchemaError, column_checksum  # noqa: F401
