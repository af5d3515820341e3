"""Phase synchronization of a driven qubit in a squeezed thermal reservoir."""

from ._core import *  # noqa: F401,F403
from ._core import SqzSyncError, InvalidParamError, SystemParams, BlochVector  # noqa: F401

__version__ = "0.1.0"
