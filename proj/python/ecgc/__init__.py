"""Low-complexity multi-sensor ECG compression toolkit."""

from ._ecgc import *  # noqa: F401,F403
from ._ecgc import __doc__ as _core_doc

__doc__ = _core_doc or __doc__
