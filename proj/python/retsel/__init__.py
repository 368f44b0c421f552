"""Python bindings for the retsel retrieval strategy selection harness."""

from ._retsel import *  # noqa: F401,F403
from ._retsel import __doc__  # noqa: F401
