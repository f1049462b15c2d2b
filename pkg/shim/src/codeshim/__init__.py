"""codeshim: the in-sandbox runner for benchmark candidate code.

Launched as ``python -m codeshim`` by the host-side supervisor; speaks a
length-prefixed JSON frame protocol over stdin/stdout and reports one
canonical-encoded result per test case.
"""

__version__ = "0.1.0"

from .canonical import canonicalize, realize
from .runner import DEFAULT_ALLOWED_IMPORTS, serve_job

__all__ = ["canonicalize", "realize", "serve_job", "DEFAULT_ALLOWED_IMPORTS", "__version__"]
