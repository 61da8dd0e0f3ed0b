"""Python access to the corescope native core.

The functions here return decoded JSON in the same shapes the `corescope`
CLI writes (see docs/schema.md).
"""

import json

from . import _core
from ._core import ResourceError, UsageError, read_raw_csv, to_cycles

__all__ = [
    "ResourceError",
    "UsageError",
    "__version__",
    "detect_topology",
    "pin_plan",
    "read_raw_csv",
    "run",
    "summarize",
    "to_cycles",
]

__version__ = _core.suite_version()


def run(*args):
    """Run a CLI invocation in-process. Returns (exit_code, document or None, stderr)."""
    code, out, err = _core.run_cli([str(a) for a in args])
    doc = json.loads(out) if code == 0 and out.strip() else None
    return code, doc, err


def detect_topology():
    return json.loads(_core.detect_topology())


def pin_plan(strategy, n, packages, cores_per_package, threads_per_core):
    return json.loads(_core.pin_plan(strategy, n, packages, cores_per_package, threads_per_core))


def summarize(samples, clock_ghz, bin_width=2000):
    """Summary block for (a_ns, b_ns) pairs, as embedded in sample documents."""
    return json.loads(_core.summarize([(int(a), int(b)) for a, b in samples], clock_ghz, bin_width))
