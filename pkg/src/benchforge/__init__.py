"""benchforge: evolve program-synthesis benchmarks, evaluate LLM solutions.

Subsystems:

* problems  - data model, validation, JSONL stores
* llm       - providers, templates, cache (mock provider for offline runs)
* evolve    - targeted transformations and derived datasets
* refine    - self-consistency refinement and test augmentation
* sandbox   - supervised execution of untrusted code (wire protocol)
* harness   - sanitization, differential judging, pass@k
* metrics   - rankings, drops, composition/decomposition analysis
"""

__version__ = "0.1.0"

from .canonical import CanonicalValue, from_python, to_python
from .oracles import OracleSpec, judge
from .problems import BenchmarkManifest, Problem, ProblemStore, load_benchmark

__all__ = [
    "BenchmarkManifest",
    "CanonicalValue",
    "OracleSpec",
    "Problem",
    "ProblemStore",
    "from_python",
    "judge",
    "load_benchmark",
    "to_python",
    "__version__",
]
