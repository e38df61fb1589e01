"""Exact computation of Jacquet modules and nearby cycles for Harish-Chandra modules of SL(2, R)."""

__version__ = "0.1.0"

from .hcmod import ModuleDescriptor, catalog_modules  # noqa: E402
from .jacquet import jacquet_module, structure_report  # noqa: E402
from .vfilt import nearby_cycles, theorem1_compare  # noqa: E402

__all__ = [
    "ModuleDescriptor",
    "catalog_modules",
    "jacquet_module",
    "nearby_cycles",
    "structure_report",
    "theorem1_compare",
    "__version__",
]
