"""Resource guards shared across the workbench.

The memory cap is read from the TUPLESIEVE_MEM_CAP environment variable
(bytes) and defaults to 4 GiB.  Guards raise ResourceBudgetError, which the
CLI maps to exit code 3; failed witness rechecks raise VerificationError,
mapped to exit code 4.
"""

import os

DEFAULT_MEM_CAP = 4 << 30


class ResourceBudgetError(RuntimeError):
    """A requested computation exceeds the configured resource budget."""


class VerificationError(RuntimeError):
    """An emitted witness failed its independent recheck."""


def mem_cap() -> int:
    raw = os.environ.get("TUPLESIEVE_MEM_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise ValueError(f"TUPLESIEVE_MEM_CAP must be an integer byte count, got {raw!r}") from exc
    return DEFAULT_MEM_CAP


def check_memory(nbytes: int, what: str) -> None:
    cap = mem_cap()
    if nbytes > cap:
        raise ResourceBudgetError(
            f"{what} needs roughly {nbytes} bytes but the cap is {cap}; raise TUPLESIEVE_MEM_CAP to override"
        )
