"""Deliberately broken variants of the formula hooks.

Each mutant is a context manager that swaps one module-level hook for a
plausible wrong formula; the suite is expected to fail while it is active.
"""
from __future__ import annotations

import contextlib
import math

from .. import operators
from ..seqclass import cohen, mixed, strong, weak


@contextlib.contextmanager
def _patched(module, name, replacement):
    original = getattr(module, name)
    setattr(module, name, replacement)
    try:
        yield
    finally:
        setattr(module, name, original)


def strong_exponent_one():
    """Strong class summed with exponent 1 whatever ``p`` is."""
    return _patched(strong, "lp_exponent", lambda p: 1.0)


def weak_functional_primal():
    """Weak norm taking functionals from the primal ball instead of the dual ball."""
    return _patched(weak, "functional_exponent", lambda space: space.exponent)


def cohen_constraint_p():
    """Cohen constraint with exponent ``p`` instead of its conjugate."""
    return _patched(cohen, "constraint_exponent", lambda p: p)


def mixed_multiplier_s():
    """Mixed multipliers measured in ``l_s`` instead of the gap exponent."""
    return _patched(mixed, "multiplier_exponent", lambda s, q: s)


def symmetrization_without_factorial():
    """Symmetrization summing over permutations without averaging."""
    return _patched(operators, "symmetrization_divisor", lambda n: 1)


def extension_factorial():
    """Scalar extension divided by ``(n+1)!`` instead of ``n+1``."""
    return _patched(operators, "extension_divisor", lambda n: math.factorial(n + 1))


MUTANTS = {
    "strong_exponent_one": strong_exponent_one,
    "weak_functional_primal": weak_functional_primal,
    "cohen_constraint_p": cohen_constraint_p,
    "mixed_multiplier_s": mixed_multiplier_s,
    "symmetrization_without_factorial": symmetrization_without_factorial,
    "extension_factorial": extension_factorial,
}
