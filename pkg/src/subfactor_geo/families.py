"""Registry of the built-in inclusion families used across the test suites.

Each entry pairs a short name with a zero-argument builder.  Construction
results are memoized because building the extension algebra (basis of the
generated algebra, Gram-Schmidt, property gates) is the expensive step and
every suite wants the same five instances.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .algebra import (
    AlgebraDescriptor,
    Inclusion,
    make_group_flip_inclusion,
    make_tensor_inclusion,
)
from .basic import BasicConstruction, build_basic_construction
from .errors import ConfigError


def _group_flip_scalars() -> Inclusion:
    return make_group_flip_inclusion(
        AlgebraDescriptor((1,), (1.0,)), tag="group_flip(scalars)"
    )


def _group_flip_m2() -> Inclusion:
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return make_group_flip_inclusion(
        AlgebraDescriptor((2,), (0.5,)), theta=swap, tag="group_flip(m2)"
    )


_BUILDERS: dict[str, Callable[[], Inclusion]] = {
    "tensor(1,2)": lambda: make_tensor_inclusion(1, 2),
    "tensor(1,3)": lambda: make_tensor_inclusion(1, 3),
    "tensor(2,2)": lambda: make_tensor_inclusion(2, 2),
    "group_flip(scalars)": _group_flip_scalars,
    "group_flip(m2)": _group_flip_m2,
}

FAMILY_NAMES: tuple[str, ...] = tuple(_BUILDERS)

_INCLUSIONS: dict[str, Inclusion] = {}
_CONSTRUCTIONS: dict[str, BasicConstruction] = {}


def family_inclusion(name: str) -> Inclusion:
    """Inclusion instance for a registered family name."""
    if name not in _BUILDERS:
        raise ConfigError(
            f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}"
        )
    if name not in _INCLUSIONS:
        _INCLUSIONS[name] = _BUILDERS[name]()
    return _INCLUSIONS[name]


def family_construction(name: str) -> BasicConstruction:
    """Memoized extension-algebra construction for a registered family."""
    if name not in _CONSTRUCTIONS:
        _CONSTRUCTIONS[name] = build_basic_construction(family_inclusion(name))
    return _CONSTRUCTIONS[name]


def family_summary(name: str) -> dict:
    """Plain-dict description used by the CLI listing."""
    inc = family_inclusion(name)
    bc = family_construction(name)
    return {
        "name": name,
        "tag": inc.family_tag,
        "index": 1.0 / inc.lam,
        "lam": inc.lam,
        "dim_sub": int(inc.embed_basis.shape[0]),
        "dim_amb": int(inc.amb_basis.shape[0]),
        "dim_extension": bc.dim_m1,
        "ambient_matrix_size": int(inc.amb.ambient_dim),
    }
