import functools
import os
import sys

from hypothesis import HealthCheck, settings

from gl2lab.groups import standard
from gl2lab.lattice import Lattice

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@functools.cache
def lattice_classes(tag: str, p: int, abelian_only: bool = False):
    """Conjugacy classes of subgroups of a named group, shared across tests."""
    return Lattice(standard(tag, p)).class_subgroups(abelian_only=abelian_only)


@functools.cache
def lattice_subgroups(tag: str, p: int, abelian_only: bool = False):
    subs = [s for ms in lattice_classes(tag, p, abelian_only) for s in ms]
    return sorted(subs, key=lambda s: (s.order, s.codes.tobytes()))
