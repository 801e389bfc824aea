"""Python front end for the gencomp kernel.

Thin wrappers over the compiled module: rationals come back as Fractions and
JSON documents as dicts.
"""

import json
from fractions import Fraction

from . import _core
from ._core import (
    GencompError,
    asymmetric_join_bit,
    cantor_pair,
    cantor_unpair,
    catalog,
    embed_relation,
    encode_R,
    encode_Rtilde,
    functional_names,
    gap_census,
    gap_only_set,
    seeded_bits,
    stage_interval,
    universal_rel,
)

__all__ = [
    "GencompError",
    "asymmetric_join_bit",
    "cantor_pair",
    "cantor_unpair",
    "catalog",
    "compile_functional",
    "decode_R",
    "decode_Rtilde",
    "density_threshold",
    "embed_relation",
    "encode_R",
    "encode_Rtilde",
    "functional_names",
    "gap_census",
    "gap_density_upper",
    "gap_only_set",
    "prefix_density",
    "run",
    "seeded_bits",
    "stage_interval",
    "universal_rel",
    "verify",
]


def _frac(pair):
    return Fraction(*pair)


def prefix_density(member, n):
    """|{k < n : member[k]}| / n as a Fraction; member is a sequence of bools."""
    return _frac(_core.prefix_density(list(map(bool, member)), n))


def gap_density_upper(i, e):
    return _frac(_core.gap_density_upper(i, e))


def density_threshold(member, i_max, e, n_max):
    return _core.density_threshold(list(map(bool, member)), i_max, e, n_max)


def decode_R(description, m, bound):
    """description maps index -> bit; None when no witness is assigned."""
    return _core.decode_R(dict(description), m, bound)


def decode_Rtilde(description, m, bound):
    return _core.decode_Rtilde(dict(description), m, bound)


def compile_functional(name, element_bound=4, max_label=3):
    """Axioms of the compiled operator as (output code, premise codes) pairs."""
    return [(out, tuple(premise)) for out, premise in _core.compile_functional(name, element_bound, max_label)]


def run(config):
    """Run a config (dict or JSON string). Returns (report, trace or None, passed)."""
    doc = config if isinstance(config, str) else json.dumps(config)
    report, trace, passed = _core.run_config(doc)
    return json.loads(report), (json.loads(trace) if trace else None), passed


def verify(trace):
    """Check a trace (dict or JSON string); returns [(invariant, passed, detail)]."""
    doc = trace if isinstance(trace, str) else json.dumps(trace)
    return [tuple(v) for v in _core.verify_trace(doc)]
