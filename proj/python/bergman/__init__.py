"""Exact b1 coefficient of the Bergman kernel expansion.

Thin wrapper over the native ``_bergman`` extension: jets, potentials and
results are plain dicts; exact values are strings such as ``"(1/2)pi^-1"``.
"""

import json as _json

from . import _bergman
from ._bergman import DegenerateCurvature, InvalidJet, InvalidPotential

__all__ = [
    "DegenerateCurvature",
    "InvalidJet",
    "InvalidPotential",
    "b1_closed_form",
    "b1_engine",
    "b1_trace",
    "cp1_product_table",
    "flat_jet",
    "fubini_study_jet",
    "identities",
    "jet_from_potential",
    "random_jet",
    "rrh",
    "selftest",
    "validate_jet",
]


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def flat_jet(n, q, rk=1):
    return _json.loads(_bergman.flat_jet(n, q, rk))


def fubini_study_jet(n, q, rk=1):
    return _json.loads(_bergman.fubini_study_jet(n, q, rk))


def random_jet(n, q, rk=1, seed=0):
    return _json.loads(_bergman.random_jet(n, q, rk, seed))


def jet_from_potential(potential, n, q, bundle_potentials=()):
    return _json.loads(
        _bergman.jet_from_potential(_dump(potential), n, q, [_dump(p) for p in bundle_potentials])
    )


def validate_jet(jet):
    return _json.loads(_bergman.validate_jet(_dump(jet)))


def b1_closed_form(jet):
    return _json.loads(_bergman.b1_closed_form(_dump(jet)))


def b1_engine(jet):
    return _json.loads(_bergman.b1_engine(_dump(jet)))


def b1_trace(jet):
    return _bergman.b1_trace(_dump(jet))


def identities(jet):
    return _json.loads(_bergman.identities(_dump(jet)))


def cp1_product_table(n, q, pmin, pmax, fit=True):
    return _json.loads(_bergman.cp1_product_table(n, q, pmin, pmax, fit))


def rrh(n, q, rk=1):
    return _json.loads(_bergman.rrh(n, q, rk))


def selftest():
    return _json.loads(_bergman.selftest())
