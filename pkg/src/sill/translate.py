"""Homomorphic translation of CP terms into HCP terms.

Cut becomes restriction over a parallel pair, bound output becomes output
over a parallel pair, halt becomes output-unit over the inert process; every
other constructor maps one-to-one.  Names are preserved, so the translation
commutes with substitution and preserves free names.
"""
from __future__ import annotations

from . import cp, hcp


def cp_to_hcp(t: cp.CpTerm) -> hcp.HcpTerm:
    match t:
        case cp.Link(x, y):
            return hcp.Link(x, y)
        case cp.Cut(x, ty, p, q):
            return hcp.New(x, ty, hcp.Par(cp_to_hcp(p), cp_to_hcp(q)))
        case cp.Send(x, y, p, q):
            return hcp.BoundOut(x, y, hcp.Par(cp_to_hcp(p), cp_to_hcp(q)))
        case cp.Recv(x, y, p):
            return hcp.In(x, y, cp_to_hcp(p))
        case cp.Halt(x):
            return hcp.OutUnit(x, hcp.Inert())
        case cp.Wait(x, p):
            return hcp.InUnit(x, cp_to_hcp(p))
        case cp.Inl(x, p):
            return hcp.Inl(x, cp_to_hcp(p))
        case cp.Inr(x, p):
            return hcp.Inr(x, cp_to_hcp(p))
        case cp.Case(x, p, q):
            return hcp.Case(x, cp_to_hcp(p), cp_to_hcp(q))
        case cp.Absurd(x):
            return hcp.Absurd(x)
    raise TypeError(f"not a cp term: {t!r}")
