"""Syntax-directed typecheckers for CP and HCP, producing derivation trees.

CP checking is deterministic: every name of the ambient environment is routed
to the unique branch where it occurs free.  HCP checking synthesizes the
hyper-environment partition bottom-up; the types of the two endpoints of a
restricted channel are resolved by a small union-find with duality parity
(each endpoint use is a variable ranging over {A, dual A}).  The one genuine
rule freedom, which member environment a unit input extends, is resolved
canonically to the first member without the subject.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import cp, hcp
from . import types as ty
from .names import Loc, Name
from .types import BOT, ONE, TOP, Type, dual

Env = dict  # Name -> Type
HyperEnv = list  # list[Env]

KIND_UNKNOWN = "UnknownName"
KIND_REUSE = "NameReuse"
KIND_UNUSED = "UnusedLinear"
KIND_SPLIT = "SplitConflict"
KIND_SELFLOCK = "SelfLock"
KIND_HYPER = "HyperContextForbidden"
KIND_MISMATCH = "TypeMismatch"
KIND_DIALECT = "DialectViolation"


class TypeCheckError(Exception):
    def __init__(self, kind: str, message: str, *, name: Name | None = None,
                 loc: Loc | None = None, expected: str | None = None, actual: str | None = None):
        self.kind = kind
        self.message = message
        self.name = name
        self.loc = loc
        self.expected = expected
        self.actual = actual
        super().__init__(self.render())

    def render(self, filename: str | None = None) -> str:
        loc = str(self.loc) if self.loc else "?:?"
        prefix = f"{filename}:{loc}: " if filename else ""
        return f"{prefix}{self.kind}: {self.message}"

    def json_record(self) -> dict:
        return {
            "kind": self.kind,
            "name": self.name.surface if self.name else None,
            "loc": str(self.loc) if self.loc else None,
            "expected": self.expected,
            "actual": self.actual,
        }


@dataclass(eq=False)
class Derivation:
    rule: str
    term: object
    env: object  # Env for CP nodes, HyperEnv for HCP nodes
    premises: tuple

    @property
    def dialect(self) -> str:
        return "cp" if isinstance(self.env, dict) else "hcp"


def _env_key(e: Env):
    return tuple(sorted((n.uid, n.surface, ty.render(a)) for n, a in e.items()))


def _part_key(part: HyperEnv):
    return sorted(_env_key(e) for e in part)


def env_eq(e1: Env, e2: Env) -> bool:
    return _env_key(e1) == _env_key(e2)


def hyper_eq(p1: HyperEnv, p2: HyperEnv) -> bool:
    return _part_key(p1) == _part_key(p2)


# -- CP -----------------------------------------------------------------------


def _need(env: Env, x: Name, t) -> Type:
    if x not in env:
        raise TypeCheckError(KIND_UNKNOWN, f"channel {x} is not in the environment", name=x, loc=t.loc)
    return env[x]


def _route(env: Env, p, q, t) -> tuple[Env, Env]:
    fvp, fvq = cp.free_names(p), cp.free_names(q)
    envp: Env = {}
    envq: Env = {}
    for n, a in env.items():
        inp, inq = n in fvp, n in fvq
        if inp and inq:
            raise TypeCheckError(KIND_SPLIT, f"channel {n} is used by both branches of a split", name=n, loc=t.loc)
        if inp:
            envp[n] = a
        elif inq:
            envq[n] = a
        else:
            raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
    return envp, envq


def check_cp(t: cp.CpTerm, env: Env) -> Derivation:
    """Check a CP term against a declared environment; returns the derivation."""
    if not isinstance(t, cp.CpTerm):
        raise TypeCheckError(KIND_DIALECT, "expected a CP term", loc=getattr(t, "loc", None))
    return _check_cp(t, dict(env))


def _mismatch(x: Name, want: str, have: Type, t) -> TypeCheckError:
    return TypeCheckError(
        KIND_MISMATCH,
        f"channel {x} has type {ty.render(have)}, but the action requires {want}",
        name=x, loc=t.loc, expected=want, actual=ty.render(have),
    )


def _check_cp(t: cp.CpTerm, env: Env) -> Derivation:
    match t:
        case cp.Link(x, y):
            if x == y:
                raise TypeCheckError(KIND_REUSE, f"a link must join two distinct channels, got {x} twice", name=x, loc=t.loc)
            a, b = _need(env, x, t), _need(env, y, t)
            for n in env:
                if n not in (x, y):
                    raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
            if b != dual(a):
                raise _mismatch(y, f"the dual {ty.render(dual(a))}", b, t)
            return Derivation("Ax", t, dict(env), ())
        case cp.Cut(x, a, p, q):
            if x in env:
                raise TypeCheckError(KIND_REUSE, f"restricted channel {x} shadows a declared channel", name=x, loc=t.loc)
            envp, envq = _route(env, p, q, t)
            envp[x] = a
            envq[x] = dual(a)
            return Derivation("Cut", t, dict(env), (_check_cp(p, envp), _check_cp(q, envq)))
        case cp.Send(x, y, p, q):
            s = _need(env, x, t)
            if not isinstance(s, ty.Tensor):
                raise _mismatch(x, "an output type A * B", s, t)
            rest = {n: v for n, v in env.items() if n != x}
            envp, envq = _route(rest, p, q, t)
            envp[y] = s.left
            envq[x] = s.right
            return Derivation("⊗", t, dict(env), (_check_cp(p, envp), _check_cp(q, envq)))
        case cp.Recv(x, y, p):
            s = _need(env, x, t)
            if not isinstance(s, ty.Par):
                raise _mismatch(x, "an input type A par B", s, t)
            env2 = {n: v for n, v in env.items() if n != x}
            env2[y] = s.left
            env2[x] = s.right
            return Derivation("⅋", t, dict(env), (_check_cp(p, env2),))
        case cp.Halt(x):
            s = _need(env, x, t)
            if s != ONE:
                raise _mismatch(x, "the unit 1", s, t)
            for n in env:
                if n != x:
                    raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
            return Derivation("1", t, dict(env), ())
        case cp.Wait(x, p):
            s = _need(env, x, t)
            if s != BOT:
                raise _mismatch(x, "the unit bot", s, t)
            env2 = {n: v for n, v in env.items() if n != x}
            return Derivation("⊥", t, dict(env), (_check_cp(p, env2),))
        case cp.Inl(x, p):
            s = _need(env, x, t)
            if not isinstance(s, ty.Plus):
                raise _mismatch(x, "a selection type A + B", s, t)
            env2 = dict(env)
            env2[x] = s.left
            return Derivation("⊕₁", t, dict(env), (_check_cp(p, env2),))
        case cp.Inr(x, p):
            s = _need(env, x, t)
            if not isinstance(s, ty.Plus):
                raise _mismatch(x, "a selection type A + B", s, t)
            env2 = dict(env)
            env2[x] = s.right
            return Derivation("⊕₂", t, dict(env), (_check_cp(p, env2),))
        case cp.Case(x, p, q):
            s = _need(env, x, t)
            if not isinstance(s, ty.With):
                raise _mismatch(x, "an offer type A & B", s, t)
            envp = dict(env)
            envp[x] = s.left
            envq = dict(env)
            envq[x] = s.right
            return Derivation("&", t, dict(env), (_check_cp(p, envp), _check_cp(q, envq)))
        case cp.Absurd(x):
            s = _need(env, x, t)
            if s != TOP:
                raise _mismatch(x, "the empty offer top", s, t)
            return Derivation("⊤", t, dict(env), ())
    raise TypeCheckError(KIND_DIALECT, f"not a CP construct: {type(t).__name__}", loc=getattr(t, "loc", None))


# -- HCP ----------------------------------------------------------------------


class _Store:
    """Union-find with duality parity over endpoint uses of restricted names."""

    def __init__(self):
        self.parent: list[int] = []
        self.parity: list[int] = []
        self.ann: list[Type] = []
        self.val: dict[int, Type] = {}

    def new_use(self, ann: Type) -> int:
        i = len(self.parent)
        self.parent.append(i)
        self.parity.append(0)
        self.ann.append(ann)
        return i

    def find(self, u: int) -> tuple[int, int]:
        p = 0
        while self.parent[u] != u:
            p ^= self.parity[u]
            u = self.parent[u]
        return u, p

    def value(self, u: int) -> Type | None:
        r, p = self.find(u)
        if r not in self.val:
            return None
        return self.val[r] if p == 0 else dual(self.val[r])

    def force(self, u: int, a: Type, name: Name, loc) -> None:
        if a not in (self.ann[u], dual(self.ann[u])):
            raise TypeCheckError(
                KIND_MISMATCH,
                f"endpoint of {name} must have type {ty.render(self.ann[u])} or its dual, not {ty.render(a)}",
                name=name, loc=loc, expected=ty.render(self.ann[u]), actual=ty.render(a),
            )
        r, p = self.find(u)
        want = a if p == 0 else dual(a)
        if r in self.val:
            if self.val[r] != want:
                have = self.val[r] if p == 0 else dual(self.val[r])
                raise TypeCheckError(
                    KIND_MISMATCH,
                    f"endpoint of {name} is used at type {ty.render(have)} but also at {ty.render(a)}",
                    name=name, loc=loc, expected=ty.render(have), actual=ty.render(a),
                )
        else:
            self.val[r] = want

    def union_dual(self, u: int, v: int, name: Name, loc) -> None:
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            if (pu ^ pv) != 1:
                raise TypeCheckError(KIND_MISMATCH, f"channel {name} would have to be dual to itself", name=name, loc=loc)
            return
        q = pu ^ pv ^ 1
        rv_val = self.val.pop(rv, None)
        self.parent[rv] = ru
        self.parity[rv] = q
        if rv_val is not None:
            want = rv_val if q == 0 else dual(rv_val)
            if ru in self.val:
                if self.val[ru] != want:
                    raise TypeCheckError(KIND_MISMATCH, f"the two endpoints of {name} have incompatible types", name=name, loc=loc)
            else:
                self.val[ru] = want


_UNIT_WANTS = {ty.One: "the unit 1", ty.Bot: "the unit bot", ty.Top: "the empty offer top",
               ty.Tensor: "an output type A * B", ty.Par: "an input type A par B",
               ty.Plus: "a selection type A + B", ty.With: "an offer type A & B"}


class _HcpChecker:
    def __init__(self, allow_self_lock: bool = False, allow_hyper_with: bool = False):
        self.store = _Store()
        self.allow_self_lock = allow_self_lock
        self.allow_hyper_with = allow_hyper_with

    # slots are either concrete Types or int use-ids in self.store

    def _resolved(self, slot):
        return slot if isinstance(slot, Type) else self.store.value(slot)

    def _subject(self, ctx: dict, x: Name, want, t) -> Type:
        if x not in ctx:
            raise TypeCheckError(KIND_UNKNOWN, f"channel {x} is not available here", name=x, loc=t.loc)
        s = ctx[x]
        if isinstance(s, Type):
            if not isinstance(s, want):
                raise _mismatch(x, _UNIT_WANTS[want], s, t)
            return s
        ann = self.store.ann[s]
        cands = [c for c in (ann, dual(ann)) if isinstance(c, want)]
        if not cands:
            raise TypeCheckError(
                KIND_MISMATCH,
                f"channel {x} has endpoint types {ty.render(ann)} and {ty.render(dual(ann))}; "
                f"neither supports this action ({_UNIT_WANTS[want]})",
                name=x, loc=t.loc, expected=_UNIT_WANTS[want], actual=ty.render(ann),
            )
        self.store.force(s, cands[0], x, t.loc)
        return cands[0]

    def go(self, t: hcp.HcpTerm, ctx: dict) -> tuple[Derivation, list[dict]]:
        store = self.store
        match t:
            case hcp.Inert():
                for n in ctx:
                    raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
                return Derivation("H-Mix₀", t, [], ()), []
            case hcp.Link(x, y):
                if x == y:
                    raise TypeCheckError(KIND_REUSE, f"a link must join two distinct channels, got {x} twice", name=x, loc=t.loc)
                for n in (x, y):
                    if n not in ctx:
                        raise TypeCheckError(KIND_UNKNOWN, f"channel {n} is not available here", name=n, loc=t.loc)
                for n in ctx:
                    if n not in (x, y):
                        raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
                sx, sy = ctx[x], ctx[y]
                if isinstance(sx, Type) and isinstance(sy, Type):
                    if sy != dual(sx):
                        raise _mismatch(y, f"the dual {ty.render(dual(sx))}", sy, t)
                elif isinstance(sx, Type):
                    store.force(sy, dual(sx), y, t.loc)
                elif isinstance(sy, Type):
                    store.force(sx, dual(sy), x, t.loc)
                else:
                    store.union_dual(sx, sy, x, t.loc)
                env = {x: sx, y: sy}
                return Derivation("Ax", t, [env], ()), [env]
            case hcp.Par(p, q):
                fvp, fvq = hcp.free_names(p), hcp.free_names(q)
                ctxp: dict = {}
                ctxq: dict = {}
                for n, s in ctx.items():
                    inp, inq = n in fvp, n in fvq
                    if inp and inq:
                        if isinstance(s, Type):
                            raise TypeCheckError(
                                KIND_REUSE,
                                f"channel {n} is used by two parallel components but has only one declared endpoint",
                                name=n, loc=t.loc,
                            )
                        u1 = store.new_use(store.ann[s])
                        u2 = store.new_use(store.ann[s])
                        store.union_dual(u1, u2, n, t.loc)
                        ctxp[n] = u1
                        ctxq[n] = u2
                    elif inp:
                        ctxp[n] = s
                    elif inq:
                        ctxq[n] = s
                    else:
                        raise TypeCheckError(KIND_UNUSED, f"linear channel {n} is not used", name=n, loc=t.loc)
                dp, pp = self.go(p, ctxp)
                dq, pq = self.go(q, ctxq)
                part = pp + pq
                return Derivation("H-Mix", t, part, (dp, dq)), part
            case hcp.New(x, a, p):
                if x in ctx:
                    raise TypeCheckError(KIND_REUSE, f"restricted channel {x} shadows a declared channel", name=x, loc=t.loc)
                u = store.new_use(a)
                ctx2 = dict(ctx)
                ctx2[x] = u
                dp, part = self.go(p, ctx2)
                idxs = [i for i, e in enumerate(part) if x in e]
                if len(idxs) < 2:
                    raise TypeCheckError(
                        KIND_UNUSED,
                        f"restricted channel {x} must be used by two independent components, found {len(idxs)}",
                        name=x, loc=t.loc,
                    )
                if len(idxs) > 2:
                    raise TypeCheckError(KIND_REUSE, f"restricted channel {x} is used by more than two components", name=x, loc=t.loc)
                i, j = idxs
                s1, s2 = part[i][x], part[j][x]
                t1, t2 = self._resolved(s1), self._resolved(s2)
                if t1 is None and t2 is None:
                    # both endpoints still free: record only that they must be
                    # dual; the polarity choice is made at finalization, once
                    # every constraint from sibling subtrees is in
                    store.union_dual(s1, s2, x, t.loc)
                elif t1 is None:
                    store.force(s1, dual(t2), x, t.loc)
                    t1 = dual(t2)
                elif t2 is None:
                    store.force(s2, dual(t1), x, t.loc)
                    t2 = dual(t1)
                if t1 is not None and t2 is not None:
                    if t2 != dual(t1) or {ty.render(t1), ty.render(t2)} != {ty.render(a), ty.render(dual(a))}:
                        raise TypeCheckError(
                            KIND_MISMATCH,
                            f"endpoints of {x} have types {ty.render(t1)} and {ty.render(t2)}, "
                            f"but the restriction is annotated {ty.render(a)}",
                            name=x, loc=t.loc, expected=f"{ty.render(a)} / {ty.render(dual(a))}",
                            actual=f"{ty.render(t1)} / {ty.render(t2)}",
                        )
                merged = {n: s for n, s in part[i].items() if n != x}
                for n, s in part[j].items():
                    if n == x:
                        continue
                    if n in merged:
                        raise TypeCheckError(
                            KIND_REUSE,
                            f"cutting {x} would entangle both endpoints of {n} into one sequent",
                            name=n, loc=t.loc,
                        )
                    merged[n] = s
                newpart = [merged if k == i else e for k, e in enumerate(part) if k != j]
                return Derivation("H-Cut", t, newpart, (dp,)), newpart
            case hcp.BoundOut(x, y, p):
                s = self._subject(ctx, x, ty.Tensor, t)
                ctx2 = {n: v for n, v in ctx.items() if n != x}
                ctx2[y] = s.left
                ctx2[x] = s.right
                dp, part = self.go(p, ctx2)
                iy = next(i for i, e in enumerate(part) if y in e)
                ix = next(i for i, e in enumerate(part) if x in e)
                if iy == ix:
                    raise TypeCheckError(
                        KIND_SPLIT,
                        f"the payload {y} and continuation {x} of an output must belong to independent components",
                        name=x, loc=t.loc,
                    )
                merged = {n: v for n, v in part[iy].items() if n != y}
                for n, v in part[ix].items():
                    if n == x:
                        continue
                    if n in merged:
                        raise TypeCheckError(KIND_REUSE, f"output on {x} would entangle both endpoints of {n}", name=n, loc=t.loc)
                    merged[n] = v
                merged[x] = s
                lo, hi = min(iy, ix), max(iy, ix)
                newpart = [merged if k == lo else e for k, e in enumerate(part) if k != hi]
                return Derivation("⊗", t, newpart, (dp,)), newpart
            case hcp.In(x, y, p):
                s = self._subject(ctx, x, ty.Par, t)
                ctx2 = {n: v for n, v in ctx.items() if n != x}
                ctx2[y] = s.left
                ctx2[x] = s.right
                dp, part = self.go(p, ctx2)
                iy = next(i for i, e in enumerate(part) if y in e)
                if x not in part[iy]:
                    raise TypeCheckError(
                        KIND_SPLIT,
                        f"the payload {y} and continuation {x} of an input must share one component",
                        name=x, loc=t.loc,
                    )
                e2 = {n: v for n, v in part[iy].items() if n not in (x, y)}
                e2[x] = s
                newpart = [e2 if k == iy else e for k, e in enumerate(part)]
                return Derivation("⅋", t, newpart, (dp,)), newpart
            case hcp.OutUnit(x, p):
                self._subject(ctx, x, ty.One, t)
                ctx2 = {n: v for n, v in ctx.items() if n != x}
                if x in hcp.free_names(p):
                    ctx2[x] = BOT
                dp, part = self.go(p, ctx2)
                if any(x in e for e in part) and not self.allow_self_lock:
                    raise TypeCheckError(
                        KIND_SELFLOCK,
                        f"cannot send on {x} while also holding its other endpoint",
                        name=x, loc=t.loc,
                    )
                newpart = part + [{x: ONE}]
                return Derivation("1", t, newpart, (dp,)), newpart
            case hcp.InUnit(x, p):
                s = self._subject(ctx, x, ty.Bot, t)
                ctx2 = {n: v for n, v in ctx.items() if n != x}
                if x in hcp.free_names(p):
                    ctx2[x] = ONE
                dp, part = self.go(p, ctx2)
                if any(x in e for e in part) and not self.allow_self_lock:
                    raise TypeCheckError(
                        KIND_SELFLOCK,
                        f"cannot wait on {x} while also holding its other endpoint",
                        name=x, loc=t.loc,
                    )
                cands = [i for i, e in enumerate(part) if x not in e]
                if not cands:
                    if self.allow_self_lock:
                        newpart = part + [{x: s}]
                        return Derivation("⊥", t, newpart, (dp,)), newpart
                    raise TypeCheckError(
                        KIND_MISMATCH,
                        f"a wait on {x} needs a component to extend; its continuation offers none",
                        name=x, loc=t.loc,
                    )
                i = cands[0]
                e2 = dict(part[i])
                e2[x] = s
                newpart = [e2 if k == i else e for k, e in enumerate(part)]
                return Derivation("⊥", t, newpart, (dp,)), newpart
            case hcp.Inl(x, p) | hcp.Inr(x, p):
                left = isinstance(t, hcp.Inl)
                s = self._subject(ctx, x, ty.Plus, t)
                ctx2 = dict(ctx)
                ctx2[x] = s.left if left else s.right
                dp, part = self.go(p, ctx2)
                i = next(k for k, e in enumerate(part) if x in e)
                e2 = dict(part[i])
                e2[x] = s
                newpart = [e2 if k == i else e for k, e in enumerate(part)]
                rule = "⊕₁" if left else "⊕₂"
                return Derivation(rule, t, newpart, (dp,)), newpart
            case hcp.Case(x, p, q):
                s = self._subject(ctx, x, ty.With, t)
                ctxp = dict(ctx)
                ctxp[x] = s.left
                ctxq = dict(ctx)
                ctxq[x] = s.right
                dp, pp = self.go(p, ctxp)
                dq, pq = self.go(q, ctxq)
                if not self.allow_hyper_with:
                    if len(pp) != 1 or len(pq) != 1:
                        raise TypeCheckError(
                            KIND_HYPER,
                            f"an offer on {x} requires a single sequent, but a branch is split into "
                            f"{max(len(pp), len(pq))} independent components",
                            name=x, loc=t.loc,
                        )
                ip = next(k for k, e in enumerate(pp) if x in e)
                iq = next(k for k, e in enumerate(pq) if x in e)
                restp = [self._env_resolved_key(e) for k, e in enumerate(pp) if k != ip]
                restq = [self._env_resolved_key(e) for k, e in enumerate(pq) if k != iq]
                gp = self._env_resolved_key({n: v for n, v in pp[ip].items() if n != x})
                gq = self._env_resolved_key({n: v for n, v in pq[iq].items() if n != x})
                if gp != gq or sorted(restp) != sorted(restq):
                    raise TypeCheckError(
                        KIND_MISMATCH,
                        f"the branches of the offer on {x} use different channel sets",
                        name=x, loc=t.loc,
                    )
                e2 = {n: v for n, v in pp[ip].items() if n != x}
                e2[x] = s
                newpart = [e2] + [e for k, e in enumerate(pp) if k != ip]
                return Derivation("&", t, newpart, (dp, dq)), newpart
            case hcp.Absurd(x):
                self._subject(ctx, x, ty.Top, t)
                env = dict(ctx)
                env[x] = TOP
                return Derivation("⊤", t, [env], ()), [env]
        raise TypeCheckError(KIND_DIALECT, f"not an HCP construct: {type(t).__name__}", loc=getattr(t, "loc", None))

    def _env_resolved_key(self, e: dict):
        out = []
        for n, s in e.items():
            v = self._resolved(s)
            out.append((n.uid, n.surface, ty.render(v) if v is not None else f"?{self.store.find(s)[0]}"))
        return tuple(sorted(out))


def check_hcp(t: hcp.HcpTerm, names: Env, *, allow_self_lock: bool = False,
              allow_hyper_with: bool = False) -> tuple[Derivation, HyperEnv]:
    """Check an HCP term against a flat name->type map; synthesizes the
    hyper-environment partition and returns it with the derivation."""
    if not isinstance(t, hcp.HcpTerm):
        raise TypeCheckError(KIND_DIALECT, "expected an HCP term", loc=getattr(t, "loc", None))
    checker = _HcpChecker(allow_self_lock=allow_self_lock, allow_hyper_with=allow_hyper_with)
    d, part = checker.go(t, dict(names))
    _finalize(d, checker.store)
    return d, d.env


def _finalize(d: Derivation, store: _Store) -> None:
    seen: set[int] = set()

    def fix_env(e: dict) -> None:
        if id(e) in seen:
            return
        seen.add(id(e))
        for n, s in list(e.items()):
            if isinstance(s, int):
                v = store.value(s)
                if v is None:
                    # a genuinely unconstrained endpoint pair: both polarity
                    # choices are consistent, pick the annotation itself
                    store.force(s, store.ann[s], n, None)
                    v = store.ann[s]
                if v not in (store.ann[s], dual(store.ann[s])):
                    raise TypeCheckError(
                        KIND_MISMATCH,
                        f"endpoint of {n} resolved to {ty.render(v)}, outside its restriction "
                        f"annotation {ty.render(store.ann[s])}",
                        name=n, expected=ty.render(store.ann[s]), actual=ty.render(v),
                    )
                e[n] = v

    def walk(d: Derivation) -> None:
        for e in d.env:
            fix_env(e)
        for c in d.premises:
            walk(c)

    walk(d)


# -- local revalidation -------------------------------------------------------


def revalidate(d: Derivation) -> bool:
    """Check that every node's conclusion follows from its premises by its rule."""
    try:
        _revalidate(d)
        return True
    except (AssertionError, TypeCheckError, KeyError, IndexError, ValueError, StopIteration):
        return False


def _without(e: Env, *names: Name) -> Env:
    return {n: v for n, v in e.items() if n not in names}


def _disjoint_union(e1: Env, e2: Env) -> Env:
    out = dict(e1)
    for n, v in e2.items():
        assert n not in out
        out[n] = v
    return out


def _revalidate(d: Derivation) -> None:
    for c in d.premises:
        _revalidate(c)
    if isinstance(d.env, dict):
        _revalidate_cp(d)
    else:
        _revalidate_hcp(d)


def _revalidate_cp(d: Derivation) -> None:
    t, env = d.term, d.env
    match d.rule:
        case "Ax":
            assert isinstance(t, cp.Link) and not d.premises
            assert set(env) == {t.x, t.y} and env[t.y] == dual(env[t.x])
        case "Cut":
            assert isinstance(t, cp.Cut) and len(d.premises) == 2
            d1, d2 = d.premises
            assert d1.term == t.left and d2.term == t.right
            assert d1.env.get(t.x) == t.ty and d2.env.get(t.x) == dual(t.ty)
            assert env_eq(env, _disjoint_union(_without(d1.env, t.x), _without(d2.env, t.x)))
        case "⊗":
            assert isinstance(t, cp.Send) and len(d.premises) == 2
            d1, d2 = d.premises
            assert d1.term == t.payload and d2.term == t.cont
            a, b = d1.env.get(t.y), d2.env.get(t.x)
            assert a is not None and b is not None
            assert env.get(t.x) == ty.Tensor(a, b)
            assert env_eq(_without(env, t.x), _disjoint_union(_without(d1.env, t.y), _without(d2.env, t.x)))
        case "⅋":
            assert isinstance(t, cp.Recv) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            a, b = d1.env.get(t.y), d1.env.get(t.x)
            assert a is not None and b is not None
            assert env.get(t.x) == ty.Par(a, b)
            assert env_eq(_without(env, t.x), _without(d1.env, t.y, t.x))
        case "1":
            assert isinstance(t, cp.Halt) and not d.premises
            assert env == {t.x: ONE}
        case "⊥":
            assert isinstance(t, cp.Wait) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            assert env.get(t.x) == BOT and t.x not in d1.env
            assert env_eq(_without(env, t.x), d1.env)
        case "⊕₁" | "⊕₂":
            assert isinstance(t, (cp.Inl, cp.Inr)) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            s = env.get(t.x)
            assert isinstance(s, ty.Plus)
            branch = s.left if d.rule == "⊕₁" else s.right
            assert d1.env.get(t.x) == branch
            assert env_eq(_without(env, t.x), _without(d1.env, t.x))
        case "&":
            assert isinstance(t, cp.Case) and len(d.premises) == 2
            d1, d2 = d.premises
            assert d1.term == t.left and d2.term == t.right
            s = env.get(t.x)
            assert isinstance(s, ty.With)
            assert d1.env.get(t.x) == s.left and d2.env.get(t.x) == s.right
            assert env_eq(_without(d1.env, t.x), _without(d2.env, t.x))
            assert env_eq(_without(env, t.x), _without(d1.env, t.x))
        case "⊤":
            assert isinstance(t, cp.Absurd) and not d.premises
            assert env.get(t.x) == TOP
        case _:
            raise ValueError(f"unknown CP rule {d.rule}")


def _one_env_with(part: HyperEnv, x: Name) -> list[int]:
    return [i for i, e in enumerate(part) if x in e]


def _revalidate_hcp(d: Derivation) -> None:
    t, part = d.term, d.env
    match d.rule:
        case "Ax":
            assert isinstance(t, hcp.Link) and not d.premises
            assert len(part) == 1 and set(part[0]) == {t.x, t.y}
            assert part[0][t.y] == dual(part[0][t.x])
        case "H-Mix₀":
            assert isinstance(t, hcp.Inert) and not d.premises
            assert part == []
        case "H-Mix":
            assert isinstance(t, hcp.Par) and len(d.premises) == 2
            d1, d2 = d.premises
            assert d1.term == t.left and d2.term == t.right
            assert hyper_eq(part, list(d1.env) + list(d2.env))
        case "H-Cut":
            assert isinstance(t, hcp.New) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            idxs = _one_env_with(d1.env, t.x)
            assert len(idxs) == 2
            i, j = idxs
            t1, t2 = d1.env[i][t.x], d1.env[j][t.x]
            assert t2 == dual(t1) and {ty.render(t1), ty.render(t2)} == {ty.render(t.ty), ty.render(dual(t.ty))}
            merged = _disjoint_union(_without(d1.env[i], t.x), _without(d1.env[j], t.x))
            rest = [e for k, e in enumerate(d1.env) if k not in (i, j)]
            assert hyper_eq(part, rest + [merged])
        case "⊗":
            assert isinstance(t, hcp.BoundOut) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            (iy,) = _one_env_with(d1.env, t.y)
            (ix,) = _one_env_with(d1.env, t.x)
            assert iy != ix
            a, b = d1.env[iy][t.y], d1.env[ix][t.x]
            merged = _disjoint_union(_without(d1.env[iy], t.y), _without(d1.env[ix], t.x))
            merged[t.x] = ty.Tensor(a, b)
            rest = [e for k, e in enumerate(d1.env) if k not in (iy, ix)]
            assert hyper_eq(part, rest + [merged])
        case "⅋":
            assert isinstance(t, hcp.In) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            (iy,) = _one_env_with(d1.env, t.y)
            idxs = _one_env_with(d1.env, t.x)
            assert idxs == [iy]
            a, b = d1.env[iy][t.y], d1.env[iy][t.x]
            e2 = _without(d1.env[iy], t.y, t.x)
            e2[t.x] = ty.Par(a, b)
            rest = [e for k, e in enumerate(d1.env) if k != iy]
            assert hyper_eq(part, rest + [e2])
        case "1":
            assert isinstance(t, hcp.OutUnit) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            assert not _one_env_with(d1.env, t.x)
            assert hyper_eq(part, list(d1.env) + [{t.x: ONE}])
        case "⊥":
            assert isinstance(t, hcp.InUnit) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            assert not _one_env_with(d1.env, t.x)
            idxs = _one_env_with(part, t.x)
            assert len(idxs) == 1
            i = idxs[0]
            assert part[i].get(t.x) == BOT
            rest = [e for k, e in enumerate(part) if k != i]
            assert hyper_eq(list(d1.env), rest + [_without(part[i], t.x)])
        case "⊕₁" | "⊕₂":
            assert isinstance(t, (hcp.Inl, hcp.Inr)) and len(d.premises) == 1
            (d1,) = d.premises
            assert d1.term == t.body
            (i,) = _one_env_with(d1.env, t.x)
            (ic,) = _one_env_with(part, t.x)
            s = part[ic][t.x]
            assert isinstance(s, ty.Plus)
            branch = s.left if d.rule == "⊕₁" else s.right
            assert d1.env[i][t.x] == branch
            e2 = dict(d1.env[i])
            e2[t.x] = s
            rest = [e for k, e in enumerate(d1.env) if k != i]
            assert hyper_eq(part, rest + [e2])
        case "&":
            assert isinstance(t, hcp.Case) and len(d.premises) == 2
            d1, d2 = d.premises
            assert d1.term == t.left and d2.term == t.right
            assert len(part) == 1 and len(d1.env) == 1 and len(d2.env) == 1
            s = part[0].get(t.x)
            assert isinstance(s, ty.With)
            assert d1.env[0].get(t.x) == s.left and d2.env[0].get(t.x) == s.right
            assert env_eq(_without(d1.env[0], t.x), _without(d2.env[0], t.x))
            assert env_eq(_without(part[0], t.x), _without(d1.env[0], t.x))
        case "⊤":
            assert isinstance(t, hcp.Absurd) and not d.premises
            assert len(part) == 1 and part[0].get(t.x) == TOP
        case _:
            raise ValueError(f"unknown HCP rule {d.rule}")


def render_derivation(d: Derivation, indent: int = 0) -> str:
    from . import surface

    pad = "  " * indent
    if isinstance(d.env, dict):
        envs = surface.print_env(d.env)
    else:
        envs = surface.print_hyper_env(d.env)
    lines = [f"{pad}{d.rule}: ⊢ {surface.print_term(d.term)} : {envs}"]
    for c in d.premises:
        lines.append(render_derivation(c, indent + 1))
    return "\n".join(lines)


def derivation_json_lines(d: Derivation) -> list[dict]:
    from . import surface

    out = []

    def walk(d, depth):
        if isinstance(d.env, dict):
            envs = surface.print_env(d.env)
        else:
            envs = surface.print_hyper_env(d.env)
        out.append({"rule": d.rule, "conclusion": f"⊢ {surface.print_term(d.term)} : {envs}",
                    "children": len(d.premises), "depth": depth})
        for c in d.premises:
            walk(c, depth + 1)

    walk(d, 0)
    return out
