"""Laws every theory must satisfy before a local model is built from it."""
from __future__ import annotations

import itertools

from ..lattice import complement
from .runner import AxiomCheck, Plan

CHECKS: list[AxiomCheck] = []


def check(check_id: str, statement: str):
    def deco(fn):
        CHECKS.append(AxiomCheck(check_id, statement, "theory", fn))
        return fn
    return deco


def _same_system(c, k: int, with_state: bool = False):
    """(count, enumerate, sample) over ``k`` operations on one system, plus a state if asked."""
    systems = c.systems

    def count():
        return sum(len(c.ops(a)) ** k * (len(c.states(a)) if with_state else 1) for a in systems)

    def gen():
        for a in systems:
            states = c.states(a) if with_state else [None]
            for combo in itertools.product(*([c.ops(a)] * k), states):
                yield combo if with_state else combo[:-1]

    def sample(rng):
        a = c.rand_system(rng)
        ops = tuple(c.rand_op(a, rng) for _ in range(k))
        return ops + ((c.rand_state(a, rng),) if with_state else ())

    if not c.exact:
        return None, None, sample
    return count(), gen, sample


def _pairs_plan(c, power: int, with_state: bool):
    """Operation tuples on an ordered pair of disjoint systems."""
    if not c.exact:
        return None, None
    fam = [f for f in c.families(2)]
    count = sum(c.op_count(f, power) * (len(c.states(c.union(f))) if with_state else 1) for f in fam)

    def gen():
        for a, b in fam:
            sts = c.states(a | b) if with_state else [None]
            for combo in itertools.product(*([c.ops(a)] * power + [c.ops(b)] * power), sts):
                yield combo if with_state else combo[:-1]
    return count, gen


@check("S4.2.lattice.boolean", "systems form a boolean lattice under union, intersection and complement")
def lattice_boolean(c):
    e, s = c.universe.empty, c.universe.full

    def pred(a, b, x):
        return all((
            a | b == b | a, a & b == b & a,
            (a | b) | x == a | (b | x), (a & b) & x == a & (b & x),
            a | (a & b) == a, a & (a | b) == a,
            a & (b | x) == (a & b) | (a & x), a | (b & x) == (a | b) & (a | x),
            a & ~a == e, a | ~a == s, ~~a == a,
            ~(a | b) == ~a & ~b, ~(a & b) == ~a | ~b,
            e <= a <= s, a & b <= a, a <= a | b,
            not (a <= b <= a) or a == b,
            not (a <= b <= x) or a <= x,
        ))

    n = len(c.systems)
    return Plan((("A", "system"), ("B", "system"), ("C", "system")), pred,
                lambda: itertools.product(c.systems, repeat=3), n**3,
                lambda rng: tuple(c.rand_system(rng) for _ in range(3)))


@check("S3.group.closure", "UV and U^-1 are operations of the same system")
def group_closure(c):
    t = c.theory
    count, gen, sample = _same_system(c, 2)
    return Plan((("U", "op"), ("V", "op")),
                lambda u, v: t.is_operation(t.compose(u, v)) and t.is_operation(t.inverse(u)),
                gen, count, sample)


@check("S3.group.associativity", "(UV)W = U(VW)")
def group_associativity(c):
    t = c.theory
    count, gen, sample = _same_system(c, 3)
    return Plan((("U", "op"), ("V", "op"), ("W", "op")),
                lambda u, v, w: c.op_res(t.compose(t.compose(u, v), w), t.compose(u, t.compose(v, w))),
                gen, count, sample)


@check("S3.group.identity", "IU = UI = U")
def group_identity(c):
    t = c.theory
    count, gen, sample = _same_system(c, 1)

    def pred(u):
        i = t.identity(u.system)
        return max(c.op_res(t.compose(i, u), u), c.op_res(t.compose(u, i), u))
    return Plan((("U", "op"),), pred, gen, count, sample)


@check("S3.group.inverse", "U U^-1 = U^-1 U = I")
def group_inverse(c):
    t = c.theory
    count, gen, sample = _same_system(c, 1)

    def pred(u):
        i, inv = t.identity(u.system), t.inverse(u)
        return max(c.op_res(t.compose(u, inv), i), c.op_res(t.compose(inv, u), i))
    return Plan((("U", "op"),), pred, gen, count, sample)


@check("S3.def1.action-composition", "(UV) acting on s equals U acting on V acting on s")
def action_composition(c):
    t = c.theory
    count, gen, sample = _same_system(c, 2, with_state=True)
    return Plan((("U", "op"), ("V", "op"), ("rho", "state")),
                lambda u, v, r: c.state_res(t.act(t.compose(u, v), r), t.act(u, t.act(v, r))),
                gen, count, sample)


@check("S3.def1.action-identity", "I acting on s leaves s unchanged")
def action_identity(c):
    t = c.theory
    count = sum(len(c.states(a)) for a in c.systems) if c.exact else None
    gen = (lambda: ((r,) for a in c.systems for r in c.states(a))) if c.exact else None

    def sample(rng):
        return (c.rand_state(c.rand_system(rng), rng),)
    return Plan((("rho", "state"),), lambda r: c.state_res(t.act(t.identity(r.system), r), r), gen, count, sample)


@check("S3.def2.faithful", "distinct operations act differently on some phenomenal state")
def faithful(c):
    t = c.theory
    count, gen, _ = _same_system(c, 2)

    def pred(u, v):
        if t.op_equal(u, v):
            return None
        return any(c.state_res(t.act(u, p), t.act(v, p)) > max(c.budget.tolerance, 1e-6) for p in c.probes(u.system))

    def sample(rng):
        a = c.rand_system(rng)
        u = c.rand_op(a, rng)
        v = t.alternate_representative(u, rng) if rng.random() < 0.5 else c.rand_op(a, rng)
        return u, v
    return Plan((("U", "op"), ("V", "op")), pred, gen, count, sample)


@check("S4.3.2.projector.composition", "pi_A o pi_B = pi_A whenever A <= B <= C")
def projector_composition(c):
    t = c.theory
    chains = c.chains(3)
    count = sum(len(c.states(ch[2])) for ch in chains) if c.exact else None
    gen = (lambda: ((a, b, r) for a, b, x in chains for r in c.states(x))) if c.exact else None

    def sample(rng):
        a, b, x = c.rand_chain(rng, 3)
        return a, b, c.rand_state(x, rng)
    return Plan((("A", "system"), ("B", "system"), ("rho", "state")),
                lambda a, b, r: c.state_res(t.project(t.project(r, b), a), t.project(r, a)),
                gen, count, sample)


@check("S4.3.2.projector.idempotent", "pi_A(rho^A) = rho^A and pi_A o pi_A = pi_A")
def projector_idempotent(c):
    t = c.theory
    chains = c.chains(2)
    count = sum(len(c.states(b)) for _, b in chains) if c.exact else None
    gen = (lambda: ((a, r) for a, b in chains for r in c.states(b))) if c.exact else None

    def sample(rng):
        a, b = c.rand_chain(rng, 2)
        return a, c.rand_state(b, rng)

    def pred(a, r):
        p = t.project(r, a)
        return max(c.state_res(t.project(p, a), p), c.state_res(t.project(r, r.system), r))
    return Plan((("A", "system"), ("rho", "state")), pred, gen, count, sample)


@check("S4.3.2.projector.surjective", "every state of A is the projection of a state of each B >= A")
def projector_surjective(c):
    t = c.theory
    chains = c.chains(2)

    def pred(a, b, sigma):
        if c.exact:
            key = ("image", a.mask, b.mask)
            if key not in c._cache:
                c._cache[key] = {t.state_key(t.project(r, a)) for r in c.states(b)}
            return t.state_key(sigma) in c._cache[key]
        return c.state_res(t.project(t.lift_state(sigma, b), a), sigma)

    count = sum(len(c.states(a)) for a, _ in chains) if c.exact else None
    gen = (lambda: ((a, b, s) for a, b in chains for s in c.states(a))) if c.exact else None

    def sample(rng):
        a, b = c.rand_chain(rng, 2)
        return a, b, c.rand_state(a, rng)
    return Plan((("A", "system"), ("B", "system"), ("sigma", "state")), pred, gen, count, sample)


@check("S5.req1.no-signalling", "pi_A((U x V) rho^AB) = U pi_A(rho^AB)")
def no_signalling(c):
    t = c.theory
    count, gen = _pairs_plan(c, 1, True)

    def pred(u, v, r):
        a = u.system
        return c.state_res(t.project(t.act(t.product(u, v), r), a), t.act(u, t.project(r, a)))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return c.rand_op(a, rng), c.rand_op(b, rng), c.rand_state(a | b, rng)
    return Plan((("U", "op"), ("V", "op"), ("rho", "state")), pred, gen, count, sample)


@check("S5.req2.associativity", "(U x V) x W = U x (V x W)")
def product_associativity(c):
    t = c.theory
    count, gen = c.family_ops(3) if c.exact else (None, None)

    def pred(u, v, w):
        return c.op_res(t.product(t.product(u, v), w), t.product(u, t.product(v, w)))

    def sample(rng):
        return tuple(c.rand_op(a, rng) for a in c.rand_family(rng, 3))
    return Plan((("U", "op"), ("V", "op"), ("W", "op")), pred,
                (lambda: (x[0] for x in gen())) if gen else None, count, sample)


@check("S5.req3.interchange", "(U2 x V2)(U1 x V1) = U2U1 x V2V1")
def interchange(c):
    t = c.theory
    count, gen = _pairs_plan(c, 2, True)

    def pred(u1, u2, v1, v2, r):
        lhs = t.compose(t.product(u2, v2), t.product(u1, v1))
        rhs = t.product(t.compose(u2, u1), t.compose(v2, v1))
        return max(c.op_res(lhs, rhs), c.state_res(t.act(lhs, r), t.act(rhs, r)))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return (c.rand_op(a, rng), c.rand_op(a, rng), c.rand_op(b, rng), c.rand_op(b, rng),
                c.rand_state(a | b, rng))
    return Plan((("U1", "op"), ("U2", "op"), ("V1", "op"), ("V2", "op"), ("rho", "state")),
                pred, gen, count, sample)


@check("S5.req4.identity", "I^A x I^B = I^AB")
def product_identity(c):
    t = c.theory
    fam = c.families(2)
    return Plan((("A", "system"), ("B", "system")),
                lambda a, b: c.op_res(t.product(t.identity(a), t.identity(b)), t.identity(a | b)),
                lambda: iter(fam), len(fam), lambda rng: c.rand_family(rng, 2))


@check("S5.req5.common-complement",
       "I^A x U^BC = I^B x V^AC implies both equal I^AB x W^C for some W^C")
def common_complement(c):
    t = c.theory
    fam = c.families(2)

    def pred(a, b, x):
        lhs = t.product(t.identity(a), x)
        v = t.factor_through_complement(lhs, b)
        if v is None:
            return None
        w = t.factor_through_complement(lhs, a | b)
        if w is None:
            return False
        return max(c.op_res(t.product(t.identity(a | b), w), lhs), c.op_res(t.product(t.identity(b), v), lhs))

    count = sum(len(c.ops(complement(a))) for a, _ in fam) if c.exact else None
    gen = (lambda: ((a, b, x) for a, b in fam for x in c.ops(complement(a)))) if c.exact else None

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        rest = complement(a | b)
        if rng.random() < 0.5:
            x = t.product(t.identity(b), c.rand_op(rest, rng))
        else:
            x = c.rand_op(complement(a), rng)
        return a, b, x
    return Plan((("A", "system"), ("B", "system"), ("X", "op")), pred, gen, count, sample)


@check("S5.req5.factor-soundness",
       "factor(W, A) returns V exactly when W = I^A x V, and I^A x V then rebuilds W")
def factor_soundness(c):
    t = c.theory
    S = c.universe.full

    def pred(a, v, w):
        built = t.product(t.identity(a), v)
        found = t.factor_through_complement(built, a)
        if found is None:
            return False
        res = c.op_res(t.product(t.identity(a), found), built)
        got = t.factor_through_complement(w, a)
        if got is not None:
            res = max(res, c.op_res(t.product(t.identity(a), got), w))
        if c.exact:
            key = ("H", a.mask)
            if key not in c._cache:
                c._cache[key] = {t.op_key(t.product(t.identity(a), y)) for y in c.ops(complement(a))}
            if (got is not None) != (t.op_key(w) in c._cache[key]):
                return False
        return res

    if c.exact:
        g = c.ops(S)
        count = sum(len(c.ops(complement(a))) for a in c.systems) * len(g)
        gen = lambda: ((a, v, w) for a in c.systems for v in c.ops(complement(a)) for w in g)
    else:
        count = gen = None

    def sample(rng):
        a = c.rand_system(rng)
        return a, c.rand_op(complement(a), rng), c.rand_op(S, rng)
    return Plan((("A", "system"), ("V", "op"), ("W", "op")), pred, gen, count, sample)


@check("S4.4.inverse", "(U x V)^-1 = U^-1 x V^-1")
def product_inverse(c):
    t = c.theory
    count, gen = _pairs_plan(c, 1, False)

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return c.rand_op(a, rng), c.rand_op(b, rng)
    return Plan((("U", "op"), ("V", "op")),
                lambda u, v: c.op_res(t.inverse(t.product(u, v)), t.product(t.inverse(u), t.inverse(v))),
                gen, count, sample)


@check("S4.4.generalized-interchange", "(prod U_i)(prod V_i) = prod (U_i V_i) over mutually disjoint systems")
def generalized_interchange(c):
    t = c.theory
    count, gen = c.family_ops(3, power=2) if c.exact else (None, None)

    def pred(us, vs):
        lhs = t.compose(t.product_all(us), t.product_all(vs))
        return c.op_res(lhs, t.product_all(t.compose(u, v) for u, v in zip(us, vs)))

    def sample(rng):
        fam = c.rand_family(rng, 3)
        return tuple(c.rand_op(a, rng) for a in fam), tuple(c.rand_op(a, rng) for a in fam)
    return Plan((("U", "ops"), ("V", "ops")), pred, gen, count, sample)


@check("S4.4.generalized-identity", "prod I^A_i = I^X for X the union of the parts")
def generalized_identity(c):
    t = c.theory
    fam = c.families(3)
    return Plan((("parts", "systems"),),
                lambda parts: c.op_res(t.product_all(t.identity(a) for a in parts), t.identity(c.union(parts))),
                lambda: ((f,) for f in fam), len(fam), lambda rng: (c.rand_family(rng, 3),))


@check("S4.4.generalized-inverse", "(prod U_i)^-1 = prod U_i^-1")
def generalized_inverse(c):
    t = c.theory
    count, gen = c.family_ops(3) if c.exact else (None, None)
    return Plan((("U", "ops"),),
                lambda us: c.op_res(t.inverse(t.product_all(us)), t.product_all(t.inverse(u) for u in us)),
                gen, count, lambda rng: (tuple(c.rand_op(a, rng) for a in c.rand_family(rng, 3)),))


@check("S4.5.nsp.remote-operation", "pi_A((I^A x V) rho^AB) = pi_A(rho^AB)")
def nsp_remote(c):
    t = c.theory
    if c.exact:
        fam = c.families(2)
        count = sum(len(c.ops(b)) * len(c.states(a | b)) for a, b in fam)
        gen = lambda: ((a, v, r) for a, b in fam for v in c.ops(b) for r in c.states(a | b))
    else:
        count = gen = None

    def pred(a, v, r):
        return c.state_res(t.project(t.act(t.product(c.I(a), v), r), a), t.project(r, a))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return a, c.rand_op(b, rng), c.rand_state(a | b, rng)
    return Plan((("A", "system"), ("V", "op"), ("rho", "state")), pred, gen, count, sample)


def _nsp_generalized(c, us, r):
    t = c.theory
    after = t.act(t.product_all(us), r)
    return max(c.state_res(t.project(after, u.system), t.act(u, t.project(r, u.system))) for u in us)


@check("S4.5.nsp.generalized", "pi_B((prod U^A) rho^X) = U^B pi_B(rho^X) for each part B")
def nsp_generalized(c):
    count, gen = c.family_ops(3, with_state=True) if c.exact else (None, None)

    def sample(rng):
        fam = c.rand_family(rng, 3)
        return tuple(c.rand_op(a, rng) for a in fam), c.rand_state(c.union(fam), rng)
    return Plan((("U", "ops"), ("rho", "state")), lambda us, r: _nsp_generalized(c, us, r), gen, count, sample)


def generalized_nsp_plan(c, parts) -> Plan:
    """The generalized no-signalling law for one fixed family of disjoint parts."""
    x = c.union(parts)
    if c.exact:
        count = c.op_count(parts) * len(c.states(x))
        gen = lambda: itertools.product(c.op_tuples(parts), c.states(x))
    else:
        count = gen = None

    def sample(rng):
        return tuple(c.rand_op(a, rng) for a in parts), c.rand_state(x, rng)
    return Plan((("U", "ops"), ("rho", "state")), lambda us, r: _nsp_generalized(c, us, r), gen, count, sample)
