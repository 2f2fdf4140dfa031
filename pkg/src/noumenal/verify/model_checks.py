"""Laws of the constructed local-realistic model.

For finite theories the domains are enumerated outright.  For quantum
theories the premises (``W ~_A W'`` and friends) almost never hold for
independent random draws, so the samplers build instances in which they
hold by construction, e.g. ``W' = (I^A x V) W``.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import IncompatibleClassesError
from ..lattice import complement
from .runner import AxiomCheck, Plan

CHECKS: list[AxiomCheck] = []

QUANTUM_COMPAT_SKIP = ("underlying universal states are found by search over the global group, "
                       "which is only possible for finite theories")


def check(check_id: str, statement: str):
    def deco(fn):
        CHECKS.append(AxiomCheck(check_id, statement, "model", fn))
        return fn
    return deco


def _pick(rng, premise_true, anything):
    return premise_true() if rng.random() < 0.75 else anything()


def _sysops(c):
    return [(a, u) for a in c.systems for u in c.ops(a)]


# -- the equivalence relation --------------------------------------------------

@check("S6.equiv.reflexive", "W ~_A W")
def equiv_reflexive(c):
    m = c.model
    gen = (lambda: itertools.product(c.systems, c.G)) if c.exact else None
    return Plan((("A", "system"), ("W", "op")), lambda a, w: m.equivalent(w, w, a), gen,
                len(c.systems) * len(c.G) if c.exact else None,
                lambda rng: (c.rand_system(rng), c.rand_op(c.S, rng)))


@check("S6.equiv.symmetric", "W ~_A W' implies W' ~_A W")
def equiv_symmetric(c):
    m = c.model

    def pred(a, w, w2):
        return m.equivalent(w2, w, a) if m.equivalent(w, w2, a) else None

    def sample(rng):
        a, w = c.rand_system(rng), c.rand_op(c.S, rng)
        w2 = _pick(rng, lambda: c.theory.compose(c.stab(a, rng), w), lambda: c.rand_op(c.S, rng))
        return a, w, w2
    gen = (lambda: itertools.product(c.systems, c.G, c.G)) if c.exact else None
    return Plan((("A", "system"), ("W", "op"), ("W2", "op")), pred, gen,
                len(c.systems) * len(c.G) ** 2 if c.exact else None, sample)


@check("S6.equiv.transitive", "W ~_A W' and W' ~_A W'' imply W ~_A W''")
def equiv_transitive(c):
    m, t = c.model, c.theory

    def pred(a, w, w2, w3):
        if not (m.equivalent(w, w2, a) and m.equivalent(w2, w3, a)):
            return None
        return m.equivalent(w, w3, a)

    def sample(rng):
        a, w = c.rand_system(rng), c.rand_op(c.S, rng)
        w2 = t.compose(c.stab(a, rng), w)
        return a, w, w2, t.compose(c.stab(a, rng), w2)
    gen = (lambda: itertools.product(c.systems, c.G, c.G, c.G)) if c.exact else None
    return Plan((("A", "system"), ("W", "op"), ("W2", "op"), ("W3", "op")), pred, gen,
                len(c.systems) * len(c.G) ** 3 if c.exact else None, sample)


# -- projectors ----------------------------------------------------------------

@check("S6.projector.well-defined", "W ~_B W' implies W ~_A W' for A <= B")
def projector_well_defined(c):
    m, t = c.model, c.theory
    chains = c.chains(2)

    def pred(a, b, w, w2):
        return m.equivalent(w, w2, a) if m.equivalent(w, w2, b) else None

    def sample(rng):
        a, b = c.rand_chain(rng, 2)
        w = c.rand_op(c.S, rng)
        return a, b, w, t.compose(c.stab(b, rng), w)
    gen = (lambda: ((a, b, w, w2) for a, b in chains for w in c.G for w2 in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("W", "op"), ("W2", "op")), pred, gen,
                len(chains) * len(c.G) ** 2 if c.exact else None, sample)


@check("S6.projector.composition", "pi_A(pi_B([W]^C)) = pi_A([W]^C) for A <= B <= C")
def projector_composition(c):
    m = c.model
    chains = c.chains(3)

    def pred(a, b, n):
        return c.class_res(m.project(m.project(n, b), a), m.project(n, a))

    def sample(rng):
        a, b, x = c.rand_chain(rng, 3)
        return a, b, c.cls(c.rand_op(c.S, rng), x)
    gen = (lambda: ((a, b, c.cls(w, x)) for a, b, x in chains for w in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("N", "class")), pred, gen,
                len(chains) * len(c.G) if c.exact else None, sample)


@check("S6.projector.surjective", "[W]^A is the projection of [W]^B for every B >= A")
def projector_surjective(c):
    m = c.model
    chains = c.chains(2)

    def pred(a, b, w):
        return c.class_res(m.project(c.cls(w, b), a), c.cls(w, a))

    def sample(rng):
        a, b = c.rand_chain(rng, 2)
        return a, b, c.rand_op(c.S, rng)
    gen = (lambda: ((a, b, w) for a, b in chains for w in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("W", "op")), pred, gen,
                len(chains) * len(c.G) if c.exact else None, sample)


# -- the noumenal action ---------------------------------------------------------

@check("S6.action.well-defined", "W ~_A W' implies U([W]^A) = U([W']^A)")
def action_well_defined(c):
    m, t = c.model, c.theory

    def pred(u, w, w2):
        a = u.system
        if not m.equivalent(w, w2, a):
            return None
        return c.class_res(m.act(u, c.cls(w, a)), m.act(u, c.cls(w2, a)))

    def sample(rng):
        a = c.rand_system(rng)
        w = c.rand_op(c.S, rng)
        return c.rand_op(a, rng), w, t.compose(c.stab(a, rng), w)
    if c.exact:
        so = _sysops(c)
        gen = lambda: ((u, w, w2) for _, u in so for w in c.G for w2 in c.G)
        count = len(so) * len(c.G) ** 2
    else:
        gen = count = None
    return Plan((("U", "op"), ("W", "op"), ("W2", "op")), pred, gen, count, sample)


@check("S6.action.composition", "(VU)([W]^A) = V(U([W]^A))")
def noumenal_action_composition(c):
    m, t = c.model, c.theory

    def pred(u, v, w):
        n = c.cls(w, u.system)
        return c.class_res(m.act(t.compose(v, u), n), m.act(v, m.act(u, n)))

    def sample(rng):
        a = c.rand_system(rng)
        return c.rand_op(a, rng), c.rand_op(a, rng), c.rand_op(c.S, rng)
    if c.exact:
        count = sum(len(c.ops(a)) ** 2 for a in c.systems) * len(c.G)
        gen = lambda: ((u, v, w) for a in c.systems for u in c.ops(a) for v in c.ops(a) for w in c.G)
    else:
        gen = count = None
    return Plan((("U", "op"), ("V", "op"), ("W", "op")), pred, gen, count, sample)


@check("S6.action.identity", "I^A([W]^A) = [W]^A")
def noumenal_action_identity(c):
    m = c.model

    def pred(a, w):
        n = c.cls(w, a)
        return c.class_res(m.act(c.I(a), n), n)
    gen = (lambda: itertools.product(c.systems, c.G)) if c.exact else None
    return Plan((("A", "system"), ("W", "op")), pred, gen, len(c.systems) * len(c.G) if c.exact else None,
                lambda rng: (c.rand_system(rng), c.rand_op(c.S, rng)))


@check("S6.action.locality", "U([W]^A) = [(U x V) W]^A for every V on the complement of A")
def action_locality(c):
    m, t = c.model, c.theory

    def pred(u, v, w):
        a = u.system
        return c.class_res(m.act(u, c.cls(w, a)), c.cls(t.compose(t.product(u, v), w), a))

    def sample(rng):
        a = c.rand_system(rng)
        return c.rand_op(a, rng), c.rand_op(complement(a), rng), c.rand_op(c.S, rng)
    if c.exact:
        count = sum(len(c.ops(a)) * len(c.ops(complement(a))) for a in c.systems) * len(c.G)
        gen = lambda: ((u, v, w) for a in c.systems for u in c.ops(a)
                       for v in c.ops(complement(a)) for w in c.G)
    else:
        gen = count = None
    return Plan((("U", "op"), ("V", "op"), ("W", "op")), pred, gen, count, sample)


@check("S3.thm1.noumenal-faithful", "distinct operations act differently on some noumenal state")
def noumenal_faithful(c):
    m, t = c.model, c.theory

    def probes(a):
        if c.exact:
            return m.noumenal_space(a)
        key = ("nprobes", a.mask)
        if key not in c._cache:
            rng = np.random.default_rng([c.budget.seed, a.mask, 11])
            c._cache[key] = [c.cls(c.I(c.S), a)] + [c.cls(c.rand_op(c.S, rng), a) for _ in range(2)]
        return c._cache[key]

    def pred(u, v):
        if t.op_equal(u, v):
            return None
        tol = max(c.budget.tolerance, 1e-6)
        return any(c.class_res(m.act(u, n), m.act(v, n)) > tol for n in probes(u.system))

    def sample(rng):
        a = c.rand_system(rng)
        u = c.rand_op(a, rng)
        return u, (t.alternate_representative(u, rng) if rng.random() < 0.5 else c.rand_op(a, rng))
    if c.exact:
        count = sum(len(c.ops(a)) ** 2 for a in c.systems)
        gen = lambda: ((u, v) for a in c.systems for u in c.ops(a) for v in c.ops(a))
    else:
        gen = count = None
    return Plan((("U", "op"), ("V", "op")), pred, gen, count, sample)


# -- the join product ------------------------------------------------------------

@check("S6.join.well-defined", "W ~_A W' and W ~_B W' imply W ~_AB W' for disjoint A, B")
def join_well_defined(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(a, b, w, w2):
        if not (m.equivalent(w, w2, a) and m.equivalent(w, w2, b)):
            return None
        return m.equivalent(w, w2, a | b)

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        return a, b, w, _pick(rng, lambda: t.compose(c.stab(a | b, rng), w), lambda: c.rand_op(c.S, rng))
    gen = (lambda: ((a, b, w, w2) for a, b in fam for w in c.G for w2 in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("W", "op"), ("W2", "op")), pred, gen,
                len(fam) * len(c.G) ** 2 if c.exact else None, sample)


@check("S6.join.representative-independence", "[W1]^A . [W2]^B = [W]^AB whenever W1 ~_A W and W2 ~_B W")
def join_representatives(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(a, b, w, w1, w2):
        if not (m.equivalent(w1, w, a) and m.equivalent(w2, w, b)):
            return None
        return c.class_res(m.join(c.cls(w1, a), c.cls(w2, b)), c.cls(w, a | b))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        return a, b, w, t.compose(c.stab(a, rng, local=True), w), t.compose(c.stab(b, rng, local=True), w)
    if c.exact:
        count = sum(len(m.stabilizer(a)) * len(m.stabilizer(b)) for a, b in fam) * len(c.G)
        gen = lambda: ((a, b, w, w1, w2) for a, b in fam for w in c.G
                       for w1 in c.coset(w, a) for w2 in c.coset(w, b))
    else:
        gen = count = None
    return Plan((("A", "system"), ("B", "system"), ("W", "op"), ("W1", "op"), ("W2", "op")),
                pred, gen, count, sample)


@check("S4.3.7.join.split-merge", "pi_A(N^AB) . pi_B(N^AB) = N^AB")
def join_split_merge(c):
    m = c.model
    fam = c.families(2)

    def pred(a, b, w):
        n = c.cls(w, a | b)
        return c.class_res(m.join(m.project(n, a), m.project(n, b)), n)

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return a, b, c.rand_op(c.S, rng)
    gen = (lambda: ((a, b, w) for a, b in fam for w in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("W", "op")), pred, gen,
                len(fam) * len(c.G) if c.exact else None, sample)


def _try_join(m, n1, n2):
    try:
        return m.join(n1, n2)
    except IncompatibleClassesError:
        return None


@check("S4.3.7.join.projections", "pi_A(N^A . N^B) = N^A and pi_B(N^A . N^B) = N^B")
def join_projections(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(n1, n2):
        j = _try_join(m, n1, n2)
        if j is None:
            return None
        return max(c.class_res(m.project(j, n1.system), n1), c.class_res(m.project(j, n2.system), n2))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        if rng.random() < 0.75:
            return (c.cls(t.compose(c.stab(a, rng, local=True), w), a),
                    c.cls(t.compose(c.stab(b, rng, local=True), w), b))
        return c.cls(w, a), c.cls(c.rand_op(c.S, rng), b)
    gen = (lambda: ((c.cls(w1, a), c.cls(w2, b)) for a, b in fam for w1 in c.G for w2 in c.G)) if c.exact else None
    return Plan((("NA", "class"), ("NB", "class")), pred, gen,
                len(fam) * len(c.G) ** 2 if c.exact else None, sample)


@check("S4.3.7.join.unique-decomposition", "N1^A . N1^B = N2^A . N2^B implies N1^A = N2^A and N1^B = N2^B")
def join_unique_decomposition(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(n1a, n1b, n2a, n2b):
        j1, j2 = _try_join(m, n1a, n1b), _try_join(m, n2a, n2b)
        if j1 is None or j2 is None or c.class_res(j1, j2) > c.budget.tolerance:
            return None
        return max(c.class_res(n1a, n2a), c.class_res(n1b, n2b))

    def compatible_pairs(a, b):
        key = ("pairs", a.mask, b.mask)
        if key not in c._cache:
            c._cache[key] = [(x, y) for x in m.noumenal_space(a) for y in m.noumenal_space(b)
                             if _try_join(m, x, y) is not None]
        return c._cache[key]

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        w2 = _pick(rng, lambda: t.compose(c.stab(a | b, rng, local=True), w), lambda: c.rand_op(c.S, rng))
        return (c.cls(c.other_rep(w, a, rng), a), c.cls(w, b), c.cls(w2, a), c.cls(c.other_rep(w2, b, rng), b))
    if c.exact:
        count = sum(len(compatible_pairs(a, b)) ** 2 for a, b in fam)
        gen = lambda: (p + q for a, b in fam for p in compatible_pairs(a, b) for q in compatible_pairs(a, b))
    else:
        gen = count = None
    return Plan((("N1A", "class"), ("N1B", "class"), ("N2A", "class"), ("N2B", "class")),
                pred, gen, count, sample)


@check("S4.3.7.join.associativity", "(N^A . N^B) . N^C = N^A . (N^B . N^C)")
def join_associativity(c):
    m = c.model
    fam = c.families(3)

    def pred(a, b, x, w):
        # fixed per-family generator so a shrunk witness replays the same representatives
        rng = np.random.default_rng([c.budget.seed, a.mask, b.mask, x.mask])
        na, nb, nx = (c.cls(c.other_rep(w, s, rng), s) for s in (a, b, x))
        lhs = m.join(m.join(na, nb), nx)
        rhs = m.join(na, m.join(nb, nx))
        return max(c.class_res(lhs, rhs), c.class_res(lhs, c.cls(w, a | b | x)))

    def sample(rng):
        a, b, x = c.rand_family(rng, 3)
        return a, b, x, c.rand_op(c.S, rng)
    gen = (lambda: ((a, b, x, w) for a, b, x in fam for w in c.G)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("C", "system"), ("W", "op")), pred, gen,
                len(fam) * len(c.G) if c.exact else None, sample)


@check("S4.3.7.join.generalized",
       "the generalized join of pi_A([W]^X) over a disjoint family is [W]^X, and projects onto every B <= X")
def join_generalized(c):
    m = c.model
    fam = c.families(3)

    def pred(parts, w):
        x = c.union(parts)
        j = m.join_all([c.cls(w, a) for a in parts])
        res = c.class_res(j, c.cls(w, x))
        for b in x.subsystems():
            res = max(res, c.class_res(m.project(j, b), c.cls(w, b)))
        return res
    gen = (lambda: ((f, w) for f in fam for w in c.G)) if c.exact else None
    return Plan((("parts", "systems"), ("W", "op")), pred, gen, len(fam) * len(c.G) if c.exact else None,
                lambda rng: (c.rand_family(rng, 3), c.rand_op(c.S, rng)))


@check("S4.3.7.join.compatibility-soundness",
       "the join is defined exactly when a common global representative exists")
def join_compatibility(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(n1, n2):
        j = _try_join(m, n1, n2)
        if j is not None:
            ok = m.equivalent(j.representative, n1.representative, n1.system) and \
                m.equivalent(j.representative, n2.representative, n2.system)
            if not ok:
                return False
        if c.exact:
            exists = any(m.equivalent(w, n1.representative, n1.system)
                         and m.equivalent(w, n2.representative, n2.system) for w in c.G)
            return exists == (j is not None)
        return j is not None or None

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        return (c.cls(t.compose(c.stab(a, rng, local=True), w), a),
                c.cls(t.compose(c.stab(b, rng, local=True), w), b))
    gen = (lambda: ((c.cls(w1, a), c.cls(w2, b)) for a, b in fam for w1 in c.G for w2 in c.G)) if c.exact else None
    return Plan((("NA", "class"), ("NB", "class")), pred, gen,
                len(fam) * len(c.G) ** 2 if c.exact else None, sample)


# -- product action on joins and noumenal locality ---------------------------------

def _two_op_domain(c):
    fam = c.families(2)
    count = sum(len(c.ops(a)) * len(c.ops(b)) for a, b in fam) * len(c.G)
    gen = lambda: ((u, v, w) for a, b in fam for u in c.ops(a) for v in c.ops(b) for w in c.G)
    return count, gen


@check("S6.main", "(U x V)([W]^A . [W]^B) = U([W]^A) . V([W]^B)")
def product_action_respects_join(c):
    m, t = c.model, c.theory

    def pred(u, v, na, nb):
        lhs = m.act(t.product(u, v), m.join(na, nb))
        rhs = m.join(m.act(u, na), m.act(v, nb))
        return c.class_res(lhs, rhs)

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        w = c.rand_op(c.S, rng)
        return (c.rand_op(a, rng), c.rand_op(b, rng),
                c.cls(c.other_rep(w, a, rng), a), c.cls(c.other_rep(w, b, rng), b))
    if c.exact:
        count, base = _two_op_domain(c)
        gen = lambda: ((u, v, c.cls(c.other_rep(w, u.system), u.system), c.cls(w, v.system))
                       for u, v, w in base())
    else:
        count = gen = None
    return Plan((("U", "op"), ("V", "op"), ("NA", "class"), ("NB", "class")), pred, gen, count, sample)


@check("S4.4.eq-pt", "pi_A((U x V) N^AB) = U(pi_A(N^AB))")
def product_on_classes(c):
    m, t = c.model, c.theory

    def pred(u, v, w):
        n = c.cls(w, u.system | v.system)
        return c.class_res(m.project(m.act(t.product(u, v), n), u.system), m.act(u, m.project(n, u.system)))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return c.rand_op(a, rng), c.rand_op(b, rng), c.rand_op(c.S, rng)
    count, gen = _two_op_domain(c) if c.exact else (None, None)
    return Plan((("U", "op"), ("V", "op"), ("W", "op")), pred, gen, count, sample)


@check("S6.noumenal.no-signalling", "[(U x I) W]^B = [W]^B for U on A and B disjoint from A")
def noumenal_no_signalling(c):
    m, t = c.model, c.theory

    def pred(u, b, w):
        if not (u.system & b).is_empty:
            return None
        return c.class_res(c.cls(t.compose(m.pad(u), w), b), c.cls(w, b))

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        return c.rand_op(a, rng), b, c.rand_op(c.S, rng)
    if c.exact:
        so = _sysops(c)
        count = len(so) * len(c.systems) * len(c.G)
        gen = lambda: ((u, b, w) for _, u in so for b in c.systems for w in c.G)
    else:
        gen = count = None
    return Plan((("U", "op"), ("B", "system"), ("W", "op")), pred, gen, count, sample)


# -- the homomorphisms phi_rho ------------------------------------------------------

@check("S6.phi.representative-independence", "W ~_A W' implies phi_rho([W]^A) = phi_rho([W']^A)")
def phi_independence(c):
    m, t = c.model, c.theory

    def pred(a, w, w2, rho):
        if not m.equivalent(w, w2, a):
            return None
        return c.state_res(m.phi(rho, c.cls(w, a)), m.phi(rho, c.cls(w2, a)))

    def sample(rng):
        a = c.rand_system(rng)
        w = c.rand_op(c.S, rng)
        return a, w, t.compose(c.stab(a, rng), w), c.rand_state(c.S, rng)
    gen = (lambda: itertools.product(c.systems, c.G, c.G, c.global_states())) if c.exact else None
    count = len(c.systems) * len(c.G) ** 2 * len(c.global_states()) if c.exact else None
    return Plan((("A", "system"), ("W", "op"), ("W2", "op"), ("rho", "state")), pred, gen, count, sample)


@check("S6.phi.action-homomorphism", "phi_rho(U([W]^A)) = U(phi_rho([W]^A))")
def phi_homomorphism(c):
    m, t = c.model, c.theory

    def pred(u, w, rho):
        n = c.cls(w, u.system)
        return c.state_res(m.phi(rho, m.act(u, n)), t.act(u, m.phi(rho, n)))

    def sample(rng):
        a = c.rand_system(rng)
        return c.rand_op(a, rng), c.rand_op(c.S, rng), c.rand_state(c.S, rng)
    if c.exact:
        so = _sysops(c)
        count = len(so) * len(c.G) * len(c.global_states())
        gen = lambda: ((u, w, r) for _, u in so for w in c.G for r in c.global_states())
    else:
        gen = count = None
    return Plan((("U", "op"), ("W", "op"), ("rho", "state")), pred, gen, count, sample)


@check("S4.3.3.projector-commutation", "phi_rho(pi_A(N^B)) = pi_A(phi_rho(N^B)) for A <= B")
def projector_commutation(c):
    m, t = c.model, c.theory
    chains = c.chains(2)

    def pred(a, n, rho):
        return c.state_res(m.phi(rho, m.project(n, a)), t.project(m.phi(rho, n), a))

    def sample(rng):
        a, b = c.rand_chain(rng, 2)
        return a, c.cls(c.rand_op(c.S, rng), b), c.rand_state(c.S, rng)
    if c.exact:
        count = len(chains) * len(c.G) * len(c.global_states())
        gen = lambda: ((a, c.cls(w, b), r) for a, b in chains for w in c.G for r in c.global_states())
    else:
        gen = count = None
    return Plan((("A", "system"), ("N", "class"), ("rho", "state")), pred, gen, count, sample)


@check("S4.3.4.consistent-family", "phi_rho([W]^A) = pi_A(phi_rho([W]^S)) for every system A")
def consistent_family(c):
    m, t = c.model, c.theory

    def pred(a, w, rho):
        return c.state_res(m.phi(rho, c.cls(w, a)), t.project(m.phi(rho, c.cls(w, c.S)), a))

    def sample(rng):
        return c.rand_system(rng), c.rand_op(c.S, rng), c.rand_state(c.S, rng)
    gen = (lambda: itertools.product(c.systems, c.G, c.global_states())) if c.exact else None
    count = len(c.systems) * len(c.G) * len(c.global_states()) if c.exact else None
    return Plan((("A", "system"), ("W", "op"), ("rho", "state")), pred, gen, count, sample)


@check("S6.phi.surjective-coverage", "phi_rho([I]^S) = rho for every global state rho")
def phi_coverage(c):
    m = c.model
    gen = (lambda: ((r,) for r in c.global_states())) if c.exact else None
    return Plan((("rho", "state"),), lambda r: c.state_res(m.phi(r, c.cls(c.I(c.S), c.S)), r), gen,
                len(c.global_states()) if c.exact else None, lambda rng: (c.rand_state(c.S, rng),),
                tolerance=min(c.budget.tolerance, 1e-12))


# -- augmented states --------------------------------------------------------------

@check("S4.6.augmented.join",
       "pi'_A(N, rho) .' pi'_B(N, rho) = (N, rho), and references must agree for the join")
def augmented_join(c):
    m, t = c.model, c.theory
    fam = c.families(2)

    def pred(a, b, w, rho, rho2):
        s = c.aug(c.cls(w, a | b), rho)
        j = m.join_augmented(m.project_augmented(s, a), m.project_augmented(s, b))
        res = max(c.class_res(j.cls, s.cls), c.state_res(j.reference, rho))
        if not t.states_equal(rho, rho2):
            try:
                m.join_augmented(m.project_augmented(s, a), c.aug(m.project(s.cls, b), rho2))
                return False
            except IncompatibleClassesError:
                pass
        return res

    def sample(rng):
        a, b = c.rand_family(rng, 2)
        rho = c.rand_state(c.S, rng)
        return a, b, c.rand_op(c.S, rng), rho, (rho if rng.random() < 0.25 else c.rand_state(c.S, rng))
    gs = c.global_states() if c.exact else None
    gen = (lambda: ((a, b, w, r, r2) for a, b in fam for w in c.G for r in gs for r2 in gs)) if c.exact else None
    return Plan((("A", "system"), ("B", "system"), ("W", "op"), ("rho", "state"), ("rho2", "state")),
                pred, gen, len(fam) * len(c.G) * len(gs) ** 2 if c.exact else None, sample)


@check("S4.6.augmented.surjective", "every state of every system is phi' of some augmented noumenal state")
def augmented_surjective(c):
    m, t = c.model, c.theory

    def pred(sigma):
        a = sigma.system
        s = c.aug(c.cls(c.I(c.S), a), t.lift_state(sigma, c.S))
        return c.state_res(m.phi_prime(s), sigma)
    gen = (lambda: ((s,) for a in c.systems for s in c.states(a))) if c.exact else None
    count = sum(len(c.states(a)) for a in c.systems) if c.exact else None
    return Plan((("sigma", "state"),), pred, gen, count,
                lambda rng: (c.rand_state(c.rand_system(rng), rng),))


# -- compatibility, decided by search for an underlying universal state ---------------

def _compat_guard(c):
    return None if c.exact else QUANTUM_COMPAT_SKIP


@check("S4.3.6.compat.noumenal-pair", "for A <= B, N^A and N^B are compatible iff N^A = pi_A(N^B)")
def compat_noumenal(c):
    if _compat_guard(c):
        return _compat_guard(c)
    m = c.model
    chains = c.chains(2)

    def pred(na, nb):
        compatible = any(c.cls(w, na.system) == na and c.cls(w, nb.system) == nb for w in c.G)
        return compatible == (m.project(nb, na.system) == na)
    count = sum(len(m.noumenal_space(a)) * len(m.noumenal_space(b)) for a, b in chains)
    gen = lambda: ((x, y) for a, b in chains for x in m.noumenal_space(a) for y in m.noumenal_space(b))
    return Plan((("NA", "class"), ("NB", "class")), pred, gen, count)


@check("S4.3.6.compat.phenomenal-pair", "for A <= B, rho^A and rho^B are compatible iff rho^A = pi_A(rho^B)")
def compat_phenomenal(c):
    if _compat_guard(c):
        return _compat_guard(c)
    m, t = c.model, c.theory
    chains = c.chains(2)
    images = [m.phi_prime(c.aug(c.cls(w, c.S), r)) for w in c.G for r in c.global_states()]

    def pred(sa, sb):
        compatible = any(t.states_equal(t.project(x, sa.system), sa) and t.states_equal(t.project(x, sb.system), sb)
                         for x in images)
        return compatible == t.states_equal(t.project(sb, sa.system), sa)
    count = sum(len(c.states(a)) * len(c.states(b)) for a, b in chains)
    gen = lambda: ((x, y) for a, b in chains for x in c.states(a) for y in c.states(b))
    return Plan((("rhoA", "state"), ("rhoB", "state")), pred, gen, count)


def _mixed_compatible(c, sigma, n, rho):
    """Is there an underlying (W, rho) projecting to (n, rho) whose image projects to sigma?"""
    m, t = c.model, c.theory
    return any(c.cls(w, n.system) == n and t.states_equal(t.project(m.phi(rho, c.cls(w, c.S)), sigma.system), sigma)
               for w in c.G)


@check("S4.3.6.compat.mixed",
       "for A <= B, rho^A and (N^B, rho) are compatible iff rho^A = pi_A(phi'(N^B, rho))")
def compat_mixed(c):
    if _compat_guard(c):
        return _compat_guard(c)
    m, t = c.model, c.theory
    chains = [ch for ch in c.chains(2) if ch[0] != ch[1]]

    def pred(sigma, n, rho):
        expected = t.states_equal(sigma, t.project(m.phi_prime(c.aug(n, rho)), sigma.system))
        return _mixed_compatible(c, sigma, n, rho) == expected
    gs = c.global_states()
    count = sum(len(c.states(a)) * len(m.noumenal_space(b)) for a, b in chains) * len(gs)
    gen = lambda: ((s, n, r) for a, b in chains for s in c.states(a) for n in m.noumenal_space(b) for r in gs)
    return Plan((("sigma", "state"), ("N", "class"), ("rho", "state")), pred, gen, count)


@check("S4.3.6.compat.corollary", "rho^A and (N^A, rho) are compatible iff rho^A = phi'(N^A, rho)")
def compat_corollary(c):
    if _compat_guard(c):
        return _compat_guard(c)
    m, t = c.model, c.theory

    def pred(sigma, n, rho):
        expected = t.states_equal(sigma, m.phi_prime(c.aug(n, rho)))
        return _mixed_compatible(c, sigma, n, rho) == expected
    gs = c.global_states()
    count = sum(len(c.states(a)) * len(m.noumenal_space(a)) for a in c.systems) * len(gs)
    gen = lambda: ((s, n, r) for a in c.systems for s in c.states(a) for n in m.noumenal_space(a) for r in gs)
    return Plan((("sigma", "state"), ("N", "class"), ("rho", "state")), pred, gen, count)
