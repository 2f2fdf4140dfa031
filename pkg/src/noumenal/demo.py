"""Run demo scenarios from a spec at both the phenomenal and the noumenal level.

Each branch of a run carries the global operation ``W`` applied so far and
the global state ``W(rho0)``.  A step ``(A, U)`` replaces ``W`` by
``(U x I) W``.  Subsystem views are ``pi_A(W rho0)`` and ``[W]^A``.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .construction import LocalRealisticModel, NoumenalClass
from .errors import NoumenalError
from .quantum import QuantumTheory
from .speclang import DemoAssertion, DemoScenario, LoadedTheory

DEFAULT_DEMO_TOL = 1e-9


class DemoError(NoumenalError):
    """A scenario could not be executed (as opposed to an assertion failing)."""


@dataclass
class Branch:
    name: str
    w: object
    rho: object
    before_w: object = None
    before_rho: object = None


@dataclass
class DemoResult:
    scenario: str
    theory: str
    steps: list[dict] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def first_failure(self) -> dict | None:
        return next((c for c in self.checks if not c["passed"]), None)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "theory": self.theory, "passed": self.passed,
                "steps": self.steps, "assertions": self.checks}


class _ClassRegistry:
    """Transcript-local ids: equal classes get equal ids, whatever their representative."""

    def __init__(self, model: LocalRealisticModel):
        self.model = model
        self.seen: dict[int, list[NoumenalClass]] = {}

    def id(self, n: NoumenalClass) -> str:
        known = self.seen.setdefault(n.system.mask, [])
        for i, k in enumerate(known):
            if k == n:
                return f"{n.system.name()}#{i}"
        known.append(n)
        return f"{n.system.name()}#{len(known) - 1}"


class DemoRunner:
    def __init__(self, loaded: LoadedTheory, scenario: DemoScenario):
        self.loaded = loaded
        self.theory = loaded.theory
        self.model = loaded.model_cls(loaded.theory)
        self.scenario = scenario
        self.quantum = isinstance(self.theory, QuantumTheory)
        self.registry = _ClassRegistry(self.model)
        self.universe = self.theory.universe
        self.rho0 = self.initial_state()

    # -- states and operations ---------------------------------------------------
    def config_state(self, a, digits: str):
        if self.quantum:
            return self.theory.basis(a, digits)
        return self.theory.state(a, [int(d) for d in digits])

    def initial_state(self):
        digits = self.scenario.initial or "0" * self.universe.site_count
        return self.config_state(self.universe.full, digits)

    def resolve(self, system: str, ref: str, step_no: int) -> list:
        """Operations a step applies; ``random*N`` yields ``N`` seeded samples."""
        a = self.loaded.system(system)
        if ref.startswith("random"):
            count = int(ref.split("*")[1]) if "*" in ref else 1
            rng = np.random.default_rng([self.loaded.budget.seed, zlib.crc32(self.scenario.name.encode()), step_no])
            return [self.theory.sample_operation(a, rng) for _ in range(count)]
        inverse = ref.endswith("^-1")
        u = self.loaded.ops[ref[:-3] if inverse else ref]
        if u.system != a:
            raise DemoError(f"operation {ref!r} acts on {u.system.name()}, not {a.name()}")
        return [self.theory.inverse(u) if inverse else u]

    def apply(self, b: Branch, u, name: str | None = None) -> Branch:
        g = self.model.pad(u)
        return Branch(name or b.name, self.theory.compose(g, b.w), self.theory.act(g, b.rho), b.w, b.rho)

    # -- views ----------------------------------------------------------------------
    def shown_systems(self):
        return list(self.universe.singletons()) + [self.universe.full]

    def state_view(self, rho):
        if not self.quantum:
            return list(rho.values)
        m = rho.matrix
        if rho.system.size == 1:
            paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
            return {"bloch": [_r(np.trace(m @ p).real) for p in paulis]}
        return {"purity": _r(np.trace(m @ m).real), "diagonal": [_r(x) for x in np.diag(m).real]}

    def snapshot(self, branches: list[Branch]) -> list[dict]:
        out = []
        for b in branches:
            views = []
            for a in self.shown_systems():
                n = self.model.noumenal(b.w, a)
                view = {"system": a.name(), "class": self.registry.id(n),
                        "state": self.state_view(self.theory.project(b.rho, a))}
                if self.theory.enumerable:
                    view["representative"] = self.theory.serialize_op(self.model.canonical_representative(n))["image"]
                views.append(view)
            out.append({"branch": b.name, "views": views})
        return out

    # -- execution ------------------------------------------------------------------
    def run(self) -> DemoResult:
        res = DemoResult(self.scenario.name, self.theory.name)
        branches = [Branch("main", self.theory.identity(self.universe.full), self.rho0)]
        res.steps.append({"step": 0, "action": "initial", "branches": self.snapshot(branches)})
        script = self.scenario.script
        i = 0
        while i < len(script):
            st = script[i]
            if st.kind == "step":
                (system, ref), = st.actions
                ops = self.resolve(system, ref, i + 1)
                if len(ops) == 1:
                    branches = [self.apply(b, ops[0]) for b in branches]
                else:
                    branches = [self.apply(b, u, f"{b.name}.{k}") for b in branches for k, u in enumerate(ops)]
                action = f"{system} {ref}"
                i += 1
            else:
                if len(branches) != 1:
                    raise DemoError(f"line {st.line}: branches can only fork from a single run")
                trunk, forked = branches[0], []
                names = []
                while i < len(script) and script[i].kind == "branch":
                    b = trunk
                    for k, (system, ref) in enumerate(script[i].actions):
                        ops = self.resolve(system, ref, 1000 * (i + 1) + k)
                        if len(ops) != 1:
                            raise DemoError(f"line {script[i].line}: branch actions must be single operations")
                        b = self.apply(b, ops[0], script[i].branch)
                    forked.append(b)
                    names.append(script[i].branch)
                    i += 1
                branches = forked
                action = "branch " + ", ".join(names)
            res.steps.append({"step": len(res.steps), "action": action, "branches": self.snapshot(branches)})
        for a in self.scenario.assertions:
            res.checks.append(self.evaluate(a, branches))
        return res

    # -- assertions --------------------------------------------------------------------
    def evaluate(self, a: DemoAssertion, branches: list[Branch]) -> dict:
        sys_ = self.loaded.system(a.system)
        tol = DEFAULT_DEMO_TOL if a.tol is None else a.tol
        t, m = self.theory, self.model
        label = _describe(a)
        worst = 0.0
        ok = True
        if a.subject == "state":
            states = [t.project(b.rho, sys_) for b in branches]
            if a.relation == "=":
                for b, s in zip(branches, states):
                    d = t.state_distance(s, self.state_target(a.target, sys_, b))
                    worst = max(worst, d)
                ok = worst <= tol
            elif a.relation == "equal":
                worst = max((t.state_distance(x, y) for x in states for y in states), default=0.0)
                ok = worst <= tol
            else:
                floor = a.tol if a.tol is not None else DEFAULT_DEMO_TOL
                worst = min((t.state_distance(x, y) for i, x in enumerate(states) for y in states[i + 1:]),
                            default=float("inf"))
                ok = worst >= floor if a.tol is not None else worst > floor
        else:
            classes = [m.noumenal(b.w, sys_) for b in branches]
            if a.relation == "=":
                for b, n in zip(branches, classes):
                    ref = t.identity(self.universe.full) if a.target == "initial" else b.before_w
                    if ref is None:
                        raise DemoError(f"line {a.line}: 'before' needs at least one step")
                    worst = max(worst, m.class_distance(n, m.noumenal(ref, sys_)))
                ok = worst <= max(tol, t.tolerance)
            elif a.relation == "equal":
                ok = all(x == y for x in classes for y in classes)
            else:
                ok = all(not (x == y) for i, x in enumerate(classes) for y in classes[i + 1:])
        return {"line": a.line, "assertion": label, "passed": bool(ok),
                "measure": None if a.relation in ("equal", "distinct") and a.subject == "class" else _r(worst)}

    def state_target(self, target: str, a, b: Branch):
        t = self.theory
        if target == "mixed":
            if not self.quantum:
                raise DemoError("'mixed' targets only exist in quantum theories")
            d = 2 ** a.size
            return t.density(a, np.eye(d) / d)
        if target == "initial":
            return t.project(self.rho0, a)
        if target == "before":
            if b.before_rho is None:
                raise DemoError("'before' needs at least one step")
            return t.project(b.before_rho, a)
        if len(target) != a.size:
            raise DemoError(f"target {target!r} needs {a.size} digits")
        return self.config_state(a, target)


def _r(x) -> float:
    return float(round(float(x), 12)) + 0.0


def _describe(a: DemoAssertion) -> str:
    rhs = f"= {a.target}" if a.relation == "=" else a.relation
    return f"{a.subject} {a.system} {rhs}"


def run_demo(loaded: LoadedTheory, scenario: str) -> DemoResult:
    try:
        sc = loaded.doc.demo(scenario)
    except KeyError:
        names = ", ".join(d.name for d in loaded.doc.demos) or "none"
        raise DemoError(f"no scenario {scenario!r} in this spec (available: {names})") from None
    return DemoRunner(loaded, sc).run()


def render_transcript(result: DemoResult) -> str:
    lines = [f"scenario {result.scenario} on {result.theory}"]
    for st in result.steps:
        lines.append(f"[{st['step']}] {st['action']}")
        for b in st["branches"]:
            views = "  ".join(f"{v['system']}: {v['class']} {_short(v['state'])}" for v in b["views"])
            lines.append(f"    {b['branch']}: {views}")
    for c in result.checks:
        mark = "ok  " if c["passed"] else "FAIL"
        extra = "" if c["measure"] is None else f" ({c['measure']:.3g})"
        lines.append(f"{mark} line {c['line']}: {c['assertion']}{extra}")
    return "\n".join(lines)


def _short(state) -> str:
    if isinstance(state, list):
        return "(" + ",".join(map(str, state)) + ")"
    if "bloch" in state:
        return "bloch(" + ",".join(f"{x:+.3f}" for x in state["bloch"]) + ")"
    return f"purity {state['purity']:.3f}"
