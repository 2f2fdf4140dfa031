"""The ``.theory`` text format: parser, serializer and loader.

A document is a sequence of sections.  Section headers start in column 1;
their entries are indented.  ``#`` starts a comment.

::

    theory 1 classical classical_2x2      # version, kind, optional name
    sites
      s0 2                                # label and number of values
      s1 2
    group
      full S                              # full symmetric group on the joint space
      gen s0,s1 : [1 0 3 2]               # or generators (image lists)
    op
      flip s0 = [1 0]                     # classical: image list
      bell q0,q1 = H@q0 CNOT@q0,q1        # quantum: gate words, applied left to right
      ph q0 = matrix                      # quantum: inline matrix, rows of (re,im)
        (1,0) (0,0)
        (0,0) (0,1)
    options
      samples 1000
      seed 42
      tolerance 1e-9
      mode sampled                        # exhaustive | sampled
      sabotage swapped_product
    demo classical_roundtrip
      initial 00
      step s0 flip
      step s0 flip^-1
      assert class s0 = initial
      assert state S = 00

Systems are written ``S`` (everything), ``{}`` (nothing) or a comma list
of site labels.  Quantum sites take no value count.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classical import ClassicalTheory, ClassicalTheorySpec, GroupDecl
from .construction import LocalRealisticModel
from .core import SamplingBudget
from .errors import TheoryLoadError
from .lattice import System
from .quantum import GATE_ARITY, GATES, QuantumTheory

SUPPORTED_VERSIONS = ("1",)
KINDS = ("classical", "quantum")
SECTIONS = ("sites", "group", "op", "options", "demo")
OPTION_KEYS = ("samples", "seed", "tolerance", "mode", "sabotage", "max_joint", "max_group")
STATE_TARGETS = ("mixed", "initial", "before")
CLASS_TARGETS = ("initial", "before")

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_TABLE = re.compile(r"\[([0-9\s]*)\]")
_GATE_WORD = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)@([A-Za-z0-9_,]+)$")
_PAIR = re.compile(r"\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)")
_OPREF = re.compile(r"(random(?:\*(\d+))?|([A-Za-z_][A-Za-z0-9_]*)(\^-1)?)$")


# -- diagnostics -----------------------------------------------------------------

@dataclass(frozen=True)
class SpecDiagnostic:
    code: str  # syntax | unknown-version | unresolved-reference | budget-invalid
    message: str
    line: int
    column: int
    excerpt: str

    def __str__(self) -> str:
        caret = " " * (self.column - 1) + "^"
        return f"{self.line}:{self.column}: error[{self.code}]: {self.message}\n    {self.excerpt}\n    {caret}"


class SpecError(TheoryLoadError):
    def __init__(self, diagnostic: SpecDiagnostic, source: str | None = None):
        self.diagnostic = diagnostic
        self.source = source
        prefix = f"{source}:" if source else ""
        super().__init__(prefix + str(diagnostic))

    @property
    def code(self) -> str:
        return self.diagnostic.code


# -- AST ------------------------------------------------------------------------------

@dataclass(frozen=True)
class SiteDecl:
    label: str
    values: int | None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class GroupLine:
    mode: str  # full | gen | gates
    system: str
    items: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class OpDecl:
    name: str
    system: str
    form: str  # table | gates | matrix
    body: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Options:
    samples: int | None = None
    seed: int | None = None
    tolerance: float | None = None
    mode: str | None = None
    sabotage: str | None = None
    max_joint: int | None = None
    max_group: int | None = None


@dataclass(frozen=True)
class DemoStep:
    kind: str  # step | branch
    actions: tuple[tuple[str, str], ...]  # (system, opref)
    branch: str | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DemoAssertion:
    subject: str  # state | class
    system: str
    relation: str  # = | distinct | equal
    target: str | None = None
    tol: float | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DemoScenario:
    name: str
    initial: str | None
    script: tuple[DemoStep, ...]
    assertions: tuple[DemoAssertion, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TheorySpecDocument:
    version: str
    kind: str
    name: str | None
    sites: tuple[SiteDecl, ...]
    groups: tuple[GroupLine, ...] = ()
    ops: tuple[OpDecl, ...] = ()
    options: Options = Options()
    demos: tuple[DemoScenario, ...] = ()

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.sites]

    def demo(self, name: str) -> DemoScenario:
        for d in self.demos:
            if d.name == name:
                return d
        raise KeyError(name)


# -- parser -----------------------------------------------------------------------------

@dataclass
class _Line:
    no: int
    text: str  # comment stripped, right-stripped
    indent: int

    @property
    def body(self) -> str:
        return self.text[self.indent:]


class _Parser:
    def __init__(self, text: str, source: str | None):
        self.source = source
        self.raw = text.splitlines()
        self.lines = []
        for i, raw in enumerate(self.raw, 1):
            text = raw.split("#", 1)[0].rstrip().expandtabs(4)
            if text.strip():
                self.lines.append(_Line(i, text, len(text) - len(text.lstrip())))
        self.pos = 0

    # diagnostics
    def fail(self, code: str, message: str, line: int, column: int = 1):
        excerpt = self.raw[line - 1] if 0 < line <= len(self.raw) else ""
        raise SpecError(SpecDiagnostic(code, message, line, max(column, 1), excerpt), self.source)

    def fail_at(self, code, message, ln: _Line, token: str | None = None):
        col = ln.text.find(token) + 1 if token and token in ln.text else ln.indent + 1
        self.fail(code, message, ln.no, col)

    # structure
    def entries(self):
        """Indented lines following the current header."""
        out = []
        while self.pos < len(self.lines) and self.lines[self.pos].indent > 0:
            out.append(self.lines[self.pos])
            self.pos += 1
        return out

    def parse(self) -> TheorySpecDocument:
        if not self.lines:
            self.fail("syntax", "missing theory header", 1)
        head = self.lines[0]
        words = head.body.split()
        if head.indent or words[0] != "theory":
            self.fail_at("syntax", "missing theory header", head)
        if len(words) not in (3, 4):
            self.fail_at("syntax", "header must read 'theory <version> <kind> [name]'", head)
        version, kind = words[1], words[2]
        if version not in SUPPORTED_VERSIONS:
            self.fail_at("unknown-version", f"unsupported format version {version!r} "
                         f"(supported: {', '.join(SUPPORTED_VERSIONS)})", head, version)
        if kind not in KINDS:
            self.fail_at("syntax", f"theory kind must be one of {', '.join(KINDS)}", head, kind)
        self.kind = kind
        name = words[3] if len(words) == 4 else None
        self.pos = 1
        sites = groups = ops = None
        options = None
        demos: list[DemoScenario] = []
        while self.pos < len(self.lines):
            ln = self.lines[self.pos]
            if ln.indent:
                self.fail_at("syntax", "indented line outside any section", ln)
            self.pos += 1
            words = ln.body.split()
            section = words[0]
            if section not in SECTIONS:
                self.fail_at("syntax", f"unknown section {section!r}", ln, section)
            if section == "demo":
                demos.append(self.demo(ln, words))
                continue
            if len(words) != 1:
                self.fail_at("syntax", f"section header {section!r} takes no arguments", ln, words[1])
            seen = {"sites": sites, "group": groups, "op": ops, "options": options}[section]
            if seen is not None:
                self.fail_at("syntax", f"duplicate section {section!r}", ln, section)
            if section == "sites":
                sites = self.sites(ln)
            elif sites is None:
                self.fail_at("syntax", "the sites section must come first", ln, section)
            elif section == "group":
                groups = self.groups()
            elif section == "op":
                ops = self.ops()
            else:
                options = self.options()
        if sites is None:
            self.fail("syntax", "missing sites section", head.no)
        names = [d.name for d in demos]
        for d in demos:
            if names.count(d.name) > 1:
                self.fail("syntax", f"duplicate demo {d.name!r}", d.line)
        return TheorySpecDocument(version, kind, name, sites, tuple(groups or ()), tuple(ops or ()),
                                  options or Options(), tuple(demos))

    # sections
    def sites(self, header: _Line) -> tuple[SiteDecl, ...]:
        out = []
        for ln in self.entries():
            words = ln.body.split()
            label = words[0]
            if not _NAME.match(label) or label == "S":
                self.fail_at("syntax", f"invalid site label {label!r}", ln, label)
            if label in [s.label for s in out]:
                self.fail_at("syntax", f"duplicate site {label!r}", ln, label)
            if self.kind == "quantum":
                if len(words) > 2 or (len(words) == 2 and words[1] != "2"):
                    self.fail_at("syntax", "quantum sites are qubits and take no value count", ln, words[-1])
                out.append(SiteDecl(label, None, ln.no))
                continue
            if len(words) != 2 or not words[1].isdigit():
                self.fail_at("syntax", "classical sites read '<label> <values>'", ln)
            values = int(words[1])
            if values < 2:
                self.fail_at("syntax", "a site needs at least 2 values", ln, words[1])
            out.append(SiteDecl(label, values, ln.no))
        if not out:
            self.fail("syntax", "sites section is empty", header.no)
        self.labels = [s.label for s in out]
        self.radix = {s.label: s.values or 2 for s in out}
        return tuple(out)

    def system(self, token: str, ln: _Line) -> str:
        if token in ("S", "{}"):
            return token
        parts = token.split(",")
        for p in parts:
            if p not in self.labels:
                self.fail_at("unresolved-reference", f"unknown site {p!r}", ln, p)
        if len(set(parts)) != len(parts):
            self.fail_at("syntax", f"site repeated in {token!r}", ln, token)
        return token

    def sites_of(self, system: str) -> list[str]:
        if system == "S":
            return list(self.labels)
        if system == "{}":
            return []
        return system.split(",")

    def joint(self, system: str) -> int:
        return math.prod(self.radix[s] for s in self.sites_of(system))

    def table(self, text: str, system: str, ln: _Line) -> tuple[int, ...]:
        m = _TABLE.fullmatch(text.strip())
        if not m:
            self.fail_at("syntax", "expected an image list like [1 0 3 2]", ln, text.strip()[:1] or None)
        table = tuple(int(x) for x in m.group(1).split())
        n = self.joint(system)
        if sorted(table) != list(range(n)):
            self.fail_at("syntax", f"image list must be a permutation of 0..{n - 1}", ln, text.strip())
        return table

    def groups(self) -> list[GroupLine]:
        out = []
        for ln in self.entries():
            words = ln.body.split()
            mode = words[0]
            if mode == "gates":
                if self.kind != "quantum":
                    self.fail_at("syntax", "gate alphabets only apply to quantum theories", ln, mode)
                for g in words[1:]:
                    if g not in GATES:
                        self.fail_at("unresolved-reference", f"unknown gate {g!r}", ln, g)
                out.append(GroupLine("gates", "S", tuple(words[1:]), ln.no))
            elif mode == "full":
                if len(words) != 2:
                    self.fail_at("syntax", "expected 'full <system>'", ln)
                out.append(GroupLine("full", self.system(words[1], ln), (), ln.no))
            elif mode == "gen":
                if self.kind != "classical":
                    self.fail_at("syntax", "generator lists only apply to classical theories", ln, mode)
                head, sep, rest = ln.body.partition(":")
                hw = head.split()
                if not sep or len(hw) != 2:
                    self.fail_at("syntax", "expected 'gen <system> : [..] [..]'", ln)
                system = self.system(hw[1], ln)
                tables = tuple(self.table(t, system, ln) for t in re.findall(r"\[[^\]]*\]", rest))
                if not tables:
                    self.fail_at("syntax", "gen needs at least one image list", ln)
                out.append(GroupLine("gen", system, tables, ln.no))
            else:
                self.fail_at("syntax", f"unknown group entry {mode!r}", ln, mode)
        self.declared_gates = {g for line in out if line.mode == "gates" for g in line.items}
        return out

    def ops(self) -> list[OpDecl]:
        out = []
        alphabet = getattr(self, "declared_gates", set())
        entries = self.entries()
        i = 0
        while i < len(entries):
            ln = entries[i]
            i += 1
            head, sep, rhs = ln.body.partition("=")
            hw = head.split()
            if not sep or len(hw) != 2:
                self.fail_at("syntax", "expected '<name> <system> = <definition>'", ln)
            name, system = hw[0], self.system(hw[1], ln)
            if not _NAME.match(name) or name == "random" or name in GATES:
                self.fail_at("syntax", f"invalid operation name {name!r}", ln, name)
            if name in [o.name for o in out]:
                self.fail_at("syntax", f"duplicate operation {name!r}", ln, name)
            rhs = rhs.strip()
            if self.kind == "classical":
                out.append(OpDecl(name, system, "table", self.table(rhs, system, ln), ln.no))
            elif rhs == "matrix":
                rows = []
                while i < len(entries) and entries[i].indent > ln.indent:
                    row = entries[i]
                    pairs = _PAIR.findall(row.body)
                    if not pairs or _PAIR.sub("", row.body).strip():
                        self.fail_at("syntax", "matrix rows are (re,im) pairs", row)
                    rows.append(tuple((float(a), float(b)) for a, b in pairs))
                    i += 1
                d = 2 ** len(self.sites_of(system))
                if len(rows) != d or any(len(r) != d for r in rows):
                    self.fail_at("syntax", f"matrix for {system} must be {d}x{d}", ln, "matrix")
                out.append(OpDecl(name, system, "matrix", tuple(rows), ln.no))
            else:
                words = []
                for w in rhs.split():
                    m = _GATE_WORD.match(w)
                    if not m:
                        self.fail_at("syntax", f"expected GATE@site[,site], got {w!r}", ln, w)
                    gate, where = m.group(1), m.group(2)
                    if gate not in GATES:
                        self.fail_at("unresolved-reference", f"unknown gate {gate!r}", ln, gate)
                    if alphabet and gate not in alphabet:
                        self.fail_at("unresolved-reference", f"gate {gate!r} is not in the declared alphabet", ln, gate)
                    sites = tuple(where.split(","))
                    for s in sites:
                        if s not in self.sites_of(system):
                            self.fail_at("unresolved-reference", f"site {s!r} is not part of {system}", ln, w)
                    if len(sites) != GATE_ARITY[gate] or len(set(sites)) != len(sites):
                        self.fail_at("syntax", f"{gate} acts on {GATE_ARITY[gate]} distinct sites", ln, w)
                    words.append((gate, sites))
                if not words:
                    self.fail_at("syntax", "empty gate sequence", ln)
                out.append(OpDecl(name, system, "gates", tuple(words), ln.no))
        self.op_names = {o.name for o in out}
        return out

    def options(self) -> Options:
        vals: dict = {}
        for ln in self.entries():
            words = ln.body.split()
            key = words[0]
            if key not in OPTION_KEYS:
                self.fail_at("syntax", f"unknown option key {key!r}", ln, key)
            if key in vals:
                self.fail_at("syntax", f"duplicate option {key!r}", ln, key)
            if len(words) != 2:
                self.fail_at("syntax", f"option {key!r} takes exactly one value", ln, key)
            raw = words[1]
            if key in ("samples", "seed", "max_joint", "max_group"):
                if not re.fullmatch(r"-?\d+", raw):
                    self.fail_at("budget-invalid", f"{key} must be an integer", ln, raw)
                v = int(raw)
                if (key == "seed" and not 0 <= v < 2**64) or (key != "seed" and v < 1):
                    self.fail_at("budget-invalid", f"{key} out of range: {v}", ln, raw)
            elif key == "tolerance":
                try:
                    v = float(raw)
                except ValueError:
                    self.fail_at("budget-invalid", "tolerance must be a number", ln, raw)
                if not (math.isfinite(v) and v > 0):
                    self.fail_at("budget-invalid", "tolerance must be positive and finite", ln, raw)
            elif key == "mode":
                if raw not in ("exhaustive", "sampled"):
                    self.fail_at("budget-invalid", "mode must be exhaustive or sampled", ln, raw)
                v = raw
            else:
                from .sabotage import SABOTAGES

                if raw not in SABOTAGES:
                    self.fail_at("unresolved-reference", f"unknown sabotage {raw!r}", ln, raw)
                v = raw
            vals[key] = v
        return Options(**vals)

    def opref(self, token: str, ln: _Line) -> str:
        m = _OPREF.match(token)
        if not m:
            self.fail_at("syntax", f"invalid operation reference {token!r}", ln, token)
        if m.group(3) and m.group(3) not in getattr(self, "op_names", set()):
            self.fail_at("unresolved-reference", f"unknown operation {m.group(3)!r}", ln, token)
        if m.group(2) is not None and int(m.group(2)) < 1:
            self.fail_at("syntax", "random*N needs N >= 1", ln, token)
        return token

    def action(self, text: str, ln: _Line) -> tuple[str, str]:
        words = text.split()
        if len(words) != 2:
            self.fail_at("syntax", "expected '<system> <operation>'", ln, text.strip() or None)
        return self.system(words[0], ln), self.opref(words[1], ln)

    def demo(self, header: _Line, words: list[str]) -> DemoScenario:
        if len(words) != 2 or not _NAME.match(words[1]):
            self.fail_at("syntax", "expected 'demo <name>'", header)
        initial = None
        script, asserts = [], []
        for ln in self.entries():
            w = ln.body.split()
            verb = w[0]
            if verb == "initial":
                if len(w) != 2 or not w[1].isdigit() or len(w[1]) != len(self.labels):
                    self.fail_at("syntax", f"initial needs one digit per site ({len(self.labels)})", ln)
                for d, s in zip(w[1], self.labels):
                    if int(d) >= self.radix[s]:
                        self.fail_at("syntax", f"value {d} out of range for site {s}", ln, w[1])
                initial = w[1]
            elif verb == "step":
                script.append(DemoStep("step", (self.action(ln.body[len("step"):], ln),), None, ln.no))
            elif verb == "branch":
                head, sep, rest = ln.body.partition("=")
                hw = head.split()
                if not sep or len(hw) != 2 or not _NAME.match(hw[1]):
                    self.fail_at("syntax", "expected 'branch <name> = <system> <op> [; ...]'", ln)
                acts = tuple(self.action(a, ln) for a in rest.split(";"))
                script.append(DemoStep("branch", acts, hw[1], ln.no))
            elif verb == "assert":
                asserts.append(self.assertion(w, ln))
            else:
                self.fail_at("syntax", f"unknown demo entry {verb!r}", ln, verb)
        return DemoScenario(words[1], initial, tuple(script), tuple(asserts), header.no)

    def assertion(self, w: list[str], ln: _Line) -> DemoAssertion:
        if len(w) < 4 or w[1] not in ("state", "class"):
            self.fail_at("syntax", "expected 'assert state|class <system> ...'", ln)
        subject, system = w[1], self.system(w[2], ln)
        rest = w[3:]
        tol = None
        for key in ("tol", "min"):
            if key in rest:
                k = rest.index(key)
                if k + 1 >= len(rest):
                    self.fail_at("syntax", f"{key} needs a value", ln, key)
                try:
                    tol = float(rest[k + 1])
                except ValueError:
                    self.fail_at("budget-invalid", f"{key} must be a number", ln, rest[k + 1])
                if not (math.isfinite(tol) and tol >= 0):
                    self.fail_at("budget-invalid", f"{key} must be nonnegative and finite", ln, rest[k + 1])
                rest = rest[:k] + rest[k + 2:]
        if rest[0] in ("distinct", "equal") and len(rest) == 1:
            return DemoAssertion(subject, system, rest[0], None, tol, ln.no)
        if rest[0] != "=" or len(rest) != 2:
            self.fail_at("syntax", "expected '= <target>', 'distinct' or 'equal'", ln, rest[0])
        target = rest[1]
        allowed = STATE_TARGETS if subject == "state" else CLASS_TARGETS
        if target not in allowed and not (subject == "state" and target.isdigit()):
            self.fail_at("syntax", f"{subject} target must be one of {', '.join(allowed)}"
                         + (" or a digit string" if subject == "state" else ""), ln, target)
        return DemoAssertion(subject, system, "=", target, tol, ln.no)


def parse_spec(text: str, source: str | None = None) -> TheorySpecDocument:
    return _Parser(text, source).parse()


def parse_file(path) -> TheorySpecDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise TheoryLoadError(f"cannot read {path}: {e.strerror}") from None
    return parse_spec(text, str(path))


# -- serializer -------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def serialize_spec(doc: TheorySpecDocument) -> str:
    out = [" ".join(["theory", doc.version, doc.kind] + ([doc.name] if doc.name else []))]
    out.append("sites")
    for s in doc.sites:
        out.append(f"  {s.label}" + (f" {s.values}" if s.values is not None else ""))
    if doc.groups:
        out.append("group")
        for g in doc.groups:
            if g.mode == "gates":
                out.append("  gates " + " ".join(g.items))
            elif g.mode == "full":
                out.append(f"  full {g.system}")
            else:
                out.append(f"  gen {g.system} : " + " ".join("[" + " ".join(map(str, t)) + "]" for t in g.items))
    if doc.ops:
        out.append("op")
        for o in doc.ops:
            if o.form == "table":
                out.append(f"  {o.name} {o.system} = [" + " ".join(map(str, o.body)) + "]")
            elif o.form == "gates":
                out.append(f"  {o.name} {o.system} = " + " ".join(f"{g}@{','.join(s)}" for g, s in o.body))
            else:
                out.append(f"  {o.name} {o.system} = matrix")
                for row in o.body:
                    out.append("    " + " ".join(f"({_fmt_float(a)},{_fmt_float(b)})" for a, b in row))
    opts = [(k, getattr(doc.options, k)) for k in OPTION_KEYS if getattr(doc.options, k) is not None]
    if opts:
        out.append("options")
        for k, v in opts:
            out.append(f"  {k} {_fmt_float(v) if isinstance(v, float) else v}")
    for d in doc.demos:
        out.append(f"demo {d.name}")
        if d.initial is not None:
            out.append(f"  initial {d.initial}")
        for st in d.script:
            if st.kind == "step":
                (sys_, op), = st.actions
                out.append(f"  step {sys_} {op}")
            else:
                out.append(f"  branch {st.branch} = " + " ; ".join(f"{s} {o}" for s, o in st.actions))
        for a in d.assertions:
            words = ["  assert", a.subject, a.system]
            words += ["=", a.target] if a.relation == "=" else [a.relation]
            if a.tol is not None:
                words += ["min" if a.relation == "distinct" else "tol", _fmt_float(a.tol)]
            out.append(" ".join(words))
    return "\n".join(out) + "\n"


# -- loader -------------------------------------------------------------------------------

@dataclass
class LoadedTheory:
    doc: TheorySpecDocument
    theory: object
    ops: dict
    budget: SamplingBudget
    model_cls: type = LocalRealisticModel
    sabotage: str | None = None

    def system(self, token: str) -> System:
        u = self.theory.universe
        if token == "S":
            return u.full
        if token == "{}":
            return u.empty
        return u.system(*token.split(","))


def budget_from(doc: TheorySpecDocument, *, seed: int | None = None, samples: int | None = None,
                tolerance: float | None = None) -> SamplingBudget:
    o = doc.options
    mode = o.mode or ("exhaustive" if doc.kind == "classical" else "sampled")
    kw = {
        "mode": mode,
        "sample_count": samples if samples is not None else (o.samples or 1000),
        "seed": seed if seed is not None else (o.seed or 0),
        "tolerance": tolerance if tolerance is not None else (o.tolerance or 1e-9),
    }
    try:
        return SamplingBudget(**kw)
    except ValueError as e:
        raise TheoryLoadError(f"invalid budget: {e}") from None


def _theory_name(doc: TheorySpecDocument) -> str:
    return doc.name or doc.kind


def load_theory(doc: TheorySpecDocument, **overrides) -> LoadedTheory:
    """Build the theory, its named operations and the effective budget."""
    budget = budget_from(doc, **overrides)
    labels = doc.labels
    if doc.kind == "classical":
        groups: dict[int, GroupDecl] = {}
        gens: dict[int, list] = {}
        for g in doc.groups:
            mask = _mask(labels, g.system)
            if g.mode == "full":
                groups[mask] = GroupDecl("full")
            else:
                gens.setdefault(mask, []).extend(g.items)
        for mask, tables in gens.items():
            if mask in groups:
                raise TheoryLoadError(f"system {_name(labels, mask)} is declared both full and generated")
            groups[mask] = GroupDecl("generated", tuple(tables))
        o = doc.options
        spec = ClassicalTheorySpec(
            tuple((s.label, s.values) for s in doc.sites), groups,
            **({"max_joint_size": o.max_joint} if o.max_joint else {}),
            **({"max_group_order": o.max_group} if o.max_group else {}),
        )
        theory = ClassicalTheory(spec, name=_theory_name(doc))
    else:
        for g in doc.groups:
            if g.mode == "full" and g.system not in ("S",) and len(g.system.split(",")) != len(labels):
                raise TheoryLoadError("quantum theories always carry the full unitary group on every system")
        theory = QuantumTheory(len(labels), budget.tolerance, labels=labels, name=_theory_name(doc))
    loaded = LoadedTheory(doc, theory, {}, budget)
    if doc.options.sabotage:
        from .sabotage import SABOTAGES

        sab = SABOTAGES[doc.options.sabotage]
        loaded.theory = sab.theory(theory)
        loaded.model_cls = sab.model_cls or LocalRealisticModel
        loaded.sabotage = sab.name
    for o in doc.ops:
        loaded.ops[o.name] = _build_op(loaded, o)
    return loaded


def _mask(labels, system: str) -> int:
    if system == "S":
        return (1 << len(labels)) - 1
    if system == "{}":
        return 0
    return sum(1 << labels.index(s) for s in system.split(","))


def _name(labels, mask: int) -> str:
    return ",".join(l for i, l in enumerate(labels) if mask >> i & 1)


def _build_op(loaded: LoadedTheory, o: OpDecl):
    t = loaded.theory
    a = loaded.system(o.system)
    if o.form == "table":
        return t.op(a, o.body)
    if o.form == "matrix":
        m = np.array([[complex(re_, im) for re_, im in row] for row in o.body])
        try:
            return t.unitary(a, m)
        except ValueError as e:
            raise TheoryLoadError(f"operation {o.name!r} (line {o.line}): {e}") from None
    u = t.identity(a)
    for gate, sites in o.body:
        g = t.gate(gate, *sites)
        rest = a & ~g.system
        if not rest.is_empty:
            g = t.product(g, t.identity(rest))
        u = t.compose(g, u)
    return u


def load_file(path, **overrides) -> LoadedTheory:
    return load_theory(parse_file(path), **overrides)


BUNDLED_DIR = Path(__file__).parent / "specs"


def bundled_specs() -> list[str]:
    return sorted(p.name for p in BUNDLED_DIR.glob("*.theory"))


def resolve_spec_path(name: str) -> Path:
    """A path on disk, or the name of a bundled spec (with or without the .theory suffix)."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (BUNDLED_DIR / name, BUNDLED_DIR / f"{name}.theory"):
        if cand.exists():
            return cand
    raise TheoryLoadError(f"no such spec: {name} (bundled: {', '.join(bundled_specs())})")
