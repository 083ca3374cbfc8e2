"""Filtered A-infinity categories over the Z2 Novikov field, with
L-infinity and open-closed variants and functors between categories.

Everything is finite and sparse: hom spaces have named basis
generators, operations are tables keyed by input tuples, and elements
are dicts from generator names to Novikov coefficients.  Defects are
computed literally as the Z2 sum of all single insertions of one
operation into another; a structure satisfies its relations iff every
defect is the zero element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .novikov import (
    NovikovElement,
    action_of_sum,
    nov_add,
    nov_from_text,
    nov_mul,
    nov_to_text,
)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise ValueError("levels and actions must be exact rationals, got float %r" % x)
    return Fraction(x)


def _coerce_element(out) -> dict:
    clean = {}
    for g, c in out.items():
        if isinstance(c, str):
            c = nov_from_text(c)
        if not isinstance(c, NovikovElement):
            raise ValueError("coefficient of %s must be a Novikov element" % g)
        if not c.is_zero:
            clean[g] = c
    return clean


def _add_term(acc: dict, gen: str, coeff: NovikovElement):
    cur = acc.get(gen)
    new = nov_add(cur, coeff) if cur is not None else coeff
    if new.is_zero:
        acc.pop(gen, None)
    else:
        acc[gen] = new


def element_to_text(el: dict) -> str:
    if not el:
        return "0"
    return " + ".join("%s*(%s)" % (g, nov_to_text(el[g])) for g in sorted(el))


@dataclass(frozen=True)
class Generator:
    name: str
    source: str
    target: str
    level: Fraction
    ham: Fraction


class FilteredAInfCategory:
    """Objects, hom generators with action levels, and sparse mu tables."""

    def __init__(self):
        self.objects = []
        self.gens = {}
        self.mu = {}

    def add_object(self, name: str):
        if name in self.objects:
            raise ValueError("duplicate object %r" % name)
        self.objects.append(name)

    def add_gen(self, name, source, target, level=0, ham=0):
        if name in self.gens:
            raise ValueError("duplicate generator %r" % name)
        if source not in self.objects or target not in self.objects:
            raise ValueError("generator %s needs known objects, got %s -> %s" % (name, source, target))
        self.gens[name] = Generator(name, source, target, _frac(level), _frac(ham))

    def _check_chain(self, names):
        if not names:
            raise ValueError("operations need at least one input")
        for g in names:
            if g not in self.gens:
                raise ValueError("unknown generator %r" % g)
        for a, b in zip(names, names[1:]):
            if self.gens[a].target != self.gens[b].source:
                raise ValueError(
                    "inputs not composable: %s ends at %s but %s starts at %s"
                    % (a, self.gens[a].target, b, self.gens[b].source)
                )

    def set_mu(self, inputs, out):
        """Define mu on a basis tuple; out maps generator names to
        Novikov coefficients (text accepted).  Zero entries are dropped."""
        inputs = tuple(inputs)
        self._check_chain(inputs)
        src = self.gens[inputs[0]].source
        tgt = self.gens[inputs[-1]].target
        clean = _coerce_element(out)
        for g in clean:
            if g not in self.gens:
                raise ValueError("unknown output generator %r" % g)
            if (self.gens[g].source, self.gens[g].target) != (src, tgt):
                raise ValueError(
                    "output %s lies in hom(%s,%s), expected hom(%s,%s)"
                    % (g, self.gens[g].source, self.gens[g].target, src, tgt)
                )
        if clean:
            self.mu[inputs] = clean
        else:
            self.mu.pop(inputs, None)

    def mu_entry(self, inputs) -> dict:
        return self.mu.get(tuple(inputs), {})

    def gens_from(self, obj):
        return sorted(g for g, v in self.gens.items() if v.source == obj)

    def composable_tuples(self, d: int):
        """All length-d composable generator tuples, lexicographic in
        generator names."""
        by_source = {}
        for name in sorted(self.gens):
            by_source.setdefault(self.gens[name].source, []).append(name)

        def extend(chain):
            if len(chain) == d:
                yield chain
                return
            for g in by_source.get(self.gens[chain[-1]].target, ()):
                yield from extend(chain + (g,))

        for name in sorted(self.gens):
            yield from extend((name,))


def ainf_defect(cat: FilteredAInfCategory, inputs) -> dict:
    """Z2 sum of all single insertions mu(.., mu(..), ..) over the given
    inputs; zero exactly when every relation with these inputs holds."""
    inputs = tuple(inputs)
    cat._check_chain(inputs)
    d = len(inputs)
    total = {}
    for m in range(1, d + 1):
        for n in range(0, d - m + 1):
            inner = cat.mu_entry(inputs[n:n + m])
            if not inner:
                continue
            for g, c in inner.items():
                outer = cat.mu_entry(inputs[:n] + (g,) + inputs[n + m:])
                for h, c2 in outer.items():
                    _add_term(total, h, nov_mul(c, c2))
    return total


def find_ainf_violation(cat: FilteredAInfCategory, max_d: int):
    """First composable tuple (by length, then lexicographically) with
    nonzero defect, as (inputs, defect); None if all relations hold."""
    for d in range(1, max_d + 1):
        for inputs in cat.composable_tuples(d):
            defect = ainf_defect(cat, inputs)
            if defect:
                return inputs, defect
    return None


# -- discrepancy measurement -------------------------------------------


@dataclass
class DiscrepancyReport:
    raw: dict
    eps: dict
    unit_levels: dict
    is_filtered: bool


def measure_discrepancies(cat: FilteredAInfCategory, units=None) -> DiscrepancyReport:
    """Worst action gap per arity: max over table entries of
    action(output) - sum of input levels.  The certificate eps clamps
    the gap at zero; the category is filtered when every raw gap is
    <= 0 and every declared unit has level <= 0."""
    raw = {}
    for inputs, out in cat.mu.items():
        d = len(inputs)
        a_out = action_of_sum((c, cat.gens[g].level) for g, c in out.items())
        if a_out.is_neg_inf:
            continue
        gap = a_out.value - sum(cat.gens[g].level for g in inputs)
        if d not in raw or gap > raw[d]:
            raw[d] = gap
    eps = {d: max(Fraction(0), v) for d, v in raw.items()}
    unit_levels = {}
    if units:
        for obj, name in units.items():
            if name not in cat.gens:
                raise ValueError("unknown unit generator %r" % name)
            unit_levels[obj] = cat.gens[name].level
    filtered = all(v <= 0 for v in raw.values()) and all(
        v <= 0 for v in unit_levels.values()
    )
    return DiscrepancyReport(raw, eps, unit_levels, filtered)


# -- strict units ------------------------------------------------------


@dataclass(frozen=True)
class UnitViolation:
    d: int
    slot: int
    inputs: tuple
    found: dict
    expected: dict


@dataclass
class UnitReport:
    ok: bool
    violations: tuple

    @property
    def first(self):
        return self.violations[0] if self.violations else None


def check_strict_unit(cat: FilteredAInfCategory, obj: str, unit: str) -> UnitReport:
    """A strict unit e satisfies mu2(e, x) = x = mu2(x, e) and kills
    every operation of arity >= 3 containing it.  Violations carry the
    arity and the 1-based slot of the unit."""
    if unit not in cat.gens:
        raise ValueError("unknown generator %r" % unit)
    e = cat.gens[unit]
    if (e.source, e.target) != (obj, obj):
        raise ValueError("unit must lie in hom(%s,%s), got hom(%s,%s)" % (obj, obj, e.source, e.target))
    one = NovikovElement.one()
    violations = []
    for name in sorted(cat.gens):
        g = cat.gens[name]
        if g.source == obj:
            found = cat.mu_entry((unit, name))
            if found != {name: one}:
                violations.append(UnitViolation(2, 1, (unit, name), dict(found), {name: one}))
        if g.target == obj:
            found = cat.mu_entry((name, unit))
            if found != {name: one}:
                violations.append(UnitViolation(2, 2, (name, unit), dict(found), {name: one}))
    for key in sorted(cat.mu):
        if len(key) >= 3 and unit in key:
            slot = key.index(unit) + 1
            violations.append(UnitViolation(len(key), slot, key, dict(cat.mu[key]), {}))
    return UnitReport(not violations, tuple(violations))


# -- L-infinity algebras -----------------------------------------------


class LInfinityAlgebra:
    """Symmetric brackets over Z2, tables keyed by sorted input tuples."""

    def __init__(self):
        self.basis = []
        self.l = {}

    def add_basis(self, name: str):
        if name in self.basis:
            raise ValueError("duplicate basis element %r" % name)
        self.basis.append(name)

    def set_l(self, inputs, out):
        key = tuple(sorted(inputs))
        if not key:
            raise ValueError("brackets need at least one input")
        for g in key:
            if g not in self.basis:
                raise ValueError("unknown basis element %r" % g)
        clean = _coerce_element(out)
        for g in clean:
            if g not in self.basis:
                raise ValueError("unknown output basis element %r" % g)
        if clean:
            self.l[key] = clean
        else:
            self.l.pop(key, None)

    def l_entry(self, inputs) -> dict:
        return self.l.get(tuple(sorted(inputs)), {})


def linf_defect(alg: LInfinityAlgebra, inputs) -> dict:
    """Z2 sum over index-ordered subsets S of l(l(v_S), v_rest); each
    unordered split contributes exactly once."""
    inputs = tuple(inputs)
    n = len(inputs)
    if n < 1:
        raise ValueError("defect needs at least one input")
    total = {}
    for m in range(1, n + 1):
        for S in itertools.combinations(range(n), m):
            inner = alg.l_entry(tuple(inputs[i] for i in S))
            if not inner:
                continue
            chosen = set(S)
            rest = tuple(inputs[i] for i in range(n) if i not in chosen)
            for g, c in inner.items():
                outer = alg.l_entry((g,) + rest)
                for h, c2 in outer.items():
                    _add_term(total, h, nov_mul(c, c2))
    return total


# -- open-closed structures --------------------------------------------


class OCHAStructure:
    """Closed L-infinity brackets plus open-closed maps mu_{k,d} taking
    k closed and d open inputs to an open output; symmetric in the
    closed slots (keys store them sorted)."""

    def __init__(self):
        self.closed_basis = []
        self.open_basis = []
        self.l = {}
        self.mu = {}

    def add_closed(self, name: str):
        if name in self.closed_basis:
            raise ValueError("duplicate closed basis element %r" % name)
        self.closed_basis.append(name)

    def add_open(self, name: str):
        if name in self.open_basis:
            raise ValueError("duplicate open basis element %r" % name)
        self.open_basis.append(name)

    def set_l(self, inputs, out):
        key = tuple(sorted(inputs))
        if not key:
            raise ValueError("brackets need at least one input")
        for g in key:
            if g not in self.closed_basis:
                raise ValueError("unknown closed basis element %r" % g)
        clean = _coerce_element(out)
        for g in clean:
            if g not in self.closed_basis:
                raise ValueError("unknown closed output %r" % g)
        if clean:
            self.l[key] = clean
        else:
            self.l.pop(key, None)

    def l_entry(self, inputs) -> dict:
        return self.l.get(tuple(sorted(inputs)), {})

    def set_mu(self, closed, opens, out):
        closed = tuple(sorted(closed))
        opens = tuple(opens)
        if not closed and not opens:
            raise ValueError("mu_{0,0} is identically zero and cannot be set")
        for g in closed:
            if g not in self.closed_basis:
                raise ValueError("unknown closed basis element %r" % g)
        for g in opens:
            if g not in self.open_basis:
                raise ValueError("unknown open basis element %r" % g)
        clean = _coerce_element(out)
        for g in clean:
            if g not in self.open_basis:
                raise ValueError("unknown open output %r" % g)
        if clean:
            self.mu[(closed, opens)] = clean
        else:
            self.mu.pop((closed, opens), None)

    def mu_entry(self, closed, opens) -> dict:
        return self.mu.get((tuple(sorted(closed)), tuple(opens)), {})


def ocha_defect(s: OCHAStructure, closed_inputs, open_inputs) -> dict:
    """Z2 sum of the two families of insertions: a closed bracket feeding
    a closed slot, and an open-closed map feeding an open slot.  With no
    closed inputs the loop degenerates literally to the plain
    A-infinity defect of the mu_{0,*} tables."""
    closed = tuple(closed_inputs)
    opens = tuple(open_inputs)
    k = len(closed)
    d = len(opens)
    total = {}
    for m in range(0, k):
        for S in itertools.combinations(range(k), k - m):
            inner = s.l_entry(tuple(closed[i] for i in S))
            if not inner:
                continue
            chosen = set(S)
            rest = tuple(closed[i] for i in range(k) if i not in chosen)
            for g, c in inner.items():
                outer = s.mu_entry((g,) + rest, opens)
                for h, c2 in outer.items():
                    _add_term(total, h, nov_mul(c, c2))
    for m in range(0, k + 1):
        for S in itertools.combinations(range(k), m):
            chosen = set(S)
            inner_closed = tuple(closed[i] for i in S)
            outer_closed = tuple(closed[i] for i in range(k) if i not in chosen)
            for i in range(0, d + 1):
                for t in range(0, d - i + 1):
                    if m == 0 and t == 0:
                        continue
                    inner = s.mu_entry(inner_closed, opens[i:i + t])
                    if not inner:
                        continue
                    for g, c in inner.items():
                        outer = s.mu_entry(
                            outer_closed, opens[:i] + (g,) + opens[i + t:]
                        )
                        for h, c2 in outer.items():
                            _add_term(total, h, nov_mul(c, c2))
    return total


@dataclass
class SpecializationReport:
    open_sector_matches: bool
    open_mismatches: tuple
    closed_sector_defects: dict

    @property
    def closed_sector_consistent(self) -> bool:
        return all(not v for v in self.closed_sector_defects.values())


def open_sector_category(s: OCHAStructure) -> FilteredAInfCategory:
    """The mu_{0,*} tables as a one-object category on the open basis."""
    cat = FilteredAInfCategory()
    cat.add_object("o")
    for name in s.open_basis:
        cat.add_gen(name, "o", "o")
    for (closed, opens), out in s.mu.items():
        if not closed:
            cat.set_mu(opens, dict(out))
    return cat


def ocha_specialization_report(s: OCHAStructure, max_open=4, max_closed=4) -> SpecializationReport:
    """Cross-check the two degenerate sectors: the open sector's defect
    must agree with the plain A-infinity defect tuple for tuple, and the
    closed tables are reported through their standalone bracket
    defects."""
    cat = open_sector_category(s)
    mismatches = []
    for d in range(1, max_open + 1):
        for tup in itertools.product(s.open_basis, repeat=d):
            if ainf_defect(cat, tup) != ocha_defect(s, (), tup):
                mismatches.append(tup)
    alg = LInfinityAlgebra()
    for name in s.closed_basis:
        alg.add_basis(name)
    for key, out in s.l.items():
        alg.set_l(key, dict(out))
    closed_defects = {}
    for n in range(1, max_closed + 1):
        for tup in itertools.product(s.closed_basis, repeat=n):
            key = tuple(sorted(tup))
            if key not in closed_defects:
                closed_defects[key] = linf_defect(alg, key)
    return SpecializationReport(not mismatches, tuple(mismatches), closed_defects)


# -- functors ----------------------------------------------------------


class AInfFunctor:
    """Object map plus multilinear components F_d from source input
    tuples to target elements."""

    def __init__(self, source: FilteredAInfCategory, target: FilteredAInfCategory, object_map: dict):
        for x, y in object_map.items():
            if x not in source.objects:
                raise ValueError("unknown source object %r" % x)
            if y not in target.objects:
                raise ValueError("unknown target object %r" % y)
        for x in source.objects:
            if x not in object_map:
                raise ValueError("object map misses %r" % x)
        self.source = source
        self.target = target
        self.object_map = object_map
        self.table = {}

    def set_component(self, inputs, out):
        inputs = tuple(inputs)
        self.source._check_chain(inputs)
        src = self.object_map[self.source.gens[inputs[0]].source]
        tgt = self.object_map[self.source.gens[inputs[-1]].target]
        clean = _coerce_element(out)
        for g in clean:
            if g not in self.target.gens:
                raise ValueError("unknown target generator %r" % g)
            tg = self.target.gens[g]
            if (tg.source, tg.target) != (src, tgt):
                raise ValueError(
                    "component output %s lies in hom(%s,%s), expected hom(%s,%s)"
                    % (g, tg.source, tg.target, src, tgt)
                )
        if clean:
            self.table[inputs] = clean
        else:
            self.table.pop(inputs, None)

    def entry(self, inputs) -> dict:
        return self.table.get(tuple(inputs), {})


def _compositions_of(d, r):
    if r == 1:
        yield (d,)
        return
    for first in range(1, d - r + 2):
        for rest in _compositions_of(d - first, r - 1):
            yield (first,) + rest


def functor_defect(F: AInfFunctor, inputs) -> dict:
    """Z2 sum of both sides of the functor equation: target operations
    applied to blocks of components, plus components applied to single
    source-operation insertions."""
    inputs = tuple(inputs)
    F.source._check_chain(inputs)
    d = len(inputs)
    total = {}
    for r in range(1, d + 1):
        for comp in _compositions_of(d, r):
            blocks = []
            pos = 0
            for span in comp:
                el = F.entry(inputs[pos:pos + span])
                pos += span
                if not el:
                    blocks = None
                    break
                blocks.append(el)
            if blocks is None:
                continue
            for combo in itertools.product(*(b.items() for b in blocks)):
                names = tuple(g for g, _ in combo)
                coeff = NovikovElement.one()
                for _, c in combo:
                    coeff = nov_mul(coeff, c)
                outer = F.target.mu_entry(names)
                for h, c2 in outer.items():
                    _add_term(total, h, nov_mul(coeff, c2))
    for m in range(1, d + 1):
        for n in range(0, d - m + 1):
            inner = F.source.mu_entry(inputs[n:n + m])
            if not inner:
                continue
            for g, c in inner.items():
                outer = F.entry(inputs[:n] + (g,) + inputs[n + m:])
                for h, c2 in outer.items():
                    _add_term(total, h, nov_mul(c, c2))
    return total


@dataclass
class FunctorShiftReport:
    raw: dict
    rho_star: Fraction


def functor_shift(F: AInfFunctor) -> FunctorShiftReport:
    """Smallest rho >= 0 such that level discrepancies of every
    component are covered by d*rho."""
    raw = {}
    for inputs, out in F.table.items():
        d = len(inputs)
        a_out = action_of_sum((c, F.target.gens[g].level) for g, c in out.items())
        if a_out.is_neg_inf:
            continue
        gap = a_out.value - sum(F.source.gens[g].level for g in inputs)
        if d not in raw or gap > raw[d]:
            raw[d] = gap
    rho = Fraction(0)
    for d, v in raw.items():
        rho = max(rho, Fraction(v, d))
    return FunctorShiftReport(raw, rho)


# -- text formats ------------------------------------------------------


def _kv_fields(parts, expected):
    out = {}
    for p in parts:
        if "=" not in p:
            raise ValueError("expected key=value, got %r" % p)
        k, _, v = p.partition("=")
        if k not in expected:
            raise ValueError("unknown field %r" % k)
        out[k] = v
    return out


def _split_names(text):
    return tuple(x for x in text.split(",") if x) if text else ()


def load_category(text: str) -> FilteredAInfCategory:
    """Line format: 'object X', 'gen SRC TGT NAME level=p/q ham=p/q',
    'mu d X0 .. Xd in=g1,..,gd out=g coeff=T^..'.  Multiple mu lines for
    the same inputs and output accumulate over Z2."""
    cat = FilteredAInfCategory()
    pending = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "object":
            if len(parts) != 2:
                raise ValueError("bad object line %r" % line)
            cat.add_object(parts[1])
        elif parts[0] == "gen":
            if len(parts) != 6:
                raise ValueError("bad gen line %r" % line)
            fields = _kv_fields(parts[4:], {"level", "ham"})
            cat.add_gen(parts[3], parts[1], parts[2],
                        Fraction(fields["level"]), Fraction(fields["ham"]))
        elif parts[0] == "mu":
            if len(parts) < 3:
                raise ValueError("bad mu line %r" % line)
            d = int(parts[1])
            objs = tuple(parts[2:2 + d + 1])
            fields = _kv_fields(parts[2 + d + 1:], {"in", "out", "coeff"})
            inputs = _split_names(fields["in"])
            if len(inputs) != d:
                raise ValueError("mu %d with %d inputs in %r" % (d, len(inputs), line))
            for g in inputs:
                if g not in cat.gens:
                    raise ValueError("unknown generator %r in %r" % (g, line))
            chain = tuple(cat.gens[g].source for g in inputs) + (cat.gens[inputs[-1]].target,)
            if objs != chain:
                raise ValueError("object path %s does not match inputs in %r" % (" ".join(objs), line))
            coeff = nov_from_text(fields["coeff"])
            key = (inputs, fields["out"])
            pending[key] = nov_add(pending[key], coeff) if key in pending else coeff
        else:
            raise ValueError("unknown line %r" % line)
    grouped = {}
    for (inputs, out), coeff in pending.items():
        grouped.setdefault(inputs, {})[out] = coeff
    for inputs, outs in grouped.items():
        cat.set_mu(inputs, outs)
    return cat


def dump_category(cat: FilteredAInfCategory) -> str:
    lines = []
    for obj in sorted(cat.objects):
        lines.append("object %s" % obj)
    for name in sorted(cat.gens):
        g = cat.gens[name]
        lines.append("gen %s %s %s level=%s ham=%s" % (g.source, g.target, name, g.level, g.ham))
    for inputs in sorted(cat.mu, key=lambda k: (len(k), k)):
        out = cat.mu[inputs]
        chain = tuple(cat.gens[g].source for g in inputs) + (cat.gens[inputs[-1]].target,)
        for o in sorted(out):
            lines.append(
                "mu %d %s in=%s out=%s coeff=%s"
                % (len(inputs), " ".join(chain), ",".join(inputs), o, nov_to_text(out[o]))
            )
    return "\n".join(lines) + "\n"


def load_linf(text: str) -> LInfinityAlgebra:
    """Line format: 'basis x', 'l n in=x,y out=x coeff=T^..'."""
    alg = LInfinityAlgebra()
    pending = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "basis":
            if len(parts) != 2:
                raise ValueError("bad basis line %r" % line)
            alg.add_basis(parts[1])
        elif parts[0] == "l":
            n = int(parts[1])
            fields = _kv_fields(parts[2:], {"in", "out", "coeff"})
            inputs = _split_names(fields["in"])
            if len(inputs) != n:
                raise ValueError("l %d with %d inputs in %r" % (n, len(inputs), line))
            key = (tuple(sorted(inputs)), fields["out"])
            coeff = nov_from_text(fields["coeff"])
            pending[key] = nov_add(pending[key], coeff) if key in pending else coeff
        else:
            raise ValueError("unknown line %r" % line)
    grouped = {}
    for (inputs, out), coeff in pending.items():
        grouped.setdefault(inputs, {})[out] = coeff
    for inputs, outs in grouped.items():
        alg.set_l(inputs, outs)
    return alg


def dump_linf(alg: LInfinityAlgebra) -> str:
    lines = ["basis %s" % b for b in alg.basis]
    for key in sorted(alg.l, key=lambda k: (len(k), k)):
        for o in sorted(alg.l[key]):
            lines.append(
                "l %d in=%s out=%s coeff=%s"
                % (len(key), ",".join(key), o, nov_to_text(alg.l[key][o]))
            )
    return "\n".join(lines) + "\n"


def load_ocha(text: str) -> OCHAStructure:
    """Line format: 'closed c', 'open o', 'l n in=.. out=.. coeff=..',
    'mu k d closed=c1,.. in=o1,.. out=o coeff=..'."""
    s = OCHAStructure()
    pending_l = {}
    pending_mu = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "closed":
            s.add_closed(parts[1])
        elif parts[0] == "open":
            s.add_open(parts[1])
        elif parts[0] == "l":
            n = int(parts[1])
            fields = _kv_fields(parts[2:], {"in", "out", "coeff"})
            inputs = _split_names(fields["in"])
            if len(inputs) != n:
                raise ValueError("l %d with %d inputs in %r" % (n, len(inputs), line))
            key = (tuple(sorted(inputs)), fields["out"])
            coeff = nov_from_text(fields["coeff"])
            pending_l[key] = nov_add(pending_l[key], coeff) if key in pending_l else coeff
        elif parts[0] == "mu":
            k = int(parts[1])
            d = int(parts[2])
            fields = _kv_fields(parts[3:], {"closed", "in", "out", "coeff"})
            closed = _split_names(fields.get("closed", ""))
            opens = _split_names(fields.get("in", ""))
            if len(closed) != k or len(opens) != d:
                raise ValueError("mu %d %d arity mismatch in %r" % (k, d, line))
            key = ((tuple(sorted(closed)), opens), fields["out"])
            coeff = nov_from_text(fields["coeff"])
            pending_mu[key] = nov_add(pending_mu[key], coeff) if key in pending_mu else coeff
        else:
            raise ValueError("unknown line %r" % line)
    grouped = {}
    for (key, out), coeff in pending_l.items():
        grouped.setdefault(key, {})[out] = coeff
    for key, outs in grouped.items():
        s.set_l(key, outs)
    grouped = {}
    for (key, out), coeff in pending_mu.items():
        grouped.setdefault(key, {})[out] = coeff
    for (closed, opens), outs in grouped.items():
        s.set_mu(closed, opens, outs)
    return s


def dump_ocha(s: OCHAStructure) -> str:
    lines = ["closed %s" % b for b in s.closed_basis]
    lines += ["open %s" % b for b in s.open_basis]
    for key in sorted(s.l, key=lambda k: (len(k), k)):
        for o in sorted(s.l[key]):
            lines.append(
                "l %d in=%s out=%s coeff=%s"
                % (len(key), ",".join(key), o, nov_to_text(s.l[key][o]))
            )
    for key in sorted(s.mu, key=lambda k: (len(k[0]) + len(k[1]), k)):
        closed, opens = key
        for o in sorted(s.mu[key]):
            lines.append(
                "mu %d %d closed=%s in=%s out=%s coeff=%s"
                % (len(closed), len(opens), ",".join(closed), ",".join(opens), o,
                   nov_to_text(s.mu[key][o]))
            )
    return "\n".join(lines) + "\n"


def load_functor(text: str, source: FilteredAInfCategory, target: FilteredAInfCategory) -> AInfFunctor:
    """Line format: 'obj X FX' object assignments, then components
    'F d X0 .. Xd in=g1,..,gd out=g coeff=..' with source objects."""
    object_map = {}
    component_lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "obj":
            if len(parts) != 3:
                raise ValueError("bad obj line %r" % line)
            object_map[parts[1]] = parts[2]
        elif parts[0] == "F":
            component_lines.append((line, parts))
        else:
            raise ValueError("unknown line %r" % line)
    F = AInfFunctor(source, target, object_map)
    pending = {}
    for line, parts in component_lines:
        d = int(parts[1])
        objs = tuple(parts[2:2 + d + 1])
        fields = _kv_fields(parts[2 + d + 1:], {"in", "out", "coeff"})
        inputs = _split_names(fields["in"])
        if len(inputs) != d:
            raise ValueError("F %d with %d inputs in %r" % (d, len(inputs), line))
        for g in inputs:
            if g not in source.gens:
                raise ValueError("unknown source generator %r in %r" % (g, line))
        chain = tuple(source.gens[g].source for g in inputs) + (source.gens[inputs[-1]].target,)
        if objs != chain:
            raise ValueError("object path does not match inputs in %r" % line)
        key = (inputs, fields["out"])
        coeff = nov_from_text(fields["coeff"])
        pending[key] = nov_add(pending[key], coeff) if key in pending else coeff
    grouped = {}
    for (inputs, out), coeff in pending.items():
        grouped.setdefault(inputs, {})[out] = coeff
    for inputs, outs in grouped.items():
        F.set_component(inputs, outs)
    return F


def dump_functor(F: AInfFunctor) -> str:
    lines = ["obj %s %s" % (x, F.object_map[x]) for x in sorted(F.object_map)]
    for inputs in sorted(F.table, key=lambda k: (len(k), k)):
        out = F.table[inputs]
        chain = tuple(F.source.gens[g].source for g in inputs) + (F.source.gens[inputs[-1]].target,)
        for o in sorted(out):
            lines.append(
                "F %d %s in=%s out=%s coeff=%s"
                % (len(inputs), " ".join(chain), ",".join(inputs), o, nov_to_text(out[o]))
            )
    return "\n".join(lines) + "\n"
