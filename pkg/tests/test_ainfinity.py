import importlib.resources
import itertools
import random
from fractions import Fraction

import pytest

import oracles
from fukaya_workbench import NovikovElement
from fukaya_workbench.ainfinity import (AInfFunctor, FilteredAInfCategory,
                                        LInfinityAlgebra, OCHAStructure, ainf_defect,
                                        check_strict_unit, dump_category, dump_functor,
                                        dump_linf, dump_ocha, element_to_text,
                                        find_ainf_violation, functor_defect,
                                        functor_shift, linf_defect, load_category,
                                        load_functor, load_linf, load_ocha,
                                        measure_discrepancies, ocha_defect,
                                        ocha_specialization_report,
                                        open_sector_category)

ONE = NovikovElement.one()


def bundled(name):
    return importlib.resources.files("fukaya_workbench").joinpath("data/%s" % name).read_text()


def exterior():
    return load_category(bundled("exterior.cat"))


def mu2_table(cat):
    return {ins: {g: el.exps for g, el in outs.items()}
            for ins, outs in cat.mu.items() if len(ins) == 2}


def defect_exps(defect):
    return {g: el.exps for g, el in defect.items()}


# -- the exterior fixture ----------------------------------------------


def test_exterior_satisfies_relations():
    cat = exterior()
    assert find_ainf_violation(cat, 5) is None


def test_exterior_dump_round_trip():
    text = bundled("exterior.cat")
    assert dump_category(load_category(text)) == text


def test_exterior_unit_and_filtration():
    cat = exterior()
    assert check_strict_unit(cat, "M", "e").ok
    rep = measure_discrepancies(cat, units={"M": "e"})
    assert rep.raw == {2: Fraction(0)}
    assert rep.eps == {2: Fraction(0)}
    assert rep.unit_levels == {"M": Fraction(0)}
    assert rep.is_filtered


def test_composable_tuples_one_object():
    cat = exterior()
    assert len(list(cat.composable_tuples(2))) == 16
    assert list(cat.composable_tuples(1)) == [("a",), ("ab",), ("b",), ("e",)]


# -- defect detection against the associator oracle --------------------


def test_blind_deformation_keeps_relations():
    # killing only mu2(a,b) leaves an associative product (every product
    # involving ab vanishes), so a zero defect is the correct verdict
    cat = exterior()
    cat.set_mu(("a", "b"), {})
    assert not oracles.associativity_violations(mu2_table(cat), sorted(cat.gens))
    assert find_ainf_violation(cat, 4) is None


def test_unit_valued_product_breaks_relations():
    cat = exterior()
    cat.set_mu(("a", "b"), {"e": ONE})
    table = mu2_table(cat)
    broken = oracles.associativity_violations(table, sorted(cat.gens))
    assert broken
    found = find_ainf_violation(cat, 3)
    assert found is not None
    inputs, defect = found
    assert len(inputs) == 3
    assert defect_exps(defect) == dict(broken)[inputs]


def test_defect_matches_oracle_on_every_triple():
    cat = exterior()
    cat.set_mu(("e", "e"), {"e": NovikovElement([0, Fraction(1, 2)])})
    table = mu2_table(cat)
    for tup in cat.composable_tuples(3):
        assert defect_exps(ainf_defect(cat, tup)) == oracles.associator(table, *tup)


def test_defect_rejects_bad_chains():
    cat = load_category(bundled("weakly.cat"))
    with pytest.raises(ValueError):
        ainf_defect(cat, ("g", "f"))
    with pytest.raises(ValueError):
        ainf_defect(cat, ())


# -- strict unit localization ------------------------------------------


def test_unit_violation_in_higher_arity():
    cat = exterior()
    cat.set_mu(("a", "e", "b"), {"ab": ONE})
    rep = check_strict_unit(cat, "M", "e")
    assert not rep.ok
    v = rep.first
    assert (v.d, v.slot, v.inputs) == (3, 2, ("a", "e", "b"))
    assert v.found == {"ab": ONE}
    assert v.expected == {}


def test_unit_violation_in_mu2():
    cat = exterior()
    cat.set_mu(("e", "a"), {"a": ONE, "ab": ONE})
    rep = check_strict_unit(cat, "M", "e")
    assert not rep.ok
    v = rep.first
    assert (v.d, v.slot, v.inputs) == (2, 1, ("e", "a"))
    assert v.found == {"a": ONE, "ab": ONE}
    assert v.expected == {"a": ONE}


def test_unit_argument_validation():
    cat = exterior()
    with pytest.raises(ValueError):
        check_strict_unit(cat, "M", "nope")
    weak = load_category(bundled("weakly.cat"))
    with pytest.raises(ValueError):
        check_strict_unit(weak, "A", "f")


# -- discrepancy measurement -------------------------------------------


def test_weakly_filtered_fixture():
    rep = measure_discrepancies(load_category(bundled("weakly.cat")))
    assert rep.raw == {2: Fraction(1, 2)}
    assert rep.eps == {2: Fraction(1, 2)}
    assert not rep.is_filtered


def chain_category(shift=Fraction(0)):
    cat = FilteredAInfCategory()
    for obj in ("A", "B", "C"):
        cat.add_object(obj)
    cat.add_gen("f", "A", "B", level=Fraction(1, 4) + shift)
    cat.add_gen("g", "B", "C", level=Fraction(1, 6) + shift)
    cat.add_gen("h", "A", "C", level=Fraction(0) + shift)
    cat.set_mu(("f", "g"), {"h": NovikovElement.monomial(Fraction(3, 4))})
    return cat


def test_negative_gap_is_clamped():
    rep = measure_discrepancies(chain_category())
    assert rep.raw == {2: Fraction(-7, 6)}
    assert rep.eps == {2: Fraction(0)}
    assert rep.is_filtered


def test_level_shift_moves_raw_gap():
    base = measure_discrepancies(chain_category()).raw[2]
    for c in (Fraction(1, 2), Fraction(-2), Fraction(7, 3)):
        shifted = measure_discrepancies(chain_category(shift=c)).raw[2]
        assert shifted == base + (1 - 2) * c


def test_positive_unit_level_blocks_filtration():
    cat = exterior()
    cat.gens["e"] = cat.gens["e"].__class__("e", "M", "M", Fraction(1, 4), Fraction(0))
    rep = measure_discrepancies(cat, units={"M": "e"})
    assert rep.unit_levels == {"M": Fraction(1, 4)}
    assert not rep.is_filtered
    with pytest.raises(ValueError):
        measure_discrepancies(cat, units={"M": "nope"})


# -- L-infinity --------------------------------------------------------


def abelian_linf():
    alg = LInfinityAlgebra()
    alg.add_basis("x")
    alg.add_basis("y")
    alg.set_l(("x", "y"), {"x": ONE})
    return alg


def test_linf_fixture_satisfies_relations():
    alg = abelian_linf()
    for n in range(1, 5):
        for tup in itertools.product(alg.basis, repeat=n):
            assert linf_defect(alg, tup) == {}


def test_linf_broken_bracket_detected():
    alg = abelian_linf()
    alg.set_l(("x", "x"), {"y": ONE})
    # three splits of (x,x,x) each contribute l2(l2(x,x), x) = x
    assert linf_defect(alg, ("x", "x", "x")) == {"x": ONE}
    # on (x,x,y) the two mixed splits cancel over Z2
    assert linf_defect(alg, ("x", "x", "y")) == {}


def test_linf_symmetric_storage():
    alg = abelian_linf()
    assert alg.l_entry(("y", "x")) == {"x": ONE}
    with pytest.raises(ValueError):
        alg.set_l((), {})
    with pytest.raises(ValueError):
        alg.set_l(("z",), {})
    with pytest.raises(ValueError):
        linf_defect(alg, ())


def test_linf_dump_load_round_trip():
    alg = abelian_linf()
    text = dump_linf(alg)
    assert text == "basis x\nbasis y\nl 2 in=x,y out=x coeff=T^0\n"
    again = load_linf(text)
    assert again.l == alg.l and again.basis == alg.basis


# -- open-closed structures --------------------------------------------


def random_open_structure(rng):
    s = OCHAStructure()
    s.add_closed("c")
    for name in ("p", "q"):
        s.add_open(name)
    exps = (Fraction(0), Fraction(1, 2), Fraction(1))
    for d in range(1, 4):
        for opens in itertools.product(s.open_basis, repeat=d):
            out = {}
            for g in s.open_basis:
                coeff = NovikovElement(e for e in exps if rng.random() < 0.3)
                if not coeff.is_zero:
                    out[g] = coeff
            s.set_mu((), opens, out)
    return s


def test_ocha_with_no_closed_inputs_is_ainf():
    rng = random.Random(7)
    for _ in range(50):
        s = random_open_structure(rng)
        cat = open_sector_category(s)
        for d in range(1, 4):
            for tup in itertools.product(s.open_basis, repeat=d):
                assert ocha_defect(s, (), tup) == ainf_defect(cat, tup)


def test_ocha_closed_insertion_fires():
    s = OCHAStructure()
    s.add_closed("c")
    s.add_open("a")
    s.set_l(("c",), {"c": ONE})
    s.set_mu(("c",), ("a",), {"a": ONE})
    # the only term is mu_{1,1}(l1(c); a) = a
    assert ocha_defect(s, ("c",), ("a",)) == {"a": ONE}


def test_ocha_validation():
    s = OCHAStructure()
    s.add_closed("c")
    s.add_open("a")
    with pytest.raises(ValueError):
        s.set_mu((), (), {})
    with pytest.raises(ValueError):
        s.set_mu(("zz",), ("a",), {})
    with pytest.raises(ValueError):
        s.set_l(("a",), {})
    with pytest.raises(ValueError):
        s.add_closed("c")


def test_ocha_specialization_report():
    s = OCHAStructure()
    for name in ("x", "y"):
        s.add_closed(name)
    for name in ("a", "ab", "b", "e"):
        s.add_open(name)
    s.set_l(("x", "y"), {"x": ONE})
    for inputs, out in exterior().mu.items():
        s.set_mu((), inputs, dict(out))
    rep = ocha_specialization_report(s, max_open=3, max_closed=3)
    assert rep.open_sector_matches
    assert rep.open_mismatches == ()
    assert rep.closed_sector_consistent


def test_ocha_dump_load_round_trip():
    s = OCHAStructure()
    s.add_closed("c")
    s.add_open("a")
    s.set_l(("c", "c"), {"c": NovikovElement.monomial(Fraction(1, 2))})
    s.set_mu(("c",), ("a",), {"a": ONE})
    s.set_mu((), ("a", "a"), {"a": NovikovElement([0, 1])})
    text = dump_ocha(s)
    again = load_ocha(text)
    assert again.l == s.l and again.mu == s.mu
    assert dump_ocha(again) == text


# -- functors ----------------------------------------------------------


def identity_functor(source, target):
    F = AInfFunctor(source, target, {"M": "M"})
    for g in source.gens:
        F.set_component((g,), {g: ONE})
    return F


def test_identity_functor_has_zero_defect():
    cat = exterior()
    F = identity_functor(cat, cat)
    for d in range(1, 4):
        for tup in cat.composable_tuples(d):
            assert functor_defect(F, tup) == {}
    rep = functor_shift(F)
    assert rep.rho_star == 0
    assert rep.raw == {1: Fraction(0)}


def test_functor_shift_with_raised_target_levels():
    source = exterior()
    target = exterior()
    for name, g in list(target.gens.items()):
        target.gens[name] = g.__class__(name, "M", "M", g.level + Fraction(1, 2), g.ham)
    F = identity_functor(source, target)
    for tup in source.composable_tuples(2):
        assert functor_defect(F, tup) == {}
    rep = functor_shift(F)
    assert rep.raw == {1: Fraction(1, 2)}
    assert rep.rho_star == Fraction(1, 2)


def test_partial_functor_detected():
    cat = exterior()
    F = AInfFunctor(cat, cat, {"M": "M"})
    for g in ("a", "b", "e"):
        F.set_component((g,), {g: ONE})
    assert functor_defect(F, ("a", "b")) == {"ab": ONE}


def test_functor_validation():
    cat = exterior()
    with pytest.raises(ValueError):
        AInfFunctor(cat, cat, {"M": "nope"})
    with pytest.raises(ValueError):
        AInfFunctor(cat, cat, {})
    weak = load_category(bundled("weakly.cat"))
    with pytest.raises(ValueError):
        AInfFunctor(weak, weak, {"A": "A"})


def test_functor_dump_load_round_trip():
    cat = exterior()
    F = identity_functor(cat, cat)
    F.set_component(("a", "b"), {"ab": NovikovElement.monomial(Fraction(1, 2))})
    text = dump_functor(F)
    again = load_functor(text, cat, cat)
    assert again.table == F.table and again.object_map == F.object_map
    assert dump_functor(again) == text


# -- serialization details ---------------------------------------------


def test_element_to_text():
    el = {"b": NovikovElement.monomial(Fraction(1, 2)), "a": ONE}
    assert element_to_text(el) == "a*(T^0) + b*(T^1/2)"
    assert element_to_text({}) == "0"


def test_duplicate_mu_lines_cancel():
    text = bundled("exterior.cat") + "mu 2 M M M in=a,b out=ab coeff=T^0\n"
    cat = load_category(text)
    assert cat.mu_entry(("a", "b")) == {}


def test_load_category_errors():
    with pytest.raises(ValueError):
        load_category("object M\nwhat is this\n")
    with pytest.raises(ValueError):
        load_category("object M\ngen M M a level=0\n")
    with pytest.raises(ValueError):
        load_category("object M\ngen M M a level=0 ham=0\nmu 1 M M in=a,a out=a coeff=T^0\n")
    with pytest.raises(ValueError):
        load_category("object M\ngen M M a level=0 ham=0\nmu 1 M Q in=a out=a coeff=T^0\n")


def test_category_validation():
    cat = FilteredAInfCategory()
    cat.add_object("A")
    with pytest.raises(ValueError):
        cat.add_object("A")
    cat.add_gen("f", "A", "A")
    with pytest.raises(ValueError):
        cat.add_gen("f", "A", "A")
    with pytest.raises(ValueError):
        cat.add_gen("g", "A", "Z")
    with pytest.raises(ValueError):
        cat.add_gen("h", "A", "A", level=0.5)
    with pytest.raises(ValueError):
        cat.set_mu(("f",), {"zz": ONE})
