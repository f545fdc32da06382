import pytest
from hypothesis import HealthCheck, given, settings
from oracles import Naive, naive_interpretation
from strategies import DELTA, DELTA_PRIME, OMEGA, SELF_APP, small_bang_terms, small_lambda_terms

from bangcalc import relsem
from bangcalc.relsem import (
    check_cbv_inclusion,
    check_factorization_cbn,
    check_invariance,
    derivable,
    interpret,
)
from bangcalc.reltypes import EMPTY, Arrow, Bound, Mset, enumerate_types, judgement_in_bound, parse_type
from bangcalc.syntax import App, Bang, Der, Lam, Var, free_vars, parse_bang, parse_lambda, rename_apart
from bangcalc.translate import cbv

x, y = Var("x"), Var("y")
SMALL = Bound(2, 2, 8)
WIDE = Bound(3, 2, 20)
WITNESS = parse_type("[[[] -o [] -o []] -o [] -o []]")
ALPHA = Arrow(EMPTY, EMPTY)


def _expected_axiom(bound):
    return {
        ((Mset([a]),), a)
        for a in enumerate_types(bound)
        if judgement_in_bound((Mset([a]),), a, bound)
    }


class TestDerivable:
    def test_axiom(self):
        for a in enumerate_types(Bound(2, 2, 6)):
            assert derivable("bang", {"x": Mset([a])}, x, a, Bound(2, 2, 14))

    def test_no_weakening(self):
        for a in enumerate_types(Bound(1, 1, 3)):
            assert not derivable("bang", {"x": Mset([a, EMPTY])}, x, a, SMALL)

    def test_self_application_box(self):
        # [[[] -o alpha] -o alpha] with alpha = [] -o []
        assert WITNESS == Mset([Arrow(Mset([Arrow(EMPTY, ALPHA)]), ALPHA)])
        assert derivable("bang", {}, Bang(DELTA_PRIME), WITNESS, WIDE)

    def test_strictness_of_cbv(self):
        assert not derivable("cbv", {}, SELF_APP, WITNESS, WIDE)

    def test_out_of_bound_is_false(self):
        assert not derivable("bang", {"x": Mset([WITNESS])}, x, WITNESS, SMALL)

    def test_oracle_system(self):
        assert derivable("cbn_oracle", {}, parse_lambda(r"\x. x"), Arrow(Mset([EMPTY]), EMPTY), SMALL)


class TestInterpret:
    def test_psem_variable(self):
        assert interpret("psem", x, ("x",), SMALL).items == _expected_axiom(SMALL)

    def test_intv_variable(self):
        expected = {((a,), a) for a in enumerate_types(SMALL) if a[0] == 0 and judgement_in_bound((a,), a, SMALL)}
        assert interpret("intv", x, ("x",), SMALL).items == expected

    def test_box_of_variable_matches_intv(self):
        assert interpret("psem", Bang(x), ("x",), SMALL).items == interpret("intv", x, ("x",), SMALL).items

    def test_extra_variables_get_empty(self):
        js = interpret("psem", x, ("x", "y"), SMALL)
        assert js.vars == ("x", "y")
        assert all(env[1] == EMPTY for env, _ in js.items)

    def test_free_variables_must_be_listed(self):
        with pytest.raises(ValueError):
            interpret("psem", x, (), SMALL)

    def test_repeated_variables(self):
        with pytest.raises(ValueError):
            interpret("psem", x, ("x", "x"), SMALL)

    def test_lambda_systems_reject_bang_terms(self):
        with pytest.raises(TypeError):
            interpret("intv", Bang(x), ("x",), SMALL)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            interpret("scott", x, ("x",), SMALL)

    def test_json_is_sorted(self):
        data = interpret("intv", x, ("x",), Bound(1, 1, 4)).to_json()
        assert data == [
            {"env": {"x": "[]"}, "type": "[]"},
            {"env": {"x": "[[]]"}, "type": "[[]]"},
        ]


class TestFactorization:
    def test_identity(self):
        v = check_factorization_cbn(parse_lambda(r"\x. x"), (), SMALL)
        assert v.equal
        expected = {
            ((), Arrow(Mset([a]), a)) for a in enumerate_types(SMALL) if judgement_in_bound((), Arrow(Mset([a]), a), SMALL)
        }
        assert interpret("psem", parse_bang(r"\x. x"), (), SMALL).items == expected
        assert v.sizes == (len(expected), len(expected))

    def test_variable(self):
        v = check_factorization_cbn(x, ("x",), SMALL)
        assert v.equal and v.sizes[0] == len(_expected_axiom(SMALL))

    def test_omega_is_empty(self):
        for bound in (SMALL, Bound(3, 2, 12)):
            v = check_factorization_cbn(OMEGA, (), bound)
            assert v.equal and v.sizes == (0, 0)

    def test_wide_bound_sample(self):
        v = check_factorization_cbn(parse_lambda(r"\f. f (f y)"), ("y",), Bound(3, 2, 12))
        assert v.equal and v.sizes[0] > 0


class TestInclusion:
    def test_self_application(self):
        r = check_cbv_inclusion(SELF_APP, (), WIDE)
        assert r.inclusion_holds
        assert ((), WITNESS) in r.strict_witnesses

    def test_self_application_smallest_witness(self):
        r = check_cbv_inclusion(SELF_APP, (), Bound(3, 2, 11))
        assert r.strict_witnesses == [((), WITNESS)]

    def test_variable_equality(self):
        r = check_cbv_inclusion(x, ("x",), WIDE)
        assert r.inclusion_holds and r.strict_witnesses == []

    def test_identity(self):
        # every type of a box is a multiset, and the two sets coincide
        r = check_cbv_inclusion(parse_lambda(r"\x. x"), (), WIDE)
        assert r.inclusion_holds and r.strict_witnesses == []
        assert all(ty[0] == 0 for _, ty in interpret("psem", cbv(parse_lambda(r"\x. x")), (), WIDE).items)

    def test_json(self):
        data = check_cbv_inclusion(SELF_APP, (), Bound(3, 2, 11)).to_json()
        assert data == {
            "inclusion_holds": True,
            "missing": [],
            "strict_witnesses": [{"env": {}, "type": "[[[] -o [] -o []] -o [] -o []]"}],
        }


class TestInvariance:
    def test_dereliction(self):
        v = check_invariance(Der(Bang(DELTA)), 1, (), WIDE)
        assert v.equal and v.reducts_checked == 1

    def test_value_step(self):
        v = check_invariance(App(Lam("x", Bang(x)), Bang(y)), 1, ("y",), WIDE)
        assert v.equal and v.reducts_checked == 1

    def test_normal(self):
        v = check_invariance(Bang(DELTA), 3, (), WIDE)
        assert v.equal and v.reducts_checked == 0

    def test_cyclic_term(self):
        v = check_invariance(App(Der(Bang(DELTA_PRIME)), Bang(DELTA_PRIME)), 3, (), WIDE)
        assert v.equal and v.reducts_checked >= 1


class TestGuard:
    def test_scheme_explosion_is_reported(self, monkeypatch):
        monkeypatch.setattr(relsem, "MAX_SCHEMES", 3)
        with pytest.raises(relsem.SchemeExplosion):
            interpret("psem", parse_bang(r"\f. f !(f !(f !y))"), ("y",), WIDE)


# ----------------------------------------------- against the naive oracle

ORACLE = Bound(2, 2, 7)
MID = Bound(2, 2, 8)
SYSTEM = {"bang": "psem", "cbv": "intv", "cbn": "intn_oracle"}


def _oracle_subset(system, t):
    vars_ = tuple(sorted(free_vars(t)))
    naive = naive_interpretation(system, rename_apart(t, set(vars_)), vars_, ORACLE, MID)
    engine = interpret(SYSTEM[system], t, vars_, ORACLE).items
    assert naive <= engine


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_bang_terms.filter(lambda t: len(free_vars(t)) <= 1))
def test_engine_contains_naive_bang(t):
    _oracle_subset("bang", t)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_lambda_terms.filter(lambda t: len(free_vars(t)) <= 1))
def test_engine_contains_naive_lambda(t):
    _oracle_subset("cbv", t)
    _oracle_subset("cbn", t)


# Judgements whose derivations pass through larger intermediate types; the
# naive checker confirms each one once its intermediate window is widened.
@pytest.mark.parametrize(
    "system, text",
    [
        ("cbn", "x x"),
        ("cbv", "x x"),
        ("bang", r"(\y. y) !y"),
        ("cbv", r"(\x. \x. x) \x. x"),
        ("bang", r"der ((\y. x) !x)"),
        ("bang", r"\x. x !x"),
    ],
)
def test_engine_judgements_are_derivable(system, text):
    t = parse_bang(text) if system == "bang" else parse_lambda(text)
    vars_ = tuple(sorted(free_vars(t)))
    naive = Naive(system, Bound(3, 2, 10))
    subject = rename_apart(t, set(vars_))
    for env, ty in interpret(SYSTEM[system], t, vars_, ORACLE).items:
        assert naive.derivable(vars_, env, subject, ty)


# ------------------------------------------------------------ properties


@settings(max_examples=40, deadline=None)
@given(small_lambda_terms)
def test_intv_results_are_multisets(t):
    js = interpret("intv", t, sorted(free_vars(t)), Bound(2, 2, 10))
    assert all(ty[0] == 0 for _, ty in js.items)


@settings(max_examples=40, deadline=None)
@given(small_lambda_terms)
def test_derived_rules_match_translation(t):
    vars_ = sorted(free_vars(t))
    bound = Bound(3, 2, 12)
    assert interpret("psem", cbv(t), vars_, bound).items == interpret("cbv_macro", t, vars_, bound).items


@settings(max_examples=40, deadline=None)
@given(small_bang_terms)
def test_monotone_in_bounds(t):
    vars_ = sorted(free_vars(t))
    small = interpret("psem", t, vars_, Bound(2, 1, 8)).items
    for bigger in (Bound(3, 1, 8), Bound(2, 2, 8), Bound(2, 1, 10)):
        assert small <= interpret("psem", t, vars_, bigger).items


@settings(max_examples=40, deadline=None)
@given(small_bang_terms)
def test_alpha_invariance(t):
    vars_ = sorted(free_vars(t))
    renamed = rename_apart(t, {"x", "y", "z", "w"})
    assert interpret("psem", t, vars_, SMALL).items == interpret("psem", renamed, vars_, SMALL).items


@settings(max_examples=40, deadline=None)
@given(small_lambda_terms)
def test_factorization_property(t):
    assert check_factorization_cbn(t, sorted(free_vars(t)), Bound(3, 2, 12)).equal


@settings(max_examples=40, deadline=None)
@given(small_lambda_terms)
def test_inclusion_property(t):
    assert check_cbv_inclusion(t, sorted(free_vars(t)), Bound(3, 2, 12)).inclusion_holds


@settings(max_examples=40, deadline=None)
@given(small_bang_terms)
def test_invariance_property(t):
    assert check_invariance(t, 2, sorted(free_vars(t)), Bound(3, 2, 12)).equal
