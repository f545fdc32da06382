import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import DELTA, DELTA_PRIME, OMEGA, bang_terms, small_bang_terms

from bangcalc import rewrite
from bangcalc.rewrite import (
    InvalidRedex,
    Redex,
    RelationSpec,
    bang,
    development,
    is_normal,
    join,
    lam,
    parallel_reducts,
    parallel_related,
    redexes,
    reduce,
    reduce_lambda,
    step,
    successors,
)
from bangcalc.syntax import App, Bang, Der, Lam, Var, alpha_eq, parse_bang, parse_lambda, subterm

x, y = Var("x"), Var("y")
DD = App(DELTA, Bang(DELTA))
GROUND_B = bang("b", True)
FULL_B = bang("b", False)


class TestRelationSpec:
    def test_kind_must_match_calculus(self):
        with pytest.raises(ValueError):
            RelationSpec("bang", "beta", False)
        with pytest.raises(ValueError):
            RelationSpec("lambda", "v", False)


class TestRedexes:
    def test_delta_bang_delta(self):
        assert redexes(DD, GROUND_B) == [Redex((), "v", True)]

    def test_box_hides_ground_redex(self):
        assert redexes(Bang(DD), GROUND_B) == []

    def test_full_reaches_under_box(self):
        assert redexes(Bang(DD), FULL_B) == [Redex(("body",), "v", False)]

    def test_leftmost_outermost_order(self):
        t = parse_bang(r"(\x. der !x) !(der !y)")
        got = [(r.position, r.kind) for r in redexes(t, FULL_B)]
        assert got == [((), "v"), (("fun", "body"), "d"), (("arg", "body"), "d")]

    def test_kind_filter(self):
        t = parse_bang(r"(\x. der !x) !y")
        assert [r.kind for r in redexes(t, bang("d", True))] == ["d"]
        assert [r.kind for r in redexes(t, bang("v", True))] == ["v"]

    def test_redex_shapes(self):
        t = parse_bang(r"der !((\x. der !x) !(der !y))")
        for r in redexes(t, FULL_B):
            sub = subterm(t, r.position)
            if r.kind == "v":
                assert isinstance(sub, App) and isinstance(sub.fun, Lam) and isinstance(sub.arg, Bang)
            else:
                assert isinstance(sub, Der) and isinstance(sub.body, Bang)
            boxed = any(isinstance(subterm(t, r.position[:i]), Bang) for i in range(len(r.position)))
            assert r.ground is not boxed


class TestStep:
    def test_delta_prime_to_delta(self):
        r = redexes(DELTA_PRIME, bang("d", True))
        assert r == [Redex(("body", "fun"), "d", True)]
        assert step(DELTA_PRIME, r[0]) == DELTA

    def test_delta_loop(self):
        assert alpha_eq(step(DD, Redex((), "v", True)), DD)

    def test_dereliction(self):
        assert step(Der(Bang(y)), Redex((), "d", True)) == y

    def test_invalid(self):
        with pytest.raises(InvalidRedex):
            step(y, Redex((), "d", True))
        with pytest.raises(InvalidRedex):
            step(Der(Bang(y)), Redex((), "v", True))


class TestReduce:
    def test_der_bang_delta_prime_cycles_with_period_two(self):
        t = App(Der(Bang(DELTA_PRIME)), Bang(DELTA_PRIME))
        trace = reduce(t, GROUND_B, 50)
        assert [s.redex.kind for s in trace.steps] == ["d", "v"]
        assert trace.outcome.kind == "cycle" and trace.outcome.period == 2
        assert alpha_eq(trace.steps[0].result, App(DELTA_PRIME, Bang(DELTA_PRIME)))

    def test_delta_bang_delta_cycles(self):
        trace = reduce(DD, GROUND_B, 50)
        assert len(trace.steps) == 1
        assert trace.outcome.kind == "cycle" and trace.outcome.period == 1

    def test_identity_is_normal(self):
        trace = reduce(Lam("x", x), FULL_B, 50)
        assert trace.steps == [] and trace.outcome.kind == "normal"

    def test_budget(self):
        trace = reduce(DD, GROUND_B, 3, detect_cycles=False)
        assert len(trace.steps) == 3 and trace.outcome.kind == "budget_exhausted"

    def test_zero_budget(self):
        assert reduce(DD, GROUND_B, 0).outcome.kind == "budget_exhausted"

    def test_negative_budget(self):
        with pytest.raises(ValueError):
            reduce(DD, GROUND_B, -1)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            reduce(DD, GROUND_B, 1, strategy="random")

    def test_json(self):
        data = reduce(DELTA_PRIME, GROUND_B, 10).to_json()
        assert data == {
            "initial": r"\x. der !x !x",
            "steps": [{"path": ["body", "fun"], "kind": "d", "result": r"\x. x !x"}],
            "outcome": "normal",
        }
        assert reduce(DD, GROUND_B).to_json()["outcome"] == {"cycle": 1}


class TestLambda:
    def test_omega_cycles(self):
        trace = reduce_lambda(OMEGA, lam("beta"), 20)
        assert trace.outcome.kind == "cycle" and trace.outcome.period == 1

    def test_betav_needs_value(self):
        trace = reduce_lambda(parse_lambda(r"(\x. x) (y z)"), lam("betav"), 20)
        assert trace.steps == [] and trace.outcome.kind == "normal"

    def test_betav_value(self):
        trace = reduce_lambda(parse_lambda(r"(\x. x) \y. y"), lam("betav"), 20)
        assert len(trace.steps) == 1
        assert trace.final == parse_lambda(r"\y. y")

    def test_ground_beta_contexts(self):
        spec = lam("beta", True)
        assert not is_normal(parse_lambda(r"\x. (\y. y) x"), spec)
        assert is_normal(parse_lambda(r"x ((\y. y) z)"), spec)
        assert not is_normal(parse_lambda(r"x ((\y. y) z)"), lam("beta"))

    def test_ground_betav_contexts(self):
        spec = lam("betav", True)
        assert is_normal(parse_lambda(r"\x. (\y. y) x"), spec)
        assert not is_normal(parse_lambda(r"x ((\y. y) z)"), spec)
        assert not is_normal(parse_lambda(r"\x. (\y. y) x"), lam("betav"))

    def test_requires_lambda_spec(self):
        with pytest.raises(ValueError):
            reduce_lambda(OMEGA, FULL_B)


class TestParallel:
    def test_reflexive(self):
        for t in (DD, DELTA, Bang(DD), x):
            assert parallel_related(t, t)

    def test_v_rule(self):
        # (x !x)[delta/x] is the term itself, reached through the v rule
        assert parallel_related(DD, DD)
        assert alpha_eq(parallel_reducts(DD)[0], DD)

    def test_distinct_variables(self):
        assert not parallel_related(x, y)

    def test_simultaneous(self):
        t = parse_bang(r"(\x. x) !((\y. y) !z)")
        assert parallel_related(t, Var("z"))
        assert not rewrite.steps_to(t, Var("z"), bang("v"))

    def test_d_redex_not_parallel_v(self):
        assert not parallel_related(Der(Bang(y)), y)


class TestDevelopment:
    def test_variable(self):
        assert development(x) == x

    def test_delta_bang_delta(self):
        assert alpha_eq(development(DD), DD)

    def test_discarding(self):
        assert development(App(Lam("x", y), Bang(DELTA))) == y

    def test_nested(self):
        t = parse_bang(r"(\x. x) !((\y. y) !z)")
        assert development(t) == Var("z")


class TestJoin:
    def test_v_d_peak(self):
        t = App(Lam("x", Der(Bang(x))), Bang(y))
        reducts = [s for _, s in successors(t, FULL_B)]
        assert len(reducts) == 2
        result = join(reducts[0], reducts[1], FULL_B, 100)
        assert result is not None and result.common == y
        assert len(result.trace1.steps) == len(result.trace2.steps) == 1

    def test_same_term(self):
        result = join(DD, DD, FULL_B, 10)
        assert result.common == DD
        assert result.trace1.steps == [] and result.trace2.steps == []

    def test_budget_exhausted(self):
        assert join(DD, Var("y"), FULL_B, 50) is None

    def test_traces_are_valid(self):
        t = parse_bang(r"(\x. der x) !(der !y)")
        reducts = [s for _, s in successors(t, FULL_B)]
        result = join(reducts[0], reducts[1], FULL_B, 100)
        for trace in (result.trace1, result.trace2):
            current = trace.initial
            for st_ in trace.steps:
                assert alpha_eq(step(current, st_.redex), st_.result)
                current = st_.result
            assert alpha_eq(current, result.common)


class TestNormal:
    def test_examples(self):
        assert is_normal(Bang(DD), GROUND_B)
        assert not is_normal(Bang(DD), FULL_B)
        assert is_normal(Bang(DELTA), FULL_B)
        assert not is_normal(DELTA_PRIME, FULL_B)

    def test_full_b_on_boxed_loop_cycles(self):
        trace = reduce(Bang(DD), FULL_B, 20)
        assert trace.outcome.kind == "cycle" and trace.outcome.period == 1


# ----------------------------------------------------------- properties


@given(bang_terms)
def test_quasi_strong_confluence(t):
    for kind, ground in (("b", True), ("v", True), ("d", True), ("d", False)):
        assert rewrite.peak_failures(t, bang(kind, ground)) == []


@given(bang_terms)
def test_strong_commutation_of_ground_d_over_v(t):
    assert rewrite.commutation_failures(t, ground=True) == []


@given(bang_terms)
def test_ground_redexes_are_redexes(t):
    for kind in ("v", "d", "b"):
        full = {(r.position, r.kind) for r in redexes(t, bang(kind))}
        assert {(r.position, r.kind) for r in redexes(t, bang(kind, True))} <= full


@given(bang_terms)
def test_strategy_is_deterministic_and_traces_are_valid(t):
    one, two = reduce(t, GROUND_B, 10), reduce(t, GROUND_B, 10)
    assert one.to_json() == two.to_json()
    current = t
    for s in one.steps:
        assert s.redex in redexes(current, GROUND_B)
        current = step(current, s.redex)
        assert current == s.result
    if one.outcome.kind == "normal":
        assert is_normal(one.final, GROUND_B)


@given(small_bang_terms, st.randoms(use_true_random=False))
def test_development_lemma(t, rnd):
    s = rnd.choice(parallel_reducts(t))
    assert parallel_related(t, s)
    assert parallel_related(s, development(t))


@given(bang_terms)
def test_v_step_is_parallel(t):
    for _, s in successors(t, bang("v")):
        assert parallel_related(t, s)


@given(bang_terms)
def test_development_is_parallel_reduct(t):
    assert parallel_related(t, development(t))


@settings(max_examples=50)
@given(bang_terms, st.randoms(use_true_random=False))
def test_confluence_of_b(t, rnd):
    def walk(u):
        for _ in range(rnd.randint(0, 4)):
            succ = successors(u, FULL_B)
            if not succ:
                break
            u = rnd.choice(succ)[1]
        return u

    assert join(walk(t), walk(t), FULL_B, 10_000) is not None
