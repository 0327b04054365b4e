import random
from fractions import Fraction

import pytest

from contractsynth.core.errors import RejectedInputError
from contractsynth.core.logic import (
    FALSE,
    TRUE,
    Add,
    And,
    BoolConst,
    Cmp,
    FIte,
    Iff,
    Implies,
    IntConst,
    IntDiv,
    Ite,
    Neg,
    Not,
    Or,
    RealConst,
    Scale,
    Sort,
    Sub,
    Var,
    conj,
    conjuncts,
    evaluate,
    free_symbols,
    linear_form,
    negate,
    normalize,
    rename,
    simplify,
    split_linear,
    substitute,
)

x = Var("x", Sort.INT)
y = Var("y", Sort.INT)
z = Var("z", Sort.INT)
b = Var("b", Sort.INT)
p = Var("p", Sort.BOOL)
r = Var("r", Sort.REAL)

INT_VARS = (x, y, z)


def random_term(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(INT_VARS) if rng.random() < 0.6 else IntConst(rng.randint(-5, 5))
    kind = rng.randrange(6)
    if kind == 0:
        return Neg(random_term(rng, depth - 1))
    if kind == 1:
        return Add(tuple(random_term(rng, depth - 1) for _ in range(rng.randint(1, 3))))
    if kind == 2:
        return Sub(random_term(rng, depth - 1), random_term(rng, depth - 1))
    if kind == 3:
        return Scale(Fraction(rng.randint(-3, 3)), random_term(rng, depth - 1))
    if kind == 4:
        return IntDiv(random_term(rng, depth - 1), rng.randint(1, 4))
    return Ite(random_formula(rng, depth - 1), random_term(rng, depth - 1), random_term(rng, depth - 1))


def random_formula(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        choice = rng.random()
        if choice < 0.2:
            return p
        if choice < 0.3:
            return BoolConst(rng.random() < 0.5)
        op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
        return Cmp(op, random_term(rng, 1), random_term(rng, 1))
    kind = rng.randrange(6)
    if kind == 0:
        return Not(random_formula(rng, depth - 1))
    if kind == 1:
        return And(tuple(random_formula(rng, depth - 1) for _ in range(rng.randint(1, 3))))
    if kind == 2:
        return Or(tuple(random_formula(rng, depth - 1) for _ in range(rng.randint(1, 3))))
    if kind == 3:
        return Implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    if kind == 4:
        return Iff(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    return FIte(random_formula(rng, depth - 1), random_formula(rng, depth - 1), random_formula(rng, depth - 1))


def random_model(rng):
    m = {v.name: rng.randint(-6, 6) for v in INT_VARS}
    m["p"] = rng.random() < 0.5
    return m


def test_substitute_replaces_free_occurrences():
    assert substitute(Cmp(">", y, x), {"y": Add((x, IntConst(1)))}) == Cmp(">", Add((x, IntConst(1))), x)


def test_substitute_keeps_untouched_conjuncts():
    state2 = Var("state@2", Sort.INT)
    bias2 = Var("bias@2", Sort.INT)
    f = And((Cmp("=", state2, IntConst(0)), Cmp("=", bias2, IntConst(0))))
    out = substitute(f, {"state@2": IntConst(0)})
    assert out == And((Cmp("=", IntConst(0), IntConst(0)), Cmp("=", bias2, IntConst(0))))
    assert simplify(out) == Cmp("=", bias2, IntConst(0))


def test_substitute_identity_and_sort_mismatch():
    f = Cmp("<", x, y)
    assert substitute(f, {}) is f
    with pytest.raises(RejectedInputError):
        substitute(f, {"x": p})


def test_simplify_guaranteed_rewrites():
    a, c = Var("a", Sort.INT), Var("c", Sort.INT)
    assert simplify(Ite(TRUE, a, c)) == a
    assert simplify(And((Cmp("=", IntConst(0), IntConst(0)), p))) == p
    assert simplify(Not(Not(p))) == p
    assert simplify(Or((p, TRUE))) == TRUE
    assert simplify(And((p, FALSE))) == FALSE
    fmid = Ite(Cmp("=", IntConst(2), IntConst(2)), IntConst(1), IntConst(2))
    assert simplify(fmid) == IntConst(1)


def test_simplify_folds_comparisons_with_constant_difference():
    assert simplify(Cmp("<", Add((x, IntConst(1))), Add((x, IntConst(2))))) == TRUE
    assert simplify(Cmp(">=", x, Add((x, IntConst(1))))) == FALSE


def test_evaluate_examples():
    assert evaluate(Cmp("!=", x, y), {"x": 0, "y": 0}) is False
    bias_step = Add((Ite(Cmp("=", x, IntConst(1)), IntConst(1), IntConst(-1)), b))
    assert evaluate(bias_step, {"x": 1, "b": 1}) == 2
    assert evaluate(IntDiv(Add((IntConst(0), IntConst(4))), 2), {}) == 2


def test_evaluate_is_exact():
    third = Scale(Fraction(1, 3), r)
    assert evaluate(Scale(Fraction(3), third), {"r": Fraction(1)}) == 1
    assert evaluate(Add((RealConst(Fraction(1, 3)),) * 3), {}) == 1
    assert evaluate(IntDiv(IntConst(-3), 2), {}) == -2


def test_evaluate_unbound_symbol():
    with pytest.raises(RejectedInputError):
        evaluate(Cmp(">", x, IntConst(0)), {})


def test_evaluate_rejects_boolean_for_numeric():
    with pytest.raises(RejectedInputError):
        evaluate(Cmp(">", x, IntConst(0)), {"x": True})


def test_free_symbols():
    assert free_symbols(And((Cmp(">", x, IntConst(0)), Cmp("<", y, x)))) == {x, y}
    assert free_symbols(TRUE) == frozenset()


def test_sorts_are_checked_on_construction():
    with pytest.raises(RejectedInputError):
        Add((x, r))
    with pytest.raises(RejectedInputError):
        Scale(Fraction(1, 2), x)
    with pytest.raises(RejectedInputError):
        And((p, x))
    with pytest.raises(RejectedInputError):
        IntDiv(x, 0)


def test_negate_pushes_into_comparisons():
    assert negate(Cmp("<", x, y)) == Cmp(">=", x, y)
    assert negate(Not(p)) == p
    assert negate(TRUE) == FALSE
    assert negate(p) == Not(p)


def test_rename_keeps_sorts():
    f = And((Var("q", Sort.BOOL), Cmp("<", x, y)))
    out = rename(f, {"x": "x@1", "q": "q@1"})
    assert Var("x@1", Sort.INT) in free_symbols(out)
    assert Var("q@1", Sort.BOOL) in free_symbols(out)


def test_linear_form_and_split():
    t = Sub(Scale(Fraction(2), x), Add((y, IntConst(3))))
    coeffs, constant = linear_form(t)
    assert coeffs == {"x": 2, "y": -1} and constant == -3
    coef, rest = split_linear(t, "x")
    assert coef == 2
    assert evaluate(rest, {"y": 4}) == -7
    assert split_linear(Ite(p, x, y), "x") is None
    assert split_linear(Ite(p, y, z), "x") == (0, Ite(p, y, z))


def test_normalize_collects_coefficients():
    t = Add((x, x, Neg(y), IntConst(2), IntConst(-2)))
    assert normalize(t) == Add((Scale(Fraction(2), x), Neg(y)))
    assert normalize(Sub(x, x)) == IntConst(0)


def test_conjuncts_flatten():
    f = conj(p, And((Cmp("<", x, y), And((Cmp("<", y, z),)))))
    assert conjuncts(f) == (p, Cmp("<", x, y), Cmp("<", y, z))
    assert conjuncts(TRUE) == ()


def test_substitute_then_evaluate_commutes():
    rng = random.Random(1)
    for _ in range(10_000):
        f = random_formula(rng, 3)
        t = random_term(rng, 2)
        m = random_model(rng)
        extended = dict(m)
        extended["y"] = evaluate(t, m)
        assert evaluate(substitute(f, {"y": t}), m) == evaluate(f, extended)


def test_simplify_preserves_evaluation():
    rng = random.Random(2)
    for _ in range(5_000):
        f = random_formula(rng, 3)
        m = random_model(rng)
        assert evaluate(simplify(f), m) == evaluate(f, m)


def test_normalize_preserves_evaluation():
    rng = random.Random(3)
    for _ in range(2_000):
        t = random_term(rng, 3)
        m = random_model(rng)
        assert evaluate(normalize(t), m) == evaluate(t, m)
