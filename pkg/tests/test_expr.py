import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sublinear_lab.errors import ArityError, EvalError, ExprSyntaxError, UnknownIdentifier
from sublinear_lab.expr import BinOp, Call, Neg, Num, Var, coordinates_used, eval_ast, parse, to_functional, to_source

POINT = (2.0, -3.0, 0.5)

# values worked out by hand at x1=2, x2=-3, x3=0.5
GOLDEN = [
    ("1", 1.0),
    ("x1", 2.0),
    ("x1+x2", -1.0),
    ("x1-x2", 5.0),
    ("x1*x2", -6.0),
    ("x1/x3", 4.0),
    ("x1+x2*x3", 0.5),
    ("(x1+x2)*x3", -0.5),
    ("x1-x2-x3", 4.5),
    ("x1-(x2-x3)", 5.5),
    ("x1/x1/x3", 2.0),
    ("x1/(x1/x3)", 0.5),
    ("2^3^2", 512.0),
    ("(2^3)^2", 64.0),
    ("-x1^2", -4.0),
    ("(-x1)^2", 4.0),
    ("-2^2", -4.0),
    ("2^-1", 0.5),
    ("x2^2", 9.0),
    ("x2^3", -27.0),
    ("--x1", 2.0),
    ("-x2", 3.0),
    ("x1*-x2", 6.0),
    ("x1^x3*x3^-1", 2 * math.sqrt(2)),
    ("abs(x2)", 3.0),
    ("abs(-2)^1.5", 2.0**1.5),
    ("pow(abs(-2), 1.5)", 2.0**1.5),
    ("pow(x2, 2)", 9.0),
    ("sgn(x2)", -1.0),
    ("sgn(x1)", 1.0),
    ("sgn(0)", 0.0),
    ("sgn(x1+x2+x3+x3)", 0.0),
    ("pos(x2)", 0.0),
    ("pos(x1)", 2.0),
    ("pos(-x2)", 3.0),
    ("max(x1, x2)", 2.0),
    ("min(x1, x2)", -3.0),
    ("max(x1, x2, x3, 7)", 7.0),
    ("min(x1, x2, -8)", -8.0),
    ("max(x1, x1+x2)^2", 4.0),
    ("max(x2, x2+x1)^2", 1.0),
    ("pos(x1+x2)^2", 0.0),
    ("abs(x1+x2)^3", 1.0),
    ("1.5e1 + .5", 15.5),
    ("2.5E-1*4", 1.0),
    ("x1*x2*x3", -3.0),
    ("(x1+x2+x3)/x3", -1.0),
    ("max(abs(x2), pow(x1, 2)) - min(x3, 1)", 3.5),
    ("pow(x1, x1)^x3", 2.0),
    ("  x1  +\tx2 ", -1.0),
]


def test_golden_corpus_size():
    assert len(GOLDEN) == 50


@pytest.mark.parametrize("text,value", GOLDEN)
def test_golden(text, value):
    assert eval_ast(parse(text, 3), POINT) == pytest.approx(value, rel=1e-15, abs=1e-15)


def test_documented_shapes():
    assert parse("max(x1, x1+x2)^2", 2) == BinOp("^", Call("max", (Var(1), BinOp("+", Var(1), Var(2)))), Num(2.0))
    assert parse("x1+x2*x3", 3) == BinOp("+", Var(1), BinOp("*", Var(2), Var(3)))
    assert parse("-x1^2", 1) == Neg(BinOp("^", Var(1), Num(2.0)))
    assert parse("2^3^2", 0) == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))


def test_unknown_and_out_of_range():
    with pytest.raises(UnknownIdentifier) as exc:
        parse("x1 + x4", 2)
    assert exc.value.offset == 5
    for text in ("y", "x0", "exp(x1)", "X1"):
        with pytest.raises(UnknownIdentifier):
            parse(text, 2)


def test_syntax_errors_carry_byte_offsets():
    cases = {"x1 +": 4, "(x1": 3, "x1 x2": 3, "max(x1,)": 7, "2 $ 3": 2, "": 0, "é+x1": 0}
    for text, off in cases.items():
        with pytest.raises(ExprSyntaxError) as exc:
            parse(text, 2)
        assert exc.value.offset == off, text
    # a two-byte character before the error shifts the byte offset by two
    with pytest.raises(UnknownIdentifier):
        parse("x1 + ab", 1)
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x1 + (é)", 1)
    assert exc.value.offset == 6


def test_call_arity():
    for text in ("abs(x1, x1)", "pow(x1)", "max(x1)", "sgn()"):
        with pytest.raises((ArityError, ExprSyntaxError)):
            parse(text, 1)
    with pytest.raises(ArityError):
        parse("max(x1)", 1)


def test_eval_errors():
    for text in ("x1/(x2+3)", "1/0", "x2^0.5", "0^-1", "pow(x2, x3)", "10^400"):
        with pytest.raises(EvalError):
            eval_ast(parse(text, 3), POINT)
    with pytest.raises(ArityError):
        eval_ast(parse("x3", 3), (1.0, 2.0))


def test_functional_vectorized():
    f = to_functional(parse("pos(x1 - x2)", 2), 2)
    grid = np.meshgrid([-1.0, 1.0], [-1.0, 1.0], indexing="ij")
    assert f(*grid).tolist() == [[0.0, 0.0], [2.0, 0.0]]
    with pytest.raises(ArityError):
        to_functional(parse("x3", 3), 2)
    assert coordinates_used(parse("max(x1, x3) + 1", 3)) == 3
    assert coordinates_used(parse("7", 0)) == 0


def _ast(depth):
    leaf = st.one_of(
        st.builds(Num, st.floats(0, 1e6, allow_nan=False, allow_infinity=False)),
        st.builds(Var, st.integers(1, 4)),
    )
    if depth == 0:
        return leaf
    sub = _ast(depth - 1)
    return st.one_of(
        leaf,
        st.builds(Neg, sub),
        st.builds(BinOp, st.sampled_from("+-*/^"), sub, sub),
        st.builds(lambda n, a: Call(n, (a,)), st.sampled_from(["abs", "sgn", "pos"]), sub),
        st.builds(lambda a, b: Call("pow", (a, b)), sub, sub),
        st.builds(lambda n, a: Call(n, tuple(a)), st.sampled_from(["max", "min"]), st.lists(sub, min_size=2, max_size=4)),
    )


@settings(max_examples=300)
@given(_ast(4))
def test_print_parse_roundtrip(node):
    assert parse(to_source(node), 4) == node


def _random_ast(rng, depth):
    r = rng.random()
    if depth == 0 or r < 0.25:
        if rng.random() < 0.5:
            return Var(int(rng.integers(1, 5)))
        return Num(float(rng.choice([0.0, 1.0, 2.5, 1e-7, 123456.789, rng.exponential(10)])))
    sub = lambda: _random_ast(rng, depth - 1)  # noqa: E731
    if r < 0.35:
        return Neg(sub())
    if r < 0.8:
        return BinOp(str(rng.choice(list("+-*/^"))), sub(), sub())
    name = str(rng.choice(["abs", "sgn", "pos", "pow", "max", "min"]))
    count = {"pow": 2, "max": int(rng.integers(2, 5)), "min": int(rng.integers(2, 5))}.get(name, 1)
    return Call(name, tuple(sub() for _ in range(count)))


def test_roundtrip_corpus():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        node = _random_ast(rng, 5)
        assert parse(to_source(node), 4) == node
