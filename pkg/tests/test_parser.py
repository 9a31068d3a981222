import pytest

from corhorn import corpus, parser, printer, syntax as S, values as V


ALL_CORPUS = [e.name for e in corpus.CORPUS]


@pytest.mark.parametrize("name", ALL_CORPUS)
def test_roundtrip_corpus(name):
    prog = corpus.load(name)
    again = parser.parse_program(printer.program_text(prog))
    assert again == prog


def test_take_max_shape():
    prog = corpus.load("inc_max")
    assert set(prog.functions) == {"take_max", "inc_max"}
    assert len(prog.fn("take_max").body) == 8
    assert prog.fn("take_max").lft_params == ("a",)
    assert not prog.fn("take_max").is_simple()
    assert prog.fn("inc_max").is_simple()


def test_empty_input():
    prog = parser.parse_program("")
    assert prog.functions == {}
    assert printer.program_text(prog) == ""


def test_undefined_goto_target():
    src = "fn f(x: own int) -> own int { entry: drop x; goto Lmissing; }"
    with pytest.raises(S.ProgramError, match="Lmissing"):
        parser.parse_program(src)


def test_parse_error_has_position():
    with pytest.raises(parser.ParseError) as exc:
        parser.parse_program("fn f( -> own int {}")
    assert exc.value.line == 1
    assert exc.value.col > 1


def test_drop_statement_text():
    stmt = S.StmtInstr(S.Drop("x"), "L2")
    assert printer.stmt_text(stmt) == "drop x; goto L2;"


def test_comments_and_whitespace():
    src = """
    // leading comment
    fn f(x: own int) -> own int { // trailing
      entry: return x; // done
    }
    """
    prog = parser.parse_program(src)
    assert "f" in prog.functions


def test_match_arm_order_normalized():
    a = parser.parse_program(
        "fn f(x: own bool) -> own unit {"
        " entry: match *x { inj1 *b => goto L2, inj0 *a => goto L1 };"
        " L1: return a; L2: return b; }"
    )
    b = parser.parse_program(
        "fn f(x: own bool) -> own unit {"
        " entry: match *x { inj0 *a => goto L1, inj1 *b => goto L2 };"
        " L1: return a; L2: return b; }"
    )
    assert a == b


def test_reserved_words_rejected():
    with pytest.raises(parser.ParseError):
        parser.parse_program("fn drop(x: own int) -> own int { entry: return x; }")
    with pytest.raises(parser.ParseError):
        parser.parse_program("fn f(res: own int) -> own int { entry: return res; }")


def test_negative_literals():
    prog = parser.parse_program(
        "fn f() -> own int { entry: let *y = -7; goto L1; L1: return y; }"
    )
    stmt = prog.fn("f").body["entry"]
    assert stmt.instr.value == -7


def test_type_precedence():
    t = parser.parse_type("mu X. int * own X + unit")
    assert isinstance(t, S.Mu)
    assert isinstance(t.body, S.Sum)
    assert isinstance(t.body.left, S.Prod)
    # pointer binds tighter than product
    t2 = parser.parse_type("own int * own int")
    assert isinstance(t2, S.Prod)


def test_bool_sugar():
    assert parser.parse_type("bool") == S.Sum(S.UNIT, S.UNIT)
    assert printer.type_text(S.Sum(S.UNIT, S.UNIT)) == "bool"


def test_value_literals():
    assert parser.parse_value("box(4)") == V.Box(4)
    assert parser.parse_value("⟨4⟩") == V.Box(4)
    assert parser.parse_value("⟨3, 5⟩") == V.MutPair(3, 5)
    assert parser.parse_value("mut(3, 5)") == V.MutPair(3, 5)
    assert parser.parse_value("inj1 ()") == V.TRUE
    assert parser.parse_value("true") == V.TRUE
    assert parser.parse_value("false") == V.FALSE
    assert parser.parse_value("(1, 2)") == V.Pair(1, 2)
    assert parser.parse_value("box(inj0 (1, box(inj1 ())))") == V.Box(
        V.Inj(0, V.Pair(1, V.Box(V.Inj(1, V.UNIT))))
    )
    assert parser.parse_value_list("box(4), box(-3)") == [V.Box(4), V.Box(-3)]
    assert parser.parse_value_list("") == []


def test_duplicate_label_rejected():
    src = "fn f(x: own int) -> own int { entry: drop x; goto entry; entry: return x; }"
    with pytest.raises(parser.ParseError, match="duplicate label"):
        parser.parse_program(src)


def test_duplicate_function_rejected():
    src = (
        "fn f(x: own int) -> own int { entry: return x; }"
        "fn f(y: own int) -> own int { entry: return y; }"
    )
    with pytest.raises(parser.ParseError, match="duplicate function"):
        parser.parse_program(src)
