"""Feature-coverage programs for rule paths the bundled corpus leaves
out: nested mutable borrows (mut of mut), dereferencing borrows of
boxes and of immutable references, destructuring a borrowed pair, and
folding a recursive type with `as`.  Each program runs through the full
battery: type check, both lockstep relations, and the differential
oracle on a small input box."""

import random

import pytest

from corhorn import corpus, cos, harness, logic as L, parser, typeck, values as V


SWAP_MM = """
fn swap_mm(oa: own int, ob: own int) -> own bool {
  entry: intro 'b; goto L1;
  L1: let ma = mutbor 'b oa; goto L2;
  L2: let mb = mutbor 'b ob; goto L3;
  L3: swap(*ma, *mb); goto L4;
  L4: let *oma = ma; goto L5;
  L5: intro 'c; goto L6;
  L6: 'c <= 'b; goto L7;
  L7: let mma = mutbor 'c oma; goto L8;
  L8: let mx = *mma; goto L9;
  L9: let *o9 = 9; goto L10;
  L10: swap(*mx, *o9); goto L11;
  L11: drop o9; goto L12;
  L12: drop mx; goto L13;
  L13: now 'c; goto L14;
  L14: let ma2 = *oma; goto L15;
  L15: drop ma2; goto L16;
  L16: drop mb; goto L17;
  L17: now 'b; goto L18;
  L18: let *o9b = 9; goto L19;
  L19: let *r = *oa == *o9b; goto L20;
  L20: drop o9b; goto L21;
  L21: drop oa; goto L22;
  L22: drop ob; goto L23;
  L23: return r;
}
"""

READ_THRU = """
fn read_thru(oa: own int) -> own int {
  entry: let *ooa = oa; goto L1;
  L1: intro 'b; goto L2;
  L2: let mo = mutbor 'b ooa; goto L3;
  L3: let mi = *mo; goto L4;
  L4: drop mi; goto L5;
  L5: now 'b; goto L6;
  L6: let oa2 = *ooa; goto L7;
  L7: let *r = copy *oa2; goto L8;
  L8: drop oa2; goto L9;
  L9: return r;
}
"""

READ_IMM = """
fn read_imm(oa: own int) -> own bool {
  entry: intro 'b; goto L1;
  L1: let ma = mutbor 'b oa; goto L2;
  L2: immut ma; goto L3;
  L3: let *oi = ma; goto L4;
  L4: intro 'c; goto L5;
  L5: 'c <= 'b; goto L6;
  L6: let mi = mutbor 'c oi; goto L7;
  L7: let ii = *mi; goto L8;
  L8: let *r1 = copy *ii; goto L9;
  L9: drop ii; goto L10;
  L10: now 'c; goto L11;
  L11: let ii2 = *oi; goto L12;
  L12: let *r2 = copy *ii2; goto L13;
  L13: drop ii2; goto L14;
  L14: now 'b; goto L15;
  L15: let *req = *r1 == *r2; goto L16;
  L16: drop r1; goto L17;
  L17: drop r2; goto L18;
  L18: drop oa; goto L19;
  L19: return req;
}
"""

PAIR_MUT = """
fn pair_mut(oa: own int, ob: own int) -> own bool {
  entry: let *op = (*oa, *ob); goto L1;
  L1: intro 'b; goto L2;
  L2: let mp = mutbor 'b op; goto L3;
  L3: let (*m0, *m1) = *mp; goto L4;
  L4: swap(*m0, *m1); goto L5;
  L5: drop m0; goto L6;
  L6: drop m1; goto L7;
  L7: now 'b; goto L8;
  L8: let (*o0, *o1) = *op; goto L9;
  L9: let *r = *o0 != *o1; goto L10;
  L10: drop o0; goto L11;
  L11: drop o1; goto L12;
  L12: return r;
}
"""

LIST_T = "mu X. int * own X + unit"
BUILD_SUM = (
    corpus.source_path("inc_some").read_text()
    + f"""
fn build_and_sum(ox: own int) -> own int {{
  entry: let *u = (); goto L1;
  L1: let *n = inj1<int * own ({LIST_T}) + unit> *u; goto L2;
  L2: n as own ({LIST_T}); goto L2b;
  L2b: let *n2 = n; goto L3;
  L3: let *p = (*ox, *n2); goto L4;
  L4: let *c = inj0<int * own ({LIST_T}) + unit> *p; goto L5;
  L5: c as own ({LIST_T}); goto L6;
  L6: intro 'b; goto L7;
  L7: let ms = mutbor 'b c; goto L8;
  L8: immut ms; goto L9;
  L9: let s = sum<'b>(ms); goto L10;
  L10: now 'b; goto L11;
  L11: let odu = drop_list(c); goto L12;
  L12: drop odu; goto L13;
  L13: return s;
}}
"""
)


DUP_IMM = """
fn dup_imm(oa: own int) -> own bool {
  entry: intro 'b; goto L1;
  L1: let ma = mutbor 'b oa; goto L2;
  L2: immut ma; goto L3;
  L3: let *oma = ma; goto L4;
  L4: let *omb = copy *oma; goto L5;
  L5: let mb2 = *omb; goto L6;
  L6: let ma2 = *oma; goto L7;
  L7: let *r = *ma2 == *mb2; goto L8;
  L8: drop ma2; goto L9;
  L9: drop mb2; goto L10;
  L10: now 'b; goto L11;
  L11: drop oa; goto L12;
  L12: return r;
}
"""

CASES = [
    ("swap_mm", SWAP_MM, "swap_mm", 2, lambda a, b: V.Box(V.TRUE)),
    ("dup_imm", DUP_IMM, "dup_imm", 1, lambda a: V.Box(V.TRUE)),
    ("read_thru", READ_THRU, "read_thru", 1, lambda a: V.Box(a)),
    ("read_imm", READ_IMM, "read_imm", 1, lambda a: V.Box(V.TRUE)),
    ("pair_mut", PAIR_MUT, "pair_mut", 2,
     lambda a, b: V.Box(V.TRUE if b != a else V.FALSE)),
    ("build_and_sum", BUILD_SUM, "build_and_sum", 1, lambda a: V.Box(a)),
]


@pytest.mark.parametrize("name,src,fn,arity,expect", CASES, ids=[c[0] for c in CASES])
def test_feature_program_full_battery(name, src, fn, arity, expect):
    prog = parser.parse_program(src)
    typing = typeck.type_program(prog)
    rng = random.Random(17)
    for trial in range(8):
        args = [rng.randint(-6, 6) for _ in range(arity)]
        inputs = [V.Box(a) for a in args]
        out = cos.run(prog, fn, inputs, seed=trial, typing=typing)
        assert out.status == "returned"
        assert out.value == expect(*args), (name, args, V.show(out.value))
        assert out.leaked == ()
        r1 = harness.lockstep_cos_aos(prog, fn, inputs, seed=trial, typing=typing)
        assert r1.ok, (name, args, r1.detail)
        r2 = harness.lockstep_aos_sldc(prog, fn, inputs, seed=trial, typing=typing)
        assert r2.ok, (name, args, r2.detail)


@pytest.mark.parametrize("name,src,fn,arity,expect", CASES, ids=[c[0] for c in CASES])
def test_feature_program_oracle(name, src, fn, arity, expect):
    prog = parser.parse_program(src)
    inputs = [tuple(V.Box(v) for v in vs)
              for vs in __import__("itertools").product(range(-2, 3), repeat=arity)]
    rep = harness.oracle_diff(prog, fn, inputs, seeds=(0,), depth=80)
    assert rep.ok, rep.misses[:2]
    assert rep.returned == len(inputs)


def test_mut_mut_translation_well_sorted():
    prog = parser.parse_program(SWAP_MM)
    from corhorn import translate as T

    sys = T.translate_program(prog)
    L.well_sorted_system(sys)
    # the nested deref splits three fresh components in the head
    l8 = [c for c in sys.clauses if c.tag[2] == "L8"][0]
    heads = " ".join(V.show(a) for a in l8.head.args)
    assert heads.count("mma!") == 4  # cc, cp, pc with cp shared
