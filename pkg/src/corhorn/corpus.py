"""Registry for the bundled benchmark programs.

Each entry pairs a safe program with its deliberately broken variant;
`entry_fn` names the simple function that drives differential testing
and the verification goal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import logic as L
from . import parser
from . import syntax as S
from . import values as V
from .translate import sort_of_type


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    filename: str
    entry_fn: str
    safe: bool
    goal: str


CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("inc_max", "inc_max.cor", "inc_max", True, "inc_max returns true"),
    CorpusEntry("inc_max_unsafe", "inc_max_unsafe.cor", "inc_max", False, "inc_max returns true"),
    CorpusEntry("just_rec", "just_rec.cor", "just_rec_main", True, "just_rec_main returns true"),
    CorpusEntry("just_rec_unsafe", "just_rec_unsafe.cor", "just_rec_main", False, "just_rec_main returns true"),
    CorpusEntry("linger_dec", "linger_dec.cor", "linger_dec_main", True, "linger_dec_main returns true"),
    CorpusEntry("linger_dec_unsafe", "linger_dec_unsafe.cor", "linger_dec_main", False, "linger_dec_main returns true"),
    CorpusEntry("inc_some", "inc_some.cor", "inc_some", True, "inc_some returns true"),
    CorpusEntry("inc_some_unsafe", "inc_some_unsafe.cor", "inc_some", False, "inc_some returns true"),
    CorpusEntry("inc_some_t", "inc_some_t.cor", "inc_some_t", True, "inc_some_t returns true"),
    CorpusEntry("inc_some_t_unsafe", "inc_some_t_unsafe.cor", "inc_some_t", False, "inc_some_t returns true"),
)


def entry(name: str) -> CorpusEntry:
    for e in CORPUS:
        if e.name == name:
            return e
    raise KeyError(name)


def corpus_dir() -> Path:
    return Path(resources.files("corhorn") / "corpus")


def source_path(name: str) -> Path:
    return corpus_dir() / entry(name).filename


def load(name: str) -> S.Program:
    return parser.parse_program(source_path(name).read_text())


def resolve_path(path: str) -> Path:
    """Resolve a CLI path argument; 'corpus/NAME.cor' falls back to the
    bundled corpus when no such file exists locally."""
    p = Path(path)
    if p.exists():
        return p
    if p.parts and p.parts[0] == "corpus":
        candidate = corpus_dir() / Path(*p.parts[1:])
        if candidate.exists():
            return candidate
    raise FileNotFoundError(path)


def random_inputs(prog: S.Program, fname: str, rng: random.Random, spec: L.SampleSpec) -> list[V.Value]:
    """Random well-sorted argument values for a simple function."""
    fn = prog.fn(fname)
    return [L.random_value(sort_of_type(t), spec, rng) for _, t in fn.params]
