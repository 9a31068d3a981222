"""corhorn: an ownership-based verification playground.

The pipeline: parse a .cor program, type-check it against the borrow
discipline, run it on a concrete heap interpreter or a heap-free
prophecy interpreter, translate it to constrained Horn clauses, and
check properties either with the built-in resolution engine or an
external CHC solver via SMT-LIB 2.
"""

__version__ = "0.1.0"
