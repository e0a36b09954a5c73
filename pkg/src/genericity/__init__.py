"""Rigid elements of automatic normal forms and their genericity.

Modules: ``automaton`` (recognizers and structure), ``counting`` (exact
counts, growth rates, sampling), ``geometry`` (isometric actions and rigid
certificates), backends ``psl2z``, ``garside`` and ``freegroup``, and
``experiments`` (censuses and reports).
"""

__version__ = "0.1.0"
