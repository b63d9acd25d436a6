"""linkcensus: exact counting of alternating link/tangle diagrams and flype classes.

The package has three layers:

* exact generating functions (`series`, `onematrix`, `flype`, `abab`) —
  rational-coefficient power series, closed forms and implicit algebraic
  branches for the diagram-counting functions;
* an independent ground truth (`oracle`) — an exhaustive Wick-pairing
  enumerator over fat graphs, stratified by genus, strand count and
  connectivity, against which every closed form is checked coefficient by
  coefficient;
* reporting (`census`, `cli`) — counting sequences, growth-constant
  estimation from coefficients, and the constants table.
"""

from .series import Series, AlgebraicSystem, SeriesError

__version__ = "1.0.0"

__all__ = ["Series", "AlgebraicSystem", "SeriesError", "__version__"]
