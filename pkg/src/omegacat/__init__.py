"""Classification machinery for countably categorical linear orders,
trees, and cycle-free partial orders.

Submodules:

- :mod:`omegacat.posets`    finite posets, tree axioms, brute-force orbit oracle
- :mod:`omegacat.terms`     linear-order term algebra with canonical normal form
- :mod:`omegacat.sequences` eventually periodic sequences of terms (chain types)
- :mod:`omegacat.trees`     recursive tree specifications and the categoricity check
- :mod:`omegacat.cfpo`      cycle-free partial orders: paths and alternation rank
- :mod:`omegacat.cli`       the ``omegacat`` command line tool
"""

__version__ = "0.1.0"
