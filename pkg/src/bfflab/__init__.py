"""bfflab: a workbench for type-2 feasible computation.

Functional terms with oracles (`terms`), second-order polynomials and
witness terms (`sop`), recursion-scheme constructions (`schemes`),
majorizing-bound inference (`bounds`), oracle Turing machines (`otm`),
textual file formats (`formats`), and a command-line front end (`cli`).
"""

__version__ = "0.1.0"
