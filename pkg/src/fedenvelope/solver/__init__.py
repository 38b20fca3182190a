"""Dense LP/QP solvers for linear inequality systems ``A @ x >= g``.

Public surface:

* :func:`solve_lp` - two-phase dense simplex (Bland anti-cycling).
* :func:`solve_qp_identity` - dual active-set Euclidean projection.
* :data:`USING_COMPILED_KERNEL` - True when the Cython pivot kernel is in
  use; the numpy fallback is selected automatically when the extension is
  unavailable (or when ``FEDENVELOPE_PURE_PYTHON=1``).
"""

from ._kernel import USING_COMPILED_KERNEL
from ._lp import solve_lp, solve_standard_form
from ._qp import solve_qp_identity
from ._types import LinearConstraints, SolverReport, SolverTolerances, SolveStatus

__all__ = [
    "LinearConstraints",
    "SolverReport",
    "SolverTolerances",
    "SolveStatus",
    "solve_lp",
    "solve_qp_identity",
    "solve_standard_form",
    "USING_COMPILED_KERNEL",
]
