"""Symmetric positive definite solves: dense for small systems, Jacobi-CG otherwise."""
import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolveError

DENSE_LIMIT = 2000


def solve_spd(A, b, rtol=1e-10, dense_limit=DENSE_LIMIT):
    """Solve A x = b for symmetric positive definite A (sparse or dense).

    b may be a vector or a 2-D array of right-hand sides.
    """
    n = A.shape[0]
    if n == 0:
        return np.zeros_like(np.asarray(b, dtype=float))
    b = np.asarray(b, dtype=float)
    if n < dense_limit:
        Ad = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
        try:
            return scipy.linalg.solve(Ad, b, assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise SolveError(f"dense solve failed: {exc}") from exc
    A = sp.csr_matrix(A)
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise SolveError("non-positive diagonal in SPD solve")
    M = sp.diags(1.0 / diag)
    if b.ndim == 1:
        return _cg(A, b, M, rtol)
    return np.column_stack([_cg(A, b[:, j], M, rtol) for j in range(b.shape[1])])


def _cg(A, b, M, rtol):
    if not np.any(b):
        return np.zeros_like(b)
    x, info = spla.cg(A, b, rtol=rtol, atol=0.0, M=M, maxiter=20 * A.shape[0])
    if info != 0:
        raise SolveError(f"conjugate gradient did not converge (info={info})")
    return x
