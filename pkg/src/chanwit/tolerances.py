"""Named numerical tolerances shared by every module."""

HERMITIAN_ATOL = 1e-10          # accepted asymmetry for Hermitian inputs
HERMITIAN_STRICT = 1e-12        # entrywise |A - A^H| for the CMatrix predicate
JACOBI_OFFDIAG = 1e-12          # off-diagonal Frobenius norm at convergence
JACOBI_MAX_SWEEPS = 100
EIGVEC_PHASE_ATOL = 1e-12       # component considered nonzero when fixing phases

PROB_ATOL = 1e-12               # prior vectors must sum to one
UNBIASED_ATOL = 1e-10           # column sums of an unbiased game

TP_ATOL = 1e-10                 # sum_k K^H K = I
CP_FLOOR = -1e-10               # smallest admissible Choi eigenvalue
STATE_ATOL = 1e-10              # trace and PSD floor for density matrices
POVM_ATOL = 1e-10               # sum_y pi_y = I
KRAUS_DROP = 1e-10              # Choi eigenvalues discarded when extracting Kraus ops

POSITIVE_PART = 0.0             # eigenvalues >= this go into the "guess 0" projector
REGULARIZER = 1e-12             # floor used for inverse square roots

ENUM_BUDGET_LOG2 = 20           # log2 of the largest exhaustive enumeration allowed
