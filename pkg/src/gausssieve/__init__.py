"""Large sieve inequalities with Gaussian-integer moduli, checked numerically."""

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits
from .gaussint import GaussInt, euler_phi, factor, gcd, residue_system, sqrt_solutions
from .moduli_sets import ModuliSet, build_set, count_A_t, subset_t
from .farey import count_K, count_P, dirichlet_approx, enumerate_farey, lemma1_check
from .expsum import compute_Z, eval_S, lhs_sum, make_sequence
from .lsr2 import duality_gap, fejer_phi, fejer_phi_hat, spectral_norm, theorem5_ratio, v_kernel
from .verify import BoundSpec, rhs_bound, run_experiment

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LIMITS", "BudgetExceeded", "Limits", "GaussInt", "euler_phi", "factor", "gcd",
    "residue_system", "sqrt_solutions", "ModuliSet", "build_set", "count_A_t", "subset_t",
    "count_K", "count_P", "dirichlet_approx", "enumerate_farey", "lemma1_check", "compute_Z",
    "eval_S", "lhs_sum", "make_sequence", "duality_gap", "fejer_phi", "fejer_phi_hat",
    "spectral_norm", "theorem5_ratio", "v_kernel", "BoundSpec", "rhs_bound", "run_experiment",
]
