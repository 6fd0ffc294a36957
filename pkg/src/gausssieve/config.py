"""Desk-scale limits shared by every module."""

from dataclasses import dataclass


class BudgetExceeded(RuntimeError):
    """A configured desk-scale cap would be exceeded."""


@dataclass(frozen=True)
class Limits:
    max_residue_norm: int = 1 << 20
    max_factor_norm: int = 10**12
    max_set_norm: int = 1 << 22
    max_farey_nodes: int = 2_000_000
    max_support: int = 200_000
    # Direct (non-FFT) evaluation work, nodes x support.
    max_direct_work: int = 400_000_000
    # Largest residue-grid side for the FFT evaluator.
    max_fft_side: int = 2048
    max_tau: float = 64.0

    def check(self, name: str, value: float, cap: float) -> None:
        if value > cap:
            raise BudgetExceeded(f"{name}={value} exceeds cap {cap}")


DEFAULT_LIMITS = Limits()
