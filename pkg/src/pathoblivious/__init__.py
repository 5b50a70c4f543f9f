"""Path-oblivious Bell-pair distribution: max-min balancing swaps, a planned-path
cost baseline, steady-state rate programs, and a seeded simulator."""

__version__ = "0.1.0"
