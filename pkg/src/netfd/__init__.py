"""Stochastic Liouville / Langevin / master-equation engine for two linear
open-system models in the doubled (tilde) operator formalism, plus a
classical Ornstein-Uhlenbeck Monte-Carlo harness."""

__version__ = "0.1.0"
