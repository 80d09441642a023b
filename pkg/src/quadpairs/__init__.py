"""Exact computations with involutions, quadratic pairs and their gluing obstructions.

Submodules:

* ``exact_rings``: coefficient rings (Z, Z/n, GF(2^m), truncated polynomial,
  Laurent and quotient rings, finite products) and ring homomorphisms.
* ``exact_linalg``: matrices, Smith and Hermite normal forms, kernels,
  images and membership with unsatisfiability certificates.
* ``algebra_involution``: matrix algebras with adjoint involutions and their
  Sym, Skew, Alt and Symd submodules.
* ``quadratic_pairs``: semitraces, triple verification and classification.
* ``tensor_involutions``: tensor products of involutions and pairs.
* ``descent_cech``: two-chart covers, twisted sections and Cech cochains.
* ``obstructions``: strong and weak obstructions with witnesses or certificates.
* ``cli_examples``: bundled examples and the command-line entry point.
"""

__version__ = "0.1.0"
