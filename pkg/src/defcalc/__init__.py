"""Desk-scale verification of a tame deformation-theory counterexample.

Finite local rings, GL_2 congruence kernels, S_3 representations over F_p,
low-degree group cohomology, and the tame deformation functor.
"""

__version__ = "0.1.0"
