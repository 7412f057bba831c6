"""Computations with p-dg algebras, twisted objects and the 2-category of projective bimodules."""
from .bicat import BiCategory, Gen, compute_cells, hcompose, strong_regularity, two_hom
from .builtin import builtin_example, coinvariant, kx, kx_paper_variant, semisimple
from .pdgalg import PdgAlgebra, check_algebra, radical, validate_algebra
from .twisted import TwistedMorphism, TwistedObject, check_twisted, tensor_h

__version__ = "0.1.0"
