# config/__init__.py
"""Configuration package for the causal Green's function toolkit"""

# core/__init__.py
"""Grids, operators, resolvents, Green's functions and IVP/BVP solvers"""

# services/__init__.py
"""Reference kernels and the acceptance suite"""

# utils/__init__.py
"""Expression parsing and result serialisation"""
