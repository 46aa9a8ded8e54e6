# core/__init__.py
"""Numerical core: grids, operators, resolvents, Green's functions, IVP and BVP solvers"""
