# config/__init__.py
"""Configuration package for the causal Green's function toolkit"""
