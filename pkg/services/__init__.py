# services/__init__.py
"""Validation services: closed-form reference kernels and the acceptance suite"""
