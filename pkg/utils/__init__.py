# utils/__init__.py
"""Expression parsing and result serialisation utilities"""
