"""
Domain layer tests package.
"""
