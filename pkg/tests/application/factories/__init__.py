"""
Factory pattern implementations for the application layer.
"""
