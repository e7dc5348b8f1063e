"""
Service implementations for the application layer.
"""
