"""
Domain layer package.

This package contains the corpora, vocabularies, language model and
log-linear model types of the decipherment toolkit, with the invariants
they enforce.
"""
