# Interface layer tests
