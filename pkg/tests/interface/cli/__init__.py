# CLI interface tests
