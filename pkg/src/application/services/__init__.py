# Application Services Package
