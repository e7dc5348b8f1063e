# Application Layer Package
