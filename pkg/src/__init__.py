# Decipherment toolkit package
