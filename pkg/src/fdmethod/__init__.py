"""FD-method series solver."""
