"""ADMM-based LP decoding of binary linear codes."""
