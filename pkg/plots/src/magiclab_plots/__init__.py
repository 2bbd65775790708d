"""Vector figures for magiclab experiment CSVs."""
