"""Dissipative quasi-geostrophic solver and Littlewood-Paley diagnostics."""
