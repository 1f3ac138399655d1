"""Riemann-Hilbert asymptotics for orthogonal polynomials on [-1, 1]."""
