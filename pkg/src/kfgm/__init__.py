"""Strictly neutral Klein-Fock-Gordon particles on a finite interval.

Boundary-condition families for the two-component (Feshbach-Villars)
Hamiltonian, grid states with Majorana conditions, local observables and
tensor identities, spectra, time evolution and a command-line harness.
"""

__version__ = "0.1.0"
