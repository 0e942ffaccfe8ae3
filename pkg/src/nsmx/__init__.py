"""Pseudo-spectral solver and numerical-verification toolkit for the
periodically forced incompressible Navier-Stokes-Maxwell system.

Subpackages
-----------
spectral   -- Fourier fields on the torus, differential operators, Leray
              projection, dealiased products
dyadic     -- Littlewood-Paley blocks, Bony paraproduct, hybrid Besov norms,
              windowed-decay trajectory norms
maxwell    -- spectral decomposition and exact semigroup of the damped
              Maxwell operator
periodic   -- time-periodic linear solves, Picard fixed point, resonance
              constants
evolution  -- exponential time-differencing integrator with exact linear
              propagators, energy diagnostics
stability  -- perturb-the-periodic-orbit experiments, decay fits,
              contraction probe
laws       -- empirical verification harness for the product-law and linear
              estimates
snapshots  -- binary field snapshot format
cli        -- configuration parsing and run dispatch (``nsmx`` entry point)
"""

__version__ = "0.1.0"
