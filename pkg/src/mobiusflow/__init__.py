"""Numerical experiments on Mobius-function correlations with distal flows.

Subpackages by theme:

    mobius       segmented sieve for mu(n) and lambda(n)
    cfrac        exact continued fractions, flat/sharp scales, case labels
    analytic     exponentially decaying Fourier series and Birkhoff sums
    flows        skew products and affine maps on tori
    nilflow      Heisenberg nilmanifold orbits in exact rationals
    furstenberg  the lacunary irregular construction
    correlate    Mobius-weighted sums and the analytic verifiers
    cli          batch experiment driver
"""

__version__ = "0.1.0"
