"""tclab: a numerical laboratory for 2-currents near cones.

Builds parametrized currents (winding curves, chart surfaces, cones),
measures masses, excesses and monotonicity quantities, constructs
harmonic-extension competitors from Fourier data, and certifies the
resulting decay and almost-minimality inequalities at desk scale.
"""

__version__ = "0.1.0"
