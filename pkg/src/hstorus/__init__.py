"""Toolkit for Hull-Strominger solutions on T^2-bundles over K3 surfaces.

Certifies the arithmetic existence conditions for solutions built from
Hermite-Yang-Mills data on a K3 surface, computes T-dual solution
parameters and the associated topology changes, verifies the symbolic
differential-form identities behind the duality, and solves the reduced
anomaly-cancellation Laplace equation on a flat periodic proxy geometry.
"""

__version__ = "0.1.0"
