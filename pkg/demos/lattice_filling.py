"""Flat torus cross-sections and Dehn filling data.

A cusp cross-section is a flat torus R^k / Gamma. Filling closes one
primitive geodesic class sigma; the remaining quotient acts on the solid
torus, and the length of sigma sets the filling radius.
"""

import numpy as np

from dehnfill.lattice import (
    FlatLattice,
    GeodesicClass,
    extend_to_basis,
    filling_data,
    geodesic_length,
    quotient_generators,
)

# a rank-3 lattice with a skew basis
basis = np.array([[6.0, 1.0, 0.0],
                  [0.0, 10.0, 2.0],
                  [0.0, 0.0, 15.0]])
lat = FlatLattice(basis)
sigma = GeodesicClass((1, 2, 0))

L = geodesic_length(lat, sigma)
print(f"basis det = {np.linalg.det(basis):.1f}")
print(f"closed geodesic {sigma.coeffs}: length = {L:.6f}")

# complete sigma to a basis; the completion matrix is unimodular so the
# quotient data below is independent of which completion we pick
M = extend_to_basis(lat, sigma)
print(f"basis extension M =\n{M}")
print(f"det M = {round(np.linalg.det(M.astype(float)))}  (always +-1)")

out = quotient_generators(lat, sigma)
angles = [a for a, _ in out["generators"]]
print(f"quotient: covolume = {out['covolume']:.6f}, "
      f"holonomy angles = {np.round(angles, 6)}")
print(f"identity  L(sigma) * covol = {L * out['covolume']:.6f}"
      f"  vs |det Gamma| = {abs(np.linalg.det(basis)):.6f}")
print()

# filling data for a cusp: the geodesic length decides whether the filled
# core is smooth (needs L > 2 pi in these units) and how big the gluing
# region must be
fd = filling_data([(lat, sigma)], n=4)
print(f"filling radius   = {fd.radii[0]:.6f}")
print(f"2 pi condition   = {fd.two_pi_ok}")
print(f"beta_1 constant  = {fd.beta1:.6f}")
print()

# two cusps at once: the common size is set by the shortest filling
lat2 = FlatLattice(np.diag([8.0, 9.0, 11.0]))
fd2 = filling_data([(lat, sigma), (lat2, GeodesicClass((0, 1, 0)))], n=4)
print(f"two cusps: radii = {np.round(fd2.radii, 4)}, "
      f"common size = {fd2.size:.4f}")
