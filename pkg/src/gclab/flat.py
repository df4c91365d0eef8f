"""Flat model charts: Kahler C^n, hyper-Kahler R^4, and their Killing data.

Coordinates on the Kahler chart are (x1, y1, .., xn, yn); the rotation field
X0 = sum_i (x_i d/dy_i - y_i d/dx_i) is Hamiltonian for f^H = c - |z|^2/2.
Invariant reference frames use the radial/angular fields R_i, A_i, which are
regular wherever every factor's radius is nonzero.
"""

from __future__ import annotations

import numpy as np

from .chart import Chart, flat_chart
from .fields import ScalarField, as_field, const, coord
from .forms import FormField
from .gtangent import (Section, constant_section, section_from_components,
                       vector_section)
from .structures import (GenComplexStructure, build_hermitian_pair,
                         from_complex, from_symplectic)


def standard_complex_matrix(n: int) -> np.ndarray:
    """J with dx_i -> dy_i on the (x1,y1,..,xn,yn) chart."""
    d = 2 * n
    J = np.zeros((d, d))
    for i in range(n):
        J[2 * i + 1, 2 * i] = 1.0
        J[2 * i, 2 * i + 1] = -1.0
    return J


def standard_symplectic_form(chart: Chart, n: int) -> FormField:
    comps = {(2 * i, 2 * i + 1): 1.0 for i in range(n)}
    return FormField(chart, 2, comps, name="omega")


def flat_kahler(n: int, max_order: int = 3):
    """Chart, structures and coordinate data of flat Kahler C^n."""
    chart = flat_chart(n, max_order=max_order)
    J = standard_complex_matrix(n)
    omega = standard_symplectic_form(chart, n)
    SJ = from_complex(chart, J, name="J_J")
    SW = from_symplectic(chart, omega, name="J_omega")
    pair = build_hermitian_pair(SJ, SW, name="flat_kahler")
    return {"chart": chart, "J": J, "omega": omega, "SJ": SJ, "SW": SW,
            "pair": pair, "n": n}


def rotation_field(chart: Chart, n: int) -> Section:
    comps = []
    for i in range(n):
        comps += [-coord(2 * i + 1), coord(2 * i)]
    return vector_section(comps, name="X0_rot")


def rotation_hamiltonian(n: int, shift: float) -> ScalarField:
    r2 = None
    for i in range(2 * n):
        term = coord(i) * coord(i)
        r2 = term if r2 is None else r2 + term
    return const(shift) - 0.5 * r2


def radius_squared(i: int) -> ScalarField:
    return coord(2 * i) * coord(2 * i) + coord(2 * i + 1) * coord(2 * i + 1)


def invariant_refs_rotation(chart: Chart, n: int):
    """2d sections of TM+T*M invariant under the rotation field.

    Tangent: radial R_i = x_i dx_i + y_i dy_i and angular A_i fields;
    cotangent: their metric duals.  Independent away from each axis z_i = 0.
    """
    refs = []
    d = chart.dim
    for i in range(n):
        x, y = coord(2 * i), coord(2 * i + 1)
        radial = [0.0] * d
        radial[2 * i], radial[2 * i + 1] = x, y
        angular = [0.0] * d
        angular[2 * i], angular[2 * i + 1] = -y, x
        refs.append(section_from_components(radial, [0.0] * d, name=f"R{i + 1}"))
        refs.append(section_from_components(angular, [0.0] * d, name=f"A{i + 1}"))
    for i in range(n):
        x, y = coord(2 * i), coord(2 * i + 1)
        radial = [0.0] * d
        radial[2 * i], radial[2 * i + 1] = x, y
        angular = [0.0] * d
        angular[2 * i], angular[2 * i + 1] = -y, x
        refs.append(section_from_components([0.0] * d, radial, name=f"R{i + 1}b"))
        refs.append(section_from_components([0.0] * d, angular, name=f"A{i + 1}b"))
    return refs


def constant_refs(chart: Chart):
    """All coordinate vectors and covectors; invariant for constant X0
    and for the toric X0 = -d/dt1."""
    refs = []
    for i in range(2 * chart.dim):
        v = np.zeros(2 * chart.dim)
        v[i] = 1.0
        refs.append(constant_section(chart, v, name=f"e{i}"))
    return refs


# --- flat hyper-Kahler R^4 -------------------------------------------------------

def flat_hyperkahler(max_order: int = 3):
    """Chart (x,y,z,w) with the standard triple (I, J, K) and Kahler forms."""
    chart = Chart(["x", "y", "z", "w"], max_order=max_order)
    I = np.zeros((4, 4))
    I[1, 0], I[0, 1] = 1.0, -1.0
    I[3, 2], I[2, 3] = 1.0, -1.0
    J = np.zeros((4, 4))
    J[2, 0], J[0, 2] = 1.0, -1.0
    J[3, 1], J[1, 3] = -1.0, 1.0
    K = I @ J
    omega_I = FormField(chart, 2, {(0, 1): 1.0, (2, 3): 1.0}, name="om_I")
    omega_J = FormField(chart, 2, {(0, 2): 1.0, (1, 3): -1.0}, name="om_J")
    omega_K = FormField(chart, 2, {(0, 3): 1.0, (1, 2): 1.0}, name="om_K")
    return {"chart": chart, "I": I, "J": J, "K": K,
            "omega_I": omega_I, "omega_J": omega_J, "omega_K": omega_K}
