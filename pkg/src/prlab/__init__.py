"""prlab: a numerical laboratory for dressed Hamiltonians on irrational tori.

The package builds Hamiltonians on a product of a base torus with an
irrational torus whose time-one maps are "generalized pseudo-rotations":
their fixed points fill two codimension-one levels, every iterate is
Morse-Bott non-degenerate, the action spectrum has two points, the model
barcode carries only infinite bars, and the base dynamics embeds on a
slice.  Each of those properties ships with a desk-scale numerical check.
"""

from prlab.symplectic import (
    IrrationalityVector,
    TorusSymplecticStructure,
    ProductSymplecticStructure,
    build_omega_irr,
    hamiltonian_vector_field,
    distinguished_vector_field,
)
from prlab.dressing import (
    ProfilePair,
    BaseHamiltonian,
    DressedHamiltonian,
    make_sin_profiles,
    get_profiles,
    c_norm,
    dress,
    eval_dressed,
    g_factor,
    vector_field_dressed,
    iterate_hamiltonian,
    spectrum_closed_form,
    constant_loop_action,
)
from prlab.systems import catalog_get, catalog_entry, base_time_one_map
from prlab.flow import (
    ProductPoint,
    Monodromy,
    integrate_dressed,
    time_k_map,
    monodromy,
    fixed_set_scan,
    morse_bott_rank,
    semiconjugacy_residual,
)
from prlab.persistence import (
    FilteredComplex,
    Bar,
    Barcode,
    reduce_filtered_complex,
    lower_star_circle,
    kunneth_assemble,
    betti_torus,
    model_floer_barcode,
    model_barcode_crosscheck,
    bottleneck_distance,
)
from prlab.entropy import (
    lyapunov_max,
    separated_entropy,
    barcode_entropy,
)

__version__ = "0.1.0"
