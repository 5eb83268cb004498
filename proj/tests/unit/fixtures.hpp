#pragma once

#include "tripod/protocol.hpp"
#include "tripod/units.hpp"

namespace fixtures {

/// Short storage run: Gamma = 6, Omega_C = 7, 6 us tripod delay, 4 us pulse.
inline tripod::StorageSetup small_storage(double b_field = 2.0) {
    tripod::StorageSetup s;
    s.scheme = tripod::build_scheme(tripod::SchemeVariant::Tripod4, 6.0, false);
    s.drive.omega_c = 7.0;
    s.drive.b_field = b_field;
    s.medium.coupling_density = tripod::coupling_density_for_delay(6.0, 7.0, 50.0);
    s.pulse.length = 4.0;
    s.pulse.edge = 2.0;
    s.pulse.amplitude = 0.35;
    s.timing = {1.5, 2.0, 1.0};
    s.nz = 60;
    s.options.settle = 0.2;
    s.options.fit_gate = 0.5;
    return s;
}

}  // namespace fixtures
