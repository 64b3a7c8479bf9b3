#ifndef TWOMODE_COMMANDS_HPP
#define TWOMODE_COMMANDS_HPP

#include "twomode/io.hpp"

namespace twomode {

// Labeled spectrum and mode parameters at the configured working point.
ResultBundle cmd_spectrum(const RunConfig& cfg);

// EJ/EC sweep at fixed EP/EC: numerical vs calibrated analytic dispersion
// for the four lowest levels.
ResultBundle cmd_dispersion_sweep(const RunConfig& cfg);

// Single synthesized Ramsey trace: spectrum, four-peak fit, inversion.
ResultBundle cmd_ramsey(const RunConfig& cfg);

// Scenario -> trace series -> tracked (df1, df2, n_g) trajectory.
ResultBundle cmd_track(const RunConfig& cfg);

// Biangulation of a measured offset pair on the configured map.
ResultBundle cmd_localize(const RunConfig& cfg);

// Full loop: scenario -> tracking -> per-point localization -> metrics.
ResultBundle cmd_end2end(const RunConfig& cfg);

}  // namespace twomode

#endif
