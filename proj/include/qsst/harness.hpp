#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsst/cbm.hpp"
#include "qsst/protocol.hpp"
#include "qsst/state.hpp"

namespace qsst {

// rho = (1-w) |target><target| + w I/d.
struct SyntheticNoisyState {
    PureState target;
    double w = 0.0;

    DensityMatrix rho() const;
    // Mixing weight that lands the state at the requested fidelity with its
    // own target: F = (1-w) + w/d.
    static double weight_for_fidelity(double target_fidelity, std::int64_t dim);
};

// Teleports input_rho (n photons) through channel_rho (n+m photons) under
// ideal four-outcome Bell measurements on pairs (i, i'), averaging the
// corrected receiver states over all 4^n outcome tuples with exact Born
// weights. Consistent tuples get the logical Pauli correction; mixed-symbol
// tuples (zero weight for code-space inputs) are pushed out of the code
// space with an X on the first receiver photon so they cannot masquerade as
// signal. The map is affine in both arguments and trace preserving.
DensityMatrix expected_output_under_ideal_bsm(const DensityMatrix& input_rho, const DensityMatrix& channel_rho,
                                              int n, int m);

// The three reference input states on n=2 photons: (a) HH+VV, (b) HH+iVV,
// (c) HH.
PureState reference_input_state(char which);

// Classical (no-entanglement) teleportation fidelity bound.
inline constexpr double kClassicalFidelityBound = 2.0 / 3.0;

struct FidelityPipelineReport {
    double input_fidelity;    // F(input, ideal target)
    double output_fidelity;   // F(output, ideal target)
    double channel_fidelity;  // F(channel, ideal GHZ)
};

FidelityPipelineReport run_fidelity_pipeline(char input_state, double input_w, double channel_w, int n, int m);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace qsst
