#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsst/rng.hpp"

namespace qsst {

using cx = std::complex<double>;

// Dense amplitude vectors; 2^20 amplitudes is the largest state the exact
// engine will build. Larger encodings go through the label-level simulator.
inline constexpr int kMaxPhotons = 20;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kSpectralTol = 1e-10;

// Single-photon polarization Pauli. XZ means Z first, then X.
struct PauliOp {
    enum class Kind { I, X, Z, XZ };
    Kind kind = Kind::I;
    int target = 0;

    std::string str() const;
};

class DensityMatrix;

// N-photon polarization state. Bit k of an amplitude index is photon k
// (0 = H, 1 = V); string literals like "HVH" map position k to photon k.
// Values are immutable after construction; every operation returns a new
// state. A lost photon's amplitudes stay in the vector (tracing it out is
// deferred to partial_trace), but addressing it is rejected.
class PureState {
public:
    PureState(int num_photons, Eigen::VectorXcd amplitudes, std::vector<std::uint8_t> lost = {});

    int num_photons() const { return num_photons_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(amps_.size()); }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    cx amplitude(std::int64_t index) const { return amps_(index); }

    bool lost(int photon) const;
    int num_lost() const;
    PureState mark_lost(const std::vector<int>& photons) const;

    double norm_sq() const { return amps_.squaredNorm(); }
    PureState normalized() const;

private:
    int num_photons_;
    Eigen::VectorXcd amps_;
    std::vector<std::uint8_t> lost_;
};

class DensityMatrix {
public:
    DensityMatrix(int num_photons, Eigen::MatrixXcd matrix);

    static DensityMatrix from_pure(const PureState& psi);

    int num_photons() const { return num_photons_; }
    std::int64_t dim() const { return matrix_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    double purity() const;
    // Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-10.
    void validate() const;

private:
    int num_photons_;
    Eigen::MatrixXcd matrix_;
};

// Normalized state from relative amplitudes, e.g. {{"HH",1},{"VV",i}}.
PureState make_state(const std::vector<std::pair<std::string, cx>>& terms);

// Kronecker product; photons of a keep their indices, photons of b shift up.
PureState tensor(const PureState& a, const PureState& b);

PureState apply_pauli(const PureState& state, const PauliOp& op);

// new_index_of_old[k] is photon k's position in the returned state.
PureState permute_photons(const PureState& state, const std::vector<int>& new_index_of_old);

struct ProjectionBranch {
    int outcome;        // index into the projector list
    double probability;
    PureState post;     // photons i and j removed
};

// Projective two-photon measurement onto an orthonormal set of two-photon
// kets (ket photon 0 <-> state photon i, ket photon 1 <-> state photon j).
// Enumerates every outcome branch with its Born probability; branches with
// probability below tol are dropped. With an incomplete set the
// probabilities may sum below one. Addressing a lost photon is rejected
// unless loss_aware is set (the loss-registering analyzers use it to consume
// a pair whose partner is gone).
std::vector<ProjectionBranch> project_two_photon_branches(const PureState& state, int i, int j,
                                                          const std::vector<PureState>& projector_basis,
                                                          double drop_tol = 1e-14, bool loss_aware = false);

// Sampling front end over the same branches. The projector set must span
// the pair within 1e-10 for sampling to be well defined.
ProjectionBranch project_two_photon(const PureState& state, int i, int j,
                                    const std::vector<PureState>& projector_basis, Rng& rng);

// Reduced state over `keep` (which must not contain lost photons); every
// other photon, lost ones included, is traced out.
DensityMatrix partial_trace(const PureState& state, const std::vector<int>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// <target|rho|target>; target must be a fully held pure state of equal size.
double fidelity(const DensityMatrix& rho, const PureState& target);
double fidelity(const PureState& a, const PureState& b);

cx inner(const PureState& a, const PureState& b);

}  // namespace qsst
