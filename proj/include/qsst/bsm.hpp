#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qsst/encoding.hpp"
#include "qsst/state.hpp"

namespace qsst {

enum class BsmKind { Bpsi, Bplus, Bminus };

std::string bsm_kind_str(BsmKind k);

// Linear-optics Bell-state analyzer: two of the four Bell states are
// unambiguously identified, the other two span the failure subspace.
struct BsmVariant {
    BsmKind kind = BsmKind::Bminus;

    std::array<BellLabel, 2> detected() const;
    std::array<BellLabel, 2> failure_subspace() const;
    bool detects(const BellLabel& label) const;

    static BsmVariant bpsi() { return {BsmKind::Bpsi}; }
    static BsmVariant bplus() { return {BsmKind::Bplus}; }
    static BsmVariant bminus() { return {BsmKind::Bminus}; }
};

struct BsmNoise {
    double failure_detection_efficiency = 1.0;  // f
    double loss_rate = 0.0;                     // eta, per photon
    double flip_error_rate = 0.0;               // epsilon, on reported labels

    void validate() const;
};

struct BellOutcome {
    enum class Kind { Detected, FailureDetected, FailureUndetected, LossDetected };
    Kind kind = Kind::FailureDetected;
    // Reported label for Detected outcomes. Flip errors and dishonest
    // announcements act on this classical value, so it may fall outside the
    // analyzer's nominal detected set.
    std::optional<BellLabel> label;

    bool detected() const { return kind == Kind::Detected; }
    std::string str() const;

    static BellOutcome det(const BellLabel& l) { return {Kind::Detected, l}; }
    static BellOutcome fail_detected() { return {Kind::FailureDetected, std::nullopt}; }
    static BellOutcome fail_undetected() { return {Kind::FailureUndetected, std::nullopt}; }
    static BellOutcome loss() { return {Kind::LossDetected, std::nullopt}; }
};

struct BellBranch {
    BellOutcome outcome;   // as reported (after f-splits and flip errors)
    BellLabel actual;      // underlying Bell projection; for loss branches a
                           // placeholder (the pair is consumed unread)
    double probability;
    PureState post;        // photons i and j removed
};

// Every outcome branch of one analyzer run on photons (i, j), with exact
// Born probabilities and classical f / epsilon splits. Loss flags on either
// photon dominate: the pair is consumed in computational sub-branches that
// reproduce the traced-out statistics and the outcome is LossDetected.
std::vector<BellBranch> enumerate_bell(const PureState& state, int i, int j, const BsmVariant& variant,
                                       const BsmNoise& noise);

std::pair<BellOutcome, PureState> measure_bell(const PureState& state, int i, int j, const BsmVariant& variant,
                                               const BsmNoise& noise, Rng& rng);

}  // namespace qsst
