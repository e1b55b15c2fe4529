#include <doctest.h>

#include <cmath>
#include <map>

#include "qsst/bsm.hpp"
#include "qsst/encoding.hpp"

using namespace qsst;

namespace {

std::string labels_str(const std::array<BellLabel, 2>& ls) { return ls[0].str() + "," + ls[1].str(); }

}  // namespace

TEST_CASE("analyzer types detect their two Bell states") {
    CHECK(labels_str(BsmVariant::bpsi().detected()) == "psi+,psi-");
    CHECK(labels_str(BsmVariant::bplus().detected()) == "phi+,psi+");
    CHECK(labels_str(BsmVariant::bminus().detected()) == "phi-,psi-");
}

TEST_CASE("failure subspaces are the undetected pairs") {
    CHECK(labels_str(BsmVariant::bminus().failure_subspace()) == "phi+,psi+");
    CHECK(labels_str(BsmVariant::bpsi().failure_subspace()) == "phi+,phi-");
    CHECK(labels_str(BsmVariant::bplus().failure_subspace()) == "phi-,psi-");
}

TEST_CASE("a detected eigenstate is reported with certainty") {
    for (const auto& variant : {BsmVariant::bpsi(), BsmVariant::bplus(), BsmVariant::bminus()}) {
        for (const auto& label : variant.detected()) {
            const auto branches = enumerate_bell(bell_ket(label), 0, 1, variant, BsmNoise{});
            REQUIRE(branches.size() == 1);
            CHECK(branches[0].outcome.detected());
            CHECK(*branches[0].outcome.label == label);
            CHECK(branches[0].probability == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("failure detection efficiency splits the failure record") {
    const auto phi_plus = bell_ket({BellSymbol::Phi, BellSign::Plus, BellLevel::Photon});
    const auto branches = enumerate_bell(phi_plus, 0, 1, BsmVariant::bminus(), BsmNoise{0.5, 0.0, 0.0});
    REQUIRE(branches.size() == 2);
    std::map<BellOutcome::Kind, double> probs;
    for (const auto& b : branches) probs[b.outcome.kind] += b.probability;
    CHECK(probs[BellOutcome::Kind::FailureDetected] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[BellOutcome::Kind::FailureUndetected] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("the failure collapse does not depend on whether it was flagged") {
    // Prepare a state whose pair is a superposition across the failure
    // subspace; detected and undetected failure branches must agree on the
    // post-measurement physics.
    const PureState s = tensor(make_state({{"HH", 1.0}, {"HV", 0.5}, {"VH", 0.5}}), ghz_state(1));
    const auto branches = enumerate_bell(s, 0, 1, BsmVariant::bminus(), BsmNoise{0.5, 0.0, 0.0});
    std::map<std::string, const BellBranch*> by_actual_detected, by_actual_undetected;
    for (const auto& b : branches) {
        if (b.outcome.kind == BellOutcome::Kind::FailureDetected) by_actual_detected[b.actual.str()] = &b;
        if (b.outcome.kind == BellOutcome::Kind::FailureUndetected) by_actual_undetected[b.actual.str()] = &b;
    }
    REQUIRE(!by_actual_detected.empty());
    for (const auto& [actual, det] : by_actual_detected) {
        REQUIRE(by_actual_undetected.count(actual) == 1);
        const auto* undet = by_actual_undetected[actual];
        CHECK((det->post.amplitudes() - undet->post.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Bminus on the first pair of the joint teleportation state") {
    // alpha = beta: outcome probabilities {phi-: 1/4, psi-: 1/4, failure: 1/2}.
    const PureState secret = shared_secret_state(SecretSpec::normalized(1.0, 1.0), EncodingParams::ghz(2));
    const PureState joint = tensor(secret, network_channel(2, 2));
    const auto branches = enumerate_bell(joint, 0, 2, BsmVariant::bminus(), BsmNoise{});
    std::map<std::string, double> probs;
    for (const auto& b : branches) probs[b.outcome.str()] += b.probability;
    CHECK(probs["phi-"] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(probs["psi-"] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(probs["fail"] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("loss dominates the analyzer outcome") {
    const PureState lossy = make_state({{"HH", 1.0}, {"VV", 1.0}}).mark_lost({1});
    const auto branches = enumerate_bell(lossy, 0, 1, BsmVariant::bminus(), BsmNoise{});
    double total = 0.0;
    for (const auto& b : branches) {
        CHECK(b.outcome.kind == BellOutcome::Kind::LossDetected);
        total += b.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flip errors split a detection between sign and symbol misreports") {
    const auto phi_minus = bell_ket({BellSymbol::Phi, BellSign::Minus, BellLevel::Photon});
    const auto branches = enumerate_bell(phi_minus, 0, 1, BsmVariant::bminus(), BsmNoise{1.0, 0.0, 0.5});
    std::map<std::string, double> probs;
    for (const auto& b : branches) probs[b.outcome.str()] += b.probability;
    CHECK(probs["phi-"] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs["phi+"] == doctest::Approx(0.25).epsilon(1e-12));  // sign flip leaves the nominal set
    CHECK(probs["psi-"] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sampling reproduces the enumerated distribution") {
    const PureState s = make_state({{"HV", 1.0}});
    Rng rng(123);
    std::map<std::string, int> counts;
    const int trials = 4000;
    for (int i = 0; i < trials; ++i) {
        auto [outcome, post] = measure_bell(s, 0, 1, BsmVariant::bminus(), BsmNoise{}, rng);
        counts[outcome.str()]++;
    }
    // |HV> = (psi+ + psi-)/sqrt(2): half detected psi-, half failure.
    CHECK(std::abs(counts["psi-"] / static_cast<double>(trials) - 0.5) < 0.05);
    CHECK(std::abs(counts["fail"] / static_cast<double>(trials) - 0.5) < 0.05);
}

TEST_CASE("noise parameters are range-checked") {
    CHECK_THROWS(BsmNoise{1.5, 0.0, 0.0}.validate());
    CHECK_THROWS(BsmNoise{1.0, -0.1, 0.0}.validate());
    CHECK_THROWS(enumerate_bell(ghz_state(2), 0, 1, BsmVariant::bminus(), BsmNoise{2.0, 0.0, 0.0}));
}
