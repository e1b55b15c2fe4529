#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qsst/encoding.hpp"

using namespace qsst;

namespace {

constexpr double kRt2 = 0.7071067811865475244;

bool same_state(const PureState& a, const PureState& b, double tol = 1e-12) {
    return a.num_photons() == b.num_photons() && (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() < tol;
}

std::multiset<std::string> term_strings(const std::vector<BellProductTerm>& terms) {
    std::multiset<std::string> out;
    for (const auto& t : terms) {
        std::string s;
        for (const auto& f : t.factors) s += f.str() + " ";
        out.insert(s);
    }
    return out;
}

}  // namespace

TEST_CASE("ghz_state lays equal weight on the all-H and all-V strings") {
    const PureState g1 = ghz_state(1);
    CHECK(std::abs(g1.amplitude(0) - cx(kRt2, 0)) < 1e-12);
    CHECK(std::abs(g1.amplitude(1) - cx(kRt2, 0)) < 1e-12);

    const PureState g4 = ghz_state(4);
    CHECK(std::abs(g4.amplitude(0) - cx(kRt2, 0)) < 1e-12);
    CHECK(std::abs(g4.amplitude(15) - cx(kRt2, 0)) < 1e-12);
    for (std::int64_t k = 1; k < 15; ++k) CHECK(std::abs(g4.amplitude(k)) < 1e-15);
    CHECK(fidelity(g4, ghz_state(4)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS(ghz_state(0));
}

TEST_CASE("shared_secret_state covers the experiment's inputs") {
    const auto ghz2 = EncodingParams::ghz(2);
    const PureState a = shared_secret_state(SecretSpec::normalized(1.0, 1.0), ghz2);
    CHECK(same_state(a, make_state({{"HH", 1.0}, {"VV", 1.0}})));

    const PureState c = shared_secret_state(SecretSpec{1.0, 0.0}, ghz2);
    CHECK(same_state(c, make_state({{"HH", 1.0}})));

    // p = 1 parity degenerates to a relabeled GHZ code: |0_L> ~ |H>.
    const PureState p11 = shared_secret_state(SecretSpec::normalized(cx(0.6, 0), cx(0.8, 0)),
                                              EncodingParams::parity(1, 1));
    CHECK(std::abs(p11.amplitude(0) - cx(0.6, 0)) < 1e-12);
    CHECK(std::abs(p11.amplitude(1) - cx(0.8, 0)) < 1e-12);

    CHECK_THROWS(SecretSpec::normalized(0.0, 0.0));
}

TEST_CASE("network_channel is the GHZ state over all parties") {
    CHECK(same_state(network_channel(2, 2), ghz_state(4)));
    CHECK(same_state(network_channel(1, 1), bell_ket({BellSymbol::Phi, BellSign::Plus, BellLevel::Photon})));
    CHECK(same_state(network_channel(3, 5), ghz_state(8)));
    CHECK_THROWS(network_channel(2, 0));
    CHECK_THROWS(network_channel(0, 2));
}

TEST_CASE("channel consistency with the symmetric shared secret") {
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            CHECK(same_state(network_channel(n, m),
                             shared_secret_state(SecretSpec::normalized(1.0, 1.0), EncodingParams::ghz(n + m))));
}

TEST_CASE("logical Bell states match their displayed forms") {
    CHECK(same_state(logical_bell_state({BellSymbol::Phi, BellSign::Plus, BellLevel::Logical}, EncodingParams::ghz(1)),
                     bell_ket({BellSymbol::Phi, BellSign::Plus, BellLevel::Photon})));

    // Psi-_L at n=2, qubit-major order (1,2,1',2'): HHVV - VVHH.
    CHECK(same_state(logical_bell_state({BellSymbol::Psi, BellSign::Minus, BellLevel::Logical}, EncodingParams::ghz(2)),
                     make_state({{"HHVV", 1.0}, {"VVHH", -1.0}})));

    // Parity n=1, p=2: the logical state is the block Bell state built from
    // |+(2)> and |-(2)|.
    const auto enc12 = EncodingParams::parity(1, 2);
    const PureState plus2 = parity_block_ket(2, BellSign::Plus);
    const PureState minus2 = parity_block_ket(2, BellSign::Minus);
    Eigen::VectorXcd want = tensor(plus2, plus2).amplitudes() + tensor(minus2, minus2).amplitudes();
    want /= std::sqrt(2.0);
    CHECK(same_state(logical_bell_state({BellSymbol::Phi, BellSign::Plus, BellLevel::Logical}, enc12),
                     PureState(4, want)));
    CHECK(same_state(block_bell_ket({BellSymbol::Phi, BellSign::Plus, BellLevel::Block}, 2), PureState(4, want)));
}

TEST_CASE("parity block kets are the even/odd parity superpositions") {
    const PureState plus3 = parity_block_ket(3, BellSign::Plus);
    for (std::int64_t x = 0; x < 8; ++x) {
        const int ones = __builtin_popcountll(static_cast<unsigned long long>(x));
        if (ones % 2 == 0) CHECK(std::abs(plus3.amplitude(x) - cx(0.5, 0)) < 1e-12);
        else CHECK(std::abs(plus3.amplitude(x)) < 1e-15);
    }
}

TEST_CASE("logical Bell states are orthonormal") {
    for (const auto& enc : {EncodingParams::ghz(2), EncodingParams::ghz(3), EncodingParams::parity(2, 2)}) {
        const auto labels = all_bell_labels(BellLevel::Logical);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const PureState si = logical_bell_state(labels[i], enc);
            CHECK(std::abs(si.norm_sq() - 1.0) < 1e-12);
            for (std::size_t j = 0; j < i; ++j)
                CHECK(std::abs(inner(si, logical_bell_state(labels[j], enc))) < 1e-12);
        }
    }
}

TEST_CASE("GHZ decomposition terms follow the even/odd-minus rule") {
    const auto phi_plus = decompose_logical_bell({BellSymbol::Phi, BellSign::Plus, BellLevel::Logical},
                                                 EncodingParams::ghz(2));
    CHECK(term_strings(phi_plus) == std::multiset<std::string>{"phi+ phi+ ", "phi- phi- "});
    for (const auto& t : phi_plus) CHECK(t.weight == Rational(1, 2));

    const auto phi_minus = decompose_logical_bell({BellSymbol::Phi, BellSign::Minus, BellLevel::Logical},
                                                  EncodingParams::ghz(3));
    CHECK(term_strings(phi_minus) == std::multiset<std::string>{"phi- phi+ phi+ ", "phi+ phi- phi+ ",
                                                                "phi+ phi+ phi- ", "phi- phi- phi- "});

    // Counting: 2^(n-1) terms for every logical label.
    for (int n = 1; n <= 5; ++n)
        for (const auto& l : all_bell_labels(BellLevel::Logical))
            CHECK(decompose_logical_bell(l, EncodingParams::ghz(n)).size() == (1u << (n - 1)));
}

TEST_CASE("block decomposition follows the Table rules") {
    const auto psi_plus = decompose_block_bell({BellSymbol::Psi, BellSign::Plus, BellLevel::Block}, 2);
    CHECK(term_strings(psi_plus) == std::multiset<std::string>{"psi+ phi+ ", "phi+ psi+ "});

    const auto phi_minus = decompose_block_bell({BellSymbol::Phi, BellSign::Minus, BellLevel::Block}, 2);
    CHECK(term_strings(phi_minus) == std::multiset<std::string>{"phi- phi- ", "psi- psi- "});

    for (int p = 1; p <= 4; ++p)
        for (const auto& l : all_bell_labels(BellLevel::Block))
            CHECK(decompose_block_bell(l, p).size() == (1u << (p - 1)));
}

TEST_CASE("decomposition identities reassemble the logical Bell states") {
    for (int n = 1; n <= 4; ++n) {
        const auto enc = EncodingParams::ghz(n);
        for (const auto& l : all_bell_labels(BellLevel::Logical)) {
            const double f = fidelity(reassemble_decomposition(l, enc), logical_bell_state(l, enc));
            CHECK(f >= 1.0 - 1e-10);
        }
    }
    for (int n = 1; n <= 2; ++n)
        for (int p = 1; p <= 3; ++p) {
            const auto enc = EncodingParams::parity(n, p);
            for (const auto& l : all_bell_labels(BellLevel::Logical)) {
                CHECK(fidelity(reassemble_decomposition(l, enc, false), logical_bell_state(l, enc)) >= 1.0 - 1e-10);
                CHECK(fidelity(reassemble_decomposition(l, enc, true), logical_bell_state(l, enc)) >= 1.0 - 1e-10);
            }
        }
}

TEST_CASE("encoding parameter validation") {
    CHECK_THROWS(EncodingParams::parity(2, 2, 2));   // q > p-1
    CHECK_THROWS(EncodingParams::parity(2, 2, -2));  // negative beyond the p-1 default
    CHECK_THROWS(EncodingParams::parity(0, 2));
    EncodingParams ghz_bad{Scheme::GHZ, 2, 2, 0};
    CHECK_THROWS(ghz_bad.validate());
    CHECK(EncodingParams::parity(2, 3).q == 2);  // default q = p-1
    CHECK(EncodingParams::parity(2, 3).photons_per_qubit() == 6);
}

TEST_CASE("mismatched label levels are rejected") {
    CHECK_THROWS(bell_ket({BellSymbol::Phi, BellSign::Plus, BellLevel::Block}));
    CHECK_THROWS(logical_bell_state({BellSymbol::Phi, BellSign::Plus, BellLevel::Photon}, EncodingParams::ghz(2)));
    CHECK_THROWS(decompose_logical_bell({BellSymbol::Phi, BellSign::Plus, BellLevel::Block}, EncodingParams::ghz(2)));
}
