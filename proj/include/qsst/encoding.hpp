#pragma once

#include <string>
#include <vector>

#include "qsst/rational.hpp"
#include "qsst/state.hpp"

namespace qsst {

enum class Scheme { GHZ, Parity };

// (n blocks) x (p photons per block); GHZ is the p = 1 layout with H/V
// logical bases. q is the level-1 retry threshold (q = 0 skips the B_psi
// phase entirely, which p = 1 forces).
struct EncodingParams {
    Scheme scheme = Scheme::GHZ;
    int n = 1;
    int p = 1;
    int q = 0;

    static EncodingParams ghz(int n);
    static EncodingParams parity(int n, int p, int q = -1);  // q < 0 means p-1

    int photons_per_qubit() const { return n * p; }
    void validate() const;
};

struct SecretSpec {
    cx alpha{1.0, 0.0};
    cx beta{0.0, 0.0};

    // |alpha|^2 + |beta|^2 scaled to one.
    static SecretSpec normalized(cx alpha, cx beta);
};

enum class BellSymbol { Phi, Psi };
enum class BellSign { Plus, Minus };
enum class BellLevel { Photon, Block, Logical };

struct BellLabel {
    BellSymbol symbol = BellSymbol::Phi;
    BellSign sign = BellSign::Plus;
    BellLevel level = BellLevel::Photon;

    BellLabel flipped_sign() const { return {symbol, sign == BellSign::Plus ? BellSign::Minus : BellSign::Plus, level}; }
    BellLabel flipped_symbol() const { return {symbol == BellSymbol::Phi ? BellSymbol::Psi : BellSymbol::Phi, sign, level}; }
    bool operator==(const BellLabel& o) const { return symbol == o.symbol && sign == o.sign && level == o.level; }
    std::string str() const;
};

// The four labels of one level, in the fixed order phi+, phi-, psi+, psi-.
std::vector<BellLabel> all_bell_labels(BellLevel level);

// Photon-level Bell kets in the H/V basis: phi± = HH±VV, psi± = HV±VH.
PureState bell_ket(const BellLabel& label);

// |±(p)> = |+>^p ± |->^p, i.e. the uniform superposition of even/odd
// parity bitstrings.
PureState parity_block_ket(int p, BellSign sign);

// Block-size Bell state on 2p photons, ordered (block, block').
PureState block_bell_ket(const BellLabel& label, int p);

// Logical Bell state on 2N photons in qubit-major order (1..N, 1'..N').
PureState logical_bell_state(const BellLabel& label, const EncodingParams& enc);

PureState ghz_state(int num_photons);

// alpha|0_L> + beta|1_L> over n*p photons.
PureState shared_secret_state(const SecretSpec& secret, const EncodingParams& enc);

// (n+m)-photon GHZ channel, sender modes first.
PureState network_channel(int n_senders, int m_receivers);

struct BellProductTerm {
    std::vector<BellLabel> factors;  // one per re-paired unit
    Rational weight;                 // probability weight; terms are uniform
};

// Logical Bell state as a sum of products of one-level-down Bell states
// over re-paired units (GHZ: photon pairs; parity: block pairs).
std::vector<BellProductTerm> decompose_logical_bell(const BellLabel& label, const EncodingParams& enc);

// Block-size Bell state as a sum of photon-pair Bell products (Table of
// parity rules: phi_(p) has an even, psi_(p) an odd number of psi factors,
// all factors carrying the block's sign).
std::vector<BellProductTerm> decompose_block_bell(const BellLabel& label, int p);

// new_index_of_old permutation from qubit-major order (1..n,1'..n') to the
// order (1,1',2,2',...) for n_units units of unit_size photons each.
std::vector<int> repaired_mode_order(int n_units, int unit_size);

// Rebuilds the logical Bell state from its decomposition terms (for the
// identity checks). flatten_to_photons expands parity block factors down to
// photon-pair products first.
PureState reassemble_decomposition(const BellLabel& label, const EncodingParams& enc, bool flatten_to_photons = false);

}  // namespace qsst
