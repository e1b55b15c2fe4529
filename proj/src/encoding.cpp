#include "qsst/encoding.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qsst {

EncodingParams EncodingParams::ghz(int n) {
    EncodingParams e{Scheme::GHZ, n, 1, 0};
    e.validate();
    return e;
}

EncodingParams EncodingParams::parity(int n, int p, int q) {
    EncodingParams e{Scheme::Parity, n, p, q == -1 ? p - 1 : q};
    e.validate();
    return e;
}

void EncodingParams::validate() const {
    if (n < 1) throw std::invalid_argument("encoding: n must be >= 1");
    if (p < 1) throw std::invalid_argument("encoding: p must be >= 1");
    if (scheme == Scheme::GHZ && p != 1) throw std::invalid_argument("encoding: GHZ forces p = 1");
    if (q < 0 || q > p - 1) throw std::invalid_argument("encoding: q must satisfy 0 <= q <= p-1");
    if (2 * photons_per_qubit() > kMaxPhotons)
        throw std::invalid_argument("encoding: logical Bell pair exceeds the dense photon cap");
}

SecretSpec SecretSpec::normalized(cx alpha, cx beta) {
    const double n2 = std::norm(alpha) + std::norm(beta);
    if (n2 <= 0.0) throw std::invalid_argument("secret: alpha and beta cannot both vanish");
    const double s = std::sqrt(n2);
    return SecretSpec{alpha / s, beta / s};
}

std::string BellLabel::str() const {
    std::string s = symbol == BellSymbol::Phi ? "phi" : "psi";
    if (level == BellLevel::Logical) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    s += sign == BellSign::Plus ? "+" : "-";
    if (level == BellLevel::Block) s += "(p)";
    return s;
}

std::vector<BellLabel> all_bell_labels(BellLevel level) {
    return {{BellSymbol::Phi, BellSign::Plus, level},
            {BellSymbol::Phi, BellSign::Minus, level},
            {BellSymbol::Psi, BellSign::Plus, level},
            {BellSymbol::Psi, BellSign::Minus, level}};
}

PureState bell_ket(const BellLabel& label) {
    if (label.level != BellLevel::Photon) throw std::invalid_argument("bell_ket: photon-level label required");
    const cx s = label.sign == BellSign::Plus ? cx(1, 0) : cx(-1, 0);
    if (label.symbol == BellSymbol::Phi) return make_state({{"HH", 1.0}, {"VV", s}});
    return make_state({{"HV", 1.0}, {"VH", s}});
}

PureState parity_block_ket(int p, BellSign sign) {
    if (p < 1 || p > kMaxPhotons) throw std::invalid_argument("parity_block_ket: p out of range");
    const int want = sign == BellSign::Plus ? 0 : 1;
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << p);
    for (std::int64_t x = 0; x < amps.size(); ++x)
        if ((std::popcount(static_cast<std::uint64_t>(x)) & 1) == want) amps(x) = 1.0;
    return PureState(p, amps / std::sqrt(static_cast<double>(std::int64_t{1} << (p - 1))));
}

PureState block_bell_ket(const BellLabel& label, int p) {
    if (label.level != BellLevel::Block) throw std::invalid_argument("block_bell_ket: block-level label required");
    const PureState plus = parity_block_ket(p, BellSign::Plus);
    const PureState minus = parity_block_ket(p, BellSign::Minus);
    const PureState& left1 = plus;
    const PureState& right1 = label.symbol == BellSymbol::Phi ? plus : minus;
    const PureState& left2 = minus;
    const PureState& right2 = label.symbol == BellSymbol::Phi ? minus : plus;
    const double s = label.sign == BellSign::Plus ? 1.0 : -1.0;
    Eigen::VectorXcd amps = tensor(left1, right1).amplitudes() + s * tensor(left2, right2).amplitudes();
    return PureState(2 * p, amps / std::sqrt(2.0));
}

namespace {

PureState logical_basis(const EncodingParams& enc, int bit) {
    const int N = enc.photons_per_qubit();
    if (enc.scheme == Scheme::GHZ) {
        Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << N);
        amps(bit == 0 ? 0 : (std::int64_t{1} << N) - 1) = 1.0;
        return PureState(N, std::move(amps));
    }
    PureState block = parity_block_ket(enc.p, bit == 0 ? BellSign::Plus : BellSign::Minus);
    PureState out = block;
    for (int k = 1; k < enc.n; ++k) out = tensor(out, block);
    return out;
}

}  // namespace

PureState logical_bell_state(const BellLabel& label, const EncodingParams& enc) {
    if (label.level != BellLevel::Logical)
        throw std::invalid_argument("logical_bell_state: logical-level label required");
    enc.validate();
    const PureState zero = logical_basis(enc, 0);
    const PureState one = logical_basis(enc, 1);
    const PureState& l1 = zero;
    const PureState& r1 = label.symbol == BellSymbol::Phi ? zero : one;
    const PureState& l2 = one;
    const PureState& r2 = label.symbol == BellSymbol::Phi ? one : zero;
    const double s = label.sign == BellSign::Plus ? 1.0 : -1.0;
    Eigen::VectorXcd amps = tensor(l1, r1).amplitudes() + s * tensor(l2, r2).amplitudes();
    const double n = std::sqrt(amps.squaredNorm());
    return PureState(2 * enc.photons_per_qubit(), amps / n);
}

PureState ghz_state(int num_photons) {
    if (num_photons < 1) throw std::invalid_argument("ghz_state: need at least one photon");
    if (num_photons > kMaxPhotons) throw std::invalid_argument("ghz_state: photon cap exceeded");
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << num_photons);
    const double r = 1.0 / std::sqrt(2.0);
    amps(0) = r;
    amps((std::int64_t{1} << num_photons) - 1) = r;
    return PureState(num_photons, std::move(amps));
}

PureState shared_secret_state(const SecretSpec& secret, const EncodingParams& enc) {
    enc.validate();
    const SecretSpec s = SecretSpec::normalized(secret.alpha, secret.beta);
    Eigen::VectorXcd amps = s.alpha * logical_basis(enc, 0).amplitudes() + s.beta * logical_basis(enc, 1).amplitudes();
    const double n = std::sqrt(amps.squaredNorm());
    return PureState(enc.photons_per_qubit(), amps / n);
}

PureState network_channel(int n_senders, int m_receivers) {
    if (n_senders < 1) throw std::invalid_argument("network_channel: need at least one sender");
    if (m_receivers < 1) throw std::invalid_argument("network_channel: need at least one receiver");
    return ghz_state(n_senders + m_receivers);
}

namespace {

// Subsets of [count] whose size parity matches `odd`, as bitmasks.
std::vector<std::uint32_t> parity_subsets(int count, bool odd) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (1u << count); ++s)
        if ((std::popcount(s) & 1) == (odd ? 1 : 0)) out.push_back(s);
    return out;
}

}  // namespace

std::vector<BellProductTerm> decompose_logical_bell(const BellLabel& label, const EncodingParams& enc) {
    if (label.level != BellLevel::Logical) throw std::invalid_argument("decompose_logical_bell: logical label required");
    enc.validate();
    const BellLevel down = enc.scheme == Scheme::GHZ ? BellLevel::Photon : BellLevel::Block;
    const auto subsets = parity_subsets(enc.n, label.sign == BellSign::Minus);
    const Rational w(1, static_cast<std::int64_t>(subsets.size()));
    std::vector<BellProductTerm> terms;
    for (auto s : subsets) {
        BellProductTerm t;
        t.weight = w;
        for (int k = 0; k < enc.n; ++k) {
            const bool minus = (s >> k) & 1u;
            t.factors.push_back(BellLabel{label.symbol, minus ? BellSign::Minus : BellSign::Plus, down});
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

std::vector<BellProductTerm> decompose_block_bell(const BellLabel& label, int p) {
    if (label.level != BellLevel::Block) throw std::invalid_argument("decompose_block_bell: block label required");
    if (p < 1) throw std::invalid_argument("decompose_block_bell: p must be >= 1");
    const auto subsets = parity_subsets(p, label.symbol == BellSymbol::Psi);
    const Rational w(1, static_cast<std::int64_t>(subsets.size()));
    std::vector<BellProductTerm> terms;
    for (auto s : subsets) {
        BellProductTerm t;
        t.weight = w;
        for (int k = 0; k < p; ++k) {
            const bool psi = (s >> k) & 1u;
            t.factors.push_back(BellLabel{psi ? BellSymbol::Psi : BellSymbol::Phi, label.sign, BellLevel::Photon});
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

std::vector<int> repaired_mode_order(int n_units, int unit_size) {
    std::vector<int> perm(static_cast<std::size_t>(2 * n_units * unit_size));
    for (int k = 0; k < n_units; ++k)
        for (int t = 0; t < unit_size; ++t) {
            perm[static_cast<std::size_t>(k * unit_size + t)] = 2 * k * unit_size + t;
            perm[static_cast<std::size_t>((n_units + k) * unit_size + t)] = (2 * k + 1) * unit_size + t;
        }
    return perm;
}

PureState reassemble_decomposition(const BellLabel& label, const EncodingParams& enc, bool flatten_to_photons) {
    const auto terms = decompose_logical_bell(label, enc);
    const int N = enc.photons_per_qubit();

    std::vector<BellProductTerm> photon_terms;
    if (enc.scheme == Scheme::GHZ || !flatten_to_photons) {
        photon_terms = terms;
    } else {
        // Expand each block factor through the parity rules down to photon pairs.
        for (const auto& t : terms) {
            std::vector<BellProductTerm> partial{BellProductTerm{{}, t.weight}};
            for (const auto& block : t.factors) {
                const auto sub = decompose_block_bell(block, enc.p);
                std::vector<BellProductTerm> next;
                for (const auto& head : partial)
                    for (const auto& tail : sub) {
                        BellProductTerm merged{head.factors, head.weight * tail.weight};
                        merged.factors.insert(merged.factors.end(), tail.factors.begin(), tail.factors.end());
                        next.push_back(std::move(merged));
                    }
                partial = std::move(next);
            }
            photon_terms.insert(photon_terms.end(), partial.begin(), partial.end());
        }
    }

    const bool photon_level = enc.scheme == Scheme::GHZ || flatten_to_photons;
    const int unit_size = photon_level ? 1 : enc.p;
    const int n_units = photon_level ? N : enc.n;

    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << (2 * N));
    for (const auto& term : photon_terms) {
        PureState prod = photon_level ? bell_ket(term.factors.front()) : block_bell_ket(term.factors.front(), enc.p);
        for (std::size_t k = 1; k < term.factors.size(); ++k) {
            const auto& f = term.factors[k];
            prod = tensor(prod, photon_level ? bell_ket(f) : block_bell_ket(f, enc.p));
        }
        amps += std::sqrt(term.weight.value()) * prod.amplitudes();
    }
    PureState repaired(2 * N, amps / std::sqrt(amps.squaredNorm()));

    // The product lives in re-paired order; undo the permutation.
    const auto perm = repaired_mode_order(n_units, unit_size);
    std::vector<int> inverse(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inverse[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
    return permute_photons(repaired, inverse);
}

}  // namespace qsst
