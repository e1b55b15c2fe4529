#include "qsst/harness.hpp"

#include <cmath>
#include <stdexcept>

namespace qsst {

DensityMatrix SyntheticNoisyState::rho() const {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("SyntheticNoisyState: w must lie in [0,1]");
    const auto d = target.dim();
    Eigen::MatrixXcd m = (1.0 - w) * (target.amplitudes() * target.amplitudes().adjoint());
    m += (w / static_cast<double>(d)) * Eigen::MatrixXcd::Identity(d, d);
    return DensityMatrix(target.num_photons(), std::move(m));
}

double SyntheticNoisyState::weight_for_fidelity(double target_fidelity, std::int64_t dim) {
    if (dim < 2) throw std::invalid_argument("weight_for_fidelity: dimension must be >= 2");
    const double w = (1.0 - target_fidelity) / (1.0 - 1.0 / static_cast<double>(dim));
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("weight_for_fidelity: fidelity unreachable by white noise");
    return w;
}

namespace {

struct BellSupport {
    // The two pair-bit combinations (photon i bit, photon i' bit) a Bell ket
    // lives on, with their amplitudes.
    std::array<std::pair<int, cx>, 2> entries;
    BellLabel label;
};

BellSupport bell_support(const BellLabel& l) {
    const double r = 1.0 / std::sqrt(2.0);
    BellSupport s;
    s.label = l;
    if (l.symbol == BellSymbol::Phi) {
        s.entries = {{{0b00, cx(r, 0)}, {0b11, l.sign == BellSign::Plus ? cx(r, 0) : cx(-r, 0)}}};
    } else {
        s.entries = {{{0b01, cx(r, 0)}, {0b10, l.sign == BellSign::Plus ? cx(r, 0) : cx(-r, 0)}}};
    }
    return s;
}

// Correction unitary on the receiver register for one outcome tuple: the
// logical Pauli for consistent tuples, the out-of-code X marker otherwise.
Eigen::MatrixXcd tuple_correction(const std::vector<BellLabel>& tuple, int m) {
    bool any_phi = false, any_psi = false;
    int minus = 0;
    for (const auto& l : tuple) {
        (l.symbol == BellSymbol::Phi ? any_phi : any_psi) = true;
        if (l.sign == BellSign::Minus) ++minus;
    }
    const std::int64_t dim = std::int64_t{1} << m;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    if (any_phi && any_psi) {
        for (std::int64_t x = 0; x < dim; ++x) u(x ^ 1, x) = 1.0;  // X on receiver photon 1
        return u;
    }
    const std::int64_t xmask = any_psi ? dim - 1 : 0;  // logical X = X on every receiver
    const bool z = minus % 2 == 1;                     // logical Z = Z on receiver photon 1
    for (std::int64_t x = 0; x < dim; ++x) {
        const double sign = z && (x & 1) ? -1.0 : 1.0;
        u(x ^ xmask, x) = sign;
    }
    return u;
}

}  // namespace

DensityMatrix expected_output_under_ideal_bsm(const DensityMatrix& input_rho, const DensityMatrix& channel_rho,
                                              int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("expected_output: n and m must be >= 1");
    if (input_rho.dim() != (std::int64_t{1} << n) || channel_rho.dim() != (std::int64_t{1} << (n + m)))
        throw std::invalid_argument("expected_output: dimension mismatch with (n, m)");

    const std::int64_t dr = std::int64_t{1} << m;
    const auto& in = input_rho.matrix();
    const auto& ch = channel_rho.matrix();

    const auto labels = all_bell_labels(BellLevel::Photon);
    std::vector<BellSupport> supports;
    for (const auto& l : labels) supports.push_back(bell_support(l));

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dr, dr);

    std::vector<int> tuple(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<BellLabel> tuple_labels;
        for (int v : tuple) tuple_labels.push_back(labels[static_cast<std::size_t>(v)]);

        // Kraus support: per pair choose one of the two basis combos; photon
        // i carries the input bit, photon i' the channel bit.
        struct Entry {
            std::int64_t in_bits;
            std::int64_t ch_bits;
            cx coeff;
        };
        std::vector<Entry> entries{{0, 0, cx(1.0, 0.0)}};
        for (int i = 0; i < n; ++i) {
            const auto& sup = supports[static_cast<std::size_t>(tuple[static_cast<std::size_t>(i)])];
            std::vector<Entry> next;
            for (const auto& e : entries)
                for (const auto& [combo, amp] : sup.entries) {
                    Entry ne = e;
                    if (combo & 0b01) ne.in_bits |= std::int64_t{1} << i;
                    if (combo & 0b10) ne.ch_bits |= std::int64_t{1} << i;
                    ne.coeff *= std::conj(amp);
                    next.push_back(ne);
                }
            entries = std::move(next);
        }

        Eigen::MatrixXcd branch = Eigen::MatrixXcd::Zero(dr, dr);
        for (std::int64_t r1 = 0; r1 < dr; ++r1)
            for (std::int64_t r2 = 0; r2 < dr; ++r2) {
                cx sum(0.0, 0.0);
                for (const auto& e1 : entries)
                    for (const auto& e2 : entries) {
                        const cx v = in(e1.in_bits, e2.in_bits) *
                                     ch(e1.ch_bits | (r1 << n), e2.ch_bits | (r2 << n));
                        sum += e1.coeff * std::conj(e2.coeff) * v;
                    }
                branch(r1, r2) = sum;
            }

        const Eigen::MatrixXcd u = tuple_correction(tuple_labels, m);
        out += u * branch * u.adjoint();

        int i = 0;
        for (; i < n; ++i) {
            if (++tuple[static_cast<std::size_t>(i)] < 4) break;
            tuple[static_cast<std::size_t>(i)] = 0;
        }
        if (i == n) break;
    }
    return DensityMatrix(m, std::move(out));
}

PureState reference_input_state(char which) {
    switch (which) {
        case 'a': return make_state({{"HH", 1.0}, {"VV", 1.0}});
        case 'b': return make_state({{"HH", 1.0}, {"VV", cx(0.0, 1.0)}});
        case 'c': return make_state({{"HH", 1.0}});
    }
    throw std::invalid_argument("reference_input_state: expected 'a', 'b' or 'c'");
}

FidelityPipelineReport run_fidelity_pipeline(char input_state, double input_w, double channel_w, int n, int m) {
    if (n != 2) throw std::invalid_argument("fidelity pipeline: the synthetic inputs are two-photon states (n = 2)");
    const PureState target = reference_input_state(input_state);
    const PureState ghz = ghz_state(n + m);
    const DensityMatrix in = SyntheticNoisyState{target, input_w}.rho();
    const DensityMatrix ch = SyntheticNoisyState{ghz, channel_w}.rho();
    const DensityMatrix out = expected_output_under_ideal_bsm(in, ch, n, m);

    FidelityPipelineReport rep{};
    rep.input_fidelity = fidelity(in, target);
    rep.channel_fidelity = fidelity(ch, ghz);
    const PureState out_target = m == n ? target : shared_secret_state(
        SecretSpec::normalized(target.amplitude(0), target.amplitude(target.dim() - 1)), EncodingParams::ghz(m));
    rep.output_fidelity = fidelity(out, out_target);
    return rep;
}

}  // namespace qsst
