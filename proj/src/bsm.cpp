#include "qsst/bsm.hpp"

#include <stdexcept>

namespace qsst {

std::string bsm_kind_str(BsmKind k) {
    switch (k) {
        case BsmKind::Bpsi: return "Bpsi";
        case BsmKind::Bplus: return "Bplus";
        case BsmKind::Bminus: return "Bminus";
    }
    return "?";
}

std::array<BellLabel, 2> BsmVariant::detected() const {
    using S = BellSymbol;
    using G = BellSign;
    switch (kind) {
        case BsmKind::Bpsi: return {BellLabel{S::Psi, G::Plus}, BellLabel{S::Psi, G::Minus}};
        case BsmKind::Bplus: return {BellLabel{S::Phi, G::Plus}, BellLabel{S::Psi, G::Plus}};
        case BsmKind::Bminus: return {BellLabel{S::Phi, G::Minus}, BellLabel{S::Psi, G::Minus}};
    }
    throw std::logic_error("unreachable");
}

std::array<BellLabel, 2> BsmVariant::failure_subspace() const {
    const auto det = detected();
    std::array<BellLabel, 2> out{};
    std::size_t k = 0;
    for (const auto& l : all_bell_labels(BellLevel::Photon))
        if (!(l == det[0]) && !(l == det[1])) out[k++] = l;
    return out;
}

bool BsmVariant::detects(const BellLabel& label) const {
    const auto det = detected();
    return label == det[0] || label == det[1];
}

void BsmNoise::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(failure_detection_efficiency) || !in01(loss_rate) || !in01(flip_error_rate))
        throw std::invalid_argument("BsmNoise: parameters must lie in [0,1]");
}

std::string BellOutcome::str() const {
    switch (kind) {
        case Kind::Detected: return label ? label->str() : "det?";
        case Kind::FailureDetected: return "fail";
        case Kind::FailureUndetected: return "fail?";
        case Kind::LossDetected: return "loss";
    }
    return "?";
}

std::vector<BellBranch> enumerate_bell(const PureState& state, int i, int j, const BsmVariant& variant,
                                       const BsmNoise& noise) {
    noise.validate();
    std::vector<BellBranch> out;

    if (state.lost(i) || state.lost(j)) {
        // The analyzer registers a photon-number mismatch. The pair is
        // consumed; computational projections reproduce the trace over it.
        static const std::vector<std::pair<std::string, cx>> basis_terms[4] = {
            {{"HH", 1.0}}, {{"VH", 1.0}}, {{"HV", 1.0}}, {{"VV", 1.0}}};
        std::vector<PureState> comp;
        for (const auto& t : basis_terms) comp.push_back(make_state(t));
        const BellLabel placeholder{BellSymbol::Phi, BellSign::Plus, BellLevel::Photon};
        for (const auto& br : project_two_photon_branches(state, i, j, comp, 1e-14, /*loss_aware=*/true))
            out.push_back(BellBranch{BellOutcome::loss(), placeholder, br.probability, br.post});
        return out;
    }

    std::vector<PureState> bell_basis;
    std::vector<BellLabel> labels = all_bell_labels(BellLevel::Photon);
    for (const auto& l : labels) bell_basis.push_back(bell_ket(l));

    const double f = noise.failure_detection_efficiency;
    const double eps = noise.flip_error_rate;

    for (const auto& br : project_two_photon_branches(state, i, j, bell_basis)) {
        const BellLabel actual = labels[static_cast<std::size_t>(br.outcome)];
        if (variant.detects(actual)) {
            if (eps > 0.0) {
                out.push_back(BellBranch{BellOutcome::det(actual), actual, br.probability * (1.0 - eps), br.post});
                out.push_back(
                    BellBranch{BellOutcome::det(actual.flipped_sign()), actual, br.probability * eps / 2.0, br.post});
                out.push_back(
                    BellBranch{BellOutcome::det(actual.flipped_symbol()), actual, br.probability * eps / 2.0, br.post});
            } else {
                out.push_back(BellBranch{BellOutcome::det(actual), actual, br.probability, br.post});
            }
        } else {
            // Failure: the physical collapse is the same whether or not the
            // two-detector coincidence flags it; only the record differs.
            if (f > 0.0)
                out.push_back(BellBranch{BellOutcome::fail_detected(), actual, br.probability * f, br.post});
            if (f < 1.0)
                out.push_back(BellBranch{BellOutcome::fail_undetected(), actual, br.probability * (1.0 - f), br.post});
        }
    }
    return out;
}

std::pair<BellOutcome, PureState> measure_bell(const PureState& state, int i, int j, const BsmVariant& variant,
                                               const BsmNoise& noise, Rng& rng) {
    auto branches = enumerate_bell(state, i, j, variant, noise);
    double total = 0.0;
    for (const auto& b : branches) total += b.probability;
    std::uniform_real_distribution<double> u(0.0, total);
    double x = u(rng);
    for (const auto& b : branches) {
        if (x < b.probability) return {b.outcome, b.post};
        x -= b.probability;
    }
    return {branches.back().outcome, branches.back().post};
}

}  // namespace qsst
