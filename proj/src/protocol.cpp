#include "qsst/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qsst {

std::string PartyId::str() const {
    return (role == Role::Sender ? "s" : "r") + std::to_string(index);
}

std::string LogicalBellOutcome::str() const {
    switch (kind) {
        case Kind::Identified:
            return BellLabel{*symbol, *sign, BellLevel::Logical}.str();
        case Kind::ProtocolFailure: return "failure";
        case Kind::Inconsistent: return "inconsistent";
    }
    return "?";
}

std::string PauliCorrection::str() const {
    if (ops.empty()) return "I";
    std::string s;
    for (const auto& op : ops) {
        if (!s.empty()) s += ",";
        s += op.str();
    }
    return s;
}

std::string EventClass::str(const std::vector<BellOutcome>& outcomes) const {
    if (undetected_failures > 0) return "E";
    if (losses > 0) return "L";
    if (outcomes.size() == 2) {
        std::string s;
        for (const auto& o : outcomes) s += o.detected() ? 'S' : 'F';
        return s;
    }
    return "S" + std::to_string(detections) + "F" + std::to_string(detected_failures);
}

EventClass classify_event(const std::vector<BellOutcome>& outcomes) {
    EventClass e;
    for (const auto& o : outcomes) {
        switch (o.kind) {
            case BellOutcome::Kind::Detected: ++e.detections; break;
            case BellOutcome::Kind::FailureDetected: ++e.detected_failures; break;
            case BellOutcome::Kind::FailureUndetected: ++e.undetected_failures; break;
            case BellOutcome::Kind::LossDetected: ++e.losses; break;
        }
    }
    return e;
}

LogicalBellOutcome infer_logical_outcome(const std::vector<BellOutcome>& outcomes, const BsmVariant&) {
    if (outcomes.empty()) throw std::invalid_argument("infer_logical_outcome: empty outcome list");
    int minus = 0;
    std::optional<BellSymbol> symbol;
    bool mixed = false;
    bool lost = false;
    for (const auto& o : outcomes) {
        if (o.kind == BellOutcome::Kind::LossDetected) lost = true;
        if (!o.detected()) continue;
        if (!o.label) throw std::invalid_argument("detected outcome without a label");
        if (symbol && *symbol != o.label->symbol) mixed = true;
        symbol = symbol ? symbol : o.label->symbol;
        if (o.label->sign == BellSign::Minus) ++minus;
    }
    if (mixed) return LogicalBellOutcome::inconsistent();
    if (!symbol || lost) return LogicalBellOutcome::failure();
    return LogicalBellOutcome::identified(*symbol, (minus % 2 == 0) ? BellSign::Plus : BellSign::Minus);
}

PauliCorrection correction_for(const LogicalBellOutcome& outcome, int m) {
    if (!outcome.identified())
        throw std::invalid_argument("correction_for: outcome is not an identified logical Bell state");
    if (m < 1) throw std::invalid_argument("correction_for: need at least one receiver");
    PauliCorrection c;
    if (*outcome.symbol == BellSymbol::Psi)
        for (int r = 0; r < m; ++r) c.ops.push_back(PauliOp{PauliOp::Kind::X, r});
    if (*outcome.sign == BellSign::Minus) c.ops.push_back(PauliOp{PauliOp::Kind::Z, 0});
    return c;
}

void GhzConfig::validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("protocol: n and m must be >= 1");
    if (2 * n + m > kMaxPhotons) throw std::invalid_argument("protocol: photon budget exceeds the dense cap");
    noise.validate();
}

std::vector<int> party_photons(const PartyId& party, int n, int m) {
    if (party.role == PartyId::Role::Sender) {
        if (party.index < 1 || party.index > n) throw std::out_of_range("sender index out of range");
        return {party.index - 1, n + party.index - 1};
    }
    if (party.index < 1 || party.index > m) throw std::out_of_range("receiver index out of range");
    return {2 * n + party.index - 1};
}

namespace {

PureState joint_initial_state(const GhzConfig& cfg) {
    const PureState secret = shared_secret_state(cfg.secret, EncodingParams::ghz(cfg.n));
    return tensor(secret, network_channel(cfg.n, cfg.m));
}

PureState target_state(const GhzConfig& cfg) {
    const SecretSpec s = SecretSpec::normalized(cfg.secret.alpha, cfg.secret.beta);
    return shared_secret_state(s, EncodingParams::ghz(cfg.m));
}

// Live index of an original photon after a prefix of pair removals.
struct IndexMap {
    std::vector<int> cur;
    explicit IndexMap(int total) : cur(static_cast<std::size_t>(total)) {
        for (std::size_t k = 0; k < cur.size(); ++k) cur[k] = static_cast<int>(k);
    }
    int operator()(int orig) const {
        if (cur[static_cast<std::size_t>(orig)] < 0) throw std::logic_error("photon already consumed");
        return cur[static_cast<std::size_t>(orig)];
    }
    void removed(int orig_a, int orig_b) {
        const int a = cur[static_cast<std::size_t>(orig_a)];
        const int b = cur[static_cast<std::size_t>(orig_b)];
        for (auto& v : cur) {
            if (v < 0) continue;
            int shift = 0;
            if (v > a) ++shift;
            if (v > b) ++shift;
            v -= shift;
        }
        cur[static_cast<std::size_t>(orig_a)] = -1;
        cur[static_cast<std::size_t>(orig_b)] = -1;
    }
};

Transcript finish_transcript(const GhzConfig& cfg, std::vector<Announcement> anns, PureState receivers) {
    Transcript t;
    t.n = cfg.n;
    t.m = cfg.m;
    const SecretSpec s = SecretSpec::normalized(cfg.secret.alpha, cfg.secret.beta);
    t.alpha = s.alpha;
    t.beta = s.beta;
    t.f = cfg.noise.failure_detection_efficiency;
    t.eta = cfg.noise.loss_rate;
    t.epsilon = cfg.noise.flip_error_rate;
    std::vector<BellOutcome> outcomes;
    for (const auto& a : anns) outcomes.push_back(a.outcome);
    t.announcements = std::move(anns);
    t.logical = infer_logical_outcome(outcomes, BsmVariant::bminus());
    const EventClass ev = classify_event(outcomes);
    t.event_class = ev.str(outcomes);
    t.recorded = ev.recorded();
    PureState final_state = receivers;
    if (t.logical.identified()) {
        t.correction = correction_for(t.logical, cfg.m);
        for (const auto& op : t.correction.ops) final_state = apply_pauli(final_state, op);
    }
    t.fidelity = fidelity(final_state, target_state(cfg));
    t.final_state = std::move(final_state);
    return t;
}

}  // namespace

Transcript run_teleportation(const GhzConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    return run_teleportation(cfg, rng, seed);
}

Transcript run_teleportation(const GhzConfig& cfg, Rng& rng, std::uint64_t seed_for_record) {
    cfg.validate();
    PureState state = joint_initial_state(cfg);

    if (cfg.noise.loss_rate > 0.0) {
        std::bernoulli_distribution lose(cfg.noise.loss_rate);
        std::vector<int> lost;
        for (int k = 0; k < 2 * cfg.n; ++k)
            if (lose(rng)) lost.push_back(k);
        if (!lost.empty()) state = state.mark_lost(lost);
    }

    IndexMap map(2 * cfg.n + cfg.m);
    std::vector<Announcement> anns;
    for (int i = 0; i < cfg.n; ++i) {
        auto [outcome, post] = measure_bell(state, map(i), map(cfg.n + i), BsmVariant::bminus(), cfg.noise, rng);
        state = std::move(post);
        map.removed(i, cfg.n + i);
        anns.push_back(Announcement{PartyId{PartyId::Role::Sender, i + 1}, outcome, i});
    }
    Transcript t = finish_transcript(cfg, std::move(anns), std::move(state));
    t.seed = seed_for_record;
    t.sampled = true;
    return t;
}

std::vector<EnumeratedRun> enumerate_teleportation(const GhzConfig& cfg) {
    cfg.validate();
    std::vector<EnumeratedRun> out;

    struct Node {
        PureState state;
        IndexMap map;
        std::vector<Announcement> anns;
        double probability;
        int next;
    };

    const PureState initial = joint_initial_state(cfg);
    const double eta = cfg.noise.loss_rate;

    std::vector<std::pair<PureState, double>> starts;
    if (eta == 0.0) {
        starts.emplace_back(initial, 1.0);
    } else {
        // Loss patterns over the 2n measured photons.
        const int ports = 2 * cfg.n;
        for (std::uint32_t mask = 0; mask < (1u << ports); ++mask) {
            double w = 1.0;
            std::vector<int> lost;
            for (int k = 0; k < ports; ++k) {
                if (mask & (1u << k)) {
                    lost.push_back(k);
                    w *= eta;
                } else {
                    w *= 1.0 - eta;
                }
            }
            if (w <= 0.0) continue;
            starts.emplace_back(lost.empty() ? initial : initial.mark_lost(lost), w);
        }
    }

    std::vector<Node> stack;
    for (auto& [st, w] : starts)
        stack.push_back(Node{st, IndexMap(2 * cfg.n + cfg.m), {}, w, 0});

    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.next == cfg.n) {
            Transcript t = finish_transcript(cfg, node.anns, node.state);
            out.push_back(EnumeratedRun{std::move(t), node.probability});
            continue;
        }
        const int i = node.next;
        for (auto& br : enumerate_bell(node.state, node.map(i), node.map(cfg.n + i), BsmVariant::bminus(), cfg.noise)) {
            Node child{br.post, node.map, node.anns, node.probability * br.probability, i + 1};
            child.map.removed(i, cfg.n + i);
            child.anns.push_back(Announcement{PartyId{PartyId::Role::Sender, i + 1}, br.outcome, i});
            stack.push_back(std::move(child));
        }
    }
    return out;
}

std::vector<ConditionedReducedState> sub_party_reduced_states(const GhzConfig& cfg,
                                                              const std::vector<PartyId>& subset) {
    cfg.validate();
    if (subset.empty()) throw std::invalid_argument("sub-party audit: empty subset");

    std::vector<int> held;
    std::vector<bool> sender_in_subset(static_cast<std::size_t>(cfg.n), false);
    for (const auto& p : subset) {
        for (int ph : party_photons(p, cfg.n, cfg.m)) held.push_back(ph);
        if (p.role == PartyId::Role::Sender) sender_in_subset[static_cast<std::size_t>(p.index - 1)] = true;
    }
    std::sort(held.begin(), held.end());
    held.erase(std::unique(held.begin(), held.end()), held.end());
    if (static_cast<int>(held.size()) == 2 * cfg.n + cfg.m)
        throw std::invalid_argument("sub-party audit: subset covers every photon of the run");

    // Noiseless analyzers for the information audit.
    GhzConfig clean = cfg;
    clean.noise = BsmNoise{};

    struct Node {
        PureState state;
        IndexMap map;
        std::vector<BellOutcome> announced;
        double probability;
        int next;
    };
    // Branches that share an announcement record (e.g. the two collapse
    // directions behind one reported failure) are averaged into a single
    // conditioned state; conditioning sees only the classical record.
    struct Accum {
        std::vector<BellOutcome> announced;
        double probability = 0.0;
        Eigen::MatrixXcd weighted;
    };
    std::map<std::string, Accum> merged;

    std::vector<Node> stack{Node{joint_initial_state(clean), IndexMap(2 * cfg.n + cfg.m), {}, 1.0, 0}};
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.next == cfg.n) {
            std::vector<int> keep;
            for (int ph : held) keep.push_back(node.map(ph));
            const DensityMatrix rho = partial_trace(node.state, keep);
            std::string key;
            for (const auto& o : node.announced) key += o.str() + "|";
            auto& acc = merged[key];
            if (acc.probability == 0.0) {
                acc.announced = node.announced;
                acc.weighted = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
            }
            acc.probability += node.probability;
            acc.weighted += node.probability * rho.matrix();
            continue;
        }
        const int i = node.next;
        if (sender_in_subset[static_cast<std::size_t>(i)]) {
            // Subset members do not measure; their pairs stay live.
            Node child{node.state, node.map, node.announced, node.probability, i + 1};
            stack.push_back(std::move(child));
            continue;
        }
        for (auto& br : enumerate_bell(node.state, node.map(i), node.map(cfg.n + i), BsmVariant::bminus(),
                                       clean.noise)) {
            Node child{br.post, node.map, node.announced, node.probability * br.probability, i + 1};
            child.map.removed(i, cfg.n + i);
            child.announced.push_back(br.outcome);
            stack.push_back(std::move(child));
        }
    }
    std::vector<ConditionedReducedState> out;
    for (auto& [key, acc] : merged) {
        const int kept_photons = static_cast<int>(held.size());
        out.push_back(ConditionedReducedState{acc.announced, acc.probability,
                                              DensityMatrix(kept_photons, acc.weighted / acc.probability)});
    }
    return out;
}

namespace exact {

EventTally enumerate_events(int n, const Rational& f) {
    if (n < 1 || n > 12) throw std::invalid_argument("enumerate_events: n out of range (1..12)");
    const Rational one(1);
    const Rational base(1, std::int64_t{1} << (n + 1));  // weight per (symbol, sign pattern)
    EventTally t{};

    for (int symbol = 0; symbol < 2; ++symbol) {
        for (std::uint32_t signs = 0; signs < (1u << n); ++signs) {
            // Minus-signed pairs are detected by the B that discriminates
            // phi-/psi-; plus-signed pairs land in its failure subspace.
            std::vector<int> fails;
            int dets = 0;
            for (int k = 0; k < n; ++k)
                if (signs & (1u << k)) ++dets;
                else fails.push_back(k);
            const int nf = static_cast<int>(fails.size());
            for (std::uint32_t det_mask = 0; det_mask < (1u << nf); ++det_mask) {
                Rational w = base;
                int det_fail = 0;
                for (int k = 0; k < nf; ++k) {
                    if (det_mask & (1u << k)) {
                        w *= f;
                        ++det_fail;
                    } else {
                        w *= one - f;
                    }
                }
                if (w == Rational(0)) continue;
                const int undet = nf - det_fail;
                const bool recorded = undet == 0;
                const bool identified = dets >= 1;
                if (recorded) t.p_recorded += w;
                if (identified) t.p_identified += w;
                if (recorded && identified) t.p_success += w;
                if (n == 2) {
                    if (undet > 0) {
                        t.p_e += w;
                    } else {
                        const bool s0 = (signs & 1u) != 0;
                        const bool s1 = (signs & 2u) != 0;
                        if (s0 && s1) t.p_ss += w;
                        else if (s0) t.p_sf += w;
                        else if (s1) t.p_fs += w;
                        else t.p_ff += w;
                    }
                }
            }
        }
    }
    if (n == 2 && !(t.p_recorded == Rational(0))) {
        t.cond_ss = t.p_ss / t.p_recorded;
        t.cond_sf = t.p_sf / t.p_recorded;
        t.cond_fs = t.p_fs / t.p_recorded;
        t.cond_ff = t.p_ff / t.p_recorded;
        t.cond_e = Rational(0);
    }
    return t;
}

Rational success_probability(int n, const Rational& f) { return enumerate_events(n, f).p_success; }

}  // namespace exact

}  // namespace qsst
