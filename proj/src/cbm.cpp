#include "qsst/cbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsst {

std::string Level1Result::str() const {
    switch (kind) {
        case Kind::Success:
            return "success:" + BellLabel{*symbol, *sign, BellLevel::Block}.str();
        case Kind::SignOnly: return std::string("sign:") + (*sign == BellSign::Plus ? "+" : "-");
        case Kind::Failure: return "failure";
    }
    return "?";
}

std::string run_class_str(RunClass c) {
    switch (c) {
        case RunClass::Success: return "success";
        case RunClass::SignOnly: return "signonly";
        case RunClass::Failure: return "failure";
        case RunClass::Inconsistent: return "inconsistent";
    }
    return "?";
}

std::string AdversaryModel::str() const {
    if (strategy == Strategy::Honest || dishonest_senders.empty()) return "honest";
    std::string s;
    switch (strategy) {
        case Strategy::FlipSign: s = "flipsign"; break;
        case Strategy::FlipSymbol: s = "flipsymbol"; break;
        case Strategy::ReportFailure: s = "reportfailure"; break;
        case Strategy::Random: s = "random"; break;
        default: s = "honest"; break;
    }
    s += ":";
    for (std::size_t i = 0; i < dishonest_senders.size(); ++i) {
        if (i) s += "+";
        s += "s" + std::to_string(dishonest_senders[i]);
    }
    return s;
}

BsmKind level1_next_variant(const std::vector<Level0Record>& history, int q, BsmKind arbitrary) {
    if (q < 0) throw std::invalid_argument("level1_next_variant: q must be >= 0");
    std::optional<BsmKind> committed;
    if (q == 0) committed = arbitrary;
    int consecutive_fails = 0;
    for (const auto& r : history) {
        if (committed) continue;
        switch (r.outcome.kind) {
            case BellOutcome::Kind::Detected:
                committed = r.outcome.label->sign == BellSign::Plus ? BsmKind::Bplus : BsmKind::Bminus;
                break;
            case BellOutcome::Kind::LossDetected:
            case BellOutcome::Kind::FailureUndetected:
                // An unflagged failure leaves the same missing-click signature
                // as a loss, so the policy reacts the same way.
                committed = arbitrary;
                break;
            case BellOutcome::Kind::FailureDetected:
                if (++consecutive_fails == q) committed = arbitrary;
                break;
        }
    }
    return committed.value_or(BsmKind::Bpsi);
}

namespace {

// Sign testimony of one record, if any: a detection reports its sign; a
// clean B+ (B-) failure collapses onto the minus (plus) pair.
std::optional<BellSign> sign_evidence(const Level0Record& r) {
    if (r.outcome.kind == BellOutcome::Kind::Detected) return r.outcome.label->sign;
    if (r.outcome.kind == BellOutcome::Kind::FailureDetected) {
        if (r.variant == BsmKind::Bplus) return BellSign::Minus;
        if (r.variant == BsmKind::Bminus) return BellSign::Plus;
    }
    return std::nullopt;
}

// Symbol testimony: detections report it; a clean B_psi failure collapses
// onto {phi+, phi-}, so the pair is phi regardless of the block sign.
std::optional<BellSymbol> symbol_evidence(const Level0Record& r) {
    if (r.outcome.kind == BellOutcome::Kind::Detected) return r.outcome.label->symbol;
    if (r.outcome.kind == BellOutcome::Kind::FailureDetected && r.variant == BsmKind::Bpsi) return BellSymbol::Phi;
    return std::nullopt;
}

SignVote vote_signs(const std::vector<Level0Record>& raw) {
    int plus = 0, minus = 0;
    for (const auto& r : raw) {
        if (auto s = sign_evidence(r)) (*s == BellSign::Plus ? plus : minus)++;
    }
    SignVote v;
    v.evidence = plus + minus;
    v.tie = plus == minus && v.evidence > 0;
    v.sign = minus > plus ? BellSign::Minus : BellSign::Plus;
    return v;
}

}  // namespace

SignVote majority_vote_sign(const std::vector<Level0Record>& raw) {
    const bool any_detected = std::any_of(raw.begin(), raw.end(),
                                          [](const Level0Record& r) { return r.outcome.detected(); });
    if (!any_detected) throw std::invalid_argument("majority_vote_sign: no detected outcome in the record");
    return vote_signs(raw);
}

Level1Result classify_level1(std::vector<Level0Record> raw, int p) {
    if (static_cast<int>(raw.size()) != p)
        throw std::invalid_argument("classify_level1: expected one record per photon pair");
    const SignVote vote = vote_signs(raw);

    Level1Result res;
    res.raw = std::move(raw);
    if (vote.evidence == 0) {
        res.kind = Level1Result::Kind::Failure;
        return res;
    }
    res.sign = vote.sign;
    res.sign_tie = vote.tie;

    int psi_count = 0;
    bool all_symbols_known = true;
    for (const auto& r : res.raw) {
        const auto sym = symbol_evidence(r);
        if (!sym) all_symbols_known = false;
        else if (*sym == BellSymbol::Psi) ++psi_count;
    }
    if (all_symbols_known) {
        res.kind = Level1Result::Kind::Success;
        res.symbol = psi_count % 2 == 0 ? BellSymbol::Phi : BellSymbol::Psi;
        return res;
    }
    res.kind = Level1Result::Kind::SignOnly;
    bool psi_detected = false, pm_sign_evidence = false;
    for (const auto& r : res.raw) {
        if (r.variant == BsmKind::Bpsi && r.outcome.detected()) psi_detected = true;
        if (r.variant != BsmKind::Bpsi && sign_evidence(r)) pm_sign_evidence = true;
    }
    res.sign_from_psi_only = psi_detected && !pm_sign_evidence;
    return res;
}

LogicalBellOutcome bsm_level2(const std::vector<Level1Result>& results) {
    if (results.empty()) throw std::invalid_argument("bsm_level2: empty result list");
    int minus = 0;
    std::optional<BellSymbol> symbol;
    bool mixed = false, any_failure = false;
    for (const auto& r : results) {
        if (r.kind == Level1Result::Kind::Failure) {
            any_failure = true;
            continue;
        }
        if (*r.sign == BellSign::Minus) ++minus;
        if (r.kind == Level1Result::Kind::Success) {
            if (symbol && *symbol != *r.symbol) mixed = true;
            if (!symbol) symbol = r.symbol;
        }
    }
    if (mixed) return LogicalBellOutcome::inconsistent();
    if (any_failure || !symbol) return LogicalBellOutcome::failure();
    return LogicalBellOutcome::identified(*symbol, minus % 2 == 0 ? BellSign::Plus : BellSign::Minus);
}

SymbolCorrection logical_symbol_correct(const std::vector<Level1Result>& results) {
    if (results.empty()) throw std::invalid_argument("logical_symbol_correct: empty result list");
    int phi = 0, psi = 0, minus = 0;
    bool any_failure = false;
    for (const auto& r : results) {
        if (r.kind == Level1Result::Kind::Failure) {
            any_failure = true;
            continue;
        }
        if (*r.sign == BellSign::Minus) ++minus;
        if (r.kind == Level1Result::Kind::Success) (*r.symbol == BellSymbol::Phi ? phi : psi)++;
    }
    SymbolCorrection out;
    if (any_failure || phi + psi == 0) {
        out.outcome = LogicalBellOutcome::failure();
        return out;
    }
    if (phi == psi) {
        out.outcome = LogicalBellOutcome::inconsistent();
        return out;
    }
    const BellSymbol sym = phi > psi ? BellSymbol::Phi : BellSymbol::Psi;
    out.overruled_blocks = std::min(phi, psi);
    out.outcome = LogicalBellOutcome::identified(sym, minus % 2 == 0 ? BellSign::Plus : BellSign::Minus);
    return out;
}

Level1Result apply_adversary(const Level1Result& honest, const AdversaryModel::Strategy& strategy, Rng* rng) {
    using S = AdversaryModel::Strategy;
    Level1Result a = honest;
    a.raw.clear();  // announcements carry the classified result only
    switch (strategy) {
        case S::Honest: return a;
        case S::FlipSign:
            if (a.sign) a.sign = *a.sign == BellSign::Plus ? BellSign::Minus : BellSign::Plus;
            return a;
        case S::FlipSymbol:
            if (a.symbol) a.symbol = *a.symbol == BellSymbol::Phi ? BellSymbol::Psi : BellSymbol::Phi;
            return a;
        case S::ReportFailure: return Level1Result::make_failure();
        case S::Random: {
            if (!rng) throw std::invalid_argument("random adversary strategy needs a generator");
            std::uniform_int_distribution<int> pick(0, 6);
            const int k = pick(*rng);
            if (k < 4)
                return Level1Result::make_success(k % 2 == 0 ? BellSymbol::Phi : BellSymbol::Psi,
                                                  k < 2 ? BellSign::Plus : BellSign::Minus);
            if (k < 6) return Level1Result::make_signonly(k == 4 ? BellSign::Plus : BellSign::Minus);
            return Level1Result::make_failure();
        }
    }
    return a;
}

void CbmConfig::validate() const {
    enc.validate();
    noise.validate();
    const int N = enc.photons_per_qubit();
    if (m < 1 || m > N) throw std::invalid_argument("cbm: receiver count must lie in 1..N");
    if (enc.scheme == Scheme::Parity && 3 * N > kMaxPhotons)
        throw std::invalid_argument("cbm: exact mode photon budget exceeded; use LabelLevel");
    for (int s : adversary.dishonest_senders)
        if (s < 1 || s > enc.n) throw std::invalid_argument("cbm: dishonest sender index out of range");
}

PauliCorrection ft_correction_for(const LogicalBellOutcome& outcome, const EncodingParams& enc) {
    if (!outcome.identified()) throw std::invalid_argument("ft_correction_for: outcome not identified");
    PauliCorrection c;
    if (*outcome.symbol == BellSymbol::Psi)
        for (int b = 0; b < enc.n; ++b) c.ops.push_back(PauliOp{PauliOp::Kind::X, b * enc.p});
    if (*outcome.sign == BellSign::Minus)
        for (int k = 0; k < enc.p; ++k) c.ops.push_back(PauliOp{PauliOp::Kind::Z, k});
    return c;
}

namespace {

struct PairAddress {
    int secret_photon;
    int channel_photon;
};

PairAddress pair_address(const EncodingParams& enc, int block, int k) {
    const int N = enc.photons_per_qubit();
    return {block * enc.p + k, N + block * enc.p + k};
}

// ---------------------------------------------------------------------------
// Exact (dense amplitude) pipeline
// ---------------------------------------------------------------------------

struct ExactNode {
    PureState state;
    std::vector<int> cur;  // live index per original photon, -1 once consumed
    double probability = 1.0;
    std::vector<Level1Result> blocks;
    std::vector<Level0Record> current;  // records of the block in progress
};

int live_index(const std::vector<int>& cur, int orig) {
    const int v = cur[static_cast<std::size_t>(orig)];
    if (v < 0) throw std::logic_error("photon already consumed");
    return v;
}

void note_removed(std::vector<int>& cur, int a, int b) {
    const int ia = cur[static_cast<std::size_t>(a)];
    const int ib = cur[static_cast<std::size_t>(b)];
    for (auto& v : cur) {
        if (v < 0) continue;
        int shift = 0;
        if (v > ia) ++shift;
        if (v > ib) ++shift;
        v -= shift;
    }
    cur[static_cast<std::size_t>(a)] = -1;
    cur[static_cast<std::size_t>(b)] = -1;
}

PureState ft_initial_state(const CbmConfig& cfg) {
    const PureState secret = shared_secret_state(cfg.secret, cfg.enc);
    const PureState channel =
        logical_bell_state(BellLabel{BellSymbol::Phi, BellSign::Plus, BellLevel::Logical}, cfg.enc);
    return tensor(secret, channel);
}

FtTranscript finalize_ft(const CbmConfig& cfg, SimMode mode, std::vector<Level1Result> true_results,
                         const PureState* receivers, Rng* rng) {
    FtTranscript t;
    t.mode = mode;
    t.n = cfg.enc.n;
    t.p = cfg.enc.p;
    t.q = cfg.enc.q;
    t.m = cfg.m;
    const SecretSpec s = SecretSpec::normalized(cfg.secret.alpha, cfg.secret.beta);
    t.alpha = s.alpha;
    t.beta = s.beta;
    t.f = cfg.noise.failure_detection_efficiency;
    t.eta = cfg.noise.loss_rate;
    t.epsilon = cfg.noise.flip_error_rate;
    t.adversary = cfg.adversary.str();

    t.announced.reserve(true_results.size());
    for (std::size_t j = 0; j < true_results.size(); ++j) {
        const bool dishonest =
            cfg.adversary.strategy != AdversaryModel::Strategy::Honest &&
            std::find(cfg.adversary.dishonest_senders.begin(), cfg.adversary.dishonest_senders.end(),
                      static_cast<int>(j) + 1) != cfg.adversary.dishonest_senders.end();
        Level1Result ann = dishonest ? apply_adversary(true_results[j], cfg.adversary.strategy, rng)
                                     : apply_adversary(true_results[j], AdversaryModel::Strategy::Honest, nullptr);
        t.announced.push_back(std::move(ann));
    }
    t.true_results = std::move(true_results);

    if (cfg.symbol_correction) {
        const SymbolCorrection sc = logical_symbol_correct(t.announced);
        t.logical = sc.outcome;
        t.overruled_blocks = sc.overruled_blocks;
    } else {
        t.logical = bsm_level2(t.announced);
    }

    bool any_block_failure = false;
    for (const auto& r : t.announced)
        if (r.kind == Level1Result::Kind::Failure) any_block_failure = true;
    switch (t.logical.kind) {
        case LogicalBellOutcome::Kind::Identified: t.run_class = RunClass::Success; break;
        case LogicalBellOutcome::Kind::Inconsistent: t.run_class = RunClass::Inconsistent; break;
        case LogicalBellOutcome::Kind::ProtocolFailure:
            t.run_class = any_block_failure ? RunClass::Failure : RunClass::SignOnly;
            break;
    }

    if (receivers != nullptr) {
        PureState final_state = *receivers;
        if (t.logical.identified()) {
            t.correction = ft_correction_for(t.logical, cfg.enc);
            for (const auto& op : t.correction.ops) final_state = apply_pauli(final_state, op);
        }
        t.fidelity = fidelity(final_state, shared_secret_state(cfg.secret, cfg.enc));
    }
    return t;
}

}  // namespace

Level1Result bsm_level1(const PureState& block_pair, int p, int q, const BsmNoise& noise, Rng& rng,
                        BsmKind arbitrary) {
    if (block_pair.num_photons() != 2 * p) throw std::invalid_argument("bsm_level1: expected a 2p-photon block pair");
    if (q < 0 || q > p - 1) throw std::invalid_argument("bsm_level1: q must satisfy 0 <= q <= p-1");
    PureState state = block_pair;
    std::vector<int> cur(static_cast<std::size_t>(2 * p));
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = static_cast<int>(i);
    std::vector<Level0Record> records;
    for (int k = 0; k < p; ++k) {
        const BsmKind variant = level1_next_variant(records, q, arbitrary);
        auto [outcome, post] = measure_bell(state, live_index(cur, k), live_index(cur, p + k),
                                            BsmVariant{variant}, noise, rng);
        state = std::move(post);
        note_removed(cur, k, p + k);
        records.push_back(Level0Record{variant, outcome});
    }
    return classify_level1(std::move(records), p);
}

std::vector<std::pair<Level1Result, double>> enumerate_level1(const PureState& block_pair, int p, int q,
                                                              const BsmNoise& noise, BsmKind arbitrary) {
    if (block_pair.num_photons() != 2 * p) throw std::invalid_argument("enumerate_level1: expected 2p photons");
    struct Node {
        PureState state;
        std::vector<int> cur;
        std::vector<Level0Record> records;
        double probability;
    };
    std::vector<int> cur0(static_cast<std::size_t>(2 * p));
    for (std::size_t i = 0; i < cur0.size(); ++i) cur0[i] = static_cast<int>(i);
    std::vector<std::pair<Level1Result, double>> out;
    std::vector<Node> stack{Node{block_pair, cur0, {}, 1.0}};
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        const int k = static_cast<int>(node.records.size());
        if (k == p) {
            out.emplace_back(classify_level1(node.records, p), node.probability);
            continue;
        }
        const BsmKind variant = level1_next_variant(node.records, q, arbitrary);
        for (auto& br : enumerate_bell(node.state, live_index(node.cur, k), live_index(node.cur, p + k),
                                       BsmVariant{variant}, noise)) {
            Node child{br.post, node.cur, node.records, node.probability * br.probability};
            note_removed(child.cur, k, p + k);
            child.records.push_back(Level0Record{variant, br.outcome});
            stack.push_back(std::move(child));
        }
    }
    return out;
}

FtTranscript run_ft_teleportation(const CbmConfig& cfg, std::uint64_t seed, SimMode mode) {
    cfg.validate();
    Rng rng(seed);
    const int N = cfg.enc.photons_per_qubit();

    if (mode == SimMode::LabelLevel) {
        // Sample the world at label level: logical outcome, block labels,
        // photon-pair labels, per-photon loss.
        std::uniform_int_distribution<int> pick_logical(0, 3);
        const BellLabel logical = all_bell_labels(BellLevel::Logical)[static_cast<std::size_t>(pick_logical(rng))];
        const auto block_terms = decompose_logical_bell(logical, cfg.enc);
        std::uniform_int_distribution<std::size_t> pick_term(0, block_terms.size() - 1);
        const auto& blocks = block_terms[pick_term(rng)].factors;

        std::bernoulli_distribution lose(cfg.noise.loss_rate);
        std::vector<Level1Result> results;
        for (int b = 0; b < cfg.enc.n; ++b) {
            const auto photon_terms = decompose_block_bell(blocks[static_cast<std::size_t>(b)], cfg.enc.p);
            std::uniform_int_distribution<std::size_t> pick_pt(0, photon_terms.size() - 1);
            const auto& labels = photon_terms[pick_pt(rng)].factors;
            std::vector<Level0Record> records;
            for (int k = 0; k < cfg.enc.p; ++k) {
                const BsmKind variant = level1_next_variant(records, cfg.enc.q, cfg.arbitrary_choice);
                BellOutcome oc;
                const bool lost = lose(rng) || lose(rng);  // secret photon, channel photon
                if (lost) {
                    oc = BellOutcome::loss();
                } else {
                    const BellLabel& l = labels[static_cast<std::size_t>(k)];
                    if (BsmVariant{variant}.detects(l)) {
                        BellLabel reported = l;
                        std::uniform_real_distribution<double> u(0.0, 1.0);
                        const double x = u(rng);
                        if (x < cfg.noise.flip_error_rate / 2.0) reported = l.flipped_sign();
                        else if (x < cfg.noise.flip_error_rate) reported = l.flipped_symbol();
                        oc = BellOutcome::det(reported);
                    } else {
                        std::bernoulli_distribution flag(cfg.noise.failure_detection_efficiency);
                        oc = flag(rng) ? BellOutcome::fail_detected() : BellOutcome::fail_undetected();
                    }
                }
                records.push_back(Level0Record{variant, oc});
            }
            results.push_back(classify_level1(std::move(records), cfg.enc.p));
        }
        FtTranscript t = finalize_ft(cfg, mode, std::move(results), nullptr, &rng);
        t.seed = seed;
        t.sampled = true;
        return t;
    }

    // Exact mode.
    PureState state = ft_initial_state(cfg);
    if (cfg.noise.loss_rate > 0.0) {
        std::bernoulli_distribution lose(cfg.noise.loss_rate);
        std::vector<int> lost;
        for (int k = 0; k < 2 * N; ++k)
            if (lose(rng)) lost.push_back(k);
        if (!lost.empty()) state = state.mark_lost(lost);
    }
    std::vector<int> cur(static_cast<std::size_t>(3 * N));
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = static_cast<int>(i);

    std::vector<Level1Result> results;
    for (int b = 0; b < cfg.enc.n; ++b) {
        std::vector<Level0Record> records;
        for (int k = 0; k < cfg.enc.p; ++k) {
            const BsmKind variant = level1_next_variant(records, cfg.enc.q, cfg.arbitrary_choice);
            const auto addr = pair_address(cfg.enc, b, k);
            auto [outcome, post] = measure_bell(state, live_index(cur, addr.secret_photon),
                                                live_index(cur, addr.channel_photon), BsmVariant{variant},
                                                cfg.noise, rng);
            state = std::move(post);
            note_removed(cur, addr.secret_photon, addr.channel_photon);
            records.push_back(Level0Record{variant, outcome});
        }
        results.push_back(classify_level1(std::move(records), cfg.enc.p));
    }
    FtTranscript t = finalize_ft(cfg, mode, std::move(results), &state, &rng);
    t.seed = seed;
    t.sampled = true;
    return t;
}

std::vector<EnumeratedFtRun> enumerate_ft_teleportation(const CbmConfig& cfg, SimMode mode) {
    cfg.validate();
    if (cfg.adversary.strategy == AdversaryModel::Strategy::Random && !cfg.adversary.dishonest_senders.empty())
        throw std::invalid_argument("enumerate: the random adversary strategy is sampling-only");

    const int N = cfg.enc.photons_per_qubit();
    const double eta = cfg.noise.loss_rate;
    const double f = cfg.noise.failure_detection_efficiency;
    const double eps = cfg.noise.flip_error_rate;
    std::vector<EnumeratedFtRun> out;

    if (mode == SimMode::LabelLevel) {
        std::vector<std::pair<std::vector<std::uint8_t>, double>> loss_masks;
        const int ports = 2 * N;
        if (eta == 0.0) {
            loss_masks.emplace_back(std::vector<std::uint8_t>(static_cast<std::size_t>(ports), 0), 1.0);
        } else {
            for (std::uint32_t mask = 0; mask < (1u << ports); ++mask) {
                std::vector<std::uint8_t> flags(static_cast<std::size_t>(ports), 0);
                double w = 1.0;
                for (int k = 0; k < ports; ++k) {
                    if (mask & (1u << k)) {
                        flags[static_cast<std::size_t>(k)] = 1;
                        w *= eta;
                    } else {
                        w *= 1.0 - eta;
                    }
                }
                if (w > 0.0) loss_masks.emplace_back(std::move(flags), w);
            }
        }

        for (const auto& logical : all_bell_labels(BellLevel::Logical)) {
            for (const auto& term : decompose_logical_bell(logical, cfg.enc)) {
                // Independent photon-term choices per block.
                std::vector<std::vector<BellProductTerm>> photon_choices;
                for (int b = 0; b < cfg.enc.n; ++b)
                    photon_choices.push_back(decompose_block_bell(term.factors[static_cast<std::size_t>(b)], cfg.enc.p));
                std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.enc.n), 0);
                while (true) {
                    double assign_w = 0.25 * term.weight.value();
                    std::vector<std::vector<BellLabel>> labels;
                    for (int b = 0; b < cfg.enc.n; ++b) {
                        const auto& pt = photon_choices[static_cast<std::size_t>(b)][idx[static_cast<std::size_t>(b)]];
                        labels.push_back(pt.factors);
                        assign_w *= pt.weight.value();
                    }
                    for (const auto& [loss, loss_w] : loss_masks) {
                        // Walk every classical branch of the policy.
                        struct LNode {
                            std::vector<Level1Result> blocks;
                            std::vector<Level0Record> current;
                            double prob;
                        };
                        std::vector<LNode> stack{LNode{{}, {}, assign_w * loss_w}};
                        while (!stack.empty()) {
                            LNode node = std::move(stack.back());
                            stack.pop_back();
                            const int b = static_cast<int>(node.blocks.size());
                            if (b == cfg.enc.n) {
                                FtTranscript t = finalize_ft(cfg, mode, node.blocks, nullptr, nullptr);
                                out.push_back(EnumeratedFtRun{std::move(t), node.prob});
                                continue;
                            }
                            const int k = static_cast<int>(node.current.size());
                            if (k == cfg.enc.p) {
                                LNode next{node.blocks, {}, node.prob};
                                next.blocks.push_back(classify_level1(node.current, cfg.enc.p));
                                stack.push_back(std::move(next));
                                continue;
                            }
                            const BsmKind variant = level1_next_variant(node.current, cfg.enc.q, cfg.arbitrary_choice);
                            const auto addr = pair_address(cfg.enc, b, k);
                            const bool lost = loss[static_cast<std::size_t>(addr.secret_photon)] ||
                                              loss[static_cast<std::size_t>(addr.channel_photon)];
                            auto push = [&](const BellOutcome& oc, double w) {
                                if (w <= 0.0) return;
                                LNode child{node.blocks, node.current, node.prob * w};
                                child.current.push_back(Level0Record{variant, oc});
                                stack.push_back(std::move(child));
                            };
                            if (lost) {
                                push(BellOutcome::loss(), 1.0);
                            } else {
                                const BellLabel& l = labels[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
                                if (BsmVariant{variant}.detects(l)) {
                                    push(BellOutcome::det(l), 1.0 - eps);
                                    push(BellOutcome::det(l.flipped_sign()), eps / 2.0);
                                    push(BellOutcome::det(l.flipped_symbol()), eps / 2.0);
                                } else {
                                    push(BellOutcome::fail_detected(), f);
                                    push(BellOutcome::fail_undetected(), 1.0 - f);
                                }
                            }
                        }
                    }
                    // Advance the per-block mixed-radix index.
                    int b = 0;
                    for (; b < cfg.enc.n; ++b) {
                        if (++idx[static_cast<std::size_t>(b)] < photon_choices[static_cast<std::size_t>(b)].size()) break;
                        idx[static_cast<std::size_t>(b)] = 0;
                    }
                    if (b == cfg.enc.n) break;
                }
            }
        }
        return out;
    }

    // Exact mode enumeration.
    std::vector<std::pair<PureState, double>> starts;
    const PureState initial = ft_initial_state(cfg);
    if (eta == 0.0) {
        starts.emplace_back(initial, 1.0);
    } else {
        const int ports = 2 * N;
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
            if (w > 0.0) starts.emplace_back(lost.empty() ? initial : initial.mark_lost(lost), w);
        }
    }

    std::vector<int> cur0(static_cast<std::size_t>(3 * N));
    for (std::size_t i = 0; i < cur0.size(); ++i) cur0[i] = static_cast<int>(i);

    std::vector<ExactNode> stack;
    for (auto& [st, w] : starts) stack.push_back(ExactNode{st, cur0, w, {}, {}});
    while (!stack.empty()) {
        ExactNode node = std::move(stack.back());
        stack.pop_back();
        const int b = static_cast<int>(node.blocks.size());
        if (b == cfg.enc.n) {
            FtTranscript t = finalize_ft(cfg, mode, node.blocks, &node.state, nullptr);
            out.push_back(EnumeratedFtRun{std::move(t), node.probability});
            continue;
        }
        const int k = static_cast<int>(node.current.size());
        if (k == cfg.enc.p) {
            ExactNode next{node.state, node.cur, node.probability, node.blocks, {}};
            next.blocks.push_back(classify_level1(node.current, cfg.enc.p));
            stack.push_back(std::move(next));
            continue;
        }
        const BsmKind variant = level1_next_variant(node.current, cfg.enc.q, cfg.arbitrary_choice);
        const auto addr = pair_address(cfg.enc, b, k);
        for (auto& br : enumerate_bell(node.state, live_index(node.cur, addr.secret_photon),
                                       live_index(node.cur, addr.channel_photon), BsmVariant{variant}, cfg.noise)) {
            ExactNode child{br.post, node.cur, node.probability * br.probability, node.blocks, node.current};
            note_removed(child.cur, addr.secret_photon, addr.channel_photon);
            child.current.push_back(Level0Record{variant, br.outcome});
            stack.push_back(std::move(child));
        }
    }
    return out;
}

double ClassRates::rate(RunClass c) const {
    switch (c) {
        case RunClass::Success: return success;
        case RunClass::SignOnly: return signonly;
        case RunClass::Failure: return failure;
        case RunClass::Inconsistent: return inconsistent;
    }
    return 0.0;
}

double ClassRates::stderr_of(RunClass c) const {
    switch (c) {
        case RunClass::Success: return success_se;
        case RunClass::SignOnly: return signonly_se;
        case RunClass::Failure: return failure_se;
        case RunClass::Inconsistent: return inconsistent_se;
    }
    return 0.0;
}

namespace {

RunClass ghz_run_class(const Transcript& t) {
    if (!t.recorded) return RunClass::Failure;  // never part of the usable record
    switch (t.logical.kind) {
        case LogicalBellOutcome::Kind::Identified: return RunClass::Success;
        case LogicalBellOutcome::Kind::Inconsistent: return RunClass::Inconsistent;
        case LogicalBellOutcome::Kind::ProtocolFailure: return RunClass::Failure;
    }
    return RunClass::Failure;
}

ClassRates tally_to_rates(const std::array<double, 4>& weight, double total, std::int64_t trials) {
    ClassRates r;
    r.trials = trials;
    const double t = total > 0.0 ? total : 1.0;
    r.success = weight[0] / t;
    r.signonly = weight[1] / t;
    r.failure = weight[2] / t;
    r.inconsistent = weight[3] / t;
    if (trials > 0) {
        auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); };
        r.success_se = se(r.success);
        r.signonly_se = se(r.signonly);
        r.failure_se = se(r.failure);
        r.inconsistent_se = se(r.inconsistent);
    }
    return r;
}

}  // namespace

ClassRates estimate_success(const CbmConfig& cfg, std::int64_t trials, std::uint64_t seed, SimMode mode) {
    if (trials < 1) throw std::invalid_argument("estimate_success: trials must be >= 1");
    std::array<double, 4> tally{0, 0, 0, 0};
    if (cfg.enc.scheme == Scheme::GHZ) {
        GhzConfig g{cfg.secret, cfg.enc.n, cfg.m, cfg.noise};
        for (std::int64_t i = 0; i < trials; ++i) {
            const Transcript t = run_teleportation(g, split_seed(seed, static_cast<std::uint64_t>(i)));
            tally[static_cast<std::size_t>(ghz_run_class(t))] += 1.0;
        }
    } else {
        for (std::int64_t i = 0; i < trials; ++i) {
            const FtTranscript t =
                run_ft_teleportation(cfg, split_seed(seed, static_cast<std::uint64_t>(i)), mode);
            tally[static_cast<std::size_t>(t.run_class)] += 1.0;
        }
    }
    return tally_to_rates(tally, static_cast<double>(trials), trials);
}

ClassRates enumerate_class_probabilities(const CbmConfig& cfg, SimMode mode) {
    std::array<double, 4> tally{0, 0, 0, 0};
    double total = 0.0;
    if (cfg.enc.scheme == Scheme::GHZ) {
        GhzConfig g{cfg.secret, cfg.enc.n, cfg.m, cfg.noise};
        for (const auto& run : enumerate_teleportation(g)) {
            RunClass c = ghz_run_class(run.transcript);
            tally[static_cast<std::size_t>(c)] += run.probability;
            total += run.probability;
        }
    } else {
        for (const auto& run : enumerate_ft_teleportation(cfg, mode)) {
            tally[static_cast<std::size_t>(run.transcript.run_class)] += run.probability;
            total += run.probability;
        }
    }
    return tally_to_rates(tally, total, 0);
}

}  // namespace qsst
