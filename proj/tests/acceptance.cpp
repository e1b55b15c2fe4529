// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pipeline_oracle.hpp"
#include "qsst/cbm.hpp"
#include "qsst/harness.hpp"
#include "qsst/protocol.hpp"

using namespace qsst;

namespace {

int g_failures = 0;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int num, bool pass, const std::string& what, double seconds, double budget) {
    const bool in_budget = seconds < budget;
    if (!pass || !in_budget) ++g_failures;
    std::printf("criterion %2d: %s  %s  (%.2fs / %.0fs)\n", num, (pass && in_budget) ? "PASS" : "FAIL",
                what.c_str(), seconds, budget);
}

SecretSpec random_secret(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return SecretSpec::normalized(cx(g(rng), g(rng)), cx(g(rng), g(rng)));
}

bool approx(double a, double b, double tol) { return std::abs(a - b) < tol; }

// --------------------------------------------------------------------------

void criterion_1_success_law() {
    Stopwatch sw;
    bool ok = true;
    for (int n = 1; n <= 6; ++n) {
        const Rational want = Rational(1) - Rational(1, std::int64_t{1} << n);
        ok = ok && exact::success_probability(n, Rational(1)) == want;
        std::ostringstream out, err;
        ok = ok && run_cli({"enumerate", "--n", std::to_string(n), "--m", "1"}, out, err) == 0;
        ok = ok && out.str().find("success_probability = " + want.str() + " ") != std::string::npos;
    }
    report(1, ok, "enumerate reports 1-2^-n exactly for n=1..6 (m=1)", sw.seconds(), 10);
}

void criterion_2_headline_probabilities() {
    Stopwatch sw;
    const bool ok = exact::success_probability(2, Rational(1)) == Rational(3, 4) &&
                    exact::success_probability(2, Rational(1, 2)) == Rational(1, 2);
    report(2, ok, "n=2 ideal success 3/4; f=1/2 overall success 1/2 (exact)", sw.seconds(), 10);
}

void criterion_3_event_taxonomy() {
    Stopwatch sw;
    const auto tally = exact::enumerate_events(2, Rational(1, 2));
    bool ok = tally.cond_ss == Rational(4, 9) && tally.cond_sf == Rational(2, 9) &&
              tally.cond_fs == Rational(2, 9) && tally.cond_ff == Rational(1, 9) &&
              tally.cond_e == Rational(0);

    GhzConfig cfg{SecretSpec::normalized(1.0, 1.0), 2, 2, BsmNoise{0.5, 0.0, 0.0}};
    std::map<std::string, std::int64_t> counts;
    std::int64_t recorded = 0;
    const std::int64_t trials = 100000;
    for (std::int64_t i = 0; i < trials; ++i) {
        const Transcript t = run_teleportation(cfg, split_seed(2026, static_cast<std::uint64_t>(i)));
        if (!t.recorded) continue;
        ++recorded;
        counts[t.event_class]++;
    }
    const std::map<std::string, double> want{{"SS", 4.0 / 9}, {"SF", 2.0 / 9}, {"FS", 2.0 / 9}, {"FF", 1.0 / 9}};
    for (const auto& [cls, p] : want) {
        const double hat = counts[cls] / static_cast<double>(recorded);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(recorded));
        ok = ok && std::abs(hat - p) < 3.0 * se;
    }
    report(3, ok, "(SS,SF,FS,FF,E) = (4,2,2,1,0)/9 exactly; Monte Carlo within 3 sigma", sw.seconds(), 30);
}

void criterion_4_teleportation_correctness() {
    Stopwatch sw;
    bool ok = true;
    Rng rng(404);
    for (int n = 1; n <= 4 && ok; ++n)
        for (int m = 1; m <= 3 && ok; ++m) {
            const int secrets = 20;
            for (int s = 0; s < secrets && ok; ++s) {
                GhzConfig cfg{random_secret(rng), n, m, BsmNoise{}};
                for (const auto& run : enumerate_teleportation(cfg)) {
                    if (!run.transcript.logical.identified()) continue;
                    if (std::abs(run.transcript.fidelity - 1.0) > 1e-10) ok = false;
                }
            }
        }
    report(4, ok, "all non-failure branches teleport with fidelity 1 (n<=4, m<=3, 20 secrets)", sw.seconds(), 120);
}

void criterion_5_no_leakage() {
    Stopwatch sw;
    bool ok = true;
    const cx alpha(0.48, 0.36), beta(0.0, 0.8);
    const double na = std::norm(alpha), nb = std::norm(beta);

    const std::vector<PartyId> parties{{PartyId::Role::Sender, 1},
                                       {PartyId::Role::Sender, 2},
                                       {PartyId::Role::Receiver, 1},
                                       {PartyId::Role::Receiver, 2}};
    auto run_audit = [&](const SecretSpec& s, const std::vector<PartyId>& subset) {
        GhzConfig cfg{s, 2, 2, BsmNoise{}};
        return sub_party_reduced_states(cfg, subset);
    };
    auto key_of = [](const ConditionedReducedState& c) {
        std::string k;
        for (const auto& o : c.announced) k += o.str() + "|";
        return k;
    };

    for (std::uint32_t mask = 1; mask < 16 && ok; ++mask) {
        // A complete sender or receiver group is not a sub-party: the full
        // sender group shares the secret by construction and the full
        // receiver group receives it. Bits 0,1 = senders; 2,3 = receivers.
        if ((mask & 0b0011u) == 0b0011u || (mask & 0b1100u) == 0b1100u) continue;
        std::vector<PartyId> subset;
        for (int b = 0; b < 4; ++b)
            if (mask & (1u << b)) subset.push_back(parties[static_cast<std::size_t>(b)]);

        const auto generic = run_audit(SecretSpec::normalized(alpha, beta), subset);
        const auto alpha_only = run_audit(SecretSpec{1.0, 0.0}, subset);
        const auto beta_only = run_audit(SecretSpec{0.0, 1.0}, subset);
        std::map<std::string, const ConditionedReducedState*> a_by, b_by;
        for (const auto& c : alpha_only) a_by[key_of(c)] = &c;
        for (const auto& c : beta_only) b_by[key_of(c)] = &c;

        for (const auto& c : generic) {
            const auto& m = c.rho.matrix();
            for (int r = 0; r < m.rows() && ok; ++r)
                for (int col = 0; col < m.cols(); ++col)
                    if (r != col && std::abs(m(r, col)) >= 1e-12) ok = false;

            const auto *pa = a_by.count(key_of(c)) ? a_by[key_of(c)] : nullptr;
            const auto *pb = b_by.count(key_of(c)) ? b_by[key_of(c)] : nullptr;
            if (pa == nullptr || pb == nullptr) {
                ok = false;
                continue;
            }
            // The record's probability must not depend on the secret.
            ok = ok && approx(c.probability, pa->probability, 1e-12) &&
                 approx(c.probability, pb->probability, 1e-12);

            // Accessible information is the amplitudes and nothing else: the
            // conditioned state is the |alpha|^2 : |beta|^2 mixture of two
            // secret-independent states.
            const Eigen::MatrixXcd mix = na * pa->rho.matrix() + nb * pb->rho.matrix();
            ok = ok && (m - mix).cwiseAbs().maxCoeff() < 1e-10;

            // Where the alpha/beta supports are disjoint the diagonals read
            // {|alpha|^2, |beta|^2} directly.
            double mass_a = 0.0, mass_b = 0.0;
            std::set<int> support_a, support_b;
            for (int r = 0; r < m.rows(); ++r) {
                if (pa->rho.matrix()(r, r).real() > 1e-9) support_a.insert(r);
                if (pb->rho.matrix()(r, r).real() > 1e-9) support_b.insert(r);
            }
            std::vector<int> overlap;
            std::set_intersection(support_a.begin(), support_a.end(), support_b.begin(), support_b.end(),
                                  std::back_inserter(overlap));
            if (overlap.empty()) {
                for (int r : support_a) mass_a += m(r, r).real();
                for (int r : support_b) mass_b += m(r, r).real();
                ok = ok && approx(mass_a, na, 1e-10) && approx(mass_b, nb, 1e-10);
                if (support_a.size() == 1 && support_b.size() == 1) {
                    ok = ok && approx(m(*support_a.begin(), *support_a.begin()).real(), na, 1e-10);
                    ok = ok && approx(m(*support_b.begin(), *support_b.begin()).real(), nb, 1e-10);
                }
            }
        }
    }

    // The audit must reject a subset holding every photon.
    bool rejected = false;
    try {
        run_audit(SecretSpec::normalized(alpha, beta), parties);
    } catch (const std::exception&) {
        rejected = true;
    }
    ok = ok && rejected;
    report(5, ok, "every proper sub-party sees only {|alpha|^2, |beta|^2} diagonals", sw.seconds(), 60);
}

void criterion_6_decomposition_identities() {
    Stopwatch sw;
    bool ok = true;
    for (int n = 1; n <= 4; ++n) {
        const auto enc = EncodingParams::ghz(n);
        for (const auto& l : all_bell_labels(BellLevel::Logical))
            ok = ok && fidelity(reassemble_decomposition(l, enc), logical_bell_state(l, enc)) >= 1.0 - 1e-10;
    }
    for (int n = 1; n <= 2; ++n)
        for (int p = 1; p <= 3; ++p) {
            const auto enc = EncodingParams::parity(n, p);
            for (const auto& l : all_bell_labels(BellLevel::Logical)) {
                ok = ok && fidelity(reassemble_decomposition(l, enc, false), logical_bell_state(l, enc)) >= 1.0 - 1e-10;
                ok = ok && fidelity(reassemble_decomposition(l, enc, true), logical_bell_state(l, enc)) >= 1.0 - 1e-10;
            }
        }
    report(6, ok, "Bell decompositions reassemble to the logical states (GHZ n<=4; parity n<=2, p<=3)",
           sw.seconds(), 60);
}

void criterion_7_cbm_cross_validation() {
    Stopwatch sw;
    bool ok = true;
    const std::vector<std::pair<int, int>> sizes{{1, 2}, {2, 1}, {2, 2}};
    const std::vector<double> etas{0.0, 0.1, 0.3};
    for (const auto& [n, p] : sizes) {
        for (double eta : etas) {
            CbmConfig cfg;
            cfg.secret = SecretSpec::normalized(cx(0.8, 0.0), cx(0.0, 0.6));
            cfg.enc = EncodingParams::parity(n, p);
            cfg.noise.loss_rate = eta;
            const ClassRates exact_rates = enumerate_class_probabilities(cfg, SimMode::Exact);
            const ClassRates label_rates = enumerate_class_probabilities(cfg, SimMode::LabelLevel);
            for (const auto c :
                 {RunClass::Success, RunClass::SignOnly, RunClass::Failure, RunClass::Inconsistent})
                ok = ok && std::abs(exact_rates.rate(c) - label_rates.rate(c)) < 1e-10;

            const ClassRates mc = estimate_success(cfg, 100000, 777, SimMode::LabelLevel);
            for (const auto c :
                 {RunClass::Success, RunClass::SignOnly, RunClass::Failure, RunClass::Inconsistent}) {
                const double se = std::sqrt(std::max(exact_rates.rate(c) * (1.0 - exact_rates.rate(c)), 1e-12) /
                                            100000.0);
                ok = ok && std::abs(mc.rate(c) - exact_rates.rate(c)) < 3.0 * se + 1e-9;
            }
        }
    }
    report(7, ok, "label-level == exact within 1e-10; Monte Carlo within 3 sigma (eta in {0,.1,.3})",
           sw.seconds(), 300);
}

void criterion_8_fault_tolerance() {
    Stopwatch sw;
    bool ok = true;

    // (i) Any single level-0 sign flip in a fully detected p=3 record is
    // repaired by the majority vote, for every block label and position.
    int checked_flips = 0;
    for (const auto& label : all_bell_labels(BellLevel::Block)) {
        const PureState block = block_bell_ket(label, 3);
        for (const auto& [result, prob] : enumerate_level1(block, 3, 2, BsmNoise{})) {
            const bool all_detected = std::all_of(result.raw.begin(), result.raw.end(),
                                                  [](const Level0Record& r) { return r.outcome.detected(); });
            if (!all_detected) continue;
            for (std::size_t flip = 0; flip < result.raw.size(); ++flip) {
                auto tampered = result.raw;
                tampered[flip].outcome = BellOutcome::det(tampered[flip].outcome.label->flipped_sign());
                ok = ok && majority_vote_sign(tampered).sign == label.sign;
                ++checked_flips;
            }
        }
    }
    ok = ok && checked_flips > 0;

    // (ii) A single dishonest FlipSymbol sender among n=3 is overruled on
    // every branch where all three blocks report Success, for every
    // placement of the dishonest party.
    for (int dishonest = 1; dishonest <= 3; ++dishonest) {
        CbmConfig cfg;
        cfg.secret = SecretSpec::normalized(cx(0.6, 0.0), cx(0.0, 0.8));
        cfg.enc = EncodingParams::parity(3, 2);
        cfg.adversary = AdversaryModel{{dishonest}, AdversaryModel::Strategy::FlipSymbol};
        int covered = 0;
        for (const auto& run : enumerate_ft_teleportation(cfg, SimMode::LabelLevel)) {
            const bool all_success = std::all_of(run.transcript.true_results.begin(),
                                                 run.transcript.true_results.end(),
                                                 [](const Level1Result& r) { return r.success(); });
            if (!all_success) continue;
            ++covered;
            std::vector<Level1Result> honest;
            for (const auto& r : run.transcript.true_results)
                honest.push_back(Level1Result::make_success(*r.symbol, *r.sign));
            const auto want = bsm_level2(honest);
            ok = ok && run.transcript.logical.identified() && run.transcript.logical.str() == want.str() &&
                 run.transcript.overruled_blocks == 1;
        }
        ok = ok && covered > 0;
    }
    report(8, ok, "single sign flip (p=3) and single FlipSymbol sender (n=3) corrected in 100% of cases",
           sw.seconds(), 60);
}

void criterion_9_non_reproducible_disclosure() {
    Stopwatch sw;
    std::printf("    note: lab-data figures are NOT reproduced here: the measured teleportation\n"
                "    fidelities 0.84(4)/0.78(6)/0.75(5), the measured GHZ fidelity 0.73(1), and the\n"
                "    channel-dependent expected-output rows based on reconstructed density matrices\n"
                "    depend on experimental state tomography that this simulator does not ingest.\n"
                "    Substituted checks: the synthetic pipeline below plus criterion 4's exact bound.\n");
    bool ok = true;

    // Synthetic 0.73-fidelity channel still beats the classical bound 2/3
    // for all three reference inputs.
    const double wch = SyntheticNoisyState::weight_for_fidelity(0.73, 16);
    ok = ok && approx(fidelity(SyntheticNoisyState{ghz_state(4), wch}.rho(), ghz_state(4)), 0.73, 1e-12);
    for (char which : {'a', 'b', 'c'}) {
        const auto rep = run_fidelity_pipeline(which, 0.0, wch, 2, 2);
        ok = ok && rep.output_fidelity > kClassicalFidelityBound;
    }

    // Harness invariants stand in for the lab rows: affinity and the
    // independent pure-state oracle.
    Rng rng(909);
    const DensityMatrix in1 = testing::random_mixture(2, rng);
    const DensityMatrix in2 = testing::random_mixture(2, rng);
    const DensityMatrix ch = SyntheticNoisyState{ghz_state(4), wch}.rho();
    const double t = 0.25;
    const Eigen::MatrixXcd mix = t * in1.matrix() + (1 - t) * in2.matrix();
    const Eigen::MatrixXcd lhs = expected_output_under_ideal_bsm(DensityMatrix(2, mix), ch, 2, 2).matrix();
    const Eigen::MatrixXcd rhs = t * expected_output_under_ideal_bsm(in1, ch, 2, 2).matrix() +
                                 (1 - t) * expected_output_under_ideal_bsm(in2, ch, 2, 2).matrix();
    ok = ok && (lhs - rhs).cwiseAbs().maxCoeff() < 1e-12;
    ok = ok && (expected_output_under_ideal_bsm(in1, ch, 2, 2).matrix() -
                testing::oracle_expected_output(in1, ch, 2, 2))
                       .cwiseAbs()
                       .maxCoeff() < 1e-10;
    report(9, ok, "synthetic 0.73 channel beats 2/3 on inputs a,b,c; pipeline affine and oracle-matched",
           sw.seconds(), 60);
}

void criterion_10_determinism() {
    Stopwatch sw;
    bool ok = true;
    auto run_once = [&](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        if (run_cli(args, out, err) != 0) ok = false;
        return out.str();
    };
    const std::vector<std::vector<std::string>> configs{
        {"teleport", "--n", "2", "--m", "2", "--trials", "200", "--seed", "42", "--f", "0.5"},
        {"cbm", "--n", "2", "--p", "2", "--eta", "0.1", "--trials", "300", "--seed", "9"},
        {"cbm", "--n", "2", "--p", "2", "--eta", "0.1", "--trials", "50", "--seed", "9", "--mode", "exact"},
        {"sweep", "--n", "1,2", "--p", "2", "--eta", "0,0.1", "--trials", "100", "--seed", "3", "--csv"},
        {"fidelity-pipeline", "--input", "all"},
    };
    for (const auto& args : configs) {
        const std::string first = run_once(args);
        ok = ok && !first.empty();
        for (int rep = 1; rep < 5; ++rep) ok = ok && run_once(args) == first;
    }
    report(10, ok, "five repetitions of each sampling run are byte-identical", sw.seconds(), 120);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_success_law();
    criterion_2_headline_probabilities();
    criterion_3_event_taxonomy();
    criterion_4_teleportation_correctness();
    criterion_5_no_leakage();
    criterion_6_decomposition_identities();
    criterion_7_cbm_cross_validation();
    criterion_8_fault_tolerance();
    criterion_9_non_reproducible_disclosure();
    criterion_10_determinism();
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
