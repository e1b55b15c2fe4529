#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsst/bsm.hpp"
#include "qsst/encoding.hpp"
#include "qsst/protocol.hpp"

namespace qsst {

struct Level0Record {
    BsmKind variant = BsmKind::Bpsi;
    BellOutcome outcome;
};

// Result of one block-pair measurement B(1).
struct Level1Result {
    enum class Kind { Success, SignOnly, Failure };
    Kind kind = Kind::Failure;
    std::optional<BellSymbol> symbol;
    std::optional<BellSign> sign;
    std::vector<Level0Record> raw;  // audit trail, one record per photon pair
    bool sign_tie = false;
    // Sign known only through a B_psi detection while every B_+/- saw loss;
    // flagged for audit (the classification stays SignOnly).
    bool sign_from_psi_only = false;

    bool success() const { return kind == Kind::Success; }
    std::string str() const;

    static Level1Result make_success(BellSymbol s, BellSign g) { return {Kind::Success, s, g, {}, false, false}; }
    static Level1Result make_signonly(BellSign g) { return {Kind::SignOnly, std::nullopt, g, {}, false, false}; }
    static Level1Result make_failure() { return {}; }
};

// Which analyzer the level-1 policy runs next, given the block's history.
// q consecutive clean B_psi failures (or a loss, or an undetected failure,
// which looks like one) commit the rest of the block to `arbitrary`; a
// B_psi detection commits to the analyzer matching the reported sign.
BsmKind level1_next_variant(const std::vector<Level0Record>& history, int q, BsmKind arbitrary);

// Majority vote over the sign evidence in one block's raw records: reported
// signs of detections plus the signs implied by clean B_+/- failures (a
// clean B+ failure collapses onto {phi-,psi-}, so it testifies minus, and
// vice versa). Requires at least one detected outcome; ties break toward
// plus and are flagged.
struct SignVote {
    BellSign sign = BellSign::Plus;
    bool tie = false;
    int evidence = 0;
};
SignVote majority_vote_sign(const std::vector<Level0Record>& raw);

// Classification of a finished block record per the success / sign-only /
// failure rules; p is the block size.
Level1Result classify_level1(std::vector<Level0Record> raw, int p);

// Strict logical combination: identified iff some block succeeded and none
// failed; mixed Success symbols are Inconsistent; sign = parity of minus
// signs over all block results.
LogicalBellOutcome bsm_level2(const std::vector<Level1Result>& results);

// Same, but the symbol is taken by majority over Success symbols (ties are
// Inconsistent); the number of overruled blocks is reported.
struct SymbolCorrection {
    LogicalBellOutcome outcome;
    int overruled_blocks = 0;
};
SymbolCorrection logical_symbol_correct(const std::vector<Level1Result>& results);

struct AdversaryModel {
    enum class Strategy { Honest, FlipSign, FlipSymbol, ReportFailure, Random };
    std::vector<int> dishonest_senders;  // 1-based sender indices
    Strategy strategy = Strategy::Honest;

    std::string str() const;
};

Level1Result apply_adversary(const Level1Result& honest, const AdversaryModel::Strategy& strategy, Rng* rng);

enum class SimMode { Exact, LabelLevel };

struct CbmConfig {
    SecretSpec secret;
    EncodingParams enc;       // Parity for the fault-tolerant path
    int m = 1;                // receivers sharing the N channel photons
    BsmNoise noise;
    AdversaryModel adversary;
    bool symbol_correction = true;
    BsmKind arbitrary_choice = BsmKind::Bplus;

    void validate() const;
};

// Parity-code logical Paulis on the N = n*p receiver photons: logical Z is
// Z on every photon of block 1; logical X is X on one photon of each block.
PauliCorrection ft_correction_for(const LogicalBellOutcome& outcome, const EncodingParams& enc);

enum class RunClass { Success, SignOnly, Failure, Inconsistent };
std::string run_class_str(RunClass c);

struct FtTranscript {
    std::uint64_t seed = 0;
    bool sampled = false;
    SimMode mode = SimMode::Exact;
    int n = 0, p = 0, q = 0, m = 0;
    cx alpha, beta;
    double f = 1.0, eta = 0.0, epsilon = 0.0;
    std::string adversary;
    std::vector<Level1Result> true_results;
    std::vector<Level1Result> announced;
    LogicalBellOutcome logical;
    int overruled_blocks = 0;
    PauliCorrection correction;
    RunClass run_class = RunClass::Failure;
    std::optional<double> fidelity;  // Exact mode only
};

std::string ft_transcript_to_jsonl(const FtTranscript& t);

// Single block-pair measurement on a prepared 2p-photon state ordered
// (block, block'), pairs (k, p+k).
Level1Result bsm_level1(const PureState& block_pair, int p, int q, const BsmNoise& noise, Rng& rng,
                        BsmKind arbitrary = BsmKind::Bplus);
std::vector<std::pair<Level1Result, double>> enumerate_level1(const PureState& block_pair, int p, int q,
                                                              const BsmNoise& noise,
                                                              BsmKind arbitrary = BsmKind::Bplus);

FtTranscript run_ft_teleportation(const CbmConfig& cfg, std::uint64_t seed, SimMode mode);

struct EnumeratedFtRun {
    FtTranscript transcript;
    double probability;
};
// Exhaustive branch enumeration (loss patterns included). Random adversary
// strategies are sampling-only.
std::vector<EnumeratedFtRun> enumerate_ft_teleportation(const CbmConfig& cfg, SimMode mode);

struct ClassRates {
    std::int64_t trials = 0;
    double success = 0, signonly = 0, failure = 0, inconsistent = 0;
    double success_se = 0, signonly_se = 0, failure_se = 0, inconsistent_se = 0;

    double rate(RunClass c) const;
    double stderr_of(RunClass c) const;
};

// Monte Carlo outcome-class frequencies with binomial standard errors.
// GHZ configs run the plain protocol (success = identified and recorded);
// parity configs run the fault-tolerant pipeline in the given mode.
ClassRates estimate_success(const CbmConfig& cfg, std::int64_t trials, std::uint64_t seed,
                            SimMode mode = SimMode::LabelLevel);

// Outcome-class probabilities from exhaustive enumeration.
ClassRates enumerate_class_probabilities(const CbmConfig& cfg, SimMode mode);

}  // namespace qsst
