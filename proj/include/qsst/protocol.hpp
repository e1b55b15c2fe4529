#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsst/bsm.hpp"
#include "qsst/encoding.hpp"
#include "qsst/rational.hpp"
#include "qsst/state.hpp"

namespace qsst {

struct PartyId {
    enum class Role { Sender, Receiver };
    Role role = Role::Sender;
    int index = 1;  // 1-based

    bool operator==(const PartyId& o) const { return role == o.role && index == o.index; }
    std::string str() const;
};

struct Announcement {
    PartyId party;
    BellOutcome outcome;
    int sequence_number = 0;
};

struct LogicalBellOutcome {
    enum class Kind { Identified, ProtocolFailure, Inconsistent };
    Kind kind = Kind::ProtocolFailure;
    std::optional<BellSymbol> symbol;
    std::optional<BellSign> sign;

    bool identified() const { return kind == Kind::Identified; }
    std::string str() const;

    static LogicalBellOutcome identified(BellSymbol s, BellSign g) { return {Kind::Identified, s, g}; }
    static LogicalBellOutcome failure() { return {Kind::ProtocolFailure, std::nullopt, std::nullopt}; }
    static LogicalBellOutcome inconsistent() { return {Kind::Inconsistent, std::nullopt, std::nullopt}; }
};

struct PauliCorrection {
    std::vector<PauliOp> ops;  // receiver-photon indices, 0-based within the receiver register
    std::string str() const;
};

// Per-run event bookkeeping. An undetected failure (or a loss) removes a
// detector click, so the run never forms the full coincidence: recorded()
// is false and, following the five-way taxonomy, the class reads E.
struct EventClass {
    int detections = 0;
    int detected_failures = 0;
    int undetected_failures = 0;
    int losses = 0;

    bool recorded() const { return undetected_failures == 0 && losses == 0; }
    // n = 2 yields SS/SF/FS/FF/E; larger runs generalize to S<k>F<j> with E
    // for any undetected failure and L for any loss.
    std::string str(const std::vector<BellOutcome>& outcomes) const;
};

EventClass classify_event(const std::vector<BellOutcome>& outcomes);

// Parity rules of the distributed measurement: symbol from any detection
// (mixed symbols are Inconsistent), sign = (-1)^(number of minus-labeled
// detections); all-failure runs are ProtocolFailure, as is any run with a
// lost pair (a lost pair's Bell label may carry either sign, so the parity
// is genuinely unknown at the GHZ level).
LogicalBellOutcome infer_logical_outcome(const std::vector<BellOutcome>& outcomes, const BsmVariant& variant);

// GHZ-code logical Paulis: logical Z is Z on one receiver photon (receiver 1
// by convention), logical X is X on every receiver photon.
PauliCorrection correction_for(const LogicalBellOutcome& outcome, int m);

struct GhzConfig {
    SecretSpec secret;
    int n = 2;
    int m = 2;
    BsmNoise noise;

    void validate() const;
};

struct Transcript {
    std::uint64_t seed = 0;
    bool sampled = false;
    int n = 0, m = 0;
    cx alpha, beta;
    double f = 1.0, eta = 0.0, epsilon = 0.0;
    std::vector<Announcement> announcements;
    LogicalBellOutcome logical;
    PauliCorrection correction;
    std::string event_class;
    bool recorded = false;
    double fidelity = 0.0;                  // post-correction, against the secret pattern
    std::optional<PureState> final_state;   // corrected receiver register
};

// One JSON record per line; fields follow the transcript schema.
std::string transcript_to_jsonl(const Transcript& t);

Transcript run_teleportation(const GhzConfig& cfg, std::uint64_t seed);
Transcript run_teleportation(const GhzConfig& cfg, Rng& rng, std::uint64_t seed_for_record = 0);

struct EnumeratedRun {
    Transcript transcript;
    double probability;
};

// Every outcome branch with its exact Born weight (doubles; the rational
// aggregates live in protocol_exact).
std::vector<EnumeratedRun> enumerate_teleportation(const GhzConfig& cfg);

// Photons a party holds under the run layout: sender i holds photons
// {i-1, n+i-1}; receiver j holds photon {2n+j-1}.
std::vector<int> party_photons(const PartyId& party, int n, int m);

struct ConditionedReducedState {
    std::vector<BellOutcome> announced;  // one per announcing sender, in sender order
    double probability;
    DensityMatrix rho;
};

// Reduced states of the photons held by `subset`, conditioned on the
// announcements of every sender outside the subset (enumerated branch by
// branch, noiseless analyzers). Receivers in the subset contribute their
// channel photons. Errors if the subset covers every photon of the run.
std::vector<ConditionedReducedState> sub_party_reduced_states(const GhzConfig& cfg,
                                                              const std::vector<PartyId>& subset);

namespace exact {

// Exact-rational branch tallies for the GHZ protocol, derived by
// enumerating the joint state's Bell-product expansion: each (symbol, sign
// pattern) branch carries weight 2^-(n+1) independent of the secret, and
// failure detection splits each failed analyzer by f : 1-f.
struct EventTally {
    // n == 2 order-resolved classes (unconditional weights).
    Rational p_ss, p_sf, p_fs, p_ff, p_e;
    Rational p_recorded;     // full coincidence formed
    Rational p_identified;   // >= 1 detection (physics)
    Rational p_success;      // identified AND recorded
    // Conditional on recorded; E is exactly zero there.
    Rational cond_ss, cond_sf, cond_fs, cond_ff, cond_e;
};

EventTally enumerate_events(int n, const Rational& f);

Rational success_probability(int n, const Rational& f);

}  // namespace exact

}  // namespace qsst
