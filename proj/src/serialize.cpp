#include <json.hpp>

#include "qsst/cbm.hpp"
#include "qsst/protocol.hpp"

namespace qsst {

namespace {

nlohmann::json complex_json(const cx& c) { return nlohmann::json::array({c.real(), c.imag()}); }

}  // namespace

std::string transcript_to_jsonl(const Transcript& t) {
    nlohmann::json j;
    j["seed"] = t.seed;
    j["sampled"] = t.sampled;
    j["n"] = t.n;
    j["m"] = t.m;
    j["alpha"] = complex_json(t.alpha);
    j["beta"] = complex_json(t.beta);
    j["f"] = t.f;
    j["eta"] = t.eta;
    j["epsilon"] = t.epsilon;
    auto outcomes = nlohmann::json::array();
    for (const auto& a : t.announcements) outcomes.push_back(a.outcome.str());
    j["outcomes"] = outcomes;
    j["logical_outcome"] = t.logical.str();
    j["correction"] = t.correction.str();
    j["event_class"] = t.event_class;
    j["recorded"] = t.recorded;
    j["fidelity"] = t.fidelity;
    return j.dump();
}

std::string ft_transcript_to_jsonl(const FtTranscript& t) {
    nlohmann::json j;
    j["seed"] = t.seed;
    j["sampled"] = t.sampled;
    j["mode"] = t.mode == SimMode::Exact ? "exact" : "label";
    j["n"] = t.n;
    j["p"] = t.p;
    j["q"] = t.q;
    j["m"] = t.m;
    j["alpha"] = complex_json(t.alpha);
    j["beta"] = complex_json(t.beta);
    j["f"] = t.f;
    j["eta"] = t.eta;
    j["epsilon"] = t.epsilon;
    j["adversary"] = t.adversary;
    auto results = nlohmann::json::array();
    for (const auto& r : t.true_results) results.push_back(r.str());
    j["results"] = results;
    auto announced = nlohmann::json::array();
    for (const auto& r : t.announced) announced.push_back(r.str());
    j["announced"] = announced;
    j["logical_outcome"] = t.logical.str();
    j["overruled_blocks"] = t.overruled_blocks;
    j["correction"] = t.correction.str();
    j["run_class"] = run_class_str(t.run_class);
    if (t.fidelity) j["fidelity"] = *t.fidelity;
    else j["fidelity"] = nullptr;
    return j.dump();
}

}  // namespace qsst
