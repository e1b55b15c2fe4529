#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsst/harness.hpp"
#include "qsst/rational.hpp"

namespace py = pybind11;
using namespace qsst;

namespace {

SecretSpec secret_of(std::complex<double> alpha, std::complex<double> beta) {
    return SecretSpec::normalized(alpha, beta);
}

py::dict transcript_dict(const Transcript& t) {
    py::dict d;
    d["seed"] = t.seed;
    d["n"] = t.n;
    d["m"] = t.m;
    d["alpha"] = t.alpha;
    d["beta"] = t.beta;
    py::list outcomes;
    for (const auto& a : t.announcements) outcomes.append(a.outcome.str());
    d["outcomes"] = outcomes;
    d["logical_outcome"] = t.logical.str();
    d["correction"] = t.correction.str();
    d["event_class"] = t.event_class;
    d["recorded"] = t.recorded;
    d["fidelity"] = t.fidelity;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qsst, m) {
    m.doc() = "Multiparty quantum-secret teleportation simulator (C++ core)";

    m.def(
        "success_probability",
        [](int n, const std::string& f) { return exact::success_probability(n, Rational::parse(f)).str(); },
        py::arg("n"), py::arg("f") = "1",
        "Exact success probability of the GHZ-channel protocol as a fraction string");

    m.def(
        "event_distribution",
        [](const std::string& f) {
            const auto t = exact::enumerate_events(2, Rational::parse(f));
            py::dict d;
            d["SS"] = t.cond_ss.str();
            d["SF"] = t.cond_sf.str();
            d["FS"] = t.cond_fs.str();
            d["FF"] = t.cond_ff.str();
            d["E"] = t.cond_e.str();
            return d;
        },
        py::arg("f") = "1/2",
        "Conditional five-event distribution of the n=2 protocol as fraction strings");

    m.def(
        "teleport",
        [](int n, int m, std::complex<double> alpha, std::complex<double> beta, std::int64_t trials,
           std::uint64_t seed, double f, double eta, double epsilon) {
            GhzConfig cfg{secret_of(alpha, beta), n, m, BsmNoise{f, eta, epsilon}};
            cfg.validate();
            py::list out;
            for (std::int64_t i = 0; i < trials; ++i)
                out.append(transcript_dict(run_teleportation(cfg, split_seed(seed, static_cast<std::uint64_t>(i)))));
            return out;
        },
        py::arg("n") = 2, py::arg("m") = 2, py::arg("alpha") = std::complex<double>(1, 0),
        py::arg("beta") = std::complex<double>(1, 0), py::arg("trials") = 1, py::arg("seed") = 0,
        py::arg("f") = 1.0, py::arg("eta") = 0.0, py::arg("epsilon") = 0.0,
        "Sampled runs of the GHZ-channel teleportation protocol");

    m.def(
        "cbm_rates",
        [](int n, int p, int q, std::int64_t trials, std::uint64_t seed, double f, double eta, double epsilon,
           const std::string& mode) {
            CbmConfig cfg;
            cfg.secret = secret_of({1, 0}, {1, 0});
            cfg.enc = EncodingParams::parity(n, p, q);
            cfg.noise = BsmNoise{f, eta, epsilon};
            cfg.validate();
            const ClassRates r =
                estimate_success(cfg, trials, seed, mode == "exact" ? SimMode::Exact : SimMode::LabelLevel);
            py::dict d;
            d["success"] = r.success;
            d["signonly"] = r.signonly;
            d["failure"] = r.failure;
            d["inconsistent"] = r.inconsistent;
            d["success_se"] = r.success_se;
            return d;
        },
        py::arg("n") = 2, py::arg("p") = 2, py::arg("q") = -1, py::arg("trials") = 1000, py::arg("seed") = 0,
        py::arg("f") = 1.0, py::arg("eta") = 0.0, py::arg("epsilon") = 0.0, py::arg("mode") = "label",
        "Monte Carlo outcome-class rates of the fault-tolerant parity-code pipeline");

    m.def(
        "fidelity_pipeline",
        [](const std::string& input, double input_w, double channel_fidelity, int n, int m) {
            const double cw =
                SyntheticNoisyState::weight_for_fidelity(channel_fidelity, std::int64_t{1} << (n + m));
            const auto rep = run_fidelity_pipeline(input.at(0), input_w, cw, n, m);
            py::dict d;
            d["input_fidelity"] = rep.input_fidelity;
            d["output_fidelity"] = rep.output_fidelity;
            d["channel_fidelity"] = rep.channel_fidelity;
            d["classical_bound"] = kClassicalFidelityBound;
            return d;
        },
        py::arg("input") = "a", py::arg("input_w") = 0.0, py::arg("channel_fidelity") = 0.73, py::arg("n") = 2,
        py::arg("m") = 2, "Expected teleportation output fidelity under ideal Bell measurements");

    m.def(
        "ghz_fidelity",
        [](int photons) {
            const PureState g = ghz_state(photons);
            return fidelity(DensityMatrix::from_pure(g), g);
        },
        py::arg("photons") = 4);
}
