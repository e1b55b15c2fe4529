#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qsst/harness.hpp"
#include "qsst/rational.hpp"

namespace qsst {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

AdversaryModel parse_adversary(const std::string& text) {
    AdversaryModel a;
    if (text.empty() || text == "honest") return a;
    const auto parts = split(text, ':');
    const std::string& name = parts[0];
    if (name == "flipsign") a.strategy = AdversaryModel::Strategy::FlipSign;
    else if (name == "flipsymbol") a.strategy = AdversaryModel::Strategy::FlipSymbol;
    else if (name == "reportfailure") a.strategy = AdversaryModel::Strategy::ReportFailure;
    else if (name == "random") a.strategy = AdversaryModel::Strategy::Random;
    else throw CLI::ValidationError("--adversary", "unknown strategy '" + name + "'");
    if (parts.size() < 2 || parts[1].empty())
        throw CLI::ValidationError("--adversary", "strategy needs sender indices, e.g. flipsymbol:1+3");
    for (const auto& tok : split(parts[1], '+')) a.dishonest_senders.push_back(std::stoi(tok));
    return a;
}

struct SecretFlags {
    double alpha_re = 1.0, alpha_im = 0.0, beta_re = 1.0, beta_im = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha-re", alpha_re, "Re(alpha) of the secret");
        cmd->add_option("--alpha-im", alpha_im, "Im(alpha)");
        cmd->add_option("--beta-re", beta_re, "Re(beta)");
        cmd->add_option("--beta-im", beta_im, "Im(beta)");
    }
    SecretSpec secret() const { return SecretSpec::normalized(cx(alpha_re, alpha_im), cx(beta_re, beta_im)); }
};

class RecordWriter {
public:
    RecordWriter(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::out | std::ios::trunc);
            if (!file_) throw std::runtime_error("cannot open output path '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

int teleport_cmd(const SecretFlags& sf, int n, int m, double f, double eta, double eps, std::int64_t trials,
                 std::uint64_t seed, const std::string& out_path, std::ostream& out) {
    GhzConfig cfg{sf.secret(), n, m, BsmNoise{f, eta, eps}};
    cfg.validate();
    RecordWriter w(out_path, out);
    std::int64_t identified = 0, recorded_success = 0;
    double fid_sum = 0.0;
    for (std::int64_t i = 0; i < trials; ++i) {
        Transcript t = run_teleportation(cfg, split_seed(seed, static_cast<std::uint64_t>(i)));
        w.stream() << transcript_to_jsonl(t) << "\n";
        if (t.logical.identified()) ++identified;
        if (t.logical.identified() && t.recorded) {
            ++recorded_success;
            fid_sum += t.fidelity;
        }
    }
    out << "trials = " << trials << "\n";
    out << "success_rate = " << static_cast<double>(recorded_success) / static_cast<double>(trials) << "\n";
    out << "mean_fidelity_on_success = "
        << (recorded_success > 0 ? fid_sum / static_cast<double>(recorded_success) : 0.0) << "\n";
    return 0;
}

int enumerate_cmd(int n, int m, const std::string& f_text, std::ostream& out) {
    const Rational f = Rational::parse(f_text);
    if (f < Rational(0) || Rational(1) < f) throw CLI::ValidationError("--f", "must lie in [0,1]");
    const auto tally = exact::enumerate_events(n, f);
    out << "n = " << n << ", m = " << m << ", f = " << f.str() << "\n";
    out << "success_probability = " << tally.p_success.str() << " (" << tally.p_success.value() << ")\n";
    out << "identified_probability = " << tally.p_identified.str() << "\n";
    out << "recorded_probability = " << tally.p_recorded.str() << "\n";
    if (n == 2) {
        out << "event_probabilities: SS=" << tally.p_ss.str() << " SF=" << tally.p_sf.str() << " FS="
            << tally.p_fs.str() << " FF=" << tally.p_ff.str() << " E=" << tally.p_e.str() << "\n";
        out << "conditional_on_recorded: SS=" << tally.cond_ss.str() << " SF=" << tally.cond_sf.str()
            << " FS=" << tally.cond_fs.str() << " FF=" << tally.cond_ff.str() << " E=" << tally.cond_e.str()
            << "\n";
    }
    return 0;
}

void print_rates(const ClassRates& r, std::ostream& out) {
    out << "success_rate = " << r.success << " (se " << r.success_se << ")\n";
    out << "signonly_rate = " << r.signonly << " (se " << r.signonly_se << ")\n";
    out << "failure_rate = " << r.failure << " (se " << r.failure_se << ")\n";
    out << "inconsistent_rate = " << r.inconsistent << " (se " << r.inconsistent_se << ")\n";
}

int cbm_cmd(const SecretFlags& sf, const std::string& scheme, int n, int p, int q, int m, double f, double eta,
            double eps, const std::string& adversary, std::int64_t trials, std::uint64_t seed,
            const std::string& mode_name, bool enumerate_mode, const std::string& out_path, std::ostream& out) {
    CbmConfig cfg;
    cfg.secret = sf.secret();
    cfg.enc = scheme == "ghz" ? EncodingParams::ghz(n) : EncodingParams::parity(n, p, q);
    cfg.m = m;
    cfg.noise = BsmNoise{f, eta, eps};
    cfg.adversary = parse_adversary(adversary);
    cfg.validate();
    const SimMode mode = mode_name == "exact" ? SimMode::Exact : SimMode::LabelLevel;

    if (enumerate_mode) {
        const ClassRates r = enumerate_class_probabilities(cfg, mode);
        out << "enumerated outcome-class probabilities (" << mode_name << " mode)\n";
        print_rates(r, out);
        return 0;
    }
    if (!out_path.empty()) {
        RecordWriter w(out_path, out);
        std::array<double, 4> tally{0, 0, 0, 0};
        for (std::int64_t i = 0; i < trials; ++i) {
            const std::uint64_t trial_seed = split_seed(seed, static_cast<std::uint64_t>(i));
            if (cfg.enc.scheme == Scheme::Parity) {
                FtTranscript t = run_ft_teleportation(cfg, trial_seed, mode);
                w.stream() << ft_transcript_to_jsonl(t) << "\n";
                tally[static_cast<std::size_t>(t.run_class)] += 1.0;
            } else {
                GhzConfig g{cfg.secret, cfg.enc.n, cfg.m, cfg.noise};
                Transcript t = run_teleportation(g, trial_seed);
                w.stream() << transcript_to_jsonl(t) << "\n";
                const bool ok = t.recorded && t.logical.identified();
                tally[ok ? 0 : 2] += 1.0;
            }
        }
        ClassRates r;
        r.trials = trials;
        r.success = tally[0] / static_cast<double>(trials);
        r.signonly = tally[1] / static_cast<double>(trials);
        r.failure = tally[2] / static_cast<double>(trials);
        r.inconsistent = tally[3] / static_cast<double>(trials);
        print_rates(r, out);
        return 0;
    }
    const ClassRates r = estimate_success(cfg, trials, seed, mode);
    out << "trials = " << trials << ", mode = " << (cfg.enc.scheme == Scheme::GHZ ? "ghz-protocol" : mode_name)
        << "\n";
    print_rates(r, out);
    return 0;
}

int sweep_cmd(const SecretFlags& sf, const std::string& scheme, const std::string& ns, const std::string& ps,
              const std::string& qs, const std::string& etas, const std::string& fs, const std::string& epss,
              const std::string& adversaries, const std::string& mode_name, std::int64_t trials,
              std::uint64_t seed, bool csv, const std::string& out_path, std::ostream& out) {
    RecordWriter w(out_path, out);
    const SimMode mode = mode_name == "exact" ? SimMode::Exact : SimMode::LabelLevel;
    if (csv)
        w.stream() << "n,p,q,eta,f,epsilon,adversary,trials,success_rate,stderr,signonly_rate,failure_rate,"
                      "inconsistent_rate\n";
    for (const auto& n_s : split(ns, ',')) {
        for (const auto& p_s : split(ps, ',')) {
            for (const auto& q_s : split(qs, ',')) {
                for (const auto& eta_s : split(etas, ',')) {
                    for (const auto& f_s : split(fs, ',')) {
                        for (const auto& eps_s : split(epss, ',')) {
                            for (const auto& adv_s : split(adversaries, ',')) {
                                const int n = std::stoi(n_s);
                                const int p = std::stoi(p_s);
                                const int q = q_s.empty() ? -1 : std::stoi(q_s);
                                CbmConfig cfg;
                                cfg.secret = sf.secret();
                                cfg.enc = scheme == "ghz" ? EncodingParams::ghz(n) : EncodingParams::parity(n, p, q);
                                cfg.m = 1;
                                cfg.noise = BsmNoise{std::stod(f_s), std::stod(eta_s), std::stod(eps_s)};
                                cfg.adversary = parse_adversary(adv_s);
                                cfg.validate();
                                const ClassRates r = estimate_success(cfg, trials, seed, mode);
                                if (csv) {
                                    w.stream() << n << "," << p << "," << cfg.enc.q << "," << eta_s << "," << f_s
                                               << "," << eps_s << "," << cfg.adversary.str() << "," << trials << ","
                                               << r.success << "," << r.success_se << "," << r.signonly << ","
                                               << r.failure << "," << r.inconsistent << "\n";
                                } else {
                                    w.stream() << "{\"n\":" << n << ",\"p\":" << p << ",\"q\":" << cfg.enc.q
                                               << ",\"eta\":" << eta_s << ",\"f\":" << f_s << ",\"epsilon\":"
                                               << eps_s << ",\"adversary\":\"" << cfg.adversary.str()
                                               << "\",\"trials\":" << trials << ",\"success_rate\":" << r.success
                                               << ",\"stderr\":" << r.success_se << ",\"signonly_rate\":"
                                               << r.signonly << ",\"failure_rate\":" << r.failure
                                               << ",\"inconsistent_rate\":" << r.inconsistent << "}\n";
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return 0;
}

int fidelity_pipeline_cmd(const std::string& inputs, double channel_fidelity, double channel_w, double input_w,
                          int n, int m, std::ostream& out) {
    double cw = channel_w;
    if (cw < 0.0)
        cw = SyntheticNoisyState::weight_for_fidelity(channel_fidelity, std::int64_t{1} << (n + m));
    const std::string which = inputs == "all" ? "abc" : inputs;
    out << "channel_w = " << cw << ", input_w = " << input_w << ", classical_bound = " << kClassicalFidelityBound
        << "\n";
    for (char c : which) {
        const auto rep = run_fidelity_pipeline(c, input_w, cw, n, m);
        out << "input " << c << ": F_channel = " << rep.channel_fidelity << ", F_in = " << rep.input_fidelity
            << ", F_out = " << rep.output_fidelity << ", beats_classical_bound = "
            << (rep.output_fidelity > kClassicalFidelityBound ? "yes" : "no") << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator of multiparty quantum-secret teleportation over GHZ and parity-encoded channels",
                 "qsst"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    SecretFlags sf;
    int n = 2, m = 2, p = 1, q = -1;
    double f = 1.0, eta = 0.0, eps = 0.0;
    std::string f_text = "1";
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_path, adversary = "honest", mode_name = "label", scheme = "parity";
    bool csv = false, enumerate_mode = false;

    auto add_common = [&](CLI::App* c, bool with_pq) {
        c->add_option("--n", n, "sender count / blocks per logical qubit");
        c->add_option("--m", m, "receiver count");
        if (with_pq) {
            c->add_option("--p", p, "photons per block");
            c->add_option("--q", q, "level-1 retry threshold (default p-1)");
        }
        c->add_option("--eta", eta, "photon loss rate");
        c->add_option("--epsilon", eps, "detected-outcome flip rate");
        c->add_option("--out", out_path, "output path for line-delimited records");
    };

    auto* tele = app.add_subcommand("teleport", "Monte Carlo runs of the GHZ-channel protocol");
    add_common(tele, false);
    tele->add_option("--f", f, "failure detection efficiency");
    sf.attach(tele);
    tele->add_option("--trials", trials, "number of runs");
    tele->add_option("--seed", seed, "base RNG seed")->required();

    auto* enu = app.add_subcommand("enumerate", "exact branch enumeration of the GHZ-channel protocol");
    enu->add_option("--n", n, "sender count");
    enu->add_option("--m", m, "receiver count");
    enu->add_option("--f", f_text, "failure detection efficiency as a fraction, e.g. 1/2");

    auto* cbm = app.add_subcommand("cbm", "fault-tolerant parity-code teleportation runs");
    add_common(cbm, true);
    cbm->add_option("--f", f, "failure detection efficiency");
    sf.attach(cbm);
    cbm->add_option("--scheme", scheme, "parity | ghz")->check(CLI::IsMember({"parity", "ghz"}));
    cbm->add_option("--adversary", adversary, "honest | flipsign:IDX | flipsymbol:IDX[+IDX] | reportfailure:IDX | random:IDX");
    cbm->add_option("--mode", mode_name, "exact | label")->check(CLI::IsMember({"exact", "label"}));
    cbm->add_flag("--enumerate", enumerate_mode, "exhaustive branch probabilities instead of sampling");
    cbm->add_option("--trials", trials, "number of runs");
    auto* cbm_seed = cbm->add_option("--seed", seed, "base RNG seed");
    cbm->callback([&] { seed_set = cbm_seed->count() > 0; });

    auto* swp = app.add_subcommand("sweep", "grid of cbm Monte Carlo estimates");
    std::string ns = "2", ps = "2", qs = "", etas = "0", fs = "1", epss = "0", adversaries = "honest";
    swp->add_option("--n", ns, "comma list of n values");
    swp->add_option("--p", ps, "comma list of p values");
    swp->add_option("--q", qs, "comma list of q values (empty = p-1)");
    swp->add_option("--eta", etas, "comma list of loss rates");
    swp->add_option("--f", fs, "comma list of detection efficiencies");
    swp->add_option("--epsilon", epss, "comma list of flip rates");
    swp->add_option("--adversary", adversaries, "comma list of adversary specs");
    swp->add_option("--scheme", scheme, "parity | ghz")->check(CLI::IsMember({"parity", "ghz"}));
    swp->add_option("--mode", mode_name, "exact | label")->check(CLI::IsMember({"exact", "label"}));
    swp->add_option("--trials", trials, "trials per cell");
    swp->add_option("--seed", seed, "base RNG seed")->required();
    swp->add_flag("--csv", csv, "tabular output instead of records");
    swp->add_option("--out", out_path, "output path");
    sf.attach(swp);

    auto* fid = app.add_subcommand("fidelity-pipeline", "expected output under ideal Bell measurements");
    std::string inputs = "all";
    double channel_fidelity = 0.73, channel_w = -1.0, input_w = 0.0;
    fid->add_option("--input", inputs, "a | b | c | all");
    fid->add_option("--channel-fidelity", channel_fidelity, "target GHZ fidelity of the synthetic channel");
    fid->add_option("--channel-w", channel_w, "white-noise weight of the channel (overrides fidelity)");
    fid->add_option("--input-w", input_w, "white-noise weight of the input");
    fid->add_option("--n", n, "sender count");
    fid->add_option("--m", m, "receiver count");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        const int code = app.exit(e, msg, msg);
        (code == 0 ? out : err) << msg.str();
        return code;
    }

    try {
        if (tele->parsed()) return teleport_cmd(sf, n, m, f, eta, eps, trials, seed, out_path, out);
        if (enu->parsed()) return enumerate_cmd(n, m, f_text, out);
        if (cbm->parsed()) {
            if (!enumerate_mode && !seed_set)
                throw std::invalid_argument("cbm sampling needs --seed (use --enumerate for exhaustive mode)");
            return cbm_cmd(sf, scheme, n, p, q, m, f, eta, eps, adversary, trials, seed, mode_name, enumerate_mode,
                           out_path, out);
        }
        if (swp->parsed())
            return sweep_cmd(sf, scheme, ns, ps, qs, etas, fs, epss, adversaries, mode_name, trials, seed, csv,
                             out_path, out);
        if (fid->parsed()) return fidelity_pipeline_cmd(inputs, channel_fidelity, channel_w, input_w, n, m, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace qsst
