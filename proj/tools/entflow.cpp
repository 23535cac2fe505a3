// Experiment runner: every module exposed as a reproducible subcommand.
// Exit codes: 0 success / all-pass, 1 usage error, 2 verification failure,
// 3 numerical or I/O error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "entflow/io.hpp"

using namespace entflow;
namespace fs = std::filesystem;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ENTFLOW_SEED")) return std::strtoull(env, nullptr, 0);
    return 0x5eed;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    return std::to_string(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

std::vector<std::pair<std::string, std::string>> base_meta(std::uint64_t seed, const std::string& config) {
    return {{"seed", std::to_string(seed)}, {"config", config}, {"timestamp", timestamp()}};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

struct RatesOpts {
    int distance = 0;
    std::vector<double> couplings;
    std::string out;
    double tmax = 0.0;
    int samples = 1000;
};

int cmd_rates(const RatesOpts& o, std::uint64_t seed) {
    int K = o.distance / 2;
    double tmax = o.tmax > 0 ? o.tmax : 1.5 * std::sqrt(double(K)) + 1.0;
    auto grid = linspace(0.0, tmax, o.samples);
    std::ostringstream cfg;
    cfg << "rates --distance " << o.distance << " --samples " << o.samples << " --tmax " << tmax;
    RateCurveSet sat = saturated_curves(o.distance, o.couplings, 0.5, grid);
    auto [pu, up] = upper_bound_curves(K, 1e-6, grid);
    auto [pl, lo] = lower_bound_curves(K, grid);
    (void)pu;
    (void)pl;
    fs::create_directories(o.out);
    write_curves_csv((fs::path(o.out) / "saturated.csv").string(), sat, base_meta(seed, cfg.str()));
    write_curves_csv((fs::path(o.out) / "upper.csv").string(), up, base_meta(seed, cfg.str()));
    write_curves_csv((fs::path(o.out) / "lower.csv").string(), lo, base_meta(seed, cfg.str()));
    std::cout << "wrote " << K << " saturated curves and bounds to " << o.out << "\n";
    return 0;
}

struct ScalingOpts {
    std::vector<int> lengths;
    std::string out;
};

int cmd_scaling(const ScalingOpts& o, std::uint64_t seed) {
    auto rows = scaling_experiment(o.lengths);
    fs::create_directories(o.out);
    std::ofstream f(fs::path(o.out) / "scaling.csv");
    if (!f) throw std::runtime_error("cannot open output");
    f << "# version " << kVersion << "\n# seed " << seed << "\n# timestamp " << timestamp() << "\n";
    f << "# config scaling --lengths";
    for (int L : o.lengths) f << ' ' << L;
    f << "\n";
    f << "L,t_numeric,t_lower,t_upper\n" << std::setprecision(12);
    for (const auto& r : rows) f << r.L << ',' << r.t_numeric << ',' << r.t_lower << ',' << r.t_upper << "\n";
    std::cout << "wrote " << rows.size() << " rows to " << o.out << "/scaling.csv\n";
    return 0;
}

struct VerifyOpts {
    std::string check;
    int trials = 0;
    std::string out = ".";
};

int cmd_verify(const VerifyOpts& o, std::uint64_t seed) {
    CampaignReport rep;
    if (o.check == "lemma1")
        rep = run_campaign_lemma1(o.trials, seed);
    else if (o.check == "fan_hoffman")
        rep = run_campaign_fan_hoffman(o.trials, seed);
    else if (o.check == "bound3q")
        rep = run_campaign_3q(o.trials, seed);
    else if (o.check == "tripartite")
        rep = run_campaign_tripartite(o.trials, seed);
    else if (o.check == "rate_eq")
        rep = run_campaign_rate_eq(o.trials, 5, seed);
    else
        throw CLI::ValidationError("--check", "unknown check '" + o.check +
                                                  "'; valid: lemma1, fan_hoffman, bound3q, tripartite, rate_eq");
    fs::create_directories(o.out);
    json j = campaign_to_json(rep);
    j["seed"] = seed;
    std::ofstream f(fs::path(o.out) / (o.check + "_report.json"));
    f << j.dump(2) << "\n";
    std::cout << rep.check << ": " << rep.trials << " trials, " << rep.failures.size() << " failures\n";
    for (const auto& fl : rep.failures)
        std::cout << "  seed=" << fl.seed << " " << fl.instance << " lhs=" << fl.lhs << " rhs=" << fl.rhs << "\n";
    return rep.all_pass() ? 0 : 2;
}

struct ProtocolOpts {
    std::string name;
    int length = 0;
    int samples = 60;
    std::string out;
};

int cmd_protocol(const ProtocolOpts& o, std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 4;
    ProtocolRun run;
    if (o.name == "swap")
        run = swap_protocol(o.length, o.samples, cfg);
    else if (o.name == "engineered")
        run = engineered_chain(o.length, o.samples, cfg);
    else
        throw CLI::ValidationError("--name", "unknown protocol '" + o.name + "'; valid: swap, engineered");
    TrialReport env = envelope_check(run.tracked, protocol_envelope(run), 2e-3);
    fs::create_directories(o.out);
    std::ostringstream cfgstr;
    cfgstr << "protocol --name " << o.name << " --length " << o.length << " --samples " << o.samples;
    write_curves_csv((fs::path(o.out) / (o.name + "_curves.csv")).string(), run.tracked, base_meta(seed, cfgstr.str()));
    std::ofstream f(fs::path(o.out) / (o.name + "_summary.json"));
    json j = protocol_summary_json(run, env);
    j["seed"] = seed;
    f << j.dump(2) << "\n";
    std::cout << o.name << " L=" << o.length << ": F_end=" << run.final_end_fraction << ", envelope "
              << (env.pass ? "pass" : "fail") << "\n";
    return env.pass ? 0 : 2;
}

struct SimulateOpts {
    std::string network;
    double tmax = 1.0;
    int samples = 100;
    std::string out;
};

int cmd_simulate(const SimulateOpts& o, std::uint64_t seed) {
    InteractionNetwork net = load_network(o.network);
    Eigen::Index dim = product_dim(net.dims);
    Vec v = Vec::Zero(dim);
    v(0) = 1.0;
    PureState psi0(net.dims, std::move(v));
    auto grid = linspace(o.tmax / o.samples, o.tmax, o.samples);
    EvolutionResult res = evolve(net, psi0, grid);
    fs::create_directories(o.out);
    std::ofstream f(fs::path(o.out) / "simulate.csv");
    if (!f) throw std::runtime_error("cannot open output");
    f << "# version " << kVersion << "\n# seed " << seed << "\n# timestamp " << timestamp() << "\n";
    f << "# config simulate --network " << o.network << " --tmax " << o.tmax << " --samples " << o.samples << "\n";
    f << "# method " << res.method << "\n";
    f << "t,norm";
    bool probs = dim <= 64;
    if (probs)
        for (Eigen::Index k = 0; k < dim; ++k) f << ",p" << k;
    f << "\n" << std::setprecision(12);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f << grid[i] << ',' << res.states[i].amps.norm();
        if (probs)
            for (Eigen::Index k = 0; k < dim; ++k) f << ',' << std::norm(res.states[i].amps(k));
        f << "\n";
    }
    std::cout << "wrote " << grid.size() << " snapshots (" << res.method << ") to " << o.out << "/simulate.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement-flow experiment runner"};
    app.require_subcommand(1);
    std::uint64_t seed = default_seed();
    int jobs = 1;
    app.add_option("--seed", seed, "random seed (env ENTFLOW_SEED as fallback)");
    app.add_option("--jobs", jobs, "worker cap (computations are single-threaded per subcommand)");

    RatesOpts ro;
    auto* rates = app.add_subcommand("rates", "saturated rate-equation curves and analytic bounds");
    rates->add_option("--distance", ro.distance, "interaction distance d (K = d/2 levels)")->required()->check(CLI::Range(2, 1000000));
    rates->add_option("--couplings", ro.couplings, "per-level coupling constants (default all 1)");
    rates->add_option("--tmax", ro.tmax, "time horizon (default scaled to sqrt(K))");
    rates->add_option("--samples", ro.samples, "grid size")->check(CLI::PositiveNumber);
    rates->add_option("--out", ro.out, "output directory")->required();

    ScalingOpts so;
    auto* scaling = app.add_subcommand("scaling", "entanglement-time scaling with chain length");
    scaling->add_option("--lengths", so.lengths, "chain lengths (each >= 4)")->required();
    scaling->add_option("--out", so.out, "output directory")->required();

    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "randomized verification campaigns");
    verify->add_option("--check", vo.check, "lemma1 | fan_hoffman | bound3q | tripartite | rate_eq")->required();
    verify->add_option("--trials", vo.trials, "trial count")->required()->check(CLI::PositiveNumber);
    verify->add_option("--out", vo.out, "report directory");

    ProtocolOpts po;
    auto* protocol = app.add_subcommand("protocol", "entanglement distribution protocols");
    protocol->add_option("--name", po.name, "swap | engineered")->required();
    protocol->add_option("--length", po.length, "chain length")->required();
    protocol->add_option("--samples", po.samples, "samples per schedule segment")->check(CLI::PositiveNumber);
    protocol->add_option("--out", po.out, "output directory")->required();

    SimulateOpts mo;
    auto* simulate = app.add_subcommand("simulate", "raw network evolution from a network JSON file");
    simulate->add_option("--network", mo.network, "network JSON file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--tmax", mo.tmax, "time horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--samples", mo.samples, "snapshot count")->check(CLI::PositiveNumber);
    simulate->add_option("--out", mo.out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*rates) return cmd_rates(ro, seed);
        if (*scaling) return cmd_scaling(so, seed);
        if (*verify) return cmd_verify(vo, seed);
        if (*protocol) return cmd_protocol(po, seed);
        if (*simulate) return cmd_simulate(mo, seed);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical/runtime error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
