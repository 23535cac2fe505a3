#pragma once

#include <fstream>
#include <iomanip>

#include <nlohmann/json.hpp>

#include "protocols.hpp"
#include "verify.hpp"

namespace entflow {

inline constexpr const char* kVersion = "1.0.0";

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Curve sets as CSV: '#'-prefixed metadata lines, then a header row and one
/// row per time sample. Deterministic for fixed inputs.
inline void write_curves_csv(std::ostream& os, const RateCurveSet& curves,
                             const std::vector<std::pair<std::string, std::string>>& meta = {}) {
    os << "# version " << kVersion << "\n";
    os << "# kind " << curves.kind << "\n";
    if (!curves.couplings.empty()) {
        os << "# couplings";
        for (double c : curves.couplings) os << ' ' << std::setprecision(17) << c;
        os << "\n";
    }
    for (const auto& [k, v] : meta) os << "# " << k << ' ' << v << "\n";
    os << "t";
    for (int k = 1; k <= curves.levels(); ++k) os << ",f" << k;
    os << "\n";
    os << std::setprecision(12);
    for (std::size_t i = 0; i < curves.times.size(); ++i) {
        os << curves.times[i];
        for (int k = 0; k < curves.levels(); ++k) os << ',' << curves.curves[k][i];
        os << "\n";
    }
}

inline void write_curves_csv(const std::string& path, const RateCurveSet& curves,
                             const std::vector<std::pair<std::string, std::string>>& meta = {}) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_curves_csv(f, curves, meta);
}

inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
    os << "# version " << kVersion << "\n";
    os << "L,t_numeric,t_lower,t_upper\n";
    os << std::setprecision(12);
    for (const auto& r : rows) os << r.L << ',' << r.t_numeric << ',' << r.t_lower << ',' << r.t_upper << "\n";
}

inline void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_scaling_csv(f, rows);
}

// ---------------------------------------------------------------------------
// Network JSON
// ---------------------------------------------------------------------------

/// Network as JSON: {"dims": [...], "edges": [{"i","j","matrix"} ...]} with
/// complex entries as [re, im] row-major. Two-qubit edges may instead carry
/// "pauli_coeffs", a real 4x4 array c with h = sum c[p][q] sigma_p x sigma_q.
inline json network_to_json(const InteractionNetwork& net) {
    json j;
    j["dims"] = net.dims;
    j["edges"] = json::array();
    for (const auto& ed : net.edges) {
        json e;
        e["i"] = ed.i;
        e["j"] = ed.j;
        json m = json::array();
        for (Eigen::Index r = 0; r < ed.h.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < ed.h.cols(); ++c) row.push_back({ed.h(r, c).real(), ed.h(r, c).imag()});
            m.push_back(row);
        }
        e["matrix"] = m;
        j["edges"].push_back(e);
    }
    return j;
}

inline InteractionNetwork network_from_json(const json& j) {
    if (!j.contains("dims") || !j.contains("edges")) throw std::invalid_argument("network json: dims and edges required");
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        int i = e.at("i").get<int>();
        int jj = e.at("j").get<int>();
        Mat h;
        if (e.contains("matrix")) {
            const auto& m = e.at("matrix");
            Eigen::Index n = Eigen::Index(m.size());
            h = Mat(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                const auto& row = m.at(r);
                if (Eigen::Index(row.size()) != n) throw std::invalid_argument("network json: edge matrix not square");
                for (Eigen::Index c = 0; c < n; ++c) h(r, c) = cx(row.at(c).at(0).get<double>(), row.at(c).at(1).get<double>());
            }
        } else if (e.contains("pauli_coeffs")) {
            const auto& cc = e.at("pauli_coeffs");
            if (cc.size() != 4) throw std::invalid_argument("network json: pauli_coeffs must be 4x4");
            h = Mat::Zero(4, 4);
            for (int p = 0; p < 4; ++p) {
                if (cc.at(p).size() != 4) throw std::invalid_argument("network json: pauli_coeffs must be 4x4");
                for (int q = 0; q < 4; ++q) h += cc.at(p).at(q).get<double>() * kron(pauli(p), pauli(q));
            }
        } else {
            throw std::invalid_argument("network json: edge needs matrix or pauli_coeffs");
        }
        edges.push_back({i, jj, h});
    }
    return InteractionNetwork(std::move(dims), std::move(edges));
}

inline InteractionNetwork load_network(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open network file: " + path);
    json j;
    f >> j;
    return network_from_json(j);
}

inline void save_network(const std::string& path, const InteractionNetwork& net) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << network_to_json(net).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

inline json campaign_to_json(const CampaignReport& rep) {
    json j;
    j["version"] = kVersion;
    j["check"] = rep.check;
    j["trials"] = rep.trials;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.all_pass();
    j["failures"] = json::array();
    for (const auto& f : rep.failures) {
        j["failures"].push_back({{"seed", f.seed},
                                 {"instance", f.instance},
                                 {"lhs", f.lhs},
                                 {"rhs", f.rhs},
                                 {"slack", f.slack},
                                 {"diagnostics", f.diagnostics}});
    }
    return j;
}

inline json protocol_summary_json(const ProtocolRun& run, const TrialReport& envelope) {
    int K = int(run.levels.A.size());
    json j;
    j["version"] = kVersion;
    j["protocol"] = run.protocol;
    j["L"] = run.L;
    j["final_end_fraction"] = run.final_end_fraction;
    if (run.t_ent)
        j["T_ent"] = *run.t_ent;
    else
        j["T_ent"] = nullptr;
    j["bound_lower"] = std::sqrt(K / 2.0);
    j["bound_upper"] = std::sqrt(double(K));
    j["envelope_pass"] = envelope.pass;
    j["envelope_slack"] = envelope.slack;
    return j;
}

}  // namespace entflow
