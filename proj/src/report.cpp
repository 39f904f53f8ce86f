#include "ccmkit/report.hpp"

#include "ccmkit/dataset.hpp"
#include "ccmkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace ccmkit {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json pairs_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
    Json out = Json::array();
    for (const auto& [a, b] : pairs) out.push_back(Json::array({a, b}));
    return out;
}

const Json& require(const Json& obj, const char* key, const char* where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(ErrorCode::schema, std::string(where) + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

double parse_number(std::string_view cell, std::size_t line) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        fail(ErrorCode::parse, "curve file line " + std::to_string(line) + ": '" + std::string(cell) +
                                   "' is not a number");
    }
    return v;
}

Score make_score(std::size_t tp, std::size_t fp, std::size_t fn) {
    Score s;
    s.true_positives = tp;
    s.false_positives = fp;
    s.false_negatives = fn;
    s.no_predictions = tp + fp == 0;
    s.no_truth = tp + fn == 0;
    s.precision = s.no_predictions ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = s.no_truth ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

Json score_json(const Score& s) {
    return Json{{"true_positives", s.true_positives},
                {"false_positives", s.false_positives},
                {"false_negatives", s.false_negatives},
                {"precision", s.precision},
                {"recall", s.recall},
                {"f1", s.f1},
                {"no_predictions", s.no_predictions},
                {"no_truth", s.no_truth}};
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) fail(ErrorCode::io, "write to '" + path.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorCode::io, "cannot replace '" + path.string() + "'");
    }
}

InputDigest digest_file(const fs::path& path) {
    return {path.filename().string(), hex64(fnv1a64(read_text_file(path)))};
}

Json embedded_manifest_json(const RunManifest& m) {
    Json inputs = Json::array();
    for (const auto& d : m.inputs) inputs.push_back({{"name", d.name}, {"fnv1a64", d.fnv1a64_hex}});
    Json out{{"tool", "ccmkit"},
             {"tool_version", m.tool_version},
             {"command", m.command},
             {"config", m.config},
             {"rng_seed", m.rng_seed ? Json(*m.rng_seed) : Json(nullptr)},
             {"inputs", inputs}};
    if (!m.sidecar_name.empty()) out["manifest_file"] = m.sidecar_name;
    if (!m.log.empty()) out["log"] = m.log;
    return out;
}

Json sidecar_manifest_json(const RunManifest& m) {
    Json out = embedded_manifest_json(m);
    out.erase("manifest_file");
    out["argv"] = m.argv;
    out["wall_clock_seconds"] = m.wall_clock_seconds;
    return out;
}

std::string dump_json(const Json& value) { return value.dump(2) + "\n"; }

Json ccm_results_json(const CcmScan& scan, const RunManifest& manifest) {
    Json results = Json::array();
    for (const auto& r : scan.results) {
        Json curve = Json::array();
        for (const auto& p : r.curve) {
            curve.push_back({{"lib_size", p.lib_size}, {"rho_mean", p.rho_mean}, {"rho_sd", p.rho_sd}});
        }
        results.push_back({{"source", r.source},
                           {"target", r.target},
                           {"E", r.dim},
                           {"p_value", r.p_value},
                           {"rho_max_lib", r.rho_max_lib},
                           {"significant", r.significant},
                           {"degenerate", r.degenerate},
                           {"curve", curve}});
    }
    return Json{{"manifest", embedded_manifest_json(manifest)},
                {"method", "ccm"},
                {"nodes", scan.graph.nodes},
                {"results", results},
                {"feedback_pairs", pairs_json(scan.graph.feedback_pairs)}};
}

Json granger_results_json(const GrangerScan& scan, const RunManifest& manifest) {
    Json results = Json::array();
    for (const auto& r : scan.results) {
        Json per_lag = Json::array();
        for (const auto& l : r.per_lag) {
            per_lag.push_back({{"lag", l.lag},
                               {"f_statistic", l.f_statistic},
                               {"p_value", l.p_value},
                               {"singular", l.singular},
                               {"observations", l.observations}});
        }
        results.push_back({{"source", r.cause},
                           {"target", r.effect},
                           {"p_value", r.min_p_value},
                           {"best_lag", r.best_lag},
                           {"rho_max_lib", nullptr},
                           {"significant", r.significant},
                           {"degenerate", r.degenerate},
                           {"significant_at", r.significant_at},
                           {"per_lag", per_lag}});
    }
    return Json{{"manifest", embedded_manifest_json(manifest)},
                {"method", "granger"},
                {"nodes", scan.graph.nodes},
                {"results", results},
                {"feedback_pairs", pairs_json(scan.graph.feedback_pairs)},
                {"multiple_testing",
                 {{"max_lag", scan.max_lag},
                  {"significant_fraction", scan.significant_fraction},
                  {"null_base_rate", scan.null_base_rate},
                  {"note", scan.note}}}};
}

Json ground_truth_json(const GroundTruthGraph& truth) {
    Json edges = Json::array();
    for (const auto& e : truth.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"lags", e.lags}});
    return Json{{"nodes", truth.nodes}, {"edges", edges}, {"feedback_pairs", pairs_json(truth.feedback_pairs)}};
}

GroundTruthGraph ground_truth_from_json(const Json& value) {
    GroundTruthGraph g;
    try {
        for (const auto& n : require(value, "nodes", "truth")) g.nodes.push_back(n.get<std::string>());
        for (const auto& e : require(value, "edges", "truth")) {
            TruthEdge edge{require(e, "from", "truth edge").get<std::string>(),
                           require(e, "to", "truth edge").get<std::string>(),
                           {}};
            if (e.contains("lags")) edge.lags = e.at("lags").get<std::vector<int>>();
            g.edges.push_back(std::move(edge));
        }
        if (value.contains("feedback_pairs")) {
            for (const auto& p : value.at("feedback_pairs")) {
                if (!p.is_array() || p.size() != 2) fail(ErrorCode::schema, "truth: feedback pair must have 2 names");
                g.feedback_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::schema, std::string("truth: ") + e.what());
    }
    return g;
}

Json embedding_selection_json(const std::string& series, const EmbeddingSelection& selection) {
    Json curve = Json::array();
    for (const auto& p : selection.curve) curve.push_back({{"E", p.dim}, {"rho", p.rho}, {"degenerate", p.degenerate}});
    return Json{{"series", series}, {"best_E", selection.best_dim}, {"skill_curve", curve}, {"warnings", selection.warnings}};
}

std::string curve_csv(const CcmResult& result) {
    std::string out = "lib_size,rho_mean,rho_sd\n";
    for (const auto& p : result.curve) {
        out += std::to_string(p.lib_size) + "," + format_double(p.rho_mean) + "," + format_double(p.rho_sd) + "\n";
    }
    return out;
}

CurveFile parse_curve_csv(std::string_view text, std::string label) {
    const auto records = parse_csv(text);
    if (records.empty()) fail(ErrorCode::parse, "curve file '" + label + "' is empty");
    const std::vector<std::string> header{"lib_size", "rho_mean", "rho_sd"};
    if (records.front() != header) {
        fail(ErrorCode::parse, "curve file '" + label + "' must have header lib_size,rho_mean,rho_sd");
    }
    CurveFile curve;
    curve.label = std::move(label);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.size() != 3) {
            fail(ErrorCode::parse, "curve file '" + curve.label + "' line " + std::to_string(i + 1) +
                                       ": expected 3 fields");
        }
        CurveRow row{parse_number(rec[0], i + 1), parse_number(rec[1], i + 1), parse_number(rec[2], i + 1)};
        if (!curve.rows.empty() && row.lib_size <= curve.rows.back().lib_size) {
            fail(ErrorCode::parse, "curve file '" + curve.label + "': lib_size must increase");
        }
        if (row.rho_sd < 0.0) fail(ErrorCode::parse, "curve file '" + curve.label + "': negative rho_sd");
        curve.rows.push_back(row);
    }
    if (curve.rows.empty()) fail(ErrorCode::parse, "curve file '" + curve.label + "' has no rows");
    return curve;
}

std::string skill_curve_csv(const EmbeddingSelection& selection) {
    std::string out = "E,rho\n";
    for (const auto& p : selection.curve) out += std::to_string(p.dim) + "," + format_double(p.rho) + "\n";
    return out;
}

std::string granger_table_csv(const GrangerScan& scan) {
    std::string out = "cause,effect";
    for (int lag = 1; lag <= scan.max_lag; ++lag) out += ",p_lag" + std::to_string(lag);
    out += ",min_p,best_lag\n";
    for (const auto& r : scan.results) {
        out += csv_escape(r.cause) + "," + csv_escape(r.effect);
        for (const auto& l : r.per_lag) out += "," + (l.singular ? std::string("singular") : format_double(l.p_value));
        out += "," + format_double(r.min_p_value) + "," + std::to_string(r.best_lag) + "\n";
    }
    return out;
}

std::string_view to_string(EdgeClass c) noexcept {
    switch (c) {
    case EdgeClass::true_positive: return "true_positive";
    case EdgeClass::false_positive: return "false_positive";
    case EdgeClass::false_negative: return "false_negative";
    }
    return "false_negative";
}

EvaluationReport evaluate(const GroundTruthGraph& truth, const Json& results) {
    EvaluationReport rep;
    std::set<std::pair<std::string, std::string>> tested;
    std::set<std::pair<std::string, std::string>> predicted;
    std::set<std::pair<std::string, std::string>> predicted_feedback;
    std::vector<std::string> nodes;
    try {
        rep.method = require(results, "method", "results").get<std::string>();
        nodes = require(results, "nodes", "results").get<std::vector<std::string>>();
        for (const auto& r : require(results, "results", "results")) {
            auto key = std::make_pair(require(r, "source", "result").get<std::string>(),
                                      require(r, "target", "result").get<std::string>());
            if (key.first == key.second) continue;
            tested.insert(key);
            if (require(r, "significant", "result").get<bool>()) predicted.insert(key);
        }
        for (const auto& p : require(results, "feedback_pairs", "results")) {
            if (!p.is_array() || p.size() != 2) fail(ErrorCode::schema, "results: feedback pair must have 2 names");
            auto a = p[0].get<std::string>();
            auto b = p[1].get<std::string>();
            if (b < a) std::swap(a, b);
            predicted_feedback.emplace(a, b);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::schema, std::string("results: ") + e.what());
    }

    const std::set<std::string> result_nodes(nodes.begin(), nodes.end());
    const std::set<std::string> truth_nodes(truth.nodes.begin(), truth.nodes.end());
    if (result_nodes != truth_nodes) fail(ErrorCode::schema, "evaluate: results and truth have different node sets");

    std::set<std::pair<std::string, std::string>> truth_edges;
    for (const auto& e : truth.edges) {
        if (e.from != e.to) truth_edges.emplace(e.from, e.to);
    }
    rep.tested_directions = tested.size();
    rep.truth_edges_total = truth_edges.size();

    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& key : tested) {
        const bool is_true = truth_edges.count(key) > 0;
        const bool hit = predicted.count(key) > 0;
        if (is_true) ++rep.truth_edges_in_scope;
        if (is_true && hit) {
            ++tp;
            rep.edges.push_back({key.first, key.second, EdgeClass::true_positive});
        } else if (hit) {
            ++fp;
            rep.edges.push_back({key.first, key.second, EdgeClass::false_positive});
        } else if (is_true) {
            ++fn;
            rep.edges.push_back({key.first, key.second, EdgeClass::false_negative});
        }
    }
    rep.directed = make_score(tp, fp, fn);

    // A feedback pair is in scope when both of its directions were tested.
    std::set<std::pair<std::string, std::string>> truth_fb;
    for (auto [a, b] : truth.feedback_pairs) {
        if (b < a) std::swap(a, b);
        if (tested.count({a, b}) && tested.count({b, a})) truth_fb.emplace(a, b);
    }
    std::set<std::pair<std::string, std::string>> scope_pairs;
    for (const auto& [a, b] : tested) {
        if (tested.count({b, a})) scope_pairs.emplace(std::min(a, b), std::max(a, b));
    }
    rep.truth_feedback_in_scope = truth_fb.size();
    tp = fp = fn = 0;
    for (const auto& key : scope_pairs) {
        const bool is_true = truth_fb.count(key) > 0;
        const bool hit = predicted_feedback.count(key) > 0;
        if (is_true && hit) {
            ++tp;
            rep.feedback.push_back({key.first, key.second, EdgeClass::true_positive});
        } else if (hit) {
            ++fp;
            rep.feedback.push_back({key.first, key.second, EdgeClass::false_positive});
        } else if (is_true) {
            ++fn;
            rep.feedback.push_back({key.first, key.second, EdgeClass::false_negative});
        }
    }
    rep.feedback_score = make_score(tp, fp, fn);
    return rep;
}

Json evaluation_json(const EvaluationReport& report, const RunManifest& manifest) {
    auto edges_json = [](const std::vector<ClassifiedEdge>& edges) {
        Json out = Json::array();
        for (const auto& e : edges) out.push_back({{"from", e.from}, {"to", e.to}, {"class", to_string(e.cls)}});
        return out;
    };
    return Json{{"manifest", embedded_manifest_json(manifest)},
                {"method", report.method},
                {"tested_directions", report.tested_directions},
                {"truth_edges_in_scope", report.truth_edges_in_scope},
                {"truth_edges_total", report.truth_edges_total},
                {"directed", score_json(report.directed)},
                {"edges", edges_json(report.edges)},
                {"truth_feedback_in_scope", report.truth_feedback_in_scope},
                {"feedback", score_json(report.feedback_score)},
                {"feedback_pairs", edges_json(report.feedback)}};
}

std::string evaluation_table(const EvaluationReport& report) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    auto line = [&](const char* name, const Score& s) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-9s %4zu %4zu %4zu  %9s %6s %6s%s\n", name, s.true_positives,
                      s.false_positives, s.false_negatives, fmt(s.precision).c_str(), fmt(s.recall).c_str(),
                      fmt(s.f1).c_str(), s.no_predictions ? "  (no predictions)" : "");
        return std::string(buf);
    };
    std::string out = "method: " + report.method + ", tested directions: " + std::to_string(report.tested_directions) +
                      ", true edges in scope: " + std::to_string(report.truth_edges_in_scope) + " of " +
                      std::to_string(report.truth_edges_total) + "\n";
    out += "scope       TP   FP   FN  precision recall     F1\n";
    out += line("directed", report.directed);
    out += line("feedback", report.feedback_score);
    for (const auto& e : report.edges) out += "  " + e.from + " -> " + e.to + "  " + std::string(to_string(e.cls)) + "\n";
    for (const auto& e : report.feedback) {
        out += "  " + e.from + " <-> " + e.to + "  " + std::string(to_string(e.cls)) + "\n";
    }
    return out;
}

} // namespace ccmkit
