#pragma once

#include "ccmkit/ccm.hpp"
#include "ccmkit/embedding.hpp"
#include "ccmkit/granger.hpp"
#include "ccmkit/synthgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccmkit {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct InputDigest {
    std::string name; // file name without directories
    std::string fnv1a64_hex;
};

InputDigest digest_file(const std::filesystem::path& path);

/// Provenance of one command. The part embedded in result files excludes
/// the command line and the wall-clock, so identical invocations from
/// different directories produce identical results; the sidecar manifest
/// carries both.
struct RunManifest {
    std::string tool_version = CCMKIT_VERSION;
    std::string command;
    std::vector<std::string> argv;
    Json config = Json::object(); // every option after defaulting
    std::optional<std::uint64_t> rng_seed;
    std::vector<InputDigest> inputs;
    std::string sidecar_name;     // file name of the sidecar manifest
    double wall_clock_seconds = 0.0;
    std::vector<std::string> log; // warnings and selection notes
};

Json embedded_manifest_json(const RunManifest& manifest);
Json sidecar_manifest_json(const RunManifest& manifest);

/// Serialized JSON text (2-space indent, trailing newline).
std::string dump_json(const Json& value);

Json ccm_results_json(const CcmScan& scan, const RunManifest& manifest);
Json granger_results_json(const GrangerScan& scan, const RunManifest& manifest);

Json ground_truth_json(const GroundTruthGraph& truth);
GroundTruthGraph ground_truth_from_json(const Json& value);

Json embedding_selection_json(const std::string& series, const EmbeddingSelection& selection);

struct CurveRow {
    double lib_size = 0.0;
    double rho_mean = 0.0;
    double rho_sd = 0.0;
};

struct CurveFile {
    std::string label;
    std::vector<CurveRow> rows;
};

std::string curve_csv(const CcmResult& result);
/// Parses lib_size,rho_mean,rho_sd; `label` names the curve in plots.
CurveFile parse_curve_csv(std::string_view text, std::string label);
std::string skill_curve_csv(const EmbeddingSelection& selection);
/// Granger per-lag table: one row per ordered pair, one p-value column per lag.
std::string granger_table_csv(const GrangerScan& scan);

enum class EdgeClass { true_positive, false_positive, false_negative };
std::string_view to_string(EdgeClass c) noexcept;

struct ClassifiedEdge {
    std::string from;
    std::string to;
    EdgeClass cls;
};

struct Score {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 1.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool no_predictions = false; // precision set to 1 by the empty-set convention
    bool no_truth = false;       // recall set to 0: nothing in scope to find
};

/// Scoring covers only directions present in the results (a hub scan is
/// not charged for pairs it never tested); self-dependencies never count.
struct EvaluationReport {
    std::string method;
    std::size_t tested_directions = 0;
    std::size_t truth_edges_in_scope = 0;
    std::size_t truth_edges_total = 0;
    std::vector<ClassifiedEdge> edges;
    Score directed;
    std::size_t truth_feedback_in_scope = 0;
    std::vector<ClassifiedEdge> feedback;
    Score feedback_score;
};

EvaluationReport evaluate(const GroundTruthGraph& truth, const Json& results);
Json evaluation_json(const EvaluationReport& report, const RunManifest& manifest);
std::string evaluation_table(const EvaluationReport& report);

} // namespace ccmkit
