#include "cli.hpp"

#include "ccmkit/ccm.hpp"
#include "ccmkit/dataset.hpp"
#include "ccmkit/embedding.hpp"
#include "ccmkit/error.hpp"
#include "ccmkit/granger.hpp"
#include "ccmkit/numerics.hpp"
#include "ccmkit/preprocess.hpp"
#include "ccmkit/report.hpp"
#include "ccmkit/svg.hpp"
#include "ccmkit/synthgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

namespace ccmkit::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
    std::vector<std::string> argv;
    std::ostream& out;
    std::ostream& err;
    Clock::time_point start = Clock::now();
};

void warn(Context& ctx, RunManifest& manifest, const std::string& message) {
    ctx.err << "ccmkit: warning: " << message << "\n";
    manifest.log.push_back(message);
}

fs::path sidecar_path(const fs::path& output) {
    fs::path p = output;
    p.replace_extension(".manifest.json");
    return p;
}

RunManifest start_manifest(const Context& ctx, std::string command, const fs::path& output) {
    RunManifest m;
    m.command = std::move(command);
    m.argv = ctx.argv;
    m.sidecar_name = sidecar_path(output).filename().string();
    return m;
}

void finish_manifest(const Context& ctx, RunManifest& manifest, const fs::path& output) {
    manifest.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - ctx.start).count();
    write_text_file(sidecar_path(output), dump_json(sidecar_manifest_json(manifest)));
}

void ensure_parent(const fs::path& path) {
    const auto parent = path.parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) fail(ErrorCode::io, "cannot create directory '" + parent.string() + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::size_t> parse_lib_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        std::size_t v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size() || v == 0) {
            fail(ErrorCode::invalid_argument, "--lib-sizes: '" + item + "' is not a positive integer");
        }
        out.push_back(v);
    }
    if (out.empty()) fail(ErrorCode::invalid_argument, "--lib-sizes: empty list");
    return out;
}

std::string file_token(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += keep ? c : '_';
    }
    return out.empty() ? std::string("_") : out;
}

MultivariateDataset load_input(Context& ctx, RunManifest& manifest, const std::string& path,
                               const std::string& time_column, const std::string& columns) {
    LoadReport report;
    auto data = load_csv(path, time_column, split_list(columns), &report);
    for (const auto& w : report.warnings) warn(ctx, manifest, w);
    if (!report.dropped.empty()) {
        warn(ctx, manifest, "dropped " + std::to_string(report.dropped.size()) + " of " +
                                std::to_string(report.raw_rows) + " rows with missing or unparseable values (first: row " +
                                std::to_string(report.dropped.front().row) + ", " + report.dropped.front().reason + ")");
    }
    manifest.inputs.push_back(digest_file(path));
    return data;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::size_t n = 100000;
    double noise_sd = 0.1;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    std::string mode = "ordered";
    std::string out;
    std::string truth;
};

void cmd_synth(Context& ctx, const SynthArgs& a) {
    SynthConfig cfg;
    cfg.n_observations = a.n;
    cfg.noise_sd = a.noise_sd;
    cfg.burn_in = a.burn_in;
    cfg.rng_seed = a.seed;
    cfg.mode = a.mode == "lagged" ? ContemporaneousMode::all_lagged : ContemporaneousMode::ordered_fallback;
    cfg.validate();

    RunManifest manifest = start_manifest(ctx, "synth", a.out);
    manifest.rng_seed = a.seed;
    manifest.config = {{"n", a.n}, {"noise_sd", a.noise_sd}, {"burn_in", a.burn_in},
                       {"mode", a.mode}, {"out", fs::path(a.out).filename().string()}};
    if (!a.truth.empty()) manifest.config["truth"] = fs::path(a.truth).filename().string();

    const auto data = generate(cfg);
    ensure_parent(a.out);
    write_csv(data, a.out);
    if (!a.truth.empty()) {
        ensure_parent(a.truth);
        Json truth = ground_truth_json(ground_truth());
        write_text_file(a.truth, dump_json(truth));
    }
    finish_manifest(ctx, manifest, a.out);
    ctx.out << "wrote " << a.out << " (" << data.rows() << " rows)\n";
}

// ----------------------------------------------------------- preprocess

struct PreprocessArgs {
    std::string in;
    std::string out;
    std::string report;
    std::string time_column;
    std::string columns;
    std::optional<std::size_t> period;
    std::optional<double> alpha;
    bool standardize = false;
    std::size_t adf_lag = 1;
};

void cmd_preprocess(Context& ctx, const PreprocessArgs& a) {
    RunManifest manifest = start_manifest(ctx, "preprocess", a.out);
    const auto data = load_input(ctx, manifest, a.in, a.time_column, a.columns);
    const fs::path report_path = a.report.empty() ? fs::path(a.out).replace_extension(".stationarity.json")
                                                  : fs::path(a.report);
    manifest.config = {{"in", fs::path(a.in).filename().string()},
                       {"out", fs::path(a.out).filename().string()},
                       {"report", report_path.filename().string()},
                       {"deseasonalize", a.period ? Json(*a.period) : Json(nullptr)},
                       {"smooth", a.alpha ? Json(*a.alpha) : Json(nullptr)},
                       {"standardize", a.standardize},
                       {"adf_lag", a.adf_lag},
                       {"order", Json::array({"deseasonalize", "smooth", "standardize"})}};

    std::vector<TimeSeries> processed;
    for (const auto& s : data.series()) {
        TimeSeries cur = s;
        if (a.period) {
            try {
                cur = deseasonalize(cur, *a.period);
            } catch (const Error& e) {
                fail(e.code(), "column '" + s.name + "': " + e.what());
            }
        }
        if (a.alpha) cur = exp_smooth(cur, *a.alpha);
        if (a.standardize) {
            if (is_constant(cur.values)) {
                warn(ctx, manifest, "column '" + s.name + "' is constant; left unstandardized");
            } else {
                cur = standardize(cur);
            }
        }
        processed.push_back(std::move(cur));
    }
    const auto result = data.with_series(std::move(processed), "preprocess");

    Json columns = Json::array();
    for (const auto& s : result.series()) {
        Json entry{{"name", s.name}};
        try {
            const auto rep = stationarity_report(s, a.adf_lag);
            entry["verdict"] = to_string(rep.verdict);
            entry["adf_statistic"] = rep.adf_statistic;
            entry["adf_critical_5pct"] = kAdfCritical5Pct;
            entry["adf_reject_5pct"] = rep.adf_reject_5pct;
            entry["split_mean_gap"] = rep.split_mean_gap;
            entry["split_variance_ratio"] = rep.split_variance_ratio;
            entry["split_constant_half"] = rep.split_constant_half;
        } catch (const Error& e) {
            entry["verdict"] = "inconclusive";
            entry["error"] = std::string(to_string(e.code())) + ": " + e.what();
        }
        columns.push_back(entry);
    }
    const StationarityThresholds thresholds;
    Json report{{"manifest", embedded_manifest_json(manifest)},
                {"thresholds",
                 {{"adf_critical_5pct", kAdfCritical5Pct},
                  {"max_mean_gap", thresholds.max_mean_gap},
                  {"max_variance_ratio", thresholds.max_variance_ratio}}},
                {"columns", columns}};
    ensure_parent(a.out);
    ensure_parent(report_path);
    write_csv(result, a.out);
    write_text_file(report_path, dump_json(report));
    finish_manifest(ctx, manifest, a.out);
    ctx.out << "wrote " << a.out << " and " << report_path.string() << "\n";
}

// ------------------------------------------------------------------ ccm

struct CcmArgs {
    std::string in;
    std::string out;
    std::string time_column;
    std::string columns;
    std::string target;
    std::string pairs;
    std::string e = "auto";
    int e_max = 10;
    int tau = 1;
    int tp = 1;
    int theiler = 0;
    std::string lib_sizes;
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    unsigned threads = 0;
    std::string curves_dir;
    std::string svg_dir;
};

void cmd_ccm(Context& ctx, const CcmArgs& a) {
    if (a.target.empty() == a.pairs.empty()) {
        fail(ErrorCode::invalid_argument, "ccm: give exactly one of --target NAME or --pairs all");
    }
    if (!a.pairs.empty() && a.pairs != "all") fail(ErrorCode::invalid_argument, "ccm: --pairs accepts only 'all'");

    RunManifest manifest = start_manifest(ctx, "ccm", a.out);
    manifest.rng_seed = a.seed;
    const auto data = load_input(ctx, manifest, a.in, a.time_column, a.columns);
    std::optional<std::string> target;
    if (!a.target.empty()) {
        data.column(a.target); // unknown names fail here with the available list
        target = a.target;
    }

    CcmConfig cfg;
    cfg.embedding.tau = a.tau;
    cfg.embedding.tp = 0;
    cfg.embedding.theiler_window = a.theiler;
    cfg.replicates = a.replicates;
    cfg.significance_level = a.alpha;
    cfg.rng_seed = a.seed;
    cfg.threads = a.threads;
    if (!a.lib_sizes.empty()) cfg.lib_sizes = parse_lib_sizes(a.lib_sizes);

    // Manifolds that will be built: the hub target and every other series.
    std::map<std::string, int> dims;
    Json selections = Json::array();
    const fs::path curves_dir = a.curves_dir.empty()
                                    ? fs::path(a.out).parent_path() / (fs::path(a.out).stem().string() + "_curves")
                                    : fs::path(a.curves_dir);
    std::vector<std::pair<fs::path, std::string>> pending; // files written at the end
    if (a.e == "auto") {
        for (const auto& s : data.series()) {
            const auto sel = select_embedding(s, 1, a.e_max, a.tau, a.tp, a.theiler);
            dims[s.name] = sel.best_dim;
            double best_rho = 0.0;
            for (const auto& p : sel.curve) {
                if (p.dim == sel.best_dim) best_rho = p.rho;
            }
            manifest.log.push_back("selected E=" + std::to_string(sel.best_dim) + " for '" + s.name +
                                   "' (forecast rho " + std::to_string(best_rho) + ")");
            for (const auto& w : sel.warnings) warn(ctx, manifest, w);
            selections.push_back(embedding_selection_json(s.name, sel));
            pending.emplace_back(curves_dir / ("skill_" + file_token(s.name) + ".csv"), skill_curve_csv(sel));
        }
        cfg.embedding.dim = dims.begin()->second;
    } else {
        int e = 0;
        const auto res = std::from_chars(a.e.data(), a.e.data() + a.e.size(), e);
        if (res.ec != std::errc{} || res.ptr != a.e.data() + a.e.size() || e < 1) {
            fail(ErrorCode::invalid_argument, "--e must be 'auto' or a positive integer");
        }
        cfg.embedding.dim = e;
    }

    Json config{{"in", fs::path(a.in).filename().string()},
                {"out", fs::path(a.out).filename().string()},
                {"target", target ? Json(*target) : Json(nullptr)},
                {"pairs", target ? Json(nullptr) : Json("all")},
                {"E", a.e == "auto" ? Json("auto") : Json(cfg.embedding.dim)},
                {"tau", a.tau},
                {"tp_selection", a.tp},
                {"theiler", a.theiler},
                {"replicates", a.replicates},
                {"significance_level", a.alpha},
                {"lib_sizes", cfg.lib_sizes.empty() ? Json("default") : Json(cfg.lib_sizes)}};
    if (a.e == "auto") {
        config["E_max"] = a.e_max;
        config["E_selected"] = dims;
    }
    manifest.config = config;

    const auto scan = ccm_pairwise(data, target, cfg, dims);
    Json results = ccm_results_json(scan, manifest);
    if (a.e == "auto") results["embedding_selection"] = selections;

    for (auto& r : results["results"]) {
        r["curve_file"] = (curves_dir.filename() / (file_token(r["source"].get<std::string>()) + "_to_" +
                                                    file_token(r["target"].get<std::string>()) + ".csv"))
                              .generic_string();
    }
    for (const auto& r : scan.results) {
        pending.emplace_back(curves_dir / (file_token(r.source) + "_to_" + file_token(r.target) + ".csv"), curve_csv(r));
    }
    if (!a.svg_dir.empty()) {
        // Results come in direction pairs (a -> b, then b -> a).
        for (std::size_t i = 0; i + 1 < scan.results.size(); i += 2) {
            std::vector<CurveFile> curves;
            for (std::size_t j = i; j < i + 2; ++j) {
                const auto& r = scan.results[j];
                curves.push_back(parse_curve_csv(curve_csv(r), r.source + " -> " + r.target + " (" + r.source +
                                                                   " from M_" + r.target + ")"));
            }
            const auto& r = scan.results[i];
            pending.emplace_back(fs::path(a.svg_dir) / (file_token(r.source) + "_" + file_token(r.target) + ".svg"),
                                 convergence_svg(curves, "Convergence " + r.source + " <-> " + r.target));
        }
    }

    ensure_parent(a.out);
    for (const auto& [path, text] : pending) {
        ensure_parent(path);
        write_text_file(path, text);
    }
    write_text_file(a.out, dump_json(results));
    finish_manifest(ctx, manifest, a.out);
    ctx.out << "wrote " << a.out << " (" << scan.results.size() << " directed results, "
            << scan.graph.feedback_pairs.size() << " feedback pairs)\n";
}

// -------------------------------------------------------------- granger

struct GrangerArgs {
    std::string in;
    std::string out;
    std::string table;
    std::string time_column;
    std::string columns;
    int max_lag = 12;
    double alpha = kGrangerThreshold;
    unsigned threads = 0;
};

void cmd_granger(Context& ctx, const GrangerArgs& a) {
    if (a.max_lag < 1) fail(ErrorCode::invalid_argument, "--max-lag must be at least 1");
    RunManifest manifest = start_manifest(ctx, "granger", a.out);
    const auto data = load_input(ctx, manifest, a.in, a.time_column, a.columns);
    const fs::path table = a.table.empty() ? fs::path(a.out).replace_extension(".csv") : fs::path(a.table);
    manifest.config = {{"in", fs::path(a.in).filename().string()},
                       {"out", fs::path(a.out).filename().string()},
                       {"table", table.filename().string()},
                       {"max_lag", a.max_lag},
                       {"significance_level", a.alpha},
                       {"edge_rule", "minimum p-value over lags"}};
    const auto scan = granger_pairwise(data, a.max_lag, a.alpha, a.threads);
    for (const auto& r : scan.results) {
        if (r.degenerate) warn(ctx, manifest, "pair " + r.cause + " -> " + r.effect + " is degenerate (singular at every lag)");
    }
    ensure_parent(a.out);
    ensure_parent(table);
    write_text_file(table, granger_table_csv(scan));
    write_text_file(a.out, dump_json(granger_results_json(scan, manifest)));
    finish_manifest(ctx, manifest, a.out);
    ctx.out << "wrote " << a.out << " (" << scan.results.size() << " ordered pairs x " << a.max_lag << " lags)\n";
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string truth;
    std::string results;
    std::string out;
    std::string table;
};

Json parse_json_file(const std::string& path) {
    const auto text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::parse, "'" + path + "' is not valid JSON: " + e.what());
    }
}

void cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
    RunManifest manifest = start_manifest(ctx, "evaluate", a.out);
    const auto truth = ground_truth_from_json(parse_json_file(a.truth));
    const auto results = parse_json_file(a.results);
    manifest.inputs.push_back(digest_file(a.truth));
    manifest.inputs.push_back(digest_file(a.results));
    manifest.config = {{"truth", fs::path(a.truth).filename().string()},
                       {"results", fs::path(a.results).filename().string()},
                       {"out", fs::path(a.out).filename().string()},
                       {"scope", "tested directions only; self-dependencies ignored"}};
    if (results.contains("manifest") && results["manifest"].contains("rng_seed")) {
        const auto& seed = results["manifest"]["rng_seed"];
        if (seed.is_number_unsigned()) manifest.rng_seed = seed.get<std::uint64_t>();
    }
    const auto report = evaluate(truth, results);
    const auto table = evaluation_table(report);
    ensure_parent(a.out);
    write_text_file(a.out, dump_json(evaluation_json(report, manifest)));
    if (!a.table.empty()) {
        ensure_parent(a.table);
        write_text_file(a.table, table);
    }
    finish_manifest(ctx, manifest, a.out);
    ctx.out << table;
}

// ----------------------------------------------------------------- plot

struct PlotArgs {
    std::vector<std::string> curves;
    std::string out;
    std::string title = "Cross-map skill";
};

void cmd_plot(Context& ctx, const PlotArgs& a) {
    std::vector<CurveFile> curves;
    for (const auto& path : a.curves) curves.push_back(parse_curve_csv(read_text_file(path), fs::path(path).stem().string()));
    ensure_parent(a.out);
    write_text_file(a.out, convergence_svg(curves, a.title));
    ctx.out << "wrote " << a.out << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{args, out, err};
    CLI::App app{"ccmkit: convergent cross mapping and Granger causality for multivariate time series", "ccmkit"};
    app.set_version_flag("--version", std::string("ccmkit ") + CCMKIT_VERSION);
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate the 8-variable synthetic system and its ground truth");
    s->add_option("--n", synth.n, "observations")->capture_default_str();
    s->add_option("--noise-sd", synth.noise_sd, "standard deviation of the noise terms")->capture_default_str();
    s->add_option("--burn-in", synth.burn_in, "leading rows discarded (includes the 3 initial rows)")->capture_default_str();
    s->add_option("--seed", synth.seed, "random seed")->capture_default_str();
    s->add_option("--mode", synth.mode, "same-step references: ordered or lagged")
        ->check(CLI::IsMember({"ordered", "lagged"}))
        ->capture_default_str();
    s->add_option("--out", synth.out, "output CSV")->required();
    s->add_option("--truth", synth.truth, "ground-truth JSON");

    PreprocessArgs pre;
    auto* p = app.add_subcommand("preprocess", "deseasonalize, smooth and standardize columns; report stationarity");
    p->add_option("--in", pre.in, "input CSV")->required();
    p->add_option("--out", pre.out, "output CSV")->required();
    p->add_option("--report", pre.report, "stationarity report JSON (default <out>.stationarity.json)");
    p->add_option("--time-column", pre.time_column, "time column (default: first column)");
    p->add_option("--columns", pre.columns, "comma-separated columns to keep");
    p->add_option("--deseasonalize", pre.period, "remove an additive seasonal component of this period");
    p->add_option("--smooth", pre.alpha, "exponential smoothing factor in (0, 1]");
    p->add_flag("--standardize", pre.standardize, "rescale to mean 0, sd 1");
    p->add_option("--adf-lag", pre.adf_lag, "augmentation lags in the ADF test")->capture_default_str();

    CcmArgs ccm;
    auto* c = app.add_subcommand("ccm", "convergent cross mapping scan");
    c->add_option("--in", ccm.in, "input CSV")->required();
    c->add_option("--out", ccm.out, "results JSON")->required();
    c->add_option("--time-column", ccm.time_column, "time column (default: first column)");
    c->add_option("--columns", ccm.columns, "comma-separated columns to use");
    c->add_option("--target", ccm.target, "test every other column against this one");
    c->add_option("--pairs", ccm.pairs, "'all' tests every pair");
    c->add_option("--e", ccm.e, "embedding dimension or 'auto'")->capture_default_str();
    c->add_option("--e-max", ccm.e_max, "largest E tried by --e auto")->capture_default_str();
    c->add_option("--tau", ccm.tau, "lag step")->capture_default_str();
    c->add_option("--tp", ccm.tp, "forecast horizon used by --e auto")->capture_default_str();
    c->add_option("--theiler", ccm.theiler, "Theiler window")->capture_default_str();
    c->add_option("--lib-sizes", ccm.lib_sizes, "comma-separated library sizes (default: 10 geometric steps)");
    c->add_option("--replicates", ccm.replicates, "random libraries per size")->capture_default_str();
    c->add_option("--seed", ccm.seed, "random seed")->capture_default_str();
    c->add_option("--alpha", ccm.alpha, "significance level")->capture_default_str();
    c->add_option("--threads", ccm.threads, "worker threads (0: all cores)")->capture_default_str();
    c->add_option("--curves-dir", ccm.curves_dir, "directory for curve CSVs (default <out stem>_curves)");
    c->add_option("--svg", ccm.svg_dir, "directory for per-pair convergence plots");

    GrangerArgs gr;
    auto* g = app.add_subcommand("granger", "pairwise Granger causality F-tests");
    g->add_option("--in", gr.in, "input CSV")->required();
    g->add_option("--out", gr.out, "results JSON")->required();
    g->add_option("--table", gr.table, "per-lag p-value table CSV (default <out>.csv)");
    g->add_option("--time-column", gr.time_column, "time column (default: first column)");
    g->add_option("--columns", gr.columns, "comma-separated columns to use");
    g->add_option("--max-lag", gr.max_lag, "largest lag tested")->capture_default_str();
    g->add_option("--alpha", gr.alpha, "significance level")->capture_default_str();
    g->add_option("--threads", gr.threads, "worker threads (0: all cores)")->capture_default_str();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "score a results file against a ground-truth graph");
    e->add_option("--truth", ev.truth, "ground-truth JSON")->required();
    e->add_option("--results", ev.results, "results JSON from ccm or granger")->required();
    e->add_option("--out", ev.out, "evaluation report JSON")->required();
    e->add_option("--table", ev.table, "also write the text table here");

    PlotArgs pl;
    auto* pt = app.add_subcommand("plot", "plot convergence curves to SVG");
    pt->add_option("--curves", pl.curves, "curve CSV files")->required()->expected(1, -1);
    pt->add_option("--out", pl.out, "output SVG")->required();
    pt->add_option("--title", pl.title, "plot title")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "ccmkit " << CCMKIT_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& ex) {
        err << "ccmkit: error: invalid_argument: " << ex.what() << "\n";
        return 2;
    }

    try {
        if (*s) cmd_synth(ctx, synth);
        else if (*p) cmd_preprocess(ctx, pre);
        else if (*c) cmd_ccm(ctx, ccm);
        else if (*g) cmd_granger(ctx, gr);
        else if (*e) cmd_evaluate(ctx, ev);
        else if (*pt) cmd_plot(ctx, pl);
    } catch (const Error& ex) {
        err << "ccmkit: error: " << to_string(ex.code()) << ": " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        err << "ccmkit: error: internal: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace ccmkit::cli
