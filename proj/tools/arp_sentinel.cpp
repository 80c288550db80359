#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <vector>

#include <sys/resource.h>

#include "CLI11.hpp"

#include "arpsentinel/config.hpp"
#include "arpsentinel/dataset.hpp"
#include "arpsentinel/drift.hpp"
#include "arpsentinel/ensemble.hpp"
#include "arpsentinel/errors.hpp"
#include "arpsentinel/featurize.hpp"
#include "arpsentinel/metrics.hpp"
#include "arpsentinel/model_io.hpp"
#include "arpsentinel/rng.hpp"
#include "arpsentinel/sim.hpp"
#include "arpsentinel/textio.hpp"

namespace fs = std::filesystem;
using namespace arpsentinel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct StageContext {
    ExperimentConfig cfg;
    fs::path out;
};

StageContext load_context(const std::string& config_path, const std::string& out_override) {
    StageContext ctx;
    ctx.cfg = parse_experiment_config(config_path);
    ctx.out = out_override.empty() ? ctx.cfg.out_dir : fs::path(out_override);
    fs::create_directories(ctx.out);
    return ctx;
}

long peak_rss_kb() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
    return usage.ru_maxrss;
}

// Wall time and memory live in their own file so every other artifact stays
// byte-identical across reruns.
class StageTimer {
public:
    StageTimer(std::string stage, const StageContext& ctx)
        : stage_(std::move(stage)), out_(ctx.out), header_(config_hash_token(ctx.cfg)),
          start_(std::chrono::steady_clock::now()) {}

    ~StageTimer() {
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_).count();
        const fs::path path = out_ / "timing.txt";
        const bool fresh = !fs::exists(path);
        std::ofstream log(path, std::ios::app);
        if (fresh) log << "#arp-timing v1 " << header_ << '\n';
        log << stage_ << " wall_seconds=" << format_double(elapsed)
            << " peak_rss_kb=" << peak_rss_kb() << '\n';
    }

private:
    std::string stage_;
    fs::path out_;
    std::string header_;
    std::chrono::steady_clock::time_point start_;
};

int cmd_simulate(const StageContext& ctx) {
    StageTimer timer("simulate", ctx);
    const auto frames = run_simulation(ctx.cfg.sim);
    write_trace(frames, ctx.out / "trace.tsv", config_hash_token(ctx.cfg));
    std::cout << "simulate: " << frames.size() << " frames -> " << (ctx.out / "trace.tsv").string()
              << '\n';
    return kExitOk;
}

int cmd_featurize(const StageContext& ctx) {
    StageTimer timer("featurize", ctx);
    const auto frames = read_trace(ctx.out / "trace.tsv");
    const auto truth = GroundTruthTable::for_nodes(ctx.cfg.sim.node_count);
    LabeledDataset dataset = extract_features(frames, ctx.cfg.window, truth);
    dataset.provenance = "trace.tsv window=" + std::to_string(ctx.cfg.window.window_ticks) +
                         "/" + std::to_string(ctx.cfg.window.stride_ticks);
    write_dataset(dataset, ctx.out / "dataset.tsv", config_hash_token(ctx.cfg));
    std::cout << "featurize: " << dataset.size() << " examples ("
              << dataset.count(Label::attack) << " attack) -> "
              << (ctx.out / "dataset.tsv").string() << '\n';
    return kExitOk;
}

int cmd_train(const StageContext& ctx) {
    StageTimer timer("train", ctx);
    const LabeledDataset dataset = read_dataset(ctx.out / "dataset.tsv");
    const auto [train, test] =
        split_dataset(dataset, ctx.cfg.train_fraction, derive_seed(ctx.cfg.master_seed, 1));

    const EnsembleModel model = train_ensemble(train, ctx.cfg.ensemble);
    const FeatureHistogram reference =
        build_histogram(normalize_apply(model.scaler, train).features, ctx.cfg.drift.bins);

    write_model(model, ctx.out / "model.txt", &reference, config_hash_token(ctx.cfg));
    write_dataset(test, ctx.out / "test.tsv", config_hash_token(ctx.cfg));
    std::cout << "train: " << model.layer_count() << " layers on " << train.size()
              << " examples, weights";
    for (double w : model.weights) std::cout << ' ' << format_double(w);
    std::cout << " -> " << (ctx.out / "model.txt").string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const StageContext& ctx) {
    StageTimer timer("evaluate", ctx);
    const StoredModel stored = read_model(ctx.out / "model.txt");
    const LabeledDataset test = read_dataset(ctx.out / "test.tsv");
    const EvaluationReport report = evaluate(stored.model, test);

    const auto rows = report.all();
    write_metrics_csv(rows, ctx.out / "metrics.csv", config_hash_token(ctx.cfg));
    write_metrics_jsonl(rows, ctx.out / "metrics.jsonl", ctx.cfg.config_hash);
    for (const MetricsReport& row : rows) {
        std::cout << "evaluate: " << row.subject
                  << " accuracy=" << (row.accuracy ? format_double(*row.accuracy) : "NA")
                  << " fpr=" << (row.fpr ? format_double(*row.fpr) : "NA") << '\n';
    }
    return kExitOk;
}

int cmd_monitor(const StageContext& ctx) {
    StageTimer timer("monitor", ctx);
    const fs::path model_path =
        ctx.cfg.monitor_model.empty() ? ctx.out / "model.txt" : ctx.cfg.monitor_model;
    const fs::path trace_path =
        ctx.cfg.monitor_trace.empty() ? ctx.out / "trace.tsv" : ctx.cfg.monitor_trace;

    const StoredModel stored = read_model(model_path);
    if (!stored.reference) {
        throw DataError("model '" + model_path.string() +
                        "' carries no reference histogram; retrain with this toolkit");
    }
    const auto frames = read_trace(trace_path);
    const auto truth = GroundTruthTable::for_nodes(ctx.cfg.sim.node_count);

    if (ctx.cfg.stream_window_ticks <= 0 ||
        ctx.cfg.stream_window_ticks % ctx.cfg.window.stride_ticks != 0) {
        throw ConfigError("drift.stream_window_ticks must be a positive multiple of "
                          "window.stride_ticks");
    }

    // Slice the trace into consecutive stream windows and featurize each.
    std::vector<LabeledDataset> windows;
    std::size_t begin = 0;
    const std::int64_t span = ctx.cfg.stream_window_ticks;
    const std::int64_t last_tick = frames.empty() ? -1 : frames.back().tick;
    for (std::int64_t start = 0; start <= last_tick; start += span) {
        std::size_t end = begin;
        while (end < frames.size() && frames[end].tick < start + span) ++end;
        windows.push_back(extract_features(
            {frames.begin() + static_cast<std::ptrdiff_t>(begin),
             frames.begin() + static_cast<std::ptrdiff_t>(end)},
            ctx.cfg.window, truth));
        begin = end;
    }

    const MonitorResult result =
        monitor_stream(stored.model, *stored.reference, windows, ctx.cfg.drift);
    write_audit_jsonl(result.records, ctx.out / "audit.jsonl", ctx.cfg.config_hash);
    write_model(result.final_model, ctx.out / "model_final.txt", nullptr,
                config_hash_token(ctx.cfg));

    std::size_t triggers = 0;
    for (const MonitorRecord& r : result.records) triggers += r.drift.triggered ? 1 : 0;
    std::cout << "monitor: " << windows.size() << " windows, " << triggers << " triggers, "
              << result.model_versions << " model version(s) -> "
              << (ctx.out / "audit.jsonl").string() << '\n';
    return kExitOk;
}

// Aggregates every metrics.csv under the output directory (one run per
// subdirectory) plus an optional external.csv with the same columns.
int cmd_report(const StageContext& ctx) {
    StageTimer timer("report", ctx);

    std::map<std::string, std::vector<MetricsReport>> runs;
    for (const auto& entry : fs::recursive_directory_iterator(ctx.out)) {
        if (!entry.is_regular_file() || entry.path().filename() != "metrics.csv") continue;
        const fs::path rel = fs::relative(entry.path().parent_path(), ctx.out);
        const std::string run = rel == "." ? ctx.cfg.label : rel.generic_string();
        runs[run] = read_metrics_csv(entry.path());
    }
    const fs::path external = ctx.out / "external.csv";
    if (fs::exists(external)) {
        runs["external"] = read_metrics_csv(external);
    }
    if (runs.empty()) {
        throw DataError("no metrics.csv found under '" + ctx.out.string() + "'");
    }

    auto opt_cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("NA");
    };

    std::ofstream combined(ctx.out / "report.csv", std::ios::binary);
    combined << "#arp-report v1 " << config_hash_token(ctx.cfg) << '\n';
    combined << "run,subject,tp,fp,fn,tn,accuracy,precision,recall,f1,fpr\n";
    for (const auto& [run, rows] : runs) {
        for (const MetricsReport& r : rows) {
            combined << run << ',' << r.subject << ',' << r.matrix.tp << ',' << r.matrix.fp << ','
                     << r.matrix.fn << ',' << r.matrix.tn << ',' << opt_cell(r.accuracy) << ','
                     << opt_cell(r.precision) << ',' << opt_cell(r.recall) << ','
                     << opt_cell(r.f1) << ',' << opt_cell(r.fpr) << '\n';
        }
    }

    // Plot-ready single-metric tables mirroring the evaluation categories.
    const std::vector<std::pair<std::string, std::function<std::string(const MetricsReport&)>>>
        tables = {
            {"accuracy", [&](const MetricsReport& r) { return opt_cell(r.accuracy); }},
            {"f1", [&](const MetricsReport& r) { return opt_cell(r.f1); }},
            {"fpr", [&](const MetricsReport& r) { return opt_cell(r.fpr); }},
        };
    for (const auto& [metric, getter] : tables) {
        std::ofstream out(ctx.out / (metric + ".csv"), std::ios::binary);
        out << "run,subject," << metric << '\n';
        for (const auto& [run, rows] : runs) {
            for (const MetricsReport& r : rows) {
                out << run << ',' << r.subject << ',' << getter(r) << '\n';
            }
        }
    }
    {
        std::ofstream out(ctx.out / "precision_recall.csv", std::ios::binary);
        out << "run,subject,precision,recall\n";
        for (const auto& [run, rows] : runs) {
            for (const MetricsReport& r : rows) {
                out << run << ',' << r.subject << ',' << opt_cell(r.precision) << ','
                    << opt_cell(r.recall) << '\n';
            }
        }
    }
    {
        // Resampling view: ensemble attack recall per run; compare runs with
        // smote.enabled on/off.
        std::ofstream out(ctx.out / "resampling.csv", std::ios::binary);
        out << "run,recall\n";
        for (const auto& [run, rows] : runs) {
            for (const MetricsReport& r : rows) {
                if (r.subject == "ensemble") {
                    out << run << ',' << opt_cell(r.recall) << '\n';
                }
            }
        }
    }
    {
        // Wall-time rows from every timing.txt; kept apart from the
        // deterministic tables.
        std::ofstream out(ctx.out / "efficiency.csv", std::ios::binary);
        out << "run,stage,wall_seconds,peak_rss_kb\n";
        for (const auto& entry : fs::recursive_directory_iterator(ctx.out)) {
            if (!entry.is_regular_file() || entry.path().filename() != "timing.txt") continue;
            const fs::path rel = fs::relative(entry.path().parent_path(), ctx.out);
            const std::string run = rel == "." ? ctx.cfg.label : rel.generic_string();
            std::ifstream in(entry.path());
            std::string line;
            while (std::getline(in, line)) {
                auto fields = split(std::string_view(line), ' ');
                if (fields.size() != 3) continue;
                std::string secs(fields[1]), rss(fields[2]);
                if (auto eq = secs.find('='); eq != std::string::npos) secs = secs.substr(eq + 1);
                if (auto eq = rss.find('='); eq != std::string::npos) rss = rss.substr(eq + 1);
                out << run << ',' << fields[0] << ',' << secs << ',' << rss << '\n';
            }
        }
    }

    std::cout << "report: " << runs.size() << " run(s) -> " << (ctx.out / "report.csv").string()
              << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARP spoofing detection toolkit: simulate, featurize, train, evaluate, "
                 "monitor, report"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;

    std::map<std::string, std::function<int(const StageContext&)>> handlers = {
        {"simulate", cmd_simulate}, {"featurize", cmd_featurize}, {"train", cmd_train},
        {"evaluate", cmd_evaluate}, {"monitor", cmd_monitor},     {"report", cmd_report},
    };
    const std::map<std::string, std::string> descriptions = {
        {"simulate", "generate a labeled ARP trace from the config"},
        {"featurize", "turn a trace into a windowed labeled dataset"},
        {"train", "split the dataset and train the weighted ensemble"},
        {"evaluate", "score the held-out split and emit metrics"},
        {"monitor", "stream a trace through drift detection and retraining"},
        {"report", "aggregate metrics across runs into plot-ready tables"},
    };
    for (auto& [name, handler] : handlers) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_override, "output directory (defaults to experiment.out_dir)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        const StageContext ctx = load_context(config_path, out_override);
        for (auto& [name, handler] : handlers) {
            if (app.get_subcommand(name)->parsed()) return handler(ctx);
        }
        std::cerr << "error: no subcommand selected\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
