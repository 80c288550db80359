#include "arpsentinel/metrics.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/textio.hpp"

namespace arpsentinel {

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
    if (predicted.size() != actual.size()) {
        throw DataError("prediction/label length mismatch: " + std::to_string(predicted.size()) +
                        " vs " + std::to_string(actual.size()));
    }
    if (predicted.empty()) throw DataError("cannot build a confusion matrix from no examples");

    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool pred_attack = predicted[i] == Label::attack;
        const bool is_attack = actual[i] == Label::attack;
        if (pred_attack && is_attack) ++m.tp;
        else if (pred_attack && !is_attack) ++m.fp;
        else if (!pred_attack && is_attack) ++m.fn;
        else ++m.tn;
    }
    return m;
}

MetricsReport derive(const ConfusionMatrix& m, std::string subject) {
    if (m.total() == 0) throw DataError("cannot derive metrics from an empty confusion matrix");

    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };

    MetricsReport r;
    r.subject = std::move(subject);
    r.matrix = m;
    r.accuracy = ratio(m.tp + m.tn, m.total());
    r.precision = ratio(m.tp, m.tp + m.fp);
    r.recall = ratio(m.tp, m.tp + m.fn);
    r.fpr = ratio(m.fp, m.fp + m.tn);
    if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    }
    return r;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
}

std::optional<double> parse_opt_field(std::string_view s, std::string_view what) {
    if (s == "NA") return std::nullopt;
    return parse_double(s, what);
}

}  // namespace

void write_metrics_csv(std::span<const MetricsReport> reports, const std::filesystem::path& path,
                       std::string_view header_extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << "#arp-metrics v1";
    if (!header_extra.empty()) out << ' ' << header_extra;
    out << '\n';
    out << "subject,tp,fp,fn,tn,accuracy,precision,recall,f1,fpr\n";
    for (const MetricsReport& r : reports) {
        out << r.subject << ',' << r.matrix.tp << ',' << r.matrix.fp << ',' << r.matrix.fn << ','
            << r.matrix.tn << ',' << opt_field(r.accuracy) << ',' << opt_field(r.precision) << ','
            << opt_field(r.recall) << ',' << opt_field(r.f1) << ',' << opt_field(r.fpr) << '\n';
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<MetricsReport> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#arp-metrics v1")) {
        throw DataError(path.string() + ":1: expected #arp-metrics v1 header");
    }
    if (!std::getline(in, line) || !line.starts_with("subject,")) {
        throw DataError(path.string() + ":2: expected CSV column header");
    }

    std::vector<MetricsReport> reports;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        auto fields = split(std::string_view(line), ',');
        if (fields.size() != 10) {
            throw DataError(where + "expected 10 columns, got " + std::to_string(fields.size()));
        }
        try {
            MetricsReport r;
            r.subject = std::string(fields[0]);
            r.matrix.tp = parse_int<std::uint64_t>(fields[1], "tp");
            r.matrix.fp = parse_int<std::uint64_t>(fields[2], "fp");
            r.matrix.fn = parse_int<std::uint64_t>(fields[3], "fn");
            r.matrix.tn = parse_int<std::uint64_t>(fields[4], "tn");
            r.accuracy = parse_opt_field(fields[5], "accuracy");
            r.precision = parse_opt_field(fields[6], "precision");
            r.recall = parse_opt_field(fields[7], "recall");
            r.f1 = parse_opt_field(fields[8], "f1");
            r.fpr = parse_opt_field(fields[9], "fpr");
            reports.push_back(std::move(r));
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return reports;
}

std::string metrics_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["subject"] = r.subject;
    j["tp"] = r.matrix.tp;
    j["fp"] = r.matrix.fp;
    j["fn"] = r.matrix.fn;
    j["tn"] = r.matrix.tn;
    auto set = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
        else j[key] = nullptr;
    };
    set("accuracy", r.accuracy);
    set("precision", r.precision);
    set("recall", r.recall);
    set("f1", r.f1);
    set("fpr", r.fpr);
    return j.dump();
}

void write_metrics_jsonl(std::span<const MetricsReport> reports,
                         const std::filesystem::path& path, std::string_view config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    if (!config_hash.empty()) {
        nlohmann::json header;
        header["format"] = "arp-metrics";
        header["version"] = 1;
        header["config"] = config_hash;
        out << header.dump() << '\n';
    }
    for (const MetricsReport& r : reports) {
        out << metrics_to_json(r) << '\n';
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace arpsentinel
