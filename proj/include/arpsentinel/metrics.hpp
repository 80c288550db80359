#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arpsentinel/sim.hpp"

namespace arpsentinel {

// Positive class is attack throughout.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

// Derived scalar metrics. A metric whose denominator is zero is carried as
// nullopt rather than 0 or NaN.
struct MetricsReport {
    std::string subject;  // layer name or "ensemble"
    ConfusionMatrix matrix;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fpr;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);
MetricsReport derive(const ConfusionMatrix& matrix, std::string subject = {});

// CSV columns, fixed: subject, tp, fp, fn, tn, accuracy, precision, recall,
// f1, fpr. Undefined metrics serialize as NA. First line is a
// `#arp-metrics v1` header.
void write_metrics_csv(std::span<const MetricsReport> reports, const std::filesystem::path& path,
                       std::string_view header_extra = {});
std::vector<MetricsReport> read_metrics_csv(const std::filesystem::path& path);

std::string metrics_to_json(const MetricsReport& report);

// One JSON object per report. A non-empty config hash prepends a
// `{"format":"arp-metrics","version":1,"config":...}` header object.
void write_metrics_jsonl(std::span<const MetricsReport> reports,
                         const std::filesystem::path& path,
                         std::string_view config_hash = {});

}  // namespace arpsentinel
