#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "arpsentinel/drift.hpp"
#include "arpsentinel/ensemble.hpp"

namespace arpsentinel {

struct StoredModel {
    EnsembleModel model;
    std::optional<FeatureHistogram> reference;  // drift baseline, if saved
};

// Self-describing text format, versioned `#arp-model v1`: scaler and weight
// sections followed by one keyed section per layer, plus an optional
// reference-histogram section. Numbers round-trip bit-exactly.
void write_model(const EnsembleModel& model, const std::filesystem::path& path,
                 const FeatureHistogram* reference = nullptr,
                 std::string_view header_extra = {});

StoredModel read_model(const std::filesystem::path& path);

}  // namespace arpsentinel
