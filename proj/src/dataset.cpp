#include "arpsentinel/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/textio.hpp"

namespace arpsentinel {

std::size_t LabeledDataset::count(Label l) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

void LabeledDataset::push_back(FeatureVector v, Label l) {
    features.push_back(std::move(v));
    labels.push_back(l);
}

void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path,
                   std::string_view header_extra) {
    if (dataset.features.size() != dataset.labels.size()) {
        throw InternalError("dataset features/labels length mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");

    out << "#arp-dataset v1 d=" << dataset.dim() << " features=";
    for (std::size_t i = 0; i < dataset.feature_names.size(); ++i) {
        const std::string& name = dataset.feature_names[i];
        if (name.find(',') != std::string::npos || name.find(' ') != std::string::npos) {
            throw DataError("feature name '" + name + "' may not contain ',' or spaces");
        }
        if (i > 0) out << ',';
        out << name;
    }
    if (!header_extra.empty()) out << ' ' << header_extra;
    out << '\n';

    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << label_name(dataset.labels[i]) << '\t';
        const FeatureVector& v = dataset.features[i];
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j > 0) out << ',';
            out << format_double(v[j]);
        }
        out << '\n';
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#arp-dataset v1")) {
        throw DataError(path.string() + ":1: expected #arp-dataset v1 header");
    }

    LabeledDataset dataset;
    std::size_t dim = 0;
    bool have_dim = false;
    for (auto token : split(std::string_view(line), ' ')) {
        if (token.starts_with("d=")) {
            dim = parse_int<std::size_t>(token.substr(2), "dataset dimension");
            have_dim = true;
        } else if (token.starts_with("features=")) {
            for (auto name : split(token.substr(9), ',')) {
                if (!name.empty()) dataset.feature_names.emplace_back(name);
            }
        }
    }
    if (!have_dim) throw DataError(path.string() + ":1: header lacks d=<dim>");
    if (!dataset.feature_names.empty() && dataset.feature_names.size() != dim) {
        throw DataError(path.string() + ":1: header names " +
                        std::to_string(dataset.feature_names.size()) + " features but d=" +
                        std::to_string(dim));
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        auto fields = split(std::string_view(line), '\t');
        if (fields.size() != 2) {
            throw DataError(where + "expected label<TAB>values, got " +
                            std::to_string(fields.size()) + " fields");
        }
        try {
            Label label = parse_label(fields[0]);
            FeatureVector v;
            v.reserve(dim);
            for (auto value : split(fields[1], ',')) {
                v.push_back(parse_double(value, "feature value"));
            }
            if (v.size() != dim) {
                throw DataError("expected " + std::to_string(dim) + " values, got " +
                                std::to_string(v.size()));
            }
            dataset.push_back(std::move(v), label);
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return dataset;
}

}  // namespace arpsentinel
