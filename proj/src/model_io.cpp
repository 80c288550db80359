#include "arpsentinel/model_io.hpp"

#include <fstream>
#include <optional>
#include <span>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/textio.hpp"

namespace arpsentinel {

namespace {

void write_doubles(std::ostream& out, std::string_view key, std::span<const double> values) {
    out << key;
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
}

void write_tree(std::ostream& out, const DecisionTreeModel& tree) {
    out << "tree max_depth=" << tree.max_depth << " min_leaf=" << tree.min_leaf
        << " dim=" << tree.dim << " nodes=" << tree.nodes.size() << '\n';
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf()) {
            out << "leaf " << label_name(n.leaf_label) << ' ' << n.count_benign << ' '
                << n.count_attack << '\n';
        } else {
            out << "split " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left
                << ' ' << n.right << ' ' << n.count_benign << ' ' << n.count_attack << '\n';
        }
    }
}

class LineReader {
public:
    LineReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    std::string next(std::string_view expectation) {
        auto line = try_next();
        if (!line) {
            throw DataError(where() + "unexpected end of file, expected " +
                            std::string(expectation));
        }
        return *line;
    }

    std::optional<std::string> try_next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty()) return line;
        }
        return std::nullopt;
    }

    std::string where() const { return path_ + ":" + std::to_string(line_no_) + ": "; }

private:
    std::istream& in_;
    std::string path_;
    std::size_t line_no_ = 0;
};

// Parses "key=value" tokens from a section header line.
std::string header_value(const std::vector<std::string_view>& tokens, std::string_view key,
                         const std::string& where) {
    const std::string prefix = std::string(key) + "=";
    for (auto token : tokens) {
        if (token.starts_with(prefix)) return std::string(token.substr(prefix.size()));
    }
    throw DataError(where + "missing '" + std::string(key) + "=' in section header");
}

std::vector<double> read_doubles(const std::string& line, std::string_view key,
                                 std::size_t expected, const std::string& where) {
    auto tokens = split(std::string_view(line), ' ');
    if (tokens.empty() || tokens[0] != key) {
        throw DataError(where + "expected '" + std::string(key) + "' line");
    }
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].empty()) continue;
        values.push_back(parse_double(tokens[i], key));
    }
    if (values.size() != expected) {
        throw DataError(where + "expected " + std::to_string(expected) + " values for '" +
                        std::string(key) + "', got " + std::to_string(values.size()));
    }
    return values;
}

DecisionTreeModel read_tree(LineReader& reader) {
    const std::string header = reader.next("tree section header");
    auto tokens = split(std::string_view(header), ' ');
    if (tokens.empty() || tokens[0] != "tree") {
        throw DataError(reader.where() + "expected 'tree' section header");
    }
    DecisionTreeModel tree;
    tree.max_depth = parse_int<std::uint32_t>(header_value(tokens, "max_depth", reader.where()),
                                              "max_depth");
    tree.min_leaf =
        parse_int<std::uint32_t>(header_value(tokens, "min_leaf", reader.where()), "min_leaf");
    tree.dim = parse_int<std::size_t>(header_value(tokens, "dim", reader.where()), "dim");
    const auto node_count =
        parse_int<std::size_t>(header_value(tokens, "nodes", reader.where()), "nodes");

    tree.nodes.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        const std::string line = reader.next("tree node");
        auto fields = split(std::string_view(line), ' ');
        TreeNode node;
        if (!fields.empty() && fields[0] == "leaf") {
            if (fields.size() != 4) throw DataError(reader.where() + "malformed leaf node");
            node.leaf_label = parse_label(fields[1]);
            node.count_benign = parse_int<std::uint64_t>(fields[2], "count_benign");
            node.count_attack = parse_int<std::uint64_t>(fields[3], "count_attack");
        } else if (!fields.empty() && fields[0] == "split") {
            if (fields.size() != 7) throw DataError(reader.where() + "malformed split node");
            node.feature = parse_int<std::int32_t>(fields[1], "feature");
            node.threshold = parse_double(fields[2], "threshold");
            node.left = parse_int<std::int32_t>(fields[3], "left");
            node.right = parse_int<std::int32_t>(fields[4], "right");
            node.count_benign = parse_int<std::uint64_t>(fields[5], "count_benign");
            node.count_attack = parse_int<std::uint64_t>(fields[6], "count_attack");
            if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= tree.dim) {
                throw DataError(reader.where() + "split feature index out of range");
            }
        } else {
            throw DataError(reader.where() + "expected 'leaf' or 'split' node");
        }
        tree.nodes.push_back(node);
    }
    for (const TreeNode& node : tree.nodes) {
        if (node.is_leaf()) continue;
        const auto size = static_cast<std::int32_t>(tree.nodes.size());
        if (node.left < 0 || node.left >= size || node.right < 0 || node.right >= size) {
            throw DataError(reader.where() + "tree child index out of range");
        }
    }
    return tree;
}

}  // namespace

void write_model(const EnsembleModel& model, const std::filesystem::path& path,
                 const FeatureHistogram* reference, std::string_view header_extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");

    out << "#arp-model v1";
    if (!header_extra.empty()) out << ' ' << header_extra;
    out << '\n';
    out << "dim " << model.dim << '\n';
    out << "layers " << model.layer_count() << '\n';
    write_doubles(out, "weights", model.weights);
    write_doubles(out, "accuracies", model.validation_accuracies);
    write_doubles(out, "scaler.min", model.scaler.min);
    write_doubles(out, "scaler.max", model.scaler.max);

    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const LayerModel& layer = model.layers[l];
        out << "layer " << l << ' ' << layer_kind_name(layer_kind(layer)) << '\n';
        switch (layer_kind(layer)) {
            case LayerKind::tree:
                write_tree(out, std::get<DecisionTreeModel>(layer));
                break;
            case LayerKind::forest: {
                const auto& forest = std::get<RandomForestModel>(layer);
                out << "forest trees=" << forest.trees.size() << " dim=" << forest.dim << '\n';
                for (const DecisionTreeModel& tree : forest.trees) write_tree(out, tree);
                break;
            }
            case LayerKind::mlp: {
                const auto& mlp = std::get<MlpModel>(layer);
                out << "mlp dim=" << mlp.dim << " hidden=" << mlp.hidden << '\n';
                write_doubles(out, "w1", mlp.w1);
                write_doubles(out, "b1", mlp.b1);
                write_doubles(out, "w2", mlp.w2);
                write_doubles(out, "b2", std::span<const double>(&mlp.b2, 1));
                break;
            }
        }
    }

    if (reference != nullptr && !reference->empty()) {
        out << "reference bins=" << reference->bins << " dim=" << reference->dim()
            << " samples=" << reference->sample_count << '\n';
        for (std::size_t j = 0; j < reference->dim(); ++j) {
            write_doubles(out, "f" + std::to_string(j), reference->mass[j]);
        }
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

StoredModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");

    LineReader reader(in, path.string());
    if (!reader.next("header").starts_with("#arp-model v1")) {
        throw DataError(path.string() + ":1: expected #arp-model v1 header");
    }

    StoredModel stored;
    EnsembleModel& model = stored.model;

    auto keyed_line = [&](std::string_view key) {
        const std::string line = reader.next(key);
        auto tokens = split(std::string_view(line), ' ');
        if (tokens.size() != 2 || tokens[0] != key) {
            throw DataError(reader.where() + "expected '" + std::string(key) + " <value>'");
        }
        return std::string(tokens[1]);
    };

    model.dim = parse_int<std::size_t>(keyed_line("dim"), "dim");
    const auto layer_count = parse_int<std::size_t>(keyed_line("layers"), "layers");
    if (layer_count == 0) throw DataError(path.string() + ": model has no layers");

    model.weights = read_doubles(reader.next("weights"), "weights", layer_count, reader.where());
    model.validation_accuracies =
        read_doubles(reader.next("accuracies"), "accuracies", layer_count, reader.where());
    model.scaler.min =
        read_doubles(reader.next("scaler.min"), "scaler.min", model.dim, reader.where());
    model.scaler.max =
        read_doubles(reader.next("scaler.max"), "scaler.max", model.dim, reader.where());

    for (std::size_t l = 0; l < layer_count; ++l) {
        const std::string line = reader.next("layer section");
        auto tokens = split(std::string_view(line), ' ');
        if (tokens.size() != 3 || tokens[0] != "layer") {
            throw DataError(reader.where() + "expected 'layer <index> <kind>'");
        }
        if (parse_int<std::size_t>(tokens[1], "layer index") != l) {
            throw DataError(reader.where() + "layer sections out of order");
        }
        switch (parse_layer_kind(tokens[2])) {
            case LayerKind::tree:
                model.layers.emplace_back(read_tree(reader));
                break;
            case LayerKind::forest: {
                const std::string header = reader.next("forest section header");
                auto htokens = split(std::string_view(header), ' ');
                if (htokens.empty() || htokens[0] != "forest") {
                    throw DataError(reader.where() + "expected 'forest' section header");
                }
                RandomForestModel forest;
                forest.dim = parse_int<std::size_t>(header_value(htokens, "dim", reader.where()),
                                                    "dim");
                const auto trees = parse_int<std::size_t>(
                    header_value(htokens, "trees", reader.where()), "trees");
                if (trees == 0) throw DataError(reader.where() + "forest has no trees");
                for (std::size_t t = 0; t < trees; ++t) forest.trees.push_back(read_tree(reader));
                model.layers.emplace_back(std::move(forest));
                break;
            }
            case LayerKind::mlp: {
                const std::string header = reader.next("mlp section header");
                auto htokens = split(std::string_view(header), ' ');
                if (htokens.empty() || htokens[0] != "mlp") {
                    throw DataError(reader.where() + "expected 'mlp' section header");
                }
                MlpModel mlp;
                mlp.dim =
                    parse_int<std::size_t>(header_value(htokens, "dim", reader.where()), "dim");
                mlp.hidden = parse_int<std::uint32_t>(
                    header_value(htokens, "hidden", reader.where()), "hidden");
                mlp.w1 = read_doubles(reader.next("w1"), "w1",
                                      static_cast<std::size_t>(mlp.hidden) * mlp.dim,
                                      reader.where());
                mlp.b1 = read_doubles(reader.next("b1"), "b1", mlp.hidden, reader.where());
                mlp.w2 = read_doubles(reader.next("w2"), "w2", mlp.hidden, reader.where());
                mlp.b2 = read_doubles(reader.next("b2"), "b2", 1, reader.where())[0];
                model.layers.emplace_back(std::move(mlp));
                break;
            }
        }
    }

    // Optional trailing reference-histogram section.
    if (auto line = reader.try_next()) {
        auto tokens = split(std::string_view(*line), ' ');
        if (tokens.empty() || tokens[0] != "reference") {
            throw DataError(reader.where() + "unexpected trailing content '" + *line + "'");
        }
        FeatureHistogram reference;
        reference.bins =
            parse_int<std::size_t>(header_value(tokens, "bins", reader.where()), "bins");
        const auto dim = parse_int<std::size_t>(header_value(tokens, "dim", reader.where()), "dim");
        reference.sample_count =
            parse_int<std::uint64_t>(header_value(tokens, "samples", reader.where()), "samples");
        for (std::size_t j = 0; j < dim; ++j) {
            const std::string key = "f" + std::to_string(j);
            reference.mass.push_back(
                read_doubles(reader.next(key), key, reference.bins, reader.where()));
        }
        stored.reference = std::move(reference);
    }
    return stored;
}

}  // namespace arpsentinel
