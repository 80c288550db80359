#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "arpsentinel/dataset.hpp"
#include "arpsentinel/errors.hpp"
#include "arpsentinel/featurize.hpp"
#include "arpsentinel/sim.hpp"

using namespace arpsentinel;
namespace fs = std::filesystem;

namespace {

ArpFrame benign_request(const GroundTruthTable& truth, std::int64_t tick, std::uint32_t src,
                        std::uint32_t dst) {
    return {tick, src, ArpOp::request, truth.ip_of(src), truth.mac_of(src), truth.ip_of(dst), 0,
            Label::benign};
}

ArpFrame benign_reply(const GroundTruthTable& truth, std::int64_t tick, std::uint32_t src,
                      std::uint32_t dst) {
    return {tick, src, ArpOp::reply, truth.ip_of(src), truth.mac_of(src), truth.ip_of(dst),
            truth.mac_of(dst), Label::benign};
}

ArpFrame forged_reply(const GroundTruthTable& truth, std::int64_t tick, std::uint32_t attacker,
                      std::uint32_t victim) {
    return {tick, attacker, ArpOp::gratuitous_reply, truth.ip_of(victim), truth.mac_of(attacker),
            truth.ip_of(victim), 0xFFFFFFFFFFFF, Label::attack};
}

LabeledDataset tiny_dataset(std::size_t benign, std::size_t attack) {
    LabeledDataset d;
    d.feature_names = {"x", "y"};
    for (std::size_t i = 0; i < benign; ++i) {
        d.push_back({static_cast<double>(i), 0.0}, Label::benign);
    }
    for (std::size_t i = 0; i < attack; ++i) {
        d.push_back({static_cast<double>(i), 1.0}, Label::attack);
    }
    return d;
}

}  // namespace

TEST_CASE("a single benign request produces the documented feature vector") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 50};
    const auto dataset = extract_features({benign_request(truth, 10, 1, 0)}, spec, truth);

    REQUIRE(dataset.size() == 1);
    CHECK(dataset.labels[0] == Label::benign);
    const FeatureVector expected = {0, 1, 0, 0, 1, 0, 0, 1.0 / 100.0};
    CHECK(dataset.features[0] == expected);
}

TEST_CASE("an empty stream produces an empty dataset, not an error") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const auto dataset = extract_features({}, WindowSpec{}, truth);
    CHECK(dataset.size() == 0);
    CHECK(dataset.feature_names.size() == kFeatureCount);
}

TEST_CASE("one forged reply taints its window") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 100};
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 1, 1, 0),
        benign_reply(truth, 2, 0, 1),
        forged_reply(truth, 3, 1, 2),
    };
    const auto dataset = extract_features(frames, spec, truth);

    REQUIRE(dataset.size() == 2);  // sources 0 and 1
    CHECK(dataset.labels[0] == Label::benign);
    CHECK(dataset.labels[1] == Label::attack);
}

TEST_CASE("unordered frames violate the precondition") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 10, 1, 0),
        benign_request(truth, 5, 2, 0),
    };
    CHECK_THROWS_AS(extract_features(frames, WindowSpec{}, truth), DataError);
}

TEST_CASE("frames with corrupted labels are rejected") {
    const auto truth = GroundTruthTable::for_nodes(4);
    ArpFrame f = benign_request(truth, 1, 1, 0);
    f.label = Label::attack;
    CHECK_THROWS_AS(extract_features({f}, WindowSpec{}, truth), DataError);
}

TEST_CASE("feature definitions: unmatched replies and gratuitous counts") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 100};
    // Node 0 asks for node 1; node 1 answers (matched); node 2 replies
    // unsolicited (unmatched); node 3 forges node 2's binding, which nobody
    // asked about either.
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 1, 0, 1),
        benign_reply(truth, 2, 1, 0),
        benign_reply(truth, 3, 2, 0),
        forged_reply(truth, 4, 3, 2),
    };
    const auto dataset = extract_features(frames, spec, truth);
    REQUIRE(dataset.size() == 4);

    // Ordering is by source node inside the single window.
    const auto& matched = dataset.features[1];    // node 1: reply answering a request
    const auto& unsolicited = dataset.features[2];  // node 2
    const auto& forged = dataset.features[3];     // node 3
    CHECK(matched[0] == 1);
    CHECK(matched[2] == 0);
    CHECK(unsolicited[0] == 1);
    CHECK(unsolicited[2] == 1);
    CHECK(forged[2] == 1);   // gratuitous replies are unsolicited by definition
    CHECK(forged[3] == 1);
    CHECK(dataset.labels[3] == Label::attack);
}

TEST_CASE("binding changes count contradictions against the previous window") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 100};
    // Window 0: victim 2 announces its own binding. Window 1: attacker 1
    // claims victim 2's ip with its own mac.
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 10, 2, 0),
        forged_reply(truth, 110, 1, 2),
        benign_request(truth, 120, 2, 0),
    };
    const auto dataset = extract_features(frames, spec, truth);
    REQUIRE(dataset.size() == 3);

    // Window 1, source 1 (attacker): announces ip of node 2 with a mac that
    // contradicts window 0's binding.
    CHECK(dataset.features[1][5] == 1);
    // Window 1, source 2 (victim): its own announcement matches window 0.
    CHECK(dataset.features[2][5] == 0);
}

TEST_CASE("mean inter-arrival ticks averages successive gaps") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 100};
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 0, 1, 0),
        benign_request(truth, 4, 1, 0),
        benign_request(truth, 12, 1, 0),
    };
    const auto dataset = extract_features(frames, spec, truth);
    REQUIRE(dataset.size() == 1);
    CHECK(dataset.features[0][6] == doctest::Approx(6.0));  // (4 + 8) / 2
    CHECK(dataset.features[0][7] == doctest::Approx(3.0 / 100.0));
}

TEST_CASE("every frame lands in at least one and at most ceil(window/stride) windows") {
    SimConfig cfg;
    cfg.node_count = 6;
    cfg.duration_ticks = 1000;
    cfg.benign_request_rate = 40.0;
    cfg.rng_seed = 3;
    const auto frames = run_simulation(cfg);
    const auto truth = GroundTruthTable::for_nodes(cfg.node_count);
    const WindowSpec spec{100, 40};
    const auto dataset = extract_features(frames, spec, truth);

    // Window grid: multiples of the stride, from the first frame's slot.
    const std::int64_t first_start =
        (frames.front().tick / spec.stride_ticks) * spec.stride_ticks;
    auto memberships_of = [&](std::int64_t tick) {
        std::size_t count = 0;
        for (std::int64_t start = first_start; start <= tick; start += spec.stride_ticks) {
            if (tick >= start && tick < start + spec.window_ticks) ++count;
        }
        return count;
    };

    const auto max_windows = static_cast<std::size_t>(
        (spec.window_ticks + spec.stride_ticks - 1) / spec.stride_ticks);
    for (const ArpFrame& f : frames) {
        const std::size_t member_of = memberships_of(f.tick);
        CHECK(member_of >= 1);
        CHECK(member_of <= max_windows);
    }

    // Summed per-example frame counts must equal total window memberships.
    double examples_frames = 0;
    for (const auto& v : dataset.features) {
        examples_frames += v[7] * static_cast<double>(spec.window_ticks);
    }
    double memberships = 0;
    for (const ArpFrame& f : frames) {
        memberships += static_cast<double>(memberships_of(f.tick));
    }
    CHECK(examples_frames == doctest::Approx(memberships));
}

TEST_CASE("dataset labels are consistent with raw frame labels") {
    SimConfig cfg;
    cfg.node_count = 8;
    cfg.duration_ticks = 2000;
    cfg.benign_request_rate = 30.0;
    cfg.attacker_ids = {5};
    cfg.attack_rate = 20.0;
    cfg.attack_stop_tick = cfg.duration_ticks;
    cfg.rng_seed = 11;
    const auto frames = run_simulation(cfg);
    const auto truth = GroundTruthTable::for_nodes(cfg.node_count);
    const WindowSpec spec{100, 50};
    const auto dataset = extract_features(frames, spec, truth);

    std::size_t attack_examples = 0;
    for (Label l : dataset.labels) attack_examples += l == Label::attack ? 1 : 0;
    CHECK(attack_examples > 0);

    // Attacker windows with traffic are attack; benign sources stay benign
    // unless they never conflict (they do not forge anything here).
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.labels[i] == Label::attack) {
            CHECK(dataset.features[i][3] > 0);  // carries gratuitous replies
        }
    }
}

TEST_CASE("stratified split honors fractions, determinism, and error paths") {
    const LabeledDataset d = tiny_dataset(50, 50);

    auto [train, test] = split_dataset(d, 0.8, 17);
    CHECK(train.count(Label::benign) == 40);
    CHECK(train.count(Label::attack) == 40);
    CHECK(test.count(Label::benign) == 10);
    CHECK(test.count(Label::attack) == 10);

    auto [train2, test2] = split_dataset(d, 0.8, 17);
    CHECK(train.features == train2.features);
    CHECK(test.labels == test2.labels);

    auto [train3, test3] = split_dataset(d, 0.8, 18);
    CHECK(train.features != train3.features);

    CHECK_THROWS_AS(split_dataset(tiny_dataset(10, 1), 0.8, 1), DataError);
    CHECK_THROWS_AS(split_dataset(d, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split_dataset(d, 1.0, 1), ConfigError);
}

TEST_CASE("split is a partition of the original dataset") {
    const LabeledDataset d = tiny_dataset(23, 9);
    auto [train, test] = split_dataset(d, 0.7, 5);
    CHECK(train.size() + test.size() == d.size());

    std::multiset<std::pair<double, double>> original, recombined;
    for (const auto& v : d.features) original.insert({v[0], v[1]});
    for (const auto& v : train.features) recombined.insert({v[0], v[1]});
    for (const auto& v : test.features) recombined.insert({v[0], v[1]});
    CHECK(original == recombined);
}

TEST_CASE("min-max scaling matches its definition") {
    LabeledDataset train;
    train.feature_names = {"a", "b"};
    train.push_back({2.0, 5.0}, Label::benign);
    train.push_back({4.0, 5.0}, Label::benign);
    train.push_back({6.0, 5.0}, Label::attack);

    const Scaler scaler = normalize_fit(train);
    const LabeledDataset scaled = normalize_apply(scaler, train);
    CHECK(scaled.features[0][0] == 0.0);
    CHECK(scaled.features[1][0] == 0.5);
    CHECK(scaled.features[2][0] == 1.0);
    // Constant feature maps to zero.
    for (const auto& v : scaled.features) CHECK(v[1] == 0.0);

    // Values beyond the train range are not clipped.
    CHECK(normalize_apply(scaler, FeatureVector{8.0, 5.0})[0] == doctest::Approx(1.5));

    CHECK_THROWS_AS(normalize_apply(scaler, FeatureVector{1.0}), DataError);
    CHECK_THROWS_AS(normalize_fit(LabeledDataset{}), DataError);
}

TEST_CASE("scaling an already scaled training set is the identity") {
    LabeledDataset train = tiny_dataset(20, 20);
    const Scaler first = normalize_fit(train);
    const LabeledDataset once = normalize_apply(first, train);
    const Scaler second = normalize_fit(once);
    const LabeledDataset twice = normalize_apply(second, once);
    for (std::size_t i = 0; i < once.size(); ++i) {
        for (std::size_t j = 0; j < once.dim(); ++j) {
            CHECK(std::abs(once.features[i][j] - twice.features[i][j]) <= 1e-12);
        }
    }
}

TEST_CASE("dataset files round-trip") {
    const auto truth = GroundTruthTable::for_nodes(4);
    const WindowSpec spec{100, 50};
    const std::vector<ArpFrame> frames = {
        benign_request(truth, 1, 1, 0),
        benign_reply(truth, 2, 0, 1),
        forged_reply(truth, 60, 2, 1),
        forged_reply(truth, 110, 2, 3),
    };
    LabeledDataset dataset = extract_features(frames, spec, truth);
    dataset.provenance = "test";

    const fs::path path = fs::temp_directory_path() / "arpsentinel_dataset.tsv";
    write_dataset(dataset, path);
    const LabeledDataset loaded = read_dataset(path);
    CHECK(loaded.features == dataset.features);
    CHECK(loaded.labels == dataset.labels);
    CHECK(loaded.feature_names == dataset.feature_names);
    fs::remove(path);
}

TEST_CASE("malformed dataset lines report their line number") {
    const fs::path path = fs::temp_directory_path() / "arpsentinel_dataset_bad.tsv";
    {
        std::ofstream out(path, std::ios::binary);
        out << "#arp-dataset v1 d=2 features=a,b\n";
        out << "benign\t0.5,0.25\n";
        out << "attack\t0.5\n";
    }
    try {
        read_dataset(path);
        FAIL("expected a parse error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    fs::remove(path);
}
