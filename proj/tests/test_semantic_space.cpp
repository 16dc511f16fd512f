#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "semsense/errors.hpp"
#include "semsense/semantic_space.hpp"

using namespace semsense;

namespace {

SemanticCode code_of(const std::vector<SemanticBasis>& bases) {
    SemanticCode code;
    code.bases = bases;
    code.order = static_cast<int>(bases.size());
    code.sample_rate_hz = 600.0;
    code.trace_len = 1200;
    return code;
}

TrainingSet two_cluster_set() {
    // Two well-separated clusters: inter-centroid distance far above the
    // intra-cluster spread on every axis.
    std::vector<std::pair<SemanticCode, std::string>> codes;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> jitter(0.0, 0.01);
    for (int i = 0; i < 12; ++i) {
        codes.emplace_back(code_of({{std::exp(1.0 + jitter(rng)), 8.0 + jitter(rng), 0.0},
                                    {std::exp(1.0 + jitter(rng)), 9.0 + jitter(rng), 0.0}}),
                           "slow");
        codes.emplace_back(code_of({{std::exp(3.0 + jitter(rng)), 60.0 + jitter(rng), 0.0},
                                    {std::exp(3.0 + jitter(rng)), 63.0 + jitter(rng), 0.0},
                                    {std::exp(3.0 + jitter(rng)), 66.0 + jitter(rng), 0.0}}),
                           "fast");
    }
    return build_training_set(codes);
}

} // namespace

TEST_CASE("to_point maps single and double basis codes per the axis definitions") {
    const SemanticPoint single = to_point(code_of({{std::exp(1.0), 10.0, 0.5}}));
    CHECK(single.x == doctest::Approx(10.0));
    CHECK(single.y == doctest::Approx(1.0));
    CHECK(single.z == doctest::Approx(1.0));

    const SemanticPoint pair = to_point(code_of({{2.0, 10.0, 0.1}, {2.0, 20.0, 0.2}}));
    CHECK(pair.x == doctest::Approx(7.5));
    CHECK(pair.y == doctest::Approx(0.0));
    CHECK(pair.z == doctest::Approx(2.0));
}

TEST_CASE("to_point rejects zero-amplitude bases") {
    CHECK_THROWS_AS(to_point(code_of({{0.0, 10.0, 0.0}})), Error);
    SemanticCode empty;
    CHECK_THROWS_AS(to_point(empty), Error);
}

TEST_CASE("build_training_set stores every labeled point") {
    std::vector<std::pair<SemanticCode, std::string>> codes;
    for (int label = 0; label < 3; ++label) {
        for (int i = 0; i < 5; ++i) {
            codes.emplace_back(code_of({{1.0 + i, 10.0 * (label + 1) + i, 0.0}}),
                               "label" + std::to_string(label));
        }
    }
    const TrainingSet ts = build_training_set(codes);
    CHECK(ts.points.size() == 15);
    CHECK(ts.labels.size() == 3);
}

TEST_CASE("degenerate axes get scale one and the rest match the sample std") {
    std::vector<std::pair<SemanticCode, std::string>> codes;
    // All codes have exactly 2 bases, so z is constant (degenerate).
    codes.emplace_back(code_of({{1.0, 10.0, 0.0}, {1.0, 12.0, 0.0}}), "a");
    codes.emplace_back(code_of({{2.0, 20.0, 0.0}, {2.0, 26.0, 0.0}}), "a");
    codes.emplace_back(code_of({{4.0, 30.0, 0.0}, {4.0, 38.0, 0.0}}), "b");
    const TrainingSet ts = build_training_set(codes);
    CHECK(ts.axis_scales[2] == 1.0);

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& lp : ts.points) {
        xs.push_back(lp.point.x);
        ys.push_back(lp.point.y);
    }
    auto sample_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return std::sqrt(acc / (v.size() - 1));
    };
    CHECK(ts.axis_scales[0] == doctest::Approx(sample_std(xs)).epsilon(1e-12));
    CHECK(ts.axis_scales[1] == doctest::Approx(sample_std(ys)).epsilon(1e-12));
}

TEST_CASE("k=1 on a training point returns that point's label") {
    const TrainingSet ts = two_cluster_set();
    const KnnConfig cfg{1, 0};
    for (const auto& lp : ts.points) {
        CHECK(classify(lp.point, ts, cfg) == lp.label);
    }
}

TEST_CASE("well-separated clusters self-classify perfectly at k=3") {
    const TrainingSet ts = two_cluster_set();
    const KnnConfig cfg{3, 0};
    for (const auto& lp : ts.points) {
        CHECK(classify(lp.point, ts, cfg) == lp.label);
    }
}

TEST_CASE("classify agrees with a brute-force full-sort oracle") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_int_distribution<int> label(0, 3);

    TrainingSet ts;
    for (int i = 0; i < 60; ++i) {
        ts.points.push_back({{coord(rng), coord(rng), coord(rng)},
                             "c" + std::to_string(label(rng))});
    }
    ts.axis_scales = {1.3, 0.7, 2.1};
    ts.labels = {"c0", "c1", "c2", "c3"};

    auto oracle = [&](const SemanticPoint& p, int k, std::uint64_t seed) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t i = 0; i < ts.points.size(); ++i) {
            const auto& q = ts.points[i].point;
            double d = 0.0;
            const double dx = (p.x - q.x) / ts.axis_scales[0];
            const double dy = (p.y - q.y) / ts.axis_scales[1];
            const double dz = (p.z - q.z) / ts.axis_scales[2];
            d = dx * dx + dy * dy + dz * dz;
            all.emplace_back(d, i);
        }
        std::sort(all.begin(), all.end());
        std::map<std::string, int> votes;
        for (int i = 0; i < k; ++i) votes[ts.points[all[i].second].label] += 1;
        int best = 0;
        for (const auto& [l, c] : votes) best = std::max(best, c);
        std::vector<std::string> tied;
        for (const auto& [l, c] : votes) {
            if (c == best) tied.push_back(l);
        }
        std::sort(tied.begin(), tied.end());
        if (tied.size() == 1) return tied.front();
        std::mt19937_64 pick_rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
        return tied[pick(pick_rng)];
    };

    std::uniform_int_distribution<int> kdist(1, 9);
    for (int trial = 0; trial < 1000; ++trial) {
        const SemanticPoint p{coord(rng), coord(rng), coord(rng)};
        const int k = kdist(rng);
        const std::uint64_t seed = trial;
        CHECK(classify(p, ts, {k, seed}) == oracle(p, k, seed));
    }
}

TEST_CASE("classification is invariant to a common axis rescale") {
    const TrainingSet base = two_cluster_set();
    const KnnConfig cfg{3, 9};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(0.0, 70.0);
    for (int trial = 0; trial < 50; ++trial) {
        SemanticPoint p{coord(rng), coord(rng) / 20.0, 2.0 + (trial % 3)};
        const std::string before = classify(p, base, cfg);

        // Scale the x axis of every training point and the probe by 37.
        std::vector<std::pair<SemanticCode, std::string>> scaled;
        TrainingSet ts = base;
        for (auto& lp : ts.points) lp.point.x *= 37.0;
        ts.axis_scales[0] *= 37.0;
        SemanticPoint q = p;
        q.x *= 37.0;
        CHECK(classify(q, ts, cfg) == before);
    }
}

TEST_CASE("classification is invariant to training-set permutation") {
    const TrainingSet base = two_cluster_set();
    TrainingSet shuffled = base;
    std::mt19937_64 rng(8);
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    const KnnConfig cfg{5, 123};
    std::uniform_real_distribution<double> coord(0.0, 70.0);
    for (int trial = 0; trial < 50; ++trial) {
        SemanticPoint p{coord(rng), coord(rng) / 20.0, 2.0 + (trial % 3)};
        CHECK(classify(p, base, cfg) == classify(p, shuffled, cfg));
    }
}

TEST_CASE("classify validates k") {
    const TrainingSet ts = two_cluster_set();
    CHECK_THROWS_AS(classify({0, 0, 1}, ts, {0, 0}), Error);
    CHECK_THROWS_AS(classify({0, 0, 1}, ts, {static_cast<int>(ts.points.size()) + 1, 0}), Error);
}

TEST_CASE("vote follows majority, previous-result tie rule, and seeded ties") {
    CHECK(vote({"walk", "walk", "sit"}, std::nullopt, 0) == "walk");
    CHECK(vote({"walk", "sit"}, std::string("sit"), 0) == "sit");
    CHECK(vote({"walk", "sit"}, std::string("fall"), 17) ==
          vote({"walk", "sit"}, std::string("fall"), 17));
    const std::string picked = vote({"walk", "sit"}, std::string("fall"), 17);
    CHECK((picked == "walk" || picked == "sit"));
    CHECK_THROWS_AS(vote({}, std::nullopt, 0), Error);
}

TEST_CASE("vote never returns a label absent from the link results") {
    std::mt19937_64 rng(21);
    const std::vector<std::string> alphabet{"a", "b", "c", "d"};
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(1, 7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> results;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) results.push_back(alphabet[pick(rng)]);
        const std::string winner = vote(results, alphabet[pick(rng)], trial);
        CHECK(std::find(results.begin(), results.end(), winner) != results.end());
    }
}

TEST_CASE("training set JSON round-trips") {
    const TrainingSet ts = two_cluster_set();
    const TrainingSet back = training_set_from_json(training_set_to_json(ts));
    REQUIRE(back.points.size() == ts.points.size());
    CHECK(back.axis_scales == ts.axis_scales);
    CHECK(back.labels == ts.labels);
    for (std::size_t i = 0; i < ts.points.size(); ++i) {
        CHECK(back.points[i].label == ts.points[i].label);
        CHECK(back.points[i].point.x == ts.points[i].point.x);
    }
    CHECK_THROWS_AS(training_set_from_json("{"), Error);
    CHECK_THROWS_AS(training_set_from_json("{\"labels\":[]}"), Error);
}
