#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "axnn/errors.hpp"
#include "axnn/matching.hpp"
#include "axnn/rng.hpp"

using namespace axnn;

namespace {

MultiplierLibrary builtin_library() {
    MultiplierLibrary lib;
    lib.source = "builtin-test";
    lib.add(accurate_map());
    lib.add(truncated_map(2, 0.72));
    lib.add(truncated_map(4, 0.49));
    lib.add(truncated_map(6, 0.30));
    lib.add(mitchell_map(0.45));
    return lib;
}

QuantNetwork tiny_cnn(uint64_t seed) {
    std::vector<LayerSpec> spec{
        {.kind = "conv2d", .out_channels = 4, .kernel = 3},
        {.kind = "relu"},
        {.kind = "flatten"},
        {.kind = "dense", .out_features = 3},
    };
    return build_network({1, 6, 6}, spec, seed);
}

Dataset tiny_data(uint64_t seed) {
    SyntheticSpec sp;
    sp.classes = 3;
    sp.per_class = 25;
    sp.dim = {1, 6, 6};
    sp.seed = seed;
    return gen_synthetic(sp);
}

}  // namespace

TEST_CASE("match_layer filters by threshold then picks minimum energy") {
    std::vector<Candidate> c{{"A", 0.5, 0.8}, {"B", 1.2, 0.6}, {"C", 0.9, 0.7}};
    CHECK(match_layer(1.0, c) == 2);  // B infeasible, C cheapest feasible

    std::vector<Candidate> with_acc{{"accurate", 0.0, 1.0}, {"x", 0.4, 0.5}, {"y", 0.9, 0.3}};
    CHECK(match_layer(0.0, with_acc) == 0);  // only sigma_e = 0 feasible
    CHECK(match_layer(std::numeric_limits<double>::infinity(), with_acc) == 2);

    std::vector<Candidate> tie{{"a", 0.5, 0.6}, {"b", 0.3, 0.6}, {"c", 0.3, 0.6}};
    CHECK(match_layer(1.0, tie) == 1);  // energy tie -> smaller sigma_e -> list order

    CHECK_THROWS_AS(match_layer(1.0, std::vector<Candidate>{}), ConfigError);
    std::vector<Candidate> none{{"a", 2.0, 0.5}};
    CHECK_THROWS_AS(match_layer(1.0, none), ConfigError);
}

TEST_CASE("match_layer energy is non-increasing in the threshold") {
    auto eng = make_engine(15);
    std::uniform_real_distribution<double> sig(0.0, 3.0), en(0.1, 1.2);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<Candidate> c{{"accurate", 0.0, 1.0}};
        int n = 2 + iter % 8;
        for (int i = 0; i < n; ++i)
            c.push_back({"m" + std::to_string(i), sig(eng), en(eng)});
        double prev_energy = std::numeric_limits<double>::infinity();
        for (double thr : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0}) {
            double e = c[match_layer(thr, c)].energy_rel;
            CHECK(e <= prev_energy);
            prev_energy = e;
        }
    }
}

TEST_CASE("energy_total weights by multiplication counts") {
    // dense 10 -> 100 gives 1000 mults, dense 100 -> 30 gives 3000
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 100},
                                {.kind = "dense", .out_features = 30}};
    QuantNetwork net = build_network({10}, spec, 1);
    MultiplierLibrary lib;
    lib.add(accurate_map());
    lib.add(truncated_map(1, 0.5));
    lib.add(truncated_map(2, 0.25));

    Assignment a;
    a.layers = {{"dense0", "trunc1"}, {"dense1", "trunc2"}};
    CHECK(energy_total(a, net, lib) == doctest::Approx(0.3125));

    Assignment all_acc = uniform_assignment(net, lib, "accurate");
    CHECK(energy_total(all_acc, net, lib) == 1.0);  // exact

    Assignment missing;
    missing.layers = {{"dense0", "trunc1"}};
    CHECK_THROWS_AS(energy_total(missing, net, lib), ConfigError);
    Assignment unknown;
    unknown.layers = {{"dense0", "trunc1"}, {"dense1", "nope"}};
    CHECK_THROWS_AS(energy_total(unknown, net, lib), ConfigError);
}

TEST_CASE("single-layer assignment energy equals the multiplier energy") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 4}};
    QuantNetwork net = build_network({8}, spec, 2);
    MultiplierLibrary lib;
    lib.add(accurate_map());
    lib.add(truncated_map(3, 0.3));
    Assignment a = uniform_assignment(net, lib, "trunc3");
    CHECK(a.energy_total_rel == doctest::Approx(0.3));
}

TEST_CASE("pareto front marking leaves no dominated points") {
    std::vector<SweepPoint> pts(5);
    auto set = [&](int i, double en, double acc) {
        pts[i].energy_rel = en;
        pts[i].retrained_acc = acc;
    };
    set(0, 1.00, 0.95);
    set(1, 0.70, 0.95);  // dominates 0 on energy
    set(2, 0.50, 0.90);
    set(3, 0.60, 0.85);  // dominated by 2
    set(4, 0.30, 0.70);
    mark_pareto_front(pts);
    CHECK_FALSE(pts[0].on_front);
    CHECK(pts[1].on_front);
    CHECK(pts[2].on_front);
    CHECK_FALSE(pts[3].on_front);
    CHECK(pts[4].on_front);

    // property: no flagged point is dominated by any other point
    auto eng = make_engine(31);
    std::uniform_real_distribution<double> en(0.2, 1.0), acc(0.3, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<SweepPoint> rnd(12);
        for (auto& p : rnd) {
            p.energy_rel = en(eng);
            p.retrained_acc = acc(eng);
        }
        mark_pareto_front(rnd);
        for (const auto& p : rnd) {
            if (!p.on_front) continue;
            for (const auto& q : rnd) {
                bool no_worse = q.energy_rel <= p.energy_rel && q.retrained_acc >= p.retrained_acc;
                bool better = q.energy_rel < p.energy_rel || q.retrained_acc > p.retrained_acc;
                bool dominated = no_worse && better;
                CHECK_FALSE(dominated);
            }
        }
    }
}

TEST_CASE("zero sigma thresholds force the all-accurate assignment") {
    QuantNetwork net = tiny_cnn(7);
    Dataset ds = tiny_data(3);
    calibrate(net, ds);
    for (int i : net.compute_layers()) net.layers[i].sigma_l = 0.0;
    MultiplierLibrary lib = builtin_library();
    auto records = record_layer_inputs(net, ds);
    SensitivityProfile profile = build_profile(net, records);
    for (const auto& s : profile.layers) CHECK(s.threshold_abs == 0.0);
    auto candidates = build_candidates(net, lib, records, 64, 5);
    Assignment a = match_network(net, profile, candidates, lib);
    for (const auto& [layer, mult] : a.layers) CHECK(mult == "accurate");
    CHECK(a.energy_total_rel == 1.0);
}

TEST_CASE("matched assignments satisfy per-layer feasibility") {
    QuantNetwork net = tiny_cnn(11);
    Dataset ds = tiny_data(5);
    calibrate(net, ds);
    std::vector<double> sigmas{0.4, 0.15};
    auto compute = net.compute_layers();
    for (size_t c = 0; c < compute.size(); ++c) net.layers[compute[c]].sigma_l = sigmas[c];

    MultiplierLibrary lib = builtin_library();
    auto records = record_layer_inputs(net, ds);
    SensitivityProfile profile = build_profile(net, records);
    auto candidates = build_candidates(net, lib, records, 128, 5);
    Assignment a = match_network(net, profile, candidates, lib);
    REQUIRE(a.layers.size() == 2);
    for (size_t c = 0; c < candidates.size(); ++c) {
        const std::string* mult = a.find(net.layers[candidates[c].layer_index].name);
        REQUIRE(mult != nullptr);
        for (const auto& cand : candidates[c].candidates)
            if (cand.name == *mult) CHECK(cand.sigma_e <= profile.layers[c].threshold_abs);
    }
    CHECK(a.energy_total_rel > 0.0);
    CHECK(a.energy_total_rel <= 1.0);
}

TEST_CASE("profile scales sigma by the calibration pre-activation std") {
    QuantNetwork net = tiny_cnn(13);
    Dataset ds = tiny_data(7);
    calibrate(net, ds);
    auto compute = net.compute_layers();
    net.layers[compute[0]].sigma_l = -0.3;  // matching uses |sigma|
    net.layers[compute[1]].sigma_l = 0.2;
    auto records = record_layer_inputs(net, ds);
    SensitivityProfile p = build_profile(net, records);
    CHECK(p.layers[0].sigma_abs == doctest::Approx(0.3));
    CHECK(p.layers[0].calib_std == doctest::Approx(records.at(compute[0]).preact_std));
    CHECK(p.layers[0].threshold_abs ==
          doctest::Approx(0.3 * records.at(compute[0]).preact_std));
    CHECK(p.layers[1].threshold_abs == doctest::Approx(0.2 * records.at(compute[1]).preact_std));
}

TEST_CASE("attach_assignment resolves maps and rejects unknown names") {
    QuantNetwork net = tiny_cnn(17);
    MultiplierLibrary lib = builtin_library();
    Assignment a = uniform_assignment(net, lib, "trunc4");
    attach_assignment(net, lib, a);
    for (int i : net.compute_layers()) {
        REQUIRE(net.layers[i].assigned_map != nullptr);
        CHECK(net.layers[i].assigned_map->name() == "trunc4");
    }
    Assignment bad;
    bad.layers = {{"conv0", "ghost"}, {"dense3", "trunc4"}};
    CHECK_THROWS_AS(attach_assignment(net, lib, bad), ConfigError);
    CHECK_THROWS_AS(uniform_assignment(net, lib, "ghost"), ConfigError);
}

TEST_CASE("a small lambda sweep produces coherent artifacts") {
    QuantNetwork net = tiny_cnn(19);
    Dataset full = tiny_data(9);
    auto parts = split_dataset(full, {0.6, 0.2, 0.2}, 3);
    TrainConfig pre;
    pre.epochs = 4;
    pre.lr = 0.1;
    train_float(net, parts[0], pre);
    calibrate(net, parts[2]);

    MultiplierLibrary lib = builtin_library();
    SweepSettings settings;
    settings.noise.epochs = 2;
    settings.noise.batch_size = 16;
    settings.retrain.epochs = 1;
    settings.retrain.lr = 1e-3;
    settings.k_samples = 64;
    SweepResult res =
        pareto_sweep(net, lib, {0.0, 0.4}, parts[0], parts[1], parts[2], settings);

    REQUIRE(res.points.size() == 2);
    CHECK(res.uniform.size() == lib.size());
    for (const auto& p : res.points) {
        CHECK(p.energy_rel > 0.0);
        CHECK(p.energy_rel <= 1.0);
        CHECK(p.assignment.layers.size() == 2);
        CHECK(p.search_log.size() == 2);
        CHECK(p.retrained_acc >= 0.0);
        CHECK(p.retrained_baseline_acc >= 0.0);
    }
    bool any_front = false;
    for (const auto& p : res.points) any_front |= p.on_front;
    CHECK(any_front);
    for (const auto& u : res.uniform) {
        CHECK(u.energy_rel > 0.0);
        CHECK(u.retrained_acc >= 0.0);
    }
    CHECK(res.baseline_int_acc > 0.0);
}
