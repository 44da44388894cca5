#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "axnn/dataset.hpp"
#include "axnn/errors.hpp"
#include "axnn/network.hpp"
#include "axnn/rng.hpp"
#include "axnn/train.hpp"

using namespace axnn;

namespace {

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-8});
}

Tensor random_tensor(std::vector<int> shape, uint64_t seed, double scale = 1.0) {
    Tensor t(std::move(shape));
    auto eng = make_engine(seed);
    std::normal_distribution<double> d(0.0, scale);
    for (auto& v : t.data) v = d(eng);
    return t;
}

QuantNetwork small_cnn(uint64_t seed = 3) {
    std::vector<LayerSpec> spec{
        {.kind = "conv2d", .out_channels = 3, .kernel = 3},
        {.kind = "relu"},
        {.kind = "maxpool", .pool = 2},
        {.kind = "conv2d", .out_channels = 4, .kernel = 2},
        {.kind = "relu"},
        {.kind = "flatten"},
        {.kind = "dense", .out_features = 5},
    };
    return build_network({1, 8, 8}, spec, seed);
}

double loss_of(QuantNetwork& net, const Tensor& batch, const std::vector<int>& labels) {
    Tensor logits = forward_float(net, batch);
    return softmax_cross_entropy(logits, labels).loss;
}

ErrorMap map_with(std::initializer_list<std::tuple<int, int, int32_t>> entries,
                  const std::string& name = "custom") {
    std::vector<int32_t> tab(ErrorMap::kTableSize, 0);
    for (auto [x, w, e] : entries) tab[static_cast<size_t>(x) * 256 + w] = e;
    return ErrorMap(name, Signedness::Unsigned, std::move(tab), 0.5);
}

}  // namespace

TEST_CASE("dense integer accumulation matches hand result under identity params") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 1}};
    QuantNetwork net = build_network({2}, spec, 1);
    Layer& l = net.layers[0];
    l.act_q = {1.0, 0};
    l.act_calibrated = true;
    QuantizedLayer ql;
    ql.wq = {1.0, 0};
    ql.qweights = {1, 2};
    ql.qbias = {0};
    std::vector<int32_t> y = int_layer_preact(l, ql, {3, 4}, nullptr);
    REQUIRE(y.size() == 1);
    CHECK(y[0] == 11);

    ErrorMap m = map_with({{3, 1, -1}, {4, 2, 2}});
    std::vector<int32_t> ya = int_layer_preact(l, ql, {3, 4}, &m);
    CHECK(ya[0] == 12);
    CHECK(ya[0] - y[0] == -1 + 2);
}

TEST_CASE("single-multiplication layer reproduces the map entry exactly") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 1}};
    QuantNetwork net = build_network({1}, spec, 1);
    Layer& l = net.layers[0];
    l.act_q = {1.0, 0};
    l.act_calibrated = true;
    QuantizedLayer ql{{1.0, 0}, {9}, {0}};
    ErrorMap t2 = truncated_map(2, 0.7);
    auto exact = int_layer_preact(l, ql, {7}, nullptr);
    auto approx = int_layer_preact(l, ql, {7}, &t2);
    CHECK(exact[0] == 63);
    CHECK(approx[0] == 32);
    CHECK(approx[0] - exact[0] == t2.error(7, 9));
}

TEST_CASE("aggregate-error identity holds bit-exactly on randomized layers") {
    auto eng = make_engine(77);
    std::uniform_int_distribution<int> zp(0, 255), small(1, 6), ch(1, 3), entry(-300, 300);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int iter = 0; iter < 200; ++iter) {
        bool dense = iter % 2 == 0;
        std::vector<LayerSpec> spec;
        std::vector<int> in_shape;
        if (dense) {
            in_shape = {small(eng) * 3};
            spec.push_back({.kind = "dense", .out_features = small(eng)});
        } else {
            int k = 1 + iter % 3;
            in_shape = {ch(eng), k + small(eng) % 4 + 1, k + small(eng) % 4 + 1};
            spec.push_back({.kind = "conv2d", .out_channels = ch(eng), .kernel = k});
        }
        QuantNetwork net = build_network(in_shape, spec, iter);
        Layer& l = net.layers[0];
        l.act_q = {0.01 + 0.1 * (iter % 5), zp(eng)};
        l.act_calibrated = true;
        QuantizedLayer ql;
        ql.wq = {0.02, zp(eng)};
        ql.qweights.resize(l.weights.numel());
        for (auto& w : ql.qweights) w = static_cast<uint8_t>(byte(eng));
        ql.qbias.assign(l.bias.numel(), entry(eng));

        std::vector<int32_t> tab(ErrorMap::kTableSize);
        for (auto& e : tab) e = entry(eng);
        ErrorMap map("rnd", Signedness::Unsigned, std::move(tab), 0.5);

        std::vector<uint8_t> qin(Tensor::numel_of(l.in_shape));
        for (auto& v : qin) v = static_cast<uint8_t>(byte(eng));

        auto exact = int_layer_preact(l, ql, qin, nullptr);
        auto approx = int_layer_preact(l, ql, qin, &map);

        // independent error accumulation over the operand pairs
        std::vector<int64_t> esum(exact.size(), 0);
        if (dense) {
            int in = l.in_shape[0], out = l.out_shape[0];
            for (int o = 0; o < out; ++o)
                for (int i = 0; i < in; ++i)
                    esum[o] += map.error(qin[i], ql.qweights[static_cast<size_t>(o) * in + i]);
        } else {
            int c = l.in_shape[0], h = l.in_shape[1], w = l.in_shape[2];
            int oc = l.out_shape[0], oh = l.out_shape[1], ow = l.out_shape[2], k = l.kernel;
            for (int o = 0; o < oc; ++o)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox)
                        for (int ci = 0; ci < c; ++ci)
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx)
                                    esum[(static_cast<size_t>(o) * oh + oy) * ow + ox] += map.error(
                                        qin[(static_cast<size_t>(ci) * h + oy + ky) * w + ox + kx],
                                        ql.qweights[((static_cast<size_t>(o) * c + ci) * k + ky) * k +
                                                    kx]);
        }
        for (size_t j = 0; j < exact.size(); ++j)
            REQUIRE(static_cast<int64_t>(approx[j]) - exact[j] == esum[j]);
    }
}

TEST_CASE("quantization calibration follows the min-max formula") {
    Tensor t({3});
    t.data = {0.0, 1.27, 2.55};
    auto [q, p] = quantize(t, QuantMode::ActivationUnsigned);
    CHECK(p.scale == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(p.zero_point == 0);
    CHECK(q[1] == 127);
    CHECK(q[2] == 255);
}

TEST_CASE("constant tensors quantize to one level with the scale floor") {
    Tensor t({4});
    t.data = {0.75, 0.75, 0.75, 0.75};
    auto [q, p] = quantize(t, QuantMode::WeightAffine);
    CHECK(q[0] == q[1]);
    CHECK(q[1] == q[2]);
    double back = p.dequant(q[0]);
    CHECK(std::abs(back - 0.75) <= p.scale / 2 + 1e-12);
}

TEST_CASE("quant-dequant round trip stays within half a scale step") {
    auto eng = make_engine(5);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int iter = 0; iter < 50; ++iter) {
        Tensor t({64});
        for (auto& v : t.data) v = d(eng);
        auto [q, p] = quantize(t, iter % 2 ? QuantMode::WeightAffine : QuantMode::ActivationUnsigned);
        double lo = p.dequant(0), hi = p.dequant(255);
        for (size_t i = 0; i < t.numel(); ++i) {
            double clamped = std::clamp(t.data[i], lo, hi);
            CHECK(std::abs(p.dequant(q[i]) - clamped) <= p.scale / 2 + 1e-9);
        }
    }
}

TEST_CASE("linear layer with squared loss matches finite differences at h=1e-3") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 3}};
    QuantNetwork net = build_network({4}, spec, 17);
    Tensor batch = random_tensor({5, 4}, 31);
    Tensor target = random_tensor({5, 3}, 32);

    auto sq_loss = [&]() {
        Tensor logits = forward_float(net, batch);
        double acc = 0;
        for (size_t i = 0; i < logits.numel(); ++i) {
            double d = logits.data[i] - target.data[i];
            acc += 0.5 * d * d;
        }
        return acc;
    };
    ForwardTrace trace;
    forward_float(net, batch, {}, &trace);
    Tensor dlogits(trace.logits.shape);
    for (size_t i = 0; i < dlogits.numel(); ++i)
        dlogits.data[i] = trace.logits.data[i] - target.data[i];
    Gradients g = backward(net, trace, dlogits);

    const double h = 1e-3;
    Layer& l = net.layers[0];
    for (size_t idx = 0; idx < l.weights.numel(); ++idx) {
        double keep = l.weights.data[idx];
        l.weights.data[idx] = keep + h;
        double lp = sq_loss();
        l.weights.data[idx] = keep - h;
        double lm = sq_loss();
        l.weights.data[idx] = keep;
        REQUIRE(close_rel(g.dweights[0].data[idx], (lp - lm) / (2 * h), 1e-4));
    }
    for (size_t idx = 0; idx < l.bias.numel(); ++idx) {
        double keep = l.bias.data[idx];
        l.bias.data[idx] = keep + h;
        double lp = sq_loss();
        l.bias.data[idx] = keep - h;
        double lm = sq_loss();
        l.bias.data[idx] = keep;
        REQUIRE(close_rel(g.dbias[0].data[idx], (lp - lm) / (2 * h), 1e-4));
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    QuantNetwork net = small_cnn();
    Tensor batch = random_tensor({4, 1, 8, 8}, 11, 0.5);
    std::vector<int> labels{0, 2, 4, 1};

    ForwardTrace trace;
    forward_float(net, batch, {}, &trace);
    LossGrad lg = softmax_cross_entropy(trace.logits, labels);
    Gradients g = backward(net, trace, lg.dlogits);

    // h small enough that no relu/maxpool switch falls inside the stencil
    const double h = 1e-5;
    auto eng = make_engine(99);
    for (int li : net.compute_layers()) {
        Layer& l = net.layers[li];
        std::uniform_int_distribution<size_t> pick(0, l.weights.numel() - 1);
        for (int s = 0; s < 12; ++s) {
            size_t idx = pick(eng);
            double keep = l.weights.data[idx];
            l.weights.data[idx] = keep + h;
            double lp = loss_of(net, batch, labels);
            l.weights.data[idx] = keep - h;
            double lm = loss_of(net, batch, labels);
            l.weights.data[idx] = keep;
            double fd = (lp - lm) / (2 * h);
            REQUIRE(close_rel(g.dweights[li].data[idx], fd, 1e-4));
        }
        for (size_t bi = 0; bi < l.bias.numel(); ++bi) {
            double keep = l.bias.data[bi];
            l.bias.data[bi] = keep + h;
            double lp = loss_of(net, batch, labels);
            l.bias.data[bi] = keep - h;
            double lm = loss_of(net, batch, labels);
            l.bias.data[bi] = keep;
            double fd = (lp - lm) / (2 * h);
            REQUIRE(close_rel(g.dbias[li].data[bi], fd, 1e-4));
        }
    }
}

TEST_CASE("zero upstream gradient yields zero parameter gradients") {
    QuantNetwork net = small_cnn();
    Tensor batch = random_tensor({2, 1, 8, 8}, 13);
    ForwardTrace trace;
    forward_float(net, batch, {}, &trace);
    Tensor zeros(trace.logits.shape);
    Gradients g = backward(net, trace, zeros);
    for (int li : net.compute_layers()) {
        for (double v : g.dweights[li].data) CHECK(v == 0.0);
        for (double v : g.dbias[li].data) CHECK(v == 0.0);
    }
}

TEST_CASE("relu blocks gradient at negative pre-activations") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 1}, {.kind = "relu"}};
    QuantNetwork net = build_network({1}, spec, 1);
    net.layers[0].weights.data = {1.0};
    net.layers[0].bias.data = {-5.0};  // pre-activation stays negative
    Tensor batch({1, 1});
    batch.data = {1.0};
    ForwardTrace trace;
    forward_float(net, batch, {}, &trace);
    Tensor up({1, 1});
    up.data = {1.0};
    Gradients g = backward(net, trace, up);
    CHECK(g.dweights[0].data[0] == 0.0);
    CHECK(g.dbias[0].data[0] == 0.0);
}

TEST_CASE("fan_in and mult_count match a brute-force multiplication count") {
    QuantNetwork net = small_cnn();
    CHECK(net.layers[0].fan_in == 9);
    CHECK(net.layers[0].mult_count == 9LL * 3 * 6 * 6);
    CHECK(net.layers[3].fan_in == 3 * 2 * 2);
    CHECK(net.layers[3].mult_count == 12LL * 4 * 2 * 2);
    CHECK(net.layers[6].fan_in == 16);
    CHECK(net.layers[6].mult_count == 16LL * 5);

    for (int li : net.compute_layers()) {
        const Layer& l = net.layers[li];
        long long count = 0;
        if (l.kind == LayerKind::Dense)
            count = static_cast<long long>(l.in_shape[0]) * l.out_shape[0];
        else
            count = static_cast<long long>(l.out_shape[0]) * l.out_shape[1] * l.out_shape[2] *
                    l.in_shape[0] * l.kernel * l.kernel;
        CHECK(count == l.mult_count);
        CHECK(l.mult_count % l.fan_in == 0);
        CHECK(l.mult_count / l.fan_in == static_cast<long long>(l.out_numel()));
    }
}

TEST_CASE("integer forward is deterministic and honors the accurate map") {
    QuantNetwork net = small_cnn(21);
    SyntheticSpec sp;
    sp.classes = 5;
    sp.per_class = 30;
    sp.dim = {1, 8, 8};
    sp.seed = 9;
    Dataset ds = gen_synthetic(sp);
    calibrate(net, ds);

    Tensor logits1 = forward_accurate(net, ds.inputs);
    Tensor logits2 = forward_accurate(net, ds.inputs);
    REQUIRE(logits1.data == logits2.data);

    auto acc_map = std::make_shared<const ErrorMap>(accurate_map());
    for (int li : net.compute_layers()) net.layers[li].assigned_map = acc_map;
    Tensor logits3 = forward_approx(net, ds.inputs);
    REQUIRE(logits1.data == logits3.data);
}

TEST_CASE("all-zero weights produce logits equal to the bias") {
    std::vector<LayerSpec> spec{{.kind = "dense", .out_features = 3}};
    QuantNetwork net = build_network({4}, spec, 1);
    net.layers[0].weights = Tensor({3, 4});
    net.layers[0].bias.data = {0.5, -1.0, 2.0};
    Tensor batch = random_tensor({6, 4}, 3);
    Tensor logits = forward_float(net, batch);
    for (int n = 0; n < 6; ++n) {
        CHECK(logits.data[n * 3 + 0] == doctest::Approx(0.5));
        CHECK(logits.data[n * 3 + 1] == doctest::Approx(-1.0));
        CHECK(logits.data[n * 3 + 2] == doctest::Approx(2.0));
    }
}

TEST_CASE("forward_approx demands an assignment") {
    QuantNetwork net = small_cnn(22);
    SyntheticSpec sp;
    sp.classes = 2;
    sp.per_class = 10;
    sp.dim = {1, 8, 8};
    Dataset ds = gen_synthetic(sp);
    calibrate(net, ds);
    CHECK_THROWS_AS(forward_approx(net, ds.inputs), ConfigError);
}

TEST_CASE("retraining with zero epochs leaves the network unchanged") {
    QuantNetwork net = small_cnn(23);
    SyntheticSpec sp;
    sp.classes = 5;
    sp.per_class = 20;
    sp.dim = {1, 8, 8};
    Dataset ds = gen_synthetic(sp);
    calibrate(net, ds);
    auto acc_map = std::make_shared<const ErrorMap>(accurate_map());
    for (int li : net.compute_layers()) net.layers[li].assigned_map = acc_map;
    QuantNetwork before = net;
    TrainConfig cfg;
    cfg.epochs = 0;
    retrain_ste(net, ds, cfg);
    for (int li : net.compute_layers())
        CHECK(net.layers[li].weights.data == before.layers[li].weights.data);
}

TEST_CASE("ste retraining with the accurate map behaves like ordinary training") {
    SyntheticSpec sp;
    sp.classes = 3;
    sp.per_class = 60;
    sp.dim = {1, 8, 8};
    sp.seed = 4;
    Dataset ds = gen_synthetic(sp);
    std::vector<LayerSpec> spec{{.kind = "flatten"}, {.kind = "dense", .out_features = 3}};
    QuantNetwork net = build_network({1, 8, 8}, spec, 7);
    TrainConfig pre;
    pre.epochs = 20;
    pre.lr = 0.5;
    pre.batch_size = 16;
    train_float(net, ds, pre);
    calibrate(net, ds);
    auto acc_map = std::make_shared<const ErrorMap>(accurate_map());
    for (int li : net.compute_layers()) net.layers[li].assigned_map = acc_map;
    double before = evaluate_int(net, ds, true);

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.lr = 0.1;
    cfg.batch_size = 16;
    retrain_ste(net, ds, cfg);
    calibrate(net, ds);
    double after = evaluate_int(net, ds, true);
    CHECK(after >= before - 0.02);  // continuation, within noise of the baseline
    CHECK(after > 0.9);
}

TEST_CASE("diverging retraining aborts and restores the last good state") {
    SyntheticSpec sp;
    sp.classes = 3;
    sp.per_class = 20;
    sp.dim = {1, 8, 8};
    Dataset ds = gen_synthetic(sp);
    std::vector<LayerSpec> spec{{.kind = "flatten"}, {.kind = "dense", .out_features = 3}};
    QuantNetwork net = build_network({1, 8, 8}, spec, 7);
    calibrate(net, ds);
    auto acc_map = std::make_shared<const ErrorMap>(accurate_map());
    for (int li : net.compute_layers()) net.layers[li].assigned_map = acc_map;
    QuantNetwork before = net;
    // a non-finite activation aborts the behavioral forward
    ds.inputs.data[5] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.lr = 0.1;
    CHECK_THROWS_AS(retrain_ste(net, ds, cfg), NumericError);
    for (int li : net.compute_layers())
        CHECK(net.layers[li].weights.data == before.layers[li].weights.data);
}

TEST_CASE("diverging float training aborts and restores the last good state") {
    SyntheticSpec sp;
    sp.classes = 5;
    sp.per_class = 20;
    sp.dim = {1, 8, 8};
    Dataset ds = gen_synthetic(sp);
    // no relu between input and logits, so the NaN reaches the loss
    std::vector<LayerSpec> spec{{.kind = "flatten"}, {.kind = "dense", .out_features = 5}};
    QuantNetwork net = build_network({1, 8, 8}, spec, 31);
    QuantNetwork before = net;
    ds.inputs.data[3] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.lr = 0.05;
    CHECK_THROWS_AS(train_float(net, ds, cfg), NumericError);
    for (int li : net.compute_layers())
        CHECK(net.layers[li].weights.data == before.layers[li].weights.data);
}

TEST_CASE("backward rejects a trace from another network") {
    QuantNetwork net = small_cnn();
    ForwardTrace empty;
    Tensor dl({1, 5});
    CHECK_THROWS_AS(backward(net, empty, dl), ConfigError);
}
