#include "axnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

double scheduled_lr(double lr, double decay, int decay_every, int epoch) {
    if (decay_every <= 0) return lr;
    return lr * std::pow(decay, epoch / decay_every);
}

std::vector<std::vector<int>> make_batches(size_t n, int batch_size, uint64_t seed, int epoch) {
    if (batch_size <= 0) throw ConfigError("batch_size must be positive");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto eng = make_engine(seed, 0xBA7C, static_cast<uint64_t>(epoch));
    std::shuffle(idx.begin(), idx.end(), eng);
    std::vector<std::vector<int>> batches;
    for (size_t i = 0; i < n; i += batch_size) {
        size_t end = std::min(n, i + batch_size);
        batches.emplace_back(idx.begin() + i, idx.begin() + end);
    }
    return batches;
}

namespace {

template <typename ForwardFn>
TrainResult run_epochs(QuantNetwork& net, const Dataset& train, const TrainConfig& cfg,
                       ForwardFn&& fwd) {
    if (train.size() == 0) throw ConfigError("training data is empty");
    TrainResult res;
    QuantNetwork snapshot = net;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = scheduled_lr(cfg.lr, cfg.lr_decay, cfg.decay_every, epoch);
        double loss_sum = 0.0;
        size_t batches_done = 0;
        try {
            for (const auto& bidx :
                 make_batches(train.size(), cfg.batch_size, cfg.shuffle_seed, epoch)) {
                Tensor batch = train.gather(bidx);
                std::vector<int> labels = train.gather_labels(bidx);
                ForwardTrace trace;
                fwd(net, batch, trace);
                LossGrad lg = softmax_cross_entropy(trace.logits, labels);
                if (!std::isfinite(lg.loss)) throw NumericError("training loss diverged");
                Gradients g = backward(net, trace, lg.dlogits);
                sgd_step(net, g, lr);
                loss_sum += lg.loss;
                ++batches_done;
            }
        } catch (const NumericError& e) {
            net = snapshot;  // last completed epoch
            throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batches_done) + ")");
        }
        res.epoch_loss.push_back(loss_sum / batches_done);
        snapshot = net;
    }
    return res;
}

}  // namespace

TrainResult train_float(QuantNetwork& net, const Dataset& train, const TrainConfig& cfg) {
    return run_epochs(net, train, cfg, [](QuantNetwork& n, const Tensor& b, ForwardTrace& t) {
        forward_float(n, b, {}, &t);
    });
}

TrainResult retrain_ste(QuantNetwork& net, const Dataset& train, const TrainConfig& cfg) {
    return run_epochs(net, train, cfg, [](QuantNetwork& n, const Tensor& b, ForwardTrace& t) {
        forward_int(n, b, /*use_maps=*/true, nullptr, &t);
    });
}

void calibrate(QuantNetwork& net, const Dataset& calib) {
    if (calib.size() == 0) throw ConfigError("calibration data is empty");
    ForwardTrace trace;
    forward_float(net, calib.inputs, {}, &trace);
    for (int i : net.compute_layers()) {
        net.layers[i].act_q = calibrate_quant(trace.layers[i].input, QuantMode::ActivationUnsigned);
        net.layers[i].act_calibrated = true;
    }
}

namespace {

template <typename Fn>
double evaluate_batched(const QuantNetwork& net, const Dataset& ds, Fn&& fwd) {
    if (ds.size() == 0) throw ConfigError("evaluation data is empty");
    const int chunk = 256;
    double hits = 0;
    std::vector<int> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (size_t i = 0; i < ds.size(); i += chunk) {
        std::vector<int> part(idx.begin() + i, idx.begin() + std::min(ds.size(), i + chunk));
        Tensor logits = fwd(ds.gather(part), i / chunk);
        hits += accuracy(logits, ds.gather_labels(part)) * part.size();
    }
    return hits / ds.size();
}

}  // namespace

double evaluate_float(const QuantNetwork& net, const Dataset& ds) {
    return evaluate_batched(net, ds,
                            [&](const Tensor& b, size_t) { return forward_float(net, b); });
}

double evaluate_int(const QuantNetwork& net, const Dataset& ds, bool use_maps) {
    return evaluate_batched(net, ds,
                            [&](const Tensor& b, size_t) { return forward_int(net, b, use_maps); });
}

double evaluate_agn(const QuantNetwork& net, const Dataset& ds, uint64_t noise_seed) {
    auto compute = net.compute_layers();
    return evaluate_batched(net, ds, [&](const Tensor& b, size_t chunk_idx) {
        std::vector<NoiseDraw> draws;
        draws.reserve(compute.size());
        for (size_t c = 0; c < compute.size(); ++c) {
            std::vector<int> shape{b.shape[0]};
            const auto& os = net.layers[compute[c]].out_shape;
            shape.insert(shape.end(), os.begin(), os.end());
            draws.push_back(make_noise_draw(shape, mix_seed(noise_seed, 0xE7A1, chunk_idx, c)));
        }
        ForwardOptions opt;
        opt.fake_quant = true;
        opt.noise = &draws;
        return forward_float(net, b, opt);
    });
}

}  // namespace axnn
