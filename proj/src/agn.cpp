#include "axnn/agn.hpp"

#include <cmath>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"
#include "axnn/train.hpp"

namespace axnn {

void NoiseConfig::validate() const {
    if (!(sigma_max > 0)) throw ConfigError("sigma_max must be > 0");
    if (lambda < 0) throw ConfigError("lambda must be >= 0");
    if (epochs < 0) throw ConfigError("search epochs must be >= 0");
    if (!(lr > 0)) throw ConfigError("search learning rate must be > 0");
    if (batch_size <= 0) throw ConfigError("batch_size must be positive");
}

std::vector<double> relative_costs(const QuantNetwork& net) {
    auto compute = net.compute_layers();
    if (compute.empty()) throw ConfigError("network has no compute layers");
    double total = 0;
    for (int i : compute) total += static_cast<double>(net.layers[i].mult_count);
    std::vector<double> c;
    c.reserve(compute.size());
    for (int i : compute) c.push_back(static_cast<double>(net.layers[i].mult_count) / total);
    return c;
}

Tensor inject_noise(const Tensor& y, double sigma_l, const NoiseDraw& q) {
    if (q.q.shape != y.shape) throw ConfigError("noise draw shape does not match layer output");
    double bstd = tensor_std(y);
    Tensor out = y;
    for (size_t i = 0; i < out.numel(); ++i) out.data[i] += sigma_l * bstd * q.q.data[i];
    return out;
}

double grad_sigma_task(const Tensor& upstream, const Tensor& y, const NoiseDraw& q) {
    if (q.q.shape != y.shape || upstream.shape != y.shape)
        throw ConfigError("grad_sigma_task: shape mismatch between upstream, output and draw");
    return grad_sigma_task(upstream, tensor_std(y), q);
}

double grad_sigma_task(const Tensor& upstream, double batch_std, const NoiseDraw& q) {
    if (q.q.shape != upstream.shape)
        throw ConfigError("grad_sigma_task: shape mismatch between upstream and draw");
    double acc = 0;
    for (size_t i = 0; i < upstream.numel(); ++i) acc += upstream.data[i] * batch_std * q.q.data[i];
    return acc;
}

double noise_loss(std::span<const LayerPerturbation> layers, double sigma_max) {
    double acc = 0;
    for (const auto& l : layers) acc += std::min(std::abs(l.sigma_l), sigma_max) * l.c_l;
    return -acc;
}

double grad_sigma_noise(double sigma_l, double c_l, double sigma_max) {
    if (std::abs(sigma_l) > sigma_max) return 0.0;
    if (sigma_l == 0.0) return 0.0;
    return sigma_l > 0 ? -c_l : c_l;
}

double total_loss(double task, double noise, double lambda) { return task + lambda * noise; }

std::vector<SearchLogRow> gradient_search(QuantNetwork& net, const Dataset& train,
                                          const NoiseConfig& cfg) {
    cfg.validate();
    if (train.size() == 0) throw ConfigError("search training data is empty");
    auto compute = net.compute_layers();
    for (int i : compute)
        if (!net.layers[i].act_calibrated)
            throw ConfigError("gradient search needs a calibrated baseline network");
    std::vector<double> costs = relative_costs(net);
    for (size_t c = 0; c < compute.size(); ++c) net.layers[compute[c]].sigma_l = cfg.sigma_init;

    std::vector<SearchLogRow> log;
    QuantNetwork snapshot = net;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr = scheduled_lr(cfg.lr, cfg.lr_decay, cfg.decay_every, epoch);
        double task_sum = 0, noise_sum = 0, total_sum = 0;
        size_t batches_done = 0;
        try {
            for (const auto& bidx :
                 make_batches(train.size(), cfg.batch_size, cfg.shuffle_seed, epoch)) {
                Tensor batch = train.gather(bidx);
                std::vector<int> labels = train.gather_labels(bidx);

                std::vector<NoiseDraw> draws;
                draws.reserve(compute.size());
                for (size_t c = 0; c < compute.size(); ++c) {
                    std::vector<int> shape{batch.shape[0]};
                    const auto& os = net.layers[compute[c]].out_shape;
                    shape.insert(shape.end(), os.begin(), os.end());
                    draws.push_back(make_noise_draw(
                        shape,
                        mix_seed(cfg.noise_seed, static_cast<uint64_t>(epoch), batches_done, c)));
                }

                ForwardOptions opt;
                opt.fake_quant = true;
                opt.noise = &draws;
                ForwardTrace trace;
                forward_float(net, batch, opt, &trace);
                LossGrad lg = softmax_cross_entropy(trace.logits, labels);

                std::vector<LayerPerturbation> perts(compute.size());
                for (size_t c = 0; c < compute.size(); ++c) {
                    perts[c].sigma_l = net.layers[compute[c]].sigma_l;
                    perts[c].c_l = costs[c];
                    perts[c].last_batch_std = trace.layers[compute[c]].batch_std;
                }
                double ln = noise_loss(perts, cfg.sigma_max);
                double lt = lg.loss;
                double l = total_loss(lt, ln, cfg.lambda);
                if (!std::isfinite(l)) throw NumericError("gradient search loss diverged");

                Gradients g = backward(net, trace, lg.dlogits);
                sgd_step(net, g, lr);
                for (size_t c = 0; c < compute.size(); ++c) {
                    Layer& layer = net.layers[compute[c]];
                    double dsig =
                        g.dsigma[compute[c]] +
                        cfg.lambda * grad_sigma_noise(layer.sigma_l, costs[c], cfg.sigma_max);
                    layer.sigma_l -= lr * dsig;
                }

                task_sum += lt;
                noise_sum += ln;
                total_sum += l;
                ++batches_done;
            }
        } catch (const NumericError& e) {
            net = snapshot;  // last completed epoch
            throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batches_done) + ")");
        }
        SearchLogRow row;
        row.epoch = epoch;
        row.task_loss = task_sum / batches_done;
        row.noise_loss = noise_sum / batches_done;
        row.total_loss = total_sum / batches_done;
        for (int i : compute) row.sigmas.push_back(net.layers[i].sigma_l);
        log.push_back(std::move(row));
        snapshot = net;
    }
    return log;
}

}  // namespace axnn
