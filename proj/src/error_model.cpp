#include "axnn/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "axnn/errors.hpp"
#include "axnn/quantize.hpp"
#include "axnn/rng.hpp"

namespace axnn {

OperandHistogram histogram(std::span<const uint8_t> values) {
    if (values.empty()) throw ConfigError("histogram of empty operand collection");
    OperandHistogram h;
    for (uint8_t v : values) h.probs[v] += 1.0;
    for (double& p : h.probs) p /= static_cast<double>(values.size());
    return h;
}

MeanStd single_dist_stats(const ErrorMap& map, const OperandHistogram& px,
                          const OperandHistogram& pw) {
    // restrict both passes to nonzero support
    std::vector<int> xs, ws;
    for (int i = 0; i < 256; ++i) {
        if (px.probs[i] > 0) xs.push_back(i);
        if (pw.probs[i] > 0) ws.push_back(i);
    }
    double mu = 0;
    for (int x : xs) {
        double acc = 0;
        for (int w : ws) acc += pw.probs[w] * map.error(static_cast<uint8_t>(x), static_cast<uint8_t>(w));
        mu += px.probs[x] * acc;
    }
    double var = 0;
    for (int x : xs) {
        double acc = 0;
        for (int w : ws) {
            double d = map.error(static_cast<uint8_t>(x), static_cast<uint8_t>(w)) - mu;
            acc += pw.probs[w] * d * d;
        }
        var += px.probs[x] * acc;
    }
    return {mu, std::sqrt(std::max(0.0, var))};
}

MeanStd combine_groups(std::span<const MeanStd> groups) {
    if (groups.empty()) throw ConfigError("combine_groups called with no groups");
    const double k = static_cast<double>(groups.size());
    double mu_sum = 0, sq_sum = 0;
    for (const auto& g : groups) {
        mu_sum += g.mean;
        sq_sum += g.stddev * g.stddev + g.mean * g.mean;
    }
    double var = (sq_sum - mu_sum * mu_sum / k) / k;
    return {mu_sum / k, std::sqrt(std::max(0.0, var))};
}

ErrorStats ErrorStats::from_per_mult(double mu_z, double sigma_z, int fan_in) {
    ErrorStats s;
    s.mu_z = mu_z;
    s.sigma_z = sigma_z;
    s.fan_in = fan_in;
    s.mu_e = fan_in * mu_z;
    s.sigma_e = std::sqrt(static_cast<double>(fan_in)) * sigma_z;
    return s;
}

ErrorStats ErrorStats::from_aggregate(double mu_e, double sigma_e, int fan_in) {
    ErrorStats s;
    s.fan_in = fan_in;
    s.mu_e = mu_e;
    s.sigma_e = sigma_e;
    s.mu_z = mu_e / fan_in;
    s.sigma_z = sigma_e / std::sqrt(static_cast<double>(fan_in));
    return s;
}

std::map<int, LayerInputRecord> record_layer_inputs(const QuantNetwork& net, const Dataset& data) {
    if (data.size() == 0) throw ConfigError("cannot record activations on an empty dataset");
    ActivationRecorder rec;
    const int chunk = 256;
    std::vector<int> idx(data.size());
    for (size_t i = 0; i < data.size(); ++i) idx[i] = static_cast<int>(i);
    for (size_t i = 0; i < data.size(); i += chunk) {
        std::vector<int> part(idx.begin() + i, idx.begin() + std::min(data.size(), i + chunk));
        forward_int(net, data.gather(part), /*use_maps=*/false, &rec);
    }
    std::map<int, LayerInputRecord> out;
    for (auto& [layer, images] : rec.qinputs) {
        LayerInputRecord r;
        r.in_shape = net.layers[layer].in_shape;
        r.images = std::move(images);
        r.preact_mean = rec.preact_stats[layer].mean;
        r.preact_std = rec.preact_stats[layer].stddev();
        out.emplace(layer, std::move(r));
    }
    return out;
}

SampleSet draw_samples(const Layer& layer, const LayerInputRecord& record, int k, uint64_t seed) {
    if (k <= 0) throw ConfigError("sample count k must be positive");
    if (record.images.empty()) throw ConfigError("no recorded activations for layer " + layer.name);
    SampleSet set;
    set.fan_in = layer.fan_in;
    set.samples.reserve(k);
    auto eng = make_engine(seed, 0x5E7);
    std::uniform_int_distribution<size_t> pick_img(0, record.images.size() - 1);

    if (layer.kind == LayerKind::Dense) {
        for (int i = 0; i < k; ++i) set.samples.push_back(record.images[pick_img(eng)]);
    } else if (layer.kind == LayerKind::Conv2d) {
        int c = layer.in_shape[0], h = layer.in_shape[1], w = layer.in_shape[2];
        int oh = layer.out_shape[1], ow = layer.out_shape[2], kk = layer.kernel;
        std::uniform_int_distribution<int> pick_y(0, oh - 1), pick_x(0, ow - 1);
        for (int i = 0; i < k; ++i) {
            const auto& img = record.images[pick_img(eng)];
            int oy = pick_y(eng), ox = pick_x(eng);
            std::vector<uint8_t> patch;
            patch.reserve(layer.fan_in);
            for (int ci = 0; ci < c; ++ci)
                for (int ky = 0; ky < kk; ++ky)
                    for (int kx = 0; kx < kk; ++kx)
                        patch.push_back(img[(static_cast<size_t>(ci) * h + oy + ky) * w + ox + kx]);
            set.samples.push_back(std::move(patch));
        }
    } else {
        throw ConfigError("cannot sample operands for layer " + layer.name);
    }
    return set;
}

OperandHistogram weight_histogram(const Layer& layer) {
    QuantizedLayer ql = quantize_layer_weights(layer);
    return histogram(ql.qweights);
}

OperandHistogram global_activation_histogram(const LayerInputRecord& record) {
    size_t total = 0;
    for (const auto& img : record.images) total += img.size();
    std::vector<uint8_t> all;
    all.reserve(total);
    for (const auto& img : record.images) all.insert(all.end(), img.begin(), img.end());
    return histogram(all);
}

ErrorStats estimate_layer_error(const ErrorMap& map, const Layer& layer, const SampleSet& samples,
                                const OperandHistogram& pw) {
    if (samples.samples.empty()) throw ConfigError("estimate_layer_error: k = 0");
    if (samples.fan_in != layer.fan_in)
        throw ConfigError("sample fan-in " + std::to_string(samples.fan_in) +
                          " does not match layer fan-in " + std::to_string(layer.fan_in));
    // conditional moments of e(x, .) under the weight distribution
    std::array<double, 256> e_mean{}, e_var{};
    for (int x = 0; x < 256; ++x) {
        double m1 = 0, m2 = 0;
        for (int w = 0; w < 256; ++w) {
            if (pw.probs[w] == 0) continue;
            double e = map.error(static_cast<uint8_t>(x), static_cast<uint8_t>(w));
            m1 += pw.probs[w] * e;
            m2 += pw.probs[w] * e * e;
        }
        e_mean[x] = m1;
        e_var[x] = std::max(0.0, m2 - m1 * m1);
    }

    // One sample pins the operand values of one receptive field; only the
    // weight draw stays random. Its aggregate error has mean n * mean_local
    // and variance n * avg conditional variance. Pooling those aggregates
    // across samples then carries the spread of per-sample means at full
    // weight, which is what the global-histogram model misses.
    std::vector<MeanStd> per_output;
    per_output.reserve(samples.samples.size());
    for (const auto& s : samples.samples) {
        if (static_cast<int>(s.size()) != layer.fan_in)
            throw ConfigError("sample length does not match layer fan-in");
        double mu = 0, var = 0;
        for (uint8_t x : s) {
            mu += e_mean[x];
            var += e_var[x];
        }
        per_output.push_back({mu, std::sqrt(var)});
    }
    MeanStd agg = combine_groups(per_output);
    return ErrorStats::from_aggregate(agg.mean, agg.stddev, layer.fan_in);
}

ErrorStats single_dist_mode(const ErrorMap& map, const Layer& layer,
                            const OperandHistogram& global_px, const OperandHistogram& pw) {
    MeanStd z = single_dist_stats(map, global_px, pw);
    return ErrorStats::from_per_mult(z.mean, z.stddev, layer.fan_in);
}

MeanStd mc_oracle_from_record(const ErrorMap& map, const Layer& layer,
                              const LayerInputRecord& record) {
    if (!layer.has_weights()) throw ConfigError("mc_oracle on a layer without weights");
    QuantizedLayer ql = quantize_layer_weights(layer);
    MeanVarAccum acc;
    for (const auto& qin : record.images) {
        std::vector<int32_t> exact = int_layer_preact(layer, ql, qin, nullptr);
        std::vector<int32_t> approx = int_layer_preact(layer, ql, qin, &map);
        for (size_t j = 0; j < exact.size(); ++j)
            acc.add(static_cast<double>(approx[j]) - static_cast<double>(exact[j]));
    }
    return {acc.mean, acc.stddev()};
}

MeanStd mc_oracle(const ErrorMap& map, const QuantNetwork& net, int layer_index,
                  const Dataset& data) {
    if (layer_index < 0 || layer_index >= static_cast<int>(net.layers.size()))
        throw ConfigError("mc_oracle: layer index out of range");
    const Layer& layer = net.layers[layer_index];
    if (!layer.has_weights()) throw ConfigError("mc_oracle on a layer without weights");
    auto records = record_layer_inputs(net, data);
    return mc_oracle_from_record(map, layer, records.at(layer_index));
}

}  // namespace axnn
