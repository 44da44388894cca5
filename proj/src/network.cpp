#include "axnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

namespace {

LayerKind kind_from_string(const std::string& s) {
    if (s == "dense") return LayerKind::Dense;
    if (s == "conv2d") return LayerKind::Conv2d;
    if (s == "relu") return LayerKind::Relu;
    if (s == "maxpool") return LayerKind::MaxPool;
    if (s == "flatten") return LayerKind::Flatten;
    throw ConfigError("unknown layer kind '" + s + "'");
}

std::string short_name(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv";
        case LayerKind::Relu: return "relu";
        case LayerKind::MaxPool: return "pool";
        case LayerKind::Flatten: return "flat";
    }
    return "layer";
}

}  // namespace

std::vector<int> QuantNetwork::compute_layers() const {
    std::vector<int> out;
    for (size_t i = 0; i < layers.size(); ++i)
        if (layers[i].has_weights()) out.push_back(static_cast<int>(i));
    return out;
}

int QuantNetwork::num_outputs() const {
    if (layers.empty()) throw ConfigError("empty network");
    return static_cast<int>(Tensor::numel_of(layers.back().out_shape));
}

void QuantNetwork::validate() const {
    if (layers.empty()) throw ConfigError("network has no layers");
    const std::vector<int>* prev = &input_shape;
    for (const auto& l : layers) {
        if (l.in_shape != *prev)
            throw ConfigError("layer " + l.name + " input shape " + shape_str(l.in_shape) +
                              " does not chain from " + shape_str(*prev));
        if (l.has_weights()) {
            if (l.weights.numel() == 0) throw ConfigError("layer " + l.name + " has no weights");
            if (l.fan_in <= 0 || l.mult_count <= 0)
                throw ConfigError("layer " + l.name + " has unresolved fan-in");
        }
        prev = &l.out_shape;
    }
}

QuantNetwork build_network(std::vector<int> input_shape, const std::vector<LayerSpec>& specs,
                           uint64_t weight_seed) {
    if (specs.empty()) throw ConfigError("architecture has no layers");
    QuantNetwork net;
    net.input_shape = input_shape;
    net.spec = specs;
    net.rng_seed = weight_seed;

    std::vector<int> shape = input_shape;
    for (size_t i = 0; i < specs.size(); ++i) {
        const LayerSpec& s = specs[i];
        Layer l;
        l.kind = kind_from_string(s.kind);
        l.name = short_name(l.kind) + std::to_string(i);
        l.in_shape = shape;
        switch (l.kind) {
            case LayerKind::Conv2d: {
                if (shape.size() != 3) throw ConfigError(l.name + ": conv2d needs [C,H,W] input");
                int c = shape[0], h = shape[1], w = shape[2];
                if (s.out_channels <= 0 || s.kernel <= 0)
                    throw ConfigError(l.name + ": conv2d needs out_channels and kernel");
                if (h < s.kernel || w < s.kernel)
                    throw ConfigError(l.name + ": kernel larger than input");
                l.kernel = s.kernel;
                l.out_shape = {s.out_channels, h - s.kernel + 1, w - s.kernel + 1};
                l.fan_in = c * s.kernel * s.kernel;
                l.mult_count = static_cast<long long>(l.fan_in) * Tensor::numel_of(l.out_shape);
                l.weights = Tensor({s.out_channels, c, s.kernel, s.kernel});
                l.bias = Tensor({s.out_channels});
                break;
            }
            case LayerKind::Dense: {
                if (shape.size() != 1)
                    throw ConfigError(l.name + ": dense needs flat input, got " + shape_str(shape));
                if (s.out_features <= 0) throw ConfigError(l.name + ": dense needs out_features");
                l.out_shape = {s.out_features};
                l.fan_in = shape[0];
                l.mult_count = static_cast<long long>(l.fan_in) * s.out_features;
                l.weights = Tensor({s.out_features, shape[0]});
                l.bias = Tensor({s.out_features});
                break;
            }
            case LayerKind::Relu:
                l.out_shape = shape;
                break;
            case LayerKind::MaxPool: {
                if (shape.size() != 3) throw ConfigError(l.name + ": maxpool needs [C,H,W] input");
                if (s.pool <= 0) throw ConfigError(l.name + ": pool must be positive");
                l.pool = s.pool;
                int oh = shape[1] / s.pool, ow = shape[2] / s.pool;
                if (oh == 0 || ow == 0) throw ConfigError(l.name + ": pool window larger than input");
                l.out_shape = {shape[0], oh, ow};
                break;
            }
            case LayerKind::Flatten:
                l.out_shape = {static_cast<int>(Tensor::numel_of(shape))};
                break;
        }
        if (l.has_weights()) {
            auto eng = make_engine(weight_seed, i, 0xF17);
            std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / l.fan_in));
            for (auto& v : l.weights.data) v = dist(eng);
        }
        shape = l.out_shape;
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

// ---- shared float-domain layer ops ------------------------------------------

namespace {

int batch_of(const Tensor& t) {
    if (t.shape.empty()) throw ConfigError("batch tensor has no dimensions");
    return t.shape[0];
}

std::vector<int> with_batch(int b, const std::vector<int>& s) {
    std::vector<int> out{b};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
    int bs = batch_of(x), in = w.shape[1], out = w.shape[0];
    Tensor y({bs, out});
    for (int n = 0; n < bs; ++n) {
        const double* xp = x.data.data() + static_cast<size_t>(n) * in;
        for (int o = 0; o < out; ++o) {
            const double* wp = w.data.data() + static_cast<size_t>(o) * in;
            double acc = b.data[o];
            for (int i = 0; i < in; ++i) acc += wp[i] * xp[i];
            y.data[static_cast<size_t>(n) * out + o] = acc;
        }
    }
    return y;
}

Tensor conv_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    const std::vector<int>& out_shape) {
    int bs = batch_of(x);
    int c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    int oc = out_shape[0], oh = out_shape[1], ow = out_shape[2];
    int k = w.shape[2];
    Tensor y(with_batch(bs, out_shape));
    for (int n = 0; n < bs; ++n)
        for (int o = 0; o < oc; ++o)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = b.data[o];
                    for (int ci = 0; ci < c; ++ci)
                        for (int ky = 0; ky < k; ++ky) {
                            const double* xp =
                                x.data.data() +
                                ((static_cast<size_t>(n) * c + ci) * h + oy + ky) * wd + ox;
                            const double* wp =
                                w.data.data() +
                                ((static_cast<size_t>(o) * c + ci) * k + ky) * k;
                            for (int kx = 0; kx < k; ++kx) acc += wp[kx] * xp[kx];
                        }
                    y.data[((static_cast<size_t>(n) * oc + o) * oh + oy) * ow + ox] = acc;
                }
    return y;
}

Tensor relu_forward(const Tensor& x) {
    Tensor y(x.shape);
    for (size_t i = 0; i < x.numel(); ++i) y.data[i] = x.data[i] > 0 ? x.data[i] : 0.0;
    return y;
}

Tensor maxpool_forward(const Tensor& x, int p, const std::vector<int>& out_shape,
                       std::vector<int64_t>* argmax) {
    int bs = batch_of(x);
    int c = x.shape[1], h = x.shape[2], w = x.shape[3];
    int oh = out_shape[1], ow = out_shape[2];
    Tensor y(with_batch(bs, out_shape));
    if (argmax) argmax->assign(y.numel(), -1);
    size_t oi = 0;
    for (int n = 0; n < bs; ++n)
        for (int ci = 0; ci < c; ++ci)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    double best = -std::numeric_limits<double>::infinity();
                    int64_t best_idx = -1;
                    for (int py = 0; py < p; ++py)
                        for (int px = 0; px < p; ++px) {
                            int64_t idx = ((static_cast<int64_t>(n) * c + ci) * h + oy * p + py) * w +
                                          ox * p + px;
                            if (x.data[idx] > best) {
                                best = x.data[idx];
                                best_idx = idx;
                            }
                        }
                    y.data[oi] = best;
                    if (argmax) (*argmax)[oi] = best_idx;
                }
    return y;
}

}  // namespace

// ---- float forward -----------------------------------------------------------

Tensor forward_float(const QuantNetwork& net, const Tensor& batch, const ForwardOptions& opt,
                     ForwardTrace* trace) {
    if (with_batch(batch_of(batch), net.input_shape) != batch.shape)
        throw ConfigError("batch shape " + shape_str(batch.shape) + " does not match input " +
                          shape_str(net.input_shape));
    int compute_seen = 0;
    if (trace) {
        trace->layers.clear();
        trace->layers.resize(net.layers.size());
    }
    Tensor x = batch;
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        LayerTrace local;
        LayerTrace& t = trace ? trace->layers[i] : local;
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::Conv2d: {
                Tensor in = x;
                Tensor w = l.weights;
                if (opt.fake_quant) {
                    if (!l.act_calibrated)
                        throw ConfigError("layer " + l.name +
                                          " has no calibrated activation params for fake quantization");
                    in = fake_quant(in, l.act_q);
                    w = fake_quant(w, calibrate_quant(w, QuantMode::WeightAffine));
                }
                Tensor y = l.kind == LayerKind::Dense ? dense_forward(in, w, l.bias)
                                                      : conv_forward(in, w, l.bias, l.out_shape);
                double bstd = opt.noise_std_override ? opt.noise_std_override->at(compute_seen)
                                                     : tensor_std(y);
                const NoiseDraw* draw = nullptr;
                if (opt.noise) {
                    const NoiseDraw& q = opt.noise->at(compute_seen);
                    if (q.q.shape != y.shape)
                        throw ConfigError("noise draw shape mismatch at layer " + l.name);
                    draw = &q;
                }
                if (trace) {
                    t.input = std::move(in);
                    t.weights_used = std::move(w);
                    t.batch_std = bstd;
                    t.preact = y;
                    t.draw = draw;
                }
                if (draw)
                    for (size_t j = 0; j < y.numel(); ++j)
                        y.data[j] += l.sigma_l * bstd * draw->q.data[j];
                ++compute_seen;
                x = std::move(y);
                break;
            }
            case LayerKind::Relu:
                if (trace) t.input = x;
                x = relu_forward(x);
                break;
            case LayerKind::MaxPool:
                if (trace) t.input = x;
                x = maxpool_forward(x, l.pool, l.out_shape, trace ? &t.pool_argmax : nullptr);
                break;
            case LayerKind::Flatten:
                if (trace) t.input = x;
                x.shape = with_batch(batch_of(x), l.out_shape);
                break;
        }
        if (trace) t.output = x;
    }
    if (trace) trace->logits = x;
    return x;
}

// ---- backward ----------------------------------------------------------------

Gradients backward(const QuantNetwork& net, const ForwardTrace& trace, const Tensor& dlogits) {
    if (trace.layers.size() != net.layers.size())
        throw ConfigError("backward called with a trace that does not match the network");
    Gradients g;
    g.dweights.resize(net.layers.size());
    g.dbias.resize(net.layers.size());
    g.dsigma.assign(net.layers.size(), 0.0);

    Tensor grad = dlogits;
    for (int i = static_cast<int>(net.layers.size()) - 1; i >= 0; --i) {
        const Layer& l = net.layers[i];
        const LayerTrace& t = trace.layers[i];
        switch (l.kind) {
            case LayerKind::Dense: {
                if (t.draw) {
                    double ds = 0.0;
                    for (size_t j = 0; j < grad.numel(); ++j)
                        ds += grad.data[j] * t.batch_std * t.draw->q.data[j];
                    g.dsigma[i] = ds;
                }
                int bs = batch_of(t.input), in = l.weights.shape[1], out = l.weights.shape[0];
                g.dweights[i] = Tensor(l.weights.shape);
                g.dbias[i] = Tensor(l.bias.shape);
                Tensor dx(t.input.shape);
                for (int n = 0; n < bs; ++n) {
                    const double* xp = t.input.data.data() + static_cast<size_t>(n) * in;
                    const double* gp = grad.data.data() + static_cast<size_t>(n) * out;
                    double* dxp = dx.data.data() + static_cast<size_t>(n) * in;
                    for (int o = 0; o < out; ++o) {
                        double gv = gp[o];
                        g.dbias[i].data[o] += gv;
                        double* dwp = g.dweights[i].data.data() + static_cast<size_t>(o) * in;
                        const double* wp = t.weights_used.data.data() + static_cast<size_t>(o) * in;
                        for (int k = 0; k < in; ++k) {
                            dwp[k] += gv * xp[k];
                            dxp[k] += gv * wp[k];
                        }
                    }
                }
                grad = std::move(dx);
                break;
            }
            case LayerKind::Conv2d: {
                if (t.draw) {
                    double ds = 0.0;
                    for (size_t j = 0; j < grad.numel(); ++j)
                        ds += grad.data[j] * t.batch_std * t.draw->q.data[j];
                    g.dsigma[i] = ds;
                }
                int bs = batch_of(t.input);
                int c = t.input.shape[1], h = t.input.shape[2], w = t.input.shape[3];
                int oc = l.out_shape[0], oh = l.out_shape[1], ow = l.out_shape[2];
                int k = l.kernel;
                g.dweights[i] = Tensor(l.weights.shape);
                g.dbias[i] = Tensor(l.bias.shape);
                Tensor dx(t.input.shape);
                for (int n = 0; n < bs; ++n)
                    for (int o = 0; o < oc; ++o)
                        for (int oy = 0; oy < oh; ++oy)
                            for (int ox = 0; ox < ow; ++ox) {
                                double gv =
                                    grad.data[((static_cast<size_t>(n) * oc + o) * oh + oy) * ow + ox];
                                g.dbias[i].data[o] += gv;
                                for (int ci = 0; ci < c; ++ci)
                                    for (int ky = 0; ky < k; ++ky) {
                                        size_t xbase =
                                            ((static_cast<size_t>(n) * c + ci) * h + oy + ky) * w + ox;
                                        size_t wbase =
                                            ((static_cast<size_t>(o) * c + ci) * k + ky) * k;
                                        for (int kx = 0; kx < k; ++kx) {
                                            g.dweights[i].data[wbase + kx] +=
                                                gv * t.input.data[xbase + kx];
                                            dx.data[xbase + kx] +=
                                                gv * t.weights_used.data[wbase + kx];
                                        }
                                    }
                            }
                grad = std::move(dx);
                break;
            }
            case LayerKind::Relu: {
                Tensor dx(t.input.shape);
                for (size_t j = 0; j < dx.numel(); ++j)
                    dx.data[j] = t.input.data[j] > 0 ? grad.data[j] : 0.0;
                grad = std::move(dx);
                break;
            }
            case LayerKind::MaxPool: {
                Tensor dx(t.input.shape);
                for (size_t j = 0; j < t.pool_argmax.size(); ++j)
                    dx.data[t.pool_argmax[j]] += grad.data[j];
                grad = std::move(dx);
                break;
            }
            case LayerKind::Flatten:
                grad.shape = t.input.shape;
                break;
        }
    }
    return g;
}

void sgd_step(QuantNetwork& net, const Gradients& g, double lr) {
    for (size_t i = 0; i < net.layers.size(); ++i) {
        Layer& l = net.layers[i];
        if (!l.has_weights()) continue;
        for (size_t j = 0; j < l.weights.numel(); ++j) l.weights.data[j] -= lr * g.dweights[i].data[j];
        for (size_t j = 0; j < l.bias.numel(); ++j) l.bias.data[j] -= lr * g.dbias[i].data[j];
    }
}

LossGrad softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
    int bs = batch_of(logits);
    int k = static_cast<int>(logits.numel()) / bs;
    if (labels.size() != static_cast<size_t>(bs))
        throw ConfigError("labels/batch size mismatch in loss");
    LossGrad out;
    out.dlogits = Tensor(logits.shape);
    double total = 0.0;
    for (int n = 0; n < bs; ++n) {
        const double* lp = logits.data.data() + static_cast<size_t>(n) * k;
        double m = *std::max_element(lp, lp + k);
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += std::exp(lp[j] - m);
        double lse = m + std::log(sum);
        int y = labels[n];
        if (y < 0 || y >= k) throw ConfigError("label out of range");
        total += lse - lp[y];
        double* dp = out.dlogits.data.data() + static_cast<size_t>(n) * k;
        for (int j = 0; j < k; ++j)
            dp[j] = (std::exp(lp[j] - lse) - (j == y ? 1.0 : 0.0)) / bs;
    }
    out.loss = total / bs;
    return out;
}

double accuracy(const Tensor& logits, const std::vector<int>& labels) {
    int bs = batch_of(logits);
    int k = static_cast<int>(logits.numel()) / bs;
    int hits = 0;
    for (int n = 0; n < bs; ++n) {
        const double* lp = logits.data.data() + static_cast<size_t>(n) * k;
        int best = 0;
        for (int j = 1; j < k; ++j)
            if (lp[j] > lp[best]) best = j;
        if (best == labels[n]) ++hits;
    }
    return static_cast<double>(hits) / bs;
}

// ---- integer forward -----------------------------------------------------------

QuantizedLayer quantize_layer_weights(const Layer& layer) {
    if (!layer.has_weights()) throw ConfigError("layer " + layer.name + " has no weights to quantize");
    if (!layer.act_calibrated)
        throw ConfigError("layer " + layer.name + " needs calibrated activation params");
    QuantizedLayer ql;
    ql.wq = calibrate_quant(layer.weights, QuantMode::WeightAffine);
    ql.qweights = quantize(layer.weights, ql.wq);
    double s = layer.act_q.scale * ql.wq.scale;
    ql.qbias.resize(layer.bias.numel());
    for (size_t j = 0; j < layer.bias.numel(); ++j) {
        double ratio = layer.bias.data[j] / s;
        if (!std::isfinite(ratio))
            throw NumericError("non-finite quantized bias at layer " + layer.name);
        ratio = std::clamp(ratio, static_cast<double>(INT32_MIN), static_cast<double>(INT32_MAX));
        ql.qbias[j] = static_cast<int32_t>(std::llround(ratio));
    }
    return ql;
}

std::vector<int32_t> int_layer_preact(const Layer& layer, const QuantizedLayer& ql,
                                      const std::vector<uint8_t>& qin, const ErrorMap* map) {
    if (qin.size() != Tensor::numel_of(layer.in_shape))
        throw ConfigError("quantized input size mismatch at layer " + layer.name);
    const int32_t zx = layer.act_q.zero_point;
    const int32_t zw = ql.wq.zero_point;
    std::vector<int32_t> out(layer.out_numel());

    auto product = [&](uint8_t x, uint8_t w) -> int32_t {
        int32_t p = map ? map->apply(x, w) : static_cast<int32_t>(x) * w;
        return p - zw * x - zx * w + zx * zw;
    };

    if (layer.kind == LayerKind::Dense) {
        int in = layer.in_shape[0], o_n = layer.out_shape[0];
        for (int o = 0; o < o_n; ++o) {
            int32_t acc = ql.qbias[o];
            const uint8_t* wp = ql.qweights.data() + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += product(qin[i], wp[i]);
            out[o] = acc;
        }
    } else {
        int c = layer.in_shape[0], h = layer.in_shape[1], w = layer.in_shape[2];
        int oc = layer.out_shape[0], oh = layer.out_shape[1], ow = layer.out_shape[2];
        int k = layer.kernel;
        for (int o = 0; o < oc; ++o)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    int32_t acc = ql.qbias[o];
                    for (int ci = 0; ci < c; ++ci)
                        for (int ky = 0; ky < k; ++ky) {
                            const uint8_t* xp =
                                qin.data() + (static_cast<size_t>(ci) * h + oy + ky) * w + ox;
                            const uint8_t* wp =
                                ql.qweights.data() + ((static_cast<size_t>(o) * c + ci) * k + ky) * k;
                            for (int kx = 0; kx < k; ++kx) acc += product(xp[kx], wp[kx]);
                        }
                    out[((static_cast<size_t>(o)) * oh + oy) * ow + ox] = acc;
                }
    }
    return out;
}

void MeanVarAccum::add(double v) {
    n += 1;
    double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
}

double MeanVarAccum::stddev() const { return n > 0 ? std::sqrt(m2 / n) : 0.0; }

Tensor forward_int(const QuantNetwork& net, const Tensor& batch, bool use_maps,
                   ActivationRecorder* rec, ForwardTrace* trace) {
    if (with_batch(batch_of(batch), net.input_shape) != batch.shape)
        throw ConfigError("batch shape " + shape_str(batch.shape) + " does not match input " +
                          shape_str(net.input_shape));
    int bs = batch_of(batch);
    if (trace) {
        trace->layers.clear();
        trace->layers.resize(net.layers.size());
    }
    Tensor x = batch;
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        LayerTrace local;
        LayerTrace& t = trace ? trace->layers[i] : local;
        switch (l.kind) {
            case LayerKind::Dense:
            case LayerKind::Conv2d: {
                if (!l.act_calibrated)
                    throw ConfigError("layer " + l.name + " not calibrated for integer forward");
                const ErrorMap* map = nullptr;
                if (use_maps) {
                    if (!l.assigned_map)
                        throw ConfigError("layer " + l.name + " has no assigned multiplier");
                    map = l.assigned_map.get();
                }
                QuantizedLayer ql = quantize_layer_weights(l);
                double s = l.act_q.scale * ql.wq.scale;
                size_t in_n = Tensor::numel_of(l.in_shape);
                size_t out_n = l.out_numel();
                Tensor y(with_batch(bs, l.out_shape));
                std::vector<uint8_t> qin(in_n);
                for (int n = 0; n < bs; ++n) {
                    const double* xp = x.data.data() + static_cast<size_t>(n) * in_n;
                    for (size_t j = 0; j < in_n; ++j) qin[j] = quantize_value(xp[j], l.act_q);
                    std::vector<int32_t> acc = int_layer_preact(l, ql, qin, map);
                    double* yp = y.data.data() + static_cast<size_t>(n) * out_n;
                    for (size_t j = 0; j < out_n; ++j) yp[j] = s * acc[j];
                    if (rec) {
                        rec->qinputs[static_cast<int>(i)].push_back(qin);
                        auto& st = rec->preact_stats[static_cast<int>(i)];
                        for (size_t j = 0; j < out_n; ++j) st.add(yp[j]);
                    }
                }
                if (trace) {
                    // dequantized operands; backward treats the approximate
                    // products as exact (straight-through)
                    t.input = dequantize(quantize(x, l.act_q), x.shape, l.act_q);
                    t.weights_used = dequantize(ql.qweights, l.weights.shape, ql.wq);
                    t.preact = y;
                    t.batch_std = tensor_std(y);
                }
                x = std::move(y);
                break;
            }
            case LayerKind::Relu:
                if (trace) t.input = x;
                x = relu_forward(x);
                break;
            case LayerKind::MaxPool:
                if (trace) t.input = x;
                x = maxpool_forward(x, l.pool, l.out_shape, trace ? &t.pool_argmax : nullptr);
                break;
            case LayerKind::Flatten:
                if (trace) t.input = x;
                x.shape = with_batch(bs, l.out_shape);
                break;
        }
        if (trace) t.output = x;
    }
    if (trace) trace->logits = x;
    return x;
}

}  // namespace axnn
