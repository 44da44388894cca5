#include "axnn/matching.hpp"

#include <algorithm>
#include <cmath>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

SensitivityProfile build_profile(const QuantNetwork& net,
                                 const std::map<int, LayerInputRecord>& records) {
    SensitivityProfile p;
    for (int i : net.compute_layers()) {
        auto it = records.find(i);
        if (it == records.end())
            throw ConfigError("no recorded activations for layer " + net.layers[i].name);
        LayerSensitivity s;
        s.layer_index = i;
        s.sigma_abs = std::abs(net.layers[i].sigma_l);
        s.calib_std = it->second.preact_std;
        s.threshold_abs = s.sigma_abs * s.calib_std;
        if (!std::isfinite(s.threshold_abs))
            throw ConfigError("non-finite sensitivity threshold at layer " + net.layers[i].name);
        p.layers.push_back(s);
    }
    return p;
}

SensitivityProfile build_profile(const QuantNetwork& net, const Dataset& calib) {
    return build_profile(net, record_layer_inputs(net, calib));
}

size_t match_layer(double threshold_abs, std::span<const Candidate> candidates) {
    if (candidates.empty()) throw ConfigError("match_layer: empty candidate list");
    ptrdiff_t best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        if (c.sigma_e > threshold_abs) continue;
        if (best < 0 || c.energy_rel < candidates[best].energy_rel ||
            (c.energy_rel == candidates[best].energy_rel && c.sigma_e < candidates[best].sigma_e))
            best = static_cast<ptrdiff_t>(i);
    }
    if (best < 0)
        throw ConfigError("match_layer: no feasible candidate; include the accurate multiplier");
    return static_cast<size_t>(best);
}

const std::string* Assignment::find(const std::string& layer_name) const {
    for (const auto& [l, m] : layers)
        if (l == layer_name) return &m;
    return nullptr;
}

std::vector<LayerCandidates> build_candidates(const QuantNetwork& net,
                                              const MultiplierLibrary& lib,
                                              const std::map<int, LayerInputRecord>& records,
                                              int k_samples, uint64_t sampling_seed) {
    if (lib.empty()) throw ConfigError("multiplier library is empty");
    std::vector<LayerCandidates> out;
    for (int i : net.compute_layers()) {
        const Layer& layer = net.layers[i];
        auto it = records.find(i);
        if (it == records.end())
            throw ConfigError("no recorded activations for layer " + layer.name);
        double dequant_scale =
            layer.act_q.scale * calibrate_quant(layer.weights, QuantMode::WeightAffine).scale;
        SampleSet samples =
            draw_samples(layer, it->second, k_samples, mix_seed(sampling_seed, 0xCA2D, i));
        OperandHistogram pw = weight_histogram(layer);
        LayerCandidates lc;
        lc.layer_index = i;
        for (const auto& map : lib.entries()) {
            ErrorStats st = estimate_layer_error(*map, layer, samples, pw);
            lc.candidates.push_back({map->name(), dequant_scale * st.sigma_e, map->energy_rel()});
        }
        out.push_back(std::move(lc));
    }
    return out;
}

Assignment match_network(const QuantNetwork& net, const SensitivityProfile& profile,
                         const std::vector<LayerCandidates>& candidates,
                         const MultiplierLibrary& lib) {
    if (profile.layers.size() != candidates.size())
        throw ConfigError("sensitivity profile and candidate table differ in layer count");
    Assignment a;
    for (size_t c = 0; c < candidates.size(); ++c) {
        if (profile.layers[c].layer_index != candidates[c].layer_index)
            throw ConfigError("profile/candidate layer order mismatch");
        size_t pick = match_layer(profile.layers[c].threshold_abs, candidates[c].candidates);
        a.layers.emplace_back(net.layers[candidates[c].layer_index].name,
                              candidates[c].candidates[pick].name);
    }
    a.energy_total_rel = energy_total(a, net, lib);
    return a;
}

double energy_total(const Assignment& a, const QuantNetwork& net, const MultiplierLibrary& lib) {
    double weighted = 0, total = 0;
    for (int i : net.compute_layers()) {
        const Layer& layer = net.layers[i];
        const std::string* mult = a.find(layer.name);
        if (!mult) throw ConfigError("assignment is missing layer " + layer.name);
        auto map = lib.find(*mult);
        if (!map) throw ConfigError("assignment names unknown multiplier '" + *mult + "'");
        weighted += static_cast<double>(layer.mult_count) * map->energy_rel();
        total += static_cast<double>(layer.mult_count);
    }
    if (total == 0) throw ConfigError("network has no multiplications");
    return weighted / total;
}

void attach_assignment(QuantNetwork& net, const MultiplierLibrary& lib, const Assignment& a) {
    for (int i : net.compute_layers()) {
        Layer& layer = net.layers[i];
        const std::string* mult = a.find(layer.name);
        if (!mult) throw ConfigError("assignment is missing layer " + layer.name);
        auto map = lib.find(*mult);
        if (!map) throw ConfigError("assignment names unknown multiplier '" + *mult + "'");
        layer.assigned_map = map;
    }
}

Assignment uniform_assignment(const QuantNetwork& net, const MultiplierLibrary& lib,
                              const std::string& mult_name) {
    if (!lib.find(mult_name)) throw ConfigError("unknown multiplier '" + mult_name + "'");
    Assignment a;
    for (int i : net.compute_layers()) a.layers.emplace_back(net.layers[i].name, mult_name);
    a.energy_total_rel = energy_total(a, net, lib);
    return a;
}

void mark_pareto_front(std::vector<SweepPoint>& points) {
    for (auto& p : points) {
        p.on_front = true;
        for (const auto& q : points) {
            if (&p == &q) continue;
            bool no_worse = q.energy_rel <= p.energy_rel && q.retrained_acc >= p.retrained_acc;
            bool better = q.energy_rel < p.energy_rel || q.retrained_acc > p.retrained_acc;
            if (no_worse && better) {
                p.on_front = false;
                break;
            }
        }
    }
}

SweepResult pareto_sweep(const QuantNetwork& baseline, const MultiplierLibrary& lib,
                         const std::vector<double>& lambdas, const Dataset& train,
                         const Dataset& val, const Dataset& calib, const SweepSettings& settings) {
    if (lambdas.empty()) throw ConfigError("lambda grid is empty");
    if (lib.empty()) throw ConfigError("multiplier library is empty");
    SweepResult res;
    res.baseline_int_acc = evaluate_int(baseline, val, false);

    for (double lambda : lambdas) {
        QuantNetwork net = baseline;
        NoiseConfig noise = settings.noise;
        noise.lambda = lambda;
        SweepPoint point;
        point.lambda = lambda;
        point.search_log = gradient_search(net, train, noise);
        if (!point.search_log.empty()) point.last_epoch = point.search_log.back();

        calibrate(net, calib);
        auto records = record_layer_inputs(net, calib);
        SensitivityProfile profile = build_profile(net, records);
        auto candidates =
            build_candidates(net, lib, records, settings.k_samples, settings.sampling_seed);
        point.assignment = match_network(net, profile, candidates, lib);
        point.assignment.lambda_used = lambda;
        point.energy_rel = point.assignment.energy_total_rel;

        attach_assignment(net, lib, point.assignment);
        point.agn_acc = evaluate_agn(net, val, settings.eval_noise_seed);
        point.approx_acc = evaluate_int(net, val, true);

        QuantNetwork retrained = net;
        retrain_ste(retrained, train, settings.retrain);
        calibrate(retrained, calib);
        point.retrained_acc = evaluate_int(retrained, val, true);

        QuantNetwork from_baseline = baseline;
        attach_assignment(from_baseline, lib, point.assignment);
        retrain_ste(from_baseline, train, settings.retrain);
        calibrate(from_baseline, calib);
        point.retrained_baseline_acc = evaluate_int(from_baseline, val, true);

        point.assignment.approx_acc = point.approx_acc;
        point.assignment.agn_acc = point.agn_acc;
        point.assignment.retrained_acc = point.retrained_acc;
        res.points.push_back(std::move(point));
    }
    mark_pareto_front(res.points);

    if (settings.uniform_baselines) {
        for (const auto& map : lib.entries()) {
            UniformPoint u;
            u.multiplier = map->name();
            Assignment a = uniform_assignment(baseline, lib, map->name());
            u.energy_rel = a.energy_total_rel;
            QuantNetwork net = baseline;
            attach_assignment(net, lib, a);
            u.approx_acc = evaluate_int(net, val, true);
            retrain_ste(net, train, settings.retrain);
            calibrate(net, calib);
            u.retrained_acc = evaluate_int(net, val, true);
            res.uniform.push_back(std::move(u));
        }
    }
    return res;
}

}  // namespace axnn
