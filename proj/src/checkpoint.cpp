#include "axnn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "axnn/errors.hpp"

namespace axnn {

using nlohmann::json;

namespace {

json spec_to_json(const LayerSpec& s) {
    return json{{"kind", s.kind},
                {"out_features", s.out_features},
                {"out_channels", s.out_channels},
                {"kernel", s.kernel},
                {"pool", s.pool}};
}

LayerSpec spec_from_json(const json& j) {
    LayerSpec s;
    s.kind = j.at("kind").get<std::string>();
    s.out_features = j.value("out_features", 0);
    s.out_channels = j.value("out_channels", 0);
    s.kernel = j.value("kernel", 3);
    s.pool = j.value("pool", 2);
    return s;
}

}  // namespace

void save_checkpoint(const QuantNetwork& net, const std::filesystem::path& path) {
    json j;
    j["format"] = "axnn-checkpoint-v1";
    j["input_shape"] = net.input_shape;
    j["rng_seed"] = net.rng_seed;
    json arch = json::array();
    for (const auto& s : net.spec) arch.push_back(spec_to_json(s));
    j["architecture"] = std::move(arch);
    json layers = json::array();
    for (const auto& l : net.layers) {
        json lj;
        lj["name"] = l.name;
        if (l.has_weights()) {
            lj["weights"] = l.weights.data;
            lj["bias"] = l.bias.data;
            lj["sigma_l"] = l.sigma_l;
            lj["act_calibrated"] = l.act_calibrated;
            lj["act_scale"] = l.act_q.scale;
            lj["act_zero_point"] = l.act_q.zero_point;
            if (l.assigned_map) lj["assigned_map"] = l.assigned_map->name();
        }
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write checkpoint '" + path.string() + "'");
    out << j.dump(1) << "\n";
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open checkpoint '" + path.string() + "'");
    json j;
    try {
        in >> j;
        if (j.at("format").get<std::string>() != "axnn-checkpoint-v1")
            throw FormatError("unknown checkpoint format in '" + path.string() + "'");
        std::vector<LayerSpec> specs;
        for (const auto& sj : j.at("architecture")) specs.push_back(spec_from_json(sj));
        LoadedCheckpoint out;
        out.net = build_network(j.at("input_shape").get<std::vector<int>>(), specs,
                                j.at("rng_seed").get<uint64_t>());
        const json& layers = j.at("layers");
        if (layers.size() != out.net.layers.size())
            throw FormatError("checkpoint layer count does not match architecture");
        for (size_t i = 0; i < layers.size(); ++i) {
            Layer& l = out.net.layers[i];
            const json& lj = layers[i];
            l.name = lj.at("name").get<std::string>();
            if (!l.has_weights()) continue;
            auto w = lj.at("weights").get<std::vector<double>>();
            auto b = lj.at("bias").get<std::vector<double>>();
            if (w.size() != l.weights.numel() || b.size() != l.bias.numel())
                throw FormatError("checkpoint weight shapes do not match architecture (layer " +
                                  l.name + ")");
            l.weights.data = std::move(w);
            l.bias.data = std::move(b);
            l.sigma_l = lj.at("sigma_l").get<double>();
            l.act_calibrated = lj.value("act_calibrated", false);
            l.act_q.scale = lj.value("act_scale", 1.0);
            l.act_q.zero_point = lj.value("act_zero_point", 0);
            if (lj.contains("assigned_map"))
                out.assignments[l.name] = lj.at("assigned_map").get<std::string>();
        }
        return out;
    } catch (const json::exception& e) {
        throw FormatError("malformed checkpoint '" + path.string() + "': " + e.what());
    }
}

void save_assignment(const Assignment& a, const std::filesystem::path& path,
                     const std::string& library_source) {
    json j;
    j["format"] = "axnn-assignment-v1";
    j["lambda"] = a.lambda_used;
    j["energy_total_rel"] = a.energy_total_rel;
    json layers = json::object();
    for (const auto& [layer, mult] : a.layers) layers[layer] = mult;
    j["layers"] = std::move(layers);
    j["library"] = library_source;
    json metrics = json::object();
    if (a.approx_acc >= 0) metrics["approx_acc"] = a.approx_acc;
    if (a.agn_acc >= 0) metrics["agn_acc"] = a.agn_acc;
    if (a.retrained_acc >= 0) metrics["retrained_acc"] = a.retrained_acc;
    j["metrics"] = std::move(metrics);
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write assignment '" + path.string() + "'");
    out << j.dump(1) << "\n";
}

Assignment load_assignment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open assignment '" + path.string() + "'");
    json j;
    try {
        in >> j;
        if (j.at("format").get<std::string>() != "axnn-assignment-v1")
            throw FormatError("unknown assignment format in '" + path.string() + "'");
        Assignment a;
        a.lambda_used = j.value("lambda", 0.0);
        a.energy_total_rel = j.value("energy_total_rel", 1.0);
        for (const auto& [layer, mult] : j.at("layers").items())
            a.layers.emplace_back(layer, mult.get<std::string>());
        if (j.contains("metrics")) {
            const json& m = j["metrics"];
            a.approx_acc = m.value("approx_acc", -1.0);
            a.agn_acc = m.value("agn_acc", -1.0);
            a.retrained_acc = m.value("retrained_acc", -1.0);
        }
        return a;
    } catch (const json::exception& e) {
        throw FormatError("malformed assignment '" + path.string() + "': " + e.what());
    }
}

}  // namespace axnn
