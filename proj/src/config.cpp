#include "axnn/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

LayerSpec parse_layer(const json& j, const std::string& where) {
    expect_keys(j, where, {"kind", "out_features", "out_channels", "kernel", "pool"});
    LayerSpec s;
    s.kind = j.at("kind").get<std::string>();
    s.out_features = get_or(j, "out_features", 0);
    s.out_channels = get_or(j, "out_channels", 0);
    s.kernel = get_or(j, "kernel", 3);
    s.pool = get_or(j, "pool", 2);
    return s;
}

DatasetConfig parse_dataset(const json& j) {
    expect_keys(j, "dataset",
                {"kind", "classes", "per_class", "dim", "seed", "separation", "noise_std", "images",
                 "labels", "fractions"});
    DatasetConfig d;
    d.kind = j.at("kind").get<std::string>();
    if (d.kind == "synthetic") {
        d.synth.classes = j.at("classes").get<int>();
        d.synth.per_class = j.at("per_class").get<int>();
        d.synth.dim = j.at("dim").get<std::vector<int>>();
        d.synth.seed = get_or<uint64_t>(j, "seed", 0);
        d.synth.separation = get_or(j, "separation", 6.0);
        d.synth.noise_std = get_or(j, "noise_std", 0.1);
    } else if (d.kind == "idx") {
        d.images = j.at("images").get<std::string>();
        d.labels = j.at("labels").get<std::string>();
    } else {
        throw ConfigError("dataset kind must be 'synthetic' or 'idx', got '" + d.kind + "'");
    }
    if (j.contains("fractions")) {
        auto f = j.at("fractions").get<std::vector<double>>();
        if (f.size() != 3) throw ConfigError("dataset fractions must have 3 entries");
        d.fractions = {f[0], f[1], f[2]};
    }
    return d;
}

PhaseConfig parse_phase(const json& j, const std::string& where, PhaseConfig def) {
    expect_keys(j, where, {"epochs", "lr", "lr_decay", "decay_every", "batch_size"});
    PhaseConfig p = def;
    p.epochs = get_or(j, "epochs", def.epochs);
    p.lr = get_or(j, "lr", def.lr);
    p.lr_decay = get_or(j, "lr_decay", def.lr_decay);
    p.decay_every = get_or(j, "decay_every", def.decay_every);
    p.batch_size = get_or(j, "batch_size", def.batch_size);
    if (p.epochs < 0) throw ConfigError(where + ".epochs must be >= 0");
    if (!(p.lr > 0)) throw ConfigError(where + ".lr must be > 0");
    if (p.batch_size <= 0) throw ConfigError(where + ".batch_size must be positive");
    return p;
}

NoiseConfig parse_noise(const json& j) {
    expect_keys(j, "noise",
                {"sigma_init", "sigma_max", "lambda", "epochs", "lr", "lr_decay", "decay_every",
                 "batch_size"});
    NoiseConfig n;
    n.sigma_init = get_or(j, "sigma_init", n.sigma_init);
    n.sigma_max = get_or(j, "sigma_max", n.sigma_max);
    n.lambda = get_or(j, "lambda", n.lambda);
    n.epochs = get_or(j, "epochs", n.epochs);
    n.lr = get_or(j, "lr", n.lr);
    n.lr_decay = get_or(j, "lr_decay", n.lr_decay);
    n.decay_every = get_or(j, "decay_every", n.decay_every);
    n.batch_size = get_or(j, "batch_size", n.batch_size);
    n.validate();
    return n;
}

LibraryConfig parse_library(const json& j) {
    expect_keys(j, "library", {"path", "builtin"});
    LibraryConfig l;
    if (j.contains("path")) l.path = j.at("path").get<std::string>();
    if (j.contains("builtin")) {
        for (const auto& bj : j.at("builtin")) {
            expect_keys(bj, "library.builtin[]", {"kind", "t", "energy"});
            BuiltinMultSpec b;
            b.kind = bj.at("kind").get<std::string>();
            b.t = get_or(bj, "t", 0);
            b.energy = get_or(bj, "energy", 1.0);
            l.builtin.push_back(b);
        }
    }
    if (!l.path.empty() && !l.builtin.empty())
        throw ConfigError("library: give either 'path' or 'builtin', not both");
    return l;
}

}  // namespace

void RunConfig::validate() const {
    if (input_shape.empty()) throw ConfigError("architecture.input must not be empty");
    if (arch.empty()) throw ConfigError("architecture.layers must not be empty");
    for (double l : lambda_grid)
        if (l < 0) throw ConfigError("lambda_grid entries must be >= 0");
    noise.validate();
    double fsum = dataset.fractions[0] + dataset.fractions[1] + dataset.fractions[2];
    if (std::abs(fsum - 1.0) > 1e-9) throw ConfigError("dataset fractions must sum to 1");
    if (k_samples <= 0) throw ConfigError("error_model.k_samples must be positive");
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        expect_keys(j, "config",
                    {"architecture", "dataset", "train", "noise", "retrain", "error_model",
                     "library", "lambda_grid", "seeds", "output_dir"});
        RunConfig cfg;
        const json& aj = j.at("architecture");
        expect_keys(aj, "architecture", {"input", "layers"});
        cfg.input_shape = aj.at("input").get<std::vector<int>>();
        size_t li = 0;
        for (const auto& lj : aj.at("layers"))
            cfg.arch.push_back(parse_layer(lj, "architecture.layers[" + std::to_string(li++) + "]"));
        cfg.dataset = parse_dataset(j.at("dataset"));
        if (j.contains("train")) cfg.train = parse_phase(j.at("train"), "train", cfg.train);
        if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"));
        if (j.contains("retrain")) cfg.retrain = parse_phase(j.at("retrain"), "retrain", cfg.retrain);
        if (j.contains("error_model")) {
            expect_keys(j.at("error_model"), "error_model", {"k_samples"});
            cfg.k_samples = get_or(j.at("error_model"), "k_samples", cfg.k_samples);
        }
        if (j.contains("library")) cfg.library = parse_library(j.at("library"));
        if (j.contains("lambda_grid")) cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
        if (j.contains("seeds")) {
            const json& sj = j.at("seeds");
            expect_keys(sj, "seeds", {"weights", "data", "noise", "sampling", "eval"});
            cfg.seeds.weights = get_or<uint64_t>(sj, "weights", cfg.seeds.weights);
            cfg.seeds.data = get_or<uint64_t>(sj, "data", cfg.seeds.data);
            cfg.seeds.noise = get_or<uint64_t>(sj, "noise", cfg.seeds.noise);
            cfg.seeds.sampling = get_or<uint64_t>(sj, "sampling", cfg.seeds.sampling);
            cfg.seeds.eval = get_or<uint64_t>(sj, "eval", cfg.seeds.eval);
        }
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_run_config(text);
}

MultiplierLibrary load_library(const LibraryConfig& cfg) {
    if (!cfg.path.empty()) return MultiplierLibrary::load_dir(cfg.path);
    if (cfg.builtin.empty()) throw ConfigError("config has an empty multiplier library");
    MultiplierLibrary lib;
    lib.source = "builtin";
    for (const auto& b : cfg.builtin) {
        if (b.kind == "accurate")
            lib.add(accurate_map());
        else if (b.kind == "trunc")
            lib.add(truncated_map(b.t, b.energy));
        else if (b.kind == "mitchell")
            lib.add(mitchell_map(b.energy));
        else
            throw ConfigError("unknown builtin multiplier kind '" + b.kind + "'");
    }
    return lib;
}

LoadedData load_dataset(const RunConfig& cfg) {
    Dataset full;
    if (cfg.dataset.kind == "synthetic")
        full = gen_synthetic(cfg.dataset.synth);
    else
        full = load_idx(cfg.dataset.images, cfg.dataset.labels);
    auto parts = split_dataset(full, cfg.dataset.fractions, mix_seed(cfg.seeds.data, 0x5917));
    return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

TrainConfig phase_to_train(const PhaseConfig& p, uint64_t shuffle_seed) {
    TrainConfig t;
    t.epochs = p.epochs;
    t.lr = p.lr;
    t.lr_decay = p.lr_decay;
    t.decay_every = p.decay_every;
    t.batch_size = p.batch_size;
    t.shuffle_seed = shuffle_seed;
    return t;
}

}  // namespace axnn
