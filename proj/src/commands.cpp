#include "axnn/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "axnn/checkpoint.hpp"
#include "axnn/csv.hpp"
#include "axnn/errors.hpp"
#include "axnn/matching.hpp"
#include "axnn/rng.hpp"
#include "axnn/stats.hpp"

namespace axnn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

QuantNetwork load_net_for(const RunConfig& cfg, const fs::path& checkpoint,
                          std::map<std::string, std::string>* assignments = nullptr) {
    LoadedCheckpoint lc = load_checkpoint(checkpoint);
    // reject checkpoints built from a different architecture than the config
    QuantNetwork expect = build_network(cfg.input_shape, cfg.arch, lc.net.rng_seed);
    if (expect.layers.size() != lc.net.layers.size() || expect.input_shape != lc.net.input_shape)
        throw ConfigError("checkpoint architecture does not match config");
    for (size_t i = 0; i < expect.layers.size(); ++i)
        if (expect.layers[i].kind != lc.net.layers[i].kind ||
            expect.layers[i].out_shape != lc.net.layers[i].out_shape)
            throw ConfigError("checkpoint architecture does not match config (layer " +
                              lc.net.layers[i].name + ")");
    if (assignments) *assignments = std::move(lc.assignments);
    return std::move(lc.net);
}

std::string search_log_csv(const std::vector<SearchLogRow>& log, size_t n_sigmas) {
    std::string csv = "epoch,task_loss,noise_loss,total_loss";
    for (size_t i = 0; i < n_sigmas; ++i) csv += ",sigma_" + std::to_string(i);
    csv += "\n";
    for (const auto& row : log) {
        csv += std::to_string(row.epoch) + "," + fmt_g(row.task_loss) + "," +
               fmt_g(row.noise_loss) + "," + fmt_g(row.total_loss);
        for (double s : row.sigmas) csv += "," + fmt_g(s);
        csv += "\n";
    }
    return csv;
}

struct CharacterizeRow {
    std::string layer, multiplier;
    ErrorStats est;
    MeanStd mc;
    double rel_err = 0.0;
};

double relative_error(double estimate, double truth) {
    if (truth == 0.0) return estimate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(estimate - truth) / std::abs(truth);
}

std::string characterize_csv(const std::vector<CharacterizeRow>& rows) {
    std::string csv = "layer,multiplier,mu_z,sigma_z,fan_in,sigma_e,mc_mean,mc_std,rel_err\n";
    for (const auto& r : rows) {
        csv += r.layer + "," + r.multiplier + "," + fmt_g(r.est.mu_z) + "," + fmt_g(r.est.sigma_z) +
               "," + std::to_string(r.est.fan_in) + "," + fmt_g(r.est.sigma_e) + "," +
               fmt_g(r.mc.mean) + "," + fmt_g(r.mc.stddev) + "," + fmt_g(r.rel_err) + "\n";
    }
    return csv;
}

struct SummaryStats {
    double pearson_r = 0, median_rel = 0, iqr = 0;
    size_t n = 0;
};

SummaryStats summarize(const std::vector<CharacterizeRow>& rows) {
    std::vector<double> est, mc, rel;
    for (const auto& r : rows) {
        if (r.mc.stddev == 0.0) continue;  // accurate multiplier rows
        est.push_back(r.est.sigma_e);
        mc.push_back(r.mc.stddev);
        rel.push_back(r.rel_err);
    }
    SummaryStats s;
    s.n = rel.size();
    if (s.n >= 2) {
        s.pearson_r = pearson(est, mc);
        s.median_rel = median(rel);
        s.iqr = quantile(rel, 0.75) - quantile(rel, 0.25);
    }
    return s;
}

std::string summary_line(const SummaryStats& s) {
    return "# pearson=" + fmt_g(s.pearson_r) + " median_rel_err=" + fmt_g(s.median_rel) +
           " iqr=" + fmt_g(s.iqr) + " n=" + std::to_string(s.n) + "\n";
}

}  // namespace

std::filesystem::path resolve_out_dir(const std::string& configured, const std::string& cli_override) {
    std::string dir = cli_override.empty() ? configured : cli_override;
    fs::path p(dir);
    if (const char* root = std::getenv("AXNN_OUTPUT_ROOT"); root && *root && p.is_relative())
        p = fs::path(root) / p;
    fs::create_directories(p);
    return p;
}

void cmd_multgen(const std::string& kind, int t, double energy, const std::string& name,
                 const fs::path& out_file) {
    ErrorMap map = [&] {
        if (kind == "accurate") return accurate_map();
        if (kind == "trunc") return truncated_map(t, energy);
        if (kind == "mitchell") return mitchell_map(energy);
        throw ConfigError("unknown multiplier kind '" + kind + "' (accurate|trunc|mitchell)");
    }();
    if (!name.empty()) map = ErrorMap(name, map.signedness(), map.table(), map.energy_rel());
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    save_error_map(map, out_file);
    std::cout << "wrote " << map.name() << " to " << out_file.string() << "\n";
}

void cmd_train(const RunConfig& cfg, const fs::path& out_dir) {
    LoadedData data = load_dataset(cfg);
    QuantNetwork net = build_network(cfg.input_shape, cfg.arch, cfg.seeds.weights);
    TrainResult tr = train_float(net, data.train, phase_to_train(cfg.train, mix_seed(cfg.seeds.data, 0x7A)));
    calibrate(net, data.calib);
    double float_acc = evaluate_float(net, data.val);
    double int_acc = evaluate_int(net, data.val, false);
    save_checkpoint(net, out_dir / "baseline.json");
    json summary;
    summary["val_accuracy_float"] = float_acc;
    summary["val_accuracy_int8"] = int_acc;
    summary["epoch_loss"] = tr.epoch_loss;
    summary["train_size"] = data.train.size();
    summary["val_size"] = data.val.size();
    summary["calib_size"] = data.calib.size();
    write_json(out_dir / "train_summary.json", summary);
    std::cout << "baseline val accuracy: float " << fmt_g(float_acc) << ", int8 " << fmt_g(int_acc)
              << "\n";
}

void cmd_search(const RunConfig& cfg, const fs::path& checkpoint,
                std::optional<double> lambda_override, const fs::path& out_dir) {
    LoadedData data = load_dataset(cfg);
    QuantNetwork net = load_net_for(cfg, checkpoint);
    NoiseConfig noise = cfg.noise;
    if (lambda_override) noise.lambda = *lambda_override;
    noise.noise_seed = mix_seed(cfg.seeds.noise, 0x5EA);
    noise.shuffle_seed = mix_seed(cfg.seeds.data, 0x5EB);
    auto log = gradient_search(net, data.train, noise);
    calibrate(net, data.calib);
    save_checkpoint(net, out_dir / "agn.json");
    write_text(out_dir / "search_log.csv", search_log_csv(log, net.compute_layers().size()));
    double agn_acc = evaluate_agn(net, data.val, mix_seed(cfg.seeds.eval, 0xA9E));
    json summary;
    summary["lambda"] = noise.lambda;
    summary["epochs"] = noise.epochs;
    summary["agn_val_accuracy"] = agn_acc;
    json sigmas = json::array();
    for (int i : net.compute_layers()) sigmas.push_back(net.layers[i].sigma_l);
    summary["sigma_l"] = std::move(sigmas);
    write_json(out_dir / "search_summary.json", summary);
    std::cout << "gradient search done (lambda " << fmt_g(noise.lambda) << "), AGN val accuracy "
              << fmt_g(agn_acc) << "\n";
}

void cmd_characterize(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& out_dir) {
    LoadedData data = load_dataset(cfg);
    QuantNetwork net = load_net_for(cfg, checkpoint);
    MultiplierLibrary lib = load_library(cfg.library);
    auto records = record_layer_inputs(net, data.calib);

    std::vector<CharacterizeRow> multi_rows, single_rows;
    for (int li : net.compute_layers()) {
        const Layer& layer = net.layers[li];
        if (layer.fan_in < kLowFanInWarning)
            std::cerr << "warning: layer " << layer.name << " has fan-in " << layer.fan_in
                      << " below " << kLowFanInWarning
                      << "; normal-convergence assumption may be thin\n";
        const LayerInputRecord& rec = records.at(li);
        SampleSet samples =
            draw_samples(layer, rec, cfg.k_samples, mix_seed(cfg.seeds.sampling, 0xCA2D, li));
        OperandHistogram pw = weight_histogram(layer);
        OperandHistogram global_px = global_activation_histogram(rec);
        for (const auto& map : lib.entries()) {
            MeanStd mc = mc_oracle_from_record(*map, layer, rec);
            ErrorStats est = estimate_layer_error(*map, layer, samples, pw);
            ErrorStats single = single_dist_mode(*map, layer, global_px, pw);
            multi_rows.push_back(
                {layer.name, map->name(), est, mc, relative_error(est.sigma_e, mc.stddev)});
            single_rows.push_back(
                {layer.name, map->name(), single, mc, relative_error(single.sigma_e, mc.stddev)});
        }
    }
    SummaryStats multi_sum = summarize(multi_rows);
    SummaryStats single_sum = summarize(single_rows);
    write_text(out_dir / "error_model.csv", characterize_csv(multi_rows) + summary_line(multi_sum));
    write_text(out_dir / "error_model_single_dist.csv",
               characterize_csv(single_rows) + summary_line(single_sum));
    std::cout << "multi-distribution: pearson " << fmt_g(multi_sum.pearson_r) << ", median rel err "
              << fmt_g(multi_sum.median_rel) << " (iqr " << fmt_g(multi_sum.iqr) << ", n "
              << multi_sum.n << ")\n";
    std::cout << "single-distribution: pearson " << fmt_g(single_sum.pearson_r)
              << ", median rel err " << fmt_g(single_sum.median_rel) << "\n";
}

void cmd_match(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& out_dir) {
    LoadedData data = load_dataset(cfg);
    QuantNetwork net = load_net_for(cfg, checkpoint);
    MultiplierLibrary lib = load_library(cfg.library);
    auto records = record_layer_inputs(net, data.calib);
    SensitivityProfile profile = build_profile(net, records);
    auto candidates =
        build_candidates(net, lib, records, cfg.k_samples, mix_seed(cfg.seeds.sampling, 0xCA2D));
    Assignment a = match_network(net, profile, candidates, lib);
    a.lambda_used = cfg.noise.lambda;
    save_assignment(a, out_dir / "assignment.json", lib.source);
    std::cout << "assignment energy " << fmt_g(a.energy_total_rel) << " (reduction "
              << fmt_g(100.0 * (1.0 - a.energy_total_rel)) << "%)\n";
    for (const auto& [layer, mult] : a.layers) {
        auto map = lib.find(mult);
        std::cout << "  " << layer << " -> " << mult << " (energy " << fmt_g(map->energy_rel())
                  << (map->energy_rel() > 1.0 ? ", above accurate reference" : "") << ")\n";
    }
}

void cmd_simulate(const RunConfig& cfg, const fs::path& checkpoint, const fs::path& assignment,
                  bool do_retrain, const fs::path& out_dir) {
    LoadedData data = load_dataset(cfg);
    QuantNetwork net = load_net_for(cfg, checkpoint);
    MultiplierLibrary lib = load_library(cfg.library);
    Assignment a = load_assignment(assignment);
    attach_assignment(net, lib, a);
    double energy = energy_total(a, net, lib);
    double pre_acc = evaluate_int(net, data.val, true);
    json summary;
    summary["energy_total_rel"] = energy;
    summary["approx_accuracy"] = pre_acc;
    if (do_retrain && cfg.retrain.epochs > 0) {
        retrain_ste(net, data.train, phase_to_train(cfg.retrain, mix_seed(cfg.seeds.data, 0x2E7)));
        calibrate(net, data.calib);
        double post_acc = evaluate_int(net, data.val, true);
        summary["retrained_accuracy"] = post_acc;
        save_checkpoint(net, out_dir / "retrained.json");
        std::cout << "approx accuracy " << fmt_g(pre_acc) << " -> retrained " << fmt_g(post_acc)
                  << " at energy " << fmt_g(energy) << "\n";
    } else {
        std::cout << "approx accuracy " << fmt_g(pre_acc) << " at energy " << fmt_g(energy) << "\n";
    }
    write_json(out_dir / "simulate_metrics.json", summary);
}

void cmd_sweep(const RunConfig& cfg, const fs::path& out_dir) {
    if (cfg.lambda_grid.empty()) throw ConfigError("sweep needs a non-empty lambda_grid");
    LoadedData data = load_dataset(cfg);
    MultiplierLibrary lib = load_library(cfg.library);
    QuantNetwork baseline = build_network(cfg.input_shape, cfg.arch, cfg.seeds.weights);
    train_float(baseline, data.train, phase_to_train(cfg.train, mix_seed(cfg.seeds.data, 0x7A)));
    calibrate(baseline, data.calib);
    save_checkpoint(baseline, out_dir / "baseline.json");

    SweepSettings settings;
    settings.noise = cfg.noise;
    settings.noise.noise_seed = mix_seed(cfg.seeds.noise, 0x5EA);
    settings.noise.shuffle_seed = mix_seed(cfg.seeds.data, 0x5EB);
    settings.retrain = phase_to_train(cfg.retrain, mix_seed(cfg.seeds.data, 0x2E7));
    settings.k_samples = cfg.k_samples;
    settings.sampling_seed = mix_seed(cfg.seeds.sampling, 0xCA2D);
    settings.eval_noise_seed = mix_seed(cfg.seeds.eval, 0xA9E);
    SweepResult res = pareto_sweep(baseline, lib, cfg.lambda_grid, data.train, data.val, data.calib,
                                   settings);

    std::string csv =
        "lambda,energy_rel,reduction_pct,top1_acc,agn_acc,retrained_acc,retrained_baseline_acc,"
        "pareto_front\n";
    for (const auto& p : res.points) {
        csv += fmt_g(p.lambda) + "," + fmt_g(p.energy_rel) + "," +
               fmt_g(100.0 * (1.0 - p.energy_rel)) + "," + fmt_g(p.approx_acc) + "," +
               fmt_g(p.agn_acc) + "," + fmt_g(p.retrained_acc) + "," +
               fmt_g(p.retrained_baseline_acc) + "," + (p.on_front ? "1" : "0") + "\n";
    }
    write_text(out_dir / "sweep.csv", csv);

    std::string ucsv = "multiplier,energy_rel,reduction_pct,approx_acc,retrained_acc\n";
    for (const auto& u : res.uniform)
        ucsv += u.multiplier + "," + fmt_g(u.energy_rel) + "," +
                fmt_g(100.0 * (1.0 - u.energy_rel)) + "," + fmt_g(u.approx_acc) + "," +
                fmt_g(u.retrained_acc) + "\n";
    write_text(out_dir / "uniform.csv", ucsv);

    for (const auto& p : res.points) {
        fs::path sub = out_dir / ("lambda_" + fmt_g(p.lambda));
        fs::create_directories(sub);
        save_assignment(p.assignment, sub / "assignment.json", lib.source);
        write_text(sub / "search_log.csv",
                   search_log_csv(p.search_log, p.last_epoch.sigmas.size()));
    }
    json summary;
    summary["baseline_int8_accuracy"] = res.baseline_int_acc;
    summary["points"] = res.points.size();
    write_json(out_dir / "sweep_summary.json", summary);
    std::cout << "sweep finished: " << res.points.size() << " lambda points, baseline int8 accuracy "
              << fmt_g(res.baseline_int_acc) << "\n";
}

}  // namespace axnn
