#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "axnn/commands.hpp"
#include "axnn/errors.hpp"

using namespace axnn;

int main(int argc, char** argv) {
    CLI::App app{"heterogeneous approximate-multiplier search for quantized networks"};
    app.require_subcommand(1);

    std::string config_path, out_override, checkpoint, assignment;

    auto add_common = [&](CLI::App* cmd, bool needs_checkpoint = false) {
        cmd->add_option("--config", config_path, "run config (JSON)")->required();
        cmd->add_option("--out", out_override, "output directory override");
        if (needs_checkpoint)
            cmd->add_option("--checkpoint", checkpoint, "input checkpoint")->required();
    };

    // multgen
    std::string mg_kind, mg_name, mg_out;
    int mg_t = 0;
    double mg_energy = 1.0;
    auto* multgen = app.add_subcommand("multgen", "generate a builtin error map");
    multgen->add_option("--kind", mg_kind, "accurate|trunc|mitchell")->required();
    multgen->add_option("--t", mg_t, "truncated LSB count (trunc only)");
    multgen->add_option("--energy", mg_energy, "relative energy metadata");
    multgen->add_option("--name", mg_name, "override map name");
    multgen->add_option("--out", mg_out, "output file")->required();

    auto* train = app.add_subcommand("train", "baseline training + calibration");
    add_common(train);

    std::optional<double> lambda_override;
    double lambda_val = 0.0;
    auto* search = app.add_subcommand("search", "gradient search for per-layer robustness");
    add_common(search, true);
    auto* lam_opt = search->add_option("--lambda", lambda_val, "override noise.lambda");

    auto* characterize =
        app.add_subcommand("characterize", "error-model estimates vs MC oracle per layer/multiplier");
    add_common(characterize, true);

    auto* match = app.add_subcommand("match", "threshold matching -> assignment file");
    add_common(match, true);

    bool no_retrain = false;
    auto* simulate = app.add_subcommand("simulate", "behavioral evaluation of an assignment");
    add_common(simulate, true);
    simulate->add_option("--assignment", assignment, "assignment file")->required();
    simulate->add_flag("--no-retrain", no_retrain, "skip STE retraining");

    auto* sweep = app.add_subcommand("sweep", "full lambda-grid pipeline");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (multgen->parsed()) {
            cmd_multgen(mg_kind, mg_t, mg_energy, mg_name, mg_out);
            return 0;
        }
        RunConfig cfg = load_run_config(config_path);
        auto out_dir = resolve_out_dir(cfg.output_dir, out_override);
        if (train->parsed()) {
            cmd_train(cfg, out_dir);
        } else if (search->parsed()) {
            if (lam_opt->count()) lambda_override = lambda_val;
            cmd_search(cfg, checkpoint, lambda_override, out_dir);
        } else if (characterize->parsed()) {
            cmd_characterize(cfg, checkpoint, out_dir);
        } else if (match->parsed()) {
            cmd_match(cfg, checkpoint, out_dir);
        } else if (simulate->parsed()) {
            cmd_simulate(cfg, checkpoint, assignment, !no_retrain, out_dir);
        } else if (sweep->parsed()) {
            cmd_sweep(cfg, out_dir);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
