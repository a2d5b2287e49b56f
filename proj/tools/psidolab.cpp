// Experiment runner: `psidolab run --config cfg.json`, `psidolab list`,
// `psidolab quantize --symbol manifest.json --tau t --out kernel.csv`.
// Exit codes: 0 pass, 1 threshold failure, 2 usage or config error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "psidolab/psidolab.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    psidolab::json j;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << config_path << "'\n";
            return 2;
        }
        try {
            in >> j;
        } catch (const std::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return 2;
        }
    }
    psidolab::ExperimentConfig cfg;
    try {
        cfg = psidolab::config_from_json(j);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::string summary;
    const int rc = psidolab::run_experiment(cfg, &summary);
    std::cout << "summary: " << summary << "\n";
    return rc;
}

int cmd_list() {
    for (const auto& info : psidolab::list_suites()) {
        std::cout << info.name << ": " << info.exercises << "\n";
        for (const auto& [name, value] : info.default_thresholds)
            std::cout << "  " << name << " <= " << psidolab::format_double(value) << "\n";
    }
    return 0;
}

int cmd_quantize(const std::string& manifest_path, double tau, const std::string& out_path) {
    psidolab::json j;
    {
        std::ifstream in(manifest_path);
        if (!in) {
            std::cerr << "error: cannot open symbol manifest '" << manifest_path << "'\n";
            return 2;
        }
        try {
            in >> j;
        } catch (const std::exception& e) {
            std::cerr << "error: manifest is not valid JSON: " << e.what() << "\n";
            return 2;
        }
    }
    try {
        for (const char* key : {"seed", "band_fraction", "envelope_decay", "grid"})
            if (!j.contains(key))
                throw std::invalid_argument(std::string("manifest: missing key '") + key + "'");
        const auto grid = psidolab::grid_from_json(j.at("grid"));
        const psidolab::SampledFunction a = psidolab::random_symbol(
            j.at("seed").get<std::uint64_t>(), j.at("band_fraction").get<double>(),
            j.at("envelope_decay").get<double>(), grid);
        const psidolab::OperatorKernel k =
            psidolab::kernel_from_symbol(a, psidolab::QuantizationParams(tau, grid, a.tag.blocks));
        psidolab::write_kernel_csv(k, out_path);
        std::cout << "kernel: " << out_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for tau-quantized pseudo-differential operators"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run an experiment suite from a JSON config");
    run->add_option("--config", config_path, "path to the experiment config")->required();

    CLI::App* list = app.add_subcommand("list", "list suites and their default thresholds");

    std::string manifest_path, out_path;
    double tau = 0.5;
    CLI::App* quant = app.add_subcommand("quantize", "quantize a symbol manifest to a kernel CSV");
    quant->add_option("--symbol", manifest_path, "symbol manifest JSON")->required();
    quant->add_option("--tau", tau, "quantization parameter");
    quant->add_option("--out", out_path, "output kernel CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (list->parsed()) return cmd_list();
        if (quant->parsed()) return cmd_quantize(manifest_path, tau, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
