// Command-line front end for the SEC pipeline:
//   sec run        full pipeline (dataset -> spectrum -> eigenforms -> export)
//   sec generate   dataset only
//   sec spectrum   diffusion-maps eigenbasis from points.csv
//   sec eigenforms 1-Laplacian spectrum and Betti estimate
//   sec export     arrow CSV/SVG for selected eigenforms

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "sec/sec.hpp"

namespace {

void add_common_options(CLI::App* app, sec::RunConfig& cfg, std::string& config_path,
                        std::string& eigenform_list) {
    app->add_option("--config", config_path, "key=value config file; flags override file values");
    app->add_option("--dataset", cfg.dataset,
                    "dataset kind: circle, circle_random, flat_torus, torus_r3, sphere, mobius, genus2, lorenz63");
    app->add_option("--input", cfg.input, "CSV point cloud (one point per line)");
    app->add_option("--n", cfg.n, "dataset size parameter (points, or per-dim for flat_torus)");
    app->add_option("--eps", cfg.eps, "kernel bandwidth, or 'auto'");
    app->add_option("--m", cfg.m, "basis truncation M");
    app->add_option("--ms", cfg.ms, "spectral-sum truncation M_s");
    app->add_option("--frame", cfg.frame, "frame family: antisym | nonsym");
    app->add_option("--method", cfg.method, "Galerkin solver: intro | theta");
    app->add_option("--theta", cfg.theta, "regularization weight for --method theta");
    app->add_option("--rtol", cfg.rtol, "Sobolev-basis retention threshold");
    app->add_option("--betti-threshold", cfg.betti_threshold, "near-zero eigenvalue threshold");
    app->add_flag("--betti-gap", cfg.betti_gap, "use the spectral-gap heuristic for the Betti count");
    app->add_option("--out", cfg.out, "output directory");
    app->add_option("--seed", cfg.seed, "seed for randomized generators");
    app->add_option("--eigenform", eigenform_list, "comma-separated eigenform indices to export");
    app->add_option("--stride", cfg.stride, "draw every stride-th arrow in the SVG");
}

}  // namespace

int main(int argc, char** argv) {
    sec::RunConfig cfg;
    std::string config_path;
    std::string eigenform_list;

    // The config file seeds the defaults, so it must load before CLI11
    // assigns flag values; scan for --config ahead of the real parse.
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    try {
        if (!config_path.empty()) sec::load_config_file(cfg, config_path);
    } catch (const sec::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.category().c_str(), e.what());
        return 1;
    }

    CLI::App app{"Spectral exterior calculus on point clouds"};
    app.require_subcommand(1);
    CLI::App* cmd_run = app.add_subcommand("run", "full pipeline");
    CLI::App* cmd_gen = app.add_subcommand("generate", "write the dataset to points.csv");
    CLI::App* cmd_spec = app.add_subcommand("spectrum", "diffusion-maps eigenbasis");
    CLI::App* cmd_eig = app.add_subcommand("eigenforms", "1-Laplacian eigenvalues and Betti count");
    CLI::App* cmd_exp = app.add_subcommand("export", "arrow CSV/SVG for selected eigenforms");
    for (CLI::App* sub : {cmd_run, cmd_gen, cmd_spec, cmd_eig, cmd_exp})
        add_common_options(sub, cfg, config_path, eigenform_list);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!eigenform_list.empty()) sec::apply_config_key(cfg, "eigenform", eigenform_list);

        if (cmd_run->parsed()) return sec::run(cfg);
        if (cmd_gen->parsed()) { sec::stage_generate(cfg); return 0; }
        if (cmd_spec->parsed()) { sec::stage_spectrum(cfg); return 0; }
        if (cmd_eig->parsed()) {
            sec::EigenformSet forms = sec::stage_eigenforms(cfg);
            const int show = std::min<int>(8, static_cast<int>(forms.nus.size()));
            for (int k = 0; k < show; ++k) std::printf("nu_%d = %.6g\n", k + 1, forms.nus(k));
            return 0;
        }
        if (cmd_exp->parsed()) { sec::stage_export(cfg); return 0; }
    } catch (const sec::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.category().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}
