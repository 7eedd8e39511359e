// Batch experiment runner: conformal moduli on slit domains, quadratic
// differential trajectories, sampled laminations, squeeze-ray convergence,
// the comb certificate, and the modulus/Liouville gap table.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include <extremal_rays/experiment.hpp>

using namespace extremal_rays;

namespace {

void add_common(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "seed for deterministic sampling");
    cmd->add_option("--samples", cfg.samples, "box-sampling count");
    cmd->add_option("--threads", cfg.threads, "worker pool size");
    cmd->add_option("--config", config_path, "TOML-style key=value file merged under the flags");
}

void add_param_option(CLI::App* cmd, ExperimentConfig& cfg, const std::string& flag,
                      const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&cfg, key](const std::string& v) { cfg.params[key] = v; }, help);
}

int dispatch(ExperimentConfig& cfg, const std::string& config_path) {
    if (!config_path.empty()) {
        auto kv = parse_config_file(config_path);
        for (const auto& [k, v] : kv) {
            if (k == "kind")
                cfg.kind = experiment_kind_from_string(v);
            else if (k == "out")
                cfg.out_dir = v;
            else if (k == "seed")
                cfg.seed = std::stoull(v);
            else if (k == "samples")
                cfg.samples = std::stoi(v);
            else if (k == "threads")
                cfg.threads = std::stoi(v);
            else if (!cfg.params.count(k))
                cfg.params[k] = v;
        }
    }
    return run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extremal-rays: conformal moduli, vertical trajectories, measured "
                 "laminations, and squeeze-ray experiments on slit domains"};
    app.require_subcommand(1);
    // --h is a grid-step flag on several subcommands; keep help on --help only
    app.set_help_flag("--help", "print help");

    ExperimentConfig cfg;
    std::string config_path;
    if (const char* env = std::getenv("EXTREMAL_RAYS_THREADS")) cfg.threads = std::atoi(env);

    auto* mod = app.add_subcommand("modulus", "grid capacity of a boundary-set pair");
    add_common(mod, cfg, config_path);
    add_param_option(mod, cfg, "--builtin", "builtin", "square|rect2|lshape|dn|comb");
    add_param_option(mod, cfg, "--domain-file", "domain-file", "domain JSON file");
    add_param_option(mod, cfg, "--e", "e", "first boundary set (u = 0)");
    add_param_option(mod, cfg, "--f", "f", "second boundary set (u = 1)");
    add_param_option(mod, cfg, "--h", "h", "grid step, dyadic (1/128, 1/2^7, 0.0078125)");
    add_param_option(mod, cfg, "--a", "a", "dn builtin: width");
    add_param_option(mod, cfg, "--b", "b", "dn builtin: height");
    add_param_option(mod, cfg, "--c", "c", "dn builtin: slit foot height");
    add_param_option(mod, cfg, "--N", "N", "dn builtin: slit count parameter");
    add_param_option(mod, cfg, "--kmax", "kmax", "comb builtin: deepest level");
    mod->callback([&] { cfg.kind = ExperimentKind::modulus; });

    auto* tr = app.add_subcommand("trace", "trace a vertical trajectory of a differential");
    add_common(tr, cfg, config_path);
    add_param_option(tr, cfg, "--qd", "qd", "1 | z | z2-c | [[re,im],...] coefficients");
    add_param_option(tr, cfg, "--seed-re", "seed-re", "trace seed, real part");
    add_param_option(tr, cfg, "--seed-im", "seed-im", "trace seed, imaginary part");
    add_param_option(tr, cfg, "--budget", "budget", "max phi-length per direction");
    tr->callback([&] { cfg.kind = ExperimentKind::trace; });

    auto* lam = app.add_subcommand("lamination", "sample mu/nu and estimate the Thurston norm");
    add_common(lam, cfg, config_path);
    add_param_option(lam, cfg, "--qd", "qd", "differential (disk sampling)");
    add_param_option(lam, cfg, "--builtin", "builtin", "flat domain (flat sampling)");
    add_param_option(lam, cfg, "--kmax", "kmax", "comb builtin: deepest level");
    add_param_option(lam, cfg, "--transversal", "transversal", "diameter|tripod|traced");
    add_param_option(lam, cfg, "--n", "n", "transversal sample count");
    add_param_option(lam, cfg, "--kind", "lam-kind", "mu|nu|both");
    lam->callback([&] { cfg.kind = ExperimentKind::lamination; });

    auto* ray = app.add_subcommand("ray", "squeeze-ray modulus convergence experiment");
    add_common(ray, cfg, config_path);
    add_param_option(ray, cfg, "--builtin", "builtin", "square|rect2|lshape|dn|comb");
    add_param_option(ray, cfg, "--domain-file", "domain-file", "domain JSON file");
    add_param_option(ray, cfg, "--e", "e", "bottom-side set");
    add_param_option(ray, cfg, "--f", "f", "top-side set");
    add_param_option(ray, cfg, "--eps", "eps", "schedule: 2^-1..2^-8 or comma list");
    add_param_option(ray, cfg, "--h", "h", "grid step override (default: automatic per eps)");
    add_param_option(ray, cfg, "--kmax", "kmax", "comb builtin: deepest level");
    ray->callback([&] { cfg.kind = ExperimentKind::ray; });

    auto* cert = app.add_subcommand("comb-certify", "run the comb certificate (a')-(e')");
    add_common(cert, cfg, config_path);
    add_param_option(cert, cfg, "--kmax", "kmax", "levels 1..kmax");
    add_param_option(cert, cfg, "--h", "h", "grid step");
    add_param_option(cert, cfg, "--direct-b", "direct-b", "on: also solve (b') directly on D");
    add_param_option(cert, cfg, "--conjugate", "conjugate", "on: reciprocity checks on (a')");
    cert->callback([&] { cfg.kind = ExperimentKind::comb_certify; });

    auto* gap = app.add_subcommand("liouville-gap", "modulus vs Liouville measure gap");
    add_common(gap, cfg, config_path);
    add_param_option(gap, cfg, "--box", "box", "four angles in turns, comma separated");
    add_param_option(gap, cfg, "--mod-max", "mod-max", "table up to this box modulus");
    gap->callback([&] { cfg.kind = ExperimentKind::liouville_gap; });

    CLI11_PARSE(app, argc, argv);

    try {
        return dispatch(cfg, config_path);
    } catch (const invalid_parameter& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
