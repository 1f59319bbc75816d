#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/registry.hpp"
#include "hessian/errors.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2 };

int run(cli::Experiment e, const std::string& config_path, std::string out, bool serial, int threads,
        std::optional<double> h_override) {
    nlohmann::json user;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw hessian::ConfigError("cannot read config " + config_path);
        try {
            user = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& err) {
            throw hessian::ConfigError(std::string("config is not valid JSON: ") + err.what());
        }
    }
    auto cfg = cli::load_config(e, user);
    if (h_override) cli::override_resolution(cfg, *h_override);
    if (out.empty())
        if (const char* env = std::getenv("HESSIAN_OUT"); env && *env) out = env;
    if (out.empty()) out = cfg.output.empty() ? "hessian-out" : cfg.output;

    cli::RunOptions opt;
    opt.threads = serial ? 1 : std::max(1, threads);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = cli::run_experiment(cfg, opt);
    const auto dir = rep.write(out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto summary = rep.summary();
    std::cout << cfg.name << ": " << summary["status"].get<std::string>() << " (" << summary["assertions"].get<std::size_t>()
              << " asserted rows, config " << cfg.hash().substr(0, 12) << ") -> " << dir.string() << '\n';
    std::cerr << "elapsed " << secs << " s\n";
    for (const auto& f : rep.failures()) std::cerr << "FAIL " << f.table << " row " << f.label << ": " << f.detail << '\n';
    return rep.ok() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale verification campaigns for complex Hessian equations"};
    app.require_subcommand(1);
    std::string config, out;
    bool serial = false;
    int threads = 1;
    std::optional<double> h_override;

    std::vector<std::pair<CLI::App*, cli::Experiment>> subs;
    for (const auto& name : cli::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config, "JSON experiment config (defaults apply when omitted)");
        sub->add_option("--out", out, "output directory (overrides HESSIAN_OUT)");
        auto* s = sub->add_flag("--serial", serial, "single-threaded, byte-reproducible run");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->excludes(s);
        sub->add_option("--resolution-override", h_override, "rescale the resolution ladder to start at h");
        subs.emplace_back(sub, cli::parse_experiment(name));
    }
    auto* list = app.add_subcommand("list-functions", "print the analytic function catalog as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    if (list->parsed()) {
        nlohmann::json cat = nlohmann::json::array();
        for (const auto& f : cli::registry_list()) {
            nlohmann::json j{{"name", f.name}, {"description", f.description}};
            if (f.witness) j["witness"] = {{"alpha", f.witness->alpha}, {"kappa", f.witness->L}};
            cat.push_back(j);
        }
        std::cout << cat.dump(2) << '\n';
        return kOk;
    }
    for (const auto& [sub, e] : subs) {
        if (!sub->parsed()) continue;
        try {
            return run(e, config, out, serial, threads, h_override);
        } catch (const hessian::ConfigError& err) {
            std::cerr << "config error: " << err.what() << '\n';
            return kConfig;
        } catch (const hessian::DomainError& err) {
            std::cerr << "config error: " << err.what() << '\n';
            return kConfig;
        } catch (const hessian::ResolutionError& err) {
            std::cerr << "config error: " << err.what() << '\n';
            return kConfig;
        } catch (const std::exception& err) {
            std::cerr << "failure: " << err.what() << '\n';
            return kFailure;
        }
    }
    return kConfig;
}
