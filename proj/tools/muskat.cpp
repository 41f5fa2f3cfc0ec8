// Command-line front end: simulate, check-rt, dispersion, verify, reconstruct.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"
#include "muskat/stability.hpp"
#include "muskat/verify.hpp"

namespace fs = std::filesystem;
using namespace muskat;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::vector<double> parse_k_list(const std::string& s) {
    std::vector<double> ks;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw InvalidConfiguration("--k: cannot parse '" + item + "' as a number");
        ks.push_back(v);
    }
    if (ks.empty()) throw InvalidConfiguration("--k: empty list");
    return ks;
}

int cmd_simulate(const std::string& config, const std::string& out) {
    RunConfig cfg = parse_config_file(config);
    if (!out.empty()) {
        cfg.output_dir = fs::absolute(out).string();
    }
    const RunOutcome r = run_simulation(cfg);
    std::cout << json{{"termination", r.manifest_json["termination"]},
                      {"t_final", r.trajectory.t_final},
                      {"snapshots", r.manifest_json["snapshots"].size()},
                      {"manifest", r.manifest.string()}}
                     .dump(2)
              << '\n';
    if (r.trajectory.cause != Termination::completed) {
        std::cerr << "run ended early: " << r.trajectory.message << '\n';
        return kFailure;
    }
    return kOk;
}

int cmd_check_rt(const std::string& config) {
    const RunConfig cfg = parse_config_file(config);
    const Grid g(cfg.L, cfg.N);
    const GridFunction f0 = make_initial_condition(cfg.initial_condition, g, cfg.base_dir);
    const DerivedConstants c = derive_constants(cfg.params);
    const RTReport rep = evaluate_rt(f0, c, cfg.controls.solver);
    json j = to_json(rep);
    j["c_rho_mu"] = c.c_rho_mu;
    j["a_mu"] = c.a_mu;
    std::cout << j.dump(2) << '\n';
    return rep.in_O ? kOk : kFailure;
}

int cmd_dispersion(const std::string& config, std::optional<double> sigma, const std::string& klist) {
    FluidParams p = config.empty() ? FluidParams::normalized(0.0, 1.0, 0.0) : parse_config_file(config).params;
    if (sigma) {
        if (*sigma < 0.0) throw InvalidConfiguration("--sigma must be nonnegative");
        p.sigma = *sigma;
    }
    const auto ks = parse_k_list(klist);
    std::cout << "k,rate\n";
    for (double k : ks) std::cout << k << ',' << dispersion_rate(k, p.sigma > 0.0, p) << '\n';
    return kOk;
}

int cmd_verify(const std::string& suite) {
    const SuiteReport r = run_suite(suite);
    std::cout << to_json(r).dump(2) << '\n';
    return r.passed() ? kOk : kFailure;
}

int cmd_reconstruct(const std::string& snapshot, const std::string& points, const std::string& out) {
    const SnapshotRecord rec = read_snapshot(snapshot);
    FluidParams p;
    if (rec.header.contains("params")) {
        const json& j = rec.header["params"];
        p.mu_minus = j.value("mu_minus", p.mu_minus);
        p.mu_plus = j.value("mu_plus", p.mu_plus);
        p.rho_minus = j.value("rho_minus", p.rho_minus);
        p.rho_plus = j.value("rho_plus", p.rho_plus);
        p.g = j.value("g", p.g);
        p.k = j.value("k", p.k);
        p.sigma = j.value("sigma", p.sigma);
        p.V = j.value("V", p.V);
    }
    const auto pts = read_points(points);
    const auto samples = reconstruct_pressure(rec.f, rec.omega, p, pts);
    if (out.empty()) {
        write_samples_csv(samples, std::cout);
    } else {
        std::ofstream f(out);
        if (!f) throw Error("cannot write '" + out + "'");
        write_samples_csv(samples, f);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Muskat interface simulator and verification toolkit"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    std::string config, out, suite, snapshot, points, klist;
    std::optional<double> sigma;

    auto* sim = app.add_subcommand("simulate", "run a simulation and write snapshots plus manifest.json");
    sim->add_option("--config", config, "run configuration (JSON) or a previous manifest")->required();
    sim->add_option("--out", out, "output directory (overrides output_dir)");

    auto* rt = app.add_subcommand("check-rt", "report the Rayleigh-Taylor functional of the initial condition");
    rt->add_option("--config", config, "run configuration (JSON)")->required();

    auto* disp = app.add_subcommand("dispersion", "print linear decay rates about the flat interface");
    disp->add_option("--config", config, "take fluid parameters from this configuration");
    disp->add_option("--sigma", sigma, "surface tension override");
    disp->add_option("--k", klist, "comma-separated wavenumbers")->required();

    auto* ver = app.add_subcommand("verify", "run a property suite");
    ver->add_option("--suite", suite, "operators | rellich | plemelj | dispersion")
        ->required()
        ->check(CLI::IsMember(suite_names()));

    auto* rec = app.add_subcommand("reconstruct", "evaluate velocity and pressure off the interface");
    rec->add_option("--snapshot", snapshot, "snapshot CSV")->required();
    rec->add_option("--points", points, "CSV of x,y points")->required();
    rec->add_option("--out", out, "output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return cmd_simulate(config, out);
        if (*rt) return cmd_check_rt(config);
        if (*disp) return cmd_dispersion(config, sigma, klist);
        if (*ver) return cmd_verify(suite);
        if (*rec) return cmd_reconstruct(snapshot, points, out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidConfiguration& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DecayCheckFailed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const GridMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
