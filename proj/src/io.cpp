#include "muskat/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "muskat/errors.hpp"

#ifndef MUSKAT_VERSION
#define MUSKAT_VERSION "0.0.0"
#endif

namespace muskat {

namespace fs = std::filesystem;

namespace {

// ---- schema helpers -------------------------------------------------------

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw ParseError(where + "." + key + ": unknown field");
}

double number(const json& obj, const std::string& where, const char* key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ParseError(where + "." + key + ": required field is missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::size_t count(const json& obj, const std::string& where, const char* key, std::optional<std::size_t> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ParseError(where + "." + key + ": required field is missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ParseError(where + "." + key + ": expected an integer");
    if (v.get<long long>() < 0) throw InvalidConfiguration(where + "." + key + ": must be nonnegative");
    return v.get<std::size_t>();
}

std::string text(const json& obj, const std::string& where, const char* key, std::optional<std::string> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ParseError(where + "." + key + ": required field is missing");
    }
    const json& v = obj.at(key);
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool flag(const json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ParseError(where + "." + key + ": expected true or false");
    return v.get<bool>();
}

template <typename F>
auto with_context(const std::string& where, F&& fn) {
    try {
        return fn();
    } catch (const InvalidConfiguration& e) {
        throw InvalidConfiguration(where + ": " + e.what());
    }
}

FluidParams parse_params(const json& j) {
    const std::string w = "params";
    if (j.is_object() && j.contains("normalized")) {
        check_keys(j, w, {"normalized"});
        const json& n = j.at("normalized");
        const std::string wn = w + ".normalized";
        check_keys(n, wn, {"a_mu", "theta", "sigma"});
        const double a = number(n, wn, "a_mu", 0.0);
        const double theta = number(n, wn, "theta", 0.0);
        const double sigma = number(n, wn, "sigma", 1.0);
        FluidParams p = with_context(wn, [&] { return FluidParams::normalized(a, theta, sigma); });
        with_context(wn, [&] { p.validate(); return 0; });
        return p;
    }
    check_keys(j, w, {"mu_minus", "mu_plus", "rho_minus", "rho_plus", "g", "k", "sigma", "V"});
    const FluidParams d;
    FluidParams p;
    p.mu_minus = number(j, w, "mu_minus", d.mu_minus);
    p.mu_plus = number(j, w, "mu_plus", d.mu_plus);
    p.rho_minus = number(j, w, "rho_minus", d.rho_minus);
    p.rho_plus = number(j, w, "rho_plus", d.rho_plus);
    p.g = number(j, w, "g", d.g);
    p.k = number(j, w, "k", d.k);
    p.sigma = number(j, w, "sigma", d.sigma);
    p.V = number(j, w, "V", d.V);
    with_context(w, [&] { p.validate(); return derive_constants(p); });
    return p;
}

InitialCondition parse_ic(const json& j) {
    const std::string w = "initial_condition";
    check_keys(j, w, {"type", "amplitude", "center", "width", "k", "phase", "exponent", "seed", "path"});
    InitialCondition ic;
    ic.type = text(j, w, "type");
    static const std::set<std::string> types{"zero", "gaussian", "wave_packet", "rough", "file"};
    if (!types.count(ic.type))
        throw ParseError(w + ".type: unknown initial condition '" + ic.type +
                         "' (expected zero, gaussian, wave_packet, rough or file)");
    ic.amplitude = number(j, w, "amplitude", ic.type == "zero" || ic.type == "file" ? 0.0 : std::optional<double>{});
    ic.center = number(j, w, "center", 0.0);
    ic.width = number(j, w, "width", 1.0);
    ic.k = number(j, w, "k", ic.type == "wave_packet" ? std::optional<double>{} : 0.0);
    ic.phase = number(j, w, "phase", 0.0);
    ic.exponent = number(j, w, "exponent", -2.6);
    ic.seed = count(j, w, "seed", 1);
    if (ic.type == "file") ic.path = text(j, w, "path");
    if (!(ic.width > 0.0)) throw InvalidConfiguration(w + ".width: must be positive");
    return ic;
}

StepControls parse_controls(const json& j) {
    const std::string w = "controls";
    check_keys(j, w,
               {"dt_init", "dt_min", "dt_max", "rel_tol", "abs_tol", "stepper", "cfl_c1", "cfl_c3", "solver",
                "neumann_tol", "neumann_max_iter", "enforce_rt", "sobolev_s", "decay_threshold"});
    StepControls c;
    c.dt_init = number(j, w, "dt_init", c.dt_init);
    c.dt_min = number(j, w, "dt_min", c.dt_min);
    c.dt_max = number(j, w, "dt_max", c.dt_max);
    c.rel_tol = number(j, w, "rel_tol", c.rel_tol);
    c.abs_tol = number(j, w, "abs_tol", c.abs_tol);
    const std::string stepper = text(j, w, "stepper", "rk_adaptive");
    if (stepper == "rk_adaptive")
        c.stepper = Stepper::rk_adaptive;
    else if (stepper == "imex")
        c.stepper = Stepper::imex;
    else
        throw ParseError(w + ".stepper: expected rk_adaptive or imex");
    c.cfl_c1 = number(j, w, "cfl_c1", c.cfl_c1);
    c.cfl_c3 = number(j, w, "cfl_c3", c.cfl_c3);
    const std::string solver = text(j, w, "solver", "direct");
    if (solver == "direct")
        c.solver.method = SolverMethod::direct;
    else if (solver == "neumann")
        c.solver.method = SolverMethod::neumann;
    else
        throw ParseError(w + ".solver: expected direct or neumann");
    c.solver.neumann_tol = number(j, w, "neumann_tol", c.solver.neumann_tol);
    c.solver.neumann_max_iter = static_cast<int>(count(j, w, "neumann_max_iter", static_cast<std::size_t>(c.solver.neumann_max_iter)));
    c.enforce_rt = flag(j, w, "enforce_rt", c.enforce_rt);
    c.sobolev_s = number(j, w, "sobolev_s", c.sobolev_s);
    c.decay_threshold = number(j, w, "decay_threshold", c.decay_threshold);
    with_context(w, [&] { c.validate(); return 0; });
    return c;
}

// Portable uniform double in [0, 1) from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    return end && *end == '\0';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

GridFunction read_interface_file(const fs::path& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw ParseError("initial_condition.path: cannot open '" + path.string() + "'");
    std::string first;
    std::getline(in, first);
    in.close();
    if (!first.empty() && first.front() == '{') {
        SnapshotRecord rec = read_snapshot(path);
        if (!(rec.f.grid == g))
            throw GridMismatch("initial_condition.path: snapshot grid does not match the configured grid");
        return rec.f;
    }
    std::ifstream csv(path);
    std::string line;
    std::vector<double> values;
    std::size_t lineno = 0;
    while (std::getline(csv, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        double x = 0.0, v = 0.0;
        if (cells.size() < 2 || !parse_double(cells[0], x) || !parse_double(cells[1], v)) {
            if (lineno == 1) continue;  // header
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected two numeric columns x,f");
        }
        const std::size_t j = values.size();
        if (j < g.size() && std::abs(x - g.node(j)) > 1e-9 * g.half_length())
            throw GridMismatch(path.string() + ":" + std::to_string(lineno) + ": x does not match grid node " +
                               std::to_string(j));
        values.push_back(v);
    }
    if (values.size() != g.size())
        throw GridMismatch(path.string() + ": expected " + std::to_string(g.size()) + " samples, found " +
                           std::to_string(values.size()));
    return GridFunction(g, Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace

std::string version() { return MUSKAT_VERSION; }

GridFunction make_initial_condition(const InitialCondition& ic, const Grid& g, const fs::path& base_dir) {
    const auto envelope = [&](double x) {
        const double s = (x - ic.center) / ic.width;
        return std::exp(-s * s);
    };
    if (ic.type == "zero") return GridFunction(g);
    if (ic.type == "gaussian") return GridFunction::sample(g, [&](double x) { return ic.amplitude * envelope(x); });
    if (ic.type == "wave_packet")
        return GridFunction::sample(
            g, [&](double x) { return ic.amplitude * envelope(x) * std::cos(ic.k * (x - ic.center) + ic.phase); });
    if (ic.type == "rough") {
        std::mt19937_64 rng(ic.seed);
        const std::size_t modes = g.size() / 2;
        std::vector<double> amp(modes), phase(modes);
        for (std::size_t m = 1; m < modes; ++m) {
            amp[m] = std::pow(1.0 + static_cast<double>(m), ic.exponent);
            phase[m] = 2.0 * std::numbers::pi * unit(rng);
        }
        GridFunction series = GridFunction::sample(g, [&](double x) {
            double acc = 0.0;
            for (std::size_t m = 1; m < modes; ++m) acc += amp[m] * std::cos(g.wavenumber(m) * x + phase[m]);
            return acc;
        });
        const double peak = sup_norm(series);
        for (std::size_t j = 0; j < g.size(); ++j) series[j] = ic.amplitude * envelope(g.node(j)) * series[j] / peak;
        return series;
    }
    if (ic.type == "file") {
        fs::path p = ic.path;
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return read_interface_file(p, g);
    }
    throw InvalidConfiguration("unknown initial condition type '" + ic.type + "'");
}

RunConfig parse_config(const json& j_in, const fs::path& base_dir) {
    const json& j = (j_in.is_object() && j_in.contains("config") && j_in.contains("termination")) ? j_in.at("config") : j_in;
    check_keys(j, "config", {"params", "grid", "initial_condition", "t_end", "controls", "snapshot_every", "output_dir"});
    for (const char* key : {"params", "grid", "initial_condition", "t_end"})
        if (!j.contains(key)) throw ParseError(std::string("config.") + key + ": required field is missing");

    RunConfig c;
    c.base_dir = base_dir;
    c.params = parse_params(j.at("params"));

    const json& g = j.at("grid");
    check_keys(g, "grid", {"L", "N"});
    c.L = number(g, "grid", "L");
    c.N = count(g, "grid", "N");
    if (c.N % 2 != 0) throw InvalidConfiguration("grid.N: N must be even");
    with_context("grid", [&] { return Grid(c.L, c.N); });

    c.initial_condition = parse_ic(j.at("initial_condition"));
    if (!j.at("t_end").is_number()) throw ParseError("config.t_end: expected a number");
    c.t_end = j.at("t_end").get<double>();
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw InvalidConfiguration("t_end: must be finite and nonnegative");
    if (j.contains("controls")) c.controls = parse_controls(j.at("controls"));
    c.snapshot_every = count(j, "config", "snapshot_every", 10);
    if (c.snapshot_every == 0) throw InvalidConfiguration("snapshot_every: must be at least 1");
    c.output_dir = text(j, "config", "output_dir", "muskat_out");
    if (c.controls.stepper == Stepper::imex && !(c.params.sigma > 0.0))
        throw InvalidConfiguration("controls.stepper: imex requires sigma > 0");

    const Grid grid(c.L, c.N);
    const GridFunction f0 = make_initial_condition(c.initial_condition, grid, base_dir);
    if (!f0.values.allFinite()) throw InvalidConfiguration("initial_condition: samples are not finite");
    if (!decays(f0, c.controls.decay_threshold))
        throw DecayCheckFailed("initial_condition (" + c.initial_condition.type +
                               ") does not decay at the window edge: edge max " + fmt17(boundary_decay(f0)) +
                               " exceeds " + fmt17(c.controls.decay_threshold) + " * sup " + fmt17(sup_norm(f0)));
    return c;
}

RunConfig parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

json to_json(const FluidParams& p) {
    return json{{"mu_minus", p.mu_minus}, {"mu_plus", p.mu_plus}, {"rho_minus", p.rho_minus}, {"rho_plus", p.rho_plus},
                {"g", p.g},               {"k", p.k},             {"sigma", p.sigma},         {"V", p.V}};
}

json to_json(const DerivedConstants& c) {
    return json{{"a_mu", c.a_mu}, {"b_mu", c.b_mu}, {"theta", c.theta}, {"c_rho_mu", c.c_rho_mu}};
}

json to_json(const Diagnostics& d) {
    json j{{"mass", d.mass}, {"sup_norm", d.sup_norm}, {"sobolev_s", d.sobolev_s}, {"max_rhs", d.max_rhs}};
    if (d.rt_infimum) j["rt_infimum"] = *d.rt_infimum;
    return j;
}

json to_json(const RTReport& r) {
    return json{{"in_O", r.in_O}, {"infimum", r.infimum}, {"tolerance", r.tolerance}};
}

json config_to_json(const RunConfig& c) {
    json ic{{"type", c.initial_condition.type}};
    const InitialCondition& i = c.initial_condition;
    if (i.type != "zero" && i.type != "file") {
        ic["amplitude"] = i.amplitude;
        ic["center"] = i.center;
        ic["width"] = i.width;
    }
    if (i.type == "wave_packet") {
        ic["k"] = i.k;
        ic["phase"] = i.phase;
    }
    if (i.type == "rough") {
        ic["exponent"] = i.exponent;
        ic["seed"] = i.seed;
    }
    if (i.type == "file") {
        fs::path p = i.path;
        if (p.is_relative() && !c.base_dir.empty()) p = c.base_dir / p;
        ic["path"] = fs::absolute(p).lexically_normal().string();
    }
    const StepControls& s = c.controls;
    json controls{{"dt_init", s.dt_init},
                  {"dt_min", s.dt_min},
                  {"dt_max", s.dt_max},
                  {"rel_tol", s.rel_tol},
                  {"abs_tol", s.abs_tol},
                  {"stepper", to_string(s.stepper)},
                  {"cfl_c1", s.cfl_c1},
                  {"cfl_c3", s.cfl_c3},
                  {"solver", to_string(s.solver.method)},
                  {"neumann_tol", s.solver.neumann_tol},
                  {"neumann_max_iter", s.solver.neumann_max_iter},
                  {"enforce_rt", s.enforce_rt},
                  {"sobolev_s", s.sobolev_s},
                  {"decay_threshold", s.decay_threshold}};
    return json{{"params", to_json(c.params)},
                {"grid", {{"L", c.L}, {"N", c.N}}},
                {"initial_condition", ic},
                {"t_end", c.t_end},
                {"controls", controls},
                {"snapshot_every", c.snapshot_every},
                {"output_dir", c.output_dir}};
}

fs::path write_snapshot(const Snapshot& s, const FluidParams& p, const fs::path& dir, std::size_t index) {
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.csv", index);
    const fs::path path = dir / name;
    const json header{{"time", s.t},
                      {"grid", {{"L", s.f.grid.half_length()}, {"N", s.f.grid.size()}}},
                      {"diagnostics", to_json(s.diagnostics)},
                      {"params", to_json(p)},
                      {"omega",
                       {{"residual_norm", s.omega.residual_norm},
                        {"method", to_string(s.omega.method)},
                        {"iterations", s.omega.iterations}}}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write snapshot '" + path.string() + "'");
    out << header.dump() << '\n' << "x,f,omega\n";
    for (std::size_t j = 0; j < s.f.size(); ++j)
        out << fmt17(s.f.grid.node(j)) << ',' << fmt17(s.f[j]) << ',' << fmt17(s.omega.omega[j]) << '\n';
    if (!out) throw Error("failed while writing snapshot '" + path.string() + "'");
    return path;
}

SnapshotRecord read_snapshot(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open snapshot '" + path.string() + "'");
    const std::string where = path.string() + ":";
    std::string line;
    if (!std::getline(in, line)) throw ParseError(where + "1: missing JSON header line");
    json header;
    try {
        header = json::parse(strip_cr(line));
    } catch (const json::parse_error& e) {
        throw ParseError(where + "1: malformed JSON header (" + e.what() + ")");
    }
    if (!header.is_object() || !header.contains("time") || !header["time"].is_number() || !header.contains("grid") ||
        !header["grid"].is_object() || !header["grid"].contains("L") || !header["grid"].contains("N"))
        throw ParseError(where + "1: header must contain time and grid {L, N}");
    double L = 0.0;
    std::size_t N = 0;
    try {
        L = header["grid"]["L"].get<double>();
        N = header["grid"]["N"].get<std::size_t>();
    } catch (const json::exception&) {
        throw ParseError(where + "1: grid L and N must be numbers");
    }
    const Grid g = [&] {
        try {
            return Grid(L, N);
        } catch (const InvalidConfiguration& e) {
            throw ParseError(where + "1: " + e.what());
        }
    }();
    if (!std::getline(in, line) || strip_cr(line) != "x,f,omega")
        throw ParseError(where + "2: expected column header 'x,f,omega'");

    SnapshotRecord rec{header["time"].get<double>(), GridFunction(g), GridFunction(g), header};
    std::size_t j = 0;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        double x = 0.0, fv = 0.0, wv = 0.0;
        if (cells.size() != 3 || !parse_double(cells[0], x) || !parse_double(cells[1], fv) || !parse_double(cells[2], wv))
            throw ParseError(where + std::to_string(lineno) + ": expected three numeric columns");
        if (j >= N) throw ParseError(where + std::to_string(lineno) + ": more rows than grid.N = " + std::to_string(N));
        if (std::abs(x - g.node(j)) > 1e-9 * L)
            throw GridMismatch(where + std::to_string(lineno) + ": x does not match grid node " + std::to_string(j));
        rec.f[j] = fv;
        rec.omega[j] = wv;
        ++j;
    }
    if (j != N)
        throw ParseError(where + std::to_string(lineno + 1) + ": expected " + std::to_string(N) + " rows, found " +
                         std::to_string(j));
    return rec;
}

std::vector<Point> read_points(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open points file '" + path.string() + "'");
    std::vector<Point> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        Point p;
        if (cells.size() != 2 || !parse_double(cells[0], p.x) || !parse_double(cells[1], p.y)) {
            if (lineno == 1) continue;
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected two numeric columns x,y");
        }
        pts.push_back(p);
    }
    return pts;
}

void write_samples_csv(const std::vector<FieldSample>& samples, std::ostream& out) {
    out << "x,y,side,v1,v2,pressure\n";
    for (const auto& s : samples) {
        out << fmt17(s.point.x) << ',' << fmt17(s.point.y) << ',' << to_string(s.side) << ',' << fmt17(s.v1) << ','
            << fmt17(s.v2) << ',' << (s.pressure ? fmt17(*s.pressure) : std::string()) << '\n';
    }
}

RunOutcome run_simulation(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const Grid grid(cfg.L, cfg.N);
    const GridFunction f0 = make_initial_condition(cfg.initial_condition, grid, cfg.base_dir);
    fs::path out_dir = cfg.output_dir;
    if (out_dir.is_relative() && !cfg.base_dir.empty()) out_dir = cfg.base_dir / out_dir;
    fs::create_directories(out_dir);

    RunOutcome outcome;
    json index = json::array();
    std::size_t next = 0;
    auto on_snapshot = [&](const Snapshot& s) {
        const fs::path p = write_snapshot(s, cfg.params, out_dir, next++);
        index.push_back({{"file", p.filename().string()}, {"time", s.t}});
    };
    try {
        outcome.trajectory = simulate(f0, cfg.params, cfg.t_end, cfg.controls, cfg.snapshot_every, on_snapshot);
    } catch (const RTBreakdown& e) {
        outcome.trajectory.cause = Termination::rt_breakdown;
        outcome.trajectory.message = e.what();
    }
    const Trajectory& tr = outcome.trajectory;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json m{{"config", config_to_json(cfg)},
           {"termination", to_string(tr.cause)},
           {"message", tr.message},
           {"t_final", tr.t_final},
           {"accepted_steps", tr.accepted_steps},
           {"wall_time_s", wall},
           {"snapshots", index},
           {"version", version()},
           {"derived", to_json(derive_constants(cfg.params))}};
    if (!tr.snapshots.empty()) {
        m["diagnostics"] = {{"initial", to_json(tr.snapshots.front().diagnostics)},
                            {"final", to_json(tr.snapshots.back().diagnostics)}};
    }
    // Echo the resolved output directory so a re-run writes elsewhere only
    // when asked to.
    m["config"]["output_dir"] = fs::absolute(out_dir).lexically_normal().string();
    outcome.manifest = out_dir / "manifest.json";
    std::ofstream(outcome.manifest) << std::setw(2) << m << '\n';
    outcome.manifest_json = std::move(m);
    return outcome;
}

}  // namespace muskat
