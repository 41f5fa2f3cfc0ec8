#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/grid.hpp"
#include "muskat/params.hpp"
#include "muskat/stability.hpp"

namespace muskat {

using json = nlohmann::json;

/// Named initial interface families.
///
///   zero
///   gaussian      amplitude * exp(-((x - center)/width)^2)
///   wave_packet   gaussian envelope * cos(k (x - center) + phase)
///   rough         gaussian envelope * random Fourier series with
///                 |coefficient of mode m| ~ (1 + m)^exponent, scaled so the
///                 series has sup norm `amplitude`
///   file          samples read from `path` (a snapshot or an x,f CSV)
struct InitialCondition {
    std::string type = "zero";
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
    double k = 0.0;
    double phase = 0.0;
    double exponent = -2.6;
    std::uint64_t seed = 1;
    std::string path;
};

GridFunction make_initial_condition(const InitialCondition& ic, const Grid& g,
                                    const std::filesystem::path& base_dir = {});

struct RunConfig {
    FluidParams params;
    double L = 20.0;
    std::size_t N = 512;
    InitialCondition initial_condition;
    double t_end = 0.0;
    StepControls controls;
    std::size_t snapshot_every = 10;
    std::string output_dir = "muskat_out";
    std::filesystem::path base_dir;  ///< directory relative paths are resolved against
};

/// Parses a config object. A run manifest is accepted too; its "config"
/// echo is used. Errors name the offending field.
RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
RunConfig parse_config_file(const std::filesystem::path& path);

/// Complete config with every default spelled out.
json config_to_json(const RunConfig& c);

json to_json(const FluidParams& p);
json to_json(const DerivedConstants& c);
json to_json(const Diagnostics& d);
json to_json(const RTReport& r);

/// Snapshot file contents as read back from disk.
struct SnapshotRecord {
    double t = 0.0;
    GridFunction f;
    GridFunction omega;
    json header;
};

/// Writes `snap_XXXXXX.csv` into dir and returns its path.
std::filesystem::path write_snapshot(const Snapshot& s, const FluidParams& p, const std::filesystem::path& dir,
                                     std::size_t index);

/// Throws ParseError naming the offending line.
SnapshotRecord read_snapshot(const std::filesystem::path& path);

/// Reads points from a CSV with two columns (an optional header line is
/// skipped).
std::vector<Point> read_points(const std::filesystem::path& path);

void write_samples_csv(const std::vector<FieldSample>& samples, std::ostream& out);

struct RunOutcome {
    Trajectory trajectory;
    std::filesystem::path manifest;
    json manifest_json;
};

/// Runs a configured simulation, writing snapshots and manifest.json to the
/// output directory. Initial data outside the Rayleigh-Taylor set produce a
/// manifest with cause rt_breakdown and no snapshots.
RunOutcome run_simulation(const RunConfig& cfg);

std::string version();

}  // namespace muskat
