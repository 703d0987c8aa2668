#ifndef VISCOCAL_IO_HPP
#define VISCOCAL_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "viscocal/calibration.hpp"
#include "viscocal/laplace.hpp"

namespace viscocal {

using json = nlohmann::json;

std::string format_g17(double v);

/// CSV time series: header row, column 0 is t, 17-significant-digit values,
/// strictly increasing t. parse(emit(x)) round-trips exactly.
struct TimeSeries {
    std::vector<std::string> names;          // column names after "t"
    std::vector<double> t;
    std::vector<std::vector<double>> columns;  // per name
};
void write_time_series(const std::filesystem::path& path, const TimeSeries& ts);
TimeSeries read_time_series(const std::filesystem::path& path);

SoeKernel kernel_from_json(const json& j);
json kernel_to_json(const SoeKernel& k);
SoeKernel load_kernel_file(const std::filesystem::path& path);
void save_kernel_file(const std::filesystem::path& path, const SoeKernel& k);

RationalLaplace pole_residue_from_json(const json& j);
json pole_residue_to_json(const RationalLaplace& rl);
RationalLaplace load_pole_residue_file(const std::filesystem::path& path);
void save_pole_residue_file(const std::filesystem::path& path, const RationalLaplace& rl);

/// Kernel specification accepted in configs:
///   {"weights": [...], "rates": [...]}          inline SOE
///   {"file": "kernel.json"}                     kernel file reference
///   {"alpha": a, "modes": m, ...}               AAA fit of the fractional kernel
///   {"zero": true}                              zero kernel
struct KernelSpecResult {
    SoeKernel kernel = SoeKernel::zero();
    json provenance;  // how it was built (for result metadata)
};
KernelSpecResult kernel_from_spec(const json& spec, const std::filesystem::path& base_dir);

struct RunConfig {
    BeamMesh mesh;
    MaterialParams material;
    SolverConfig solver;
    LoadSpec load;                 // forward runs
    json raw;                      // full parsed document
    std::filesystem::path base_dir;
};
RunConfig parse_run_config(const std::filesystem::path& path);

LoadSpec load_spec_from_json(const json& j);

} // namespace viscocal

#endif
