#pragma once

// File formats shared by the CLI:
//  - parameter files: "key = value" lines with keys alpha, A, M, Q and
//    power (comma-separated); '#' starts a comment
//  - policy CSV: one line per state k, entry m is f[k][m] with 17
//    significant digits
//  - curve CSV / JSON, point-cloud CSV, gnuplot .dat files and script
//  - fixed-format MPS for linear programs

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dps/lp.hpp"
#include "dps/model.hpp"
#include "dps/pareto.hpp"
#include "dps/sim.hpp"

namespace dps {

/// Parameter values from one source; unset keys stay empty.
struct ParamSource {
  std::optional<double> alpha;
  std::optional<int> packet_bits;
  std::optional<int> max_bits;
  std::optional<int> buffer_bits;
  std::optional<std::vector<double>> power;
};

ParamSource read_param_file(std::istream& in);
ParamSource read_param_file(const std::string& path);
void write_param_file(std::ostream& out, const ModelParams& params);

/// Values in `overrides` win over `base`. Throws InvalidParameter naming
/// the first missing key.
RawParams merge_params(const ParamSource& base, const ParamSource& overrides);

std::vector<double> parse_number_list(const std::string& text);

/// Shortest round-trip text for a double (%.17g).
std::string format_double(double v);

void write_policy_csv(std::ostream& out, const Policy& policy);
Policy read_policy_csv(std::istream& in, const ModelParams& params);
Policy read_policy_csv(const std::string& path, const ModelParams& params);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_vector_csv(std::ostream& out, const std::vector<double>& v);

/// Columns: power, delay, k_0..k_M (empty when a vertex is not threshold-based).
void write_curve_csv(std::ostream& out, const ModelParams& params, const ParetoCurve& curve);
std::string curve_to_json(const ModelParams& params, const ParetoCurve& curve);

/// Columns: index, power, delay, threshold (0/1), singular (0/1), a_0..a_K.
void write_cloud_csv(std::ostream& out, const ModelParams& params, const BruteForceResult& result);

/// Whitespace-separated "power delay" rows for plotting.
void write_points_dat(std::ostream& out, const std::vector<DelayPowerPoint>& points);
void write_gnuplot_script(std::ostream& out, const std::string& cloud_dat, const std::string& threshold_dat,
                          const std::string& curve_dat, const std::string& lp_dat);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);
void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name);

void write_simulation_summary(std::ostream& out, const SimulationResult& r);

}  // namespace dps
