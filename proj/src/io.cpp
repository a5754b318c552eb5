#include "dps/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace dps {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "cannot parse " + what + " '" + text + "' as a number");
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "cannot parse " + what + " '" + text + "' as an integer");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), "list entry"));
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty number list");
  return out;
}

ParamSource read_param_file(std::istream& in) {
  ParamSource p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "alpha") p.alpha = parse_double(value, key);
    else if (key == "A") p.packet_bits = parse_int(value, key);
    else if (key == "M") p.max_bits = parse_int(value, key);
    else if (key == "Q") p.buffer_bits = parse_int(value, key);
    else if (key == "power") p.power = parse_number_list(value);
    else throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return p;
}

ParamSource read_param_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_param_file(in);
}

void write_param_file(std::ostream& out, const ModelParams& params) {
  out << "alpha = " << format_double(params.alpha()) << '\n'
      << "A = " << params.packet_bits() << '\n'
      << "M = " << params.max_bits() << '\n'
      << "Q = " << params.buffer_bits() << '\n'
      << "power = ";
  const auto table = params.power_table();
  for (std::size_t m = 0; m < table.size(); ++m) out << (m ? "," : "") << format_double(table[m]);
  out << '\n';
}

RawParams merge_params(const ParamSource& base, const ParamSource& overrides) {
  const auto pick = [](const auto& over, const auto& under, const char* name) {
    if (over) return *over;
    if (under) return *under;
    throw Error(ErrorCode::InvalidParameter, std::string("missing parameter '") + name + "'");
  };
  RawParams r;
  r.alpha = pick(overrides.alpha, base.alpha, "alpha");
  r.packet_bits = pick(overrides.packet_bits, base.packet_bits, "A");
  r.max_bits = pick(overrides.max_bits, base.max_bits, "M");
  r.buffer_bits = pick(overrides.buffer_bits, base.buffer_bits, "Q");
  r.power = pick(overrides.power, base.power, "power");
  return r;
}

void write_policy_csv(std::ostream& out, const Policy& policy) {
  write_matrix_csv(out, policy.matrix());
}

Policy read_policy_csv(std::istream& in, const ModelParams& params) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(parse_number_list(line));
  }
  if (rows.size() != params.num_states()) {
    throw Error(ErrorCode::ParseError, "policy file has " + std::to_string(rows.size()) + " rows, expected " +
                                           std::to_string(params.num_states()));
  }
  Matrix f(params.num_states(), params.num_actions());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != params.num_actions()) {
      throw Error(ErrorCode::ParseError, "policy row " + std::to_string(k) + " has " +
                                             std::to_string(rows[k].size()) + " entries, expected " +
                                             std::to_string(params.num_actions()));
    }
    for (std::size_t m = 0; m < rows[k].size(); ++m) f(k, m) = rows[k][m];
  }
  return Policy::from_matrix(params, std::move(f));
}

Policy read_policy_csv(const std::string& path, const ModelParams& params) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_policy_csv(in, params);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_vector_csv(std::ostream& out, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << i << ',' << format_double(v[i]) << '\n';
}

void write_curve_csv(std::ostream& out, const ModelParams& params, const ParetoCurve& curve) {
  out << "power,delay";
  for (std::size_t m = 0; m < params.num_actions(); ++m) out << ",k_" << m;
  out << '\n';
  for (const auto& v : curve.vertices()) {
    out << format_double(v.point.power) << ',' << format_double(v.point.delay);
    for (std::size_t m = 0; m < params.num_actions(); ++m) {
      out << ',';
      if (v.thresholds) out << v.thresholds->thresholds[m];
    }
    out << '\n';
  }
}

std::string curve_to_json(const ModelParams& params, const ParetoCurve& curve) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["params"] = {{"alpha", params.alpha()},
                   {"A", params.packet_bits()},
                   {"M", params.max_bits()},
                   {"Q", params.buffer_bits()},
                   {"K", params.max_state()},
                   {"power", std::vector<double>(params.power_table().begin(), params.power_table().end())}};
  ordered_json vertices = ordered_json::array();
  for (const auto& v : curve.vertices()) {
    ordered_json jv;
    jv["power"] = v.point.power;
    jv["delay"] = v.point.delay;
    jv["thresholds"] = v.thresholds ? ordered_json(v.thresholds->thresholds) : ordered_json(nullptr);
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < v.policy.num_states(); ++k) {
      const auto r = v.policy.row(k);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    jv["policy"] = std::move(rows);
    vertices.push_back(std::move(jv));
  }
  doc["vertices"] = std::move(vertices);
  ordered_json segments = ordered_json::array();
  for (const auto& s : curve.segments()) {
    segments.push_back({{"from", {s.from.power, s.from.delay}}, {"to", {s.to.power, s.to.delay}}, {"slope", s.slope}});
  }
  doc["segments"] = std::move(segments);
  return doc.dump(2) + "\n";
}

void write_cloud_csv(std::ostream& out, const ModelParams& params, const BruteForceResult& result) {
  const DeterministicPolicySpace space(params, result.cloud.size());
  out << "index,power,delay,threshold,singular";
  for (int k = 0; k <= params.max_state(); ++k) out << ",a_" << k;
  out << '\n';
  space.for_each([&](std::uint64_t index, const std::vector<int>& actions) {
    const auto i = static_cast<std::size_t>(index);
    const bool threshold = is_threshold(params, Policy::deterministic(params, actions)).has_value();
    out << index << ',';
    if (result.singular[i]) {
      out << ",,";
    } else {
      out << format_double(result.cloud[i].power) << ',' << format_double(result.cloud[i].delay) << ',';
    }
    out << (threshold ? 1 : 0) << ',' << (result.singular[i] ? 1 : 0);
    for (int a : actions) out << ',' << a;
    out << '\n';
    return true;
  });
}

void write_points_dat(std::ostream& out, const std::vector<DelayPowerPoint>& points) {
  out << "# power delay\n";
  for (const auto& p : points) out << format_double(p.power) << ' ' << format_double(p.delay) << '\n';
}

void write_gnuplot_script(std::ostream& out, const std::string& cloud_dat, const std::string& threshold_dat,
                          const std::string& curve_dat, const std::string& lp_dat) {
  out << "set xlabel 'average power'\n"
      << "set ylabel 'average delay (slots)'\n"
      << "set key top right\n"
      << "set grid\n"
      << "plot ";
  bool first = true;
  const auto add = [&](const std::string& file, const std::string& style) {
    if (file.empty()) return;
    out << (first ? "" : ", \\\n     ") << "'" << file << "' using 1:2 " << style;
    first = false;
  };
  add(cloud_dat, "with points pt 7 ps 0.4 lc rgb '#999999' title 'deterministic policies'");
  add(threshold_dat, "with points pt 1 ps 1.2 lc rgb '#1f77b4' title 'threshold policies'");
  add(curve_dat, "with linespoints pt 6 lw 2 lc rgb '#d62728' title 'optimal tradeoff'");
  add(lp_dat, "with points pt 2 ps 1.0 lc rgb '#2ca02c' title 'linear program'");
  out << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "p_th,delay,status\n";
  for (const auto& p : points) {
    out << format_double(p.budget) << ',';
    if (p.solution.status == LpStatus::Optimal) out << format_double(p.solution.delay);
    out << ',' << to_string(p.solution.status) << '\n';
  }
}

void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name) {
  const auto field = [](const std::string& s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%-8s", s.c_str());
    return std::string(buf);
  };
  const auto number = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-12.6g", v);
    return std::string(buf);
  };
  // Fixed MPS caps names at 8 characters, so rows and columns are renamed.
  const auto row_name = [](std::size_t i) { return "R" + std::to_string(i); };
  const auto col_name = [](std::size_t j) { return "X" + std::to_string(j); };

  out << "* " << name << '\n';
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) out << "* " << row_name(i) << " = " << lp.constraints[i].name << '\n';
  for (std::size_t j = 0; j < lp.num_variables(); ++j) out << "* " << col_name(j) << " = " << lp.variable_names[j] << '\n';
  out << "* objective constant " << format_double(lp.objective_constant) << '\n';
  out << "NAME          " << name.substr(0, 8) << '\n' << "ROWS\n" << " N  COST\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const char* t = lp.constraints[i].sense == ConstraintSense::Equal       ? "E"
                    : lp.constraints[i].sense == ConstraintSense::LessEqual ? "L"
                                                                            : "G";
    out << ' ' << t << "  " << row_name(i) << '\n';
  }
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const auto emit = [&](const std::string& row, double v) {
      if (v == 0.0) return;
      out << "    " << field(col_name(j)) << "  " << field(row) << "  " << number(v) << '\n';
    };
    emit("COST", lp.objective[j]);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) emit(row_name(i), lp.constraints[i].coefficients[j]);
  }
  out << "RHS\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    if (lp.constraints[i].rhs == 0.0) continue;
    out << "    " << field("RHS") << "  " << field(row_name(i)) << "  " << number(lp.constraints[i].rhs) << '\n';
  }
  out << "ENDATA\n";
}

void write_simulation_summary(std::ostream& out, const SimulationResult& r) {
  out << "slots " << r.slots << '\n'
      << "measured_slots " << r.measured_slots << '\n'
      << "seed " << r.seed << '\n'
      << "empirical_power " << format_double(r.empirical_power) << '\n'
      << "empirical_delay " << format_double(r.empirical_delay) << '\n'
      << "overflow_violations " << r.overflow_violations << '\n'
      << "underflow_violations " << r.underflow_violations << '\n';
}

}  // namespace dps
