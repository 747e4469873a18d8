#include "nsi/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nsi::io {

namespace {

using nlohmann::json;

bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string full_precision(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string six_digits(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_number = 0;
  bool header_checked = false;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split(view, ',');
    std::vector<double> row(cells.size());
    bool all_numeric = true;
    size_t bad_col = 0;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(trim(cells[c]), row[c])) {
        all_numeric = false;
        bad_col = c;
        break;
      }
    }
    if (!all_numeric) {
      // a non-numeric first data line is a header; anywhere else it is an error
      if (!header_checked && rows.empty()) {
        header_checked = true;
        width = cells.size();
        continue;
      }
      std::ostringstream msg;
      msg << path << ": non-numeric cell at row " << line_number << ", column " << bad_col + 1;
      throw ParseError(msg.str());
    }
    header_checked = true;
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      std::ostringstream msg;
      msg << path << ": ragged row " << line_number << " (expected " << width << " cells, got "
          << cells.size() << ")";
      throw ParseError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(path + ": no data rows");
  }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < width; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return m;
}

Vector load_vector_csv(const std::string& path) {
  const Matrix m = load_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError(path + ": expected a single column (or row) of numbers");
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << full_precision(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_vector_csv(const std::string& path, const Vector& v) {
  write_matrix_csv(path, Matrix(v));
}

std::string format_cell(double mean, double sd) {
  return six_digits(mean) + "(" + six_digits(sd) + ")";
}

namespace {

std::string stat_or_dash(const MetricStat& stat, bool as_cell) {
  if (stat.count == 0) return as_cell ? "-" : "nan,nan";
  return as_cell ? format_cell(stat.mean, stat.sd)
                 : full_precision(stat.mean) + "," + full_precision(stat.sd);
}

}  // namespace

void emit_table(const std::vector<AggregateRow>& rows, const std::string& path,
                TableFormat format) {
  if (rows.empty()) throw InvalidInputError("emit_table: no rows");
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  if (format == TableFormat::csv) {
    out << "setting,method,replications,l2_mean,l2_sd,l1_mean,l1_sd,fpr_mean,fpr_sd,"
           "tpr_mean,tpr_sd,nz_mean,nz_sd\n";
    for (const auto& row : rows) {
      out << row.setting << ',' << to_string(row.method) << ',' << row.replications << ','
          << stat_or_dash(row.l2, false) << ',' << stat_or_dash(row.l1, false) << ','
          << stat_or_dash(row.fpr, false) << ',' << stat_or_dash(row.tpr, false) << ','
          << stat_or_dash(row.nz, false) << '\n';
    }
  } else {
    out << "| setting | method | l2 | l1 | FPR | TPR | NZ |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& row : rows) {
      out << "| " << row.setting << " | " << to_string(row.method) << " | "
          << stat_or_dash(row.l2, true) << " | " << stat_or_dash(row.l1, true) << " | "
          << stat_or_dash(row.fpr, true) << " | " << stat_or_dash(row.tpr, true) << " | "
          << stat_or_dash(row.nz, true) << " |\n";
    }
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace {

json record_to_json(const ReplicationRecord& r) {
  json j{{"setting", r.setting},
         {"method", to_string(r.method)},
         {"replication", r.replication},
         {"seed", r.seed},
         {"lambda", r.lambda},
         {"n_iterations", r.n_iterations},
         {"converged", r.converged},
         {"l1", r.l1},
         {"l2", r.l2},
         {"nz", r.nz}};
  j["fpr"] = r.fpr.has_value() ? json(*r.fpr) : json(nullptr);
  j["tpr"] = r.tpr.has_value() ? json(*r.tpr) : json(nullptr);
  return j;
}

ReplicationRecord record_from_json(const json& j) {
  ReplicationRecord r;
  r.setting = j.at("setting").get<std::string>();
  r.method = method_from_string(j.at("method").get<std::string>());
  r.replication = j.at("replication").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda = j.at("lambda").get<double>();
  r.n_iterations = j.at("n_iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.l1 = j.at("l1").get<double>();
  r.l2 = j.at("l2").get<double>();
  r.nz = j.at("nz").get<long>();
  if (!j.at("fpr").is_null()) r.fpr = j.at("fpr").get<double>();
  if (!j.at("tpr").is_null()) r.tpr = j.at("tpr").get<double>();
  return r;
}

}  // namespace

void write_records_jsonl(const std::string& path, const std::vector<ReplicationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& r : records) {
    out << record_to_json(r).dump() << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<ReplicationRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<ReplicationRecord> records;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << path << ": bad record at line " << line_number << ": " << e.what();
      throw ParseError(msg.str());
    }
  }
  return records;
}

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
  std::vector<double> values;
  for (std::string_view cell : split(text, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    double v = 0.0;
    if (!parse_double(cell, v)) {
      throw ParseError("config: bad numeric list for key '" + key + "'");
    }
    values.push_back(v);
  }
  return values;
}

double parse_double_or_throw(const std::string& text, const std::string& key) {
  double v = 0.0;
  if (!parse_double(trim(text), v)) {
    throw ParseError("config: bad numeric value for key '" + key + "'");
  }
  return v;
}

long parse_long_or_throw(const std::string& text, const std::string& key) {
  const double v = parse_double_or_throw(text, key);
  if (v != std::floor(v)) {
    throw ParseError("config: expected an integer for key '" + key + "'");
  }
  return static_cast<long>(v);
}

bool parse_bool_or_throw(const std::string& text, const std::string& key) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ParseError("config: expected a boolean for key '" + key + "'");
}

}  // namespace

ExperimentSpec load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  ExperimentSpec spec;
  std::string section;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || view.front() == ';') continue;
    if (view.front() == '[') {
      if (view.back() != ']') {
        std::ostringstream msg;
        msg << path << ": malformed section header at line " << line_number;
        throw ParseError(msg.str());
      }
      section = std::string(trim(view.substr(1, view.size() - 2)));
      if (section != "design" && section != "sweep" && section != "experiment" &&
          section != "solver" && section != "glasso_rule") {
        throw ParseError(path + ": unknown section '" + section + "'");
      }
      continue;
    }
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream msg;
      msg << path << ": expected key=value at line " << line_number;
      throw ParseError(msg.str());
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    const std::string qualified = section.empty() ? key : section + "." + key;

    if (section == "design") {
      if (key == "n") spec.design.n = parse_long_or_throw(value, qualified);
      else if (key == "p") spec.design.p = parse_long_or_throw(value, qualified);
      else if (key == "q") spec.design.q = parse_long_or_throw(value, qualified);
      else if (key == "rho") spec.design.rho = parse_double_or_throw(value, qualified);
      else if (key == "beta_value") spec.design.beta_value = parse_double_or_throw(value, qualified);
      else if (key == "beta_support") spec.design.beta_support = parse_long_or_throw(value, qualified);
      else if (key == "gamma_value") spec.design.gamma_value = parse_double_or_throw(value, qualified);
      else if (key == "sigma") spec.design.sigma = parse_double_or_throw(value, qualified);
      else throw ParseError(path + ": unknown key '" + qualified + "'");
    } else if (section == "sweep") {
      if (key == "parameter") spec.sweep.parameter = value;
      else if (key == "values") spec.sweep.values = parse_double_list(value, qualified);
      else throw ParseError(path + ": unknown key '" + qualified + "'");
    } else if (section == "experiment") {
      if (key == "methods") {
        spec.methods.clear();
        for (std::string_view cell : split(value, ',')) {
          const auto name = trim(cell);
          if (!name.empty()) spec.methods.push_back(method_from_string(std::string(name)));
        }
      } else if (key == "replications") {
        spec.replications = static_cast<int>(parse_long_or_throw(value, qualified));
      } else if (key == "base_seed") {
        spec.base_seed = static_cast<std::uint64_t>(parse_long_or_throw(value, qualified));
      } else if (key == "cv_folds") {
        spec.cv_folds = static_cast<int>(parse_long_or_throw(value, qualified));
      } else if (key == "grid_size") {
        spec.grid_size = static_cast<int>(parse_long_or_throw(value, qualified));
      } else if (key == "grid_min_ratio") {
        spec.grid_min_ratio = parse_double_or_throw(value, qualified);
      } else if (key == "precision") {
        spec.precision = precision_source_from_string(value);
      } else if (key == "threads") {
        spec.threads = static_cast<int>(parse_long_or_throw(value, qualified));
      } else {
        throw ParseError(path + ": unknown key '" + qualified + "'");
      }
    } else if (section == "solver") {
      if (key == "tol") spec.fit.tol = parse_double_or_throw(value, qualified);
      else if (key == "max_outer_iter") {
        spec.fit.max_outer_iter = static_cast<int>(parse_long_or_throw(value, qualified));
      } else if (key == "standardize") {
        spec.fit.standardize = parse_bool_or_throw(value, qualified);
      } else if (key == "zero_tol") {
        spec.fit.zero_tol = parse_double_or_throw(value, qualified);
      } else {
        throw ParseError(path + ": unknown key '" + qualified + "'");
      }
    } else if (section == "glasso_rule") {
      if (key == "M") spec.glasso_rule.M = parse_double_or_throw(value, qualified);
      else if (key == "alpha") spec.glasso_rule.alpha = parse_double_or_throw(value, qualified);
      else if (key == "tau") spec.glasso_rule.tau = parse_double_or_throw(value, qualified);
      else throw ParseError(path + ": unknown key '" + qualified + "'");
    } else {
      throw ParseError(path + ": key '" + qualified + "' appears outside any section");
    }
  }
  spec.validate();
  return spec;
}

namespace {

json experiment_to_json_obj(const ExperimentSpec& spec) {
  json methods = json::array();
  for (Method m : spec.methods) methods.push_back(to_string(m));
  return json{
      {"design",
       {{"n", spec.design.n},
        {"p", spec.design.p},
        {"q", spec.design.q},
        {"rho", spec.design.rho},
        {"beta_value", spec.design.beta_value},
        {"beta_support", spec.design.beta_support},
        {"gamma_value", spec.design.gamma_value},
        {"sigma", spec.design.sigma},
        {"seed", spec.design.seed}}},
      {"sweep", {{"parameter", spec.sweep.parameter}, {"values", spec.sweep.values}}},
      {"methods", methods},
      {"replications", spec.replications},
      {"base_seed", spec.base_seed},
      {"cv_folds", spec.cv_folds},
      {"grid_size", spec.grid_size},
      {"grid_min_ratio", spec.grid_min_ratio},
      {"precision", to_string(spec.precision)},
      {"glasso_rule",
       {{"M", spec.glasso_rule.M}, {"alpha", spec.glasso_rule.alpha}, {"tau", spec.glasso_rule.tau}}},
      {"solver",
       {{"tol", spec.fit.tol},
        {"max_outer_iter", spec.fit.max_outer_iter},
        {"standardize", spec.fit.standardize},
        {"zero_tol", spec.fit.zero_tol}}},
      {"threads", spec.threads}};
}

}  // namespace

std::string experiment_to_json(const ExperimentSpec& spec) {
  return experiment_to_json_obj(spec).dump(2);
}

ExperimentSpec experiment_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment json: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    const json& d = j.at("design");
    spec.design.n = d.at("n").get<Index>();
    spec.design.p = d.at("p").get<Index>();
    spec.design.q = d.at("q").get<Index>();
    spec.design.rho = d.at("rho").get<double>();
    spec.design.beta_value = d.at("beta_value").get<double>();
    spec.design.beta_support = d.at("beta_support").get<Index>();
    spec.design.gamma_value = d.at("gamma_value").get<double>();
    spec.design.sigma = d.at("sigma").get<double>();
    spec.design.seed = d.at("seed").get<std::uint64_t>();
    spec.sweep.parameter = j.at("sweep").at("parameter").get<std::string>();
    spec.sweep.values = j.at("sweep").at("values").get<std::vector<double>>();
    spec.methods.clear();
    for (const auto& m : j.at("methods")) {
      spec.methods.push_back(method_from_string(m.get<std::string>()));
    }
    spec.replications = j.at("replications").get<int>();
    spec.base_seed = j.at("base_seed").get<std::uint64_t>();
    spec.cv_folds = j.at("cv_folds").get<int>();
    spec.grid_size = j.at("grid_size").get<int>();
    spec.grid_min_ratio = j.at("grid_min_ratio").get<double>();
    spec.precision = precision_source_from_string(j.at("precision").get<std::string>());
    spec.glasso_rule.M = j.at("glasso_rule").at("M").get<double>();
    spec.glasso_rule.alpha = j.at("glasso_rule").at("alpha").get<double>();
    spec.glasso_rule.tau = j.at("glasso_rule").at("tau").get<double>();
    spec.fit.tol = j.at("solver").at("tol").get<double>();
    spec.fit.max_outer_iter = j.at("solver").at("max_outer_iter").get<int>();
    spec.fit.standardize = j.at("solver").at("standardize").get<bool>();
    spec.fit.zero_tol = j.at("solver").at("zero_tol").get<double>();
    spec.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment json: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace nsi::io
