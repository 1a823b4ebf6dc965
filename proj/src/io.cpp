#include "oica/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oica/errors.hpp"
#include "oica/version.hpp"

namespace oica::io {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), errc::io_error, "cannot open " + tmp.string() + " for writing");
    out << content;
    require(out.good(), errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  require(!ec, errc::io_error, "rename failed for " + target.string());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string matrix_to_csv(const Eigen::MatrixXd& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out += ',';
      out += fmt17(M(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s == "nan") {
    *out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && end != s.c_str();
}

}  // namespace

Eigen::MatrixXd matrix_from_csv_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    bool ok = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, &v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      require(first, errc::io_error, "non-numeric row in csv");
      first = false;  // header line
      continue;
    }
    first = false;
    if (!rows.empty())
      require(row.size() == rows.front().size(), errc::io_error, "ragged csv rows");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd M(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  return matrix_from_csv_text(read_file(path));
}

std::string samples_to_csv(const Eigen::MatrixXd& X) {
  std::string out;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (j) out += ',';
    out += "x" + std::to_string(j + 1);
  }
  out += '\n';
  out += matrix_to_csv(X);
  return out;
}

Eigen::MatrixXd read_samples_csv(const std::string& path) { return read_matrix_csv(path); }

json source_spec_to_json(const SourceSpec& spec) {
  json sources = json::array();
  for (const auto& e : spec.entries) {
    json s;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Exponential>) {
            s["type"] = "exponential";
            s["rate"] = v.rate;
          } else if constexpr (std::is_same_v<T, StudentT>) {
            s["type"] = "student_t";
            s["dof"] = v.dof;
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            s["type"] = "gaussian";
            s["variance"] = v.variance;
          } else {
            s["type"] = "moments";
            s["variance"] = v.variance;
            s["fourth_cumulant"] = v.fourth_cumulant;
          }
        },
        e);
    sources.push_back(std::move(s));
  }
  return json{{"sources", std::move(sources)}};
}

SourceDesc source_desc_from_json(const json& s) {
  require(s.contains("type"), errc::io_error, "source entry missing type");
  const std::string type = s.at("type");
  if (type == "exponential") return Exponential{s.value("rate", 1.0)};
  if (type == "student_t") return StudentT{s.value("dof", 5.0)};
  if (type == "gaussian") return Gaussian{s.value("variance", 1.0)};
  if (type == "moments")
    return Moments{s.value("variance", 1.0), s.value("fourth_cumulant", 6.0)};
  fail(errc::io_error, "unknown source type: " + type);
}

SourceSpec source_spec_from_json(const json& j) {
  require(j.contains("sources") && j.at("sources").is_array(), errc::io_error,
          "source spec needs a sources array");
  SourceSpec spec;
  for (const auto& s : j.at("sources")) spec.entries.push_back(source_desc_from_json(s));
  spec.validate(false);
  return spec;
}

SourceSpec read_source_spec(const std::string& path) {
  return source_spec_from_json(json::parse(read_file(path)));
}

json cumulants_to_json(const CumulantPair& cp) {
  const int I = cp.dim();
  json k2_idx = json::array(), k2_val = json::array();
  for_each_pair(I, [&](int i, int j, int idx) {
    k2_idx.push_back(json::array({i + 1, j + 1}));
    k2_val.push_back(cp.k2.data()[idx]);
  });
  json k4_idx = json::array(), k4_val = json::array();
  for_each_quad(I, [&](int i, int j, int k, int l, long long idx) {
    k4_idx.push_back(json::array({i + 1, j + 1, k + 1, l + 1}));
    k4_val.push_back(cp.k4.data()[idx]);
  });
  json j;
  j["dim"] = I;
  if (cp.provenance == Provenance::population)
    j["provenance"] = "population";
  else
    j["provenance"] = json{{"sample", cp.sample_count}};
  j["k2"] = json{{"indices", std::move(k2_idx)}, {"values", std::move(k2_val)}};
  j["k4"] = json{{"indices", std::move(k4_idx)}, {"values", std::move(k4_val)}};
  return j;
}

CumulantPair cumulants_from_json(const json& j) {
  require(j.contains("dim"), errc::io_error, "cumulants json needs dim");
  const int I = j.at("dim");
  require(I >= 1, errc::io_error, "dim must be positive");
  CumulantPair cp{SymMat(I), SymTen4(I), Provenance::population, 0};
  if (j.contains("provenance") && j.at("provenance").is_object()) {
    cp.provenance = Provenance::sample;
    cp.sample_count = j.at("provenance").value("sample", 0L);
  }
  {
    const auto& k2 = j.at("k2");
    const auto& idx = k2.at("indices");
    const auto& val = k2.at("values");
    require(idx.size() == val.size(), errc::io_error, "k2 index/value length mismatch");
    for (size_t t = 0; t < idx.size(); ++t) {
      int a = idx[t][0], b = idx[t][1];
      require(a >= 1 && b >= 1 && a <= I && b <= I, errc::io_error, "k2 index out of range");
      cp.k2.at(a - 1, b - 1) = val[t];
    }
  }
  {
    const auto& k4 = j.at("k4");
    const auto& idx = k4.at("indices");
    const auto& val = k4.at("values");
    require(idx.size() == val.size(), errc::io_error, "k4 index/value length mismatch");
    for (size_t t = 0; t < idx.size(); ++t) {
      int a = idx[t][0], b = idx[t][1], c = idx[t][2], d = idx[t][3];
      require(a >= 1 && b >= 1 && c >= 1 && d >= 1 && a <= I && b <= I && c <= I && d <= I,
              errc::io_error, "k4 index out of range");
      cp.k4.at(a - 1, b - 1, c - 1, d - 1) = val[t];
    }
  }
  return cp;
}

CumulantPair read_cumulants(const std::string& path) {
  return cumulants_from_json(json::parse(read_file(path)));
}

namespace {

// Quadratic coefficients use keys "i_j" (1-based, i <= j); linear terms of
// dehomogenized systems use "i_0".
json form_to_json(const Eigen::VectorXd& packed, int nvars, bool homogeneous, double* constant) {
  json f = json::object();
  const int nc = nvars + (homogeneous ? 0 : 1);
  *constant = 0.0;
  for_each_pair(nc, [&](int i, int j, int idx) {
    const double v = packed[idx];
    if (v == 0.0) return;
    if (homogeneous || j < nvars) {
      f[std::to_string(i + 1) + "_" + std::to_string(j + 1)] = v;
    } else if (i < nvars) {
      f[std::to_string(i + 1) + "_0"] = v;  // linear term
    } else {
      *constant = v;
    }
  });
  return f;
}

}  // namespace

json quadric_system_to_json(const QuadricSystem& sys) {
  json forms = json::array();
  json constants = json::array();
  for (const auto& fvec : sys.forms) {
    double c = 0.0;
    forms.push_back(form_to_json(fvec, sys.nvars, sys.homogeneous, &c));
    constants.push_back(c);
  }
  json j;
  j["dim"] = sys.nvars;
  j["homogeneous"] = sys.homogeneous;
  j["forms"] = std::move(forms);
  if (!sys.homogeneous) j["constants"] = std::move(constants);
  return j;
}

json tracked_system_to_json(const TrackedSystem& ts) {
  json j = quadric_system_to_json(ts.system);
  j["real_count"] = ts.real_count;
  json sols = json::array();
  for (const auto& s : ts.solutions) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < s.size(); ++i) {
      re.push_back(s[i].real());
      im.push_back(s[i].imag());
    }
    sols.push_back(json{{"re", std::move(re)}, {"im", std::move(im)}});
  }
  j["solutions"] = std::move(sols);
  return j;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["verdict"] = verdict_name(v.kind);
  switch (v.kind) {
    case VerdictKind::WitnessFound: {
      json b = json::array(), c = json::array();
      for (int i = 0; i < v.witness.size(); ++i) b.push_back(v.witness[i]);
      for (int i = 0; i < v.coefficients.size(); ++i) c.push_back(v.coefficients[i]);
      j["witness"] = json{{"b", std::move(b)},
                          {"coefficients", std::move(c)},
                          {"residual", v.residual},
                          {"coefficient_residual", v.coeff_residual}};
      j["starts"] = v.starts;
      break;
    }
    case VerdictKind::NoWitnessFound:
      j["best_residual"] = std::isfinite(v.best_residual) ? json(v.best_residual) : json();
      j["starts"] = v.starts;
      break;
    case VerdictKind::CollinearColumns:
      j["pair"] = json::array({v.collinear_pair.first + 1, v.collinear_pair.second + 1});
      break;
    default:
      break;
  }
  return j;
}

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "I,J,trial,n,error,objective,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.I) + ',' + std::to_string(r.J) + ',' + std::to_string(r.trial) + ',';
    out += r.n < 0 ? "population" : std::to_string(r.n);
    out += ',' + fmt17(r.error) + ',' + fmt17(r.objective) + ',' + std::to_string(r.seed_used);
    out += '\n';
  }
  return out;
}

void write_manifest(const std::string& out_path, const std::string& command, const json& config,
                    std::uint64_t seed, double wall_seconds) {
  json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["library_version"] = kVersion;
  j["wall_seconds"] = wall_seconds;
  atomic_write(out_path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace oica::io
