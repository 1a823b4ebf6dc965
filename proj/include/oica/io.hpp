#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "oica/cumulants.hpp"
#include "oica/experiments.hpp"
#include "oica/identifiability.hpp"
#include "oica/quadrics.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace oica::io {

using json = nlohmann::ordered_json;

// shortest round-trip formatting (17 significant digits); NaN prints "nan"
std::string fmt17(double v);

// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Plain numeric matrix, one row per line, 17 significant digits.
std::string matrix_to_csv(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_csv_text(const std::string& text);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Sample data with header x1..xI.
std::string samples_to_csv(const Eigen::MatrixXd& X);
Eigen::MatrixXd read_samples_csv(const std::string& path);

json source_spec_to_json(const SourceSpec& spec);
SourceSpec source_spec_from_json(const json& j);
SourceSpec read_source_spec(const std::string& path);

json cumulants_to_json(const CumulantPair& cp);
CumulantPair cumulants_from_json(const json& j);
CumulantPair read_cumulants(const std::string& path);

json quadric_system_to_json(const QuadricSystem& sys);
json tracked_system_to_json(const TrackedSystem& ts);

json verdict_to_json(const Verdict& v);

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows);

// Every output file is paired with <path>.manifest.json describing how to
// reproduce it.
void write_manifest(const std::string& out_path, const std::string& command, const json& config,
                    std::uint64_t seed, double wall_seconds);

}  // namespace oica::io
