#pragma once

#include <json.hpp>

#include <filesystem>
#include <span>

#include "mnol/entropy_bounds.hpp"
#include "mnol/harness.hpp"
#include "mnol/mno.hpp"
#include "mnol/sampling.hpp"

namespace mnol {

/// Insertion-ordered JSON document; doubles are written with round-trip precision.
using Json = nlohmann::ordered_json;

Json to_json(const NetClassSpec& spec);
NetClassSpec net_class_from_json(const Json& j);
Json to_json(const MnoSpec& spec);
MnoSpec mno_spec_from_json(const Json& j);

/// { "spec", "theta", "l_nets", "b_nets", "tau_nets" }; each net holds
/// per-layer "weights" (row-major nested arrays) and "biases".
Json to_json(const MnoParams<double>& params);
MnoParams<double> mno_params_from_json(const Json& j);

Json to_json(const FunctionSpaceSpec& spec);
FunctionSpaceSpec function_space_from_json(const Json& j);
Json to_json(const OperatorFamily& family);
OperatorFamily family_from_json(const Json& j);
Json to_json(const QuadratureRule& rule);
QuadratureRule quadrature_from_json(const Json& j);
Json to_json(const DataSpec& spec);
DataSpec data_spec_from_json(const Json& j);

/// { "schema": 1, "meta", "alpha_disc", "u_disc", "x_pts", "w_vals" }.
Json to_json(const HierarchicalDataset& data);
HierarchicalDataset dataset_from_json(const Json& j);

Json to_json(const Prescription& p);
Json to_json(const BoundReport& report);
Json to_json(const EvalResult& result);
Json sweep_report_json(std::span<const ReportEntry> entries, const BoundConstants& constants);

/// Reads or writes a JSON file; malformed or unreadable files raise ConfigError.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace mnol
