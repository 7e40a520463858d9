#pragma once

// JSON state files.
//
//   {"kind": "dense", "modes": N, "cutoffs": [...], "matrix": [[re, im], ...]}
//   {"kind": "fock_diagonal", "cutoffs": [...], "lambda": [...]}
//   {"kind": "named", "name": "<constructor>", "params": {...}}
//
// Matrices and distributions are flat and row-major in the Fock basis order
// of ModeConfig (mode 0 most significant). Named constructors: thermal,
// fock, coherent, coherent_dephased, superposition_01, gaussian, product.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ngauss/fock_space.hpp"

namespace ngauss {

/// Structurally malformed state file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  std::optional<int> cutoff_override;  ///< applies to named constructors only
  std::size_t max_dim = kDefaultMaxDim;
};

struct ParsedState {
  std::string kind;
  std::string name;  ///< named constructor, if any
  DensityMatrix state;
  std::optional<std::vector<double>> lambda;  ///< raw distribution for fock_diagonal files
};

ParsedState parse_state(const nlohmann::json& doc, const ParseOptions& opts = {});
ParsedState parse_state_text(const std::string& text, const ParseOptions& opts = {});

/// Builds a named state from its parameter object.
DensityMatrix named_state(const std::string& name, const nlohmann::json& params, const ParseOptions& opts = {});

nlohmann::json to_json(const DensityMatrix& rho);

/// "sha256:<hex>" of the raw bytes.
std::string sha256_digest(const std::string& bytes);

}  // namespace ngauss
