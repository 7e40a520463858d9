#include "ngauss/state_io.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "ngauss/errors.hpp"
#include "ngauss/fock_diagonal.hpp"
#include "ngauss/gaussian_states.hpp"

namespace ngauss {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

double number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) throw ParseError(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.is_object() && obj.contains(key) ? number(obj, key) : fallback;
}

int integer(const json& v, const char* what) {
  if (!v.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return v.get<int>();
}

std::vector<int> cutoff_list(const json& doc) {
  const json& c = field(doc, "cutoffs");
  if (!c.is_array() || c.empty()) throw ParseError("\"cutoffs\" must be a nonempty array");
  std::vector<int> out;
  for (const auto& v : c) out.push_back(integer(v, "cutoff"));
  return out;
}

int cutoff_of(const json& params, const ParseOptions& opts) {
  if (opts.cutoff_override) return *opts.cutoff_override;
  if (params.is_object() && params.contains("cutoff")) return integer(params.at("cutoff"), "cutoff");
  return kDefaultCutoff;
}

Complex complex_value(const json& v, const char* what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ParseError(std::string(what) + " must be a number or a [re, im] pair");
}

Complex alpha_of(const json& params) {
  if (params.is_object() && params.contains("alpha")) return complex_value(params.at("alpha"), "alpha");
  if (params.is_object() && params.contains("alpha2")) {
    const double a2 = number(params, "alpha2");
    if (a2 < 0.0) throw DomainError("alpha2 must be nonnegative");
    return {std::sqrt(a2), 0.0};
  }
  return {0.0, 0.0};
}

}  // namespace

DensityMatrix named_state(const std::string& name, const json& params, const ParseOptions& opts) {
  const json empty = json::object();
  const json& p = params.is_null() ? empty : params;
  if (!p.is_object()) throw ParseError("\"params\" must be an object");

  if (name == "thermal") return thermal_state(number(p, "nbar"), cutoff_of(p, opts));
  if (name == "fock") {
    const int n = integer(field(p, "n"), "n");
    const int cutoff = cutoff_of(p, opts);
    if (n < 0 || n >= cutoff) throw InvalidArgument("Fock level outside the cutoff");
    return fock_state(n, cutoff);
  }
  if (name == "coherent") return coherent_state(alpha_of(p), cutoff_of(p, opts));
  if (name == "coherent_dephased") return to_density(dephase(coherent_state(alpha_of(p), cutoff_of(p, opts))));
  if (name == "superposition_01") {
    const int cutoff = cutoff_of(p, opts);
    Vector psi = Vector::Zero(cutoff);
    psi(0) = psi(1) = 1.0;
    return DensityMatrix::from_pure(ModeConfig({cutoff}), psi);
  }
  if (name == "gaussian") {
    return single_mode_gaussian(number_or(p, "nbar", 0.0), number_or(p, "r", 0.0), number_or(p, "phi", 0.0),
                                alpha_of(p), cutoff_of(p, opts));
  }
  if (name == "product") {
    const json& factors = field(p, "factors");
    if (!factors.is_array() || factors.empty()) throw ParseError("\"factors\" must be a nonempty array");
    std::vector<DensityMatrix> states;
    for (const auto& f : factors) {
      const json& fname = field(f, "name");
      if (!fname.is_string()) throw ParseError("factor \"name\" must be a string");
      states.push_back(named_state(fname.get<std::string>(), f.contains("params") ? f.at("params") : json(), opts));
    }
    return tensor(states, opts.max_dim);
  }
  throw ParseError("unknown named state \"" + name + "\"");
}

ParsedState parse_state(const json& doc, const ParseOptions& opts) {
  if (!doc.is_object()) throw ParseError("state file must hold a JSON object");
  const json& kind_field = field(doc, "kind");
  if (!kind_field.is_string()) throw ParseError("\"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "dense") {
    ModeConfig config(cutoff_list(doc), opts.max_dim);
    if (doc.contains("modes") && integer(doc.at("modes"), "modes") != config.num_modes()) {
      throw ParseError("\"modes\" disagrees with the cutoff list");
    }
    const json& entries = field(doc, "matrix");
    const auto n = static_cast<Eigen::Index>(config.total_dim());
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(n * n)) {
      throw ParseError("\"matrix\" must hold total_dim^2 [re, im] entries");
    }
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex_value(entries[static_cast<std::size_t>(i * n + j)], "matrix entry");
    }
    return {kind, "", DensityMatrix(std::move(config), std::move(m)), std::nullopt};
  }
  if (kind == "fock_diagonal") {
    ModeConfig config(cutoff_list(doc), opts.max_dim);
    const json& lam = field(doc, "lambda");
    if (!lam.is_array() || lam.size() != config.total_dim()) {
      throw ParseError("\"lambda\" must hold total_dim probabilities");
    }
    std::vector<double> lambda;
    for (const auto& v : lam) {
      if (!v.is_number()) throw ParseError("\"lambda\" entries must be numbers");
      lambda.push_back(v.get<double>());
    }
    const auto n = static_cast<Eigen::Index>(config.total_dim());
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = lambda[static_cast<std::size_t>(i)];
    return {kind, "", DensityMatrix(std::move(config), std::move(m)), std::move(lambda)};
  }
  if (kind == "named") {
    const json& name = field(doc, "name");
    if (!name.is_string()) throw ParseError("\"name\" must be a string");
    const std::string nm = name.get<std::string>();
    return {kind, nm, named_state(nm, doc.contains("params") ? doc.at("params") : json(), opts), std::nullopt};
  }
  throw ParseError("unknown state kind \"" + kind + "\"");
}

ParsedState parse_state_text(const std::string& text, const ParseOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_state(doc, opts);
}

json to_json(const DensityMatrix& rho) {
  json entries = json::array();
  const Matrix& m = rho.data();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return {{"kind", "dense"},
          {"modes", rho.config().num_modes()},
          {"cutoffs", rho.config().cutoffs()},
          {"matrix", std::move(entries)}};
}

std::string sha256_digest(const std::string& bytes) {
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), hash, &len, EVP_sha256(), nullptr);
  std::string hex = "sha256:";
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", hash[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace ngauss
