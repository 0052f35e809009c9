#include "eddi/model_io.hpp"

#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "eddi/basis.hpp"
#include "eddi/errors.hpp"

namespace eddi {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json damping_terms_json(const DampingModel& dm) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < dm.library().size(); ++i) {
    const BasisTerm& term = dm.library()[i];
    arr.push_back({{"q_exp", term.q_exp}, {"qd_exp", term.qd_exp}, {"coeff", dm.coeffs()[i]}});
  }
  return arr;
}

ordered_json stiffness_terms_json(const StiffnessModel& sm) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < sm.library().size(); ++i) {
    arr.push_back({{"q_exp", sm.library()[i].q_exp}, {"coeff", sm.coeffs()[i]}});
  }
  return arr;
}

const ordered_json& need(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw Error(errc::parse_error, std::string("model: missing field '") + key + "'");
  }
  return *it;
}

double need_finite(const ordered_json& j, const char* key) {
  const ordered_json& v = need(j, key);
  if (!v.is_number()) {
    throw Error(errc::parse_error, std::string("model: field '") + key + "' must be a number");
  }
  return v.get<double>();
}

unsigned need_exp(const ordered_json& j, const char* key) {
  const ordered_json& v = need(j, key);
  if (!v.is_number_unsigned()) {
    throw Error(errc::parse_error,
                std::string("model: field '") + key + "' must be a nonnegative integer");
  }
  return v.get<unsigned>();
}

}  // namespace

std::string render_model(const ModelRecord& rec) {
  ordered_json j;
  j["schema_version"] = rec.schema_version;
  j["inertia"] = rec.system.inertia;
  j["damping"] = damping_terms_json(rec.system.damping);
  j["stiffness"] = stiffness_terms_json(rec.system.stiffness);
  ordered_json prov;
  prov["method"] = rec.provenance.method;
  prov["input_digest"] = rec.provenance.input_digest;
  try {
    prov["config"] = rec.provenance.config_json.empty()
                         ? ordered_json::object()
                         : ordered_json::parse(rec.provenance.config_json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::invalid_argument, std::string("model: config_json is not valid JSON: ") +
                                            e.what());
  }
  ordered_json residuals = ordered_json::object();
  for (const auto& [name, value] : rec.provenance.residuals) residuals[name] = value;
  prov["residual_rms"] = residuals;
  if (rec.provenance.timestamp) {
    prov["timestamp"] = *rec.provenance.timestamp;
  }
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

namespace {

ModelRecord parse_model_fields(const ordered_json& j) {
  const ordered_json& version = need(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw Error(errc::parse_error, "model: unsupported schema_version " + version.dump());
  }
  const double inertia = need_finite(j, "inertia");

  std::vector<BasisTerm> dterms;
  std::vector<double> dcoeffs;
  for (const ordered_json& t : need(j, "damping")) {
    dterms.push_back({need_exp(t, "q_exp"), need_exp(t, "qd_exp")});
    dcoeffs.push_back(need_finite(t, "coeff"));
  }
  std::vector<BasisTerm> sterms;
  std::vector<double> scoeffs;
  for (const ordered_json& t : need(j, "stiffness")) {
    sterms.push_back({need_exp(t, "q_exp"), 0});
    scoeffs.push_back(need_finite(t, "coeff"));
  }

  const ordered_json& prov = need(j, "provenance");
  ModelProvenance p;
  p.method = need(prov, "method").get<std::string>();
  // "truth" marks generator ground truth; the other two are identifications.
  if (p.method != "eddi" && p.method != "sindy" && p.method != "truth") {
    throw Error(errc::parse_error, "model: unknown method '" + p.method + "'");
  }
  p.input_digest = need(prov, "input_digest").get<std::string>();
  p.config_json = need(prov, "config").dump(2);
  for (const auto& [name, value] : need(prov, "residual_rms").items()) {
    if (!value.is_number()) {
      throw Error(errc::parse_error, "model: residual_rms entries must be numbers");
    }
    p.residuals.emplace_back(name, value.get<double>());
  }
  if (prov.contains("timestamp")) {
    p.timestamp = prov["timestamp"].get<std::string>();
  }

  try {
    return ModelRecord{1,
                       IdentifiedSystem(inertia, DampingModel(BasisLibrary(std::move(dterms)),
                                                              std::move(dcoeffs)),
                                        StiffnessModel(BasisLibrary(std::move(sterms)),
                                                       std::move(scoeffs))),
                       std::move(p)};
  } catch (const Error& e) {
    throw Error(errc::parse_error, std::string("model: ") + e.what());
  }
}

}  // namespace

ModelRecord parse_model(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::parse_error, std::string("model: invalid JSON: ") + e.what());
  }
  try {
    return parse_model_fields(j);
  } catch (const nlohmann::json::exception& e) {
    // Wrong-typed fields (e.g. a numeric method) surface as json type errors.
    throw Error(errc::parse_error, std::string("model: malformed document: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const ModelRecord& rec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  }
  out << render_model(rec);
  if (!out) {
    throw Error(errc::io_error, "failed writing " + path.string());
  }
}

ModelRecord read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_error, "cannot open " + path.string() + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model(buf.str());
  } catch (const Error& e) {
    if (e.code() == errc::parse_error) {
      throw Error(errc::parse_error, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::string fnv1a64_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) {
    out.push_back(kHex[(h >> shift) & 0xF]);
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_error, "cannot open " + path.string() + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64_digest(buf.str());
}

}  // namespace eddi
