#include "lossyint/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lossyint {

namespace {

using ojson = nlohmann::ordered_json;

// JSON has no NaN; such values are written as null.
ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string csv_cell(const CsvCell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const long long* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::vector<double> read_array(const nlohmann::json& doc, const char* key, size_t expected) {
  if (!doc.contains(key) || !doc[key].is_array()) throw std::invalid_argument(std::string("missing array: ") + key);
  std::vector<double> out;
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw std::invalid_argument(std::string("non-numeric entry in ") + key);
    out.push_back(v.get<double>());
  }
  if (out.size() != expected) throw std::invalid_argument(std::string("wrong length: ") + key);
  return out;
}

int read_photons(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n_photons") || !doc["n_photons"].is_number_integer())
    throw std::invalid_argument("missing integer n_photons");
  const int n = doc["n_photons"].get<int>();
  if (n < 0) throw std::invalid_argument("negative n_photons");
  return n;
}

}  // namespace

std::string library_version() { return LOSSYINT_VERSION; }

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Metadata::Metadata() { set("version", library_version()); }

void Metadata::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Metadata::set(const std::string& key, double value) { set(key, format_number(value)); }
void Metadata::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

nlohmann::ordered_json Metadata::to_json() const {
  ojson out = ojson::object();
  for (const auto& [k, v] : entries_) out[k] = v;
  return out;
}

void write_csv(std::ostream& out, const Metadata& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<CsvCell>>& rows) {
  for (const auto& [k, v] : meta.entries()) out << "# " << k << ": " << v << '\n';
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const SpinKet& ket) {
  ojson doc;
  doc["n_photons"] = ket.n_photons();
  ojson re = ojson::array(), im = ojson::array();
  for (int k = 0; k <= ket.n_photons(); ++k) {
    re.push_back(ket[k].real());
    im.push_back(ket[k].imag());
  }
  doc["real"] = std::move(re);
  doc["imag"] = std::move(im);
  return doc;
}

nlohmann::ordered_json to_json(const SpinDensity& rho) {
  ojson doc;
  doc["n_photons"] = rho.n_photons();
  ojson re = ojson::array(), im = ojson::array();
  const ComplexMatrix& m = rho.matrix();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  doc["real"] = std::move(re);
  doc["imag"] = std::move(im);
  return doc;
}

nlohmann::ordered_json to_json(const LossEnsemble& ensemble) {
  ojson doc;
  doc["n_input"] = ensemble.n_input;
  doc["eta"] = ensemble.eta;
  std::vector<const LossBranch*> sorted;
  for (const auto& b : ensemble.branches) sorted.push_back(&b);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->lost < b->lost; });
  ojson branches = ojson::array();
  for (const LossBranch* b : sorted) {
    ojson entry;
    entry["lost"] = b->lost;
    entry["probability"] = b->probability;
    entry["state"] = to_json(b->state);
    branches.push_back(std::move(entry));
  }
  doc["branches"] = std::move(branches);
  return doc;
}

nlohmann::ordered_json to_json(const WignerField& field) {
  if (!field.grid) throw std::invalid_argument("field without grid");
  const SphereGrid& g = *field.grid;
  ojson doc;
  doc["n_photons"] = field.n_photons;
  ojson grid;
  grid["n_theta"] = g.n_theta();
  grid["n_phi"] = g.n_phi();
  grid["theta"] = g.theta_nodes();
  grid["theta_weights"] = g.theta_weights();
  grid["phi"] = g.phi_nodes();
  grid["phi_weight"] = g.phi_weight();
  doc["grid"] = std::move(grid);
  ojson values = ojson::array();
  for (int i = 0; i < field.values.rows(); ++i)
    for (int j = 0; j < field.values.cols(); ++j) values.push_back(field.values(i, j));
  doc["values"] = std::move(values);
  doc["integral"] = field.integral();
  doc["min"] = field.values.minCoeff();
  doc["max"] = field.values.maxCoeff();
  return doc;
}

nlohmann::ordered_json to_json(const PrecisionRecord& record) {
  ojson doc;
  doc["n_photons"] = record.n_photons;
  doc["eta"] = record.eta;
  doc["fisher"] = number(record.fisher);
  doc["delta_phi"] = number(record.delta_phi);
  doc["bound_asymptotic"] = number(record.bound_asymptotic);
  doc["bound_wigner"] = number(record.bound_wigner);
  ojson opt;
  opt["restarts"] = record.optimizer.restarts;
  opt["iterations"] = record.optimizer.iterations;
  opt["evaluations"] = record.optimizer.evaluations;
  opt["converged"] = record.optimizer.converged;
  doc["optimizer"] = std::move(opt);
  return doc;
}

nlohmann::ordered_json to_json(const KernelProfile& profile) {
  ojson doc;
  doc["n_input"] = profile.n_input;
  doc["n_lost"] = profile.n_lost;
  doc["kind"] = to_string(profile.kind);
  doc["rescale_factor"] = profile.rescale_factor;
  doc["theta"] = profile.thetas;
  ojson values = ojson::array();
  for (double v : profile.values) values.push_back(number(v));
  doc["values"] = std::move(values);
  return doc;
}

SpinKet ket_from_json(const nlohmann::json& doc) {
  const int n = read_photons(doc);
  const auto re = read_array(doc, "real", n + 1);
  const auto im = read_array(doc, "imag", n + 1);
  ComplexVector c(n + 1);
  for (int k = 0; k <= n; ++k) c(k) = Complex(re[k], im[k]);
  return SpinKet(std::move(c));
}

SpinDensity density_from_json(const nlohmann::json& doc) {
  const int n = read_photons(doc);
  const size_t dim = n + 1;
  const auto re = read_array(doc, "real", dim * dim);
  const auto im = read_array(doc, "imag", dim * dim);
  ComplexMatrix m(dim, dim);
  for (size_t r = 0; r < dim; ++r)
    for (size_t c = 0; c < dim; ++c) m(r, c) = Complex(re[r * dim + c], im[r * dim + c]);
  return SpinDensity(std::move(m));
}

void write_wigner_csv(std::ostream& out, const WignerField& field, Metadata meta) {
  if (!field.grid) throw std::invalid_argument("field without grid");
  const SphereGrid& g = *field.grid;
  meta.set("n_photons", field.n_photons);
  meta.set("grid_theta", g.n_theta());
  meta.set("grid_phi", g.n_phi());
  meta.set("integral", field.integral());
  meta.set("min", field.values.minCoeff());
  meta.set("max", field.values.maxCoeff());
  std::vector<std::vector<CsvCell>> rows;
  rows.reserve(static_cast<size_t>(g.n_theta()) * g.n_phi());
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j)
      rows.push_back({g.theta_nodes()[i], g.phi_nodes()[j], g.weight(i), field.values(i, j)});
  write_csv(out, meta, {"theta", "phi", "weight", "value"}, rows);
}

void write_precision_csv(std::ostream& out, std::span<const PrecisionRecord> records, const Metadata& meta) {
  std::vector<std::vector<CsvCell>> rows;
  for (const auto& r : records)
    rows.push_back({static_cast<long long>(r.n_photons), r.eta, r.fisher, r.delta_phi, r.bound_asymptotic,
                    r.bound_wigner, static_cast<long long>(r.optimizer.converged)});
  write_csv(out, meta, {"N", "eta", "fisher", "delta_phi", "asymptotic", "wigner_bound", "converged"}, rows);
}

void write_kernel_csv(std::ostream& out, std::span<const KernelProfile> profiles, const Metadata& meta) {
  std::vector<std::vector<CsvCell>> rows;
  for (const auto& p : profiles)
    for (size_t i = 0; i < p.thetas.size(); ++i)
      rows.push_back({p.thetas[i], p.values[i], to_string(p.kind), static_cast<long long>(p.n_input),
                      static_cast<long long>(p.n_lost), p.rescale_factor});
  write_csv(out, meta, {"theta", "value", "kind", "N", "L", "rescale_factor"}, rows);
}

}  // namespace lossyint
