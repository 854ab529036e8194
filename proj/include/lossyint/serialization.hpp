#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lossyint/loss_channel.hpp"
#include "lossyint/loss_kernel.hpp"
#include "lossyint/metrology.hpp"
#include "lossyint/phase_space.hpp"
#include "lossyint/spin_space.hpp"

namespace lossyint {

std::string library_version();

// 17 significant digits, C locale, "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double value);

// Ordered key/value pairs written as "# key: value" lines ahead of CSV data
// and as a "metadata" object in JSON documents.
class Metadata {
 public:
  Metadata();  // starts with the library version

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

using CsvCell = std::variant<double, long long, std::string>;

void write_csv(std::ostream& out, const Metadata& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<CsvCell>>& rows);

nlohmann::ordered_json to_json(const SpinKet& ket);
nlohmann::ordered_json to_json(const SpinDensity& rho);
nlohmann::ordered_json to_json(const LossEnsemble& ensemble);
nlohmann::ordered_json to_json(const WignerField& field);
nlohmann::ordered_json to_json(const PrecisionRecord& record);
nlohmann::ordered_json to_json(const KernelProfile& profile);

// Throw std::invalid_argument on malformed documents and the state
// constructors' exceptions on invalid states.
SpinKet ket_from_json(const nlohmann::json& doc);
SpinDensity density_from_json(const nlohmann::json& doc);

// theta, phi, weight, value; one row per grid node.
void write_wigner_csv(std::ostream& out, const WignerField& field, Metadata meta);
// N, eta, fisher, delta_phi, asymptotic, wigner_bound, converged.
void write_precision_csv(std::ostream& out, std::span<const PrecisionRecord> records, const Metadata& meta);
// theta, value, kind, N, L, rescale_factor.
void write_kernel_csv(std::ostream& out, std::span<const KernelProfile> profiles, const Metadata& meta);

}  // namespace lossyint
