#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossyint/loss_channel.hpp"
#include "lossyint/loss_kernel.hpp"
#include "lossyint/metrology.hpp"
#include "lossyint/optimizer.hpp"
#include "lossyint/phase_space.hpp"
#include "lossyint/serialization.hpp"
#include "lossyint/spin_space.hpp"

namespace lossyint::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Raised for anything wrong with the configuration; maps to kExitConfig.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::vector<int> n;
  std::vector<double> eta;
  std::vector<int> lost;
  std::uint64_t seed = 1;
  int restarts = 16;
  int max_iters = 20000;
  int grid_theta = 0;
  int grid_phi = 0;
  std::string format = "csv";
  std::string out_dir = ".";
  int jobs = 1;
  bool allow_phases = false;
  std::string state;
  std::string cache_dir;
  int points = 721;
};

// Shortest round-trip form, for file names and cache keys.
std::string short_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + short_number(v[i]);
  return s;
}

Metadata base_metadata(const std::string& command, const Settings& s) {
  Metadata m;
  m.set("command", command);
  if (!s.n.empty()) m.set("n", join(s.n));
  if (!s.eta.empty()) m.set("eta", join(s.eta));
  if (!s.lost.empty()) m.set("lost", join(s.lost));
  m.set("seed", static_cast<long long>(s.seed));
  m.set("restarts", s.restarts);
  m.set("max_iters", s.max_iters);
  m.set("allow_phases", std::string(s.allow_phases ? "true" : "false"));
  if (s.grid_theta) m.set("grid_theta_override", s.grid_theta);
  if (s.grid_phi) m.set("grid_phi_override", s.grid_phi);
  if (!s.state.empty()) m.set("state", s.state);
  return m;
}

void require_positive(int value, const char* name) {
  if (value < 1) throw ConfigError(std::string(name) + " must be at least 1");
}

void check_photons(const Settings& s) {
  if (s.n.empty()) throw ConfigError("--n needs at least one photon number");
  for (int n : s.n)
    if (n < 1) throw ConfigError("photon numbers must be at least 1");
}

void check_transmissions(const Settings& s, bool allow_zero) {
  if (s.eta.empty()) throw ConfigError("--eta needs at least one transmission");
  for (double e : s.eta)
    if (!(e <= 1.0 && (allow_zero ? e >= 0.0 : e > 0.0)))
      throw ConfigError("transmission " + short_number(e) + " out of range");
}

// Grid for fields on n photons; overrides must resolve every photon number
// up to max_photons, checked before any computation.
GridPtr grid_for(const Settings& s, int n_photons, int max_photons) {
  if (!s.grid_theta && !s.grid_phi) return SphereGrid::for_photons(n_photons);
  const int nt = s.grid_theta ? s.grid_theta : 2 * (max_photons + 1);
  const int np = s.grid_phi ? s.grid_phi : 4 * (max_photons + 1);
  try {
    auto g = std::make_shared<const SphereGrid>(nt, np);
    g->require(max_photons);
    return g;
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

fs::path prepare_output(const Settings& s) {
  const fs::path dir(s.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + s.out_dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(const ojson& doc) { return doc.dump(2) + "\n"; }

OptimizerOptions optimizer_options(const Settings& s, int jobs) {
  OptimizerOptions o;
  o.restarts = s.restarts;
  o.max_iters = s.max_iters;
  o.seed = s.seed;
  o.allow_phases = s.allow_phases;
  o.jobs = jobs;
  return o;
}

ojson optimizer_json(const Settings& s) {
  ojson o;
  o["restarts"] = s.restarts;
  o["max_iters"] = s.max_iters;
  o["allow_phases"] = s.allow_phases;
  return o;
}

std::string state_file_name(int n, double eta, std::uint64_t seed) {
  return "state_N" + std::to_string(n) + "_eta" + short_number(eta) + "_seed" + std::to_string(seed) + ".json";
}

ojson state_document(const SpinKet& ket, const PrecisionRecord& record, const Settings& s) {
  ojson doc;
  doc["metadata"] = base_metadata("optimize", s).to_json();
  doc["optimizer_options"] = optimizer_json(s);
  doc["state"] = to_json(ket);
  doc["record"] = to_json(record);
  return doc;
}

struct OptimizedState {
  SpinKet state;
  OptimizerMeta meta;
};

// Looks up (N, eta, seed) in the cache directory; entries made with other
// optimizer options are ignored and overwritten.
std::optional<OptimizedState> load_cached(const Settings& s, int n, double eta) {
  if (s.cache_dir.empty()) return std::nullopt;
  const fs::path path = fs::path(s.cache_dir) / state_file_name(n, eta, s.seed);
  std::ifstream f(path);
  if (!f) return std::nullopt;
  try {
    const nlohmann::json doc = nlohmann::json::parse(f);
    if (doc.at("optimizer_options") != nlohmann::json(optimizer_json(s))) return std::nullopt;
    const auto& opt = doc.at("record").at("optimizer");
    OptimizerMeta meta;
    meta.restarts = opt.at("restarts").get<int>();
    meta.iterations = opt.at("iterations").get<long>();
    meta.evaluations = opt.at("evaluations").get<long>();
    meta.converged = opt.at("converged").get<bool>();
    SpinKet ket = ket_from_json(doc.at("state"));
    if (ket.n_photons() != n) return std::nullopt;
    return OptimizedState{std::move(ket), meta};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void store_cached(const Settings& s, double eta, const SpinKet& ket, const PrecisionRecord& record) {
  if (s.cache_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(s.cache_dir, ec);
  if (ec) throw ConfigError("cannot create cache directory " + s.cache_dir);
  write_file(fs::path(s.cache_dir) / state_file_name(ket.n_photons(), eta, s.seed), dump(state_document(ket, record, s)));
}

OptimizedState optimized_state(const Settings& s, int n, double eta, int jobs) {
  if (auto cached = load_cached(s, n, eta)) return *cached;
  const OptimizationResult r = optimize_input_state(n, eta, optimizer_options(s, jobs));
  store_cached(s, eta, r.state, r.record);
  return {r.state, r.record.optimizer};
}

PrecisionRecord precision_record(const Settings& s, const OptimizedState& opt, double eta) {
  PrecisionRecord rec = make_precision_record(opt.state, eta);
  const int n = opt.state.n_photons();
  if (s.grid_theta || s.grid_phi) {
    std::vector<GridPtr> grids(n + 1, grid_for(s, n, n));
    rec.bound_wigner = wigner_qfi_bound(opt.state, eta, grids);
  }
  rec.optimizer = opt.meta;
  return rec;
}

// Runs tasks with at most jobs in flight; results keep task order.
template <typename T>
std::vector<T> run_ordered(const std::vector<std::function<T()>>& tasks, int jobs) {
  std::vector<std::optional<T>> slots(tasks.size());
  for (size_t first = 0; first < tasks.size(); first += jobs) {
    const size_t last = std::min(tasks.size(), first + static_cast<size_t>(jobs));
    if (jobs == 1) {
      slots[first].emplace(tasks[first]());
      continue;
    }
    std::vector<std::future<T>> pending;
    for (size_t i = first; i < last; ++i) pending.push_back(std::async(std::launch::async, tasks[i]));
    for (size_t i = first; i < last; ++i) slots[i].emplace(pending[i - first].get());
  }
  std::vector<T> out;
  for (auto& v : slots) out.push_back(std::move(*v));
  return out;
}

// ---- precision-sweep -------------------------------------------------------

int cmd_precision_sweep(const Settings& s, std::ostream& out) {
  check_photons(s);
  check_transmissions(s, false);
  const int n_max = *std::max_element(s.n.begin(), s.n.end());
  grid_for(s, n_max, n_max);
  const fs::path dir = prepare_output(s);

  std::vector<std::function<PrecisionRecord()>> tasks;
  for (int n : s.n)
    for (double eta : s.eta)
      tasks.push_back([&s, n, eta] { return precision_record(s, optimized_state(s, n, eta, 1), eta); });
  const std::vector<PrecisionRecord> records = run_ordered(tasks, s.jobs);

  Metadata meta = base_metadata("precision-sweep", s);
  int unconverged = 0;
  for (const auto& r : records) unconverged += !r.optimizer.converged;
  meta.set("unconverged_rows", unconverged);
  fs::path path;
  if (s.format == "json") {
    ojson doc;
    doc["metadata"] = meta.to_json();
    doc["records"] = ojson::array();
    for (const auto& r : records) doc["records"].push_back(to_json(r));
    path = dir / "precision_sweep.json";
    write_file(path, dump(doc));
  } else {
    std::ostringstream csv;
    write_precision_csv(csv, records, meta);
    path = dir / "precision_sweep.csv";
    write_file(path, csv.str());
  }
  out << "wrote " << path.string() << " (" << records.size() << " rows, " << unconverged << " unconverged)\n";
  return kExitOk;
}

// ---- optimize --------------------------------------------------------------

int cmd_optimize(const Settings& s, std::ostream& out) {
  check_photons(s);
  check_transmissions(s, false);
  const fs::path dir = prepare_output(s);
  for (int n : s.n) {
    for (double eta : s.eta) {
      const OptimizedState opt = optimized_state(s, n, eta, s.jobs);
      const PrecisionRecord rec = precision_record(s, opt, eta);
      const fs::path path = dir / state_file_name(n, eta, s.seed);
      write_file(path, dump(state_document(opt.state, rec, s)));
      out << "wrote " << path.string() << " (fisher " << format_number(rec.fisher) << ")\n";
    }
  }
  return kExitOk;
}

// ---- state resolution for wigner and loss-branches -------------------------

struct ResolvedState {
  SpinDensity rho;
  std::string stem;
};

ResolvedState resolve_state(const Settings& s) {
  const auto single_n = [&]() {
    if (s.n.size() != 1) throw ConfigError("--n needs exactly one photon number here");
    if (s.n[0] < 1) throw ConfigError("photon numbers must be at least 1");
    return s.n[0];
  };
  if (s.state == "noon") {
    const int n = single_n();
    return {SpinDensity::from_ket(noon_state(n)), "N" + std::to_string(n) + "_noon"};
  }
  if (s.state == "mixed") {
    const int n = single_n();
    return {SpinDensity::maximally_mixed(n), "N" + std::to_string(n) + "_mixed"};
  }
  if (!s.state.empty()) {
    std::ifstream f(s.state);
    if (!f) throw ConfigError("cannot read state file " + s.state);
    try {
      nlohmann::json doc = nlohmann::json::parse(f);
      if (doc.contains("state")) doc = doc["state"];
      const int n = doc.at("n_photons").get<int>();
      const size_t len = doc.at("real").size();
      const std::string stem = "N" + std::to_string(n) + "_" + fs::path(s.state).stem().string();
      if (len == static_cast<size_t>(n + 1)) return {SpinDensity::from_ket(ket_from_json(doc)), stem};
      return {density_from_json(doc), stem};
    } catch (const std::exception& e) {
      throw ConfigError("invalid state file " + s.state + ": " + e.what());
    }
  }
  const int n = single_n();
  if (s.eta.size() != 1) throw ConfigError("without --state, --n and a single --eta select an optimized state");
  check_transmissions(s, false);
  const OptimizedState opt = optimized_state(s, n, s.eta[0], s.jobs);
  return {SpinDensity::from_ket(opt.state),
          "N" + std::to_string(n) + "_eta" + short_number(s.eta[0]) + "_seed" + std::to_string(s.seed)};
}

struct FieldOutput {
  WignerField field;
  std::vector<double> equator;
};

FieldOutput field_output(const SpinDensity& rho, const GridPtr& grid) {
  return {wigner_function(rho, grid), equator_cut(rho.matrix(), grid->n_phi())};
}

// Strongest nonconstant azimuthal mode of the cut; 0 if there is none.
int dominant_mode(const std::vector<double>& cut) {
  const std::vector<double> a = azimuthal_amplitudes(cut);
  if (a.size() < 2) return 0;
  const auto best = std::max_element(a.begin() + 1, a.end());
  // rounding noise on a flat cut is not a mode
  if (*best <= 1e-12 * std::max(a[0], *best)) return 0;
  return static_cast<int>(best - a.begin());
}

void add_field_metadata(Metadata& meta, const FieldOutput& f) {
  meta.set("n_photons", f.field.n_photons);
  meta.set("grid_theta", f.field.grid->n_theta());
  meta.set("grid_phi", f.field.grid->n_phi());
  meta.set("integral", f.field.integral());
  meta.set("integral_expected", 4.0 * kPi / (f.field.n_photons + 1));
  meta.set("min", f.field.values.minCoeff());
  meta.set("max", f.field.values.maxCoeff());
  meta.set("equator_min", *std::min_element(f.equator.begin(), f.equator.end()));
  meta.set("equator_max", *std::max_element(f.equator.begin(), f.equator.end()));
  meta.set("equator_dominant_mode", dominant_mode(f.equator));
}

ojson equator_json(const FieldOutput& f) {
  ojson e;
  e["theta"] = kPi / 2.0;
  e["phi"] = f.field.grid->phi_nodes();
  e["value"] = f.equator;
  e["min"] = *std::min_element(f.equator.begin(), f.equator.end());
  e["max"] = *std::max_element(f.equator.begin(), f.equator.end());
  e["dominant_mode"] = dominant_mode(f.equator);
  return e;
}

std::string equator_csv(const FieldOutput& f, const Metadata& meta) {
  std::vector<std::vector<CsvCell>> rows;
  for (size_t j = 0; j < f.equator.size(); ++j) rows.push_back({f.field.grid->phi_nodes()[j], f.equator[j]});
  std::ostringstream csv;
  write_csv(csv, meta, {"phi", "value"}, rows);
  return csv.str();
}

// Writes the full-sphere field and its equator cut under the given stem.
std::vector<fs::path> write_field(const fs::path& dir, const std::string& stem, const FieldOutput& f, Metadata meta,
                                  const std::string& format) {
  add_field_metadata(meta, f);
  if (format == "json") {
    ojson doc;
    doc["metadata"] = meta.to_json();
    doc["field"] = to_json(f.field);
    doc["equator"] = equator_json(f);
    const fs::path path = dir / (stem + ".json");
    write_file(path, dump(doc));
    return {path};
  }
  std::ostringstream csv;
  write_wigner_csv(csv, f.field, meta);
  const fs::path field_path = dir / (stem + ".csv");
  const fs::path cut_path = dir / (stem + "_equator.csv");
  write_file(field_path, csv.str());
  write_file(cut_path, equator_csv(f, meta));
  return {field_path, cut_path};
}

// ---- wigner ----------------------------------------------------------------

int cmd_wigner(const Settings& s, std::ostream& out) {
  if (s.n.size() == 1 && s.n[0] >= 1) grid_for(s, s.n[0], s.n[0]);
  const fs::path dir = prepare_output(s);
  const ResolvedState st = resolve_state(s);
  const int n = st.rho.n_photons();
  const GridPtr grid = grid_for(s, n, n);
  const FieldOutput f = field_output(st.rho, grid);
  for (const auto& p : write_field(dir, "wigner_" + st.stem, f, base_metadata("wigner", s), s.format))
    out << "wrote " << p.string() << "\n";
  return kExitOk;
}

// ---- loss-branches ---------------------------------------------------------

int cmd_loss_branches(const Settings& s, std::ostream& out) {
  check_transmissions(s, true);
  if (s.eta.size() != 1) throw ConfigError("loss-branches needs a single --eta");
  const double eta = s.eta[0];
  if (s.state.empty() && !(eta > 0.0)) throw ConfigError("optimizing an input needs eta > 0");
  if (s.n.size() == 1 && s.n[0] >= 1) grid_for(s, s.n[0], s.n[0]);
  const fs::path dir = prepare_output(s);
  const ResolvedState st = resolve_state(s);
  const int n = st.rho.n_photons();
  std::vector<int> lost = s.lost;
  if (lost.empty()) {
    lost.resize(n + 1);
    std::iota(lost.begin(), lost.end(), 0);
  }
  for (int l : lost)
    if (l < 0 || l > n) throw ConfigError("lost photon count " + std::to_string(l) + " outside 0..N");
  grid_for(s, n, n);

  const LossEnsemble ensemble = full_loss_ensemble(st.rho, eta);
  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ensemble.branches[a].probability > ensemble.branches[b].probability;
  });
  std::vector<int> rank(n + 1);
  for (int r = 0; r <= n; ++r) rank[order[r]] = r + 1;
  double total = 0.0;
  for (const auto& b : ensemble.branches) total += b.probability;

  Metadata meta = base_metadata("loss-branches", s);
  meta.set("n_photons", n);
  const std::string stem = st.stem + "_eta" + short_number(eta);
  fs::path table_path;
  if (s.format == "json") {
    ojson doc;
    doc["metadata"] = meta.to_json();
    doc["probabilities"] = ojson::array();
    for (const auto& b : ensemble.branches) {
      ojson row;
      row["L"] = b.lost;
      row["probability"] = b.probability;
      row["rank"] = rank[b.lost];
      doc["probabilities"].push_back(row);
    }
    doc["sum"] = total;
    table_path = dir / ("loss_probabilities_" + stem + ".json");
    write_file(table_path, dump(doc));
  } else {
    std::vector<std::vector<CsvCell>> rows;
    for (const auto& b : ensemble.branches)
      rows.push_back({static_cast<long long>(b.lost), b.probability, static_cast<long long>(rank[b.lost])});
    std::ostringstream csv;
    write_csv(csv, meta, {"L", "probability", "rank"}, rows);
    csv << "# sum: " << format_number(total) << "\n";
    table_path = dir / ("loss_probabilities_" + stem + ".csv");
    write_file(table_path, csv.str());
  }
  out << "wrote " << table_path.string() << "\n";

  for (int l : lost) {
    const LossBranch& b = ensemble.branches[l];
    const GridPtr grid = grid_for(s, n - l, n);
    Metadata bm = base_metadata("loss-branches", s);
    bm.set("lost", l);
    bm.set("probability", b.probability);
    const FieldOutput f = field_output(b.state, grid);
    for (const auto& p : write_field(dir, "branch_" + stem + "_L" + std::to_string(l), f, bm, s.format))
      out << "wrote " << p.string() << "\n";
  }
  return kExitOk;
}

// ---- kernel ----------------------------------------------------------------

int cmd_kernel(const Settings& s, std::ostream& out) {
  check_photons(s);
  if (s.lost.empty()) throw ConfigError("kernel needs --lost");
  if (s.points < 2) throw ConfigError("--points must be at least 2");
  std::vector<std::pair<int, int>> pairs;
  if (s.n.size() == s.lost.size()) {
    for (size_t i = 0; i < s.n.size(); ++i) pairs.emplace_back(s.n[i], s.lost[i]);
  } else if (s.n.size() == 1) {
    for (int l : s.lost) pairs.emplace_back(s.n[0], l);
  } else if (s.lost.size() == 1) {
    for (int n : s.n) pairs.emplace_back(n, s.lost[0]);
  } else {
    throw ConfigError("--n and --lost must have equal lengths or one of them a single value");
  }
  for (auto [n, l] : pairs)
    if (l < 0 || l > n) throw ConfigError("lost photon count outside 0..N");
  const fs::path dir = prepare_output(s);

  std::vector<double> thetas(s.points);
  for (int i = 0; i < s.points; ++i) thetas[i] = kPi * i / (s.points - 1);

  Metadata summary_meta = base_metadata("kernel", s);
  summary_meta.set("points", s.points);
  std::vector<std::vector<CsvCell>> summary_rows;
  ojson summary_json = ojson::array();
  for (auto [n, l] : pairs) {
    const KernelProfile exact = exact_kernel_profile(n, l, thetas);
    const KernelProfile asym = asymptotic_kernel_profile(n, l, thetas);
    const KernelWidths w = compare_kernel_widths(n, l);
    const double integral = exact_kernel_integral(n, l);
    const auto normalized = [](KernelProfile p) {
      const double peak = p.values.front();
      for (double& v : p.values) v /= peak;
      return p;
    };
    const std::vector<KernelProfile> raw{exact, asym};
    const std::vector<KernelProfile> peak{normalized(exact), normalized(asym)};

    Metadata meta = base_metadata("kernel", s);
    meta.set("N", n);
    meta.set("L", l);
    meta.set("points", s.points);
    meta.set("exact_integral", integral);
    meta.set("expected_integral", (n + 1.0) / (n - l + 1.0));
    meta.set("asymptotic_rescale_factor", asym.rescale_factor);
    meta.set("fwhm_exact", w.fwhm_exact);
    meta.set("fwhm_asymptotic", w.fwhm_asymptotic);
    const std::string stem = "kernel_N" + std::to_string(n) + "_L" + std::to_string(l);
    if (s.format == "json") {
      ojson doc;
      doc["metadata"] = meta.to_json();
      doc["profiles"] = ojson::array();
      for (const auto& p : raw) doc["profiles"].push_back(to_json(p));
      doc["peak_normalized"] = ojson::array();
      for (const auto& p : peak) doc["peak_normalized"].push_back(to_json(p));
      write_file(dir / (stem + ".json"), dump(doc));
      out << "wrote " << (dir / (stem + ".json")).string() << "\n";
    } else {
      std::ostringstream a, b;
      write_kernel_csv(a, raw, meta);
      Metadata nmeta = meta;
      nmeta.set("peak_normalized", std::string("true"));
      write_kernel_csv(b, peak, nmeta);
      write_file(dir / (stem + ".csv"), a.str());
      write_file(dir / (stem + "_normalized.csv"), b.str());
      out << "wrote " << (dir / (stem + ".csv")).string() << "\n";
      out << "wrote " << (dir / (stem + "_normalized.csv")).string() << "\n";
    }
    const double rel = w.fwhm_asymptotic / w.fwhm_exact - 1.0;
    summary_rows.push_back({static_cast<long long>(n), static_cast<long long>(l), w.fwhm_exact, w.fwhm_asymptotic,
                            rel, w.sigma_exact, w.sigma_asymptotic, integral, asym.rescale_factor});
    ojson row;
    row["N"] = n;
    row["L"] = l;
    row["fwhm_exact"] = w.fwhm_exact;
    row["fwhm_asymptotic"] = w.fwhm_asymptotic;
    row["fwhm_relative_difference"] = rel;
    row["sigma_exact"] = w.sigma_exact;
    row["sigma_asymptotic"] = w.sigma_asymptotic;
    row["exact_integral"] = integral;
    row["rescale_factor"] = asym.rescale_factor;
    summary_json.push_back(row);
  }
  fs::path path;
  if (s.format == "json") {
    ojson doc;
    doc["metadata"] = summary_meta.to_json();
    doc["summary"] = summary_json;
    path = dir / "kernel_summary.json";
    write_file(path, dump(doc));
  } else {
    std::ostringstream csv;
    write_csv(csv, summary_meta,
              {"N", "L", "fwhm_exact", "fwhm_asymptotic", "fwhm_relative_difference", "sigma_exact",
               "sigma_asymptotic", "exact_integral", "rescale_factor"},
              summary_rows);
    path = dir / "kernel_summary.csv";
    write_file(path, csv.str());
  }
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

void add_output_options(CLI::App* app, Settings& s) {
  app->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", s.out_dir, "Output directory");
  app->add_option("--grid-theta", s.grid_theta, "Polar grid nodes (default 2(N+1))")->check(CLI::NonNegativeNumber);
  app->add_option("--grid-phi", s.grid_phi, "Azimuthal grid nodes (default 4(N+1))")->check(CLI::NonNegativeNumber);
}

void add_optimizer_options(CLI::App* app, Settings& s) {
  app->add_option("--seed", s.seed, "Optimizer seed");
  app->add_option("--restarts", s.restarts, "Optimizer restarts");
  app->add_option("--max-iters", s.max_iters, "Simplex iterations per restart");
  app->add_option("--jobs", s.jobs, "Concurrent workers");
  app->add_flag("--allow-phases", s.allow_phases, "Optimize complex amplitudes");
  app->add_option("--cache-dir", s.cache_dir, "Reuse optimized states stored here");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Lossy two-mode interferometry in spin phase space"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("precision-sweep", "Optimal precision over N and eta");
  sweep->add_option("--n", s.n, "Photon numbers")->delimiter(',')->required();
  sweep->add_option("--eta", s.eta, "Transmissions")->delimiter(',')->required();
  add_optimizer_options(sweep, s);
  add_output_options(sweep, s);

  auto* optimize = app.add_subcommand("optimize", "Optimize input states and write them as JSON");
  optimize->add_option("--n", s.n, "Photon numbers")->delimiter(',')->required();
  optimize->add_option("--eta", s.eta, "Transmissions")->delimiter(',')->required();
  add_optimizer_options(optimize, s);
  add_output_options(optimize, s);

  auto* wigner = app.add_subcommand("wigner", "Wigner function and equator cut of a state");
  wigner->add_option("--state", s.state, "noon, mixed, or a state JSON file; optimized when omitted");
  wigner->add_option("--n", s.n, "Photon number")->delimiter(',');
  wigner->add_option("--eta", s.eta, "Transmission used to optimize the state")->delimiter(',');
  add_optimizer_options(wigner, s);
  add_output_options(wigner, s);

  auto* branches = app.add_subcommand("loss-branches", "Loss probabilities and per-branch Wigner functions");
  branches->add_option("--state", s.state, "noon, mixed, or a state JSON file; optimized when omitted");
  branches->add_option("--n", s.n, "Photon number")->delimiter(',');
  branches->add_option("--eta", s.eta, "Transmission")->delimiter(',')->required();
  branches->add_option("--lost", s.lost, "Loss counts to export (default all)")->delimiter(',');
  add_optimizer_options(branches, s);
  add_output_options(branches, s);

  auto* kernel = app.add_subcommand("kernel", "Exact and asymptotic loss kernels");
  kernel->add_option("--n", s.n, "Photon numbers")->delimiter(',')->required();
  kernel->add_option("--lost", s.lost, "Lost photon counts")->delimiter(',')->required();
  kernel->add_option("--points", s.points, "Polar samples on [0, pi]");
  add_output_options(kernel, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    require_positive(s.restarts, "--restarts");
    require_positive(s.jobs, "--jobs");
    require_positive(s.max_iters, "--max-iters");
    if (sweep->parsed()) return cmd_precision_sweep(s, out);
    if (optimize->parsed()) return cmd_optimize(s, out);
    if (wigner->parsed()) return cmd_wigner(s, out);
    if (branches->parsed()) return cmd_loss_branches(s, out);
    if (kernel->parsed()) return cmd_kernel(s, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace lossyint::cli
