#include "tubelab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tubelab/concentration.hpp"
#include "tubelab/errors.hpp"
#include "tubelab/format.hpp"
#include "tubelab/mmdist.hpp"
#include "tubelab/sphere_lab.hpp"
#include "tubelab/tube.hpp"

namespace tubelab::cli {

namespace {

using nlohmann::json;

struct CommandInfo {
  Command command;
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> keys;
};

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> table = {
      {Command::tube,
       "tube",
       "Tube volume around a submanifold",
       {{"ambient", "flat | sphere | symmetric (default flat)"},
        {"R", "sphere radius (default 1)"},
        {"n", "submanifold dimension"},
        {"q", "codimension (default 1)"},
        {"eps", "tube radius"},
        {"vol-m", "volume of the submanifold (default 1)"},
        {"kappas", "comma list kappa_2,kappa_4,... (default all zero)"},
        {"spectrum", "comma list d_1,...,d_n for the symmetric ambient"},
        {"t-max", "window end for the symmetric ambient (default pi/(2 max d))"}}},
      {Command::scan,
       "scan",
       "Concentration scan along an eps schedule",
       {{"family", "equator"},
        {"R", "sphere radius (default 1)"},
        {"schedule", "c*n^-k, n^-k or const:eps"},
        {"n", "start:stop:step or comma list"},
        {"tol", "complement tolerance for a locus (default 1e-3)"}}},
      {Command::sample,
       "sample",
       "Monte Carlo sample on S^n",
       {{"n", "sphere dimension"},
        {"N", "number of points"},
        {"eps", "tube radius for the empirical complement"}}},
      {Command::mmdist,
       "mmdist",
       "W1 and box distance on finite mm-spaces",
       {{"space", "FiniteMMSpace JSON file"},
        {"nu", "comma list of target weights on the same ground set"},
        {"box", "second FiniteMMSpace JSON file for box_exact"}}},
      {Command::audit,
       "audit",
       "W1 / box distance implication audit",
       {{"family", "equator | dirac | constant"},
        {"n", "sphere dimensions for the equator family (default 100,1000,10000,100000)"},
        {"schedule", "eps schedule for the equator family (default n^-0.4)"},
        {"N", "points per equator instance (default 8)"},
        {"m", "ground set size for dirac / constant (default 6)"},
        {"threshold", "vanishing threshold (default 0.05)"}}},
  };
  return table;
}

const CommandInfo& info(Command c) {
  for (const auto& entry : commands()) {
    if (entry.command == c) return entry;
  }
  throw DomainError("unknown command");
}

class Params {
 public:
  Params(const RunConfig& config) : params_(config.params) {
    const auto& entry = info(config.command);
    std::set<std::string> allowed;
    for (const auto& [key, help] : entry.keys) allowed.insert(key);
    for (const auto& [key, value] : params_) {
      if (!allowed.count(key)) {
        throw DomainError(std::string(entry.name) + ": unknown parameter '" + key + "'");
      }
    }
  }

  bool has(const std::string& key) const { return params_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) throw DomainError("missing required parameter --" + key);
    return it->second;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      required(key);
    }
    return parse_real(params_.at(key), key);
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      required(key);
    }
    const std::string& s = params_.at(key);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw DomainError("--" + key + ": expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(required(key));
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_real(cell, key));
    if (out.empty()) throw DomainError("--" + key + ": empty list");
    return out;
  }

 private:
  static double parse_real(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) {
      throw DomainError("--" + key + ": expected a number, got '" + s + "'");
    }
    return v;
  }

  const std::map<std::string, std::string>& params_;
};

std::string quantity_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream out;
  out << "quantity,value\n";
  for (const auto& [name, value] : rows) out << name << ',' << format_double(value) << '\n';
  return out.str();
}

int positive_int(long v, const char* what) {
  if (v < 1 || v > (1L << 30)) throw DomainError(std::string(what) + " must be a positive integer");
  return static_cast<int>(v);
}

std::string render_tube(const RunConfig& config) {
  const Params p(config);
  tube::TubeSpec spec;
  const std::string ambient = p.text("ambient", "flat");
  spec.n = positive_int(p.integer("n"), "--n");
  spec.q = positive_int(p.integer("q", 1), "--q");
  spec.eps = p.real("eps");
  spec.vol_m = p.real("vol-m", 1.0);
  spec.kappas = p.has("kappas") ? p.list("kappas") : std::vector<double>(spec.n / 2, 0.0);

  json doc;
  doc["ambient"] = ambient;
  doc["n"] = spec.n;
  doc["q"] = spec.q;
  doc["eps"] = spec.eps;
  doc["vol_m"] = spec.vol_m;
  doc["kappas"] = spec.kappas;
  std::vector<std::pair<std::string, double>> rows;

  if (ambient == "flat") {
    if (p.has("R") || p.has("spectrum") || p.has("t-max")) {
      throw DomainError("tube: --R, --spectrum and --t-max do not apply to a flat ambient");
    }
    const double v = tube::weyl_flat_volume(spec);
    doc["weyl_flat_volume"] = v;
    rows = {{"weyl_flat_volume", v}};
  } else if (ambient == "sphere") {
    if (p.has("spectrum") || p.has("t-max")) {
      throw DomainError("tube: --spectrum and --t-max do not apply to a sphere ambient");
    }
    const double radius = p.real("R", 1.0);
    spec.ambient = tube::SphereAmbient{radius};
    const double v = tube::weyl_sphere_volume(spec);
    tube::TubeSpec flat = spec;
    flat.ambient = tube::FlatAmbient{};
    const double f = tube::weyl_flat_volume(flat);
    const double rel = tube::flat_vs_sphere_relative_error(spec);
    doc["R"] = radius;
    doc["weyl_sphere_volume"] = v;
    doc["weyl_flat_volume"] = f;
    doc["relative_error"] = rel;
    rows = {{"weyl_sphere_volume", v}, {"weyl_flat_volume", f}, {"relative_error", rel}};
  } else if (ambient == "symmetric") {
    if (p.has("R")) throw DomainError("tube: --R does not apply to a symmetric ambient");
    tube::SpectralData spectrum(p.list("spectrum"));
    const double t_max = p.has("t-max")
                             ? p.real("t-max")
                             : (spectrum.max() > 0.0 ? std::numbers::pi / (2.0 * spectrum.max())
                                                     : std::numbers::pi / 2.0);
    spec.ambient = tube::SymmetricCodim1Ambient{spectrum, t_max};
    const double v = tube::totally_geodesic_tube_volume(spec);
    doc["spectrum"] = spectrum.values();
    doc["t_max"] = t_max;
    doc["totally_geodesic_tube_volume"] = v;
    rows = {{"totally_geodesic_tube_volume", v}};
  } else {
    throw DomainError("tube: --ambient must be flat, sphere or symmetric");
  }
  return config.format == Format::json ? doc.dump(2) + "\n" : quantity_csv(rows);
}

std::string render_scan(const RunConfig& config) {
  const Params p(config);
  const std::string family = p.text("family", "equator");
  if (family != "equator") throw DomainError("scan: --family must be equator");
  const auto fam = concentration::equator_family(p.real("R", 1.0));
  const auto schedule = concentration::parse_schedule(p.required("schedule"));
  const auto n_range = concentration::parse_n_range(p.required("n"));
  concentration::ScanOptions options;
  options.tol = p.real("tol", options.tol);
  options.threads = config.threads;
  const auto result = concentration::scan_concentration(fam, schedule, n_range, options);
  if (config.format == Format::json) return concentration::to_json(result).dump(2) + "\n";
  std::ostringstream out;
  concentration::write_csv(out, result);
  return out.str();
}

std::string render_sample(const RunConfig& config) {
  const Params p(config);
  const int n = positive_int(p.integer("n"), "--n");
  const long count = p.integer("N");
  if (count < 1) throw DomainError("--N must be a positive integer");
  sphere_lab::SampleOptions options;
  options.threads = config.threads;
  const auto cloud = sphere_lab::sample_sphere(n, static_cast<std::size_t>(count), config.seed, options);
  if (config.format == Format::csv) {
    if (p.has("eps")) throw DomainError("sample: --eps only applies to JSON output");
    std::ostringstream out;
    sphere_lab::write_cloud_csv(out, cloud);
    return out.str();
  }
  json doc;
  doc["n"] = n;
  doc["N"] = count;
  doc["seed"] = config.seed;
  const auto w1 = mmdist::projection_transport_cost(cloud, 1);
  const auto w2 = mmdist::projection_transport_cost(cloud, 2);
  doc["projection_cost"] = {{"order1", w1.cost}, {"order2", w2.cost}, {"excluded_mass", w1.excluded_mass}};
  if (p.has("eps")) {
    const double eps = p.real("eps");
    const auto est = sphere_lab::empirical_complement(cloud, eps);
    doc["eps"] = eps;
    doc["complement"] = est.p_hat;
    doc["std_err"] = est.std_err;
    doc["analytic_complement"] = concentration::equator_complement_measure(n, eps);
  } else {
    doc["eps"] = nullptr;
    doc["complement"] = nullptr;
    doc["std_err"] = nullptr;
    doc["analytic_complement"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

mmdist::FiniteMMSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("'" + path + "': " + e.what());
  }
  return mmdist::FiniteMMSpace::from_json(doc);
}

std::string render_mmdist(const RunConfig& config) {
  const Params p(config);
  const auto space = load_space(p.required("space"));
  if (!p.has("nu") && !p.has("box")) throw DomainError("mmdist: supply --nu, --box or both");
  json doc;
  doc["m"] = space.size();
  std::vector<std::pair<std::string, double>> rows;
  if (p.has("nu")) {
    const auto nu = p.list("nu");
    const auto result = mmdist::w1_exact(space, nu);
    doc["w1"] = mmdist::to_json(result);
    rows.emplace_back("w1", result.plan.cost);
    rows.emplace_back("dual_value", result.dual_value);
    rows.emplace_back("gap", result.gap);
  } else {
    doc["w1"] = nullptr;
  }
  if (p.has("box")) {
    const auto other = load_space(p.required("box"));
    const double b = mmdist::box_exact(space, other);
    doc["box_exact"] = b;
    rows.emplace_back("box_exact", b);
  } else {
    doc["box_exact"] = nullptr;
  }
  return config.format == Format::json ? doc.dump(2) + "\n" : quantity_csv(rows);
}

std::vector<double> circle_distances(int m) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / m;
    pts.push_back({std::cos(theta), std::sin(theta)});
  }
  const auto mz = static_cast<std::size_t>(m);
  std::vector<double> d(mz * mz, 0.0);
  for (std::size_t i = 0; i < mz; ++i)
    for (std::size_t j = i + 1; j < mz; ++j) {
      d[i * mz + j] = sphere_lab::geodesic_distance(pts[i], pts[j]);
      d[j * mz + i] = d[i * mz + j];
    }
  return d;
}

std::string render_audit(const RunConfig& config) {
  const Params p(config);
  const std::string family = p.text("family", "equator");
  const double threshold = p.real("threshold", 0.05);
  std::vector<mmdist::AuditInstance> instances;
  if (family == "equator") {
    if (p.has("m")) throw DomainError("audit: --m does not apply to the equator family");
    const auto n_range = concentration::parse_n_range(p.text("n", "100,1000,10000,100000"));
    const auto schedule = concentration::parse_schedule(p.text("schedule", "n^-0.4"));
    const long count = p.integer("N", 8);
    if (count < 1 || count > 64) throw DomainError("audit: --N must lie in [1, 64]");
    sphere_lab::SampleOptions options;
    options.threads = config.threads;
    for (int n : n_range) {
      const auto cloud = sphere_lab::sample_sphere(n, static_cast<std::size_t>(count), config.seed, options);
      const auto ground = mmdist::equator_projection_space(cloud);
      instances.push_back(mmdist::make_projection_instance("n=" + std::to_string(n), ground.space,
                                                           ground.proj, schedule.values(n), count <= 8));
    }
  } else if (family == "dirac" || family == "constant") {
    if (p.has("n") || p.has("schedule") || p.has("N")) {
      throw DomainError("audit: --n, --schedule and --N only apply to the equator family");
    }
    const long m = p.integer("m", 6);
    if (m < 2 || m > 64) throw DomainError("audit: --m must lie in [2, 64]");
    const auto mz = static_cast<std::size_t>(m);
    const auto d = circle_distances(static_cast<int>(m));
    if (family == "dirac") {
      for (std::size_t i = 0; i + 1 < mz; ++i) {
        std::vector<double> mu(mz, 0.0), nu(mz, 0.0);
        mu[i] = 1.0;
        nu[i + 1] = 1.0;
        instances.push_back({"dirac_" + std::to_string(i), mmdist::FiniteMMSpace(mz, d, mu), nu,
                             std::nullopt, std::nullopt, true});
      }
    } else {
      const mmdist::FiniteMMSpace space(mz, d, std::vector<double>(mz, 1.0 / static_cast<double>(m)));
      std::vector<int> identity(mz);
      for (std::size_t i = 0; i < mz; ++i) identity[i] = static_cast<int>(i);
      for (int i = 0; i < 4; ++i) {
        instances.push_back(mmdist::make_projection_instance("constant_" + std::to_string(i), space,
                                                             identity, 0.0, m <= 8));
      }
    }
  } else {
    throw DomainError("audit: --family must be equator, dirac or constant");
  }
  const auto report = mmdist::implication_audit(instances, threshold, config.threads);
  if (config.format == Format::json) return mmdist::to_json(report).dump(2) + "\n";
  std::ostringstream out;
  mmdist::write_audit_csv(out, report);
  return out.str();
}

void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw DomainError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DomainError("cannot move output into '" + path + "': " + ec.message());
  }
}

unsigned thread_cap(std::ostream& err, bool& ok) {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  ok = true;
  if (const char* env = std::getenv("TUBELAB_THREADS")) {
    const std::string s(env);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || v < 1) {
      err << "error: TUBELAB_THREADS must be a positive integer\n";
      ok = false;
      return 1;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::min(v, 1024L)));
  }
  return threads;
}

}  // namespace

std::string render(const RunConfig& config) {
  switch (config.command) {
    case Command::tube:
      return render_tube(config);
    case Command::scan:
      return render_scan(config);
    case Command::sample:
      return render_sample(config);
    case Command::mmdist:
      return render_mmdist(config);
    case Command::audit:
      return render_audit(config);
  }
  throw DomainError("unknown command");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string doc = render(config);
    if (config.output_path.empty()) {
      out << doc;
      out.flush();
    } else {
      write_atomically(config.output_path, doc);
    }
    return kOk;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tube volumes, concentration scans and mm-space distances", "tubelab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string seed_text = "0";
  std::string out_path;
  std::string format = "json";
  app.add_option("--seed", seed_text, "RNG seed (default 0)");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::map<std::string, std::map<std::string, std::string>> storage;
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& entry : commands()) {
    auto* sub = app.add_subcommand(entry.name, entry.help);
    for (const auto& [key, help] : entry.keys) {
      sub->add_option(std::string("--") + key, storage[entry.name][key], help);
    }
    subs.emplace_back(sub, entry.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  RunConfig config;
  for (const auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    config.command = command;
    for (const auto& [key, help] : info(command).keys) {
      if (sub->count(std::string("--") + key) > 0) config.params[key] = storage[sub->get_name()][key];
    }
  }
  {
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(seed_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (seed_text.empty() || seed_text.front() == '-' || used != seed_text.size()) {
      err << "error: --seed must be a non-negative 64-bit integer\n";
      return kValidationError;
    }
    config.seed = seed;
  }
  config.output_path = out_path;
  config.format = format == "csv" ? Format::csv : Format::json;
  bool ok = true;
  config.threads = thread_cap(err, ok);
  if (!ok) return kValidationError;
  return run(config, out, err);
}

}  // namespace tubelab::cli
