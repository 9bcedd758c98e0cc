#include "stripesim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace stripesim {

namespace {
constexpr double k_pi = 3.14159265358979323846;
constexpr double k_default_bandwidth_hz = 100e6;
}  // namespace

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kFronthaul: return "C_F";
    case SweepAxis::kStripes: return "M";
    case SweepAxis::kTxPower: return "P_tx";
    case SweepAxis::kAntennas: return "N";
    case SweepAxis::kNone: return "none";
  }
  return "none";
}

void ExperimentSpec::validate() const {
  base.validate();
  if (schemes.empty())
    throw std::invalid_argument("ExperimentSpec: no schemes selected");
  if (sweep_axis != SweepAxis::kNone && sweep_values.empty())
    throw std::invalid_argument("ExperimentSpec: empty sweep_values");
  if (total_aps && *total_aps != base.total_aps())
    throw std::invalid_argument(
        "ExperimentSpec: total_aps inconsistent with M * L");
  for (double v : sweep_values) {
    switch (sweep_axis) {
      case SweepAxis::kFronthaul:
        if (v <= 0.0)
          throw std::invalid_argument("sweep C_F values must be > 0");
        break;
      case SweepAxis::kStripes: {
        const int m = static_cast<int>(v);
        if (m < 1 || v != m)
          throw std::invalid_argument("sweep M values must be integers >= 1");
        const int total = total_aps ? *total_aps : base.total_aps();
        if (total % m != 0)
          throw std::invalid_argument(
              "total AP count is not divisible by swept M");
        break;
      }
      case SweepAxis::kAntennas: {
        const int n = static_cast<int>(v);
        if (n < base.ues || v != n)
          throw std::invalid_argument(
              "sweep N values must be integers >= K");
        break;
      }
      case SweepAxis::kTxPower:
      case SweepAxis::kNone:
        break;
    }
  }
}

SystemConfig apply_sweep(const ExperimentSpec& spec, double value) {
  SystemConfig cfg = spec.base;
  switch (spec.sweep_axis) {
    case SweepAxis::kFronthaul:
      cfg.fronthaul_bits = value;
      break;
    case SweepAxis::kStripes: {
      const int total = spec.total_aps ? *spec.total_aps : cfg.total_aps();
      cfg.stripes = static_cast<int>(value);
      cfg.aps_per_stripe = total / cfg.stripes;
      break;
    }
    case SweepAxis::kTxPower:
      cfg.tx_power_mw = dbm_to_mw(value);
      break;
    case SweepAxis::kAntennas:
      cfg.antennas = static_cast<int>(value);
      break;
    case SweepAxis::kNone:
      break;
  }
  cfg.validate();
  return cfg;
}

namespace {

using nlohmann::json;

const char* const k_known_keys[] = {
    "M",           "L",           "N",          "K",
    "total_aps",   "C_F_bits",    "C_F_gbps",   "bandwidth_mhz",
    "P_tx_mw",     "P_tx_dbm",    "sigma_z2_dbm", "radius_m",
    "height_delta_m", "sigma_phi_deg", "d_H",   "seed",
    "trials",      "placement",   "sweep_axis", "sweep_values",
    "schemes",     "hybrid",      "out",
};

SchemeOptions parse_scheme(const std::string& name) {
  SchemeOptions opt;
  if (name == "mmse-opt") {
    opt.combiner = Combiner::kMmse;
    opt.quantizer = QuantizerKind::kOpt;
  } else if (name == "mrc-opt") {
    opt.combiner = Combiner::kMrc;
    opt.quantizer = QuantizerKind::kOpt;
  } else if (name == "mmse-naive") {
    opt.combiner = Combiner::kMmse;
    opt.quantizer = QuantizerKind::kNaive;
  } else if (name == "mrc-naive") {
    opt.combiner = Combiner::kMrc;
    opt.quantizer = QuantizerKind::kNaive;
  } else {
    throw std::invalid_argument("unknown scheme: " + name);
  }
  return opt;
}

HybridMode parse_hybrid(const std::string& name) {
  if (name == "off") return HybridMode::kOff;
  if (name == "proposed") return HybridMode::kProposed;
  if (name == "random") return HybridMode::kRandom;
  throw std::invalid_argument("unknown hybrid mode: " + name);
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "C_F") return SweepAxis::kFronthaul;
  if (name == "M") return SweepAxis::kStripes;
  if (name == "P_tx") return SweepAxis::kTxPower;
  if (name == "N") return SweepAxis::kAntennas;
  if (name == "none") return SweepAxis::kNone;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config must be a JSON object");

  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(k_known_keys), std::end(k_known_keys),
                     [&](const char* k) { return key == k; }) ==
        std::end(k_known_keys))
      throw std::invalid_argument("unknown config key: " + key);
  }

  ExperimentSpec spec;
  spec.base.seed = 1;
  spec.schemes = {parse_scheme("mmse-opt")};

  if (j.contains("M")) spec.base.stripes = j["M"].get<int>();
  if (j.contains("total_aps")) {
    spec.total_aps = j["total_aps"].get<int>();
    if (j.contains("L")) {
      spec.base.aps_per_stripe = j["L"].get<int>();
    } else {
      if (*spec.total_aps % spec.base.stripes != 0)
        throw std::invalid_argument(
            "total_aps is not divisible by stripe count M");
      spec.base.aps_per_stripe = *spec.total_aps / spec.base.stripes;
    }
  } else if (j.contains("L")) {
    spec.base.aps_per_stripe = j["L"].get<int>();
  }
  if (j.contains("N")) spec.base.antennas = j["N"].get<int>();
  if (j.contains("K")) spec.base.ues = j["K"].get<int>();

  const double bandwidth_hz =
      j.contains("bandwidth_mhz") ? j["bandwidth_mhz"].get<double>() * 1e6
                                  : k_default_bandwidth_hz;
  if (j.contains("C_F_bits") && j.contains("C_F_gbps"))
    throw std::invalid_argument("give either C_F_bits or C_F_gbps, not both");
  if (j.contains("C_F_bits"))
    spec.base.fronthaul_bits = j["C_F_bits"].get<double>();
  if (j.contains("C_F_gbps"))
    spec.base.fronthaul_bits = j["C_F_gbps"].get<double>() * 1e9 / bandwidth_hz;

  if (j.contains("P_tx_mw") && j.contains("P_tx_dbm"))
    throw std::invalid_argument("give either P_tx_mw or P_tx_dbm, not both");
  if (j.contains("P_tx_mw")) spec.base.tx_power_mw = j["P_tx_mw"].get<double>();
  if (j.contains("P_tx_dbm"))
    spec.base.tx_power_mw = dbm_to_mw(j["P_tx_dbm"].get<double>());
  if (j.contains("sigma_z2_dbm"))
    spec.base.noise_power_mw = dbm_to_mw(j["sigma_z2_dbm"].get<double>());
  if (j.contains("radius_m"))
    spec.base.coverage_radius_m = j["radius_m"].get<double>();
  if (j.contains("height_delta_m"))
    spec.base.ap_height_delta_m = j["height_delta_m"].get<double>();
  if (j.contains("sigma_phi_deg"))
    spec.base.angular_spread_rad =
        j["sigma_phi_deg"].get<double>() * k_pi / 180.0;
  if (j.contains("d_H")) spec.base.antenna_spacing = j["d_H"].get<double>();
  if (j.contains("seed")) spec.base.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("trials")) spec.base.trials = j["trials"].get<int>();
  if (j.contains("placement")) {
    const std::string p = j["placement"].get<std::string>();
    if (p == "circle")
      spec.base.placement = Placement::kCircle;
    else if (p == "sector_L_shape")
      spec.base.placement = Placement::kSectorLShape;
    else
      throw std::invalid_argument("unknown placement: " + p);
  }
  if (j.contains("sweep_axis"))
    spec.sweep_axis = parse_axis(j["sweep_axis"].get<std::string>());
  if (j.contains("sweep_values"))
    spec.sweep_values = j["sweep_values"].get<std::vector<double>>();
  if (j.contains("schemes")) {
    spec.schemes.clear();
    for (const auto& s : j["schemes"])
      spec.schemes.push_back(parse_scheme(s.get<std::string>()));
  }
  if (j.contains("hybrid"))
    spec.hybrid = parse_hybrid(j["hybrid"].get<std::string>());
  if (j.contains("out")) spec.output_path = j["out"].get<std::string>();

  spec.validate();
  return spec;
}

ExperimentSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

struct TrialResult {
  double sum_rate = 0.0;
  double cutset = 0.0;
  double mean_fh_rate = 0.0;
  long overhead = 0;
};

TrialResult run_trial(const SystemConfig& cfg, const SchemeOptions& scheme,
                      std::uint64_t seed, std::size_t scheme_index) {
  const Scenario scenario = make_scenario(cfg, seed);
  // Independent stream for the random analog phases, keyed off the
  // trial seed and scheme slot.
  Rng design_rng(mix_seed(seed, 0xA110C000ULL + scheme_index));
  const InpStrategy strategy =
      design_network(scenario, cfg.fronthaul_bits, scheme, design_rng);
  const RateReport report = evaluate(scenario, strategy, cfg.fronthaul_bits);

  TrialResult out;
  out.sum_rate = report.sum_rate_lb;
  out.cutset = report.cutset;
  out.overhead = report.overhead_total;
  double fh_acc = 0.0;
  int fh_n = 0;
  for (const auto& stripe : report.per_ap_fh_rate)
    for (double r : stripe) {
      fh_acc += r;
      ++fh_n;
    }
  out.mean_fh_rate = fh_n > 0 ? fh_acc / fh_n : 0.0;
  return out;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<double> values = spec.sweep_values;
  if (spec.sweep_axis == SweepAxis::kNone || values.empty()) values = {0.0};

  const int trials = spec.base.trials;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, trials);

  std::vector<ExperimentRow> rows;
  for (double value : values) {
    const SystemConfig cfg = spec.sweep_axis == SweepAxis::kNone
                                 ? spec.base
                                 : apply_sweep(spec, value);
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      SchemeOptions scheme = spec.schemes[s];
      scheme.hybrid = spec.hybrid;

      std::vector<TrialResult> results(trials);
      std::atomic<int> next{0};
      auto work = [&]() {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
          results[t] =
              run_trial(cfg, scheme, trial_seed(cfg.seed, t), s);
      };
      std::vector<std::thread> pool;
      for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
      work();
      for (auto& th : pool) th.join();

      // Fixed-order reduction keeps the CSV byte-identical across runs.
      ExperimentRow row;
      row.sweep_axis = sweep_axis_name(spec.sweep_axis);
      row.sweep_value = value;
      row.scheme = scheme_label(SchemeOptions{scheme.combiner,
                                              scheme.quantizer,
                                              HybridMode::kOff});
      row.hybrid = spec.hybrid == HybridMode::kOff
                       ? "off"
                       : (spec.hybrid == HybridMode::kProposed ? "proposed"
                                                               : "random");
      row.trials = trials;
      row.seed = cfg.seed;
      double sum = 0.0, sum_cut = 0.0, sum_fh = 0.0;
      for (const TrialResult& r : results) {
        sum += r.sum_rate;
        sum_cut += r.cutset;
        sum_fh += r.mean_fh_rate;
        row.trial_sum_rates.push_back(r.sum_rate);
      }
      row.mean_sum_rate = sum / trials;
      row.mean_cutset = sum_cut / trials;
      row.mean_fh_rate = sum_fh / trials;
      row.overhead_reals = results.empty() ? 0 : results.front().overhead;
      double var = 0.0;
      for (const TrialResult& r : results) {
        const double d = r.sum_rate - row.mean_sum_rate;
        var += d * d;
      }
      row.std_sum_rate = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string fmt9(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

}  // namespace

std::string csv_header() {
  return "sweep_axis,sweep_value,scheme,hybrid,mean_sum_rate,std_sum_rate,"
         "mean_cutset,mean_fh_rate,overhead_reals,trials,seed";
}

std::string csv_line(const ExperimentRow& row) {
  std::ostringstream os;
  os << row.sweep_axis << ',' << fmt9(row.sweep_value) << ',' << row.scheme
     << ',' << row.hybrid << ',' << fmt9(row.mean_sum_rate) << ','
     << fmt9(row.std_sum_rate) << ',' << fmt9(row.mean_cutset) << ','
     << fmt9(row.mean_fh_rate) << ',' << row.overhead_reals << ','
     << row.trials << ',' << row.seed;
  return os.str();
}

void write_csv(const ExperimentSpec& spec,
               const std::vector<ExperimentRow>& rows) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (spec.output_path != "-") {
    file.open(spec.output_path);
    if (!file)
      throw std::runtime_error("cannot write to " + spec.output_path);
    out = &file;
  }
  *out << csv_header() << '\n';
  for (const ExperimentRow& row : rows) *out << csv_line(row) << '\n';
}

}  // namespace stripesim
