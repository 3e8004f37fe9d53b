// Experiment-runner CLI: one subcommand per prediction of the two-qubit
// measurement-state model. Outputs are deterministic: identical flags
// (including seeds) produce byte-identical files.

#include <clocale>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msim/bell.hpp"
#include "msim/linalg.hpp"
#include "msim/mstate.hpp"
#include "msim/rtm.hpp"
#include "msim/types.hpp"
#include "msim/whichpath.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// One tabular result: a resolved-config map, named columns, typed rows, and
// optional summary values appended after the data.
struct Table {
  std::string subcommand;
  std::map<std::string, std::string> config;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  std::vector<std::pair<std::string, std::string>> summary;

  std::string config_line() const {
    std::string line = "# msim " + subcommand;
    for (const auto& [key, value] : config) {
      line += " " + key + "=" + value;
    }
    return line;
  }

  std::string cell_text(const nlohmann::json& cell) const {
    if (cell.is_number_float()) return fmt(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
  }

  std::string to_csv() const {
    std::string out = config_line() + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += columns[c];
      out += c + 1 < columns.size() ? "," : "\n";
    }
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out += cell_text(row[c]);
        out += c + 1 < row.size() ? "," : "\n";
      }
    }
    for (const auto& [key, value] : summary) {
      out += "# " + key + " = " + value + "\n";
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::json j;
    j["command"] = subcommand;
    j["config"] = config;
    j["columns"] = columns;
    j["rows"] = rows;
    if (!summary.empty()) {
      nlohmann::json s;
      for (const auto& [key, value] : summary) s[key] = value;
      j["summary"] = s;
    }
    return j.dump(2) + "\n";
  }
};

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp(target);
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + tmp.string());
    f << content;
  }
  fs::rename(tmp, target);
}

struct CommonFlags {
  std::string out;
  std::string format = "csv";
  bool deg = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", out, "Output file (stdout when omitted)");
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_flag("--deg", deg, "Interpret angle flags as degrees");
  }

  double angle(double value) const { return deg ? value * kPi / 180.0 : value; }

  void record(Table& table) const {
    table.config["format"] = format;
    table.config["out"] = out.empty() ? "-" : out;
    table.config["deg"] = deg ? "1" : "0";
  }
};

void push_complex_row(Table& table, const std::string& name, std::complex<double> z) {
  table.rows.push_back({name, z.real(), z.imag()});
}

Table run_ms(double alpha, double phi, double degeneracy_tol) {
  const msim::SuperpositionParams params{alpha, phi};
  const msim::StateVec ms = msim::build_ms(params);
  const auto [rho_s, rho_a] = msim::reduced_pair(params);
  const msim::CoherenceWitness ws = msim::coherence_witness(rho_s);
  const msim::CoherenceWitness wa = msim::coherence_witness(rho_a);

  Table table;
  table.subcommand = "ms";
  table.config = {{"alpha", fmt(alpha)},
                  {"phi", fmt(phi)},
                  {"degeneracy_tol", fmt(degeneracy_tol)}};
  table.columns = {"quantity", "re", "im"};
  const std::vector<std::string> amp_names = {"amp_s1a1", "amp_s1a2", "amp_s2a1", "amp_s2a2"};
  for (Eigen::Index k = 0; k < 4; ++k) {
    push_complex_row(table, amp_names[static_cast<std::size_t>(k)], ms.amplitudes(k));
  }
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      push_complex_row(table, "rho_S_" + std::to_string(i) + std::to_string(j),
                       rho_s.matrix(i, j));
    }
  }
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      push_complex_row(table, "rho_A_" + std::to_string(i) + std::to_string(j),
                       rho_a.matrix(i, j));
    }
  }
  table.rows.push_back({"witness_S_q", ws.q, 0.0});
  table.rows.push_back({"witness_S_p", ws.p, 0.0});
  table.rows.push_back({"witness_A_q", wa.q, 0.0});
  table.rows.push_back({"witness_A_p", wa.p, 0.0});
  table.rows.push_back({"born_s1", std::cos(alpha) * std::cos(alpha), 0.0});
  table.rows.push_back({"born_s2", std::sin(alpha) * std::sin(alpha), 0.0});
  table.rows.push_back(
      {"degenerate", msim::degeneracy_flag(rho_s, degeneracy_tol) ? 1.0 : 0.0, 0.0});
  return table;
}

Table run_rtm(double phi_min, double phi_max, int steps, std::int64_t trials,
              std::uint64_t seed, double alpha) {
  Table table;
  table.subcommand = "rtm";
  table.config = {{"phi_min", fmt(phi_min)}, {"phi_max", fmt(phi_max)},
                  {"steps", std::to_string(steps)}, {"trials", std::to_string(trials)},
                  {"seed", std::to_string(seed)},   {"alpha", fmt(alpha)}};
  table.columns = {"phi", "analytic_coincidence", "sampled_fraction", "marginal_s1",
                   "marginal_a1"};
  for (int k = 0; k < steps; ++k) {
    const double phi =
        steps == 1 ? phi_min : phi_min + k * (phi_max - phi_min) / (steps - 1);
    const msim::RTMConfig cfg{phi, 0.0, alpha};
    const msim::StateVec out = msim::rtm_state(cfg);
    const msim::JointDistribution jd = msim::joint_probs(out);
    const double analytic = jd.p(0, 0) + jd.p(1, 1);
    const msim::CoincidenceCounts counts =
        msim::simulate_counts(cfg, trials, seed + static_cast<std::uint64_t>(k));
    const double sampled =
        static_cast<double>(counts.n_coincidence) / static_cast<double>(trials);
    const auto [s1, s2] = msim::marginals(out, msim::Subsystem::S);
    const auto [a1, a2] = msim::marginals(out, msim::Subsystem::A);
    (void)s2;
    (void)a2;
    table.rows.push_back({phi, analytic, sampled, s1, a1});
  }
  return table;
}

Table run_chsh(const std::string& state, double alpha, double phi, double grid_step,
               int refine_iters) {
  const msim::SuperpositionParams params{alpha, phi};
  const msim::DensityOp rho = state == "ms" ? msim::density(msim::build_ms(params))
                                            : msim::collapsed_mixture(params);
  const msim::CHSHOptimum opt = msim::optimize_chsh(rho, grid_step, refine_iters);

  Table table;
  table.subcommand = "chsh";
  table.config = {{"state", state},
                  {"alpha", fmt(alpha)},
                  {"phi", fmt(phi)},
                  {"grid_step", fmt(grid_step)},
                  {"refine_iters", std::to_string(refine_iters)}};
  table.columns = {"s_value",  "a1_theta", "a1_az",    "a2_theta", "a2_az",
                   "b1_theta", "b1_az",    "b2_theta", "b2_az"};
  table.rows.push_back({opt.value, opt.settings.a1.theta, opt.settings.a1.az,
                        opt.settings.a2.theta, opt.settings.a2.az, opt.settings.b1.theta,
                        opt.settings.b1.az, opt.settings.b2.theta, opt.settings.b2.az});
  return table;
}

Table run_doubleslit(double overlap_re, double overlap_im, int samples_per_period,
                     double slit_separation, double wavelength, double screen_distance) {
  const msim::SlitGeometry geometry = msim::default_slit_geometry(
      3, samples_per_period, slit_separation, wavelength, screen_distance);
  const msim::WhichPathOverlap overlap{{overlap_re, overlap_im}};
  const Eigen::VectorXd pattern = msim::screen_intensity(geometry, overlap);

  Table table;
  table.subcommand = "doubleslit";
  table.config = {{"overlap_re", fmt(overlap_re)},
                  {"overlap_im", fmt(overlap_im)},
                  {"samples_per_period", std::to_string(samples_per_period)},
                  {"slit_separation", fmt(slit_separation)},
                  {"wavelength", fmt(wavelength)},
                  {"screen_distance", fmt(screen_distance)}};
  table.columns = {"x", "intensity"};
  for (Eigen::Index k = 0; k < geometry.x_points.size(); ++k) {
    table.rows.push_back({geometry.x_points(k), pattern(k)});
  }
  table.summary.emplace_back("visibility", fmt(msim::visibility(pattern)));
  return table;
}

Table run_cat(double alpha, std::int64_t trials, std::uint64_t seed) {
  const msim::EnsembleCounts counts = msim::sample_outcomes({alpha, 0.0}, trials, seed);
  Table table;
  table.subcommand = "cat";
  table.config = {{"alpha", fmt(alpha)},
                  {"trials", std::to_string(trials)},
                  {"seed", std::to_string(seed)}};
  table.columns = {"n_trials", "n_outcome1", "n_outcome2", "seed"};
  table.rows.push_back({counts.n_trials, counts.n_outcome1, counts.n_outcome2, counts.seed});
  return table;
}

Table run_entropy(double alpha, double phi) {
  const msim::SuperpositionParams params{alpha, phi};
  const double s_global = msim::vn_entropy(msim::density(msim::build_ms(params)));
  const auto [rho_s, rho_a] = msim::reduced_pair(params);

  Table table;
  table.subcommand = "entropy";
  table.config = {{"alpha", fmt(alpha)}, {"phi", fmt(phi)}};
  table.columns = {"alpha", "phi", "s_global", "s_reduced_s", "s_reduced_a"};
  table.rows.push_back(
      {alpha, phi, s_global, msim::vn_entropy(rho_s), msim::vn_entropy(rho_a)});
  return table;
}

void emit(const CommonFlags& common, Table table) {
  common.record(table);
  write_output(common.out, common.format == "json" ? table.to_json() : table.to_csv());
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");

  CLI::App app{"Two-qubit measurement-state simulator and experiment runner"};
  app.require_subcommand(1);

  auto* ms_cmd = app.add_subcommand("ms", "Measurement state, reduced operators, witnesses");
  CommonFlags ms_common;
  double ms_alpha = kPi / 4, ms_phi = 0.0, ms_tol = 1e-9;
  ms_cmd->add_option("--alpha", ms_alpha, "Amplitude angle in [0, pi/2] (radians)")
      ->capture_default_str();
  ms_cmd->add_option("--phi", ms_phi, "Relative phase in [0, 2*pi) (radians)")
      ->capture_default_str();
  ms_cmd
      ->add_option("--degeneracy-tol", ms_tol,
                   "Eigenvalue gap below which the reduced state counts as degenerate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ms_common.attach(ms_cmd);

  auto* rtm_cmd = app.add_subcommand("rtm", "Two-photon interferometer phase sweep");
  CommonFlags rtm_common;
  double rtm_phi_min = 0.0, rtm_phi_max = 2 * kPi, rtm_alpha = kPi / 4;
  int rtm_steps = 64;
  std::int64_t rtm_trials = 10000;
  std::uint64_t rtm_seed = 42;
  rtm_cmd->add_option("--phi-min", rtm_phi_min, "First relative phase (radians)")
      ->capture_default_str();
  rtm_cmd->add_option("--phi-max", rtm_phi_max, "Last relative phase (radians)")
      ->capture_default_str();
  rtm_cmd->add_option("--steps", rtm_steps, "Number of phase samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rtm_cmd->add_option("--trials", rtm_trials, "Monte Carlo pairs per phase")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rtm_cmd->add_option("--seed", rtm_seed, "Base RNG seed (row k uses seed+k)")
      ->capture_default_str();
  rtm_cmd->add_option("--alpha", rtm_alpha, "Source amplitude angle (radians)")
      ->capture_default_str();
  rtm_common.attach(rtm_cmd);

  auto* chsh_cmd = app.add_subcommand("chsh", "Optimized CHSH value of a bipartite state");
  CommonFlags chsh_common;
  std::string chsh_state;
  double chsh_alpha = kPi / 4, chsh_phi = 0.0, chsh_grid_step = kPi / 12;
  int chsh_refine = 200;
  chsh_cmd->add_option("--state", chsh_state, "State family to optimize over")
      ->check(CLI::IsMember({"ms", "mixture"}))
      ->required();
  chsh_cmd->add_option("--alpha", chsh_alpha, "Amplitude angle (radians)")
      ->capture_default_str();
  chsh_cmd->add_option("--phi", chsh_phi, "Relative phase (radians; ms state only)")
      ->capture_default_str();
  chsh_cmd->add_option("--grid-step", chsh_grid_step, "Coarse search step (radians)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  chsh_cmd->add_option("--refine-iters", chsh_refine, "Coordinate-descent passes")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  chsh_common.attach(chsh_cmd);

  auto* ds_cmd = app.add_subcommand("doubleslit", "Which-path screen pattern and visibility");
  CommonFlags ds_common;
  double ds_re = 1.0, ds_im = 0.0, ds_sep = 1.0, ds_wl = 1e-3, ds_dist = 1000.0;
  int ds_spp = 1000;
  ds_cmd->add_option("--overlap-re", ds_re, "Re of the which-path tag overlap")
      ->capture_default_str();
  ds_cmd->add_option("--overlap-im", ds_im, "Im of the which-path tag overlap")
      ->capture_default_str();
  ds_cmd->add_option("--samples-per-period", ds_spp, "Screen samples per fringe period")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  ds_cmd->add_option("--slit-separation", ds_sep, "Slit separation (length units)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ds_cmd->add_option("--wavelength", ds_wl, "Wavelength (length units)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ds_cmd->add_option("--screen-distance", ds_dist, "Slit-to-screen distance (length units)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ds_common.attach(ds_cmd);

  auto* cat_cmd = app.add_subcommand("cat", "Born-rule ensemble counts");
  CommonFlags cat_common;
  double cat_alpha = kPi / 4;
  std::int64_t cat_trials = 10000;
  std::uint64_t cat_seed = 42;
  cat_cmd->add_option("--alpha", cat_alpha, "Amplitude angle (radians)")
      ->capture_default_str();
  cat_cmd->add_option("--trials", cat_trials, "Number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cat_cmd->add_option("--seed", cat_seed, "RNG seed")->capture_default_str();
  cat_common.attach(cat_cmd);

  auto* ent_cmd = app.add_subcommand("entropy", "Global and reduced von Neumann entropies");
  CommonFlags ent_common;
  double ent_alpha = kPi / 4, ent_phi = 0.0;
  ent_cmd->add_option("--alpha", ent_alpha, "Amplitude angle (radians)")
      ->capture_default_str();
  ent_cmd->add_option("--phi", ent_phi, "Relative phase (radians)")->capture_default_str();
  ent_common.attach(ent_cmd);

  try {
    app.parse(argc, argv);

    if (ms_cmd->parsed()) {
      emit(ms_common, run_ms(ms_common.angle(ms_alpha), ms_common.angle(ms_phi), ms_tol));
    } else if (rtm_cmd->parsed()) {
      emit(rtm_common,
           run_rtm(rtm_common.angle(rtm_phi_min), rtm_common.angle(rtm_phi_max), rtm_steps,
                   rtm_trials, rtm_seed, rtm_common.angle(rtm_alpha)));
    } else if (chsh_cmd->parsed()) {
      emit(chsh_common, run_chsh(chsh_state, chsh_common.angle(chsh_alpha),
                                 chsh_common.angle(chsh_phi), chsh_grid_step, chsh_refine));
    } else if (ds_cmd->parsed()) {
      emit(ds_common, run_doubleslit(ds_re, ds_im, ds_spp, ds_sep, ds_wl, ds_dist));
    } else if (cat_cmd->parsed()) {
      emit(cat_common, run_cat(cat_common.angle(cat_alpha), cat_trials, cat_seed));
    } else if (ent_cmd->parsed()) {
      emit(ent_common, run_entropy(ent_common.angle(ent_alpha), ent_common.angle(ent_phi)));
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n\nValid keys:\n";
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
    return 2;
  } catch (const msim::ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
