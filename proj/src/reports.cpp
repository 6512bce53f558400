#include "critmc/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "critmc/config.hpp"

namespace critmc {

namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_artifact(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) {
    throw ConfigError("refusing to overwrite existing artifact '" +
                      path.string() + "' (pass --force)");
  }
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_text_artifact(const fs::path& path, const std::string& header,
                         const std::string& body, bool force) {
  auto out = open_artifact(path, force);
  out << header << body;
}

void write_histogram_csv(const fs::path& path, const std::string& header,
                         const LogHistogram& hist, bool force) {
  auto out = open_artifact(path, force);
  out << header;
  out << "# total_steps=" << hist.total_steps()
      << " overflow_pos=" << hist.overflow_pos()
      << " overflow_neg=" << hist.overflow_neg() << "\n";
  out << "side,k,lo,hi,weight\n";
  const auto& g = hist.geometry();
  for (std::int32_t k = g.k_max; k >= g.k_min; --k) {
    if (hist.neg_weight(k) == 0) continue;
    out << "neg," << k << "," << format_real(-hist.bin_hi(k)) << ","
        << format_real(-hist.bin_lo(k)) << "," << hist.neg_weight(k) << "\n";
  }
  if (hist.near_zero() > 0) {
    out << "zero,0," << format_real(-hist.near_zero_edge()) << ","
        << format_real(hist.near_zero_edge()) << "," << hist.near_zero()
        << "\n";
  }
  for (std::int32_t k = g.k_min; k <= g.k_max; ++k) {
    if (hist.pos_weight(k) == 0) continue;
    out << "pos," << k << "," << format_real(hist.bin_lo(k)) << ","
        << format_real(hist.bin_hi(k)) << "," << hist.pos_weight(k) << "\n";
  }
}

void write_tail_profile_csv(const fs::path& path, const std::string& header,
                            const TailProfile& profile, bool force) {
  auto out = open_artifact(path, force);
  out << header;
  out << "# alpha=" << format_real(profile.alpha)
      << " beta=" << format_real(profile.beta)
      << " side=" << (profile.negative_side ? "neg" : "pos")
      << " normalization=" << profile.normalization << "\n";
  out << "x,f_hat,stderr\n";
  for (const auto& p : profile.grid) {
    out << format_real(p.x) << ",";
    if (p.missing) {
      out << ",\n";
    } else {
      out << format_real(p.f_hat) << "," << format_real(p.stderr_) << "\n";
    }
  }
}

void write_defect_csv(const fs::path& path, const std::string& header,
                      const DefectGrid& defect, bool force) {
  auto out = open_artifact(path, force);
  out << header;
  out << "# alpha=" << format_real(defect.alpha)
      << " beta=" << format_real(defect.beta)
      << " truncated_fraction=" << format_real(defect.truncated_fraction)
      << "\n";
  out << "x,psi,stderr,method\n";
  const char* method =
      defect.method == DefectMethod::FromDefinition ? "definition" : "residual";
  for (std::size_t j = 0; j < defect.x.size(); ++j) {
    out << format_real(defect.x[j]) << "," << format_real(defect.psi[j]) << ","
        << format_real(defect.stderr_[j]) << "," << method << "\n";
  }
}

void write_residual_csv(const fs::path& path, const std::string& header,
                        const ResidualGrid& grid, bool force) {
  auto out = open_artifact(path, force);
  out << header;
  out << "# sup_abs=" << format_real(grid.sup_abs)
      << " sup_z=" << format_real(grid.sup_z)
      << " clipped_fraction=" << format_real(grid.clipped_fraction) << "\n";
  out << "x,r,stderr,z\n";
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    const double z =
        grid.stderr_[j] > 0.0 ? grid.r[j] / grid.stderr_[j] : 0.0;
    out << format_real(grid.x[j]) << "," << format_real(grid.r[j]) << ","
        << format_real(grid.stderr_[j]) << "," << format_real(z) << "\n";
  }
}

std::string render_validation(const ValidationReport& rep) {
  std::ostringstream s;
  s << "e_log_a = " << format_real(rep.e_log_a) << "\n";
  s << "sigma2 = " << format_real(rep.sigma2) << "\n";
  s << "spread_out = " << (rep.spread_out ? "true" : "false") << "\n";
  s << "degenerate_a = " << (rep.degenerate_a ? "true" : "false") << "\n";
  for (const auto& [id, flag] : rep.moment_flags) {
    s << "assumption." << id << " = " << (flag.holds ? "holds" : "fails")
      << " (" << flag.method << ")\n";
  }
  s << "all_hold = " << (rep.all_hold() ? "true" : "false") << "\n";
  return s.str();
}

namespace {

std::string with_err(const ScalarEstimate& e) {
  return format_real(e.value) + " +- " + format_real(e.stderr_);
}

}  // namespace

std::string render_constants(const ConstantsReport& rep, const PlateauLink& link,
                             double window_lo, double window_hi) {
  std::ostringstream s;
  s << "normalization = " << rep.normalization << "\n";
  s << "model_fingerprint = " << rep.model_fingerprint << "\n";
  s << "sigma2 = " << format_real(rep.sigma2) << "\n";
  s << "c1 = " << format_real(rep.moments.c1) << " +- "
    << format_real(rep.moments.c1_stderr) << "\n";
  s << "c2 = " << format_real(rep.moments.c2) << " +- "
    << format_real(rep.moments.c2_stderr) << "\n";
  s << "d1_plus = " << with_err(rep.d1_plus) << "\n";
  s << "c_plus_plateau = " << with_err(rep.c_plus_plateau) << "\n";
  if (rep.has_minus) s << "c_minus_plateau = " << with_err(rep.c_minus_plateau) << "\n";
  if (rep.has_formula) s << "c_plus_formula = " << with_err(rep.c_plus_formula) << "\n";
  if (rep.has_sum) s << "c_sum = " << with_err(rep.c_sum) << "\n";
  s << "plateau_window = [" << format_real(window_lo) << ", "
    << format_real(window_hi) << "]\n";
  s << "link.c1_compatible_zero = " << (link.c1_compatible_zero ? "true" : "false")
    << "\n";
  if (link.used_slope_branch) {
    s << "link.slope_z = " << format_real(link.slope_z) << "\n";
  } else {
    s << "link.predicted_level = " << format_real(link.predicted) << " +- "
      << format_real(link.predicted_stderr) << "\n";
    s << "link.z = " << format_real(link.z) << "\n";
    s << "link.rel_gap = " << format_real(link.rel_gap) << "\n";
  }
  return s.str();
}

std::string render_kesten(const KestenBaselineReport& rep) {
  std::ostringstream s;
  s << "alpha_star_analytic = " << format_real(rep.alpha_star_analytic) << "\n";
  s << "alpha_star_fitted = " << format_real(rep.alpha_star_fitted) << " +- "
    << format_real(rep.fitted_stderr) << "\n";
  s << "fit_window = [" << format_real(rep.window_lo) << ", "
    << format_real(rep.window_hi) << "]\n";
  s << "n_steps = " << rep.n_steps << "\n";
  return s.str();
}

std::string render_plateau(const std::vector<std::pair<double, double>>& pairs,
                           const std::vector<PlateauFit>& fits) {
  std::ostringstream s;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    s << "pair = " << format_real(pairs[i].first) << ":"
      << format_real(pairs[i].second) << "\n";
    s << "  window = [" << format_real(f.window_lo) << ", "
      << format_real(f.window_hi) << "] points = " << f.n_points << "\n";
    s << "  level = " << format_real(f.level) << " +- "
      << format_real(f.level_stderr) << "\n";
    s << "  slope = " << format_real(f.slope) << " +- "
      << format_real(f.slope_stderr) << "\n";
    s << "  slope_compatible_zero = "
      << (f.slope_compatible_zero ? "true" : "false") << "\n";
    s << "  tail_constant = " << format_real(f.tail_constant) << " +- "
      << format_real(f.tail_constant_stderr) << "\n";
  }
  return s.str();
}

}  // namespace critmc
