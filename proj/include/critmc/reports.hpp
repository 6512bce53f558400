#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "critmc/baseline.hpp"
#include "critmc/constants.hpp"
#include "critmc/runner.hpp"

namespace critmc {

// All artifact writers refuse to overwrite an existing file unless force
// is set; reals are printed with full round-trip precision so re-runs
// with the same config are byte-identical.
void write_text_artifact(const std::filesystem::path& path,
                         const std::string& header, const std::string& body,
                         bool force);
void write_histogram_csv(const std::filesystem::path& path,
                         const std::string& header, const LogHistogram& hist,
                         bool force);
void write_tail_profile_csv(const std::filesystem::path& path,
                            const std::string& header,
                            const TailProfile& profile, bool force);
void write_defect_csv(const std::filesystem::path& path,
                      const std::string& header, const DefectGrid& defect,
                      bool force);
void write_residual_csv(const std::filesystem::path& path,
                        const std::string& header, const ResidualGrid& grid,
                        bool force);

std::string format_real(double v);  // %.17g
std::string render_validation(const ValidationReport& rep);
std::string render_constants(const ConstantsReport& rep, const PlateauLink& link,
                             double window_lo, double window_hi);
std::string render_kesten(const KestenBaselineReport& rep);
std::string render_plateau(const std::vector<std::pair<double, double>>& pairs,
                           const std::vector<PlateauFit>& fits);

}  // namespace critmc
