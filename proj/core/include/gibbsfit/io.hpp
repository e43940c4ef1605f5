#pragma once

#include <filesystem>
#include <string>

#include "gibbsfit/family.hpp"
#include "gibbsfit/loss.hpp"
#include "gibbsfit/posterior.hpp"
#include "gibbsfit/simulate.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit::io {

/// SFT description file: { "alphabet_size": int, "forbidden": ["11", ...] },
/// words rendered as base-36 digit strings.
SftPtr load_sft_file(const std::filesystem::path& path);
void save_sft_file(const Sft& sft, const std::filesystem::path& path);

/// Potential file: { "range": int, "table": { "word": value, ... } }.
Potential load_potential_file(SftPtr sft, const std::filesystem::path& path);
void save_potential_file(const Potential& f, const std::filesystem::path& path);

/// Family file: { "grid": [...], "prior": [...]?, "potentials": {...} } with
/// potentials.kind in {bernoulli, affine, tables}; the latter two need an SFT.
PotentialFamily load_family_file(const std::filesystem::path& path, SftPtr sft);

/// Loss file: { "kind": "squared"|"discrete"|"neg_log_density", ... } with
/// grid x alphabet observation maps.
LossSpec load_loss_file(const std::filesystem::path& path);

/// First line of every report: # seed=... scenario=... beta=... grid_hash=...
struct RunHeader {
  std::uint64_t seed = 0;
  std::string scenario;
  double beta = 1.0;
  std::uint64_t grid_hash = 0;
};

std::string format_double(double x);  // shortest round-trip form

void write_rate_csv(const std::filesystem::path& path, const RunHeader& header,
                    const RateTable& rates);
void write_posterior_csv(const std::filesystem::path& path, const RunHeader& header,
                         const std::vector<PosteriorGrid>& per_n);
void write_concentration_csv(const std::filesystem::path& path, const RunHeader& header,
                             const std::vector<ConcentrationRow>& rows);
void write_audit_csv(const std::filesystem::path& path, const RunHeader& header,
                     const GibbsAuditReport& report);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);
void write_emissions_csv(const std::filesystem::path& path, const EmissionSequence& e);

}  // namespace gibbsfit::io
