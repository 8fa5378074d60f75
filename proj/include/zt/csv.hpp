#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zt/entanglement.hpp"
#include "zt/measurement.hpp"
#include "zt/open_system.hpp"
#include "zt/transfer.hpp"

namespace zt::csv {

/// Rendering with 12 significant digits, '.' decimal,
/// independent of the process locale.
std::string format(double x);

/// Header plus rows joined with ',' and '\n'.
std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows);

/// t,p_1..p_n,trace
std::string trajectory(const std::vector<double>& times, const std::vector<CMatrix>& densities);
/// t,p_1..p_n,trace,se_p_1..se_p_n
std::string ensemble(const EnsembleResult& r);
/// t,p_1..p_n,trace from a measured trajectory (populations only)
std::string measured(const MeasuredTrajectory& m);
/// tau,eps_tau,eta,trapped,dissipated,residual
std::string tau_scan(const TauScan& scan);
/// t,concurrence
std::string concurrence(const ConcurrenceSeries& s);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace zt::csv
