#include "zt/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace zt::csv {

std::string format(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    if (res.ec != std::errc()) throw NumericalError("cannot format value");
    return std::string(buf, res.ptr);
}

std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out += ',';
        out += header[k];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += format(row[k]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> population_header(Eigen::Index n) {
    std::vector<std::string> h{"t"};
    for (Eigen::Index i = 1; i <= n; ++i) h.push_back("p_" + std::to_string(i));
    h.push_back("trace");
    return h;
}

std::vector<double> population_row(double t, const RVector& p) {
    std::vector<double> row{t};
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p(i));
    row.push_back(p.sum());
    return row;
}

} // namespace

std::string trajectory(const std::vector<double>& times, const std::vector<CMatrix>& densities) {
    if (times.size() != densities.size()) throw InvalidArgument("times/densities size mismatch");
    const Eigen::Index n = densities.empty() ? 0 : densities.front().rows();
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < times.size(); ++k)
        rows.push_back(population_row(times[k], densities[k].diagonal().real()));
    return table(population_header(n), rows);
}

std::string ensemble(const EnsembleResult& r) {
    const Eigen::Index n = r.mean.empty() ? 0 : r.mean.front().rows();
    auto header = population_header(n);
    for (Eigen::Index i = 1; i <= n; ++i) header.push_back("se_p_" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        auto row = population_row(r.times[k], r.mean[k].diagonal().real());
        for (Eigen::Index i = 0; i < n; ++i) row.push_back(r.population_se[k](i));
        rows.push_back(std::move(row));
    }
    return table(header, rows);
}

std::string measured(const MeasuredTrajectory& m) {
    const Eigen::Index n = m.populations.empty() ? 0 : m.populations.front().size();
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < m.times.size(); ++k)
        rows.push_back(population_row(m.times[k], m.populations[k]));
    return table(population_header(n), rows);
}

std::string tau_scan(const TauScan& scan) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : scan.points)
        rows.push_back({p.tau, scan.eps * p.tau, p.result.eta, p.result.trapped,
                        p.result.dissipated, p.result.residual});
    return table({"tau", "eps_tau", "eta", "trapped", "dissipated", "residual"}, rows);
}

std::string concurrence(const ConcurrenceSeries& s) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < s.times.size(); ++k) rows.push_back({s.times[k], s.values[k]});
    return table({"t", "concurrence"}, rows);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw Error("write failed for " + path.string());
}

} // namespace zt::csv
