#include "zt/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "zt/rng.hpp"

namespace zt {

namespace {

bool all_finite(const auto& m) { return m.allFinite(); }

std::string pair_name(int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

} // namespace

LatticeModel::LatticeModel(RVector site_energies, RMatrix couplings, RVector trap_rates,
                           double decay_rate, int initial_site)
    : site_energies_(std::move(site_energies)),
      couplings_(std::move(couplings)),
      trap_rates_(std::move(trap_rates)),
      decay_rate_(decay_rate),
      initial_site_(initial_site) {
    const auto n = site_energies_.size();
    if (n < 2) throw InvalidArgument("model needs at least 2 sites");
    if (couplings_.rows() != n || couplings_.cols() != n)
        throw InvalidArgument("couplings must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    if (trap_rates_.size() != n)
        throw InvalidArgument("trap_rates must have length " + std::to_string(n));
    if (!all_finite(site_energies_) || !all_finite(couplings_) || !all_finite(trap_rates_) ||
        !std::isfinite(decay_rate_))
        throw InvalidArgument("model entries must be finite");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (couplings_(i, i) != 0.0)
            throw InvalidArgument("couplings diagonal must be zero at site " +
                                  std::to_string(i + 1));
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (couplings_(i, j) != couplings_(j, i))
                throw InvalidArgument("couplings not symmetric at pair " +
                                      pair_name(int(i), int(j)));
        if (trap_rates_(i) < 0.0)
            throw InvalidArgument("trap rate at site " + std::to_string(i + 1) +
                                  " is negative");
    }
    if (decay_rate_ < 0.0) throw InvalidArgument("decay_rate is negative");
    if (initial_site_ < 1 || initial_site_ > n)
        throw InvalidArgument("initial_site must be in [1, " + std::to_string(n) + "]");
}

std::vector<int> LatticeModel::trap_sites() const {
    std::vector<int> out;
    for (int i = 0; i < n_sites(); ++i)
        if (trap_rates_(i) > 0.0) out.push_back(i + 1);
    return out;
}

bool LatticeModel::is_chain() const {
    for (int i = 0; i < n_sites(); ++i)
        for (int j = i + 2; j < n_sites(); ++j)
            if (couplings_(i, j) != 0.0) return false;
    return true;
}

LatticeModel LatticeModel::with_initial_site(int site) const {
    return {site_energies_, couplings_, trap_rates_, decay_rate_, site};
}

LatticeModel build_chain(int n_sites, const std::vector<double>& site_energies, double v,
                         double kappa, double gamma) {
    if (n_sites < 2) throw InvalidArgument("chain needs at least 2 sites");
    if (static_cast<int>(site_energies.size()) != n_sites)
        throw InvalidArgument("site_energies has length " +
                              std::to_string(site_energies.size()) + ", expected " +
                              std::to_string(n_sites));
    if (kappa < 0.0 || gamma < 0.0) throw InvalidArgument("rates must be nonnegative");
    RMatrix couplings = RMatrix::Zero(n_sites, n_sites);
    for (int i = 0; i + 1 < n_sites; ++i) couplings(i, i + 1) = couplings(i + 1, i) = v;
    RVector traps = RVector::Zero(n_sites);
    traps(n_sites - 1) = kappa;
    return {Eigen::Map<const RVector>(site_energies.data(), n_sites), couplings, traps, gamma};
}

std::vector<double> chain_energies(int n_sites, double eps, ChainProfile profile) {
    if (n_sites < 2) throw InvalidArgument("chain needs at least 2 sites");
    std::vector<double> e(n_sites);
    const int L = n_sites - 1;
    for (int i = 0; i <= L; ++i) {
        if (i == 0) {
            e[i] = eps;
        } else if (i == L) {
            e[i] = 0.0;
        } else if (profile == ChainProfile::ramp) {
            e[i] = eps * double(L - i) / double(L);
        } else {
            // site i+1 (1-based): even -> eps(1 + k/2), odd -> -eps k/2
            const int site = i + 1;
            const int k = site / 2;
            e[i] = (site % 2 == 0) ? eps * (1.0 + 0.5 * k) : -0.5 * eps * ((site - 1) / 2);
        }
    }
    return e;
}

LatticeModel build_graph(const DisorderSpec& spec) {
    const int n = spec.n_sites;
    if (n < 2) throw InvalidArgument("n_sites must be >= 2");
    if (!(spec.mean_disorder >= 0.0)) throw InvalidArgument("mean_disorder must be >= 0");
    if (!(spec.coupling_scale > 0.0)) throw InvalidArgument("coupling_scale must be > 0");
    if (spec.trap_rate < 0.0 || spec.decay_rate < 0.0)
        throw InvalidArgument("rates must be nonnegative");

    std::set<std::pair<int, int>> removed;
    if (spec.topology == Topology::complete_minus_edges) {
        for (auto [a, b] : spec.removed_edges) {
            if (a < 1 || a > n || b < 1 || b > n || a == b)
                throw InvalidArgument("removed edge (" + std::to_string(a) + "," +
                                      std::to_string(b) + ") out of range");
            removed.insert({std::min(a, b) - 1, std::max(a, b) - 1});
        }
    } else if (!spec.removed_edges.empty()) {
        throw InvalidArgument("removed_edges requires topology complete_minus_edges");
    }

    std::mt19937_64 rng(spec.seed);
    const double eps = spec.mean_disorder;
    const double v = spec.coupling_scale;

    RVector energies(n);
    energies(0) = eps;
    energies(n - 1) = 0.0;
    const double min_gap = eps / (2.0 * n);
    for (int attempt = 0;; ++attempt) {
        if (attempt > 100000)
            throw NumericalError("could not draw site energies with minimum gap eps/(2n)");
        for (int i = 1; i + 1 < n; ++i) energies(i) = uniform(rng, 0.0, eps);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                ok = std::abs(energies(i) - energies(j)) >= min_gap;
        if (ok || eps == 0.0) break;
    }

    RMatrix couplings = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool edge = spec.topology == Topology::chain ? (j == i + 1) : true;
            if (!edge) continue;
            const double c = uniform(rng, 0.5 * v, 1.5 * v);
            couplings(i, j) = couplings(j, i) = c;
        }
    }
    if (spec.topology != Topology::chain) couplings(0, n - 1) = couplings(n - 1, 0) = v;
    for (auto [i, j] : removed) couplings(i, j) = couplings(j, i) = 0.0;

    RVector traps = RVector::Zero(n);
    traps(n - 1) = spec.trap_rate;
    return {energies, couplings, traps, spec.decay_rate};
}

EffectiveHamiltonian effective_hamiltonian(const LatticeModel& model) {
    const int n = model.n_sites();
    RMatrix h = model.couplings();
    h.diagonal() = model.site_energies();
    CMatrix m = h.cast<Complex>();
    for (int i = 0; i < n; ++i)
        m(i, i) -= Complex(0.0, model.decay_rate() + model.trap_rates()(i));
    return {std::move(m), std::move(h)};
}

nlohmann::json to_json(const LatticeModel& model) {
    const int n = model.n_sites();
    nlohmann::json couplings = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < n; ++j) row.push_back(model.couplings()(i, j));
        couplings.push_back(std::move(row));
    }
    const auto vec = [](const RVector& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    return {{"n_sites", n},
            {"site_energies", vec(model.site_energies())},
            {"couplings", couplings},
            {"trap_rates", vec(model.trap_rates())},
            {"decay_rate", model.decay_rate()},
            {"initial_site", model.initial_site()}};
}

LatticeModel model_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n_sites").get<int>();
        if (n < 2) throw InvalidArgument("n_sites: must be >= 2");
        const auto energies = j.at("site_energies").get<std::vector<double>>();
        if (static_cast<int>(energies.size()) != n)
            throw InvalidArgument("site_energies: expected " + std::to_string(n) + " entries");
        const auto rows = j.at("couplings").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != n)
            throw InvalidArgument("couplings: expected " + std::to_string(n) + " rows");
        RMatrix couplings(n, n);
        for (int r = 0; r < n; ++r) {
            if (static_cast<int>(rows[r].size()) != n)
                throw InvalidArgument("couplings: row " + std::to_string(r + 1) +
                                      " has wrong length");
            for (int c = 0; c < n; ++c) couplings(r, c) = rows[r][c];
        }
        RVector traps = RVector::Zero(n);
        if (j.contains("trap_rates")) {
            const auto t = j.at("trap_rates").get<std::vector<double>>();
            if (static_cast<int>(t.size()) != n)
                throw InvalidArgument("trap_rates: expected " + std::to_string(n) + " entries");
            for (int i = 0; i < n; ++i) traps(i) = t[i];
        }
        return {Eigen::Map<const RVector>(energies.data(), n), couplings, traps,
                j.value("decay_rate", 0.0), j.value("initial_site", 1)};
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("model JSON: ") + e.what());
    }
}

} // namespace zt
