#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"

#include "zt/types.hpp"

namespace zt {

/// Single-excitation tight-binding model: site energies, a real symmetric
/// coupling graph, trapping rates and a uniform decay rate.
///
/// Instances are validated on construction and immutable afterwards.
class LatticeModel {
public:
    LatticeModel(RVector site_energies, RMatrix couplings, RVector trap_rates,
                 double decay_rate, int initial_site = 1);

    int n_sites() const { return static_cast<int>(site_energies_.size()); }
    const RVector& site_energies() const { return site_energies_; }
    const RMatrix& couplings() const { return couplings_; }
    const RVector& trap_rates() const { return trap_rates_; }
    double decay_rate() const { return decay_rate_; }
    int initial_site() const { return initial_site_; }

    /// 1-based indices of sites with a nonzero trapping rate.
    std::vector<int> trap_sites() const;
    /// True when the only nonzero couplings are between neighbours i, i+1.
    bool is_chain() const;
    /// Same model with a different initial site.
    LatticeModel with_initial_site(int site) const;

private:
    RVector site_energies_;
    RMatrix couplings_;
    RVector trap_rates_;
    double decay_rate_;
    int initial_site_;
};

enum class Topology { chain, complete, complete_minus_edges };

/// Parameters of a randomly disordered model.
struct DisorderSpec {
    int n_sites = 2;
    Topology topology = Topology::chain;
    std::vector<std::pair<int, int>> removed_edges; // 1-based, complete_minus_edges only
    double mean_disorder = 10.0;                    // eps = eps_1 - eps_n
    double coupling_scale = 1.0;                    // v
    double trap_rate = 0.5;                         // kappa at site n
    double decay_rate = 0.001;                      // Gamma
    std::uint64_t seed = 0;
};

/// Deterministic site-energy profiles for chains with eps_1 - eps_{L+1} = eps.
enum class ChainProfile {
    ramp,   ///< evenly spaced from eps down to 0
    ladder, ///< interior sites alternate above eps and below 0, all pairwise gaps >= eps/2
};

/// Nearest-neighbour chain with uniform coupling v and trap rate kappa at the last site.
LatticeModel build_chain(int n_sites, const std::vector<double>& site_energies, double v,
                         double kappa, double gamma);

/// Site energies for an (L+1)-site chain following `profile`.
std::vector<double> chain_energies(int n_sites, double eps, ChainProfile profile);

/// Random model drawn from `spec`; a pure function of the spec (including seed).
///
/// Site energies: eps_1 = eps, eps_n = 0, interior uniform on [0, eps] and
/// resampled until every pairwise gap is at least eps/(2n). Couplings are
/// uniform on [v/2, 3v/2] over the topology's edges, with v_{1n} = v for the
/// complete topologies.
LatticeModel build_graph(const DisorderSpec& spec);

struct EffectiveHamiltonian {
    CMatrix matrix;        ///< H - i diag(Gamma + kappa_i)
    RMatrix hermitian_part; ///< H
};

EffectiveHamiltonian effective_hamiltonian(const LatticeModel& model);

nlohmann::json to_json(const LatticeModel& model);
LatticeModel model_from_json(const nlohmann::json& j);

} // namespace zt
