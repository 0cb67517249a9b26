#pragma once

#include <functional>

#include "fno/field.hpp"
#include "fno/grf.hpp"

namespace fno {

/// Point observations of the vorticity at time t_obs on an m x m uniform
/// interior grid, snapped to simulation grid nodes (offsets recorded).
struct ObservationOperator {
    int64_t obs_grid = 7;
    int64_t resolution = 0;
    double t_obs = 20.0;
    double sigma_noise = 0.1;
    std::vector<int64_t> indices;  // flat indices into the s x s grid
    std::vector<double> offsets;   // snapping offsets in grid units

    /// Points x_ij = (i/(m+1), j/(m+1)) for i,j = 1..m, snapped to the grid.
    static ObservationOperator uniform_grid(int64_t m, int64_t s, double t_obs, double sigma);

    std::vector<double> observe(const Field& w) const;
};

/// Forward map w0 -> w(t_obs); throws NumericError on solver blow-up, which
/// the potential converts into an automatic rejection.
using ForwardMap = std::function<Field(const Field& w0)>;

/// Gaussian data misfit Phi(w0) = ||obs - O(G(w0))||^2 / (2 sigma^2);
/// +infinity when the forward map blows up.
double potential(const Field& w0, const std::vector<double>& obs, const ObservationOperator& op,
                 const ForwardMap& forward);

struct McmcConfig {
    double beta = 0.05;            // pCN step size in (0, 1]
    int64_t n_samples = 2000;      // post burn-in steps
    int64_t burn_in = 500;
    int64_t thin = 10;             // keep every thin-th post burn-in state
    uint64_t seed = 0;
    GrfSpec prior;
    Shape resolution;
    double min_acceptance = 0.01;  // abort threshold
    int64_t acceptance_check_every = 200;

    void validate() const;
};

struct ChainRecord {
    int64_t step;
    double phi;
    bool accepted;
    double acceptance_rate; // running, over all steps so far
};

struct Chain {
    int64_t steps = 0;
    int64_t accepted = 0;
    int64_t forward_calls = 0;
    Field mean;                  // running mean of post burn-in states
    std::vector<Field> samples;  // thinned post burn-in states
    std::vector<ChainRecord> records;

    double acceptance_rate() const {
        return steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0;
    }
};

struct PcnState {
    Field current;
    double phi = 0.0;
};

/// One preconditioned Crank-Nicolson step: propose
/// w' = sqrt(1 - beta^2) w + beta xi with xi ~ prior, accept with probability
/// min(1, exp(Phi(w) - Phi(w'))). The prior draw uses step_rng.derive(0), the
/// acceptance uniform step_rng.derive(1). Returns whether the proposal was
/// accepted.
bool pcn_step(PcnState& state, const McmcConfig& cfg, const RngStream& step_rng,
              const std::vector<double>& obs, const ObservationOperator& op,
              const ForwardMap& forward, int64_t* forward_calls = nullptr);

/// Burn-in + sampling loop with acceptance-rate guard, running mean and
/// thinned sample storage. Exactly one forward evaluation per step plus one
/// for the initial state.
Chain run_mcmc(const McmcConfig& cfg, const std::vector<double>& obs,
               const ObservationOperator& op, const ForwardMap& forward);

} // namespace fno
