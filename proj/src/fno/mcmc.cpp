#include "fno/mcmc.hpp"

#include <cmath>
#include <limits>

namespace fno {

ObservationOperator ObservationOperator::uniform_grid(int64_t m, int64_t s, double t_obs,
                                                      double sigma) {
    FNO_REQUIRE(m >= 1 && s >= 2, DataError, "observation grid: need m >= 1, s >= 2");
    FNO_REQUIRE(sigma > 0.0, DataError, "observation noise must be positive");
    ObservationOperator op;
    op.obs_grid = m;
    op.resolution = s;
    op.t_obs = t_obs;
    op.sigma_noise = sigma;
    for (int64_t i = 1; i <= m; ++i) {
        for (int64_t j = 1; j <= m; ++j) {
            double x = static_cast<double>(i) / static_cast<double>(m + 1) * static_cast<double>(s);
            double y = static_cast<double>(j) / static_cast<double>(m + 1) * static_cast<double>(s);
            int64_t gi = static_cast<int64_t>(std::llround(x)) % s;
            int64_t gj = static_cast<int64_t>(std::llround(y)) % s;
            op.indices.push_back(gi * s + gj);
            op.offsets.push_back(x - std::llround(x));
            op.offsets.push_back(y - std::llround(y));
        }
    }
    return op;
}

std::vector<double> ObservationOperator::observe(const Field& w) const {
    std::vector<double> out(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) out[i] = w[indices[i]];
    return out;
}

double potential(const Field& w0, const std::vector<double>& obs, const ObservationOperator& op,
                 const ForwardMap& forward) {
    Field w_obs;
    try {
        w_obs = forward(w0);
    } catch (const NumericError&) {
        return std::numeric_limits<double>::infinity(); // auto-reject
    }
    std::vector<double> pred = op.observe(w_obs);
    FNO_REQUIRE(pred.size() == obs.size(), DataError, "potential: observation size mismatch");
    double misfit = 0.0;
    for (size_t i = 0; i < obs.size(); ++i) {
        double d = obs[i] - pred[i];
        misfit += d * d;
    }
    return misfit / (2.0 * op.sigma_noise * op.sigma_noise);
}

void McmcConfig::validate() const {
    FNO_REQUIRE(beta > 0.0 && beta <= 1.0, UsageError, "mcmc: beta must be in (0, 1]");
    FNO_REQUIRE(n_samples >= 1 && burn_in >= 0, UsageError, "mcmc: bad chain lengths");
    FNO_REQUIRE(burn_in < n_samples, UsageError, "mcmc: burn-in must be below n_samples");
    FNO_REQUIRE(thin >= 1, UsageError, "mcmc: thin must be >= 1");
    FNO_REQUIRE(!resolution.empty(), UsageError, "mcmc: resolution unset");
}

bool pcn_step(PcnState& state, const McmcConfig& cfg, const RngStream& step_rng,
              const std::vector<double>& obs, const ObservationOperator& op,
              const ForwardMap& forward, int64_t* forward_calls) {
    Field xi = sample_grf(cfg.prior, cfg.resolution, step_rng.derive(0));
    double keep = std::sqrt(1.0 - cfg.beta * cfg.beta);
    Field proposal(state.current.shape());
    for (int64_t i = 0; i < proposal.size(); ++i)
        proposal[i] = keep * state.current[i] + cfg.beta * xi[i];

    double phi_new = potential(proposal, obs, op, forward);
    if (forward_calls) ++*forward_calls;

    bool accept;
    if (std::isinf(phi_new))
        accept = false;
    else if (std::isinf(state.phi) || phi_new <= state.phi)
        accept = true;
    else {
        double u = step_rng.derive(1).next_uniform();
        accept = u < std::exp(state.phi - phi_new);
    }
    if (accept) {
        state.current = std::move(proposal);
        state.phi = phi_new;
    }
    return accept;
}

Chain run_mcmc(const McmcConfig& cfg, const std::vector<double>& obs,
               const ObservationOperator& op, const ForwardMap& forward) {
    cfg.validate();
    RngStream root = RngStream(cfg.seed).derive(0x6d636d63ULL);
    PcnState state;
    state.current = sample_grf(cfg.prior, cfg.resolution, root.derive(0));
    state.phi = potential(state.current, obs, op, forward);

    Chain chain;
    chain.forward_calls = 1;
    chain.mean = Field(state.current.shape(), 0.0);
    const int64_t total = cfg.burn_in + cfg.n_samples;
    chain.records.reserve(static_cast<size_t>(total));
    int64_t post_count = 0;

    for (int64_t step = 0; step < total; ++step) {
        bool accepted = pcn_step(state, cfg, root.derive(static_cast<uint64_t>(step) + 1), obs, op,
                                 forward, &chain.forward_calls);
        chain.steps += 1;
        chain.accepted += accepted;
        chain.records.push_back({step, state.phi, accepted, chain.acceptance_rate()});

        if (step >= cfg.burn_in) {
            ++post_count;
            double w_new = 1.0 / static_cast<double>(post_count);
            for (int64_t i = 0; i < chain.mean.size(); ++i)
                chain.mean[i] += w_new * (state.current[i] - chain.mean[i]);
            if ((post_count - 1) % cfg.thin == 0) chain.samples.push_back(state.current);
        }

        if (chain.steps >= cfg.acceptance_check_every &&
            chain.steps % cfg.acceptance_check_every == 0 &&
            chain.acceptance_rate() < cfg.min_acceptance)
            throw NumericError(concat("mcmc: acceptance rate ", chain.acceptance_rate(),
                                      " after ", chain.steps,
                                      " steps is below ", cfg.min_acceptance,
                                      "; shrink beta and retry"));
    }
    return chain;
}

} // namespace fno
